//! Multi-degree spline space descriptors.
//!
//! A space lives on `[a, b]` with breakpoints `x_1 < ... < x_q`, one degree per
//! interval and one continuity per breakpoint. Public spaces satisfy
//! `0 <= k_i <= min(d_{i-1}, d_i)`. Internal spaces (derivative spaces and the
//! degenerate rows of the elevation scheme) may carry negative degrees and
//! continuities; their dimension still follows `d_0 + 1 + sum(d_i - k_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// JSON form of a space: `{"interval":[a,b], "breakpoints":[...], "degrees":[...], "continuities":[...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDescription {
    pub interval: [f64; 2],
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    pub degrees: Vec<i64>,
    #[serde(default)]
    pub continuities: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MDSpace {
    pub a: f64,
    pub b: f64,
    pub breakpoints: Vec<f64>,
    pub degrees: Vec<i64>,
    pub continuities: Vec<i64>,
    pub internal: bool,
}

/// Left and right extended partitions, stored both as breakpoint indices
/// (0 is `a`, `q+1` is `b`) and as reals.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedPartition {
    pub s_idx: Vec<usize>,
    pub t_idx: Vec<usize>,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    /// First and last interval index (inclusive).
    pub first: usize,
    pub last: usize,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SectionDecomposition {
    /// `0`, every breakpoint where the degree changes, then the sentinel `q+1`.
    pub boundaries: Vec<usize>,
    pub sections: Vec<Section>,
    /// `(breakpoint index, continuity)`, highest continuity first, ties left to right.
    pub join_order: Vec<(usize, i64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeDescriptor {
    pub base: MDSpace,
    pub order: usize,
    pub space: MDSpace,
    pub zero_intervals: Vec<usize>,
}

impl DerivativeDescriptor {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

impl MDSpace {
    /// Validated public space.
    pub fn new(
        a: f64,
        b: f64,
        breakpoints: Vec<f64>,
        degrees: Vec<i64>,
        continuities: Vec<i64>,
    ) -> Result<Self> {
        let s = MDSpace {
            a,
            b,
            breakpoints,
            degrees,
            continuities,
            internal: false,
        };
        s.check_shape()?;
        for (j, &d) in s.degrees.iter().enumerate() {
            if d < 0 {
                return Err(Error::InvalidSpace(format!("degree d_{j} = {d} is negative")));
            }
        }
        for i in 1..=s.q() {
            let k = s.continuities[i - 1];
            let lim = s.degrees[i - 1].min(s.degrees[i]);
            if k < 0 || k > lim {
                return Err(Error::InvalidSpace(format!(
                    "continuity k_{i} = {k} must lie in [0, {lim}]"
                )));
            }
        }
        Ok(s)
    }

    /// Space with possibly negative degrees/continuities.
    pub fn new_internal(
        a: f64,
        b: f64,
        breakpoints: Vec<f64>,
        degrees: Vec<i64>,
        continuities: Vec<i64>,
    ) -> Result<Self> {
        let s = MDSpace {
            a,
            b,
            breakpoints,
            degrees,
            continuities,
            internal: true,
        };
        s.check_shape()?;
        for i in 1..=s.q() {
            let k = s.continuities[i - 1];
            if k > s.degrees[i - 1] || k > s.degrees[i] {
                return Err(Error::InvalidSpace(format!(
                    "continuity k_{i} = {k} exceeds an adjacent degree"
                )));
            }
        }
        Ok(s)
    }

    /// Single-interval Bernstein space.
    pub fn bernstein(a: f64, b: f64, d: i64) -> Result<Self> {
        MDSpace::new(a, b, vec![], vec![d], vec![])
    }

    fn check_shape(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) || self.a >= self.b {
            return Err(Error::InvalidSpace(format!(
                "interval [{}, {}] is empty or not finite",
                self.a, self.b
            )));
        }
        let q = self.breakpoints.len();
        if self.degrees.len() != q + 1 {
            return Err(Error::InvalidSpace(format!(
                "{} breakpoints need {} degrees, got {}",
                q,
                q + 1,
                self.degrees.len()
            )));
        }
        if self.continuities.len() != q {
            return Err(Error::InvalidSpace(format!(
                "{} breakpoints need {} continuities, got {}",
                q,
                q,
                self.continuities.len()
            )));
        }
        let mut prev = self.a;
        for (i, &x) in self.breakpoints.iter().enumerate() {
            if !x.is_finite() || x <= prev {
                return Err(Error::InvalidSpace(format!(
                    "breakpoint x_{} = {x} is not strictly increasing inside ({}, {})",
                    i + 1,
                    self.a,
                    self.b
                )));
            }
            prev = x;
        }
        if prev >= self.b {
            return Err(Error::InvalidSpace(format!(
                "last breakpoint {prev} is not below b = {}",
                self.b
            )));
        }
        Ok(())
    }

    pub fn from_description(desc: &SpaceDescription) -> Result<Self> {
        MDSpace::new(
            desc.interval[0],
            desc.interval[1],
            desc.breakpoints.clone(),
            desc.degrees.clone(),
            desc.continuities.clone(),
        )
    }

    pub fn description(&self) -> SpaceDescription {
        SpaceDescription {
            interval: [self.a, self.b],
            breakpoints: self.breakpoints.clone(),
            degrees: self.degrees.clone(),
            continuities: self.continuities.clone(),
        }
    }

    pub fn q(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn num_intervals(&self) -> usize {
        self.degrees.len()
    }

    /// Breakpoint by index: `0` is `a`, `1..=q` are the breakpoints, `q+1` is `b`.
    pub fn point(&self, idx: usize) -> f64 {
        if idx == 0 {
            self.a
        } else if idx <= self.q() {
            self.breakpoints[idx - 1]
        } else {
            self.b
        }
    }

    /// Continuity at breakpoint `i` (1-based).
    pub fn k(&self, i: usize) -> i64 {
        self.continuities[i - 1]
    }

    pub fn max_degree(&self) -> i64 {
        *self.degrees.iter().max().expect("at least one interval")
    }

    /// Signed dimension `d_0 + 1 + sum(d_i - k_i)`.
    pub fn raw_dim(&self) -> i64 {
        let mut k = self.degrees[0] + 1;
        for i in 1..=self.q() {
            k += self.degrees[i] - self.k(i);
        }
        k
    }

    pub fn dim(&self) -> usize {
        self.raw_dim().max(0) as usize
    }

    pub fn is_uniform_degree(&self) -> bool {
        self.degrees.iter().all(|&d| d == self.degrees[0])
    }

    /// Every degree change carries continuity at most zero, so the basis is
    /// made of conventional pieces glued with `C^0` (or not at all).
    pub fn is_c0_type(&self) -> bool {
        (1..=self.q()).all(|i| self.degrees[i - 1] == self.degrees[i] || self.k(i) <= 0)
    }

    /// Index `j` with `x` in `[x_j, x_{j+1})`; `q` when `x == b`.
    pub fn find_interval(&self, x: f64) -> Result<usize> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::OutOfRange {
                x,
                a: self.a,
                b: self.b,
            });
        }
        Ok(self.breakpoints.partition_point(|&bp| bp <= x))
    }

    pub fn extended_partitions(&self) -> Result<ExtendedPartition> {
        let q = self.q();
        let mut s_idx = Vec::new();
        for i in 1..=q {
            let c = self.degrees[i] - self.k(i);
            if c < 0 {
                return Err(Error::InvalidSpace(format!("negative multiplicity at x_{i}")));
            }
            s_idx.extend(std::iter::repeat_n(i, c as usize));
        }
        let front = self.degrees[0] + 1;
        if front >= 0 {
            let mut v = vec![0; front as usize];
            v.extend(s_idx);
            s_idx = v;
        } else {
            let drop = (-front) as usize;
            if drop > s_idx.len() {
                return Err(Error::InvalidSpace("degenerate left partition".into()));
            }
            s_idx.drain(..drop);
        }

        let mut t_idx = Vec::new();
        for i in 1..=q {
            let c = self.degrees[i - 1] - self.k(i);
            if c < 0 {
                return Err(Error::InvalidSpace(format!("negative multiplicity at x_{i}")));
            }
            t_idx.extend(std::iter::repeat_n(i, c as usize));
        }
        let back = self.degrees[q] + 1;
        if back >= 0 {
            t_idx.extend(std::iter::repeat_n(q + 1, back as usize));
        } else {
            let drop = (-back) as usize;
            if drop > t_idx.len() {
                return Err(Error::InvalidSpace("degenerate right partition".into()));
            }
            t_idx.truncate(t_idx.len() - drop);
        }
        debug_assert_eq!(s_idx.len(), t_idx.len());
        let s = s_idx.iter().map(|&i| self.point(i)).collect();
        let t = t_idx.iter().map(|&i| self.point(i)).collect();
        Ok(ExtendedPartition { s_idx, t_idx, s, t })
    }

    /// Same breakpoints and degrees, continuity dropped to zero wherever the
    /// degree changes. Negative continuities of internal spaces are kept, so
    /// the zero-function slots they stand for survive.
    pub fn associated_c0(&self) -> MDSpace {
        let mut out = self.clone();
        for i in 1..=self.q() {
            if self.degrees[i - 1] != self.degrees[i] {
                out.continuities[i - 1] = self.k(i).min(0);
            }
        }
        out
    }

    /// `D^r` of the space: degrees and continuities shifted by `-r`.
    pub fn derivative(&self, r: usize) -> MDSpace {
        let r = r as i64;
        MDSpace {
            a: self.a,
            b: self.b,
            breakpoints: self.breakpoints.clone(),
            degrees: self.degrees.iter().map(|d| d - r).collect(),
            continuities: self.continuities.iter().map(|k| k - r).collect(),
            internal: self.internal || r > 0,
        }
    }

    pub fn derivative_space(&self, r: usize) -> Result<DerivativeDescriptor> {
        if r as i64 > self.max_degree() {
            return Err(Error::InvalidSpace(format!(
                "derivative order {r} exceeds the maximum degree {}",
                self.max_degree()
            )));
        }
        let space = self.derivative(r);
        let zero_intervals = space
            .degrees
            .iter()
            .enumerate()
            .filter(|(_, &d)| d < 0)
            .map(|(j, _)| j)
            .collect();
        Ok(DerivativeDescriptor {
            base: self.clone(),
            order: r,
            space,
            zero_intervals,
        })
    }

    pub fn section_decomposition(&self) -> SectionDecomposition {
        let q = self.q();
        let mut boundaries = vec![0];
        for i in 1..=q {
            if self.degrees[i - 1] != self.degrees[i] {
                boundaries.push(i);
            }
        }
        boundaries.push(q + 1);
        let sections = boundaries
            .windows(2)
            .map(|w| Section {
                first: w[0],
                last: w[1] - 1,
                degree: self.degrees[w[0]],
            })
            .collect();
        let mut join_order: Vec<(usize, i64)> = boundaries[1..boundaries.len() - 1]
            .iter()
            .map(|&i| (i, self.k(i)))
            .collect();
        // stable sort keeps left-to-right order among equal continuities
        join_order.sort_by_key(|j| std::cmp::Reverse(j.1));
        SectionDecomposition {
            boundaries,
            sections,
            join_order,
        }
    }

    /// Restriction to intervals `first..=last`.
    pub fn restrict(&self, first: usize, last: usize) -> MDSpace {
        MDSpace {
            a: self.point(first),
            b: self.point(last + 1),
            breakpoints: self.breakpoints[first..last].to_vec(),
            degrees: self.degrees[first..=last].to_vec(),
            continuities: self.continuities[first..last].to_vec(),
            internal: self.internal,
        }
    }

    /// Glue `left` and `right` at their common endpoint with continuity `k`.
    pub fn join(left: &MDSpace, right: &MDSpace, k: i64) -> Result<MDSpace> {
        if left.b != right.a {
            return Err(Error::InvalidSpace(format!(
                "cannot join spaces ending at {} and starting at {}",
                left.b, right.a
            )));
        }
        let mut breakpoints = left.breakpoints.clone();
        breakpoints.push(left.b);
        breakpoints.extend_from_slice(&right.breakpoints);
        let mut degrees = left.degrees.clone();
        degrees.extend_from_slice(&right.degrees);
        let mut continuities = left.continuities.clone();
        continuities.push(k);
        continuities.extend_from_slice(&right.continuities);
        Ok(MDSpace {
            a: left.a,
            b: right.b,
            breakpoints,
            degrees,
            continuities,
            internal: left.internal || right.internal || k < 0,
        })
    }
}

pub fn validate_space(desc: &SpaceDescription) -> Result<MDSpace> {
    MDSpace::from_description(desc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> MDSpace {
        MDSpace::new(0.0, 4.0, vec![1.0, 2.0, 3.0], vec![2, 2, 4, 3], vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn validation_rejects_bad_spaces() {
        assert!(MDSpace::new(0.0, 1.0, vec![], vec![3], vec![]).is_ok());
        assert!(MDSpace::new(0.0, 2.0, vec![1.0], vec![2, 2], vec![3]).is_err());
        assert!(MDSpace::new(0.0, 2.0, vec![1.0], vec![-1, 2], vec![0]).is_err());
        assert!(MDSpace::new(0.0, 2.0, vec![2.0], vec![1, 1], vec![0]).is_err());
        assert!(MDSpace::new(1.0, 1.0, vec![], vec![1], vec![]).is_err());
        assert!(MDSpace::new(0.0, 3.0, vec![2.0, 1.0], vec![1, 1, 1], vec![0, 0]).is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(example1().dim(), 6);
        assert_eq!(example1().associated_c0().dim(), 11);
        assert_eq!(example1().associated_c0().continuities, vec![1, 0, 0]);
        let t1 = MDSpace::new(-1e4, 1e4, vec![-9999.0, 0.0, 9999.0], vec![5, 3, 3, 5], vec![3, 2, 3])
            .unwrap();
        assert_eq!(t1.dim(), 9);
        let part = MDSpace::new(2.0, 4.0, vec![3.0], vec![4, 3], vec![3]).unwrap();
        assert_eq!(part.dim(), 5);
        assert_eq!(part.associated_c0().dim(), 8);
    }

    #[test]
    fn partitions() {
        let sp = MDSpace::new(2.0, 4.0, vec![3.0], vec![4, 3], vec![3]).unwrap();
        let p = sp.extended_partitions().unwrap();
        assert_eq!(p.s, vec![2.0; 5]);
        assert_eq!(p.t, vec![3.0, 4.0, 4.0, 4.0, 4.0]);

        let c0 = MDSpace::new(2.0, 4.0, vec![3.0], vec![2, 1], vec![0]).unwrap();
        let p = c0.extended_partitions().unwrap();
        assert_eq!(p.s, vec![2.0, 2.0, 2.0, 3.0]);
        assert_eq!(p.t, vec![3.0, 3.0, 4.0, 4.0]);

        let bern = MDSpace::bernstein(0.0, 1.0, 3).unwrap();
        let p = bern.extended_partitions().unwrap();
        assert_eq!(p.s, vec![0.0; 4]);
        assert_eq!(p.t, vec![1.0; 4]);
    }

    #[test]
    fn partitions_with_consumed_ends() {
        // degrees (1, 12), C1: D^11 keeps two linear functions on [x_1, b]
        let sp = MDSpace::new(0.0, 2.0, vec![1.0], vec![1, 12], vec![1]).unwrap();
        let d = sp.derivative(11);
        assert_eq!(d.dim(), 2);
        let p = d.extended_partitions().unwrap();
        assert_eq!(p.s, vec![1.0, 1.0]);
        assert_eq!(p.t, vec![2.0, 2.0]);
    }

    #[test]
    fn derivative_descriptor() {
        let sp = MDSpace::new(0.0, 3.0, vec![1.0, 2.0], vec![4, 2, 3], vec![2, 1]).unwrap();
        let d = sp.derivative_space(1).unwrap();
        assert_eq!(d.space.degrees, vec![3, 1, 2]);
        assert_eq!(d.space.continuities, vec![1, 0]);
        assert_eq!(d.dim(), sp.dim() - 1);
        let d3 = sp.derivative_space(3).unwrap();
        assert_eq!(d3.zero_intervals, vec![1]);
        assert!(sp.derivative_space(5).is_err());
        assert_eq!(sp.derivative_space(0).unwrap().space, sp);
    }

    #[test]
    fn c0_of_internal_space_keeps_concatenation() {
        let sp = MDSpace::new_internal(0.0, 4.0, vec![1.0, 2.0, 3.0], vec![0, 0, 2, 1], vec![-1, 0, 1])
            .unwrap();
        let c0 = sp.associated_c0();
        assert_eq!(c0.continuities, vec![-1, 0, 0]);
        assert_eq!(c0.associated_c0(), c0);
    }

    #[test]
    fn sections_and_join_order() {
        let dec = example1().section_decomposition();
        assert_eq!(dec.boundaries, vec![0, 2, 3, 4]);
        assert_eq!(dec.sections.len(), 3);
        assert_eq!(dec.sections[1], Section { first: 2, last: 2, degree: 4 });
        assert_eq!(dec.join_order, vec![(3, 3), (2, 2)]);

        let tie = MDSpace::new(0.0, 3.0, vec![1.0, 2.0], vec![3, 5, 3], vec![2, 2]).unwrap();
        assert_eq!(tie.section_decomposition().join_order, vec![(1, 2), (2, 2)]);

        let uni = MDSpace::new(0.0, 3.0, vec![1.0, 2.0], vec![3, 3, 3], vec![2, 1]).unwrap();
        let dec = uni.section_decomposition();
        assert_eq!(dec.sections.len(), 1);
        assert!(dec.join_order.is_empty());
    }

    #[test]
    fn interval_lookup() {
        let sp = example1();
        assert_eq!(sp.find_interval(0.0).unwrap(), 0);
        assert_eq!(sp.find_interval(4.0).unwrap(), 3);
        assert_eq!(sp.find_interval(2.0).unwrap(), 2);
        assert_eq!(sp.find_interval(1.5).unwrap(), 1);
        assert!(sp.find_interval(4.5).is_err());
        assert!(sp.find_interval(f64::NAN).is_err());
    }

    #[test]
    fn restrict_and_join_round_trip() {
        let sp = example1();
        let l = sp.restrict(0, 1);
        let r = sp.restrict(2, 3);
        assert_eq!(l.b, 2.0);
        assert_eq!(r.continuities, vec![3]);
        assert_eq!(MDSpace::join(&l, &r, 2).unwrap(), sp);
    }
}
