//! Bases of `C^0` MD-spline spaces.
//!
//! Such a basis is a chain of conventional B-spline bases glued with `C^0`
//! (or simply concatenated), so on every interval the nonzero functions are
//! conventional B-splines over a local knot vector clamped at run ends. The
//! values come from the usual Cox-de Boor triangle on that local vector.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{ExtendedPartition, MDSpace};

/// Nonzero window of basis values at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisValues<T> {
    /// 1-based index of the first function in `values`.
    pub first_index: usize,
    pub values: Vec<T>,
}

impl<T: Scalar> BasisValues<T> {
    /// Full-length vector with zeros outside the window.
    pub fn scatter(&self, dim: usize) -> Vec<T> {
        let mut out = vec![T::zero(); dim];
        for (o, v) in self.values.iter().enumerate() {
            out[self.first_index - 1 + o] = v.clone();
        }
        out
    }

    pub fn sum(&self) -> T {
        self.values.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn get(&self, index: usize) -> T {
        if index >= self.first_index && index < self.first_index + self.values.len() {
            self.values[index - self.first_index].clone()
        } else {
            T::zero()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
struct Piece {
    degree: i64,
    /// 1-based index of the first nonzero function on the interval.
    first: usize,
    /// `d` knots to the left then `d` knots to the right of the interval.
    knots: Vec<f64>,
}

/// Precomputed local data of a `C^0` MD-spline basis.
#[derive(Clone, Debug)]
pub struct C0Basis {
    space: MDSpace,
    partition: ExtendedPartition,
    pieces: Vec<Piece>,
}

impl C0Basis {
    pub fn new(space: &MDSpace) -> Result<Self> {
        if space.associated_c0() != *space {
            return Err(Error::InvalidSpace(
                "space is not of C0 type (continuity above zero at a degree change)".into(),
            ));
        }
        let partition = space.extended_partitions()?;
        let mut pieces = Vec::with_capacity(space.num_intervals());
        for j in 0..space.num_intervals() {
            let d = space.degrees[j];
            let first = 1 + partition.t_idx.iter().filter(|&&t| t <= j).count();
            if d < 0 {
                pieces.push(Piece {
                    degree: d,
                    first,
                    knots: vec![],
                });
                continue;
            }
            let live = partition
                .s_idx
                .iter()
                .zip(&partition.t_idx)
                .enumerate()
                .filter(|(_, (&s, &t))| s <= j && t > j)
                .map(|(i, _)| i + 1)
                .collect::<Vec<_>>();
            let expected: Vec<usize> = (first..first + d as usize + 1).collect();
            if live != expected {
                return Err(Error::InvalidSpace(format!(
                    "interval {j}: slots {live:?} are live, expected {expected:?}"
                )));
            }
            pieces.push(Piece {
                degree: d,
                first,
                knots: local_knots(space, j),
            });
        }
        Ok(C0Basis {
            space: space.clone(),
            partition,
            pieces,
        })
    }

    pub fn space(&self) -> &MDSpace {
        &self.space
    }

    pub fn partition(&self) -> &ExtendedPartition {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.partition.s.len()
    }

    /// Degree and first nonzero index on interval `j`.
    pub fn piece_info(&self, j: usize) -> (i64, usize) {
        (self.pieces[j].degree, self.pieces[j].first)
    }

    pub fn eval<T: Scalar>(&self, x: f64) -> Result<BasisValues<T>> {
        let j = self.space.find_interval(x)?;
        Ok(self.eval_on(j, &T::from_f64(x)))
    }

    /// Values on interval `j` at `x` (which should lie in its closure).
    pub fn eval_on<T: Scalar>(&self, j: usize, x: &T) -> BasisValues<T> {
        let p = &self.pieces[j];
        if p.degree < 0 {
            return BasisValues {
                first_index: p.first,
                values: vec![],
            };
        }
        let knots: Vec<T> = p.knots.iter().map(|&k| T::from_f64(k)).collect();
        BasisValues {
            first_index: p.first,
            values: basis_funs(x, &knots, p.degree as usize),
        }
    }

    /// One-sided derivative of order `order`. `Side::Left` at a breakpoint
    /// uses the interval to its left; at `a` it falls back to the right.
    pub fn derivatives<T: Scalar>(&self, x: f64, side: Side, order: usize) -> Result<BasisValues<T>> {
        let mut j = self.space.find_interval(x)?;
        // at b the last interval already gives the left limit
        if side == Side::Left && j > 0 && self.space.point(j) == x {
            j -= 1;
        }
        let p = &self.pieces[j];
        if p.degree < 0 {
            return Ok(BasisValues {
                first_index: p.first,
                values: vec![],
            });
        }
        let d = p.degree as usize;
        let xt = T::from_f64(x);
        if order > d {
            return Ok(BasisValues {
                first_index: p.first,
                values: vec![T::zero(); d + 1],
            });
        }
        let knots: Vec<T> = p.knots.iter().map(|&k| T::from_f64(k)).collect();
        let ders = ders_basis_funs(&xt, &knots, d, order);
        Ok(BasisValues {
            first_index: p.first,
            values: ders.into_iter().nth(order).unwrap(),
        })
    }

    /// Integral of every basis function; zero-function slots give 0.
    pub fn integrals<T: Scalar>(&self) -> Vec<T> {
        let sp = &self.space;
        // per-interval contribution width/(d+1)
        let contrib: Vec<Option<T>> = (0..sp.num_intervals())
            .map(|j| {
                let d = sp.degrees[j];
                (d >= 0).then(|| {
                    (T::from_f64(sp.point(j + 1)) - T::from_f64(sp.point(j))) / T::from_i64(d + 1)
                })
            })
            .collect();
        self.partition
            .s_idx
            .iter()
            .zip(&self.partition.t_idx)
            .map(|(&s, &t)| {
                let mut acc = T::zero();
                for c in contrib.iter().take(t.max(s)).skip(s).flatten() {
                    acc = acc + c.clone();
                }
                acc
            })
            .collect()
    }
}

/// Knots around interval `j`: walk outwards collecting each breakpoint
/// `d - k` times, clamping at `a`, `b` and wherever the walk runs out.
fn local_knots(space: &MDSpace, j: usize) -> Vec<f64> {
    let d = space.degrees[j] as usize;
    let mut left = Vec::with_capacity(d);
    let mut p = j;
    while left.len() < d {
        let mult = if p == 0 {
            d
        } else {
            (space.degrees[j] - space.k(p)).max(0) as usize
        };
        let take = mult.min(d - left.len());
        left.extend(std::iter::repeat_n(space.point(p), take));
        if p == 0 {
            break;
        }
        p -= 1;
    }
    left.reverse();
    let mut right = Vec::with_capacity(d);
    let mut p = j + 1;
    let last = space.q() + 1;
    while right.len() < d {
        let mult = if p == last {
            d
        } else {
            (space.degrees[j] - space.k(p)).max(0) as usize
        };
        let take = mult.min(d - right.len());
        right.extend(std::iter::repeat_n(space.point(p), take));
        if p == last {
            break;
        }
        p += 1;
    }
    left.extend(right);
    left
}

/// Cox-de Boor triangle. `knots` holds `d` knots left of the interval and
/// `d` knots right of it.
pub(crate) fn basis_funs<T: Scalar>(x: &T, knots: &[T], d: usize) -> Vec<T> {
    let mut n = vec![T::one()];
    let mut left = vec![T::zero(); d + 1];
    let mut right = vec![T::zero(); d + 1];
    for j in 1..=d {
        left[j] = x.clone() - knots[d - j].clone();
        right[j] = knots[d - 1 + j].clone() - x.clone();
        let mut saved = T::zero();
        for r in 0..j {
            let temp = n[r].clone() / (right[r + 1].clone() + left[j - r].clone());
            n[r] = saved + right[r + 1].clone() * temp.clone();
            saved = left[j - r].clone() * temp;
        }
        n.push(saved);
    }
    n
}

/// Values and derivatives up to `order` (NURBS-book style).
pub(crate) fn ders_basis_funs<T: Scalar>(x: &T, knots: &[T], d: usize, order: usize) -> Vec<Vec<T>> {
    let mut ndu = vec![vec![T::zero(); d + 1]; d + 1];
    ndu[0][0] = T::one();
    let mut left = vec![T::zero(); d + 1];
    let mut right = vec![T::zero(); d + 1];
    for j in 1..=d {
        left[j] = x.clone() - knots[d - j].clone();
        right[j] = knots[d - 1 + j].clone() - x.clone();
        let mut saved = T::zero();
        for r in 0..j {
            ndu[j][r] = right[r + 1].clone() + left[j - r].clone();
            let temp = ndu[r][j - 1].clone() / ndu[j][r].clone();
            ndu[r][j] = saved + right[r + 1].clone() * temp.clone();
            saved = left[j - r].clone() * temp;
        }
        ndu[j][j] = saved;
    }
    let mut ders = vec![vec![T::zero(); d + 1]; order + 1];
    for j in 0..=d {
        ders[0][j] = ndu[j][d].clone();
    }
    let di = d as i64;
    for r in 0..=di {
        let mut a = [vec![T::zero(); d + 1], vec![T::zero(); d + 1]];
        let (mut s1, mut s2) = (0usize, 1usize);
        a[0][0] = T::one();
        for k in 1..=order as i64 {
            let mut dv = T::zero();
            let rk = r - k;
            let pk = di - k;
            if r >= k {
                a[s2][0] = a[s1][0].clone() / ndu[(pk + 1) as usize][rk as usize].clone();
                dv = a[s2][0].clone() * ndu[rk as usize][pk as usize].clone();
            }
            let j1 = if rk >= -1 { 1 } else { -rk };
            let j2 = if r - 1 <= pk { k - 1 } else { di - r };
            for j in j1..=j2 {
                let (ju, rkj) = (j as usize, (rk + j) as usize);
                a[s2][ju] = (a[s1][ju].clone() - a[s1][ju - 1].clone())
                    / ndu[(pk + 1) as usize][rkj].clone();
                dv = dv + a[s2][ju].clone() * ndu[rkj][pk as usize].clone();
            }
            if r <= pk {
                a[s2][k as usize] =
                    -a[s1][(k - 1) as usize].clone() / ndu[(pk + 1) as usize][r as usize].clone();
                dv = dv + a[s2][k as usize].clone() * ndu[r as usize][pk as usize].clone();
            }
            ders[k as usize][r as usize] = dv;
            std::mem::swap(&mut s1, &mut s2);
        }
    }
    let mut fac = T::from_i64(di);
    for (k, row) in ders.iter_mut().enumerate().take(order + 1).skip(1) {
        for v in row.iter_mut() {
            *v = v.clone() * fac.clone();
        }
        fac = fac * T::from_i64(di - k as i64);
    }
    ders
}

pub fn eval_c0_basis<T: Scalar>(space: &MDSpace, x: f64) -> Result<BasisValues<T>> {
    C0Basis::new(space)?.eval(x)
}

pub fn eval_c0_derivatives<T: Scalar>(
    space: &MDSpace,
    x: f64,
    side: Side,
    order: usize,
) -> Result<BasisValues<T>> {
    C0Basis::new(space)?.derivatives(x, side, order)
}

pub fn c0_integrals<T: Scalar>(space: &MDSpace) -> Result<Vec<T>> {
    Ok(C0Basis::new(space)?.integrals())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_fraction, Rational};
    use approx::assert_abs_diff_eq;

    fn fr(s: &str) -> Rational {
        parse_fraction(s).unwrap()
    }

    #[test]
    fn linear_bernstein() {
        let sp = MDSpace::bernstein(0.0, 1.0, 1).unwrap();
        let v = eval_c0_basis::<f64>(&sp, 0.5).unwrap();
        assert_eq!(v.first_index, 1);
        assert_eq!(v.values, vec![0.5, 0.5]);
    }

    #[test]
    fn glued_function_at_degree_change() {
        let sp = MDSpace::new(2.0, 4.0, vec![3.0], vec![2, 1], vec![0]).unwrap();
        let v = eval_c0_basis::<f64>(&sp, 3.0).unwrap();
        assert_eq!(v.scatter(4), vec![0.0, 0.0, 1.0, 0.0]);
        let v = eval_c0_basis::<f64>(&sp, 2.5).unwrap();
        assert_abs_diff_eq!(v.get(2), 2.0 * 0.5 * 0.5, epsilon = 1e-15);
    }

    #[test]
    fn cox_value() {
        let bp: Vec<f64> = (1..22).map(f64::from).collect();
        let sp = MDSpace::new(0.0, 22.0, bp, vec![21; 22], vec![20; 21]).unwrap();
        let v = eval_c0_basis::<f64>(&sp, 11.0).unwrap();
        assert_abs_diff_eq!(v.get(22), 2.926226872314347e-01, epsilon = 1e-15);
    }

    #[test]
    fn integrals_match_closed_forms() {
        let sp = MDSpace::new(2.0, 4.0, vec![3.0], vec![2, 1], vec![0]).unwrap();
        let ints: Vec<Rational> = c0_integrals(&sp).unwrap();
        let want: Vec<Rational> = ["1/3", "1/3", "5/6", "1/2"].iter().map(|s| fr(s)).collect();
        assert_eq!(ints, want);

        let sp = MDSpace::new(0.0, 2.0, vec![1.0], vec![1, 1], vec![0]).unwrap();
        let ints: Vec<Rational> = c0_integrals(&sp).unwrap();
        assert_eq!(ints, vec![fr("1/2"), fr("1"), fr("1/2")]);

        let bern = MDSpace::bernstein(0.0, 1.0, 4).unwrap();
        assert_eq!(c0_integrals::<f64>(&bern).unwrap(), vec![0.2; 5]);
    }

    #[test]
    fn derivative_values() {
        let hat = MDSpace::new(0.0, 2.0, vec![1.0], vec![1, 1], vec![0]).unwrap();
        let d = eval_c0_derivatives::<f64>(&hat, 0.5, Side::Right, 1).unwrap();
        assert_eq!(d.get(2), 1.0);
        let cubic = MDSpace::bernstein(0.0, 1.0, 3).unwrap();
        let d = eval_c0_derivatives::<f64>(&cubic, 0.0, Side::Right, 1).unwrap();
        assert_eq!(d.get(1), -3.0);
        let d = eval_c0_derivatives::<f64>(&hat, 1.0, Side::Left, 1).unwrap();
        assert_eq!(d.get(2), 1.0);
        let d = eval_c0_derivatives::<f64>(&hat, 1.0, Side::Right, 1).unwrap();
        assert_eq!(d.get(2), -1.0);
        let d = eval_c0_derivatives::<f64>(&hat, 1.0, Side::Right, 2).unwrap();
        assert!(d.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rational_partition_of_unity() {
        let sp = MDSpace::new(0.0, 4.0, vec![1.0, 2.0, 3.0], vec![2, 2, 4, 3], vec![1, 0, 0]).unwrap();
        let b = C0Basis::new(&sp).unwrap();
        for x in [0.0, 0.3, 1.0, 1.7, 2.0, 2.25, 3.0, 3.9, 4.0] {
            let v: BasisValues<Rational> = b.eval(x).unwrap();
            assert_eq!(v.sum(), fr("1"));
        }
    }

    #[test]
    fn rejects_non_c0_space() {
        let sp = MDSpace::new(0.0, 2.0, vec![1.0], vec![2, 3], vec![1]).unwrap();
        assert!(C0Basis::new(&sp).is_err());
    }

    #[test]
    fn derivative_space_with_zero_slots() {
        // quintic with a C0 knot, third derivative: continuity -3 keeps zero slots
        let sp = MDSpace::new(0.0, 2.0, vec![1.0], vec![5, 5], vec![0]).unwrap();
        let d3 = sp.derivative(3);
        let b = C0Basis::new(&d3).unwrap();
        assert_eq!(b.dim(), sp.dim() - 3);
        let ints: Vec<f64> = b.integrals();
        let total: f64 = ints.iter().sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-14);
        let v: BasisValues<f64> = b.eval(1.5).unwrap();
        assert_eq!(v.values.len(), 3);
        assert_abs_diff_eq!(v.sum(), 1.0, epsilon = 1e-15);
    }
}
