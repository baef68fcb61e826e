//! Representation relative to the conventional degree-`m` B-spline basis by
//! reverse degree elevation.
//!
//! Every step lowers the degree of one interval by one. The steps of all
//! derivative orders form a rhomboid scheme: row `k` holds the spaces
//! `D^{r-k} S_n`, and the coefficients of row `k` come from ratios of the
//! row `k-1` integrals.

use crate::c0::C0Basis;
use crate::error::{Error, Result};
use crate::join::{refresh_integrals, apply_bidiagonal_in_place, Coef, Level, RkiCoefficients, SectionBundle};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::spaces::MDSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum RdeMode {
    /// Extended scheme with `r >= m - 1`: every coefficient is a ratio.
    #[default]
    SubtractionFree,
    /// `r = max(1, max k_i)`, first row through prefix-sum differences.
    Fidelity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RdeSchedule {
    pub m: i64,
    pub g: usize,
    /// `(interval, degree after the step)`.
    pub steps: Vec<(usize, i64)>,
}

pub fn rde_schedule(space: &MDSpace) -> RdeSchedule {
    let m = space.max_degree();
    let mut steps = Vec::new();
    for (j, &d) in space.degrees.iter().enumerate() {
        let mut h = m - 1;
        while h >= d {
            steps.push((j, h));
            h -= 1;
        }
    }
    RdeSchedule {
        m,
        g: steps.len(),
        steps,
    }
}

/// One step of a row: a bidiagonal product or the removal of a zero function.
#[derive(Clone, Debug, PartialEq)]
pub enum Step<T> {
    Window(RkiCoefficients<T>),
    /// 1-based index of the removed function.
    Drop(usize),
}

#[derive(Clone, Debug)]
pub struct RdeOutput<T> {
    pub bundle: SectionBundle<T>,
    pub r: usize,
    pub schedule: RdeSchedule,
    /// Per row `k` (index `k`), the steps `n = 1..=g`.
    pub steps: Vec<Vec<Step<T>>>,
    /// Sum of the positive window sizes over all rows and steps.
    pub nontrivial_alphas: usize,
}

pub fn rde_order(space: &MDSpace, mode: RdeMode, min_order: usize) -> usize {
    let m = space.max_degree().max(0) as usize;
    let kmax = space.continuities.iter().copied().max().unwrap_or(0).max(0) as usize;
    match mode {
        RdeMode::SubtractionFree => 1.max(m.saturating_sub(1)).max(min_order),
        RdeMode::Fidelity => 1.max(kmax).max(min_order),
    }
}

pub fn rde_build<T: Scalar>(space: &MDSpace, mode: RdeMode) -> Result<SectionBundle<T>> {
    Ok(rde_build_full(space, mode, 0)?.bundle)
}

/// Full run; `min_order` raises the number of derivative orders produced.
pub fn rde_build_full<T: Scalar>(space: &MDSpace, mode: RdeMode, min_order: usize) -> Result<RdeOutput<T>> {
    if space.internal {
        return Err(Error::InvalidSpace("degree elevation needs a public space".into()));
    }
    let sched = rde_schedule(space);
    let m = sched.m;
    let r = rde_order(space, mode, min_order);
    let g = sched.g;
    let s0 = MDSpace {
        degrees: vec![m; space.num_intervals()],
        ..space.clone()
    };

    // degrees of S_n
    let mut degs = vec![s0.degrees.clone()];
    for &(j, h) in &sched.steps {
        let mut d = degs.last().unwrap().clone();
        d[j] = h;
        degs.push(d);
    }
    let space_n = |n: usize| MDSpace {
        degrees: degs[n].clone(),
        ..space.clone()
    };

    // row 0: integrals of the C^0 spaces D^r S_n
    let mut prev_ins: Vec<Vec<T>> = (0..=g)
        .map(|n| Ok(C0Basis::new(&space_n(n).derivative(r))?.integrals()))
        .collect::<Result<_>>()?;
    let first_row = match mode {
        RdeMode::SubtractionFree => 0,
        RdeMode::Fidelity => 1,
    };

    let mut all_steps: Vec<Vec<Step<T>>> = Vec::new();
    let mut levels: Vec<Option<Level<T>>> = (0..=r).map(|_| None).collect();
    let mut nontrivial = 0usize;
    let mut prev_steps: Vec<Step<T>> = Vec::new();

    for k in first_row..=r {
        let rho = r - k;
        let reference = s0.derivative(rho);
        let in_k0: Vec<T> = C0Basis::new(&reference)?.integrals();
        let mut mat = Matrix::identity(in_k0.len());
        let mut ins = vec![in_k0.clone()];
        let mut steps = Vec::with_capacity(g);
        for n in 1..=g {
            let j = sched.steps[n - 1].0;
            let sp = space_n(n).derivative(rho);
            let mut ie = sp.degrees[0] + 1;
            for h in 1..=j {
                ie += sp.degrees[h] - sp.k(h);
            }
            let dj = sp.degrees[j];
            let step = if dj < 0 {
                let drop = (ie + 1).max(1) as usize;
                if drop > mat.rows() {
                    return Err(Error::Dimension(format!("drop index {drop} beyond {} rows", mat.rows())));
                }
                mat = mat.drop_row(drop - 1);
                Step::Drop(drop)
            } else {
                if ie < 1 || ie as usize >= mat.rows() {
                    return Err(Error::Dimension(format!(
                        "window end {ie} outside 1..{}",
                        mat.rows() - 1
                    )));
                }
                let ie = ie as usize;
                let ib = ie + 1 - dj as usize;
                let c = if k == 0 {
                    // only reached with empty windows: plain merges
                    if dj > 0 {
                        return Err(Error::Dimension("first row step with a nontrivial window".into()));
                    }
                    RkiCoefficients::empty(ib)
                } else if k == 1 && mode == RdeMode::Fidelity {
                    difference_coefficients(&prev_ins[n - 1], &prev_ins[n], ib, ie)?
                } else {
                    ratio_coefficients(&prev_steps[n - 1], &prev_ins[n - 1], &prev_ins[n], ib, ie)?
                };
                nontrivial += c.alpha.len();
                apply_bidiagonal_in_place(&mut mat, &c);
                Step::Window(c)
            };
            if k < r {
                let next = match &step {
                    Step::Drop(_) => mat.mul_vec(&in_k0)?,
                    Step::Window(c) => {
                        let lo = c.ib.saturating_sub(1).max(1);
                        refresh_integrals(&mat, &in_k0, ins.last().unwrap(), lo, c.ie().max(lo))
                    }
                };
                ins.push(next);
            }
            steps.push(step);
        }
        if k > 0 {
            prev_ins = ins;
        }
        prev_steps = steps.clone();
        all_steps.push(steps);
        levels[rho] = Some(Level {
            matrix: mat,
            reference,
            ref_integrals: in_k0,
        });
    }
    let levels: Vec<Level<T>> = levels.into_iter().map_while(|l| l).collect();
    Ok(RdeOutput {
        bundle: SectionBundle {
            space: space.clone(),
            levels,
        },
        r,
        schedule: sched,
        steps: all_steps,
        nontrivial_alphas: nontrivial,
    })
}

fn denominator<T: Scalar>(v: &T, index: usize) -> Result<()> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(Error::Denominator {
            context: "reverse degree elevation",
            index,
            value: v.to_f64(),
        })
    }
}

fn ratio_coefficients<T: Scalar>(
    above: &Step<T>,
    in_hat: &[T],
    in_cur: &[T],
    ib: usize,
    ie: usize,
) -> Result<RkiCoefficients<T>> {
    if ib > ie {
        return Ok(RkiCoefficients::empty(ib));
    }
    let above = match above {
        Step::Window(c) => c,
        Step::Drop(_) => {
            return Err(Error::Dimension(
                "nontrivial window below a removed function".into(),
            ))
        }
    };
    let mut alpha = Vec::with_capacity(ie + 1 - ib);
    let mut beta = Vec::with_capacity(ie + 1 - ib);
    for i in ib..=ie {
        let den = &in_cur[i - 2];
        denominator(den, i - 1)?;
        alpha.push(match above.a(i - 1) {
            Coef::Zero => T::zero(),
            Coef::One => in_hat[i - 2].clone() / den.clone(),
            Coef::Val(v) => v.clone() * in_hat[i - 2].clone() / den.clone(),
        });
        beta.push(match above.b(i) {
            Coef::Zero => T::zero(),
            Coef::One => in_hat[i - 1].clone() / den.clone(),
            Coef::Val(v) => v.clone() * in_hat[i - 1].clone() / den.clone(),
        });
    }
    Ok(RkiCoefficients { ib, alpha, beta })
}

/// Greville-difference form used by the first row of the fidelity variant.
fn difference_coefficients<T: Scalar>(
    in_hat: &[T],
    in_cur: &[T],
    ib: usize,
    ie: usize,
) -> Result<RkiCoefficients<T>> {
    let sum = |v: &[T], lo: usize, hi: usize| {
        (lo..=hi).fold(T::zero(), |acc, h| acc + v[h - 1].clone())
    };
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for i in ib..=ie {
        let den = &in_cur[i - 2];
        denominator(den, i - 1)?;
        let hat = sum(in_hat, ib - 1, i - 1);
        let cur_short = if i > ib { sum(in_cur, ib - 1, i - 2) } else { T::zero() };
        let cur = sum(in_cur, ib - 1, i - 1);
        alpha.push((hat.clone() - cur_short) / den.clone());
        beta.push((cur - hat) / den.clone());
    }
    Ok(RkiCoefficients { ib, alpha, beta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{parse_fraction, Rational};

    fn example2() -> MDSpace {
        MDSpace::new(0.0, 3.0, vec![1.0, 2.0], vec![4, 2, 3], vec![2, 1]).unwrap()
    }

    #[test]
    fn schedules() {
        let s = rde_schedule(&example2());
        assert_eq!(s.g, 3);
        assert_eq!(s.steps, vec![(1, 3), (1, 2), (2, 3)]);
        let uni = MDSpace::new(0.0, 2.0, vec![1.0], vec![3, 3], vec![1]).unwrap();
        assert_eq!(rde_schedule(&uni).g, 0);
        let one = MDSpace::new(0.0, 2.0, vec![1.0], vec![9, 10], vec![3]).unwrap();
        assert_eq!(rde_schedule(&one).steps, vec![(0, 9)]);
    }

    #[test]
    fn linear_inside_quadratic() {
        // (1 - x) on [0,1] is B_0 + B_1 / 2 in the quadratic Bernstein basis
        let two = MDSpace::new(0.0, 2.0, vec![1.0], vec![1, 2], vec![0]).unwrap();
        let b: SectionBundle<Rational> = rde_build(&two, RdeMode::SubtractionFree).unwrap();
        let m = &b.levels[0].matrix;
        assert_eq!((m.rows(), m.cols()), (4, 5));
        let want: Vec<Rational> = ["1", "1/2", "0", "0", "0"].iter().map(|s| parse_fraction(s).unwrap()).collect();
        assert_eq!(m.row(0), &want[..]);
    }

    #[test]
    fn example2_windows_in_fidelity_mode() {
        let out = rde_build_full::<Rational>(&example2(), RdeMode::Fidelity, 0).unwrap();
        assert_eq!(out.r, 2);
        let win = |row: usize, n: usize| match &out.steps[row - 1][n - 1] {
            Step::Window(c) => (c.ib, c.ie()),
            Step::Drop(i) => (*i, 0),
        };
        assert_eq!(win(2, 1), (4, 6));
        assert_eq!(win(2, 2), (4, 5));
        assert_eq!(win(2, 3), (5, 7));
        assert_eq!(win(1, 1), (4, 5));
        assert_eq!(win(1, 2), (4, 4));
        assert_eq!(win(1, 3), (5, 6));
    }

    #[test]
    fn modes_agree() {
        let a = rde_build::<Rational>(&example2(), RdeMode::SubtractionFree).unwrap();
        let b = rde_build::<Rational>(&example2(), RdeMode::Fidelity).unwrap();
        assert_eq!(a.levels[0].matrix, b.levels[0].matrix);
        assert_eq!(a.levels[1].matrix, b.levels[1].matrix);
        let one = Rational::from_integer(1.into());
        assert!(a.levels[0].matrix.column_sums().iter().all(|s| *s == one));
    }

    #[test]
    fn uniform_degree_is_identity() {
        let uni = MDSpace::new(0.0, 2.0, vec![1.0], vec![3, 3], vec![1]).unwrap();
        let b: SectionBundle<f64> = rde_build(&uni, RdeMode::SubtractionFree).unwrap();
        assert_eq!(b.levels[0].matrix, Matrix::identity(uni.dim()));
    }
}
