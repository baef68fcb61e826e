//! Stable `C^r` join of two MD-spline spaces.
//!
//! The join walks a triangular scheme: row `n` holds the spaces of
//! derivative order `r - n`, column `k` the continuity reached so far at the
//! join point. Each cell is a reverse knot insertion whose coefficients are
//! ratios of integrals taken from the row above, so no differences are
//! formed anywhere.

use crate::c0::C0Basis;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::spaces::MDSpace;

/// Tolerance on the shared entry of a `C^0` matrix join.
pub const OVERLAP_TOL: f64 = 1e-14;

/// Representation of one derivative order: `N = matrix * N0`, where `N0` is
/// the basis of `reference`.
#[derive(Clone, Debug)]
pub struct Level<T> {
    pub matrix: Matrix<T>,
    pub reference: MDSpace,
    pub ref_integrals: Vec<T>,
}

impl<T: Scalar> Level<T> {
    pub fn identity(reference: MDSpace) -> Result<Self> {
        let basis = C0Basis::new(&reference)?;
        Ok(Level {
            matrix: Matrix::identity(basis.dim()),
            ref_integrals: basis.integrals(),
            reference,
        })
    }

    /// Integrals of the represented basis.
    pub fn integrals(&self) -> Vec<T> {
        self.matrix
            .mul_vec(&self.ref_integrals)
            .expect("level shapes are consistent")
    }
}

/// A space together with its representation at derivative orders `0..levels.len()`.
#[derive(Clone, Debug)]
pub struct SectionBundle<T> {
    pub space: MDSpace,
    pub levels: Vec<Level<T>>,
}

impl<T: Scalar> SectionBundle<T> {
    /// Conventional space: identity matrices up to `max_order`.
    pub fn identity(space: &MDSpace, max_order: usize) -> Result<Self> {
        if !space.is_uniform_degree() {
            return Err(Error::InvalidSpace(
                "identity bundles need a single degree".into(),
            ));
        }
        let max_order = max_order.min(space.max_degree().max(0) as usize);
        let levels = (0..=max_order)
            .map(|rho| Level::identity(space.derivative(rho).associated_c0()))
            .collect::<Result<_>>()?;
        Ok(SectionBundle {
            space: space.clone(),
            levels,
        })
    }

    pub fn max_order(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, order: usize) -> Result<&Level<T>> {
        self.levels.get(order).ok_or(Error::MissingOrder {
            order,
            available: self.levels.len().saturating_sub(1),
        })
    }
}

/// Coefficients of one reverse knot insertion. Outside the window the
/// coefficients are trivial: `alpha = 1, beta = 0` below, `alpha = 0, beta = 1` above.
#[derive(Clone, Debug, PartialEq)]
pub struct RkiCoefficients<T> {
    /// 1-based index of the first window entry.
    pub ib: usize,
    pub alpha: Vec<T>,
    /// `1 - alpha`, stored directly.
    pub beta: Vec<T>,
}

#[derive(Debug)]
pub(crate) enum Coef<'a, T> {
    Zero,
    One,
    Val(&'a T),
}

impl<T> Clone for Coef<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Coef<'_, T> {}

impl<T: Scalar> RkiCoefficients<T> {
    pub fn empty(ib: usize) -> Self {
        RkiCoefficients {
            ib,
            alpha: vec![],
            beta: vec![],
        }
    }

    /// Last window index (`ib - 1` for an empty window).
    pub fn ie(&self) -> usize {
        self.ib + self.alpha.len() - 1
    }

    pub(crate) fn a(&self, i: usize) -> Coef<'_, T> {
        if i < self.ib {
            Coef::One
        } else if i > self.ie() {
            Coef::Zero
        } else {
            Coef::Val(&self.alpha[i - self.ib])
        }
    }

    pub(crate) fn b(&self, i: usize) -> Coef<'_, T> {
        if i < self.ib {
            Coef::Zero
        } else if i > self.ie() {
            Coef::One
        } else {
            Coef::Val(&self.beta[i - self.ib])
        }
    }

    pub fn alpha_at(&self, i: usize) -> T {
        coef_value(self.a(i))
    }

    pub fn beta_at(&self, i: usize) -> T {
        coef_value(self.b(i))
    }
}

fn coef_value<T: Scalar>(c: Coef<'_, T>) -> T {
    match c {
        Coef::Zero => T::zero(),
        Coef::One => T::one(),
        Coef::Val(v) => v.clone(),
    }
}

fn scaled<T: Scalar>(c: Coef<'_, T>, x: &T) -> Option<T> {
    match c {
        Coef::Zero => None,
        Coef::One => Some(x.clone()),
        Coef::Val(v) => Some(v.clone() * x.clone()),
    }
}

/// `a * x + b * y`, skipping trivial factors.
pub(crate) fn combine<T: Scalar>(a: Coef<'_, T>, x: &T, b: Coef<'_, T>, y: &T) -> T {
    match (scaled(a, x), scaled(b, y)) {
        (Some(u), Some(v)) => u + v,
        (Some(u), None) => u,
        (None, Some(v)) => v,
        (None, None) => T::zero(),
    }
}

/// Output row `j` (1-based) of the bidiagonal product: `alpha_j in_j + beta_{j+1} in_{j+1}`.
pub fn apply_bidiagonal<T: Scalar>(m: &Matrix<T>, c: &RkiCoefficients<T>) -> Matrix<T> {
    let mut out = m.clone();
    apply_bidiagonal_in_place(&mut out, c);
    out
}

/// In-place form: only rows `ib-1..=ie` are combined, then one row is removed.
pub fn apply_bidiagonal_in_place<T: Scalar>(m: &mut Matrix<T>, c: &RkiCoefficients<T>) {
    let hi = c.ie();
    let lo = c.ib.saturating_sub(1).max(1);
    for j in lo..=hi {
        let (a, b) = (c.a(j), c.b(j + 1));
        let (row, next) = m.row_pair_mut(j - 1);
        for (x, y) in row.iter_mut().zip(next) {
            if x.is_zero() && y.is_zero() {
                continue;
            }
            *x = combine(a, x, b, y);
        }
    }
    m.remove_row(hi);
}

/// Same product applied to a vector.
pub fn apply_bidiagonal_vec<T: Scalar>(v: &[T], c: &RkiCoefficients<T>) -> Vec<T> {
    (1..v.len())
        .map(|j| combine(c.a(j), &v[j - 1], c.b(j + 1), &v[j]))
        .collect()
}

/// `IN = M * IN0` after a bidiagonal step: rows outside `lo..=hi` (1-based)
/// are shifted copies of `prev`, the rest are fresh dot products.
pub(crate) fn refresh_integrals<T: Scalar>(
    m: &Matrix<T>,
    in0: &[T],
    prev: &[T],
    lo: usize,
    hi: usize,
) -> Vec<T> {
    (1..=m.rows())
        .map(|j| {
            if j < lo {
                prev[j - 1].clone()
            } else if j > hi {
                prev[j].clone()
            } else {
                m.row_dot(j - 1, in0)
            }
        })
        .collect()
}

pub fn c0_join_integrals<T: Scalar>(left: &[T], right: &[T]) -> Vec<T> {
    let mut out = left.to_vec();
    let last = out.pop().expect("nonempty");
    out.push(last + right[0].clone());
    out.extend_from_slice(&right[1..]);
    out
}

pub fn c0_join_matrices<T: Scalar>(left: &Matrix<T>, right: &Matrix<T>) -> Result<Matrix<T>> {
    left.c0_join(right, OVERLAP_TOL)
}

/// One cell of the triangular scheme, kept for cross-checks.
#[derive(Clone, Debug)]
pub struct CellTrace<T> {
    pub n: usize,
    pub k: usize,
    pub coeffs: RkiCoefficients<T>,
    /// Integrals of the derivative basis of the finer space (`IN^{n-1,k-2}`).
    pub in_hat: Vec<T>,
    /// Integrals of the derivative basis of the coarser space (`IN^{n-1,k-1}`).
    pub in_cur: Vec<T>,
}

#[derive(Clone, Debug, Default)]
pub struct JoinTrace<T> {
    pub r: usize,
    pub cells: Vec<CellTrace<T>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct JoinTelemetry {
    pub r: usize,
    pub cells: usize,
    pub nontrivial_alphas: usize,
    pub row_combinations: usize,
}

impl JoinTelemetry {
    /// Nontrivial coefficients of a `C^r` join: `sum_k k (r - k + 1)`.
    pub fn expected_alphas(r: usize) -> usize {
        (1..=r).map(|k| k * (r - k + 1)).sum()
    }

    pub fn expected_cells(r: usize) -> usize {
        r * (r + 1) / 2
    }

    pub fn expected_row_combinations(r: usize) -> usize {
        (1..=r).map(|k| (k + 1) * (r - k + 1)).sum()
    }
}

#[derive(Clone, Debug)]
pub struct JoinOutput<T> {
    pub bundle: SectionBundle<T>,
    pub telemetry: JoinTelemetry,
    pub trace: Option<JoinTrace<T>>,
}

/// `C^r` join of two bundles.
pub fn cr_join<T: Scalar>(
    left: &SectionBundle<T>,
    right: &SectionBundle<T>,
    r: usize,
) -> Result<SectionBundle<T>> {
    Ok(cr_join_traced(left, right, r, false)?.bundle)
}

pub fn cr_join_traced<T: Scalar>(
    left: &SectionBundle<T>,
    right: &SectionBundle<T>,
    r: usize,
    keep_trace: bool,
) -> Result<JoinOutput<T>> {
    let (ls, rs) = (&left.space, &right.space);
    let dl = *ls.degrees.last().unwrap();
    let dr = rs.degrees[0];
    if r as i64 > dl.min(dr) {
        return Err(Error::InvalidSpace(format!(
            "C^{r} join needs degree >= {r} on both sides of {} (have {dl} and {dr})",
            ls.b
        )));
    }
    let space = MDSpace::join(ls, rs, r as i64)?;

    // level rho of each side, row n = r - rho of the scheme
    let ml = |n: usize| left.level(r - n);
    let mr = |n: usize| right.level(r - n);

    let mut telemetry = JoinTelemetry {
        r,
        ..Default::default()
    };
    let mut trace = keep_trace.then(|| JoinTrace { r, cells: vec![] });

    let mut out_levels: Vec<Option<Level<T>>> = (0..=r).map(|_| None).collect();

    // row 0 is the plain C^0 join
    let l0 = ml(0)?;
    let r0 = mr(0)?;
    let ref0 = MDSpace::join(&l0.reference, &r0.reference, 0)?;
    let in0_0 = c0_join_integrals(&l0.ref_integrals, &r0.ref_integrals);
    let m0 = c0_join_matrices(&l0.matrix, &r0.matrix)?;

    // data of the previous row: integrals per column (index k+1, k = -1..n-1)
    // and coefficients per column (index k, k = 0..n-1)
    let mut prev_ins: Vec<Vec<T>> = Vec::new();
    let mut prev_coeffs: Vec<RkiCoefficients<T>> = Vec::new();
    if r > 0 {
        let in_l = l0.integrals();
        let in_r = r0.integrals();
        let mut unmerged = in_l.clone();
        unmerged.extend_from_slice(&in_r);
        let merged = c0_join_integrals(&in_l, &in_r);
        prev_ins = vec![unmerged, merged];
        prev_coeffs = vec![RkiCoefficients::empty(in_l.len() + 1)];
    }
    out_levels[r] = Some(Level {
        matrix: m0,
        reference: ref0,
        ref_integrals: in0_0,
    });

    for n in 1..=r {
        let lvl_l = ml(n)?;
        let lvl_r = mr(n)?;
        let reference = MDSpace::join(&lvl_l.reference, &lvl_r.reference, 0)?;
        let in0 = c0_join_integrals(&lvl_l.ref_integrals, &lvl_r.ref_integrals);
        let mut m = c0_join_matrices(&lvl_l.matrix, &lvl_r.matrix)?;
        // window end is fixed along the row: the last function of the left block
        let ie = lvl_l.matrix.rows();

        let mut ins: Vec<Vec<T>> = Vec::new();
        let mut coeffs_row: Vec<RkiCoefficients<T>> = Vec::new();
        if n < r {
            let in_l = lvl_l.integrals();
            let in_r = lvl_r.integrals();
            let mut unmerged = in_l.clone();
            unmerged.extend_from_slice(&in_r);
            ins.push(unmerged);
            ins.push(c0_join_integrals(&in_l, &in_r));
            coeffs_row.push(RkiCoefficients::empty(ie + 1));
        }

        for k in 1..=n {
            let ib = ie + 1 - k;
            let above = &prev_coeffs[k - 1];
            let in_hat = &prev_ins[k - 1]; // column k-2
            let in_cur = &prev_ins[k]; // column k-1
            let mut alpha = Vec::with_capacity(k);
            let mut beta = Vec::with_capacity(k);
            for i in ib..=ie {
                let den = &in_cur[i - 2];
                if !den.is_positive() {
                    return Err(Error::Denominator {
                        context: "reverse knot insertion",
                        index: i - 1,
                        value: den.to_f64(),
                    });
                }
                let a = match above.a(i - 1) {
                    Coef::Zero => T::zero(),
                    c => coef_value(c) * in_hat[i - 2].clone() / den.clone(),
                };
                let b = match above.b(i) {
                    Coef::Zero => T::zero(),
                    c => coef_value(c) * in_hat[i - 1].clone() / den.clone(),
                };
                alpha.push(a);
                beta.push(b);
            }
            let c = RkiCoefficients { ib, alpha, beta };
            apply_bidiagonal_in_place(&mut m, &c);

            telemetry.cells += 1;
            telemetry.nontrivial_alphas += k;
            telemetry.row_combinations += (ib.saturating_sub(1).max(1)..=ie).count();

            if n < r {
                let next = refresh_integrals(&m, &in0, ins.last().unwrap(), ib.saturating_sub(1).max(1), ie);
                ins.push(next);
            }
            if let Some(t) = trace.as_mut() {
                t.cells.push(CellTrace {
                    n,
                    k,
                    coeffs: c.clone(),
                    in_hat: in_hat.clone(),
                    in_cur: in_cur.clone(),
                });
            }
            if n < r {
                coeffs_row.push(c);
            }
        }
        out_levels[r - n] = Some(Level {
            matrix: m,
            reference,
            ref_integrals: in0,
        });
        prev_ins = ins;
        prev_coeffs = coeffs_row;
    }

    let mut levels: Vec<Level<T>> = out_levels.into_iter().map(|l| l.unwrap()).collect();
    if r == 0 {
        // derivatives of a C^0 join live on the concatenation
        if let (Ok(l1), Ok(r1)) = (left.level(1), right.level(1)) {
            let mut ints = l1.ref_integrals.clone();
            ints.extend_from_slice(&r1.ref_integrals);
            levels.push(Level {
                matrix: l1.matrix.concat(&r1.matrix),
                reference: MDSpace::join(&l1.reference, &r1.reference, -1)?,
                ref_integrals: ints,
            });
        }
    }
    Ok(JoinOutput {
        bundle: SectionBundle { space, levels },
        telemetry,
        trace,
    })
}
