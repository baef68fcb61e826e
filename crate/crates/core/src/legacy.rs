//! Insertion coefficients from jumps of derivatives.
//!
//! This is the older way of computing reverse knot insertion coefficients:
//! each step raises the continuity at one breakpoint by one and picks the
//! coefficients that cancel the jump of the corresponding derivative. It is
//! exact in rational arithmetic but loses many digits in floating point when
//! the derivatives are large, which is what it is kept around to show.

use crate::assembler::{RepMatrixBundle, Strategy};
use crate::c0::{C0Basis, Side};
use crate::error::{Error, Result};
use crate::join::{apply_bidiagonal_in_place, Level, SectionBundle};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::spaces::MDSpace;

/// Coefficients of the step from `hat` (represented by `m_hat` over `basis`)
/// to the space with continuity `order` at `x`.
///
/// The window is `ie - order + 1 ..= ie`, `ie` being the number of functions
/// of `hat` whose support starts left of `x`.
pub fn alpha_via_derivatives<T: Scalar>(
    m_hat: &Matrix<T>,
    basis: &C0Basis,
    hat: &MDSpace,
    x: f64,
    order: usize,
) -> Result<crate::join::RkiCoefficients<T>> {
    let part = hat.extended_partitions()?;
    let ie = part.s.iter().filter(|&&s| s < x).count();
    if order == 0 || order > ie {
        return Err(Error::Dimension(format!("no insertion window of size {order} below {ie}")));
    }
    let ib = ie + 1 - order;
    let dim = basis.dim();
    let left = basis.derivatives::<T>(x, Side::Left, order)?.scatter(dim);
    let right = basis.derivatives::<T>(x, Side::Right, order)?.scatter(dim);
    let jump = |i: usize| m_hat.row_dot(i - 1, &left) - m_hat.row_dot(i - 1, &right);

    let mut alpha = Vec::with_capacity(order);
    let mut beta = Vec::with_capacity(order);
    let mut prev_alpha = T::one();
    let mut prev_jump = jump(ib - 1);
    for i in ib..=ie {
        let j = jump(i);
        if j.is_zero() {
            return Err(Error::Denominator {
                context: "derivative jump",
                index: i,
                value: 0.0,
            });
        }
        let a = T::one() + prev_alpha * prev_jump / j.clone();
        beta.push(T::one() - a.clone());
        alpha.push(a.clone());
        prev_alpha = a;
        prev_jump = j;
    }
    Ok(crate::join::RkiCoefficients { ib, alpha, beta })
}

/// Whole-space construction: starting from the associated `C^0` space,
/// raise the continuity at each degree change one order at a time, in the
/// same join order as the stable path.
pub fn build_matrix_rki_derivative<T: Scalar>(space: &MDSpace) -> Result<RepMatrixBundle<T>> {
    if space.internal {
        return Err(Error::InvalidSpace(
            "matrix construction needs a public space".into(),
        ));
    }
    let reference = space.associated_c0();
    let basis = C0Basis::new(&reference)?;
    let mut m = Matrix::identity(basis.dim());
    let mut cur = reference.clone();
    for &(b, k) in &space.section_decomposition().join_order {
        let x = space.point(b);
        for c in 1..=k.max(0) as usize {
            let coeffs = alpha_via_derivatives(&m, &basis, &cur, x, c)?;
            apply_bidiagonal_in_place(&mut m, &coeffs);
            cur.continuities[b - 1] = c as i64;
        }
    }
    debug_assert_eq!(cur, *space);
    let level = Level {
        matrix: m,
        ref_integrals: basis.integrals(),
        reference,
    };
    Ok(RepMatrixBundle {
        strategy: Strategy::Derivative,
        space: space.clone(),
        bundle: SectionBundle {
            space: space.clone(),
            levels: vec![level],
        },
        telemetry: vec![],
        traces: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembler::build_matrix_rki;
    use crate::scalar::Rational;

    #[test]
    fn exact_legacy_equals_stable() {
        let s = MDSpace::new(0.0, 4.0, vec![1.0, 2.0, 3.0], vec![2, 2, 4, 3], vec![1, 2, 3]).unwrap();
        let a = build_matrix_rki_derivative::<Rational>(&s).unwrap();
        let b = build_matrix_rki::<Rational>(&s).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn tame_space_in_double_precision() {
        let s = MDSpace::new(0.0, 2.0, vec![1.0], vec![3, 2], vec![2]).unwrap();
        let a = build_matrix_rki_derivative::<f64>(&s).unwrap();
        let b = build_matrix_rki::<f64>(&s).unwrap();
        assert!(a.matrix().max_abs_diff(b.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn single_step_matches_hand_computation() {
        // quartic and cubic Bernstein pieces glued with C^0, raised to C^1
        let s = MDSpace::new(2.0, 4.0, vec![3.0], vec![4, 3], vec![0]).unwrap();
        let basis = C0Basis::new(&s).unwrap();
        let m = Matrix::<Rational>::identity(basis.dim());
        let c = alpha_via_derivatives(&m, &basis, &s, 3.0, 1).unwrap();
        assert_eq!(c.ib, 5);
        assert_eq!(c.alpha, vec![crate::scalar::parse_fraction("3/7").unwrap()]);
    }
}
