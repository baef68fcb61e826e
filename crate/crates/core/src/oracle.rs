//! Exact rational replay of the constructions and the error metrics built on it.
//!
//! The algorithms are generic over [`Scalar`], so the oracle simply runs them
//! with [`Rational`] entries. On top of that it checks identities between
//! independent formulas for the same coefficients.

use serde::Serialize;

use crate::assembler::{build, build_matrix_rki, build_matrix_rki_traced, RepMatrixBundle, Strategy};
use crate::error::{Error, Result};
use crate::eval::insertion_coefficients;
use crate::join::{cr_join_traced, SectionBundle};
use crate::legacy::build_matrix_rki_derivative;
use crate::matrix::Matrix;
use crate::scalar::{fraction_string, Rational, Scalar};
use crate::spaces::MDSpace;

/// Exact representation. The derivative strategy maps to the stable one,
/// since both agree in exact arithmetic (see [`legacy_crosscheck`]).
pub fn oracle_build(space: &MDSpace, strategy: Strategy) -> Result<RepMatrixBundle<Rational>> {
    match strategy {
        Strategy::Derivative => build_matrix_rki(space),
        s => build(space, s),
    }
}

pub fn oracle_build_matrix(space: &MDSpace, strategy: Strategy) -> Result<Matrix<Rational>> {
    Ok(oracle_build(space, strategy)?.matrix().clone())
}

/// Maximum column sum of `|m - exact|`, computed exactly and rounded once.
pub fn matrix_error(m: &Matrix<f64>, exact: &Matrix<Rational>) -> Result<f64> {
    let lifted = m.map(|&v| Rational::from_f64(v));
    Ok(lifted.norm1_diff(exact)?.to_f64())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValueError {
    pub absolute: f64,
    pub relative: f64,
}

/// Absolute and relative error of `v` against `exact`; the relative error
/// falls back to the absolute one when `exact` is zero.
pub fn value_error(v: f64, exact: &Rational) -> ValueError {
    let diff = (Rational::from_f64(v) - exact.clone()).abs();
    let absolute = diff.to_f64();
    let relative = if exact.is_zero() {
        absolute
    } else {
        (diff / exact.abs()).to_f64()
    };
    ValueError { absolute, relative }
}

pub fn value_errors(values: &[f64], exact: &[Rational]) -> Result<Vec<ValueError>> {
    if values.len() != exact.len() {
        return Err(Error::Dimension(format!("{} values vs {} exact", values.len(), exact.len())));
    }
    Ok(values.iter().zip(exact).map(|(v, e)| value_error(*v, e)).collect())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CrossCheck {
    /// Coefficients compared.
    pub compared: usize,
    /// Descriptions of the disagreements, empty on success.
    pub mismatches: Vec<String>,
}

impl CrossCheck {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares, at every cell of every join, the integral-ratio coefficients
/// with the ones obtained from differences of Greville abscissae.
pub fn greville_crosscheck(space: &MDSpace) -> Result<CrossCheck> {
    Ok(greville_crosscheck_traced(&build_matrix_rki_traced::<Rational>(space, true)?))
}

/// [`greville_crosscheck`] on an exact bundle built with traces kept.
pub fn greville_crosscheck_traced(b: &RepMatrixBundle<Rational>) -> CrossCheck {
    let mut out = CrossCheck::default();
    for (t, trace) in b.traces.iter().enumerate() {
        for cell in &trace.cells {
            let c = &cell.coeffs;
            for (o, (alpha, beta)) in c.alpha.iter().zip(&c.beta).enumerate() {
                let i = c.ib + o;
                // xi_i - xi_{i-1} = in_cur[i-2], hat_xi_i - xi_{i-1} as full prefix sums
                let hat: Rational = cell.in_hat[..i - 1].iter().cloned().fold(Rational::zero(), |a, b| a + b);
                let cur: Rational = cell.in_cur[..i - 2].iter().cloned().fold(Rational::zero(), |a, b| a + b);
                let g = (hat - cur) / cell.in_cur[i - 2].clone();
                out.compared += 1;
                if &g != alpha || Rational::one() - g.clone() != *beta {
                    out.mismatches.push(format!(
                        "join {t}, cell ({}, {}), i = {i}: ratio {} vs greville {}",
                        cell.n,
                        cell.k,
                        fraction_string(alpha),
                        fraction_string(&g)
                    ));
                }
            }
        }
    }
    out
}

/// Exact equality of the derivative-based and integral-based matrices.
pub fn legacy_crosscheck(space: &MDSpace) -> Result<bool> {
    let a = build_matrix_rki_derivative::<Rational>(space)?;
    let b = build_matrix_rki::<Rational>(space)?;
    Ok(a.matrix() == b.matrix())
}

/// Classical insertion weights for inserting `x` into the conventional
/// degree-`p` knot vector `knots` (1-based `alpha_i`, `i = 1..=n+1`).
pub fn boehm_alphas(knots: &[Rational], p: usize, x: &Rational) -> Vec<Rational> {
    let n = knots.len() - p - 1;
    // l: largest index with knots[l] <= x (1-based), restricted to a real span
    let l = knots.iter().rposition(|t| t <= x).map_or(0, |v| v + 1).min(n);
    (1..=n + 1)
        .map(|i| {
            if i + p <= l {
                Rational::one()
            } else if i > l {
                Rational::zero()
            } else {
                let ti = &knots[i - 1];
                let tip = &knots[i + p - 1];
                (x.clone() - ti.clone()) / (tip.clone() - ti.clone())
            }
        })
        .collect()
}

/// For a conventional space and each breakpoint with positive continuity,
/// the insertion coefficients from the join scheme and from Greville
/// differences are both compared with the classical weights.
pub fn boehm_check(space: &MDSpace) -> Result<CrossCheck> {
    if !space.is_uniform_degree() {
        return Err(Error::InvalidSpace("the classical weights need a single degree".into()));
    }
    let p = space.degrees[0] as usize;
    let mut out = CrossCheck::default();
    for j in 1..=space.q() {
        let k = space.k(j);
        if k < 1 {
            continue;
        }
        let mut hat = space.clone();
        hat.continuities[j - 1] -= 1;
        let x = Rational::from_f64(space.point(j));
        let mut knots = vec![Rational::from_f64(hat.a); p + 1];
        for i in 1..=hat.q() {
            let m = p as i64 - hat.k(i);
            knots.extend(std::iter::repeat_n(Rational::from_f64(hat.point(i)), m as usize));
        }
        knots.extend(std::iter::repeat_n(Rational::from_f64(hat.b), p + 1));
        // the insertion takes the hat knots to the knots of `space`
        let mut coarse = knots.clone();
        let pos = coarse.iter().position(|t| *t == x).expect("breakpoint is a knot");
        coarse.remove(pos);
        let want = boehm_alphas(&coarse, p, &x);

        let sb = build_matrix_rki::<Rational>(space)?;
        let hb = build_matrix_rki::<Rational>(&hat)?;
        let via_greville = insertion_coefficients(&sb, &hb, j)?;

        // the same step as the last cell of a C^k join of the two halves
        let left = SectionBundle::identity(&space.restrict(0, j - 1), k as usize)?;
        let right = SectionBundle::identity(&space.restrict(j, space.q()), k as usize)?;
        let joined = cr_join_traced(&left, &right, k as usize, true)?;
        let trace = joined.trace.expect("trace requested");
        let last = trace.cells.last().expect("k >= 1 gives cells");

        for i in 1..want.len() + 1 {
            out.compared += 1;
            let g = via_greville.alpha_at(i);
            let r = last.coeffs.alpha_at(i);
            if g != want[i - 1] || r != want[i - 1] {
                out.mismatches.push(format!(
                    "breakpoint {j}, i = {i}: classical {}, greville {}, ratio {}",
                    fraction_string(&want[i - 1]),
                    fraction_string(&g),
                    fraction_string(&r)
                ));
            }
        }
    }
    Ok(out)
}

/// `{"rows": r, "cols": c, "entries": [["p/q", ...], ...]}`.
pub fn fraction_json(m: &Matrix<Rational>) -> serde_json::Value {
    let entries: Vec<Vec<String>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(fraction_string).collect())
        .collect();
    serde_json::json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::parse_fraction;

    fn example1() -> MDSpace {
        MDSpace::new(0.0, 4.0, vec![1.0, 2.0, 3.0], vec![2, 2, 4, 3], vec![1, 2, 3]).unwrap()
    }

    #[test]
    fn identical_matrices_have_no_error() {
        let m = oracle_build_matrix(&example1(), Strategy::Rki).unwrap();
        assert!(matrix_error(&m.to_f64(), &m).unwrap() < 1e-16);
        let e = value_error(0.5, &parse_fraction("1/2").unwrap());
        assert_eq!((e.absolute, e.relative), (0.0, 0.0));
        let z = value_error(1e-3, &Rational::zero());
        assert_eq!(z.relative, z.absolute);
    }

    #[test]
    fn greville_and_ratio_agree() {
        let c = greville_crosscheck(&example1()).unwrap();
        assert!(c.ok(), "{:?}", c.mismatches);
        // 10 + 4 coefficients over the two joins
        assert_eq!(c.compared, 14);
    }

    #[test]
    fn legacy_agrees_exactly() {
        assert!(legacy_crosscheck(&example1()).unwrap());
    }

    #[test]
    fn classical_weights() {
        let s = MDSpace::new(0.0, 4.0, vec![1.0, 2.5, 3.0], vec![3; 4], vec![2, 1, 2]).unwrap();
        let c = boehm_check(&s).unwrap();
        assert!(c.ok(), "{:?}", c.mismatches);
        assert!(c.compared > 0);
    }

    #[test]
    fn boehm_on_linear_bernstein() {
        let knots: Vec<Rational> = ["0", "0", "2", "2"].iter().map(|v| parse_fraction(v).unwrap()).collect();
        let a = boehm_alphas(&knots, 1, &parse_fraction("1").unwrap());
        let want: Vec<Rational> = ["1", "1/2", "0"].iter().map(|v| parse_fraction(v).unwrap()).collect();
        assert_eq!(a, want);
    }

    #[test]
    fn fraction_export() {
        let m = Matrix::from_rows(vec![vec![parse_fraction("1/3").unwrap()]]).unwrap();
        assert_eq!(fraction_json(&m)["entries"][0][0], "1/3");
    }
}
