//! Evaluation of represented bases, splines and Greville abscissae.

use crate::assembler::RepMatrixBundle;
use crate::c0::{BasisValues, C0Basis};
use crate::error::{Error, Result};
use crate::join::RkiCoefficients;
use crate::matrix::Matrix;
use crate::par::{self, Execution};
use crate::scalar::Scalar;
use crate::spaces::MDSpace;

/// Point evaluator for the basis `N = M * N0` of a bundle.
#[derive(Clone, Debug)]
pub struct Evaluator<T> {
    matrix: Matrix<T>,
    basis: C0Basis,
    bands: Vec<(usize, usize)>,
}

impl<T: Scalar> Evaluator<T> {
    pub fn new(bundle: &RepMatrixBundle<T>) -> Result<Self> {
        let matrix = bundle.matrix().clone();
        let basis = C0Basis::new(bundle.reference())?;
        let bands = (0..matrix.rows()).map(|i| matrix.band(i)).collect();
        Ok(Evaluator { matrix, basis, bands })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn space(&self) -> &MDSpace {
        self.basis.space()
    }

    /// Window of target functions whose band meets the reference window.
    pub fn eval(&self, x: f64) -> Result<BasisValues<T>> {
        let w = self.basis.eval::<T>(x)?;
        let lo = w.first_index - 1;
        let hi = lo + w.values.len();
        // bands are monotone in both ends
        let first = self.bands.partition_point(|&(_, e)| e <= lo);
        let last = self.bands.partition_point(|&(s, _)| s < hi);
        let values = (first..last)
            .map(|i| {
                let row = self.matrix.row(i);
                let (s, e) = self.bands[i];
                let (from, to) = (s.max(lo), e.min(hi).max(s.max(lo)));
                row[from..to]
                    .iter()
                    .zip(&w.values[from - lo..to - lo])
                    .fold(T::zero(), |acc, (m, v)| acc + m.clone() * v.clone())
            })
            .collect();
        Ok(BasisValues {
            first_index: first + 1,
            values,
        })
    }

    pub fn eval_spline(&self, coeffs: &[T], x: f64) -> Result<T> {
        if coeffs.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{} coefficients for a space of dimension {}",
                coeffs.len(),
                self.dim()
            )));
        }
        let w = self.eval(x)?;
        Ok(w
            .values
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (o, v)| acc + v.clone() * coeffs[w.first_index - 1 + o].clone()))
    }
}

pub fn eval_basis<T: Scalar>(bundle: &RepMatrixBundle<T>, x: f64) -> Result<BasisValues<T>> {
    Evaluator::new(bundle)?.eval(x)
}

pub fn eval_spline<T: Scalar>(bundle: &RepMatrixBundle<T>, coeffs: &[T], x: f64) -> Result<T> {
    Evaluator::new(bundle)?.eval_spline(coeffs, x)
}

/// Basis windows at many points.
pub fn eval_grid<T: Scalar>(
    bundle: &RepMatrixBundle<T>,
    points: &[f64],
    exec: Execution,
) -> Result<Vec<BasisValues<T>>> {
    let ev = Evaluator::new(bundle)?;
    par::map(exec, points, |&x| ev.eval(x)).into_iter().collect()
}

/// `n` equally spaced points covering `[a, b]`, both ends included.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n)
            .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Greville abscissae as prefix sums of the first-derivative integrals.
pub fn greville<T: Scalar>(bundle: &RepMatrixBundle<T>) -> Result<Vec<T>> {
    if let Some(j) = bundle.space.degrees.iter().position(|&d| d < 1) {
        return Err(Error::GrevilleDegree(j));
    }
    let ints = bundle.level(1)?.integrals();
    let mut xi = Vec::with_capacity(ints.len() + 1);
    let mut acc = T::from_f64(bundle.space.a);
    xi.push(acc.clone());
    for v in ints {
        acc = acc + v;
        xi.push(acc.clone());
    }
    // the last sum equals b up to rounding; pin it
    if let Some(last) = xi.last_mut() {
        *last = T::from_f64(bundle.space.b);
    }
    Ok(xi)
}

/// Insertion coefficients between `bundle` (space `S`) and `hat_bundle`
/// (the same space with one lower continuity at breakpoint `j`), from
/// Greville differences accumulated over the window only.
pub fn insertion_coefficients<T: Scalar>(
    bundle: &RepMatrixBundle<T>,
    hat_bundle: &RepMatrixBundle<T>,
    j: usize,
) -> Result<RkiCoefficients<T>> {
    let (s, hat) = (&bundle.space, &hat_bundle.space);
    if j == 0 || j > s.q() {
        return Err(Error::Input(format!("breakpoint index {j} out of range")));
    }
    let mut expect = s.clone();
    expect.continuities[j - 1] -= 1;
    if *hat != expect {
        return Err(Error::Input(
            "the spaces differ by more than one continuity decrement".into(),
        ));
    }
    for b in [bundle, hat_bundle] {
        if let Some(jj) = b.space.degrees.iter().position(|&d| d < 1) {
            return Err(Error::GrevilleDegree(jj));
        }
    }
    let x = s.point(j);
    let k = s.k(j);
    let ie = hat.extended_partitions()?.s.iter().filter(|&&v| v < x).count();
    if k < 1 {
        return Ok(RkiCoefficients::empty(ie + 1));
    }
    let ib = ie + 1 - k as usize;
    let int = bundle.level(1)?.integrals();
    let int_hat = hat_bundle.level(1)?.integrals();
    // xi_i - xi_{i-1} = int[i-2]; both abscissae agree below the window, so
    // hat_xi_i - xi_{i-1} = sum(int_hat[ib-2..i-1]) - sum(int[ib-2..i-2])
    let mut alpha = Vec::with_capacity(k as usize);
    let mut beta = Vec::with_capacity(k as usize);
    let mut sh = T::zero();
    let mut sc = T::zero();
    for i in ib..=ie {
        sh = sh + int_hat[i - 2].clone();
        let num = sh.clone() - sc.clone();
        let den = int[i - 2].clone();
        let a = num / den.clone();
        sc = sc + den;
        beta.push(T::one() - a.clone());
        alpha.push(a);
    }
    Ok(RkiCoefficients { ib, alpha, beta })
}

/// Coefficients in the refined space `hat` of the spline with coefficients
/// `coeffs` in `S`: `c_hat_i = alpha_i c_i + (1 - alpha_i) c_{i-1}`.
pub fn insert_knot_coeffs<T: Scalar>(
    bundle: &RepMatrixBundle<T>,
    hat_bundle: &RepMatrixBundle<T>,
    coeffs: &[T],
    j: usize,
) -> Result<Vec<T>> {
    if coeffs.len() != bundle.dim() {
        return Err(Error::Dimension(format!(
            "{} coefficients for a space of dimension {}",
            coeffs.len(),
            bundle.dim()
        )));
    }
    let c = insertion_coefficients(bundle, hat_bundle, j)?;
    let kk = coeffs.len();
    Ok((1..=kk + 1)
        .map(|i| {
            let a = c.alpha_at(i);
            let b = c.beta_at(i);
            let mut v = T::zero();
            if i <= kk && !a.is_zero() {
                v = v + a * coeffs[i - 1].clone();
            }
            if i >= 2 && !b.is_zero() {
                v = v + b * coeffs[i - 2].clone();
            }
            v
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembler::build_matrix_rki;
    use crate::scalar::{parse_fraction, Rational};

    #[test]
    fn cubic_bernstein_greville() {
        let s = MDSpace::bernstein(0.0, 1.0, 3).unwrap();
        let b = build_matrix_rki::<Rational>(&s).unwrap();
        let xi = greville(&b).unwrap();
        let want: Vec<Rational> = ["0", "1/3", "2/3", "1"].iter().map(|v| parse_fraction(v).unwrap()).collect();
        assert_eq!(xi, want);
    }

    #[test]
    fn degree_zero_is_rejected() {
        let s = MDSpace::new(0.0, 2.0, vec![1.0], vec![0, 1], vec![0]).unwrap();
        let b = build_matrix_rki::<f64>(&s).unwrap();
        assert!(matches!(greville(&b), Err(Error::GrevilleDegree(0))));
    }

    #[test]
    fn bernstein_values() {
        let s = MDSpace::bernstein(0.0, 1.0, 1).unwrap();
        let b = build_matrix_rki::<f64>(&s).unwrap();
        let v = eval_basis(&b, 0.5).unwrap();
        assert_eq!(v.values, vec![0.5, 0.5]);
        assert_eq!(v.first_index, 1);
    }

    #[test]
    fn greville_reproduces_identity() {
        let s = MDSpace::new(0.0, 4.0, vec![1.0, 2.0, 3.0], vec![2, 2, 4, 3], vec![1, 2, 3]).unwrap();
        let b = build_matrix_rki::<f64>(&s).unwrap();
        let xi = greville(&b).unwrap();
        assert_eq!(xi.len(), 6);
        let ev = Evaluator::new(&b).unwrap();
        for x in uniform_grid(0.0, 4.0, 41) {
            assert!((ev.eval_spline(&xi, x).unwrap() - x).abs() < 1e-13);
        }
    }

    #[test]
    fn knot_insertion_preserves_functions() {
        let s = MDSpace::new(0.0, 4.0, vec![1.0, 2.0, 3.0], vec![2, 2, 4, 3], vec![1, 2, 3]).unwrap();
        let mut h = s.clone();
        h.continuities[1] = 1;
        let b = build_matrix_rki::<Rational>(&s).unwrap();
        let bh = build_matrix_rki::<Rational>(&h).unwrap();
        let c: Vec<Rational> = (0..6).map(|i| Rational::from_integer(((i * 7) % 5).into())).collect();
        let ch = insert_knot_coeffs(&b, &bh, &c, 2).unwrap();
        let (e, eh) = (Evaluator::new(&b).unwrap(), Evaluator::new(&bh).unwrap());
        for x in uniform_grid(0.0, 4.0, 17) {
            assert_eq!(e.eval_spline(&c, x).unwrap(), eh.eval_spline(&ch, x).unwrap());
        }
        let xi = greville(&b).unwrap();
        assert_eq!(insert_knot_coeffs(&b, &bh, &xi, 2).unwrap(), greville(&bh).unwrap());
    }
}
