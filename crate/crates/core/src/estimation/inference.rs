//! Finite-difference Hessians, standard errors and Wald intervals.

use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::distributions::{HewParams, LifetimeModel};
use crate::error::{HewError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

/// Relative step used by [`numeric_hessian`]: roughly `ε^{1/4}`.
pub const HESSIAN_RELATIVE_STEP: f64 = 1e-4;

/// Central-difference Hessian of `f` at `x` with per-coordinate steps `h`.
/// The result is symmetrised.
pub fn hessian_of<F>(f: &F, x: &[f64], h: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    let d = x.len();
    let f0 = f(x);
    let at = |moves: &[(usize, f64)]| -> f64 {
        let mut y = x.to_vec();
        for &(i, s) in moves {
            y[i] += s;
        }
        f(&y)
    };
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        let v = (at(&[(i, h[i])]) - 2.0 * f0 + at(&[(i, -h[i])])) / (h[i] * h[i]);
        hess[(i, i)] = v;
        for j in 0..i {
            let v = (at(&[(i, h[i]), (j, h[j])])
                - at(&[(i, h[i]), (j, -h[j])])
                - at(&[(i, -h[i]), (j, h[j])])
                + at(&[(i, -h[i]), (j, -h[j])]))
                / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let sym = (&hess + hess.transpose()) * 0.5;
    for i in 0..d {
        for j in 0..d {
            if !sym[(i, j)].is_finite() {
                return Err(HewError::NonFiniteHessian { row: i, col: j });
            }
        }
    }
    Ok(sym)
}

/// Hessian of the HEW negative log-likelihood at `p`, in natural parameters
/// ordered (θ, k, β, α).
pub fn numeric_hessian(p: &HewParams, xs: &[f64]) -> Result<Matrix4<f64>> {
    numeric_hessian_with_step(p, xs, HESSIAN_RELATIVE_STEP)
}

pub fn numeric_hessian_with_step(p: &HewParams, xs: &[f64], rel_step: f64) -> Result<Matrix4<f64>> {
    let x = p.to_array();
    let h: Vec<f64> = x.iter().map(|v| rel_step * v.abs()).collect();
    let nll = |y: &[f64]| match HewParams::new(y[0], y[1], y[2], y[3]) {
        Ok(q) => q.neg_log_likelihood(xs),
        Err(_) => f64::INFINITY,
    };
    let m = hessian_of(&nll, &x, &h)?;
    Ok(Matrix4::from_iterator(m.iter().copied()))
}

/// Square roots of the diagonal of the inverse Hessian. `None` when the
/// Hessian is not positive definite.
pub fn standard_errors(hessian: &DMatrix<f64>) -> Option<Vec<f64>> {
    let chol = hessian.clone().cholesky()?;
    let inv = chol.inverse();
    (0..inv.nrows())
        .map(|i| {
            let v = inv[(i, i)];
            (v.is_finite() && v >= 0.0).then(|| v.sqrt())
        })
        .collect()
}

/// `estimate ± z·se` with `z` the standard-normal quantile at `(1 + level)/2`.
pub fn asymptotic_ci(estimate: f64, std_error: f64, level: f64) -> Result<Interval> {
    if !(std_error >= 0.0) {
        return Err(HewError::Domain(format!(
            "standard error must be >= 0, got {std_error}"
        )));
    }
    let z = normal_quantile((1.0 + level) / 2.0)?;
    Ok(Interval {
        lower: estimate - z * std_error,
        upper: estimate + z * std_error,
    })
}

pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(HewError::Domain(format!(
            "probability must be in (0, 1), got {p}"
        )));
    }
    let n = Normal::new(0.0, 1.0).map_err(|e| HewError::Domain(e.to_string()))?;
    Ok(n.inverse_cdf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ci_examples() {
        let ci = asymptotic_ci(1.0, 0.1, 0.95).unwrap();
        assert!((ci.lower - 0.804).abs() < 1e-4 && (ci.upper - 1.196).abs() < 1e-4);
        let z = normal_quantile(0.975).unwrap();
        assert!((z - 1.96).abs() < 5e-4);

        let ci = asymptotic_ci(8.46, 0.9056, 0.95).unwrap();
        assert!((ci.lower - 6.69).abs() < 0.01 && (ci.upper - 10.24).abs() < 0.01);
        assert!((ci.width() - 3.54).abs() < 0.01);

        let ci = asymptotic_ci(2.5, 0.0, 0.9).unwrap();
        assert_eq!((ci.lower, ci.upper), (2.5, 2.5));
        assert!(asymptotic_ci(1.0, -1.0, 0.95).is_err());
    }

    #[test]
    fn quadratic_hessian_is_recovered() {
        // f(x) = ½ xᵀ A x + bᵀx
        let a = [[4.0, 1.0, 0.5], [1.0, 3.0, -0.2], [0.5, -0.2, 2.0]];
        let f = |x: &[f64]| {
            let mut v = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    v += 0.5 * a[i][j] * x[i] * x[j];
                }
                v += (i as f64 + 1.0) * x[i];
            }
            v
        };
        let h = hessian_of(&f, &[0.3, 1.2, -0.7], &[1e-3; 3]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((h[(i, j)] - a[i][j]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn exponential_rate_curvature() {
        // With θ = k = β = 1 the (α, α) entry is n/α².
        let alpha = 1.0;
        let p = HewParams::new(1.0, 1.0, 1.0, alpha).unwrap();
        let h = numeric_hessian(&p, &[1.0; 4]).unwrap();
        assert!((h[(3, 3)] - 4.0 / (alpha * alpha)).abs() < 1e-5);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h[(i, j)], h[(j, i)]);
            }
        }
    }

    #[test]
    fn non_finite_entries_are_reported() {
        let f = |x: &[f64]| if x[1] > 0.0 { f64::NAN } else { x[0] * x[0] };
        let err = hessian_of(&f, &[0.0, 0.0], &[1e-3, 1e-3]).unwrap_err();
        assert!(matches!(err, HewError::NonFiniteHessian { .. }));
    }

    #[test]
    fn standard_errors_of_diagonal_matrix() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![4.0, 25.0]));
        let se = standard_errors(&m).unwrap();
        assert!((se[0] - 0.5).abs() < 1e-15 && (se[1] - 0.2).abs() < 1e-15);
        let indefinite = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        assert!(standard_errors(&indefinite).is_none());
    }
}
