//! Harris extended Weibull (HEW) distribution and the three Weibull variants
//! it is compared against.
//!
//! HEW(θ, k, β, α) has density
//!
//! ```text
//! f(x) = θ^{1/k} α β x^{β-1} exp(-α x^β) / [1 - θ̄ exp(-k α x^β)]^{(k+1)/k},   θ̄ = 1 - θ
//! ```
//!
//! and survival function `S(x) = {θ e^{-kαx^β} / (1 - θ̄ e^{-kαx^β})}^{1/k}`.
//! The cdf is `1 - S`. At θ = k = 1 the family reduces to Weibull(β, α), with
//! rate α acting on `x^β`.
//!
//! All evaluations work in log space: `α x^β` is formed as `exp(ln α + β ln x)`
//! and the denominator uses the cancellation-free identity
//! `1 - θ̄ e^{-kz} = θ e^{-kz} - expm1(-kz)`.

use serde::{Deserialize, Serialize};

use crate::error::{HewError, Result};

/// Common interface for the lifetime models handled by the crate.
///
/// Methods never fail: outside the support `log_pdf` is `-inf`, the cdf is
/// clamped to `[0, 1]`, and non-finite inputs propagate as NaN.
pub trait LifetimeModel {
    fn log_pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn sf(&self, x: f64) -> f64;
    /// Inverse cdf for `u` in (0, 1).
    fn quantile(&self, u: f64) -> f64;
    /// Number of free parameters, used for AIC/BIC.
    fn n_params(&self) -> usize;

    fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// `-Σ ln f(x_i)`, with `+inf` standing in for any non-finite total.
    fn neg_log_likelihood(&self, xs: &[f64]) -> f64 {
        let total: f64 = xs.iter().map(|&x| self.log_pdf(x)).sum();
        if total.is_finite() {
            -total
        } else {
            f64::INFINITY
        }
    }
}

/// The four HEW parameters. All strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct HewParams {
    theta: f64,
    k: f64,
    beta: f64,
    alpha: f64,
}

pub const PARAM_NAMES: [&str; 4] = ["theta", "k", "beta", "alpha"];

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(HewError::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}

impl HewParams {
    pub fn new(theta: f64, k: f64, beta: f64, alpha: f64) -> Result<Self> {
        check_positive("theta", theta)?;
        check_positive("k", k)?;
        check_positive("beta", beta)?;
        check_positive("alpha", alpha)?;
        Ok(Self {
            theta,
            k,
            beta,
            alpha,
        })
    }

    pub fn from_array(p: [f64; 4]) -> Result<Self> {
        Self::new(p[0], p[1], p[2], p[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.theta, self.k, self.beta, self.alpha]
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// θ̄ = 1 − θ.
    pub fn theta_bar(&self) -> f64 {
        1.0 - self.theta
    }

    /// `α x^β` evaluated as `exp(ln α + β ln x)`.
    fn baseline_hazard(&self, x: f64) -> f64 {
        (self.alpha.ln() + self.beta * x.ln()).exp()
    }

    /// `L = −k·ln S = ln(1 + (e^{kz} − 1)/θ)` for `z = α x^β ≥ 0`.
    ///
    /// The survival function `{θe^{−kz}/(1 − θ̄e^{−kz})}^{1/k}` equals
    /// `(1 + (e^{kz} − 1)/θ)^{−1/k}`, whose logarithm has no cancelling
    /// terms. That matters when k is tiny and θ, α are huge, where the
    /// textbook form subtracts numbers of order 1e15.
    fn harris_log_term(&self, z: f64) -> f64 {
        let kz = self.k * z;
        if kz < 700.0 {
            (kz.exp_m1() / self.theta).ln_1p()
        } else {
            kz - self.theta.ln() + ((self.theta - 1.0) * (-kz).exp()).ln_1p()
        }
    }

    /// `ln D = ln(1 − θ̄ e^{−kz})`.
    fn ln_denominator(&self, z: f64) -> f64 {
        let kz = self.k * z;
        let t = self.theta_bar() * (-kz).exp();
        if t.abs() < 0.5 {
            (-t).ln_1p()
        } else {
            (self.theta * (-kz).exp() - (-kz).exp_m1()).ln()
        }
    }

    /// `ln S(x)`.
    pub fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let z = self.baseline_hazard(x);
        if z.is_infinite() {
            return f64::NEG_INFINITY;
        }
        -self.harris_log_term(z) / self.k
    }
}

impl TryFrom<[f64; 4]> for HewParams {
    type Error = HewError;

    fn try_from(p: [f64; 4]) -> Result<Self> {
        Self::from_array(p)
    }
}

impl From<HewParams> for [f64; 4] {
    fn from(p: HewParams) -> Self {
        p.to_array()
    }
}

impl LifetimeModel for HewParams {
    fn log_pdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        let ln_x = x.ln();
        let z = (self.alpha.ln() + self.beta * ln_x).exp();
        // (β − 1)·ln x is skipped at β = 1 so that x = 0 stays finite.
        let shape_term = if self.beta == 1.0 {
            0.0
        } else {
            (self.beta - 1.0) * ln_x
        };
        // f = αβx^{β−1}·S/D
        self.alpha.ln() + self.beta.ln() + shape_term
            - self.harris_log_term(z) / self.k
            - self.ln_denominator(z)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        -self.ln_sf(x).exp_m1()
    }

    fn sf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= 0.0 {
            return 1.0;
        }
        self.ln_sf(x).exp()
    }

    fn quantile(&self, u: f64) -> f64 {
        if !(u > 0.0 && u < 1.0) {
            return f64::NAN;
        }
        // invert L = −k·ln(1 − u) = ln(1 + (e^{kz} − 1)/θ) for z, then x = (z/α)^{1/β}
        let l = -self.k * (-u).ln_1p();
        let kz = if l < 700.0 {
            (self.theta * l.exp_m1()).ln_1p()
        } else {
            l + (self.theta + (1.0 - self.theta) * (-l).exp()).ln()
        };
        ((kz.ln() - self.k.ln() - self.alpha.ln()) / self.beta).exp()
    }

    fn n_params(&self) -> usize {
        4
    }

    /// Closed-form summed log-likelihood; an independent route from summing
    /// [`LifetimeModel::log_pdf`].
    fn neg_log_likelihood(&self, xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let (mut sum_ln_x, mut sum_harris, mut sum_ln_den) = (0.0, 0.0, 0.0);
        for &x in xs {
            let ln_x = x.ln();
            let z = (self.alpha.ln() + self.beta * ln_x).exp();
            sum_ln_x += ln_x;
            sum_harris += self.harris_log_term(z);
            sum_ln_den += self.ln_denominator(z);
        }
        let ll = n * (self.alpha.ln() + self.beta.ln()) + (self.beta - 1.0) * sum_ln_x
            - sum_harris / self.k
            - sum_ln_den;
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    }
}

/// `ln f(x)` for HEW; fails on `x ≤ 0` or when `x^β` overflows.
pub fn hew_log_pdf(p: &HewParams, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(HewError::Domain(format!(
            "log-density needs x > 0, got {x}"
        )));
    }
    let v = p.log_pdf(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(HewError::Domain(format!(
            "log-density is not finite at x = {x} for {p:?}"
        )))
    }
}

pub fn hew_sf(p: &HewParams, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(HewError::Domain(format!("survival needs x >= 0, got {x}")));
    }
    Ok(p.sf(x))
}

pub fn hew_cdf(p: &HewParams, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(HewError::Domain(format!("cdf needs x >= 0, got {x}")));
    }
    Ok(p.cdf(x))
}

pub fn hew_quantile(p: &HewParams, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(HewError::Domain(format!(
            "quantile needs u in (0, 1), got {u}"
        )));
    }
    Ok(p.quantile(u))
}

/// Which comparison family; used when fitting from scratch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ComparisonKind {
    Weibull,
    TruncatedWeibull,
    ExponentiatedWeibull,
}

impl ComparisonKind {
    pub const ALL: [ComparisonKind; 3] = [
        ComparisonKind::Weibull,
        ComparisonKind::TruncatedWeibull,
        ComparisonKind::ExponentiatedWeibull,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ComparisonKind::Weibull => "Weib",
            ComparisonKind::TruncatedWeibull => "tWeib",
            ComparisonKind::ExponentiatedWeibull => "expWeib",
        }
    }
}

/// Weibull variants with two free parameters each.
///
/// * `Weibull`: `F(x) = 1 − exp(−α x^β)`
/// * `TruncatedWeibull`: Weibull renormalised on `(0, γ]`; γ is fixed, not fitted
/// * `ExponentiatedWeibull`: `F(x) = (1 − exp(−x^θ))^α`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComparisonModel {
    Weibull { beta: f64, alpha: f64 },
    TruncatedWeibull { beta: f64, alpha: f64, gamma: f64 },
    ExponentiatedWeibull { theta: f64, alpha: f64 },
}

impl ComparisonModel {
    pub fn weibull(beta: f64, alpha: f64) -> Result<Self> {
        check_positive("beta", beta)?;
        check_positive("alpha", alpha)?;
        Ok(Self::Weibull { beta, alpha })
    }

    pub fn truncated_weibull(beta: f64, alpha: f64, gamma: f64) -> Result<Self> {
        check_positive("beta", beta)?;
        check_positive("alpha", alpha)?;
        check_positive("gamma", gamma)?;
        Ok(Self::TruncatedWeibull { beta, alpha, gamma })
    }

    pub fn exponentiated_weibull(theta: f64, alpha: f64) -> Result<Self> {
        check_positive("theta", theta)?;
        check_positive("alpha", alpha)?;
        Ok(Self::ExponentiatedWeibull { theta, alpha })
    }

    /// Builds a model of `kind` from its two free parameters; `gamma` is only
    /// read for the truncated family.
    pub fn from_free(kind: ComparisonKind, free: [f64; 2], gamma: f64) -> Result<Self> {
        match kind {
            ComparisonKind::Weibull => Self::weibull(free[0], free[1]),
            ComparisonKind::TruncatedWeibull => Self::truncated_weibull(free[0], free[1], gamma),
            ComparisonKind::ExponentiatedWeibull => Self::exponentiated_weibull(free[0], free[1]),
        }
    }

    pub fn kind(&self) -> ComparisonKind {
        match self {
            Self::Weibull { .. } => ComparisonKind::Weibull,
            Self::TruncatedWeibull { .. } => ComparisonKind::TruncatedWeibull,
            Self::ExponentiatedWeibull { .. } => ComparisonKind::ExponentiatedWeibull,
        }
    }

    /// The two fitted parameters, in the order (β, α) or (θ, α).
    pub fn free_params(&self) -> [f64; 2] {
        match *self {
            Self::Weibull { beta, alpha } | Self::TruncatedWeibull { beta, alpha, .. } => {
                [beta, alpha]
            }
            Self::ExponentiatedWeibull { theta, alpha } => [theta, alpha],
        }
    }

    /// Weibull scale `α^{-1/β}` for the Weibull-based kinds.
    pub fn weibull_scale(&self) -> Option<f64> {
        match *self {
            Self::Weibull { beta, alpha } | Self::TruncatedWeibull { beta, alpha, .. } => {
                Some(alpha.powf(-1.0 / beta))
            }
            Self::ExponentiatedWeibull { .. } => None,
        }
    }
}

fn weibull_z(beta: f64, alpha: f64, x: f64) -> f64 {
    (alpha.ln() + beta * x.ln()).exp()
}

fn weibull_log_pdf(beta: f64, alpha: f64, x: f64) -> f64 {
    let shape_term = if beta == 1.0 {
        0.0
    } else {
        (beta - 1.0) * x.ln()
    };
    alpha.ln() + beta.ln() + shape_term - weibull_z(beta, alpha, x)
}

impl LifetimeModel for ComparisonModel {
    fn log_pdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x < 0.0 {
            return f64::NEG_INFINITY;
        }
        match *self {
            Self::Weibull { beta, alpha } => weibull_log_pdf(beta, alpha, x),
            Self::TruncatedWeibull { beta, alpha, gamma } => {
                if x > gamma {
                    return f64::NEG_INFINITY;
                }
                let mass = -(-weibull_z(beta, alpha, gamma)).exp_m1();
                weibull_log_pdf(beta, alpha, x) - mass.ln()
            }
            Self::ExponentiatedWeibull { theta, alpha } => {
                let v = x.powf(theta);
                let shape_term = if theta == 1.0 {
                    0.0
                } else {
                    (theta - 1.0) * x.ln()
                };
                let tail_term = if alpha == 1.0 {
                    0.0
                } else {
                    (alpha - 1.0) * (-(-v).exp_m1()).ln()
                };
                alpha.ln() + theta.ln() + shape_term - v + tail_term
            }
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::Weibull { beta, alpha } => -(-weibull_z(beta, alpha, x)).exp_m1(),
            Self::TruncatedWeibull { beta, alpha, gamma } => {
                if x >= gamma {
                    return 1.0;
                }
                let num = -(-weibull_z(beta, alpha, x)).exp_m1();
                let den = -(-weibull_z(beta, alpha, gamma)).exp_m1();
                (num / den).min(1.0)
            }
            Self::ExponentiatedWeibull { theta, alpha } => {
                let g = -(-x.powf(theta)).exp_m1();
                (alpha * g.ln()).exp()
            }
        }
    }

    fn sf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= 0.0 {
            return 1.0;
        }
        match *self {
            Self::Weibull { beta, alpha } => (-weibull_z(beta, alpha, x)).exp(),
            Self::TruncatedWeibull { beta, alpha, gamma } => {
                if x >= gamma {
                    return 0.0;
                }
                let zg = weibull_z(beta, alpha, gamma);
                let num = (-weibull_z(beta, alpha, x)).exp() - (-zg).exp();
                (num / -(-zg).exp_m1()).max(0.0)
            }
            Self::ExponentiatedWeibull { theta, alpha } => {
                let g = -(-x.powf(theta)).exp_m1();
                -(alpha * g.ln()).exp_m1()
            }
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        if !(u > 0.0 && u < 1.0) {
            return f64::NAN;
        }
        match *self {
            Self::Weibull { beta, alpha } => (-(-u).ln_1p() / alpha).powf(1.0 / beta),
            Self::TruncatedWeibull { beta, alpha, gamma } => {
                let mass = -(-weibull_z(beta, alpha, gamma)).exp_m1();
                let x = (-(-u * mass).ln_1p() / alpha).powf(1.0 / beta);
                x.min(gamma)
            }
            Self::ExponentiatedWeibull { theta, alpha } => {
                let g = (u.ln() / alpha).exp();
                (-(-g).ln_1p()).powf(1.0 / theta)
            }
        }
    }

    fn n_params(&self) -> usize {
        2
    }
}

/// Checked comparison-model cdf.
pub fn comparison_cdf(m: &ComparisonModel, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(HewError::Domain(format!("cdf needs finite x, got {x}")));
    }
    Ok(m.cdf(x))
}

/// Checked comparison-model log-density; `x` must lie in the support
/// (`(0, γ]` for the truncated family).
pub fn comparison_log_pdf(m: &ComparisonModel, x: f64) -> Result<f64> {
    let in_support = match *m {
        ComparisonModel::TruncatedWeibull { gamma, .. } => x > 0.0 && x <= gamma,
        _ => x > 0.0 && x.is_finite(),
    };
    if !in_support {
        return Err(HewError::Domain(format!(
            "x = {x} is outside the support of {m:?}"
        )));
    }
    let v = m.log_pdf(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(HewError::Domain(format!(
            "log-density not finite at x = {x}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(t: f64, k: f64, b: f64, a: f64) -> HewParams {
        HewParams::new(t, k, b, a).unwrap()
    }

    #[test]
    fn rejects_non_positive_parameters() {
        assert!(HewParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(HewParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(HewParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
        assert!(HewParams::new(1.0, 1.0, 1.0, f64::INFINITY).is_err());
        assert!(ComparisonModel::truncated_weibull(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn exponential_reduction_examples() {
        let e = p(1.0, 1.0, 1.0, 1.0);
        assert!((hew_log_pdf(&e, 2.0).unwrap() + 2.0).abs() < 1e-14);
        assert!((hew_sf(&e, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((hew_cdf(&e, 1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((hew_quantile(&e, 0.5).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn weibull_reduction_examples() {
        let w = p(1.0, 1.0, 2.0, 1.0);
        assert!((hew_log_pdf(&w, 1.0).unwrap() - (2f64.ln() - 1.0)).abs() < 1e-14);
        let u = 1.0 - (-1.0f64).exp();
        assert!((hew_quantile(&w, u).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn survival_at_zero_is_one() {
        for q in [
            p(0.1, 0.13, 10.0, 1.0),
            p(14.23, 1.0, 1.8, 0.43),
            p(0.5, 3.0, 0.7, 2.0),
        ] {
            assert_eq!(hew_sf(&q, 0.0).unwrap(), 1.0);
            assert_eq!(hew_cdf(&q, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn domain_errors() {
        let q = p(1.0, 1.0, 1.0, 1.0);
        assert!(hew_log_pdf(&q, 0.0).is_err());
        assert!(hew_log_pdf(&q, -1.0).is_err());
        assert!(hew_sf(&q, -0.1).is_err());
        assert!(hew_quantile(&q, 0.0).is_err());
        assert!(hew_quantile(&q, 1.0).is_err());
        // x^β overflows
        assert!(hew_log_pdf(&p(1.0, 1.0, 300.0, 1.0), 1e10).is_err());
    }

    #[test]
    fn large_beta_tail_is_finite_or_zero() {
        let q = p(0.1, 0.13, 10.0, 1.0);
        assert_eq!(q.sf(50.0), 0.0);
        assert_eq!(q.cdf(50.0), 1.0);
        assert!(q.log_pdf(3.0).is_finite());
    }

    #[test]
    fn theta_above_one_is_supported() {
        let q = p(14.23, 1.0, 1.8, 0.43);
        let x = q.quantile(0.3);
        assert!((q.cdf(x) - 0.3).abs() < 1e-12);
        assert!(q.log_pdf(2.5).is_finite());
    }

    #[test]
    fn comparison_examples() {
        let w = ComparisonModel::weibull(1.0, 1.0).unwrap();
        assert!((comparison_cdf(&w, 1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert!((comparison_log_pdf(&w, 1.0).unwrap() + 1.0).abs() < 1e-15);

        let t = ComparisonModel::truncated_weibull(1.0, 1.0, 2.0).unwrap();
        assert_eq!(comparison_cdf(&t, 2.0).unwrap(), 1.0);
        assert_eq!(comparison_cdf(&t, 3.0).unwrap(), 1.0);
        assert_eq!(comparison_cdf(&t, -1.0).unwrap(), 0.0);
        assert!(comparison_log_pdf(&t, 2.5).is_err());

        let far = ComparisonModel::truncated_weibull(1.0, 1.0, 1e6).unwrap();
        assert!((comparison_log_pdf(&far, 1.0).unwrap() + 1.0).abs() < 1e-12);

        let e = ComparisonModel::exponentiated_weibull(1.0, 2.0).unwrap();
        let expect = (1.0 - (-1.0f64).exp()).powi(2);
        assert!((comparison_cdf(&e, 1.0).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.39958).abs() < 1e-5);
    }

    #[test]
    fn comparison_quantiles_invert_cdf() {
        let models = [
            ComparisonModel::weibull(1.7, 0.3).unwrap(),
            ComparisonModel::truncated_weibull(1.1, 0.08, 46.12).unwrap(),
            ComparisonModel::exponentiated_weibull(0.47, 6.42).unwrap(),
        ];
        for m in models {
            for u in [1e-6, 0.1, 0.5, 0.9, 0.999] {
                let x = m.quantile(u);
                assert!((m.cdf(x) - u).abs() < 1e-10, "{m:?} u={u}");
                assert!((m.cdf(x) + m.sf(x) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn array_conversion_validates() {
        let q = p(0.1, 0.13, 10.0, 1.0);
        let a: [f64; 4] = q.into();
        assert_eq!(a, [0.1, 0.13, 10.0, 1.0]);
        assert!(HewParams::try_from([1.0, 0.0, 1.0, 1.0]).is_err());
    }
}
