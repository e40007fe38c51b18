//! Goodness-of-fit statistics (KS, AD, CvM), their p-values and
//! information criteria for any fitted lifetime model.
//!
//! Two p-value methods are offered. `Asymptotic` uses the limiting null
//! distributions for a fully specified model, which is anti-conservative
//! when parameters were estimated from the same data. `Bootstrap` is a
//! parametric bootstrap that refits the model on every replicate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{ComparisonModel, HewParams, LifetimeModel};
use crate::error::{HewError, Result};
use crate::estimation::objectives::{
    ad_from_values, cdf_values, cvm_from_values, ks_from_values, sf_values,
};
use crate::estimation::{self, refit_comparison, FitConfig, ObjectiveKind, Start};
use crate::sampling::sample_model;

pub use crate::estimation::information_criteria;

/// Default number of bootstrap replicates.
pub const DEFAULT_REPLICATES: usize = 999;

/// Kolmogorov–Smirnov distance from ordered model cdf values.
pub fn ks_statistic(cdf_values: &[f64]) -> f64 {
    ks_from_values(cdf_values)
}

/// Anderson–Darling statistic; identical to the estimation objective.
pub fn ad_statistic<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> f64 {
    estimation::ad_objective(model, xs)
}

/// Cramér–von Mises statistic; identical to the estimation objective.
pub fn cvm_statistic<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> f64 {
    estimation::cvm_objective(model, xs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Ks,
    Ad,
    Cvm,
}

impl Statistic {
    pub const ALL: [Statistic; 3] = [Statistic::Ks, Statistic::Ad, Statistic::Cvm];
}

/// All three statistics `[KS, AD, CvM]` from one pass over the cdf.
pub fn statistics<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> [f64; 3] {
    let cdf = cdf_values(model, xs);
    let sf = sf_values(model, xs);
    [
        ks_from_values(&cdf),
        ad_from_values(&cdf, &sf).0,
        cvm_from_values(&cdf),
    ]
}

fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series, fast for small λ
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|j| (-((2 * j - 1) as f64).powi(2) * c).exp())
            .sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Asymptotic KS p-value with Stephens' small-sample scaling of `D`.
pub fn ks_pvalue_asymptotic(d: f64, n: usize) -> f64 {
    let rn = (n as f64).sqrt();
    kolmogorov_sf((rn + 0.12 + 0.11 / rn) * d)
}

/// Limiting cdf of the Anderson–Darling statistic (Marsaglia & Marsaglia
/// 2004 approximation).
pub fn ad_limiting_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    if z < 2.0 {
        (-1.2337141 / z).exp() / z.sqrt()
            * (2.00012
                + (0.247105 - (0.0649821 - (0.0347962 - (0.011672 - 0.00168691 * z) * z) * z) * z)
                    * z)
    } else {
        (-(1.0776
            - (2.30695 - (0.43424 - (0.082433 - (0.008056 - 0.0003146 * z) * z) * z) * z) * z)
            .exp())
        .exp()
    }
}

pub fn ad_pvalue_asymptotic(a: f64) -> f64 {
    (1.0 - ad_limiting_cdf(a)).clamp(0.0, 1.0)
}

/// Modified Bessel function K_{1/4}(z) by trapezoidal quadrature of
/// `∫₀^∞ exp(−z cosh t) cosh(t/4) dt`, which converges geometrically for
/// this analytic integrand.
fn bessel_k_quarter(z: f64) -> f64 {
    let upper = (1.0 + 745.0 / z).acosh().min(50.0);
    let h = 0.02;
    let steps = (upper / h).ceil() as usize;
    let f = |t: f64| (-z * t.cosh()).exp() * (0.25 * t).cosh();
    let mut acc = 0.5 * f(0.0);
    for i in 1..=steps {
        acc += f(i as f64 * h);
    }
    acc * h
}

/// Limiting cdf of the Cramér–von Mises statistic (Anderson & Darling
/// 1952 series).
pub fn cvm_limiting_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut total = 0.0;
    // Γ(j + 1/2) / (Γ(1/2) j!), updated recursively
    let mut coef = 1.0;
    for j in 0..200 {
        if j > 0 {
            coef *= (j as f64 - 0.5) / j as f64;
        }
        let m = (4 * j + 1) as f64;
        let z = m * m / (16.0 * x);
        if z > 700.0 {
            break;
        }
        let term = coef * m.sqrt() * (-z).exp() * bessel_k_quarter(z);
        total += term;
        if term < 1e-17 * total.max(1e-300) {
            break;
        }
    }
    (total / (std::f64::consts::PI * x.sqrt())).clamp(0.0, 1.0)
}

pub fn cvm_pvalue_asymptotic(w: f64) -> f64 {
    (1.0 - cvm_limiting_cdf(w)).clamp(0.0, 1.0)
}

/// Any model that can be reported on: HEW or a comparison family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FittedModel {
    Hew { params: HewParams },
    Comparison { model: ComparisonModel },
}

impl LifetimeModel for FittedModel {
    fn log_pdf(&self, x: f64) -> f64 {
        match self {
            FittedModel::Hew { params } => params.log_pdf(x),
            FittedModel::Comparison { model } => model.log_pdf(x),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        match self {
            FittedModel::Hew { params } => params.cdf(x),
            FittedModel::Comparison { model } => model.cdf(x),
        }
    }

    fn sf(&self, x: f64) -> f64 {
        match self {
            FittedModel::Hew { params } => params.sf(x),
            FittedModel::Comparison { model } => model.sf(x),
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        match self {
            FittedModel::Hew { params } => params.quantile(u),
            FittedModel::Comparison { model } => model.quantile(u),
        }
    }

    fn n_params(&self) -> usize {
        match self {
            FittedModel::Hew { params } => params.n_params(),
            FittedModel::Comparison { model } => model.n_params(),
        }
    }

    fn neg_log_likelihood(&self, xs: &[f64]) -> f64 {
        match self {
            FittedModel::Hew { params } => params.neg_log_likelihood(xs),
            FittedModel::Comparison { model } => model.neg_log_likelihood(xs),
        }
    }
}

impl FittedModel {
    /// Maximum-likelihood refit on `xs`, started from the current parameters.
    pub fn refit(&self, xs: &[f64]) -> Result<FittedModel> {
        match self {
            FittedModel::Hew { params } => {
                let cfg = FitConfig {
                    start: Start::Given(*params),
                    restarts: 1,
                    tolerance: 1e-6,
                    ..FitConfig::new(ObjectiveKind::Mle)
                };
                let fit = estimation::optimize(&cfg, xs)?;
                Ok(FittedModel::Hew {
                    params: fit.estimates,
                })
            }
            FittedModel::Comparison { model } => Ok(FittedModel::Comparison {
                model: refit_comparison(model, xs)?,
            }),
        }
    }
}

/// `(1 + #{T_b ≥ T_obs}) / (B + 1)` over the replicate statistics.
pub fn pvalue_from_replicates(observed: f64, replicates: &[f64]) -> f64 {
    let exceed = replicates.iter().filter(|t| **t >= observed).count();
    (1 + exceed) as f64 / (replicates.len() + 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub seed: u64,
    /// Re-estimate the model on every replicate. Without refitting the test
    /// is for a fully specified model.
    pub refit: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            seed: 0,
            refit: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOutcome {
    /// p-values ordered `[KS, AD, CvM]`.
    pub p_values: [f64; 3],
    pub replicates: usize,
    pub failures: usize,
}

/// Parametric-bootstrap p-values for all three statistics. Replicate `b`
/// draws `n` values from `model` with seed `seed + b`. Failed refits are
/// dropped; more than 10% failures is an error.
pub fn bootstrap_pvalues(
    model: &FittedModel,
    xs: &[f64],
    cfg: &BootstrapConfig,
) -> Result<BootstrapOutcome> {
    if cfg.replicates < 99 {
        return Err(HewError::InvalidConfig(format!(
            "bootstrap needs at least 99 replicates, got {}",
            cfg.replicates
        )));
    }
    let observed = statistics(model, xs);
    let n = xs.len();
    let reps: Vec<Option<[f64; 3]>> = (0..cfg.replicates as u64)
        .into_par_iter()
        .map(|b| {
            let sample = sample_model(model, n, cfg.seed.wrapping_add(b)).ok()?;
            let fitted = if cfg.refit {
                model.refit(&sample).ok()?
            } else {
                *model
            };
            let t = statistics(&fitted, &sample);
            t.iter().all(|v| v.is_finite()).then_some(t)
        })
        .collect();
    let ok: Vec<[f64; 3]> = reps.into_iter().flatten().collect();
    let failures = cfg.replicates - ok.len();
    if failures * 10 > cfg.replicates {
        return Err(HewError::BootstrapFailed {
            failed: failures,
            total: cfg.replicates,
        });
    }
    let mut p_values = [0.0; 3];
    for (s, p) in p_values.iter_mut().enumerate() {
        let column: Vec<f64> = ok.iter().map(|t| t[s]).collect();
        *p = pvalue_from_replicates(observed[s], &column);
    }
    Ok(BootstrapOutcome {
        p_values,
        replicates: cfg.replicates,
        failures,
    })
}

/// Bootstrap p-value of a single statistic.
pub fn bootstrap_pvalue(
    model: &FittedModel,
    xs: &[f64],
    statistic: Statistic,
    cfg: &BootstrapConfig,
) -> Result<f64> {
    let out = bootstrap_pvalues(model, xs, cfg)?;
    Ok(out.p_values[statistic as usize])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum PValueMethod {
    Asymptotic,
    Bootstrap { replicates: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub ks: TestResult,
    pub ad: TestResult,
    pub cvm: TestResult,
    pub loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub p_value_method: PValueMethod,
    /// Bootstrap replicates that failed and were dropped.
    pub bootstrap_failures: usize,
}

/// Statistics, p-values and information criteria of `model` on sorted `xs`.
pub fn gof_report(
    model: &FittedModel,
    xs: &[f64],
    method: PValueMethod,
    seed: u64,
) -> Result<GofReport> {
    let n = xs.len();
    let [ks, ad, cvm] = statistics(model, xs);
    let (p_values, failures) = match method {
        PValueMethod::Asymptotic => (
            [
                ks_pvalue_asymptotic(ks, n),
                ad_pvalue_asymptotic(ad),
                cvm_pvalue_asymptotic(cvm),
            ],
            0,
        ),
        PValueMethod::Bootstrap { replicates } => {
            let out = bootstrap_pvalues(
                model,
                xs,
                &BootstrapConfig {
                    replicates,
                    seed,
                    refit: true,
                },
            )?;
            (out.p_values, out.failures)
        }
    };
    let loglik = -model.neg_log_likelihood(xs);
    let (aic, bic) = information_criteria(loglik, model.n_params(), n);
    Ok(GofReport {
        ks: TestResult {
            statistic: ks,
            p_value: p_values[0],
        },
        ad: TestResult {
            statistic: ad,
            p_value: p_values[1],
        },
        cvm: TestResult {
            statistic: cvm,
            p_value: p_values[2],
        },
        loglik,
        aic,
        bic,
        p_value_method: method,
        bootstrap_failures: failures,
    })
}
