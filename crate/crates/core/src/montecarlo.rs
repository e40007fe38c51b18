//! Monte-Carlo comparison of estimators: repeated sampling from a known HEW
//! truth, estimation by each method, and RMSE/bias aggregation per sample
//! size.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bayes::{self, ChainConfig, PriorSet, Target};
use crate::distributions::{HewParams, PARAM_NAMES};
use crate::error::{HewError, Result};
use crate::estimation::{optimize, FitConfig, ObjectiveKind, OptimizerKind};
use crate::sampling::{sample_hew, Sample};

/// Share of failed fits above which a cell is flagged invalid.
pub const MAX_FAILURE_SHARE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StudyMethod {
    Frequentist(ObjectiveKind),
    Bayes,
}

impl StudyMethod {
    pub const ALL: [StudyMethod; 7] = [
        StudyMethod::Frequentist(ObjectiveKind::Mle),
        StudyMethod::Frequentist(ObjectiveKind::Ols),
        StudyMethod::Frequentist(ObjectiveKind::Wls),
        StudyMethod::Frequentist(ObjectiveKind::Mps),
        StudyMethod::Frequentist(ObjectiveKind::Ad),
        StudyMethod::Frequentist(ObjectiveKind::Cvm),
        StudyMethod::Bayes,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StudyMethod::Frequentist(k) => k.label(),
            StudyMethod::Bayes => "Bayes",
        }
    }
}

impl fmt::Display for StudyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for StudyMethod {
    type Err = HewError;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("bayes") {
            Ok(StudyMethod::Bayes)
        } else {
            s.parse().map(StudyMethod::Frequentist)
        }
    }
}

impl Serialize for StudyMethod {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for StudyMethod {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub truth: HewParams,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub methods: Vec<StudyMethod>,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub restarts: usize,
    /// Sampler settings for the Bayes method; its seed is replaced per
    /// replication.
    pub chain: ChainConfig,
}

impl StudyConfig {
    /// The simulation design of the reference study: truth
    /// (0.1, 0.13, 10, 1) at n = 25, 50, 100, 200.
    pub fn reference(methods: Vec<StudyMethod>, replications: usize, seed: u64) -> Self {
        Self {
            truth: HewParams::new(0.1, 0.13, 10.0, 1.0).expect("valid reference truth"),
            sample_sizes: vec![25, 50, 100, 200],
            replications,
            methods,
            seed,
            optimizer: OptimizerKind::NelderMead,
            restarts: 5,
            chain: ChainConfig {
                iterations: 12_000,
                burn_in: 2_000,
                thinning: 5,
                ..ChainConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(HewError::InvalidConfig("replications must be >= 2".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|n| *n < 10) {
            return Err(HewError::InvalidConfig(
                "sample sizes must be non-empty and each >= 10".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(HewError::InvalidConfig(
                "at least one method is required".into(),
            ));
        }
        if self.restarts < 1 {
            return Err(HewError::InvalidConfig("restarts must be >= 1".into()));
        }
        self.chain.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub method: StudyMethod,
    pub n: usize,
    /// Per parameter, ordered (θ, k, β, α).
    pub rmse: [f64; 4],
    pub bias: [f64; 4],
    pub successes: usize,
    pub failures: usize,
    /// More than [`MAX_FAILURE_SHARE`] of the fits failed.
    pub invalid: bool,
    pub mean_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub truth: HewParams,
    pub replications: usize,
    pub seed: u64,
    pub cells: Vec<CellReport>,
}

impl StudyReport {
    pub fn cell(&self, method: StudyMethod, n: usize) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.method == method && c.n == n)
    }

    /// Long-format CSV: method, n, parameter, rmse, bias.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "method,n,parameter,rmse,bias")?;
        for c in &self.cells {
            for (i, name) in PARAM_NAMES.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{name},{:.16e},{:.16e}",
                    c.method, c.n, c.rmse[i], c.bias[i]
                )?;
            }
        }
        Ok(())
    }
}

/// RMSE and bias of `estimates` around `truth`, per parameter.
pub fn rmse_bias(estimates: &[[f64; 4]], truth: [f64; 4]) -> ([f64; 4], [f64; 4]) {
    let m = estimates.len() as f64;
    let mut rmse = [f64::NAN; 4];
    let mut bias = [f64::NAN; 4];
    if estimates.is_empty() {
        return (rmse, bias);
    }
    for i in 0..4 {
        let err: Vec<f64> = estimates.iter().map(|e| e[i] - truth[i]).collect();
        bias[i] = err.iter().sum::<f64>() / m;
        rmse[i] = (err.iter().map(|d| d * d).sum::<f64>() / m).sqrt();
    }
    (rmse, bias)
}

/// Fits one replication with the library estimators. Bayes elicits priors
/// from the replication's own MLE and reports the posterior median.
pub fn default_estimate(
    cfg: &StudyConfig,
    method: StudyMethod,
    sample: &Sample,
    replication: usize,
) -> Result<HewParams> {
    let seed = cfg.seed.wrapping_add(replication as u64);
    let fit_cfg = |kind| FitConfig {
        optimizer: cfg.optimizer,
        restarts: cfg.restarts,
        seed,
        ..FitConfig::new(kind)
    };
    match method {
        StudyMethod::Frequentist(kind) => Ok(optimize(&fit_cfg(kind), sample)?.estimates),
        StudyMethod::Bayes => {
            let mle = optimize(&fit_cfg(ObjectiveKind::Mle), sample)?;
            let priors = PriorSet::from_fit(&mle)?;
            let chain_cfg = ChainConfig {
                seed,
                ..cfg.chain.clone()
            };
            let chain = bayes::mh_sample(
                &priors,
                Target::Data(sample),
                mle.estimates.to_array(),
                &chain_cfg,
            )?;
            bayes::posterior_median(&chain)
        }
    }
}

pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    run_study_with(cfg, |method, sample, rep| {
        default_estimate(cfg, method, sample, rep)
    })
}

/// Runs the study with a caller-supplied estimator. Replication `r` uses the
/// sample drawn with seed `cfg.seed + r`, shared by all methods.
pub fn run_study_with<E>(cfg: &StudyConfig, estimator: E) -> Result<StudyReport>
where
    E: Fn(StudyMethod, &Sample, usize) -> Result<HewParams> + Sync,
{
    cfg.validate()?;
    let truth = cfg.truth.to_array();
    let mut cells = Vec::new();
    for &method in &cfg.methods {
        for &n in &cfg.sample_sizes {
            let outcomes: Vec<(Option<[f64; 4]>, f64)> = (0..cfg.replications)
                .into_par_iter()
                .map(|r| {
                    let start = Instant::now();
                    let est = sample_hew(&cfg.truth, n, cfg.seed.wrapping_add(r as u64))
                        .and_then(|s| estimator(method, &s, r))
                        .ok()
                        .map(|p| p.to_array());
                    (est, start.elapsed().as_secs_f64())
                })
                .collect();
            let estimates: Vec<[f64; 4]> = outcomes.iter().filter_map(|o| o.0).collect();
            let failures = cfg.replications - estimates.len();
            let (rmse, bias) = rmse_bias(&estimates, truth);
            cells.push(CellReport {
                method,
                n,
                rmse,
                bias,
                successes: estimates.len(),
                failures,
                invalid: failures as f64 > MAX_FAILURE_SHARE * cfg.replications as f64,
                mean_seconds: outcomes.iter().map(|o| o.1).sum::<f64>() / cfg.replications as f64,
            });
        }
    }
    Ok(StudyReport {
        truth: cfg.truth,
        replications: cfg.replications,
        seed: cfg.seed,
        cells,
    })
}
