//! The JSON result document and its building blocks.
//!
//! Everything that depends on the machine (thread count, wall-clock time)
//! lives under `runtime`; the rest is a pure function of the inputs and the
//! seed. Non-finite numbers serialise as `null`.

use std::collections::BTreeMap;

use hew_core::bayes::{Chain, GammaPrior, PosteriorSummary, PriorSet};
use hew_core::estimation::{FitDiagnostics, FitResult, Interval, CI_LEVEL};
use hew_core::gof::GofReport;
use hew_core::montecarlo::StudyReport;
use hew_core::{ComparisonModel, HewParams, PARAM_NAMES};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1.0.0";

pub type Named<T> = BTreeMap<&'static str, T>;

pub fn named_params(p: &HewParams) -> Named<f64> {
    named(p.to_array())
}

pub fn named<T: Copy>(values: [T; 4]) -> Named<T> {
    PARAM_NAMES.iter().copied().zip(values).collect()
}

pub fn comparison_params(m: &ComparisonModel) -> Named<f64> {
    match *m {
        ComparisonModel::Weibull { beta, alpha } => [("beta", beta), ("alpha", alpha)].into(),
        ComparisonModel::TruncatedWeibull { beta, alpha, gamma } => {
            [("beta", beta), ("alpha", alpha), ("gamma", gamma)].into()
        }
        ComparisonModel::ExponentiatedWeibull { theta, alpha } => {
            [("theta", theta), ("alpha", alpha)].into()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultDocument {
    pub schema_version: &'static str,
    pub command: CommandEcho,
    pub seed: u64,
    pub data: Option<DataSummary>,
    pub fits: Vec<ModelReport>,
    pub posterior: Option<PosteriorReport>,
    pub study: Option<StudyOutput>,
    pub runtime: Runtime,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: &'static str,
    pub options: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct DataSummary {
    pub source: String,
    pub n: usize,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Runtime {
    pub threads: usize,
    pub elapsed_seconds: f64,
    /// Wall-clock seconds of individual steps, keyed by step name.
    pub steps: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Ok,
    Failed,
}

/// One fitted model: HEW or a comparison family.
#[derive(Debug, Clone, Serialize)]
pub struct ModelReport {
    pub model: &'static str,
    pub method: &'static str,
    pub status: FitStatus,
    pub error: Option<String>,
    pub n_params: usize,
    pub parameters: Option<Named<f64>>,
    pub std_errors: Option<Named<f64>>,
    pub ci_level: Option<f64>,
    pub ci: Option<Named<Interval>>,
    pub loglik: Option<f64>,
    pub aic: Option<f64>,
    pub bic: Option<f64>,
    pub objective_value: Option<f64>,
    pub converged: Option<bool>,
    pub diagnostics: Option<FitDiagnostics>,
    pub gof: Option<GofReport>,
}

impl ModelReport {
    pub fn failed(
        model: &'static str,
        method: &'static str,
        n_params: usize,
        error: String,
    ) -> Self {
        Self {
            model,
            method,
            status: FitStatus::Failed,
            error: Some(error),
            n_params,
            parameters: None,
            std_errors: None,
            ci_level: None,
            ci: None,
            loglik: None,
            aic: None,
            bic: None,
            objective_value: None,
            converged: None,
            diagnostics: None,
            gof: None,
        }
    }

    pub fn hew(fit: &FitResult, gof: Option<GofReport>) -> Self {
        Self {
            model: "HEW",
            method: fit.method.label(),
            status: FitStatus::Ok,
            error: None,
            n_params: 4,
            parameters: Some(named_params(&fit.estimates)),
            std_errors: fit.std_errors.map(named),
            ci_level: fit.ci.map(|_| CI_LEVEL),
            ci: fit.ci.map(named),
            loglik: Some(fit.loglik),
            aic: Some(fit.aic),
            bic: Some(fit.bic),
            objective_value: Some(fit.objective_value),
            converged: Some(fit.converged),
            diagnostics: Some(fit.diagnostics.clone()),
            gof,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PriorOutput {
    pub source: &'static str,
    pub gammas: Named<GammaPrior>,
}

impl PriorOutput {
    pub fn new(source: &'static str, priors: &PriorSet) -> Self {
        Self {
            source,
            gammas: named(priors.to_array()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainOutput {
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub proposal_scale: Named<f64>,
    pub initial_state: Named<f64>,
    pub accepted: usize,
    pub proposed: usize,
    pub acceptance_rate: f64,
    pub post_burn_in_acceptance: f64,
    pub retained_draws: usize,
    pub warning: Option<String>,
}

impl ChainOutput {
    pub fn new(chain: &Chain, iterations: usize, initial: [f64; 4]) -> Self {
        Self {
            iterations,
            burn_in: chain.burn_in,
            thinning: chain.thinning,
            proposal_scale: named(chain.proposal_scale),
            initial_state: named(initial),
            accepted: chain.accepted,
            proposed: chain.proposed,
            acceptance_rate: chain.acceptance_rate(),
            post_burn_in_acceptance: chain.post_burn_in_acceptance,
            retained_draws: chain.draws.len(),
            warning: chain.warning.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PosteriorReport {
    pub priors: PriorOutput,
    pub chain: ChainOutput,
    pub level: f64,
    pub median: Named<f64>,
    pub hpd: Named<Interval>,
    pub equal_tailed: Named<Interval>,
}

impl PosteriorReport {
    pub fn new(priors: PriorOutput, chain: ChainOutput, summary: &PosteriorSummary) -> Self {
        Self {
            priors,
            chain,
            level: summary.level,
            median: named_params(&summary.median),
            hpd: named(summary.hpd),
            equal_tailed: named(summary.equal_tailed),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellOutput {
    pub method: String,
    pub n: usize,
    pub successes: usize,
    pub failures: usize,
    pub invalid: bool,
    pub rmse: Named<f64>,
    pub bias: Named<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyOutput {
    pub truth: Named<f64>,
    pub replications: usize,
    pub sample_sizes: Vec<usize>,
    pub methods: Vec<String>,
    pub cells: Vec<CellOutput>,
}

impl StudyOutput {
    pub fn new(report: &StudyReport, sample_sizes: &[usize], methods: Vec<String>) -> Self {
        Self {
            truth: named_params(&report.truth),
            replications: report.replications,
            sample_sizes: sample_sizes.to_vec(),
            methods,
            cells: report
                .cells
                .iter()
                .map(|c| CellOutput {
                    method: c.method.to_string(),
                    n: c.n,
                    successes: c.successes,
                    failures: c.failures,
                    invalid: c.invalid,
                    rmse: named(c.rmse),
                    bias: named(c.bias),
                })
                .collect(),
        }
    }
}
