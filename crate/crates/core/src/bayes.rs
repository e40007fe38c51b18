//! Bayesian HEW inference: independent Gamma priors, a random-walk
//! Metropolis–Hastings sampler, posterior medians and empirical HPD
//! intervals.

use std::io::Write;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::distributions::{HewParams, LifetimeModel, PARAM_NAMES};
use crate::error::{HewError, Result};
use crate::estimation::{FitResult, Interval};
use crate::sampling::{open_uniform, rng_from_seed};

/// Fewest retained draws accepted by the posterior summaries.
pub const MIN_DRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrior {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        for (name, v) in [("shape", shape), ("rate", rate)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(HewError::InvalidParameter {
                    name,
                    value: v,
                    reason: "must be finite and > 0",
                });
            }
        }
        Ok(Self { shape, rate })
    }

    pub fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    pub fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }

    /// Normalised log-density; `-inf` outside `(0, ∞)`.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.shape * self.rate.ln() - ln_gamma(self.shape) + (self.shape - 1.0) * x.ln()
            - self.rate * x
    }
}

/// Moment-matched Gamma prior with the given mean and standard deviation.
pub fn elicit_gamma(mean: f64, sd: f64) -> Result<GammaPrior> {
    if !(mean > 0.0 && sd > 0.0) {
        return Err(HewError::Domain(format!(
            "prior mean and sd must be > 0, got ({mean}, {sd})"
        )));
    }
    let var = sd * sd;
    GammaPrior::new(mean * mean / var, mean / var)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorSet {
    pub theta: GammaPrior,
    pub k: GammaPrior,
    pub beta: GammaPrior,
    pub alpha: GammaPrior,
}

impl PriorSet {
    pub fn from_array(p: [GammaPrior; 4]) -> Self {
        Self {
            theta: p[0],
            k: p[1],
            beta: p[2],
            alpha: p[3],
        }
    }

    pub fn to_array(&self) -> [GammaPrior; 4] {
        [self.theta, self.k, self.beta, self.alpha]
    }

    pub fn means(&self) -> [f64; 4] {
        self.to_array().map(|g| g.mean())
    }

    /// Priors centred on a fit's estimates with its standard errors as
    /// spreads. Needs a fit that carries standard errors.
    pub fn from_fit(fit: &FitResult) -> Result<Self> {
        let se = fit.std_errors.ok_or_else(|| {
            HewError::EstimationFailed(
                "the fit has no standard errors to elicit priors from; pass explicit priors".into(),
            )
        })?;
        let est = fit.estimates.to_array();
        let mut out = [GammaPrior {
            shape: 1.0,
            rate: 1.0,
        }; 4];
        for i in 0..4 {
            out[i] = elicit_gamma(est[i], se[i]).map_err(|_| {
                HewError::EstimationFailed(format!(
                    "cannot elicit a prior for {} from estimate {} with se {}; pass explicit priors",
                    PARAM_NAMES[i], est[i], se[i]
                ))
            })?;
        }
        Ok(Self::from_array(out))
    }

    pub fn ln_density(&self, p: &[f64; 4]) -> f64 {
        self.to_array()
            .iter()
            .zip(p)
            .map(|(g, &v)| g.ln_pdf(v))
            .sum()
    }
}

/// What the sampler targets: the posterior given data, or the prior alone.
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Data(&'a [f64]),
    PriorOnly,
}

/// Unnormalised log-posterior at the raw vector `(θ, k, β, α)`; `-inf` when
/// any component is non-positive or the value is not finite.
pub fn log_posterior(p: &[f64; 4], priors: &PriorSet, target: Target<'_>) -> f64 {
    if p.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return f64::NEG_INFINITY;
    }
    let prior = priors.ln_density(p);
    let v = match target {
        Target::PriorOnly => prior,
        Target::Data(xs) => match HewParams::from_array(*p) {
            Ok(hp) => prior - hp.neg_log_likelihood(xs),
            Err(_) => f64::NEG_INFINITY,
        },
    };
    if v.is_finite() {
        v
    } else {
        f64::NEG_INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    /// Standard deviations of the Gaussian increments, per parameter.
    pub proposal_scale: [f64; 4],
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 50_000,
            burn_in: 10_000,
            thinning: 5,
            seed: 0,
            proposal_scale: [0.1; 4],
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations <= self.burn_in {
            return Err(HewError::InvalidConfig(format!(
                "iterations ({}) must exceed burn-in ({})",
                self.iterations, self.burn_in
            )));
        }
        if self.thinning == 0 {
            return Err(HewError::InvalidConfig("thinning must be >= 1".into()));
        }
        if self
            .proposal_scale
            .iter()
            .any(|s| !(*s > 0.0 && s.is_finite()))
        {
            return Err(HewError::InvalidConfig(
                "proposal scales must be > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chain {
    pub draws: Vec<HewParams>,
    /// 1-based iteration at which each retained draw was recorded.
    pub iterations: Vec<usize>,
    /// Whether the proposal at that iteration was accepted.
    pub accepted_flags: Vec<bool>,
    pub accepted: usize,
    pub proposed: usize,
    /// Acceptance rate over the post-burn-in iterations.
    pub post_burn_in_acceptance: f64,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    pub proposal_scale: [f64; 4],
    pub warning: Option<String>,
}

impl Chain {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    /// Retained values of one parameter (0 = θ, 1 = k, 2 = β, 3 = α).
    pub fn component(&self, index: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d.to_array()[index]).collect()
    }

    /// Writes the trace as CSV: iteration, the four parameters, accepted flag.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iteration,theta,k,beta,alpha,accepted")?;
        for ((d, it), acc) in self
            .draws
            .iter()
            .zip(&self.iterations)
            .zip(&self.accepted_flags)
        {
            let [t, k, b, a] = d.to_array();
            writeln!(
                out,
                "{it},{t:.16e},{k:.16e},{b:.16e},{a:.16e},{}",
                u8::from(*acc)
            )?;
        }
        Ok(())
    }
}

/// Random-walk Metropolis–Hastings from `initial`. Proposals with any
/// non-positive component are rejected without evaluating the target.
pub fn mh_sample(
    priors: &PriorSet,
    target: Target<'_>,
    initial: [f64; 4],
    cfg: &ChainConfig,
) -> Result<Chain> {
    cfg.validate()?;
    let mut current = initial;
    let mut current_lp = log_posterior(&current, priors, target);
    if !current_lp.is_finite() {
        return Err(HewError::Domain(format!(
            "log-posterior is not finite at the initial state {initial:?}"
        )));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let retained = (cfg.iterations - cfg.burn_in) / cfg.thinning;
    let mut draws = Vec::with_capacity(retained);
    let mut iterations = Vec::with_capacity(retained);
    let mut flags = Vec::with_capacity(retained);
    let mut accepted = 0;
    let mut accepted_after_burn_in = 0;

    for t in 1..=cfg.iterations {
        let mut proposal = current;
        for (p, s) in proposal.iter_mut().zip(&cfg.proposal_scale) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *p += s * z;
        }
        let u = open_uniform(&mut rng);
        let mut accept = false;
        if proposal.iter().all(|v| *v > 0.0) {
            let lp = log_posterior(&proposal, priors, target);
            if lp.is_finite() && u.ln() < lp - current_lp {
                accept = true;
                current = proposal;
                current_lp = lp;
            }
        }
        if accept {
            accepted += 1;
            if t > cfg.burn_in {
                accepted_after_burn_in += 1;
            }
        }
        if t > cfg.burn_in && (t - cfg.burn_in) % cfg.thinning == 0 {
            draws.push(HewParams::from_array(current)?);
            iterations.push(t);
            flags.push(accept);
        }
    }

    let post_rate = accepted_after_burn_in as f64 / (cfg.iterations - cfg.burn_in) as f64;
    let warning = (!(0.01..=0.99).contains(&post_rate)).then(|| {
        format!(
            "post-burn-in acceptance rate {post_rate:.4} is outside [0.01, 0.99]; adjust the proposal scale"
        )
    });
    Ok(Chain {
        draws,
        iterations,
        accepted_flags: flags,
        accepted,
        proposed: cfg.iterations,
        post_burn_in_acceptance: post_rate,
        burn_in: cfg.burn_in,
        thinning: cfg.thinning,
        seed: cfg.seed,
        proposal_scale: cfg.proposal_scale,
        warning,
    })
}

fn require_draws(n: usize) -> Result<()> {
    if n < MIN_DRAWS {
        return Err(HewError::ChainTooShort {
            retained: n,
            required: MIN_DRAWS,
        });
    }
    Ok(())
}

/// Median of a slice; the mean of the two central values for even lengths.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Componentwise median of the retained draws, the Bayes estimate under
/// absolute-error loss.
pub fn posterior_median(chain: &Chain) -> Result<HewParams> {
    require_draws(chain.draws.len())?;
    posterior_median_of(&chain.draws)
}

pub(crate) fn posterior_median_of(draws: &[HewParams]) -> Result<HewParams> {
    let mut out = [0.0; 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = median(&draws.iter().map(|d| d.to_array()[i]).collect::<Vec<_>>());
    }
    HewParams::from_array(out)
}

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(HewError::Domain(format!(
            "level must be in (0, 1), got {level}"
        )));
    }
    Ok(())
}

fn sorted_window(draws: &[f64], level: f64) -> Result<(Vec<f64>, usize)> {
    check_level(level)?;
    require_draws(draws.len())?;
    let mut v = draws.to_vec();
    v.sort_by(f64::total_cmp);
    let m = ((level * v.len() as f64).ceil() as usize).clamp(1, v.len());
    Ok((v, m))
}

/// Shortest window of `ceil(level·N)` consecutive sorted draws; the leftmost
/// one wins ties.
pub fn empirical_hpd(draws: &[f64], level: f64) -> Result<Interval> {
    let (v, m) = sorted_window(draws, level)?;
    let mut best = 0;
    for j in 1..=v.len() - m {
        if v[j + m - 1] - v[j] < v[best + m - 1] - v[best] {
            best = j;
        }
    }
    Ok(Interval {
        lower: v[best],
        upper: v[best + m - 1],
    })
}

/// Equal-tailed interval with the same number of draws as
/// [`empirical_hpd`]: the window leaving equal counts on either side.
pub fn equal_tailed(draws: &[f64], level: f64) -> Result<Interval> {
    let (v, m) = sorted_window(draws, level)?;
    let j = (v.len() - m) / 2;
    Ok(Interval {
        lower: v[j],
        upper: v[j + m - 1],
    })
}

/// Batch-means Monte-Carlo standard error of the mean of a correlated series.
pub fn batch_means_se(values: &[f64]) -> f64 {
    let n = values.len();
    let size = (n as f64).sqrt().floor().max(1.0) as usize;
    let batches = n / size;
    if batches < 2 {
        return f64::NAN;
    }
    let means: Vec<f64> = (0..batches)
        .map(|b| values[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (var / batches as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub median: HewParams,
    pub level: f64,
    pub hpd: [Interval; 4],
    pub equal_tailed: [Interval; 4],
    pub acceptance_rate: f64,
    pub retained_draws: usize,
    pub warning: Option<String>,
}

pub fn summarize(chain: &Chain, level: f64) -> Result<PosteriorSummary> {
    let median = posterior_median(chain)?;
    let mut hpd = [Interval {
        lower: 0.0,
        upper: 0.0,
    }; 4];
    let mut et = hpd;
    for i in 0..4 {
        let c = chain.component(i);
        hpd[i] = empirical_hpd(&c, level)?;
        et[i] = equal_tailed(&c, level)?;
    }
    Ok(PosteriorSummary {
        median,
        level,
        hpd,
        equal_tailed: et,
        acceptance_rate: chain.acceptance_rate(),
        retained_draws: chain.draws.len(),
        warning: chain.warning.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma(shape: f64, rate: f64) -> GammaPrior {
        GammaPrior::new(shape, rate).unwrap()
    }

    #[test]
    fn elicitation_examples() {
        let g = elicit_gamma(2.0, 1.0).unwrap();
        assert!((g.shape - 4.0).abs() < 1e-12 && (g.rate - 2.0).abs() < 1e-12);
        let g = elicit_gamma(1.0, 1.0).unwrap();
        assert_eq!((g.shape, g.rate), (1.0, 1.0));
        let g = elicit_gamma(8.46, 0.9056).unwrap();
        assert!((g.shape - 87.27).abs() < 0.05, "{}", g.shape);
        assert!((g.rate - 10.32).abs() < 0.01, "{}", g.rate);
        assert!((g.mean() - 8.46).abs() < 1e-12);
        assert!((g.variance().sqrt() - 0.9056).abs() < 1e-12);
        assert!(elicit_gamma(0.0, 1.0).is_err());
        assert!(elicit_gamma(1.0, -1.0).is_err());
    }

    #[test]
    fn log_posterior_term_by_term() {
        let priors = PriorSet::from_array([gamma(1.0, 1.0); 4]);
        // Gamma(1,1) has ln density −x; Exp(1) log-likelihood of {1,2} is −3.
        let lp = log_posterior(&[1.0; 4], &priors, Target::Data(&[1.0, 2.0]));
        assert!((lp - (-7.0)).abs() < 1e-12, "{lp}");
        assert_eq!(
            log_posterior(&[1.0, 0.0, 1.0, 1.0], &priors, Target::Data(&[1.0])),
            f64::NEG_INFINITY
        );
        assert_eq!(
            log_posterior(&[-1.0, 1.0, 1.0, 1.0], &priors, Target::PriorOnly),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn flat_priors_leave_likelihood_differences() {
        let priors = PriorSet::from_array([gamma(1.0, 1e-6); 4]);
        let xs = [0.5, 1.2, 2.0, 3.1];
        let a = [1.0, 1.0, 1.0, 1.0];
        let b = [1.3, 0.8, 1.2, 0.7];
        let dl = log_posterior(&a, &priors, Target::Data(&xs))
            - log_posterior(&b, &priors, Target::Data(&xs));
        let ll = |p: [f64; 4]| -HewParams::from_array(p).unwrap().neg_log_likelihood(&xs);
        // the residual prior contribution is 1e-6·Σ(b−a)
        assert!((dl - (ll(a) - ll(b))).abs() < 1e-8);
    }

    #[test]
    fn median_examples() {
        let d: Vec<HewParams> = [1.0, 3.0, 2.0]
            .iter()
            .map(|v| HewParams::new(*v, *v, *v, *v).unwrap())
            .collect();
        assert_eq!(posterior_median_of(&d).unwrap().to_array(), [2.0; 4]);
        assert_eq!(median(&[1.0, 2.0, 3.0, 10.0]), 2.5);
    }

    #[test]
    fn hpd_tie_break_is_leftmost() {
        let draws: Vec<f64> = (1..=100).map(f64::from).collect();
        let h = empirical_hpd(&draws, 0.95).unwrap();
        assert_eq!((h.lower, h.upper), (1.0, 95.0));
        assert!(empirical_hpd(&draws, 1.0).is_err());
        assert!(empirical_hpd(&draws[..50], 0.9).is_err());
    }

    #[test]
    fn chain_bookkeeping() {
        let priors = PriorSet::from_array([gamma(4.0, 2.0); 4]);
        let cfg = ChainConfig {
            iterations: 2_003,
            burn_in: 500,
            thinning: 3,
            seed: 5,
            proposal_scale: [0.5; 4],
        };
        let c = mh_sample(&priors, Target::PriorOnly, [2.0; 4], &cfg).unwrap();
        assert_eq!(c.draws.len(), (2_003 - 500) / 3);
        assert_eq!(c.proposed, 2_003);
        assert!(c.accepted <= c.proposed);
        assert_eq!(c.acceptance_rate(), c.accepted as f64 / c.proposed as f64);
        assert_eq!(c.iterations[0], 503);
        assert!(c.warning.is_none());
        let again = mh_sample(&priors, Target::PriorOnly, [2.0; 4], &cfg).unwrap();
        assert_eq!(c, again);

        let mut csv = Vec::new();
        c.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert_eq!(text.lines().count(), c.draws.len() + 1);
        assert!(text.starts_with("iteration,theta,k,beta,alpha,accepted\n503,"));
    }

    #[test]
    fn stuck_chain_is_flagged() {
        let priors = PriorSet::from_array([gamma(4.0, 2.0); 4]);
        let cfg = ChainConfig {
            iterations: 1_000,
            burn_in: 100,
            thinning: 1,
            seed: 1,
            proposal_scale: [1e3; 4],
        };
        let c = mh_sample(&priors, Target::PriorOnly, [2.0; 4], &cfg).unwrap();
        assert!(c.warning.is_some());
    }

    #[test]
    fn invalid_chain_configs() {
        let priors = PriorSet::from_array([gamma(4.0, 2.0); 4]);
        let bad = ChainConfig {
            iterations: 10,
            burn_in: 10,
            ..Default::default()
        };
        assert!(mh_sample(&priors, Target::PriorOnly, [2.0; 4], &bad).is_err());
        let bad = ChainConfig {
            proposal_scale: [0.1, 0.0, 0.1, 0.1],
            ..Default::default()
        };
        assert!(mh_sample(&priors, Target::PriorOnly, [2.0; 4], &bad).is_err());
        assert!(mh_sample(
            &priors,
            Target::PriorOnly,
            [0.0; 4],
            &ChainConfig::default()
        )
        .is_err());
    }
}
