//! Objective functions over a sorted sample.
//!
//! Every function takes the observations as an ascending slice. Values are
//! returned in their natural orientation (log-likelihood and MPS are to be
//! maximised, the rest minimised); [`super::ObjectiveKind::loss`] turns them
//! into a minimisation target.

use crate::distributions::LifetimeModel;
use crate::error::{HewError, Result};

/// Clamp applied to cdf/sf values inside the Anderson–Darling logs.
pub const AD_EPSILON: f64 = 1e-15;

/// `-ln L`, `+inf` when not finite.
pub fn neg_log_likelihood<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> f64 {
    model.neg_log_likelihood(xs)
}

/// Mean and variance of `F(x_{i:n})`: `i/(n+1)` and `i(n−i+1)/((n+1)²(n+2))`.
pub fn plotting_moments(i: usize, n: usize) -> Result<(f64, f64)> {
    if i == 0 || i > n {
        return Err(HewError::Domain(format!("rank {i} outside 1..={n}")));
    }
    let (i, n) = (i as f64, n as f64);
    let mean = i / (n + 1.0);
    let variance = i * (n - i + 1.0) / ((n + 1.0) * (n + 1.0) * (n + 2.0));
    Ok((mean, variance))
}

/// WLS weight `(n+1)²(n+2) / (i(n−i+1))`, the reciprocal of the plotting
/// position variance.
pub fn wls_weight(i: usize, n: usize) -> Result<f64> {
    if i == 0 || i > n {
        return Err(HewError::Domain(format!("rank {i} outside 1..={n}")));
    }
    let (i, n) = (i as f64, n as f64);
    Ok((n + 1.0) * (n + 1.0) * (n + 2.0) / (i * (n - i + 1.0)))
}

pub fn cdf_values<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| model.cdf(x)).collect()
}

pub fn sf_values<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| model.sf(x)).collect()
}

pub fn ols_objective<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(idx, &x)| {
            let d = model.cdf(x) - (idx + 1) as f64 / (n + 1.0);
            d * d
        })
        .sum()
}

pub fn wls_objective<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> f64 {
    let n = xs.len();
    xs.iter()
        .enumerate()
        .map(|(idx, &x)| {
            let i = idx + 1;
            let d = model.cdf(x) - i as f64 / (n as f64 + 1.0);
            // rank is in range by construction
            wls_weight(i, n).unwrap_or(f64::NAN) * d * d
        })
        .sum()
}

/// Log of the geometric mean of the `n + 1` spacings, together with the
/// number of tied observations whose zero spacing was replaced by the
/// log-density at the tie.
pub fn mps_log_objective_detailed<M: LifetimeModel + ?Sized>(
    model: &M,
    xs: &[f64],
) -> (f64, usize) {
    let n = xs.len();
    let mut total = 0.0;
    let mut ties = 0;
    let (mut prev_x, mut prev_f, mut prev_s) = (None::<f64>, 0.0, 1.0);
    for &x in xs {
        let (f, s) = (model.cdf(x), model.sf(x));
        let term = if prev_x == Some(x) {
            ties += 1;
            model.log_pdf(x)
        } else if prev_f < 0.5 {
            (f - prev_f).ln()
        } else {
            (prev_s - s).ln()
        };
        total += term;
        prev_x = Some(x);
        prev_f = f;
        prev_s = s;
    }
    total += prev_s.ln();
    let h = total / (n + 1) as f64;
    (if h.is_nan() { f64::NEG_INFINITY } else { h }, ties)
}

pub fn mps_log_objective<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> f64 {
    mps_log_objective_detailed(model, xs).0
}

/// Anderson–Darling statistic from model cdf and survival values at the
/// ordered sample. Returns the statistic and how many values were clamped
/// to `[ε, 1 − ε]`.
pub fn ad_from_values(cdf: &[f64], sf: &[f64]) -> (f64, usize) {
    let n = cdf.len();
    let mut clamped = 0;
    let mut clamp = |v: f64| {
        if v < AD_EPSILON {
            clamped += 1;
            AD_EPSILON
        } else if v > 1.0 - AD_EPSILON {
            clamped += 1;
            1.0 - AD_EPSILON
        } else {
            v
        }
    };
    let mut acc = 0.0;
    for i in 1..=n {
        let f = clamp(cdf[i - 1]);
        let s = clamp(sf[n - i]);
        acc += (2 * i - 1) as f64 * (f.ln() + s.ln());
    }
    (-(n as f64) - acc / n as f64, clamped)
}

pub fn ad_objective_detailed<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> (f64, usize) {
    ad_from_values(&cdf_values(model, xs), &sf_values(model, xs))
}

pub fn ad_objective<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> f64 {
    ad_objective_detailed(model, xs).0
}

/// Cramér–von Mises statistic from ordered cdf values.
pub fn cvm_from_values(cdf: &[f64]) -> f64 {
    let n = cdf.len() as f64;
    let ss: f64 = cdf
        .iter()
        .enumerate()
        .map(|(idx, &f)| {
            let d = f - (2 * idx + 1) as f64 / (2.0 * n);
            d * d
        })
        .sum();
    1.0 / (12.0 * n) + ss
}

pub fn cvm_objective<M: LifetimeModel + ?Sized>(model: &M, xs: &[f64]) -> f64 {
    cvm_from_values(&cdf_values(model, xs))
}

/// Kolmogorov–Smirnov distance from ordered cdf values.
pub fn ks_from_values(cdf: &[f64]) -> f64 {
    let n = cdf.len() as f64;
    cdf.iter()
        .enumerate()
        .map(|(idx, &f)| {
            let i = (idx + 1) as f64;
            (i / n - f).max(f - (i - 1.0) / n)
        })
        .fold(0.0, f64::max)
}
