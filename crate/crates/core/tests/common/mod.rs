#![allow(dead_code)]

use hew_core::{sample_hew, HewParams};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (v, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return v;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth - 1) + adapt(f, m, b, 0.5 * tol, depth - 1)
}

/// Adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&f, a, b, tol, 60)
}

/// Integral over `(0, ∞)` through the substitution `x = t/(1 − t)`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, tol: f64) -> f64 {
    integrate(
        |t| {
            if t <= 0.0 || t >= 1.0 {
                return 0.0;
            }
            let x = t / (1.0 - t);
            let v = f(x) / ((1.0 - t) * (1.0 - t));
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Root of an increasing function by bisection.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// HEW log-density typed straight from the closed form, with no
/// rearrangement.
pub fn literal_log_pdf(p: [f64; 4], x: f64) -> f64 {
    let [theta, k, beta, alpha] = p;
    let z = alpha * x.powf(beta);
    let d = 1.0 - (1.0 - theta) * (-k * z).exp();
    theta.ln() / k + alpha.ln() + beta.ln() + (beta - 1.0) * x.ln() - z - (k + 1.0) / k * d.ln()
}

/// Literal survival function `{θe^{−kz}/(1 − θ̄e^{−kz})}^{1/k}`.
pub fn literal_sf(p: [f64; 4], x: f64) -> f64 {
    let [theta, k, beta, alpha] = p;
    let e = (-k * alpha * x.powf(beta)).exp();
    (theta * e / (1.0 - (1.0 - theta) * e)).powf(1.0 / k)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameter vector with each component log-uniform on `[lo, hi]`.
pub fn random_params(rng: &mut ChaCha8Rng, lo: [f64; 4], hi: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = (lo[i].ln() + rng.random::<f64>() * (hi[i].ln() - lo[i].ln())).exp();
    }
    out
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn sample_skewness(v: &[f64]) -> f64 {
    let m = mean(v);
    let n = v.len() as f64;
    let m2 = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = v.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// Two-sided KS distance between sorted data and a cdf, by brute force.
pub fn ks_brute(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d
            .max((f - i as f64 / n).abs())
            .max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// 100 (parameters, sample) pairs with moderate parameters and n in 10..60.
pub fn random_pairs(seed: u64) -> Vec<(HewParams, Vec<f64>)> {
    let mut rng = rng(seed);
    (0..100)
        .map(|_| {
            let lo = [0.1, 0.1, 0.5, 0.2];
            let hi = [10.0, 5.0, 5.0, 5.0];
            let model = HewParams::from_array(random_params(&mut rng, lo, hi)).unwrap();
            let source = HewParams::from_array(random_params(&mut rng, lo, hi)).unwrap();
            let n = rng.random_range(10..60);
            let sample = sample_hew(&source, n, rng.next_u64()).unwrap();
            (model, sample.to_vec())
        })
        .collect()
}

// Brute-force objective values from model cdf/sf values at the order statistics.

pub fn ols_oracle(f: &[f64]) -> f64 {
    let n = f.len();
    let mut total = 0.0;
    for i in 1..=n {
        let target = i as f64 / (n as f64 + 1.0);
        total += (f[i - 1] - target) * (f[i - 1] - target);
    }
    total
}

pub fn wls_oracle(f: &[f64]) -> f64 {
    let n = f.len() as f64;
    let mut total = 0.0;
    for (idx, &fi) in f.iter().enumerate() {
        let i = idx as f64 + 1.0;
        let var = i * (n - i + 1.0) / ((n + 1.0).powi(2) * (n + 2.0));
        total += (fi - i / (n + 1.0)).powi(2) / var;
    }
    total
}

pub fn mps_oracle(f: &[f64], s: &[f64]) -> f64 {
    let n = f.len();
    let mut spacings = Vec::with_capacity(n + 1);
    spacings.push(f[0]);
    for i in 1..n {
        // difference taken on whichever side keeps precision
        spacings.push(if f[i - 1] < 0.5 {
            f[i] - f[i - 1]
        } else {
            s[i - 1] - s[i]
        });
    }
    spacings.push(s[n - 1]);
    spacings.iter().map(|d| d.ln()).sum::<f64>() / (n + 1) as f64
}

pub fn ad_oracle(f: &[f64], s: &[f64]) -> f64 {
    let n = f.len();
    let mut total = 0.0;
    for i in 1..=n {
        total += (2.0 * i as f64 - 1.0) * (f[i - 1].ln() + s[n - i].ln());
    }
    -(n as f64) - total / n as f64
}

pub fn cvm_oracle(f: &[f64]) -> f64 {
    let n = f.len() as f64;
    let mut total = 1.0 / (12.0 * n);
    for (idx, &fi) in f.iter().enumerate() {
        total += (fi - (2.0 * idx as f64 + 1.0) / (2.0 * n)).powi(2);
    }
    total
}
