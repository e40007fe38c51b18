mod common;

use common::*;
use hew_core::estimation::objectives::{ad_objective, cvm_objective};
use hew_core::gof::*;
use hew_core::sampling::draw;
use hew_core::{sample_hew, ComparisonModel, HewParams, LifetimeModel};

fn exp1() -> FittedModel {
    FittedModel::Hew {
        params: HewParams::new(1.0, 1.0, 1.0, 1.0).unwrap(),
    }
}

/// Sup-distance by counting, for every observation, how many points lie
/// strictly below and at-or-below it.
fn ks_quadratic(xs: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for &x in xs {
        let below = xs.iter().filter(|&&y| y < x).count() as f64 / n;
        let upto = xs.iter().filter(|&&y| y <= x).count() as f64 / n;
        let f = cdf(x);
        d = d.max((f - below).abs()).max((upto - f).abs());
    }
    d
}

#[test]
fn ks_matches_quadratic_oracle() {
    let mut rng = rng(2);
    for n in [5usize, 37, 200] {
        let mut u: Vec<f64> = (0..n).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        u.sort_by(f64::total_cmp);
        let d = ks_statistic(&u);
        assert!((d - ks_quadratic(&u, |v| v)).abs() < 1e-15);
    }
    let n = 10;
    let mid: Vec<f64> = (1..=n)
        .map(|i| (2 * i - 1) as f64 / (2 * n) as f64)
        .collect();
    assert!((ks_statistic(&mid) - 0.05).abs() < 1e-15);
    let upper: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
    assert!((ks_statistic(&upper) - 0.1).abs() < 1e-15);
}

#[test]
fn ks_is_invariant_under_monotone_transformation() {
    // y = α x^β maps HEW(θ, k, β, α) onto HEW(θ, k, 1, 1)
    let p = HewParams::new(14.23, 1.0, 1.8, 0.43).unwrap();
    let q = HewParams::new(14.23, 1.0, 1.0, 1.0).unwrap();
    let xs = sample_hew(&HewParams::new(3.0, 0.7, 2.0, 0.5).unwrap(), 150, 5).unwrap();
    let ys: Vec<f64> = xs.iter().map(|x| 0.43 * x.powf(1.8)).collect();
    let fx: Vec<f64> = xs.iter().map(|&x| p.cdf(x)).collect();
    let fy: Vec<f64> = ys.iter().map(|&y| q.cdf(y)).collect();
    assert!((ks_statistic(&fx) - ks_statistic(&fy)).abs() < 1e-12);
}

#[test]
fn reported_statistics_equal_estimation_objectives() {
    let p = HewParams::new(0.1, 0.13, 10.0, 1.0).unwrap();
    let xs = sample_hew(&p, 60, 8).unwrap();
    let [_, ad, cvm] = statistics(&p, &xs);
    assert_eq!(ad.to_bits(), ad_objective(&p, &xs).to_bits());
    assert_eq!(cvm.to_bits(), cvm_objective(&p, &xs).to_bits());
    assert_eq!(ad.to_bits(), ad_statistic(&p, &xs).to_bits());
    assert_eq!(cvm.to_bits(), cvm_statistic(&p, &xs).to_bits());
    assert!(cvm >= 1.0 / (12.0 * 60.0));
}

#[test]
fn replicate_pvalue_boundaries() {
    let reps: Vec<f64> = (1..=99).map(|i| i as f64).collect();
    assert_eq!(pvalue_from_replicates(0.0, &reps), 1.0);
    assert_eq!(pvalue_from_replicates(1000.0, &reps), 0.01);
    assert_eq!(pvalue_from_replicates(50.0, &reps), 51.0 / 100.0);
}

#[test]
fn fixed_model_bootstrap_pvalues_are_uniform() {
    let model = exp1();
    let trials = 200;
    let mut p: [Vec<f64>; 3] = Default::default();
    for t in 0..trials {
        let mut xs = draw(&model, 30, 10_000 + t);
        xs.sort_by(f64::total_cmp);
        let cfg = BootstrapConfig {
            replicates: 999,
            seed: 1_000_000 * (t + 1),
            refit: false,
        };
        let out = bootstrap_pvalues(&model, &xs, &cfg).unwrap();
        for s in 0..3 {
            p[s].push(out.p_values[s]);
        }
    }
    for (s, values) in p.iter_mut().enumerate() {
        values.sort_by(f64::total_cmp);
        let d = ks_brute(values, |v| v.clamp(0.0, 1.0));
        // 1% critical value of the one-sample KS test at n = 200
        assert!(d < 1.628 / (trials as f64).sqrt(), "statistic {s}: D = {d}");
    }
}

#[test]
fn bootstrap_is_deterministic_across_thread_counts() {
    let truth = HewParams::new(2.0, 0.5, 1.5, 1.0).unwrap();
    let xs = sample_hew(&truth, 40, 3).unwrap();
    let model = FittedModel::Hew { params: truth };
    let cfg = BootstrapConfig {
        replicates: 99,
        seed: 17,
        refit: true,
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bootstrap_pvalues(&model, &xs, &cfg).unwrap())
    };
    let a = run(1);
    assert_eq!(a, run(1));
    assert_eq!(a, run(3));
    assert!(a.p_values.iter().all(|p| (0.0..=1.0).contains(p)));
    assert!(bootstrap_pvalues(
        &model,
        &xs,
        &BootstrapConfig {
            replicates: 98,
            ..cfg
        }
    )
    .is_err());
}

#[test]
fn comparison_model_bootstrap_runs() {
    let m = ComparisonModel::weibull(1.5, 0.8).unwrap();
    let model = FittedModel::Comparison { model: m };
    let mut xs = draw(&m, 50, 4);
    xs.sort_by(f64::total_cmp);
    let p = bootstrap_pvalue(
        &model,
        &xs,
        Statistic::Ad,
        &BootstrapConfig {
            replicates: 99,
            seed: 1,
            refit: true,
        },
    )
    .unwrap();
    assert!(p > 0.0 && p <= 1.0);
}

#[test]
fn aic_is_below_bic_beyond_e_squared() {
    let model = exp1();
    for n in [8, 20, 127] {
        let mut xs = draw(&model, n, n as u64);
        xs.sort_by(f64::total_cmp);
        let r = gof_report(&model, &xs, PValueMethod::Asymptotic, 0).unwrap();
        assert!(r.aic < r.bic, "n = {n}");
        assert!((r.loglik + model.neg_log_likelihood(&xs)).abs() < 1e-12);
        for t in [r.ks, r.ad, r.cvm] {
            assert!(t.statistic >= 0.0 && (0.0..=1.0).contains(&t.p_value));
        }
    }
}
