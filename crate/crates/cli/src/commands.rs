use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use hew_core::bayes::{self, ChainConfig, GammaPrior, PriorSet, Target};
use hew_core::datasets::{read_values, Dataset, DATA_DIR_ENV};
use hew_core::estimation::{
    fit_comparison, optimize, ComparisonFit, FitConfig, FitResult, ObjectiveKind, OptimizerKind,
};
use hew_core::gof::{gof_report, FittedModel, GofReport, PValueMethod};
use hew_core::montecarlo::{run_study, StudyConfig, StudyMethod};
use hew_core::sampling::draw;
use hew_core::{ComparisonKind, HewParams, LifetimeModel, Sample, SampleSource, PARAM_NAMES};
use serde::Deserialize;
use serde::Serialize;

use crate::args::*;
use crate::document::*;
use crate::error::{CliError, CliResult};

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

/// Opens `path` for writing, or stdout when absent.
fn writer(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn finish(mut w: Box<dyn Write>, path: Option<&Path>) -> CliResult<()> {
    w.flush().map_err(|e| match path {
        Some(p) => io_error(p, e),
        None => CliError::Input(format!("stdout: {e}")),
    })
}

fn echo<T: Serialize>(name: &'static str, options: &T) -> CliResult<CommandEcho> {
    Ok(CommandEcho {
        name,
        options: serde_json::to_value(options).map_err(|e| CliError::Internal(e.to_string()))?,
    })
}

/// Writes the document as JSON to `out` (printing `table` to stdout) or,
/// without `out`, the JSON to stdout.
fn emit(doc: &ResultDocument, out: Option<&Path>, table: &str) -> CliResult<()> {
    let json = serde_json::to_string_pretty(doc).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut w = writer(out)?;
    writeln!(w, "{json}").map_err(|e| CliError::Input(e.to_string()))?;
    finish(w, out)?;
    if out.is_some() {
        print!("{table}");
    }
    Ok(())
}

/// Four significant digits for human-readable tables.
pub fn sig4(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{v:.3e}");
    }
    format!("{v:.*}", (3 - mag).max(0) as usize)
}

fn runtime(start: Instant, steps: BTreeMap<String, f64>) -> Runtime {
    Runtime {
        threads: rayon::current_num_threads(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        steps,
    }
}

fn load_data(args: &DataArgs) -> CliResult<(Sample, String)> {
    match (&args.data, args.dataset) {
        (Some(path), _) => {
            let values = read_values(path)?;
            let sample = Sample::new(values, SampleSource::File)?;
            Ok((sample, path.display().to_string()))
        }
        (None, Some(d)) => {
            let dataset = Dataset::from(d);
            let dir = std::env::var_os(DATA_DIR_ENV).map(PathBuf::from);
            Ok((dataset.load(dir.as_deref())?, dataset.name().to_string()))
        }
        (None, None) => Err(CliError::Input(
            "one of --data or --dataset is required".into(),
        )),
    }
}

fn data_summary(sample: &Sample, source: String) -> DataSummary {
    DataSummary {
        source,
        n: sample.n(),
        min: sample[0],
        max: sample.max(),
    }
}

fn pvalue_method(args: &GofArgs) -> CliResult<PValueMethod> {
    match args.pvalues {
        PValueArg::Asymptotic => Ok(PValueMethod::Asymptotic),
        PValueArg::Bootstrap if args.replicates < 99 => Err(CliError::Input(format!(
            "--replicates must be at least 99, got {}",
            args.replicates
        ))),
        PValueArg::Bootstrap => Ok(PValueMethod::Bootstrap {
            replicates: args.replicates,
        }),
    }
}

fn objective(m: MethodArg) -> ObjectiveKind {
    match m {
        MethodArg::Mle => ObjectiveKind::Mle,
        MethodArg::Ols => ObjectiveKind::Ols,
        MethodArg::Wls => ObjectiveKind::Wls,
        MethodArg::Mps => ObjectiveKind::Mps,
        MethodArg::Ad => ObjectiveKind::Ad,
        MethodArg::Cvm => ObjectiveKind::Cvm,
    }
}

fn optimizer(o: OptimizerArg) -> OptimizerKind {
    match o {
        OptimizerArg::NelderMead => OptimizerKind::NelderMead,
        OptimizerArg::Genetic => OptimizerKind::Genetic,
    }
}

fn hew_params(values: &[f64]) -> CliResult<HewParams> {
    let p: [f64; 4] = values
        .try_into()
        .map_err(|_| CliError::Input(format!("expected 4 parameters, got {}", values.len())))?;
    Ok(HewParams::from_array(p)?)
}

fn fit_table(reports: &[ModelReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s += &format!("{} ({})", r.model, r.method);
        match (&r.parameters, &r.error) {
            (Some(params), _) => {
                s += "\n";
                for (name, v) in params {
                    let se = r
                        .std_errors
                        .as_ref()
                        .and_then(|m| m.get(name))
                        .map(|v| format!("  se {}", sig4(*v)))
                        .unwrap_or_default();
                    s += &format!("  {name:<6} {:>12}{se}\n", sig4(*v));
                }
                if let (Some(ll), Some(aic), Some(bic)) = (r.loglik, r.aic, r.bic) {
                    s += &format!(
                        "  loglik {}  AIC {}  BIC {}\n",
                        sig4(ll),
                        sig4(aic),
                        sig4(bic)
                    );
                }
                if let Some(g) = &r.gof {
                    s += &format!(
                        "  KS {} (p {})  AD {} (p {})  CvM {} (p {})\n",
                        sig4(g.ks.statistic),
                        sig4(g.ks.p_value),
                        sig4(g.ad.statistic),
                        sig4(g.ad.p_value),
                        sig4(g.cvm.statistic),
                        sig4(g.cvm.p_value)
                    );
                }
            }
            (None, err) => {
                s += &format!(": failed: {}\n", err.as_deref().unwrap_or("unknown error"))
            }
        }
    }
    s
}

pub fn fit(args: &FitArgs) -> CliResult<()> {
    let start = Instant::now();
    let (sample, source) = load_data(&args.data)?;
    let method = pvalue_method(&args.gof)?;
    let cfg = FitConfig {
        optimizer: optimizer(args.optimizer),
        restarts: args.restarts,
        seed: args.seed,
        ..FitConfig::new(objective(args.method))
    };
    let mut steps = BTreeMap::new();
    let fit_start = Instant::now();
    let result = optimize(&cfg, &sample)?;
    steps.insert("fit_seconds".to_string(), fit_start.elapsed().as_secs_f64());
    let gof_start = Instant::now();
    let gof = gof_report(
        &FittedModel::Hew {
            params: result.estimates,
        },
        &sample,
        method,
        args.seed,
    )?;
    steps.insert("gof_seconds".to_string(), gof_start.elapsed().as_secs_f64());
    let fits = vec![ModelReport::hew(&result, Some(gof))];
    let table = fit_table(&fits);
    let doc = ResultDocument {
        schema_version: SCHEMA_VERSION,
        command: echo("fit", args)?,
        seed: args.seed,
        data: Some(data_summary(&sample, source)),
        fits,
        posterior: None,
        study: None,
        runtime: runtime(start, steps),
    };
    emit(&doc, args.out.as_deref(), &table)
}

fn comparison_report(fit: &ComparisonFit, gof: Option<GofReport>) -> ModelReport {
    ModelReport {
        model: fit.model.kind().label(),
        method: ObjectiveKind::Mle.label(),
        status: FitStatus::Ok,
        error: None,
        n_params: fit.model.n_params(),
        parameters: Some(comparison_params(&fit.model)),
        std_errors: None,
        ci_level: None,
        ci: None,
        loglik: Some(fit.loglik),
        aic: Some(fit.aic),
        bic: Some(fit.bic),
        objective_value: Some(fit.loglik),
        converged: Some(fit.converged),
        diagnostics: None,
        gof,
    }
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let start = Instant::now();
    let (sample, source) = load_data(&args.data)?;
    let method = pvalue_method(&args.gof)?;
    let mut steps = BTreeMap::new();
    let mut fits = Vec::new();

    let t = Instant::now();
    let hew = optimize(
        &FitConfig {
            seed: args.seed,
            ..FitConfig::new(ObjectiveKind::Mle)
        },
        &sample,
    )
    .map_err(CliError::from)
    .and_then(|fit: FitResult| {
        let gof = gof_report(
            &FittedModel::Hew {
                params: fit.estimates,
            },
            &sample,
            method,
            args.seed,
        )?;
        Ok(ModelReport::hew(&fit, Some(gof)))
    });
    fits.push(hew.unwrap_or_else(|e| ModelReport::failed("HEW", "MLE", 4, e.to_string())));
    steps.insert("HEW_seconds".to_string(), t.elapsed().as_secs_f64());

    for kind in ComparisonKind::ALL {
        let t = Instant::now();
        let report = fit_comparison(kind, &sample)
            .map_err(CliError::from)
            .and_then(|fit| {
                let gof = gof_report(
                    &FittedModel::Comparison { model: fit.model },
                    &sample,
                    method,
                    args.seed,
                )?;
                Ok(comparison_report(&fit, Some(gof)))
            });
        fits.push(
            report.unwrap_or_else(|e| ModelReport::failed(kind.label(), "MLE", 2, e.to_string())),
        );
        steps.insert(
            format!("{}_seconds", kind.label()),
            t.elapsed().as_secs_f64(),
        );
    }

    if fits.iter().all(|f| f.error.is_some()) {
        let reasons: Vec<String> = fits
            .iter()
            .map(|f| format!("{}: {}", f.model, f.error.as_deref().unwrap_or("")))
            .collect();
        return Err(CliError::Estimation(format!(
            "no model could be fitted ({})",
            reasons.join("; ")
        )));
    }
    let table = fit_table(&fits);
    let doc = ResultDocument {
        schema_version: SCHEMA_VERSION,
        command: echo("compare", args)?,
        seed: args.seed,
        data: Some(data_summary(&sample, source)),
        fits,
        posterior: None,
        study: None,
        runtime: runtime(start, steps),
    };
    emit(&doc, args.out.as_deref(), &table)
}

#[derive(Debug, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum PriorSpec {
    Gamma { shape: f64, rate: f64 },
    Moments { mean: f64, sd: f64 },
}

fn read_priors(path: &Path) -> CliResult<PriorSet> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let specs: BTreeMap<String, PriorSpec> = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Some(extra) = specs.keys().find(|k| !PARAM_NAMES.contains(&k.as_str())) {
        return Err(CliError::Input(format!(
            "{}: unknown parameter '{extra}'",
            path.display()
        )));
    }
    let mut out = Vec::with_capacity(4);
    for name in PARAM_NAMES {
        let spec = specs.get(name).ok_or_else(|| {
            CliError::Input(format!("{}: missing prior for {name}", path.display()))
        })?;
        out.push(match *spec {
            PriorSpec::Gamma { shape, rate } => GammaPrior::new(shape, rate)?,
            PriorSpec::Moments { mean, sd } => bayes::elicit_gamma(mean, sd)?,
        });
    }
    Ok(PriorSet::from_array([out[0], out[1], out[2], out[3]]))
}

pub fn bayes(args: &BayesArgs) -> CliResult<()> {
    let start = Instant::now();
    let (sample, source) = load_data(&args.data)?;
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::Input(format!(
            "--level must be in (0, 1), got {}",
            args.level
        )));
    }
    let proposal_scale = match &args.proposal_scale {
        Some(v) => hew_params(v)?.to_array(),
        None => ChainConfig::default().proposal_scale,
    };
    let cfg = ChainConfig {
        iterations: args.iterations,
        burn_in: args.burn_in,
        thinning: args.thin,
        seed: args.seed,
        proposal_scale,
    };
    cfg.validate()?;

    let mut steps = BTreeMap::new();
    let mut fits = Vec::new();
    let (priors, source_tag, initial) = if args.priors == "auto" {
        let t = Instant::now();
        let mle = optimize(&FitConfig { seed: args.seed, ..FitConfig::new(ObjectiveKind::Mle) }, &sample)
            .map_err(|e| {
                CliError::Estimation(format!(
                    "the MLE stage of prior elicitation failed ({e}); pass explicit priors with --priors FILE"
                ))
            })?;
        steps.insert("mle_seconds".to_string(), t.elapsed().as_secs_f64());
        let priors = PriorSet::from_fit(&mle)?;
        fits.push(ModelReport::hew(&mle, None));
        (priors, "auto", mle.estimates.to_array())
    } else {
        let priors = read_priors(Path::new(&args.priors))?;
        (priors, "file", priors.means())
    };

    let t = Instant::now();
    let chain = bayes::mh_sample(&priors, Target::Data(&sample), initial, &cfg)?;
    steps.insert("chain_seconds".to_string(), t.elapsed().as_secs_f64());
    let summary = bayes::summarize(&chain, args.level)?;
    for (i, (hpd, et)) in summary.hpd.iter().zip(&summary.equal_tailed).enumerate() {
        if hpd.width() > et.width() {
            return Err(CliError::Internal(format!(
                "HPD interval of {} is wider than the equal-tailed interval",
                PARAM_NAMES[i]
            )));
        }
    }

    let chain_path = args
        .chain
        .clone()
        .or_else(|| args.out.as_ref().map(|p| p.with_extension("chain.csv")));
    if let Some(path) = &chain_path {
        let mut w = writer(Some(path))?;
        chain.write_csv(&mut w).map_err(|e| io_error(path, e))?;
        finish(w, Some(path))?;
    }

    let posterior = PosteriorReport::new(
        PriorOutput::new(source_tag, &priors),
        ChainOutput::new(&chain, cfg.iterations, initial),
        &summary,
    );
    let mut table = format!(
        "posterior medians and {:.0}% HPD intervals (acceptance {})\n",
        100.0 * args.level,
        sig4(summary.acceptance_rate)
    );
    for (name, med) in &posterior.median {
        let hpd = posterior.hpd[name];
        table += &format!(
            "  {name:<6} {:>12}  [{}, {}]\n",
            sig4(*med),
            sig4(hpd.lower),
            sig4(hpd.upper)
        );
    }
    if let Some(w) = &summary.warning {
        table += &format!("warning: {w}\n");
    }
    let doc = ResultDocument {
        schema_version: SCHEMA_VERSION,
        command: echo("bayes", args)?,
        seed: args.seed,
        data: Some(data_summary(&sample, source)),
        fits,
        posterior: Some(posterior),
        study: None,
        runtime: runtime(start, steps),
    };
    emit(&doc, args.out.as_deref(), &table)
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let start = Instant::now();
    let truth = hew_params(&args.truth)?;
    let methods = args
        .methods
        .iter()
        .map(|m| m.trim().parse::<StudyMethod>())
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = StudyConfig {
        truth,
        sample_sizes: args.sizes.clone(),
        replications: args.reps,
        methods: methods.clone(),
        seed: args.seed,
        optimizer: optimizer(args.optimizer),
        restarts: args.restarts,
        chain: ChainConfig {
            iterations: args.chain_iterations,
            burn_in: args.chain_burn_in,
            ..ChainConfig::default()
        },
    };
    cfg.validate()?;
    let report = run_study(&cfg)?;

    let mut steps = BTreeMap::new();
    for c in &report.cells {
        for i in 0..4 {
            let (r, b) = (c.rmse[i], c.bias[i]);
            if r.is_finite() && r * r - b * b < -1e-12 * (r * r).max(1.0) {
                return Err(CliError::Internal(format!(
                    "{} n={} {}: rmse {r} below |bias| {}",
                    c.method,
                    c.n,
                    PARAM_NAMES[i],
                    b.abs()
                )));
            }
        }
        steps.insert(
            format!("{}/n={}/mean_seconds_per_fit", c.method, c.n),
            c.mean_seconds,
        );
    }

    if let Some(out) = &args.out {
        let csv_path = out.with_extension("csv");
        let mut w = writer(Some(&csv_path))?;
        report
            .write_csv(&mut w)
            .map_err(|e| io_error(&csv_path, e))?;
        finish(w, Some(&csv_path))?;
    }

    let mut table = String::from("method      n  parameter        rmse        bias  failures\n");
    for c in &report.cells {
        for (i, name) in PARAM_NAMES.iter().enumerate() {
            table += &format!(
                "{:<6} {:>6}  {:<9} {:>11} {:>11} {:>9}\n",
                c.method.label(),
                c.n,
                name,
                sig4(c.rmse[i]),
                sig4(c.bias[i]),
                c.failures
            );
        }
    }
    let labels = methods.iter().map(|m| m.to_string()).collect();
    let doc = ResultDocument {
        schema_version: SCHEMA_VERSION,
        command: echo("simulate", args)?,
        seed: args.seed,
        data: None,
        fits: Vec::new(),
        posterior: None,
        study: Some(StudyOutput::new(&report, &args.sizes, labels)),
        runtime: runtime(start, steps),
    };
    emit(&doc, args.out.as_deref(), &table)
}

pub fn sample(args: &SampleArgs) -> CliResult<()> {
    let p = hew_params(&args.params)?;
    if args.n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let values = draw(&p, args.n, args.seed);
    let mut w = writer(args.out.as_deref())?;
    for v in values {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Internal(format!("sampler produced {v}")));
        }
        writeln!(w, "{v:.16e}").map_err(|e| CliError::Input(e.to_string()))?;
    }
    finish(w, args.out.as_deref())
}

pub fn grid(args: &GridArgs) -> CliResult<()> {
    let p = hew_params(&args.params)?;
    if !(args.xmin.is_finite()
        && args.xmax.is_finite()
        && args.xmin >= 0.0
        && args.xmin < args.xmax)
    {
        return Err(CliError::Input(format!(
            "need 0 <= xmin < xmax, got xmin {} and xmax {}",
            args.xmin, args.xmax
        )));
    }
    if args.points < 2 {
        return Err(CliError::Input("--points must be at least 2".into()));
    }
    let mut w = writer(args.out.as_deref())?;
    writeln!(w, "x,pdf,cdf,sf").map_err(|e| CliError::Input(e.to_string()))?;
    let step = (args.xmax - args.xmin) / (args.points - 1) as f64;
    for i in 0..args.points {
        let x = if i + 1 == args.points {
            args.xmax
        } else {
            args.xmin + step * i as f64
        };
        let (cdf, sf) = (p.cdf(x) + 0.0, p.sf(x) + 0.0);
        if (cdf + sf - 1.0).abs() > 1e-14 {
            return Err(CliError::Internal(format!(
                "cdf + sf = {} at x = {x}",
                cdf + sf
            )));
        }
        writeln!(w, "{x:.16e},{:.16e},{cdf:.16e},{sf:.16e}", p.pdf(x))
            .map_err(|e| CliError::Input(e.to_string()))?;
    }
    finish(w, args.out.as_deref())
}
