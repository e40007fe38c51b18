//! Nelder–Mead simplex minimiser with standard coefficients
//! (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
//!
//! Non-finite objective values are treated as `+inf`, so a vertex that lands
//! on one is simply the worst point and gets replaced.

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    /// Stop once every vertex is within this (max-norm) distance of the best.
    pub tolerance: f64,
    pub max_evaluations: usize,
    /// How many times to rebuild the simplex around the best point after
    /// convergence. A rebuild that fails to improve ends the run.
    pub max_rebuilds: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.25,
            tolerance: 1e-8,
            max_evaluations: 20_000,
            max_rebuilds: 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Counter<'a, F> {
    f: &'a F,
    evaluations: usize,
}

impl<F: Fn(&[f64]) -> f64> Counter<'_, F> {
    fn eval(&mut self, x: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

pub fn minimize<F>(f: &F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: Fn(&[f64]) -> f64,
{
    let mut counter = Counter { f, evaluations: 0 };
    let mut best_x = x0.to_vec();
    let mut best_v = counter.eval(x0);
    let mut converged = false;
    let mut step = opts.initial_step;

    for round in 0..=opts.max_rebuilds {
        let (x, v, conv) = run_simplex(&mut counter, &best_x, best_v, step, opts);
        let improved = v < best_v - opts.tolerance * (1.0 + best_v.abs());
        if v <= best_v {
            best_x = x;
            best_v = v;
        }
        converged = conv;
        if !conv || counter.evaluations >= opts.max_evaluations || (round > 0 && !improved) {
            break;
        }
        step = (step * 0.5).max(100.0 * opts.tolerance);
    }

    NelderMeadResult {
        x: best_x,
        value: best_v,
        evaluations: counter.evaluations,
        converged,
    }
}

fn run_simplex<F: Fn(&[f64]) -> f64>(
    counter: &mut Counter<'_, F>,
    x0: &[f64],
    v0: f64,
    step: f64,
    opts: &NelderMeadOptions,
) -> (Vec<f64>, f64, bool) {
    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), v0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = counter.eval(&x);
        simplex.push((x, v));
    }

    let mut converged = false;
    while counter.evaluations < opts.max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if diameter(&simplex) < opts.tolerance {
            converged = true;
            break;
        }

        let worst = dim;
        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..worst].iter().map(|p| p.0[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(1.0);
        let vr = counter.eval(&xr);
        if vr < simplex[0].1 {
            let xe = along(2.0);
            let ve = counter.eval(&xe);
            simplex[worst] = if ve < vr { (xe, ve) } else { (xr, vr) };
            continue;
        }
        if vr < simplex[worst - 1].1 {
            simplex[worst] = (xr, vr);
            continue;
        }
        // outside contraction if the reflection helped at all, inside otherwise
        let xc = if vr < simplex[worst].1 {
            along(0.5)
        } else {
            along(-0.5)
        };
        let vc = counter.eval(&xc);
        if vc < simplex[worst].1.min(vr) {
            simplex[worst] = (xc, vc);
            continue;
        }
        // shrink towards the best vertex
        let best = simplex[0].0.clone();
        for p in simplex.iter_mut().skip(1) {
            for (xj, bj) in p.0.iter_mut().zip(&best) {
                *xj = bj + 0.5 * (*xj - bj);
            }
            p.1 = counter.eval(&p.0);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v, converged)
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .flat_map(|p| p.0.iter().zip(best).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}
