//! Real-coded genetic algorithm for box-constrained minimisation.
//!
//! Tournament selection, BLX-α crossover, per-gene Gaussian mutation and
//! elitism. Population fitness is evaluated in parallel; all random choices
//! come from one seeded stream on the calling thread, so results do not
//! depend on the thread count.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::sampling::{open_uniform, rng_from_seed};

#[derive(Debug, Clone)]
pub struct GeneticOptions {
    pub population: usize,
    pub max_generations: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of the box width.
    pub mutation_scale: f64,
    pub blx_alpha: f64,
    pub tournament: usize,
    pub elites: usize,
    /// Stop after this many generations without the best value improving by
    /// more than `tolerance`.
    pub patience: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for GeneticOptions {
    fn default() -> Self {
        Self {
            population: 50,
            max_generations: 300,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            mutation_scale: 0.1,
            blx_alpha: 0.5,
            tournament: 3,
            elites: 2,
            patience: 40,
            tolerance: 1e-8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneticResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub generations: usize,
    /// True when the run ended on stagnation rather than the generation cap.
    pub stagnated: bool,
    /// Largest per-coordinate standard deviation of the final population.
    pub spread: f64,
}

fn evaluate<F>(f: &F, pop: &[Vec<f64>]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    pop.par_iter()
        .map(|x| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        })
        .collect()
}

/// Minimises `f` over the box `[lower, upper]`. `seed_point`, when given,
/// joins the initial population.
pub fn minimize<F>(
    f: &F,
    lower: &[f64],
    upper: &[f64],
    seed_point: Option<&[f64]>,
    opts: &GeneticOptions,
) -> GeneticResult
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = lower.len();
    let size = opts.population.max(opts.elites + 2);
    let mut rng = rng_from_seed(opts.seed);
    let width: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| u - l).collect();
    let clamp = |x: &mut Vec<f64>| {
        for j in 0..dim {
            x[j] = x[j].clamp(lower[j], upper[j]);
        }
    };

    let mut pop: Vec<Vec<f64>> = (0..size)
        .map(|_| {
            (0..dim)
                .map(|j| lower[j] + width[j] * open_uniform(&mut rng))
                .collect()
        })
        .collect();
    if let Some(p) = seed_point {
        let mut p = p.to_vec();
        clamp(&mut p);
        pop[0] = p;
    }
    let mut fitness = evaluate(f, &pop);
    let mut evaluations = size;

    let best_of = |fit: &[f64]| -> usize {
        fit.iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    };
    let mut best = best_of(&fitness);
    let mut best_x = pop[best].clone();
    let mut best_v = fitness[best];
    let mut since_improvement = 0;
    let mut generations = 0;
    let mut stagnated = false;

    while generations < opts.max_generations {
        generations += 1;
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
        let mut next: Vec<Vec<f64>> = order[..opts.elites]
            .iter()
            .map(|&i| pop[i].clone())
            .collect();

        let tournament = |rng: &mut rand_chacha::ChaCha8Rng| -> usize {
            (0..opts.tournament)
                .map(|_| rng.random_range(0..size))
                .min_by(|&a, &b| fitness[a].total_cmp(&fitness[b]))
                .unwrap_or(0)
        };
        while next.len() < size {
            let a = tournament(&mut rng);
            let b = tournament(&mut rng);
            let (mut c1, mut c2) = (pop[a].clone(), pop[b].clone());
            if open_uniform(&mut rng) < opts.crossover_rate {
                for j in 0..dim {
                    let lo = pop[a][j].min(pop[b][j]);
                    let hi = pop[a][j].max(pop[b][j]);
                    let span = hi - lo;
                    let (l, u) = (lo - opts.blx_alpha * span, hi + opts.blx_alpha * span);
                    c1[j] = l + (u - l) * open_uniform(&mut rng);
                    c2[j] = l + (u - l) * open_uniform(&mut rng);
                }
            }
            for child in [&mut c1, &mut c2] {
                for j in 0..dim {
                    if open_uniform(&mut rng) < opts.mutation_rate {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        child[j] += z * opts.mutation_scale * width[j];
                    }
                }
                clamp(child);
            }
            next.push(c1);
            if next.len() < size {
                next.push(c2);
            }
        }

        pop = next;
        fitness = evaluate(f, &pop);
        evaluations += size;
        best = best_of(&fitness);
        if fitness[best] < best_v - opts.tolerance * (1.0 + best_v.abs()) {
            since_improvement = 0;
        } else {
            since_improvement += 1;
        }
        if fitness[best] <= best_v {
            best_v = fitness[best];
            best_x = pop[best].clone();
        }
        if since_improvement >= opts.patience {
            stagnated = true;
            break;
        }
    }

    let spread = (0..dim)
        .map(|j| {
            let mean = pop.iter().map(|x| x[j]).sum::<f64>() / size as f64;
            (pop.iter().map(|x| (x[j] - mean).powi(2)).sum::<f64>() / size as f64).sqrt()
        })
        .fold(0.0, f64::max);

    GeneticResult {
        x: best_x,
        value: best_v,
        evaluations,
        generations,
        stagnated,
        spread,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rastrigin(x: &[f64]) -> f64 {
        10.0 * x.len() as f64
            + x.iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos())
                .sum::<f64>()
    }

    #[test]
    fn finds_global_basin_of_rastrigin() {
        let opts = GeneticOptions {
            population: 80,
            max_generations: 400,
            seed: 3,
            ..Default::default()
        };
        let r = minimize(&rastrigin, &[-5.12; 2], &[5.12; 2], None, &opts);
        assert!(r.value < 1.0, "{r:?}");
    }

    #[test]
    fn deterministic_for_a_seed() {
        let opts = GeneticOptions {
            seed: 11,
            max_generations: 50,
            ..Default::default()
        };
        let a = minimize(&rastrigin, &[-3.0; 3], &[3.0; 3], None, &opts);
        let b = minimize(&rastrigin, &[-3.0; 3], &[3.0; 3], None, &opts);
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn stays_inside_the_box() {
        let f = |x: &[f64]| -x[0] - x[1];
        let r = minimize(
            &f,
            &[0.0, 0.0],
            &[1.0, 2.0],
            None,
            &GeneticOptions::default(),
        );
        assert!(r.x[0] <= 1.0 && r.x[1] <= 2.0);
        assert!(r.value >= -3.0);
        assert!(r.value < -2.9);
    }
}
