use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::domain::ActionDistribution;
use crate::env::{unit_sphere, Environment};
use crate::error::{invalid, Result};
use crate::policy::igw_kernel;

pub const MC_MIN_DRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub draws: usize,
}

/// Monte Carlo estimate of `E <e_a - p(x), g(x, .) - g*(x, .)>^2` over fresh
/// contexts from `env`. The action expectation is taken exactly at each
/// context, so only the context draw contributes noise.
pub fn mc_excess_risk(
    env: &Environment,
    kernel: impl Fn(&[f64]) -> Result<ActionDistribution>,
    g: impl Fn(&[f64]) -> Result<Vec<f64>>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<McEstimate> {
    if n < MC_MIN_DRAWS {
        return Err(invalid(format!("need at least {MC_MIN_DRAWS} draws, got {n}")));
    }
    let k = env.num_actions();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let x = unit_sphere(env.spec().d, rng);
        let p = kernel(&x)?;
        let scores = g(&x)?;
        if p.num_actions() != k || scores.len() != k {
            return Err(invalid("kernel and model must cover every action"));
        }
        let diff: Vec<f64> = (0..k).map(|a| scores[a] - env.g_star(&x, a)).collect();
        let mean: f64 = diff.iter().zip(p.probs()).map(|(d, q)| d * q).sum();
        let v: f64 = diff.iter().zip(p.probs()).map(|(d, q)| q * (d - mean).powi(2)).sum();
        sum += v;
        sum_sq += v * v;
    }
    let nf = n as f64;
    let mean = sum / nf;
    let var = ((sum_sq / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    Ok(McEstimate {
        mean,
        stderr: (var / nf).sqrt(),
        draws: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSweep {
    pub cases: usize,
    /// Largest `|sum_a p(a) - 1|` or negative mass seen.
    pub max_simplex_error: f64,
    /// Cases where the predicted best action got less than `1/K`.
    pub best_below_uniform: usize,
    /// Cases where the best action was not the most likely one.
    pub argmax_violations: usize,
}

impl KernelSweep {
    pub fn passed(&self) -> bool {
        self.max_simplex_error <= 1e-12 && self.best_below_uniform == 0 && self.argmax_violations == 0
    }
}

/// Draws `cases` random `(scores, gamma)` pairs and checks that the IGW
/// kernel is a distribution that favours the predicted best action.
pub fn kernel_invariant_sweep(cases: usize, rng: &mut ChaCha8Rng) -> Result<KernelSweep> {
    let mut sweep = KernelSweep {
        cases,
        max_simplex_error: 0.0,
        best_below_uniform: 0,
        argmax_violations: 0,
    };
    for _ in 0..cases {
        let k = rng.random_range(2..=16);
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let mut scores: Vec<f64> = (0..k).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        if rng.random::<f64>() < 0.1 {
            // Exact ties exercise the lowest-index rule.
            scores[k - 1] = scores[0];
        }
        let gamma = 10f64.powf(rng.random_range(-2.0..6.0));
        let p = igw_kernel(&scores, gamma)?;
        let probs = p.probs();
        let total: f64 = probs.iter().sum();
        let negative = probs.iter().fold(0.0f64, |m, &q| m.max(-q));
        sweep.max_simplex_error = sweep.max_simplex_error.max((total - 1.0).abs()).max(negative);
        let best = crate::env::argmax(&scores);
        if probs[best] < 1.0 / k as f64 {
            sweep.best_below_uniform += 1;
        }
        if probs.iter().any(|&q| q > probs[best]) {
            sweep.argmax_violations += 1;
        }
    }
    Ok(sweep)
}
