use rand::seq::SliceRandom;

use crate::domain::{LoggedSample, SeededRng};
use crate::error::{invalid, Result};
use crate::linalg::NormalEquations;

/// Cross-fitted estimate of `mu(x) = E_{a ~ p(.|x)}[f*(x, a)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuisanceEstimate {
    /// `fold_models[k]` holds coefficients on `[x; 1]` fitted on every sample
    /// outside fold `k`.
    pub fold_models: Vec<Vec<f64>>,
    pub fold_assignment: Vec<usize>,
    pub num_folds: usize,
    /// Too few samples to cross-fit; every `mu_hat` is the midpoint of the
    /// reward range.
    pub fallback: bool,
}

impl NuisanceEstimate {
    /// Prediction of the model trained without fold `fold`.
    pub fn predict(&self, fold: usize, context: &[f64]) -> f64 {
        let coef = &self.fold_models[fold];
        let d = context.len();
        coef[..d].iter().zip(context).map(|(c, x)| c * x).sum::<f64>() + coef[d]
    }
}

/// Fills `mu_hat` for every sample by cross-fitting ridge regressions of
/// reward on `[x; 1]` (intercept unpenalized). Fold membership is a
/// balanced random assignment drawn from `fold_seed`; estimates are clipped
/// to `reward_range`.
pub fn cross_fit_mu(
    samples: &[LoggedSample],
    num_folds: usize,
    ridge: f64,
    fold_seed: SeededRng,
    reward_range: (f64, f64),
) -> Result<(NuisanceEstimate, Vec<LoggedSample>)> {
    if num_folds < 2 {
        return Err(invalid("cross-fitting needs at least two folds"));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(invalid("ridge must be finite and nonnegative"));
    }
    let (lo, hi) = reward_range;
    if !(lo < hi) {
        return Err(invalid("reward range must satisfy lo < hi"));
    }
    let n = samples.len();
    if n < num_folds {
        let mid = 0.5 * (lo + hi);
        let filled = samples.iter().cloned().map(|s| s.with_mu_hat(mid)).collect();
        let estimate = NuisanceEstimate {
            fold_models: Vec::new(),
            fold_assignment: vec![0; n],
            num_folds,
            fallback: true,
        };
        return Ok((estimate, filled));
    }
    let d = samples[0].context.len();
    if samples.iter().any(|s| s.context.len() != d) {
        return Err(invalid("samples have inconsistent context lengths"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut fold_seed.rng());
    let mut fold_assignment = vec![0; n];
    for (pos, &idx) in order.iter().enumerate() {
        fold_assignment[idx] = pos % num_folds;
    }

    let mut per_fold: Vec<NormalEquations> = (0..num_folds).map(|_| NormalEquations::new(d + 1)).collect();
    let mut row = vec![0.0; d + 1];
    for (s, &fold) in samples.iter().zip(&fold_assignment) {
        row[..d].copy_from_slice(&s.context);
        row[d] = 1.0;
        per_fold[fold].add_row(&row, s.reward);
    }
    let mut penalty = vec![ridge; d + 1];
    penalty[d] = 0.0;
    let fold_models: Vec<Vec<f64>> = (0..num_folds)
        .map(|k| {
            let mut complement = NormalEquations::new(d + 1);
            for (j, ne) in per_fold.iter().enumerate() {
                if j != k {
                    complement.merge(ne);
                }
            }
            complement.solve(&penalty).x
        })
        .collect();

    let estimate = NuisanceEstimate {
        fold_models,
        fold_assignment,
        num_folds,
        fallback: false,
    };
    let filled = samples
        .iter()
        .zip(&estimate.fold_assignment)
        .map(|(s, &fold)| {
            let mu = estimate.predict(fold, &s.context).clamp(lo, hi);
            s.clone().with_mu_hat(mu)
        })
        .collect();
    Ok((estimate, filled))
}
