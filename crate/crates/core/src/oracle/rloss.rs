use crate::domain::{FeatureMap, LoggedSample};
use crate::error::{invalid, Result};
use crate::linalg::NormalEquations;

use super::lasso::{fit_lasso_model, LassoPenalty};
use super::model::{LinearModel, TreatmentEffectModel};

/// Row-major residualized design: `z_t = phi(x_t, a_t) - sum_a p_t(a) phi(x_t, a)`
/// and residual outcomes `y_t = r_t - mu_hat_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualDesign {
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub dim: usize,
}

impl ResidualDesign {
    pub fn rows(&self) -> usize {
        self.y.len()
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.z[t * self.dim..(t + 1) * self.dim]
    }

    fn normal_equations(&self) -> NormalEquations {
        let mut ne = NormalEquations::new(self.dim);
        for t in 0..self.rows() {
            ne.add_row(self.row(t), self.y[t]);
        }
        ne
    }
}

pub(crate) fn check_sample(map: &FeatureMap, s: &LoggedSample) -> Result<()> {
    map.validate(&s.context, s.action)?;
    if s.propensities.num_actions() != map.num_actions() {
        return Err(invalid("propensity vector length does not match the number of actions"));
    }
    Ok(())
}

pub fn residualize(samples: &[LoggedSample], map: &FeatureMap) -> Result<ResidualDesign> {
    let p = map.feature_dim();
    let mut z = vec![0.0; samples.len() * p];
    let mut y = Vec::with_capacity(samples.len());
    for (t, s) in samples.iter().enumerate() {
        check_sample(map, s)?;
        let mu = s
            .mu_hat
            .ok_or_else(|| invalid("sample is missing its cross-fitted mu_hat"))?;
        let row = &mut z[t * p..(t + 1) * p];
        map.add_features(&s.context, s.action, 1.0, row);
        for (a, &pa) in s.propensities.probs().iter().enumerate() {
            if pa != 0.0 {
                map.add_features(&s.context, a, -pa, row);
            }
        }
        y.push(s.reward - mu);
    }
    Ok(ResidualDesign { z, y, dim: p })
}

/// Ridge-regularized empirical R-loss minimizer over the linear class:
/// `argmin_theta sum_t (y_t - <theta, z_t>)^2 + ridge * ||theta||^2`.
pub fn fit_rloss(samples: &[LoggedSample], map: &FeatureMap, ridge: f64) -> Result<TreatmentEffectModel> {
    if samples.is_empty() {
        return Err(invalid("cannot fit on an empty sample"));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(invalid("ridge must be finite and nonnegative"));
    }
    let design = residualize(samples, map)?;
    let sol = design.normal_equations().solve(&vec![ridge; map.feature_dim()]);
    let mut model = LinearModel::from_theta(*map, sol.x);
    model.used_pseudo_inverse = sol.used_pseudo_inverse;
    Ok(TreatmentEffectModel(model))
}

/// LASSO variant of [`fit_rloss`]; intercept coordinates are unpenalized and
/// `sparsity` counts the active penalized coordinates. `prelim_ridge` is
/// used only by the automatic penalty rule.
pub fn fit_rloss_lasso(
    samples: &[LoggedSample],
    map: &FeatureMap,
    penalty: LassoPenalty,
    prelim_ridge: f64,
) -> Result<TreatmentEffectModel> {
    if samples.is_empty() {
        return Err(invalid("cannot fit on an empty sample"));
    }
    let design = residualize(samples, map)?;
    fit_lasso_model(&design.z, &design.y, *map, penalty, prelim_ridge).map(TreatmentEffectModel)
}

/// Mean over samples of `(r_t - mu_hat_t - <e_{a_t} - p_t, g(x_t, .)>)^2`,
/// evaluated through the model's per-action predictions.
pub fn empirical_rloss(model: &TreatmentEffectModel, samples: &[LoggedSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("empirical risk of an empty sample is undefined"));
    }
    let map = &model.0.feature_map;
    let mut total = 0.0;
    for s in samples {
        check_sample(map, s)?;
        let mu = s
            .mu_hat
            .ok_or_else(|| invalid("sample is missing its cross-fitted mu_hat"))?;
        let g = model.0.scores(&s.context);
        let centered: f64 = g[s.action] - s.propensities.probs().iter().zip(&g).map(|(p, v)| p * v).sum::<f64>();
        total += (s.reward - mu - centered).powi(2);
    }
    Ok(total / samples.len() as f64)
}
