use crate::domain::{FeatureMap, LoggedSample};
use crate::error::{invalid, Result};
use crate::linalg::NormalEquations;

use super::lasso::{fit_lasso_model, LassoPenalty};
use super::model::{LinearModel, RewardModel};
use super::rloss::check_sample;

fn design(samples: &[LoggedSample], map: &FeatureMap) -> Result<(Vec<f64>, Vec<f64>)> {
    let p = map.feature_dim();
    let mut z = vec![0.0; samples.len() * p];
    let mut y = Vec::with_capacity(samples.len());
    for (t, s) in samples.iter().enumerate() {
        check_sample(map, s)?;
        map.write_features(&s.context, s.action, &mut z[t * p..(t + 1) * p]);
        y.push(s.reward);
    }
    Ok((z, y))
}

/// Ridge least squares of `r_t` on `phi(x_t, a_t)`: the reward-model oracle
/// used by the IGW baseline.
pub fn fit_squared_error(samples: &[LoggedSample], map: &FeatureMap, ridge: f64) -> Result<RewardModel> {
    if samples.is_empty() {
        return Err(invalid("cannot fit on an empty sample"));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(invalid("ridge must be finite and nonnegative"));
    }
    let p = map.feature_dim();
    let mut ne = NormalEquations::new(p);
    let mut row = vec![0.0; p];
    for s in samples {
        check_sample(map, s)?;
        row.iter_mut().for_each(|v| *v = 0.0);
        map.write_features(&s.context, s.action, &mut row);
        ne.add_row(&row, s.reward);
    }
    let sol = ne.solve(&vec![ridge; p]);
    let mut model = LinearModel::from_theta(*map, sol.x);
    model.used_pseudo_inverse = sol.used_pseudo_inverse;
    Ok(RewardModel(model))
}

pub fn fit_squared_error_lasso(
    samples: &[LoggedSample],
    map: &FeatureMap,
    penalty: LassoPenalty,
    prelim_ridge: f64,
) -> Result<RewardModel> {
    if samples.is_empty() {
        return Err(invalid("cannot fit on an empty sample"));
    }
    let (z, y) = design(samples, map)?;
    fit_lasso_model(&z, &y, *map, penalty, prelim_ridge).map(RewardModel)
}
