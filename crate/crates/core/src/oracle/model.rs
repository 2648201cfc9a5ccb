use crate::domain::FeatureMap;
use crate::error::Result;

/// Coefficients with `|theta_j|` at or below this count as zero.
pub const ACTIVE_TOL: f64 = 1e-10;

/// Linear scores `g(x, a) = <theta, phi(x, a)>` plus fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub theta: Vec<f64>,
    pub feature_map: FeatureMap,
    /// Nonzero penalized coefficients (LASSO fits; zero otherwise).
    pub sparsity: usize,
    /// The normal equations were singular and the minimum-norm solution
    /// was used.
    pub used_pseudo_inverse: bool,
    /// The LASSO solver hit its sweep limit.
    pub hit_sweep_limit: bool,
}

impl LinearModel {
    pub fn zero(feature_map: FeatureMap) -> Self {
        Self {
            theta: vec![0.0; feature_map.feature_dim()],
            feature_map,
            sparsity: 0,
            used_pseudo_inverse: false,
            hit_sweep_limit: false,
        }
    }

    pub fn from_theta(feature_map: FeatureMap, theta: Vec<f64>) -> Self {
        debug_assert_eq!(theta.len(), feature_map.feature_dim());
        Self {
            theta,
            feature_map,
            sparsity: 0,
            used_pseudo_inverse: false,
            hit_sweep_limit: false,
        }
    }

    /// `(<theta, phi(x, a)>)_a` for `a = 0..K`.
    pub fn predict(&self, context: &[f64]) -> Result<Vec<f64>> {
        self.feature_map.validate(context, 0)?;
        Ok(self.feature_map.scores_unchecked(&self.theta, context))
    }

    pub(crate) fn scores(&self, context: &[f64]) -> Vec<f64> {
        self.feature_map.scores_unchecked(&self.theta, context)
    }

    /// Active (nonzero) coefficients that multiply context coordinates
    /// rather than intercepts.
    pub fn active_context_coefficients(&self) -> usize {
        self.theta
            .iter()
            .enumerate()
            .filter(|(j, v)| !self.feature_map.is_intercept(*j) && v.abs() > ACTIVE_TOL)
            .count()
    }
}

/// Output of the R-loss oracle: a treatment effect model `g_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreatmentEffectModel(pub LinearModel);

/// Output of the squared-error oracle: a reward model `f_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardModel(pub LinearModel);

impl TreatmentEffectModel {
    pub fn predict(&self, context: &[f64]) -> Result<Vec<f64>> {
        self.0.predict(context)
    }

    pub fn into_inner(self) -> LinearModel {
        self.0
    }
}

impl RewardModel {
    pub fn predict(&self, context: &[f64]) -> Result<Vec<f64>> {
        self.0.predict(context)
    }

    pub fn into_inner(self) -> LinearModel {
        self.0
    }
}
