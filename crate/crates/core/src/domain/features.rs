use crate::error::{invalid, Result};

/// Layout of the joint context-action feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureKind {
    /// One `[x; 1]` block per action; every other block is zero.
    /// `feature_dim = K * (d + 1)`.
    ArmBlockWithIntercept,
    /// Shared context coefficients plus a one-hot action offset:
    /// `phi(x, a) = [x; e_a]`, `feature_dim = d + K`.
    SharedWithIntercept,
    /// The context already carries one feature vector per action, laid out
    /// back to back: `x = [x_1; ...; x_K]` and `phi(x, a) = x_a`.
    /// `raw_dim = K * feature_dim`.
    Custom,
}

/// Maps a raw context and an action to a fixed-length feature vector, which
/// fixes the linear model class `g(x, a) = <theta, phi(x, a)>`.
///
/// Actions are zero-based throughout the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FeatureMap {
    raw_dim: usize,
    num_actions: usize,
    feature_dim: usize,
    kind: FeatureKind,
}

impl FeatureMap {
    pub fn arm_block(raw_dim: usize, num_actions: usize) -> Result<Self> {
        Self::check(raw_dim, num_actions)?;
        Ok(Self {
            raw_dim,
            num_actions,
            feature_dim: num_actions * (raw_dim + 1),
            kind: FeatureKind::ArmBlockWithIntercept,
        })
    }

    pub fn shared(raw_dim: usize, num_actions: usize) -> Result<Self> {
        Self::check(raw_dim, num_actions)?;
        Ok(Self {
            raw_dim,
            num_actions,
            feature_dim: raw_dim + num_actions,
            kind: FeatureKind::SharedWithIntercept,
        })
    }

    /// Per-action features of length `feature_dim` supplied directly in the
    /// context.
    pub fn custom(feature_dim: usize, num_actions: usize) -> Result<Self> {
        Self::check(feature_dim, num_actions)?;
        Ok(Self {
            raw_dim: feature_dim * num_actions,
            num_actions,
            feature_dim,
            kind: FeatureKind::Custom,
        })
    }

    fn check(dim: usize, num_actions: usize) -> Result<()> {
        if dim == 0 || num_actions == 0 {
            return Err(invalid("feature map dimensions must be positive"));
        }
        Ok(())
    }

    pub fn raw_dim(&self) -> usize {
        self.raw_dim
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn kind(&self) -> FeatureKind {
        self.kind
    }

    /// Returns `phi(x, a)`.
    pub fn featurize(&self, context: &[f64], action: usize) -> Result<Vec<f64>> {
        self.validate(context, action)?;
        let mut out = vec![0.0; self.feature_dim];
        self.write_features(context, action, &mut out);
        Ok(out)
    }

    pub(crate) fn validate(&self, context: &[f64], action: usize) -> Result<()> {
        if context.len() != self.raw_dim {
            return Err(invalid(format!(
                "context has length {}, feature map expects {}",
                context.len(),
                self.raw_dim
            )));
        }
        if action >= self.num_actions {
            return Err(invalid(format!(
                "action {action} out of range for {} actions",
                self.num_actions
            )));
        }
        Ok(())
    }

    /// Writes `phi(x, a)` into `out`, which must be zeroed and of length
    /// `feature_dim`. Inputs are assumed validated.
    pub(crate) fn write_features(&self, context: &[f64], action: usize, out: &mut [f64]) {
        let d = self.raw_dim;
        match self.kind {
            FeatureKind::ArmBlockWithIntercept => {
                let start = action * (d + 1);
                out[start..start + d].copy_from_slice(context);
                out[start + d] = 1.0;
            }
            FeatureKind::SharedWithIntercept => {
                out[..d].copy_from_slice(context);
                out[d + action] = 1.0;
            }
            FeatureKind::Custom => {
                let p = self.feature_dim;
                out.copy_from_slice(&context[action * p..(action + 1) * p]);
            }
        }
    }

    /// Adds `weight * phi(x, a)` into `out`.
    pub(crate) fn add_features(&self, context: &[f64], action: usize, weight: f64, out: &mut [f64]) {
        let d = self.raw_dim;
        match self.kind {
            FeatureKind::ArmBlockWithIntercept => {
                let start = action * (d + 1);
                for (o, x) in out[start..start + d].iter_mut().zip(context) {
                    *o += weight * x;
                }
                out[start + d] += weight;
            }
            FeatureKind::SharedWithIntercept => {
                for (o, x) in out[..d].iter_mut().zip(context) {
                    *o += weight * x;
                }
                out[d + action] += weight;
            }
            FeatureKind::Custom => {
                let p = self.feature_dim;
                for (o, x) in out.iter_mut().zip(&context[action * p..(action + 1) * p]) {
                    *o += weight * x;
                }
            }
        }
    }

    /// Per-action scores `(<theta, phi(x, a)>)_a`. Inputs are assumed
    /// validated.
    pub(crate) fn scores_unchecked(&self, theta: &[f64], context: &[f64]) -> Vec<f64> {
        let d = self.raw_dim;
        (0..self.num_actions)
            .map(|a| match self.kind {
                FeatureKind::ArmBlockWithIntercept => {
                    let block = &theta[a * (d + 1)..(a + 1) * (d + 1)];
                    dot(&block[..d], context) + block[d]
                }
                FeatureKind::SharedWithIntercept => dot(&theta[..d], context) + theta[d + a],
                FeatureKind::Custom => {
                    let p = self.feature_dim;
                    dot(theta, &context[a * p..(a + 1) * p])
                }
            })
            .collect()
    }

    /// Whether coordinate `j` is an intercept (left unpenalized by LASSO).
    pub fn is_intercept(&self, j: usize) -> bool {
        match self.kind {
            FeatureKind::ArmBlockWithIntercept => j % (self.raw_dim + 1) == self.raw_dim,
            FeatureKind::SharedWithIntercept => j >= self.raw_dim,
            FeatureKind::Custom => false,
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
