use super::ActionDistribution;

/// One logged interaction: the context, the sampled action, the kernel it was
/// sampled from, the realized reward and (once cross-fitting has run) the
/// out-of-fold estimate of the mean realized reward at this context.
#[derive(Debug, Clone, PartialEq)]
pub struct LoggedSample {
    pub context: Vec<f64>,
    pub action: usize,
    pub propensities: ActionDistribution,
    pub reward: f64,
    pub mu_hat: Option<f64>,
}

impl LoggedSample {
    pub fn new(context: Vec<f64>, action: usize, propensities: ActionDistribution, reward: f64) -> Self {
        debug_assert!(propensities.prob(action) > 0.0);
        Self {
            context,
            action,
            propensities,
            reward,
            mu_hat: None,
        }
    }

    pub fn with_mu_hat(mut self, mu_hat: f64) -> Self {
        self.mu_hat = Some(mu_hat);
        self
    }
}
