use crate::error::{invalid, Result};

const SIMPLEX_TOL: f64 = 1e-12;

/// Probability vector over the `K` actions, i.e. the kernel `p(. | x)` at one
/// context.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution {
    probs: Vec<f64>,
}

impl ActionDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("action distribution needs at least one action"));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(invalid(format!("probabilities must lie in [0, 1]: {probs:?}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(num_actions: usize) -> Self {
        Self {
            probs: vec![1.0 / num_actions as f64; num_actions],
        }
    }

    /// Point mass on `action`.
    pub fn deterministic(num_actions: usize, action: usize) -> Self {
        let mut probs = vec![0.0; num_actions];
        probs[action] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, action: usize) -> f64 {
        self.probs[action]
    }

    pub fn num_actions(&self) -> usize {
        self.probs.len()
    }

    /// Inverse-CDF draw from a uniform `u` in `[0, 1)`. Zero-probability
    /// actions are never returned.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (a, &p) in self.probs.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            acc += p;
            last_positive = a;
            if u < acc {
                return a;
            }
        }
        last_positive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_simplex() {
        assert!(ActionDistribution::new(vec![0.5, 0.5]).is_ok());
        assert!(ActionDistribution::new(vec![0.5, 0.6]).is_err());
        assert!(ActionDistribution::new(vec![-0.1, 1.1]).is_err());
        assert!(ActionDistribution::new(vec![]).is_err());
    }

    #[test]
    fn inverse_cdf_skips_zero_mass() {
        let p = ActionDistribution::new(vec![0.25, 0.0, 0.75]).unwrap();
        assert_eq!(p.sample_with(0.0), 0);
        assert_eq!(p.sample_with(0.2499), 0);
        assert_eq!(p.sample_with(0.25), 2);
        assert_eq!(p.sample_with(0.999_999), 2);
        let point = ActionDistribution::deterministic(3, 1);
        assert_eq!(point.sample_with(0.0), 1);
        assert_eq!(point.sample_with(0.99), 1);
    }
}
