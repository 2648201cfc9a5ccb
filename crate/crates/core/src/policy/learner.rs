use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::domain::{ActionDistribution, EpochSchedule, FeatureMap, LoggedSample, SeededRng, Stream};
use crate::error::{invalid, Error, Result};
use crate::oracle::{
    cross_fit_mu, estimation_rate_xi, fit_rloss, fit_rloss_lasso, fit_squared_error, fit_squared_error_lasso,
    LassoPenalty, LinearModel,
};

use super::gamma::gamma_schedule;
use super::kernel::{estimated_implicit_regret, igw_kernel};
use super::safety::SafetyMonitor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// IGW over ridge R-loss fits.
    HteIgw,
    /// IGW over ridge squared-error reward fits.
    Igw,
    /// IGW over LASSO R-loss fits with sparsity-adaptive exploration.
    ModHteIgw,
    /// IGW over LASSO reward fits with sparsity-adaptive exploration.
    ModIgw,
    /// Uniformly random actions, never refits.
    Uniform,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::HteIgw,
        Algorithm::Igw,
        Algorithm::ModHteIgw,
        Algorithm::ModIgw,
        Algorithm::Uniform,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::HteIgw => "hte_igw",
            Algorithm::Igw => "igw",
            Algorithm::ModHteIgw => "mod_hte_igw",
            Algorithm::ModIgw => "mod_igw",
            Algorithm::Uniform => "uniform",
        }
    }

    pub fn uses_rloss(self) -> bool {
        matches!(self, Algorithm::HteIgw | Algorithm::ModHteIgw)
    }

    pub fn model_selection(self) -> bool {
        matches!(self, Algorithm::ModHteIgw | Algorithm::ModIgw)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| invalid(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Ridge penalty per sample: fits on `n` samples use `ridge_scale * n`.
    pub ridge_scale: f64,
    /// Ridge penalty of the cross-fitted `mu_hat` regressions.
    pub mu_ridge: f64,
    pub num_folds: usize,
    /// Constant in the estimation rate `xi`.
    pub c_xi: f64,
    /// Constant in the automatic LASSO penalty.
    pub c_lambda: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            ridge_scale: 1e-6,
            mu_ridge: 1.0,
            num_folds: 2,
            c_xi: 1.0,
            c_lambda: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyConfig {
    pub algorithm: Algorithm,
    pub schedule: EpochSchedule,
    pub delta: f64,
    pub oracle: OracleConfig,
    /// Minimum rewards before an epoch can serve as a safety benchmark.
    pub n_min: u64,
    pub reward_range: (f64, f64),
    pub feature_map: FeatureMap,
}

impl PolicyConfig {
    pub fn new(algorithm: Algorithm, feature_map: FeatureMap, reward_range: (f64, f64)) -> Self {
        Self {
            algorithm,
            schedule: EpochSchedule::Doubling,
            delta: 0.05,
            oracle: OracleConfig::default(),
            n_min: 32,
            reward_range,
            feature_map,
        }
    }
}

/// Mutable state of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    pub epoch: u64,
    pub gamma: f64,
    pub model: LinearModel,
    pub safe: bool,
    pub safe_epoch: Option<u64>,
    /// `stored_kernels[m - 1] = (g_hat_m, gamma_m)`.
    pub stored_kernels: Vec<(LinearModel, f64)>,
    pub delta: f64,
    pub delta_prime: f64,
}

/// What the learner did in one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub t: u64,
    pub epoch: u64,
    /// Safety status when the action was sampled.
    pub safe: bool,
    /// Exploration parameter of the kernel that was sampled.
    pub gamma: f64,
    pub action: usize,
    pub propensities: ActionDistribution,
    /// Model scores of the kernel that was sampled.
    pub scores: Vec<f64>,
    /// `sum_a p(a) (g_hat(a_hat) - g_hat(a))` at this context.
    pub implicit_regret: f64,
}

/// Diagnostics for one epoch-boundary refit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitRecord {
    /// Index of the epoch that will use the new model.
    pub epoch: u64,
    pub samples: usize,
    pub first_round: Option<u64>,
    pub last_round: Option<u64>,
    /// Hash of `(round, action, reward)` over the fit's input.
    pub input_hash: u64,
    pub sparsity: usize,
    pub active_context: usize,
    /// Dimension passed to the estimation rate.
    pub dim: usize,
    pub gamma: f64,
    pub used_pseudo_inverse: bool,
    pub hit_sweep_limit: bool,
    pub nuisance_fallback: bool,
    /// The buffer was empty and the previous model was kept.
    pub empty_buffer: bool,
}

/// FNV-1a over `(round, action, reward bits)` triples.
pub fn hash_rounds(rows: impl IntoIterator<Item = (u64, usize, f64)>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |v: u64| {
        for b in v.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for (t, a, r) in rows {
        eat(t);
        eat(a as u64);
        eat(r.to_bits());
    }
    h
}

/// Runs the per-round loop: epoch transitions and refits, kernel
/// construction, action sampling and the safety test.
#[derive(Debug, Clone)]
pub struct Learner {
    config: PolicyConfig,
    seed: u64,
    state: PolicyState,
    monitor: SafetyMonitor,
    buffer: Vec<LoggedSample>,
    buffer_rounds: Vec<u64>,
    fits: Vec<FitRecord>,
    trigger_round: Option<u64>,
}

impl Learner {
    /// `seed` drives the per-epoch fold assignment of cross-fitting.
    pub fn new(config: PolicyConfig, seed: u64) -> Result<Self> {
        if config.feature_map.num_actions() < 2 {
            return Err(invalid("need at least two actions"));
        }
        if config.oracle.num_folds < 2 {
            return Err(invalid("cross-fitting needs at least two folds"));
        }
        if !(config.oracle.ridge_scale >= 0.0) || !(config.oracle.mu_ridge >= 0.0) {
            return Err(invalid("ridge parameters must be nonnegative"));
        }
        if !(config.oracle.c_xi > 0.0) || !(config.oracle.c_lambda >= 0.0) {
            return Err(invalid("rate constants must be positive"));
        }
        let monitor = SafetyMonitor::new(config.reward_range, config.delta, config.n_min)?;
        let model = LinearModel::zero(config.feature_map);
        let state = PolicyState {
            epoch: 1,
            gamma: 1.0,
            model: model.clone(),
            safe: true,
            safe_epoch: None,
            stored_kernels: vec![(model, 1.0)],
            delta: config.delta,
            delta_prime: config.delta / 2.0,
        };
        Ok(Self {
            config,
            seed,
            state,
            monitor,
            buffer: Vec::new(),
            buffer_rounds: Vec::new(),
            fits: Vec::new(),
            trigger_round: None,
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn state(&self) -> &PolicyState {
        &self.state
    }

    pub fn monitor(&self) -> &SafetyMonitor {
        &self.monitor
    }

    pub fn fits(&self) -> &[FitRecord] {
        &self.fits
    }

    /// Round at which the safety test failed, if it did.
    pub fn trigger_round(&self) -> Option<u64> {
        self.trigger_round
    }

    /// The kernel the learner would use at `context` right now.
    pub fn current_kernel(&self, context: &[f64]) -> Result<(ActionDistribution, Vec<f64>, f64)> {
        let (model, gamma) = if self.state.safe {
            (&self.state.model, self.state.gamma)
        } else {
            let m_hat = self.state.safe_epoch.expect("unsafe state always names a safe epoch");
            let (model, gamma) = &self.state.stored_kernels[(m_hat - 1) as usize];
            (model, *gamma)
        };
        let scores = model.scores(context);
        Ok((igw_kernel(&scores, gamma)?, scores, gamma))
    }

    /// Samples the action for round `t`.
    pub fn step<R: Rng + ?Sized>(&mut self, t: u64, context: &[f64], rng: &mut R) -> Result<Decision> {
        self.config.feature_map.validate(context, 0)?;
        let epoch = self.config.schedule.epoch_of(t)?;
        if epoch < self.state.epoch {
            return Err(invalid(format!(
                "round {t} precedes the current epoch {}",
                self.state.epoch
            )));
        }
        while self.state.epoch < epoch {
            self.epoch_boundary()?;
        }
        let (propensities, scores, gamma) = self.current_kernel(context)?;
        let action = propensities.sample_with(rng.random::<f64>());
        let implicit_regret = estimated_implicit_regret(&scores, &propensities);
        Ok(Decision {
            t,
            epoch,
            safe: self.state.safe,
            gamma,
            action,
            propensities,
            scores,
            implicit_regret,
        })
    }

    /// Reports the reward observed for `decision`.
    pub fn record_reward(&mut self, decision: &Decision, context: &[f64], reward: f64) -> Result<()> {
        self.monitor.record(decision.epoch, reward)?;
        if !self.state.safe {
            return Ok(());
        }
        self.buffer.push(LoggedSample::new(
            context.to_vec(),
            decision.action,
            decision.propensities.clone(),
            reward,
        ));
        self.buffer_rounds.push(decision.t);
        if self.config.algorithm == Algorithm::Uniform {
            return Ok(());
        }
        let verdict = self.monitor.check(decision.t, decision.epoch);
        if !verdict.safe {
            self.state.safe = false;
            self.state.safe_epoch = verdict.safe_epoch;
            self.trigger_round = Some(decision.t);
        }
        Ok(())
    }

    fn dim_for(&self, model: &LinearModel) -> usize {
        if self.config.algorithm.model_selection() {
            model.sparsity.max(1)
        } else {
            self.config.feature_map.feature_dim()
        }
    }

    /// Closes the current epoch: refits on its buffer and sets the next
    /// epoch's model and exploration parameter. A no-op beyond advancing the
    /// epoch counter once the learner is unsafe.
    fn epoch_boundary(&mut self) -> Result<()> {
        let m = self.state.epoch;
        let buffer = std::mem::take(&mut self.buffer);
        let rounds = std::mem::take(&mut self.buffer_rounds);
        self.state.epoch = m + 1;
        if !self.state.safe || self.config.algorithm == Algorithm::Uniform {
            let kernel = (self.state.model.clone(), self.state.gamma);
            self.state.stored_kernels.push(kernel);
            return Ok(());
        }

        let input_hash = hash_rounds(rounds.iter().zip(&buffer).map(|(&t, s)| (t, s.action, s.reward)));
        let mut record = FitRecord {
            epoch: m + 1,
            samples: buffer.len(),
            first_round: rounds.first().copied(),
            last_round: rounds.last().copied(),
            input_hash,
            sparsity: 0,
            active_context: 0,
            dim: 0,
            gamma: self.state.gamma,
            used_pseudo_inverse: false,
            hit_sweep_limit: false,
            nuisance_fallback: false,
            empty_buffer: buffer.is_empty(),
        };
        if buffer.is_empty() {
            let kernel = (self.state.model.clone(), self.state.gamma);
            self.state.stored_kernels.push(kernel);
            self.fits.push(record);
            return Ok(());
        }

        let map = self.config.feature_map;
        let oracle = self.config.oracle;
        let ridge = oracle.ridge_scale * buffer.len() as f64;
        let lasso = LassoPenalty::Auto {
            c_lambda: oracle.c_lambda,
        };
        let model = match self.config.algorithm {
            Algorithm::HteIgw | Algorithm::ModHteIgw => {
                let fold_seed = SeededRng::new(self.seed, Stream::Fold(m as u32));
                let (nuisance, filled) = cross_fit_mu(
                    &buffer,
                    oracle.num_folds,
                    oracle.mu_ridge,
                    fold_seed,
                    self.config.reward_range,
                )?;
                record.nuisance_fallback = nuisance.fallback;
                if self.config.algorithm == Algorithm::HteIgw {
                    fit_rloss(&filled, &map, ridge)?.into_inner()
                } else {
                    fit_rloss_lasso(&filled, &map, lasso, ridge)?.into_inner()
                }
            }
            Algorithm::Igw => fit_squared_error(&buffer, &map, ridge)?.into_inner(),
            Algorithm::ModIgw => fit_squared_error_lasso(&buffer, &map, lasso, ridge)?.into_inner(),
            Algorithm::Uniform => unreachable!("uniform never refits"),
        };

        let dim = self.dim_for(&model);
        let prev_len = self.config.schedule.epoch_len(m).unwrap_or(buffer.len() as u64).max(1);
        let c_xi = oracle.c_xi;
        let gamma = gamma_schedule(prev_len, m + 1, self.state.delta_prime, map.num_actions(), |n, zeta| {
            estimation_rate_xi(n, zeta, dim, c_xi).expect("zeta stays inside (0, 1)")
        });

        record.sparsity = model.sparsity;
        record.active_context = model.active_context_coefficients();
        record.dim = dim;
        record.gamma = gamma;
        record.used_pseudo_inverse = model.used_pseudo_inverse;
        record.hit_sweep_limit = model.hit_sweep_limit;
        self.fits.push(record);

        self.state.model = model.clone();
        self.state.gamma = gamma;
        self.state.stored_kernels.push((model, gamma));
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        SeededRng::new(1, Stream::Action).rng()
    }

    fn learner(algorithm: Algorithm, schedule: EpochSchedule) -> Learner {
        let map = FeatureMap::arm_block(2, 2).unwrap();
        let mut cfg = PolicyConfig::new(algorithm, map, (0.0, 1.0));
        cfg.schedule = schedule;
        Learner::new(cfg, 9).unwrap()
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("falcon".parse::<Algorithm>().is_err());
    }

    #[test]
    fn first_epoch_is_uniform() {
        let mut l = learner(Algorithm::HteIgw, EpochSchedule::Doubling);
        let mut r = rng();
        for t in 1..=2 {
            let d = l.step(t, &[0.3, -0.7], &mut r).unwrap();
            assert_eq!(d.propensities.probs(), &[0.5, 0.5]);
            assert_eq!(d.gamma, 1.0);
            l.record_reward(&d, &[0.3, -0.7], 0.5).unwrap();
        }
    }

    #[test]
    fn out_of_range_reward_is_rejected() {
        let mut l = learner(Algorithm::Igw, EpochSchedule::Doubling);
        let d = l.step(1, &[0.0, 1.0], &mut rng()).unwrap();
        assert!(l.record_reward(&d, &[0.0, 1.0], 1.5).is_err());
    }

    #[test]
    fn zero_residual_targets_keep_uniform_kernel() {
        // All rewards equal, so mu_hat matches every reward and the R-loss
        // target is identically zero.
        let mut l = learner(Algorithm::HteIgw, EpochSchedule::fixed(20).unwrap());
        let mut r = rng();
        let mut ctx_rng = SeededRng::new(2, Stream::Context).rng();
        for t in 1..=40 {
            let x = [ctx_rng.random_range(-1.0..1.0), ctx_rng.random_range(-1.0..1.0)];
            let d = l.step(t, &x, &mut r).unwrap();
            if t > 20 {
                assert!(d.scores.iter().all(|s| s.abs() < 1e-12));
                assert!((d.propensities.prob(0) - 0.5).abs() < 1e-12);
            }
            l.record_reward(&d, &x, 0.25).unwrap();
        }
        assert!(l.state().model.theta.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn empty_epoch_keeps_previous_model() {
        let mut l = learner(Algorithm::Igw, EpochSchedule::fixed(5).unwrap());
        let mut r = rng();
        // Skip straight from round 1 to round 12: epoch 2 sees no data.
        let d = l.step(1, &[0.1, 0.2], &mut r).unwrap();
        l.record_reward(&d, &[0.1, 0.2], 0.7).unwrap();
        l.step(12, &[0.1, 0.2], &mut r).unwrap();
        assert_eq!(l.fits().len(), 2);
        assert!(!l.fits()[0].empty_buffer);
        assert!(l.fits()[1].empty_buffer);
        assert_eq!(l.state().stored_kernels.len(), 3);
        assert_eq!(l.state().stored_kernels[1], l.state().stored_kernels[2]);
    }

    #[test]
    fn hash_depends_on_every_field() {
        let base = hash_rounds([(1, 0, 0.5), (2, 1, 0.25)]);
        assert_ne!(base, hash_rounds([(1, 0, 0.5), (2, 1, 0.26)]));
        assert_ne!(base, hash_rounds([(1, 0, 0.5), (2, 0, 0.25)]));
        assert_ne!(base, hash_rounds([(1, 0, 0.5), (3, 1, 0.25)]));
        assert_eq!(base, hash_rounds([(1, 0, 0.5), (2, 1, 0.25)]));
    }
}
