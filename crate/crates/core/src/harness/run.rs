use crate::domain::{SeededRng, Stream};
use crate::env::{expected_regret, EnvStreams, Environment};
use crate::error::{Error, Result};
use crate::parallel;
use crate::policy::{Algorithm, FitRecord, Learner};

use super::config::RunConfig;

/// One row of a run trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub t: u64,
    pub epoch: u64,
    pub safe: bool,
    pub gamma: f64,
    /// Zero-based action index.
    pub action: usize,
    pub propensity: f64,
    pub reward: f64,
    pub expected_regret: f64,
    pub cum_expected_regret: f64,
    /// Estimated implicit regret of the sampled kernel at this context.
    pub implicit_regret: f64,
}

/// Everything recorded about one seed's run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunHistory {
    pub seed: u64,
    pub algorithm: Algorithm,
    pub num_actions: usize,
    pub rounds: Vec<RoundRecord>,
    pub fits: Vec<FitRecord>,
    /// `(coefficients, gamma)` of every epoch's kernel, epoch 1 first.
    pub models: Vec<(Vec<f64>, f64)>,
    pub trigger_round: Option<u64>,
}

impl RunHistory {
    pub fn cumulative_regret(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.cum_expected_regret).collect()
    }

    pub fn final_regret(&self) -> f64 {
        self.rounds.last().map_or(0.0, |r| r.cum_expected_regret)
    }
}

/// Runs `config`'s algorithm on its environment for one seed. The seed fixes
/// the environment parameters, the context and noise sequences, the action
/// draws and the cross-fitting folds; contexts and noise do not depend on
/// the algorithm, so runs of different algorithms with one seed are paired.
pub fn run_single(config: &RunConfig, seed: u64) -> Result<RunHistory> {
    let mut spec = config.environment.clone();
    spec.seed = seed;
    let env = Environment::build(spec.clone()).map_err(|e| Error::Config(e.to_string()))?;
    let reward_range = config.reward_range.unwrap_or_else(|| env.reward_range());
    let mut learner = Learner::new(config.policy_config(reward_range)?, seed)?;
    let mut streams = EnvStreams::new(seed);
    let mut action_rng = SeededRng::new(seed, Stream::Action).rng();

    let mut rounds = Vec::with_capacity(spec.horizon as usize);
    let mut cum = 0.0;
    for t in 1..=spec.horizon {
        let round = env.sample_round(t, &mut streams);
        let decision = learner.step(t, &round.context, &mut action_rng)?;
        let reward = round.reward(decision.action);
        let regret = expected_regret(&round.mean_rewards, decision.action);
        cum += regret;
        learner.record_reward(&decision, &round.context, reward)?;
        rounds.push(RoundRecord {
            t,
            epoch: decision.epoch,
            safe: decision.safe,
            gamma: decision.gamma,
            action: decision.action,
            propensity: decision.propensities.prob(decision.action),
            reward,
            expected_regret: regret,
            cum_expected_regret: cum,
            implicit_regret: decision.implicit_regret,
        });
    }
    Ok(RunHistory {
        seed,
        algorithm: config.algorithm,
        num_actions: spec.num_actions,
        rounds,
        fits: learner.fits().to_vec(),
        models: learner
            .state()
            .stored_kernels
            .iter()
            .map(|(model, gamma)| (model.theta.clone(), *gamma))
            .collect(),
        trigger_round: learner.trigger_round(),
    })
}

/// Per-seed cumulative regret with its across-seed mean and sample
/// standard deviation at every round.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    pub per_seed: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl RegretCurve {
    pub fn from_runs(runs: &[RunHistory]) -> Self {
        Self::from_series(runs.iter().map(RunHistory::cumulative_regret).collect())
    }

    pub fn from_series(per_seed: Vec<Vec<f64>>) -> Self {
        let len = per_seed.iter().map(Vec::len).min().unwrap_or(0);
        let n = per_seed.len() as f64;
        let mut mean = Vec::with_capacity(len);
        let mut std = Vec::with_capacity(len);
        for t in 0..len {
            let m = per_seed.iter().map(|s| s[t]).sum::<f64>() / n;
            let var = if per_seed.len() > 1 {
                per_seed.iter().map(|s| (s[t] - m).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            mean.push(m);
            std.push(var.sqrt());
        }
        Self { per_seed, mean, std }
    }

    pub fn horizon(&self) -> usize {
        self.mean.len()
    }

    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn final_std(&self) -> f64 {
        self.std.last().copied().unwrap_or(0.0)
    }

    /// Mean over seeds of `cum_regret(T) / cum_regret(T / 2)`.
    pub fn mean_growth_ratio(&self) -> f64 {
        let t = self.horizon();
        if t < 2 {
            return f64::NAN;
        }
        let ratios: Vec<f64> = self.per_seed.iter().map(|s| s[t - 1] / s[t / 2 - 1]).collect();
        ratios.iter().sum::<f64>() / ratios.len() as f64
    }
}

/// Result of running one configuration over all its seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub config: RunConfig,
    pub runs: Vec<RunHistory>,
    pub curve: RegretCurve,
}

/// Runs every seed of `config`, in parallel when the config asks for it.
pub fn execute(config: &RunConfig) -> Result<Experiment> {
    config.validate()?;
    let runs = parallel::try_map(config.execution, &config.seeds, |&seed| run_single(config, seed))?;
    let curve = RegretCurve::from_runs(&runs);
    Ok(Experiment {
        config: config.clone(),
        runs,
        curve,
    })
}
