//! Synthetic contextual bandit environments with known ground truth.
//!
//! Every scenario writes the mean reward as `f*(x, a) = g*(x, a) + h*_t(x)`,
//! so regret can be measured exactly and the treatment effect part `g*` is
//! available to diagnostics. Contexts are uniform on the unit sphere in
//! `R^d`; rewards carry additive noise `sqrt(12 sigma^2) * (U - 1/2)` shared by
//! all actions in a round.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::domain::{SeededRng, Stream};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// `f*(x, a) = 1 + <theta_a, x>`, `h* = 0`.
    LinLin,
    /// `g*(x, a) = u_a + 1{a = 1}`, `h*(x) = 1 + <theta, x>`.
    LinConst,
    /// `g*` as `LinConst`, `h*(x) = -1{x_0 > 1/4} max_a (1 + <theta_a, x>)`.
    StepLin,
    /// `g*(x, a) = 1{a = 1} + <theta_a, x> + sin(<theta_a, x>)`, `h*` as `StepLin`.
    Perturbed,
    /// `g*` as `LinConst`, `h*_t(x) = 1 + <theta, x> + A sin(2 pi t / P)`.
    Nonstationary,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::LinLin,
        Scenario::LinConst,
        Scenario::StepLin,
        Scenario::Perturbed,
        Scenario::Nonstationary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::LinLin => "lin_lin",
            Scenario::LinConst => "lin_const",
            Scenario::StepLin => "step_lin",
            Scenario::Perturbed => "perturbed",
            Scenario::Nonstationary => "nonstationary",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| invalid(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentSpec {
    pub scenario: Scenario,
    pub d: usize,
    pub num_actions: usize,
    pub sigma: f64,
    pub horizon: u64,
    /// Seeds the ground truth draw and the context and noise streams.
    pub seed: u64,
    /// Amplitude of the drifting confounder (`Nonstationary` only).
    pub amplitude: f64,
    /// Period in rounds of the drifting confounder (`Nonstationary` only).
    pub period: f64,
}

impl EnvironmentSpec {
    pub fn new(scenario: Scenario, d: usize, num_actions: usize, sigma: f64, horizon: u64, seed: u64) -> Self {
        Self {
            scenario,
            d,
            num_actions,
            sigma,
            horizon,
            seed,
            amplitude: 0.5,
            period: 500.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("context dimension d must be at least 1"));
        }
        if self.num_actions < 2 {
            return Err(invalid("need at least two actions"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid("noise scale sigma must be finite and nonnegative"));
        }
        if self.scenario == Scenario::Nonstationary && !(self.period > 0.0 && self.amplitude.is_finite()) {
            return Err(invalid(
                "nonstationary scenario needs a positive period and finite amplitude",
            ));
        }
        Ok(())
    }
}

/// Parameters drawn once per environment. All scenarios draw the same
/// parameter set in the same order, each using the parts it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Shared confounder direction `theta` (unit norm).
    pub theta: Vec<f64>,
    /// Per-action directions `theta_a` (unit norm).
    pub arm_thetas: Vec<Vec<f64>>,
    /// Per-action offsets `u_a` in `[0, 1]`.
    pub offsets: Vec<f64>,
    /// Threshold on the first context coordinate for the step confounder.
    pub step_threshold: f64,
}

impl GroundTruth {
    pub fn draw(d: usize, num_actions: usize, rng: &mut ChaCha8Rng) -> Self {
        let theta = unit_sphere(d, rng);
        let arm_thetas = (0..num_actions).map(|_| unit_sphere(d, rng)).collect();
        let offsets = (0..num_actions).map(|_| rng.random::<f64>()).collect();
        Self {
            theta,
            arm_thetas,
            offsets,
            step_threshold: 0.25,
        }
    }
}

/// Context and noise streams for one run.
#[derive(Debug, Clone)]
pub struct EnvStreams {
    pub context: ChaCha8Rng,
    pub noise: ChaCha8Rng,
}

impl EnvStreams {
    pub fn new(seed: u64) -> Self {
        Self {
            context: SeededRng::new(seed, Stream::Context).rng(),
            noise: SeededRng::new(seed, Stream::Noise).rng(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub t: u64,
    pub context: Vec<f64>,
    /// `f*_t(x, .)`.
    pub mean_rewards: Vec<f64>,
    pub noise: f64,
}

impl Round {
    pub fn reward(&self, action: usize) -> f64 {
        self.mean_rewards[action] + self.noise
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    spec: EnvironmentSpec,
    truth: GroundTruth,
}

impl Environment {
    pub fn build(spec: EnvironmentSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = SeededRng::new(spec.seed, Stream::GroundTruth).rng();
        let truth = GroundTruth::draw(spec.d, spec.num_actions, &mut rng);
        Ok(Self { spec, truth })
    }

    /// Builds an environment around explicitly supplied parameters.
    pub fn with_truth(spec: EnvironmentSpec, truth: GroundTruth) -> Result<Self> {
        spec.validate()?;
        if truth.theta.len() != spec.d
            || truth.arm_thetas.len() != spec.num_actions
            || truth.arm_thetas.iter().any(|t| t.len() != spec.d)
            || truth.offsets.len() != spec.num_actions
        {
            return Err(invalid("ground truth dimensions do not match the spec"));
        }
        Ok(Self { spec, truth })
    }

    pub fn spec(&self) -> &EnvironmentSpec {
        &self.spec
    }

    pub fn truth(&self) -> &GroundTruth {
        &self.truth
    }

    pub fn num_actions(&self) -> usize {
        self.spec.num_actions
    }

    fn arm_projection(&self, x: &[f64], a: usize) -> f64 {
        dot(&self.truth.arm_thetas[a], x)
    }

    /// Treatment effect part `g*(x, a)`.
    pub fn g_star(&self, x: &[f64], a: usize) -> f64 {
        let first = if a == 0 { 1.0 } else { 0.0 };
        match self.spec.scenario {
            Scenario::LinLin => 1.0 + self.arm_projection(x, a),
            Scenario::LinConst | Scenario::StepLin | Scenario::Nonstationary => self.truth.offsets[a] + first,
            Scenario::Perturbed => {
                let s = self.arm_projection(x, a);
                first + s + s.sin()
            }
        }
    }

    /// Action-independent part `h*_t(x)`.
    pub fn h_star(&self, t: u64, x: &[f64]) -> f64 {
        match self.spec.scenario {
            Scenario::LinLin => 0.0,
            Scenario::LinConst => 1.0 + dot(&self.truth.theta, x),
            Scenario::StepLin | Scenario::Perturbed => {
                if x[0] > self.truth.step_threshold {
                    let best = (0..self.spec.num_actions)
                        .map(|a| 1.0 + self.arm_projection(x, a))
                        .fold(f64::NEG_INFINITY, f64::max);
                    -best
                } else {
                    0.0
                }
            }
            Scenario::Nonstationary => {
                let phase = 2.0 * PI * t as f64 / self.spec.period;
                1.0 + dot(&self.truth.theta, x) + self.spec.amplitude * phase.sin()
            }
        }
    }

    /// `f*_t(x, .)`.
    pub fn mean_rewards(&self, t: u64, x: &[f64]) -> Vec<f64> {
        let h = self.h_star(t, x);
        (0..self.spec.num_actions).map(|a| self.g_star(x, a) + h).collect()
    }

    pub fn sample_round(&self, t: u64, streams: &mut EnvStreams) -> Round {
        let context = unit_sphere(self.spec.d, &mut streams.context);
        let scale = (12.0 * self.spec.sigma * self.spec.sigma).sqrt();
        let noise = scale * (streams.noise.random::<f64>() - 0.5);
        let mean_rewards = self.mean_rewards(t, &context);
        Round {
            t,
            context,
            mean_rewards,
            noise,
        }
    }

    /// A range guaranteed to contain every realized reward.
    pub fn reward_range(&self) -> (f64, f64) {
        let half_noise = 3f64.sqrt() * self.spec.sigma;
        let const_effect = |a: usize| self.truth.offsets[a] + if a == 0 { 1.0 } else { 0.0 };
        let k = self.spec.num_actions;
        let (const_lo, const_hi) = (0..k)
            .map(const_effect)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        // <theta, x> lies in [-1, 1] for unit vectors.
        let (lo, hi) = match self.spec.scenario {
            Scenario::LinLin => (0.0, 2.0),
            Scenario::LinConst => (const_lo, const_hi + 2.0),
            Scenario::StepLin => (const_lo - 2.0, const_hi),
            Scenario::Perturbed => {
                let wiggle = 1.0 + 1f64.sin();
                (-wiggle - 2.0, 1.0 + wiggle)
            }
            Scenario::Nonstationary => {
                let amp = self.spec.amplitude.abs();
                (const_lo - amp, const_hi + 2.0 + amp)
            }
        };
        (lo - half_noise, hi + half_noise)
    }
}

/// `argmax_a f*(x, a)`, lowest index on ties.
pub fn optimal_action(mean_rewards: &[f64]) -> usize {
    argmax(mean_rewards)
}

/// `f*(x, pi*(x)) - f*(x, a)`.
pub fn expected_regret(mean_rewards: &[f64], action: usize) -> f64 {
    mean_rewards[optimal_action(mean_rewards)] - mean_rewards[action]
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Uniform draw from the unit sphere via a normalized isotropic Gaussian.
pub fn unit_sphere(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(scenario: Scenario) -> EnvironmentSpec {
        EnvironmentSpec::new(scenario, 5, 2, 0.1, 100, 11)
    }

    fn basis(d: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        v
    }

    #[test]
    fn lin_lin_basis_example() {
        let truth = GroundTruth {
            theta: basis(3, 0),
            arm_thetas: vec![basis(3, 0), basis(3, 0)],
            offsets: vec![0.5, 0.5],
            step_threshold: 0.25,
        };
        let env = Environment::with_truth(EnvironmentSpec::new(Scenario::LinLin, 3, 2, 0.1, 10, 0), truth).unwrap();
        assert_eq!(env.mean_rewards(1, &basis(3, 0))[0], 2.0);
    }

    #[test]
    fn lin_const_constant_effect() {
        let truth = GroundTruth {
            theta: basis(3, 1),
            arm_thetas: vec![basis(3, 0), basis(3, 2)],
            offsets: vec![0.3, 0.6],
            step_threshold: 0.25,
        };
        let env = Environment::with_truth(EnvironmentSpec::new(Scenario::LinConst, 3, 2, 0.1, 10, 0), truth).unwrap();
        let mut streams = EnvStreams::new(3);
        for t in 1..50 {
            let round = env.sample_round(t, &mut streams);
            let effect = env.g_star(&round.context, 0) - env.g_star(&round.context, 1);
            assert!((effect - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn paper_scale_spec_runs() {
        let env = Environment::build(EnvironmentSpec::new(Scenario::LinLin, 100, 2, 0.1, 10_000, 1)).unwrap();
        let mut streams = EnvStreams::new(1);
        let round = env.sample_round(1, &mut streams);
        assert_eq!(round.context.len(), 100);
    }

    #[test]
    fn scenario_names_round_trip() {
        for sc in Scenario::ALL {
            assert_eq!(sc.name().parse::<Scenario>().unwrap(), sc);
        }
        assert!("lin_quad".parse::<Scenario>().is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        let mut s = spec(Scenario::LinLin);
        s.num_actions = 1;
        assert!(Environment::build(s).is_err());
        let mut s = spec(Scenario::LinLin);
        s.sigma = -1.0;
        assert!(Environment::build(s).is_err());
    }

    #[test]
    fn zero_sigma_means_zero_noise() {
        let mut s = spec(Scenario::StepLin);
        s.sigma = 0.0;
        let env = Environment::build(s).unwrap();
        let mut streams = EnvStreams::new(5);
        for t in 1..200 {
            assert_eq!(env.sample_round(t, &mut streams).noise, 0.0);
        }
    }

    #[test]
    fn contexts_on_sphere_and_noise_bounded() {
        for sc in Scenario::ALL {
            let env = Environment::build(spec(sc)).unwrap();
            let (lo, hi) = env.reward_range();
            let mut streams = EnvStreams::new(9);
            for t in 1..2000 {
                let r = env.sample_round(t, &mut streams);
                let norm: f64 = r.context.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-12);
                assert!(r.noise.abs() <= (12.0 * 0.01f64).sqrt() / 2.0);
                for a in 0..2 {
                    assert!(lo <= r.reward(a) && r.reward(a) <= hi, "{sc}: reward outside range");
                }
            }
        }
    }

    #[test]
    fn noise_variance_matches_sigma_squared() {
        let env = Environment::build(spec(Scenario::LinLin)).unwrap();
        let mut streams = EnvStreams::new(21);
        let n = 1_000_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for t in 1..=n {
            let e = env.sample_round(t, &mut streams).noise;
            s1 += e;
            s2 += e * e;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!((var - 0.01).abs() < 0.0005, "variance {var}");
    }

    #[test]
    fn decomposition_gaps_match() {
        for sc in Scenario::ALL {
            let env = Environment::build(EnvironmentSpec::new(sc, 4, 3, 0.1, 10, 2)).unwrap();
            let mut streams = EnvStreams::new(4);
            for t in 1..300 {
                let r = env.sample_round(t, &mut streams);
                for a in 0..3 {
                    for b in 0..3 {
                        let df = r.mean_rewards[a] - r.mean_rewards[b];
                        let dg = env.g_star(&r.context, a) - env.g_star(&r.context, b);
                        assert!((df - dg).abs() < 1e-12, "{sc}");
                    }
                }
            }
        }
    }

    #[test]
    fn ground_truth_reproducible_and_normalized() {
        let a = Environment::build(spec(Scenario::Perturbed)).unwrap();
        let b = Environment::build(spec(Scenario::Perturbed)).unwrap();
        assert_eq!(a.truth(), b.truth());
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm(&a.truth().theta) - 1.0).abs() < 1e-12);
        for th in &a.truth().arm_thetas {
            assert!((norm(th) - 1.0).abs() < 1e-12);
        }
        assert!(a.truth().offsets.iter().all(|u| (0.0..=1.0).contains(u)));
    }

    #[test]
    fn regret_examples() {
        assert_eq!(expected_regret(&[0.2, 0.9], 1), 0.0);
        assert!((expected_regret(&[0.2, 0.9], 0) - 0.7).abs() < 1e-15);
        assert_eq!(optimal_action(&[0.5, 0.5]), 0);
    }

    proptest::proptest! {
        #[test]
        fn regret_nonnegative_zero_iff_best(means in proptest::collection::vec(-3.0f64..3.0, 2..6), pick in 0usize..6) {
            let a = pick % means.len();
            let reg = expected_regret(&means, a);
            proptest::prop_assert!(reg >= 0.0);
            let best = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            proptest::prop_assert_eq!(reg == 0.0, means[a] == best);
        }
    }
}
