#![allow(dead_code)]

use hte_bandit::domain::{ActionDistribution, EpochSchedule, FeatureMap, LoggedSample, SeededRng, Stream};
use hte_bandit::env::unit_sphere;
use hte_bandit::policy::{Algorithm, Learner, PolicyConfig};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(k: u32) -> ChaCha8Rng {
    SeededRng::new(0x5eed, Stream::Aux(k)).rng()
}

pub fn random_probs(rng: &mut ChaCha8Rng, k: usize) -> ActionDistribution {
    let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = w.iter().sum();
    let mut probs: Vec<f64> = w.iter().map(|v| v / total).collect();
    let residue = 1.0 - probs.iter().sum::<f64>();
    probs[0] += residue;
    ActionDistribution::new(probs).unwrap()
}

/// Logged samples under random full-support propensities with rewards
/// `<theta, phi(x, a)> + noise` and random `mu_hat` values.
pub fn logged_samples(
    rng: &mut ChaCha8Rng,
    map: &FeatureMap,
    theta: &[f64],
    n: usize,
    noise: f64,
) -> Vec<LoggedSample> {
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..map.raw_dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let p = random_probs(rng, map.num_actions());
            let a = p.sample_with(rng.random());
            let phi = map.featurize(&x, a).unwrap();
            let r = phi.iter().zip(theta).map(|(u, v)| u * v).sum::<f64>() + noise * rng.random_range(-1.0..1.0);
            LoggedSample::new(x, a, p, r).with_mu_hat(rng.random_range(-0.5..0.5))
        })
        .collect()
}

/// Residualized design and targets built directly from `featurize`.
pub fn dense_residual_design(samples: &[LoggedSample], map: &FeatureMap) -> (DMatrix<f64>, DVector<f64>) {
    let p = map.feature_dim();
    let mut z = DMatrix::zeros(samples.len(), p);
    let mut y = DVector::zeros(samples.len());
    for (t, s) in samples.iter().enumerate() {
        let own = map.featurize(&s.context, s.action).unwrap();
        for j in 0..p {
            z[(t, j)] = own[j];
        }
        for b in 0..map.num_actions() {
            let phi = map.featurize(&s.context, b).unwrap();
            for j in 0..p {
                z[(t, j)] -= s.propensities.prob(b) * phi[j];
            }
        }
        y[t] = s.reward - s.mu_hat.unwrap();
    }
    (z, y)
}

/// Least squares by SVD, independent of the normal-equation solver.
pub fn svd_least_squares(z: &DMatrix<f64>, y: &DVector<f64>) -> Vec<f64> {
    z.clone()
        .svd(true, true)
        .solve(y, 1e-14)
        .unwrap()
        .iter()
        .copied()
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub const ADV_EPOCH: u64 = 512;
const ADV_DELTA: f64 = 0.05;

/// Hoeffding half-width on `[0, 1]` rewards for epoch `j` with `n` samples at
/// round `t`, union-bounded by `delta / (4 j^2 t^2)`.
fn hoeffding(j: u64, n: u64, t: u64) -> f64 {
    let (j, t) = (j as f64, t as f64);
    ((4.0 * j * j * t * t / ADV_DELTA).ln() / (2.0 * n as f64)).sqrt()
}

/// Epoch 1 rewards depend on the action, epoch 2 pays 0.9 and every later
/// epoch pays 0.1.
fn adversarial_reward(epoch: u64, action: usize) -> f64 {
    match epoch {
        1 => {
            if action == 0 {
                0.6
            } else {
                0.3
            }
        }
        2 => 0.9,
        _ => 0.1,
    }
}

pub struct AdversarialRun {
    /// First round at which the test's own Hoeffding comparison detects the
    /// drop.
    pub predicted: Option<u64>,
    pub learner: Learner,
    /// Kernels at the probe contexts during epoch 2, and that epoch's gamma.
    pub epoch2_kernels: Vec<ActionDistribution>,
    pub epoch2_gamma: f64,
    /// `(safe, gamma, probe kernels)` for every round from the trigger on.
    pub after: Vec<(bool, f64, Vec<ActionDistribution>)>,
}

/// IGW learner with 512-round epochs on `[0, 1]` rewards, run for six epochs
/// on the adversarial stream.
pub fn adversarial_run() -> AdversarialRun {
    let map = FeatureMap::arm_block(3, 2).unwrap();
    let mut config = PolicyConfig::new(Algorithm::Igw, map, (0.0, 1.0));
    config.schedule = EpochSchedule::fixed(ADV_EPOCH).unwrap();
    config.delta = ADV_DELTA;
    let mut learner = Learner::new(config, 9).unwrap();

    let mut probe_rng = SeededRng::new(1, Stream::Aux(77)).rng();
    let probes: Vec<Vec<f64>> = (0..5).map(|_| unit_sphere(3, &mut probe_rng)).collect();
    let kernels_at =
        |l: &Learner| -> Vec<ActionDistribution> { probes.iter().map(|x| l.current_kernel(x).unwrap().0).collect() };
    let mut ctx_rng = SeededRng::new(2, Stream::Context).rng();
    let mut act_rng = SeededRng::new(2, Stream::Action).rng();
    let mut epoch1_sum = 0.0;
    let mut predicted = None;
    let mut epoch2 = None;
    let mut after = Vec::new();

    for t in 1..=6 * ADV_EPOCH {
        let x = unit_sphere(3, &mut ctx_rng);
        let d = learner.step(t, &x, &mut act_rng).unwrap();
        if d.epoch == 2 && epoch2.is_none() {
            epoch2 = Some((kernels_at(&learner), d.gamma));
        }
        let r = adversarial_reward(d.epoch, d.action);
        if d.epoch == 1 {
            epoch1_sum += r;
        }
        learner.record_reward(&d, &x, r).unwrap();

        if d.epoch == 3 && predicted.is_none() {
            let n3 = t - 2 * ADV_EPOCH;
            let l1 = epoch1_sum / ADV_EPOCH as f64 - hoeffding(1, ADV_EPOCH, t);
            let l2 = 0.9 - hoeffding(2, ADV_EPOCH, t);
            if 0.1 + hoeffding(3, n3, t) < l1.max(l2) {
                predicted = Some(t);
            }
        }
        if learner.trigger_round().is_some() {
            after.push((d.safe, d.gamma, kernels_at(&learner)));
        }
    }
    let (epoch2_kernels, epoch2_gamma) = epoch2.unwrap();
    AdversarialRun {
        predicted,
        learner,
        epoch2_kernels,
        epoch2_gamma,
        after,
    }
}
