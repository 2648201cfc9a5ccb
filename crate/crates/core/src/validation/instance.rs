use rand::Rng;

use crate::domain::ActionDistribution;
use crate::error::{invalid, Result};

/// Per-context, per-action values: `table[x][a]`.
pub type Table = Vec<Vec<f64>>;

pub const MAX_CONTEXTS: usize = 20;
pub const MAX_ACTIONS: usize = 4;

/// A fully enumerable problem: finitely many contexts with known
/// probabilities, noiseless mean rewards and a fixed kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteInstance {
    context_probs: Vec<f64>,
    f_star: Table,
    kernel: Vec<ActionDistribution>,
}

impl FiniteInstance {
    pub fn new(context_probs: Vec<f64>, f_star: Table, kernel: Vec<ActionDistribution>) -> Result<Self> {
        let n = context_probs.len();
        if n == 0 || n > MAX_CONTEXTS {
            return Err(invalid(format!("need 1..={MAX_CONTEXTS} contexts, got {n}")));
        }
        if context_probs.iter().any(|&q| !(0.0..=1.0).contains(&q)) {
            return Err(invalid("context probabilities must lie in [0, 1]"));
        }
        let total: f64 = context_probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("context probabilities sum to {total}")));
        }
        let k = f_star.first().map_or(0, Vec::len);
        if !(2..=MAX_ACTIONS).contains(&k) {
            return Err(invalid(format!("need 2..={MAX_ACTIONS} actions, got {k}")));
        }
        check_table(&f_star, n, k)?;
        if kernel.len() != n || kernel.iter().any(|p| p.num_actions() != k) {
            return Err(invalid("kernel must give one K-action distribution per context"));
        }
        Ok(Self {
            context_probs,
            f_star,
            kernel,
        })
    }

    pub fn num_contexts(&self) -> usize {
        self.context_probs.len()
    }

    pub fn num_actions(&self) -> usize {
        self.f_star[0].len()
    }

    pub fn context_probs(&self) -> &[f64] {
        &self.context_probs
    }

    pub fn f_star(&self) -> &Table {
        &self.f_star
    }

    pub fn kernel(&self) -> &[ActionDistribution] {
        &self.kernel
    }

    /// The same contexts and rewards under a different kernel.
    pub fn with_kernel(&self, kernel: Vec<ActionDistribution>) -> Result<Self> {
        Self::new(self.context_probs.clone(), self.f_star.clone(), kernel)
    }

    /// `mu(x) = sum_a p(a|x) f*(x, a)`.
    pub fn mean_reward(&self) -> Vec<f64> {
        self.f_star
            .iter()
            .zip(&self.kernel)
            .map(|(f, p)| f.iter().zip(p.probs()).map(|(v, q)| v * q).sum())
            .collect()
    }
}

pub(crate) fn check_table(table: &Table, contexts: usize, actions: usize) -> Result<()> {
    if table.len() != contexts || table.iter().any(|row| row.len() != actions) {
        return Err(invalid(format!("table must be {contexts} x {actions}")));
    }
    if table.iter().flatten().any(|v| !v.is_finite()) {
        return Err(invalid("table entries must be finite"));
    }
    Ok(())
}

pub(crate) fn check_column(column: &[f64], contexts: usize) -> Result<()> {
    if column.len() != contexts || column.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!(
            "per-context table must have {contexts} finite entries"
        )));
    }
    Ok(())
}

/// A random distribution over `k` outcomes. A quarter of the draws put zero
/// mass on one outcome so that boundary kernels are exercised.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, k: usize) -> ActionDistribution {
    let mut w: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    if k > 2 && rng.random::<f64>() < 0.25 {
        w[rng.random_range(0..k)] = 0.0;
    }
    let total: f64 = w.iter().sum();
    let mut probs: Vec<f64> = w.iter().map(|v| v / total).collect();
    // Push the rounding residue onto the largest entry.
    let residue = 1.0 - probs.iter().sum::<f64>();
    let top = crate::env::argmax(&probs);
    probs[top] += residue;
    ActionDistribution::new(probs).expect("normalized weights form a distribution")
}

pub fn random_kernel<R: Rng + ?Sized>(rng: &mut R, contexts: usize, k: usize) -> Vec<ActionDistribution> {
    (0..contexts).map(|_| random_distribution(rng, k)).collect()
}

pub fn random_table<R: Rng + ?Sized>(rng: &mut R, contexts: usize, k: usize, scale: f64) -> Table {
    (0..contexts)
        .map(|_| (0..k).map(|_| scale * rng.random_range(-1.0..1.0)).collect())
        .collect()
}

/// Random instance with 2..=20 contexts and 2..=4 actions.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R) -> FiniteInstance {
    let n = rng.random_range(2..=MAX_CONTEXTS);
    let k = rng.random_range(2..=MAX_ACTIONS);
    let probs = random_distribution(rng, n).probs().to_vec();
    let f_star = random_table(rng, n, k, 1.0);
    let kernel = random_kernel(rng, n, k);
    FiniteInstance::new(probs, f_star, kernel).expect("generated instance is valid")
}

/// A finite model class for `instance`: perturbations of `f*` at several
/// scales, perturbations with a per-context shift and unrelated tables.
pub fn random_model_class<R: Rng + ?Sized>(rng: &mut R, instance: &FiniteInstance, size: usize) -> Vec<Table> {
    let n = instance.num_contexts();
    let k = instance.num_actions();
    (0..size)
        .map(|i| match i % 3 {
            0 => random_table(rng, n, k, 1.0),
            1 => {
                let scale = rng.random_range(0.05..0.5);
                add_tables(instance.f_star(), &random_table(rng, n, k, scale))
            }
            _ => {
                let scale = rng.random_range(0.05..0.5);
                let shift = rng.random_range(-1.0..1.0);
                let mut g = add_tables(instance.f_star(), &random_table(rng, n, k, scale));
                g.iter_mut().flatten().for_each(|v| *v += shift);
                g
            }
        })
        .collect()
}

pub(crate) fn add_tables(a: &Table, b: &Table) -> Table {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}
