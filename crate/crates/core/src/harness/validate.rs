//! The `validate` report: enumeration checks of the excess risk identity and
//! the misspecification comparison, the kernel invariant sweep and the
//! per-round implicit regret bound on a full run.

use std::fmt;

use crate::domain::{SeededRng, Stream};
use crate::error::Result;
use crate::parallel::{self, Execution};
use crate::validation::{
    kernel_invariant_sweep, random_instance, random_model_class, random_table, shifted_class, verify_comparison,
    verify_identity, IdentityCheck, Table,
};

use super::config::RunConfig;
use super::run::{run_single, RunHistory};

pub const IDENTITY_TOL: f64 = 1e-10;
pub const IMPLICIT_REGRET_TOL: f64 = 1e-12;
pub const STRICT_GAP: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    pub seed: u64,
    pub identity_instances: usize,
    pub comparison_instances: usize,
    pub kernels_per_instance: usize,
    pub class_size: usize,
    pub kernel_cases: usize,
    /// Run used for the implicit regret sweep.
    pub run: RunConfig,
    pub execution: Execution,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        let mut run = RunConfig::default();
        // Small xi constant so the run reaches large gamma.
        run.oracle.c_xi = 0.01;
        Self {
            seed: 20_240_601,
            identity_instances: 50,
            comparison_instances: 100,
            kernels_per_instance: 20,
            class_size: 8,
            kernel_cases: 100_000,
            run,
            execution: Execution::Parallel,
        }
    }
}

/// Largest deviation over `instances` random instances, each with a random
/// model table and two distinct random mean-reward estimates.
pub fn identity_sweep(seed: u64, instances: usize, execution: Execution) -> Result<f64> {
    let ids: Vec<u32> = (0..instances as u32).collect();
    let checks = parallel::try_map(execution, &ids, |&i| -> Result<IdentityCheck> {
        let mut rng = SeededRng::new(seed, Stream::Aux(i)).rng();
        let inst = random_instance(&mut rng);
        let (n, k) = (inst.num_contexts(), inst.num_actions());
        let g: Table = if i % 2 == 0 {
            random_table(&mut rng, n, k, 2.0)
        } else {
            let noise = random_table(&mut rng, n, k, 0.3);
            inst.f_star()
                .iter()
                .zip(&noise)
                .map(|(f, e)| f.iter().zip(e).map(|(a, b)| a + b).collect())
                .collect()
        };
        let mu_a = random_table(&mut rng, n, 1, 1.0)
            .into_iter()
            .map(|r| r[0])
            .collect::<Vec<_>>();
        let mu_b = random_table(&mut rng, n, 1, 3.0)
            .into_iter()
            .map(|r| r[0])
            .collect::<Vec<_>>();
        verify_identity(&inst, &g, &mu_a, &mu_b)
    })?;
    Ok(checks.iter().map(|c| c.max_deviation).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonSweep {
    pub cases: usize,
    pub violations: usize,
    /// Gap `squared - rloss` of the constructed shifted-class case.
    pub strict_gap: f64,
}

pub fn comparison_sweep(
    seed: u64,
    instances: usize,
    kernels: usize,
    class_size: usize,
    execution: Execution,
) -> Result<ComparisonSweep> {
    let ids: Vec<u32> = (0..instances as u32).collect();
    let checks = parallel::try_map(execution, &ids, |&i| {
        let mut rng = SeededRng::new(seed, Stream::Aux(1_000_000 + i)).rng();
        let inst = random_instance(&mut rng);
        let class = random_model_class(&mut rng, &inst, class_size);
        verify_comparison(&inst, &class, kernels, &mut rng)
    })?;
    let mut rng = SeededRng::new(seed, Stream::Aux(2_000_000)).rng();
    let inst = random_instance(&mut rng);
    let strict = verify_comparison(
        &inst,
        &[shifted_class(&inst, &vec![0.5; inst.num_contexts()])],
        kernels,
        &mut rng,
    )?;
    Ok(ComparisonSweep {
        cases: checks.iter().map(|c| c.kernels).sum(),
        violations: checks.iter().map(|c| c.violations).sum::<usize>() + strict.violations,
        strict_gap: strict.min_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitRegretSweep {
    pub rounds: usize,
    pub violations: usize,
    /// Largest `implicit regret - K / gamma` over the run.
    pub max_slack: f64,
}

/// Checks `sum_a p(a) (g(a_hat) - g(a)) <= K / gamma` at every round.
pub fn implicit_regret_sweep(run: &RunHistory) -> ImplicitRegretSweep {
    let k = run.num_actions as f64;
    let mut sweep = ImplicitRegretSweep {
        rounds: run.rounds.len(),
        violations: 0,
        max_slack: f64::NEG_INFINITY,
    };
    for r in &run.rounds {
        let slack = r.implicit_regret - k / r.gamma;
        sweep.max_slack = sweep.max_slack.max(slack);
        if slack > IMPLICIT_REGRET_TOL {
            sweep.violations += 1;
        }
    }
    sweep
}

pub fn run_validation(options: &ValidationOptions) -> Result<ValidationReport> {
    let mut checks = Vec::new();

    let dev = identity_sweep(options.seed, options.identity_instances, options.execution)?;
    checks.push(CheckOutcome {
        name: "excess-risk identity",
        passed: dev <= IDENTITY_TOL,
        detail: format!(
            "{} instances, max deviation {dev:.3e} (tolerance {IDENTITY_TOL:e})",
            options.identity_instances
        ),
    });

    let p2 = comparison_sweep(
        options.seed,
        options.comparison_instances,
        options.kernels_per_instance,
        options.class_size,
        options.execution,
    )?;
    checks.push(CheckOutcome {
        name: "misspecification comparison",
        passed: p2.violations == 0 && p2.strict_gap >= STRICT_GAP,
        detail: format!(
            "{} cases, {} violations; shifted-class gap {:.4} (needs >= {STRICT_GAP})",
            p2.cases, p2.violations, p2.strict_gap
        ),
    });

    let mut rng = SeededRng::new(options.seed, Stream::Aux(3_000_000)).rng();
    let ks = kernel_invariant_sweep(options.kernel_cases, &mut rng)?;
    checks.push(CheckOutcome {
        name: "kernel invariants",
        passed: ks.passed(),
        detail: format!(
            "{} cases, max simplex error {:.2e}, best below 1/K {}, argmax violations {}",
            ks.cases, ks.max_simplex_error, ks.best_below_uniform, ks.argmax_violations
        ),
    });

    let seed = options.run.seeds.first().copied().unwrap_or(options.seed);
    let history = run_single(&options.run, seed)?;
    let implicit = implicit_regret_sweep(&history);
    checks.push(CheckOutcome {
        name: "implicit regret bound",
        passed: implicit.violations == 0,
        detail: format!(
            "{} rounds of {} on {}, {} violations, max slack {:.3e}",
            implicit.rounds,
            options.run.algorithm,
            options.run.environment.scenario,
            implicit.violations,
            implicit.max_slack
        ),
    });

    Ok(ValidationReport { checks })
}
