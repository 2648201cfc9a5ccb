//! Brute-force checks over small, fully enumerable problems: the R-loss
//! excess risk identity, the misspecification comparison against squared
//! error, IGW kernel invariants and a Monte Carlo excess-risk estimator for
//! the synthetic environments.

mod identities;
mod instance;
mod monte_carlo;

pub use identities::{
    exact_rloss_risk, gap_excess_risk, min_rloss_risk, shifted_class, squared_excess_risk, verify_comparison,
    verify_comparison_kernels, verify_identity, verify_identity_with, ComparisonCheck, IdentityCheck, COMPARISON_TOL,
};
pub use instance::{
    random_distribution, random_instance, random_kernel, random_model_class, random_table, FiniteInstance, Table,
    MAX_ACTIONS, MAX_CONTEXTS,
};
pub use monte_carlo::{kernel_invariant_sweep, mc_excess_risk, KernelSweep, McEstimate, MC_MIN_DRAWS};
