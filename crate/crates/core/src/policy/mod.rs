//! The decision loop: inverse gap weighting over a fitted model, the
//! exploration schedule, epoch refits and the misspecification safety test.

mod gamma;
mod kernel;
mod learner;
mod safety;

pub use gamma::{gamma_schedule, GAMMA_CONSTANT};
pub use kernel::{estimated_implicit_regret, igw_kernel};
pub use learner::{hash_rounds, Algorithm, Decision, FitRecord, Learner, OracleConfig, PolicyConfig, PolicyState};
pub use safety::{SafetyMonitor, SafetyVerdict};
