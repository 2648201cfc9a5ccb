//! Model-fitting oracles.
//!
//! The R-loss oracle regresses residual outcomes `r_t - mu_hat(x_t)` on
//! residualized designs `phi(x_t, a_t) - sum_a p_t(a) phi(x_t, a)`, which is
//! empirical R-loss minimization over the linear class. `mu_hat` comes from
//! cross-fitting so that each sample's estimate never saw that sample.

mod lasso;
mod model;
mod nuisance;
mod rate;
mod rloss;
mod squared;

pub use lasso::{lasso_coordinate_descent, LassoFit, LassoPenalty, LASSO_MAX_SWEEPS, LASSO_TOL};
pub use model::{LinearModel, RewardModel, TreatmentEffectModel, ACTIVE_TOL};
pub use nuisance::{cross_fit_mu, NuisanceEstimate};
pub use rate::estimation_rate_xi;
pub use rloss::{empirical_rloss, fit_rloss, fit_rloss_lasso, residualize, ResidualDesign};
pub use squared::{fit_squared_error, fit_squared_error_lasso};
