//! Contextual bandits driven by heterogeneous treatment effect oracles.
//!
//! The crate implements an inverse-gap-weighting (IGW) learner whose model is
//! fitted by minimizing the multi-treatment R-loss on each epoch's data, with
//! cross-fitted estimates of the mean realized reward, a doubling epoch
//! schedule and a Hoeffding-style misspecification test. A squared-error IGW
//! baseline, a uniform-random baseline, synthetic benchmark environments and
//! exact enumeration checks of the R-loss excess risk identities ship
//! alongside it.
//!
//! Module map:
//!
//! * [`domain`]: feature maps, action distributions, logged samples, epoch
//!   schedules and seeded random streams.
//! * [`env`]: synthetic data-generating processes with known `f* = g* + h*`.
//! * [`oracle`]: cross-fitting, ridge and LASSO R-loss fits, the squared-error
//!   reward regressor and the estimation rate.
//! * [`policy`]: the IGW kernel, exploration schedule, safety monitor and the
//!   per-round learner.
//! * [`validation`]: brute-force oracles over finite instances.
//! * [`harness`]: configuration, multi-seed runs, CSV/SVG output.

// `!(a < b)` style checks are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod env;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod parallel;
pub mod policy;
pub mod validation;

pub use error::{Error, Result};
