//! Value types shared by every other module.

mod distribution;
mod features;
mod rng;
mod sample;
mod schedule;

pub use distribution::ActionDistribution;
pub use features::{FeatureKind, FeatureMap};
pub use rng::{SeededRng, Stream};
pub use sample::LoggedSample;
pub use schedule::EpochSchedule;
