use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent random streams used by a run. Keeping them apart means that
/// switching the learning algorithm does not perturb the contexts or noise
/// an environment produces for a given seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    GroundTruth,
    Context,
    Noise,
    Action,
    /// Cross-fitting fold assignment, one sub-stream per epoch.
    Fold(u32),
    /// Free-form streams for tests and validation sweeps.
    Aux(u32),
}

impl Stream {
    pub fn id(self) -> u64 {
        match self {
            Stream::GroundTruth => 0,
            Stream::Context => 1,
            Stream::Noise => 2,
            Stream::Action => 3,
            Stream::Fold(epoch) => (4 << 32) | u64::from(epoch),
            Stream::Aux(k) => (5 << 32) | u64::from(k),
        }
    }
}

/// A `(seed, stream_id)` pair naming a reproducible ChaCha8 stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededRng {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededRng {
    pub fn new(seed: u64, stream: Stream) -> Self {
        Self {
            seed,
            stream_id: stream.id(),
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_pair_same_draws() {
        let a: Vec<u64> = {
            let mut r = SeededRng::new(7, Stream::Noise).rng();
            (0..16).map(|_| r.random()).collect()
        };
        let b: Vec<u64> = {
            let mut r = SeededRng::new(7, Stream::Noise).rng();
            (0..16).map(|_| r.random()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let mut ctx = SeededRng::new(7, Stream::Context).rng();
        let mut noise = SeededRng::new(7, Stream::Noise).rng();
        let a: Vec<u64> = (0..8).map(|_| ctx.random()).collect();
        let b: Vec<u64> = (0..8).map(|_| noise.random()).collect();
        assert_ne!(a, b);
        assert_ne!(Stream::Fold(1).id(), Stream::Fold(2).id());
        assert_ne!(Stream::Fold(0).id(), Stream::Aux(0).id());
    }

    #[test]
    fn pinned_first_draw() {
        // Guards the cross-platform reproducibility contract: if this value
        // changes, previously published run CSVs are no longer reproducible.
        let mut r = SeededRng::new(42, Stream::Context).rng();
        let first: u64 = r.random();
        let mut again = SeededRng::new(42, Stream::Context).rng();
        assert_eq!(first, again.random::<u64>());
        assert_eq!(first, 13_222_472_167_927_179_408);
    }
}
