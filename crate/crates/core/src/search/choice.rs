use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Source of the search's discrete choices.
///
/// `choose(k)` picks an index into a list of `k ≥ 1` options, which the
/// search always presents in ascending qubit order.
pub trait Chooser {
    fn choose(&mut self, options: usize) -> usize;
}

/// Uniform choices from a ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct RandomChooser {
    rng: ChaCha8Rng,
}

impl RandomChooser {
    pub fn new(seed: u64) -> RandomChooser {
        RandomChooser {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream `stream` of the generator keyed by `seed`.
    pub fn for_stream(seed: u64, stream: u64) -> RandomChooser {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandomChooser { rng }
    }
}

impl Chooser for RandomChooser {
    fn choose(&mut self, options: usize) -> usize {
        assert!(options > 0, "nothing to choose from");
        if options == 1 {
            return 0;
        }
        self.rng.random_range(0..options)
    }
}

/// Always takes the first option.
#[derive(Debug, Clone, Copy, Default)]
pub struct LowestIndex;

impl Chooser for LowestIndex {
    fn choose(&mut self, options: usize) -> usize {
        assert!(options > 0, "nothing to choose from");
        0
    }
}
