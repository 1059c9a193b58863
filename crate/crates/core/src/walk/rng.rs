use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{FreeWord, StepSample, STEP_BITS_LEVEL1};

/// Stream of step outcomes for one walker. Keyed by the master seed and the
/// walker index, so no state is shared between walkers.
pub struct StepStream {
    rng: ChaCha8Rng,
}

impl StepStream {
    pub fn new(master_seed: u64, walker: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(walker);
        StepStream { rng }
    }

    /// 64 fresh random bits; a step uses the low `step_bits` of them.
    pub fn next_bits(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

/// Draw a level-one step and its word `u1 tau^eta u2`.
pub fn sample_step(rng: &mut impl RngCore) -> (StepSample, FreeWord) {
    let s = StepSample::from_bits(rng.next_u64() & ((1 << STEP_BITS_LEVEL1) - 1));
    (s, s.word())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Letter;

    #[test]
    fn assembled_words() {
        let s = StepSample::from_bits(1 << 4);
        assert_eq!(s.word().to_string(), "t");
        let s = StepSample { e1: true, e2_after: true, forward: true, ..StepSample::from_bits(0) };
        assert_eq!(s.word().letters(), &[Letter::Alpha, Letter::Tau, Letter::Beta]);
    }

    #[test]
    fn bits_are_uniform() {
        // Chi-square over the 128 outcomes, 127 degrees of freedom.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut counts = [0u64; 128];
        for _ in 0..n {
            counts[sample_step(&mut rng).0.to_bits() as usize] += 1;
        }
        let e = n as f64 / 128.0;
        let chi: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // Mean 127, sd about 16: allow 3 sd.
        assert!(chi < 127.0 + 3.0 * (2.0f64 * 127.0).sqrt(), "chi-square {chi}");
    }

    #[test]
    fn streams_differ_by_walker_and_repeat_by_key() {
        let a: Vec<u64> = { let mut s = StepStream::new(7, 0); (0..4).map(|_| s.next_bits()).collect() };
        let b: Vec<u64> = { let mut s = StepStream::new(7, 1); (0..4).map(|_| s.next_bits()).collect() };
        let c: Vec<u64> = { let mut s = StepStream::new(7, 0); (0..4).map(|_| s.next_bits()).collect() };
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
