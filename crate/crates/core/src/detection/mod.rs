//! Receiver decision rules.

mod mcd;
mod ml;
mod threshold;

pub use mcd::{mcd_msm, mcd_mssk};
pub use ml::{
    ml_sequence_detect, ml_sequence_metrics, symbol_ml, symbol_ml_scores, BranchMetric, DetectorState,
    DEFAULT_SEQUENCE_LIMIT,
};
pub use threshold::{atd, calibrate_threshold, ftd};

use rand::Rng;

use crate::error::{Error, Result};

/// Selection combining: the largest count.
pub fn combine_sc(counts: &[u64]) -> Result<u64> {
    counts.iter().copied().max().ok_or_else(|| Error::Argument("no antennas to combine".into()))
}

/// Equal-gain combining: the sum of counts.
pub fn combine_egc(counts: &[u64]) -> Result<u64> {
    if counts.is_empty() {
        return Err(Error::Argument("no antennas to combine".into()));
    }
    Ok(counts.iter().sum())
}

/// Number of differing bits.
pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Index of the largest value; exact ties are broken uniformly at random.
pub fn argmax_random<T: PartialOrd + Copy, R: Rng + ?Sized>(values: &[T], rng: &mut R) -> usize {
    let mut best = 0;
    let mut ties = 1u32;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
            ties = 1;
        } else if *v == values[best] {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                best = i;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn combining() {
        assert_eq!(combine_sc(&[5, 9, 2]).unwrap(), 9);
        assert_eq!(combine_egc(&[5, 9, 2]).unwrap(), 16);
        assert_eq!(combine_sc(&[4; 8]).unwrap(), 4);
        assert_eq!(combine_egc(&[4; 8]).unwrap(), 32);
        assert!(combine_sc(&[]).is_err());
        assert!(combine_egc(&[]).is_err());
    }

    #[test]
    fn hamming_distance() {
        assert_eq!(hamming(&[0, 0, 0], &[0, 1, 1]), 2);
        assert_eq!(hamming(&[1, 0, 1], &[1, 0, 1]), 0);
    }

    #[test]
    fn ties_are_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut hits = [0u32; 4];
        for _ in 0..40_000 {
            hits[argmax_random(&[3, 7, 7, 7], &mut rng)] += 1;
        }
        assert_eq!(hits[0], 0);
        for h in &hits[1..] {
            assert!((*h as f64 / 40_000.0 - 1.0 / 3.0).abs() < 0.01);
        }
    }
}
