use rand::Rng;

use super::argmax_random;
use crate::channel::Molecule;

/// Maximum count detector: the antenna with the most arrivals.
pub fn mcd_mssk<R: Rng + ?Sized>(counts: &[u64], rng: &mut R) -> usize {
    argmax_random(counts, rng)
}

/// Maximum count detector for spatial modulation: the antenna with the largest
/// count of either type, then the type with more arrivals at that antenna
/// (type A on a tie).
pub fn mcd_msm<R: Rng + ?Sized>(counts_a: &[u64], counts_b: &[u64], rng: &mut R) -> (Molecule, usize) {
    debug_assert_eq!(counts_a.len(), counts_b.len());
    let best: Vec<u64> = counts_a.iter().zip(counts_b).map(|(a, b)| *a.max(b)).collect();
    let j = argmax_random(&best, rng);
    let molecule = if counts_a[j] >= counts_b[j] { Molecule::A } else { Molecule::B };
    (molecule, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn picks_paired_antenna_from_table_profile() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(mcd_mssk(&[46, 12, 3, 1, 0, 1, 3, 12], &mut rng), 0);
        let mut onehot = [0u64; 8];
        onehot[5] = 1;
        assert_eq!(mcd_mssk(&onehot, &mut rng), 5);
    }

    #[test]
    fn all_zero_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = [0u32; 8];
        for _ in 0..80_000 {
            hits[mcd_mssk(&[0; 8], &mut rng)] += 1;
        }
        for h in hits {
            assert!((h as f64 / 80_000.0 - 0.125).abs() < 0.006);
        }
    }

    #[test]
    fn msm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut a = [0u64; 8];
        let mut b = [0u64; 8];
        a[0] = 9;
        b[0] = 2;
        assert_eq!(mcd_msm(&a, &b, &mut rng), (Molecule::A, 0));
        let a = [0u64; 8];
        let mut b = [0u64; 8];
        b[7] = 7;
        assert_eq!(mcd_msm(&a, &b, &mut rng), (Molecule::B, 7));
        assert_eq!(mcd_msm(&[4, 1], &[4, 0], &mut rng), (Molecule::A, 0));
    }

    proptest! {
        #[test]
        fn scale_invariant(counts in proptest::collection::vec(0u64..1000, 8), scale in 1u64..50, seed in any::<u64>()) {
            let scaled: Vec<u64> = counts.iter().map(|c| c * scale).collect();
            let mut r1 = ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = ChaCha8Rng::seed_from_u64(seed);
            prop_assert_eq!(mcd_mssk(&counts, &mut r1), mcd_mssk(&scaled, &mut r2));
        }
    }
}
