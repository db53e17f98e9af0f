//! Analytical bit error rate of antenna-index schemes under the Gaussian
//! arrival model with the maximum count detector.
//!
//! For every activated-antenna sequence over the channel memory the arrival
//! count of each antenna is Gaussian; the probability that antenna `j` wins the
//! count comparison is
//!
//! ```text
//! P_j = ∫ Π_{τ≠j} Φ((r − μ_τ) / σ_τ) · φ_j(r) dr
//! ```
//!
//! and the conditional bit error rate weighs each `P_j` by the Hamming distance
//! between the codewords of the sent and the winning antenna. The overall rate
//! averages uniformly over all sequences.

use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modulation::{IndexMap, Mapping};
use crate::particle::ChannelResponse;

/// Default bound on the number of enumerated sequences.
pub const DEFAULT_ENUMERATION_LIMIT: f64 = 1e7;

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Upper tail of the standard normal distribution.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

// 15-point Kronrod extension of the 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const REL_TOL: f64 = 1e-6;
const ABS_TOL: f64 = 1e-13;
const MAX_PANELS: usize = 4000;

/// Window half-width in standard deviations.
const WINDOW_SIGMAS: f64 = 10.0;

struct Panel {
    a: f64,
    b: f64,
    est: Vec<f64>,
    err: Vec<f64>,
}

/// Vector-valued adaptive Gauss–Kronrod quadrature over `[a, b]` seeded with
/// the sorted breakpoints `cuts`.
fn integrate_vec(f: &mut dyn FnMut(f64, &mut [f64]), dim: usize, cuts: &[f64]) -> Vec<f64> {
    let mut buf = vec![0.0; dim];
    let mut rule = |a: f64, b: f64, buf: &mut [f64]| -> Panel {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut kron = vec![0.0; dim];
        let mut gauss = vec![0.0; dim];
        f(c, buf);
        for d in 0..dim {
            kron[d] += WGK[7] * buf[d];
            gauss[d] += WG[3] * buf[d];
        }
        for (k, &x) in XGK[..7].iter().enumerate() {
            for sign in [-1.0, 1.0] {
                f(c + sign * h * x, buf);
                for d in 0..dim {
                    kron[d] += WGK[k] * buf[d];
                    if k % 2 == 1 {
                        gauss[d] += WG[k / 2] * buf[d];
                    }
                }
            }
        }
        let est: Vec<f64> = kron.iter().map(|v| v * h).collect();
        let err: Vec<f64> = kron.iter().zip(&gauss).map(|(k, g)| ((k - g) * h).abs()).collect();
        Panel { a, b, est, err }
    };

    let mut panels: Vec<Panel> = cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| rule(w[0], w[1], &mut buf)).collect();
    loop {
        let mut total = vec![0.0; dim];
        let mut errs = vec![0.0; dim];
        for p in &panels {
            for d in 0..dim {
                total[d] += p.est[d];
                errs[d] += p.err[d];
            }
        }
        let converged = (0..dim).all(|d| errs[d] <= (REL_TOL * total[d].abs()).max(ABS_TOL));
        if converged || panels.len() >= MAX_PANELS {
            return total;
        }
        // Split the panel contributing the largest relative excess.
        let worst = panels
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let score = (0..dim)
                    .map(|d| p.err[d] / (REL_TOL * total[d].abs()).max(ABS_TOL))
                    .fold(0.0, f64::max);
                (i, score)
            })
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .map(|(i, _)| i)
            .expect("non-empty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(rule(p.a, mid, &mut buf));
        panels.push(rule(mid, p.b, &mut buf));
    }
}

/// Probability that each Gaussian count is the strict maximum.
///
/// Zero-variance entries are point masses; when point masses tie for the
/// maximum their probability is split evenly among them.
pub fn p_max_all(means: &[f64], variances: &[f64]) -> Result<Vec<f64>> {
    let n = means.len();
    if n == 0 || variances.len() != n {
        return Err(Error::Argument("means and variances must be non-empty and equally long".into()));
    }
    if variances.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) || means.iter().any(|m| !m.is_finite()) {
        return Err(Error::Argument("variances must be finite and non-negative".into()));
    }
    let sd: Vec<f64> = variances.iter().map(|v| v.sqrt()).collect();
    let continuous: Vec<usize> = (0..n).filter(|&i| sd[i] > 0.0).collect();
    let point: Vec<usize> = (0..n).filter(|&i| sd[i] == 0.0).collect();
    let mut out = vec![0.0; n];

    // Point masses: everything else must fall below the atom.
    for &j in &point {
        let m = means[j];
        if point.iter().any(|&t| means[t] > m) {
            continue;
        }
        let ties = point.iter().filter(|&&t| means[t] == m).count() as f64;
        let below: f64 = continuous.iter().map(|&t| normal_cdf((m - means[t]) / sd[t])).product();
        out[j] = below / ties;
    }

    if !continuous.is_empty() {
        let floor = point.iter().map(|&t| means[t]).fold(f64::NEG_INFINITY, f64::max);
        let lo = continuous.iter().map(|&i| means[i] - WINDOW_SIGMAS * sd[i]).fold(f64::INFINITY, f64::min).max(floor);
        let hi = continuous.iter().map(|&i| means[i] + WINDOW_SIGMAS * sd[i]).fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            let mut cuts = vec![lo, hi];
            for &i in &continuous {
                for k in [-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0] {
                    cuts.push(means[i] + k * sd[i]);
                }
            }
            cuts.retain(|c| *c >= lo && *c <= hi);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();

            let dim = continuous.len();
            let mut cdf = vec![0.0; dim];
            let mut prefix = vec![0.0; dim + 1];
            let mut integrand = |r: f64, vals: &mut [f64]| {
                for (k, &i) in continuous.iter().enumerate() {
                    cdf[k] = normal_cdf((r - means[i]) / sd[i]);
                }
                prefix[0] = 1.0;
                for k in 0..dim {
                    prefix[k + 1] = prefix[k] * cdf[k];
                }
                let mut suffix = 1.0;
                for k in (0..dim).rev() {
                    let i = continuous[k];
                    let z = (r - means[i]) / sd[i];
                    let pdf = INV_SQRT_2PI / sd[i] * (-0.5 * z * z).exp();
                    vals[k] = pdf * prefix[k] * suffix;
                    suffix *= cdf[k];
                }
            };
            let vals = integrate_vec(&mut integrand, dim, &cuts);
            for (k, &i) in continuous.iter().enumerate() {
                out[i] = vals[k].clamp(0.0, 1.0);
            }
        }
    }
    Ok(out)
}

/// Probability that count `j` exceeds every other count.
pub fn p_max_antenna(means: &[f64], variances: &[f64], j: usize) -> Result<f64> {
    if j >= means.len() {
        return Err(Error::Argument(format!("antenna {j} out of range")));
    }
    Ok(p_max_all(means, variances)?[j])
}

/// Odometer over all sequences of `len` symbols from `0..alphabet`, oldest
/// symbol most significant.
#[derive(Debug, Clone)]
pub struct SequenceEnumerator {
    alphabet: usize,
    len: usize,
    next: u64,
    end: u64,
}

impl SequenceEnumerator {
    pub fn new(alphabet: usize, len: usize) -> Result<Self> {
        let total = Self::count(alphabet, len)?;
        Ok(Self { alphabet, len, next: 0, end: total })
    }

    /// Only the sequences whose rank lies in `range`.
    pub fn range(alphabet: usize, len: usize, range: Range<u64>) -> Result<Self> {
        let total = Self::count(alphabet, len)?;
        Ok(Self { alphabet, len, next: range.start.min(total), end: range.end.min(total) })
    }

    pub fn count(alphabet: usize, len: usize) -> Result<u64> {
        (alphabet as u64)
            .checked_pow(len as u32)
            .ok_or_else(|| Error::Infeasible { required: (alphabet as f64).powi(len as i32), limit: u64::MAX as f64 })
    }

    pub fn decode(&self, rank: u64, out: &mut [usize]) {
        let mut r = rank;
        for slot in out.iter_mut().rev() {
            *slot = (r % self.alphabet as u64) as usize;
            r /= self.alphabet as u64;
        }
    }
}

impl Iterator for SequenceEnumerator {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.next >= self.end {
            return None;
        }
        let mut seq = vec![0; self.len];
        self.decode(self.next, &mut seq);
        self.next += 1;
        Some(seq)
    }
}

/// Per-antenna Gaussian moments at the last interval of `seq` for symbols
/// `type * n + antenna`, laid out `[type * n_rx + j]`.
fn sequence_moments(cir: &ChannelResponse, n: usize, beta: usize, seq: &[usize], emission: f64, mean: &mut [f64], var: &mut [f64]) {
    let n_rx = cir.n_rx();
    mean.fill(0.0);
    var.fill(0.0);
    let l = seq.len();
    for (d, &sym) in seq.iter().rev().enumerate().take(cir.memory()) {
        let (t, x) = (sym / n, sym % n);
        debug_assert!(t < beta);
        let _ = l;
        for j in 0..n_rx {
            let p = cir.h(x, j, d);
            mean[t * n_rx + j] += emission * p;
            var[t * n_rx + j] += emission * p * (1.0 - p);
        }
    }
}

/// Bit error rate of MSSK conditioned on the activated-antenna sequence `seq`
/// (oldest first; the last entry is the detected symbol).
pub fn conditional_ber(seq: &[usize], cir: &ChannelResponse, emission: f64, map: &IndexMap) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::Argument("empty sequence".into()));
    }
    let n = cir.n_tx();
    if map.size() != n || cir.n_rx() != n {
        return Err(Error::Argument("mapping size must match the square channel".into()));
    }
    let mut mean = vec![0.0; n];
    let mut var = vec![0.0; n];
    sequence_moments(cir, n, 1, seq, emission, &mut mean, &mut var);
    let p = p_max_all(&mean, &var)?;
    let sent = *seq.last().expect("non-empty");
    let bits = map.bits() as f64;
    Ok((0..n).map(|j| p[j] * map.distance(sent, j) as f64 / bits).sum())
}

/// Analytical error rate of an index scheme over `beta` molecule types, for
/// every mapping in `mappings`. Uses the response truncated to `memory` taps.
///
/// With `beta = 1` this is MSSK; with `beta = 2` it is spatial modulation
/// whose leading bit selects the molecule type. Circulant responses are
/// enumerated only up to rotation.
pub fn index_scheme_ber(
    cir: &ChannelResponse,
    memory: usize,
    emission: f64,
    beta: usize,
    mappings: &[Mapping],
    limit: f64,
) -> Result<Vec<f64>> {
    let cir = cir.truncated(memory)?;
    let n = cir.n_tx();
    if cir.n_rx() != n {
        return Err(Error::Unsupported("analytical error rate needs n_tx = n_rx".into()));
    }
    if !(1..=2).contains(&beta) {
        return Err(Error::Unsupported(format!("beta = {beta}")));
    }
    let maps: Vec<IndexMap> = mappings.iter().map(|m| IndexMap::new(n, *m)).collect::<Result<_>>()?;
    let alphabet = beta * n;
    let required = (alphabet as f64).powi(memory as i32);
    if required > limit {
        return Err(Error::Infeasible { required, limit });
    }
    let bits = maps[0].bits() as usize + usize::from(beta == 2);
    let code = |map: &IndexMap, sym: usize| -> u32 {
        let (t, x) = (sym / n, sym % n);
        ((t as u32) << map.bits()) | map.codeword(x)
    };
    let rotate = |sym: usize, r: usize| (sym / n) * n + (sym % n + r) % n;

    let symmetric = cir.is_circulant();
    // Sequences enumerated: all of them, or only those ending on antenna 0
    // of each type (rotations recover the rest).
    let prefix_count = SequenceEnumerator::count(alphabet, memory - 1)?;
    let last_choices: Vec<usize> = if symmetric { (0..beta).map(|t| t * n).collect() } else { (0..alphabet).collect() };
    // weight[m][last][winner]: summed Hamming weight over the rotations covered.
    let weights: Vec<Vec<Vec<f64>>> = maps
        .iter()
        .map(|map| {
            last_choices
                .iter()
                .map(|&sent| {
                    (0..alphabet)
                        .map(|win| {
                            if symmetric {
                                (0..n)
                                    .map(|r| (code(map, rotate(sent, r)) ^ code(map, rotate(win, r))).count_ones() as f64)
                                    .sum()
                            } else {
                                (code(map, sent) ^ code(map, win)).count_ones() as f64
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();

    let total_work = prefix_count * last_choices.len() as u64;
    let chunk = 256u64;
    let n_chunks = total_work.div_ceil(chunk);
    let enumerator = SequenceEnumerator::new(alphabet, memory - 1)?;
    let partials: Vec<Result<Vec<f64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![0.0; maps.len()];
            let mut seq = vec![0usize; memory];
            let mut mean = vec![0.0; alphabet];
            let mut var = vec![0.0; alphabet];
            for w in c * chunk..((c + 1) * chunk).min(total_work) {
                let li = (w % last_choices.len() as u64) as usize;
                let prefix = w / last_choices.len() as u64;
                enumerator.decode(prefix, &mut seq[..memory - 1]);
                seq[memory - 1] = last_choices[li];
                sequence_moments(&cir, n, beta, &seq, emission, &mut mean, &mut var);
                let p = p_max_all(&mean, &var)?;
                for (m, acc_m) in acc.iter_mut().enumerate() {
                    *acc_m += p.iter().zip(&weights[m][li]).map(|(pj, wj)| pj * wj).sum::<f64>();
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; maps.len()];
    for part in partials {
        for (t, v) in total.iter_mut().zip(part?) {
            *t += v;
        }
    }
    let norm = required * bits as f64;
    Ok(total.into_iter().map(|t| t / norm).collect())
}

/// Analytical MSSK bit error rate over channel memory `memory`.
pub fn theoretical_ber_mssk(cir: &ChannelResponse, memory: usize, emission: f64, mapping: Mapping) -> Result<f64> {
    Ok(index_scheme_ber(cir, memory, emission, 1, &[mapping], DEFAULT_ENUMERATION_LIMIT)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn q_function_values() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-12);
        assert_eq!(q_function(f64::NEG_INFINITY), 1.0);
        assert_eq!(q_function(f64::INFINITY), 0.0);
        assert!((q_function(-1.3) - (1.0 - q_function(1.3))).abs() < 1e-15);
    }

    #[test]
    fn symmetric_inputs_split_evenly() {
        let p = p_max_all(&[10.0, 10.0], &[4.0, 4.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-6 && (p[1] - 0.5).abs() < 1e-6);
        for n in [3usize, 5, 8, 16] {
            let p = p_max_all(&vec![7.0; n], &vec![2.0; n]).unwrap();
            for v in p {
                assert!((v - 1.0 / n as f64).abs() < 1e-6, "n = {n}: {v}");
            }
        }
    }

    #[test]
    fn point_masses() {
        let p = p_max_all(&[3.0, 5.0, 5.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(p, vec![0.0, 0.5, 0.5]);
        // A point mass at 0 against N(0, 1): the Gaussian wins half the time.
        let p = p_max_all(&[0.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-9 && (p[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn two_gaussians_closed_form() {
        let (m1, v1, m2, v2) = (12.0, 9.0, 7.0, 4.0);
        let p = p_max_all(&[m1, m2], &[v1, v2]).unwrap();
        let expected = 1.0 - q_function((m1 - m2) / (v1 + v2).sqrt());
        assert!((p[0] - expected).abs() < 1e-7);
    }

    #[test]
    fn matches_sampling_oracle() {
        let means = [46.9, 16.1, 2.3, 0.6, 0.4, 0.6, 2.3, 16.1];
        let sds = [6.48, 3.97, 1.5, 0.8, 0.6, 0.8, 1.5, 3.97];
        let vars: Vec<f64> = sds.iter().map(|s| s * s).collect();
        let p = p_max_antenna(&means, &vars, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let dists: Vec<Normal<f64>> = means.iter().zip(&sds).map(|(m, s)| Normal::new(*m, *s).unwrap()).collect();
        let trials = 2_000_000;
        let mut wins = 0u64;
        for _ in 0..trials {
            let x0 = dists[0].sample(&mut rng);
            if dists[1..].iter().all(|d| d.sample(&mut rng) < x0) {
                wins += 1;
            }
        }
        let est = wins as f64 / trials as f64;
        let se = (est * (1.0 - est) / trials as f64).sqrt();
        assert!((est - p).abs() < 3.0 * se, "quadrature {p} vs sampling {est} ± {se}");
    }

    #[test]
    fn enumerator_visits_every_sequence_once() {
        let all: Vec<Vec<usize>> = SequenceEnumerator::new(3, 4).unwrap().collect();
        assert_eq!(all.len(), 81);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 81);
        assert_eq!(all[0], vec![0, 0, 0, 0]);
        assert_eq!(all[80], vec![2, 2, 2, 2]);
        let part: Vec<_> = SequenceEnumerator::range(3, 4, 10..20).unwrap().collect();
        assert_eq!(part, all[10..20].to_vec());
    }

    #[test]
    fn error_free_channel() {
        let mut taps = vec![0.0; 4 * 4 * 2];
        for i in 0..4 {
            taps[(i * 4 + i) * 2] = 1.0;
        }
        let cir = ChannelResponse::from_flat(4, 4, 2, 1.0, taps).unwrap();
        let map = IndexMap::new(4, Mapping::Gray).unwrap();
        for seq in SequenceEnumerator::new(4, 2).unwrap() {
            assert_eq!(conditional_ber(&seq, &cir, 100.0, &map).unwrap(), 0.0);
        }
        assert_eq!(theoretical_ber_mssk(&cir, 2, 100.0, Mapping::Natural).unwrap(), 0.0);
    }

    #[test]
    fn two_antenna_single_tap_closed_form() {
        let cir = ChannelResponse::from_flat(2, 2, 1, 1.0, vec![0.2, 0.05, 0.08, 0.15]).unwrap();
        let e = 100.0;
        let map = IndexMap::new(2, Mapping::Natural).unwrap();
        // Sent antenna 0: counts N(20, 16) and N(5, 4.75).
        let pe0 = conditional_ber(&[0], &cir, e, &map).unwrap();
        let closed0 = q_function((20.0 - 5.0) / (16.0f64 + 4.75).sqrt());
        assert!((pe0 - closed0).abs() < 1e-7);
        // Sent antenna 1: N(8, 7.36) vs N(15, 12.75).
        let pe1 = conditional_ber(&[1], &cir, e, &map).unwrap();
        let closed1 = q_function((15.0 - 8.0) / (7.36f64 + 12.75).sqrt());
        assert!((pe1 - closed1).abs() < 1e-7);
        let avg = theoretical_ber_mssk(&cir, 1, e, Mapping::Natural).unwrap();
        assert!((avg - 0.5 * (pe0 + pe1)).abs() < 1e-12);
    }

    fn ring(n: usize) -> ChannelResponse {
        let row: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let d = j.min(n - j) as f64;
                vec![0.1 * (-d).exp(), 0.03 * (-0.5 * d).exp(), 0.01]
            })
            .collect();
        ChannelResponse::circulant(&row, 1.0).unwrap()
    }

    #[test]
    fn rotation_reduction_matches_full_enumeration() {
        let sym = ring(4);
        // Same taps but flagged non-circulant by a negligible perturbation.
        let mut taps = sym.taps().to_vec();
        taps[0] += 1e-15;
        let asym = ChannelResponse::from_flat(4, 4, 3, 1.0, taps).unwrap();
        assert!(!asym.is_circulant());
        for beta in [1, 2] {
            let a = index_scheme_ber(&sym, 3, 200.0, beta, &[Mapping::Natural, Mapping::Gray], 1e7).unwrap();
            let b = index_scheme_ber(&asym, 3, 200.0, beta, &[Mapping::Natural, Mapping::Gray], 1e7).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-9 * x.max(1e-12), "beta {beta}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn brute_force_average_of_conditionals() {
        let cir = ring(4);
        let map = IndexMap::new(4, Mapping::Natural).unwrap();
        let brute: f64 = SequenceEnumerator::new(4, 2)
            .unwrap()
            .map(|s| conditional_ber(&s, &cir, 150.0, &map).unwrap())
            .sum::<f64>()
            / 16.0;
        let fast = theoretical_ber_mssk(&cir, 2, 150.0, Mapping::Natural).unwrap();
        assert!((brute - fast).abs() < 1e-10);
    }

    #[test]
    fn guessing_limit() {
        // Identical moments everywhere: the winner is uniform, giving the
        // mean Hamming distance to a uniform antenna over log2 n bits.
        let row = vec![vec![0.05, 0.01]; 8];
        let cir = ChannelResponse::circulant(&row, 1.0).unwrap();
        let pe = theoretical_ber_mssk(&cir, 2, 100.0, Mapping::Gray).unwrap();
        assert!((pe - 0.5).abs() < 1e-6, "{pe}");
    }

    #[test]
    fn more_molecules_fewer_errors() {
        let cir = ring(8);
        let low = theoretical_ber_mssk(&cir, 2, 100.0, Mapping::Gray).unwrap();
        let high = theoretical_ber_mssk(&cir, 2, 1000.0, Mapping::Gray).unwrap();
        assert!(high < low);
    }

    #[test]
    fn guard_rejects_full_memory() {
        let row: Vec<Vec<f64>> = (0..8).map(|_| vec![0.001; 30]).collect();
        let cir = ChannelResponse::circulant(&row, 1.0).unwrap();
        match theoretical_ber_mssk(&cir, 30, 450.0, Mapping::Gray) {
            Err(Error::Infeasible { required, .. }) => assert!((required / 1.238e27 - 1.0).abs() < 1e-3),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }
}
