//! Statistical channel: arrival counts from tap probabilities, either as
//! independent Binomial events or through their Gaussian approximation.

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::particle::ChannelResponse;

/// Messenger molecule type. Types travel over independent channels that share
/// the same taps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Molecule {
    A,
    B,
}

impl Molecule {
    pub const ALL: [Molecule; 2] = [Molecule::A, Molecule::B];

    pub fn index(self) -> usize {
        match self {
            Molecule::A => 0,
            Molecule::B => 1,
        }
    }
}

/// `count` molecules of type `molecule` released by transmit antenna `tx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Emission {
    pub tx: usize,
    pub molecule: Molecule,
    pub count: u64,
}

impl Emission {
    pub fn new(tx: usize, molecule: Molecule, count: u64) -> Self {
        Self { tx, molecule, count }
    }
}

/// Emissions `s_i[k]` per interval, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionSchedule {
    pub n_tx: usize,
    pub t_s: f64,
    intervals: Vec<Vec<Emission>>,
}

impl TransmissionSchedule {
    pub fn new(n_tx: usize, t_s: f64) -> Self {
        Self { n_tx, t_s, intervals: Vec::new() }
    }

    pub fn push_interval(&mut self, emissions: Vec<Emission>) {
        self.intervals.push(emissions);
    }

    /// Set `s[i][k][m]`, growing the schedule as needed.
    pub fn set(&mut self, tx: usize, k: usize, molecule: Molecule, count: u64) {
        if self.intervals.len() <= k {
            self.intervals.resize(k + 1, Vec::new());
        }
        let slot = &mut self.intervals[k];
        slot.retain(|e| !(e.tx == tx && e.molecule == molecule));
        if count > 0 {
            slot.push(Emission::new(tx, molecule, count));
        }
    }

    pub fn n_intervals(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval(&self, k: usize) -> &[Emission] {
        &self.intervals[k]
    }

    /// `s[i][k][m]`; zero before the first interval and after the last.
    pub fn s(&self, tx: usize, k: isize, molecule: Molecule) -> u64 {
        if k < 0 || k as usize >= self.intervals.len() {
            return 0;
        }
        self.intervals[k as usize]
            .iter()
            .filter(|e| e.tx == tx && e.molecule == molecule)
            .map(|e| e.count)
            .sum()
    }

    pub fn total_molecules(&self) -> u64 {
        self.intervals.iter().flatten().map(|e| e.count).sum()
    }
}

/// Arrival counts `R[j][k][m]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrivalMatrix {
    n_rx: usize,
    n_intervals: usize,
    counts: Vec<u64>,
}

impl ArrivalMatrix {
    pub fn zeros(n_rx: usize, n_intervals: usize) -> Self {
        Self { n_rx, n_intervals, counts: vec![0; n_rx * n_intervals * 2] }
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    fn idx(&self, j: usize, k: usize, m: Molecule) -> usize {
        (j * self.n_intervals + k) * 2 + m.index()
    }

    pub fn get(&self, j: usize, k: usize, m: Molecule) -> u64 {
        self.counts[self.idx(j, k, m)]
    }

    pub fn set(&mut self, j: usize, k: usize, m: Molecule, v: u64) {
        let i = self.idx(j, k, m);
        self.counts[i] = v;
    }

    /// Counts at every receive antenna for interval `k` and type `m`.
    pub fn column(&self, k: usize, m: Molecule) -> Vec<u64> {
        (0..self.n_rx).map(|j| self.get(j, k, m)).collect()
    }
}

/// How arrivals are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalModel {
    /// One Binomial draw per (emission, tap, receive antenna).
    Binomial,
    /// One rounded, zero-truncated Normal draw per (antenna, interval, type).
    Gaussian,
}

impl std::str::FromStr for ArrivalModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "binomial" => Ok(ArrivalModel::Binomial),
            "gaussian" | "normal" => Ok(ArrivalModel::Gaussian),
            _ => Err(Error::Config(format!("unknown arrival model {s:?}"))),
        }
    }
}

impl std::fmt::Display for ArrivalModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ArrivalModel::Binomial => "binomial",
            ArrivalModel::Gaussian => "gaussian",
        })
    }
}

/// Mean and variance of the arrivals at antenna `j` during interval `k`
/// (zero-based) for molecule type `m`, summing the last `L` intervals of
/// emissions. Intervals before the schedule start contribute nothing.
pub fn arrival_moments(
    h: &ChannelResponse,
    s: &TransmissionSchedule,
    j: usize,
    k: usize,
    m: Molecule,
) -> (f64, f64) {
    let window = (0..h.memory().min(k + 1)).map(|d| (d, s.interval(k - d)));
    let (mut mean, mut var) = (0.0, 0.0);
    accumulate_moments(h, window, j, m, &mut mean, &mut var);
    (mean, var)
}

/// Add the contributions of `(delay, emissions)` pairs to antenna `j`.
pub(crate) fn accumulate_moments<'a>(
    h: &ChannelResponse,
    window: impl Iterator<Item = (usize, &'a [Emission])>,
    j: usize,
    m: Molecule,
    mean: &mut f64,
    var: &mut f64,
) {
    for (d, emissions) in window {
        for e in emissions.iter().filter(|e| e.molecule == m) {
            let p = h.h(e.tx, j, d);
            let c = e.count as f64;
            *mean += c * p;
            *var += c * p * (1.0 - p);
        }
    }
}

/// Moments at every antenna and both types for the newest interval of a
/// window. `recent[0]` is the current interval, `recent[d]` the one `d` back.
/// Outputs are laid out `[m * n_rx + j]`.
pub(crate) fn window_moments<'a>(
    h: &ChannelResponse,
    recent: impl IntoIterator<Item = &'a Vec<Emission>>,
    mean: &mut [f64],
    var: &mut [f64],
) {
    let n_rx = h.n_rx();
    mean.fill(0.0);
    var.fill(0.0);
    for (d, emissions) in recent.into_iter().enumerate().take(h.memory()) {
        for e in emissions.iter() {
            let c = e.count as f64;
            let base = e.molecule.index() * n_rx;
            let taps = (0..n_rx).map(|j| h.h(e.tx, j, d));
            for (j, p) in taps.enumerate() {
                mean[base + j] += c * p;
                var[base + j] += c * p * (1.0 - p);
            }
        }
    }
}

/// Zero-truncated, rounded Gaussian count; a zero variance returns the mean.
pub(crate) fn gaussian_count<R: Rng + ?Sized>(mean: f64, var: f64, rng: &mut R) -> u64 {
    let x = if var > 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        mean + var.sqrt() * z
    } else {
        mean
    };
    x.round().max(0.0) as u64
}

pub(crate) fn binomial_count<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("p in (0, 1)").sample(rng)
}

/// Draw arrivals for every antenna, interval and type of the schedule.
pub fn sample_arrivals<R: Rng + ?Sized>(
    h: &ChannelResponse,
    s: &TransmissionSchedule,
    model: ArrivalModel,
    rng: &mut R,
) -> Result<ArrivalMatrix> {
    if let Some(bad) = h.taps().iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Data(format!("tap {bad} outside [0, 1]")));
    }
    if let Some(e) = (0..s.n_intervals()).flat_map(|k| s.interval(k)).find(|e| e.tx >= h.n_tx()) {
        return Err(Error::Data(format!("emission from antenna {} but the response has {}", e.tx + 1, h.n_tx())));
    }
    let n_rx = h.n_rx();
    let k_max = s.n_intervals();
    let mut out = ArrivalMatrix::zeros(n_rx, k_max);
    match model {
        ArrivalModel::Gaussian => {
            for k in 0..k_max {
                for m in Molecule::ALL {
                    for j in 0..n_rx {
                        let (mu, var) = arrival_moments(h, s, j, k, m);
                        out.set(j, k, m, gaussian_count(mu, var, rng));
                    }
                }
            }
        }
        ArrivalModel::Binomial => {
            for z in 0..k_max {
                for e in s.interval(z) {
                    for d in 0..h.memory().min(k_max - z) {
                        for j in 0..n_rx {
                            let got = binomial_count(e.count, h.h(e.tx, j, d), rng);
                            let cur = out.get(j, z + d, e.molecule);
                            out.set(j, z + d, e.molecule, cur + got);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn table1_paired() -> ChannelResponse {
        // Tx 1 -> Rx 1 taps only; a 1x1 slice of the default response.
        ChannelResponse::from_flat(1, 1, 2, 0.75, vec![0.1042, 0.0346]).unwrap()
    }

    #[test]
    fn empty_schedule_has_zero_moments() {
        let h = table1_paired();
        let mut s = TransmissionSchedule::new(1, 0.75);
        s.push_interval(vec![]);
        s.push_interval(vec![]);
        assert_eq!(arrival_moments(&h, &s, 0, 1, Molecule::A), (0.0, 0.0));
    }

    #[test]
    fn single_emission_moments() {
        let h = table1_paired().truncated(1).unwrap();
        let mut s = TransmissionSchedule::new(1, 0.75);
        s.push_interval(vec![Emission::new(0, Molecule::A, 450)]);
        let (mu, var) = arrival_moments(&h, &s, 0, 0, Molecule::A);
        assert!((mu - 46.89).abs() < 1e-9);
        assert!((var - 46.89 * 0.8958).abs() < 1e-9);
        assert!((var - 42.004).abs() < 1e-3);
        assert_eq!(arrival_moments(&h, &s, 0, 0, Molecule::B), (0.0, 0.0));
    }

    #[test]
    fn two_term_convolution() {
        let h = table1_paired();
        let mut s = TransmissionSchedule::new(1, 0.75);
        s.set(0, 0, Molecule::A, 450);
        s.set(0, 1, Molecule::A, 450);
        let (mu, _) = arrival_moments(&h, &s, 0, 1, Molecule::A);
        assert!((mu - 62.46).abs() < 1e-9);
    }

    #[test]
    fn degenerate_taps_are_deterministic() {
        let h = ChannelResponse::from_flat(2, 2, 1, 1.0, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let mut s = TransmissionSchedule::new(2, 1.0);
        s.push_interval(vec![Emission::new(0, Molecule::A, 17), Emission::new(1, Molecule::B, 5)]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for model in [ArrivalModel::Binomial, ArrivalModel::Gaussian] {
            let r = sample_arrivals(&h, &s, model, &mut rng).unwrap();
            assert_eq!(r.column(0, Molecule::A), vec![17, 0]);
            assert_eq!(r.column(0, Molecule::B), vec![0, 5]);
        }
    }

    #[test]
    fn gaussian_mean_matches_moments() {
        let h = table1_paired();
        let mut s = TransmissionSchedule::new(1, 0.75);
        s.set(0, 0, Molecule::A, 450);
        s.set(0, 1, Molecule::A, 450);
        let (mu, var) = arrival_moments(&h, &s, 0, 1, Molecule::A);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += gaussian_count(mu, var, &mut rng) as f64;
        }
        let se = (var / n as f64).sqrt();
        // Rounding to integers adds no bias for a symmetric distribution.
        assert!((sum / n as f64 - mu).abs() < 3.0 * se + 1e-3);
    }

    #[test]
    fn binomial_mean_matches_moments() {
        let h = table1_paired();
        let mut s = TransmissionSchedule::new(1, 0.75);
        s.set(0, 0, Molecule::A, 450);
        s.set(0, 1, Molecule::A, 450);
        let (mu, var) = arrival_moments(&h, &s, 0, 1, Molecule::A);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 20_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += sample_arrivals(&h, &s, ArrivalModel::Binomial, &mut rng).unwrap().get(0, 1, Molecule::A) as f64;
        }
        assert!((sum / n as f64 - mu).abs() < 3.0 * (var / n as f64).sqrt());
    }

    #[test]
    fn rejects_bad_taps() {
        let mut h = table1_paired();
        // Bypass the constructor check through a round-trip of a bad value.
        let text = h.to_text().replace("0.1042", "1.5");
        assert!(ChannelResponse::from_text(&text).is_err());
        h = ChannelResponse::from_flat(1, 1, 1, 1.0, vec![0.5]).unwrap();
        let mut s = TransmissionSchedule::new(2, 1.0);
        s.push_interval(vec![Emission::new(1, Molecule::A, 3)]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(sample_arrivals(&h, &s, ArrivalModel::Gaussian, &mut rng), Err(Error::Data(_))));
    }

    fn arb_schedule(n_tx: usize, k: usize) -> impl Strategy<Value = TransmissionSchedule> {
        proptest::collection::vec(proptest::collection::vec(0u64..500, n_tx), k).prop_map(move |rows| {
            let mut s = TransmissionSchedule::new(n_tx, 1.0);
            for (k, row) in rows.iter().enumerate() {
                for (i, &c) in row.iter().enumerate() {
                    s.set(i, k, Molecule::A, c);
                }
            }
            s
        })
    }

    proptest! {
        #[test]
        fn moments_superpose_and_variance_bounded(
            taps in proptest::collection::vec(0.0f64..=1.0, 2 * 2 * 3),
            a in arb_schedule(2, 4),
            b in arb_schedule(2, 4),
        ) {
            let h = ChannelResponse::from_flat(2, 2, 3, 1.0, taps).unwrap();
            let mut sum = TransmissionSchedule::new(2, 1.0);
            for k in 0..4 {
                for i in 0..2 {
                    sum.set(i, k, Molecule::A, a.s(i, k as isize, Molecule::A) + b.s(i, k as isize, Molecule::A));
                }
            }
            for j in 0..2 {
                for k in 0..4 {
                    let (ma, va) = arrival_moments(&h, &a, j, k, Molecule::A);
                    let (mb, vb) = arrival_moments(&h, &b, j, k, Molecule::A);
                    let (ms, vs) = arrival_moments(&h, &sum, j, k, Molecule::A);
                    prop_assert!((ma + mb - ms).abs() <= 1e-9 * ms.max(1.0));
                    prop_assert!((va + vb - vs).abs() <= 1e-9 * vs.max(1.0));
                    prop_assert!(vs <= ms + 1e-9);
                }
            }
        }
    }
}
