//! Continuous-stream link simulation on the statistical channel model.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{binomial_count, gaussian_count, window_moments, ArrivalModel, Emission, Molecule};
use crate::detection::{
    atd, calibrate_threshold, combine_egc, combine_sc, ftd, hamming, mcd_msm, mcd_mssk, ml_sequence_detect, symbol_ml,
    BranchMetric, DetectorState, DEFAULT_SEQUENCE_LIMIT,
};
use crate::error::{Error, Result};
use crate::modulation::{Modulator, Scheme, SchemeConfig};
use crate::particle::{stream_rng, ChannelResponse};
use crate::stats::ErrorTally;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    /// Fixed threshold calibrated on a training run.
    Ftd,
    /// Rise over the previous interval's count.
    Atd,
    /// Maximum count.
    Mcd,
    /// Decision-feedback symbol-by-symbol maximum likelihood.
    SymbolMl,
    /// Exhaustive maximum-likelihood sequence detection over blocks of
    /// `window` symbols.
    SequenceMl { window: usize },
}

impl Detector {
    pub fn supports(self, scheme: Scheme) -> bool {
        match self {
            Detector::Ftd | Detector::Atd => !scheme.is_index(),
            Detector::Mcd => scheme.is_index(),
            Detector::SymbolMl => matches!(scheme, Scheme::Mssk | Scheme::Qmssk),
            Detector::SequenceMl { .. } => scheme == Scheme::Mssk,
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Detector::Ftd => f.write_str("ftd"),
            Detector::Atd => f.write_str("atd"),
            Detector::Mcd => f.write_str("mcd"),
            Detector::SymbolMl => f.write_str("symbol_ml"),
            Detector::SequenceMl { window } => write!(f, "sequence_ml:{window}"),
        }
    }
}

impl FromStr for Detector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let (name, arg) = match key.split_once(':') {
            Some((n, a)) => (n.to_string(), Some(a.to_string())),
            None => (key, None),
        };
        match (name.as_str(), arg) {
            ("ftd", None) => Ok(Detector::Ftd),
            ("atd", None) => Ok(Detector::Atd),
            ("mcd", None) => Ok(Detector::Mcd),
            ("symbol_ml", None) => Ok(Detector::SymbolMl),
            ("sequence_ml", w) => {
                let window = match w {
                    Some(w) => w.parse().map_err(|_| Error::Config(format!("bad sequence window {w:?}")))?,
                    None => 3,
                };
                if window == 0 {
                    return Err(Error::Config("sequence window must be at least 1".into()));
                }
                Ok(Detector::SequenceMl { window })
            }
            _ => Err(Error::Config(format!("unknown detector {s:?}"))),
        }
    }
}

/// How repetition-coded counts are merged before thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Combining {
    #[default]
    Egc,
    Sc,
}

impl fmt::Display for Combining {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Combining::Egc => "egc",
            Combining::Sc => "sc",
        })
    }
}

impl FromStr for Combining {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "egc" => Ok(Combining::Egc),
            "sc" => Ok(Combining::Sc),
            _ => Err(Error::Config(format!("unknown combining rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinkConfig {
    pub scheme: SchemeConfig,
    pub detector: Detector,
    pub combining: Combining,
    pub model: ArrivalModel,
    /// Stop once this many bits have been counted.
    pub max_bits: u64,
    /// Stop early once this many bit errors have been counted; 0 disables.
    pub target_errors: u64,
    /// Training symbols for threshold calibration.
    pub calibration_symbols: usize,
    pub metric: BranchMetric,
}

impl LinkConfig {
    pub fn new(scheme: SchemeConfig, detector: Detector) -> Self {
        Self {
            scheme,
            detector,
            combining: Combining::Egc,
            model: ArrivalModel::Gaussian,
            max_bits: 1_000_000,
            target_errors: 100,
            calibration_symbols: 10_000,
            metric: BranchMetric::Gaussian,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkResult {
    pub tally: ErrorTally,
    /// Calibrated threshold of threshold detectors.
    pub gamma: Option<u64>,
}

/// Symbol source and arrival sampler for one link.
struct Stream<'a> {
    cir: &'a ChannelResponse,
    modulator: &'a Modulator,
    model: ArrivalModel,
    recent: VecDeque<Vec<Emission>>,
    mean: Vec<f64>,
    var: Vec<f64>,
    /// Counts of the current interval, `[m * n_rx + j]`.
    counts: Vec<u64>,
    bits: Vec<u8>,
}

impl<'a> Stream<'a> {
    fn new(cir: &'a ChannelResponse, modulator: &'a Modulator, model: ArrivalModel) -> Self {
        let n = 2 * cir.n_rx();
        Self {
            cir,
            modulator,
            model,
            recent: VecDeque::with_capacity(cir.memory() + 1),
            mean: vec![0.0; n],
            var: vec![0.0; n],
            counts: vec![0; n],
            bits: Vec::new(),
        }
    }

    /// Emit one random symbol and draw the arrivals of its interval.
    fn advance(&mut self, rng: &mut ChaCha8Rng) {
        let per = self.modulator.params().bits_per_symbol;
        self.bits.clear();
        self.bits.extend((0..per).map(|_| rng.random_range(0..2u8)));
        let mut emissions = if self.recent.len() == self.cir.memory() {
            let mut v = self.recent.pop_back().expect("non-empty");
            v.clear();
            v
        } else {
            Vec::new()
        };
        self.modulator.symbol(&self.bits, &mut emissions);
        self.recent.push_front(emissions);

        let n_rx = self.cir.n_rx();
        match self.model {
            ArrivalModel::Gaussian => {
                window_moments(self.cir, &self.recent, &mut self.mean, &mut self.var);
                for (c, (m, v)) in self.counts.iter_mut().zip(self.mean.iter().zip(&self.var)) {
                    *c = gaussian_count(*m, *v, rng);
                }
            }
            ArrivalModel::Binomial => {
                self.counts.fill(0);
                for (d, emissions) in self.recent.iter().enumerate() {
                    for e in emissions {
                        let base = e.molecule.index() * n_rx;
                        for j in 0..n_rx {
                            self.counts[base + j] += binomial_count(e.count, self.cir.h(e.tx, j, d), rng);
                        }
                    }
                }
            }
        }
    }

    fn counts(&self, m: Molecule) -> &[u64] {
        let n_rx = self.cir.n_rx();
        &self.counts[m.index() * n_rx..(m.index() + 1) * n_rx]
    }
}

/// Scalar statistics fed to threshold detectors, paired with the bit each
/// one decides.
fn threshold_statistics(scheme: Scheme, combining: Combining, stream: &Stream, out: &mut Vec<u64>) -> Result<()> {
    out.clear();
    let a = stream.counts(Molecule::A);
    match scheme {
        Scheme::SisoBcsk => out.push(a[0]),
        Scheme::SisoDmosk => {
            out.push(a[0]);
            out.push(stream.counts(Molecule::B)[0]);
        }
        Scheme::RcBcsk => out.push(match combining {
            Combining::Egc => combine_egc(a)?,
            Combining::Sc => combine_sc(a)?,
        }),
        Scheme::SmuxBcsk => out.extend_from_slice(a),
        _ => return Err(Error::Unsupported(format!("threshold detection of {scheme}"))),
    }
    Ok(())
}

fn check_inputs(cfg: &LinkConfig, cir: &ChannelResponse, modulator: &Modulator) -> Result<()> {
    let scheme = cfg.scheme.scheme;
    if !cfg.detector.supports(scheme) {
        return Err(Error::Unsupported(format!("{} detector for {scheme}", cfg.detector)));
    }
    if cir.n_tx() != cfg.scheme.n_tx || cir.n_rx() != cfg.scheme.n_rx {
        return Err(Error::Argument(format!(
            "channel response is {}x{} but the scheme uses {}x{}",
            cir.n_tx(),
            cir.n_rx(),
            cfg.scheme.n_tx,
            cfg.scheme.n_rx
        )));
    }
    let t_s = modulator.params().t_s;
    if ((cir.t_s() - t_s) / t_s).abs() > 1e-9 {
        return Err(Error::Argument(format!(
            "{scheme} needs a channel response sampled at t_s = {t_s} s, got {} s",
            cir.t_s()
        )));
    }
    if cfg.max_bits == 0 {
        return Err(Error::Argument("bit budget must be positive".into()));
    }
    Ok(())
}

/// Simulate one link on `cir` until the bit budget or the target error count
/// is reached. The first `L` symbols only fill the channel and are not
/// counted. `stream` selects an independent RNG stream under `seed`.
pub fn simulate_link(cfg: &LinkConfig, cir: &ChannelResponse, seed: u64, stream: u64) -> Result<LinkResult> {
    let modulator = Modulator::new(&cfg.scheme)?;
    check_inputs(cfg, cir, &modulator)?;
    let scheme = cfg.scheme.scheme;

    let gamma = match cfg.detector {
        Detector::Ftd | Detector::Atd => {
            let mut rng = stream_rng(seed, (stream << 1) | 1);
            Some(calibrate(cfg, cir, &modulator, &mut rng)?)
        }
        _ => None,
    };
    let mut rng = stream_rng(seed, stream << 1);
    let mut sim = Stream::new(cir, &modulator, cfg.model);
    let warmup = cir.memory();
    let mut tally = ErrorTally::default();
    let done = |t: &ErrorTally| t.bits >= cfg.max_bits || (cfg.target_errors > 0 && t.errors >= cfg.target_errors);

    let map = modulator.index_map().cloned();
    let emission = modulator.emission() as f64;
    let mut decided: Vec<u8> = Vec::new();
    match cfg.detector {
        Detector::Ftd | Detector::Atd => {
            let gamma = gamma.expect("calibrated");
            let mut stats = Vec::new();
            let mut prev: Option<Vec<u64>> = None;
            for k in 0.. {
                sim.advance(&mut rng);
                threshold_statistics(scheme, cfg.combining, &sim, &mut stats)?;
                decided.clear();
                for (s, stat) in stats.iter().enumerate() {
                    decided.push(match (&prev, cfg.detector) {
                        (Some(p), Detector::Atd) => atd(*stat, p[s]),
                        _ => ftd(*stat, gamma),
                    });
                }
                prev = Some(stats.clone());
                if k >= warmup {
                    tally.record(sim.bits.len() as u64, hamming(&sim.bits, &decided) as u64);
                    if done(&tally) {
                        break;
                    }
                }
            }
        }
        Detector::Mcd | Detector::SymbolMl => {
            let map = map.expect("index scheme");
            let mut states = [DetectorState::new(cir.memory(), emission), DetectorState::new(cir.memory(), emission)];
            for k in 0.. {
                sim.advance(&mut rng);
                decided.clear();
                match (scheme, cfg.detector) {
                    (Scheme::Msm, _) => {
                        let (m, j) = mcd_msm(sim.counts(Molecule::A), sim.counts(Molecule::B), &mut rng);
                        decided.push(m.index() as u8);
                        decided.extend(map.codeword_bits(j));
                    }
                    (_, detector) => {
                        let types = if scheme == Scheme::Qmssk { 2 } else { 1 };
                        for (t, m) in Molecule::ALL.iter().take(types).enumerate() {
                            let j = if detector == Detector::Mcd {
                                mcd_mssk(sim.counts(*m), &mut rng)
                            } else {
                                symbol_ml(sim.counts(*m), &mut states[t], Some(cir), &mut rng)?
                            };
                            decided.extend(map.codeword_bits(j));
                        }
                    }
                }
                if k >= warmup {
                    tally.record(sim.bits.len() as u64, hamming(&sim.bits, &decided) as u64);
                    if done(&tally) {
                        break;
                    }
                }
            }
        }
        Detector::SequenceMl { window } => {
            let map = map.expect("index scheme");
            let mut history: VecDeque<usize> = VecDeque::with_capacity(cir.memory());
            let mut block: Vec<Vec<u64>> = Vec::with_capacity(window);
            let mut sent: Vec<Vec<u8>> = Vec::with_capacity(window);
            let mut k = 0usize;
            loop {
                block.clear();
                sent.clear();
                for _ in 0..window {
                    sim.advance(&mut rng);
                    block.push(sim.counts(Molecule::A).to_vec());
                    sent.push(sim.bits.clone());
                }
                let past: Vec<usize> = history.iter().copied().collect();
                let seq =
                    ml_sequence_detect(&block, cir, emission, &past, cfg.metric, DEFAULT_SEQUENCE_LIMIT, &mut rng)?;
                for (z, &x) in seq.iter().enumerate() {
                    if history.len() + 1 >= cir.memory().max(1) {
                        history.pop_front();
                    }
                    if cir.memory() > 1 {
                        history.push_back(x);
                    }
                    if k >= warmup {
                        tally.record(sent[z].len() as u64, hamming(&sent[z], &map.codeword_bits(x)) as u64);
                    }
                    k += 1;
                }
                if k > warmup && done(&tally) {
                    break;
                }
            }
        }
    }
    Ok(LinkResult { tally, gamma })
}

/// Error-minimizing threshold over `cfg.calibration_symbols` training symbols.
fn calibrate(cfg: &LinkConfig, cir: &ChannelResponse, modulator: &Modulator, rng: &mut ChaCha8Rng) -> Result<u64> {
    let mut sim = Stream::new(cir, modulator, cfg.model);
    let mut stats = Vec::new();
    let mut samples = Vec::with_capacity(cfg.calibration_symbols * modulator.params().bits_per_symbol);
    for k in 0..cfg.calibration_symbols + cir.memory() {
        sim.advance(rng);
        if k < cir.memory() {
            continue;
        }
        threshold_statistics(cfg.scheme.scheme, cfg.combining, &sim, &mut stats)?;
        samples.extend(stats.iter().zip(&sim.bits).map(|(s, b)| (*s, *b)));
    }
    calibrate_threshold(&samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::{derive_params, Mapping};

    fn ring(n: usize, t_s: f64, memory: usize, spread: f64) -> ChannelResponse {
        let row: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let d = j.min(n - j) as f64;
                (0..memory).map(|m| 0.1 * (-d * spread).exp() / (1.0 + 2.0 * m as f64)).collect()
            })
            .collect();
        ChannelResponse::circulant(&row, t_s).unwrap()
    }

    fn cir_for(cfg: &SchemeConfig, memory: usize, spread: f64) -> ChannelResponse {
        let t_s = derive_params(cfg).unwrap().t_s;
        ring(cfg.n_tx, t_s, memory, spread)
    }

    #[test]
    fn detector_names_round_trip() {
        for d in [Detector::Ftd, Detector::Atd, Detector::Mcd, Detector::SymbolMl, Detector::SequenceMl { window: 2 }] {
            assert_eq!(d.to_string().parse::<Detector>().unwrap(), d);
        }
        assert_eq!("sequence-ml".parse::<Detector>().unwrap(), Detector::SequenceMl { window: 3 });
        assert!("sequence_ml:0".parse::<Detector>().is_err());
        assert!("viterbi".parse::<Detector>().is_err());
    }

    #[test]
    fn incompatible_pairs_rejected() {
        let cfg = SchemeConfig::new(Scheme::Mssk);
        let cir = cir_for(&cfg, 3, 2.0);
        let link = LinkConfig::new(cfg, Detector::Ftd);
        assert!(matches!(simulate_link(&link, &cir, 0, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn wrong_symbol_duration_rejected() {
        let cfg = SchemeConfig::new(Scheme::SmuxBcsk);
        let cir = ring(8, 0.75, 3, 2.0);
        assert!(simulate_link(&LinkConfig::new(cfg, Detector::Ftd), &cir, 0, 0).is_err());
    }

    #[test]
    fn deterministic_and_stream_dependent() {
        let cfg = SchemeConfig::new(Scheme::Mssk).with_m_tx(60.0);
        let cir = cir_for(&cfg, 4, 0.7);
        let link = LinkConfig { max_bits: 30_000, target_errors: 0, ..LinkConfig::new(cfg, Detector::Mcd) };
        let a = simulate_link(&link, &cir, 5, 0).unwrap();
        let b = simulate_link(&link, &cir, 5, 0).unwrap();
        let c = simulate_link(&link, &cir, 5, 1).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.tally.errors, c.tally.errors);
        assert!(a.tally.bits >= 30_000);
    }

    #[test]
    fn stops_at_target_errors() {
        let cfg = SchemeConfig::new(Scheme::Mssk).with_m_tx(5.0);
        let cir = cir_for(&cfg, 3, 0.3);
        let link = LinkConfig { max_bits: 10_000_000, target_errors: 50, ..LinkConfig::new(cfg, Detector::Mcd) };
        let r = simulate_link(&link, &cir, 1, 0).unwrap();
        assert!(r.tally.errors >= 50 && r.tally.errors < 50 + 3);
    }

    #[test]
    fn every_supported_pair_runs() {
        for scheme in Scheme::ALL {
            for det in [Detector::Ftd, Detector::Atd, Detector::Mcd, Detector::SymbolMl, Detector::SequenceMl { window: 2 }]
            {
                if !det.supports(scheme) {
                    continue;
                }
                for model in [ArrivalModel::Gaussian, ArrivalModel::Binomial] {
                    let cfg = SchemeConfig::new(scheme).with_mapping(Mapping::Gray);
                    let cir = cir_for(&cfg, 3, 1.0);
                    let link = LinkConfig {
                        max_bits: 3000,
                        calibration_symbols: 500,
                        model,
                        ..LinkConfig::new(cfg, det)
                    };
                    let r = simulate_link(&link, &cir, 2, 0).unwrap();
                    assert!(r.tally.ber() <= 1.0, "{scheme} {det} {model}");
                    assert_eq!(r.gamma.is_some(), matches!(det, Detector::Ftd | Detector::Atd));
                }
            }
        }
    }

    #[test]
    fn noiseless_channel_is_error_free() {
        // Identity taps with zero memory spread: counts equal emissions exactly.
        let mut taps = vec![0.0; 8 * 8];
        for i in 0..8 {
            taps[i * 8 + i] = 1.0;
        }
        let cfg = SchemeConfig::new(Scheme::Mssk);
        let t_s = derive_params(&cfg).unwrap().t_s;
        let cir = ChannelResponse::from_flat(8, 8, 1, t_s, taps).unwrap();
        for det in [Detector::Mcd, Detector::SymbolMl, Detector::SequenceMl { window: 2 }] {
            let link = LinkConfig { max_bits: 3000, ..LinkConfig::new(cfg.clone(), det) };
            assert_eq!(simulate_link(&link, &cir, 0, 0).unwrap().tally.errors, 0, "{det}");
        }
    }
}
