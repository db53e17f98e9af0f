//! Bit-to-emission mapping for every scheme, with bit-rate and molecule-budget
//! normalization.
//!
//! Every scheme spends `M_tx / 2` molecules per information bit on average and
//! carries one bit per `t_b` seconds:
//!
//! | scheme     | bits/symbol     | `t_s`               | molecules per active emitter |
//! |------------|-----------------|---------------------|------------------------------|
//! | SISO BCSK  | 1               | `t_b`               | `M_tx`                       |
//! | SISO D-MoSK| 2               | `2 t_b`             | `M_tx` per type              |
//! | RC BCSK    | 1               | `t_b`               | `M_tx / n_tx` per antenna    |
//! | SMUX BCSK  | `n_tx`          | `n_tx t_b`          | `M_tx` per antenna           |
//! | MSSK       | `log2 n`        | `log2 n t_b`        | `log2 n / 2 * M_tx`          |
//! | QMSSK      | `2 log2 n`      | `2 log2 n t_b`      | `log2 n / 2 * M_tx` per type |
//! | MSM        | `1 + log2 n`    | `(1 + log2 n) t_b`  | `(1 + log2 n) / 2 * M_tx`    |

use std::fmt;
use std::str::FromStr;

use crate::channel::{Emission, Molecule, TransmissionSchedule};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    SisoBcsk,
    SisoDmosk,
    RcBcsk,
    SmuxBcsk,
    Mssk,
    Qmssk,
    Msm,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::SisoBcsk,
        Scheme::SisoDmosk,
        Scheme::RcBcsk,
        Scheme::SmuxBcsk,
        Scheme::Mssk,
        Scheme::Qmssk,
        Scheme::Msm,
    ];

    /// Antenna-index schemes need a power-of-two array and use index mappings.
    pub fn is_index(self) -> bool {
        matches!(self, Scheme::Mssk | Scheme::Qmssk | Scheme::Msm)
    }

    pub fn molecule_types(self) -> usize {
        match self {
            Scheme::SisoDmosk | Scheme::Qmssk | Scheme::Msm => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SisoBcsk => "siso_bcsk",
            Scheme::SisoDmosk => "siso_dmosk",
            Scheme::RcBcsk => "rc_bcsk",
            Scheme::SmuxBcsk => "smux_bcsk",
            Scheme::Mssk => "mssk",
            Scheme::Qmssk => "qmssk",
            Scheme::Msm => "msm",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let scheme = match key.as_str() {
            "siso_bcsk" | "siso" | "bcsk" => Scheme::SisoBcsk,
            "siso_dmosk" | "dmosk" | "d_mosk" => Scheme::SisoDmosk,
            "rc_bcsk" | "rc" => Scheme::RcBcsk,
            "smux_bcsk" | "smux" => Scheme::SmuxBcsk,
            "mssk" => Scheme::Mssk,
            "qmssk" => Scheme::Qmssk,
            "msm" => Scheme::Msm,
            _ => return Err(Error::Config(format!("unknown scheme {s:?}"))),
        };
        Ok(scheme)
    }
}

/// Antenna index to codeword assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mapping {
    /// Index `i` (zero-based) carries the binary representation of `i`.
    Natural,
    /// Reflected Gray code, so circularly adjacent antennas differ in one bit.
    Gray,
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mapping::Natural => "natural",
            Mapping::Gray => "gray",
        })
    }
}

impl FromStr for Mapping {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "natural" | "binary" => Ok(Mapping::Natural),
            "gray" => Ok(Mapping::Gray),
            _ => Err(Error::Config(format!("unknown mapping {s:?}"))),
        }
    }
}

/// Bijection between antenna indices `0..n` and `log2 n`-bit codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexMap {
    n: usize,
    bits: u32,
    mapping: Mapping,
}

impl IndexMap {
    pub fn new(n: usize, mapping: Mapping) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::Argument(format!("alphabet size {n} is not a power of two")));
        }
        Ok(Self { n, bits: n.trailing_zeros(), mapping })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn mapping(&self) -> Mapping {
        self.mapping
    }

    /// Codeword of antenna `index` (zero-based), most significant bit first.
    pub fn codeword(&self, index: usize) -> u32 {
        debug_assert!(index < self.n);
        let i = index as u32;
        match self.mapping {
            Mapping::Natural => i,
            Mapping::Gray => i ^ (i >> 1),
        }
    }

    /// Antenna carrying `codeword`.
    pub fn index(&self, codeword: u32) -> usize {
        debug_assert!((codeword as usize) < self.n);
        match self.mapping {
            Mapping::Natural => codeword as usize,
            Mapping::Gray => {
                let mut g = codeword;
                let mut shift = 1;
                while shift < 32 {
                    g ^= g >> shift;
                    shift <<= 1;
                }
                g as usize
            }
        }
    }

    /// Number of differing codeword bits between two antennas.
    pub fn distance(&self, a: usize, b: usize) -> u32 {
        (self.codeword(a) ^ self.codeword(b)).count_ones()
    }

    /// Codeword as individual bits, most significant first.
    pub fn codeword_bits(&self, index: usize) -> Vec<u8> {
        to_bits(self.codeword(index), self.bits)
    }

    /// Codeword text such as `"011"`.
    pub fn label(&self, index: usize) -> String {
        self.codeword_bits(index).iter().map(|b| if *b == 1 { '1' } else { '0' }).collect()
    }
}

/// Index mapping for an `n`-antenna array.
pub fn gray_index_map(n: usize, mapping: Mapping) -> Result<IndexMap> {
    IndexMap::new(n, mapping)
}

pub(crate) fn to_bits(value: u32, width: u32) -> Vec<u8> {
    (0..width).rev().map(|b| ((value >> b) & 1) as u8).collect()
}

pub(crate) fn from_bits(bits: &[u8]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub n_tx: usize,
    pub n_rx: usize,
    /// Bit duration, s.
    pub t_b: f64,
    /// Molecule budget: `M_tx / 2` molecules per bit on average.
    pub m_tx: f64,
    pub mapping: Mapping,
    /// Molecule types available to the scheme.
    pub beta: usize,
}

impl SchemeConfig {
    /// `n_tx = n_rx = 8`, `t_b = 0.25 s`, `M_tx = 300`, natural mapping.
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            n_tx: 8,
            n_rx: 8,
            t_b: 0.25,
            m_tx: 300.0,
            mapping: Mapping::Natural,
            beta: scheme.molecule_types(),
        }
    }

    pub fn with_mapping(mut self, mapping: Mapping) -> Self {
        self.mapping = mapping;
        self
    }

    pub fn with_m_tx(mut self, m_tx: f64) -> Self {
        self.m_tx = m_tx;
        self
    }

    pub fn with_t_b(mut self, t_b: f64) -> Self {
        self.t_b = t_b;
        self
    }

    pub fn with_antennas(mut self, n: usize) -> Self {
        self.n_tx = n;
        self.n_rx = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tx == 0 || self.n_rx == 0 {
            return Err(Error::Argument("antenna counts must be positive".into()));
        }
        if !(self.t_b > 0.0 && self.t_b.is_finite()) {
            return Err(Error::Argument(format!("bit duration must be positive, got {}", self.t_b)));
        }
        if !(self.m_tx >= 0.0 && self.m_tx.is_finite()) {
            return Err(Error::Argument(format!("molecule budget must be non-negative, got {}", self.m_tx)));
        }
        if self.beta != self.scheme.molecule_types() {
            return Err(Error::Unsupported(format!(
                "{} uses {} molecule type(s), configured beta = {}",
                self.scheme,
                self.scheme.molecule_types(),
                self.beta
            )));
        }
        if self.scheme.is_index() && !self.n_tx.is_power_of_two() {
            return Err(Error::Argument(format!(
                "{} needs a power-of-two number of transmit antennas, got {}",
                self.scheme, self.n_tx
            )));
        }
        if self.scheme.is_index() && self.n_tx < 2 {
            return Err(Error::Argument(format!("{} needs at least two antennas", self.scheme)));
        }
        if matches!(self.scheme, Scheme::SmuxBcsk) || self.scheme.is_index() {
            if self.n_tx != self.n_rx {
                return Err(Error::Unsupported(format!(
                    "{} pairs antennas one to one, got {}x{}",
                    self.scheme, self.n_tx, self.n_rx
                )));
            }
        }
        Ok(())
    }

    /// Index map of the antenna alphabet.
    pub fn index_map(&self) -> Result<IndexMap> {
        IndexMap::new(self.n_tx, self.mapping)
    }

    fn log2_n(&self) -> u32 {
        self.n_tx.trailing_zeros()
    }
}

/// Normalized transmission parameters of a scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeParams {
    /// Symbol duration, s.
    pub t_s: f64,
    /// Nominal molecules per active emitter (per antenna for RC, per type for QMSSK).
    pub emission: f64,
    pub bits_per_symbol: usize,
    pub molecule_types: usize,
}

pub fn derive_params(cfg: &SchemeConfig) -> Result<SchemeParams> {
    cfg.validate()?;
    let n = cfg.n_tx as f64;
    let (t_b, m) = (cfg.t_b, cfg.m_tx);
    let k = cfg.log2_n() as usize;
    let (bits, emission) = match cfg.scheme {
        Scheme::SisoBcsk => (1, m),
        Scheme::SisoDmosk => (2, m),
        Scheme::RcBcsk => (1, m / n),
        Scheme::SmuxBcsk => (cfg.n_tx, m),
        Scheme::Mssk => (k, k as f64 / 2.0 * m),
        Scheme::Qmssk => (2 * k, k as f64 / 2.0 * m),
        Scheme::Msm => (1 + k, (1 + k) as f64 / 2.0 * m),
    };
    Ok(SchemeParams {
        t_s: bits as f64 * t_b,
        emission,
        bits_per_symbol: bits,
        molecule_types: cfg.scheme.molecule_types(),
    })
}

/// Split `total` into `parts` integers, each the floor or ceiling of
/// `total / parts`, summing to `total` rounded to the nearest integer.
fn apportion(total: f64, parts: usize) -> Vec<u64> {
    let whole = total.round() as u64;
    let base = whole / parts as u64;
    let extra = (whole % parts as u64) as usize;
    (0..parts).map(|p| base + u64::from(p < extra)).collect()
}

/// Per-symbol modulator with the integer emission sizes precomputed.
#[derive(Debug, Clone)]
pub struct Modulator {
    cfg: SchemeConfig,
    params: SchemeParams,
    map: Option<IndexMap>,
    /// Integer molecules per active emitter; per antenna for RC.
    counts: Vec<u64>,
}

impl Modulator {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        let params = derive_params(cfg)?;
        let map = if cfg.scheme.is_index() { Some(cfg.index_map()?) } else { None };
        let counts = match cfg.scheme {
            Scheme::RcBcsk => apportion(cfg.m_tx, cfg.n_tx),
            _ => vec![params.emission.round() as u64],
        };
        Ok(Self { cfg: cfg.clone(), params, map, counts })
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn index_map(&self) -> Option<&IndexMap> {
        self.map.as_ref()
    }

    /// Integer emission of the single active emitter (not RC).
    pub fn emission(&self) -> u64 {
        self.counts[0]
    }

    /// Emissions of one symbol, appended to `out`. `bits` must hold exactly
    /// `bits_per_symbol` binary values.
    pub fn symbol(&self, bits: &[u8], out: &mut Vec<Emission>) {
        debug_assert_eq!(bits.len(), self.params.bits_per_symbol);
        let a = Molecule::A;
        let b = Molecule::B;
        match self.cfg.scheme {
            Scheme::SisoBcsk => {
                if bits[0] == 1 {
                    out.push(Emission::new(0, a, self.counts[0]));
                }
            }
            Scheme::SisoDmosk => {
                if bits[0] == 1 {
                    out.push(Emission::new(0, a, self.counts[0]));
                }
                if bits[1] == 1 {
                    out.push(Emission::new(0, b, self.counts[0]));
                }
            }
            Scheme::RcBcsk => {
                if bits[0] == 1 {
                    for (i, &c) in self.counts.iter().enumerate() {
                        out.push(Emission::new(i, a, c));
                    }
                }
            }
            Scheme::SmuxBcsk => {
                for (i, &bit) in bits.iter().enumerate() {
                    if bit == 1 {
                        out.push(Emission::new(i, a, self.counts[0]));
                    }
                }
            }
            Scheme::Mssk => {
                let map = self.map.as_ref().expect("index scheme");
                out.push(Emission::new(map.index(from_bits(bits)), a, self.counts[0]));
            }
            Scheme::Qmssk => {
                let map = self.map.as_ref().expect("index scheme");
                let half = bits.len() / 2;
                out.push(Emission::new(map.index(from_bits(&bits[..half])), a, self.counts[0]));
                out.push(Emission::new(map.index(from_bits(&bits[half..])), b, self.counts[0]));
            }
            Scheme::Msm => {
                let map = self.map.as_ref().expect("index scheme");
                let molecule = if bits[0] == 0 { a } else { b };
                out.push(Emission::new(map.index(from_bits(&bits[1..])), molecule, self.counts[0]));
            }
        }
    }
}

/// Modulated bit stream.
#[derive(Debug, Clone)]
pub struct Modulated {
    pub schedule: TransmissionSchedule,
    /// Zero bits appended to fill the last symbol; excluded from error counts.
    pub padding: usize,
}

/// Map `bits` onto `n_symbols` intervals, zero-padding a short stream.
pub fn modulate(cfg: &SchemeConfig, bits: &[u8], n_symbols: usize) -> Result<Modulated> {
    if let Some(bad) = bits.iter().find(|b| **b > 1) {
        return Err(Error::Argument(format!("bit value {bad} is not binary")));
    }
    let modulator = Modulator::new(cfg)?;
    let per = modulator.params.bits_per_symbol;
    let needed = n_symbols * per;
    if bits.len() > needed {
        return Err(Error::Argument(format!(
            "{} bits do not fit in {n_symbols} symbols of {per} bits",
            bits.len()
        )));
    }
    let mut padded = bits.to_vec();
    padded.resize(needed, 0);
    let mut schedule = TransmissionSchedule::new(cfg.n_tx, modulator.params.t_s);
    let mut buf = Vec::new();
    for sym in padded.chunks(per.max(1)).take(n_symbols) {
        buf.clear();
        modulator.symbol(sym, &mut buf);
        schedule.push_interval(buf.clone());
    }
    Ok(Modulated { schedule, padding: needed - bits.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(s: Scheme) -> SchemeParams {
        derive_params(&SchemeConfig::new(s)).unwrap()
    }

    #[test]
    fn normalization_table() {
        let p = params(Scheme::Mssk);
        assert_eq!((p.t_s, p.emission, p.bits_per_symbol), (0.75, 450.0, 3));
        let p = params(Scheme::Qmssk);
        assert_eq!((p.t_s, p.emission, p.bits_per_symbol), (1.5, 450.0, 6));
        let p = params(Scheme::Msm);
        assert_eq!((p.t_s, p.emission, p.bits_per_symbol), (1.0, 600.0, 4));
        let p = params(Scheme::SmuxBcsk);
        assert_eq!((p.t_s, p.emission, p.bits_per_symbol), (2.0, 300.0, 8));
        let p = params(Scheme::RcBcsk);
        assert_eq!((p.t_s, p.emission, p.bits_per_symbol), (0.25, 37.5, 1));
        let p = params(Scheme::SisoDmosk);
        assert_eq!((p.t_s, p.emission, p.bits_per_symbol), (0.5, 300.0, 2));
    }

    #[test]
    fn rate_normalization() {
        for s in Scheme::ALL {
            let p = params(s);
            assert!((p.bits_per_symbol as f64 / p.t_s - 4.0).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn natural_and_gray_labels() {
        let nat = gray_index_map(8, Mapping::Natural).unwrap();
        assert_eq!(nat.label(3), "011");
        let gray = gray_index_map(8, Mapping::Gray).unwrap();
        let labels: Vec<String> = (0..8).map(|i| gray.label(i)).collect();
        assert_eq!(labels, ["000", "001", "011", "010", "110", "111", "101", "100"]);
        assert_eq!(gray.distance(0, 7), 1);
        assert!(gray_index_map(6, Mapping::Gray).is_err());
    }

    #[test]
    fn gray_is_cyclic_single_bit() {
        for n in [2usize, 4, 8, 16, 32] {
            let g = gray_index_map(n, Mapping::Gray).unwrap();
            for i in 0..n {
                assert_eq!(g.distance(i, (i + 1) % n), 1, "n = {n}, i = {i}");
            }
        }
    }

    #[test]
    fn mssk_natural_010_activates_antenna_3() {
        let m = modulate(&SchemeConfig::new(Scheme::Mssk), &[0, 1, 0], 1).unwrap();
        assert_eq!(m.schedule.interval(0), &[Emission::new(2, Molecule::A, 450)]);
    }

    #[test]
    fn rc_splits_budget_with_exact_total() {
        let m = modulate(&SchemeConfig::new(Scheme::RcBcsk), &[1], 1).unwrap();
        let counts: Vec<u64> = m.schedule.interval(0).iter().map(|e| e.count).collect();
        assert_eq!(counts.len(), 8);
        assert!(counts.iter().all(|c| *c == 37 || *c == 38));
        assert_eq!(counts.iter().sum::<u64>(), 300);
    }

    #[test]
    fn msm_gray_leading_one_selects_type_b() {
        let cfg = SchemeConfig::new(Scheme::Msm).with_mapping(Mapping::Gray);
        let m = modulate(&cfg, &[1, 0, 1, 0], 1).unwrap();
        assert_eq!(m.schedule.interval(0), &[Emission::new(3, Molecule::B, 600)]);
    }

    #[test]
    fn qmssk_one_antenna_per_type() {
        let m = modulate(&SchemeConfig::new(Scheme::Qmssk), &[1, 1, 1, 0, 0, 1], 1).unwrap();
        assert_eq!(
            m.schedule.interval(0),
            &[Emission::new(7, Molecule::A, 450), Emission::new(1, Molecule::B, 450)]
        );
    }

    #[test]
    fn padding_and_bad_bits() {
        let m = modulate(&SchemeConfig::new(Scheme::Mssk), &[1, 1], 1).unwrap();
        assert_eq!(m.padding, 1);
        assert!(modulate(&SchemeConfig::new(Scheme::Mssk), &[2], 1).is_err());
    }

    #[test]
    fn beta_must_match_scheme() {
        let mut cfg = SchemeConfig::new(Scheme::Msm);
        cfg.beta = 3;
        assert!(matches!(derive_params(&cfg), Err(Error::Unsupported(_))));
    }

    #[test]
    fn energy_per_bit_is_half_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for s in Scheme::ALL {
            let cfg = SchemeConfig::new(s);
            let per = derive_params(&cfg).unwrap().bits_per_symbol;
            let n_sym = 100_000 / per;
            let bits: Vec<u8> = (0..n_sym * per).map(|_| rng.random_range(0..2u8)).collect();
            let m = modulate(&cfg, &bits, n_sym).unwrap();
            let per_bit = m.schedule.total_molecules() as f64 / bits.len() as f64;
            assert!((per_bit / 150.0 - 1.0).abs() < 0.015, "{s}: {per_bit}");
        }
    }

    proptest! {
        #[test]
        fn index_map_round_trip(log_n in 1u32..8, raw in any::<u32>(), gray in any::<bool>()) {
            let n = 1usize << log_n;
            let map = IndexMap::new(n, if gray { Mapping::Gray } else { Mapping::Natural }).unwrap();
            let idx = raw as usize % n;
            prop_assert_eq!(map.index(map.codeword(idx)), idx);
        }

        #[test]
        fn index_schemes_demap_noiselessly(seed in any::<u64>(), gray in any::<bool>()) {
            let mapping = if gray { Mapping::Gray } else { Mapping::Natural };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for scheme in [Scheme::Mssk, Scheme::Qmssk, Scheme::Msm] {
                let cfg = SchemeConfig::new(scheme).with_mapping(mapping);
                let per = derive_params(&cfg).unwrap().bits_per_symbol;
                let bits: Vec<u8> = (0..per).map(|_| rng.random_range(0..2u8)).collect();
                let m = modulate(&cfg, &bits, 1).unwrap();
                let map = cfg.index_map().unwrap();
                let ems = m.schedule.interval(0);
                let recovered: Vec<u8> = match scheme {
                    Scheme::Mssk => map.codeword_bits(ems[0].tx),
                    Scheme::Qmssk => [map.codeword_bits(ems[0].tx), map.codeword_bits(ems[1].tx)].concat(),
                    _ => {
                        let lead = u8::from(ems[0].molecule == Molecule::B);
                        [vec![lead], map.codeword_bits(ems[0].tx)].concat()
                    }
                };
                prop_assert_eq!(recovered, bits);
            }
        }
    }
}
