//! Sweep description and its `key = value` text form.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::channel::ArrivalModel;
use crate::detection::BranchMetric;
use crate::error::{Error, Result};
use crate::geometry::{Topology, Vec3};
use crate::modulation::{Mapping, Scheme};
use crate::particle::DiffusionParams;

use super::link::{Combining, Detector};

/// Parameter varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    MTx,
    TB,
    DYz,
    DriftVx,
}

impl SweepParameter {
    /// Whether changing the parameter changes the physical channel.
    pub fn alters_channel(self) -> bool {
        !matches!(self, SweepParameter::MTx)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::MTx => "m_tx",
            SweepParameter::TB => "t_b",
            SweepParameter::DYz => "d_yz",
            SweepParameter::DriftVx => "drift_vx",
        })
    }
}

impl FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "m_tx" | "mtx" => Ok(SweepParameter::MTx),
            "t_b" | "tb" => Ok(SweepParameter::TB),
            "d_yz" | "dyz" => Ok(SweepParameter::DYz),
            "drift_vx" | "v_x" | "vx" => Ok(SweepParameter::DriftVx),
            _ => Err(Error::Config(format!("unknown sweep parameter {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub detectors: Vec<Detector>,
    pub mappings: Vec<Mapping>,
    pub n_tx: usize,
    /// Receiver radius, µm.
    pub r_r: f64,
    /// µm.
    pub d_x: f64,
    /// µm.
    pub d_yz: f64,
    /// µm²/s.
    pub diffusion: f64,
    /// Walk time step, s.
    pub dt: f64,
    /// Flow towards the receiver, µm/s.
    pub drift_vx: f64,
    /// Channel memory in symbols.
    pub memory: usize,
    pub m_tx: f64,
    /// s.
    pub t_b: f64,
    pub combining: Combining,
    pub arrival_model: ArrivalModel,
    pub metric: BranchMetric,
    /// Bit budget per sweep point.
    pub max_bits: u64,
    /// Early stop once this many bit errors are seen.
    pub target_errors: u64,
    pub calibration_symbols: usize,
    /// Molecules released per channel response.
    pub n_molecules: u64,
    /// Also evaluate the analytical error rate of index schemes over this
    /// many taps.
    pub theory_memory: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            parameter: SweepParameter::MTx,
            values: vec![300.0],
            schemes: vec![Scheme::Mssk],
            detectors: vec![Detector::Mcd],
            mappings: vec![Mapping::Natural, Mapping::Gray],
            n_tx: 8,
            r_r: 5.0,
            d_x: 10.0,
            d_yz: 10.0,
            diffusion: 79.4,
            dt: 1e-4,
            drift_vx: 0.0,
            memory: 30,
            m_tx: 300.0,
            t_b: 0.25,
            combining: Combining::Egc,
            arrival_model: ArrivalModel::Gaussian,
            metric: BranchMetric::Gaussian,
            max_bits: 1_000_000,
            target_errors: 100,
            calibration_symbols: 10_000,
            n_molecules: 100_000,
            theory_memory: None,
            cache_dir: None,
            seed: 1,
        }
    }
}

/// Resolved parameters of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub m_tx: f64,
    pub t_b: f64,
    pub d_yz: f64,
    pub drift_vx: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Config("values must not be empty".into()));
        }
        if self.values.windows(2).any(|w| !(w[1] > w[0])) || self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("values must be finite and strictly increasing".into()));
        }
        for (name, list_empty) in [
            ("schemes", self.schemes.is_empty()),
            ("detectors", self.detectors.is_empty()),
            ("mappings", self.mappings.is_empty()),
        ] {
            if list_empty {
                return Err(Error::Config(format!("{name} must not be empty")));
            }
        }
        if self.memory == 0 {
            return Err(Error::Config("memory must be at least 1".into()));
        }
        if self.max_bits == 0 {
            return Err(Error::Config("max_bits must be positive".into()));
        }
        if self.theory_memory == Some(0) {
            return Err(Error::Config("theory_memory must be at least 1".into()));
        }
        for v in &self.values {
            let p = self.point(*v);
            self.topology(&p).map_err(|e| Error::Config(e.to_string()))?;
            self.diffusion_params(&p).validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn point(&self, value: f64) -> PointParams {
        let mut p = PointParams { m_tx: self.m_tx, t_b: self.t_b, d_yz: self.d_yz, drift_vx: self.drift_vx };
        match self.parameter {
            SweepParameter::MTx => p.m_tx = value,
            SweepParameter::TB => p.t_b = value,
            SweepParameter::DYz => p.d_yz = value,
            SweepParameter::DriftVx => p.drift_vx = value,
        }
        p
    }

    pub fn topology(&self, p: &PointParams) -> Result<Topology> {
        Topology::uca(self.n_tx, self.n_tx, self.r_r, self.d_x, p.d_yz)
    }

    pub fn diffusion_params(&self, p: &PointParams) -> DiffusionParams {
        DiffusionParams {
            diffusion: self.diffusion,
            dt: self.dt,
            drift: Vec3::new(p.drift_vx, 0.0, 0.0),
            n_molecules: self.n_molecules,
            ..DiffusionParams::default()
        }
    }

    /// Parse `key = value` lines; `#` starts a comment. Unset keys keep their
    /// defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = SweepSpec::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            spec.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(msg) => Error::Config(format!("line {}: {msg}", lineno + 1)),
                other => other,
            })?;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Override one field by its key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
        }
        fn list<T: FromStr<Err = Error>>(v: &str) -> Result<Vec<T>> {
            v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
        }
        match key {
            "parameter" => self.parameter = value.parse()?,
            "values" => {
                self.values = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| num(key, s))
                    .collect::<Result<_>>()?
            }
            "schemes" => self.schemes = list(value)?,
            "detectors" => self.detectors = list(value)?,
            "mappings" => self.mappings = list(value)?,
            "n_tx" => self.n_tx = num(key, value)?,
            "r_r" => self.r_r = num(key, value)?,
            "d_x" => self.d_x = num(key, value)?,
            "d_yz" => self.d_yz = num(key, value)?,
            "diffusion" => self.diffusion = num(key, value)?,
            "dt" => self.dt = num(key, value)?,
            "drift_vx" => self.drift_vx = num(key, value)?,
            "memory" => self.memory = num(key, value)?,
            "m_tx" => self.m_tx = num(key, value)?,
            "t_b" => self.t_b = num(key, value)?,
            "combining" => self.combining = value.parse()?,
            "arrival_model" => self.arrival_model = value.parse()?,
            "metric" => {
                self.metric = match value.to_ascii_lowercase().as_str() {
                    "gaussian" | "squared" => BranchMetric::Gaussian,
                    "unsquared" => BranchMetric::Unsquared,
                    _ => return Err(Error::Config(format!("unknown metric {value:?}"))),
                }
            }
            "max_bits" => self.max_bits = num::<f64>(key, value)? as u64,
            "target_errors" => self.target_errors = num(key, value)?,
            "calibration_symbols" => self.calibration_symbols = num(key, value)?,
            "n_molecules" => self.n_molecules = num::<f64>(key, value)? as u64,
            "theory_memory" => {
                self.theory_memory = match value {
                    "" | "none" | "off" => None,
                    v => Some(num(key, v)?),
                }
            }
            "cache_dir" => self.cache_dir = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
            "seed" => self.seed = num(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}
