//! Channel response tensor and its plain-text cache representation.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::DiffusionParams;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

/// How a response was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct CirMeta {
    pub params: DiffusionParams,
    /// `Topology::to_kv` of the simulated arrangement.
    pub topology: String,
    pub seed: u64,
    /// Molecules released per transmit antenna.
    pub emitted: u64,
    /// Absorbed within `L t_s`, summed over simulated antennas.
    pub absorbed: u64,
    /// Still diffusing after `L t_s`, summed over simulated antennas.
    pub survived: u64,
    /// `true` when rows beyond the first were filled by circular shift.
    pub shift_filled: bool,
}

/// Tap probabilities `h[i][j][n]`: a molecule released by transmit antenna `i`
/// is absorbed by receive antenna `j` during the `n`-th symbol interval after
/// release. Indices are zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelResponse {
    n_tx: usize,
    n_rx: usize,
    memory: usize,
    t_s: f64,
    taps: Vec<f64>,
    pub meta: Option<CirMeta>,
}

impl ChannelResponse {
    /// Build from nested `h[i][j][n]` values.
    pub fn from_taps(h: Vec<Vec<Vec<f64>>>, t_s: f64) -> Result<Self> {
        let n_tx = h.len();
        let n_rx = h.first().map_or(0, Vec::len);
        let memory = h.first().and_then(|r| r.first()).map_or(0, Vec::len);
        if n_tx == 0 || n_rx == 0 || memory == 0 {
            return Err(Error::Data("channel response must be non-empty".into()));
        }
        let mut taps = Vec::with_capacity(n_tx * n_rx * memory);
        for row in &h {
            if row.len() != n_rx {
                return Err(Error::Data("ragged receiver dimension".into()));
            }
            for col in row {
                if col.len() != memory {
                    return Err(Error::Data("ragged tap dimension".into()));
                }
                taps.extend_from_slice(col);
            }
        }
        Self::from_flat(n_tx, n_rx, memory, t_s, taps)
    }

    /// Build from a flat `(i, j, n)` row-major vector.
    pub fn from_flat(n_tx: usize, n_rx: usize, memory: usize, t_s: f64, taps: Vec<f64>) -> Result<Self> {
        if taps.len() != n_tx * n_rx * memory || taps.is_empty() {
            return Err(Error::Data(format!(
                "expected {} taps for {n_tx}x{n_rx}x{memory}, got {}",
                n_tx * n_rx * memory,
                taps.len()
            )));
        }
        if let Some(bad) = taps.iter().find(|h| !(0.0..=1.0).contains(*h)) {
            return Err(Error::Data(format!("tap {bad} outside [0, 1]")));
        }
        Ok(Self { n_tx, n_rx, memory, t_s, taps, meta: None })
    }

    /// `h[i][j][n]` for every `i` taken from `row[j][n]` circularly shifted by `i`.
    pub fn circulant(row: &[Vec<f64>], t_s: f64) -> Result<Self> {
        let n = row.len();
        let h = (0..n)
            .map(|i| (0..n).map(|j| row[(j + n - i) % n].clone()).collect())
            .collect();
        Self::from_taps(h, t_s)
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    /// Channel memory `L` in symbol intervals.
    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn t_s(&self) -> f64 {
        self.t_s
    }

    /// `h[i][j][n]`, zero-based; `n = 0` is the interval of release.
    #[inline]
    pub fn h(&self, i: usize, j: usize, n: usize) -> f64 {
        self.taps[(i * self.n_rx + j) * self.memory + n]
    }

    /// All taps of subchannel `i -> j`.
    #[inline]
    pub fn subchannel(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.n_rx + j) * self.memory;
        &self.taps[start..start + self.memory]
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Keep only the first `memory` taps.
    pub fn truncated(&self, memory: usize) -> Result<Self> {
        if memory == 0 || memory > self.memory {
            return Err(Error::Argument(format!(
                "cannot truncate memory {} to {memory}",
                self.memory
            )));
        }
        let mut taps = Vec::with_capacity(self.n_tx * self.n_rx * memory);
        for i in 0..self.n_tx {
            for j in 0..self.n_rx {
                taps.extend_from_slice(&self.subchannel(i, j)[..memory]);
            }
        }
        Ok(Self { taps, memory, ..self.clone() })
    }

    /// Whether every row is the first row circularly shifted (bit-exact).
    pub fn is_circulant(&self) -> bool {
        if self.n_tx != self.n_rx {
            return false;
        }
        let n = self.n_rx;
        (0..n).all(|i| (0..n).all(|j| self.subchannel(i, j) == self.subchannel(0, (j + n - i) % n)))
    }

    /// Total absorption probability of transmit antenna `i` within the memory.
    pub fn row_mass(&self, i: usize) -> f64 {
        (0..self.n_rx).map(|j| self.subchannel(i, j).iter().sum::<f64>()).sum()
    }

    /// Plain-text cache form: `key = value` header lines, a `checksum` line
    /// covering everything else, a blank line, then one line of `L` taps per
    /// `(i, j)` pair in row-major order.
    pub fn to_text(&self) -> String {
        let header = self.header();
        let body = self.body();
        let sum = checksum(&header, &body);
        format!("{header}checksum = {sum}\n\n{body}")
    }

    fn header(&self) -> String {
        let mut h = String::new();
        let _ = writeln!(h, "format = mcvd-cir-1");
        let _ = writeln!(h, "n_tx = {}", self.n_tx);
        let _ = writeln!(h, "n_rx = {}", self.n_rx);
        let _ = writeln!(h, "L = {}", self.memory);
        let _ = writeln!(h, "t_s = {}", self.t_s);
        if let Some(m) = &self.meta {
            let p = &m.params;
            let _ = writeln!(h, "D = {}", p.diffusion);
            let _ = writeln!(h, "dt = {}", p.dt);
            let _ = writeln!(h, "drift = {} {} {}", p.drift.x, p.drift.y, p.drift.z);
            let _ = writeln!(h, "n_molecules = {}", p.n_molecules);
            let _ = writeln!(h, "reflective_block = {}", p.reflective_block);
            let _ = writeln!(h, "far_field_leap = {}", p.far_field_leap);
            let _ = writeln!(h, "seed = {}", m.seed);
            let _ = writeln!(h, "emitted = {}", m.emitted);
            let _ = writeln!(h, "absorbed = {}", m.absorbed);
            let _ = writeln!(h, "survived = {}", m.survived);
            let _ = writeln!(h, "shift_filled = {}", m.shift_filled);
            for line in m.topology.lines() {
                let _ = writeln!(h, "topology.{line}");
            }
        }
        h
    }

    fn body(&self) -> String {
        let mut b = String::new();
        for chunk in self.taps.chunks(self.memory) {
            let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            b.push_str(&line.join(" "));
            b.push('\n');
        }
        b
    }

    /// Parse [`ChannelResponse::to_text`] output. A present checksum must match.
    pub fn from_text(text: &str) -> Result<Self> {
        let (head, body) = text
            .split_once("\n\n")
            .ok_or_else(|| Error::Parse("missing blank line between header and taps".into()))?;
        let mut fields = Vec::new();
        let mut stored_sum = None;
        let mut header = String::new();
        for line in head.lines() {
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| Error::Parse(format!("malformed header line {line:?}")))?;
            if k == "checksum" {
                stored_sum = Some(v.to_string());
            } else {
                header.push_str(line);
                header.push('\n');
                fields.push((k, v));
            }
        }
        if let Some(sum) = stored_sum {
            if sum != checksum(&header, body) {
                return Err(Error::Checksum("channel response".into()));
            }
        }
        let get = |key: &str| -> Result<&str> {
            fields
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Parse(format!("missing header key {key}")))
        };
        let n_tx: usize = parse(get("n_tx")?)?;
        let n_rx: usize = parse(get("n_rx")?)?;
        let memory: usize = parse(get("L")?)?;
        let t_s: f64 = parse(get("t_s")?)?;
        let taps = body.split_whitespace().map(parse::<f64>).collect::<Result<Vec<_>>>()?;
        let mut cir = Self::from_flat(n_tx, n_rx, memory, t_s, taps)?;

        if fields.iter().any(|(k, _)| *k == "seed") {
            let drift: Vec<f64> = get("drift")?.split_whitespace().map(parse).collect::<Result<_>>()?;
            if drift.len() != 3 {
                return Err(Error::Parse("drift needs three components".into()));
            }
            let topology: String = fields
                .iter()
                .filter_map(|(k, v)| k.strip_prefix("topology.").map(|k| format!("{k} = {v}\n")))
                .collect();
            cir.meta = Some(CirMeta {
                params: DiffusionParams {
                    diffusion: parse(get("D")?)?,
                    dt: parse(get("dt")?)?,
                    drift: Vec3::new(drift[0], drift[1], drift[2]),
                    n_molecules: parse(get("n_molecules")?)?,
                    reflective_block: parse(get("reflective_block")?)?,
                    far_field_leap: parse(get("far_field_leap")?)?,
                },
                topology,
                seed: parse(get("seed")?)?,
                emitted: parse(get("emitted")?)?,
                absorbed: parse(get("absorbed")?)?,
                survived: parse(get("survived")?)?,
                shift_filled: parse(get("shift_filled")?)?,
            });
        }
        Ok(cir)
    }
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("cannot parse {s:?}")))
}

fn checksum(header: &str, body: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(header.as_bytes());
    hasher.update(b"\n");
    hasher.update(body.as_bytes());
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
