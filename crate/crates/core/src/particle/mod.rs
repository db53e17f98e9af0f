//! Brownian-motion particle simulation: channel response generation and the
//! particle-level MSSK error-rate trial.

mod ber;
mod cir;
mod walk;

pub use ber::particle_ber;
pub use cir::{ChannelResponse, CirMeta};
pub use walk::{resolve_collision, step, Collision, Fate, Obstacles, SphereMode};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Topology, Vec3};

/// Molecules per RNG stream. Fixed so results do not depend on thread count.
pub(crate) const CHUNK: u64 = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionParams {
    /// Diffusion coefficient, µm²/s.
    pub diffusion: f64,
    /// Time step, s.
    pub dt: f64,
    /// Uniform flow, µm/s.
    pub drift: Vec3,
    /// Molecules released per channel response run.
    pub n_molecules: u64,
    /// Treat the receiver block surface behind the spheres as a reflecting plane.
    pub reflective_block: bool,
    /// Merge unit steps while a molecule is far from every surface.
    pub far_field_leap: bool,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        Self {
            diffusion: 79.4,
            dt: 1e-4,
            drift: Vec3::ZERO,
            n_molecules: 1_000_000,
            reflective_block: false,
            far_field_leap: true,
        }
    }
}

impl DiffusionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.diffusion > 0.0 && self.diffusion.is_finite()) {
            return Err(Error::Argument(format!("diffusion coefficient must be positive, got {}", self.diffusion)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Argument(format!("time step must be positive, got {}", self.dt)));
        }
        if self.n_molecules == 0 {
            return Err(Error::Argument("at least one molecule is required".into()));
        }
        if !self.drift.is_finite() {
            return Err(Error::Argument("drift must be finite".into()));
        }
        Ok(())
    }

    /// Unit steps per symbol interval of length `t_s`.
    pub(crate) fn steps_per_symbol(&self, t_s: f64) -> Result<u64> {
        let steps = (t_s / self.dt).round();
        if !(steps >= 1.0) || ((steps * self.dt - t_s) / t_s).abs() > 1e-9 {
            return Err(Error::Argument(format!(
                "symbol duration {t_s} s is not a whole number of {} s steps",
                self.dt
            )));
        }
        Ok(steps as u64)
    }
}

/// How rows other than transmit antenna 1 are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowFill {
    /// Simulate antenna 1 and circularly shift (uniform circular arrays only).
    Shift,
    /// Simulate every transmit antenna independently.
    PerAntenna,
}

/// Deterministic stream for `(seed, stream)`.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Monte Carlo channel response: release `params.n_molecules` from each
/// simulated transmit antenna and bin first arrivals into `memory` intervals
/// of width `t_s`. Molecules still free after `memory * t_s` are dropped.
pub fn simulate_cir(
    topology: &Topology,
    params: &DiffusionParams,
    t_s: f64,
    memory: usize,
    seed: u64,
    fill: RowFill,
) -> Result<ChannelResponse> {
    params.validate()?;
    if memory == 0 {
        return Err(Error::Argument("channel memory must be at least 1".into()));
    }
    if fill == RowFill::Shift && (!topology.is_shift_symmetric() || topology.n_tx() != topology.n_rx()) {
        return Err(Error::Unsupported(
            "circular-shift fill needs a uniform circular array; simulate every antenna instead".into(),
        ));
    }
    let sps = params.steps_per_symbol(t_s)?;
    let obstacles = Obstacles::new(topology, params.reflective_block);
    let (n_tx, n_rx) = (topology.n_tx(), topology.n_rx());

    let simulated = if fill == RowFill::Shift { 1 } else { n_tx };
    let mut rows = Vec::with_capacity(simulated);
    let (mut absorbed, mut survived) = (0u64, 0u64);
    for i in 0..simulated {
        let counts = release(&obstacles, topology.tx_points[i], params, sps, memory, seed, i as u64)?;
        let row_absorbed: u64 = counts.iter().sum();
        absorbed += row_absorbed;
        survived += params.n_molecules - row_absorbed;
        rows.push(counts);
    }

    let n = params.n_molecules as f64;
    let mut taps = Vec::with_capacity(n_tx * n_rx * memory);
    for i in 0..n_tx {
        for j in 0..n_rx {
            let (row, col) = match fill {
                RowFill::Shift => (0, (j + n_rx - i) % n_rx),
                RowFill::PerAntenna => (i, j),
            };
            taps.extend(rows[row][col * memory..(col + 1) * memory].iter().map(|&c| c as f64 / n));
        }
    }
    let mut cir = ChannelResponse::from_flat(n_tx, n_rx, memory, t_s, taps)?;
    cir.meta = Some(CirMeta {
        params: params.clone(),
        topology: topology.to_kv(),
        seed,
        emitted: params.n_molecules * simulated as u64,
        absorbed,
        survived,
        shift_filled: fill == RowFill::Shift,
    });
    Ok(cir)
}

/// Arrival counts `[j * memory + n]` for molecules released at `origin`.
fn release(
    obstacles: &Obstacles,
    origin: Vec3,
    params: &DiffusionParams,
    sps: u64,
    memory: usize,
    seed: u64,
    antenna: u64,
) -> Result<Vec<u64>> {
    let n_rx = obstacles.centers().len();
    let max_steps = sps * memory as u64;
    let n_chunks = params.n_molecules.div_ceil(CHUNK);
    let partials: Vec<Result<Vec<u64>>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(seed, (antenna << 40) | chunk);
            let mut counts = vec![0u64; n_rx * memory];
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(params.n_molecules);
            for _ in lo..hi {
                if let Fate::Absorbed { rx, step } =
                    obstacles.walk(origin, params, max_steps, params.far_field_leap, &mut rng)?
                {
                    let bin = ((step - 1) / sps) as usize;
                    counts[rx * memory + bin] += 1;
                }
            }
            Ok(counts)
        })
        .collect();
    let mut total = vec![0u64; n_rx * memory];
    for part in partials {
        for (t, c) in total.iter_mut().zip(part?) {
            *t += c;
        }
    }
    Ok(total)
}
