//! Single-molecule Brownian motion with absorbing and reflecting obstacles.

use rand::Rng;
use rand_distr::StandardNormal;

use super::DiffusionParams;
use crate::error::{Error, Result};
use crate::geometry::{Topology, Vec3};

/// How a receive sphere treats the molecule type being walked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereMode {
    Absorbing,
    Reflecting,
}

/// Result of checking one proposed move against the obstacles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Collision {
    Moved(Vec3),
    /// Absorbed by the receive sphere with this zero-based index.
    Absorbed(usize),
}

/// Where a walked molecule ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fate {
    /// Absorbed by sphere `rx` at the end of unit step `step` (one-based).
    Absorbed { rx: usize, step: u64 },
    /// Still diffusing when the step budget ran out.
    Survived,
}

const MAX_REFLECTIONS: usize = 16;

/// Reflections map a point this far outside a surface.
const SURFACE_EPS: f64 = 1e-12;

/// Multiple of the per-axis standard deviation a leap keeps clear of every
/// obstacle. Missing an obstacle during a leap has probability below
/// `12 Q(LEAP_SIGMAS)`, about 1.2e-8 for 6.
const LEAP_SIGMAS: f64 = 6.0;

/// Receive spheres and the optional reflecting receiver-block plane.
#[derive(Debug, Clone)]
pub struct Obstacles {
    centers: Vec<Vec3>,
    radius: f64,
    radius_sq: f64,
    modes: Vec<SphereMode>,
    /// Molecules cannot pass `x > block_x` when set.
    block_x: Option<f64>,
}

impl Obstacles {
    /// All spheres absorbing; the receiver block plane reflects when
    /// `reflective_block` is set.
    pub fn new(topology: &Topology, reflective_block: bool) -> Self {
        Self {
            centers: topology.rx_centers.clone(),
            radius: topology.r_r,
            radius_sq: topology.r_r * topology.r_r,
            modes: vec![SphereMode::Absorbing; topology.n_rx()],
            block_x: reflective_block.then(|| topology.rx_block_x()),
        }
    }

    pub fn with_modes(mut self, modes: Vec<SphereMode>) -> Result<Self> {
        if modes.len() != self.centers.len() {
            return Err(Error::Argument(format!(
                "{} sphere modes for {} spheres",
                modes.len(),
                self.centers.len()
            )));
        }
        self.modes = modes;
        Ok(self)
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    /// Distance from `p` to the nearest obstacle surface (negative inside).
    pub fn clearance(&self, p: Vec3) -> f64 {
        let mut best = f64::INFINITY;
        for c in &self.centers {
            let d2 = (p - *c).norm_sq();
            if d2 < best {
                best = d2;
            }
        }
        let mut clearance = best.sqrt() - self.radius;
        if let Some(bx) = self.block_x {
            clearance = clearance.min(bx - p.x);
        }
        clearance
    }

    fn inside(&self, j: usize, p: Vec3) -> bool {
        (p - self.centers[j]).norm_sq() < self.radius_sq
    }

    /// First parameter `t` in `[0, 1]` at which `prev + t (next - prev)`
    /// enters sphere `j`, if the segment enters it at all.
    fn entry_param(&self, j: usize, prev: Vec3, next: Vec3) -> Option<f64> {
        let d = next - prev;
        let f = prev - self.centers[j];
        let a = d.norm_sq();
        if a == 0.0 {
            return (f.norm_sq() < self.radius_sq).then_some(0.0);
        }
        let b = 2.0 * f.dot(d);
        let c = f.norm_sq() - self.radius_sq;
        if c < 0.0 {
            return Some(0.0);
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let t = (-b - disc.sqrt()) / (2.0 * a);
        (0.0..=1.0).contains(&t).then_some(t)
    }

    /// Reflect `next` out of reflecting spheres and the block plane, then test
    /// the corrected endpoint against the absorbing spheres.
    ///
    /// `prev` must lie outside every sphere.
    pub fn resolve(&self, prev: Vec3, next: Vec3) -> Result<Collision> {
        let mut p = next;
        let mut corrected = false;
        for _ in 0..MAX_REFLECTIONS {
            let mut hit = false;
            if let Some(bx) = self.block_x {
                if p.x > bx {
                    p.x = 2.0 * bx - p.x - SURFACE_EPS;
                    hit = true;
                }
            }
            for (j, mode) in self.modes.iter().enumerate() {
                if *mode == SphereMode::Reflecting && self.inside(j, p) {
                    p = self.mirror(j, prev, p);
                    hit = true;
                }
            }
            if !hit {
                corrected = true;
                break;
            }
        }
        if !corrected {
            return Err(Error::Step(format!(
                "position ({:.6}, {:.6}, {:.6}) still inside an obstacle after {MAX_REFLECTIONS} reflections",
                p.x, p.y, p.z
            )));
        }

        let mut absorbed: Option<(usize, f64)> = None;
        for (j, mode) in self.modes.iter().enumerate() {
            if *mode == SphereMode::Absorbing && self.inside(j, p) {
                absorbed = Some((j, self.entry_param(j, prev, p).unwrap_or(1.0)));
                break;
            }
        }
        let Some((mut winner, mut t_best)) = absorbed else {
            return Ok(Collision::Moved(p));
        };
        // A long step may graze another absorbing sphere before ending in this one.
        for (j, mode) in self.modes.iter().enumerate() {
            if j == winner || *mode != SphereMode::Absorbing {
                continue;
            }
            if let Some(t) = self.entry_param(j, prev, p) {
                if t < t_best {
                    winner = j;
                    t_best = t;
                }
            }
        }
        Ok(Collision::Absorbed(winner))
    }

    /// Mirror the penetration depth back across the surface along the radius.
    fn mirror(&self, j: usize, prev: Vec3, p: Vec3) -> Vec3 {
        let c = self.centers[j];
        let mut v = p - c;
        let mut d = v.norm();
        if d == 0.0 {
            v = prev - c;
            d = v.norm();
        }
        let target = 2.0 * self.radius - d + SURFACE_EPS;
        c + v * (target / d)
    }

    /// Walk from `start` for at most `max_steps` unit steps.
    ///
    /// With `leap` set, a molecule far from every obstacle advances several
    /// unit steps at once: the sum of `k` Gaussian increments is itself one
    /// Gaussian draw, and `k` is chosen so the path stays clear of every
    /// surface with overwhelming probability.
    pub fn walk<R: Rng + ?Sized>(
        &self,
        start: Vec3,
        params: &DiffusionParams,
        max_steps: u64,
        leap: bool,
        rng: &mut R,
    ) -> Result<Fate> {
        let mut pos = start;
        let mut taken = 0u64;
        let drift_speed = params.drift.norm();
        let b = LEAP_SIGMAS * (3.0 * 2.0 * params.diffusion).sqrt();
        while taken < max_steps {
            if leap {
                let k = leap_steps(self.clearance(pos), drift_speed, b, params.dt).min(max_steps - taken);
                if k >= 2 {
                    pos = step_for(pos, params, k as f64 * params.dt, rng);
                    taken += k;
                    continue;
                }
            }
            let next = step(pos, params, rng);
            taken += 1;
            match self.resolve(pos, next)? {
                Collision::Moved(p) => pos = p,
                Collision::Absorbed(rx) => return Ok(Fate::Absorbed { rx, step: taken }),
            }
        }
        Ok(Fate::Survived)
    }
}

/// Largest whole number of unit steps whose combined displacement stays
/// inside `clearance` with the configured safety margin.
fn leap_steps(clearance: f64, drift_speed: f64, b: f64, dt: f64) -> u64 {
    if clearance <= 0.0 || b == 0.0 {
        return 0;
    }
    // Solve drift * T + b * sqrt(T) = clearance for sqrt(T).
    let u = if drift_speed > 0.0 {
        (-b + (b * b + 4.0 * drift_speed * clearance).sqrt()) / (2.0 * drift_speed)
    } else {
        clearance / b
    };
    let k = (u * u / dt).floor();
    if k >= u64::MAX as f64 {
        u64::MAX
    } else {
        k as u64
    }
}

/// One Brownian step of length `params.dt`.
pub fn step<R: Rng + ?Sized>(position: Vec3, params: &DiffusionParams, rng: &mut R) -> Vec3 {
    step_for(position, params, params.dt, rng)
}

fn step_for<R: Rng + ?Sized>(position: Vec3, params: &DiffusionParams, duration: f64, rng: &mut R) -> Vec3 {
    let sigma = (2.0 * params.diffusion * duration).sqrt();
    let dx: f64 = rng.sample(StandardNormal);
    let dy: f64 = rng.sample(StandardNormal);
    let dz: f64 = rng.sample(StandardNormal);
    Vec3::new(
        position.x + params.drift.x * duration + sigma * dx,
        position.y + params.drift.y * duration + sigma * dy,
        position.z + params.drift.z * duration + sigma * dz,
    )
}

/// Check a proposed move from `prev` to `next` against the topology with all
/// spheres absorbing and no reflecting block.
pub fn resolve_collision(prev: Vec3, next: Vec3, topology: &Topology) -> Result<Collision> {
    Obstacles::new(topology, false).resolve(prev, next)
}
