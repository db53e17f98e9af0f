//! Antenna arrangement of the transmitter and receiver blocks.
//!
//! The link axis is `+x`. The origin sits on the array axis halfway between
//! the transmitter block surface and the receiver block surface, so drift
//! along `+x` points from transmitter to receiver. In a uniform circular
//! array antenna 1 lies on `+y` and the index grows counter-clockwise from
//! `+y` towards `+z`.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// A point or displacement in micrometers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// How the antennas were placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// Paired uniform circular arrays; rotating every index by one maps the
    /// arrangement onto itself.
    Uca,
    /// Arbitrary coordinates.
    Custom,
}

/// Transmit point sources and spherical absorbing receive antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub tx_points: Vec<Vec3>,
    pub rx_centers: Vec<Vec3>,
    /// Receive antenna radius.
    pub r_r: f64,
    /// Closest distance from a transmit point to its paired sphere surface.
    pub d_x: f64,
    /// Closest distance from a sphere's projection to the array axis.
    pub d_yz: f64,
    pub layout: Layout,
}

/// Pairwise clearance between neighbouring spheres must exceed this many µm.
const CONTACT_EPS: f64 = 1e-9;

impl Topology {
    /// Paired uniform circular arrays with `n_tx == n_rx` antennas.
    pub fn uca(n_tx: usize, n_rx: usize, r_r: f64, d_x: f64, d_yz: f64) -> Result<Self> {
        if n_tx != n_rx {
            return Err(Error::Unsupported(format!(
                "uniform circular arrays pair antennas one to one, got n_tx = {n_tx}, n_rx = {n_rx}"
            )));
        }
        if n_tx == 0 {
            return Err(Error::Geometry("at least one antenna is required".into()));
        }
        if !(r_r > 0.0 && d_x > 0.0 && d_yz >= 0.0) || !(r_r.is_finite() && d_x.is_finite() && d_yz.is_finite()) {
            return Err(Error::Geometry(format!(
                "lengths must be positive and finite (r_r = {r_r}, d_x = {d_x}, d_yz = {d_yz})"
            )));
        }

        let tx_x = -(d_x + 2.0 * r_r) / 2.0;
        let rx_x = tx_x + d_x + r_r;
        // A single antenna degenerates onto the axis.
        let radius = if n_tx == 1 { 0.0 } else { d_yz + r_r };
        let step = 2.0 * PI / n_tx as f64;

        let mut tx_points = Vec::with_capacity(n_tx);
        let mut rx_centers = Vec::with_capacity(n_rx);
        for i in 0..n_tx {
            let theta = step * i as f64;
            let (y, z) = (radius * theta.cos(), radius * theta.sin());
            tx_points.push(Vec3::new(tx_x, y, z));
            rx_centers.push(Vec3::new(rx_x, y, z));
        }

        let topo = Self { tx_points, rx_centers, r_r, d_x, d_yz, layout: Layout::Uca };
        topo.validate()?;
        Ok(topo)
    }

    /// Arbitrary placement. `d_x` and `d_yz` are derived from the coordinates.
    pub fn custom(tx_points: Vec<Vec3>, rx_centers: Vec<Vec3>, r_r: f64) -> Result<Self> {
        if tx_points.is_empty() || rx_centers.is_empty() {
            return Err(Error::Geometry("at least one antenna on each side is required".into()));
        }
        if !(r_r > 0.0 && r_r.is_finite()) {
            return Err(Error::Geometry(format!("receiver radius must be positive, got {r_r}")));
        }
        if tx_points.iter().chain(&rx_centers).any(|p| !p.is_finite()) {
            return Err(Error::Geometry("non-finite coordinate".into()));
        }
        let d_x = tx_points
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let c = rx_centers.get(i).copied().unwrap_or_else(|| nearest(&rx_centers, t));
                t.distance(c) - r_r
            })
            .fold(f64::INFINITY, f64::min);
        let d_yz = rx_centers
            .iter()
            .map(|c| (c.y * c.y + c.z * c.z).sqrt() - r_r)
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        let topo = Self { tx_points, rx_centers, r_r, d_x, d_yz, layout: Layout::Custom };
        topo.validate()?;
        Ok(topo)
    }

    pub fn n_tx(&self) -> usize {
        self.tx_points.len()
    }

    pub fn n_rx(&self) -> usize {
        self.rx_centers.len()
    }

    /// `x` coordinate of the receiver block surface the spheres rest on.
    pub fn rx_block_x(&self) -> f64 {
        self.rx_centers.iter().map(|c| c.x).fold(f64::NEG_INFINITY, f64::max) + self.r_r
    }

    /// Whether `h[i][j] == h[0][(j - i) mod n]` follows from the placement.
    pub fn is_shift_symmetric(&self) -> bool {
        self.layout == Layout::Uca
    }

    fn validate(&self) -> Result<()> {
        let r = self.r_r;
        for (a, ca) in self.rx_centers.iter().enumerate() {
            for (b, cb) in self.rx_centers.iter().enumerate().skip(a + 1) {
                let d = ca.distance(*cb);
                if d <= 2.0 * r + CONTACT_EPS {
                    return Err(Error::Geometry(format!(
                        "receiver spheres {} and {} overlap (center distance {d:.4} µm, need > {:.4} µm)",
                        a + 1,
                        b + 1,
                        2.0 * r
                    )));
                }
            }
        }
        for (i, t) in self.tx_points.iter().enumerate() {
            for (j, c) in self.rx_centers.iter().enumerate() {
                if t.distance(*c) <= r {
                    return Err(Error::Geometry(format!(
                        "transmit point {} lies inside receiver sphere {}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Plain-text `key = value` block, one line per field. Stable across runs
    /// so it can be embedded in cache headers and compared verbatim.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let layout = match self.layout {
            Layout::Uca => "uca",
            Layout::Custom => "custom",
        };
        let _ = writeln!(out, "layout = {layout}");
        let _ = writeln!(out, "n_tx = {}", self.n_tx());
        let _ = writeln!(out, "n_rx = {}", self.n_rx());
        let _ = writeln!(out, "r_r = {}", self.r_r);
        let _ = writeln!(out, "d_x = {}", self.d_x);
        let _ = writeln!(out, "d_yz = {}", self.d_yz);
        for (i, p) in self.tx_points.iter().enumerate() {
            let _ = writeln!(out, "tx.{} = {} {} {}", i + 1, p.x, p.y, p.z);
        }
        for (j, p) in self.rx_centers.iter().enumerate() {
            let _ = writeln!(out, "rx.{} = {} {} {}", j + 1, p.x, p.y, p.z);
        }
        out
    }
}

fn nearest(points: &[Vec3], from: Vec3) -> Vec3 {
    points
        .iter()
        .copied()
        .min_by(|a, b| a.distance(from).total_cmp(&b.distance(from)))
        .expect("non-empty")
}
