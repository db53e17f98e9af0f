//! On-disk cache of simulated channel responses.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::particle::{simulate_cir, ChannelResponse, DiffusionParams, RowFill};

/// Everything that determines a simulated channel response.
#[derive(Debug, Clone, PartialEq)]
pub struct CirRequest {
    pub topology: Topology,
    pub params: DiffusionParams,
    pub t_s: f64,
    pub memory: usize,
    pub seed: u64,
    pub fill: RowFill,
}

impl CirRequest {
    /// Canonical text of the generation inputs.
    pub fn fingerprint(&self) -> String {
        fingerprint(
            &self.topology.to_kv(),
            &self.params,
            self.t_s,
            self.memory,
            self.seed,
            self.fill == RowFill::Shift,
        )
    }

    pub fn generate(&self) -> Result<ChannelResponse> {
        simulate_cir(&self.topology, &self.params, self.t_s, self.memory, self.seed, self.fill)
    }
}

fn fingerprint(topology: &str, p: &DiffusionParams, t_s: f64, memory: usize, seed: u64, shift: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "t_s = {t_s}");
    let _ = writeln!(s, "L = {memory}");
    let _ = writeln!(s, "seed = {seed}");
    let _ = writeln!(s, "shift_filled = {shift}");
    let _ = writeln!(s, "D = {}", p.diffusion);
    let _ = writeln!(s, "dt = {}", p.dt);
    let _ = writeln!(s, "drift = {} {} {}", p.drift.x, p.drift.y, p.drift.z);
    let _ = writeln!(s, "n_molecules = {}", p.n_molecules);
    let _ = writeln!(s, "reflective_block = {}", p.reflective_block);
    let _ = writeln!(s, "far_field_leap = {}", p.far_field_leap);
    s.push_str(topology);
    s
}

fn stored_fingerprint(cir: &ChannelResponse) -> Option<String> {
    let m = cir.meta.as_ref()?;
    Some(fingerprint(&m.topology, &m.params, cir.t_s(), cir.memory(), m.seed, m.shift_filled))
}

/// What [`CirCache::get_or_generate`] had to do.
#[derive(Debug, Clone, PartialEq)]
pub enum CacheOutcome {
    Hit,
    Generated,
    /// The cached file was unreadable or corrupt and was replaced.
    Regenerated(String),
}

#[derive(Debug, Clone)]
pub struct CirCache {
    dir: PathBuf,
}

impl CirCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, request: &CirRequest) -> PathBuf {
        let digest = Sha256::digest(request.fingerprint().as_bytes());
        let name: String = digest[..12].iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{name}.cir"))
    }

    /// Cached response for `request`, `None` on a miss. A file whose checksum
    /// does not match its contents is an error.
    pub fn lookup(&self, request: &CirRequest) -> Result<Option<ChannelResponse>> {
        let path = self.path_for(request);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let cir = ChannelResponse::from_text(&text).map_err(|e| match e {
            Error::Checksum(_) => Error::Checksum(path.display().to_string()),
            other => other,
        })?;
        if stored_fingerprint(&cir).as_deref() != Some(request.fingerprint().as_str()) {
            return Ok(None);
        }
        Ok(Some(cir))
    }

    /// Write atomically: a temporary file in the cache directory is renamed
    /// over the final name.
    pub fn store(&self, request: &CirRequest, cir: &ChannelResponse) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(request);
        let tmp = path.with_extension(format!("cir.tmp{}", std::process::id()));
        fs::write(&tmp, cir.to_text())?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn get_or_generate(&self, request: &CirRequest) -> Result<(ChannelResponse, CacheOutcome)> {
        let outcome = match self.lookup(request) {
            Ok(Some(cir)) => return Ok((cir, CacheOutcome::Hit)),
            Ok(None) => CacheOutcome::Generated,
            Err(e @ (Error::Checksum(_) | Error::Parse(_) | Error::Data(_))) => CacheOutcome::Regenerated(e.to_string()),
            Err(e) => return Err(e),
        };
        let cir = request.generate()?;
        self.store(request, &cir)?;
        Ok((cir, outcome))
    }
}
