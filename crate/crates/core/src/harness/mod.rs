//! Experiment driver: sweep configuration, channel response caching, link
//! simulation and CSV output.

mod cache;
mod config;
mod link;
mod record;

pub use cache::{CacheOutcome, CirCache, CirRequest};
pub use config::{PointParams, SweepParameter, SweepSpec};
pub use link::{simulate_link, Combining, Detector, LinkConfig, LinkResult};
pub use record::{emit_csv, emit_csv_with_timing, BerRecord, RecordStatus};

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modulation::{derive_params, Mapping, Modulator, Scheme, SchemeConfig};
use crate::particle::{ChannelResponse, RowFill};
use crate::theory::{index_scheme_ber, DEFAULT_ENUMERATION_LIMIT};

/// What one sweep record evaluates.
#[derive(Debug, Clone)]
enum Job {
    Link { point: usize, cfg: LinkConfig },
    Theory { point: usize, cfg: SchemeConfig, memory: usize },
}

/// Channel response and how it was obtained.
struct Channel {
    cir: Arc<ChannelResponse>,
    note: String,
}

/// Channel response request for `scheme` at sweep point `p`.
fn request_for(spec: &SweepSpec, p: &PointParams, cfg: &SchemeConfig) -> Result<CirRequest> {
    Ok(CirRequest {
        topology: spec.topology(p)?,
        params: spec.diffusion_params(p),
        t_s: derive_params(cfg)?.t_s,
        memory: spec.memory,
        seed: spec.seed,
        fill: RowFill::Shift,
    })
}

fn scheme_config(spec: &SweepSpec, p: &PointParams, scheme: Scheme, mapping: Mapping) -> SchemeConfig {
    SchemeConfig::new(scheme).with_antennas(spec.n_tx).with_m_tx(p.m_tx).with_t_b(p.t_b).with_mapping(mapping)
}

/// Run every (value, scheme, detector, mapping) combination of `spec`.
///
/// Detectors that do not apply to a scheme are left out, and schemes without
/// an index mapping get a single record. Channel responses are simulated once
/// per distinct physical setup and symbol duration, and reused from
/// `spec.cache_dir` when present. Each record draws from its own RNG stream,
/// so results do not depend on scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<BerRecord>> {
    spec.validate()?;
    if let Some(l) = spec.theory_memory {
        if l > spec.memory {
            return Err(Error::Config(format!("theory_memory = {l} exceeds memory = {}", spec.memory)));
        }
    }
    let points: Vec<PointParams> = spec.values.iter().map(|v| spec.point(*v)).collect();

    let mut jobs = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for &scheme in &spec.schemes {
            let mappings: &[Mapping] = if scheme.is_index() { &spec.mappings } else { &spec.mappings[..1] };
            for &detector in spec.detectors.iter().filter(|d| d.supports(scheme)) {
                for &mapping in mappings {
                    let cfg = LinkConfig {
                        combining: spec.combining,
                        model: spec.arrival_model,
                        max_bits: spec.max_bits,
                        target_errors: spec.target_errors,
                        calibration_symbols: spec.calibration_symbols,
                        metric: spec.metric,
                        ..LinkConfig::new(scheme_config(spec, p, scheme, mapping), detector)
                    };
                    jobs.push(Job::Link { point: i, cfg });
                }
            }
            if let (Some(memory), true) = (spec.theory_memory, scheme.is_index()) {
                for &mapping in mappings {
                    jobs.push(Job::Theory { point: i, cfg: scheme_config(spec, p, scheme, mapping), memory });
                }
            }
        }
    }

    // Channel responses, shared between jobs with the same physical setup.
    let cache = spec.cache_dir.as_ref().map(CirCache::new);
    let mut channels: HashMap<String, Channel> = HashMap::new();
    let mut job_channel = Vec::with_capacity(jobs.len());
    for job in &jobs {
        let (point, cfg) = match job {
            Job::Link { point, cfg } => (*point, &cfg.scheme),
            Job::Theory { point, cfg, .. } => (*point, cfg),
        };
        let request = request_for(spec, &points[point], cfg)?;
        let key = request.fingerprint();
        if !channels.contains_key(&key) {
            let (cir, note) = match &cache {
                Some(c) => {
                    let (cir, outcome) = c.get_or_generate(&request)?;
                    let note = match outcome {
                        CacheOutcome::Regenerated(why) => format!("channel response regenerated: {why}"),
                        _ => String::new(),
                    };
                    (cir, note)
                }
                None => (request.generate()?, String::new()),
            };
            channels.insert(key.clone(), Channel { cir: Arc::new(cir), note });
        }
        job_channel.push(key);
    }

    let records: Vec<Result<BerRecord>> = jobs
        .par_iter()
        .zip(job_channel.par_iter())
        .enumerate()
        .map(|(index, (job, key))| {
            let channel = &channels[key];
            run_job(spec, &points, job, channel, index as u64)
        })
        .collect();
    records.into_iter().collect()
}

fn run_job(spec: &SweepSpec, points: &[PointParams], job: &Job, channel: &Channel, stream: u64) -> Result<BerRecord> {
    let start = Instant::now();
    let (point, cfg) = match job {
        Job::Link { point, cfg } => (*point, &cfg.scheme),
        Job::Theory { point, cfg, .. } => (*point, cfg),
    };
    let p = &points[point];
    let t_s = derive_params(cfg)?.t_s;
    let mut record = BerRecord {
        parameter: spec.parameter,
        value: spec.values[point],
        scheme: cfg.scheme,
        detector: String::new(),
        mapping: cfg.scheme.is_index().then_some(cfg.mapping),
        n_tx: spec.n_tx,
        r_r: spec.r_r,
        d_x: spec.d_x,
        d_yz: p.d_yz,
        diffusion: spec.diffusion,
        drift_vx: p.drift_vx,
        memory: spec.memory,
        m_tx: p.m_tx,
        t_b: p.t_b,
        t_s,
        arrival_model: spec.arrival_model,
        bits: 0,
        errors: 0,
        ber: 0.0,
        half_width: 0.0,
        low_confidence: false,
        gamma: None,
        status: RecordStatus::Ok,
        note: channel.note.clone(),
        wall_time: 0.0,
    };
    match job {
        Job::Link { cfg, .. } => {
            record.detector = cfg.detector.to_string();
            match simulate_link(cfg, &channel.cir, spec.seed, stream) {
                Ok(result) => {
                    record.set_counts(result.tally.bits, result.tally.errors);
                    record.gamma = result.gamma;
                }
                Err(e @ Error::Infeasible { .. }) => {
                    record.status = RecordStatus::Skipped;
                    record.note = e.to_string();
                }
                Err(e) => return Err(e),
            }
        }
        Job::Theory { cfg, memory, .. } => {
            record.detector = "theory".into();
            record.memory = *memory;
            let emission = Modulator::new(cfg)?.emission() as f64;
            let beta = if cfg.scheme == Scheme::Msm { 2 } else { 1 };
            match index_scheme_ber(&channel.cir, *memory, emission, beta, &[cfg.mapping], DEFAULT_ENUMERATION_LIMIT) {
                Ok(v) => record.ber = v[0],
                Err(e @ Error::Infeasible { .. }) => {
                    record.status = RecordStatus::Skipped;
                    record.note = e.to_string();
                }
                Err(e) => return Err(e),
            }
        }
    }
    record.wall_time = start.elapsed().as_secs_f64();
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SweepSpec {
        SweepSpec {
            values: vec![100.0, 300.0],
            schemes: vec![Scheme::Mssk, Scheme::SmuxBcsk],
            detectors: vec![Detector::Mcd, Detector::Ftd],
            memory: 3,
            n_molecules: 2000,
            max_bits: 2000,
            calibration_symbols: 300,
            theory_memory: Some(2),
            ..SweepSpec::default()
        }
    }

    #[test]
    fn one_record_per_applicable_combination() {
        let records = run_sweep(&tiny()).unwrap();
        // Per value: MSSK x MCD x 2 mappings, MSSK theory x 2, SMUX x FTD.
        assert_eq!(records.len(), 2 * (2 + 2 + 1));
        assert_eq!(records[0].detector, "mcd");
        assert_eq!(records[2].detector, "theory");
        assert_eq!(records[4].scheme, Scheme::SmuxBcsk);
        assert_eq!(records[4].mapping, None);
        assert!(records.iter().all(|r| r.status == RecordStatus::Ok && (0.0..=1.0).contains(&r.ber)));
    }

    #[test]
    fn infeasible_theory_is_skipped() {
        let spec = SweepSpec { theory_memory: Some(3), values: vec![300.0], schemes: vec![Scheme::Msm], ..tiny() };
        // 16^3 sequences fit; shrink the guard by asking for memory beyond it instead.
        let ok = run_sweep(&spec).unwrap();
        assert!(ok.iter().all(|r| r.status == RecordStatus::Ok));
        let deep = SweepSpec { memory: 8, theory_memory: Some(8), ..spec };
        let records = run_sweep(&deep).unwrap();
        let theory: Vec<_> = records.iter().filter(|r| r.detector == "theory").collect();
        assert!(!theory.is_empty());
        assert!(theory.iter().all(|r| r.status == RecordStatus::Skipped && r.note.contains("infeasible")));
    }

    #[test]
    fn theory_deeper_than_channel_rejected() {
        let spec = SweepSpec { theory_memory: Some(4), ..tiny() };
        assert!(matches!(run_sweep(&spec), Err(Error::Config(_))));
    }
}
