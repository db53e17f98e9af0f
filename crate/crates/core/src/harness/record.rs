use std::fmt::Write as _;

use crate::channel::ArrivalModel;
use crate::modulation::{Mapping, Scheme};
use crate::stats::{binomial_half_width, LOW_CONFIDENCE_ERRORS};

use super::config::SweepParameter;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordStatus {
    Ok,
    /// The point could not be evaluated; see the note.
    Skipped,
}

/// One evaluated sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub parameter: SweepParameter,
    pub value: f64,
    pub scheme: Scheme,
    /// Detector name, or `theory` for analytical values.
    pub detector: String,
    /// `None` for schemes without an index mapping.
    pub mapping: Option<Mapping>,
    pub n_tx: usize,
    pub r_r: f64,
    pub d_x: f64,
    pub d_yz: f64,
    pub diffusion: f64,
    pub drift_vx: f64,
    pub memory: usize,
    pub m_tx: f64,
    pub t_b: f64,
    pub t_s: f64,
    pub arrival_model: ArrivalModel,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// 95% confidence half-width; zero for analytical values.
    pub half_width: f64,
    pub low_confidence: bool,
    pub gamma: Option<u64>,
    pub status: RecordStatus,
    pub note: String,
    /// Seconds spent on this record.
    pub wall_time: f64,
}

impl BerRecord {
    /// Fill the error statistics from simulated counts.
    pub fn set_counts(&mut self, bits: u64, errors: u64) {
        self.bits = bits;
        self.errors = errors;
        self.ber = if bits == 0 { 0.0 } else { errors as f64 / bits as f64 };
        self.half_width = binomial_half_width(self.ber, bits);
        self.low_confidence = errors < LOW_CONFIDENCE_ERRORS;
    }
}

const HEADER: &str = "parameter,value,scheme,detector,mapping,n_tx,r_r,d_x,d_yz,diffusion,drift_vx,memory,m_tx,t_b,t_s,\
arrival_model,bits,errors,ber,half_width,low_confidence,gamma,status,note";

/// CSV with a header row and one row per record, in the given order. Wall
/// times are left out so identical runs give identical bytes.
pub fn emit_csv(records: &[BerRecord]) -> Vec<u8> {
    write_csv(records, false)
}

/// [`emit_csv`] with a trailing `wall_time` column.
pub fn emit_csv_with_timing(records: &[BerRecord]) -> Vec<u8> {
    write_csv(records, true)
}

fn write_csv(records: &[BerRecord], timing: bool) -> Vec<u8> {
    let mut out = String::from(HEADER);
    if timing {
        out.push_str(",wall_time");
    }
    out.push('\n');
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.9e},{:.9e},{},{},{},{}",
            r.parameter,
            r.value,
            r.scheme,
            r.detector,
            r.mapping.map_or_else(|| "-".to_string(), |m| m.to_string()),
            r.n_tx,
            r.r_r,
            r.d_x,
            r.d_yz,
            r.diffusion,
            r.drift_vx,
            r.memory,
            r.m_tx,
            r.t_b,
            r.t_s,
            r.arrival_model,
            r.bits,
            r.errors,
            r.ber,
            r.half_width,
            r.low_confidence,
            r.gamma.map_or_else(String::new, |g| g.to_string()),
            match r.status {
                RecordStatus::Ok => "ok",
                RecordStatus::Skipped => "skipped",
            },
            r.note.replace([',', '\n'], ";"),
        );
        if timing {
            let _ = write!(out, ",{:.3}", r.wall_time);
        }
        out.push('\n');
    }
    out.into_bytes()
}
