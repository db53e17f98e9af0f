//! Two molecule types: two parallel MSSK streams (QMSSK), antenna index plus
//! molecule type (MSM), and the single-antenna D-MoSK reference, over a
//! range of bit durations.
//!
//! ```text
//! cargo run --release --example dual_molecule -- [max_bits]
//! ```

use std::io::Write;

use mcvd_im::harness::{emit_csv, run_sweep, SweepSpec};

fn main() -> mcvd_im::Result<()> {
    let max_bits = std::env::args().nth(1).and_then(|a| a.parse::<f64>().ok()).unwrap_or(1e7);
    let spec = SweepSpec::parse(&format!(
        "parameter = t_b
         values = 0.15, 0.2, 0.25
         schemes = siso_dmosk, qmssk, msm
         detectors = ftd, mcd
         mappings = gray
         max_bits = {max_bits}
         target_errors = 150
         cache_dir = target/cir-cache"
    ))?;
    let records = run_sweep(&spec)?;
    for r in &records {
        eprintln!(
            "t_b {:<5} {:<11} {:<4} t_s {:<4} ber {:.3e} ± {:.1e} ({} errors / {} bits)",
            r.value, r.scheme, r.detector, r.t_s, r.ber, r.half_width, r.errors, r.bits
        );
    }
    std::io::stdout().write_all(&emit_csv(&records))?;
    Ok(())
}
