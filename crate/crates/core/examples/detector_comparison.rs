//! Maximum count against the channel-aware detectors for 8-MSSK: decision
//! feedback symbol-by-symbol ML and block sequence ML.
//!
//! ```text
//! cargo run --release --example detector_comparison -- [max_bits]
//! ```

use std::io::Write;

use mcvd_im::harness::{emit_csv, run_sweep, SweepSpec};

fn main() -> mcvd_im::Result<()> {
    let max_bits = std::env::args().nth(1).and_then(|a| a.parse::<f64>().ok()).unwrap_or(1e6);
    let spec = SweepSpec::parse(&format!(
        "parameter = m_tx
         values = 100, 200, 300, 400, 500
         schemes = mssk
         detectors = mcd, symbol_ml, sequence_ml:2
         mappings = gray
         max_bits = {max_bits}
         target_errors = 200
         cache_dir = target/cir-cache"
    ))?;
    let records = run_sweep(&spec)?;
    for r in &records {
        eprintln!(
            "m_tx {:>4}  {:<14} ber {:.3e} ± {:.1e} ({} errors)",
            r.value, r.detector, r.ber, r.half_width, r.errors
        );
    }
    std::io::stdout().write_all(&emit_csv(&records))?;
    Ok(())
}
