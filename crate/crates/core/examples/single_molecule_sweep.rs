//! Error rate against the molecule budget for the single-molecule schemes on
//! the default 8x8 arrangement. Prints the sweep as CSV.
//!
//! ```text
//! cargo run --release --example single_molecule_sweep -- [max_bits]
//! ```

use std::io::Write;

use mcvd_im::harness::{emit_csv, run_sweep, SweepSpec};

fn main() -> mcvd_im::Result<()> {
    let max_bits = std::env::args().nth(1).and_then(|a| a.parse::<f64>().ok()).unwrap_or(2e6);
    let config = format!(
        "parameter = m_tx
         values = 50, 100, 150, 200, 250, 300, 350, 400, 450, 500
         schemes = siso_bcsk, rc_bcsk, smux_bcsk, mssk
         detectors = ftd, atd, mcd
         mappings = natural, gray
         max_bits = {max_bits}
         target_errors = 200
         cache_dir = target/cir-cache"
    );
    let spec = SweepSpec::parse(&config)?;
    let records = run_sweep(&spec)?;
    for r in &records {
        eprintln!(
            "m_tx {:>4}  {:<10} {:<4} {:<8} ber {:.3e} ± {:.1e} ({} errors)",
            r.value,
            r.scheme,
            r.detector,
            r.mapping.map_or("-".to_string(), |m| m.to_string()),
            r.ber,
            r.half_width,
            r.errors
        );
    }
    std::io::stdout().write_all(&emit_csv(&records))?;
    Ok(())
}
