//! Antenna spacing sweep for 8-MSSK, reporting where the error rate is lowest.
//!
//! ```text
//! cargo run --release --example array_spacing -- [max_bits]
//! ```

use std::io::Write;

use mcvd_im::harness::{emit_csv, run_sweep, SweepSpec};

fn main() -> mcvd_im::Result<()> {
    let max_bits = std::env::args().nth(1).and_then(|a| a.parse::<f64>().ok()).unwrap_or(5e6);
    let spec = SweepSpec::parse(&format!(
        "parameter = d_yz
         values = 9, 12, 16, 22, 30
         schemes = mssk
         detectors = mcd
         max_bits = {max_bits}
         target_errors = 300
         cache_dir = target/cir-cache"
    ))?;
    let records = run_sweep(&spec)?;
    for r in &records {
        eprintln!("d_yz {:>4}  {:<7}  ber {:.3e} ± {:.1e}", r.value, r.mapping.unwrap(), r.ber, r.half_width);
    }
    for mapping in &spec.mappings {
        let best = records
            .iter()
            .filter(|r| r.mapping == Some(*mapping))
            .min_by(|a, b| a.ber.total_cmp(&b.ber))
            .expect("records");
        eprintln!("{mapping}: lowest error rate at d_yz = {} µm", best.value);
    }
    std::io::stdout().write_all(&emit_csv(&records))?;
    Ok(())
}
