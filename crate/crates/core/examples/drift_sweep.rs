//! Flow towards the receiver: 8-MSSK and spatial multiplexing as the drift
//! velocity grows. Each drift value gets its own channel response.
//!
//! ```text
//! cargo run --release --example drift_sweep -- [v1,v2,...]
//! ```

use std::io::Write;

use mcvd_im::harness::{emit_csv, run_sweep, SweepSpec};

fn main() -> mcvd_im::Result<()> {
    let values = std::env::args().nth(1).unwrap_or_else(|| "0, 2.5, 5, 7.5, 10, 20".into());
    let spec = SweepSpec::parse(&format!(
        "parameter = drift_vx
         values = {values}
         schemes = mssk, smux_bcsk
         detectors = mcd, ftd
         mappings = gray
         max_bits = 4e6
         target_errors = 200
         cache_dir = target/cir-cache"
    ))?;
    let records = run_sweep(&spec)?;
    for r in &records {
        eprintln!(
            "v_x {:>5} µm/s  {:<10} ber {:.3e} ± {:.1e} ({} errors)",
            r.value, r.scheme, r.ber, r.half_width, r.errors
        );
    }
    std::io::stdout().write_all(&emit_csv(&records))?;
    Ok(())
}
