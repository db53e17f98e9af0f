//! Bit duration sweep at a fixed molecule budget: spatial multiplexing against
//! 8-MSSK with natural and Gray mapping. The ratio column shows how much Gray
//! mapping gains as intervals get longer.
//!
//! ```text
//! cargo run --release --example bit_duration_sweep -- [max_bits]
//! ```

use std::io::Write;

use mcvd_im::harness::{emit_csv, run_sweep, SweepSpec};
use mcvd_im::modulation::{Mapping, Scheme};

fn main() -> mcvd_im::Result<()> {
    let max_bits = std::env::args().nth(1).and_then(|a| a.parse::<f64>().ok()).unwrap_or(5e6);
    let spec = SweepSpec::parse(&format!(
        "parameter = t_b
         values = 0.15, 0.2, 0.25, 0.3, 0.35
         schemes = smux_bcsk, mssk
         detectors = ftd, mcd
         max_bits = {max_bits}
         target_errors = 300
         cache_dir = target/cir-cache"
    ))?;
    let records = run_sweep(&spec)?;

    eprintln!("t_b    smux       mssk-natural  mssk-gray   natural/gray");
    for &t_b in &spec.values {
        let pick = |scheme: Scheme, mapping: Option<Mapping>| {
            records.iter().find(|r| r.value == t_b && r.scheme == scheme && r.mapping == mapping).map(|r| r.ber)
        };
        let smux = pick(Scheme::SmuxBcsk, None).unwrap_or(f64::NAN);
        let natural = pick(Scheme::Mssk, Some(Mapping::Natural)).unwrap_or(f64::NAN);
        let gray = pick(Scheme::Mssk, Some(Mapping::Gray)).unwrap_or(f64::NAN);
        eprintln!("{t_b:<6} {smux:.3e}  {natural:.3e}     {gray:.3e}   {:.2}", natural / gray);
    }
    std::io::stdout().write_all(&emit_csv(&records))?;
    Ok(())
}
