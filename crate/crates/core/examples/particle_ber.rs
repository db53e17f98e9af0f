//! Particle-level 8-MSSK trials: every molecule of a five-symbol burst is
//! walked and the last symbol is decoded by maximum count. The estimate is
//! printed next to the analytical value on a channel response estimated from
//! the same geometry.
//!
//! ```text
//! cargo run --release --example particle_ber -- [m_tx] [trials]
//! ```

use std::time::Instant;

use mcvd_im::geometry::Topology;
use mcvd_im::modulation::{Mapping, Modulator, Scheme, SchemeConfig};
use mcvd_im::particle::{particle_ber, simulate_cir, DiffusionParams, RowFill};
use mcvd_im::theory::theoretical_ber_mssk;

fn main() -> mcvd_im::Result<()> {
    let mut args = std::env::args().skip(1);
    let m_tx: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(100.0);
    let trials: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(2000);
    let memory = 5;

    let topology = Topology::uca(8, 8, 5.0, 10.0, 10.0)?;
    let params = DiffusionParams::default();
    let start = Instant::now();
    for mapping in [Mapping::Natural, Mapping::Gray] {
        let cfg = SchemeConfig::new(Scheme::Mssk).with_m_tx(m_tx).with_mapping(mapping);
        let tally = particle_ber(&cfg, &topology, &params, memory, trials, 11)?;
        let cir_params = DiffusionParams { n_molecules: 200_000, ..params.clone() };
        let cir = simulate_cir(&topology, &cir_params, 0.75, memory, 1, RowFill::Shift)?;
        let emission = Modulator::new(&cfg)?.emission() as f64;
        let theory = theoretical_ber_mssk(&cir, memory, emission, mapping)?;
        println!(
            "{mapping:<7} particle {:.4e} ± {:.1e} (SE, {} trials)  theory {theory:.4e}  z = {:+.2}",
            tally.ber(),
            tally.trial_standard_error(),
            tally.trials,
            (tally.ber() - theory) / tally.trial_standard_error()
        );
    }
    println!("{:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
