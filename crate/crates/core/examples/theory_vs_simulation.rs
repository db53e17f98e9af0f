//! Analytical 8-MSSK error rate next to statistical-channel Monte Carlo with
//! a five-tap channel memory, for natural and Gray mapping.
//!
//! ```text
//! cargo run --release --example theory_vs_simulation
//! ```

use mcvd_im::channel::ArrivalModel;
use mcvd_im::geometry::Topology;
use mcvd_im::harness::{simulate_link, Detector, LinkConfig};
use mcvd_im::modulation::{Mapping, Modulator, Scheme, SchemeConfig};
use mcvd_im::particle::{simulate_cir, DiffusionParams, RowFill};
use mcvd_im::theory::theoretical_ber_mssk;

fn main() -> mcvd_im::Result<()> {
    let memory = 5;
    let topology = Topology::uca(8, 8, 5.0, 10.0, 10.0)?;
    let params = DiffusionParams { n_molecules: 200_000, ..DiffusionParams::default() };
    let cir = simulate_cir(&topology, &params, 0.75, memory, 1, RowFill::Shift)?;

    println!("m_tx  mapping  theory      gaussian-sim (rel)     binomial-sim (rel)");
    for m_tx in (50..=500).step_by(50) {
        for mapping in [Mapping::Natural, Mapping::Gray] {
            let cfg = SchemeConfig::new(Scheme::Mssk).with_m_tx(m_tx as f64).with_mapping(mapping);
            let emission = Modulator::new(&cfg)?.emission() as f64;
            let theory = theoretical_ber_mssk(&cir, memory, emission, mapping)?;
            let mut line = format!("{m_tx:>4}  {mapping:<7}  {theory:.4e}");
            for model in [ArrivalModel::Gaussian, ArrivalModel::Binomial] {
                let link = LinkConfig { max_bits: 30_000_000, target_errors: 2000, model, ..LinkConfig::new(cfg.clone(), Detector::Mcd) };
                let sim = simulate_link(&link, &cir, 7, m_tx as u64)?.tally;
                line += &format!("  {:.4e} ({:+.3})", sim.ber(), sim.ber() / theory - 1.0);
            }
            println!("{line}");
        }
    }
    Ok(())
}
