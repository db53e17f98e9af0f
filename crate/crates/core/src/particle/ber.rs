use rayon::prelude::*;

use super::{stream_rng, DiffusionParams, Fate, Obstacles};
use crate::detection::mcd_mssk;
use crate::error::{Error, Result};
use crate::geometry::Topology;
use crate::modulation::{Modulator, Scheme, SchemeConfig};
use crate::stats::ErrorTally;

/// Particle-level MSSK error rate.
///
/// Each trial draws `memory` random symbols, releases and walks every molecule
/// until the end of the last interval, and decodes only the last symbol by
/// maximum count. Previous symbols contribute interference but are never
/// decoded.
pub fn particle_ber(
    cfg: &SchemeConfig,
    topology: &Topology,
    params: &DiffusionParams,
    memory: usize,
    n_trials: u64,
    seed: u64,
) -> Result<ErrorTally> {
    if cfg.scheme != Scheme::Mssk {
        return Err(Error::Unsupported(format!("particle error rate for {}", cfg.scheme)));
    }
    if n_trials < 1 {
        return Err(Error::Argument("at least one trial is required".into()));
    }
    if memory == 0 {
        return Err(Error::Argument("channel memory must be at least 1".into()));
    }
    if topology.n_tx() != cfg.n_tx || topology.n_rx() != cfg.n_rx {
        return Err(Error::Argument(format!(
            "scheme uses {}x{} antennas but the topology has {}x{}",
            cfg.n_tx,
            cfg.n_rx,
            topology.n_tx(),
            topology.n_rx()
        )));
    }
    params.validate()?;
    let modulator = Modulator::new(cfg)?;
    let map = modulator.index_map().expect("index scheme").clone();
    let emission = modulator.emission();
    let sps = params.steps_per_symbol(modulator.params().t_s)?;
    let obstacles = Obstacles::new(topology, params.reflective_block);
    let n = cfg.n_tx;

    let per_trial: Vec<Result<u64>> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, trial);
            let symbols: Vec<usize> = (0..memory).map(|_| rand::Rng::random_range(&mut rng, 0..n)).collect();
            let mut counts = vec![0u64; cfg.n_rx];
            for (k, &x) in symbols.iter().enumerate() {
                let horizon = (memory - k) as u64 * sps;
                let last_from = horizon - sps;
                for _ in 0..emission {
                    let fate = obstacles.walk(topology.tx_points[x], params, horizon, params.far_field_leap, &mut rng)?;
                    if let Fate::Absorbed { rx, step } = fate {
                        if step > last_from {
                            counts[rx] += 1;
                        }
                    }
                }
            }
            let decided = mcd_mssk(&counts, &mut rng);
            Ok(u64::from(map.distance(symbols[memory - 1], decided)))
        })
        .collect();

    let bits = map.bits() as u64;
    let mut tally = ErrorTally::default();
    for errors in per_trial {
        tally.record(bits, errors?);
    }
    Ok(tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, m_tx: f64) -> SchemeConfig {
        SchemeConfig::new(Scheme::Mssk).with_antennas(n).with_m_tx(m_tx)
    }

    #[test]
    fn rejects_other_schemes_and_zero_trials() {
        let t = Topology::uca(8, 8, 5.0, 10.0, 10.0).unwrap();
        let p = DiffusionParams::default();
        let smux = SchemeConfig::new(Scheme::SmuxBcsk);
        assert!(matches!(particle_ber(&smux, &t, &p, 2, 1, 0), Err(Error::Unsupported(_))));
        assert!(matches!(particle_ber(&cfg(8, 300.0), &t, &p, 2, 0, 0), Err(Error::Argument(_))));
    }

    #[test]
    fn zero_signal_is_guessing() {
        let t = Topology::uca(8, 8, 5.0, 10.0, 10.0).unwrap();
        let p = DiffusionParams::default();
        let tally = particle_ber(&cfg(8, 0.0), &t, &p, 3, 6000, 4).unwrap();
        let hw = 3.0 * tally.trial_standard_error();
        assert!((tally.ber() - 0.5).abs() < hw, "{} ± {hw}", tally.ber());
    }

    #[test]
    fn isolated_pairs_do_not_err() {
        let t = Topology::uca(2, 2, 5.0, 2.0, 400.0).unwrap();
        let p = DiffusionParams::default();
        let c = SchemeConfig::new(Scheme::Mssk).with_antennas(2).with_m_tx(400.0).with_t_b(0.25);
        let tally = particle_ber(&c, &t, &p, 2, 40, 9).unwrap();
        assert_eq!(tally.errors, 0);
    }
}
