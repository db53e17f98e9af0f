//! Channel-aware detectors for MSSK: exhaustive ML sequence detection and the
//! decision-feedback symbol-by-symbol ML detector.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::Rng;

use super::argmax_random;
use crate::error::{Error, Result};
use crate::particle::ChannelResponse;

/// Largest number of candidate sequences the exhaustive detector will visit.
pub const DEFAULT_SEQUENCE_LIMIT: f64 = 1e7;

/// Per-antenna cost of a sequence hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchMetric {
    /// `ln σ² + (R − μ)² / σ²`, the negative Gaussian log-likelihood up to
    /// constants.
    #[default]
    Gaussian,
    /// `ln σ² + (R − μ) / σ²`, the residual left unsquared.
    Unsquared,
}

impl BranchMetric {
    fn cost(self, r: f64, mean: f64, var: f64) -> f64 {
        if var <= 0.0 {
            return if (r - mean).abs() < 1e-9 { 0.0 } else { f64::INFINITY };
        }
        match self {
            BranchMetric::Gaussian => var.ln() + (r - mean) * (r - mean) / var,
            BranchMetric::Unsquared => var.ln() + (r - mean) / var,
        }
    }
}

/// Gaussian log-density with the point-mass convention for zero variance.
fn log_likelihood(r: f64, mean: f64, var: f64) -> f64 {
    if var <= 0.0 {
        return if (r - mean).abs() < 1e-9 { 0.0 } else { f64::NEG_INFINITY };
    }
    -0.5 * (2.0 * PI * var).ln() - (r - mean) * (r - mean) / (2.0 * var)
}

/// Running state of a decision-feedback detector on one link.
#[derive(Debug, Clone)]
pub struct DetectorState {
    /// Most recent decisions, oldest first; at most `L - 1` entries.
    pub history: VecDeque<usize>,
    /// Molecules released by the active antenna per symbol.
    pub emission: f64,
    /// Fixed threshold for count-based fallbacks.
    pub gamma: Option<u64>,
    memory: usize,
}

impl DetectorState {
    /// Empty history, i.e. no emissions before the stream starts.
    pub fn new(memory: usize, emission: f64) -> Self {
        Self { history: VecDeque::with_capacity(memory), emission, gamma: None, memory: memory.max(1) }
    }

    pub fn push(&mut self, decision: usize) {
        if self.memory == 1 {
            return;
        }
        if self.history.len() == self.memory - 1 {
            self.history.pop_front();
        }
        self.history.push_back(decision);
    }

    pub fn memory(&self) -> usize {
        self.memory
    }
}

/// Summed per-antenna log-likelihoods for every hypothesis of the current
/// symbol, with past interference predicted from the decided history.
pub fn symbol_ml_scores(counts: &[u64], state: &DetectorState, cir: Option<&ChannelResponse>) -> Result<Vec<f64>> {
    let cir = cir.ok_or_else(|| Error::Argument("symbol-by-symbol ML needs the channel response".into()))?;
    let (n_tx, n_rx) = (cir.n_tx(), cir.n_rx());
    if counts.len() != n_rx {
        return Err(Error::Argument(format!("{} counts for {n_rx} antennas", counts.len())));
    }
    let e = state.emission;
    let mut past_mean = vec![0.0; n_rx];
    let mut past_var = vec![0.0; n_rx];
    for (d, &x) in state.history.iter().rev().enumerate() {
        let delay = d + 1;
        if delay >= cir.memory() {
            break;
        }
        for j in 0..n_rx {
            let p = cir.h(x, j, delay);
            past_mean[j] += e * p;
            past_var[j] += e * p * (1.0 - p);
        }
    }
    Ok((0..n_tx)
        .map(|i| {
            (0..n_rx)
                .map(|j| {
                    let p = cir.h(i, j, 0);
                    log_likelihood(counts[j] as f64, past_mean[j] + e * p, past_var[j] + e * p * (1.0 - p))
                })
                .sum()
        })
        .collect())
}

/// Decide the current MSSK symbol and append the decision to the history.
pub fn symbol_ml<R: Rng + ?Sized>(
    counts: &[u64],
    state: &mut DetectorState,
    cir: Option<&ChannelResponse>,
    rng: &mut R,
) -> Result<usize> {
    let scores = symbol_ml_scores(counts, state, cir)?;
    let decision = argmax_random(&scores, rng);
    state.push(decision);
    Ok(decision)
}

/// Enumerate every active-antenna sequence for the window `q` (one row of
/// per-antenna counts per interval) and report each with its summed metric.
fn visit_sequences(
    q: &[Vec<u64>],
    cir: &ChannelResponse,
    emission: f64,
    history: &[usize],
    metric: BranchMetric,
    limit: f64,
    mut visit: impl FnMut(&[usize], f64),
) -> Result<()> {
    let n = cir.n_tx();
    let n_rx = cir.n_rx();
    let w = q.len();
    if w == 0 {
        return Err(Error::Argument("empty observation window".into()));
    }
    if let Some(row) = q.iter().find(|r| r.len() != n_rx) {
        return Err(Error::Argument(format!("{} counts for {n_rx} antennas", row.len())));
    }
    let required = (n as f64).powi(w as i32);
    if required > limit {
        return Err(Error::Infeasible { required, limit });
    }

    let mut seq = vec![0usize; w];
    let mut partial = vec![0.0f64; w + 1];
    let mut z = 0usize;
    let mut next = vec![0usize; w];
    // Iterative depth-first walk; partial[z] is the metric of seq[..z].
    loop {
        if next[z] == n {
            if z == 0 {
                break;
            }
            next[z] = 0;
            z -= 1;
            continue;
        }
        seq[z] = next[z];
        next[z] += 1;
        let mut cost = 0.0;
        for j in 0..n_rx {
            let (mut mean, mut var) = (0.0, 0.0);
            for d in 0..cir.memory() {
                let sym = if d <= z {
                    Some(seq[z - d])
                } else {
                    let back = d - z;
                    history.len().checked_sub(back).map(|t| history[t])
                };
                let Some(x) = sym else { break };
                let p = cir.h(x, j, d);
                mean += emission * p;
                var += emission * p * (1.0 - p);
            }
            cost += metric.cost(q[z][j] as f64, mean, var);
        }
        partial[z + 1] = partial[z] + cost;
        if z + 1 == w {
            visit(&seq, partial[w]);
        } else {
            z += 1;
        }
    }
    Ok(())
}

/// Metric of every candidate sequence, indexed by the base-`n_tx` number whose
/// most significant digit is the oldest symbol.
pub fn ml_sequence_metrics(
    q: &[Vec<u64>],
    cir: &ChannelResponse,
    emission: f64,
    history: &[usize],
    metric: BranchMetric,
) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    visit_sequences(q, cir, emission, history, metric, DEFAULT_SEQUENCE_LIMIT, |_, m| out.push(m))?;
    Ok(out)
}

/// Maximum-likelihood active-antenna sequence for the observation window `q`
/// (`q[z][j]` = count at antenna `j` in interval `z`). Symbols decided before
/// the window enter through `history` (oldest first). Exact ties are broken
/// uniformly at random.
pub fn ml_sequence_detect<R: Rng + ?Sized>(
    q: &[Vec<u64>],
    cir: &ChannelResponse,
    emission: f64,
    history: &[usize],
    metric: BranchMetric,
    limit: f64,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut best = f64::INFINITY;
    let mut best_seq: Option<Vec<usize>> = None;
    let mut ties = 0u32;
    visit_sequences(q, cir, emission, history, metric, limit, |seq, m| {
        if m < best || best_seq.is_none() {
            best = m;
            best_seq = Some(seq.to_vec());
            ties = 1;
        } else if m == best {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                best_seq = Some(seq.to_vec());
            }
        }
    })?;
    Ok(best_seq.expect("at least one sequence"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy() -> ChannelResponse {
        ChannelResponse::from_taps(
            vec![vec![vec![0.3, 0.1], vec![0.05, 0.04]], vec![vec![0.05, 0.04], vec![0.3, 0.1]]],
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn counts_at_hypothesis_mean_win() {
        let cir = toy();
        let state = DetectorState::new(2, 40.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // Means for hypothesis 2: (2, 12).
        let mut s = state.clone();
        assert_eq!(symbol_ml(&[2, 12], &mut s, Some(&cir), &mut rng).unwrap(), 1);
        assert_eq!(s.history, [1]);
        let mut s = state;
        assert_eq!(symbol_ml(&[12, 2], &mut s, Some(&cir), &mut rng).unwrap(), 0);
    }

    #[test]
    fn missing_cir_is_an_error() {
        let state = DetectorState::new(2, 40.0);
        assert!(symbol_ml_scores(&[1, 2], &state, None).is_err());
    }

    #[test]
    fn history_is_capped() {
        let mut s = DetectorState::new(3, 1.0);
        for d in 0..5 {
            s.push(d);
        }
        assert_eq!(s.history, [3, 4]);
        let mut s = DetectorState::new(1, 1.0);
        s.push(1);
        assert!(s.history.is_empty());
    }

    #[test]
    fn degenerate_variance_point_mass() {
        let cir = ChannelResponse::from_flat(2, 2, 1, 1.0, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let state = DetectorState::new(1, 5.0);
        let scores = symbol_ml_scores(&[5, 0], &state, Some(&cir)).unwrap();
        assert_eq!(scores, vec![0.0, f64::NEG_INFINITY]);
        let m = ml_sequence_metrics(&[vec![0, 5]], &cir, 5.0, &[], BranchMetric::Gaussian).unwrap();
        assert_eq!(m, vec![f64::INFINITY, 0.0]);
    }

    #[test]
    fn guard_reports_required_count() {
        let cir = toy();
        let q = vec![vec![0, 0]; 30];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        match ml_sequence_detect(&q, &cir, 1.0, &[], BranchMetric::Gaussian, 1e7, &mut rng) {
            Err(Error::Infeasible { required, .. }) => assert_eq!(required, 2f64.powi(30)),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unsquared_metric_differs() {
        let g = BranchMetric::Gaussian.cost(3.0, 5.0, 2.0);
        let u = BranchMetric::Unsquared.cost(3.0, 5.0, 2.0);
        assert!((g - (2f64.ln() + 2.0)).abs() < 1e-12);
        assert!((u - (2f64.ln() - 1.0)).abs() < 1e-12);
    }
}
