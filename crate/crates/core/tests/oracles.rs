//! Library results checked against independent direct computations.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mcvd_im::detection::{symbol_ml, DetectorState};
use mcvd_im::modulation::{IndexMap, Mapping};
use mcvd_im::particle::ChannelResponse;
use mcvd_im::theory::{conditional_ber, q_function};

fn two_antenna(direct: f64, cross: f64, tail: f64) -> ChannelResponse {
    ChannelResponse::circulant(&[vec![direct, tail], vec![cross, tail / 2.0]], 1.0).unwrap()
}

/// Posterior over the current symbol under a uniform prior, from the
/// Gaussian count model with the previous symbol known.
fn posterior(cir: &ChannelResponse, emission: f64, counts: &[u64], previous: Option<usize>) -> Vec<f64> {
    let n = cir.n_tx();
    let likelihood: Vec<f64> = (0..n)
        .map(|x| {
            (0..cir.n_rx())
                .map(|j| {
                    let mut mean = emission * cir.h(x, j, 0);
                    let mut var = mean * (1.0 - cir.h(x, j, 0));
                    if let Some(p) = previous {
                        mean += emission * cir.h(p, j, 1);
                        var += emission * cir.h(p, j, 1) * (1.0 - cir.h(p, j, 1));
                    }
                    let r = counts[j] as f64;
                    (-(r - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
                })
                .product()
        })
        .collect();
    let total: f64 = likelihood.iter().sum();
    likelihood.iter().map(|l| l / total).collect()
}

proptest! {
    #[test]
    fn symbol_ml_picks_the_posterior_mode(
        direct in 0.1f64..0.4,
        cross in 0.01f64..0.09,
        tail in 0.01f64..0.05,
        a in 0u64..40,
        b in 0u64..40,
        previous in proptest::option::of(0usize..2),
    ) {
        let cir = two_antenna(direct, cross, tail);
        let emission = 60.0;
        let post = posterior(&cir, emission, &[a, b], previous);
        let mut state = DetectorState::new(2, emission);
        if let Some(p) = previous {
            state.push(p);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(a * 41 + b);
        let decided = symbol_ml(&[a, b], &mut state, Some(&cir), &mut rng).unwrap();
        let best = post.iter().cloned().fold(0.0, f64::max);
        prop_assume!(best.is_finite() && best > 0.0);
        prop_assert!(post[decided] >= best * (1.0 - 1e-9), "posterior {post:?}, decided {decided}");
    }
}

#[test]
fn two_antenna_conditional_error_is_a_q_function() {
    // Single tap: a bit error needs the idle antenna to out-count the active
    // one, i.e. a Gaussian difference below zero.
    let (direct, cross, emission) = (0.2f64, 0.05f64, 50.0f64);
    let cir = ChannelResponse::circulant(&[vec![direct], vec![cross]], 1.0).unwrap();
    let map = IndexMap::new(2, Mapping::Natural).unwrap();
    let mean = emission * (direct - cross);
    let var = emission * (direct * (1.0 - direct) + cross * (1.0 - cross));
    let expected = q_function(mean / var.sqrt());
    let got = conditional_ber(&[0], &cir, emission, &map).unwrap();
    assert!((got - expected).abs() < 1e-7, "{got} vs {expected}");
}
