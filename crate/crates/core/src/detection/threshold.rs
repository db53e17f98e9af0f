use crate::error::{Error, Result};

/// Fixed threshold: bit 1 when `count >= gamma`.
pub fn ftd(count: u64, gamma: u64) -> u8 {
    u8::from(count >= gamma)
}

/// Adaptive threshold: bit 1 when the count rose above the previous interval's.
pub fn atd(count_k: u64, count_prev: u64) -> u8 {
    u8::from(count_k > count_prev)
}

/// Threshold minimizing the number of errors on labelled `(count, bit)` pairs.
///
/// Error counts only change at observed count values, so the candidates are the
/// distinct counts plus one past the largest. Among equally good thresholds the
/// middle of the first optimal run is returned.
pub fn calibrate_threshold(samples: &[(u64, u8)]) -> Result<u64> {
    if samples.is_empty() {
        return Err(Error::Argument("no calibration samples".into()));
    }
    let mut sorted: Vec<(u64, u8)> = samples.to_vec();
    sorted.sort_unstable();
    let ones_total = sorted.iter().filter(|(_, b)| *b == 1).count();

    // gamma = candidate: everything below decides 0.
    let mut candidates = Vec::new();
    let (mut ones_below, mut zeros_below) = (0usize, 0usize);
    let zeros_total = sorted.len() - ones_total;
    let mut i = 0;
    while i < sorted.len() {
        let c = sorted[i].0;
        candidates.push((c, ones_below + (zeros_total - zeros_below)));
        while i < sorted.len() && sorted[i].0 == c {
            if sorted[i].1 == 1 {
                ones_below += 1;
            } else {
                zeros_below += 1;
            }
            i += 1;
        }
    }
    let past = sorted.last().map(|s| s.0 + 1).unwrap_or(1);
    candidates.push((past, ones_below + (zeros_total - zeros_below)));

    let best = candidates.iter().map(|c| c.1).min().expect("non-empty");
    let first = candidates.iter().position(|c| c.1 == best).expect("present");
    let mut last = first;
    while last + 1 < candidates.len() && candidates[last + 1].1 == best {
        last += 1;
    }
    // Candidate t stands for every gamma in (c[t - 1], c[t]].
    let lo = if first == 0 { 0 } else { candidates[first - 1].0 + 1 };
    let hi = candidates[last].0;
    Ok(lo + (hi - lo) / 2)
}
