//! Error counting and confidence intervals.

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Fewer bit errors than this mark an estimate as low-confidence.
pub const LOW_CONFIDENCE_ERRORS: u64 = 10;

/// Bit errors accumulated over independent trials.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorTally {
    pub trials: u64,
    pub bits: u64,
    pub errors: u64,
    /// Sum over trials of the squared per-trial error count.
    pub errors_sq: u64,
}

impl ErrorTally {
    pub fn record(&mut self, bits: u64, errors: u64) {
        self.trials += 1;
        self.bits += bits;
        self.errors += errors;
        self.errors_sq += errors * errors;
    }

    pub fn merge(&mut self, other: &ErrorTally) {
        self.trials += other.trials;
        self.bits += other.bits;
        self.errors += other.errors;
        self.errors_sq += other.errors_sq;
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }

    /// 95% half-width from the normal approximation to the binomial.
    pub fn half_width(&self) -> f64 {
        binomial_half_width(self.ber(), self.bits)
    }

    /// Standard error of the bit error rate from the spread of per-trial
    /// error counts, valid when bits within a trial are correlated.
    pub fn trial_standard_error(&self) -> f64 {
        if self.trials < 2 || self.bits == 0 {
            return 0.0;
        }
        let n = self.trials as f64;
        let mean = self.errors as f64 / n;
        let var = (self.errors_sq as f64 / n - mean * mean).max(0.0) * n / (n - 1.0);
        let bits_per_trial = self.bits as f64 / n;
        (var / n).sqrt() / bits_per_trial
    }

    pub fn low_confidence(&self) -> bool {
        self.errors < LOW_CONFIDENCE_ERRORS
    }
}

pub fn binomial_half_width(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    Z95 * (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_arithmetic() {
        let mut t = ErrorTally::default();
        t.record(3, 1);
        t.record(3, 0);
        t.record(3, 2);
        assert_eq!((t.trials, t.bits, t.errors, t.errors_sq), (3, 9, 3, 5));
        assert!((t.ber() - 1.0 / 3.0).abs() < 1e-15);
        // Per-trial errors 1, 0, 2: sample variance 1, SE of the mean 1/sqrt(3).
        assert!((t.trial_standard_error() - (1.0 / 3f64.sqrt()) / 3.0).abs() < 1e-12);
        assert!(t.low_confidence());
    }

    #[test]
    fn half_width_matches_formula() {
        assert!((binomial_half_width(0.1, 10_000) - Z95 * 0.003).abs() < 1e-12);
        assert_eq!(binomial_half_width(0.5, 0), 0.0);
    }
}
