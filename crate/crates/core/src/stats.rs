//! Binomial summaries with Wilson score intervals.

use thiserror::Error;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959963984540054;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("cannot summarize an empty set of rows")]
    EmptyInput,
}

/// Success frequency with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Proportion {
    pub fn half_width(&self) -> f64 {
        (self.ci_hi - self.ci_lo) / 2.0
    }

    pub fn width(&self) -> f64 {
        self.ci_hi - self.ci_lo
    }

    /// Standard error of the plain estimate.
    pub fn std_error(&self) -> f64 {
        (self.estimate * (1.0 - self.estimate) / self.trials as f64).sqrt()
    }
}

pub fn wilson(successes: u64, trials: u64) -> Result<Proportion, StatsError> {
    if trials == 0 {
        return Err(StatsError::EmptyInput);
    }
    assert!(successes <= trials, "{successes} successes in {trials} trials");
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let spread = Z95 * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Ok(Proportion {
        successes,
        trials,
        estimate: round_sig(phat),
        ci_lo: if successes == 0 { 0.0 } else { round_sig((centre - spread).max(0.0)) },
        ci_hi: if successes == trials { 1.0 } else { round_sig((centre + spread).min(1.0)) },
    })
}

/// Summarizes boolean outcomes.
pub fn summarize<I: IntoIterator<Item = bool>>(rows: I) -> Result<Proportion, StatsError> {
    let (mut hits, mut total) = (0u64, 0u64);
    for ok in rows {
        total += 1;
        hits += u64::from(ok);
    }
    wilson(hits, total)
}

/// Rounds to 10 significant digits so printed values are stable.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().expect("scientific notation parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        let none = wilson(0, 100).unwrap();
        assert_eq!(none.estimate, 0.0);
        assert_eq!(none.ci_lo, 0.0);
        assert!((none.ci_hi - 0.0370).abs() < 5e-5, "{}", none.ci_hi);

        let all = wilson(100, 100).unwrap();
        assert_eq!(all.estimate, 1.0);
        assert!((all.ci_lo - 0.9630).abs() < 5e-5, "{}", all.ci_lo);

        let half = wilson(50, 100).unwrap();
        assert_eq!(half.estimate, 0.5);
        assert!(((half.ci_hi - 0.5) - (0.5 - half.ci_lo)).abs() < 1e-9);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(summarize(Vec::<bool>::new()), Err(StatsError::EmptyInput));
    }

    #[test]
    fn rounding_keeps_ten_digits() {
        assert_eq!(round_sig(0.123456789012345), 0.1234567890);
        assert_eq!(round_sig(2.0 / 3.0), 0.6666666667);
    }
}
