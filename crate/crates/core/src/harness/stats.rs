use serde::{Deserialize, Serialize};

/// z for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;
/// z used for every statistical assertion.
pub const Z_GATE: f64 = 3.0;

/// Win count with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessEstimate {
    pub trials: u64,
    pub wins: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Wilson score interval for `wins` successes out of `trials`.
pub fn wilson(wins: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = wins as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if wins == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if wins == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

impl SuccessEstimate {
    pub fn from_counts(wins: u64, trials: u64) -> Self {
        assert!(wins <= trials, "wins exceed trials");
        let (ci_lo, ci_hi) = wilson(wins, trials, Z95);
        Self {
            trials,
            wins,
            p_hat: if trials == 0 { 0.0 } else { wins as f64 / trials as f64 },
            ci_lo,
            ci_hi,
        }
    }

    /// Whether `p` lies in the Wilson interval at `z`.
    pub fn consistent_with(&self, p: f64, z: f64) -> bool {
        let (lo, hi) = wilson(self.wins, self.trials, z);
        p >= lo - 1e-12 && p <= hi + 1e-12
    }

    /// Upper end of the Wilson interval at `z`.
    pub fn upper(&self, z: f64) -> f64 {
        wilson(self.wins, self.trials, z).1
    }
}

/// Estimate from per-trial win flags.
pub fn estimate(wins: &[bool]) -> SuccessEstimate {
    SuccessEstimate::from_counts(wins.iter().filter(|&&w| w).count() as u64, wins.len() as u64)
}

/// Two-sample check that `a` and `b` are consistent with equal rates: the
/// gap must be within `z` pooled standard errors.
pub fn same_rate(a: &SuccessEstimate, b: &SuccessEstimate, z: f64) -> bool {
    let gap = (a.p_hat - b.p_hat).abs();
    gap <= z * pooled_se(a, b) + 1e-12
}

/// Pooled standard error of `a.p_hat − b.p_hat`.
pub fn pooled_se(a: &SuccessEstimate, b: &SuccessEstimate) -> f64 {
    let n = (a.trials + b.trials) as f64;
    if n == 0.0 || a.trials == 0 || b.trials == 0 {
        return 0.0;
    }
    let p = (a.wins + b.wins) as f64 / n;
    (p * (1.0 - p) * (1.0 / a.trials as f64 + 1.0 / b.trials as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_bounds() {
        let e = SuccessEstimate::from_counts(0, 100);
        assert_eq!(e.ci_lo, 0.0);
        assert!(e.ci_hi > 0.0 && e.ci_hi < 0.05);
        let e = SuccessEstimate::from_counts(50, 100);
        assert!(e.ci_lo < 0.5 && e.ci_hi > 0.5);
        assert!(e.consistent_with(0.45, Z_GATE));
        assert!(!e.consistent_with(0.2, Z_GATE));
        let all = SuccessEstimate::from_counts(10, 10);
        assert_eq!(all.ci_hi, 1.0);
    }

    #[test]
    fn pooled_comparison() {
        let a = SuccessEstimate::from_counts(500, 1000);
        let b = SuccessEstimate::from_counts(520, 1000);
        assert!(same_rate(&a, &b, Z_GATE));
        let c = SuccessEstimate::from_counts(700, 1000);
        assert!(!same_rate(&a, &c, Z_GATE));
    }
}
