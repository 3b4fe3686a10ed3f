//! Summary statistics and empirical survival tables.

use alloc::vec::Vec;

/// Mean and standard error of a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (denominator `n - 1`).
    pub sd: f64,
    /// `sd / √n`.
    pub stderr: f64,
}

impl Summary {
    /// Two-pass estimate; an empty sample gives NaN fields.
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Summary { count: 0, mean: f64::NAN, sd: f64::NAN, stderr: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
            libm::sqrt(ss / (n - 1) as f64)
        } else {
            0.0
        };
        Summary { count: n, mean, sd, stderr: sd / libm::sqrt(n as f64) }
    }
}

/// `√(a² + b²)`, the standard error of a difference of independent estimates.
pub fn combined_stderr(a: f64, b: f64) -> f64 {
    libm::sqrt(a * a + b * b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurvivalPoint {
    pub t: f64,
    pub count_ge: usize,
    pub total: usize,
}

impl SurvivalPoint {
    pub fn survival(&self) -> f64 {
        if self.total == 0 {
            f64::NAN
        } else {
            self.count_ge as f64 / self.total as f64
        }
    }
}

/// Empirical `P(X ≥ t)` on a grid.
pub fn survival(sample: &[f64], grid: &[f64]) -> Vec<SurvivalPoint> {
    grid.iter()
        .map(|&t| SurvivalPoint { t, count_ge: sample.iter().filter(|x| **x >= t).count(), total: sample.len() })
        .collect()
}

/// Survival never increases along an increasing grid.
pub fn is_non_increasing(table: &[SurvivalPoint]) -> bool {
    table.windows(2).all(|w| w[1].count_ge <= w[0].count_ge)
}

/// Log-survival is non-increasing along the grid and ends strictly below
/// where it starts.
pub fn log_survival_decreasing(table: &[SurvivalPoint]) -> bool {
    match (table.first(), table.last()) {
        (Some(a), Some(b)) => is_non_increasing(table) && b.count_ge < a.count_ge,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_matches_hand_values() {
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.sd - libm::sqrt(5.0 / 3.0)).abs() < 1e-15);
        assert!((s.stderr - s.sd / 2.0).abs() < 1e-15);
        let c = Summary::of(&[7.0; 5]);
        assert_eq!((c.mean, c.sd, c.stderr), (7.0, 0.0, 0.0));
    }

    #[test]
    fn survival_table() {
        let t = survival(&[0.0, 1.0, 1.0, 3.0], &[0.0, 1.0, 2.0, 4.0]);
        let c: Vec<usize> = t.iter().map(|p| p.count_ge).collect();
        assert_eq!(c, alloc::vec![4, 3, 1, 0]);
        assert!(is_non_increasing(&t));
        assert!(log_survival_decreasing(&t));
        assert!(!log_survival_decreasing(&survival(&[5.0, 5.0], &[1.0, 2.0])));
    }
}
