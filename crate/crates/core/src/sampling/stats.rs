use serde::{Deserialize, Serialize};

/// Streaming mean and second central moment (Welford), mergeable across shards.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb) = (self.count as f64, other.count as f64);
        self.mean += delta * nb / n as f64;
        self.m2 += other.m2 + delta * delta * na * nb / n as f64;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Monte Carlo estimate with provenance.
///
/// `importance_volume` is the Lebesgue factor that was multiplied into each
/// sample. When it varies per sample (translation regions depend on the
/// drawn group element) the reported value is its sample mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub importance_volume: f64,
}

impl EstimatorResult {
    pub fn from_stats(stats: &RunningStats, seed: u64, importance_volume: f64) -> Self {
        Self {
            mean: stats.mean(),
            std_error: stats.std_error(),
            samples: stats.count(),
            seed,
            importance_volume,
        }
    }

    /// A known value carried through estimator plumbing (zero error).
    pub fn exact(value: f64, samples: u64, seed: u64) -> Self {
        Self {
            mean: value,
            std_error: 0.0,
            samples,
            seed,
            importance_volume: 1.0,
        }
    }

    /// `|mean - target|` in units of `std_error`; infinite when the error
    /// is zero and the values differ.
    pub fn sigma_distance(&self, target: f64) -> f64 {
        sigma_distance(self.mean, self.std_error, target, 0.0)
    }
}

/// `|a - b| / sqrt(sa² + sb²)`, with an exactness guard for zero error.
pub fn sigma_distance(a: f64, sa: f64, b: f64, sb: f64) -> f64 {
    let diff = (a - b).abs();
    let sigma = (sa * sa + sb * sb).sqrt();
    if sigma > 0.0 {
        diff / sigma
    } else if diff <= 1e-12 * (1.0 + a.abs().max(b.abs())) {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Effective sample size `(Σw)² / Σw²` of a set of importance weights.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let (s, s2) = weights
        .iter()
        .fold((0.0, 0.0), |(s, s2), w| (s + w, s2 + w * w));
    if s2 == 0.0 {
        0.0
    } else {
        s * s / s2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.13 - 2.0).collect();
        let mut all = RunningStats::new();
        xs.iter().for_each(|&x| all.push(x));
        let mut parts: Vec<RunningStats> = xs
            .chunks(77)
            .map(|c| {
                let mut s = RunningStats::new();
                c.iter().for_each(|&x| s.push(x));
                s
            })
            .collect();
        let mut merged = RunningStats::new();
        parts.iter_mut().for_each(|p| merged.merge(p));
        assert_eq!(merged.count(), all.count());
        assert!((merged.mean() - all.mean()).abs() < 1e-12);
        assert!((merged.variance() - all.variance()).abs() < 1e-10);
    }

    #[test]
    fn constant_samples_have_zero_error() {
        let mut s = RunningStats::new();
        for _ in 0..10 {
            s.push(std::f64::consts::PI);
        }
        assert_eq!(s.mean(), std::f64::consts::PI);
        assert_eq!(s.std_error(), 0.0);
    }

    #[test]
    fn ess_of_uniform_weights_is_count() {
        assert!((effective_sample_size(&[2.0; 50]) - 50.0).abs() < 1e-12);
        assert!((effective_sample_size(&[1.0, 0.0, 0.0, 0.0]) - 1.0).abs() < 1e-12);
    }
}
