use serde::{Deserialize, Serialize};

use crate::divergence::compensated_sum;

/// Normal-approximation z value for a two-sided 95% interval.
pub const CI95_Z: f64 = 1.96;

/// Mean, sample standard deviation and 95% CI half-width of metric samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    pub ci95: f64,
}

impl Aggregate {
    pub fn lower(&self) -> f64 {
        self.mean - self.ci95
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.ci95
    }
}

/// `None` for an empty sample list. The standard deviation uses `n − 1` and is
/// zero for a single sample.
pub fn aggregate(samples: &[f64]) -> Option<Aggregate> {
    let n = samples.len();
    if n == 0 {
        return None;
    }
    let mean = compensated_sum(samples.iter().copied()) / n as f64;
    let std = if n > 1 {
        let ss = compensated_sum(samples.iter().map(|x| (x - mean) * (x - mean)));
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Some(Aggregate {
        n,
        mean,
        std,
        ci95: CI95_Z * std / (n as f64).sqrt(),
    })
}
