use super::{bucket_estimates, GeneralProperty, LabelInvariantProperty, PropertyError};
use crate::dist::GrainDistribution;
use crate::histogram::BucketHistogram;
use crate::rational::{ratio, to_f64, Rational};

/// The uniform distribution over `[N]`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Uniformity;

impl Uniformity {
    /// `sum_j n_j max(0, q_j - 1/N)` with `n_j = p_j / q_j`.
    pub fn estimate(n: usize, h: &BucketHistogram) -> f64 {
        bucket_estimates(h).map(|(_, p, q)| p / q * (q - 1.0 / n as f64).max(0.0)).sum()
    }
}

impl LabelInvariantProperty for Uniformity {
    fn name(&self) -> &'static str {
        "uniformity"
    }

    fn decide(&self, tau: Rational, n: usize, h: &BucketHistogram) -> bool {
        Self::estimate(n, h) <= 1.5 * to_f64(tau)
    }

    /// Uniform over `N * ceil(G / N)` grains, so that it is representable.
    fn find(&self, n: usize, _delta: Rational, _rho: Rational, d: &GrainDistribution) -> GrainDistribution {
        let per = d.grains().div_ceil(n as u64).max(1);
        GrainDistribution::uniform(n, per * n as u64).expect("uniform over a multiple of N")
    }
}

impl GeneralProperty for Uniformity {
    fn name(&self) -> &'static str {
        "uniformity"
    }

    fn dist(&self, n: usize, q: &GrainDistribution, _rho: Rational) -> Result<Rational, PropertyError> {
        let g = u128::from(q.grains());
        let n = n as u128;
        // sum_x max(0, c_x / G - 1 / N) = sum_x max(0, N c_x - G) / (N G)
        let excess: u128 = q.counts().iter().map(|&c| (n * u128::from(c)).saturating_sub(g)).sum();
        Ok(ratio(excess, n * g))
    }
}
