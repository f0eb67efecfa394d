use super::{bucket_estimates, GeneralProperty, LabelInvariantProperty, PropertyError};
use crate::dist::GrainDistribution;
use crate::histogram::BucketHistogram;
use crate::rational::{ratio, to_f64, Rational};

/// Support of size at most `bound`.
#[derive(Clone, Copy, Debug)]
pub struct SupportSize {
    pub bound: usize,
}

impl SupportSize {
    /// Histogram mass not covered by the `bound` heaviest elements the buckets
    /// account for. Bucket 0 is never counted as covered.
    pub fn estimate(&self, h: &BucketHistogram) -> f64 {
        let mut left = self.bound as f64;
        let mut covered = 0.0;
        let mut buckets: Vec<_> = bucket_estimates(h).collect();
        buckets.sort_by(|a, b| b.0.cmp(&a.0));
        for (_, p, q) in buckets {
            if left <= 0.0 {
                break;
            }
            let take = left.min(p / q);
            covered += (take * q).min(p);
            left -= take;
        }
        (to_f64(h.total()) - covered).max(0.0)
    }

    /// Element indices by decreasing count, ties to the smaller index.
    fn heaviest(q: &GrainDistribution) -> Vec<usize> {
        let mut order: Vec<usize> = (0..q.domain_size()).collect();
        order.sort_by(|&a, &b| q.counts()[b].cmp(&q.counts()[a]).then(a.cmp(&b)));
        order
    }

    fn removed(&self, q: &GrainDistribution) -> u64 {
        Self::heaviest(q).iter().skip(self.bound).map(|&i| q.counts()[i]).sum()
    }
}

impl LabelInvariantProperty for SupportSize {
    fn name(&self) -> &'static str {
        "support-size"
    }

    fn decide(&self, tau: Rational, n: usize, h: &BucketHistogram) -> bool {
        self.bound >= n || self.estimate(h) <= 1.5 * to_f64(tau)
    }

    /// Keeps the `bound` heaviest elements and moves the rest of the mass onto the heaviest one.
    fn find(&self, _n: usize, _delta: Rational, _rho: Rational, d: &GrainDistribution) -> GrainDistribution {
        if self.bound >= d.domain_size() || self.bound == 0 {
            return d.clone();
        }
        let order = Self::heaviest(d);
        let mut counts = d.counts().to_vec();
        let mut moved = 0;
        for &i in &order[self.bound..] {
            moved += counts[i];
            counts[i] = 0;
        }
        counts[order[0]] += moved;
        GrainDistribution::new(counts, d.grains()).expect("mass is preserved")
    }
}

impl GeneralProperty for SupportSize {
    fn name(&self) -> &'static str {
        "support-size"
    }

    fn dist(&self, _n: usize, q: &GrainDistribution, _rho: Rational) -> Result<Rational, PropertyError> {
        Ok(ratio(self.removed(q).into(), q.grains().into()))
    }
}
