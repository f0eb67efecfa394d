//! Distributions used by experiments: random instances and exact-distance perturbations.

use crate::dist::{DistError, GrainDistribution};
use crate::rational::Rational;
use crate::rng::Rng;
use rand::seq::SliceRandom;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorkloadError {
    #[error("distance {0} is not a whole number of grains")]
    NotGrainAligned(Rational),
    #[error("cannot move {0} of the mass without running out of receiving elements")]
    Infeasible(Rational),
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// A distribution at total variation distance exactly `delta` from `q`.
///
/// Grains are taken from elements in a random order until `delta * G` grains
/// are collected, then spread evenly over the elements that gave nothing.
pub fn at_distance(q: &GrainDistribution, delta: Rational, rng: &mut Rng) -> Result<GrainDistribution, WorkloadError> {
    let g = q.grains();
    let moved = delta * Rational::from_integer(g.into());
    if !moved.is_integer() {
        return Err(WorkloadError::NotGrainAligned(delta));
    }
    let mut left = moved.to_integer() as u64;
    let n = q.domain_size();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut counts = q.counts().to_vec();
    let mut donor = vec![false; n];
    for &i in &order {
        if left == 0 {
            break;
        }
        let take = counts[i].min(left);
        if take > 0 {
            counts[i] -= take;
            left -= take;
            donor[i] = true;
        }
    }
    let receivers: Vec<usize> = order.iter().copied().filter(|&i| !donor[i]).collect();
    if left > 0 || receivers.is_empty() && moved.to_integer() > 0 {
        return Err(WorkloadError::Infeasible(delta));
    }
    let total = moved.to_integer() as u64;
    if total > 0 {
        let (each, extra) = (total / receivers.len() as u64, total % receivers.len() as u64);
        for (k, &i) in receivers.iter().enumerate() {
            counts[i] += each + u64::from((k as u64) < extra);
        }
    }
    Ok(GrainDistribution::new(counts, g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{default_grains, tv_distance};
    use crate::rational::ratio;
    use crate::rng::stream_rng;

    #[test]
    fn exact_distance() {
        let mut rng = stream_rng(1, 0);
        for n in [2usize, 10, 1000] {
            let g = default_grains(n).max(100) / 100 * 100;
            let q = GrainDistribution::random(n, g, &mut rng).unwrap();
            for delta in [ratio(0, 1), ratio(3, 10), ratio(3, 5)] {
                match at_distance(&q, delta, &mut rng) {
                    Ok(d) => assert_eq!(tv_distance(&q, &d).unwrap(), delta),
                    Err(WorkloadError::Infeasible(_)) => assert_eq!(n, 2),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn misaligned_distance() {
        let q = GrainDistribution::uniform(4, 16).unwrap();
        assert!(matches!(
            at_distance(&q, ratio(1, 3), &mut stream_rng(0, 0)),
            Err(WorkloadError::NotGrainAligned(_))
        ));
    }
}
