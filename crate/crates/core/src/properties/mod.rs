//! Distribution properties: label-invariant ones decided from bucket
//! histograms, and general ones with a distance approximator.

pub mod label_invariant;
mod support;
mod target;
mod uniformity;

pub use label_invariant::{
    argument_parameters, histogram_budget, run_label_invariant_argument, LabelInvariantConfig, LabelInvariantOutcome,
};
pub use support::SupportSize;
pub use target::FixedTarget;
pub use uniformity::Uniformity;

use crate::dist::{DistError, GrainDistribution};
use crate::histogram::BucketHistogram;
use crate::rational::Rational;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PropertyError {
    #[error("unknown property {0:?}")]
    Unknown(String),
    #[error("property {0} needs parameter {1}")]
    MissingParameter(&'static str, &'static str),
    #[error(transparent)]
    Dist(#[from] DistError),
}

/// A property closed under relabeling the domain.
pub trait LabelInvariantProperty: Send + Sync {
    fn name(&self) -> &'static str;
    /// Accepts when some distribution with histogram `h` is `tau`-close to the
    /// property, rejects when every such distribution is `2 tau`-far.
    fn decide(&self, tau: Rational, n: usize, h: &BucketHistogram) -> bool;
    /// A member of the property within `delta + rho` of `d`, given that `d` is `delta`-close.
    fn find(&self, n: usize, delta: Rational, rho: Rational, d: &GrainDistribution) -> GrainDistribution;
}

/// A property with a distance approximator.
pub trait GeneralProperty: Send + Sync {
    fn name(&self) -> &'static str;
    /// Distance from `q` to the property, within `rho`.
    fn dist(&self, n: usize, q: &GrainDistribution, rho: Rational) -> Result<Rational, PropertyError>;
}

/// Parameters a property may need when built by name.
#[derive(Clone, Debug, Default)]
pub struct PropertyParams {
    pub support_bound: Option<usize>,
    pub target: Option<GrainDistribution>,
}

pub const LABEL_INVARIANT_NAMES: [&str; 2] = ["uniformity", "support-size"];
pub const GENERAL_NAMES: [&str; 3] = ["fixed-target", "uniformity", "support-size"];

pub fn label_invariant(name: &str, params: &PropertyParams) -> Result<Box<dyn LabelInvariantProperty>, PropertyError> {
    match name {
        "uniformity" => Ok(Box::new(Uniformity)),
        "support-size" => Ok(Box::new(SupportSize {
            bound: params.support_bound.ok_or(PropertyError::MissingParameter("support-size", "support bound"))?,
        })),
        other => Err(PropertyError::Unknown(other.to_string())),
    }
}

pub fn general(name: &str, params: &PropertyParams) -> Result<Box<dyn GeneralProperty>, PropertyError> {
    match name {
        "fixed-target" => Ok(Box::new(FixedTarget::new(
            params.target.clone().ok_or(PropertyError::MissingParameter("fixed-target", "target distribution"))?,
        ))),
        "uniformity" => Ok(Box::new(Uniformity)),
        "support-size" => Ok(Box::new(SupportSize {
            bound: params.support_bound.ok_or(PropertyError::MissingParameter("support-size", "support bound"))?,
        })),
        other => Err(PropertyError::Unknown(other.to_string())),
    }
}

/// Estimated element count `p_j / q_j` and representative probability of each nonzero bucket `j >= 1`.
pub(crate) fn bucket_estimates(h: &BucketHistogram) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
    (1..h.num_buckets()).filter_map(move |j| {
        let p = crate::rational::to_f64(h.masses[j]);
        let q = h.representative(j);
        (p > 0.0 && q > 0.0).then_some((j, p, q))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn registry() {
        assert_eq!(label_invariant("uniformity", &PropertyParams::default()).unwrap().name(), "uniformity");
        assert!(matches!(
            label_invariant("support-size", &PropertyParams::default()),
            Err(PropertyError::MissingParameter(..))
        ));
        assert!(general("entropy", &PropertyParams::default()).is_err());
        let t = GrainDistribution::uniform(4, 16).unwrap();
        let p = general("fixed-target", &PropertyParams { target: Some(t.clone()), ..Default::default() }).unwrap();
        assert_eq!(p.dist(4, &t, ratio(0, 1)).unwrap(), ratio(0, 1));
    }

    #[test]
    fn soundness_chain() {
        // eps = dc + gap/10 and find's slack tau = gap/10 keep accepted inputs below df
        for (a, b) in [(1u128, 9u128), (0, 1), (5, 45), (33, 34), (1, 1000)] {
            let (dc, df) = (ratio(a, 100), ratio(b, 100));
            let (eps, tau) = argument_parameters(dc, df);
            assert_eq!(eps, dc + (df - dc) / 10);
            assert_eq!(tau, (df - dc) / 10);
            assert!(dc + tau + tau < df);
        }
    }
}
