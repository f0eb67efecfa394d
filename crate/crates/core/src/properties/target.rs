use super::{GeneralProperty, PropertyError};
use crate::dist::{tv_distance, GrainDistribution};
use crate::rational::Rational;

/// The single distribution `target`.
#[derive(Clone, Debug)]
pub struct FixedTarget {
    target: GrainDistribution,
}

impl FixedTarget {
    pub fn new(target: GrainDistribution) -> Self {
        Self { target }
    }

    pub fn target(&self) -> &GrainDistribution {
        &self.target
    }
}

impl GeneralProperty for FixedTarget {
    fn name(&self) -> &'static str {
        "fixed-target"
    }

    /// Exact distance; `rho` is not needed.
    fn dist(&self, _n: usize, q: &GrainDistribution, _rho: Rational) -> Result<Rational, PropertyError> {
        Ok(tv_distance(q, &self.target)?)
    }
}
