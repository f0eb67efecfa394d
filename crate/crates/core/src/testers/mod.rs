//! Identity testing against a reference oracle, via reduction to uniformity.
//!
//! The same tester code runs against a local [`GrainDistribution`] and, inside
//! the protocol, against verified openings of a committed distribution.

mod granular;
mod identity;
mod uniformity;

pub use granular::{
    estimate_tail, exact_tail_count, granular_count, mix_half_uniform_pdf, mix_pdf, mixed_sample, pair_map,
    tail_count_from_estimate, tail_count_from_estimate_value, theta, GranularizedView, PairKey,
};
pub use identity::{
    d_sample_budget, identity_test, majority, tail_sample_budget, IdentityOutcome, IdentityParams, IdentityPlan,
    TailMode,
};
pub use uniformity::{collision_count, uniformity_budget, uniformity_test, UniformityOutcome};

use crate::dist::{DistError, GrainDistribution};
use crate::rational::Rational;
use crate::rng::Rng;
use crate::verdict::RejectReason;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TesterError {
    #[error("the collision statistic needs at least two samples")]
    TooFewSamples,
    #[error("oracle failed: {0}")]
    Oracle(#[from] OracleError),
    #[error("sampled element {0} has no granular mass")]
    Unreachable(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("reference oracle rejected: {0}")]
    Reject(RejectReason),
    #[error(transparent)]
    Domain(#[from] DistError),
    #[error("oracle answered {0} for a probability")]
    NotAProbability(Rational),
}

/// Answers to one batch: fresh samples with their pdfs, and the pdf of each requested element, positionally.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BatchAnswer {
    pub samples: Vec<(usize, Rational)>,
    pub pdfs: Vec<Rational>,
}

/// Query and sample access to a reference distribution `Q` over `[N]`.
pub trait RefOracle {
    fn domain_size(&self) -> usize;
    fn pdf(&mut self, x: usize) -> Result<Rational, OracleError>;
    fn cdf(&mut self, x: usize) -> Result<Rational, OracleError>;
    /// A fresh sample with its pdf.
    fn sample(&mut self, rng: &mut Rng) -> Result<(usize, Rational), OracleError>;

    /// `samples` fresh draws and the pdf of every listed element. Protocol
    /// oracles override this to send everything in one message.
    fn query_batch(&mut self, samples: usize, elements: &[usize], rng: &mut Rng) -> Result<BatchAnswer, OracleError> {
        let samples = (0..samples).map(|_| self.sample(rng)).collect::<Result<_, _>>()?;
        let pdfs = elements.iter().map(|&x| self.pdf(x)).collect::<Result<_, _>>()?;
        Ok(BatchAnswer { samples, pdfs })
    }
}

/// A [`RefOracle`] backed by a known distribution, counting its use.
#[derive(Clone, Debug)]
pub struct LocalOracle<'a> {
    q: &'a GrainDistribution,
    pub queries: u64,
    pub samples: u64,
}

impl<'a> LocalOracle<'a> {
    pub fn new(q: &'a GrainDistribution) -> Self {
        Self { q, queries: 0, samples: 0 }
    }
}

impl RefOracle for LocalOracle<'_> {
    fn domain_size(&self) -> usize {
        self.q.domain_size()
    }

    fn pdf(&mut self, x: usize) -> Result<Rational, OracleError> {
        self.queries += 1;
        Ok(self.q.pdf(x)?)
    }

    fn cdf(&mut self, x: usize) -> Result<Rational, OracleError> {
        self.queries += 1;
        Ok(self.q.cdf(x)?)
    }

    fn sample(&mut self, rng: &mut Rng) -> Result<(usize, Rational), OracleError> {
        self.samples += 1;
        let x = self.q.sample(rng);
        Ok((x, self.q.pdf(x)?))
    }
}
