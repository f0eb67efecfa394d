//! The identity tester: is `D = Q`, or `delta_TV(D, Q) > eps`?
//!
//! `D` and `Q` are mixed with the uniform distribution, granularized to
//! multiples of `1/m` with `m = 6N`, and mapped to pairs `<x, j>` so that
//! `D = Q` becomes uniformity over a set of size `m`, tested with distance
//! parameter `eps/3`.
//!
//! All of the tester's randomness before it sees `Q` (the `D` draws, the
//! mixing coins, the uniform elements) is fixed in an [`IdentityPlan`], so
//! that every oracle query of one run fits into one batch.

use super::granular::{exact_tail_count, mixed_sample, pair_map, tail_count_from_estimate, GranularizedView};
use super::uniformity::{uniformity_test, UniformityOutcome};
use super::{BatchAnswer, OracleError, RefOracle, TesterError};
use crate::constants::Constants;
use crate::dist::{CountingSampler, Sampler};
use crate::rational::{to_f64, Rational};
use crate::rng::Rng;
use num_traits::One;
use rand::Rng as _;

/// How `Q''(N+1)` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailMode {
    /// Average `1 - theta` over `ceil(c_tail / eps^4)` draws of `Q'`.
    Estimate,
    /// Query the pdf of every element and sum exactly.
    Exact,
    /// `Exact` when the estimate would need at least `N` draws, else `Estimate`.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityParams {
    pub c_id: f64,
    pub c_tail: f64,
    pub tail_mode: TailMode,
}

impl IdentityParams {
    pub fn from_constants(c: &Constants) -> Self {
        Self { c_id: c.c_id, c_tail: c.c_tail, tail_mode: TailMode::Auto }
    }
}

impl Default for IdentityParams {
    fn default() -> Self {
        Self::from_constants(Constants::builtin())
    }
}

/// `ceil(c_id * sqrt(6(N+1)) * (3/eps)^2)` mixed draws.
pub fn d_sample_budget(n: usize, eps: Rational, c_id: f64) -> u64 {
    (c_id * (6.0 * (n as f64 + 1.0)).sqrt() * (3.0 / to_f64(eps)).powi(2)).ceil() as u64
}

/// `ceil(c_tail / eps^4)`.
pub fn tail_sample_budget(eps: Rational, c_tail: f64) -> u64 {
    (c_tail / to_f64(eps).powi(4)).ceil() as u64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityOutcome {
    pub accept: bool,
    pub collisions: u64,
    pub pairs: u128,
    /// Draws taken from `D`.
    pub d_samples: u64,
    /// Samples requested from `Q`.
    pub q_samples: u64,
    /// pdf queries sent to `Q`.
    pub q_queries: u64,
    /// `m_{N+1}`, the count given to the extra element.
    pub tail_count: u64,
}

#[derive(Clone, Debug)]
pub struct IdentityPlan {
    n: usize,
    eps: Rational,
    exact_tail: bool,
    heads: usize,
    tail_uniform: Vec<usize>,
    draws: Vec<usize>,
    d_samples: u64,
}

impl IdentityPlan {
    /// Fixes every coin the tester flips before seeing `Q`, drawing from `d`.
    pub fn new<S: Sampler + ?Sized>(n: usize, eps: Rational, params: &IdentityParams, d: &S, rng: &mut Rng) -> Self {
        let s_tail = tail_sample_budget(eps, params.c_tail);
        let exact_tail = match params.tail_mode {
            TailMode::Exact => true,
            TailMode::Estimate => false,
            TailMode::Auto => s_tail >= n as u64,
        };
        let (heads, tail_uniform) = if exact_tail {
            (0, Vec::new())
        } else {
            let heads = (0..s_tail).filter(|_| rng.gen::<bool>()).count();
            (heads, (0..s_tail as usize - heads).map(|_| rng.gen_range(1..=n)).collect())
        };
        let counted = CountingSampler::new(d);
        let s_d = d_sample_budget(n, eps, params.c_id);
        let draws = (0..s_d).map(|_| mixed_sample(&counted, n, rng)).collect();
        Self { n, eps, exact_tail, heads, tail_uniform, draws, d_samples: counted.count() }
    }

    pub fn d_samples(&self) -> u64 {
        self.d_samples
    }

    pub fn exact_tail(&self) -> bool {
        self.exact_tail
    }

    /// Samples of `Q` the run needs.
    pub fn sample_requests(&self) -> usize {
        self.heads
    }

    /// Elements whose pdf the run needs, in the order answers are expected.
    pub fn element_requests(&self) -> Vec<usize> {
        if self.exact_tail {
            (1..=self.n).collect()
        } else {
            self.tail_uniform.iter().chain(&self.draws).copied().collect()
        }
    }

    /// Runs the collision test on the answers to this plan's requests.
    pub fn decide(&self, answer: &BatchAnswer, rng: &mut Rng) -> Result<IdentityOutcome, TesterError> {
        let n = self.n;
        let expected = if self.exact_tail { n } else { self.tail_uniform.len() + self.draws.len() };
        if answer.samples.len() != self.heads || answer.pdfs.len() != expected {
            return Err(OracleError::Reject(crate::verdict::RejectReason::Malformed).into());
        }
        for &p in answer.pdfs.iter().chain(answer.samples.iter().map(|(_, p)| p)) {
            if p > Rational::one() {
                return Err(OracleError::NotAProbability(p).into());
            }
        }
        if let Some(&(x, _)) = answer.samples.iter().find(|&&(x, _)| x == 0 || x > n) {
            return Err(OracleError::Domain(crate::dist::DistError::ElementOutOfRange { x, n }).into());
        }
        let mut view = GranularizedView::new(n);
        if self.exact_tail {
            for (i, &p) in answer.pdfs.iter().enumerate() {
                view.record(i + 1, p);
            }
            view.set_tail_count(exact_tail_count(&answer.pdfs)?);
        } else {
            let k = self.tail_uniform.len();
            let tail_pdfs = answer.samples.iter().map(|&(_, p)| p).chain(answer.pdfs[..k].iter().copied());
            view.set_tail_count(tail_count_from_estimate(n, tail_pdfs));
            for (&x, &p) in self.draws.iter().zip(&answer.pdfs[k..]) {
                view.record(x, p);
            }
        }
        let mut keys = Vec::with_capacity(self.draws.len());
        for &x in &self.draws {
            let y = view.filter(x, rng);
            keys.push(pair_map(y, &view, rng)?);
        }
        let UniformityOutcome { accept, collisions, pairs } = uniformity_test(&mut keys, view.m(), self.eps / 3)?;
        Ok(IdentityOutcome {
            accept,
            collisions,
            pairs,
            d_samples: self.d_samples,
            q_samples: self.heads as u64,
            q_queries: expected as u64,
            tail_count: view.tail_count(),
        })
    }
}

/// Plans one run, queries `oracle` in a single batch, and decides.
pub fn identity_test<S: Sampler + ?Sized>(
    oracle: &mut dyn RefOracle,
    d: &S,
    eps: Rational,
    params: &IdentityParams,
    rng: &mut Rng,
) -> Result<IdentityOutcome, TesterError> {
    let n = oracle.domain_size();
    let plan = IdentityPlan::new(n, eps, params, d, rng);
    let answer = oracle.query_batch(plan.sample_requests(), &plan.element_requests(), rng)?;
    plan.decide(&answer, rng)
}

/// Strict majority of accepting runs.
pub fn majority(accepts: &[bool]) -> bool {
    2 * accepts.iter().filter(|&&a| a).count() > accepts.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::GrainDistribution;
    use crate::rational::ratio;
    use crate::rng::stream_rng;
    use crate::testers::LocalOracle;

    fn params(mode: TailMode) -> IdentityParams {
        IdentityParams { c_id: 6.0, c_tail: 4.0, tail_mode: mode }
    }

    #[test]
    fn budgets() {
        // sqrt(6 * 1001) * 144 * 16 = 178,556.7
        assert_eq!(d_sample_budget(1000, ratio(1, 4), 16.0), 178_557);
        assert_eq!(tail_sample_budget(ratio(1, 4), 4.0), 1024);
    }

    #[test]
    fn point_mass_on_two_elements_accepts() {
        let q = GrainDistribution::point_mass(2, 1, 4).unwrap();
        for seed in 0..20 {
            let mut rng = stream_rng(seed, 0);
            let out =
                identity_test(&mut LocalOracle::new(&q), &q, ratio(1, 2), &params(TailMode::Exact), &mut rng).unwrap();
            assert!(out.accept, "seed {seed}: {out:?}");
        }
    }

    #[test]
    fn far_pair_rejects_and_counters_respect_budgets() {
        let n = 64;
        let q = GrainDistribution::uniform(n, 4096).unwrap();
        let d = GrainDistribution::point_mass(n, 1, 4096).unwrap();
        for mode in [TailMode::Exact, TailMode::Estimate] {
            let mut rng = stream_rng(3, 0);
            let p = params(mode);
            let eps = ratio(1, 2);
            let out = identity_test(&mut LocalOracle::new(&q), &d, eps, &p, &mut rng).unwrap();
            assert!(!out.accept);
            assert!(out.d_samples <= d_sample_budget(n, eps, p.c_id));
            assert!(out.q_samples <= tail_sample_budget(eps, p.c_tail));
        }
    }

    #[test]
    fn auto_mode_switches_on_domain_size() {
        let q = GrainDistribution::uniform(8, 64).unwrap();
        let mut rng = stream_rng(0, 0);
        let p = params(TailMode::Auto);
        assert!(IdentityPlan::new(8, ratio(1, 2), &p, &q, &mut rng).exact_tail());
        let big = GrainDistribution::uniform(4096, 4096).unwrap();
        assert!(!IdentityPlan::new(4096, ratio(1, 2), &p, &big, &mut rng).exact_tail());
    }

    #[test]
    fn majority_vote() {
        assert!(majority(&[true, false, true]));
        assert!(!majority(&[true, false]));
        assert!(!majority(&[]));
    }
}
