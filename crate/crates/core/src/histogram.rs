//! Geometric probability buckets and bucket histograms.
//!
//! For granularity `tau` over a domain of size `N`, bucket 0 holds every
//! probability below `tau/N`. A probability `p >= tau/N` lies in the interval
//! `[tau(1+tau)^j/N, tau(1+tau)^(j+1)/N)` for exactly one `j >= 0`; its bucket
//! is `max(j, 1)`, so the `j = 0` interval shares bucket 1 with `j = 1` and
//! bucket 0 keeps the meaning "negligible mass". The top bucket `J` is the
//! one containing probability 1.

use crate::dist::GrainDistribution;
use crate::rational::{ratio, to_f64, Rational};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HistogramError {
    #[error("a histogram estimate needs at least one sample")]
    NoSamples,
    #[error("granularity must lie in (0, 1)")]
    BadTau,
    #[error("probability {0} exceeds 1")]
    BadProbability(Rational),
}

fn check_tau(tau: Rational) -> Result<(), HistogramError> {
    if tau.is_zero() || tau >= Rational::one() {
        Err(HistogramError::BadTau)
    } else {
        Ok(())
    }
}

/// Bucket of `prob`, computed exactly.
pub fn bucket_index(prob: Rational, tau: Rational, n: usize) -> usize {
    assert!(!tau.is_zero() && tau < Rational::one(), "tau must lie in (0, 1)");
    let (u, v) = (BigUint::from(*prob.numer()), BigUint::from(*prob.denom()));
    let (a, b) = (BigUint::from(*tau.numer()), BigUint::from(*tau.denom()));
    let growth = &a + &b;
    // p >= tau (1+tau)^j / N  <=>  a (a+b)^j v <= u N b^(j+1)
    let mut lhs = &a * &v;
    let mut rhs = u * BigUint::from(n) * &b;
    if lhs > rhs {
        return 0;
    }
    let mut j = 0;
    loop {
        lhs *= &growth;
        rhs *= &b;
        if lhs > rhs {
            return j.max(1);
        }
        j += 1;
    }
}

/// Index `J` of the highest bucket, the one containing probability 1.
pub fn top_bucket(tau: Rational, n: usize) -> usize {
    bucket_index(Rational::one(), tau, n)
}

/// Integer bucket boundaries for probabilities with a fixed denominator `G`.
///
/// `thresholds[j]` is the least grain count `c` with `c/G >= tau(1+tau)^j/N`.
#[derive(Clone, Debug)]
pub struct BucketLayout {
    tau: Rational,
    n: usize,
    grains: u64,
    thresholds: Vec<u64>,
}

impl BucketLayout {
    pub fn new(tau: Rational, n: usize, grains: u64) -> Result<Self, HistogramError> {
        check_tau(tau)?;
        let (a, b) = (BigUint::from(*tau.numer()), BigUint::from(*tau.denom()));
        let growth = &a + &b;
        let g = BigUint::from(grains);
        let mut num = &g * &a;
        let mut den = BigUint::from(n) * &b;
        let mut thresholds = Vec::new();
        loop {
            let t = (&num + &den - 1u32) / &den;
            let above = t > g;
            thresholds.push(if above { grains + 1 } else { u64::try_from(t).expect("bounded by G") });
            if above {
                break;
            }
            num *= &growth;
            den *= &b;
        }
        Ok(Self { tau, n, grains, thresholds })
    }

    pub fn tau(&self) -> Rational {
        self.tau
    }

    pub fn num_buckets(&self) -> usize {
        self.bucket_of_count(self.grains) + 1
    }

    /// Bucket of probability `count / G`.
    pub fn bucket_of_count(&self, count: u64) -> usize {
        if count < self.thresholds[0] {
            return 0;
        }
        (self.thresholds.partition_point(|&t| t <= count) - 1).max(1)
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }
}

/// Per-bucket masses `p_j`, `j = 0..=J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketHistogram {
    pub tau: Rational,
    pub n: usize,
    pub masses: Vec<Rational>,
}

impl BucketHistogram {
    pub fn num_buckets(&self) -> usize {
        self.masses.len()
    }

    pub fn total(&self) -> Rational {
        self.masses.iter().copied().sum()
    }

    /// Endpoints `[lo, hi)` of the probability range covered by bucket `j >= 1`, clipped to 1.
    pub fn bounds(&self, j: usize) -> (f64, f64) {
        bucket_bounds(j, self.tau, self.n, self.num_buckets() - 1)
    }

    /// Geometric mean of the bucket's endpoints; 0 for bucket 0.
    pub fn representative(&self, j: usize) -> f64 {
        if j == 0 {
            return 0.0;
        }
        let (lo, hi) = self.bounds(j);
        (lo * hi).sqrt()
    }
}

/// Probability range of bucket `j >= 1` for the layout with top bucket `top`.
pub fn bucket_bounds(j: usize, tau: Rational, n: usize, top: usize) -> (f64, f64) {
    let t = to_f64(tau);
    let base = t / n as f64;
    let lo = if j <= 1 { base } else { base * (1.0 + t).powi(j as i32) };
    let hi = if j == top { 1.0 } else { base * (1.0 + t).powi(j as i32 + 1) };
    (lo, hi.min(1.0))
}

/// Exact bucket masses of `d`.
pub fn exact_histogram(d: &GrainDistribution, tau: Rational) -> Result<BucketHistogram, HistogramError> {
    let layout = BucketLayout::new(tau, d.domain_size(), d.grains())?;
    let mut grains = vec![0u64; layout.num_buckets()];
    for &c in d.counts() {
        grains[layout.bucket_of_count(c)] += c;
    }
    Ok(BucketHistogram {
        tau,
        n: d.domain_size(),
        masses: grains.into_iter().map(|g| ratio(g.into(), d.grains().into())).collect(),
    })
}

/// Histogram of sampled `(x, pdf(x))` pairs: `p_j` is the fraction of pairs whose pdf falls in bucket `j`.
pub fn estimate_histogram<I>(pairs: I, tau: Rational, n: usize) -> Result<BucketHistogram, HistogramError>
where
    I: IntoIterator<Item = (usize, Rational)>,
{
    check_tau(tau)?;
    let buckets = top_bucket(tau, n) + 1;
    let mut hits = vec![0u128; buckets];
    let mut cache: HashMap<Rational, usize> = HashMap::new();
    let mut total = 0u128;
    for (_, pdf) in pairs {
        if pdf > Rational::one() {
            return Err(HistogramError::BadProbability(pdf));
        }
        let j = *cache.entry(pdf).or_insert_with(|| bucket_index(pdf, tau, n));
        hits[j] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(HistogramError::NoSamples);
    }
    Ok(BucketHistogram { tau, n, masses: hits.into_iter().map(|h| ratio(h, total)).collect() })
}
