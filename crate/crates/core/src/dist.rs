//! Grain distributions: exact discrete distributions over `[N] = {1, ..., N}`.
//!
//! Every probability is `counts[x] / G` for a shared integer denominator `G`.
//! Elements are 1-based throughout the public API.

use crate::rational::{ratio, Rational};
use crate::rng::Rng;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistError {
    #[error("domain must contain at least one element")]
    EmptyDomain,
    #[error("denominator must be in 1..2^63, got {0}")]
    BadDenominator(u64),
    #[error("counts sum to {sum}, expected {grains}")]
    SumMismatch { sum: u128, grains: u64 },
    #[error("element {x} outside [1, {n}]")]
    ElementOutOfRange { x: usize, n: usize },
    #[error("quantile level must lie in (0, 1]")]
    MuOutOfRange,
    #[error("domain sizes differ: {0} vs {1}")]
    DomainMismatch(usize, usize),
    #[error("{0} grains cannot be split evenly over {1} elements")]
    NotDivisible(u64, usize),
    #[error("malformed encoding: {0}")]
    Decode(&'static str),
}

/// Default grain count `2^ceil(2 log2 N)`, the smallest power of two that is at least `N^2`.
pub fn default_grains(n: usize) -> u64 {
    let n = n as u64;
    n.checked_mul(n)
        .and_then(u64::checked_next_power_of_two)
        .expect("domain too large for the default denominator")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrainDistribution {
    counts: Vec<u64>,
    grains: u64,
    /// `prefix[i]` is the grain count of elements `1..=i+1`.
    prefix: Vec<u64>,
}

impl GrainDistribution {
    pub fn new(counts: Vec<u64>, grains: u64) -> Result<Self, DistError> {
        if counts.is_empty() {
            return Err(DistError::EmptyDomain);
        }
        if grains == 0 || grains >= 1 << 63 {
            return Err(DistError::BadDenominator(grains));
        }
        let sum: u128 = counts.iter().map(|&c| u128::from(c)).sum();
        if sum != u128::from(grains) {
            return Err(DistError::SumMismatch { sum, grains });
        }
        let prefix = counts
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        Ok(Self { counts, grains, prefix })
    }

    /// Denominator taken as the sum of `counts`.
    pub fn from_counts(counts: Vec<u64>) -> Result<Self, DistError> {
        let sum: u128 = counts.iter().map(|&c| u128::from(c)).sum();
        let grains = u64::try_from(sum).map_err(|_| DistError::BadDenominator(u64::MAX))?;
        Self::new(counts, grains)
    }

    /// Uniform distribution; requires `n | grains`.
    pub fn uniform(n: usize, grains: u64) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::EmptyDomain);
        }
        if grains % n as u64 != 0 {
            return Err(DistError::NotDivisible(grains, n));
        }
        Self::new(vec![grains / n as u64; n], grains)
    }

    /// `grains` spread as evenly as possible, the first `grains mod n` elements taking one extra.
    pub fn balanced(n: usize, grains: u64) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::EmptyDomain);
        }
        let (q, r) = grains.div_rem(&(n as u64));
        let counts = (0..n as u64).map(|i| q + u64::from(i < r)).collect();
        Self::new(counts, grains)
    }

    pub fn point_mass(n: usize, x: usize, grains: u64) -> Result<Self, DistError> {
        if x == 0 || x > n {
            return Err(DistError::ElementOutOfRange { x, n });
        }
        let mut counts = vec![0; n];
        counts[x - 1] = grains;
        Self::new(counts, grains)
    }

    /// Random distribution with i.i.d. uniform weights, rounded to grains by largest remainder.
    pub fn random(n: usize, grains: u64, rng: &mut Rng) -> Result<Self, DistError> {
        if n == 0 {
            return Err(DistError::EmptyDomain);
        }
        let weights: Vec<u128> = (0..n).map(|_| u128::from(rng.gen::<u32>())).collect();
        let total: u128 = weights.iter().sum::<u128>().max(1);
        let g = u128::from(grains);
        let mut counts: Vec<u64> = weights.iter().map(|&w| (w * g / total) as u64).collect();
        let assigned: u64 = counts.iter().sum();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(weights[i] * g % total), i));
        for &i in order.iter().cycle().take((grains - assigned) as usize) {
            counts[i] += 1;
        }
        Self::new(counts, grains)
    }

    pub fn domain_size(&self) -> usize {
        self.counts.len()
    }

    pub fn grains(&self) -> u64 {
        self.grains
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    fn check(&self, x: usize) -> Result<(), DistError> {
        if x == 0 || x > self.counts.len() {
            Err(DistError::ElementOutOfRange { x, n: self.counts.len() })
        } else {
            Ok(())
        }
    }

    /// Grain count of `x`.
    pub fn count(&self, x: usize) -> Result<u64, DistError> {
        self.check(x)?;
        Ok(self.counts[x - 1])
    }

    /// Grain count of elements `1..=x`; `x = 0` gives 0.
    pub fn cdf_grains(&self, x: usize) -> Result<u64, DistError> {
        if x == 0 {
            return Ok(0);
        }
        self.check(x)?;
        Ok(self.prefix[x - 1])
    }

    pub fn pdf(&self, x: usize) -> Result<Rational, DistError> {
        Ok(ratio(self.count(x)?.into(), self.grains.into()))
    }

    pub fn cdf(&self, x: usize) -> Result<Rational, DistError> {
        self.check(x)?;
        Ok(ratio(self.cdf_grains(x)?.into(), self.grains.into()))
    }

    /// Smallest `x` whose cumulative grain count reaches `g`, for `g` in `1..=G`.
    pub fn quantile_grain(&self, g: u64) -> Result<usize, DistError> {
        if g == 0 || g > self.grains {
            return Err(DistError::MuOutOfRange);
        }
        Ok(self.prefix.partition_point(|&p| p < g) + 1)
    }

    /// Smallest `x` with `cdf(x) >= mu`.
    pub fn quantile(&self, mu: Rational) -> Result<usize, DistError> {
        self.quantile_grain(grain_threshold(mu, self.grains)?)
    }

    /// Uniform grain index in `[G]`, mapped through the quantile function.
    pub fn sample(&self, rng: &mut Rng) -> usize {
        let g = rng.gen_range(1..=self.grains);
        self.prefix.partition_point(|&p| p < g) + 1
    }

    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Same grains, with the elements relabelled so that element `perm[i]` receives `counts[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, DistError> {
        let n = self.counts.len();
        let mut counts = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            if p == 0 || p > n {
                return Err(DistError::ElementOutOfRange { x: p, n });
            }
            counts[p - 1] = self.counts[i];
        }
        Self::new(counts, self.grains)
    }

    /// Canonical encoding: little-endian `N`, `G`, then `N` counts, all 64-bit.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 8 * self.counts.len());
        out.extend_from_slice(&(self.counts.len() as u64).to_le_bytes());
        out.extend_from_slice(&self.grains.to_le_bytes());
        for c in &self.counts {
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DistError> {
        let word = |i: usize| -> Result<u64, DistError> {
            bytes
                .get(8 * i..8 * i + 8)
                .map(|b| u64::from_le_bytes(b.try_into().unwrap()))
                .ok_or(DistError::Decode("truncated"))
        };
        let n = usize::try_from(word(0)?).map_err(|_| DistError::Decode("domain size"))?;
        let grains = word(1)?;
        if n.checked_add(2).and_then(|w| w.checked_mul(8)) != Some(bytes.len()) {
            return Err(DistError::Decode("length does not match domain size"));
        }
        let counts = (0..n).map(|i| word(2 + i)).collect::<Result<_, _>>()?;
        Self::new(counts, grains)
    }
}

/// `ceil(mu * G)`: the grain index whose quantile equals `quantile(mu)`.
pub fn grain_threshold(mu: Rational, grains: u64) -> Result<u64, DistError> {
    if mu.is_zero() || mu > Rational::from_integer(1) {
        return Err(DistError::MuOutOfRange);
    }
    let (n, d) = (*mu.numer(), *mu.denom());
    let g = match n.checked_mul(u128::from(grains)) {
        Some(p) => p.div_ceil(d),
        None => {
            let p = BigUint::from(n) * BigUint::from(grains);
            let d = BigUint::from(d);
            ((&p + &d - 1u32) / d).to_u128().expect("bounded by G")
        }
    };
    Ok(g as u64)
}

/// Exact total variation distance over the common denominator.
pub fn tv_distance(p: &GrainDistribution, q: &GrainDistribution) -> Result<Rational, DistError> {
    if p.domain_size() != q.domain_size() {
        return Err(DistError::DomainMismatch(p.domain_size(), q.domain_size()));
    }
    let (gp, gq) = (u128::from(p.grains), u128::from(q.grains));
    let l = gp.lcm(&gq);
    let (sp, sq) = (l / gp, l / gq);
    let sum: u128 = p
        .counts
        .iter()
        .zip(&q.counts)
        .map(|(&a, &b)| (u128::from(a) * sp).abs_diff(u128::from(b) * sq))
        .sum();
    Ok(ratio(sum, 2 * l))
}

/// Sample access to a distribution over `[N]`.
pub trait Sampler {
    fn domain_size(&self) -> usize;
    fn draw(&self, rng: &mut Rng) -> usize;
}

impl Sampler for GrainDistribution {
    fn domain_size(&self) -> usize {
        self.counts.len()
    }

    fn draw(&self, rng: &mut Rng) -> usize {
        self.sample(rng)
    }
}

impl<S: Sampler + ?Sized> Sampler for &S {
    fn domain_size(&self) -> usize {
        (**self).domain_size()
    }

    fn draw(&self, rng: &mut Rng) -> usize {
        (**self).draw(rng)
    }
}

/// Wraps a sampler and counts its draws.
pub struct CountingSampler<'a, S: ?Sized> {
    inner: &'a S,
    count: std::cell::Cell<u64>,
}

impl<'a, S: Sampler + ?Sized> CountingSampler<'a, S> {
    pub fn new(inner: &'a S) -> Self {
        Self { inner, count: std::cell::Cell::new(0) }
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }
}

impl<S: Sampler + ?Sized> Sampler for CountingSampler<'_, S> {
    fn domain_size(&self) -> usize {
        self.inner.domain_size()
    }

    fn draw(&self, rng: &mut Rng) -> usize {
        self.count.set(self.count.get() + 1);
        self.inner.draw(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    fn example() -> GrainDistribution {
        GrainDistribution::new(vec![4, 4, 8, 0], 16).unwrap()
    }

    #[test]
    fn tv_examples() {
        let a = GrainDistribution::new(vec![1, 0], 1).unwrap();
        let b = GrainDistribution::new(vec![0, 1], 1).unwrap();
        assert_eq!(tv_distance(&a, &b).unwrap(), ratio(1, 1));
        assert_eq!(tv_distance(&a, &a).unwrap(), ratio(0, 1));
        let h = GrainDistribution::new(vec![1, 1], 2).unwrap();
        let q = GrainDistribution::new(vec![1, 3], 4).unwrap();
        assert_eq!(tv_distance(&h, &q).unwrap(), ratio(1, 4));
        let c = GrainDistribution::new(vec![1, 2, 3], 6).unwrap();
        assert_eq!(tv_distance(&a, &c), Err(DistError::DomainMismatch(2, 3)));
    }

    #[test]
    fn cdf_examples() {
        let d = example();
        assert_eq!(d.cdf(2).unwrap(), ratio(8, 16));
        assert_eq!(d.cdf(3).unwrap(), ratio(1, 1));
        assert_eq!(d.cdf(4).unwrap(), ratio(1, 1));
        assert!(d.cdf(5).is_err());
        assert!(d.cdf(0).is_err());
    }

    #[test]
    fn quantile_examples() {
        let d = example();
        assert_eq!(d.quantile(ratio(5, 16)).unwrap(), 2);
        assert_eq!(d.quantile(ratio(1, 1)).unwrap(), 3);
        assert_eq!(d.quantile(ratio(4, 16)).unwrap(), 1);
        assert_eq!(d.quantile(ratio(0, 1)), Err(DistError::MuOutOfRange));
        assert_eq!(d.quantile(ratio(17, 16)), Err(DistError::MuOutOfRange));
    }

    #[test]
    fn quantile_skips_zero_mass() {
        let d = GrainDistribution::new(vec![0, 3, 0, 0, 1], 4).unwrap();
        for g in 1..=4 {
            let x = d.quantile_grain(g).unwrap();
            assert!(d.count(x).unwrap() > 0);
        }
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(GrainDistribution::new(vec![], 1), Err(DistError::EmptyDomain));
        assert!(matches!(GrainDistribution::new(vec![1, 1], 3), Err(DistError::SumMismatch { .. })));
        assert_eq!(GrainDistribution::uniform(3, 16), Err(DistError::NotDivisible(16, 3)));
        assert_eq!(GrainDistribution::balanced(3, 16).unwrap().counts(), &[6, 5, 5]);
    }

    #[test]
    fn default_grain_counts() {
        assert_eq!(default_grains(1), 1);
        assert_eq!(default_grains(3), 16);
        assert_eq!(default_grains(256), 1 << 16);
        assert_eq!(default_grains(1000), 1 << 20);
        assert_eq!(default_grains(1024), 1 << 20);
        assert_eq!(default_grains(1 << 20), 1 << 40);
    }

    #[test]
    fn point_mass_sampling() {
        let d = GrainDistribution::point_mass(5, 3, 25).unwrap();
        let mut rng = stream_rng(1, 0);
        assert!((0..1000).all(|_| d.sample(&mut rng) == 3));
    }

    #[test]
    fn uniform_frequencies_within_five_sigma() {
        let n = 16;
        let d = GrainDistribution::uniform(n, 256).unwrap();
        let mut rng = stream_rng(2, 0);
        let draws = 100_000u32;
        let mut hits = vec![0u32; n];
        for _ in 0..draws {
            hits[d.sample(&mut rng) - 1] += 1;
        }
        let p = 1.0 / n as f64;
        let sigma = (f64::from(draws) * p * (1.0 - p)).sqrt();
        for h in hits {
            assert!((f64::from(h) - f64::from(draws) * p).abs() <= 5.0 * sigma);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let d = example();
        let a: Vec<usize> = {
            let mut r = stream_rng(9, 3);
            (0..50).map(|_| d.sample(&mut r)).collect()
        };
        let b: Vec<usize> = {
            let mut r = stream_rng(9, 3);
            (0..50).map(|_| d.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn encoding_round_trip() {
        let d = example();
        let bytes = d.to_bytes();
        assert_eq!(bytes.len(), 16 + 32);
        assert_eq!(&bytes[..8], &4u64.to_le_bytes());
        assert_eq!(GrainDistribution::from_bytes(&bytes).unwrap(), d);
        assert!(GrainDistribution::from_bytes(&bytes[..40]).is_err());
    }

    #[test]
    fn random_is_valid() {
        let mut rng = stream_rng(3, 0);
        for n in [1, 2, 7, 100] {
            let d = GrainDistribution::random(n, default_grains(n), &mut rng).unwrap();
            assert_eq!(d.counts().iter().sum::<u64>(), d.grains());
        }
    }

    #[test]
    fn huge_denominator_threshold() {
        let mu = ratio(u128::MAX / 3, u128::MAX / 2);
        let g = grain_threshold(mu, 1 << 40).unwrap();
        let exact = (BigUint::from(u128::MAX / 3) << 40u32) / BigUint::from(u128::MAX / 2);
        assert!(g == exact.to_u64().unwrap() || g == exact.to_u64().unwrap() + 1);
    }
}
