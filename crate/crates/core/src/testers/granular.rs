//! Mixing with the uniform distribution and granularization to multiples of `1/m`, `m = 6N`.
//!
//! For a pdf `p` the mixed probability is `q' = p/2 + 1/(2N)`, so
//! `m q' = 3Np + 3` and the granular count is `m_x = floor(3Np + 3) >= 3`.
//! The kept fraction is `theta = m_x / (m q')`; the rest of the mass moves to
//! the extra element `N + 1`.

use super::{OracleError, RefOracle, TesterError};
use crate::dist::Sampler;
use crate::rational::{ratio, Rational};
use crate::rng::Rng;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng as _;

/// Pair `<x, j>` packed as `x * (m + 1) + j`.
pub type PairKey = u64;

pub fn mix_pdf(pdf: Rational, n: usize) -> Rational {
    pdf / 2 + ratio(1, 2 * n as u128)
}

/// `pdf(x)/2 + 1/(2N)`.
pub fn mix_half_uniform_pdf(oracle: &mut dyn RefOracle, x: usize) -> Result<Rational, OracleError> {
    let n = oracle.domain_size();
    Ok(mix_pdf(oracle.pdf(x)?, n))
}

/// A fair coin picks a draw from `d` or a uniform element of `[N]`.
pub fn mixed_sample<S: Sampler + ?Sized>(d: &S, n: usize, rng: &mut Rng) -> usize {
    if rng.gen::<bool>() {
        d.draw(rng)
    } else {
        rng.gen_range(1..=n)
    }
}

/// `floor(q' m) / (m q')`.
pub fn theta(q_prime: Rational, m: u64) -> Rational {
    let scaled = q_prime * Rational::from_integer(m.into());
    Rational::from_integer(scaled.floor().to_integer()) / scaled
}

/// `(3N u, 3v)` for `pdf = u/v`, so that `m q' = (3Nu + 3v) / v`.
fn scaled_parts(pdf: Rational, n: usize) -> (u128, u128) {
    let (u, v) = (*pdf.numer(), *pdf.denom());
    let three_n_u = u.checked_mul(3 * n as u128).expect("pdf denominators fit in 64 bits");
    (three_n_u, 3 * v)
}

/// `m_x = floor(6N q'(x))` for an element with the given pdf.
pub fn granular_count(pdf: Rational, n: usize) -> u64 {
    let (a, b) = scaled_parts(pdf, n);
    ((a + b) / pdf.denom()) as u64
}

/// Granularized view of the reference distribution: `m_x` for every queried
/// element and the count `m_{N+1}` assigned to the extra element.
#[derive(Clone, Debug)]
pub struct GranularizedView {
    n: usize,
    m: u64,
    counts: Vec<u64>,
    pdfs: Vec<Option<Rational>>,
    tail_count: u64,
}

impl GranularizedView {
    pub fn new(n: usize) -> Self {
        Self { n, m: 6 * n as u64, counts: vec![0; n + 1], pdfs: vec![None; n + 1], tail_count: 0 }
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn domain_size(&self) -> usize {
        self.n
    }

    /// Records the pdf of `x`; returns its granular count.
    pub fn record(&mut self, x: usize, pdf: Rational) -> u64 {
        let c = granular_count(pdf, self.n);
        self.counts[x] = c;
        self.pdfs[x] = Some(pdf);
        c
    }

    pub fn count(&self, x: usize) -> u64 {
        if x == self.n + 1 {
            self.tail_count
        } else {
            self.counts[x]
        }
    }

    pub fn theta(&self, x: usize) -> Option<Rational> {
        self.pdfs.get(x).copied().flatten().map(|p| theta(mix_pdf(p, self.n), self.m))
    }

    pub fn set_tail_count(&mut self, c: u64) {
        self.tail_count = c.min(self.m);
    }

    pub fn tail_count(&self) -> u64 {
        self.tail_count
    }

    /// Tail estimate as a probability (a multiple of `1/m`).
    pub fn tail_estimate(&self) -> Rational {
        ratio(self.tail_count.into(), self.m.into())
    }

    /// Keeps a sampled `x` with probability `theta_x`, otherwise remaps it to `N + 1`.
    pub fn filter(&self, x: usize, rng: &mut Rng) -> usize {
        let pdf = self.pdfs[x].expect("element was recorded");
        let (a, b) = scaled_parts(pdf, self.n);
        // theta = m_x v / (3Nu + 3v)
        let kept = u128::from(self.counts[x]) * pdf.denom();
        if rng.gen_range(0..a + b) < kept {
            x
        } else {
            self.n + 1
        }
    }
}

/// Uniform `j` in `[m_x]`, packed with `x`. For `x = N + 1` a tail count of 0 maps to `j = 1`.
pub fn pair_map(x: usize, view: &GranularizedView, rng: &mut Rng) -> Result<PairKey, TesterError> {
    let m_x = view.count(x);
    let j = if x == view.n + 1 {
        rng.gen_range(1..=m_x.max(1))
    } else if m_x == 0 {
        return Err(TesterError::Unreachable(x));
    } else {
        rng.gen_range(1..=m_x)
    };
    Ok(x as u64 * (view.m + 1) + j)
}

/// `m_{N+1} = m - sum_x m_x` from the pdfs of all `N` elements.
pub fn exact_tail_count(pdfs: &[Rational]) -> Result<u64, OracleError> {
    let n = pdfs.len();
    let m = 6 * n as u64;
    let total: u64 = pdfs.iter().map(|&p| granular_count(p, n)).sum();
    if pdfs.iter().copied().sum::<Rational>() != Rational::from_integer(1) {
        return Err(OracleError::NotAProbability(pdfs.iter().copied().sum()));
    }
    Ok(m - total)
}

/// Rounds the mean of `1 - theta` over pdfs of `Q'`-samples to a count out of `m`.
///
/// Each term is truncated to a multiple of `2^-64` before summing, so the
/// result can differ from exact rounding only when the exact mean lies within
/// `2^-64` of a rounding midpoint.
pub fn tail_count_from_estimate<I: IntoIterator<Item = Rational>>(n: usize, mixed_sample_pdfs: I) -> u64 {
    let m = 6 * n as u64;
    let mut sum = 0u128;
    let mut s = 0u128;
    for pdf in mixed_sample_pdfs {
        let (a, b) = scaled_parts(pdf, n);
        let v = *pdf.denom();
        let num = a % v;
        let den = a + b;
        sum += ((BigUint::from(num) << 64u32) / BigUint::from(den)).to_u128().expect("term is below 2^64");
        s += 1;
    }
    if s == 0 {
        return 0;
    }
    let scale = BigUint::from(s) << 64u32;
    let twice = BigUint::from(2 * u128::from(m)) * BigUint::from(sum) + &scale;
    let count = (twice / (BigUint::from(2u32) * scale)).to_u64().unwrap_or(u64::MAX);
    count.min(m)
}

/// Tail estimate from `s` draws of `Q' = Q/2 + U/2`, mixed verifier-side:
/// heads takes a sample of `Q`, tails a uniform element whose pdf is queried.
pub fn estimate_tail(oracle: &mut dyn RefOracle, s: usize, rng: &mut Rng) -> Result<Rational, OracleError> {
    let n = oracle.domain_size();
    let heads = (0..s).filter(|_| rng.gen::<bool>()).count();
    let uniform: Vec<usize> = (0..s - heads).map(|_| rng.gen_range(1..=n)).collect();
    let answer = oracle.query_batch(heads, &uniform, rng)?;
    let pdfs = answer.samples.iter().map(|&(_, p)| p).chain(answer.pdfs.iter().copied());
    Ok(ratio(tail_count_from_estimate(n, pdfs).into(), 6 * n as u128))
}

/// Rounds a tail probability to the nearest multiple of `1/m`, clamped to `[0, 1]`.
pub fn tail_count_from_estimate_value(estimate: Rational, m: u64) -> u64 {
    let scaled = estimate * Rational::from_integer(m.into());
    (scaled.round().to_integer() as u64).min(m)
}
