//! Collision-based uniformity testing.

use super::TesterError;
use crate::rational::{to_f64, Rational};
use num_bigint::BigUint;

/// `ceil(c_unif * sqrt(m) / eps^2)`.
pub fn uniformity_budget(m: u64, eps: Rational, c_unif: f64) -> u64 {
    (c_unif * (m as f64).sqrt() / to_f64(eps).powi(2)).ceil() as u64
}

/// Number of colliding pairs among `keys`. Sorts `keys` in place.
pub fn collision_count(keys: &mut [u64]) -> u64 {
    keys.sort_unstable();
    let mut total = 0u64;
    let mut run = 0u64;
    for i in 0..keys.len() {
        if i > 0 && keys[i] == keys[i - 1] {
            run += 1;
            total += run;
        } else {
            run = 0;
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniformityOutcome {
    pub accept: bool,
    pub collisions: u64,
    pub pairs: u128,
}

/// Accepts iff the fraction of colliding pairs is at most `(1 + eps^2/2) / m`.
pub fn uniformity_test(keys: &mut [u64], m: u64, eps: Rational) -> Result<UniformityOutcome, TesterError> {
    let s = keys.len() as u128;
    if s < 2 {
        return Err(TesterError::TooFewSamples);
    }
    let pairs = s * (s - 1) / 2;
    let collisions = collision_count(keys);
    let (a, b) = (BigUint::from(*eps.numer()), BigUint::from(*eps.denom()));
    let b2 = &b * &b;
    // c / P <= (1 + a^2/(2 b^2)) / m  <=>  2 c m b^2 <= P (2 b^2 + a^2)
    let lhs = BigUint::from(2u32) * BigUint::from(collisions) * BigUint::from(m) * &b2;
    let rhs = BigUint::from(pairs) * (BigUint::from(2u32) * &b2 + &a * &a);
    Ok(UniformityOutcome { accept: lhs <= rhs, collisions, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn statistic_example() {
        // (a, b, a, c): one collision among six pairs.
        let mut keys = vec![1, 2, 1, 3];
        let out = uniformity_test(&mut keys, 4, ratio(1, 4)).unwrap();
        assert_eq!((out.collisions, out.pairs), (1, 6));
        // 1/6 <= (1 + 1/32)/4
        assert!(out.accept);
        let mut keys = vec![1, 1, 1, 3];
        let out = uniformity_test(&mut keys, 4, ratio(1, 4)).unwrap();
        assert_eq!(out.collisions, 3);
        assert!(!out.accept);
    }

    #[test]
    fn needs_two_samples() {
        assert_eq!(uniformity_test(&mut [5], 4, ratio(1, 2)), Err(TesterError::TooFewSamples));
    }

    #[test]
    fn collision_runs() {
        assert_eq!(collision_count(&mut [4, 4, 4, 4, 2, 2, 9]), 6 + 1);
        assert_eq!(collision_count(&mut []), 0);
    }

    #[test]
    fn budget_formula() {
        assert_eq!(uniformity_budget(1024, ratio(1, 4), 16.0), 8192);
    }
}
