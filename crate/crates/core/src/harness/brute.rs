//! Exhaustive checks over every grain distribution of a small domain.

use crate::dist::{tv_distance, GrainDistribution};
use crate::histogram::{estimate_histogram, exact_histogram};
use crate::rational::{abs_diff, ratio, Rational};
use crate::representation::{
    build_representation, hamming_block_distance, hamming_symbol_distance, query_block, BlockCode,
};
use crate::rng::{child_seed, stream_rng, streams};
use crate::testers::{exact_tail_count, granular_count, mix_pdf, theta};
use num_traits::{One, Zero};
use rand::Rng as _;
use rayon::prelude::*;

/// All count vectors of length `n` summing to `g`, in lexicographic order.
pub fn compositions(n: usize, g: u64) -> Vec<Vec<u64>> {
    fn go(n: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() + 1 == n {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            go(n, left - c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        go(n, g, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

/// All distributions over `[n]` with exactly `g` grains.
pub fn all_distributions(n: usize, g: u64) -> Vec<GrainDistribution> {
    compositions(n, g).into_iter().map(|c| GrainDistribution::new(c, g).expect("counts sum to g")).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BruteReport {
    pub distributions: u64,
    pub pairs: u64,
    /// Pairs checked by sampling rather than enumeration.
    pub sampled_pairs: u64,
    /// Pairs of single-element masses `(a/G, b/G)` checked.
    pub coordinate_pairs: u64,
    pub failures: Vec<String>,
}

impl BruteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(mut self, other: BruteReport) -> Self {
        self.distributions += other.distributions;
        self.pairs += other.pairs;
        self.sampled_pairs += other.sampled_pairs;
        self.coordinate_pairs += other.coordinate_pairs;
        self.failures.extend(other.failures);
        self
    }
}

/// Mixed pdfs `Q'` and kept fractions `theta` of one distribution.
struct Mixed {
    counts: Vec<u64>,
    grains: u64,
    q_prime: Vec<Rational>,
    theta: Vec<Rational>,
}

fn mixed(d: &GrainDistribution) -> Mixed {
    let n = d.domain_size();
    let m = 6 * n as u64;
    let q_prime: Vec<Rational> = (1..=n).map(|x| mix_pdf(d.pdf(x).unwrap(), n)).collect();
    let theta = q_prime.iter().map(|&q| theta(q, m)).collect();
    Mixed { counts: d.counts().to_vec(), grains: d.grains(), q_prime, theta }
}

fn single_checks(d: &GrainDistribution, mx: &Mixed, failures: &mut Vec<String>) {
    let n = d.domain_size();
    let m = Rational::from_integer(6 * n as u128);
    let two_thirds = ratio(2, 3);
    let mut kept = Rational::zero();
    let mut tail = Rational::zero();
    for x in 0..n {
        let (q, t) = (mx.q_prime[x], mx.theta[x]);
        if t < two_thirds || t > Rational::one() {
            failures.push(format!("theta {t} outside [2/3, 1] for {:?}/{} at {}", mx.counts, mx.grains, x + 1));
        }
        let mx_count = t * q * m;
        if !mx_count.is_integer() || mx_count.to_integer() != u128::from(granular_count(d.pdf(x + 1).unwrap(), n)) {
            failures.push(format!("Q''({}) m = {mx_count} for {:?}/{}", x + 1, mx.counts, mx.grains));
        }
        kept += mx_count;
        tail += (Rational::one() - t) * q * m;
    }
    let pdfs: Vec<Rational> = (1..=n).map(|x| d.pdf(x).unwrap()).collect();
    let lib_tail = exact_tail_count(&pdfs).map(u128::from);
    if !tail.is_integer() || Ok(tail.to_integer()) != lib_tail || kept + tail != m {
        failures.push(format!("tail {tail} (library {lib_tail:?}), kept {kept}, m {m} for {:?}/{}", mx.counts, mx.grains));
    }
}

fn pair_checks(a: &GrainDistribution, ma: &Mixed, b: &GrainDistribution, mb: &Mixed, failures: &mut Vec<String>) {
    let tv = tv_distance(a, b).unwrap();
    let l1: Rational = ma.q_prime.iter().zip(&mb.q_prime).map(|(&p, &q)| abs_diff(p, q)).sum();
    let tv_mixed = l1 / 2;
    if tv_mixed * 2 != tv {
        failures.push(format!("TV(D', Q') = {tv_mixed} but TV(D, Q) = {tv} for {:?} {:?}", ma.counts, mb.counts));
    }
    // D'' and Q'' both granularize with Q's theta.
    let theta = &mb.theta;
    let mut head = Rational::zero();
    let (mut tail_d, mut tail_q) = (Rational::zero(), Rational::zero());
    for x in 0..theta.len() {
        head += theta[x] * abs_diff(ma.q_prime[x], mb.q_prime[x]);
        tail_d += (Rational::one() - theta[x]) * ma.q_prime[x];
        tail_q += (Rational::one() - theta[x]) * mb.q_prime[x];
    }
    let tv_granular = (head + abs_diff(tail_d, tail_q)) / 2;
    if tv_granular * 3 < tv_mixed * 2 {
        failures.push(format!("TV(D'', Q'') = {tv_granular} < 2/3 TV(D', Q') for {:?} {:?}", ma.counts, mb.counts));
    }
}

/// `|Q'(x) - D'(x)| = |Q(x) - D(x)| / 2` for every pair of masses a domain
/// element can take. TV is a sum of these terms, so this covers every pair of
/// distributions with the same `(N, G)`.
fn coordinate_checks(n: usize, g: u64, failures: &mut Vec<String>) -> u64 {
    let mixed: Vec<Rational> = (0..=g).map(|a| mix_pdf(ratio(a as u128, g as u128), n)).collect();
    for a in 0..=g {
        for b in 0..=g {
            let plain = ratio(a.abs_diff(b) as u128, g as u128);
            if abs_diff(mixed[a as usize], mixed[b as usize]) * 2 != plain {
                failures.push(format!("N={n}: |Q'(x) - D'(x)| for masses {a}/{g}, {b}/{g}"));
            }
        }
    }
    (g + 1) * (g + 1)
}

/// The mixing and granularization identities for every distribution with
/// `N <= n_max`, `G <= g_max`, and the distance identities for pairs with
/// the same `(N, G)`: all pairs where there are at most `pair_budget`,
/// otherwise `pair_budget` random pairs. The halving identity is also
/// checked exhaustively per element.
pub fn reduction_checks(n_max: usize, g_max: u64, pair_budget: u64, seed: u64) -> BruteReport {
    let cases: Vec<(usize, u64)> = (1..=n_max).flat_map(|n| (1..=g_max).map(move |g| (n, g))).collect();
    cases
        .into_par_iter()
        .map(|(n, g)| {
            let dists = all_distributions(n, g);
            let mixes: Vec<Mixed> = dists.iter().map(mixed).collect();
            let mut report = BruteReport { distributions: dists.len() as u64, ..Default::default() };
            report.coordinate_pairs = coordinate_checks(n, g, &mut report.failures);
            for (d, mx) in dists.iter().zip(&mixes) {
                single_checks(d, mx, &mut report.failures);
            }
            let k = dists.len() as u64;
            if k * k <= pair_budget {
                for i in 0..dists.len() {
                    for j in 0..dists.len() {
                        pair_checks(&dists[i], &mixes[i], &dists[j], &mixes[j], &mut report.failures);
                    }
                }
                report.pairs = k * k;
            } else {
                let mut rng = stream_rng(child_seed(seed, (n as u64) << 32 | g), streams::WORKLOAD);
                for _ in 0..pair_budget {
                    let (i, j) = (rng.gen_range(0..dists.len()), rng.gen_range(0..dists.len()));
                    pair_checks(&dists[i], &mixes[i], &dists[j], &mixes[j], &mut report.failures);
                }
                report.pairs = pair_budget;
                report.sampled_pairs = pair_budget;
            }
            report
        })
        .reduce(BruteReport::default, BruteReport::merge)
}

/// For every pair of distributions over `[n]` with `g` grains: block Hamming
/// distance at least TV, symbol Hamming distance at least `TV * d/n_c` and
/// `TV / 10`; and for every distribution, `query_block` equals the built
/// block at every position.
pub fn representation_checks(n: usize, g: u64) -> BruteReport {
    let code = BlockCode::for_domain(n);
    let (dist, len) = code.relative_distance();
    let d_rel = ratio(dist as u128, len as u128);
    let dists = all_distributions(n, g);
    let reps: Vec<_> = dists.iter().map(|d| build_representation(d, &code)).collect();
    let mut report = (0..dists.len())
        .into_par_iter()
        .map(|i| {
            let mut r = BruteReport::default();
            for j in 0..dists.len() {
                let tv = tv_distance(&dists[i], &dists[j]).unwrap();
                let block = hamming_block_distance(&reps[i], &reps[j]).unwrap();
                let symbol = hamming_symbol_distance(&reps[i], &reps[j]).unwrap();
                if block < tv || symbol < tv * d_rel || symbol * 10 < tv {
                    r.failures.push(format!(
                        "{:?} vs {:?}: TV {tv}, block {block}, symbol {symbol}",
                        dists[i].counts(),
                        dists[j].counts()
                    ));
                }
            }
            r.pairs = dists.len() as u64;
            r
        })
        .reduce(BruteReport::default, BruteReport::merge);
    report.distributions = dists.len() as u64;
    for (d, x) in dists.iter().zip(&reps) {
        for j in 1..=g {
            match query_block(j, g, &code, &mut &*d) {
                Ok(b) if b.as_slice() == x.block(j) => {}
                other => report.failures.push(format!("{:?}: query_block({j}) = {other:?}", d.counts())),
            }
        }
    }
    report
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (1..=n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            let swap = if k % 2 == 0 { i } else { 0 };
            p.swap(swap, k - 1);
        }
    }
    heap(n, &mut p, &mut out);
    out
}

/// For every distribution over `[n]` with `g` grains and each `tau`: the
/// exact histogram has mass 1, equals the estimate from the full multiset of
/// grains, and does not change under any relabelling.
pub fn histogram_checks(n: usize, g: u64, taus: &[Rational]) -> BruteReport {
    let perms = permutations(n);
    let dists = all_distributions(n, g);
    let mut report = BruteReport { distributions: dists.len() as u64, ..Default::default() };
    for d in &dists {
        for &tau in taus {
            let h = exact_histogram(d, tau).unwrap();
            if h.total() != Rational::one() {
                report.failures.push(format!("{:?}: histogram mass {}", d.counts(), h.total()));
            }
            let grains = (1..=n).flat_map(|x| std::iter::repeat((x, d.pdf(x).unwrap())).take(d.counts()[x - 1] as usize));
            if estimate_histogram(grains, tau, n).ok().as_ref() != Some(&h) {
                report.failures.push(format!("{:?}: estimate over all grains differs at tau {tau}", d.counts()));
            }
            for p in &perms {
                if exact_histogram(&d.permuted(p).unwrap(), tau).unwrap() != h {
                    report.failures.push(format!("{:?}: relabelling {p:?} changes the histogram", d.counts()));
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        // C(g + n - 1, n - 1)
        assert_eq!(compositions(4, 12).len(), 455);
        assert_eq!(compositions(1, 5), vec![vec![5]]);
        assert_eq!(compositions(3, 0), vec![vec![0, 0, 0]]);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn small_cases_pass() {
        assert!(reduction_checks(3, 6, 10_000, 1).passed());
        assert!(representation_checks(3, 6).passed());
        assert!(histogram_checks(3, 6, &[ratio(1, 2)]).passed());
    }
}
