//! Recovering the committed distribution from a replayable opener.

use super::{verify_labels, Digest, HashKey, NodeLabel, OpeningProof, Probe};
use crate::dist::GrainDistribution;
use crate::rational::{ceil_u128, ratio, Rational};
use crate::rng::Rng;
use rand::Rng as _;
use std::collections::HashMap;

/// Default replays per domain element per unit of `1/eta`.
pub const EXTRACTOR_RUNS_PER_ELEMENT: u64 = 8;

/// An opener that can be rewound to the moment right after it sent its digest.
pub trait ReplayableOpener {
    /// Runs the opener afresh (fresh randomness derived from `run`) on `probes`.
    /// `None` marks a refused or undecodable answer.
    fn replay(&mut self, run: u64, probes: &[Probe]) -> Vec<Option<OpeningProof>>;
}

/// Two verified openings that disagree on the label of one node: a SHA-256 collision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollisionEvidence {
    pub node: u64,
    pub first: NodeLabel,
    pub second: NodeLabel,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub distribution: GrainDistribution,
    pub collision: Option<CollisionEvidence>,
    pub runs: u64,
    pub accepted_openings: u64,
    /// Heap indices whose labels were authenticated.
    pub known_nodes: HashMap<u64, NodeLabel>,
}

/// Replays `opener` `ceil(8 N / eta)` times with one random element probe and
/// one random quantile probe per run, then rebuilds a distribution from every
/// verified label: opened subtrees keep their exact masses, and the mass of
/// each maximal unopened subtree is spread evenly (in whole grains, earlier
/// leaves first) over its leaves inside `[N]`.
pub fn extract(
    opener: &mut dyn ReplayableOpener,
    key: &HashKey,
    d: &Digest,
    eta: Rational,
    rng: &mut Rng,
) -> Extraction {
    let runs = ceil_u128(Rational::from_integer(u128::from(EXTRACTOR_RUNS_PER_ELEMENT * d.domain_size)) / eta);
    extract_with_runs(opener, key, d, runs as u64, rng)
}

pub fn extract_with_runs(
    opener: &mut dyn ReplayableOpener,
    key: &HashKey,
    d: &Digest,
    runs: u64,
    rng: &mut Rng,
) -> Extraction {
    let n = d.domain_size;
    let mut known: HashMap<u64, NodeLabel> = HashMap::new();
    let mut collision = None;
    let mut accepted = 0;
    for run in 0..runs {
        let probes = [
            Probe::Element(rng.gen_range(1..=n)),
            Probe::Quantile(ratio(rng.gen_range(1..=d.denominator).into(), d.denominator.into())),
        ];
        for proof in opener.replay(run, &probes).into_iter().flatten() {
            let Some(labels) = verify_labels(proof.element, &proof, key, d) else {
                continue;
            };
            accepted += 1;
            for (idx, label) in labels {
                match known.get(&idx) {
                    Some(prev) if *prev != label => {
                        collision.get_or_insert(CollisionEvidence { node: idx, first: *prev, second: label });
                    }
                    Some(_) => {}
                    None => {
                        known.insert(idx, label);
                    }
                }
            }
        }
    }
    let distribution = if collision.is_some() {
        GrainDistribution::balanced(n as usize, d.denominator).expect("digest is well formed")
    } else {
        rebuild(&known, d)
    };
    Extraction { distribution, collision, runs, accepted_openings: accepted, known_nodes: known }
}

fn rebuild(known: &HashMap<u64, NodeLabel>, d: &Digest) -> GrainDistribution {
    let n = d.domain_size;
    let p = d.padded_size;
    let mut counts = vec![0u64; n as usize];
    let mut stack = vec![(1u64, d.denominator)];
    while let Some((idx, mass)) = stack.pop() {
        let level = 63 - idx.leading_zeros() as u64;
        let width = p >> level;
        let first = (idx << p.trailing_zeros().saturating_sub(level as u32)) - p;
        if width == 1 {
            if first < n {
                counts[first as usize] = mass;
            }
            continue;
        }
        match (known.get(&(2 * idx)), known.get(&(2 * idx + 1))) {
            (Some(l), Some(r)) => {
                stack.push((2 * idx, l.mass));
                stack.push((2 * idx + 1, r.mass));
            }
            _ => {
                let real = n.saturating_sub(first).min(width);
                if real == 0 {
                    continue;
                }
                let (q, r) = (mass / real, mass % real);
                for i in 0..real {
                    counts[(first + i) as usize] = q + u64::from(i < r);
                }
            }
        }
    }
    GrainDistribution::new(counts, d.denominator).expect("verified masses add up to the root")
}
