//! Scripted cheating provers. Each is a deterministic function of its
//! parameters and seed, so the extractor can replay it.

use crate::argument::{honest_backend_reply, FULL_REVEAL, SPOT_CHECK};
use crate::dist::GrainDistribution;
use crate::protocol::message::Message;
use crate::representation::{build_representation, BlockCode, RepresentationString};
use crate::protocol::prover::{honest_opening, opening_payload, refusal, HonestProver, ProverMachine};
use crate::rng::{stream_rng, streams, Rng};
use rand::Rng as _;
use std::collections::BTreeSet;
use thiserror::Error;

/// Commits to `q_far` and answers honestly from it.
pub fn far_commit(q_far: GrainDistribution) -> HonestProver {
    HonestProver::new(q_far)
}

/// Commits to `q`, then with probability `flip_prob` per opening changes the
/// claimed pdf without touching the path.
pub struct InconsistentOpening {
    inner: HonestProver,
    flip_prob: f64,
    rng: Rng,
    pub flipped: u64,
}

impl InconsistentOpening {
    pub fn new(q: GrainDistribution, flip_prob: f64, seed: u64) -> Self {
        Self { inner: HonestProver::new(q), flip_prob, rng: stream_rng(seed, streams::PROVER), flipped: 0 }
    }
}

impl ProverMachine for InconsistentOpening {
    fn respond(&mut self, msg: &Message) -> Vec<Vec<u8>> {
        let Message::QuerySet(probes) = msg else {
            return self.inner.respond(msg);
        };
        let Some(aux) = self.inner.aux() else {
            return Vec::new();
        };
        let mut out = Vec::with_capacity(probes.len());
        for p in probes {
            let Some(mut proof) = honest_opening(aux, p) else {
                out.push(refusal());
                continue;
            };
            if self.flip_prob > 0.0 && self.rng.gen_bool(self.flip_prob.min(1.0)) {
                proof.claimed_pdf ^= 1;
                self.flipped += 1;
            }
            out.push(opening_payload(&proof));
        }
        out
    }
}

/// Honest from `q`, except that openings of `blocked` elements are refused.
pub struct SelectiveRefusal {
    inner: HonestProver,
    blocked: BTreeSet<u64>,
}

impl SelectiveRefusal {
    pub fn new(q: GrainDistribution, blocked: BTreeSet<u64>) -> Self {
        Self { inner: HonestProver::new(q), blocked }
    }
}

impl ProverMachine for SelectiveRefusal {
    fn respond(&mut self, msg: &Message) -> Vec<Vec<u8>> {
        let Message::QuerySet(probes) = msg else {
            return self.inner.respond(msg);
        };
        let Some(aux) = self.inner.aux() else {
            return Vec::new();
        };
        probes
            .iter()
            .map(|p| match honest_opening(aux, p) {
                Some(o) if !self.blocked.contains(&o.element) => opening_payload(&o),
                _ => refusal(),
            })
            .collect()
    }
}

/// Commits to `q` but answers backend requests about `shown` instead.
pub struct RepresentationSwap {
    inner: HonestProver,
    shown: GrainDistribution,
}

impl RepresentationSwap {
    pub fn new(q: GrainDistribution, shown: GrainDistribution) -> Self {
        Self { inner: HonestProver::new(q), shown }
    }
}

impl ProverMachine for RepresentationSwap {
    fn respond(&mut self, msg: &Message) -> Vec<Vec<u8>> {
        match msg {
            Message::Backend { backend, payload } if [FULL_REVEAL, SPOT_CHECK].contains(backend) => {
                let reply = honest_backend_reply(&self.shown, *backend, payload).unwrap_or_default();
                vec![Message::Backend { backend: *backend, payload: reply }.encode()]
            }
            _ => self.inner.respond(msg),
        }
    }
}

/// Commits to `q` honestly; its spot-check representation has `planted`
/// random blocks replaced by the encoding of a neighbouring element.
pub struct PlantedBlocks {
    inner: HonestProver,
    planted: u64,
    rng: Rng,
}

impl PlantedBlocks {
    pub fn new(q: GrainDistribution, planted: u64, seed: u64) -> Self {
        Self { inner: HonestProver::new(q), planted, rng: stream_rng(seed, streams::PROVER) }
    }

    /// The string sent for `q`, with `planted` distinct blocks changed.
    pub fn corrupted(q: &GrainDistribution, planted: u64, rng: &mut Rng) -> RepresentationString {
        let code = BlockCode::for_domain(q.domain_size());
        let mut x = build_representation(q, &code);
        let n = q.domain_size() as u64;
        let blocks = rand::seq::index::sample(rng, x.num_blocks() as usize, planted.min(x.num_blocks()) as usize);
        for j in blocks.into_iter().map(|i| i as u64 + 1) {
            let current = code.decode_element(x.block(j)).unwrap_or(1);
            let other = if n > 1 { current % n + 1 } else { current };
            let mut enc = code.encode_element(other);
            if other == current {
                // one element only: leave the code instead
                enc[0] ^= 1;
            }
            x.block_mut(j).copy_from_slice(&enc);
        }
        x
    }
}

impl ProverMachine for PlantedBlocks {
    fn respond(&mut self, msg: &Message) -> Vec<Vec<u8>> {
        match msg {
            Message::Backend { backend: SPOT_CHECK, .. } => {
                let x = Self::corrupted(self.inner.distribution(), self.planted, &mut self.rng);
                vec![Message::Backend { backend: SPOT_CHECK, payload: x.to_bytes() }.encode()]
            }
            _ => self.inner.respond(msg),
        }
    }
}

/// Which prover to run, by name.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// Commits to the distribution the honest prover would use.
    Honest,
    /// Commits to an explicit distribution.
    FarCommit,
    InconsistentOpening { flip_prob: f64 },
    SelectiveRefusal { blocked: BTreeSet<u64> },
    RepresentationSwap,
    PlantedBlocks { planted: u64 },
}

pub const STRATEGY_NAMES: [&str; 6] =
    ["honest", "far-commit", "inconsistent-opening", "selective-refusal", "representation-swap", "planted-blocks"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StrategyError {
    #[error("unknown adversary {0:?}")]
    Unknown(String),
    #[error("bad adversary parameter: {0}")]
    Parameter(String),
}

impl Strategy {
    /// `name` or `name:param`, e.g. `inconsistent-opening:0.1` or `selective-refusal:1,5,9`.
    pub fn parse(spec: &str) -> Result<Self, StrategyError> {
        let (name, param) = spec.split_once(':').map_or((spec, None), |(a, b)| (a, Some(b)));
        let bad = |e: String| StrategyError::Parameter(e);
        Ok(match name {
            "honest" => Strategy::Honest,
            "far-commit" => Strategy::FarCommit,
            "inconsistent-opening" => {
                let flip_prob = param.unwrap_or("0.5").parse::<f64>().map_err(|e| bad(e.to_string()))?;
                if !(0.0..=1.0).contains(&flip_prob) {
                    return Err(bad(format!("flip probability {flip_prob}")));
                }
                Strategy::InconsistentOpening { flip_prob }
            }
            "selective-refusal" => Strategy::SelectiveRefusal {
                blocked: param
                    .unwrap_or("1")
                    .split(',')
                    .filter(|s| !s.is_empty())
                    .map(|s| s.trim().parse::<u64>().map_err(|e| bad(e.to_string())))
                    .collect::<Result<_, _>>()?,
            },
            "representation-swap" => Strategy::RepresentationSwap,
            "planted-blocks" => Strategy::PlantedBlocks {
                planted: param.unwrap_or("1").parse::<u64>().map_err(|e| bad(e.to_string()))?,
            },
            other => return Err(StrategyError::Unknown(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Honest => "honest",
            Strategy::FarCommit => "far-commit",
            Strategy::InconsistentOpening { .. } => "inconsistent-opening",
            Strategy::SelectiveRefusal { .. } => "selective-refusal",
            Strategy::RepresentationSwap => "representation-swap",
            Strategy::PlantedBlocks { .. } => "planted-blocks",
        }
    }

    /// Builds the prover. `honest_q` is what an honest prover would commit to,
    /// `far_q` the alternative a cheater commits to or shows.
    pub fn build(&self, honest_q: &GrainDistribution, far_q: &GrainDistribution, seed: u64) -> Box<dyn ProverMachine> {
        match self {
            Strategy::Honest => Box::new(HonestProver::new(honest_q.clone())),
            Strategy::FarCommit => Box::new(far_commit(far_q.clone())),
            Strategy::InconsistentOpening { flip_prob } => {
                Box::new(InconsistentOpening::new(honest_q.clone(), *flip_prob, seed))
            }
            Strategy::SelectiveRefusal { blocked } => Box::new(SelectiveRefusal::new(honest_q.clone(), blocked.clone())),
            Strategy::RepresentationSwap => Box::new(RepresentationSwap::new(honest_q.clone(), far_q.clone())),
            Strategy::PlantedBlocks { planted } => Box::new(PlantedBlocks::new(honest_q.clone(), *planted, seed)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commitment::Probe;
    use crate::commitment::{gen, verify};

    fn opened(m: &mut dyn ProverMachine, q: &GrainDistribution, probes: Vec<Probe>) -> Vec<Option<u64>> {
        let key = gen(128, q.domain_size(), &mut stream_rng(0, 0)).unwrap();
        let d = match Message::decode(&m.respond(&Message::Key(key))[0]).unwrap() {
            Message::Digest(d) => d,
            other => panic!("{other:?}"),
        };
        m.respond(&Message::QuerySet(probes))
            .iter()
            .map(|p| match Message::decode(p) {
                Ok(Message::Opening(o)) if verify(o.element, &o, &key, &d) => Some(o.element),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn flipped_openings_fail_and_zero_flip_is_honest() {
        let q = GrainDistribution::from_counts(vec![4, 4, 8, 0]).unwrap();
        let probes: Vec<Probe> = (1..=4).map(Probe::Element).collect();
        let mut always = InconsistentOpening::new(q.clone(), 1.0, 3);
        assert_eq!(opened(&mut always, &q, probes.clone()), vec![None; 4]);
        let mut never = InconsistentOpening::new(q.clone(), 0.0, 3);
        assert_eq!(opened(&mut never, &q, probes), vec![Some(1), Some(2), Some(3), Some(4)]);
    }

    #[test]
    fn refusals_only_on_blocked() {
        let q = GrainDistribution::from_counts(vec![4, 4, 8, 0]).unwrap();
        let mut m = SelectiveRefusal::new(q.clone(), [2].into());
        let probes = vec![Probe::Element(1), Probe::Element(2), Probe::Quantile(crate::rational::ratio(3, 8))];
        assert_eq!(opened(&mut m, &q, probes), vec![Some(1), None, None]);
    }

    #[test]
    fn planted_blocks_differ_in_exactly_that_many_places() {
        let q = GrainDistribution::from_counts(vec![5, 0, 7, 4]).unwrap();
        let honest = build_representation(&q, &BlockCode::for_domain(4));
        for planted in [0, 1, 5, 16] {
            let x = PlantedBlocks::corrupted(&q, planted, &mut stream_rng(planted, 0));
            let d = crate::representation::hamming_block_distance(&honest, &x).unwrap();
            assert_eq!(d, crate::rational::ratio(planted.into(), 16));
        }
    }

    #[test]
    fn parse_specs() {
        assert_eq!(Strategy::parse("selective-refusal:1,5").unwrap(), Strategy::SelectiveRefusal { blocked: [1, 5].into() });
        assert_eq!(Strategy::parse("inconsistent-opening:0.25").unwrap(), Strategy::InconsistentOpening { flip_prob: 0.25 });
        assert!(Strategy::parse("collision-search").is_err());
        assert!(Strategy::parse("inconsistent-opening:2").is_err());
        for name in STRATEGY_NAMES {
            assert_eq!(Strategy::parse(name).unwrap().name(), name);
        }
    }
}
