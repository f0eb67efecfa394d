//! Prover state machines.

use super::message::{Message, Tag};
use crate::commitment::{digest, ReplayableOpener, HashKey, OpeningProof, Probe, TreeAux};
use crate::dist::GrainDistribution;

/// A prover: answers each verifier message with zero or more encoded messages.
pub trait ProverMachine {
    fn respond(&mut self, msg: &Message) -> Vec<Vec<u8>>;
}

impl<P: ProverMachine + ?Sized> ProverMachine for Box<P> {
    fn respond(&mut self, msg: &Message) -> Vec<Vec<u8>> {
        (**self).respond(msg)
    }
}

impl<P: ProverMachine + ?Sized> ProverMachine for &mut P {
    fn respond(&mut self, msg: &Message) -> Vec<Vec<u8>> {
        (**self).respond(msg)
    }
}

/// Encoded opening message for `proof`.
pub fn opening_payload(proof: &OpeningProof) -> Vec<u8> {
    let mut out = Vec::with_capacity(1 + proof.encoded_len());
    out.push(Tag::Opening as u8);
    proof.write_to(&mut out);
    out
}

/// The opening an honest prover sends for `probe`, if the probe is answerable.
pub fn honest_opening(aux: &TreeAux, probe: &Probe) -> Option<OpeningProof> {
    match *probe {
        Probe::Element(x) => aux.open(x).ok(),
        Probe::Quantile(mu) => aux.quantile_open(mu).ok().map(|(_, p)| p),
    }
}

/// An opening message that does not decode.
pub fn refusal() -> Vec<u8> {
    vec![Tag::Opening as u8]
}

/// Commits to `q` and answers every probe truthfully.
#[derive(Clone, Debug)]
pub struct HonestProver {
    q: GrainDistribution,
    aux: Option<TreeAux>,
}

impl HonestProver {
    pub fn new(q: GrainDistribution) -> Self {
        Self { q, aux: None }
    }

    pub fn distribution(&self) -> &GrainDistribution {
        &self.q
    }

    pub fn aux(&self) -> Option<&TreeAux> {
        self.aux.as_ref()
    }

    fn answer_probes(&self, probes: &[Probe]) -> Vec<Vec<u8>> {
        let Some(aux) = &self.aux else {
            return Vec::new();
        };
        probes.iter().map(|p| honest_opening(aux, p).map_or_else(refusal, |o| opening_payload(&o))).collect()
    }
}

impl ProverMachine for HonestProver {
    fn respond(&mut self, msg: &Message) -> Vec<Vec<u8>> {
        match msg {
            Message::Key(k) => {
                let (d, aux) = digest(k, &self.q);
                self.aux = Some(aux);
                vec![Message::Digest(d).encode()]
            }
            Message::QuerySet(probes) => self.answer_probes(probes),
            Message::ElementProbe(x) => self.answer_probes(&[Probe::Element(*x)]),
            Message::QuantileProbe(mu) => self.answer_probes(&[Probe::Quantile(*mu)]),
            Message::Backend { backend, payload } => crate::argument::honest_backend_reply(&self.q, *backend, payload)
                .map(|reply| vec![Message::Backend { backend: *backend, payload: reply }.encode()])
                .unwrap_or_default(),
            Message::Digest(_) | Message::Opening(_) | Message::Verdict(_) => Vec::new(),
        }
    }
}

/// Turns a prover factory into a [`ReplayableOpener`]: each replay builds a
/// fresh machine for the run, hands it `key`, and asks for the probes in one set.
pub struct Replay<F> {
    factory: F,
    key: HashKey,
}

impl<F> Replay<F> {
    pub fn new(factory: F, key: HashKey) -> Self {
        Self { factory, key }
    }
}

impl<F, P> ReplayableOpener for Replay<F>
where
    F: FnMut(u64) -> P,
    P: ProverMachine,
{
    fn replay(&mut self, run: u64, probes: &[Probe]) -> Vec<Option<OpeningProof>> {
        let mut m = (self.factory)(run);
        m.respond(&Message::Key(self.key));
        let replies = m.respond(&Message::QuerySet(probes.to_vec()));
        (0..probes.len())
            .map(|i| match replies.get(i).map(|p| Message::decode(p)) {
                Some(Ok(Message::Opening(o))) => Some(o),
                _ => None,
            })
            .collect()
    }
}
