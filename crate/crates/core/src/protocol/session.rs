//! The verifier's side of a session.

use super::message::{frame, unframe, Message};
use super::transcript::{Party, SessionTranscript, TranscriptMode};
use super::transport::Transport;
use crate::commitment::{gen, verify, CommitError, Digest, HashKey, OpeningProof, Probe, MIN_KAPPA};
use crate::dist::{grain_threshold, CountingSampler, Sampler};
use crate::rational::{ratio, Rational};
use crate::rng::Rng;
use crate::testers::{majority, IdentityOutcome, IdentityParams, IdentityPlan};
use crate::testers::BatchAnswer;
use crate::verdict::{RejectReason, Verdict};
use num_traits::{One, Zero};
use rand::Rng as _;
use std::collections::HashMap;
use thiserror::Error;

/// How element probes of the identity phase are sent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbePolicy {
    /// One probe per pdf query the tester makes.
    PerQuery,
    /// Each element at most once; repeated queries reuse the answer.
    Distinct,
}

#[derive(Clone, Debug)]
pub struct SessionConfig {
    pub n: usize,
    pub eps: Rational,
    pub kappa: u32,
    pub identity: IdentityParams,
    /// Independent identity-test runs; the majority decides.
    pub repetitions: usize,
    pub probe_policy: ProbePolicy,
    pub transcript: TranscriptMode,
}

impl SessionConfig {
    pub fn new(n: usize, eps: Rational) -> Self {
        Self {
            n,
            eps,
            kappa: MIN_KAPPA,
            identity: IdentityParams::default(),
            repetitions: 1,
            probe_policy: ProbePolicy::Distinct,
            transcript: TranscriptMode::CountersOnly,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("domain size must be at least 1")]
    EmptyDomain,
    #[error("eps must lie in (0, 1), got {0}")]
    Eps(Rational),
    #[error("at least one repetition is needed")]
    NoRepetitions,
    #[error(transparent)]
    Commit(#[from] CommitError),
}

/// A verified answer to one probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnsweredProbe {
    pub probe: Probe,
    pub element: u64,
    pub pdf: Rational,
    pub cdf: Rational,
}

/// Verifier state for one session. Every method that talks to the prover
/// fails with the reason the verifier would reject on.
pub struct VerifierSession<'a> {
    cfg: SessionConfig,
    link: &'a mut dyn Transport,
    rng: &'a mut Rng,
    transcript: SessionTranscript,
    seq: u64,
    key: HashKey,
    digest: Option<Digest>,
    verified: HashMap<u64, Vec<u8>>,
    claims: std::collections::BTreeSet<Claim>,
    identity: Vec<IdentityOutcome>,
}

/// `(element, pdf grains, cdf grains)` of an accepted opening.
pub type Claim = (u64, u64, u64);

impl<'a> VerifierSession<'a> {
    pub fn new(cfg: SessionConfig, link: &'a mut dyn Transport, rng: &'a mut Rng) -> Result<Self, ConfigError> {
        if cfg.n == 0 {
            return Err(ConfigError::EmptyDomain);
        }
        if cfg.eps.is_zero() || cfg.eps >= Rational::one() {
            return Err(ConfigError::Eps(cfg.eps));
        }
        if cfg.repetitions == 0 {
            return Err(ConfigError::NoRepetitions);
        }
        let key = gen(cfg.kappa, cfg.n, rng)?;
        let transcript = SessionTranscript::new(cfg.transcript);
        Ok(Self {
            cfg,
            link,
            rng,
            transcript,
            seq: 0,
            key,
            digest: None,
            verified: HashMap::new(),
            claims: Default::default(),
            identity: Vec::new(),
        })
    }

    pub fn key(&self) -> &HashKey {
        &self.key
    }

    pub fn digest(&self) -> Option<&Digest> {
        self.digest.as_ref()
    }

    pub fn rng(&mut self) -> &mut Rng {
        self.rng
    }

    pub fn transcript(&self) -> &SessionTranscript {
        &self.transcript
    }

    /// Every distinct claim carried by an opening accepted so far.
    pub fn claims(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter()
    }

    pub fn identity_outcomes(&self) -> &[IdentityOutcome] {
        &self.identity
    }

    /// Sends `msg` and returns the decoded payloads of exactly `replies` answers.
    fn exchange(&mut self, msg: &Message, replies: usize) -> Result<Vec<Vec<u8>>, RejectReason> {
        let payload = msg.encode();
        let seq = self.seq;
        self.transcript.push(seq, Party::Verifier, &payload);
        let frames = self.link.exchange(&frame(seq, &payload), replies).map_err(|_| RejectReason::Transport)?;
        self.seq += 1;
        if frames.len() != replies {
            return Err(RejectReason::Transport);
        }
        let mut out = Vec::with_capacity(replies);
        for f in frames {
            let (s, body) = unframe(&f).map_err(|_| RejectReason::Transport)?;
            if s != self.seq {
                return Err(RejectReason::Transport);
            }
            self.seq += 1;
            self.transcript.push(s, Party::Prover, body);
            out.push(body.to_vec());
        }
        Ok(out)
    }

    /// Steps 1(a) and 1(b): send the key, check the digest.
    pub fn commit(&mut self) -> Result<Digest, RejectReason> {
        let reply = self.exchange(&Message::Key(self.key), 1)?;
        let d = match Message::decode(&reply[0]) {
            Ok(Message::Digest(d)) => d,
            _ => return Err(RejectReason::Malformed),
        };
        if !d.is_well_formed(self.cfg.n) {
            return Err(RejectReason::BadDigest);
        }
        self.digest = Some(d);
        Ok(d)
    }

    fn check_opening(&mut self, probe: &Probe, bytes: &[u8], proof: &OpeningProof) -> Result<(), RejectReason> {
        let d = self.digest.as_ref().expect("commit precedes queries");
        if let Probe::Element(x) = *probe {
            if proof.element != x {
                return Err(RejectReason::InvalidOpening);
            }
        }
        let known = self.verified.get(&proof.element).is_some_and(|b| b.as_slice() == bytes);
        if !known {
            if !verify(proof.element, proof, &self.key, d) {
                return Err(RejectReason::InvalidOpening);
            }
            self.verified.entry(proof.element).or_insert_with(|| bytes.to_vec());
        }
        if let Probe::Quantile(mu) = *probe {
            let g = grain_threshold(mu, d.denominator).map_err(|_| RejectReason::QuantileValidity)?;
            if !crate::commitment::quantile_interval_contains(g, proof) {
                return Err(RejectReason::QuantileValidity);
            }
        }
        self.claims.insert((proof.element, proof.claimed_pdf, proof.claimed_cdf));
        Ok(())
    }

    /// Sends `probes` as one query set and verifies every answer.
    pub fn query(&mut self, probes: &[Probe]) -> Result<Vec<AnsweredProbe>, RejectReason> {
        let g = u128::from(self.digest.as_ref().expect("commit precedes queries").denominator);
        let replies = self.exchange(&Message::QuerySet(probes.to_vec()), probes.len())?;
        let mut out = Vec::with_capacity(probes.len());
        for (probe, payload) in probes.iter().zip(&replies) {
            let proof = match Message::decode(payload) {
                Ok(Message::Opening(p)) => p,
                _ => return Err(RejectReason::Malformed),
            };
            self.check_opening(probe, &payload[1..], &proof)?;
            out.push(AnsweredProbe {
                probe: *probe,
                element: proof.element,
                pdf: ratio(proof.claimed_pdf.into(), g),
                cdf: ratio(proof.claimed_cdf.into(), g),
            });
        }
        Ok(out)
    }

    /// Steps 1(c) and 1(d): the identity test against `d`, with every
    /// repetition's probes in one query set.
    pub fn identity_phase(&mut self, d: &dyn Sampler) -> Result<(), RejectReason> {
        let grains = self.digest.as_ref().expect("commit precedes queries").denominator;
        let counted = CountingSampler::new(d);
        let plans: Vec<IdentityPlan> = (0..self.cfg.repetitions)
            .map(|_| IdentityPlan::new(self.cfg.n, self.cfg.eps, &self.cfg.identity, &counted, self.rng))
            .collect();
        self.transcript.add_d_samples(counted.count());
        let mut probes = Vec::new();
        let mut seen = HashMap::new();
        let distinct = self.cfg.probe_policy == ProbePolicy::Distinct;
        for plan in &plans {
            for _ in 0..plan.sample_requests() {
                probes.push(Probe::Quantile(ratio(self.rng.gen_range(1..=grains).into(), grains.into())));
            }
            for x in plan.element_requests() {
                if !distinct || seen.insert(x, ()).is_none() {
                    probes.push(Probe::Element(x as u64));
                }
            }
        }
        let answers = self.query(&probes)?;
        let pdf_of: HashMap<u64, Rational> =
            if distinct { answers.iter().map(|a| (a.element, a.pdf)).collect() } else { HashMap::new() };
        let mut at = 0;
        let mut accepts = Vec::with_capacity(plans.len());
        for plan in &plans {
            let heads = plan.sample_requests();
            let samples = answers[at..at + heads].iter().map(|a| (a.element as usize, a.pdf)).collect();
            at += heads;
            let requests = plan.element_requests();
            let pdfs = if distinct {
                requests.iter().map(|&x| pdf_of[&(x as u64)]).collect()
            } else {
                let pdfs = answers[at..at + requests.len()].iter().map(|a| a.pdf).collect();
                at += requests.len();
                pdfs
            };
            let outcome = plan.decide(&BatchAnswer { samples, pdfs }, self.rng).map_err(|_| RejectReason::Malformed)?;
            accepts.push(outcome.accept);
            self.identity.push(outcome);
        }
        if majority(&accepts) {
            Ok(())
        } else {
            Err(RejectReason::IdentityTest)
        }
    }

    /// Backend traffic: one message out, one answer with the same backend id back.
    pub fn backend(&mut self, backend: u8, payload: Vec<u8>) -> Result<Vec<u8>, RejectReason> {
        let reply = self.exchange(&Message::Backend { backend, payload }, 1)?;
        match Message::decode(&reply[0]) {
            Ok(Message::Backend { backend: b, payload }) if b == backend => Ok(payload),
            _ => Err(RejectReason::Malformed),
        }
    }

    /// Sends the verdict and closes the session.
    pub fn finish(mut self, verdict: Verdict) -> SessionTranscript {
        let _ = self.exchange(&Message::Verdict(verdict), 0);
        self.transcript
    }

    /// Sends the verdict and packs everything the session learned.
    pub fn close(mut self, verdict: Verdict, answers: Vec<AnsweredProbe>) -> SessionOutcome {
        let identity = std::mem::take(&mut self.identity);
        let claims = self.claims.iter().copied().collect();
        let (key, digest) = (self.key, self.digest);
        let answers = if verdict.accepted() { answers } else { Vec::new() };
        let transcript = self.finish(verdict);
        SessionOutcome { verdict, answers, transcript, identity, key, digest, claims }
    }
}

/// Context a query generator may use.
#[derive(Clone, Copy, Debug)]
pub struct GeneratorContext {
    pub n: usize,
    pub eps: Rational,
    /// Grain count from the digest, for quantile levels.
    pub grains: u64,
}

/// Produces the probes of step 2.
pub trait QueryGenerator {
    fn probes(&self, ctx: &GeneratorContext, d: &dyn Sampler, rng: &mut Rng) -> Vec<Probe>;
    /// Upper bound on the number of probes for domain size `n`.
    fn time_budget(&self, n: usize) -> u64;
}

/// No step 2.
pub struct NoProbes;

impl QueryGenerator for NoProbes {
    fn probes(&self, _: &GeneratorContext, _: &dyn Sampler, _: &mut Rng) -> Vec<Probe> {
        Vec::new()
    }

    fn time_budget(&self, _: usize) -> u64 {
        0
    }
}

/// A fixed probe list.
pub struct FixedProbes(pub Vec<Probe>);

impl QueryGenerator for FixedProbes {
    fn probes(&self, _: &GeneratorContext, _: &dyn Sampler, _: &mut Rng) -> Vec<Probe> {
        self.0.clone()
    }

    fn time_budget(&self, _: usize) -> u64 {
        self.0.len() as u64
    }
}

/// `count` quantile probes at independent uniform grain levels: samples of the committed distribution.
pub struct QuantileSampling {
    pub count: u64,
}

impl QueryGenerator for QuantileSampling {
    fn probes(&self, ctx: &GeneratorContext, _: &dyn Sampler, rng: &mut Rng) -> Vec<Probe> {
        let g = ctx.grains;
        (0..self.count).map(|_| Probe::Quantile(ratio(rng.gen_range(1..=g).into(), g.into()))).collect()
    }

    fn time_budget(&self, _: usize) -> u64 {
        self.count
    }
}

/// Element probes at `count` draws from `D`.
pub struct DrawsFromD {
    pub count: u64,
}

impl QueryGenerator for DrawsFromD {
    fn probes(&self, _: &GeneratorContext, d: &dyn Sampler, rng: &mut Rng) -> Vec<Probe> {
        (0..self.count).map(|_| Probe::Element(d.draw(rng) as u64)).collect()
    }

    fn time_budget(&self, _: usize) -> u64 {
        self.count
    }
}

#[derive(Clone, Debug)]
pub struct SessionOutcome {
    pub verdict: Verdict,
    pub answers: Vec<AnsweredProbe>,
    pub transcript: SessionTranscript,
    pub identity: Vec<IdentityOutcome>,
    pub key: HashKey,
    pub digest: Option<Digest>,
    pub claims: Vec<Claim>,
}

/// Steps 1 and 2 on an open session; the caller decides what follows.
pub fn run_steps(
    session: &mut VerifierSession<'_>,
    generator: &dyn QueryGenerator,
    d: &dyn Sampler,
) -> Result<Vec<AnsweredProbe>, RejectReason> {
    let digest = session.commit()?;
    session.identity_phase(d)?;
    let ctx = GeneratorContext { n: session.cfg.n, eps: session.cfg.eps, grains: digest.denominator };
    let counted = CountingSampler::new(d);
    let probes = generator.probes(&ctx, &counted, session.rng);
    session.transcript.add_d_samples(counted.count());
    debug_assert!(probes.len() as u64 <= generator.time_budget(ctx.n));
    if probes.is_empty() {
        return Ok(Vec::new());
    }
    session.query(&probes)
}

/// A full verified-oracle session: commit, identity test, then the generator's probes.
pub fn run_oracle_session(
    cfg: SessionConfig,
    generator: &dyn QueryGenerator,
    link: &mut dyn Transport,
    d: &dyn Sampler,
    rng: &mut Rng,
) -> Result<SessionOutcome, ConfigError> {
    let mut session = VerifierSession::new(cfg, link, rng)?;
    let result = run_steps(&mut session, generator, d);
    let (verdict, answers) = match result {
        Ok(a) => (Verdict::Accept, a),
        Err(r) => (Verdict::Reject(r), Vec::new()),
    };
    Ok(session.close(verdict, answers))
}
