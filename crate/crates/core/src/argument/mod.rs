//! Verifying a general property: the oracle session binds the prover to
//! `Q`, then a proximity backend checks that `Q` is close to the property.

mod full_reveal;
mod spot_check;

pub use full_reveal::FullReveal;
pub use spot_check::{detection_probability, SpotCheck};

use crate::constants::Constants;
use crate::dist::{GrainDistribution, Sampler};
use crate::properties::GeneralProperty;
use crate::protocol::session::VerifierSession;
use crate::protocol::{ConfigError, ProbePolicy, SessionConfig, SessionOutcome, TranscriptMode, Transport};
use crate::rational::Rational;
use crate::representation::{build_representation, BlockCode};
use crate::rng::Rng;
use crate::testers::IdentityParams;
use crate::verdict::{RejectReason, Verdict};

pub const FULL_REVEAL: u8 = 1;
pub const SPOT_CHECK: u8 = 2;

/// What a backend knows about the instance.
#[derive(Clone, Copy)]
pub struct BackendContext<'a> {
    pub property: &'a dyn GeneralProperty,
    pub n: usize,
    pub delta_c: Rational,
    pub delta_f: Rational,
}

impl BackendContext<'_> {
    /// `(delta_f - delta_c) / 20`, the Hamming distance the backend must detect.
    pub fn proximity(&self) -> Rational {
        (self.delta_f - self.delta_c) / 20
    }

    /// Accept threshold on the property distance, `delta_c + (delta_f - delta_c)/2`.
    pub fn threshold(&self) -> Rational {
        self.delta_c + (self.delta_f - self.delta_c) / 2
    }
}

/// Checks, after the commitment phase, that the committed distribution is
/// close to the property. The committed distribution may only be read
/// through verified openings.
pub trait ProximityBackend: Send + Sync {
    fn id(&self) -> u8;
    fn name(&self) -> &'static str;
    fn verify(&self, session: &mut VerifierSession<'_>, ctx: &BackendContext<'_>) -> Result<(), RejectReason>;
}

/// The honest prover's answer to a backend request about `q`.
pub fn honest_backend_reply(q: &GrainDistribution, backend: u8, _request: &[u8]) -> Option<Vec<u8>> {
    match backend {
        FULL_REVEAL => Some(q.to_bytes()),
        SPOT_CHECK => Some(build_representation(q, &BlockCode::for_domain(q.domain_size())).to_bytes()),
        _ => None,
    }
}

pub const BACKEND_NAMES: [&str; 2] = ["full-reveal", "spot-check"];

pub fn backend_by_name(name: &str, c: &Constants) -> Option<Box<dyn ProximityBackend>> {
    match name {
        "full-reveal" => Some(Box::new(FullReveal)),
        "spot-check" => Some(Box::new(SpotCheck { min_probes: 0, c_spot: c.c_spot })),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct GeneralConfig {
    pub n: usize,
    pub delta_c: Rational,
    pub delta_f: Rational,
    pub kappa: u32,
    pub identity: IdentityParams,
    pub probe_policy: ProbePolicy,
    pub transcript: TranscriptMode,
}

impl GeneralConfig {
    pub fn new(n: usize, delta_c: Rational, delta_f: Rational) -> Self {
        let base = SessionConfig::new(n, (delta_f - delta_c) / 10);
        Self {
            n,
            delta_c,
            delta_f,
            kappa: base.kappa,
            identity: base.identity,
            probe_policy: base.probe_policy,
            transcript: base.transcript,
        }
    }

    /// `(delta_f - delta_c) / 10`.
    pub fn eps(&self) -> Rational {
        (self.delta_f - self.delta_c) / 10
    }
}

/// Commitment and identity test with `eps = (delta_f - delta_c)/10`, then the backend.
pub fn run_general_argument(
    property: &dyn GeneralProperty,
    cfg: &GeneralConfig,
    backend: &dyn ProximityBackend,
    d: &dyn Sampler,
    prover: &mut dyn Transport,
    rng: &mut Rng,
) -> Result<SessionOutcome, ConfigError> {
    let session_cfg = SessionConfig {
        kappa: cfg.kappa,
        identity: cfg.identity,
        probe_policy: cfg.probe_policy,
        transcript: cfg.transcript,
        ..SessionConfig::new(cfg.n, cfg.eps())
    };
    let mut session = VerifierSession::new(session_cfg, prover, rng)?;
    let ctx = BackendContext { property, n: cfg.n, delta_c: cfg.delta_c, delta_f: cfg.delta_f };
    let result = session.commit().and_then(|_| session.identity_phase(d)).and_then(|_| backend.verify(&mut session, &ctx));
    let verdict = match result {
        Ok(()) => Verdict::Accept,
        Err(r) => Verdict::Reject(r),
    };
    Ok(session.close(verdict, Vec::new()))
}
