//! Verifying a label-invariant property of `D` through a committed `Q`.

use super::LabelInvariantProperty;
use crate::constants::Constants;
use crate::dist::{GrainDistribution, Sampler};
use crate::histogram::{estimate_histogram, BucketHistogram};
use crate::protocol::session::{run_steps, QuantileSampling, VerifierSession};
use crate::protocol::{ConfigError, HonestProver, ProbePolicy, SessionConfig, SessionOutcome, TranscriptMode, Transport};
use crate::rational::{to_f64, Rational};
use crate::rng::Rng;
use crate::testers::IdentityParams;
use crate::verdict::{RejectReason, Verdict};

/// `(eps, tau) = (delta_c + gap/10, gap/10)` with `gap = delta_f - delta_c`.
pub fn argument_parameters(delta_c: Rational, delta_f: Rational) -> (Rational, Rational) {
    let tau = (delta_f - delta_c) / 10;
    (delta_c + tau, tau)
}

/// `ceil(c_hist * log2(N)^3 / tau^4)`, at least 1.
pub fn histogram_budget(n: usize, tau: Rational, c_hist: f64) -> u64 {
    let log = (n.max(2) as f64).log2();
    ((c_hist * log.powi(3) / to_f64(tau).powi(4)).ceil() as u64).max(1)
}

#[derive(Clone, Debug)]
pub struct LabelInvariantConfig {
    pub n: usize,
    pub delta_c: Rational,
    pub delta_f: Rational,
    pub kappa: u32,
    pub identity: IdentityParams,
    pub c_hist: f64,
    /// Upper limit on the histogram probes of one session.
    pub max_histogram_probes: u64,
    pub probe_policy: ProbePolicy,
    pub transcript: TranscriptMode,
}

impl LabelInvariantConfig {
    pub fn new(n: usize, delta_c: Rational, delta_f: Rational) -> Self {
        Self::with_constants(n, delta_c, delta_f, Constants::builtin())
    }

    pub fn with_constants(n: usize, delta_c: Rational, delta_f: Rational, c: &Constants) -> Self {
        let base = SessionConfig::new(n, delta_c);
        Self {
            n,
            delta_c,
            delta_f,
            kappa: base.kappa,
            identity: IdentityParams::from_constants(c),
            c_hist: c.c_hist,
            max_histogram_probes: c.max_histogram_probes,
            probe_policy: base.probe_policy,
            transcript: base.transcript,
        }
    }

    pub fn histogram_probes(&self) -> u64 {
        let (_, tau) = argument_parameters(self.delta_c, self.delta_f);
        histogram_budget(self.n, tau, self.c_hist).min(self.max_histogram_probes.max(1))
    }

    /// The distribution an honest prover commits to.
    pub fn honest_prover(&self, property: &dyn LabelInvariantProperty, d: &GrainDistribution) -> HonestProver {
        let (_, tau) = argument_parameters(self.delta_c, self.delta_f);
        HonestProver::new(property.find(self.n, self.delta_c, tau, d))
    }
}

#[derive(Clone, Debug)]
pub struct LabelInvariantOutcome {
    pub verdict: Verdict,
    pub session: SessionOutcome,
    pub histogram: Option<BucketHistogram>,
    pub eps: Rational,
    pub tau: Rational,
}

/// Runs the verified-oracle session with `eps` and quantile-sampling probes,
/// builds a histogram from the answered pdfs, and asks `property` to decide.
pub fn run_label_invariant_argument(
    property: &dyn LabelInvariantProperty,
    cfg: &LabelInvariantConfig,
    d: &dyn Sampler,
    prover: &mut dyn Transport,
    rng: &mut Rng,
) -> Result<LabelInvariantOutcome, ConfigError> {
    let (eps, tau) = argument_parameters(cfg.delta_c, cfg.delta_f);
    let session_cfg = SessionConfig {
        kappa: cfg.kappa,
        identity: cfg.identity,
        probe_policy: cfg.probe_policy,
        transcript: cfg.transcript,
        ..SessionConfig::new(cfg.n, eps)
    };
    let generator = QuantileSampling { count: cfg.histogram_probes() };
    let mut session = VerifierSession::new(session_cfg, prover, rng)?;
    let mut histogram = None;
    let (verdict, answers) = match run_steps(&mut session, &generator, d) {
        Err(reason) => (Verdict::Reject(reason), Vec::new()),
        Ok(answers) => match estimate_histogram(answers.iter().map(|a| (a.element as usize, a.pdf)), tau, cfg.n) {
            Ok(h) => {
                let ok = property.decide(tau, cfg.n, &h);
                histogram = Some(h);
                (if ok { Verdict::Accept } else { Verdict::Reject(RejectReason::Property) }, answers)
            }
            Err(_) => (Verdict::Reject(RejectReason::Property), answers),
        },
    };
    let session = session.close(verdict, answers);
    Ok(LabelInvariantOutcome { verdict, session, histogram, eps, tau })
}
