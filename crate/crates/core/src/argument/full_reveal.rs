use super::{BackendContext, ProximityBackend, FULL_REVEAL};
use crate::commitment::digest;
use crate::dist::GrainDistribution;
use crate::protocol::session::VerifierSession;
use crate::rational::Rational;
use crate::verdict::RejectReason;
use num_traits::Zero;

/// The prover sends all of `Q`; the verifier recommits it and evaluates the property directly.
#[derive(Clone, Copy, Debug, Default)]
pub struct FullReveal;

impl ProximityBackend for FullReveal {
    fn id(&self) -> u8 {
        FULL_REVEAL
    }

    fn name(&self) -> &'static str {
        "full-reveal"
    }

    fn verify(&self, session: &mut VerifierSession<'_>, ctx: &BackendContext<'_>) -> Result<(), RejectReason> {
        let bytes = session.backend(FULL_REVEAL, Vec::new())?;
        let q = GrainDistribution::from_bytes(&bytes).map_err(|_| RejectReason::Malformed)?;
        if q.domain_size() != ctx.n {
            return Err(RejectReason::Backend);
        }
        let committed = session.digest().copied().ok_or(RejectReason::BadDigest)?;
        if digest(session.key(), &q).0 != committed {
            return Err(RejectReason::Backend);
        }
        let dist = ctx.property.dist(ctx.n, &q, Rational::zero()).map_err(|_| RejectReason::Property)?;
        if dist <= ctx.threshold() {
            Ok(())
        } else {
            Err(RejectReason::Property)
        }
    }
}
