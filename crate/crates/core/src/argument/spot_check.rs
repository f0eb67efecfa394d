use super::{BackendContext, ProximityBackend, SPOT_CHECK};
use crate::commitment::Probe;
use crate::protocol::session::VerifierSession;
use crate::rational::{ratio, to_f64, Rational};
use crate::representation::{test_pi, BlockCode, RepresentationString};
use crate::verdict::RejectReason;
use rand::Rng as _;

/// The prover sends the representation string; the verifier compares `k`
/// random blocks with blocks read from the commitment, then decides on the
/// string itself.
#[derive(Clone, Copy, Debug)]
pub struct SpotCheck {
    /// Lower bound on `k`; `ceil(c_spot / proximity)` applies in any case.
    pub min_probes: u64,
    pub c_spot: f64,
}

impl SpotCheck {
    pub fn probes(&self, proximity: Rational) -> u64 {
        let needed = (self.c_spot / to_f64(proximity)).ceil() as u64;
        needed.max(self.min_probes).max(1)
    }
}

/// `1 - (1 - f)^k`: the chance that `k` uniform block checks hit a planted fraction `f`.
pub fn detection_probability(f: f64, k: u64) -> f64 {
    1.0 - (1.0 - f).powf(k as f64)
}

impl ProximityBackend for SpotCheck {
    fn id(&self) -> u8 {
        SPOT_CHECK
    }

    fn name(&self) -> &'static str {
        "spot-check"
    }

    fn verify(&self, session: &mut VerifierSession<'_>, ctx: &BackendContext<'_>) -> Result<(), RejectReason> {
        let bytes = session.backend(SPOT_CHECK, Vec::new())?;
        let x = RepresentationString::from_bytes(&bytes).map_err(|_| RejectReason::Malformed)?;
        let grains = session.digest().ok_or(RejectReason::BadDigest)?.denominator;
        let code = BlockCode::for_domain(ctx.n);
        if x.n != ctx.n || x.num_blocks() != grains || x.code() != code {
            return Err(RejectReason::Backend);
        }
        let k = self.probes(ctx.proximity());
        let blocks: Vec<u64> = (0..k).map(|_| session.rng().gen_range(1..=grains)).collect();
        let probes: Vec<Probe> = blocks.iter().map(|&j| Probe::Quantile(ratio(j.into(), grains.into()))).collect();
        let answers = session.query(&probes)?;
        for (&j, a) in blocks.iter().zip(&answers) {
            if x.block(j) != code.encode_element(a.element).as_slice() {
                return Err(RejectReason::Backend);
            }
        }
        let slack = ctx.threshold() - ctx.delta_c;
        if test_pi(&x, ctx.property, ctx.delta_c, slack) {
            Ok(())
        } else {
            Err(RejectReason::Property)
        }
    }
}
