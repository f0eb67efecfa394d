//! Trial runners shared by the command-line tool and the acceptance suite.
//!
//! Trial `t` of a run with seed `s` draws all of its randomness from
//! `child_seed(s, t)`, so results do not depend on how trials are scheduled.

pub mod brute;
mod report;

pub use report::{Check, Report, REPORT_HEADER};

use crate::adversaries::{PlantedBlocks, Strategy};
use crate::argument::{backend_by_name, run_general_argument, BackendContext, GeneralConfig, ProximityBackend, SpotCheck};
use crate::commitment::{extract, CollisionEvidence};
use crate::constants::Constants;
use crate::dist::{default_grains, DistError, GrainDistribution};
use crate::histogram::{estimate_histogram, exact_histogram, HistogramError};
use crate::properties::{
    general, histogram_budget, label_invariant, run_label_invariant_argument, FixedTarget, GeneralProperty,
    LabelInvariantConfig, LabelInvariantOutcome, PropertyError, PropertyParams,
};
use crate::protocol::session::{QuantileSampling, VerifierSession};
use crate::protocol::{
    run_oracle_session, ConfigError, Counters, InProcess, ProverMachine, Replay, SessionConfig, SessionOutcome,
    Transport,
};
use crate::rational::{ratio, to_f64, Rational};
use crate::rng::{child_seed, stream_rng, streams, Rng};
use crate::testers::{
    d_sample_budget, identity_test, uniformity_budget, uniformity_test, IdentityParams, LocalOracle, TailMode,
    TesterError,
};
use crate::verdict::{RejectReason, Verdict};
use crate::workload::{at_distance, WorkloadError};
use num_traits::Zero;
use rand::Rng as _;
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Histogram(#[from] HistogramError),
    #[error(transparent)]
    Tester(#[from] TesterError),
    #[error("unknown backend {0:?}")]
    Backend(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub verdict: Verdict,
    pub counters: Counters,
}

/// Runs `trials` trials in parallel; `f` gets the trial's seed.
pub fn run_trials<F>(trials: u64, seed: u64, f: F) -> Result<Vec<TrialRecord>, HarnessError>
where
    F: Fn(u64) -> Result<(Verdict, Counters), HarnessError> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = child_seed(seed, trial);
            let (verdict, counters) = f(seed)?;
            Ok(TrialRecord { trial, seed, verdict, counters })
        })
        .collect()
}

fn median(mut v: Vec<u64>) -> u64 {
    if v.is_empty() {
        return 0;
    }
    v.sort_unstable();
    v[v.len() / 2]
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub trials: u64,
    pub accepted: u64,
    pub median_d_samples: u64,
    pub max_d_samples: u64,
    /// Median of bytes sent plus bytes received.
    pub median_bytes: u64,
    pub median_rounds: u64,
    pub rejections: BTreeMap<&'static str, u64>,
}

impl Summary {
    pub fn of(records: &[TrialRecord]) -> Self {
        let mut rejections = BTreeMap::new();
        for r in records {
            if let Some(reason) = r.verdict.reason() {
                *rejections.entry(reason.name()).or_insert(0) += 1;
            }
        }
        Summary {
            trials: records.len() as u64,
            accepted: records.iter().filter(|r| r.verdict.accepted()).count() as u64,
            median_d_samples: median(records.iter().map(|r| r.counters.d_samples).collect()),
            max_d_samples: records.iter().map(|r| r.counters.d_samples).max().unwrap_or(0),
            median_bytes: median(records.iter().map(|r| r.counters.bytes_sent + r.counters.bytes_received).collect()),
            median_rounds: median(records.iter().map(|r| r.counters.rounds).collect()),
            rejections,
        }
    }

    pub fn accept_rate(&self) -> f64 {
        self.accepted as f64 / self.trials.max(1) as f64
    }

    pub fn reject_rate(&self) -> f64 {
        1.0 - self.accept_rate()
    }
}

/// What `D` looks like in a trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Workload {
    Random,
    Uniform,
    /// All mass on one random element.
    PointMass,
}

impl Workload {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "random" => Some(Workload::Random),
            "uniform" => Some(Workload::Uniform),
            "point-mass" => Some(Workload::PointMass),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Workload::Random => "random",
            Workload::Uniform => "uniform",
            Workload::PointMass => "point-mass",
        }
    }

    /// Uniform needs a multiple of `n` grains; `grains` is rounded up to one.
    pub fn build(self, n: usize, grains: u64, rng: &mut Rng) -> Result<GrainDistribution, DistError> {
        match self {
            Workload::Random => GrainDistribution::random(n, grains, rng),
            Workload::Uniform => uniform_near(n, grains),
            Workload::PointMass => GrainDistribution::point_mass(n, rng.gen_range(1..=n.max(1)), grains),
        }
    }
}

/// Uniform over `n * ceil(grains / n)` grains.
pub fn uniform_near(n: usize, grains: u64) -> Result<GrainDistribution, DistError> {
    let per = grains.div_ceil(n.max(1) as u64).max(1);
    GrainDistribution::uniform(n, per * n as u64)
}

fn protocol_rng(seed: u64) -> Rng {
    stream_rng(seed, streams::VERIFIER)
}

/// Verified-oracle sessions: `D` random, an honest prover commits `Q = D`,
/// cheaters commit or show a `Q` at distance `far_distance` from `D`.
#[derive(Clone, Debug)]
pub struct OracleScenario {
    pub session: SessionConfig,
    pub grains: u64,
    pub far_distance: Rational,
    pub strategy: Strategy,
    /// Quantile probes in step 2.
    pub probes: u64,
}

/// One session and what the extractor made of the same prover.
#[derive(Clone, Debug)]
pub struct ExtractionCheck {
    pub verdict: Verdict,
    /// Distinct `(element, pdf, cdf)` claims of verified openings.
    pub claims: usize,
    /// Claims that disagree with the extracted distribution.
    pub inconsistent: usize,
    pub collision: Option<CollisionEvidence>,
    pub extracted: Option<GrainDistribution>,
}

impl OracleScenario {
    pub fn new(n: usize, eps: Rational) -> Self {
        Self {
            session: SessionConfig::new(n, eps),
            grains: default_grains(n),
            far_distance: ratio(3, 8),
            strategy: Strategy::Honest,
            probes: 0,
        }
    }

    fn instance(&self, seed: u64) -> Result<(GrainDistribution, GrainDistribution), HarnessError> {
        let mut w = stream_rng(seed, streams::WORKLOAD);
        let d = GrainDistribution::random(self.session.n, self.grains, &mut w)?;
        let far = if self.far_distance.is_zero() { d.clone() } else { at_distance(&d, self.far_distance, &mut w)? };
        Ok((d, far))
    }

    /// The trial's prover, as a separate machine (e.g. for a prover process).
    pub fn prover(&self, seed: u64) -> Result<Box<dyn ProverMachine>, HarnessError> {
        let (d, far) = self.instance(seed)?;
        Ok(self.strategy.build(&d, &far, seed))
    }

    /// The verifier's side of the trial over any transport.
    pub fn run_over(&self, seed: u64, link: &mut dyn Transport) -> Result<SessionOutcome, HarnessError> {
        let (d, _) = self.instance(seed)?;
        let gen = QuantileSampling { count: self.probes };
        Ok(run_oracle_session(self.session.clone(), &gen, link, &d, &mut protocol_rng(seed))?)
    }

    pub fn run(&self, seed: u64) -> Result<SessionOutcome, HarnessError> {
        let mut link = InProcess::new(self.prover(seed)?);
        self.run_over(seed, &mut link)
    }

    pub fn trial(&self, seed: u64) -> Result<(Verdict, Counters), HarnessError> {
        let out = self.run(seed)?;
        Ok((out.verdict, *out.transcript.counters()))
    }

    /// Runs a session, then extracts from the same prover (rebuilt per replay)
    /// with parameter `eta` and compares every verified claim of the session
    /// with the extracted distribution.
    pub fn run_with_extraction(&self, seed: u64, eta: Rational) -> Result<ExtractionCheck, HarnessError> {
        let (d, far) = self.instance(seed)?;
        let out = self.run(seed)?;
        let Some(digest) = out.digest else {
            return Ok(ExtractionCheck {
                verdict: out.verdict,
                claims: 0,
                inconsistent: 0,
                collision: None,
                extracted: None,
            });
        };
        let strategy = &self.strategy;
        let mut opener = Replay::new(|run| strategy.build(&d, &far, child_seed(seed, run)), out.key);
        let ex = extract(&mut opener, &out.key, &digest, eta, &mut stream_rng(seed, streams::EXTRACTOR));
        let q = &ex.distribution;
        let inconsistent = out
            .claims
            .iter()
            .filter(|&&(x, pdf, cdf)| {
                let x = x as usize;
                q.count(x).ok() != Some(pdf) || q.cdf_grains(x).ok() != Some(cdf)
            })
            .count();
        Ok(ExtractionCheck {
            verdict: out.verdict,
            claims: out.claims.len(),
            inconsistent,
            collision: ex.collision,
            extracted: Some(ex.distribution),
        })
    }
}

/// Label-invariant arguments. The honest prover commits to `find(D)`;
/// cheaters commit to (or build on) the uniform distribution.
#[derive(Clone, Debug)]
pub struct LabelInvariantScenario {
    pub property: String,
    pub params: PropertyParams,
    pub config: LabelInvariantConfig,
    pub grains: u64,
    pub workload: Workload,
    pub strategy: Strategy,
}

impl LabelInvariantScenario {
    pub fn new(property: &str, n: usize, delta_c: Rational, delta_f: Rational) -> Self {
        Self {
            property: property.to_string(),
            params: PropertyParams::default(),
            config: LabelInvariantConfig::new(n, delta_c, delta_f),
            grains: default_grains(n),
            workload: Workload::Random,
            strategy: Strategy::Honest,
        }
    }

    pub fn run(&self, seed: u64) -> Result<LabelInvariantOutcome, HarnessError> {
        let n = self.config.n;
        let property = label_invariant(&self.property, &self.params)?;
        let d = self.workload.build(n, self.grains, &mut stream_rng(seed, streams::WORKLOAD))?;
        let honest = self.config.honest_prover(property.as_ref(), &d).distribution().clone();
        let far = uniform_near(n, self.grains)?;
        let mut link = InProcess::new(self.strategy.build(&honest, &far, seed));
        Ok(run_label_invariant_argument(property.as_ref(), &self.config, &d, &mut link, &mut protocol_rng(seed))?)
    }

    pub fn trial(&self, seed: u64) -> Result<(Verdict, Counters), HarnessError> {
        let out = self.run(seed)?;
        Ok((out.verdict, *out.session.transcript.counters()))
    }
}

/// A member `T` of a general property: random for `fixed-target`, uniform
/// for `uniformity`, random on the first `bound` elements for `support-size`.
pub fn reference_member(
    property: &str,
    params: &PropertyParams,
    n: usize,
    grains: u64,
    rng: &mut Rng,
) -> Result<GrainDistribution, HarnessError> {
    Ok(match property {
        "fixed-target" => match &params.target {
            Some(t) => t.clone(),
            None => GrainDistribution::random(n, grains, rng)?,
        },
        "uniformity" => uniform_near(n, grains)?,
        "support-size" => {
            let bound = params.support_bound.ok_or(PropertyError::MissingParameter("support-size", "bound"))?;
            let k = bound.clamp(1, n);
            let head = GrainDistribution::random(k, grains, rng)?;
            let mut counts = head.counts().to_vec();
            counts.resize(n, 0);
            GrainDistribution::new(counts, grains)?
        }
        other => return Err(PropertyError::Unknown(other.to_string()).into()),
    })
}

/// General arguments: `T` is a member of the property, `D` lies at
/// `distance` from `T`, the honest prover commits `Q = D`, and cheaters
/// commit to (or show) `T`.
#[derive(Clone, Debug)]
pub struct GeneralScenario {
    pub property: String,
    pub params: PropertyParams,
    pub config: GeneralConfig,
    pub grains: u64,
    pub distance: Rational,
    pub backend: String,
    pub strategy: Strategy,
    pub constants: Constants,
}

impl GeneralScenario {
    pub fn new(property: &str, n: usize, delta_c: Rational, delta_f: Rational, backend: &str) -> Self {
        Self {
            property: property.to_string(),
            params: PropertyParams::default(),
            config: GeneralConfig::new(n, delta_c, delta_f),
            grains: default_grains(n),
            distance: Rational::zero(),
            backend: backend.to_string(),
            strategy: Strategy::Honest,
            constants: Constants::builtin().clone(),
        }
    }

    pub fn run(&self, seed: u64) -> Result<SessionOutcome, HarnessError> {
        let n = self.config.n;
        let mut w = stream_rng(seed, streams::WORKLOAD);
        let t = reference_member(&self.property, &self.params, n, self.grains, &mut w)?;
        let d = if self.distance.is_zero() { t.clone() } else { at_distance(&t, self.distance, &mut w)? };
        let property: Box<dyn GeneralProperty> = match self.property.as_str() {
            "fixed-target" => Box::new(FixedTarget::new(t.clone())),
            name => general(name, &self.params)?,
        };
        let backend = backend_by_name(&self.backend, &self.constants)
            .ok_or_else(|| HarnessError::Backend(self.backend.clone()))?;
        let mut link = InProcess::new(self.strategy.build(&d, &t, seed));
        Ok(run_general_argument(property.as_ref(), &self.config, backend.as_ref(), &d, &mut link, &mut protocol_rng(seed))?)
    }

    pub fn trial(&self, seed: u64) -> Result<(Verdict, Counters), HarnessError> {
        let out = self.run(seed)?;
        Ok((out.verdict, *out.transcript.counters()))
    }
}

/// Commits a random `Q`, then runs the spot check with exactly `k` block
/// probes against a string with `planted` corrupted blocks. True if the
/// check caught a mismatch.
pub fn spot_check_detection_trial(n: usize, grains: u64, planted: u64, k: u64, seed: u64) -> Result<bool, HarnessError> {
    let q = GrainDistribution::random(n, grains, &mut stream_rng(seed, streams::WORKLOAD))?;
    let mut link = InProcess::new(PlantedBlocks::new(q.clone(), planted, seed));
    let mut rng = protocol_rng(seed);
    let mut session = VerifierSession::new(SessionConfig::new(n, ratio(1, 4)), &mut link, &mut rng)?;
    if session.commit().is_err() {
        return Ok(true);
    }
    let property = FixedTarget::new(q);
    let ctx = BackendContext { property: &property, n, delta_c: Rational::zero(), delta_f: ratio(1, 2) };
    let backend = SpotCheck { min_probes: k, c_spot: f64::MIN_POSITIVE };
    Ok(backend.verify(&mut session, &ctx) == Err(RejectReason::Backend))
}

/// Central interval of `Binomial(trials, p)` holding at least `level` of the mass.
pub fn binomial_interval(trials: u64, p: f64, level: f64) -> (u64, u64) {
    if p <= 0.0 {
        return (0, 0);
    }
    if p >= 1.0 {
        return (trials, trials);
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_pmf = Vec::with_capacity(trials as usize + 1);
    let mut cur = trials as f64 * lq;
    for k in 0..=trials {
        log_pmf.push(cur);
        if k < trials {
            cur += ((trials - k) as f64).ln() - ((k + 1) as f64).ln() + lp - lq;
        }
    }
    let tail = (1.0 - level) / 2.0;
    let mut acc = 0.0;
    let mut lo = 0;
    for (k, lpk) in log_pmf.iter().enumerate() {
        acc += lpk.exp();
        if acc > tail {
            lo = k as u64;
            break;
        }
    }
    acc = 0.0;
    let mut hi = trials;
    for (k, lpk) in log_pmf.iter().enumerate().rev() {
        acc += lpk.exp();
        if acc > tail {
            hi = k as u64;
            break;
        }
    }
    (lo, hi)
}

/// One histogram trial: draws `histogram_budget(n, tau, c_hist)` samples of a
/// random `Q` and checks `|p_j - Q(B_j)| <= max(tau^2 / log2 N, tau Q(B_j))`
/// for every bucket. Returns the largest ratio of error to allowance.
pub fn histogram_trial(n: usize, tau: Rational, c_hist: f64, seed: u64) -> Result<f64, HarnessError> {
    let mut rng = stream_rng(seed, streams::SAMPLER);
    let q = GrainDistribution::random(n, default_grains(n), &mut stream_rng(seed, streams::WORKLOAD))?;
    let s = histogram_budget(n, tau, c_hist);
    let est = estimate_histogram(
        (0..s).map(|_| {
            let x = q.sample(&mut rng);
            (x, q.pdf(x).expect("sampled element is in range"))
        }),
        tau,
        n,
    )?;
    let exact = exact_histogram(&q, tau)?;
    let t = to_f64(tau);
    let floor = t * t / (n.max(2) as f64).log2();
    Ok(est
        .masses
        .iter()
        .zip(&exact.masses)
        .map(|(&p, &e)| {
            let e = to_f64(e);
            (to_f64(p) - e).abs() / floor.max(t * e)
        })
        .fold(0.0, f64::max))
}

/// Standalone identity tester runs at one setting.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCalibration {
    pub trials: u64,
    /// Runs with `D = Q` that accepted.
    pub accepted_same: u64,
    /// Runs with `delta_TV(D, Q) = far` that rejected.
    pub rejected_far: u64,
    pub max_d_samples: u64,
    /// `d_sample_budget` for the setting.
    pub budget: u64,
}

impl IdentityCalibration {
    pub fn completeness(&self) -> f64 {
        self.accepted_same as f64 / self.trials.max(1) as f64
    }

    pub fn soundness(&self) -> f64 {
        self.rejected_far as f64 / self.trials.max(1) as f64
    }
}

/// `trials` runs each with `D = Q` and with `D` at distance `far` from `Q`,
/// `Q` random with `grains` grains.
pub fn identity_calibration(
    n: usize,
    grains: u64,
    eps: Rational,
    far: Rational,
    params: &IdentityParams,
    trials: u64,
    seed: u64,
) -> Result<IdentityCalibration, HarnessError> {
    let runs: Vec<(bool, bool, u64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = child_seed(seed, t);
            let mut w = stream_rng(s, streams::WORKLOAD);
            let q = GrainDistribution::random(n, grains, &mut w)?;
            let d_far = at_distance(&q, far, &mut w)?;
            let mut rng = protocol_rng(s);
            let same = identity_test(&mut LocalOracle::new(&q), &q, eps, params, &mut rng)?;
            let apart = identity_test(&mut LocalOracle::new(&q), &d_far, eps, params, &mut rng)?;
            Ok((same.accept, !apart.accept, same.d_samples.max(apart.d_samples)))
        })
        .collect::<Result<_, HarnessError>>()?;
    Ok(IdentityCalibration {
        trials,
        accepted_same: runs.iter().filter(|r| r.0).count() as u64,
        rejected_far: runs.iter().filter(|r| r.1).count() as u64,
        max_d_samples: runs.iter().map(|r| r.2).max().unwrap_or(0),
        budget: d_sample_budget(n, eps, params.c_id),
    })
}

/// Standalone collision tester over a domain of size `m`: fraction of
/// uniform streams accepted and of streams on half the domain rejected.
pub fn uniformity_calibration(m: u64, eps: Rational, c_unif: f64, trials: u64, seed: u64) -> (f64, f64) {
    let s = uniformity_budget(m, eps, c_unif).max(2);
    let runs: Vec<(bool, bool)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(child_seed(seed, t), streams::SAMPLER);
            let mut uniform: Vec<u64> = (0..s).map(|_| rng.gen_range(0..m)).collect();
            let mut half: Vec<u64> = (0..s).map(|_| rng.gen_range(0..m.div_ceil(2))).collect();
            let a = uniformity_test(&mut uniform, m, eps).map(|o| o.accept).unwrap_or(false);
            let b = uniformity_test(&mut half, m, eps).map(|o| !o.accept).unwrap_or(false);
            (a, b)
        })
        .collect();
    let frac = |f: fn(&(bool, bool)) -> bool| runs.iter().filter(|r| f(r)).count() as f64 / trials.max(1) as f64;
    (frac(|r| r.0), frac(|r| r.1))
}

/// One tried value during calibration.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationRow {
    pub constant: &'static str,
    pub value: f64,
    pub completeness: f64,
    pub soundness: f64,
    pub chosen: bool,
}

pub const C_ID_GRID: [f64; 8] = [2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 12.0, 16.0];
pub const C_TAIL_GRID: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
pub const C_UNIF_GRID: [f64; 7] = [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 16.0];
pub const C_HIST_GRID: [f64; 11] = [0.00390625, 0.0078125, 0.015625, 0.03125, 0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0];

/// Rate every calibrated constant must reach on the calibration seeds.
pub const CALIBRATION_TARGET: f64 = 0.95;

fn pick(
    rows: &mut Vec<CalibrationRow>,
    constant: &'static str,
    grid: &[f64],
    f: &mut dyn FnMut(f64) -> Result<(f64, f64), HarnessError>,
) -> Result<f64, HarnessError> {
    for &v in grid {
        let (c, s) = f(v)?;
        let ok = c >= CALIBRATION_TARGET && s >= CALIBRATION_TARGET;
        rows.push(CalibrationRow { constant, value: v, completeness: c, soundness: s, chosen: ok });
        if ok {
            return Ok(v);
        }
    }
    if let Some(last) = rows.last_mut() {
        last.chosen = true;
    }
    Ok(grid[grid.len() - 1])
}

/// Picks the smallest grid value of each constant that reaches
/// [`CALIBRATION_TARGET`] at `N = 1000` (`m = 1024` for the collision
/// tester, `N = 256` and `tau = 0.2` for histograms), `eps = 0.25`, far
/// distance `0.3`. Falls back to the largest value if none does.
pub fn calibrate(base: &Constants, trials: u64, seed: u64) -> Result<(Constants, Vec<CalibrationRow>), HarnessError> {
    let (n, grains, eps, far) = (1000, 1_000_000, ratio(1, 4), ratio(3, 10));
    let mut rows = Vec::new();
    let c_id = pick(&mut rows, "c_id", &C_ID_GRID, &mut |v| {
        let p = IdentityParams { c_id: v, c_tail: base.c_tail, tail_mode: TailMode::Exact };
        let r = identity_calibration(n, grains, eps, far, &p, trials, child_seed(seed, 1))?;
        Ok((r.completeness(), r.soundness()))
    })?;
    let c_tail = pick(&mut rows, "c_tail", &C_TAIL_GRID, &mut |v| {
        let p = IdentityParams { c_id, c_tail: v, tail_mode: TailMode::Estimate };
        let r = identity_calibration(n, grains, eps, far, &p, trials, child_seed(seed, 2))?;
        Ok((r.completeness(), r.soundness()))
    })?;
    let c_unif = pick(&mut rows, "c_unif", &C_UNIF_GRID, &mut |v| {
        Ok(uniformity_calibration(1024, eps, v, trials, child_seed(seed, 3)))
    })?;
    let c_hist = pick(&mut rows, "c_hist", &C_HIST_GRID, &mut |v| {
        let hits = (0..trials)
            .into_par_iter()
            .map(|t| histogram_trial(256, ratio(1, 5), v, child_seed(child_seed(seed, 4), t)).map(|w| w <= 1.0))
            .collect::<Result<Vec<bool>, _>>()?;
        let rate = hits.iter().filter(|&&h| h).count() as f64 / trials.max(1) as f64;
        Ok((rate, rate))
    })?;
    let constants = Constants { version: base.version + 1, c_id, c_tail, c_unif, c_hist, ..base.clone() };
    Ok((constants, rows))
}
