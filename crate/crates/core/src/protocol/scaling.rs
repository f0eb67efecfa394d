//! How session cost grows with the domain size and with `1/eps`.

use super::prover::HonestProver;
use super::session::{run_oracle_session, NoProbes, ProbePolicy, SessionConfig};
use super::transport::InProcess;
use crate::dist::{default_grains, GrainDistribution};
use crate::rational::Rational;
use crate::rng::{child_seed, stream_rng, streams};
use crate::testers::{IdentityParams, TailMode};
use rayon::prelude::*;

pub const GROWTH_PER_4X_N: (f64, f64) = (1.6, 2.8);
pub const GROWTH_PER_HALF_EPS: (f64, f64) = (3.0, 6.0);

#[derive(Clone, Debug)]
pub struct ScalingConfig {
    pub ns: Vec<usize>,
    pub eps: Rational,
    pub runs: usize,
    pub seed: u64,
    pub identity: IdentityParams,
    pub probe_policy: ProbePolicy,
    /// Domain size at which `eps` is also halved.
    pub halve_eps_at: Option<usize>,
}

impl ScalingConfig {
    pub fn new(ns: Vec<usize>, eps: Rational) -> Self {
        let halve = ns.get(ns.len() / 2).copied();
        Self {
            ns,
            eps,
            runs: 50,
            seed: 0,
            identity: IdentityParams { tail_mode: TailMode::Estimate, ..IdentityParams::default() },
            probe_policy: ProbePolicy::PerQuery,
            halve_eps_at: halve,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingPoint {
    pub n: usize,
    pub eps: Rational,
    pub median_d_samples: u64,
    /// Median of bytes sent plus bytes received.
    pub median_bytes: u64,
    pub accept_rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Growth {
    pub from: usize,
    pub to: usize,
    pub d_samples: f64,
    pub bytes: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    pub n_growth: Vec<Growth>,
    /// `(n, d_samples ratio, bytes ratio)` for halved `eps`.
    pub eps_growth: Option<(usize, f64, f64)>,
}

fn within(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

impl ScalingReport {
    pub fn n_growth_ok(&self) -> bool {
        self.n_growth.iter().all(|g| within(g.d_samples, GROWTH_PER_4X_N) && within(g.bytes, GROWTH_PER_4X_N))
    }

    pub fn eps_growth_ok(&self) -> bool {
        self.eps_growth.map_or(true, |(_, d, _)| within(d, GROWTH_PER_HALF_EPS))
    }
}

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    v[v.len() / 2]
}

fn measure_point(cfg: &ScalingConfig, n: usize, eps: Rational, point: u64) -> ScalingPoint {
    let trials: Vec<(u64, u64, bool)> = (0..cfg.runs as u64)
        .into_par_iter()
        .map(|t| {
            let seed = child_seed(child_seed(cfg.seed, point), t);
            let q = GrainDistribution::random(n, default_grains(n), &mut stream_rng(seed, streams::WORKLOAD))
                .expect("default grains fit");
            let mut session = SessionConfig::new(n, eps);
            session.identity = cfg.identity;
            session.probe_policy = cfg.probe_policy;
            let mut link = InProcess::new(HonestProver::new(q.clone()));
            let out = run_oracle_session(session, &NoProbes, &mut link, &q, &mut stream_rng(seed, streams::VERIFIER))
                .expect("valid session config");
            let c = out.transcript.counters();
            (c.d_samples, c.bytes_sent + c.bytes_received, out.verdict.accepted())
        })
        .collect();
    ScalingPoint {
        n,
        eps,
        median_d_samples: median(trials.iter().map(|t| t.0).collect()),
        median_bytes: median(trials.iter().map(|t| t.1).collect()),
        accept_rate: trials.iter().filter(|t| t.2).count() as f64 / trials.len() as f64,
    }
}

/// Honest sessions (`D = Q`, random `Q`) at every domain size, plus one
/// point with `eps / 2`; reports medians and growth factors.
pub fn measure_scaling(cfg: &ScalingConfig) -> ScalingReport {
    let mut points: Vec<ScalingPoint> =
        cfg.ns.iter().enumerate().map(|(i, &n)| measure_point(cfg, n, cfg.eps, i as u64)).collect();
    let ratio = |a: u64, b: u64| b as f64 / a as f64;
    let n_growth = points
        .windows(2)
        .map(|w| Growth {
            from: w[0].n,
            to: w[1].n,
            d_samples: ratio(w[0].median_d_samples, w[1].median_d_samples),
            bytes: ratio(w[0].median_bytes, w[1].median_bytes),
        })
        .collect();
    let eps_growth = cfg.halve_eps_at.map(|n| {
        let base = points.iter().find(|p| p.n == n).cloned().unwrap_or_else(|| measure_point(cfg, n, cfg.eps, 1000));
        let half = measure_point(cfg, n, cfg.eps / 2, 1001);
        let g = (n, ratio(base.median_d_samples, half.median_d_samples), ratio(base.median_bytes, half.median_bytes));
        points.push(half);
        g
    });
    ScalingReport { points, n_growth, eps_growth }
}
