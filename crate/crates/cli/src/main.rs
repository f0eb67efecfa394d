//! `distproof`: runs sessions, arguments, calibrations, scaling sweeps and
//! exhaustive checks, and writes a deterministic report.
//!
//! The exit status is 0 iff every threshold check in the report passed.

use clap::{Parser, ValueEnum};
use distproof::adversaries::Strategy;
use distproof::constants::Constants;
use distproof::harness::{
    brute, calibrate, run_trials, GeneralScenario, LabelInvariantScenario, OracleScenario, Report, Summary,
    TrialRecord, Workload, CALIBRATION_TARGET,
};
use distproof::properties::PropertyParams;
use distproof::protocol::scaling::{measure_scaling, ScalingConfig};
use distproof::protocol::transport::serve;
use distproof::protocol::{Counters, ProbePolicy, StreamTransport};
use distproof::verdict::Verdict;
use distproof::rational::{parse_rational, ratio, to_f64, Rational};
use distproof::testers::{d_sample_budget, IdentityParams, TailMode};
use std::path::PathBuf;
use std::process::{Command, ExitCode, Stdio};

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_611;

/// Pairs per `(N, G)` case in the exhaustive reduction checks before sampling takes over.
const PAIR_BUDGET: u64 = 40_000;

/// Default grain count of general-argument runs.
const GENERAL_GRAINS: u64 = 100_000;

const REVISION: &str = concat!(env!("CARGO_PKG_VERSION"), "+", env!("DISTPROOF_REVISION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    OracleSession,
    LabelInvariant,
    GeneralArgument,
    Calibrate,
    Scaling,
    BruteForce,
    /// Answer one trial's verifier on stdin/stdout (used by `--spawn-prover`).
    ServeProver,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Expect {
    Accept,
    Reject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Tail {
    Auto,
    Estimate,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Probes {
    Distinct,
    PerQuery,
}

#[derive(Parser, Debug)]
#[command(name = "distproof", version, about = "Committed-distribution sessions, arguments and experiments")]
struct Args {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Domain size.
    #[arg(long)]
    n: Option<usize>,
    /// Grains per distribution (probability resolution).
    #[arg(long)]
    grains: Option<u64>,
    /// Identity-test distance, as a decimal or `p/q`.
    #[arg(long, value_parser = parse_rational)]
    eps: Option<Rational>,
    #[arg(long, value_parser = parse_rational)]
    delta_c: Option<Rational>,
    #[arg(long, value_parser = parse_rational)]
    delta_f: Option<Rational>,
    #[arg(long, default_value_t = 128)]
    kappa: u32,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    trials: Option<u64>,
    /// Property name, e.g. `uniformity`, `support-size`, `fixed-target`.
    #[arg(long)]
    property: Option<String>,
    /// Bound for `support-size`.
    #[arg(long)]
    support_bound: Option<usize>,
    /// Prover strategy: `name` or `name:param`.
    #[arg(long, default_value = "honest")]
    adversary: String,
    /// `full-reveal` or `spot-check`.
    #[arg(long, default_value = "full-reveal")]
    backend: String,
    /// Report path; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Constants file; otherwise `DISTPROOF_CONSTANTS`, otherwise the built-in file.
    #[arg(long)]
    constants: Option<PathBuf>,
    /// Where `calibrate` writes the new constants file.
    #[arg(long)]
    constants_out: Option<PathBuf>,
    /// Distance of the cheating prover's (oracle-session) or `D`'s (general-argument) distribution.
    #[arg(long, value_parser = parse_rational)]
    distance: Option<Rational>,
    /// Shape of `D` for label-invariant runs: `uniform`, `point-mass`, `random`.
    #[arg(long)]
    workload: Option<String>,
    /// Quantile probes in step 2 of oracle sessions.
    #[arg(long, default_value_t = 0)]
    probes: u64,
    /// Domain sizes for `scaling`.
    #[arg(long, value_delimiter = ',')]
    ns: Vec<usize>,
    /// Which verdict the thresholds expect; by default accept for honest provers on in-property inputs.
    #[arg(long, value_enum)]
    expect: Option<Expect>,
    #[arg(long, value_enum)]
    tail_mode: Option<Tail>,
    #[arg(long, value_enum)]
    probe_policy: Option<Probes>,
    /// Identity-test repetitions (majority vote).
    #[arg(long, default_value_t = 1)]
    repetitions: usize,
    /// Run each trial's prover as a child process speaking over pipes.
    #[arg(long)]
    spawn_prover: bool,
    /// Trial seed for `serve-prover`.
    #[arg(long)]
    trial_seed: Option<u64>,
}

type RunResult = Result<Option<Report>, String>;

fn identity_params(args: &Args, c: &Constants) -> IdentityParams {
    let mut p = IdentityParams::from_constants(c);
    if let Some(t) = args.tail_mode {
        p.tail_mode = match t {
            Tail::Auto => TailMode::Auto,
            Tail::Estimate => TailMode::Estimate,
            Tail::Exact => TailMode::Exact,
        };
    }
    p
}

fn probe_policy(args: &Args, default: ProbePolicy) -> ProbePolicy {
    match args.probe_policy {
        Some(Probes::Distinct) => ProbePolicy::Distinct,
        Some(Probes::PerQuery) => ProbePolicy::PerQuery,
        None => default,
    }
}

fn strategy(args: &Args) -> Result<Strategy, String> {
    Strategy::parse(&args.adversary).map_err(|e| e.to_string())
}

fn rate_checks(report: &mut Report, s: &Summary, expect: Expect) {
    match expect {
        Expect::Accept => report.check("accept_rate >= 0.9", s.accept_rate() >= 0.9, format!("{:.4}", s.accept_rate())),
        Expect::Reject => report.check("reject_rate >= 0.9", s.reject_rate() >= 0.9, format!("{:.4}", s.reject_rate())),
    }
}

fn add_trials(report: &mut Report, label: &str, records: &[TrialRecord]) -> Summary {
    for r in records {
        report.trial(label, r);
    }
    let s = Summary::of(records);
    report.summarize(label, &s);
    s
}

fn oracle_scenario(args: &Args, c: &Constants) -> Result<OracleScenario, String> {
    let n = args.n.unwrap_or(1024);
    let mut s = OracleScenario::new(n, args.eps.unwrap_or(ratio(1, 4)));
    s.session.kappa = args.kappa;
    s.session.identity = identity_params(args, c);
    s.session.probe_policy = probe_policy(args, s.session.probe_policy);
    s.session.repetitions = args.repetitions;
    if let Some(g) = args.grains {
        s.grains = g;
    }
    if let Some(d) = args.distance {
        s.far_distance = d;
    }
    s.strategy = strategy(args)?;
    s.probes = args.probes;
    Ok(s)
}

fn spawned_trial(args: &Args, scenario: &OracleScenario, seed: u64) -> Result<(Verdict, Counters), String> {
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let mut cmd = Command::new(exe);
    cmd.args(["--mode", "serve-prover", "--adversary", &args.adversary])
        .args(["--n", &scenario.session.n.to_string(), "--grains", &scenario.grains.to_string()])
        .args(["--distance", &scenario.far_distance.to_string(), "--trial-seed", &seed.to_string()])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped());
    let mut child = cmd.spawn().map_err(|e| format!("cannot spawn prover: {e}"))?;
    let (stdin, stdout) = (child.stdin.take().expect("piped"), child.stdout.take().expect("piped"));
    let mut link = StreamTransport::new(stdout, stdin);
    let out = scenario.run_over(seed, &mut link).map_err(|e| e.to_string());
    drop(link);
    child.wait().map_err(|e| e.to_string())?;
    let out = out?;
    Ok((out.verdict, *out.transcript.counters()))
}

fn oracle_session(args: &Args, c: &Constants, report: &mut Report) -> Result<(), String> {
    let s = oracle_scenario(args, c)?;
    let trials = args.trials.unwrap_or(200);
    report.param("n", s.session.n);
    report.param("grains", s.grains);
    report.param("eps", s.session.eps);
    report.param("kappa", s.session.kappa);
    report.param("adversary", &args.adversary);
    report.param("distance", s.far_distance);
    report.param("probes", s.probes);
    report.param("repetitions", s.session.repetitions);
    report.param("tail_mode", format!("{:?}", s.session.identity.tail_mode));
    report.param("probe_policy", format!("{:?}", s.session.probe_policy));
    report.param("spawn_prover", args.spawn_prover);
    let records = if args.spawn_prover {
        let mut out = Vec::new();
        for trial in 0..trials {
            let seed = distproof::rng::child_seed(args.seed, trial);
            let (verdict, counters) = spawned_trial(args, &s, seed)?;
            out.push(TrialRecord { trial, seed, verdict, counters });
        }
        out
    } else {
        run_trials(trials, args.seed, |seed| s.trial(seed)).map_err(|e| e.to_string())?
    };
    let summary = add_trials(report, s.strategy.name(), &records);
    let expect = args.expect.unwrap_or(if s.strategy == Strategy::Honest { Expect::Accept } else { Expect::Reject });
    rate_checks(report, &summary, expect);
    let (n, eps) = (s.session.n as f64, to_f64(s.session.eps));
    let reference = c.c_id * n.sqrt() / eps.powi(2) + c.c_tail / eps.powi(4);
    report.summary("reference_d_samples", format!("{reference:.0}"));
    let budget = s.session.repetitions as u64 * d_sample_budget(s.session.n, s.session.eps, s.session.identity.c_id);
    report.summary("d_sample_budget", budget);
    report.check(
        "max d_samples <= d_sample_budget",
        summary.max_d_samples <= budget,
        format!("{} <= {budget}", summary.max_d_samples),
    );
    Ok(())
}

fn label_invariant(args: &Args, c: &Constants, report: &mut Report) -> Result<(), String> {
    let property = args.property.clone().unwrap_or_else(|| "uniformity".into());
    let n = args.n.unwrap_or(1024);
    let (dc, df) = (args.delta_c.unwrap_or(ratio(1, 20)), args.delta_f.unwrap_or(ratio(9, 20)));
    let mut s = LabelInvariantScenario::new(&property, n, dc, df);
    s.config = distproof::properties::LabelInvariantConfig::with_constants(n, dc, df, c);
    s.config.kappa = args.kappa;
    s.config.identity = identity_params(args, c);
    s.config.probe_policy = probe_policy(args, s.config.probe_policy);
    s.params = PropertyParams { support_bound: args.support_bound, target: None };
    if let Some(g) = args.grains {
        s.grains = g;
    }
    s.strategy = strategy(args)?;
    let honest = s.strategy == Strategy::Honest;
    s.workload = match &args.workload {
        Some(w) => Workload::parse(w).ok_or_else(|| format!("unknown workload {w:?}"))?,
        None if honest => Workload::Uniform,
        None => Workload::PointMass,
    };
    let trials = args.trials.unwrap_or(200);
    report.param("property", &property);
    report.param("n", n);
    report.param("grains", s.grains);
    report.param("delta_c", dc);
    report.param("delta_f", df);
    report.param("kappa", s.config.kappa);
    report.param("adversary", &args.adversary);
    report.param("workload", s.workload.name());
    report.param("histogram_probes", s.config.histogram_probes());
    let records = run_trials(trials, args.seed, |seed| s.trial(seed)).map_err(|e| e.to_string())?;
    let summary = add_trials(report, s.strategy.name(), &records);
    let expect = args.expect.unwrap_or(if honest && s.workload == Workload::Uniform { Expect::Accept } else { Expect::Reject });
    rate_checks(report, &summary, expect);
    Ok(())
}

fn general_argument(args: &Args, c: &Constants, report: &mut Report) -> Result<(), String> {
    let property = args.property.clone().unwrap_or_else(|| "fixed-target".into());
    let n = args.n.unwrap_or(256);
    let (dc, df) = (args.delta_c.unwrap_or(ratio(1, 20)), args.delta_f.unwrap_or(ratio(9, 20)));
    let mut s = GeneralScenario::new(&property, n, dc, df, &args.backend);
    s.constants = c.clone();
    s.config.kappa = args.kappa;
    s.config.identity = identity_params(args, c);
    s.config.probe_policy = probe_policy(args, s.config.probe_policy);
    s.params = PropertyParams { support_bound: args.support_bound, target: None };
    // decimal distances such as 0.6 need a decimal grain count
    s.grains = args.grains.unwrap_or(GENERAL_GRAINS);
    s.distance = args.distance.unwrap_or(ratio(0, 1));
    s.strategy = strategy(args)?;
    let trials = args.trials.unwrap_or(200);
    report.param("property", &property);
    report.param("n", n);
    report.param("grains", s.grains);
    report.param("delta_c", dc);
    report.param("delta_f", df);
    report.param("kappa", s.config.kappa);
    report.param("backend", &args.backend);
    report.param("adversary", &args.adversary);
    report.param("distance", s.distance);
    let records = run_trials(trials, args.seed, |seed| s.trial(seed)).map_err(|e| e.to_string())?;
    let summary = add_trials(report, s.strategy.name(), &records);
    let in_property = s.distance == ratio(0, 1);
    let expect = args.expect.unwrap_or(if s.strategy == Strategy::Honest && in_property {
        Expect::Accept
    } else {
        Expect::Reject
    });
    rate_checks(report, &summary, expect);
    Ok(())
}

fn calibrate_mode(args: &Args, c: &Constants, report: &mut Report) -> Result<(), String> {
    let trials = args.trials.unwrap_or(200);
    report.param("trials", trials);
    report.param("target", CALIBRATION_TARGET);
    let (chosen, rows) = calibrate(c, trials, args.seed).map_err(|e| e.to_string())?;
    for r in &rows {
        report.trial_line(format!(
            "{}={} completeness={:.4} soundness={:.4}{}",
            r.constant,
            r.value,
            r.completeness,
            r.soundness,
            if r.chosen { " chosen" } else { "" }
        ));
    }
    for line in chosen.to_text().lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            report.summary(k, v);
        }
    }
    for r in rows.iter().filter(|r| r.chosen) {
        let ok = r.completeness >= CALIBRATION_TARGET && r.soundness >= CALIBRATION_TARGET;
        report.check(&format!("{} reaches target", r.constant), ok, format!("{} at {}", r.completeness.min(r.soundness), r.value));
    }
    if let Some(path) = &args.constants_out {
        let text = format!("# Tester constants. Regenerate with `distproof --mode calibrate --constants-out <path>`.\n{}", chosen.to_text());
        std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn scaling(args: &Args, c: &Constants, report: &mut Report) -> Result<(), String> {
    let ns = if args.ns.is_empty() { vec![256, 1024, 4096] } else { args.ns.clone() };
    let mut cfg = ScalingConfig::new(ns.clone(), args.eps.unwrap_or(ratio(1, 4)));
    cfg.runs = args.trials.unwrap_or(50) as usize;
    cfg.seed = args.seed;
    cfg.identity = identity_params(args, c);
    if args.tail_mode.is_none() {
        cfg.identity.tail_mode = TailMode::Estimate;
    }
    cfg.probe_policy = probe_policy(args, cfg.probe_policy);
    report.param("ns", ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","));
    report.param("eps", cfg.eps);
    report.param("runs", cfg.runs);
    report.param("tail_mode", format!("{:?}", cfg.identity.tail_mode));
    report.param("probe_policy", format!("{:?}", cfg.probe_policy));
    let r = measure_scaling(&cfg);
    for p in &r.points {
        report.trial_line(format!(
            "n={} eps={} median_d_samples={} median_bytes={} accept_rate={:.4}",
            p.n, p.eps, p.median_d_samples, p.median_bytes, p.accept_rate
        ));
    }
    for g in &r.n_growth {
        report.summary(&format!("growth.{}_to_{}.d_samples", g.from, g.to), format!("{:.4}", g.d_samples));
        report.summary(&format!("growth.{}_to_{}.bytes", g.from, g.to), format!("{:.4}", g.bytes));
    }
    if let Some((n, d, b)) = r.eps_growth {
        report.summary(&format!("growth.half_eps_at_{n}.d_samples"), format!("{d:.4}"));
        report.summary(&format!("growth.half_eps_at_{n}.bytes"), format!("{b:.4}"));
    }
    report.check("growth per 4x N in [1.6, 2.8]", r.n_growth_ok(), format!("{:?}", r.n_growth.iter().map(|g| (g.d_samples, g.bytes)).collect::<Vec<_>>()));
    report.check("growth per halved eps in [3, 6]", r.eps_growth_ok(), format!("{:?}", r.eps_growth));
    Ok(())
}

fn brute_force(args: &Args, report: &mut Report) -> Result<(), String> {
    let n = args.n.unwrap_or(4);
    let g = args.grains.unwrap_or(12);
    report.param("n", n);
    report.param("grains", g);
    report.param("pair_budget", PAIR_BUDGET);
    let runs = [
        ("representation", brute::representation_checks(n, g)),
        ("histogram", brute::histogram_checks(n, g, &[ratio(1, 5), ratio(1, 2)])),
        ("reduction", brute::reduction_checks(n, g, PAIR_BUDGET, args.seed)),
    ];
    for (name, r) in &runs {
        for f in r.failures.iter().take(20) {
            report.trial_line(format!("{name} failure: {f}"));
        }
        report.summary(&format!("{name}.distributions"), r.distributions);
        report.summary(&format!("{name}.pairs"), r.pairs);
        report.summary(&format!("{name}.sampled_pairs"), r.sampled_pairs);
        report.summary(&format!("{name}.coordinate_pairs"), r.coordinate_pairs);
        report.check(&format!("{name} checks"), r.passed(), format!("{} failures", r.failures.len()));
    }
    Ok(())
}

fn serve_prover(args: &Args, c: &Constants) -> Result<(), String> {
    let seed = args.trial_seed.ok_or("serve-prover needs --trial-seed")?;
    let scenario = oracle_scenario(args, c)?;
    let mut prover = scenario.prover(seed).map_err(|e| e.to_string())?;
    let (stdin, stdout) = (std::io::stdin().lock(), std::io::stdout().lock());
    serve(&mut prover, stdin, stdout).map_err(|e| e.to_string())
}

fn run(args: &Args) -> RunResult {
    let c = match &args.constants {
        Some(p) => Constants::load(p),
        None => Constants::from_env(),
    }
    .map_err(|e| e.to_string())?;
    if args.mode == Mode::ServeProver {
        serve_prover(args, &c)?;
        return Ok(None);
    }
    let mode = args.mode.to_possible_value().expect("no skipped variants").get_name().to_string();
    let mut report = Report::new(&mode, c.version, REVISION);
    report.param("seed", args.seed);
    match args.mode {
        Mode::OracleSession => oracle_session(args, &c, &mut report)?,
        Mode::LabelInvariant => label_invariant(args, &c, &mut report)?,
        Mode::GeneralArgument => general_argument(args, &c, &mut report)?,
        Mode::Calibrate => calibrate_mode(args, &c, &mut report)?,
        Mode::Scaling => scaling(args, &c, &mut report)?,
        Mode::BruteForce => brute_force(args, &mut report)?,
        Mode::ServeProver => unreachable!(),
    }
    Ok(Some(report))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(report)) => {
            let text = report.to_text();
            let written = match &args.out {
                Some(p) => std::fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("distproof: {e}");
                    ExitCode::from(2)
                }
                Ok(()) if report.passed() => ExitCode::SUCCESS,
                Ok(()) => ExitCode::FAILURE,
            }
        }
        Err(e) => {
            eprintln!("distproof: {e}");
            ExitCode::from(2)
        }
    }
}
