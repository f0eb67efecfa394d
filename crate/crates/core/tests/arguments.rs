use distproof::adversaries::Strategy;
use distproof::argument::detection_probability;
use distproof::harness::{
    binomial_interval, run_trials, spot_check_detection_trial, GeneralScenario, LabelInvariantScenario,
    OracleScenario, Report, Summary, Workload,
};
use distproof::rational::ratio;
use distproof::verdict::{RejectReason, Verdict};

const BACKENDS: [&str; 2] = ["full-reveal", "spot-check"];

fn general(backend: &str) -> GeneralScenario {
    let mut s = GeneralScenario::new("fixed-target", 64, ratio(1, 20), ratio(9, 20), backend);
    s.grains = 100_000;
    s
}

fn verdicts(f: impl Fn(u64) -> Verdict) -> Vec<Verdict> {
    (0..6).map(f).collect()
}

fn count(v: &[Verdict], want: Verdict) -> usize {
    v.iter().filter(|&&x| x == want).count()
}

#[test]
fn honest_general_arguments_accept() {
    for b in BACKENDS {
        let s = general(b);
        let v = verdicts(|seed| s.run(seed).unwrap().verdict);
        assert!(count(&v, Verdict::Accept) >= 5, "{b}: {v:?}");
    }
}

#[test]
fn far_inputs_fail_on_the_property() {
    for b in BACKENDS {
        let s = GeneralScenario { distance: ratio(3, 5), ..general(b) };
        let v = verdicts(|seed| s.run(seed).unwrap().verdict);
        assert_eq!(count(&v, Verdict::Reject(RejectReason::Property)), 6, "{b}: {v:?}");
    }
}

#[test]
fn showing_a_different_distribution_fails_the_backend() {
    for b in BACKENDS {
        let s = GeneralScenario { distance: ratio(3, 5), strategy: Strategy::RepresentationSwap, ..general(b) };
        let v = verdicts(|seed| s.run(seed).unwrap().verdict);
        assert!(count(&v, Verdict::Reject(RejectReason::Backend)) >= 5, "{b}: {v:?}");
    }
}

#[test]
fn planted_blocks_only_matter_to_the_spot_check() {
    let planted = Strategy::PlantedBlocks { planted: 50_000 };
    let spot = GeneralScenario { strategy: planted.clone(), ..general("spot-check") };
    let v = verdicts(|seed| spot.run(seed).unwrap().verdict);
    assert!(count(&v, Verdict::Reject(RejectReason::Backend)) >= 5, "{v:?}");
    let full = GeneralScenario { strategy: planted, ..general("full-reveal") };
    let v = verdicts(|seed| full.run(seed).unwrap().verdict);
    assert!(count(&v, Verdict::Accept) >= 5, "{v:?}");
}

#[test]
fn label_invariant_arguments() {
    let base = LabelInvariantScenario::new("uniformity", 128, ratio(1, 20), ratio(9, 20));
    let honest = LabelInvariantScenario { workload: Workload::Uniform, ..base.clone() };
    let v = verdicts(|seed| honest.run(seed).unwrap().verdict);
    assert!(count(&v, Verdict::Accept) >= 5, "{v:?}");
    for strategy in [Strategy::Honest, Strategy::FarCommit] {
        let far = LabelInvariantScenario { workload: Workload::PointMass, strategy, ..base.clone() };
        let v = verdicts(|seed| far.run(seed).unwrap().verdict);
        assert_eq!(count(&v, Verdict::Accept), 0, "{v:?}");
    }

    let mut sparse = LabelInvariantScenario::new("support-size", 128, ratio(1, 20), ratio(9, 20));
    sparse.params.support_bound = Some(4);
    sparse.workload = Workload::PointMass;
    let v = verdicts(|seed| sparse.run(seed).unwrap().verdict);
    assert!(count(&v, Verdict::Accept) >= 5, "{v:?}");
}

#[test]
fn extraction_agrees_with_every_verified_claim() {
    for strategy in [Strategy::Honest, Strategy::InconsistentOpening { flip_prob: 0.3 }, Strategy::FarCommit] {
        let mut s = OracleScenario::new(16, ratio(1, 2));
        s.strategy = strategy.clone();
        s.probes = 4;
        for seed in 0..4 {
            let c = s.run_with_extraction(seed, ratio(1, 2)).unwrap();
            assert_eq!(c.inconsistent, 0, "{strategy:?}");
            assert!(c.collision.is_none());
            if strategy == Strategy::Honest {
                assert!(c.claims > 0);
                assert_eq!(c.extracted.unwrap().grains(), s.grains);
            }
        }
    }
}

/// Central 99% interval of Binomial(n, p) from directly summed probabilities.
fn naive_interval(n: u64, p: f64) -> (u64, u64) {
    let pmf: Vec<f64> = (0..=n)
        .map(|k| {
            let choose: f64 = (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product();
            choose * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
        })
        .collect();
    let mut acc = 0.0;
    let lo = (0..=n).find(|&k| {
        acc += pmf[k as usize];
        acc > 0.005
    });
    acc = 0.0;
    let hi = (0..=n).rev().find(|&k| {
        acc += pmf[k as usize];
        acc > 0.005
    });
    (lo.unwrap(), hi.unwrap())
}

#[test]
fn binomial_interval_matches_direct_sums() {
    for (n, p) in [(50, 0.5), (80, 0.1), (30, 0.9), (60, 0.633)] {
        assert_eq!(binomial_interval(n, p, 0.99), naive_interval(n, p), "n={n} p={p}");
    }
    assert_eq!(binomial_interval(10, 0.0, 0.99), (0, 0));
}

#[test]
fn spot_check_detection_extremes() {
    assert!((detection_probability(0.005, 200) - 0.633).abs() < 1e-3);
    for seed in 0..5 {
        assert!(!spot_check_detection_trial(32, 1000, 0, 20, seed).unwrap());
        assert!(spot_check_detection_trial(32, 1000, 1000, 1, seed).unwrap());
    }
}

#[test]
fn reports_are_reproducible() {
    let s = OracleScenario::new(32, ratio(1, 4));
    let report = || {
        let records = run_trials(8, 99, |seed| s.trial(seed)).unwrap();
        let mut r = Report::new("oracle-session", 1, "test");
        for rec in &records {
            r.trial("honest", rec);
        }
        let summary = Summary::of(&records);
        r.summarize("honest", &summary);
        r.check("accept_rate >= 0.5", summary.accept_rate() >= 0.5, summary.accept_rate());
        r.to_text()
    };
    let text = report();
    assert_eq!(text, report());
    assert!(text.ends_with("result = pass\n"), "{text}");
}
