//! Line-oriented run reports: run parameters, one record per trial, a
//! summary, and threshold checks.

use super::{Summary, TrialRecord};
use std::fmt::{Display, Write as _};

pub const REPORT_HEADER: &str = "# distproof report v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    run: Vec<(String, String)>,
    trials: Vec<String>,
    summary: Vec<(String, String)>,
    checks: Vec<Check>,
}

impl Report {
    pub fn new(mode: &str, constants_version: u32, revision: &str) -> Self {
        let mut r = Report::default();
        r.param("mode", mode);
        r.param("revision", revision);
        r.param("constants_version", constants_version);
        r
    }

    pub fn param(&mut self, key: &str, value: impl Display) {
        self.run.push((key.to_string(), value.to_string()));
    }

    /// A trial line tagged with `label`, e.g. the adversary or backend.
    pub fn trial(&mut self, label: &str, r: &TrialRecord) {
        let c = &r.counters;
        let verdict = r.verdict.reason().map_or("accept".to_string(), |x| format!("reject:{}", x.name()));
        self.trials.push(format!(
            "{label} trial={} seed={} verdict={verdict} d_samples={} q_probes={} bytes_sent={} bytes_received={} rounds={}",
            r.trial, r.seed, c.d_samples, c.q_probes, c.bytes_sent, c.bytes_received, c.rounds
        ));
    }

    /// A free-form trial line.
    pub fn trial_line(&mut self, line: impl Into<String>) {
        self.trials.push(line.into());
    }

    pub fn summary(&mut self, key: &str, value: impl Display) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    /// Standard summary fields under `prefix`.
    pub fn summarize(&mut self, prefix: &str, s: &Summary) {
        self.summary(&format!("{prefix}.trials"), s.trials);
        self.summary(&format!("{prefix}.accepted"), s.accepted);
        self.summary(&format!("{prefix}.accept_rate"), format!("{:.4}", s.accept_rate()));
        self.summary(&format!("{prefix}.median_d_samples"), s.median_d_samples);
        self.summary(&format!("{prefix}.max_d_samples"), s.max_d_samples);
        self.summary(&format!("{prefix}.median_bytes"), s.median_bytes);
        self.summary(&format!("{prefix}.median_rounds"), s.median_rounds);
        for (reason, count) in &s.rejections {
            self.summary(&format!("{prefix}.rejected.{reason}"), count);
        }
    }

    pub fn check(&mut self, name: &str, pass: bool, detail: impl Display) {
        self.checks.push(Check { name: name.to_string(), pass, detail: detail.to_string() });
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    /// True iff every check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(REPORT_HEADER);
        out.push_str("\n[run]\n");
        for (k, v) in &self.run {
            let _ = writeln!(out, "{k} = {v}");
        }
        out.push_str("[trials]\n");
        for t in &self.trials {
            let _ = writeln!(out, "{t}");
        }
        out.push_str("[summary]\n");
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k} = {v}");
        }
        out.push_str("[checks]\n");
        for c in &self.checks {
            let _ = writeln!(out, "{} {}: {}", if c.pass { "pass" } else { "fail" }, c.name, c.detail);
        }
        let _ = writeln!(out, "result = {}", if self.passed() { "pass" } else { "fail" });
        out
    }
}
