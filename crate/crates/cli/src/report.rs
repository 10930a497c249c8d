//! Check records and their two renderings: a fixed-width table and one
//! `key=value` line per record.

use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// The check does not apply to the instance, or its certificate is
    /// vacuous.
    Void,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Void => "void",
        }
    }
}

impl From<approxinv::Verdict> for Verdict {
    fn from(v: approxinv::Verdict) -> Self {
        match v {
            approxinv::Verdict::Pass => Verdict::Pass,
            approxinv::Verdict::Fail => Verdict::Fail,
            approxinv::Verdict::Void => Verdict::Void,
        }
    }
}

/// Which way the measured value has to sit relative to the bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub check: &'static str,
    pub instance: String,
    /// What was compared, e.g. "λmax(Ψ) ≤ 2λ+1".
    pub claim: String,
    pub measured: f64,
    pub bound: f64,
    /// Signed distance to the bound; negative means violated.
    pub slack: f64,
    pub verdict: Verdict,
    pub note: String,
}

impl Record {
    /// Compare `measured` against `bound`, allowing `tol`.
    pub fn compare(
        check: &'static str,
        instance: &str,
        claim: impl Into<String>,
        measured: f64,
        sense: Sense,
        bound: f64,
        tol: f64,
    ) -> Record {
        let slack = match sense {
            Sense::AtMost => bound - measured,
            Sense::AtLeast => measured - bound,
        };
        let verdict = if slack >= -tol { Verdict::Pass } else { Verdict::Fail };
        Record { check, instance: instance.into(), claim: claim.into(), measured, bound, slack, verdict, note: String::new() }
    }

    pub fn void(check: &'static str, instance: &str, note: impl Into<String>) -> Record {
        Record {
            check,
            instance: instance.into(),
            claim: String::new(),
            measured: f64::NAN,
            bound: f64::NAN,
            slack: f64::NAN,
            verdict: Verdict::Void,
            note: note.into(),
        }
    }

    pub fn error(check: &'static str, instance: &str, e: impl std::fmt::Display) -> Record {
        Record { verdict: Verdict::Fail, note: format!("error: {e}"), ..Record::void(check, instance, "") }
    }

    pub fn with_claim(mut self, claim: impl Into<String>) -> Record {
        self.claim = claim.into();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Record {
        self.note = note.into();
        self
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub records: Vec<Record>,
    pub runtime_s: f64,
}

impl Report {
    pub fn count(&self, v: Verdict) -> usize {
        self.records.iter().filter(|r| r.verdict == v).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Verdict::Fail) == 0
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        writeln!(s, "scenario {}  seed {}", self.scenario, self.seed).unwrap();
        let iw = self.records.iter().map(|r| r.instance.chars().count()).max().unwrap_or(8).max(8);
        let cw = self.records.iter().map(|r| r.claim.chars().count()).max().unwrap_or(5).max(5);
        writeln!(
            s,
            "{:<14}  {:<iw$}  {:<cw$}  {:>13}  {:>13}  {:>11}  verdict",
            "check", "instance", "claim", "measured", "bound", "slack"
        )
        .unwrap();
        for r in &self.records {
            let mut line = format!(
                "{:<14}  {:<iw$}  {:<cw$}  {:>13}  {:>13}  {:>11}  {}",
                r.check,
                r.instance,
                r.claim,
                num(r.measured, 6),
                num(r.bound, 6),
                num(r.slack, 3),
                r.verdict.name()
            );
            if !r.note.is_empty() {
                line += &format!("  {}", r.note);
            }
            writeln!(s, "{}", line.trim_end()).unwrap();
        }
        writeln!(
            s,
            "{} records: {} pass, {} fail, {} void",
            self.records.len(),
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Void)
        )
        .unwrap();
        s
    }

    /// One record per line, then a summary line and the runtime line. Only
    /// the last line depends on the clock.
    pub fn machine(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            writeln!(
                s,
                "scenario={} check={} instance={} claim={} measured={} bound={} slack={} verdict={} note={}",
                quote(&self.scenario),
                r.check,
                quote(&r.instance),
                quote(&r.claim),
                r.measured,
                r.bound,
                r.slack,
                r.verdict.name(),
                quote(&r.note)
            )
            .unwrap();
        }
        writeln!(
            s,
            "scenario={} seed={} records={} pass={} fail={} void={}",
            quote(&self.scenario),
            self.seed,
            self.records.len(),
            self.count(Verdict::Pass),
            self.count(Verdict::Fail),
            self.count(Verdict::Void)
        )
        .unwrap();
        writeln!(s, "runtime_s={:.3}", self.runtime_s).unwrap();
        s
    }
}

fn num(v: f64, digits: usize) -> String {
    if v.is_nan() {
        "-".into()
    } else {
        format!("{v:.digits$e}")
    }
}

fn quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_.+".contains(c)) {
        s.into()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}
