//! JSON-lines report records, the summary table and plot-data dumps.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    PreconditionUnmet,
}

impl Verdict {
    pub fn from_pass(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "inconclusive",
            Verdict::PreconditionUnmet => "precondition-unmet",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub record: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
}

impl Header {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Header {
            record: "header",
            tool: "phibnorm",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            seed,
        }
    }
}

/// One check. Field order is the serialisation order and is stable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRecord {
    pub record: &'static str,
    pub check_name: String,
    /// The mathematical statement the check exercises.
    pub claim: String,
    pub parameters: Value,
    pub values: Value,
    pub verdict: Verdict,
    pub witness: Option<Value>,
    pub tolerance: f64,
    pub seed: u64,
}

impl ReportRecord {
    pub fn new(check_name: &str, claim: &str, seed: u64, tolerance: f64) -> Self {
        ReportRecord {
            record: "check",
            check_name: check_name.into(),
            claim: claim.into(),
            parameters: Value::Null,
            values: Value::Null,
            verdict: Verdict::Pass,
            witness: None,
            tolerance,
            seed,
        }
    }

    pub fn parameters(mut self, p: impl Serialize) -> Self {
        self.parameters = to_value(p);
        self
    }

    pub fn values(mut self, v: impl Serialize) -> Self {
        self.values = to_value(v);
        self
    }

    pub fn verdict(mut self, v: Verdict) -> Self {
        self.verdict = v;
        self
    }

    pub fn witness(mut self, w: Option<impl Serialize>) -> Self {
        self.witness = w.map(to_value);
        self
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialise")
}

/// Two-column numeric series for external plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Everything a run produced, in emission order.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub header: Header,
    pub records: Vec<ReportRecord>,
    pub plots: Vec<PlotSeries>,
}

impl Run {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Run {
            header: Header::new(command, seed),
            records: Vec::new(),
            plots: Vec::new(),
        }
    }

    pub fn push(&mut self, r: ReportRecord) {
        self.records.push(r);
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.records.iter().filter(|r| r.verdict == v).count()
    }

    /// 0 unless some check failed; precondition-unmet does not fail a run.
    pub fn exit_code(&self) -> i32 {
        if self.count(Verdict::Fail) > 0 {
            1
        } else {
            0
        }
    }
}

pub fn write_jsonl<W: Write>(run: &Run, mut w: W) -> io::Result<()> {
    serde_json::to_writer(&mut w, &run.header)?;
    w.write_all(b"\n")?;
    for r in &run.records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn to_jsonl(run: &Run) -> String {
    let mut buf = Vec::new();
    write_jsonl(run, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("json is utf-8")
}

pub fn summary_table(run: &Run) -> String {
    let width = run.records.iter().map(|r| r.check_name.len()).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:<18}  claim", "check", "verdict");
    let _ = writeln!(out, "{}", "-".repeat(width + 30));
    for r in &run.records {
        let _ = writeln!(out, "{:<width$}  {:<18}  {}", r.check_name, r.verdict.label(), r.claim);
    }
    let _ = writeln!(
        out,
        "{} checks: {} pass, {} fail, {} inconclusive, {} precondition-unmet",
        run.records.len(),
        run.count(Verdict::Pass),
        run.count(Verdict::Fail),
        run.count(Verdict::Inconclusive),
        run.count(Verdict::PreconditionUnmet)
    );
    out
}

pub fn write_plot_data<W: Write>(plots: &[PlotSeries], mut w: W) -> io::Result<()> {
    for (i, p) in plots.iter().enumerate() {
        if i > 0 {
            w.write_all(b"\n\n")?;
        }
        writeln!(w, "# {}: {} {}", p.name, p.x_label, p.y_label)?;
        for (x, y) in &p.points {
            writeln!(w, "{x} {y}")?;
        }
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run_is_header_only() {
        let run = Run::new("verify-all", 7);
        let text = to_jsonl(&run);
        assert_eq!(text.lines().count(), 1);
        assert_eq!(
            text,
            "{\"record\":\"header\",\"tool\":\"phibnorm\",\"version\":\"0.1.0\",\"command\":\"verify-all\",\"seed\":7}\n"
        );
        assert_eq!(run.exit_code(), 0);
    }

    #[test]
    fn record_fields_are_stable() {
        let mut run = Run::new("x", 1);
        run.push(
            ReportRecord::new("a", "claim", 1, 1e-9)
                .parameters(serde_json::json!({"z": 1, "a": 2}))
                .values(vec![1.5])
                .verdict(Verdict::PreconditionUnmet)
                .witness(Some([0.5])),
        );
        let line = to_jsonl(&run).lines().nth(1).unwrap().to_string();
        assert_eq!(
            line,
            "{\"record\":\"check\",\"check_name\":\"a\",\"claim\":\"claim\",\"parameters\":{\"a\":2,\"z\":1},\"values\":[1.5],\"verdict\":\"precondition-unmet\",\"witness\":[0.5],\"tolerance\":1e-9,\"seed\":1}"
        );
        assert_eq!(run.exit_code(), 0);
        run.push(ReportRecord::new("b", "c", 1, 0.0).verdict(Verdict::Fail));
        assert_eq!(run.exit_code(), 1);
        assert!(summary_table(&run).contains("2 checks: 0 pass, 1 fail, 0 inconclusive, 1 precondition-unmet"));
    }

    #[test]
    fn plot_blocks() {
        let plots = vec![
            PlotSeries {
                name: "N(T,s)".into(),
                x_label: "s",
                y_label: "N",
                points: vec![(0.5, 0.25), (1.0, 0.5)],
            },
            PlotSeries {
                name: "g".into(),
                x_label: "alpha",
                y_label: "g",
                points: vec![(0.5, 1.0)],
            },
        ];
        let mut buf = Vec::new();
        write_plot_data(&plots, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# N(T,s): s N\n0.5 0.25\n1 0.5\n\n\n# g: alpha g\n0.5 1\n");
    }
}
