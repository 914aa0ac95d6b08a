//! The report record written one per line.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Fail,
    Computed,
    Exceeded,
}

impl Outcome {
    /// Whether the outcome counts against the exit code.
    pub fn is_failure(self) -> bool {
        self == Outcome::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim_id: String,
    pub parameters: Value,
    pub outcome: Outcome,
    pub values: Value,
    /// Only filled in with `--timings`, so that default output is reproducible.
    pub wall_time_ms: Option<u64>,
    pub tool_version: String,
}

pub fn write_jsonl<W: Write>(mut w: W, reports: &[VerificationReport]) -> io::Result<()> {
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Plain-text table of claim, parameters and outcome.
pub fn summary_table(reports: &[VerificationReport]) -> String {
    let rows: Vec<[String; 3]> = reports
        .iter()
        .map(|r| [r.claim_id.clone(), r.parameters.to_string(), format!("{:?}", r.outcome)])
        .collect();
    let w0 = rows.iter().map(|r| r[0].len()).max().unwrap_or(0).max(5);
    let w1 = rows.iter().map(|r| r[1].len()).max().unwrap_or(0).max(10);
    let mut out = format!("{:<w0$}  {:<w1$}  outcome\n", "claim", "parameters");
    for r in &rows {
        out.push_str(&format!("{:<w0$}  {:<w1$}  {}\n", r[0], r[1], r[2]));
    }
    let count = |o: Outcome| reports.iter().filter(|r| r.outcome == o).count();
    out.push_str(&format!(
        "{} pass, {} fail, {} computed, {} exceeded\n",
        count(Outcome::Pass),
        count(Outcome::Fail),
        count(Outcome::Computed),
        count(Outcome::Exceeded)
    ));
    out
}
