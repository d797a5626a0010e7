//! Deterministic analysis reports and the commands that produce them.

mod commands;

use std::fmt::{self, Display, Write as _};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::group::DEFAULT_MAX_ORDER;
use crate::par;

pub use commands::{
    cmd_analyze, cmd_cayley, cmd_punctured, cmd_verify_all, cmd_zp, generation_prediction, CayleyOutput,
    GENERATION_MATRIX, PUNCTURED_MATRIX,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub max_order: u64,
    pub dot_cap: usize,
    /// Record wall-clock times; reports are then no longer byte-stable.
    pub timings: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            seed: 0,
            max_order: DEFAULT_MAX_ORDER,
            dot_cap: crate::cayley::DEFAULT_DOT_CAP,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Oracles agree and the stated claim holds.
    Confirmed,
    /// Oracles agree and the stated claim fails.
    Finding,
    /// Two computations of the same quantity differ, or an invariant broke.
    Disagreement,
    /// Not run: a cap or budget was exceeded, or the check does not apply.
    Skipped,
}

impl Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Confirmed => "confirmed",
            Status::Finding => "finding",
            Status::Disagreement => "disagreement",
            Status::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub check: String,
    /// The claim being checked.
    pub reference: String,
    pub inputs: Value,
    pub status: Status,
    pub outcome: Value,
    pub wall_time_ms: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub seed: u64,
    pub entries: Vec<CheckEntry>,
    pub findings: usize,
    pub verdict: String,
}

impl AnalysisReport {
    pub(crate) fn new(command: &str, seed: u64, mut entries: Vec<CheckEntry>) -> Self {
        entries.sort_by(|a, b| a.check.cmp(&b.check));
        let findings = entries.iter().filter(|e| e.status == Status::Finding).count();
        let disagreements = entries.iter().any(|e| e.status == Status::Disagreement);
        Self {
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            group: None,
            k: None,
            p: None,
            seed,
            entries,
            findings,
            verdict: if disagreements { "disagreement" } else { "consistent" }.to_string(),
        }
    }

    pub fn entry(&self, check: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.check == check)
    }

    pub fn is_consistent(&self) -> bool {
        self.verdict == "consistent"
    }

    /// 0 when every oracle agrees, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_consistent() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Fixed-width table, one row per check.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "confset {}  {}", self.tool_version, self.command);
        if let Some(g) = &self.group {
            let _ = writeln!(out, "group: {g}");
        }
        if let Some(k) = self.k {
            let _ = writeln!(out, "k: {k}");
        }
        if let Some(p) = self.p {
            let _ = writeln!(out, "p: {p}");
        }
        let _ = writeln!(out, "seed: {}", self.seed);
        let width = self.entries.iter().map(|e| e.check.len()).max().unwrap_or(5).max(5);
        let timed = self.entries.iter().any(|e| e.wall_time_ms.is_some());
        let _ = write!(out, "\n{:<width$}  {:<12}", "CHECK", "STATUS");
        if timed {
            let _ = write!(out, "  {:>8}", "MS");
        }
        let _ = writeln!(out, "  OUTCOME");
        for e in &self.entries {
            let _ = write!(out, "{:<width$}  {:<12}", e.check, e.status.to_string());
            if timed {
                let ms = e.wall_time_ms.map(|m| m.to_string()).unwrap_or_default();
                let _ = write!(out, "  {ms:>8}");
            }
            let _ = writeln!(out, "  {}", compact(&e.outcome));
        }
        let _ = writeln!(out, "\nfindings: {}", self.findings);
        let _ = writeln!(out, "verdict: {}", self.verdict);
        out
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("{k}={}", compact(v)))
            .collect::<Vec<_>>()
            .join(" "),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub(crate) type Outcome = (Status, Value);

type Run<'a> = Box<dyn Fn() -> crate::Result<Outcome> + Send + Sync + 'a>;

pub(crate) struct Check<'a> {
    pub name: String,
    pub reference: &'static str,
    pub inputs: Value,
    pub run: Run<'a>,
}

impl<'a> Check<'a> {
    pub fn new(
        name: impl Into<String>,
        reference: &'static str,
        inputs: Value,
        run: impl Fn() -> crate::Result<Outcome> + Send + Sync + 'a,
    ) -> Self {
        Self {
            name: name.into(),
            reference,
            inputs,
            run: Box::new(run),
        }
    }
}

/// Errors from caps and budgets skip a check; anything else inside a check
/// is a broken invariant.
pub(crate) fn classify(err: Error) -> Outcome {
    match err {
        Error::Budget { .. } | Error::OrderCap { .. } | Error::ClosureCap { .. } | Error::ExportCap { .. } => {
            skipped(err)
        }
        other => (Status::Disagreement, json!({ "error": other.to_string() })),
    }
}

pub(crate) fn skipped(reason: impl Display) -> Outcome {
    (Status::Skipped, json!({ "reason": reason.to_string() }))
}

/// Runs checks in parallel; the report sorts entries by name afterwards.
pub(crate) fn run_checks(checks: &[Check<'_>], settings: &Settings) -> Vec<CheckEntry> {
    par::map_slice(checks, |c| {
        let start = Instant::now();
        let (status, outcome) = (c.run)().unwrap_or_else(classify);
        CheckEntry {
            check: c.name.clone(),
            reference: c.reference.to_string(),
            inputs: c.inputs.clone(),
            status,
            outcome,
            wall_time_ms: settings.timings.then(|| start.elapsed().as_millis() as u64),
        }
    })
}

pub(crate) fn number(x: u128) -> Value {
    u64::try_from(x)
        .map(Value::from)
        .unwrap_or_else(|_| Value::String(x.to_string()))
}
