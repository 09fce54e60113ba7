//! Machine-readable run reports. Every field except `wall_time_ms` is a
//! deterministic function of the run configuration and inputs.

use serde::{Deserialize, Serialize};

use crate::hullrank::RankCertificate;

pub const TOOL_NAME: &str = "affinor-rank";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit-code class of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// A proof of the positive claim (exit 0).
    Positive,
    /// A proof of the negative claim (exit 1).
    Negative,
    /// Neither could be established (exit 2).
    Inconclusive,
    /// Input, usage or internal failure (exit 64 and above).
    Error,
}

/// Structured description of a failed run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportError {
    pub kind: String,
    pub message: String,
    /// Input file the error refers to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// JSON path of the offending field inside `path`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Echo of the effective configuration.
    pub config: serde_json::Value,
    pub outcome: Outcome,
    pub exit_code: i32,
    /// One-line human summary.
    pub summary: String,
    /// Command-specific payload.
    pub result: serde_json::Value,
    /// Every positive rank certificate produced by the run, re-verifiable
    /// without the original input.
    pub certificates: Vec<RankCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ReportError>,
    pub notes: Vec<String>,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        Report {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            command: command.into(),
            config,
            outcome: Outcome::Inconclusive,
            exit_code: 2,
            summary: String::new(),
            result: serde_json::Value::Null,
            certificates: Vec::new(),
            error: None,
            notes: Vec::new(),
            wall_time_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are serializable")
    }

    /// JSON with the timing field zeroed; equal for repeated runs of the
    /// same configuration.
    pub fn canonical_json(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_ms = 0;
        copy.to_json()
    }

    pub fn from_json_str(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.tool, self.version, self.command);
        out += &format!("outcome: {:?} (exit {})\n", self.outcome, self.exit_code).to_lowercase();
        if !self.summary.is_empty() {
            out += &format!("summary: {}\n", self.summary);
        }
        for c in &self.certificates {
            let witness: Vec<String> =
                c.witness.iter().map(crate::scalarlinalg::format_rational).collect();
            out += &format!(
                "certificate: {:?} rank {} witness [{}]\n",
                c.kind,
                c.claimed_rank,
                witness.join(", ")
            )
            .to_lowercase();
        }
        if let Some(e) = &self.error {
            out += &format!("error: {}: {}", e.kind, e.message);
            if let Some(p) = &e.path {
                out += &format!(" (file {p}");
                if let Some(f) = &e.field {
                    out += &format!(", field {f}");
                }
                out += ")";
            }
            out += "\n";
        }
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out += &format!("wall time: {} ms\n", self.wall_time_ms);
        out
    }
}
