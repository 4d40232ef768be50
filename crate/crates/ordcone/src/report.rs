//! Machine-readable verification reports.
//!
//! Every check produces a record with a stable claim id and a three-valued
//! status. A report is a pure function of its configuration: records are
//! sorted by claim id and the exit code is 0 exactly when nothing was
//! refuted.

use serde::Serialize;
use serde_json::Value;

/// Outcome of one checked claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Proved,
    Refuted,
    VerifiedToBound,
}

/// A single verdict. `refuted` always carries a witness and
/// `verified_to_bound` always carries the bound that was exhausted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub bound: Option<u64>,
    pub witness: Option<String>,
    pub note: String,
}

impl Verdict {
    pub fn proved(note: impl Into<String>) -> Self {
        Verdict { status: Status::Proved, bound: None, witness: None, note: note.into() }
    }

    pub fn refuted(witness: impl Into<String>, note: impl Into<String>) -> Self {
        Verdict {
            status: Status::Refuted,
            bound: None,
            witness: Some(witness.into()),
            note: note.into(),
        }
    }

    pub fn to_bound(bound: u64, note: impl Into<String>) -> Self {
        Verdict {
            status: Status::VerifiedToBound,
            bound: Some(bound),
            witness: None,
            note: note.into(),
        }
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }
}

/// A verdict attached to a claim id, as serialized into reports.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub claim: String,
    pub status: Status,
    pub bound: Option<u64>,
    pub witness: Option<String>,
    pub note: String,
    /// Present on grid-edge records: `[row, col, "h"|"v"]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<(usize, usize, char)>,
}

impl Record {
    pub fn new(claim: impl Into<String>, verdict: Verdict) -> Self {
        Record {
            claim: claim.into(),
            status: verdict.status,
            bound: verdict.bound,
            witness: verdict.witness,
            note: verdict.note,
            edge: None,
        }
    }

    pub fn with_edge(mut self, row: usize, col: usize, direction: char) -> Self {
        self.edge = Some((row, col, direction));
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub config: Value,
    pub timestamp: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub proved: usize,
    pub refuted: usize,
    pub verified_to_bound: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub header: Header,
    pub records: Vec<Record>,
    pub summary: Summary,
    pub exit_code: i32,
    /// Construction tables (conductors, chosen parameters, limit-group
    /// bookkeeping) for the commands that build something.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

impl Report {
    pub fn with_meta(mut self, meta: Value) -> Report {
        self.meta = Some(meta);
        self
    }

    /// Sorts records by claim id, tallies the summary, and derives the exit
    /// code (0 iff no refutation).
    pub fn assemble(config: Value, mut records: Vec<Record>) -> Report {
        records.sort_by(|a, b| a.claim.cmp(&b.claim));
        let summary = Summary {
            proved: records.iter().filter(|r| r.status == Status::Proved).count(),
            refuted: records.iter().filter(|r| r.status == Status::Refuted).count(),
            verified_to_bound: records
                .iter()
                .filter(|r| r.status == Status::VerifiedToBound)
                .count(),
        };
        let exit_code = if summary.refuted > 0 { 1 } else { 0 };
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            header: Header {
                tool: "ordcone".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config,
                timestamp,
            },
            records,
            summary,
            exit_code,
            meta: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_code_tracks_refutations() {
        let ok = Report::assemble(
            Value::Null,
            vec![Record::new("b", Verdict::proved("")), Record::new("a", Verdict::to_bound(5, ""))],
        );
        assert_eq!(ok.exit_code, 0);
        assert_eq!(ok.summary.proved, 1);
        assert_eq!(ok.summary.verified_to_bound, 1);
        assert_eq!(ok.records[0].claim, "a");

        let bad = Report::assemble(
            Value::Null,
            vec![Record::new("x", Verdict::refuted("w", "broken"))],
        );
        assert_eq!(bad.exit_code, 1);
        assert_eq!(bad.summary.refuted, 1);
        assert_eq!(bad.records[0].witness.as_deref(), Some("w"));
    }
}
