use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub id: String,
    pub op: String,
    pub status: Status,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    /// Differences between `expect` and the payload, or failed intrinsic checks.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub seed: u64,
    pub summary: Summary,
    pub tasks: Vec<Entry>,
}

impl Report {
    pub fn new(scenario: Option<String>, seed: u64, tasks: Vec<Entry>) -> Report {
        let mut summary = Summary::default();
        for t in &tasks {
            match t.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Error => summary.error += 1,
                Status::Inconclusive => summary.inconclusive += 1,
            }
        }
        Report { schema_version: SCHEMA_VERSION, scenario, seed, summary, tasks }
    }

    /// 0 when no task failed or errored, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.fail + self.summary.error == 0 {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.scenario {
            let _ = writeln!(out, "scenario {name} (seed {})", self.seed);
        } else {
            let _ = writeln!(out, "scenario (seed {})", self.seed);
        }
        for t in &self.tasks {
            let _ = write!(out, "[{}] {} ({})", t.status.as_str().to_uppercase(), t.id, t.op);
            if let Some(ms) = t.elapsed_ms {
                let _ = write!(out, " {ms} ms");
            }
            out.push('\n');
            if let Value::Object(map) = &t.payload {
                for (k, v) in map {
                    let _ = writeln!(out, "    {k}: {v}");
                }
            }
            if let Some(e) = &t.error {
                let _ = writeln!(out, "    error ({}): {}", e.kind, e.message);
            }
            for f in &t.failures {
                let _ = writeln!(out, "    ! {f}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(out, "{} pass, {} fail, {} error, {} inconclusive", s.pass, s.fail, s.error, s.inconclusive);
        out
    }
}
