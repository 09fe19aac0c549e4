//! Check results shared by every front end.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Unsupported,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub verdict: Verdict,
    pub mandatory: bool,
    pub witness: Value,
    pub wall_time_ms: f64,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, ok: bool, witness: Value) -> CheckResult {
        CheckResult { name: name.into(), verdict: Verdict::from_bool(ok), mandatory: true, witness, wall_time_ms: 0.0 }
    }

    pub fn info(name: impl Into<String>, witness: Value) -> CheckResult {
        CheckResult { name: name.into(), verdict: Verdict::Pass, mandatory: false, witness, wall_time_ms: 0.0 }
    }

    /// `Unsupported` stays informational; every other error is a failure.
    pub fn from_error(name: impl Into<String>, e: &Error) -> CheckResult {
        let unsupported = matches!(e, Error::Unsupported(_));
        CheckResult {
            name: name.into(),
            verdict: if unsupported { Verdict::Unsupported } else { Verdict::Fail },
            mandatory: !unsupported,
            witness: serde_json::json!({ "error": e.to_string() }),
            wall_time_ms: 0.0,
        }
    }

    pub fn optional(mut self) -> CheckResult {
        self.mandatory = false;
        self
    }

    pub fn passed(&self) -> bool {
        !self.mandatory || self.verdict == Verdict::Pass
    }
}

/// Runs `f` and records its wall time on every result it returns.
pub fn timed(f: impl FnOnce() -> Vec<CheckResult>) -> Vec<CheckResult> {
    let start = Instant::now();
    let mut out = f();
    let ms = start.elapsed().as_secs_f64() * 1e3;
    for c in &mut out {
        c.wall_time_ms = ms;
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    pub command: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, tool_version: impl Into<String>, input_digest: Option<String>, checks: Vec<CheckResult>) -> RunReport {
        let passed = checks.iter().all(CheckResult::passed);
        RunReport { schema_version: SCHEMA_VERSION, tool_version: tool_version.into(), input_digest, command: command.into(), passed, checks }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} ({} checks)\n", self.command, self.checks.len());
        for c in &self.checks {
            let tag = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Unsupported => "UNSUPPORTED",
            };
            let opt = if c.mandatory { "" } else { " (informational)" };
            s.push_str(&format!("  {tag:<11} {}{opt}\n", c.name));
            if c.verdict != Verdict::Pass {
                s.push_str(&format!("              {}\n", c.witness));
            }
        }
        s.push_str(if self.passed { "overall: PASS\n" } else { "overall: FAIL\n" });
        s
    }
}
