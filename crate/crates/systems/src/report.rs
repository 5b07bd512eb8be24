use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
        })
    }
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub anchor: String,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub wall_ms: f64,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, verdict: Verdict, witness: Option<String>) -> Self {
        CheckResult { name: name.into(), anchor: anchor.into(), verdict, witness, wall_ms: 0.0 }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Run `f`, turning Ok into PASS and Err into FAIL with the error as witness.
pub fn timed<E: std::fmt::Display>(name: &str, anchor: &str, f: impl FnOnce() -> Result<(), E>) -> CheckResult {
    let start = Instant::now();
    let (verdict, witness) = match f() {
        Ok(()) => (Verdict::Pass, None),
        Err(e) => (Verdict::Fail, Some(e.to_string())),
    };
    CheckResult { wall_ms: start.elapsed().as_secs_f64() * 1e3, ..CheckResult::new(name, anchor, verdict, witness) }
}
