use serde::{Deserialize, Serialize};
use systems::{CheckResult, Verdict};

pub const REPORT_SCHEMA: &str = "bidualkit-report/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub p: u64,
    pub k: u32,
    pub gamma: u64,
    pub rank: usize,
    pub primes: usize,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest enumeration (|Y|^i) allowed for relative Fitting ideals.
    pub enumeration: u64,
}

/// Everything that determines a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: Option<u64>,
    pub cell: Option<Cell>,
    pub datum: Option<String>,
    /// Seeds per cell when running the whole parameter grid.
    pub grid_seeds: Option<u64>,
    pub suites: Vec<String>,
    pub output: Option<String>,
    pub caps: Caps,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub config: RunConfig,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(config: RunConfig, checks: Vec<CheckResult>) -> Self {
        Report { schema: REPORT_SCHEMA.into(), config, checks }
    }

    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.verdict == Verdict::Fail)
    }

    /// One verdict per anchor, in order of first appearance: FAIL if any
    /// check failed, PASS if any passed, SKIPPED otherwise.
    pub fn by_anchor(&self) -> Vec<(String, Verdict)> {
        let mut out: Vec<(String, Verdict)> = Vec::new();
        for c in &self.checks {
            match out.iter_mut().find(|(a, _)| *a == c.anchor) {
                None => out.push((c.anchor.clone(), c.verdict)),
                Some((_, v)) => {
                    *v = match (*v, c.verdict) {
                        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
                        (Verdict::Pass, _) | (_, Verdict::Pass) => Verdict::Pass,
                        _ => Verdict::Skipped,
                    }
                }
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        if self.checks.is_empty() {
            return "no checks\n".into();
        }
        let mut s = String::new();
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            s += &format!("{:<width$}  {:<7}  {:>9.1} ms  {}\n", c.name, c.verdict.to_string(), c.wall_ms, c.anchor);
            if let Some(w) = &c.witness {
                s += &format!("{:<width$}    witness: {w}\n", "");
            }
        }
        s += "\n";
        for (anchor, v) in self.by_anchor() {
            s += &format!("{anchor}: {v}\n");
        }
        let count = |v: Verdict| self.checks.iter().filter(|c| c.verdict == v).count();
        s += &format!("\n{} checks: {} PASS, {} FAIL, {} SKIPPED\n", self.checks.len(), count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Skipped));
        s
    }
}
