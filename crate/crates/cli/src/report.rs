//! Running checks on a workspace problem and reporting the outcome.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use relsite_core::{
    check_cofinality, check_diagonal_density, check_fiberwise, check_oracle, check_relative_filtered,
    relative_verdict, RelativeProblem, Verdict,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::workspace::Workspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Cofinality,
    Filtered,
    Fiberwise,
    Diagonal,
    Oracle,
    All,
}

impl Mode {
    pub const ALL: [Mode; 6] = [
        Mode::Cofinality,
        Mode::Filtered,
        Mode::Fiberwise,
        Mode::Diagonal,
        Mode::Oracle,
        Mode::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Cofinality => "cofinality",
            Mode::Filtered => "filtered",
            Mode::Fiberwise => "fiberwise",
            Mode::Diagonal => "diagonal",
            Mode::Oracle => "oracle",
            Mode::All => "all",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = CheckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CheckError::UnknownMode(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("unknown mode `{0}`; expected one of cofinality, filtered, fiberwise, diagonal, oracle, all")]
    UnknownMode(String),
}

/// One named check with its failure data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl CheckReport {
    fn from_verdict<W: Serialize>(name: &str, v: &Verdict<W>) -> Self {
        Self {
            name: name.into(),
            holds: v.holds(),
            witness: v
                .witness
                .as_ref()
                .map(|w| serde_json::to_value(w).expect("witnesses serialize")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub problem: String,
    pub mode: Mode,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
    pub discrepancy: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disagreements: Vec<String>,
    /// Milliseconds per check; only filled when asked for, so that reports
    /// stay reproducible by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "problem {} mode {}: {}\n",
            self.problem,
            self.mode,
            if self.passed { "PASS" } else { "FAIL" }
        );
        for c in &self.checks {
            s.push_str(&format!("  {:<14} {}", c.name, if c.holds { "pass" } else { "FAIL" }));
            if let Some(w) = &c.witness {
                s.push_str(&format!("  witness {w}"));
            }
            s.push('\n');
        }
        for d in &self.disagreements {
            s.push_str(&format!("  discrepancy: {d}\n"));
        }
        if let Some(t) = &self.timings {
            for (k, ms) in t {
                s.push_str(&format!("  time {k}: {ms:.3} ms\n"));
            }
        }
        s
    }
}

pub fn run_check(ws: &Workspace, problem: &str, mode: Mode) -> Result<Report, CheckError> {
    run_check_timed(ws, problem, mode, false)
}

pub fn run_check_timed(ws: &Workspace, problem: &str, mode: Mode, timings: bool) -> Result<Report, CheckError> {
    let prob = ws
        .problems
        .get(problem)
        .ok_or_else(|| CheckError::UnknownProblem(problem.to_string()))?;
    Ok(check_problem(problem, prob, mode, timings))
}

pub fn check_problem(name: &str, prob: &RelativeProblem, mode: Mode, timings: bool) -> Report {
    let start = Instant::now();
    let (checks, disagreements) = match mode {
        Mode::Cofinality => (vec![CheckReport::from_verdict("cofinality", &check_cofinality(prob))], vec![]),
        Mode::Filtered => (filtered_checks(&check_relative_filtered(prob)), vec![]),
        Mode::Fiberwise => (vec![CheckReport::from_verdict("fiberwise", &check_fiberwise(prob))], vec![]),
        Mode::Diagonal => (vec![CheckReport::from_verdict("diagonal", &check_diagonal_density(prob))], vec![]),
        Mode::Oracle => (vec![CheckReport::from_verdict("oracle", &check_oracle(prob))], vec![]),
        Mode::All => {
            let v = relative_verdict(prob, true).unwrap_or_else(|e| *e.verdict);
            let mut checks = vec![CheckReport {
                name: "site_morphism".into(),
                holds: v.site_morphism,
                witness: None,
            }];
            checks.push(CheckReport::from_verdict("cofinality", &v.cofinality));
            checks.extend(filtered_checks(&v.filtered));
            checks.push(CheckReport::from_verdict("fiberwise", &v.fiberwise));
            checks.push(CheckReport::from_verdict("diagonal", &v.diagonal));
            if let Some(o) = &v.oracle {
                checks.push(CheckReport::from_verdict("oracle", o));
            }
            (checks, v.disagreements)
        }
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    Report {
        problem: name.into(),
        mode,
        passed: checks.iter().all(|c| c.holds),
        discrepancy: !disagreements.is_empty(),
        checks,
        disagreements,
        timings: timings.then(|| BTreeMap::from([(mode.name().to_string(), elapsed)])),
    }
}

fn filtered_checks(r: &relsite_core::RelativeFilteredReport) -> Vec<CheckReport> {
    vec![
        CheckReport::from_verdict("filtered.a", &r.a),
        CheckReport::from_verdict("filtered.b", &r.b),
        CheckReport::from_verdict("filtered.c", &r.c),
        CheckReport::from_verdict("filtered.d", &r.d),
    ]
}
