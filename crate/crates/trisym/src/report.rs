//! Check and report plumbing shared by the command line: named residuals
//! with thresholds, merged into deterministic JSON documents.

use serde::{Deserialize, Serialize};

/// One named residual check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    #[serde(rename = "check_name")]
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, residual: f64, threshold: f64) -> Self {
        Check {
            name: name.to_string(),
            residual,
            threshold,
            pass: residual < threshold,
        }
    }

    /// A boolean fact reported in check form.
    pub fn flag(name: &str, ok: bool) -> Self {
        Check {
            name: name.to_string(),
            residual: if ok { 0.0 } else { 1.0 },
            threshold: 0.5,
            pass: ok,
        }
    }

    /// An exact integer comparison reported in check form.
    pub fn ints(name: &str, got: usize, expected: usize) -> Self {
        Check {
            name: name.to_string(),
            residual: (got as f64 - expected as f64).abs(),
            threshold: 0.5,
            pass: got == expected,
        }
    }
}

/// Report emitted by one command run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub model_id: String,
    pub checks: Vec<Check>,
    pub artifacts: serde_json::Value,
}

impl RunReport {
    pub fn new(command: &str, model_id: &str) -> Self {
        RunReport {
            command: command.to_string(),
            model_id: model_id.to_string(),
            checks: Vec::new(),
            artifacts: serde_json::Value::Null,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Human-readable table.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("== {} {}\n", self.command, self.model_id));
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(8)
            .max(8);
        for c in &self.checks {
            out.push_str(&format!(
                "  {:width$}  {:>12.3e}  (< {:.1e})  {}\n",
                c.name,
                c.residual,
                c.threshold,
                if c.pass { "pass" } else { "FAIL" },
                width = width
            ));
        }
        out.push_str(&format!(
            "  => {}\n",
            if self.all_pass() { "PASS" } else { "FAIL" }
        ));
        out
    }

    pub fn to_json_string(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}
