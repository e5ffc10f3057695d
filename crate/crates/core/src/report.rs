//! Uniform pass/fail records shared by the CLI, the reproduction checks
//! and the acceptance suite.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub config: Value,
    pub samples: usize,
    pub worst_value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckReport {
    /// Passes when `worst_value <= threshold`.
    pub fn at_most(check: impl Into<String>, config: Value, worst_value: f64, threshold: f64) -> Self {
        Self {
            check: check.into(),
            config,
            samples: 1,
            worst_value,
            threshold,
            pass: worst_value <= threshold,
        }
    }

    /// Passes when `worst_value >= threshold`.
    pub fn at_least(check: impl Into<String>, config: Value, worst_value: f64, threshold: f64) -> Self {
        Self {
            pass: worst_value >= threshold,
            ..Self::at_most(check, config, worst_value, threshold)
        }
    }

    /// Passes when `worst_value < threshold` strictly.
    pub fn below(check: impl Into<String>, config: Value, worst_value: f64, threshold: f64) -> Self {
        Self {
            pass: worst_value < threshold,
            ..Self::at_most(check, config, worst_value, threshold)
        }
    }

    pub fn flag(check: impl Into<String>, config: Value, ok: bool) -> Self {
        Self {
            check: check.into(),
            config,
            samples: 1,
            worst_value: if ok { 0.0 } else { 1.0 },
            threshold: 0.0,
            pass: ok,
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {} worst={:.3e} threshold={:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            self.worst_value,
            self.threshold
        )
    }
}

pub fn all_pass(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

pub fn reports_to_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check,samples,worst_value,threshold,pass\n");
    for r in reports {
        out.push_str(&format!(
            "\"{}\",{},{:e},{:e},{}\n",
            r.check.replace('"', "'"),
            r.samples,
            r.worst_value,
            r.threshold,
            r.pass
        ));
    }
    out
}

/// Real parts as CSV rows; refuses matrices with imaginary residual above 1e−12.
pub fn matrix_to_csv(m: &ComplexMatrix) -> Result<String> {
    let im = m.max_imag();
    if im > 1e-12 {
        return Err(Error::InvalidSpec(format!(
            "CSV export is real-only but the matrix has imaginary parts up to {im:.3e}"
        )));
    }
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| format!("{:e}", m.get(i, j).re)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}
