use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// How a report decides pass/fail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstantPolicy {
    /// `lhs <= (1 + tol) rhs`.
    Unit { tol: f64 },
    /// `|lhs / rhs - 1| <= tol`.
    Equality { tol: f64 },
    /// Implicit constant: a single report passes when both sides are finite;
    /// growth of `lhs / rhs` is judged by a size-ladder scan.
    Stability,
}

/// One inequality check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub inequality_id: String,
    pub model: String,
    pub p: f64,
    pub q: f64,
    pub b_or_gamma: f64,
    pub trials: usize,
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    pub policy: ConstantPolicy,
    /// Weight or test-function family, when the check has one.
    pub weight: Option<String>,
    pub extras: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// `lhs / rhs`, with `0 / 0 = 0` and `x / 0 = inf`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

impl VerificationReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        inequality_id: &str,
        model: String,
        (p, q, b_or_gamma): (f64, f64, f64),
        trials: usize,
        seed: u64,
        lhs: f64,
        rhs: f64,
        policy: ConstantPolicy,
    ) -> Self {
        let mut r = VerificationReport {
            inequality_id: inequality_id.to_string(),
            model,
            p,
            q,
            b_or_gamma,
            trials,
            seed,
            lhs,
            rhs,
            ratio: 0.0,
            pass: false,
            policy,
            weight: None,
            extras: BTreeMap::new(),
            notes: Vec::new(),
        };
        r.set_sides(lhs, rhs);
        r
    }

    /// Replaces both sides and re-evaluates the policy.
    pub fn set_sides(&mut self, lhs: f64, rhs: f64) {
        self.lhs = lhs;
        self.rhs = rhs;
        self.ratio = ratio(lhs, rhs);
        self.pass = self.judge();
    }

    fn judge(&self) -> bool {
        if self.lhs.is_nan() || self.rhs.is_nan() {
            return false;
        }
        match self.policy {
            ConstantPolicy::Unit { tol } => self.ratio <= 1.0 + tol,
            ConstantPolicy::Equality { tol } => {
                (self.lhs == 0.0 && self.rhs == 0.0) || (self.ratio - 1.0).abs() <= tol
            }
            ConstantPolicy::Stability => self.ratio.is_finite() && self.rhs.is_finite(),
        }
    }

    pub fn fail_with(&mut self, note: impl Into<String>) {
        self.pass = false;
        self.notes.push(note.into());
    }
}
