//! Size-ladder scans for inequalities with implicit constants.

use std::fmt::Write as _;

use serde::Serialize;

use super::config::Check;
use super::run::run_check;
use crate::error::{LabError, Result};
use crate::group_models::ModelSpec;
use crate::multiplier::{ConstantPolicy, TrialStrategy, VerificationReport};

/// Allowed growth of the empirical constant from the first to the last rung.
pub const MAX_GROWTH: f64 = 1.10;

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub size: usize,
    pub constant: f64,
}

#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub rows: Vec<ScanRow>,
    /// Per-rung reports.
    pub reports: Vec<VerificationReport>,
    /// Summary: `lhs` = last constant, `rhs` = first constant.
    pub summary: VerificationReport,
    pub warning: Option<String>,
}

/// The same model family at another size: `n` for `Z_n`, `band` for tori,
/// `l_max` for SU(2).
pub fn resize(base: &ModelSpec, size: usize) -> Result<ModelSpec> {
    Ok(match base {
        ModelSpec::Cyclic { .. } => ModelSpec::Cyclic { n: size },
        ModelSpec::Torus { d, .. } => ModelSpec::Torus { d: *d, band: size },
        ModelSpec::Su2 { .. } => ModelSpec::Su2 { l_max: size as f64, quad_order: None },
        other => {
            return Err(LabError::Config(format!(
                "size ladders are defined for cyclic, torus and su2 models, not {}",
                other.label()
            )))
        }
    })
}

/// Runs `check` on every rung and asserts `last / first <= 1.10`.
pub fn scan_constant_stability(
    base: &ModelSpec,
    ladder: &[usize],
    check: &Check,
    strategy: TrialStrategy,
    trials: usize,
    seed: u64,
) -> Result<ScanOutcome> {
    if ladder.is_empty() {
        return Err(LabError::Config("ladder must not be empty".into()));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LabError::Config("ladder sizes must be strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(ladder.len());
    let mut reports = Vec::with_capacity(ladder.len());
    for &size in ladder {
        let model = resize(base, size)?.build()?;
        let rep = run_check(&model, check, strategy, trials, seed)?;
        rows.push(ScanRow {
            size,
            constant: rep.ratio,
        });
        reports.push(rep);
    }
    let first = rows[0].constant;
    let last = rows[rows.len() - 1].constant;
    let (p, q, b) = (reports[0].p, reports[0].q, reports[0].b_or_gamma);
    let mut summary = VerificationReport::new(
        &format!("{}_scan", check.id()),
        format!("{}..{}", reports[0].model, reports[reports.len() - 1].model),
        (p, q, b),
        trials,
        seed,
        last,
        first,
        ConstantPolicy::Unit { tol: MAX_GROWTH - 1.0 },
    );
    summary.weight = reports[0].weight.clone();
    let warning = if ladder.len() == 1 {
        let w = "ladder has a single rung: growth check is vacuous".to_string();
        summary.set_sides(1.0, 1.0);
        summary.notes.push(w.clone());
        Some(w)
    } else {
        None
    };
    Ok(ScanOutcome {
        rows,
        reports,
        summary,
        warning,
    })
}

/// TSV with a column description header.
pub fn scan_tsv(rows: &[ScanRow]) -> String {
    let mut out = String::from("# empirical constant max(lhs/rhs) per model size\n# columns: size, constant\nsize\tconstant\n");
    for r in rows {
        let _ = writeln!(out, "{}\t{}", r.size, super::report::fmt_num(r.constant));
    }
    out
}
