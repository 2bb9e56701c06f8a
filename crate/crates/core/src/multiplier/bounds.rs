//! Closed-form right-hand sides: Hörmander-type weak norms, the compact
//! symbol functional, the difference operator and the Lizorkin bounds.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::MultiplierSpec;
use crate::error::{invalid_param, Result};
use crate::fourier::{Block, SymbolField};
use crate::numerics::{index_gap, pow0, KahanSum};
use crate::singular_values::{distribution_at_closed, StepRearrangement};

fn check_hormander_range(p: f64, q: f64) -> Result<()> {
    if !(p > 1.0 && p <= 2.0 && q >= 2.0 && q.is_finite()) {
        return Err(invalid_param(format!("need 1 < p <= 2 <= q < inf, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// `sup_{s>0} s |{t : mu_t >= s}|^{1/p - 1/q}`, over the attained values.
///
/// At `p = q` the exponent is zero and the sup is `mu_0 = ||A||`.
pub fn hormander_rhs(r: &StepRearrangement, p: f64, q: f64) -> Result<f64> {
    check_hormander_range(p, q)?;
    let e = index_gap(p, q);
    Ok(r.values()
        .iter()
        .map(|&s| s * pow0(distribution_at_closed(r, s), e))
        .fold(0.0, f64::max))
}

/// `sup_{s>0} s (sum_{||σ(ξ)||_op >= s} d_ξ^2)^{1/p - 1/q}` on a compact model.
pub fn symbol_rhs_compact(a: &MultiplierSpec, p: f64, q: f64) -> Result<f64> {
    let model = a.model();
    if !model.kind().is_compact() {
        return Err(model.unsupported("compact symbol bound"));
    }
    check_hormander_range(p, q)?;
    let e = index_gap(p, q);
    let norms: Vec<(f64, f64)> = a
        .symbol()
        .blocks()
        .iter()
        .zip(model.dual())
        .map(|(b, dp)| (b.op_norm(), dp.plancherel_weight * dp.dim as f64))
        .collect();
    let mut best: f64 = 0.0;
    for &(s, _) in &norms {
        if s <= 0.0 {
            continue;
        }
        let mass = norms.iter().filter(|(n, _)| *n >= s).map(|(_, m)| m).sum::<f64>();
        best = best.max(s * pow0(mass, e));
    }
    Ok(best)
}

/// How the last diagonal entry of a difference block is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferenceMode {
    /// Differences for `k < d - 1`, bare `mu_{d-1}` in the last slot.
    #[default]
    Literal,
    /// Differences in every slot, the last one included.
    FullDifference,
}

/// The difference symbol together with its diagonals.
#[derive(Debug, Clone)]
pub struct DifferenceSymbol {
    pub symbol: MultiplierSpec,
    /// Diagonal of `∂σ(π^j)` before the isometry factor, per dual point.
    pub diagonals: Vec<Vec<f64>>,
}

impl DifferenceSymbol {
    /// `||∂σ(π^j)||_op` per dual point.
    pub fn op_norms(&self) -> Vec<f64> {
        self.diagonals
            .iter()
            .map(|d| d.iter().map(|x| x.abs()).fold(0.0, f64::max))
            .collect()
    }
}

/// Differences of consecutive singular values along the dual enumeration,
/// left-multiplied by the polar isometry of `σ(π^j)`. Past the last dual
/// point the symbol is taken to be zero.
pub fn difference_operator(a: &MultiplierSpec, mode: DifferenceMode) -> Result<DifferenceSymbol> {
    let model = a.model();
    if !model.kind().is_compact() {
        return Err(model.unsupported("difference operator"));
    }
    let blocks = a.symbol().blocks();
    let svals: Vec<Vec<f64>> = blocks.iter().map(Block::singular_values).collect();
    let mut diagonals = Vec::with_capacity(blocks.len());
    let mut out = Vec::with_capacity(blocks.len());
    for (j, b) in blocks.iter().enumerate() {
        let d = b.dim();
        let next = svals.get(j + 1);
        let mu_next = |k: usize| next.and_then(|v| v.get(k)).copied().unwrap_or(0.0);
        let diag: Vec<f64> = (0..d)
            .map(|k| {
                let here = svals[j][k];
                if k + 1 == d && mode == DifferenceMode::Literal {
                    here
                } else {
                    here - mu_next(k)
                }
            })
            .collect();
        let u = polar_isometry(b);
        let dm = DMatrix::from_diagonal(&DVector::from_iterator(
            d,
            diag.iter().map(|&x| Complex64::from(x)),
        ));
        out.push(Block::Dense(u * dm));
        diagonals.push(diag);
    }
    Ok(DifferenceSymbol {
        symbol: MultiplierSpec::new(
            format!("diff({})", a.name),
            SymbolField::new(model.clone(), out)?,
        ),
        diagonals,
    })
}

/// `U = W V*` from `σ = W Σ V*`.
fn polar_isometry(b: &Block) -> DMatrix<Complex64> {
    let m = b.to_dense();
    let n = m.nrows();
    if n == 0 {
        return m;
    }
    let svd = m.svd(true, true);
    match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => u * v_t,
        _ => DMatrix::identity(n, n),
    }
}

/// Which form of the second Lizorkin term to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum LizorkinForm {
    /// `sup_π <π>^{n(1/p-1/q+m)} ||∂σ(π)||`, with `1 - 1/p <= m < 1`.
    Sup { m: f64 },
    /// `sum_π <π>^{n(1/p-1/q)} ||∂σ(π)||`.
    Sum,
}

/// The two terms of a Lizorkin-type bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LizorkinTerms {
    pub sup_term: f64,
    pub variation_term: f64,
}

impl LizorkinTerms {
    pub fn total(&self) -> f64 {
        self.sup_term + self.variation_term
    }
}

/// Lizorkin bound on a compact model; `<π>^n` is `bracket(π)^{dim G}`.
pub fn lizorkin_rhs_compact(
    a: &MultiplierSpec,
    p: f64,
    q: f64,
    form: LizorkinForm,
    mode: DifferenceMode,
) -> Result<LizorkinTerms> {
    check_hormander_range(p, q)?;
    if let LizorkinForm::Sup { m } = form {
        if !(m >= 1.0 - 1.0 / p && m < 1.0) {
            return Err(invalid_param(format!(
                "Lizorkin exponent m = {m} outside [1 - 1/p, 1) = [{}, 1)",
                1.0 - 1.0 / p
            )));
        }
    }
    let model = a.model();
    let n = model.topo_dim() as f64;
    let e = index_gap(p, q);
    let sup_term = a
        .symbol()
        .blocks()
        .iter()
        .zip(model.dual())
        .map(|(b, dp)| dp.bracket().powf(n * e) * b.op_norm())
        .fold(0.0, f64::max);
    let diff = difference_operator(a, mode)?;
    let norms = diff.op_norms();
    let variation_term = match form {
        LizorkinForm::Sup { m } => model
            .dual()
            .iter()
            .zip(&norms)
            .map(|(dp, nd)| dp.bracket().powf(n * (e + m)) * nd)
            .fold(0.0, f64::max),
        LizorkinForm::Sum => {
            let s: KahanSum = model
                .dual()
                .iter()
                .zip(&norms)
                .map(|(dp, nd)| dp.bracket().powf(n * e) * nd)
                .collect();
            s.sum()
        }
    };
    Ok(LizorkinTerms {
        sup_term,
        variation_term,
    })
}

/// Non-decreasing weights `w(t)` for the locally compact Lizorkin bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightFn {
    Identity,
    Power { exponent: f64 },
    Constant { value: f64 },
    Zero,
}

impl WeightFn {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            WeightFn::Identity => t,
            WeightFn::Power { exponent } => t.powf(exponent),
            WeightFn::Constant { value } => value,
            WeightFn::Zero => 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            WeightFn::Power { exponent } if !(exponent >= 0.0) => {
                Err(invalid_param("weight exponent must be >= 0"))
            }
            WeightFn::Constant { value } if !(value >= 0.0) => {
                Err(invalid_param("constant weight must be >= 0"))
            }
            _ => Ok(()),
        }
    }
}

/// `sup_t w(t)^{1/p-1/q} mu_t + sum_i w(t_i)^{1/p-1/q} (mu(t_i^-) - mu(t_i))`.
pub fn lizorkin_rhs_lcg(r: &StepRearrangement, w: WeightFn, p: f64, q: f64) -> Result<LizorkinTerms> {
    if !(p > 1.0 && p <= 2.0_f64.min(q)) {
        return Err(invalid_param(format!("need 1 < p <= min(2, q), got p = {p}, q = {q}")));
    }
    w.validate()?;
    let e = index_gap(p, q);
    let we = |t: f64| {
        let x = w.eval(t);
        if e == 0.0 {
            1.0
        } else {
            x.powf(e)
        }
    };
    // w non-decreasing: the sup over a block sits at its right end
    let sup_term = r
        .blocks()
        .map(|(_, b, v)| v * we(b))
        .fold(0.0, f64::max);
    let vals = r.values();
    let jumps: KahanSum = r
        .blocks()
        .enumerate()
        .map(|(i, (_, b, v))| {
            let below = vals.get(i + 1).copied().unwrap_or(0.0);
            we(b) * (v - below)
        })
        .collect();
    Ok(LizorkinTerms {
        sup_term,
        variation_term: jumps.sum(),
    })
}
