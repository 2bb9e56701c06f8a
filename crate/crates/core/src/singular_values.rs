//! Step-function engine for generalised singular numbers `mu_t`,
//! distribution functions `d_lambda`, Lorentz norms and traces of
//! functions of `|A|`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{invalid_input, invalid_param, Result};
use crate::fourier::SymbolField;
use crate::group_models::{DualLabel, GroupModel, ModelKind};
use crate::numerics::KahanSum;

/// Relative tolerance used when merging nearly equal values and masses.
const MERGE_TOL: f64 = 1e-12;

/// `mu_t = values[i]` on `[breaks[i], breaks[i+1])`, zero from `breaks[m]` on.
///
/// `breaks[0] = 0`; values are strictly decreasing and positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRearrangement {
    breaks: Vec<f64>,
    values: Vec<f64>,
    ambient: f64,
}

impl StepRearrangement {
    /// The zero operator on a space of trace `ambient`.
    pub fn zero(ambient: f64) -> Self {
        StepRearrangement {
            breaks: vec![0.0],
            values: Vec::new(),
            ambient,
        }
    }

    /// Builds a step function from `(value, mass)` atoms in any order.
    /// Zero values are dropped, equal values merged.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (f64, f64)>, ambient: f64) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms.into_iter().collect();
        for &(v, m) in &atoms {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid_input(format!("singular value {v} is not finite and >= 0")));
            }
            if !(m >= 0.0) {
                return Err(invalid_input(format!("mass {m} is negative")));
            }
        }
        atoms.retain(|&(v, m)| v > 0.0 && m > 0.0);
        // stable: ties keep their original order
        atoms.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut breaks = vec![0.0];
        let mut values: Vec<f64> = Vec::new();
        let mut acc = KahanSum::default();
        for (v, m) in atoms {
            acc.add(m);
            match values.last() {
                Some(&last) if (last - v).abs() <= MERGE_TOL * last => {
                    *breaks.last_mut().expect("non-empty") = acc.sum();
                }
                _ => {
                    values.push(v);
                    breaks.push(acc.sum());
                }
            }
        }
        Ok(StepRearrangement {
            breaks,
            values,
            ambient: ambient.max(acc.sum()),
        })
    }

    /// Builds a step function from explicit breakpoints and values.
    pub fn from_steps(breaks: Vec<f64>, values: Vec<f64>, ambient: f64) -> Result<Self> {
        if breaks.len() != values.len() + 1 || breaks.first() != Some(&0.0) {
            return Err(invalid_input("need breaks = [0, t_1, .., t_m] and m values"));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid_input("breakpoints must be strictly increasing"));
        }
        if values.windows(2).any(|w| !(w[1] < w[0])) || values.iter().any(|&v| !(v > 0.0)) {
            return Err(invalid_input("values must be positive and strictly decreasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid_input("values must be finite"));
        }
        let total = *breaks.last().expect("non-empty");
        Ok(StepRearrangement {
            breaks,
            values,
            ambient: ambient.max(total),
        })
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Mass of the support, `t_m`.
    pub fn total_mass(&self) -> f64 {
        *self.breaks.last().expect("breaks start with 0")
    }

    /// Trace of the identity in the ambient algebra (`+inf` for noncompact or
    /// infinite-dimensional settings).
    pub fn ambient(&self) -> f64 {
        self.ambient
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(t_start, t_end, value)` per block.
    pub fn blocks(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (self.breaks[i], self.breaks[i + 1], v))
    }

    /// Pointwise image `f(mu_t)` for increasing `f` with `f(0) = 0`.
    pub fn map_increasing(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_atoms(self.blocks().map(|(a, b, v)| (f(v), b - a)), self.ambient)
    }

    /// CSV with columns `t_start,t_end,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_start,t_end,value\n");
        for (a, b, v) in self.blocks() {
            let _ = writeln!(out, "{a:.16e},{b:.16e},{v:.16e}");
        }
        out
    }
}

/// Pools the singular values of every block, each with the Plancherel mass
/// of its dual point.
pub fn rearrangement_of_symbol(sigma: &SymbolField) -> Result<StepRearrangement> {
    let model = sigma.model();
    let mut atoms = Vec::new();
    for (b, dp) in sigma.blocks().iter().zip(model.dual()) {
        if !b.is_finite() {
            return Err(invalid_input(format!("non-finite block at dual point {}", dp.index)));
        }
        atoms.extend(b.singular_values().into_iter().map(|s| (s, dp.plancherel_weight)));
    }
    StepRearrangement::from_atoms(atoms, model.ambient_trace())
}

/// `mu_t(M_phi) = phi*(t)` for a radial function given per shell.
pub fn classical_rearrangement(model: &GroupModel, phi: &[f64]) -> Result<StepRearrangement> {
    if model.kind() != ModelKind::EuclideanRadial {
        return Err(model.unsupported("classical rearrangement"));
    }
    if phi.len() != model.dual().len() {
        return Err(invalid_input(format!(
            "{} shell values for {} shells",
            phi.len(),
            model.dual().len()
        )));
    }
    let atoms = phi
        .iter()
        .zip(model.dual())
        .map(|(&v, dp)| (v.abs(), dp.plancherel_weight));
    StepRearrangement::from_atoms(atoms, f64::INFINITY)
}

/// Samples a radial profile at shell midpoints.
pub fn radial_profile(model: &GroupModel, phi: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
    if model.kind() != ModelKind::EuclideanRadial {
        return Err(model.unsupported("radial profile"));
    }
    Ok(model
        .dual()
        .iter()
        .map(|dp| match dp.label {
            DualLabel::Shell { inner, outer } => phi(0.5 * (inner + outer)),
            _ => unreachable!("radial model has shell labels"),
        })
        .collect())
}

/// Right-continuous evaluation of `mu_t`.
pub fn mu_at(r: &StepRearrangement, t: f64) -> f64 {
    // first block whose right end exceeds t
    let i = r.breaks[1..].partition_point(|&b| b <= t);
    r.values.get(i).copied().unwrap_or(0.0)
}

/// `d_lambda = tau(E_(lambda, inf)(|A|))`: mass where `mu > lambda`.
pub fn distribution_at(r: &StepRearrangement, lambda: f64) -> f64 {
    let k = r.values.partition_point(|&v| v > lambda);
    r.breaks[k]
}

/// Mass where `mu >= s` (closed level set).
pub fn distribution_at_closed(r: &StepRearrangement, s: f64) -> f64 {
    let k = r.values.partition_point(|&v| v >= s);
    r.breaks[k]
}

/// `||A||_{L^{p,q}}`, closed form per block. Divergent integrals give `+inf`.
pub fn lorentz_norm(r: &StepRearrangement, p: f64, q: f64) -> Result<f64> {
    if !(p >= 1.0) || !(q >= 1.0) {
        return Err(invalid_param(format!("Lorentz indices need p, q >= 1, got ({p}, {q})")));
    }
    if q.is_infinite() {
        return weak_norm(r, p);
    }
    if p.is_infinite() {
        // integral of mu^q dt/t diverges at 0 for any nonzero operator
        return Ok(if r.is_empty() { 0.0 } else { f64::INFINITY });
    }
    if r.total_mass().is_infinite() && !r.is_empty() {
        return Ok(f64::INFINITY);
    }
    let e = q / p;
    let sum: KahanSum = r
        .blocks()
        .map(|(a, b, v)| {
            if p == q {
                v.powf(q) * (b - a)
            } else {
                v.powf(q) * (b.powf(e) - a.powf(e)) / e
            }
        })
        .collect();
    Ok(sum.sum().powf(1.0 / q))
}

/// `sup_t t^{1/rr} mu_t`, attained at block right ends.
pub fn weak_norm(r: &StepRearrangement, rr: f64) -> Result<f64> {
    if !(rr >= 1.0) {
        return Err(invalid_param(format!("weak index must be >= 1, got {rr}")));
    }
    Ok(sup_t_side(r, 1.0 / rr))
}

fn sup_t_side(r: &StepRearrangement, alpha: f64) -> f64 {
    r.blocks()
        .map(|(_, b, v)| if alpha == 0.0 { v } else { v * b.powf(alpha) })
        .fold(0.0, f64::max)
}

/// Both sides of `sup_t t^alpha mu_t = sup_s s d_s^alpha`.
///
/// The `s` side is evaluated from the distribution function alone: on
/// `[v_{i+1}, v_i)` the strict distribution is constant, so the sup over
/// that interval is the left limit at `v_i`.
pub fn sup_duality_check(r: &StepRearrangement, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(invalid_param(format!("alpha must be positive, got {alpha}")));
    }
    let t_side = sup_t_side(r, alpha);
    let mut s_side: f64 = 0.0;
    let mut lower = 0.0;
    for &v in r.values.iter().rev() {
        // d_s is constant for s in [lower, v); probe it at the left end
        let d = distribution_at(r, lower);
        s_side = s_side.max(v * d.powf(alpha));
        lower = v;
    }
    Ok((t_side, s_side))
}

/// `tau(phi(|A|)) = int_0^inf phi(mu_t) dt`, block by block, plus
/// `phi(0)` times the mass where `mu` vanishes.
pub fn trace_of_function(r: &StepRearrangement, phi: impl Fn(f64) -> f64) -> f64 {
    let mut acc: KahanSum = r.blocks().map(|(a, b, v)| phi(v) * (b - a)).collect();
    let z = phi(0.0);
    if z != 0.0 {
        let rest = r.ambient - r.total_mass();
        if rest.is_infinite() {
            return if z > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        acc.add(z * rest);
    }
    acc.sum()
}
