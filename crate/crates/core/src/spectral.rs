//! Spectral projections and their traces: eigenvalue counting for compact
//! Laplacians, the Heisenberg sub-Laplacian and Rockland operators,
//! functions of operators, weak norms of spectral multipliers, heat-decay
//! bounds and embedding constants.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, invalid_param, LabError, Result};
use crate::fourier::{Block, SymbolField};
use crate::group_models::{DualLabel, GroupModel, LambdaGrid, ModelKind, MAX_DUAL_SIZE};
use crate::numerics::{index_gap, odd_zeta, KahanSum, LogLogFit};
use crate::singular_values::{rearrangement_of_symbol, weak_norm};

/// Asserted asymptotics `tau(E_(0,s)) ~ C s^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailLaw {
    pub alpha: f64,
    pub c: f64,
}

impl TailLaw {
    /// Laplacian on SU(2), eigenvalues of `I - L`: `sum d^2 ~ (8/3) s^{3/2}`.
    pub fn su2_laplacian() -> Self {
        TailLaw { alpha: 1.5, c: 8.0 / 3.0 }
    }

    /// Sub-Laplacian on SU(2), declared: `alpha = Q/2 = 2`, unit constant.
    pub fn su2_sub_laplacian() -> Self {
        TailLaw { alpha: 2.0, c: 1.0 }
    }

    /// Heisenberg sub-Laplacian on `H^n`: `alpha = n + 1`.
    pub fn heisenberg(n: usize) -> Self {
        TailLaw {
            alpha: n as f64 + 1.0,
            c: heisenberg_trace_exact(n, 1.0),
        }
    }

    pub fn count(&self, s: f64) -> f64 {
        self.c * s.powf(self.alpha)
    }
}

/// Which operator a compact model's spectrum describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumKind {
    /// Eigenvalues of `I - L` (the model's spectral tags).
    Tags,
    /// Eigenvalues of `-L`.
    Laplacian,
}

#[derive(Debug, Clone)]
struct SpectralPoint {
    scale: f64,
    /// Sorted ascending; eigenvalues are `scale * profile[i]`.
    profile: Arc<[f64]>,
    weight: f64,
}

/// Eigenvalues with multiplicities, one list per dual point.
#[derive(Debug, Clone)]
pub struct SpectralData {
    model: Arc<GroupModel>,
    points: Vec<SpectralPoint>,
    tail_law: Option<TailLaw>,
    valid: (f64, f64),
}

impl SpectralData {
    /// Spectrum of `I - L` or `-L` on a compact or radial model; each
    /// eigenvalue is repeated `d_π` times with mass `w_π`.
    pub fn compact(model: Arc<GroupModel>, kind: SpectrumKind) -> Result<Self> {
        if model.kind() == ModelKind::HeisenbergSpectral {
            return Err(model.unsupported("compact spectrum"));
        }
        let shift = if kind == SpectrumKind::Tags { 0.0 } else { 1.0 };
        let points: Vec<SpectralPoint> = model
            .dual()
            .iter()
            .map(|dp| SpectralPoint {
                scale: dp.spectral_tag - shift,
                profile: vec![1.0; dp.dim].into(),
                weight: dp.plancherel_weight,
            })
            .collect();
        let top = points.iter().map(|p| p.scale).fold(0.0, f64::max);
        let tail_law = match (model.kind(), kind) {
            (ModelKind::Su2, SpectrumKind::Tags) => Some(TailLaw::su2_laplacian()),
            _ => None,
        };
        Ok(SpectralData {
            model,
            points,
            tail_law,
            valid: (0.0, top),
        })
    }

    /// Sub-Laplacian on the Heisenberg model: `|λ| prod (2k_j + 1)` with
    /// λ-cell mass. The validity window is `[λ_min 1000^{1/n}, min(λ_min
    /// (2K + 1), λ_max)]`.
    pub fn heisenberg(model: Arc<GroupModel>) -> Result<Self> {
        let h = model
            .heisenberg()
            .ok_or_else(|| model.unsupported("Heisenberg sub-Laplacian"))?
            .clone();
        let points = model
            .dual()
            .iter()
            .map(|dp| SpectralPoint {
                scale: dp.spectral_tag,
                profile: h.profile.clone(),
                weight: dp.plancherel_weight,
            })
            .collect();
        let lo = model.dual().iter().map(|d| d.spectral_tag).fold(f64::INFINITY, f64::min);
        let hi = model.dual().iter().map(|d| d.spectral_tag).fold(0.0, f64::max);
        let ceiling = (lo * (2.0 * h.cutoff as f64 + 1.0)).min(hi);
        let floor = lo * 1000f64.powf(1.0 / h.n as f64);
        Ok(SpectralData {
            model,
            points,
            tail_law: Some(TailLaw::heisenberg(h.n)),
            valid: (floor, ceiling),
        })
    }

    /// Arbitrary nonnegative eigenvalues, `d_π` of them per dual point.
    pub fn from_eigenvalues(model: Arc<GroupModel>, lists: Vec<Vec<f64>>) -> Result<Self> {
        if lists.len() != model.dual().len() {
            return Err(invalid_input("one eigenvalue list per dual point is required"));
        }
        let mut points = Vec::with_capacity(lists.len());
        for (mut l, dp) in lists.into_iter().zip(model.dual()) {
            if l.len() != dp.dim {
                return Err(invalid_input(format!(
                    "dual point {} needs {} eigenvalues, got {}",
                    dp.index,
                    dp.dim,
                    l.len()
                )));
            }
            if l.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
                return Err(invalid_input("eigenvalues must be finite and >= 0"));
            }
            l.sort_by(f64::total_cmp);
            points.push(SpectralPoint {
                scale: 1.0,
                profile: l.into(),
                weight: dp.plancherel_weight,
            });
        }
        let top = points
            .iter()
            .filter_map(|p| p.profile.last().copied())
            .fold(0.0, f64::max);
        Ok(SpectralData {
            model,
            points,
            tail_law: None,
            valid: (0.0, top),
        })
    }

    pub fn with_tail_law(mut self, law: Option<TailLaw>) -> Self {
        self.tail_law = law;
        self
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    pub fn tail_law(&self) -> Option<TailLaw> {
        self.tail_law
    }

    /// `(floor, ceiling)`: counts are trusted for `floor <= s <= ceiling / 2`.
    pub fn validity(&self) -> (f64, f64) {
        self.valid
    }

    /// Eigenvalues and masses of one dual point, ascending.
    pub fn eigenvalues(&self, index: usize) -> Vec<(f64, f64)> {
        let p = &self.points[index];
        p.profile.iter().map(|&x| (p.scale * x, p.weight)).collect()
    }

    /// All `(eigenvalue, mass)` pairs with eigenvalue > 0, merged and sorted.
    fn positive_spectrum(&self) -> Vec<(f64, f64)> {
        let mut all: Vec<(f64, f64)> = self
            .points
            .iter()
            .flat_map(|p| p.profile.iter().map(move |&x| (p.scale * x, p.weight)))
            .filter(|&(e, _)| e > 0.0)
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (e, m) in all {
            match out.last_mut() {
                Some(last) if last.0 == e => last.1 += m,
                _ => out.push((e, m)),
            }
        }
        out
    }
}

/// `tau(E_(0,u)(|L|))`: mass of eigenvalues in the open interval `(0, u)`.
pub fn spectral_counting(l: &SpectralData, u: f64) -> f64 {
    if !(u > 0.0) {
        return 0.0;
    }
    let mut acc = KahanSum::default();
    for p in &l.points {
        if p.scale <= 0.0 {
            continue;
        }
        let below = p.profile.partition_point(|&x| p.scale * x < u);
        let zeros = p.profile.partition_point(|&x| p.scale * x <= 0.0);
        acc.add(p.weight * (below - zeros) as f64);
    }
    acc.sum()
}

/// `s^{n+1}/(n+1) (sum_k (2k+1)^{-(n+1)})^n`.
pub fn heisenberg_trace_exact(n: usize, s: f64) -> f64 {
    let np1 = n as f64 + 1.0;
    s.powf(np1) / np1 * odd_zeta(n as u32 + 1).powi(n as i32)
}

/// Rockland-type counts `int |λ|^n #{m in {1..K}^n : |λ|^j prod m_k^{2j} <= s} dλ`
/// for every `s` in `levels`.
pub fn rockland_counts(n: usize, j: u32, grid: &LambdaGrid, k: usize, levels: &[f64]) -> Result<Vec<f64>> {
    if n == 0 || j == 0 || k == 0 {
        return Err(invalid_param("Rockland count needs n, j, K >= 1"));
    }
    let size = (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(k))
        .filter(|&b| b <= MAX_DUAL_SIZE)
        .ok_or_else(|| LabError::Capacity(format!("K^n = {k}^{n} too large")))?;
    let mut profile: Vec<f64> = (0..size)
        .map(|mut idx| {
            let mut p = 1.0;
            for _ in 0..n {
                p *= ((idx % k) as f64 + 1.0).powi(2 * j as i32);
                idx /= k;
            }
            p
        })
        .collect();
    profile.sort_by(f64::total_cmp);
    let cells = grid.cells(n)?;
    Ok(levels
        .iter()
        .map(|&s| {
            let acc: KahanSum = cells
                .iter()
                .map(|&(lambda, width)| {
                    let a = lambda.abs().powi(j as i32);
                    let c = profile.partition_point(|&x| a * x <= s);
                    lambda.abs().powi(n as i32) * width * c as f64
                })
                .collect();
            acc.sum()
        })
        .collect())
}

/// Single-level form of [`rockland_counts`].
pub fn rockland_count(n: usize, j: u32, grid: &LambdaGrid, k: usize, s: f64) -> Result<f64> {
    Ok(rockland_counts(n, j, grid, k, &[s])?[0])
}

/// Diagonal symbol field `φ(eigenvalue)`.
pub fn apply_spectral_function(l: &SpectralData, phi: impl Fn(f64) -> f64) -> Result<SymbolField> {
    let mut blocks = Vec::with_capacity(l.points.len());
    for p in &l.points {
        let d: Vec<f64> = p.profile.iter().map(|&x| phi(p.scale * x)).collect();
        if d.iter().any(|v| !v.is_finite()) {
            return Err(invalid_input("spectral function is not finite on the spectrum"));
        }
        blocks.push(Block::Diagonal(d));
    }
    SymbolField::new(l.model.clone(), blocks)
}

/// Which route produced a spectral weak norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakNormRoute {
    /// `sup_u φ(u) tau(E_(0,u))^{1/r}` over eigenvalue breakpoints.
    Counting,
    /// `weak_norm` of the rearrangement of `φ(|L|)` (non-monotone `φ`).
    Rearrangement,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralWeakNorm {
    pub value: f64,
    pub route: WeakNormRoute,
}

/// `||φ(|L|)||_{L^{r,inf}}` for decreasing `φ` with `φ(0) = 1`.
///
/// The counting function is constant on `(e_i, e_{i+1}]`, so the sup over
/// that interval is the right limit at `e_i`: `φ(e_i) tau(E_(0,e_i]))^{1/r}`.
pub fn spectral_weak_norm(l: &SpectralData, phi: impl Fn(f64) -> f64, rr: f64) -> Result<SpectralWeakNorm> {
    if !(rr >= 1.0) {
        return Err(invalid_param(format!("weak index must be >= 1, got {rr}")));
    }
    let spec = l.positive_spectrum();
    let vals: Vec<f64> = spec.iter().map(|&(e, _)| phi(e)).collect();
    let monotone = phi(0.0) >= vals.first().copied().unwrap_or(0.0)
        && vals.windows(2).all(|w| w[1] <= w[0])
        && vals.iter().all(|v| v.is_finite() && *v >= 0.0);
    if !monotone {
        let sym = apply_spectral_function(l, |x| phi(x).abs())?;
        let value = weak_norm(&rearrangement_of_symbol(&sym)?, rr)?;
        return Ok(SpectralWeakNorm {
            value,
            route: WeakNormRoute::Rearrangement,
        });
    }
    let mut cum = KahanSum::default();
    let mut best: f64 = 0.0;
    for (&(_, m), v) in spec.iter().zip(&vals) {
        cum.add(m);
        best = best.max(v * cum.sum().powf(1.0 / rr));
    }
    Ok(SpectralWeakNorm {
        value: best,
        route: WeakNormRoute::Counting,
    })
}

/// `sup_u tau(E_(0,u))^{1/r} e^{-tu}` on the data.
pub fn empirical_heat_bound(l: &SpectralData, t: f64, rr: f64) -> Result<f64> {
    Ok(spectral_weak_norm(l, |u| (-t * u).exp(), rr)?.value)
}

fn require_tail(l: &SpectralData) -> Result<TailLaw> {
    l.tail_law.ok_or_else(|| LabError::UnsupportedModel {
        model: l.model.label(),
        what: "closed-form bound without a tail law".into(),
    })
}

fn check_pq(p: f64, q: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0 && q >= 2.0 && q.is_finite()) {
        return Err(invalid_param(format!("need 1 < p <= 2 <= q < inf, got p = {p}, q = {q}")));
    }
    Ok(index_gap(p, q))
}

/// `C^{1/r} (a/t)^a e^{-a}` with `a = alpha/r`, `1/r = 1/p - 1/q`.
pub fn heat_decay_bound(l: &SpectralData, t: f64, p: f64, q: f64) -> Result<f64> {
    let law = require_tail(l)?;
    let inv_r = check_pq(p, q)?;
    if !(t > 0.0) {
        return Err(invalid_param(format!("time must be positive, got {t}")));
    }
    Ok(heat_closed_form(law, t, inv_r))
}

fn heat_closed_form(law: TailLaw, t: f64, inv_r: f64) -> f64 {
    let a = law.alpha * inv_r;
    if a == 0.0 {
        return 1.0;
    }
    law.c.powf(inv_r) * (a / t).powf(a) * (-a).exp()
}

/// `sup_u (1+u)^{-γ} tau(E_(0,u))^{1/r}`: the larger of a breakpoint scan
/// on the data and the sup of the tail law; `+inf` when `γ < alpha/r`.
pub fn embedding_constant(l: &SpectralData, gamma: f64, p: f64, q: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(invalid_param(format!("gamma must be >= 0, got {gamma}")));
    }
    let law = require_tail(l)?;
    let inv_r = check_pq(p, q)?;
    let a = law.alpha * inv_r;
    if gamma < a {
        return Ok(f64::INFINITY);
    }
    let data = if inv_r == 0.0 {
        1.0
    } else {
        spectral_weak_norm(l, |u| (1.0 + u).powf(-gamma), 1.0 / inv_r)?.value
    };
    let shape = if a == 0.0 || gamma == a {
        1.0
    } else {
        // sup_u u^a (1+u)^{-γ} at u = a/(γ-a)
        let g = gamma - a;
        (a.ln() * a + g.ln() * g - gamma.ln() * gamma).exp()
    };
    Ok(data.max(law.c.powf(inv_r) * shape))
}

/// Grid measure of `{ξ : |a(|ξ|)| <= s}` on a radial model.
pub fn homogeneous_symbol_trace(model: &GroupModel, a: impl Fn(f64) -> f64, s: f64) -> Result<f64> {
    if model.kind() != ModelKind::EuclideanRadial {
        return Err(model.unsupported("homogeneous symbol trace"));
    }
    let acc: KahanSum = model
        .dual()
        .iter()
        .filter(|dp| match dp.label {
            DualLabel::Shell { inner, outer } => a(0.5 * (inner + outer)).abs() <= s,
            _ => false,
        })
        .map(|dp| dp.plancherel_weight)
        .collect();
    Ok(acc.sum())
}

/// CSV with columns `s,count,fitted_exponent,residual`.
pub fn slope_report_csv(series: &[(f64, f64)], fit: &LogLogFit) -> String {
    let mut out = String::from("s,count,fitted_exponent,residual\n");
    for &(s, c) in series {
        let pred = fit.intercept + fit.slope * s.ln();
        let _ = writeln!(out, "{s:.16e},{c:.16e},{:.16e},{:.16e}", fit.slope, c.ln() - pred);
    }
    out
}
