//! Finite computable models of unimodular groups.
//!
//! A [`GroupModel`] carries a truncated unitary dual (ordered by spectral tag),
//! an optional product quadrature for Haar measure and a representation
//! evaluator. Compact models use Haar mass 1 and Plancherel weight `d_pi`, so
//! `||f||_2^2 = sum_pi d_pi ||f^(pi)||_HS^2` holds with no extra constants.

pub mod su2;

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::Fft;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, LabError, Result};
use crate::numerics::{gauss_legendre, unit_ball_volume};

/// Largest dual (or quadrature) a model may allocate.
pub const MAX_DUAL_SIZE: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Cyclic,
    Torus,
    Su2,
    HeisenbergSpectral,
    EuclideanRadial,
}

impl ModelKind {
    pub fn is_compact(self) -> bool {
        matches!(self, ModelKind::Cyclic | ModelKind::Torus | ModelKind::Su2)
    }
}

/// λ-grid for the Heisenberg model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LambdaGrid {
    /// Explicit `(λ, Δλ)` cells.
    Explicit { cells: Vec<(f64, f64)> },
    /// Geometric cells on `[lambda_min, lambda_max]`. The representative of
    /// each cell is chosen so that `|λ|^n Δλ` equals the exact cell integral
    /// of `|λ|^n`.
    Geometric {
        lambda_min: f64,
        lambda_max: f64,
        cells: usize,
    },
}

impl LambdaGrid {
    /// Materialises the `(λ, Δλ)` list for dimension parameter `n`.
    pub fn cells(&self, n: usize) -> Result<Vec<(f64, f64)>> {
        match self {
            LambdaGrid::Explicit { cells } => {
                if cells.is_empty() {
                    return Err(invalid_param("empty λ-grid"));
                }
                for &(l, w) in cells {
                    if l == 0.0 || !l.is_finite() {
                        return Err(invalid_param(
                            "λ = 0 in grid: Plancherel density vanishes there",
                        ));
                    }
                    if !(w > 0.0) || !w.is_finite() {
                        return Err(invalid_param(format!("λ-cell weight must be > 0, got {w}")));
                    }
                }
                Ok(cells.clone())
            }
            LambdaGrid::Geometric {
                lambda_min,
                lambda_max,
                cells,
            } => {
                let (lo, hi, m) = (*lambda_min, *lambda_max, *cells);
                if !(lo > 0.0 && hi > lo && hi.is_finite()) || m == 0 {
                    return Err(invalid_param(format!(
                        "geometric λ-grid needs 0 < min < max and cells >= 1, got [{lo}, {hi}] x {m}"
                    )));
                }
                let ratio = (hi / lo).ln() / m as f64;
                let np1 = n as f64 + 1.0;
                Ok((0..m)
                    .map(|i| {
                        let a = lo * (ratio * i as f64).exp();
                        let b = if i + 1 == m { hi } else { lo * (ratio * (i + 1) as f64).exp() };
                        let width = b - a;
                        let integral = (b.powf(np1) - a.powf(np1)) / np1;
                        let rep = if n == 0 {
                            (a * b).sqrt()
                        } else {
                            (integral / width).powf(1.0 / n as f64)
                        };
                        (rep, width)
                    })
                    .collect())
            }
        }
    }

    /// Smallest and largest `|λ|` covered.
    pub fn extent(&self, n: usize) -> Result<(f64, f64)> {
        match self {
            LambdaGrid::Geometric {
                lambda_min,
                lambda_max,
                ..
            } => Ok((*lambda_min, *lambda_max)),
            LambdaGrid::Explicit { .. } => {
                let cells = self.cells(n)?;
                let lo = cells.iter().map(|c| c.0.abs()).fold(f64::INFINITY, f64::min);
                let hi = cells.iter().map(|c| c.0.abs()).fold(0.0, f64::max);
                Ok((lo, hi))
            }
        }
    }
}

/// Radial shells for the Euclidean rearrangement model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RadialGrid {
    Uniform { r_max: f64, shells: usize },
    Edges { edges: Vec<f64> },
}

impl RadialGrid {
    fn edges(&self) -> Result<Vec<f64>> {
        let edges = match self {
            RadialGrid::Uniform { r_max, shells } => {
                if *shells == 0 || !(*r_max > 0.0) {
                    return Err(invalid_param("radial grid is empty"));
                }
                (0..=*shells)
                    .map(|i| r_max * i as f64 / *shells as f64)
                    .collect()
            }
            RadialGrid::Edges { edges } => edges.clone(),
        };
        if edges.len() < 2 {
            return Err(invalid_param("radial grid is empty"));
        }
        if edges[0] < 0.0 || edges.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid_param(
                "radial grid edges must be non-negative and strictly increasing",
            ));
        }
        Ok(edges)
    }
}

/// Parameters of a model, as read from experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    Cyclic {
        n: usize,
    },
    Torus {
        d: usize,
        band: usize,
    },
    Su2 {
        l_max: f64,
        #[serde(default)]
        quad_order: Option<usize>,
    },
    HeisenbergSpectral {
        n: usize,
        grid: LambdaGrid,
        hermite_cutoff: usize,
    },
    EuclideanRadial {
        n: usize,
        grid: RadialGrid,
    },
}

impl ModelSpec {
    pub fn build(&self) -> Result<Arc<GroupModel>> {
        let model = match self {
            ModelSpec::Cyclic { n } => build_cyclic(*n)?,
            ModelSpec::Torus { d, band } => build_torus(*d, *band)?,
            ModelSpec::Su2 { l_max, quad_order } => {
                let tl = twice_spin(*l_max)?;
                build_su2(tl, quad_order.unwrap_or(2 * tl as usize + 1))?
            }
            ModelSpec::HeisenbergSpectral {
                n,
                grid,
                hermite_cutoff,
            } => build_heisenberg_spectral(*n, grid, *hermite_cutoff)?,
            ModelSpec::EuclideanRadial { n, grid } => build_euclidean_radial(*n, grid)?,
        };
        Ok(Arc::new(model))
    }

    /// Short human-readable label used in reports.
    pub fn label(&self) -> String {
        match self {
            ModelSpec::Cyclic { n } => format!("Z_{n}"),
            ModelSpec::Torus { d, band } => format!("T^{d}(band={band})"),
            ModelSpec::Su2 { l_max, .. } => format!("SU2(l_max={l_max})"),
            ModelSpec::HeisenbergSpectral { n, hermite_cutoff, .. } => {
                format!("H^{n}(K={hermite_cutoff})")
            }
            ModelSpec::EuclideanRadial { n, .. } => format!("R^{n}(radial)"),
        }
    }
}

/// Converts a half-integer spin into `2l`.
pub fn twice_spin(l: f64) -> Result<u32> {
    let t = 2.0 * l;
    if !(l >= 0.0) || (t - t.round()).abs() > 1e-12 || t > 4096.0 {
        return Err(invalid_param(format!("l = {l} is not a half-integer in [0, 2048]")));
    }
    Ok(t.round() as u32)
}

/// Which irreducible class a dual point stands for.
#[derive(Debug, Clone, PartialEq)]
pub enum DualLabel {
    /// Character `k` of `Z_N` (one entry, `0 <= k < N`) or of `T^d`.
    Character(Vec<i64>),
    /// Spin `l = twice_l / 2` of SU(2).
    Spin { twice_l: u32 },
    /// One λ-cell of the Heisenberg dual.
    LambdaCell { lambda: f64, width: f64 },
    /// Radial shell `inner <= |ξ| < outer`.
    Shell { inner: f64, outer: f64 },
}

/// One irreducible-representation class of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub index: usize,
    pub dim: usize,
    pub plancherel_weight: f64,
    /// Eigenvalue of `I - L` (or the model's analogue); the dual is sorted by it.
    pub spectral_tag: f64,
    /// Dominant-weight coordinates; empty for models without them.
    pub highest_weight: Vec<i64>,
    pub label: DualLabel,
}

impl DualPoint {
    fn order_key(&self) -> impl Ord + '_ {
        (
            OrdF64(self.spectral_tag),
            self.dim,
            LabelKey(&self.label),
        )
    }

    /// `<π> = (1 + λ_π)^{1/2}`, i.e. the square root of the tag.
    pub fn bracket(&self) -> f64 {
        self.spectral_tag.sqrt()
    }
}

#[derive(PartialEq)]
struct OrdF64(f64);
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0)
    }
}

#[derive(PartialEq)]
struct LabelKey<'a>(&'a DualLabel);
impl Eq for LabelKey<'_> {}
impl PartialOrd for LabelKey<'_> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for LabelKey<'_> {
    fn cmp(&self, o: &Self) -> Ordering {
        use DualLabel::*;
        match (self.0, o.0) {
            (Character(a), Character(b)) => a.cmp(b),
            (Spin { twice_l: a }, Spin { twice_l: b }) => a.cmp(b),
            (LambdaCell { lambda: a, .. }, LambdaCell { lambda: b, .. }) => a.total_cmp(b),
            (Shell { inner: a, .. }, Shell { inner: b, .. }) => a.total_cmp(b),
            _ => Ordering::Equal,
        }
    }
}

/// Product quadrature rule: the node set is the Cartesian product of the axes
/// (last axis fastest), node weight the product of axis weights.
#[derive(Debug, Clone)]
pub struct Quadrature {
    axes: Vec<Vec<(f64, f64)>>,
    len: usize,
}

impl Quadrature {
    fn new(axes: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        let mut len: usize = 1;
        for a in &axes {
            len = len
                .checked_mul(a.len())
                .filter(|&l| l <= MAX_DUAL_SIZE * 4)
                .ok_or_else(|| LabError::Capacity("quadrature too large".into()))?;
        }
        Ok(Quadrature { axes, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn axes(&self) -> &[Vec<(f64, f64)>] {
        &self.axes
    }

    /// Coordinates and weight of node `idx`.
    pub fn node(&self, mut idx: usize) -> (Vec<f64>, f64) {
        let mut coords = vec![0.0; self.axes.len()];
        let mut w = 1.0;
        for (a, axis) in self.axes.iter().enumerate().rev() {
            let (x, wx) = axis[idx % axis.len()];
            idx /= axis.len();
            coords[a] = x;
            w *= wx;
        }
        (coords, w)
    }

    pub fn weights(&self) -> Vec<f64> {
        let mut out = vec![1.0];
        for axis in &self.axes {
            out = out
                .iter()
                .flat_map(|&w| axis.iter().map(move |&(_, wx)| w * wx))
                .collect();
        }
        out
    }

    pub fn total_mass(&self) -> f64 {
        self.axes
            .iter()
            .map(|a| a.iter().map(|p| p.1).sum::<f64>())
            .product()
    }
}

/// Shared Hermite data for the Heisenberg model.
#[derive(Debug, Clone)]
pub struct HeisenbergData {
    pub n: usize,
    pub cutoff: usize,
    /// `prod_j (2 k_j + 1)` over `k in {0..K-1}^n`, sorted ascending.
    pub profile: Arc<[f64]>,
}

impl HeisenbergData {
    /// `s_{k,λ} = |λ| prod_j (2 k_j + 1)`.
    pub fn eigenvalue(lambda: f64, k: &[usize]) -> f64 {
        lambda.abs() * k.iter().map(|&kj| 2.0 * kj as f64 + 1.0).product::<f64>()
    }
}

/// A finitely truncated model of a unimodular group.
pub struct GroupModel {
    spec: ModelSpec,
    kind: ModelKind,
    dual: Vec<DualPoint>,
    quadrature: Option<Quadrature>,
    topo_dim: usize,
    homogeneous_dim: Option<f64>,
    rank: usize,
    rho: Vec<f64>,
    haar_mass: f64,
    ambient_trace: f64,
    heisenberg: Option<HeisenbergData>,
    su2_tables: OnceLock<su2::Tables>,
    fft: OnceLock<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
}

impl fmt::Debug for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupModel")
            .field("spec", &self.spec)
            .field("dual_len", &self.dual.len())
            .field("nodes", &self.quadrature.as_ref().map(|q| q.len()))
            .finish()
    }
}

impl GroupModel {
    fn new(spec: ModelSpec, kind: ModelKind, mut dual: Vec<DualPoint>) -> Self {
        dual.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
        for (i, d) in dual.iter_mut().enumerate() {
            d.index = i;
        }
        GroupModel {
            spec,
            kind,
            dual,
            quadrature: None,
            topo_dim: 0,
            homogeneous_dim: None,
            rank: 0,
            rho: Vec::new(),
            haar_mass: 1.0,
            ambient_trace: f64::INFINITY,
            heisenberg: None,
            su2_tables: OnceLock::new(),
            fft: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn label(&self) -> String {
        self.spec.label()
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dual(&self) -> &[DualPoint] {
        &self.dual
    }

    pub fn quadrature(&self) -> Option<&Quadrature> {
        self.quadrature.as_ref()
    }

    pub fn topo_dim(&self) -> usize {
        self.topo_dim
    }

    pub fn homogeneous_dim(&self) -> Option<f64> {
        self.homogeneous_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn haar_mass(&self) -> f64 {
        self.haar_mass
    }

    /// Trace of the identity of the group von Neumann algebra: `N` for
    /// `Z_N`, infinite for every other model.
    pub fn ambient_trace(&self) -> f64 {
        self.ambient_trace
    }

    pub fn heisenberg(&self) -> Option<&HeisenbergData> {
        self.heisenberg.as_ref()
    }

    /// `2 l_max` for SU(2) models.
    pub fn twice_l_max(&self) -> Option<u32> {
        match self.kind {
            ModelKind::Su2 => self.dual.last().map(|d| d.dim as u32 - 1),
            _ => None,
        }
    }

    pub(crate) fn su2_tables(&self) -> &su2::Tables {
        self.su2_tables.get_or_init(|| {
            let q = self.quadrature.as_ref().expect("su2 model has quadrature");
            let ax = q.axes();
            let coords = |a: &Vec<(f64, f64)>| a.iter().map(|p| p.0).collect::<Vec<_>>();
            su2::Tables::build(
                self.twice_l_max().unwrap_or(0),
                &coords(&ax[0]),
                &coords(&ax[1]),
                &coords(&ax[2]),
            )
        })
    }

    pub(crate) fn fft_pair(&self) -> &(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        self.fft.get_or_init(|| {
            let mut planner = rustfft::FftPlanner::new();
            let n = self.dual.len();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
    }

    pub fn has_rep_eval(&self) -> bool {
        self.kind.is_compact()
    }

    pub(crate) fn unsupported(&self, what: &str) -> LabError {
        LabError::UnsupportedModel {
            model: self.label(),
            what: what.to_string(),
        }
    }

    /// Evaluates the unitary matrix `π(x)` of dual point `dual_index` at a
    /// group point given in model coordinates (`[j]` for `Z_N`, angles for
    /// `T^d`, Euler angles for SU(2)).
    pub fn rep_eval(&self, dual_index: usize, point: &[f64]) -> Result<DMatrix<Complex64>> {
        let dp = self
            .dual
            .get(dual_index)
            .ok_or_else(|| invalid_param(format!("dual index {dual_index} out of range")))?;
        match (&dp.label, self.kind) {
            (DualLabel::Character(k), ModelKind::Cyclic) => {
                let n = self.dual.len() as f64;
                let phase = 2.0 * PI * ((k[0] as f64 * point[0]) % n) / n;
                Ok(DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phase)))
            }
            (DualLabel::Character(k), ModelKind::Torus) => {
                let phase: f64 = k.iter().zip(point).map(|(&ki, &x)| ki as f64 * x).sum();
                Ok(DMatrix::from_element(1, 1, Complex64::from_polar(1.0, phase)))
            }
            (DualLabel::Spin { twice_l }, ModelKind::Su2) => Ok(su2::wigner_matrix(
                *twice_l, point[0], point[1], point[2],
            )),
            _ => Err(self.unsupported("representation evaluation")),
        }
    }

    /// Position of a dual point in this model, checking that it is ours.
    pub fn locate(&self, dp: &DualPoint) -> Result<usize> {
        match self.dual.get(dp.index) {
            Some(own) if own == dp => Ok(dp.index),
            _ => Err(invalid_param(format!(
                "dual point {:?} does not belong to {}",
                dp.label,
                self.label()
            ))),
        }
    }
}

/// `Z_N` with uniform Haar measure; tag of character `k` is `1 + min(k, N-k)^2`.
pub fn build_cyclic(n: usize) -> Result<GroupModel> {
    if n == 0 {
        return Err(invalid_param("Z_N needs N >= 1"));
    }
    if n > MAX_DUAL_SIZE {
        return Err(LabError::Capacity(format!("Z_{n} exceeds {MAX_DUAL_SIZE}")));
    }
    let dual = (0..n)
        .map(|k| {
            let fold = k.min(n - k) as f64;
            DualPoint {
                index: 0,
                dim: 1,
                plancherel_weight: 1.0,
                spectral_tag: 1.0 + fold * fold,
                highest_weight: Vec::new(),
                label: DualLabel::Character(vec![k as i64]),
            }
        })
        .collect();
    let mut m = GroupModel::new(ModelSpec::Cyclic { n }, ModelKind::Cyclic, dual);
    let w = 1.0 / n as f64;
    m.quadrature = Some(Quadrature::new(vec![(0..n).map(|j| (j as f64, w)).collect()])?);
    m.topo_dim = 1;
    m.ambient_trace = n as f64;
    Ok(m)
}

/// `T^d` truncated to `||k||_inf <= band`, with a uniform grid of
/// `(2 band + 2)^d` nodes (exact for products of retained characters).
pub fn build_torus(d: usize, band: usize) -> Result<GroupModel> {
    if d == 0 || band == 0 {
        return Err(invalid_param("torus needs d >= 1 and band >= 1"));
    }
    let side = 2 * band + 1;
    let size = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(side));
    let nodes_side = 2 * band + 2;
    let nodes = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(nodes_side));
    match (size, nodes) {
        (Some(s), Some(q)) if s <= MAX_DUAL_SIZE && q <= MAX_DUAL_SIZE * 4 => {}
        _ => {
            return Err(LabError::Capacity(format!(
                "T^{d} with band {band} exceeds the dual-size cap {MAX_DUAL_SIZE}"
            )))
        }
    }
    let size = size.unwrap();
    let b = band as i64;
    let dual = (0..size)
        .map(|mut idx| {
            let mut k = vec![0i64; d];
            for slot in k.iter_mut().rev() {
                *slot = (idx % side) as i64 - b;
                idx /= side;
            }
            let norm2: i64 = k.iter().map(|x| x * x).sum();
            DualPoint {
                index: 0,
                dim: 1,
                plancherel_weight: 1.0,
                spectral_tag: 1.0 + norm2 as f64,
                highest_weight: k.clone(),
                label: DualLabel::Character(k),
            }
        })
        .collect();
    let mut m = GroupModel::new(ModelSpec::Torus { d, band }, ModelKind::Torus, dual);
    let w = 1.0 / nodes_side as f64;
    let axis: Vec<(f64, f64)> = (0..nodes_side)
        .map(|j| (2.0 * PI * j as f64 / nodes_side as f64, w))
        .collect();
    m.quadrature = Some(Quadrature::new(vec![axis; d])?);
    m.topo_dim = d;
    m.homogeneous_dim = Some(d as f64);
    m.rank = d;
    m.rho = vec![1.0; d];
    Ok(m)
}

/// SU(2) with spins `l <= l_max` (`twice_l_max = 2 l_max`) and a product
/// rule of `quad_order` nodes per Euler angle: uniform in `alpha` and
/// `gamma`, Gauss-Legendre in `cos beta`.
pub fn build_su2(twice_l_max: u32, quad_order: usize) -> Result<GroupModel> {
    let needed = 2 * twice_l_max as usize + 1;
    if quad_order < needed {
        return Err(LabError::UnderResolvedQuadrature {
            order: quad_order,
            band: format!("l_max = {}", twice_l_max as f64 / 2.0),
        });
    }
    let dual = (0..=twice_l_max)
        .map(|tl| {
            let l = tl as f64 / 2.0;
            DualPoint {
                index: 0,
                dim: tl as usize + 1,
                plancherel_weight: (tl + 1) as f64,
                spectral_tag: 1.0 + l * (l + 1.0),
                highest_weight: vec![tl as i64],
                label: DualLabel::Spin { twice_l: tl },
            }
        })
        .collect();
    let spec = ModelSpec::Su2 {
        l_max: twice_l_max as f64 / 2.0,
        quad_order: Some(quad_order),
    };
    let mut m = GroupModel::new(spec, ModelKind::Su2, dual);
    let q = quad_order;
    let alpha: Vec<(f64, f64)> = (0..q)
        .map(|j| (2.0 * PI * j as f64 / q as f64, 1.0 / q as f64))
        .collect();
    let gamma: Vec<(f64, f64)> = (0..q)
        .map(|j| (4.0 * PI * j as f64 / q as f64, 1.0 / q as f64))
        .collect();
    let beta: Vec<(f64, f64)> = gauss_legendre(q)
        .into_iter()
        .map(|(x, w)| (x.clamp(-1.0, 1.0).acos(), w / 2.0))
        .collect();
    m.quadrature = Some(Quadrature::new(vec![alpha, beta, gamma])?);
    m.topo_dim = 3;
    // sub-Riemannian reading: two generating fields, one bracket step
    m.homogeneous_dim = Some(4.0);
    m.rank = 1;
    m.rho = vec![1.0];
    Ok(m)
}

/// Dual-only Heisenberg model `H^n`: one dual point per λ-cell carrying
/// Plancherel weight `|λ|^n Δλ` and the Hermite eigenvalues
/// `|λ| prod_j (2 k_j + 1)`, `k in {0..K-1}^n`.
pub fn build_heisenberg_spectral(n: usize, grid: &LambdaGrid, cutoff: usize) -> Result<GroupModel> {
    if n == 0 || cutoff == 0 {
        return Err(invalid_param("Heisenberg model needs n >= 1 and K >= 1"));
    }
    let block = (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(cutoff))
        .filter(|&b| b <= MAX_DUAL_SIZE)
        .ok_or_else(|| LabError::Capacity(format!("K^n = {cutoff}^{n} too large")))?;
    let cells = grid.cells(n)?;
    let mut profile: Vec<f64> = (0..block)
        .map(|mut idx| {
            let mut p = 1.0;
            for _ in 0..n {
                p *= 2.0 * (idx % cutoff) as f64 + 1.0;
                idx /= cutoff;
            }
            p
        })
        .collect();
    profile.sort_by(f64::total_cmp);
    let dual = cells
        .iter()
        .map(|&(lambda, width)| DualPoint {
            index: 0,
            dim: block,
            plancherel_weight: lambda.abs().powi(n as i32) * width,
            spectral_tag: lambda.abs(),
            highest_weight: Vec::new(),
            label: DualLabel::LambdaCell { lambda, width },
        })
        .collect();
    let spec = ModelSpec::HeisenbergSpectral {
        n,
        grid: grid.clone(),
        hermite_cutoff: cutoff,
    };
    let mut m = GroupModel::new(spec, ModelKind::HeisenbergSpectral, dual);
    m.topo_dim = 2 * n + 1;
    m.homogeneous_dim = Some(2.0 * n as f64 + 2.0);
    m.heisenberg = Some(HeisenbergData {
        n,
        cutoff,
        profile: profile.into(),
    });
    Ok(m)
}

/// Abelian rearrangement model of `R^n`: radial shells weighted by their
/// Lebesgue volume.
pub fn build_euclidean_radial(n: usize, grid: &RadialGrid) -> Result<GroupModel> {
    if n == 0 {
        return Err(invalid_param("R^n needs n >= 1"));
    }
    let edges = grid.edges()?;
    let omega = unit_ball_volume(n);
    let dual = edges
        .windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            DualPoint {
                index: 0,
                dim: 1,
                plancherel_weight: omega * (w[1].powi(n as i32) - w[0].powi(n as i32)),
                spectral_tag: 1.0 + mid * mid,
                highest_weight: Vec::new(),
                label: DualLabel::Shell {
                    inner: w[0],
                    outer: w[1],
                },
            }
        })
        .collect();
    let spec = ModelSpec::EuclideanRadial {
        n,
        grid: grid.clone(),
    };
    let mut m = GroupModel::new(spec, ModelKind::EuclideanRadial, dual);
    m.topo_dim = n;
    m.homogeneous_dim = Some(n as f64);
    m.rank = n;
    Ok(m)
}

/// Polyhedron `Q_N = {ξ : ξ_i <= N ρ_i}` in dominant-weight coordinates.
///
/// SU(2) uses `ξ = 2l` with `ρ = 1`; the torus uses the box `|k_i| <= N`
/// (ρ_i := 1 by convention). Errors if `Q_N` leaves the model's band.
pub fn enumerate_polyhedron(model: &GroupModel, n: usize) -> Result<Vec<DualPoint>> {
    match model.kind() {
        ModelKind::Su2 => {
            let tl_max = model.twice_l_max().unwrap_or(0) as usize;
            let bound = n as f64 * model.rho()[0];
            if bound > tl_max as f64 {
                return Err(LabError::Capacity(format!(
                    "Q_{n} exceeds the band 2l <= {tl_max}"
                )));
            }
            Ok(model
                .dual()
                .iter()
                .filter(|d| d.highest_weight[0] as f64 <= bound)
                .cloned()
                .collect())
        }
        ModelKind::Torus => {
            let band = match model.spec() {
                ModelSpec::Torus { band, .. } => *band,
                _ => unreachable!(),
            };
            if n > band {
                return Err(LabError::Capacity(format!("Q_{n} exceeds torus band {band}")));
            }
            Ok(model
                .dual()
                .iter()
                .filter(|d| {
                    d.highest_weight
                        .iter()
                        .zip(model.rho())
                        .all(|(&k, &r)| (k.unsigned_abs() as f64) <= n as f64 * r)
                })
                .cloned()
                .collect())
        }
        _ => Err(model.unsupported("polyhedral enumeration (no highest-weight data)")),
    }
}

/// Root-datum number governing the polyhedral summability range
/// `2 - 1/(s+1) < p < 2 + 1/s`; SU(2) has a single positive root, so `s = 1`.
pub fn polyhedral_index(model: &GroupModel) -> Option<usize> {
    match model.kind() {
        ModelKind::Su2 => Some(1),
        _ => None,
    }
}

/// Eigenvalues of `-L`, one entry per dual point (per `(λ, k)` cell for the
/// Heisenberg model), sorted ascending.
///
/// Compact models report `tag - 1` with multiplicity `d_π^2`; the Heisenberg
/// model reports `s_{k,λ}` with its cell weight; radial shells report
/// `|ξ|^2` at the shell midpoint with the shell volume.
pub fn laplacian_spectrum(model: &GroupModel) -> Vec<(f64, f64)> {
    let mut raw: Vec<(f64, f64)> = Vec::new();
    if let Some(h) = model.heisenberg() {
        for dp in model.dual() {
            for &p in h.profile.iter() {
                raw.push((dp.spectral_tag * p, dp.plancherel_weight));
            }
        }
    } else {
        for dp in model.dual() {
            raw.push((
                dp.spectral_tag - 1.0,
                dp.plancherel_weight * dp.dim as f64,
            ));
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    raw
}

/// Adds up the multiplicities of equal eigenvalues in a sorted spectrum.
pub fn merge_multiplicities(sorted: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &(e, m) in sorted {
        match out.last_mut() {
            Some(last) if last.0 == e => last.1 += m,
            _ => out.push((e, m)),
        }
    }
    out
}
