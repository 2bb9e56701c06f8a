//! Forward/inverse Fourier transforms on compact models, `L^p` norms under
//! the model quadrature, Plancherel defects and polyhedral partial sums.
//!
//! `Z_N` goes through an FFT and SU(2) through a separable Euler-angle
//! transform; both agree with the dense quadrature path
//! ([`forward_transform_dense`]) to rounding.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid_input, invalid_param, Result};
use crate::group_models::{DualPoint, GroupModel, ModelKind};
use crate::numerics::{ksum, KahanSum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Complex samples of a function at the quadrature nodes of a compact model.
#[derive(Debug, Clone)]
pub struct GroupFunction {
    model: Arc<GroupModel>,
    values: Vec<Complex64>,
}

impl GroupFunction {
    pub fn new(model: Arc<GroupModel>, values: Vec<Complex64>) -> Result<Self> {
        let nodes = model
            .quadrature()
            .ok_or_else(|| model.unsupported("group functions (no quadrature)"))?
            .len();
        if values.len() != nodes {
            return Err(invalid_input(format!(
                "{} samples for {nodes} quadrature nodes",
                values.len()
            )));
        }
        Ok(GroupFunction { model, values })
    }

    /// Samples `f` at every quadrature node.
    pub fn from_fn(model: Arc<GroupModel>, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let q = model
            .quadrature()
            .ok_or_else(|| model.unsupported("group functions (no quadrature)"))?;
        let values = (0..q.len()).map(|i| f(&q.node(i).0)).collect();
        Self::new(model, values)
    }

    pub fn constant(model: Arc<GroupModel>, c: Complex64) -> Result<Self> {
        Self::from_fn(model, |_| c)
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == ZERO)
    }

    pub fn scale(&self, c: Complex64) -> GroupFunction {
        GroupFunction {
            model: self.model.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &GroupFunction) -> GroupFunction {
        GroupFunction {
            model: self.model.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Largest pointwise difference.
    pub fn sup_distance(&self, other: &GroupFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// CSV dump: `node, x_0.., weight, re, im`.
    pub fn to_csv(&self) -> String {
        let q = self.model.quadrature().expect("checked at construction");
        let dims = q.axes().len();
        let mut out = String::from("node");
        for a in 0..dims {
            let _ = write!(out, ",x{a}");
        }
        out.push_str(",weight,re,im\n");
        for (i, v) in self.values.iter().enumerate() {
            let (x, w) = q.node(i);
            let _ = write!(out, "{i}");
            for c in x {
                let _ = write!(out, ",{c:.16e}");
            }
            let _ = writeln!(out, ",{w:.16e},{:.16e},{:.16e}", v.re, v.im);
        }
        out
    }
}

/// One block of a symbol field.
#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Dense(DMatrix<Complex64>),
    /// Real diagonal (spectral models, or diagonal symbols on compact ones).
    Diagonal(Vec<f64>),
}

impl Block {
    pub fn dim(&self) -> usize {
        match self {
            Block::Dense(m) => m.nrows(),
            Block::Diagonal(d) => d.len(),
        }
    }

    /// Singular values in descending order (ties keep their original order).
    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv = match self {
            Block::Dense(m) if m.nrows() == 1 => vec![m[(0, 0)].norm()],
            Block::Dense(m) if m.nrows() == 0 => Vec::new(),
            Block::Dense(m) => m.clone().svd(false, false).singular_values.as_slice().to_vec(),
            Block::Diagonal(d) => d.iter().map(|x| x.abs()).collect(),
        };
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    pub fn op_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn hs_norm_sq(&self) -> f64 {
        match self {
            Block::Dense(m) => m.iter().map(|z| z.norm_sqr()).sum(),
            Block::Diagonal(d) => d.iter().map(|x| x * x).sum(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        match self {
            Block::Dense(m) => m.clone(),
            Block::Diagonal(d) => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    d.len(),
                    d.iter().map(|&x| Complex64::from(x)),
                ))
            }
        }
    }

    pub fn adjoint(&self) -> Block {
        match self {
            Block::Dense(m) => Block::Dense(m.adjoint()),
            Block::Diagonal(d) => Block::Diagonal(d.clone()),
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Block) -> Block {
        match (self, rhs) {
            (Block::Diagonal(a), Block::Diagonal(b)) => {
                Block::Diagonal(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (Block::Diagonal(a), Block::Dense(m)) => {
                let mut out = m.clone();
                for (i, &x) in a.iter().enumerate() {
                    out.row_mut(i).scale_mut(x);
                }
                Block::Dense(out)
            }
            (Block::Dense(m), Block::Diagonal(b)) => {
                let mut out = m.clone();
                for (j, &x) in b.iter().enumerate() {
                    out.column_mut(j).scale_mut(x);
                }
                Block::Dense(out)
            }
            (Block::Dense(a), Block::Dense(b)) => Block::Dense(a * b),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Block::Dense(m) => m.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            Block::Diagonal(d) => d.iter().all(|x| x.is_finite()),
        }
    }

    /// Numerical rank: singular values above `rel_tol * scale`.
    pub fn rank(&self, abs_tol: f64) -> usize {
        self.singular_values().iter().filter(|&&s| s > abs_tol).count()
    }
}

/// Fourier-side field of blocks, one per dual point of a model.
#[derive(Debug, Clone)]
pub struct SymbolField {
    model: Arc<GroupModel>,
    blocks: Vec<Block>,
}

impl SymbolField {
    pub fn new(model: Arc<GroupModel>, blocks: Vec<Block>) -> Result<Self> {
        if blocks.len() != model.dual().len() {
            return Err(invalid_input(format!(
                "{} blocks for {} dual points",
                blocks.len(),
                model.dual().len()
            )));
        }
        for (b, dp) in blocks.iter().zip(model.dual()) {
            let shape_ok = match b {
                Block::Dense(m) => m.nrows() == dp.dim && m.ncols() == dp.dim,
                Block::Diagonal(d) => d.len() == dp.dim,
            };
            if !shape_ok {
                return Err(invalid_input(format!(
                    "block shape does not match d = {} at dual point {}",
                    dp.dim, dp.index
                )));
            }
            if !b.is_finite() {
                return Err(invalid_input(format!(
                    "non-finite symbol entry at dual point {}",
                    dp.index
                )));
            }
        }
        Ok(SymbolField { model, blocks })
    }

    pub fn zeros(model: Arc<GroupModel>) -> Self {
        let blocks = model
            .dual()
            .iter()
            .map(|dp| {
                if model.kind().is_compact() {
                    Block::Dense(DMatrix::zeros(dp.dim, dp.dim))
                } else {
                    Block::Diagonal(vec![0.0; dp.dim])
                }
            })
            .collect();
        SymbolField { model, blocks }
    }

    /// Scalar multiple of the identity on every block.
    pub fn scalar(model: Arc<GroupModel>, f: impl Fn(&DualPoint) -> Complex64) -> Result<Self> {
        let blocks = model
            .dual()
            .iter()
            .map(|dp| {
                let c = f(dp);
                if model.kind().is_compact() {
                    Block::Dense(DMatrix::identity(dp.dim, dp.dim) * c)
                } else {
                    Block::Diagonal(vec![c.re; dp.dim])
                }
            })
            .collect();
        Self::new(model, blocks)
    }

    pub fn identity(model: Arc<GroupModel>) -> Self {
        Self::scalar(model, |_| Complex64::from(1.0)).expect("identity is finite")
    }

    /// Real diagonal blocks given per dual point.
    pub fn diagonal(model: Arc<GroupModel>, f: impl Fn(&DualPoint) -> Vec<f64>) -> Result<Self> {
        let blocks = model.dual().iter().map(|dp| Block::Diagonal(f(dp))).collect();
        Self::new(model, blocks)
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn into_blocks(self) -> Vec<Block> {
        self.blocks
    }

    pub fn adjoint(&self) -> SymbolField {
        SymbolField {
            model: self.model.clone(),
            blocks: self.blocks.iter().map(Block::adjoint).collect(),
        }
    }

    /// Blockwise product `self(π) * rhs(π)`.
    pub fn compose(&self, rhs: &SymbolField) -> Result<SymbolField> {
        if !Arc::ptr_eq(&self.model, &rhs.model) && self.model.spec() != rhs.model.spec() {
            return Err(invalid_input("symbol fields live on different models"));
        }
        SymbolField::new(
            self.model.clone(),
            self.blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a.mul(b))
                .collect(),
        )
    }

    /// `sum_π d_π ||σ(π)||_HS^2` with the model's Plancherel weights.
    pub fn plancherel_norm_sq(&self) -> f64 {
        ksum(
            self.blocks
                .iter()
                .zip(self.model.dual())
                .map(|(b, dp)| dp.plancherel_weight * b.hs_norm_sq()),
        )
    }

    /// Largest entrywise difference to another field on the same model.
    pub fn max_abs_diff(&self, other: &SymbolField) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a.to_dense() - b.to_dense()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// CSV dump: `dual_index, dim, tag, row, col, re, im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dual_index,dim,tag,row,col,re,im\n");
        for (b, dp) in self.blocks.iter().zip(self.model.dual()) {
            let m = b.to_dense();
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let z = m[(i, j)];
                    let _ = writeln!(
                        out,
                        "{},{},{:.16e},{i},{j},{:.16e},{:.16e}",
                        dp.index, dp.dim, dp.spectral_tag, z.re, z.im
                    );
                }
            }
        }
        out
    }
}

fn require_quadrature(model: &GroupModel) -> Result<()> {
    if model.quadrature().is_none() || !model.has_rep_eval() {
        return Err(model.unsupported("Fourier transform on a dual-only model"));
    }
    Ok(())
}

/// `f^(π) = sum_x w_x f(x) π(x)^*`.
pub fn forward_transform(f: &GroupFunction) -> Result<SymbolField> {
    let model = f.model();
    require_quadrature(model)?;
    match model.kind() {
        ModelKind::Cyclic => Ok(cyclic_forward(f)),
        ModelKind::Su2 => Ok(su2_forward(f)),
        _ => forward_transform_dense(f),
    }
}

/// `f(x) = sum_π d_π Tr(σ(π) π(x))`.
pub fn inverse_transform(sigma: &SymbolField) -> Result<GroupFunction> {
    let model = sigma.model();
    require_quadrature(model)?;
    match model.kind() {
        ModelKind::Cyclic => Ok(cyclic_inverse(sigma)),
        ModelKind::Su2 => Ok(su2_inverse(sigma)),
        _ => inverse_transform_dense(sigma),
    }
}

/// Node-by-node quadrature transform through `rep_eval`.
pub fn forward_transform_dense(f: &GroupFunction) -> Result<SymbolField> {
    let model = f.model();
    require_quadrature(model)?;
    let q = model.quadrature().expect("checked");
    let mut blocks: Vec<DMatrix<Complex64>> = model
        .dual()
        .iter()
        .map(|dp| DMatrix::zeros(dp.dim, dp.dim))
        .collect();
    for (i, &v) in f.values().iter().enumerate() {
        if v == ZERO {
            continue;
        }
        let (x, w) = q.node(i);
        for (k, blk) in blocks.iter_mut().enumerate() {
            let p = model.rep_eval(k, &x)?;
            *blk += p.adjoint() * (v * w);
        }
    }
    SymbolField::new(model.clone(), blocks.into_iter().map(Block::Dense).collect())
}

/// Node-by-node inverse transform through `rep_eval`.
pub fn inverse_transform_dense(sigma: &SymbolField) -> Result<GroupFunction> {
    let model = sigma.model();
    require_quadrature(model)?;
    let q = model.quadrature().expect("checked");
    let dense: Vec<DMatrix<Complex64>> = sigma.blocks().iter().map(Block::to_dense).collect();
    let mut values = Vec::with_capacity(q.len());
    for i in 0..q.len() {
        let (x, _) = q.node(i);
        let mut acc = ZERO;
        for (k, (s, dp)) in dense.iter().zip(model.dual()).enumerate() {
            let p = model.rep_eval(k, &x)?;
            acc += (s * p).trace() * dp.dim as f64;
        }
        values.push(acc);
    }
    GroupFunction::new(model.clone(), values)
}

fn character_slot(dp: &DualPoint) -> usize {
    match &dp.label {
        crate::group_models::DualLabel::Character(k) => k[0] as usize,
        _ => unreachable!("cyclic dual points are characters"),
    }
}

fn cyclic_forward(f: &GroupFunction) -> SymbolField {
    let model = f.model();
    let n = model.dual().len();
    let mut buf = f.values().to_vec();
    model.fft_pair().0.process(&mut buf);
    let scale = 1.0 / n as f64;
    let blocks = model
        .dual()
        .iter()
        .map(|dp| Block::Dense(DMatrix::from_element(1, 1, buf[character_slot(dp)] * scale)))
        .collect();
    SymbolField {
        model: model.clone(),
        blocks,
    }
}

fn cyclic_inverse(sigma: &SymbolField) -> GroupFunction {
    let model = sigma.model();
    let n = model.dual().len();
    let mut buf = vec![ZERO; n];
    for (b, dp) in sigma.blocks().iter().zip(model.dual()) {
        buf[character_slot(dp)] = match b {
            Block::Dense(m) => m[(0, 0)],
            Block::Diagonal(d) => Complex64::from(d[0]),
        };
    }
    model.fft_pair().1.process(&mut buf);
    GroupFunction {
        model: model.clone(),
        values: buf,
    }
}

fn su2_forward(f: &GroupFunction) -> SymbolField {
    let model = f.model();
    let tl_max = model.twice_l_max().unwrap_or(0) as usize;
    let nf = 2 * tl_max + 1;
    let q = model.quadrature().expect("su2 has quadrature");
    let ax = q.axes();
    let (na, nb, ng) = (ax[0].len(), ax[1].len(), ax[2].len());
    let t = model.su2_tables();
    let vals = f.values();

    // H[ia][ib][kb] = sum_ig w_g f e^{i b gamma}
    let mut h = vec![ZERO; na * nb * nf];
    for ia in 0..na {
        for ib in 0..nb {
            let row = &vals[(ia * nb + ib) * ng..(ia * nb + ib + 1) * ng];
            let out = &mut h[(ia * nb + ib) * nf..(ia * nb + ib + 1) * nf];
            for (ig, &v) in row.iter().enumerate() {
                if v == ZERO {
                    continue;
                }
                let vw = v * ax[2][ig].1;
                for (o, e) in out.iter_mut().zip(&t.egamma[ig]) {
                    *o += vw * e;
                }
            }
        }
    }
    // G[ib][ka][kb] = sum_ia w_a e^{i a alpha} H[ia][ib][kb]
    let mut g = vec![ZERO; nb * nf * nf];
    for ib in 0..nb {
        for ia in 0..na {
            let hrow = &h[(ia * nb + ib) * nf..(ia * nb + ib + 1) * nf];
            let wa = ax[0][ia].1;
            for ka in 0..nf {
                let ea = t.ealpha[ia][ka] * wa;
                let out = &mut g[(ib * nf + ka) * nf..(ib * nf + ka + 1) * nf];
                for (o, hv) in out.iter_mut().zip(hrow) {
                    *o += ea * hv;
                }
            }
        }
    }
    let blocks = model
        .dual()
        .iter()
        .map(|dp| {
            let tl = dp.dim - 1;
            let d = dp.dim;
            // m_i = l - i  ->  slot 2 m_i + tl_max = tl - 2i + tl_max
            let slot = |i: usize| tl + tl_max - 2 * i;
            let mut m = DMatrix::zeros(d, d);
            for ib in 0..nb {
                let wb = ax[1][ib].1;
                let dl = &t.dtab[ib][tl];
                for i in 0..d {
                    for j in 0..d {
                        m[(i, j)] += g[(ib * nf + slot(j)) * nf + slot(i)] * (wb * dl[(j, i)]);
                    }
                }
            }
            Block::Dense(m)
        })
        .collect();
    SymbolField {
        model: model.clone(),
        blocks,
    }
}

fn su2_inverse(sigma: &SymbolField) -> GroupFunction {
    let model = sigma.model();
    let tl_max = model.twice_l_max().unwrap_or(0) as usize;
    let nf = 2 * tl_max + 1;
    let q = model.quadrature().expect("su2 has quadrature");
    let ax = q.axes();
    let (na, nb, ng) = (ax[0].len(), ax[1].len(), ax[2].len());
    let t = model.su2_tables();

    // K[ib][ka][kb] = sum_l d_l sigma_ij d^l_{m_j m_i}(beta)
    let mut k = vec![ZERO; nb * nf * nf];
    for (b, dp) in sigma.blocks().iter().zip(model.dual()) {
        let s = b.to_dense();
        let tl = dp.dim - 1;
        let d = dp.dim;
        let slot = |i: usize| tl + tl_max - 2 * i;
        for ib in 0..nb {
            let dl = &t.dtab[ib][tl];
            for i in 0..d {
                for j in 0..d {
                    let v = s[(i, j)];
                    if v == ZERO {
                        continue;
                    }
                    k[(ib * nf + slot(j)) * nf + slot(i)] += v * (d as f64 * dl[(j, i)]);
                }
            }
        }
    }
    // P[ia][ib][kb] = sum_ka conj(e^{i a alpha}) K[ib][ka][kb]
    let mut p = vec![ZERO; na * nb * nf];
    for ia in 0..na {
        for ib in 0..nb {
            let out = &mut p[(ia * nb + ib) * nf..(ia * nb + ib + 1) * nf];
            for ka in 0..nf {
                let krow = &k[(ib * nf + ka) * nf..(ib * nf + ka + 1) * nf];
                let ea = t.ealpha[ia][ka].conj();
                for (o, kv) in out.iter_mut().zip(krow) {
                    *o += ea * kv;
                }
            }
        }
    }
    let mut values = vec![ZERO; na * nb * ng];
    for ia in 0..na {
        for ib in 0..nb {
            let prow = &p[(ia * nb + ib) * nf..(ia * nb + ib + 1) * nf];
            for ig in 0..ng {
                let eg = &t.egamma[ig];
                values[(ia * nb + ib) * ng + ig] =
                    prow.iter().zip(eg).map(|(pv, e)| pv * e.conj()).sum();
            }
        }
    }
    GroupFunction {
        model: model.clone(),
        values,
    }
}

/// `(sum_x w_x |f(x)|^p)^{1/p}`, or the node maximum for `p = inf`.
pub fn lp_norm(f: &GroupFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(invalid_param(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(f.values().iter().map(|v| v.norm()).fold(0.0, f64::max));
    }
    let w = f.model().quadrature().expect("checked at construction").weights();
    let s: KahanSum = f
        .values()
        .iter()
        .zip(&w)
        .map(|(v, w)| {
            let a = v.norm();
            if p == 2.0 {
                w * a * a
            } else {
                w * a.powf(p)
            }
        })
        .collect();
    Ok(s.sum().powf(1.0 / p))
}

/// Relative gap between `||f||_2^2` and `sum_π d_π ||f^(π)||_HS^2`.
pub fn plancherel_defect(f: &GroupFunction) -> Result<f64> {
    let lhs = lp_norm(f, 2.0)?.powi(2);
    let rhs = forward_transform(f)?.plancherel_norm_sq();
    Ok((lhs - rhs).abs() / lhs.max(1e-300))
}

/// `S_Q f = sum_{π in Q} d_π Tr(f^(π) π(x))`.
pub fn partial_sum(f: &GroupFunction, q: &[DualPoint]) -> Result<GroupFunction> {
    let model = f.model();
    let mut keep = vec![false; model.dual().len()];
    for dp in q {
        keep[model.locate(dp)?] = true;
    }
    let fh = forward_transform(f)?;
    let blocks = fh
        .into_blocks()
        .into_iter()
        .zip(model.dual())
        .zip(keep)
        .map(|((b, dp), k)| {
            if k {
                b
            } else {
                Block::Dense(DMatrix::zeros(dp.dim, dp.dim))
            }
        })
        .collect();
    inverse_transform(&SymbolField::new(model.clone(), blocks)?)
}
