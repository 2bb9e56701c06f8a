//! Wigner small-d matrices for SU(2) and the product quadrature in Euler
//! angles `(alpha, beta, gamma)`, `alpha in [0, 2pi)`, `gamma in [0, 4pi)`.
//!
//! `d^l(beta)` is built by coupling `d^{l-1/2}` with the spin-1/2 block:
//! every step is a short positive combination of the previous level, so the
//! recursion stays stable for large `l` (no factorial sums).

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Real `(2l+1) x (2l+1)` matrix, row/column `i` ↔ `m = l - i`.
pub type SmallD = DMatrix<f64>;

/// All `d^l(beta)` for `2l = 0, 1, ..., twice_l_max`.
pub fn wigner_d_ladder(twice_l_max: u32, beta: f64) -> Vec<SmallD> {
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let half = [[c, -s], [s, c]];
    let mut out: Vec<SmallD> = Vec::with_capacity(twice_l_max as usize + 1);
    out.push(DMatrix::from_element(1, 1, 1.0));
    for tj in 1..=twice_l_max as usize {
        let prev = &out[tj - 1];
        let dim = tj + 1;
        let j = tj as f64 / 2.0;
        // coupling coefficient <j-1/2, m-a; 1/2, a | j, m>, a = +1/2 (k=0) or -1/2 (k=1)
        let cg = |i: usize, k: usize| -> f64 {
            let m = j - i as f64;
            if k == 0 {
                ((j + m) / (2.0 * j)).sqrt()
            } else {
                ((j - m) / (2.0 * j)).sqrt()
            }
        };
        let mut next = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for ip in 0..dim {
                let mut acc = 0.0;
                for (ka, da) in [(0usize, 0isize), (1, -1)] {
                    let i1 = i as isize + da;
                    if i1 < 0 || i1 >= tj as isize {
                        continue;
                    }
                    let ca = cg(i, ka);
                    if ca == 0.0 {
                        continue;
                    }
                    for (kb, db) in [(0usize, 0isize), (1, -1)] {
                        let i1p = ip as isize + db;
                        if i1p < 0 || i1p >= tj as isize {
                            continue;
                        }
                        let cb = cg(ip, kb);
                        acc += ca * cb * prev[(i1 as usize, i1p as usize)] * half[ka][kb];
                    }
                }
                next[(i, ip)] = acc;
            }
        }
        out.push(next);
    }
    out
}

/// `d^l(beta)` for a single `l`.
pub fn wigner_d(twice_l: u32, beta: f64) -> SmallD {
    wigner_d_ladder(twice_l, beta).pop().expect("ladder is non-empty")
}

/// Full representation matrix `D^l(alpha, beta, gamma)`,
/// `D_{m m'} = e^{-i m alpha} d_{m m'}(beta) e^{-i m' gamma}`.
pub fn wigner_matrix(twice_l: u32, alpha: f64, beta: f64, gamma: f64) -> DMatrix<Complex64> {
    let d = wigner_d(twice_l, beta);
    let l = twice_l as f64 / 2.0;
    let dim = twice_l as usize + 1;
    DMatrix::from_fn(dim, dim, |i, ip| {
        let m = l - i as f64;
        let mp = l - ip as f64;
        Complex64::from_polar(d[(i, ip)], -(m * alpha + mp * gamma))
    })
}

/// Precomputed tables for the separable transform.
#[derive(Debug)]
pub struct Tables {
    /// `dtab[ib][tl]` = `d^{tl/2}(beta_ib)`
    pub dtab: Vec<Vec<SmallD>>,
    /// `ealpha[ia][k]` = `e^{i a alpha_ia}` with `2a = k - 2 l_max`
    pub ealpha: Vec<Vec<Complex64>>,
    /// `egamma[ig][k]` = `e^{i b gamma_ig}` with `2b = k - 2 l_max`
    pub egamma: Vec<Vec<Complex64>>,
}

impl Tables {
    pub fn build(twice_l_max: u32, alphas: &[f64], betas: &[f64], gammas: &[f64]) -> Self {
        let freqs = 2 * twice_l_max as usize + 1;
        let phase = |x: f64| -> Vec<Complex64> {
            (0..freqs)
                .map(|k| {
                    let a = (k as f64 - twice_l_max as f64) / 2.0;
                    Complex64::from_polar(1.0, a * x)
                })
                .collect()
        };
        Tables {
            dtab: betas
                .iter()
                .map(|&b| wigner_d_ladder(twice_l_max, b))
                .collect(),
            ealpha: alphas.iter().map(|&a| phase(a)).collect(),
            egamma: gammas.iter().map(|&g| phase(g)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_one_closed_form() {
        let beta: f64 = 0.7;
        let d = wigner_d(2, beta);
        let (c, s) = (beta.cos(), beta.sin());
        let expect = [
            [(1.0 + c) / 2.0, -s / 2f64.sqrt(), (1.0 - c) / 2.0],
            [s / 2f64.sqrt(), c, -s / 2f64.sqrt()],
            [(1.0 - c) / 2.0, s / 2f64.sqrt(), (1.0 + c) / 2.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((d[(i, j)] - expect[i][j]).abs() < 1e-15, "{i}{j}");
            }
        }
    }

    #[test]
    fn small_d_is_orthogonal_at_high_spin() {
        for tl in [1u32, 7, 40, 121] {
            let d = wigner_d(tl, 2.3);
            let err = (&d * d.transpose() - DMatrix::identity(d.nrows(), d.nrows())).amax();
            assert!(err < 1e-12, "2l={tl}: {err}");
        }
    }

    #[test]
    fn spin_half_is_the_defining_matrix() {
        let (a, b, g) = (0.3, 1.1, 2.5);
        let m = wigner_matrix(1, a, b, g);
        let i = Complex64::i();
        let rz = |t: f64| {
            DMatrix::from_row_slice(2, 2, &[(-i * t / 2.0).exp(), 0.0.into(), 0.0.into(), (i * t / 2.0).exp()])
        };
        let ry = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::from((b / 2.0).cos()),
                Complex64::from(-(b / 2.0).sin()),
                Complex64::from((b / 2.0).sin()),
                Complex64::from((b / 2.0).cos()),
            ],
        );
        let g_mat = rz(a) * ry * rz(g);
        assert!((m - g_mat).camax() < 1e-15);
    }
}
