//! Trial functions and lower-bound probes for `||A||_{L^p -> L^q}`.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{multiply_coefficients, MultiplierSpec};
use crate::error::{invalid_param, Result};
use crate::fourier::{inverse_transform, lp_norm, Block, GroupFunction, SymbolField};
use crate::group_models::GroupModel;
use crate::numerics::ksum;

/// Families of trial functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialStrategy {
    /// Standard complex Gaussian coefficients on a random subset of the dual.
    RandomBand,
    /// Power iteration on `A*A` (only for `p = q = 2`).
    Power2,
    /// `f^(π) = e^{-t λ_π} I` with log-uniform `t`.
    HeatFamily,
    /// `f^(π) = I` on the first `J` dual points, `J` log-uniform.
    Dirichlet,
    /// One of random band, Dirichlet and heat, chosen per trial.
    Mixed,
}

/// Independent stream for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Fourier coefficients of one trial function.
pub fn trial_coefficients(
    model: &Arc<GroupModel>,
    strategy: TrialStrategy,
    rng: &mut ChaCha8Rng,
) -> Result<SymbolField> {
    if !model.kind().is_compact() {
        return Err(model.unsupported("trial functions"));
    }
    let dual = model.dual();
    let len = dual.len();
    let strategy = match strategy {
        TrialStrategy::Mixed => match rng.random_range(0..3) {
            0 => TrialStrategy::RandomBand,
            1 => TrialStrategy::Dirichlet,
            _ => TrialStrategy::HeatFamily,
        },
        TrialStrategy::Power2 => TrialStrategy::RandomBand,
        s => s,
    };
    let blocks: Vec<Block> = match strategy {
        TrialStrategy::RandomBand => {
            let keep_p: f64 = 1.0 - rng.random::<f64>();
            let mut keep: Vec<bool> = (0..len).map(|_| rng.random::<f64>() < keep_p).collect();
            if !keep.iter().any(|&k| k) {
                keep[rng.random_range(0..len)] = true;
            }
            dual.iter()
                .zip(keep)
                .map(|(dp, k)| {
                    Block::Dense(if k {
                        DMatrix::from_fn(dp.dim, dp.dim, |_, _| gaussian(rng))
                    } else {
                        DMatrix::zeros(dp.dim, dp.dim)
                    })
                })
                .collect()
        }
        TrialStrategy::Dirichlet => {
            let u: f64 = rng.random();
            let j = ((len as f64).powf(u).floor() as usize).clamp(1, len);
            dual.iter()
                .enumerate()
                .map(|(i, dp)| {
                    let c = if i < j { 1.0 } else { 0.0 };
                    Block::Dense(DMatrix::identity(dp.dim, dp.dim) * Complex64::from(c))
                })
                .collect()
        }
        _ => {
            let top = dual.iter().map(|d| d.spectral_tag - 1.0).fold(1.0, f64::max);
            let (lo, hi) = ((0.1 / top).ln(), 10f64.ln());
            let t = (lo + (hi - lo) * rng.random::<f64>()).exp();
            dual.iter()
                .map(|dp| {
                    let c = (-t * (dp.spectral_tag - 1.0)).exp();
                    Block::Dense(DMatrix::identity(dp.dim, dp.dim) * Complex64::from(c))
                })
                .collect()
        }
    };
    SymbolField::new(model.clone(), blocks)
}

/// Trial function number `trial` of a seeded family.
pub fn trial_function(
    model: &Arc<GroupModel>,
    strategy: TrialStrategy,
    seed: u64,
    trial: u64,
) -> Result<GroupFunction> {
    let fhat = trial_coefficients(model, strategy, &mut trial_rng(seed, trial))?;
    inverse_transform(&fhat)
}

/// Outcome of a norm probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpNormProbe {
    pub value: f64,
    /// Trial attaining the maximum (first one on ties).
    pub best_trial: Option<usize>,
    pub trials: usize,
    /// Power-iteration steps, when that strategy was used.
    pub iterations: Option<usize>,
}

/// `max_trials ||Af||_q / ||f||_p`, or power iteration for `Power2`.
///
/// Trials run on the current rayon pool; each trial draws from its own
/// stream, so the result does not depend on the number of workers.
pub fn empirical_opnorm(
    a: &MultiplierSpec,
    p: f64,
    q: f64,
    strategy: TrialStrategy,
    trials: usize,
    seed: u64,
) -> Result<OpNormProbe> {
    if strategy == TrialStrategy::Power2 {
        if p != 2.0 || q != 2.0 {
            return Err(invalid_param(format!("power iteration needs p = q = 2, got ({p}, {q})")));
        }
        let (value, iterations) = power_iteration(a, seed, 2_000_000, 1e-16)?;
        return Ok(OpNormProbe {
            value,
            best_trial: None,
            trials: 1,
            iterations: Some(iterations),
        });
    }
    if trials == 0 {
        return Err(invalid_param("at least one trial is required"));
    }
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| trial_ratio(a, p, q, strategy, seed, i as u64))
        .collect::<Result<_>>()?;
    Ok(best_of(&ratios, trials))
}

pub(crate) fn best_of(ratios: &[f64], trials: usize) -> OpNormProbe {
    let mut best = (0.0, None);
    for (i, &r) in ratios.iter().enumerate() {
        if best.1.is_none() || r > best.0 {
            best = (r, Some(i));
        }
    }
    OpNormProbe {
        value: best.0,
        best_trial: best.1,
        trials,
        iterations: None,
    }
}

fn trial_ratio(
    a: &MultiplierSpec,
    p: f64,
    q: f64,
    strategy: TrialStrategy,
    seed: u64,
    trial: u64,
) -> Result<f64> {
    let fhat = trial_coefficients(a.model(), strategy, &mut trial_rng(seed, trial))?;
    let f = inverse_transform(&fhat)?;
    let nf = lp_norm(&f, p)?;
    if nf == 0.0 {
        return Ok(0.0);
    }
    let af = inverse_transform(&multiply_coefficients(a, &fhat)?)?;
    Ok(lp_norm(&af, q)? / nf)
}

/// Power iteration for `sqrt(||A*A||)` on the Fourier side with the
/// Plancherel norm; stops when the Rayleigh estimate gains less than `tol`
/// relative. Returns the estimate and the number of steps.
pub fn power_iteration(a: &MultiplierSpec, seed: u64, max_iter: usize, tol: f64) -> Result<(f64, usize)> {
    let model = a.model();
    let sigma: Vec<DMatrix<Complex64>> = a.symbol().blocks().iter().map(Block::to_dense).collect();
    let weights: Vec<f64> = model.dual().iter().map(|d| d.plancherel_weight).collect();
    let mut rng = trial_rng(seed, u64::MAX);
    let mut x: Vec<DMatrix<Complex64>> = sigma
        .iter()
        .map(|s| DMatrix::from_fn(s.nrows(), s.nrows(), |_, _| gaussian(&mut rng)))
        .collect();
    let norm_sq = |v: &[DMatrix<Complex64>]| {
        ksum(v.iter().zip(&weights).map(|(m, w)| w * m.iter().map(|z| z.norm_sqr()).sum::<f64>()))
    };
    let nx = norm_sq(&x).sqrt();
    x.iter_mut().for_each(|m| *m /= Complex64::from(nx));
    let mut est = 0.0;
    let mut stalled = 0;
    for it in 1..=max_iter {
        let y: Vec<_> = sigma.iter().zip(&x).map(|(s, m)| s * m).collect();
        let new = norm_sq(&y).sqrt();
        if new == 0.0 {
            return Ok((0.0, it));
        }
        if new - est <= tol * new {
            stalled += 1;
            if stalled >= 3 {
                return Ok((new.max(est), it));
            }
        } else {
            stalled = 0;
        }
        est = est.max(new);
        x = sigma.iter().zip(&y).map(|(s, m)| s.adjoint() * m).collect();
        let nx = norm_sq(&x).sqrt();
        if nx == 0.0 {
            return Ok((est, it));
        }
        x.iter_mut().for_each(|m| *m /= Complex64::from(nx));
    }
    log::warn!("power iteration stopped at {max_iter} steps");
    Ok((est, max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_models::{build_cyclic, build_su2, DualLabel};

    fn diag_z3() -> MultiplierSpec {
        let m = Arc::new(build_cyclic(3).unwrap());
        let vals = [3.0, 1.0, 2.0];
        MultiplierSpec::new(
            "diag",
            SymbolField::scalar(m, |dp| {
                let DualLabel::Character(k) = &dp.label else { unreachable!() };
                Complex64::from(vals[k[0] as usize])
            })
            .unwrap(),
        )
    }

    #[test]
    fn power_iteration_finds_top_singular_value() {
        let a = diag_z3();
        let p = empirical_opnorm(&a, 2.0, 2.0, TrialStrategy::Power2, 1, 4).unwrap();
        assert!((p.value - 3.0).abs() < 1e-12);
        assert!(empirical_opnorm(&a, 1.5, 2.0, TrialStrategy::Power2, 1, 4).is_err());
        let r = empirical_opnorm(&a, 2.0, 2.0, TrialStrategy::RandomBand, 200, 4).unwrap();
        assert!(r.value <= p.value * (1.0 + 1e-12));
    }

    #[test]
    fn identity_symbol_norm_is_one() {
        for model in [Arc::new(build_cyclic(32).unwrap()), Arc::new(build_su2(3, 7).unwrap())] {
            let a = MultiplierSpec::identity(model);
            let r = empirical_opnorm(&a, 1.5, 1.5, TrialStrategy::Mixed, 60, 1).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12, "{}", r.value);
            // on a probability space ||f||_q >= ||f||_p, so p < q only bounds from below
            let r = empirical_opnorm(&a, 1.5, 3.0, TrialStrategy::Dirichlet, 60, 1).unwrap();
            assert!(r.value >= 1.0 - 1e-12);
        }
    }

    #[test]
    fn deterministic_across_pools() {
        let m = Arc::new(build_su2(3, 7).unwrap());
        let a = MultiplierSpec::new(
            "heat",
            SymbolField::scalar(m.clone(), |dp| Complex64::from((-(dp.spectral_tag)).exp())).unwrap(),
        );
        let run = |w| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .unwrap()
                .install(|| empirical_opnorm(&a, 1.25, 4.0, TrialStrategy::Mixed, 64, 77).unwrap())
        };
        assert_eq!(run(1), run(5));
    }

    #[test]
    fn trial_families_have_expected_shape() {
        let m = Arc::new(build_cyclic(50).unwrap());
        let mut rng = trial_rng(3, 3);
        for _ in 0..20 {
            let d = trial_coefficients(&m, TrialStrategy::Dirichlet, &mut rng).unwrap();
            let ones = d.blocks().iter().filter(|b| b.op_norm() == 1.0).count();
            assert!(ones >= 1);
            assert!(d.blocks()[..ones].iter().all(|b| b.op_norm() == 1.0));
            let h = trial_coefficients(&m, TrialStrategy::HeatFamily, &mut rng).unwrap();
            assert_eq!(h.blocks()[0].op_norm(), 1.0);
            let r = trial_coefficients(&m, TrialStrategy::RandomBand, &mut rng).unwrap();
            assert!(r.blocks().iter().any(|b| b.op_norm() > 0.0));
        }
    }
}
