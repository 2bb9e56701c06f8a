//! Inequality verifiers. Each returns a [`VerificationReport`]; the
//! `sweep_*` variants run a seeded family of trial functions and keep the
//! worst ratio.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probe::{best_of, trial_coefficients, trial_rng, TrialStrategy};
use super::report::{ConstantPolicy, VerificationReport};
use super::{bounds, empirical_opnorm, multiply_coefficients, MultiplierSpec};
use crate::error::{invalid_param, Result};
use crate::fourier::{forward_transform, inverse_transform, lp_norm, GroupFunction};
use crate::group_models::GroupModel;
use crate::numerics::{conjugate, index_gap, KahanSum};
use crate::singular_values::{lorentz_norm, rearrangement_of_symbol, StepRearrangement};

const UNIT: ConstantPolicy = ConstantPolicy::Unit { tol: 1e-9 };

/// Positive weights `φ` on `(0, inf)` for the Paley-type inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypWeight {
    /// `φ(t) = 1/t`.
    InverseT,
    /// `φ = values[i]` on `[breaks[i], breaks[i+1])`, zero past the last break.
    Step { breaks: Vec<f64>, values: Vec<f64> },
}

impl HypWeight {
    /// `1` on `[0, 1)` and `2^{-j}` on `[2^{j-1}, 2^j)` for `j = 1..=levels`.
    pub fn dyadic(levels: u32) -> Self {
        let mut breaks = vec![0.0, 1.0];
        let mut values = vec![1.0];
        for j in 1..=levels {
            breaks.push(2f64.powi(j as i32));
            values.push(2f64.powi(-(j as i32)));
        }
        HypWeight::Step { breaks, values }
    }

    pub fn id(&self) -> &'static str {
        match self {
            HypWeight::InverseT => "inv_t",
            HypWeight::Step { .. } => "step",
        }
    }

    fn validate(&self) -> Result<()> {
        if let HypWeight::Step { breaks, values } = self {
            if breaks.len() != values.len() + 1 || breaks.first() != Some(&0.0) {
                return Err(invalid_param("step weight needs breaks [0, t_1, ..] and one value per step"));
            }
            if breaks.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(invalid_param("step weight breaks must increase"));
            }
            if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(invalid_param("step weight values must be positive and finite"));
            }
        }
        Ok(())
    }

    /// `M_φ = sup_s s |{t : φ(t) >= s}|`.
    pub fn m_phi(&self) -> f64 {
        match self {
            HypWeight::InverseT => 1.0,
            HypWeight::Step { breaks, values } => values
                .iter()
                .map(|&s| {
                    let level: f64 = values
                        .iter()
                        .zip(breaks.windows(2))
                        .filter(|(v, _)| **v >= s)
                        .map(|(_, w)| w[1] - w[0])
                        .sum();
                    s * level
                })
                .fold(0.0, f64::max),
        }
    }
}

/// `(int_0^inf (mu_t φ(t)^e)^b dt)^{1/b}` with `e = 1/b - 1/p'`; `φ^0 = 1`.
pub fn hyp_lhs(r: &StepRearrangement, weight: &HypWeight, p: f64, b: f64) -> f64 {
    let e = 1.0 / b - 1.0 / conjugate(p);
    let e = if e.abs() < 1e-15 { 0.0 } else { e };
    let c = e * b;
    let mut acc = KahanSum::default();
    match weight {
        HypWeight::InverseT => {
            for (a, bb, v) in r.blocks() {
                let seg = if c == 0.0 {
                    bb - a
                } else {
                    (bb.powf(1.0 - c) - a.powf(1.0 - c)) / (1.0 - c)
                };
                acc.add(v.powf(b) * seg);
            }
        }
        HypWeight::Step { breaks, values } => {
            for (a, bb, v) in r.blocks() {
                let vb = v.powf(b);
                if c == 0.0 {
                    acc.add(vb * (bb - a));
                    continue;
                }
                for (w, win) in values.iter().zip(breaks.windows(2)) {
                    let lo = a.max(win[0]);
                    let hi = bb.min(win[1]);
                    if hi > lo {
                        acc.add(vb * w.powf(c) * (hi - lo));
                    }
                }
            }
        }
    }
    acc.sum().powf(1.0 / b)
}

fn check_hyp(p: f64, b: f64) -> Result<()> {
    let pc = conjugate(p);
    if !(p > 1.0 && p <= 2.0) {
        return Err(invalid_param(format!("need 1 < p <= 2, got p = {p}")));
    }
    if !(b >= p * (1.0 - 1e-12) && b <= pc * (1.0 + 1e-12)) {
        return Err(invalid_param(format!("need p <= b <= p' = {pc}, got b = {b}")));
    }
    Ok(())
}

fn hyp_policy(p: f64, b: f64) -> ConstantPolicy {
    if (b - conjugate(p)).abs() <= 1e-12 * b {
        UNIT
    } else {
        ConstantPolicy::Stability
    }
}

/// Hausdorff-Young-Paley: `lhs = (int (mu_t(f^) φ^{1/b-1/p'})^b)^{1/b}`,
/// `rhs = M_φ^{1/b-1/p'} ||f||_p`.
pub fn verify_hyp(f: &GroupFunction, weight: &HypWeight, p: f64, b: f64) -> Result<VerificationReport> {
    check_hyp(p, b)?;
    weight.validate()?;
    let r = rearrangement_of_symbol(&forward_transform(f)?)?;
    let nf = lp_norm(f, p)?;
    Ok(hyp_report(f.model(), &r, nf, weight, p, b))
}

fn hyp_report(
    model: &GroupModel,
    r: &StepRearrangement,
    nf: f64,
    weight: &HypWeight,
    p: f64,
    b: f64,
) -> VerificationReport {
    let e = 1.0 / b - 1.0 / conjugate(p);
    let m = weight.m_phi();
    let lhs = hyp_lhs(r, weight, p, b);
    let me = if e.abs() < 1e-15 { 1.0 } else { m.powf(e) };
    let mut rep = VerificationReport::new(
        "hyp",
        model.label(),
        (p, conjugate(p), b),
        1,
        0,
        lhs,
        me * nf,
        hyp_policy(p, b),
    );
    rep.weight = Some(weight.id().to_string());
    rep.extras.insert("m_phi".into(), m);
    if !m.is_finite() {
        rep.fail_with("precondition violated: M_phi is infinite");
    }
    rep
}

/// `verify_hyp` over `trials` seeded trial functions, keeping the worst ratio.
pub fn sweep_hyp(
    model: &Arc<GroupModel>,
    weight: &HypWeight,
    p: f64,
    b: f64,
    strategy: TrialStrategy,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    check_hyp(p, b)?;
    weight.validate()?;
    let reps: Vec<VerificationReport> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let fhat = trial_coefficients(model, strategy, &mut trial_rng(seed, i as u64))?;
            let f = inverse_transform(&fhat)?;
            let r = rearrangement_of_symbol(&fhat)?;
            Ok(hyp_report(model, &r, lp_norm(&f, p)?, weight, p, b))
        })
        .collect::<Result<_>>()?;
    Ok(worst(reps, trials, seed))
}

fn worst(reps: Vec<VerificationReport>, trials: usize, seed: u64) -> VerificationReport {
    let all_pass = reps.iter().all(|r| r.pass);
    let ratios: Vec<f64> = reps.iter().map(|r| r.ratio).collect();
    let best = best_of(&ratios, trials).best_trial.unwrap_or(0);
    let mut out = reps.into_iter().nth(best).expect("at least one trial");
    out.trials = trials;
    out.seed = seed;
    out.pass = all_pass;
    out.extras.insert("worst_trial".into(), best as f64);
    out
}

/// Support trace `tau(P) = sum_π w_π rank(f^(π))`; singular values below
/// `1e-12` of the largest one count as zero.
pub fn support_trace(fhat: &crate::fourier::SymbolField) -> f64 {
    let top = fhat.blocks().iter().map(|b| b.op_norm()).fold(0.0, f64::max);
    let tol = 1e-12 * top;
    fhat.blocks()
        .iter()
        .zip(fhat.model().dual())
        .map(|(b, dp)| dp.plancherel_weight * b.rank(tol) as f64)
        .sum()
}

fn check_nikolskii(p: f64, q: f64) -> Result<()> {
    if !(q > 1.0) || !(p > 1.0 && p <= q.min(2.0)) {
        return Err(invalid_param(format!("need 1 < p <= min(2, q), got p = {p}, q = {q}")));
    }
    Ok(())
}

/// Nikolskii: `||f||_q <= tau(P)^{1/p-1/q} ||f||_p`; `q = inf` uses the node sup.
pub fn verify_nikolskii(f: &GroupFunction, p: f64, q: f64) -> Result<VerificationReport> {
    check_nikolskii(p, q)?;
    let fhat = forward_transform(f)?;
    nikolskii_report(f, &fhat, p, q)
}

fn nikolskii_report(
    f: &GroupFunction,
    fhat: &crate::fourier::SymbolField,
    p: f64,
    q: f64,
) -> Result<VerificationReport> {
    let tau = support_trace(fhat);
    let lhs = lp_norm(f, q)?;
    let rhs = if tau == 0.0 { 0.0 } else { tau.powf(index_gap(p, q)) * lp_norm(f, p)? };
    let mut rep = VerificationReport::new(
        "nikolskii",
        f.model().label(),
        (p, q, f64::NAN),
        1,
        0,
        lhs,
        rhs,
        UNIT,
    );
    rep.extras.insert("support_trace".into(), tau);
    if f.is_zero() {
        rep.notes.push("zero function: vacuous pass".into());
        rep.set_sides(0.0, 0.0);
    }
    Ok(rep)
}

/// `verify_nikolskii` over seeded trial functions.
pub fn sweep_nikolskii(
    model: &Arc<GroupModel>,
    p: f64,
    q: f64,
    strategy: TrialStrategy,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    check_nikolskii(p, q)?;
    let reps: Vec<VerificationReport> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let fhat = trial_coefficients(model, strategy, &mut trial_rng(seed, i as u64))?;
            let f = inverse_transform(&fhat)?;
            nikolskii_report(&f, &fhat, p, q)
        })
        .collect::<Result<_>>()?;
    Ok(worst(reps, trials, seed))
}

/// Hörmander-type bound: trial lower bound for `||A||_{p->q}` against
/// `sup_s s |{mu >= s}|^{1/p-1/q}`. At `p = q = 2` the lower bound comes
/// from power iteration and must match `mu_0` to `1e-8`.
pub fn verify_hormander(
    a: &MultiplierSpec,
    p: f64,
    q: f64,
    strategy: TrialStrategy,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let r = rearrangement_of_symbol(a.symbol())?;
    let rhs = bounds::hormander_rhs(&r, p, q)?;
    let sharp = p == 2.0 && q == 2.0;
    let (strategy, policy) = if sharp {
        (TrialStrategy::Power2, ConstantPolicy::Equality { tol: 1e-8 })
    } else {
        (strategy, ConstantPolicy::Stability)
    };
    let probe = empirical_opnorm(a, p, q, strategy, trials, seed)?;
    let mut rep = VerificationReport::new(
        "hormander",
        a.model().label(),
        (p, q, f64::NAN),
        probe.trials,
        seed,
        probe.value,
        rhs,
        policy,
    );
    rep.weight = Some(format!("{strategy:?}").to_lowercase());
    if a.model().kind().is_compact() {
        let sym = bounds::symbol_rhs_compact(a, p, q)?;
        rep.extras.insert("symbol_rhs".into(), sym);
        if rhs > sym * (1.0 + 1e-12) {
            rep.fail_with("weak-norm bound exceeds the compact symbol bound");
        }
    }
    if let Some(it) = probe.iterations {
        rep.extras.insert("iterations".into(), it as f64);
    }
    Ok(rep)
}

/// `||A||_{L^β -> L^inf} <= ||σ_A||_{L^β(VN)}`, probed by trials.
pub fn verify_beta_infty(
    a: &MultiplierSpec,
    beta: f64,
    strategy: TrialStrategy,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if !(beta > 1.0 && beta <= 2.0) {
        return Err(invalid_param(format!("need 1 < beta <= 2, got {beta}")));
    }
    if trials == 0 {
        return Err(invalid_param("at least one trial is required"));
    }
    let model = a.model();
    let rhs = lorentz_norm(&rearrangement_of_symbol(a.symbol())?, beta, beta)?;
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let fhat = trial_coefficients(model, strategy, &mut trial_rng(seed, i as u64))?;
            let f = inverse_transform(&fhat)?;
            let nf = lp_norm(&f, beta)?;
            if nf == 0.0 {
                return Ok(0.0);
            }
            let af = inverse_transform(&multiply_coefficients(a, &fhat)?)?;
            Ok(lp_norm(&af, f64::INFINITY)? / nf)
        })
        .collect::<Result<_>>()?;
    let probe = best_of(&ratios, trials);
    let mut rep = VerificationReport::new(
        "beta_infty",
        model.label(),
        (beta, f64::INFINITY, beta),
        trials,
        seed,
        probe.value,
        rhs,
        UNIT,
    );
    rep.notes.push("sup-norm sampled at quadrature nodes (one-sided probe)".into());
    Ok(rep)
}
