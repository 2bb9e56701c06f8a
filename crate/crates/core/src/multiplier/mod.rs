//! Fourier multipliers on compact models: application, adjoints, the
//! right-hand-side functionals of the multiplier theorems, trial-based
//! operator-norm probes and the inequality verifiers.

mod bounds;
mod probe;
mod report;
mod verify;

use std::sync::Arc;

use num_complex::Complex64;

pub use bounds::{
    difference_operator, hormander_rhs, lizorkin_rhs_compact, lizorkin_rhs_lcg, symbol_rhs_compact,
    DifferenceMode, DifferenceSymbol, LizorkinForm, LizorkinTerms, WeightFn,
};
pub use probe::{
    empirical_opnorm, power_iteration, trial_coefficients, trial_function, trial_rng, OpNormProbe,
    TrialStrategy,
};
pub use report::{ConstantPolicy, VerificationReport};
pub use verify::{
    hyp_lhs, support_trace, sweep_hyp, sweep_nikolskii, verify_beta_infty, verify_hormander,
    verify_hyp, verify_nikolskii, HypWeight,
};

use crate::error::{invalid_input, Result};
use crate::fourier::{forward_transform, inverse_transform, GroupFunction, SymbolField};
use crate::group_models::GroupModel;

/// A left Fourier multiplier, stored through its symbol `σ_A(π)`.
#[derive(Debug, Clone)]
pub struct MultiplierSpec {
    pub name: String,
    symbol: SymbolField,
}

impl MultiplierSpec {
    pub fn new(name: impl Into<String>, symbol: SymbolField) -> Self {
        MultiplierSpec {
            name: name.into(),
            symbol,
        }
    }

    pub fn identity(model: Arc<GroupModel>) -> Self {
        Self::new("identity", SymbolField::identity(model))
    }

    pub fn symbol(&self) -> &SymbolField {
        &self.symbol
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        self.symbol.model()
    }
}

/// `σ_A(π) f^(π)` on the Fourier side.
pub(crate) fn multiply_coefficients(a: &MultiplierSpec, fhat: &SymbolField) -> Result<SymbolField> {
    if fhat.model().spec() != a.model().spec() {
        return Err(invalid_input(format!(
            "multiplier on {} applied to a function on {}",
            a.model().label(),
            fhat.model().label()
        )));
    }
    a.symbol.compose(fhat)
}

/// `Af = F^{-1}[σ_A f^]`.
pub fn apply_multiplier(a: &MultiplierSpec, f: &GroupFunction) -> Result<GroupFunction> {
    let fhat = forward_transform(f)?;
    inverse_transform(&multiply_coefficients(a, &fhat)?)
}

/// `σ_{A*}(π) = σ_A(π)*`.
pub fn adjoint_symbol(a: &MultiplierSpec) -> MultiplierSpec {
    MultiplierSpec::new(format!("{}*", a.name), a.symbol.adjoint())
}

/// Symbol with the scalar `c(π)` on every block.
pub fn scalar_multiplier(
    name: &str,
    model: Arc<GroupModel>,
    c: impl Fn(&crate::group_models::DualPoint) -> Complex64,
) -> Result<MultiplierSpec> {
    Ok(MultiplierSpec::new(name, SymbolField::scalar(model, c)?))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::lp_norm;
    use crate::group_models::{build_cyclic, build_su2, DualLabel};
    use crate::singular_values::rearrangement_of_symbol;
    use std::f64::consts::PI;

    #[test]
    fn identity_and_zero() {
        let m = Arc::new(build_su2(3, 7).unwrap());
        let f = trial_function(&m, TrialStrategy::RandomBand, 3, 0).unwrap();
        let g = apply_multiplier(&MultiplierSpec::identity(m.clone()), &f).unwrap();
        assert!(g.sup_distance(&f) < 1e-11);
        let z = MultiplierSpec::new("zero", SymbolField::zeros(m));
        let h = apply_multiplier(&z, &f).unwrap();
        assert!(lp_norm(&h, f64::INFINITY).unwrap() < 1e-13);
    }

    #[test]
    fn modulation_symbol_shifts() {
        let n = 16;
        let m = Arc::new(build_cyclic(n).unwrap());
        let f = trial_function(&m, TrialStrategy::RandomBand, 11, 2).unwrap();
        for a in [1usize, 5] {
            let s = scalar_multiplier("shift", m.clone(), |dp| {
                let DualLabel::Character(k) = &dp.label else { unreachable!() };
                Complex64::from_polar(1.0, 2.0 * PI * (k[0] * a as i64) as f64 / n as f64)
            })
            .unwrap();
            let g = apply_multiplier(&s, &f).unwrap();
            for j in 0..n {
                assert!((g.values()[j] - f.values()[(j + a) % n]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_is_an_involution() {
        let m = Arc::new(build_su2(4, 9).unwrap());
        let fhat = trial_coefficients(&m, TrialStrategy::RandomBand, &mut trial_rng(5, 1)).unwrap();
        let a = MultiplierSpec::new("rand", fhat);
        let aa = adjoint_symbol(&adjoint_symbol(&a));
        assert_eq!(aa.symbol().max_abs_diff(a.symbol()), 0.0);
        let ra = rearrangement_of_symbol(a.symbol()).unwrap();
        let rs = rearrangement_of_symbol(adjoint_symbol(&a).symbol()).unwrap();
        assert_eq!(ra.breaks(), rs.breaks());
        for (x, y) in ra.values().iter().zip(rs.values()) {
            assert!((x - y).abs() <= 1e-13 * x);
        }
        let herm = SymbolField::diagonal(m.clone(), |dp| vec![1.5; dp.dim]).unwrap();
        let h = MultiplierSpec::new("h", herm);
        assert_eq!(adjoint_symbol(&h).symbol().max_abs_diff(h.symbol()), 0.0);
    }

    #[test]
    fn foreign_model_is_rejected() {
        let a = MultiplierSpec::identity(Arc::new(build_cyclic(4).unwrap()));
        let f = GroupFunction::constant(Arc::new(build_cyclic(5).unwrap()), Complex64::from(1.0)).unwrap();
        assert!(apply_multiplier(&a, &f).is_err());
    }
}
