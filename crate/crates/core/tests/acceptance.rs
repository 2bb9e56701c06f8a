//! End-to-end acceptance checks. Each test writes one `PASS`/`FAIL` line
//! straight to stderr (bypassing the test harness capture) and then asserts.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use vnlab::fourier::{plancherel_defect, Block, SymbolField};
use vnlab::group_models::{GroupModel, LambdaGrid, ModelSpec, RadialGrid};
use vnlab::lab::{execute, parse_config, reports_to_json, scan_constant_stability, Check, RunOptions};
use vnlab::multiplier::{
    difference_operator, hormander_rhs, sweep_hyp, sweep_nikolskii, symbol_rhs_compact, trial_function, trial_rng,
    verify_hormander, DifferenceMode, HypWeight, MultiplierSpec, TrialStrategy,
};
use vnlab::numerics::{conjugate, fit_decay_slope, index_gap};
use vnlab::singular_values::{
    distribution_at, mu_at, rearrangement_of_symbol, sup_duality_check, weak_norm, StepRearrangement,
};
use vnlab::spectral::{
    apply_spectral_function, embedding_constant, empirical_heat_bound, heat_decay_bound, heisenberg_trace_exact,
    homogeneous_symbol_trace, spectral_counting, spectral_weak_norm, SpectralData, SpectrumKind, TailLaw,
    WeakNormRoute,
};

fn verdict(n: u32, name: &str, ok: bool, detail: String) {
    let _ = writeln!(std::io::stderr(), "{} [{n:02}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

fn cyclic(n: usize) -> Arc<GroupModel> {
    ModelSpec::Cyclic { n }.build().unwrap()
}

fn su2(l_max: f64) -> Arc<GroupModel> {
    ModelSpec::Su2 { l_max, quad_order: None }.build().unwrap()
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn c01_plancherel_defect() {
    let start = Instant::now();
    let mut worst_z: f64 = 0.0;
    for (k, n) in [16, 256, 4096].into_iter().enumerate() {
        let m = cyclic(n);
        let trials = if k == 2 { 334 } else { 333 };
        for i in 0..trials {
            let f = trial_function(&m, TrialStrategy::RandomBand, 11, i).unwrap();
            worst_z = worst_z.max(plancherel_defect(&f).unwrap());
        }
    }
    let mut worst_s: f64 = 0.0;
    for (k, l) in [1.0, 3.5, 6.0].into_iter().enumerate() {
        let m = su2(l);
        let trials = if k == 2 { 334 } else { 333 };
        for i in 0..trials {
            let f = trial_function(&m, TrialStrategy::RandomBand, 12, i).unwrap();
            worst_s = worst_s.max(plancherel_defect(&f).unwrap());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        1,
        "Plancherel defect",
        worst_z <= 1e-12 && worst_s <= 1e-8 && secs <= 60.0,
        format!("Z_N worst {worst_z:.2e}, SU(2) worst {worst_s:.2e}, {secs:.1}s"),
    );
}

fn random_step(rng: &mut impl Rng) -> StepRearrangement {
    let n = rng.random_range(1..12);
    let atoms: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            // occasional exact ties exercise level merging
            let v = if rng.random::<f64>() < 0.2 { 0.5 } else { rng.random::<f64>() * 10.0 + 1e-3 };
            (v, rng.random::<f64>() * 5.0 + 0.01)
        })
        .collect();
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    StepRearrangement::from_atoms(atoms, total * 2.0).unwrap()
}

#[test]
fn c02_rearrangement_distribution_duality() {
    let mut rng = trial_rng(2, 0);
    let mut galois_bad = 0;
    let mut worst_sup: f64 = 0.0;
    for _ in 0..1000 {
        let r = random_step(&mut rng);
        let top = r.total_mass() * 1.2;
        for _ in 0..20 {
            // mu_t = min{λ : d_λ <= t}
            let t = rng.random::<f64>() * top;
            let lam = mu_at(&r, t);
            if distribution_at(&r, lam) > t {
                galois_bad += 1;
            }
            if lam > 0.0 && distribution_at(&r, lam.next_down()) <= t {
                galois_bad += 1;
            }
            // d_λ = min{t : mu_t <= λ}
            let l = rng.random::<f64>() * 11.0;
            let d = distribution_at(&r, l);
            if mu_at(&r, d) > l {
                galois_bad += 1;
            }
            if d > 0.0 && mu_at(&r, d.next_down()) <= l {
                galois_bad += 1;
            }
        }
        for alpha in [0.25, 0.5, 1.0, 2.0] {
            let (a, b) = sup_duality_check(&r, alpha).unwrap();
            // brute force over block right ends
            let brute = r.blocks().map(|(_, e, v)| v * e.powf(alpha)).fold(0.0, f64::max);
            let rel = ((a - b).abs().max((a - brute).abs())) / brute;
            worst_sup = worst_sup.max(rel);
        }
    }
    verdict(
        2,
        "mu/d Galois duality and sup identity",
        galois_bad == 0 && worst_sup <= 1e-12,
        format!("{galois_bad} Galois violations, worst sup mismatch {worst_sup:.2e}"),
    );
}

#[test]
fn c03_hausdorff_young() {
    let mut worst: f64 = 0.0;
    let mut all = true;
    for model in [cyclic(256), su2(4.0)] {
        for p in [1.25, 1.5, 2.0] {
            let rep =
                sweep_hyp(&model, &HypWeight::InverseT, p, conjugate(p), TrialStrategy::Mixed, 1000, 3).unwrap();
            worst = worst.max(rep.ratio);
            all &= rep.pass && rep.ratio <= 1.0 + 1e-9;
        }
    }
    verdict(3, "Hausdorff-Young at b = p'", all, format!("worst ratio {worst:.12}"));
}

#[test]
fn c04_paley_hyp_constant_stability() {
    let base = ModelSpec::Cyclic { n: 64 };
    let ladder = [64, 256, 1024, 4096];
    let mut worst: f64 = 0.0;
    let mut all = true;
    let mut lines = Vec::new();
    for p in [1.25, 1.5] {
        let pc = conjugate(p);
        for b in [p, 0.5 * (p + pc), pc] {
            let weights = [
                ("1/t", HypWeight::InverseT),
                ("dyadic(4)", HypWeight::dyadic(4)),
                (
                    "step(0,2,8,32)",
                    HypWeight::Step { breaks: vec![0.0, 2.0, 8.0, 32.0], values: vec![0.5, 0.125, 1.0 / 32.0] },
                ),
            ];
            for (name, weight) in weights {
                let check = Check::Hyp { p, b, weight };
                let out = scan_constant_stability(&base, &ladder, &check, TrialStrategy::Mixed, 200, 4).unwrap();
                let growth = out.summary.ratio;
                worst = worst.max(growth);
                all &= out.summary.pass && growth <= 1.10;
                let consts: Vec<String> = out.rows.iter().map(|r| format!("{:.4}", r.constant)).collect();
                lines.push(format!("p={p} b={b:.3} {name}: [{}]", consts.join(", ")));
            }
        }
    }
    for l in &lines {
        let _ = writeln!(std::io::stderr(), "      {l}");
    }
    verdict(4, "Paley/HYP ladder growth", all, format!("worst last/first {worst:.4}"));
}

#[test]
fn c05_nikolskii() {
    let mut worst: f64 = 0.0;
    let mut all = true;
    for model in [cyclic(128), su2(5.0)] {
        for (p, q) in [(1.5, 2.0), (1.5, 4.0), (2.0, f64::INFINITY)] {
            let rep = sweep_nikolskii(&model, p, q, TrialStrategy::Mixed, 1000, 5).unwrap();
            worst = worst.max(rep.ratio);
            all &= rep.pass && rep.ratio <= 1.0 + 1e-9;
        }
    }
    verdict(5, "Nikolskii", all, format!("worst ratio {worst:.12}"));
}

fn random_diagonal(model: &Arc<GroupModel>, rng: &mut impl Rng) -> MultiplierSpec {
    let blocks = model
        .dual()
        .iter()
        .map(|dp| Block::Diagonal((0..dp.dim).map(|_| rng.random::<f64>() * 3.0).collect()))
        .collect();
    MultiplierSpec::new("random_diagonal", SymbolField::new(model.clone(), blocks).unwrap())
}

#[test]
fn c06_hormander_sharpness_at_two() {
    let mut rng = trial_rng(6, 0);
    let models = [cyclic(64), su2(3.0)];
    let mut worst: f64 = 0.0;
    let mut all = true;
    for i in 0..100 {
        let a = random_diagonal(&models[i % 2], &mut rng);
        let rep = verify_hormander(&a, 2.0, 2.0, TrialStrategy::Power2, 1, i as u64).unwrap();
        // independent: largest diagonal entry
        let top = a
            .symbol()
            .blocks()
            .iter()
            .map(|b| match b {
                Block::Diagonal(d) => d.iter().fold(0.0, |m: f64, x| m.max(x.abs())),
                Block::Dense(_) => unreachable!(),
            })
            .fold(0.0, f64::max);
        let err = (rep.lhs - top).abs().max((rep.rhs - top).abs());
        worst = worst.max(err);
        all &= rep.pass && err <= 1e-8;
    }
    verdict(6, "power iteration equals mu_0", all, format!("worst |error| {worst:.2e}"));
}

fn random_dense_su2(model: &Arc<GroupModel>, rng: &mut impl Rng, support: usize) -> MultiplierSpec {
    let blocks = model
        .dual()
        .iter()
        .enumerate()
        .map(|(j, dp)| {
            let scale = if j < support { rng.random::<f64>() * 2.0 } else { 0.0 };
            Block::Dense(DMatrix::from_fn(dp.dim, dp.dim, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * scale
            }))
        })
        .collect();
    MultiplierSpec::new("random_dense", SymbolField::new(model.clone(), blocks).unwrap())
}

#[test]
fn c07_weak_norm_below_symbol_bound() {
    let mut rng = trial_rng(7, 0);
    let model = su2(4.0);
    let pairs = [(1.5, 3.0), (1.25, 2.0), (2.0, 6.0), (4.0 / 3.0, 4.0)];
    let mut violations = 0;
    let mut closest: f64 = 0.0;
    for i in 0..200 {
        let a = random_dense_su2(&model, &mut rng, model.dual().len());
        let r = rearrangement_of_symbol(a.symbol()).unwrap();
        let (p, q) = pairs[i % pairs.len()];
        let lcg = hormander_rhs(&r, p, q).unwrap();
        let sym = symbol_rhs_compact(&a, p, q).unwrap();
        if lcg > sym {
            violations += 1;
        }
        closest = closest.max(lcg / sym);
    }
    verdict(
        7,
        "rearrangement bound dominated by symbol bound",
        violations == 0,
        format!("{violations} violations, max lhs/rhs {closest:.6}"),
    );
}

#[test]
fn c08_spectral_weak_norm_two_routes() {
    let mut rng = trial_rng(8, 0);
    let model = su2(3.0);
    let phis: [fn(f64) -> f64; 2] = [|u| (-u).exp(), |u| (1.0 + u).powi(-2)];
    let mut worst: f64 = 0.0;
    let mut all = true;
    for _ in 0..25 {
        let lists: Vec<Vec<f64>> = model
            .dual()
            .iter()
            .map(|dp| (0..dp.dim).map(|_| rng.random::<f64>() * 20.0 + 0.01).collect())
            .collect();
        let l = SpectralData::from_eigenvalues(model.clone(), lists).unwrap();
        for phi in phis {
            for r in [1.0, 2.0, 4.0] {
                let a = spectral_weak_norm(&l, phi, r).unwrap();
                let sym = apply_spectral_function(&l, phi).unwrap();
                let b = weak_norm(&rearrangement_of_symbol(&sym).unwrap(), r).unwrap();
                let rel = (a.value - b).abs() / b;
                worst = worst.max(rel);
                all &= a.route == WeakNormRoute::Counting && rel <= 1e-9;
            }
        }
    }
    verdict(8, "phi(L) weak norm by counting and by rearrangement", all, format!("worst rel {worst:.2e}"));
}

#[test]
fn c09_heisenberg_trace_law() {
    let exact_n1 = heisenberg_trace_exact(1, 1.0);
    let closed = (exact_n1 - PI * PI / 16.0).abs();
    let mut worst: f64 = 0.0;
    let mut ranges = Vec::new();
    let cases = [
        (1, LambdaGrid::Geometric { lambda_min: 1e-4, lambda_max: 1e2, cells: 4000 }, 50_000),
        (2, LambdaGrid::Geometric { lambda_min: 1e-3, lambda_max: 1e2, cells: 3000 }, 1000),
    ];
    for (n, grid, k) in cases {
        let m = ModelSpec::HeisenbergSpectral { n, grid, hermite_cutoff: k }.build().unwrap();
        let l = SpectralData::heisenberg(m).unwrap();
        let (lo, hi) = l.validity();
        ranges.push(format!("n={n} s in [{lo:.3}, {hi:.3}]"));
        for s in log_space(lo, hi, 25) {
            let got = spectral_counting(&l, s);
            let exact = heisenberg_trace_exact(n, s);
            worst = worst.max((got / exact - 1.0).abs());
        }
    }
    verdict(
        9,
        "Heisenberg trace law",
        worst <= 0.01 && closed <= 1e-12,
        format!("worst rel {worst:.2e} over {}; |tau(1) - pi^2/16| = {closed:.1e}", ranges.join(", ")),
    );
}

/// `max_l N_l^{1/r} e^{-t u_l}` with `N_l` the number of SU(2) Laplacian
/// eigenvalues of `I - L` up to spin `l`, counted with multiplicity.
fn su2_heat_oracle(twice_l_max: u32, t: f64, r: f64) -> f64 {
    let mut count = 0.0;
    let mut best: f64 = 0.0;
    for tl in 0..=twice_l_max {
        let l = tl as f64 / 2.0;
        count += ((tl + 1) * (tl + 1)) as f64;
        let u = 1.0 + l * (l + 1.0);
        best = best.max(count.powf(1.0 / r) * (-t * u).exp());
    }
    best
}

#[test]
fn c10_heat_decay_slopes() {
    let times = log_space(1e-3, 1e-1, 15);
    // closed form
    let su2_small = SpectralData::compact(su2(2.0), SpectrumKind::Tags).unwrap();
    let h = SpectralData::heisenberg(
        ModelSpec::HeisenbergSpectral {
            n: 1,
            grid: LambdaGrid::Geometric { lambda_min: 1e-2, lambda_max: 10.0, cells: 10 },
            hermite_cutoff: 8,
        }
        .build()
        .unwrap(),
    )
    .unwrap();
    let mut closed_err: f64 = 0.0;
    for (l, alpha) in [(&su2_small, 1.5), (&h, 2.0)] {
        for (p, q) in [(1.25, 3.0), (1.5, 2.0), (2.0, 4.0), (4.0 / 3.0, 4.0)] {
            let series: Vec<(f64, f64)> =
                times.iter().map(|&t| (t, heat_decay_bound(l, t, p, q).unwrap())).collect();
            let fit = fit_decay_slope(&series).unwrap();
            closed_err = closed_err.max((fit.slope + alpha * index_gap(p, q)).abs());
        }
    }
    // empirical, SU(2) Laplacian spectrum up to spin 60
    let big = SpectralData::compact(su2(60.0), SpectrumKind::Tags).unwrap();
    let mut slope_err: f64 = 0.0;
    let mut oracle_err: f64 = 0.0;
    let mut slopes = Vec::new();
    for r in [1.0, 2.0, 4.0] {
        let series: Vec<(f64, f64)> = times
            .iter()
            .map(|&t| {
                let v = empirical_heat_bound(&big, t, r).unwrap();
                let o = su2_heat_oracle(120, t, r);
                oracle_err = oracle_err.max((v - o).abs() / o);
                (t, v)
            })
            .collect();
        let fit = fit_decay_slope(&series).unwrap();
        let target = -1.5 / r;
        slope_err = slope_err.max((fit.slope / target - 1.0).abs());
        slopes.push(format!("r={r}: {:.4}", fit.slope));
    }
    verdict(
        10,
        "heat decay slopes",
        closed_err <= 1e-12 && slope_err <= 0.03 && oracle_err <= 1e-12,
        format!(
            "closed-form slope error {closed_err:.1e}; empirical {} (rel err {slope_err:.4}); oracle mismatch {oracle_err:.1e}",
            slopes.join(", ")
        ),
    );
}

#[test]
fn c11_embedding_threshold() {
    let su2_l = SpectralData::compact(su2(10.0), SpectrumKind::Tags).unwrap();
    let h = SpectralData::heisenberg(
        ModelSpec::HeisenbergSpectral {
            n: 1,
            grid: LambdaGrid::Geometric { lambda_min: 1e-3, lambda_max: 10.0, cells: 200 },
            hermite_cutoff: 200,
        }
        .build()
        .unwrap(),
    )
    .unwrap();
    let mut all = true;
    let mut details = Vec::new();
    for (name, l, law) in [("SU(2)", &su2_l, TailLaw::su2_laplacian()), ("H^1", &h, TailLaw::heisenberg(1))] {
        for (p, q) in [(1.5, 3.0), (1.25, 4.0), (2.0, 2.5)] {
            let threshold = law.alpha * index_gap(p, q);
            let below = embedding_constant(l, threshold - 0.05, p, q).unwrap();
            let at = embedding_constant(l, threshold, p, q).unwrap();
            let above = embedding_constant(l, threshold + 0.05, p, q).unwrap();
            all &= below.is_infinite() && at.is_finite() && above.is_finite() && above <= at;
            details.push(format!("{name} ({p},{q}): {below:.3e}/{at:.3e}/{above:.3e}"));
        }
    }
    verdict(11, "embedding threshold", all, details.join("; "));
}

#[test]
fn c12_homogeneous_symbol_law() {
    let m = ModelSpec::EuclideanRadial { n: 2, grid: RadialGrid::Uniform { r_max: 10.0, shells: 4000 } }
        .build()
        .unwrap();
    let series: Vec<(f64, f64)> = log_space(1.0, 50.0, 20)
        .into_iter()
        .map(|s| (s, homogeneous_symbol_trace(&m, |r| r * r, s).unwrap()))
        .collect();
    let fit = fit_decay_slope(&series).unwrap();
    let c = fit.intercept.exp();
    let ok = (fit.slope - 1.0).abs() <= 0.02 && (c / PI - 1.0).abs() <= 0.02;
    verdict(12, "homogeneous symbol law", ok, format!("exponent {:.5} (n/mu = 1), C {c:.5}", fit.slope));
}

#[test]
fn c13_difference_telescoping() {
    let mut rng = trial_rng(13, 0);
    let model = su2(6.0);
    let len = model.dual().len();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let support = rng.random_range(1..=len);
        let a = random_dense_su2(&model, &mut rng, support);
        let svals: Vec<Vec<f64>> = a.symbol().blocks().iter().map(Block::singular_values).collect();
        let full = difference_operator(&a, DifferenceMode::FullDifference).unwrap();
        let literal = difference_operator(&a, DifferenceMode::Literal).unwrap();
        for j0 in 0..len {
            let d0 = model.dual()[j0].dim;
            for k in 0..d0 {
                let sum_full: f64 = (j0..len).map(|j| full.diagonals[j][k]).sum();
                worst = worst.max((sum_full - svals[j0][k]).abs());
                if k + 1 < d0 {
                    let sum_lit: f64 = (j0..len).map(|j| literal.diagonals[j][k]).sum();
                    worst = worst.max((sum_lit - svals[j0][k]).abs());
                }
            }
        }
    }
    verdict(13, "difference operator telescoping", worst <= 1e-12, format!("worst |error| {worst:.2e}"));
}

const DETERMINISM_CONFIGS: [&str; 5] = [
    r#"{"model": {"kind": "cyclic", "n": 512},
        "experiment": {"kind": "verify", "check": {"inequality": "hyp", "p": 1.5, "b": 2}},
        "trials": 300, "seed": 1}"#,
    r#"{"model": {"kind": "su2", "l_max": 4},
        "experiment": {"kind": "verify", "check": {"inequality": "nikolskii", "p": 1.5, "q": 4}},
        "trials": 300, "seed": 42}"#,
    r#"{"model": {"kind": "su2", "l_max": 3},
        "experiment": {"kind": "verify", "check": {"inequality": "hormander", "p": 1.5, "q": 3, "symbol": {"kind": "random_dense"}}},
        "trials": 200, "seed": 9}"#,
    r#"{"model": {"kind": "cyclic", "n": 128},
        "experiment": {"kind": "verify", "check": {"inequality": "beta_infty", "beta": 1.5, "symbol": {"kind": "heat", "t": 0.01}}},
        "trials": 200, "seed": 3}"#,
    r#"{"model": {"kind": "cyclic", "n": 64},
        "experiment": {"kind": "scan", "ladder": [64, 256, 1024], "check": {"inequality": "hyp", "p": 1.25, "b": 1.25}},
        "trials": 100, "seed": 17}"#,
];

#[test]
fn c14_determinism_across_workers() {
    let mut all = true;
    let mut count = 0;
    for text in DETERMINISM_CONFIGS {
        let c = parse_config(text).unwrap();
        let runs: Vec<String> = [1, 2, 5, 8]
            .into_iter()
            .map(|w| {
                let opts = RunOptions { workers: Some(w), ..Default::default() };
                reports_to_json(&execute(&c, text, &opts).unwrap().reports)
            })
            .collect();
        all &= runs.iter().all(|r| r == &runs[0]);
        count += runs[0].len();
    }
    verdict(
        14,
        "byte-identical JSON across worker counts",
        all,
        format!("{} configs x 4 worker counts, {count} bytes per sweep", DETERMINISM_CONFIGS.len()),
    );
}
