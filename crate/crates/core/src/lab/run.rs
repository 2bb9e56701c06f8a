//! Experiment orchestration: parse, validate, execute, write.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::config::{Check, Experiment, ExperimentConfig, ReportFormat, SpectralQuantity, SymbolSpec};
use super::report::{emit_report, fmt_num};
use super::scan::{scan_constant_stability, scan_tsv};
use crate::error::{LabError, Result};
use crate::fourier::{forward_transform, inverse_transform, lp_norm, Block, SymbolField};
use crate::group_models::{GroupModel, ModelKind};
use crate::multiplier::{
    empirical_opnorm, lizorkin_rhs_compact, sweep_hyp, sweep_nikolskii, trial_function, trial_rng,
    verify_beta_infty, verify_hormander, ConstantPolicy, DifferenceMode, LizorkinForm,
    MultiplierSpec, TrialStrategy, VerificationReport,
};
use crate::numerics::{conjugate, fit_decay_slope, index_gap, unit_ball_volume};
use crate::singular_values::{rearrangement_of_symbol, weak_norm};
use crate::spectral::{
    apply_spectral_function, embedding_constant, empirical_heat_bound, heat_decay_bound,
    heisenberg_trace_exact, homogeneous_symbol_trace, rockland_counts, slope_report_csv,
    spectral_counting, spectral_weak_norm, SpectralData, SpectrumKind,
};

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<ReportFormat>,
}

/// A configuration problem, anchored to a line of the config file when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

/// Why a run stopped before producing reports.
#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Lab(LabError),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => e.fmt(f),
            RunError::Lab(e) => e.fmt(f),
        }
    }
}

impl RunError {
    /// 2 for usage and configuration problems, 1 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Lab(LabError::Io(_)) => 1,
            _ => 2,
        }
    }
}

/// Reports plus auxiliary files (name, contents).
#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub reports: Vec<VerificationReport>,
    pub artifacts: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }
}

/// 1-based line of the first `"key":` occurring at or after line `from`.
fn locate_key(text: &str, key: &str, from: usize) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines().enumerate().skip(from.saturating_sub(1)).find_map(|(i, line)| {
        let pos = line.find(&needle)?;
        line[pos + needle.len()..].trim_start().starts_with(':').then_some(i + 1)
    })
}

fn anchored(text: &str, path: &[&str], message: String) -> ConfigError {
    let mut line = Some(1);
    for key in path {
        line = line.and_then(|from| locate_key(text, key, from)).or(line);
    }
    ConfigError {
        line: if path.is_empty() { None } else { line },
        column: None,
        message,
    }
}

pub fn parse_config(text: &str) -> std::result::Result<ExperimentConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| ConfigError {
        line: Some(e.line()),
        column: Some(e.column()),
        message: e.to_string(),
    })
}

fn check_range(ok: bool, text: &str, path: &[&str], msg: String) -> std::result::Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(anchored(text, path, msg))
    }
}

fn validate_check(check: &Check, text: &str) -> std::result::Result<(), ConfigError> {
    let hormander_pq = |p: f64, q: f64| -> std::result::Result<(), ConfigError> {
        check_range(p > 1.0 && p <= 2.0, text, &["check", "p"], format!("p = {p} outside (1, 2]"))?;
        check_range(q >= 2.0 && q.is_finite(), text, &["check", "q"], format!("q = {q} outside [2, inf)"))
    };
    match *check {
        Check::Hyp { p, b, .. } => {
            check_range(p > 1.0 && p <= 2.0, text, &["check", "p"], format!("p = {p} outside (1, 2]"))?;
            let pc = conjugate(p);
            check_range(
                b >= p * (1.0 - 1e-12) && b <= pc * (1.0 + 1e-12),
                text,
                &["check", "b"],
                format!("b = {b} outside [p, p'] = [{p}, {pc}]"),
            )
        }
        Check::Nikolskii { p, q } => {
            check_range(q > 1.0, text, &["check", "q"], format!("q = {q} must exceed 1"))?;
            check_range(
                p > 1.0 && p <= q.min(2.0),
                text,
                &["check", "p"],
                format!("p = {p} outside (1, min(2, q)]"),
            )
        }
        Check::Hormander { p, q, .. } => hormander_pq(p, q),
        Check::BetaInfty { beta, .. } => check_range(
            beta > 1.0 && beta <= 2.0,
            text,
            &["check", "beta"],
            format!("beta = {beta} outside (1, 2]"),
        ),
        Check::Lizorkin { p, q, m, .. } => {
            hormander_pq(p, q)?;
            if let Some(m) = m {
                check_range(
                    m >= 1.0 - 1.0 / p && m < 1.0,
                    text,
                    &["check", "m"],
                    format!("m = {m} outside [1 - 1/p, 1)"),
                )?;
            }
            Ok(())
        }
    }
}

/// Checks preconditions that do not need the model to be built.
pub fn validate_config(
    c: &ExperimentConfig,
    text: &str,
    opts: &RunOptions,
) -> std::result::Result<(), ConfigError> {
    if c.experiment.uses_trials() {
        check_range(c.trials >= 1, text, &["trials"], "trials must be >= 1".into())?;
        check_range(
            c.seed.is_some() || opts.seed.is_some(),
            text,
            &["experiment"],
            "a seed is required for trial-based experiments".into(),
        )?;
    }
    let positive = |v: &[f64], key: &str| {
        check_range(
            !v.is_empty() && v.iter().all(|x| x.is_finite() && *x > 0.0),
            text,
            &["experiment", key],
            format!("{key} must be a non-empty list of positive numbers"),
        )
    };
    match &c.experiment {
        Experiment::Transform => Ok(()),
        Experiment::Verify { check } => validate_check(check, text),
        Experiment::Scan { ladder, check } => {
            check_range(
                !ladder.is_empty() && ladder.windows(2).all(|w| w[1] > w[0]),
                text,
                &["ladder"],
                "ladder must be non-empty and strictly ascending".into(),
            )?;
            validate_check(check, text)
        }
        Experiment::Heat { p, q, times } => {
            check_range(*p > 1.0 && *p <= 2.0, text, &["experiment", "p"], format!("p = {p} outside (1, 2]"))?;
            check_range(*q >= 2.0 && q.is_finite(), text, &["experiment", "q"], format!("q = {q} outside [2, inf)"))?;
            positive(times, "times")?;
            check_range(times.len() >= 3, text, &["times"], "slope fits need at least 3 times".into())
        }
        Experiment::Spectral { quantity } => match quantity {
            SpectralQuantity::Counting { levels }
            | SpectralQuantity::HeisenbergTrace { levels }
            | SpectralQuantity::Rockland { levels, .. }
            | SpectralQuantity::Homogeneous { levels, .. } => positive(levels, "levels"),
            SpectralQuantity::WeakNorm { r, .. } => {
                check_range(*r >= 1.0, text, &["quantity", "r"], format!("r = {r} must be >= 1"))
            }
            SpectralQuantity::Embedding { p, q, gammas } => {
                check_range(*p > 1.0 && *p <= 2.0, text, &["quantity", "p"], format!("p = {p} outside (1, 2]"))?;
                check_range(*q >= 2.0 && q.is_finite(), text, &["quantity", "q"], format!("q = {q} outside [2, inf)"))?;
                check_range(
                    !gammas.is_empty() && gammas.iter().all(|g| *g >= 0.0),
                    text,
                    &["gammas"],
                    "gammas must be a non-empty list of numbers >= 0".into(),
                )
            }
        },
    }
}

impl Check {
    pub fn id(&self) -> &'static str {
        match self {
            Check::Hyp { .. } => "hyp",
            Check::Nikolskii { .. } => "nikolskii",
            Check::Hormander { .. } => "hormander",
            Check::BetaInfty { .. } => "beta_infty",
            Check::Lizorkin { .. } => "lizorkin",
        }
    }

    fn symbol(&self) -> Option<&SymbolSpec> {
        match self {
            Check::Hormander { symbol, .. }
            | Check::BetaInfty { symbol, .. }
            | Check::Lizorkin { symbol, .. } => Some(symbol),
            _ => None,
        }
    }
}

/// Materialises a named symbol on a model; random symbols draw from `seed`.
pub fn build_symbol(model: &Arc<GroupModel>, spec: &SymbolSpec, seed: u64) -> Result<MultiplierSpec> {
    let mut rng = trial_rng(seed, u64::MAX - 1);
    let field = match *spec {
        SymbolSpec::Identity => SymbolField::identity(model.clone()),
        SymbolSpec::Heat { t } => {
            SymbolField::scalar(model.clone(), |dp| Complex64::from((-t * (dp.spectral_tag - 1.0)).exp()))?
        }
        SymbolSpec::Bessel { gamma } => {
            SymbolField::scalar(model.clone(), |dp| Complex64::from(dp.spectral_tag.powf(-gamma / 2.0)))?
        }
        SymbolSpec::RandomDiagonal => {
            let blocks = model
                .dual()
                .iter()
                .map(|dp| Block::Diagonal((0..dp.dim).map(|_| rng.random::<f64>()).collect()))
                .collect();
            SymbolField::new(model.clone(), blocks)?
        }
        SymbolSpec::RandomDense => {
            let blocks = model
                .dual()
                .iter()
                .map(|dp| {
                    Block::Dense(DMatrix::from_fn(dp.dim, dp.dim, |_, _| {
                        Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                    }))
                })
                .collect();
            SymbolField::new(model.clone(), blocks)?
        }
    };
    Ok(MultiplierSpec::new(format!("{spec:?}").to_lowercase(), field))
}

/// One verifier run on a built model.
pub fn run_check(
    model: &Arc<GroupModel>,
    check: &Check,
    strategy: TrialStrategy,
    trials: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let symbol = match check.symbol() {
        Some(s) => Some(build_symbol(model, s, seed)?),
        None => None,
    };
    match *check {
        Check::Hyp { p, b, ref weight } => sweep_hyp(model, weight, p, b, strategy, trials, seed),
        Check::Nikolskii { p, q } => sweep_nikolskii(model, p, q, strategy, trials, seed),
        Check::Hormander { p, q, .. } => {
            verify_hormander(symbol.as_ref().expect("has symbol"), p, q, strategy, trials, seed)
        }
        Check::BetaInfty { beta, .. } => {
            verify_beta_infty(symbol.as_ref().expect("has symbol"), beta, strategy, trials, seed)
        }
        Check::Lizorkin { p, q, m, .. } => {
            let a = symbol.as_ref().expect("has symbol");
            let form = m.map_or(LizorkinForm::Sum, |m| LizorkinForm::Sup { m });
            let terms = lizorkin_rhs_compact(a, p, q, form, DifferenceMode::Literal)?;
            let probe = empirical_opnorm(a, p, q, strategy, trials, seed)?;
            let mut rep = VerificationReport::new(
                "lizorkin",
                model.label(),
                (p, q, m.unwrap_or(f64::NAN)),
                trials,
                seed,
                probe.value,
                terms.total(),
                ConstantPolicy::Stability,
            );
            rep.extras.insert("sup_term".into(), terms.sup_term);
            rep.extras.insert("variation_term".into(), terms.variation_term);
            Ok(rep)
        }
    }
}

fn spectral_data_for(model: &Arc<GroupModel>) -> Result<SpectralData> {
    if model.kind() == ModelKind::HeisenbergSpectral {
        SpectralData::heisenberg(model.clone())
    } else {
        SpectralData::compact(model.clone(), SpectrumKind::Tags)
    }
}

fn series_tsv(description: &str, columns: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = format!("# {description}\n# columns: {}\n{}\n", columns.join(", "), columns.join("\t"));
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| fmt_num(x)).collect();
        let _ = writeln!(out, "{}", cells.join("\t"));
    }
    out
}

fn run_transform(model: &Arc<GroupModel>, c: &ExperimentConfig, seed: u64, out: &mut RunOutcome) -> Result<()> {
    let f = trial_function(model, c.strategy, seed, 0)?;
    let fhat = forward_transform(&f)?;
    let back = inverse_transform(&fhat)?;
    let lhs = lp_norm(&f, 2.0)?.powi(2);
    let rhs = fhat.plancherel_norm_sq();
    let label = model.label();
    out.reports.push(VerificationReport::new(
        "plancherel",
        label.clone(),
        (2.0, 2.0, 2.0),
        1,
        seed,
        lhs,
        rhs,
        ConstantPolicy::Equality { tol: 1e-8 },
    ));
    let scale = lp_norm(&f, f64::INFINITY)?.max(1e-300);
    out.reports.push(VerificationReport::new(
        "round_trip",
        label,
        (f64::INFINITY, f64::INFINITY, f64::NAN),
        1,
        seed,
        back.sup_distance(&f) / scale,
        1e-10,
        ConstantPolicy::Unit { tol: 0.0 },
    ));
    out.artifacts.push(("function.csv".into(), f.to_csv()));
    out.artifacts.push(("symbol.csv".into(), fhat.to_csv()));
    Ok(())
}

const NO_PQ: (f64, f64) = (f64::NAN, f64::NAN);

fn fit_report(
    id: &str,
    model: String,
    (p, q): (f64, f64),
    series: &[(f64, f64)],
    expected: f64,
    tol: f64,
    out: &mut RunOutcome,
) -> Result<f64> {
    let fit = fit_decay_slope(series)?;
    let mut rep = VerificationReport::new(
        id,
        model,
        (p, q, f64::NAN),
        series.len(),
        0,
        fit.slope,
        expected,
        ConstantPolicy::Equality { tol },
    );
    rep.extras.insert("intercept".into(), fit.intercept);
    rep.extras.insert("max_residual".into(), fit.max_residual);
    out.reports.push(rep);
    out.artifacts.push((format!("{id}.csv"), slope_report_csv(series, &fit)));
    Ok(fit.intercept)
}

fn run_spectral(model: &Arc<GroupModel>, q: &SpectralQuantity, out: &mut RunOutcome) -> Result<()> {
    let label = model.label();
    match q {
        SpectralQuantity::Counting { levels } => {
            let l = spectral_data_for(model)?;
            let mut rows = Vec::new();
            for &s in levels {
                let count = spectral_counting(&l, s);
                let law = l.tail_law().map(|t| t.count(s));
                let mut rep = VerificationReport::new(
                    "spectral_count",
                    label.clone(),
                    (f64::NAN, f64::NAN, s),
                    1,
                    0,
                    count,
                    law.unwrap_or(count),
                    ConstantPolicy::Stability,
                );
                if law.is_none() {
                    rep.notes.push("no tail law: rhs repeats the count".into());
                }
                out.reports.push(rep);
                rows.push(vec![s, count]);
            }
            out.artifacts.push((
                "series.tsv".into(),
                series_tsv("tau(E_(0,s)) on the model spectrum", &["s", "count"], &rows),
            ));
        }
        SpectralQuantity::HeisenbergTrace { levels } => {
            let l = SpectralData::heisenberg(model.clone())?;
            let n = model.heisenberg().expect("checked").n;
            let (lo, hi) = l.validity();
            for &s in levels {
                if s < lo || s > hi / 2.0 {
                    let w = format!("level s = {s} outside the valid window [{lo}, {}]; skipped", hi / 2.0);
                    out.warnings.push(w);
                    continue;
                }
                out.reports.push(VerificationReport::new(
                    "heisenberg_trace",
                    label.clone(),
                    (f64::NAN, f64::NAN, s),
                    1,
                    0,
                    spectral_counting(&l, s),
                    heisenberg_trace_exact(n, s),
                    ConstantPolicy::Equality { tol: 0.01 },
                ));
            }
        }
        SpectralQuantity::Rockland { n, j, grid, k, levels } => {
            let counts = rockland_counts(*n, *j, grid, *k, levels)?;
            let series: Vec<(f64, f64)> = levels.iter().copied().zip(counts).collect();
            let q = 2.0 * *n as f64 + 2.0;
            fit_report("rockland_exponent", format!("H^{n}(K={k})"), NO_PQ, &series, q / (2.0 * *j as f64), 0.02, out)?;
        }
        SpectralQuantity::Homogeneous { degree, levels } => {
            let series: Vec<(f64, f64)> = levels
                .iter()
                .map(|&s| Ok((s, homogeneous_symbol_trace(model, |r| r.powf(*degree), s)?)))
                .collect::<Result<_>>()?;
            let n = model.topo_dim() as f64;
            let intercept = fit_report("homogeneous_exponent", label.clone(), NO_PQ, &series, n / degree, 0.02, out)?;
            out.reports.push(VerificationReport::new(
                "homogeneous_constant",
                label,
                (f64::NAN, f64::NAN, *degree),
                series.len(),
                0,
                intercept.exp(),
                unit_ball_volume(model.topo_dim()),
                ConstantPolicy::Equality { tol: 0.02 },
            ));
        }
        SpectralQuantity::WeakNorm { phi, r } => {
            let l = spectral_data_for(model)?;
            let a = spectral_weak_norm(&l, |u| phi.eval(u), *r)?;
            let sym = apply_spectral_function(&l, |u| phi.eval(u))?;
            let b = weak_norm(&rearrangement_of_symbol(&sym)?, *r)?;
            let mut rep = VerificationReport::new(
                "spectral_weak_norm",
                label,
                (f64::NAN, f64::NAN, *r),
                1,
                0,
                a.value,
                b,
                ConstantPolicy::Equality { tol: 1e-9 },
            );
            rep.weight = Some(format!("{phi:?}").to_lowercase());
            rep.notes.push(format!("route: {:?}", a.route).to_lowercase());
            out.reports.push(rep);
        }
        SpectralQuantity::Embedding { p, q, gammas } => {
            let l = spectral_data_for(model)?;
            let law = l.tail_law().ok_or_else(|| model.unsupported("embedding without a tail law"))?;
            let inv_r = index_gap(*p, *q);
            let threshold = law.alpha * inv_r;
            for &g in gammas {
                let c = embedding_constant(&l, g, *p, *q)?;
                let mut rep = VerificationReport::new(
                    "embedding",
                    label.clone(),
                    (*p, *q, g),
                    1,
                    0,
                    c,
                    law.c.powf(inv_r),
                    ConstantPolicy::Stability,
                );
                rep.extras.insert("threshold".into(), threshold);
                rep.pass = c.is_finite() == (g >= threshold);
                out.reports.push(rep);
            }
        }
    }
    Ok(())
}

fn run_heat(model: &Arc<GroupModel>, p: f64, q: f64, times: &[f64], out: &mut RunOutcome) -> Result<()> {
    let l = spectral_data_for(model)?;
    let law = l.tail_law().ok_or_else(|| model.unsupported("heat bound without a tail law"))?;
    let inv_r = index_gap(p, q);
    let expected = -law.alpha * inv_r;
    let (_, ceiling) = l.validity();
    let mut closed = Vec::new();
    let mut empirical = Vec::new();
    let mut rows = Vec::new();
    for &t in times {
        let c = heat_decay_bound(&l, t, p, q)?;
        let e = empirical_heat_bound(&l, t, 1.0 / inv_r)?;
        if law.alpha * inv_r / t > ceiling / 2.0 {
            let w = format!("t = {t}: maximiser lies beyond half the spectral ceiling {ceiling}");
            out.warnings.push(w);
        }
        closed.push((t, c));
        empirical.push((t, e));
        rows.push(vec![t, c, e]);
    }
    let label = model.label();
    fit_report("heat_bound_slope", label.clone(), (p, q), &closed, expected, 1e-12, out)?;
    fit_report("heat_decay", label, (p, q), &empirical, expected, 0.03, out)?;
    out.artifacts.push((
        "series.tsv".into(),
        series_tsv(
            "heat decay: closed-form bound and sup_u tau(E_(0,u))^(1/r) e^(-tu) on the data",
            &["t", "closed_form", "empirical"],
            &rows,
        ),
    ));
    Ok(())
}

fn execute_inner(c: &ExperimentConfig, seed: u64) -> Result<RunOutcome> {
    let model = c.model.build()?;
    let mut out = RunOutcome::default();
    match &c.experiment {
        Experiment::Transform => run_transform(&model, c, seed, &mut out)?,
        Experiment::Verify { check } => {
            out.reports.push(run_check(&model, check, c.strategy, c.trials, seed)?);
        }
        Experiment::Scan { ladder, check } => {
            let scan = scan_constant_stability(&c.model, ladder, check, c.strategy, c.trials, seed)?;
            out.reports.extend(scan.reports);
            out.reports.push(scan.summary);
            out.warnings.extend(scan.warning);
            out.artifacts.push(("scan.tsv".into(), scan_tsv(&scan.rows)));
        }
        Experiment::Spectral { quantity } => run_spectral(&model, quantity, &mut out)?,
        Experiment::Heat { p, q, times } => run_heat(&model, *p, *q, times, &mut out)?,
    }
    Ok(out)
}

/// Validates and runs a parsed config on a pool of `opts.workers` threads.
pub fn execute(c: &ExperimentConfig, text: &str, opts: &RunOptions) -> std::result::Result<RunOutcome, RunError> {
    validate_config(c, text, opts).map_err(RunError::Config)?;
    let seed = opts.seed.or(c.seed).unwrap_or(0);
    let run = || execute_inner(c, seed);
    let res = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| RunError::Config(ConfigError { line: None, column: None, message: e.to_string() }))?
            .install(run),
        None => run(),
    };
    res.map_err(|e| match e {
        LabError::Io(_) => RunError::Lab(e),
        other => RunError::Config(anchored(text, &["model"], other.to_string())),
    })
}

/// Loads, runs and writes one experiment. Returns the process exit code:
/// 0 all reports pass, 1 a verifier failed or output could not be written,
/// 2 usage or configuration error.
pub fn run_config(path: &Path, opts: &RunOptions, require_scan: bool) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return 2;
        }
    };
    let config = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return 2;
        }
    };
    if require_scan && !matches!(config.experiment, Experiment::Scan { .. }) {
        eprintln!("{}: `scan` needs an experiment of kind \"scan\"", path.display());
        return 2;
    }
    let outcome = match execute(&config, &text, opts) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return e.exit_code();
        }
    };
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    if let Err(e) = write_outcome(&config, &outcome, opts) {
        eprintln!("error: {e}");
        return 1;
    }
    for r in outcome.reports.iter().filter(|r| !r.pass) {
        eprintln!("FAIL {} on {}: lhs {} rhs {} ratio {}", r.inequality_id, r.model, fmt_num(r.lhs), fmt_num(r.rhs), fmt_num(r.ratio));
    }
    outcome.exit_code()
}

/// Writes `report.{csv,json}` and artifacts into the output directory.
pub fn write_outcome(c: &ExperimentConfig, outcome: &RunOutcome, opts: &RunOptions) -> Result<PathBuf> {
    let dir = opts
        .out_dir
        .clone()
        .or_else(|| c.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let format = opts.format.or(c.output.format).unwrap_or_default();
    std::fs::create_dir_all(&dir)?;
    let name = match format {
        ReportFormat::Csv => "report.csv",
        ReportFormat::Json => "report.json",
    };
    let path = dir.join(name);
    emit_report(&outcome.reports, format, &path)?;
    for (file, body) in &outcome.artifacts {
        std::fs::write(dir.join(file), body)?;
    }
    Ok(path)
}
