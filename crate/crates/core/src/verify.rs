//! Cross-checks: Schrödinger residuals of closed-form wavefunctions,
//! closed-form levels against numerical spectra, figure datasets and a
//! combined suite.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{
    count_report, integrability_exponents, level_normalizable, normalizable, physical_boundary_check,
    endpoint_classification, enumerate_levels,
};
use crate::config::{TopConfig, TopKind};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::hyper::{scan_eta_hyper, DEFAULT_N_BASIS};
use crate::io::{Field, Format, Table};
use crate::qhj::qmf::{circle_samples, riccati_residual, RationalQmf};
use crate::qhj::{
    closed_form_energies, levels_at_condition, qs_eta, qs_table, sub_diagonal, AlgebraicLevel, Sector, Wavefunction,
};
use crate::spectrum::{linear_grid, SpectrumScan};
use crate::trig::{potential_extrema, scan_eta, scan_eta_auto, trig_eigenvalues};

/// Which differential operator a residual is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    /// Trigonometric operator acting on `√sin θ · ψ̂`.
    Trig,
    /// Hyperbolic operator acting on `√sinh θ · ψ̂`.
    Hyper,
    /// Trigonometric operator on ψ̂ itself, with the first-derivative term.
    ThreeDim,
    /// Hyperbolic operator on ψ̂ itself.
    HyperThreeDim,
}

impl OperatorKind {
    pub fn top_kind(self) -> TopKind {
        match self {
            OperatorKind::Trig | OperatorKind::ThreeDim => TopKind::Trig,
            OperatorKind::Hyper | OperatorKind::HyperThreeDim => TopKind::Hyper,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub level_id: String,
    pub operator: OperatorKind,
    pub max_residual: f64,
    pub grid: Vec<f64>,
}

/// `n` Chebyshev points on [a, b].
pub fn chebyshev_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let x = (std::f64::consts::PI * (k as f64 + 0.5) / n as f64).cos();
            0.5 * (a + b) - 0.5 * (b - a) * x
        })
        .collect()
}

/// 64 points on [0.05, π − 0.05].
pub fn trig_grid() -> Vec<f64> {
    chebyshev_grid(0.05, std::f64::consts::PI - 0.05, 64)
}

/// 64 points on [0.05, 6].
pub fn hyper_grid() -> Vec<f64> {
    chebyshev_grid(0.05, 6.0, 64)
}

pub fn default_grid(op: OperatorKind) -> Vec<f64> {
    match op.top_kind() {
        TopKind::Trig => trig_grid(),
        TopKind::Hyper => hyper_grid(),
    }
}

/// Relative residual of `(H − E)ψ` at one angle, with ψ evaluated through
/// the analytic seed-reduced derivatives so nothing overflows.
fn residual_at(psi: &Wavefunction, energy: Complex64, config: &TopConfig, op: OperatorKind, theta: f64) -> f64 {
    let r = psi.reduced(theta);
    let (b, k, m) = (config.b, config.kf(), config.mf());
    let (eta, zeta, rho) = (config.eta, config.zeta, config.rho);
    let mk2 = m * m + k * k;
    let terms: [Complex64; 5] = match op {
        OperatorKind::ThreeDim => {
            let (s, c) = (theta.sin(), theta.cos());
            [
                -b * r.second,
                -b * c / s * r.first,
                b * (mk2 / (s * s) - 2.0 * m * k * c / (s * s) - rho * k * k) * r.value,
                (-eta * c - zeta * c * c) * r.value,
                -energy * r.value,
            ]
        }
        OperatorKind::HyperThreeDim => {
            let (s, c) = (theta.sinh(), theta.cosh());
            [
                -b * r.second,
                -b * c / s * r.first,
                b * (mk2 / (s * s) - 2.0 * m * k * c / (s * s) + rho * k * k) * r.value,
                (eta * c + zeta * c * c) * r.value,
                -energy * r.value,
            ]
        }
        OperatorKind::Trig => {
            let (s, c) = (theta.sin(), theta.cos());
            let cot = c / s;
            let (g1, g2) = (cot / 2.0, -0.25 * cot * cot - 0.5);
            let second = g2 * r.value + 2.0 * g1 * r.first + r.second;
            [
                -b * second,
                Complex64::new(0.0, 0.0),
                b * ((mk2 - 0.25) / (s * s) - 2.0 * m * k * c / (s * s) - rho * k * k - 0.25) * r.value,
                (-eta * c - zeta * c * c) * r.value,
                -energy * r.value,
            ]
        }
        OperatorKind::Hyper => {
            let (s, c) = (theta.sinh(), theta.cosh());
            let coth = c / s;
            let (g1, g2) = (coth / 2.0, -0.25 * coth * coth + 0.5);
            let second = g2 * r.value + 2.0 * g1 * r.first + r.second;
            [
                -b * second,
                Complex64::new(0.0, 0.0),
                b * ((mk2 - 0.25) / (s * s) - 2.0 * m * k * c / (s * s) + rho * k * k + 0.25) * r.value,
                (eta * c + zeta * c * c) * r.value,
                -energy * r.value,
            ]
        }
    };
    let sum: Complex64 = terms.iter().sum();
    let size: f64 = terms.iter().map(|t| t.norm()).sum();
    let denom = (energy.norm().max(1.0) * r.value.norm()).max(1e-6 * size);
    if denom == 0.0 {
        0.0
    } else {
        sum.norm() / denom
    }
}

/// Maximum relative residual of `(H − E)ψ` over the grid.
///
/// The wavefunction is re-read as the operator's kind, so passing a
/// trigonometric level with a hyperbolic operator applies the cos → cosh map.
/// Each point is scaled by `max(|E|, 1)·|ψ|`, floored at 1e-6 of the summed
/// term moduli so a node of ψ on the grid does not divide by zero.
pub fn schrodinger_residual(
    psi: &Wavefunction,
    energy: Complex64,
    config: &TopConfig,
    op: OperatorKind,
    grid: &[f64],
) -> ResidualReport {
    let mut w = psi.clone();
    w.kind = op.top_kind();
    let max_residual = grid.iter().map(|&t| residual_at(&w, energy, config, op, t)).fold(0.0, f64::max);
    ResidualReport { level_id: String::new(), operator: op, max_residual, grid: grid.to_vec() }
}

/// Residual of a closed-form level in its own kind, gauged form.
pub fn level_residual(level: &AlgebraicLevel) -> ResidualReport {
    let op = match level.kind {
        TopKind::Trig => OperatorKind::Trig,
        TopKind::Hyper => OperatorKind::Hyper,
    };
    let mut r = schrodinger_residual(&level.wavefunction(), level.energy, &level.config, op, &default_grid(op));
    r.level_id = level.id();
    r
}

/// One closed-form level next to the numerical spectrum at its η.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub id: String,
    pub sector: Sector,
    pub n: usize,
    pub i: usize,
    pub eta: f64,
    pub kappa: f64,
    pub algebraic: Complex64,
    pub nearest: f64,
    pub gap: f64,
    pub normalizable: bool,
    /// Gap below the tolerance for normalizable levels; always true otherwise.
    pub passed: bool,
}

/// Gap tolerance by kind.
pub fn match_tolerance(kind: TopKind) -> f64 {
    match kind {
        TopKind::Trig => 1e-6,
        TopKind::Hyper => 1e-4,
    }
}

/// Compare each level with the nearest eigenvalue of the scan row at its η.
/// Levels must be of the scan's kind (hyperbolic levels carry −E_t).
pub fn match_qs_points(scan: &SpectrumScan, levels: &[AlgebraicLevel]) -> Result<Vec<MatchReport>> {
    let tol = match_tolerance(scan.kind);
    let mut out = Vec::with_capacity(levels.len());
    for lvl in levels {
        if lvl.kind != scan.kind {
            return Err(Error::Precondition(format!("level {} is {} but the scan is {}", lvl.id(), lvl.kind, scan.kind)));
        }
        let eta = lvl.config.eta;
        let row = scan
            .find_eta(eta)
            .ok_or_else(|| Error::Precondition(format!("eta = {eta} of level {} is not a grid point of the scan", lvl.id())))?;
        let target = lvl.energy.re;
        let nearest = scan.curves[row]
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
            .unwrap_or(f64::NAN);
        let gap = (lvl.energy - nearest).norm() / lvl.energy.norm().max(1.0);
        let normal = level_normalizable(lvl);
        out.push(MatchReport {
            id: lvl.id(),
            sector: lvl.sector,
            n: lvl.n,
            i: lvl.i,
            eta,
            kappa: lvl.kappa(),
            algebraic: lvl.energy,
            nearest,
            gap,
            normalizable: normal,
            passed: !normal || gap < tol,
        });
    }
    Ok(out)
}

/// Sorted distinct η values of a set of levels.
pub fn level_etas(levels: &[AlgebraicLevel]) -> Vec<f64> {
    let mut etas: Vec<f64> = levels.iter().map(|l| l.config.eta).collect();
    etas.sort_by(f64::total_cmp);
    etas.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    etas
}

/// Parameters behind a figure id. Ids of the wavefunction panels map to the
/// parameters of the spectrum they accompany.
pub fn figure_config(fig_id: u32) -> Result<TopConfig> {
    let (k, m) = match fig_id {
        2 => (HalfInt::from_int(1), HalfInt::from_int(2)),
        3 | 6 => (HalfInt::from_int(1), HalfInt::from_int(1)),
        4 => (HalfInt::from_int(0), HalfInt::from_int(1)),
        5 | 8 => (HalfInt::ZERO, HalfInt::from_twice(1)),
        _ => return Err(Error::Domain(format!("no figure with id {fig_id}; expected 2, 3, 4, 5, 6 or 8"))),
    };
    Ok(TopConfig::new(k, m, 0.0, 25.0))
}

/// κ range and step of the figure datasets.
pub const FIGURE_KAPPA: (f64, f64, f64) = (-12.0, 12.0, 0.25);
/// Levels per η written to the curve files.
pub const FIGURE_LEVELS: usize = 12;

/// The four tables behind a figure.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureTables {
    pub trig: Table,
    pub hyper: Table,
    pub extrema: Table,
    pub markers: Table,
}

const FIGURE_HEADER: [&str; 7] = ["eta", "kappa", "series", "level_or_sector", "value", "flag", "color"];

fn curve_table(scan: &SpectrumScan, series: &str, color: &str) -> Table {
    let mut t = Table::new(FIGURE_HEADER);
    for (row, &eta) in scan.eta_grid.iter().enumerate() {
        for (level, &v) in scan.curves[row].iter().enumerate() {
            t.push(vec![
                eta.into(),
                scan.kappa(row).into(),
                series.into(),
                level.into(),
                v.into(),
                (if scan.converged[row] { "converged" } else { "unconverged" }).into(),
                color.into(),
            ]);
        }
    }
    t
}

/// Compute figure datasets without touching the file system.
pub fn figure_tables(fig_id: u32) -> Result<FigureTables> {
    let config = figure_config(fig_id)?;
    let root = (config.b * config.zeta).sqrt();
    let (lo, hi, step) = FIGURE_KAPPA;
    let etas: Vec<f64> = linear_grid(lo, hi, step).into_iter().map(|k| k * root).collect();
    let trig = scan_eta_auto(&config, &etas, FIGURE_LEVELS)?;
    let hyper = scan_eta_hyper(&config, &etas, DEFAULT_N_BASIS, FIGURE_LEVELS)?;

    let mut extrema = Table::new(FIGURE_HEADER);
    for &eta in &etas {
        let c = config.with_eta(eta);
        for (j, e) in potential_extrema(&c).iter().enumerate() {
            extrema.push(vec![
                eta.into(),
                c.kappa().into(),
                (if e.is_minimum { "minimum" } else { "maximum" }).into(),
                j.into(),
                e.value.into(),
                e.theta.into(),
                "".into(),
            ]);
        }
    }

    let mut markers = Table::new(FIGURE_HEADER);
    for kind in [TopKind::Trig, TopKind::Hyper] {
        for lvl in enumerate_levels(&config, 3, kind)? {
            if lvl.kappa().abs() > hi + 1e-9 {
                continue;
            }
            let flag = if !lvl.is_real() {
                "complex"
            } else if level_normalizable(&lvl) {
                "normalizable"
            } else {
                "non-normalizable"
            };
            markers.push(vec![
                lvl.config.eta.into(),
                lvl.kappa().into(),
                kind.as_str().into(),
                lvl.id().into(),
                lvl.energy.re.into(),
                flag.into(),
                lvl.sector.color().into(),
            ]);
        }
    }
    Ok(FigureTables {
        trig: curve_table(&trig, "trig", "blue"),
        hyper: curve_table(&hyper, "hyper", "orange"),
        extrema,
        markers,
    })
}

/// Write trig.csv, hyper.csv, extrema.csv and markers.csv into `out_dir`.
pub fn reproduce_figure(fig_id: u32, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let tables = figure_tables(fig_id)?;
    std::fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    for (name, t) in [
        ("trig.csv", &tables.trig),
        ("hyper.csv", &tables.hyper),
        ("extrema.csv", &tables.extrema),
        ("markers.csv", &tables.markers),
    ] {
        let path = out_dir.join(name);
        t.write_path(&path, Format::Csv)?;
        files.push(path);
    }
    Ok(files)
}

/// Outcome of one check in the suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, ok: bool, detail: String) -> Self {
        CheckResult { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail }
    }

    fn skip(name: &str, detail: String) -> Self {
        CheckResult { name: name.into(), status: Status::Skip, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: TopConfig,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["check", "status", "detail"]);
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Skip => "skip",
            };
            t.push(vec![c.name.clone().into(), status.into(), c.detail.clone().into()]);
        }
        t
    }
}

/// Truncations used by [`run_all`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub n_max: usize,
    pub jmax: u32,
    pub n_basis: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { n_max: 3, jmax: 60, n_basis: DEFAULT_N_BASIS }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn check_closed_forms(config: &TopConfig) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for sector in Sector::ALL {
        for n in 0..=1 {
            let levels = levels_at_condition(sector, config, n)?;
            let exact = closed_form_energies(sector, &levels[0].config, n)?;
            for (l, e) in levels.iter().zip(&exact) {
                worst = worst.max(rel(l.energy, *e));
            }
        }
    }
    Ok(CheckResult::new("closed_forms", worst < 1e-10, format!("max relative deviation {worst:.3e}")))
}

fn check_riccati(config: &TopConfig) -> Result<CheckResult> {
    let samples = circle_samples(32);
    let mut worst: f64 = 0.0;
    for sector in Sector::ALL {
        let lvl = &levels_at_condition(sector, config, 0)?[0];
        worst = worst.max(riccati_residual(sector, &lvl.config, lvl.energy.re, &samples));
    }
    Ok(CheckResult::new("riccati", worst < 1e-9, format!("max residual {worst:.3e} at 32 points")))
}

fn check_quantization(config: &TopConfig, n_max: usize) -> CheckResult {
    let mut worst: f64 = 0.0;
    for sector in Sector::ALL {
        for n in 0..=n_max {
            let c = config.with_eta(qs_eta(sector, n, config));
            let sum = RationalQmf::new(sector, &c).quantization_sum();
            worst = worst.max((sum - config.b.sqrt() * n as f64).abs());
        }
    }
    CheckResult::new("quantization", worst < 1e-12, format!("max |sum − √B·n| {worst:.3e}"))
}

fn check_decoupling(config: &TopConfig, n_max: usize) -> CheckResult {
    let mut worst_on: f64 = 0.0;
    let mut smallest_off = f64::INFINITY;
    for sector in Sector::ALL {
        for n in 0..=n_max {
            let eta = qs_eta(sector, n, config);
            let on = sub_diagonal(sector, &config.with_eta(eta), n + 1);
            let off = sub_diagonal(sector, &config.with_eta(eta + 0.5), n + 1);
            worst_on = worst_on.max(on.abs() / eta.abs().max(1.0));
            smallest_off = smallest_off.min(off.abs());
        }
    }
    CheckResult::new(
        "decoupling",
        worst_on < 1e-12 && smallest_off > 1e-12,
        format!("on condition {worst_on:.3e}, off condition at least {smallest_off:.3e}"),
    )
}

fn check_residuals(config: &TopConfig, n_max: usize) -> Result<CheckResult> {
    let mut levels = enumerate_levels(config, n_max, TopKind::Trig)?;
    levels.extend(enumerate_levels(config, n_max, TopKind::Hyper)?);
    let worst = levels.par_iter().map(|l| level_residual(l).max_residual).reduce(|| 0.0, f64::max);
    Ok(CheckResult::new(
        "residuals",
        worst < 1e-8,
        format!("{} trig and hyperbolic levels, max residual {worst:.3e}", levels.len()),
    ))
}

fn check_match(config: &TopConfig, kind: TopKind, opts: &SuiteOptions) -> Result<CheckResult> {
    let name = match kind {
        TopKind::Trig => "trig_match",
        TopKind::Hyper => "hyper_match",
    };
    let levels = enumerate_levels(config, opts.n_max, kind)?;
    let etas = level_etas(&levels);
    let scan = match kind {
        TopKind::Trig => {
            let count = trig_eigenvalues(&config.with_eta(0.0), opts.jmax, 1).map(|_| 40)?;
            scan_eta(config, &etas, opts.jmax, count)
        }
        TopKind::Hyper => scan_eta_hyper(config, &etas, opts.n_basis, opts.n_basis),
    };
    let scan = match scan {
        Ok(s) => s,
        Err(Error::Unsupported(msg)) => return Ok(CheckResult::skip(name, msg)),
        Err(e) => return Err(e),
    };
    let reports = match_qs_points(&scan, &levels)?;
    let normal: Vec<&MatchReport> = reports.iter().filter(|r| r.normalizable).collect();
    let failed = normal.iter().filter(|r| !r.passed).count();
    let worst = normal.iter().map(|r| r.gap).fold(0.0, f64::max);
    Ok(CheckResult::new(
        name,
        failed == 0,
        format!("{} normalizable levels, {failed} unmatched, max gap {worst:.3e}", normal.len()),
    ))
}

fn check_counting(config: &TopConfig, n_max: usize) -> Result<CheckResult> {
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in [TopKind::Trig, TopKind::Hyper] {
        match count_report(config, n_max, kind) {
            Ok(r) => {
                ok &= r.formula == r.enumerated;
                parts.push(format!("{kind}: formula {} enumerated {}", r.formula, r.enumerated));
            }
            Err(Error::Unsupported(msg)) => return Ok(CheckResult::skip("counting", msg)),
            Err(e) => return Err(e),
        }
    }
    Ok(CheckResult::new("counting", ok, parts.join("; ")))
}

/// Per-sector spacing 2√(Bζ); for K = 0, M = ±1/2 the union of one branch's
/// sectors is spaced by √(Bζ).
pub fn kappa_spacing_ok(config: &TopConfig, n_max: usize) -> bool {
    let unit = (config.b * config.zeta).sqrt();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    let table = qs_table(config, n_max);
    let per_sector = Sector::ALL.iter().all(|&s| {
        let etas: Vec<f64> = table.iter().filter(|q| q.sector == s).map(|q| q.eta).collect();
        etas.windows(2).all(|w| close((w[1] - w[0]).abs(), 2.0 * unit))
    });
    if config.k.twice() == 0 && config.m.twice().abs() == 1 {
        let union_ok = [1.0, -1.0].iter().all(|&sign| {
            let mut etas: Vec<f64> = table.iter().filter(|q| q.sector.sign() == sign).map(|q| q.eta.abs()).collect();
            etas.sort_by(f64::total_cmp);
            etas.dedup_by(|a, b| close(*a, *b));
            etas.windows(2).all(|w| close(w[1] - w[0], unit))
        });
        return per_sector && union_ok;
    }
    per_sector
}

fn check_classification(config: &TopConfig) -> Result<CheckResult> {
    let mut ok = true;
    for k in -3..=3 {
        for m in -3..=3 {
            for s in Sector::ALL {
                ok &= normalizable(s, k as f64, m as f64, TopKind::Trig)
                    == integrability_exponents(s, k as f64, m as f64).integrable();
            }
        }
    }
    let (k, m) = (config.kf(), config.mf());
    for s in Sector::ALL {
        if normalizable(s, k, m, TopKind::Trig) {
            for n in 0..=3 {
                ok &= levels_at_condition(s, config, n)?.iter().all(level_normalizable);
            }
        }
    }
    // The seed must obey the boundary condition wherever the endpoint is limit-circle.
    let ec = endpoint_classification(k, m, TopKind::Trig);
    for s in Sector::ALL {
        if normalizable(s, k, m, TopKind::Trig) && config.same_parity() {
            let lvl = &levels_at_condition(s, config, 0)?[0];
            ok &= physical_boundary_check(&lvl.wavefunction(), ec).passes;
        }
    }
    Ok(CheckResult::new("classification", ok, format!("endpoints {ec}")))
}

fn check_field_free(config: &TopConfig) -> Result<CheckResult> {
    if !config.same_parity() {
        return Ok(CheckResult::skip("field_free", "planar basis has no J labels".into()));
    }
    let c = config.with_eta(0.0);
    let c = TopConfig { zeta: 0.0, ..c };
    let levels = trig_eigenvalues(&c, 20, 10)?;
    let jmin = c.kf().abs().max(c.mf().abs());
    let worst = levels
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let j = jmin + i as f64;
            (e - (c.b * j * (j + 1.0) - c.b * c.rho * c.kf().powi(2))).abs()
        })
        .fold(0.0, f64::max);
    Ok(CheckResult::new("field_free", worst < 1e-10, format!("max deviation {worst:.3e}")))
}

/// Every invariant suite for one (B, ρ, ζ, K, M).
pub fn run_all(config: &TopConfig, opts: &SuiteOptions) -> Result<SuiteReport> {
    config.validate()?;
    if config.zeta <= 0.0 {
        return Err(Error::Config("verification needs zeta > 0".into()));
    }
    let checks = vec![
        check_closed_forms(config)?,
        check_riccati(config)?,
        check_quantization(config, opts.n_max),
        check_decoupling(config, opts.n_max),
        check_residuals(config, opts.n_max)?,
        check_match(config, TopKind::Trig, opts)?,
        check_match(config, TopKind::Hyper, opts)?,
        check_counting(config, opts.n_max)?,
        CheckResult::new("kappa_spacing", kappa_spacing_ok(config, opts.n_max), String::new()),
        check_classification(config)?,
        check_field_free(config)?,
    ];
    Ok(SuiteReport { config: *config, checks })
}

/// Residual rows for the CLI.
pub fn residual_table(reports: &[ResidualReport]) -> Table {
    let mut t = Table::new(["level", "operator", "max_residual"]);
    for r in reports {
        t.push(vec![r.level_id.clone().into(), format!("{:?}", r.operator).into(), Field::Num(r.max_residual)]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qhj::{algebraic_levels, seed_wavefunction};
    use proptest::prelude::*;

    fn s(label: &str) -> Sector {
        label.parse().unwrap()
    }

    #[test]
    fn seed_residual_and_energy_offset() {
        let c = TopConfig::integer(1, 2, 30.0, 25.0);
        let psi = seed_wavefunction(s("1+"), &c, TopKind::Trig);
        let good = schrodinger_residual(&psi, Complex64::new(-29.0, 0.0), &c, OperatorKind::ThreeDim, &trig_grid());
        assert!(good.max_residual < 1e-8, "{}", good.max_residual);
        let gauged = schrodinger_residual(&psi, Complex64::new(-29.0, 0.0), &c, OperatorKind::Trig, &trig_grid());
        assert!(gauged.max_residual < 1e-8);
        let bad = schrodinger_residual(&psi, Complex64::new(-28.0, 0.0), &c, OperatorKind::ThreeDim, &trig_grid());
        assert!(bad.max_residual > 1e-3);
        assert!((bad.max_residual - 1.0 / 28.0).abs() < 1e-3);
    }

    #[test]
    fn hyperbolic_seed_residual() {
        let c = TopConfig::integer(1, 1, 0.0, 25.0);
        let psi = seed_wavefunction(s("3-"), &c, TopKind::Hyper);
        for op in [OperatorKind::Hyper, OperatorKind::HyperThreeDim] {
            let r = schrodinger_residual(&psi, Complex64::new(35.0, 0.0), &c, op, &hyper_grid());
            assert!(r.max_residual < 1e-8, "{op:?} {}", r.max_residual);
        }
    }

    #[test]
    fn grids_avoid_endpoints() {
        let g = trig_grid();
        assert_eq!(g.len(), 64);
        assert!(g.iter().all(|&t| t > 0.05 && t < std::f64::consts::PI - 0.05));
        assert!(hyper_grid().iter().all(|&t| t > 0.05 && t < 6.0));
    }

    #[test]
    fn empty_level_list_gives_empty_report() {
        let c = TopConfig::integer(1, 2, 0.0, 25.0);
        let scan = scan_eta(&c, &[0.0], 20, 5).unwrap();
        assert!(match_qs_points(&scan, &[]).unwrap().is_empty());
    }

    #[test]
    fn missing_eta_is_a_precondition_error() {
        let c = TopConfig::integer(1, 2, 30.0, 25.0);
        let lvl = algebraic_levels(s("1+"), &c, 0).unwrap();
        let scan = scan_eta(&c, &[29.0], 20, 5).unwrap();
        assert!(matches!(match_qs_points(&scan, &lvl), Err(Error::Precondition(_))));
    }

    #[test]
    fn planar_seeds_are_the_four_gauged_forms() {
        // After the √sin θ gauge: sin θ, cos(θ/2), sin(θ/2) and 1, each times
        // e^{√(ζ/B) cos θ}, up to constant factors.
        let c = TopConfig::new(HalfInt::ZERO, HalfInt::from_twice(1), 0.0, 16.0);
        for t in [0.3f64, 1.4, 2.6] {
            let got: Vec<f64> = ["1+", "2+", "3+", "4+"]
                .iter()
                .map(|l| t.sin().sqrt() * seed_wavefunction(s(l), &c, TopKind::Trig).eval(t).re / (4.0 * t.cos()).exp())
                .collect();
            let r2 = 2f64.sqrt();
            let expect = [t.sin() / r2, r2 * (t / 2.0).cos(), r2 * (t / 2.0).sin(), r2];
            for (g, e) in got.iter().zip(&expect) {
                assert!((g - e).abs() < 1e-12, "{got:?} {expect:?}");
            }
        }
    }

    #[test]
    fn kappa_spacing_examples() {
        assert!(kappa_spacing_ok(&TopConfig::integer(1, 2, 0.0, 25.0).with_b(2.0), 3));
        assert!(kappa_spacing_ok(&TopConfig::new(HalfInt::ZERO, HalfInt::from_twice(1), 0.0, 9.0), 3));
    }

    #[test]
    fn figure_two_markers() {
        let t = figure_tables(2).unwrap();
        let kc = t.markers.column("kappa").unwrap();
        let lc = t.markers.column("level_or_sector").unwrap();
        let sc = t.markers.column("series").unwrap();
        let mut kappas: Vec<i64> = t
            .markers
            .rows
            .iter()
            .filter(|r| r[sc] == Field::from("trig") && r[lc].to_string().starts_with("1+"))
            .map(|r| r[kc].as_f64().unwrap().round() as i64)
            .collect();
        kappas.dedup();
        assert_eq!(kappas, vec![6, 8, 10, 12]);
        assert!(!t.extrema.is_empty());
        assert_eq!(t.trig.len(), 97 * FIGURE_LEVELS);
    }

    #[test]
    fn unknown_figure_is_rejected() {
        assert!(figure_config(7).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn closed_form_levels_solve_both_operators(
            k in -3i32..=3, m in -3i32..=3,
            b in 0.3f64..3.0, rho in -1.0f64..1.0, zeta in 0.5f64..40.0,
            family in 1u8..=4, plus in any::<bool>(), n in 0usize..=1,
        ) {
            let branch = if plus { crate::qhj::Branch::Plus } else { crate::qhj::Branch::Minus };
            let sector = Sector::new(family, branch).unwrap();
            let c = TopConfig::integer(k, m, 0.0, zeta).with_b(b).with_rho(rho);
            for lvl in levels_at_condition(sector, &c, n).unwrap() {
                let r = level_residual(&lvl);
                prop_assert!(r.max_residual < 1e-8, "{} {}", lvl.id(), r.max_residual);
                let h = crate::qhj::anti_isospectral_pair(&lvl).unwrap();
                let rh = level_residual(&h);
                prop_assert!(rh.max_residual < 1e-8, "{} hyper {}", lvl.id(), rh.max_residual);
            }
        }
    }
}
