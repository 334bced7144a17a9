//! Trigonometric top in the truncated symmetric-top basis.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{cos2_element, cos_element, BasisState};
use crate::config::{TopConfig, TopKind};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::spectrum::SpectrumScan;

/// Symmetric matrix stored by diagonals: `bands[d−1][i] = A[i][i+d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandedSymmetric {
    pub diag: Vec<f64>,
    pub bands: Vec<Vec<f64>>,
}

impl BandedSymmetric {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        match hi - lo {
            0 => self.diag[lo],
            d if d <= self.bands.len() => self.bands[d - 1][lo],
            _ => 0.0,
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag));
        for (d, band) in self.bands.iter().enumerate() {
            for (i, &v) in band.iter().enumerate() {
                a[(i, i + d + 1)] = v;
                a[(i + d + 1, i)] = v;
            }
        }
        debug_assert_eq!(a.nrows(), n);
        a
    }

    /// Leading principal block of size `dim`.
    pub fn truncate(&self, dim: usize) -> BandedSymmetric {
        BandedSymmetric {
            diag: self.diag[..dim].to_vec(),
            bands: self.bands.iter().enumerate().map(|(d, b)| b[..dim.saturating_sub(d + 1)].to_vec()).collect(),
        }
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.dim() == 0 {
            return Ok(Vec::new());
        }
        let eig = SymmetricEigen::try_new(self.to_dense(), f64::EPSILON, 0)
            .ok_or_else(|| Error::Eigen(format!("symmetric QR did not converge for a {0}x{0} matrix", self.dim())))?;
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Eigen("non-finite eigenvalue".into()));
        }
        v.sort_by(f64::total_cmp);
        Ok(v)
    }
}

/// Basis used for one trigonometric Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum TrigBasis {
    /// `|J K M⟩` for J = jmin, jmin+1, …, in that order.
    SymmetricTop { jmin: HalfInt, dim: usize },
    /// `e^{imθ/2}` on [0, 2π) for |m| ≤ 2L, even m first, then odd m; used
    /// for the planar case K = 0, M = ±1/2.
    Fourier { l_max: usize },
}

/// Matrix elements of cos θ and cos²θ depending only on (K, M, truncation).
#[derive(Clone, Debug)]
pub struct AngularBands {
    pub k: HalfInt,
    pub m: HalfInt,
    pub jmin: HalfInt,
    pub cos: BandedSymmetric,
    pub cos2: BandedSymmetric,
}

impl AngularBands {
    pub fn new(k: HalfInt, m: HalfInt, dim: usize) -> Self {
        let jmin = HalfInt::from_twice(k.twice().abs().max(m.twice().abs()));
        let state = |i: usize| BasisState::new(HalfInt::from_twice(jmin.twice() + 2 * i as i32), k, m);
        let elements: Vec<_> = (0..dim)
            .into_par_iter()
            .map(|i| {
                let s = state(i);
                let c = [0, 1, 2].map(|d| if i + d < dim { cos_element(s, state(i + d)) } else { 0.0 });
                let c2 = [0, 1, 2].map(|d| if i + d < dim { cos2_element(s, state(i + d)) } else { 0.0 });
                (c, c2)
            })
            .collect();
        let band = |src: &dyn Fn(usize) -> [f64; 3], bw: usize| BandedSymmetric {
            diag: (0..dim).map(|i| src(i)[0]).collect(),
            bands: (1..=bw).map(|d| (0..dim.saturating_sub(d)).map(|i| src(i)[d]).collect()).collect(),
        };
        AngularBands {
            k,
            m,
            jmin,
            cos: band(&|i| elements[i].0, 2),
            cos2: band(&|i| elements[i].1, 2),
        }
    }

    pub fn dim(&self) -> usize {
        self.cos.dim()
    }
}

fn is_planar(config: &TopConfig) -> bool {
    config.k.twice() == 0 && config.m.twice().abs() == 1
}

fn jmin(config: &TopConfig) -> HalfInt {
    HalfInt::from_twice(config.k.twice().abs().max(config.m.twice().abs()))
}

/// Dimension of the symmetric-top basis with J ≤ jmax.
fn basis_dim(config: &TopConfig, jmax: u32) -> Result<usize> {
    let lo = jmin(config);
    if (2 * jmax as i32) < lo.twice() {
        return Err(Error::Domain(format!("jmax = {jmax} is below max(|K|, |M|) = {lo}")));
    }
    Ok(((2 * jmax as i32 - lo.twice()) / 2) as usize + 1)
}

/// Default truncation: max(|K|, |M|) + 50.
pub fn default_jmax(config: &TopConfig) -> u32 {
    (jmin(config).twice() / 2) as u32 + 50
}

fn check_supported(config: &TopConfig) -> Result<()> {
    config.validate()?;
    if !config.same_parity() && !is_planar(config) {
        return Err(Error::Unsupported(format!(
            "K = {} and M = {} mix integer and half-integer values; only K = 0, M = ±1/2 is supported",
            config.k, config.m
        )));
    }
    Ok(())
}

/// The planar pendulum on [0, 2π) in the `e^{imθ/2}` basis.
fn planar_hamiltonian(config: &TopConfig, l_max: usize) -> BandedSymmetric {
    let b = config.b;
    let ms: Vec<i64> = (-2 * l_max as i64..=2 * l_max as i64).filter(|m| m % 2 == 0).chain(
        (-2 * l_max as i64..=2 * l_max as i64).filter(|m| m % 2 != 0),
    )
    .collect();
    let n = ms.len();
    let diag = ms.iter().map(|&m| b * (m * m) as f64 / 4.0 - b / 4.0 - config.zeta / 2.0).collect();
    let coupling = |d: usize, step: i64, v: f64| -> Vec<f64> {
        (0..n.saturating_sub(d)).map(|i| if ms[i + d] - ms[i] == step { v } else { 0.0 }).collect()
    };
    BandedSymmetric { diag, bands: vec![coupling(1, 2, -config.eta / 2.0), coupling(2, 4, -config.zeta / 4.0)] }
}

/// Assemble from cached angular bands.
pub fn hamiltonian_from_bands(config: &TopConfig, bands: &AngularBands, dim: usize) -> BandedSymmetric {
    let (b, k) = (config.b, config.kf());
    let cos = bands.cos.truncate(dim);
    let cos2 = bands.cos2.truncate(dim);
    let diag = (0..dim)
        .map(|i| {
            let j = bands.jmin.value() + i as f64;
            b * j * (j + 1.0) - b * config.rho * k * k - config.eta * cos.diag[i] - config.zeta * cos2.diag[i]
        })
        .collect();
    let bands = (0..2)
        .map(|d| cos.bands[d].iter().zip(&cos2.bands[d]).map(|(&c, &c2)| -config.eta * c - config.zeta * c2).collect())
        .collect();
    BandedSymmetric { diag, bands }
}

/// Hamiltonian of the trigonometric top, bandwidth 2.
pub fn build_trig_hamiltonian(config: &TopConfig, jmax: u32) -> Result<(BandedSymmetric, TrigBasis)> {
    check_supported(config)?;
    if is_planar(config) {
        let l = jmax as usize;
        return Ok((planar_hamiltonian(config, l), TrigBasis::Fourier { l_max: l }));
    }
    let dim = basis_dim(config, jmax)?;
    let bands = AngularBands::new(config.k, config.m, dim);
    Ok((hamiltonian_from_bands(config, &bands, dim), TrigBasis::SymmetricTop { jmin: jmin(config), dim }))
}

fn lowest(all: Vec<f64>, count: usize) -> Result<Vec<f64>> {
    if count > all.len() {
        return Err(Error::Domain(format!("requested {count} eigenvalues from a matrix of dimension {}", all.len())));
    }
    Ok(all.into_iter().take(count).collect())
}

/// Lowest `count` eigenvalues, ascending.
pub fn trig_eigenvalues(config: &TopConfig, jmax: u32, count: usize) -> Result<Vec<f64>> {
    let (h, _) = build_trig_hamiltonian(config, jmax)?;
    lowest(h.eigenvalues()?, count)
}

/// Truncation increase used for the convergence flag.
pub const CONVERGENCE_STEP: u32 = 10;
/// Largest tolerated level shift when the truncation grows by [`CONVERGENCE_STEP`].
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Reusable context for many η values at fixed (B, ρ, ζ, K, M).
pub struct TrigSolver {
    template: TopConfig,
    jmax: u32,
    bands: Option<AngularBands>,
}

impl TrigSolver {
    pub fn new(template: &TopConfig, jmax: u32) -> Result<Self> {
        check_supported(template)?;
        let bands = if is_planar(template) {
            None
        } else {
            let dim = basis_dim(template, jmax + CONVERGENCE_STEP)?;
            Some(AngularBands::new(template.k, template.m, dim))
        };
        Ok(TrigSolver { template: *template, jmax, bands })
    }

    fn spectrum(&self, eta: f64, jmax: u32) -> Result<Vec<f64>> {
        let c = self.template.with_eta(eta);
        match &self.bands {
            None => planar_hamiltonian(&c, jmax as usize).eigenvalues(),
            Some(bands) => hamiltonian_from_bands(&c, bands, basis_dim(&c, jmax)?).eigenvalues(),
        }
    }

    /// Lowest `count` levels at η and whether they moved by less than
    /// [`CONVERGENCE_TOL`] when the truncation grew.
    pub fn solve(&self, eta: f64, count: usize) -> Result<(Vec<f64>, bool)> {
        let lo = lowest(self.spectrum(eta, self.jmax)?, count)?;
        let hi = lowest(self.spectrum(eta, self.jmax + CONVERGENCE_STEP)?, count)?;
        let converged = lo.iter().zip(&hi).all(|(a, b)| (a - b).abs() < CONVERGENCE_TOL);
        Ok((lo, converged))
    }
}

/// Lowest `count` levels at every η, rows computed in parallel.
pub fn scan_eta(template: &TopConfig, eta_values: &[f64], jmax: u32, count: usize) -> Result<SpectrumScan> {
    if eta_values.is_empty() {
        return Err(Error::Domain("eta grid is empty".into()));
    }
    let solver = TrigSolver::new(template, jmax)?;
    let rows: Vec<_> = eta_values.par_iter().map(|&eta| solver.solve(eta, count)).collect();
    Ok(SpectrumScan::from_rows(TopKind::Trig, template, eta_values, jmax as usize, count, rows))
}

/// As [`scan_eta`] at the default truncation, re-running unconverged rows
/// at max(|K|, |M|) + 100.
pub fn scan_eta_auto(template: &TopConfig, eta_values: &[f64], count: usize) -> Result<SpectrumScan> {
    let jmax = default_jmax(template);
    let mut scan = scan_eta(template, eta_values, jmax, count)?;
    let bad: Vec<usize> = (0..scan.len()).filter(|&i| !scan.converged[i]).collect();
    if !bad.is_empty() {
        let solver = TrigSolver::new(template, jmax + 50)?;
        let redo: Vec<_> = bad.par_iter().map(|&i| solver.solve(eta_values[i], count)).collect();
        for (&i, row) in bad.iter().zip(redo) {
            scan.set_row(i, row);
        }
        scan.truncation = (jmax + 50) as usize;
    }
    Ok(scan)
}

/// Stationary point of the effective potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub theta: f64,
    pub value: f64,
    pub is_minimum: bool,
}

/// Which effective potential to analyse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PotentialForm {
    /// Potential acting on the un-gauged function, with (M² + K²) csc²θ.
    Separated,
    /// Potential after the √sin θ gauge, with (M² + K² − 1/4) csc²θ − B/4.
    Gauged,
}

fn potential_terms(config: &TopConfig, form: PotentialForm) -> (f64, f64) {
    let (k, m) = (config.kf(), config.mf());
    let shift = match form {
        PotentialForm::Separated => 0.0,
        PotentialForm::Gauged => 0.25,
    };
    (m * m + k * k - shift, 2.0 * m * k)
}

/// Effective trigonometric potential.
pub fn potential(config: &TopConfig, form: PotentialForm, theta: f64) -> f64 {
    let (a, c) = potential_terms(config, form);
    let (s, co) = (theta.sin(), theta.cos());
    let constant = match form {
        PotentialForm::Separated => 0.0,
        PotentialForm::Gauged => -0.25,
    };
    let k = config.kf();
    config.b * (a / (s * s) - c * co / (s * s) - config.rho * k * k + constant) - config.eta * co - config.zeta * co * co
}

/// θ-derivative of [`potential`].
pub fn potential_derivative(config: &TopConfig, form: PotentialForm, theta: f64) -> f64 {
    let (a, c) = potential_terms(config, form);
    let (s, co) = (theta.sin(), theta.cos());
    let cot = co / s;
    let csc = 1.0 / s;
    config.b * (-2.0 * a * csc * csc * cot + c * csc * (cot * cot + csc * csc)) + config.eta * s + 2.0 * config.zeta * co * s
}

/// Stationary points on (0, π), by bisection between sign changes of the
/// derivative on a 10⁴-point grid.
pub fn potential_extrema_with(config: &TopConfig, form: PotentialForm) -> Vec<Extremum> {
    let n = 10_000;
    let grid: Vec<f64> = (0..n).map(|j| std::f64::consts::PI * (j as f64 + 0.5) / n as f64).collect();
    let dv = |t: f64| potential_derivative(config, form, t);
    let mut out = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (dv(a), dv(b));
        if fa == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        let rising = fa < 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if (dv(mid) < 0.0) == rising {
                a = mid;
            } else {
                b = mid;
            }
        }
        let theta = 0.5 * (a + b);
        out.push(Extremum { theta, value: potential(config, form, theta), is_minimum: rising });
    }
    out
}

/// Extrema of the separated potential.
pub fn potential_extrema(config: &TopConfig) -> Vec<Extremum> {
    potential_extrema_with(config, PotentialForm::Separated)
}
