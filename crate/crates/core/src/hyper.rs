//! Hyperbolic top by a Galerkin method with a non-orthogonal, exponentially
//! decaying trial basis and an overlap matrix.
//!
//! Everything is written in x = cosh θ. The quadratic form is
//! `∫ [B(x²−1) f_i′ f_j′ + W f_i f_j] μ dx`, and trial functions are
//! `e^{−c(x−1)} ((x−1)/2)^{p/2} ((x+1)/2)^{q/2} L_i^{(λ)}(2c(x−1))` with
//! c = √(ζ/B). Since the basis does not depend on η and H is affine in η,
//! the quadratures are done once per (B, ρ, ζ, K, M).

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{TopConfig, TopKind};
use crate::error::{Error, Result};
use crate::quad::{integrate_vec, QuadOptions};
use crate::spectrum::SpectrumScan;

/// Largest overlap condition number accepted.
pub const MAX_OVERLAP_CONDITION: f64 = 1e12;
/// Basis reduction used for the convergence flag.
pub const CONVERGENCE_STEP: usize = 5;
/// Relative tolerance of the convergence flag.
pub const CONVERGENCE_TOL: f64 = 1e-6;

/// One family of trial functions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GalerkinBasis {
    pub n_basis: usize,
    /// Decay rate c = √(ζ/B) of e^{−c(x−1)}.
    pub decay: f64,
    /// Power of ((x−1)/2)^{1/2}.
    pub p: f64,
    /// Power of ((x+1)/2)^{1/2}.
    pub q: f64,
    /// Laguerre parameter.
    pub lambda: f64,
    /// Measure (x² − 1)^{−1/2} (full-line gauged form) instead of 1.
    pub gauged: bool,
}

impl GalerkinBasis {
    /// Basis families for a configuration: one for equal-parity projections,
    /// an even and an odd family for K = 0, M = ±1/2 on the full line.
    pub fn for_config(config: &TopConfig, n_basis: usize) -> Result<Vec<GalerkinBasis>> {
        config.validate()?;
        if config.zeta <= 0.0 {
            return Err(Error::Domain("the hyperbolic top needs zeta > 0 to confine".into()));
        }
        if n_basis == 0 {
            return Err(Error::Domain("basis size must be positive".into()));
        }
        let decay = (config.zeta / config.b).sqrt();
        if config.same_parity() {
            let p = (config.mf() - config.kf()).abs();
            let q = -(config.mf() + config.kf()).abs();
            return Ok(vec![GalerkinBasis { n_basis, decay, p, q, lambda: p, gauged: false }]);
        }
        if config.k.twice() == 0 && config.m.twice().abs() == 1 {
            return Ok(vec![
                GalerkinBasis { n_basis, decay, p: 0.0, q: 0.0, lambda: -0.5, gauged: true },
                GalerkinBasis { n_basis, decay, p: 1.0, q: 1.0, lambda: 0.5, gauged: true },
            ]);
        }
        Err(Error::Unsupported(format!(
            "K = {} and M = {} mix integer and half-integer values; only K = 0, M = ±1/2 is supported",
            config.k, config.m
        )))
    }

    /// Value of trial function `i` at x.
    pub fn eval(&self, i: usize, x: f64) -> f64 {
        let u = x - 1.0;
        let t = 2.0 * self.decay * u;
        let (l, _) = laguerre(self.n_basis.max(i + 1), self.lambda, t);
        (-self.decay * u).exp() * (u / 2.0).powf(self.p / 2.0) * ((u + 2.0) / 2.0).powf(self.q / 2.0) * l[i]
    }
}

/// `L_k^{(λ)}(t)` and `d/dt L_k^{(λ)}(t)` for k < n.
fn laguerre(n: usize, lambda: f64, t: f64) -> (Vec<f64>, Vec<f64>) {
    let family = |a: f64, len: usize| {
        let mut v = vec![0.0; len];
        if len > 0 {
            v[0] = 1.0;
        }
        if len > 1 {
            v[1] = 1.0 + a - t;
        }
        for k in 1..len.saturating_sub(1) {
            let kf = k as f64;
            v[k + 1] = ((2.0 * kf + 1.0 + a - t) * v[k] - (kf + a) * v[k - 1]) / (kf + 1.0);
        }
        v
    };
    let l = family(lambda, n);
    let shifted = family(lambda + 1.0, n);
    let mut d = vec![0.0; n];
    for k in 1..n {
        d[k] = -shifted[k - 1];
    }
    (l, d)
}

/// η-independent pieces: overlap, H at η = 0, and the matrix of x.
#[derive(Clone, Debug)]
pub struct BlockMatrices {
    pub basis: GalerkinBasis,
    pub overlap: DMatrix<f64>,
    pub base: DMatrix<f64>,
    pub position: DMatrix<f64>,
}

impl BlockMatrices {
    pub fn hamiltonian(&self, eta: f64) -> DMatrix<f64> {
        &self.base + &self.position * eta
    }

    /// Leading `n × n` blocks (the basis is nested in N).
    pub fn leading(&self, n: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        (
            self.overlap.view((0, 0), (n, n)).into_owned(),
            self.base.view((0, 0), (n, n)).into_owned(),
            self.position.view((0, 0), (n, n)).into_owned(),
        )
    }
}

/// Upper limit in s = √t beyond which every integrand is below 1e-20.
fn s_cut(basis: &GalerkinBasis) -> f64 {
    let n = basis.n_basis as f64;
    let log_fact: f64 = (1..=basis.n_basis).map(|k| (k as f64).ln()).sum();
    let power = 2.0 * n + basis.p.max(0.0) + 4.0;
    let bound = |t: f64| -t + power * (1.0 + t).ln() - 2.0 * log_fact;
    let mut t = power.max(10.0);
    while bound(t) > (1e-20f64).ln() {
        t *= 1.1;
    }
    t.sqrt()
}

/// Quadratures for one basis family.
pub fn block_matrices(config: &TopConfig, basis: GalerkinBasis) -> Result<BlockMatrices> {
    let n = basis.n_basis;
    let (b, k, m) = (config.b, config.kf(), config.mf());
    let c = basis.decay;
    let (p, q) = (basis.p, basis.q);
    let pairs = n * (n + 1) / 2;
    let rho_term = b * config.rho * k * k;
    let centrifugal = |u: f64| -> f64 {
        if basis.gauged {
            b * 0.25
        } else {
            b * ((m - k).powi(2) / (u * (u + 2.0)) - 2.0 * m * k / (u + 2.0))
        }
    };
    let integrand = |s: f64, out: &mut [f64]| {
        let t = s * s;
        let u = t / (2.0 * c);
        let x = 1.0 + u;
        let (l, dl) = laguerre(n, basis.lambda, t);
        // (EA)² · μ · dx/ds
        let mut w = (-t).exp() * (u / 2.0).powf(p) * ((u + 2.0) / 2.0).powf(q) * s / c;
        if basis.gauged {
            w /= (u * (u + 2.0)).sqrt();
        }
        if w == 0.0 || !w.is_finite() {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let g = -c + p / (2.0 * u) + q / (2.0 * (u + 2.0));
        let d: Vec<f64> = (0..n).map(|i| g * l[i] + 2.0 * c * dl[i]).collect();
        let pot = centrifugal(u) + rho_term + config.zeta * x * x;
        let kinetic = b * u * (u + 2.0);
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                let ll = w * l[i] * l[j];
                out[idx] = ll;
                out[pairs + idx] = w * kinetic * d[i] * d[j] + pot * ll;
                out[2 * pairs + idx] = x * ll;
                idx += 1;
            }
        }
    };
    let opts = QuadOptions { abs_tol: 1e-12, rel_tol: 1e-12, max_intervals: 4000 };
    let result = integrate_vec(integrand, 0.0, s_cut(&basis), 3 * pairs, opts).map_err(|e| match e {
        Error::Quadrature { index, error } => {
            let (i, j) = pair_index(n, index.0 % pairs);
            Error::Quadrature { index: (i, j), error }
        }
        other => other,
    })?;
    let unpack = |offset: usize| {
        let mut a = DMatrix::zeros(n, n);
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                a[(i, j)] = result.value[offset + idx];
                a[(j, i)] = result.value[offset + idx];
                idx += 1;
            }
        }
        a
    };
    Ok(BlockMatrices { basis, overlap: unpack(0), base: unpack(pairs), position: unpack(2 * pairs) })
}

fn pair_index(n: usize, mut idx: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i;
        if idx < row {
            return (i, i + idx);
        }
        idx -= row;
    }
    (n, n)
}

/// Hamiltonian and overlap matrices at `config.eta`, block-diagonal when the
/// basis has several families.
pub fn build_hyper_matrices(config: &TopConfig, n_basis: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let blocks = GalerkinBasis::for_config(config, n_basis)?
        .into_iter()
        .map(|basis| block_matrices(config, basis))
        .collect::<Result<Vec<_>>>()?;
    let dim: usize = blocks.iter().map(|b| b.basis.n_basis).sum();
    let (mut h, mut o) = (DMatrix::zeros(dim, dim), DMatrix::zeros(dim, dim));
    let mut at = 0;
    for blk in &blocks {
        let nb = blk.basis.n_basis;
        h.view_mut((at, at), (nb, nb)).copy_from(&blk.hamiltonian(config.eta));
        o.view_mut((at, at), (nb, nb)).copy_from(&blk.overlap);
        at += nb;
    }
    Ok((h, o))
}

/// Sorted eigenvalues of a symmetric-definite pencil.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedEigenResult {
    pub eigenvalues: Vec<f64>,
    pub overlap_condition_number: f64,
    pub n_basis_used: usize,
}

/// Solve `H v = λ O v` after Jacobi scaling of O, via Cholesky.
pub fn solve_pencil(h: &DMatrix<f64>, o: &DMatrix<f64>) -> Result<GeneralizedEigenResult> {
    let n = o.nrows();
    if n == 0 {
        return Ok(GeneralizedEigenResult { eigenvalues: vec![], overlap_condition_number: 1.0, n_basis_used: 0 });
    }
    let scale: Vec<f64> = (0..n).map(|i| 1.0 / o[(i, i)].sqrt()).collect();
    if scale.iter().any(|v| !v.is_finite()) {
        return Err(Error::Conditioning { cond: f64::INFINITY, n_basis: n });
    }
    let sym = |a: &DMatrix<f64>| DMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]) * scale[i] * scale[j]);
    let os = sym(o);
    let hs = sym(h);
    let oe = SymmetricEigen::new(os.clone()).eigenvalues;
    let (lo, hi) = oe.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if cond.is_nan() || cond > MAX_OVERLAP_CONDITION {
        return Err(Error::Conditioning { cond, n_basis: n });
    }
    let chol = Cholesky::new(os).ok_or(Error::Conditioning { cond, n_basis: n })?;
    let l = chol.l();
    let y = l.solve_lower_triangular(&hs).ok_or_else(|| Error::Eigen("triangular solve failed".into()))?;
    let c = l
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(|| Error::Eigen("triangular solve failed".into()))?;
    let c = DMatrix::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let eig = SymmetricEigen::try_new(c, f64::EPSILON, 0)
        .ok_or_else(|| Error::Eigen(format!("symmetric QR did not converge (N = {n}, cond(O) = {cond:e})")))?;
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(GeneralizedEigenResult { eigenvalues: ev, overlap_condition_number: cond, n_basis_used: n })
}

/// Reusable η-independent matrices for one (B, ρ, ζ, K, M).
pub struct HyperSolver {
    blocks: Vec<BlockMatrices>,
    n_basis: usize,
}

impl HyperSolver {
    pub fn new(template: &TopConfig, n_basis: usize) -> Result<Self> {
        let bases = GalerkinBasis::for_config(template, n_basis)?;
        let blocks = bases.into_par_iter().map(|b| block_matrices(template, b)).collect::<Result<Vec<_>>>()?;
        Ok(HyperSolver { blocks, n_basis })
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    pub fn blocks(&self) -> &[BlockMatrices] {
        &self.blocks
    }

    /// All eigenvalues from the leading `n` functions of each family.
    pub fn eigenvalues_at(&self, eta: f64, n: usize) -> Result<GeneralizedEigenResult> {
        let mut all = Vec::new();
        let mut cond: f64 = 1.0;
        for blk in &self.blocks {
            let (o, a, x) = blk.leading(n);
            let r = solve_pencil(&(a + x * eta), &o)?;
            cond = cond.max(r.overlap_condition_number);
            all.extend(r.eigenvalues);
        }
        all.sort_by(f64::total_cmp);
        Ok(GeneralizedEigenResult { eigenvalues: all, overlap_condition_number: cond, n_basis_used: n })
    }

    /// Largest basis size not exceeding N whose overlap stays well conditioned.
    pub fn stable_basis_size(&self) -> usize {
        (1..=self.n_basis).rev().find(|&n| self.eigenvalues_at(0.0, n).is_ok()).unwrap_or(0)
    }

    /// Lowest `count` eigenvalues at η and the convergence flag from
    /// comparing with N − 5 functions.
    pub fn solve(&self, eta: f64, count: usize) -> Result<(Vec<f64>, bool)> {
        let full = self.eigenvalues_at(eta, self.n_basis)?;
        if count > full.eigenvalues.len() {
            return Err(Error::Domain(format!("requested {count} eigenvalues from a basis of {}", full.eigenvalues.len())));
        }
        let levels: Vec<f64> = full.eigenvalues[..count].to_vec();
        let converged = if self.n_basis > CONVERGENCE_STEP {
            let small = self.eigenvalues_at(eta, self.n_basis - CONVERGENCE_STEP)?;
            small.eigenvalues.len() >= count
                && levels
                    .iter()
                    .zip(&small.eigenvalues)
                    .all(|(a, b)| (a - b).abs() < CONVERGENCE_TOL * a.abs().max(1.0))
        } else {
            false
        };
        Ok((levels, converged))
    }
}

/// Lowest `count` eigenvalues of the hyperbolic top (operator convention,
/// so algebraic levels appear at −E_t).
pub fn hyper_eigenvalues(config: &TopConfig, n_basis: usize, count: usize) -> Result<GeneralizedEigenResult> {
    if count > n_basis {
        return Err(Error::Domain(format!("count {count} exceeds basis size {n_basis}")));
    }
    let solver = HyperSolver::new(config, n_basis)?;
    let mut r = solver.eigenvalues_at(config.eta, n_basis)?;
    r.eigenvalues.truncate(count);
    Ok(r)
}

/// Default basis size.
pub const DEFAULT_N_BASIS: usize = 20;

/// Lowest `count` levels at every η; quadratures are shared by all rows.
pub fn scan_eta_hyper(template: &TopConfig, eta_values: &[f64], n_basis: usize, count: usize) -> Result<SpectrumScan> {
    if eta_values.is_empty() {
        return Err(Error::Domain("eta grid is empty".into()));
    }
    let solver = HyperSolver::new(template, n_basis)?;
    let rows: Vec<_> = eta_values.par_iter().map(|&eta| solver.solve(eta, count)).collect();
    Ok(SpectrumScan::from_rows(TopKind::Hyper, template, eta_values, n_basis, count, rows))
}
