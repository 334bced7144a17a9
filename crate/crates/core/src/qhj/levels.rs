//! Exact levels from the decoupled finite block.

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::block::block_matrix;
use super::sector::{qs_eta, satisfies_qs, Sector};
use super::wavefunction::Wavefunction;
use crate::config::{TopConfig, TopKind};
use crate::error::{Error, Result};

/// Cutoffs above this are allowed but have no printed closed form to compare with.
pub const DEFAULT_N_MAX: usize = 3;

/// One closed-form solution: a seed times a polynomial of degree ≤ n in z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicLevel {
    pub sector: Sector,
    pub n: usize,
    pub i: usize,
    pub kind: TopKind,
    /// Energy of the stated kind (hyperbolic energies are negated).
    pub energy: Complex64,
    /// Coefficients of 1, z, …, z^n.
    pub coeffs: Vec<Complex64>,
    pub config: TopConfig,
}

impl AlgebraicLevel {
    pub fn wavefunction(&self) -> Wavefunction {
        Wavefunction::new(self)
    }

    /// True when the energy has no imaginary part beyond rounding.
    pub fn is_real(&self) -> bool {
        self.energy.im.abs() <= 1e-10 * self.energy.norm().max(1.0)
    }

    /// Trigonometric energy regardless of kind.
    pub fn trig_energy(&self) -> Complex64 {
        match self.kind {
            TopKind::Trig => self.energy,
            TopKind::Hyper => -self.energy,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.config.kappa()
    }

    pub fn id(&self) -> String {
        format!("{}:n={}:i={}", self.sector, self.n, self.i)
    }
}

/// `det(T − λ)` and its λ-derivative via the three-term continuant recurrence.
fn characteristic(t: &DMatrix<f64>, lambda: Complex64) -> (Complex64, Complex64) {
    let n = t.nrows();
    let (mut p_prev, mut p) = (Complex64::new(1.0, 0.0), Complex64::new(t[(0, 0)], 0.0) - lambda);
    let (mut d_prev, mut d) = (Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0));
    for l in 1..n {
        let diag = Complex64::new(t[(l, l)], 0.0) - lambda;
        let off = t[(l - 1, l)] * t[(l, l - 1)];
        let p_next = diag * p - off * p_prev;
        let d_next = diag * d - p - off * d_prev;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

/// Eigenvalues of a real tri-diagonal matrix, Newton-polished.
fn tridiagonal_eigenvalues(t: &DMatrix<f64>) -> Vec<Complex64> {
    let raw = t.clone().complex_eigenvalues();
    raw.iter()
        .map(|&l0| {
            let mut best = l0;
            let mut best_abs = characteristic(t, l0).0.norm();
            let mut l = l0;
            for _ in 0..50 {
                let (p, dp) = characteristic(t, l);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                l -= step;
                let a = characteristic(t, l).0.norm();
                if a < best_abs {
                    best = l;
                    best_abs = a;
                }
                if step.norm() <= 1e-16 * l.norm().max(1.0) {
                    break;
                }
            }
            if best.im.abs() <= 1e-13 * best.norm().max(1.0) {
                best.im = 0.0;
            }
            best
        })
        .collect()
}

/// Eigenvector with unit leading coefficient by back-substitution from the top
/// row; requires every raising element `T[l][l−1]` (l ≤ n) to be nonzero.
fn eigenvector(t: &DMatrix<f64>, lambda: Complex64) -> Vec<Complex64> {
    let n = t.nrows() - 1;
    let mut c = vec![Complex64::new(0.0, 0.0); n + 1];
    c[n] = Complex64::new(1.0, 0.0);
    for l in (1..=n).rev() {
        let mut acc = (Complex64::new(t[(l, l)], 0.0) - lambda) * c[l];
        if l < n {
            acc += t[(l, l + 1)] * c[l + 1];
        }
        c[l - 1] = -acc / t[(l, l - 1)];
    }
    c
}

fn cmp_complex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// All n+1 trigonometric levels of a sector at a configuration on its
/// condition for cutoff n, ordered by (Re E, Im E).
///
/// Coefficients are normalized to leading coefficient 1, which is always
/// possible here because the block is an unreduced tri-diagonal matrix. For
/// the same reason a repeated eigenvalue has a single eigenvector, so
/// coincident levels share their coefficients.
pub fn algebraic_levels(sector: Sector, config: &TopConfig, n: usize) -> Result<Vec<AlgebraicLevel>> {
    if !satisfies_qs(sector, n, config) {
        return Err(Error::Precondition(format!(
            "eta = {} is not on the condition for sector {sector}, n = {n} (requires {})",
            config.eta,
            qs_eta(sector, n, config)
        )));
    }
    if config.zeta <= 0.0 {
        return Err(Error::Precondition("closed-form levels need zeta > 0".into()));
    }
    if n > DEFAULT_N_MAX {
        warn!("cutoff n = {n} exceeds {DEFAULT_N_MAX}; no printed closed form is available to cross-check");
    }
    let t = block_matrix(sector, config, n);
    let mut lambdas = tridiagonal_eigenvalues(&t);
    // Energies are −λ; sort by energy.
    let mut energies: Vec<Complex64> = lambdas.drain(..).map(|l| -l).collect();
    energies.sort_by(cmp_complex);
    let mut levels: Vec<AlgebraicLevel> = energies
        .into_iter()
        .map(|e| AlgebraicLevel {
            sector,
            n,
            i: 0,
            kind: TopKind::Trig,
            energy: e,
            coeffs: eigenvector(&t, -e),
            config: *config,
        })
        .collect();
    levels.sort_by(|a, b| {
        cmp_complex(&a.energy, &b.energy).then_with(|| {
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| cmp_complex(x, y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    for (i, l) in levels.iter_mut().enumerate() {
        l.i = i;
    }
    Ok(levels)
}

/// Move the stored η onto the condition for (sector, n) and solve.
pub fn levels_at_condition(sector: Sector, config: &TopConfig, n: usize) -> Result<Vec<AlgebraicLevel>> {
    let at = config.with_eta(qs_eta(sector, n, config));
    algebraic_levels(sector, &at, n)
}

/// Every level with cutoff ≤ `n_max` in every sector, each at its own η.
pub fn all_levels(config: &TopConfig, n_max: usize) -> Result<Vec<AlgebraicLevel>> {
    let mut out = Vec::new();
    for sector in Sector::ALL {
        for n in 0..=n_max {
            out.extend(levels_at_condition(sector, config, n)?);
        }
    }
    Ok(out)
}

/// Partner level of the hyperbolic top: same coefficients, negated energy.
pub fn anti_isospectral_pair(level: &AlgebraicLevel) -> Result<AlgebraicLevel> {
    if level.kind != TopKind::Trig {
        return Err(Error::Precondition("partner map expects a trigonometric level".into()));
    }
    Ok(AlgebraicLevel { kind: TopKind::Hyper, energy: -level.energy, ..level.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qhj::closed_form::closed_form_energies;

    fn s(label: &str) -> Sector {
        label.parse().unwrap()
    }

    #[test]
    fn anchor_levels() {
        let c = TopConfig::integer(1, 2, 30.0, 25.0);
        let l = algebraic_levels(s("1+"), &c, 0).unwrap();
        assert_eq!(l.len(), 1);
        assert!((l[0].energy.re + 29.0).abs() < 1e-12);
        let l = algebraic_levels(s("1+"), &c.with_eta(40.0), 1).unwrap();
        let r = 129f64.sqrt();
        assert!((l[0].energy.re - (-26.0 - r)).abs() < 1e-12);
        assert!((l[1].energy.re - (-26.0 + r)).abs() < 1e-12);
        assert_eq!(l[1].coeffs[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn off_condition_is_rejected() {
        let c = TopConfig::integer(1, 2, 31.0, 25.0);
        assert!(matches!(algebraic_levels(s("1+"), &c, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn coefficients_are_block_eigenvectors() {
        let base = TopConfig::integer(2, 1, 0.0, 10.0).with_rho(0.2);
        for sec in Sector::ALL {
            for n in 0..4 {
                for lvl in levels_at_condition(sec, &base, n).unwrap() {
                    let t = block_matrix(sec, &lvl.config, n);
                    for r in 0..=n {
                        let mut acc = lvl.energy * lvl.coeffs[r];
                        for c in 0..=n {
                            acc += t[(r, c)] * lvl.coeffs[c];
                        }
                        assert!(acc.norm() < 1e-9 * (1.0 + lvl.energy.norm()), "{sec} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn matches_closed_forms() {
        let base = TopConfig::integer(1, 3, 0.0, 25.0).with_b(0.5).with_rho(0.7);
        for sec in Sector::ALL {
            for n in 0..2 {
                let l = levels_at_condition(sec, &base, n).unwrap();
                let e = closed_form_energies(sec, &l[0].config, n).unwrap();
                for (lvl, ce) in l.iter().zip(&e) {
                    assert!((lvl.energy - ce).norm() < 1e-10 * ce.norm().max(1.0), "{sec} n={n}");
                }
            }
        }
    }

    #[test]
    fn partner_negates_energy() {
        let c = TopConfig::integer(1, 2, 30.0, 25.0);
        let l = &algebraic_levels(s("1+"), &c, 0).unwrap()[0];
        let h = anti_isospectral_pair(l).unwrap();
        assert_eq!(h.energy.re, 29.0);
        assert_eq!(h.coeffs, l.coeffs);
        assert!(anti_isospectral_pair(&h).is_err());
    }
}
