//! Normalizability verdicts, endpoint classification, the second solution
//! near a limit-circle endpoint, and counting of normalizable closed forms.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{TopConfig, TopKind};
use crate::error::{Error, Result};
use crate::qhj::wavefunction::deflate;
use crate::qhj::{all_levels, anti_isospectral_pair, AlgebraicLevel, Branch, Sector, Wavefunction};
use crate::quad::{integrate, QuadOptions};
use crate::special::ei;

/// Tolerance for energies and sampled wavefunctions when grouping levels.
pub const COINCIDENCE_TOL: f64 = 1e-9;
/// Threshold on the extrapolated boundary flux.
pub const BOUNDARY_TOL: f64 = 1e-6;

/// Weyl classification of one endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    /// Limit circle: every solution is square integrable nearby.
    Lc,
    /// Limit point: at most one solution is.
    Lp,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LimitKind::Lc => "LC",
            LimitKind::Lp => "LP",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointClass {
    pub at_zero: LimitKind,
    /// θ = π for the trigonometric top, θ → ∞ for the hyperbolic one.
    pub at_far: LimitKind,
    pub kind: TopKind,
}

impl fmt::Display for EndpointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.at_zero, self.at_far)
    }
}

/// Endpoint classes from the centrifugal term alone.
pub fn endpoint_classification(k: f64, m: f64, kind: TopKind) -> EndpointClass {
    use LimitKind::*;
    let (at_zero, at_far) = match kind {
        TopKind::Trig => {
            if k == 0.0 && m == 0.0 {
                (Lc, Lc)
            } else if m == k {
                (Lc, Lp)
            } else if m == -k {
                (Lp, Lc)
            } else {
                (Lp, Lp)
            }
        }
        TopKind::Hyper => (if k == m { Lc } else { Lp }, Lp),
    };
    EndpointClass { at_zero, at_far, kind }
}

/// Tabulated sufficient condition for a sector's solutions to be normalizable.
pub fn normalizable(sector: Sector, k: f64, m: f64, kind: TopKind) -> bool {
    let family = sector.family();
    match kind {
        TopKind::Trig => match family {
            1 => k <= m && k >= -m,
            2 => k >= m && k >= -m,
            3 => k <= m && k <= -m,
            _ => k >= m && k <= -m,
        },
        TopKind::Hyper => {
            sector.branch() == Branch::Minus
                && match family {
                    1 | 3 => k <= m,
                    _ => k >= m,
                }
        }
    }
}

/// Leading powers of `|ψ̂|² sin θ` at θ → 0 and θ → π for a sector's seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityExponents {
    pub at_zero: f64,
    pub at_pi: f64,
}

impl IntegrabilityExponents {
    pub fn integrable(&self) -> bool {
        self.at_zero > -1.0 && self.at_pi > -1.0
    }
}

pub fn integrability_exponents(sector: Sector, k: f64, m: f64) -> IntegrabilityExponents {
    let (alpha, beta) = sector.seed_exponents(k, m);
    IntegrabilityExponents { at_zero: 2.0 * alpha + 1.0, at_pi: 2.0 * beta + 1.0 }
}

fn root_order(coeffs: &[Complex64], at: f64) -> usize {
    deflate(coeffs, at).1
}

/// Whether a closed-form level is square integrable on its domain, from the
/// seed exponents plus the orders of zeros of its polynomial at the
/// endpoints. Non-real energies are never counted.
pub fn level_normalizable(level: &AlgebraicLevel) -> bool {
    if !level.is_real() {
        return false;
    }
    let (k, m) = (level.config.kf(), level.config.mf());
    let (alpha, beta) = level.sector.seed_exponents(k, m);
    let alpha = alpha + 2.0 * root_order(&level.coeffs, 1.0) as f64;
    let beta = beta + 2.0 * root_order(&level.coeffs, 0.0) as f64;
    match level.kind {
        TopKind::Trig => alpha > -1.0 && beta > -1.0,
        TopKind::Hyper => alpha > -1.0 && level.sector.branch() == Branch::Minus,
    }
}

/// Number of normalizable closed-form levels with cutoff ≤ `n_max`.
///
/// The (K, M) = (0, ±1/2) planar case is four times the integer count with
/// both branches included for the trigonometric top; the hyperbolic top keeps
/// only its decaying branch.
pub fn count_solutions(n_max: usize, k: f64, m: f64, kind: TopKind) -> Result<usize> {
    let base = (n_max + 1) * (n_max + 2);
    let integer = k.fract() == 0.0 && m.fract() == 0.0;
    if integer {
        return Ok(match kind {
            TopKind::Trig => base,
            TopKind::Hyper => {
                let s = (m + k).abs() as usize;
                if n_max >= s {
                    let d = n_max - s;
                    base - (d + 1) * (d + 2) / 2
                } else {
                    base
                }
            }
        });
    }
    if k == 0.0 && m.abs() == 0.5 {
        return Ok(match kind {
            TopKind::Trig => 4 * base,
            TopKind::Hyper => 2 * base,
        });
    }
    Err(Error::Unsupported(format!("no counting rule for K = {k}, M = {m}")))
}

/// Every closed-form level with cutoff ≤ `n_max`, as the requested kind.
pub fn enumerate_levels(config: &TopConfig, n_max: usize, kind: TopKind) -> Result<Vec<AlgebraicLevel>> {
    let trig = all_levels(config, n_max)?;
    match kind {
        TopKind::Trig => Ok(trig),
        TopKind::Hyper => trig.iter().map(anti_isospectral_pair).collect(),
    }
}

fn sample_angles(kind: TopKind) -> Vec<f64> {
    match kind {
        TopKind::Trig => (0..16).map(|i| std::f64::consts::PI * (i as f64 + 0.5) / 16.0).collect(),
        TopKind::Hyper => (0..16).map(|i| 0.2 * (i as f64 + 1.0)).collect(),
    }
}

/// Samples divided by the largest-modulus sample, removing any overall phase.
fn fingerprint(w: &Wavefunction, angles: &[f64]) -> Vec<Complex64> {
    let v: Vec<Complex64> = angles.iter().map(|&t| w.eval(t)).collect();
    let pivot = v.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or_default();
    if pivot.norm() == 0.0 || !pivot.norm().is_finite() {
        return v;
    }
    v.into_iter().map(|z| z / pivot).collect()
}

/// Indices of levels that describe the same solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceGroup {
    pub members: Vec<usize>,
}

/// Group levels sharing η, energy and wavefunction (up to phase).
pub fn dedupe_levels(levels: &[AlgebraicLevel]) -> Vec<CoincidenceGroup> {
    let prints: Vec<Vec<Complex64>> =
        levels.iter().map(|l| fingerprint(&l.wavefunction(), &sample_angles(l.kind))).collect();
    let mut groups: Vec<CoincidenceGroup> = Vec::new();
    'outer: for (i, lvl) in levels.iter().enumerate() {
        for g in groups.iter_mut() {
            let rep = &levels[g.members[0]];
            let same_eta = (rep.config.eta - lvl.config.eta).abs() <= COINCIDENCE_TOL * rep.config.eta.abs().max(1.0);
            let same_e = (rep.energy - lvl.energy).norm() <= COINCIDENCE_TOL * rep.energy.norm().max(1.0);
            let same_psi = prints[g.members[0]]
                .iter()
                .zip(&prints[i])
                .all(|(a, b)| (a - b).norm() <= COINCIDENCE_TOL * 10.0);
            if rep.kind == lvl.kind && same_eta && same_e && same_psi {
                g.members.push(i);
                continue 'outer;
            }
        }
        groups.push(CoincidenceGroup { members: vec![i] });
    }
    groups
}

/// Formula and enumerated counts side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub kind: TopKind,
    pub n_max: usize,
    pub formula: usize,
    pub enumerated: usize,
    pub plus_branch: usize,
    pub minus_branch: usize,
}

/// Distinct normalizable levels, optionally from one branch only.
pub fn enumerated_count(config: &TopConfig, n_max: usize, kind: TopKind, branch: Option<Branch>) -> Result<usize> {
    let levels: Vec<AlgebraicLevel> = enumerate_levels(config, n_max, kind)?
        .into_iter()
        .filter(|l| branch.is_none_or(|b| l.sector.branch() == b))
        .filter(level_normalizable)
        .collect();
    Ok(dedupe_levels(&levels).len())
}

pub fn count_report(config: &TopConfig, n_max: usize, kind: TopKind) -> Result<CountReport> {
    Ok(CountReport {
        kind,
        n_max,
        formula: count_solutions(n_max, config.kf(), config.mf(), kind)?,
        enumerated: enumerated_count(config, n_max, kind, None)?,
        plus_branch: enumerated_count(config, n_max, kind, Some(Branch::Plus))?,
        minus_branch: enumerated_count(config, n_max, kind, Some(Branch::Minus))?,
    })
}

/// A real function of θ with a derivative.
pub trait RealFunction: Sync {
    fn value(&self, theta: f64) -> f64;

    /// Central differences at h = 1e-3·2^{−k}, Richardson-extrapolated.
    fn derivative(&self, theta: f64) -> f64 {
        let h0 = 1e-3;
        let mut table = [0.0f64; 4];
        for (k, slot) in table.iter_mut().enumerate() {
            let h = h0 / f64::powi(2.0, k as i32);
            *slot = (self.value(theta + h) - self.value(theta - h)) / (2.0 * h);
        }
        neville_at_zero(&[h0 * h0, h0 * h0 / 4.0, h0 * h0 / 16.0, h0 * h0 / 64.0], &table)
    }
}

impl RealFunction for Wavefunction {
    fn value(&self, theta: f64) -> f64 {
        self.eval(theta).re
    }
    fn derivative(&self, theta: f64) -> f64 {
        Wavefunction::derivative(self, theta).re
    }
}

/// Wraps a closure; its derivative is by finite differences.
pub struct FnFunction<F>(pub F);

impl<F: Fn(f64) -> f64 + Sync> RealFunction for FnFunction<F> {
    fn value(&self, theta: f64) -> f64 {
        (self.0)(theta)
    }
}

/// Polynomial extrapolation of samples `(x_i, y_i)` to x = 0.
fn neville_at_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xa, xb) = (x[i], x[i + level]);
            p[i] = (xb * p[i] - xa * p[i + 1]) / (xb - xa);
        }
    }
    p[0]
}

fn weight(kind: TopKind, theta: f64) -> f64 {
    match kind {
        TopKind::Trig => theta.sin(),
        TopKind::Hyper => theta.sinh(),
    }
}

/// `φ = ψ ∫ dt / (w(t) ψ(t)²)` from π/2 (trig) or 1 (hyper), with w = sin or sinh.
pub struct SecondSolution<'a, P: RealFunction> {
    psi: &'a P,
    kind: TopKind,
    base: f64,
    opts: QuadOptions,
}

pub fn second_solution<P: RealFunction>(psi: &P, kind: TopKind) -> SecondSolution<'_, P> {
    let base = match kind {
        TopKind::Trig => std::f64::consts::FRAC_PI_2,
        TopKind::Hyper => 1.0,
    };
    SecondSolution { psi, kind, base, opts: QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 4000 } }
}

impl<P: RealFunction> SecondSolution<'_, P> {
    pub fn base_point(&self) -> f64 {
        self.base
    }

    /// Locate a sign change of ψ between the base point and θ.
    fn check_path(&self, theta: f64) -> Result<()> {
        let steps = 256;
        let f0 = self.psi.value(self.base);
        if f0 == 0.0 || !f0.is_finite() {
            return Err(Error::NodeOnPath { location: self.base });
        }
        let mut prev = self.base;
        for i in 1..=steps {
            let t = self.base + (theta - self.base) * i as f64 / steps as f64;
            let f = self.psi.value(t);
            if f == 0.0 || f.signum() != f0.signum() {
                let (mut a, mut b) = (prev, t);
                for _ in 0..60 {
                    let mid = 0.5 * (a + b);
                    if self.psi.value(mid).signum() == f0.signum() {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                return Err(Error::NodeOnPath { location: 0.5 * (a + b) });
            }
            prev = t;
        }
        Ok(())
    }

    fn integral(&self, theta: f64) -> Result<f64> {
        self.check_path(theta)?;
        let (v, _) = integrate(
            |t| {
                let p = self.psi.value(t);
                1.0 / (weight(self.kind, t) * p * p)
            },
            self.base,
            theta,
            self.opts,
        )?;
        Ok(v)
    }

    pub fn eval(&self, theta: f64) -> Result<f64> {
        Ok(self.psi.value(theta) * self.integral(theta)?)
    }

    /// `φ′ = ψ′ I + 1/(w ψ)`.
    pub fn eval_derivative(&self, theta: f64) -> Result<f64> {
        let p = self.psi.value(theta);
        Ok(self.psi.derivative(theta) * self.integral(theta)? + 1.0 / (weight(self.kind, theta) * p))
    }
}

impl<P: RealFunction> RealFunction for SecondSolution<'_, P> {
    fn value(&self, theta: f64) -> f64 {
        self.eval(theta).unwrap_or(f64::NAN)
    }
    fn derivative(&self, theta: f64) -> f64 {
        self.eval_derivative(theta).unwrap_or(f64::NAN)
    }
}

/// Exponential-integral partner of `e^{c cos θ}` for M = K = 0 at η = 2√(Bζ),
/// with c = √(ζ/B).
pub fn ei_partner_solution(c: f64, theta: f64) -> f64 {
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    (c * (theta.cos() - 2.0)).exp() / 2.0 * (ei(4.0 * c * s * s) - (4.0 * c).exp() * ei(-4.0 * c * co * co))
}

/// Extrapolated `w·ψ′` at each endpoint that carries a condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub at_zero: Option<f64>,
    pub at_far: Option<f64>,
    pub passes: bool,
}

fn boundary_limit<P: RealFunction>(psi: &P, kind: TopKind, endpoint: f64, inward: f64) -> (f64, f64) {
    let hs = [1e-2, 1e-3, 1e-4, 1e-5];
    let mut vals = [0.0; 4];
    let mut scale: f64 = 1.0;
    for (slot, &h) in vals.iter_mut().zip(&hs) {
        let t = endpoint + inward * h;
        *slot = weight(kind, t) * psi.derivative(t);
        scale = scale.max(psi.value(t).abs());
    }
    (neville_at_zero(&hs, &vals), scale)
}

/// The regularity condition `lim w(θ) ψ′(θ) = 0` at every limit-circle endpoint.
/// Non-finite values make the check fail rather than error.
pub fn physical_boundary_check<P: RealFunction>(psi: &P, eclass: EndpointClass) -> BoundaryReport {
    let kind = eclass.kind;
    let mut passes = true;
    let mut probe = |endpoint: f64, inward: f64| {
        let (limit, scale) = boundary_limit(psi, kind, endpoint, inward);
        if !limit.is_finite() || limit.abs() >= BOUNDARY_TOL * scale {
            passes = false;
        }
        limit
    };
    let at_zero = (eclass.at_zero == LimitKind::Lc).then(|| probe(0.0, 1.0));
    let at_far = match (eclass.at_far, kind) {
        (LimitKind::Lc, TopKind::Trig) => Some(probe(std::f64::consts::PI, -1.0)),
        _ => None,
    };
    BoundaryReport { at_zero, at_far, passes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::half::HalfInt;
    use crate::qhj::{levels_at_condition, seed_wavefunction};
    use proptest::prelude::*;

    fn s(label: &str) -> Sector {
        label.parse().unwrap()
    }

    #[test]
    fn sector_rule_examples() {
        assert!(normalizable(s("1+"), 1.0, 2.0, TopKind::Trig));
        assert!(normalizable(s("1-"), 1.0, 2.0, TopKind::Trig));
        assert!(!normalizable(s("3+"), 1.0, 2.0, TopKind::Trig));
        for k in -3..=3 {
            for m in -3..=3 {
                for f in 1..=4 {
                    assert!(!normalizable(Sector::new(f, Branch::Plus).unwrap(), k as f64, m as f64, TopKind::Hyper));
                }
            }
        }
    }

    #[test]
    fn endpoint_examples() {
        use LimitKind::*;
        let e = |k, m, kind| {
            let c = endpoint_classification(k, m, kind);
            (c.at_zero, c.at_far)
        };
        assert_eq!(e(0.0, 0.0, TopKind::Trig), (Lc, Lc));
        assert_eq!(e(1.0, 1.0, TopKind::Trig), (Lc, Lp));
        assert_eq!(e(1.0, -1.0, TopKind::Trig), (Lp, Lc));
        assert_eq!(e(1.0, 2.0, TopKind::Trig), (Lp, Lp));
        assert_eq!(e(2.0, 2.0, TopKind::Hyper), (Lc, Lp));
        assert_eq!(e(1.0, 2.0, TopKind::Hyper), (Lp, Lp));
    }

    #[test]
    fn exponent_examples() {
        let x = integrability_exponents(s("1+"), 0.0, 0.0);
        assert_eq!((x.at_zero, x.at_pi), (1.0, 1.0));
        assert_eq!(integrability_exponents(s("1+"), 1.0, 2.0).at_zero, 3.0);
        let x = integrability_exponents(s("2+"), 0.0, 1.0);
        assert_eq!(x.at_zero, -1.0);
        assert!(!x.integrable());
    }

    #[test]
    fn sector_rules_agree_with_exponents_on_integer_grid() {
        for k in -3..=3 {
            for m in -3..=3 {
                for sec in Sector::ALL {
                    let (kf, mf) = (k as f64, m as f64);
                    assert_eq!(
                        normalizable(sec, kf, mf, TopKind::Trig),
                        integrability_exponents(sec, kf, mf).integrable(),
                        "{sec} K={k} M={m}"
                    );
                    let alpha = sec.seed_exponents(kf, mf).0;
                    let hyper = alpha > -1.0 && sec.branch() == Branch::Minus;
                    assert_eq!(normalizable(sec, kf, mf, TopKind::Hyper), hyper, "{sec} K={k} M={m}");
                }
            }
        }
    }

    #[test]
    fn normalizable_seed_implies_normalizable_levels() {
        for (k, m) in [(0, 0), (1, 2), (2, 1), (-1, 2), (1, 1), (0, 1)] {
            let c = TopConfig::integer(k, m, 0.0, 25.0);
            for sec in Sector::ALL {
                if !normalizable(sec, k as f64, m as f64, TopKind::Trig) {
                    continue;
                }
                for n in 0..=3 {
                    for lvl in levels_at_condition(sec, &c, n).unwrap() {
                        assert!(level_normalizable(&lvl), "{sec} n={n} K={k} M={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn root_order_detects_endpoint_zeros() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(root_order(&[zero, zero, zero, one], 0.0), 3);
        // (z − 1)² = 1 − 2z + z²
        assert_eq!(root_order(&[one, -2.0 * one, one], 1.0), 2);
        assert_eq!(root_order(&[one, one], 1.0), 0);
    }

    #[test]
    fn counting_formula_examples() {
        assert_eq!(count_solutions(3, 1.0, 2.0, TopKind::Trig).unwrap(), 20);
        assert_eq!(count_solutions(3, 1.0, 1.0, TopKind::Hyper).unwrap(), 17);
        assert_eq!(count_solutions(3, 0.0, 0.0, TopKind::Hyper).unwrap(), 10);
        assert_eq!(count_solutions(3, 1.0, 2.0, TopKind::Hyper).unwrap(), 19);
        assert_eq!(count_solutions(3, 0.0, 0.5, TopKind::Trig).unwrap(), 80);
    }

    #[test]
    fn sector_three_coincides_with_sector_one() {
        let c = TopConfig::integer(1, 2, 0.0, 25.0);
        let three = levels_at_condition(s("3+"), &c, 3).unwrap();
        let one = levels_at_condition(s("1+"), &c, 0).unwrap();
        assert!((three[0].kappa() - 6.0).abs() < 1e-12);
        assert!((one[0].kappa() - 6.0).abs() < 1e-12);
        let mut all = three.clone();
        all.extend(one.iter().cloned());
        let groups = dedupe_levels(&all);
        assert_eq!(groups.len(), 4);
        assert!(groups.iter().any(|g| g.members.len() == 2 && g.members.contains(&4)));
        let normal: Vec<_> = three.iter().filter(|l| level_normalizable(l)).collect();
        assert_eq!(normal.len(), 1);
    }

    #[test]
    fn duplicated_level_groups_with_itself() {
        let c = TopConfig::integer(1, 2, 0.0, 25.0);
        let l = levels_at_condition(s("1+"), &c, 2).unwrap();
        let mut v = l.clone();
        v.push(l[1].clone());
        let g = dedupe_levels(&v);
        assert_eq!(g.len(), 3);
        assert_eq!(g[1].members, vec![1, 3]);
    }

    #[test]
    fn enumerated_counts_match_formulas() {
        for (k, m) in [(0, 0), (1, 1), (2, 1), (0, 1)] {
            let c = TopConfig::integer(k, m, 0.0, 25.0);
            for kind in [TopKind::Trig, TopKind::Hyper] {
                let r = count_report(&c, 3, kind).unwrap();
                assert_eq!(r.enumerated, r.formula, "K={k} M={m} {kind}");
            }
        }
    }

    #[test]
    fn planar_count_is_four_times() {
        let c = TopConfig::new(HalfInt::ZERO, HalfInt::from_twice(1), 0.0, 25.0);
        let r = count_report(&c, 3, TopKind::Trig).unwrap();
        assert_eq!((r.plus_branch, r.minus_branch, r.enumerated), (40, 40, 80));
        assert_eq!(r.formula, 80);
        let h = count_report(&c, 3, TopKind::Hyper).unwrap();
        assert_eq!((h.enumerated, h.formula), (40, 40));
    }

    fn spherical_seed(zeta: f64) -> Wavefunction {
        let c = TopConfig::integer(0, 0, 2.0 * zeta.sqrt(), zeta);
        seed_wavefunction(s("1+"), &c, TopKind::Trig)
    }

    #[test]
    fn ei_partner_matches_quadrature() {
        let zeta: f64 = 25.0;
        let psi = spherical_seed(zeta);
        let phi = second_solution(&psi, TopKind::Trig);
        let c = zeta.sqrt();
        let mid = std::f64::consts::FRAC_PI_2;
        let shift = ei_partner_solution(c, mid) / psi.value(mid);
        for i in 0..=40 {
            let t = 0.2 + (std::f64::consts::PI - 0.4) * i as f64 / 40.0;
            let quad = phi.eval(t).unwrap() + shift * psi.value(t);
            let closed = ei_partner_solution(c, t);
            assert!((quad - closed).abs() < 1e-8 * closed.abs().max(1.0), "{t}: {quad} {closed}");
        }
    }

    #[test]
    fn wronskian_is_inverse_weight() {
        let psi = spherical_seed(9.0);
        let phi = second_solution(&psi, TopKind::Trig);
        for t in [0.3, 1.0, std::f64::consts::FRAC_PI_2, 2.5] {
            let w = t.sin() * (psi.value(t) * RealFunction::derivative(&phi, t) - phi.value(t) * RealFunction::derivative(&psi, t));
            assert!((w - 1.0).abs() < 1e-8, "{t}: {w}");
            let fd = FnFunction(|x: f64| phi.value(x)).derivative(t);
            assert!((fd - phi.eval_derivative(t).unwrap()).abs() < 1e-6 * fd.abs().max(1.0));
        }
    }

    #[test]
    fn node_on_path_is_reported() {
        let psi = FnFunction(|t: f64| (t - 1.0).cos() - 0.5);
        // Node at t = 1 + π/3 ≈ 2.047.
        let phi = second_solution(&psi, TopKind::Trig);
        match phi.eval(2.8) {
            Err(Error::NodeOnPath { location }) => assert!((location - (1.0 + std::f64::consts::FRAC_PI_3)).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn boundary_check_separates_seed_and_partner() {
        let psi = spherical_seed(25.0);
        let ec = endpoint_classification(0.0, 0.0, TopKind::Trig);
        assert!(physical_boundary_check(&psi, ec).passes);
        let phi = second_solution(&psi, TopKind::Trig);
        let r = physical_boundary_check(&phi, ec);
        assert!(!r.passes);
        assert!((r.at_zero.unwrap() - (-5.0f64).exp()).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn limit_point_endpoints_impose_nothing() {
        let c = TopConfig::integer(1, 2, 30.0, 25.0);
        let w = levels_at_condition(s("1+"), &c, 0).unwrap()[0].wavefunction();
        let r = physical_boundary_check(&w, endpoint_classification(1.0, 2.0, TopKind::Trig));
        assert!(r.passes && r.at_zero.is_none() && r.at_far.is_none());
    }

    proptest! {
        #[test]
        fn classification_is_total_and_symmetric(k in -6i32..=6, m in -6i32..=6) {
            let t = endpoint_classification(k as f64, m as f64, TopKind::Trig);
            let flipped = endpoint_classification(k as f64, -m as f64, TopKind::Trig);
            prop_assert_eq!(t.at_zero, flipped.at_far);
            prop_assert_eq!(t.at_far, flipped.at_zero);
            let h = endpoint_classification(k as f64, m as f64, TopKind::Hyper);
            prop_assert_eq!(h.at_far, LimitKind::Lp);
        }
    }
}
