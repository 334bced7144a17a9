//! Closed-form wavefunctions `ψ̂(θ) = seed(θ) · P(z(θ))`.

use num_complex::Complex64;

use super::levels::AlgebraicLevel;
use super::sector::Sector;
use crate::config::{TopConfig, TopKind};

/// Seed `e^{c·cos θ} sin^α(θ/2) cos^β(θ/2)` times a polynomial in
/// `z = (cos θ + 1)/2`; the hyperbolic form replaces cos, sin by cosh, sinh.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavefunction {
    pub kind: TopKind,
    /// Signed `±√(ζ/B)`.
    pub decay: f64,
    pub alpha: f64,
    pub beta: f64,
    pub coeffs: Vec<Complex64>,
    /// Factors of (z − 1) moved from the polynomial into the sin(θ/2) power;
    /// each one carries a sign −1 for the trigonometric kind.
    pub absorbed_at_one: u32,
}

/// Value and first two θ-derivatives, each divided by the (positive) seed.
#[derive(Clone, Copy, Debug)]
pub struct Reduced {
    pub value: Complex64,
    pub first: Complex64,
    pub second: Complex64,
}

impl Wavefunction {
    pub fn new(level: &AlgebraicLevel) -> Self {
        let mut w = seed_wavefunction(level.sector, &level.config, level.kind);
        // Endpoint zeros are moved into the seed powers so the function keeps
        // full relative accuracy near θ = 0 and θ = π.
        let (q, r1) = deflate(&level.coeffs, 1.0);
        let (q, r0) = deflate(&q, 0.0);
        w.coeffs = q;
        w.alpha += 2.0 * r1 as f64;
        w.beta += 2.0 * r0 as f64;
        w.absorbed_at_one = r1 as u32;
        w
    }

    fn endpoint_sign(&self) -> f64 {
        if self.kind == TopKind::Trig && self.absorbed_at_one % 2 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    fn z(&self, theta: f64) -> (f64, f64, f64) {
        match self.kind {
            TopKind::Trig => ((theta.cos() + 1.0) / 2.0, -theta.sin() / 2.0, -theta.cos() / 2.0),
            TopKind::Hyper => ((theta.cosh() + 1.0) / 2.0, theta.sinh() / 2.0, theta.cosh() / 2.0),
        }
    }

    /// Polynomial and its first two z-derivatives.
    fn poly(&self, z: f64) -> (Complex64, Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut dp, mut ddp) = (zero, zero, zero);
        for &c in self.coeffs.iter().rev() {
            ddp = ddp * z + 2.0 * dp;
            dp = dp * z + p;
            p = p * z + c;
        }
        let sign = self.endpoint_sign();
        (p * sign, dp * sign, ddp * sign)
    }

    /// Evaluate the polynomial factor alone at z.
    pub fn poly_at(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c) * self.endpoint_sign()
    }

    /// Positive seed factor; infinite at an endpoint with a negative power.
    pub fn seed(&self, theta: f64) -> f64 {
        let h = theta / 2.0;
        match self.kind {
            TopKind::Trig => (self.decay * theta.cos()).exp() * h.sin().powf(self.alpha) * h.cos().powf(self.beta),
            TopKind::Hyper => (self.decay * theta.cosh()).exp() * h.sinh().powf(self.alpha) * h.cosh().powf(self.beta),
        }
    }

    /// Logarithmic derivative of the seed and its derivative.
    pub fn seed_log_derivative(&self, theta: f64) -> (f64, f64) {
        let h = theta / 2.0;
        let (a, b, c) = (self.alpha, self.beta, self.decay);
        match self.kind {
            TopKind::Trig => {
                let (cot, tan) = (h.cos() / h.sin(), h.tan());
                let l = -c * theta.sin() + a / 2.0 * cot - b / 2.0 * tan;
                let dl = -c * theta.cos() - a / 4.0 / h.sin().powi(2) - b / 4.0 / h.cos().powi(2);
                (l, dl)
            }
            TopKind::Hyper => {
                let (coth, tanh) = (h.cosh() / h.sinh(), h.tanh());
                let l = c * theta.sinh() + a / 2.0 * coth + b / 2.0 * tanh;
                let dl = c * theta.cosh() - a / 4.0 / h.sinh().powi(2) + b / 4.0 / h.cosh().powi(2);
                (l, dl)
            }
        }
    }

    /// ψ̂, ψ̂′, ψ̂″ divided by the seed, so large seeds never overflow.
    pub fn reduced(&self, theta: f64) -> Reduced {
        let (z, dz, ddz) = self.z(theta);
        let (p, dp, ddp) = self.poly(z);
        let (l, dl) = self.seed_log_derivative(theta);
        let pz = dp * dz;
        let pzz = ddp * dz * dz + dp * ddz;
        Reduced { value: p, first: l * p + pz, second: (dl + l * l) * p + 2.0 * l * pz + pzz }
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let (z, _, _) = self.z(theta);
        self.seed(theta) * self.poly(z).0
    }

    pub fn derivative(&self, theta: f64) -> Complex64 {
        self.seed(theta) * self.reduced(theta).first
    }

    /// Analytic continuation to complex θ along principal branches.
    pub fn eval_complex(&self, theta: Complex64) -> Complex64 {
        let h = theta / 2.0;
        let (c, s, ch) = match self.kind {
            TopKind::Trig => (theta.cos(), h.sin(), h.cos()),
            TopKind::Hyper => (theta.cosh(), h.sinh(), h.cosh()),
        };
        let z = (c + 1.0) / 2.0;
        (self.decay * c).exp() * s.powf(self.alpha) * ch.powf(self.beta) * self.poly_at(z)
    }
}

/// The n = 0 solution of a sector, without normalization.
pub fn seed_wavefunction(sector: Sector, config: &TopConfig, kind: TopKind) -> Wavefunction {
    let (alpha, beta) = sector.seed_exponents(config.kf(), config.mf());
    Wavefunction {
        kind,
        decay: sector.sign() * (config.zeta / config.b).sqrt(),
        alpha,
        beta,
        coeffs: vec![Complex64::new(1.0, 0.0)],
        absorbed_at_one: 0,
    }
}

/// Divide out the highest power of (z − at) whose remainders are all below
/// 1e-9 of the largest coefficient. Returns the quotient and the power.
pub fn deflate(coeffs: &[Complex64], at: f64) -> (Vec<Complex64>, usize) {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut c: Vec<Complex64> = coeffs.to_vec();
    let mut order = 0;
    if scale == 0.0 {
        return (c, 0);
    }
    while c.len() > 1 {
        let n = c.len() - 1;
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        let mut acc = c[n];
        for i in (0..n).rev() {
            q[i] = acc;
            acc = c[i] + acc * at;
        }
        if acc.norm() > 1e-9 * scale {
            break;
        }
        order += 1;
        c = q;
    }
    (c, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::half::HalfInt;
    use crate::qhj::levels::{algebraic_levels, anti_isospectral_pair};

    fn s(label: &str) -> Sector {
        label.parse().unwrap()
    }

    #[test]
    fn endpoint_zeros_move_into_the_seed() {
        let one = Complex64::new(1.0, 0.0);
        let (q, r) = deflate(&[-one, 3.0 * one, -3.0 * one, one], 1.0);
        assert_eq!((q.len(), r), (1, 3));
        let (q, r) = deflate(&[Complex64::new(0.0, 0.0), one, one], 0.0);
        assert_eq!((q, r), (vec![one, one], 1));
        // (z − 1)² on a trig seed equals the seed with α raised by 4.
        let c = TopConfig::integer(1, 2, 0.0, 4.0);
        let mut w = seed_wavefunction(s("1+"), &c, TopKind::Trig);
        w.coeffs = vec![one, -2.0 * one, one];
        let t: f64 = 0.9;
        let z = (t.cos() + 1.0) / 2.0;
        let direct = w.seed(t) * (z - 1.0).powi(2);
        let mut v = seed_wavefunction(s("1+"), &c, TopKind::Trig);
        v.alpha += 4.0;
        assert!((v.eval(t).re - direct).abs() < 1e-14);
    }

    #[test]
    fn spherical_seed_is_pure_exponential() {
        let c = TopConfig::integer(0, 0, 0.0, 25.0);
        let w = seed_wavefunction(s("1+"), &c, TopKind::Trig);
        for t in [0.0f64, 0.7, 2.0, std::f64::consts::PI] {
            assert!((w.eval(t).re - (5.0 * t.cos()).exp()).abs() < 1e-12 * (5.0 * t.cos()).exp());
        }
    }

    #[test]
    fn zero_k_seed_is_power_of_sin() {
        let c = TopConfig::integer(0, 3, 0.0, 4.0);
        let w = seed_wavefunction(s("1+"), &c, TopKind::Trig);
        for t in [0.3f64, 1.2, 2.5] {
            let expect = (t.sin() / 2.0).powi(3) * (2.0 * t.cos()).exp();
            assert!((w.eval(t).re - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn planar_seed_in_gauged_form() {
        let c = TopConfig::new(HalfInt::ZERO, HalfInt::from_twice(1), 0.0, 9.0);
        let w = seed_wavefunction(s("3+"), &c, TopKind::Trig);
        for t in [0.4f64, 1.1, 2.9] {
            let gauged = t.sin().sqrt() * w.eval(t).re;
            let expect = 2f64.sqrt() * (t / 2.0).sin() * (3.0 * t.cos()).exp();
            assert!((gauged - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn endpoint_with_negative_power_is_infinite() {
        let c = TopConfig::integer(0, 1, 0.0, 4.0);
        let w = seed_wavefunction(s("2+"), &c, TopKind::Trig);
        assert!(w.eval(0.0).re.is_infinite());
    }

    #[test]
    fn first_excited_matches_printed_form() {
        let c = TopConfig::integer(1, 2, 40.0, 25.0);
        let lvl = &algebraic_levels(s("1+"), &c, 1).unwrap()[0];
        let w = lvl.wavefunction();
        let (b, k, m, zeta) = (1.0f64, 1.0, 2.0, 25.0f64);
        let shift = ((b * (m + 1.0f64).powi(2) + 4.0 * b.sqrt() * k * zeta.sqrt() + 4.0 * zeta).sqrt()
            + b.sqrt() * (m + 1.0))
            / (2.0 * zeta.sqrt());
        let seed = seed_wavefunction(s("1+"), &c, TopKind::Trig);
        for t in [0.5f64, 1.0, 2.0] {
            let printed = seed.eval(t).re * (shift + t.cos());
            // Leading coefficient 1 in z = (cos θ + 1)/2 is half the cos θ coefficient.
            assert!((w.eval(t).re - printed / 2.0).abs() < 1e-12 * printed.abs().max(1.0));
        }
    }

    #[test]
    fn reduced_derivatives_match_finite_differences() {
        let c = TopConfig::integer(1, 2, 0.0, 4.0);
        for sec in Sector::ALL {
            for kind in [TopKind::Trig, TopKind::Hyper] {
                for lvl in crate::qhj::levels::levels_at_condition(sec, &c, 2).unwrap() {
                    let mut w = lvl.wavefunction();
                    w.kind = kind;
                    for t in [0.6, 1.3, 2.2] {
                        let h = 1e-4;
                        let f = |x: f64| w.eval(x);
                        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
                        let d2 = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
                        let r = w.reduced(t);
                        let g = w.seed(t);
                        let scale = (g * r.value).norm() + (g * r.first).norm() + (g * r.second).norm();
                        assert!((g * r.first - d1).norm() < 1e-6 * scale, "{sec} {kind}");
                        assert!((g * r.second - d2).norm() < 1e-4 * scale, "{sec} {kind}");
                    }
                }
            }
        }
    }

    #[test]
    fn hyperbolic_partner_is_continuation_up_to_phase() {
        let c = TopConfig::integer(1, 2, -10.0 * 4.0, 25.0);
        let base = c.with_eta(crate::qhj::sector::qs_eta(s("1-"), 0, &c));
        let lvl = &algebraic_levels(s("1-"), &base, 0).unwrap()[0];
        let h = anti_isospectral_pair(lvl).unwrap().wavefunction();
        let t = lvl.wavefunction();
        let theta = 1.0;
        let a = t.eval_complex(Complex64::new(0.0, theta)).norm();
        let b = h.eval(theta).norm();
        assert!((a - b).abs() < 1e-12 * b);
        assert!(h.eval(4.0).norm() < 1e-50);
    }
}
