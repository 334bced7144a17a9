//! Fixed quantum momentum functions in the rational variable z = (cos θ + 1)/2.

use log::warn;
use num_complex::Complex64;

use super::sector::Sector;
use crate::config::TopConfig;
use crate::error::{Error, Result};

/// `p(z) = res1/(z−1) + res0/z + constant`, plus the residue of its
/// expansion at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalQmf {
    pub sector: Sector,
    pub residue_at_zero: f64,
    pub residue_at_one: f64,
    pub constant: f64,
    pub residue_at_infinity: f64,
}

impl RationalQmf {
    pub fn new(sector: Sector, config: &TopConfig) -> Self {
        Self::with_root_zeta(sector, config, sector.sign() * config.zeta.sqrt())
    }

    /// Same formulas with an explicitly signed √ζ; the branch only enters here.
    pub fn with_root_zeta(sector: Sector, config: &TopConfig, root_zeta: f64) -> Self {
        let (a, b) = sector.pole_coefficients(config.kf(), config.mf());
        let sb = config.b.sqrt();
        RationalQmf {
            sector,
            residue_at_zero: sb * b / 2.0,
            residue_at_one: sb * a / 2.0,
            constant: 2.0 * root_zeta,
            residue_at_infinity: -config.eta / (2.0 * root_zeta),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(0.0, 0.0) || z == Complex64::new(1.0, 0.0) {
            return Err(Error::Domain(format!("momentum function has a pole at z = {z}")));
        }
        Ok(self.residue_at_one / (z - 1.0) + self.residue_at_zero / z + self.constant)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        if z == Complex64::new(0.0, 0.0) || z == Complex64::new(1.0, 0.0) {
            return Err(Error::Domain(format!("momentum function has a pole at z = {z}")));
        }
        Ok(-self.residue_at_one / ((z - 1.0) * (z - 1.0)) - self.residue_at_zero / (z * z))
    }

    /// −Res(∞) − Res(0) − Res(1); equals √B·n on the condition for cutoff n.
    pub fn quantization_sum(&self) -> f64 {
        -self.residue_at_infinity - self.residue_at_zero - self.residue_at_one
    }
}

/// Convenience wrapper for [`RationalQmf::eval`].
pub fn qmf_eval(sector: Sector, config: &TopConfig, z: Complex64) -> Result<Complex64> {
    RationalQmf::new(sector, config).eval(z)
}

/// Trigonometric potential with the √sin θ gauge, written in z, including
/// the Schwarzian correction from the change of variable θ → z.
pub fn rational_potential(config: &TopConfig, z: Complex64) -> Complex64 {
    let (b, k, m) = (config.b, config.kf(), config.mf());
    let c = 2.0 * z - 1.0;
    let zz = z * (z - 1.0);
    let centrifugal = (-4.0 * k * k * config.rho * z * z + 4.0 * k * k * config.rho * z - k * k + 4.0 * k * m * z
        - 2.0 * k * m
        - m * m
        + 0.25)
        / (4.0 * zz);
    let schwarzian = (4.0 * z * z - 4.0 * z + 3.0) / (16.0 * zz);
    -config.eta * c - config.zeta * c * c + b * (centrifugal - 0.25) + b * schwarzian
}

/// Left side of `p² + √B p′ + θ′(z)²(E − Ṽ) = 0` at one point.
pub fn riccati_lhs(qmf: &RationalQmf, config: &TopConfig, energy: f64, z: Complex64) -> Result<Complex64> {
    let p = qmf.eval(z)?;
    let dp = qmf.derivative(z)?;
    let theta_prime_sq = 1.0 / (z * (1.0 - z));
    Ok(p * p + config.b.sqrt() * dp + theta_prime_sq * (energy - rational_potential(config, z)))
}

/// Maximum residual of the Riccati identity over the samples.
///
/// The result is relative: each residual is divided by the largest modulus of
/// the three terms at that point. Samples on a pole are skipped.
pub fn riccati_residual(sector: Sector, config: &TopConfig, energy: f64, z_samples: &[Complex64]) -> f64 {
    let qmf = RationalQmf::new(sector, config);
    let mut worst: f64 = 0.0;
    for &z in z_samples {
        let (Ok(p), Ok(dp)) = (qmf.eval(z), qmf.derivative(z)) else {
            warn!("skipping Riccati sample on a pole: z = {z}");
            continue;
        };
        let t1 = p * p;
        let t2 = config.b.sqrt() * dp;
        let t3 = (energy - rational_potential(config, z)) / (z * (1.0 - z));
        let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(1.0);
        worst = worst.max((t1 + t2 + t3).norm() / scale);
    }
    worst
}

/// Absolute (unscaled) maximum residual, for reporting.
pub fn riccati_residual_abs(sector: Sector, config: &TopConfig, energy: f64, z_samples: &[Complex64]) -> f64 {
    let qmf = RationalQmf::new(sector, config);
    z_samples
        .iter()
        .filter_map(|&z| riccati_lhs(&qmf, config, energy, z).ok())
        .map(|r| r.norm())
        .fold(0.0, f64::max)
}

/// `count` points on the circle |z − 1/2| = 0.4, offset from the real axis.
pub fn circle_samples(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|j| {
            let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / count as f64;
            Complex64::new(0.5, 0.0) + Complex64::from_polar(0.4, phi)
        })
        .collect()
}
