//! Printed closed-form energies for cutoffs n = 0 and n = 1.

use num_complex::Complex64;

use super::sector::Sector;
use crate::config::TopConfig;
use crate::error::{Error, Result};

/// Closed-form energies for `n ∈ {0, 1}`, ascending by real part for n = 1
/// (the `−√` root first). Evaluated at the stored η, which should be on the
/// condition.
pub fn closed_form_energies(sector: Sector, config: &TopConfig, n: usize) -> Result<Vec<Complex64>> {
    closed_form_energies_with_root(sector, config, n, sector.sign() * config.zeta.sqrt())
}

/// As [`closed_form_energies`] with an explicitly signed √ζ.
pub fn closed_form_energies_with_root(
    sector: Sector,
    config: &TopConfig,
    n: usize,
    root_zeta: f64,
) -> Result<Vec<Complex64>> {
    let (b, k, m, rho, zeta) = (config.b, config.kf(), config.mf(), config.rho, config.zeta);
    let sb = b.sqrt();
    let rk = b * rho * k * k;
    match n {
        0 => {
            let e = match sector.family() {
                1 => b * (m * m + m) - rk - 2.0 * sb * k * root_zeta - zeta,
                2 => b * (k * k + k) - rk - 2.0 * sb * m * root_zeta - zeta,
                3 => b * (k * k - k) - rk + 2.0 * sb * m * root_zeta - zeta,
                _ => b * (m * m - m) - rk + 2.0 * sb * k * root_zeta - zeta,
            };
            Ok(vec![Complex64::new(e, 0.0)])
        }
        1 => {
            let b32 = b * sb;
            let (center, radicand) = match sector.family() {
                1 => (
                    b * (m + 1.0).powi(2) - rk - 2.0 * sb * k * root_zeta - zeta,
                    b * b * (m + 1.0).powi(2) + 4.0 * b32 * k * root_zeta + 4.0 * b * zeta,
                ),
                2 => (
                    b * (k + 1.0).powi(2) - rk - 2.0 * sb * m * root_zeta - zeta,
                    b * b * (k + 1.0).powi(2) + 4.0 * b32 * m * root_zeta + 4.0 * b * zeta,
                ),
                3 => (
                    b * (k - 1.0).powi(2) - rk + 2.0 * sb * m * root_zeta - zeta,
                    b * b * (k - 1.0).powi(2) - 4.0 * b32 * m * root_zeta + 4.0 * b * zeta,
                ),
                _ => (
                    b * (m - 1.0).powi(2) - rk + 2.0 * sb * k * root_zeta - zeta,
                    b * b * (m - 1.0).powi(2) - 4.0 * b32 * k * root_zeta + 4.0 * b * zeta,
                ),
            };
            let root = Complex64::new(radicand, 0.0).sqrt();
            Ok(vec![center - root, center + root])
        }
        _ => Err(Error::Unsupported(format!("closed-form energies are tabulated only for n = 0, 1 (got {n})"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_values() {
        let c = TopConfig::integer(1, 2, 30.0, 25.0);
        let s: Sector = "1+".parse().unwrap();
        assert_eq!(closed_form_energies(s, &c, 0).unwrap()[0].re, -29.0);
        let e = closed_form_energies(s, &c.with_eta(40.0), 1).unwrap();
        let r = 129f64.sqrt();
        assert!((e[0].re - (-26.0 - r)).abs() < 1e-12);
        assert!((e[1].re - (-26.0 + r)).abs() < 1e-12);
        assert!(closed_form_energies(s, &c, 2).is_err());
    }
}
