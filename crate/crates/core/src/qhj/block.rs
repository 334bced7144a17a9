//! Tri-diagonal representation of the gauged operator on polynomials in z.

use nalgebra::DMatrix;

use super::sector::Sector;
use crate::config::TopConfig;

/// Entries of `T[k][l] = ⟨z^k|T|z^l⟩`, with the branch entering only
/// through the signed `root_zeta = ±√ζ`.
#[derive(Clone, Copy, Debug)]
struct Entries {
    b: f64,
    eta: f64,
    zeta: f64,
    rho_k2: f64,
    x: f64,
    b_seed: f64,
    root_bz: f64,
}

impl Entries {
    fn new(sector: Sector, config: &TopConfig, root_zeta: f64) -> Self {
        let (k, m) = (config.kf(), config.mf());
        let (_, b_seed) = sector.pole_coefficients(k, m);
        Entries {
            b: config.b,
            eta: config.eta,
            zeta: config.zeta,
            rho_k2: config.rho * k * k,
            x: sector.qs_index(k, m),
            b_seed,
            root_bz: config.b.sqrt() * root_zeta,
        }
    }

    fn diagonal(&self, l: f64) -> f64 {
        let x = self.x;
        -self.eta - self.b * (x * x + 2.0 * x * l + x + l * (l + 1.0) - self.rho_k2)
            + 2.0 * self.root_bz * (self.b_seed + 2.0 * l)
            + self.zeta
    }

    /// `T[l−1][l]`, the lowering part.
    fn upper(&self, l: f64) -> f64 {
        self.b * l * (self.b_seed - 1.0 + l)
    }

    /// `T[l][l−1]`, the raising part.
    fn lower(&self, l: f64) -> f64 {
        2.0 * self.eta - 4.0 * self.root_bz * (self.x + l)
    }
}

/// The `T[l][l−1]` element that couples `z^{l−1}` up to `z^l`.
pub fn sub_diagonal(sector: Sector, config: &TopConfig, l: usize) -> f64 {
    Entries::new(sector, config, sector.sign() * config.zeta.sqrt()).lower(l as f64)
}

/// `(n+1)×(n+1)` leading block of the operator for any η.
pub fn block_matrix(sector: Sector, config: &TopConfig, n: usize) -> DMatrix<f64> {
    block_matrix_with_root(sector, config, n, sector.sign() * config.zeta.sqrt())
}

/// As [`block_matrix`] with an explicitly signed √ζ.
pub fn block_matrix_with_root(sector: Sector, config: &TopConfig, n: usize, root_zeta: f64) -> DMatrix<f64> {
    let e = Entries::new(sector, config, root_zeta);
    let dim = n + 1;
    let mut t = DMatrix::zeros(dim, dim);
    for l in 0..dim {
        t[(l, l)] = e.diagonal(l as f64);
        if l > 0 {
            t[(l - 1, l)] = e.upper(l as f64);
            t[(l, l - 1)] = e.lower(l as f64);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qhj::sector::{qs_eta, Branch};

    fn s(label: &str) -> Sector {
        label.parse().unwrap()
    }

    #[test]
    fn worked_two_by_two_block() {
        let c = TopConfig::integer(1, 2, 40.0, 25.0);
        let t = block_matrix(s("1+"), &c, 1);
        assert_eq!(t, DMatrix::from_row_slice(2, 2, &[19.0, 4.0, 20.0, 33.0]));
    }

    #[test]
    fn lowering_element_example() {
        let c = TopConfig::integer(1, 1, 0.0, 25.0);
        let t = block_matrix(s("3+"), &c, 1);
        assert_eq!(t[(0, 1)], -1.0);
    }

    #[test]
    fn decoupling_element_vanishes_on_condition() {
        let c = TopConfig::integer(1, 2, 40.0, 25.0);
        assert_eq!(sub_diagonal(s("1+"), &c, 2), 0.0);
        for sec in Sector::ALL {
            for n in 0..4 {
                let at = c.with_eta(qs_eta(sec, n, &c));
                assert!(sub_diagonal(sec, &at, n + 1).abs() < 1e-12);
                assert!(sub_diagonal(sec, &at, n).abs() > 1.0);
            }
        }
    }

    #[test]
    fn branches_differ_only_by_root_sign() {
        let c = TopConfig::integer(2, 1, 13.0, 7.0).with_rho(0.4);
        for f in 1..=4 {
            let minus = Sector::new(f, Branch::Minus).unwrap();
            let a = block_matrix(minus, &c, 3);
            let b = block_matrix_with_root(minus.with_branch(Branch::Plus), &c, 3, -c.zeta.sqrt());
            assert_eq!(a, b);
        }
    }
}
