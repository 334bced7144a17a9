use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::TopConfig;
use crate::error::{Error, Result};

/// Sign in front of √ζ in the fixed momentum function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

/// One of the eight algebraic sectors `1±, …, 4±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Sector {
    family: u8,
    branch: Branch,
}

impl Sector {
    pub const ALL: [Sector; 8] = [
        Sector { family: 1, branch: Branch::Plus },
        Sector { family: 1, branch: Branch::Minus },
        Sector { family: 2, branch: Branch::Plus },
        Sector { family: 2, branch: Branch::Minus },
        Sector { family: 3, branch: Branch::Plus },
        Sector { family: 3, branch: Branch::Minus },
        Sector { family: 4, branch: Branch::Plus },
        Sector { family: 4, branch: Branch::Minus },
    ];

    pub fn new(family: u8, branch: Branch) -> Result<Self> {
        if !(1..=4).contains(&family) {
            return Err(Error::Domain(format!("sector family must be 1..4, got {family}")));
        }
        Ok(Sector { family, branch })
    }

    pub fn family(self) -> u8 {
        self.family
    }

    pub fn branch(self) -> Branch {
        self.branch
    }

    /// ±1 for the branch.
    pub fn sign(self) -> f64 {
        self.branch.sign()
    }

    pub fn with_branch(self, branch: Branch) -> Self {
        Sector { branch, ..self }
    }

    /// `(a, b)`: twice the residues at z = 1 and z = 0 in units of √B.
    pub fn pole_coefficients(self, k: f64, m: f64) -> (f64, f64) {
        match self.family {
            1 => (-k + m + 1.0, k + m + 1.0),
            2 => (k - m + 1.0, k + m + 1.0),
            3 => (-k + m + 1.0, -k - m + 1.0),
            _ => (k - m + 1.0, -k - m + 1.0),
        }
    }

    /// Powers of sin(θ/2) and cos(θ/2) in the seed function.
    pub fn seed_exponents(self, k: f64, m: f64) -> (f64, f64) {
        let (a, b) = self.pole_coefficients(k, m);
        (a - 1.0, b - 1.0)
    }

    /// The projection entering the quasi-solvability condition: M, K, −K or −M.
    pub fn qs_index(self, k: f64, m: f64) -> f64 {
        match self.family {
            1 => m,
            2 => k,
            3 => -k,
            _ => -m,
        }
    }

    /// Plotting color of the family.
    pub fn color(self) -> &'static str {
        match self.family {
            1 => "black",
            2 => "yellow",
            3 => "red",
            _ => "green",
        }
    }

    pub fn label(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.branch {
            Branch::Plus => '+',
            Branch::Minus => '-',
        };
        write!(f, "{}{}", self.family, s)
    }
}

impl FromStr for Sector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::Domain(format!("'{s}' is not a sector label like 1+ or 3-"));
        let mut chars = t.chars();
        let family = chars.next().and_then(|c| c.to_digit(10)).ok_or_else(bad)? as u8;
        let branch = match chars.as_str() {
            "+" | "p" | "plus" => Branch::Plus,
            "-" | "m" | "minus" => Branch::Minus,
            _ => return Err(bad()),
        };
        Sector::new(family, branch).map_err(|_| bad())
    }
}

/// The field strength at which a sector's block of size n+1 decouples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsCondition {
    pub sector: Sector,
    pub n: usize,
    pub eta: f64,
    pub kappa: f64,
}

/// Required η for sector `sector` and cutoff `n`, ignoring `config.eta`.
pub fn qs_eta(sector: Sector, n: usize, config: &TopConfig) -> f64 {
    let x = sector.qs_index(config.kf(), config.mf());
    sector.sign() * 2.0 * config.b.sqrt() * (x + n as f64 + 1.0) * config.zeta.sqrt()
}

/// Full condition record including κ.
pub fn qs_condition(sector: Sector, n: usize, config: &TopConfig) -> QsCondition {
    let eta = qs_eta(sector, n, config);
    QsCondition { sector, n, eta, kappa: eta / (config.b * config.zeta).sqrt() }
}

/// Whether `config.eta` sits on the condition to within 1e-12·max(1, |η|).
pub fn satisfies_qs(sector: Sector, n: usize, config: &TopConfig) -> bool {
    let target = qs_eta(sector, n, config);
    (config.eta - target).abs() <= 1e-12 * config.eta.abs().max(1.0)
}

/// All conditions with `n ≤ n_max`, sector-major.
pub fn qs_table(config: &TopConfig, n_max: usize) -> Vec<QsCondition> {
    Sector::ALL
        .iter()
        .flat_map(|&s| (0..=n_max).map(move |n| qs_condition(s, n, config)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(label: &str) -> Sector {
        label.parse().unwrap()
    }

    #[test]
    fn qs_examples() {
        let c = TopConfig::integer(1, 2, 0.0, 25.0);
        let q = qs_condition(s("1+"), 0, &c);
        assert_eq!((q.eta, q.kappa), (30.0, 6.0));
        assert_eq!(qs_eta(s("3+"), 0, &c), 0.0);
        assert_eq!(qs_eta(s("4-"), 0, &c), 10.0);
    }

    #[test]
    fn labels_round_trip() {
        for sec in Sector::ALL {
            assert_eq!(sec.to_string().parse::<Sector>().unwrap(), sec);
        }
        assert!("5+".parse::<Sector>().is_err());
        assert!("1x".parse::<Sector>().is_err());
    }

    #[test]
    fn table_has_eight_sectors_per_cutoff() {
        let c = TopConfig::integer(1, 2, 0.0, 25.0);
        assert_eq!(qs_table(&c, 3).len(), 32);
    }

    #[test]
    fn consecutive_cutoffs_are_evenly_spaced() {
        let c = TopConfig::integer(1, 2, 0.0, 25.0).with_b(2.0);
        for sec in Sector::ALL {
            for n in 0..5 {
                let d = qs_eta(sec, n + 1, &c) - qs_eta(sec, n, &c);
                assert!((d.abs() - 2.0 * (c.b * c.zeta).sqrt()).abs() < 1e-12);
            }
        }
    }
}
