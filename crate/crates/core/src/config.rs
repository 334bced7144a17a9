//! Physical parameters shared by every computation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::HalfInt;

/// Trigonometric top (potential in cos θ) or its hyperbolic partner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopKind {
    Trig,
    Hyper,
}

impl TopKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TopKind::Trig => "trig",
            TopKind::Hyper => "hyper",
        }
    }
}

impl std::str::FromStr for TopKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trig" | "trigonometric" => Ok(TopKind::Trig),
            "hyper" | "hyperbolic" => Ok(TopKind::Hyper),
            other => Err(Error::Config(format!("unknown top kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for TopKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rotational constant `b`, asymmetry `rho`, permanent-dipole strength `eta`,
/// induced-dipole strength `zeta` and the two conserved projections.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopConfig {
    pub b: f64,
    pub rho: f64,
    pub eta: f64,
    pub zeta: f64,
    pub k: HalfInt,
    pub m: HalfInt,
}

impl Default for TopConfig {
    fn default() -> Self {
        TopConfig { b: 1.0, rho: 0.0, eta: 0.0, zeta: 0.0, k: HalfInt::ZERO, m: HalfInt::ZERO }
    }
}

impl TopConfig {
    /// Unit rotational constant, no asymmetry, the given fields and projections.
    pub fn new(k: HalfInt, m: HalfInt, eta: f64, zeta: f64) -> Self {
        TopConfig { k, m, eta, zeta, ..Default::default() }
    }

    /// Convenience constructor for integer projections.
    pub fn integer(k: i32, m: i32, eta: f64, zeta: f64) -> Self {
        Self::new(HalfInt::from_int(k), HalfInt::from_int(m), eta, zeta)
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_b(mut self, b: f64) -> Self {
        self.b = b;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn kf(&self) -> f64 {
        self.k.value()
    }

    pub fn mf(&self) -> f64 {
        self.m.value()
    }

    /// Topological index η/√(Bζ). Infinite or NaN when ζ = 0.
    pub fn kappa(&self) -> f64 {
        self.eta / (self.b * self.zeta).sqrt()
    }

    /// True when K and M are both integers or both half-odd.
    pub fn same_parity(&self) -> bool {
        (self.k.twice() - self.m.twice()) % 2 == 0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(Error::Config(format!("B must be positive, got {}", self.b)));
        }
        if !(self.zeta.is_finite() && self.zeta >= 0.0) {
            return Err(Error::Config(format!("zeta must be non-negative, got {}", self.zeta)));
        }
        if !(self.rho.is_finite() && self.rho > -1.0) {
            return Err(Error::Config(format!("rho must exceed -1, got {}", self.rho)));
        }
        if !self.eta.is_finite() {
            return Err(Error::Config(format!("eta must be finite, got {}", self.eta)));
        }
        Ok(())
    }
}
