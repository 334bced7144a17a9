//! Exact Wigner 3-j symbols and the symmetric-top matrix elements of
//! cos θ and cos²θ.

use std::cell::RefCell;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::half::HalfInt;

/// Arguments `(j1 j2 j3; m1 m2 m3)` of a 3-j symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ThreeJArgs {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub j3: HalfInt,
    pub m1: HalfInt,
    pub m2: HalfInt,
    pub m3: HalfInt,
}

impl ThreeJArgs {
    /// Build from twice-values `[j1, j2, j3]`, `[m1, m2, m3]`.
    pub fn from_twice(j: [i32; 3], m: [i32; 3]) -> Self {
        ThreeJArgs {
            j1: HalfInt::from_twice(j[0]),
            j2: HalfInt::from_twice(j[1]),
            j3: HalfInt::from_twice(j[2]),
            m1: HalfInt::from_twice(m[0]),
            m2: HalfInt::from_twice(m[1]),
            m3: HalfInt::from_twice(m[2]),
        }
    }

    /// Build from integer arguments.
    pub fn ints(j: [i32; 3], m: [i32; 3]) -> Self {
        Self::from_twice(j.map(|v| 2 * v), m.map(|v| 2 * v))
    }

    fn js(&self) -> [i32; 3] {
        [self.j1.twice(), self.j2.twice(), self.j3.twice()]
    }

    fn ms(&self) -> [i32; 3] {
        [self.m1.twice(), self.m2.twice(), self.m3.twice()]
    }
}

/// Exact value `rational · √radicand`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeJValue {
    pub rational: BigRational,
    pub radicand: BigRational,
}

impl ThreeJValue {
    pub fn zero() -> Self {
        ThreeJValue { rational: BigRational::zero(), radicand: BigRational::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() || self.radicand.is_zero()
    }

    /// Exact square of the value.
    pub fn square(&self) -> BigRational {
        &self.rational * &self.rational * &self.radicand
    }

    /// Correctly rounded square root of the exact square, with the sign attached.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mag = self.square().to_f64().unwrap_or(f64::NAN).sqrt();
        if self.rational.is_negative() {
            -mag
        } else {
            mag
        }
    }
}

thread_local! {
    static FACTORIALS: RefCell<Vec<BigUint>> = RefCell::new(vec![BigUint::one()]);
}

fn factorial(n: usize) -> BigUint {
    FACTORIALS.with(|cell| {
        let mut table = cell.borrow_mut();
        while table.len() <= n {
            let next = table.last().unwrap() * BigUint::from(table.len());
            table.push(next);
        }
        table[n].clone()
    })
}

/// Product `(lo+1)(lo+2)…hi`, one when `hi ≤ lo`.
fn rising(lo: i64, hi: i64) -> BigUint {
    let mut p = BigUint::one();
    for v in (lo + 1)..=hi {
        p *= BigUint::from(v as u64);
    }
    p
}

/// Exact 3-j symbol by the Racah single-sum formula.
pub fn wigner3j(args: ThreeJArgs) -> Result<ThreeJValue> {
    let j = args.js();
    let m = args.ms();
    for i in 0..3 {
        if j[i] < 0 {
            return Err(Error::Domain(format!("negative angular momentum {}", HalfInt::from_twice(j[i]))));
        }
        if (j[i] + m[i]) % 2 != 0 {
            return Err(Error::Domain(format!(
                "j + m must be an integer, got j = {}, m = {}",
                HalfInt::from_twice(j[i]),
                HalfInt::from_twice(m[i])
            )));
        }
    }
    if m[0] + m[1] + m[2] != 0 {
        return Ok(ThreeJValue::zero());
    }
    if (0..3).any(|i| m[i].abs() > j[i]) {
        return Ok(ThreeJValue::zero());
    }
    let (j1, j2, j3) = (j[0], j[1], j[2]);
    if j3 < (j1 - j2).abs() || j3 > j1 + j2 || (j1 + j2 + j3) % 2 != 0 {
        return Ok(ThreeJValue::zero());
    }
    let (m1, m2, m3) = (m[0], m[1], m[2]);
    // All quantities below are integers (halved twice-values).
    let h = |v: i32| -> i64 { (v / 2) as i64 };
    let a = h(j3 - j2 + m1);
    let b = h(j3 - j1 - m2);
    let c = h(j1 + j2 - j3);
    let d = h(j1 - m1);
    let e = h(j2 + m2);
    let tmin = 0.max(-a).max(-b);
    let tmax = c.min(d).min(e);

    let fact = |v: i64| factorial(v as usize);
    // Common denominator of every 1/[t!(a+t)!(b+t)!(c−t)!(d−t)!(e−t)!].
    let common = fact(tmax) * fact(a + tmax) * fact(b + tmax) * fact(c - tmin) * fact(d - tmin) * fact(e - tmin);
    let mut numer = BigInt::zero();
    for t in tmin..=tmax {
        let term = rising(t, tmax)
            * rising(a + t, a + tmax)
            * rising(b + t, b + tmax)
            * rising(c - t, c - tmin)
            * rising(d - t, d - tmin)
            * rising(e - t, e - tmin);
        let term = BigInt::from(term);
        if t % 2 == 0 {
            numer += term;
        } else {
            numer -= term;
        }
    }
    let phase = h(j1 - j2 - m3);
    if phase.rem_euclid(2) == 1 {
        numer = -numer;
    }
    let rational = BigRational::new(numer, BigInt::from(common));

    let triangle = BigRational::new(
        BigInt::from(fact(h(j1 + j2 - j3)) * fact(h(j1 - j2 + j3)) * fact(h(-j1 + j2 + j3))),
        BigInt::from(fact(h(j1 + j2 + j3) + 1)),
    );
    let mut projections = BigUint::one();
    for i in 0..3 {
        projections *= fact(h(j[i] + m[i])) * fact(h(j[i] - m[i]));
    }
    let radicand = triangle * BigRational::from_integer(BigInt::from(projections));
    Ok(ThreeJValue { rational, radicand })
}

/// Floating-point view of [`wigner3j`].
pub fn wigner3j_f64(args: ThreeJArgs) -> Result<f64> {
    wigner3j(args).map(|v| v.to_f64())
}

/// Symmetric-top state `|J K M⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisState {
    pub j: HalfInt,
    pub k: HalfInt,
    pub m: HalfInt,
}

impl BasisState {
    pub fn new(j: HalfInt, k: HalfInt, m: HalfInt) -> Self {
        BasisState { j, k, m }
    }

    pub fn ints(j: i32, k: i32, m: i32) -> Self {
        BasisState::new(HalfInt::from_int(j), HalfInt::from_int(k), HalfInt::from_int(m))
    }

    /// `J ≥ |K|, |M|` with `J − K` and `J − M` integers.
    pub fn is_valid(&self) -> bool {
        let (j, k, m) = (self.j.twice(), self.k.twice(), self.m.twice());
        j >= k.abs() && j >= m.abs() && (j - k) % 2 == 0 && (j - m) % 2 == 0
    }
}

/// `⟨J′KM| D^rank_00 |JKM⟩` for rank 0, 1 or 2, by the Gaunt integral.
fn rank_element(bra: BasisState, ket: BasisState, rank: i32) -> f64 {
    if bra.k != ket.k || bra.m != ket.m || !bra.is_valid() || !ket.is_valid() {
        return 0.0;
    }
    let (jp, j) = (bra.j.twice(), ket.j.twice());
    if (jp - j).abs() > 2 * rank {
        return 0.0;
    }
    let (k, m) = (ket.k.twice(), ket.m.twice());
    let r = 2 * rank;
    let mk = wigner3j(ThreeJArgs::from_twice([jp, r, j], [-m, 0, m])).expect("valid arguments");
    if mk.is_zero() {
        return 0.0;
    }
    let kk = wigner3j(ThreeJArgs::from_twice([jp, r, j], [-k, 0, k])).expect("valid arguments");
    if kk.is_zero() {
        return 0.0;
    }
    let dim = ((jp + 1) as f64 * (j + 1) as f64).sqrt();
    let phase = if ((m - k) / 2).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    phase * dim * mk.to_f64() * kk.to_f64()
}

/// `⟨J′K′M′| cos θ |JKM⟩`.
pub fn cos_element(bra: BasisState, ket: BasisState) -> f64 {
    rank_element(bra, ket, 1)
}

/// `⟨J′K′M′| cos²θ |JKM⟩`, using cos²θ = (2/3)·D²₀₀ + 1/3.
///
/// When both K and M are nonzero the element also couples ΔJ = ±1.
pub fn cos2_element(bra: BasisState, ket: BasisState) -> f64 {
    let mut v = 2.0 / 3.0 * rank_element(bra, ket, 2);
    if bra == ket && ket.is_valid() {
        v += 1.0 / 3.0;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};
    use proptest::prelude::*;

    fn fact_f(n: i32) -> f64 {
        (1..=n).map(|v| v as f64).product()
    }

    /// Wigner small-d from its explicit sum, in floating point.
    fn small_d(j2: i32, mp2: i32, m2: i32, beta: f64) -> f64 {
        let (jpm, jmm, jpn, jmn) = ((j2 + mp2) / 2, (j2 - mp2) / 2, (j2 + m2) / 2, (j2 - m2) / 2);
        let pre = (fact_f(jpm) * fact_f(jmm) * fact_f(jpn) * fact_f(jmn)).sqrt();
        let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        let mut total = 0.0;
        let dm = (mp2 - m2) / 2;
        for k in 0..=(j2 + 1) {
            let (a1, a2, a3) = (jpn - k, dm + k, jmm - k);
            if a1 < 0 || a2 < 0 || a3 < 0 {
                continue;
            }
            let sign = if (dm + k) % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * pre / (fact_f(a1) * fact_f(k) * fact_f(a2) * fact_f(a3))
                * c.powi(j2 - 2 * k - dm)
                * s.powi(dm + 2 * k);
        }
        total
    }

    /// Euler-angle quadrature of the element of f(cos θ).
    fn oracle(bra: BasisState, ket: BasisState, f: fn(f64) -> f64) -> f64 {
        if bra.k != ket.k || bra.m != ket.m {
            return 0.0;
        }
        let (jp, j, k, m) = (bra.j.twice(), ket.j.twice(), ket.k.twice(), ket.m.twice());
        let norm = (((jp + 1) * (j + 1)) as f64).sqrt() / 2.0;
        let (v, _) = integrate(
            |b| small_d(jp, m, k, b) * small_d(j, m, k, b) * f(b.cos()) * b.sin(),
            0.0,
            std::f64::consts::PI,
            QuadOptions { abs_tol: 1e-14, rel_tol: 1e-14, max_intervals: 2000 },
        )
        .unwrap();
        norm * v
    }

    #[test]
    fn trivial_values() {
        assert_eq!(wigner3j_f64(ThreeJArgs::ints([0, 0, 0], [0, 0, 0])).unwrap(), 1.0);
        assert_eq!(wigner3j_f64(ThreeJArgs::ints([1, 1, 2], [0, 0, 1])).unwrap(), 0.0);
    }

    #[test]
    fn known_value_matches_brute_force_racah() {
        // √(2/15) from the Racah sum evaluated by hand with integers.
        let v = wigner3j(ThreeJArgs::ints([1, 1, 2], [0, 0, 0])).unwrap();
        assert_eq!(v.square(), BigRational::new(2.into(), 15.into()));
        assert!((v.to_f64() - (2.0f64 / 15.0).sqrt()).abs() < 1e-16);
    }

    #[test]
    fn half_integer_value() {
        // (1/2 1/2 1; 1/2 -1/2 0) = 1/√6
        let v = wigner3j_f64(ThreeJArgs::from_twice([1, 1, 2], [1, -1, 0])).unwrap();
        assert!((v - 1.0 / 6f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn malformed_half_integer_is_domain_error() {
        assert!(matches!(wigner3j(ThreeJArgs::from_twice([1, 1, 2], [0, 0, 0])), Err(Error::Domain(_))));
    }

    #[test]
    fn large_j_stays_accurate() {
        // (j j 0; m -m 0) = (-1)^{j-m}/√(2j+1)
        for (j, m) in [(100, 0), (100, 37), (99, -50)] {
            let v = wigner3j_f64(ThreeJArgs::ints([j, j, 0], [m, -m, 0])).unwrap();
            let sign = if (j - m) % 2 == 0 { 1.0 } else { -1.0 };
            let expect = sign / ((2 * j + 1) as f64).sqrt();
            assert!(((v - expect) / expect).abs() < 1e-14);
        }
    }

    #[test]
    fn orthogonality_up_to_ten() {
        for j1 in 0..=20 {
            for j2 in 0..=20 {
                for m1 in (-j1..=j1).step_by(2) {
                    for m2 in (-j2..=j2).step_by(2) {
                        let mut sum = 0.0;
                        let mut j3 = (j1 - j2).abs();
                        while j3 <= j1 + j2 {
                            let v = wigner3j_f64(ThreeJArgs::from_twice([j1, j2, j3], [m1, m2, -m1 - m2])).unwrap();
                            sum += (j3 + 1) as f64 * v * v;
                            j3 += 2;
                        }
                        assert!((sum - 1.0).abs() < 1e-12, "j1={j1} j2={j2} m1={m1} m2={m2}: {sum}");
                    }
                }
            }
        }
    }

    #[test]
    fn cos_examples() {
        let v = cos_element(BasisState::ints(1, 0, 0), BasisState::ints(0, 0, 0));
        assert!((v - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(cos_element(BasisState::ints(3, 1, 1), BasisState::ints(1, 1, 1)), 0.0);
        for j in 0..20 {
            let v = cos_element(BasisState::ints(j + 1, 0, 0), BasisState::ints(j, 0, 0));
            let jf = j as f64;
            let expect = (jf + 1.0) / ((2.0 * jf + 1.0) * (2.0 * jf + 3.0)).sqrt();
            assert!((v - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn cos2_examples() {
        let g = BasisState::ints(0, 0, 0);
        assert!((cos2_element(g, g) - 1.0 / 3.0).abs() < 1e-15);
        let v = cos2_element(BasisState::ints(2, 0, 0), g);
        assert!((v - 2.0 / (3.0 * 5f64.sqrt())).abs() < 1e-15);
        assert_eq!(cos2_element(BasisState::ints(3, 0, 1), BasisState::ints(2, 0, 1)), 0.0);
    }

    #[test]
    fn cos2_couples_odd_steps_when_both_projections_nonzero() {
        let v = cos2_element(BasisState::ints(2, 1, 1), BasisState::ints(1, 1, 1));
        let o = oracle(BasisState::ints(2, 1, 1), BasisState::ints(1, 1, 1), |c| c * c);
        assert!(v.abs() > 0.1);
        assert!((v - o).abs() < 1e-10);
    }

    #[test]
    fn elements_match_euler_quadrature() {
        for k in -2..=2 {
            for m in -2..=2 {
                let jmin = k.abs().max(m.abs());
                for j in jmin..=6 {
                    for jp in jmin..=6 {
                        let (bra, ket) = (BasisState::ints(jp, k, m), BasisState::ints(j, k, m));
                        let c1 = cos_element(bra, ket);
                        let c2 = cos2_element(bra, ket);
                        assert!((c1 - oracle(bra, ket, |c| c)).abs() < 1e-10, "cos {bra:?} {ket:?}");
                        assert!((c2 - oracle(bra, ket, |c| c * c)).abs() < 1e-10, "cos2 {bra:?} {ket:?}");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn column_permutation_symmetry(j1 in 0i32..8, j2 in 0i32..8, dj in 0i32..8, a in 0i32..16, b in 0i32..16) {
            let j3 = (j1 - j2).abs() + dj.min(j1 + j2 - (j1 - j2).abs());
            let m1 = -j1 + a % (2 * j1 + 1);
            let m2 = -j2 + b % (2 * j2 + 1);
            let m3 = -m1 - m2;
            prop_assume!(m3.abs() <= j3);
            let v = |js: [i32; 3], ms: [i32; 3]| wigner3j_f64(ThreeJArgs::ints(js, ms)).unwrap();
            let base = v([j1, j2, j3], [m1, m2, m3]);
            let odd = if (j1 + j2 + j3) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((v([j2, j3, j1], [m2, m3, m1]) - base).abs() < 1e-14);
            prop_assert!((v([j3, j1, j2], [m3, m1, m2]) - base).abs() < 1e-14);
            prop_assert!((v([j2, j1, j3], [m2, m1, m3]) - odd * base).abs() < 1e-14);
            prop_assert!((v([j1, j3, j2], [m1, m3, m2]) - odd * base).abs() < 1e-14);
        }

        #[test]
        fn elements_are_symmetric(j in 0i32..12, dj in 0i32..3, k in -3i32..=3, m in -3i32..=3) {
            let j = j.max(k.abs()).max(m.abs());
            let (a, b) = (BasisState::ints(j, k, m), BasisState::ints(j + dj, k, m));
            prop_assert!((cos_element(a, b) - cos_element(b, a)).abs() < 1e-15);
            prop_assert!((cos2_element(a, b) - cos2_element(b, a)).abs() < 1e-15);
        }
    }
}
