//! Exact arithmetic in the cyclotomic field Q(zeta_n).
//!
//! Elements are stored on the power basis 1, zeta, ..., zeta^(phi(n)-1),
//! reduced modulo the n-th cyclotomic polynomial. This is the unique
//! canonical form, so equality is coefficient-wise. The power basis is an
//! integral basis of Z[zeta_n], which is what makes the 2-power-denominator
//! test for membership in R_n = Z[zeta_n, 1/2] valid.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly;

/// Arbitrary-precision rational scalar. `Ratio` keeps gcd-reduced
/// numerators over positive denominators, which is exactly the canonical
/// form the rest of the crate relies on.
pub type Rat = BigRational;

pub fn rat(v: i64) -> Rat {
    Rat::from(BigInt::from(v))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn euler_phi(n: u64) -> u64 {
    let mut phi = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut pe = 1;
            while m % p == 0 {
                m /= p;
                pe *= p;
            }
            phi *= pe - pe / p;
        }
        p += 1;
    }
    if m > 1 {
        phi *= m - 1;
    }
    phi
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            divs.push(i);
            if i != n / i {
                divs.push(n / i);
            }
        }
        i += 1;
    }
    divs.sort_unstable();
    divs
}

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The n-th cyclotomic polynomial Phi_n as an integer coefficient vector,
/// computed by exact division of x^n - 1 by the product of Phi_d over the
/// proper divisors d of n. Results are cached process-wide.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "cyclotomic_poly: n must be positive");
    if let Some(hit) = phi_cache().lock().unwrap().get(&n) {
        return hit.clone();
    }
    let result = if n == 1 {
        vec![BigInt::from(-1), BigInt::from(1)]
    } else {
        let mut denom = vec![BigInt::from(1)];
        for d in divisors(n) {
            if d < n {
                let phi_d = cyclotomic_poly(d);
                denom = int_mul(&denom, &phi_d);
            }
        }
        let mut xn_minus_1 = vec![BigInt::from(0); (n + 1) as usize];
        xn_minus_1[0] = BigInt::from(-1);
        xn_minus_1[n as usize] = BigInt::from(1);
        poly::div_exact_int(&xn_minus_1, &denom)
    };
    let arc = Arc::new(result);
    phi_cache().lock().unwrap().insert(n, arc.clone());
    arc
}

fn int_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::from(0); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// An element of Q(zeta_n) in reduced power-basis form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycElem {
    n: u64,
    coeffs: Vec<Rat>,
}

impl CycElem {
    /// Builds an element from an arbitrary polynomial in zeta_n, reducing
    /// modulo Phi_n.
    pub fn from_poly(n: u64, coeffs: Vec<Rat>) -> Self {
        assert!(n >= 1);
        let phi = euler_phi(n) as usize;
        let modulus = cyclotomic_poly(n);
        let mut reduced = poly::rem_monic_int(coeffs, &modulus);
        reduced.resize(phi, Rat::zero());
        CycElem { n, coeffs: reduced }
    }

    pub fn zero(n: u64) -> Self {
        CycElem {
            n,
            coeffs: vec![Rat::zero(); euler_phi(n) as usize],
        }
    }

    pub fn one(n: u64) -> Self {
        Self::from_rat(n, Rat::one())
    }

    pub fn from_rat(n: u64, r: Rat) -> Self {
        let mut e = Self::zero(n);
        e.coeffs[0] = r;
        e
    }

    pub fn from_int(n: u64, v: i64) -> Self {
        Self::from_rat(n, rat(v))
    }

    /// zeta_n^k for any integer k.
    pub fn zeta_pow(n: u64, k: i64) -> Self {
        let kk = k.rem_euclid(n as i64) as usize;
        let mut coeffs = vec![Rat::zero(); kk + 1];
        coeffs[kk] = Rat::one();
        Self::from_poly(n, coeffs)
    }

    pub fn zeta(n: u64) -> Self {
        Self::zeta_pow(n, 1)
    }

    /// The square root of -1, available exactly when 4 | n.
    pub fn i_unit(n: u64) -> Result<Self> {
        if n % 4 != 0 {
            return Err(Error::LevelLacksI { n });
        }
        Ok(Self::zeta_pow(n, (n / 4) as i64))
    }

    /// 2 cos(2 pi k / n) = zeta^k + zeta^(-k), a real element.
    pub fn two_cos(n: u64, k: i64) -> Self {
        Self::zeta_pow(n, k) + Self::zeta_pow(n, -k)
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Rat::is_zero)
    }

    /// Returns the value as a rational if the element lies in Q.
    pub fn as_rational(&self) -> Option<Rat> {
        if self.coeffs[1..].iter().all(Rat::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LevelMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self * other)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// Phi_n, which is irreducible over Q.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero { n: self.n });
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rat(self.n, r.recip()));
        }
        let modulus = cyclotomic_poly(self.n);
        let m_q: poly::QPoly = modulus.iter().map(|c| Rat::from(c.clone())).collect();
        let mut a = self.coeffs.clone();
        poly::trim(&mut a);
        let inv = poly::inverse_mod(&a, &m_q)
            .ok_or_else(|| Error::InvariantViolation("Phi_n not coprime to nonzero residue".into()))?;
        Ok(Self::from_poly(self.n, inv))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self * &other.inv()?)
    }

    /// Applies the Galois automorphism zeta -> zeta^k; k must be prime to n.
    pub fn galois(&self, k: i64) -> Result<Self> {
        let n = self.n;
        let kk = k.rem_euclid(n as i64) as u64;
        if n > 1 && kk.gcd(&n) != 1 {
            return Err(Error::NotAutomorphism { n, k });
        }
        let mut out = vec![Rat::zero(); n as usize];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let idx = ((j as u64 * kk) % n) as usize;
                out[idx] += c;
            }
        }
        Ok(Self::from_poly(n, out))
    }

    /// Complex conjugation zeta -> zeta^(-1).
    pub fn conj(&self) -> Self {
        self.galois(-1).expect("conjugation is always an automorphism")
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Membership in R_n = Z[zeta_n, 1/2]: every coefficient denominator is
    /// a power of two. Valid because the power basis is integral.
    pub fn is_in_rn(&self) -> bool {
        self.coeffs.iter().all(|c| is_pow2(c.denom()))
    }

    /// Membership in R_n^+ = Z[zeta_n + zeta_n^(-1), 1/2]; uses
    /// R_n ∩ F_n = R_n^+.
    pub fn is_in_rn_plus(&self) -> bool {
        self.is_in_rn() && self.is_real()
    }

    /// Least k >= 0 such that 2^k times the element has integer
    /// coefficients. Errors if any denominator has an odd prime factor.
    pub fn denom_exp(&self) -> Result<u32> {
        let mut k = 0u32;
        for c in &self.coeffs {
            let den = c.denom();
            if !is_pow2(den) {
                return Err(Error::NotTwoLocal);
            }
            k = k.max(den.bits() as u32 - 1);
        }
        Ok(k)
    }

    /// Re-expresses the element at a level N divisible by n, via
    /// zeta_n = zeta_N^(N/n).
    pub fn level_raise(&self, new_level: u64) -> Result<Self> {
        if new_level % self.n != 0 {
            return Err(Error::unsupported(
                new_level,
                format!("{} does not divide {}", self.n, new_level),
            ));
        }
        let step = (new_level / self.n) as usize;
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() * step];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[j * step] = c.clone();
            }
        }
        Ok(Self::from_poly(new_level, coeffs))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = self.clone();
        let mut acc = Self::one(self.n);
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        CycElem {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Norm down to Q: the product of all Galois conjugates.
    pub fn field_norm(&self) -> Result<Rat> {
        let n = self.n;
        let mut acc = Self::one(n);
        for k in 1..=n {
            if k.gcd(&n) == 1 {
                acc = &acc * &self.galois(k as i64)?;
            }
        }
        acc.as_rational()
            .ok_or_else(|| Error::InvariantViolation("field norm not rational".into()))
    }
}

fn is_pow2(v: &BigInt) -> bool {
    if v.is_negative() || v.is_zero() {
        return false;
    }
    let m = v.magnitude();
    m.count_ones() == 1
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &CycElem {
            type Output = CycElem;
            fn $method(self, rhs: &CycElem) -> CycElem {
                assert_eq!(self.n, rhs.n, "cyclotomic level mismatch");
                CycElem {
                    n: self.n,
                    coeffs: self
                        .coeffs
                        .iter()
                        .zip(rhs.coeffs.iter())
                        .map(|(a, b)| a $op b)
                        .collect(),
                }
            }
        }
        impl std::ops::$trait for CycElem {
            type Output = CycElem;
            fn $method(self, rhs: CycElem) -> CycElem {
                (&self) $op (&rhs)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);

impl std::ops::Mul for &CycElem {
    type Output = CycElem;
    fn mul(self, rhs: &CycElem) -> CycElem {
        assert_eq!(self.n, rhs.n, "cyclotomic level mismatch");
        let prod = poly::mul(&self.coeffs, &rhs.coeffs);
        CycElem::from_poly(self.n, prod)
    }
}

impl std::ops::Mul for CycElem {
    type Output = CycElem;
    fn mul(self, rhs: CycElem) -> CycElem {
        (&self) * (&rhs)
    }
}

impl std::ops::Neg for &CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        CycElem {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::ops::Neg for CycElem {
    type Output = CycElem;
    fn neg(self) -> CycElem {
        -(&self)
    }
}

impl fmt::Display for CycElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if j == 0 {
                write!(f, "{}", c)?;
            } else if c.is_one() {
                write!(f, "z^{}", j)?;
            } else {
                write!(f, "({})*z^{}", c, j)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// JSON form: {"n": 8, "coeffs": [["num", "den"], ...]} with bit-exact
// decimal strings on the power basis.
impl serde::Serialize for CycElem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("CycElem", 2)?;
        st.serialize_field("n", &self.n)?;
        let coeffs: Vec<[String; 2]> = self
            .coeffs
            .iter()
            .map(|c| [c.numer().to_string(), c.denom().to_string()])
            .collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for CycElem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        #[derive(serde::Deserialize)]
        struct Raw {
            n: u64,
            coeffs: Vec<[String; 2]>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.n == 0 {
            return Err(DeError::custom("level must be positive"));
        }
        let phi = euler_phi(raw.n) as usize;
        if raw.coeffs.len() != phi {
            return Err(DeError::custom(format!(
                "expected {} coefficients for level {}, got {}",
                phi,
                raw.n,
                raw.coeffs.len()
            )));
        }
        let mut coeffs = Vec::with_capacity(phi);
        for [num, den] in &raw.coeffs {
            let num: BigInt = num
                .parse()
                .map_err(|_| DeError::custom(format!("bad integer {:?}", num)))?;
            let den: BigInt = den
                .parse()
                .map_err(|_| DeError::custom(format!("bad integer {:?}", den)))?;
            if den <= BigInt::zero() {
                return Err(DeError::custom("denominator must be positive"));
            }
            coeffs.push(Rat::new(num, den));
        }
        Ok(CycElem::from_poly(raw.n, coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn phi_1_is_x_minus_1() {
        assert_eq!(*cyclotomic_poly(1), vec![bi(-1), bi(1)]);
    }

    #[test]
    fn phi_8_is_x4_plus_1() {
        assert_eq!(*cyclotomic_poly(8), vec![bi(1), bi(0), bi(0), bi(0), bi(1)]);
    }

    #[test]
    fn phi_12_is_x4_minus_x2_plus_1() {
        assert_eq!(
            *cyclotomic_poly(12),
            vec![bi(1), bi(0), bi(-1), bi(0), bi(1)]
        );
    }

    #[test]
    fn phi_product_reconstructs_xn_minus_1() {
        for n in [6u64, 8, 12, 20, 21, 24] {
            let mut prod = vec![bi(1)];
            for d in divisors(n) {
                prod = int_mul(&prod, &cyclotomic_poly(d));
            }
            let mut expect = vec![bi(0); (n + 1) as usize];
            expect[0] = bi(-1);
            expect[n as usize] = bi(1);
            assert_eq!(prod, expect, "n = {}", n);
            assert_eq!(cyclotomic_poly(n).len() as u64, euler_phi(n) + 1);
        }
    }

    #[test]
    fn zeta_power_relation() {
        let z = CycElem::zeta(8);
        let z7 = CycElem::zeta_pow(8, 7);
        assert!((&z * &z7).is_one());
    }

    #[test]
    fn rational_inverse() {
        let two = CycElem::from_int(12, 2);
        assert_eq!(two.inv().unwrap(), CycElem::from_rat(12, rat_frac(1, 2)));
    }

    #[test]
    fn sqrt2_squares_to_two() {
        // (zeta_8 - zeta_8^3)^2 = 2
        let s = CycElem::zeta(8) - CycElem::zeta_pow(8, 3);
        assert_eq!(&s * &s, CycElem::from_int(8, 2));
    }

    #[test]
    fn conjugation_fixes_real_combination() {
        let a = CycElem::zeta(8) + CycElem::zeta_pow(8, -1);
        assert_eq!(a.conj(), a);
        assert!(a.is_real());
        assert_eq!(CycElem::zeta(8).conj(), CycElem::zeta_pow(8, 7));
    }

    #[test]
    fn galois_order_two_at_12() {
        let z = CycElem::zeta(12);
        let once = z.galois(5).unwrap();
        assert_eq!(once.galois(5).unwrap(), z);
    }

    #[test]
    fn galois_rejects_non_unit() {
        assert_eq!(
            CycElem::zeta(12).galois(3).unwrap_err(),
            Error::NotAutomorphism { n: 12, k: 3 }
        );
    }

    #[test]
    fn rn_membership_and_denom_exp() {
        let half = CycElem::from_rat(8, rat_frac(1, 2));
        assert!(half.is_in_rn());
        assert_eq!(half.denom_exp().unwrap(), 1);

        let third = CycElem::from_rat(8, rat_frac(1, 3));
        assert!(!third.is_in_rn());
        assert_eq!(third.denom_exp().unwrap_err(), Error::NotTwoLocal);

        // (1 + zeta_4)/2 at n = 8: in R_n but not real.
        let i = CycElem::i_unit(8).unwrap();
        let x = (CycElem::one(8) + i).scale(&rat_frac(1, 2));
        assert!(x.is_in_rn());
        assert!(!x.is_real());
        assert!(!x.is_in_rn_plus());
    }

    #[test]
    fn i_unit_requires_4_divides_n() {
        assert_eq!(CycElem::i_unit(6).unwrap_err(), Error::LevelLacksI { n: 6 });
        let i = CycElem::i_unit(12).unwrap();
        assert_eq!(&i * &i, CycElem::from_int(12, -1));
    }

    #[test]
    fn inversion_of_zero_fails() {
        assert_eq!(
            CycElem::zero(8).inv().unwrap_err(),
            Error::DivisionByZero { n: 8 }
        );
    }

    #[test]
    fn level_mismatch_detected() {
        let a = CycElem::one(8);
        let b = CycElem::one(12);
        assert_eq!(
            a.checked_add(&b).unwrap_err(),
            Error::LevelMismatch { left: 8, right: 12 }
        );
    }

    #[test]
    fn level_raise_embeds_sqrt2() {
        let s8 = CycElem::zeta(8) - CycElem::zeta_pow(8, 3);
        let s24 = s8.level_raise(24).unwrap();
        assert_eq!(&s24 * &s24, CycElem::from_int(24, 2));
        assert!(s24.is_real());
    }

    #[test]
    fn field_norm_of_golden_like_unit() {
        // N(zeta_8 - zeta_8^3) = product over 4 conjugates = (sqrt2 * -sqrt2)^2 / ...
        let s = CycElem::zeta(8) - CycElem::zeta_pow(8, 3);
        assert_eq!(s.field_norm().unwrap(), rat(4));
    }

    #[test]
    fn json_round_trip() {
        let x = (CycElem::zeta(8) + CycElem::from_rat(8, rat_frac(3, 2))).inv().unwrap();
        let text = serde_json::to_string(&x).unwrap();
        let back: CycElem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn json_rejects_wrong_length() {
        let bad = r#"{"n": 8, "coeffs": [["1","1"]]}"#;
        assert!(serde_json::from_str::<CycElem>(bad).is_err());
    }
}
