//! Rigorous enclosures of the real embeddings of elements of the maximal
//! real subfield F_n of Q(zeta_n).
//!
//! A real element a (fixed by conjugation) has phi(n)/2 real embeddings,
//! indexed by the cosets {k, -k} of (Z/nZ)^x; the k-th sends a to
//! sum_j c_j cos(2 pi j k / n). We enclose each value in a rational
//! interval and refine adaptively. All endpoints are exact rationals, so a
//! sign decided here is a proof, not a float heuristic. Termination of the
//! refinement loops is guaranteed for nonzero input because nonzero
//! algebraic numbers have nonzero embedding values.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::{CycElem, Rat};
use crate::error::{Error, Result};

/// Closed rational interval [lo, hi].
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RatInterval {
    pub fn point(v: Rat) -> Self {
        RatInterval { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn add(&self, other: &Self) -> Self {
        RatInterval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        RatInterval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Self {
        RatInterval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let candidates = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            if *c < lo {
                lo = c.clone();
            }
            if *c > hi {
                hi = c.clone();
            }
        }
        RatInterval { lo, hi }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        if r.is_negative() {
            RatInterval {
                lo: &self.hi * r,
                hi: &self.lo * r,
            }
        } else {
            RatInterval {
                lo: &self.lo * r,
                hi: &self.hi * r,
            }
        }
    }

    /// Rounds endpoints outward onto the dyadic grid 2^(-bits) to keep
    /// denominators from ballooning during long accumulations.
    pub fn round_out(&self, bits: u32) -> Self {
        RatInterval {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
        }
    }
}

fn floor_dyadic(x: &Rat, bits: u32) -> Rat {
    let scaled = x.numer() << bits;
    let q = scaled.div_floor(x.denom());
    Rat::new(q, BigInt::one() << bits)
}

fn ceil_dyadic(x: &Rat, bits: u32) -> Rat {
    let scaled = x.numer() << bits;
    let q = scaled.div_ceil(x.denom());
    Rat::new(q, BigInt::one() << bits)
}

/// arctan(1/x) for integer x >= 2, bracketed by consecutive partial sums of
/// the alternating Leibniz series.
fn atan_recip(x: i64, bits: u32) -> RatInterval {
    let threshold = Rat::new(BigInt::one(), BigInt::one() << (bits + 4));
    let x2 = Rat::from(BigInt::from(x * x));
    let mut term = Rat::new(BigInt::one(), BigInt::from(x));
    let mut sum = Rat::zero();
    let mut k = 0u32;
    loop {
        let contrib = &term / Rat::from(BigInt::from(2 * k as i64 + 1));
        if contrib < threshold {
            // alternating series: truncation error bounded by next term
            return if k % 2 == 0 {
                RatInterval {
                    lo: sum.clone(),
                    hi: sum + contrib,
                }
            } else {
                RatInterval {
                    lo: &sum - &contrib,
                    hi: sum,
                }
            };
        }
        if k % 2 == 0 {
            sum += contrib;
        } else {
            sum -= contrib;
        }
        term = &term / &x2;
        k += 1;
    }
}

/// Machin: pi = 16 atan(1/5) - 4 atan(1/239), cached per precision.
pub fn pi_interval(bits: u32) -> RatInterval {
    static CACHE: OnceLock<Mutex<HashMap<u32, RatInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&bits) {
        return hit.clone();
    }
    let a = atan_recip(5, bits + 6).scale(&Rat::from(BigInt::from(16)));
    let b = atan_recip(239, bits + 6).scale(&Rat::from(BigInt::from(4)));
    let pi = a.sub(&b).round_out(bits + 2);
    cache.lock().unwrap().insert(bits, pi.clone());
    pi
}

/// cos(2 pi t / n) enclosed to roughly `bits` of precision.
///
/// The argument is folded into |x| <= pi/4 using the symmetries of the
/// cosine, where the Taylor series contracts and truncation plus rounding
/// errors admit easy rigorous bounds.
pub fn cos_2pi_frac(t: u64, n: u64, bits: u32) -> RatInterval {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u32), RatInterval>>> = OnceLock::new();
    let t = t % n;
    let key = (t, n, bits);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }
    // theta in [0, 1/2] by cos(2 pi theta) = cos(2 pi (1 - theta))
    let mut theta = Rat::new(BigInt::from(t), BigInt::from(n));
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let quarter = Rat::new(BigInt::one(), BigInt::from(4));
    let eighth = Rat::new(BigInt::one(), BigInt::from(8));
    if theta > half {
        theta = Rat::one() - theta;
    }
    let out = if theta <= eighth {
        trig_series(&theta, bits, Series::Cos)
    } else if theta <= &half - &eighth {
        // cos(2 pi theta) = sin(2 pi (1/4 - theta)), odd in the argument
        trig_series(&(&quarter - &theta), bits, Series::Sin)
    } else {
        trig_series(&(&half - &theta), bits, Series::Cos).neg()
    };
    let out = out.round_out(bits + 2);
    cache.lock().unwrap().insert(key, out.clone());
    out
}

#[derive(Clone, Copy)]
enum Series {
    Cos,
    Sin,
}

/// cos or sin of 2 pi psi for rational |psi| <= 1/8, via Taylor at a
/// dyadically rounded midpoint of the enclosed angle.
fn trig_series(psi: &Rat, bits: u32, kind: Series) -> RatInterval {
    let work = bits + 16;
    let x = pi_interval(bits + 10).scale(&(psi * Rat::from(BigInt::from(2))));
    let mid = (&x.lo + &x.hi) / Rat::from(BigInt::from(2));
    let m = floor_dyadic(&mid, work);
    // |m| <= pi/4 + eps: radius covers both the angle width and the snap
    let radius = {
        let r = (&x.hi - &x.lo) / Rat::from(BigInt::from(2));
        let drift = (&mid - &m).abs();
        r + drift
    };
    let threshold = Rat::new(BigInt::one(), BigInt::one() << (bits + 4));
    let m2 = &m * &m;
    let (mut sum, mut term, odd) = match kind {
        Series::Cos => (Rat::one(), Rat::one(), 0i64),
        Series::Sin => (m.clone(), m.clone(), 1i64),
    };
    let mut j = 0i64;
    let mut steps = 0u32;
    let err = loop {
        // magnitude of the next term: |m|^(2j+2+odd) / (2j+2+odd)!
        let next = (&term * &m2)
            / Rat::from(BigInt::from((2 * j + 1 + odd) * (2 * j + 2 + odd)));
        let next_abs = next.abs();
        if next_abs < threshold || steps > 2000 {
            break next_abs;
        }
        term = floor_dyadic(&(-next), work);
        sum = floor_dyadic(&(&sum + &term), work);
        j += 1;
        steps += 1;
    };
    // Each iteration floors twice at `work` bits; with |m| <= 0.79 the
    // series contracts, so accumulated rounding stays below steps * 4 ulps.
    // 2^10 ulps is a generous ceiling for the <= 2000 permitted steps times
    // the O(1) contraction sum.
    let slop = Rat::new(BigInt::from(4 * (steps as i64 + 4)), BigInt::one() << work);
    let total = err + &radius + slop;
    RatInterval {
        lo: &sum - &total,
        hi: &sum + &total,
    }
}

/// The canonical coset representatives indexing the real embeddings of F_n.
pub fn real_coset_reps(n: u64) -> Vec<u64> {
    if n <= 2 {
        return vec![1];
    }
    let mut reps = Vec::new();
    for k in 1..n {
        if 2 * k > n {
            break;
        }
        if k.gcd(&n) == 1 {
            reps.push(k);
        }
    }
    reps
}

/// Interval enclosures of all real embeddings of a conjugation-fixed
/// element, one per coset representative, at roughly `bits` precision.
pub fn embedding_intervals(a: &CycElem, bits: u32) -> Result<Vec<RatInterval>> {
    if !a.is_real() {
        return Err(Error::NotReal);
    }
    let n = a.level();
    if n <= 2 {
        let v = a.coeffs()[0].clone();
        return Ok(vec![RatInterval::point(v)]);
    }
    // scale working precision by the coefficient magnitude so the final
    // width is still about 2^-bits
    let mut size = Rat::one();
    for c in a.coeffs() {
        size += c.abs();
    }
    let extra = (size.to_integer().bits() as u32) + 2;
    let work = bits + extra;
    let reps = real_coset_reps(n);
    let mut out = Vec::with_capacity(reps.len());
    for &k in &reps {
        let mut acc = RatInterval::point(Rat::zero());
        for (j, c) in a.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = (j as u64 * k) % n;
            let cos = cos_2pi_frac(t, n, work);
            acc = acc.add(&cos.scale(c));
            acc = acc.round_out(work + 8);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Interval box over all real embeddings, refined until every interval is
/// narrower than `width`.
#[derive(Debug, Clone)]
pub struct EmbeddingBox {
    pub n: u64,
    pub reps: Vec<u64>,
    pub intervals: Vec<RatInterval>,
}

pub fn embeddings(a: &CycElem, width: &Rat) -> Result<EmbeddingBox> {
    assert!(width.is_positive(), "requested width must be positive");
    let mut bits = 32u32;
    loop {
        let intervals = embedding_intervals(a, bits)?;
        if intervals.iter().all(|iv| iv.width() < *width) {
            return Ok(EmbeddingBox {
                n: a.level(),
                reps: real_coset_reps(a.level()),
                intervals,
            });
        }
        bits *= 2;
    }
}

/// Exact total positivity: true iff every real embedding is > 0.
/// Zero returns false.
pub fn is_totally_positive(a: &CycElem) -> Result<bool> {
    if !a.is_real() {
        return Err(Error::NotReal);
    }
    if a.is_zero() {
        return Ok(false);
    }
    let mut bits = 32u32;
    loop {
        let intervals = embedding_intervals(a, bits)?;
        if intervals.iter().any(|iv| iv.is_negative()) {
            return Ok(false);
        }
        if intervals.iter().all(|iv| iv.is_positive()) {
            return Ok(true);
        }
        bits *= 2;
    }
}

/// Sign of the element under the first real embedding (coset of 1):
/// -1, 0, or 1. Input must be real.
pub fn first_embedding_sign(a: &CycElem) -> Result<i8> {
    if !a.is_real() {
        return Err(Error::NotReal);
    }
    if a.is_zero() {
        return Ok(0);
    }
    let mut bits = 32u32;
    loop {
        let iv = &embedding_intervals(a, bits)?[0];
        if iv.is_positive() {
            return Ok(1);
        }
        if iv.is_negative() {
            return Ok(-1);
        }
        bits *= 2;
    }
}

/// Total order on real elements: exact equality first, otherwise the sign
/// of the difference in the first embedding (injective, so well defined).
pub fn cmp_real(a: &CycElem, b: &CycElem) -> Result<std::cmp::Ordering> {
    if a == b {
        return Ok(std::cmp::Ordering::Equal);
    }
    let diff = a.checked_add(&(-b))?;
    Ok(match first_embedding_sign(&diff)? {
        1 => std::cmp::Ordering::Greater,
        -1 => std::cmp::Ordering::Less,
        _ => unreachable!("difference of distinct elements is nonzero"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{rat, rat_frac};

    #[test]
    fn pi_enclosure_is_tight() {
        let pi = pi_interval(80);
        assert!(pi.lo < pi.hi);
        assert!(pi.width() < rat_frac(1, 1 << 30));
        // 3.14159265 < pi < 3.14159266
        assert!(pi.lo > rat_frac(314159265, 100000000));
        assert!(pi.hi < rat_frac(314159266, 100000000));
    }

    #[test]
    fn cos_quarter_turn() {
        let c = cos_2pi_frac(1, 4, 64);
        assert!(c.contains_zero());
        assert!(c.width() < rat_frac(1, 1 << 32));
        let c0 = cos_2pi_frac(0, 7, 64);
        assert!(c0.lo <= rat(1) && c0.hi >= rat(1));
    }

    #[test]
    fn two_plus_sqrt2_is_totally_positive() {
        let s = CycElem::zeta(8) + CycElem::zeta_pow(8, -1); // zeta + conj = sqrt2
        let a = CycElem::from_int(8, 2) + s.clone();
        assert!(is_totally_positive(&a).unwrap());
        // sqrt2 itself has a negative conjugate
        assert!(!is_totally_positive(&s).unwrap());
        assert!(!is_totally_positive(&CycElem::from_int(8, -1)).unwrap());
        assert!(!is_totally_positive(&CycElem::zero(8)).unwrap());
    }

    #[test]
    fn nonreal_rejected() {
        assert_eq!(
            is_totally_positive(&CycElem::zeta(8)).unwrap_err(),
            Error::NotReal
        );
    }

    #[test]
    fn embedding_values_of_sqrt2() {
        // zeta_8 + zeta_8^-1 = sqrt2 under the first embedding, -sqrt2
        // under the other.
        let s = CycElem::zeta(8) + CycElem::zeta_pow(8, -1);
        let b = embeddings(&s, &rat_frac(1, 1_000_000)).unwrap();
        assert_eq!(b.reps, vec![1, 3]);
        assert!(b.intervals[0].lo > rat_frac(14142, 10000));
        assert!(b.intervals[0].hi < rat_frac(14143, 10000));
        assert!(b.intervals[1].hi < rat_frac(-14142, 10000));
    }

    #[test]
    fn first_embedding_sign_of_sqrt2_like() {
        let s = CycElem::zeta(8) - CycElem::zeta_pow(8, 3);
        assert_eq!(first_embedding_sign(&s).unwrap(), 1);
        assert_eq!(first_embedding_sign(&(-&s)).unwrap(), -1);
        assert_eq!(first_embedding_sign(&CycElem::zero(8)).unwrap(), 0);
    }

    #[test]
    fn cmp_real_orders_cosines() {
        // cos(2pi/12) > cos(2pi*5/12)
        let a = CycElem::two_cos(12, 1);
        let b = CycElem::two_cos(12, 5);
        assert_eq!(cmp_real(&a, &b).unwrap(), std::cmp::Ordering::Greater);
        assert_eq!(cmp_real(&a, &a).unwrap(), std::cmp::Ordering::Equal);
    }

    #[test]
    fn norm_to_real_subfield_is_totally_positive() {
        // a * conj(a) for a few elements
        for k in [1i64, 3, 5] {
            let a = CycElem::zeta_pow(8, k) + CycElem::from_rat(8, rat_frac(1, 2));
            let norm = &a * &a.conj();
            assert!(is_totally_positive(&norm).unwrap());
        }
    }
}
