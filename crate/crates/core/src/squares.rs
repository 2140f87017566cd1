//! Certified squareness decisions in the maximal real subfield F_n.
//!
//! Both possible answers come with checkable evidence:
//!
//! * `NonSquare` carries either a real embedding that is provably negative
//!   (a square in a totally real field is totally positive), or a split
//!   prime p = 1 (mod n) at which some embedded image of the input is a
//!   quadratic non-residue.
//! * `Square` carries an explicit root, re-verified here by exact squaring
//!   before it is returned.
//!
//! The constructive direction works in the split ring Z[x]/(p^K, Phi_n),
//! which is a product of phi(n) copies of Z/p^K indexed by the Hensel lifts
//! of the roots of Phi_n mod p. Coordinate square roots are Newton-lifted,
//! conjugation-symmetric sign patterns are swept in Gray-code order, and
//! candidate coefficient vectors are pulled back to Q by rational
//! reconstruction. A failed reconstruction is never an answer: the modulus
//! exponent doubles up to a cap, after which the result is the explicit
//! diagnostic `Undecided`, not a guess.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::{euler_phi, CycElem, Rat};
use crate::embed::{embedding_intervals, first_embedding_sign, real_coset_reps};
use crate::error::{Error, Result};

/// Number of split primes used for non-residue refutation.
const TEST_PRIMES: usize = 10;
/// Cap on the modulus exponent K in p^K during reconstruction.
const CAP_EXPONENT: u32 = 64;
/// Reconstruction prime floor: big enough that p^64 dominates the
/// coefficient heights seen at desk scale.
const RECON_PRIME_FLOOR: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonSquareWitness {
    /// The embedding indexed by this coset representative is negative.
    NegativeEmbedding { coset: u64 },
    /// The image of the input under zeta -> root_of_unity^coset in F_p is
    /// a quadratic non-residue.
    ResidueTest {
        prime: u64,
        root_of_unity: u64,
        coset: u64,
        image: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SquareVerdict {
    Square { root: CycElem },
    NonSquare { witness: NonSquareWitness },
}

impl SquareVerdict {
    pub fn is_square(&self) -> bool {
        matches!(self, SquareVerdict::Square { .. })
    }

    pub fn root(&self) -> Option<&CycElem> {
        match self {
            SquareVerdict::Square { root } => Some(root),
            SquareVerdict::NonSquare { .. } => None,
        }
    }
}

pub type SquarenessCertificate = SquareVerdict;

/// Decides whether a real element of Q(zeta_n) is a square in the real
/// subfield F_n, returning a certificate either way.
pub fn is_square_in_f(a: &CycElem) -> Result<SquarenessCertificate> {
    if !a.is_real() {
        return Err(Error::NotReal);
    }
    let n = a.level();
    if a.is_zero() {
        return Ok(SquareVerdict::Square {
            root: CycElem::zero(n),
        });
    }
    if n <= 2 {
        return rational_squareness(n, &a.coeffs()[0]);
    }
    if let Some(coset) = negative_embedding(a)? {
        return Ok(SquareVerdict::NonSquare {
            witness: NonSquareWitness::NegativeEmbedding { coset },
        });
    }

    // Residue phase: any non-residue image at a split prime refutes.
    let mut used = 0usize;
    let mut p_candidate = n + 2;
    while used < TEST_PRIMES {
        let p = next_split_prime(n, p_candidate);
        p_candidate = p + 1;
        if let Some(outcome) = residue_test(a, p) {
            used += 1;
            if let Some(witness) = outcome {
                return Ok(SquareVerdict::NonSquare { witness });
            }
        }
    }

    // Constructive phase at one larger split prime.
    let mut p_candidate = RECON_PRIME_FLOOR;
    loop {
        let p = next_split_prime(n, p_candidate);
        p_candidate = p + 1;
        match reconstruct_root(a, p)? {
            ReconOutcome::Found(root) => {
                let root = normalize_root_sign(root)?;
                return Ok(SquareVerdict::Square { root });
            }
            ReconOutcome::NonResidue(witness) => {
                return Ok(SquareVerdict::NonSquare { witness });
            }
            ReconOutcome::BadPrime => continue,
            ReconOutcome::Exhausted => {
                return Err(Error::Undecided {
                    primes: TEST_PRIMES,
                    cap: CAP_EXPONENT,
                });
            }
        }
    }
}

/// Square classes compare by the squareness of the ratio; convenience
/// wrapper used by the Selmer machinery.
pub fn same_square_class(a: &CycElem, b: &CycElem) -> Result<bool> {
    let ratio = a.checked_mul(&b.inv()?)?;
    Ok(is_square_in_f(&ratio)?.is_square())
}

fn rational_squareness(n: u64, q: &Rat) -> Result<SquarenessCertificate> {
    if q.is_negative() {
        return Ok(SquareVerdict::NonSquare {
            witness: NonSquareWitness::NegativeEmbedding { coset: 1 },
        });
    }
    match rational_sqrt(q) {
        Some(r) => Ok(SquareVerdict::Square {
            root: CycElem::from_rat(n, r),
        }),
        // A positive rational non-square stays non-square in Q; witness it
        // at an odd prime as the generic machinery would.
        None => {
            let mut p_candidate = 3u64;
            loop {
                let p = next_split_prime(1, p_candidate);
                p_candidate = p + 1;
                if p == 2 {
                    continue;
                }
                let Some(img) = rat_mod(q, p) else { continue };
                if img == 0 {
                    continue;
                }
                if !is_qr(img, p) {
                    return Ok(SquareVerdict::NonSquare {
                        witness: NonSquareWitness::ResidueTest {
                            prime: p,
                            root_of_unity: 1,
                            coset: 1,
                            image: img,
                        },
                    });
                }
            }
        }
    }
}

pub(crate) fn rational_sqrt(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let num = q.numer().sqrt();
    let den = q.denom().sqrt();
    if &(&num * &num) == q.numer() && &(&den * &den) == q.denom() {
        Some(Rat::new(num, den))
    } else {
        None
    }
}

/// Finds a provably negative embedding, if any, by adaptive refinement.
fn negative_embedding(a: &CycElem) -> Result<Option<u64>> {
    let reps = real_coset_reps(a.level());
    let mut bits = 32u32;
    loop {
        let intervals = embedding_intervals(a, bits)?;
        for (i, iv) in intervals.iter().enumerate() {
            if iv.is_negative() {
                return Ok(Some(reps[i]));
            }
        }
        if intervals.iter().all(|iv| iv.is_positive()) {
            return Ok(None);
        }
        bits *= 2;
    }
}

fn normalize_root_sign(root: CycElem) -> Result<CycElem> {
    match first_embedding_sign(&root)? {
        -1 => Ok(-root),
        _ => Ok(root),
    }
}

/// Quadratic-residue test of all real-coset images at one split prime.
/// `None` means the prime was unusable (divides a denominator or a value).
fn residue_test(a: &CycElem, p: u64) -> Option<Option<NonSquareWitness>> {
    let n = a.level();
    let pb = BigInt::from(p);
    for c in a.coeffs() {
        if c.denom().mod_floor(&pb).is_zero() {
            return None;
        }
    }
    let g = primitive_nth_root(p, n);
    for u in real_coset_reps(n) {
        let point = pow_mod(g, u, p);
        let val = eval_mod_p(a, point, p)?;
        if val == 0 {
            return None;
        }
        if !is_qr(val, p) {
            return Some(Some(NonSquareWitness::ResidueTest {
                prime: p,
                root_of_unity: g,
                coset: u,
                image: val,
            }));
        }
    }
    Some(None)
}

// ---------------------------------------------------------------------
// modular utility layer (u64 primes, BigInt lifted moduli)
// ---------------------------------------------------------------------

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime p >= floor with p = 1 (mod n); such primes have positive
/// density by Dirichlet, so the walk is short.
pub(crate) fn next_split_prime(n: u64, floor: u64) -> u64 {
    let mut t = floor.saturating_sub(1) / n + 1;
    loop {
        let p = n * t + 1;
        if p >= 3 && p >= floor && is_prime_u64(p) {
            return p;
        }
        t += 1;
    }
}

fn is_qr(a: u64, p: u64) -> bool {
    debug_assert!(a % p != 0);
    pow_mod(a, (p - 1) / 2, p) == 1
}

/// Tonelli-Shanks square root mod an odd prime; input must be a residue.
fn sqrt_mod_p(a: u64, p: u64) -> u64 {
    debug_assert!(is_qr(a, p));
    if p % 4 == 3 {
        return pow_mod(a, (p + 1) / 4, p);
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    // find a quadratic non-residue
    let mut z = 2u64;
    while is_qr(z, p) {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u32;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    r
}

/// Element of multiplicative order exactly n mod p (requires p = 1 mod n).
fn primitive_nth_root(p: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let exponent = (p - 1) / n;
    let prime_divs: Vec<u64> = prime_divisors(n);
    let mut h = 2u64;
    loop {
        let g = pow_mod(h, exponent, p);
        if g != 1 && prime_divs.iter().all(|q| pow_mod(g, n / q, p) != 1) {
            return g;
        }
        h += 1;
    }
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn inv_mod_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

fn rat_mod(q: &Rat, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = q.denom().mod_floor(&pb);
    if den.is_zero() {
        return None;
    }
    let den_inv = inv_mod_big(&den, &pb)?;
    let num = q.numer().mod_floor(&pb);
    let v = (num * den_inv).mod_floor(&pb);
    let digits = v.to_u64_digits().1;
    Some(digits.first().copied().unwrap_or(0))
}

/// Rational reconstruction: the unique num/den with |num|, den <= bound
/// congruent to c mod m, if it exists.
fn rational_reconstruct(c: &BigInt, m: &BigInt, bound: &BigInt) -> Option<Rat> {
    let mut r0 = m.clone();
    let mut r1 = c.mod_floor(m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 > *bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if t1.is_zero() || t1.abs() > *bound {
        return None;
    }
    let (num, den) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    if num.gcd(&den) != BigInt::one() {
        return None;
    }
    Some(Rat::new(num, den))
}

enum ReconOutcome {
    Found(CycElem),
    NonResidue(NonSquareWitness),
    /// prime divides a denominator or an embedded value; pick another
    BadPrime,
    /// every sign pattern failed reconstruction at the cap
    Exhausted,
}

/// Attempts to construct sqrt(a) in Q(zeta_n) from its coordinates in the
/// split ring at p, doubling the modulus exponent on failure.
fn reconstruct_root(a: &CycElem, p: u64) -> Result<ReconOutcome> {
    let n = a.level();
    let m = euler_phi(n) as usize;
    let pb = BigInt::from(p);

    for c in a.coeffs() {
        if c.denom().mod_floor(&pb).is_zero() {
            return Ok(ReconOutcome::BadPrime);
        }
    }
    let g = primitive_nth_root(p, n);
    let units: Vec<u64> = (1..=n).filter(|u| u.gcd(&n) == 1).collect();
    debug_assert_eq!(units.len(), m);

    // base coordinates and square roots mod p
    let mut base_roots = Vec::with_capacity(m);
    let mut base_sqrts = Vec::with_capacity(m);
    for &u in &units {
        let point = pow_mod(g, u, p);
        let val = eval_mod_p(a, point, p).expect("denominators checked");
        if val == 0 {
            return Ok(ReconOutcome::BadPrime);
        }
        if !is_qr(val, p) {
            return Ok(ReconOutcome::NonResidue(NonSquareWitness::ResidueTest {
                prime: p,
                root_of_unity: g,
                coset: u,
                image: val,
            }));
        }
        base_roots.push(point);
        base_sqrts.push(sqrt_mod_p(val, p));
    }

    let mut exponent = 8u32;
    while exponent <= CAP_EXPONENT {
        if let Some(root) = try_exponent(a, p, &units, &base_roots, &base_sqrts, exponent) {
            return Ok(ReconOutcome::Found(root));
        }
        exponent *= 2;
    }
    Ok(ReconOutcome::Exhausted)
}

fn try_exponent(
    a: &CycElem,
    p: u64,
    units: &[u64],
    base_roots: &[u64],
    base_sqrts: &[u64],
    exponent: u32,
) -> Option<CycElem> {
    let n = a.level();
    let m = units.len();
    let modulus = pb_pow(p, exponent);
    let phi = crate::cyclotomic::cyclotomic_poly(n);

    // Newton-lift the roots of Phi_n and the coordinate square roots.
    let mut roots = Vec::with_capacity(m);
    let mut sqrts = Vec::with_capacity(m);
    for idx in 0..m {
        let root = lift_poly_root(&phi, base_roots[idx], p, exponent, &modulus);
        let val = eval_mod_big(a, &root, &modulus);
        let sq = lift_sqrt(&val, base_sqrts[idx], p, exponent, &modulus);
        debug_assert_eq!((&sq * &sq).mod_floor(&modulus), val);
        roots.push(root);
        sqrts.push(sq);
    }

    // Lagrange basis vectors: B_u = (Phi_n / (x - g_u)) / Phi_n'(g_u).
    let phi_mod: Vec<BigInt> = phi.iter().map(|c| c.mod_floor(&modulus)).collect();
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    for root in &roots {
        let quotient = synthetic_div(&phi_mod, root, &modulus);
        let denom = eval_poly_big(&quotient, root, &modulus);
        let inv = inv_mod_big(&denom, &modulus)?;
        let vec: Vec<BigInt> = quotient
            .iter()
            .map(|c| (c * &inv).mod_floor(&modulus))
            .collect();
        basis.push(vec);
    }

    // Conjugation-symmetric combinations: cosets pair u with n - u; a
    // totally positive square has a real root, so the two coordinates of a
    // coset share one sign choice.
    let mut index_of = std::collections::HashMap::new();
    for (i, &u) in units.iter().enumerate() {
        index_of.insert(u, i);
    }
    let mut cosets: Vec<(usize, usize)> = Vec::new();
    let mut seen = vec![false; m];
    for (i, &u) in units.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let j = index_of[&(n - u)];
        seen[i] = true;
        seen[j] = true;
        cosets.push((i, j));
    }

    // P_c = s_c * (B_u + B_v) as a coefficient vector mod p^K
    let mut pvecs: Vec<Vec<BigInt>> = Vec::with_capacity(cosets.len());
    for &(i, j) in &cosets {
        let mut v = vec![BigInt::zero(); m];
        for (k, slot) in v.iter_mut().enumerate() {
            let mut t = basis[i][k].clone();
            if j != i {
                t += &basis[j][k];
            }
            *slot = (t * &sqrts[i]).mod_floor(&modulus);
        }
        pvecs.push(v);
    }

    // Gray-code sweep over sign patterns with the first coset fixed +.
    let free = cosets.len() - 1;
    let bound = (&modulus / BigInt::from(2)).sqrt();
    let mut candidate: Vec<BigInt> = vec![BigInt::zero(); m];
    for v in &pvecs {
        for (slot, c) in candidate.iter_mut().zip(v) {
            *slot = (&*slot + c).mod_floor(&modulus);
        }
    }
    let mut gray = 0u64;
    let total = 1u64 << free;
    for step in 0..total {
        if step > 0 {
            let next = step ^ (step >> 1);
            let flipped_bit = (gray ^ next).trailing_zeros() as usize;
            let flip_to_minus = next & (1 << flipped_bit) != 0;
            gray = next;
            let idx = flipped_bit + 1; // coset 0 stays +
            for (slot, c) in candidate.iter_mut().zip(&pvecs[idx]) {
                let two_c = c * BigInt::from(2);
                if flip_to_minus {
                    *slot = (&*slot - two_c).mod_floor(&modulus);
                } else {
                    *slot = (&*slot + two_c).mod_floor(&modulus);
                }
            }
        }
        if let Some(root) = recognize(a, &candidate, &modulus, &bound) {
            return Some(root);
        }
    }
    None
}

fn recognize(a: &CycElem, candidate: &[BigInt], modulus: &BigInt, bound: &BigInt) -> Option<CycElem> {
    let mut coeffs = Vec::with_capacity(candidate.len());
    for c in candidate {
        coeffs.push(rational_reconstruct(c, modulus, bound)?);
    }
    let root = CycElem::from_poly(a.level(), coeffs);
    if &(&root * &root) == a {
        Some(root)
    } else {
        None
    }
}

fn pb_pow(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

/// Newton lift of a simple root of `poly` from mod p to mod p^exponent.
fn lift_poly_root(poly: &[BigInt], base: u64, p: u64, exponent: u32, modulus: &BigInt) -> BigInt {
    let mut x = BigInt::from(base);
    let mut have = 1u32;
    while have < exponent {
        have = (have * 2).min(exponent);
        let m = pb_pow(p, have);
        let fx = eval_poly_big(poly, &x, &m);
        let dfx = eval_poly_deriv_big(poly, &x, &m);
        let inv = inv_mod_big(&dfx, &m).expect("simple root stays simple");
        x = (&x - fx * inv).mod_floor(&m);
    }
    x.mod_floor(modulus)
}

/// Newton lift of a square root of `val` from mod p to mod p^exponent.
fn lift_sqrt(val: &BigInt, base: u64, p: u64, exponent: u32, modulus: &BigInt) -> BigInt {
    let mut s = BigInt::from(base);
    let mut have = 1u32;
    while have < exponent {
        have = (have * 2).min(exponent);
        let m = pb_pow(p, have);
        let s_inv = inv_mod_big(&s, &m).expect("unit coordinate");
        let inv2 = inv_mod_big(&BigInt::from(2), &m).expect("p odd");
        s = ((&s + (val.mod_floor(&m) * s_inv)) * inv2).mod_floor(&m);
    }
    s.mod_floor(modulus)
}

fn eval_mod_p(a: &CycElem, point: u64, p: u64) -> Option<u64> {
    let mut acc = 0u64;
    for c in a.coeffs().iter().rev() {
        acc = mul_mod(acc, point, p);
        acc = (acc + rat_mod(c, p)?) % p;
    }
    Some(acc)
}

fn eval_mod_big(a: &CycElem, point: &BigInt, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in a.coeffs().iter().rev() {
        acc = (acc * point).mod_floor(modulus);
        let den_inv = inv_mod_big(&c.denom().mod_floor(modulus), modulus)
            .expect("denominator prime-to-p checked earlier");
        let val = (c.numer().mod_floor(modulus) * den_inv).mod_floor(modulus);
        acc = (acc + val).mod_floor(modulus);
    }
    acc
}

fn eval_poly_big(poly: &[BigInt], point: &BigInt, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in poly.iter().rev() {
        acc = (acc * point + c).mod_floor(modulus);
    }
    acc
}

fn eval_poly_deriv_big(poly: &[BigInt], point: &BigInt, modulus: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for (k, c) in poly.iter().enumerate().skip(1).rev() {
        acc = (acc * point + c * BigInt::from(k)).mod_floor(modulus);
    }
    acc
}

/// Quotient of a monic polynomial by (x - root) mod modulus.
fn synthetic_div(poly: &[BigInt], root: &BigInt, modulus: &BigInt) -> Vec<BigInt> {
    let deg = poly.len() - 1;
    let mut q = vec![BigInt::zero(); deg];
    let mut carry = BigInt::zero();
    for k in (0..deg).rev() {
        carry = (poly[k + 1].clone() + root * &carry).mod_floor(modulus);
        q[k] = carry.clone();
    }
    q
}
