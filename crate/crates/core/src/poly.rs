//! Dense univariate polynomial helpers over `BigRational` / `BigInt`.
//!
//! Coefficient index equals the degree of the monomial. These are internal
//! building blocks for the cyclotomic arithmetic; nothing here is exported
//! from the crate root.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) type QPoly = Vec<BigRational>;

pub(crate) fn trim(p: &mut QPoly) {
    while let Some(last) = p.last() {
        if last.is_zero() {
            p.pop();
        } else {
            break;
        }
    }
}

pub(crate) fn degree(p: &QPoly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            out[i + j] += ai * bj;
        }
    }
    trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic integer polynomial `m`.
pub(crate) fn rem_monic_int(mut a: QPoly, m: &[BigInt]) -> QPoly {
    let md = m.len() - 1;
    debug_assert!(m[md].is_one());
    while a.len() > md {
        let lead = a.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = a.len() - md;
        for (k, mk) in m.iter().take(md).enumerate() {
            if !mk.is_zero() {
                let t = &lead * BigRational::from(mk.clone());
                a[shift + k] -= t;
            }
        }
    }
    trim(&mut a);
    a
}

/// Quotient and remainder of `a / b` over Q; `b` need not be monic.
pub(crate) fn divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let mut r: QPoly = a.to_vec();
    trim(&mut r);
    let mut bt: QPoly = b.to_vec();
    trim(&mut bt);
    assert!(!bt.is_empty(), "polynomial division by zero");
    let bd = bt.len() - 1;
    let lead = bt[bd].clone();
    if r.len() <= bd {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - bd];
    while r.len() > bd {
        let c = r.last().unwrap() / &lead;
        let shift = r.len() - 1 - bd;
        q[shift] = c.clone();
        for (k, bk) in bt.iter().enumerate() {
            let t = &c * bk;
            r[shift + k] -= t;
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Extended gcd over Q[x]: returns (g, u) with u*a = g (mod m) and g a
/// nonzero constant when gcd(a, m) = 1. Used to invert residues modulo an
/// irreducible modulus.
pub(crate) fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<QPoly> {
    // Half-extended Euclid: track only the cofactor of `a`.
    let mut r0: QPoly = m.to_vec();
    let mut r1: QPoly = a.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    let mut u0: QPoly = Vec::new();
    let mut u1: QPoly = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let qu = mul(&q, &u1);
        let mut u = sub(&u0, &qu);
        trim(&mut u);
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u;
    }
    if degree(&r0) != Some(0) {
        return None;
    }
    let g = r0[0].clone();
    let mut inv: QPoly = u0.iter().map(|c| c / &g).collect();
    trim(&mut inv);
    Some(inv)
}

pub(crate) fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigRational::zero());
    }
    for (i, bi) in b.iter().enumerate() {
        out[i] -= bi;
    }
    trim(&mut out);
    out
}

/// Exact division of integer polynomials, panicking on nonzero remainder.
pub(crate) fn div_exact_int(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let ar: QPoly = a.iter().map(|c| BigRational::from(c.clone())).collect();
    let br: QPoly = b.iter().map(|c| BigRational::from(c.clone())).collect();
    let (q, r) = divrem(&ar, &br);
    assert!(r.is_empty(), "inexact integer polynomial division");
    q.into_iter()
        .map(|c| {
            assert!(c.is_integer(), "non-integer quotient coefficient");
            c.to_integer()
        })
        .collect()
}
