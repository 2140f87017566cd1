//! Dedekind zeta special values, splitting data above 2, and the
//! Euler-Poincare characteristic tables.
//!
//! zeta_{F_n}(-1) for the totally real field F_n = Q(zeta_n)^+ is computed
//! through the character decomposition: the product over the even
//! Dirichlet characters mod n (each reduced to its primitive inducing
//! character) of L(-1, chi) = -B_{2,chi}/2, with the generalized Bernoulli
//! number evaluated as an exact cyclotomic sum. The arithmetic invariant
//!
//!   M_n = 2^{1-[F_n:Q]} |zeta_{F_n}(-1)| prod_{p|2} |1 - N(p)|
//!
//! then controls every Euler-Poincare characteristic in sight, and the
//! scan compares |chi(SU2(R_n))| = M_n/2 against 1/12 - 1/(2n) to decide
//! whether the Clifford-cyclotomic group exhausts U2^zeta(R_n).

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::{divisors, euler_phi, rat, rat_frac, CycElem, Rat};
use crate::embed::{pi_interval, RatInterval};
use crate::error::{Error, Result};

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn pow_mod_u64(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Order of a modulo m (gcd(a, m) = 1).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let group_order = euler_phi(m);
    let mut order = group_order;
    for (p, _) in factorize(group_order) {
        while order % p == 0 && pow_mod_u64(a, order / p, m) == 1 {
            order /= p;
        }
    }
    order
}

/// Structure of (Z/nZ)^x as independent cyclic factors: CRT of the odd
/// prime-power parts (cyclic, primitive root) and the 2-part
/// (<-1> x <5> for 2^s with s >= 3).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroup {
    pub n: u64,
    /// generator residues mod n
    pub gens: Vec<u64>,
    /// orders of the generators; the group is the direct product
    pub orders: Vec<u64>,
}

impl UnitGroup {
    /// All group elements, each with the exponent tuple that produced it.
    pub fn enumerate(&self) -> Vec<(u64, Vec<u64>)> {
        let mut out = Vec::with_capacity(euler_phi(self.n) as usize);
        let k = self.gens.len();
        let mut exps = vec![0u64; k];
        loop {
            let mut x = 1u64 % self.n.max(1);
            if self.n > 1 {
                x = 1;
                for (g, e) in self.gens.iter().zip(&exps) {
                    x = (x as u128 * pow_mod_u64(*g, *e, self.n) as u128 % self.n as u128) as u64;
                }
            }
            out.push((x, exps.clone()));
            // mixed-radix increment
            let mut i = 0;
            loop {
                if i == k {
                    return out;
                }
                exps[i] += 1;
                if exps[i] < self.orders[i] {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }
}

fn primitive_root_mod_prime_power(p: u64, e: u32) -> u64 {
    let m = p.pow(e);
    // primitive root mod p first
    let mut g = 2u64;
    let fac: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    loop {
        if g % p != 0 && fac.iter().all(|q| pow_mod_u64(g, (p - 1) / q, p) != 1) {
            break;
        }
        g += 1;
    }
    if e == 1 {
        return g;
    }
    // g lifts to p^e unless g^(p-1) = 1 mod p^2
    if pow_mod_u64(g, p - 1, p * p) == 1 {
        g += p;
    }
    g % m
}

fn crt_pair(a: u64, m1: u64, b: u64, m2: u64) -> u64 {
    // x = a mod m1, x = b mod m2 with coprime moduli
    if m1 == 1 {
        return b % m2.max(1);
    }
    if m2 == 1 {
        return a % m1;
    }
    let m1b = BigInt::from(m1);
    let m2b = BigInt::from(m2);
    let inv = BigInt::from(m1).extended_gcd(&m2b).x.mod_floor(&m2b);
    let diff = (BigInt::from(b) - BigInt::from(a)).mod_floor(&m2b);
    let t = (diff * inv).mod_floor(&m2b);
    let x = (BigInt::from(a) + t * m1b) % BigInt::from(m1 * m2);
    let digits = x.to_u64_digits().1;
    digits.first().copied().unwrap_or(0)
}

pub fn unit_group(n: u64) -> UnitGroup {
    assert!(n >= 1);
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    for (p, e) in factorize(n) {
        let pe = p.pow(e);
        let rest = n / pe;
        if p == 2 {
            match e {
                1 => {}
                2 => {
                    gens.push(crt_pair(3, pe, 1, rest));
                    orders.push(2);
                }
                _ => {
                    gens.push(crt_pair(pe - 1, pe, 1, rest));
                    orders.push(2);
                    gens.push(crt_pair(5, pe, 1, rest));
                    orders.push(pe / 4);
                }
            }
        } else {
            let g = primitive_root_mod_prime_power(p, e);
            gens.push(crt_pair(g, pe, 1, rest));
            orders.push(euler_phi(pe));
        }
    }
    UnitGroup { n, gens, orders }
}

/// A Dirichlet character stored by its value table: chi(a) = zeta_m^e with
/// m the exponent of the unit group of the original modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletChar {
    /// modulus the table is indexed by (the conductor after reduction)
    pub modulus: u64,
    pub conductor: u64,
    /// value order m: values are exponents of zeta_m
    pub value_order: u64,
    /// exponent of chi(a) for a = 0..modulus-1; None when gcd(a, mod) > 1
    values: Vec<Option<u64>>,
    pub even: bool,
}

impl DirichletChar {
    pub fn eval_exponent(&self, a: u64) -> Option<u64> {
        self.values[(a % self.modulus) as usize]
    }

    pub fn is_trivial(&self) -> bool {
        self.conductor == 1
    }
}

/// The even characters of (Z/nZ)^x, each reduced to its primitive inducing
/// character; exactly phi(n)/2 of them for n >= 3.
pub fn even_characters(n: u64) -> Vec<DirichletChar> {
    assert!(n >= 3, "even_characters needs n >= 3");
    let group = unit_group(n);
    let elements = group.enumerate();
    let m: u64 = group.orders.iter().fold(1, |acc, o| acc.lcm(o));
    let k = group.gens.len();

    let mut chars = Vec::new();
    let mut tuple = vec![0u64; k];
    loop {
        // character with chi(g_i) = zeta_m^(tuple_i * m / order_i)
        let mut values: Vec<Option<u64>> = vec![None; n as usize];
        for (x, exps) in &elements {
            let mut e = 0u64;
            for i in 0..k {
                e = (e + exps[i] * tuple[i] * (m / group.orders[i])) % m;
            }
            values[*x as usize] = Some(e);
        }
        let even = values[(n - 1) as usize] == Some(0);
        if even {
            let full = DirichletChar {
                modulus: n,
                conductor: 0,
                value_order: m,
                values,
                even,
            };
            chars.push(reduce_to_primitive(full, n));
        }
        let mut i = 0;
        loop {
            if i == k {
                chars.sort_by(|a, b| {
                    (a.conductor, &a.values).cmp(&(b.conductor, &b.values))
                });
                return chars;
            }
            tuple[i] += 1;
            if tuple[i] < group.orders[i] {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

/// Finds the conductor (the least divisor of n the character factors
/// through) and rewrites the table modulo it.
fn reduce_to_primitive(chi: DirichletChar, n: u64) -> DirichletChar {
    'divisor: for f in divisors(n) {
        // chi factors through (Z/f)^x iff chi(a) = 1 whenever
        // a = 1 mod f and gcd(a, n) = 1
        for a in 0..n {
            if a % f == 1 % f && a.gcd(&n) == 1 && chi.values[a as usize] != Some(0) {
                continue 'divisor;
            }
        }
        let mut values: Vec<Option<u64>> = vec![None; f as usize];
        for b in 0..f {
            if b.gcd(&f) != 1 {
                continue;
            }
            // lift b to a residue coprime to n congruent to b mod f
            let mut a = b;
            while a.gcd(&n) != 1 {
                a += f;
            }
            values[b as usize] = chi.values[(a % n) as usize];
        }
        return DirichletChar {
            modulus: f,
            conductor: f,
            value_order: chi.value_order,
            values,
            even: chi.even,
        };
    }
    unreachable!("every character factors through its own modulus");
}

/// L(-1, chi) = -B_{2,chi}/2 for a primitive character, as an element of
/// Q(zeta_m); B_{2,chi} = f * sum_{a=1}^{f} chi(a) ((a/f)^2 - a/f + 1/6).
pub fn l_minus1(chi: &DirichletChar) -> CycElem {
    let f = chi.conductor.max(1);
    let m = chi.value_order;
    let mut buckets = vec![Rat::zero(); m as usize];
    let sixth = rat_frac(1, 6);
    for a in 1..=f {
        let Some(e) = chi.eval_exponent(a % f) else {
            continue;
        };
        let x = Rat::new(BigInt::from(a), BigInt::from(f));
        let b2 = &(&x * &x) - &x + &sixth;
        buckets[e as usize] += b2;
    }
    let mut poly = vec![Rat::zero(); m as usize];
    for (e, v) in buckets.into_iter().enumerate() {
        poly[e] = v * rat(f as i64);
    }
    let b2chi = CycElem::from_poly(m, poly);
    b2chi.scale(&rat_frac(-1, 2))
}

/// zeta_{F_n}(-1) as an exact rational: the product of L(-1, chi) over the
/// even characters mod n.
pub fn zeta_f_minus1(n: u64) -> Result<Rat> {
    assert!(n >= 3, "zeta_f_minus1 needs n >= 3");
    let chars = even_characters(n);
    let m = chars
        .first()
        .map(|c| c.value_order)
        .expect("at least the trivial character");
    let mut acc = CycElem::one(m);
    for chi in &chars {
        acc = &acc * &l_minus1(chi);
    }
    acc.as_rational().ok_or_else(|| {
        Error::InvariantViolation("character product for zeta_F(-1) not rational".into())
    })
}

/// Splitting of the prime 2 in K_n and F_n, computed group-theoretically
/// inside (Z/nZ)^x: the inertia subgroup is the full 2-power factor, the
/// decomposition group adds the Frobenius 2 mod d, and passing to F_n
/// quotients by {+-1}.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SplitData {
    pub n: u64,
    pub e: u64,
    pub f: u64,
    pub r: u64,
    pub e_plus: u64,
    pub f_plus: u64,
    pub r_plus: u64,
}

fn subgroup_closure(n: u64, gens: &[u64]) -> HashSet<u64> {
    let mut set = HashSet::new();
    set.insert(1 % n);
    let mut stack: Vec<u64> = vec![1 % n];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = (x as u128 * *g as u128 % n as u128) as u64;
            if set.insert(y) {
                stack.push(y);
            }
        }
    }
    set
}

pub fn split_data(n: u64) -> Result<SplitData> {
    if n % 4 != 0 {
        return Err(Error::unsupported(n, "split_data needs 4 | n"));
    }
    let s = n.trailing_zeros();
    let two_part = 1u64 << s;
    let d = n / two_part;
    let phi = euler_phi(n);

    // inertia: everything congruent to 1 mod d
    let inertia_gens: Vec<u64> = (0..n)
        .filter(|x| x.gcd(&n) == 1 && x % d == 1 % d.max(1))
        .collect();
    let inertia = subgroup_closure(n, &inertia_gens);
    // decomposition: inertia plus the Frobenius (1 mod 2^s, 2 mod d)
    let frob = crt_pair(1, two_part, 2 % d.max(1), d);
    let mut dec_gens = inertia_gens.clone();
    dec_gens.push(frob);
    let decomposition = subgroup_closure(n, &dec_gens);

    let e = inertia.len() as u64;
    let f = (decomposition.len() / inertia.len()) as u64;
    let r = phi / decomposition.len() as u64;

    // F_n corresponds to quotienting by H = {1, -1}
    let minus_one = n - 1;
    let mut ih_gens = inertia_gens.clone();
    ih_gens.push(minus_one);
    let ih = subgroup_closure(n, &ih_gens);
    let mut dh_gens = dec_gens.clone();
    dh_gens.push(minus_one);
    let dh = subgroup_closure(n, &dh_gens);

    let e_plus = (ih.len() / 2) as u64;
    let f_plus = (dh.len() / ih.len()) as u64;
    let r_plus = phi / dh.len() as u64;

    let data = SplitData {
        n,
        e,
        f,
        r,
        e_plus,
        f_plus,
        r_plus,
    };
    if data.e * data.f * data.r != phi || data.e_plus * data.f_plus * data.r_plus != phi / 2 {
        return Err(Error::InvariantViolation(format!(
            "splitting bookkeeping failed at n = {}: {:?}",
            n, data
        )));
    }
    Ok(data)
}

/// M_n = 2^(1 - [F_n:Q]) |zeta_{F_n}(-1)| prod_{p | 2} |1 - N(p)| where the
/// product runs over the r_plus primes of F_n above 2, each of norm
/// 2^f_plus.
pub fn m_value(n: u64) -> Result<Rat> {
    if n % 4 != 0 || n < 8 {
        return Err(Error::unsupported(n, "M_n needs 4 | n and n >= 8"));
    }
    let degree = euler_phi(n) / 2;
    let z = zeta_f_minus1(n)?.abs();
    let sd = split_data(n)?;
    let local = (BigInt::from(2).pow(sd.f_plus as u32) - BigInt::one()).pow(sd.r_plus as u32);
    let two_pow = Rat::new(BigInt::one(), BigInt::one() << (degree - 1));
    Ok(two_pow * z * Rat::from(local))
}

/// chi of an amalgam of finite groups over a finite subgroup:
/// 1/#G' + 1/#G'' - 1/#A.
pub fn chi_amalgam(a: u64, b: u64, c: u64) -> Rat {
    assert!(a > 0 && b > 0 && c > 0);
    rat_frac(1, a as i64) + rat_frac(1, b as i64) - rat_frac(1, c as i64)
}

/// The full Euler-Poincare characteristic table at level n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiTable {
    pub n: u64,
    pub zeta_minus1: Rat,
    pub m: Rat,
    pub chi_su2: Rat,
    pub chi_psu2: Rat,
    pub chi_pu2_zeta: Rat,
    pub chi_pu2: Rat,
    /// known exactly when (c, cbar) is known (the supported families);
    /// otherwise -M_n/c with c undetermined, reported as None
    pub chi_so3: Option<Rat>,
    /// chi of the special Clifford-cyclotomic group = chi(G(4, n))
    pub chi_sgn: Rat,
    pub chi_g4n: Rat,
    pub c: Option<u64>,
    pub cbar: Option<u64>,
    pub split: SplitData,
}

/// The families where the Selmer computation pins c = 2, cbar = 1:
/// n = 2^s (n >= 8) and n = 3 * 2^s (4 | n).
pub fn is_selmer_supported(n: u64) -> bool {
    if n < 8 || n % 4 != 0 {
        return false;
    }
    let s = n.trailing_zeros();
    let d = n >> s;
    d == 1 || d == 3
}

pub fn chi_table(n: u64) -> Result<ChiTable> {
    if n % 4 != 0 || n < 8 {
        return Err(Error::unsupported(n, "chi_table needs 4 | n and n >= 8"));
    }
    let zeta_minus1 = zeta_f_minus1(n)?;
    let m = m_value(n)?;
    let split = split_data(n)?;
    let chi_su2 = -(&m / rat(2));
    let chi_psu2 = -m.clone();
    let chi_pu2_zeta = chi_su2.clone();
    let gap = split.r - split.r_plus;
    let chi_pu2 = &chi_su2 / Rat::from(BigInt::one() << gap);
    let (c, cbar, chi_so3) = if is_selmer_supported(n) {
        let so3 = &chi_pu2 / rat(1);
        // cross-check the two routes: chi(PU2)/cbar = chi(PSU2)/c
        let alt = &chi_psu2 / rat(2);
        if so3 != alt {
            return Err(Error::InvariantViolation(format!(
                "chi(SO3) routes disagree at n = {}",
                n
            )));
        }
        (Some(2), Some(1), Some(so3))
    } else {
        (None, None, None)
    };
    let chi_sgn = rat_frac(-1, 12) + Rat::new(BigInt::one(), BigInt::from(2 * n));
    Ok(ChiTable {
        n,
        zeta_minus1,
        m,
        chi_su2,
        chi_psu2,
        chi_pu2_zeta,
        chi_pu2,
        chi_so3,
        chi_sgn: chi_sgn.clone(),
        chi_g4n: chi_sgn,
        c,
        cbar,
        split,
    })
}

/// |Disc(K_n)| = n^phi(n) / prod_{p | n} p^(phi(n)/(p-1)).
pub fn disc_kn(n: u64) -> Result<BigInt> {
    if n % 4 != 0 {
        return Err(Error::unsupported(n, "disc_kn needs 4 | n"));
    }
    let phi = euler_phi(n);
    let mut num = BigInt::from(n).pow(phi as u32);
    for (p, _) in factorize(n) {
        let exp = phi / (p - 1);
        let den = BigInt::from(p).pow(exp as u32);
        let (q, r) = num.div_rem(&den);
        if !r.is_zero() {
            return Err(Error::InvariantViolation("discriminant not integral".into()));
        }
        num = q;
    }
    Ok(num)
}

/// |Disc(F_n)| = n^(phi/2) / (f prod_{p | n} p^(phi/(2(p-1)))) with f = 2
/// exactly when n is a power of 2.
pub fn disc_fn(n: u64) -> Result<Rat> {
    if n % 4 != 0 {
        return Err(Error::unsupported(n, "disc_fn needs 4 | n"));
    }
    let phi = euler_phi(n);
    let f: u64 = if factorize(n).len() == 1 { 2 } else { 1 };
    let mut num = Rat::from(BigInt::from(n).pow((phi / 2) as u32));
    num /= rat(f as i64);
    for (p, _) in factorize(n) {
        let exp = phi / (2 * (p - 1));
        num /= Rat::from(BigInt::from(p).pow(exp as u32));
    }
    Ok(num)
}

/// U2(R_n) = U2^zeta(R_n) iff -1 mod d lies in <2 mod d>, n = 2^s d.
pub fn u2_equals_u2zeta(n: u64) -> Result<bool> {
    if n % 4 != 0 {
        return Err(Error::unsupported(n, "criterion needs 4 | n"));
    }
    let d = n >> n.trailing_zeros();
    if d == 1 {
        return Ok(true);
    }
    let two_subgroup = subgroup_closure(d, &[2 % d]);
    Ok(two_subgroup.contains(&(d - 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateVerdict {
    Equal,
    InfiniteIndex,
}

#[derive(Debug, Clone)]
pub struct Decision {
    pub n: u64,
    pub verdict: GateVerdict,
    pub bound: Rat,
    pub evidence: ChiTable,
}

/// The decision: G_n = U2^zeta(R_n) iff n in {8, 12, 16, 24}; the evidence
/// is the exact comparison of |chi(SU2(R_n))| against 1/12 - 1/(2n).
pub fn decide_gate_equality(n: u64) -> Result<Decision> {
    let evidence = chi_table(n)?;
    let bound = rat_frac(1, 12) - Rat::new(BigInt::one(), BigInt::from(2 * n));
    let known_equal = matches!(n, 8 | 12 | 16 | 24);
    let abs_chi = evidence.chi_su2.abs();
    let verdict = if abs_chi == bound {
        GateVerdict::Equal
    } else if abs_chi > bound {
        GateVerdict::InfiniteIndex
    } else {
        return Err(Error::InvariantViolation(format!(
            "|chi(SU2)| < 1/12 - 1/(2n) at n = {}",
            n
        )));
    };
    if (verdict == GateVerdict::Equal) != known_equal {
        return Err(Error::InvariantViolation(format!(
            "chi comparison contradicts the classification at n = {}",
            n
        )));
    }
    Ok(Decision {
        n,
        verdict,
        bound,
        evidence,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRecord {
    pub n: u64,
    pub zeta_minus1: Rat,
    pub m: Rat,
    pub chi_su2: Rat,
    pub bound: Rat,
    /// "=" for the four equality levels, ">" for strict excess
    pub relation: &'static str,
}

/// Exact scan over 4 | n, 8 <= n <= n_max.
pub fn scan(n_max: u64) -> Result<Vec<ScanRecord>> {
    assert!(n_max >= 8);
    let mut out = Vec::new();
    let mut n = 8;
    while n <= n_max {
        out.push(scan_level(n)?);
        n += 4;
    }
    Ok(out)
}

/// One scan row; separated out so callers may parallelize over levels.
pub fn scan_level(n: u64) -> Result<ScanRecord> {
    let table = chi_table(n)?;
    let bound = rat_frac(1, 12) - Rat::new(BigInt::one(), BigInt::from(2 * n));
    let abs_chi = table.chi_su2.abs();
    let relation = if abs_chi == bound {
        "="
    } else if abs_chi > bound {
        ">"
    } else {
        return Err(Error::InvariantViolation(format!(
            "scan found |chi| below the bound at n = {}",
            n
        )));
    };
    Ok(ScanRecord {
        n,
        zeta_minus1: table.zeta_minus1,
        m: table.m,
        chi_su2: table.chi_su2,
        bound,
        relation,
    })
}

impl ScanRecord {
    /// One machine-readable JSON object, exact fractions as "p/q" strings.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "zetaMinus1": rat_string(&self.zeta_minus1),
            "M": rat_string(&self.m),
            "chiSU2": rat_string(&self.chi_su2),
            "bound": rat_string(&self.bound),
            "relation": self.relation,
        })
    }
}

pub fn rat_string(r: &Rat) -> String {
    let mut s = String::new();
    write!(s, "{}", r.numer()).unwrap();
    if !r.denom().is_one() {
        write!(s, "/{}", r.denom()).unwrap();
    }
    s
}

// ---------------------------------------------------------------------
// the analytic tail bound of the scan
// ---------------------------------------------------------------------

/// k-th root of a positive rational, enclosed by bisection on the dyadic
/// grid.
fn root_interval(x: &Rat, k: u32, bits: u32) -> RatInterval {
    assert!(x.is_positive());
    let mut lo = Rat::zero();
    let mut hi = x.clone().max(rat(2));
    let tol = Rat::new(BigInt::one(), BigInt::one() << bits);
    while (&hi - &lo) > tol {
        let mid = (&lo + &hi) / rat(2);
        let mut p = Rat::one();
        for _ in 0..k {
            p *= &mid;
        }
        if p <= *x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    RatInterval { lo, hi }
}

/// Lower bound (n^(3/4) (2 pi)^(-2))^[F_n:Q] / (2 sqrt 2) from the
/// discriminant chain, as a rigorous interval.
pub fn analytic_lower_bound(n: u64, bits: u32) -> RatInterval {
    let degree = (euler_phi(n) / 2) as u32;
    // n^(3 degree / 4): integer power then a 4th root
    let n_pow = Rat::from(BigInt::from(n).pow(3 * degree));
    let base = root_interval(&n_pow, 4, bits);
    let pi = pi_interval(bits + 8);
    let two_pi = pi.scale(&rat(2));
    // (2 pi)^(2 degree), positive so endpoint powers are monotone
    let mut tp_lo = Rat::one();
    let mut tp_hi = Rat::one();
    for _ in 0..(2 * degree) {
        tp_lo *= &two_pi.lo;
        tp_hi *= &two_pi.hi;
    }
    let inv = RatInterval {
        lo: tp_hi.recip(),
        hi: tp_lo.recip(),
    };
    let sqrt2 = root_interval(&rat(2), 2, bits + 4);
    let denom = RatInterval {
        lo: &sqrt2.lo * &rat(2),
        hi: &sqrt2.hi * &rat(2),
    };
    let denom_inv = RatInterval {
        lo: denom.hi.recip(),
        hi: denom.lo.recip(),
    };
    base.mul(&inv).mul(&denom_inv).round_out(bits)
}

/// Verifies the chain |chi(SU2(R_n))| > LB(n) > 1/12 - 1/(2n) for one
/// level n > 134 (the redundant analytic check of the scan's tail).
pub fn verify_analytic_bound(n: u64) -> Result<bool> {
    let chi = chi_table(n)?.chi_su2.abs();
    let bound = rat_frac(1, 12) - Rat::new(BigInt::one(), BigInt::from(2 * n));
    let mut bits = 48u32;
    loop {
        let lb = analytic_lower_bound(n, bits);
        if chi > lb.hi && lb.lo > bound {
            return Ok(true);
        }
        if chi < lb.lo || lb.hi < bound {
            return Ok(false);
        }
        bits *= 2;
        if bits > 4096 {
            return Err(Error::InvariantViolation(format!(
                "analytic bound comparison did not separate at n = {}",
                n
            )));
        }
    }
}

/// The threshold fact 134.5 > (2 pi)^(8/3), i.e. 134.5^3 > (2 pi)^8.
pub fn verify_threshold_constant() -> bool {
    let pi = pi_interval(64);
    let two_pi_hi = &pi.hi * rat(2);
    let mut p = Rat::one();
    for _ in 0..8 {
        p *= &two_pi_hi;
    }
    let lhs = rat_frac(269, 2) * rat_frac(269, 2) * rat_frac(269, 2);
    lhs > p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_group_structures() {
        let g8 = unit_group(8);
        assert_eq!(g8.orders, vec![2, 2]);
        assert_eq!(g8.gens, vec![7, 5]);

        let g20 = unit_group(20);
        let mut orders = g20.orders.clone();
        orders.sort_unstable();
        assert_eq!(orders, vec![2, 4]);

        let g7 = unit_group(7);
        assert_eq!(g7.orders, vec![6]);

        // enumeration covers the group exactly once
        let elems = g20.enumerate();
        let set: HashSet<u64> = elems.iter().map(|(x, _)| *x).collect();
        assert_eq!(set.len(), euler_phi(20) as usize);
    }

    #[test]
    fn even_character_counts_and_conductors() {
        let chars8 = even_characters(8);
        assert_eq!(chars8.len(), 2);
        assert_eq!(chars8[0].conductor, 1);
        assert_eq!(chars8[1].conductor, 8);
        // the conductor-8 character: chi(3) = chi(5) = -1, chi(7) = 1
        let chi = &chars8[1];
        let half = chi.value_order / 2;
        assert_eq!(chi.eval_exponent(3), Some(half));
        assert_eq!(chi.eval_exponent(5), Some(half));
        assert_eq!(chi.eval_exponent(7), Some(0));

        assert_eq!(even_characters(4).len(), 1);
        let chars12 = even_characters(12);
        assert_eq!(chars12.len(), 2);
        assert_eq!(chars12[1].conductor, 12);
    }

    #[test]
    fn l_values_at_minus_one() {
        let chars8 = even_characters(8);
        assert_eq!(l_minus1(&chars8[0]).as_rational().unwrap(), rat_frac(-1, 12));
        assert_eq!(l_minus1(&chars8[1]).as_rational().unwrap(), rat(-1));
        let chars12 = even_characters(12);
        assert_eq!(l_minus1(&chars12[1]).as_rational().unwrap(), rat(-2));
    }

    #[test]
    fn zeta_spot_values() {
        assert_eq!(zeta_f_minus1(8).unwrap(), rat_frac(1, 12));
        assert_eq!(zeta_f_minus1(12).unwrap(), rat_frac(1, 6));
    }

    #[test]
    fn split_data_examples() {
        let d16 = split_data(16).unwrap();
        assert_eq!((d16.r, d16.r_plus), (1, 1));
        let d24 = split_data(24).unwrap();
        assert_eq!((d24.r, d24.r_plus), (1, 1));
        assert_eq!((d24.f, d24.f_plus), (2, 1));
        let d20 = split_data(20).unwrap();
        assert_eq!((d20.r, d20.r_plus), (1, 1));
        assert_eq!(d20.f, 4);
        assert_eq!(d20.f_plus, 2);
        assert!(split_data(6).is_err());
    }

    #[test]
    fn m_values() {
        assert_eq!(m_value(8).unwrap(), rat_frac(1, 24));
        assert_eq!(m_value(12).unwrap(), rat_frac(1, 12));
        assert_eq!(m_value(24).unwrap(), rat_frac(1, 8));
    }

    #[test]
    fn chi_tables_at_the_four_levels() {
        let t8 = chi_table(8).unwrap();
        assert_eq!(t8.chi_su2, rat_frac(-1, 48));
        assert_eq!(t8.chi_sgn, rat_frac(-1, 48));
        assert_eq!(t8.chi_so3, Some(rat_frac(-1, 48)));
        assert_eq!(t8.chi_psu2, rat_frac(-1, 24));

        let t12 = chi_table(12).unwrap();
        assert_eq!(t12.chi_su2, rat_frac(-1, 24));
        assert_eq!(t12.chi_sgn, rat_frac(-1, 24));

        // n = 20: chi_sgn = -7/120 but |chi_su2| strictly bigger
        let t20 = chi_table(20).unwrap();
        assert_eq!(t20.chi_sgn, rat_frac(-7, 120));
        assert!(t20.chi_su2.abs() > rat_frac(7, 120));
        assert_eq!(t20.chi_so3, None);
    }

    #[test]
    fn chi_amalgam_examples() {
        assert_eq!(chi_amalgam(24, 16, 8), rat_frac(-1, 12) + rat_frac(1, 16));
        assert_eq!(chi_amalgam(5, 5, 5), rat_frac(1, 5));
        // S4 *_{D4} D_n at n = 24
        assert_eq!(chi_amalgam(24, 48, 8), rat_frac(-1, 16));
    }

    #[test]
    fn discriminants() {
        assert_eq!(disc_kn(8).unwrap(), BigInt::from(256));
        assert_eq!(disc_fn(8).unwrap(), rat(8));
        assert_eq!(disc_fn(12).unwrap(), rat(12));
        assert_eq!(disc_fn(20).unwrap(), rat(2000));
    }

    #[test]
    fn u2_criterion() {
        assert!(u2_equals_u2zeta(8).unwrap());
        assert!(u2_equals_u2zeta(20).unwrap());
        assert!(!u2_equals_u2zeta(28).unwrap());
    }

    #[test]
    fn decisions() {
        assert_eq!(decide_gate_equality(8).unwrap().verdict, GateVerdict::Equal);
        assert_eq!(decide_gate_equality(24).unwrap().verdict, GateVerdict::Equal);
        assert_eq!(
            decide_gate_equality(20).unwrap().verdict,
            GateVerdict::InfiniteIndex
        );
    }

    #[test]
    fn scan_to_40() {
        let rows = scan(40).unwrap();
        let equalities: Vec<u64> = rows
            .iter()
            .filter(|r| r.relation == "=")
            .map(|r| r.n)
            .collect();
        assert_eq!(equalities, vec![8, 12, 16, 24]);
        let strict: Vec<u64> = rows
            .iter()
            .filter(|r| r.relation == ">")
            .map(|r| r.n)
            .collect();
        assert_eq!(strict, vec![20, 28, 32, 36, 40]);
    }

    #[test]
    fn serre_identity_for_two_power_levels() {
        // chi(SO3(R_n^+)) = -2^(-2^(s-2)) zeta_{F_n}(-1) for n = 2^s
        for s in [3u32, 4, 5] {
            let n = 1u64 << s;
            let table = chi_table(n).unwrap();
            let serre = -(table.zeta_minus1.clone()
                / Rat::from(BigInt::one() << (1u64 << (s - 2))));
            assert_eq!(table.chi_so3, Some(serre), "n = {}", n);
        }
    }

    #[test]
    fn analytic_threshold() {
        assert!(verify_threshold_constant());
        assert!(verify_analytic_bound(136).unwrap());
        assert!(verify_analytic_bound(144).unwrap());
    }

    #[test]
    fn rat_strings() {
        assert_eq!(rat_string(&rat_frac(-5, 96)), "-5/96");
        assert_eq!(rat_string(&rat(7)), "7");
    }
}
