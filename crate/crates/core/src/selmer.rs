//! The square-class obstruction to lifting SO3(R_n^+) back to SU2(R_n).
//!
//! Every special orthogonal matrix M yields four values phi_i(M) and six
//! values theta_ij(M), affine in the entries; the nonzero phi_i all agree
//! modulo squares and define a class phi(M) in the totally positive
//! square-class group. The class is trivial exactly when M lifts to
//! SU2(R_n), and then signed square roots of the phi_i assemble the lift
//! explicitly. At the supported levels (2-power and 3 * 2-power), one twist
//! by the image of T_n repairs any obstructed lift into U2(R_n).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cyclotomic::{rat_frac, CycElem, Rat};
use crate::embed::is_totally_positive;
use crate::error::{Error, Result};
use crate::matrix::{
    ad_quadruple, gate_t, is_in_so3, pi_map, so3_z_rotation, OMat, UMat,
};
use crate::squares::{is_square_in_f, same_square_class, SquareVerdict};
use crate::zeta::{is_selmer_supported, split_data};

/// The ten functions of Definition-style phi/theta machinery, all exact.
/// `phi[i]` is phi_{i+1}; `theta[i][j]` is theta_{i+1, j+1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiProfile {
    pub phi: [CycElem; 4],
    pub theta: [[CycElem; 4]; 4],
}

/// A totally positive square class, stored by a certified representative.
/// Classes compare equal iff the ratio of representatives is a square in
/// the real subfield.
#[derive(Debug, Clone)]
pub struct SquareClass {
    n: u64,
    rep: CycElem,
}

impl SquareClass {
    pub fn new(rep: CycElem) -> Result<Self> {
        if rep.is_zero() {
            return Err(Error::InvariantViolation(
                "square class representative must be nonzero".into(),
            ));
        }
        if !is_totally_positive(&rep)? {
            return Err(Error::InvariantViolation(
                "square class representative must be totally positive".into(),
            ));
        }
        Ok(SquareClass {
            n: rep.level(),
            rep,
        })
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn rep(&self) -> &CycElem {
        &self.rep
    }

    pub fn is_trivial(&self) -> Result<bool> {
        Ok(is_square_in_f(&self.rep)?.is_square())
    }

    pub fn mul(&self, other: &SquareClass) -> Result<SquareClass> {
        SquareClass::new(self.rep.checked_mul(&other.rep)?)
    }

    pub fn same(&self, other: &SquareClass) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::LevelMismatch {
                left: self.n,
                right: other.n,
            });
        }
        same_square_class(&self.rep, &other.rep)
    }
}

/// phi_i and theta_ij of an SO3 matrix, with the profile invariants
/// (sum phi = 1, phi_i phi_j = theta_ij^2) re-verified on construction.
pub fn phi_profile(m: &OMat) -> Result<PhiProfile> {
    if !is_in_so3(m) {
        return Err(Error::NotSpecialOrthogonal);
    }
    let n = m.level();
    let quarter = rat_frac(1, 4);
    let one = CycElem::one(n);
    let e = |r: usize, c: usize| m.entry(r, c);
    let diag_combo = |s0: i64, s1: i64, s2: i64| {
        let mut acc = one.clone();
        acc = acc + e(0, 0).scale(&crate::cyclotomic::rat(s0));
        acc = acc + e(1, 1).scale(&crate::cyclotomic::rat(s1));
        acc = acc + e(2, 2).scale(&crate::cyclotomic::rat(s2));
        acc.scale(&quarter)
    };
    let phi = [
        diag_combo(1, 1, 1),
        diag_combo(-1, -1, 1),
        diag_combo(-1, 1, -1),
        diag_combo(1, -1, -1),
    ];
    let zero = CycElem::zero(n);
    let mut theta: [[CycElem; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| zero.clone()));
    let quarter_of = |x: CycElem| x.scale(&quarter);
    theta[0][1] = quarter_of(e(0, 1) - e(1, 0));
    theta[0][2] = quarter_of(e(2, 0) - e(0, 2));
    theta[0][3] = quarter_of(e(1, 2) - e(2, 1));
    theta[2][3] = quarter_of(e(0, 1) + e(1, 0));
    theta[1][3] = quarter_of(e(2, 0) + e(0, 2));
    theta[1][2] = quarter_of(e(1, 2) + e(2, 1));
    for i in 0..4 {
        for j in (i + 1)..4 {
            theta[j][i] = theta[i][j].clone();
        }
    }

    // profile invariants
    let sum = phi.iter().fold(CycElem::zero(n), |acc, p| acc + p.clone());
    if !sum.is_one() {
        return Err(Error::InvariantViolation("sum of phi_i differs from 1".into()));
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if &phi[i] * &phi[j] != &theta[i][j] * &theta[i][j] {
                return Err(Error::InvariantViolation(format!(
                    "phi_{} phi_{} != theta^2",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(PhiProfile { phi, theta })
}

/// The square-class obstruction phi(M): the class of the first nonzero
/// phi_i, well defined because all nonzero phi_i agree modulo squares
/// (asserted here via certified ratio tests).
pub fn phi_class(m: &OMat) -> Result<SquareClass> {
    let profile = phi_profile(m)?;
    phi_class_of_profile(&profile)
}

fn phi_class_of_profile(profile: &PhiProfile) -> Result<SquareClass> {
    let first = profile
        .phi
        .iter()
        .position(|p| !p.is_zero())
        .expect("sum of phi_i is 1, so one is nonzero");
    let rep = profile.phi[first].clone();
    for later in profile.phi[first + 1..].iter().filter(|p| !p.is_zero()) {
        if !same_square_class(&rep, later)? {
            return Err(Error::InvariantViolation(
                "nonzero phi_i disagree modulo squares".into(),
            ));
        }
    }
    SquareClass::new(rep)
}

#[derive(Debug, Clone)]
pub enum LiftOutcome {
    Lifted(UMat),
    Obstructed(SquareClass),
}

impl LiftOutcome {
    pub fn lifted(&self) -> Option<&UMat> {
        match self {
            LiftOutcome::Lifted(u) => Some(u),
            LiftOutcome::Obstructed(_) => None,
        }
    }

    pub fn obstruction(&self) -> Option<&SquareClass> {
        match self {
            LiftOutcome::Lifted(_) => None,
            LiftOutcome::Obstructed(c) => Some(c),
        }
    }
}

/// Constructive lift along the adjoint map: if every nonzero phi_i is a
/// square, signed roots a_i with a_i a_j = theta_ij assemble a preimage in
/// SU2(R_n); otherwise the obstruction class is returned. The first
/// nonzero a_i is taken positive in the first real embedding; the other
/// valid lift is its negative.
pub fn try_lift_to_su2(m: &OMat) -> Result<LiftOutcome> {
    let n = m.level();
    let profile = phi_profile(m)?;
    let first = profile
        .phi
        .iter()
        .position(|p| !p.is_zero())
        .expect("some phi_i is nonzero");
    let root = match is_square_in_f(&profile.phi[first])? {
        SquareVerdict::Square { root } => root,
        SquareVerdict::NonSquare { .. } => {
            return Ok(LiftOutcome::Obstructed(phi_class_of_profile(&profile)?));
        }
    };
    let root_inv = root.inv()?;
    let mut a: Vec<CycElem> = vec![CycElem::zero(n); 4];
    a[first] = root;
    for j in 0..4 {
        if j != first {
            a[j] = &profile.theta[first][j] * &root_inv;
        }
    }
    // exact verification; the exactness theorem says this cannot fail for
    // a genuine SO3(R_n^+) matrix with trivial obstruction
    let image = ad_quadruple(n, &a[0], &a[1], &a[2], &a[3]);
    if image != *m {
        return Err(Error::InvariantViolation(
            "constructed lift does not map back to the input".into(),
        ));
    }
    let lift = assemble_su2(n, &a)?;
    Ok(LiftOutcome::Lifted(lift))
}

fn assemble_su2(n: u64, a: &[CycElem]) -> Result<UMat> {
    let with_i = |re: &CycElem, im: &CycElem| -> Result<CycElem> {
        if im.is_zero() {
            Ok(re.clone())
        } else {
            Ok(re + &(&CycElem::i_unit(n)? * im))
        }
    };
    let e00 = with_i(&a[0], &a[1])?;
    let e01 = with_i(&a[2], &a[3])?;
    let e10 = with_i(&(-&a[2]), &a[3])?;
    let e11 = with_i(&a[0], &(-&a[1]))?;
    Ok(UMat::new(n, [[e00, e01], [e10, e11]]))
}

/// Lift to U2(R_n) at the supported levels: try SU2 first; on obstruction,
/// peel off the image of T_n and lift the remainder. One of the two
/// branches must succeed because cbar = 1 there.
pub fn try_lift_to_u2_supported(m: &OMat) -> Result<UMat> {
    let n = m.level();
    if !is_selmer_supported(n) {
        return Err(Error::unsupported(
            n,
            "U2 lifting is certified only for n = 2^s (n >= 8) and n = 3*2^s (4 | n)",
        ));
    }
    match try_lift_to_su2(m)? {
        LiftOutcome::Lifted(a) => Ok(a),
        LiftOutcome::Obstructed(_) => {
            let twist = so3_z_rotation(n, -1)?; // pi(T_n)^(-1)
            let reduced = twist.mul(m);
            match try_lift_to_su2(&reduced)? {
                LiftOutcome::Lifted(a) => {
                    let g = gate_t(n).mul(&a);
                    if pi_map(&g)? != *m {
                        return Err(Error::InvariantViolation(
                            "U2 lift does not project to the input".into(),
                        ));
                    }
                    Ok(g)
                }
                LiftOutcome::Obstructed(_) => Err(Error::InvariantViolation(format!(
                    "both lift branches obstructed at supported level {}",
                    n
                ))),
            }
        }
    }
}

/// Verifies multiplicativity of phi on a pair, plus the square identity
/// behind it (when phi_1(MN) is nonzero): for each i,
/// phi_i(M) phi_i(N) phi_1(MN) is the square of
/// phi_i(M) phi_i(N) +- sum theta_ij(M) theta_ij(N), the sign being -1
/// exactly when 1 appears among the subscripts.
pub fn homomorphism_check(m: &OMat, other: &OMat) -> Result<bool> {
    let prod = m.mul(other);
    let cm = phi_class(m)?;
    let cn = phi_class(other)?;
    let cp = phi_class(&prod)?;
    if !cp.same(&cm.mul(&cn)?)? {
        return Ok(false);
    }
    let pm = phi_profile(m)?;
    let pn = phi_profile(other)?;
    let pp = phi_profile(&prod)?;
    if !pp.phi[0].is_zero() {
        for i in 0..4 {
            let mut inner = &pm.phi[i] * &pn.phi[i];
            for j in 0..4 {
                if j == i {
                    continue;
                }
                let term = &pm.theta[i][j] * &pn.theta[i][j];
                if i == 0 || j == 0 {
                    inner = inner - term;
                } else {
                    inner = inner + term;
                }
            }
            let lhs = &(&pm.phi[i] * &pn.phi[i]) * &pp.phi[0];
            if lhs != &inner * &inner {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The Selmer data at the supported levels: rank 1 group Z/2Z, c = 2,
/// cbar = 1, cross-checked against c = 2^(1 + r - r_plus) cbar.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SelmerTable {
    pub n: u64,
    pub rank: u32,
    pub c: u64,
    pub cbar: u64,
}

pub fn selmer_table(n: u64) -> Result<SelmerTable> {
    if !is_selmer_supported(n) {
        return Err(Error::unsupported(
            n,
            "Selmer ranks are certified only for n = 2^s (n >= 8) and n = 3*2^s (4 | n)",
        ));
    }
    let table = SelmerTable {
        n,
        rank: 1,
        c: 2,
        cbar: 1,
    };
    let sd = split_data(n)?;
    let predicted = 1u64 << (1 + sd.r - sd.r_plus);
    if table.c != predicted * table.cbar {
        return Err(Error::InvariantViolation(format!(
            "index relation c = 2^(1+r-r+) cbar fails at n = {}",
            n
        )));
    }
    Ok(table)
}

/// Even-valuation evidence for a square-class representative: the odd part
/// of the norm (numerator and denominator separately) must be a perfect
/// square; any odd valuation at an odd prime would contradict membership
/// in the totally positive Selmer group.
#[derive(Debug, Clone)]
pub struct NormParityReport {
    pub norm: Rat,
    pub ok: bool,
}

pub fn norm_even_valuation_check(x: &CycElem) -> Result<NormParityReport> {
    if !x.is_real() {
        return Err(Error::NotReal);
    }
    let n = x.level();
    let mut prod = CycElem::one(n);
    for k in crate::embed::real_coset_reps(n) {
        prod = &prod * &x.galois(k as i64)?;
    }
    let norm = prod
        .as_rational()
        .ok_or_else(|| Error::InvariantViolation("real-subfield norm not rational".into()))?;
    let strip2 = |v: &BigInt| -> BigInt {
        let mut v = v.abs();
        while v.is_even() && !v.is_zero() {
            v /= 2;
        }
        v
    };
    let is_square = |v: &BigInt| {
        let r = v.sqrt();
        &(&r * &r) == v
    };
    let ok = is_square(&strip2(norm.numer())) && is_square(&strip2(norm.denom()));
    Ok(NormParityReport { norm, ok })
}

// ---------------------------------------------------------------------
// the obstruction witness over Z[sqrt21, 1/2]
// ---------------------------------------------------------------------

/// The rotation T_q, the unitary-up-to-scalar M_q, and the unit
/// u = (5 + sqrt21)/2 witnessing that PU2 -> SO3 need not be onto.
#[derive(Debug, Clone)]
pub struct DrearyReport {
    pub sqrt21: CycElem,
    pub u: CycElem,
    pub t_q: OMat,
    pub m_q: UMat,
    pub t_q_in_so3: bool,
    pub entries_in_z_sqrt21_half: bool,
    pub mq_norm_u: bool,
    pub class_is_u: bool,
    pub u_nontrivial: bool,
}

impl DrearyReport {
    pub fn all_verdicts_hold(&self) -> bool {
        self.t_q_in_so3
            && self.entries_in_z_sqrt21_half
            && self.mq_norm_u
            && self.class_is_u
            && self.u_nontrivial
    }
}

/// sqrt(21) inside Q(zeta_21), as the product of the quadratic Gauss sums
/// of conductors 3 and 7, sign-normalized so that the first embedding is
/// positive; its square is verified to be exactly 21.
pub fn sqrt21_in_level_21() -> Result<CycElem> {
    let n = 21u64;
    // Gauss sum for the quadratic character mod 3: zeta_3 - zeta_3^2
    let g3 = CycElem::zeta_pow(n, 7) - CycElem::zeta_pow(n, 14);
    // Gauss sum for the quadratic character mod 7; residues are 1, 2, 4
    let mut g7 = CycElem::zero(n);
    for a in 1..7i64 {
        let sign = if [1, 2, 4].contains(&(a % 7)) { 1 } else { -1 };
        g7 = g7 + CycElem::zeta_pow(n, 3 * a).scale(&crate::cyclotomic::rat(sign));
    }
    // g3 g7 = (i sqrt3)(i sqrt7) = -sqrt21
    let mut s = -&(&g3 * &g7);
    if &s * &s != CycElem::from_int(n, 21) {
        return Err(Error::InvariantViolation(
            "Gauss-sum construction of sqrt21 failed".into(),
        ));
    }
    if crate::embed::first_embedding_sign(&s)? < 0 {
        s = -s;
    }
    Ok(s)
}

pub fn example_dreary_witness() -> Result<DrearyReport> {
    let n = 21u64;
    let s21 = sqrt21_in_level_21()?;
    let half = rat_frac(1, 2);
    let u = (CycElem::from_int(n, 5) + s21.clone()).scale(&half);

    let eighth = rat_frac(1, 8);
    let a = (CycElem::from_int(n, 3) + s21.clone()).scale(&eighth);
    let b = CycElem::from_rat(n, rat_frac(1, 4));
    let c = (CycElem::from_int(n, 3) - s21.clone()).scale(&eighth);
    let t_q = OMat::new(
        n,
        [
            [a.clone(), b.clone(), c.clone()],
            [c.clone(), a.clone(), b.clone()],
            [b.clone(), c.clone(), a.clone()],
        ],
    );

    // M_q lives where i does: level 84
    let big = 84u64;
    let s84 = s21.level_raise(big)?;
    let i = CycElem::i_unit(big)?;
    let quarter = rat_frac(1, 4);
    let four = CycElem::from_int(big, 4);
    let one = CycElem::one(big);
    let m_q = UMat::new(
        big,
        [
            [
                (&(&four + &s84) + &i).scale(&quarter),
                (&one + &i).scale(&quarter),
            ],
            [
                (&i - &one).scale(&quarter),
                (&(&four + &s84) - &i).scale(&quarter),
            ],
        ],
    );

    let t_q_in_so3 = is_in_so3(&t_q);
    let entries_in_z_sqrt21_half = t_q
        .entries()
        .iter()
        .flatten()
        .all(|e| in_z_sqrt21_half(e, &s21).unwrap_or(false));
    let u84 = u.level_raise(big)?;
    let mq_norm_u = m_q.mul(&m_q.dagger()) == UMat::identity(big).scale(&u84);

    let class = phi_class(&t_q)?;
    let u_class = SquareClass::new(u.clone())?;
    let class_is_u = class.same(&u_class)?;
    let u_nontrivial = !u_class.is_trivial()? && is_totally_positive(&u)?;

    Ok(DrearyReport {
        sqrt21: s21,
        u,
        t_q,
        m_q,
        t_q_in_so3,
        entries_in_z_sqrt21_half,
        mq_norm_u,
        class_is_u,
        u_nontrivial,
    })
}

/// Membership in Z[sqrt21, 1/2]: the element must be a + b sqrt21 with
/// rational a, b whose denominators are powers of two.
fn in_z_sqrt21_half(e: &CycElem, s21: &CycElem) -> Result<bool> {
    let n = e.level();
    // an automorphism flipping sqrt21
    let mut flip = None;
    for k in 2..n {
        if k.gcd(&n) != 1 {
            continue;
        }
        if s21.galois(k as i64)? == -s21 {
            flip = Some(k as i64);
            break;
        }
    }
    let flip = flip.ok_or_else(|| {
        Error::InvariantViolation("no automorphism negates sqrt21".into())
    })?;
    let e_conj = e.galois(flip)?;
    let half = rat_frac(1, 2);
    let a = (e + &e_conj).scale(&half);
    let b = &(e - &e_conj).scale(&half) * &s21.inv()?;
    let pow2 = |r: &Rat| {
        let d = r.denom();
        d.is_one() || (d.abs().to_biguint().unwrap().count_ones() == 1)
    };
    Ok(match (a.as_rational(), b.as_rational()) {
        (Some(ar), Some(br)) => {
            pow2(&ar) && pow2(&br) && (&CycElem::from_rat(n, ar) + &(s21 * &CycElem::from_rat(n, br))) == *e
        }
        _ => false,
    })
}
