//! Exact 2x2 unitary and 3x3 orthogonal matrices over cyclotomic rings.
//!
//! `UMat` holds 2x2 matrices over Q(zeta_n) and carries the membership
//! tests for U2(R_n), its subgroup with determinant a power of zeta_n, and
//! SU2(R_n). `OMat` holds 3x3 matrices with conjugation-fixed entries and
//! the SO3(R_n^+) test. The adjoint map SU2 -> SO3 is the displayed
//! quadratic formula in the entries; pi extends it to all of U2 by
//! conjugation on the Pauli basis followed by division by the determinant
//! (equivalently Ad(g / sqrt(det g)), but with no square roots taken).

use std::fmt;

use crate::cyclotomic::{rat_frac, CycElem};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UMat {
    n: u64,
    e: [[CycElem; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OMat {
    n: u64,
    e: [[CycElem; 3]; 3],
}

/// Coordinates of a trace-0 hermitian matrix on the Pauli basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliVec {
    pub x: CycElem,
    pub y: CycElem,
    pub z: CycElem,
}

/// Result of the U2-family membership tests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub unitary: bool,
    pub in_u2: bool,
    pub in_u2zeta: bool,
    pub in_su2: bool,
    /// j with det = zeta_n^j, when the determinant is a power of zeta_n.
    pub det_power: Option<u64>,
}

impl UMat {
    pub fn new(n: u64, e: [[CycElem; 2]; 2]) -> Self {
        for row in &e {
            for x in row {
                assert_eq!(x.level(), n, "entry level mismatch");
            }
        }
        UMat { n, e }
    }

    pub fn try_new(n: u64, e: [[CycElem; 2]; 2]) -> Result<Self> {
        for row in &e {
            for x in row {
                if x.level() != n {
                    return Err(Error::LevelMismatch {
                        left: n,
                        right: x.level(),
                    });
                }
            }
        }
        Ok(UMat { n, e })
    }

    pub fn identity(n: u64) -> Self {
        let z = CycElem::zero(n);
        let o = CycElem::one(n);
        UMat::new(n, [[o.clone(), z.clone()], [z, o]])
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn entry(&self, r: usize, c: usize) -> &CycElem {
        &self.e[r][c]
    }

    pub fn entries(&self) -> &[[CycElem; 2]; 2] {
        &self.e
    }

    pub fn mul(&self, other: &UMat) -> UMat {
        assert_eq!(self.n, other.n, "level mismatch");
        let mut out = [
            [CycElem::zero(self.n), CycElem::zero(self.n)],
            [CycElem::zero(self.n), CycElem::zero(self.n)],
        ];
        for (r, out_row) in out.iter_mut().enumerate() {
            for (c, slot) in out_row.iter_mut().enumerate() {
                let mut acc = CycElem::zero(self.n);
                for k in 0..2 {
                    acc = acc + (&self.e[r][k] * &other.e[k][c]);
                }
                *slot = acc;
            }
        }
        UMat::new(self.n, out)
    }

    pub fn scale(&self, s: &CycElem) -> UMat {
        UMat::new(
            self.n,
            [
                [&self.e[0][0] * s, &self.e[0][1] * s],
                [&self.e[1][0] * s, &self.e[1][1] * s],
            ],
        )
    }

    pub fn neg(&self) -> UMat {
        self.scale(&CycElem::from_int(self.n, -1))
    }

    pub fn det(&self) -> CycElem {
        &(&self.e[0][0] * &self.e[1][1]) - &(&self.e[0][1] * &self.e[1][0])
    }

    pub fn trace(&self) -> CycElem {
        &self.e[0][0] + &self.e[1][1]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> UMat {
        UMat::new(
            self.n,
            [
                [self.e[0][0].conj(), self.e[1][0].conj()],
                [self.e[0][1].conj(), self.e[1][1].conj()],
            ],
        )
    }

    /// Adjugate: inverse times determinant.
    pub fn adjugate(&self) -> UMat {
        UMat::new(
            self.n,
            [
                [self.e[1][1].clone(), -&self.e[0][1]],
                [-&self.e[1][0], self.e[0][0].clone()],
            ],
        )
    }

    pub fn inverse(&self) -> Result<UMat> {
        let d = self.det();
        let d_inv = d.inv()?;
        Ok(self.adjugate().scale(&d_inv))
    }

    pub fn pow(&self, e: i64) -> Result<UMat> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut acc = UMat::identity(self.n);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    pub fn is_unitary(&self) -> bool {
        self.mul(&self.dagger()) == UMat::identity(self.n)
    }

    /// Membership in U2(R_n), U2^zeta(R_n), and SU2(R_n).
    pub fn membership(&self) -> Membership {
        let unitary = self.is_unitary();
        let in_rn = self.e.iter().all(|row| row.iter().all(|x| x.is_in_rn()));
        let in_u2 = unitary && in_rn;
        let det = self.det();
        let mut det_power = None;
        if in_u2 {
            let mut z = CycElem::one(self.n);
            let zeta = CycElem::zeta(self.n);
            for j in 0..self.n {
                if det == z {
                    det_power = Some(j);
                    break;
                }
                z = &z * &zeta;
            }
        }
        Membership {
            unitary,
            in_u2,
            in_u2zeta: in_u2 && det_power.is_some(),
            in_su2: in_u2 && det.is_one(),
            det_power,
        }
    }

    /// Tests projective equality U = lambda V with lambda a root of unity
    /// of R_n, returning the scalar when it exists.
    pub fn projective_equal(&self, other: &UMat) -> Result<Option<CycElem>> {
        if self.n != other.n {
            return Err(Error::LevelMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let mut lambda = None;
        'search: for r in 0..2 {
            for c in 0..2 {
                if !other.e[r][c].is_zero() {
                    if self.e[r][c].is_zero() {
                        return Ok(None);
                    }
                    lambda = Some(&self.e[r][c] * &other.e[r][c].inv()?);
                    break 'search;
                }
            }
        }
        let lambda = lambda.expect("matrix has a nonzero entry");
        // roots of unity in R_n: powers of zeta_n for even n, and +-powers
        // for odd n; lambda^lcm(2, n) = 1 covers both
        let order = if self.n % 2 == 0 { self.n } else { 2 * self.n };
        if !lambda.pow(order as i64)?.is_one() {
            return Ok(None);
        }
        if *self == other.scale(&lambda) {
            Ok(Some(lambda))
        } else {
            Ok(None)
        }
    }
}

impl fmt::Display for UMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}, {};", self.e[0][0], self.e[0][1])?;
        write!(f, " {}, {}]", self.e[1][0], self.e[1][1])
    }
}

impl OMat {
    /// Builds a 3x3 matrix; panics if an entry is non-real or at the wrong
    /// level, which internal callers rule out by construction.
    pub fn new(n: u64, e: [[CycElem; 3]; 3]) -> Self {
        for row in &e {
            for x in row {
                assert_eq!(x.level(), n, "entry level mismatch");
                assert!(x.is_real(), "OMat entries must be conjugation-fixed");
            }
        }
        OMat { n, e }
    }

    pub fn try_new(n: u64, e: [[CycElem; 3]; 3]) -> Result<Self> {
        for row in &e {
            for x in row {
                if x.level() != n {
                    return Err(Error::LevelMismatch {
                        left: n,
                        right: x.level(),
                    });
                }
                if !x.is_real() {
                    return Err(Error::NotReal);
                }
            }
        }
        Ok(OMat { n, e })
    }

    pub fn identity(n: u64) -> Self {
        Self::diagonal(n, [1, 1, 1])
    }

    pub fn diagonal(n: u64, d: [i64; 3]) -> Self {
        let mut e = Self::zero_entries(n);
        for (k, v) in d.iter().enumerate() {
            e[k][k] = CycElem::from_int(n, *v);
        }
        OMat { n, e }
    }

    fn zero_entries(n: u64) -> [[CycElem; 3]; 3] {
        std::array::from_fn(|_| std::array::from_fn(|_| CycElem::zero(n)))
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn entry(&self, r: usize, c: usize) -> &CycElem {
        &self.e[r][c]
    }

    pub fn entries(&self) -> &[[CycElem; 3]; 3] {
        &self.e
    }

    pub fn mul(&self, other: &OMat) -> OMat {
        assert_eq!(self.n, other.n, "level mismatch");
        let mut out = Self::zero_entries(self.n);
        for (r, out_row) in out.iter_mut().enumerate() {
            for (c, slot) in out_row.iter_mut().enumerate() {
                let mut acc = CycElem::zero(self.n);
                for k in 0..3 {
                    acc = acc + (&self.e[r][k] * &other.e[k][c]);
                }
                *slot = acc;
            }
        }
        OMat { n: self.n, e: out }
    }

    pub fn transpose(&self) -> OMat {
        let mut out = Self::zero_entries(self.n);
        for (r, out_row) in out.iter_mut().enumerate() {
            for (c, slot) in out_row.iter_mut().enumerate() {
                *slot = self.e[c][r].clone();
            }
        }
        OMat { n: self.n, e: out }
    }

    pub fn det(&self) -> CycElem {
        let e = &self.e;
        let m = |r: usize, c: usize| &e[r][c];
        let t1 = m(0, 0) * &(&(m(1, 1) * m(2, 2)) - &(m(1, 2) * m(2, 1)));
        let t2 = m(0, 1) * &(&(m(1, 0) * m(2, 2)) - &(m(1, 2) * m(2, 0)));
        let t3 = m(0, 2) * &(&(m(1, 0) * m(2, 1)) - &(m(1, 1) * m(2, 0)));
        &(&t1 - &t2) + &t3
    }

    pub fn trace(&self) -> CycElem {
        &(&self.e[0][0] + &self.e[1][1]) + &self.e[2][2]
    }

    pub fn pow(&self, e: u64) -> OMat {
        let mut acc = OMat::identity(self.n);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn level_raise(&self, new_level: u64) -> Result<OMat> {
        let mut e = Self::zero_entries(new_level);
        for (r, row) in e.iter_mut().enumerate() {
            for (c, slot) in row.iter_mut().enumerate() {
                *slot = self.e[r][c].level_raise(new_level)?;
            }
        }
        Ok(OMat { n: new_level, e })
    }
}

impl fmt::Display for OMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (r, row) in self.e.iter().enumerate() {
            let open = if r == 0 { "[" } else { " " };
            let close = if r == 2 { "]" } else { ";" };
            writeln!(f, "{}{}, {}, {}{}", open, row[0], row[1], row[2], close)?;
        }
        Ok(())
    }
}

/// Exact SO3(R_n^+) membership: orthogonality, determinant 1, and every
/// entry in R_n^+.
pub fn is_in_so3(m: &OMat) -> bool {
    m.mul(&m.transpose()) == OMat::identity(m.level())
        && m.det().is_one()
        && m
            .entries()
            .iter()
            .all(|row| row.iter().all(|x| x.is_in_rn_plus()))
}

// ---------------------------------------------------------------------
// named gates
// ---------------------------------------------------------------------

/// T_n = diag(1, zeta_n).
pub fn gate_t(n: u64) -> UMat {
    UMat::new(
        n,
        [
            [CycElem::one(n), CycElem::zero(n)],
            [CycElem::zero(n), CycElem::zeta(n)],
        ],
    )
}

/// The Hadamard gate (1/2) [[1+i, 1+i], [1+i, -1-i]]; needs i in K_n.
pub fn gate_h(n: u64) -> Result<UMat> {
    let i = CycElem::i_unit(n)?;
    let h = (CycElem::one(n) + i).scale(&rat_frac(1, 2));
    Ok(UMat::new(n, [[h.clone(), h.clone()], [h.clone(), -&h]]))
}

/// The determinant-1 twisted Hadamard
/// H(z) = (1/2) [[1+i, z(1+i)], [conj(z)(-1+i), 1-i]] with z = zeta_n^j.
pub fn gate_hz(n: u64, j: i64) -> Result<UMat> {
    let i = CycElem::i_unit(n)?;
    let one = CycElem::one(n);
    let z = CycElem::zeta_pow(n, j);
    let zbar = CycElem::zeta_pow(n, -j);
    let half = rat_frac(1, 2);
    let p = (&one + &i).scale(&half); // (1+i)/2
    let m = (&i - &one).scale(&half); // (-1+i)/2
    Ok(UMat::new(n, [[p.clone(), &z * &p], [&zbar * &m, p.conj()]]))
}

/// Pauli matrices as 2x2 matrices at level n (requires i).
pub fn pauli(n: u64) -> Result<[UMat; 3]> {
    let i = CycElem::i_unit(n)?;
    let one = CycElem::one(n);
    let zero = CycElem::zero(n);
    let sx = UMat::new(n, [[zero.clone(), one.clone()], [one.clone(), zero.clone()]]);
    let sy = UMat::new(n, [[zero.clone(), -&i], [i.clone(), zero.clone()]]);
    let sz = UMat::new(n, [[one.clone(), zero.clone()], [zero.clone(), -&one]]);
    Ok([sx, sy, sz])
}

impl PauliVec {
    /// x sigma_x + y sigma_y + z sigma_z = [[z, x - iy], [x + iy, -z]].
    pub fn to_hermitian(&self, n: u64) -> Result<UMat> {
        let i = CycElem::i_unit(n)?;
        let iy = &i * &self.y;
        Ok(UMat::new(
            n,
            [[self.z.clone(), &self.x - &iy], [&self.x + &iy, -&self.z]],
        ))
    }

    /// Reads Pauli coordinates off a trace-0 hermitian matrix.
    pub fn from_hermitian(m: &UMat) -> Result<PauliVec> {
        let n = m.level();
        let i = CycElem::i_unit(n)?;
        let half = rat_frac(1, 2);
        let x = (m.entry(0, 1) + m.entry(1, 0)).scale(&half);
        let y = &(m.entry(1, 0) - m.entry(0, 1)).scale(&half) * &i.inv()?;
        let z = m.entry(0, 0).clone();
        if !(&z + m.entry(1, 1)).is_zero() || !x.is_real() || !y.is_real() || !z.is_real() {
            return Err(Error::InvariantViolation(
                "matrix is not trace-0 hermitian".into(),
            ));
        }
        Ok(PauliVec { x, y, z })
    }

    /// The quadratic form (1/2) Tr(X^2) = x^2 + y^2 + z^2 preserved by
    /// conjugation.
    pub fn norm_form(&self) -> CycElem {
        &(&(&self.x * &self.x) + &(&self.y * &self.y)) + &(&self.z * &self.z)
    }
}

/// The adjoint representation SU2(R_n) -> SO3(R_n^+), evaluated by the
/// closed 3x3 formula in a, b, c, d where the input is
/// [[a+bi, c+di], [-c+di, a-bi]].
pub fn adjoint(a_mat: &UMat) -> Result<OMat> {
    let n = a_mat.level();
    if !a_mat.is_unitary() || !a_mat.det().is_one() {
        return Err(Error::NotSpecialUnitary);
    }
    // shape check: the displayed SU2 form
    if a_mat.entry(1, 1) != &a_mat.entry(0, 0).conj()
        || *a_mat.entry(1, 0) != -&a_mat.entry(0, 1).conj()
    {
        return Err(Error::NotSpecialUnitary);
    }
    let i = CycElem::i_unit(n)?;
    let half = rat_frac(1, 2);
    let two_i_inv = (&i + &i).inv()?;
    let re = |x: &CycElem| (x + &x.conj()).scale(&half);
    let im = |x: &CycElem| &(x - &x.conj()) * &two_i_inv;
    let a = re(a_mat.entry(0, 0));
    let b = im(a_mat.entry(0, 0));
    let c = re(a_mat.entry(0, 1));
    let d = im(a_mat.entry(0, 1));
    Ok(ad_quadruple(n, &a, &b, &c, &d))
}

/// The adjoint image written directly in the real parameters a, b, c, d of
/// [[a+bi, c+di], [-c+di, a-bi]]; used both by `adjoint` and to verify
/// constructive lifts without leaving the real subfield.
pub fn ad_quadruple(n: u64, a: &CycElem, b: &CycElem, c: &CycElem, d: &CycElem) -> OMat {
    let sq = |x: &CycElem| x * x;
    let two = |x: CycElem| x.scale(&crate::cyclotomic::rat(2));
    let (a2, b2, c2, d2) = (sq(a), sq(b), sq(c), sq(d));
    let e = [
        [
            &(&(&a2 - &b2) - &c2) + &d2,
            two(&(a * b) + &(c * d)),
            two(&(b * d) - &(a * c)),
        ],
        [
            two(&(c * d) - &(a * b)),
            &(&(&a2 - &b2) + &c2) - &d2,
            two(&(a * d) + &(b * c)),
        ],
        [
            two(&(a * c) + &(b * d)),
            two(&(b * c) - &(a * d)),
            &(&(&a2 + &b2) - &c2) - &d2,
        ],
    ];
    OMat::new(n, e)
}

/// The extension pi of the adjoint map to all of U2(R_n): conjugation on
/// the Pauli basis divided by the determinant, g X adj(g) / det(g); no
/// square roots are taken. Scalars of absolute value one act trivially.
pub fn pi_map(g: &UMat) -> Result<OMat> {
    let n = g.level();
    let membership = g.membership();
    if !membership.in_u2 {
        return Err(Error::NotUnitary);
    }
    let det_inv = g.det().inv()?;
    let adj = g.adjugate();
    let sigmas = pauli(n)?;
    let mut cols: Vec<PauliVec> = Vec::with_capacity(3);
    for s in &sigmas {
        let conj = g.mul(s).mul(&adj).scale(&det_inv);
        cols.push(
            PauliVec::from_hermitian(&conj).map_err(|_| {
                Error::InvariantViolation("pi image not trace-0 hermitian".into())
            })?,
        );
    }
    let e = [
        [cols[0].x.clone(), cols[1].x.clone(), cols[2].x.clone()],
        [cols[0].y.clone(), cols[1].y.clone(), cols[2].y.clone()],
        [cols[0].z.clone(), cols[1].z.clone(), cols[2].z.clone()],
    ];
    Ok(OMat::new(n, e))
}

/// The diagonal SO3 matrices M_x, M_y, M_z of the square-class machinery.
pub fn m_x(n: u64) -> OMat {
    OMat::diagonal(n, [1, -1, -1])
}

pub fn m_y(n: u64) -> OMat {
    OMat::diagonal(n, [-1, 1, -1])
}

pub fn m_z(n: u64) -> OMat {
    OMat::diagonal(n, [-1, -1, 1])
}

/// Rotation by 2 pi k / n about the z-axis, exact over F_n with i in K_n.
pub fn so3_z_rotation(n: u64, k: i64) -> Result<OMat> {
    let i = CycElem::i_unit(n)?;
    let half = rat_frac(1, 2);
    let c = CycElem::two_cos(n, k).scale(&half);
    let s = &(CycElem::zeta_pow(n, k) - CycElem::zeta_pow(n, -k)).scale(&half) * &(i.inv()?);
    let zero = CycElem::zero(n);
    let one = CycElem::one(n);
    Ok(OMat::new(
        n,
        [
            [c.clone(), -&s, zero.clone()],
            [s, c, zero.clone()],
            [zero.clone(), zero, one],
        ],
    ))
}

/// Rotation by pi/2 about the y-axis: [[0,0,1],[0,1,0],[-1,0,0]].
pub fn so3_y_quarter(n: u64) -> OMat {
    let zero = CycElem::zero(n);
    let one = CycElem::one(n);
    OMat::new(
        n,
        [
            [zero.clone(), zero.clone(), one.clone()],
            [zero.clone(), one.clone(), zero.clone()],
            [-&one, zero.clone(), zero],
        ],
    )
}

/// (1/sqrt2) [[1,-1],[1,1]], the determinant-1 form of H T^{n/2} used in
/// the amalgam construction; needs 8 | n so that sqrt2 lives in the level.
pub fn h_tilde(n: u64) -> Result<UMat> {
    if n % 8 != 0 {
        return Err(Error::unsupported(n, "h_tilde needs 8 | n"));
    }
    let k = (n / 8) as i64;
    let sqrt2 = CycElem::zeta_pow(n, k) - CycElem::zeta_pow(n, 3 * k);
    let inv = sqrt2.inv()?;
    Ok(UMat::new(
        n,
        [[inv.clone(), -&inv], [inv.clone(), inv.clone()]],
    ))
}

// ---------------------------------------------------------------------
// serialization: {"n": int, "rows": [[CycElem, ...], ...]}
// ---------------------------------------------------------------------

#[derive(serde::Serialize, serde::Deserialize)]
struct RawMat {
    n: u64,
    rows: Vec<Vec<CycElem>>,
}

impl serde::Serialize for UMat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawMat {
            n: self.n,
            rows: self.e.iter().map(|r| r.to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for UMat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = RawMat::deserialize(d)?;
        if raw.rows.len() != 2 || raw.rows.iter().any(|r| r.len() != 2) {
            return Err(DeError::custom("expected a 2x2 matrix"));
        }
        let mut rows = raw.rows.into_iter();
        let mut r0 = rows.next().unwrap().into_iter();
        let mut r1 = rows.next().unwrap().into_iter();
        let e = [
            [r0.next().unwrap(), r0.next().unwrap()],
            [r1.next().unwrap(), r1.next().unwrap()],
        ];
        UMat::try_new(raw.n, e).map_err(|err| DeError::custom(err.to_string()))
    }
}

impl serde::Serialize for OMat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawMat {
            n: self.n,
            rows: self.e.iter().map(|r| r.to_vec()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for OMat {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let raw = RawMat::deserialize(d)?;
        if raw.rows.len() != 3 || raw.rows.iter().any(|r| r.len() != 3) {
            return Err(DeError::custom("expected a 3x3 matrix"));
        }
        let mut rows = raw.rows.into_iter();
        let e = std::array::from_fn(|_| {
            let mut r = rows.next().unwrap().into_iter();
            std::array::from_fn(|_| r.next().unwrap())
        });
        OMat::try_new(raw.n, e).map_err(|err| DeError::custom(err.to_string()))
    }
}
