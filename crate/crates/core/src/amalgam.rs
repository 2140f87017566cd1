//! The rotation group generated by an order-4 turn about the y-axis and an
//! order-n turn about the z-axis, realized as exact matrices, together
//! with the normal form it inherits from the amalgam decomposition
//! S_4 *_{D_4} D_n.
//!
//! The two finite factors are enumerated outright: the octahedral group of
//! order 24 from the quarter turns, and the dihedral group of order 2n
//! from the z-rotations and the half turn about y. Their intersection is
//! the dihedral group of order 8 fixing the z-axis. Fixed right-coset
//! transversals (lexicographically least matrix per coset, ordered by the
//! first-embedding total order on entries) make the alternating normal
//! form unique, so word equality in the amalgam is decidable and must
//! agree with exact matrix equality.

use std::collections::{HashMap, VecDeque};

use crate::cyclotomic::{rat_frac, Rat};
use crate::embed::cmp_real;
use crate::error::{Error, Result};
use crate::matrix::{gate_h, gate_t, pi_map, so3_y_quarter, so3_z_rotation, OMat};
use crate::words::{GateToken, GateWord};
use crate::zeta::chi_amalgam;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    S4,
    Dn,
}

/// Precomputed data for one level n: generators, the finite factors, and
/// the coset tables behind the normal form.
pub struct AmalgamContext {
    pub n: u64,
    pub y_rot4: OMat,
    pub z_rot_n: OMat,
    s4: Vec<OMat>,
    dn: Vec<OMat>,
    d4: Vec<OMat>,
    s4_index: HashMap<OMat, usize>,
    dn_index: HashMap<OMat, usize>,
    d4_index: HashMap<OMat, usize>,
    s4_transversal: Vec<OMat>,
    dn_transversal: Vec<OMat>,
    /// g -> (core in D4, transversal rep), for g in the factor minus D4
    s4_decomp: HashMap<OMat, (OMat, OMat)>,
    dn_decomp: HashMap<OMat, (OMat, OMat)>,
}

fn closure(n: u64, gens: &[OMat]) -> Vec<OMat> {
    let identity = OMat::identity(n);
    let mut seen: HashMap<OMat, usize> = HashMap::new();
    seen.insert(identity.clone(), 0);
    let mut out = vec![identity];
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        let base = out[idx].clone();
        for g in gens {
            let next = base.mul(g);
            if !seen.contains_key(&next) {
                seen.insert(next.clone(), out.len());
                queue.push_back(out.len());
                out.push(next);
            }
        }
    }
    out
}

fn cmp_omat(a: &OMat, b: &OMat) -> Result<std::cmp::Ordering> {
    for r in 0..3 {
        for c in 0..3 {
            let ord = cmp_real(a.entry(r, c), b.entry(r, c))?;
            if ord != std::cmp::Ordering::Equal {
                return Ok(ord);
            }
        }
    }
    Ok(std::cmp::Ordering::Equal)
}

fn index_map(list: &[OMat]) -> HashMap<OMat, usize> {
    list.iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect()
}

/// Right-coset data for D4 in one factor: lexicographically least
/// representative per nontrivial coset, plus the decomposition
/// g = core * rep.
fn coset_tables(
    factor: &[OMat],
    d4: &HashMap<OMat, usize>,
) -> Result<(Vec<OMat>, HashMap<OMat, (OMat, OMat)>)> {
    let mut assigned: HashMap<OMat, usize> = HashMap::new();
    let mut cosets: Vec<Vec<OMat>> = Vec::new();
    for g in factor {
        if d4.contains_key(g) || assigned.contains_key(g) {
            continue;
        }
        let mut members = Vec::new();
        for (h, _) in d4.iter() {
            let m = h.mul(g);
            assigned.insert(m.clone(), cosets.len());
            members.push(m);
        }
        cosets.push(members);
    }
    let mut transversal = Vec::new();
    for members in &cosets {
        let mut best = members[0].clone();
        for m in &members[1..] {
            if cmp_omat(m, &best)? == std::cmp::Ordering::Less {
                best = m.clone();
            }
        }
        transversal.push(best);
    }
    // deterministic transversal order as well
    transversal.sort_by(|a, b| cmp_omat(a, b).expect("total order on real matrices"));
    let mut decomp = HashMap::new();
    for t in &transversal {
        for (h, _) in d4.iter() {
            let g = h.mul(t);
            decomp.insert(g, (h.clone(), t.clone()));
        }
    }
    Ok((transversal, decomp))
}

impl AmalgamContext {
    pub fn new(n: u64) -> Result<Self> {
        if n % 4 != 0 || n < 8 {
            return Err(Error::unsupported(n, "amalgam structure needs 4 | n, n >= 8"));
        }
        // generators as images of gate words under pi
        let y_rot4 = pi_map(&gate_h(n)?.mul(&gate_t(n).pow((n / 2) as i64)?))?;
        if y_rot4 != so3_y_quarter(n) {
            return Err(Error::InvariantViolation(
                "pi(H T^(n/2)) is not the y-axis quarter turn".into(),
            ));
        }
        let z_rot_n = pi_map(&gate_t(n))?;
        if z_rot_n != so3_z_rotation(n, 1)? {
            return Err(Error::InvariantViolation(
                "pi(T_n) is not the z-axis rotation by 2 pi / n".into(),
            ));
        }
        let z4 = z_rot_n.pow(n / 4);
        let y2 = y_rot4.pow(2);
        let s4 = closure(n, &[y_rot4.clone(), z4.clone()]);
        let dn = closure(n, &[z_rot_n.clone(), y2.clone()]);
        let d4 = closure(n, &[z4, y2]);
        if s4.len() != 24 || dn.len() != 2 * n as usize || d4.len() != 8 {
            return Err(Error::InvariantViolation(format!(
                "factor orders off: |S4| = {}, |Dn| = {}, |D4| = {}",
                s4.len(),
                dn.len(),
                d4.len()
            )));
        }
        let s4_index = index_map(&s4);
        let dn_index = index_map(&dn);
        let d4_index = index_map(&d4);
        // the amalgamated subgroup is exactly the intersection
        let inter: Vec<&OMat> = s4.iter().filter(|m| dn_index.contains_key(*m)).collect();
        if inter.len() != 8 || !inter.iter().all(|m| d4_index.contains_key(*m)) {
            return Err(Error::InvariantViolation(
                "S4 and Dn do not intersect in D4".into(),
            ));
        }
        let (s4_transversal, s4_decomp) = coset_tables(&s4, &d4_index)?;
        let (dn_transversal, dn_decomp) = coset_tables(&dn, &d4_index)?;
        // nontrivial cosets only: [S4 : D4] - 1 and [Dn : D4] - 1
        if s4_transversal.len() != 2 || dn_transversal.len() != (n as usize / 4) - 1 {
            return Err(Error::InvariantViolation("coset counts off".into()));
        }
        Ok(AmalgamContext {
            n,
            y_rot4,
            z_rot_n,
            s4,
            dn,
            d4,
            s4_index,
            dn_index,
            d4_index,
            s4_transversal,
            dn_transversal,
            s4_decomp,
            dn_decomp,
        })
    }

    pub fn s4_elements(&self) -> &[OMat] {
        &self.s4
    }

    pub fn dn_elements(&self) -> &[OMat] {
        &self.dn
    }

    pub fn d4_elements(&self) -> &[OMat] {
        &self.d4
    }

    pub fn s4_transversal(&self) -> &[OMat] {
        &self.s4_transversal
    }

    pub fn dn_transversal(&self) -> &[OMat] {
        &self.dn_transversal
    }

    pub fn letter_y(&self, k: i64) -> OMat {
        self.y_rot4.pow(k.rem_euclid(4) as u64)
    }

    pub fn letter_z(&self, k: i64) -> OMat {
        self.z_rot_n.pow(k.rem_euclid(self.n as i64) as u64)
    }

    fn side_of(&self, g: &OMat) -> Option<Side> {
        if self.d4_index.contains_key(g) {
            None // lies in the amalgamated subgroup, no unique side
        } else if self.s4_index.contains_key(g) {
            Some(Side::S4)
        } else if self.dn_index.contains_key(g) {
            Some(Side::Dn)
        } else {
            Some(Side::S4) // unreachable marker; caller validates first
        }
    }

    fn is_letter(&self, g: &OMat) -> bool {
        self.s4_index.contains_key(g) || self.dn_index.contains_key(g)
    }

    fn decompose(&self, g: &OMat, side: Side) -> (OMat, OMat) {
        let table = match side {
            Side::S4 => &self.s4_decomp,
            Side::Dn => &self.dn_decomp,
        };
        table
            .get(g)
            .cloned()
            .expect("element outside D4 appears in its factor's coset table")
    }
}

/// Alternating normal form: a leading D4 element followed by syllables
/// drawn from the fixed transversals, strictly alternating sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamWord {
    n: u64,
    core: OMat,
    syllables: VecDeque<(Side, OMat)>,
}

impl AmalgamWord {
    pub fn identity(n: u64) -> Self {
        AmalgamWord {
            n,
            core: OMat::identity(n),
            syllables: VecDeque::new(),
        }
    }

    pub fn core(&self) -> &OMat {
        &self.core
    }

    pub fn syllables(&self) -> impl Iterator<Item = &(Side, OMat)> {
        self.syllables.iter()
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty() && self.core == OMat::identity(self.n)
    }

    /// The group element the form denotes.
    pub fn element(&self) -> OMat {
        let mut acc = self.core.clone();
        for (_, rep) in &self.syllables {
            acc = acc.mul(rep);
        }
        acc
    }

    fn prepend(&mut self, ctx: &AmalgamContext, x: &OMat) -> Result<()> {
        if !ctx.is_letter(x) {
            return Err(Error::NotAGenerator);
        }
        let y = x.mul(&self.core);
        if ctx.d4_index.contains_key(&y) {
            self.core = y;
            return Ok(());
        }
        let side = ctx
            .side_of(&y)
            .expect("product outside D4 has a unique side");
        if let Some((s1, _)) = self.syllables.front() {
            if *s1 == side {
                let (_, r1) = self.syllables.pop_front().unwrap();
                let w = y.mul(&r1);
                if ctx.d4_index.contains_key(&w) {
                    self.core = w;
                    return Ok(());
                }
                let (core, rep) = ctx.decompose(&w, side);
                self.core = core;
                self.syllables.push_front((side, rep));
                return Ok(());
            }
        }
        let (core, rep) = ctx.decompose(&y, side);
        self.core = core;
        self.syllables.push_front((side, rep));
        Ok(())
    }
}

/// Normal form of a word given as a sequence of letters, each an exact
/// matrix lying in S4 or D_n.
pub fn normal_form(ctx: &AmalgamContext, letters: &[OMat]) -> Result<AmalgamWord> {
    let mut nf = AmalgamWord::identity(ctx.n);
    for letter in letters.iter().rev() {
        nf.prepend(ctx, letter)?;
    }
    Ok(nf)
}

/// Equality through the normal form, cross-checked against exact matrix
/// equality; disagreement would falsify the amalgam structure.
pub fn amalgam_equal(ctx: &AmalgamContext, w1: &[OMat], w2: &[OMat]) -> Result<bool> {
    let nf1 = normal_form(ctx, w1)?;
    let nf2 = normal_form(ctx, w2)?;
    let nf_equal = nf1 == nf2;
    let mat_equal = product(ctx.n, w1) == product(ctx.n, w2);
    if nf_equal != mat_equal {
        return Err(Error::InvariantViolation(
            "normal-form equality disagrees with matrix equality".into(),
        ));
    }
    Ok(nf_equal)
}

fn product(n: u64, letters: &[OMat]) -> OMat {
    letters
        .iter()
        .fold(OMat::identity(n), |acc, l| acc.mul(l))
}

/// Letters written as y^k (the order-4 generator) and z^k (the order-n
/// generator), whitespace separated: "y^1 z^5 y^2".
pub fn parse_letters(ctx: &AmalgamContext, text: &str) -> Result<Vec<OMat>> {
    let mut out = Vec::new();
    for tok in text.split_whitespace() {
        let (gen, exp) = if let Some(e) = tok.strip_prefix("y^") {
            ('y', e)
        } else if let Some(e) = tok.strip_prefix("z^") {
            ('z', e)
        } else if tok == "y" {
            ('y', "1")
        } else if tok == "z" {
            ('z', "1")
        } else {
            return Err(Error::Parse(format!("unknown letter {:?}", tok)));
        };
        let k: i64 = exp
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent {:?}", exp)))?;
        out.push(match gen {
            'y' => ctx.letter_y(k),
            _ => ctx.letter_z(k),
        });
    }
    Ok(out)
}

/// The image of a gate word under pi, expressed in amalgam letters:
/// pi(H) = y z^(-n/2) and pi(T^k) = z^k.
pub fn gate_word_to_letters(ctx: &AmalgamContext, w: &GateWord) -> Vec<OMat> {
    let mut out = Vec::new();
    for tok in w.tokens() {
        match tok {
            GateToken::H => {
                out.push(ctx.letter_y(1));
                out.push(ctx.letter_z(-(ctx.n as i64) / 2));
            }
            GateToken::T(k) => out.push(ctx.letter_z(*k as i64)),
        }
    }
    out
}

/// chi of the projective gate group computed two ways: through
/// S4 *_{D4} D_n directly and through the binary cover E48 *_{Q16} Q_{4n}
/// (an index-2 correction); both must give -1/12 + 1/(2n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChiGroupReport {
    pub n: u64,
    pub via_rotation_amalgam: Rat,
    pub via_binary_cover: Rat,
    pub expected: Rat,
    pub ok: bool,
}

pub fn chi_group_identities(n: u64) -> Result<ChiGroupReport> {
    if n % 4 != 0 {
        return Err(Error::unsupported(n, "chi identities need 4 | n"));
    }
    let via_rotation_amalgam = chi_amalgam(24, 2 * n, 8);
    let via_binary_cover = chi_amalgam(48, 4 * n, 16) * crate::cyclotomic::rat(2);
    let expected = rat_frac(-1, 12) + Rat::new(1.into(), (2 * n).into());
    let ok = via_rotation_amalgam == expected && via_binary_cover == expected;
    Ok(ChiGroupReport {
        n,
        via_rotation_amalgam,
        via_binary_cover,
        expected,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn context_orders_at_8_and_12() {
        for n in [8u64, 12] {
            let ctx = AmalgamContext::new(n).unwrap();
            assert_eq!(ctx.s4_elements().len(), 24);
            assert_eq!(ctx.dn_elements().len(), 2 * n as usize);
            assert_eq!(ctx.d4_elements().len(), 8);
            assert_eq!(ctx.s4_transversal().len(), 2); // 3 cosets, 2 nontrivial
            assert_eq!(ctx.dn_transversal().len(), (n as usize) / 4 - 1);
            // generator orders
            assert_eq!(ctx.y_rot4.pow(4), OMat::identity(n));
            assert_ne!(ctx.y_rot4.pow(2), OMat::identity(n));
            assert_eq!(ctx.z_rot_n.pow(n), OMat::identity(n));
            for k in 1..n {
                assert_ne!(ctx.z_rot_n.pow(k), OMat::identity(n), "order drop at {}", k);
            }
        }
    }

    #[test]
    fn y_rotation_matches_paper_matrix() {
        let ctx = AmalgamContext::new(8).unwrap();
        assert_eq!(ctx.y_rot4, so3_y_quarter(8));
    }

    #[test]
    fn trivial_cancellations() {
        let ctx = AmalgamContext::new(12).unwrap();
        let w = vec![ctx.letter_y(1), ctx.letter_y(-1)];
        let nf = normal_form(&ctx, &w).unwrap();
        assert!(nf.is_empty());
        assert_eq!(nf.element(), OMat::identity(12));

        let single = vec![ctx.letter_z(1)];
        let nf = normal_form(&ctx, &single).unwrap();
        assert_eq!(nf.element(), ctx.z_rot_n);
        assert_eq!(nf.len(), 1);
    }

    #[test]
    fn normal_form_is_constant_on_rewrites() {
        let ctx = AmalgamContext::new(12).unwrap();
        let w1 = vec![ctx.letter_y(1), ctx.letter_z(5), ctx.letter_y(2)];
        // insert a trivial relator and split a letter
        let w2 = vec![
            ctx.letter_y(1),
            ctx.letter_z(2),
            ctx.letter_z(3),
            ctx.letter_y(2),
            ctx.letter_y(2),
            ctx.letter_y(2),
        ];
        assert!(amalgam_equal(&ctx, &w1, &w2).unwrap());
        let nf1 = normal_form(&ctx, &w1).unwrap();
        let nf2 = normal_form(&ctx, &w2).unwrap();
        assert_eq!(nf1, nf2);
        assert_eq!(nf1.element(), product(12, &w1));
    }

    #[test]
    fn random_words_nf_matches_matrix_equality() {
        let ctx = AmalgamContext::new(12).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut random_word = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<OMat> {
            let len = rng.gen_range(0..10);
            (0..len)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        ctx.letter_y(rng.gen_range(1..4))
                    } else {
                        ctx.letter_z(rng.gen_range(1..12))
                    }
                })
                .collect()
        };
        for _ in 0..60 {
            let w1 = random_word(&mut rng);
            let w2 = random_word(&mut rng);
            // amalgam_equal internally cross-checks NF against matrices
            let _ = amalgam_equal(&ctx, &w1, &w2).unwrap();
            let nf = normal_form(&ctx, &w1).unwrap();
            assert_eq!(nf.element(), product(12, &w1), "NF reconstructs");
        }
    }

    #[test]
    fn conjugated_d4_rewrites_agree() {
        // replace a letter x by x h and the next by h^-1 x', h in D4
        let ctx = AmalgamContext::new(12).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let x = ctx.letter_y(rng.gen_range(1..4));
            let z = ctx.letter_z(rng.gen_range(1..12));
            let h = ctx.d4_elements()[rng.gen_range(0..8)].clone();
            let w1 = vec![x.clone(), z.clone()];
            let w2 = vec![x.mul(&h), h.transpose().mul(&z)];
            assert!(amalgam_equal(&ctx, &w1, &w2).unwrap());
        }
    }

    #[test]
    fn rejects_foreign_letters() {
        let ctx = AmalgamContext::new(8).unwrap();
        let not_in_factors = so3_z_rotation(8, 1).unwrap().mul(&so3_y_quarter(8));
        assert_eq!(
            normal_form(&ctx, &[not_in_factors]).unwrap_err(),
            Error::NotAGenerator
        );
    }

    #[test]
    fn gate_words_project_into_the_amalgam() {
        let ctx = AmalgamContext::new(12).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let w = crate::words::random_gate_word(12, 8, &mut rng);
            let letters = gate_word_to_letters(&ctx, &w);
            let nf = normal_form(&ctx, &letters).unwrap();
            let expected = pi_map(&w.eval().unwrap()).unwrap();
            assert_eq!(nf.element(), expected);
        }
    }

    #[test]
    fn parse_letter_strings() {
        let ctx = AmalgamContext::new(8).unwrap();
        let letters = parse_letters(&ctx, "y^1 z^5 y^-1 z").unwrap();
        assert_eq!(letters.len(), 4);
        assert_eq!(letters[0], ctx.letter_y(1));
        assert_eq!(letters[2], ctx.letter_y(3));
        assert!(parse_letters(&ctx, "w^2").is_err());
    }

    #[test]
    fn chi_identities() {
        for (n, expect) in [(8i64, (-1, 48)), (12, (-1, 24)), (24, (-1, 16))] {
            let rep = chi_group_identities(n as u64).unwrap();
            assert!(rep.ok);
            assert_eq!(rep.expected, rat_frac(expect.0, expect.1));
            assert_eq!(rep.via_rotation_amalgam, rep.via_binary_cover);
        }
    }
}
