//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with `cargo test --test acceptance -- --nocapture`). Every
//! comparison is exact rational equality; the only tolerances are the
//! stated wall-clock budgets.

use std::time::Instant;

use cyclogate_core::cyclotomic::{rat_frac, CycElem, Rat};
use cyclogate_core::embed::is_totally_positive;
use cyclogate_core::matrix::{adjoint, gate_t, pi_map, OMat};
use cyclogate_core::selmer::{
    example_dreary_witness, homomorphism_check, norm_even_valuation_check, phi_class,
    phi_profile, try_lift_to_su2, LiftOutcome,
};
use cyclogate_core::squares::{is_square_in_f, same_square_class};
use cyclogate_core::words::{random_gate_word, random_hz_word, synthesize_n8};
use cyclogate_core::zeta::{
    chi_table, m_value, scan, split_data, u2_equals_u2zeta, zeta_f_minus1,
};
use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn frac(n: i64, d: i64) -> Rat {
    rat_frac(n, d)
}

#[test]
fn criterion_01_euler_characteristic_equalities() {
    let start = Instant::now();
    let expected = [(8u64, frac(-1, 48)), (12, frac(-1, 24)), (16, frac(-5, 96)), (24, frac(-1, 16))];
    for (n, chi) in &expected {
        let table = chi_table(*n).unwrap();
        assert_eq!(&table.chi_su2, chi, "chi(SU2(R_{})) mismatch", n);
        let closed_form = frac(-1, 12) + Rat::new(BigInt::from(1), BigInt::from(2 * n));
        assert_eq!(table.chi_su2, closed_form, "n = {}", n);
        assert_eq!(table.chi_sgn, closed_form, "n = {}", n);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "criterion 1 overran: {:?}", elapsed);
    println!(
        "criterion 01 PASS: chi(SU2(R_n)) = -1/12 + 1/(2n) exactly for n in {{8,12,16,24}} ({:?})",
        elapsed
    );
}

#[test]
fn criterion_02_zeta_spot_values() {
    assert_eq!(zeta_f_minus1(8).unwrap(), frac(1, 12));
    assert_eq!(zeta_f_minus1(12).unwrap(), frac(1, 6));
    // cross-checks forced by criterion 1
    assert_eq!(zeta_f_minus1(16).unwrap(), frac(5, 6));
    assert_eq!(m_value(24).unwrap(), frac(1, 8));
    assert_eq!(zeta_f_minus1(24).unwrap(), Rat::from(BigInt::from(1)));
    println!("criterion 02 PASS: zeta_F(-1) spot values 1/12, 1/6, 5/6 and M_24 = 1/8");
}

#[test]
fn criterion_03_scan_to_132() {
    let start = Instant::now();
    let rows = scan(132).unwrap();
    assert_eq!(rows.len(), 32);
    let equal: Vec<u64> = rows.iter().filter(|r| r.relation == "=").map(|r| r.n).collect();
    let strict = rows.iter().filter(|r| r.relation == ">").count();
    assert_eq!(equal, vec![8, 12, 16, 24]);
    assert_eq!(strict, 28);
    for r in &rows {
        if r.relation == ">" {
            assert!(r.chi_su2.clone().abs() > r.bound, "n = {}", r.n);
        } else {
            assert_eq!(r.chi_su2.clone().abs(), r.bound, "n = {}", r.n);
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "criterion 3 overran: {:?}", elapsed);
    println!(
        "criterion 03 PASS: scan to 132 has exactly four equalities and 28 strict rows ({:?})",
        elapsed
    );
}

#[test]
fn criterion_04_serre_consistency() {
    for (n, s) in [(8u64, 3u32), (16, 4), (32, 5)] {
        let table = chi_table(n).unwrap();
        assert_eq!(table.c, Some(2));
        let serre = -(table.zeta_minus1.clone() / Rat::from(BigInt::from(1) << (1u64 << (s - 2))));
        assert_eq!(table.chi_so3, Some(serre), "n = {}", n);
    }
    println!("criterion 04 PASS: chi(SO3(R_n^+)) = -2^(-2^(s-2)) zeta_F(-1) for n = 8, 16, 32");
}

#[test]
fn criterion_05_selmer_exactness_suite() {
    let n = 8u64;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut failures = 0usize;
    for _ in 0..200 {
        let a = random_hz_word(n, rng.gen_range(1..10), &mut rng).eval().unwrap();
        let m = adjoint(&a).unwrap();
        // phi vanishes on the adjoint image
        if !phi_class(&m).unwrap().is_trivial().unwrap() {
            failures += 1;
            continue;
        }
        // and the constructive lift recovers the input up to sign
        match try_lift_to_su2(&m).unwrap() {
            LiftOutcome::Lifted(l) => {
                if !(l == a || l == a.neg()) {
                    failures += 1;
                }
            }
            LiftOutcome::Obstructed(_) => failures += 1,
        }
    }
    assert_eq!(failures, 0, "exactness suite had failures");

    // the obstruction witness at pi(T_8)
    let m = pi_map(&gate_t(8)).unwrap();
    let out = try_lift_to_su2(&m).unwrap();
    let class = out.obstruction().expect("pi(T_8) must be obstructed");
    let sqrt2 = CycElem::zeta(8) - CycElem::zeta_pow(8, 3);
    let expected = (CycElem::from_int(8, 2) + sqrt2).scale(&frac(1, 4));
    assert!(same_square_class(class.rep(), &expected).unwrap());
    assert!(!is_square_in_f(&expected).unwrap().is_square());
    println!("criterion 05 PASS: 200/200 SU2(R_8) words: phi(Ad A) trivial, lift = +-A; pi(T_8) obstructed by (2+sqrt2)/4");
}

fn so3_pair_corpus(n: u64, count: usize, seed: u64) -> Vec<(OMat, OMat)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut g = random_gate_word(n, rng.gen_range(0..6), &mut rng).eval().unwrap();
            let mut h = random_gate_word(n, rng.gen_range(0..6), &mut rng).eval().unwrap();
            // twist by powers of T so determinants roam over the phases
            g = g.mul(&gate_t(n).pow(rng.gen_range(0..n as i64)).unwrap());
            h = h.mul(&gate_t(n).pow(rng.gen_range(0..n as i64)).unwrap());
            (pi_map(&g).unwrap(), pi_map(&h).unwrap())
        })
        .collect()
}

#[test]
fn criterion_06_homomorphism_and_square_identity() {
    for n in [8u64, 12] {
        let pairs = so3_pair_corpus(n, 200, 600 + n);
        let mut failures = 0usize;
        for (m, other) in &pairs {
            if !homomorphism_check(m, other).unwrap() {
                failures += 1;
            }
        }
        assert_eq!(failures, 0, "homomorphism failures at n = {}", n);
    }
    println!("criterion 06 PASS: phi(MN) = phi(M) phi(N) and the square identity on 200 pairs at n = 8 and n = 12");
}

#[test]
fn criterion_07_phi_theta_lemma_suite() {
    for n in [8u64, 12] {
        let pairs = so3_pair_corpus(n, 200, 700 + n);
        let one = CycElem::one(n);
        for (m, other) in &pairs {
            for mat in [m, other] {
                let p = phi_profile(mat).unwrap();
                // (c): the phi_i sum to 1
                let sum = p.phi.iter().fold(CycElem::zero(n), |acc, x| acc + x.clone());
                assert_eq!(sum, one);
                // (d): phi_i phi_j = theta_ij^2 and the pairing products
                // do not depend on the permutation
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        assert_eq!(&p.phi[i] * &p.phi[j], &p.theta[i][j] * &p.theta[i][j]);
                    }
                }
                let prods = [
                    &p.theta[0][1] * &p.theta[2][3],
                    &p.theta[0][2] * &p.theta[1][3],
                    &p.theta[0][3] * &p.theta[1][2],
                ];
                assert_eq!(prods[0], prods[1]);
                assert_eq!(prods[0], prods[2]);
            }
            // (f): the class representative is a totally positive element
            // with even valuations (norm parity evidence)
            let class = phi_class(m).unwrap();
            assert!(is_totally_positive(class.rep()).unwrap());
            assert!(norm_even_valuation_check(class.rep()).unwrap().ok);
        }
        // (g): phi is unchanged by the axis flips, sampled over the corpus
        let flips = [
            cyclogate_core::matrix::m_x(n),
            cyclogate_core::matrix::m_y(n),
            cyclogate_core::matrix::m_z(n),
        ];
        for (m, _) in pairs.iter().take(25) {
            let class = phi_class(m).unwrap();
            for flip in &flips {
                assert!(class.same(&phi_class(&m.mul(flip)).unwrap()).unwrap());
                assert!(class.same(&phi_class(&flip.mul(m)).unwrap()).unwrap());
            }
        }
    }
    println!("criterion 07 PASS: phi/theta lemma parts (c), (d), (f), (g) hold exactly on both corpora");
}

#[test]
fn criterion_08_obstruction_witness_over_sqrt21() {
    let report = example_dreary_witness().unwrap();
    assert!(report.t_q_in_so3, "T_q lies in SO3");
    assert!(report.entries_in_z_sqrt21_half, "entries lie in Z[sqrt21, 1/2]");
    assert!(report.mq_norm_u, "M_q M_q^dagger = u I");
    assert!(report.class_is_u && report.u_nontrivial, "phi(T_q) is the nontrivial class of u");
    println!("criterion 08 PASS: all four verdicts of the sqrt21 witness hold exactly");
}

#[test]
fn criterion_09_synthesis_round_trip() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    for trial in 0..100 {
        let len = rng.gen_range(0..=60);
        let w = random_gate_word(8, len, &mut rng);
        let m = w.eval().unwrap();
        // synthesize_n8 errors rather than stalling; any error fails here
        let back = synthesize_n8(&m).unwrap_or_else(|e| panic!("trial {}: {}", trial, e));
        assert_eq!(back.eval().unwrap(), m, "trial {}", trial);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "criterion 9 overran: {:?}", elapsed);
    println!(
        "criterion 09 PASS: 100/100 length-<=60 words re-synthesized exactly, descent never stalled ({:?})",
        elapsed
    );
}

#[test]
fn criterion_10_amalgam_normal_form() {
    use cyclogate_core::amalgam::{amalgam_equal, chi_group_identities, AmalgamContext};
    let n = 12u64;
    let ctx = AmalgamContext::new(n).unwrap();
    assert_eq!(ctx.s4_elements().len(), 24);
    assert_eq!(ctx.dn_elements().len(), 2 * n as usize);
    assert_eq!(ctx.d4_elements().len(), 8);

    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let random_word = |rng: &mut ChaCha8Rng| -> Vec<OMat> {
        let len = rng.gen_range(0..=20);
        (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    ctx.letter_y(rng.gen_range(1..4))
                } else {
                    ctx.letter_z(rng.gen_range(1..n as i64))
                }
            })
            .collect()
    };
    // 250 independent pairs plus 250 rewrite pairs; amalgam_equal errors
    // out if normal-form equality ever disagrees with matrix equality
    for _ in 0..250 {
        let w1 = random_word(&mut rng);
        let w2 = random_word(&mut rng);
        let _ = amalgam_equal(&ctx, &w1, &w2).unwrap();
    }
    for _ in 0..250 {
        let w1 = random_word(&mut rng);
        let mut w2 = Vec::new();
        for letter in &w1 {
            // split each letter through a random element of the
            // amalgamated subgroup: x = (x h) (h^-1)
            let h = ctx.d4_elements()[rng.gen_range(0..8)].clone();
            w2.push(letter.mul(&h));
            w2.push(h.transpose());
        }
        assert!(amalgam_equal(&ctx, &w1, &w2).unwrap());
    }

    let rep = chi_group_identities(n).unwrap();
    assert!(rep.ok);
    assert_eq!(rep.expected, frac(-1, 12) + frac(1, 24));
    println!("criterion 10 PASS: 500 words at n = 12: normal form = matrix equality; orders (24, 2n, 8); chi identities agree");
}

/// Independent oracle: walk the cyclic subgroup generated by 2 mod d and
/// look for -1 along the way.
fn minus_one_in_two_subgroup_oracle(n: u64) -> bool {
    let d = n >> n.trailing_zeros();
    if d == 1 {
        return true;
    }
    let mut x = 1u64;
    loop {
        x = (x * 2) % d;
        if x == d - 1 {
            return true;
        }
        if x == 1 {
            return false;
        }
    }
}

#[test]
fn criterion_11_u2_equals_u2zeta_criterion() {
    let mut n = 8u64;
    while n <= 100 {
        let fast = u2_equals_u2zeta(n).unwrap();
        let direct = minus_one_in_two_subgroup_oracle(n);
        assert_eq!(fast, direct, "n = {}", n);
        n += 4;
    }
    assert!(u2_equals_u2zeta(20).unwrap());
    assert!(!u2_equals_u2zeta(28).unwrap());
    println!("criterion 11 PASS: determinant-group criterion matches the direct subgroup computation for 4 | n <= 100");
}

#[test]
fn criterion_12_splitting_data() {
    let mut n = 8u64;
    while n <= 200 {
        let sd = split_data(n).unwrap();
        let phi = cyclogate_core::euler_phi(n);
        assert_eq!(sd.e * sd.f * sd.r, phi, "n = {}", n);
        assert_eq!(sd.e_plus * sd.f_plus * sd.r_plus, phi / 2, "n = {}", n);
        let s = n.trailing_zeros();
        let d = n >> s;
        if d == 1 || d == 3 {
            assert_eq!((sd.r, sd.r_plus), (1, 1), "Thm-ex family n = {}", n);
        }
        n += 4;
    }
    println!("criterion 12 PASS: e f r = phi(n), e+ f+ r+ = phi(n)/2 for 4 | n <= 200; r = r+ = 1 on the supported families");
}
