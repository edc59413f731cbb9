use trace_kit::arith::{divisors, factor, gcd};
use trace_kit::cyclo::CycloNum;
use trace_kit::dirichlet::{enumerate_characters, DirichletChar};
use trace_kit::local_counts::*;
use trace_kit::matrix_forms::{matrices_in_box, IntMat2, S_MAT};
use trace_kit::p1::CosetTable;

#[test]
fn spot_values() {
    assert_eq!(count_s_plain(4, 2, 1), 2);
    assert_eq!(count_s(4, 2, 2, 1), 1);
    assert_eq!(count_s(1, 1, 5, 3), 1);
    let triv1 = DirichletChar::trivial(1);
    assert_eq!(b_coeff(&triv1, 1, 7, 3), CycloNum::one());
    let eps4 = enumerate_characters(4).pop().unwrap();
    assert!(b_coeff(&eps4, 1, 2, 1).is_zero());
    for n in [2u64, 5, 6, 12] {
        for chi in enumerate_characters(n) {
            assert_eq!(
                b_coeff(&chi, n, 2, 1),
                CycloNum::from_int(trace_kit::arith::index_phi1(n) as i64)
            );
        }
    }
}

#[test]
fn multiplicative_count_matches_direct() {
    for level in 1..=36u64 {
        for u in divisors(level) {
            for t in -8..=8 {
                for n in 1..=12 {
                    assert_eq!(
                        count_s(level, u, t, n),
                        count_s_direct(level, u, t, n),
                        "N={level} u={u} t={t} n={n}"
                    );
                }
            }
        }
    }
}

#[test]
fn c_inverts_b() {
    for level in [1u64, 4, 6, 8, 9, 12] {
        for chi in enumerate_characters(level) {
            for u in divisors(level) {
                for (t, n) in [(0, 1), (2, 1), (1, 3), (4, 4), (3, 5), (6, 9)] {
                    let sum: CycloNum = divisors(u)
                        .into_iter()
                        .map(|d| c_coeff(&chi, d, t, n))
                        .sum();
                    assert_eq!(sum, b_coeff(&chi, u, t, n));
                    if u == 1 {
                        assert_eq!(c_coeff(&chi, 1, t, n), b_coeff(&chi, 1, t, n));
                    }
                }
            }
        }
    }
}

/// Keys whose reduced discriminant is not ≡ 0, 1 (mod 4) carry no matrices and
/// always meet H(D/u²) = 0 in the trace formulas.
fn is_discriminant(d: i64) -> bool {
    matches!(d.rem_euclid(4), 0 | 1)
}

/// |S_{p^a}(p^i, t, n)|-based value of C_{p^a}(p^i, D), straight from the
/// definition C = Σ_{d|u} B(u/d) μ(d) divided by |S_{p^a}(t, n)|.
fn c_local_bruteforce(p: u64, a: u32, i: u32, t: i64, n: i64) -> Option<i64> {
    let s = count_s_direct(p.pow(a), 1, t, n) as i64;
    if s == 0 {
        return None;
    }
    let c = c_trivial(p.pow(a), p.pow(i), t, n);
    assert_eq!(c % s, 0);
    Some(c / s)
}

#[test]
fn local_tables_match_bruteforce() {
    for p in [2u64, 3, 5] {
        for a in 1..=4u32 {
            for i in 0..=a {
                for t in -10..=10i64 {
                    for n in 1..=25i64 {
                        let disc = t * t - 4 * n;
                        let u = p.pow(i) as i64;
                        if disc % (u * u) != 0 || !is_discriminant(disc / (u * u)) {
                            continue;
                        }
                        if let Some(c) = c_local_bruteforce(p, a, i, t, n) {
                            assert_eq!(
                                c_fast(p.pow(a), p.pow(i), disc),
                                c,
                                "p={p} a={a} i={i} t={t} n={n}"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn squarefree_law() {
    for level in [6u64, 10, 15, 30] {
        for u in divisors(level) {
            for d in [-80i64, -36, -15, 0, 9, 900] {
                if d % (u * u) as i64 == 0 {
                    assert_eq!(c_fast(level, u, d), u as i64);
                }
            }
        }
    }
    // C_{6,1}(6, t, n) = |S_6(t, n)|·6 when 36 | t² − 4n.
    let triv = DirichletChar::trivial(6);
    for (t, n) in [(6, 9), (2, 1), (12, 36), (8, 7)] {
        if (t * t - 4 * n) % 36 == 0 {
            assert_eq!(
                c_coeff(&triv, 6, t, n),
                CycloNum::from_int(6 * count_s_plain(6, t, n) as i64)
            );
        }
    }
}

#[test]
fn c_trivial_factorizes_through_tables() {
    for level in 1..=30u64 {
        for u in divisors(level) {
            for t in -7..=7 {
                for n in 1..=10 {
                    if !key_is_valid(level, u, t, n)
                        || !is_discriminant((t * t - 4 * n) / (u * u) as i64)
                    {
                        continue;
                    }
                    let expect =
                        count_s_plain(level, t, n) as i64 * c_fast(level, u, t * t - 4 * n);
                    assert_eq!(
                        c_trivial(level, u, t, n),
                        expect,
                        "N={level} u={u} t={t} n={n}"
                    );
                }
            }
        }
    }
}

#[test]
fn class_weight_direct_matches_closed() {
    for level in 1..=12u64 {
        let table = CosetTable::new(level);
        let chars = enumerate_characters(level);
        for det in 1..=12 {
            for (k, m) in matrices_in_box(det, 8).into_iter().enumerate() {
                if k % 5 != 0 {
                    continue;
                }
                for chi in &chars {
                    assert_eq!(
                        c_class_direct(chi, &table, &m),
                        c_class(chi, &m),
                        "N={level} chi={chi} M={m}"
                    );
                    let neg = c_class(chi, &m.neg());
                    assert_eq!(
                        neg,
                        c_class(chi, &m)
                            .scale(&trace_kit::Rational::from_integer(chi.parity().into())),
                        "parity at {m}"
                    );
                }
            }
        }
    }
    // c(I) = φ₁(N), level one always 1, and the N = 2 witness at S.
    let t6 = CosetTable::new(6);
    assert_eq!(
        c_class_direct(&DirichletChar::trivial(6), &t6, &IntMat2::raw(1, 0, 0, 1)),
        CycloNum::from_int(12)
    );
    let t2 = CosetTable::new(2);
    assert_eq!(
        c_class_direct(&DirichletChar::trivial(2), &t2, &S_MAT),
        c_class(&DirichletChar::trivial(2), &S_MAT)
    );
}

#[test]
fn atkin_weight_direct_matches_closed() {
    for level in 1..=12u64 {
        let table = CosetTable::new(level);
        for ell in divisors(level) {
            if gcd(ell as i64, (level / ell) as i64) != 1 {
                assert!(c_atkin(level, ell, &IntMat2::raw(1, 0, 0, 1)).is_err());
                continue;
            }
            for n in 1..=12 / ell as i64 {
                for (k, m) in matrices_in_box(n * ell as i64, 8).into_iter().enumerate() {
                    if k % 3 != 0 {
                        continue;
                    }
                    let direct = c_atkin_direct(level, ell, &table, &m).unwrap();
                    let closed = c_atkin(level, ell, &m).unwrap();
                    assert_eq!(direct, closed, "N={level} ell={ell} M={m}");
                    if ell == 1 {
                        assert_eq!(
                            CycloNum::from_int(closed),
                            c_class(&DirichletChar::trivial(level), &m)
                        );
                    }
                    if m.trace() % ell as i64 != 0 || (ell > 1 && m.content() % ell as i64 == 0) {
                        assert_eq!(closed, 0);
                    }
                }
            }
        }
    }
    let _ = factor(1);
}

#[test]
fn class_weight_depends_only_on_invariants() {
    // Conjugate pairs share ((G, N), t, n), so their direct weights agree.
    for level in [4u64, 6, 9] {
        let table = CosetTable::new(level);
        for chi in enumerate_characters(level) {
            for m in matrices_in_box(5, 3) {
                let g = IntMat2::raw(2, 1, 1, 1);
                let x = g * m * g.adjugate();
                assert_eq!(
                    c_class_direct(&chi, &table, &m),
                    c_class_direct(&chi, &table, &x)
                );
            }
        }
    }
}
