use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use trace_kit::arith::{gegenbauer, index_phi1, sigma1_level};
use trace_kit::cusp_terms::{cusp_reps, eisenstein_trace, eisenstein_trace_ell};
use trace_kit::dirichlet::enumerate_characters;
use trace_kit::hecke_operator::{build_tn_infty, mutated_tn};
use trace_kit::local_counts::{c_atkin, c_class, Sigma};
use trace_kit::matrix_forms::{matrices_in_box, IntMat2, IDENTITY, S_MAT, T_MAT, U_MAT};
use trace_kit::p1::CosetTable;
use trace_kit::period_oracle::*;
use trace_kit::trace_formulas::{
    cohen_gamma04, trace_atkin_lehner_full, trace_hecke_full, TraceQuery,
};
use trace_kit::{CycloNum, DirichletChar, Rational, TraceError};

fn int(x: i64) -> CycloNum {
    CycloNum::from_int(x)
}

fn hecke(n: u64) -> Sigma {
    Sigma::Hecke { n }
}

fn parity_weight(chi: &DirichletChar, k: u32) -> bool {
    chi.parity() == if k % 2 == 0 { 1 } else { -1 }
}

fn module(chi: &DirichletChar, w: u32) -> PeriodModule<CycloNum> {
    PeriodModule::new(chi, w)
}

#[test]
fn coset_table_sizes() {
    assert_eq!(CosetTable::new(1).len(), 1);
    assert_eq!(CosetTable::new(4).len(), 6);
    assert_eq!(CosetTable::new(6).len(), 12);
    for n in 1..=30u64 {
        assert_eq!(CosetTable::new(n).len() as u64, index_phi1(n));
    }
}

#[test]
fn level_one_weight_twelve() {
    let oracle = PeriodOracle::new(&DirichletChar::trivial(1), 12).unwrap();
    assert_eq!(oracle.dim_v(), 11);
    assert_eq!(oracle.dim_w(), 3);
    assert_eq!(oracle.dim_d(), 1);
    assert_eq!(oracle.trace_on_w(hecke(1)).unwrap(), int(3));
    assert_eq!(oracle.trace_on_w(hecke(2)).unwrap(), int(2001));
    assert_eq!(oracle.trace_coboundary(hecke(2)).unwrap(), int(2049));
}

#[test]
fn weight_two_level_one_has_no_periods() {
    let oracle = PeriodOracle::new(&DirichletChar::trivial(1), 2).unwrap();
    assert_eq!(oracle.dim_v(), 1);
    assert_eq!(oracle.dim_w(), 0);
    assert!(oracle.is_degenerate());
}

#[test]
fn generator_relations() {
    for level in 1..=8u64 {
        for chi in enumerate_characters(level) {
            for w in 0..=4u32 {
                let m = module(&chi, w);
                let id = ExactMatrix::identity(m.dim());
                let s = m.act_gamma(&S_MAT).unwrap();
                let u = m.act_gamma(&U_MAT).unwrap();
                assert_eq!(s.pow(2), id, "N={level} {} w={w}", chi.label());
                assert_eq!(u.pow(3), id, "N={level} {} w={w}", chi.label());
                if w == 0 && chi.is_trivial() {
                    let t = m.act_gamma(&T_MAT).unwrap();
                    assert_eq!(t.pow(level as u32), id);
                    // A permutation matrix: one 1 in each row.
                    for i in 0..m.dim() {
                        let ones = (0..m.dim()).filter(|&j| !t.get(i, j).is_zero()).count();
                        assert_eq!(ones, 1);
                    }
                }
            }
        }
    }
}

#[test]
fn slash_is_a_right_action() {
    let chi = enumerate_characters(5)
        .into_iter()
        .find(|c| c.order() == 4)
        .unwrap();
    let m = module(&chi, 3);
    let g = IntMat2::raw(2, 1, 5, 3);
    let h = IntMat2::raw(1, -2, 3, -5);
    let lhs = m.act_gamma(&(g * h)).unwrap();
    let rhs = m.act_gamma(&h).unwrap().mul(&m.act_gamma(&g).unwrap());
    assert_eq!(lhs, rhs);
    assert!(m.act_gamma(&IntMat2::raw(2, 0, 0, 1)).is_err());
}

#[test]
fn trace_identity_for_hecke_cosets() {
    for level in 1..=8u64 {
        let table = CosetTable::new(level);
        for chi in enumerate_characters(level) {
            for w in [0u32, 1, 2, 5, 8] {
                let m = module(&chi, w);
                if m.dim() == 0 {
                    continue;
                }
                for n in 1..=6i64 {
                    for x in matrices_in_box(n, 3) {
                        let a = m.act_sigma(hecke(n as u64), &x).unwrap();
                        let expected = c_class(&chi, &x)
                            * CycloNum::from_bigint(gegenbauer(w, x.trace(), x.det()));
                        assert_eq!(a.trace(), expected, "N={level} w={w} M={x}");
                    }
                }
                assert_eq!(table.len(), m.table().len());
            }
        }
    }
}

#[test]
fn trace_identity_for_atkin_lehner_cosets() {
    for (level, ell) in [(2u64, 2u64), (3, 3), (6, 2), (6, 3), (6, 6), (10, 5)] {
        let m = module(&DirichletChar::trivial(level), 2);
        for n in 1..=3u64 {
            for x in matrices_in_box((n * ell) as i64, 4) {
                let a = m.act_sigma(Sigma::AtkinLehner { n, ell }, &x).unwrap();
                let expected = c_atkin(level, ell, &x).unwrap() * gegenbauer(2, x.trace(), x.det());
                assert_eq!(
                    a.trace(),
                    CycloNum::from_bigint(expected),
                    "N={level} ℓ={ell} M={x}"
                );
            }
        }
    }
}

#[test]
fn unreachable_matrices_act_by_zero() {
    // 2·(Γ₁ element) never has an a-entry prime to 2.
    let m = module(&DirichletChar::trivial(2), 4);
    let x = IntMat2::raw(2, 0, 0, 2);
    assert!(m.act_sigma(hecke(4), &x).unwrap().is_zero());
    let x = IntMat2::raw(2, 2, 4, 6);
    assert!(m.act_sigma(hecke(4), &x).unwrap().is_zero());
}

#[test]
fn level_one_sigma_action_is_the_slash() {
    let m = module(&DirichletChar::trivial(1), 6);
    for x in matrices_in_box(6, 4) {
        assert_eq!(m.act_sigma(hecke(6), &x).unwrap(), m.slash_matrix(&x));
    }
}

#[test]
fn sigma_action_is_compatible_with_gamma() {
    let cases = [(7u64, 2u32), (9, 3), (12, 0)];
    let gs = [S_MAT, U_MAT, T_MAT, IntMat2::raw(3, 2, 7, 5)];
    for (level, w) in cases {
        for chi in enumerate_characters(level) {
            let m = module(&chi, w);
            if m.dim() == 0 {
                continue;
            }
            for x in matrices_in_box(3, 2) {
                let ax = m.act_sigma(hecke(3), &x).unwrap();
                for g in gs {
                    let ag = m.act_gamma(&g).unwrap();
                    assert_eq!(m.act_sigma(hecke(3), &(g * x)).unwrap(), ax.mul(&ag));
                    assert_eq!(m.act_sigma(hecke(3), &(x * g)).unwrap(), ag.mul(&ax));
                }
            }
        }
    }
}

#[test]
fn kernel_sum_fills_the_module() {
    for level in 1..=9u64 {
        for chi in enumerate_characters(level) {
            for k in 2..=6u32 {
                let oracle = PeriodOracle::new(&chi, k).unwrap();
                if oracle.dim_v() == 0 {
                    continue;
                }
                let (ks, ku) = oracle.kernel_dims().unwrap();
                let codim = usize::from(oracle.is_degenerate());
                assert_eq!(ks + ku - oracle.dim_w(), oracle.dim_v() - codim);
            }
        }
    }
}

#[test]
fn coboundary_dimension_counts_admissible_cusps() {
    for level in 1..=12u64 {
        for chi in enumerate_characters(level) {
            for k in 2..=5u32 {
                if !parity_weight(&chi, k) {
                    continue;
                }
                let oracle = PeriodOracle::new(&chi, k).unwrap();
                let admissible = cusp_reps(&chi).iter().filter(|c| c.admissible).count();
                assert_eq!(
                    oracle.dim_d(),
                    admissible,
                    "N={level} {} k={k}",
                    chi.label()
                );
            }
        }
    }
}

#[test]
fn oracle_matches_full_trace() {
    for level in 1..=6u64 {
        for chi in enumerate_characters(level) {
            for k in 2..=6u32 {
                let oracle = PeriodOracle::new(&chi, k).unwrap();
                for n in 1..=5u64 {
                    let expected = trace_hecke_full(&TraceQuery::new(chi.clone(), k, n)).unwrap();
                    assert_eq!(
                        oracle.trace_on_w(hecke(n)).unwrap(),
                        expected,
                        "N={level} {} k={k} n={n}",
                        chi.label()
                    );
                }
            }
        }
    }
}

#[test]
fn oracle_matches_gamma0_four_formula() {
    let oracle = PeriodOracle::new(&DirichletChar::trivial(4), 2).unwrap();
    for n in (1..=9u64).step_by(2) {
        let cusp = cohen_gamma04(2, n).unwrap();
        assert!(cusp.is_zero());
        // With no cusp forms only the Eisenstein part remains.
        let eis = eisenstein_trace(&DirichletChar::trivial(4), 2, n);
        assert_eq!(oracle.trace_on_w(hecke(n)).unwrap(), eis, "n={n}");
    }
}

#[test]
fn oracle_matches_atkin_lehner_trace() {
    for (level, ell) in [(2u64, 2u64), (6, 2), (6, 3), (6, 6)] {
        for k in [2u32, 4] {
            let oracle = PeriodOracle::new(&DirichletChar::trivial(level), k).unwrap();
            for n in 1..=3u64 {
                let sigma = Sigma::AtkinLehner { n, ell };
                let full = trace_atkin_lehner_full(level, ell, k, n).unwrap();
                assert_eq!(
                    oracle.trace_on_w(sigma).unwrap(),
                    CycloNum::from_rational(full)
                );
                let eis = eisenstein_trace_ell(level, ell, k, n).unwrap();
                assert_eq!(
                    oracle.trace_coboundary(sigma).unwrap(),
                    CycloNum::from_rational(eis)
                );
            }
        }
    }
}

#[test]
fn coboundary_matches_eisenstein_trace() {
    for level in 1..=8u64 {
        for chi in enumerate_characters(level) {
            for k in 2..=10u32 {
                if !parity_weight(&chi, k) {
                    continue;
                }
                let oracle = PeriodOracle::new(&chi, k).unwrap();
                for n in 1..=8u64 {
                    assert_eq!(
                        oracle.trace_coboundary(hecke(n)).unwrap(),
                        eisenstein_trace(&chi, k, n),
                        "N={level} {} k={k} n={n}",
                        chi.label()
                    );
                }
            }
        }
    }
}

#[test]
fn period_and_full_module_traces_differ_only_in_weight_two() {
    for level in 1..=8u64 {
        for chi in enumerate_characters(level) {
            for k in 2..=4u32 {
                let oracle = PeriodOracle::new(&chi, k).unwrap();
                for n in 1..=4u64 {
                    let w = oracle.trace_on_w(hecke(n)).unwrap();
                    let v = oracle.trace_on_v(hecke(n)).unwrap();
                    let expected = if oracle.is_degenerate() && oracle.dim_v() > 0 {
                        let sum = oracle.coset_character_sum(hecke(n));
                        assert_eq!(sum, int(sigma1_level(level, n) as i64));
                        sum
                    } else {
                        CycloNum::zero()
                    };
                    assert_eq!(&w - &v, expected, "N={level} {} k={k} n={n}", chi.label());
                }
            }
        }
    }
}

#[test]
fn non_preserving_operator_is_reported() {
    let state = OracleState::<Rational>::new(&DirichletChar::trivial(1), 10).unwrap();
    let err = state.trace_on_w_with(hecke(2), &build_tn_infty(2));
    assert!(matches!(err, Err(TraceError::Inconsistency(_))));
    assert!(state
        .trace_on_w_with(hecke(2), &mutated_tn(2).unwrap())
        .is_err());
}

#[test]
fn invalid_queries_are_rejected() {
    assert!(PeriodOracle::new(&DirichletChar::trivial(3), 1).is_err());
    let chi = enumerate_characters(5).pop().unwrap();
    let oracle = PeriodOracle::new(&chi, 3).unwrap();
    assert!(oracle
        .trace_on_w(Sigma::AtkinLehner { n: 1, ell: 5 })
        .is_err());
    let oracle = PeriodOracle::new(&DirichletChar::trivial(12), 4).unwrap();
    assert!(oracle
        .trace_on_w(Sigma::AtkinLehner { n: 1, ell: 2 })
        .is_err());
    let m = module(&DirichletChar::trivial(4), 2);
    assert!(m.act_sigma(hecke(3), &IDENTITY).is_err());
}

#[test]
fn exact_kernels_are_certified() {
    let a = ExactMatrix::<Rational>::from_fn(3, 4, |i, j| {
        Rational::from_integer(BigInt::from((i * 4 + j) as i64 + 1))
    });
    let k = a.kernel().unwrap();
    assert_eq!(k.dim(), 2);
    assert_eq!(a.rank(), 2);
    assert!(a.mul(&k.basis).is_zero());
    let id = ExactMatrix::<Rational>::identity(4);
    assert_eq!(
        k.restricted_trace(&id).unwrap(),
        Rational::from_integer(2.into())
    );
}

proptest! {
    #[test]
    fn cyclotomic_inverse(m in 3u32..16, coeffs in proptest::collection::vec(-9i64..10, 1..8)) {
        let x = CycloNum::from_coeffs(
            m,
            coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect(),
        );
        prop_assume!(!x.is_zero());
        let inv = x.inverse().unwrap();
        prop_assert_eq!(&x * &inv, CycloNum::one());
    }

    #[test]
    fn random_matrices_satisfy_trace_identity(
        level in 1u64..9,
        w in 0u32..6,
        a in -6i64..7, b in -6i64..7, c in -6i64..7, d in -6i64..7,
    ) {
        let x = IntMat2::raw(a, b, c, d);
        prop_assume!(x.det() > 0);
        for chi in enumerate_characters(level) {
            let m = module(&chi, w);
            let act = m.act_sigma(hecke(x.det() as u64), &x).unwrap();
            let expected = if m.dim() == 0 {
                CycloNum::zero()
            } else {
                c_class(&chi, &x) * CycloNum::from_bigint(gegenbauer(w, x.trace(), x.det()))
            };
            prop_assert_eq!(act.trace(), expected);
        }
    }
}
