use std::collections::HashSet;

use trace_kit::arith::{divisors, gcd};
use trace_kit::cusp_terms::*;
use trace_kit::cyclo::CycloNum;
use trace_kit::dirichlet::{enumerate_characters, DirichletChar};
use trace_kit::local_counts::Sigma;
use trace_kit::p1::CosetTable;
use trace_kit::Rational;

fn int(x: i64) -> CycloNum {
    CycloNum::from_int(x)
}

#[test]
fn closed_form_examples() {
    assert_eq!(phi_chi(&DirichletChar::trivial(1), 3, 5), int(1));
    assert_eq!(phi_chi(&DirichletChar::trivial(4), 1, 1), int(3));
    assert_eq!(phi_chi(&DirichletChar::trivial(6), 2, 3), int(1));
    assert_eq!(
        CycloNum::from_rational(phi_ell(6, 1, 2, 3).unwrap()),
        int(1)
    );
    assert_eq!(
        phi_ell(6, 2, 2, 3).unwrap(),
        Rational::from_integer(0.into())
    );
    assert!(phi_ell(4, 2, 1, 1).is_err());
    // Φ_{2,2}(a,d) with 2 | a+d: φ(2)/2 times the ℓ′ = 1 sum.
    assert_eq!(
        phi_ell(2, 2, 1, 1).unwrap(),
        Rational::new(1.into(), 2.into())
    );
}

#[test]
fn eisenstein_examples() {
    let t4 = DirichletChar::trivial(4);
    for k in [4, 6, 8] {
        assert_eq!(eisenstein_trace(&t4, k, 1), int(3));
    }
    assert_eq!(eisenstein_trace(&t4, 2, 1), int(2));
    let t1 = DirichletChar::trivial(1);
    assert_eq!(eisenstein_trace(&t1, 12, 2), int(2049));
    assert_eq!(coboundary_trace(&t1, 12, 2), int(2049));
    assert_eq!(coboundary_trace(&t1, 2, 1), int(0));
}

#[test]
fn cusp_reps_biject_with_t_orbits() {
    for level in 1..=40u64 {
        let table = CosetTable::new(level);
        let chi = DirichletChar::trivial(level);
        let reps = cusp_reps(&chi);
        assert_eq!(reps.len() as u64, cusp_count(level));
        let mut seen_orbits = HashSet::new();
        for rep in &reps {
            // T-orbit of the coset of C under right multiplication.
            let mut orbit = Vec::new();
            let mut m = rep.matrix;
            loop {
                let (i, _) = table.locate(m.c, m.d);
                if orbit.contains(&i) {
                    break;
                }
                orbit.push(i);
                m = m * trace_kit::matrix_forms::T_MAT;
            }
            assert_eq!(orbit.len() as u64, rep.width, "N={level} C={}", rep.matrix);
            orbit.sort();
            assert!(seen_orbits.insert(orbit), "N={level}: repeated cusp");
        }
        let covered: usize = seen_orbits.iter().map(|o| o.len()).sum();
        assert_eq!(covered, table.len());
    }
}

#[test]
fn admissibility_rule_matches_stabilizer_condition() {
    for level in 1..=36u64 {
        for chi in enumerate_characters(level) {
            for rep in cusp_reps(&chi) {
                assert_eq!(
                    rep.admissible,
                    admissible_by_stabilizer(&chi, &rep),
                    "N={level} {chi} r={}",
                    rep.r
                );
            }
        }
    }
}

fn weight_parity(chi: &DirichletChar) -> u32 {
    if chi.parity() == 1 {
        0
    } else {
        1
    }
}

/// Closed form = oracle and symmetry, for levels ≤ max_level and ad ≤ max_det.
pub fn phi_coherent(max_level: u64, max_det: u64) -> Result<(), String> {
    for level in 1..=max_level {
        for chi in enumerate_characters(level) {
            let w = weight_parity(&chi);
            for m in 1..=max_det {
                for a in divisors(m) {
                    let d = (m / a) as i64;
                    let a = a as i64;
                    let closed = phi_chi(&chi, a, d);
                    let oracle = phi_generic(&chi, Sigma::Hecke { n: m }, w, a, d);
                    if closed != oracle {
                        return Err(format!("N={level} {chi} a={a} d={d}: {closed} vs {oracle}"));
                    }
                    if closed != phi_chi(&chi, d, a)
                        || oracle != phi_generic(&chi, Sigma::Hecke { n: m }, w, d, a)
                    {
                        return Err(format!("asymmetric at N={level} {chi} a={a} d={d}"));
                    }
                }
            }
        }
        for ell in divisors(level) {
            if gcd(ell as i64, (level / ell) as i64) != 1 {
                continue;
            }
            let triv = DirichletChar::trivial(level);
            for m in (ell..=max_det).step_by(ell as usize) {
                for a in divisors(m) {
                    let d = (m / a) as i64;
                    let a = a as i64;
                    let closed = CycloNum::from_rational(phi_ell(level, ell, a, d).unwrap());
                    let oracle =
                        phi_generic(&triv, Sigma::AtkinLehner { n: m / ell, ell }, 0, a, d);
                    if closed != oracle {
                        return Err(format!(
                            "N={level} ell={ell} a={a} d={d}: {closed} vs {oracle}"
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

#[test]
fn closed_forms_match_enumeration() {
    phi_coherent(12, 24).unwrap();
}

#[test]
fn eisenstein_equals_coboundary() {
    for level in 1..=12u64 {
        for chi in enumerate_characters(level) {
            for k in 2..=12 {
                for n in 1..=10 {
                    assert_eq!(eisenstein_trace(&chi, k, n), coboundary_trace(&chi, k, n));
                }
            }
        }
        for ell in divisors(level) {
            if gcd(ell as i64, (level / ell) as i64) == 1 {
                for k in [2, 4, 6] {
                    for n in 1..=6 {
                        assert_eq!(
                            eisenstein_trace_ell(level, ell, k, n),
                            coboundary_trace_ell(level, ell, k, n)
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn weight_two_eisenstein_dimension() {
    for level in 1..=20u64 {
        let chi = DirichletChar::trivial(level);
        assert_eq!(
            eisenstein_trace(&chi, 2, 1),
            int(cusp_count(level) as i64 - 1),
            "N={level}"
        );
    }
}
