use proptest::prelude::*;
use trace_kit::arith::{euler_phi, gcd};
use trace_kit::cyclo::CycloNum;
use trace_kit::dirichlet::{enumerate_characters, parse_label};
use trace_kit::Rational;

#[test]
fn enumeration_examples() {
    let one = enumerate_characters(1);
    assert_eq!(one.len(), 1);
    assert!(one[0].is_trivial());
    let four = enumerate_characters(4);
    assert_eq!(four.len(), 2);
    assert_eq!(four[1].evaluate(3), CycloNum::from_int(-1));
    assert_eq!(four[1].evaluate(7), CycloNum::from_int(-1));
    assert_eq!(four[0].conductor(), 1);
    assert_eq!(four[1].conductor(), 4);
    let five = enumerate_characters(5);
    assert_eq!(
        five.iter().map(|c| c.order()).collect::<Vec<_>>(),
        vec![1, 4, 2, 4]
    );
    assert_eq!(five[1].evaluate(2), CycloNum::zeta_pow(4, 1));
    let six = enumerate_characters(6);
    assert!(six[0].evaluate(3).is_zero());
    // the quadratic character mod 8 induced from mod 4
    let eight = enumerate_characters(8);
    let lifted = eight
        .iter()
        .find(|c| {
            c.order() == 2
                && (1..8)
                    .step_by(2)
                    .all(|x| c.evaluate(x) == four[1].evaluate(x))
        })
        .unwrap();
    assert_eq!(lifted.conductor(), 4);
    assert_eq!(parse_label("5.3").unwrap(), five[3]);
    assert!(parse_label("5.4").is_err());
    assert!(parse_label("x").is_err());
}

#[test]
fn orthogonality_parity_and_counts() {
    for n in 1..=60u64 {
        let chars = enumerate_characters(n);
        assert_eq!(chars.len() as u64, euler_phi(n));
        for chi in &chars {
            assert_eq!(chi.evaluate(1), CycloNum::one());
            let total: CycloNum = (0..n as i64).map(|x| chi.evaluate(x)).sum();
            assert_eq!(total.is_zero(), !chi.is_trivial(), "N={n} {chi}");
            assert_eq!(chi.evaluate(n as i64 - 1), CycloNum::from_int(chi.parity()));
            assert_eq!(n % chi.conductor(), 0);
        }
        // distinct exponent vectors give distinct functions
        for (i, a) in chars.iter().enumerate() {
            for b in &chars[i + 1..] {
                assert!((0..n as i64).any(|x| a.exponent(x) != b.exponent(x)));
            }
        }
    }
}

#[test]
fn induced_values_through_divisors() {
    for n in [12u64, 20, 36] {
        for chi in enumerate_characters(n) {
            for m0 in trace_kit::arith::divisors(n) {
                if m0 % chi.conductor() != 0 {
                    continue;
                }
                for x in 0..n as i64 {
                    let v = chi.evaluate_mod(m0, x);
                    if gcd(x, m0 as i64) != 1 {
                        assert!(v.is_zero());
                    } else if gcd(x, n as i64) == 1 {
                        assert_eq!(v, chi.evaluate(x));
                    }
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn multiplicative_on_units(n in 1u64..60, x in 0i64..1000, y in 0i64..1000, idx in 0usize..64) {
        let chars = enumerate_characters(n);
        let chi = &chars[idx % chars.len()];
        prop_assume!(gcd(x, n as i64) == 1 && gcd(y, n as i64) == 1);
        prop_assert_eq!(chi.evaluate(x * y), &chi.evaluate(x) * &chi.evaluate(y));
    }

    #[test]
    fn cyclotomic_arithmetic_matches_floats(m in 1u32..40, e1 in 0i64..40, e2 in 0i64..40, p in -5i64..5, q in 1i64..5) {
        let r = CycloNum::from_rational(Rational::new(p.into(), q.into()));
        let a = CycloNum::zeta_pow(m, e1);
        let b = CycloNum::zeta_pow(m * 2, e2);
        let expr = &(&a + &r) * &(&b - &a);
        let (re, im) = expr.approx_complex();
        let ang = |k: i64, mm: u32| 2.0 * std::f64::consts::PI * k as f64 / mm as f64;
        let (ar, ai) = (ang(e1, m).cos(), ang(e1, m).sin());
        let (br, bi) = (ang(e2, 2 * m).cos(), ang(e2, 2 * m).sin());
        let (xr, xi) = (ar + p as f64 / q as f64, ai);
        let (yr, yi) = (br - ar, bi - ai);
        prop_assert!((re - (xr * yr - xi * yi)).abs() < 1e-9);
        prop_assert!((im - (xr * yi + xi * yr)).abs() < 1e-9);
        let q12 = CycloNum::from_rational(Rational::new((-1).into(), 12.into()));
        prop_assert_eq!(&(&q12 + &CycloNum::zero()) * &CycloNum::one(), q12);
    }
}
