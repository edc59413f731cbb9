use num_traits::Zero;
use trace_kit::arith::{kronecker, moebius, sigma1};
use trace_kit::class_numbers::*;
use trace_kit::Rational;

fn r(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

#[test]
fn examples() {
    assert_eq!(hurwitz_h(0), r(-1, 12));
    assert_eq!(hurwitz_h(-4), r(-1, 1));
    assert_eq!(hurwitz_h(3), r(1, 3));
    assert_eq!(hurwitz_h(4), r(1, 2));
    assert_eq!(hurwitz_h(23), r(3, 1));
    assert_eq!(h0(0), r(-1, 12));
    assert_eq!(h0(4), r(-1, 2));
    assert_eq!(h0(-3), r(1, 3));
    assert_eq!(h0(-4), r(1, 2));
}

/// Checks the inversion pair for all |D| ≤ bound.
pub fn inversion_holds(bound: i64) -> Result<(), String> {
    for d in -bound..=bound {
        let divs = primed_square_divisors(d);
        let quotient = |k: i64| if k == 0 { 0 } else { d / (k * k) };
        let lhs: Rational = divs.iter().map(|&k| h0(quotient(k))).sum();
        if lhs != hurwitz_h(-d) {
            return Err(format!("H(-D) at D={d}"));
        }
        let mu = |k: i64| if k == 0 { 1 } else { moebius(k as u64) };
        let rhs: Rational = divs
            .iter()
            .map(|&k| hurwitz_h(quotient(k)) * Rational::from_integer(mu(k).into()))
            .sum();
        if rhs != h0(-d) {
            return Err(format!("h0(-D) at D={d}"));
        }
    }
    Ok(())
}

#[test]
fn inversion_pair() {
    inversion_holds(10_000).unwrap();
}

#[test]
fn kronecker_hurwitz_relation() {
    for n in 1..=200i64 {
        let mut total = Rational::zero();
        for t in -(n + 1)..=(n + 1) {
            total += hurwitz_h(4 * n - t * t);
        }
        assert_eq!(total, r(sigma1(n as u64) as i64, 1), "n={n}");
    }
}

#[test]
fn level_four_footnote_relation() {
    for d in 0..=1000i64 {
        if !matches!(d % 4, 0 | 3) {
            continue;
        }
        let mut rhs =
            hurwitz_h(4 * d) + hurwitz_h(d) * Rational::from_integer(kronecker(-d, 2).into());
        if d % 4 == 0 {
            rhs += hurwitz_h(d / 4) * r(2, 1);
        }
        assert_eq!(hurwitz_h(d) * r(3, 1), rhs, "D={d}");
    }
}

#[test]
fn cache_round_trip_is_transparent() {
    let cache = ClassNumberCache::new();
    for d in -30..60 {
        assert_eq!(cache.get(ClassKind::H, d), hurwitz_h_uncached(d));
        assert_eq!(cache.get(ClassKind::H0, d), h0_uncached(d));
    }
    let dir = std::env::temp_dir().join(format!("trace-kit-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cache.csv");
    cache.save_csv(&path).unwrap();
    let fresh = ClassNumberCache::new();
    assert_eq!(fresh.load_csv(&path).unwrap(), cache.len());
    assert_eq!(fresh.get(ClassKind::H, 23), r(3, 1));
    std::fs::write(&path, "H,23,4,1\n").unwrap();
    assert!(ClassNumberCache::new().load_csv(&path).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn concurrent_lookups_agree() {
    let cache = ClassNumberCache::new();
    std::thread::scope(|s| {
        for _ in 0..4 {
            s.spawn(|| {
                for d in 0..300 {
                    assert_eq!(cache.get(ClassKind::H, d), hurwitz_h_uncached(d));
                }
            });
        }
    });
}
