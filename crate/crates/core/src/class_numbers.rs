//! Hurwitz class numbers H(D) and weighted primitive class numbers h₀(D),
//! extended to every integer argument, with an atomic lookup-or-compute cache
//! that can be persisted as CSV rows `kind,D,num,den`.

use std::collections::HashMap;
use std::path::Path;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{euler_phi, exact_sqrt, gcd, isqrt};
use crate::error::{Result, TraceError};
use crate::Rational;

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Counts reduced positive definite forms of discriminant −d (d > 0),
/// returning `(weighted count of all forms, number of primitive forms)`.
/// The weight is 1/2 on classes of [a,0,a] and 1/3 on classes of [a,a,a].
fn reduced_form_counts(d: i64) -> (Rational, i64) {
    let mut twelfths = 0i64;
    let mut primitive = 0i64;
    let amax = isqrt((d / 3) as u64) as i64;
    for a in 1..=amax {
        let mut b = if d % 2 == 0 { 0 } else { 1 };
        while b <= a {
            let num = b * b + d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a {
                    let prim = gcd(gcd(a, b), c) == 1;
                    let w = if b == 0 && a == c {
                        6
                    } else if b == a && a == c {
                        4
                    } else {
                        12
                    };
                    // A reduced form with 0 < b < a < c has a distinct partner with −b.
                    let mult = if b == 0 || b == a || a == c { 1 } else { 2 };
                    twelfths += w * mult;
                    if prim {
                        primitive += mult;
                    }
                }
            }
            b += 2;
        }
    }
    (ratio(twelfths, 12), primitive)
}

/// Uncached H(D).
pub fn hurwitz_h_uncached(d: i64) -> Rational {
    if d == 0 {
        return ratio(-1, 12);
    }
    if d < 0 {
        return match exact_sqrt(-d) {
            Some(u) => ratio(-u, 2),
            None => Rational::zero(),
        };
    }
    if d % 4 == 1 || d % 4 == 2 {
        return Rational::zero();
    }
    reduced_form_counts(d).0
}

/// Uncached h₀(D).
pub fn h0_uncached(d: i64) -> Rational {
    if d == 0 {
        return ratio(-1, 12);
    }
    if d > 0 {
        return match exact_sqrt(d) {
            Some(u) => ratio(-(euler_phi(u as u64) as i64), 2),
            None => Rational::zero(),
        };
    }
    if (-d) % 4 == 1 || (-d) % 4 == 2 {
        return Rational::zero();
    }
    let w = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    ratio(2 * reduced_form_counts(-d).1, w)
}

/// Which of the two class-number functions a cache row holds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ClassKind {
    H,
    H0,
}

impl ClassKind {
    pub fn tag(self) -> &'static str {
        match self {
            ClassKind::H => "H",
            ClassKind::H0 => "h0",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "H" => Some(ClassKind::H),
            "h0" => Some(ClassKind::H0),
            _ => None,
        }
    }

    fn compute(self, d: i64) -> Rational {
        match self {
            ClassKind::H => hurwitz_h_uncached(d),
            ClassKind::H0 => h0_uncached(d),
        }
    }
}

/// Write-through memo of H and h₀ values. Lookups never change results.
#[derive(Default, Debug)]
pub struct ClassNumberCache {
    map: RwLock<HashMap<(ClassKind, i64), Rational>>,
}

impl ClassNumberCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// The process-wide cache used by the trace formulas.
    pub fn global() -> &'static ClassNumberCache {
        static CACHE: OnceLock<ClassNumberCache> = OnceLock::new();
        CACHE.get_or_init(ClassNumberCache::new)
    }

    pub fn get(&self, kind: ClassKind, d: i64) -> Rational {
        if let Some(v) = self.map.read().unwrap().get(&(kind, d)) {
            return v.clone();
        }
        let v = kind.compute(d);
        self.map
            .write()
            .unwrap()
            .entry((kind, d))
            .or_insert(v)
            .clone()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Loads rows `kind,D,num,den`; each row is verified against a fresh
    /// computation so a stale or corrupted file cannot change results.
    pub fn load_csv(&self, path: &Path) -> Result<usize> {
        let err = |e: &dyn std::fmt::Display| TraceError::Cache(format!("{}: {e}", path.display()));
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(path)
            .map_err(|e| err(&e))?;
        let mut loaded = 0;
        for rec in reader.records() {
            let rec = rec.map_err(|e| err(&e))?;
            let field = |i: usize| rec.get(i).ok_or_else(|| err(&"short row"));
            let kind = ClassKind::parse(field(0)?).ok_or_else(|| err(&"unknown kind"))?;
            let parse = |s: &str| s.trim().parse::<BigInt>().map_err(|e| err(&e));
            let d: i64 = field(1)?.trim().parse().map_err(|e| err(&e))?;
            let value = Rational::new(parse(field(2)?)?, parse(field(3)?)?);
            if value != kind.compute(d) {
                return Err(err(&format!(
                    "row {} {d} disagrees with recomputation",
                    kind.tag()
                )));
            }
            self.map.write().unwrap().insert((kind, d), value);
            loaded += 1;
        }
        Ok(loaded)
    }

    /// Writes all cached rows, sorted by (kind, D).
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let err = |e: &dyn std::fmt::Display| TraceError::Cache(format!("{}: {e}", path.display()));
        let mut rows: Vec<_> = self
            .map
            .read()
            .unwrap()
            .iter()
            .map(|(&(k, d), v)| (k.tag(), d, v.numer().to_string(), v.denom().to_string()))
            .collect();
        rows.sort();
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(path)
            .map_err(|e| err(&e))?;
        for (k, d, n, den) in rows {
            w.write_record([k.to_string(), d.to_string(), n, den])
                .map_err(|e| err(&e))?;
        }
        w.flush().map_err(|e| err(&e))
    }
}

/// H(D) through the global cache.
pub fn hurwitz_h(d: i64) -> Rational {
    ClassNumberCache::global().get(ClassKind::H, d)
}

/// h₀(D) through the global cache.
pub fn h0(d: i64) -> Rational {
    ClassNumberCache::global().get(ClassKind::H0, d)
}

/// The divisors `d ≥ 0` entering a primed sum over `d² | D`: all `d ≥ 1`
/// with `d² | D` when `D ≠ 0`, and only `d = 0` when `D = 0`.
pub fn primed_square_divisors(d: i64) -> Vec<i64> {
    if d == 0 {
        return vec![0];
    }
    let m = d.abs();
    (1..)
        .take_while(|k| k * k <= m)
        .filter(|k| m % (k * k) == 0)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        assert_eq!(hurwitz_h(3), ratio(1, 3));
        assert_eq!(hurwitz_h(4), ratio(1, 2));
        assert_eq!(hurwitz_h(23), ratio(3, 1));
        assert_eq!(hurwitz_h(12), ratio(4, 3));
        assert_eq!(hurwitz_h(-4), ratio(-1, 1));
        assert_eq!(h0(4), ratio(-1, 2));
        assert_eq!(h0(-3), ratio(1, 3));
        assert_eq!(h0(-4), ratio(1, 2));
    }
}
