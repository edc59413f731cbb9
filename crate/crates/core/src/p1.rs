//! The projective line P¹(ℤ/N), parametrizing the cosets Γ₀(N)\Γ₁.

use crate::arith::{ext_gcd, gcd};
use crate::matrix_forms::{IntMat2, IDENTITY};

/// Canonical points `(c : d)` of P¹(ℤ/N), each with a lift in Γ₁.
#[derive(Clone, Debug)]
pub struct CosetTable {
    level: u64,
    points: Vec<(i64, i64)>,
    lifts: Vec<IntMat2>,
    /// `lookup[c·N + d] = (point index, λ)` with `(c, d) ≡ λ·point (mod N)`.
    lookup: Vec<Option<(u32, u32)>>,
}

impl CosetTable {
    pub fn new(level: u64) -> Self {
        assert!(level >= 1);
        if level == 1 {
            return CosetTable {
                level,
                points: vec![(0, 1)],
                lifts: vec![IDENTITY],
                lookup: vec![Some((0, 1))],
            };
        }
        let n = level as i64;
        let units: Vec<i64> = (1..n).filter(|&x| gcd(x, n) == 1).collect();
        let mut lookup = vec![None; (n * n) as usize];
        let mut points = Vec::new();
        for c in 0..n {
            for d in 0..n {
                if gcd(gcd(c, d), n) != 1 || lookup[(c * n + d) as usize].is_some() {
                    continue;
                }
                // The orbit of (c, d) is first reached at its lexicographically least member.
                let idx = points.len() as u32;
                points.push((c, d));
                for &l in &units {
                    let key = ((l * c % n) * n + l * d % n) as usize;
                    lookup[key].get_or_insert((idx, l as u32));
                }
            }
        }
        let lifts = points.iter().map(|&(c, d)| lift(c, d, n)).collect();
        CosetTable {
            level,
            points,
            lifts,
            lookup,
        }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn lift(&self, i: usize) -> IntMat2 {
        self.lifts[i]
    }

    pub fn lifts(&self) -> &[IntMat2] {
        &self.lifts
    }

    /// For a bottom row `(c, d)` with gcd(c, d, N) = 1: the point index i and
    /// λ with `(c, d) ≡ λ·(c_i, d_i)`. For g ∈ Γ₁ with that bottom row,
    /// g·A_i⁻¹ ∈ Γ₀(N) has lower-right entry ≡ λ (mod N).
    pub fn locate(&self, c: i64, d: i64) -> (usize, i64) {
        let n = self.level as i64;
        let (i, l) = self.lookup[(c.rem_euclid(n) * n + d.rem_euclid(n)) as usize]
            .expect("bottom row is not a point of the projective line");
        (i as usize, l as i64)
    }
}

/// A matrix of SL₂(ℤ) whose bottom row reduces to `(c, d)` modulo n.
fn lift(c: i64, d: i64, n: i64) -> IntMat2 {
    if c == 0 {
        debug_assert_eq!(d, 1);
        return IDENTITY;
    }
    let d = (0..).map(|k| d + k * n).find(|&y| gcd(c, y) == 1).unwrap();
    let (_, x, y) = ext_gcd(d, -c);
    // x·d − y·c = 1 with the matrix (x y; c d).
    let m = IntMat2::raw(x, y, c, d);
    debug_assert_eq!(m.det(), 1);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::index_phi1;

    #[test]
    fn sizes_match_index() {
        for n in 1..40 {
            let t = CosetTable::new(n);
            assert_eq!(t.len() as u64, index_phi1(n));
            for (i, m) in t.lifts().iter().enumerate() {
                assert_eq!(m.det(), 1);
                assert_eq!(t.locate(m.c, m.d), (i, 1));
            }
        }
    }
}
