//! Integral 2×2 matrices, their projective classes in M̄ₙ, the attached binary
//! quadratic forms, reduction theory, Γ₁-conjugacy labels and the class
//! invariant ε.
//!
//! Entries are `i64` with overflow-checked products; every matrix this crate
//! builds has entries far below that range.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use num_traits::{One, Zero};

use crate::arith::{exact_sqrt, ext_gcd, gcd, isqrt};
use crate::error::{invalid, Result};
use crate::Rational;

/// An integral 2×2 matrix `(a b; c d)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct IntMat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

pub const IDENTITY: IntMat2 = IntMat2::raw(1, 0, 0, 1);
pub const S_MAT: IntMat2 = IntMat2::raw(0, -1, 1, 0);
pub const T_MAT: IntMat2 = IntMat2::raw(1, 1, 0, 1);
pub const T_INV: IntMat2 = IntMat2::raw(1, -1, 0, 1);
pub const U_MAT: IntMat2 = IntMat2::raw(1, -1, 1, 0);
pub const U2_MAT: IntMat2 = IntMat2::raw(0, -1, 1, -1);

impl IntMat2 {
    /// Builds a matrix of positive determinant.
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = Self::raw(a, b, c, d);
        if m.det() <= 0 {
            return invalid(format!("matrix {m} has nonpositive determinant"));
        }
        Ok(m)
    }

    /// Builds a matrix without checking the determinant.
    pub const fn raw(a: i64, b: i64, c: i64, d: i64) -> Self {
        IntMat2 { a, b, c, d }
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn neg(&self) -> Self {
        Self::raw(-self.a, -self.b, -self.c, -self.d)
    }

    /// The adjugate `(d −b; −c a)`, which is the inverse when det = 1.
    pub fn adjugate(&self) -> Self {
        Self::raw(self.d, -self.b, -self.c, self.a)
    }

    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let f = |x: i64, y: i64, z: i64, w: i64| x.checked_mul(y)?.checked_add(z.checked_mul(w)?);
        Some(Self::raw(
            f(self.a, o.a, self.b, o.c)?,
            f(self.a, o.b, self.b, o.d)?,
            f(self.c, o.a, self.d, o.c)?,
            f(self.c, o.b, self.d, o.d)?,
        ))
    }

    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    pub fn max_abs_entry(&self) -> i64 {
        self.a
            .abs()
            .max(self.b.abs())
            .max(self.c.abs())
            .max(self.d.abs())
    }

    /// G_M: the content of Q_M (0 for scalar matrices).
    pub fn content(&self) -> i64 {
        quad_form_of(self).content()
    }
}

impl Mul for IntMat2 {
    type Output = IntMat2;

    fn mul(self, o: IntMat2) -> IntMat2 {
        self.checked_mul(&o)
            .expect("IntMat2 product overflowed i64")
    }
}

impl fmt::Display for IntMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

/// An element of M̄ₙ: a matrix up to sign, stored with the first nonzero entry
/// of `(a, b, c, d)` positive.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ProjMat(IntMat2);

impl ProjMat {
    /// Canonical class of a matrix known to be nonzero; determinant unchecked.
    pub fn canon(m: IntMat2) -> Self {
        let first = [m.a, m.b, m.c, m.d]
            .into_iter()
            .find(|&x| x != 0)
            .unwrap_or(0);
        ProjMat(if first < 0 { m.neg() } else { m })
    }

    pub fn mat(&self) -> IntMat2 {
        self.0
    }

    pub fn det(&self) -> i64 {
        self.0.det()
    }
}

impl Mul for ProjMat {
    type Output = ProjMat;

    fn mul(self, o: ProjMat) -> ProjMat {
        ProjMat::canon(self.0 * o.0)
    }
}

impl fmt::Display for ProjMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub fn proj_canonical(m: IntMat2) -> Result<ProjMat> {
    if m.det() <= 0 {
        return invalid(format!("matrix {m} has nonpositive determinant"));
    }
    Ok(ProjMat::canon(m))
}

/// Binary quadratic form `A x² + B xy + C y²`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub const fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// gcd of the coefficients; 0 for the zero form.
    pub fn content(&self) -> i64 {
        gcd(gcd(self.a, self.b), self.c)
    }

    pub fn neg(&self) -> Self {
        QuadForm::new(-self.a, -self.b, -self.c)
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// The form `Q(p X + q Y, r X + s Y)`.
    pub fn transform(&self, g: &IntMat2) -> Self {
        let (p, q, r, s) = (g.a, g.b, g.c, g.d);
        QuadForm::new(
            self.eval(p, r),
            2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s,
            self.eval(q, s),
        )
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

/// Q_M = [c, d − a, −b].
pub fn quad_form_of(m: &IntMat2) -> QuadForm {
    QuadForm::new(m.c, m.d - m.a, -m.b)
}

/// Canonical representative of a proper (SL₂(ℤ)) equivalence class of forms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum FormKey {
    /// `±g(px + qy)²` (and the zero form with `sign = 0`, `content = 0`).
    Zero { sign: i8, content: i64 },
    /// Gauss-reduced `sign·Q`, with `sign·Q` positive definite.
    Definite { sign: i8, form: QuadForm },
    /// Least form on the cycle of reduced forms (nonsquare discriminant).
    Indefinite { form: QuadForm },
    /// `content·[k, root, 0]` with `0 ≤ k < root` (discriminant content²·root²).
    Split { content: i64, k: i64, root: i64 },
}

pub fn reduce_form(q: &QuadForm) -> FormKey {
    let disc = q.disc();
    match disc.cmp(&0) {
        Ordering::Equal => {
            let sign = if q.a != 0 { q.a.signum() } else { q.c.signum() };
            FormKey::Zero {
                sign: sign as i8,
                content: q.content(),
            }
        }
        Ordering::Less => {
            let sign = q.a.signum();
            let f = if sign > 0 { *q } else { q.neg() };
            FormKey::Definite {
                sign: sign as i8,
                form: gauss_reduce(f),
            }
        }
        Ordering::Greater => match exact_sqrt(disc) {
            Some(root) => split_key(q, root),
            None => FormKey::Indefinite {
                form: indefinite_cycle_min(q),
            },
        },
    }
}

/// Gauss reduction of a positive definite form: |B| ≤ A ≤ C, B ≥ 0 on the
/// boundary A = C or |B| = A.
pub fn gauss_reduce(mut f: QuadForm) -> QuadForm {
    debug_assert!(f.disc() < 0 && f.a > 0);
    let disc = f.disc();
    loop {
        if f.b > f.a || f.b <= -f.a {
            let two_a = 2 * f.a;
            let mut b = f.b.rem_euclid(two_a);
            if b > f.a {
                b -= two_a;
            }
            f = QuadForm::new(f.a, b, (b * b - disc) / (4 * f.a));
        }
        if f.a > f.c {
            f = QuadForm::new(f.c, -f.b, f.a);
            continue;
        }
        break;
    }
    if f.a == f.c && f.b < 0 {
        f.b = -f.b;
    }
    f
}

fn indefinite_is_reduced(f: &QuadForm, s: i64) -> bool {
    let two_a = 2 * f.a.abs();
    f.b <= s && f.b + two_a > s && two_a - f.b <= s
}

/// One step of the classical reduction operator ρ on indefinite forms of
/// nonsquare discriminant (a proper equivalence).
fn indefinite_rho(f: &QuadForm, disc: i64, s: i64) -> QuadForm {
    let ac = f.c.abs();
    let two_c = 2 * ac;
    let r = if ac > s {
        let mut r = (-f.b).rem_euclid(two_c);
        if r > ac {
            r -= two_c;
        }
        r
    } else {
        s - (s + f.b).rem_euclid(two_c)
    };
    QuadForm::new(f.c, r, (r * r - disc) / (4 * f.c))
}

fn indefinite_cycle_min(q: &QuadForm) -> QuadForm {
    let disc = q.disc();
    let s = isqrt(disc as u64) as i64;
    let bound = 4 * disc.max(1);
    let mut f = *q;
    let mut steps = 0;
    while !indefinite_is_reduced(&f, s) {
        f = indefinite_rho(&f, disc, s);
        steps += 1;
        assert!(
            steps <= bound,
            "indefinite reduction of {q} exceeded step bound"
        );
    }
    let start = f;
    let mut best = f;
    loop {
        f = indefinite_rho(&f, disc, s);
        steps += 1;
        assert!(
            steps <= 2 * bound,
            "indefinite cycle of {q} exceeded step bound"
        );
        if f == start {
            return best;
        }
        best = best.min(f);
    }
}

fn split_key(q: &QuadForm, root: i64) -> FormKey {
    let g = q.content();
    let p = QuadForm::new(q.a / g, q.b / g, q.c / g);
    let s = root / g;
    let zeros: [(i64, i64); 2] = if p.a == 0 {
        let h = gcd(p.b, p.c);
        [(1, 0), (-p.c / h, p.b / h)]
    } else {
        let mk = |num: i64| {
            let den = 2 * p.a;
            let h = gcd(num, den);
            (num / h, den / h)
        };
        [mk(-p.b + s), mk(-p.b - s)]
    };
    for (x, y) in zeros {
        // γ = (p0 x; r0 y) with p0·y − x·r0 = 1 sends the zero to the second column.
        let (h, u, v) = ext_gcd(y, -x);
        debug_assert_eq!(h, 1);
        let gamma = IntMat2::raw(u, x, v, y);
        let t = p.transform(&gamma);
        debug_assert_eq!(t.c, 0);
        if t.b == s {
            return FormKey::Split {
                content: g,
                k: t.a.rem_euclid(s),
                root: s,
            };
        }
    }
    unreachable!("no zero of {q} yields middle coefficient +{s}")
}

/// Name of the Γ₁-conjugacy class of `[±M]` in M̄ₙ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ClassLabel {
    pub det: i64,
    pub t_canon: i64,
    pub form_key: FormKey,
    pub content: i64,
}

pub fn class_label(m: &IntMat2) -> ClassLabel {
    let q = quad_form_of(m);
    let t = m.trace();
    let form_key = match t.cmp(&0) {
        Ordering::Greater => reduce_form(&q),
        Ordering::Less => reduce_form(&q.neg()),
        Ordering::Equal => reduce_form(&q).min(reduce_form(&q.neg())),
    };
    ClassLabel {
        det: m.det(),
        t_canon: t.abs(),
        form_key,
        content: q.content(),
    }
}

/// Order of the stabilizer of M under Γ̄₁-conjugation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StabOrder {
    Finite(u32),
    Infinite,
}

pub fn stab_order(m: &IntMat2) -> StabOrder {
    let q = quad_form_of(m);
    let disc = q.disc();
    if disc >= 0 {
        return StabOrder::Infinite;
    }
    let g = q.content();
    match disc / (g * g) {
        -3 => StabOrder::Finite(3),
        -4 => StabOrder::Finite(2),
        _ => StabOrder::Finite(1),
    }
}

/// The class invariant ε of the conjugacy class of M.
pub fn epsilon(m: &IntMat2) -> Rational {
    let q = quad_form_of(m);
    let disc = q.disc();
    if m.is_scalar() {
        return Rational::new(1.into(), 6.into());
    }
    if disc == 0 {
        return Rational::zero();
    }
    if disc > 0 {
        return if exact_sqrt(disc).is_some() {
            Rational::one()
        } else {
            Rational::zero()
        };
    }
    match stab_order(m) {
        StabOrder::Finite(k) => -Rational::new(1.into(), (k as i64).into()),
        StabOrder::Infinite => unreachable!(),
    }
}

/// All matrices `(a b; c d)` of determinant `n` with entries bounded by `bound`.
pub fn matrices_in_box(n: i64, bound: i64) -> Vec<IntMat2> {
    let mut out = Vec::new();
    for a in -bound..=bound {
        for d in -bound..=bound {
            let bc = a * d - n;
            if bc == 0 {
                for b in -bound..=bound {
                    if b != 0 {
                        out.push(IntMat2::raw(a, b, 0, d));
                    }
                }
                for c in -bound..=bound {
                    out.push(IntMat2::raw(a, 0, c, d));
                }
            } else {
                for b in 1..=bound.min(bc.abs()) {
                    if bc % b == 0 {
                        let c = bc / b;
                        if c.abs() <= bound {
                            out.push(IntMat2::raw(a, b, c, d));
                            out.push(IntMat2::raw(a, -b, -c, d));
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_signs() {
        let m = proj_canonical(IntMat2::raw(0, -1, 1, 0)).unwrap();
        assert_eq!(m.mat(), IntMat2::raw(0, 1, -1, 0));
        assert_eq!(
            proj_canonical(IntMat2::raw(-1, 0, 0, -1)).unwrap().mat(),
            IDENTITY
        );
        assert!(proj_canonical(IntMat2::raw(0, 1, 1, 0)).is_err());
    }

    #[test]
    fn split_and_definite_keys() {
        assert_eq!(
            reduce_form(&QuadForm::new(2, 2, 3)),
            FormKey::Definite {
                sign: 1,
                form: QuadForm::new(2, 2, 3)
            }
        );
        assert_eq!(
            reduce_form(&QuadForm::new(1, 3, 0)),
            FormKey::Split {
                content: 1,
                k: 1,
                root: 3
            }
        );
    }

    #[test]
    fn box_enumeration_matches_scan() {
        for n in 1..5 {
            let mut fast = matrices_in_box(n, 4);
            fast.sort();
            let mut slow = Vec::new();
            for a in -4..=4 {
                for b in -4..=4 {
                    for c in -4..=4 {
                        for d in -4..=4 {
                            if a * d - b * c == n {
                                slow.push(IntMat2::raw(a, b, c, d));
                            }
                        }
                    }
                }
            }
            slow.sort();
            assert_eq!(fast, slow);
        }
    }
}
