//! The universal Hecke operator T̃ₙ in the group ring ℛₙ = ℚ[M̄ₙ]: two
//! constructions (the fundamental-domain form and its simplified five-family
//! form), the coset sum Tₙ^∞, left-ideal membership tests, and a verifier for
//! the three defining properties
//!
//! * (A) (1 − S)T̃ₙ − Tₙ^∞(1 − S) ∈ (1 − T)ℛₙ,
//! * (B) T̃ₙ(1 + S) ∈ (1 + U + U²)ℛₙ and T̃ₙ(1 + U + U²) ∈ (1 + S)ℛₙ,
//! * (C) Σ_{M ∈ 𝒳} c(M) = ε(𝒳) for every Γ₁-conjugacy class 𝒳 ⊂ M̄ₙ.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{divisors, exact_sqrt, isqrt};
use crate::error::{check_positive, Result, TraceError};
use crate::matrix_forms::{
    class_label, epsilon, matrices_in_box, stab_order, ClassLabel, IntMat2, ProjMat, StabOrder,
    IDENTITY, S_MAT, U2_MAT, U_MAT,
};
use crate::par;
use crate::Rational;

fn ratio(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// A finitely supported ℚ-combination of elements of M̄ₙ for one n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElem {
    det: i64,
    terms: BTreeMap<ProjMat, Rational>,
}

impl GroupRingElem {
    pub fn zero(det: i64) -> Self {
        GroupRingElem {
            det,
            terms: BTreeMap::new(),
        }
    }

    /// A single matrix with coefficient 1.
    pub fn basis(m: IntMat2) -> Self {
        let mut x = Self::zero(m.det());
        x.add_term(m, Rational::one());
        x
    }

    /// The element 1 ∈ ℚ[Γ̄₁].
    pub fn one() -> Self {
        Self::basis(IDENTITY)
    }

    /// Σ of the given matrices with coefficient 1 each.
    pub fn sum_of(det: i64, mats: &[IntMat2]) -> Self {
        let mut x = Self::zero(det);
        for m in mats {
            x.add_term(*m, Rational::one());
        }
        x
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    /// Adds `coef·[±m]`; `m` must have the element's determinant.
    pub fn add_term(&mut self, m: IntMat2, coef: Rational) {
        assert_eq!(
            m.det(),
            self.det,
            "matrix {m} does not have determinant {}",
            self.det
        );
        if coef.is_zero() {
            return;
        }
        let key = ProjMat::canon(m);
        let entry = self.terms.entry(key).or_insert_with(Rational::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, m: &ProjMat) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ProjMat, &Rational)> {
        self.terms.iter()
    }

    /// Support and coefficients sorted lexicographically by (a, b, c, d) of
    /// the canonical representative.
    pub fn entries_sorted(&self) -> Vec<(IntMat2, Rational)> {
        self.terms
            .iter()
            .map(|(m, c)| (m.mat(), c.clone()))
            .collect()
    }

    /// Σ of all coefficients.
    pub fn coefficient_sum(&self) -> Rational {
        self.terms.values().sum()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Self::zero(self.det);
        if q.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(m, c)| (*m, c * q)).collect();
        out
    }

    /// g·x for a matrix g.
    pub fn left_mul(&self, g: &IntMat2) -> Self {
        &GroupRingElem::basis(*g) * self
    }

    /// x·g for a matrix g.
    pub fn right_mul(&self, g: &IntMat2) -> Self {
        self * &GroupRingElem::basis(*g)
    }
}

impl Add for &GroupRingElem {
    type Output = GroupRingElem;

    fn add(self, o: &GroupRingElem) -> GroupRingElem {
        assert_eq!(self.det, o.det, "adding elements of different determinants");
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.mat(), c.clone());
        }
        out
    }
}

impl Neg for &GroupRingElem {
    type Output = GroupRingElem;

    fn neg(self) -> GroupRingElem {
        self.scale(&-Rational::one())
    }
}

impl Sub for &GroupRingElem {
    type Output = GroupRingElem;

    fn sub(self, o: &GroupRingElem) -> GroupRingElem {
        self + &(-o)
    }
}

impl Mul for &GroupRingElem {
    type Output = GroupRingElem;

    fn mul(self, o: &GroupRingElem) -> GroupRingElem {
        let mut out = GroupRingElem::zero(self.det * o.det);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mat() * m2.mat(), c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c}·{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// 1 + S.
pub fn one_plus_s() -> GroupRingElem {
    GroupRingElem::sum_of(1, &[IDENTITY, S_MAT])
}

/// 1 − S.
pub fn one_minus_s() -> GroupRingElem {
    let mut x = GroupRingElem::one();
    x.add_term(S_MAT, -Rational::one());
    x
}

/// 1 + U + U².
pub fn one_plus_u_u2() -> GroupRingElem {
    GroupRingElem::sum_of(1, &[IDENTITY, U_MAT, U2_MAT])
}

/// Tₙ^∞ = Σ (a b; 0 d) over ad = n, 0 ≤ b < d.
pub fn build_tn_infty(n: u64) -> GroupRingElem {
    let mut x = GroupRingElem::zero(n as i64);
    for a in divisors(n) {
        let d = (n / a) as i64;
        for b in 0..d {
            x.add_term(IntMat2::raw(a as i64, b, 0, d), Rational::one());
        }
    }
    x
}

/// Representatives M ∈ ℰₙ of the elliptic Γ₁-classes in M̄ₙ, each with the
/// coefficient −1/|Stab M|: Q_M = [c, d − a, −b] positive definite with
/// fixed point z_M in {0 ≤ Re z ≤ 1/2, |z − 1| ≥ 1}, boundary points
/// resolved by the sign of the trace.
pub fn build_elliptic_reps(n: u64) -> Vec<(IntMat2, Rational)> {
    let n = n as i64;
    let mut out = Vec::new();
    let tmax = isqrt((4 * n - 1) as u64) as i64;
    for t in -tmax..=tmax {
        let disc = 4 * n - t * t;
        // z_M = (m + i√D)/(2c) with m = a − d. On Re z = 0 (m = 0) the
        // condition is 4c | D; otherwise m ≤ −b together with m ≤ c gives
        // 3m² ≤ D and 4mc ≤ D + m².
        let mut pairs: Vec<(i64, i64)> = Vec::new();
        if t % 2 == 0 {
            pairs.extend(
                (1..=disc / 4)
                    .filter(|c| disc % (4 * c) == 0)
                    .map(|c| (0, c)),
            );
        }
        let mmax = isqrt((disc / 3) as u64) as i64;
        for m in (1..=mmax).filter(|m| (m - t).rem_euclid(2) == 0) {
            pairs.extend((m..=(disc + m * m) / (4 * m)).map(|c| (m, c)));
        }
        for (m, c) in pairs {
            if (disc + m * m) % (4 * c) != 0 {
                continue;
            }
            let beta = (disc + m * m) / (4 * c);
            if beta < m {
                continue;
            }
            let (a, d) = ((t + m) / 2, (t - m) / 2);
            let boundary_ok = if m == 0 && beta > c {
                t > 0
            } else if m == 0 && beta < c {
                t <= 0
            } else if m == c && beta > c {
                t <= 0
            } else if beta == m && beta < c {
                t > 0
            } else {
                true
            };
            if !boundary_ok {
                continue;
            }
            let mat = IntMat2::raw(a, -beta, c, d);
            let k = match stab_order(&mat) {
                StabOrder::Finite(k) => k as i64,
                StabOrder::Infinite => unreachable!("definite form"),
            };
            out.push((mat, ratio(-1, k)));
        }
    }
    out
}

/// Which closed form to build T̃ₙ from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    /// Elliptic representatives + upper-triangular block + (1/6)√n·I +
    /// (X − SXS) + (Y + Z − U²(Y + Z)U).
    FundamentalDomain,
    /// The simplified five-family form with primed boundary weights.
    FiveFamilies,
}

/// A family of det-n matrices cut out by inequalities, with the entry bound
/// used to enumerate it.
struct Family {
    name: &'static str,
    pred: fn(&IntMat2) -> bool,
}

fn beta(m: &IntMat2) -> i64 {
    -m.b
}

fn fam_x(m: &IntMat2) -> bool {
    0 < beta(m) && beta(m) < m.c && 0 < m.d && m.d < m.a
}

fn fam_y(m: &IntMat2) -> bool {
    m.a - m.d < beta(m) && beta(m) <= m.c && 0 < m.c && m.c < m.a
}

fn fam_z(m: &IntMat2) -> bool {
    let (a, c, d) = (m.a, m.c, m.d);
    a - d <= c && c < beta(m) && 0 < a && 0 < c && (a - d != c || -d >= a)
}

fn fam_upper(m: &IntMat2) -> bool {
    m.c == 0 && m.a > 0 && 0 <= m.b && m.b < m.d - m.a
}

fn fam_f1(m: &IntMat2) -> bool {
    m.a - m.d < beta(m) && beta(m) <= m.c && 0 <= m.c && m.c < m.a
}

fn fam_f2(m: &IntMat2) -> bool {
    beta(m) <= m.a - m.d && m.a - m.d < m.c && 0 <= -m.d && -m.d < beta(m)
}

fn fam_f3(m: &IntMat2) -> bool {
    0 < m.a - m.d && m.a - m.d <= m.c && m.c < beta(m) && m.a <= 0
}

fn fam_f4(m: &IntMat2) -> bool {
    0 <= m.a - m.d && m.a - m.d < beta(m) && beta(m) < m.c && m.d <= 0
}

fn fam_f5(m: &IntMat2) -> bool {
    0 <= m.a - m.d && m.a - m.d <= beta(m) && beta(m) == m.c
}

const FAMILIES: [Family; 9] = [
    Family {
        name: "X",
        pred: fam_x,
    },
    Family {
        name: "Y",
        pred: fam_y,
    },
    Family {
        name: "Z",
        pred: fam_z,
    },
    Family {
        name: "upper",
        pred: fam_upper,
    },
    Family {
        name: "F1",
        pred: fam_f1,
    },
    Family {
        name: "F2",
        pred: fam_f2,
    },
    Family {
        name: "F3",
        pred: fam_f3,
    },
    Family {
        name: "F4",
        pred: fam_f4,
    },
    Family {
        name: "F5",
        pred: fam_f5,
    },
];

fn family(name: &str) -> &'static Family {
    FAMILIES
        .iter()
        .find(|f| f.name == name)
        .expect("known family")
}

/// Entry bound for the family scans. Every family forces |entries| ≤ n + 1:
/// e.g. X has ad + βc = n with all four positive, Y has a² < n and
/// |β|(a − c) < n − a², Z has c² − ac + a² ≤ n + (a − 1)c when d ≤ 0.
/// [`audit_bounds`] rescans with the doubled bound.
pub fn family_bound(n: u64) -> i64 {
    n as i64 + 1
}

fn scan(n: u64, bound: i64, fam: &Family) -> Vec<IntMat2> {
    let mut v: Vec<IntMat2> = matrices_in_box(n as i64, bound)
        .into_iter()
        .filter(|m| (fam.pred)(m))
        .collect();
    v.sort();
    v
}

/// F5 primed weights: 1/2 at a = d, β = c ≠ 0; 1/3 at a − d = β = c ≠ 0;
/// −1/12 at a − d = β = c = 0 (both signs of √n·I are counted).
fn f5_weight(m: &IntMat2) -> Rational {
    let (m0, c) = (m.a - m.d, m.c);
    if m0 == 0 && c == 0 {
        ratio(-1, 12)
    } else if m0 == 0 {
        ratio(1, 2)
    } else if m0 == c {
        ratio(1, 3)
    } else {
        Rational::one()
    }
}

fn from_family(n: u64, name: &str, bound: i64) -> GroupRingElem {
    GroupRingElem::sum_of(n as i64, &scan(n, bound, family(name)))
}

fn conj(x: &GroupRingElem, left: &IntMat2, right: &IntMat2) -> GroupRingElem {
    x.left_mul(left).right_mul(right)
}

fn build_fundamental(n: u64) -> GroupRingElem {
    let bound = family_bound(n);
    let det = n as i64;
    let mut t = GroupRingElem::zero(det);
    for (m, c) in build_elliptic_reps(n) {
        t.add_term(m, c);
    }
    t = &t + &from_family(n, "upper", bound);
    if let Some(s) = exact_sqrt(det) {
        t.add_term(IntMat2::raw(s, 0, 0, s), ratio(1, 6));
    }
    let x = from_family(n, "X", bound);
    t = &t + &(&x - &conj(&x, &S_MAT, &S_MAT));
    let yz = &from_family(n, "Y", bound) + &from_family(n, "Z", bound);
    &t + &(&yz - &conj(&yz, &U2_MAT, &U_MAT))
}

fn build_five(n: u64) -> GroupRingElem {
    let bound = family_bound(n);
    let mut t = from_family(n, "F1", bound);
    for name in ["F2", "F3", "F4"] {
        t = &t - &from_family(n, name, bound);
    }
    for m in scan(n, bound, family("F5")) {
        t.add_term(m, -f5_weight(&m));
    }
    t
}

/// T̃ₙ from the chosen construction.
pub fn build_tn(n: u64, construction: Construction) -> GroupRingElem {
    match construction {
        Construction::FundamentalDomain => build_fundamental(n),
        Construction::FiveFamilies => build_five(n),
    }
}

/// T̃ₙ from the fundamental-domain form, checked against the five-family form.
pub fn build_tn_checked(n: u64) -> Result<GroupRingElem> {
    check_positive("n", n)?;
    let (a, b) = par::join(
        || build_tn(n, Construction::FundamentalDomain),
        || build_tn(n, Construction::FiveFamilies),
    );
    if a != b {
        let diff = &a - &b;
        return Err(TraceError::Inconsistency(format!(
            "the two constructions of T̃_{n} differ by {diff}"
        )));
    }
    Ok(a)
}

/// Rescans every family with twice the entry bound and reports the first
/// family that gains elements.
pub fn audit_bounds(n: u64) -> Result<()> {
    let bound = family_bound(n);
    for fam in &FAMILIES {
        let small = scan(n, bound, fam);
        let large = scan(n, 2 * bound, fam);
        if small != large {
            return Err(TraceError::Inconsistency(format!(
                "family {} gains {} elements when the entry bound is doubled",
                fam.name,
                large.len() - small.len()
            )));
        }
    }
    Ok(())
}

/// Key of a left orbit in M̄ₙ under ⟨T⟩, ⟨S⟩ or ⟨U⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrbitKey {
    T(IntMat2),
    S(ProjMat),
    U(ProjMat),
}

impl fmt::Display for OrbitKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbitKey::T(m) => write!(f, "<T>{m}"),
            OrbitKey::S(m) => write!(f, "<S>{m}"),
            OrbitKey::U(m) => write!(f, "<U>{m}"),
        }
    }
}

/// The three left ideals (1 − T)ℛ, (1 + S)ℛ, (1 + U + U²)ℛ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ideal {
    OneMinusT,
    OnePlusS,
    OnePlusUUU,
}

/// Reduces a lift of M along its left ⟨T⟩-orbit: a mod |c| when c ≠ 0,
/// else b mod |d|.
fn t_reduce(m: IntMat2) -> IntMat2 {
    let k = if m.c != 0 {
        -m.a.div_euclid(m.c.abs()) * m.c.signum()
    } else {
        -m.b.div_euclid(m.d.abs()) * m.d.signum()
    };
    IntMat2::raw(m.a + k * m.c, m.b + k * m.d, m.c, m.d)
}

fn orbit_key(ideal: Ideal, m: &ProjMat) -> OrbitKey {
    let x = m.mat();
    match ideal {
        Ideal::OneMinusT => OrbitKey::T(t_reduce(x).min(t_reduce(x.neg()))),
        Ideal::OnePlusS => OrbitKey::S(*m.min(&ProjMat::canon(S_MAT * x))),
        Ideal::OnePlusUUU => OrbitKey::U(
            *[*m, ProjMat::canon(U_MAT * x), ProjMat::canon(U2_MAT * x)]
                .iter()
                .min()
                .unwrap(),
        ),
    }
}

/// Orbit under the finite group ⟨S⟩ or ⟨U⟩, listed from the key.
fn finite_orbit(key: &OrbitKey) -> Vec<ProjMat> {
    match key {
        OrbitKey::S(m) => vec![*m, ProjMat::canon(S_MAT * m.mat())],
        OrbitKey::U(m) => vec![
            *m,
            ProjMat::canon(U_MAT * m.mat()),
            ProjMat::canon(U2_MAT * m.mat()),
        ],
        OrbitKey::T(_) => unreachable!("⟨T⟩-orbits are infinite"),
    }
}

/// Outcome of a membership test; `witness` names the first violating orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    pub witness: Option<OrbitKey>,
}

impl Membership {
    fn from_witness(witness: Option<OrbitKey>) -> Self {
        Membership {
            member: witness.is_none(),
            witness,
        }
    }
}

/// Membership of x in a left ideal. The left actions of T, S and U on M̄ₙ are
/// free, so x ∈ (1 − T)ℛ iff its coefficients sum to 0 on every ⟨T⟩-orbit,
/// and x ∈ (1 + S)ℛ (resp. (1 + U + U²)ℛ) iff its coefficients are constant on
/// every ⟨S⟩- (resp. ⟨U⟩-) orbit.
pub fn ideal_membership(x: &GroupRingElem, ideal: Ideal) -> Membership {
    let keys: BTreeSet<OrbitKey> = x.terms.keys().map(|m| orbit_key(ideal, m)).collect();
    let witness = match ideal {
        Ideal::OneMinusT => {
            let mut sums: BTreeMap<OrbitKey, Rational> = BTreeMap::new();
            for (m, c) in &x.terms {
                *sums
                    .entry(orbit_key(ideal, m))
                    .or_insert_with(Rational::zero) += c;
            }
            sums.into_iter().find(|(_, s)| !s.is_zero()).map(|(k, _)| k)
        }
        Ideal::OnePlusS | Ideal::OnePlusUUU => keys.into_iter().find(|key| {
            let orbit = finite_orbit(key);
            let first = x.coeff(&orbit[0]);
            orbit[1..].iter().any(|m| x.coeff(m) != first)
        }),
    };
    Membership::from_witness(witness)
}

/// One conjugacy class in the property (C) ledger.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassEntry {
    pub label: ClassLabel,
    pub representative: IntMat2,
    pub coefficient_sum: Rational,
    pub epsilon: Rational,
}

impl ClassEntry {
    pub fn ok(&self) -> bool {
        self.coefficient_sum == self.epsilon
    }
}

/// Result of checking properties (A), (B), (C) for one element of ℛₙ.
#[derive(Clone, Debug, PartialEq)]
pub struct AbcReport {
    pub n: u64,
    pub a: Membership,
    pub b_s: Membership,
    pub b_u: Membership,
    pub c_ledger: Vec<ClassEntry>,
}

impl AbcReport {
    pub fn a_pass(&self) -> bool {
        self.a.member
    }

    pub fn b_pass(&self) -> bool {
        self.b_s.member && self.b_u.member
    }

    pub fn c_pass(&self) -> bool {
        self.c_ledger.iter().all(ClassEntry::ok)
    }

    pub fn all_pass(&self) -> bool {
        self.a_pass() && self.b_pass() && self.c_pass()
    }

    /// First class whose coefficient sum differs from ε.
    pub fn c_witness(&self) -> Option<&ClassEntry> {
        self.c_ledger.iter().find(|e| !e.ok())
    }
}

/// Checks (A), (B), (C) for an arbitrary candidate `t` of determinant n.
/// Property (C) is checked on every class in the support and on every class
/// realized by a scan with entries bounded by n + 1 (such classes outside the
/// support must have ε = 0).
pub fn verify_abc_for(t: &GroupRingElem) -> AbcReport {
    let n = t.det() as u64;
    let lhs = &(&one_minus_s() * t) - &(&build_tn_infty(n) * &one_minus_s());
    let a = ideal_membership(&lhs, Ideal::OneMinusT);
    let b_s = ideal_membership(&(t * &one_plus_s()), Ideal::OnePlusUUU);
    let b_u = ideal_membership(&(t * &one_plus_u_u2()), Ideal::OnePlusS);

    let mut classes: BTreeMap<ClassLabel, (IntMat2, Rational)> = BTreeMap::new();
    for (m, c) in &t.terms {
        let entry = classes
            .entry(class_label(&m.mat()))
            .or_insert_with(|| (m.mat(), Rational::zero()));
        entry.1 += c;
    }
    for m in matrices_in_box(n as i64, family_bound(n)) {
        classes
            .entry(class_label(&m))
            .or_insert_with(|| (m, Rational::zero()));
    }
    let c_ledger = classes
        .into_iter()
        .map(|(label, (rep, sum))| ClassEntry {
            label,
            representative: rep,
            coefficient_sum: sum,
            epsilon: epsilon(&rep),
        })
        .collect();
    AbcReport {
        n,
        a,
        b_s,
        b_u,
        c_ledger,
    }
}

/// Builds T̃ₙ (both constructions, required to agree) and checks (A), (B), (C).
pub fn verify_abc(n: u64) -> Result<AbcReport> {
    Ok(verify_abc_for(&build_tn_checked(n)?))
}

/// [`verify_abc`] for every n in `ns`, in parallel when enabled.
pub fn verify_abc_battery(ns: &[u64]) -> Vec<Result<AbcReport>> {
    par::map_ordered(ns, |&n| verify_abc(n))
}

/// [`verify_abc_battery`] on the calling thread only.
pub fn verify_abc_battery_sequential(ns: &[u64]) -> Vec<Result<AbcReport>> {
    par::map_sequential(ns, |&n| verify_abc(n))
}

/// Negative control: T̃ₙ with the coefficient of its first support element
/// raised by 1.
pub fn mutated_tn(n: u64) -> Result<GroupRingElem> {
    let mut t = build_tn_checked(n)?;
    let first = t
        .terms
        .keys()
        .next()
        .copied()
        .expect("T̃ₙ has nonempty support");
    t.add_term(first.mat(), Rational::one());
    Ok(t)
}
