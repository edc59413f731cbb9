//! Local solution counts S_N(u,t,n), the coefficients B and C, the fast
//! prime-power tables for C, and the class weights c_{N,χ}(M), c_{N,ℓ}(M).

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{divisors, factor, gcd, index_phi1, kronecker, moebius, valuation};
use crate::cyclo::CycloNum;
use crate::dirichlet::DirichletChar;
use crate::error::{invalid, Result};
use crate::matrix_forms::IntMat2;
use crate::p1::CosetTable;
use crate::Rational;

/// `true` when the key `(N, u, t, n)` is valid: u | N and u² | t² − 4n.
pub fn key_is_valid(level: u64, u: u64, t: i64, n: i64) -> bool {
    let disc = t as i128 * t as i128 - 4 * n as i128;
    u >= 1 && level % u == 0 && disc % (u as i128 * u as i128) == 0
}

fn solves(alpha: i64, t: i64, n: i64, modulus: i128) -> bool {
    let a = alpha as i128;
    (a * a - t as i128 * a + n as i128).rem_euclid(modulus) == 0
}

/// |{α mod p^a, p ∤ α : α² − tα + n ≡ 0 (mod p^{a+i})}|.
fn local_count(p: u64, a: u32, i: u32, t: i64, n: i64) -> u64 {
    let pa = p.pow(a) as i64;
    let modulus = pa as i128 * p.pow(i) as i128;
    let count = (0..pa)
        .filter(|&x| x as u64 % p != 0 && solves(x, t, n, modulus))
        .inspect(|&x| {
            // The condition only depends on α modulo p^a (given u² | t² − 4n).
            debug_assert!(
                solves(x + pa, t, n, modulus),
                "S_N is not well defined at α={x}"
            );
        })
        .count();
    count as u64
}

/// |S_N(u, t, n)|, computed prime by prime; 0 on invalid keys.
pub fn count_s(level: u64, u: u64, t: i64, n: i64) -> u64 {
    if !key_is_valid(level, u, t, n) {
        return 0;
    }
    factor(level)
        .0
        .iter()
        .map(|&(p, a)| local_count(p, a, valuation(p, u), t, n))
        .product()
}

pub fn count_s_plain(level: u64, t: i64, n: i64) -> u64 {
    count_s(level, 1, t, n)
}

/// |S_N(u, t, n)| by enumerating α modulo N directly.
pub fn count_s_direct(level: u64, u: u64, t: i64, n: i64) -> u64 {
    if !key_is_valid(level, u, t, n) {
        return 0;
    }
    let modulus = level as i128 * u as i128;
    (0..level as i64)
        .filter(|&x| gcd(x, level as i64) == 1 && solves(x, t, n, modulus))
        .count() as u64
}

fn index_ratio(level: u64, u: u64) -> Rational {
    Rational::new(
        BigInt::from(index_phi1(level)),
        BigInt::from(index_phi1(level / u)),
    )
}

/// B_{N,χ}(u, t, n) = (φ₁(N)/φ₁(N/u))·Σ_{α ∈ S_N(u,t,n)} χ(α).
pub fn b_coeff(chi: &DirichletChar, u: u64, t: i64, n: i64) -> CycloNum {
    let level = chi.modulus();
    if !key_is_valid(level, u, t, n) {
        return CycloNum::zero();
    }
    let ratio = index_ratio(level, u);
    if chi.is_trivial() {
        return CycloNum::from_rational(
            ratio * Rational::from_integer(count_s(level, u, t, n).into()),
        );
    }
    let modulus = level as i128 * u as i128;
    let mut counts = vec![0i64; chi.order() as usize];
    for x in 0..level as i64 {
        if let Some(e) = chi.exponent(x) {
            if solves(x, t, n, modulus) {
                counts[e as usize] += 1;
            }
        }
    }
    let coeffs = counts
        .into_iter()
        .map(|c| Rational::from_integer(c.into()) * &ratio)
        .collect();
    CycloNum::from_coeffs(chi.order() as u32, coeffs)
}

/// C_{N,χ}(u, t, n) = Σ_{d | u} B(u/d, t, n)·μ(d); 0 when u ∤ N.
pub fn c_coeff(chi: &DirichletChar, u: u64, t: i64, n: i64) -> CycloNum {
    if u == 0 || chi.modulus() % u != 0 {
        return CycloNum::zero();
    }
    divisors(u)
        .into_iter()
        .filter_map(|d| {
            let mu = moebius(d);
            (mu != 0).then(|| b_coeff(chi, u / d, t, n).scale(&Rational::from_integer(mu.into())))
        })
        .sum()
}

/// Trivial-character C_N(u, t, n) as an integer (the form used by the
/// Atkin–Lehner formulas).
pub fn c_trivial(level: u64, u: u64, t: i64, n: i64) -> i64 {
    if u == 0 || level % u != 0 {
        return 0;
    }
    let mut total = Rational::zero();
    for d in divisors(u) {
        let mu = moebius(d);
        if mu != 0 && key_is_valid(level, u / d, t, n) {
            total += index_ratio(level, u / d)
                * Rational::from_integer((mu * count_s(level, u / d, t, n) as i64).into());
        }
    }
    assert!(total.is_integer());
    i64::try_from(total.to_integer()).expect("C_N fits in i64")
}

fn ceil_half(i: u32) -> u32 {
    i.div_ceil(2)
}

/// C_N(u, D) from the prime-power tables; multiplicative in (N, u).
/// Returns 0 unless u | N and u² | D.
pub fn c_fast(level: u64, u: u64, disc: i64) -> i64 {
    if u == 0 || level % u != 0 || disc as i128 % (u as i128 * u as i128) != 0 {
        return 0;
    }
    factor(level)
        .0
        .iter()
        .map(|&(p, a)| c_fast_local(p, a, valuation(p, u), disc))
        .product()
}

fn c_fast_local(p: u64, a: u32, i: u32, disc: i64) -> i64 {
    let p = p as i64;
    if i == 0 {
        return 1;
    }
    if i == a {
        return p.pow(ceil_half(a));
    }
    // b = ∞ when D = 0: every "i ≤ b − a" condition holds and no equality does.
    let (b, unit) = if disc == 0 {
        (None, 0)
    } else {
        let b = valuation(p as u64, disc.unsigned_abs());
        (Some(b as i64), disc / p.pow(b))
    };
    let (i_, a_) = (i as i64, a as i64);
    let same_parity = (i_ - a_) % 2 == 0;
    let le = |k: i64| b.is_none_or(|b| i_ <= b - a_ - k);
    let eq = |k: i64| b.is_some_and(|b| i_ == b - a_ + k);
    let ch = ceil_half(i);
    if p != 2 {
        if le(0) && same_parity {
            p.pow(ch) - p.pow(ch - 1)
        } else if eq(1) && same_parity {
            -p.pow(ch - 1)
        } else if eq(1) && !same_parity {
            p.pow(i / 2) * kronecker(unit, p)
        } else {
            0
        }
    } else if le(2) && same_parity {
        2i64.pow(ch - 1)
    } else if eq(-1) && same_parity {
        -(2i64.pow(ch - 1))
    } else if eq(0) && same_parity {
        2i64.pow(ch - 1) * crate::arith::eps4(unit)
    } else if eq(1) && !same_parity && unit.rem_euclid(4) == 1 {
        2i64.pow(i / 2) * kronecker(unit, 2)
    } else {
        0
    }
}

/// The double cosets Σ ⊂ M_{det} handled by the class weights and the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sigma {
    /// Δ_n = {N | c, (a, N) = 1, det = n}, with χ̃(σ) = χ(a).
    Hecke { n: u64 },
    /// Δ_nΘ_ℓ = {det = ℓn, N | c, ℓ | tr, ℓ | a, (a, ℓ′) = 1, (b, ℓ) = 1}, with χ̃ = 1.
    AtkinLehner { n: u64, ell: u64 },
}

impl Sigma {
    pub fn det(&self) -> i64 {
        match *self {
            Sigma::Hecke { n } => n as i64,
            Sigma::AtkinLehner { n, ell } => (n * ell) as i64,
        }
    }

    pub fn n(&self) -> u64 {
        match *self {
            Sigma::Hecke { n } | Sigma::AtkinLehner { n, .. } => n,
        }
    }

    /// Checks the shape of Σ at level N.
    pub fn validate(&self, level: u64) -> Result<()> {
        if self.n() == 0 {
            return invalid("n must be positive");
        }
        if let Sigma::AtkinLehner { ell, .. } = *self {
            check_exact_divisor(level, ell)?;
        }
        Ok(())
    }

    /// Membership of an integral matrix of the right determinant.
    pub fn contains(&self, level: u64, m: &IntMat2) -> bool {
        let nl = level as i64;
        if m.det() != self.det() || m.c % nl != 0 {
            return false;
        }
        match *self {
            Sigma::Hecke { .. } => gcd(m.a, nl) == 1,
            Sigma::AtkinLehner { ell, .. } => {
                let (l, lp) = (ell as i64, nl / ell as i64);
                m.trace() % l == 0 && m.a % l == 0 && gcd(m.a, lp) == 1 && gcd(m.b, l) == 1
            }
        }
    }

    /// The exponent e with χ̃(σ) = ζ^e (in the character's order), for σ ∈ Σ.
    pub fn chi_tilde_exponent(&self, chi: &DirichletChar, m: &IntMat2) -> u64 {
        match self {
            Sigma::Hecke { .. } => chi
                .exponent(m.a)
                .expect("a-entry of an element of Δ_n is a unit"),
            Sigma::AtkinLehner { .. } => 0,
        }
    }
}

/// Ensures ℓ is an exact divisor of N (ℓ | N and gcd(ℓ, N/ℓ) = 1).
pub fn check_exact_divisor(level: u64, ell: u64) -> Result<()> {
    if ell == 0 || level % ell != 0 || gcd(ell as i64, (level / ell) as i64) != 1 {
        return invalid(format!("{ell} is not an exact divisor of {level}"));
    }
    Ok(())
}

/// c_{N,χ}(M) by the coset sum Σ_{A : AMA⁻¹ ∈ Δ_n} χ(a_{AMA⁻¹}).
pub fn c_class_direct(chi: &DirichletChar, table: &CosetTable, m: &IntMat2) -> CycloNum {
    let sigma = Sigma::Hecke { n: m.det() as u64 };
    let level = chi.modulus();
    let mut counts = vec![0i64; chi.order() as usize];
    for a in table.lifts() {
        let x = *a * *m * a.adjugate();
        if sigma.contains(level, &x) {
            counts[sigma.chi_tilde_exponent(chi, &x) as usize] += 1;
        }
    }
    CycloNum::from_coeffs(
        chi.order() as u32,
        counts
            .into_iter()
            .map(|c| Rational::from_integer(c.into()))
            .collect(),
    )
}

/// c_{N,χ}(M) = B_{N,χ}((G_M, N), tr M, det M).
pub fn c_class(chi: &DirichletChar, m: &IntMat2) -> CycloNum {
    let level = chi.modulus();
    let u = gcd(m.content(), level as i64) as u64;
    b_coeff(chi, u, m.trace(), m.det())
}

/// c_{N,ℓ}(M) = |{A : AMA⁻¹ ∈ Δ_nΘ_ℓ}| by coset enumeration.
pub fn c_atkin_direct(level: u64, ell: u64, table: &CosetTable, m: &IntMat2) -> Result<i64> {
    check_exact_divisor(level, ell)?;
    let det = m.det() as u64;
    if det % ell != 0 {
        return invalid("det(M) must be divisible by ℓ");
    }
    let sigma = Sigma::AtkinLehner { n: det / ell, ell };
    Ok(table
        .lifts()
        .iter()
        .filter(|a| sigma.contains(level, &(**a * *m * a.adjugate())))
        .count() as i64)
}

/// c_{N,ℓ}(M) in closed form: 0 unless ℓ | t, else
/// Σ_{u | (ℓ,G), u′ | (ℓ′,G)} C_{ℓ′}(u′, t, det M)·μ(u).
pub fn c_atkin(level: u64, ell: u64, m: &IntMat2) -> Result<i64> {
    check_exact_divisor(level, ell)?;
    let det = m.det();
    if det as u64 % ell != 0 {
        return invalid("det(M) must be divisible by ℓ");
    }
    let t = m.trace();
    if t % ell as i64 != 0 {
        return Ok(0);
    }
    let lp = level / ell;
    let g = m.content();
    let gl = gcd(ell as i64, g) as u64;
    let glp = gcd(lp as i64, g) as u64;
    let mu_sum: i64 = divisors(gl).into_iter().map(moebius).sum();
    let c_sum: i64 = divisors(glp)
        .into_iter()
        .map(|up| c_trivial(lp, up, t, det))
        .sum();
    Ok(mu_sum * c_sum)
}
