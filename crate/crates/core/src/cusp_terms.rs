//! Cusp sums Φ for Γ₀(N): closed forms for Δ_n with Nebentypus and for
//! Δ_nΘ_ℓ, a direct double-coset enumeration oracle, and the Eisenstein and
//! coboundary traces built from them.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{big_pow, crt_solve, divisors, euler_phi, ext_gcd, gcd, sigma1_level};
use crate::cyclo::CycloNum;
use crate::dirichlet::DirichletChar;
use crate::error::Result;
use crate::local_counts::{check_exact_divisor, Sigma};
use crate::matrix_forms::{IntMat2, IDENTITY};
use crate::Rational;

/// A representative C = (p *; r q) ∈ Γ₁ of a cusp of Γ₀(N).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CuspRep {
    pub matrix: IntMat2,
    pub r: u64,
    pub s: u64,
    pub width: u64,
    /// Membership in R(Γ, χ): c(χ) | N/(r, s).
    pub admissible: bool,
}

/// Representatives of Γ₀(N)\Γ₁/Γ₁∞: for each r | N the φ((r, s)) bottom rows
/// (r, q) with q running over the units modulo (r, s).
pub fn cusp_reps(chi: &DirichletChar) -> Vec<CuspRep> {
    let level = chi.modulus();
    let mut out = Vec::new();
    for r in divisors(level) {
        let s = level / r;
        let g = gcd(r as i64, s as i64);
        let width = s / g as u64;
        let admissible = (level / g as u64) % chi.conductor() == 0;
        if r == level {
            out.push(CuspRep {
                matrix: IDENTITY,
                r,
                s,
                width,
                admissible,
            });
            continue;
        }
        for q0 in (0..g).filter(|&q| gcd(q, g) == 1) {
            let q = (0..)
                .map(|j| q0 + j * g)
                .find(|&q| gcd(q, r as i64) == 1)
                .unwrap();
            let (_, p, x) = ext_gcd(q, -(r as i64));
            let matrix = IntMat2::raw(p, x, r as i64, q);
            debug_assert_eq!(matrix.det(), 1);
            out.push(CuspRep {
                matrix,
                r,
                s,
                width,
                admissible,
            });
        }
    }
    out
}

/// Φ_{N,χ}(a, d) = Σ_{N=rs, (r,s) | (N/c(χ), a−d)} φ((r,s))·χ(α), where
/// α ≡ a (mod r), α ≡ d (mod s), and χ is read modulo N/(r,s).
pub fn phi_chi(chi: &DirichletChar, a: i64, d: i64) -> CycloNum {
    let level = chi.modulus();
    let bound = gcd((level / chi.conductor()) as i64, a - d);
    let mut total = CycloNum::zero();
    for r in divisors(level) {
        let s = level / r;
        let g = gcd(r as i64, s as i64);
        if bound % g != 0 {
            continue;
        }
        let (alpha, m0) =
            crt_solve(&[(a, r as i64), (d, s as i64)]).expect("consistent since (r,s) | a−d");
        let value = chi.evaluate_mod(m0 as u64, alpha);
        total = total + value.scale(&Rational::from_integer(euler_phi(g as u64).into()));
    }
    total
}

/// Φ_{N,ℓ}(a, d): zero unless ℓ | a + d, else
/// (φ(ℓ)/ℓ)·Σ_{ℓ′=rs, (r,s) | a−d, (r,a) = 1, (s,d) = 1} φ((r,s)).
pub fn phi_ell(level: u64, ell: u64, a: i64, d: i64) -> Result<Rational> {
    check_exact_divisor(level, ell)?;
    if (a + d) % ell as i64 != 0 {
        return Ok(Rational::zero());
    }
    let lp = level / ell;
    let mut sum = 0u64;
    for r in divisors(lp) {
        let s = lp / r;
        let g = gcd(r as i64, s as i64);
        if (a - d) % g == 0 && gcd(r as i64, a) == 1 && gcd(s as i64, d) == 1 {
            sum += euler_phi(g as u64);
        }
    }
    Ok(Rational::new(
        BigInt::from(euler_phi(ell) * sum),
        BigInt::from(ell),
    ))
}

/// Φ by direct enumeration: (1/(a,d))·Σ_{C admissible} Σ_{b mod ω(C)·(a,d)}
/// (±1)^w χ̃(±C M_b C⁻¹) over those b with ±C M_b C⁻¹ ∈ Σ, M_b = (a b; 0 d).
pub fn phi_generic(chi: &DirichletChar, sigma: Sigma, w: u32, a: i64, d: i64) -> CycloNum {
    let level = chi.modulus();
    let g = gcd(a, d);
    let order = chi.order() as usize;
    let mut counts = vec![0i64; order];
    for cusp in cusp_reps(chi).into_iter().filter(|c| c.admissible) {
        let c = cusp.matrix;
        let cinv = c.adjugate();
        for b in 0..cusp.width as i64 * g {
            let x = c * IntMat2::raw(a, b, 0, d) * cinv;
            if sigma.contains(level, &x) {
                counts[sigma.chi_tilde_exponent(chi, &x) as usize] += 1;
            } else if sigma.contains(level, &x.neg()) {
                let e = sigma.chi_tilde_exponent(chi, &x.neg()) as usize;
                counts[e] += if w % 2 == 0 { 1 } else { -1 };
            }
        }
    }
    let coeffs = counts
        .into_iter()
        .map(|k| Rational::new(k.into(), g.into()))
        .collect();
    CycloNum::from_coeffs(order as u32, coeffs)
}

/// Whether the cusp C is in R(Γ, χ), decided from the definition: χ is
/// trivial on the generator ±C T^ω C⁻¹ of the stabilizer (with the sign
/// twist (−1)^w, which is χ(−1) under the parity hypothesis).
pub fn admissible_by_stabilizer(chi: &DirichletChar, cusp: &CuspRep) -> bool {
    let level = chi.modulus() as i64;
    let x = cusp.matrix * IntMat2::raw(1, cusp.width as i64, 0, 1) * cusp.matrix.adjugate();
    debug_assert_eq!(x.c % level, 0);
    chi.exponent(x.d) == Some(0)
}

fn parity_ok(chi: &DirichletChar, k: u32) -> bool {
    chi.parity() == if k % 2 == 0 { 1 } else { -1 }
}

fn weighted_phi_sum(chi: &DirichletChar, k: u32, n: u64, use_a: bool) -> CycloNum {
    let mut total = CycloNum::zero();
    for a in divisors(n) {
        let d = n / a;
        let base = if use_a { a } else { d };
        let coef = Rational::from_integer(big_pow(base as i64, k - 1));
        total = total + phi_chi(chi, a as i64, d as i64).scale(&coef);
    }
    total
}

fn k2_correction(chi: &DirichletChar, k: u32, n: u64) -> Rational {
    if k == 2 && chi.is_trivial() {
        Rational::from_integer(sigma1_level(chi.modulus(), n).into())
    } else {
        Rational::zero()
    }
}

/// tr(T_n, E_k(N, χ)) = Σ_{ad=n} a^{k−1}Φ_{N,χ}(a,d) − δ_{k,2}δ_{χ,1}σ_{1,N}(n).
pub fn eisenstein_trace(chi: &DirichletChar, k: u32, n: u64) -> CycloNum {
    if !parity_ok(chi, k) {
        return CycloNum::zero();
    }
    weighted_phi_sum(chi, k, n, true) - CycloNum::from_rational(k2_correction(chi, k, n))
}

/// The same trace assembled with d^{k−1} (coboundary side).
pub fn coboundary_trace(chi: &DirichletChar, k: u32, n: u64) -> CycloNum {
    if !parity_ok(chi, k) {
        return CycloNum::zero();
    }
    weighted_phi_sum(chi, k, n, false) - CycloNum::from_rational(k2_correction(chi, k, n))
}

fn ell_sum(level: u64, ell: u64, k: u32, n: u64, use_a: bool) -> Result<Rational> {
    check_exact_divisor(level, ell)?;
    let m = n * ell;
    let mut total = Rational::zero();
    for a in divisors(m) {
        let d = m / a;
        let base = if use_a { a } else { d };
        total += Rational::from_integer(big_pow(base as i64, k - 1))
            * phi_ell(level, ell, a as i64, d as i64)?;
    }
    if k == 2 {
        total -= Rational::from_integer(sigma1_level(level, n).into());
    }
    Ok(total)
}

/// tr([Δ_nΘ_ℓ], E_k(N)) = Σ_{ad=nℓ} a^{k−1}Φ_{N,ℓ}(a,d) − δ_{k,2}σ_{1,N}(n)
/// (without the ℓ^{−w/2} normalization of W_ℓ).
pub fn eisenstein_trace_ell(level: u64, ell: u64, k: u32, n: u64) -> Result<Rational> {
    ell_sum(level, ell, k, n, true)
}

/// The d^{k−1} version of [`eisenstein_trace_ell`].
pub fn coboundary_trace_ell(level: u64, ell: u64, k: u32, n: u64) -> Result<Rational> {
    ell_sum(level, ell, k, n, false)
}

/// Number of cusps Σ_{N=rs} φ((r,s)).
pub fn cusp_count(level: u64) -> u64 {
    divisors(level)
        .into_iter()
        .map(|r| euler_phi(gcd(r as i64, (level / r) as i64) as u64))
        .sum()
}
