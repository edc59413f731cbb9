//! Closed trace formulas: Hecke operators with Nebentypus on S_k(N, χ) and on
//! M_k + S_k, Hecke–Atkin–Lehner compositions on S_k(N), the scalar term,
//! per-weight generating series and the Γ₀(4) specialization.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{
    big_pow, divisors, exact_sqrt, gcd, gegenbauer, index_phi1, isqrt, moebius, sigma1,
    sigma1_level,
};
use crate::class_numbers::{h0, hurwitz_h, primed_square_divisors};
use crate::cusp_terms::{phi_chi, phi_ell};
use crate::cyclo::CycloNum;
use crate::dirichlet::DirichletChar;
use crate::error::{check_positive, invalid, Result, TraceError};
use crate::local_counts::{b_coeff, c_coeff, c_trivial, check_exact_divisor};
use crate::par;
use crate::Rational;

/// One trace request: T_n on weight-k forms of level N with character χ,
/// optionally composed with the Atkin–Lehner involution W_ℓ (trivial χ only).
#[derive(Clone, Debug)]
pub struct TraceQuery {
    pub chi: DirichletChar,
    pub weight: u32,
    pub n: u64,
    pub ell: Option<u64>,
}

impl TraceQuery {
    pub fn new(chi: DirichletChar, weight: u32, n: u64) -> Self {
        TraceQuery {
            chi,
            weight,
            n,
            ell: None,
        }
    }

    /// Trivial character of modulus `level`.
    pub fn trivial(level: u64, weight: u32, n: u64) -> Self {
        Self::new(DirichletChar::trivial(level), weight, n)
    }

    /// T_n ∘ W_ℓ on S_k(N) (trivial character).
    pub fn atkin_lehner(level: u64, ell: u64, weight: u32, n: u64) -> Self {
        TraceQuery {
            chi: DirichletChar::trivial(level),
            weight,
            n,
            ell: Some(ell),
        }
    }

    pub fn level(&self) -> u64 {
        self.chi.modulus()
    }

    /// Checks the shape of the query.
    pub fn validate(&self) -> Result<()> {
        if self.weight < 2 {
            return invalid(format!("weight must be at least 2, got {}", self.weight));
        }
        check_positive("n", self.n)?;
        if let Some(ell) = self.ell {
            check_exact_divisor(self.level(), ell)?;
            if !self.chi.is_trivial() {
                return invalid("Atkin–Lehner traces are only defined for the trivial character");
            }
            if self.weight % 2 != 0 {
                return invalid("Atkin–Lehner traces need an even weight");
            }
        }
        Ok(())
    }
}

/// A cusp-space trace with its exact breakdown:
/// `value = elliptic + scalar + cusp + correction`, where `elliptic` is the
/// −½Σ over t² < 4n, `scalar` the t² = 4n slice, `cusp` the −½Σ min(a,d)^{k−1}Φ
/// term and `correction` the weight-2 σ_{1,N}(n) term.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceResult {
    pub value: CycloNum,
    pub elliptic: CycloNum,
    pub scalar: CycloNum,
    pub cusp: CycloNum,
    pub correction: CycloNum,
}

impl TraceResult {
    fn zero() -> Self {
        TraceResult {
            value: CycloNum::zero(),
            elliptic: CycloNum::zero(),
            scalar: CycloNum::zero(),
            cusp: CycloNum::zero(),
            correction: CycloNum::zero(),
        }
    }

    fn assemble(
        elliptic: CycloNum,
        scalar: CycloNum,
        cusp: CycloNum,
        correction: CycloNum,
    ) -> Self {
        let value = &(&(&elliptic + &scalar) + &cusp) + &correction;
        TraceResult {
            value,
            elliptic,
            scalar,
            cusp,
            correction,
        }
    }
}

fn half() -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2))
}

fn minus_half() -> Rational {
    -half()
}

fn rat(x: BigInt) -> Rational {
    Rational::from_integer(x)
}

fn parity_ok(chi: &DirichletChar, k: u32) -> bool {
    chi.parity() == if k % 2 == 0 { 1 } else { -1 }
}

fn weight2_correction(chi: &DirichletChar, k: u32, n: u64) -> CycloNum {
    if k == 2 && chi.is_trivial() {
        CycloNum::from_int(sigma1_level(chi.modulus(), n) as i64)
    } else {
        CycloNum::zero()
    }
}

/// Σ_{u | N, u² | 4n − t²} H((4n − t²)/u²)·C_{N,χ}(u, t, n).
fn h_inner(chi: &DirichletChar, t: i64, n: i64) -> CycloNum {
    let disc = 4 * n - t * t;
    divisors(chi.modulus())
        .into_iter()
        .filter(|&u| disc % (u * u) as i64 == 0)
        .filter_map(|u| {
            let h = hurwitz_h(disc / (u * u) as i64);
            (!h.is_zero()).then(|| c_coeff(chi, u, t, n).scale(&h))
        })
        .sum()
}

/// Σ'_{u² | t² − 4n} h₀((t² − 4n)/u²)·B_{N,χ}((N, u), t, n).
fn h0_inner(chi: &DirichletChar, t: i64, n: i64) -> CycloNum {
    let level = chi.modulus();
    let disc = t * t - 4 * n;
    primed_square_divisors(disc)
        .into_iter()
        .filter_map(|u| {
            let h = if u == 0 { h0(0) } else { h0(disc / (u * u)) };
            let g = gcd(level as i64, u) as u64;
            (!h.is_zero()).then(|| b_coeff(chi, g, t, n).scale(&h))
        })
        .sum()
}

fn p_times(w: u32, t: i64, n: i64, x: CycloNum) -> CycloNum {
    if x.is_zero() {
        return x;
    }
    x.scale(&rat(gegenbauer(w, t, n)))
}

/// Σ_{ad=n} min(a,d)^{k−1}Φ_{N,χ}(a,d).
fn min_phi_sum(chi: &DirichletChar, k: u32, n: u64) -> CycloNum {
    divisors(n)
        .into_iter()
        .map(|a| {
            let d = n / a;
            phi_chi(chi, a as i64, d as i64).scale(&rat(big_pow(a.min(d) as i64, k - 1)))
        })
        .sum()
}

fn integrality_check(chi: &DirichletChar, value: &CycloNum) -> Result<()> {
    if chi.is_trivial() {
        let ok = value.to_rational().is_some_and(|q| q.is_integer());
        if !ok {
            return Err(TraceError::Inconsistency(format!(
                "trace {value} is not a rational integer"
            )));
        }
    }
    Ok(())
}

/// tr(T_n, S_k(N, χ)), evaluating only t ≥ 0: the t and −t terms agree
/// because p_{k−2}(−t, n) = (−1)^k p_{k−2}(t, n) and C(u, −t, n) = χ(−1)C(u, t, n).
/// Atkin–Lehner queries are dispatched to [`trace_atkin_lehner`].
pub fn trace_hecke_cusp(q: &TraceQuery) -> Result<TraceResult> {
    q.validate()?;
    if let Some(ell) = q.ell {
        let value = trace_atkin_lehner(q.level(), ell, q.weight, q.n)?;
        let mut out = TraceResult::zero();
        out.value = CycloNum::from_rational(value);
        return Ok(out);
    }
    let (chi, k) = (&q.chi, q.weight);
    if !parity_ok(chi, k) {
        return Ok(TraceResult::zero());
    }
    let n = q.n as i64;
    let w = k - 2;
    let tmax = isqrt(4 * q.n) as i64;
    let ts: Vec<i64> = (0..=tmax).collect();
    let terms = par::map_ordered(&ts, |&t| {
        let x = p_times(w, t, n, h_inner(chi, t, n));
        if t == 0 {
            x
        } else {
            x.scale(&Rational::from_integer(2.into()))
        }
    });
    let mut elliptic = CycloNum::zero();
    let mut scalar = CycloNum::zero();
    for (t, term) in ts.iter().zip(terms) {
        if t * t == 4 * n {
            scalar = term.scale(&minus_half());
        } else {
            elliptic = elliptic + term;
        }
    }
    let elliptic = elliptic.scale(&minus_half());
    let expected = scalar_term(chi, k, q.n);
    if scalar != expected {
        return Err(TraceError::Inconsistency(format!(
            "t² = 4n slice {scalar} differs from the closed scalar term {expected}"
        )));
    }
    let cusp = min_phi_sum(chi, k, q.n).scale(&minus_half());
    let out = TraceResult::assemble(elliptic, scalar, cusp, weight2_correction(chi, k, q.n));
    integrality_check(chi, &out.value)?;
    Ok(out)
}

/// The same trace with the literal two-sided loop over t² ≤ 4n (reference
/// for the folded evaluation).
pub fn trace_hecke_cusp_two_sided(q: &TraceQuery) -> Result<CycloNum> {
    q.validate()?;
    let (chi, k) = (&q.chi, q.weight);
    if !parity_ok(chi, k) {
        return Ok(CycloNum::zero());
    }
    let n = q.n as i64;
    let tmax = isqrt(4 * q.n) as i64;
    let sum: CycloNum = (-tmax..=tmax)
        .map(|t| p_times(k - 2, t, n, h_inner(chi, t, n)))
        .sum();
    let cusp = min_phi_sum(chi, k, q.n);
    Ok(&(&sum + &cusp).scale(&minus_half()) + &weight2_correction(chi, k, q.n))
}

/// The t² = 4n contribution in closed form: 0 unless n = s², else
/// φ₁(N)/12·(k−1)·s^{k−2}·χ(s).
pub fn scalar_term(chi: &DirichletChar, k: u32, n: u64) -> CycloNum {
    let Some(s) = exact_sqrt(n as i64) else {
        return CycloNum::zero();
    };
    let coef = Rational::new(
        BigInt::from(index_phi1(chi.modulus())) * BigInt::from(k - 1) * big_pow(s, k - 2),
        BigInt::from(12),
    );
    chi.evaluate(s).scale(&coef)
}

/// Largest |t| for which t² − 4n can be a nonnegative square with a
/// factorization n = ad, t = ±(a + d): the full-space sums stop there.
fn full_t_bound(n: u64) -> i64 {
    n as i64 + 1
}

fn full_sum<F>(chi: &DirichletChar, k: u32, n: u64, inner: F) -> CycloNum
where
    F: Fn(&DirichletChar, i64, i64) -> CycloNum + Sync + Send,
{
    let ni = n as i64;
    let ts: Vec<i64> = (0..=full_t_bound(n)).collect();
    let terms = par::map_ordered(&ts, |&t| {
        let x = p_times(k - 2, t, ni, inner(chi, t, ni));
        if t == 0 {
            x
        } else {
            x.scale(&Rational::from_integer(2.into()))
        }
    });
    let sum: CycloNum = terms.into_iter().sum();
    &(-sum) + &weight2_correction(chi, k, n)
}

/// tr(T_n, M_k(N, χ) + S_k(N, χ)) with the extended Hurwitz class numbers.
pub fn trace_hecke_full_h(chi: &DirichletChar, k: u32, n: u64) -> CycloNum {
    if !parity_ok(chi, k) {
        return CycloNum::zero();
    }
    full_sum(chi, k, n, h_inner)
}

/// The same trace with the extended primitive class numbers h₀.
pub fn trace_hecke_full_h0(chi: &DirichletChar, k: u32, n: u64) -> CycloNum {
    if !parity_ok(chi, k) {
        return CycloNum::zero();
    }
    full_sum(chi, k, n, h0_inner)
}

/// tr(T_n, M_k + S_k): both class-number variants, required to agree.
pub fn trace_hecke_full(q: &TraceQuery) -> Result<CycloNum> {
    q.validate()?;
    if q.ell.is_some() {
        return invalid("full-space traces are implemented for Hecke operators only");
    }
    let (a, b) = par::join(
        || trace_hecke_full_h(&q.chi, q.weight, q.n),
        || trace_hecke_full_h0(&q.chi, q.weight, q.n),
    );
    if a != b {
        return Err(TraceError::Inconsistency(format!(
            "H-variant {a} differs from h₀-variant {b}"
        )));
    }
    Ok(a)
}

/// Σ_{u | ℓ, u′ | ℓ′} H((4ℓn − t²)/(uu′)²)·C_{ℓ′}(u′, t, ℓn)·μ(u).
fn al_inner(level: u64, ell: u64, t: i64, m: i64) -> Rational {
    let lp = level / ell;
    let disc = 4 * m - t * t;
    let mut total = Rational::zero();
    for u in divisors(ell) {
        let mu = moebius(u);
        if mu == 0 {
            continue;
        }
        for up in divisors(lp) {
            let sq = ((u * up) * (u * up)) as i64;
            if disc % sq != 0 {
                continue;
            }
            let c = c_trivial(lp, up, t, m);
            if c == 0 {
                continue;
            }
            total += hurwitz_h(disc / sq) * Rational::from_integer((c * mu).into());
        }
    }
    total
}

fn check_al(level: u64, ell: u64, k: u32, n: u64) -> Result<()> {
    TraceQuery::atkin_lehner(level, ell, k, n).validate()
}

/// ℓ^{w/2} for even w = k − 2.
fn ell_power(ell: u64, k: u32) -> BigInt {
    big_pow(ell as i64, (k - 2) / 2)
}

/// tr(T_n ∘ W_ℓ, S_k(N)) for N = ℓℓ′ with (ℓ, ℓ′) = 1, k even, W_ℓ
/// normalized by ℓ^{−w/2}.
pub fn trace_atkin_lehner(level: u64, ell: u64, k: u32, n: u64) -> Result<Rational> {
    check_al(level, ell, k, n)?;
    let m = (ell * n) as i64;
    let w = k - 2;
    let l = ell as i64;
    let tmax = isqrt(4 * ell * n) as i64;
    let mut elliptic = Rational::zero();
    for t in (-tmax..=tmax).filter(|t| t % l == 0) {
        let inner = al_inner(level, ell, t, m);
        if !inner.is_zero() {
            elliptic += rat(gegenbauer(w, t, m)) * inner;
        }
    }
    let mut cusp = Rational::zero();
    for a in divisors(ell * n) {
        let d = ell * n / a;
        let phi = phi_ell(level, ell, a as i64, d as i64)?;
        if !phi.is_zero() {
            cusp += rat(big_pow(a.min(d) as i64, k - 1)) * phi;
        }
    }
    let norm = Rational::new(BigInt::one(), ell_power(ell, k));
    let mut value = (elliptic + cusp) * minus_half() * norm;
    if k == 2 {
        value += Rational::from_integer(sigma1_level(level, n).into());
    }
    Ok(value)
}

/// Unnormalized tr([Δ_nΘ_ℓ], M_k(N) + S_k(N)):
/// −Σ_{ℓ | t} p_w(t, ℓn) Σ_{u,u′} H((4ℓn − t²)/(uu′)²)C_{ℓ′}(u′, t, ℓn)μ(u) + δ_{k,2}σ_{1,N}(n).
pub fn trace_atkin_lehner_full(level: u64, ell: u64, k: u32, n: u64) -> Result<Rational> {
    check_al(level, ell, k, n)?;
    let m = (ell * n) as i64;
    let l = ell as i64;
    let tmax = m + 1;
    let mut total = Rational::zero();
    for t in (-tmax..=tmax).filter(|t| t % l == 0) {
        let inner = al_inner(level, ell, t, m);
        if !inner.is_zero() {
            total += rat(gegenbauer(k - 2, t, m)) * inner;
        }
    }
    let mut value = -total;
    if k == 2 {
        value += Rational::from_integer(sigma1_level(level, n).into());
    }
    Ok(value)
}

/// tr(T_n, M_k + S_k) for k = 2, …, k_max: the per-weight coefficients of the
/// generating-series identity.
pub fn trace_series(chi: &DirichletChar, n: u64, k_max: u32) -> Result<Vec<CycloNum>> {
    if k_max < 2 {
        return invalid("k_max must be at least 2");
    }
    check_positive("n", n)?;
    let weights: Vec<u32> = (2..=k_max).collect();
    par::map_ordered(&weights, |&k| {
        trace_hecke_full(&TraceQuery::new(chi.clone(), k, n))
    })
    .into_iter()
    .collect()
}

/// tr(T_n, S_k(4)) for odd n and even k from the specialized class-number
/// expression −3/2 Σ_{ad=n} min(a,d)^{k−1} − 3 Σ_{s ∈ ℤ, s² ≤ n} p_{k−2}(2s, n)H(n − s²)
/// + δ_{k,2}σ₁(n).
pub fn cohen_gamma04(k: u32, n: u64) -> Result<BigInt> {
    if k < 2 || k % 2 != 0 {
        return invalid(format!("weight must be even and at least 2, got {k}"));
    }
    check_positive("n", n)?;
    if n % 2 == 0 {
        return invalid(format!("n must be odd, got {n}"));
    }
    let ni = n as i64;
    let mut total = Rational::zero();
    for a in divisors(n) {
        total += rat(big_pow(a.min(n / a) as i64, k - 1))
            * Rational::new(BigInt::from(-3), BigInt::from(2));
    }
    let smax = isqrt(n) as i64;
    for s in -smax..=smax {
        total -= rat(gegenbauer(k - 2, 2 * s, ni))
            * hurwitz_h(ni - s * s)
            * Rational::from_integer(3.into());
    }
    if k == 2 {
        total += Rational::from_integer(sigma1(n).into());
    }
    if !total.is_integer() {
        return Err(TraceError::Inconsistency(format!(
            "Γ₀(4) trace {total} is not an integer"
        )));
    }
    Ok(total.to_integer())
}

/// Evaluates a batch of queries, in parallel when the feature is enabled;
/// output order matches input order.
pub fn trace_batch(queries: &[TraceQuery]) -> Vec<Result<TraceResult>> {
    par::map_ordered(queries, trace_hecke_cusp)
}

/// [`trace_batch`] on the calling thread only.
pub fn trace_batch_sequential(queries: &[TraceQuery]) -> Vec<Result<TraceResult>> {
    par::map_sequential(queries, trace_hecke_cusp)
}
