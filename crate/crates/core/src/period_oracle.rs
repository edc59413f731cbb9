//! Independent verification by exact linear algebra on period polynomials.
//!
//! The induced module V = V_w^{Γ,χ} for Γ = Γ₀(N) consists of functions
//! P: Γ₁ → V_w (polynomials of degree ≤ w) with P(−A) = (−1)^w P(A) and
//! P(γA) = χ(γ)P(A), where χ(γ) = χ(d_γ). It is coordinatized by the values
//! P(A_i) on the lifts A_i of the points of P¹(ℤ/N), each written in the
//! monomial basis 1, X, …, X^w. Matrices act on coordinate columns, so for
//! right actions the matrix of P ↦ (P|g)|h is A_h·A_g.
//!
//! The period space W = Ker(1+S) ∩ Ker(1+U+U²) carries the action of the
//! universal operator T̃_n; its trace there equals the trace of the Hecke (or
//! Atkin–Lehner) operator on M_k ⊕ S_k, which makes this module an oracle for
//! the closed-form trace formulas.

mod matrix;

pub use matrix::{ExactMatrix, Kernel, Scalar};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::cyclo::CycloNum;
use crate::dirichlet::DirichletChar;
use crate::error::{invalid, Result};
use crate::hecke_operator::{build_tn, build_tn_infty, Construction, GroupRingElem};
use crate::local_counts::Sigma;
use crate::matrix_forms::{IntMat2, S_MAT, T_MAT, U2_MAT, U_MAT};
use crate::p1::CosetTable;
use crate::par;
use crate::Rational;

/// The module V_w^{Γ₀(N),χ} over the scalar field F.
#[derive(Clone, Debug)]
pub struct PeriodModule<F> {
    chi: DirichletChar,
    weight: u32,
    table: CosetTable,
    /// False when χ(−1) ≠ (−1)^w, in which case V = 0.
    nonzero: bool,
    _field: std::marker::PhantomData<F>,
}

/// For each target coset i, the source coset j and scalar s with
/// (P|M)(A_i) = s·P(A_j)|_{−w}M, or `None` when the block row vanishes.
type BlockMap<F> = Vec<Option<(usize, F)>>;

impl<F: Scalar> PeriodModule<F> {
    pub fn new(chi: &DirichletChar, weight: u32) -> Self {
        let sign = if weight % 2 == 0 { 1 } else { -1 };
        PeriodModule {
            chi: chi.clone(),
            weight,
            table: CosetTable::new(chi.modulus()),
            nonzero: chi.parity() == sign,
            _field: std::marker::PhantomData,
        }
    }

    pub fn level(&self) -> u64 {
        self.chi.modulus()
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn character(&self) -> &DirichletChar {
        &self.chi
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    fn blocks(&self) -> usize {
        if self.nonzero {
            self.table.len()
        } else {
            0
        }
    }

    fn block_size(&self) -> usize {
        self.weight as usize + 1
    }

    /// dim V = (w+1)·φ₁(N), or 0 when the parity condition fails.
    pub fn dim(&self) -> usize {
        self.blocks() * self.block_size()
    }

    fn chi_value(&self, x: i64) -> F {
        let e = self
            .chi
            .exponent(x)
            .expect("character evaluated at a non-unit");
        F::root_of_unity(self.chi.order(), e)
    }

    /// The integer matrix of P ↦ P|_{−w}M on V_w, row-major: column j holds
    /// the coefficients of (aX+b)^j (cX+d)^{w−j}.
    fn slash_integral(&self, m: &IntMat2) -> Vec<BigInt> {
        let w = self.weight as usize;
        let powers = |x: i64, y: i64| {
            // (xX + y)^e for e = 0..=w, as coefficient vectors.
            let mut out = vec![vec![BigInt::from(1)]];
            for e in 1..=w {
                let prev = &out[e - 1];
                let mut next = vec![BigInt::zero(); e + 1];
                for (i, c) in prev.iter().enumerate() {
                    next[i] += c * y;
                    next[i + 1] += c * x;
                }
                out.push(next);
            }
            out
        };
        let top = powers(m.a, m.b);
        let bottom = powers(m.c, m.d);
        let mut out = vec![BigInt::zero(); (w + 1) * (w + 1)];
        for j in 0..=w {
            let (p, q) = (&top[j], &bottom[w - j]);
            for (r, x) in p.iter().enumerate() {
                for (s, y) in q.iter().enumerate() {
                    out[(r + s) * (w + 1) + j] += x * y;
                }
            }
        }
        out
    }

    /// The matrix of P ↦ P|_{−w}M on V_w.
    pub fn slash_matrix(&self, m: &IntMat2) -> ExactMatrix<F> {
        let b = self.block_size();
        let ints = self.slash_integral(m);
        ExactMatrix::from_fn(b, b, |r, c| {
            F::from_rational(Rational::from_integer(ints[r * b + c].clone()))
        })
    }

    fn expand(&self, map: &BlockMap<F>, slash: &ExactMatrix<F>) -> ExactMatrix<F> {
        let mut out = ExactMatrix::zeros(self.dim(), self.dim());
        let b = self.block_size();
        for (i, entry) in map.iter().enumerate() {
            if let Some((j, f)) = entry {
                for r in 0..b {
                    for c in 0..b {
                        let x = slash.get(r, c);
                        if !x.is_zero() {
                            out.add_at(i * b + r, j * b + c, &x.times(f));
                        }
                    }
                }
            }
        }
        out
    }

    fn gamma_blocks(&self, g: &IntMat2) -> BlockMap<F> {
        let ginv = g.adjugate();
        (0..self.blocks())
            .map(|i| {
                // A_i g⁻¹ = γ A_j with χ(γ) = χ(λ).
                let x = self.table.lift(i) * ginv;
                let (j, lambda) = self.table.locate(x.c, x.d);
                Some((j, self.chi_value(lambda)))
            })
            .collect()
    }

    /// The matrix of P ↦ P|g for g ∈ SL₂(ℤ):
    /// (P|g)(A) = P(Ag⁻¹)|_{−w}g.
    pub fn act_gamma(&self, g: &IntMat2) -> Result<ExactMatrix<F>> {
        if g.det() != 1 {
            return invalid(format!("{g} is not in SL2(Z)"));
        }
        Ok(self.expand(&self.gamma_blocks(g), &self.slash_matrix(g)))
    }

    /// Some lift A_j with ±A_j·X ∈ Σ, as (j, e, ±1) where χ̃(±A_j·X) = ζ^e
    /// and the sign is the (±1)^w of P(−A) = (−1)^w P(A). The coset Γ₀(N)A_j
    /// is unique when it exists.
    fn reach(&self, sigma: Sigma, x: &IntMat2) -> Option<(usize, u64, i64)> {
        let level = self.level();
        let odd = self.weight % 2 == 1;
        for (j, a) in self.table.lifts().iter().enumerate() {
            let y = *a * *x;
            if sigma.contains(level, &y) {
                return Some((j, sigma.chi_tilde_exponent(&self.chi, &y), 1));
            }
            let y = y.neg();
            if sigma.contains(level, &y) {
                let sign = if odd { -1 } else { 1 };
                return Some((j, sigma.chi_tilde_exponent(&self.chi, &y), sign));
            }
        }
        None
    }

    fn reach_sigma(&self, sigma: Sigma, x: &IntMat2) -> Option<(usize, F)> {
        self.reach(sigma, x).map(|(j, e, sign)| {
            (
                j,
                F::root_of_unity(self.chi.order(), e).times(&F::from_int(sign)),
            )
        })
    }

    fn sigma_blocks(&self, sigma: Sigma, m: &IntMat2) -> BlockMap<F> {
        (0..self.blocks())
            .map(|i| self.reach_sigma(sigma, &(*m * self.table.lift(i).adjugate())))
            .collect()
    }

    fn check_sigma(&self, sigma: Sigma, m: &IntMat2) -> Result<()> {
        sigma.validate(self.level())?;
        if let Sigma::AtkinLehner { .. } = sigma {
            if !self.chi.is_trivial() {
                return invalid("the Atkin-Lehner double coset needs the trivial character");
            }
        }
        if m.det() != sigma.det() {
            return invalid(format!("det {m} differs from det Σ = {}", sigma.det()));
        }
        Ok(())
    }

    /// The matrix of P ↦ P|_Σ M: (P|_Σ M)(A) = χ̃(M_A)·P(A_M)|_{−w}M when
    /// MA⁻¹ = A_M⁻¹M_A with A_M ∈ Γ₁, M_A ∈ Σ, and 0 when MA⁻¹ ∉ Γ₁Σ.
    pub fn act_sigma(&self, sigma: Sigma, m: &IntMat2) -> Result<ExactMatrix<F>> {
        self.check_sigma(sigma, m)?;
        Ok(self.expand(&self.sigma_blocks(sigma, m), &self.slash_matrix(m)))
    }

    /// The matrix of P ↦ P|_Σ x for an element x of the group ring,
    /// assembled block row by block row. Within a block row the integer
    /// slash matrices are summed per (source block, value of χ̃) before
    /// anything is converted to the field.
    pub fn act_element(&self, sigma: Sigma, x: &GroupRingElem) -> Result<ExactMatrix<F>> {
        sigma.validate(self.level())?;
        if x.det() != sigma.det() {
            return invalid("group ring element and Σ have different determinants");
        }
        let entries = x.entries_sorted();
        for (m, _) in &entries {
            self.check_sigma(sigma, m)?;
        }
        let den = entries
            .iter()
            .fold(BigInt::from(1), |acc, (_, c)| acc.lcm(c.denom()));
        let terms: Vec<(IntMat2, BigInt)> = entries
            .into_iter()
            .map(|(m, c)| (m, c.numer() * (&den / c.denom())))
            .collect();
        let slashes = par::map_ordered(&terms, |(m, _)| self.slash_integral(m));
        let b = self.block_size();
        let order = self.chi.order();
        let rows: Vec<usize> = (0..self.blocks()).collect();
        let block_rows = par::map_ordered(&rows, |&i| {
            let inv = self.table.lift(i).adjugate();
            let mut acc: BTreeMap<(usize, u64), Vec<BigInt>> = BTreeMap::new();
            for ((m, c), slash) in terms.iter().zip(&slashes) {
                if let Some((j, e, sign)) = self.reach(sigma, &(*m * inv)) {
                    let f = c * sign;
                    let sum = acc
                        .entry((j, e))
                        .or_insert_with(|| vec![BigInt::zero(); b * b]);
                    for (s, v) in sum.iter_mut().zip(slash) {
                        if !v.is_zero() {
                            *s += v * &f;
                        }
                    }
                }
            }
            let mut row = ExactMatrix::zeros(b, self.dim());
            for ((j, e), sum) in acc {
                let root = F::root_of_unity(order, e);
                for (k, v) in sum.into_iter().enumerate() {
                    if !v.is_zero() {
                        let q = F::from_rational(Rational::new(v, den.clone()));
                        row.add_at(k / b, j * b + k % b, &q.times(&root));
                    }
                }
            }
            row
        });
        let parts: Vec<&ExactMatrix<F>> = block_rows.iter().collect();
        Ok(if parts.is_empty() {
            ExactMatrix::zeros(0, 0)
        } else {
            ExactMatrix::vstack(&parts)
        })
    }

    /// tr(V|_Σ x) from the diagonal blocks only.
    pub fn trace_on_v(&self, sigma: Sigma, x: &GroupRingElem) -> Result<F> {
        sigma.validate(self.level())?;
        let mut total = F::zero();
        for (m, c) in x.entries_sorted() {
            self.check_sigma(sigma, &m)?;
            let map = self.sigma_blocks(sigma, &m);
            let diag = map
                .iter()
                .enumerate()
                .filter_map(|(i, e)| e.as_ref().filter(|(j, _)| *j == i).map(|(_, s)| s))
                .fold(F::zero(), |acc, s| acc.plus(s));
            if !diag.is_zero() {
                let t = self.slash_matrix(&m).trace();
                total = total.plus(&diag.times(&t).times(&F::from_rational(c)));
            }
        }
        Ok(total)
    }

    fn one_plus(&self, mats: &[IntMat2]) -> Result<ExactMatrix<F>> {
        let mut acc = ExactMatrix::identity(self.dim());
        for g in mats {
            acc = acc.add(&self.act_gamma(g)?);
        }
        Ok(acc)
    }

    /// Ker(1+S).
    pub fn kernel_s(&self) -> Result<Kernel<F>> {
        self.one_plus(&[S_MAT])?.kernel()
    }

    /// Ker(1+U+U²).
    pub fn kernel_u(&self) -> Result<Kernel<F>> {
        self.one_plus(&[U_MAT, U2_MAT])?.kernel()
    }

    /// W = Ker(1+S) ∩ Ker(1+U+U²).
    pub fn period_space(&self) -> Result<Kernel<F>> {
        let s = self.one_plus(&[S_MAT])?;
        let u = self.one_plus(&[U_MAT, U2_MAT])?;
        ExactMatrix::vstack(&[&s, &u]).kernel()
    }

    /// D = Ker(1−T).
    pub fn coboundary_space(&self) -> Result<Kernel<F>> {
        ExactMatrix::identity(self.dim())
            .sub(&self.act_gamma(&T_MAT)?)
            .kernel()
    }

    /// Σ χ̃(M_A) over the upper-triangular M ∈ supp x with M ∈ Γ₁Σ.
    pub fn reachable_sum(&self, sigma: Sigma, x: &GroupRingElem) -> F {
        x.entries_sorted()
            .iter()
            .filter_map(|(m, _)| self.reach_sigma(sigma, m).map(|(_, s)| s))
            .fold(F::zero(), |acc, s| acc.plus(&s))
    }

    /// Whether (w, χ) is the degenerate case (k, χ) = (2, trivial).
    pub fn is_degenerate(&self) -> bool {
        self.weight == 0 && self.chi.is_trivial()
    }
}

/// A period module with its spaces W and D computed once, answering trace
/// queries for many double cosets.
#[derive(Clone, Debug)]
pub struct OracleState<F> {
    pub module: PeriodModule<F>,
    pub period: Kernel<F>,
    pub coboundary: Kernel<F>,
}

impl<F: Scalar> OracleState<F> {
    pub fn new(chi: &DirichletChar, weight: u32) -> Result<Self> {
        let module = PeriodModule::new(chi, weight);
        let (period, coboundary) =
            par::join(|| module.period_space(), || module.coboundary_space());
        Ok(OracleState {
            period: period?,
            coboundary: coboundary?,
            module,
        })
    }

    /// tr(W|_Σ T̃) for the universal operator of determinant det Σ.
    pub fn trace_on_w(&self, sigma: Sigma) -> Result<F> {
        let t = build_tn(sigma.det() as u64, Construction::FundamentalDomain);
        self.trace_on_w_with(sigma, &t)
    }

    /// tr(W|_Σ T̃) for a caller-supplied T̃; fails if W is not preserved.
    pub fn trace_on_w_with(&self, sigma: Sigma, t: &GroupRingElem) -> Result<F> {
        let op = self.module.act_element(sigma, t)?;
        self.period.restricted_trace(&op)
    }

    /// tr(D|_Σ T^∞), less Σ χ̃ over the reachable upper-triangular matrices
    /// in the degenerate case, where the coboundaries are D modulo constants.
    pub fn trace_coboundary(&self, sigma: Sigma) -> Result<F> {
        let t = build_tn_infty(sigma.det() as u64);
        let op = self.module.act_element(sigma, &t)?;
        let tr = self.coboundary.restricted_trace(&op)?;
        Ok(if self.module.is_degenerate() {
            tr.minus(&self.module.reachable_sum(sigma, &t))
        } else {
            tr
        })
    }
}

/// Field-erased [`OracleState`]: exact rationals when χ takes values ±1,
/// cyclotomic numbers otherwise.
#[derive(Clone, Debug)]
pub enum PeriodOracle {
    Rational(OracleState<Rational>),
    Cyclotomic(OracleState<CycloNum>),
}

macro_rules! dispatch {
    ($self:expr, $s:ident => $body:expr) => {
        match $self {
            PeriodOracle::Rational($s) => $body,
            PeriodOracle::Cyclotomic($s) => $body,
        }
    };
}

impl PeriodOracle {
    /// Builds the oracle for weight k = w + 2.
    pub fn new(chi: &DirichletChar, weight: u32) -> Result<Self> {
        if weight < 2 {
            return invalid("weight must be at least 2");
        }
        let w = weight - 2;
        Ok(if chi.order() <= 2 {
            PeriodOracle::Rational(OracleState::new(chi, w)?)
        } else {
            PeriodOracle::Cyclotomic(OracleState::new(chi, w)?)
        })
    }

    pub fn dim_v(&self) -> usize {
        dispatch!(self, s => s.module.dim())
    }

    /// dim W, which equals dim M_k + dim S_k.
    pub fn dim_w(&self) -> usize {
        dispatch!(self, s => s.period.dim())
    }

    /// dim D, the number of χ-admissible cusps (when V ≠ 0).
    pub fn dim_d(&self) -> usize {
        dispatch!(self, s => s.coboundary.dim())
    }

    /// (dim Ker(1+S), dim Ker(1+U+U²)).
    pub fn kernel_dims(&self) -> Result<(usize, usize)> {
        dispatch!(self, s => Ok((s.module.kernel_s()?.dim(), s.module.kernel_u()?.dim())))
    }

    pub fn is_degenerate(&self) -> bool {
        dispatch!(self, s => s.module.is_degenerate())
    }

    /// tr([Σ], M_k ⊕ S_k) as the trace of T̃ on W.
    pub fn trace_on_w(&self, sigma: Sigma) -> Result<CycloNum> {
        dispatch!(self, s => s.trace_on_w(sigma).map(|x| x.to_cyclo()))
    }

    /// tr(V|_Σ T̃).
    pub fn trace_on_v(&self, sigma: Sigma) -> Result<CycloNum> {
        let t = build_tn(sigma.det() as u64, Construction::FundamentalDomain);
        dispatch!(self, s => s.module.trace_on_v(sigma, &t).map(|x| x.to_cyclo()))
    }

    /// The coboundary trace, which equals the Eisenstein trace.
    pub fn trace_coboundary(&self, sigma: Sigma) -> Result<CycloNum> {
        dispatch!(self, s => s.trace_coboundary(sigma).map(|x| x.to_cyclo()))
    }

    /// Σ χ̃ over Γ\Σ, counted through the upper-triangular representatives.
    pub fn coset_character_sum(&self, sigma: Sigma) -> CycloNum {
        let t = build_tn_infty(sigma.det() as u64);
        dispatch!(self, s => s.module.reachable_sum(sigma, &t).to_cyclo())
    }
}

/// One-shot tr(W|_Σ T̃) for weight k.
pub fn trace_on_w(chi: &DirichletChar, weight: u32, sigma: Sigma) -> Result<CycloNum> {
    PeriodOracle::new(chi, weight)?.trace_on_w(sigma)
}

/// One-shot coboundary trace for weight k.
pub fn trace_coboundary(chi: &DirichletChar, weight: u32, sigma: Sigma) -> Result<CycloNum> {
    PeriodOracle::new(chi, weight)?.trace_coboundary(sigma)
}
