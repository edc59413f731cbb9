//! Dense matrices over an exact field, with certified elimination.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::cyclo::{cyclotomic_poly, CycloNum};
use crate::error::{Result, TraceError};
use crate::par;
use crate::Rational;

/// The exact scalar fields the oracle works over: ℚ, or ℚ(ζ_m) when the
/// character takes non-rational values.
pub trait Scalar: Clone + PartialEq + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(q: Rational) -> Self;
    /// ζ_order^e; only called with orders the field contains.
    fn root_of_unity(order: u64, e: u64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    /// Inverse of a nonzero element.
    fn inverse(&self) -> Self;
    /// Size of the coefficients in bits, used to pick cheap pivots.
    fn height(&self) -> u64;
    fn to_cyclo(&self) -> CycloNum;
    /// The order m of the cyclotomic field the value is written in.
    fn field_order(&self) -> u32;
    /// The least common denominator of the coefficients.
    fn denominator(&self) -> BigInt;
    /// Coefficients in ℚ(ζ_order), multiplied by `scale`, which must clear
    /// the denominators.
    fn to_integral(&self, order: u32, scale: &BigInt) -> Vec<BigInt>;
    fn from_integral(order: u32, coeffs: Vec<BigInt>, den: &BigInt) -> Self;

    fn from_int(x: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(x)))
    }
}

fn rational_height(q: &Rational) -> u64 {
    q.numer().bits() + q.denom().bits()
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(q: Rational) -> Self {
        q
    }
    fn root_of_unity(order: u64, e: u64) -> Self {
        match (order, e % order.max(1)) {
            (_, 0) => One::one(),
            (2, 1) => -<Rational as One>::one(),
            _ => panic!("ζ_{order}^{e} is not rational"),
        }
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Self {
        self.recip()
    }
    fn height(&self) -> u64 {
        rational_height(self)
    }
    fn to_cyclo(&self) -> CycloNum {
        CycloNum::from_rational(self.clone())
    }
    fn field_order(&self) -> u32 {
        1
    }
    fn denominator(&self) -> BigInt {
        self.denom().clone()
    }
    fn to_integral(&self, _order: u32, scale: &BigInt) -> Vec<BigInt> {
        vec![self.numer() * (scale / self.denom())]
    }
    fn from_integral(_order: u32, mut coeffs: Vec<BigInt>, den: &BigInt) -> Self {
        Rational::new(coeffs.swap_remove(0), den.clone())
    }
}

impl Scalar for CycloNum {
    fn zero() -> Self {
        CycloNum::zero()
    }
    fn one() -> Self {
        CycloNum::one()
    }
    fn is_zero(&self) -> bool {
        CycloNum::is_zero(self)
    }
    fn from_rational(q: Rational) -> Self {
        CycloNum::from_rational(q)
    }
    fn root_of_unity(order: u64, e: u64) -> Self {
        CycloNum::zeta_pow(order as u32, e as i64)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inverse(&self) -> Self {
        CycloNum::inverse(self).expect("inverse of zero")
    }
    fn height(&self) -> u64 {
        self.coeffs().iter().map(rational_height).sum()
    }
    fn to_cyclo(&self) -> CycloNum {
        self.clone().simplify()
    }
    fn field_order(&self) -> u32 {
        self.order()
    }
    fn denominator(&self) -> BigInt {
        self.coeffs()
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
    fn to_integral(&self, order: u32, scale: &BigInt) -> Vec<BigInt> {
        self.lift(order)
            .coeffs()
            .iter()
            .map(|c| c.numer() * (scale / c.denom()))
            .collect()
    }
    fn from_integral(order: u32, coeffs: Vec<BigInt>, den: &BigInt) -> Self {
        let coeffs = coeffs
            .into_iter()
            .map(|c| Rational::new(c, den.clone()))
            .collect();
        CycloNum::from_coeffs(order, coeffs)
    }
}

/// Rows of a matrix over ℤ[ζ_m], each with the denominator it was scaled by.
struct IntegralRows {
    rows: Vec<Vec<Vec<BigInt>>>,
    dens: Vec<BigInt>,
}

fn integral_rows<F: Scalar>(
    n_rows: usize,
    n_cols: usize,
    order: u32,
    entry: impl Fn(usize, usize) -> F + Sync,
) -> IntegralRows {
    let ids: Vec<usize> = (0..n_rows).collect();
    let out = par::map_ordered(&ids, |&i| {
        let den = (0..n_cols).fold(BigInt::one(), |acc, j| acc.lcm(&entry(i, j).denominator()));
        let row = (0..n_cols)
            .map(|j| entry(i, j).to_integral(order, &den))
            .collect();
        (row, den)
    });
    let (rows, dens) = out.into_iter().unzip();
    IntegralRows { rows, dens }
}

/// x·y in ℤ[ζ_m] = ℤ[X]/Φ_m, added into `acc`.
fn mul_add_integral(acc: &mut [BigInt], x: &[BigInt], y: &[BigInt], phi: &[i64]) {
    if x.iter().all(Zero::is_zero) || y.iter().all(Zero::is_zero) {
        return;
    }
    if x.len() == 1 {
        acc[0] += &x[0] * &y[0];
        return;
    }
    let deg = phi.len() - 1;
    let mut c = vec![BigInt::zero(); 2 * deg - 1];
    for (i, a) in x.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            if !b.is_zero() {
                c[i + j] += a * b;
            }
        }
    }
    // Φ_m is monic: X^deg ≡ −Σ_{j<deg} φ_j X^j.
    for i in (deg..c.len()).rev() {
        let top = std::mem::take(&mut c[i]);
        if top.is_zero() {
            continue;
        }
        for (j, &p) in phi.iter().enumerate().take(deg) {
            if p != 0 {
                c[i - deg + j] -= &top * p;
            }
        }
    }
    for (a, v) in acc.iter_mut().zip(c) {
        *a += v;
    }
}

/// A dense row-major matrix with exact entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// A kernel basis in reduced echelon form: column `k` of `basis` has a 1 in
/// row `free[k]` and 0 in every other free row.
#[derive(Clone, Debug)]
pub struct Kernel<F> {
    pub basis: ExactMatrix<F>,
    pub free: Vec<usize>,
}

impl<F: Scalar> Kernel<F> {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// The trace of `op` restricted to this subspace. Fails unless `op` maps
    /// the subspace into itself exactly.
    pub fn restricted_trace(&self, op: &ExactMatrix<F>) -> Result<F> {
        let image = op.mul(&self.basis);
        // Coordinates of the image: read off at the free rows.
        let coords = ExactMatrix::from_fn(self.dim(), self.dim(), |k, l| {
            image.get(self.free[k], l).clone()
        });
        if self.basis.mul(&coords) != image {
            return Err(TraceError::Inconsistency(
                "operator does not preserve the subspace".into(),
            ));
        }
        Ok(coords.trace())
    }
}

impl<F: Scalar> ExactMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { F::one() } else { F::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> F) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        ExactMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.cols + j] = x;
    }

    /// Adds x to entry (i, j).
    pub fn add_at(&mut self, i: usize, j: usize, x: &F) {
        let e = &mut self.data[i * self.cols + j];
        *e = e.plus(x);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(x, y)| x.plus(y))
            .collect();
        ExactMatrix { data, ..*self }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self
            .data
            .iter()
            .zip(&o.data)
            .map(|(x, y)| x.minus(y))
            .collect();
        ExactMatrix { data, ..*self }
    }

    pub fn scale(&self, c: &F) -> Self {
        let data = self.data.iter().map(|x| x.times(c)).collect();
        ExactMatrix { data, ..*self }
    }

    /// The product, computed fraction-free: rows of `self` and columns of
    /// `o` are scaled to integral vectors over ℤ[ζ_m], multiplied, and each
    /// entry is divided back once.
    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let order = self
            .data
            .iter()
            .chain(&o.data)
            .fold(1u32, |acc, x| acc.lcm(&x.field_order()));
        let phi = cyclotomic_poly(order);
        let left = integral_rows(self.rows, self.cols, order, |i, k| self.get(i, k).clone());
        let right = integral_rows(o.cols, o.rows, order, |j, k| o.get(k, j).clone());
        let deg = phi.len() - 1;
        let row_ids: Vec<usize> = (0..self.rows).collect();
        let rows = par::map_ordered(&row_ids, |&i| {
            (0..o.cols)
                .map(|j| {
                    let mut acc = vec![BigInt::zero(); deg];
                    for (x, y) in left.rows[i].iter().zip(&right.rows[j]) {
                        mul_add_integral(&mut acc, x, y, &phi);
                    }
                    if acc.iter().all(Zero::is_zero) {
                        F::zero()
                    } else {
                        F::from_integral(order, acc, &(&left.dens[i] * &right.dens[j]))
                    }
                })
                .collect::<Vec<F>>()
        });
        ExactMatrix {
            rows: self.rows,
            cols: o.cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        assert_eq!(self.rows, self.cols);
        (0..e).fold(Self::identity(self.rows), |acc, _| acc.mul(self))
    }

    pub fn trace(&self) -> F {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).fold(F::zero(), |acc, i| acc.plus(self.get(i, i)))
    }

    /// Stacks matrices with the same column count vertically.
    pub fn vstack(parts: &[&Self]) -> Self {
        let cols = parts.first().map_or(0, |p| p.cols);
        assert!(parts.iter().all(|p| p.cols == cols));
        ExactMatrix {
            rows: parts.iter().map(|p| p.rows).sum(),
            cols,
            data: parts.iter().flat_map(|p| p.data.iter().cloned()).collect(),
        }
    }

    /// Reduced row echelon form and pivot columns. Among the candidate rows
    /// of each column the pivot with the smallest height is chosen.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows)
                .filter(|&i| !m.get(i, c).is_zero())
                .min_by_key(|&i| m.get(i, c).height())
            else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inverse();
            for j in c..m.cols {
                let x = m.get(r, j).times(&inv);
                m.set(r, j, x);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let y = m.get(r, j);
                    if !y.is_zero() {
                        let x = m.get(i, j).minus(&f.times(y));
                        m.set(i, j, x);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of {v : self·v = 0}, certified by multiplying back.
    pub fn kernel(&self) -> Result<Kernel<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            basis.set(f, k, F::one());
            for (i, &p) in pivots.iter().enumerate() {
                basis.set(p, k, r.get(i, f).negated());
            }
        }
        if !self.mul(&basis).is_zero() {
            return Err(TraceError::Inconsistency(
                "kernel certificate failed".into(),
            ));
        }
        Ok(Kernel { basis, free })
    }
}
