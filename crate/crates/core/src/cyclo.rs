//! Exact arithmetic in cyclotomic fields ℚ(ζ_m).

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{divisors, euler_phi};
use crate::Rational;

/// Integer coefficients of the m-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_poly(m: u32) -> Arc<Vec<i64>> {
    static MEMO: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    if let Some(p) = memo.read().unwrap().get(&m) {
        return p.clone();
    }
    // x^m − 1 divided exactly by Φ_d for every proper divisor d of m.
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in divisors(m as u64) {
        if d as u32 == m {
            continue;
        }
        let den = cyclotomic_poly(d as u32);
        num = div_monic(&num, &den);
    }
    let p = Arc::new(num);
    memo.write().unwrap().entry(m).or_insert(p).clone()
}

fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let (n, d) = (num.len() - 1, den.len() - 1);
    let mut rem = num.to_vec();
    let mut q = vec![0i64; n - d + 1];
    for i in (0..=n - d).rev() {
        let coef = rem[i + d];
        q[i] = coef;
        for j in 0..=d {
            rem[i + j] -= coef * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    q
}

/// An element of ℚ(ζ_m): a polynomial in ζ_m of degree < φ(m).
#[derive(Clone, Debug)]
pub struct CycloNum {
    order: u32,
    coeffs: Vec<Rational>,
}

impl CycloNum {
    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(x: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(x)))
    }

    pub fn from_bigint(x: BigInt) -> Self {
        Self::from_rational(Rational::from_integer(x))
    }

    pub fn from_rational(q: Rational) -> Self {
        CycloNum {
            order: 1,
            coeffs: vec![q],
        }
    }

    /// ζ_m^e.
    pub fn zeta_pow(m: u32, e: i64) -> Self {
        let e = e.rem_euclid(m as i64) as usize;
        let mut c = vec![Rational::zero(); e + 1];
        c[e] = Rational::one();
        Self::reduced(m, c)
    }

    /// Builds from an arbitrary-length coefficient vector in powers of ζ_m.
    pub fn from_coeffs(m: u32, coeffs: Vec<Rational>) -> Self {
        Self::reduced(m, coeffs)
    }

    fn reduced(m: u32, mut c: Vec<Rational>) -> Self {
        let phi = cyclotomic_poly(m);
        let deg = phi.len() - 1;
        for i in (deg..c.len()).rev() {
            if c[i].is_zero() {
                continue;
            }
            let top = std::mem::replace(&mut c[i], Rational::zero());
            for (j, &p) in phi.iter().enumerate().take(deg) {
                match p {
                    0 => {}
                    1 => c[i - deg + j] -= &top,
                    -1 => c[i - deg + j] += &top,
                    _ => c[i - deg + j] -= &top * BigInt::from(p),
                }
            }
        }
        c.resize(deg, Rational::zero());
        CycloNum {
            order: m,
            coeffs: c,
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it is one.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(Zero::is_zero) {
            Some(self.coeffs.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    /// Rewrites the value in ℚ(ζ_M) for a multiple M of the current order.
    pub fn lift(&self, big: u32) -> Self {
        assert!(
            big % self.order == 0,
            "cannot lift order {} to {big}",
            self.order
        );
        if big == self.order {
            return self.clone();
        }
        if self.order == 1 {
            let deg = cyclotomic_poly(big).len() - 1;
            let mut coeffs = vec![Rational::zero(); deg];
            coeffs[0] = self.coeffs[0].clone();
            return CycloNum { order: big, coeffs };
        }
        let step = (big / self.order) as usize;
        let mut c = vec![Rational::zero(); step * self.coeffs.len().max(1)];
        for (i, x) in self.coeffs.iter().enumerate() {
            c[i * step] = x.clone();
        }
        Self::reduced(big, c)
    }

    /// Collapses to order 1 when the value is rational (canonical output form).
    pub fn simplify(self) -> Self {
        match self.to_rational() {
            Some(q) if self.order != 1 => Self::from_rational(q),
            _ => self,
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        CycloNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| x * q).collect(),
        }
    }

    /// Complex floating-point image under ζ_m ↦ e^{2πi/m}; display only.
    pub fn approx_complex(&self) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * j as f64 / self.order as f64;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        let m = self.order.lcm(&o.order);
        (self.lift(m), o.lift(m))
    }

    /// Degree of the field this value is written in.
    pub fn field_degree(&self) -> u64 {
        euler_phi(self.order as u64)
    }

    /// The multiplicative inverse, by the extended Euclidean algorithm
    /// against Φ_m in ℚ[x]; `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(q) = self.to_rational() {
            return Some(Self::from_rational(q.recip()).lift(self.order));
        }
        let phi: Vec<Rational> = cyclotomic_poly(self.order)
            .iter()
            .map(|&c| Rational::from_integer(BigInt::from(c)))
            .collect();
        // Invariant: s_i·f ≡ r_i (mod Φ_m).
        let (mut r0, mut r1) = (phi, trimmed(self.coeffs.clone()));
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (Vec::new(), vec![Rational::one()]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // Φ_m is irreducible, so the gcd r0 is a nonzero constant.
        debug_assert_eq!(r0.len(), 1);
        let c = r0[0].recip();
        let coeffs = s0.into_iter().map(|x| x * &c).collect();
        Some(Self::reduced(self.order, coeffs))
    }
}

fn trimmed(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut c = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            c[i + j] += x * y;
        }
    }
    trimmed(c)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        c[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        c[i] -= y;
    }
    trimmed(c)
}

/// Quotient and remainder of a by a nonzero trimmed b.
fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = trimmed(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().unwrap().recip();
    let mut q = vec![Rational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let coef = r.last().unwrap() * &lead;
        for (j, y) in b.iter().enumerate() {
            r[shift + j] -= &coef * y;
        }
        q[shift] = coef;
        r = trimmed(r);
    }
    (trimmed(q), r)
}

impl PartialEq for CycloNum {
    fn eq(&self, o: &Self) -> bool {
        let (a, b) = self.common(o);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloNum {}

impl Add for &CycloNum {
    type Output = CycloNum;

    fn add(self, o: &CycloNum) -> CycloNum {
        if self.order == o.order {
            let coeffs = self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(x, y)| x + y)
                .collect();
            return CycloNum {
                order: self.order,
                coeffs,
            };
        }
        let (mut a, b) = self.common(o);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs) {
            *x += y;
        }
        a
    }
}

impl Sub for &CycloNum {
    type Output = CycloNum;

    fn sub(self, o: &CycloNum) -> CycloNum {
        self + &(-o)
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;

    fn neg(self) -> CycloNum {
        CycloNum {
            order: self.order,
            coeffs: self.coeffs.iter().map(|x| -x).collect(),
        }
    }
}

impl Mul for &CycloNum {
    type Output = CycloNum;

    fn mul(self, o: &CycloNum) -> CycloNum {
        // A rational factor only scales the coefficients.
        if o.order == 1 {
            return self.scale(&o.coeffs[0]);
        }
        if self.order == 1 {
            return o.scale(&self.coeffs[0]);
        }
        let (a, b) = if self.order == o.order {
            (Cow::Borrowed(self), Cow::Borrowed(o))
        } else {
            let (a, b) = self.common(o);
            (Cow::Owned(a), Cow::Owned(b))
        };
        let mut c = vec![Rational::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    c[i + j] += x * y;
                }
            }
        }
        CycloNum::reduced(a.order, c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for CycloNum {
            type Output = CycloNum;
            fn $f(self, o: CycloNum) -> CycloNum {
                (&self).$f(&o)
            }
        }
        impl $tr<&CycloNum> for CycloNum {
            type Output = CycloNum;
            fn $f(self, o: &CycloNum) -> CycloNum {
                (&self).$f(o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl std::iter::Sum for CycloNum {
    fn sum<I: Iterator<Item = CycloNum>>(iter: I) -> CycloNum {
        iter.fold(CycloNum::zero(), |acc, x| acc + x)
    }
}

impl From<Rational> for CycloNum {
    fn from(q: Rational) -> Self {
        CycloNum::from_rational(q)
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match j {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => write!(f, "z{}^{j}", self.order)?,
                _ => write!(f, "{a}*z{}^{j}", self.order)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_relations() {
        let i = CycloNum::zeta_pow(4, 1);
        assert_eq!(&i * &i, CycloNum::from_int(-1));
        let z = CycloNum::zeta_pow(3, 1);
        let s = CycloNum::one() + z.clone() + &z * &z;
        assert!(s.is_zero());
        assert_eq!(CycloNum::zeta_pow(6, 2), CycloNum::zeta_pow(3, 1));
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
    }
}
