//! Multiplicative arithmetic helpers and the Gegenbauer kernel p_w(t, n).
//!
//! Factorization is trial division by 2, 3 and a 6k±1 wheel, which is ample for
//! the desk-scale inputs this crate targets (N, n ≤ 10⁶).

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Zero};

/// Nonnegative gcd; `gcd(0, 0) = 0`.
pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Nonnegative lcm; `lcm(0, x) = 0`.
pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Returns `(g, x, y)` with `a·x + b·y = g = gcd(a, b) ≥ 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = a.extended_gcd(&b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// ⌊√n⌋.
pub fn isqrt(n: u64) -> u64 {
    n.sqrt()
}

/// `Some(r)` with r ≥ 0 and r² = n when n is a perfect square (n ≥ 0).
pub fn exact_sqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let r = (n as u64).sqrt() as i64;
    (r * r == n).then_some(r)
}

/// Canonical residue of `a` modulo `m > 0`, in `[0, m)`.
pub fn modulo(a: i64, m: i64) -> i64 {
    a.rem_euclid(m)
}

/// `v_p(n)` for n ≠ 0.
pub fn valuation(p: u64, mut n: u64) -> u32 {
    debug_assert!(n != 0 && p > 1);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Prime factorization of a positive integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factored(pub Vec<(u64, u32)>);

impl Factored {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().map(|&(p, _)| p)
    }

    pub fn value(&self) -> u64 {
        self.0.iter().map(|&(p, e)| p.pow(e)).product()
    }
}

pub fn factor(mut n: u64) -> Factored {
    assert!(n >= 1, "factor: argument must be positive");
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        if *n % p == 0 {
            let mut e = 0;
            while *n % p == 0 {
                *n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5;
    while p * p <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    Factored(out)
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor(n).0 {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

pub fn moebius(n: u64) -> i64 {
    let f = factor(n);
    if f.0.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.0.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .0
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// [Γ₁ : Γ₀(N)] = N·∏_{p|N}(1 + 1/p).
pub fn index_phi1(n: u64) -> u64 {
    factor(n)
        .0
        .iter()
        .map(|&(p, e)| (p + 1) * p.pow(e - 1))
        .product()
}

pub fn sigma1(n: u64) -> u64 {
    divisors(n).iter().sum()
}

/// σ_{1,N}(n) = Σ_{d | n, (d, N) = 1} n/d.
pub fn sigma1_level(level: u64, n: u64) -> u64 {
    divisors(n)
        .into_iter()
        .filter(|&d| d.gcd(&level) == 1)
        .map(|d| n / d)
        .sum()
}

/// p_w(t, n): the coefficient of x^w in (1 − t x + n x²)⁻¹.
pub fn gegenbauer(w: u32, t: i64, n: i64) -> BigInt {
    let (t, n) = (BigInt::from(t), BigInt::from(n));
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    for _ in 0..w {
        let next = &t * &cur - &n * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// All values p_0(t, n), …, p_w(t, n).
pub fn gegenbauer_table(w: u32, t: i64, n: i64) -> Vec<BigInt> {
    let (tb, nb) = (BigInt::from(t), BigInt::from(n));
    let mut out = vec![BigInt::one()];
    let mut prev = BigInt::zero();
    for _ in 0..w {
        let cur = out.last().unwrap().clone();
        let next = &tb * &cur - &nb * &prev;
        prev = cur;
        out.push(next);
    }
    out
}

/// Simultaneous solution of `x ≡ value (mod modulus)`; `None` if inconsistent.
/// The result is `(x, m)` with `0 ≤ x < m = lcm of the moduli`.
pub fn crt_solve(residues: &[(i64, i64)]) -> Option<(i64, i64)> {
    let mut x: i128 = 0;
    let mut m: i128 = 1;
    for &(v, mi) in residues {
        assert!(mi >= 1, "crt_solve: moduli must be positive");
        let mi = mi as i128;
        let v = (v as i128).rem_euclid(mi);
        let e = m.extended_gcd(&mi);
        let g = e.gcd;
        if (v - x) % g != 0 {
            return None;
        }
        let l = m / g * mi;
        let step = ((v - x) / g).rem_euclid(mi / g) * e.x.rem_euclid(mi / g) % (mi / g);
        x = (x + m * step).rem_euclid(l);
        m = l;
    }
    Some((x as i64, m as i64))
}

/// The Kronecker symbol (a | n).
pub fn kronecker(a: i64, n: i64) -> i64 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol (a | n) for odd n > 0.
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// The nontrivial character modulo 4 (0 on even arguments).
pub fn eps4(x: i64) -> i64 {
    match x.rem_euclid(4) {
        1 => 1,
        3 => -1,
        _ => 0,
    }
}

/// `base^exp` as a big integer.
pub fn big_pow(base: i64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(gegenbauer(10, 2, 1), BigInt::from(11));
        assert_eq!(gegenbauer(2, 0, 1), BigInt::from(-1));
        assert_eq!(sigma1_level(6, 4), 4);
        assert_eq!(sigma1_level(1, 6), 12);
        assert_eq!(index_phi1(6), 12);
        assert_eq!(crt_solve(&[(2, 3), (1, 2)]), Some((5, 6)));
        assert_eq!(crt_solve(&[(0, 2), (1, 2)]), None);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(5, 2), -1);
    }
}
