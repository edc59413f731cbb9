//! Dirichlet characters modulo N with exact values in ℚ(ζ_m).
//!
//! (ℤ/N)^× is presented through CRT-lifted generators: the least primitive
//! root modulo p^e for odd p, −1 modulo 4, and −1, 5 modulo 2^e (e ≥ 3).
//! A character is an exponent vector on these generators; characters are
//! enumerated in lexicographic order of exponent vectors, and the label `N.i`
//! refers to the i-th character in that order.

use std::fmt;
use std::sync::Arc;

use num_integer::Integer;

use crate::arith::{crt_solve, euler_phi, factor, gcd};
use crate::cyclo::CycloNum;
use crate::error::{invalid, Result};

/// The generators of (ℤ/N)^×: `(generator mod N, its order)`.
fn unit_generators(n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let f = factor(n);
    for &(p, e) in &f.0 {
        let pe = p.pow(e);
        let lift = |g: u64| -> u64 {
            let (x, _) = crt_solve(&[(g as i64, pe as i64), (1, (n / pe) as i64)]).unwrap();
            x as u64
        };
        if p == 2 {
            match e {
                1 => {}
                2 => out.push((lift(3), 2)),
                _ => {
                    out.push((lift(pe - 1), 2));
                    out.push((lift(5), pe / 8 * 2));
                }
            }
        } else {
            let phi = euler_phi(pe);
            let qs: Vec<u64> = factor(phi).primes().collect();
            let g = (2..pe)
                .find(|&g| g % p != 0 && qs.iter().all(|&q| pow_mod(g, phi / q, pe) != 1))
                .expect("primitive root exists modulo odd prime powers");
            out.push((lift(g), phi));
        }
    }
    out
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Shared per-modulus data: generators and the discrete-log table.
#[derive(Debug)]
struct UnitGroup {
    modulus: u64,
    gens: Vec<(u64, u64)>,
    /// For each residue x, the generator exponents of x if x is a unit.
    logs: Vec<Option<Vec<u64>>>,
}

impl UnitGroup {
    fn new(n: u64) -> Self {
        let gens = unit_generators(n);
        let mut logs = vec![None; n as usize];
        let mut stack = vec![(1 % n, vec![0u64; gens.len()])];
        // Walk all products of generator powers (the group is the direct product).
        let mut frontier = Vec::new();
        logs[(1 % n) as usize] = Some(vec![0; gens.len()]);
        for (j, &(g, ord)) in gens.iter().enumerate() {
            frontier.clear();
            for (x, ex) in stack.drain(..) {
                let mut y = x;
                for k in 0..ord {
                    let mut e = ex.clone();
                    e[j] = k;
                    frontier.push((y, e));
                    y = y * g % n;
                }
            }
            std::mem::swap(&mut stack, &mut frontier);
        }
        for (x, e) in stack {
            logs[x as usize] = Some(e);
        }
        UnitGroup {
            modulus: n,
            gens,
            logs,
        }
    }
}

/// A Dirichlet character modulo N.
#[derive(Clone)]
pub struct DirichletChar {
    group: Arc<UnitGroup>,
    exps: Vec<u64>,
    index: usize,
    order: u64,
    conductor: u64,
    /// χ(x) = ζ_order^{table[x]} for units x; `None` on non-units.
    table: Arc<Vec<Option<u64>>>,
}

impl fmt::Debug for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DirichletChar({})", self.label())
    }
}

impl PartialEq for DirichletChar {
    fn eq(&self, o: &Self) -> bool {
        self.group.modulus == o.group.modulus && self.exps == o.exps
    }
}

impl Eq for DirichletChar {}

impl DirichletChar {
    fn build(group: Arc<UnitGroup>, exps: Vec<u64>, index: usize) -> Self {
        let order = group
            .gens
            .iter()
            .zip(&exps)
            .map(|(&(_, o), &e)| o / gcd(e as i64, o as i64) as u64)
            .fold(1u64, |acc, x| acc.lcm(&x));
        let table: Vec<Option<u64>> = group
            .logs
            .iter()
            .map(|l| {
                l.as_ref().map(|ks| {
                    group
                        .gens
                        .iter()
                        .zip(&exps)
                        .zip(ks)
                        .map(|((&(_, o), &e), &k)| exponent_part(e, k, o, order))
                        .sum::<u64>()
                        % order
                })
            })
            .collect();
        let n = group.modulus;
        let mut chi = DirichletChar {
            group,
            exps,
            index,
            order,
            conductor: n,
            table: Arc::new(table),
        };
        chi.conductor = chi.compute_conductor();
        chi
    }

    /// The trivial character modulo N.
    pub fn trivial(n: u64) -> Self {
        enumerate_characters(n).swap_remove(0)
    }

    pub fn modulus(&self) -> u64 {
        self.group.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn label(&self) -> String {
        format!("{}.{}", self.modulus(), self.index)
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// χ(−1) ∈ {1, −1}.
    pub fn parity(&self) -> i64 {
        let n = self.modulus();
        match self.exponent(n as i64 - 1) {
            Some(0) => 1,
            _ => -1,
        }
    }

    /// The exponent e with χ(x) = ζ_order^e, or `None` when gcd(x, N) > 1.
    pub fn exponent(&self, x: i64) -> Option<u64> {
        let n = self.modulus() as i64;
        self.table[x.rem_euclid(n) as usize]
    }

    pub fn evaluate(&self, x: i64) -> CycloNum {
        match self.exponent(x) {
            Some(e) => CycloNum::zeta_pow(self.order as u32, e as i64),
            None => CycloNum::zero(),
        }
    }

    /// Value at `x` of the character modulo `m0` induced from the primitive
    /// character attached to χ, where `conductor | m0 | N`: zero unless
    /// gcd(x, m0) = 1, otherwise χ(x') for any x' ≡ x (mod m0) prime to N.
    pub fn exponent_mod(&self, m0: u64, x: i64) -> Option<u64> {
        assert!(self.modulus() % m0 == 0 && m0 % self.conductor == 0);
        let m0 = m0 as i64;
        if gcd(x, m0) != 1 {
            return None;
        }
        let n = self.modulus() as i64;
        let base = x.rem_euclid(m0);
        (0..n / m0)
            .map(|j| base + j * m0)
            .find(|&y| gcd(y, n) == 1)
            .and_then(|y| self.exponent(y))
    }

    pub fn evaluate_mod(&self, m0: u64, x: i64) -> CycloNum {
        match self.exponent_mod(m0, x) {
            Some(e) => CycloNum::zeta_pow(self.order as u32, e as i64),
            None => CycloNum::zero(),
        }
    }

    fn compute_conductor(&self) -> u64 {
        let n = self.modulus();
        let mut divs = crate::arith::divisors(n);
        divs.sort_unstable();
        for m in divs {
            let trivial_on_kernel =
                (0..n / m)
                    .map(|j| (1 + j * m) % n)
                    .all(|y| match self.table[y as usize] {
                        Some(e) => e == 0,
                        None => true,
                    });
            if trivial_on_kernel {
                return m;
            }
        }
        n
    }
}

/// The exponent of ζ_order equal to χ(g^k) = ζ_o^{e·k}, where g has order o.
fn exponent_part(e: u64, k: u64, o: u64, order: u64) -> u64 {
    let g = gcd(e as i64, o as i64) as u64;
    let reduced = o / g;
    (e / g) * k % reduced * (order / reduced) % order
}

impl fmt::Display for DirichletChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// All φ(N) characters modulo N in canonical order.
pub fn enumerate_characters(n: u64) -> Vec<DirichletChar> {
    assert!(n >= 1);
    let group = Arc::new(UnitGroup::new(n));
    let orders: Vec<u64> = group.gens.iter().map(|&(_, o)| o).collect();
    let mut out = Vec::new();
    let mut exps = vec![0u64; orders.len()];
    loop {
        out.push(DirichletChar::build(group.clone(), exps.clone(), out.len()));
        // Increment the exponent vector, last coordinate fastest.
        let mut j = orders.len();
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            exps[j] += 1;
            if exps[j] < orders[j] {
                break;
            }
            exps[j] = 0;
        }
    }
}

/// Resolves a label `N.i`.
pub fn parse_label(label: &str) -> Result<DirichletChar> {
    let (n, i) = label
        .split_once('.')
        .ok_or_else(|| crate::TraceError::InvalidInput(format!("bad character label {label:?}")))?;
    let (n, i): (u64, usize) = match (n.parse(), i.parse()) {
        (Ok(n), Ok(i)) if n >= 1 => (n, i),
        _ => return invalid(format!("bad character label {label:?}")),
    };
    let mut chars = enumerate_characters(n);
    if i >= chars.len() {
        return invalid(format!("character index {i} out of range for modulus {n}"));
    }
    Ok(chars.swap_remove(i))
}
