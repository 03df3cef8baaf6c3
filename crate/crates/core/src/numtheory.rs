//! Integer and modular arithmetic primitives.
//!
//! Everything here works on `u64` values with `u128` intermediates, which is
//! plenty for presentation parameters below 2^31 and group orders below 2^62.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Result};

/// A p-adic valuation: a finite exponent, or infinity for the valuation of 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn is_positive(self) -> bool {
        self != Valuation::Finite(0)
    }

    /// `self >= bound`, where `bound` may be negative.
    pub fn at_least(self, bound: i64) -> bool {
        match self {
            Valuation::Finite(v) => i64::from(v) >= bound,
            Valuation::Infinite => true,
        }
    }

    /// `self == value` for a possibly negative integer.
    pub fn equals(self, value: i64) -> bool {
        matches!(self, Valuation::Finite(v) if i64::from(v) == value)
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq<u32> for Valuation {
    fn eq(&self, other: &u32) -> bool {
        *self == Valuation::Finite(*other)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `a * b mod m`.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

/// `s^e mod m` for `m >= 1`. Callers guarantee the modulus.
pub(crate) fn powm(s: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = s % m;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// `[u]_s = 1 + s + ... + s^(u-1) mod m` for `m >= 1`.
///
/// Walks the bits of `u` from the top, keeping `([k]_s, s^k)` and using
/// `[2k]_s = [k]_s (1 + s^k)` and `[k+1]_s = [k]_s + s^k`.
pub(crate) fn geom(u: u64, s: u64, m: u64) -> u64 {
    if m == 1 || u == 0 {
        return 0;
    }
    let s = s % m;
    let mut sum = 0u64;
    let mut power = 1 % m;
    for bit in (0..64 - u.leading_zeros()).rev() {
        sum = mul_mod(sum, add_mod(1, power, m), m);
        power = mul_mod(power, power, m);
        if (u >> bit) & 1 == 1 {
            sum = add_mod(sum, power, m);
            power = mul_mod(power, s, m);
        }
    }
    sum
}

/// Modular exponentiation with `0^0 = 1`.
pub fn pow_mod(s: u64, e: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return invalid("modulus must be positive");
    }
    Ok(powm(s, e, modulus))
}

/// The geometric sum `[u]_s` reduced modulo `modulus`, in O(log u) steps.
pub fn geom_sum(u: u64, s: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return invalid("modulus must be positive");
    }
    Ok(geom(u, s, modulus))
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Extended Euclid: `(g, u, v)` with `u*a + v*b = g = gcd(a, b) > 0`.
pub fn gcd_ext(a: i64, b: i64) -> Result<(i64, i64, i64)> {
    if a == 0 && b == 0 {
        return invalid("gcd_ext(0, 0) is undefined");
    }
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    Ok((r0 as i64, s0 as i64, t0 as i64))
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in SMALL {
        let mut x = powm(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Valuation of `x` at a prime the caller already knows to be prime.
pub(crate) fn deg(p: u64, mut x: u64) -> Valuation {
    if x == 0 {
        return Valuation::Infinite;
    }
    let mut s = 0;
    while x.is_multiple_of(p) {
        x /= p;
        s += 1;
    }
    Valuation::Finite(s)
}

/// Finite valuation of a positive integer.
pub(crate) fn deg_finite(p: u64, x: u64) -> u32 {
    deg(p, x).finite().expect("valuation of a positive integer")
}

/// The p-adic valuation `deg_p(x)`; infinite for `x = 0`.
pub fn padic_deg(p: u64, x: u64) -> Result<Valuation> {
    if !is_prime(p) {
        return invalid(format!("{p} is not prime"));
    }
    Ok(deg(p, x))
}

/// Prime factorization as `(prime, exponent)` pairs with increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct PrimeFactorization {
    factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The factored integer.
    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
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

    /// Euler's totient of the factored integer.
    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    for c in 1.. {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Complete factorization of `k >= 1`.
pub fn factorize(k: u64) -> Result<PrimeFactorization> {
    if k == 0 {
        return invalid("cannot factor 0");
    }
    let mut primes = Vec::new();
    let mut rest = k;
    for p in 2..1000u64 {
        if p * p > rest {
            break;
        }
        while rest.is_multiple_of(p) {
            primes.push(p);
            rest /= p;
        }
    }
    split_into(rest, &mut primes);
    primes.sort_unstable();

    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(PrimeFactorization { factors })
}

/// Multiplicative order of `r` modulo `modulus`.
///
/// Starts from Euler's phi and strips prime factors while the power stays 1.
pub fn mul_order(r: u64, modulus: u64) -> Result<u64> {
    if modulus == 0 {
        return invalid("modulus must be positive");
    }
    if gcd(r % modulus, modulus) != 1 {
        return invalid(format!("{r} is not a unit modulo {modulus}"));
    }
    if modulus == 1 {
        return Ok(1);
    }
    let phi = factorize(modulus)?.phi();
    let mut order = phi;
    for &(p, _) in factorize(phi)?.factors() {
        while order % p == 0 && powm(r, order / p, modulus) == 1 {
            order /= p;
        }
    }
    Ok(order)
}
