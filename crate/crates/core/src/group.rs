//! Normal-form arithmetic in H(n,m;t,r).
//!
//! Every element is kept as `a^u b^v` with `0 <= u < n` and `0 <= v < m`.
//! Products are formed with `b^v a^u = a^(r^v u) b^v`, and an overflowing
//! `b`-exponent is folded back through `b^m = a^t`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{add_mod, factorize, geom, mul_mod, powm};
use crate::presentation::Presentation;

/// Default cap on the number of elements a brute-force pass may touch.
pub const DEFAULT_ELEMENT_BOUND: u64 = 10_000;

/// A group element `a^u b^v` in normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    pub u: u64,
    pub v: u64,
}

impl Element {
    pub const IDENTITY: Element = Element { u: 0, v: 0 };

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a^{}*b^{}", self.u, self.v)
    }
}

/// Exponents of `a^u b^v` as written, before reduction to normal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawElement {
    pub u: u64,
    pub v: u64,
}

impl FromStr for RawElement {
    type Err = Error;

    /// Accepts `(u,v)`, `a^u*b^v`, `a^u`, `b^v`, `a`, `b`, `e` and `1`.
    fn from_str(s: &str) -> Result<Self> {
        let err = |why: &str| Error::Parse(format!("element {s:?}: {why}"));
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let num = |x: &str| x.parse::<u64>().map_err(|e| err(&e.to_string()));

        if let Some(inner) = text.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
            let (u, v) = inner.split_once(',').ok_or_else(|| err("expected (u,v)"))?;
            return Ok(RawElement { u: num(u)?, v: num(v)? });
        }
        if text == "e" || text == "1" {
            return Ok(RawElement { u: 0, v: 0 });
        }
        let mut raw = RawElement { u: 0, v: 0 };
        let (mut seen_a, mut seen_b) = (false, false);
        for factor in text.split('*') {
            let (gen, exp) = match factor.split_once('^') {
                Some((g, e)) => (g, num(e)?),
                None => (factor, 1),
            };
            match gen {
                "a" if !seen_a && !seen_b => {
                    raw.u = exp;
                    seen_a = true;
                }
                "b" if !seen_b => {
                    raw.v = exp;
                    seen_b = true;
                }
                _ => return Err(err("expected a^u*b^v")),
            }
        }
        Ok(raw)
    }
}

impl Presentation {
    /// Normal form of `a^u b^v` for arbitrary non-negative exponents.
    pub fn element(&self, u: u64, v: u64) -> Element {
        self.reduce(u % self.n(), v as u128)
    }

    pub fn element_from_raw(&self, raw: RawElement) -> Element {
        self.element(raw.u, raw.v)
    }

    /// Normal form of `a^u b^k` where `u < n` and `k` is any exponent of `b`.
    pub(crate) fn reduce(&self, u: u64, k: u128) -> Element {
        let (n, m) = (self.n(), self.m() as u128);
        let wraps = ((k / m) % n as u128) as u64;
        Element {
            u: add_mod(u, mul_mod(self.t(), wraps, n), n),
            v: (k % m) as u64,
        }
    }

    pub fn generator_a(&self) -> Element {
        self.element(1, 0)
    }

    pub fn generator_b(&self) -> Element {
        self.element(0, 1)
    }

    pub fn mul(&self, x: Element, y: Element) -> Element {
        let n = self.n();
        let u = add_mod(x.u, mul_mod(powm(self.r(), x.v, n), y.u, n), n);
        self.reduce(u, x.v as u128 + y.v as u128)
    }

    /// `(a^u b^v)^-1 = b^-v a^-u`, with `b^-v = b^(m-v) a^-t` for `v > 0`.
    pub fn inv(&self, x: Element) -> Element {
        let n = self.n();
        if x.v == 0 {
            return Element { u: (n - x.u) % n, v: 0 };
        }
        let back = self.m() - x.v;
        let a_exp = (n - add_mod(self.t(), x.u, n)) % n;
        Element {
            u: mul_mod(powm(self.r(), back, n), a_exp, n),
            v: back,
        }
    }

    /// `(a^u b^v)^k = a^(u [k]_(r^v)) b^(v k)`.
    pub fn pow(&self, x: Element, k: u64) -> Element {
        let n = self.n();
        let base = powm(self.r(), x.v, n);
        let u = mul_mod(x.u, geom(k, base, n), n);
        self.reduce(u, x.v as u128 * k as u128)
    }

    /// `[g, h] = g h g^-1 h^-1 = a^((r^v1 - 1) u2 - (r^v2 - 1) u1)`.
    pub fn commutator(&self, g: Element, h: Element) -> Element {
        let n = self.n();
        let r = self.r();
        let lhs = mul_mod((powm(r, g.v, n) + n - 1) % n, h.u, n);
        let rhs = mul_mod((powm(r, h.v, n) + n - 1) % n, g.u, n);
        Element { u: (lhs + n - rhs) % n, v: 0 }
    }

    /// Least `k >= 1` with `x^k = e`.
    pub fn element_order(&self, x: Element) -> u64 {
        factorize(self.order())
            .expect("group order is positive")
            .divisors()
            .into_iter()
            .find(|&k| self.pow(x, k).is_identity())
            .expect("the group order annihilates every element")
    }

    /// All `n m` elements in lexicographic `(u, v)` order.
    pub fn elements(&self, bound: u64) -> Result<impl Iterator<Item = Element>> {
        if self.order() > bound {
            return Err(Error::ResourceLimit(format!(
                "{self} has {} elements, above the bound {bound}",
                self.order()
            )));
        }
        let m = self.m();
        Ok((0..self.n()).flat_map(move |u| (0..m).map(move |v| Element { u, v })))
    }
}
