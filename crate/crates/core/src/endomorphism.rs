//! Endomorphisms given by generator images `a -> a^x1 b^y1`, `b -> a^x2 b^y2`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Element;
use crate::numtheory::{add_mod, gcd, geom, mul_mod, powm};
use crate::presentation::{GroupContext, Presentation};

/// Generator images of an endomorphism in canonical ranges
/// `0 <= x1, x2 < n`, `0 <= y1, y2 < m`.
///
/// Ordered by `(y1, y2, x1, x2)`, the order enumeration produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EndoSpec {
    pub x1: u64,
    pub y1: u64,
    pub x2: u64,
    pub y2: u64,
}

impl EndoSpec {
    pub const IDENTITY: EndoSpec = EndoSpec { x1: 1, y1: 0, x2: 0, y2: 1 };

    /// The identity map of a presentation (`a -> a` collapses to `x1 = 0`
    /// when `n = 1`, `b -> b` to `y2 = 0` when `m = 1`).
    pub fn identity(pres: &Presentation) -> Self {
        Self::from_images(pres.generator_a(), pres.generator_b())
    }

    pub fn from_images(image_a: Element, image_b: Element) -> Self {
        EndoSpec { x1: image_a.u, y1: image_a.v, x2: image_b.u, y2: image_b.v }
    }

    pub fn image_a(&self) -> Element {
        Element { u: self.x1, v: self.y1 }
    }

    pub fn image_b(&self) -> Element {
        Element { u: self.x2, v: self.y2 }
    }

    fn sort_key(&self) -> (u64, u64, u64, u64) {
        (self.y1, self.y2, self.x1, self.x2)
    }
}

impl Ord for EndoSpec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for EndoSpec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for EndoSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.x1, self.y1, self.x2, self.y2)
    }
}

/// A quadruple `x1,y1,x2,y2` as typed, before reduction to canonical ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RawQuad {
    pub x1: u64,
    pub y1: u64,
    pub x2: u64,
    pub y2: u64,
}

impl RawQuad {
    /// Reduces both images to normal form. `y >= m` is folded through
    /// `b^m = a^t`, so the map itself is unchanged.
    pub fn canonical(&self, pres: &Presentation) -> EndoSpec {
        EndoSpec::from_images(pres.element(self.x1, self.y1), pres.element(self.x2, self.y2))
    }
}

impl FromStr for RawQuad {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("quadruple {s:?}: {e}")))?;
        match parts[..] {
            [x1, y1, x2, y2] => Ok(RawQuad { x1, y1, x2, y2 }),
            _ => Err(Error::Parse(format!(
                "quadruple {s:?}: expected four comma-separated integers x1,y1,x2,y2"
            ))),
        }
    }
}

/// The congruence a non-well-defined quadruple violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WellDefinedFailure {
    /// `m` does not divide `(d,t) y1`.
    Divisibility,
    /// The congruence coming from `sigma(b)^m = sigma(a)^t`.
    PowerRelation,
    /// The congruence coming from `sigma(b) sigma(a) sigma(b)^-1 = sigma(a)^r`.
    ConjugationRelation,
}

impl WellDefinedFailure {
    pub fn describe(&self) -> &'static str {
        match self {
            WellDefinedFailure::Divisibility => "m does not divide (d,t)*y1",
            WellDefinedFailure::PowerRelation => {
                "x2[m]_(r^y2) + t*y2 - x1[t]_(r^y1) - (t*y1/m)*t != 0 (mod n)"
            }
            WellDefinedFailure::ConjugationRelation => {
                "(r^y1 - 1)x2 + ([r]_(r^y1) - r^y2)x1 + ((r-1)y1/m)t != 0 (mod n)"
            }
        }
    }
}

impl fmt::Display for WellDefinedFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

/// Outcome of the congruence test for well-definedness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WellDefinedness {
    pub failure: Option<WellDefinedFailure>,
}

impl WellDefinedness {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// The well-definedness congruences for a fixed `(y1, y2)`.
///
/// Both remaining congruences are linear in `(x1, x2)` modulo `n`, so they are
/// stored as coefficient triples `c_x1 x1 + c_x2 x2 + c_0`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WellDefinedCongruences {
    n: u64,
    divisible: bool,
    power: [u64; 3],
    conjugation: [u64; 3],
    /// `t y1 / m` as an exact integer, when `m | t y1`.
    pub(crate) t_y1_over_m: u64,
}

impl WellDefinedCongruences {
    pub(crate) fn new(ctx: &GroupContext, y1: u64, y2: u64) -> Self {
        let pres = ctx.presentation();
        let (n, m, t, r) = (pres.n(), pres.m(), pres.t(), pres.r());
        let dt = gcd(ctx.d(), t);
        let divisible = (dt as u128 * y1 as u128).is_multiple_of(m as u128);
        if !divisible {
            return WellDefinedCongruences {
                n,
                divisible,
                power: [0; 3],
                conjugation: [0; 3],
                t_y1_over_m: 0,
            };
        }
        // m | (d,t) y1 makes both quotients exact
        let t_y1_over_m = (t as u128 * y1 as u128 / m as u128) as u64;
        let r1_y1_over_m = ((r - 1) as u128 * y1 as u128 / m as u128) as u64;
        let neg = |x: u64| (n - x % n) % n;

        let ry1 = powm(r, y1, n);
        let ry2 = powm(r, y2, n);
        let power = [
            neg(geom(t, ry1, n)),
            geom(m, ry2, n),
            add_mod(mul_mod(t, y2, n), neg(mul_mod(t_y1_over_m % n, t, n)), n),
        ];
        let conjugation = [
            add_mod(geom(r, ry1, n), neg(ry2), n),
            add_mod(ry1, n - 1, n),
            mul_mod(r1_y1_over_m % n, t, n),
        ];
        WellDefinedCongruences { n, divisible, power, conjugation, t_y1_over_m }
    }

    fn eval(&self, c: &[u64; 3], x1: u64, x2: u64) -> u64 {
        let n = self.n;
        add_mod(add_mod(mul_mod(c[0], x1, n), mul_mod(c[1], x2, n), n), c[2], n)
    }

    pub(crate) fn check(&self, x1: u64, x2: u64) -> WellDefinedness {
        let failure = if !self.divisible {
            Some(WellDefinedFailure::Divisibility)
        } else if self.eval(&self.power, x1, x2) != 0 {
            Some(WellDefinedFailure::PowerRelation)
        } else if self.eval(&self.conjugation, x1, x2) != 0 {
            Some(WellDefinedFailure::ConjugationRelation)
        } else {
            None
        };
        WellDefinedness { failure }
    }
}

/// Decides whether the generator images extend to a homomorphism, using the
/// three congruences on `(x1, y1, x2, y2)`.
pub fn is_well_defined(ctx: &GroupContext, spec: &EndoSpec) -> WellDefinedness {
    WellDefinedCongruences::new(ctx, spec.y1, spec.y2).check(spec.x1, spec.x2)
}

/// Decides well-definedness by checking the defining relations on the images
/// directly: `sigma(a)^n = e`, `sigma(b)^m = sigma(a)^t` and
/// `sigma(b) sigma(a) sigma(b)^-1 = sigma(a)^r`.
pub fn is_well_defined_oracle(pres: &Presentation, spec: &EndoSpec) -> bool {
    let (sa, sb) = (spec.image_a(), spec.image_b());
    pres.pow(sa, pres.n()).is_identity()
        && pres.pow(sb, pres.m()) == pres.pow(sa, pres.t())
        && pres.mul(sb, pres.mul(sa, pres.inv(sb))) == pres.pow(sa, pres.r())
}

/// Image of `a^u b^v`:
/// `a^(x1 [u]_(r^y1) + r^(y1 u) x2 [v]_(r^y2)) b^(y1 u + y2 v)`.
///
/// Only meaningful for well-defined specs.
pub fn apply(pres: &Presentation, spec: &EndoSpec, e: Element) -> Element {
    let (n, r) = (pres.n(), pres.r());
    let head = mul_mod(spec.x1, geom(e.u, powm(r, spec.y1, n), n), n);
    let twist = powm(r, spec.y1 * e.u, n);
    let tail = mul_mod(twist, mul_mod(spec.x2, geom(e.v, powm(r, spec.y2, n), n), n), n);
    let b_exp = spec.y1 as u128 * e.u as u128 + spec.y2 as u128 * e.v as u128;
    pres.reduce(add_mod(head, tail, n), b_exp)
}

/// The quadruple of `first . second` (apply `second`, then `first`).
pub fn compose(pres: &Presentation, first: &EndoSpec, second: &EndoSpec) -> EndoSpec {
    EndoSpec::from_images(
        apply(pres, first, second.image_a()),
        apply(pres, first, second.image_b()),
    )
}

/// All `n^2 m^2` canonical quadruples in `(y1, y2, x1, x2)` order.
pub fn all_quadruples(pres: &Presentation) -> impl Iterator<Item = EndoSpec> {
    let (n, m) = (pres.n(), pres.m());
    (0..m).flat_map(move |y1| {
        (0..m).flat_map(move |y2| {
            (0..n).flat_map(move |x1| (0..n).map(move |x2| EndoSpec { x1, y1, x2, y2 }))
        })
    })
}
