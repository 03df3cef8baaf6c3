//! Metacyclic presentations `<a, b | a^n = e, b^m = a^t, b a b^-1 = a^r>`
//! and the per-prime data the automorphism criterion is phrased in.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numtheory::{self, deg, deg_finite, factorize, gcd, gcd_ext, mul_order, powm, Valuation};

/// Largest accepted value for any presentation parameter.
pub const MAX_PARAM: u64 = (1 << 31) - 1;

/// A validated presentation H(n,m;t,r).
///
/// `t` and `r` are stored in the residue range `1..=n`, so `t = n` stands for
/// the split case `b^m = e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Presentation {
    n: u64,
    m: u64,
    t: u64,
    r: u64,
}

fn wrap(x: u64, n: u64) -> u64 {
    (x + n - 1) % n + 1
}

impl Presentation {
    /// Checks `r^m = 1` and `t(r-1) = 0` modulo `n`.
    pub fn validate(n: u64, m: u64, t: u64, r: u64) -> Result<Self> {
        for (name, value) in [("n", n), ("m", m), ("t", t), ("r", r)] {
            if value == 0 || value > MAX_PARAM {
                return invalid(format!("{name} = {value} is outside 1..={MAX_PARAM}"));
            }
        }
        let (t, r) = (wrap(t, n), wrap(r, n));
        if powm(r, m, n) != 1 % n {
            return Err(Error::Validation(format!(
                "r^m - 1 = {r}^{m} - 1 is not 0 (mod {n})"
            )));
        }
        if numtheory::mul_mod(t, r - 1, n) != 0 {
            return Err(Error::Validation(format!(
                "t(r-1) = {t}*{} is not 0 (mod {n})",
                r - 1
            )));
        }
        Ok(Presentation { n, m, t, r })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// Group order `n * m`.
    pub fn order(&self) -> u64 {
        self.n * self.m
    }

    pub fn is_normalized(&self) -> bool {
        self.n.is_multiple_of(self.t)
    }

    pub fn is_abelian(&self) -> bool {
        self.r % self.n == 1 % self.n
    }

    /// Rewrites the presentation so that `t` divides `n`.
    ///
    /// Takes Bezout `u n + v t = (n,t)`, lets `w` be the product of the primes
    /// of `m` not dividing `v`, and replaces `b` by `b^v'` with
    /// `v' = v + w n/(n,t)`. The new relations are `b'^m = a^(n,t)` and
    /// `b' a b'^-1 = a^(r^v')`. Presentations with `t | n` are returned as is.
    pub fn normalize(&self) -> Presentation {
        self.normalizing_exponent()
            .map(|v| {
                let t = gcd(self.n, self.t);
                let r = powm(self.r, v, self.n);
                Presentation::validate(self.n, self.m, t, wrap(r, self.n))
                    .expect("normalization preserves the defining congruences")
            })
            .unwrap_or(*self)
    }

    /// The exponent `v'` with `b' = b^v'` used by [`Presentation::normalize`],
    /// or `None` when no rewriting is needed.
    pub fn normalizing_exponent(&self) -> Option<u64> {
        if self.is_normalized() {
            return None;
        }
        let (n, t) = (self.n as i64, self.t as i64);
        let (g, _, v) = gcd_ext(n, t).expect("n is positive");
        let period = n / g;
        // smallest |v| in its class mod n/(n,t), ties toward positive
        let mut v = v.rem_euclid(period);
        if 2 * v > period {
            v -= period;
        }
        let w: i64 = factorize(self.m)
            .expect("m is positive")
            .primes()
            .filter(|&p| v % p as i64 != 0)
            .map(|p| p as i64)
            .product();
        let v_prime = v as i128 + w as i128 * period as i128;
        debug_assert!(v_prime > 0);
        debug_assert_eq!(gcd(v_prime as u64, self.m), 1);
        Some(v_prime as u64)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H({},{};{},{})", self.n, self.m, self.t, self.r)
    }
}

impl FromStr for Presentation {
    type Err = Error;

    /// Parses `"n,m,t,r"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("presentation {s:?}: {e}")))?;
        match parts[..] {
            [n, m, t, r] => Presentation::validate(n, m, t, r),
            _ => Err(Error::Parse(format!(
                "presentation {s:?}: expected four comma-separated integers n,m,t,r"
            ))),
        }
    }
}

/// Which part of the prime set a prime belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum LambdaClass {
    /// `p | n` and `p | r - 1`.
    #[serde(rename = "LAMBDA1")]
    Lambda1,
    /// `p | n`, `p` does not divide `r - 1`.
    #[serde(rename = "LAMBDA2")]
    Lambda2,
    /// `p` divides `m` only.
    #[serde(rename = "LAMBDA_PRIME")]
    LambdaPrime,
}

impl fmt::Display for LambdaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LambdaClass::Lambda1 => "Lambda1",
            LambdaClass::Lambda2 => "Lambda2",
            LambdaClass::LambdaPrime => "Lambda'",
        })
    }
}

/// Valuations of `n`, `m`, `t` and `r - 1` at one prime dividing `n m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimeProfile {
    pub p: u64,
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    /// Infinite exactly when `r = 1`.
    pub delta: Valuation,
    #[serde(rename = "lambda_class")]
    pub class: LambdaClass,
}

impl PrimeProfile {
    fn new(p: u64, pres: &Presentation) -> Self {
        let alpha = deg_finite(p, pres.n);
        let delta = deg(p, pres.r - 1);
        let class = if alpha == 0 {
            LambdaClass::LambdaPrime
        } else if delta.is_positive() {
            LambdaClass::Lambda1
        } else {
            LambdaClass::Lambda2
        };
        PrimeProfile {
            p,
            alpha,
            beta: deg_finite(p, pres.m),
            gamma: deg_finite(p, pres.t),
            delta,
            class,
        }
    }

    /// `p^alpha`, the p-part of `n`.
    pub fn p_part_of_n(&self) -> u64 {
        self.p.pow(self.alpha)
    }

    /// `alpha - delta` clamped at zero.
    pub fn alpha_minus_delta(&self) -> u32 {
        match self.delta {
            Valuation::Finite(d) => self.alpha.saturating_sub(d),
            Valuation::Infinite => 0,
        }
    }

    /// `min(alpha, delta)`, the valuation of `gcd(r - 1, n)`.
    pub fn delta0(&self) -> u32 {
        self.delta.finite().map_or(self.alpha, |d| d.min(self.alpha))
    }
}

/// A normalized presentation together with the derived data the automorphism
/// criterion reads: `d = gcd(r-1, n)`, `eps = deg_2(r+1)`, `m0`, and a
/// profile for every prime dividing `n m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupContext {
    presentation: Presentation,
    d: u64,
    epsilon: Option<u32>,
    m0: u64,
    profiles: Vec<PrimeProfile>,
}

impl GroupContext {
    /// Builds the context of a presentation with `t | n`.
    pub fn new(pres: Presentation) -> Result<Self> {
        if !pres.is_normalized() {
            return invalid(format!("{pres} is not normalized: t does not divide n"));
        }
        let d = gcd(pres.r - 1, pres.n);
        let epsilon = (pres.r % 2 == 1).then(|| deg_finite(2, pres.r + 1));
        let profiles: Vec<PrimeProfile> = factorize(pres.order())?
            .primes()
            .map(|p| PrimeProfile::new(p, &pres))
            .collect();
        let lambda2_part: u64 = profiles
            .iter()
            .filter(|pp| pp.class == LambdaClass::Lambda2)
            .map(PrimeProfile::p_part_of_n)
            .product();
        let m0 = mul_order(pres.r, lambda2_part)?;
        let ctx = GroupContext {
            presentation: pres,
            d,
            epsilon,
            m0,
            profiles,
        };
        debug_assert_eq!(ctx.check_consistency(), Ok(()));
        Ok(ctx)
    }

    /// Normalizes first if needed.
    pub fn from_presentation(pres: &Presentation) -> Result<Self> {
        Self::new(pres.normalize())
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// `deg_2(r + 1)`, present when `r` is odd.
    pub fn epsilon(&self) -> Option<u32> {
        self.epsilon
    }

    pub fn m0(&self) -> u64 {
        self.m0
    }

    pub fn profiles(&self) -> &[PrimeProfile] {
        &self.profiles
    }

    pub fn profile(&self, p: u64) -> Option<&PrimeProfile> {
        self.profiles.iter().find(|pp| pp.p == p)
    }

    pub fn primes_in(&self, class: LambdaClass) -> Vec<u64> {
        self.profiles
            .iter()
            .filter(|pp| pp.class == class)
            .map(|pp| pp.p)
            .collect()
    }

    /// The profile of 2 when `2` lies in Lambda1.
    pub fn two_in_lambda1(&self) -> Option<&PrimeProfile> {
        self.profile(2).filter(|pp| pp.class == LambdaClass::Lambda1)
    }

    /// The 2-adic correction `mu(y1)`: `2^(alpha-delta-1)` when
    /// `gamma != beta`, `min(beta, gamma) = alpha - delta` and
    /// `deg_2(y1) = beta - delta`; otherwise 0.
    pub fn mu(&self, y1: u64) -> Result<u64> {
        let Some(two) = self.two_in_lambda1() else {
            return invalid("mu(y1) is only defined when 2 lies in Lambda1");
        };
        let Valuation::Finite(delta) = two.delta else {
            return Ok(0);
        };
        let (alpha, beta, gamma) = (two.alpha as i64, two.beta as i64, two.gamma as i64);
        let delta = delta as i64;
        let applies = alpha > delta
            && gamma != beta
            && beta.min(gamma) == alpha - delta
            && deg(2, y1).equals(beta - delta);
        Ok(if applies { 1 << (alpha - delta - 1) } else { 0 })
    }

    /// Re-derives the inequalities that the defining congruences force on the
    /// profiles. A failure means the context was built from bad data.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let pres = &self.presentation;
        let n_from_profiles: u64 = self.profiles.iter().map(PrimeProfile::p_part_of_n).product();
        let m_from_profiles: u64 = self.profiles.iter().map(|pp| pp.p.pow(pp.beta)).product();
        if n_from_profiles != pres.n || m_from_profiles != pres.m {
            return Err("profiles do not multiply back to n and m".into());
        }
        for pp in &self.profiles {
            let p = pp.p;
            if pp.alpha > 0 && deg_finite(p, self.d) != pp.delta0() {
                return Err(format!("deg_{p}(d) != min(alpha, delta)"));
            }
            match pp.class {
                LambdaClass::Lambda1 => {
                    if pp.gamma > pp.alpha || pp.gamma < pp.alpha_minus_delta() {
                        return Err(format!("alpha - delta <= gamma <= alpha fails at {p}"));
                    }
                    let beta_bound_holds = if p == 2 && pp.delta == 1 && pp.beta > 0 {
                        let eps = self.epsilon.expect("r is odd when 2 | r - 1");
                        eps + pp.beta >= pp.alpha
                    } else {
                        pp.delta.at_least(pp.alpha as i64 - pp.beta as i64)
                    };
                    if !beta_bound_holds {
                        return Err(format!("the r^m = 1 valuation bound fails at {p}"));
                    }
                }
                LambdaClass::Lambda2 => {
                    if pp.gamma != pp.alpha {
                        return Err(format!("gamma != alpha at Lambda2 prime {p}"));
                    }
                    if p == 2 {
                        return Err("2 cannot lie in Lambda2".into());
                    }
                    if powm(pres.r, self.m0, pp.p_part_of_n()) != 1 {
                        return Err(format!("r^m0 != 1 modulo the {p}-part of n"));
                    }
                }
                LambdaClass::LambdaPrime => {}
            }
        }
        if self.m0 != 1 && self.primes_in(LambdaClass::Lambda2).is_empty() {
            return Err("m0 must be 1 when Lambda2 is empty".into());
        }
        if !pres.m.is_multiple_of(self.m0) {
            return Err(format!("m0 = {} does not divide m", self.m0));
        }
        Ok(())
    }
}

/// Every valid presentation with `t | n` and `n m <= max_order`, ordered by
/// `(n, m, t, r)`.
pub fn normalized_presentations(max_order: u64) -> Vec<Presentation> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        for m in 1..=max_order / n {
            for t in (1..=n).filter(|t| n % t == 0) {
                for r in 1..=n {
                    if let Ok(pres) = Presentation::validate(n, m, t, r) {
                        out.push(pres);
                    }
                }
            }
        }
    }
    out
}
