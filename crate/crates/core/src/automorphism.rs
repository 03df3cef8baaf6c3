//! Closed-form recognition and enumeration of automorphisms.
//!
//! A quadruple `(x1, y1, x2, y2)` defines an automorphism exactly when the
//! generator images are well defined and clauses (i)-(vi) hold:
//!
//! * (i) `sigma` is bijective on each `p`-part of `H^ab` and injective on
//!   `[H,H]`. Where `H^ab_p` splits along `a` and `b` this reads
//!   `p` does not divide `y2` (Lambda'), `x1` (Lambda2, or Lambda1 with
//!   `beta = 0`) or `x1 y2 - x2 y1` (Lambda1 with `beta > 0`). When the
//!   relation `b^m = a^t` glues the two cyclic parts together the condition
//!   becomes `p` not dividing `y2` or `m x1 + t y1`, and on Lambda1 primes
//!   with `delta < alpha` the commutator `[b,a] = a^(r-1)` must keep its
//!   exact `p`-valuation;
//! * (ii) `m | (d,t) y1`, `m0 | y1` and `m0 | y2 - 1`;
//! * (iii) odd `p` in Lambda1: `m x2 = t(x1 + t y1/m - y2)` modulo `p^alpha`
//!   and `y2 = 1 + t y1/m` modulo `p^(alpha-delta)`;
//! * (iv) `2` in Lambda1 with `delta > 1` or `delta = alpha = 1`: the same
//!   pair modulo powers of 2, the second shifted by `mu(y1)`;
//! * (v) `delta = gamma = 1`, `alpha = 2`, `beta > 1`: `deg_2(y1) >= beta`;
//! * (vi) `delta = 1`, `alpha > 1`, `gamma > 1`: `2 | y1`,
//!   `deg_2(x2) >= alpha - beta - eps + 1` and
//!   `2^eps (y1 - y2 + 1) = 2 t y1/m` modulo `2^alpha`.
//!
//! Moduli `p^k` with `k <= 0` are 1. The 2-adic case `delta = gamma = 1`,
//! `alpha = 2`, `beta = 1` carries no condition beyond (i) and (ii).

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::endomorphism::{compose, EndoSpec, WellDefinedCongruences};
use crate::error::{invalid, Error, Result};
use crate::numtheory::{deg, gcd, mul_mod, powm, Valuation};
use crate::presentation::{GroupContext, LambdaClass, Presentation};

/// The part of the criterion a quadruple fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Clause {
    #[serde(rename = "WELLDEF")]
    WellDef,
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::WellDef => "WELLDEF",
            Clause::I => "I",
            Clause::II => "II",
            Clause::III => "III",
            Clause::IV => "IV",
            Clause::V => "V",
            Clause::VI => "VI",
        })
    }
}

/// Whether a quadruple is accepted, and if not, the first failing clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremVerdict {
    accepted: bool,
    failed_clause: Option<Clause>,
    detail: String,
}

impl TheoremVerdict {
    pub fn accepted(&self) -> bool {
        self.accepted
    }

    pub fn failed_clause(&self) -> Option<Clause> {
        self.failed_clause
    }

    pub fn detail(&self) -> &str {
        &self.detail
    }
}

impl fmt::Display for TheoremVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failed_clause {
            None => write!(f, "accepted"),
            Some(clause) => write!(f, "rejected at clause {clause}: {}", self.detail),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rejection {
    clause: Clause,
    prime: Option<u64>,
    reason: &'static str,
}

impl Rejection {
    fn new(clause: Clause, reason: &'static str) -> Self {
        Rejection { clause, prime: None, reason }
    }

    fn at(clause: Clause, p: u64, reason: &'static str) -> Self {
        Rejection { clause, prime: Some(p), reason }
    }

    fn into_verdict(self) -> TheoremVerdict {
        let detail = match self.prime {
            Some(p) => format!("{} (p = {p})", self.reason),
            None => self.reason.to_string(),
        };
        TheoremVerdict { accepted: false, failed_clause: Some(self.clause), detail }
    }
}

fn congruent(a: i128, b: i128, modulus: u64) -> bool {
    (a - b).rem_euclid(modulus as i128) == 0
}

/// Clause (i) at one prime. The induced map on `H^ab / p` must be bijective:
/// with relation rows `(d, 0)` and `(-t, m)` reduced mod `p`, that is a
/// determinant when both rows vanish and a single coefficient when they
/// span a line with annihilator `(fa, fb)`.
#[derive(Debug, Clone, Copy)]
enum AbelianCheck {
    Trivial,
    Determinant,
    Line { fa: u64, fb: u64 },
}

/// Clause (i), injectivity on `[H,H] = <a^(r-1)>` at one prime.
#[derive(Debug, Clone, Copy)]
enum CommutatorCheck {
    None,
    X1,
    /// `deg_p((r^y1 - 1) x2 - (r^y2 - 1) x1) = delta` with the expression
    /// taken mod `p^alpha`.
    Degree { full: u64, delta: u32 },
}

#[derive(Debug, Clone, Copy)]
struct UnitCheck {
    p: u64,
    abelian: AbelianCheck,
    commutator: CommutatorCheck,
}

fn abelian_check(p: u64, d: u64, m: u64, t: u64) -> AbelianCheck {
    let (d, m, t) = (d % p, m % p, t % p);
    match (d, m, t) {
        (0, 0, 0) => AbelianCheck::Determinant,
        (0, _, _) => AbelianCheck::Line { fa: m, fb: t },
        (_, 0, _) => AbelianCheck::Line { fa: 0, fb: 1 },
        _ => AbelianCheck::Trivial,
    }
}

impl UnitCheck {
    fn failure(&self, pres: &Presentation, x1: u64, y1: u64, x2: u64, y2: u64) -> Option<&'static str> {
        let p = self.p;
        let (x1p, y1p, x2p, y2p) = (x1 % p, y1 % p, x2 % p, y2 % p);
        let singular = match self.abelian {
            AbelianCheck::Trivial => None,
            AbelianCheck::Determinant => (x1p * y2p + p * p - x2p * y1p).is_multiple_of(p)
                .then_some("p divides x1*y2 - x2*y1"),
            AbelianCheck::Line { fa: 0, .. } => (y2p == 0).then_some("p divides y2"),
            AbelianCheck::Line { fb: 0, .. } => (x1p == 0).then_some("p divides x1"),
            AbelianCheck::Line { fa, fb } => ((x1p * fa + y1p * fb) % p == 0)
                .then_some("p divides m*x1 + t*y1"),
        };
        if singular.is_some() {
            return singular;
        }
        match self.commutator {
            CommutatorCheck::None => None,
            CommutatorCheck::X1 => (x1p == 0).then_some("p divides x1"),
            CommutatorCheck::Degree { full, delta } => {
                let r = pres.r() % full;
                let e1 = (powm(r, y1, full) + full - 1) % full;
                let e2 = (powm(r, y2, full) + full - 1) % full;
                let e = (mul_mod(e1, x2 % full, full) + full - mul_mod(e2, x1 % full, full)) % full;
                (deg(p, e) != Valuation::Finite(delta))
                    .then_some("deg_p((r^y1 - 1)x2 - (r^y2 - 1)x1) != delta")
            }
        }
    }
}

/// Which 2-adic clause applies.
#[derive(Debug, Clone, Copy)]
enum TwoAdic {
    NotApplicable,
    /// Clause (iv): moduli `2^alpha` and `2^(alpha-delta)`.
    Congruences { full: u64, reduced: u64 },
    /// Clause (v).
    Y1Valuation { beta: u32 },
    /// Clause (vi).
    Epsilon { alpha: u32, beta: u32, eps: u32 },
    /// `delta = gamma = 1`, `alpha = 2`, `beta = 1`.
    Uncovered,
}

/// The criterion for one group, with everything that depends only on the
/// group precomputed.
#[derive(Debug, Clone)]
pub struct AutomorphismCriterion<'a> {
    ctx: &'a GroupContext,
    dt: u64,
    units: Vec<UnitCheck>,
    /// Odd Lambda1 primes with their moduli `p^alpha` and `p^(alpha-delta)`.
    odd_lambda1: Vec<(u64, u64, u64)>,
    two: TwoAdic,
}

impl<'a> AutomorphismCriterion<'a> {
    pub fn new(ctx: &'a GroupContext) -> Self {
        let pres = ctx.presentation();
        let units = ctx
            .profiles()
            .iter()
            .map(|pp| {
                let commutator = match (pp.class, pp.delta) {
                    (LambdaClass::Lambda2, _) => CommutatorCheck::X1,
                    (LambdaClass::Lambda1, Valuation::Finite(delta)) if delta < pp.alpha => {
                        CommutatorCheck::Degree { full: pp.p_part_of_n(), delta }
                    }
                    _ => CommutatorCheck::None,
                };
                UnitCheck {
                    p: pp.p,
                    abelian: abelian_check(pp.p, ctx.d(), pres.m(), pres.t()),
                    commutator,
                }
            })
            .collect();
        let odd_lambda1 = ctx
            .profiles()
            .iter()
            .filter(|pp| pp.class == LambdaClass::Lambda1 && pp.p != 2)
            .map(|pp| (pp.p, pp.p_part_of_n(), pp.p.pow(pp.alpha_minus_delta())))
            .collect();
        let two = match ctx.two_in_lambda1() {
            None => TwoAdic::NotApplicable,
            Some(pp) => {
                let (alpha, beta, gamma) = (pp.alpha, pp.beta, pp.gamma);
                let delta_is_one = pp.delta == 1;
                if pp.delta > Valuation::Finite(1) || (delta_is_one && alpha == 1) {
                    TwoAdic::Congruences {
                        full: 1 << alpha,
                        reduced: 1 << pp.alpha_minus_delta(),
                    }
                } else if gamma == 1 && alpha == 2 && beta > 1 {
                    TwoAdic::Y1Valuation { beta }
                } else if gamma > 1 {
                    // here delta = 1 and alpha > 1
                    let eps = ctx.epsilon().expect("r is odd when 2 | r - 1");
                    TwoAdic::Epsilon { alpha, beta, eps }
                } else {
                    TwoAdic::Uncovered
                }
            }
        };
        AutomorphismCriterion {
            ctx,
            dt: gcd(ctx.d(), pres.t()),
            units,
            odd_lambda1,
            two,
        }
    }

    pub fn context(&self) -> &GroupContext {
        self.ctx
    }

    /// The conditions for a fixed `(y1, y2)`.
    pub fn slice(&self, y1: u64, y2: u64) -> CriterionSlice<'_> {
        let pres = self.ctx.presentation();
        let m = pres.m();
        let m0 = self.ctx.m0();
        let welldef = WellDefinedCongruences::new(self.ctx, y1, y2);
        let clause_ii = if !(self.dt as u128 * y1 as u128).is_multiple_of(m as u128) {
            Some(Rejection::new(Clause::II, "m does not divide (d,t)*y1"))
        } else if !y1.is_multiple_of(m0) {
            Some(Rejection::new(Clause::II, "m0 does not divide y1"))
        } else if !(y2 + m0 - 1).is_multiple_of(m0) {
            Some(Rejection::new(Clause::II, "m0 does not divide y2 - 1"))
        } else {
            None
        };
        let mu = match self.two {
            TwoAdic::Congruences { .. } => self.ctx.mu(y1).expect("2 lies in Lambda1"),
            _ => 0,
        };
        CriterionSlice {
            criterion: self,
            y1,
            y2,
            welldef,
            clause_ii,
            mu,
        }
    }

    pub fn verdict(&self, spec: &EndoSpec) -> TheoremVerdict {
        self.slice(spec.y1, spec.y2).verdict(spec.x1, spec.x2)
    }

    pub fn accepts(&self, spec: &EndoSpec) -> bool {
        self.slice(spec.y1, spec.y2).accepts(spec.x1, spec.x2)
    }
}

/// The criterion restricted to one `(y1, y2)`.
#[derive(Debug, Clone)]
pub struct CriterionSlice<'c> {
    criterion: &'c AutomorphismCriterion<'c>,
    y1: u64,
    y2: u64,
    welldef: WellDefinedCongruences,
    clause_ii: Option<Rejection>,
    mu: u64,
}

impl CriterionSlice<'_> {
    pub fn accepts(&self, x1: u64, x2: u64) -> bool {
        self.first_failure(x1, x2, true).is_none()
    }

    /// Accepts using clauses (i)-(vi) only, without the well-definedness
    /// congruences.
    pub fn accepts_by_clauses(&self, x1: u64, x2: u64) -> bool {
        self.first_failure(x1, x2, false).is_none()
    }

    pub fn verdict(&self, x1: u64, x2: u64) -> TheoremVerdict {
        match self.first_failure(x1, x2, true) {
            None => TheoremVerdict {
                accepted: true,
                failed_clause: None,
                detail: String::new(),
            },
            Some(rejection) => rejection.into_verdict(),
        }
    }

    fn first_failure(&self, x1: u64, x2: u64, with_welldef: bool) -> Option<Rejection> {
        let crit = self.criterion;
        let pres = crit.ctx.presentation();
        let (m, t) = (pres.m() as i128, pres.t() as i128);
        let (y1, y2) = (self.y1, self.y2);

        if with_welldef {
            if let Some(failure) = self.welldef.check(x1, x2).failure {
                return Some(Rejection::new(Clause::WellDef, failure.describe()));
            }
        }

        for check in &crit.units {
            if let Some(reason) = check.failure(pres, x1, y1, x2, y2) {
                return Some(Rejection::at(Clause::I, check.p, reason));
            }
        }

        if let Some(rejection) = self.clause_ii {
            return Some(rejection);
        }
        // from here on m | t y1
        let k = self.welldef.t_y1_over_m as i128;
        let (x1, x2) = (x1 as i128, x2 as i128);
        let (y1, y2) = (y1 as i128, y2 as i128);

        for &(p, full, reduced) in &crit.odd_lambda1 {
            if !congruent(m * x2, t * (x1 + k - y2), full) {
                return Some(Rejection::at(
                    Clause::III,
                    p,
                    "m*x2 != t(x1 + t*y1/m - y2) (mod p^alpha)",
                ));
            }
            if !congruent(y2, 1 + k, reduced) {
                return Some(Rejection::at(
                    Clause::III,
                    p,
                    "y2 != 1 + t*y1/m (mod p^(alpha-delta))",
                ));
            }
        }

        match crit.two {
            TwoAdic::Congruences { full, reduced } => {
                if !congruent(m * x2, t * (x1 + k - y2), full) {
                    return Some(Rejection::new(
                        Clause::IV,
                        "m*x2 != t(x1 + t*y1/m - y2) (mod 2^alpha)",
                    ));
                }
                if !congruent(y2, 1 + k + self.mu as i128, reduced) {
                    return Some(Rejection::new(
                        Clause::IV,
                        "y2 != 1 + t*y1/m + mu(y1) (mod 2^(alpha-delta))",
                    ));
                }
            }
            TwoAdic::Y1Valuation { beta } => {
                if deg(2, y1 as u64) < Valuation::Finite(beta) {
                    return Some(Rejection::new(Clause::V, "deg_2(y1) < beta_2"));
                }
            }
            TwoAdic::Epsilon { alpha, beta, eps } => {
                if y1 % 2 != 0 {
                    return Some(Rejection::new(Clause::VI, "y1 is odd"));
                }
                let bound = alpha as i64 - beta as i64 - eps as i64 + 1;
                if !deg(2, x2 as u64).at_least(bound) {
                    return Some(Rejection::new(
                        Clause::VI,
                        "deg_2(x2) < alpha_2 - beta_2 - eps + 1",
                    ));
                }
                let full = 1u64 << alpha;
                let lhs = (1i128 << eps.min(64)) * (y1 - y2 + 1);
                if !congruent(lhs, 2 * k, full) {
                    return Some(Rejection::new(
                        Clause::VI,
                        "2^eps (y1 - y2 + 1) != 2t*y1/m (mod 2^alpha)",
                    ));
                }
            }
            TwoAdic::NotApplicable | TwoAdic::Uncovered => {}
        }
        None
    }
}

/// Runs the criterion on one quadruple, reporting the first failing clause in
/// the order WELLDEF, I, II, III, IV, V, VI.
pub fn theorem_accepts(ctx: &GroupContext, spec: &EndoSpec) -> TheoremVerdict {
    AutomorphismCriterion::new(ctx).verdict(spec)
}

/// `(y1, y2)` pairs that can carry an automorphism: `y1` a multiple of both
/// `m / gcd(m, (d,t))` and `m0`, and `y2 = 1 (mod m0)`.
fn candidate_slices(ctx: &GroupContext) -> Vec<(u64, u64)> {
    let pres = ctx.presentation();
    let m = pres.m();
    let dt = gcd(ctx.d(), pres.t());
    let y1_step = m / gcd(m, dt);
    let m0 = ctx.m0();
    let y1_step = y1_step / gcd(y1_step, m0) * m0;
    let y2_start = 1 % m0;
    let mut out = Vec::new();
    for y1 in (0..m).step_by(y1_step as usize) {
        for y2 in (y2_start..m).step_by(m0 as usize) {
            out.push((y1, y2));
        }
    }
    out
}

fn slice_members(crit: &AutomorphismCriterion<'_>, y1: u64, y2: u64) -> Vec<EndoSpec> {
    let n = crit.ctx.presentation().n();
    let slice = crit.slice(y1, y2);
    let mut out = Vec::new();
    for x1 in 0..n {
        for x2 in 0..n {
            if slice.accepts(x1, x2) {
                out.push(EndoSpec { x1, y1, x2, y2 });
            }
        }
    }
    out
}

fn slice_count(crit: &AutomorphismCriterion<'_>, y1: u64, y2: u64) -> u64 {
    let n = crit.ctx.presentation().n();
    let slice = crit.slice(y1, y2);
    let mut count = 0;
    for x1 in 0..n {
        for x2 in 0..n {
            count += u64::from(slice.accepts(x1, x2));
        }
    }
    count
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers <= 1 {
        return job();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// Lazily yields every automorphism in `(y1, y2, x1, x2)` order.
pub fn enumerate(ctx: &GroupContext) -> impl Iterator<Item = EndoSpec> + '_ {
    let crit = AutomorphismCriterion::new(ctx);
    candidate_slices(ctx)
        .into_iter()
        .flat_map(move |(y1, y2)| slice_members(&crit, y1, y2))
}

/// All automorphisms, computed on `workers` threads. The result is in
/// `(y1, y2, x1, x2)` order whatever the worker count.
pub fn enumerate_parallel(ctx: &GroupContext, workers: usize) -> Vec<EndoSpec> {
    let crit = AutomorphismCriterion::new(ctx);
    let slices = candidate_slices(ctx);
    let parts: Vec<Vec<EndoSpec>> = with_workers(workers, || {
        slices
            .par_iter()
            .map(|&(y1, y2)| slice_members(&crit, y1, y2))
            .collect()
    });
    parts.into_iter().flatten().collect()
}

/// `|Aut(H)|`.
pub fn count(ctx: &GroupContext, workers: usize) -> u64 {
    let crit = AutomorphismCriterion::new(ctx);
    let slices = candidate_slices(ctx);
    with_workers(workers, || {
        slices
            .par_iter()
            .map(|&(y1, y2)| slice_count(&crit, y1, y2))
            .sum()
    })
}

/// Order of an automorphism under composition.
pub fn aut_order(ctx: &GroupContext, spec: &EndoSpec) -> Result<u64> {
    let pres = ctx.presentation();
    if !theorem_accepts(ctx, spec).accepted() {
        return invalid(format!("{spec} is not an automorphism of {pres}"));
    }
    let identity = EndoSpec::identity(pres);
    let limit = (pres.n() * pres.m()).pow(2);
    let mut power = *spec;
    let mut k = 1;
    while power != identity {
        if k >= limit {
            return Err(Error::Validation(format!("{spec} does not return to the identity")));
        }
        power = compose(pres, spec, &power);
        k += 1;
    }
    Ok(k)
}

/// The inverse automorphism, `spec^(k-1)` for `k` the order of `spec`.
pub fn aut_inverse(ctx: &GroupContext, spec: &EndoSpec) -> Result<EndoSpec> {
    let pres = ctx.presentation();
    let order = aut_order(ctx, spec)?;
    let mut inverse = EndoSpec::identity(pres);
    for _ in 1..order {
        inverse = compose(pres, spec, &inverse);
    }
    Ok(inverse)
}
