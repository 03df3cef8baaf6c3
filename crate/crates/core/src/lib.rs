//! Exact arithmetic in finite metacyclic groups
//! `H(n,m;t,r) = <a, b | a^n = e, b^m = a^t, b a b^-1 = a^r>`
//! and a closed-form description of their automorphisms.
//!
//! An automorphism is pinned down by the images `a -> a^x1 b^y1`,
//! `b -> a^x2 b^y2`. [`automorphism`] decides which quadruples
//! `(x1, y1, x2, y2)` qualify through congruence conditions on the prime
//! profile of the presentation; [`oracle`] decides the same question by brute
//! force so the two can be compared.
//!
//! ```
//! use metacyclic::{count, GroupContext, Presentation};
//!
//! let pres: Presentation = "228,30,38,7".parse().unwrap();
//! let ctx = GroupContext::new(pres).unwrap();
//! assert_eq!(count(&ctx, 1), 98_496);
//! ```

pub mod automorphism;
pub mod endomorphism;
pub mod error;
pub mod group;
pub mod numtheory;
pub mod oracle;
pub mod presentation;

pub use automorphism::{
    aut_inverse, aut_order, count, enumerate, enumerate_parallel, theorem_accepts,
    AutomorphismCriterion, Clause, TheoremVerdict,
};
pub use endomorphism::{
    apply, compose, is_well_defined, is_well_defined_oracle, EndoSpec, RawQuad,
    WellDefinedFailure, WellDefinedness,
};
pub use error::{Error, Result};
pub use group::{Element, RawElement};
pub use numtheory::{PrimeFactorization, Valuation};
pub use oracle::{
    brute_enumerate, is_automorphism_brute, verify_equivalence, verify_sampled,
    EquivalenceReport, OracleBudget, OracleReport,
};
pub use presentation::{GroupContext, LambdaClass, Presentation, PrimeProfile};
