//! Brute-force automorphism decisions.
//!
//! Nothing in here reads prime profiles, Lambda classes or any derived
//! congruence: a quadruple is an automorphism iff its generator images satisfy
//! the defining relations and the induced map on all `n m` elements is
//! injective. Every function takes a bare [`Presentation`] to keep it that way.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::automorphism::{enumerate_parallel, AutomorphismCriterion, TheoremVerdict};
use crate::endomorphism::{is_well_defined_oracle, EndoSpec};
use crate::error::{Error, Result};
use crate::group::{Element, DEFAULT_ELEMENT_BOUND};
use crate::presentation::{GroupContext, Presentation};

/// Limits for brute-force work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleBudget {
    /// Largest group order for which images are tabulated.
    pub max_elements: u64,
    /// Largest number of quadruples a full scan may visit.
    pub max_quadruples: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_elements: DEFAULT_ELEMENT_BOUND,
            max_quadruples: 200_000_000,
        }
    }
}

/// Result of a full brute-force scan.
#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub presentation: Presentation,
    pub total_quadruples: u64,
    /// Sorted in `(y1, y2, x1, x2)` order.
    pub automorphisms: Vec<EndoSpec>,
    pub elapsed: Duration,
}

/// Tabulates `sigma(a)^u sigma(b)^v` over the whole group and checks that no
/// image repeats. `seen` and `images_a` are scratch buffers.
fn injective_on_group(
    pres: &Presentation,
    spec: &EndoSpec,
    seen: &mut Vec<bool>,
    images_a: &mut Vec<Element>,
) -> bool {
    let (n, m) = (pres.n(), pres.m());
    let (sa, sb) = (spec.image_a(), spec.image_b());

    images_a.clear();
    let mut power = Element::IDENTITY;
    for _ in 0..n {
        images_a.push(power);
        power = pres.mul(power, sa);
    }
    seen.clear();
    seen.resize((n * m) as usize, false);

    let mut b_power = Element::IDENTITY;
    for _ in 0..m {
        for &a_power in images_a.iter() {
            let image = pres.mul(a_power, b_power);
            let slot = (image.u * m + image.v) as usize;
            if std::mem::replace(&mut seen[slot], true) {
                return false;
            }
        }
        b_power = pres.mul(b_power, sb);
    }
    true
}

fn check_elements(pres: &Presentation, budget: &OracleBudget) -> Result<()> {
    if pres.order() > budget.max_elements {
        return Err(Error::ResourceLimit(format!(
            "{pres} has {} elements; the brute-force bound is {}",
            pres.order(),
            budget.max_elements
        )));
    }
    Ok(())
}

/// Decides automorphy by the defining relations plus injectivity.
pub fn is_automorphism_brute(
    pres: &Presentation,
    spec: &EndoSpec,
    budget: &OracleBudget,
) -> Result<bool> {
    check_elements(pres, budget)?;
    Ok(is_well_defined_oracle(pres, spec)
        && injective_on_group(pres, spec, &mut Vec::new(), &mut Vec::new()))
}

fn run_on<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers <= 1 {
        return job();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// Scans all `n^2 m^2` quadruples.
pub fn brute_enumerate(
    pres: &Presentation,
    budget: &OracleBudget,
    workers: usize,
) -> Result<OracleReport> {
    check_elements(pres, budget)?;
    let (n, m) = (pres.n(), pres.m());
    let total = (n * m) as u128 * (n * m) as u128;
    if total > budget.max_quadruples as u128 {
        return Err(Error::ResourceLimit(format!(
            "{pres} has {total} quadruples, above the brute-force budget of {}; \
             use the closed-form enumeration instead",
            budget.max_quadruples
        )));
    }
    let started = Instant::now();
    // one work item per (y1, y2); each worker keeps its own bitmap
    let slices: Vec<(u64, u64)> = (0..m).flat_map(|y1| (0..m).map(move |y2| (y1, y2))).collect();
    let parts: Vec<Vec<EndoSpec>> = run_on(workers, || {
        slices
            .par_iter()
            .map_init(
                || (Vec::new(), Vec::new()),
                |(seen, images), &(y1, y2)| {
                    let mut found = Vec::new();
                    for x1 in 0..n {
                        for x2 in 0..n {
                            let spec = EndoSpec { x1, y1, x2, y2 };
                            if is_well_defined_oracle(pres, &spec)
                                && injective_on_group(pres, &spec, seen, images)
                            {
                                found.push(spec);
                            }
                        }
                    }
                    found
                },
            )
            .collect()
    });
    Ok(OracleReport {
        presentation: *pres,
        total_quadruples: total as u64,
        automorphisms: parts.into_iter().flatten().collect(),
        elapsed: started.elapsed(),
    })
}

/// A quadruple on which the closed form and the brute force disagree.
#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub spec: EndoSpec,
    pub theorem: TheoremVerdict,
    pub oracle: bool,
}

/// Comparison of the closed-form set against the brute-force set.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub presentation: Presentation,
    /// `true` for a full scan, `false` for sampling.
    pub exhaustive: bool,
    pub theorem_count: u64,
    /// Full scans only.
    pub oracle_count: Option<u64>,
    pub checked: u64,
    pub disagreements: Vec<Disagreement>,
    pub elapsed: Duration,
}

impl EquivalenceReport {
    pub fn equal(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Computes both sets in full and lists every quadruple in their symmetric
/// difference together with the closed form's verdict.
pub fn verify_equivalence(
    ctx: &GroupContext,
    budget: &OracleBudget,
    workers: usize,
) -> Result<EquivalenceReport> {
    let started = Instant::now();
    let pres = ctx.presentation();
    let oracle = brute_enumerate(pres, budget, workers)?;
    let theorem = enumerate_parallel(ctx, workers);
    let crit = AutomorphismCriterion::new(ctx);

    let mut disagreements = Vec::new();
    let (mut i, mut j) = (0, 0);
    let (th, or) = (&theorem, &oracle.automorphisms);
    while i < th.len() || j < or.len() {
        let ord = match (th.get(i), or.get(j)) {
            (Some(a), Some(b)) => a.cmp(b),
            (Some(_), None) => std::cmp::Ordering::Less,
            _ => std::cmp::Ordering::Greater,
        };
        match ord {
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => {
                disagreements.push(Disagreement { spec: th[i], theorem: crit.verdict(&th[i]), oracle: false });
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                disagreements.push(Disagreement { spec: or[j], theorem: crit.verdict(&or[j]), oracle: true });
                j += 1;
            }
        }
    }
    Ok(EquivalenceReport {
        presentation: *pres,
        exhaustive: true,
        theorem_count: theorem.len() as u64,
        oracle_count: Some(oracle.automorphisms.len() as u64),
        checked: oracle.total_quadruples,
        disagreements,
        elapsed: started.elapsed(),
    })
}

/// Re-checks `samples` uniformly drawn accepted quadruples and `samples`
/// uniformly drawn rejected ones with the brute-force decider.
pub fn verify_sampled(
    ctx: &GroupContext,
    samples: usize,
    seed: u64,
    budget: &OracleBudget,
    workers: usize,
) -> Result<EquivalenceReport> {
    let started = Instant::now();
    let pres = ctx.presentation();
    check_elements(pres, budget)?;
    let (n, m) = (pres.n(), pres.m());
    let accepted = enumerate_parallel(ctx, workers);
    let crit = AutomorphismCriterion::new(ctx);
    let mut rng = StdRng::seed_from_u64(seed);

    let mut picks: Vec<EndoSpec> = (0..samples)
        .map(|_| accepted[rng.gen_range(0..accepted.len())])
        .collect();
    let total = (n * m) as u128 * (n * m) as u128;
    if (accepted.len() as u128) < total {
        let mut rejected = 0;
        while rejected < samples {
            let spec = EndoSpec {
                x1: rng.gen_range(0..n),
                y1: rng.gen_range(0..m),
                x2: rng.gen_range(0..n),
                y2: rng.gen_range(0..m),
            };
            if !crit.accepts(&spec) {
                picks.push(spec);
                rejected += 1;
            }
        }
    }

    let disagreements: Vec<Disagreement> = run_on(workers, || {
        picks
            .par_iter()
            .map_init(
                || (Vec::new(), Vec::new()),
                |(seen, images), spec| {
                    let theorem = crit.verdict(spec);
                    let oracle = is_well_defined_oracle(pres, spec)
                        && injective_on_group(pres, spec, seen, images);
                    (theorem.accepted() != oracle).then_some(Disagreement { spec: *spec, theorem, oracle })
                },
            )
            .flatten()
            .collect()
    });
    Ok(EquivalenceReport {
        presentation: *pres,
        exhaustive: false,
        theorem_count: accepted.len() as u64,
        oracle_count: None,
        checked: picks.len() as u64,
        disagreements,
        elapsed: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(n: u64, m: u64, t: u64, r: u64) -> Presentation {
        Presentation::validate(n, m, t, r).unwrap()
    }

    fn quad(x1: u64, y1: u64, x2: u64, y2: u64) -> EndoSpec {
        EndoSpec { x1, y1, x2, y2 }
    }

    #[test]
    fn brute_decisions() {
        let budget = OracleBudget::default();
        let q8 = pres(4, 2, 2, 3);
        assert!(is_automorphism_brute(&q8, &EndoSpec::IDENTITY, &budget).unwrap());
        assert!(is_automorphism_brute(&q8, &quad(1, 0, 1, 1), &budget).unwrap());
        assert!(!is_automorphism_brute(&q8, &quad(2, 0, 0, 1), &budget).unwrap());
        for p in [pres(228, 30, 38, 7), pres(3, 2, 3, 2), pres(1, 7, 1, 1), pres(9, 1, 9, 1)] {
            let id = EndoSpec::identity(&p);
            assert!(is_automorphism_brute(&p, &id, &budget).unwrap(), "{p}");
        }
    }

    #[test]
    fn budgets_are_enforced() {
        let tight = OracleBudget { max_elements: 100, max_quadruples: 1000 };
        let ex = pres(228, 30, 38, 7);
        assert!(matches!(
            is_automorphism_brute(&ex, &EndoSpec::IDENTITY, &tight),
            Err(Error::ResourceLimit(_))
        ));
        let err = brute_enumerate(&pres(12, 3, 12, 1), &tight, 1).unwrap_err();
        assert!(matches!(&err, Error::ResourceLimit(msg) if msg.contains("closed-form")));
    }

    #[test]
    fn brute_counts() {
        let budget = OracleBudget::default();
        let report = brute_enumerate(&pres(4, 2, 2, 3), &budget, 1).unwrap();
        assert_eq!(report.total_quadruples, 64);
        assert_eq!(report.automorphisms.len(), 24);
        assert!(report.automorphisms.contains(&EndoSpec::IDENTITY));

        let report = brute_enumerate(&pres(3, 2, 3, 2), &budget, 1).unwrap();
        assert_eq!(report.total_quadruples, 36);
        assert_eq!(report.automorphisms.len(), 6);

        // C2 x C2: a^2 = b^2 = e, abelian
        let report = brute_enumerate(&pres(2, 2, 2, 1), &budget, 1).unwrap();
        assert_eq!(report.total_quadruples, 16);
        assert_eq!(report.automorphisms.len(), 6);
    }

    #[test]
    fn brute_force_is_worker_independent() {
        let budget = OracleBudget::default();
        let p = pres(9, 3, 3, 4);
        let one = brute_enumerate(&p, &budget, 1).unwrap();
        let four = brute_enumerate(&p, &budget, 4).unwrap();
        assert_eq!(one.automorphisms, four.automorphisms);
        assert!(one.automorphisms.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn equivalence_on_q8() {
        let ctx = GroupContext::new(pres(4, 2, 2, 3)).unwrap();
        let report = verify_equivalence(&ctx, &OracleBudget::default(), 2).unwrap();
        assert!(report.equal());
        assert_eq!(report.theorem_count, 24);
        assert_eq!(report.oracle_count, Some(24));
    }

    #[test]
    fn sampled_equivalence_small() {
        let ctx = GroupContext::new(pres(8, 4, 8, 5)).unwrap();
        let report = verify_sampled(&ctx, 200, 7, &OracleBudget::default(), 2).unwrap();
        assert!(report.equal(), "{:?}", report.disagreements);
        assert_eq!(report.checked, 400);
    }
}
