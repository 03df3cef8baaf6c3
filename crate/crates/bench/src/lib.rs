//! Benchmark fixtures shared by the criterion targets.

use metacyclic::{GroupContext, Presentation};

/// Groups the benchmarks run against, keyed by a short label.
pub fn fixtures() -> Vec<(&'static str, GroupContext)> {
    [
        ("q8", "4,2,2,3"),
        ("h_8_4_8_5", "8,4,8,5"),
        ("h_27_9_27_4", "27,9,27,4"),
        ("h_228_30_38_7", "228,30,38,7"),
    ]
    .into_iter()
    .map(|(label, text)| {
        let pres: Presentation = text.parse().expect("fixture presentation is valid");
        (label, GroupContext::new(pres).expect("fixture presentation is normalized"))
    })
    .collect()
}
