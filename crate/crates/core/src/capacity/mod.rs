//! Monotone measures (capacities) and the aggregation operators built on them.
//!
//! Subsets of the ground set `{0, .., n-1}` are encoded as bitmasks: bit `i`
//! set means element `i` belongs to the subset. The JSON interchange format
//! uses 1-based element labels, see [`FuzzyMeasure::to_json`].

mod averaging;
mod measure;
mod two_additive;

pub use averaging::{owa, weighted_mean, WeightVector};
pub use measure::{
    choquet_general, interaction_index, mobius, shapley, validate_measure, FuzzyMeasure, Subset,
    MAX_GROUND_SIZE, MONOTONICITY_EPS,
};
pub use two_additive::{choquet_2additive, TwoAdditiveCapacity};

/// Number of elements in a subset.
#[inline]
pub fn cardinality(subset: Subset) -> usize {
    subset.count_ones() as usize
}

/// The full ground set `{0, .., n-1}` as a bitmask.
#[inline]
pub fn full_set(n: usize) -> Subset {
    if n >= 32 {
        Subset::MAX
    } else {
        (1 << n) - 1
    }
}

/// Renders a subset with 1-based labels, e.g. `{1,3}`.
pub fn subset_label(subset: Subset) -> String {
    let items: Vec<String> = (0..32)
        .filter(|i| subset & (1 << i) != 0)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{{{}}}", items.join(","))
}
