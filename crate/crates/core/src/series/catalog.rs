//! The shipped example series.

use super::{parse_spec_str, SeriesSpec};

/// Valid catalog entries, in a fixed order.
pub const NAMES: [&str; 7] = [
    "full_O1_P2",
    "even_sublattice_P2",
    "segment_kappa1",
    "gap_semigroup",
    "deg_drop_line",
    "parabola_index2",
    "powers_023",
];

/// A table spec that violates `S_1 + S_1 ⊆ S_2`.
pub const BROKEN: &str = "broken_table";

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "full_O1_P2" => include_str!("../../catalog/full_O1_P2.json"),
        "even_sublattice_P2" => include_str!("../../catalog/even_sublattice_P2.json"),
        "segment_kappa1" => include_str!("../../catalog/segment_kappa1.json"),
        "gap_semigroup" => include_str!("../../catalog/gap_semigroup.json"),
        "deg_drop_line" => include_str!("../../catalog/deg_drop_line.json"),
        "parabola_index2" => include_str!("../../catalog/parabola_index2.json"),
        "powers_023" => include_str!("../../catalog/powers_023.json"),
        "broken_table" => include_str!("../../catalog/broken_table.json"),
        _ => return None,
    })
}

/// Loads a catalog spec by name. Panics on unknown names.
pub fn load(name: &str) -> SeriesSpec {
    let text = source(name).unwrap_or_else(|| panic!("unknown catalog entry {name}"));
    parse_spec_str(text).unwrap_or_else(|e| panic!("catalog entry {name} is invalid: {e}"))
}
