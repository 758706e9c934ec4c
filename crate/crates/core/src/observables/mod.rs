//! Probes of SPT order on states evolved by a site-factorised channel.
//!
//! A string `s(g, O^l, O^r)` of length `N` places `O^l` on one site, `U_g` on
//! the next `N` sites and `O^r` after them. Under a channel every site
//! operator is replaced by its Heisenberg image, so the bulk becomes
//! `M_g = E†(U_g)`.
//!
//! At `N = ∞` the value is the projection onto the leading eigenvector of
//! `T_{M_g}` with the unimodular phase stripped: strings whose leading
//! modulus is below `1 − 1e-10` give exactly 0, and moduli in
//! `[1 − 1e-8, 1 − 1e-10)` are flagged as indeterminate.

mod brute;
mod irreps;
mod pattern;
mod string;

pub use brute::{brute_force_expectation, ring_expectation, DensePath};
pub use irreps::{
    entanglement_bounds, inaccessible_entanglement, irrep_probabilities, irrep_probabilities_with, time_series, EntanglementCheck,
    IrrepProbabilities,
};
pub use pattern::{
    pattern_extract, pattern_extract_with, sector_samples, ColumnReport, ExtractOptions, PatternReport,
};
pub use string::{
    evolved_string_expectation, string_expectation, string_table, Length, Probe, StringOrderTable, StringSpec,
    StringValue, TableMode, GRAY_ZONE, UNIMODULAR_TOL,
};
