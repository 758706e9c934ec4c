//! Symmetry-protected topological order of translation-invariant matrix
//! product states under site-factorised quantum channels.
//!
//! * [`group`]: exact finite abelian group arithmetic, cocycles `ω_k`,
//!   endomorphisms and patterns of zeros.
//! * [`mps`]: MPS tensors, transfer operators, canonical form, AKLT and random
//!   symmetric states, virtual representations.
//! * [`channel`]: Kraus channels, superoperators, Lindbladians, symmetry
//!   classification and dilation, plus a zoo of named channels.
//! * [`observables`]: string order, patterns of zeros measured on states,
//!   irrep probabilities, time series and a dense brute-force oracle.

pub mod error;
pub mod group;
pub mod linalg;
pub mod mps;
pub mod channel;
pub mod observables;

pub use error::{Error, Result};

/// Complex scalar used everywhere.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMat = faer::Mat<C64>;
