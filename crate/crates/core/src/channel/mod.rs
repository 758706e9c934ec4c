//! Single-site quantum channels and Lindbladians.
//!
//! Superoperators use the same row-major vectorisation as the rest of the
//! crate: `vec(A X B) = (A ⊗ Bᵀ) vec(X)`, so a channel with Kraus operators
//! `K_i` has Liouville matrix `Σ_i K_i ⊗ conj(K_i)` and its Heisenberg dual is
//! the adjoint matrix.
//!
//! Operator sectors follow the convention used for end operators: `X` lies in
//! sector `α` when `U_h† X U_h = χ_α(h) X` for every `h`.

mod dilation;
mod kraus;
mod lindblad;
mod symmetry;
pub mod zoo;

pub use dilation::{dilate, Dilation};
pub use kraus::{validate, Channel, QuantumChannel, Superop, ValidationReport, COMPLETENESS_TOL};
pub use lindblad::{lindblad_symmetry, Lindbladian, LindbladSymmetry};
pub use symmetry::{
    classify, classify_with, detect_twist, detect_twist_with, genericness, genericness_with, is_strongly_symmetric,
    is_strongly_symmetric_with, is_weakly_symmetric, is_weakly_symmetric_with, joint_eigenbasis, Genericness, PhaseMap,
    SymmetryReport, Tolerances, Twist,
};
pub use zoo::{zoo, ZooItem};
