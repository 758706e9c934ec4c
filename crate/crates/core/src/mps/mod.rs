//! Translation-invariant matrix product states.
//!
//! Transfer-operator convention: `T_X[(a,c),(b,e)] = Σ_ij X_ij A^j[a,b] conj(A^i[c,e])`
//! with row-major pairing of bond indices, so `T_X vec(Y) = vec(Σ_ij X_ij A^j Y A^{i†})`.
//! In canonical form `Σ_i A^{i†} A^i = 1`, the left fixed point is `vec(1)`
//! and the right fixed point is `vec(ρ_R)` with `Tr ρ_R = 1`.

pub mod dense;
mod rep;
mod symmetric;
mod tensor;

pub use rep::{spin1, spin1_pi_rotations, spin1_z2z2, OnsiteRep};
pub use symmetric::{
    aklt, apply_kraus_trajectory, extract_virtual_rep, random_symmetric_mps, twisted_sector_charge,
    extract_with, virtual_matrix, virtual_rep_of_class, StateSpectra, SymmetricMps, VirtualRep, MAX_RETRIES,
};
pub use tensor::{canonical_boundaries, Boundaries, canonicalize, is_injective, transfer_operator, FixedPoints, MpsTensor};

pub use crate::linalg::leading_eigs;
