//! Dense linear algebra for quantum objects: Hermitian spectral calculus,
//! subsystem bookkeeping, states, channels and permutation symmetry.

mod channel;
mod hermitian;
mod states;
mod subsystems;
mod symmetry;

pub use channel::Channel;
pub use hermitian::{matrix_function, CMatrix, CVector, Hermitian, KernelPolicy, Spectrum};
pub use states::{Density, PureState};
pub use symmetry::{
    is_permutation_invariant, permutation_deviation, permutation_expectation, symmetric_purification, symmetrize,
    symmetrize_operator,
};
