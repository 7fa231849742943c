//! Quantum state and channel divergences, channel discrimination and
//! numerical checks of the accompanying inequalities.

// `!(x > 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chandiv;
pub mod discrim;
pub mod error;
pub mod qmat;
pub mod statediv;
pub mod verify;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type HermitianOperator = qmat::Hermitian<f64>;
pub type DensityOperator = qmat::Density<f64>;
pub type PureStateVector = qmat::PureState<f64>;
pub type QuantumChannel = qmat::Channel<f64>;
pub type DivergenceValue = statediv::Divergence<f64>;
