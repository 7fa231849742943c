//! Divergences between density operators.

mod hypothesis;
mod renyi;
mod spectral;

use std::fmt;

use crate::error::{parameter, Result};
use crate::scalar::Scalar;

pub use hypothesis::{hypothesis_testing, hypothesis_testing_oracle, neyman_pearson, NeymanPearson};
pub use renyi::{dmax, fidelity, petz_renyi, sandwiched_renyi, umegaki};
pub use spectral::{binary_entropy, info_spectrum, smooth_dmax_bounds, SpectrumVariant};

/// A real number or `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal<T> {
    Finite(T),
    PosInfinity,
}

impl<T: Scalar> ExtReal<T> {
    pub(crate) fn from_scalar(x: T) -> Self {
        if x.is_finite_value() {
            Self::Finite(x)
        } else {
            Self::PosInfinity
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            Self::Finite(x) => Some(x),
            Self::PosInfinity => None,
        }
    }

    /// The value as a scalar, with `+inf` mapped to the scalar infinity.
    pub fn to_scalar(&self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_scalar().as_f64()
    }
}

impl<T: Scalar> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(x) => write!(f, "{x}"),
            Self::PosInfinity => f.write_str("inf"),
        }
    }
}

/// A divergence value together with whether `supp(rho)` lies inside `supp(sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergence<T> {
    pub value: ExtReal<T>,
    pub support_ok: bool,
}

impl<T: Scalar> Divergence<T> {
    pub(crate) fn finite(value: T, support_ok: bool) -> Self {
        Self { value: ExtReal::from_scalar(value), support_ok }
    }

    pub(crate) fn infinite(support_ok: bool) -> Self {
        Self { value: ExtReal::PosInfinity, support_ok }
    }

    pub fn to_scalar(&self) -> T {
        self.value.to_scalar()
    }
}

/// Rényi order, any positive real except one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenyiOrder<T>(T);

impl<T: Scalar> RenyiOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if !(alpha > T::zero()) || alpha == T::one() || !alpha.is_finite_value() {
            return Err(parameter(format!("Renyi order must be positive, finite and not 1, got {alpha}")));
        }
        Ok(Self(alpha))
    }

    pub fn alpha(&self) -> T {
        self.0
    }
}

/// Type I error budget in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorThreshold<T>(T);

impl<T: Scalar> ErrorThreshold<T> {
    pub fn new(epsilon: T) -> Result<Self> {
        if !(epsilon >= T::zero() && epsilon <= T::one()) {
            return Err(parameter(format!("error threshold must lie in [0, 1], got {epsilon}")));
        }
        Ok(Self(epsilon))
    }

    pub fn epsilon(&self) -> T {
        self.0
    }
}
