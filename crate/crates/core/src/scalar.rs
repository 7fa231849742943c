//! Scalar abstraction shared by the spectral and divergence layers.

use std::fmt::{Debug, Display};

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type the linear-algebra core is generic over.
///
/// The tolerance constants are the per-precision noise floors used by the
/// validating constructors and the support / kernel decisions. They are
/// stored as `f64` and converted with [`Scalar::of`].
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Display + Debug + Send + Sync + 'static
{
    /// Relative max-norm tolerance on `A - A^dagger`.
    const HERMITICITY_TOL: f64;
    /// Eigenvalues in `[-PSD_TOL, 0]` are clamped to zero.
    const PSD_TOL: f64;
    /// Allowed deviation of a density operator's trace from one.
    const TRACE_TOL: f64;
    /// Relative eigenvalue threshold for support / rank decisions.
    const SUPPORT_TOL: f64;
    /// Tolerance on `sum_k K_k^dagger K_k = I` and the Choi marginal.
    const CPTP_TOL: f64;
    /// Allowed deviation of a state vector's norm from one.
    const NORM_TOL: f64;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }

    fn infinity() -> Self {
        Self::of(f64::INFINITY)
    }

    fn is_finite_value(self) -> bool {
        self.as_f64().is_finite()
    }

    fn cplx(re: Self) -> Complex<Self> {
        Complex::new(re, Self::zero())
    }
}

impl Scalar for f64 {
    const HERMITICITY_TOL: f64 = 1e-12;
    const PSD_TOL: f64 = 1e-10;
    const TRACE_TOL: f64 = 1e-10;
    const SUPPORT_TOL: f64 = 1e-10;
    const CPTP_TOL: f64 = 1e-9;
    const NORM_TOL: f64 = 1e-12;
}

impl Scalar for f32 {
    const HERMITICITY_TOL: f64 = 1e-5;
    const PSD_TOL: f64 = 1e-5;
    const TRACE_TOL: f64 = 1e-5;
    const SUPPORT_TOL: f64 = 1e-5;
    const CPTP_TOL: f64 = 1e-4;
    const NORM_TOL: f64 = 1e-5;
}

/// Base-2 logarithm; every entropy in the crate is measured in bits.
pub fn log2<T: Scalar>(x: T) -> T {
    x.log2()
}
