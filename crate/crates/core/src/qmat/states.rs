use nalgebra::Complex;

use super::hermitian::{CMatrix, CVector, Hermitian, Spectrum};
use super::subsystems::{check_permutation, check_profile, permutation_map};
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Positive semidefinite, unit-trace operator.
///
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero on construction.
#[derive(Debug, Clone)]
pub struct Density<T: Scalar> {
    op: Hermitian<T>,
}

impl<T: Scalar> Density<T> {
    pub fn new(op: Hermitian<T>) -> Result<Self> {
        let s = op.spectrum();
        let clamp = T::of(T::PSD_TOL);
        if s.min() < -clamp {
            return Err(Error::Invalid {
                kind: "density operator",
                detail: format!("eigenvalue {} is negative", s.min()),
            });
        }
        let tr = op.trace();
        if (tr - T::one()).abs() > T::of(T::TRACE_TOL) {
            return Err(Error::Invalid { kind: "density operator", detail: format!("trace is {tr}") });
        }
        if s.min() < T::zero() {
            let values: Vec<T> = s.values.iter().map(|&l| l.max(T::zero())).collect();
            let data = s.compose(|i, _| values[i]);
            let spectrum = Spectrum { values, vectors: s.vectors.clone() };
            let dims = op.dims().to_vec();
            return Ok(Self { op: Hermitian::with_spectrum(data, dims, spectrum) });
        }
        Ok(Self { op })
    }

    pub fn from_matrix(data: CMatrix<T>, dims: Vec<usize>) -> Result<Self> {
        Self::new(Hermitian::new(data, dims)?)
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[T], dims: Vec<usize>) -> Result<Self> {
        Self::new(Hermitian::diagonal(probs, dims)?)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        let op = Hermitian::identity(dims).scale(T::one() / T::of(n as f64));
        Self { op }
    }

    /// `|i><i|` in the computational basis.
    pub fn basis(index: usize, dims: Vec<usize>) -> Result<Self> {
        Ok(PureState::basis(index, dims)?.to_density())
    }

    pub fn op(&self) -> &Hermitian<T> {
        &self.op
    }

    pub fn into_op(self) -> Hermitian<T> {
        self.op
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        self.op.spectrum()
    }

    pub fn eigenvalues(&self) -> &[T] {
        self.op.eigenvalues()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { op: self.op.tensor(&other.op) }
    }

    pub fn tensor_power(&self, k: usize) -> Self {
        assert!(k >= 1, "tensor power needs at least one copy");
        (1..k).fold(self.clone(), |acc, _| acc.tensor(self))
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Ok(Self { op: self.op.partial_trace(keep)? })
    }

    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        Ok(Self { op: self.op.permute(perm)? })
    }

    pub fn regroup(&self, dims: Vec<usize>) -> Result<Self> {
        Ok(Self { op: self.op.regroup(dims)? })
    }

    /// `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &Self, w: T) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(domain("cannot mix states of different dimension"));
        }
        let op = &self.op.scale(w) + &other.op.scale(T::one() - w);
        Ok(Self { op })
    }

    /// Output of a trace-preserving map that is PSD up to rounding.
    pub(crate) fn from_channel_output(op: Hermitian<T>) -> Result<Self> {
        Self::new(op)
    }
}

/// Normalised state vector over a dimension profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T: Scalar> {
    amplitudes: CVector<T>,
    dims: Vec<usize>,
}

impl<T: Scalar> PureState<T> {
    pub fn new(amplitudes: CVector<T>, dims: Vec<usize>) -> Result<Self> {
        check_profile(&dims, amplitudes.len())?;
        let norm = amplitudes.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if (norm - T::one()).abs() > T::of(T::NORM_TOL) {
            return Err(Error::Invalid { kind: "pure state", detail: format!("norm is {norm}") });
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector<T>, dims: Vec<usize>) -> Result<Self> {
        check_profile(&dims, amplitudes.len())?;
        let norm = amplitudes.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt();
        if norm <= T::zero() || !norm.is_finite_value() {
            return Err(Error::Invalid { kind: "pure state", detail: "zero vector".into() });
        }
        Ok(Self { amplitudes: amplitudes * T::cplx(T::one() / norm), dims })
    }

    pub fn basis(index: usize, dims: Vec<usize>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if index >= n {
            return Err(domain(format!("basis index {index} out of range {n}")));
        }
        let mut v = CVector::zeros(n);
        v[index] = T::cplx(T::one());
        Self::new(v, dims)
    }

    /// `sum_i |i>|i> / sqrt(d)` on two `d`-dimensional systems.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = CVector::zeros(d * d);
        let a = T::cplx(T::one() / T::of(d as f64).sqrt());
        for i in 0..d {
            v[i * d + i] = a;
        }
        Self { amplitudes: v, dims: vec![d, d] }
    }

    pub fn amplitudes(&self) -> &CVector<T> {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn to_density(&self) -> Density<T> {
        let op = Hermitian::from_parts(&self.amplitudes * self.amplitudes.adjoint(), self.dims.clone());
        Density { op }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { amplitudes: self.amplitudes.kronecker(&other.amplitudes), dims }
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.dims.len())?;
        let (dims, map) = permutation_map(&self.dims, perm);
        let amplitudes = CVector::from_iterator(map.len(), map.iter().map(|&m| self.amplitudes[m]));
        Ok(Self { amplitudes, dims })
    }

    pub fn regroup(&self, dims: Vec<usize>) -> Result<Self> {
        check_profile(&dims, self.dim())?;
        Ok(Self { amplitudes: self.amplitudes.clone(), dims })
    }
}
