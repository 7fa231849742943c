use std::cmp::Ordering;
use std::ops::{Add, Sub};
use std::sync::OnceLock;

use nalgebra::{Complex, DMatrix, DVector};

use super::subsystems::{check_permutation, check_profile, check_subset, permutation_map, split_indices};
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Eigendecomposition with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct Spectrum<T: Scalar> {
    pub values: Vec<T>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: CMatrix<T>,
}

impl<T: Scalar> Spectrum<T> {
    pub fn of(m: &CMatrix<T>) -> Self {
        let n = m.nrows();
        let eig = m.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap_or(Ordering::Equal)
        });
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    /// Largest eigenvalue magnitude.
    pub fn abs_max(&self) -> T {
        self.min().abs().max(self.max().abs())
    }

    /// `sum_i w_i |v_i><v_i|` for per-eigenvalue weights `w`.
    pub fn compose(&self, weights: impl Fn(usize, T) -> T) -> CMatrix<T> {
        let mut scaled = self.vectors.clone();
        for (c, &l) in self.values.iter().enumerate() {
            let w = T::cplx(weights(c, l));
            scaled.column_mut(c).iter_mut().for_each(|z| *z *= w);
        }
        scaled * self.vectors.adjoint()
    }

    /// Projector onto the eigenvectors selected by `keep`.
    pub fn projector(&self, keep: impl Fn(T) -> bool) -> CMatrix<T> {
        self.compose(|_, l| if keep(l) { T::one() } else { T::zero() })
    }
}

/// Dense Hermitian operator over a composite dimension profile.
#[derive(Debug, Clone)]
pub struct Hermitian<T: Scalar> {
    data: CMatrix<T>,
    dims: Vec<usize>,
    spectrum: OnceLock<Spectrum<T>>,
}

impl<T: Scalar> Hermitian<T> {
    /// Validates squareness, the profile and Hermiticity (relative to the
    /// largest entry), then stores the exactly Hermitian part.
    pub fn new(data: CMatrix<T>, dims: Vec<usize>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(domain(format!("matrix is {}x{}, not square", data.nrows(), data.ncols())));
        }
        check_profile(&dims, data.nrows())?;
        let n = data.nrows();
        let mut scale = T::one();
        let mut dev = T::zero();
        for i in 0..n {
            for j in 0..n {
                scale = scale.max(data[(i, j)].norm_sqr().sqrt());
                dev = dev.max((data[(i, j)] - data[(j, i)].conj()).norm_sqr().sqrt());
            }
        }
        if dev > T::of(T::HERMITICITY_TOL) * scale {
            return Err(Error::Invalid {
                kind: "Hermitian operator",
                detail: format!("max |A - A^dagger| = {dev} exceeds tolerance"),
            });
        }
        Ok(Self::from_parts(data, dims))
    }

    /// Single-subsystem convenience constructor.
    pub fn from_matrix(data: CMatrix<T>) -> Result<Self> {
        let n = data.nrows();
        Self::new(data, vec![n])
    }

    /// Trusted constructor: symmetrises away rounding noise.
    pub(crate) fn from_parts(data: CMatrix<T>, dims: Vec<usize>) -> Self {
        let half = T::cplx(T::of(0.5));
        let sym = (&data + data.adjoint()) * half;
        Self { data: sym, dims, spectrum: OnceLock::new() }
    }

    pub(crate) fn with_spectrum(data: CMatrix<T>, dims: Vec<usize>, spectrum: Spectrum<T>) -> Self {
        let h = Self::from_parts(data, dims);
        let _ = h.spectrum.set(spectrum);
        h
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self::from_parts(CMatrix::identity(n, n), dims)
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self::from_parts(CMatrix::zeros(n, n), dims)
    }

    pub fn diagonal(values: &[T], dims: Vec<usize>) -> Result<Self> {
        check_profile(&dims, values.len())?;
        let v = CVector::from_iterator(values.len(), values.iter().map(|&x| T::cplx(x)));
        Ok(Self::from_parts(CMatrix::from_diagonal(&v), dims))
    }

    /// `|v><v|` for an arbitrary (not necessarily normalised) vector.
    pub fn outer(v: &CVector<T>, dims: Vec<usize>) -> Result<Self> {
        check_profile(&dims, v.len())?;
        Ok(Self::from_parts(v * v.adjoint(), dims))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.data
    }

    /// Same matrix, different grouping into subsystems.
    pub fn regroup(&self, dims: Vec<usize>) -> Result<Self> {
        check_profile(&dims, self.dim())?;
        Ok(Self { data: self.data.clone(), dims, spectrum: self.spectrum.clone() })
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        self.spectrum.get_or_init(|| Spectrum::of(&self.data))
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.spectrum().values
    }

    pub fn lambda_min(&self) -> T {
        self.spectrum().min()
    }

    pub fn lambda_max(&self) -> T {
        self.spectrum().max()
    }

    pub fn trace(&self) -> T {
        (0..self.dim()).fold(T::zero(), |acc, i| acc + self.data[(i, i)].re)
    }

    /// `Re tr(self * other)`; exact for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(other.data.transpose().iter())
            .fold(T::zero(), |acc, (a, b)| acc + (*a * *b).re)
    }

    /// `<v| self |v>`.
    pub fn expectation(&self, v: &CVector<T>) -> T {
        (v.adjoint() * &self.data * v)[(0, 0)].re
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_parts(&self.data * T::cplx(s), self.dims.clone())
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).norm_sqr().sqrt()))
    }

    /// Sum of the positive eigenvalues, `tr X_+`.
    pub fn positive_part_trace(&self) -> T {
        self.eigenvalues().iter().fold(T::zero(), |acc, &l| acc + l.max(T::zero()))
    }

    pub fn trace_norm(&self) -> T {
        self.eigenvalues().iter().fold(T::zero(), |acc, &l| acc + l.abs())
    }

    /// Largest singular value, `||X||_inf`.
    pub fn operator_norm(&self) -> T {
        self.spectrum().abs_max()
    }

    /// Kronecker product; the profiles are concatenated.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_parts(self.data.kronecker(&other.data), dims)
    }

    /// Reorders subsystems so that new position `p` holds old subsystem `perm[p]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.dims.len())?;
        let (dims, map) = permutation_map(&self.dims, perm);
        let n = self.dim();
        let data = CMatrix::from_fn(n, n, |i, j| self.data[(map[i], map[j])]);
        let out = Self { data, dims, spectrum: OnceLock::new() };
        if let Some(s) = self.spectrum.get() {
            let vectors = CMatrix::from_fn(n, n, |i, c| s.vectors[(map[i], c)]);
            let _ = out.spectrum.set(Spectrum { values: s.values.clone(), vectors });
        }
        Ok(out)
    }

    /// Traces out every subsystem not listed in `keep`. The kept subsystems
    /// stay in their original relative order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        check_subset(keep, self.dims.len())?;
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        if keep.len() == self.dims.len() {
            return Ok(self.clone());
        }
        let kdims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let kd: usize = kdims.iter().product();
        let rd = self.dim() / kd;
        let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(kd); rd];
        for (f, (k, r)) in split_indices(&self.dims, &keep).into_iter().enumerate() {
            groups[r].push((f, k));
        }
        let mut out = CMatrix::zeros(kd, kd);
        for g in &groups {
            for &(f1, k1) in g {
                for &(f2, k2) in g {
                    out[(k1, k2)] += self.data[(f1, f2)];
                }
            }
        }
        let kdims = if kdims.is_empty() { vec![1] } else { kdims };
        Ok(Self::from_parts(out, kdims))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&CMatrix<T>, &CMatrix<T>) -> CMatrix<T>) -> Self {
        assert_eq!(self.dim(), other.dim(), "operator dimensions differ");
        Self::from_parts(f(&self.data, &other.data), self.dims.clone())
    }
}

impl<'a, T: Scalar> Add<&'a Hermitian<T>> for &'a Hermitian<T> {
    type Output = Hermitian<T>;
    fn add(self, rhs: &'a Hermitian<T>) -> Hermitian<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<'a, T: Scalar> Sub<&'a Hermitian<T>> for &'a Hermitian<T> {
    type Output = Hermitian<T>;
    fn sub(self, rhs: &'a Hermitian<T>) -> Hermitian<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// How `matrix_function` treats (numerically) zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelPolicy {
    /// Eigenvalues below the relative support threshold map to zero; `f`
    /// is only evaluated on the support.
    RestrictToSupport,
    /// Clamp near-zero eigenvalues to zero and evaluate `f` everywhere;
    /// a non-finite result is an error.
    ErrorOnKernel,
    /// Eigenvalues within the absolute clamp tolerance map to zero.
    MapZeroToZero,
}

/// Applies `f` to the spectrum of `h` and reassembles in the same eigenbasis.
pub fn matrix_function<T: Scalar>(
    h: &Hermitian<T>,
    f: impl Fn(T) -> T,
    policy: KernelPolicy,
) -> Result<Hermitian<T>> {
    let s = h.spectrum();
    let support_floor = T::of(T::SUPPORT_TOL) * s.abs_max();
    let clamp = T::of(T::PSD_TOL);
    let mut values = Vec::with_capacity(s.dim());
    for &l in &s.values {
        let v = match policy {
            KernelPolicy::RestrictToSupport if l.abs() <= support_floor => T::zero(),
            KernelPolicy::MapZeroToZero if l.abs() <= clamp => T::zero(),
            KernelPolicy::ErrorOnKernel => {
                let l = if l < T::zero() && l >= -clamp { T::zero() } else { l };
                f(l)
            }
            _ => f(l),
        };
        if !v.is_finite_value() {
            return Err(Error::SpectralDomain(format!("function undefined at eigenvalue {l}")));
        }
        values.push(v);
    }
    let data = s.compose(|i, _| values[i]);
    Ok(Hermitian::from_parts(data, h.dims.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> Hermitian<f64> {
        Hermitian::diagonal(v, vec![v.len()]).unwrap()
    }

    #[test]
    fn kronecker_of_diagonals() {
        let t = diag(&[1.0, 0.0]).tensor(&diag(&[1.0, 0.0]));
        assert!(t.max_abs_diff(&Hermitian::diagonal(&[1.0, 0.0, 0.0, 0.0], vec![2, 2]).unwrap()) == 0.0);
        assert_eq!(diag(&[1.0, 1.0]).tensor(&diag(&[1.0, 2.0, 3.0])).dims(), &[2, 3]);
    }

    #[test]
    fn positive_part() {
        assert!((diag(&[1.0, -2.0]).positive_part_trace() - 1.0).abs() < 1e-15);
        assert_eq!(diag(&[-1.0, -2.0]).positive_part_trace(), 0.0);
    }

    #[test]
    fn matrix_functions_on_diagonals() {
        let r = matrix_function(&diag(&[4.0, 9.0]), |x| x.sqrt(), KernelPolicy::ErrorOnKernel).unwrap();
        assert!(r.max_abs_diff(&diag(&[2.0, 3.0])) < 1e-14);
        let l = matrix_function(&diag(&[2.0, 4.0]), |x| x.log2(), KernelPolicy::ErrorOnKernel).unwrap();
        assert!(l.max_abs_diff(&diag(&[1.0, 2.0])) < 1e-14);
    }

    #[test]
    fn log_on_kernel() {
        let h = diag(&[0.0, 1.0]);
        let err = matrix_function(&h, |x| x.ln(), KernelPolicy::ErrorOnKernel);
        assert!(matches!(err, Err(Error::SpectralDomain(_))));
        let ok = matrix_function(&h, |x| x.ln(), KernelPolicy::RestrictToSupport).unwrap();
        assert!(ok.max_abs_diff(&diag(&[0.0, 0.0])) < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[Complex::new(1.0, 0.0), Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]);
        assert!(Hermitian::<f64>::from_matrix(m).is_err());
    }

    #[test]
    fn partial_trace_bad_index() {
        let h = Hermitian::<f64>::identity(vec![2, 2]);
        assert!(matches!(h.partial_trace(&[2]), Err(Error::Domain(_))));
        assert!(h.partial_trace(&[0, 1]).unwrap().max_abs_diff(&h) == 0.0);
    }

    #[test]
    fn f32_instantiation() {
        let h = Hermitian::<f32>::diagonal(&[0.25, 0.75], vec![2]).unwrap();
        assert!((h.trace() - 1.0).abs() < 1e-6);
        assert!((h.lambda_max() - 0.75).abs() < 1e-6);
    }
}
