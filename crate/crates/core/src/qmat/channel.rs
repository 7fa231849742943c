use nalgebra::{Complex, DMatrix};

use super::hermitian::{CMatrix, CVector, Hermitian};
use super::states::{Density, PureState};
use super::subsystems::{check_permutation, check_profile, check_subset, permutation_map, restore_order};
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Completely positive trace-preserving map, stored as Kraus operators with
/// the Choi matrix `J = sum_ij |i><j| (x) N(|i><j|)` cached alongside.
///
/// The Choi matrix has the profile `dims_in ++ dims_out`.
#[derive(Debug, Clone)]
pub struct Channel<T: Scalar> {
    kraus: Vec<CMatrix<T>>,
    dims_in: Vec<usize>,
    dims_out: Vec<usize>,
    choi: Hermitian<T>,
}

fn choi_from_kraus<T: Scalar>(kraus: &[CMatrix<T>], dims_in: &[usize], dims_out: &[usize]) -> Hermitian<T> {
    let (din, dout) = (dims_in.iter().product::<usize>(), dims_out.iter().product::<usize>());
    let mut j = CMatrix::zeros(din * dout, din * dout);
    for k in kraus {
        let v = CVector::from_fn(din * dout, |f, _| k[(f % dout, f / dout)]);
        j += &v * v.adjoint();
    }
    let mut dims = dims_in.to_vec();
    dims.extend_from_slice(dims_out);
    Hermitian::from_parts(j, dims)
}

impl<T: Scalar> Channel<T> {
    /// Validates shapes, `sum K^dagger K = I` and the Choi invariants.
    pub fn new(kraus: Vec<CMatrix<T>>, dims_in: Vec<usize>, dims_out: Vec<usize>) -> Result<Self> {
        let din: usize = dims_in.iter().product();
        let dout: usize = dims_out.iter().product();
        check_profile(&dims_in, din)?;
        check_profile(&dims_out, dout)?;
        if kraus.is_empty() {
            return Err(Error::Invalid { kind: "channel", detail: "no Kraus operators".into() });
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (dout, din)) {
            return Err(domain(format!(
                "Kraus operator is {}x{}, expected {dout}x{din}",
                k.nrows(),
                k.ncols()
            )));
        }
        let tol = T::of(T::CPTP_TOL);
        let sum = kraus.iter().fold(CMatrix::zeros(din, din), |acc, k| acc + k.adjoint() * k);
        let dev = max_abs(&(sum - CMatrix::identity(din, din)));
        if dev > tol {
            return Err(Error::Invalid {
                kind: "channel",
                detail: format!("sum of K^dagger K deviates from identity by {dev}"),
            });
        }
        let choi = choi_from_kraus(&kraus, &dims_in, &dims_out);
        let ch = Self { kraus, dims_in, dims_out, choi };
        ch.check_choi()?;
        Ok(ch)
    }

    fn check_choi(&self) -> Result<()> {
        if self.choi.lambda_min() < -T::of(T::PSD_TOL) {
            return Err(Error::Invalid {
                kind: "channel",
                detail: format!("Choi matrix has eigenvalue {}", self.choi.lambda_min()),
            });
        }
        let n_in = self.dims_in.len();
        let marg = self.choi.partial_trace(&(0..n_in).collect::<Vec<_>>())?;
        let dev = max_abs(&(marg.matrix() - CMatrix::identity(self.dim_in(), self.dim_in())));
        if dev > T::of(T::CPTP_TOL) {
            return Err(Error::Invalid {
                kind: "channel",
                detail: format!("Choi marginal deviates from identity by {dev}"),
            });
        }
        Ok(())
    }

    /// Recovers a minimal Kraus set from a Choi matrix with profile `dims_in ++ dims_out`.
    pub fn from_choi(choi: &Hermitian<T>, dims_in: Vec<usize>, dims_out: Vec<usize>) -> Result<Self> {
        let din: usize = dims_in.iter().product();
        let dout: usize = dims_out.iter().product();
        if choi.dim() != din * dout {
            return Err(domain(format!("Choi dimension {} is not {din}*{dout}", choi.dim())));
        }
        let s = choi.spectrum();
        if s.min() < -T::of(T::PSD_TOL) {
            return Err(Error::Invalid {
                kind: "channel",
                detail: format!("Choi matrix has eigenvalue {}", s.min()),
            });
        }
        let floor = T::of(T::SUPPORT_TOL) * s.abs_max();
        let kraus: Vec<CMatrix<T>> = s
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > floor)
            .map(|(c, &l)| {
                let a = T::cplx(l.sqrt());
                CMatrix::from_fn(dout, din, |o, i| s.vectors[(i * dout + o, c)] * a)
            })
            .collect();
        Self::new(kraus, dims_in, dims_out)
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let d = dims.iter().product();
        Self::trusted(vec![CMatrix::identity(d, d)], dims.clone(), dims)
    }

    pub fn unitary(u: CMatrix<T>, dims: Vec<usize>) -> Result<Self> {
        Self::new(vec![u], dims.clone(), dims)
    }

    /// Discards the input and prepares `tau`.
    pub fn replacer(tau: &Density<T>, dims_in: Vec<usize>) -> Result<Self> {
        let din: usize = dims_in.iter().product();
        let s = tau.spectrum();
        let floor = T::of(T::SUPPORT_TOL) * s.abs_max();
        let mut kraus = Vec::new();
        for (c, &l) in s.values.iter().enumerate() {
            if l <= floor {
                continue;
            }
            let a = T::cplx(l.sqrt());
            for i in 0..din {
                kraus.push(CMatrix::from_fn(tau.dim(), din, |o, col| {
                    if col == i {
                        s.vectors[(o, c)] * a
                    } else {
                        Complex::new(T::zero(), T::zero())
                    }
                }));
            }
        }
        Self::new(kraus, dims_in, tau.dims().to_vec())
    }

    /// `X -> (1 - p) X + p tr(X) I/d`, where `p` is the replacement probability.
    pub fn depolarizing(p: T, d: usize) -> Result<Self> {
        if p < T::zero() || p > T::one() {
            return Err(crate::error::parameter(format!("depolarizing probability {p} outside [0, 1]")));
        }
        let id = Self::identity(vec![d]);
        let rep = Self::replacer(&Density::maximally_mixed(vec![d]), vec![d])?;
        Self::mixture(&[(T::one() - p, &id), (p, &rep)])
    }

    /// Qubit amplitude damping with decay probability `gamma`.
    pub fn amplitude_damping(gamma: T) -> Result<Self> {
        if gamma < T::zero() || gamma > T::one() {
            return Err(crate::error::parameter(format!("damping {gamma} outside [0, 1]")));
        }
        let z = T::cplx(T::zero());
        let k0 = CMatrix::from_row_slice(2, 2, &[T::cplx(T::one()), z, z, T::cplx((T::one() - gamma).sqrt())]);
        let k1 = CMatrix::from_row_slice(2, 2, &[z, T::cplx(gamma.sqrt()), z, z]);
        Self::new(vec![k0, k1], vec![2], vec![2])
    }

    /// Unitary that reorders subsystems: output position `p` carries input subsystem `perm[p]`.
    pub fn permutation(dims: Vec<usize>, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, dims.len())?;
        let (out_dims, map) = permutation_map(&dims, perm);
        let d = map.len();
        let mut u = CMatrix::zeros(d, d);
        for (new, &old) in map.iter().enumerate() {
            u[(new, old)] = T::cplx(T::one());
        }
        Ok(Self::trusted(vec![u], dims, out_dims))
    }

    /// Convex combination of channels with identical dimensions.
    pub fn mixture(parts: &[(T, &Self)]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| domain("empty mixture"))?.1;
        let total = parts.iter().fold(T::zero(), |a, &(w, _)| a + w);
        if (total - T::one()).abs() > T::of(T::CPTP_TOL) || parts.iter().any(|&(w, _)| w < T::zero()) {
            return Err(crate::error::parameter("mixture weights must be a probability vector"));
        }
        let mut j = CMatrix::zeros(first.choi.dim(), first.choi.dim());
        for &(w, ch) in parts {
            if ch.dims_in != first.dims_in || ch.dims_out != first.dims_out {
                return Err(domain("mixture of channels with different dimensions"));
            }
            j += ch.choi.matrix() * T::cplx(w);
        }
        let choi = Hermitian::from_parts(j, first.choi.dims().to_vec());
        Self::from_choi(&choi, first.dims_in.clone(), first.dims_out.clone())
    }

    fn trusted(kraus: Vec<CMatrix<T>>, dims_in: Vec<usize>, dims_out: Vec<usize>) -> Self {
        let choi = choi_from_kraus(&kraus, &dims_in, &dims_out);
        Self { kraus, dims_in, dims_out, choi }
    }

    pub fn kraus(&self) -> &[CMatrix<T>] {
        &self.kraus
    }

    pub fn choi(&self) -> &Hermitian<T> {
        &self.choi
    }

    pub fn dims_in(&self) -> &[usize] {
        &self.dims_in
    }

    pub fn dims_out(&self) -> &[usize] {
        &self.dims_out
    }

    pub fn dim_in(&self) -> usize {
        self.dims_in.iter().product()
    }

    pub fn dim_out(&self) -> usize {
        self.dims_out.iter().product()
    }

    /// Parallel composition; the Kraus set is re-minimised when it outgrows the Choi rank bound.
    pub fn tensor(&self, other: &Self) -> Self {
        let kraus: Vec<CMatrix<T>> = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kronecker(b)))
            .collect();
        let mut dims_in = self.dims_in.clone();
        dims_in.extend_from_slice(&other.dims_in);
        let mut dims_out = self.dims_out.clone();
        dims_out.extend_from_slice(&other.dims_out);
        let ch = Self::trusted(kraus, dims_in, dims_out);
        if ch.kraus.len() > ch.dim_in() * ch.dim_out() {
            if let Ok(min) = Self::from_choi(&ch.choi, ch.dims_in.clone(), ch.dims_out.clone()) {
                return min;
            }
        }
        ch
    }

    pub fn power(&self, k: usize) -> Self {
        assert!(k >= 1, "channel power needs at least one copy");
        (1..k).fold(self.clone(), |acc, _| acc.tensor(self))
    }

    /// `then` after `self`.
    pub fn compose(&self, then: &Self) -> Result<Self> {
        if then.dim_in() != self.dim_out() {
            return Err(domain(format!(
                "cannot compose: output dimension {} vs input dimension {}",
                self.dim_out(),
                then.dim_in()
            )));
        }
        let kraus = then
            .kraus
            .iter()
            .flat_map(|l| self.kraus.iter().map(move |k| l * k))
            .collect();
        Ok(Self::trusted(kraus, self.dims_in.clone(), then.dims_out.clone()))
    }

    fn layout(&self, dims: &[usize], acting: &[usize]) -> Result<(Vec<usize>, usize)> {
        if acting.is_empty() {
            return Err(domain("channel must act on at least one subsystem"));
        }
        check_subset(acting, dims.len())?;
        let mut seen = acting.to_vec();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != acting.len() {
            return Err(domain("repeated subsystem in acting list"));
        }
        let acting_dim: usize = acting.iter().map(|&a| dims[a]).product();
        if acting_dim != self.dim_in() {
            return Err(domain(format!(
                "acting subsystems have dimension {acting_dim}, channel expects {}",
                self.dim_in()
            )));
        }
        let mut perm: Vec<usize> = (0..dims.len()).filter(|i| !acting.contains(i)).collect();
        let rest_dim = perm.iter().map(|&r| dims[r]).product();
        perm.extend_from_slice(acting);
        Ok((perm, rest_dim))
    }

    fn output_dims(&self, dims: &[usize], acting: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = (0..dims.len()).filter(|i| !acting.contains(i)).map(|i| dims[i]).collect();
        if self.dims_out.len() == acting.len() {
            out.extend_from_slice(&self.dims_out);
        } else {
            out.push(self.dim_out());
        }
        out
    }

    fn finish(&self, data: CMatrix<T>, dims: &[usize], acting: &[usize]) -> Result<Hermitian<T>> {
        let tmp_dims = self.output_dims(dims, acting);
        let n_out = tmp_dims.len() - (dims.len() - acting.len());
        let tmp = Hermitian::from_parts(data, tmp_dims);
        tmp.permute(&restore_order(dims.len(), acting, n_out))
    }

    /// Kraus action on the listed subsystems, identity elsewhere. When the
    /// channel's output profile has as many factors as `acting`, output
    /// factor `j` replaces input subsystem `acting[j]`; otherwise the whole
    /// output occupies one subsystem at the position of the first acting one.
    pub fn apply_hermitian(&self, x: &Hermitian<T>, acting: &[usize]) -> Result<Hermitian<T>> {
        let (perm, rest) = self.layout(x.dims(), acting)?;
        let xp = x.permute(&perm)?;
        let m = xp.matrix();
        let (din, dout) = (self.dim_in(), self.dim_out());
        let mut out = CMatrix::zeros(rest * dout, rest * dout);
        for r in 0..rest {
            for s in 0..rest {
                let block = m.view((r * din, s * din), (din, din));
                let mut acc = CMatrix::zeros(dout, dout);
                for k in &self.kraus {
                    acc += k * block * k.adjoint();
                }
                out.view_mut((r * dout, s * dout), (dout, dout)).copy_from(&acc);
            }
        }
        self.finish(out, x.dims(), acting)
    }

    pub fn apply(&self, rho: &Density<T>, acting: &[usize]) -> Result<Density<T>> {
        Density::from_channel_output(self.apply_hermitian(rho.op(), acting)?)
    }

    /// Same action as [`Channel::apply_hermitian`], computed by contracting with the Choi matrix.
    pub fn apply_via_choi(&self, x: &Hermitian<T>, acting: &[usize]) -> Result<Hermitian<T>> {
        let (perm, rest) = self.layout(x.dims(), acting)?;
        let xp = x.permute(&perm)?;
        let m = xp.matrix();
        let j = self.choi.matrix();
        let (din, dout) = (self.dim_in(), self.dim_out());
        let mut out = CMatrix::zeros(rest * dout, rest * dout);
        for r in 0..rest {
            for s in 0..rest {
                let mut acc = CMatrix::zeros(dout, dout);
                for i in 0..din {
                    for jj in 0..din {
                        let c = m[(r * din + i, s * din + jj)];
                        if c == Complex::new(T::zero(), T::zero()) {
                            continue;
                        }
                        acc += j.view((i * dout, jj * dout), (dout, dout)) * c;
                    }
                }
                out.view_mut((r * dout, s * dout), (dout, dout)).copy_from(&acc);
            }
        }
        self.finish(out, x.dims(), acting)
    }

    /// Output on a pure input, working at the vector level.
    pub fn apply_pure(&self, psi: &PureState<T>, acting: &[usize]) -> Result<Density<T>> {
        let (perm, rest) = self.layout(psi.dims(), acting)?;
        let pp = psi.permute(&perm)?;
        let din = self.dim_in();
        let dout = self.dim_out();
        // row-major reshape: psi[(r, i)] with r over the rest, i over the input
        let a = pp.amplitudes();
        let psi_mat = DMatrix::from_fn(rest, din, |r, i| a[r * din + i]);
        let mut out = CMatrix::zeros(rest * dout, rest * dout);
        for k in &self.kraus {
            let phi = &psi_mat * k.transpose();
            let v = CVector::from_fn(rest * dout, |f, _| phi[(f / dout, f % dout)]);
            out += &v * v.adjoint();
        }
        Density::from_channel_output(self.finish(out, psi.dims(), acting)?)
    }
}

fn max_abs<T: Scalar>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |a, z| a.max(z.norm_sqr().sqrt()))
}
