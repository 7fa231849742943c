use nalgebra::Complex;

use super::{Divergence, RenyiOrder};
use crate::error::{domain, Result};
use crate::qmat::{CMatrix, Density, Spectrum};
use crate::scalar::Scalar;

pub(super) fn check_dims<T: Scalar>(rho: &Density<T>, sigma: &Density<T>) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(domain(format!("states have dimensions {} and {}", rho.dim(), sigma.dim())));
    }
    Ok(())
}

/// Indices of eigenvalues above the relative support threshold.
pub(super) fn support<T: Scalar>(s: &Spectrum<T>) -> Vec<usize> {
    let floor = T::of(T::SUPPORT_TOL) * s.abs_max();
    (0..s.dim()).filter(|&i| s.values[i] > floor).collect()
}

/// Both spectra, the squared overlaps `|<u_i|w_j>|^2` and the support data.
struct Pair<T: Scalar> {
    p: Vec<T>,
    q: Vec<T>,
    overlap: Vec<Vec<T>>,
    rho_support: Vec<usize>,
    sigma_support: Vec<usize>,
    support_ok: bool,
}

impl<T: Scalar> Pair<T> {
    fn new(rho: &Density<T>, sigma: &Density<T>) -> Result<Self> {
        check_dims(rho, sigma)?;
        let (sr, ss) = (rho.spectrum(), sigma.spectrum());
        let o = sr.vectors.adjoint() * &ss.vectors;
        let n = rho.dim();
        let overlap: Vec<Vec<T>> = (0..n).map(|i| (0..n).map(|j| o[(i, j)].norm_sqr()).collect()).collect();
        let rho_support = support(sr);
        let sigma_support = support(ss);
        let leak = rho_support.iter().fold(T::zero(), |acc, &i| {
            let outside = (0..n)
                .filter(|j| !sigma_support.contains(j))
                .fold(T::zero(), |a, j| a + overlap[i][j]);
            acc + sr.values[i] * outside
        });
        Ok(Self {
            p: sr.values.clone(),
            q: ss.values.clone(),
            overlap,
            rho_support,
            sigma_support,
            support_ok: leak <= T::of(T::SUPPORT_TOL),
        })
    }
}

/// `tr[rho (log rho - log sigma)]`.
pub fn umegaki<T: Scalar>(rho: &Density<T>, sigma: &Density<T>) -> Result<Divergence<T>> {
    let pr = Pair::new(rho, sigma)?;
    if !pr.support_ok {
        return Ok(Divergence::infinite(false));
    }
    let mut d = T::zero();
    for &i in &pr.rho_support {
        let p = pr.p[i];
        d += p * p.log2();
        for &j in &pr.sigma_support {
            d -= p * pr.overlap[i][j] * pr.q[j].log2();
        }
    }
    Ok(Divergence::finite(d, true))
}

/// `log tr[rho^a sigma^(1-a)] / (a - 1)`.
pub fn petz_renyi<T: Scalar>(rho: &Density<T>, sigma: &Density<T>, order: RenyiOrder<T>) -> Result<Divergence<T>> {
    let a = order.alpha();
    let pr = Pair::new(rho, sigma)?;
    if a > T::one() && !pr.support_ok {
        return Ok(Divergence::infinite(false));
    }
    let mut qa = T::zero();
    for &i in &pr.rho_support {
        let pa = pr.p[i].powf(a);
        for &j in &pr.sigma_support {
            qa += pa * pr.q[j].powf(T::one() - a) * pr.overlap[i][j];
        }
    }
    if qa <= T::zero() {
        return Ok(Divergence::infinite(pr.support_ok));
    }
    Ok(Divergence::finite(qa.log2() / (a - T::one()), pr.support_ok))
}

/// `sigma^g rho sigma^g` on `supp(sigma)`, expressed in sigma's eigenbasis.
fn conjugated<T: Scalar>(rho: &Density<T>, sigma: &Density<T>, g: T) -> (CMatrix<T>, bool) {
    let ss = sigma.spectrum();
    let keep = support(ss);
    let w = CMatrix::from_fn(ss.dim(), keep.len(), |r, c| ss.vectors[(r, keep[c])]);
    let mut m = w.adjoint() * rho.matrix() * &w;
    // mass of rho that stays inside supp(sigma)
    let inside = m.trace().re;
    for (c, &j) in keep.iter().enumerate() {
        let s = Complex::new(ss.values[j].powf(g), T::zero());
        m.row_mut(c).iter_mut().for_each(|z| *z *= s);
        m.column_mut(c).iter_mut().for_each(|z| *z *= s);
    }
    let ok = T::one() - inside <= T::of(T::SUPPORT_TOL);
    (m, ok)
}

fn hermitian_eigenvalues<T: Scalar>(m: &CMatrix<T>) -> Vec<T> {
    let half = Complex::new(T::of(0.5), T::zero());
    let sym = (m + m.adjoint()) * half;
    Spectrum::of(&sym).values
}

/// `log tr[(sigma^g rho sigma^g)^a] / (a - 1)` with `g = (1 - a) / 2a`.
pub fn sandwiched_renyi<T: Scalar>(
    rho: &Density<T>,
    sigma: &Density<T>,
    order: RenyiOrder<T>,
) -> Result<Divergence<T>> {
    check_dims(rho, sigma)?;
    let a = order.alpha();
    let g = (T::one() - a) / (T::of(2.0) * a);
    let (m, ok) = conjugated(rho, sigma, g);
    if a > T::one() && !ok {
        return Ok(Divergence::infinite(false));
    }
    let q = hermitian_eigenvalues(&m)
        .into_iter()
        .filter(|&l| l > T::zero())
        .fold(T::zero(), |acc, l| acc + l.powf(a));
    if q <= T::zero() {
        return Ok(Divergence::infinite(ok));
    }
    Ok(Divergence::finite(q.log2() / (a - T::one()), ok))
}

/// `log` of the largest eigenvalue of `sigma^(-1/2) rho sigma^(-1/2)` on `supp(sigma)`.
pub fn dmax<T: Scalar>(rho: &Density<T>, sigma: &Density<T>) -> Result<Divergence<T>> {
    check_dims(rho, sigma)?;
    let (m, ok) = conjugated(rho, sigma, T::of(-0.5));
    if !ok {
        return Ok(Divergence::infinite(false));
    }
    let top = hermitian_eigenvalues(&m).last().copied().unwrap_or_else(T::zero);
    Ok(Divergence::finite(top.log2(), true))
}

/// `|| sqrt(rho) sqrt(sigma) ||_1`.
pub fn fidelity<T: Scalar>(rho: &Density<T>, sigma: &Density<T>) -> Result<T> {
    check_dims(rho, sigma)?;
    let root = |d: &Density<T>| d.spectrum().compose(|_, l| l.max(T::zero()).sqrt());
    let prod = root(rho) * root(sigma);
    let sv = prod.svd(false, false).singular_values;
    Ok(sv.iter().fold(T::zero(), |a, &s| a + s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::PureState;

    fn diag(p: &[f64]) -> Density<f64> {
        Density::diagonal(p, vec![p.len()]).unwrap()
    }

    fn order(a: f64) -> RenyiOrder<f64> {
        RenyiOrder::new(a).unwrap()
    }

    fn rotated() -> Density<f64> {
        let v = crate::qmat::CVector::from_vec(vec![Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)]);
        let pure = PureState::new(v, vec![2]).unwrap().to_density();
        pure.mix(&Density::maximally_mixed(vec![2]), 0.7).unwrap()
    }

    #[test]
    fn pure_versus_maximally_mixed() {
        let rho = Density::<f64>::basis(0, vec![2]).unwrap();
        let pi = Density::maximally_mixed(vec![2]);
        assert!((umegaki(&rho, &pi).unwrap().to_scalar() - 1.0).abs() < 1e-12);
        assert!((dmax(&rho, &pi).unwrap().to_scalar() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_relative_entropy() {
        let (p, q): ([f64; 2], [f64; 2]) = ([0.5, 0.5], [0.25, 0.75]);
        let expected: f64 = p.iter().zip(&q).map(|(a, b)| a * (a / b).log2()).sum();
        let d = umegaki(&diag(&p), &diag(&q)).unwrap().to_scalar();
        assert!((d - expected).abs() < 1e-14);
    }

    #[test]
    fn classical_renyi_and_dmax() {
        let (p, q): ([f64; 3], [f64; 3]) = ([0.1, 0.6, 0.3], [0.3, 0.3, 0.4]);
        for a in [0.3, 0.7, 2.0, 3.0] {
            let s: f64 = p.iter().zip(&q).map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum();
            let expected = s.log2() / (a - 1.0);
            let dp = petz_renyi(&diag(&p), &diag(&q), order(a)).unwrap().to_scalar();
            let ds = sandwiched_renyi(&diag(&p), &diag(&q), order(a)).unwrap().to_scalar();
            assert!((dp - expected).abs() < 1e-12, "petz {a}");
            assert!((ds - expected).abs() < 1e-12, "sandwiched {a}");
        }
        let ratio = p.iter().zip(&q).map(|(x, y)| x / y).fold(0.0, f64::max);
        assert!((dmax(&diag(&p), &diag(&q)).unwrap().to_scalar() - ratio.log2()).abs() < 1e-12);
    }

    #[test]
    fn identical_arguments_vanish() {
        let rho = rotated();
        assert!(umegaki(&rho, &rho).unwrap().to_scalar().abs() < 1e-12);
        assert!(dmax(&rho, &rho).unwrap().to_scalar().abs() < 1e-12);
        for a in [0.5, 2.0] {
            assert!(petz_renyi(&rho, &rho, order(a)).unwrap().to_scalar().abs() < 1e-12);
            assert!(sandwiched_renyi(&rho, &rho, order(a)).unwrap().to_scalar().abs() < 1e-12);
        }
    }

    #[test]
    fn support_violation() {
        let rho = Density::basis(1, vec![2]).unwrap();
        let sigma = Density::basis(0, vec![2]).unwrap();
        let d = umegaki(&rho, &sigma).unwrap();
        assert!(!d.support_ok && !d.value.is_finite());
        assert!(!dmax(&rho, &sigma).unwrap().value.is_finite());
        assert!(!sandwiched_renyi(&rho, &sigma, order(2.0)).unwrap().value.is_finite());
        // alpha < 1 stays finite when the supports overlap
        let half = Density::diagonal(&[0.5, 0.5], vec![2]).unwrap();
        let d = petz_renyi(&half, &sigma, order(0.5)).unwrap();
        assert!(!d.support_ok && d.value.is_finite());
        assert!((d.to_scalar() - (-2.0 * (0.5f64).sqrt().log2())).abs() < 1e-12);
    }

    #[test]
    fn sandwiched_half_is_fidelity() {
        let rho = rotated();
        let sigma = diag(&[0.8, 0.2]);
        let f = fidelity(&rho, &sigma).unwrap();
        let d = sandwiched_renyi(&rho, &sigma, order(0.5)).unwrap().to_scalar();
        assert!((d + 2.0 * f.log2()).abs() < 1e-12);
    }

    #[test]
    fn order_validation() {
        assert!(RenyiOrder::new(1.0).is_err());
        assert!(RenyiOrder::new(0.0).is_err());
        assert!(RenyiOrder::new(f64::NAN).is_err());
    }
}
