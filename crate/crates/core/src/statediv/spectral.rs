use super::hypothesis::hypothesis_testing;
use super::renyi::{check_dims, dmax, support};
use super::ErrorThreshold;
use crate::error::{parameter, Result};
use crate::qmat::{CMatrix, Density, Spectrum};
use crate::scalar::Scalar;

/// Which information-spectrum relative entropy to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumVariant {
    /// `sup { g : tr(rho {rho <= 2^g sigma}) <= eps }`
    Ds,
    /// `sup { g : tr(rho - 2^g sigma)_+ >= 1 - eps }`
    Lower,
    /// `inf { g : tr(rho - 2^g sigma)_+ <= eps }`
    Upper,
}

const BISECTION_TOL: f64 = 1e-12;

fn positive_part<T: Scalar>(rho: &CMatrix<T>, sigma: &CMatrix<T>, gamma: T) -> T {
    let m = rho - sigma * T::cplx(gamma.exp2());
    let half = T::cplx(T::of(0.5));
    Spectrum::of(&((&m + m.adjoint()) * half))
        .values
        .iter()
        .filter(|&&l| l > T::zero())
        .fold(T::zero(), |a, &l| a + l)
}

/// `tr(rho {rho <= c sigma})`, the kernel of `c sigma - rho` included.
fn below_mass<T: Scalar>(rho: &CMatrix<T>, sigma: &CMatrix<T>, gamma: T) -> T {
    let m = sigma * T::cplx(gamma.exp2()) - rho;
    let half = T::cplx(T::of(0.5));
    let s = Spectrum::of(&((&m + m.adjoint()) * half));
    let tol = T::of(64.0) * T::default_epsilon() * (T::one() + gamma.exp2());
    let proj = s.projector(|l| l >= -tol);
    (proj * rho).trace().re
}

/// Bisection for the boundary of `{g : pred(g)}` where `pred` holds below it.
fn boundary<T: Scalar>(mut inside: T, mut outside: T, pred: impl Fn(T) -> bool) -> T {
    for _ in 0..200 {
        if (outside - inside).abs() <= T::of(BISECTION_TOL) {
            break;
        }
        let mid = (inside + outside) * T::of(0.5);
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    (inside + outside) * T::of(0.5)
}

/// Information-spectrum relative entropies. `+inf` is returned when the
/// defining set is unbounded above.
pub fn info_spectrum<T: Scalar>(rho: &Density<T>, sigma: &Density<T>, eps: T, variant: SpectrumVariant) -> Result<T> {
    check_dims(rho, sigma)?;
    if !(eps > T::zero() && eps < T::one()) {
        return Err(parameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let (r, s) = (rho.matrix(), sigma.matrix());
    let dm = dmax(rho, sigma)?;
    let f = |g: T| positive_part(r, s, g);
    // an upper bracket beyond which f is at its limiting value
    let top = match dm.value.finite() {
        Some(x) => x + T::one(),
        None => {
            let mut g = T::of(8.0);
            while g < T::of(1000.0) && f(g) > f(T::of(2.0) * g) + T::of(1e-14) {
                g *= T::of(2.0);
            }
            g
        }
    };
    match variant {
        SpectrumVariant::Lower => {
            let need = T::one() - eps;
            if f(top) >= need {
                return Ok(T::infinity());
            }
            Ok(boundary(eps.log2(), top, |g| f(g) >= need))
        }
        SpectrumVariant::Upper => {
            if f(top) > eps {
                return Ok(T::infinity());
            }
            // f(g) >= 1 - 2^g > eps strictly below log(1 - eps)
            Ok(boundary(top, (T::one() - eps).log2() - T::one(), |g| f(g) <= eps))
        }
        SpectrumVariant::Ds => Ok(ds(rho, sigma, eps)),
    }
}

/// Generalised eigenvalues of `(rho, sigma)` on `supp(sigma)`, as `log` breakpoints.
fn breakpoints<T: Scalar>(rho: &Density<T>, sigma: &Density<T>) -> Vec<T> {
    let ss = sigma.spectrum();
    let keep = support(ss);
    let w = CMatrix::from_fn(ss.dim(), keep.len(), |r, c| {
        ss.vectors[(r, keep[c])] * T::cplx(ss.values[keep[c]].powf(T::of(-0.5)))
    });
    let m = w.adjoint() * rho.matrix() * &w;
    let half = T::cplx(T::of(0.5));
    let vals = Spectrum::of(&((&m + m.adjoint()) * half)).values;
    let floor = T::of(T::SUPPORT_TOL) * vals.last().copied().unwrap_or_else(T::zero).abs();
    let mut out: Vec<T> = vals.into_iter().filter(|&l| l > floor).map(|l| l.log2()).collect();
    out.dedup_by(|a, b| (*a - *b).abs() <= T::of(BISECTION_TOL));
    out
}

/// Scan over breakpoints and midpoints; the supremum is located by bisection
/// between the highest member and its successor, so a boundary tie resolves
/// to the smaller `gamma`.
fn ds<T: Scalar>(rho: &Density<T>, sigma: &Density<T>, eps: T) -> T {
    let (r, s) = (rho.matrix(), sigma.matrix());
    let member = |g: T| below_mass(r, s, g) <= eps;
    let bps = breakpoints(rho, sigma);
    let (first, last) = match (bps.first(), bps.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (T::zero(), T::zero()),
    };
    let mut pts = vec![first - T::one()];
    for (i, &b) in bps.iter().enumerate() {
        pts.push(b);
        if let Some(&next) = bps.get(i + 1) {
            pts.push((b + next) * T::of(0.5));
        }
    }
    pts.push(last + T::one());
    let flags: Vec<bool> = pts.iter().map(|&g| member(g)).collect();
    let Some(top) = flags.iter().rposition(|&f| f) else {
        return -T::infinity();
    };
    if top + 1 == pts.len() {
        return T::infinity();
    }
    boundary(pts[top], pts[top + 1], member)
}

/// Two-sided bounds on the smooth max-relative entropy:
/// `D_H^{eps'} + log(1 - eps - eps')` and `D_H^{1 - eps^2/2} + log(2/eps^2)`.
pub fn smooth_dmax_bounds<T: Scalar>(rho: &Density<T>, sigma: &Density<T>, eps: T, eps_prime: T) -> Result<(T, T)> {
    if !(eps > T::zero() && eps < T::one()) {
        return Err(parameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !(eps_prime > T::zero() && eps_prime < T::one() - eps) {
        return Err(parameter(format!("eps' must lie in (0, 1 - eps), got {eps_prime}")));
    }
    let two = T::of(2.0);
    let lower = hypothesis_testing(rho, sigma, ErrorThreshold::new(eps_prime)?)?.to_scalar()
        + (T::one() - eps - eps_prime).log2();
    let upper = hypothesis_testing(rho, sigma, ErrorThreshold::new(T::one() - eps * eps / two)?)?.to_scalar()
        + (two / (eps * eps)).log2();
    Ok((lower, upper))
}

/// `-a log a - (1 - a) log(1 - a)`, zero at the endpoints.
pub fn binary_entropy<T: Scalar>(alpha: T) -> Result<T> {
    if !(alpha >= T::zero() && alpha <= T::one()) {
        return Err(parameter(format!("binary entropy argument {alpha} outside [0, 1]")));
    }
    let term = |x: T| if x > T::zero() { -x * x.log2() } else { T::zero() };
    Ok(term(alpha) + term(T::one() - alpha))
}
