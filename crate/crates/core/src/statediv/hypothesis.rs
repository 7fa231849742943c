use std::cmp::Ordering;

use super::renyi::{check_dims, support};
use super::{Divergence, ErrorThreshold, ExtReal};
use crate::error::Result;
use crate::qmat::{CMatrix, Density, Hermitian, Spectrum};
use crate::scalar::Scalar;

/// Optimal test for `min tr[Pi sigma]` subject to `tr[Pi rho] >= 1 - eps`.
#[derive(Debug, Clone)]
pub struct NeymanPearson<T: Scalar> {
    /// Smallest achievable type II error.
    pub beta: T,
    /// Optimal `t` in `max_t (1 - eps) t - tr(t rho - sigma)_+`.
    pub multiplier: T,
    /// `{t rho > sigma} + q {t rho = sigma}`, randomised on the boundary.
    pub test: Hermitian<T>,
}

/// Value, one-sided derivatives and curvature of
/// `g(t) = (1 - eps) t - tr(t rho - sigma)_+` at a single `t`.
struct Probe<T: Scalar> {
    t: T,
    g: T,
    d_minus: T,
    d_plus: T,
    curvature: T,
    spectrum: Spectrum<T>,
    /// Diagonal of rho in the eigenbasis of `t rho - sigma`.
    weights: Vec<T>,
    positive: Vec<bool>,
    zero: Vec<bool>,
}

struct Problem<'a, T: Scalar> {
    rho: &'a CMatrix<T>,
    sigma: &'a CMatrix<T>,
    budget: T,
    rho_norm: T,
    sigma_norm: T,
}

impl<T: Scalar> Problem<'_, T> {
    fn probe(&self, t: T) -> Probe<T> {
        let a = self.rho * T::cplx(t) - self.sigma;
        let half = T::cplx(T::of(0.5));
        let spectrum = Spectrum::of(&((&a + a.adjoint()) * half));
        let r = spectrum.vectors.adjoint() * self.rho * &spectrum.vectors;
        let n = spectrum.dim();
        let scale = t * self.rho_norm + self.sigma_norm;
        let tol = T::of(64.0) * T::default_epsilon() * scale.max(T::default_epsilon());
        let positive: Vec<bool> = spectrum.values.iter().map(|&m| m > tol).collect();
        let zero: Vec<bool> = spectrum.values.iter().map(|&m| m.abs() <= tol).collect();
        let weights: Vec<T> = (0..n).map(|k| r[(k, k)].re.max(T::zero())).collect();
        let mut pos_mass = T::zero();
        let mut zero_mass = T::zero();
        let mut pos_part = T::zero();
        for k in 0..n {
            if positive[k] {
                pos_mass += weights[k];
                pos_part += spectrum.values[k];
            } else if zero[k] {
                zero_mass += weights[k];
            }
        }
        let mut curv = T::zero();
        for k in (0..n).filter(|&k| positive[k]) {
            for l in (0..n).filter(|&l| !positive[l] && !zero[l]) {
                curv += r[(k, l)].norm_sqr() / (spectrum.values[k] - spectrum.values[l]);
            }
        }
        Probe {
            t,
            g: self.budget * t - pos_part,
            d_minus: self.budget - pos_mass,
            d_plus: self.budget - pos_mass - zero_mass,
            curvature: -T::of(2.0) * curv,
            spectrum,
            weights,
            positive,
            zero,
        }
    }
}

/// Restricts both operators to the support of `rho + sigma`.
fn compress<T: Scalar>(rho: &Density<T>, sigma: &Density<T>) -> (CMatrix<T>, CMatrix<T>, Option<CMatrix<T>>) {
    let sum = rho.matrix() + sigma.matrix();
    let s = Spectrum::of(&sum);
    let keep = support(&s);
    if keep.len() == s.dim() {
        return (rho.matrix().clone(), sigma.matrix().clone(), None);
    }
    let v = CMatrix::from_fn(s.dim(), keep.len(), |r, c| s.vectors[(r, keep[c])]);
    let r = v.adjoint() * rho.matrix() * &v;
    let sg = v.adjoint() * sigma.matrix() * &v;
    (r, sg, Some(v))
}

const COMPRESS_ABOVE: usize = 32;

/// Solves the Neyman–Pearson problem through its dual
/// `beta = max_{t >= 0} (1 - eps) t - tr(t rho - sigma)_+`.
///
/// The objective is concave; its one-sided derivatives are
/// `(1 - eps) - tr[rho {t rho - sigma > 0}]` and the same with the zero
/// eigenspace included. The maximiser is bracketed on `[0, 2/eps]` and
/// located by a safeguarded mix of Newton steps (analytic curvature from
/// eigenvalue perturbation), linearised eigenvalue-crossing steps and
/// bisection. When `rho` and `sigma` commute the crossing steps land on the
/// breakpoints `t = 1/lambda` exactly.
pub fn neyman_pearson<T: Scalar>(
    rho: &Density<T>,
    sigma: &Density<T>,
    eps: ErrorThreshold<T>,
) -> Result<NeymanPearson<T>> {
    check_dims(rho, sigma)?;
    let eps = eps.epsilon();
    let dims = rho.dims().to_vec();
    let n = rho.dim();
    if eps >= T::one() {
        return Ok(NeymanPearson { beta: T::zero(), multiplier: T::zero(), test: Hermitian::zeros(dims) });
    }
    if eps <= T::zero() {
        let proj = rho.spectrum().projector(|l| l > T::of(T::SUPPORT_TOL) * rho.spectrum().abs_max());
        let test = Hermitian::new(proj, dims)?;
        let beta = test.trace_product(sigma.op()).max(T::zero());
        return Ok(NeymanPearson { beta, multiplier: T::infinity(), test });
    }

    let (r, s, iso) = if n > COMPRESS_ABOVE { compress(rho, sigma) } else { (rho.matrix().clone(), sigma.matrix().clone(), None) };
    let problem = Problem {
        rho: &r,
        sigma: &s,
        budget: T::one() - eps,
        rho_norm: rho.spectrum().max(),
        sigma_norm: sigma.spectrum().max(),
    };

    let opt = maximise(&problem, eps);
    let beta = opt.g.max(T::zero());
    let test = test_operator(&opt, T::one() - eps, iso.as_ref(), dims)?;
    Ok(NeymanPearson { beta, multiplier: opt.t, test })
}

fn maximise<T: Scalar>(problem: &Problem<'_, T>, eps: T) -> Probe<T> {
    let mut lo = problem.probe(T::zero());
    if lo.d_plus <= T::zero() {
        // the mass of rho outside supp(sigma) already covers the budget
        return lo;
    }
    let mut hi = problem.probe(T::of(2.0) / eps);
    if hi.d_minus >= T::zero() {
        return hi;
    }
    let mut last_width = hi.t - lo.t;
    let mut stalled = 0;
    let mut current_is_hi = true;
    for _ in 0..300 {
        if hi.t - lo.t <= T::of(4.0) * T::default_epsilon() * hi.t {
            break;
        }
        let from = if current_is_hi { &hi } else { &lo };
        let p = problem.probe(next_point(from, &lo, &hi, stalled >= 2));
        if p.d_minus >= T::zero() && p.d_plus <= T::zero() {
            return p;
        }
        if p.d_plus.abs() <= T::of(16.0) * T::default_epsilon() && !p.zero.iter().any(|&z| z) {
            return p;
        }
        if p.d_plus > T::zero() {
            lo = p;
            current_is_hi = false;
        } else {
            hi = p;
            current_is_hi = true;
        }
        let w = hi.t - lo.t;
        if w > T::of(0.5) * last_width {
            stalled += 1;
        } else {
            stalled = 0;
            last_width = w;
        }
    }
    if lo.g >= hi.g {
        lo
    } else {
        hi
    }
}

/// Next trial point strictly inside `(lo, hi)`.
fn next_point<T: Scalar>(from: &Probe<T>, lo: &Probe<T>, hi: &Probe<T>, force_bisect: bool) -> T {
    let mid = (lo.t + hi.t) * T::of(0.5);
    if force_bisect {
        return mid;
    }
    let inside = |t: T| t > lo.t && t < hi.t;
    let slope = if from.t == lo.t { from.d_plus } else { from.d_minus };
    if from.curvature < T::zero() {
        let t = from.t - slope / from.curvature;
        if inside(t) {
            return t;
        }
    }
    // linearised zero crossing of the eigenvalue closest to zero in the ascent direction
    let mut cand: Option<T> = None;
    for k in 0..from.spectrum.dim() {
        let rate = from.weights[k];
        if rate <= T::zero() || from.zero[k] {
            continue;
        }
        let tc = from.t - from.spectrum.values[k] / rate;
        let ahead = if slope > T::zero() { !from.positive[k] && tc > from.t } else { from.positive[k] && tc < from.t };
        if ahead && inside(tc) {
            cand = Some(match cand {
                Some(c) if (c - from.t).abs() <= (tc - from.t).abs() => c,
                _ => tc,
            });
        }
    }
    cand.unwrap_or(mid)
}

fn test_operator<T: Scalar>(p: &Probe<T>, budget: T, iso: Option<&CMatrix<T>>, dims: Vec<usize>) -> Result<Hermitian<T>> {
    let pos_mass = (0..p.weights.len()).filter(|&k| p.positive[k]).fold(T::zero(), |a, k| a + p.weights[k]);
    let zero_mass = (0..p.weights.len()).filter(|&k| p.zero[k]).fold(T::zero(), |a, k| a + p.weights[k]);
    let q = if zero_mass > T::zero() {
        ((budget - pos_mass) / zero_mass).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let small = p.spectrum.compose(|k, _| {
        if p.positive[k] {
            T::one()
        } else if p.zero[k] {
            q
        } else {
            T::zero()
        }
    });
    let full = match iso {
        Some(v) => v * small * v.adjoint(),
        None => small,
    };
    Hermitian::new(full, dims)
}

/// `-log` of the optimal type II error at type I error at most `eps`.
pub fn hypothesis_testing<T: Scalar>(
    rho: &Density<T>,
    sigma: &Density<T>,
    eps: ErrorThreshold<T>,
) -> Result<Divergence<T>> {
    let np = neyman_pearson(rho, sigma, eps)?;
    let ok = super::renyi::umegaki(rho, sigma)?.support_ok;
    if np.beta <= T::zero() {
        return Ok(Divergence::infinite(ok));
    }
    Ok(Divergence { value: ExtReal::from_scalar(-np.beta.log2()), support_ok: ok })
}

/// Classical Neyman–Pearson optimum for distributions `p`, `q`: outcomes
/// are accepted in decreasing likelihood-ratio order until the acceptance
/// mass under `p` reaches `1 - eps`, randomising on the last one.
pub fn hypothesis_testing_oracle<T: Scalar>(p: &[T], q: &[T], eps: T) -> T {
    assert_eq!(p.len(), q.len(), "distributions over different alphabets");
    let need = T::one() - eps;
    if need <= T::zero() {
        return T::infinity();
    }
    let mut idx: Vec<usize> = (0..p.len()).filter(|&i| p[i] > T::zero()).collect();
    // p_i / q_i descending, compared without division
    idx.sort_by(|&a, &b| (p[b] * q[a]).partial_cmp(&(p[a] * q[b])).unwrap_or(Ordering::Equal));
    let mut mass = T::zero();
    let mut beta = T::zero();
    for i in idx {
        if mass >= need {
            break;
        }
        let take = ((need - mass) / p[i]).min(T::one());
        mass += take * p[i];
        beta += take * q[i];
    }
    if beta <= T::zero() {
        T::infinity()
    } else {
        -beta.log2()
    }
}
