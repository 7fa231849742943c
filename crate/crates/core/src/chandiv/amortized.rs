use nalgebra::Complex;
use rayon::prelude::*;

use super::ascent::maximise;
use super::optimize::{better, channel_divergence};
use super::{DivergenceKind, OptimizerConfig};
use crate::error::{domain, parameter, Result};
use crate::qmat::CMatrix;
use crate::sample;
use crate::{DensityOperator, QuantumChannel};

/// A certified lower bound on the amortised divergence and the pair attaining it.
#[derive(Debug, Clone)]
pub struct AmortizedBound {
    /// `D(N(psi) || M(phi)) - D(psi || phi)`
    pub value: f64,
    pub psi: DensityOperator,
    pub phi: DensityOperator,
}

/// `G G^dagger / tr` from a flat `[re, im]` parameter block.
fn state_from(x: &[f64], dims: &[usize]) -> Result<DensityOperator> {
    let d: usize = dims.iter().product();
    let g = CMatrix::from_fn(d, d, |r, c| {
        let k = 2 * (r * d + c);
        Complex::new(x[k], x[k + 1])
    });
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    if !(tr > 0.0) {
        return Err(domain("degenerate parameter block"));
    }
    DensityOperator::from_matrix(w / Complex::new(tr, 0.0), dims.to_vec())
}

/// Parameters whose `G G^dagger / tr` reproduces `rho` (`G = sqrt(rho)`).
fn params_of(rho: &DensityOperator) -> Vec<f64> {
    let g = rho.spectrum().compose(|_, l| l.max(0.0).sqrt());
    let d = g.nrows();
    (0..d * d).flat_map(|k| {
        let z = g[(k / d, k % d)];
        [z.re, z.im]
    }).collect()
}

fn objective(
    n: &QuantumChannel,
    m: &QuantumChannel,
    kind: DivergenceKind,
    psi: &DensityOperator,
    phi: &DensityOperator,
) -> Result<f64> {
    let out = kind.evaluate(&n.apply(psi, &[1])?, &m.apply(phi, &[1])?)?.to_scalar();
    let input = kind.evaluate(psi, phi)?.to_scalar();
    if !input.is_finite() {
        // inputs that are infinitely far apart certify nothing
        return Ok(f64::NEG_INFINITY);
    }
    Ok(out - input)
}

/// Embeds a `[r, a]` pure-input state into a reference of size `ref_dim >= r`.
fn pad_reference(rho: &DensityOperator, ref_dim: usize) -> Result<DensityOperator> {
    let (r, a) = (rho.dims()[0], rho.dims()[1]);
    if ref_dim == r {
        return Ok(rho.clone());
    }
    let d = ref_dim * a;
    let src = rho.matrix();
    let m = CMatrix::from_fn(d, d, |i, j| {
        let (ri, ai) = (i / a, i % a);
        let (rj, aj) = (j / a, j % a);
        if ri < r && rj < r {
            src[(ri * a + ai, rj * a + aj)]
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    DensityOperator::from_matrix(m, vec![ref_dim, a])
}

/// Lower bound on the amortised divergence with reference dimension
/// `ref_dim` (default `|A|^2`). The pair `(psi*, psi*)` built from the
/// one-shot witness is always included, so the bound is at least the
/// one-shot channel-divergence estimate.
pub fn amortized_lowerbound(
    n: &QuantumChannel,
    m: &QuantumChannel,
    kind: DivergenceKind,
    ref_dim: Option<usize>,
    cfg: &OptimizerConfig,
) -> Result<AmortizedBound> {
    amortized_lowerbound_seeded(n, m, kind, ref_dim, cfg, &[])
}

pub fn amortized_lowerbound_seeded(
    n: &QuantumChannel,
    m: &QuantumChannel,
    kind: DivergenceKind,
    ref_dim: Option<usize>,
    cfg: &OptimizerConfig,
    seeds: &[(DensityOperator, DensityOperator)],
) -> Result<AmortizedBound> {
    if !matches!(kind, DivergenceKind::Umegaki | DivergenceKind::Sandwiched(_)) {
        return Err(parameter("amortised bounds support the Umegaki and sandwiched divergences"));
    }
    cfg.validate()?;
    kind.validate()?;
    let a = n.dim_in();
    let ref_dim = ref_dim.unwrap_or(a * a);
    if ref_dim == 0 {
        return Err(parameter("reference dimension must be positive"));
    }
    let dims = vec![ref_dim, a];
    let d = ref_dim * a;
    if d * n.dim_out().max(a) / a > super::DENSE_LIMIT {
        return Err(crate::Error::Resource(format!("reference dimension {ref_dim} is above the dense limit")));
    }
    if let Some((p, _)) = seeds.iter().find(|(p, q)| p.dim() != d || q.dim() != d) {
        return Err(domain(format!("seed pair has dimension {}, expected {d}", p.dim())));
    }

    let pair_params = |p: &DensityOperator, q: &DensityOperator| {
        let mut x = params_of(p);
        x.extend(params_of(q));
        x
    };
    let mut starts: Vec<Vec<f64>> = Vec::new();
    let one_shot = channel_divergence(n, m, kind, cfg)?;
    if ref_dim >= a {
        let w = pad_reference(&one_shot.witness.to_density(), ref_dim)?;
        starts.push(pair_params(&w, &w));
    }
    for (p, q) in seeds {
        starts.push(pair_params(p, q));
    }
    let fixed = starts.len();
    for r in 0..cfg.restarts {
        let mut rng = sample::rng(cfg.seed, (1u64 << 32) + r as u64);
        let p = sample::density(&mut rng, &dims, None);
        let q = sample::density(&mut rng, &dims, None);
        starts.push(pair_params(&p, &q));
    }
    let half = 2 * d * d;
    let f = |x: &[f64]| -> f64 {
        let run = || -> Result<f64> {
            let p = state_from(&x[..half], &dims)?;
            let q = state_from(&x[half..], &dims)?;
            objective(n, m, kind, &p, &q)
        };
        run().unwrap_or(f64::NEG_INFINITY)
    };
    let best = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, x0)| {
            let v0 = f(&x0);
            let res = maximise(x0.clone(), &[(0, half), (half, 2 * half)], f, cfg.max_iterations, cfg.convergence_tol);
            // seeds keep their exact value if the ascent cannot improve on it
            if i < fixed && v0 >= res.value {
                (v0, x0)
            } else {
                (res.value, res.x)
            }
        })
        .reduce_with(better)
        .expect("at least one start");
    let psi = state_from(&best.1[..half], &dims)?;
    let phi = state_from(&best.1[half..], &dims)?;
    let value = objective(n, m, kind, &psi, &phi)?;
    Ok(AmortizedBound { value, psi, phi })
}

/// Product of two pairs, regrouped from `R1 A1 R2 A2` to `[R1 R2, A1 A2]`,
/// as a seed for the tensor-product channel.
pub fn product_pair(
    first: &(DensityOperator, DensityOperator),
    second: &(DensityOperator, DensityOperator),
) -> Result<(DensityOperator, DensityOperator)> {
    let join = |x: &DensityOperator, y: &DensityOperator| -> Result<DensityOperator> {
        let (r1, a1, r2, a2) = (x.dims()[0], x.dims()[1], y.dims()[0], y.dims()[1]);
        x.tensor(y).permute(&[0, 2, 1, 3])?.regroup(vec![r1 * r2, a1 * a2])
    };
    Ok((join(&first.0, &second.0)?, join(&first.1, &second.1)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 2, max_iterations: 30, ..OptimizerConfig::default() }
    }

    #[test]
    fn seed_round_trip() {
        let mut r = sample::rng(5, 0);
        let rho = sample::density(&mut r, &[2, 2], None);
        let back = state_from(&params_of(&rho), &[2, 2]).unwrap();
        assert!(back.op().max_abs_diff(rho.op()) < 1e-12);
    }

    #[test]
    fn identical_channels_give_zero() {
        let ch = QuantumChannel::amplitude_damping(0.4).unwrap();
        let b = amortized_lowerbound(&ch, &ch, DivergenceKind::Umegaki, Some(2), &quick()).unwrap();
        assert!(b.value.abs() < 1e-6, "{}", b.value);
    }

    #[test]
    fn at_least_one_shot() {
        let n = QuantumChannel::amplitude_damping(0.1).unwrap();
        let m = QuantumChannel::depolarizing(0.5, 2).unwrap();
        let cfg = quick();
        let one = channel_divergence(&n, &m, DivergenceKind::Umegaki, &cfg).unwrap().value.to_scalar();
        let b = amortized_lowerbound(&n, &m, DivergenceKind::Umegaki, None, &cfg).unwrap();
        assert!(b.value >= one - 1e-9);
    }

    #[test]
    fn rejects_other_kinds() {
        let ch = QuantumChannel::identity(vec![2]);
        assert!(amortized_lowerbound(&ch, &ch, DivergenceKind::Dmax, None, &quick()).is_err());
    }
}
