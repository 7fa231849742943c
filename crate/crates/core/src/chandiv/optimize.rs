use std::cmp::Ordering;

use nalgebra::Complex;
use rayon::prelude::*;

use super::ascent::maximise;
use super::{DivergenceKind, OptimizerConfig};
use crate::error::{domain, Error, Result};
use crate::qmat::CVector;
use crate::sample;
use crate::statediv::Divergence;
use crate::{PureStateVector, QuantumChannel};

/// Largest dense operator dimension the estimators will build.
pub const DENSE_LIMIT: usize = 256;

/// A channel-divergence lower estimate and the input that attains it.
#[derive(Debug, Clone)]
pub struct ChannelDivergence {
    pub value: Divergence<f64>,
    /// Pure input on `R (x) A` with profile `[dim_in, dim_in]`.
    pub witness: PureStateVector,
}

/// Profile of the optimised inputs: a reference of the input's size, then the input.
pub fn input_dims(n: &QuantumChannel) -> Vec<usize> {
    vec![n.dim_in(), n.dim_in()]
}

fn check_pair(n: &QuantumChannel, m: &QuantumChannel) -> Result<()> {
    if n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out() {
        return Err(domain(format!(
            "channels map {} -> {} and {} -> {}",
            n.dim_in(),
            n.dim_out(),
            m.dim_in(),
            m.dim_out()
        )));
    }
    Ok(())
}

/// Divergence of the two channel outputs on a pure input over `R (x) A`.
pub fn evaluate_at(
    n: &QuantumChannel,
    m: &QuantumChannel,
    kind: DivergenceKind,
    psi: &PureStateVector,
) -> Result<Divergence<f64>> {
    let a = n.apply_pure(psi, &[1])?;
    let b = m.apply_pure(psi, &[1])?;
    kind.evaluate(&a, &b)
}

fn to_params(psi: &PureStateVector) -> Vec<f64> {
    psi.amplitudes().iter().flat_map(|z| [z.re, z.im]).collect()
}

fn to_state(x: &[f64], dims: &[usize]) -> Result<PureStateVector> {
    let v = CVector::from_iterator(x.len() / 2, x.chunks(2).map(|c| Complex::new(c[0], c[1])));
    PureStateVector::normalized(v, dims.to_vec())
}

/// Total order on witnesses used to break value ties deterministically.
fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Keeps the larger value; equal values keep the lexicographically smaller point.
pub(crate) fn better(a: (f64, Vec<f64>), b: (f64, Vec<f64>)) -> (f64, Vec<f64>) {
    match a.0.total_cmp(&b.0) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if lex(&a.1, &b.1) == Ordering::Greater {
                b
            } else {
                a
            }
        }
    }
}

/// Worst-case divergence over pure inputs on `R (x) A` with `|R| = |A|`,
/// estimated by multi-start ascent. Restart 0 is the maximally entangled
/// input, the others are Gaussian draws from the stream `(seed, restart)`.
pub fn channel_divergence(
    n: &QuantumChannel,
    m: &QuantumChannel,
    kind: DivergenceKind,
    cfg: &OptimizerConfig,
) -> Result<ChannelDivergence> {
    channel_divergence_seeded(n, m, kind, cfg, &[])
}

/// As [`channel_divergence`], with `warm` inputs replacing the first random restarts.
pub fn channel_divergence_seeded(
    n: &QuantumChannel,
    m: &QuantumChannel,
    kind: DivergenceKind,
    cfg: &OptimizerConfig,
    warm: &[PureStateVector],
) -> Result<ChannelDivergence> {
    check_pair(n, m)?;
    cfg.validate()?;
    kind.validate()?;
    let dims = input_dims(n);
    let total: usize = dims.iter().product();
    if n.dim_out() * n.dim_in() > DENSE_LIMIT {
        return Err(Error::Resource(format!(
            "output dimension {} exceeds the dense limit {DENSE_LIMIT}",
            n.dim_out() * n.dim_in()
        )));
    }
    if let Some(w) = warm.iter().find(|w| w.dim() != total) {
        return Err(domain(format!("warm start has dimension {}, expected {total}", w.dim())));
    }
    let objective = |x: &[f64]| -> f64 {
        match to_state(x, &dims).and_then(|psi| evaluate_at(n, m, kind, &psi)) {
            Ok(d) => d.to_scalar(),
            Err(_) => f64::NEG_INFINITY,
        }
    };
    let starts: Vec<Vec<f64>> = (0..cfg.restarts.max(1 + warm.len()))
        .map(|r| {
            if r == 0 {
                to_params(&PureStateVector::maximally_entangled(n.dim_in()))
            } else if let Some(w) = warm.get(r - 1) {
                to_params(w)
            } else {
                let mut rng = sample::rng(cfg.seed, r as u64);
                to_params(&sample::pure_state(&mut rng, &dims))
            }
        })
        .collect();
    let best = starts
        .into_par_iter()
        .map(|x0| {
            let res = maximise(x0, &[(0, 2 * total)], objective, cfg.max_iterations, cfg.convergence_tol);
            (res.value, res.x)
        })
        .reduce_with(better)
        .expect("at least one restart");
    let witness = to_state(&best.1, &dims)?;
    let value = evaluate_at(n, m, kind, &witness)?;
    Ok(ChannelDivergence { value, witness })
}

/// `psi^(x)k` regrouped from `R1 A1 R2 A2 ...` to `[R1 R2 ..., A1 A2 ...]`.
pub fn tensor_witness(psi: &PureStateVector, k: usize) -> Result<PureStateVector> {
    let mut t = psi.clone();
    for _ in 1..k {
        t = t.tensor(psi);
    }
    let perm: Vec<usize> = (0..k).map(|i| 2 * i).chain((0..k).map(|i| 2 * i + 1)).collect();
    let (r, a) = (psi.dims()[0], psi.dims()[1]);
    t.permute(&perm)?.regroup(vec![r.pow(k as u32), a.pow(k as u32)])
}

/// One entry of a regularised estimate.
#[derive(Debug, Clone)]
pub struct RegularizedPoint {
    pub copies: usize,
    /// `channel_divergence(n^(x)k, m^(x)k) / k`.
    pub value: Divergence<f64>,
    pub witness: PureStateVector,
}

/// `a_k = D(n^(x)k || m^(x)k) / k` for `k = 1..=n_max`, each a lower
/// estimate. Copy counts above one are warm-started from the tensor power
/// of the single-copy witness.
pub fn regularized_estimate(
    n: &QuantumChannel,
    m: &QuantumChannel,
    kind: DivergenceKind,
    n_max: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<RegularizedPoint>> {
    regularized_estimate_with_limit(n, m, kind, n_max, cfg, DENSE_LIMIT)
}

pub fn regularized_estimate_with_limit(
    n: &QuantumChannel,
    m: &QuantumChannel,
    kind: DivergenceKind,
    n_max: usize,
    cfg: &OptimizerConfig,
    limit: usize,
) -> Result<Vec<RegularizedPoint>> {
    check_pair(n, m)?;
    if n_max == 0 {
        return Err(crate::error::parameter("n_max must be at least 1"));
    }
    let per_copy = n.dim_in() * n.dim_in().max(n.dim_out());
    let needed = (per_copy as u128).checked_pow(n_max as u32).unwrap_or(u128::MAX);
    if needed > limit as u128 {
        return Err(Error::Resource(format!(
            "{n_max} copies need dimension {needed}, above the dense limit {limit}"
        )));
    }
    let first = channel_divergence(n, m, kind, cfg)?;
    let mut out = vec![RegularizedPoint { copies: 1, value: first.value, witness: first.witness.clone() }];
    for k in 2..=n_max {
        let (nk, mk) = (n.power(k), m.power(k));
        let warm = tensor_witness(&first.witness, k)?;
        let res = channel_divergence_seeded(&nk, &mk, kind, cfg, &[warm])?;
        let value = match res.value.value.finite() {
            Some(v) => Divergence { value: crate::statediv::ExtReal::Finite(v / k as f64), ..res.value },
            None => res.value,
        };
        out.push(RegularizedPoint { copies: k, value, witness: res.witness });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DensityOperator;

    fn quick() -> OptimizerConfig {
        OptimizerConfig { restarts: 4, max_iterations: 200, ..OptimizerConfig::default() }
    }

    #[test]
    fn identity_versus_full_replacer() {
        let id = QuantumChannel::identity(vec![2]);
        let rep = QuantumChannel::replacer(&DensityOperator::maximally_mixed(vec![2]), vec![2]).unwrap();
        let res = channel_divergence(&id, &rep, DivergenceKind::Umegaki, &quick()).unwrap();
        assert!((res.value.to_scalar() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn identical_channels_vanish() {
        let ch = QuantumChannel::amplitude_damping(0.3).unwrap();
        let res = channel_divergence(&ch, &ch, DivergenceKind::Sandwiched(2.0), &quick()).unwrap();
        assert!(res.value.to_scalar().abs() < 1e-10);
    }

    #[test]
    fn tensor_witness_layout() {
        let psi = PureStateVector::maximally_entangled(2);
        let t = tensor_witness(&psi, 2).unwrap();
        assert_eq!(t.dims(), &[4, 4]);
        // maximally entangled between R1R2 and A1A2
        let expected = PureStateVector::maximally_entangled(4);
        assert!((t.inner(&expected).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resource_limit() {
        let ch = QuantumChannel::identity(vec![2]);
        let err = regularized_estimate(&ch, &ch, DivergenceKind::Umegaki, 5, &quick());
        assert!(matches!(err, Err(Error::Resource(_))));
    }

    #[test]
    fn seeded_runs_are_identical() {
        let a = QuantumChannel::amplitude_damping(0.2).unwrap();
        let b = QuantumChannel::depolarizing(0.4, 2).unwrap();
        let x = channel_divergence(&a, &b, DivergenceKind::Petz(0.5), &quick()).unwrap();
        let y = channel_divergence(&a, &b, DivergenceKind::Petz(0.5), &quick()).unwrap();
        assert_eq!(x.value, y.value);
        assert_eq!(x.witness, y.witness);
    }
}
