use crate::chandiv::{
    channel_divergence, channel_divergence_seeded, tensor_witness, DivergenceKind, OptimizerConfig, DENSE_LIMIT,
};
use crate::error::{parameter, Error, Result};
use crate::statediv::{hypothesis_testing, ErrorThreshold};
use crate::{PureStateVector, QuantumChannel};

/// Which class of strategies a Stein sequence ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteinClass {
    /// The same input on every use, chosen by the single-use relative entropy.
    Pro,
    /// A joint input over all uses, optimised for each copy count.
    Coh,
}

#[derive(Debug, Clone)]
pub struct SteinPoint {
    pub copies: usize,
    /// `D_H^eps(...) / copies`.
    pub rate: f64,
    /// Single-use input for [`SteinClass::Pro`], joint input for [`SteinClass::Coh`].
    pub witness: PureStateVector,
}

/// Finite-copy Stein rates for `k = 1..=n_max`.
pub fn stein_sequence(
    n: &QuantumChannel,
    m: &QuantumChannel,
    eps: f64,
    n_max: usize,
    class: SteinClass,
    cfg: &OptimizerConfig,
) -> Result<Vec<SteinPoint>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(parameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    if n_max == 0 {
        return Err(parameter("n_max must be at least 1"));
    }
    let threshold = ErrorThreshold::new(eps)?;
    match class {
        SteinClass::Pro => {
            let dim = n.dim_in() * n.dim_out();
            if (dim as f64).powi(n_max as i32) > DENSE_LIMIT as f64 {
                return Err(Error::Resource(format!("{n_max} copies of a {dim}-dimensional output exceed the dense limit")));
            }
            let phi = channel_divergence(n, m, DivergenceKind::Umegaki, cfg)?.witness;
            let a = n.apply_pure(&phi, &[1])?;
            let b = m.apply_pure(&phi, &[1])?;
            let (mut ak, mut bk) = (a.clone(), b.clone());
            let mut out = Vec::with_capacity(n_max);
            for k in 1..=n_max {
                if k > 1 {
                    ak = ak.tensor(&a);
                    bk = bk.tensor(&b);
                }
                let rate = hypothesis_testing(&ak, &bk, threshold)?.to_scalar() / k as f64;
                out.push(SteinPoint { copies: k, rate, witness: phi.clone() });
            }
            Ok(out)
        }
        SteinClass::Coh => {
            let dim = n.dim_in() * n.dim_in().max(n.dim_out());
            if (dim as f64).powi(n_max as i32) > DENSE_LIMIT as f64 {
                return Err(Error::Resource(format!("{n_max} copies exceed the dense limit {DENSE_LIMIT}")));
            }
            let kind = DivergenceKind::Hypothesis(eps);
            let first = channel_divergence(n, m, kind, cfg)?;
            let mut out = vec![SteinPoint { copies: 1, rate: first.value.to_scalar(), witness: first.witness.clone() }];
            for k in 2..=n_max {
                let warm = tensor_witness(&first.witness, k)?;
                let best = channel_divergence_seeded(&n.power(k), &m.power(k), kind, cfg, &[warm])?;
                out.push(SteinPoint { copies: k, rate: best.value.to_scalar() / k as f64, witness: best.witness });
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DensityOperator;

    #[test]
    fn replacer_pair_pro_rates() {
        let p = DensityOperator::diagonal(&[0.8, 0.2], vec![2]).unwrap();
        let q = DensityOperator::diagonal(&[0.3, 0.7], vec![2]).unwrap();
        let n = QuantumChannel::replacer(&p, vec![2]).unwrap();
        let m = QuantumChannel::replacer(&q, vec![2]).unwrap();
        let cfg = OptimizerConfig { restarts: 1, max_iterations: 5, ..OptimizerConfig::default() };
        let seq = stein_sequence(&n, &m, 0.1, 3, SteinClass::Pro, &cfg).unwrap();
        for s in &seq {
            let pk = p.tensor_power(s.copies);
            let qk = q.tensor_power(s.copies);
            let direct = hypothesis_testing(&pk, &qk, ErrorThreshold::new(0.1).unwrap()).unwrap().to_scalar();
            assert!((s.rate * s.copies as f64 - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_eps() {
        let n = QuantumChannel::identity(vec![2]);
        let cfg = OptimizerConfig::default();
        assert!(stein_sequence(&n, &n, 1.0, 1, SteinClass::Pro, &cfg).is_err());
        assert!(stein_sequence(&n, &n, 0.0, 1, SteinClass::Coh, &cfg).is_err());
    }
}
