use nalgebra::Complex;

use crate::error::{domain, Error, Result};
use crate::qmat::Hermitian;
use crate::statediv::{dmax, Divergence};
use crate::{DensityOperator, QuantumChannel};

const POSITIVITY_FLOOR: f64 = 1e-10;
const EPS_CAP: f64 = 1.0 - 1e-6;

/// `D_max(J_N || J_M)` on the Choi matrices.
pub fn choi_dmax(n: &QuantumChannel, m: &QuantumChannel) -> Result<Divergence<f64>> {
    if n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out() {
        return Err(domain("channels have different dimensions"));
    }
    let norm = |ch: &QuantumChannel| -> Result<DensityOperator> {
        let j = ch.choi().matrix() / Complex::new(ch.dim_in() as f64, 0.0);
        DensityOperator::from_matrix(j, ch.choi().dims().to_vec())
    };
    dmax(&norm(n)?, &norm(m)?)
}

/// Whether the Choi matrix is positive definite (smallest eigenvalue above `1e-10`).
pub fn positivity_check(n: &QuantumChannel) -> bool {
    n.choi().lambda_min() > POSITIVITY_FLOOR
}

/// `N = eps R_tau + (1 - eps) N'` with `tau` maximally mixed.
#[derive(Debug, Clone)]
pub struct ReplacerDecomposition {
    pub tau: DensityOperator,
    pub eps: f64,
    pub residual: QuantumChannel,
    /// `1 - eps + eps ||tau||_inf`, bounding `||N^(x)k(rho)||_inf <= b^k`.
    pub b: f64,
}

pub fn replacer_decomposition(n: &QuantumChannel) -> Result<ReplacerDecomposition> {
    if !positivity_check(n) {
        return Err(Error::Precondition("channel is not positive definite".into()));
    }
    let dout = n.dim_out() as f64;
    let eps = (dout * n.choi().lambda_min()).min(EPS_CAP);
    let tau = DensityOperator::maximally_mixed(n.dims_out().to_vec());
    let rep_choi = Hermitian::identity(n.choi().dims().to_vec()).scale(1.0 / dout);
    let residual_choi = (n.choi() - &rep_choi.scale(eps)).scale(1.0 / (1.0 - eps));
    let residual = QuantumChannel::from_choi(&residual_choi, n.dims_in().to_vec(), n.dims_out().to_vec())?;
    let b = 1.0 - eps + eps / dout;
    Ok(ReplacerDecomposition { tau, eps, residual, b })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positivity_examples() {
        assert!(!positivity_check(&QuantumChannel::identity(vec![2])));
        let rep = QuantumChannel::replacer(&DensityOperator::maximally_mixed(vec![2]), vec![2]).unwrap();
        assert!(positivity_check(&rep));
        assert!(positivity_check(&QuantumChannel::depolarizing(0.3, 2).unwrap()));
    }

    #[test]
    fn full_replacer_decomposition() {
        let rep = QuantumChannel::replacer(&DensityOperator::maximally_mixed(vec![2]), vec![2]).unwrap();
        let dec = replacer_decomposition(&rep).unwrap();
        assert_eq!(dec.eps, EPS_CAP);
        assert!((dec.b - (0.5 + 0.5e-6)).abs() < 1e-15);
    }

    #[test]
    fn depolarizing_eps_at_least_p() {
        for p in [0.1, 0.5, 0.9] {
            let dec = replacer_decomposition(&QuantumChannel::depolarizing(p, 2).unwrap()).unwrap();
            assert!(dec.eps >= p - 1e-12);
        }
    }

    #[test]
    fn choi_dmax_closed_form() {
        // identity vs (1 - p) id + p R_pi: ratio on the Bell direction
        let id = QuantumChannel::identity(vec![2]);
        for p in [0.2, 0.5, 0.8] {
            let dep = QuantumChannel::depolarizing(p, 2).unwrap();
            let d = choi_dmax(&id, &dep).unwrap().to_scalar();
            let expected = (1.0 / (1.0 - p + p / 4.0)).log2();
            assert!((d - expected).abs() < 1e-10, "{d} vs {expected}");
        }
    }

    #[test]
    fn not_positive_definite() {
        let id = QuantumChannel::identity(vec![2]);
        assert!(matches!(replacer_decomposition(&id), Err(Error::Precondition(_))));
    }
}
