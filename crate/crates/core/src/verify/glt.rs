use crate::error::{domain, Result};
use crate::qmat::{matrix_function, Hermitian, KernelPolicy};
use crate::DensityOperator;

/// Both sides of the variance bound at the counterexample in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GltRecord {
    pub d: usize,
    /// `tr[sigma (log tau)^2] - (tr[sigma log tau])^2`.
    pub lhs: f64,
    /// `||sigma||_inf log^2(1 + 1/t - d)`.
    pub rhs: f64,
    pub violated: bool,
}

/// `sigma = I/d`, `t = 1/(2d)` and `tau = t P + 3t (I - P)` with `tr P = d/2`.
pub fn counterexample_glt(d: usize) -> Result<GltRecord> {
    if d < 2 || !d.is_multiple_of(2) {
        return Err(domain(format!("the construction needs an even dimension, got {d}")));
    }
    let t = 1.0 / (2 * d) as f64;
    let sigma = DensityOperator::maximally_mixed(vec![d]);
    let diag: Vec<f64> = (0..d).map(|i| if i < d / 2 { t } else { 3.0 * t }).collect();
    let tau = Hermitian::diagonal(&diag, vec![d])?;
    let log_tau = matrix_function(&tau, f64::log2, KernelPolicy::ErrorOnKernel)?;
    // centred form of tr[sigma L^2] - (tr[sigma L])^2, free of cancellation
    let mean = sigma.op().trace_product(&log_tau);
    let centred = &log_tau - &Hermitian::identity(vec![d]).scale(mean);
    let sq = Hermitian::from_matrix(centred.matrix() * centred.matrix())?;
    let lhs = sigma.op().trace_product(&sq);
    let rhs = sigma.op().operator_norm() * (1.0 + 1.0 / t - d as f64).log2().powi(2);
    Ok(GltRecord { d, lhs, rhs, violated: lhs > rhs })
}

/// Smallest even `d <= max_d` at which the bound fails.
pub fn minimal_violating_dimension(max_d: usize) -> Result<Option<usize>> {
    for d in (2..=max_d).step_by(2) {
        if counterexample_glt(d)?.violated {
            return Ok(Some(d));
        }
    }
    Ok(None)
}
