use rand::Rng;
use serde_json::json;

use super::{matrix_json, merge, num, run_trials, CheckReport, Trial};
use crate::chandiv::{
    amortized_lowerbound, positivity_check, regularized_estimate, replacer_decomposition, DivergenceKind,
    OptimizerConfig,
};
use crate::error::{domain, parameter, Error, Result};
use crate::qmat::{matrix_function, symmetric_purification, symmetrize, KernelPolicy};
use crate::sample;
use crate::statediv::{dmax, hypothesis_testing, ErrorThreshold};
use crate::{DensityOperator, QuantumChannel};

/// Parameter grid of the permutation-symmetric tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct UbdGrid {
    pub mu: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl Default for UbdGrid {
    /// 11 points each: `mu, r in [-0.5, 2]`, `s in [0, 1]`.
    fn default() -> Self {
        Self { mu: linspace(-0.5, 2.0, 11), r: linspace(-0.5, 2.0, 11), s: linspace(0.0, 1.0, 11) }
    }
}

/// `tr(rho_n - 2^(mu n) sigma_n)_+ <= 2^(-nrs) tr rho_n^(1+s) + 2^(-ns(mu-r) + s|A|log(1+n)) tr[rho_n sigma_n^(-s)]`
/// for `rho_n = rho^(x)n`, `sigma_n = sigma^(x)n`, `n = 1..=n_max`, over the grid.
pub fn check_ubd(rho: &DensityOperator, sigma: &DensityOperator, n_max: usize, grid: &UbdGrid, tol: f64) -> Result<CheckReport> {
    if n_max == 0 || n_max > 4 {
        return Err(parameter(format!("n must lie in 1..=4, got {n_max}")));
    }
    if rho.dims() != sigma.dims() {
        return Err(domain("states have different dimensions"));
    }
    if !dmax(rho, sigma)?.support_ok {
        return Err(Error::Precondition("supp(rho) is not contained in supp(sigma)".into()));
    }
    let a = rho.dim() as f64;
    let mut results = Vec::new();
    for n in 1..=n_max {
        let (rn, sn) = (rho.tensor_power(n), sigma.tensor_power(n));
        let nf = n as f64;
        for &s in &grid.s {
            let rho_pow = matrix_function(rn.op(), |l| l.powf(1.0 + s), KernelPolicy::MapZeroToZero)?.trace();
            let sigma_neg = matrix_function(sn.op(), |l| l.powf(-s), KernelPolicy::RestrictToSupport)?;
            let cross = rn.op().trace_product(&sigma_neg);
            for &mu in &grid.mu {
                let lhs = (rn.op() - &sn.op().scale((mu * nf).exp2())).positive_part_trace();
                for &r in &grid.r {
                    let first = (-nf * r * s + rho_pow.log2()).exp2();
                    let second = (-nf * s * (mu - r) + s * a * (1.0 + nf).log2() + cross.log2()).exp2();
                    let rhs = first + second;
                    let witness = json!({ "n": n, "mu": mu, "r": r, "s": s, "lhs": lhs, "rhs": num(rhs) });
                    results.push(Trial::le(lhs, rhs, tol, witness));
                }
            }
        }
    }
    Ok(merge("ubd", 0, results))
}

/// [`check_ubd`] on a full-rank pair drawn from `seed`.
pub fn check_ubd_sampled(dim: usize, n_max: usize, grid: &UbdGrid, seed: u64, tol: f64) -> Result<CheckReport> {
    let rng = &mut sample::rng(seed, 0);
    let rho = sample::density(rng, &[dim], None);
    let sigma = sample::density(rng, &[dim], None);
    let mut rep = check_ubd(&rho, &sigma, n_max, grid, tol)?;
    rep.seed = seed;
    if let Some(w) = rep.witness.as_object_mut() {
        w.insert("rho".into(), matrix_json(rho.matrix()));
        w.insert("sigma".into(), matrix_json(sigma.matrix()));
    }
    Ok(rep)
}

/// For random two-copy inputs `psi` on `(RA)^2` with `|R| = |A|`:
/// `D_H^eps(N^(x)2(psi) || M^(x)2(psi)) <= D_H^eps(N^(x)2(phi) || M^(x)2(phi)) + tol`,
/// `phi` the symmetric purification of the permutation average of `psi`.
pub fn check_symmetrization(
    n: &QuantumChannel,
    m: &QuantumChannel,
    eps: f64,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    if n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out() {
        return Err(domain("channels have different dimensions"));
    }
    let threshold = ErrorThreshold::new(eps)?;
    let a = n.dim_in();
    if (a * a * a * n.dim_out()).pow(2) > 4096 {
        return Err(Error::Resource("symmetrised outputs exceed the dense limit".into()));
    }
    let dh = |psi: &DensityOperator, acting: [usize; 2]| -> Result<f64> {
        let on = |ch: &QuantumChannel| -> Result<DensityOperator> { ch.apply(&ch.apply(psi, &[acting[0]])?, &[acting[1]]) };
        Ok(hypothesis_testing(&on(n)?, &on(m)?, threshold)?.to_scalar())
    };
    run_trials("symmetrization", trials, seed, |rng, i| {
        let psi = sample::density(rng, &[a, a, a, a], Some(1 + i % 4));
        let omega = symmetrize(&psi, 2)?;
        let phi = symmetric_purification(&omega, 2)?.to_density();
        let lhs = dh(&psi, [1, 3])?;
        // each copy of phi is [mirror R, mirror A, R, A]
        let rhs = dh(&phi, [3, 7])?;
        Ok(Trial::le(lhs, rhs, tol, json!({ "psi": matrix_json(psi.matrix()), "lhs": lhs, "rhs": rhs })))
    })
}

/// `||N^(x)k(rho)||_inf <= b^k` for random inputs on `R^k A^k`, `k = 1..=copies`,
/// with `b` from the replacer decomposition of `N`.
pub fn check_infnorm_bound(n: &QuantumChannel, copies: usize, trials: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    if copies == 0 || copies > 3 {
        return Err(parameter(format!("copies must lie in 1..=3, got {copies}")));
    }
    if !positivity_check(n) {
        return Err(Error::Precondition("channel is not positive definite".into()));
    }
    let b = replacer_decomposition(n)?.b;
    let a = n.dim_in();
    let powers: Vec<QuantumChannel> = (1..=copies).map(|k| n.power(k)).collect();
    run_trials("infnorm", trials, seed, |rng, _| {
        let mut worst: Option<Trial> = None;
        for (k, nk) in (1..=copies).zip(&powers) {
            let r = a.pow(k as u32);
            let mut dims = vec![r];
            dims.extend(std::iter::repeat_n(a, k));
            let rank = rng.random_range(1..=r * r);
            let rho = sample::density(rng, &dims, Some(rank));
            let acting: Vec<usize> = (1..=k).collect();
            let norm = nk.apply(&rho, &acting)?.op().operator_norm();
            let bound = b.powi(k as i32);
            let t = Trial::le(norm, bound, tol, json!({ "k": k, "rank": rank, "norm": norm, "bound": bound }));
            worst = Some(match worst {
                None => t,
                Some(w) => w.worse(t),
            });
        }
        Ok(worst.expect("at least one copy"))
    })
}

/// `a_1 <= a_2` for the regularised Umegaki estimates and
/// `a_1 <= amortised lower bound`, each within `tol`.
///
/// The amortised search runs with at most 2 restarts and 50 iterations;
/// it is seeded with the one-shot witness, which already certifies `a_1`.
pub fn check_order_relation(n: &QuantumChannel, m: &QuantumChannel, cfg: &OptimizerConfig, tol: f64) -> Result<CheckReport> {
    let reg = regularized_estimate(n, m, DivergenceKind::Umegaki, 2, cfg)?;
    let (a1, a2) = (reg[0].value.to_scalar(), reg[1].value.to_scalar());
    let light = OptimizerConfig { restarts: cfg.restarts.min(2), max_iterations: cfg.max_iterations.min(50), ..*cfg };
    let amortized = amortized_lowerbound(n, m, DivergenceKind::Umegaki, None, &light)?.value;
    let values = json!({ "a1": num(a1), "a2": num(a2), "amortized": num(amortized) });
    let trials = vec![Trial::le(a1, a2, tol, values.clone()), Trial::le(a1, amortized, tol, values)];
    Ok(merge("order", cfg.seed, trials))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ubd_trivial_cases() {
        let rho = DensityOperator::diagonal(&[0.8, 0.2], vec![2]).unwrap();
        let grid = UbdGrid { mu: vec![0.5], r: vec![0.1], s: vec![0.0] };
        let rep = check_ubd(&rho, &rho, 3, &grid, 1e-9).unwrap();
        assert!(rep.passed());
        let pure = DensityOperator::basis(0, vec![2]).unwrap();
        let other = DensityOperator::basis(1, vec![2]).unwrap();
        assert!(matches!(check_ubd(&pure, &other, 1, &grid, 1e-9), Err(Error::Precondition(_))));
    }

    #[test]
    fn symmetrization_small() {
        let mut r = sample::rng(5, 0);
        let n = sample::channel(&mut r, 2, 2, 4).unwrap();
        let m = sample::channel(&mut r, 2, 2, 4).unwrap();
        let rep = check_symmetrization(&n, &m, 0.2, 4, 1, 1e-8).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn infnorm_depolarizing() {
        let n = QuantumChannel::depolarizing(0.5, 2).unwrap();
        assert!(check_infnorm_bound(&n, 2, 10, 0, 1e-9).unwrap().passed());
        assert!(check_infnorm_bound(&QuantumChannel::identity(vec![2]), 1, 1, 0, 1e-9).is_err());
    }
}
