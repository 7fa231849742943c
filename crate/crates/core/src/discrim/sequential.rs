use nalgebra::Complex;

use super::Strategy;
use crate::chandiv::OptimizerConfig;
use crate::chandiv::ascent::maximise;
use crate::error::{domain, Result};
use crate::qmat::{CMatrix, Spectrum};
use crate::sample;
use crate::statediv::umegaki;
use crate::{DensityOperator, QuantumChannel};

/// Sequential strategy that reproduces a coherent input `[R, A_1, ..., A_n]`.
///
/// The unused inputs ride along in the memory and each update is a
/// permutation that stores the fresh output and releases the next input,
/// so the final state is the coherent output with the memory flattened.
pub fn routing_updates(psi: &DensityOperator, dout: usize, copies: usize) -> Result<Strategy> {
    let dims = psi.dims().to_vec();
    if dims.len() != copies + 1 || copies == 0 {
        return Err(domain(format!("input {dims:?} is not [R, A x {copies}]")));
    }
    let (r, din) = (dims[0], dims[1]);
    // [R, A_2 .. A_n, A_1]
    let mut order: Vec<usize> = vec![0];
    order.extend(2..=copies);
    order.push(1);
    let initial = psi.permute(&order)?;
    let mut updates = Vec::with_capacity(copies - 1);
    for i in 1..copies {
        // memory [R, B_1 .. B_{i-1}, A_{i+1} .. A_n] followed by B_i
        let mut fine = vec![r];
        fine.extend(std::iter::repeat_n(dout, i - 1));
        fine.extend(std::iter::repeat_n(din, copies - i));
        fine.push(dout);
        let mut perm: Vec<usize> = (0..i).collect();
        perm.push(copies);
        perm.extend(i + 1..copies);
        perm.push(i);
        updates.push(QuantumChannel::permutation(fine, &perm)?);
    }
    Ok(Strategy::Sequential { initial, updates })
}

/// `G (G^dagger G)^(-1/2)` from a flat `[re, im]` block.
fn polar(x: &[f64], d: usize) -> Option<CMatrix<f64>> {
    let g = CMatrix::from_fn(d, d, |r, c| {
        let k = 2 * (r * d + c);
        Complex::new(x[k], x[k + 1])
    });
    let s = Spectrum::of(&(g.adjoint() * &g));
    if s.min() <= 1e-12 * s.max() {
        return None;
    }
    Some(&g * s.compose(|_, l| 1.0 / l.sqrt()))
}

/// Greedy unitary updates: each one maximises the Umegaki divergence of
/// the next channel outputs, given the states reached so far. Needs
/// `dim_in == dim_out` so the memory keeps its size.
pub fn greedy_updates(
    n: &QuantumChannel,
    m: &QuantumChannel,
    initial: &DensityOperator,
    copies: usize,
    cfg: &OptimizerConfig,
) -> Result<Vec<QuantumChannel>> {
    let (din, dout) = (n.dim_in(), n.dim_out());
    if din != dout {
        return Err(domain("greedy unitary updates need equal input and output dimensions"));
    }
    let d = initial.dim();
    let mem = d / din;
    let mut rho = initial.regroup(vec![mem, din])?;
    let mut sigma = rho.clone();
    let mut updates = Vec::new();
    for step in 1..copies {
        let a = n.apply(&rho, &[1])?;
        let b = m.apply(&sigma, &[1])?;
        let next = |u: &CMatrix<f64>| -> Result<(DensityOperator, DensityOperator)> {
            let p = QuantumChannel::unitary(u.clone(), vec![mem, din])?;
            Ok((p.apply(&a, &[0, 1])?, p.apply(&b, &[0, 1])?))
        };
        let score = |x: &[f64]| -> f64 {
            let Some(u) = polar(x, d) else { return f64::NEG_INFINITY };
            let run = || -> Result<f64> {
                let (ra, sb) = next(&u)?;
                Ok(umegaki(&n.apply(&ra, &[1])?, &m.apply(&sb, &[1])?)?.to_scalar())
            };
            run().unwrap_or(f64::NEG_INFINITY)
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for r in 0..cfg.restarts {
            let x0: Vec<f64> = if r == 0 {
                (0..d * d).flat_map(|k| [if k / d == k % d { 1.0 } else { 0.0 }, 0.0]).collect()
            } else {
                let mut g = sample::rng(cfg.seed, ((step as u64) << 32) + r as u64);
                let u = sample::unitary(&mut g, d);
                (0..d * d).flat_map(|k| [u[(k / d, k % d)].re, u[(k / d, k % d)].im]).collect()
            };
            let res = maximise(x0, &[(0, 2 * d * d)], score, cfg.max_iterations, cfg.convergence_tol);
            if best.as_ref().is_none_or(|b| res.value > b.0) {
                best = Some((res.value, res.x));
            }
        }
        let (_, x) = best.expect("at least one restart");
        let u = polar(&x, d).ok_or_else(|| domain("degenerate update"))?;
        let p = QuantumChannel::unitary(u, vec![mem, din])?;
        rho = p.apply(&a, &[0, 1])?;
        sigma = p.apply(&b, &[0, 1])?;
        updates.push(p);
    }
    Ok(updates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrim::generate_testing_states;

    #[test]
    fn routing_reproduces_coherent() {
        let mut r = sample::rng(9, 0);
        let n = sample::channel(&mut r, 2, 2, 3).unwrap();
        let m = sample::channel(&mut r, 2, 2, 3).unwrap();
        let psi = sample::density(&mut r, &[2, 2, 2, 2], None);
        let (cn, cm) = generate_testing_states(&Strategy::Coherent(psi.clone()), &n, &m, 3).unwrap();
        let seq = routing_updates(&psi, 2, 3).unwrap();
        let (sn, sm) = generate_testing_states(&seq, &n, &m, 3).unwrap();
        assert!(cn.op().max_abs_diff(sn.op()) < 1e-13);
        assert!(cm.op().max_abs_diff(sm.op()) < 1e-13);
    }

    #[test]
    fn greedy_is_no_worse_than_identity() {
        let mut r = sample::rng(10, 0);
        let n = sample::channel(&mut r, 2, 2, 2).unwrap();
        let m = QuantumChannel::depolarizing(0.5, 2).unwrap();
        let init = sample::density(&mut r, &[2, 2], None);
        let cfg = OptimizerConfig { restarts: 2, max_iterations: 20, ..OptimizerConfig::default() };
        let ups = greedy_updates(&n, &m, &init, 2, &cfg).unwrap();
        let id = QuantumChannel::identity(vec![2, 2]);
        let s = |u: Vec<QuantumChannel>| Strategy::Sequential { initial: init.clone(), updates: u };
        let (a, b) = generate_testing_states(&s(ups), &n, &m, 2).unwrap();
        let (c, e) = generate_testing_states(&s(vec![id]), &n, &m, 2).unwrap();
        let g = umegaki(&a, &b).unwrap().to_scalar();
        let i = umegaki(&c, &e).unwrap().to_scalar();
        assert!(g >= i - 1e-9, "{g} < {i}");
    }
}
