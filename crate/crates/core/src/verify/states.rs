use rand::Rng;
use serde_json::json;

use super::{matrix_json, num, run_trials, CheckReport, Trial};
use crate::chandiv::DivergenceKind;
use crate::error::{parameter, Result};
use crate::sample;
use crate::statediv::{binary_entropy, hypothesis_testing, petz_renyi, sandwiched_renyi, umegaki, ErrorThreshold, RenyiOrder};
use crate::DensityOperator;

fn check_dim(dim: usize, max: usize) -> Result<()> {
    if dim == 0 || dim > max {
        return Err(parameter(format!("dimension must lie in 1..={max}, got {dim}")));
    }
    Ok(())
}

fn pair_json(rho: &DensityOperator, sigma: &DensityOperator) -> serde_json::Value {
    json!({ "rho": matrix_json(rho.matrix()), "sigma": matrix_json(sigma.matrix()) })
}

/// `tr(M - N)_+ <= tr M_+ + tr N_+ - tr N` for Gaussian Hermitian `M, N`.
pub fn check_twomat(trials: usize, dim: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    check_dim(dim, 64)?;
    run_trials("twomat", trials, seed, |rng, _| {
        let m = sample::hermitian(rng, dim);
        let n = sample::hermitian(rng, dim);
        let lhs = (&m - &n).positive_part_trace();
        let rhs = m.positive_part_trace() + n.positive_part_trace() - n.trace();
        Ok(Trial::le(lhs, rhs, tol, json!({ "m": matrix_json(m.matrix()), "n": matrix_json(n.matrix()), "lhs": lhs, "rhs": rhs })))
    })
}

/// Petz lower bound on `D_H^eps` for `alpha in (0, 1)`, and its gain
/// `h(alpha)/(1 - alpha)` over the bound without the entropy term.
pub fn check_boundsdmin(trials: usize, dim: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    check_dim(dim, 16)?;
    run_trials("boundsdmin", trials, seed, |rng, _| {
        let rho = sample::density(rng, &[dim], None);
        let sigma = sample::density(rng, &[dim], None);
        let eps: f64 = rng.random_range(0.01..0.99);
        let alpha: f64 = rng.random_range(0.01..0.99);
        let dh = hypothesis_testing(&rho, &sigma, ErrorThreshold::new(eps)?)?.to_scalar();
        let petz = petz_renyi(&rho, &sigma, RenyiOrder::new(alpha)?)?.to_scalar();
        let h = binary_entropy(alpha)?;
        let w = alpha / (1.0 - alpha);
        let bound = petz + w * (h / alpha - (1.0 / eps).log2());
        let prior = petz - w * (1.0 / eps).log2();
        let gain = bound - prior;
        let witness = json!({
            "states": pair_json(&rho, &sigma), "eps": eps, "alpha": alpha,
            "dh": dh, "bound": bound, "prior": prior, "gain": gain,
        });
        let main = Trial::le(bound, dh, tol, witness.clone());
        // the gain is h(alpha)/(1-alpha) and never negative
        let tight = Trial::le((gain - h / (1.0 - alpha)).abs().max(-gain), 0.0, tol, witness);
        Ok(main.worse(tight))
    })
}

/// `D_H^eps <= D~_alpha + (alpha/(alpha-1)) log(1/(1-eps))` for `alpha > 1`.
pub fn check_dh_sandwiched(trials: usize, dim: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    check_dim(dim, 16)?;
    run_trials("dh-sandwiched", trials, seed, |rng, _| {
        let rho = sample::density(rng, &[dim], None);
        let sigma = sample::density(rng, &[dim], None);
        let eps: f64 = rng.random_range(0.01..0.99);
        let alpha: f64 = rng.random_range(1.01..8.0);
        let dh = hypothesis_testing(&rho, &sigma, ErrorThreshold::new(eps)?)?.to_scalar();
        let sand = sandwiched_renyi(&rho, &sigma, RenyiOrder::new(alpha)?)?.to_scalar();
        let rhs = sand + alpha / (alpha - 1.0) * (1.0 / (1.0 - eps)).log2();
        let witness = json!({ "states": pair_json(&rho, &sigma), "eps": eps, "alpha": alpha, "dh": dh, "rhs": rhs });
        Ok(Trial::le(dh, rhs, tol, witness))
    })
}

/// `|D_{1 +- delta} - D| <= C delta` for the Petz and sandwiched families,
/// `delta = 1e-4`, with `C = 2 |D'| + 1` from a difference quotient at step `1e-3`.
pub fn check_continuity(trials: usize, dim: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    check_dim(dim, 16)?;
    const DELTA: f64 = 1e-4;
    const STEP: f64 = 1e-3;
    run_trials("continuity", trials, seed, |rng, _| {
        let rho = sample::density(rng, &[dim], None);
        let sigma = sample::density(rng, &[dim], None);
        let d = umegaki(&rho, &sigma)?.to_scalar();
        let mut worst: Option<Trial> = None;
        for (family, f) in [
            ("petz", petz_renyi::<f64> as fn(&DensityOperator, &DensityOperator, RenyiOrder<f64>) -> _),
            ("sandwiched", sandwiched_renyi::<f64>),
        ] {
            let at = |a: f64| -> Result<f64> { Ok(f(&rho, &sigma, RenyiOrder::new(a)?)?.to_scalar()) };
            let slope = (at(1.0 + STEP)? - at(1.0 - STEP)?) / (2.0 * STEP);
            let c = 2.0 * slope.abs() + 1.0;
            for a in [1.0 - DELTA, 1.0 + DELTA] {
                let dev = (at(a)? - d).abs();
                let witness = json!({
                    "states": pair_json(&rho, &sigma), "family": family, "alpha": a,
                    "deviation": dev, "allowed": c * DELTA,
                });
                let t = Trial::le(dev, c * DELTA, tol, witness);
                worst = Some(match worst {
                    None => t,
                    Some(w) => w.worse(t),
                });
            }
        }
        Ok(worst.expect("two families"))
    })
}

/// Divergences checked by [`check_dpi`].
pub const DPI_KINDS: [DivergenceKind; 12] = [
    DivergenceKind::Umegaki,
    DivergenceKind::Petz(0.3),
    DivergenceKind::Petz(0.7),
    DivergenceKind::Petz(2.0),
    DivergenceKind::Petz(3.0),
    DivergenceKind::Sandwiched(0.3),
    DivergenceKind::Sandwiched(0.7),
    DivergenceKind::Sandwiched(2.0),
    DivergenceKind::Sandwiched(3.0),
    DivergenceKind::Dmax,
    DivergenceKind::Hypothesis(0.1),
    DivergenceKind::Hypothesis(0.5),
];

/// Data processing `D(N(rho) || N(sigma)) <= D(rho || sigma)` for random
/// states and channels with input and output dimensions in `2..=max_dim`.
/// Returns one report per entry of [`DPI_KINDS`].
pub fn check_dpi(trials: usize, max_dim: usize, seed: u64, tol: f64) -> Result<Vec<CheckReport>> {
    if max_dim < 2 {
        return Err(parameter("dpi check needs max_dim >= 2"));
    }
    let per_trial: Vec<Vec<Trial>> = {
        use rayon::prelude::*;
        (0..trials)
            .into_par_iter()
            .map(|i| -> Result<Vec<Trial>> {
                let rng = &mut sample::rng(seed, i as u64);
                let din = rng.random_range(2..=max_dim);
                let dout = rng.random_range(2..=max_dim);
                let env = rng.random_range(din.div_ceil(dout)..=din * dout);
                let rho = sample::density(rng, &[din], None);
                let sigma = sample::density(rng, &[din], None);
                let ch = sample::channel(rng, din, dout, env)?;
                let (a, b) = (ch.apply(&rho, &[0])?, ch.apply(&sigma, &[0])?);
                DPI_KINDS
                    .iter()
                    .map(|k| {
                        let before = k.evaluate(&rho, &sigma)?.to_scalar();
                        let after = k.evaluate(&a, &b)?.to_scalar();
                        let witness = json!({
                            "states": pair_json(&rho, &sigma),
                            "kraus": ch.kraus().iter().map(matrix_json).collect::<Vec<_>>(),
                            "before": num(before), "after": num(after),
                        });
                        Ok(Trial::le(after, before, tol, witness))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?
    };
    let mut columns: Vec<Vec<Trial>> = DPI_KINDS.iter().map(|_| Vec::with_capacity(trials)).collect();
    for row in per_trial {
        for (col, t) in columns.iter_mut().zip(row) {
            col.push(t);
        }
    }
    Ok(DPI_KINDS
        .iter()
        .zip(columns)
        .map(|(k, col)| super::merge(&format!("dpi-{}", k.name()), seed, col))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_runs_pass() {
        assert!(check_twomat(200, 6, 1, 1e-9).unwrap().passed());
        assert!(check_boundsdmin(50, 4, 1, 1e-9).unwrap().passed());
        assert!(check_dh_sandwiched(50, 4, 1, 1e-9).unwrap().passed());
        assert!(check_continuity(30, 3, 1, 1e-9).unwrap().passed());
    }

    #[test]
    fn reports_are_reproducible() {
        assert_eq!(check_twomat(64, 5, 9, 1e-9).unwrap(), check_twomat(64, 5, 9, 1e-9).unwrap());
    }

    #[test]
    fn dpi_reports_per_kind() {
        let reps = check_dpi(20, 3, 2, 1e-7).unwrap();
        assert_eq!(reps.len(), DPI_KINDS.len());
        assert!(reps.iter().all(|r| r.trials == 20));
    }
}
