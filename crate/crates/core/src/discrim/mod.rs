//! Channel discrimination: strategy simulation, optimal binary tests,
//! Stein sequences and exponent evaluators.

mod exponents;
mod sequential;
mod stein;

use crate::error::{domain, Error, Result};
use crate::qmat::Hermitian;
use crate::statediv::{hypothesis_testing, ErrorThreshold};
use crate::{DensityOperator, HermitianOperator, QuantumChannel};

pub use exponents::{
    err_exponent, exponent_report, sc_exponent, sc_tradeoff, CurvePoint, ExponentQuery, ExponentReport, ExponentRow,
    Optimum, ALPHA_MAX, ALPHA_MIN,
};
pub use sequential::{greedy_updates, routing_updates};
pub use stein::{stein_sequence, SteinClass, SteinPoint};

/// How the `copies` channel uses are fed.
#[derive(Debug, Clone)]
pub enum Strategy {
    /// One input `[R_i, A]` per use.
    Product(Vec<DensityOperator>),
    /// A joint input `[R, A, ..., A]` with one `A` per use.
    Coherent(DensityOperator),
    /// An initial input `[R_1, A]`, and between uses an update
    /// `R_k B -> R_{k+1} A` whose output is regrouped as `[R_{k+1}, A]`.
    Sequential { initial: DensityOperator, updates: Vec<QuantumChannel> },
}

fn last_is(rho: &DensityOperator, d: usize, what: &str) -> Result<()> {
    if rho.dims().len() < 2 || *rho.dims().last().unwrap() != d {
        return Err(domain(format!("{what} must end in a channel input of dimension {d}, got {:?}", rho.dims())));
    }
    Ok(())
}

fn run(ch: &QuantumChannel, s: &Strategy, copies: usize) -> Result<DensityOperator> {
    let din = ch.dim_in();
    match s {
        Strategy::Product(inputs) => {
            if inputs.len() != copies {
                return Err(domain(format!("{} product inputs for {copies} uses", inputs.len())));
            }
            let mut out: Option<DensityOperator> = None;
            for phi in inputs {
                last_is(phi, din, "product input")?;
                let y = ch.apply(phi, &[phi.dims().len() - 1])?;
                out = Some(match out {
                    None => y,
                    Some(acc) => acc.tensor(&y),
                });
            }
            out.ok_or_else(|| domain("no channel uses"))
        }
        Strategy::Coherent(psi) => {
            let dims = psi.dims();
            if dims.len() != copies + 1 || dims[1..].iter().any(|&d| d != din) {
                return Err(domain(format!("coherent input {dims:?} does not match {copies} uses of dimension {din}")));
            }
            (1..=copies).try_fold(psi.clone(), |acc, i| ch.apply(&acc, &[i]))
        }
        Strategy::Sequential { initial, updates } => {
            if updates.len() + 1 != copies {
                return Err(domain(format!("{} updates for {copies} uses", updates.len())));
            }
            last_is(initial, din, "sequential input")?;
            let mut state = initial.regroup(vec![initial.dim() / din, din])?;
            for (k, p) in updates.iter().enumerate() {
                let out = ch.apply(&state, &[1])?;
                if p.dim_in() != out.dim() || p.dim_out() % din != 0 {
                    return Err(domain(format!("update {k} does not map the memory and output to a memory and input")));
                }
                let next = p.apply(&out.regroup(vec![out.dim()])?, &[0])?;
                state = next.regroup(vec![next.dim() / din, din])?;
            }
            ch.apply(&state, &[1])
        }
    }
}

/// The pair `(rho_n, sigma_n)` produced by running `s` through `n` and `m`.
pub fn generate_testing_states(
    s: &Strategy,
    n: &QuantumChannel,
    m: &QuantumChannel,
    copies: usize,
) -> Result<(DensityOperator, DensityOperator)> {
    if n.dim_in() != m.dim_in() || n.dim_out() != m.dim_out() {
        return Err(domain("channels have different dimensions"));
    }
    if copies == 0 {
        return Err(domain("at least one channel use is needed"));
    }
    Ok((run(n, s, copies)?, run(m, s, copies)?))
}

/// Type I and type II errors of a test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPair {
    pub type1: f64,
    pub type2: f64,
}

/// `0 <= Pi <= I`, accepting the null hypothesis.
#[derive(Debug, Clone)]
pub struct TestOperator {
    op: HermitianOperator,
}

impl TestOperator {
    /// Validates the spectrum lies in `[-1e-10, 1 + 1e-10]` and clamps it into `[0, 1]`.
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let s = op.spectrum();
        let tol = 1e-10;
        if s.min() < -tol || s.max() > 1.0 + tol {
            return Err(Error::Invalid {
                kind: "test operator",
                detail: format!("spectrum [{}, {}] outside [0, 1]", s.min(), s.max()),
            });
        }
        if s.min() < 0.0 || s.max() > 1.0 {
            let data = s.compose(|_, l| l.clamp(0.0, 1.0));
            return Ok(Self { op: Hermitian::new(data, op.dims().to_vec())? });
        }
        Ok(Self { op })
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }
}

/// `(tr[(I - Pi) rho], tr[Pi sigma])`, clipped to `[0, 1]`.
pub fn error_pair(states: (&DensityOperator, &DensityOperator), test: &TestOperator) -> Result<ErrorPair> {
    let (rho, sigma) = states;
    if rho.dim() != test.op.dim() || sigma.dim() != test.op.dim() {
        return Err(domain("test and states have different dimensions"));
    }
    let accept = test.op.trace_product(rho.op());
    Ok(ErrorPair {
        type1: (1.0 - accept).clamp(0.0, 1.0),
        type2: test.op.trace_product(sigma.op()).clamp(0.0, 1.0),
    })
}

/// `D_H^eps(rho_n || sigma_n) / copies` for the states of strategy `s`.
pub fn optimal_type2(s: &Strategy, n: &QuantumChannel, m: &QuantumChannel, copies: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(crate::error::parameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    let (rho, sigma) = generate_testing_states(s, n, m, copies)?;
    Ok(hypothesis_testing(&rho, &sigma, ErrorThreshold::new(eps)?)?.to_scalar() / copies as f64)
}
