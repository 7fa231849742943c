//! Randomised checks of the inequalities behind the discrimination
//! results, plus the counterexample to the variance bound.
//!
//! Every trial draws its generator from `(seed, trial)` so reports are
//! reproducible regardless of how the trials are scheduled.

mod channels;
mod glt;
mod states;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::Result;
use crate::qmat::CMatrix;
use crate::sample;

pub use channels::{check_infnorm_bound, check_order_relation, check_symmetrization, check_ubd, check_ubd_sampled, UbdGrid};
pub use glt::{counterexample_glt, minimal_violating_dimension, GltRecord};
pub use states::{check_boundsdmin, check_continuity, check_dh_sandwiched, check_dpi, check_twomat, DPI_KINDS};

/// Default absolute tolerance of a check.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Outcome of one check.
///
/// The margin of a trial is `lhs - rhs - tol` for an asserted `lhs <= rhs`,
/// so a trial violates exactly when its margin is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    pub worst_margin: f64,
    /// Inputs and sides of the trial with the largest margin.
    pub witness: Value,
    pub seed: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// One evaluated trial: its margin and what produced it.
pub(crate) struct Trial {
    pub margin: f64,
    pub witness: Value,
}

impl Trial {
    /// `lhs <= rhs + tol`, with equal infinities counted as equal.
    pub fn le(lhs: f64, rhs: f64, tol: f64, witness: Value) -> Self {
        Self { margin: gap(lhs, rhs) - tol, witness }
    }

    /// Keeps whichever of the two has the larger margin.
    pub fn worse(self, other: Self) -> Self {
        if other.margin > self.margin {
            other
        } else {
            self
        }
    }
}

pub(crate) fn gap(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs {
        0.0
    } else {
        lhs - rhs
    }
}

/// Runs `trial` for indices `0..trials` in parallel and merges the results.
pub(crate) fn run_trials<F>(name: &str, trials: usize, seed: u64, trial: F) -> Result<CheckReport>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<Trial> + Sync,
{
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| trial(&mut sample::rng(seed, i as u64), i))
        .collect::<Result<_>>()?;
    Ok(merge(name, seed, results))
}

pub(crate) fn merge(name: &str, seed: u64, results: Vec<Trial>) -> CheckReport {
    let trials = results.len();
    let violations = results.iter().filter(|t| t.margin > 0.0).count();
    // first trial wins ties, so the witness does not depend on scheduling
    let worst = results.into_iter().reduce(Trial::worse);
    let (worst_margin, witness) = match worst {
        Some(t) => (t.margin, t.witness),
        None => (f64::NEG_INFINITY, Value::Null),
    };
    CheckReport { name: name.to_string(), trials, violations, worst_margin, witness, seed }
}

/// Row-major `[[re, im], ...]` rows.
pub(crate) fn matrix_json(m: &CMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect()))
            .collect(),
    )
}

/// JSON number, or the string `"inf"` / `"-inf"` / `"nan"`.
pub(crate) fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}
