//! Channel divergences: worst-case input optimisation, regularised and
//! amortised estimates, the Choi max-divergence and the replacer
//! decomposition of positive definite channels.

mod amortized;
pub(crate) mod ascent;
mod optimize;
mod structure;

use crate::error::{parameter, Result};
use crate::statediv::{self, Divergence, ErrorThreshold, RenyiOrder};
use crate::DensityOperator;

pub use amortized::{amortized_lowerbound, amortized_lowerbound_seeded, product_pair, AmortizedBound};
pub use optimize::{
    channel_divergence, channel_divergence_seeded, evaluate_at, input_dims, regularized_estimate,
    regularized_estimate_with_limit, tensor_witness, ChannelDivergence, RegularizedPoint, DENSE_LIMIT,
};
pub use structure::{choi_dmax, positivity_check, replacer_decomposition, ReplacerDecomposition};

/// Settings for the multi-start ascent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Ascent stops once an accepted step improves the objective by less than this.
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { restarts: 32, max_iterations: 2000, convergence_tol: 1e-7, seed: 0 }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 || !(self.convergence_tol > 0.0) {
            return Err(parameter("optimizer settings must be positive"));
        }
        Ok(())
    }
}

/// The state divergence a channel divergence is induced by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DivergenceKind {
    Umegaki,
    Petz(f64),
    Sandwiched(f64),
    Dmax,
    Hypothesis(f64),
}

impl DivergenceKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Petz(a) | Self::Sandwiched(a) => RenyiOrder::new(a).map(|_| ()),
            Self::Hypothesis(e) if e >= 1.0 => Err(parameter("hypothesis testing needs eps < 1")),
            Self::Hypothesis(e) => ErrorThreshold::new(e).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, rho: &DensityOperator, sigma: &DensityOperator) -> Result<Divergence<f64>> {
        match *self {
            Self::Umegaki => statediv::umegaki(rho, sigma),
            Self::Petz(a) => statediv::petz_renyi(rho, sigma, RenyiOrder::new(a)?),
            Self::Sandwiched(a) => statediv::sandwiched_renyi(rho, sigma, RenyiOrder::new(a)?),
            Self::Dmax => statediv::dmax(rho, sigma),
            Self::Hypothesis(e) => statediv::hypothesis_testing(rho, sigma, ErrorThreshold::new(e)?),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Umegaki => "umegaki".into(),
            Self::Petz(a) => format!("petz({a})"),
            Self::Sandwiched(a) => format!("sandwiched({a})"),
            Self::Dmax => "dmax".into(),
            Self::Hypothesis(e) => format!("hypothesis({e})"),
        }
    }
}
