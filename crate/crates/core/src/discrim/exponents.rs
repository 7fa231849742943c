use std::cell::RefCell;

use super::{error_pair, ErrorPair, TestOperator};
use crate::chandiv::{channel_divergence_seeded, tensor_witness, DivergenceKind, OptimizerConfig, DENSE_LIMIT};
use crate::error::{parameter, Error, Result};
use crate::statediv::{sandwiched_renyi, ExtReal, RenyiOrder};
use crate::{DensityOperator, PureStateVector, QuantumChannel};

/// Largest order on the strong converse grid.
pub const ALPHA_MAX: f64 = 64.0;
/// Smallest order on the error exponent grid.
pub const ALPHA_MIN: f64 = 1.0 / 64.0;

const PER_DECADE: f64 = 64.0;
const GOLDEN_STEPS: usize = 60;
const INFINITE_ABOVE: f64 = 1e6;

/// A rate together with a divergence curve `alpha -> D_alpha`.
pub struct ExponentQuery<F: Fn(f64) -> Result<f64>> {
    pub rate: f64,
    pub curve: F,
    pub alpha_max: f64,
    pub alpha_min: f64,
}

impl<F: Fn(f64) -> Result<f64>> ExponentQuery<F> {
    pub fn new(rate: f64, curve: F) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(parameter(format!("rate must be positive, got {rate}")));
        }
        Ok(Self { rate, curve, alpha_max: ALPHA_MAX, alpha_min: ALPHA_MIN })
    }

    fn objective(&self, alpha: f64) -> Result<f64> {
        let c = (self.curve)(alpha)?;
        let factor = if alpha.is_infinite() { 1.0 } else { (alpha - 1.0) / alpha };
        let bracket = self.rate - c;
        Ok(if bracket == 0.0 { 0.0 } else { factor * bracket })
    }
}

/// Value of an exponent and the order attaining it. `alpha` is 1 when the
/// supremum is the limit at `alpha -> 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub value: ExtReal<f64>,
    pub alpha: f64,
}

/// `1 + 10^x` style grid of offsets from 1, `PER_DECADE` points per decade.
fn log_grid(lo: f64, hi: f64) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let steps = ((b - a) * PER_DECADE).ceil().max(1.0) as usize;
    (0..=steps).map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64)).collect()
}

/// Golden-section maximisation of `g` on `[a, b]`.
fn golden(mut a: f64, mut b: f64, g: &impl Fn(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    for _ in 0..GOLDEN_STEPS {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d)?;
        }
    }
    Ok(if gc >= gd { (c, gc) } else { (d, gd) })
}

/// Best grid point, refined by golden-section search in `u = 1 - 1/alpha`
/// between its neighbours.
fn refine<F: Fn(f64) -> Result<f64>>(q: &ExponentQuery<F>, alphas: &[f64]) -> Result<(f64, f64)> {
    let mut values = Vec::with_capacity(alphas.len());
    for &a in alphas {
        values.push(q.objective(a)?);
    }
    let (i, &v) = values
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty grid");
    if !v.is_finite() {
        return Ok((alphas[i], v));
    }
    let to_u = |a: f64| 1.0 - 1.0 / a;
    let lo = to_u(alphas[i.saturating_sub(1)]);
    let hi = to_u(alphas[(i + 1).min(alphas.len() - 1)]);
    let (u, g) = golden(lo, hi, &|u| q.objective(1.0 / (1.0 - u)))?;
    Ok(if g > v { (1.0 / (1.0 - u), g) } else { (alphas[i], v) })
}

/// Strong converse exponent `sup_{alpha > 1} ((alpha-1)/alpha)(r - curve(alpha))`.
///
/// The grid covers `(1, alpha_max]`; the curve is also asked for its value at
/// `alpha = inf` and that endpoint is used whenever the curve supplies a
/// finite value there.
pub fn sc_exponent<F: Fn(f64) -> Result<f64>>(q: &ExponentQuery<F>) -> Result<Optimum> {
    if !(q.alpha_max > 1.0) {
        return Err(parameter("alpha_max must exceed 1"));
    }
    let alphas: Vec<f64> = log_grid(1e-3, q.alpha_max - 1.0).into_iter().map(|x| 1.0 + x).collect();
    let (mut alpha, mut value) = refine(q, &alphas)?;
    if let Ok(c) = (q.curve)(f64::INFINITY) {
        if c.is_finite() && q.rate - c > value {
            (alpha, value) = (f64::INFINITY, q.rate - c);
        }
    }
    if !(value > 0.0) {
        (alpha, value) = (1.0, 0.0);
    }
    Ok(Optimum { value: ExtReal::Finite(value), alpha })
}

/// Error exponent `sup_{0 < alpha < 1} ((alpha-1)/alpha)(r - curve(alpha))`.
///
/// Below `alpha_min` the order is halved while the bracket `curve - r` stays
/// positive; the result is `+inf` once the objective passes `1e6`.
pub fn err_exponent<F: Fn(f64) -> Result<f64>>(q: &ExponentQuery<F>) -> Result<Optimum> {
    if !(q.alpha_min > 0.0 && q.alpha_min < 0.5) {
        return Err(parameter("alpha_min must lie in (0, 1/2)"));
    }
    let mut alphas = log_grid(q.alpha_min, 0.5);
    let mut tail: Vec<f64> = log_grid(1e-3, 0.5).into_iter().map(|x| 1.0 - x).rev().collect();
    tail.retain(|&a| a > 0.5);
    alphas.extend(tail);
    let (mut alpha, mut value) = refine(q, &alphas)?;
    let infinite = |a: f64| Optimum { value: ExtReal::PosInfinity, alpha: a };
    if value > INFINITE_ABOVE {
        return Ok(infinite(alpha));
    }
    let mut a = q.alpha_min;
    for _ in 0..80 {
        a /= 2.0;
        let c = (q.curve)(a)?;
        if !(c > q.rate) {
            break;
        }
        let v = q.objective(a)?;
        if v > INFINITE_ABOVE {
            return Ok(infinite(a));
        }
        if v > value {
            (alpha, value) = (a, v);
        }
    }
    if !(value > 0.0) {
        (alpha, value) = (1.0, 0.0);
    }
    Ok(Optimum { value: ExtReal::Finite(value), alpha })
}

/// Both sides of the strong converse tradeoff
/// `-log(1 - type1) >= ((alpha-1)/alpha)(-log type2 - D~_alpha(rho || sigma))`
/// for a test on a pair of states, `alpha > 1`.
pub fn sc_tradeoff(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    test: &TestOperator,
    alpha: f64,
) -> Result<(f64, f64, ErrorPair)> {
    if !(alpha > 1.0) {
        return Err(parameter(format!("tradeoff needs alpha > 1, got {alpha}")));
    }
    let e = error_pair((rho, sigma), test)?;
    let d = sandwiched_renyi(rho, sigma, RenyiOrder::new(alpha)?)?.to_scalar();
    let lhs = -(1.0 - e.type1).log2();
    let rhs = (alpha - 1.0) / alpha * (-e.type2.log2() - d);
    Ok((lhs, rhs, e))
}

/// One evaluation of a channel divergence curve.
#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub alpha: f64,
    pub value: f64,
    pub witness: PureStateVector,
}

#[derive(Debug, Clone)]
pub struct ExponentRow {
    pub copies: usize,
    pub sc: Optimum,
    pub err: Optimum,
    /// Input attaining the sandwiched curve at `sc.alpha`, if that order was evaluated.
    pub sc_witness: Option<PureStateVector>,
    pub err_witness: Option<PureStateVector>,
    /// Evaluated points of `D~_alpha(n^(x)k || m^(x)k) / k`, sorted by order.
    pub sandwiched: Vec<CurvePoint>,
    /// Evaluated points of `D_alpha(n^(x)k || m^(x)k) / k`, sorted by order.
    pub petz: Vec<CurvePoint>,
}

#[derive(Debug, Clone)]
pub struct ExponentReport {
    pub rate: f64,
    pub rows: Vec<ExponentRow>,
}

/// Lazily evaluated channel curve. Each order starts from the previous
/// order's witness, so the sweep follows the optimiser by continuation.
struct ChannelCurve<'a> {
    n: QuantumChannel,
    m: QuantumChannel,
    copies: usize,
    cfg: &'a OptimizerConfig,
    petz: bool,
    seed: Option<PureStateVector>,
    points: RefCell<Vec<CurvePoint>>,
}

impl ChannelCurve<'_> {
    fn eval(&self, alpha: f64) -> Result<f64> {
        if let Some(p) = self.points.borrow().iter().find(|p| p.alpha == alpha) {
            return Ok(p.value);
        }
        let kind = match (self.petz, alpha.is_infinite()) {
            (false, true) => DivergenceKind::Dmax,
            (false, false) => DivergenceKind::Sandwiched(alpha),
            (true, _) => DivergenceKind::Petz(alpha),
        };
        let last = self.points.borrow().last().map(|p| p.witness.clone());
        let (warm, cfg) = match last {
            Some(w) => (vec![w], OptimizerConfig { restarts: 1, ..*self.cfg }),
            None => (self.seed.iter().cloned().collect(), *self.cfg),
        };
        let best = channel_divergence_seeded(&self.n, &self.m, kind, &cfg, &warm)?;
        let value = best.value.to_scalar() / self.copies as f64;
        self.points.borrow_mut().push(CurvePoint { alpha, value, witness: best.witness });
        Ok(value)
    }

    fn finish(self, at: f64) -> (Option<PureStateVector>, Vec<CurvePoint>) {
        let mut pts = self.points.into_inner();
        let w = pts.iter().find(|p| p.alpha == at).map(|p| p.witness.clone());
        pts.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        (w, pts)
    }
}

/// Strong converse and error exponents at rate `r` over the sandwiched and
/// Petz channel curves of `n^(x)k, m^(x)k` (divided by `k`) for `k = 1..=n_max`.
pub fn exponent_report(
    n: &QuantumChannel,
    m: &QuantumChannel,
    r: f64,
    n_max: usize,
    cfg: &OptimizerConfig,
) -> Result<ExponentReport> {
    cfg.validate()?;
    if n_max == 0 {
        return Err(parameter("n_max must be at least 1"));
    }
    let dim = n.dim_in() * n.dim_in().max(n.dim_out());
    if (dim as f64).powi(n_max as i32) > DENSE_LIMIT as f64 {
        return Err(Error::Resource(format!("{n_max} copies exceed the dense limit {DENSE_LIMIT}")));
    }
    let mut rows = Vec::with_capacity(n_max);
    let mut first: [Option<PureStateVector>; 2] = [None, None];
    for k in 1..=n_max {
        let (nk, mk) = (n.power(k), m.power(k));
        let curve = |petz: bool| -> Result<ChannelCurve<'_>> {
            let seed = match &first[petz as usize] {
                Some(w) => Some(tensor_witness(w, k)?),
                None => None,
            };
            Ok(ChannelCurve { n: nk.clone(), m: mk.clone(), copies: k, cfg, petz, seed, points: RefCell::new(Vec::new()) })
        };
        let sand = curve(false)?;
        let sc = sc_exponent(&ExponentQuery::new(r, |a| sand.eval(a))?)?;
        let petz = curve(true)?;
        let err = err_exponent(&ExponentQuery::new(r, |a| petz.eval(a))?)?;
        let (sc_witness, sandwiched) = sand.finish(sc.alpha);
        let (err_witness, petz) = petz.finish(err.alpha);
        if k == 1 {
            first = [sandwiched.first().map(|p| p.witness.clone()), petz.first().map(|p| p.witness.clone())];
        }
        rows.push(ExponentRow { copies: k, sc, err, sc_witness, err_witness, sandwiched, petz });
    }
    Ok(ExponentReport { rate: r, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statediv::petz_renyi;

    fn constant(c: f64, r: f64) -> ExponentQuery<impl Fn(f64) -> Result<f64>> {
        ExponentQuery::new(r, move |_| Ok(c)).unwrap()
    }

    #[test]
    fn constant_curves() {
        for &(c, r) in &[(0.0, 1.0), (0.3, 1.0), (1.0, 0.3), (0.5, 0.5), (2.0, 2.5)] {
            let sc = sc_exponent(&constant(c, r)).unwrap();
            assert!((sc.value.to_f64() - (r - c).max(0.0)).abs() < 1e-12, "{c} {r}");
        }
        assert_eq!(err_exponent(&constant(0.7, 0.7)).unwrap().value, ExtReal::Finite(0.0));
        assert_eq!(err_exponent(&constant(0.0, 0.7)).unwrap().value, ExtReal::Finite(0.0));
        assert_eq!(err_exponent(&constant(0.9, 0.7)).unwrap().value, ExtReal::PosInfinity);
    }

    #[test]
    fn state_curve_is_refined() {
        let rho = DensityOperator::diagonal(&[0.9, 0.1], vec![2]).unwrap();
        let sigma = DensityOperator::diagonal(&[0.4, 0.6], vec![2]).unwrap();
        let r = 1.2;
        let q = ExponentQuery::new(r, |a| Ok(sandwiched_renyi(&rho, &sigma, RenyiOrder::new(a)?)?.to_scalar())).unwrap();
        let sc = sc_exponent(&q).unwrap().value.to_f64();
        // dense scan as a cross-check
        let scan = (1..200_000)
            .map(|i| 1.0 + i as f64 * 3e-4)
            .map(|a| (a - 1.0) / a * (r - (q.curve)(a).unwrap()))
            .fold(0.0f64, f64::max);
        assert!(sc >= scan - 1e-9, "{sc} < {scan}");
        let q = ExponentQuery::new(0.2, |a| Ok(petz_renyi(&rho, &sigma, RenyiOrder::new(a)?)?.to_scalar())).unwrap();
        let err = err_exponent(&q).unwrap().value.to_f64();
        let scan = (1..10_000)
            .map(|i| i as f64 * 1e-4)
            .map(|a| (a - 1.0) / a * (0.2 - (q.curve)(a).unwrap()))
            .fold(0.0f64, f64::max);
        assert!(err >= scan - 1e-9 && err.is_finite(), "{err} < {scan}");
    }

    #[test]
    fn identical_channels_report() {
        let n = QuantumChannel::depolarizing(0.3, 2).unwrap();
        let cfg = OptimizerConfig { restarts: 1, max_iterations: 10, ..OptimizerConfig::default() };
        let rep = exponent_report(&n, &n, 0.4, 1, &cfg).unwrap();
        let row = &rep.rows[0];
        assert!((row.sc.value.to_f64() - 0.4).abs() < 1e-9);
        assert_eq!(row.err.value, ExtReal::Finite(0.0));
    }
}
