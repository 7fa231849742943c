//! Projected gradient ascent on a unit sphere with central-difference
//! gradients and backtracking.

const STEP: f64 = 1e-5;
const ARMIJO: f64 = 0.1;

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
}

/// Best point found by the ascent and its objective value.
pub(crate) struct Ascent {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Maximises `f` over each unit sphere of the blocks `x[b.0..b.1]`.
/// `f` must only depend on the direction of each block.
///
/// `f` returning `+inf` ends the search immediately.
pub(crate) fn maximise(
    mut x: Vec<f64>,
    blocks: &[(usize, usize)],
    f: impl Fn(&[f64]) -> f64,
    max_iterations: usize,
    tol: f64,
) -> Ascent {
    for &(a, b) in blocks {
        normalize(&mut x[a..b]);
    }
    let project = |x: &mut Vec<f64>| {
        for &(a, b) in blocks {
            normalize(&mut x[a..b]);
        }
    };
    let mut value = f(&x);
    let mut step = 1.0;
    let mut probe = x.clone();
    for _ in 0..max_iterations {
        if !value.is_finite() {
            break;
        }
        let mut grad = vec![0.0; x.len()];
        for i in 0..x.len() {
            probe.copy_from_slice(&x);
            probe[i] = x[i] + STEP;
            let up = f(&probe);
            probe[i] = x[i] - STEP;
            let down = f(&probe);
            grad[i] = if up.is_finite() && down.is_finite() { (up - down) / (2.0 * STEP) } else { 0.0 };
        }
        for &(a, b) in blocks {
            let dot: f64 = (a..b).map(|i| grad[i] * x[i]).sum();
            (a..b).for_each(|i| grad[i] -= dot * x[i]);
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2.sqrt() < tol {
            break;
        }
        let mut accepted = None;
        let mut s = step * 2.0;
        while s > 1e-12 {
            let mut cand: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi + s * gi).collect();
            project(&mut cand);
            let v = f(&cand);
            if v >= value + ARMIJO * s * g2 {
                accepted = Some((cand, v));
                break;
            }
            s *= 0.5;
        }
        let Some((cand, v)) = accepted else { break };
        step = s;
        let gain = v - value;
        x = cand;
        value = v;
        if gain < tol {
            break;
        }
    }
    Ascent { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_top_eigenvector() {
        // Rayleigh quotient of diag(1, 3); objectives are read on the normalised point
        let f = |x: &[f64]| (x[0] * x[0] + 3.0 * x[1] * x[1]) / (x[0] * x[0] + x[1] * x[1]);
        let res = maximise(vec![1.0, 0.2], &[(0, 2)], f, 500, 1e-12);
        assert!((res.value - 3.0).abs() < 1e-8, "{}", res.value);
    }
}
