use chandisc::sample;
use chandisc::statediv::{
    hypothesis_testing, hypothesis_testing_oracle, neyman_pearson, ErrorThreshold,
};
use chandisc::DensityOperator;
use proptest::prelude::*;

fn threshold(e: f64) -> ErrorThreshold<f64> {
    ErrorThreshold::new(e).unwrap()
}

/// The returned test is primal feasible and its type II error matches the
/// dual value, which certifies optimality.
fn duality_gap(rho: &DensityOperator, sigma: &DensityOperator, eps: f64) -> (f64, f64) {
    let np = neyman_pearson(rho, sigma, threshold(eps)).unwrap();
    let type1 = 1.0 - np.test.trace_product(rho.op());
    let type2 = np.test.trace_product(sigma.op());
    (type1 - eps, (type2 - np.beta) / np.beta.max(1e-300))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn noncommuting_gap_closes(seed in any::<u64>(), d in 2usize..=8, eps in 0.01f64..0.95) {
        let mut r = sample::rng(seed, 0);
        let rho = sample::density(&mut r, &[d], None);
        let sigma = sample::density(&mut r, &[d], None);
        let (excess, gap) = duality_gap(&rho, &sigma, eps);
        prop_assert!(excess <= 1e-9, "type I excess {excess}");
        prop_assert!(gap.abs() <= 1e-8, "relative gap {gap}");
    }

    #[test]
    fn low_rank_gap_closes(seed in any::<u64>(), d in 2usize..=6, k in 1usize..=3, eps in 0.01f64..0.95) {
        let mut r = sample::rng(seed, 1);
        let rho = sample::density(&mut r, &[d], Some(k));
        let sigma = sample::density(&mut r, &[d], Some(k.max(2)));
        let np = neyman_pearson(&rho, &sigma, threshold(eps)).unwrap();
        let type1 = 1.0 - np.test.trace_product(rho.op());
        let type2 = np.test.trace_product(sigma.op());
        prop_assert!(type1 <= eps + 1e-9);
        prop_assert!((type2 - np.beta).abs() <= 1e-9 * np.beta.max(1e-3));
    }

    #[test]
    fn commuting_agrees_with_oracle(seed in any::<u64>(), d in 2usize..=6, eps in 0.01f64..0.99) {
        let mut r = sample::rng(seed, 2);
        use rand::Rng;
        let mut p: Vec<f64> = (0..d).map(|_| r.random::<f64>()).collect();
        let mut q: Vec<f64> = (0..d).map(|_| r.random::<f64>()).collect();
        let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
        p.iter_mut().for_each(|x| *x /= sp);
        q.iter_mut().for_each(|x| *x /= sq);
        let rho = DensityOperator::diagonal(&p, vec![d]).unwrap();
        let sigma = DensityOperator::diagonal(&q, vec![d]).unwrap();
        let a = hypothesis_testing(&rho, &sigma, threshold(eps)).unwrap().to_scalar();
        let b = hypothesis_testing_oracle(&p, &q, eps);
        prop_assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
}

#[test]
fn compressed_large_instance() {
    let mut r = sample::rng(11, 0);
    let rho = sample::density(&mut r, &[48], Some(10));
    let sigma = sample::density(&mut r, &[48], Some(12));
    let (excess, gap) = duality_gap(&rho, &sigma, 0.2);
    assert!(excess <= 1e-9 && gap.abs() <= 1e-8, "{excess} {gap}");
}
