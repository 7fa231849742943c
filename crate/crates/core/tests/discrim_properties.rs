use chandisc::chandiv::OptimizerConfig;
use chandisc::discrim::{
    err_exponent, error_pair, exponent_report, generate_testing_states, optimal_type2, routing_updates, sc_exponent,
    stein_sequence, ExponentQuery, SteinClass, Strategy, TestOperator,
};
use chandisc::sample;
use chandisc::statediv::{hypothesis_testing, neyman_pearson, petz_renyi, sandwiched_renyi, ErrorThreshold, RenyiOrder};
use chandisc::{DensityOperator, QuantumChannel};
use proptest::prelude::*;
use rand::Rng;

fn random_pair(seed: u64) -> (QuantumChannel, QuantumChannel) {
    let r = &mut sample::rng(seed, 0);
    (sample::channel(r, 2, 2, 4).unwrap(), sample::channel(r, 2, 2, 4).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coherent_class_contains_product(seed in any::<u64>(), eps in 0.05f64..0.9) {
        let (n, m) = random_pair(seed);
        let r = &mut sample::rng(seed, 1);
        let (a, b) = (sample::density(r, &[2, 2], None), sample::density(r, &[2, 2], None));
        let pro = optimal_type2(&Strategy::Product(vec![a.clone(), b.clone()]), &n, &m, 2, eps).unwrap();
        let joint = a.tensor(&b).permute(&[0, 2, 1, 3]).unwrap().regroup(vec![4, 2, 2]).unwrap();
        let coh = optimal_type2(&Strategy::Coherent(joint), &n, &m, 2, eps).unwrap();
        prop_assert!(pro <= coh + 1e-6);
    }

    #[test]
    fn sequential_routing_matches_coherent(seed in any::<u64>(), eps in 0.05f64..0.9) {
        let (n, m) = random_pair(seed);
        let psi = sample::density(&mut sample::rng(seed, 2), &[2, 2, 2], None);
        let coh = optimal_type2(&Strategy::Coherent(psi.clone()), &n, &m, 2, eps).unwrap();
        let seq = optimal_type2(&routing_updates(&psi, 2, 2).unwrap(), &n, &m, 2, eps).unwrap();
        prop_assert!((coh - seq).abs() < 1e-9);
    }

    #[test]
    fn strong_converse_tradeoff(seed in any::<u64>(), d in 2usize..=4, alpha in 1.01f64..10.0) {
        let r = &mut sample::rng(seed, 0);
        let (rho, sigma) = (sample::density(r, &[d], None), sample::density(r, &[d], None));
        let test = TestOperator::new(sample::test_operator(r, d)).unwrap();
        let (lhs, rhs, _) = chandisc::discrim::sc_tradeoff(&rho, &sigma, &test, alpha).unwrap();
        prop_assert!(lhs >= rhs - 1e-9);
    }

    #[test]
    fn sc_exponent_is_nonnegative(seed in any::<u64>(), rate in 0.01f64..3.0) {
        let r = &mut sample::rng(seed, 0);
        let (rho, sigma) = (sample::density(r, &[3], None), sample::density(r, &[3], None));
        let q = ExponentQuery::new(rate, |a| Ok(sandwiched_renyi(&rho, &sigma, RenyiOrder::new(a)?)?.to_scalar())).unwrap();
        prop_assert!(sc_exponent(&q).unwrap().value.to_f64() >= 0.0);
    }
}

#[test]
fn neyman_pearson_beats_random_tests() {
    for inst in 0..4u64 {
        let r = &mut sample::rng(40, inst);
        let d = 3;
        let (rho, sigma) = (sample::density(r, &[d], None), sample::density(r, &[d], None));
        let eps = 0.2;
        let beta = neyman_pearson(&rho, &sigma, ErrorThreshold::new(eps).unwrap()).unwrap().beta;
        for _ in 0..500 {
            let test = TestOperator::new(sample::test_operator(r, d)).unwrap();
            let e = error_pair((&rho, &sigma), &test).unwrap();
            if e.type1 <= eps {
                assert!(e.type2 >= beta - 1e-8, "{} < {beta}", e.type2);
            }
        }
    }
}

#[test]
fn optimal_test_reproduces_the_dual_value() {
    let r = &mut sample::rng(41, 0);
    let (rho, sigma) = (sample::density(r, &[4], None), sample::density(r, &[4], None));
    let np = neyman_pearson(&rho, &sigma, ErrorThreshold::new(0.15).unwrap()).unwrap();
    let test = TestOperator::new(np.test.clone()).unwrap();
    let e = error_pair((&rho, &sigma), &test).unwrap();
    assert!(e.type1 <= 0.15 + 1e-9);
    assert!((e.type2 - np.beta).abs() < 1e-9 * np.beta.max(1e-3));
}

#[test]
fn identical_channels_give_the_trivial_rate() {
    let (n, _) = random_pair(42);
    let psi = sample::density(&mut sample::rng(42, 1), &[2, 2, 2], None);
    let v = optimal_type2(&Strategy::Coherent(psi), &n, &n, 2, 0.3).unwrap();
    assert!((v - (1.0 / 0.7f64).log2() / 2.0).abs() < 1e-9);
    let cfg = OptimizerConfig { restarts: 2, max_iterations: 20, ..OptimizerConfig::default() };
    for p in stein_sequence(&n, &n, 0.3, 2, SteinClass::Coh, &cfg).unwrap() {
        assert!((p.rate - (1.0 / 0.7f64).log2() / p.copies as f64).abs() < 1e-9);
    }
}

#[test]
fn replacer_strategies_all_agree() {
    let r = &mut sample::rng(43, 0);
    let (a, b) = (sample::density(r, &[2], None), sample::density(r, &[2], None));
    let n = QuantumChannel::replacer(&a, vec![2]).unwrap();
    let m = QuantumChannel::replacer(&b, vec![2]).unwrap();
    let expected = hypothesis_testing(&a.tensor(&b.clone()).partial_trace(&[0]).unwrap().tensor(&a), &b.tensor(&b), ErrorThreshold::new(0.2).unwrap())
        .unwrap()
        .to_scalar()
        / 2.0;
    let psi = sample::density(r, &[3, 2, 2], None);
    let product = Strategy::Product(vec![sample::density(r, &[2, 2], None), sample::density(r, &[1, 2], None)]);
    for s in [Strategy::Coherent(psi.clone()), product, routing_updates(&psi, 2, 2).unwrap()] {
        let (x, y) = generate_testing_states(&s, &n, &m, 2).unwrap();
        let v = optimal_type2(&s, &n, &m, 2, 0.2).unwrap();
        assert!((v - expected).abs() < 1e-8, "{v} vs {expected}");
        assert_eq!(x.dim(), y.dim());
    }
}

#[test]
fn replacer_report_matches_state_evaluators() {
    let rho = DensityOperator::diagonal(&[0.75, 0.25], vec![2]).unwrap();
    let sigma = DensityOperator::diagonal(&[0.35, 0.65], vec![2]).unwrap();
    let n = QuantumChannel::replacer(&rho, vec![2]).unwrap();
    let m = QuantumChannel::replacer(&sigma, vec![2]).unwrap();
    let cfg = OptimizerConfig { restarts: 1, max_iterations: 10, ..OptimizerConfig::with_seed(44) };
    for rate in [0.2, 0.9] {
        let rep = exponent_report(&n, &m, rate, 1, &cfg).unwrap();
        let sc = sc_exponent(&ExponentQuery::new(rate, |a| {
            if a.is_infinite() {
                return Ok(chandisc::statediv::dmax(&rho, &sigma)?.to_scalar());
            }
            Ok(sandwiched_renyi(&rho, &sigma, RenyiOrder::new(a)?)?.to_scalar())
        })
        .unwrap())
        .unwrap();
        let err = err_exponent(&ExponentQuery::new(rate, |a| Ok(petz_renyi(&rho, &sigma, RenyiOrder::new(a)?)?.to_scalar())).unwrap())
            .unwrap();
        assert!((rep.rows[0].sc.value.to_f64() - sc.value.to_f64()).abs() < 1e-9);
        assert_eq!(rep.rows[0].err.value.is_finite(), err.value.is_finite());
        if err.value.is_finite() {
            assert!((rep.rows[0].err.value.to_f64() - err.value.to_f64()).abs() < 1e-9);
        }
    }
}

#[test]
fn report_is_deterministic() {
    let (n, m) = random_pair(45);
    let cfg = OptimizerConfig { restarts: 2, max_iterations: 40, ..OptimizerConfig::with_seed(45) };
    let a = exponent_report(&n, &m, 0.6, 1, &cfg).unwrap();
    let b = exponent_report(&n, &m, 0.6, 1, &cfg).unwrap();
    assert_eq!(a.rows[0].sc, b.rows[0].sc);
    assert_eq!(a.rows[0].err, b.rows[0].err);
    assert_eq!(a.rows[0].sandwiched.len(), b.rows[0].sandwiched.len());
}

#[test]
fn greedy_sequential_strategy_runs() {
    let (n, m) = random_pair(46);
    let init = sample::density(&mut sample::rng(46, 1), &[2, 2], None);
    let cfg = OptimizerConfig { restarts: 2, max_iterations: 20, ..OptimizerConfig::default() };
    let updates = chandisc::discrim::greedy_updates(&n, &m, &init, 3, &cfg).unwrap();
    assert_eq!(updates.len(), 2);
    let s = Strategy::Sequential { initial: init, updates };
    let eps = sample::rng(46, 2).random_range(0.05..0.5);
    assert!(optimal_type2(&s, &n, &m, 3, eps).unwrap().is_finite());
}
