mod common;

use proptest::prelude::*;
use rframes::experiments::periodic_signal;
use rframes::filterbank::{channel_energies, identify_period, AnalysisCoefficients, DEFAULT_ZERO_TOL};
use rframes::random::{normal_vec, seeded};
use rframes::{analyze, synthesize, Channel, Error, RamanujanFilterBank, Signal};

fn sig(v: Vec<f64>) -> Signal {
    Signal::new(v).unwrap()
}

#[test]
fn analysis_is_decimated_convolution() {
    let mut rng = seeded(3);
    for (n, p) in [(6, 2), (12, 1), (30, 2), (20, 4), (18, 3)] {
        let bank = RamanujanFilterBank::uniform(n, p).unwrap();
        let x = normal_vec(&mut rng, n);
        let y = analyze(&sig(x.clone()), &bank).unwrap();
        for (i, q) in common::divisors(n).into_iter().enumerate() {
            let full = common::conv(&x, &common::c_vec(q, n));
            for k in 0..n / p {
                assert!((y.get(k, i) - full[p * k]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn c3_autocorrelation_channel() {
    let bank = RamanujanFilterBank::uniform(6, 1).unwrap();
    let c3 = common::c_vec(3, 6);
    let y = analyze(&sig(c3.clone()), &bank).unwrap();
    for (i, q) in [1, 2, 3, 6].into_iter().enumerate() {
        for k in 0..6 {
            let expect = if q == 3 { 6.0 * c3[k] } else { 0.0 };
            assert!((y.get(k, i) - expect).abs() < 1e-12, "q={q} k={k}");
        }
    }
    let zero = analyze(&Signal::zeros(6).unwrap(), &bank).unwrap();
    assert!(zero.flatten().iter().all(|v| *v == 0.0));
}

#[test]
fn synthesis_needs_the_tight_bound() {
    let mut rng = seeded(5);
    for (n, p, a) in [(30, 1, 900.0), (6, 2, 18.0), (8, 1, 64.0)] {
        let bank = RamanujanFilterBank::uniform(n, p).unwrap();
        let x = sig(normal_vec(&mut rng, n));
        let back = synthesize(&analyze(&x, &bank).unwrap(), &bank, a).unwrap();
        assert!(back.sup_distance(&x) < 1e-9);
        let zero = AnalysisCoefficients::from_flat(&bank, &vec![0.0; bank.total_coefficients()]).unwrap();
        assert_eq!(synthesize(&zero, &bank, a).unwrap(), Signal::zeros(n).unwrap());
        assert!(matches!(synthesize(&zero, &bank, a + 1.0), Err(Error::NotTight(_))));
    }
    let bank = RamanujanFilterBank::uniform(12, 2).unwrap();
    let y = analyze(&Signal::delta(12, 0).unwrap(), &bank).unwrap();
    assert!(matches!(synthesize(&y, &bank, 72.0), Err(Error::NotTight(_))));
}

#[test]
fn bank_validation_and_json() {
    assert!(RamanujanFilterBank::new(12, vec![Channel { q: 5, p: 1 }]).is_err());
    assert!(RamanujanFilterBank::new(12, vec![Channel { q: 4, p: 5 }]).is_err());
    assert!(RamanujanFilterBank::new(12, vec![Channel { q: 4, p: 1 }, Channel { q: 4, p: 2 }]).is_err());
    let bank = RamanujanFilterBank::new(12, vec![Channel { q: 3, p: 3 }, Channel { q: 12, p: 1 }]).unwrap();
    assert_eq!(bank.decimation(), None);
    assert_eq!(bank.total_coefficients(), 16);
    let back = RamanujanFilterBank::parse_json(&bank.to_json()).unwrap();
    assert_eq!(back.channels(), bank.channels());
    let parsed = RamanujanFilterBank::parse_json(r#"{"n": 6, "channels": [{"q": 1, "p": 2}, {"q": 3, "p": 2}]}"#).unwrap();
    assert_eq!(parsed.decimation(), Some(2));
    assert!(RamanujanFilterBank::parse_json(r#"{"n": 6, "channels": [{"q": 4, "p": 1}]}"#).is_err());
}

#[test]
fn non_uniform_analysis_uses_per_channel_ratio() {
    let bank = RamanujanFilterBank::new(12, vec![Channel { q: 3, p: 3 }, Channel { q: 12, p: 1 }]).unwrap();
    let x: Vec<f64> = (0..12).map(|t| (t as f64 * 0.7).sin()).collect();
    let y = analyze(&sig(x.clone()), &bank).unwrap();
    assert_eq!(y.channels[0].len(), 4);
    assert_eq!(y.channels[1].len(), 12);
    let f = common::conv(&x, &common::c_vec(3, 12));
    for k in 0..4 {
        assert!((y.channels[0][k] - f[3 * k]).abs() < 1e-9);
    }
}

#[test]
fn energies_of_single_sums() {
    let bank = RamanujanFilterBank::uniform(70, 1).unwrap();
    let e = channel_energies(&sig(common::c_vec(7, 70)), &bank).unwrap();
    for (q, v) in e.qs.iter().zip(&e.energies) {
        assert_eq!(*v > 1e-9, *q == 7, "q = {q}");
    }
    let e0 = channel_energies(&Signal::zeros(70).unwrap(), &bank).unwrap();
    assert!(e0.energies.iter().all(|v| *v == 0.0));
}

#[test]
fn period_identification_examples() {
    let x = periodic_signal(30, &[3, 5, 15], &mut seeded(2)).unwrap();
    let est = identify_period(&x, DEFAULT_ZERO_TOL).unwrap();
    assert_eq!(est.period, 15);
    assert_eq!(est.responding, vec![3, 5, 15]);
    assert_eq!(identify_period(&sig(vec![2.5; 30]), DEFAULT_ZERO_TOL).unwrap().period, 1);
    let c2c5: Vec<f64> = common::c_vec(2, 30).iter().zip(common::c_vec(5, 30)).map(|(a, b)| a + b).collect();
    let est = identify_period(&sig(c2c5), DEFAULT_ZERO_TOL).unwrap();
    assert_eq!(est.period, 10);
    assert_eq!(est.responding, vec![2, 5]);
    assert!(identify_period(&Signal::zeros(30).unwrap(), DEFAULT_ZERO_TOL).is_err());
}

/// For any signal of period `P | N`, only channels with `q | P` respond.
#[test]
fn divisor_restriction_exhaustive() {
    let mut rng = seeded(17);
    for n in 1..=60usize {
        let bank = RamanujanFilterBank::uniform(n, 1).unwrap();
        for period in common::divisors(n) {
            let base = normal_vec(&mut rng, period);
            let x: Vec<f64> = (0..n).map(|t| base[t % period]).collect();
            let e = channel_energies(&sig(x), &bank).unwrap();
            let max = e.max();
            for (q, v) in e.qs.iter().zip(&e.energies) {
                if *v > DEFAULT_ZERO_TOL * max {
                    assert_eq!(period % q, 0, "N={n} P={period} q={q}");
                }
            }
            let est = identify_period(&Signal::new((0..n).map(|t| base[t % period]).collect()).unwrap(), DEFAULT_ZERO_TOL).unwrap();
            assert_eq!(period % est.period, 0);
        }
    }
}

fn tight_case() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![
        (1usize..=40).prop_map(|n| (n, 1)),
        (0usize..10).prop_map(|k| (2 * (2 * k + 1), 2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_and_round_trip((n, p) in tight_case(), seed in any::<u64>()) {
        let bank = RamanujanFilterBank::uniform(n, p).unwrap();
        let x = sig(normal_vec(&mut seeded(seed), n));
        let y = analyze(&x, &bank).unwrap();
        let d = (n / p) as f64;
        let a = p as f64 * d * d;
        let energy: f64 = y.flatten().iter().map(|v| v * v).sum();
        prop_assert!((energy - a * x.norm_sq()).abs() <= 1e-9 * a * x.norm_sq());
        let back = synthesize(&y, &bank, a).unwrap();
        prop_assert!(back.sup_distance(&x) < 1e-9 * x.max_abs().max(1.0));
    }

    #[test]
    fn analysis_is_linear((n, p) in tight_case(), seed in any::<u64>(), s in -5.0..5.0f64) {
        let bank = RamanujanFilterBank::uniform(n, p).unwrap();
        let mut rng = seeded(seed);
        let x = sig(normal_vec(&mut rng, n));
        let z = sig(normal_vec(&mut rng, n));
        let lhs = analyze(&x.add(&z.scale(s)).unwrap(), &bank).unwrap().flatten();
        let ya = analyze(&x, &bank).unwrap().flatten();
        let yb = analyze(&z, &bank).unwrap().flatten();
        for ((l, a), b) in lhs.iter().zip(&ya).zip(&yb) {
            prop_assert!((l - (a + s * b)).abs() < 1e-8);
        }
    }

    #[test]
    fn period_sampling_restricts_channels(idx in 0usize..4, seed in any::<u64>()) {
        let n = [24usize, 30, 36, 60][idx];
        let ds = common::divisors(n);
        let period = ds[(seed % ds.len() as u64) as usize];
        let comps: Vec<usize> = common::divisors(period).into_iter().filter(|q| (seed >> (q % 50)) & 1 == 1).collect();
        prop_assume!(!comps.is_empty());
        let x = periodic_signal(n, &comps, &mut seeded(seed)).unwrap();
        let est = identify_period(&x, DEFAULT_ZERO_TOL).unwrap();
        prop_assert!(est.responding.iter().all(|q| period % q == 0));
        prop_assert_eq!(est.period, comps.iter().fold(1, |a, &q| common::lcm(a, q)));
    }
}
