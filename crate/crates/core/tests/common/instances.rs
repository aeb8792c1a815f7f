//! Seeded problem instances that satisfy the exact-recovery size conditions.

use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::Rng;
use rframes::random::{seeded, standard_normal};
use rframes::recovery::{product_bound, CoefficientSet};
use rframes::{RamanujanFilterBank, Signal};

/// Tight `(N, p)` cases whose product bound exceeds 2.
pub const TIGHT_CASES: [(usize, usize); 12] = [
    (6, 1),
    (10, 1),
    (12, 1),
    (18, 1),
    (30, 1),
    (42, 1),
    (6, 2),
    (10, 2),
    (14, 2),
    (30, 2),
    (38, 2),
    (42, 2),
];

pub struct MissingInstance {
    pub bank: RamanujanFilterBank,
    pub x: Signal,
    pub known: CoefficientSet,
    pub lhs: usize,
    pub bound: f64,
}

/// Sparse `x` and a missing set with `2 #J^c #C < p (d/phi(N))^2`.
pub fn missing_instance(seed: u64) -> MissingInstance {
    let mut rng = seeded(seed);
    let (n, p) = TIGHT_CASES[rng.random_range(0..TIGHT_CASES.len())];
    let bank = RamanujanFilterBank::uniform(n, p).unwrap();
    let bound = product_bound(p, n).unwrap();
    // Largest product m c with 2 m c < bound.
    let max_prod = ((bound / 2.0).ceil() as usize - 1).max(1);
    let c = rng.random_range(1..=max_prod);
    let m = rng.random_range(1..=max_prod / c);
    let mut x = vec![0.0; n];
    for k in sample(&mut rng, n, c) {
        let v = standard_normal(&mut rng);
        x[k] = v + v.signum();
    }
    let total = bank.total_coefficients();
    let missing = CoefficientSet::new(sample(&mut rng, total, m).into_iter().map(|f| bank.pair_of(f)));
    MissingInstance {
        known: missing.complement(&bank),
        bank,
        x: Signal::new(x).unwrap(),
        lhs: 2 * m * c,
        bound,
    }
}

pub struct DenoiseInstance {
    pub bank: RamanujanFilterBank,
    pub x: Signal,
    pub y: Signal,
    pub m: CoefficientSet,
    pub lhs: usize,
    pub bound: f64,
}

/// `x = a L_s (e_0 - e_{N/2} - e_b + e_{N/2+b})` lies in the primitive subspace `S_N` and
/// its `q = N` coefficients sit on its own four-point support `M`; one noise spike keeps
/// `2 #M #noise = 8` below the bound 9 of these `N`.
pub fn denoise_instance(seed: u64) -> DenoiseInstance {
    let mut rng = seeded(seed);
    let n = [6usize, 12, 18, 24, 36][rng.random_range(0..5)];
    let bank = RamanujanFilterBank::uniform(n, 1).unwrap();
    let b = if rng.random_bool(0.5) { n / 3 } else { 2 * n / 3 };
    let s = rng.random_range(0..n);
    let a = (1.0 + rng.random::<f64>()) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let mut x = vec![0.0; n];
    for (pos, sign) in [(0, 1.0), (n / 2, -1.0), (b, -1.0), (n / 2 + b, 1.0)] {
        x[(pos + s) % n] += a * sign;
    }
    let last = bank.num_channels() - 1;
    let m = CoefficientSet::new((0..n).filter(|&k| x[k] != 0.0).map(|k| (k, last)));
    let mut y = x.clone();
    let spike = rng.random_range(0..n);
    let amp = (0.5 + 4.5 * rng.random::<f64>()) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    y[spike] += amp;
    DenoiseInstance {
        lhs: 2 * m.len(),
        bank,
        x: Signal::new(x).unwrap(),
        y: Signal::new(y).unwrap(),
        m,
        bound: product_bound(1, n).unwrap(),
    }
}

/// Bounded, feasible standard-form program: `b = A x0` with `x0 >= 0` and
/// `c = A^T y + s` with `s >= 0`.
pub fn lp_instance(seed: u64) -> (DMatrix<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = seeded(seed);
    let m = rng.random_range(1..=4);
    let n = rng.random_range(m + 1..=8);
    let a = DMatrix::from_fn(m, n, |_, _| (rng.random_range(-40..=40) as f64) / 8.0);
    let x0: Vec<f64> = (0..n)
        .map(|_| if rng.random_bool(0.5) { rng.random_range(0..=20) as f64 / 4.0 } else { 0.0 })
        .collect();
    let b: Vec<f64> = (0..m).map(|r| (0..n).map(|j| a[(r, j)] * x0[j]).sum()).collect();
    let y: Vec<f64> = (0..m).map(|_| rng.random_range(-10..=10) as f64 / 4.0).collect();
    let c: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|r| a[(r, j)] * y[r]).sum::<f64>() + rng.random_range(0..=12) as f64 / 4.0)
        .collect();
    (a, b, c)
}
