//! Reproduction harness: seeded test signals, the missing-coefficient and denoising
//! scenarios, and the worked polyphase examples.
//!
//! Signals with prescribed periodic components are sums of random elements of the
//! subspaces `S_{1,q}`, drawn from a seeded generator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filterbank::RamanujanFilterBank;
use crate::frame::{frame_report, polyphase_matrices, FrameClass};
use crate::random::{normal_vec, SeededRng};
use crate::recovery::{
    add_noise, denoise, detect_support_set, missing_condition, recover_missing,
    recover_missing_periodic, snr_of, truncated_sum, CoefficientSet, NoiseModel,
};
use crate::signal::Signal;
use crate::subspace::subspace_basis;

/// Signal whose component in `S_{1,q}` is a standard Gaussian draw for each `q` in
/// `components`, and zero elsewhere.
pub fn periodic_signal(n: usize, components: &[usize], rng: &mut SeededRng) -> Result<Signal> {
    let mut x = vec![0.0; n];
    for &q in components {
        let s = subspace_basis(1, q, n)?;
        let g = normal_vec(rng, s.dim());
        for (j, gj) in g.iter().enumerate() {
            for (xi, b) in x.iter_mut().zip(s.orthonormal.column(j).iter()) {
                *xi += gj * b;
            }
        }
    }
    Signal::new(x)
}

/// Signal of length `n` repeating `period` Gaussian samples.
pub fn period_signal(n: usize, period: usize, rng: &mut SeededRng) -> Result<Signal> {
    if period == 0 || n % period != 0 {
        return Err(Error::domain(format!("period {period} does not divide {n}")));
    }
    let base = normal_vec(rng, period);
    Signal::new((0..n).map(|k| base[k % period]).collect())
}

pub const MISSING_N: usize = 70;
pub const MISSING_P: usize = 2;
pub const MISSING_PERIODS: [usize; 2] = [5, 7];

/// Missing-coefficient scenarios on `N = 70`, `p = 2`, as `(k range, 1-based channel)`.
pub fn missing_cases() -> Vec<Vec<(std::ops::RangeInclusive<usize>, usize)>> {
    vec![
        vec![(0..=2, 2), (17..=20, 3), (27..=29, 5)],
        vec![(15..=34, 4)],
        vec![(0..=24, 3), (0..=24, 8)],
        vec![(0..=10, 3), (21..=34, 5), (10..=34, 7)],
        vec![(6..=34, 4), (0..=34, 5), (12..=12, 6), (0..=34, 7)],
        vec![
            (0..=9, 1),
            (5..=14, 2),
            (11..=30, 3),
            (21..=34, 4),
            (17..=34, 5),
            (6..=34, 7),
        ],
    ]
}

/// Known-coefficient set `J` for one of [`missing_cases`].
pub fn known_set(bank: &RamanujanFilterBank, case: &[(std::ops::RangeInclusive<usize>, usize)]) -> CoefficientSet {
    let missing = CoefficientSet::new(
        case.iter()
            .flat_map(|(r, i)| r.clone().map(move |k| (k, i - 1))),
    );
    missing.complement(bank)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MissingOutcome {
    pub case: usize,
    pub missing: usize,
    /// `2 #J^c #C`.
    pub condition_lhs: f64,
    pub bound: f64,
    pub snr_observed_db: f64,
    pub gain_plain_db: f64,
    pub gain_periodic_db: f64,
    pub sup_error_plain: f64,
    pub sup_error_periodic: f64,
}

/// Recovers `x` from `T_J x` with and without the period constraint.
pub fn run_missing_case(
    case: usize,
    x: &Signal,
    j: &CoefficientSet,
    bank: &RamanujanFilterBank,
    periods: &[usize],
) -> Result<MissingOutcome> {
    let observed = truncated_sum(x, j, bank)?;
    let cond = missing_condition(x, j, bank)?;
    let snr_obs = snr_of(x, &observed)?;
    let plain = recover_missing(&observed, j, bank)?;
    let periodic = recover_missing_periodic(&observed, j, bank, periods)?;
    Ok(MissingOutcome {
        case,
        missing: bank.total_coefficients() - j.len(),
        condition_lhs: cond.lhs,
        bound: cond.bound,
        snr_observed_db: snr_obs,
        gain_plain_db: snr_of(x, &plain.signal)? - snr_obs,
        gain_periodic_db: snr_of(x, &periodic.signal)? - snr_obs,
        sup_error_plain: plain.signal.sup_distance(x),
        sup_error_periodic: periodic.signal.sup_distance(x),
    })
}

pub const DENOISE_N: usize = 30;

/// Periodic components and input SNR (dB) of the denoising scenarios on `N = 30`, `p = 1`.
pub fn denoise_cases() -> Vec<(Vec<usize>, f64)> {
    vec![
        (vec![1, 3], 0.0007),
        (vec![3, 5], 0.0006),
        (vec![2, 15], 0.0009),
        (vec![3, 5, 10], 0.0004),
        (vec![1, 2, 3, 6], 0.0008),
        (vec![1, 3, 5, 6, 10], 0.0005),
        (vec![2, 3, 5, 6, 10, 15], 0.0008),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenoiseOutcome {
    pub components: Vec<usize>,
    pub detected: Vec<usize>,
    /// `2 #M`, to be multiplied by the noise support size.
    pub condition_factor: usize,
    pub noise_support: usize,
    pub bound: f64,
    pub snr_noisy_db: f64,
    pub gain_db: f64,
}

/// Adds Gaussian noise at `snr_db`, detects the active channels and denoises.
pub fn run_denoise_case(
    x: &Signal,
    components: &[usize],
    bank: &RamanujanFilterBank,
    snr_db: f64,
    threshold: f64,
    seed: u64,
) -> Result<DenoiseOutcome> {
    let y = add_noise(x, &NoiseModel::Gaussian { snr_db }, seed)?;
    let est = detect_support_set(&y, bank, threshold)?;
    let out = denoise(&y, &est.set, bank)?;
    let snr_noisy = snr_of(x, &y)?;
    let noise_support = y.sub(x)?.values().iter().filter(|v| **v != 0.0).count();
    let p = bank.decimation().unwrap_or(1);
    Ok(DenoiseOutcome {
        components: components.to_vec(),
        detected: est.channels.iter().map(|&i| bank.channels()[i].q).collect(),
        condition_factor: 2 * est.set.len(),
        noise_support,
        bound: crate::recovery::product_bound(p, bank.n())?,
        snr_noisy_db: snr_noisy,
        gain_db: snr_of(x, &out.signal)? - snr_noisy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExampleSummary {
    pub n: usize,
    pub p: usize,
    pub class: String,
    pub bound: Option<f64>,
    pub ranks: Vec<usize>,
    /// `U(m)` as `[re, im]` pairs, row-major, for every `m`.
    pub u: Vec<Vec<Vec<[f64; 2]>>>,
}

/// Polyphase matrices and classification for the worked examples.
pub fn worked_examples() -> Result<Vec<ExampleSummary>> {
    [(6, 2), (8, 1), (12, 2)]
        .into_iter()
        .map(|(n, p)| {
            let bank = RamanujanFilterBank::uniform(n, p)?;
            let r = frame_report(&bank)?;
            let (class, bound) = match r.class() {
                FrameClass::Tight { bound } => ("tight".to_string(), Some(bound)),
                FrameClass::Frame { .. } => ("frame".to_string(), None),
                FrameClass::NotFrame => ("not a frame".to_string(), None),
            };
            let u = polyphase_matrices(&bank)?
                .into_iter()
                .map(|m| {
                    (0..m.u.nrows())
                        .map(|i| (0..m.u.ncols()).map(|j| [m.u[(i, j)].re, m.u[(i, j)].im]).collect())
                        .collect()
                })
                .collect();
            Ok(ExampleSummary {
                n,
                p,
                class,
                bound,
                ranks: r.ranks,
                u,
            })
        })
        .collect()
}
