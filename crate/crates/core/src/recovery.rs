//! Uncertainty inequalities and l1 recovery from tight Ramanujan filter banks.
//!
//! For a tight uniform bank with decimation `p`, `N = p d` and bound `A = p d^2`:
//!
//! * `S_x` counts the non-zero analysis coefficients, `B_x` the non-zero samples, and
//!   `S_x + B_x >= 2 d sqrt(p) / phi(N)`, `S_x B_x >= p (d / phi(N))^2`.
//! * Missing coefficients are filled in by the l1-minimal signal that keeps the known ones.
//! * Sparse noise is removed by a least-absolute-deviation fit onto the subspace whose
//!   coefficients vanish outside a membership set.

use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::{analyze, channel_energies, synthesize_unchecked, AnalysisCoefficients, RamanujanFilterBank};
use crate::frame::frame_report;
use crate::linalg::{null_space, project_equalities, reduce_equalities, row_space};
use crate::lp::{l1_minimize, LpStats};
use crate::number_theory::{divisor_list, totient};
use crate::random::{seeded, standard_normal};
use crate::signal::{same_len, Signal};
use crate::subspace::subspace_basis;

/// Relative tolerance for counting non-zero coefficients and samples.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Default fraction of the largest channel energy kept by [`detect_support_set`].
pub const DEFAULT_THRESHOLD: f64 = 0.45;

/// Set of coefficient positions `(k, i)`, `i` being the 0-based channel index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoefficientSet {
    pairs: BTreeSet<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct PairsDoc {
    pairs: Vec<[usize; 2]>,
}

impl CoefficientSet {
    pub fn new(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self {
            pairs: pairs.into_iter().collect(),
        }
    }

    /// Every coefficient of the bank.
    pub fn full(bank: &RamanujanFilterBank) -> Self {
        Self::new((0..bank.num_channels()).flat_map(|i| (0..bank.channel_len(i)).map(move |k| (k, i))))
    }

    /// All coefficients of the listed channels.
    pub fn channels(bank: &RamanujanFilterBank, channels: &[usize]) -> Self {
        Self::new(
            channels
                .iter()
                .flat_map(|&i| (0..bank.channel_len(i)).map(move |k| (k, i))),
        )
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, k: usize, i: usize) -> bool {
        self.pairs.contains(&(k, i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn insert(&mut self, k: usize, i: usize) {
        self.pairs.insert((k, i));
    }

    pub fn complement(&self, bank: &RamanujanFilterBank) -> Self {
        Self::new(Self::full(bank).iter().filter(|&(k, i)| !self.contains(k, i)))
    }

    pub fn validate(&self, bank: &RamanujanFilterBank) -> Result<()> {
        for (k, i) in self.iter() {
            if i >= bank.num_channels() || k >= bank.channel_len(i) {
                return Err(Error::domain(format!("coefficient ({k}, {i}) outside the bank")));
            }
        }
        Ok(())
    }

    /// Parses `{"pairs": [[k, i], ...]}` with a 1-based channel index `i`.
    pub fn parse_json(text: &str) -> Result<Self> {
        let doc: PairsDoc = serde_json::from_str(text)?;
        let mut out = Self::default();
        for [k, i] in doc.pairs {
            if i == 0 {
                return Err(Error::Parse("channel indices are 1-based".into()));
            }
            out.insert(k, i - 1);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PairsDoc {
            pairs: self.iter().map(|(k, i)| [k, i + 1]).collect(),
        })
        .expect("pair serialisation cannot fail")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse_json(&std::fs::read_to_string(path)?)
    }

    fn rows(&self, bank: &RamanujanFilterBank) -> DMatrix<f64> {
        let n = bank.n();
        let mut m = DMatrix::zeros(self.len(), n);
        for (r, (k, i)) in self.iter().enumerate() {
            for (c, v) in bank.frame_vector(k, i).into_iter().enumerate() {
                m[(r, c)] = v;
            }
        }
        m
    }
}

/// Decimation, `d` and tight bound of a tight uniform bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightShape {
    pub p: usize,
    pub d: usize,
    pub a: f64,
}

pub fn tight_shape(bank: &RamanujanFilterBank) -> Result<TightShape> {
    let p = bank
        .decimation()
        .ok_or_else(|| Error::NotTight("bank is not uniform".into()))?;
    let r = frame_report(bank)?;
    if !r.tight {
        return Err(Error::NotTight(format!("A = {}, B = {}", r.a, r.b)));
    }
    Ok(TightShape {
        p,
        d: bank.n() / p,
        a: r.a,
    })
}

/// `p (d / phi(N))^2`.
pub fn product_bound(p: usize, n: usize) -> Result<f64> {
    let d = (n / p) as f64;
    Ok(p as f64 * (d / totient(n)? as f64).powi(2))
}

/// `2 d sqrt(p) / phi(N)`.
pub fn sum_bound(p: usize, n: usize) -> Result<f64> {
    let d = (n / p) as f64;
    Ok(2.0 * d * (p as f64).sqrt() / totient(n)? as f64)
}

fn count_support(v: &[f64], tol: f64) -> usize {
    let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    v.iter().filter(|x| x.abs() > tol * m).count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub s_x: usize,
    pub b_x: usize,
    pub sum_bound: f64,
    pub prod_bound: f64,
    /// `max |c_q(n)|` over the filters, equal to `phi(N)`.
    pub beta_o: usize,
    pub holds_sum: bool,
    pub holds_prod: bool,
}

pub fn uncertainty_report(x: &Signal, bank: &RamanujanFilterBank, tol: f64) -> Result<UncertaintyReport> {
    same_len(x.len(), bank.n())?;
    if x.max_abs() == 0.0 {
        return Err(Error::domain("uncertainty counts need a non-zero signal"));
    }
    let shape = tight_shape(bank)?;
    let n = bank.n();
    let y = analyze(x, bank)?.flatten();
    let s_x = count_support(&y, tol);
    let b_x = count_support(x.values(), tol);
    let sum_b = sum_bound(shape.p, n)?;
    let prod_b = product_bound(shape.p, n)?;
    Ok(UncertaintyReport {
        s_x,
        b_x,
        sum_bound: sum_b,
        prod_bound: prod_b,
        beta_o: totient(n)?,
        holds_sum: (s_x + b_x) as f64 >= sum_b * (1.0 - 1e-12),
        holds_prod: (s_x * b_x) as f64 >= prod_b * (1.0 - 1e-12),
    })
}

/// `T_J x = (1/A) sum_{(k,i) in J} y_i(k) L_{pk} c_{q_i}`.
pub fn truncated_sum(x: &Signal, j: &CoefficientSet, bank: &RamanujanFilterBank) -> Result<Signal> {
    let shape = tight_shape(bank)?;
    j.validate(bank)?;
    let mut y = analyze(x, bank)?;
    for (i, ch) in y.channels.iter_mut().enumerate() {
        for (k, v) in ch.iter_mut().enumerate() {
            if !j.contains(k, i) {
                *v = 0.0;
            }
        }
    }
    synthesize_unchecked(&y, bank, shape.a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recovery {
    pub signal: Signal,
    pub stats: LpStats,
    /// Number of independent linear constraints passed to the solver.
    pub constraints: usize,
}

/// Orthonormal constraints `Q x' = Q x` equivalent to keeping the coefficients in `J`,
/// derived from the observation `T_J x`.
fn known_coefficient_constraints(
    observed: &Signal,
    j: &CoefficientSet,
    bank: &RamanujanFilterBank,
    a: f64,
) -> Result<(DMatrix<f64>, Vec<f64>)> {
    let g = j.rows(bank);
    let (v, _) = row_space(&g);
    let gram = g.transpose() * &g;
    let obs: Vec<f64> = observed.values().iter().map(|o| o * a).collect();
    let (rhs, outside) = project_equalities(&v, &gram, &obs);
    let norm = obs.iter().map(|o| o * o).sum::<f64>().sqrt();
    if outside > 1e-8 * norm.max(1.0) {
        return Err(Error::domain(
            "observation is not of the form T_J x for the given J",
        ));
    }
    Ok((v, rhs))
}

fn solve_constraints(q: &DMatrix<f64>, rhs: &[f64]) -> Result<(Signal, LpStats)> {
    let n = q.ncols();
    let sol = l1_minimize(q, rhs, &vec![true; n])?;
    Ok((Signal::new(sol.v)?, sol.stats))
}

fn check_truncation(x: &Signal, observed: &Signal, j: &CoefficientSet, bank: &RamanujanFilterBank) -> Result<()> {
    let t = truncated_sum(x, j, bank)?;
    let err = t.sup_distance(observed);
    if err > 1e-7 * observed.max_abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "recovered signal misses the known coefficients by {err:e}"
        )));
    }
    Ok(())
}

/// `argmin ||x'||_1` subject to `T_J x' = T_J x`.
pub fn recover_missing(observed: &Signal, j: &CoefficientSet, bank: &RamanujanFilterBank) -> Result<Recovery> {
    same_len(observed.len(), bank.n())?;
    let shape = tight_shape(bank)?;
    j.validate(bank)?;
    let (q, rhs) = known_coefficient_constraints(observed, j, bank, shape.a)?;
    let (signal, stats) = solve_constraints(&q, &rhs)?;
    check_truncation(&signal, observed, j, bank)?;
    Ok(Recovery {
        signal,
        stats,
        constraints: q.nrows(),
    })
}

/// As [`recover_missing`], with `x' * c_q = 0` for every divisor `q` not in `periods`.
pub fn recover_missing_periodic(
    observed: &Signal,
    j: &CoefficientSet,
    bank: &RamanujanFilterBank,
    periods: &[usize],
) -> Result<Recovery> {
    same_len(observed.len(), bank.n())?;
    let n = bank.n();
    if periods.is_empty() {
        return Err(Error::domain("at least one period is required"));
    }
    if let Some(bad) = periods.iter().find(|&&q| q == 0 || n % q != 0) {
        return Err(Error::domain(format!("period {bad} does not divide N = {n}")));
    }
    let shape = tight_shape(bank)?;
    j.validate(bank)?;
    let (q_known, rhs_known) = known_coefficient_constraints(observed, j, bank, shape.a)?;
    let excluded: Vec<usize> = divisor_list(n)
        .into_iter()
        .filter(|q| !periods.contains(q))
        .collect();
    let mut blocks = vec![q_known];
    let mut rhs = rhs_known;
    for q in excluded {
        let o = subspace_basis(1, q, n)?.orthonormal.transpose();
        rhs.extend(std::iter::repeat_n(0.0, o.nrows()));
        blocks.push(o);
    }
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut stacked = DMatrix::zeros(rows, n);
    let mut at = 0;
    for b in &blocks {
        stacked.view_mut((at, 0), (b.nrows(), n)).copy_from(b);
        at += b.nrows();
    }
    let scale = rhs.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let (q, rhs, bad) = reduce_equalities(&stacked, &rhs);
    if bad > 1e-8 * scale {
        return Err(Error::Infeasible);
    }
    let (signal, stats) = solve_constraints(&q, &rhs)?;
    check_truncation(&signal, observed, j, bank)?;
    Ok(Recovery {
        signal,
        stats,
        constraints: q.nrows(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Denoised {
    pub signal: Signal,
    pub stats: LpStats,
    /// Dimension of the subspace the fit is restricted to.
    pub subspace_dim: usize,
}

/// Orthonormal basis of `{h : coefficients of h vanish outside M}`.
pub fn membership_subspace(m: &CoefficientSet, bank: &RamanujanFilterBank) -> Result<DMatrix<f64>> {
    m.validate(bank)?;
    let comp = m.complement(bank);
    Ok(null_space(&comp.rows(bank)))
}

/// `argmin_{x' in S_M} ||y - x'||_1`.
pub fn denoise(y: &Signal, m: &CoefficientSet, bank: &RamanujanFilterBank) -> Result<Denoised> {
    same_len(y.len(), bank.n())?;
    tight_shape(bank)?;
    let b = membership_subspace(m, bank)?;
    let n = bank.n();
    let k = b.ncols();
    if k == 0 {
        return Err(Error::domain("membership set leaves only the zero signal"));
    }
    let mut a = DMatrix::zeros(n, k + n);
    a.view_mut((0, 0), (n, k)).copy_from(&b);
    a.view_mut((0, k), (n, n)).copy_from(&DMatrix::identity(n, n));
    let mut pen = vec![false; k];
    pen.extend(std::iter::repeat_n(true, n));
    let sol = l1_minimize(&a, y.values(), &pen)?;
    let z = DVector::from_column_slice(&sol.v[..k]);
    let x = &b * z;
    Ok(Denoised {
        signal: Signal::new(x.iter().copied().collect())?,
        stats: sol.stats,
        subspace_dim: k,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportEstimate {
    pub set: CoefficientSet,
    /// 0-based indices of the channels that were kept.
    pub channels: Vec<usize>,
    pub energies: Vec<f64>,
}

/// Keeps every coefficient of the channels whose undecimated output energy exceeds
/// `threshold` times the largest one.
pub fn detect_support_set(y: &Signal, bank: &RamanujanFilterBank, threshold: f64) -> Result<SupportEstimate> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::domain("threshold must lie in (0, 1)"));
    }
    let e = channel_energies(y, bank)?;
    let max = e.max();
    if max == 0.0 {
        return Err(Error::domain("all channel energies are zero"));
    }
    let channels: Vec<usize> = (0..e.energies.len())
        .filter(|&i| e.energies[i] > threshold * max)
        .collect();
    Ok(SupportEstimate {
        set: CoefficientSet::channels(bank, &channels),
        channels,
        energies: e.energies,
    })
}

/// `10 log10(P_x / P_e)` with `P = ||.||^2 / N`. A zero error gives `+inf`.
pub fn snr_db(x: &Signal, error: &Signal) -> Result<f64> {
    same_len(x.len(), error.len())?;
    let pe = error.norm_sq();
    if pe == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (x.norm_sq() / pe).log10())
}

/// SNR of an estimate of `x`.
pub fn snr_of(x: &Signal, estimate: &Signal) -> Result<f64> {
    snr_db(x, &estimate.sub(x)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseModel {
    Sparse { support: Vec<usize>, values: Vec<f64> },
    Gaussian { snr_db: f64 },
}

/// `x + eta`. Gaussian noise is drawn with Box–Muller from a seeded generator and scaled
/// so that the SNR equals the target exactly; for `x = 0` it is zero.
pub fn add_noise(x: &Signal, model: &NoiseModel, seed: u64) -> Result<Signal> {
    let n = x.len();
    let eta = match model {
        NoiseModel::Sparse { support, values } => {
            if support.len() != values.len() {
                return Err(Error::domain("sparse noise support and values differ in length"));
            }
            let mut e = vec![0.0; n];
            for (&k, &v) in support.iter().zip(values) {
                if k >= n {
                    return Err(Error::domain(format!("noise position {k} outside Z_{n}")));
                }
                e[k] += v;
            }
            e
        }
        NoiseModel::Gaussian { snr_db } => {
            if !snr_db.is_finite() {
                return Err(Error::domain("target SNR must be finite"));
            }
            let mut rng = seeded(seed);
            let raw: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
            let raw_e: f64 = raw.iter().map(|v| v * v).sum();
            let target = x.norm_sq() / 10f64.powf(snr_db / 10.0);
            let s = if raw_e > 0.0 { (target / raw_e).sqrt() } else { 0.0 };
            raw.into_iter().map(|v| v * s).collect()
        }
    };
    x.add(&Signal::new(eta)?)
}

/// `2 #J^c #C` against `p (d/phi(N))^2` for recovering `x` from the coefficients in `J`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub lhs: f64,
    pub bound: f64,
    pub satisfied: bool,
}

pub fn missing_condition(x: &Signal, j: &CoefficientSet, bank: &RamanujanFilterBank) -> Result<ConditionCheck> {
    let shape = tight_shape(bank)?;
    let missing = bank.total_coefficients() - j.len();
    let c = count_support(x.values(), SUPPORT_TOL);
    let lhs = (2 * missing * c) as f64;
    let bound = product_bound(shape.p, bank.n())?;
    Ok(ConditionCheck {
        lhs,
        bound,
        satisfied: lhs < bound,
    })
}

/// `2 #M #N` against `p (d/phi(N))^2` for removing noise supported on `noise_support`.
pub fn denoise_condition(m: &CoefficientSet, noise_support: usize, bank: &RamanujanFilterBank) -> Result<ConditionCheck> {
    let shape = tight_shape(bank)?;
    let lhs = (2 * m.len() * noise_support) as f64;
    let bound = product_bound(shape.p, bank.n())?;
    Ok(ConditionCheck {
        lhs,
        bound,
        satisfied: lhs < bound,
    })
}

/// Analysis coefficients of `x` restricted to `set` (others zero).
pub fn restrict(coeffs: &AnalysisCoefficients, set: &CoefficientSet) -> AnalysisCoefficients {
    let channels = coeffs
        .channels
        .iter()
        .enumerate()
        .map(|(i, ch)| {
            ch.iter()
                .enumerate()
                .map(|(k, &v)| if set.contains(k, i) { v } else { 0.0 })
                .collect()
        })
        .collect();
    AnalysisCoefficients { channels }
}
