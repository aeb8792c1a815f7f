//! Ramanujan filter banks: channel layout, analysis, synthesis and channel energies.
//!
//! Channel `i` filters with `c_{q_i}` and keeps every `p_i`-th output, so its analysis
//! coefficients are `y_i(k) = <x, L_{p_i k} c_{q_i}>` for `k = 0..N/p_i - 1`. Because
//! `c_q` is even, the time-reversed filter equals the filter itself.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame;
use crate::number_theory::{divisor_list, lcm, ramanujan_sum};
use crate::signal::{circular_convolution, circular_shift, same_len, Signal};

/// Default relative threshold below which a channel energy counts as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub q: usize,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamanujanFilterBank {
    n: usize,
    channels: Vec<Channel>,
    filters: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct BankDoc {
    n: usize,
    channels: Vec<Channel>,
}

impl RamanujanFilterBank {
    /// Bank with arbitrary channels. Each `q_i` and `p_i` must divide `N`, and the `q_i`
    /// must be distinct.
    pub fn new(n: usize, channels: Vec<Channel>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("N must be positive"));
        }
        if channels.is_empty() {
            return Err(Error::domain("a bank needs at least one channel"));
        }
        for (j, c) in channels.iter().enumerate() {
            if channels[..j].iter().any(|o| o.q == c.q) {
                return Err(Error::domain(format!("channel q = {} listed twice", c.q)));
            }
            if c.q == 0 || n % c.q != 0 {
                return Err(Error::domain(format!("q = {} does not divide N = {n}", c.q)));
            }
            if c.p == 0 || n % c.p != 0 {
                return Err(Error::domain(format!(
                    "decimation p = {} does not divide N = {n}",
                    c.p
                )));
            }
        }
        let filters = channels
            .iter()
            .map(|c| ramanujan_sum(c.q, n).map(|r| r.to_f64()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            channels,
            filters,
        })
    }

    /// One channel per divisor of `N`, all decimated by `p`.
    pub fn uniform(n: usize, p: usize) -> Result<Self> {
        if n == 0 || p == 0 || n % p != 0 {
            return Err(Error::domain(format!("p = {p} must divide N = {n}")));
        }
        let channels = divisor_list(n).into_iter().map(|q| Channel { q, p }).collect();
        Self::new(n, channels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn filter(&self, i: usize) -> &[f64] {
        &self.filters[i]
    }

    /// Common decimation ratio when all channels share one.
    pub fn decimation(&self) -> Option<usize> {
        let p = self.channels[0].p;
        self.channels.iter().all(|c| c.p == p).then_some(p)
    }

    /// Number of analysis coefficients produced by channel `i`.
    pub fn channel_len(&self, i: usize) -> usize {
        self.n / self.channels[i].p
    }

    pub fn total_coefficients(&self) -> usize {
        (0..self.num_channels()).map(|i| self.channel_len(i)).sum()
    }

    /// Position of `(k, i)` in the channel-major flattening of the coefficients.
    pub fn flat_index(&self, k: usize, i: usize) -> usize {
        (0..i).map(|j| self.channel_len(j)).sum::<usize>() + k
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn pair_of(&self, mut flat: usize) -> (usize, usize) {
        for i in 0..self.num_channels() {
            let len = self.channel_len(i);
            if flat < len {
                return (flat, i);
            }
            flat -= len;
        }
        panic!("flat index out of range");
    }

    /// Frame vector `L_{p_i k} c_{q_i}`.
    pub fn frame_vector(&self, k: usize, i: usize) -> Vec<f64> {
        circular_shift(&self.filters[i], (self.channels[i].p * k) as i64)
    }

    /// Matrix whose rows are the frame vectors in channel-major order.
    pub fn analysis_matrix(&self) -> DMatrix<f64> {
        let rows = self.total_coefficients();
        let mut m = DMatrix::zeros(rows, self.n);
        let mut r = 0;
        for i in 0..self.num_channels() {
            for k in 0..self.channel_len(i) {
                for (j, v) in self.frame_vector(k, i).into_iter().enumerate() {
                    m[(r, j)] = v;
                }
                r += 1;
            }
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&BankDoc {
            n: self.n,
            channels: self.channels.clone(),
        })
        .expect("bank serialisation cannot fail")
    }

    /// Parses `{"n": N, "channels": [{"q": .., "p": ..}, ...]}`.
    pub fn parse_json(text: &str) -> Result<Self> {
        let doc: BankDoc = serde_json::from_str(text)?;
        Self::new(doc.n, doc.channels)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse_json(&std::fs::read_to_string(path)?)
    }
}

/// Analysis output, one vector per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisCoefficients {
    pub channels: Vec<Vec<f64>>,
}

impl AnalysisCoefficients {
    pub fn get(&self, k: usize, i: usize) -> f64 {
        self.channels[i][k]
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.channels.iter().flatten().copied().collect()
    }

    pub fn from_flat(bank: &RamanujanFilterBank, flat: &[f64]) -> Result<Self> {
        same_len(flat.len(), bank.total_coefficients())?;
        let mut channels = Vec::with_capacity(bank.num_channels());
        let mut at = 0;
        for i in 0..bank.num_channels() {
            let len = bank.channel_len(i);
            channels.push(flat[at..at + len].to_vec());
            at += len;
        }
        Ok(Self { channels })
    }
}

/// Computes `y_i(k) = <x, L_{p_i k} c_{q_i}>` for every channel.
pub fn analyze(x: &Signal, bank: &RamanujanFilterBank) -> Result<AnalysisCoefficients> {
    same_len(x.len(), bank.n())?;
    let n = bank.n();
    let xv = x.values();
    let channels = (0..bank.num_channels())
        .map(|i| {
            let c = bank.filter(i);
            let p = bank.channels()[i].p;
            (0..bank.channel_len(i))
                .map(|k| {
                    let s = p * k;
                    (0..n).map(|t| xv[t] * c[(t + n - s) % n]).sum()
                })
                .collect()
        })
        .collect();
    Ok(AnalysisCoefficients { channels })
}

/// Reconstructs `(1/A) sum_{i,k} y_i(k) L_{p_i k} c_{q_i}`.
///
/// The bank must be a tight frame whose bound matches `a` to a relative `1e-9`.
pub fn synthesize(
    coeffs: &AnalysisCoefficients,
    bank: &RamanujanFilterBank,
    a: f64,
) -> Result<Signal> {
    let bounds = frame::frame_bounds(bank)?;
    if !bounds.tight {
        return Err(Error::NotTight(format!(
            "frame bounds are A = {}, B = {}",
            bounds.a, bounds.b
        )));
    }
    if (bounds.a - a).abs() > 1e-9 * bounds.a.abs().max(1.0) {
        return Err(Error::NotTight(format!(
            "supplied bound {a} differs from the tight bound {}",
            bounds.a
        )));
    }
    synthesize_unchecked(coeffs, bank, a)
}

/// Synthesis without the tightness check. Used where the bank is already known to be tight.
pub fn synthesize_unchecked(
    coeffs: &AnalysisCoefficients,
    bank: &RamanujanFilterBank,
    a: f64,
) -> Result<Signal> {
    if coeffs.channels.len() != bank.num_channels() {
        return Err(Error::domain("coefficient channel count does not match the bank"));
    }
    let n = bank.n();
    let mut out = vec![0.0; n];
    for (i, y) in coeffs.channels.iter().enumerate() {
        same_len(y.len(), bank.channel_len(i))?;
        let c = bank.filter(i);
        let p = bank.channels()[i].p;
        for (k, &yk) in y.iter().enumerate() {
            if yk == 0.0 {
                continue;
            }
            let s = p * k;
            for (t, o) in out.iter_mut().enumerate() {
                *o += yk * c[(t + n - s) % n];
            }
        }
    }
    Signal::new(out.into_iter().map(|v| v / a).collect())
}

/// Energy of each undecimated channel output `x * c_{q_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    pub qs: Vec<usize>,
    pub energies: Vec<f64>,
}

impl EnergyProfile {
    pub fn max(&self) -> f64 {
        self.energies.iter().fold(0.0, |m, &e| m.max(e))
    }

    /// Orders `q` whose energy exceeds `rel_tol` times the largest energy.
    pub fn responding(&self, rel_tol: f64) -> Vec<usize> {
        let cut = rel_tol * self.max();
        self.qs
            .iter()
            .zip(&self.energies)
            .filter(|(_, &e)| e > cut)
            .map(|(&q, _)| q)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("q,energy\n");
        for (q, e) in self.qs.iter().zip(&self.energies) {
            s.push_str(&format!("{q},{e:?}\n"));
        }
        s
    }
}

pub fn channel_energies(x: &Signal, bank: &RamanujanFilterBank) -> Result<EnergyProfile> {
    same_len(x.len(), bank.n())?;
    let energies = (0..bank.num_channels())
        .map(|i| {
            circular_convolution(x.values(), bank.filter(i))
                .map(|y| y.iter().map(|v| v * v).sum())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EnergyProfile {
        qs: bank.channels().iter().map(|c| c.q).collect(),
        energies,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodEstimate {
    pub period: usize,
    pub responding: Vec<usize>,
    pub energies: EnergyProfile,
}

/// Period as the lcm of the divisors `q` whose channel responds.
pub fn identify_period(x: &Signal, zero_tol: f64) -> Result<PeriodEstimate> {
    if !(0.0..1.0).contains(&zero_tol) {
        return Err(Error::domain("zero tolerance must lie in [0, 1)"));
    }
    let bank = RamanujanFilterBank::uniform(x.len(), 1)?;
    let energies = channel_energies(x, &bank)?;
    if energies.max() == 0.0 {
        return Err(Error::domain("no channel responds: the signal is zero"));
    }
    let responding = energies.responding(zero_tol);
    let period = responding.iter().fold(1, |acc, &q| lcm(acc, q));
    Ok(PeriodEstimate {
        period,
        responding,
        energies,
    })
}
