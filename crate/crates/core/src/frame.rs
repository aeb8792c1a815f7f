//! Frame diagnostics for uniform Ramanujan filter banks.
//!
//! For a bank with common decimation `p` and `N = p d`, the polyphase matrix at
//! `m in Z_d` is the `K x p` matrix `U(m)` with entries `sqrt(d) * conj(Zc_{q_i}(m, n))`.
//! The optimal frame bounds are the extreme eigenvalues of `U(m)^* U(m)` over all `m`,
//! and the bank is a frame exactly when every `U(m)` has rank `p`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filterbank::RamanujanFilterBank;
use crate::number_theory::{gcd, totient};
use crate::zak::{zak_real, ZakImage};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Relative gap `(B - A) / B` under which a frame is reported as tight.
pub const TIGHT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct PolyphaseMatrix {
    pub m: usize,
    pub u: DMatrix<Complex64>,
}

impl PolyphaseMatrix {
    /// `U(m)^* U(m)`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        self.u.adjoint() * &self.u
    }

    /// Eigenvalues of `U^* U` in ascending order.
    pub fn gram_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.gram())
    }

    pub fn rank(&self) -> usize {
        let s = self.u.clone().singular_values();
        numerical_rank(s.iter().copied())
    }
}

pub(crate) fn numerical_rank(s: impl Iterator<Item = f64> + Clone) -> usize {
    let max = s.clone().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    s.filter(|&v| v > RANK_TOL * max).count()
}

pub(crate) fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

pub(crate) fn symmetric_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

fn uniform_p(bank: &RamanujanFilterBank) -> Result<usize> {
    bank.decimation()
        .ok_or_else(|| Error::domain("polyphase analysis needs a common decimation ratio"))
}

/// Zak transforms of every filter in the bank.
pub fn filter_zaks(bank: &RamanujanFilterBank) -> Result<Vec<ZakImage>> {
    let p = uniform_p(bank)?;
    (0..bank.num_channels())
        .map(|i| zak_real(bank.filter(i), p))
        .collect()
}

fn assemble(zaks: &[ZakImage], m: usize) -> PolyphaseMatrix {
    let p = zaks[0].p();
    let sd = (zaks[0].d() as f64).sqrt();
    let u = DMatrix::from_fn(zaks.len(), p, |i, n| zaks[i].get(m, n).conj() * sd);
    PolyphaseMatrix { m, u }
}

pub fn polyphase_matrix(bank: &RamanujanFilterBank, m: usize) -> Result<PolyphaseMatrix> {
    let p = uniform_p(bank)?;
    let d = bank.n() / p;
    if m >= d {
        return Err(Error::domain(format!("m = {m} outside Z_{d}")));
    }
    Ok(assemble(&filter_zaks(bank)?, m))
}

/// `U(m)` for every `m in Z_d`.
pub fn polyphase_matrices(bank: &RamanujanFilterBank) -> Result<Vec<PolyphaseMatrix>> {
    let zaks = filter_zaks(bank)?;
    let d = zaks[0].d();
    Ok((0..d).map(|m| assemble(&zaks, m)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub tight: bool,
    pub is_frame: bool,
    pub ranks: Vec<usize>,
    pub per_m_eigs: Vec<Vec<f64>>,
}

impl FrameReport {
    pub fn class(&self) -> FrameClass {
        if !self.is_frame {
            FrameClass::NotFrame
        } else if self.tight {
            FrameClass::Tight { bound: self.a }
        } else {
            FrameClass::Frame {
                a: self.a,
                b: self.b,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrameClass {
    Tight { bound: f64 },
    Frame { a: f64, b: f64 },
    NotFrame,
}

/// Polyphase frame analysis of a uniform bank.
pub fn frame_report(bank: &RamanujanFilterBank) -> Result<FrameReport> {
    let p = uniform_p(bank)?;
    let mats = polyphase_matrices(bank)?;
    let mut a = f64::INFINITY;
    let mut b: f64 = 0.0;
    let mut ranks = Vec::with_capacity(mats.len());
    let mut per_m_eigs = Vec::with_capacity(mats.len());
    for u in &mats {
        let eig = u.gram_eigenvalues();
        a = a.min(eig[0]);
        b = b.max(eig[eig.len() - 1]);
        ranks.push(u.rank());
        per_m_eigs.push(eig);
    }
    let is_frame = ranks.iter().all(|&r| r == p);
    let a = if is_frame { a } else { a.max(0.0) };
    let tight = is_frame && (b - a) <= TIGHT_TOL * b;
    Ok(FrameReport {
        a,
        b,
        tight,
        is_frame,
        ranks,
        per_m_eigs,
    })
}

/// Frame operator `S = sum f f^T` over all frame vectors of the bank.
pub fn frame_operator(bank: &RamanujanFilterBank) -> DMatrix<f64> {
    let g = bank.analysis_matrix();
    g.transpose() * g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub a: f64,
    pub b: f64,
    pub tight: bool,
    pub is_frame: bool,
}

/// Extreme eigenvalues of the frame operator.
pub fn frame_operator_bounds(bank: &RamanujanFilterBank) -> FrameBounds {
    let e = symmetric_eigenvalues(frame_operator(bank));
    let b = e[e.len() - 1];
    let a = e[0];
    let is_frame = a > RANK_TOL * b;
    FrameBounds {
        a,
        b,
        tight: is_frame && (b - a) <= TIGHT_TOL * b,
        is_frame,
    }
}

/// Frame bounds through the polyphase route for uniform banks, the frame operator otherwise.
pub fn frame_bounds(bank: &RamanujanFilterBank) -> Result<FrameBounds> {
    if bank.decimation().is_some() {
        let r = frame_report(bank)?;
        Ok(FrameBounds {
            a: r.a,
            b: r.b,
            tight: r.tight,
            is_frame: r.is_frame,
        })
    } else {
        Ok(frame_operator_bounds(bank))
    }
}

/// Expected structure of the uniform bank `R_{p,N}`.
///
/// `p = 1`: tight with bound `N^2`. `p = 2` with `N/2` odd: tight with bound `2 d^2`.
/// `p = 2` with `N/2` even, and every `p > 2`: not a frame.
pub fn classify_theorem_case(n: usize, p: usize) -> Result<FrameClass> {
    if n == 0 || p == 0 || n % p != 0 {
        return Err(Error::domain(format!("p = {p} must divide N = {n}")));
    }
    let k = crate::number_theory::divisor_list(n).len();
    if k < p {
        return Err(Error::hypothesis(format!(
            "bank has K = {k} channels, fewer than p = {p}"
        )));
    }
    let d = n / p;
    Ok(match p {
        1 => FrameClass::Tight {
            bound: (n * n) as f64,
        },
        2 if d % 2 == 1 => FrameClass::Tight {
            bound: (2 * d * d) as f64,
        },
        _ => FrameClass::NotFrame,
    })
}

/// Closed-form `Zc_{q_j}(k N / q_i, n)` for `N = 2d`, `d` odd, `p = 2`, `(k, q_i) = 1`.
pub fn zak_value_oracle(
    n_len: usize,
    q_j: usize,
    q_i: usize,
    k: usize,
    n: usize,
) -> Result<Complex64> {
    if n_len % 2 != 0 || (n_len / 2) % 2 == 0 {
        return Err(Error::hypothesis("needs N = 2d with d odd"));
    }
    if q_i == 0 || q_j == 0 || n_len % q_i != 0 || n_len % q_j != 0 {
        return Err(Error::domain("q_i and q_j must divide N"));
    }
    if gcd(k, q_i) != 1 {
        return Err(Error::domain(format!("k = {k} is not coprime to q_i = {q_i}")));
    }
    if n > 1 {
        return Err(Error::domain("n must be 0 or 1"));
    }
    totient(q_i)?;
    let phase = Complex64::from_polar(
        1.0,
        2.0 * std::f64::consts::PI * (k * n) as f64 / q_i as f64,
    );
    let mag = (n_len as f64 / 2.0).sqrt();
    let sign = if n == 0 { 1.0 } else { -1.0 };
    Ok(if q_j == q_i {
        phase * mag
    } else if q_j * 2 == q_i || q_i * 2 == q_j {
        phase * (sign * mag)
    } else {
        Complex64::new(0.0, 0.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_two_tight() {
        let bank = RamanujanFilterBank::uniform(6, 2).unwrap();
        let r = frame_report(&bank).unwrap();
        assert!(r.tight && r.is_frame);
        assert!((r.a - 18.0).abs() < 1e-9);
        assert_eq!(r.class(), FrameClass::Tight { bound: r.a });
    }

    #[test]
    fn twelve_two_not_frame() {
        let bank = RamanujanFilterBank::uniform(12, 2).unwrap();
        let r = frame_report(&bank).unwrap();
        assert!(!r.is_frame && !r.tight);
        assert_eq!(r.ranks, vec![2, 1, 2, 1, 2, 1]);
    }

    #[test]
    fn classify_rejects_short_banks() {
        assert!(matches!(classify_theorem_case(4, 4), Err(Error::Hypothesis(_))));
        assert_eq!(classify_theorem_case(8, 1).unwrap(), FrameClass::Tight { bound: 64.0 });
        assert_eq!(classify_theorem_case(12, 2).unwrap(), FrameClass::NotFrame);
        assert!(classify_theorem_case(12, 5).is_err());
    }

    #[test]
    fn oracle_example_value() {
        let v = zak_value_oracle(6, 6, 3, 1, 1).unwrap();
        let e = -Complex64::from_polar(3f64.sqrt(), 2.0 * std::f64::consts::PI / 3.0);
        assert!((v - e).norm() < 1e-12);
        assert!(zak_value_oracle(12, 1, 1, 1, 0).is_err());
        assert!(zak_value_oracle(6, 1, 3, 3, 0).is_err());
    }

    #[test]
    fn report_json_keys() {
        let bank = RamanujanFilterBank::uniform(6, 2).unwrap();
        let s = crate::io::to_json_string(&frame_report(&bank).unwrap()).unwrap();
        for key in ["\"A\"", "\"B\"", "\"tight\"", "\"is_frame\"", "\"ranks\"", "\"per_m_eigs\""] {
            assert!(s.contains(key), "{key}");
        }
    }
}
