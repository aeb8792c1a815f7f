//! Discrete Zak transform on `Z_N` with `N = p d`.
//!
//! `Zx(m, n) = d^{-1/2} sum_{l in Z_d} x(p l + n) e^{-2 pi i m l / d}` for `m in Z_d`,
//! `n in Z_p`. The map is unitary, and a shift by a multiple of `p` only changes the
//! phase: `Z(L_{pk} x)(m, n) = e^{-2 pi i k m / d} Zx(m, n)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ZakImage {
    d: usize,
    p: usize,
    data: Vec<Complex64>,
}

impl ZakImage {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Value at `(m mod d, n)`.
    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[(m % self.d) * self.p + n]
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Sum of `|Zx(m, n)|^2` over `n` for a fixed `m`.
    pub fn row_energy(&self, m: usize) -> f64 {
        (0..self.p).map(|n| self.get(m, n).norm_sqr()).sum()
    }
}

fn check(n: usize, p: usize) -> Result<usize> {
    if n == 0 || p == 0 || n % p != 0 {
        return Err(Error::domain(format!("p = {p} must divide N = {n}")));
    }
    Ok(n / p)
}

fn twiddles(d: usize, sign: f64) -> Vec<Complex64> {
    (0..d)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * j as f64 / d as f64))
        .collect()
}

pub fn zak(x: &[Complex64], p: usize) -> Result<ZakImage> {
    let d = check(x.len(), p)?;
    let w = twiddles(d, -1.0);
    let scale = 1.0 / (d as f64).sqrt();
    let mut data = Vec::with_capacity(d * p);
    for m in 0..d {
        for n in 0..p {
            let s: Complex64 = (0..d).map(|l| x[p * l + n] * w[(m * l) % d]).sum();
            data.push(s * scale);
        }
    }
    Ok(ZakImage { d, p, data })
}

pub fn zak_real(x: &[f64], p: usize) -> Result<ZakImage> {
    let xc: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    zak(&xc, p)
}

/// Inverse transform: `x(p l + n) = d^{-1/2} sum_m Zx(m, n) e^{2 pi i m l / d}`.
pub fn zak_inverse(z: &ZakImage) -> Vec<Complex64> {
    let (d, p) = (z.d, z.p);
    let w = twiddles(d, 1.0);
    let scale = 1.0 / (d as f64).sqrt();
    let mut x = vec![Complex64::new(0.0, 0.0); d * p];
    for l in 0..d {
        for n in 0..p {
            let s: Complex64 = (0..d).map(|m| z.get(m, n) * w[(m * l) % d]).sum();
            x[p * l + n] = s * scale;
        }
    }
    x
}
