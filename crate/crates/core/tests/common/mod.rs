//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls into the library: Ramanujan sums come from the trigonometric
//! definition, frame operators from explicit vector lists, Zak images from the defining
//! double sum and linear programs from vertex enumeration.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

pub fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|q| n % q == 0).collect()
}

pub fn totient(q: usize) -> usize {
    (1..=q).filter(|&k| gcd(k, q) == 1).count()
}

/// `sum_{(k,q)=1} cos(2 pi k n / q)`.
pub fn c_trig(q: usize, n: i64) -> f64 {
    (1..=q)
        .filter(|&k| gcd(k, q) == 1)
        .map(|k| (2.0 * PI * k as f64 * n as f64 / q as f64).cos())
        .sum()
}

/// `c_q` on `Z_N`, rounded to the nearest integer.
pub fn c_vec(q: usize, n: usize) -> Vec<f64> {
    (0..n as i64).map(|t| c_trig(q, t).round()).collect()
}

/// `(L_m x)(t) = x(t - m)`.
pub fn shift(x: &[f64], m: i64) -> Vec<f64> {
    let n = x.len() as i64;
    (0..n).map(|t| x[(t - m).rem_euclid(n) as usize]).collect()
}

pub fn conv(x: &[f64], h: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|t| (0..n).map(|m| x[m] * h[(t + n - m) % n]).sum())
        .collect()
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Frame vectors `L_{pk} c_q` of the uniform system, channel by channel.
pub fn frame_vectors(n: usize, p: usize) -> Vec<(usize, usize, Vec<f64>)> {
    let mut out = Vec::new();
    for (i, q) in divisors(n).into_iter().enumerate() {
        let c = c_vec(q, n);
        for k in 0..n / p {
            out.push((k, i, shift(&c, (p * k) as i64)));
        }
    }
    out
}

pub fn operator(vectors: &[Vec<f64>], n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    for v in vectors {
        let f = DVector::from_column_slice(v);
        s += &f * f.transpose();
    }
    s
}

/// Sorted eigenvalues of a symmetric matrix.
pub fn eigenvalues(s: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = s.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// Whether the uniform system minus the listed `(k, i)` still spans, by its frame operator.
pub fn survives_erasure(n: usize, p: usize, erased: &[(usize, usize)]) -> bool {
    let kept: Vec<Vec<f64>> = frame_vectors(n, p)
        .into_iter()
        .filter(|(k, i, _)| !erased.contains(&(*k, *i)))
        .map(|(_, _, v)| v)
        .collect();
    let e = eigenvalues(operator(&kept, n));
    e[0] > 1e-8 * e[n - 1]
}

/// `Z(m, t) = d^{-1/2} sum_l x(p l + t) e^{-2 pi i m l / d}`, indexed `[m][t]`.
pub fn zak_direct(x: &[Complex64], p: usize) -> Vec<Vec<Complex64>> {
    let d = x.len() / p;
    (0..d)
        .map(|m| {
            (0..p)
                .map(|t| {
                    (0..d)
                        .map(|l| x[p * l + t] * Complex64::from_polar(1.0, -2.0 * PI * (m * l) as f64 / d as f64))
                        .sum::<Complex64>()
                        / (d as f64).sqrt()
                })
                .collect()
        })
        .collect()
}

pub fn real_to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for j in start..n {
        cur.push(j);
        subsets(n, k, j + 1, cur, out);
        cur.pop();
    }
}

/// Optimum of `min c^T x, A x = b, x >= 0` over all basic feasible solutions, with `A`
/// of full row rank. `None` when no vertex is feasible.
pub fn lp_vertex_optimum(a: &DMatrix<f64>, b: &[f64], c: &[f64]) -> Option<f64> {
    let (m, n) = a.shape();
    let mut sets = Vec::new();
    subsets(n, m, 0, &mut Vec::new(), &mut sets);
    let bv = DVector::from_column_slice(b);
    let mut best: Option<f64> = None;
    for cols in sets {
        let basis = DMatrix::from_fn(m, m, |r, j| a[(r, cols[j])]);
        let svd = basis.clone().svd(false, false);
        let smin = svd.singular_values.min();
        let smax = svd.singular_values.max();
        if smin <= 1e-10 * smax {
            continue;
        }
        let Some(xb) = basis.lu().solve(&bv) else {
            continue;
        };
        if xb.iter().any(|&v| v < -1e-9) {
            continue;
        }
        let obj: f64 = cols.iter().zip(xb.iter()).map(|(&j, v)| c[j] * v).sum();
        best = Some(best.map_or(obj, |b: f64| b.min(obj)));
    }
    best
}

pub mod instances;
