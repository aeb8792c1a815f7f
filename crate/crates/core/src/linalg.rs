//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::frame::RANK_TOL;

/// Singular values and a square `v_t` for `a`.
struct FullSvd {
    s: Vec<f64>,
    v_t: DMatrix<f64>,
}

fn full_svd(a: &DMatrix<f64>) -> FullSvd {
    let (r, c) = a.shape();
    // Zero padding keeps the right singular vectors of `a` and completes them to a square basis.
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    FullSvd {
        s: svd.singular_values.iter().copied().collect(),
        v_t: svd.v_t.expect("v_t requested"),
    }
}

fn kept(s: &[f64]) -> Vec<usize> {
    let max = s.iter().copied().fold(0.0, f64::max);
    (0..s.len())
        .filter(|&i| max > 0.0 && s[i] > RANK_TOL * max)
        .collect()
}

pub fn rank(a: &DMatrix<f64>) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let s: Vec<f64> = a.singular_values().iter().copied().collect();
    kept(&s).len()
}

/// Orthonormal basis of `{x : a x = 0}` as columns.
pub fn null_space(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let svd = full_svd(a);
    let keep = kept(&svd.s);
    let null: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    DMatrix::from_fn(n, null.len(), |r, c| svd.v_t[(null[c], r)])
}

/// Row-space reduction of the system `a x = b`.
///
/// Returns `(q, rhs, inconsistency)` where the rows of `q` are an orthonormal basis of the
/// row space of `a`, `q x = rhs` has the same solution set as `a x = b` when the system is
/// consistent, and `inconsistency` is the norm of the part of `b` outside the range of `a`.
pub fn reduce_equalities(a: &DMatrix<f64>, b: &[f64]) -> (DMatrix<f64>, Vec<f64>, f64) {
    let (q, _) = row_space(a);
    let (rhs, bad) = project_equalities(&q, a, b);
    (q, rhs, bad)
}

/// Given orthonormal rows `q` spanning the row space of `a`, solves `(a q^T) z = b` in the
/// least-squares sense. `a x = b` then reduces to `q x = z`; the second value is the residual
/// norm of that least-squares fit.
pub fn project_equalities(q: &DMatrix<f64>, a: &DMatrix<f64>, b: &[f64]) -> (Vec<f64>, f64) {
    let r = q.nrows();
    if r == 0 {
        return (Vec::new(), b.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    let c = a * q.transpose();
    let bv = nalgebra::DVector::from_column_slice(b);
    let qr = c.clone().qr();
    let qtb = qr.q().transpose() * &bv;
    let z = qr
        .r()
        .solve_upper_triangular(&qtb)
        .expect("row-space restriction has full column rank");
    let resid = (&c * &z - &bv).norm();
    (z.iter().copied().collect(), resid)
}

/// Right singular vectors spanning the row space of `a` (as rows) with their singular values.
pub fn row_space(a: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let n = a.ncols();
    if a.nrows() == 0 {
        return (DMatrix::zeros(0, n), Vec::new());
    }
    let svd = full_svd(a);
    let keep = kept(&svd.s);
    let v = DMatrix::from_fn(keep.len(), n, |r, c| svd.v_t[(keep[r], c)]);
    (v, keep.iter().map(|&j| svd.s[j]).collect())
}

/// Orthonormal basis of the span of the columns of `a`, by Gram–Schmidt with one
/// re-orthogonalisation pass. Columns that fall below `RANK_TOL` relative norm are dropped.
pub fn orthonormal_columns(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let scale = (0..a.ncols())
        .map(|j| a.column(j).norm())
        .fold(0.0, f64::max);
    let mut basis: Vec<nalgebra::DVector<f64>> = Vec::new();
    for j in 0..a.ncols() {
        let mut v = a.column(j).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v.axpy(-c, b, 1.0);
            }
        }
        let nv = v.norm();
        if nv > 1e-8 * scale && nv > 0.0 {
            basis.push(v / nv);
        }
    }
    let mut out = DMatrix::zeros(n, basis.len());
    for (j, b) in basis.iter().enumerate() {
        out.set_column(j, b);
    }
    out
}
