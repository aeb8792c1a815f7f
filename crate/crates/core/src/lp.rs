//! Dense two-phase simplex for `min c^T x` subject to `A x = b`, `x >= 0`.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index leaving
//! variable among ratio ties), so the method terminates on degenerate problems. The final
//! basis is re-solved with an LU factorisation to remove drift accumulated in the tableau,
//! and the dual solution is used to check the duality gap.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 200_000;

/// Largest accepted `|c^T x - b^T y|` relative to `max(1, |c^T x|)`.
pub const GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub a: DMatrix<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LpStats {
    pub iterations: usize,
    pub objective: f64,
    pub duality_gap: f64,
    pub primal_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub dual: Vec<f64>,
    pub stats: LpStats,
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// `rows x (cols + 1)`, last column is the right-hand side.
    t: Vec<f64>,
    /// The starting tableau, kept for refactorisation.
    orig: Vec<f64>,
    /// Reduced costs, last entry is minus the objective.
    z: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    since_reinvert: usize,
}

/// Pivots between two refactorisations of the tableau.
const REINVERT_EVERY: usize = 50;

const PIVOT_TOL: f64 = 1e-9;

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.cols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.cols + 1;
        let pv = self.t[pr * w + pc];
        for c in 0..w {
            self.t[pr * w + c] /= pv;
        }
        let prow: Vec<f64> = self.t[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.t[r * w + pc];
            if f != 0.0 {
                for c in 0..w {
                    self.t[r * w + c] -= f * prow[c];
                }
                self.t[r * w + pc] = 0.0;
            }
        }
        let f = self.z[pc];
        if f != 0.0 {
            for c in 0..w {
                self.z[c] -= f * prow[c];
            }
            self.z[pc] = 0.0;
        }
        self.basis[pr] = pc;
        self.since_reinvert += 1;
    }

    fn set_costs(&mut self, cost: &[f64]) {
        self.cost = cost.to_vec();
        self.refresh_costs();
    }

    fn refresh_costs(&mut self) {
        let w = self.cols + 1;
        self.z = vec![0.0; w];
        self.z[..self.cols].copy_from_slice(&self.cost);
        for r in 0..self.rows {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                for c in 0..w {
                    self.z[c] -= cb * self.t[r * w + c];
                }
            }
        }
    }

    /// Recomputes `B^{-1} [A | I | b]` from the starting tableau. Keeps the current
    /// tableau when the basis matrix is numerically singular.
    fn reinvert(&mut self) {
        self.since_reinvert = 0;
        let w = self.cols + 1;
        let k = self.rows;
        if k == 0 {
            return;
        }
        let bmat = DMatrix::from_fn(k, k, |r, c| self.orig[r * w + self.basis[c]]);
        let full = DMatrix::from_fn(k, w, |r, c| self.orig[r * w + c]);
        let Some(sol) = bmat.lu().solve(&full) else {
            return;
        };
        for r in 0..k {
            for c in 0..w {
                self.t[r * w + c] = sol[(r, c)];
            }
            for (slot, &bc) in self.basis.iter().enumerate() {
                self.t[r * w + bc] = if slot == r { 1.0 } else { 0.0 };
            }
        }
        self.refresh_costs();
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.cols + 1;
        self.t.drain(r * w..(r + 1) * w);
        self.orig.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.rows -= 1;
    }

    fn ratio_row(&self, pc: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows {
            let a = self.at(r, pc);
            if a > PIVOT_TOL {
                let ratio = self.rhs(r).max(0.0) / a;
                best = match best {
                    None => Some((r, ratio)),
                    Some((br, bv)) => {
                        let tie = (ratio - bv).abs() <= 1e-12 * bv.abs().max(1.0);
                        if ratio < bv && !tie || tie && self.basis[r] < self.basis[br] {
                            Some((r, ratio))
                        } else {
                            Some((br, bv))
                        }
                    }
                };
            }
        }
        best.map(|(r, _)| r)
    }

    /// Runs Bland-rule pivots over the columns `0..allowed`.
    fn optimise(&mut self, allowed: usize, cost_tol: f64, iters: &mut usize, max_iter: usize) -> Result<()> {
        loop {
            if self.since_reinvert >= REINVERT_EVERY {
                self.reinvert();
            }
            let Some(pc) = (0..allowed).find(|&j| self.z[j] < -cost_tol) else {
                if self.since_reinvert > 0 {
                    self.reinvert();
                    if (0..allowed).any(|j| self.z[j] < -cost_tol) {
                        continue;
                    }
                }
                return Ok(());
            };
            if *iters >= max_iter {
                return Err(Error::IterationLimit(max_iter));
            }
            *iters += 1;
            match self.ratio_row(pc) {
                Some(pr) => self.pivot(pr, pc),
                None if self.since_reinvert > 0 => self.reinvert(),
                None => return Err(Error::Unbounded),
            }
        }
    }
}

/// Solves the program in standard form.
pub fn solve(lp: &LinearProgram, max_iter: usize) -> Result<LpSolution> {
    let (m, n) = lp.a.shape();
    if lp.b.len() != m || lp.c.len() != n {
        return Err(Error::domain("linear program dimensions disagree"));
    }
    if lp.a.iter().chain(&lp.b).chain(&lp.c).any(|v| !v.is_finite()) {
        return Err(Error::domain("linear program has non-finite data"));
    }
    let scale_b = lp.b.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let scale_c = lp.c.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let cost_tol = 1e-10 * scale_c;

    let cols = n + m;
    let mut t = vec![0.0; m * (cols + 1)];
    let mut sign = vec![1.0; m];
    for r in 0..m {
        if lp.b[r] < 0.0 {
            sign[r] = -1.0;
        }
        for c in 0..n {
            t[r * (cols + 1) + c] = sign[r] * lp.a[(r, c)];
        }
        t[r * (cols + 1) + n + r] = 1.0;
        t[r * (cols + 1) + cols] = sign[r] * lp.b[r];
    }
    let mut tab = Tableau {
        rows: m,
        cols,
        orig: t.clone(),
        t,
        z: Vec::new(),
        cost: Vec::new(),
        basis: (n..n + m).collect(),
        since_reinvert: 0,
    };
    let mut iters = 0;

    let phase1: Vec<f64> = (0..cols).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    tab.set_costs(&phase1);
    tab.optimise(cols, 1e-10, &mut iters, max_iter)?;
    if -tab.z[cols] > 1e-9 * scale_b {
        return Err(Error::Infeasible);
    }

    // Original row index of every tableau row, used to map duals back.
    let mut row_of: Vec<usize> = (0..m).collect();
    let mut r = 0;
    while r < tab.rows {
        if tab.basis[r] >= n {
            let col = (0..n)
                .filter(|&j| tab.at(r, j).abs() > PIVOT_TOL)
                .max_by(|&a, &b| tab.at(r, a).abs().total_cmp(&tab.at(r, b).abs()));
            match col {
                Some(j) => {
                    tab.pivot(r, j);
                    r += 1;
                }
                None => {
                    tab.remove_row(r);
                    row_of.remove(r);
                }
            }
        } else {
            r += 1;
        }
    }

    let mut phase2 = lp.c.clone();
    phase2.extend(std::iter::repeat_n(0.0, m));
    tab.set_costs(&phase2);
    tab.reinvert();
    tab.optimise(n, cost_tol, &mut iters, max_iter)?;
    log::debug!("simplex finished after {iters} pivots");

    polish(lp, &tab, &row_of, &sign, iters, scale_b)
}

fn polish(
    lp: &LinearProgram,
    tab: &Tableau,
    row_of: &[usize],
    sign: &[f64],
    iterations: usize,
    scale_b: f64,
) -> Result<LpSolution> {
    let (m, n) = lp.a.shape();
    let k = tab.rows;
    let bmat = DMatrix::from_fn(k, k, |r, c| sign[row_of[r]] * lp.a[(row_of[r], tab.basis[c])]);
    let rhs = DVector::from_fn(k, |r, _| sign[row_of[r]] * lp.b[row_of[r]]);
    let cb = DVector::from_fn(k, |c, _| lp.c[tab.basis[c]]);
    let lu = bmat.clone().lu();
    let mut x = vec![0.0; n];
    let mut y_rows = DVector::zeros(k);
    let solved = lu.solve(&rhs).zip(bmat.transpose().lu().solve(&cb));
    match solved {
        Some((xb, y)) if xb.iter().all(|v| *v >= -1e-9 * scale_b) => {
            for (c, &j) in tab.basis.iter().enumerate() {
                x[j] = xb[c].max(0.0);
            }
            y_rows = y;
        }
        _ => {
            for r in 0..k {
                x[tab.basis[r]] = tab.rhs(r).max(0.0);
            }
            for r in 0..k {
                y_rows[r] = -tab.z[n + row_of[r]];
            }
        }
    }
    let mut dual = vec![0.0; m];
    for r in 0..k {
        dual[row_of[r]] = sign[row_of[r]] * y_rows[r];
    }
    let objective: f64 = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    let dual_obj: f64 = lp.b.iter().zip(&dual).map(|(b, y)| b * y).sum();
    let duality_gap = (objective - dual_obj).abs();
    let primal_residual = (0..m)
        .map(|r| {
            let ax: f64 = (0..n).map(|j| lp.a[(r, j)] * x[j]).sum();
            (ax - lp.b[r]).abs()
        })
        .fold(0.0, f64::max);
    if duality_gap > GAP_TOL * objective.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "duality gap {duality_gap:e} exceeds tolerance"
        )));
    }
    if primal_residual > 1e-8 * scale_b {
        return Err(Error::Numerical(format!(
            "primal residual {primal_residual:e} exceeds tolerance"
        )));
    }
    Ok(LpSolution {
        x,
        dual,
        stats: LpStats {
            iterations,
            objective,
            duality_gap,
            primal_residual,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct L1Solution {
    pub v: Vec<f64>,
    pub objective: f64,
    pub stats: LpStats,
}

/// `min sum_{j penalised} |v_j|` subject to `A v = b` with every `v_j` free.
///
/// Each variable is split as `v = v+ - v-`; penalised parts cost 1, the others 0.
pub fn l1_minimize(a: &DMatrix<f64>, b: &[f64], penalized: &[bool]) -> Result<L1Solution> {
    let (m, n) = a.shape();
    if penalized.len() != n || b.len() != m {
        return Err(Error::domain("l1 problem dimensions disagree"));
    }
    let mut std_a = DMatrix::zeros(m, 2 * n);
    std_a.view_mut((0, 0), (m, n)).copy_from(a);
    std_a.view_mut((0, n), (m, n)).copy_from(&(-a));
    let mut c = Vec::with_capacity(2 * n);
    for _ in 0..2 {
        c.extend(penalized.iter().map(|&p| if p { 1.0 } else { 0.0 }));
    }
    let sol = solve(
        &LinearProgram {
            a: std_a,
            b: b.to_vec(),
            c,
        },
        DEFAULT_MAX_ITER,
    )?;
    let v: Vec<f64> = (0..n).map(|j| sol.x[j] - sol.x[n + j]).collect();
    let objective = v
        .iter()
        .zip(penalized)
        .filter(|(_, &p)| p)
        .map(|(x, _)| x.abs())
        .sum();
    Ok(L1Solution {
        v,
        objective,
        stats: sol.stats,
    })
}
