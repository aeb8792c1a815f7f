//! Ramanujan subspaces, the orthogonal decomposition of `l^2(Z_N)` they give, non-uniform
//! banks, and robustness of the associated frames under erasures.
//!
//! `S_{p,q}` is spanned by `{L_{pk} c_q : k = 0..phi(q)-1}` for `p = 1`, or for `p = 2`
//! when `N = 2d` with `d` odd. Any `phi(q)` consecutive shifts form a basis and the
//! spaces for distinct divisors are mutually orthogonal, so `l^2(Z_N)` is their direct sum.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::filterbank::{Channel, RamanujanFilterBank};
use crate::frame::{
    classify_theorem_case, filter_zaks, frame_operator_bounds, frame_report, symmetric_eigenvalues,
    FrameBounds, FrameClass,
};
use crate::linalg::{orthonormal_columns, rank};
use crate::number_theory::{divisor_list, is_prime, ramanujan_sum, totient};
use crate::random::{normal_vec, seeded};
use crate::signal::{circular_shift, same_len, Signal};

/// Relative eigenvalue floor for declaring a collection a frame.
pub const ERASURE_TOL: f64 = 1e-8;

/// Exhaustive erasure scans stop at this many candidate sets and switch to sampling.
pub const ERASURE_SCAN_CAP: usize = 50_000;

fn check_subspace_case(p: usize, n: usize) -> Result<()> {
    match p {
        1 if n >= 1 => Ok(()),
        2 if n % 2 == 0 && (n / 2) % 2 == 1 => Ok(()),
        2 => Err(Error::hypothesis(format!(
            "p = 2 needs N = 2d with d odd, got N = {n}"
        ))),
        _ => Err(Error::hypothesis(format!("p must be 1 or 2, got {p}"))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RamanujanSubspace {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// Columns `L_{pk} c_q`, `k = 0..phi(q)-1`.
    pub basis: DMatrix<f64>,
    /// Orthonormal basis of the same span.
    pub orthonormal: DMatrix<f64>,
}

impl RamanujanSubspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.orthonormal * self.orthonormal.transpose()
    }

    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        same_len(x.len(), self.n)?;
        let v = DVector::from_column_slice(x);
        let c = self.orthonormal.transpose() * v;
        Ok((&self.orthonormal * c).iter().copied().collect())
    }
}

/// Basis `{L_{pk} c_q}` of `S_{p,q}` and an orthonormalisation of it.
pub fn subspace_basis(p: usize, q: usize, n: usize) -> Result<RamanujanSubspace> {
    check_subspace_case(p, n)?;
    let c = ramanujan_sum(q, n)?.to_f64();
    let phi = totient(q)?;
    let mut basis = DMatrix::zeros(n, phi);
    for k in 0..phi {
        basis.set_column(k, &DVector::from_vec(circular_shift(&c, (p * k) as i64)));
    }
    let orthonormal = orthonormal_columns(&basis);
    if orthonormal.ncols() != phi {
        return Err(Error::Numerical(format!(
            "shifts of c_{q} span {} dimensions, expected {phi}",
            orthonormal.ncols()
        )));
    }
    Ok(RamanujanSubspace {
        n,
        p,
        q,
        basis,
        orthonormal,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCheck {
    pub dims: Vec<usize>,
    pub dim_sum: usize,
    /// Largest `|<u, v>|` between orthonormal basis vectors of different subspaces.
    pub max_cross_inner: f64,
    pub spans: bool,
}

/// Checks that the subspaces for all divisors are orthogonal and fill `l^2(Z_N)`.
pub fn orthogonal_decomposition_check(p: usize, n: usize) -> Result<DecompositionCheck> {
    let subs = divisor_list(n)
        .into_iter()
        .map(|q| subspace_basis(p, q, n))
        .collect::<Result<Vec<_>>>()?;
    let mut max_cross: f64 = 0.0;
    for i in 0..subs.len() {
        for j in i + 1..subs.len() {
            let g = subs[i].orthonormal.transpose() * &subs[j].orthonormal;
            max_cross = max_cross.max(g.amax());
        }
    }
    let all = concat_columns(subs.iter().map(|s| &s.basis));
    let dims: Vec<usize> = subs.iter().map(|s| s.dim()).collect();
    Ok(DecompositionCheck {
        dim_sum: dims.iter().sum(),
        dims,
        max_cross_inner: max_cross,
        spans: rank(&all) == n,
    })
}

fn concat_columns<'a>(mats: impl Iterator<Item = &'a DMatrix<f64>> + Clone) -> DMatrix<f64> {
    let rows = mats.clone().next().map(|m| m.nrows()).unwrap_or(0);
    let cols: usize = mats.clone().map(|m| m.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for m in mats {
        out.view_mut((0, at), (rows, m.ncols())).copy_from(m);
        at += m.ncols();
    }
    out
}

/// Expansion of a signal in the concatenated subspace bases.
#[derive(Debug, Clone, PartialEq)]
pub struct RptExpansion {
    pub qs: Vec<usize>,
    /// Coefficients of `L_{pk} c_q`, `k = 0..phi(q)-1`, per divisor.
    pub coefficients: Vec<Vec<f64>>,
    /// Components `x_q in S_{p,q}` with `sum_q x_q = x`.
    pub components: Vec<Vec<f64>>,
    /// `||sum_q x_q - x|| / ||x||`.
    pub relative_residual: f64,
}

/// Unique decomposition `x = sum_q sum_k a_{q,k} L_{pk} c_q`.
pub fn rpt_expand(x: &Signal, p: usize) -> Result<RptExpansion> {
    let n = x.len();
    let subs = divisor_list(n)
        .into_iter()
        .map(|q| subspace_basis(p, q, n))
        .collect::<Result<Vec<_>>>()?;
    let m = concat_columns(subs.iter().map(|s| &s.basis));
    let rhs = DVector::from_column_slice(x.values());
    let alpha = m
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("subspace bases are not complementary".into()))?;
    let mut coefficients = Vec::new();
    let mut components = Vec::new();
    let mut at = 0;
    for s in &subs {
        let a = alpha.rows(at, s.dim()).into_owned();
        components.push((&s.basis * &a).iter().copied().collect());
        coefficients.push(a.iter().copied().collect());
        at += s.dim();
    }
    let resid = (&m * &alpha - &rhs).norm();
    let norm = rhs.norm();
    let relative_residual = if norm == 0.0 { resid } else { resid / norm };
    if relative_residual > 1e-8 {
        return Err(Error::Numerical(format!(
            "expansion residual {relative_residual:e} exceeds 1e-8"
        )));
    }
    Ok(RptExpansion {
        qs: subs.iter().map(|s| s.q).collect(),
        coefficients,
        components,
        relative_residual,
    })
}

/// Numerical rank of `{L_{pk} c_q : k in Z_d}` for a prime `p | N`.
pub fn rank_q(p: usize, q: usize, n: usize) -> Result<usize> {
    if !is_prime(p) || n % p != 0 {
        return Err(Error::domain(format!("p = {p} must be a prime dividing N = {n}")));
    }
    let c = ramanujan_sum(q, n)?.to_f64();
    let d = n / p;
    let mut m = DMatrix::zeros(n, d);
    for k in 0..d {
        m.set_column(k, &DVector::from_vec(circular_shift(&c, (p * k) as i64)));
    }
    Ok(rank(&m))
}

/// `phi(q)` if `p` does not divide `q` or `p > q`, `phi(q/p)` otherwise.
pub fn predicted_rank_q(p: usize, q: usize) -> Result<usize> {
    if q % p != 0 || p > q {
        totient(q)
    } else {
        totient(q / p)
    }
}

/// Divisors whose channel must run at the reduced ratio: `{q : p | q}` for an odd prime
/// `p`, and `{q : 4 | q}` for `p = 2`.
pub fn d_set(p: usize, n: usize) -> Result<Vec<usize>> {
    if !is_prime(p) || n % p != 0 {
        return Err(Error::domain(format!("p = {p} must be a prime dividing N = {n}")));
    }
    let m = if p == 2 { 4 } else { p };
    Ok(divisor_list(n)
        .into_iter()
        .filter(|q| q % m == 0 && p <= *q)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonUniformBank {
    pub bank: RamanujanFilterBank,
    pub p: usize,
    pub r: usize,
    pub d_set: Vec<usize>,
    pub bounds: FrameBounds,
}

/// Bank with ratio `r` on the channels in [`d_set`] and `p` elsewhere.
///
/// `p` is a prime dividing `N`. For odd `p`, `r` is 1, or 2 when `N = 2d` with `d` odd.
/// For `p = 2` only `r = 1` is accepted.
pub fn build_nonuniform(p: usize, r: usize, n: usize) -> Result<NonUniformBank> {
    let ds = d_set(p, n)?;
    match (p, r) {
        (_, 1) => {}
        (2, _) => return Err(Error::hypothesis("p = 2 needs r = 1")),
        (_, 2) if n % 2 == 0 && (n / 2) % 2 == 1 => {}
        (_, 2) => {
            return Err(Error::hypothesis(format!(
                "r = 2 needs N = 2d with d odd, got N = {n}"
            )))
        }
        _ => return Err(Error::domain(format!("r must be 1 or 2, got {r}"))),
    }
    let channels = divisor_list(n)
        .into_iter()
        .map(|q| Channel {
            q,
            p: if ds.contains(&q) { r } else { p },
        })
        .collect();
    let bank = RamanujanFilterBank::new(n, channels)?;
    let bounds = frame_operator_bounds(&bank);
    if !bounds.is_frame {
        return Err(Error::Numerical(format!(
            "non-uniform bank failed the frame check: A = {:e}, B = {:e}",
            bounds.a, bounds.b
        )));
    }
    Ok(NonUniformBank {
        bank,
        p,
        r,
        d_set: ds,
        bounds,
    })
}

/// `1 - (d/A) sum_n |Zc_{q_j}(m, n)|^2` for a tight uniform bank.
pub fn filterbank_erasure_margin(bank: &RamanujanFilterBank, j: usize, m: usize) -> Result<f64> {
    let report = frame_report(bank)?;
    if !report.tight {
        return Err(Error::NotTight("erasure margin needs a tight bank".into()));
    }
    if j >= bank.num_channels() {
        return Err(Error::domain(format!("channel {j} out of range")));
    }
    let zaks = filter_zaks(bank)?;
    let d = zaks[j].d();
    if m >= d {
        return Err(Error::domain(format!("m = {m} outside Z_{d}")));
    }
    Ok(1.0 - d as f64 / report.a * zaks[j].row_energy(m))
}

fn tight_bound(p: usize, n: usize) -> Result<f64> {
    match classify_theorem_case(n, p)? {
        FrameClass::Tight { bound } => Ok(bound),
        _ => Err(Error::hypothesis(format!(
            "erasure analysis needs a tight bank, (N, p) = ({n}, {p}) is not"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErasureReport {
    pub robust: bool,
    pub min_eig: f64,
    pub max_eig: f64,
}

fn check_pairs(bank: &RamanujanFilterBank, erased: &[(usize, usize)]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &(k, i) in erased {
        if i >= bank.num_channels() || k >= bank.channel_len(i) {
            return Err(Error::domain(format!("erasure ({k}, {i}) out of range")));
        }
        if !seen.insert((k, i)) {
            return Err(Error::domain(format!("erasure ({k}, {i}) listed twice")));
        }
    }
    Ok(())
}

/// Whether the frame of `R_{p,N}` survives removing the vectors `L_{pk} c_{q_i}` for
/// `(k, i)` in `erased` (0-based channel index).
///
/// The full frame is tight with bound `A`, so the surviving frame operator is
/// `A I - F F^T` with `F` the erased vectors; its spectrum is read off the small Gram
/// matrix `F^T F`.
pub fn robust_to_erasures(p: usize, n: usize, erased: &[(usize, usize)]) -> Result<ErasureReport> {
    let a = tight_bound(p, n)?;
    let bank = RamanujanFilterBank::uniform(n, p)?;
    check_pairs(&bank, erased)?;
    let vecs: Vec<Vec<f64>> = erased.iter().map(|&(k, i)| bank.frame_vector(k, i)).collect();
    Ok(erasure_report_from_gram(a, n, &vecs))
}

pub(crate) fn erasure_report_from_gram(a: f64, n: usize, vecs: &[Vec<f64>]) -> ErasureReport {
    if vecs.is_empty() {
        return ErasureReport {
            robust: true,
            min_eig: a,
            max_eig: a,
        };
    }
    let e = vecs.len();
    let g = DMatrix::from_fn(e, e, |r, c| {
        vecs[r].iter().zip(&vecs[c]).map(|(x, y)| x * y).sum::<f64>()
    });
    let mu = symmetric_eigenvalues(g);
    let mu_max = mu[e - 1];
    let rank_f = mu.iter().filter(|&&v| v > 1e-10 * mu_max.max(1.0)).count();
    let min_eig = a - mu_max;
    let max_eig = if rank_f < n { a } else { a - mu[0] };
    ErasureReport {
        robust: min_eig > ERASURE_TOL * max_eig,
        min_eig,
        max_eig,
    }
}

/// Sufficient condition for robustness to any `size` erasures (1 or 2).
pub fn erasure_sufficient_condition(p: usize, n: usize, size: usize) -> Result<bool> {
    let phi = totient(n)?;
    let ok = match (p, size) {
        (_, 0) => true,
        (1, 1) => n >= 2,
        // d = 1 leaves the two-vector basis {c_1, c_2}, which no erasure survives.
        (2, 1) => n >= 6 && (n / 2) % 2 == 1,
        (1, 2) => n >= 1 && n - 1 >= 2 * phi,
        (2, 2) => (n / 2) % 2 == 1 && n / 2 - 1 >= 2 * phi,
        _ => false,
    };
    Ok(ok)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErasureScan {
    pub n: usize,
    pub p: usize,
    pub size: usize,
    pub total_vectors: usize,
    pub candidate_sets: u128,
    pub checked: usize,
    pub exhaustive: bool,
    /// Seed of the sampler, present when the scan was sampled.
    pub seed: Option<u64>,
    pub sufficient_condition: bool,
    /// Erasure sets (0-based `(k, i)`) whose removal destroys the frame.
    pub failures: Vec<Vec<(usize, usize)>>,
}

/// Checks every erasure set of the given size, or a seeded sample when there are more
/// than `cap` of them. Half of a sampled pair scan is drawn inside a single channel,
/// since cross-channel pairs never interact.
pub fn erasure_scan(
    p: usize,
    n: usize,
    size: usize,
    cap: usize,
    samples: usize,
    seed: u64,
) -> Result<ErasureScan> {
    if !(1..=2).contains(&size) {
        return Err(Error::domain("scan size must be 1 or 2"));
    }
    let a = tight_bound(p, n)?;
    let bank = RamanujanFilterBank::uniform(n, p)?;
    let pairs: Vec<(usize, usize)> = (0..bank.num_channels())
        .flat_map(|i| (0..bank.channel_len(i)).map(move |k| (k, i)))
        .collect();
    let vecs: Vec<Vec<f64>> = pairs.iter().map(|&(k, i)| bank.frame_vector(k, i)).collect();
    let t = pairs.len();
    let candidate_sets = if size == 1 {
        t as u128
    } else {
        (t as u128) * (t as u128 - 1) / 2
    };
    let mut failures = Vec::new();
    let mut checked = 0;
    let test = |idx: &[usize], failures: &mut Vec<Vec<(usize, usize)>>| {
        let v: Vec<Vec<f64>> = idx.iter().map(|&j| vecs[j].clone()).collect();
        if !erasure_report_from_gram(a, n, &v).robust {
            failures.push(idx.iter().map(|&j| pairs[j]).collect());
        }
    };
    let exhaustive = candidate_sets <= cap as u128;
    if exhaustive {
        for x in 0..t {
            if size == 1 {
                test(&[x], &mut failures);
                checked += 1;
            } else {
                for y in x + 1..t {
                    test(&[x, y], &mut failures);
                    checked += 1;
                }
            }
        }
    } else {
        let mut rng = seeded(seed);
        for s in 0..samples {
            let idx = if size == 1 {
                vec![rng.random_range(0..t)]
            } else if s % 2 == 0 {
                let i = rng.random_range(0..bank.num_channels());
                let len = bank.channel_len(i);
                if len < 2 {
                    continue;
                }
                let k1 = rng.random_range(0..len);
                let mut k2 = rng.random_range(0..len - 1);
                if k2 >= k1 {
                    k2 += 1;
                }
                vec![bank.flat_index(k1, i), bank.flat_index(k2, i)]
            } else {
                let x = rng.random_range(0..t);
                let mut y = rng.random_range(0..t - 1);
                if y >= x {
                    y += 1;
                }
                vec![x, y]
            };
            test(&idx, &mut failures);
            checked += 1;
        }
    }
    Ok(ErasureScan {
        n,
        p,
        size,
        total_vectors: t,
        candidate_sets,
        checked,
        exhaustive,
        seed: (!exhaustive).then_some(seed),
        sufficient_condition: erasure_sufficient_condition(p, n, size)?,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionReport {
    /// Extreme eigenvalues of `sum_i P_i`.
    pub a_f: f64,
    pub b_f: f64,
    /// Extremes of `sum_i ||P_i x||^2 / ||x||^2` over the random draws.
    pub empirical_min: f64,
    pub empirical_max: f64,
    pub draws: usize,
    pub seed: u64,
}

fn subspaces(p: usize, n: usize) -> Result<Vec<RamanujanSubspace>> {
    divisor_list(n)
        .into_iter()
        .map(|q| subspace_basis(p, q, n))
        .collect()
}

/// Fusion-frame bounds of `{S_{p,q}}` with unit weights, plus an empirical check on
/// seeded Gaussian signals.
pub fn fusion_frame_check(p: usize, n: usize, draws: usize, seed: u64) -> Result<FusionReport> {
    let subs = subspaces(p, n)?;
    let projectors: Vec<DMatrix<f64>> = subs.iter().map(|s| s.projector()).collect();
    let total = projectors
        .iter()
        .fold(DMatrix::zeros(n, n), |acc, pm| acc + pm);
    let e = symmetric_eigenvalues(total);
    let mut rng = seeded(seed);
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for _ in 0..draws {
        let x = DVector::from_vec(normal_vec(&mut rng, n));
        let nx = x.norm_squared();
        if nx == 0.0 {
            continue;
        }
        let s: f64 = projectors.iter().map(|pm| (pm * &x).norm_squared()).sum();
        lo = lo.min(s / nx);
        hi = hi.max(s / nx);
    }
    Ok(FusionReport {
        a_f: e[0],
        b_f: e[n - 1],
        empirical_min: lo,
        empirical_max: hi,
        draws,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalErasureCase {
    /// At most one erasure per subspace.
    Single,
    /// Some subspace loses two vectors.
    Double,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalErasureReport {
    pub a_f: f64,
    pub b_f: f64,
    pub is_fusion_frame: bool,
    /// Lower frame bound of the surviving vectors inside each subspace.
    pub channel_lower_bounds: Vec<f64>,
    /// `min_i A_{p,i} / (p d^2)`.
    pub guaranteed_lower: f64,
    pub case: LocalErasureCase,
    /// The size condition of the double-erasure case holds with equality.
    pub borderline: bool,
}

/// Fusion frame after removing the shifts `erased[i]` from the spanning set of the
/// `i`-th subspace (divisors in increasing order).
pub fn fusion_after_local_erasures(
    p: usize,
    n: usize,
    erased: &[Vec<usize>],
) -> Result<LocalErasureReport> {
    let a_full = tight_bound(p, n)?;
    let bank = RamanujanFilterBank::uniform(n, p)?;
    if erased.len() != bank.num_channels() {
        return Err(Error::domain(format!(
            "expected {} erasure lists, got {}",
            bank.num_channels(),
            erased.len()
        )));
    }
    let d = n / p;
    let worst = erased.iter().map(|l| l.len()).max().unwrap_or(0);
    let phi = totient(n)?;
    let (case, slack) = match worst {
        0 | 1 => (LocalErasureCase::Single, 0),
        2 => {
            let lhs = if p == 1 { n - 1 } else { d - 1 };
            if lhs < 2 * phi {
                return Err(Error::hypothesis(format!(
                    "two local erasures need {} >= 2 phi(N) = {}",
                    lhs,
                    2 * phi
                )));
            }
            (LocalErasureCase::Double, lhs - 2 * phi)
        }
        _ => return Err(Error::hypothesis("at most two erasures per subspace")),
    };
    let mut total = DMatrix::zeros(n, n);
    let mut lower = Vec::with_capacity(erased.len());
    for (i, l) in erased.iter().enumerate() {
        let set: BTreeSet<usize> = l.iter().copied().collect();
        if set.len() != l.len() || set.iter().any(|&k| k >= d) {
            return Err(Error::domain(format!("invalid erasure list for channel {i}")));
        }
        let survivors: Vec<Vec<f64>> = (0..d)
            .filter(|k| !set.contains(k))
            .map(|k| bank.frame_vector(k, i))
            .collect();
        let f = DMatrix::from_fn(n, survivors.len(), |r, c| survivors[c][r]);
        let phi_q = totient(bank.channels()[i].q)?;
        let eig = symmetric_eigenvalues(f.transpose() * &f);
        lower.push(eig[eig.len() - phi_q]);
        let q = orthonormal_columns(&f);
        total += &q * q.transpose();
    }
    let e = symmetric_eigenvalues(total);
    let a_f = e[0];
    Ok(LocalErasureReport {
        a_f,
        b_f: e[n - 1],
        is_fusion_frame: a_f > ERASURE_TOL,
        guaranteed_lower: lower.iter().copied().fold(f64::INFINITY, f64::min) / a_full,
        channel_lower_bounds: lower,
        case,
        borderline: case == LocalErasureCase::Double && slack == 0,
    })
}

/// Columns `L_k c_{2^j} / sqrt(N phi(2^j))`, `k < phi(2^j)`, for `N = 2^m`.
pub fn dyadic_orthonormal_basis(n: usize) -> Result<DMatrix<f64>> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::domain(format!("N = {n} is not a power of two")));
    }
    let mut out = DMatrix::zeros(n, n);
    let mut col = 0;
    for q in divisor_list(n) {
        let c = ramanujan_sum(q, n)?.to_f64();
        let phi = totient(q)?;
        let w = 1.0 / ((n * phi) as f64).sqrt();
        for k in 0..phi {
            let v: Vec<f64> = circular_shift(&c, k as i64).iter().map(|x| x * w).collect();
            out.set_column(col, &DVector::from_vec(v));
            col += 1;
        }
    }
    Ok(out)
}
