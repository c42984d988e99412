//! Real symmetric tridiagonal matrices: Sturm counts, bisection and inverse iteration.

use crate::error::{check_finite, Error, Result};

/// Pivots smaller than this in magnitude are replaced by `+PIVOT_FLOOR` in
/// Sturm sequences, so an exact zero pivot of a decoupled row is not counted
/// as an eigenvalue strictly below the shift.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// Maximum inverse-iteration steps per eigenvector.
pub const MAX_INVERSE_ITERATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Empty("tridiagonal matrix"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "offdiag length {} must be diag length {} minus one",
                offdiag.len(),
                diag.len()
            )));
        }
        check_finite("diag", &diag)?;
        check_finite("offdiag", &offdiag)?;
        Ok(Self { diag, offdiag })
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Infinity norm.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                self.diag[i].abs()
                    + if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 }
                    + if i + 1 < n { self.offdiag[i].abs() } else { 0.0 }
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.offdiag[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> SymTridiag {
        SymTridiag {
            diag: self.diag.iter().map(|d| d + shift).collect(),
            offdiag: self.offdiag.clone(),
        }
    }
}

/// Number of negative pivots of the `LDL^T` factorization of the symmetric
/// tridiagonal matrix with diagonal `diag(i)` and squared off-diagonal `off_sq(i)`.
pub(crate) fn negative_pivots(
    n: usize,
    diag: impl Fn(usize) -> f64,
    off_sq: impl Fn(usize) -> f64,
) -> usize {
    let mut count = 0;
    let mut q = diag(0);
    if q.abs() < PIVOT_FLOOR {
        q = PIVOT_FLOOR;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        q = diag(i) - off_sq(i - 1) / q;
        if q.abs() < PIVOT_FLOOR || q.is_nan() {
            q = PIVOT_FLOOR;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Number of eigenvalues of `t` strictly less than `x`.
pub fn sturm_count(t: &SymTridiag, x: f64) -> usize {
    negative_pivots(
        t.dim(),
        |i| t.diag[i] - x,
        |i| t.offdiag[i] * t.offdiag[i],
    )
}

/// Bisection for the eigenvalue with ascending index `k`, given a
/// monotone counting function and a bracket with `count(lo) <= k < count(hi)`.
pub(crate) fn bisect_index(
    count: impl Fn(f64) -> usize,
    k: usize,
    mut lo: f64,
    mut hi: f64,
    abs_tol: f64,
) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        let width_floor = abs_tol.max(2.0 * f64::EPSILON * lo.abs().max(hi.abs()));
        if mid <= lo || mid >= hi || hi - lo <= width_floor {
            return mid;
        }
        if count(mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// LU factorization with partial pivoting of `T - shift I`, stored as
/// three bands of `U` plus multipliers and swap flags.
pub(crate) struct TridiagLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    /// Factor the general tridiagonal matrix with diagonal `d`, and symmetric
    /// off-diagonal `e`. Zero pivots are replaced by `tiny`.
    pub(crate) fn factor(d: &[f64], e: &[f64], tiny: f64) -> Self {
        let n = d.len();
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        // current row restricted to columns k, k+1, k+2
        let (mut c0, mut c1, mut c2) = (d[0], if n > 1 { e[0] } else { 0.0 }, 0.0);
        for k in 0..n.saturating_sub(1) {
            let a = e[k];
            let b = d[k + 1];
            let c = if k + 2 < n { e[k + 1] } else { 0.0 };
            let (p, o) = if a.abs() > c0.abs() {
                swapped[k] = true;
                ((a, b, c), (c0, c1, c2))
            } else {
                ((c0, c1, c2), (a, b, c))
            };
            let p0 = if p.0 == 0.0 { tiny } else { p.0 };
            let m = o.0 / p0;
            mult[k] = m;
            u0[k] = p0;
            u1[k] = p.1;
            u2[k] = p.2;
            c0 = o.1 - m * p.1;
            c1 = o.2 - m * p.2;
            c2 = 0.0;
        }
        u0[n - 1] = if c0 == 0.0 { tiny } else { c0 };
        let _ = (c1, c2);
        Self {
            u0,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    pub(crate) fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                rhs.swap(k, k + 1);
            }
            rhs[k + 1] -= self.mult[k] * rhs[k];
        }
        for k in (0..n).rev() {
            let mut s = rhs[k];
            if k + 1 < n {
                s -= self.u1[k] * rhs[k + 1];
            }
            if k + 2 < n {
                s -= self.u2[k] * rhs[k + 2];
            }
            rhs[k] = s / self.u0[k];
        }
    }
}

/// Deterministic start vector for inverse iteration.
pub(crate) fn start_vector(n: usize, salt: u64) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15_u64 ^ salt.wrapping_mul(0xD1B5_4A32_D192_ED03);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenvalues in `[lo, hi)` to absolute accuracy `tol`, with unit eigenvectors.
///
/// Eigenvalues come from Sturm bisection; eigenvectors from inverse iteration,
/// reorthogonalized inside clusters closer than `1e-3 ||T||`.
pub fn eig_interval(t: &SymTridiag, lo: f64, hi: f64, tol: f64) -> Result<Vec<(f64, Vec<f64>)>> {
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eig_interval needs lo < hi and tol > 0 (lo={lo}, hi={hi}, tol={tol})"
        )));
    }
    let c_lo = sturm_count(t, lo);
    let c_hi = sturm_count(t, hi);
    let values: Vec<f64> = (c_lo..c_hi)
        .map(|k| bisect_index(|x| sturm_count(t, x), k, lo, hi, tol))
        .collect();
    let vectors = inverse_iteration(t, &values, tol)?;
    Ok(values.into_iter().zip(vectors).collect())
}

/// Unit eigenvectors for the given (ascending) eigenvalue approximations.
pub fn inverse_iteration(t: &SymTridiag, values: &[f64], tol: f64) -> Result<Vec<Vec<f64>>> {
    let n = t.dim();
    let norm = t.norm_inf().max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * norm;
    let cluster_gap = 1e-3 * norm;
    let accept = 1e3 * tol * norm;
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    let mut cluster_start = 0;
    for (idx, &lambda) in values.iter().enumerate() {
        if idx > 0 && (lambda - values[idx - 1]).abs() > cluster_gap {
            cluster_start = idx;
        }
        let d: Vec<f64> = t.diag.iter().map(|v| v - lambda).collect();
        let lu = TridiagLu::factor(&d, &t.offdiag, tiny);
        let mut v = start_vector(n, idx as u64);
        let mut residual = f64::INFINITY;
        let mut converged = false;
        for _ in 0..MAX_INVERSE_ITERATIONS {
            lu.solve(&mut v);
            for prev in &out[cluster_start..idx] {
                let c = dot(&v, prev);
                v.iter_mut().zip(prev).for_each(|(a, b)| *a -= c * b);
            }
            let nv = norm2(&v);
            if !(nv > 0.0 && nv.is_finite()) {
                v = start_vector(n, idx as u64 + 7919);
                continue;
            }
            v.iter_mut().for_each(|a| *a /= nv);
            let tv = t.matvec(&v);
            residual = norm2(
                &tv.iter()
                    .zip(&v)
                    .map(|(a, b)| a - lambda * b)
                    .collect::<Vec<_>>(),
            );
            if residual <= accept {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                value: lambda,
                iterations: MAX_INVERSE_ITERATIONS,
                residual,
            });
        }
        out.push(v);
    }
    Ok(out)
}

/// The eigenpair of `t` whose eigenvalue is closest to `target`.
pub fn nearest_eigenpair(t: &SymTridiag, target: f64, tol: f64) -> Result<(f64, Vec<f64>)> {
    let (lo, hi) = t.gershgorin();
    let (lo, hi) = (lo.min(target) - 1.0, hi.max(target) + 1.0);
    let below = sturm_count(t, target);
    let mut candidates = Vec::with_capacity(2);
    if below > 0 {
        candidates.push(bisect_index(|x| sturm_count(t, x), below - 1, lo, hi, tol));
    }
    if below < t.dim() {
        candidates.push(bisect_index(|x| sturm_count(t, x), below, lo, hi, tol));
    }
    let value = candidates
        .into_iter()
        .min_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()))
        .ok_or(Error::Empty("tridiagonal matrix"))?;
    let vector = inverse_iteration(t, &[value], tol)?.pop().ok_or(Error::ZeroVector)?;
    Ok((value, vector))
}
