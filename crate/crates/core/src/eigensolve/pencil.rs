//! Symmetric-definite pencils `B u = mu A u` with `A` tridiagonal positive
//! definite and `B` diagonal.
//!
//! `B - sigma A` is again symmetric tridiagonal, and by Sylvester's law of
//! inertia (A being positive definite) its number of negative pivots equals
//! the number of pencil eigenvalues below `sigma`. Eigenvalues are found by
//! bisection on that count, eigenvectors by pencil inverse iteration.

use super::tridiag::{bisect_index, dot, negative_pivots, start_vector, SymTridiag, TridiagLu};
use super::MAX_INVERSE_ITERATIONS;
use crate::error::{check_finite, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GenEigProblem {
    stiffness: SymTridiag,
    mass_like: Vec<f64>,
}

impl GenEigProblem {
    /// Fails unless `stiffness` is positive definite and dimensions agree.
    pub fn new(stiffness: SymTridiag, mass_like: Vec<f64>) -> Result<Self> {
        if mass_like.len() != stiffness.dim() {
            return Err(Error::InvalidArgument(format!(
                "diagonal length {} does not match stiffness dimension {}",
                mass_like.len(),
                stiffness.dim()
            )));
        }
        check_finite("mass_like", &mass_like)?;
        let negatives = super::tridiag::sturm_count(&stiffness, 0.0);
        if negatives > 0 {
            return Err(Error::NotPositiveDefinite(format!(
                "stiffness has {negatives} eigenvalues below 0"
            )));
        }
        Ok(Self {
            stiffness,
            mass_like,
        })
    }

    pub fn stiffness(&self) -> &SymTridiag {
        &self.stiffness
    }

    pub fn mass_like(&self) -> &[f64] {
        &self.mass_like
    }

    pub fn dim(&self) -> usize {
        self.mass_like.len()
    }

    /// Number of pencil eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let a = &self.stiffness;
        negative_pivots(
            self.dim(),
            |i| self.mass_like[i] - sigma * a.diag()[i],
            |i| {
                let o = sigma * a.offdiag()[i];
                o * o
            },
        )
    }

    /// `A`-inner product `x^T A y`.
    pub fn a_dot(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.stiffness.matvec(y))
    }

    /// `||B u - mu A u||_2`.
    pub fn residual(&self, mu: f64, u: &[f64]) -> f64 {
        let au = self.stiffness.matvec(u);
        u.iter()
            .zip(&au)
            .zip(&self.mass_like)
            .map(|((x, ax), b)| (b * x - mu * ax).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// A lower bound for all pencil eigenvalues: `-max|B| / lambda_min(A)`,
    /// with `lambda_min(A)` bounded below by Gershgorin.
    fn lower_bound(&self) -> f64 {
        let b_max = self.mass_like.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let a_min = self.stiffness.gershgorin().0;
        let a_min = if a_min > 0.0 {
            a_min
        } else {
            // Gershgorin is inconclusive: bisect for lambda_min(A) from below.
            let hi = self.stiffness.gershgorin().1;
            let l = bisect_index(
                |x| super::tridiag::sturm_count(&self.stiffness, x),
                0,
                0.0,
                hi,
                0.0,
            );
            0.5 * l
        };
        -(b_max / a_min) * (1.0 + 1e-12) - f64::MIN_POSITIVE
    }
}

/// The `j_max` most negative eigenvalues of `B u = mu A u`, ascending
/// (largest `|mu|` first), with eigenvectors normalized to `u^T A u = 1`.
///
/// Each pair satisfies `||Bu - mu Au|| <= tol (||B|| + |mu| ||A||) ||u||`.
pub fn gen_negative_eigs(p: &GenEigProblem, j_max: usize, tol: f64) -> Result<Vec<(f64, Vec<f64>)>> {
    if j_max == 0 || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gen_negative_eigs needs j_max >= 1 and tol > 0 (j_max={j_max}, tol={tol})"
        )));
    }
    let total = p.count_below(0.0);
    let count = total.min(j_max);
    if count == 0 {
        return Ok(Vec::new());
    }
    let lo = p.lower_bound();
    let mus: Vec<f64> = (0..count)
        .map(|k| bisect_index(|s| p.count_below(s), k, lo, 0.0, 0.0))
        .collect();
    let vectors = pencil_vectors(p, &mus, tol)?;
    Ok(mus.into_iter().zip(vectors).collect())
}

/// `mu` with ascending index `k` (0-based) among all pencil eigenvalues below zero,
/// to full floating-point precision.
pub fn gen_negative_eig_value(p: &GenEigProblem, k: usize) -> Result<f64> {
    let total = p.count_below(0.0);
    if k >= total {
        return Err(Error::IndexUnavailable {
            j: k + 1,
            available: total,
        });
    }
    Ok(bisect_index(|s| p.count_below(s), k, p.lower_bound(), 0.0, 0.0))
}

/// Inverse iteration `(B - mu A) x_{k+1} = A x_k`, `A`-orthogonalized within clusters.
pub fn pencil_vectors(p: &GenEigProblem, mus: &[f64], tol: f64) -> Result<Vec<Vec<f64>>> {
    let n = p.dim();
    let a = p.stiffness();
    let a_norm = a.norm_inf();
    let b_norm = p.mass_like.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(mus.len());
    let mut cluster_start = 0;
    for (idx, &mu) in mus.iter().enumerate() {
        let scale = b_norm + mu.abs() * a_norm;
        if idx > 0 && (mu - mus[idx - 1]).abs() > 1e-3 * mu.abs().max(mus[idx - 1].abs()) {
            cluster_start = idx;
        }
        let d: Vec<f64> = (0..n).map(|i| p.mass_like[i] - mu * a.diag()[i]).collect();
        let e: Vec<f64> = a.offdiag().iter().map(|o| -mu * o).collect();
        let lu = TridiagLu::factor(&d, &e, f64::EPSILON * scale.max(f64::MIN_POSITIVE));
        let mut x = start_vector(n, idx as u64);
        let mut residual = f64::INFINITY;
        let mut converged = false;
        for _ in 0..MAX_INVERSE_ITERATIONS {
            let mut rhs = a.matvec(&x);
            lu.solve(&mut rhs);
            x = rhs;
            for prev in &out[cluster_start..idx] {
                let c = p.a_dot(&x, prev);
                x.iter_mut().zip(prev).for_each(|(u, v)| *u -= c * v);
            }
            let nrm = p.a_dot(&x, &x);
            if !(nrm > 0.0 && nrm.is_finite()) {
                x = start_vector(n, idx as u64 + 104_729);
                continue;
            }
            let s = nrm.sqrt();
            x.iter_mut().for_each(|u| *u /= s);
            let x2 = dot(&x, &x).sqrt();
            residual = p.residual(mu, &x);
            if residual <= tol * scale * x2 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                value: mu,
                iterations: MAX_INVERSE_ITERATIONS,
                residual,
            });
        }
        out.push(x);
    }
    Ok(out)
}
