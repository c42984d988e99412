//! Gap eigenvalues from the fixed-point equation on the `K_beta` curves.
//!
//! With `u_- = -1` the eigenvalue problem of the reduced operator becomes
//! `(-d^2 + beta) phi = (lambda - 1) V phi` with `beta = 1 - lambda^2`, so
//! `lambda = 1 + 1/mu_j(beta)` once `beta` solves
//! `alpha_j(beta) = 1 + sqrt(1 - beta)` for `alpha_j = -1/mu_j`. The case
//! `u_+ = 1` maps onto it through `(u_+, u_-) -> (-u_-, -u_+)`,
//! `lambda -> -lambda`.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::discretize::{Boundary, DENOMINATOR_FLOOR};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::kbeta::{n_zero_set, KBetaOperator, NZeroReport, DEFAULT_BETA_MIN, DEFAULT_J_MAX};
use crate::potential::{
    gap_potential_v, mirrored_gap_potential_v, part_norms, riemann_invariants, PotentialSpec,
    RiemannFields,
};
use crate::transform::{assemble_reduced_operator, SpinorField};

/// Allowed deviation of the constant invariant from `∓1`.
pub const BRANCH_TOLERANCE: f64 = 1e-8;
/// Slack on `||V^(-)||_inf <= 1` and on the eigenvalue bound.
pub const SMALLNESS_SLACK: f64 = 1e-12;
/// Bracket lower ends tried below `beta_min` before giving up.
const MIN_BRACKET: f64 = 1e-14;
const MAX_BISECTIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `u_- = -1`, scalar potential `V = u_+ - 1`.
    UMinusIsMinusOne,
    /// `u_+ = 1`, scalar potential `-u_- - 1`, eigenvalues negated.
    UPlusIsOne,
}

impl Branch {
    /// Largest deviation of the branch's constant invariant.
    pub fn deviation(self, fields: &RiemannFields) -> f64 {
        match self {
            Branch::UMinusIsMinusOne => fields.u_minus().iter().map(|u| (u + 1.0).abs()).fold(0.0, f64::max),
            Branch::UPlusIsOne => fields.u_plus().iter().map(|u| (u - 1.0).abs()).fold(0.0, f64::max),
        }
    }

    pub fn check(self, fields: &RiemannFields) -> Result<()> {
        let d = self.deviation(fields);
        if d > BRANCH_TOLERANCE {
            let name = match self {
                Branch::UMinusIsMinusOne => "u_- = -1",
                Branch::UPlusIsOne => "u_+ = 1",
            };
            return Err(Error::BranchPrecondition(format!(
                "{name} fails by {d:e} (tolerance {BRANCH_TOLERANCE:e})"
            )));
        }
        Ok(())
    }

    /// The first branch whose invariant holds, preferring `u_- = -1`.
    pub fn detect(fields: &RiemannFields) -> Option<Branch> {
        [Branch::UMinusIsMinusOne, Branch::UPlusIsOne]
            .into_iter()
            .find(|b| b.check(fields).is_ok())
    }

    /// The scalar potential the branch feeds into `K_beta`.
    pub fn scalar_potential(self, fields: &RiemannFields) -> Vec<f64> {
        match self {
            Branch::UMinusIsMinusOne => gap_potential_v(fields),
            Branch::UPlusIsOne => mirrored_gap_potential_v(fields),
        }
    }

    fn sign(self) -> f64 {
        match self {
            Branch::UMinusIsMinusOne => 1.0,
            Branch::UPlusIsOne => -1.0,
        }
    }
}

/// Root of `f(beta) = -1/mu(beta) - 1 - sqrt(1 - beta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaRoot {
    pub beta: f64,
    pub mu: f64,
    /// `-1/mu` at the root.
    pub alpha: f64,
    /// `beta + (1/mu)(2 + 1/mu)`.
    pub fixed_point_residual: f64,
    pub evaluations: usize,
}

fn fixed_point(beta: f64, mu: f64) -> (f64, f64) {
    let alpha = -1.0 / mu;
    (alpha - 1.0 - (1.0 - beta).sqrt(), beta + (1.0 / mu) * (2.0 + 1.0 / mu))
}

/// Bisection for `beta_j` on `[beta_min, 1]`, widening the lower end by decades
/// if `f` is not yet negative there. Stops once the bracket is narrower than
/// `tol` and the fixed-point residual is below `tol`, or at machine precision.
pub fn solve_beta_j<F>(mut mu_of_beta: F, beta_min: f64, tol: f64) -> Result<BetaRoot>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(beta_min > 0.0 && beta_min <= 1.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "solve_beta_j needs beta_min in (0, 1] and tol > 0 (beta_min={beta_min}, tol={tol})"
        )));
    }
    let mut evaluations = 0;
    let mut eval = |beta: f64| -> Result<(f64, f64, f64)> {
        evaluations += 1;
        let mu = mu_of_beta(beta)?;
        if !(mu < 0.0 && mu.is_finite()) {
            return Err(Error::Domain(format!("mu({beta:e}) = {mu} is not negative")));
        }
        let (f, r) = fixed_point(beta, mu);
        Ok((mu, f, r))
    };

    let (mu_hi, f_hi, r_hi) = eval(1.0)?;
    if f_hi.abs() <= tol {
        return Ok(BetaRoot {
            beta: 1.0,
            mu: mu_hi,
            alpha: -1.0 / mu_hi,
            fixed_point_residual: r_hi,
            evaluations,
        });
    }
    if f_hi < 0.0 {
        return Err(Error::NoSignChange(format!(
            "f(1) = {f_hi:e} < 0: alpha(1) < 1, so the smallness condition or the discretization fails"
        )));
    }
    let mut lo = beta_min;
    let (mut f_lo, mut best) = loop {
        let (mu, f, r) = eval(lo)?;
        if f < 0.0 {
            break (f, (lo, mu, r));
        }
        if lo <= MIN_BRACKET {
            return Err(Error::NoSignChange(format!(
                "f({lo:e}) = {f:e} >= 0: the index is not in the negative-limit set"
            )));
        }
        lo = (lo * 0.1).max(MIN_BRACKET);
    };
    let mut hi = 1.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (mu, f, r) = eval(mid)?;
        if r.abs() < best.2.abs() || (hi - lo) <= tol {
            best = (mid, mu, r);
        }
        if f < 0.0 {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
        }
        if hi - lo <= tol && best.2.abs() <= tol {
            break;
        }
    }
    debug_assert!(f_lo < 0.0);
    let (beta, mu, r) = best;
    Ok(BetaRoot {
        beta,
        mu,
        alpha: -1.0 / mu,
        fixed_point_residual: r,
        evaluations,
    })
}

/// Two-component eigenvector rebuilt from a scalar one, plus its residual in
/// the reduced operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// Unit-norm spinor.
    pub spinor: SpinorField,
    /// `||L psi - lambda psi|| / ||psi||` on interior nodes.
    pub residual: f64,
}

/// `psi = (i D phi / (lambda + u_-), phi)` for `UMinusIsMinusOne` and
/// `(phi, i D phi / (lambda + u_+))` for `UPlusIsOne`, with `D` the central
/// difference (one-sided at the ends).
pub fn reconstruct_spinor(
    phi: &[f64],
    lambda: f64,
    fields: &RiemannFields,
    branch: Branch,
) -> Result<Reconstruction> {
    let grid = fields.grid();
    let n = grid.n_points();
    if phi.len() != n {
        return Err(Error::GridMismatch(format!(
            "scalar vector has {} entries, grid has {n}",
            phi.len()
        )));
    }
    crate::error::check_finite("scalar eigenvector", phi)?;
    if phi.iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroVector);
    }
    let u = match branch {
        Branch::UMinusIsMinusOne => fields.u_minus(),
        Branch::UPlusIsOne => fields.u_plus(),
    };
    if let Some(node) = (0..n).find(|&i| (lambda + u[i]).abs() < DENOMINATOR_FLOOR) {
        return Err(Error::VanishingDenominator {
            node,
            value: (lambda + u[node]).abs(),
        });
    }
    let h = grid.spacing();
    let derivative = |i: usize| match i {
        0 => (phi[1] - phi[0]) / h,
        i if i == n - 1 => (phi[n - 1] - phi[n - 2]) / h,
        i => (phi[i + 1] - phi[i - 1]) / (2.0 * h),
    };
    let scalar: Vec<Complex64> = phi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let derived: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(0.0, derivative(i) / (lambda + u[i])))
        .collect();
    let (c1, c2) = match branch {
        Branch::UMinusIsMinusOne => (derived, scalar),
        Branch::UPlusIsOne => (scalar, derived),
    };
    let raw = SpinorField::new(grid.clone(), c1, c2)?;
    let norm = raw.l2_norm_sq().sqrt();
    let scale = 1.0 / norm;
    let spinor = SpinorField::new(
        grid.clone(),
        raw.comp1().iter().map(|z| z * scale).collect(),
        raw.comp2().iter().map(|z| z * scale).collect(),
    )?;
    let op = assemble_reduced_operator(fields)?;
    let v = spinor.interior_interleaved();
    let hv = op.matrix.matvec(&v);
    let num: f64 = hv.iter().zip(&v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum();
    let den: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    Ok(Reconstruction {
        spinor,
        residual: (num / den.max(f64::MIN_POSITIVE)).sqrt(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapEigenpair {
    pub j: usize,
    pub beta: f64,
    /// `mu_j(beta_j)` of the branch's scalar problem.
    pub mu: f64,
    pub lambda: f64,
    /// `-1/mu` at the root.
    pub alpha: f64,
    pub fixed_point_residual: f64,
    pub spinor: SpinorField,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    pub j_max: usize,
    pub beta_min: f64,
    pub tol: f64,
    pub boundary: Boundary,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            j_max: DEFAULT_J_MAX,
            beta_min: DEFAULT_BETA_MIN,
            tol: 1e-12,
            boundary: Boundary::Transparent,
        }
    }
}

/// Everything the pipeline learns about one potential.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub branch: Branch,
    /// `||V^(-)||_inf` of the branch's scalar potential.
    pub negative_part: f64,
    pub n_zero: NZeroReport,
    pub eigenpairs: Vec<GapEigenpair>,
}

/// Runs the pipeline on fields already sampled on a grid.
pub fn gap_pipeline(fields: &RiemannFields, branch: Branch, opts: &GapOptions) -> Result<GapReport> {
    branch.check(fields)?;
    let v = branch.scalar_potential(fields);
    let (_, negative_part) = part_norms(&v)?;
    if negative_part > 1.0 + SMALLNESS_SLACK {
        return Err(Error::SmallnessViolated(negative_part));
    }
    let op = KBetaOperator::new(v, fields.grid(), opts.boundary)?;
    let n_zero = n_zero_set(&op, opts.j_max, opts.beta_min)?;
    let sign = branch.sign();
    let mut eigenpairs: Vec<GapEigenpair> = Vec::with_capacity(n_zero.indices.len());
    for &j in &n_zero.indices {
        let mut cache: HashMap<u64, f64> = HashMap::new();
        let root = solve_beta_j(
            |beta| {
                if let Some(m) = cache.get(&beta.to_bits()) {
                    return Ok(*m);
                }
                let m = op.mu(j, beta)?;
                cache.insert(beta.to_bits(), m);
                Ok(m)
            },
            opts.beta_min,
            opts.tol,
        )?;
        if root.alpha < 1.0 {
            return Err(Error::RootSearch(format!(
                "j = {j}: alpha = {} < 1 selects the spurious root",
                root.alpha
            )));
        }
        let spectrum = op.spectrum(root.beta, j, opts.tol.max(crate::eigensolve::DEFAULT_EIG_TOL))?;
        let phi = spectrum.vectors.get(j - 1).ok_or(Error::IndexUnavailable {
            j,
            available: spectrum.vectors.len(),
        })?;
        let scalar_lambda = 1.0 + 1.0 / root.mu;
        if !(scalar_lambda + 1.0 > 0.0 && scalar_lambda + 1.0 <= negative_part + SMALLNESS_SLACK) {
            return Err(Error::Domain(format!(
                "j = {j}: lambda + 1 = {} outside (0, ||V^(-)||_inf = {negative_part}]",
                scalar_lambda + 1.0
            )));
        }
        let lambda = sign * scalar_lambda;
        let rec = reconstruct_spinor(phi, lambda, fields, branch)?;
        eigenpairs.push(GapEigenpair {
            j,
            beta: root.beta,
            mu: root.mu,
            lambda,
            alpha: root.alpha,
            fixed_point_residual: root.fixed_point_residual,
            spinor: rec.spinor,
            residual: rec.residual,
        });
    }
    let slack = 10.0 * opts.tol.max(f64::EPSILON);
    for w in eigenpairs.windows(2) {
        let (a, b) = (sign * w[0].lambda, sign * w[1].lambda);
        if b > a + slack || w[1].beta > w[0].beta + slack {
            return Err(Error::NotMonotone(format!(
                "j = {} -> {}: lambda {a} -> {b}, beta {} -> {}",
                w[0].j, w[1].j, w[0].beta, w[1].beta
            )));
        }
    }
    Ok(GapReport {
        branch,
        negative_part,
        n_zero,
        eigenpairs,
    })
}

/// Gap eigenpairs of `spec` on `grid` along `branch`, default options with `tol`.
pub fn gap_eigenvalues(spec: &PotentialSpec, grid: &Grid, branch: Branch, tol: f64) -> Result<Vec<GapEigenpair>> {
    let fields = riemann_invariants(spec, grid)?;
    let opts = GapOptions {
        tol,
        ..GapOptions::default()
    };
    Ok(gap_pipeline(&fields, branch, &opts)?.eigenpairs)
}
