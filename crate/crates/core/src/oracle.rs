//! Semi-analytic reference values: the dark-soliton eigenvalue, the
//! square-well transcendental spectrum of `K_beta`, and the discrete
//! Dirichlet Laplacian.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Sign-change scan density per `pi`-interval.
pub const SAMPLES_PER_PI: usize = 10_000;

/// Below this `beta` the `j = 1` value is reported as divergent.
pub const DIVERGENCE_BETA: f64 = 1e-10;

/// Positive roots `kappa_j(k)` of `tan(kappa) = 2 k kappa / (kappa^2 - k^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareWellRoots {
    pub k: f64,
    pub kappas: Vec<f64>,
}

/// `((kappa^2 - k^2) sin(kappa) - 2 k kappa cos(kappa)) / kappa`: pole-free,
/// continuous at `kappa = k`, and without the trivial root at zero.
fn root_function(kappa: f64, k: f64) -> f64 {
    let sinc = if kappa.abs() < 1e-8 {
        1.0 - kappa * kappa / 6.0
    } else {
        kappa.sin() / kappa
    };
    (kappa * kappa - k * k) * sinc - 2.0 * k * kappa.cos()
}

/// First `j_max` positive roots, bracketed by a dense sign-change scan and
/// refined by bisection to `tol`.
pub fn square_well_kappa(k: f64, j_max: usize, tol: f64) -> Result<SquareWellRoots> {
    if !(k.is_finite() && k > 0.0) || !(tol > 0.0) || j_max == 0 {
        return Err(Error::InvalidArgument(format!(
            "square_well_kappa needs k > 0, tol > 0, j_max >= 1 (k={k}, tol={tol}, j_max={j_max})"
        )));
    }
    let intervals = j_max + 2 + (k / PI).ceil() as usize;
    let samples = intervals * SAMPLES_PER_PI;
    let step = intervals as f64 * PI / samples as f64;
    let mut kappas = Vec::with_capacity(j_max);
    let mut a = 0.0;
    let mut fa = root_function(a, k);
    for i in 1..=samples {
        let b = i as f64 * step;
        let fb = root_function(b, k);
        if fa == 0.0 && a > 0.0 {
            kappas.push(a);
        } else if fa * fb < 0.0 {
            kappas.push(bisect(|x| root_function(x, k), a, b, fa, tol));
        }
        if kappas.len() == j_max {
            return Ok(SquareWellRoots { k, kappas });
        }
        a = b;
        fa = fb;
    }
    Err(Error::RootSearch(format!(
        "found {} of {j_max} roots in (0, {:.4}] for k = {k}",
        kappas.len(),
        intervals as f64 * PI
    )))
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// `mu_j(beta) = -eps / (beta + kappa_j(sqrt beta)^2)` for `V = -eps` on `[0, 1]`.
pub fn square_well_mu(eps: f64, beta: f64, j: usize) -> Result<f64> {
    if !(eps.is_finite() && eps > 0.0) || !(beta.is_finite() && beta > 0.0) || j == 0 {
        return Err(Error::InvalidArgument(format!(
            "square_well_mu needs eps > 0, beta > 0, j >= 1 (eps={eps}, beta={beta}, j={j})"
        )));
    }
    if j == 1 && beta < DIVERGENCE_BETA {
        return Err(Error::Domain(format!(
            "mu_1(beta) diverges to -infinity as beta -> 0 (beta = {beta:e})"
        )));
    }
    let roots = square_well_kappa(beta.sqrt(), j, 1e-15)?;
    let kappa = roots.kappas[j - 1];
    Ok(-eps / (beta + kappa * kappa))
}

/// `lim_{beta -> 0+} mu_j(beta)`: `-infinity` for `j = 1`, else `-eps / ((j-1)^2 pi^2)`.
pub fn square_well_mu_limit(eps: f64, j: usize) -> f64 {
    if j <= 1 {
        f64::NEG_INFINITY
    } else {
        let m = (j - 1) as f64;
        -eps / (m * m * PI * PI)
    }
}

/// Gap eigenvalue of the square well: `-sqrt(1 - beta)` where `beta` solves
/// `(beta + kappa_1(sqrt beta)^2) / eps = 1 + sqrt(1 - beta)` (bisection).
pub fn square_well_lambda(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("square well needs eps in (0,1], got {eps}")));
    }
    let g = |beta: f64| -> Result<f64> {
        let k = square_well_kappa(beta.sqrt(), 1, 1e-15)?.kappas[0];
        Ok((beta + k * k) / eps - 1.0 - (1.0 - beta).sqrt())
    };
    let (mut lo, mut hi) = (DIVERGENCE_BETA, 1.0);
    if g(lo)? >= 0.0 || g(hi)? < 0.0 {
        return Err(Error::RootSearch(format!("no sign change for eps = {eps}")));
    }
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if g(m)? < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    Ok(-(1.0 - 0.5 * (lo + hi)).sqrt())
}

/// The single gap eigenvalue `-sqrt(1 - eps^2)` of the dark soliton.
pub fn dark_soliton_lambda(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("dark soliton needs eps in (0,1), got {eps}")));
    }
    Ok(-(1.0 - eps * eps).sqrt())
}

/// Eigenvalue `m` (1-based) of the Dirichlet `(1/h^2) tridiag(-1,2,-1) + beta`:
/// `(2/h^2)(1 - cos(m pi h / (2X))) + beta`.
pub fn dirichlet_laplacian_eigenvalue(grid: &Grid, beta: f64, m: usize) -> f64 {
    let h = grid.spacing();
    (2.0 / (h * h)) * (1.0 - (m as f64 * PI * h / (2.0 * grid.half_width())).cos()) + beta
}
