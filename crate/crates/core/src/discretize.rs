//! Finite-difference assembly for the scalar problems: `-d^2/dx^2 + beta`
//! and the lambda-dependent divergence-form operators obtained by
//! eliminating one spinor component.

use serde::{Deserialize, Serialize};

use crate::eigensolve::SymTridiag;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::RiemannFields;

/// Truncation condition for the scalar stiffness matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// `u(±X) = 0`; unknowns are the interior nodes.
    #[default]
    Dirichlet,
    /// Exact discrete exterior: beyond `±X` the potential is taken to be zero
    /// and the lattice solution `u_{N-1+k} = r^k u_{N-1}` of
    /// `-(u_{k+1} - 2u_k + u_{k-1})/h^2 + beta u_k = 0` is eliminated.
    /// Unknowns are all nodes.
    Transparent,
}

impl Boundary {
    /// Indices of the grid nodes carrying unknowns.
    pub fn unknowns(self, grid: &Grid) -> std::ops::Range<usize> {
        match self {
            Boundary::Dirichlet => 1..grid.n_points() - 1,
            Boundary::Transparent => 0..grid.n_points(),
        }
    }
}

/// Decay ratio `r in (0, 1]` of the exterior lattice solution:
/// `r + 1/r = 2 + beta h^2`.
pub fn exterior_decay_ratio(beta: f64, h: f64) -> f64 {
    let s = 0.5 * beta * h * h;
    // 1 + s - sqrt(s (2 + s)) written without cancellation
    1.0 / (1.0 + s + (s * (2.0 + s)).sqrt())
}

/// `(1/h^2) tridiag(-1, 2, -1) + beta I` with Dirichlet ends.
pub fn laplacian_plus_beta(grid: &Grid, beta: f64) -> Result<SymTridiag> {
    laplacian_plus_beta_with(grid, beta, Boundary::Dirichlet)
}

pub fn laplacian_plus_beta_with(grid: &Grid, beta: f64, boundary: Boundary) -> Result<SymTridiag> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "beta must be finite and >= 0, got {beta}"
        )));
    }
    let h = grid.spacing();
    let inv_h2 = 1.0 / (h * h);
    let n = boundary.unknowns(grid).len();
    let mut diag = vec![2.0 * inv_h2 + beta; n];
    if boundary == Boundary::Transparent {
        if !(beta > 0.0) {
            return Err(Error::InvalidArgument(
                "transparent boundary needs beta > 0".into(),
            ));
        }
        let edge = (2.0 - exterior_decay_ratio(beta, h)) * inv_h2 + beta;
        diag[0] = edge;
        diag[n - 1] = edge;
    }
    SymTridiag::new(diag, vec![-inv_h2; n - 1])
}

/// Which spinor component survives the elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarForm {
    /// `-(1/(lambda + u_-) psi_2')' - (lambda + u_+) psi_2 = 0`.
    SecondComponent,
    /// `-(1/(lambda + u_+) psi_1')' - (lambda + u_-) psi_1 = 0`.
    FirstComponent,
}

/// Discrete scalar operator `stiffness - diag(potential_diag)` on interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProblem {
    pub grid: Grid,
    pub stiffness: SymTridiag,
    pub potential_diag: Vec<f64>,
}

impl ScalarProblem {
    /// The assembled symmetric matrix.
    pub fn matrix(&self) -> SymTridiag {
        let diag = self
            .stiffness
            .diag()
            .iter()
            .zip(&self.potential_diag)
            .map(|(s, w)| s - w)
            .collect();
        SymTridiag::new(diag, self.stiffness.offdiag().to_vec()).expect("finite by construction")
    }
}

/// Nodes where `|lambda + u| <= DENOMINATOR_FLOOR` make the elimination invalid.
pub const DENOMINATOR_FLOOR: f64 = 1e-8;

/// Divergence-form discretization with the coefficient `1/(lambda + u)`
/// averaged harmonically onto half-nodes; Dirichlet at `±X`.
pub fn sturm_liouville_lambda_form(
    fields: &RiemannFields,
    lambda: f64,
    form: ScalarForm,
) -> Result<ScalarProblem> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be finite, got {lambda}")));
    }
    let (denominator, weight) = match form {
        ScalarForm::SecondComponent => (fields.u_minus(), fields.u_plus()),
        ScalarForm::FirstComponent => (fields.u_plus(), fields.u_minus()),
    };
    let grid = fields.grid().clone();
    let n = grid.n_points();
    let d: Vec<f64> = denominator.iter().map(|u| lambda + u).collect();
    if let Some(node) = (0..n).find(|&i| d[i].abs() <= DENOMINATOR_FLOOR) {
        return Err(Error::VanishingDenominator {
            node,
            value: d[node].abs(),
        });
    }
    // harmonic mean of 1/d_i and 1/d_{i+1} is 2/(d_i + d_{i+1})
    let mut half = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let s = d[i] + d[i + 1];
        if s.abs() <= 2.0 * DENOMINATOR_FLOOR {
            return Err(Error::VanishingDenominator {
                node: i,
                value: 0.5 * s.abs(),
            });
        }
        half.push(2.0 / s);
    }
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let interior = 1..n - 1;
    let diag = interior.clone().map(|i| (half[i - 1] + half[i]) * inv_h2).collect();
    let off = (1..n - 2).map(|i| -half[i] * inv_h2).collect();
    let potential_diag = interior.map(|i| lambda + weight[i]).collect();
    Ok(ScalarProblem {
        grid,
        stiffness: SymTridiag::new(diag, off)?,
        potential_diag,
    })
}
