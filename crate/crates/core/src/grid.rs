//! Uniform mesh on a truncated symmetric domain `[-X, X]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid `x_i = -X + i h`, `h = 2X / (n - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    half_width: f64,
    n_points: usize,
    spacing: f64,
    nodes: Vec<f64>,
}

/// Wire form of a grid: nodes are always recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub n_points: usize,
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;
    fn try_from(s: GridSpec) -> Result<Self> {
        Grid::new(s.half_width, s.n_points)
    }
}

impl From<Grid> for GridSpec {
    fn from(g: Grid) -> Self {
        GridSpec {
            half_width: g.half_width,
            n_points: g.n_points,
        }
    }
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "n_points must be >= 3, got {n_points}"
            )));
        }
        let spacing = 2.0 * half_width / (n_points - 1) as f64;
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "spacing 2 * {half_width} / {} is not a positive finite number",
                n_points - 1
            )));
        }
        let mut nodes: Vec<f64> = (0..n_points)
            .map(|i| -half_width + i as f64 * spacing)
            .collect();
        // pin the endpoints exactly
        nodes[0] = -half_width;
        nodes[n_points - 1] = half_width;
        Ok(Self {
            half_width,
            n_points,
            spacing,
            nodes,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of interior nodes (Dirichlet unknowns).
    pub fn n_interior(&self) -> usize {
        self.n_points - 2
    }

    /// Same domain, spacing halved.
    pub fn refined(&self) -> Grid {
        Grid::new(self.half_width, 2 * self.n_points - 1).expect("refinement of a valid grid")
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            half_width: self.half_width,
            n_points: self.n_points,
        }
    }

    /// Grids are compatible when they describe the same nodes.
    pub fn matches(&self, other: &Grid) -> bool {
        self.n_points == other.n_points
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width.max(1.0)
    }

    /// Discrete L2 norm squared `h * sum |f_i|^2`.
    pub fn l2_norm_sq(&self, values: &[f64]) -> f64 {
        self.spacing * values.iter().map(|v| v * v).sum::<f64>()
    }
}
