//! The pointwise unitary map between the Lax operator and the reduced
//! operator with the Riemann invariants on its diagonal, and the assembled
//! finite-difference matrices of both.

mod assemble;

use num_complex::Complex64;

use crate::eigensolve::Block;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::RiemannFields;

pub use assemble::{
    assemble_lax_operator, assemble_reduced_operator, lax_operator_from_fields, reduced_sectors,
    Chirality, ChiralSector, OperatorLabel, OperatorMatrix, Stencil, MIN_POINTS,
};

/// Two-component field on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    grid: Grid,
    comp1: Vec<Complex64>,
    comp2: Vec<Complex64>,
}

impl SpinorField {
    pub fn new(grid: Grid, comp1: Vec<Complex64>, comp2: Vec<Complex64>) -> Result<Self> {
        if comp1.len() != grid.n_points() || comp2.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "spinor components have {} and {} entries, grid has {}",
                comp1.len(),
                comp2.len(),
                grid.n_points()
            )));
        }
        if comp1.iter().chain(&comp2).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                what: "spinor",
                index: comp1
                    .iter()
                    .chain(&comp2)
                    .position(|z| !(z.re.is_finite() && z.im.is_finite()))
                    .unwrap_or(0),
            });
        }
        Ok(Self { grid, comp1, comp2 })
    }

    pub fn zeros(grid: &Grid) -> Self {
        let n = grid.n_points();
        Self {
            grid: grid.clone(),
            comp1: vec![Complex64::new(0.0, 0.0); n],
            comp2: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn comp1(&self) -> &[Complex64] {
        &self.comp1
    }

    pub fn comp2(&self) -> &[Complex64] {
        &self.comp2
    }

    /// `h sum (|psi_1|^2 + |psi_2|^2)`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.spacing()
            * self
                .comp1
                .iter()
                .chain(&self.comp2)
                .map(|z| z.norm_sqr())
                .sum::<f64>()
    }

    /// Interleaved interior values `(psi_1, psi_2)` at nodes `1..N-1`, the
    /// ordering used by `OperatorMatrix`.
    pub fn interior_interleaved(&self) -> Vec<Complex64> {
        let n = self.grid.n_points();
        (1..n - 1).flat_map(|j| [self.comp1[j], self.comp2[j]]).collect()
    }

    /// Inverse of `interior_interleaved`, with zero end values.
    pub fn from_interior_interleaved(grid: &Grid, v: &[Complex64]) -> Result<Self> {
        let n = grid.n_points();
        if v.len() != 2 * (n - 2) {
            return Err(Error::GridMismatch(format!(
                "interleaved vector has {} entries, expected {}",
                v.len(),
                2 * (n - 2)
            )));
        }
        let mut s = Self::zeros(grid);
        for j in 1..n - 1 {
            s.comp1[j] = v[2 * (j - 1)];
            s.comp2[j] = v[2 * (j - 1) + 1];
        }
        Ok(s)
    }

    /// Fraction of the squared norm carried by nodes with `|x| > (1 - fraction) X`.
    pub fn outer_mass_fraction(&self, fraction: f64) -> f64 {
        let cut = (1.0 - fraction) * self.grid.half_width();
        let total: f64 = self.comp1.iter().chain(&self.comp2).map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let outer: f64 = self
            .grid
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, x)| x.abs() > cut)
            .map(|(j, _)| self.comp1[j].norm_sqr() + self.comp2[j].norm_sqr())
            .sum();
        outer / total
    }
}

/// `(1/sqrt 2) [[e^{-i t}, e^{i t}], [e^{-i t}, -e^{i t}]]` with `t = (phase - pi/2)/2`.
pub fn m_matrix_at(phase: f64) -> Block {
    let t = 0.5 * (phase - std::f64::consts::FRAC_PI_2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a = Complex64::from_polar(s, -t);
    let b = Complex64::from_polar(s, t);
    [[a, b], [a, -b]]
}

/// `max |M M^* - I|` entrywise.
pub fn unitarity_residual(m: &Block) -> f64 {
    let p = crate::eigensolve::block_mul(m, &crate::eigensolve::block_adjoint(m));
    let mut r = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            let target = if i == j { 1.0 } else { 0.0 };
            r = r.max((p[i][j] - target).norm());
        }
    }
    r
}

/// Pointwise `M(phi(x_i)) psi(x_i)`, or `M^*` when `inverse` is set, with `phi`
/// integrated from the phase velocity.
pub fn apply_m(fields: &RiemannFields, psi: &SpinorField, inverse: bool) -> Result<SpinorField> {
    if !fields.grid().matches(psi.grid()) {
        return Err(Error::GridMismatch(
            "spinor and fields live on different grids".into(),
        ));
    }
    let phase = fields.phase();
    let n = phase.len();
    let mut comp1 = Vec::with_capacity(n);
    let mut comp2 = Vec::with_capacity(n);
    for j in 0..n {
        let mut m = m_matrix_at(phase[j]);
        if inverse {
            m = crate::eigensolve::block_adjoint(&m);
        }
        let (x, y) = (psi.comp1[j], psi.comp2[j]);
        comp1.push(m[0][0] * x + m[0][1] * y);
        comp2.push(m[1][0] * x + m[1][1] * y);
    }
    SpinorField::new(fields.grid().clone(), comp1, comp2)
}
