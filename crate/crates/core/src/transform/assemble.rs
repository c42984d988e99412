use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolve::{Block, HermitianBlockTridiag, SymTridiag};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::potential::{riemann_invariants, PotentialSpec, RiemannFields};

/// Smallest accepted number of grid points for the 2x2 assemblies.
pub const MIN_POINTS: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorLabel {
    /// `[[i d, -i q], [i conj(q), -i d]]`.
    Lax,
    /// `[[-u_-, i d], [i d, -u_+]]`.
    Reduced,
}

/// First-derivative discretization for the Lax operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    /// Central differences with phase links `e^{∓i(phi_{j+1}-phi_j)/2}` and a
    /// `-phi'/2` diagonal shift: the exact pointwise conjugate of the
    /// central-difference reduced operator.
    #[default]
    GaugeCovariant,
    /// Plain central differences `(psi_{j+1} - psi_{j-1}) / 2h`. Its gap
    /// spectrum is exactly symmetric about zero, so every bound state comes
    /// with a mirror artifact at `-lambda`.
    NaiveCentral,
}

/// Hermitian block-tridiagonal matrix over the interior nodes (Dirichlet
/// truncation), unknowns interleaved as `(psi_1, psi_2)` per node.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub label: OperatorLabel,
    pub grid: Grid,
    pub matrix: HermitianBlockTridiag,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Half-bandwidth in the interleaved ordering.
    pub fn bandwidth(&self) -> usize {
        3
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.matrix.hermiticity_residual()
    }

    /// `row col re im` lines for every nonzero entry (0-based indices).
    pub fn to_triplets(&self) -> String {
        let n = self.dim();
        let mut out = String::new();
        for r in 0..n {
            let lo = (r / 2).saturating_sub(1) * 2;
            let hi = ((r / 2 + 2) * 2).min(n);
            for c in lo..hi {
                let v = self.matrix.entry(r, c);
                if v != ZERO {
                    let _ = writeln!(out, "{r} {c} {:e} {:e}", v.re, v.im);
                }
            }
        }
        out
    }
}

fn check_size(grid: &Grid) -> Result<()> {
    if grid.n_points() < MIN_POINTS {
        return Err(Error::InvalidGrid(format!(
            "2x2 operator assembly needs at least {MIN_POINTS} points, got {}",
            grid.n_points()
        )));
    }
    Ok(())
}

/// Central-difference reduced operator `[[-u_-, i d], [i d, -u_+]]`.
pub fn assemble_reduced_operator(fields: &RiemannFields) -> Result<OperatorMatrix> {
    let grid = fields.grid();
    check_size(grid)?;
    let n = grid.n_points();
    let link = Complex64::new(0.0, 0.5 / grid.spacing());
    let diag = (1..n - 1)
        .map(|j| {
            [
                [Complex64::new(-fields.u_minus()[j], 0.0), ZERO],
                [ZERO, Complex64::new(-fields.u_plus()[j], 0.0)],
            ]
        })
        .collect();
    let upper = vec![[[ZERO, link], [link, ZERO]]; n - 3];
    Ok(OperatorMatrix {
        label: OperatorLabel::Reduced,
        grid: grid.clone(),
        matrix: HermitianBlockTridiag::new(diag, upper)?,
    })
}

/// Lax operator assembled from the samples of `spec` on `grid`.
pub fn assemble_lax_operator(spec: &PotentialSpec, grid: &Grid, stencil: Stencil) -> Result<OperatorMatrix> {
    check_size(grid)?;
    let fields = riemann_invariants(spec, grid)?;
    lax_operator_from_fields(&fields, stencil)
}

/// Lax operator with `q_j = |q_j| e^{i phi_j}`, `phi` integrated from the phase velocity.
pub fn lax_operator_from_fields(fields: &RiemannFields, stencil: Stencil) -> Result<OperatorMatrix> {
    let grid = fields.grid();
    check_size(grid)?;
    let n = grid.n_points();
    let amplitude = fields.amplitude();
    let velocity = fields.velocity();
    let phase = fields.phase();
    let inv_2h = 0.5 / grid.spacing();
    let i = Complex64::new(0.0, 1.0);
    let diag: Vec<Block> = (1..n - 1)
        .map(|j| {
            let q = Complex64::from_polar(amplitude[j], phase[j]);
            let shift = match stencil {
                Stencil::GaugeCovariant => -0.5 * velocity[j],
                Stencil::NaiveCentral => 0.0,
            };
            [
                [Complex64::new(shift, 0.0), -i * q],
                [i * q.conj(), Complex64::new(shift, 0.0)],
            ]
        })
        .collect();
    let upper: Vec<Block> = (1..n - 2)
        .map(|j| {
            let half = match stencil {
                Stencil::GaugeCovariant => 0.5 * (phase[j + 1] - phase[j]),
                Stencil::NaiveCentral => 0.0,
            };
            [
                [i * inv_2h * Complex64::from_polar(1.0, -half), ZERO],
                [ZERO, -i * inv_2h * Complex64::from_polar(1.0, half)],
            ]
        })
        .collect();
    Ok(OperatorMatrix {
        label: OperatorLabel::Lax,
        grid: grid.clone(),
        matrix: HermitianBlockTridiag::new(diag, upper)?,
    })
}

/// Invariant subspaces of the central-difference reduced operator: the
/// first component on even nodes with the second on odd nodes, or the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chirality {
    /// First component on even grid nodes.
    Even,
    /// First component on odd grid nodes.
    Odd,
}

/// One invariant sector of the reduced operator as a real symmetric
/// tridiagonal matrix over the interior nodes, after the diagonal phase
/// change `c_k = (-i)^k w_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralSector {
    pub chirality: Chirality,
    pub grid: Grid,
    pub matrix: SymTridiag,
}

impl ChiralSector {
    fn carries_first(&self, node: usize) -> bool {
        match self.chirality {
            Chirality::Even => node % 2 == 0,
            Chirality::Odd => node % 2 == 1,
        }
    }

    /// Spinor of a real sector eigenvector `w`.
    pub fn spinor(&self, w: &[f64]) -> Result<super::SpinorField> {
        let n = self.grid.n_points();
        if w.len() != n - 2 {
            return Err(Error::GridMismatch(format!(
                "sector vector has {} entries, expected {}",
                w.len(),
                n - 2
            )));
        }
        let mut comp1 = vec![ZERO; n];
        let mut comp2 = vec![ZERO; n];
        let phases = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for (k, &v) in w.iter().enumerate() {
            let node = k + 1;
            let c = phases[k % 4] * v;
            if self.carries_first(node) {
                comp1[node] = c;
            } else {
                comp2[node] = c;
            }
        }
        super::SpinorField::new(self.grid.clone(), comp1, comp2)
    }
}

/// The two invariant sectors whose spectra together make up the spectrum
/// of `assemble_reduced_operator(fields)`.
pub fn reduced_sectors(fields: &RiemannFields) -> Result<[ChiralSector; 2]> {
    let grid = fields.grid();
    check_size(grid)?;
    let n = grid.n_points();
    let off = vec![0.5 / grid.spacing(); n - 3];
    let build = |chirality: Chirality| -> Result<ChiralSector> {
        let diag = (1..n - 1)
            .map(|node| {
                let first = match chirality {
                    Chirality::Even => node % 2 == 0,
                    Chirality::Odd => node % 2 == 1,
                };
                if first {
                    -fields.u_minus()[node]
                } else {
                    -fields.u_plus()[node]
                }
            })
            .collect();
        Ok(ChiralSector {
            chirality,
            grid: grid.clone(),
            matrix: SymTridiag::new(diag, off.clone())?,
        })
    };
    Ok([build(Chirality::Even)?, build(Chirality::Odd)?])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::{block_adjoint, block_mul};
    use crate::transform::m_matrix_at;
    use nalgebra::DMatrix;

    fn dense_eigs(m: &OperatorMatrix) -> Vec<f64> {
        let n = m.dim();
        let d = m.matrix.to_dense();
        let mat = DMatrix::from_fn(n, n, |r, c| d[r * n + c]);
        let mut v: Vec<f64> = mat.symmetric_eigen().eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn test_fields(n: usize) -> RiemannFields {
        let g = Grid::new(6.0, n).unwrap();
        riemann_invariants(&PotentialSpec::DarkSoliton { eps: 0.6 }, &g).unwrap()
    }

    #[test]
    fn rejects_small_grids() {
        let g = Grid::new(1.0, 15).unwrap();
        let f = RiemannFields::free(&g);
        assert!(matches!(assemble_reduced_operator(&f), Err(Error::InvalidGrid(_))));
        assert!(lax_operator_from_fields(&f, Stencil::GaugeCovariant).is_err());
    }

    #[test]
    fn assemblies_are_hermitian() {
        let f = test_fields(64);
        assert!(assemble_reduced_operator(&f).unwrap().hermiticity_residual() < 1e-13);
        for s in [Stencil::GaugeCovariant, Stencil::NaiveCentral] {
            assert!(lax_operator_from_fields(&f, s).unwrap().hermiticity_residual() < 1e-13);
        }
    }

    #[test]
    fn lax_is_pointwise_conjugate_of_reduced() {
        let f = test_fields(40);
        let lax = lax_operator_from_fields(&f, Stencil::GaugeCovariant).unwrap();
        let red = assemble_reduced_operator(&f).unwrap();
        let phase = f.phase();
        let m: Vec<Block> = (1..39).map(|j| m_matrix_at(phase[j])).collect();
        for b in 0..38 {
            let d = block_mul(&m[b], &block_mul(&lax.matrix.diag_blocks()[b], &block_adjoint(&m[b])));
            let e = red.matrix.diag_blocks()[b];
            for r in 0..2 {
                for c in 0..2 {
                    assert!((d[r][c] - e[r][c]).norm() < 1e-12, "diag {b}");
                }
            }
            if b + 1 < 38 {
                let u = block_mul(
                    &m[b],
                    &block_mul(&lax.matrix.upper_blocks()[b], &block_adjoint(&m[b + 1])),
                );
                let e = red.matrix.upper_blocks()[b];
                for r in 0..2 {
                    for c in 0..2 {
                        assert!((u[r][c] - e[r][c]).norm() < 1e-12, "upper {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn sectors_reproduce_reduced_spectrum() {
        let f = test_fields(33);
        let full = dense_eigs(&assemble_reduced_operator(&f).unwrap());
        let [a, b] = reduced_sectors(&f).unwrap();
        let mut union: Vec<f64> = Vec::new();
        for s in [&a, &b] {
            let n = s.matrix.dim();
            let mut m = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = s.matrix.diag()[i];
                if i + 1 < n {
                    m[(i, i + 1)] = s.matrix.offdiag()[i];
                    m[(i + 1, i)] = s.matrix.offdiag()[i];
                }
            }
            union.extend(m.symmetric_eigen().eigenvalues.iter());
        }
        union.sort_by(f64::total_cmp);
        for (x, y) in full.iter().zip(&union) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn sector_eigenvector_maps_to_reduced_eigenvector() {
        let f = test_fields(65);
        let red = assemble_reduced_operator(&f).unwrap();
        for s in reduced_sectors(&f).unwrap() {
            let pairs = crate::eigensolve::eig_interval(&s.matrix, -0.99, 0.99, 1e-13).unwrap();
            assert!(!pairs.is_empty());
            for (lambda, w) in pairs {
                let psi = s.spinor(&w).unwrap();
                let v = psi.interior_interleaved();
                let hv = red.matrix.matvec(&v);
                let res: f64 = hv.iter().zip(&v).map(|(a, b)| (a - lambda * b).norm_sqr()).sum();
                assert!(res.sqrt() < 1e-8, "residual {}", res.sqrt());
            }
        }
    }

    #[test]
    fn free_reduced_operator_has_empty_gap() {
        let g = Grid::new(5.0, 64).unwrap();
        let e = dense_eigs(&assemble_reduced_operator(&RiemannFields::free(&g)).unwrap());
        assert!(e.iter().all(|l| l.abs() >= 1.0 - 1e-12));
    }

    #[test]
    fn free_lax_operator_has_empty_gap_for_both_stencils() {
        let g = Grid::new(5.0, 64).unwrap();
        for s in [Stencil::GaugeCovariant, Stencil::NaiveCentral] {
            let e = dense_eigs(&assemble_lax_operator(&PotentialSpec::free(), &g, s).unwrap());
            assert!(e.iter().all(|l| l.abs() >= 1.0 - 1e-12), "{s:?}");
        }
    }

    #[test]
    fn naive_stencil_spectrum_is_symmetric() {
        let f = test_fields(48);
        let e = dense_eigs(&lax_operator_from_fields(&f, Stencil::NaiveCentral).unwrap());
        let n = e.len();
        for k in 0..n {
            assert!((e[k] + e[n - 1 - k]).abs() < 1e-10);
        }
    }

    #[test]
    fn triplet_export_lists_nonzeros() {
        let g = Grid::new(5.0, 16).unwrap();
        let m = assemble_reduced_operator(&RiemannFields::free(&g)).unwrap();
        let t = m.to_triplets();
        // 28 diagonal entries plus 2 per coupling in each direction
        assert_eq!(t.lines().count(), 28 + 4 * 13);
        assert!(t.lines().next().unwrap().starts_with("0 0 "));
    }
}
