//! Gap eigenvalues straight from the 2x2 discretizations, with artifact
//! filtering.
//!
//! The central-difference reduced operator splits into two invariant
//! sectors (see `transform::reduced_sectors`), and every bound state shows up
//! once in each, the two copies differing by `O(h^2)`. The gauge-covariant
//! Lax matrix is its exact conjugate and inherits the same pairing, detected
//! through the sign of the conjugated sector operator. A candidate counts as
//! genuine when it is paired, moves by less than `DRIFT_FACTOR h^2` when the
//! grid is refined, and keeps less than `OUTER_MASS_LIMIT` of its mass in the
//! outer `OUTER_FRACTION` of the domain.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolve::eig_interval;
use crate::error::Result;
use crate::grid::Grid;
use crate::potential::{riemann_invariants, PotentialSpec, RiemannFields};
use crate::transform::{
    lax_operator_from_fields, reduced_sectors, OperatorMatrix, SpinorField, Stencil,
};

pub const OUTER_FRACTION: f64 = 0.1;
pub const OUTER_MASS_LIMIT: f64 = 1e-4;
pub const DRIFT_FACTOR: f64 = 10.0;
/// Largest sector split still accepted as one eigenvalue.
pub const MAX_SPLIT: f64 = 1e-2;
/// Default absolute eigenvalue tolerance of the direct solvers.
pub const DIRECT_TOL: f64 = 1e-12;
/// Eigenvalues within this distance of `±1` are left to the essential spectrum.
const EDGE_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectOperator {
    /// `[[-u_-, i d], [i d, -u_+]]`, solved sector by sector.
    Reduced,
    /// `[[i d, -i q], [i conj(q), -i d]]`, solved as a 2x2 block matrix.
    Lax(Stencil),
}

/// One gap eigenvalue of a fixed-grid matrix, possibly merged from two sectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCandidate {
    /// Mean of the sector copies.
    pub lambda: f64,
    /// Eigenvalues of the individual copies.
    pub copies: Vec<f64>,
    /// Distance between the two copies; `None` if unpaired or not applicable.
    pub split: Option<f64>,
    pub outer_mass: f64,
    /// Largest `||H v - lambda v||` over the copies (unit `v`).
    pub residual: f64,
    pub spinors: Vec<SpinorField>,
}

impl GapCandidate {
    /// `(|psi_1|, |psi_2|)` per node, root-mean-square over the copies.
    pub fn magnitude_profile(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.spinors[0].grid().n_points();
        let k = self.spinors.len() as f64;
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        for s in &self.spinors {
            let norm = s.l2_norm_sq().sqrt().max(f64::MIN_POSITIVE);
            for j in 0..n {
                a[j] += (s.comp1()[j] / norm).norm_sqr() / k;
                b[j] += (s.comp2()[j] / norm).norm_sqr() / k;
            }
        }
        (
            a.into_iter().map(f64::sqrt).collect(),
            b.into_iter().map(f64::sqrt).collect(),
        )
    }
}

/// Pairs elements of `a` and `b` that are each other's nearest neighbour
/// within `MAX_SPLIT`; returns `(i, Some(j))` or `(i, None)` for `a`, plus the
/// unpaired indices of `b`.
fn mutual_nearest(a: &[f64], b: &[f64]) -> (Vec<(usize, Option<usize>)>, Vec<usize>) {
    let nearest = |x: f64, ys: &[f64]| {
        ys.iter()
            .enumerate()
            .min_by(|p, q| (p.1 - x).abs().total_cmp(&(q.1 - x).abs()))
            .map(|(i, _)| i)
    };
    let mut used = vec![false; b.len()];
    let mut out = Vec::with_capacity(a.len());
    for (i, &x) in a.iter().enumerate() {
        let partner = nearest(x, b).filter(|&j| {
            nearest(b[j], a) == Some(i) && (b[j] - x).abs() <= MAX_SPLIT
        });
        if let Some(j) = partner {
            used[j] = true;
        }
        out.push((i, partner));
    }
    let rest = (0..b.len()).filter(|&j| !used[j]).collect();
    (out, rest)
}

fn merge(
    a: Vec<(f64, SpinorField, f64)>,
    b: Vec<(f64, SpinorField, f64)>,
) -> Vec<GapCandidate> {
    let av: Vec<f64> = a.iter().map(|x| x.0).collect();
    let bv: Vec<f64> = b.iter().map(|x| x.0).collect();
    let (pairs, rest) = mutual_nearest(&av, &bv);
    let mut out = Vec::with_capacity(a.len() + rest.len());
    let single = |(l, s, r): &(f64, SpinorField, f64)| GapCandidate {
        lambda: *l,
        copies: vec![*l],
        split: None,
        outer_mass: s.outer_mass_fraction(OUTER_FRACTION),
        residual: *r,
        spinors: vec![s.clone()],
    };
    for (i, partner) in pairs {
        match partner {
            Some(j) => {
                let (la, sa, ra) = &a[i];
                let (lb, sb, rb) = &b[j];
                out.push(GapCandidate {
                    lambda: 0.5 * (la + lb),
                    copies: vec![*la, *lb],
                    split: Some((la - lb).abs()),
                    outer_mass: 0.5
                        * (sa.outer_mass_fraction(OUTER_FRACTION)
                            + sb.outer_mass_fraction(OUTER_FRACTION)),
                    residual: ra.max(*rb),
                    spinors: vec![sa.clone(), sb.clone()],
                });
            }
            None => out.push(single(&a[i])),
        }
    }
    out.extend(rest.iter().map(|&j| single(&b[j])));
    out.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
    out
}

fn residual_of(m: &OperatorMatrix, lambda: f64, v: &[Complex64]) -> f64 {
    let hv = m.matrix.matvec(v);
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
        / norm.max(f64::MIN_POSITIVE)
}

/// Raw gap eigenvalues of the reduced operator (both sectors), ascending.
pub fn reduced_gap_values(fields: &RiemannFields, tol: f64) -> Result<Vec<f64>> {
    let mut v = Vec::new();
    for s in reduced_sectors(fields)? {
        v.extend(
            eig_interval(&s.matrix, -1.0 + EDGE_MARGIN, 1.0 - EDGE_MARGIN, tol)?
                .into_iter()
                .map(|p| p.0),
        );
    }
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Gap candidates of the reduced operator on one grid.
pub fn reduced_gap_candidates(fields: &RiemannFields, tol: f64) -> Result<Vec<GapCandidate>> {
    let reduced = crate::transform::assemble_reduced_operator(fields)?;
    let mut per_sector = Vec::with_capacity(2);
    for s in reduced_sectors(fields)? {
        let mut list = Vec::new();
        for (lambda, w) in eig_interval(&s.matrix, -1.0 + EDGE_MARGIN, 1.0 - EDGE_MARGIN, tol)? {
            let spinor = s.spinor(&w)?;
            let r = residual_of(&reduced, lambda, &spinor.interior_interleaved());
            list.push((lambda, spinor, r));
        }
        per_sector.push(list);
    }
    let b = per_sector.pop().unwrap_or_default();
    let a = per_sector.pop().unwrap_or_default();
    Ok(merge(a, b))
}

/// Raw gap eigenvalues of the Lax matrix, ascending.
pub fn lax_gap_values(fields: &RiemannFields, stencil: Stencil, tol: f64) -> Result<Vec<f64>> {
    let m = lax_operator_from_fields(fields, stencil)?;
    Ok(m.matrix
        .eigs_in(-1.0 + EDGE_MARGIN, 1.0 - EDGE_MARGIN, tol)?
        .into_iter()
        .map(|p| p.0)
        .collect())
}

/// `<v, G v>` for the conjugated sector operator
/// `G_j = (-1)^j [[0, -i e^{i phi_j}], [i e^{-i phi_j}, 0]]` (interior nodes).
fn lax_sector_sign(phase: &[f64], v: &[Complex64]) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    let mut acc = 0.0;
    for (b, chunk) in v.chunks(2).enumerate() {
        let node = b + 1;
        let sign = if node % 2 == 0 { 1.0 } else { -1.0 };
        let e = Complex64::from_polar(1.0, phase[node]);
        let g1 = -i * e * chunk[1];
        let g2 = i * e.conj() * chunk[0];
        acc += sign * (chunk[0].conj() * g1 + chunk[1].conj() * g2).re;
    }
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    acc / norm.max(f64::MIN_POSITIVE)
}

/// Gap candidates of the Lax matrix on one grid. For the gauge-covariant
/// stencil the eigenvectors are split by sector sign and paired; the naive
/// stencil has no such structure and each eigenvalue stands alone.
pub fn lax_gap_candidates(fields: &RiemannFields, stencil: Stencil, tol: f64) -> Result<Vec<GapCandidate>> {
    let m = lax_operator_from_fields(fields, stencil)?;
    let grid = fields.grid();
    let phase = fields.phase();
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (lambda, v) in m.matrix.eigs_in(-1.0 + EDGE_MARGIN, 1.0 - EDGE_MARGIN, tol)? {
        let r = residual_of(&m, lambda, &v);
        let spinor = SpinorField::from_interior_interleaved(grid, &v)?;
        let s = lax_sector_sign(&phase, &v);
        if stencil == Stencil::GaugeCovariant && s < 0.0 {
            minus.push((lambda, spinor, r));
        } else {
            plus.push((lambda, spinor, r));
        }
    }
    if stencil == Stencil::NaiveCentral {
        let mut out: Vec<GapCandidate> = plus
            .into_iter()
            .map(|(l, s, r)| GapCandidate {
                lambda: l,
                copies: vec![l],
                split: None,
                outer_mass: s.outer_mass_fraction(OUTER_FRACTION),
                residual: r,
                spinors: vec![s],
            })
            .collect();
        out.sort_by(|p, q| p.lambda.total_cmp(&q.lambda));
        return Ok(out);
    }
    Ok(merge(plus, minus))
}

/// Candidate plus its refinement and localization verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredEigenvalue {
    pub candidate: GapCandidate,
    /// `|lambda_h - lambda_{h/2}|` to the nearest refined candidate.
    pub drift: Option<f64>,
    pub drift_limit: f64,
    pub paired: bool,
    pub localized: bool,
    pub persistent: bool,
}

impl FilteredEigenvalue {
    pub fn genuine(&self) -> bool {
        self.paired && self.localized && self.persistent
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectSpectrum {
    pub operator: DirectOperator,
    pub grid: Grid,
    pub entries: Vec<FilteredEigenvalue>,
}

impl DirectSpectrum {
    /// Genuine eigenvalues, ascending.
    pub fn genuine(&self) -> Vec<&FilteredEigenvalue> {
        self.entries.iter().filter(|e| e.genuine()).collect()
    }

    pub fn genuine_values(&self) -> Vec<f64> {
        self.genuine().iter().map(|e| e.candidate.lambda).collect()
    }
}

fn candidates(fields: &RiemannFields, operator: DirectOperator, tol: f64) -> Result<Vec<GapCandidate>> {
    match operator {
        DirectOperator::Reduced => reduced_gap_candidates(fields, tol),
        DirectOperator::Lax(stencil) => lax_gap_candidates(fields, stencil, tol),
    }
}

/// Filtered gap eigenvalues of `spec` on `grid`, using `grid.refined()` for the
/// persistence test.
pub fn direct_gap_spectrum(
    spec: &PotentialSpec,
    grid: &Grid,
    operator: DirectOperator,
    tol: f64,
) -> Result<DirectSpectrum> {
    let coarse = candidates(&riemann_invariants(spec, grid)?, operator, tol)?;
    let fine = candidates(&riemann_invariants(spec, &grid.refined())?, operator, tol)?;
    let h = grid.spacing();
    let drift_limit = DRIFT_FACTOR * h * h;
    let needs_pair = operator != DirectOperator::Lax(Stencil::NaiveCentral);
    let entries = coarse
        .into_iter()
        .map(|c| {
            let drift = fine
                .iter()
                .map(|f| (f.lambda - c.lambda).abs())
                .min_by(f64::total_cmp);
            FilteredEigenvalue {
                paired: !needs_pair || c.split.is_some(),
                localized: c.outer_mass < OUTER_MASS_LIMIT,
                persistent: drift.is_some_and(|d| d < drift_limit),
                drift,
                drift_limit,
                candidate: c,
            }
        })
        .collect();
    Ok(DirectSpectrum {
        operator,
        grid: grid.clone(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mutual_nearest_pairs_and_leftovers() {
        let (p, rest) = mutual_nearest(&[-0.5, 0.1, 0.3], &[-0.5001, 0.30001, 0.9]);
        assert_eq!(p, vec![(0, Some(0)), (1, None), (2, Some(1))]);
        assert_eq!(rest, vec![2]);
    }

    #[test]
    fn free_potential_has_no_candidates() {
        let g = Grid::new(10.0, 201).unwrap();
        let f = RiemannFields::free(&g);
        assert!(reduced_gap_candidates(&f, DIRECT_TOL).unwrap().is_empty());
        assert!(lax_gap_candidates(&f, Stencil::GaugeCovariant, DIRECT_TOL).unwrap().is_empty());
    }

    #[test]
    fn dark_soliton_coarse_grid() {
        let g = Grid::new(20.0, 1001).unwrap();
        let spec = PotentialSpec::DarkSoliton { eps: 0.6 };
        let s = direct_gap_spectrum(&spec, &g, DirectOperator::Reduced, DIRECT_TOL).unwrap();
        let v = s.genuine_values();
        assert_eq!(v.len(), 1, "{:?}", s.entries);
        assert!((v[0] + 0.8).abs() < 5e-3, "{v:?}");
        let e = &s.genuine()[0];
        assert!(e.candidate.split.unwrap() < 1e-2);
        assert!(e.candidate.residual < 1e-8);
    }

    #[test]
    fn lax_and_reduced_raw_values_agree() {
        let g = Grid::new(15.0, 301).unwrap();
        let f = riemann_invariants(&PotentialSpec::DarkSoliton { eps: 0.7 }, &g).unwrap();
        let a = reduced_gap_values(&f, DIRECT_TOL).unwrap();
        let b = lax_gap_values(&f, Stencil::GaugeCovariant, DIRECT_TOL).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn lax_candidates_pair_by_sector_sign() {
        let g = Grid::new(20.0, 1001).unwrap();
        let spec = PotentialSpec::DarkSoliton { eps: 0.6 };
        let s = direct_gap_spectrum(&spec, &g, DirectOperator::Lax(Stencil::GaugeCovariant), DIRECT_TOL)
            .unwrap();
        let v = s.genuine_values();
        assert_eq!(v.len(), 1);
        assert!((v[0] + 0.8).abs() < 5e-3);
    }

    #[test]
    fn naive_lax_stencil_keeps_a_mirror_artifact() {
        let g = Grid::new(20.0, 1001).unwrap();
        let spec = PotentialSpec::DarkSoliton { eps: 0.6 };
        let s = direct_gap_spectrum(&spec, &g, DirectOperator::Lax(Stencil::NaiveCentral), DIRECT_TOL)
            .unwrap();
        let v = s.genuine_values();
        assert!(v.iter().any(|l| (l + 0.8).abs() < 5e-3), "{v:?}");
        assert!(v.iter().any(|l| (l - 0.8).abs() < 5e-3), "{v:?}");
    }
}
