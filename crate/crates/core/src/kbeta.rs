//! Negative eigenvalues `mu_j(beta)` of `K_beta = (-d^2/dx^2 + beta)^{-1} V`,
//! computed as the pencil `V u = mu (-D^2 + beta) u`.

use serde::Serialize;

use crate::discretize::{laplacian_plus_beta_with, Boundary};
use crate::eigensolve::{gen_negative_eig_value, gen_negative_eigs, GenEigProblem};
use crate::error::{check_finite, Error, Result};
use crate::grid::Grid;
use crate::potential::part_norms;

/// Eigenvalues with `|mu|` at or below this are treated as discretization noise.
pub const NOISE_FLOOR: f64 = 1e-9;

/// Default number of tracked indices.
pub const DEFAULT_J_MAX: usize = 8;

/// Smallest probe in the `beta -> 0+` certification.
pub const DEFAULT_BETA_MIN: f64 = 1e-5;

/// Half-width of the "too close to -1/2 to call" band around the threshold.
pub const BOUNDARY_BAND: f64 = 1e-3;

/// `K_beta` for one potential on one grid, as a function of `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct KBetaOperator {
    grid: Grid,
    potential: Vec<f64>,
    boundary: Boundary,
    sup_norm: f64,
    negative_part: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KBetaSpectrum {
    pub beta: f64,
    /// Ascending, i.e. `|mu|` non-increasing.
    pub mus: Vec<f64>,
    /// Node values on the full grid (zero at Dirichlet ends), normalized so that
    /// `||u'||^2 + beta ||u||^2 = 1` in the discrete inner product.
    pub vectors: Vec<Vec<f64>>,
    pub grid: Grid,
}

impl KBetaOperator {
    pub fn new(potential: Vec<f64>, grid: &Grid, boundary: Boundary) -> Result<Self> {
        if potential.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "potential has {} samples, grid has {} nodes",
                potential.len(),
                grid.n_points()
            )));
        }
        check_finite("V", &potential)?;
        let (pos, neg) = part_norms(&potential)?;
        Ok(Self {
            grid: grid.clone(),
            potential,
            boundary,
            sup_norm: pos.max(neg),
            negative_part: neg,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// `||V||_inf`.
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// `||V^(-)||_inf`.
    pub fn negative_part(&self) -> f64 {
        self.negative_part
    }

    pub fn problem(&self, beta: f64) -> Result<GenEigProblem> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
        }
        let a = laplacian_plus_beta_with(&self.grid, beta, self.boundary)?;
        let b = self.potential[self.boundary.unknowns(&self.grid)].to_vec();
        GenEigProblem::new(a, b)
    }

    /// Number of `mu_j(beta) < -NOISE_FLOOR`.
    pub fn negative_count(&self, beta: f64) -> Result<usize> {
        Ok(self.problem(beta)?.count_below(-NOISE_FLOOR))
    }

    /// Number of `mu_j(beta) < threshold`.
    pub fn count_below(&self, beta: f64, threshold: f64) -> Result<usize> {
        Ok(self.problem(beta)?.count_below(threshold))
    }

    /// `mu_j(beta)` (1-based `j`) without eigenvectors.
    pub fn mu(&self, j: usize, beta: f64) -> Result<f64> {
        if j == 0 {
            return Err(Error::InvalidArgument("eigenvalue indices start at 1".into()));
        }
        let p = self.problem(beta)?;
        let available = p.count_below(-NOISE_FLOOR);
        if j > available {
            return Err(Error::IndexUnavailable { j, available });
        }
        gen_negative_eig_value(&p, j - 1)
    }

    pub fn spectrum(&self, beta: f64, j_max: usize, tol: f64) -> Result<KBetaSpectrum> {
        let p = self.problem(beta)?;
        let pairs = gen_negative_eigs(&p, j_max, tol)?;
        let scale = 1.0 / self.grid.spacing().sqrt();
        let range = self.boundary.unknowns(&self.grid);
        let mut mus = Vec::with_capacity(pairs.len());
        let mut vectors = Vec::with_capacity(pairs.len());
        for (mu, u) in pairs.into_iter().filter(|(mu, _)| *mu < -NOISE_FLOOR) {
            let mut full = vec![0.0; self.grid.n_points()];
            full[range.clone()]
                .iter_mut()
                .zip(&u)
                .for_each(|(f, v)| *f = v * scale);
            mus.push(mu);
            vectors.push(full);
        }
        Ok(KBetaSpectrum {
            beta,
            mus,
            vectors,
            grid: self.grid.clone(),
        })
    }
}

/// Negative spectrum of `K_beta` with the transparent exterior condition
/// (exact when `V` vanishes outside the grid).
pub fn kbeta_spectrum(v: &[f64], grid: &Grid, beta: f64, j_max: usize) -> Result<KBetaSpectrum> {
    KBetaOperator::new(v.to_vec(), grid, Boundary::Transparent)?.spectrum(
        beta,
        j_max,
        crate::eigensolve::DEFAULT_RESIDUAL_TOL,
    )
}

/// One adjacent-probe Lipschitz comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzCheck {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub delta: f64,
    /// `||V|| |beta_hi - beta_lo| / (beta_lo beta_hi)`, valid for every pair.
    pub bound: f64,
    /// `(2 ||V|| / beta_lo) |beta_hi - beta_lo|`, the simplified constant; it
    /// dominates `bound` only when `beta_hi >= 1/2`.
    pub simplified_bound: f64,
}

impl LipschitzCheck {
    pub fn holds(&self) -> bool {
        self.delta <= self.bound * (1.0 + 1e-12)
    }

    pub fn holds_simplified(&self) -> bool {
        self.delta <= self.simplified_bound * (1.0 + 1e-12)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuCurve {
    pub j: usize,
    pub betas: Vec<f64>,
    /// `mu_j` at `betas[..values.len()]`.
    pub values: Vec<f64>,
    /// Index of the first probe where `j` exceeds the number of negative eigenvalues.
    pub truncated_at: Option<usize>,
    pub lipschitz: Vec<LipschitzCheck>,
}

/// `mu_j` along strictly increasing `betas`; errors if the computed values are
/// not strictly increasing.
pub fn mu_curve(op: &KBetaOperator, j: usize, betas: &[f64]) -> Result<MuCurve> {
    if betas.is_empty() {
        return Err(Error::Empty("beta probes"));
    }
    if let Some(w) = betas.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(format!(
            "betas must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let mut values = Vec::with_capacity(betas.len());
    let mut truncated_at = None;
    for (i, &beta) in betas.iter().enumerate() {
        match op.mu(j, beta) {
            Ok(mu) => values.push(mu),
            Err(Error::IndexUnavailable { .. }) => {
                truncated_at = Some(i);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let mut lipschitz = Vec::with_capacity(values.len().saturating_sub(1));
    for i in 1..values.len() {
        if !(values[i] > values[i - 1]) {
            return Err(Error::NotMonotone(format!(
                "mu_{j}({}) = {} is not above mu_{j}({}) = {}",
                betas[i],
                values[i],
                betas[i - 1],
                values[i - 1]
            )));
        }
        let (lo, hi) = (betas[i - 1], betas[i]);
        lipschitz.push(LipschitzCheck {
            beta_lo: lo,
            beta_hi: hi,
            delta: values[i] - values[i - 1],
            bound: op.sup_norm() * (hi - lo) / (lo * hi),
            simplified_bound: 2.0 * op.sup_norm() / lo * (hi - lo),
        });
    }
    Ok(MuCurve {
        j,
        betas: betas.to_vec(),
        values,
        truncated_at,
        lipschitz,
    })
}

/// `n` points geometrically spaced from `lo` to `hi` inclusive.
pub fn geometric_betas(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
    let mut v: Vec<f64> = (0..n).map(|i| lo * ratio.powi(i as i32)).collect();
    v[n - 1] = hi;
    v
}

/// Per-index evidence for membership in the set `{j : mu_j(0+) < -1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NZeroEntry {
    pub j: usize,
    /// `mu_j` at the smallest probe.
    pub mu_at_beta_min: f64,
    /// Linear extrapolation in `sqrt(beta)` from the two smallest probes.
    pub mu_extrapolated: f64,
    /// Some probe has `mu_j < -1/2`, which by monotonicity proves membership.
    pub certified: bool,
    /// Not certified and the extrapolation lies within `BOUNDARY_BAND` of `-1/2`.
    pub boundary_uncertain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NZeroReport {
    /// Certified indices (a prefix `1..=m`).
    pub indices: Vec<usize>,
    pub entries: Vec<NZeroEntry>,
    /// Probes in decreasing order.
    pub beta_sequence: Vec<f64>,
}

/// Decreasing probes `0.5, 0.25, ...` down to `beta_min`, which is always included.
pub fn probe_sequence(beta_min: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut b = 0.5;
    while b > beta_min * (1.0 + 1e-12) {
        v.push(b);
        b *= 0.5;
    }
    v.push(beta_min);
    v
}

/// Certifies `j` for `j <= j_max` by `mu_j(beta) < -1/2` at some probe.
pub fn n_zero_set(op: &KBetaOperator, j_max: usize, beta_min: f64) -> Result<NZeroReport> {
    if !(beta_min > 0.0 && beta_min < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "beta_min must lie in (0, 0.5), got {beta_min}"
        )));
    }
    let betas = probe_sequence(beta_min);
    // mu_j is increasing in beta, so the count below -1/2 is largest at beta_min.
    let certified = op.count_below(beta_min, -0.5)?.min(j_max);
    let (b_prev, b_last) = (betas[betas.len() - 2], betas[betas.len() - 1]);
    let available = op.negative_count(b_last)?.min(j_max);
    let mut entries = Vec::with_capacity(available);
    for j in 1..=available {
        let m_last = op.mu(j, b_last)?;
        let m_prev = op.mu(j, b_prev).unwrap_or(0.0);
        let (s_prev, s_last) = (b_prev.sqrt(), b_last.sqrt());
        let extrapolated = m_last - (m_prev - m_last) * s_last / (s_prev - s_last);
        let is_certified = j <= certified;
        entries.push(NZeroEntry {
            j,
            mu_at_beta_min: m_last,
            mu_extrapolated: extrapolated,
            certified: is_certified,
            boundary_uncertain: !is_certified && (extrapolated + 0.5).abs() < BOUNDARY_BAND,
        });
    }
    Ok(NZeroReport {
        indices: (1..=certified).collect(),
        entries,
        beta_sequence: betas,
    })
}

/// `beta,j,mu` rows for every probe and available index.
pub fn sweep_csv(op: &KBetaOperator, betas: &[f64], j_max: usize) -> Result<String> {
    let mut out = String::from("beta,j,mu\n");
    for &beta in betas {
        let p = op.problem(beta)?;
        let count = p.count_below(-NOISE_FLOOR).min(j_max);
        for k in 0..count {
            let mu = gen_negative_eig_value(&p, k)?;
            out.push_str(&format!("{beta:e},{},{mu:e}\n", k + 1));
        }
    }
    Ok(out)
}
