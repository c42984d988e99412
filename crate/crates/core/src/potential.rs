//! Non-vanishing bounded potentials `q = |q| e^{i phi}` and their Riemann
//! invariants `u_± = phi'/2 ± |q|`.
//!
//! A potential is stored through its amplitude and phase gradient; the phase
//! itself is only reconstructed (by trapezoidal integration) where the
//! unitary transform needs it.
//!
//! JSON form, tagged by `family`:
//!
//! ```json
//! {"family": "dark-soliton", "eps": 0.6}
//! {"family": "square-well", "eps": 0.5}
//! {"family": "piecewise-q", "segments": [{"start": -1, "end": 1, "amplitude": 0.5, "phase": 0.3}],
//!  "background_phase": 0.0}
//! {"family": "sampled", "grid": {"half_width": 10, "n_points": 5},
//!  "amplitude": [1, 1, 0.9, 1, 1], "phase_gradient": [0, 0, 0.1, 0, 0], "phase_origin": 0.0}
//! ```
//!
//! Discontinuous families are sampled by averages over the dual cells
//! `[x_i - h/2, x_i + h/2]` (clipped to the domain), so a jump anywhere inside
//! a cell contributes its exact fraction. A phase jump becomes the cell
//! average of its derivative, `jump / h`, at the node whose cell contains it.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::grid::{Grid, GridSpec};

/// Default tolerance for the `|q| -> 1`, `phi' -> 0` boundary check.
pub const BOUNDARY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PotentialSpec {
    /// `q(x) = eps tanh(eps x) + i sqrt(1 - eps^2)`.
    DarkSoliton { eps: f64 },
    /// `u_- = -1`, `u_+ = 1 - eps` on `[0, 1]` and `1` elsewhere.
    SquareWell { eps: f64 },
    /// Piecewise constant `q = A e^{i theta}`; `q = e^{i background_phase}` off the segments.
    #[serde(rename = "piecewise-q")]
    PiecewiseConstantQ {
        segments: Vec<QSegment>,
        #[serde(default)]
        background_phase: f64,
    },
    /// Explicit node samples on a fixed grid.
    Sampled(SampledPotential),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QSegment {
    pub start: f64,
    pub end: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPotential {
    pub grid: GridSpec,
    pub amplitude: Vec<f64>,
    pub phase_gradient: Vec<f64>,
    #[serde(default)]
    pub phase_origin: f64,
}

/// Node samples of a potential.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSamples {
    pub amplitude: Vec<f64>,
    pub phase_gradient: Vec<f64>,
    /// `phi(-X)`.
    pub phase_origin: f64,
}

/// Length of `[a, b] ∩ [c, d]`.
fn overlap(a: f64, b: f64, c: f64, d: f64) -> f64 {
    (b.min(d) - a.max(c)).max(0.0)
}

/// Dual cell of node `i`, clipped to `[-X, X]`.
fn dual_cell(grid: &Grid, i: usize) -> (f64, f64) {
    let x = grid.nodes()[i];
    let h = grid.spacing();
    let lo = if i == 0 { x } else { x - 0.5 * h };
    let hi = if i + 1 == grid.n_points() { x } else { x + 0.5 * h };
    (lo, hi)
}

/// Fraction of the dual cell of node `i` covered by `[start, end]`.
fn cell_fraction(grid: &Grid, i: usize, start: f64, end: f64) -> f64 {
    let (lo, hi) = dual_cell(grid, i);
    if hi > lo {
        overlap(lo, hi, start, end) / (hi - lo)
    } else if lo > start && lo <= end {
        // degenerate end cell: left-limit value at the endpoint
        1.0
    } else {
        0.0
    }
}

impl PotentialSpec {
    /// The constant potential `q = 1`.
    pub fn free() -> Self {
        PotentialSpec::PiecewiseConstantQ {
            segments: Vec::new(),
            background_phase: 0.0,
        }
    }

    /// Parse and validate a JSON document.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: PotentialSpec =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    /// Samples `amplitude(x)` and `phase_gradient(x)` on `grid`.
    pub fn sampled_from_fn(
        grid: &Grid,
        amplitude: impl Fn(f64) -> f64,
        phase_gradient: impl Fn(f64) -> f64,
    ) -> Self {
        PotentialSpec::Sampled(SampledPotential {
            grid: grid.spec(),
            amplitude: grid.nodes().iter().map(|&x| amplitude(x)).collect(),
            phase_gradient: grid.nodes().iter().map(|&x| phase_gradient(x)).collect(),
            phase_origin: 0.0,
        })
    }

    /// Potentials with `|q| = 1 + |phi'|/2` built from a bump `b(x) >= 0`:
    /// `|q| = 1 + b`, `phi' = 2 sign b`. For `sign = +1` this gives `u_- = -1`,
    /// `u_+ = 1 + 2b`; for `sign = -1`, `u_+ = 1`, `u_- = -1 - 2b`.
    pub fn phase_locked(grid: &Grid, bump: impl Fn(f64) -> f64, sign: f64) -> Self {
        let s = sign.signum();
        Self::sampled_from_fn(grid, |x| 1.0 + bump(x).abs(), |x| 2.0 * s * bump(x).abs())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::DarkSoliton { eps } => {
                if !(eps.is_finite() && *eps > 0.0 && *eps < 1.0) {
                    return Err(Error::InvalidPotential(format!(
                        "dark-soliton eps must lie in (0,1), got {eps}"
                    )));
                }
            }
            PotentialSpec::SquareWell { eps } => {
                if !(eps.is_finite() && *eps > 0.0 && *eps <= 1.0) {
                    return Err(Error::InvalidPotential(format!(
                        "square-well eps must lie in (0,1], got {eps}"
                    )));
                }
            }
            PotentialSpec::PiecewiseConstantQ {
                segments,
                background_phase,
            } => {
                if !background_phase.is_finite() {
                    return Err(Error::InvalidPotential("background_phase is not finite".into()));
                }
                for (i, s) in segments.iter().enumerate() {
                    if !(s.start.is_finite() && s.end.is_finite() && s.start < s.end) {
                        return Err(Error::InvalidPotential(format!(
                            "segment {i}: need finite start < end"
                        )));
                    }
                    if !(s.amplitude.is_finite() && s.amplitude >= 0.0 && s.phase.is_finite()) {
                        return Err(Error::InvalidPotential(format!(
                            "segment {i}: amplitude must be finite and >= 0, phase finite"
                        )));
                    }
                    if i > 0 && segments[i - 1].end > s.start {
                        return Err(Error::InvalidPotential(format!(
                            "segment {i} overlaps or is out of order"
                        )));
                    }
                }
            }
            PotentialSpec::Sampled(s) => {
                let grid = Grid::try_from(s.grid)?;
                if s.amplitude.len() != grid.n_points() || s.phase_gradient.len() != grid.n_points()
                {
                    return Err(Error::InvalidPotential(format!(
                        "sampled arrays must have {} entries (got amplitude {}, phase_gradient {})",
                        grid.n_points(),
                        s.amplitude.len(),
                        s.phase_gradient.len()
                    )));
                }
                check_finite("amplitude", &s.amplitude)?;
                check_finite("phase_gradient", &s.phase_gradient)?;
                if !s.phase_origin.is_finite() {
                    return Err(Error::InvalidPotential("phase_origin is not finite".into()));
                }
                if let Some(i) = s.amplitude.iter().position(|&a| a < 0.0) {
                    return Err(Error::InvalidPotential(format!(
                        "amplitude must be nonnegative (index {i})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Evaluates amplitude and phase gradient at every node of `grid`. Sampled
    /// potentials accept their own grid and its refinement (linear
    /// interpolation at the new midpoints).
    pub fn sample(&self, grid: &Grid) -> Result<PotentialSamples> {
        self.validate()?;
        let nodes = grid.nodes();
        let samples = match self {
            PotentialSpec::DarkSoliton { eps } => {
                let e = *eps;
                let c = (1.0 - e * e).sqrt();
                let mut amplitude = Vec::with_capacity(nodes.len());
                let mut grad = Vec::with_capacity(nodes.len());
                for &x in nodes {
                    let sech = 1.0 / (e * x).cosh();
                    let s2 = sech * sech;
                    let rho = 1.0 - e * e * s2;
                    amplitude.push(rho.sqrt());
                    // phi' = -Im(q) Re(q)' / |q|^2 for q = a(x) + i c
                    grad.push(-c * e * e * s2 / rho);
                }
                let x0 = nodes[0];
                PotentialSamples {
                    amplitude,
                    phase_gradient: grad,
                    phase_origin: c.atan2(e * (e * x0).tanh()),
                }
            }
            PotentialSpec::SquareWell { eps } => {
                let mut amplitude = Vec::with_capacity(nodes.len());
                let mut grad = Vec::with_capacity(nodes.len());
                for i in 0..nodes.len() {
                    let u_plus = 1.0 - eps * cell_fraction(grid, i, 0.0, 1.0);
                    amplitude.push((u_plus + 1.0) / 2.0);
                    grad.push(u_plus - 1.0);
                }
                PotentialSamples {
                    amplitude,
                    phase_gradient: grad,
                    phase_origin: 0.0,
                }
            }
            PotentialSpec::PiecewiseConstantQ {
                segments,
                background_phase,
            } => {
                let phase_at = |x: f64| {
                    segments
                        .iter()
                        .find(|s| x > s.start && x <= s.end)
                        .map_or(*background_phase, |s| s.phase)
                };
                let h = grid.spacing();
                let mut amplitude = Vec::with_capacity(nodes.len());
                let mut grad = Vec::with_capacity(nodes.len());
                for i in 0..nodes.len() {
                    let covered: f64 = segments
                        .iter()
                        .map(|s| cell_fraction(grid, i, s.start, s.end))
                        .sum();
                    let inside: f64 = segments
                        .iter()
                        .map(|s| s.amplitude * cell_fraction(grid, i, s.start, s.end))
                        .sum();
                    amplitude.push(inside + (1.0 - covered).max(0.0));
                    let (lo, hi) = (nodes[i] - 0.5 * h, nodes[i] + 0.5 * h);
                    grad.push((phase_at(hi) - phase_at(lo)) / h);
                }
                PotentialSamples {
                    amplitude,
                    phase_gradient: grad,
                    phase_origin: phase_at(nodes[0]),
                }
            }
            PotentialSpec::Sampled(s) => {
                let own = Grid::try_from(s.grid)?;
                if own.refined().matches(grid) {
                    // midpoints of the refinement take the mean of their neighbours
                    let fine = |v: &[f64]| -> Vec<f64> {
                        (0..grid.n_points())
                            .map(|k| if k % 2 == 0 { v[k / 2] } else { 0.5 * (v[k / 2] + v[k / 2 + 1]) })
                            .collect()
                    };
                    PotentialSamples {
                        amplitude: fine(&s.amplitude),
                        phase_gradient: fine(&s.phase_gradient),
                        phase_origin: s.phase_origin,
                    }
                } else if !own.matches(grid) {
                    return Err(Error::GridMismatch(format!(
                        "sampled potential lives on X={}, n={}, requested X={}, n={}",
                        own.half_width(),
                        own.n_points(),
                        grid.half_width(),
                        grid.n_points()
                    )));
                } else {
                    PotentialSamples {
                        amplitude: s.amplitude.clone(),
                        phase_gradient: s.phase_gradient.clone(),
                        phase_origin: s.phase_origin,
                    }
                }
            }
        };
        check_finite("amplitude", &samples.amplitude)?;
        check_finite("phase_gradient", &samples.phase_gradient)?;
        Ok(samples)
    }

    /// `(u_+, u_-)` values attained by piecewise constant families between
    /// nodes, so sup-norms see every plateau even if no node lands on it.
    pub fn plateau_values(&self) -> Vec<(f64, f64)> {
        match self {
            PotentialSpec::SquareWell { eps } => vec![(1.0 - eps, -1.0), (1.0, -1.0)],
            PotentialSpec::PiecewiseConstantQ { segments, .. } => {
                let mut v: Vec<(f64, f64)> =
                    segments.iter().map(|s| (s.amplitude, -s.amplitude)).collect();
                v.push((1.0, -1.0));
                v
            }
            _ => Vec::new(),
        }
    }

    /// Warnings for endpoints where `|q| -> 1`, `phi' -> 0` fails by more than `tol`.
    pub fn boundary_warnings(&self, grid: &Grid, tol: f64) -> Result<Vec<String>> {
        let s = self.sample(grid)?;
        let mut out = Vec::new();
        let last = grid.n_points() - 1;
        for (name, i) in [("left", 0), ("right", last)] {
            let da = (s.amplitude[i] - 1.0).abs();
            let dg = s.phase_gradient[i].abs();
            if da > tol {
                out.push(format!("{name} endpoint: | |q| - 1 | = {da:e} exceeds {tol:e}"));
            }
            if dg > tol {
                out.push(format!("{name} endpoint: |phi'| = {dg:e} exceeds {tol:e}"));
            }
        }
        Ok(out)
    }
}

/// Riemann invariants `u_± = v/2 ± |q|` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannFields {
    grid: Grid,
    u_plus: Vec<f64>,
    u_minus: Vec<f64>,
    phase_origin: f64,
}

impl RiemannFields {
    pub fn new(grid: Grid, u_plus: Vec<f64>, u_minus: Vec<f64>, phase_origin: f64) -> Result<Self> {
        if u_plus.len() != grid.n_points() || u_minus.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got u_+ {} and u_- {}",
                grid.n_points(),
                u_plus.len(),
                u_minus.len()
            )));
        }
        check_finite("u_plus", &u_plus)?;
        check_finite("u_minus", &u_minus)?;
        if !phase_origin.is_finite() {
            return Err(Error::InvalidPotential("phase_origin is not finite".into()));
        }
        if let Some(i) = (0..u_plus.len()).find(|&i| u_plus[i] - u_minus[i] < 0.0) {
            return Err(Error::InvalidPotential(format!(
                "u_+ - u_- = 2|q| must be nonnegative (node {i})"
            )));
        }
        Ok(Self {
            grid,
            u_plus,
            u_minus,
            phase_origin,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn u_plus(&self) -> &[f64] {
        &self.u_plus
    }

    pub fn u_minus(&self) -> &[f64] {
        &self.u_minus
    }

    pub fn phase_origin(&self) -> f64 {
        self.phase_origin
    }

    /// `|q| = (u_+ - u_-)/2`.
    pub fn amplitude(&self) -> Vec<f64> {
        self.u_plus
            .iter()
            .zip(&self.u_minus)
            .map(|(p, m)| 0.5 * (p - m))
            .collect()
    }

    /// Phase velocity `v = phi' = u_+ + u_-`.
    pub fn velocity(&self) -> Vec<f64> {
        self.u_plus.iter().zip(&self.u_minus).map(|(p, m)| p + m).collect()
    }

    /// Phase at the nodes: cumulative trapezoid of `phi'` from `phi(-X)`.
    pub fn phase(&self) -> Vec<f64> {
        let v = self.velocity();
        let h = self.grid.spacing();
        let mut phi = Vec::with_capacity(v.len());
        let mut acc = self.phase_origin;
        phi.push(acc);
        for w in v.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            phi.push(acc);
        }
        phi
    }

    /// Image under `(u_+, u_-) -> (-u_-, -u_+)`.
    pub fn mirrored(&self) -> RiemannFields {
        RiemannFields {
            grid: self.grid.clone(),
            u_plus: self.u_minus.iter().map(|v| -v).collect(),
            u_minus: self.u_plus.iter().map(|v| -v).collect(),
            phase_origin: -self.phase_origin,
        }
    }

    /// Free fields `u_± = ±1`.
    pub fn free(grid: &Grid) -> RiemannFields {
        let n = grid.n_points();
        RiemannFields {
            grid: grid.clone(),
            u_plus: vec![1.0; n],
            u_minus: vec![-1.0; n],
            phase_origin: 0.0,
        }
    }
}

/// `u_±[i] = phase_gradient(x_i)/2 ± amplitude(x_i)`.
pub fn riemann_invariants(spec: &PotentialSpec, grid: &Grid) -> Result<RiemannFields> {
    let s = spec.sample(grid)?;
    let u_plus = s
        .amplitude
        .iter()
        .zip(&s.phase_gradient)
        .map(|(a, g)| 0.5 * g + a)
        .collect();
    let u_minus = s
        .amplitude
        .iter()
        .zip(&s.phase_gradient)
        .map(|(a, g)| 0.5 * g - a)
        .collect();
    RiemannFields::new(grid.clone(), u_plus, u_minus, s.phase_origin)
}

/// Sup-norms of the positive and negative parts: `(max(0, max f), max(0, max -f))`.
pub fn part_norms(f: &[f64]) -> Result<(f64, f64)> {
    if f.is_empty() {
        return Err(Error::Empty("part_norms input"));
    }
    check_finite("part_norms input", f)?;
    let (pos, neg) = f
        .iter()
        .fold((0.0_f64, 0.0_f64), |(p, n), &v| (p.max(v), n.max(-v)));
    Ok((pos, neg))
}

/// `V = u_+ - 1`, the scalar potential of the `u_- = -1` reduction.
pub fn gap_potential_v(fields: &RiemannFields) -> Vec<f64> {
    fields.u_plus.iter().map(|u| u - 1.0).collect()
}

/// `V~ = -u_- - 1`, the potential of the mirrored (`u_+ = 1`) reduction.
pub fn mirrored_gap_potential_v(fields: &RiemannFields) -> Vec<f64> {
    fields.u_minus.iter().map(|u| -u - 1.0).collect()
}
