//! Run configuration: JSON in, validated before anything is solved.

use laxgap::gap::Branch;
use laxgap::potential::PotentialSpec;
use laxgap::transform::MIN_POINTS;
use laxgap::Grid;
use serde::{Deserialize, Serialize};

pub const DEFAULT_HALF_WIDTH: f64 = 40.0;
pub const DEFAULT_POINTS: usize = 8001;
pub const DEFAULT_SOLVER_TOL: f64 = 1e-8;
pub const DEFAULT_AGREEMENT_TOL: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "kbeta-pipeline")]
    KbetaPipeline,
    #[serde(rename = "direct-dirac")]
    DirectDirac,
    #[serde(rename = "direct-calL")]
    DirectReduced,
    #[serde(rename = "bounds")]
    Bounds,
    #[serde(rename = "oracle-compare")]
    OracleCompare,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::KbetaPipeline,
        Method::DirectDirac,
        Method::DirectReduced,
        Method::Bounds,
        Method::OracleCompare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::KbetaPipeline => "kbeta-pipeline",
            Method::DirectDirac => "direct-dirac",
            Method::DirectReduced => "direct-calL",
            Method::Bounds => "bounds",
            Method::OracleCompare => "oracle-compare",
        }
    }

    pub fn parse(s: &str) -> Result<Method, ConfigError> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
            ConfigError(format!("unknown method '{s}', expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Fixed-point bisection width and residual for the `K_beta` pipeline.
    pub solver: f64,
    /// Largest accepted gap between methods on a shared eigenvalue.
    pub cross_method: f64,
    /// Largest accepted gap to a closed-form reference.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solver: DEFAULT_SOLVER_TOL,
            cross_method: DEFAULT_AGREEMENT_TOL,
            oracle: DEFAULT_AGREEMENT_TOL,
        }
    }
}

fn default_half_width() -> f64 {
    DEFAULT_HALF_WIDTH
}

fn default_points() -> usize {
    DEFAULT_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_points")]
    pub n_points: usize,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    /// Reduction branch for `kbeta-pipeline`; detected from the fields if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    /// CSV of `(beta, j, mu)` over a geometric sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_sweep: Option<String>,
    /// CSV of `(x, |psi_1|, |psi_2|)` per eigenvector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_spinor: Option<String>,
    /// Attach wall-clock timings (makes the report run-dependent).
    #[serde(default)]
    pub timings: bool,
}

impl RunConfig {
    pub fn new(potential: PotentialSpec, methods: Vec<Method>) -> Self {
        Self {
            potential,
            half_width: DEFAULT_HALF_WIDTH,
            n_points: DEFAULT_POINTS,
            methods,
            tolerances: Tolerances::default(),
            output_path: None,
            branch: None,
            csv_sweep: None,
            csv_spinor: None,
            timings: false,
        }
    }

    /// Parse and validate.
    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        let mut c: RunConfig = serde_json::from_str(s).map_err(|e| ConfigError(format!("config: {e}")))?;
        c.validate()?;
        c.dedup_methods();
        Ok(c)
    }

    /// Keeps the first occurrence of each method.
    pub fn dedup_methods(&mut self) {
        let mut seen = Vec::with_capacity(self.methods.len());
        self.methods.retain(|m| {
            let fresh = !seen.contains(m);
            seen.push(*m);
            fresh
        });
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.methods.is_empty() {
            return Err(ConfigError("at least one method is required".into()));
        }
        if self.n_points % 2 == 0 {
            return Err(ConfigError(format!(
                "n_points must be odd so the grid is symmetric about 0, got {}",
                self.n_points
            )));
        }
        if self.n_points < MIN_POINTS {
            return Err(ConfigError(format!("n_points must be at least {MIN_POINTS}, got {}", self.n_points)));
        }
        let t = &self.tolerances;
        for (name, v) in [("solver", t.solver), ("cross_method", t.cross_method), ("oracle", t.oracle)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ConfigError(format!("tolerance '{name}' must be positive, got {v}")));
            }
        }
        let grid = self.grid()?;
        self.potential.validate().map_err(|e| ConfigError(e.to_string()))?;
        self.potential.sample(&grid).map_err(|e| ConfigError(e.to_string()))?;
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        Grid::new(self.half_width, self.n_points).map_err(|e| ConfigError(e.to_string()))
    }
}

/// `dark-soliton`, `square-well` or `free`; `eps` is required for the first two.
pub fn builtin_potential(name: &str, eps: Option<f64>) -> Result<Option<PotentialSpec>, ConfigError> {
    let need = |family: &str| eps.ok_or_else(|| ConfigError(format!("--eps is required for {family}")));
    let spec = match name {
        "dark-soliton" => PotentialSpec::DarkSoliton { eps: need(name)? },
        "square-well" => PotentialSpec::SquareWell { eps: need(name)? },
        "free" => PotentialSpec::free(),
        _ => return Ok(None),
    };
    spec.validate().map_err(|e| ConfigError(e.to_string()))?;
    Ok(Some(spec))
}
