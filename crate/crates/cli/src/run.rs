//! Executes a validated `RunConfig` and assembles the report.

use std::collections::BTreeMap;
use std::time::Instant;

use laxgap::bounds::{check_eigenvalues, default_c_values, evaluate_bounds_with_plateaus};
use laxgap::direct::{direct_gap_spectrum, DirectOperator, DirectSpectrum, DIRECT_TOL};
use laxgap::gap::{gap_pipeline, Branch, GapOptions, GapReport};
use laxgap::kbeta::{geometric_betas, sweep_csv, KBetaOperator, DEFAULT_J_MAX};
use laxgap::oracle::{dark_soliton_lambda, square_well_lambda};
use laxgap::potential::{riemann_invariants, PotentialSpec, RiemannFields, BOUNDARY_TOLERANCE};
use laxgap::transform::Stencil;
use laxgap::Grid;

use crate::config::{ConfigError, Method, RunConfig};
use crate::report::*;

/// An eigenvalue whose decay length `1/sqrt(1 - lambda^2)` exceeds this
/// fraction of the half-width is not expected to be resolved by the
/// truncated direct solvers.
pub const DECAY_FRACTION: f64 = 1.0 / 8.0;

/// Probes for the `(beta, j, mu)` sweep table.
pub const SWEEP_BETA_MIN: f64 = 1e-4;
pub const SWEEP_POINTS: usize = 41;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure in {module}: {source}")]
    Numerical {
        module: &'static str,
        #[source]
        source: laxgap::Error,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RunError {
    /// 2 for configuration and I/O problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io { .. } => 2,
            RunError::Numerical { .. } => 3,
        }
    }
}

fn numerical(module: &'static str) -> impl FnOnce(laxgap::Error) -> RunError {
    move |source| RunError::Numerical { module, source }
}

/// Report plus the CSV tables that were requested.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub sweep_csv: Option<String>,
    pub spinor_csv: Option<String>,
}

impl RunOutput {
    /// 0 if every consistency assertion held, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.report.consistency.passed {
            0
        } else {
            1
        }
    }
}

/// Whether an eigenvalue's state decays within the box.
pub fn fits_in_box(lambda: f64, half_width: f64) -> bool {
    (1.0 - lambda * lambda).max(0.0).sqrt() * half_width * DECAY_FRACTION > 1.0
}

struct EigenSource {
    name: &'static str,
    values: Vec<f64>,
}

pub fn run(config: &RunConfig) -> Result<RunOutput, RunError> {
    config.validate()?;
    let grid = config.grid()?;
    let spec = &config.potential;
    let fields = riemann_invariants(spec, &grid).map_err(numerical("potential"))?;
    let mut warnings = spec
        .boundary_warnings(&grid, BOUNDARY_TOLERANCE)
        .map_err(numerical("potential"))?;
    let mut timings = BTreeMap::new();
    let mut results = MethodResults::default();
    let mut failures = Vec::new();
    let mut sources: Vec<EigenSource> = Vec::new();
    let mut pipeline_report: Option<GapReport> = None;
    let mut spinor_rows: Vec<(String, f64, Vec<f64>, Vec<f64>)> = Vec::new();
    let mut certificate = None;

    let branch = resolve_branch(config, &fields);
    for &method in &config.methods {
        let t0 = Instant::now();
        match method {
            Method::KbetaPipeline => {
                let r = run_pipeline(config, &fields, branch, &mut warnings)?;
                if let (PipelineResult::Solved(sol), Some(rep)) = &r {
                    sources.push(EigenSource {
                        name: method.name(),
                        values: sol.eigenvalues.iter().map(|e| e.lambda).collect(),
                    });
                    for p in &rep.eigenpairs {
                        let a = p.spinor.comp1().iter().map(|z| z.norm()).collect();
                        let b = p.spinor.comp2().iter().map(|z| z.norm()).collect();
                        spinor_rows.push((method.name().into(), p.lambda, a, b));
                    }
                }
                results.kbeta_pipeline = Some(r.0);
                pipeline_report = r.1;
            }
            Method::DirectDirac | Method::DirectReduced => {
                let op = if method == Method::DirectDirac {
                    DirectOperator::Lax(Stencil::GaugeCovariant)
                } else {
                    DirectOperator::Reduced
                };
                let s = direct_gap_spectrum(spec, &grid, op, DIRECT_TOL).map_err(numerical(method.name()))?;
                for e in s.genuine() {
                    let (a, b) = e.candidate.magnitude_profile();
                    spinor_rows.push((method.name().into(), e.candidate.lambda, a, b));
                }
                sources.push(EigenSource {
                    name: method.name(),
                    values: s.genuine_values(),
                });
                let r = direct_result(&s);
                if method == Method::DirectDirac {
                    results.direct_dirac = Some(r);
                } else {
                    results.direct_reduced = Some(r);
                }
            }
            Method::Bounds => {
                let c = default_c_values(&fields);
                let cert = evaluate_bounds_with_plateaus(&fields, &c, &spec.plateau_values())
                    .map_err(numerical("bounds"))?;
                results.bounds = Some(BoundsResult {
                    exclusion_interval: cert.exclusion.map(|c| (-c, c)),
                    c_values: cert.c_values.clone(),
                    left_bound: cert.left_bound.clone(),
                    right_bound: cert.right_bound.clone(),
                    excluded: cert.excluded.clone(),
                });
                certificate = Some(cert);
            }
            Method::OracleCompare => {}
        }
        timings.insert(method.name().to_string(), t0.elapsed().as_secs_f64());
    }

    let cross_method = cross_method_deltas(&sources, config, &mut failures);

    let oracle = if config.methods.contains(&Method::OracleCompare) {
        let t0 = Instant::now();
        let o = oracle_compare(spec, &sources, config, &mut warnings, &mut failures)?;
        timings.insert(Method::OracleCompare.name().to_string(), t0.elapsed().as_secs_f64());
        Some(o)
    } else {
        None
    };

    let bounds_check = certificate.map(|cert| {
        let verdicts: Vec<MethodVerdicts> = sources
            .iter()
            .map(|s| MethodVerdicts {
                method: s.name.to_string(),
                verdicts: check_eigenvalues(&cert, &s.values),
            })
            .collect();
        for m in &verdicts {
            for v in m.verdicts.iter().filter(|v| !v.pass) {
                failures.push(format!(
                    "bounds: {} eigenvalue {} violates the certificate at c = {} (margin {:e})",
                    m.method, v.lambda, v.worst_c, v.margin
                ));
            }
        }
        let pass = verdicts.iter().all(|m| m.verdicts.iter().all(|v| v.pass));
        BoundsCheck { verdicts, pass }
    });

    let sweep = match &config.csv_sweep {
        Some(_) => Some(sweep_table(&fields, branch, pipeline_report.as_ref())?),
        None => None,
    };
    let spinor_csv = config.csv_spinor.as_ref().map(|_| spinor_table(&grid, &spinor_rows));

    let report = Report {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        grid: GridInfo {
            spec: grid.spec(),
            spacing: grid.spacing(),
        },
        results,
        cross_method,
        oracle,
        bounds_check,
        consistency: Consistency {
            passed: failures.is_empty(),
            failures,
        },
        warnings,
        timings: config.timings.then_some(timings),
    };
    Ok(RunOutput {
        report,
        sweep_csv: sweep,
        spinor_csv,
    })
}

/// The configured branch, else the detected one.
fn resolve_branch(config: &RunConfig, fields: &RiemannFields) -> Option<(Branch, BranchSource)> {
    match config.branch {
        Some(b) => Some((b, BranchSource::Config)),
        None => Branch::detect(fields).map(|b| (b, BranchSource::Detected)),
    }
}

fn run_pipeline(
    config: &RunConfig,
    fields: &RiemannFields,
    branch: Option<(Branch, BranchSource)>,
    warnings: &mut Vec<String>,
) -> Result<(PipelineResult, Option<GapReport>), RunError> {
    let Some((branch, source)) = branch else {
        let reason = "neither u_- = -1 nor u_+ = 1 holds on the grid; use the direct methods".to_string();
        warnings.push(format!("kbeta-pipeline skipped: {reason}"));
        return Ok((PipelineResult::Skipped { reason }, None));
    };
    let opts = GapOptions {
        tol: config.tolerances.solver,
        ..GapOptions::default()
    };
    let rep = gap_pipeline(fields, branch, &opts).map_err(numerical("kbeta-pipeline"))?;
    let x = config.half_width;
    let mut caveat = vec![format!(
        "the potential is truncated to [-{x}, {x}]; the truncation error is not bounded a priori for slowly decaying V"
    )];
    for p in &rep.eigenpairs {
        if p.beta.sqrt() * x * DECAY_FRACTION <= 1.0 {
            caveat.push(format!(
                "j = {}: decay length 1/sqrt(beta) = {:.4e} exceeds X/8; the eigenvector is not contained in the box",
                p.j,
                1.0 / p.beta.sqrt()
            ));
        }
    }
    let sol = PipelineSolution {
        branch,
        branch_source: source,
        negative_part: rep.negative_part,
        n_zero: rep.n_zero.clone(),
        eigenvalues: rep
            .eigenpairs
            .iter()
            .map(|p| PipelineEigenvalue {
                j: p.j,
                lambda: p.lambda,
                beta: p.beta,
                mu: p.mu,
                alpha: p.alpha,
                fixed_point_residual: p.fixed_point_residual,
                residual: p.residual,
            })
            .collect(),
        caveat,
    };
    Ok((PipelineResult::Solved(sol), Some(rep)))
}

fn direct_result(s: &DirectSpectrum) -> DirectResult {
    DirectResult {
        eigenvalues: s.genuine_values(),
        candidates: s
            .entries
            .iter()
            .map(|e| DirectCandidate {
                lambda: e.candidate.lambda,
                copies: e.candidate.copies.clone(),
                split: e.candidate.split,
                outer_mass: e.candidate.outer_mass,
                residual: e.candidate.residual,
                drift: e.drift,
                drift_limit: e.drift_limit,
                paired: e.paired,
                localized: e.localized,
                persistent: e.persistent,
                genuine: e.genuine(),
            })
            .collect(),
    }
}

fn nearest(values: &[f64], x: f64) -> Option<f64> {
    values.iter().copied().min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
}

/// Each box-resolved eigenvalue of one method against the nearest of every other.
fn cross_method_deltas(sources: &[EigenSource], config: &RunConfig, failures: &mut Vec<String>) -> Vec<CrossMethodDelta> {
    let tol = config.tolerances.cross_method;
    let mut out = Vec::new();
    for a in sources {
        for b in sources.iter().filter(|b| b.name != a.name) {
            for &la in a.values.iter().filter(|&&l| fits_in_box(l, config.half_width)) {
                let lb = nearest(&b.values, la);
                let delta = lb.map(|lb| (la - lb).abs());
                let pass = delta.is_some_and(|d| d <= tol);
                if !pass {
                    failures.push(format!(
                        "cross-method: {} eigenvalue {la} has no {} eigenvalue within {tol:e}",
                        a.name, b.name
                    ));
                }
                out.push(CrossMethodDelta {
                    a: a.name.to_string(),
                    b: b.name.to_string(),
                    lambda_a: la,
                    lambda_b: lb,
                    delta,
                    pass,
                });
            }
        }
    }
    out
}

fn oracle_reference(spec: &PotentialSpec) -> Result<Option<(String, Vec<f64>)>, RunError> {
    Ok(match spec {
        PotentialSpec::DarkSoliton { eps } => Some((
            "dark-soliton".into(),
            vec![dark_soliton_lambda(*eps).map_err(numerical("oracle-compare"))?],
        )),
        PotentialSpec::SquareWell { eps } => Some((
            "square-well".into(),
            vec![square_well_lambda(*eps).map_err(numerical("oracle-compare"))?],
        )),
        s if *s == PotentialSpec::free() => Some(("free".into(), Vec::new())),
        _ => None,
    })
}

fn oracle_compare(
    spec: &PotentialSpec,
    sources: &[EigenSource],
    config: &RunConfig,
    warnings: &mut Vec<String>,
    failures: &mut Vec<String>,
) -> Result<OracleResult, RunError> {
    let Some((family, reference)) = oracle_reference(spec)? else {
        warnings.push("oracle-compare: no closed form for this potential".into());
        return Ok(OracleResult {
            family: family_name(spec).into(),
            reference: None,
            comparisons: Vec::new(),
        });
    };
    let tol = config.tolerances.oracle;
    let comparisons = sources
        .iter()
        .map(|s| {
            // the truncated direct solvers only see states that decay inside the box
            let truncated = s.name != Method::KbetaPipeline.name();
            let keep = |l: &f64| !truncated || fits_in_box(*l, config.half_width);
            let want: Vec<f64> = reference.iter().copied().filter(keep).collect();
            let mut got: Vec<f64> = s.values.iter().copied().filter(keep).collect();
            got.sort_by(f64::total_cmp);
            let max_error = (got.len() == want.len())
                .then(|| got.iter().zip(&want).map(|(g, r)| (g - r).abs()).fold(0.0, f64::max));
            let pass = max_error.is_some_and(|e| e <= tol);
            if !pass {
                failures.push(format!(
                    "oracle-compare: {} eigenvalues {:?} differ from {:?} (tolerance {tol:e})",
                    s.name, s.values, reference
                ));
            }
            OracleComparison {
                method: s.name.to_string(),
                eigenvalues: s.values.clone(),
                max_error,
                pass,
            }
        })
        .collect();
    Ok(OracleResult {
        family,
        reference: Some(reference),
        comparisons,
    })
}

fn family_name(spec: &PotentialSpec) -> &'static str {
    match spec {
        PotentialSpec::DarkSoliton { .. } => "dark-soliton",
        PotentialSpec::SquareWell { .. } => "square-well",
        PotentialSpec::PiecewiseConstantQ { .. } => "piecewise-q",
        PotentialSpec::Sampled(_) => "sampled",
    }
}

fn sweep_table(
    fields: &RiemannFields,
    branch: Option<(Branch, BranchSource)>,
    report: Option<&GapReport>,
) -> Result<String, RunError> {
    let branch = match (report, branch) {
        (Some(r), _) => r.branch,
        (None, Some((b, _))) => {
            b.check(fields).map_err(numerical("kbeta"))?;
            b
        }
        (None, None) => {
            return Err(ConfigError(
                "the (beta, j, mu) sweep needs u_- = -1 or u_+ = 1; neither holds for this potential".into(),
            )
            .into())
        }
    };
    let op = KBetaOperator::new(branch.scalar_potential(fields), fields.grid(), GapOptions::default().boundary)
        .map_err(numerical("kbeta"))?;
    let betas = geometric_betas(SWEEP_BETA_MIN, 1.0, SWEEP_POINTS);
    sweep_csv(&op, &betas, DEFAULT_J_MAX).map_err(numerical("kbeta"))
}

fn spinor_table(grid: &Grid, rows: &[(String, f64, Vec<f64>, Vec<f64>)]) -> String {
    let mut out = String::from("method,index,lambda,x,abs_psi1,abs_psi2\n");
    for (k, (method, lambda, a, b)) in rows.iter().enumerate() {
        for ((x, p1), p2) in grid.nodes().iter().zip(a).zip(b) {
            out.push_str(&format!("{method},{k},{lambda:e},{x:e},{p1:e},{p2:e}\n"));
        }
    }
    out
}

/// Runs and writes the report and CSV files named in the config.
pub fn run_and_write(config: &RunConfig) -> Result<RunOutput, RunError> {
    let out = run(config)?;
    let write = |path: &str, text: &str| {
        std::fs::write(path, text).map_err(|source| RunError::Io {
            path: path.to_string(),
            source,
        })
    };
    if let Some(p) = &config.output_path {
        write(p, &out.report.to_json())?;
    }
    if let (Some(p), Some(t)) = (&config.csv_sweep, &out.sweep_csv) {
        write(p, t)?;
    }
    if let (Some(p), Some(t)) = (&config.csv_spinor, &out.spinor_csv) {
        write(p, t)?;
    }
    Ok(out)
}
