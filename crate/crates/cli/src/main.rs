use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use laxgap::gap::Branch;
use laxgap::potential::PotentialSpec;
use laxgap_cli::config::builtin_potential;
use laxgap_cli::{run_and_write, ConfigError, Method, RunConfig};

/// Discrete gap eigenvalues of the defocusing NLS Lax operator.
#[derive(Debug, Parser)]
#[command(name = "laxgap", version)]
struct Args {
    /// JSON run configuration; other flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Potential JSON file, or one of dark-soliton, square-well, free.
    #[arg(long)]
    potential: Option<String>,
    /// Parameter of the dark-soliton and square-well families.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    half_width: Option<f64>,
    /// Grid points (odd).
    #[arg(long)]
    points: Option<usize>,
    /// kbeta-pipeline, direct-dirac, direct-calL, bounds or oracle-compare (repeatable; default all).
    #[arg(long = "method")]
    methods: Vec<String>,
    /// Fixed-point solver tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Report path; stdout if absent.
    #[arg(long)]
    out: Option<String>,
    /// CSV of (beta, j, mu) over a geometric beta sweep.
    #[arg(long)]
    csv_sweep: Option<String>,
    /// CSV of (x, |psi_1|, |psi_2|) per eigenvector.
    #[arg(long)]
    csv_spinor: Option<String>,
    /// u-minus-is-minus-one or u-plus-is-one; detected if absent.
    #[arg(long)]
    branch: Option<String>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
}

fn read(path: &std::path::Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))
}

fn build_config(args: Args) -> Result<RunConfig, ConfigError> {
    let potential = match &args.potential {
        Some(p) => Some(match builtin_potential(p, args.eps)? {
            Some(spec) => spec,
            None => PotentialSpec::from_json_str(&read(p.as_ref())?).map_err(|e| ConfigError(format!("{p}: {e}")))?,
        }),
        None => None,
    };
    let methods = args.methods.iter().map(|m| Method::parse(m)).collect::<Result<Vec<_>, _>>()?;
    let mut config = match &args.config {
        Some(path) => {
            let mut c = RunConfig::from_json_str(&read(path)?)?;
            if let Some(p) = potential {
                c.potential = p;
            }
            if !methods.is_empty() {
                c.methods = methods;
            }
            c
        }
        None => {
            let p = potential.ok_or_else(|| ConfigError("either --config or --potential is required".into()))?;
            let methods = if methods.is_empty() { Method::ALL.to_vec() } else { methods };
            RunConfig::new(p, methods)
        }
    };
    if let Some(x) = args.half_width {
        config.half_width = x;
    }
    if let Some(n) = args.points {
        config.n_points = n;
    }
    if let Some(t) = args.tol {
        config.tolerances.solver = t;
    }
    if let Some(b) = &args.branch {
        let b: Branch = serde_json::from_value(serde_json::Value::String(b.clone()))
            .map_err(|_| ConfigError(format!("unknown branch '{b}', expected u-minus-is-minus-one or u-plus-is-one")))?;
        config.branch = Some(b);
    }
    config.output_path = args.out.or(config.output_path);
    config.csv_sweep = args.csv_sweep.or(config.csv_sweep);
    config.csv_spinor = args.csv_spinor.or(config.csv_spinor);
    config.timings |= args.timings;
    config.dedup_methods();
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match build_config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("laxgap: configuration error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_and_write(&config) {
        Ok(out) => {
            if config.output_path.is_none() {
                print!("{}", out.report.to_json());
            }
            for f in &out.report.consistency.failures {
                eprintln!("laxgap: consistency failure: {f}");
            }
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("laxgap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
