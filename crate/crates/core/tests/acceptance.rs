//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run: cargo test -p laxgap --test acceptance
//!
//! The process fails if any criterion outside `KNOWN_RED` fails, or if a
//! `KNOWN_RED` criterion starts passing (so the list cannot go stale).

mod common;

use std::time::Instant;

use laxgap::bounds::{check_eigenvalues, default_c_values, evaluate_bounds_with_plateaus};
use laxgap::direct::{direct_gap_spectrum, lax_gap_values, reduced_gap_values, DirectOperator, DIRECT_TOL};
use laxgap::discretize::{laplacian_plus_beta_with, Boundary};
use laxgap::eigensolve::{gen_negative_eigs, GenEigProblem};
use laxgap::gap::{gap_pipeline, Branch, GapEigenpair, GapOptions};
use laxgap::kbeta::{geometric_betas, mu_curve, KBetaOperator, NOISE_FLOOR};
use laxgap::oracle::{dark_soliton_lambda, square_well_mu, square_well_mu_limit};
use laxgap::potential::{gap_potential_v, riemann_invariants, PotentialSpec, QSegment, RiemannFields};
use laxgap::transform::{m_matrix_at, unitarity_residual, Stencil};
use laxgap::Grid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const DARK_TOL: f64 = 5e-3;
const DARK_MIN_RATIO: f64 = 3.0;
const DARK_SECONDS: f64 = 60.0;
const WELL_TOL: f64 = 5e-3;
const WELL_SECONDS: f64 = 120.0;
const MU_REL_TOL: f64 = 0.02;
const IDENTITY_TOL: f64 = 1e-6;
const EQUIVALENCE_TOL: f64 = 1e-8;
const UNITARITY_TOL: f64 = 1e-14;
const DENSE_TOL: f64 = 1e-8;

/// The stated Lipschitz constant `2||V||/beta_1` only follows from
/// `||V|| |beta - beta_1| / (beta beta_1)` when `beta >= 1/2`; near zero
/// `mu_1 ~ (int V) / (2 sqrt(beta))` outgrows it. The rigorous constant is
/// checked and passes; the stated one is reported as is.
const KNOWN_RED: &[&str] = &["5"];

struct Row {
    id: &'static str,
    pass: bool,
    detail: String,
}

/// Eigenvalues collected along the way for the bound check.
struct BoundCase {
    label: String,
    fields: RiemannFields,
    plateaus: Vec<(f64, f64)>,
    lambdas: Vec<f64>,
}

fn well_fields(eps: f64, grid: &Grid) -> RiemannFields {
    riemann_invariants(&PotentialSpec::SquareWell { eps }, grid).unwrap()
}

fn criterion_1(cases: &mut Vec<BoundCase>) -> Row {
    let mut pass = true;
    let mut parts = Vec::new();
    for eps in [0.4, 0.6, 0.8] {
        let exact = dark_soliton_lambda(eps).unwrap();
        let spec = PotentialSpec::DarkSoliton { eps };
        let fine = Grid::new(40.0, 8001).unwrap();
        let coarse = Grid::new(40.0, 4001).unwrap();
        let t = Instant::now();
        let s = direct_gap_spectrum(&spec, &fine, DirectOperator::Reduced, DIRECT_TOL).unwrap();
        let seconds = t.elapsed().as_secs_f64();
        let found = s.genuine_values();
        let c = direct_gap_spectrum(&spec, &coarse, DirectOperator::Reduced, DIRECT_TOL).unwrap();
        let coarse_found = c.genuine_values();
        let ok_count = found.len() == 1 && coarse_found.len() == 1;
        let (err, ratio) = if ok_count {
            let e = (found[0] - exact).abs();
            (e, (coarse_found[0] - exact).abs() / e)
        } else {
            (f64::NAN, f64::NAN)
        };
        let ok = ok_count && err < DARK_TOL && ratio >= DARK_MIN_RATIO && seconds < DARK_SECONDS;
        pass &= ok;
        parts.push(format!(
            "eps={eps}: n={} err={err:.2e} ratio={ratio:.2} {seconds:.2}s",
            found.len()
        ));
        let fields = riemann_invariants(&spec, &fine).unwrap();
        let lax = direct_gap_spectrum(&spec, &fine, DirectOperator::Lax(Stencil::GaugeCovariant), DIRECT_TOL)
            .unwrap()
            .genuine_values();
        cases.push(BoundCase {
            label: format!("dark soliton {eps}"),
            fields,
            plateaus: Vec::new(),
            lambdas: found.into_iter().chain(lax).collect(),
        });
    }
    Row {
        id: "1",
        pass,
        detail: format!("dark soliton, direct reduced operator: {}", parts.join("; ")),
    }
}

fn criterion_2(cases: &mut Vec<BoundCase>, pairs: &mut Vec<(String, f64, Vec<GapEigenpair>)>) -> Row {
    let mut pass = true;
    let mut parts = Vec::new();
    let grid = Grid::new(40.0, 8001).unwrap();
    for eps in [0.25, 0.5, 1.0] {
        let spec = PotentialSpec::SquareWell { eps };
        let t = Instant::now();
        let fields = well_fields(eps, &grid);
        let report = gap_pipeline(&fields, Branch::UMinusIsMinusOne, &GapOptions::default()).unwrap();
        let direct = direct_gap_spectrum(&spec, &grid, DirectOperator::Reduced, DIRECT_TOL)
            .unwrap()
            .genuine_values();
        let seconds = t.elapsed().as_secs_f64();
        let pipe: Vec<f64> = report.eigenpairs.iter().map(|p| p.lambda).collect();
        let diff = if pipe.len() == 1 && direct.len() == 1 {
            (pipe[0] - direct[0]).abs()
        } else {
            f64::NAN
        };
        let ok = report.n_zero.indices == vec![1] && diff < WELL_TOL && seconds < WELL_SECONDS;
        pass &= ok;
        parts.push(format!(
            "eps={eps}: N0={:?} diff={diff:.2e} {seconds:.2}s",
            report.n_zero.indices
        ));
        cases.push(BoundCase {
            label: format!("square well {eps}"),
            plateaus: spec.plateau_values(),
            fields,
            lambdas: pipe.iter().copied().chain(direct).collect(),
        });
        pairs.push((format!("square well {eps}"), report.negative_part, report.eigenpairs));
    }
    Row {
        id: "2",
        pass,
        detail: format!("square well, pipeline vs direct: {}", parts.join("; ")),
    }
}

fn criterion_3() -> Row {
    let grid = Grid::new(30.0, 4000).unwrap();
    let betas = geometric_betas(1e-3, 1.0, 13);
    let mut worst: f64 = 0.0;
    let mut worst_limit: f64 = 0.0;
    for eps in [0.25, 0.5, 1.0] {
        let op = KBetaOperator::new(gap_potential_v(&well_fields(eps, &grid)), &grid, Boundary::Transparent).unwrap();
        for &beta in &betas {
            for j in 1..=2 {
                let got = op.mu(j, beta).unwrap();
                let want = square_well_mu(eps, beta, j).unwrap();
                worst = worst.max(((got - want) / want).abs());
            }
        }
        let limit = square_well_mu_limit(eps, 2);
        let got = op.mu(2, 1e-8).unwrap();
        worst_limit = worst_limit.max(((got - limit) / limit).abs());
    }
    Row {
        id: "3",
        pass: worst < MU_REL_TOL && worst_limit < MU_REL_TOL,
        detail: format!(
            "square-well mu_1, mu_2 vs transcendental roots over [1e-3, 1]: max rel err {worst:.2e}; mu_2(0+) vs -eps/pi^2: {worst_limit:.2e}"
        ),
    }
}

fn phase_locked_zero() -> (bool, String) {
    let grid = Grid::new(20.0, 2001).unwrap();
    let bumps: [fn(f64) -> f64; 2] = [
        |x| 0.8 * (-x * x).exp(),
        |x| if x.abs() < 2.0 { 0.5 * (1.0 + (std::f64::consts::PI * x / 2.0).cos()) } else { 0.0 },
    ];
    let mut total = 0;
    for bump in bumps {
        for sign in [1.0, -1.0] {
            let spec = PotentialSpec::phase_locked(&grid, bump, sign);
            for op in [DirectOperator::Reduced, DirectOperator::Lax(Stencil::GaugeCovariant)] {
                total += direct_gap_spectrum(&spec, &grid, op, DIRECT_TOL).unwrap().genuine_values().len();
            }
        }
    }
    (total == 0, format!("|q| = 1 + |phi'|/2 family: {total} filtered eigenvalues"))
}

fn criterion_4(cases: &[BoundCase]) -> Row {
    let mut checked = 0;
    let mut failures = Vec::new();
    for case in cases {
        let cert = evaluate_bounds_with_plateaus(&case.fields, &default_c_values(&case.fields), &case.plateaus).unwrap();
        for v in check_eigenvalues(&cert, &case.lambdas) {
            checked += 1;
            if !v.pass {
                failures.push(format!("{} lambda={} c={} margin={:.2e}", case.label, v.lambda, v.worst_c, v.margin));
            }
        }
    }
    let (zero, locked) = phase_locked_zero();
    Row {
        id: "4",
        pass: failures.is_empty() && zero && checked > 0,
        detail: format!(
            "bounds: {checked} eigenvalues checked, {} failures{}; {locked}",
            failures.len(),
            if failures.is_empty() { String::new() } else { format!(" ({})", failures.join(", ")) }
        ),
    }
}

fn criterion_5() -> Row {
    let grid = Grid::new(30.0, 2001).unwrap();
    let betas = geometric_betas(0.01, 1.0, 10);
    let mut monotone = true;
    let mut counts_stable = true;
    let mut rigorous = 0;
    let mut stated = 0;
    let mut stated_failing = Vec::new();
    let corpus = common::corpus();
    for entry in &corpus {
        let v = entry.sample(&grid);
        let negative_nodes = v.iter().filter(|x| **x < 0.0).count();
        let op = KBetaOperator::new(v, &grid, Boundary::Transparent).unwrap();
        let exact: Vec<usize> = betas.iter().map(|&b| op.count_below(b, 0.0).unwrap()).collect();
        let floor: Vec<usize> = betas.iter().map(|&b| op.count_below(b, -NOISE_FLOOR).unwrap()).collect();
        // the inertia count is beta-independent; the floored one may only lose eigenvalues in the band
        counts_stable &= exact.iter().all(|&c| c == negative_nodes)
            && floor.iter().zip(&exact).all(|(f, e)| f <= e)
            && floor.windows(2).all(|w| w[0] == w[1]);
        let j_max = floor.iter().copied().min().unwrap_or(0).min(4);
        let mut entry_stated_ok = true;
        for j in 1..=j_max {
            match mu_curve(&op, j, &betas) {
                Ok(curve) => {
                    monotone &= curve.truncated_at.is_none() && curve.values.windows(2).all(|w| w[1] > w[0]);
                    for l in &curve.lipschitz {
                        rigorous += usize::from(!l.holds());
                        if !l.holds_simplified() {
                            stated += 1;
                            entry_stated_ok = false;
                        }
                    }
                }
                Err(_) => monotone = false,
            }
        }
        if !entry_stated_ok {
            stated_failing.push(entry.name.clone());
        }
    }
    Row {
        id: "5",
        pass: monotone && counts_stable && rigorous == 0 && stated == 0,
        detail: format!(
            "corpus of {}: monotone={monotone} count-stable={counts_stable} rigorous Lipschitz violations={rigorous}; stated 2||V||/beta_1 violations={stated} on {}/{} potentials",
            corpus.len(),
            stated_failing.len(),
            corpus.len()
        ),
    }
}

fn criterion_6(pairs: &mut Vec<(String, f64, Vec<GapEigenpair>)>) -> Row {
    let grid = Grid::new(30.0, 3001).unwrap();
    for entry in common::corpus() {
        let fields = entry.fields(&grid);
        let r = gap_pipeline(&fields, Branch::UMinusIsMinusOne, &GapOptions::default()).unwrap();
        pairs.push((entry.name.clone(), r.negative_part, r.eigenpairs));
    }
    let mut emitted = 0;
    let mut worst: f64 = 0.0;
    let mut ordered = true;
    let mut bounded = true;
    for (_, negative_part, list) in pairs.iter() {
        for p in list {
            emitted += 1;
            worst = worst
                .max((p.beta - (1.0 - p.lambda * p.lambda)).abs())
                .max((p.alpha - 1.0 - (1.0 - p.beta).sqrt()).abs());
            bounded &= p.lambda + 1.0 > 0.0 && p.lambda + 1.0 <= negative_part + IDENTITY_TOL;
        }
        ordered &= list.windows(2).all(|w| w[1].lambda <= w[0].lambda + IDENTITY_TOL);
    }
    let multi = pairs.iter().filter(|p| p.2.len() > 1).count();
    Row {
        id: "6",
        pass: emitted > 0 && worst < IDENTITY_TOL && ordered && bounded,
        detail: format!(
            "{emitted} eigenpairs ({multi} potentials with several): max identity error {worst:.2e}, non-increasing={ordered}, 0 < lambda+1 <= ||V^-||: {bounded}"
        ),
    }
}

fn criterion_7() -> Row {
    let grid = Grid::new(20.0, 1001).unwrap();
    let specs = vec![
        PotentialSpec::DarkSoliton { eps: 0.5 },
        PotentialSpec::SquareWell { eps: 0.75 },
        PotentialSpec::PiecewiseConstantQ {
            segments: vec![
                QSegment { start: -2.0, end: 0.5, amplitude: 0.4, phase: 1.1 },
                QSegment { start: 0.5, end: 1.5, amplitude: 0.8, phase: -0.3 },
            ],
            background_phase: 0.0,
        },
        PotentialSpec::sampled_from_fn(&grid, |x| 1.0 - 0.7 / x.cosh().powi(2), |x| 0.6 * x.tanh() / x.cosh()),
        PotentialSpec::sampled_from_fn(&grid, |x| 1.0 - 0.5 * (-x * x / 4.0).exp(), |x| -0.8 * (-(x - 1.0).powi(2)).exp()),
    ];
    let mut worst: f64 = 0.0;
    let mut same_count = true;
    let mut total = 0;
    let mut unitarity: f64 = 0.0;
    for spec in &specs {
        let f = riemann_invariants(spec, &grid).unwrap();
        let a = reduced_gap_values(&f, DIRECT_TOL).unwrap();
        let b = lax_gap_values(&f, Stencil::GaugeCovariant, DIRECT_TOL).unwrap();
        same_count &= a.len() == b.len();
        total += a.len();
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
        for phase in f.phase() {
            unitarity = unitarity.max(unitarity_residual(&m_matrix_at(phase)));
        }
    }
    Row {
        id: "7",
        pass: same_count && total > 0 && worst < EQUIVALENCE_TOL && unitarity < UNITARITY_TOL,
        detail: format!(
            "{} potentials, {total} gap eigenvalues: max |L - reduced| {worst:.2e}, M unitarity {unitarity:.2e}",
            specs.len()
        ),
    }
}

fn criterion_8() -> Row {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut counts_match = true;
    for _ in 0..10 {
        let grid = Grid::new(rng.gen_range(2.0..8.0), 64).unwrap();
        let beta = rng.gen_range(0.01..1.0);
        let a = laplacian_plus_beta_with(&grid, beta, Boundary::Dirichlet).unwrap();
        let v: Vec<f64> = (0..a.dim()).map(|_| rng.gen_range(-1.0..0.5)).collect();
        let p = GenEigProblem::new(a.clone(), v.clone()).unwrap();
        let ours = gen_negative_eigs(&p, a.dim(), 1e-13).unwrap();
        let n = a.dim();
        let dense_a = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                a.diag()[i]
            } else if i + 1 == j {
                a.offdiag()[i]
            } else if j + 1 == i {
                a.offdiag()[j]
            } else {
                0.0
            }
        });
        let dense_b = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(v));
        let dense: Vec<f64> = common::dense_pencil_eigenvalues(&dense_a, &dense_b)
            .into_iter()
            .filter(|m| *m < 0.0)
            .collect();
        counts_match &= dense.len() == ours.len();
        for ((m, _), d) in ours.iter().zip(&dense) {
            worst = worst.max((m - d).abs() / d.abs().max(1.0));
        }
    }
    Row {
        id: "8",
        pass: counts_match && worst < DENSE_TOL,
        detail: format!("N=64 pencils vs dense Cholesky reduction, 10 instances: max err {worst:.2e}, counts match={counts_match}"),
    }
}

fn divergence_trend() -> Row {
    let grid = Grid::new(30.0, 2001).unwrap();
    let ns: Vec<usize> = (1..=64).collect();
    let mut fitted = Vec::new();
    for entry in common::corpus().into_iter().filter(|e| e.integral() < 0.0) {
        let op = KBetaOperator::new(entry.sample(&grid), &grid, Boundary::Transparent).unwrap();
        let ratios: Vec<f64> = ns
            .iter()
            .map(|&n| -op.mu(1, 1.0 / (n * n) as f64).unwrap() / n as f64)
            .collect();
        // the largest C with mu_1(1/n^2) <= -C n for every probed n
        let c = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        fitted.push((entry.name.clone(), c, ratios[ratios.len() - 1], -0.5 * entry.integral()));
    }
    let min_c = fitted.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
    let worst_asym = fitted
        .iter()
        .map(|f| ((f.2 - f.3) / f.3).abs())
        .fold(0.0_f64, f64::max);
    Row {
        id: "D",
        pass: !fitted.is_empty() && min_c > 0.0,
        detail: format!(
            "mu_1(1/n^2) <= -C n, n = 1..64, {} corpus potentials with negative integral: min fitted C {min_c:.3e}; -mu_1/n at n=64 vs |int V|/2: max rel gap {worst_asym:.2}",
            fitted.len()
        ),
    }
}

fn main() {
    let start = Instant::now();
    let mut cases = Vec::new();
    let mut pairs = Vec::new();
    let mut rows = vec![criterion_1(&mut cases), criterion_2(&mut cases, &mut pairs), criterion_3()];
    let r5 = criterion_5();
    let r6 = criterion_6(&mut pairs);
    let grid = Grid::new(30.0, 3001).unwrap();
    for entry in common::corpus() {
        let lambdas = pairs
            .iter()
            .find(|p| p.0 == entry.name)
            .map(|p| p.2.iter().map(|e| e.lambda).collect())
            .unwrap_or_default();
        cases.push(BoundCase {
            label: entry.name.clone(),
            fields: entry.fields(&grid),
            plateaus: entry.plateaus(),
            lambdas,
        });
    }
    rows.push(criterion_4(&cases));
    rows.push(r5);
    rows.push(r6);
    rows.push(criterion_7());
    rows.push(criterion_8());
    rows.push(divergence_trend());

    let mut unexpected = Vec::new();
    for r in &rows {
        let known = KNOWN_RED.contains(&r.id);
        let tag = match (r.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("[{tag}] {} {}", r.id, r.detail);
        if r.pass == known {
            unexpected.push(r.id);
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
