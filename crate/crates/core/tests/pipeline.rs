mod common;

use laxgap::direct::{direct_gap_spectrum, DirectOperator, DIRECT_TOL};
use laxgap::discretize::{sturm_liouville_lambda_form, ScalarForm};
use laxgap::eigensolve::nearest_eigenpair;
use laxgap::gap::{gap_eigenvalues, gap_pipeline, reconstruct_spinor, Branch, GapOptions};
use laxgap::oracle::square_well_kappa;
use laxgap::potential::{riemann_invariants, PotentialSpec};
use laxgap::Grid;

fn scalar_root(eps: f64) -> f64 {
    let g = |beta: f64| {
        let k = square_well_kappa(beta.sqrt(), 1, 1e-15).unwrap().kappas[0];
        (beta + k * k) / eps - 1.0 - (1.0 - beta).sqrt()
    };
    let (mut lo, mut hi) = (1e-10, 1.0);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if g(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn square_well_beta_matches_scalar_bisection() {
    let grid = Grid::new(20.0, 8001).unwrap();
    for (eps, tol) in [(0.25, 1e-6), (0.5, 1e-6), (1.0, 1e-5)] {
        let pairs = gap_eigenvalues(&PotentialSpec::SquareWell { eps }, &grid, Branch::UMinusIsMinusOne, 1e-12).unwrap();
        assert_eq!(pairs.len(), 1);
        let want = scalar_root(eps);
        assert!((pairs[0].beta - want).abs() < tol, "eps={eps}: {} vs {want}", pairs[0].beta);
    }
}

#[test]
fn square_well_error_is_second_order() {
    let eps = 0.5;
    let want = scalar_root(eps);
    let err = |n| {
        let grid = Grid::new(20.0, n).unwrap();
        let p = gap_eigenvalues(&PotentialSpec::SquareWell { eps }, &grid, Branch::UMinusIsMinusOne, 1e-12).unwrap();
        (p[0].beta - want).abs()
    };
    let ratio = err(1001) / err(2001);
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn dark_soliton_spinor_from_scalar_null_vector() {
    // second-component elimination at the exact eigenvalue, rebuilt into a spinor
    let eps: f64 = 0.6;
    let lambda = -(1.0 - eps * eps).sqrt();
    let grid = Grid::new(40.0, 4001).unwrap();
    let fields = riemann_invariants(&PotentialSpec::DarkSoliton { eps }, &grid).unwrap();
    let problem = sturm_liouville_lambda_form(&fields, lambda, ScalarForm::SecondComponent).unwrap();
    let (mu, v) = nearest_eigenpair(&problem.matrix(), 0.0, 1e-13).unwrap();
    assert!(mu.abs() < 1e-4, "smallest |eigenvalue| {mu}");
    let mut phi = vec![0.0; grid.n_points()];
    phi[1..grid.n_points() - 1].copy_from_slice(&v);
    let rec = reconstruct_spinor(&phi, lambda, &fields, Branch::UMinusIsMinusOne).unwrap();
    assert!(rec.residual < 1e-4, "residual {}", rec.residual);
    assert!((rec.spinor.l2_norm_sq() - 1.0).abs() < 1e-12);
}

#[test]
fn square_well_pipeline_agrees_with_direct_and_refines() {
    let eps = 0.5;
    let spec = PotentialSpec::SquareWell { eps };
    let mut gaps = Vec::new();
    for n in [1001, 2001, 4001] {
        let grid = Grid::new(20.0, n).unwrap();
        let pipe = gap_eigenvalues(&spec, &grid, Branch::UMinusIsMinusOne, 1e-12).unwrap();
        let direct = direct_gap_spectrum(&spec, &grid, DirectOperator::Reduced, DIRECT_TOL)
            .unwrap()
            .genuine_values();
        assert_eq!((pipe.len(), direct.len()), (1, 1));
        gaps.push((pipe[0].lambda - direct[0]).abs());
    }
    assert!(gaps[2] < 5e-3);
    assert!(gaps[2] < gaps[0], "{gaps:?}");
}

#[test]
fn negative_integral_forces_an_eigenvalue() {
    let grid = Grid::new(30.0, 2001).unwrap();
    for entry in common::corpus().into_iter().filter(|e| e.integral() < 0.0) {
        let r = gap_pipeline(&entry.fields(&grid), Branch::UMinusIsMinusOne, &GapOptions::default()).unwrap();
        assert!(!r.eigenpairs.is_empty(), "{} has none", entry.name);
        assert!(r.eigenpairs.iter().all(|p| p.lambda > -1.0 && p.lambda <= 0.0));
    }
}

#[test]
fn pipeline_eigenvalues_are_direct_eigenvalues() {
    // every pipeline eigenvalue whose state fits in the box (decay length
    // 1/sqrt(beta) below X/8) is seen by the truncated direct solver
    let x_max = 30.0;
    let grid = Grid::new(x_max, 3001).unwrap();
    for entry in common::corpus() {
        let fields = entry.fields(&grid);
        let r = gap_pipeline(&fields, Branch::UMinusIsMinusOne, &GapOptions::default()).unwrap();
        let direct: Vec<f64> = laxgap::direct::reduced_gap_candidates(&fields, DIRECT_TOL)
            .unwrap()
            .into_iter()
            .filter(|c| c.split.is_some())
            .map(|c| c.lambda)
            .collect();
        for p in r.eigenpairs.iter().filter(|p| p.beta.sqrt() * x_max > 8.0) {
            let nearest = direct.iter().map(|d| (d - p.lambda).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 5e-3, "{} j={} lambda={} nearest {nearest}", entry.name, p.j, p.lambda);
        }
    }
}
