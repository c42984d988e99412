#![allow(dead_code)]

use laxgap::potential::RiemannFields;
use laxgap::Grid;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Deserialize)]
struct Corpus {
    potentials: Vec<CorpusEntry>,
}

pub fn corpus() -> Vec<CorpusEntry> {
    let text = include_str!("../data/corpus.json");
    serde_json::from_str::<Corpus>(text).expect("corpus parses").potentials
}

impl CorpusEntry {
    /// Average of `V` over each node's dual cell, by exact interval overlap.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        let h = grid.spacing();
        let x_max = grid.half_width();
        grid.nodes()
            .iter()
            .map(|&x| {
                let (a, b) = ((x - 0.5 * h).max(-x_max), (x + 0.5 * h).min(x_max));
                let mass: f64 = self
                    .pieces
                    .iter()
                    .map(|p| (p.end.min(b) - p.start.max(a)).max(0.0) * p.value)
                    .sum();
                mass / (b - a)
            })
            .collect()
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|p| (p.end - p.start) * p.value).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.pieces.iter().fold(0.0, |m, p| m.max(p.value.abs()))
    }

    /// Fields with `u_- = -1` and `u_+ = 1 + V`.
    pub fn fields(&self, grid: &Grid) -> RiemannFields {
        let v = self.sample(grid);
        let n = grid.n_points();
        RiemannFields::new(grid.clone(), v.iter().map(|x| 1.0 + x).collect(), vec![-1.0; n], 0.0)
            .expect("valid fields")
    }

    /// The `(u_+, u_-)` plateau values.
    pub fn plateaus(&self) -> Vec<(f64, f64)> {
        let mut p: Vec<(f64, f64)> = self.pieces.iter().map(|p| (1.0 + p.value, -1.0)).collect();
        p.push((1.0, -1.0));
        p
    }
}

/// Dense symmetric reduction of `B u = mu A u`: eigenvalues of
/// `L^{-1} B L^{-T}` with `A = L L^T`, ascending.
pub fn dense_pencil_eigenvalues(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let l = a.clone().cholesky().expect("A is positive definite").l();
    let li = l.try_inverse().expect("invertible");
    let c = &li * b * li.transpose();
    let c = 0.5 * (&c + c.transpose());
    let mut e: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}
