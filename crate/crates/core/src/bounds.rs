//! Eigenvalue exclusion from the Riemann invariants alone.
//!
//! Every eigenvalue `lambda` of the reduced operator satisfies, for every real
//! `c`, `c - lambda <= A(c)` or `c + lambda <= B(c)` with
//! `A(c) = ||(u_- + c)^+||_inf` and `B(c) = ||(u_+ - c)^-||_inf`. Each `c`
//! therefore excludes the open interval `(B(c) - c, c - A(c))` when it is
//! non-empty.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Result};
use crate::potential::RiemannFields;

/// Points in the default `c` sweep.
pub const DEFAULT_C_POINTS: usize = 101;
/// Tolerance when testing an eigenvalue against the bound.
pub const CHECK_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub c_values: Vec<f64>,
    /// `A(c)` per `c`.
    pub left_bound: Vec<f64>,
    /// `B(c)` per `c`.
    pub right_bound: Vec<f64>,
    /// Union of the excluded open intervals, merged and ascending.
    pub excluded: Vec<(f64, f64)>,
    /// `c* = min(min u_+, min -u_-)` when positive: no eigenvalues in `(-c*, c*)`.
    pub exclusion: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueVerdict {
    pub lambda: f64,
    pub pass: bool,
    /// The `c` with the smallest margin.
    pub worst_c: f64,
    /// `max(A - (c - lambda), B - (c + lambda))` at `worst_c`; negative means excluded.
    pub margin: f64,
}

/// `DEFAULT_C_POINTS` values evenly spaced over `[0, 1 + ||u_+||_inf]`.
pub fn default_c_values(fields: &RiemannFields) -> Vec<f64> {
    let top = 1.0 + fields.u_plus().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let n = DEFAULT_C_POINTS - 1;
    (0..=n).map(|i| top * i as f64 / n as f64).collect()
}

/// Bounds from the nodal values of `fields`.
pub fn evaluate_bounds(fields: &RiemannFields, c_values: &[f64]) -> Result<BoundCertificate> {
    evaluate_bounds_with_plateaus(fields, c_values, &[])
}

/// As `evaluate_bounds`, with extra `(u_+, u_-)` pairs included in the
/// sup-norms. Nodes next to a jump hold cell averages, so the plateau values
/// of a piecewise-constant potential are needed to see the true extremes.
pub fn evaluate_bounds_with_plateaus(
    fields: &RiemannFields,
    c_values: &[f64],
    plateaus: &[(f64, f64)],
) -> Result<BoundCertificate> {
    check_finite("c values", c_values)?;
    let u_plus: Vec<f64> = fields.u_plus().iter().copied().chain(plateaus.iter().map(|p| p.0)).collect();
    let u_minus: Vec<f64> = fields.u_minus().iter().copied().chain(plateaus.iter().map(|p| p.1)).collect();
    let top_minus = u_minus.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let bottom_plus = u_plus.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let mut left = Vec::with_capacity(c_values.len());
    let mut right = Vec::with_capacity(c_values.len());
    let mut intervals = Vec::new();
    for &c in c_values {
        // (u_- + c)^+ peaks where u_- does; (u_+ - c)^- where u_+ is smallest.
        let a = (top_minus + c).max(0.0);
        let b = (c - bottom_plus).max(0.0);
        left.push(a);
        right.push(b);
        let (lo, hi) = (b - c, c - a);
        if lo < hi {
            intervals.push((lo, hi));
        }
    }
    intervals.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut excluded: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (lo, hi) in intervals {
        match excluded.last_mut() {
            Some(last) if lo < last.1 => last.1 = last.1.max(hi),
            _ => excluded.push((lo, hi)),
        }
    }
    let c_star = bottom_plus.min(-top_minus);
    Ok(BoundCertificate {
        c_values: c_values.to_vec(),
        left_bound: left,
        right_bound: right,
        excluded,
        exclusion: (c_star > 0.0).then_some(c_star),
    })
}

impl BoundCertificate {
    /// The margin of `lambda` at the tightest probed `c`.
    pub fn verdict(&self, lambda: f64) -> EigenvalueVerdict {
        let mut worst = (f64::NAN, f64::INFINITY);
        for ((&c, &a), &b) in self.c_values.iter().zip(&self.left_bound).zip(&self.right_bound) {
            let m = (a - (c - lambda)).max(b - (c + lambda));
            if m < worst.1 {
                worst = (c, m);
            }
        }
        if let Some(c) = self.exclusion {
            let m = lambda.abs() - c;
            if m < worst.1 {
                worst = (c, m);
            }
        }
        EigenvalueVerdict {
            lambda,
            pass: worst.1 >= -CHECK_SLACK,
            worst_c: worst.0,
            margin: worst.1,
        }
    }
}

/// One verdict per eigenvalue.
pub fn check_eigenvalues(cert: &BoundCertificate, lambdas: &[f64]) -> Vec<EigenvalueVerdict> {
    lambdas.iter().map(|&l| cert.verdict(l)).collect()
}
