// Fuzz target bodies, shared with the seed-replay test in the workspace.

#![allow(dead_code)]

use laxgap::bounds::{default_c_values, evaluate_bounds};
use laxgap::gap::Branch;
use laxgap::grid::{Grid, GridSpec};
use laxgap::potential::{riemann_invariants, PotentialSpec, SampledPotential};
use laxgap_cli::RunConfig;

pub fn potential_json(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = PotentialSpec::from_json_str(s) {
        let again = serde_json::to_string(&spec).unwrap();
        assert_eq!(PotentialSpec::from_json_str(&again).unwrap(), spec);
    }
}

pub fn run_config_json(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(c) = RunConfig::from_json_str(s) {
        let again = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json_str(&again).unwrap(), c);
    }
}

/// Layout: one byte for the point count, then little-endian f64 words for the
/// half-width, the phase origin, and interleaved (amplitude, phase gradient).
pub fn sampled_fields(data: &[u8]) {
    let Some((&n, rest)) = data.split_first() else { return };
    let n_points = 3 + n as usize % 62;
    let words: Vec<f64> = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if words.len() < 2 + 2 * n_points {
        return;
    }
    let pairs = &words[2..2 + 2 * n_points];
    let spec = PotentialSpec::Sampled(SampledPotential {
        grid: GridSpec {
            half_width: words[0],
            n_points,
        },
        amplitude: pairs.iter().step_by(2).copied().collect(),
        phase_gradient: pairs.iter().skip(1).step_by(2).copied().collect(),
        phase_origin: words[1],
    });
    if spec.validate().is_err() {
        return;
    }
    let grid = Grid::new(words[0], n_points).unwrap();
    let Ok(fields) = riemann_invariants(&spec, &grid) else { return };
    let _ = Branch::detect(&fields);
    let Ok(cert) = evaluate_bounds(&fields, &default_c_values(&fields)) else { return };
    for w in cert.excluded.windows(2) {
        assert!(w[0].1 <= w[1].0, "excluded intervals overlap: {:?}", cert.excluded);
    }
    let _ = cert.verdict(0.0);
}
