//! Hermitian block-tridiagonal matrices with 2x2 complex blocks.
//!
//! Unknowns are interleaved: index `2j + c` is component `c` at block `j`.
//! Eigenvalue counts use the block `LDL^*` factorization (Haynsworth inertia
//! additivity over the 2x2 Schur complements); eigenvectors use inverse
//! iteration with a banded LU (half-bandwidth 3 in the interleaved ordering).

use num_complex::Complex64;

use super::tridiag::{bisect_index, PIVOT_FLOOR};
use super::MAX_INVERSE_ITERATIONS;
use crate::error::{Error, Result};

pub type Block = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn block_adjoint(b: &Block) -> Block {
    [
        [b[0][0].conj(), b[1][0].conj()],
        [b[0][1].conj(), b[1][1].conj()],
    ]
}

pub fn block_mul(a: &Block, b: &Block) -> Block {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianBlockTridiag {
    diag: Vec<Block>,
    upper: Vec<Block>,
}

impl HermitianBlockTridiag {
    /// `upper[j]` is the block coupling block row `j` to block column `j + 1`;
    /// the lower blocks are its adjoints. Diagonal blocks are used as given,
    /// so `hermiticity_residual` reports any asymmetry in them.
    pub fn new(diag: Vec<Block>, upper: Vec<Block>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Empty("block tridiagonal matrix"));
        }
        if upper.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "{} upper blocks for {} diagonal blocks",
                upper.len(),
                diag.len()
            )));
        }
        let finite = |b: &Block| b.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite());
        if let Some(i) = diag.iter().position(|b| !finite(b)) {
            return Err(Error::NonFinite { what: "diagonal block", index: i });
        }
        if let Some(i) = upper.iter().position(|b| !finite(b)) {
            return Err(Error::NonFinite { what: "upper block", index: i });
        }
        Ok(Self { diag, upper })
    }

    pub fn n_blocks(&self) -> usize {
        self.diag.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.diag.len()
    }

    pub fn diag_blocks(&self) -> &[Block] {
        &self.diag
    }

    pub fn upper_blocks(&self) -> &[Block] {
        &self.upper
    }

    /// Entry `(r, c)` of the full matrix.
    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        let (br, cr) = (r / 2, r % 2);
        let (bc, cc) = (c / 2, c % 2);
        if br == bc {
            self.diag[br][cr][cc]
        } else if bc == br + 1 {
            self.upper[br][cr][cc]
        } else if br == bc + 1 {
            self.upper[bc][cc][cr].conj()
        } else {
            ZERO
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut m = vec![ZERO; n * n];
        for r in 0..n {
            let lo = (r / 2).saturating_sub(1) * 2;
            let hi = ((r / 2 + 2) * 2).min(n);
            for c in lo..hi {
                m[r * n + c] = self.entry(r, c);
            }
        }
        m
    }

    /// `max |H_rc - conj(H_cr)|`; only the diagonal blocks can contribute.
    pub fn hermiticity_residual(&self) -> f64 {
        self.diag
            .iter()
            .map(|b| {
                let mut r = 0.0_f64;
                for i in 0..2 {
                    for j in 0..2 {
                        r = r.max((b[i][j] - b[j][i].conj()).norm());
                    }
                }
                r
            })
            .fold(0.0, f64::max)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let nb = self.n_blocks();
        let mut y = vec![ZERO; self.dim()];
        for j in 0..nb {
            for c in 0..2 {
                let mut s = self.diag[j][c][0] * x[2 * j] + self.diag[j][c][1] * x[2 * j + 1];
                if j + 1 < nb {
                    s += self.upper[j][c][0] * x[2 * j + 2] + self.upper[j][c][1] * x[2 * j + 3];
                }
                if j > 0 {
                    let e = &self.upper[j - 1];
                    s += e[0][c].conj() * x[2 * j - 2] + e[1][c].conj() * x[2 * j - 1];
                }
                y[2 * j + c] = s;
            }
        }
        y
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|r| {
                let lo = (r / 2).saturating_sub(1) * 2;
                let hi = ((r / 2 + 2) * 2).min(n);
                (lo..hi).map(|c| self.entry(r, c).norm()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin enclosure of the (real) spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..n {
            let lo_c = (r / 2).saturating_sub(1) * 2;
            let hi_c = ((r / 2 + 2) * 2).min(n);
            let radius: f64 = (lo_c..hi_c)
                .filter(|&c| c != r)
                .map(|c| self.entry(r, c).norm())
                .sum();
            let d = self.entry(r, r).re;
            lo = lo.min(d - radius);
            hi = hi.max(d + radius);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let mut count = 0;
        let mut s = shifted(&self.diag[0], sigma);
        for j in 0.. {
            let (neg, inv) = inertia_and_inverse(&s);
            count += neg;
            if j + 1 == self.n_blocks() {
                break;
            }
            let e = &self.upper[j];
            let correction = block_mul(&block_adjoint(e), &block_mul(&inv, e));
            let d = shifted(&self.diag[j + 1], sigma);
            s = [
                [d[0][0] - correction[0][0], d[0][1] - correction[0][1]],
                [d[1][0] - correction[1][0], d[1][1] - correction[1][1]],
            ];
        }
        count
    }

    /// Eigenvalues in `[lo, hi)` to absolute accuracy `tol`, with unit eigenvectors.
    pub fn eigs_in(&self, lo: f64, hi: f64, tol: f64) -> Result<Vec<(f64, Vec<Complex64>)>> {
        if !(lo < hi) || !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "eigs_in needs lo < hi and tol > 0 (lo={lo}, hi={hi}, tol={tol})"
            )));
        }
        let c_lo = self.count_below(lo);
        let c_hi = self.count_below(hi);
        let values: Vec<f64> = (c_lo..c_hi)
            .map(|k| bisect_index(|x| self.count_below(x), k, lo, hi, tol))
            .collect();
        let vectors = self.inverse_iteration(&values, tol)?;
        Ok(values.into_iter().zip(vectors).collect())
    }

    fn inverse_iteration(&self, values: &[f64], tol: f64) -> Result<Vec<Vec<Complex64>>> {
        let n = self.dim();
        let norm = self.norm_inf().max(f64::MIN_POSITIVE);
        let accept = 1e3 * tol * norm;
        let cluster_gap = 1e-3 * norm;
        let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(values.len());
        let mut cluster_start = 0;
        for (idx, &lambda) in values.iter().enumerate() {
            if idx > 0 && (lambda - values[idx - 1]).abs() > cluster_gap {
                cluster_start = idx;
            }
            let lu = BandLu::factor(n, |r, c| {
                let v = self.entry(r, c);
                if r == c {
                    v - lambda
                } else {
                    v
                }
            }, f64::EPSILON * norm);
            let mut x: Vec<Complex64> = super::tridiag::start_vector(n, idx as u64)
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect();
            let mut residual = f64::INFINITY;
            let mut converged = false;
            for _ in 0..MAX_INVERSE_ITERATIONS {
                lu.solve(&mut x);
                for prev in &out[cluster_start..idx] {
                    let c: Complex64 = prev.iter().zip(&x).map(|(p, v)| p.conj() * v).sum();
                    x.iter_mut().zip(prev).for_each(|(v, p)| *v -= c * p);
                }
                let nx = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                if !(nx > 0.0 && nx.is_finite()) {
                    x = super::tridiag::start_vector(n, idx as u64 + 7919)
                        .into_iter()
                        .map(|v| Complex64::new(v, 0.0))
                        .collect();
                    continue;
                }
                x.iter_mut().for_each(|v| *v /= nx);
                let hx = self.matvec(&x);
                residual = hx
                    .iter()
                    .zip(&x)
                    .map(|(a, b)| (a - lambda * b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if residual <= accept {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::NoConvergence {
                    value: lambda,
                    iterations: MAX_INVERSE_ITERATIONS,
                    residual,
                });
            }
            out.push(x);
        }
        Ok(out)
    }
}

fn shifted(b: &Block, sigma: f64) -> Block {
    [[b[0][0] - sigma, b[0][1]], [b[1][0], b[1][1] - sigma]]
}

/// Negative-eigenvalue count and inverse of a Hermitian 2x2 block.
/// An eigenvalue within `1e-15` of zero (relative to the block scale) is
/// moved to `+1e-15`, matching the scalar Sturm convention.
fn inertia_and_inverse(s: &Block) -> (usize, Block) {
    let a = s[0][0].re;
    let d = s[1][1].re;
    let b = s[0][1];
    let scale = a.abs().max(d.abs()).max(b.norm());
    if !(scale > 0.0) || !scale.is_finite() {
        let inv = [
            [Complex64::new(1.0 / PIVOT_FLOOR, 0.0), ZERO],
            [ZERO, Complex64::new(1.0 / PIVOT_FLOOR, 0.0)],
        ];
        return (0, inv);
    }
    // work with the scaled block to keep the determinant in range
    let (a_s, d_s, b_s) = (a / scale, d / scale, b / scale);
    let m = 0.5 * (a_s + d_s);
    let r = (0.5 * (a_s - d_s)).hypot(b_s.norm());
    let big = if m >= 0.0 { m + r } else { m - r };
    let mut small = (a_s * d_s - b_s.norm_sqr()) / big;
    if small.abs() < 1e-15 {
        small = 1e-15;
    }
    let neg = usize::from(big < 0.0) + usize::from(small < 0.0);
    let f = 1.0 / (big * small * scale);
    let inv = [
        [Complex64::new(d_s * f, 0.0), -b_s * f],
        [-b_s.conj() * f, Complex64::new(a_s * f, 0.0)],
    ];
    (neg, inv)
}

const KL: usize = 3;
const WIDTH: usize = 2 * KL + 1;

/// Banded LU with partial pivoting for half-bandwidth `KL` matrices.
struct BandLu {
    rows: Vec<[Complex64; WIDTH]>,
    mult: Vec<[Complex64; KL]>,
    pivot: Vec<usize>,
}

impl BandLu {
    fn factor(n: usize, entry: impl Fn(usize, usize) -> Complex64, tiny: f64) -> Self {
        // Working row i covers columns base_i .. base_i + WIDTH.
        let mut work: Vec<(usize, [Complex64; WIDTH])> = (0..n)
            .map(|i| {
                let base = i.saturating_sub(KL);
                let mut vals = [ZERO; WIDTH];
                for (t, v) in vals.iter_mut().enumerate() {
                    let c = base + t;
                    if c < n && c + KL >= i && c <= i + KL {
                        *v = entry(i, c);
                    }
                }
                (base, vals)
            })
            .collect();
        let mut mult = vec![[ZERO; KL]; n];
        let mut pivot = vec![0; n];
        for k in 0..n {
            let last = (k + KL).min(n - 1);
            for row in work.iter_mut().take(last + 1).skip(k) {
                let shift = k - row.0;
                if shift > 0 {
                    let mut v = [ZERO; WIDTH];
                    v[..WIDTH - shift].copy_from_slice(&row.1[shift..]);
                    row.1 = v;
                    row.0 = k;
                }
            }
            let p = (k..=last)
                .max_by(|&a, &b| work[a].1[0].norm().total_cmp(&work[b].1[0].norm()).then(b.cmp(&a)))
                .unwrap_or(k);
            pivot[k] = p;
            work.swap(k, p);
            if work[k].1[0].norm() == 0.0 {
                work[k].1[0] = Complex64::new(tiny, 0.0);
            }
            let pivot_row = work[k].1;
            for r in k + 1..=last {
                let m = work[r].1[0] / pivot_row[0];
                mult[k][r - k - 1] = m;
                for t in 0..WIDTH {
                    work[r].1[t] -= m * pivot_row[t];
                }
            }
        }
        Self {
            rows: work.into_iter().map(|(_, v)| v).collect(),
            mult,
            pivot,
        }
    }

    fn solve(&self, rhs: &mut [Complex64]) {
        let n = rhs.len();
        for k in 0..n {
            rhs.swap(k, self.pivot[k]);
            let last = (k + KL).min(n - 1);
            for r in k + 1..=last {
                let v = rhs[k];
                rhs[r] -= self.mult[k][r - k - 1] * v;
            }
        }
        for k in (0..n).rev() {
            let row = &self.rows[k];
            let mut s = rhs[k];
            for t in 1..WIDTH {
                if k + t < n {
                    s -= row[t] * rhs[k + t];
                }
            }
            rhs[k] = s / row[0];
        }
    }
}
