//! Eigendecomposition of real symmetric tridiagonal matrices.
//!
//! Eigenvalues come from implicit QL iterations with Wilkinson-style shifts
//! (no eigenvector accumulation, so O(n²) total). Eigenvectors are then
//! recovered one at a time by inverse iteration on the shifted matrix, which
//! is O(n) per iteration and per vector. Vectors whose eigenvalues sit in a
//! cluster are re-orthogonalized against the rest of their cluster.

use crate::error::{Error, Result};

const MAX_QL_ITERATIONS: usize = 60;
const INVERSE_ITERATIONS: usize = 3;
/// Relative gap (in units of the matrix norm) below which neighbouring
/// eigenvalues are treated as one cluster.
const CLUSTER_TOLERANCE: f64 = 1e-5;

/// Eigenpairs of a symmetric tridiagonal matrix, eigenvalues ascending.
///
/// Eigenvectors are stored row-major: `vectors[k * dim + i]` is component `k`
/// of the eigenvector belonging to `values[i]`.
#[derive(Clone, Debug)]
pub struct SymTridiagEigen {
    dim: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl SymTridiagEigen {
    /// Decompose the matrix with main diagonal `diag` and off-diagonal
    /// `offdiag` (`offdiag[i]` couples rows `i` and `i + 1`).
    pub fn new(diag: &[f64], offdiag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        if dim == 0 || offdiag.len() + 1 != dim {
            return Err(Error::InvalidArgument(format!(
                "tridiagonal shape mismatch: {} diagonal vs {} off-diagonal entries",
                dim,
                offdiag.len()
            )));
        }
        let values = eigenvalues(diag, offdiag)?;
        let vectors = eigenvectors(diag, offdiag, &values);
        Ok(Self {
            dim,
            values,
            vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row-major eigenvector matrix (columns are eigenvectors).
    pub fn vectors(&self) -> &[f64] {
        &self.vectors
    }

    /// Component `row` of eigenvector `col`.
    pub fn vector_component(&self, row: usize, col: usize) -> f64 {
        self.vectors[row * self.dim + col]
    }
}

fn matrix_norm(diag: &[f64], offdiag: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
            diag[i].abs() + left + right
        })
        .fold(0.0, f64::max)
}

/// Implicit QL with shifts; returns eigenvalues sorted ascending.
fn eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let anorm = matrix_norm(diag, offdiag);
    let eps = f64::EPSILON;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * (dd + eps * anorm) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::Numerical(format!(
                    "QL iteration did not converge for eigenvalue {l} of {n}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// LU factors of `T - shift·I` with partial pivoting. Row `k` of U holds
/// entries at columns `k`, `k + 1`, `k + 2`.
struct ShiftedLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn new(diag: &[f64], offdiag: &[f64], shift: f64, pivot_floor: f64) -> Self {
        let n = diag.len();
        let mut lu = ShiftedLu {
            u0: vec![0.0; n],
            u1: vec![0.0; n],
            u2: vec![0.0; n],
            mult: vec![0.0; n.saturating_sub(1)],
            swapped: vec![false; n.saturating_sub(1)],
        };
        // current (partially eliminated) row k
        let mut p0 = diag[0] - shift;
        let mut p1 = if n > 1 { offdiag[0] } else { 0.0 };
        let mut p2 = 0.0;
        for k in 0..n - 1 {
            let lo = offdiag[k];
            let dg = diag[k + 1] - shift;
            let up = if k + 2 < n { offdiag[k + 1] } else { 0.0 };
            if lo.abs() > p0.abs() {
                let mu = p0 / lo;
                lu.u0[k] = lo;
                lu.u1[k] = dg;
                lu.u2[k] = up;
                lu.mult[k] = mu;
                lu.swapped[k] = true;
                let next0 = p1 - mu * dg;
                let next1 = p2 - mu * up;
                p0 = next0;
                p1 = next1;
            } else {
                if p0 == 0.0 {
                    p0 = pivot_floor;
                }
                let mu = lo / p0;
                lu.u0[k] = p0;
                lu.u1[k] = p1;
                lu.u2[k] = p2;
                lu.mult[k] = mu;
                let next0 = dg - mu * p1;
                let next1 = up - mu * p2;
                p0 = next0;
                p1 = next1;
            }
            p2 = 0.0;
        }
        lu.u0[n - 1] = p0;
        for pivot in &mut lu.u0 {
            if pivot.abs() < pivot_floor {
                *pivot = if *pivot < 0.0 { -pivot_floor } else { pivot_floor };
            }
        }
        lu
    }

    fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        for k in 0..n - 1 {
            if self.swapped[k] {
                rhs.swap(k, k + 1);
            }
            rhs[k + 1] -= self.mult[k] * rhs[k];
        }
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= self.u1[i] * rhs[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * rhs[i + 2];
            }
            rhs[i] = acc / self.u0[i];
        }
    }
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Deterministic, well-spread starting vector for inverse iteration.
fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    let mut state = 0x9e37_79b9_7f4a_7c15u64 ^ (seed as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn eigenvectors(diag: &[f64], offdiag: &[f64], values: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut out = vec![0.0; n * n];
    if n == 1 {
        out[0] = 1.0;
        return out;
    }
    let anorm = matrix_norm(diag, offdiag).max(f64::MIN_POSITIVE);
    let eps = f64::EPSILON;
    let pivot_floor = eps * anorm;
    let cluster_gap = CLUSTER_TOLERANCE * anorm;

    let mut cluster_start = 0;
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (idx, &lambda) in values.iter().enumerate() {
        if idx > 0 && lambda - values[idx - 1] > cluster_gap {
            cluster_start = idx;
        }
        // nudge repeated eigenvalues apart so the shifted systems differ
        let shift = lambda + (idx - cluster_start) as f64 * 10.0 * eps * anorm;
        let lu = ShiftedLu::new(diag, offdiag, shift, pivot_floor);
        let mut v = start_vector(n, idx);
        normalize(&mut v);
        for _ in 0..INVERSE_ITERATIONS {
            lu.solve_in_place(&mut v);
            for prev in &columns[cluster_start..idx] {
                let overlap: f64 = v.iter().zip(prev).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(prev).for_each(|(a, b)| *a -= overlap * b);
            }
            normalize(&mut v);
        }
        // fix the sign: largest-magnitude component positive
        let (_, pivot) = v
            .iter()
            .enumerate()
            .fold((0usize, 0.0f64), |best, (i, &x)| {
                if x.abs() > best.1.abs() {
                    (i, x)
                } else {
                    best
                }
            });
        if pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        columns.push(v);
    }
    for (col, v) in columns.iter().enumerate() {
        for (row, &x) in v.iter().enumerate() {
            out[row * n + col] = x;
        }
    }
    out
}
