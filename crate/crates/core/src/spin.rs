//! Collective spin `j = N/2` in the Dicke basis.
//!
//! Amplitudes are stored with `m` descending: index `k = 0..=N` holds the
//! coefficient of `|j, m = j - k⟩`. Every operation returns a fresh state.
//!
//! Rotations about `x` and `y` go through one cached eigendecomposition per
//! `N`. In this basis `J_x` is the real symmetric tridiagonal matrix `T` with
//! off-diagonal entries `½·sqrt((k+1)(N-k))`, and `J_y = D T D⁻¹` with
//! `D = diag(iᵏ)`, so `exp(-iθJ_y) = D V exp(-iθΛ) Vᵀ D⁻¹` where `T = V Λ Vᵀ`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::tridiag::SymTridiagEigen;

/// Tolerance on `Σ|c_m|²` for a state to count as normalized.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Negative variances within this margin are round-off and clamp to zero.
pub const VARIANCE_CLAMP: f64 = 1e-12;

/// Wrap an angle into `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// `ln C(n, k)` for `k = 0..=n`, built from a log-factorial table so that
/// large `n` never overflows.
pub(crate) fn ln_binomial_row(n: usize) -> Vec<f64> {
    let mut ln_fact = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    ln_fact.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        ln_fact.push(acc);
    }
    (0..=n)
        .map(|k| ln_fact[n] - ln_fact[k] - ln_fact[n - k])
        .collect()
}

/// Measurement axis: a coordinate axis or a direction in the x–z plane,
/// `J_varphi = J_x·sin(varphi) + J_z·cos(varphi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpinAxis {
    X,
    Y,
    Z,
    /// Angle measured from `+z` towards `+x`, kept in `[0, 2π)`. Build it
    /// with [`SpinAxis::in_plane`].
    InPlane(f64),
}

impl SpinAxis {
    pub fn in_plane(varphi: f64) -> Self {
        SpinAxis::InPlane(normalize_angle(varphi))
    }
}

/// Pure state of `N` spin-1/2 particles in the symmetric subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeState {
    n_spins: usize,
    amplitudes: Vec<C64>,
}

impl DickeState {
    /// Wrap raw amplitudes (m-descending). Length must be `N + 1` and the
    /// vector must be normalized.
    pub fn from_amplitudes(n_spins: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::InvalidArgument("n_spins must be at least 1".into()));
        }
        if amplitudes.len() != n_spins + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes for N = {n_spins}, got {}",
                n_spins + 1,
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n_spins,
            amplitudes,
        })
    }

    /// All spins along `+x`: `c_m = 2^(-j)·sqrt(C(2j, j+m))`.
    pub fn coherent_x(n_spins: usize) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::InvalidArgument("n_spins must be at least 1".into()));
        }
        let half_log2 = 0.5 * n_spins as f64 * std::f64::consts::LN_2;
        let mut amplitudes: Vec<C64> = ln_binomial_row(n_spins)
            .into_iter()
            .map(|lb| C64::new((0.5 * lb - half_log2).exp(), 0.0))
            .collect();
        let norm = amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        amplitudes.iter_mut().for_each(|c| *c /= norm);
        Ok(Self {
            n_spins,
            amplitudes,
        })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Total spin `j = N/2`.
    pub fn spin(&self) -> f64 {
        0.5 * self.n_spins as f64
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Magnetic quantum numbers in storage order, `j, j-1, …, -j`.
    pub fn m_values(&self) -> Vec<f64> {
        m_values(self.n_spins)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &DickeState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &DickeState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `exp(-i·t_s·J_z²)`.
    pub fn one_axis_twist(&self, t_s: f64) -> DickeState {
        let j = self.spin();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let m = j - k as f64;
                c * C64::from_polar(1.0, -t_s * m * m)
            })
            .collect();
        DickeState {
            n_spins: self.n_spins,
            amplitudes,
        }
    }

    /// `exp(-i·angle·J_axis)` applied to the state.
    ///
    /// Fails with [`Error::Unitarity`] when the result drifts from unit norm
    /// by more than [`NORM_TOLERANCE`].
    pub fn rotate(&self, axis: SpinAxis, angle: f64) -> Result<DickeState> {
        let amplitudes = match axis {
            SpinAxis::Z => rotate_z(&self.amplitudes, angle),
            SpinAxis::X => SpinBasis::get(self.n_spins)?.rotate_x(&self.amplitudes, angle),
            SpinAxis::Y => SpinBasis::get(self.n_spins)?.rotate_y(&self.amplitudes, angle),
            SpinAxis::InPlane(varphi) => {
                // J_varphi = U J_z U† with U = exp(-i·varphi·J_y)
                let basis = SpinBasis::get(self.n_spins)?;
                let tilted = basis.rotate_y(&self.amplitudes, -varphi);
                let turned = rotate_z(&tilted, angle);
                basis.rotate_y(&turned, varphi)
            }
        };
        let out = DickeState {
            n_spins: self.n_spins,
            amplitudes,
        };
        let drift = (out.norm_sqr() - self.norm_sqr()).abs();
        if drift > NORM_TOLERANCE {
            return Err(Error::Unitarity {
                n_spins: self.n_spins,
                drift,
            });
        }
        Ok(out)
    }

    /// `J_axis |ψ⟩` (not a state; unnormalized).
    pub fn apply_operator(&self, axis: SpinAxis) -> Vec<C64> {
        apply_collective(self.n_spins, axis, &self.amplitudes)
    }

    /// `⟨ψ|J_axis|ψ⟩`.
    pub fn expectation(&self, axis: SpinAxis) -> f64 {
        let applied = self.apply_operator(axis);
        self.amplitudes
            .iter()
            .zip(&applied)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    /// `⟨J²⟩ - ⟨J⟩²`, clamped at zero for round-off below [`VARIANCE_CLAMP`].
    pub fn variance(&self, axis: SpinAxis) -> f64 {
        let applied = self.apply_operator(axis);
        let mean: f64 = self
            .amplitudes
            .iter()
            .zip(&applied)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let second: f64 = applied.iter().map(|c| c.norm_sqr()).sum();
        let var = second - mean * mean;
        if var < 0.0 && var > -VARIANCE_CLAMP * (1.0 + second) {
            0.0
        } else {
            var.max(0.0)
        }
    }

    /// Outcome statistics of a projective `J_axis` measurement.
    ///
    /// The state is rotated so that the `J_axis` eigenbasis lands on the
    /// `J_z` eigenbasis, then read off directly.
    pub fn measurement_distribution(&self, axis: SpinAxis) -> Result<MeasurementDistribution> {
        let rotated = match axis {
            SpinAxis::Z => self.clone(),
            SpinAxis::X => self.rotate(SpinAxis::Y, -FRAC_PI_2)?,
            SpinAxis::Y => self.rotate(SpinAxis::X, FRAC_PI_2)?,
            SpinAxis::InPlane(varphi) => self.rotate(SpinAxis::Y, -varphi)?,
        };
        Ok(MeasurementDistribution::new(
            self.m_values(),
            rotated.amplitudes.iter().map(|c| c.norm_sqr()).collect(),
        ))
    }
}

pub(crate) fn m_values(n_spins: usize) -> Vec<f64> {
    let j = 0.5 * n_spins as f64;
    (0..=n_spins).map(|k| j - k as f64).collect()
}

/// Off-diagonal of `J_x`: entry `k` couples `m = j-k` and `m = j-k-1`.
pub(crate) fn ladder(n_spins: usize) -> Vec<f64> {
    (0..n_spins)
        .map(|k| 0.5 * (((k + 1) * (n_spins - k)) as f64).sqrt())
        .collect()
}

fn rotate_z(amps: &[C64], angle: f64) -> Vec<C64> {
    let j = 0.5 * (amps.len() - 1) as f64;
    amps.iter()
        .enumerate()
        .map(|(k, c)| c * C64::from_polar(1.0, -angle * (j - k as f64)))
        .collect()
}

fn apply_collective(n_spins: usize, axis: SpinAxis, psi: &[C64]) -> Vec<C64> {
    let dim = n_spins + 1;
    let j = 0.5 * n_spins as f64;
    let off = ladder(n_spins);
    let jx = |k: usize| {
        let mut acc = C64::new(0.0, 0.0);
        if k > 0 {
            acc += psi[k - 1] * off[k - 1];
        }
        if k + 1 < dim {
            acc += psi[k + 1] * off[k];
        }
        acc
    };
    let jz = |k: usize| psi[k] * (j - k as f64);
    match axis {
        SpinAxis::Z => (0..dim).map(jz).collect(),
        SpinAxis::X => (0..dim).map(jx).collect(),
        SpinAxis::Y => (0..dim)
            .map(|k| {
                let mut acc = C64::new(0.0, 0.0);
                if k > 0 {
                    acc += psi[k - 1] * C64::new(0.0, off[k - 1]);
                }
                if k + 1 < dim {
                    acc -= psi[k + 1] * C64::new(0.0, off[k]);
                }
                acc
            })
            .collect(),
        SpinAxis::InPlane(varphi) => {
            let (s, c) = varphi.sin_cos();
            (0..dim).map(|k| jx(k) * s + jz(k) * c).collect()
        }
    }
}

/// Dense matrix of `J_axis` in the m-descending Dicke basis.
pub fn collective_operator_matrix(n_spins: usize, axis: SpinAxis) -> Result<Array2<C64>> {
    if n_spins == 0 {
        return Err(Error::InvalidArgument("n_spins must be at least 1".into()));
    }
    let dim = n_spins + 1;
    let mut out = Array2::zeros((dim, dim));
    let mut unit = vec![C64::new(0.0, 0.0); dim];
    for col in 0..dim {
        unit[col] = C64::new(1.0, 0.0);
        for (row, v) in apply_collective(n_spins, axis, &unit).into_iter().enumerate() {
            out[[row, col]] = v;
        }
        unit[col] = C64::new(0.0, 0.0);
    }
    Ok(out)
}

/// Per-`N` rotation machinery: eigendecomposition of the `J_x` tridiagonal.
///
/// Immutable once built; shared through [`SpinBasis::get`].
#[derive(Debug)]
pub struct SpinBasis {
    n_spins: usize,
    eigen: SymTridiagEigen,
}

static BASIS_CACHE: OnceLock<Mutex<HashMap<usize, Arc<SpinBasis>>>> = OnceLock::new();

impl SpinBasis {
    pub fn new(n_spins: usize) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::InvalidArgument("n_spins must be at least 1".into()));
        }
        let eigen = SymTridiagEigen::new(&vec![0.0; n_spins + 1], &ladder(n_spins))?;
        Ok(Self { n_spins, eigen })
    }

    /// Cached basis for `n_spins`, built on first use.
    pub fn get(n_spins: usize) -> Result<Arc<SpinBasis>> {
        let cache = BASIS_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|poisoned| poisoned.into_inner());
        if let Some(basis) = guard.get(&n_spins) {
            return Ok(Arc::clone(basis));
        }
        let basis = Arc::new(SpinBasis::new(n_spins)?);
        guard.insert(n_spins, Arc::clone(&basis));
        Ok(basis)
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }

    /// Eigenvalues of `J_x` (equivalently `J_y`), ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        self.eigen.values()
    }

    fn dim(&self) -> usize {
        self.n_spins + 1
    }

    /// `Vᵀ x`.
    fn project(&self, x: &[C64]) -> (Vec<f64>, Vec<f64>) {
        let dim = self.dim();
        let v = self.eigen.vectors();
        let mut re = vec![0.0; dim];
        let mut im = vec![0.0; dim];
        for (k, xk) in x.iter().enumerate() {
            let row = &v[k * dim..(k + 1) * dim];
            for ((r, i), &vki) in re.iter_mut().zip(im.iter_mut()).zip(row) {
                *r += vki * xk.re;
                *i += vki * xk.im;
            }
        }
        (re, im)
    }

    /// `V c` with `c` split into real and imaginary parts.
    fn expand(&self, re: &[f64], im: &[f64]) -> Vec<C64> {
        let dim = self.dim();
        let v = self.eigen.vectors();
        (0..dim)
            .map(|k| {
                let row = &v[k * dim..(k + 1) * dim];
                C64::new(dot(row, re), dot(row, im))
            })
            .collect()
    }

    fn apply_phases(&self, re: &mut [f64], im: &mut [f64], angle: f64) {
        for ((r, i), &lambda) in re.iter_mut().zip(im.iter_mut()).zip(self.eigen.values()) {
            let (s, c) = (-angle * lambda).sin_cos();
            let (a, b) = (*r, *i);
            *r = a * c - b * s;
            *i = a * s + b * c;
        }
    }

    /// `exp(-i·angle·J_x) ψ`.
    pub fn rotate_x(&self, psi: &[C64], angle: f64) -> Vec<C64> {
        let (mut re, mut im) = self.project(psi);
        self.apply_phases(&mut re, &mut im, angle);
        self.expand(&re, &im)
    }

    /// `exp(-i·angle·J_y) ψ`.
    pub fn rotate_y(&self, psi: &[C64], angle: f64) -> Vec<C64> {
        let coeffs = self.y_eigen_coefficients(psi);
        let mut out = self.expand_after_y(&coeffs, angle);
        for (k, c) in out.iter_mut().enumerate() {
            *c *= i_power(k);
        }
        out
    }

    /// Coefficients of `ψ` in the `J_y` eigenbasis, `Vᵀ D⁻¹ ψ`, ordered like
    /// [`SpinBasis::eigenvalues`].
    pub fn y_eigen_coefficients(&self, psi: &[C64]) -> Vec<C64> {
        let untwisted: Vec<C64> = psi
            .iter()
            .enumerate()
            .map(|(k, c)| c * i_power(k).conj())
            .collect();
        let (re, im) = self.project(&untwisted);
        re.into_iter().zip(im).map(|(r, i)| C64::new(r, i)).collect()
    }

    /// `D⁻¹ exp(-i·angle·J_y) ψ` from precomputed `J_y` coefficients. The
    /// remaining diagonal phase `D` does not change any `J_z` probability.
    fn expand_after_y(&self, coeffs: &[C64], angle: f64) -> Vec<C64> {
        let mut re: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
        let mut im: Vec<f64> = coeffs.iter().map(|c| c.im).collect();
        self.apply_phases(&mut re, &mut im, angle);
        self.expand(&re, &im)
    }

    /// `J_z` outcome probabilities (m-descending) of `exp(-i·angle·J_y) ψ`,
    /// given `ψ`'s coefficients from [`SpinBasis::y_eigen_coefficients`].
    /// One O(N²) pass; the per-trial hot path of the estimation protocol.
    pub fn z_probabilities_after_y(&self, coeffs: &[C64], angle: f64) -> Vec<f64> {
        self.expand_after_y(coeffs, angle)
            .into_iter()
            .map(|c| c.norm_sqr())
            .collect()
    }

    /// [`SpinBasis::z_probabilities_after_y`] for two angles in one sweep
    /// over the eigenvector matrix.
    pub fn z_probabilities_after_y_pair(
        &self,
        coeffs: &[C64],
        angle_a: f64,
        angle_b: f64,
    ) -> (Vec<f64>, Vec<f64>) {
        let split = |angle: f64| {
            let mut re: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
            let mut im: Vec<f64> = coeffs.iter().map(|c| c.im).collect();
            self.apply_phases(&mut re, &mut im, angle);
            (re, im)
        };
        let (re_a, im_a) = split(angle_a);
        let (re_b, im_b) = split(angle_b);
        let dim = self.dim();
        let v = self.eigen.vectors();
        let mut out_a = Vec::with_capacity(dim);
        let mut out_b = Vec::with_capacity(dim);
        for row in v.chunks_exact(dim) {
            let [ra, ia, rb, ib] = dot4(row, [&re_a, &im_a, &re_b, &im_b]);
            out_a.push(ra * ra + ia * ia);
            out_b.push(rb * rb + ib * ib);
        }
        (out_a, out_b)
    }
}

fn i_power(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Four dot products of `row` sharing one pass over it.
#[inline]
fn dot4(row: &[f64], others: [&[f64]; 4]) -> [f64; 4] {
    let [a, b, c, d] = others;
    let mut acc = [0.0f64; 8];
    let lanes = row
        .chunks_exact(2)
        .zip(a.chunks_exact(2))
        .zip(b.chunks_exact(2))
        .zip(c.chunks_exact(2))
        .zip(d.chunks_exact(2));
    for ((((r, a), b), c), d) in lanes {
        acc[0] += r[0] * a[0];
        acc[1] += r[1] * a[1];
        acc[2] += r[0] * b[0];
        acc[3] += r[1] * b[1];
        acc[4] += r[0] * c[0];
        acc[5] += r[1] * c[1];
        acc[6] += r[0] * d[0];
        acc[7] += r[1] * d[1];
    }
    let mut out = [acc[0] + acc[1], acc[2] + acc[3], acc[4] + acc[5], acc[6] + acc[7]];
    if row.len() % 2 == 1 {
        let last = row.len() - 1;
        for (o, v) in out.iter_mut().zip([a, b, c, d]) {
            *o += row[last] * v[last];
        }
    }
    out
}

/// Outcomes `m = j..-j` of a collective-spin measurement and their
/// probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementDistribution {
    outcomes: Vec<f64>,
    probabilities: Vec<f64>,
}

impl MeasurementDistribution {
    pub fn new(outcomes: Vec<f64>, probabilities: Vec<f64>) -> Self {
        debug_assert_eq!(outcomes.len(), probabilities.len());
        Self {
            outcomes,
            probabilities,
        }
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .map(|(m, p)| m * p)
            .sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .map(|(m, p)| m * m * p)
            .sum()
    }

    /// Inverse-CDF lookup: first outcome whose cumulative probability
    /// exceeds `u ∈ [0, 1)`.
    pub fn sample_with_uniform(&self, u: f64) -> f64 {
        let mut cumulative = 0.0;
        for (m, p) in self.outcomes.iter().zip(&self.probabilities) {
            cumulative += p;
            if u < cumulative {
                return *m;
            }
        }
        // u beyond the (round-off short) total: last outcome with support
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .rev()
            .find(|(_, p)| **p > 0.0)
            .map(|(m, _)| *m)
            .unwrap_or(self.outcomes[self.outcomes.len() - 1])
    }

    /// One draw from `rng`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_with_uniform(rng.random::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn coherent_single_spin() {
        let s = DickeState::coherent_x(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(s.amplitudes()[0].re, h, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[1].re, h, epsilon = 1e-15);
    }

    #[test]
    fn coherent_two_spins() {
        let s = DickeState::coherent_x(2).unwrap();
        let expected = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert_abs_diff_eq!(a.re, e, epsilon = 1e-15);
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn coherent_moments_at_hundred_spins() {
        let s = DickeState::coherent_x(100).unwrap();
        assert_abs_diff_eq!(s.expectation(SpinAxis::X), 50.0, epsilon = 1e-10);
        assert_abs_diff_eq!(s.expectation(SpinAxis::Y), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.expectation(SpinAxis::Z), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.variance(SpinAxis::Y), 25.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s.variance(SpinAxis::Z), 25.0, epsilon = 1e-9);
        assert_eq!(s.variance(SpinAxis::X), 0.0);
    }

    #[test]
    fn coherent_state_survives_large_n() {
        let s = DickeState::coherent_x(2480).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.expectation(SpinAxis::X), 1240.0, epsilon = 1e-8);
    }

    #[test]
    fn rejects_zero_spins_and_bad_amplitudes() {
        assert!(DickeState::coherent_x(0).is_err());
        assert!(DickeState::from_amplitudes(2, vec![c(1.0)]).is_err());
        assert!(matches!(
            DickeState::from_amplitudes(1, vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(collective_operator_matrix(0, SpinAxis::Z).is_err());
    }

    #[test]
    fn operator_matrices_for_one_spin() {
        let z = collective_operator_matrix(1, SpinAxis::Z).unwrap();
        assert_eq!(z[[0, 0]], c(0.5));
        assert_eq!(z[[1, 1]], c(-0.5));
        assert_eq!(z[[0, 1]], c(0.0));
        let x = collective_operator_matrix(1, SpinAxis::X).unwrap();
        assert_abs_diff_eq!(x[[0, 1]].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(x[[1, 0]].re, 0.5, epsilon = 1e-15);
        assert_eq!(x[[0, 0]], c(0.0));
    }

    #[test]
    fn commutator_two_spins() {
        let jx = collective_operator_matrix(2, SpinAxis::X).unwrap();
        let jy = collective_operator_matrix(2, SpinAxis::Y).unwrap();
        let jz = collective_operator_matrix(2, SpinAxis::Z).unwrap();
        let comm = jx.dot(&jy) - jy.dot(&jx);
        for (a, b) in comm.iter().zip(jz.iter()) {
            assert_abs_diff_eq!(a.re, (C64::i() * b).re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, (C64::i() * b).im, epsilon = 1e-12);
        }
    }

    #[test]
    fn twist_is_diagonal_phase() {
        let s = DickeState::coherent_x(2).unwrap();
        assert_eq!(s.one_axis_twist(0.0), s);
        let t = 0.37;
        let tw = s.one_axis_twist(t);
        let e = C64::from_polar(0.5, -t);
        assert_abs_diff_eq!((tw.amplitudes()[0] - e).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((tw.amplitudes()[2] - e).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            (tw.amplitudes()[1] - c(std::f64::consts::FRAC_1_SQRT_2)).norm(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn twist_of_single_spin_is_global_phase() {
        let s = DickeState::coherent_x(1).unwrap();
        let tw = s.one_axis_twist(1.3);
        assert_abs_diff_eq!(tw.fidelity(&s), 1.0, epsilon = 1e-14);
        for axis in [SpinAxis::X, SpinAxis::Y, SpinAxis::Z] {
            assert_abs_diff_eq!(tw.expectation(axis), s.expectation(axis), epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_angle_rotation_is_identity() {
        let s = DickeState::coherent_x(9).unwrap().one_axis_twist(0.2);
        for axis in [SpinAxis::X, SpinAxis::Y, SpinAxis::Z, SpinAxis::in_plane(1.0)] {
            let r = s.rotate(axis, 0.0).unwrap();
            assert_abs_diff_eq!(r.fidelity(&s), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn quarter_turn_about_y_points_single_spin_down() {
        let r = DickeState::coherent_x(1)
            .unwrap()
            .rotate(SpinAxis::Y, PI / 2.0)
            .unwrap();
        assert_abs_diff_eq!(r.expectation(SpinAxis::Z), -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.expectation(SpinAxis::X), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rotation_sign_contract() {
        let phi = 0.3;
        let r = DickeState::coherent_x(6)
            .unwrap()
            .rotate(SpinAxis::Y, phi)
            .unwrap();
        assert_abs_diff_eq!(r.expectation(SpinAxis::X), 3.0 * phi.cos(), epsilon = 1e-9);
        assert_abs_diff_eq!(r.expectation(SpinAxis::Z), -3.0 * phi.sin(), epsilon = 1e-9);
    }

    #[test]
    fn in_plane_expectation_of_coherent_state() {
        let s = DickeState::coherent_x(40).unwrap();
        for i in 0..16 {
            let v = i as f64 * 0.4;
            assert_abs_diff_eq!(
                s.expectation(SpinAxis::in_plane(v)),
                20.0 * v.sin(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn in_plane_rotation_about_z_direction_matches_z() {
        let s = DickeState::coherent_x(7).unwrap().one_axis_twist(0.3);
        let a = s.rotate(SpinAxis::in_plane(0.0), 0.8).unwrap();
        let b = s.rotate(SpinAxis::Z, 0.8).unwrap();
        assert_abs_diff_eq!(a.fidelity(&b), 1.0, epsilon = 1e-12);
        let a = s.rotate(SpinAxis::in_plane(PI / 2.0), 0.8).unwrap();
        let b = s.rotate(SpinAxis::X, 0.8).unwrap();
        assert_abs_diff_eq!(a.fidelity(&b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_distributions() {
        let s = DickeState::coherent_x(10).unwrap();
        let dx = s.measurement_distribution(SpinAxis::X).unwrap();
        assert_abs_diff_eq!(dx.probabilities()[0], 1.0, epsilon = 1e-12);
        assert_eq!(dx.outcomes()[0], 5.0);
        let dz = s.measurement_distribution(SpinAxis::Z).unwrap();
        let binom = ln_binomial_row(10);
        for (k, p) in dz.probabilities().iter().enumerate() {
            let expected = (binom[k] - 10.0 * std::f64::consts::LN_2).exp();
            assert_abs_diff_eq!(*p, expected, epsilon = 1e-14);
        }
    }

    #[test]
    fn distribution_moments_match_expectations() {
        let s = DickeState::coherent_x(12)
            .unwrap()
            .one_axis_twist(0.15)
            .rotate(SpinAxis::Y, 0.9)
            .unwrap();
        for axis in [SpinAxis::X, SpinAxis::Y, SpinAxis::Z, SpinAxis::in_plane(2.2)] {
            let d = s.measurement_distribution(axis).unwrap();
            assert_abs_diff_eq!(d.total(), 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(d.mean(), s.expectation(axis), epsilon = 1e-8);
            let var = d.second_moment() - d.mean().powi(2);
            assert_abs_diff_eq!(var, s.variance(axis), epsilon = 1e-8);
        }
    }

    #[test]
    fn inverse_cdf_sampling() {
        let point = MeasurementDistribution::new(vec![1.0, 0.0, -1.0], vec![0.0, 1.0, 0.0]);
        for u in [0.0, 0.3, 0.999_999] {
            assert_eq!(point.sample_with_uniform(u), 0.0);
        }
        let coin = MeasurementDistribution::new(vec![0.5, -0.5], vec![0.5, 0.5]);
        assert_eq!(coin.sample_with_uniform(0.3), 0.5);
        assert_eq!(coin.sample_with_uniform(0.7), -0.5);
        // round-off short total never walks off the end
        let short = MeasurementDistribution::new(vec![0.5, -0.5], vec![0.5, 0.5 - 1e-13]);
        assert_eq!(short.sample_with_uniform(1.0 - 1e-16), -0.5);
    }

    #[test]
    fn sample_mean_converges() {
        use rand::SeedableRng;
        let n = 20;
        let d = DickeState::coherent_x(n)
            .unwrap()
            .measurement_distribution(SpinAxis::Z)
            .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let draws = 100_000;
        let mean = (0..draws).map(|_| d.sample(&mut rng)).sum::<f64>() / draws as f64;
        let stderr = (n as f64 / 4.0).sqrt() / (draws as f64).sqrt();
        assert!(mean.abs() < 4.0 * stderr, "mean {mean}, stderr {stderr}");
    }

    #[test]
    fn variance_clamps_round_off() {
        let s = DickeState::coherent_x(500).unwrap();
        let v = s.variance(SpinAxis::X);
        assert!(v >= 0.0 && v < 1e-8);
    }

    #[test]
    fn angle_wrapping() {
        assert_eq!(normalize_angle(0.0), 0.0);
        assert_abs_diff_eq!(normalize_angle(-0.5), TAU - 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(normalize_angle(7.0), 7.0 - TAU, epsilon = 1e-15);
        assert!(normalize_angle(TAU) < TAU);
        assert_eq!(SpinAxis::in_plane(-PI), SpinAxis::InPlane(PI));
    }
}
