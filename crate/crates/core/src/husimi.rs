//! Husimi quasiprobability `P(θ,φ) = |⟨θ,φ|ψ⟩|²` on the Bloch sphere.
//!
//! Coherent-state amplitudes use the azimuth phase `e^(-imφ)`:
//! `⟨j,m|θ,φ⟩ = sqrt(C(2j, j-m))·cos(θ/2)^(j+m)·sin(θ/2)^(j-m)·e^(-imφ)`.
//! Magnitudes are assembled in log space so large `N` neither overflows the
//! binomial nor underflows the trigonometric powers prematurely.

use std::f64::consts::{PI, TAU};

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spin::{ln_binomial_row, DickeState};
use crate::tridiag::SymTridiagEigen;

#[derive(Clone, Debug)]
pub struct HusimiGrid {
    pub n_spins: usize,
    /// Polar angles, uniform on `[0, π]` including both poles.
    pub theta_samples: Vec<f64>,
    /// Azimuths, uniform on `[0, 2π)`.
    pub phi_samples: Vec<f64>,
    /// `values[[i, k]] = P(theta_samples[i], phi_samples[k])`.
    pub values: Array2<f64>,
}

/// `|⟨j,m|θ,0⟩|` for every `m` (m-descending).
fn coherent_magnitudes(ln_binom: &[f64], theta: f64) -> Vec<f64> {
    let n = ln_binom.len() - 1;
    let ln_cos = (0.5 * theta).cos().abs().ln();
    let ln_sin = (0.5 * theta).sin().abs().ln();
    (0..=n)
        .map(|k| {
            // k = j - m, so cos carries exponent n - k and sin exponent k
            let up = n - k;
            let mut ln_mag = 0.5 * ln_binom[k];
            if up > 0 {
                ln_mag += up as f64 * ln_cos;
            }
            if k > 0 {
                ln_mag += k as f64 * ln_sin;
            }
            ln_mag.exp()
        })
        .collect()
}

/// Row of `P(θ, φ_k)` for fixed `θ`.
fn husimi_row(state: &DickeState, ln_binom: &[f64], theta: f64, phis: &[f64]) -> Vec<f64> {
    let j = state.spin();
    let weighted: Vec<C64> = coherent_magnitudes(ln_binom, theta)
        .into_iter()
        .zip(state.amplitudes())
        .map(|(a, c)| c * a)
        .collect();
    phis.iter()
        .map(|&phi| {
            // conj(e^(-imφ)) = e^(imφ), accumulated by recurrence in m
            let step = C64::from_polar(1.0, -phi);
            let mut phase = C64::from_polar(1.0, j * phi);
            let mut acc = C64::new(0.0, 0.0);
            for w in &weighted {
                acc += w * phase;
                phase *= step;
            }
            acc.norm_sqr().clamp(0.0, 1.0)
        })
        .collect()
}

/// `P(θ, φ)` at a single point.
pub fn husimi_value(state: &DickeState, theta: f64, phi: f64) -> f64 {
    let ln_binom = ln_binomial_row(state.n_spins());
    husimi_row(state, &ln_binom, theta, &[phi])[0]
}

/// Sample `P` on a `theta_count × phi_count` grid.
pub fn husimi_grid(state: &DickeState, theta_count: usize, phi_count: usize) -> Result<HusimiGrid> {
    if theta_count < 2 || phi_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "Husimi grid needs at least 2 samples per axis, got {theta_count} x {phi_count}"
        )));
    }
    let theta_samples: Vec<f64> = (0..theta_count)
        .map(|i| PI * i as f64 / (theta_count - 1) as f64)
        .collect();
    let phi_samples: Vec<f64> = (0..phi_count)
        .map(|k| TAU * k as f64 / phi_count as f64)
        .collect();
    let ln_binom = ln_binomial_row(state.n_spins());
    let mut values = Array2::zeros((theta_count, phi_count));
    for (i, &theta) in theta_samples.iter().enumerate() {
        for (k, p) in husimi_row(state, &ln_binom, theta, &phi_samples)
            .into_iter()
            .enumerate()
        {
            values[[i, k]] = p;
        }
    }
    Ok(HusimiGrid {
        n_spins: state.n_spins(),
        theta_samples,
        phi_samples,
        values,
    })
}

impl HusimiGrid {
    /// `(2j+1)/(4π)·∫P sinθ dθ dφ` by the trapezoid rule in `θ` and the
    /// periodic rectangle rule in `φ`. Equals 1 for a resolved grid.
    pub fn integrate(&self) -> f64 {
        let nt = self.theta_samples.len();
        let h_theta = PI / (nt - 1) as f64;
        let h_phi = TAU / self.phi_samples.len() as f64;
        let total: f64 = self
            .values
            .outer_iter()
            .zip(&self.theta_samples)
            .enumerate()
            .map(|(i, (row, theta))| {
                let w = if i == 0 || i == nt - 1 { 0.5 } else { 1.0 };
                w * theta.sin() * row.sum()
            })
            .sum();
        (self.n_spins as f64 + 1.0) / (4.0 * PI) * total * h_theta * h_phi
    }

    /// `(θ, φ, P)` at the largest sample.
    pub fn argmax(&self) -> (f64, f64, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for ((i, k), &v) in self.values.indexed_iter() {
            if v > best.2 {
                best = (i, k, v);
            }
        }
        (self.theta_samples[best.0], self.phi_samples[best.1], best.2)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` via the Golub–Welsch
/// eigenproblem of the Jacobi matrix.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(Error::InvalidArgument("quadrature order must be positive".into()));
    }
    let off: Vec<f64> = (1..order)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let eig = SymTridiagEigen::new(&vec![0.0; order], &off)?;
    let weights = (0..order)
        .map(|i| 2.0 * eig.vector_component(0, i).powi(2))
        .collect();
    Ok((eig.values().to_vec(), weights))
}

/// Sphere normalization `(2j+1)/(4π)·∫P dΩ` with Gauss–Legendre in `cos θ`
/// and enough uniform azimuths to integrate `P` exactly.
pub fn husimi_normalization(state: &DickeState) -> Result<f64> {
    let n = state.n_spins();
    let (nodes, weights) = gauss_legendre(n / 2 + 2)?;
    let phi_count = n + 2;
    let phis: Vec<f64> = (0..phi_count)
        .map(|k| TAU * k as f64 / phi_count as f64)
        .collect();
    let ln_binom = ln_binomial_row(n);
    let total: f64 = nodes
        .iter()
        .zip(&weights)
        .map(|(x, w)| {
            let theta = x.clamp(-1.0, 1.0).acos();
            w * husimi_row(state, &ln_binom, theta, &phis).iter().sum::<f64>()
        })
        .sum();
    Ok((n as f64 + 1.0) / (4.0 * PI) * total * TAU / phi_count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::SpinAxis;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn coherent_state_peaks_on_x() {
        let s = DickeState::coherent_x(30).unwrap();
        assert_abs_diff_eq!(husimi_value(&s, FRAC_PI_2, 0.0), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn antipodal_overlap() {
        let one = DickeState::coherent_x(1).unwrap();
        assert_abs_diff_eq!(husimi_value(&one, FRAC_PI_2, PI), 0.0, epsilon = 1e-15);
        // |⟨-x|+x⟩|² vanishes for every N
        let many = DickeState::coherent_x(20).unwrap();
        assert_abs_diff_eq!(husimi_value(&many, FRAC_PI_2, PI), 0.0, epsilon = 1e-15);
        // general closed form cos(Θ/2)^(4j) for an angle Θ between directions
        let theta = 1.1;
        let expected = (0.5 * (FRAC_PI_2 - theta)).cos().powi(40);
        assert_abs_diff_eq!(husimi_value(&many, theta, 0.0), expected, epsilon = 1e-13);
    }

    #[test]
    fn poles() {
        let s = DickeState::coherent_x(4).unwrap();
        // ⟨+z|+x⟩ per spin squared = 1/2
        assert_abs_diff_eq!(husimi_value(&s, 0.0, 0.0), 1.0 / 16.0, epsilon = 1e-14);
        assert_abs_diff_eq!(husimi_value(&s, PI, 1.0), 1.0 / 16.0, epsilon = 1e-14);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5).unwrap();
        assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        let int8: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert_abs_diff_eq!(int8, 2.0 / 9.0, epsilon = 1e-14);
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn normalization_exact_quadrature() {
        for n in [1, 2, 7, 40, 201] {
            let s = DickeState::coherent_x(n)
                .unwrap()
                .one_axis_twist(0.3 / n as f64)
                .rotate(SpinAxis::Y, 0.7)
                .unwrap();
            assert_abs_diff_eq!(husimi_normalization(&s).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn grid_shape_and_bounds() {
        let s = DickeState::coherent_x(10).unwrap();
        assert!(husimi_grid(&s, 1, 10).is_err());
        let g = husimi_grid(&s, 19, 36).unwrap();
        assert_eq!(g.values.dim(), (19, 36));
        assert!(g.values.iter().all(|v| (0.0..=1.0).contains(v)));
        let (theta, phi, p) = g.argmax();
        assert_abs_diff_eq!(theta, FRAC_PI_2, epsilon = 1e-12);
        assert_eq!(phi, 0.0);
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn uniform_grid_normalization() {
        let s = DickeState::coherent_x(100).unwrap().one_axis_twist(0.02);
        let g = husimi_grid(&s, 181, 360).unwrap();
        assert_abs_diff_eq!(g.integrate(), 1.0, epsilon = 1e-4);
    }
}
