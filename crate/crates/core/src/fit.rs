//! Power-law fits `y = a·N^(-b)` (decaying) or `y = a·N^b` (growing) by
//! ordinary least squares in log-log space.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trend {
    /// `y = a / N^b`, e.g. imprecision.
    Decaying,
    /// `y = a · N^b`, e.g. Fisher information.
    Growing,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
    pub stderr_prefactor: f64,
    pub stderr_exponent: f64,
    pub sample_count: usize,
    pub trend: Trend,
}

impl PowerLawFit {
    pub fn evaluate(&self, n: f64) -> f64 {
        match self.trend {
            Trend::Decaying => self.prefactor * n.powf(-self.exponent),
            Trend::Growing => self.prefactor * n.powf(self.exponent),
        }
    }
}

/// Fit `points = [(N, y), …]`. Standard errors come from the regression
/// residuals; the prefactor's is propagated from the intercept as `a·se(ln a)`.
pub fn fit_power_law(points: &[(f64, f64)], trend: Trend) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, y)) = points
        .iter()
        .find(|(n, y)| !(*y > 0.0) || !(*n >= 1.0) || !y.is_finite() || !n.is_finite())
    {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs N >= 1 and y > 0, got ({n}, {y})"
        )));
    }
    let count = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(n, _)| n.ln()).collect();
    let zs: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / count;
    let z_mean = zs.iter().sum::<f64>() / count;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    if sxx <= f64::EPSILON * count * x_mean.abs().max(1.0) {
        return Err(Error::InvalidArgument(
            "power-law fit needs at least two distinct N".into(),
        ));
    }
    let sxz: f64 = xs
        .iter()
        .zip(&zs)
        .map(|(x, z)| (x - x_mean) * (z - z_mean))
        .sum();
    let slope = sxz / sxx;
    let intercept = z_mean - slope * x_mean;
    let ssr: f64 = xs
        .iter()
        .zip(&zs)
        .map(|(x, z)| (z - intercept - slope * x).powi(2))
        .sum();
    let sigma2 = ssr / (count - 2.0);
    let se_slope = (sigma2 / sxx).sqrt();
    let se_intercept = (sigma2 * (1.0 / count + x_mean * x_mean / sxx)).sqrt();
    let prefactor = intercept.exp();
    let exponent = match trend {
        Trend::Decaying => -slope,
        Trend::Growing => slope,
    };
    Ok(PowerLawFit {
        prefactor,
        exponent,
        stderr_prefactor: prefactor * se_intercept,
        stderr_exponent: se_slope,
        sample_count: points.len(),
        trend,
    })
}

/// Standard quantum limit `1/sqrt(N)`.
pub fn sql_reference(n_spins: usize) -> f64 {
    1.0 / (n_spins as f64).sqrt()
}

/// Heisenberg limit `1/N`.
pub fn hl_reference(n_spins: usize) -> f64 {
    1.0 / n_spins as f64
}
