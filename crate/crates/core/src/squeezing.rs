//! One-axis-twisted probe states.
//!
//! `|ψ₀⟩ = exp(+iδ·J_x) exp(-i·t_s·J_z²) |+x⟩^⊗N`, where the realignment angle
//! `δ = ½·atan2(B, A)` with `A = 1 - cos(2t_s)^(N-2)` and
//! `B = 4·sin(t_s)·cos(t_s)^(N-2)` turns the squeezed quadrature onto `z`.

use crate::error::{Error, Result};
use crate::spin::{DickeState, SpinAxis};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezingConfig {
    pub n_spins: usize,
    /// Twisting time with the interaction strength folded in.
    pub t_s: f64,
}

impl SqueezingConfig {
    pub fn new(n_spins: usize, t_s: f64) -> Self {
        Self { n_spins, t_s }
    }

    /// `t_s · N^(2/3)`, the natural scale of the optimal twisting time.
    pub fn scaled_time(&self) -> f64 {
        self.t_s * (self.n_spins as f64).powf(2.0 / 3.0)
    }
}

#[derive(Clone, Debug)]
pub struct PreparedState {
    pub config: SqueezingConfig,
    pub delta_adj: f64,
    pub state: DickeState,
}

fn validate(n_spins: usize, t_s: f64) -> Result<()> {
    if n_spins < 3 {
        return Err(Error::InvalidArgument(format!(
            "the realignment angle needs N >= 3 (cos^(N-2) degenerates), got N = {n_spins}"
        )));
    }
    if !t_s.is_finite() || t_s < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "squeezing time must be finite and non-negative, got {t_s}"
        )));
    }
    Ok(())
}

/// Realignment angle `δ_adj = ½·atan2(B, A)`; zero when `A = B = 0`.
pub fn adjustment_angle(n_spins: usize, t_s: f64) -> Result<f64> {
    validate(n_spins, t_s)?;
    let power = (n_spins - 2) as i32;
    let a = 1.0 - (2.0 * t_s).cos().powi(power);
    let b = 4.0 * t_s.sin() * t_s.cos().powi(power);
    if a == 0.0 && b == 0.0 {
        return Ok(0.0);
    }
    Ok(0.5 * b.atan2(a))
}

/// Build the squeezed probe for `config`.
pub fn prepare(config: &SqueezingConfig) -> Result<PreparedState> {
    let delta_adj = adjustment_angle(config.n_spins, config.t_s)?;
    let twisted = DickeState::coherent_x(config.n_spins)?.one_axis_twist(config.t_s);
    // exp(+iδJ_x) is a rotation by -δ in the exp(-i·angle·J) convention
    let state = twisted.rotate(SpinAxis::X, -delta_adj)?;
    Ok(PreparedState {
        config: *config,
        delta_adj,
        state,
    })
}

/// Pure-state quantum Fisher information for the phase generator `J_y`,
/// `F = 4·Var(J_y)`.
pub fn quantum_fisher_information(prepared: &PreparedState) -> f64 {
    4.0 * prepared.state.variance(SpinAxis::Y)
}
