//! The two-axis estimation protocol and its Monte Carlo imprecision.
//!
//! Each trial draws a phase `φ` uniformly on `[0, 2π)`, sends the prepared
//! probe through `exp(-iφJ_y)`, takes one `J_x` shot and one `J_z` shot and
//! forms `φ_est = atan2(-j_z, j_x)`. Over `M` trials the imprecision is
//!
//! ```text
//! Δφ² = (R/M) Σᵢ min(|φᵢ - φ̂ᵢ|, 2π - |φᵢ - φ̂ᵢ|)²,   R = 2
//! ```
//!
//! Randomness is drawn from per-trial streams (see [`stream_seed`]), so a
//! run depends only on its configuration and master seed, never on thread
//! scheduling.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spin::{m_values, normalize_angle, DickeState, MeasurementDistribution, SpinAxis, SpinBasis};
use crate::squeezing::{prepare, PreparedState, SqueezingConfig};

/// Measurements per estimate: one along `x`, one along `z`.
pub const REPETITIONS_PER_ESTIMATE: usize = 2;
pub const DEFAULT_TRIALS: usize = 1000;

/// Sub-stream indices within one trial.
const STREAM_PHASE: u64 = 0;
const STREAM_SHOT_X: u64 = 1;
const STREAM_SHOT_Z: u64 = 2;
const STREAM_FALLBACK: u64 = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n_spins: usize,
    pub t_s: f64,
    /// Number of phase draws `M`.
    pub trials: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn new(n_spins: usize, t_s: f64, trials: usize, master_seed: u64) -> Self {
        Self {
            n_spins,
            t_s,
            trials,
            master_seed,
        }
    }

    pub fn repetitions(&self) -> usize {
        REPETITIONS_PER_ESTIMATE
    }

    pub fn squeezing(&self) -> SqueezingConfig {
        SqueezingConfig::new(self.n_spins, self.t_s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialRecord {
    pub phi_true: f64,
    pub j_x: f64,
    pub j_z: f64,
    /// The estimate, or the uniform replacement when `degenerate`.
    pub phi_est: f64,
    pub error: f64,
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImprecisionResult {
    pub delta_phi: f64,
    /// Delta-method standard error of `delta_phi`.
    pub stderr: f64,
    pub trials_used: usize,
    pub degenerate_count: usize,
    pub n_spins: usize,
    pub t_s: f64,
    pub repetitions: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub result: ImprecisionResult,
    pub trials: Vec<TrialRecord>,
}

/// Result of the single-shot estimator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Estimate {
    Angle(f64),
    /// `j_x = j_z = 0`: no direction to read.
    Degenerate,
}

/// `exp(-iφJ_y)|ψ₀⟩`.
pub fn apply_channel(prepared: &PreparedState, phi: f64) -> Result<DickeState> {
    if !phi.is_finite() {
        return Err(Error::InvalidArgument(format!("phase must be finite, got {phi}")));
    }
    prepared.state.rotate(SpinAxis::Y, phi)
}

/// `φ_est` with `sin φ_est = -j_z/r`, `cos φ_est = j_x/r`, in `[0, 2π)`.
pub fn estimate(j_x: f64, j_z: f64) -> Estimate {
    if j_x == 0.0 && j_z == 0.0 {
        return Estimate::Degenerate;
    }
    Estimate::Angle(normalize_angle((-j_z).atan2(j_x)))
}

/// Distance on the circle, `min(|Δ|, 2π - |Δ|)` for angles in `[0, 2π)`.
pub fn circular_error(phi_true: f64, phi_est: f64) -> f64 {
    let d = (normalize_angle(phi_true) - normalize_angle(phi_est)).abs();
    d.min(TAU - d)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sub-stream `shot` of trial `trial`: SplitMix64 applied in a chain,
/// `mix(mix(mix(master) ⊕ trial) ⊕ shot)`.
pub fn stream_seed(master_seed: u64, trial: u64, shot: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ trial) ^ shot)
}

pub fn stream(master_seed: u64, trial: u64, shot: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master_seed, trial, shot))
}

fn uniform_angle<R: Rng>(rng: &mut R) -> f64 {
    normalize_angle(rng.random::<f64>() * TAU)
}

/// A prepared probe plus its cached `J_y` eigen-coefficients, so each channel
/// application and read-out costs one O(N²) pass per axis.
#[derive(Clone, Debug)]
pub struct Protocol {
    prepared: PreparedState,
    basis: Arc<SpinBasis>,
    y_coefficients: Vec<C64>,
    outcomes: Vec<f64>,
}

impl Protocol {
    pub fn new(prepared: PreparedState) -> Result<Self> {
        let n = prepared.state.n_spins();
        let basis = SpinBasis::get(n)?;
        let y_coefficients = basis.y_eigen_coefficients(prepared.state.amplitudes());
        Ok(Self {
            prepared,
            basis,
            y_coefficients,
            outcomes: m_values(n),
        })
    }

    pub fn from_config(config: &SqueezingConfig) -> Result<Self> {
        Self::new(prepare(config)?)
    }

    pub fn prepared(&self) -> &PreparedState {
        &self.prepared
    }

    /// `J_x` and `J_z` outcome distributions after the channel with phase `phi`.
    pub fn shot_distributions(&self, phi: f64) -> (MeasurementDistribution, MeasurementDistribution) {
        // measuring J_x = rotating by -π/2 about y, then reading J_z
        let (x, z) =
            self.basis
                .z_probabilities_after_y_pair(&self.y_coefficients, phi - FRAC_PI_2, phi);
        (
            MeasurementDistribution::new(self.outcomes.clone(), x),
            MeasurementDistribution::new(self.outcomes.clone(), z),
        )
    }

    /// Trial `index` of a run seeded with `master_seed`.
    pub fn run_trial(&self, master_seed: u64, index: u64) -> TrialRecord {
        let phi_true = uniform_angle(&mut stream(master_seed, index, STREAM_PHASE));
        let (dist_x, dist_z) = self.shot_distributions(phi_true);
        let j_x = dist_x.sample(&mut stream(master_seed, index, STREAM_SHOT_X));
        let j_z = dist_z.sample(&mut stream(master_seed, index, STREAM_SHOT_Z));
        let (phi_est, degenerate) = match estimate(j_x, j_z) {
            Estimate::Angle(a) => (a, false),
            Estimate::Degenerate => (
                uniform_angle(&mut stream(master_seed, index, STREAM_FALLBACK)),
                true,
            ),
        };
        TrialRecord {
            phi_true,
            j_x,
            j_z,
            phi_est,
            error: circular_error(phi_true, phi_est),
            degenerate,
        }
    }

    /// `trials` independent trials, in parallel, aggregated in index order.
    pub fn run(&self, trials: usize, master_seed: u64) -> Result<ExperimentOutcome> {
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        let records: Vec<TrialRecord> = (0..trials as u64)
            .into_par_iter()
            .map(|i| self.run_trial(master_seed, i))
            .collect();
        let result = summarize(
            &records,
            self.prepared.config.n_spins,
            self.prepared.config.t_s,
        );
        Ok(ExperimentOutcome {
            result,
            trials: records,
        })
    }
}

/// Aggregate trial records into `Δφ` and its standard error.
pub fn summarize(records: &[TrialRecord], n_spins: usize, t_s: f64) -> ImprecisionResult {
    let m = records.len() as f64;
    let r = REPETITIONS_PER_ESTIMATE as f64;
    let squares: Vec<f64> = records.iter().map(|t| t.error * t.error).collect();
    let mean_sq = squares.iter().sum::<f64>() / m;
    let delta_phi = (r * mean_sq).sqrt();
    let stderr = if records.len() > 1 && delta_phi > 0.0 {
        let var = squares.iter().map(|s| (s - mean_sq).powi(2)).sum::<f64>() / (m - 1.0);
        r * (var / m).sqrt() / (2.0 * delta_phi)
    } else {
        0.0
    };
    ImprecisionResult {
        delta_phi,
        stderr,
        trials_used: records.len(),
        degenerate_count: records.iter().filter(|t| t.degenerate).count(),
        n_spins,
        t_s,
        repetitions: REPETITIONS_PER_ESTIMATE,
    }
}

/// Full Monte Carlo run: prepare, then [`Protocol::run`].
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    if config.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Protocol::from_config(&config.squeezing())?.run(config.trials, config.master_seed)
}

/// Upper bound of `Δφ`: every error at most π, times `sqrt(R)`.
pub fn max_imprecision() -> f64 {
    PI * (REPETITIONS_PER_ESTIMATE as f64).sqrt()
}
