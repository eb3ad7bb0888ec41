//! Phase estimation with one-axis-twisted collective spins read out along
//! two orthogonal axes.
//!
//! The pipeline is: coherent spin state along `+x` → one-axis twisting plus
//! an analytic realignment ([`squeezing`]) → rotation `exp(-iφJ_y)` by the
//! unknown phase → one `J_x` shot and one `J_z` shot → `φ_est = atan2(-j_z, j_x)`
//! ([`metrology`]). [`optimize`] tunes the twisting time and [`fit`] extracts
//! power laws from sweeps over the ensemble size.

pub mod error;
pub mod fit;
pub mod husimi;
pub mod metrology;
pub mod optimize;
pub mod spin;
pub mod squeezing;
pub mod tridiag;

pub use error::{Error, Result};
pub use fit::{fit_power_law, hl_reference, sql_reference, PowerLawFit, Trend};
pub use husimi::{husimi_grid, husimi_normalization, husimi_value, HusimiGrid};
pub use metrology::{
    apply_channel, circular_error, estimate, run_experiment, Estimate, ExperimentConfig,
    ExperimentOutcome, ImprecisionResult, Protocol, TrialRecord,
};
pub use optimize::{
    optimize_squeezing_time, sweep_point, OptimizationResult, SearchOptions, SweepPoint,
};
pub use spin::{
    collective_operator_matrix, DickeState, MeasurementDistribution, SpinAxis, SpinBasis,
};
pub use squeezing::{
    adjustment_angle, prepare, quantum_fisher_information, PreparedState, SqueezingConfig,
};
