//! Choosing the twisting time.
//!
//! The search runs over the rescaled time `u = t_s·N^(2/3)` on
//! `[0, 2·N^(1/6)]`, i.e. `t_s ∈ [0, 2/sqrt(N)]`. A coarse grid locates the
//! valley and golden-section search refines it. Every evaluation reuses the
//! same master seed, so all candidate times see the same phases and the same
//! shot uniforms (common random numbers) and their differences are not
//! swamped by Monte Carlo noise.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrology::{ExperimentConfig, ImprecisionResult, Protocol, DEFAULT_TRIALS};
use crate::squeezing::{quantum_fisher_information, SqueezingConfig};

const INV_GOLDEN: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub trials: usize,
    pub master_seed: u64,
    pub coarse_points: usize,
    /// Final bracket width in `u`.
    pub resolution: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            master_seed: 0,
            coarse_points: 32,
            resolution: 0.01,
        }
    }
}

impl SearchOptions {
    pub fn new(trials: usize, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            ..Self::default()
        }
    }
}

/// One evaluated candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridEvaluation {
    pub scaled_time: f64,
    pub result: ImprecisionResult,
}

#[derive(Clone, Debug)]
pub struct OptimizationResult {
    pub n_spins: usize,
    pub t_s_opt: f64,
    /// `t_s_opt · N^(2/3)`.
    pub scaled_opt: f64,
    pub best: ImprecisionResult,
    pub coarse: Vec<GridEvaluation>,
    pub refined: Vec<GridEvaluation>,
    /// The coarse minimum sat on an end of the search range.
    pub on_boundary: bool,
}

/// Optimized operating point for one `N`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub n_spins: usize,
    pub t_s: f64,
    pub delta_phi: f64,
    pub delta_phi_stderr: f64,
    pub fisher: f64,
    pub degenerate_count: usize,
}

fn time_scale(n_spins: usize) -> f64 {
    (n_spins as f64).powf(2.0 / 3.0)
}

/// Upper end of the `u` range, `2·N^(1/6)`.
pub fn scaled_range(n_spins: usize) -> f64 {
    2.0 * (n_spins as f64).powf(1.0 / 6.0)
}

/// `Δφ` at rescaled time `u`.
pub fn imprecision_at(n_spins: usize, scaled_time: f64, options: &SearchOptions) -> Result<ImprecisionResult> {
    let config = ExperimentConfig::new(
        n_spins,
        scaled_time / time_scale(n_spins),
        options.trials,
        options.master_seed,
    );
    let protocol = Protocol::from_config(&config.squeezing())?;
    Ok(protocol.run(config.trials, config.master_seed)?.result)
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol`. Returns every evaluation made, in
/// order; the minimum is the smallest of them.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo <= hi) || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "golden section needs lo <= hi and tol > 0, got [{lo}, {hi}], tol {tol}"
        )));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut trace = vec![(c, fc), (d, fd)];
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c)?;
            trace.push((c, fc));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d)?;
            trace.push((d, fd));
        }
    }
    Ok(trace)
}

/// Minimize `Δφ` over `t_s` for ensemble size `n_spins`.
pub fn optimize_squeezing_time(n_spins: usize, options: &SearchOptions) -> Result<OptimizationResult> {
    if options.coarse_points < 3 {
        return Err(Error::InvalidArgument(format!(
            "coarse grid needs at least 3 points, got {}",
            options.coarse_points
        )));
    }
    if options.trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let u_max = scaled_range(n_spins);
    let step = u_max / (options.coarse_points - 1) as f64;
    let coarse: Vec<GridEvaluation> = (0..options.coarse_points)
        .into_par_iter()
        .map(|i| {
            let u = i as f64 * step;
            imprecision_at(n_spins, u, options).map(|result| GridEvaluation {
                scaled_time: u,
                result,
            })
        })
        .collect::<Result<_>>()?;

    let best_index = argmin(coarse.iter().map(|g| g.result.delta_phi));
    let on_boundary = best_index == 0 || best_index + 1 == coarse.len();
    if on_boundary {
        log::warn!(
            "N = {n_spins}: coarse minimum at u = {:.3} lies on the search boundary",
            coarse[best_index].scaled_time
        );
    }

    let lo = coarse[best_index.saturating_sub(1)].scaled_time;
    let hi = coarse[(best_index + 1).min(coarse.len() - 1)].scaled_time;
    let mut refined = Vec::new();
    golden_section(
        |u| {
            let result = imprecision_at(n_spins, u, options)?;
            refined.push(GridEvaluation {
                scaled_time: u,
                result,
            });
            Ok(result.delta_phi)
        },
        lo,
        hi,
        options.resolution,
    )?;

    let best = refined
        .iter()
        .chain(std::iter::once(&coarse[best_index]))
        .min_by(|a, b| a.result.delta_phi.total_cmp(&b.result.delta_phi))
        .copied()
        .expect("coarse grid is non-empty");

    Ok(OptimizationResult {
        n_spins,
        t_s_opt: best.result.t_s,
        scaled_opt: best.scaled_time,
        best: best.result,
        coarse,
        refined,
        on_boundary,
    })
}

/// Optimize `t_s` and record the Fisher information of the resulting probe.
pub fn sweep_point(n_spins: usize, options: &SearchOptions) -> Result<(SweepPoint, OptimizationResult)> {
    let opt = optimize_squeezing_time(n_spins, options)?;
    let protocol = Protocol::from_config(&SqueezingConfig::new(n_spins, opt.t_s_opt))?;
    let point = SweepPoint {
        n_spins,
        t_s: opt.t_s_opt,
        delta_phi: opt.best.delta_phi,
        delta_phi_stderr: opt.best.stderr,
        fisher: quantum_fisher_information(protocol.prepared()),
        degenerate_count: opt.best.degenerate_count,
    };
    Ok((point, opt))
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    values
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, v)| if v < best.1 { (i, v) } else { best })
        .0
}

/// Running median of width 3; the two end values are kept.
pub fn median3(values: &[f64]) -> Vec<f64> {
    if values.len() < 3 {
        return values.to_vec();
    }
    let mut out = values.to_vec();
    for i in 1..values.len() - 1 {
        let mut w = [values[i - 1], values[i], values[i + 1]];
        w.sort_by(f64::total_cmp);
        out[i] = w[1];
    }
    out
}

/// Start indices of local minima. A run of equal values counts once, when
/// the values on both sides of the run (where present) are larger.
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    let mut minima = Vec::new();
    if values.len() < 2 {
        return minima;
    }
    let mut start = 0;
    while start < values.len() {
        let mut end = start;
        while end + 1 < values.len() && values[end + 1] == values[start] {
            end += 1;
        }
        let left = start == 0 || values[start - 1] > values[start];
        let right = end + 1 == values.len() || values[end + 1] > values[start];
        if left && right && !(start == 0 && end + 1 == values.len()) {
            minima.push(start);
        }
        start = end + 1;
    }
    minima
}

/// Number of valleys in a noisy curve: local minima after [`median3`].
pub fn count_valleys(values: &[f64]) -> usize {
    local_minima(&median3(values)).len()
}
