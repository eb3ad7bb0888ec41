use std::f64::consts::TAU;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;

use twoaxis::optimize::{sweep_point, SearchOptions, SweepPoint};
use twoaxis::{
    apply_channel, fit_power_law, hl_reference, husimi_grid, prepare, run_experiment,
    sql_reference, ExperimentConfig, PowerLawFit, SpinAxis, SqueezingConfig, Trend,
};

use crate::output::{num, Document, Run};

/// Smallest ensemble accepted by `sweep`.
pub const SWEEP_FLOOR: usize = 16;
pub const CURVE_POINTS: usize = 720;

pub fn simulate(n: usize, t_s: f64, trials: usize, seed: u64, out: &Path) -> Result<()> {
    let config = ExperimentConfig::new(n, t_s, trials, seed);
    let outcome = run_experiment(&config)?;
    let mut run = Run::new(
        "simulate",
        json!({"n": n, "ts": t_s, "trials": trials, "seed": seed}),
        Some(seed),
    );
    let mut doc = run.document();
    doc.comment("final line: summary,delta_phi,delta_phi_stderr,degenerate_count,trials_used");
    doc.row(["phi_true", "j_x", "j_z", "phi_est", "error", "degenerate"]);
    for t in &outcome.trials {
        doc.row([
            num(t.phi_true),
            num(t.j_x),
            num(t.j_z),
            num(t.phi_est),
            num(t.error),
            u8::from(t.degenerate).to_string(),
        ]);
    }
    let r = outcome.result;
    doc.row([
        "summary".to_string(),
        num(r.delta_phi),
        num(r.stderr),
        r.degenerate_count.to_string(),
        r.trials_used.to_string(),
    ]);
    run.write(out, doc)?;
    run.finish(out)?;
    println!(
        "N = {n}, t_s = {t_s}: delta_phi = {:.6} ± {:.6} ({} degenerate of {})",
        r.delta_phi, r.stderr, r.degenerate_count, r.trials_used
    );
    Ok(())
}

fn fit_block(doc: &mut Document, quantity: &str, points: &[(f64, f64)], trend: Trend) -> Option<PowerLawFit> {
    match fit_power_law(points, trend) {
        Ok(f) => {
            doc.comment(&format!(
                "fit {quantity}: prefactor={} exponent={} stderr_prefactor={} stderr_exponent={} points={}",
                num(f.prefactor),
                num(f.exponent),
                num(f.stderr_prefactor),
                num(f.stderr_exponent),
                f.sample_count
            ));
            Some(f)
        }
        Err(e) => {
            doc.comment(&format!("fit {quantity}: skipped ({e})"));
            None
        }
    }
}

pub fn sweep(n_list: &[usize], trials: usize, seed: u64, out: &Path) -> Result<()> {
    let options = SearchOptions::new(trials, seed);
    let results: Vec<(usize, twoaxis::Result<SweepPoint>)> = n_list
        .par_iter()
        .map(|&n| {
            log::info!("optimizing N = {n}");
            (n, sweep_point(n, &options).map(|(p, _)| p))
        })
        .collect();

    let mut run = Run::new(
        "sweep",
        json!({"n_list": n_list, "trials": trials, "seed": seed}),
        Some(seed),
    );
    let mut doc = run.document();
    doc.row([
        "n", "t_s_opt", "delta_phi", "delta_phi_stderr", "fisher", "sql", "hl", "degenerate_count",
    ]);
    let mut points = Vec::new();
    for (n, result) in &results {
        match result {
            Ok(p) => {
                doc.row([
                    n.to_string(),
                    num(p.t_s),
                    num(p.delta_phi),
                    num(p.delta_phi_stderr),
                    num(p.fisher),
                    num(sql_reference(*n)),
                    num(hl_reference(*n)),
                    p.degenerate_count.to_string(),
                ]);
                points.push(*p);
            }
            Err(e) => {
                log::error!("N = {n} failed: {e}");
                doc.comment(&format!("failed n={n}: {e}"));
            }
        }
    }
    if points.is_empty() {
        bail!("every sweep point failed");
    }
    let dphi: Vec<_> = points.iter().map(|p| (p.n_spins as f64, p.delta_phi)).collect();
    let fisher: Vec<_> = points.iter().map(|p| (p.n_spins as f64, p.fisher)).collect();
    let dphi_fit = fit_block(&mut doc, "delta_phi", &dphi, Trend::Decaying);
    let fisher_fit = fit_block(&mut doc, "fisher", &fisher, Trend::Growing);
    run.write(out, doc)?;
    run.finish(out)?;

    for p in &points {
        println!(
            "N = {:5}  t_s = {:.6}  delta_phi = {:.6}  F = {:.1}",
            p.n_spins, p.t_s, p.delta_phi, p.fisher
        );
    }
    if let Some(f) = dphi_fit {
        println!("delta_phi = {:.3} / N^{:.4}", f.prefactor, f.exponent);
    }
    if let Some(f) = fisher_fit {
        println!("F = {:.3} N^{:.4}", f.prefactor, f.exponent);
    }
    Ok(())
}

pub fn husimi(
    n: usize,
    t_s: f64,
    phi: f64,
    theta_count: usize,
    phi_count: usize,
    out: &Path,
) -> Result<()> {
    let prepared = prepare(&SqueezingConfig::new(n, t_s))?;
    let state = apply_channel(&prepared, phi)?;
    let grid = husimi_grid(&state, theta_count, phi_count)?;
    let mut run = Run::new(
        "husimi",
        json!({"n": n, "ts": t_s, "phi": phi, "theta_count": theta_count, "phi_count": phi_count}),
        None,
    );
    let mut doc = run.document();
    doc.comment("rows: polar angle theta on [0, pi]; columns: azimuth phi on [0, 2pi)");
    doc.comment("first row: theta, then the azimuth of each column");
    doc.row(std::iter::once("theta".to_string()).chain(grid.phi_samples.iter().map(|&p| num(p))));
    for (theta, row) in grid.theta_samples.iter().zip(grid.values.outer_iter()) {
        doc.row(std::iter::once(num(*theta)).chain(row.iter().map(|&v| num(v))));
    }
    run.write(out, doc)?;
    run.finish(out)?;
    let (theta, azimuth, peak) = grid.argmax();
    println!(
        "peak Q = {peak:.6} at theta = {theta:.4}, phi = {azimuth:.4}; quadrature = {:.6}",
        grid.integrate()
    );
    Ok(())
}

pub fn curve(n: usize, t_s: f64, phi: f64, out: &Path) -> Result<()> {
    let prepared = prepare(&SqueezingConfig::new(n, t_s))?;
    let state = apply_channel(&prepared, phi)?;
    let nf = n as f64;
    let rows: Vec<[f64; 3]> = (0..CURVE_POINTS)
        .into_par_iter()
        .map(|k| {
            let varphi = TAU * k as f64 / CURVE_POINTS as f64;
            let axis = SpinAxis::in_plane(varphi);
            [
                varphi,
                state.expectation(axis) / nf,
                state.variance(axis).sqrt() / nf.sqrt(),
            ]
        })
        .collect();
    let mut run = Run::new("curve", json!({"n": n, "ts": t_s, "phi": phi}), None);
    let mut doc = run.document();
    doc.row(["varphi", "mean_over_n", "stddev_over_sqrt_n"]);
    for r in &rows {
        doc.row(r.iter().map(|&x| num(x)));
    }
    run.write(out, doc)?;
    run.finish(out)?;
    let peak = rows
        .iter()
        .max_by(|a, b| a[1].total_cmp(&b[1]))
        .expect("curve is non-empty");
    println!("mean peaks at varphi = {:.4} with value {:.6}", peak[0], peak[1]);
    Ok(())
}

/// Read `(n, delta_phi, fisher)` columns from a sweep file.
fn read_sweep(input: &Path) -> Result<Vec<(f64, f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_path(input)
        .with_context(|| format!("cannot read {}", input.display()))?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("{} has no '{name}' column", input.display()))
    };
    let (cn, cd, cf) = (column("n")?, column("delta_phi")?, column("fisher")?);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let field = |i: usize| -> Result<f64> {
            let s = record.get(i).context("short row")?;
            s.parse().with_context(|| format!("bad number '{s}'"))
        };
        rows.push((field(cn)?, field(cd)?, field(cf)?));
    }
    Ok(rows)
}

pub fn fit(input: &Path, out: &Path) -> Result<()> {
    let rows = read_sweep(input)?;
    let mut run = Run::new("fit", json!({"input": input.display().to_string()}), None);
    let mut doc = run.document();
    doc.row([
        "quantity", "trend", "prefactor", "exponent", "stderr_prefactor", "stderr_exponent", "points",
    ]);
    let series = [
        ("delta_phi", Trend::Decaying, rows.iter().map(|r| (r.0, r.1)).collect::<Vec<_>>()),
        ("fisher", Trend::Growing, rows.iter().map(|r| (r.0, r.2)).collect()),
    ];
    for (name, trend, points) in &series {
        let f = fit_power_law(points, *trend).with_context(|| format!("fitting {name}"))?;
        doc.row([
            name.to_string(),
            match trend {
                Trend::Decaying => "decaying".to_string(),
                Trend::Growing => "growing".to_string(),
            },
            num(f.prefactor),
            num(f.exponent),
            num(f.stderr_prefactor),
            num(f.stderr_exponent),
            f.sample_count.to_string(),
        ]);
        println!(
            "{name}: prefactor = {:.4} ± {:.4}, exponent = {:.4} ± {:.4} ({} points)",
            f.prefactor, f.stderr_prefactor, f.exponent, f.stderr_exponent, f.sample_count
        );
    }
    run.write(out, doc)?;
    run.finish(out)?;
    Ok(())
}
