//! Cartesian-product parameter sweeps.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::output::{write_csv, write_json, ManifestEntry};
use crate::run::{simulate, RunReport};
use crate::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    /// Axis values in axis order.
    pub values: Vec<f64>,
    pub report: RunReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: ExperimentConfig,
    pub parameters: Vec<String>,
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of ln(excess energy) against ln(axis value); single-axis sweeps only.
    pub fitted_slope: Option<f64>,
    pub manifest: Vec<ManifestEntry>,
}

/// All points of the cartesian product, last axis varying fastest.
pub fn expand(cfg: &ExperimentConfig) -> Result<Vec<(Vec<f64>, ExperimentConfig)>, ConfigError> {
    let axes = match &cfg.sweep {
        Some(s) if !s.axes.is_empty() && s.axes.iter().all(|a| !a.values.is_empty()) => &s.axes,
        _ => return Err(ConfigError::Invalid { field: "sweep.axes".into(), message: "axes must be non-empty".into() }),
    };
    let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        combos = combos.into_iter().flat_map(|prefix| axis.values.iter().map(move |&v| [prefix.clone(), vec![v]].concat())).collect();
    }
    combos
        .into_iter()
        .map(|values| {
            let mut point = cfg.clone();
            for (axis, &v) in axes.iter().zip(&values) {
                point = point.with_parameter(&axis.parameter, v)?;
            }
            point.sweep = None;
            Ok((values, point))
        })
        .collect()
}

/// Least-squares slope of ln y against ln x, skipping non-positive pairs.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Run every point, in parallel on the current rayon pool, and write the
/// per-point trajectories plus `sweep.csv` and `sweep.report.json`.
pub fn sweep(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<SweepReport> {
    let points = expand(cfg)?;
    let parameters: Vec<String> = cfg.sweep.as_ref().map(|s| s.axes.iter().map(|a| a.parameter.clone()).collect()).unwrap_or_default();
    let sims = points.par_iter().map(|(_, c)| simulate(c)).collect::<Vec<_>>();

    // Files are written serially, in point order.
    let mut manifest = Vec::new();
    let mut results = Vec::with_capacity(points.len());
    for (index, ((values, point_cfg), sim)) in points.into_iter().zip(sims).enumerate() {
        let sim = sim?;
        let stem = format!("point_{index:04}/{}", point_cfg.output.name);
        let files = sim.write(out, &stem)?;
        manifest.extend(files.iter().cloned());
        let report = RunReport { config: point_cfg, integrator: sim.stats(), summary: sim.summary()?, manifest: files };
        results.push(SweepPoint { index, values, report });
    }

    let fitted_slope = (parameters.len() == 1).then(|| {
        let xs: Vec<f64> = results.iter().map(|p| p.values[0]).collect();
        let ys: Vec<f64> = results.iter().map(|p| p.report.summary.excess_energy).collect();
        loglog_slope(&xs, &ys)
    });

    let mut header: Vec<String> = parameters.clone();
    header.extend(["final_Q", "final_r", "final_energy", "excess_energy"].map(String::from));
    let rows: Vec<Vec<f64>> = results
        .iter()
        .map(|p| {
            let s = &p.report.summary;
            [p.values.clone(), vec![s.final_q, s.final_r, s.final_energy, s.excess_energy]].concat()
        })
        .collect();
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    manifest.push(write_csv(out, "sweep.csv", &header_refs, &rows)?);

    let report = SweepReport { config: cfg.clone(), parameters, points: results, fitted_slope: fitted_slope.flatten(), manifest };
    write_json(out, "sweep.report.json", &report)?;
    Ok(report)
}
