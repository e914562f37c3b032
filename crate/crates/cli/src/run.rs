//! A single protocol simulation: integrate, diagnose on a grid, emit files.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use ermakov::diagnostics::{fock_variances_sigma_form, ground_energy};
use ermakov::fock::ground_excitation_pmf;
use ermakov::{adiabatic_ics, diagnose, equilibrium_ics, integrate, ErmakovTrajectory};
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, InitialConditions, COLUMNS};
use crate::output::{write_csv, write_json, ManifestEntry};

/// Diagnostics at one output time. Squeezing quantities are NaN where ω = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub t: f64,
    pub omega: f64,
    pub sigma: f64,
    pub sigma_dot: f64,
    pub q: f64,
    pub r: f64,
    pub phi: f64,
    pub chi: f64,
    pub n_exc: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub phase_integral: f64,
}

impl Row {
    pub fn values(&self) -> Vec<f64> {
        vec![self.t, self.omega, self.sigma, self.sigma_dot, self.q, self.r, self.phi, self.chi, self.n_exc, self.var_q, self.var_p]
    }

    pub fn get(&self, column: &str) -> Option<f64> {
        COLUMNS.iter().position(|c| *c == column).map(|i| self.values()[i])
    }
}

pub struct Simulation {
    pub config: ExperimentConfig,
    pub trajectory: ErmakovTrajectory,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub halvings: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub final_t: f64,
    pub final_q: f64,
    pub final_r: f64,
    pub observables: BTreeMap<String, f64>,
    /// Mean energy of the evolved ground state at the final time.
    pub final_energy: f64,
    /// Energy above the instantaneous ground level, Q ħω/2 - ħω/2.
    pub excess_energy: f64,
    /// p(0), p(2), ... at the final time; empty when ω = 0.
    pub pmf_head: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub integrator: IntegratorStats,
    pub summary: Summary,
    pub manifest: Vec<ManifestEntry>,
}

/// Integrate and diagnose without touching the filesystem.
pub fn simulate(cfg: &ExperimentConfig) -> anyhow::Result<Simulation> {
    cfg.validate()?;
    let params = cfg.oscillator.params()?;
    let (t0, t1) = cfg.time_span()?;
    let ics = match cfg.initial {
        InitialConditions::Equilibrium => equilibrium_ics(&cfg.protocol, t0, &params)?,
        InitialConditions::Adiabatic => adiabatic_ics(&cfg.protocol, t0, &params)?,
        InitialConditions::Explicit { sigma, sigma_dot } => (sigma, sigma_dot),
    };
    let trajectory = integrate(&cfg.protocol, &params, ics, (t0, t1), cfg.integrator.tolerances())
        .with_context(|| format!("integrating {:?} over [{t0}, {t1}]", cfg.protocol))?;
    let rows = cfg.grid()?.into_iter().map(|t| row_at(&trajectory, t)).collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Simulation { config: cfg.clone(), trajectory, rows })
}

pub fn row_at(traj: &ErmakovTrajectory, t: f64) -> anyhow::Result<Row> {
    let s = traj.state_at(t)?;
    let omega = traj.omega_at(t)?;
    let params = &traj.params;
    let mut row = Row {
        t,
        omega,
        sigma: s.sigma,
        sigma_dot: s.sigma_dot,
        q: f64::NAN,
        r: f64::NAN,
        phi: f64::NAN,
        chi: f64::NAN,
        n_exc: f64::NAN,
        var_q: f64::NAN,
        var_p: f64::NAN,
        phase_integral: s.phase_integral,
    };
    if omega > 0.0 {
        let d = diagnose(&s, omega, params).with_context(|| format!("diagnostics at t = {t}"))?;
        row.q = d.q;
        row.r = d.squeeze.r;
        row.phi = d.squeeze.phi;
        row.chi = d.squeeze.chi;
        row.n_exc = d.mean_excitations;
        row.var_q = d.var_q;
        row.var_p = d.var_p;
    } else {
        let (vq, vp) = fock_variances_sigma_form(0, s.sigma, s.sigma_dot, params);
        row.var_q = vq;
        row.var_p = vp;
    }
    Ok(row)
}

impl Simulation {
    pub fn summary(&self) -> anyhow::Result<Summary> {
        let last = *self.rows.last().expect("grid has at least two points");
        let params = &self.trajectory.params;
        let observables = self.config.output.observables.iter().map(|name| (name.clone(), last.get(name).unwrap_or(f64::NAN))).collect();
        let final_energy = ground_energy(last.sigma, last.sigma_dot, last.omega, params)?;
        let ground_level = 0.5 * params.hbar * last.omega.max(0.0);
        let pmf_head = if last.r.is_finite() && self.config.output.pmf_head > 0 {
            ground_excitation_pmf(last.r, self.config.output.pmf_head - 1).masses
        } else {
            Vec::new()
        };
        Ok(Summary {
            final_t: last.t,
            final_q: last.q,
            final_r: last.r,
            observables,
            final_energy,
            excess_energy: final_energy - ground_level,
            pmf_head,
        })
    }

    pub fn stats(&self) -> IntegratorStats {
        let s = self.trajectory.stats();
        IntegratorStats { accepted: s.accepted, rejected: s.rejected, evaluations: s.evaluations, halvings: s.halvings }
    }

    /// Write the trajectory CSV (and optionally the raw state) under `root`.
    pub fn write(&self, root: &Path, stem: &str) -> anyhow::Result<Vec<ManifestEntry>> {
        let table: Vec<Vec<f64>> = self.rows.iter().map(Row::values).collect();
        let mut manifest = vec![write_csv(root, &format!("{stem}.csv"), &COLUMNS, &table)?];
        if self.config.output.ermakov_csv {
            let raw: Vec<Vec<f64>> = self.rows.iter().map(|r| vec![r.t, r.omega, r.sigma, r.sigma_dot, r.phase_integral]).collect();
            manifest.push(write_csv(root, &format!("{stem}.ermakov.csv"), &["t", "omega", "sigma", "sigma_dot", "phase_integral"], &raw)?);
        }
        Ok(manifest)
    }
}

/// Run one configuration and write `<name>.csv` plus `<name>.report.json`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> anyhow::Result<RunReport> {
    let sim = simulate(cfg)?;
    let stem = cfg.output.name.clone();
    let manifest = sim.write(out, &stem)?;
    let report = RunReport { config: cfg.clone(), integrator: sim.stats(), summary: sim.summary()?, manifest };
    write_json(out, &format!("{stem}.report.json"), &report)?;
    Ok(report)
}
