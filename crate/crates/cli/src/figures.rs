//! Data bundles behind the four figures: excitation PMFs, tanh quenches,
//! nonlinear ramps and the linear-ramp saturation of r.

use std::path::Path;

use ermakov::closed_forms::asymptotic_r;
use ermakov::fock::negative_binomial_mass;
use ermakov::FrequencyProtocol;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, InitialConditions, IntegratorConfig, OscillatorConfig, OutputConfig, TimeConfig, TimeUnits};
use crate::output::{write_csv, write_json, ManifestEntry};
use crate::run::simulate;

pub const PMF_P_TILDE: [f64; 3] = [1e-1, 1e-2, 1e-4];
pub const PMF_K_MAX: usize = 500;
pub const TANH_EPSILONS: [f64; 5] = [0.001, 0.25, 0.5, 1.0, 2.0];
pub const RAMP_ETAS: [f64; 5] = [1.0, 1.5, 2.0, 2.5, 3.0];
pub const RAMP_TAUS: [f64; 5] = [12.5, 25.0, 50.0, 100.0, 200.0];

#[derive(Debug, Clone, Serialize)]
struct Bundle {
    figure: u32,
    title: String,
    /// Constants that do not come from a run config.
    parameters: serde_json::Value,
    configs: Vec<ExperimentConfig>,
    manifest: Vec<ManifestEntry>,
}

fn base(protocol: FrequencyProtocol, start: f64, end: f64, samples: usize, initial: InitialConditions, name: String) -> ExperimentConfig {
    ExperimentConfig {
        protocol,
        oscillator: OscillatorConfig::default(),
        time: TimeConfig { start: Some(start), end, samples, units: TimeUnits::Physical },
        integrator: IntegratorConfig { rel: 1e-11, abs: 1e-13 },
        initial,
        output: OutputConfig { name, ..OutputConfig::default() },
        sweep: None,
    }
}

/// Tanh quenches 1 → 3 centred at 0.
pub fn tanh_configs() -> Vec<ExperimentConfig> {
    TANH_EPSILONS
        .iter()
        .map(|&eps| {
            let p = FrequencyProtocol::tanh(1.0, 3.0, 0.0, eps).expect("valid tanh");
            let start = (-20.0 * eps).min(-10.0);
            base(p, start, 10.0, 2001, InitialConditions::Equilibrium, format!("tanh_eps_{eps}"))
        })
        .collect()
}

/// ω² = (δ|t|)^η at δ = 1 on [-20, 20].
pub fn nonlinear_configs() -> Vec<ExperimentConfig> {
    RAMP_ETAS
        .iter()
        .map(|&eta| {
            let p = FrequencyProtocol::nonlinear_symmetric(1.0, eta).expect("valid ramp");
            base(p, -20.0, 20.0, 8001, InitialConditions::Adiabatic, format!("ramp_eta_{eta}"))
        })
        .collect()
}

/// Linear ramps with δ = 1/τ on [-max(τ, 40 τ^{1/3}), 2τ].
pub fn linear_ramp_configs() -> Vec<ExperimentConfig> {
    RAMP_TAUS
        .iter()
        .map(|&tau| {
            let p = FrequencyProtocol::linear_symmetric(1.0 / tau).expect("valid ramp");
            let start = -(tau.max(40.0 * tau.cbrt()));
            base(p, start, 2.0 * tau, 4001, InitialConditions::Adiabatic, format!("ramp_tau_{tau}"))
        })
        .collect()
}

fn run_bundle(out: &Path, figure: u32, title: &str, parameters: serde_json::Value, configs: Vec<ExperimentConfig>) -> anyhow::Result<()> {
    let dir = format!("fig{figure}");
    let sims = configs.par_iter().map(simulate).collect::<Vec<_>>();
    let mut manifest = Vec::new();
    for (cfg, sim) in configs.iter().zip(sims) {
        manifest.extend(sim?.write(out, &format!("{dir}/{}", cfg.output.name))?);
    }
    let bundle = Bundle { figure, title: title.into(), parameters, configs, manifest };
    write_json(out, &format!("{dir}/bundle.json"), &bundle)
}

fn pmf_bundle(out: &Path) -> anyhow::Result<()> {
    let mut header = vec!["k".to_string(), "n".to_string()];
    header.extend(PMF_P_TILDE.iter().map(|p| format!("p_tilde_{p:e}")));
    let rows: Vec<Vec<f64>> = (0..=PMF_K_MAX)
        .map(|k| {
            let mut row = vec![k as f64, 2.0 * k as f64];
            row.extend(PMF_P_TILDE.iter().map(|&p| negative_binomial_mass(k, p)));
            row
        })
        .collect();
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let entry = write_csv(out, "fig1/pmf.csv", &refs, &rows)?;
    let parameters = serde_json::json!({ "p_tilde": PMF_P_TILDE, "k_max": PMF_K_MAX });
    let bundle = Bundle {
        figure: 1,
        title: "Excitation PMF of the dynamical ground state".into(),
        parameters,
        configs: Vec::new(),
        manifest: vec![entry],
    };
    write_json(out, "fig1/bundle.json", &bundle)
}

/// Write `fig1` .. `fig4` under `out`.
pub fn figures(out: &Path) -> anyhow::Result<()> {
    pmf_bundle(out)?;
    run_bundle(out, 2, "Tanh quench 1 -> 3 at several widths", serde_json::json!({ "epsilon": TANH_EPSILONS }), tanh_configs())?;
    let asymptotes: Vec<f64> = RAMP_ETAS.iter().map(|&e| asymptotic_r(e)).collect::<Result<_, _>>()?;
    run_bundle(
        out,
        3,
        "Symmetric ramps with omega^2 = |t|^eta",
        serde_json::json!({ "eta": RAMP_ETAS, "asymptotic_r": asymptotes }),
        nonlinear_configs(),
    )?;
    run_bundle(
        out,
        4,
        "Linear ramp omega^2 = |t|/tau",
        serde_json::json!({ "tau": RAMP_TAUS, "asymptotic_r": asymptotic_r(1.0)? }),
        linear_ramp_configs(),
    )?;
    Ok(())
}
