//! The validation suite: each criterion runs the pipeline against an
//! independent reference and reports a verdict with its measured errors.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use ermakov::closed_forms::{airy_full_ramp_with, airy_half_ramp, asymptotic_r, half_ramp_excess_energy, oscillation_average};
use ermakov::diagnostics::{adiabaticity_q, bogoliubov_uv, fock_variances, ground_energy, squeeze_params};
use ermakov::fock::{
    default_truncation, full_amplitude, ground_excitation_pmf, negative_binomial_mass, oracle_squeeze_matrix, pmf_tail_cutoff,
    quadrature_amplitude, squeeze_element_legendre, squeeze_element_series, transition_probability,
};
use ermakov::specfun::{gauss_hermite, ln_gamma};
use ermakov::{
    adiabatic_ics, equilibrium_ics, integrate, ErmakovTrajectory, FrequencyProtocol, OscillatorParams, QuenchReference, SqueezeParams,
    Tolerances,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::figures::figures;
use crate::sweep::loglog_slope;

/// Deliberate corruption of a constant, used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mutation {
    /// Replace the 3π/2 weight of Ai² in the full-ramp solution by π.
    FullRampCoefficient,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidateOptions {
    pub tolerances: Tolerances,
    pub mutation: Option<Mutation>,
    /// Skip the figure regeneration of criterion 10.
    pub skip_determinism: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { tolerances: Tolerances { rel: 1e-12, abs: 1e-14 }, mutation: None, skip_determinism: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub mutation: Option<Mutation>,
    pub verdicts: Vec<Verdict>,
}

impl ValidationReport {
    pub fn failed(&self) -> Vec<u32> {
        self.verdicts.iter().filter(|v| !v.passed).map(|v| v.id).collect()
    }
}

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "sudden quench exactness"),
    (2, "Airy half ramp"),
    (3, "excess energy and Kibble-Zurek scaling"),
    (4, "asymptotic squeezing"),
    (5, "matrix element agreement"),
    (6, "PMF identities"),
    (7, "structural invariants"),
    (8, "micro-reversibility"),
    (9, "adiabatic and sudden limits"),
    (10, "determinism"),
];

/// Accumulates named checks of the form `value <= bound`.
#[derive(Default)]
struct Checks {
    metrics: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Checks {
    fn at_most(&mut self, name: &str, value: f64, bound: f64) {
        self.metrics.insert(name.to_string(), value);
        if !(value <= bound) {
            self.failures.push(format!("{name} = {value:.3e} exceeds {bound:.1e}"));
        }
    }

    fn holds(&mut self, name: &str, ok: bool) {
        self.metrics.insert(name.to_string(), if ok { 1.0 } else { 0.0 });
        if !ok {
            self.failures.push(format!("{name} violated"));
        }
    }

    fn record(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    fn verdict(self, id: u32) -> Verdict {
        let name = CRITERIA[id as usize - 1].1.to_string();
        let passed = self.failures.is_empty();
        let detail = if passed { "ok".to_string() } else { self.failures.join("; ") };
        Verdict { id, name, passed, detail, metrics: self.metrics }
    }
}

fn errored(id: u32, err: anyhow::Error) -> Verdict {
    Verdict {
        id,
        name: CRITERIA[id as usize - 1].1.to_string(),
        passed: false,
        detail: format!("error: {err:#}"),
        metrics: BTreeMap::new(),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

fn quarter_params() -> OscillatorParams {
    OscillatorParams::with_c(1.0, 1.0, 0.25).expect("valid parameters")
}

fn r_of(sigma: f64, sigma_dot: f64, omega: f64, params: &OscillatorParams) -> anyhow::Result<f64> {
    Ok(squeeze_params(&bogoliubov_uv(sigma, sigma_dot, omega, params)?)?.r)
}

/// Oscillation average of r over the closing stretch [t1 - window, t1].
fn late_r_average(traj: &ErmakovTrajectory, window: f64) -> anyhow::Result<f64> {
    let (_, t1) = traj.span();
    let ts = linspace(t1 - window, t1, 4001);
    let rs = ts
        .iter()
        .map(|&t| {
            let s = traj.state_at(t)?;
            r_of(s.sigma, s.sigma_dot, traj.omega_at(t)?, &traj.params)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(oscillation_average(&ts, &rs)?)
}

fn quench_trajectory(tol: Tolerances) -> anyhow::Result<(QuenchReference, ErmakovTrajectory)> {
    let params = OscillatorParams::default();
    let p = FrequencyProtocol::sudden_quench(1.0, 3.0, 0.0)?;
    let t0 = -1.0;
    let traj = integrate(&p, &params, equilibrium_ics(&p, t0, &params)?, (t0, 10.0), tol)?;
    Ok((QuenchReference::new(1.0, 3.0, 0.0, params)?, traj))
}

fn criterion_1(opts: &ValidateOptions) -> anyhow::Result<(Verdict, Vec<ErmakovTrajectory>)> {
    let (reference, traj) = quench_trajectory(opts.tolerances)?;
    let mut c = Checks::default();
    let (mut err_sigma, mut err_q, mut err_r) = (0.0f64, 0.0f64, 0.0f64);
    let q_exact = 5.0 / 3.0;
    let r_exact = (2.0 / 3f64.sqrt()).acosh();
    for t in linspace(0.0, 10.0, 2001) {
        let s = traj.state_at(t)?;
        let (sig, sig_dot) = reference.sigma(t);
        err_sigma = err_sigma.max((s.sigma - sig).abs()).max((s.sigma_dot - sig_dot).abs());
        if t > 0.0 {
            let omega = traj.omega_at(t)?;
            err_q = err_q.max((adiabaticity_q(s.sigma, s.sigma_dot, omega, &traj.params)? - q_exact).abs());
            err_r = err_r.max((r_of(s.sigma, s.sigma_dot, omega, &traj.params)? - r_exact).abs());
        }
    }
    c.at_most("max_abs_sigma_error", err_sigma, 1e-8);
    c.at_most("max_abs_q_error", err_q, 1e-9);
    c.at_most("max_abs_r_error", err_r, 1e-9);
    Ok((c.verdict(1), vec![traj]))
}

fn half_ramp(delta: f64, tol: Tolerances) -> anyhow::Result<ErmakovTrajectory> {
    let params = quarter_params();
    let p = FrequencyProtocol::linear_symmetric(delta)?;
    let t0 = -40.0 / delta.cbrt();
    Ok(integrate(&p, &params, adiabatic_ics(&p, t0, &params)?, (t0, 0.0), tol)?)
}

fn criterion_2(opts: &ValidateOptions) -> anyhow::Result<(Verdict, Vec<ErmakovTrajectory>)> {
    let traj = half_ramp(1.0, opts.tolerances)?;
    let end = traj.final_state();
    let (sigma_ref, _) = airy_half_ramp(0.0)?;
    let gamma_23 = ln_gamma(2.0 / 3.0)?.exp();
    let sigma_sq_formula = 2.0 * PI / (3f64.powf(4.0 / 3.0) * gamma_23 * gamma_23);
    let mut c = Checks::default();
    c.at_most("abs_sigma_error", (end.sigma - sigma_ref).abs(), 1e-6);
    c.at_most("abs_sigma_sq_error", (end.sigma * end.sigma - sigma_sq_formula).abs(), 1e-6);
    c.at_most("airy_vs_gamma_formula", (sigma_ref * sigma_ref - sigma_sq_formula).abs(), 1e-6);
    c.record("sigma_sq_at_zero", end.sigma * end.sigma);
    Ok((c.verdict(2), vec![traj]))
}

/// Eight rates log-spaced over [0.1, 10].
pub fn kz_deltas() -> Vec<f64> {
    (0..8).map(|i| 10f64.powf(-1.0 + 2.0 * i as f64 / 7.0)).collect()
}

fn criterion_3(opts: &ValidateOptions) -> anyhow::Result<(Verdict, Vec<ErmakovTrajectory>)> {
    let mut deltas = kz_deltas();
    deltas.push(1.0);
    let trajs = deltas.par_iter().map(|&d| half_ramp(d, opts.tolerances)).collect::<anyhow::Result<Vec<_>>>()?;
    let mut energies = trajs
        .iter()
        .map(|traj| {
            let s = traj.final_state();
            Ok(ground_energy(s.sigma, s.sigma_dot, 0.0, &traj.params)?)
        })
        .collect::<anyhow::Result<Vec<f64>>>()?;
    let mut c = Checks::default();
    let e1 = energies.pop().expect("δ = 1 run");
    deltas.pop();
    let expected = half_ramp_excess_energy(1.0, 1.0);
    c.record("excess_energy_delta_1", e1);
    c.at_most("rel_energy_error_delta_1", (e1 - expected).abs() / expected, 1e-4);
    let slope = loglog_slope(&deltas, &energies).context("slope fit")?;
    c.record("fitted_slope", slope);
    c.at_most("rel_slope_error", (slope - 1.0 / 3.0).abs() * 3.0, 5e-3);
    Ok((c.verdict(3), trajs))
}

fn criterion_4(opts: &ValidateOptions) -> anyhow::Result<(Verdict, Vec<ErmakovTrajectory>)> {
    let mut c = Checks::default();
    let r_lin = asymptotic_r(1.0)?;
    c.record("asymptotic_r_linear", r_lin);

    // Closed-form full-ramp solution at large s, with c = 1/4.
    let a_sq = match opts.mutation {
        Some(Mutation::FullRampCoefficient) => PI,
        None => 1.5 * PI,
    };
    let params = quarter_params();
    let s1: f64 = 200.0;
    let ss = linspace(s1 - 4.0 * PI / s1.sqrt(), s1, 4001);
    let rs = ss
        .iter()
        .map(|&s| {
            let (sig, sig_dot) = airy_full_ramp_with(s, a_sq, PI / 6.0)?;
            r_of(sig, sig_dot, s.sqrt(), &params)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    c.at_most("closed_form_r_error", (oscillation_average(&ss, &rs)? - r_lin).abs(), 2e-2);

    // Integrated full linear ramps, δ = 1/τ.
    let unit = OscillatorParams::default();
    let taus = [100.0, 200.0];
    let lin = taus
        .par_iter()
        .map(|&tau| {
            let p = FrequencyProtocol::linear_symmetric(1.0 / tau)?;
            let t0 = -(tau.max(40.0 * f64::cbrt(tau)));
            let traj = integrate(&p, &unit, adiabatic_ics(&p, t0, &unit)?, (t0, 2.0 * tau), opts.tolerances)?;
            let w_end = p.omega(2.0 * tau)?;
            let avg = late_r_average(&traj, 4.0 * PI / w_end)?;
            Ok((tau, avg, traj))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut trajs = Vec::new();
    for (tau, avg, traj) in lin {
        c.at_most(&format!("ramp_r_error_tau_{tau}"), (avg - r_lin).abs(), 2e-2);
        trajs.push(traj);
    }

    let etas = [1.5, 2.0, 2.5, 3.0];
    let nonlin = etas
        .par_iter()
        .map(|&eta| {
            let p = FrequencyProtocol::nonlinear_symmetric(1.0, eta)?;
            let traj = integrate(&p, &unit, adiabatic_ics(&p, -20.0, &unit)?, (-20.0, 20.0), opts.tolerances)?;
            let avg = late_r_average(&traj, 4.0 * PI / p.omega(20.0)?)?;
            Ok((eta, avg, traj))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    for (eta, avg, traj) in nonlin {
        c.at_most(&format!("ramp_r_error_eta_{eta}"), (avg - asymptotic_r(eta)?).abs(), 3e-2);
        trajs.push(traj);
    }
    Ok((c.verdict(4), trajs))
}

fn criterion_5(opts: &ValidateOptions) -> anyhow::Result<Verdict> {
    let mut c = Checks::default();
    let cases: Vec<(f64, f64)> = [0.2, 0.6585, 1.2].iter().flat_map(|&r| [0.0, 0.3, 2.5].map(move |phi| (r, phi))).collect();
    let errs = cases
        .par_iter()
        .map(|&(r, phi)| {
            let sq = SqueezeParams::new(r, phi, 0.0);
            let oracle = oracle_squeeze_matrix(&sq, default_truncation(12, 12, r))?;
            let (mut e_leg, mut e_orc) = (0.0f64, 0.0f64);
            for m in 0..=12 {
                for n in 0..=12 {
                    let series = squeeze_element_series(m, n, &sq);
                    if (m + n) % 2 == 0 {
                        e_leg = e_leg.max((squeeze_element_legendre(m, n, &sq)? - series).norm());
                    }
                    e_orc = e_orc.max((oracle[(m, n)] - series).norm());
                }
            }
            Ok((e_leg, e_orc))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    c.at_most("series_vs_legendre", errs.iter().map(|e| e.0).fold(0.0, f64::max), 1e-8);
    c.at_most("series_vs_oracle", errs.iter().map(|e| e.1).fold(0.0, f64::max), 1e-8);

    let (_, traj) = quench_trajectory(opts.tolerances)?;
    let rule = gauss_hermite(40)?;
    let mut e_quad = 0.0f64;
    for t in [0.2, 1.1, 2.9, 7.3] {
        let s = traj.state_at(t)?;
        let omega = traj.omega_at(t)?;
        let sq = squeeze_params(&bogoliubov_uv(s.sigma, s.sigma_dot, omega, &traj.params)?)?;
        for m in 0..=6 {
            for n in 0..=6 {
                let quad = quadrature_amplitude(m, n, s.sigma, s.sigma_dot, omega, &traj.params, &rule)?;
                e_quad = e_quad.max((quad.norm() - squeeze_element_series(m, n, &sq).norm()).abs());
            }
        }
    }
    c.at_most("quadrature_modulus", e_quad, 1e-8);
    Ok(c.verdict(5))
}

fn criterion_6() -> anyhow::Result<Verdict> {
    let mut c = Checks::default();
    let (mut bits_ok, mut e_sum, mut e_mean) = (true, 0.0f64, 0.0f64);
    for r in [0.1, 0.6585, 1.2, 2.5] {
        let k = pmf_tail_cutoff(r);
        let pmf = ground_excitation_pmf(r, k);
        let p_tilde = 1.0 / r.cosh().powi(2);
        bits_ok &= pmf.masses.iter().enumerate().all(|(k, m)| m.to_bits() == negative_binomial_mass(k, p_tilde).to_bits());
        e_sum = e_sum.max((pmf.total() - 1.0).abs());
        e_mean = e_mean.max((pmf.mean() - ((2.0 * r).cosh() - 1.0) / 2.0).abs());
    }
    c.holds("negative_binomial_bits", bits_ok);
    c.at_most("sum_error", e_sum, 1e-12);
    c.at_most("mean_error", e_mean, 1e-10);
    Ok(c.verdict(6))
}

/// Every structural identity at `samples` points of each trajectory.
fn criterion_7(trajs: &[ErmakovTrajectory], samples: usize) -> anyhow::Result<Verdict> {
    let per_traj = trajs
        .par_iter()
        .map(|traj| -> anyhow::Result<[f64; 6]> {
            let (t0, t1) = traj.span();
            let params = &traj.params;
            let hbar = params.hbar;
            // [det error, 1 - Q, cosh 2r vs Q, parity violations, asymmetry, uncertainty deficit]
            let mut worst = [0.0f64; 6];
            for t in linspace(t0, t1, samples) {
                let omega = traj.omega_at(t)?;
                if !(omega > 0.0) {
                    continue;
                }
                let s = traj.state_at(t)?;
                let pair = bogoliubov_uv(s.sigma, s.sigma_dot, omega, params)?;
                let sq = squeeze_params(&pair)?;
                let q = adiabaticity_q(s.sigma, s.sigma_dot, omega, params)?;
                worst[0] = worst[0].max((pair.u.norm_sqr() - pair.v.norm_sqr() - 1.0).abs());
                worst[1] = worst[1].max(1.0 - q);
                worst[2] = worst[2].max(((2.0 * sq.r).cosh() - q).abs() / q);
                for m in 0..=8usize {
                    for n in 0..=8usize {
                        if (m + n) % 2 == 1 {
                            let odd = squeeze_element_series(m, n, &sq) != num_zero() || transition_probability(m, n, sq.r) != 0.0;
                            worst[3] += if odd { 1.0 } else { 0.0 };
                        }
                        if transition_probability(m, n, sq.r).to_bits() != transition_probability(n, m, sq.r).to_bits() {
                            worst[4] += 1.0;
                        }
                    }
                }
                for n in 0..=6usize {
                    let (vq, vp) = fock_variances(n, s.sigma, s.sigma_dot, omega, params)?;
                    let bound = (hbar * (n as f64 + 0.5)).powi(2);
                    worst[5] = worst[5].max((bound - vq * vp) / bound);
                }
            }
            Ok(worst)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let worst = per_traj
        .iter()
        .fold([0.0f64; 6], |acc, w| std::array::from_fn(|i| if i == 3 || i == 4 { acc[i] + w[i] } else { acc[i].max(w[i]) }));
    let mut c = Checks::default();
    c.record("trajectories", trajs.len() as f64);
    c.at_most("bogoliubov_determinant_error", worst[0], 1e-10);
    c.at_most("q_below_one", worst[1], 1e-10);
    c.at_most("cosh_2r_vs_q_rel", worst[2], 1e-9);
    c.at_most("parity_violations", worst[3], 0.0);
    c.at_most("asymmetric_probabilities", worst[4], 0.0);
    c.at_most("uncertainty_deficit_rel", worst[5], 1e-12);
    Ok(c.verdict(7))
}

fn num_zero() -> num_complex::Complex64 {
    num_complex::Complex64::new(0.0, 0.0)
}

fn criterion_8(opts: &ValidateOptions) -> anyhow::Result<Verdict> {
    let params = OscillatorParams::default();
    let forward = FrequencyProtocol::tanh(1.0, 3.0, 0.0, 0.5)?;
    let backward = forward.reverse(0.0);
    let (t0, t1) = (-10.0, 10.0);
    let run = |p: &FrequencyProtocol| -> anyhow::Result<ErmakovTrajectory> {
        Ok(integrate(p, &params, equilibrium_ics(p, t0, &params)?, (t0, t1), opts.tolerances)?)
    };
    let (f, b) = (run(&forward)?, run(&backward)?);
    let mut err = 0.0f64;
    for m in 0..=6 {
        for n in 0..=6 {
            let pf = full_amplitude(m, n, t1, &f)?.norm_sqr();
            let pb = full_amplitude(n, m, t1, &b)?.norm_sqr();
            err = err.max((pf - pb).abs());
        }
    }
    let mut c = Checks::default();
    c.at_most("max_abs_probability_difference", err, 1e-6);
    Ok(c.verdict(8))
}

fn criterion_9(opts: &ValidateOptions) -> anyhow::Result<Verdict> {
    let params = OscillatorParams::default();
    let q_along = |eps: f64, t_end: f64, from: f64| -> anyhow::Result<Vec<f64>> {
        let p = FrequencyProtocol::tanh(1.0, 3.0, 0.0, eps)?;
        let t0 = p.default_start().context("tanh start")?;
        let traj = integrate(&p, &params, equilibrium_ics(&p, t0, &params)?, (t0, t_end), opts.tolerances)?;
        linspace(from.max(t0), t_end, 4001)
            .into_iter()
            .map(|t| {
                let s = traj.state_at(t)?;
                Ok(adiabaticity_q(s.sigma, s.sigma_dot, traj.omega_at(t)?, &params)?)
            })
            .collect()
    };
    let mut c = Checks::default();
    let slow = q_along(50.0, 1000.0, f64::NEG_INFINITY)?;
    c.at_most("adiabatic_max_q_minus_1", slow.iter().map(|q| q - 1.0).fold(0.0, f64::max), 1e-3);
    let fast = q_along(0.001, 10.0, 1.0)?;
    c.at_most("sudden_late_q_error", fast.iter().map(|q| (q - 5.0 / 3.0).abs()).fold(0.0, f64::max), 1e-3);
    Ok(c.verdict(9))
}

fn tree(root: &Path) -> anyhow::Result<Vec<(PathBuf, Vec<u8>)>> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let bytes = fs::read(&path)?;
                out.push((path.strip_prefix(root)?.to_path_buf(), bytes));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn criterion_10() -> anyhow::Result<Verdict> {
    let a = tempfile::tempdir()?;
    let b = tempfile::tempdir()?;
    figures(a.path())?;
    figures(b.path())?;
    let (ta, tb) = (tree(a.path())?, tree(b.path())?);
    let mut c = Checks::default();
    c.record("files", ta.len() as f64);
    c.record("bytes", ta.iter().map(|f| f.1.len() as f64).sum());
    c.holds("identical_trees", !ta.is_empty() && ta == tb);
    Ok(c.verdict(10))
}

type TrajectoryCriterion = fn(&ValidateOptions) -> anyhow::Result<(Verdict, Vec<ErmakovTrajectory>)>;

/// Run the whole suite. Criteria that error out are reported as failures.
pub fn validate(opts: &ValidateOptions) -> ValidationReport {
    let trajectory_criteria: [(u32, TrajectoryCriterion); 4] = [(1, criterion_1), (2, criterion_2), (3, criterion_3), (4, criterion_4)];
    let results: Vec<(Verdict, Vec<ErmakovTrajectory>)> =
        trajectory_criteria.par_iter().map(|(id, f)| f(opts).unwrap_or_else(|e| (errored(*id, e), Vec::new()))).collect();
    let mut verdicts: Vec<Verdict> = Vec::new();
    let mut trajs = Vec::new();
    for (v, t) in results {
        verdicts.push(v);
        trajs.extend(t);
    }

    let others: Vec<Verdict> = [5u32, 6, 7, 8, 9, 10]
        .par_iter()
        .map(|&id| {
            let r = match id {
                5 => criterion_5(opts),
                6 => criterion_6(),
                7 => criterion_7(&trajs, 401),
                8 => criterion_8(opts),
                9 => criterion_9(opts),
                _ if opts.skip_determinism => {
                    Ok(Verdict { id, name: CRITERIA[9].1.into(), passed: true, detail: "skipped".into(), metrics: BTreeMap::new() })
                }
                _ => criterion_10(),
            };
            r.unwrap_or_else(|e| errored(id, e))
        })
        .collect();
    verdicts.extend(others);
    verdicts.sort_by_key(|v| v.id);
    ValidationReport { passed: verdicts.iter().all(|v| v.passed), mutation: opts.mutation, verdicts }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kz_grid_spans_two_decades() {
        let d = kz_deltas();
        assert_eq!(d.len(), 8);
        assert!((d[0] - 0.1).abs() < 1e-15 && (d[7] - 10.0).abs() < 1e-13);
        assert!(d.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn checks_collect_failures() {
        let mut c = Checks::default();
        c.at_most("a", 1.0, 2.0);
        c.at_most("b", f64::NAN, 2.0);
        c.holds("c", false);
        let v = c.verdict(6);
        assert!(!v.passed);
        assert_eq!(v.name, "PMF identities");
        assert!(v.detail.contains("b = NaN") && v.detail.contains("c violated"));
    }

    #[test]
    fn pmf_and_matrix_criteria_pass() {
        assert!(criterion_6().unwrap().passed);
        assert!(criterion_8(&ValidateOptions::default()).unwrap().passed);
    }
}
