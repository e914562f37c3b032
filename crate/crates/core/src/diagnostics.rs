//! Observables derived from (σ, σ̇, ω): Bogoliubov coefficients, squeezing,
//! adiabaticity, excitation number and variances.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ermakov::ErmakovState;
use crate::protocols::OscillatorParams;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("instantaneous eigenbasis undefined for ω = {omega}")]
    NonPositiveFrequency { omega: f64 },
    #[error("σ must be positive, got {sigma}")]
    NonPositiveSigma { sigma: f64 },
    #[error("|u| = {modulus} is below 1 beyond rounding")]
    InvalidPair { modulus: f64 },
}

/// Bogoliubov coefficients relating invariant and instantaneous ladder operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovPair {
    pub u: Complex64,
    pub v: Complex64,
}

impl BogoliubovPair {
    pub fn identity() -> Self {
        Self { u: Complex64::new(1.0, 0.0), v: Complex64::new(0.0, 0.0) }
    }

    /// |u|² - |v|², one for a valid pair.
    pub fn determinant(&self) -> f64 {
        self.u.norm_sqr() - self.v.norm_sqr()
    }
}

/// Squeezing modulus r, squeezing phase φ and rotation phase χ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    pub r: f64,
    pub phi: f64,
    pub chi: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, phi: f64, chi: f64) -> Self {
        Self { r, phi, chi }
    }

    /// u = e^{-iχ} cosh r, v = e^{-i(χ-φ)} sinh r.
    pub fn to_pair(&self) -> BogoliubovPair {
        BogoliubovPair { u: Complex64::from_polar(self.r.cosh(), -self.chi), v: Complex64::from_polar(self.r.sinh(), self.phi - self.chi) }
    }
}

/// Diagnostics at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSample {
    pub t: f64,
    pub omega: f64,
    pub q: f64,
    pub squeeze: SqueezeParams,
    pub mean_excitations: f64,
    pub var_q: f64,
    pub var_p: f64,
}

fn check_inputs(sigma: f64, omega: f64) -> Result<(), DiagnosticsError> {
    if !(sigma > 0.0) {
        return Err(DiagnosticsError::NonPositiveSigma { sigma });
    }
    if !(omega > 0.0) {
        return Err(DiagnosticsError::NonPositiveFrequency { omega });
    }
    Ok(())
}

pub fn bogoliubov_uv(sigma: f64, sigma_dot: f64, omega: f64, params: &OscillatorParams) -> Result<BogoliubovPair, DiagnosticsError> {
    check_inputs(sigma, omega)?;
    let (s, sd) = params.to_standard(sigma, sigma_dot);
    let m = params.mass;
    let norm = 2.0 * (m * omega).sqrt();
    let inv = 1.0 / s;
    let mws = m * omega * s;
    let im = -m * sd;
    Ok(BogoliubovPair { u: Complex64::new((inv + mws) / norm, im / norm), v: Complex64::new((inv - mws) / norm, im / norm) })
}

pub fn squeeze_params(pair: &BogoliubovPair) -> Result<SqueezeParams, DiagnosticsError> {
    let mut modulus = pair.u.norm();
    if modulus < 1.0 {
        if modulus < 1.0 - 1e-12 {
            return Err(DiagnosticsError::InvalidPair { modulus });
        }
        modulus = 1.0;
    }
    let r = modulus.acosh();
    let chi = -pair.u.arg();
    let phi = if r == 0.0 || pair.v.norm() == 0.0 { 0.0 } else { wrap_phase(pair.v.arg() - pair.u.arg()) };
    Ok(SqueezeParams { r, phi, chi })
}

/// Map an angle into (-π, π].
pub fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::PI;
    let mut y = x % (2.0 * PI);
    if y <= -PI {
        y += 2.0 * PI;
    } else if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Q = (Mσ̇² + Mω²σ² + 1/(Mσ²)) / (2ω) in the standard scale.
pub fn adiabaticity_q(sigma: f64, sigma_dot: f64, omega: f64, params: &OscillatorParams) -> Result<f64, DiagnosticsError> {
    check_inputs(sigma, omega)?;
    Ok(energy_form(sigma, sigma_dot, omega, params) / (2.0 * omega))
}

fn energy_form(sigma: f64, sigma_dot: f64, omega: f64, params: &OscillatorParams) -> f64 {
    let (s, sd) = params.to_standard(sigma, sigma_dot);
    let m = params.mass;
    m * sd * sd + m * omega * omega * s * s + 1.0 / (m * s * s)
}

/// Position and momentum variances of the n-th dynamical state.
///
/// Bogoliubov route when ω > 0, σ-form at a critical point.
pub fn fock_variances(n: usize, sigma: f64, sigma_dot: f64, omega: f64, params: &OscillatorParams) -> Result<(f64, f64), DiagnosticsError> {
    if !(sigma > 0.0) {
        return Err(DiagnosticsError::NonPositiveSigma { sigma });
    }
    let level = n as f64 + 0.5;
    let hbar = params.hbar;
    let m = params.mass;
    if omega > 0.0 {
        let pair = bogoliubov_uv(sigma, sigma_dot, omega, params)?;
        let var_q = hbar / (m * omega) * level * (pair.u - pair.v).norm_sqr();
        let var_p = hbar * m * omega * level * (pair.u + pair.v).norm_sqr();
        Ok((var_q, var_p))
    } else {
        Ok(fock_variances_sigma_form(n, sigma, sigma_dot, params))
    }
}

/// σ-form variances ħσ²(n+½) and ħ(1/σ² + M²σ̇²)(n+½) in the standard scale.
pub fn fock_variances_sigma_form(n: usize, sigma: f64, sigma_dot: f64, params: &OscillatorParams) -> (f64, f64) {
    let (s, sd) = params.to_standard(sigma, sigma_dot);
    let level = n as f64 + 0.5;
    let m = params.mass;
    (params.hbar * s * s * level, params.hbar * (1.0 / (s * s) + m * m * sd * sd) * level)
}

/// Coherent-state mean position and variances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentObservables {
    pub mean_q: f64,
    pub var_q: f64,
    pub var_p: f64,
}

pub fn coherent_observables(
    alpha: Complex64,
    sigma: f64,
    sigma_dot: f64,
    phase_integral: f64,
    params: &OscillatorParams,
) -> Result<CoherentObservables, DiagnosticsError> {
    if !(sigma > 0.0) {
        return Err(DiagnosticsError::NonPositiveSigma { sigma });
    }
    let (s, _) = params.to_standard(sigma, sigma_dot);
    // α = |α| e^{-iθ}
    let theta = -alpha.arg();
    let mean_q = (2.0 * params.hbar).sqrt() * s * alpha.norm() * (phase_integral + theta).cos();
    let (var_q, var_p) = fock_variances_sigma_form(0, sigma, sigma_dot, params);
    Ok(CoherentObservables { mean_q, var_q, var_p })
}

/// Mean energy of the dynamical ground state, Q ħω/2.
pub fn ground_energy(sigma: f64, sigma_dot: f64, omega: f64, params: &OscillatorParams) -> Result<f64, DiagnosticsError> {
    if !(sigma > 0.0) {
        return Err(DiagnosticsError::NonPositiveSigma { sigma });
    }
    if omega > 0.0 {
        Ok(adiabaticity_q(sigma, sigma_dot, omega, params)? * params.hbar * omega / 2.0)
    } else {
        Ok(params.hbar / 4.0 * energy_form(sigma, sigma_dot, omega.max(0.0), params))
    }
}

/// Full diagnostic sample for one trajectory state.
pub fn diagnose(state: &ErmakovState, omega: f64, params: &OscillatorParams) -> Result<DiagnosticsSample, DiagnosticsError> {
    let pair = bogoliubov_uv(state.sigma, state.sigma_dot, omega, params)?;
    let squeeze = squeeze_params(&pair)?;
    let q = adiabaticity_q(state.sigma, state.sigma_dot, omega, params)?;
    let (var_q, var_p) = fock_variances(0, state.sigma, state.sigma_dot, omega, params)?;
    Ok(DiagnosticsSample { t: state.t, omega, q, squeeze, mean_excitations: pair.v.norm_sqr(), var_q, var_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit() -> OscillatorParams {
        OscillatorParams::default()
    }

    fn quench_sigma(t: f64) -> (f64, f64) {
        let w = 3.0f64;
        let s2 = (w * t).cos().powi(2) + (w * t).sin().powi(2) / 9.0;
        let s = s2.sqrt();
        let dsig2 = -2.0 * w * (w * t).sin() * (w * t).cos() * (1.0 - 1.0 / 9.0);
        (s, dsig2 / (2.0 * s))
    }

    #[test]
    fn equilibrium_is_identity() {
        for (m, w) in [(1.0, 1.0), (2.0, 0.7), (0.3, 5.0)] {
            let params = OscillatorParams::new(m, 1.0).unwrap();
            let sigma = 1.0 / (m * w as f64).sqrt();
            let pair = bogoliubov_uv(sigma, 0.0, w, &params).unwrap();
            assert_relative_eq!(pair.u.re, 1.0, epsilon = 1e-15);
            assert!(pair.v.norm() < 1e-15 && pair.u.im == 0.0);
            assert_relative_eq!(adiabaticity_q(sigma, 0.0, w, &params).unwrap(), 1.0, epsilon = 1e-15);
            let sq = squeeze_params(&pair).unwrap();
            assert_eq!((sq.r, sq.phi, sq.chi), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn quench_tanh_squared_identity() {
        for i in 1..50 {
            let t = 0.13 * i as f64;
            let (s, sd) = quench_sigma(t);
            let pair = bogoliubov_uv(s, sd, 3.0, &unit()).unwrap();
            let sq = squeeze_params(&pair).unwrap();
            assert_relative_eq!((pair.v / pair.u).norm_sqr(), sq.r.tanh().powi(2), epsilon = 1e-13);
            assert_relative_eq!(adiabaticity_q(s, sd, 3.0, &unit()).unwrap(), 5.0 / 3.0, epsilon = 1e-13);
            // cos φ = sign(ω_i - ω_f) cos(2ω_f t) after the quench.
            assert_relative_eq!(sq.phi.cos(), -(6.0 * t).cos(), epsilon = 1e-12);
        }
        let (s, sd) = quench_sigma(0.4);
        let r = squeeze_params(&bogoliubov_uv(s, sd, 3.0, &unit()).unwrap()).unwrap().r;
        assert_relative_eq!(r, (2.0 / 3f64.sqrt()).acosh(), epsilon = 1e-13);
        assert_relative_eq!(r, 3f64.sqrt().ln(), epsilon = 1e-13);
    }

    #[test]
    fn frequency_domain_errors() {
        assert!(matches!(bogoliubov_uv(1.0, 0.0, 0.0, &unit()), Err(DiagnosticsError::NonPositiveFrequency { .. })));
        assert!(adiabaticity_q(1.0, 0.0, -1.0, &unit()).is_err());
        assert!(bogoliubov_uv(-1.0, 0.0, 1.0, &unit()).is_err());
        let bad = BogoliubovPair { u: Complex64::new(0.9, 0.0), v: Complex64::new(0.0, 0.0) };
        assert!(squeeze_params(&bad).is_err());
        let rounding = BogoliubovPair { u: Complex64::new(1.0 - 1e-14, 0.0), v: Complex64::new(0.0, 0.0) };
        assert_eq!(squeeze_params(&rounding).unwrap().r, 0.0);
    }

    #[test]
    fn variances_examples() {
        let w: f64 = 2.5;
        let (vq, vp) = fock_variances(0, 1.0 / w.sqrt(), 0.0, w, &unit()).unwrap();
        assert_relative_eq!(vq, 1.0 / (2.0 * w), epsilon = 1e-15);
        assert_relative_eq!(vp, w / 2.0, epsilon = 1e-14);
        for i in 0..40 {
            let t = 0.05 * i as f64;
            let (s, sd) = quench_sigma(t);
            let (vq, _) = fock_variances(0, s, sd, 3.0, &unit()).unwrap();
            assert_relative_eq!(vq, 0.5 * ((3.0 * t).cos().powi(2) + (3.0 * t).sin().powi(2) / 9.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn quench_period_averaged_variances() {
        let (wi, wf) = (1.0f64, 3.0f64);
        let period = std::f64::consts::PI / wf;
        let n = 4000;
        let (mut aq, mut ap) = (0.0, 0.0);
        for i in 0..n {
            let t = period * (i as f64 + 0.5) / n as f64;
            let (s, sd) = quench_sigma(t);
            let (vq, vp) = fock_variances(0, s, sd, wf, &unit()).unwrap();
            aq += vq / n as f64;
            ap += vp / n as f64;
        }
        assert_relative_eq!(aq, 0.25 / wi * (1.0 + wi * wi / (wf * wf)), epsilon = 1e-10);
        assert_relative_eq!(ap, 0.25 * wi * (1.0 + wf * wf / (wi * wi)), epsilon = 1e-10);
    }

    #[test]
    fn momentum_variance_uses_mass_squared() {
        // The σ-form with M²σ̇² matches the Bogoliubov route; Mσ̇² would not.
        let params = OscillatorParams::new(2.3, 0.7).unwrap();
        let (s, sd, w) = (0.4, 0.9, 1.7);
        for n in 0..5 {
            let (bq, bp) = fock_variances(n, s, sd, w, &params).unwrap();
            let (fq, fp) = fock_variances_sigma_form(n, s, sd, &params);
            assert_relative_eq!(bq, fq, max_relative = 1e-13);
            assert_relative_eq!(bp, fp, max_relative = 1e-13);
            let wrong = params.hbar * (1.0 / (s * s) + params.mass * sd * sd) * (n as f64 + 0.5);
            assert!((wrong - bp).abs() > 1e-3);
        }
    }

    #[test]
    fn coherent_examples() {
        let w0: f64 = 2.0;
        let s = 1.0 / w0.sqrt();
        let vac = coherent_observables(Complex64::new(0.0, 0.0), s, 0.0, 0.7, &unit()).unwrap();
        let fock = fock_variances(0, s, 0.0, w0, &unit()).unwrap();
        assert_eq!(vac.mean_q, 0.0);
        assert_relative_eq!(vac.var_q, fock.0, epsilon = 1e-15);
        assert_relative_eq!(vac.var_p, fock.1, epsilon = 1e-15);
        for t in [0.0, 0.4, 1.3] {
            let c = coherent_observables(Complex64::new(1.0, 0.0), s, 0.0, w0 * t, &unit()).unwrap();
            assert_relative_eq!(c.mean_q, (2.0 / w0).sqrt() * (w0 * t).cos(), epsilon = 1e-14);
        }
    }

    #[test]
    fn ground_energy_examples() {
        let w: f64 = 1.9;
        assert_relative_eq!(ground_energy(1.0 / w.sqrt(), 0.0, w, &unit()).unwrap(), w / 2.0, epsilon = 1e-14);
        let direct = ground_energy(0.8, 0.3, 0.0, &unit()).unwrap();
        assert_relative_eq!(direct, 0.25 * (0.09 + 1.0 / 0.64), epsilon = 1e-15);
        let e1 = ground_energy(0.8, 0.3, 1.0, &unit()).unwrap();
        let e2 = ground_energy(0.8, 0.5, 1.0, &unit()).unwrap();
        let q1 = adiabaticity_q(0.8, 0.3, 1.0, &unit()).unwrap();
        let q2 = adiabaticity_q(0.8, 0.5, 1.0, &unit()).unwrap();
        assert!((e2 - e1) * (q2 - q1) > 0.0);
    }

    #[test]
    fn convention_mapping_is_consistent() {
        let std = OscillatorParams::new(1.0, 1.0).unwrap();
        let quarter = OscillatorParams::with_c(1.0, 1.0, 0.25).unwrap();
        let (s, sd, w) = (0.63, -0.21, 1.4);
        let k = quarter.sigma_scale();
        let a = diagnose(&ErmakovState { t: 0.0, sigma: s, sigma_dot: sd, phase_integral: 0.0 }, w, &std).unwrap();
        let b = diagnose(&ErmakovState { t: 0.0, sigma: k * s, sigma_dot: k * sd, phase_integral: 0.0 }, w, &quarter).unwrap();
        assert_relative_eq!(a.q, b.q, max_relative = 1e-14);
        assert_relative_eq!(a.squeeze.r, b.squeeze.r, max_relative = 1e-14);
        assert_relative_eq!(a.var_p, b.var_p, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn pair_invariants(s in 0.05f64..5.0, sd in -5.0f64..5.0, w in 0.05f64..5.0, m in 0.2f64..3.0, n in 0usize..6) {
            let params = OscillatorParams::new(m, 1.0).unwrap();
            let pair = bogoliubov_uv(s, sd, w, &params).unwrap();
            let q = adiabaticity_q(s, sd, w, &params).unwrap();
            prop_assert!((pair.determinant() - 1.0).abs() <= 1e-12 * q.max(1.0));
            prop_assert!(q >= 1.0 - 1e-12);
            let sq = squeeze_params(&pair).unwrap();
            prop_assert!(((2.0 * sq.r).cosh() - q).abs() <= 1e-9 * q);
            let back = sq.to_pair();
            prop_assert!((back.u - pair.u).norm() <= 1e-12 * pair.u.norm());
            prop_assert!((back.v - pair.v).norm() <= 1e-12 * pair.u.norm());
            prop_assert!(pair.u.re > 0.0);
            let (vq, vp) = fock_variances(n, s, sd, w, &params).unwrap();
            let level = n as f64 + 0.5;
            let expected = level * level * (1.0 + m * m * s * s * sd * sd);
            prop_assert!((vq * vp - expected).abs() <= 1e-10 * expected);
            prop_assert!(vq * vp >= level * level * (1.0 - 1e-12));
            let sample = diagnose(&ErmakovState { t: 0.0, sigma: s, sigma_dot: sd, phase_integral: 0.0 }, w, &params).unwrap();
            prop_assert!((sample.mean_excitations - (q - 1.0) / 2.0).abs() <= 1e-10 * q);
        }
    }
}
