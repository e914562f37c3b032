//! Exact references: the sudden quench, Airy solutions of the linear ramps,
//! δ-scaling and the asymptotic squeezing of nonlinear ramps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocols::OscillatorParams;
use crate::specfun::{airy, ln_gamma, SpecFunError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("fewer than two upward crossings of the mean; cannot isolate a period")]
    NoFullPeriod,
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Sudden quench ω_i → ω_f at t_q, starting from equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchReference {
    pub omega_i: f64,
    pub omega_f: f64,
    pub t_q: f64,
    pub params: OscillatorParams,
}

impl QuenchReference {
    pub fn new(omega_i: f64, omega_f: f64, t_q: f64, params: OscillatorParams) -> Result<Self, ClosedFormError> {
        if !(omega_i > 0.0 && omega_f > 0.0 && t_q.is_finite()) {
            return Err(ClosedFormError::InvalidParameter(format!("quench ({omega_i}, {omega_f}, {t_q})")));
        }
        Ok(Self { omega_i, omega_f, t_q, params })
    }

    /// (σ, σ̇) in the convention of `params`.
    pub fn sigma(&self, t: f64) -> (f64, f64) {
        let m = self.params.mass;
        let a = 1.0 / (m * self.omega_i);
        if t < self.t_q {
            return self.params.from_standard(a.sqrt(), 0.0);
        }
        let ratio = self.omega_i / self.omega_f;
        let b = a * ratio * ratio;
        let x = self.omega_f * (t - self.t_q);
        let (s, c) = x.sin_cos();
        let s2 = a * c * c + b * s * s;
        let sigma = s2.sqrt();
        let sigma_dot = (b - a) * self.omega_f * s * c / sigma;
        self.params.from_standard(sigma, sigma_dot)
    }

    /// Q after the quench.
    pub fn q(&self) -> f64 {
        (self.omega_i.powi(2) + self.omega_f.powi(2)) / (2.0 * self.omega_i * self.omega_f)
    }

    /// r after the quench, from cosh 2r = Q.
    pub fn r(&self) -> f64 {
        0.5 * self.q().acosh()
    }

    /// cos φ(t) = sign(ω_i - ω_f) cos(2 ω_f (t - t_q)) after the quench.
    pub fn phi_cos(&self, t: f64) -> f64 {
        let sign = (self.omega_i - self.omega_f).signum();
        sign * (2.0 * self.omega_f * (t - self.t_q)).cos()
    }
}

/// (σ, σ̇) with σ² = (π/2)(Ai² + Bi²)(s), for ω² = |s|, c = 1/4.
pub fn airy_half_ramp(s: f64) -> Result<(f64, f64), ClosedFormError> {
    let v = airy(s)?;
    let s2 = 0.5 * PI * (v.ai * v.ai + v.bi * v.bi);
    let sigma = s2.sqrt();
    Ok((sigma, 0.5 * PI * (v.ai * v.ai_prime + v.bi * v.bi_prime) / sigma))
}

/// Full linear ramp: the half-ramp form for s ≤ 0, then
/// σ² = a Ai²(-s) + b Bi²(-s) with the supplied coefficients.
pub fn airy_full_ramp_with(s: f64, a_sq: f64, b_sq: f64) -> Result<(f64, f64), ClosedFormError> {
    if s <= 0.0 {
        return airy_half_ramp(s);
    }
    let v = airy(-s)?;
    let s2 = a_sq * v.ai * v.ai + b_sq * v.bi * v.bi;
    let sigma = s2.sqrt();
    let sigma_dot = -(a_sq * v.ai * v.ai_prime + b_sq * v.bi * v.bi_prime) / sigma;
    Ok((sigma, sigma_dot))
}

/// Full linear ramp with σ² = (3π/2) Ai²(-s) + (π/6) Bi²(-s) for s > 0.
pub fn airy_full_ramp(s: f64) -> Result<(f64, f64), ClosedFormError> {
    airy_full_ramp_with(s, 1.5 * PI, PI / 6.0)
}

/// Maps between a ramp of rate δ and the δ = 1 problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampScaling {
    pub delta: f64,
}

impl RampScaling {
    pub fn new(delta: f64) -> Result<Self, ClosedFormError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(ClosedFormError::InvalidParameter(format!("delta = {delta}")));
        }
        Ok(Self { delta })
    }

    /// s = δ^{1/3} t.
    pub fn scaled_time(&self, t: f64) -> f64 {
        self.delta.cbrt() * t
    }

    pub fn physical_time(&self, s: f64) -> f64 {
        s / self.delta.cbrt()
    }

    /// σ = δ^{-1/6} σ̃ and σ̇ = δ^{1/6} dσ̃/ds.
    pub fn sigma(&self, scaled: (f64, f64)) -> (f64, f64) {
        let k = self.delta.powf(1.0 / 6.0);
        (scaled.0 / k, scaled.1 * k)
    }

    /// Energies scale as δ^{1/3}.
    pub fn energy(&self, scaled: f64) -> f64 {
        scaled * self.delta.cbrt()
    }
}

/// πħ δ^{1/3} / (3^{2/3} Γ²(1/3)), the excess energy at the end of the half ramp.
pub fn half_ramp_excess_energy(delta: f64, hbar: f64) -> f64 {
    let gamma = ln_gamma(1.0 / 3.0).expect("positive argument").exp();
    PI * hbar * delta.cbrt() / (3f64.powf(2.0 / 3.0) * gamma * gamma)
}

/// Late-time r for ω² ∝ |t|^η: arccosh(1 / sin(π/(2+η))).
pub fn asymptotic_r(eta: f64) -> Result<f64, ClosedFormError> {
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(ClosedFormError::InvalidParameter(format!("eta = {eta}")));
    }
    Ok((1.0 / (PI / (2.0 + eta)).sin()).acosh())
}

/// Kibble-Zurek exponent zν/(1+zν).
pub fn kz_exponent(z_nu: f64) -> f64 {
    z_nu / (1.0 + z_nu)
}

/// Mean of an oscillating series over its last full period, delimited by
/// upward crossings of the series mean.
pub fn oscillation_average(ts: &[f64], values: &[f64]) -> Result<f64, ClosedFormError> {
    if ts.len() != values.len() || ts.len() < 3 {
        return Err(ClosedFormError::InvalidParameter("need matching series of at least 3 points".into()));
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let dev: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let crossings: Vec<(usize, f64)> = (1..dev.len())
        .filter(|&i| dev[i - 1] < 0.0 && dev[i] >= 0.0)
        .map(|i| {
            let frac = -dev[i - 1] / (dev[i] - dev[i - 1]);
            (i, ts[i - 1] + frac * (ts[i] - ts[i - 1]))
        })
        .collect();
    if crossings.len() < 2 {
        return Err(ClosedFormError::NoFullPeriod);
    }
    let (i0, t0) = crossings[crossings.len() - 2];
    let (i1, t1) = crossings[crossings.len() - 1];
    let lerp = |i: usize, t: f64| values[i - 1] + (values[i] - values[i - 1]) * (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    let mut area = 0.0;
    let mut prev = (t0, lerp(i0, t0));
    for i in i0..i1 {
        area += 0.5 * (prev.1 + values[i]) * (ts[i] - prev.0);
        prev = (ts[i], values[i]);
    }
    let end = lerp(i1, t1);
    area += 0.5 * (prev.1 + end) * (t1 - prev.0);
    Ok(area / (t1 - t0))
}
