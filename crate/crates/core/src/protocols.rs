//! Frequency protocols ω(t) and oscillator parameters.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("invalid protocol parameter: {0}")]
    InvalidParameter(String),
    #[error("t = {t} outside sampled range [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },
    #[error("protocol is not differentiable at t = {t}")]
    NonDifferentiable { t: f64 },
}

/// Mass, Planck constant and the Ermakov constant c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub mass: f64,
    pub hbar: f64,
    pub ermakov_c: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0, ermakov_c: 1.0 }
    }
}

impl OscillatorParams {
    /// Parameters in the default convention c = 1/M².
    pub fn new(mass: f64, hbar: f64) -> Result<Self, ProtocolError> {
        Self::with_c(mass, hbar, 1.0 / (mass * mass))
    }

    pub fn with_c(mass: f64, hbar: f64, ermakov_c: f64) -> Result<Self, ProtocolError> {
        let p = Self { mass, hbar, ermakov_c };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        for (name, v) in [("mass", self.mass), ("hbar", self.hbar), ("ermakov_c", self.ermakov_c)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ProtocolError::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Factor (c M²)^{1/4} relating σ in this convention to σ in the c = 1/M² one.
    pub fn sigma_scale(&self) -> f64 {
        (self.ermakov_c * self.mass * self.mass).powf(0.25)
    }

    /// Map (σ, σ̇) to the c = 1/M² normalization.
    pub fn to_standard(&self, sigma: f64, sigma_dot: f64) -> (f64, f64) {
        let s = self.sigma_scale();
        (sigma / s, sigma_dot / s)
    }

    /// Inverse of [`to_standard`](Self::to_standard).
    pub fn from_standard(&self, sigma: f64, sigma_dot: f64) -> (f64, f64) {
        let s = self.sigma_scale();
        (sigma * s, sigma_dot * s)
    }
}

/// Side from which a protocol is evaluated at a discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Monotone cubic (PCHIP) interpolant of a sampled ω(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SampledGrid", into = "SampledGrid")]
pub struct SampledOmega {
    t: Vec<f64>,
    omega: Vec<f64>,
    slopes: Vec<f64>,
}

/// Serialized form of a sampled protocol; slopes are rebuilt on load.
#[derive(Serialize, Deserialize)]
struct SampledGrid {
    t: Vec<f64>,
    omega: Vec<f64>,
}

impl TryFrom<SampledGrid> for SampledOmega {
    type Error = ProtocolError;

    fn try_from(g: SampledGrid) -> Result<Self, ProtocolError> {
        Self::new(g.t, g.omega)
    }
}

impl From<SampledOmega> for SampledGrid {
    fn from(s: SampledOmega) -> Self {
        Self { t: s.t, omega: s.omega }
    }
}

impl SampledOmega {
    pub fn new(t: Vec<f64>, omega: Vec<f64>) -> Result<Self, ProtocolError> {
        if t.len() != omega.len() || t.len() < 2 {
            return Err(ProtocolError::InvalidParameter("sampled grid needs at least two (t, ω) pairs".into()));
        }
        if !t.windows(2).all(|w| w[1] > w[0]) || t.iter().any(|x| !x.is_finite()) {
            return Err(ProtocolError::InvalidParameter("sampled times must be strictly increasing".into()));
        }
        if omega.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(ProtocolError::InvalidParameter("sampled ω must be non-negative".into()));
        }
        let slopes = pchip_slopes(&t, &omega);
        Ok(Self { t, omega, slopes })
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.omega
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    fn locate(&self, t: f64) -> Result<usize, ProtocolError> {
        let (start, end) = self.range();
        if !(t >= start && t <= end) {
            return Err(ProtocolError::OutOfRange { t, start, end });
        }
        let idx = self.t.partition_point(|&x| x <= t);
        Ok(idx.saturating_sub(1).min(self.t.len() - 2))
    }

    pub fn eval(&self, t: f64) -> Result<f64, ProtocolError> {
        let i = self.locate(t)?;
        Ok(self.hermite(i, t).0)
    }

    pub fn eval_derivative(&self, t: f64) -> Result<f64, ProtocolError> {
        let i = self.locate(t)?;
        Ok(self.hermite(i, t).1)
    }

    fn hermite(&self, i: usize, t: f64) -> (f64, f64) {
        let h = self.t[i + 1] - self.t[i];
        let s = (t - self.t[i]) / h;
        let (y0, y1) = (self.omega[i], self.omega[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = (6.0 * s2 - 6.0 * s) / h;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = (-6.0 * s2 + 6.0 * s) / h;
        let dh11 = 3.0 * s2 - 2.0 * s;
        let deriv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
        (value, deriv)
    }

    fn reversed(&self, total: f64) -> Self {
        let t: Vec<f64> = self.t.iter().rev().map(|&x| total - x).collect();
        let omega: Vec<f64> = self.omega.iter().rev().copied().collect();
        let slopes: Vec<f64> = self.slopes.iter().rev().map(|&d| -d).collect();
        Self { t, omega, slopes }
    }
}

// Fritsch-Carlson slopes with the weighted harmonic mean and one-sided
// three-point end conditions.
fn pchip_slopes(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end = |h0: f64, h1: f64, m0: f64, m1: f64| {
        let mut d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if d.signum() != m0.signum() {
            d = 0.0;
        } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
            d = 3.0 * m0;
        }
        d
    };
    d[0] = end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

/// The algebra of driving protocols.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrequencyProtocol {
    Constant {
        omega0: f64,
    },
    SuddenQuench {
        omega_i: f64,
        omega_f: f64,
        t_q: f64,
    },
    Tanh {
        omega_i: f64,
        omega_f: f64,
        tau: f64,
        epsilon: f64,
    },
    LinearSymmetric {
        delta: f64,
    },
    NonlinearSymmetric {
        delta: f64,
        eta: f64,
    },
    Sampled(SampledOmega),
    /// p(total - t) for kinds without a closed-form reversal.
    Reversed {
        inner: Box<FrequencyProtocol>,
        total: f64,
    },
}

/// Default number of ε widths a tanh protocol is started before its centre.
pub const TANH_START_WIDTHS: f64 = 20.0;

impl FrequencyProtocol {
    pub fn constant(omega0: f64) -> Result<Self, ProtocolError> {
        let p = Self::Constant { omega0 };
        p.validate()?;
        Ok(p)
    }

    pub fn sudden_quench(omega_i: f64, omega_f: f64, t_q: f64) -> Result<Self, ProtocolError> {
        let p = Self::SuddenQuench { omega_i, omega_f, t_q };
        p.validate()?;
        Ok(p)
    }

    pub fn tanh(omega_i: f64, omega_f: f64, tau: f64, epsilon: f64) -> Result<Self, ProtocolError> {
        let p = Self::Tanh { omega_i, omega_f, tau, epsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn linear_symmetric(delta: f64) -> Result<Self, ProtocolError> {
        let p = Self::LinearSymmetric { delta };
        p.validate()?;
        Ok(p)
    }

    pub fn nonlinear_symmetric(delta: f64, eta: f64) -> Result<Self, ProtocolError> {
        let p = Self::NonlinearSymmetric { delta, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn sampled(t: Vec<f64>, omega: Vec<f64>) -> Result<Self, ProtocolError> {
        Ok(Self::Sampled(SampledOmega::new(t, omega)?))
    }

    /// Sample a protocol on `n` uniform points of [t0, t1].
    pub fn sample(&self, t0: f64, t1: f64, n: usize) -> Result<Self, ProtocolError> {
        if n < 2 || !(t1 > t0) {
            return Err(ProtocolError::InvalidParameter("sampling needs n >= 2 and t1 > t0".into()));
        }
        let t: Vec<f64> = (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect();
        let omega = t.iter().map(|&x| self.omega(x)).collect::<Result<Vec<_>, _>>()?;
        Self::sampled(t, omega)
    }

    pub fn validate(&self) -> Result<(), ProtocolError> {
        let bad = |msg: String| Err(ProtocolError::InvalidParameter(msg));
        let freq_ok = |w: f64| w >= 0.0 && w.is_finite();
        match *self {
            Self::Constant { omega0 } if !freq_ok(omega0) => bad(format!("omega0 = {omega0}")),
            Self::SuddenQuench { omega_i, omega_f, t_q } if !(freq_ok(omega_i) && freq_ok(omega_f) && t_q.is_finite()) => {
                bad(format!("sudden quench ({omega_i}, {omega_f}, {t_q})"))
            }
            Self::Tanh { omega_i, omega_f, tau, epsilon } => {
                if !(freq_ok(omega_i) && freq_ok(omega_f) && tau.is_finite()) {
                    bad(format!("tanh frequencies ({omega_i}, {omega_f}) and tau {tau}"))
                } else if !(epsilon > 0.0 && epsilon.is_finite()) {
                    bad(format!("tanh epsilon must be positive, got {epsilon}"))
                } else {
                    Ok(())
                }
            }
            Self::LinearSymmetric { delta } if !(delta > 0.0 && delta.is_finite()) => bad(format!("ramp delta = {delta}")),
            Self::NonlinearSymmetric { delta, eta } if !(delta > 0.0 && delta.is_finite() && eta >= 1.0 && eta.is_finite()) => {
                bad(format!("ramp delta = {delta}, eta = {eta}"))
            }
            Self::Reversed { ref inner, total } => {
                if !total.is_finite() {
                    return bad(format!("reversal total time {total}"));
                }
                inner.validate()
            }
            _ => Ok(()),
        }
    }

    /// ω(t), with the right-sided value at a quench instant.
    pub fn omega(&self, t: f64) -> Result<f64, ProtocolError> {
        self.omega_sided(t, Side::Right)
    }

    /// ω(t) taking the one-sided limit at a discontinuity.
    pub fn omega_sided(&self, t: f64, side: Side) -> Result<f64, ProtocolError> {
        Ok(match self {
            Self::Constant { omega0 } => *omega0,
            Self::SuddenQuench { omega_i, omega_f, t_q } => {
                let after = match side {
                    Side::Right => t >= *t_q,
                    Side::Left => t > *t_q,
                };
                if after {
                    *omega_f
                } else {
                    *omega_i
                }
            }
            Self::Tanh { omega_i, omega_f, tau, epsilon } => {
                // ω_i in the remote past, ω_f in the distant future.
                0.5 * (omega_i + omega_f) + 0.5 * (omega_f - omega_i) * ((t - tau) / epsilon).tanh()
            }
            Self::LinearSymmetric { delta } => (delta * t.abs()).sqrt(),
            Self::NonlinearSymmetric { delta, eta } => (delta * t.abs()).powf(0.5 * eta),
            Self::Sampled(s) => s.eval(t)?,
            Self::Reversed { inner, total } => {
                let flipped = match side {
                    Side::Left => Side::Right,
                    Side::Right => Side::Left,
                };
                inner.omega_sided(total - t, flipped)?
            }
        })
    }

    /// dω/dt.
    pub fn omega_dot(&self, t: f64) -> Result<f64, ProtocolError> {
        Ok(match self {
            Self::Constant { .. } => 0.0,
            Self::SuddenQuench { omega_i, omega_f, t_q } => {
                if t == *t_q && omega_i != omega_f {
                    return Err(ProtocolError::NonDifferentiable { t });
                }
                0.0
            }
            Self::Tanh { omega_i, omega_f, tau, epsilon } => {
                let sech = 1.0 / ((t - tau) / epsilon).cosh();
                0.5 * (omega_f - omega_i) * sech * sech / epsilon
            }
            Self::LinearSymmetric { delta } => ramp_derivative(*delta, 1.0, t)?,
            Self::NonlinearSymmetric { delta, eta } => ramp_derivative(*delta, *eta, t)?,
            Self::Sampled(s) => s.eval_derivative(t)?,
            Self::Reversed { inner, total } => -inner.omega_dot(total - t)?,
        })
    }

    /// Protocol p̃ with p̃(t) = p(total - t).
    pub fn reverse(&self, total: f64) -> Self {
        match self {
            Self::Constant { .. } => self.clone(),
            Self::SuddenQuench { omega_i, omega_f, t_q } => Self::SuddenQuench { omega_i: *omega_f, omega_f: *omega_i, t_q: total - t_q },
            Self::Tanh { omega_i, omega_f, tau, epsilon } => {
                Self::Tanh { omega_i: *omega_f, omega_f: *omega_i, tau: total - tau, epsilon: *epsilon }
            }
            Self::Sampled(s) => Self::Sampled(s.reversed(total)),
            Self::Reversed { inner, total: t0 } if *t0 == total => (**inner).clone(),
            _ => Self::Reversed { inner: Box::new(self.clone()), total },
        }
    }

    /// Interior points of (t0, t1) where ω or its derivative is not smooth.
    pub fn breakpoints(&self, t0: f64, t1: f64) -> Vec<f64> {
        let raw = match self {
            Self::SuddenQuench { t_q, omega_i, omega_f } if omega_i != omega_f => vec![*t_q],
            Self::LinearSymmetric { .. } | Self::NonlinearSymmetric { .. } => vec![0.0],
            Self::Reversed { inner, total } => inner.breakpoints(total - t1, total - t0).into_iter().map(|b| total - b).collect(),
            _ => Vec::new(),
        };
        let mut pts: Vec<f64> = raw.into_iter().filter(|&b| b > t0 && b < t1).collect();
        pts.sort_by(f64::total_cmp);
        pts
    }

    /// Default start time for protocols that begin "at minus infinity".
    pub fn default_start(&self) -> Option<f64> {
        match self {
            Self::Tanh { tau, epsilon, .. } => Some(tau - TANH_START_WIDTHS * epsilon),
            _ => None,
        }
    }
}

fn ramp_derivative(delta: f64, eta: f64, t: f64) -> Result<f64, ProtocolError> {
    if t == 0.0 {
        if eta > 2.0 {
            return Ok(0.0);
        }
        return Err(ProtocolError::NonDifferentiable { t });
    }
    let mag = 0.5 * eta * delta.powf(0.5 * eta) * t.abs().powf(0.5 * eta - 1.0);
    Ok(mag * t.signum())
}
