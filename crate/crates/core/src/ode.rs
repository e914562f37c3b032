//! Dormand-Prince 5(4) with PI step control and continuous output.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e}), state {state:?}")]
    StepSizeUnderflow { t: f64, h: f64, state: Vec<f64> },
    #[error("inadmissible trial state persisted after {retries} halvings at t = {t}, state {state:?}")]
    AdmissibilityExhausted { t: f64, retries: usize, state: Vec<f64> },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("right-hand side failed at t = {t}: {message}")]
    Rhs { t: f64, message: String },
}

/// Relative and absolute error tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rel: 1e-9, abs: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub halvings: usize,
}

impl StepStats {
    pub fn merge(&mut self, other: &StepStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.evaluations += other.evaluations;
        self.halvings += other.halvings;
    }
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    coeffs: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.coeffs[0]
    }

    pub fn end(&self) -> [f64; N] {
        std::array::from_fn(|i| self.coeffs[0][i] + self.coeffs[1][i])
    }

    /// Interpolated state at t.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        }
        y
    }

    /// Time derivative of the interpolant at t.
    pub fn eval_derivative(&self, t: f64) -> [f64; N] {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [_, r2, r3, r4, r5] = &self.coeffs;
        let mut dy = [0.0; N];
        for i in 0..N {
            let a = r4[i] + th1 * r5[i];
            let b = r3[i] + th * a;
            let c = r2[i] + th1 * b;
            let db = a - th * r5[i];
            let dc = -b + th1 * db;
            dy[i] = (c + th * dc) / self.h;
        }
        dy
    }
}

/// Piecewise continuous solution assembled from accepted steps.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution<const N: usize> {
    pub steps: Vec<DenseStep<N>>,
    pub stats: StepStats,
}

impl<const N: usize> DenseSolution<N> {
    pub fn span(&self) -> (f64, f64) {
        (self.steps[0].t0, self.steps[self.steps.len() - 1].t1())
    }

    /// Step containing t; None outside the span.
    pub fn locate(&self, t: f64) -> Option<&DenseStep<N>> {
        let (a, b) = self.span();
        if !(t >= a && t <= b) {
            return None;
        }
        let idx = self.steps.partition_point(|s| s.t0 <= t);
        Some(&self.steps[idx.saturating_sub(1)])
    }

    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        self.locate(t).map(|s| if t == s.t1() { s.end() } else { s.eval(t) })
    }

    pub fn append(&mut self, other: DenseSolution<N>) {
        self.steps.extend(other.steps);
        self.stats.merge(&other.stats);
    }
}

const MAX_HALVINGS: usize = 60;
const MAX_STEPS: usize = 5_000_000;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn combine<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn error_norm<const N: usize>(y0: &[f64; N], y1: &[f64; N], err: &[f64; N], tol: Tolerances) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sk = tol.abs + tol.rel * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sk).powi(2);
    }
    (acc / N as f64).sqrt()
}

/// Integrate y' = f(t, y) from t0 to t1 (t1 > t0).
///
/// `admissible` vetoes trial states; a vetoed step is halved and retried.
pub fn dopri5<const N: usize, F, G>(
    mut f: F,
    admissible: G,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: Tolerances,
) -> Result<DenseSolution<N>, OdeError>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], OdeError>,
    G: Fn(&[f64; N]) -> bool,
{
    let mut stats = StepStats::default();
    let mut steps = Vec::new();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    stats.evaluations += 1;
    let span = t1 - t0;
    let mut h = initial_step(&mut f, t, &y, &k1, tol, span, &mut stats)?;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut halvings = 0usize;

    while t < t1 {
        if steps.len() >= MAX_STEPS {
            return Err(OdeError::TooManySteps { t, max_steps: MAX_STEPS });
        }
        let mut last = false;
        if t + h >= t1 || t + 1.01 * h >= t1 {
            h = t1 - t;
            last = true;
        }
        if h < 1e-14 * t.abs().max(1.0) && !last {
            return Err(OdeError::StepSizeUnderflow { t, h, state: y.to_vec() });
        }

        let y2 = combine(&y, h, &[(A21, &k1)]);
        let k2 = f(t + C2 * h, &y2)?;
        let y3 = combine(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = f(t + C3 * h, &y3)?;
        let y4 = combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = f(t + C4 * h, &y4)?;
        let y5 = combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = f(t + C5 * h, &y5)?;
        let y6 = combine(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        let t_new = if last { t1 } else { t + h };
        let k6 = f(t_new, &y6)?;
        let y_new = combine(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        stats.evaluations += 5;

        let stages_ok = [&y2, &y3, &y4, &y5, &y6, &y_new].iter().all(|s| admissible(s) && s.iter().all(|v| v.is_finite()));
        if !stages_ok {
            halvings += 1;
            stats.halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(OdeError::AdmissibilityExhausted { t, retries: MAX_HALVINGS, state: y.to_vec() });
            }
            h *= 0.5;
            last_rejected = true;
            continue;
        }

        let k7 = f(t_new, &y_new)?;
        stats.evaluations += 1;
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let en = error_norm(&y, &y_new, &err, tol);

        const BETA: f64 = 0.04;
        const EXPO1: f64 = 0.2 - BETA * 0.75;
        const SAFE: f64 = 0.9;
        let fac11 = en.powf(EXPO1);
        if en <= 1.0 {
            let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(0.1, 5.0);
            facold = en.max(1e-4);
            let mut coeffs = [[0.0; N]; 5];
            for i in 0..N {
                let dy = y_new[i] - y[i];
                let bspl = h * k1[i] - dy;
                coeffs[0][i] = y[i];
                coeffs[1][i] = dy;
                coeffs[2][i] = bspl;
                coeffs[3][i] = dy - h * k7[i] - bspl;
                coeffs[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            steps.push(DenseStep { t0: t, h: t_new - t, coeffs });
            stats.accepted += 1;
            halvings = 0;
            t = t_new;
            y = y_new;
            k1 = k7;
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new.min(span);
        } else {
            stats.rejected += 1;
            h /= (fac11 / SAFE).min(5.0);
            last_rejected = true;
            if !en.is_finite() {
                h = h.min(0.5 * h);
            }
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(OdeError::StepSizeUnderflow { t, h, state: y.to_vec() });
        }
    }
    Ok(DenseSolution { steps, stats })
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    f0: &[f64; N],
    tol: Tolerances,
    span: f64,
    stats: &mut StepStats,
) -> Result<f64, OdeError>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], OdeError>,
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = tol.abs + tol.rel * y[i].abs();
        dnf += (f0[i] / sk).powi(2);
        dny += (y[i] / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { (dny / dnf).sqrt() * 0.01 };
    h = h.min(span);
    let y1 = combine(y, h, &[(1.0, f0)]);
    let f1 = f(t + h, &y1)?;
    stats.evaluations += 1;
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = tol.abs + tol.rel * y[i].abs();
        der2 += ((f1[i] - f0[i]) / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(0.2) };
    Ok((100.0 * h).min(h1).min(span))
}
