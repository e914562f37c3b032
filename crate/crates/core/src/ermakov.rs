//! Ermakov-Pinney solver, closed-form solution constructors and the
//! time-dependent-mass transformation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::{dopri5, DenseSolution, OdeError, StepStats, Tolerances};
use crate::protocols::{FrequencyProtocol, OscillatorParams, ProtocolError, Side};
use crate::specfun::{airy, SpecFunError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ErmakovError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error("integration failed: {0}")]
    Integration(#[from] OdeError),
    #[error("invalid initial conditions: {0}")]
    InvalidInitialConditions(String),
    #[error("invalid time span [{t0}, {t1}]")]
    InvalidSpan { t0: f64, t1: f64 },
    #[error("no equilibrium at t = {t}: ω = {omega}")]
    NoEquilibrium { t: f64, omega: f64 },
    #[error("t = {t} outside trajectory span [{start}, {end}]")]
    OutOfSpan { t: f64, start: f64, end: f64 },
    #[error("Pinney constraint violated: AC - B² = {lhs}, c/Wr² = {rhs}")]
    Constraint { lhs: f64, rhs: f64 },
    #[error("complex solution normalization violated: |2 a Im(b) Wr| = {value}")]
    Normalization { value: f64 },
    #[error("mass must be positive, got M({t}) = {mass}")]
    NonPositiveMass { t: f64, mass: f64 },
}

/// One point of an Ermakov trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErmakovState {
    pub t: f64,
    pub sigma: f64,
    pub sigma_dot: f64,
    pub phase_integral: f64,
}

/// σ₀ = (c M²)^{1/4}/√(Mω(t0)) with σ̇₀ = 0, so that Q(t0) = 1.
pub fn equilibrium_ics(p: &FrequencyProtocol, t0: f64, params: &OscillatorParams) -> Result<(f64, f64), ErmakovError> {
    let omega = p.omega(t0)?;
    if !(omega > 0.0) {
        return Err(ErmakovError::NoEquilibrium { t: t0, omega });
    }
    Ok((params.sigma_scale() / (params.mass * omega).sqrt(), 0.0))
}

/// WKB values: the equilibrium σ₀ with σ̇₀ = -σ₀ ω̇ / (2ω).
pub fn adiabatic_ics(p: &FrequencyProtocol, t0: f64, params: &OscillatorParams) -> Result<(f64, f64), ErmakovError> {
    let (sigma0, _) = equilibrium_ics(p, t0, params)?;
    let omega = p.omega(t0)?;
    let omega_dot = p.omega_dot(t0)?;
    Ok((sigma0, -0.5 * sigma0 * omega_dot / omega))
}

/// Numerical Ermakov trajectory with continuous output.
#[derive(Debug, Clone)]
pub struct ErmakovTrajectory {
    pub params: OscillatorParams,
    pub protocol: FrequencyProtocol,
    pub samples: Vec<ErmakovState>,
    solution: DenseSolution<3>,
    segment_ends: Vec<f64>,
}

fn check_sampled_range(p: &FrequencyProtocol, t0: f64, t1: f64) -> Result<(), ErmakovError> {
    match p {
        FrequencyProtocol::Sampled(s) => {
            let (a, b) = s.range();
            if t0 < a || t1 > b {
                let t = if t0 < a { t0 } else { t1 };
                return Err(ProtocolError::OutOfRange { t, start: a, end: b }.into());
            }
            Ok(())
        }
        FrequencyProtocol::Reversed { inner, total } => check_sampled_range(inner, total - t1, total - t0),
        _ => Ok(()),
    }
}

/// Integrate σ̈ = -ω²σ + c/σ³ together with the phase integral.
///
/// Protocol discontinuities are treated as breakpoints: each smooth segment
/// is integrated separately and evaluated with one-sided frequencies.
pub fn integrate(
    p: &FrequencyProtocol,
    params: &OscillatorParams,
    ics: (f64, f64),
    t_span: (f64, f64),
    tol: Tolerances,
) -> Result<ErmakovTrajectory, ErmakovError> {
    params.validate()?;
    p.validate()?;
    let (t0, t1) = t_span;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(ErmakovError::InvalidSpan { t0, t1 });
    }
    let (sigma0, sigma_dot0) = ics;
    if !(sigma0 > 0.0) || !sigma_dot0.is_finite() || !sigma0.is_finite() {
        return Err(ErmakovError::InvalidInitialConditions(format!("σ₀ = {sigma0}, σ̇₀ = {sigma_dot0}")));
    }
    check_sampled_range(p, t0, t1)?;

    let c = params.ermakov_c;
    // d(phase)/dt = 1/(M σ_std²) = √c/σ² in any convention.
    let phase_rate = c.sqrt();
    let mut edges = vec![t0];
    edges.extend(p.breakpoints(t0, t1));
    edges.push(t1);

    let mut y = [sigma0, sigma_dot0, 0.0];
    let mut solution: Option<DenseSolution<3>> = None;
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let rhs = |t: f64, y: &[f64; 3]| -> Result<[f64; 3], OdeError> {
            let side = if t >= b { Side::Left } else { Side::Right };
            let w = p.omega_sided(t, side).map_err(|e| OdeError::Rhs { t, message: e.to_string() })?;
            let s = y[0];
            let s2 = s * s;
            Ok([y[1], -w * w * s + c / (s2 * s), phase_rate / s2])
        };
        let part = dopri5(rhs, |y: &[f64; 3]| y[0] > 0.0, a, y, b, tol)?;
        y = part.steps.last().map(|s| s.end()).unwrap_or(y);
        match solution.as_mut() {
            Some(sol) => sol.append(part),
            None => solution = Some(part),
        }
    }
    let solution = solution.expect("at least one segment");
    let mut samples = Vec::with_capacity(solution.steps.len() + 1);
    let first = solution.steps[0].start();
    samples.push(ErmakovState { t: t0, sigma: first[0], sigma_dot: first[1], phase_integral: first[2] });
    for step in &solution.steps {
        let e = step.end();
        samples.push(ErmakovState { t: step.t1(), sigma: e[0], sigma_dot: e[1], phase_integral: e[2] });
    }
    Ok(ErmakovTrajectory { params: *params, protocol: p.clone(), samples, solution, segment_ends: edges[1..].to_vec() })
}

impl ErmakovTrajectory {
    pub fn span(&self) -> (f64, f64) {
        self.solution.span()
    }

    pub fn stats(&self) -> StepStats {
        self.solution.stats
    }

    pub fn initial_state(&self) -> ErmakovState {
        self.samples[0]
    }

    pub fn final_state(&self) -> ErmakovState {
        self.samples[self.samples.len() - 1]
    }

    fn out_of_span(&self, t: f64) -> ErmakovError {
        let (start, end) = self.span();
        ErmakovError::OutOfSpan { t, start, end }
    }

    /// State at an arbitrary time from the dense output.
    pub fn state_at(&self, t: f64) -> Result<ErmakovState, ErmakovError> {
        let y = self.solution.eval(t).ok_or_else(|| self.out_of_span(t))?;
        Ok(ErmakovState { t, sigma: y[0], sigma_dot: y[1], phase_integral: y[2] })
    }

    /// States on a list of times.
    pub fn states_at(&self, ts: &[f64]) -> Result<Vec<ErmakovState>, ErmakovError> {
        ts.iter().map(|&t| self.state_at(t)).collect()
    }

    /// ω(t) as seen by the integrator (left limit at the end of a segment).
    pub fn omega_at(&self, t: f64) -> Result<f64, ErmakovError> {
        let side = if self.segment_ends.contains(&t) { Side::Left } else { Side::Right };
        Ok(self.protocol.omega_sided(t, side)?)
    }

    /// σ̈ from differentiating the continuous σ̇.
    pub fn sigma_ddot_at(&self, t: f64) -> Result<f64, ErmakovError> {
        let step = self.solution.locate(t).ok_or_else(|| self.out_of_span(t))?;
        Ok(step.eval_derivative(t)[1])
    }

    /// |σ̈ + ω²σ - c/σ³| using the dense-output σ̈.
    pub fn residual_at(&self, t: f64) -> Result<f64, ErmakovError> {
        let s = self.state_at(t)?;
        let w = self.omega_at(t)?;
        let acc = self.sigma_ddot_at(t)?;
        Ok((acc + w * w * s.sigma - self.params.ermakov_c / s.sigma.powi(3)).abs())
    }

    /// Dynamical phase α_n(t) = -(n + 1/2) ∫ dt/(Mσ²).
    pub fn alpha_phase(&self, n: usize, t: f64) -> Result<f64, ErmakovError> {
        Ok(alpha_from_integral(n, self.state_at(t)?.phase_integral))
    }
}

pub fn alpha_from_integral(n: usize, phase_integral: f64) -> f64 {
    -(n as f64 + 0.5) * phase_integral
}

/// Which side of the critical point an Airy pair lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AiryBranch {
    /// s ≤ 0, ω² = -s: x1 = Ai(s), x2 = Bi(s).
    Negative,
    /// s ≥ 0, ω² = s: x1 = Ai(-s), x2 = Bi(-s).
    Positive,
}

#[derive(Debug, Clone)]
enum PairSource {
    Harmonic { omega: f64, init: [f64; 4] },
    Airy(AiryBranch),
    Numerical { protocol: FrequencyProtocol, solution: DenseSolution<4> },
}

/// Values of a homogeneous pair and derivatives at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairValues {
    pub x1: f64,
    pub x1_dot: f64,
    pub x2: f64,
    pub x2_dot: f64,
}

impl PairValues {
    pub fn wronskian(&self) -> f64 {
        self.x1 * self.x2_dot - self.x1_dot * self.x2
    }
}

/// Two real solutions of ẍ + ω²(t)x = 0.
#[derive(Debug, Clone)]
pub struct HomogeneousPair {
    t0: f64,
    source: PairSource,
}

impl HomogeneousPair {
    /// Constant-frequency pair with data (x1, ẋ1, x2, ẋ2) at t0.
    pub fn harmonic(omega: f64, t0: f64, init: [f64; 4]) -> Self {
        Self { t0, source: PairSource::Harmonic { omega, init } }
    }

    /// Airy pair in rescaled time, anchored at s = 0.
    pub fn airy(branch: AiryBranch) -> Self {
        Self { t0: 0.0, source: PairSource::Airy(branch) }
    }

    /// Pair integrated numerically through a protocol on [t0, t1].
    pub fn integrate(p: &FrequencyProtocol, t0: f64, t1: f64, init: [f64; 4], tol: Tolerances) -> Result<Self, ErmakovError> {
        if !(t1 > t0) {
            return Err(ErmakovError::InvalidSpan { t0, t1 });
        }
        check_sampled_range(p, t0, t1)?;
        let mut edges = vec![t0];
        edges.extend(p.breakpoints(t0, t1));
        edges.push(t1);
        let mut y = init;
        let mut solution: Option<DenseSolution<4>> = None;
        for seg in edges.windows(2) {
            let b = seg[1];
            let rhs = |t: f64, y: &[f64; 4]| -> Result<[f64; 4], OdeError> {
                let side = if t >= b { Side::Left } else { Side::Right };
                let w = p.omega_sided(t, side).map_err(|e| OdeError::Rhs { t, message: e.to_string() })?;
                let w2 = w * w;
                Ok([y[1], -w2 * y[0], y[3], -w2 * y[2]])
            };
            let part = dopri5(rhs, |_| true, seg[0], y, b, tol)?;
            y = part.steps.last().map(|s| s.end()).unwrap_or(y);
            match solution.as_mut() {
                Some(sol) => sol.append(part),
                None => solution = Some(part),
            }
        }
        Ok(Self { t0, source: PairSource::Numerical { protocol: p.clone(), solution: solution.expect("segment") } })
    }

    /// Pair with the Cauchy data x1 = σ₀, ẋ1 = σ̇₀, x2 = 0, ẋ2 = 1/σ₀ at t0.
    pub fn cauchy_basis(
        p: &FrequencyProtocol,
        t0: f64,
        t1: f64,
        sigma0: f64,
        sigma_dot0: f64,
        tol: Tolerances,
    ) -> Result<Self, ErmakovError> {
        if !(sigma0 > 0.0) {
            return Err(ErmakovError::InvalidInitialConditions(format!("σ₀ = {sigma0}")));
        }
        Self::integrate(p, t0, t1, [sigma0, sigma_dot0, 0.0, 1.0 / sigma0], tol)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn eval(&self, t: f64) -> Result<PairValues, ErmakovError> {
        match &self.source {
            PairSource::Harmonic { omega, init } => {
                let dt = t - self.t0;
                let (s, c) = (omega * dt).sin_cos();
                let prop = |x: f64, v: f64| {
                    if *omega == 0.0 {
                        (x + v * dt, v)
                    } else {
                        (x * c + v * s / omega, -x * omega * s + v * c)
                    }
                };
                let (x1, x1_dot) = prop(init[0], init[1]);
                let (x2, x2_dot) = prop(init[2], init[3]);
                Ok(PairValues { x1, x1_dot, x2, x2_dot })
            }
            PairSource::Airy(AiryBranch::Negative) => {
                let a = airy(t)?;
                Ok(PairValues { x1: a.ai, x1_dot: a.ai_prime, x2: a.bi, x2_dot: a.bi_prime })
            }
            PairSource::Airy(AiryBranch::Positive) => {
                let a = airy(-t)?;
                Ok(PairValues { x1: a.ai, x1_dot: -a.ai_prime, x2: a.bi, x2_dot: -a.bi_prime })
            }
            PairSource::Numerical { solution, .. } => {
                let (start, end) = solution.span();
                let y = solution.eval(t).ok_or(ErmakovError::OutOfSpan { t, start, end })?;
                Ok(PairValues { x1: y[0], x1_dot: y[1], x2: y[2], x2_dot: y[3] })
            }
        }
    }

    /// ω²(t) of the equation the pair solves.
    pub fn omega_sq(&self, t: f64) -> Result<f64, ErmakovError> {
        match &self.source {
            PairSource::Harmonic { omega, .. } => Ok(omega * omega),
            PairSource::Airy(_) => Ok(t.abs()),
            PairSource::Numerical { protocol, .. } => Ok(protocol.omega(t)?.powi(2)),
        }
    }

    /// Wronskian at the anchor time.
    pub fn wronskian(&self) -> Result<f64, ErmakovError> {
        Ok(self.eval(self.t0)?.wronskian())
    }

    /// Maximum deviation of the Wronskian from its anchor value on a grid.
    pub fn wronskian_drift(&self, grid: &[f64]) -> Result<f64, ErmakovError> {
        let w0 = self.wronskian()?;
        grid.iter().try_fold(0.0f64, |acc, &t| Ok(acc.max((self.eval(t)?.wronskian() - w0).abs())))
    }
}

/// σ(t) evaluators built from homogeneous solutions.
pub trait SigmaEvaluator {
    /// (σ, σ̇) at t.
    fn sigma(&self, t: f64) -> Result<(f64, f64), ErmakovError>;
    /// Ermakov constant the evaluator satisfies.
    fn ermakov_c(&self) -> f64;
    /// ω² of the underlying equation.
    fn omega_sq(&self, t: f64) -> Result<f64, ErmakovError>;
}

/// σ = (A x1² + 2B x1x2 + C x2²)^{1/2}.
#[derive(Debug, Clone)]
pub struct PinneySolution {
    pair: HomogeneousPair,
    a: f64,
    b: f64,
    c_coef: f64,
    c: f64,
}

fn constraint_ok(lhs: f64, rhs: f64, scale: f64) -> bool {
    (lhs - rhs).abs() <= 1e-10 * scale.max(1e-300)
}

pub fn pinney_solution(pair: HomogeneousPair, a: f64, b: f64, c_coef: f64, c: f64) -> Result<PinneySolution, ErmakovError> {
    let wr = pair.wronskian()?;
    let lhs = a * c_coef - b * b;
    let rhs = c / (wr * wr);
    let scale = (a * c_coef).abs().max(b * b).max(rhs.abs());
    if !constraint_ok(lhs, rhs, scale) || !(a > 0.0) || !(c > 0.0) {
        return Err(ErmakovError::Constraint { lhs, rhs });
    }
    Ok(PinneySolution { pair, a, b, c_coef, c })
}

impl SigmaEvaluator for PinneySolution {
    fn sigma(&self, t: f64) -> Result<(f64, f64), ErmakovError> {
        let v = self.pair.eval(t)?;
        let s2 = self.a * v.x1 * v.x1 + 2.0 * self.b * v.x1 * v.x2 + self.c_coef * v.x2 * v.x2;
        let sig = s2.sqrt();
        let ss_dot = self.a * v.x1 * v.x1_dot + self.b * (v.x1 * v.x2_dot + v.x1_dot * v.x2) + self.c_coef * v.x2 * v.x2_dot;
        Ok((sig, ss_dot / sig))
    }

    fn ermakov_c(&self) -> f64 {
        self.c
    }

    fn omega_sq(&self, t: f64) -> Result<f64, ErmakovError> {
        self.pair.omega_sq(t)
    }
}

/// σ = (x1² + c x2²)^{1/2} for a pair carrying the Cauchy data.
pub fn cauchy_solution(pair: HomogeneousPair, c: f64) -> Result<PinneySolution, ErmakovError> {
    let v = pair.eval(pair.t0())?;
    let wr = v.wronskian();
    if v.x2.abs() > 1e-12 * v.x1.abs() || (wr - 1.0).abs() > 1e-10 || !(v.x1 > 0.0) {
        return Err(ErmakovError::InvalidInitialConditions(format!(
            "Cauchy pair needs x1 > 0, x2(t0) = 0 and unit Wronskian, got x1 = {}, x2 = {}, Wr = {wr}",
            v.x1, v.x2
        )));
    }
    pinney_solution(pair, 1.0, 0.0, c, c)
}

/// σ = |a x1 + b x2| for the c = 1/4 convention.
#[derive(Debug, Clone)]
pub struct ComplexSolution {
    pair: HomogeneousPair,
    a: f64,
    b: Complex64,
}

/// Builds the complex-Wronskian solution; requires |2 a Im(b) Wr| = 1.
pub fn complex_solution(pair: HomogeneousPair, a: f64, b: Complex64) -> Result<ComplexSolution, ErmakovError> {
    let wr = pair.wronskian()?;
    let value = (2.0 * a * b.im * wr).abs();
    if (value - 1.0).abs() > 1e-10 {
        return Err(ErmakovError::Normalization { value });
    }
    Ok(ComplexSolution { pair, a, b })
}

impl SigmaEvaluator for ComplexSolution {
    fn sigma(&self, t: f64) -> Result<(f64, f64), ErmakovError> {
        let v = self.pair.eval(t)?;
        let w = self.b * v.x2 + self.a * v.x1;
        let w_dot = self.b * v.x2_dot + self.a * v.x1_dot;
        let sig = w.norm();
        Ok((sig, (w.conj() * w_dot).re / sig))
    }

    fn ermakov_c(&self) -> f64 {
        0.25
    }

    fn omega_sq(&self, t: f64) -> Result<f64, ErmakovError> {
        self.pair.omega_sq(t)
    }
}

/// Variable-mass problem mapped onto a unit-mass one in the time T = ∫dt/M.
pub struct MassRescaling<M: Fn(f64) -> f64> {
    mass: M,
    t_grid: Vec<f64>,
    big_t_grid: Vec<f64>,
    rescaled: FrequencyProtocol,
}

impl<M: Fn(f64) -> f64> std::fmt::Debug for MassRescaling<M> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MassRescaling").field("points", &self.t_grid.len()).finish()
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Build T(t), its inverse and the rescaled frequency ω̄(T) = M ω on `points` nodes of [t0, t1].
pub fn mass_rescale<M: Fn(f64) -> f64>(
    mass: M,
    p: &FrequencyProtocol,
    t_span: (f64, f64),
    points: usize,
) -> Result<MassRescaling<M>, ErmakovError> {
    let (t0, t1) = t_span;
    if !(t1 > t0) || points < 4 {
        return Err(ErmakovError::InvalidSpan { t0, t1 });
    }
    let t_grid: Vec<f64> = (0..points).map(|i| t0 + (t1 - t0) * i as f64 / (points - 1) as f64).collect();
    for &t in &t_grid {
        let m = mass(t);
        if !(m > 0.0) || !m.is_finite() {
            return Err(ErmakovError::NonPositiveMass { t, mass: m });
        }
    }
    let inv = |t: f64| 1.0 / mass(t);
    let mut big_t_grid = vec![0.0; points];
    for i in 1..points {
        big_t_grid[i] = big_t_grid[i - 1] + adaptive_simpson(&inv, t_grid[i - 1], t_grid[i], 1e-15);
    }
    let omega_bar = t_grid.iter().map(|&t| Ok(mass(t) * p.omega(t)?)).collect::<Result<Vec<f64>, ErmakovError>>()?;
    let rescaled = FrequencyProtocol::sampled(big_t_grid.clone(), omega_bar)?;
    Ok(MassRescaling { mass, t_grid, big_t_grid, rescaled })
}

impl<M: Fn(f64) -> f64> MassRescaling<M> {
    /// ω̄(T) as a sampled protocol in the rescaled time.
    pub fn rescaled_protocol(&self) -> &FrequencyProtocol {
        &self.rescaled
    }

    pub fn mass(&self, t: f64) -> f64 {
        (self.mass)(t)
    }

    pub fn t_span(&self) -> (f64, f64) {
        (self.t_grid[0], self.t_grid[self.t_grid.len() - 1])
    }

    pub fn big_t_span(&self) -> (f64, f64) {
        (0.0, self.big_t_grid[self.big_t_grid.len() - 1])
    }

    /// T(t) = ∫_{t0}^t dt'/M(t').
    pub fn big_t(&self, t: f64) -> f64 {
        let (a, b) = self.t_span();
        let t = t.clamp(a, b);
        let i = self.t_grid.partition_point(|&x| x <= t).saturating_sub(1).min(self.t_grid.len() - 2);
        let inv = |s: f64| 1.0 / (self.mass)(s);
        self.big_t_grid[i] + adaptive_simpson(&inv, self.t_grid[i], t, 1e-15)
    }

    /// t(T): bracketing by the tabulated map, then Newton on T(t) - T.
    pub fn t_of(&self, big_t: f64) -> f64 {
        let j = self.big_t_grid.partition_point(|&x| x <= big_t).saturating_sub(1).min(self.big_t_grid.len() - 2);
        let (ta, tb) = (self.t_grid[j], self.t_grid[j + 1]);
        let (ba, bb) = (self.big_t_grid[j], self.big_t_grid[j + 1]);
        let mut t = ta + (tb - ta) * (big_t - ba) / (bb - ba);
        for _ in 0..50 {
            let step = (self.big_t(t) - big_t) * (self.mass)(t);
            t -= step;
            if step.abs() <= 1e-15 * t.abs().max(1.0) {
                break;
            }
        }
        t
    }

    /// Damping rate d/dt ln M by central differences.
    pub fn damping(&self, t: f64) -> f64 {
        let h = 1e-5 * t.abs().max(1.0);
        ((self.mass)(t + h).ln() - (self.mass)(t - h).ln()) / (2.0 * h)
    }

    /// (σ, σ̇) at physical time t from a trajectory integrated in T with unit mass.
    pub fn pull_back(&self, traj: &ErmakovTrajectory, t: f64) -> Result<(f64, f64), ErmakovError> {
        let s = traj.state_at(self.big_t(t))?;
        Ok((s.sigma, s.sigma_dot / (self.mass)(t)))
    }
}
