//! Squeezing-operator matrix elements, excitation distributions, transition
//! tables, coordinate wavefunctions and two independent oracles.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{bogoliubov_uv, squeeze_params, DiagnosticsError, SqueezeParams};
use crate::ermakov::{alpha_from_integral, equilibrium_ics, ErmakovError, ErmakovTrajectory};
use crate::protocols::OscillatorParams;
use crate::specfun::{assoc_legendre, hermite_normalized, hypergeom_terminating, ln_factorial, QuadratureRule, SpecFunError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("levels m = {m} and n = {n} have opposite parity")]
    Parity { m: usize, n: usize },
    #[error("truncation N = {n} below the budget {required} for r = {r}")]
    TruncationBudget { n: usize, required: usize, r: f64 },
    #[error("quadrature order {order} below the required {required}")]
    QuadratureOrder { order: usize, required: usize },
    #[error("trajectory does not start from equilibrium: σ₀ = {sigma0}, σ̇₀ = {sigma_dot0}, expected σ₀ = {expected}")]
    NonEquilibriumStart { sigma0: f64, sigma_dot0: f64, expected: f64 },
    #[error("unstable quadratic form: η = {eta} ≤ 2|ε| = {bound}")]
    Instability { eta: f64, bound: f64 },
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Ermakov(#[from] ErmakovError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}

fn same_parity(m: usize, n: usize) -> bool {
    (m + n) % 2 == 0
}

/// ⟨m|S|n⟩ from the finite double-factorial sums.
pub fn squeeze_element_series(m: usize, n: usize, sq: &SqueezeParams) -> Complex64 {
    if !same_parity(m, n) {
        return Complex64::new(0.0, 0.0);
    }
    let r = sq.r;
    let (hi, lo) = if m >= n { (m, n) } else { (n, m) };
    let d = (hi - lo) / 2;
    if r == 0.0 {
        return Complex64::new(if m == n { 1.0 } else { 0.0 }, 0.0);
    }
    let x = r.sinh().powi(2) / 4.0;
    let ln_x = x.ln();
    let half_ln = 0.5 * (ln_factorial(m) + ln_factorial(n));
    let mut sum = 0.0;
    for j in 0..=lo / 2 {
        let ln_term = j as f64 * ln_x - ln_factorial(d + j) - ln_factorial(j) - ln_factorial(lo - 2 * j);
        let term = (ln_term + half_ln).exp();
        sum += if j % 2 == 0 { term } else { -term };
    }
    let ln_pref = -(lo as f64 + 0.5) * r.cosh().ln() + d as f64 * (r.tanh() / 2.0).ln();
    let mag = ln_pref.exp() * sum;
    // (-ζ/2)^d above the diagonal, (ζ*/2)^d below it.
    let (sign, angle) = if m >= n { (if d % 2 == 0 { 1.0 } else { -1.0 }, d as f64 * sq.phi) } else { (1.0, -(d as f64) * sq.phi) };
    Complex64::from_polar(sign * mag, angle)
}

/// ⟨m|S|n⟩ through associated Legendre functions of x = 1/cosh r.
pub fn squeeze_element_legendre(m: usize, n: usize, sq: &SqueezeParams) -> Result<Complex64, FockError> {
    if !same_parity(m, n) {
        return Err(FockError::Parity { m, n });
    }
    let x = 1.0 / sq.r.cosh();
    let l = (m + n) / 2;
    let (lo, hi) = (m.min(n), m.max(n));
    let k = (hi - lo) / 2;
    let ratio = (0.5 * (ln_factorial(lo) - ln_factorial(hi))).exp();
    let p = assoc_legendre(l, k as i64, x)?;
    let mag = ratio * x.sqrt() * p;
    if m >= n {
        Ok(Complex64::from_polar(mag, k as f64 * sq.phi))
    } else {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Ok(Complex64::from_polar(sign * mag, -(k as f64) * sq.phi))
    }
}

/// ⟨m|S|n⟩ through the terminating Gauss hypergeometric function.
pub fn squeeze_element_hypergeometric(m: usize, n: usize, sq: &SqueezeParams) -> Result<Complex64, FockError> {
    if !same_parity(m, n) {
        return Err(FockError::Parity { m, n });
    }
    let r = sq.r;
    let (lo, hi) = (m.min(n), m.max(n));
    let k = (hi - lo) / 2;
    let lof = lo as f64;
    let f = hypergeom_terminating(-lof / 2.0, (1.0 - lof) / 2.0, k as f64 + 1.0, -r.sinh().powi(2))?;
    let ln_mag = 0.5 * (ln_factorial(hi) - ln_factorial(lo)) - ln_factorial(k) - (lof + 0.5) * r.cosh().ln();
    let t = (r.tanh() / 2.0).powi(k as i32);
    let mag = ln_mag.exp() * t * f;
    if m >= n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        Ok(Complex64::from_polar(sign * mag, k as f64 * sq.phi))
    } else {
        Ok(Complex64::from_polar(mag, -(k as f64) * sq.phi))
    }
}

/// Default oracle truncation max(64, 8(m+n), ⌈40 r⌉ + 32).
pub fn default_truncation(m: usize, n: usize, r: f64) -> usize {
    64usize.max(8 * (m + n)).max((40.0 * r).ceil() as usize + 32)
}

/// Smallest admissible oracle truncation for a given r.
pub fn truncation_floor(r: f64) -> usize {
    (40.0 * r).ceil() as usize + 20
}

fn norm1(a: &DMatrix<Complex64>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a Taylor polynomial.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm = norm1(a);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        result += &term;
        if norm1(&term) <= 1e-18 * norm1(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// exp(-(ξ/2) b†² + (ξ*/2) b²) in an N-dimensional Fock truncation, ξ = r e^{iφ}.
pub fn oracle_squeeze_matrix(sq: &SqueezeParams, n: usize) -> Result<DMatrix<Complex64>, FockError> {
    let required = truncation_floor(sq.r);
    if n < required {
        return Err(FockError::TruncationBudget { n, required, r: sq.r });
    }
    let xi = Complex64::from_polar(sq.r, sq.phi);
    let mut gen = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n.saturating_sub(2) {
        let c = (((k + 1) * (k + 2)) as f64).sqrt();
        gen[(k + 2, k)] = -xi / 2.0 * c;
        gen[(k, k + 2)] = xi.conj() / 2.0 * c;
    }
    Ok(expm(&gen))
}

/// p(m|n) = (min!/max!) x |P_l^{|k|}(x)|², zero for opposite parity.
pub fn transition_probability(m: usize, n: usize, r: f64) -> f64 {
    if !same_parity(m, n) {
        return 0.0;
    }
    let (lo, hi) = (m.min(n), m.max(n));
    let l = (lo + hi) / 2;
    let k = (hi - lo) / 2;
    let x = 1.0 / r.cosh();
    let p = assoc_legendre(l, k as i64, x).expect("x = 1/cosh r lies in (0, 1]");
    (ln_factorial(lo) - ln_factorial(hi)).exp() * x * p * p
}

/// Probabilities p[m][n] between instantaneous eigenstates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionTable {
    pub dimension: usize,
    pub probabilities: Vec<Vec<f64>>,
    pub squeeze: SqueezeParams,
}

impl TransitionTable {
    pub fn build(squeeze: SqueezeParams, dimension: usize) -> Self {
        let probabilities = (0..dimension).map(|m| (0..dimension).map(|n| transition_probability(m, n, squeeze.r)).collect()).collect();
        Self { dimension, probabilities, squeeze }
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.probabilities[m][n]
    }

    /// Σ_m p[m][n].
    pub fn column_sum(&self, n: usize) -> f64 {
        self.probabilities.iter().map(|row| row[n]).sum()
    }
}

/// Even-excitation distribution of the dynamical ground state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationPMF {
    pub r: f64,
    /// masses[k] = p(2k).
    pub masses: Vec<f64>,
}

impl ExcitationPMF {
    pub fn total(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Σ 2k p(2k).
    pub fn mean(&self) -> f64 {
        self.masses.iter().enumerate().map(|(k, p)| 2.0 * k as f64 * p).sum()
    }

    /// Upper bound on the omitted mass beyond the last k.
    pub fn tail_bound(&self) -> f64 {
        let t2 = self.r.tanh().powi(2);
        t2.powi(self.masses.len() as i32) * self.r.cosh()
    }
}

/// binom(k - 1/2, k) √p̃ (1 - p̃)^k.
pub fn negative_binomial_mass(k: usize, p_tilde: f64) -> f64 {
    let ln_binom = ln_factorial(2 * k) - 2.0 * ln_factorial(k) - k as f64 * 4f64.ln();
    let ln_tail = if k == 0 { 0.0 } else { k as f64 * (1.0 - p_tilde).ln() };
    (ln_binom + ln_tail).exp() * p_tilde.sqrt()
}

/// (2k)!/((k!)² 4^k) tanh^{2k} r / cosh r.
pub fn ground_pmf_mass(k: usize, r: f64) -> f64 {
    let ln_binom = ln_factorial(2 * k) - 2.0 * ln_factorial(k) - k as f64 * 4f64.ln();
    let ln_tanh = if k == 0 { 0.0 } else { 2.0 * k as f64 * r.tanh().ln() };
    (ln_binom + ln_tanh).exp() / r.cosh()
}

/// Smallest K with tanh^{2K} r cosh r ≤ 1e-14.
pub fn pmf_tail_cutoff(r: f64) -> usize {
    if r == 0.0 {
        return 0;
    }
    let t = r.tanh();
    let k = ((1e-14f64.ln() - r.cosh().ln()) / (2.0 * t.ln())).ceil();
    k.max(0.0) as usize
}

/// p(2k) for k = 0..=K.
pub fn ground_excitation_pmf(r: f64, k_max: usize) -> ExcitationPMF {
    let p_tilde = 1.0 / r.cosh().powi(2);
    let masses = (0..=k_max).map(|k| negative_binomial_mass(k, p_tilde)).collect();
    ExcitationPMF { r, masses }
}

/// e^{iα_n} e^{i(n+½)χ} ⟨m|S|n⟩ at time t for a trajectory started at equilibrium.
pub fn full_amplitude(m: usize, n: usize, t: f64, traj: &ErmakovTrajectory) -> Result<Complex64, FockError> {
    let start = traj.initial_state();
    let (expected, _) = equilibrium_ics(&traj.protocol, start.t, &traj.params)?;
    if (start.sigma - expected).abs() > 1e-12 * expected || start.sigma_dot.abs() > 1e-12 * expected {
        return Err(FockError::NonEquilibriumStart { sigma0: start.sigma, sigma_dot0: start.sigma_dot, expected });
    }
    let s = traj.state_at(t)?;
    let omega = traj.omega_at(t)?;
    let sq = squeeze_params(&bogoliubov_uv(s.sigma, s.sigma_dot, omega, &traj.params)?)?;
    let phase = alpha_from_integral(n, s.phase_integral) + (n as f64 + 0.5) * sq.chi;
    Ok(Complex64::from_polar(1.0, phase) * squeeze_element_series(m, n, &sq))
}

/// (ω_eff, r, φ) diagonalizing η b†b + ε b†² + ε* b².
pub fn quadratic_diagonalize(eta: f64, eps: Complex64) -> Result<(f64, f64, f64), FockError> {
    let bound = 2.0 * eps.norm();
    if !(eta > bound) {
        return Err(FockError::Instability { eta, bound });
    }
    let omega_eff = (eta * eta - bound * bound).sqrt();
    let r = 0.5 * (bound / eta).atanh();
    let phi = if eps.norm() == 0.0 { 0.0 } else { eps.arg() };
    Ok((omega_eff, r, phi))
}

/// Dynamical eigenfunction ψ_n(q; t) including the phase e^{iα_n}.
pub fn wavefunction(n: usize, q: f64, sigma: f64, sigma_dot: f64, phase_integral: f64, params: &OscillatorParams) -> Complex64 {
    let (s, sd) = params.to_standard(sigma, sigma_dot);
    let hbar = params.hbar;
    let width = hbar.sqrt() * s;
    let y = q / width;
    let h = hermite_normalized(n, Complex64::new(y, 0.0))[n].re;
    let norm = (std::f64::consts::PI * hbar * s * s).powf(-0.25);
    let exponent = Complex64::new(-q * q / (2.0 * hbar * s * s), params.mass * sd * q * q / (2.0 * hbar * s));
    let alpha = alpha_from_integral(n, phase_integral);
    norm * h * (exponent + Complex64::new(0.0, alpha)).exp()
}

/// Instantaneous eigenfunction Φ_n(q) of H(t) with frequency ω.
pub fn adiabatic_wavefunction(n: usize, q: f64, omega: f64, params: &OscillatorParams) -> f64 {
    let f = (params.mass * omega / params.hbar).sqrt();
    let h = hermite_normalized(n, Complex64::new(f * q, 0.0))[n].re;
    (f * f / std::f64::consts::PI).powf(0.25) * h * (-0.5 * f * f * q * q).exp()
}

/// Overlap ∫ Φ_m φ_n dq by Gauss-Hermite quadrature along a rotated contour.
///
/// The dynamical phase e^{iα_n} is excluded.
pub fn quadrature_amplitude(
    m: usize,
    n: usize,
    sigma: f64,
    sigma_dot: f64,
    omega: f64,
    params: &OscillatorParams,
    rule: &QuadratureRule,
) -> Result<Complex64, FockError> {
    let required = m + n + 16;
    if rule.order() < required {
        return Err(FockError::QuadratureOrder { order: rule.order(), required });
    }
    if !(omega > 0.0) {
        return Err(DiagnosticsError::NonPositiveFrequency { omega }.into());
    }
    if !(sigma > 0.0) {
        return Err(DiagnosticsError::NonPositiveSigma { sigma }.into());
    }
    let (s, sd) = params.to_standard(sigma, sigma_dot);
    let hbar = params.hbar;
    let f2 = params.mass * omega / hbar;
    let width = hbar.sqrt() * s;
    // Gaussian exponent -A q² of the integrand, Re A > 0.
    let a = Complex64::new(0.5 * (f2 + 1.0 / (width * width)), -0.5 * params.mass * sd / (hbar * s));
    let root = a.sqrt();
    let inv_root = 1.0 / root;
    let f = f2.sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let q = x * inv_root;
        let hm = hermite_normalized(m, q * f)[m];
        let hn = hermite_normalized(n, q / width)[n];
        acc += w * hm * hn;
    }
    let norm = (f2 / std::f64::consts::PI).powf(0.25) * (std::f64::consts::PI * width * width).powf(-0.25);
    Ok(acc * inv_root * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::fock_variances;
    use crate::ermakov::integrate;
    use crate::ode::Tolerances;
    use crate::protocols::FrequencyProtocol;
    use crate::specfun::gauss_hermite;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sq(r: f64, phi: f64) -> SqueezeParams {
        SqueezeParams::new(r, phi, 0.0)
    }

    #[test]
    fn series_examples() {
        for m in 0..8 {
            for n in 0..8 {
                let e = squeeze_element_series(m, n, &sq(0.0, 0.4));
                assert_eq!(e, Complex64::new(if m == n { 1.0 } else { 0.0 }, 0.0));
            }
        }
        let r = 0.7;
        let phi = 0.9;
        let s = sq(r, phi);
        assert_relative_eq!(squeeze_element_series(0, 0, &s).re, 1.0 / r.cosh().sqrt(), epsilon = 1e-15);
        let expected = -Complex64::from_polar(r.tanh(), phi) / 2f64.sqrt() / r.cosh().sqrt();
        assert!((squeeze_element_series(2, 0, &s) - expected).norm() < 1e-15);
        assert_eq!(squeeze_element_series(3, 0, &s), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn legendre_and_hypergeometric_forms_match_series() {
        for &r in &[0.05, 0.3, 0.6585, 1.2, 1.5] {
            for &phi in &[0.0, 0.3, -2.0, 2.5] {
                let s = sq(r, phi);
                for m in 0..=16usize {
                    for n in (m % 2..=16 - m).step_by(2) {
                        let series = squeeze_element_series(m, n, &s);
                        let leg = squeeze_element_legendre(m, n, &s).unwrap();
                        let hyp = squeeze_element_hypergeometric(m, n, &s).unwrap();
                        assert!((series.norm() - leg.norm()).abs() <= 1e-10, "m={m} n={n} r={r}");
                        assert!((series - leg).norm() <= 1e-10, "phase m={m} n={n} r={r}");
                        assert!((series - hyp).norm() <= 1e-10, "hyp m={m} n={n} r={r}");
                    }
                }
            }
        }
        assert!(matches!(squeeze_element_legendre(1, 0, &sq(0.3, 0.0)), Err(FockError::Parity { .. })));
        let near_zero = sq(1e-9, 0.2);
        for m in 0..6 {
            let e = squeeze_element_legendre(m, m, &near_zero).unwrap();
            assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn oracle_basics() {
        let id = oracle_squeeze_matrix(&sq(0.0, 0.0), 64).unwrap();
        assert!((id - DMatrix::<Complex64>::identity(64, 64)).iter().all(|z| z.norm() == 0.0));
        assert!(matches!(oracle_squeeze_matrix(&sq(1.0, 0.0), 40), Err(FockError::TruncationBudget { .. })));
        for &r in &[0.4, 1.0, 1.5] {
            let n = default_truncation(0, 0, r);
            let s = oracle_squeeze_matrix(&sq(r, 0.7), n).unwrap();
            for j in 0..n / 2 {
                let col: f64 = s.column(j).iter().map(|z| z.norm_sqr()).sum();
                assert!((col - 1.0).abs() < 1e-8, "r={r} j={j}");
            }
        }
    }

    #[test]
    fn oracle_matches_series() {
        let s = sq(0.6585, 0.3);
        let n = default_truncation(12, 12, s.r);
        let oracle = oracle_squeeze_matrix(&s, n).unwrap();
        for m in 0..=12 {
            for k in 0..=12 {
                let diff = (oracle[(m, k)] - squeeze_element_series(m, k, &s)).norm();
                assert!(diff <= 1e-8, "m={m} n={k} diff={diff}");
            }
        }
    }

    #[test]
    fn transition_probability_examples() {
        for m in 0..10 {
            for n in 0..10 {
                assert_eq!(transition_probability(m, n, 0.0), if m == n { 1.0 } else { 0.0 });
            }
        }
        for &r in &[0.1, 0.8, 2.0] {
            for m in 0..=20 {
                for n in 0..=20 {
                    assert_eq!(transition_probability(m, n, r).to_bits(), transition_probability(n, m, r).to_bits());
                }
            }
        }
        let r = (2.0 / 3f64.sqrt()).acosh();
        assert_relative_eq!(transition_probability(2, 0, r), 3f64.sqrt() / 16.0, epsilon = 1e-15);
        assert_relative_eq!(transition_probability(2, 0, r), 0.5 * r.tanh().powi(2) / r.cosh(), epsilon = 1e-15);
    }

    #[test]
    fn transition_table_invariants() {
        let table = TransitionTable::build(sq(0.9, 0.3), 60);
        let mut previous = vec![0.0; 9];
        for n in 0..60 {
            for m in 0..60 {
                let p = table.get(m, n);
                assert!(p >= 0.0);
                if (m + n) % 2 == 1 {
                    assert_eq!(p, 0.0);
                }
                assert_eq!(p, table.get(n, m));
            }
            assert!(table.column_sum(n) <= 1.0 + 1e-12);
        }
        for (idx, dim) in [20usize, 40, 60].iter().enumerate() {
            let t = TransitionTable::build(sq(0.9, 0.3), *dim);
            for n in 0..9 {
                let s = t.column_sum(n);
                if idx > 0 {
                    assert!(s >= previous[n]);
                }
                previous[n] = s;
            }
        }
    }

    #[test]
    fn unitarity_to_four_hundred() {
        for &r in &[0.3, 1.0] {
            for n in 0..=8 {
                let total: f64 = (0..=400).map(|m| squeeze_element_series(m, n, &sq(r, 0.4)).norm_sqr()).sum();
                assert!((total - 1.0).abs() < 1e-10, "r={r} n={n} total={total}");
            }
        }
    }

    #[test]
    fn pmf_examples() {
        let p0 = ground_excitation_pmf(0.0, 5);
        assert_eq!(p0.masses[0], 1.0);
        assert!(p0.masses[1..].iter().all(|&p| p == 0.0));

        let r = 0.6585;
        let pmf = ground_excitation_pmf(r, 200);
        assert!((1.0 - pmf.total()).abs() <= 1e-12);
        for &r in &[0.2, 0.6585, 1.2] {
            let pmf = ground_excitation_pmf(r, pmf_tail_cutoff(r));
            assert!((pmf.total() - 1.0).abs() <= 1e-12, "r={r}");
            assert!((pmf.mean() - ((2.0 * r).cosh() - 1.0) / 2.0).abs() <= 1e-10, "r={r}");
            let p_tilde = 1.0 / r.cosh().powi(2);
            for (k, &m) in pmf.masses.iter().enumerate() {
                assert_eq!(m.to_bits(), negative_binomial_mass(k, p_tilde).to_bits());
                assert_relative_eq!(m, ground_pmf_mass(k, r), max_relative = 1e-12, epsilon = 1e-300);
                // Equal to |⟨2k|S|0⟩|².
                if k <= 30 {
                    assert_relative_eq!(m, squeeze_element_series(2 * k, 0, &sq(r, 0.0)).norm_sqr(), max_relative = 1e-11);
                }
            }
            assert!(r.tanh().powi(2 * pmf_tail_cutoff(r) as i32) <= 1e-14);
        }
    }

    #[test]
    fn diagonalize_examples() {
        assert_eq!(quadratic_diagonalize(1.3, Complex64::new(0.0, 0.0)).unwrap(), (1.3, 0.0, 0.0));
        let (w, r, phi) = quadratic_diagonalize(2.0, Complex64::from_polar(0.6, 0.4)).unwrap();
        assert_relative_eq!(w, 1.6, epsilon = 1e-15);
        assert_relative_eq!(phi, 0.4, epsilon = 1e-15);
        assert!((r.cosh() - ((2.0 / w + 1.0) / 2.0).sqrt()).abs() <= 1e-12);
        assert!(matches!(quadratic_diagonalize(1.0, Complex64::new(0.5, 0.0)), Err(FockError::Instability { .. })));
    }

    #[test]
    fn wavefunction_normalization_and_variance() {
        let params = OscillatorParams::default();
        let (s, sd) = (0.8, 0.35);
        let rule = gauss_hermite(60).unwrap();
        let width = s;
        for n in 0..=10 {
            let norm: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| w * (x * x).exp() * wavefunction(n, width * x, s, sd, 0.3, &params).norm_sqr() * width)
                .sum();
            assert!((norm - 1.0).abs() <= 1e-9, "n={n} norm={norm}");
            let q2: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&x, &w)| {
                    let q = width * x;
                    w * (x * x).exp() * q * q * wavefunction(n, q, s, sd, 0.3, &params).norm_sqr() * width
                })
                .sum();
            let (vq, _) = fock_variances(n, s, sd, 1.7, &params).unwrap();
            assert!((q2 - vq).abs() <= 1e-8, "n={n}");
        }
    }

    #[test]
    fn wavefunction_at_equilibrium_is_eigenfunction() {
        let params = OscillatorParams::default();
        let w: f64 = 2.2;
        let s = 1.0 / w.sqrt();
        for n in 0..6 {
            let mut ratio: Option<Complex64> = None;
            for i in 0..20 {
                let q = -1.5 + 0.17 * i as f64;
                let phi = adiabatic_wavefunction(n, q, w, &params);
                if phi.abs() < 1e-6 {
                    continue;
                }
                let rr = wavefunction(n, q, s, 0.0, 0.9, &params) / phi;
                assert!((rr.norm() - 1.0).abs() < 1e-12);
                if let Some(r0) = ratio {
                    assert!((rr - r0).norm() < 1e-12);
                }
                ratio = Some(rr);
            }
        }
    }

    #[test]
    fn quadrature_examples() {
        let params = OscillatorParams::default();
        let rule = gauss_hermite(40).unwrap();
        let w: f64 = 1.6;
        for m in 0..6 {
            for n in 0..6 {
                let a = quadrature_amplitude(m, n, 1.0 / w.sqrt(), 0.0, w, &params, &rule).unwrap();
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((a - Complex64::new(expected, 0.0)).norm() <= 1e-10, "m={m} n={n}");
            }
        }
        let short = gauss_hermite(10).unwrap();
        assert!(matches!(quadrature_amplitude(2, 2, 1.0, 0.0, 1.0, &params, &short), Err(FockError::QuadratureOrder { .. })));
        let t = 0.37f64;
        let s = ((3.0 * t).cos().powi(2) + (3.0 * t).sin().powi(2) / 9.0).sqrt();
        let sd = -3.0 * (3.0 * t).sin() * (3.0 * t).cos() * (8.0 / 9.0) / s;
        let odd = quadrature_amplitude(1, 0, s, sd, 3.0, &params, &rule).unwrap();
        assert!(odd.norm() <= 1e-12);
        let amp = quadrature_amplitude(2, 0, s, sd, 3.0, &params, &rule).unwrap();
        let r = (2.0 / 3f64.sqrt()).acosh();
        assert!((amp.norm_sqr() - transition_probability(2, 0, r)).abs() <= 1e-8);
    }

    #[test]
    fn quadrature_carries_rotation_phase() {
        let params = OscillatorParams::new(1.3, 0.8).unwrap();
        let rule = gauss_hermite(48).unwrap();
        let (s, sd, w) = (0.7, -0.4, 1.9);
        let sqp = squeeze_params(&bogoliubov_uv(s, sd, w, &params).unwrap()).unwrap();
        for m in 0..8 {
            for n in 0..8 {
                let quad = quadrature_amplitude(m, n, s, sd, w, &params, &rule).unwrap();
                let alg = Complex64::from_polar(1.0, (n as f64 + 0.5) * sqp.chi) * squeeze_element_series(m, n, &sqp);
                assert!((quad - alg).norm() <= 1e-10, "m={m} n={n}: {quad} vs {alg}");
            }
        }
    }

    #[test]
    fn full_amplitude_on_quench() {
        let params = OscillatorParams::default();
        let p = FrequencyProtocol::sudden_quench(1.0, 3.0, 0.0).unwrap();
        let ics = equilibrium_ics(&p, -0.5, &params).unwrap();
        let traj = integrate(&p, &params, ics, (-0.5, 3.0), Tolerances { rel: 1e-11, abs: 1e-13 }).unwrap();
        let rule = gauss_hermite(40).unwrap();
        for m in 0..5 {
            for n in 0..5 {
                let start = full_amplitude(m, n, -0.5, &traj).unwrap();
                assert!((start.norm() - if m == n { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        for &t in &[0.2, 1.1, 2.9] {
            let st = traj.state_at(t).unwrap();
            for m in 0..=6 {
                for n in 0..=6 {
                    let fa = full_amplitude(m, n, t, &traj).unwrap();
                    let quad = quadrature_amplitude(m, n, st.sigma, st.sigma_dot, 3.0, &params, &rule).unwrap();
                    assert!((fa.norm() - quad.norm()).abs() <= 1e-8);
                    let dressed = Complex64::from_polar(1.0, traj.alpha_phase(n, t).unwrap()) * quad;
                    assert!((fa - dressed).norm() <= 1e-8);
                    assert!((fa.norm_sqr() - transition_probability(m, n, (2.0 / 3f64.sqrt()).acosh())).abs() <= 1e-8);
                }
            }
        }
        let off = integrate(&p, &params, (1.1, 0.0), (-0.5, 1.0), Tolerances::default()).unwrap();
        assert!(matches!(full_amplitude(0, 0, 0.5, &off), Err(FockError::NonEquilibriumStart { .. })));
    }

    #[test]
    fn superposition_is_linear() {
        let params = OscillatorParams::default();
        let p = FrequencyProtocol::tanh(1.0, 2.0, 0.0, 0.4).unwrap();
        let t0 = p.default_start().unwrap();
        let traj = integrate(&p, &params, equilibrium_ics(&p, t0, &params).unwrap(), (t0, 3.0), Tolerances::default()).unwrap();
        let g = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.48), Complex64::new(0.64, 0.0)];
        let weights: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        let total: f64 = (0..200)
            .map(|m| g.iter().enumerate().map(|(n, c)| c * full_amplitude(m, n, 3.0, &traj).unwrap()).sum::<Complex64>().norm_sqr())
            .sum();
        assert!((total - weights).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn parity_zero_in_every_form(m in 0usize..30, n in 0usize..30, r in 0.0f64..1.5, phi in -3.0f64..3.0) {
            prop_assume!((m + n) % 2 == 1);
            let s = sq(r, phi);
            prop_assert_eq!(squeeze_element_series(m, n, &s), Complex64::new(0.0, 0.0));
            prop_assert_eq!(transition_probability(m, n, r), 0.0);
            prop_assert!(squeeze_element_legendre(m, n, &s).is_err());
        }

        #[test]
        fn probability_is_modulus_squared(m in 0usize..25, n in 0usize..25, r in 0.0f64..2.0, phi in -3.0f64..3.0) {
            let p = transition_probability(m, n, r);
            let e = squeeze_element_series(m, n, &sq(r, phi)).norm_sqr();
            prop_assert!((p - e).abs() <= 1e-10 * p + 1e-14);
        }
    }
}
