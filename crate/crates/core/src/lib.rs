//! Quantum harmonic oscillator with a time-dependent frequency, solved through
//! the Ermakov-Pinney equation.
//!
//! The width σ(t) of the dynamical ground state determines every observable:
//! squeezing parameters, excitation statistics, variances and transition
//! amplitudes between instantaneous eigenstates.
//!
//! ```
//! use ermakov::{integrate, equilibrium_ics, diagnose, FrequencyProtocol, OscillatorParams, Tolerances};
//!
//! let params = OscillatorParams::default();
//! let p = FrequencyProtocol::tanh(1.0, 2.0, 0.0, 0.5).unwrap();
//! let t0 = p.default_start().unwrap();
//! let ics = equilibrium_ics(&p, t0, &params).unwrap();
//! let traj = integrate(&p, &params, ics, (t0, 5.0), Tolerances::default()).unwrap();
//! let end = traj.final_state();
//! let sample = diagnose(&end, p.omega(end.t).unwrap(), &params).unwrap();
//! assert!(sample.q >= 1.0);
//! ```

pub mod closed_forms;
pub mod diagnostics;
pub mod ermakov;
pub mod fock;
pub mod ode;
pub mod protocols;
pub mod specfun;

use thiserror::Error;

pub use closed_forms::{ClosedFormError, QuenchReference, RampScaling};
pub use diagnostics::{diagnose, BogoliubovPair, DiagnosticsError, DiagnosticsSample, SqueezeParams};
pub use ermakov::{adiabatic_ics, equilibrium_ics, integrate, AiryBranch, ErmakovError, ErmakovState, ErmakovTrajectory, HomogeneousPair};
pub use fock::{ExcitationPMF, FockError, TransitionTable};
pub use ode::{StepStats, Tolerances};
pub use protocols::{FrequencyProtocol, OscillatorParams, ProtocolError, SampledOmega};
pub use specfun::{QuadratureRule, SpecFunError};

/// Any error raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Ermakov(#[from] ErmakovError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
