//! Batch runner for time-dependent oscillator experiments: single runs,
//! parameter sweeps, figure datasets and the validation suite.

pub mod config;
pub mod figures;
pub mod output;
pub mod run;
pub mod sweep;
pub mod validate;

use std::path::PathBuf;

pub use config::ExperimentConfig;
pub use run::{run, simulate, RunReport, Simulation};
pub use sweep::{sweep, SweepReport};

/// Problems with the experiment description itself.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("unknown or non-numeric parameter `{0}`")]
    UnknownParameter(String),
}

/// Raised when one or more validation criteria fail.
#[derive(Debug, thiserror::Error, Clone, PartialEq)]
#[error("validation failed: criteria {failed:?}")]
pub struct ValidationFailed {
    pub failed: Vec<u32>,
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const VALIDATION: i32 = 4;
}

/// Map an error chain to the documented exit code.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.downcast_ref::<ConfigError>().is_some()) {
        exit::CONFIG
    } else if err.chain().any(|e| e.downcast_ref::<ValidationFailed>().is_some()) {
        exit::VALIDATION
    } else {
        exit::NUMERICAL
    }
}

/// Run `f` on a pool of `jobs` threads, or rayon's default pool when absent.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}
