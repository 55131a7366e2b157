//! Subcommand implementations.
//!
//! Substream layout (master seed fixed by the config): every command
//! addresses disjoint substream ranges per grid row so that rows, angle
//! pairs and chunks are all independent and reproducible at any worker
//! count:
//!
//! * `bell`: row r spans `[r·4·chunks, (r+1)·4·chunks)`;
//! * `positivity`: row r spans `[r·chunks, (r+1)·chunks)`;
//! * `sweep`: row r spans `[r·5·chunks, (r+1)·5·chunks)`;
//! * `validate`: row r spans `[r·5·chunks, (r+1)·5·chunks)`: one moments
//!   pass plus the four CHSH pair passes;
//! * `sample-dump`: the single substream 0.

pub mod bell;
pub mod positivity;
pub mod sample_dump;
pub mod sweep;
pub mod validate;

/// Command failure with its exit-code class: usage/config problems exit
/// with 2, runtime/analysis problems with 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Run(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(msg) | Failure::Run(msg) => msg,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Run(format!("i/o error: {err}"))
    }
}

pub(crate) fn run_err(err: quadbell_core::Error) -> Failure {
    Failure::Run(err.to_string())
}
