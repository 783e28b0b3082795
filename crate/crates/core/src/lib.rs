//! Computer-assisted existence proofs for equilibria of Fourier-discretized
//! PDEs, verified relative/Morse index counts, and the resulting forcing
//! bounds on connecting orbits.
//!
//! The crate is organized bottom-up:
//!
//! * [`interval`]: outward-rounded interval arithmetic.
//! * [`seqspace`]: weighted ℓ¹ sequence spaces, convolutions, operator norms.
//! * [`prover`]: the radii-polynomial engine and equilibrium certificates.
//! * [`problem_cr`], [`problem_tw`], [`problem_ok`]: the three model problems.
//! * [`index`]: verified eigenvalue counting and relative indices.
//! * [`forcing`]: connecting-orbit lower bounds from index multiplicities.
//! * [`pipeline`]: Newton, continuation and the end-to-end certification run.

pub mod forcing;
pub mod index;
pub mod interval;
pub mod pipeline;
pub mod problem;
pub mod problem_cr;
pub mod problem_ok;
pub mod problem_tw;
pub mod prover;
pub mod seqspace;
pub mod symmetry;

pub use interval::{Interval, IntervalMatrix, IntervalVector};
pub use problem::{Problem, ProblemSpec};
pub use prover::{EquilibriumCertificate, RadiiBounds};

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural invariant (e.g. tail dominance) does not hold.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// No radius with a negative radii polynomial was found.
    #[error("certification failed: {reason}")]
    Certification {
        reason: String,
        bounds: Option<Box<RadiiBounds>>,
    },

    /// The approximate derivative or inverse could not be built.
    #[error("operator construction failed: {0}")]
    OperatorBuild(String),

    /// An eigenvalue enclosure was inconclusive.
    #[error("index computation inconclusive: {0}")]
    Index(String),

    /// Newton's method or continuation did not converge.
    #[error("numerical solve failed: {0}")]
    Solve(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error in {origin} line {line}: {msg}")]
    Parse {
        origin: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
