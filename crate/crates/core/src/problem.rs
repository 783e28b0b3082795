//! The interface every model problem implements for the prover, the index
//! counter and the pipeline.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalMatrix};
use crate::prover::RadiiBounds;
use crate::Result;

/// Problem family and parameters, as recorded in certificates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum ProblemSpec {
    Cr { lambda1: f64, lambda2: f64 },
    Tw { lambda: f64, c: f64 },
    Ok { lambda1: f64, lambda2: f64, lambda3: f64 },
}

impl ProblemSpec {
    pub fn id(&self) -> &'static str {
        match self {
            ProblemSpec::Cr { .. } => "cr",
            ProblemSpec::Tw { .. } => "tw",
            ProblemSpec::Ok { .. } => "ok",
        }
    }

    /// Instantiates the problem.
    pub fn build(&self) -> Result<Box<dyn Problem>> {
        Ok(match *self {
            ProblemSpec::Cr { lambda1, lambda2 } => {
                Box::new(crate::problem_cr::CrProblem::new(crate::problem_cr::CrParams { lambda1, lambda2 }))
            }
            ProblemSpec::Tw { lambda, c } => {
                Box::new(crate::problem_tw::TwProblem::new(crate::problem_tw::TwParams::new(lambda, c)?))
            }
            ProblemSpec::Ok { lambda1, lambda2, lambda3 } => Box::new(crate::problem_ok::OkProblem::new(
                crate::problem_ok::OkParams::new(lambda1, lambda2, lambda3)?,
            )),
        })
    }
}

/// A zero-finding problem `F(a) = 0` on a Fourier sequence space.
///
/// Coefficients of a truncation of size `m` are passed as a flat vector whose
/// layout is fixed by each problem (see [`Problem::dim`]).
pub trait Problem: Send + Sync {
    fn spec(&self) -> ProblemSpec;

    /// Length of the flat coefficient vector at truncation `m`.
    fn dim(&self, m: usize) -> usize;

    /// Galerkin residual `F^(m)(a)` in floating point.
    fn residual(&self, a: &DVector<f64>, m: usize) -> DVector<f64>;

    /// Jacobian `DF^(m)(a)` in floating point.
    fn jacobian(&self, a: &DVector<f64>, m: usize) -> DMatrix<f64>;

    /// Rigorous `Y₀, Z₀, Z₁, Z₂` at `abar` (valid for `r ≤ 1`).
    fn bounds(&self, abar: &DVector<f64>, nu: f64, m: usize) -> Result<RadiiBounds>;

    /// Symmetric interval matrix with the same inertia as `A†` at `abar`,
    /// padded with the analytic tail up to truncation `m_pad ≥ m`.
    fn index_block(&self, abar: &DVector<f64>, m: usize, m_pad: usize) -> Result<IntervalMatrix>;

    /// Norm of the space `X` of a flat interval vector at truncation `m`.
    fn norm(&self, a: &[Interval], nu: f64, m: usize) -> Interval;

    /// Re-embeds a coefficient vector at a different truncation (zero
    /// padding or cutting off).
    fn resize(&self, a: &DVector<f64>, from: usize, to: usize) -> DVector<f64>;

    /// Value of the (first) profile represented by `a` at the point `x`
    /// (one coordinate in 1D, two in 2D).
    fn eval(&self, a: &DVector<f64>, m: usize, x: &[f64]) -> f64;
}
