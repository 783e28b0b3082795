//! Symmetries mapping equilibria to equilibria, and orbit bookkeeping.
//!
//! Every operation is a signed permutation of coefficients that is an
//! isometry of `X` and commutes with `F`, so it carries a certified zero
//! `ã ∈ B_{r₀}(ā)` to a zero `gã ∈ B_{r₀}(gā)` and conjugates the
//! Hessians (equal indices). Orbits are therefore transferred from one
//! certificate instead of being re-proved.

use nalgebra::DVector;

use crate::interval::Interval;
use crate::problem::ProblemSpec;
use crate::prover::{p_upper, EquilibriumCertificate};
use crate::{Error, Result};

/// `a ↦ −a`, `x_i ↦ π − x_i` (coefficient signs `(−1)^{k_i}`) and, in 2D,
/// the swap `(k₁, k₂) ↦ (k₂, k₁)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SymOp {
    pub negate: bool,
    pub flip1: bool,
    pub flip2: bool,
    pub transpose: bool,
}

/// The symmetry group of a problem family.
pub fn group(spec: &ProblemSpec) -> Vec<SymOp> {
    let b = [false, true];
    let mut out = Vec::new();
    match spec {
        ProblemSpec::Cr { .. } => {
            for negate in b {
                out.push(SymOp { negate, ..Default::default() });
            }
        }
        ProblemSpec::Ok { .. } => {
            for negate in b {
                for flip1 in b {
                    out.push(SymOp { negate, flip1, ..Default::default() });
                }
            }
        }
        ProblemSpec::Tw { .. } => {
            for negate in b {
                for flip1 in b {
                    for flip2 in b {
                        for transpose in b {
                            out.push(SymOp { negate, flip1, flip2, transpose });
                        }
                    }
                }
            }
        }
    }
    out
}

fn sign(flip: bool, k: usize) -> f64 {
    if flip && k % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Image of a flat coefficient vector at truncation `m`.
pub fn apply(spec: &ProblemSpec, op: SymOp, a: &DVector<f64>, m: usize) -> DVector<f64> {
    let neg = if op.negate { -1.0 } else { 1.0 };
    match spec {
        ProblemSpec::Cr { .. } => a * neg,
        ProblemSpec::Ok { .. } => DVector::from_fn(a.len(), |i, _| neg * sign(op.flip1, i + 1) * a[i]),
        ProblemSpec::Tw { .. } => DVector::from_fn(a.len(), |i, _| {
            let (k1, k2) = (i / m, i % m);
            // The image at (k1, k2) is taken from the source at the swapped mode.
            let src = if op.transpose { k2 * m + k1 } else { i };
            neg * sign(op.flip1, k1) * sign(op.flip2, k2) * a[src]
        }),
    }
}

/// How two images `gā`, `hā` of a certified approximation relate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    /// `‖gā − hā‖ > 2r₀`: the zeros differ.
    Distinct,
    /// `p(r₀ + ‖gā − hā‖) < 0`: both zeros lie in one uniqueness ball.
    Same,
}

pub fn relate(cert: &EquilibriumCertificate, ga: &DVector<f64>, ha: &DVector<f64>) -> Result<Relation> {
    let r0 = crate::prover::c0_error(cert)?;
    let problem = cert.spec.build()?;
    let d: Vec<Interval> = ga.iter().zip(ha.iter()).map(|(x, y)| Interval::point(*x) - Interval::point(*y)).collect();
    let delta = problem.norm(&d, cert.nu, cert.m);
    if delta.lo() > (Interval::point(r0).scale(2.0)).hi() {
        return Ok(Relation::Distinct);
    }
    let r = (Interval::point(r0) + Interval::point(delta.hi())).hi();
    if r <= 1.0 && p_upper(&cert.bounds, r) < 0.0 {
        return Ok(Relation::Same);
    }
    Err(Error::Invariant(format!(
        "images at distance {:e} neither separated nor inside one uniqueness ball (r₀ = {r0:e})",
        delta.hi()
    )))
}

/// Distinct images of a certified equilibrium under its symmetry group.
pub fn orbit(cert: &EquilibriumCertificate) -> Result<Vec<DVector<f64>>> {
    let a = cert.abar();
    let mut reps: Vec<DVector<f64>> = Vec::new();
    for op in group(&cert.spec) {
        let g = apply(&cert.spec, op, &a, cert.m);
        let mut new = true;
        for h in &reps {
            if relate(cert, &g, h)? == Relation::Same {
                new = false;
                break;
            }
        }
        if new {
            reps.push(g);
        }
    }
    Ok(reps)
}

/// Whether two certificates of the same problem describe the same zero.
pub fn same_zero(a: &EquilibriumCertificate, b: &EquilibriumCertificate) -> Result<bool> {
    if a.spec != b.spec || a.m != b.m || a.nu != b.nu {
        return Err(Error::Domain("certificates are not comparable".into()));
    }
    Ok(relate(a, &a.abar(), &b.abar())? == Relation::Same)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        assert_eq!(group(&ProblemSpec::Cr { lambda1: 1.0, lambda2: 1.0 }).len(), 2);
        assert_eq!(group(&ProblemSpec::Ok { lambda1: 1.0, lambda2: 1.0, lambda3: 0.0 }).len(), 4);
        assert_eq!(group(&ProblemSpec::Tw { lambda: 1.0, c: 1.0 }).len(), 16);
    }

    #[test]
    fn two_d_operations() {
        let spec = ProblemSpec::Tw { lambda: 12.0, c: 1.0 };
        // (k1, k2) = (1, 0) on a 2x2 grid.
        let a = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        let t = apply(&spec, SymOp { transpose: true, ..Default::default() }, &a, 2);
        assert_eq!(t.as_slice(), &[0.0, 1.0, 0.0, 0.0]);
        let f = apply(&spec, SymOp { flip1: true, ..Default::default() }, &a, 2);
        assert_eq!(f.as_slice(), &[0.0, 0.0, -1.0, 0.0]);
        let f2 = apply(&spec, SymOp { flip2: true, ..Default::default() }, &a, 2);
        assert_eq!(f2, a);
    }
}
