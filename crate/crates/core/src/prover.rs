//! The radii-polynomial engine.
//!
//! Given bounds
//!
//! ```text
//! ‖A F(ā)‖ ≤ Y₀,  ‖I − A A†‖ ≤ Z₀,  ‖A (DF(ā) − A†)‖ ≤ Z₁,
//! ‖A (DF(c) − DF(ā))‖ ≤ Z₂ r   for ‖c − ā‖ ≤ r ≤ 1,
//! ```
//!
//! negativity of `p(r) = Z₂r² − (1 − Z₁ − Z₀)r + Y₀` at some `r₀ ∈ (0, 1]`
//! proves a unique zero of `F` in the closed ball of radius `r₀` around `ā`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::index::IndexRecord;
use crate::interval::Interval;
use crate::problem::{Problem, ProblemSpec};
use crate::{Error, Result};

/// Version tag written into every certificate.
pub const CERTIFICATE_VERSION: u32 = 1;

/// Number of points of the geometric `r₀` grid.
const GRID_POINTS: usize = 60;

/// Bisection steps used to tighten `r₀` below the first grid success.
const REFINE_STEPS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct RadiiBounds {
    pub Y0: Interval,
    pub Z0: Interval,
    pub Z1: Interval,
    pub Z2: Interval,
}

impl RadiiBounds {
    pub fn new(y0: Interval, z0: Interval, z1: Interval, z2: Interval) -> Result<Self> {
        for (name, v) in [("Y0", y0), ("Z0", z0), ("Z1", z1), ("Z2", z2)] {
            if v.lo() < 0.0 {
                return Err(Error::Invariant(format!("{name} = {v} is not nonnegative")));
            }
        }
        Ok(Self { Y0: y0, Z0: z0, Z1: z1, Z2: z2 })
    }

    /// Bounds from upper values alone.
    pub fn from_upper(y0: f64, z0: f64, z1: f64, z2: f64) -> Result<Self> {
        let iv = |x: f64| Interval::new(0.0, x).map_err(|_| Error::Invariant(format!("bad bound {x}")));
        Self::new(iv(y0)?, iv(z0)?, iv(z1)?, iv(z2)?)
    }
}

/// Enclosure of `p(r) = Z₂r² − (1 − Z₁ − Z₀)r + Y₀`.
pub fn radii_poly(b: &RadiiBounds, r: Interval) -> Interval {
    b.Z2 * r.sqr() - (Interval::ONE - b.Z1 - b.Z0) * r + b.Y0
}

/// Upper bound of `p(r)` computed from the upper ends of every bound; this
/// is the quantity whose negativity certifies `r`.
pub fn p_upper(b: &RadiiBounds, r: f64) -> f64 {
    let r = Interval::point(r);
    let hi = |x: Interval| Interval::point(x.mag());
    let p = hi(b.Z2) * r.sqr() + (hi(b.Z0) + hi(b.Z1) - Interval::ONE) * r + hi(b.Y0);
    p.hi()
}

/// Smallest verified radius with `p(r₀) < 0` and `r₀ ≤ 1`.
///
/// Sweeps a 60-point geometric grid from just above `Y₀` to 1; the first
/// grid success is then tightened by bisection against the preceding grid
/// point. Every returned value has been verified.
pub fn find_r0(b: &RadiiBounds) -> Result<f64> {
    let fail = |reason: String| Error::Certification {
        reason: format!(
            "{reason} (Y0 = {:e}, Z0 = {:e}, Z1 = {:e}, Z2 = {:e})",
            b.Y0.mag(),
            b.Z0.mag(),
            b.Z1.mag(),
            b.Z2.mag()
        ),
        bounds: Some(Box::new(*b)),
    };
    let z = b.Z0.hi() + b.Z1.hi();
    if z >= 1.0 {
        return Err(fail(format!("Z0 + Z1 = {z:e} ≥ 1, no contraction")));
    }
    let start = b.Y0.mag().max(1e-300) * (1.0 + f64::EPSILON * 4096.0);
    if start >= 1.0 {
        return Err(fail(format!("Y0 = {:e} exceeds the a priori radius 1", b.Y0.mag())));
    }
    let ratio = (1.0 / start).ln() / (GRID_POINTS - 1) as f64;
    let mut prev: Option<f64> = None;
    for j in 0..GRID_POINTS {
        let r = if j == GRID_POINTS - 1 { 1.0 } else { (start.ln() + ratio * j as f64).exp().min(1.0) };
        if p_upper(b, r) < 0.0 {
            let mut good = r;
            if let Some(mut bad) = prev {
                for _ in 0..REFINE_STEPS {
                    let mid = (0.5 * (bad.ln() + good.ln())).exp();
                    if !(mid > bad && mid < good) {
                        break;
                    }
                    if p_upper(b, mid) < 0.0 {
                        good = mid;
                    } else {
                        bad = mid;
                    }
                }
            }
            return Ok(good);
        }
        prev = Some(r);
    }
    Err(fail("radii polynomial is nonnegative on the whole grid".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Certified,
    Failed,
}

/// Margins of the two inequalities `Z₀ < 1` and `Z₀ + Z₁ + Z₂r₀ < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyMargins {
    pub z0_margin: f64,
    pub contraction_margin: f64,
    pub passed: bool,
}

/// Outcome of a proof attempt, with everything needed to re-verify it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCertificate {
    pub version: u32,
    #[serde(flatten)]
    pub spec: ProblemSpec,
    pub nu: f64,
    pub m: usize,
    /// Flat coefficient vector in the problem's layout.
    pub abar: Vec<f64>,
    pub bounds: RadiiBounds,
    pub r0: Option<f64>,
    pub status: Status,
    /// `Z₀ < 1`, which makes `A` injective and `DF^(m)(ā)` invertible.
    pub z0_below_one: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homotopy: Option<HomotopyMargins>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexRecord>,
}

impl EquilibriumCertificate {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    pub fn abar(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.abar)
    }

    /// Re-checks `p(r₀) < 0` from the stored bounds.
    pub fn recheck(&self) -> bool {
        match self.r0 {
            Some(r) if self.is_certified() => r <= 1.0 && p_upper(&self.bounds, r) < 0.0,
            _ => false,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s)?;
        if c.version != CERTIFICATE_VERSION {
            return Err(Error::Config(format!("unsupported certificate version {}", c.version)));
        }
        Ok(c)
    }
}

/// Attempts a proof at `abar`. Fails with [`Error::Certification`] (carrying
/// the bounds) when no admissible `r₀` exists.
pub fn certify(problem: &dyn Problem, abar: &DVector<f64>, nu: f64, m: usize) -> Result<EquilibriumCertificate> {
    let bounds = problem.bounds(abar, nu, m)?;
    let r0 = find_r0(&bounds)?;
    Ok(EquilibriumCertificate {
        version: CERTIFICATE_VERSION,
        spec: problem.spec(),
        nu,
        m,
        abar: abar.iter().copied().collect(),
        bounds,
        r0: Some(r0),
        status: Status::Certified,
        z0_below_one: bounds.Z0.hi() < 1.0,
        homotopy: None,
        index: None,
    })
}

/// Like [`certify`], but records a failed attempt instead of returning an
/// error when only the radius search fails.
pub fn try_certify(problem: &dyn Problem, abar: &DVector<f64>, nu: f64, m: usize) -> Result<EquilibriumCertificate> {
    match certify(problem, abar, nu, m) {
        Err(Error::Certification { bounds: Some(b), .. }) => Ok(EquilibriumCertificate {
            version: CERTIFICATE_VERSION,
            spec: problem.spec(),
            nu,
            m,
            abar: abar.iter().copied().collect(),
            bounds: *b,
            r0: None,
            status: Status::Failed,
            z0_below_one: b.Z0.hi() < 1.0,
            homotopy: None,
            index: None,
        }),
        other => other,
    }
}

/// `C⁰` distance between the numerical and the true profile. Since `ν ≥ 1`
/// the weighted ℓ¹ norm dominates the sup norm, so this is `r₀`.
pub fn c0_error(cert: &EquilibriumCertificate) -> Result<f64> {
    match (cert.status, cert.r0) {
        (Status::Certified, Some(r)) => Ok(r),
        _ => Err(Error::Certification { reason: "certificate is not certified".into(), bounds: None }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(y0: f64, z0: f64, z1: f64, z2: f64) -> RadiiBounds {
        RadiiBounds::from_upper(y0, z0, z1, z2).unwrap()
    }

    #[test]
    fn poly_direct_substitution() {
        let p = radii_poly(&b(0.0, 0.0, 0.0, 1.0), Interval::point(0.5));
        // The bounds are [0, x] intervals, so the enclosure is wide; its
        // value at the upper ends is the certified one.
        assert!(p.contains(-0.25));
        assert_eq!(p_upper(&b(0.0, 0.0, 0.0, 1.0), 0.5), -0.25);
    }

    #[test]
    fn no_contraction_fails() {
        let e = find_r0(&b(1e-10, 0.75, 0.75, 1.0)).unwrap_err();
        match e {
            Error::Certification { bounds: Some(bb), .. } => assert_eq!(bb.Z0.hi(), 0.75),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn zero_residual_takes_first_grid_point() {
        let r = find_r0(&b(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(r > 1e-300 && r < 1.01e-300);
    }

    #[test]
    fn z0_at_least_one_is_refused() {
        assert!(find_r0(&b(0.0, 1.1, 0.0, 0.0)).is_err());
        assert!(find_r0(&b(1e-12, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn c0_error_requires_certification() {
        let mut c = EquilibriumCertificate {
            version: CERTIFICATE_VERSION,
            spec: ProblemSpec::Cr { lambda1: 6.0, lambda2: 6.0 },
            nu: 1.01,
            m: 2,
            abar: vec![1.0, 0.0, 0.0],
            bounds: b(0.0, 0.0, 0.0, 0.0),
            r0: Some(0.0),
            status: Status::Certified,
            z0_below_one: true,
            homotopy: None,
            index: None,
        };
        assert_eq!(c0_error(&c).unwrap(), 0.0);
        c.r0 = Some(4.7e-11);
        assert_eq!(c0_error(&c).unwrap(), 4.7e-11);
        c.status = Status::Failed;
        assert!(c0_error(&c).is_err());
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = EquilibriumCertificate {
            version: CERTIFICATE_VERSION,
            spec: ProblemSpec::Ok { lambda1: 9.0, lambda2: 9.0, lambda3: 4.5 },
            nu: 1.01,
            m: 3,
            abar: vec![0.1, -0.2],
            bounds: b(1e-15, 1e-12, 0.1, 3.0),
            r0: Some(2e-15),
            status: Status::Certified,
            z0_below_one: true,
            homotopy: None,
            index: None,
        };
        let s = c.to_json().unwrap();
        assert!(s.contains("\"problem\": \"ok\""));
        assert_eq!(EquilibriumCertificate::from_json(&s).unwrap(), c);
    }
}
