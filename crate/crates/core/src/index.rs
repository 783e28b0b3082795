//! Verified counting of positive eigenvalues and relative indices.
//!
//! For a symmetric interval matrix `Q` an approximate eigenbasis `V` of its
//! midpoint is computed in floating point. With `W = Vᵀ` and
//! `R = I − WV`, `‖R‖∞ < 1` gives `V⁻¹ = W + E` with
//! `|E_ij| ≤ ‖R‖∞‖W‖∞ / (1 − ‖R‖∞)`. The Gershgorin disks of
//! `Q₀ = V⁻¹QV`, enclosed in interval arithmetic, then separate the
//! spectrum: if no disk meets the imaginary axis, the number of disks in
//! the right half-plane is the number of positive eigenvalues of every
//! symmetric matrix in `Q`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::interval::{Interval, IntervalMatrix};
use crate::prover::{EquilibriumCertificate, HomotopyMargins};
use crate::{Error, Result};

/// Gershgorin disks of the transformed matrix, as real intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenEnclosure {
    /// `(center, radius)` per disk.
    pub disks: Vec<(f64, f64)>,
    pub positive_count: usize,
    pub conclusive: bool,
}

impl EigenEnclosure {
    /// Smallest distance of a disk to zero; negative when a disk contains it.
    pub fn min_gap(&self) -> f64 {
        self.disks.iter().map(|(c, r)| c.abs() - r).fold(f64::INFINITY, f64::min)
    }
}

/// Upper bound of `‖M‖∞` (max absolute row sum).
fn inf_norm(m: &IntervalMatrix) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| Interval::point(x.mag())).sum::<Interval>().hi())
        .fold(0.0, f64::max)
}

fn point_inf_norm(m: &DMatrix<f64>) -> f64 {
    inf_norm(&IntervalMatrix::from_points(m))
}

/// Counts positive eigenvalues of the symmetric matrices in `q` using the
/// basis `v` (columns). Inconclusive results are flagged, not errors.
pub fn count_positive_with_basis(q: &IntervalMatrix, v: &DMatrix<f64>) -> Result<EigenEnclosure> {
    let n = q.nrows();
    if q.ncols() != n || v.nrows() != n || v.ncols() != n {
        return Err(Error::Domain("count_positive needs square matrices of equal size".into()));
    }
    let inconclusive = || EigenEnclosure { disks: Vec::new(), positive_count: 0, conclusive: false };
    if n == 0 {
        return Ok(EigenEnclosure { disks: Vec::new(), positive_count: 0, conclusive: true });
    }
    let w = v.transpose();
    let r = IntervalMatrix::identity(n).sub(&IntervalMatrix::from_points(v).left_mul_point(&w));
    let rn = inf_norm(&r);
    if !(rn < 1.0) {
        return Ok(inconclusive());
    }
    let den = Interval::ONE - Interval::point(rn);
    let e = (Interval::point(rn) * Interval::point(point_inf_norm(&w))).try_div(den)?.hi();

    let qv = q.right_mul_point(v);
    let mut q0 = qv.left_mul_point(&w);
    // Add E·(QV), bounded entrywise by e times the column sums of |QV|.
    for j in 0..n {
        let col: Interval = (0..n).map(|k| Interval::point(qv[(k, j)].mag())).sum();
        let pad = Interval::symmetric((Interval::point(e) * col).hi());
        for i in 0..n {
            q0[(i, j)] += pad;
        }
    }

    let mut disks = Vec::with_capacity(n);
    let mut positive = 0;
    let mut conclusive = true;
    for i in 0..n {
        let rad: Interval = q0.row(i).iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| Interval::point(x.mag())).sum();
        let c = q0[(i, i)];
        let lo = (Interval::point(c.lo()) - rad).lo();
        let hi = (Interval::point(c.hi()) + rad).hi();
        let disk = Interval::new(lo, hi)?;
        if disk.is_positive() {
            positive += 1;
        } else if !disk.is_negative() {
            conclusive = false;
        }
        disks.push((disk.mid(), disk.rad()));
    }
    Ok(EigenEnclosure { disks, positive_count: positive, conclusive })
}

/// Approximate eigenvectors of the symmetrized midpoint.
fn eigenbasis(q: &IntervalMatrix) -> DMatrix<f64> {
    let m = q.mid();
    let sym = (&m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvectors
}

/// Gram-Schmidt (via QR) applied to the columns of `v`.
fn reorthogonalize(v: &DMatrix<f64>) -> DMatrix<f64> {
    v.clone().qr().q()
}

/// Counts positive eigenvalues of the symmetric members of `q`; retries once
/// with a re-orthogonalized basis before reporting an inconclusive result.
pub fn count_positive(q: &IntervalMatrix) -> Result<EigenEnclosure> {
    if q.nrows() != q.ncols() {
        return Err(Error::Domain("count_positive needs a square matrix".into()));
    }
    let v = eigenbasis(q);
    let first = count_positive_with_basis(q, &v)?;
    if first.conclusive {
        return Ok(first);
    }
    count_positive_with_basis(q, &reorthogonalize(&v))
}

/// Reference to a certificate inside an index record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertRef {
    pub problem: String,
    pub params: Vec<f64>,
    pub m: usize,
    pub r0: Option<f64>,
}

impl CertRef {
    fn of(c: &EquilibriumCertificate) -> Self {
        let params = match c.spec {
            crate::ProblemSpec::Cr { lambda1, lambda2 } => vec![lambda1, lambda2],
            crate::ProblemSpec::Tw { lambda, c } => vec![lambda, c],
            crate::ProblemSpec::Ok { lambda1, lambda2, lambda3 } => vec![lambda1, lambda2, lambda3],
        };
        Self { problem: c.spec.id().to_string(), params, m: c.m, r0: c.r0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexCertificate {
    pub cert_a: CertRef,
    pub cert_b: CertRef,
    /// Common padded truncation.
    pub m: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub relative_index: i64,
    pub enclosure_a: EigenEnclosure,
    pub enclosure_b: EigenEnclosure,
}

/// Index information attached to an equilibrium certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexRecord {
    pub positive_count: usize,
    pub m_pad: usize,
    pub relative_index: i64,
    pub base: String,
    pub base_count: usize,
    pub min_gap: f64,
    pub conclusive: bool,
}

/// Positive-eigenvalue count of `A†` at a certificate, padded to `m_pad`.
pub fn count_for(cert: &EquilibriumCertificate, m_pad: usize) -> Result<EigenEnclosure> {
    if !cert.is_certified() {
        return Err(Error::Domain("index requested for an uncertified equilibrium".into()));
    }
    let problem = cert.spec.build()?;
    let q = problem.index_block(&cert.abar(), cert.m, m_pad)?;
    count_positive(&q)
}

/// Relative index with both blocks padded to `m_pad`.
pub fn relative_index_padded(
    cert_a: &EquilibriumCertificate,
    cert_b: &EquilibriumCertificate,
    m_pad: usize,
) -> Result<IndexCertificate> {
    if cert_a.spec.id() != cert_b.spec.id() {
        return Err(Error::Domain("relative index needs two certificates of one problem family".into()));
    }
    if cert_a.nu != cert_b.nu {
        return Err(Error::Domain("relative index needs a common weight ν".into()));
    }
    if m_pad < cert_a.m.max(cert_b.m) {
        return Err(Error::Domain(format!("padding {m_pad} below the truncations")));
    }
    let (ea, eb) = rayon::join(|| count_for(cert_a, m_pad), || count_for(cert_b, m_pad));
    let (ea, eb) = (ea?, eb?);
    for (e, which) in [(&ea, "first"), (&eb, "second")] {
        if !e.conclusive {
            return Err(Error::Index(format!("{which} eigenvalue enclosure straddles zero")));
        }
    }
    Ok(IndexCertificate {
        cert_a: CertRef::of(cert_a),
        cert_b: CertRef::of(cert_b),
        m: m_pad,
        n_a: ea.positive_count,
        n_b: eb.positive_count,
        relative_index: ea.positive_count as i64 - eb.positive_count as i64,
        enclosure_a: ea,
        enclosure_b: eb,
    })
}

/// Relative index `n(A†_ā) − n(A†_b̄)` at the common truncation
/// `max(m_ā, m_b̄)`.
pub fn relative_index(cert_a: &EquilibriumCertificate, cert_b: &EquilibriumCertificate) -> Result<IndexCertificate> {
    relative_index_padded(cert_a, cert_b, cert_a.m.max(cert_b.m))
}

/// Margins of `Z₀ < 1` and `Z₀ + Z₁ + Z₂r₀ < 1`, rounded downward.
pub fn homotopy_margins(cert: &EquilibriumCertificate) -> HomotopyMargins {
    let b = &cert.bounds;
    let up = |x: Interval| Interval::point(x.mag());
    let z0_margin = (Interval::ONE - up(b.Z0)).lo();
    let contraction_margin = match cert.r0 {
        Some(r) => (Interval::ONE - up(b.Z0) - up(b.Z1) - up(b.Z2) * Interval::point(r)).lo(),
        None => f64::NEG_INFINITY,
    };
    let passed = cert.is_certified() && z0_margin > 0.0 && contraction_margin > 0.0;
    HomotopyMargins { z0_margin, contraction_margin, passed }
}

/// Records the homotopy margins in the certificate. When they fail the
/// index is undefined and any stored index record is dropped.
pub fn homotopy_check(cert: &mut EquilibriumCertificate) -> bool {
    let h = homotopy_margins(cert);
    cert.homotopy = Some(h);
    if !h.passed {
        cert.index = None;
    }
    h.passed
}

/// Attaches the relative index with respect to `base` to `cert`.
pub fn attach_index(cert: &mut EquilibriumCertificate, base: &EquilibriumCertificate, base_name: &str) -> Result<IndexCertificate> {
    if !homotopy_check(cert) {
        return Err(Error::Index("homotopy inequalities fail; index undefined".into()));
    }
    let ic = relative_index(cert, base)?;
    cert.index = Some(IndexRecord {
        positive_count: ic.n_a,
        m_pad: ic.m,
        relative_index: ic.relative_index,
        base: base_name.to_string(),
        base_count: ic.n_b,
        min_gap: ic.enclosure_a.min_gap(),
        conclusive: true,
    });
    Ok(ic)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_count() {
        let q = IntervalMatrix::from_points(&DMatrix::from_diagonal(&nalgebra::dvector![3.0, -1.0, -2.0]));
        let e = count_positive(&q).unwrap();
        assert!(e.conclusive);
        assert_eq!(e.positive_count, 1);
    }

    #[test]
    fn straddling_disk_is_inconclusive() {
        let mut q = IntervalMatrix::from_points(&DMatrix::from_diagonal(&nalgebra::dvector![1.0, -1.0]));
        q[(0, 0)] = Interval::new(-0.5, 0.5).unwrap();
        let e = count_positive(&q).unwrap();
        assert!(!e.conclusive);
        assert!(e.min_gap() <= 0.0);
    }

    #[test]
    fn two_by_two_blocks() {
        // [[12, −2k], [−2k, 2]]: two positives for k = 1, one for k = 3.
        for (k, want) in [(1.0, 2), (3.0, 1)] {
            let q = IntervalMatrix::from_points(&DMatrix::from_row_slice(2, 2, &[12.0, -2.0 * k, -2.0 * k, 2.0]));
            assert_eq!(count_positive(&q).unwrap().positive_count, want);
        }
    }

    #[test]
    fn basis_ordering_does_not_matter() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, -1.0, 0.2, 0.0, 0.2, 0.7]);
        let q = IntervalMatrix::from_points(&m);
        let v = SymmetricEigen::new(m).eigenvectors;
        let mut w = v.clone();
        w.swap_columns(0, 2);
        let a = count_positive_with_basis(&q, &v).unwrap();
        let b = count_positive_with_basis(&q, &w).unwrap();
        assert!(a.conclusive && b.conclusive);
        assert_eq!(a.positive_count, b.positive_count);
    }
}
