//! Neumann equilibria of `Δu + λ(u − u³) = 0` on `[0, π]²`, the parabolic
//! stand-in for the travelling-wave system. Its Hessians have the same
//! zero crossings as the wave system's for every speed `c > 0`, so relative
//! indices are computed here.
//!
//! ```text
//! F_k(a) = m_k [(λ − |k|²) a_k − λ (a³)_k],   |k|² = k₁² + k₂²,
//! ```
//!
//! `m_k` the number of sign images of `k`. At truncation `m` the flat
//! layout is the `m × m` grid in lexicographic order, index `k₁·m + k₂`.
//! Tail modes are those with `max(k₁, k₂) ≥ m`; there `A†` is diagonal with
//! entries `m_k(λ − |k|²)` and `A` has the reciprocal entries.

use nalgebra::{DMatrix, DVector};

use crate::index::{relative_index, IndexCertificate};
use crate::interval::{Interval, IntervalMatrix};
use crate::problem::{Problem, ProblemSpec};
use crate::prover::{EquilibriumCertificate, RadiiBounds};
use crate::seqspace::{
    convolve_even_2d, coupling_bound_2d, multiplicity_2d, point_mat_vec, sign_images, weighted_abs_sum,
    weighted_column_norm, weights_2d, Cos2Seq, Ring,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwParams {
    pub lambda: f64,
    /// Wave speed; only recorded, the equilibria do not depend on it.
    pub c: f64,
}

impl TwParams {
    pub fn new(lambda: f64, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Domain(format!("wave speed c = {c} must be positive")));
        }
        Ok(Self { lambda, c })
    }

    fn symbol<T: Ring>(&self, k1: usize, k2: usize) -> T {
        T::from_f64(self.lambda) - T::from_f64((k1 * k1 + k2 * k2) as f64)
    }
}

fn f_generic<T: Ring>(a: &[T], n: usize, p: &TwParams) -> (Vec<T>, usize) {
    let (b, bd) = convolve_even_2d(a, (n, n), a, (n, n));
    let (cube, (nc, _)) = convolve_even_2d(&b, bd, a, (n, n));
    let l = T::from_f64(p.lambda);
    let mut out = vec![T::zero(); nc * nc];
    for k1 in 0..nc {
        for k2 in 0..nc {
            let ak = if k1 < n && k2 < n { a[k1 * n + k2] } else { T::zero() };
            let v = p.symbol::<T>(k1, k2) * ak - l * cube[k1 * nc + k2];
            out[k1 * nc + k2] = T::from_f64(multiplicity_2d(k1, k2)) * v;
        }
    }
    (out, nc)
}

/// Full `F(a)` on the grid `[0, 3n − 2)²`.
pub fn f_eval_2d(a: &Cos2Seq, p: &TwParams) -> Result<Cos2Seq> {
    let (n1, n2) = a.dims();
    if n1 != n2 {
        return Err(Error::Domain(format!("expected a square grid, got {n1}x{n2}")));
    }
    let (f, nc) = f_generic(a.coeffs(), n1, p);
    Cos2Seq::new(f, (nc, nc), a.nu())
}

fn conv_entry<T: Ring>(b: &[T], nb: usize, k: (usize, usize), j: (usize, usize)) -> T {
    let mut s = T::zero();
    for (t1, t2) in sign_images(j.0 as isize, j.1 as isize) {
        let (i1, i2) = ((k.0 as isize - t1).unsigned_abs(), (k.1 as isize - t2).unsigned_abs());
        if i1 < nb && i2 < nb {
            s = s + b[i1 * nb + i2];
        }
    }
    s
}

fn df_generic<T: Ring>(a: &[T], m: usize, p: &TwParams) -> Vec<T> {
    let (b, (nb, _)) = convolve_even_2d(a, (m, m), a, (m, m));
    let n = m * m;
    let l3 = T::from_f64(3.0 * p.lambda);
    let mut d = vec![T::zero(); n * n];
    for i in 0..n {
        let k = (i / m, i % m);
        let mk = T::from_f64(multiplicity_2d(k.0, k.1));
        for j in 0..n {
            let jj = (j / m, j % m);
            let mut v = T::zero() - l3 * conv_entry(&b, nb, k, jj);
            if i == j {
                v = v + p.symbol::<T>(k.0, k.1);
            }
            d[i * n + j] = mk * v;
        }
    }
    d
}

/// `m² > λ` makes every tail symbol negative with `|k|² − λ ≥ m² − λ`.
fn check_tail(p: &TwParams, m: usize) -> Result<Interval> {
    let gap = Interval::point((m * m) as f64) - Interval::point(p.lambda);
    if gap.is_positive() {
        Ok(gap)
    } else {
        Err(Error::OperatorBuild(format!("tail mode resonant or unstable: m² = {} ≤ λ = {}", m * m, p.lambda)))
    }
}

/// Extra modes per axis for the finite block of `A`. `ā` is zero-padded to
/// `m + OPERATOR_PAD`, which keeps the tail coupling of `ā²` away from the
/// large entries of `A` near nearly degenerate states.
pub const OPERATOR_PAD: usize = 4;

pub fn tw_bounds(abar: &DVector<f64>, p: &TwParams, nu: f64, m: usize) -> Result<RadiiBounds> {
    if abar.len() != m * m {
        return Err(Error::Domain(format!("expected {} coefficients, got {}", m * m, abar.len())));
    }
    let mo = m + OPERATOR_PAD;
    let mut a = vec![Interval::ZERO; mo * mo];
    for (i, x) in abar.iter().enumerate() {
        a[(i / m) * mo + i % m] = Interval::point(*x);
    }
    let m = mo;
    let gap = check_tail(p, m)?;
    let n = m * m;
    let df = {
        let d = df_generic(&a, m, p);
        IntervalMatrix::from_fn(n, n, |i, j| d[i * n + j])
    };
    let am = df
        .mid()
        .try_inverse()
        .ok_or_else(|| Error::OperatorBuild("midpoint Jacobian is singular".into()))?;
    let w = weights_2d(nu, m, m);

    let (f, nc) = f_generic(&a, m, p);
    let ff: Vec<Interval> = (0..n).map(|i| f[(i / m) * nc + i % m]).collect();
    let mut y0 = weighted_abs_sum(&point_mat_vec(&am, &ff), &w);
    let wc = weights_2d(nu, nc, nc);
    for k1 in 0..nc {
        for k2 in 0..nc {
            if k1.max(k2) < m {
                continue;
            }
            let i = k1 * nc + k2;
            let den = (Interval::point((k1 * k1 + k2 * k2) as f64) - Interval::point(p.lambda))
                .scale(multiplicity_2d(k1, k2));
            y0 += (f[i].abs() * wc[i]).try_div(den).expect("tail symbol nonzero");
        }
    }

    let z0 = weighted_column_norm(&IntervalMatrix::identity(n).sub(&df.left_mul_point(&am)), &w, &w);

    let aa = Cos2Seq::new(a.clone(), (m, m), nu)?;
    let b = aa.convolve(&aa);
    let l3 = Interval::point(p.lambda.abs()).scale(3.0);
    let mult: Vec<f64> = (0..n).map(|i| multiplicity_2d(i / m, i % m)).collect();
    let inv_gap = gap.recip().expect("gap > 0");
    let z1 = l3 * coupling_bound_2d(&am, &b, m, &mult, &w, inv_gap, false);

    // D²: ‖A M ((2ā z + z²) * h)‖ ≤ (2‖A M T_ā‖ + ‖A M‖ r) r ‖h‖ for r ≤ 1.
    let amm = IntervalMatrix::from_fn(n, n, |i, j| Interval::point(am[(i, j)]).scale(multiplicity_2d(j / m, j % m)));
    let am_norm = weighted_column_norm(&amm, &w, &w).max(inv_gap);
    let am_ta = coupling_bound_2d(&am, &aa, m, &mult, &w, inv_gap, true);
    let z2 = l3 * (am_ta.scale(2.0) + am_norm);

    RadiiBounds::new(y0, z0, z1, z2)
}

/// Relative index of two certified parabolic equilibria, which equals the
/// relative index of the corresponding wave-system equilibria for any `c > 0`.
pub fn tw_relative_index(cert_a: &EquilibriumCertificate, cert_base: &EquilibriumCertificate) -> Result<IndexCertificate> {
    for c in [cert_a, cert_base] {
        if !matches!(c.spec, ProblemSpec::Tw { .. }) {
            return Err(Error::Domain("both certificates must belong to the 2D problem".into()));
        }
    }
    relative_index(cert_a, cert_base)
}

/// The 2D problem behind the [`Problem`] interface.
#[derive(Clone, Debug)]
pub struct TwProblem {
    pub params: TwParams,
}

impl TwProblem {
    pub fn new(params: TwParams) -> Self {
        Self { params }
    }
}

impl Problem for TwProblem {
    fn spec(&self) -> ProblemSpec {
        ProblemSpec::Tw { lambda: self.params.lambda, c: self.params.c }
    }

    fn dim(&self, m: usize) -> usize {
        m * m
    }

    fn residual(&self, a: &DVector<f64>, m: usize) -> DVector<f64> {
        let (f, nc) = f_generic(a.as_slice(), m, &self.params);
        DVector::from_fn(m * m, |i, _| f[(i / m) * nc + i % m])
    }

    fn jacobian(&self, a: &DVector<f64>, m: usize) -> DMatrix<f64> {
        let d = df_generic(a.as_slice(), m, &self.params);
        DMatrix::from_row_slice(m * m, m * m, &d)
    }

    fn bounds(&self, abar: &DVector<f64>, nu: f64, m: usize) -> Result<RadiiBounds> {
        tw_bounds(abar, &self.params, nu, m)
    }

    fn index_block(&self, abar: &DVector<f64>, m: usize, m_pad: usize) -> Result<IntervalMatrix> {
        if m_pad < m {
            return Err(Error::Domain(format!("padding {m_pad} below truncation {m}")));
        }
        check_tail(&self.params, m)?;
        let a: Vec<Interval> = abar.iter().copied().map(Interval::point).collect();
        let (b, (nb, _)) = convolve_even_2d(&a, (m, m), &a, (m, m));
        let p = self.params;
        let l3 = Interval::point(3.0 * p.lambda);
        let n = m_pad * m_pad;
        Ok(IntervalMatrix::from_fn(n, n, |i, j| {
            let k = (i / m_pad, i % m_pad);
            let l = (j / m_pad, j % m_pad);
            let mk = multiplicity_2d(k.0, k.1);
            let finite = |q: (usize, usize)| q.0 < m && q.1 < m;
            if finite(k) && finite(l) {
                let mut v = -(l3 * conv_entry(&b, nb, k, l));
                if i == j {
                    v += p.symbol::<Interval>(k.0, k.1);
                }
                v.scale(mk)
            } else if i == j {
                p.symbol::<Interval>(k.0, k.1).scale(mk)
            } else {
                Interval::ZERO
            }
        }))
    }

    fn norm(&self, a: &[Interval], nu: f64, m: usize) -> Interval {
        weighted_abs_sum(&a[..m * m], &weights_2d(nu, m, m))
    }

    fn resize(&self, a: &DVector<f64>, from: usize, to: usize) -> DVector<f64> {
        let mut v = DVector::zeros(to * to);
        for k1 in 0..from.min(to) {
            for k2 in 0..from.min(to) {
                v[k1 * to + k2] = a[k1 * from + k2];
            }
        }
        v
    }

    fn eval(&self, a: &DVector<f64>, m: usize, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for k1 in 0..m {
            let c1 = (k1 as f64 * x[0]).cos();
            for k2 in 0..m {
                s += multiplicity_2d(k1, k2) * a[k1 * m + k2] * c1 * (k2 as f64 * x[1]).cos();
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_states_are_zeros() {
        let pr = TwProblem::new(TwParams::new(12.0, 1.0).unwrap());
        let m = 3;
        let mut a = DVector::zeros(9);
        assert!(pr.residual(&a, m).iter().all(|x| *x == 0.0));
        a[0] = 1.0;
        assert!(pr.residual(&a, m).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn speed_must_be_positive() {
        assert!(TwParams::new(12.0, 0.0).is_err());
    }

    #[test]
    fn homogeneous_state_has_zero_residual_bound() {
        let pr = TwProblem::new(TwParams::new(12.0, 1.0).unwrap());
        let m = 10;
        let mut a = DVector::zeros(100);
        a[0] = 1.0;
        let b = pr.bounds(&a, 1.0 + 1e-8, m).unwrap();
        assert_eq!(b.Y0, Interval::ZERO);
        assert!(crate::prover::find_r0(&b).is_ok());
    }

    #[test]
    fn linear_zero_state() {
        let pr = TwProblem::new(TwParams::new(0.0, 1.0).unwrap());
        let m = 3;
        // λ = 0 makes the constant mode singular, so only Y₀ and Z₂ vanish.
        let r = pr.bounds(&DVector::zeros(9), 1.0, m);
        assert!(matches!(r, Err(Error::OperatorBuild(_))));
        let pr = TwProblem::new(TwParams::new(-1.0, 1.0).unwrap());
        let b = pr.bounds(&DVector::zeros(9), 1.0, m).unwrap();
        assert_eq!(b.Y0, Interval::ZERO);
        assert_eq!(b.Z1, Interval::ZERO);
        assert!(b.Z0.hi() < 1e-14);
    }

    #[test]
    fn resonant_tail_rejected() {
        let pr = TwProblem::new(TwParams::new(9.0, 1.0).unwrap());
        assert!(matches!(pr.bounds(&DVector::zeros(9), 1.0, 3), Err(Error::OperatorBuild(_))));
    }
}
