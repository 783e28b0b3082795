//! Ohta-Kawasaki equilibria with zero mass on `[0, π]`:
//!
//! ```text
//! F_k(a) = μ_k a_k − λ₂ k² (a³)_k,   μ_k = −k⁴ + λ₁k² − λ₃,   k ≥ 1,
//! ```
//!
//! `a` a cosine sequence with `a₀ = 0`. Flat layout at truncation `m`:
//! `[a₁, …, a_{m−1}]`, length `m − 1`.
//!
//! `DF = K²·S` with `K = diag(k)` and `S = diag(μ_k/k²) − 3λ₂ C(ā*ā)`
//! symmetric, so the Morse index is read off `S`.

use nalgebra::{DMatrix, DVector};

use crate::interval::{Interval, IntervalMatrix};
use crate::problem::{Problem, ProblemSpec};
use crate::prover::RadiiBounds;
use crate::seqspace::{
    convolve_even, point_mat_vec, q_hat_bound, weighted_abs_mat_vec, weighted_abs_sum, weighted_column_norm,
    weights_1d, CosSeq, Ring,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OkParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl OkParams {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self> {
        if !(lambda3 >= 0.0) {
            return Err(Error::Domain(format!("λ₃ = {lambda3} must be nonnegative")));
        }
        Ok(Self { lambda1, lambda2, lambda3 })
    }

    /// Linear symbol `μ_k = −k⁴ + λ₁k² − λ₃`.
    pub fn mu<T: Ring>(&self, k: usize) -> T {
        let k2 = T::from_f64((k * k) as f64);
        T::from_f64(self.lambda1) * k2 - k2 * k2 - T::from_f64(self.lambda3)
    }
}

fn f_generic<T: Ring>(a: &[T], p: &OkParams) -> Vec<T> {
    let cube = convolve_even(&convolve_even(a, a), a);
    let l2 = T::from_f64(p.lambda2);
    (0..cube.len())
        .map(|k| {
            if k == 0 {
                return T::zero();
            }
            let ak = if k < a.len() { a[k] } else { T::zero() };
            p.mu::<T>(k) * ak - l2 * T::from_f64((k * k) as f64) * cube[k]
        })
        .collect()
}

/// Full `F(a)` (support `3·support(a) − 2`, zeroth entry 0).
pub fn f_eval_ok(a: &CosSeq, p: &OkParams) -> Result<CosSeq> {
    if a.get(0) != Interval::ZERO {
        return Err(Error::Domain("the zeroth coefficient must vanish (zero mass)".into()));
    }
    CosSeq::new(f_generic(a.coeffs(), p), a.nu())
}

/// `(a₁³)_k` derivative factor as in the 1D cubic: `b_{|k−j|} + b_{k+j}`.
fn conv<T: Ring>(b: &[T], k: usize, j: usize) -> T {
    let get = |i: usize| if i < b.len() { b[i] } else { T::zero() };
    get(k.abs_diff(j)) + get(k + j)
}

/// `DF^(m)` on modes `1..m`, as rows of `T`.
fn df_generic<T: Ring>(a: &[T], p: &OkParams, m: usize) -> Vec<Vec<T>> {
    let b = convolve_even(a, a);
    let l23 = T::from_f64(3.0 * p.lambda2);
    (1..m)
        .map(|k| {
            let k2 = T::from_f64((k * k) as f64);
            (1..m)
                .map(|j| {
                    let mut v = T::zero() - l23 * k2 * conv(&b, k, j);
                    if j == k {
                        v = v + p.mu::<T>(k);
                    }
                    v
                })
                .collect()
        })
        .collect()
}

fn with_zero<T: Ring>(a: &[T]) -> Vec<T> {
    std::iter::once(T::zero()).chain(a.iter().copied()).collect()
}

/// Checks `m² > λ₁` and `m⁴ > λ₃`: then `μ_k < 0` and both `|μ_k|` and
/// `k²/|μ_k|`-decay are monotone on `k ≥ m`.
fn check_tail(p: &OkParams, m: usize) -> Result<()> {
    let m2 = (m * m) as f64;
    if m2 > p.lambda1 && m2 * m2 > p.lambda3 && p.mu::<Interval>(m).is_negative() {
        Ok(())
    } else {
        Err(Error::OperatorBuild(format!(
            "truncation m = {m} too small for a monotone negative tail (need m² > λ₁, m⁴ > λ₃)"
        )))
    }
}

/// `sup_{k ≥ m} k²/|μ_k| = m²/|μ_m|` under [`check_tail`].
fn tail_k2_over_mu(p: &OkParams, m: usize) -> Interval {
    Interval::point((m * m) as f64).try_div(p.mu::<Interval>(m).abs()).expect("μ_m < 0")
}

pub fn ok_bounds(abar: &DVector<f64>, p: &OkParams, nu: f64, m: usize) -> Result<RadiiBounds> {
    check_tail(p, m)?;
    let n = m - 1;
    let a: Vec<Interval> = with_zero(abar.as_slice()).into_iter().map(Interval::point).collect();
    let d = df_generic(&a, p, m);
    let df = IntervalMatrix::from_fn(n, n, |i, j| d[i][j]);
    let am = df
        .mid()
        .try_inverse()
        .ok_or_else(|| Error::OperatorBuild("midpoint Jacobian is singular".into()))?;
    let w = weights_1d(nu, 3 * m);
    let wf = &w[1..m];

    let f = f_generic(&a, p);
    let y = point_mat_vec(&am, &f[1..m]);
    let mut y0 = weighted_abs_sum(&y, wf);
    for (k, fk) in f.iter().enumerate().skip(m) {
        y0 += (fk.abs() * w[k]).try_div(p.mu::<Interval>(k).abs()).expect("tail μ_k < 0");
    }

    let b = IntervalMatrix::identity(n).sub(&df.left_mul_point(&am));
    let z0 = weighted_column_norm(&b, wf, wf);

    let bs = CosSeq::new(convolve_even(&a, &a), nu)?;
    let l2 = Interval::point(p.lambda2.abs()).scale(3.0);
    let v: Vec<Interval> = (1..m).map(|k| (l2 * q_hat_bound(&bs, k, m)).scale((k * k) as f64)).collect();
    let tail = tail_k2_over_mu(p, m);
    let z1 = weighted_abs_mat_vec(&am, &v, wf) + l2 * bs.norm() * tail;

    let ak2 = IntervalMatrix::from_fn(n, n, |i, j| Interval::point(am[(i, j)]).scale(((j + 1) * (j + 1)) as f64));
    let a_norm = CosSeq::new(a, nu)?.norm();
    let z2 = l2 * (Interval::ONE + a_norm.scale(2.0)) * weighted_column_norm(&ak2, wf, wf).max(tail);

    RadiiBounds::new(y0, z0, z1, z2)
}

/// The Ohta-Kawasaki problem behind the [`Problem`] interface.
#[derive(Clone, Debug)]
pub struct OkProblem {
    pub params: OkParams,
}

impl OkProblem {
    pub fn new(params: OkParams) -> Self {
        Self { params }
    }
}

impl Problem for OkProblem {
    fn spec(&self) -> ProblemSpec {
        let p = self.params;
        ProblemSpec::Ok { lambda1: p.lambda1, lambda2: p.lambda2, lambda3: p.lambda3 }
    }

    fn dim(&self, m: usize) -> usize {
        m - 1
    }

    fn residual(&self, a: &DVector<f64>, m: usize) -> DVector<f64> {
        let f = f_generic(&with_zero(a.as_slice()), &self.params);
        DVector::from_fn(m - 1, |i, _| f.get(i + 1).copied().unwrap_or(0.0))
    }

    fn jacobian(&self, a: &DVector<f64>, m: usize) -> DMatrix<f64> {
        let d = df_generic(&with_zero(a.as_slice()), &self.params, m);
        DMatrix::from_fn(m - 1, m - 1, |i, j| d[i][j])
    }

    fn bounds(&self, abar: &DVector<f64>, nu: f64, m: usize) -> Result<RadiiBounds> {
        ok_bounds(abar, &self.params, nu, m)
    }

    fn index_block(&self, abar: &DVector<f64>, m: usize, m_pad: usize) -> Result<IntervalMatrix> {
        if m_pad < m {
            return Err(Error::Domain(format!("padding {m_pad} below truncation {m}")));
        }
        check_tail(&self.params, m)?;
        let a: Vec<Interval> = with_zero(abar.as_slice()).into_iter().map(Interval::point).collect();
        let b = convolve_even(&a, &a);
        let l23 = Interval::point(3.0 * self.params.lambda2);
        let p = self.params;
        Ok(IntervalMatrix::from_fn(m_pad - 1, m_pad - 1, |i, j| {
            let (k, l) = (i + 1, j + 1);
            let diag = || p.mu::<Interval>(k).try_div(Interval::point((k * k) as f64)).expect("k ≥ 1");
            if k < m && l < m {
                let mut v = -(l23 * conv(&b, k, l));
                if k == l {
                    v += diag();
                }
                v
            } else if k == l {
                diag()
            } else {
                Interval::ZERO
            }
        }))
    }

    fn norm(&self, a: &[Interval], nu: f64, m: usize) -> Interval {
        weighted_abs_sum(&a[..m - 1], &weights_1d(nu, m)[1..])
    }

    fn resize(&self, a: &DVector<f64>, from: usize, to: usize) -> DVector<f64> {
        let mut v = DVector::zeros(to - 1);
        for i in 0..(from.min(to) - 1) {
            v[i] = a[i];
        }
        v
    }

    fn eval(&self, a: &DVector<f64>, m: usize, x: &[f64]) -> f64 {
        (1..m).map(|k| 2.0 * a[k - 1] * (k as f64 * x[0]).cos()).sum()
    }
}
