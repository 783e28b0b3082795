//! The Cauchy-Riemann equilibrium problem in Fourier form:
//!
//! ```text
//! (F₁)₀ = λ₁(a₁)₀ − λ₂(a₁³)₀
//! (F₁)_k = 2[−k(a₂)_k + λ₁(a₁)_k − λ₂(a₁³)_k]    k ≥ 1
//! (F₂)_k = 2[−k(a₁)_k + (a₂)_k]                   k ≥ 1
//! ```
//!
//! with `a₁` a cosine and `a₂` a sine sequence. Flat layout at truncation
//! `m`: `[(a₁)₀, …, (a₁)_{m−1}, (a₂)₁, …, (a₂)_{m−1}]`, length `2m − 1`.
//!
//! The factor 2 on `k ≥ 1` rows makes `DF` symmetric. Consequently the
//! tail of `DF` on mode `k` is `[[0, −2k], [−2k, 0]]` (up to the bounded
//! λ-terms) and the tail of the approximate inverse is its inverse,
//! `[[0, −1/(2k)], [−1/(2k), 0]]`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::interval::{Interval, IntervalMatrix};
use crate::problem::{Problem, ProblemSpec};
use crate::prover::RadiiBounds;
use crate::seqspace::{
    convolve_even, point_mat_vec, q_hat_bound, weighted_abs_mat_vec, weighted_abs_sum, weighted_column_norm, weights_1d, BlockTailOperator, CosSeq, PairSeq, Ring,
    SinSeq, TailRule,
};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrParams {
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Row scaling: 1 on mode 0, 2 on modes `k ≥ 1`.
#[inline]
fn row_scale(k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        2.0
    }
}

/// `F` on cosine part `a1` (indices from 0) and sine part `a2` (`a2[k]` is
/// `(a₂)_k`, `a2[0]` ignored). Returns `F₁` for `k < a1.len() * 3 - 2` and
/// `F₂` in the same layout as `a2`.
fn f_components<T: Ring>(a1: &[T], a2: &[T], p: &CrParams) -> (Vec<T>, Vec<T>) {
    let b = convolve_even(a1, a1);
    let cube = convolve_even(&b, a1);
    let l1 = T::from_f64(p.lambda1);
    let l2 = T::from_f64(p.lambda2);
    let get = |v: &[T], k: usize| if k < v.len() { v[k] } else { T::zero() };
    let f1 = (0..cube.len())
        .map(|k| {
            let mut t = l1 * get(a1, k) - l2 * cube[k];
            if k > 0 {
                t = t - T::from_f64(k as f64) * get(a2, k);
            }
            T::from_f64(row_scale(k)) * t
        })
        .collect();
    let f2 = (0..a2.len())
        .map(|k| {
            if k == 0 {
                T::zero()
            } else {
                T::from_f64(2.0) * (get(a2, k) - T::from_f64(k as f64) * get(a1, k))
            }
        })
        .collect();
    (f1, f2)
}

/// Full (untruncated) `F(a)`; `F₁` has support `3·support(a₁) − 2`.
pub fn f_eval(a: &PairSeq, p: &CrParams) -> PairSeq {
    let a2 = a.a2.padded();
    let (f1, f2) = f_components(a.a1.coeffs(), &a2, p);
    let nu = a.a1.nu();
    PairSeq {
        a1: CosSeq::new(f1, nu).expect("ν already validated"),
        a2: SinSeq::new(f2.into_iter().skip(1).collect(), nu).expect("ν already validated"),
    }
}

/// Entry `∂(a₁³)_k / ∂(a₁)_j / 3` in terms of `b = a₁ * a₁`.
fn conv_entry<T: Ring>(b: &[T], k: usize, j: usize) -> T {
    let get = |i: usize| if i < b.len() { b[i] } else { T::zero() };
    if j == 0 {
        get(k)
    } else {
        get(k.abs_diff(j)) + get(k + j)
    }
}

fn df_generic<T: Ring>(a1: &[T], p: &CrParams, m: usize) -> Vec<Vec<T>> {
    let n = 2 * m - 1;
    let b = convolve_even(a1, a1);
    let l1 = T::from_f64(p.lambda1);
    let l23 = T::from_f64(3.0 * p.lambda2);
    let mut d = vec![vec![T::zero(); n]; n];
    for k in 0..m {
        let s = T::from_f64(row_scale(k));
        for j in 0..m {
            let mut v = T::zero() - l23 * conv_entry(&b, k, j);
            if j == k {
                v = v + l1;
            }
            d[k][j] = s * v;
        }
    }
    for k in 1..m {
        let v = T::from_f64(-2.0 * k as f64);
        d[k][m - 1 + k] = v;
        d[m - 1 + k][k] = v;
        d[m - 1 + k][m - 1 + k] = T::from_f64(2.0);
    }
    d
}

fn split(a: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let a1 = a[..m].to_vec();
    let mut a2 = vec![0.0];
    a2.extend_from_slice(&a[m..2 * m - 1]);
    (a1, a2)
}

/// Interval enclosure of `DF^(m)(a)`, dimension `2m − 1`.
pub fn df_finite(a: &PairSeq, p: &CrParams, m: usize) -> IntervalMatrix {
    let mut a1 = a.a1.coeffs().to_vec();
    a1.resize(m, Interval::ZERO);
    let d = df_generic(&a1[..m], p, m);
    IntervalMatrix::from_fn(2 * m - 1, 2 * m - 1, |i, j| d[i][j])
}

/// `A†` and `A` at a numerical zero.
#[derive(Clone, Debug)]
pub struct CrOperators {
    pub adag: BlockTailOperator,
    pub ainv: BlockTailOperator,
    /// Midpoint of the finite block of `A`, used for products.
    pub ainv_mid: DMatrix<f64>,
    pub nu: f64,
    pub m: usize,
}

/// Weights of the flat layout: cosine weights then sine weights.
fn flat_weights(nu: f64, m: usize) -> Vec<Interval> {
    let w = weights_1d(nu, m);
    w.iter().chain(&w[1..]).copied().collect()
}

pub fn build_operators(abar: &PairSeq, p: &CrParams, m: usize) -> Result<CrOperators> {
    if m < 2 {
        return Err(Error::Domain(format!("truncation m = {m} must be at least 2")));
    }
    if abar.a1.support() > m || abar.a2.coeffs().len() > m - 1 {
        return Err(Error::Domain("approximate zero exceeds the truncation".into()));
    }
    let nu = abar.a1.nu();
    let df = df_finite(abar, p, m);
    let ainv_mid = df
        .mid()
        .try_inverse()
        .ok_or_else(|| Error::OperatorBuild("midpoint Jacobian is singular".into()))?;
    if ainv_mid.iter().any(|x| !x.is_finite()) {
        return Err(Error::OperatorBuild("approximate inverse is not finite".into()));
    }
    let w = flat_weights(nu, m);
    let adag = BlockTailOperator::new(
        df,
        w.clone(),
        m,
        TailRule::Block2 {
            entry: Arc::new(|k| {
                let o = Interval::point(-2.0 * k as f64);
                [[Interval::ZERO, o], [o, Interval::ZERO]]
            }),
        },
    )?;
    let ainv = BlockTailOperator::new(
        IntervalMatrix::from_points(&ainv_mid),
        w,
        m,
        TailRule::Block2 {
            entry: Arc::new(|k| {
                let o = -Interval::point(2.0 * k as f64).recip().expect("k ≥ 1");
                [[Interval::ZERO, o], [o, Interval::ZERO]]
            }),
        },
    )?;
    Ok(CrOperators { adag, ainv, ainv_mid, nu, m })
}

/// Sub-block of an interval matrix.
fn block(g: &IntervalMatrix, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> IntervalMatrix {
    IntervalMatrix::from_fn(rows.len(), cols.len(), |i, j| g[(rows.start + i, cols.start + j)])
}

/// `max(‖G₁₁‖ + ‖G₁₂‖, ‖G₂₁‖ + ‖G₂₂‖)` on `ℓ¹_ν × ℓ¹,⁰_ν`.
fn product_norm(g: &IntervalMatrix, nu: f64, m: usize) -> Interval {
    let w = weights_1d(nu, m);
    let (w1, w2) = (&w[..], &w[1..]);
    let (c, s) = (0..m, m..2 * m - 1);
    let n11 = weighted_column_norm(&block(g, c.clone(), c.clone()), w1, w1);
    let n12 = weighted_column_norm(&block(g, c.clone(), s.clone()), w1, w2);
    let n21 = weighted_column_norm(&block(g, s.clone(), c), w2, w1);
    let n22 = weighted_column_norm(&block(g, s.clone(), s), w2, w2);
    (n11 + n12).max(n21 + n22)
}

/// `Y₀ = max(‖(A F(ā))₁‖, ‖(A F(ā))₂‖)`, the second including the tail
/// `Σ_{m ≤ k ≤ 3m−3} 2ν^k |(F₁)_k| / (2k)`.
pub fn bound_y0(abar: &PairSeq, p: &CrParams, ops: &CrOperators) -> Interval {
    let (m, nu) = (ops.m, ops.nu);
    let f = f_eval(abar, p);
    let f1 = f.a1.coeffs();
    let mut fm: Vec<Interval> = (0..m).map(|k| f.a1.get(k as isize)).collect();
    fm.extend((1..m).map(|k| f.a2.get(k as isize)));
    let y = point_mat_vec(&ops.ainv_mid, &fm);
    let w = weights_1d(nu, f1.len().max(m));
    let y1 = weighted_abs_sum(&y[..m], &w[..m]);
    let mut y2 = weighted_abs_sum(&y[m..], &w[1..m]);
    for (k, fk) in f1.iter().enumerate().skip(m) {
        y2 += (fk.abs() * w[k]).try_div(Interval::point(2.0 * k as f64)).expect("k ≥ m ≥ 2");
    }
    y1.max(y2)
}

/// `Z₀ = ‖I − A^(m) DF^(m)(ā)‖`; the tails of `A` and `A†` are exact inverses.
pub fn bound_z0(ops: &CrOperators) -> Interval {
    let n = 2 * ops.m - 1;
    let b = IntervalMatrix::identity(n).sub(&ops.adag.block.left_mul_point(&ops.ainv_mid));
    product_norm(&b, ops.nu, ops.m)
}

/// `Z₁` from the tail convolution bounds `Q̂_k(ā₁ * ā₁)` and the tail of `A`.
pub fn bound_z1(abar: &PairSeq, p: &CrParams, ops: &CrOperators) -> Interval {
    let (m, nu) = (ops.m, ops.nu);
    let b = abar.a1.convolve(&abar.a1);
    let l2 = Interval::point(p.lambda2.abs()).scale(3.0);
    let v: Vec<Interval> = (0..m).map(|k| (l2 * q_hat_bound(&b, k, m)).scale(row_scale(k))).collect();
    let w = weights_1d(nu, m);
    let a = &ops.ainv_mid;
    let a11 = a.view((0, 0), (m, m)).into_owned();
    let a21 = a.view((m, 0), (m - 1, m)).into_owned();
    let inv_m = Interval::point(m as f64).recip().expect("m ≥ 2");
    let z1a = weighted_abs_mat_vec(&a11, &v, &w) + inv_m;
    let tail2 = (Interval::point(p.lambda1.abs()) + l2 * b.norm()) * inv_m;
    let z1b = weighted_abs_mat_vec(&a21, &v, &w[1..]) + tail2;
    z1a.max(z1b)
}

/// `Z₂ = 3|λ₂|(1 + 2‖ā₁‖) · max(‖A₁₁S‖, ‖A₂₁S‖, 1/m)` with `S` the row
/// scaling; valid for `r ≤ 1`.
pub fn bound_z2(abar: &PairSeq, p: &CrParams, ops: &CrOperators) -> Interval {
    let (m, nu) = (ops.m, ops.nu);
    let w = weights_1d(nu, m);
    let a = &ops.ainv.block;
    let a11s = IntervalMatrix::from_fn(m, m, |i, j| a[(i, j)].scale(row_scale(j)));
    let a21s = IntervalMatrix::from_fn(m - 1, m, |i, j| a[(m + i, j)].scale(row_scale(j)));
    let nrm = weighted_column_norm(&a11s, &w, &w)
        .max(weighted_column_norm(&a21s, &w[1..], &w))
        .max(Interval::point(m as f64).recip().expect("m ≥ 2"));
    let lip = Interval::ONE + abar.a1.norm().scale(2.0);
    Interval::point(p.lambda2.abs()).scale(3.0) * lip * nrm
}

/// The Cauchy-Riemann problem behind the [`Problem`] interface.
#[derive(Clone, Debug)]
pub struct CrProblem {
    pub params: CrParams,
}

impl CrProblem {
    pub fn new(params: CrParams) -> Self {
        Self { params }
    }

    /// Splits a flat vector into a [`PairSeq`].
    pub fn pair(&self, a: &DVector<f64>, m: usize, nu: f64) -> Result<PairSeq> {
        let (a1, a2) = split(a.as_slice(), m);
        Ok(PairSeq { a1: CosSeq::from_points(&a1, nu)?, a2: SinSeq::from_points(&a2[1..], nu)? })
    }

    /// Flat vector from cosine coefficients alone, with `(a₂)_k = k(a₁)_k`
    /// (the second equation solved exactly).
    pub fn from_a1(a1: &[f64], m: usize) -> DVector<f64> {
        let mut v = DVector::zeros(2 * m - 1);
        for (k, x) in a1.iter().enumerate().take(m) {
            v[k] = *x;
            if k > 0 {
                v[m - 1 + k] = k as f64 * x;
            }
        }
        v
    }
}

impl Problem for CrProblem {
    fn spec(&self) -> ProblemSpec {
        ProblemSpec::Cr { lambda1: self.params.lambda1, lambda2: self.params.lambda2 }
    }

    fn dim(&self, m: usize) -> usize {
        2 * m - 1
    }

    fn residual(&self, a: &DVector<f64>, m: usize) -> DVector<f64> {
        let (a1, a2) = split(a.as_slice(), m);
        let (f1, f2) = f_components(&a1, &a2, &self.params);
        DVector::from_iterator(2 * m - 1, f1[..m].iter().chain(&f2[1..m]).copied())
    }

    fn jacobian(&self, a: &DVector<f64>, m: usize) -> DMatrix<f64> {
        let d = df_generic(&a.as_slice()[..m], &self.params, m);
        DMatrix::from_fn(2 * m - 1, 2 * m - 1, |i, j| d[i][j])
    }

    fn bounds(&self, abar: &DVector<f64>, nu: f64, m: usize) -> Result<RadiiBounds> {
        let a = self.pair(abar, m, nu)?;
        let ops = build_operators(&a, &self.params, m)?;
        RadiiBounds::new(
            bound_y0(&a, &self.params, &ops),
            bound_z0(&ops),
            bound_z1(&a, &self.params, &ops),
            bound_z2(&a, &self.params, &ops),
        )
    }

    fn index_block(&self, abar: &DVector<f64>, m: usize, m_pad: usize) -> Result<IntervalMatrix> {
        if m_pad < m {
            return Err(Error::Domain(format!("padding {m_pad} below truncation {m}")));
        }
        let a = self.pair(abar, m, 1.0)?;
        let df = df_finite(&a, &self.params, m);
        // Re-embed into the layout at m_pad and append the blocks Λ_k.
        let at = |i: usize| -> Option<usize> {
            if i < m {
                Some(i)
            } else if i < m_pad {
                None
            } else if i - m_pad + 1 < m {
                Some(m + i - m_pad)
            } else {
                None
            }
        };
        let n = 2 * m_pad - 1;
        Ok(IntervalMatrix::from_fn(n, n, |i, j| match (at(i), at(j)) {
            (Some(p), Some(q)) => df[(p, q)],
            _ => {
                // Tail: cosine mode k at i = k, sine mode k at i = m_pad - 1 + k.
                let (ki, si) = if i < m_pad { (i, false) } else { (i - m_pad + 1, true) };
                let (kj, sj) = if j < m_pad { (j, false) } else { (j - m_pad + 1, true) };
                if ki == kj && ki >= m && si != sj {
                    Interval::point(-2.0 * ki as f64)
                } else {
                    Interval::ZERO
                }
            }
        }))
    }

    fn norm(&self, a: &[Interval], nu: f64, m: usize) -> Interval {
        let w = weights_1d(nu, m);
        weighted_abs_sum(&a[..m], &w).max(weighted_abs_sum(&a[m..2 * m - 1], &w[1..]))
    }

    fn resize(&self, a: &DVector<f64>, from: usize, to: usize) -> DVector<f64> {
        let mut v = DVector::zeros(2 * to - 1);
        for k in 0..from.min(to) {
            v[k] = a[k];
            if k > 0 {
                v[to - 1 + k] = a[from - 1 + k];
            }
        }
        v
    }

    fn eval(&self, a: &DVector<f64>, m: usize, x: &[f64]) -> f64 {
        (0..m).map(|k| row_scale(k) * a[k] * (k as f64 * x[0]).cos()).sum()
    }
}
