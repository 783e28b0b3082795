//! Outward-rounded interval arithmetic on `f64` endpoints.
//!
//! Rounding is realized without touching the FPU rounding mode: every
//! endpoint is computed in round-to-nearest and then corrected using the
//! exact rounding error (TwoSum for sums, FMA residuals for products and
//! quotients). When the error is zero the endpoint is kept, otherwise it is
//! moved one ulp in the outward direction. Near the underflow threshold the
//! residual is not exact, so the endpoint is always widened there.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::Error;

/// Below this magnitude FMA residuals may be inexact because of underflow.
const UNDERFLOW_GUARD: f64 = 1.0e-290;

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

#[inline]
pub(crate) fn add_down(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s.next_down();
    }
    if two_sum_err(a, b, s) < 0.0 {
        s.next_down()
    } else {
        s
    }
}

#[inline]
pub(crate) fn add_up(a: f64, b: f64) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return s.next_up();
    }
    if two_sum_err(a, b, s) > 0.0 {
        s.next_up()
    } else {
        s
    }
}

#[inline]
pub(crate) fn mul_down(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() || p.abs() < UNDERFLOW_GUARD {
        return p.next_down();
    }
    if a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

#[inline]
pub(crate) fn mul_up(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() || p.abs() < UNDERFLOW_GUARD {
        return p.next_up();
    }
    if a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

#[inline]
fn div_down(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() || q.abs() < UNDERFLOW_GUARD || b.abs() < UNDERFLOW_GUARD {
        return q.next_down();
    }
    // a = q*b + r exactly; the true quotient is q + r/b.
    let r = (-q).mul_add(b, a);
    if r == 0.0 {
        q
    } else if (r < 0.0) != (b < 0.0) {
        q.next_down()
    } else {
        q
    }
}

#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        return 0.0;
    }
    let q = a / b;
    if !q.is_finite() || q.abs() < UNDERFLOW_GUARD || b.abs() < UNDERFLOW_GUARD {
        return q.next_up();
    }
    let r = (-q).mul_add(b, a);
    if r == 0.0 {
        q
    } else if (r > 0.0) == (b > 0.0) {
        q.next_up()
    } else {
        q
    }
}

#[inline]
fn sqrt_down(x: f64) -> f64 {
    let s = x.sqrt();
    // s*s - x > 0 means s overshoots the true root.
    if s.mul_add(s, -x) > 0.0 {
        s.next_down().max(0.0)
    } else {
        s
    }
}

#[inline]
fn sqrt_up(x: f64) -> f64 {
    let s = x.sqrt();
    if s.mul_add(s, -x) < 0.0 {
        s.next_up()
    } else {
        s
    }
}

/// A closed interval `[lo, hi]` of reals with `lo <= hi`.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self, Error> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(x: Interval) -> Self {
        [x.lo, x.hi]
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

impl Default for Interval {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for Interval {
    fn from(x: f64) -> Self {
        Self::point(x)
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };
    pub const ONE: Interval = Interval { lo: 1.0, hi: 1.0 };

    /// Builds `[lo, hi]`, rejecting NaN endpoints and reversed bounds.
    pub fn new(lo: f64, hi: f64) -> Result<Self, Error> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Domain("interval endpoint is NaN".into()));
        }
        if lo > hi {
            return Err(Error::Domain(format!("interval endpoints reversed: [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval `[x, x]`.
    ///
    /// Panics if `x` is NaN.
    #[inline]
    pub fn point(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN cannot be enclosed by an interval");
        Self { lo: x, hi: x }
    }

    /// Symmetric interval `[-r, r]`.
    pub fn symmetric(r: f64) -> Self {
        let r = r.abs();
        Self::new(-r, r).expect("finite radius")
    }

    /// `[mid - rad, mid + rad]` rounded outward.
    pub fn mid_rad(mid: f64, rad: f64) -> Self {
        let rad = rad.abs();
        Self::new(add_down(mid, -rad), add_up(mid, rad)).expect("NaN-free midpoint/radius")
    }

    #[inline]
    pub fn lo(self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.hi
    }

    /// Midpoint (round-to-nearest, not an enclosure).
    #[inline]
    pub fn mid(self) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else if self.lo.is_infinite() || self.hi.is_infinite() {
            if self.lo.is_infinite() && self.hi.is_infinite() {
                0.0
            } else if self.lo.is_infinite() {
                f64::MIN
            } else {
                f64::MAX
            }
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    /// Upper bound on the radius about `mid()`.
    pub fn rad(self) -> f64 {
        let m = self.mid();
        add_up(self.hi, -m).max(add_up(m, -self.lo))
    }

    /// Upper bound on the width `hi - lo`.
    pub fn width(self) -> f64 {
        add_up(self.hi, -self.lo)
    }

    /// Magnitude `sup{|t| : t in self}`; exact since it is an endpoint.
    #[inline]
    pub fn mag(self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// Mignitude `inf{|t| : t in self}`.
    #[inline]
    pub fn mig(self) -> f64 {
        if self.contains_zero() {
            0.0
        } else {
            self.lo.abs().min(self.hi.abs())
        }
    }

    #[inline]
    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn contains_zero(self) -> bool {
        self.contains(0.0)
    }

    /// `self ⊆ other`.
    pub fn subset_of(self, other: Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Strictly positive: `lo > 0`.
    pub fn is_positive(self) -> bool {
        self.lo > 0.0
    }

    /// Strictly negative: `hi < 0`.
    pub fn is_negative(self) -> bool {
        self.hi < 0.0
    }

    pub fn hull(self, other: Interval) -> Interval {
        Interval { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn abs(self) -> Interval {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval { lo: 0.0, hi: self.mag() }
        }
    }

    /// Pointwise maximum of two intervals.
    pub fn max(self, other: Interval) -> Interval {
        Interval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn sqr(self) -> Interval {
        let a = self.abs();
        Interval { lo: mul_down(a.lo, a.lo), hi: mul_up(a.hi, a.hi) }
    }

    /// Integer power by repeated multiplication (enclosing, not tight for odd
    /// powers of intervals straddling zero).
    pub fn powi(self, n: u32) -> Interval {
        match n {
            0 => Interval::ONE,
            1 => self,
            _ if n % 2 == 0 => self.powi(n / 2).sqr(),
            _ => self * self.powi(n - 1),
        }
    }

    pub fn sqrt(self) -> Result<Interval, Error> {
        if self.lo < 0.0 {
            return Err(Error::Domain(format!("sqrt of {self}")));
        }
        Ok(Interval { lo: sqrt_down(self.lo), hi: sqrt_up(self.hi) })
    }

    /// `self / rhs`; fails when `rhs` contains zero.
    pub fn try_div(self, rhs: Interval) -> Result<Interval, Error> {
        if rhs.contains_zero() {
            return Err(Error::Domain(format!("division by interval containing zero: {rhs}")));
        }
        let (a, b) = (self, rhs);
        let lo = div_down(a.lo, b.lo)
            .min(div_down(a.lo, b.hi))
            .min(div_down(a.hi, b.lo))
            .min(div_down(a.hi, b.hi));
        let hi = div_up(a.lo, b.lo)
            .max(div_up(a.lo, b.hi))
            .max(div_up(a.hi, b.lo))
            .max(div_up(a.hi, b.hi));
        Ok(Interval { lo, hi })
    }

    pub fn recip(self) -> Result<Interval, Error> {
        Interval::ONE.try_div(self)
    }

    /// Product with a point value; cheaper than the general product.
    #[inline]
    pub fn scale(self, a: f64) -> Interval {
        if a >= 0.0 {
            Interval { lo: mul_down(self.lo, a), hi: mul_up(self.hi, a) }
        } else {
            Interval { lo: mul_down(self.hi, a), hi: mul_up(self.lo, a) }
        }
    }

    /// Fused accumulate `self + a * b` for point `a`.
    #[inline]
    pub fn add_scaled(self, a: f64, b: Interval) -> Interval {
        self + b.scale(a)
    }
}

impl Neg for Interval {
    type Output = Interval;

    #[inline]
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Add for Interval {
    type Output = Interval;

    #[inline]
    fn add(self, rhs: Interval) -> Interval {
        Interval { lo: add_down(self.lo, rhs.lo), hi: add_up(self.hi, rhs.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;

    #[inline]
    fn sub(self, rhs: Interval) -> Interval {
        Interval { lo: add_down(self.lo, -rhs.hi), hi: add_up(self.hi, -rhs.lo) }
    }
}

impl Mul for Interval {
    type Output = Interval;

    #[inline]
    fn mul(self, rhs: Interval) -> Interval {
        let (a, b) = (self, rhs);
        if a.lo == a.hi {
            return b.scale(a.lo);
        }
        if b.lo == b.hi {
            return a.scale(b.lo);
        }
        let lo = mul_down(a.lo, b.lo)
            .min(mul_down(a.lo, b.hi))
            .min(mul_down(a.hi, b.lo))
            .min(mul_down(a.hi, b.hi));
        let hi = mul_up(a.lo, b.lo)
            .max(mul_up(a.lo, b.hi))
            .max(mul_up(a.hi, b.lo))
            .max(mul_up(a.hi, b.hi));
        Interval { lo, hi }
    }
}

impl Add<f64> for Interval {
    type Output = Interval;

    fn add(self, rhs: f64) -> Interval {
        self + Interval::point(rhs)
    }
}

impl Sub<f64> for Interval {
    type Output = Interval;

    fn sub(self, rhs: f64) -> Interval {
        self - Interval::point(rhs)
    }
}

impl Mul<f64> for Interval {
    type Output = Interval;

    fn mul(self, rhs: f64) -> Interval {
        self.scale(rhs)
    }
}

impl AddAssign for Interval {
    #[inline]
    fn add_assign(&mut self, rhs: Interval) {
        *self = *self + rhs;
    }
}

impl SubAssign for Interval {
    #[inline]
    fn sub_assign(&mut self, rhs: Interval) {
        *self = *self - rhs;
    }
}

impl std::iter::Sum for Interval {
    fn sum<I: Iterator<Item = Interval>>(iter: I) -> Interval {
        iter.fold(Interval::ZERO, |acc, x| acc + x)
    }
}

/// Finite ordered list of intervals.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntervalVector(pub Vec<Interval>);

impl IntervalVector {
    pub fn zeros(n: usize) -> Self {
        Self(vec![Interval::ZERO; n])
    }

    pub fn from_points(x: &[f64]) -> Self {
        Self(x.iter().copied().map(Interval::point).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mid(&self) -> Vec<f64> {
        self.0.iter().map(|x| x.mid()).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.0.iter()
    }
}

impl Index<usize> for IntervalVector {
    type Output = Interval;

    fn index(&self, i: usize) -> &Interval {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntervalVector {
    fn index_mut(&mut self, i: usize) -> &mut Interval {
        &mut self.0[i]
    }
}

/// Dense row-major interval matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Interval::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Interval::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_points(m: &nalgebra::DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| Interval::point(m[(i, j)]))
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mid(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].mid())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise magnitudes, as an upper bound matrix.
    pub fn mag(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].mag())
    }

    /// Largest width of any entry.
    pub fn max_width(&self) -> f64 {
        self.data.iter().map(|x| x.width()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntervalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| *a - *b).collect(),
        }
    }

    /// Interval product `self * other`.
    pub fn mul(&self, other: &IntervalMatrix) -> IntervalMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in interval product");
        let mut out = IntervalMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Interval::ZERO {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * *b;
                }
            }
        }
        out
    }

    /// Product of a point matrix on the left with `self`.
    pub fn left_mul_point(&self, a: &nalgebra::DMatrix<f64>) -> IntervalMatrix {
        assert_eq!(a.ncols(), self.rows, "dimension mismatch in interval product");
        let mut out = IntervalMatrix::zeros(a.nrows(), self.cols);
        for i in 0..a.nrows() {
            let orow = &mut out.data[i * self.cols..(i + 1) * self.cols];
            for k in 0..self.rows {
                let aik = a[(i, k)];
                if aik == 0.0 {
                    continue;
                }
                let brow = &self.data[k * self.cols..(k + 1) * self.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += b.scale(aik);
                }
            }
        }
        out
    }

    /// Product of `self` with a point matrix on the right.
    pub fn right_mul_point(&self, b: &nalgebra::DMatrix<f64>) -> IntervalMatrix {
        assert_eq!(self.cols, b.nrows(), "dimension mismatch in interval product");
        // Work on the transpose so the inner loop stays row-contiguous.
        let bt = b.transpose();
        let at = self.transpose();
        at.left_mul_point(&bt).transpose()
    }

    /// Interval matrix-vector product.
    pub fn mul_vec(&self, x: &[Interval]) -> Vec<Interval> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for IntervalMatrix {
    type Output = Interval;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Interval {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntervalMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Interval {
        &mut self.data[i * self.cols + j]
    }
}
