//! Weighted ℓ¹ spaces of one-sided Fourier coefficient sequences.
//!
//! A cosine sequence `(a_k)_{k≥0}` stands for its even extension
//! `a_{-k} = a_k`; a sine sequence `(a_k)_{k≥1}` for its odd extension
//! `a_{-k} = -a_k`, `a_0 = 0`. Norms are
//!
//! ```text
//! ‖a‖₁,ν = |a₀| + 2 Σ_{k≥1} |a_k| ν^k              (1D)
//! ‖a‖₁,ν = Σ_k m_k |a_k| ν^{max(k₁,k₂)}            (2D, m_k ∈ {1,2,4})
//! ```
//!
//! All sequences have explicit finite support; the tail is exactly zero.
//! 2D coefficient grids are flattened lexicographically in `(k₁, k₂)`:
//! index `k₁ * n₂ + k₂`.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader};
use std::ops::{Add, Mul, Sub};
use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::interval::{Interval, IntervalMatrix};
use crate::{Error, Result};

/// Scalars the convolution kernels are generic over (`f64` for Newton,
/// [`Interval`] for the proofs).
pub trait Ring: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn zero() -> Self;
    fn from_f64(x: f64) -> Self;
}

impl Ring for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Ring for Interval {
    #[inline]
    fn zero() -> Self {
        Interval::ZERO
    }
    #[inline]
    fn from_f64(x: f64) -> Self {
        Interval::point(x)
    }
}

/// Enclosures of `ν^0, …, ν^{n-1}`.
pub fn nu_powers(nu: f64, n: usize) -> Vec<Interval> {
    let nu_i = Interval::point(nu);
    let mut out = Vec::with_capacity(n);
    let mut p = Interval::ONE;
    for _ in 0..n {
        out.push(p);
        p = p * nu_i;
    }
    out
}

/// 1D weights `ω₀ = 1`, `ω_k = 2ν^k`.
pub fn weights_1d(nu: f64, n: usize) -> Vec<Interval> {
    nu_powers(nu, n)
        .into_iter()
        .enumerate()
        .map(|(k, p)| if k == 0 { p } else { p.scale(2.0) })
        .collect()
}

/// Multiplicity of a 2D mode: the number of sign images `(±k₁, ±k₂)`.
#[inline]
pub fn multiplicity_2d(k1: usize, k2: usize) -> f64 {
    match (k1 == 0, k2 == 0) {
        (true, true) => 1.0,
        (true, false) | (false, true) => 2.0,
        (false, false) => 4.0,
    }
}

/// 2D weights `m_k ν^{max(k₁,k₂)}` on an `n₁ × n₂` grid, flattened.
pub fn weights_2d(nu: f64, n1: usize, n2: usize) -> Vec<Interval> {
    let p = nu_powers(nu, n1.max(n2));
    let mut out = Vec::with_capacity(n1 * n2);
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            out.push(p[k1.max(k2)].scale(multiplicity_2d(k1, k2)));
        }
    }
    out
}

/// Even-by-even convolution of the symmetric extensions, restricted to
/// `k ≥ 0`. The result has support `a.len() + b.len() - 1`.
pub fn convolve_even<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let (na, nb) = (a.len() as isize, b.len() as isize);
    let n = (na + nb - 1) as usize;
    let mut out = vec![T::zero(); n];
    for (k, o) in out.iter_mut().enumerate() {
        let k = k as isize;
        let lo = (k - nb + 1).max(-(na - 1));
        let hi = (k + nb - 1).min(na - 1);
        let mut acc = T::zero();
        for l in lo..=hi {
            acc = acc + a[l.unsigned_abs()] * b[(k - l).unsigned_abs()];
        }
        *o = acc;
    }
    out
}

/// Even-by-odd convolution. `s` holds the odd sequence at indices
/// `0..len` with `s[0]` ignored (treated as zero); the result is odd and
/// returned in the same layout.
pub fn convolve_even_odd<T: Ring>(a: &[T], s: &[T]) -> Vec<T> {
    if a.is_empty() || s.len() < 2 {
        return vec![T::zero(); s.len().max(1)];
    }
    let (na, ns) = (a.len() as isize, s.len() as isize);
    let n = (na + ns - 1) as usize;
    let odd = |j: isize| -> Option<T> {
        if j == 0 || j.abs() >= ns {
            None
        } else if j > 0 {
            Some(s[j as usize])
        } else {
            Some(T::zero() - s[(-j) as usize])
        }
    };
    let mut out = vec![T::zero(); n];
    for (k, o) in out.iter_mut().enumerate().skip(1) {
        let k = k as isize;
        let mut acc = T::zero();
        for l in -(na - 1)..=(na - 1) {
            if let Some(v) = odd(k - l) {
                acc = acc + a[l.unsigned_abs()] * v;
            }
        }
        *o = acc;
    }
    out
}

/// 2D convolution of even-even extensions on flattened grids.
pub fn convolve_even_2d<T: Ring>(
    a: &[T],
    (na1, na2): (usize, usize),
    b: &[T],
    (nb1, nb2): (usize, usize),
) -> (Vec<T>, (usize, usize)) {
    assert_eq!(a.len(), na1 * na2);
    assert_eq!(b.len(), nb1 * nb2);
    let (n1, n2) = (na1 + nb1 - 1, na2 + nb2 - 1);
    let mut out = vec![T::zero(); n1 * n2];
    let (na1, na2, nb1, nb2) = (na1 as isize, na2 as isize, nb1 as isize, nb2 as isize);
    for k1 in 0..n1 as isize {
        let l1lo = (k1 - nb1 + 1).max(-(na1 - 1));
        let l1hi = (k1 + nb1 - 1).min(na1 - 1);
        for k2 in 0..n2 as isize {
            let l2lo = (k2 - nb2 + 1).max(-(na2 - 1));
            let l2hi = (k2 + nb2 - 1).min(na2 - 1);
            let mut acc = T::zero();
            for l1 in l1lo..=l1hi {
                let arow = l1.unsigned_abs() * na2 as usize;
                let brow = (k1 - l1).unsigned_abs() * nb2 as usize;
                for l2 in l2lo..=l2hi {
                    acc = acc + a[arow + l2.unsigned_abs()] * b[brow + (k2 - l2).unsigned_abs()];
                }
            }
            out[k1 as usize * n2 + k2 as usize] = acc;
        }
    }
    (out, (n1, n2))
}

/// Weighted ℓ¹ norm of a cosine coefficient slice.
pub fn norm_cos(a: &[Interval], nu: f64) -> Interval {
    let w = weights_1d(nu, a.len());
    a.iter().zip(&w).map(|(x, w)| x.abs() * *w).sum()
}

/// Even coefficient sequence with weight ν.
#[derive(Clone, Debug, PartialEq)]
pub struct CosSeq {
    coeffs: Vec<Interval>,
    nu: f64,
}

impl CosSeq {
    pub fn new(coeffs: Vec<Interval>, nu: f64) -> Result<Self> {
        check_nu(nu)?;
        Ok(Self { coeffs, nu })
    }

    pub fn from_points(coeffs: &[f64], nu: f64) -> Result<Self> {
        Self::new(coeffs.iter().copied().map(Interval::point).collect(), nu)
    }

    /// Kronecker delta at index 0 (the convolution identity).
    pub fn delta(nu: f64) -> Self {
        Self { coeffs: vec![Interval::ONE], nu }
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Support length: coefficients beyond are exactly zero.
    pub fn support(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient `a_{|k|}`, zero outside the support.
    pub fn get(&self, k: isize) -> Interval {
        self.coeffs.get(k.unsigned_abs()).copied().unwrap_or(Interval::ZERO)
    }

    pub fn norm(&self) -> Interval {
        norm_cos(&self.coeffs, self.nu)
    }

    pub fn convolve(&self, other: &CosSeq) -> CosSeq {
        CosSeq { coeffs: convolve_even(&self.coeffs, &other.coeffs), nu: self.nu }
    }

    /// Even-by-odd product, giving an odd sequence.
    pub fn convolve_odd(&self, other: &SinSeq) -> SinSeq {
        let s = other.padded();
        let r = convolve_even_odd(&self.coeffs, &s);
        SinSeq { coeffs: r.into_iter().skip(1).collect(), nu: self.nu }
    }

    pub fn cube(&self) -> CosSeq {
        self.convolve(self).convolve(self)
    }

    pub fn mid(&self) -> Vec<f64> {
        self.coeffs.iter().map(|x| x.mid()).collect()
    }
}

/// Odd coefficient sequence `(a_k)_{k≥1}`; `coeffs[0]` is `a_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SinSeq {
    coeffs: Vec<Interval>,
    nu: f64,
}

impl SinSeq {
    pub fn new(coeffs: Vec<Interval>, nu: f64) -> Result<Self> {
        check_nu(nu)?;
        Ok(Self { coeffs, nu })
    }

    pub fn from_points(coeffs: &[f64], nu: f64) -> Result<Self> {
        Self::new(coeffs.iter().copied().map(Interval::point).collect(), nu)
    }

    /// Coefficients `a_1, a_2, …`.
    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Coefficient of the odd extension at `k`.
    pub fn get(&self, k: isize) -> Interval {
        if k == 0 {
            return Interval::ZERO;
        }
        let v = self.coeffs.get(k.unsigned_abs() - 1).copied().unwrap_or(Interval::ZERO);
        if k < 0 {
            -v
        } else {
            v
        }
    }

    /// Layout with an explicit zero at index 0.
    pub fn padded(&self) -> Vec<Interval> {
        std::iter::once(Interval::ZERO).chain(self.coeffs.iter().copied()).collect()
    }

    pub fn norm(&self) -> Interval {
        norm_cos(&self.padded(), self.nu)
    }
}

/// An element `(a₁, a₂)` of `ℓ¹_ν × ℓ¹,⁰_ν` with the max norm.
#[derive(Clone, Debug, PartialEq)]
pub struct PairSeq {
    pub a1: CosSeq,
    pub a2: SinSeq,
}

impl PairSeq {
    pub fn norm(&self) -> Interval {
        self.a1.norm().max(self.a2.norm())
    }
}

/// 2D even-even coefficient grid `a_{(k₁,k₂)}`, `0 ≤ kᵢ < nᵢ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cos2Seq {
    coeffs: Vec<Interval>,
    dims: (usize, usize),
    nu: f64,
}

impl Cos2Seq {
    pub fn new(coeffs: Vec<Interval>, dims: (usize, usize), nu: f64) -> Result<Self> {
        check_nu(nu)?;
        if coeffs.len() != dims.0 * dims.1 {
            return Err(Error::Domain(format!(
                "{} coefficients do not fill a {}x{} grid",
                coeffs.len(),
                dims.0,
                dims.1
            )));
        }
        Ok(Self { coeffs, dims, nu })
    }

    pub fn from_points(coeffs: &[f64], dims: (usize, usize), nu: f64) -> Result<Self> {
        Self::new(coeffs.iter().copied().map(Interval::point).collect(), dims, nu)
    }

    pub fn coeffs(&self) -> &[Interval] {
        &self.coeffs
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn get(&self, k1: isize, k2: isize) -> Interval {
        let (a, b) = (k1.unsigned_abs(), k2.unsigned_abs());
        if a < self.dims.0 && b < self.dims.1 {
            self.coeffs[a * self.dims.1 + b]
        } else {
            Interval::ZERO
        }
    }

    pub fn norm(&self) -> Interval {
        let w = weights_2d(self.nu, self.dims.0, self.dims.1);
        self.coeffs.iter().zip(&w).map(|(x, w)| x.abs() * *w).sum()
    }

    pub fn convolve(&self, other: &Cos2Seq) -> Cos2Seq {
        let (c, dims) = convolve_even_2d(&self.coeffs, self.dims, &other.coeffs, other.dims);
        Cos2Seq { coeffs: c, dims, nu: self.nu }
    }

    pub fn cube(&self) -> Cos2Seq {
        self.convolve(self).convolve(self)
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if nu.is_finite() && nu >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("weight ν = {nu} must be finite and ≥ 1")))
    }
}

/// `‖c‖_{∞,ν⁻¹} · ‖b‖₁,ν`, a bound for `|Σ c_k b_k|`.
pub fn dual_pairing_bound(c: &[Interval], b_norm: Interval, nu: f64) -> Interval {
    let p = nu_powers(nu, c.len());
    let mut sup = Interval::ZERO;
    for (k, (ck, pk)) in c.iter().zip(&p).enumerate() {
        let term = if k == 0 {
            ck.abs()
        } else {
            ck.abs().try_div(pk.scale(2.0)).expect("ν^k > 0")
        };
        sup = sup.max(term);
    }
    sup * b_norm
}

/// `Q_k(b)`: bound on `sup_{‖v‖₁,ν ≤ 1} |(b * v)_k|`.
pub fn q_bound(b: &CosSeq, k: usize) -> Interval {
    b.get(k as isize).abs().max(q_sup(b, k, 1))
}

/// `Q̂_k(b)`: the same bound when `v` vanishes below index `m`.
pub fn q_hat_bound(b: &CosSeq, k: usize, m: usize) -> Interval {
    q_sup(b, k, m.max(1))
}

/// `sup_{j ≥ from} |b_{|k-j|} + b_{k+j}| / (2ν^j)`, evaluated exactly: the
/// numerator vanishes once `j ≥ k + support(b)`.
fn q_sup(b: &CosSeq, k: usize, from: usize) -> Interval {
    let end = k + b.support();
    if from >= end {
        return Interval::ZERO;
    }
    let p = nu_powers(b.nu, end);
    let k = k as isize;
    let mut sup = Interval::ZERO;
    for j in from..end {
        let ji = j as isize;
        let num = (b.get(k - ji) + b.get(k + ji)).abs();
        let v = num.try_div(p[j].scale(2.0)).expect("ν^j > 0");
        sup = sup.max(v);
    }
    sup
}

/// 2D analogue of [`q_hat_bound`]: bound on `sup |(b * v)_k|` over
/// `‖v‖₁,ν ≤ 1` with `v` supported on modes with `max(j₁,j₂) ≥ m`.
pub fn q_hat_bound_2d(b: &Cos2Seq, (k1, k2): (usize, usize), m: usize) -> Interval {
    let (n1, n2) = b.dims();
    let end1 = k1 + n1;
    let end2 = k2 + n2;
    let p = nu_powers(b.nu(), end1.max(end2));
    let (k1, k2) = (k1 as isize, k2 as isize);
    let mut sup = Interval::ZERO;
    for j1 in 0..end1 {
        for j2 in 0..end2 {
            if j1.max(j2) < m {
                continue;
            }
            let (s1, s2) = (j1 as isize, j2 as isize);
            // Sum over the distinct sign images of (j1, j2).
            let mut num = Interval::ZERO;
            for (t1, t2) in sign_images(s1, s2) {
                num += b.get(k1 - t1, k2 - t2);
            }
            if num == Interval::ZERO {
                continue;
            }
            let w = p[j1.max(j2)].scale(multiplicity_2d(j1, j2));
            sup = sup.max(num.abs().try_div(w).expect("weight > 0"));
        }
    }
    sup
}

/// Upper bound of `sup_j ‖E_j‖⁻¹ Σ_k w_k |G D π(b * E_j)|_k` over tail
/// modes `max(j₁,j₂) ≥ m`, where `E_j` is the symmetric unit at `j`, `π`
/// keeps the modes below `m` and `D = diag(row_scale)`.
///
/// This is the norm of `h ↦ G D π(b * h)` on tail-supported `h`.
pub fn tail_coupling_bound_2d(g: &DMatrix<f64>, b: &Cos2Seq, m: usize, row_scale: &[f64], w: &[Interval]) -> Interval {
    coupling_bound_2d(g, b, m, row_scale, w, Interval::ZERO, false)
}

/// Upper bound on the norm of `h ↦ G D π(b * h) + T (1 − π)(b * h)` for any
/// diagonal `T` on the tail with entries at most `tail_gain`. With
/// `finite_columns` false only tail-supported `h` are considered.
///
/// The sup over `j` is finite because `b` has finite support: past
/// `m + dims(b)` the finite part vanishes and the tail part is at most
/// `tail_gain ‖b‖`. The signed product runs in floating point with an
/// a posteriori rounding bound.
pub fn coupling_bound_2d(
    g: &DMatrix<f64>,
    b: &Cos2Seq,
    m: usize,
    row_scale: &[f64],
    w: &[Interval],
    tail_gain: Interval,
    finite_columns: bool,
) -> Interval {
    let n = m * m;
    assert_eq!(g.nrows(), n);
    assert_eq!(g.ncols(), n);
    assert_eq!(row_scale.len(), n);
    assert_eq!(w.len(), n);
    let (d1, d2) = b.dims();
    let end = m + d1.max(d2);
    let reach = end + d1.max(d2);
    let p = nu_powers(b.nu(), reach);
    let gain = tail_gain.mag();
    let entry = |k1: isize, k2: isize, j1: usize, j2: usize| {
        let mut num = Interval::ZERO;
        for (t1, t2) in sign_images(j1 as isize, j2 as isize) {
            num += b.get(k1 - t1, k2 - t2);
        }
        num
    };
    let mut mids: Vec<f64> = Vec::new();
    let mut rads: Vec<f64> = Vec::new();
    let mut tails: Vec<Interval> = Vec::new();
    let mut ncols = 0;
    for j1 in 0..end {
        for j2 in 0..end {
            if !finite_columns && j1.max(j2) < m {
                continue;
            }
            let wj = p[j1.max(j2)].scale(multiplicity_2d(j1, j2));
            let start = mids.len();
            let mut any = false;
            for i in 0..n {
                let num = entry((i / m) as isize, (i % m) as isize, j1, j2);
                let x = if num == Interval::ZERO {
                    Interval::ZERO
                } else {
                    any = true;
                    num.scale(row_scale[i]).try_div(wj).expect("weight > 0")
                };
                mids.push(x.mid());
                rads.push(x.rad());
            }
            let mut tail = Interval::ZERO;
            if gain > 0.0 {
                let (lo1, hi1) = (j1.saturating_sub(d1 - 1), (j1 + d1).min(reach));
                let (lo2, hi2) = (j2.saturating_sub(d2 - 1), (j2 + d2).min(reach));
                for k1 in lo1..hi1 {
                    for k2 in lo2..hi2 {
                        if k1.max(k2) < m {
                            continue;
                        }
                        let num = entry(k1 as isize, k2 as isize, j1, j2);
                        if num != Interval::ZERO {
                            let wk = p[k1.max(k2)].scale(multiplicity_2d(k1, k2));
                            tail += num.abs() * wk;
                        }
                    }
                }
                tail = (tail * Interval::point(gain)).try_div(wj).expect("weight > 0");
            }
            if any || tail != Interval::ZERO {
                ncols += 1;
                tails.push(tail);
            } else {
                mids.truncate(start);
                rads.truncate(start);
            }
        }
    }
    let mut sup = Interval::point((Interval::point(gain) * b.norm()).hi());
    if ncols == 0 {
        return sup;
    }
    // |G v| ≤ |fl(G v̂)| + γₙ |G| |v̂| + |G| rad(v), the last two inflated
    // once more for their own rounding.
    let vm = DMatrix::from_column_slice(n, ncols, &mids);
    let vr = DMatrix::from_column_slice(n, ncols, &rads);
    let ga = g.abs();
    let u = g * &vm;
    let slack = &ga * vm.abs() * (n as f64 * f64::EPSILON) + &ga * vr;
    let gamma = Interval::point((n + 2) as f64 * f64::EPSILON);
    let inflate = (Interval::ONE - gamma).recip().expect("n ε < 1");
    let eta = Interval::point((2 * n + 2) as f64 * f64::MIN_POSITIVE);
    for c in 0..ncols {
        let s: Interval = (0..n)
            .map(|k| w[k] * (Interval::point(u[(k, c)].abs()) + Interval::point(slack[(k, c)]) * inflate + eta))
            .sum::<Interval>()
            + tails[c];
        sup = sup.max(Interval::point(s.hi()));
    }
    sup
}

/// The distinct points `(±j₁, ±j₂)`.
pub fn sign_images(j1: isize, j2: isize) -> impl Iterator<Item = (isize, isize)> {
    let s1: &[isize] = if j1 == 0 { &[1] } else { &[1, -1] };
    let s2: &[isize] = if j2 == 0 { &[1] } else { &[1, -1] };
    s1.iter().flat_map(move |&a| s2.iter().map(move |&b| (a * j1, b * j2)))
}

/// Tail of a [`BlockTailOperator`] beyond the finite block.
#[derive(Clone)]
pub enum TailRule {
    Zero,
    /// Diagonal entries `μ_n` for tail modes `n ≥ m`. In 2D, `entry(n)`
    /// encloses every diagonal entry on the shell `max(k₁,k₂) = n`.
    /// `bound` is a proven upper bound on `sup_{n ≥ m} |μ_n|`.
    Diagonal {
        entry: Arc<dyn Fn(usize) -> Interval + Send + Sync>,
        bound: f64,
    },
    /// 2×2 blocks coupling the two components of mode `n ≥ m` in a product
    /// space. Operators with such tails are normed componentwise.
    Block2 {
        entry: Arc<dyn Fn(usize) -> [[Interval; 2]; 2] + Send + Sync>,
    },
}

impl std::fmt::Debug for TailRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TailRule::Zero => write!(f, "Zero"),
            TailRule::Diagonal { bound, .. } => write!(f, "Diagonal {{ bound: {bound:e} }}"),
            TailRule::Block2 { .. } => write!(f, "Block2"),
        }
    }
}

/// Finite interval block plus an analytically known tail, acting on a
/// weighted ℓ¹ space. `weights[i]` is the weight of finite index `i` (the
/// same index set is used for domain and codomain); tail modes start at `m`.
#[derive(Clone, Debug)]
pub struct BlockTailOperator {
    pub block: IntervalMatrix,
    pub weights: Vec<Interval>,
    pub m: usize,
    pub tail: TailRule,
}

/// Number of tail shells sampled when checking dominance.
const DOMINANCE_SAMPLES: usize = 256;

impl BlockTailOperator {
    pub fn new(block: IntervalMatrix, weights: Vec<Interval>, m: usize, tail: TailRule) -> Result<Self> {
        if block.nrows() != block.ncols() || block.nrows() != weights.len() {
            return Err(Error::Domain(format!(
                "block {}x{} does not match {} weights",
                block.nrows(),
                block.ncols(),
                weights.len()
            )));
        }
        Ok(Self { block, weights, m, tail })
    }

    /// `max_j (1/ω_j) Σ_i |Γ_ij| ω_i` over the finite block.
    pub fn block_norm(&self) -> Interval {
        weighted_column_norm(&self.block, &self.weights, &self.weights)
    }

    /// Operator norm on the weighted ℓ¹ space: `max(K, sup_tail |μ_n|)`.
    pub fn operator_norm(&self) -> Result<Interval> {
        let k = self.block_norm();
        match &self.tail {
            TailRule::Zero => Ok(k),
            TailRule::Diagonal { entry, bound } => {
                let first = entry(self.m).mag();
                if !bound.is_finite() {
                    return Err(Error::Invariant("unbounded diagonal tail".into()));
                }
                for n in self.m..self.m + DOMINANCE_SAMPLES {
                    let v = entry(n).mag();
                    if v > first || v > *bound {
                        return Err(Error::Invariant(format!(
                            "tail not dominated by its first entry: |μ_{n}| = {v:e} > {:e}",
                            first.min(*bound)
                        )));
                    }
                }
                Ok(k.max(Interval::point(bound.max(first))))
            }
            TailRule::Block2 { .. } => Err(Error::Invariant(
                "2x2 block tails act on product spaces; norm the component blocks".into(),
            )),
        }
    }
}

/// `max_j (1/ω_in_j) Σ_i |G_ij| ω_out_i` for a rectangular block.
pub fn weighted_column_norm(g: &IntervalMatrix, w_out: &[Interval], w_in: &[Interval]) -> Interval {
    assert_eq!(g.nrows(), w_out.len());
    assert_eq!(g.ncols(), w_in.len());
    let mut col = vec![Interval::ZERO; g.ncols()];
    for i in 0..g.nrows() {
        let wi = w_out[i];
        for (c, x) in col.iter_mut().zip(g.row(i)) {
            *c += x.abs() * wi;
        }
    }
    col.iter()
        .zip(w_in)
        .map(|(c, w)| c.try_div(*w).expect("weights are positive"))
        .fold(Interval::ZERO, Interval::max)
}

/// `Σ_i |v_i| ω_i`.
pub fn weighted_abs_sum(v: &[Interval], w: &[Interval]) -> Interval {
    v.iter().zip(w).map(|(x, w)| x.abs() * *w).sum()
}

/// Product of a point matrix with an interval vector.
pub fn point_mat_vec(a: &DMatrix<f64>, v: &[Interval]) -> Vec<Interval> {
    assert_eq!(a.ncols(), v.len());
    (0..a.nrows())
        .map(|i| v.iter().enumerate().map(|(j, x)| x.scale(a[(i, j)])).sum())
        .collect()
}

/// `Σ_i ω_i (|G| v)_i` for a point matrix `G` and nonnegative `v`.
pub fn weighted_abs_mat_vec(g: &DMatrix<f64>, v: &[Interval], w: &[Interval]) -> Interval {
    assert_eq!(g.ncols(), v.len());
    assert_eq!(g.nrows(), w.len());
    (0..g.nrows())
        .map(|i| {
            let s: Interval = v.iter().enumerate().map(|(j, x)| x.scale(g[(i, j)].abs())).sum();
            s * w[i]
        })
        .sum()
}

/// Reads a 1D coefficient file: one `k value` pair per line, `#` comments.
pub fn read_coeffs_1d(path: &Path) -> Result<Vec<f64>> {
    let origin = path.display().to_string();
    let f = std::fs::File::open(path)?;
    let mut out = Vec::new();
    for (ln, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        let fields = data_fields(&line);
        if fields.is_empty() {
            continue;
        }
        let parse_err = |msg: &str| Error::Parse { origin: origin.clone(), line: ln + 1, msg: msg.into() };
        if fields.len() != 2 {
            return Err(parse_err("expected `k value`"));
        }
        let k: usize = fields[0].parse().map_err(|_| parse_err("bad index"))?;
        let v: f64 = fields[1].parse().map_err(|_| parse_err("bad value"))?;
        if !v.is_finite() {
            return Err(parse_err("non-finite value"));
        }
        if out.len() <= k {
            out.resize(k + 1, 0.0);
        }
        out[k] = v;
    }
    Ok(out)
}

/// Reads a 2D coefficient file (`k1 k2 value` per line) into a square
/// `n × n` grid, `n` the smallest size holding every listed mode.
pub fn read_coeffs_2d(path: &Path) -> Result<(Vec<f64>, usize)> {
    let origin = path.display().to_string();
    let f = std::fs::File::open(path)?;
    let mut entries = Vec::new();
    let mut n = 0;
    for (ln, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        let fields = data_fields(&line);
        if fields.is_empty() {
            continue;
        }
        let parse_err = |msg: &str| Error::Parse { origin: origin.clone(), line: ln + 1, msg: msg.into() };
        if fields.len() != 3 {
            return Err(parse_err("expected `k1 k2 value`"));
        }
        let k1: usize = fields[0].parse().map_err(|_| parse_err("bad index"))?;
        let k2: usize = fields[1].parse().map_err(|_| parse_err("bad index"))?;
        let v: f64 = fields[2].parse().map_err(|_| parse_err("bad value"))?;
        if !v.is_finite() {
            return Err(parse_err("non-finite value"));
        }
        n = n.max(k1 + 1).max(k2 + 1);
        entries.push((k1, k2, v));
    }
    let mut grid = vec![0.0; n * n];
    for (k1, k2, v) in entries {
        grid[k1 * n + k2] = v;
    }
    Ok((grid, n))
}

fn data_fields(line: &str) -> Vec<&str> {
    let data = line.split('#').next().unwrap_or("");
    data.split_whitespace().collect()
}

/// Formats 1D coefficients in the `k value` text format.
pub fn format_coeffs_1d(a: &[f64]) -> String {
    let mut s = String::new();
    for (k, v) in a.iter().enumerate() {
        writeln!(s, "{k} {v:e}").unwrap();
    }
    s
}

/// Formats an `n × n` grid in the `k1 k2 value` text format.
pub fn format_coeffs_2d(a: &[f64], n: usize) -> String {
    let mut s = String::new();
    for k1 in 0..n {
        for k2 in 0..n {
            writeln!(s, "{k1} {k2} {:e}", a[k1 * n + k2]).unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-13;

    fn pts(x: &[f64]) -> Vec<Interval> {
        x.iter().copied().map(Interval::point).collect()
    }

    #[test]
    fn norm_examples() {
        let a = CosSeq::from_points(&[1.0, 0.0, 0.0], 3.0).unwrap();
        assert!(a.norm().contains(1.0));
        let b = CosSeq::from_points(&[0.0, 1.0], 1.01).unwrap();
        assert!(b.norm().contains(2.0 * 1.01));
        assert!(b.norm().width() < EPS);
        let mut g = vec![0.0; 4];
        g[3] = 1.0; // (1,1) on a 2x2 grid
        let c = Cos2Seq::from_points(&g, (2, 2), 2.0).unwrap();
        assert_eq!(c.norm(), Interval::point(8.0));
    }

    #[test]
    fn weight_below_one_rejected() {
        assert!(CosSeq::from_points(&[1.0], 0.9).is_err());
    }

    #[test]
    fn delta_is_convolution_identity() {
        let b = CosSeq::from_points(&[0.3, -1.0, 2.5], 1.1).unwrap();
        let d = CosSeq::delta(1.1);
        let c = d.convolve(&b);
        assert_eq!(c.coeffs(), b.coeffs());
    }

    #[test]
    fn cosine_squared() {
        // cos x = (e^{ix} + e^{-ix})/2, i.e. a_1 = 1/2.
        let a = CosSeq::from_points(&[0.0, 0.5], 1.0).unwrap();
        let s = a.convolve(&a);
        assert_eq!(s.coeffs(), &pts(&[0.5, 0.0, 0.25])[..]);
    }

    #[test]
    fn even_odd_product_matches_trig_identity() {
        // cos x * (-2 sin x) = -sin 2x. v = Σ i s_k e^{ikx} = -2 Σ s_k sin kx.
        let a = CosSeq::from_points(&[0.0, 0.5], 1.0).unwrap();
        let s = SinSeq::from_points(&[1.0], 1.0).unwrap();
        let p = a.convolve_odd(&s);
        assert_eq!(p.coeffs(), &pts(&[0.0, 0.5])[..]);
    }

    #[test]
    fn dual_pairing_examples() {
        let b = Interval::ONE;
        assert_eq!(dual_pairing_bound(&pts(&[1.0]), b, 1.3), Interval::ONE);
        let nu = 1.25;
        let r = dual_pairing_bound(&pts(&[0.0, 2.0 * nu]), b, nu);
        assert!(r.contains(1.0) && r.width() < EPS);
    }

    #[test]
    fn q_bounds_basic() {
        let zero = CosSeq::from_points(&[0.0, 0.0], 2.0).unwrap();
        assert_eq!(q_bound(&zero, 0), Interval::ZERO);
        let delta = CosSeq::delta(2.0);
        assert_eq!(q_bound(&delta, 0), Interval::ONE);
        assert_eq!(q_hat_bound(&delta, 0, 3), Interval::ZERO);
    }

    #[test]
    fn operator_norm_examples() {
        let w = weights_1d(1.01, 4);
        let id = BlockTailOperator::new(IntervalMatrix::identity(4), w, 4, TailRule::Zero).unwrap();
        assert!(id.operator_norm().unwrap().contains(1.0));

        let m = 10;
        let zero = BlockTailOperator::new(
            IntervalMatrix::zeros(m, m),
            weights_1d(1.01, m),
            m,
            TailRule::Diagonal {
                entry: Arc::new(|n| Interval::ONE.try_div(Interval::point(n as f64)).unwrap()),
                bound: Interval::point(m as f64).recip().unwrap().hi(),
            },
        )
        .unwrap();
        let nrm = zero.operator_norm().unwrap();
        assert!(nrm.contains(0.1) && nrm.width() < EPS);
    }

    #[test]
    fn growing_tail_is_rejected() {
        let op = BlockTailOperator::new(
            IntervalMatrix::zeros(3, 3),
            weights_1d(1.0, 3),
            3,
            TailRule::Diagonal { entry: Arc::new(|n| Interval::point(n as f64)), bound: 3.0 },
        )
        .unwrap();
        assert!(matches!(op.operator_norm(), Err(Error::Invariant(_))));
    }

    #[test]
    fn coefficient_text_round_trip() {
        let dir = std::env::temp_dir().join(format!("seqspace-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p1 = dir.join("a.txt");
        std::fs::write(&p1, "# header\n0 1.5\n2 -0.25 # trailing\n\n").unwrap();
        assert_eq!(read_coeffs_1d(&p1).unwrap(), vec![1.5, 0.0, -0.25]);
        let p2 = dir.join("b.txt");
        std::fs::write(&p2, format_coeffs_2d(&[1.0, 2.0, 3.0, 4.0], 2)).unwrap();
        assert_eq!(read_coeffs_2d(&p2).unwrap(), (vec![1.0, 2.0, 3.0, 4.0], 2));
        std::fs::write(&p2, "0 x 1\n").unwrap();
        assert!(matches!(read_coeffs_2d(&p2), Err(Error::Parse { line: 1, .. })));
    }
}
