use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigorous_index::interval::{Interval, IntervalMatrix};
use rigorous_index::seqspace::{
    convolve_even, convolve_even_2d, convolve_even_odd, q_bound, q_hat_bound, coupling_bound_2d, tail_coupling_bound_2d, weights_1d,
    weights_2d, BlockTailOperator, Cos2Seq, CosSeq, TailRule,
};

const NUS: [f64; 3] = [1.0, 1.01, 1.1];

/// Symmetric extension to `Z` (or the odd one when `odd`).
fn extend(a: &[f64], odd: bool) -> HashMap<i64, f64> {
    let mut m = HashMap::new();
    for (k, x) in a.iter().enumerate() {
        let k = k as i64;
        if odd && k == 0 {
            continue;
        }
        m.insert(k, *x);
        m.insert(-k, if odd { -x } else { *x });
    }
    m
}

/// `(a * b)_k = Σ_{i + j = k} a_i b_j` over all of `Z`.
fn brute_conv(a: &HashMap<i64, f64>, b: &HashMap<i64, f64>, k: i64) -> f64 {
    a.iter().map(|(i, x)| x * b.get(&(k - i)).copied().unwrap_or(0.0)).sum()
}

fn brute_conv_2d(a: &[f64], na: usize, b: &[f64], nb: usize, k: (i64, i64)) -> f64 {
    let get = |v: &[f64], n: usize, i: i64, j: i64| {
        let (i, j) = (i.unsigned_abs() as usize, j.unsigned_abs() as usize);
        if i < n && j < n {
            v[i * n + j]
        } else {
            0.0
        }
    };
    let r = na as i64;
    let mut s = 0.0;
    for i1 in -r..=r {
        for i2 in -r..=r {
            s += get(a, na, i1, i2) * get(b, nb, k.0 - i1, k.1 - i2);
        }
    }
    s
}

fn int_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-9..=9) as f64).collect()
}

#[test]
fn convolution_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..300 {
        let (na, nb) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let (a, b) = (int_vec(&mut rng, na), int_vec(&mut rng, nb));
        let c = convolve_even(&a, &b);
        assert_eq!(c.len(), na + nb - 1);
        let (ea, eb) = (extend(&a, false), extend(&b, false));
        for k in 0..(na + nb + 2) {
            let want = brute_conv(&ea, &eb, k as i64);
            assert_eq!(c.get(k).copied().unwrap_or(0.0), want, "k = {k}");
        }
        let nb = nb.max(2);
        let s = int_vec(&mut rng, nb);
        let c = convolve_even_odd(&a, &s);
        let es = extend(&s, true);
        for k in 1..c.len() {
            assert_eq!(c[k], brute_conv(&ea, &es, k as i64), "odd k = {k}");
        }
    }
}

#[test]
fn convolution_2d_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let (na, nb) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let (a, b) = (int_vec(&mut rng, na * na), int_vec(&mut rng, nb * nb));
        let (c, (n1, n2)) = convolve_even_2d(&a, (na, na), &b, (nb, nb));
        assert_eq!((n1, n2), (na + nb - 1, na + nb - 1));
        for k1 in 0..n1 {
            for k2 in 0..n2 {
                assert_eq!(c[k1 * n2 + k2], brute_conv_2d(&a, na, &b, nb, (k1 as i64, k2 as i64)));
            }
        }
    }
}

fn random_cos(rng: &mut ChaCha8Rng, nu: f64) -> CosSeq {
    let n = rng.gen_range(1..=12);
    let c: Vec<f64> = (0..n).map(|k| rng.gen_range(-1.0..1.0) / (1.0 + k as f64)).collect();
    CosSeq::from_points(&c, nu).unwrap()
}

/// `‖a * b‖ ≤ ‖a‖ ‖b‖` on 500 random pairs for each weight.
#[test]
fn banach_algebra_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for nu in NUS {
        for _ in 0..500 {
            let (a, b) = (random_cos(&mut rng, nu), random_cos(&mut rng, nu));
            let lhs = a.convolve(&b).norm();
            let rhs = a.norm() * b.norm();
            assert!(lhs.lo() <= rhs.hi(), "ν = {nu}: {lhs:?} > {rhs:?}");
        }
        for _ in 0..50 {
            let n = rng.gen_range(1..=5);
            let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (a, b) = (Cos2Seq::from_points(&a, (n, n), nu).unwrap(), Cos2Seq::from_points(&b, (n, n), nu).unwrap());
            assert!(a.convolve(&b).norm().lo() <= (a.norm() * b.norm()).hi());
        }
    }
}

/// Extreme points of the unit ball are `±E_j/‖E_j‖`, so a sup over the
/// ball of a linear functional is a max over `j`.
#[test]
fn q_bounds_match_basis_sup() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for nu in NUS {
        for _ in 0..200 {
            let b = random_cos(&mut rng, nu);
            let bm: Vec<f64> = b.mid();
            let eb = extend(&bm, false);
            let k = rng.gen_range(0..15usize);
            let m = rng.gen_range(1..8usize);
            let w = weights_1d(nu, 60);
            let (mut full, mut tail) = (0.0f64, 0.0f64);
            for j in 0..60usize {
                let mut e = vec![0.0; j + 1];
                e[j] = 1.0;
                let v = brute_conv(&eb, &extend(&e, false), k as i64).abs() / w[j].mid();
                full = full.max(v);
                if j >= m {
                    tail = tail.max(v);
                }
            }
            let (q, qh) = (q_bound(&b, k), q_hat_bound(&b, k, m));
            assert!(q.hi() >= full * (1.0 - 1e-12) && q.lo() <= full * (1.0 + 1e-12) + 1e-300, "{q:?} vs {full}");
            assert!(qh.hi() >= tail * (1.0 - 1e-12) && qh.lo() <= tail * (1.0 + 1e-12) + 1e-300, "{qh:?} vs {tail}");
            assert!(qh.lo() <= q.hi());
        }
    }
}

fn diag_tail(c: f64) -> TailRule {
    TailRule::Diagonal { entry: Arc::new(move |n| Interval::point(c / (1.0 + n as f64))), bound: c / 5.0 }
}

/// The induced norm on weighted ℓ¹ is the largest weighted column sum.
#[test]
fn operator_norm_matches_basis_sup() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for nu in NUS {
        for _ in 0..200 {
            let g = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-2.0..2.0));
            let c = rng.gen_range(0.0..20.0);
            let w = weights_1d(nu, 4);
            let op = BlockTailOperator::new(IntervalMatrix::from_points(&g), w.clone(), 4, diag_tail(c)).unwrap();
            let mut sup = 0.0f64;
            for j in 0..4 {
                let col: f64 = (0..4).map(|i| g[(i, j)].abs() * w[i].mid()).sum();
                sup = sup.max(col / w[j].mid());
            }
            for n in 4..400 {
                sup = sup.max(c / (1.0 + n as f64));
            }
            let norm = op.operator_norm().unwrap();
            assert!(norm.hi() >= sup * (1.0 - 1e-12));
            assert!(norm.lo() <= sup * (1.0 + 1e-12));
        }
    }
}

/// Brute force of the 2D tail coupling: explicit columns `π(b * E_j)`.
#[test]
fn tail_coupling_matches_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for nu in [1.0, 1.1] {
        for _ in 0..10 {
            let m = 3;
            let n = m * m;
            let nb = 2 * m - 1;
            let bv: Vec<f64> = (0..nb * nb).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = Cos2Seq::from_points(&bv, (nb, nb), nu).unwrap();
            let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let scale: Vec<f64> = (0..n).map(|i| rigorous_index::seqspace::multiplicity_2d(i / m, i % m)).collect();
            let w = weights_2d(nu, m, m);
            let got = tail_coupling_bound_2d(&g, &b, m, &scale, &w);
            let mut sup = 0.0f64;
            for j1 in 0..4 * m {
                for j2 in 0..4 * m {
                    if j1.max(j2) < m {
                        continue;
                    }
                    let mut e = vec![0.0; (j1.max(j2) + 1).pow(2)];
                    let ne = j1.max(j2) + 1;
                    e[j1 * ne + j2] = 1.0;
                    let norm_e = rigorous_index::seqspace::multiplicity_2d(j1, j2) * nu.powi(j1.max(j2) as i32);
                    let col: Vec<f64> = (0..n)
                        .map(|i| brute_conv_2d(&e, ne, &bv, nb, ((i / m) as i64, (i % m) as i64)) * scale[i] / norm_e)
                        .collect();
                    let s: f64 = (0..n).map(|k| w[k].mid() * (0..n).map(|i| g[(k, i)] * col[i]).sum::<f64>().abs()).sum();
                    sup = sup.max(s);
                }
            }
            assert!(got.hi() >= sup * (1.0 - 1e-12), "{got:?} < {sup}");
            assert!(got.hi() <= sup * (1.0 + 1e-10));
        }
    }
}

/// Same with finite columns and a tail gain: each column adds
/// `gain · ‖(1 − π)(b * E_j)‖ / ‖E_j‖`.
#[test]
fn coupling_with_tail_gain_matches_columns() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for nu in [1.0, 1.1] {
        for finite in [false, true] {
            let m = 3;
            let n = m * m;
            let nb = m;
            let bv: Vec<f64> = (0..nb * nb).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = Cos2Seq::from_points(&bv, (nb, nb), nu).unwrap();
            let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let scale: Vec<f64> = (0..n).map(|i| rigorous_index::seqspace::multiplicity_2d(i / m, i % m)).collect();
            let w = weights_2d(nu, m, m);
            let gain = 0.3;
            let got = coupling_bound_2d(&g, &b, m, &scale, &w, Interval::point(gain), finite);
            let weight = |k1: usize, k2: usize| rigorous_index::seqspace::multiplicity_2d(k1, k2) * nu.powi(k1.max(k2) as i32);
            let mut sup = gain * b.norm().mid();
            for j1 in 0..4 * m {
                for j2 in 0..4 * m {
                    if !finite && j1.max(j2) < m {
                        continue;
                    }
                    let ne = j1.max(j2) + 1;
                    let mut e = vec![0.0; ne * ne];
                    e[j1 * ne + j2] = 1.0;
                    let conv = |k1: usize, k2: usize| brute_conv_2d(&e, ne, &bv, nb, (k1 as i64, k2 as i64));
                    let fin: f64 = (0..n)
                        .map(|k| w[k].mid() * (0..n).map(|i| g[(k, i)] * conv(i / m, i % m) * scale[i]).sum::<f64>().abs())
                        .sum();
                    let mut tail = 0.0;
                    for k1 in 0..ne + nb {
                        for k2 in 0..ne + nb {
                            if k1.max(k2) >= m {
                                tail += weight(k1, k2) * conv(k1, k2).abs();
                            }
                        }
                    }
                    sup = sup.max((fin + gain * tail) / weight(j1, j2));
                }
            }
            assert!(got.hi() >= sup * (1.0 - 1e-12), "{got:?} < {sup}");
            assert!(got.hi() <= sup * (1.0 + 1e-10), "{got:?} > {sup}");
        }
    }
}

proptest! {
    #[test]
    fn delta_is_identity(c in proptest::collection::vec(-10i32..10, 1..8)) {
        let a: Vec<f64> = c.iter().map(|x| *x as f64).collect();
        prop_assert_eq!(convolve_even(&a, &[1.0]), a);
    }

    #[test]
    fn convolution_commutes(a in proptest::collection::vec(-10i32..10, 1..7), b in proptest::collection::vec(-10i32..10, 1..7)) {
        let a: Vec<f64> = a.iter().map(|x| *x as f64).collect();
        let b: Vec<f64> = b.iter().map(|x| *x as f64).collect();
        prop_assert_eq!(convolve_even(&a, &b), convolve_even(&b, &a));
    }
}
