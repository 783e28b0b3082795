use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigorous_index::{Problem, ProblemSpec};

const EPS: f64 = 1e-5;

fn fd_jacobian(p: &dyn Problem, a: &DVector<f64>, m: usize) -> DMatrix<f64> {
    let n = a.len();
    let mut j = DMatrix::zeros(n, n);
    for c in 0..n {
        let mut ap = a.clone();
        let mut am = a.clone();
        ap[c] += EPS;
        am[c] -= EPS;
        let d = (p.residual(&ap, m) - p.residual(&am, m)) / (2.0 * EPS);
        j.set_column(c, &d);
    }
    j
}

fn check(spec: ProblemSpec, m: usize, scale: f64, seed: u64) {
    let p = spec.build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..5 {
        let n = p.dim(m);
        let a = DVector::from_fn(n, |i, _| rng.gen_range(-scale..scale) / (1.0 + i as f64));
        let j = p.jacobian(&a, m);
        let fd = fd_jacobian(p.as_ref(), &a, m);
        let err = (&j - &fd).amax();
        assert!(err <= 1e-6 * j.amax(), "{}: relative error {:e}", spec.id(), err / j.amax());
    }
}

#[test]
fn cr_jacobian() {
    check(ProblemSpec::Cr { lambda1: 6.0, lambda2: 6.0 }, 8, 0.5, 1);
}

#[test]
fn ok_jacobian() {
    check(ProblemSpec::Ok { lambda1: 9.0, lambda2: 9.0, lambda3: 4.5 }, 8, 0.5, 2);
}

#[test]
fn tw_jacobian() {
    let spec = ProblemSpec::Tw { lambda: 12.0, c: 1.0 };
    let p = spec.build().unwrap();
    let m = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = DVector::from_fn(m * m, |i, _| rng.gen_range(-0.5..0.5) / (1.0 + (i / m + i % m) as f64));
    let j = p.jacobian(&a, m);
    let fd = fd_jacobian(p.as_ref(), &a, m);
    assert!((&j - &fd).amax() <= 1e-6 * j.amax());
}

/// The TW and CR Jacobians are symmetric by construction of the weights.
#[test]
fn jacobians_are_symmetric_where_expected() {
    let spec = ProblemSpec::Tw { lambda: 12.0, c: 1.0 };
    let p = spec.build().unwrap();
    let a = DVector::from_fn(16, |i, _| 0.1 * (i as f64).sin());
    let j = p.jacobian(&a, 4);
    assert!((&j - j.transpose()).amax() <= 1e-12 * j.amax());
}
