use nalgebra::DVector;
use proptest::prelude::*;
use rigorous_index::pipeline::{coeffs_from_entries, newton_solve};
use rigorous_index::prover::{certify, find_r0, p_upper, try_certify, Status};
use rigorous_index::{EquilibriumCertificate, Error, ProblemSpec, RadiiBounds};

fn bounds() -> impl Strategy<Value = RadiiBounds> {
    (1e-16f64..1e-2, 0f64..0.5, 0f64..0.4, 0f64..100.0)
        .prop_map(|(y, z0, z1, z2)| RadiiBounds::from_upper(y, z0, z1, z2).unwrap())
}

proptest! {
    #[test]
    fn radius_is_verified(b in bounds()) {
        if let Ok(r) = find_r0(&b) {
            prop_assert!(r <= 1.0);
            prop_assert!(p_upper(&b, r) < 0.0);
            prop_assert!(r >= b.Y0.lo());
        }
    }

    #[test]
    fn larger_residual_never_shrinks_radius(b in bounds(), f in 1.0f64..100.0) {
        let worse = RadiiBounds::from_upper(b.Y0.hi() * f, b.Z0.hi(), b.Z1.hi(), b.Z2.hi()).unwrap();
        match (find_r0(&b), find_r0(&worse)) {
            (Ok(r), Ok(rw)) => prop_assert!(rw >= r * (1.0 - 1e-6)),
            (Err(_), Ok(_)) => prop_assert!(false, "worse bounds certified while better did not"),
            _ => {}
        }
    }
}

#[test]
fn refuses_without_contraction() {
    let b = RadiiBounds::from_upper(1e-12, 1.0, 0.0, 1.0).unwrap();
    assert!(matches!(find_r0(&b), Err(Error::Certification { .. })));
    let b = RadiiBounds::from_upper(1e-12, 1.5, 0.0, 1.0).unwrap();
    assert!(matches!(find_r0(&b), Err(Error::Certification { bounds: Some(_), .. })));
}

fn cr_state(m: usize) -> (Box<dyn rigorous_index::Problem>, DVector<f64>) {
    let spec = ProblemSpec::Cr { lambda1: 6.0, lambda2: 6.0 };
    let p = spec.build().unwrap();
    let g = coeffs_from_entries(&spec, &[vec![1.0, 0.6], vec![3.0, 0.1]], m).unwrap();
    let a = newton_solve(p.as_ref(), &g, m).unwrap().a;
    (p, a)
}

#[test]
fn certification_is_deterministic_and_round_trips() {
    let (p, a) = cr_state(60);
    let c1 = certify(p.as_ref(), &a, 1.01, 60).unwrap();
    let c2 = certify(p.as_ref(), &a, 1.01, 60).unwrap();
    assert_eq!(c1.to_json().unwrap(), c2.to_json().unwrap());
    let back = EquilibriumCertificate::from_json(&c1.to_json().unwrap()).unwrap();
    assert_eq!(back, c1);
    assert!(back.recheck());
}

#[test]
fn perturbed_state_fails_or_grows() {
    let (p, a) = cr_state(60);
    let good = certify(p.as_ref(), &a, 1.01, 60).unwrap();
    let mut bad = a.clone();
    bad[1] += 0.3;
    let c = try_certify(p.as_ref(), &bad, 1.01, 60).unwrap();
    assert!(c.status == Status::Failed || c.r0.unwrap() > good.r0.unwrap());
    assert!(!c.recheck() || c.status == Status::Certified);
}
