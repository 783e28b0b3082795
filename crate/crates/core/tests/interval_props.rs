use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigorous_index::Interval;

fn q(x: f64) -> BigRational {
    BigRational::from_f64(x).expect("finite")
}

fn encloses(iv: Interval, exact: &BigRational) -> bool {
    q(iv.lo()) <= *exact && *exact <= q(iv.hi())
}

/// Mixes magnitudes so that both cancellation and wide exponent ranges occur.
fn sample(rng: &mut ChaCha8Rng) -> f64 {
    let mant: f64 = rng.gen_range(-1.0..1.0);
    let exp: i32 = rng.gen_range(-60..60);
    mant * 2f64.powi(exp)
}

fn sample_interval(rng: &mut ChaCha8Rng) -> Interval {
    let a = sample(rng);
    let w = if rng.gen_bool(0.3) { 0.0 } else { sample(rng).abs() };
    Interval::new(a, a + w).unwrap_or(Interval::point(a))
}

fn pick(rng: &mut ChaCha8Rng, x: Interval) -> f64 {
    match rng.gen_range(0..3) {
        0 => x.lo(),
        1 => x.hi(),
        _ => x.mid(),
    }
}

/// Exact results of the four operations on members of the operands must lie
/// in the computed intervals: 250 000 samples per operation.
#[test]
fn containment_against_exact_rationals() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..250_000 {
        let (x, y) = (sample_interval(&mut rng), sample_interval(&mut rng));
        let (a, b) = (pick(&mut rng, x), pick(&mut rng, y));
        let (qa, qb) = (q(a), q(b));
        assert!(encloses(x + y, &(&qa + &qb)), "{x:?} + {y:?}");
        assert!(encloses(x - y, &(&qa - &qb)), "{x:?} - {y:?}");
        assert!(encloses(x * y, &(&qa * &qb)), "{x:?} * {y:?}");
        if !y.contains_zero() {
            assert!(encloses(x.try_div(y).unwrap(), &(&qa / &qb)), "{x:?} / {y:?}");
        }
    }
}

#[test]
fn sqrt_and_powers_enclose() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20_000 {
        let x = sample_interval(&mut rng).abs();
        let s = x.sqrt().unwrap();
        let (lo, hi) = (q(s.lo()), q(s.hi()));
        assert!(&lo * &lo <= q(x.lo()) || s.lo() == 0.0);
        assert!(&hi * &hi >= q(x.hi()));
        let a = pick(&mut rng, x);
        for n in 0..5u32 {
            let exact = num_traits::pow(q(a), n as usize);
            assert!(encloses(x.powi(n), &exact), "{x:?}^{n}");
        }
        let s = Interval::point(a).sqr();
        assert!(encloses(s, &(q(a) * q(a))));
    }
}

#[test]
fn abs_and_mag_of_rationals() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let x = sample_interval(&mut rng);
        let a = pick(&mut rng, x);
        assert!(encloses(x.abs(), &q(a).abs()));
        assert!(q(x.mag()) >= q(a).abs());
        assert!(q(x.mig()) <= q(a).abs());
    }
}

fn arb_interval() -> impl Strategy<Value = Interval> {
    (-1e6f64..1e6, 0f64..1e3).prop_map(|(a, w)| Interval::new(a, a + w).unwrap())
}

fn shrink(x: Interval, t: (f64, f64)) -> Interval {
    let a = x.lo() + t.0 * x.width();
    let b = x.lo() + t.1 * x.width();
    let (a, b) = (a.min(b).max(x.lo()), a.max(b).min(x.hi()));
    Interval::new(a, b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn inclusion_monotone(x in arb_interval(), y in arb_interval(), s in (0f64..1.0, 0f64..1.0), t in (0f64..1.0, 0f64..1.0)) {
        let (xs, ys) = (shrink(x, s), shrink(y, t));
        prop_assert!(xs.subset_of(x));
        prop_assert!((xs + ys).subset_of(x + y));
        prop_assert!((xs - ys).subset_of(x - y));
        prop_assert!((xs * ys).subset_of(x * y));
        prop_assert!(xs.sqr().subset_of(x.sqr()));
        prop_assert!(xs.abs().subset_of(x.abs()));
        if !y.contains_zero() {
            prop_assert!(xs.try_div(ys).unwrap().subset_of(x.try_div(y).unwrap()));
        }
    }

    #[test]
    fn point_operations_are_tight(a in -1e3f64..1e3, b in -1e3f64..1e3) {
        let s = Interval::point(a) + Interval::point(b);
        prop_assert!(s.width() <= 2.0 * f64::EPSILON * (a + b).abs().max(f64::MIN_POSITIVE));
        prop_assert!(s.contains(a + b));
    }
}

#[test]
fn division_by_interval_containing_zero_is_refused() {
    assert!(Interval::ONE.try_div(Interval::new(-1.0, 1.0).unwrap()).is_err());
    assert!(Interval::new(1.0, 0.0).is_err());
    assert!(Interval::new(-1.0, -0.5).unwrap().sqrt().is_err());
}
