use std::collections::BTreeMap;

use proptest::prelude::*;
use rigorous_index::forcing::{forcing_lower_bound, ForcingInput};

fn input(zeta: &[(i64, u64)], beta: &[(i64, u64)]) -> ForcingInput {
    ForcingInput { zeta: zeta.iter().copied().collect(), beta: beta.iter().copied().collect(), provenance: String::new() }
}

#[test]
fn reference_bounds() {
    let cr = forcing_lower_bound(&ForcingInput::from_slices(&[2, 2, 2, 1], &[1, 0, 0, 0]));
    assert_eq!(cr.lower_bound, 3);
    let ok = forcing_lower_bound(&ForcingInput::from_slices(&[4, 4, 1], &[1, 0, 0]));
    assert_eq!(ok.lower_bound, 4);
    let tw = input(
        &[(0, 2), (2, 8), (3, 8), (4, 8), (5, 8), (6, 12), (7, 8), (8, 6), (10, 4), (11, 4), (12, 2), (13, 1)],
        &[(0, 1)],
    );
    let r = forcing_lower_bound(&tw);
    assert_eq!(r.lower_bound, 35);
    assert!(!r.half_integral);
    assert_eq!(r.unattached_caps, BTreeMap::from([(0, 1)]));
}

fn arb_map() -> impl Strategy<Value = BTreeMap<i64, u64>> {
    proptest::collection::btree_map(-3i64..15, 0u64..20, 0..8)
}

proptest! {
    #[test]
    fn monotone_in_zeta(z in arb_map(), b in arb_map(), k in -3i64..15, d in 1u64..5) {
        let base = forcing_lower_bound(&ForcingInput { zeta: z.clone(), beta: b.clone(), provenance: String::new() });
        let mut z2 = z;
        *z2.entry(k).or_insert(0) += d;
        let more = forcing_lower_bound(&ForcingInput { zeta: z2, beta: b, provenance: String::new() });
        prop_assert!(more.lower_bound >= base.lower_bound);
    }

    #[test]
    fn antitone_in_beta(z in arb_map(), b in arb_map(), k in -3i64..15, d in 1u64..5) {
        let base = forcing_lower_bound(&ForcingInput { zeta: z.clone(), beta: b.clone(), provenance: String::new() });
        let mut b2 = b;
        *b2.entry(k).or_insert(0) += d;
        let less = forcing_lower_bound(&ForcingInput { zeta: z, beta: b2, provenance: String::new() });
        prop_assert!(less.lower_bound <= base.lower_bound);
    }

    #[test]
    fn label_permutation_invariant(z in arb_map(), b in arb_map(), shift in -50i64..50, flip: bool) {
        let relabel = |m: &BTreeMap<i64, u64>| -> BTreeMap<i64, u64> {
            m.iter().map(|(k, v)| (if flip { -k } else { *k } + shift, *v)).collect()
        };
        let r0 = forcing_lower_bound(&ForcingInput { zeta: z.clone(), beta: b.clone(), provenance: String::new() });
        let r1 = forcing_lower_bound(&ForcingInput { zeta: relabel(&z), beta: relabel(&b), provenance: String::new() });
        prop_assert_eq!(r0.lower_bound, r1.lower_bound);
        prop_assert_eq!(r0.half_integral, r1.half_integral);
    }
}
