//! Randomized invariants over the public API.

use num_bigint::BigInt;
use num_traits::Signed;
use proptest::prelude::*;

use tgrid_core::counting::{f_moebius, f_naive, f_q_naive, GridDims};
use tgrid_core::moebius::MoebiusTable;
use tgrid_core::separability::{is_threshold, verify_witness, Labeling};

fn dims(m: u64, n: u64) -> GridDims {
    GridDims::new(m, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_is_symmetric(m in 2u64..=80, n in 2u64..=80) {
        prop_assert_eq!(f_naive(dims(m, n)), f_naive(dims(n, m)));
    }

    #[test]
    fn evaluators_agree(m in 2u64..=200, n in 2u64..=200) {
        let table = MoebiusTable::sieve(200).unwrap();
        prop_assert_eq!(f_naive(dims(m, n)), f_moebius(dims(m, n), &table).unwrap());
    }

    #[test]
    fn gcd_classes_partition_total_mass(m in 2u64..=30, n in 2u64..=30) {
        let total: BigInt = (1..m.max(n))
            .map(|q| f_q_naive(dims(m, n), q).unwrap())
            .sum();
        let expect = BigInt::from(m) * m * n * n - BigInt::from(m) * n;
        prop_assert_eq!(total, expect);
    }

    #[test]
    fn mertens_prefix_stays_bounded(limit in 1usize..=2_000) {
        let table = MoebiusTable::sieve(2_000).unwrap();
        let s = table.mertens_weighted(limit).unwrap();
        prop_assert!(s.abs() <= num_rational::BigRational::from(BigInt::from(1)));
    }

    #[test]
    fn alpha_within_harmonic_bound(m in 1usize..=300, n in 1u64..=3_000) {
        let table = MoebiusTable::sieve(300).unwrap();
        prop_assert!(table.alpha(m, n).unwrap().within_harmonic_bound());
    }

    #[test]
    fn labeling_text_round_trips(m in 2u64..=5, n in 2u64..=4, mask in 0u64..(1 << 20)) {
        let d = dims(m, n);
        let mask = mask & ((1 << d.cells()) - 1);
        let l = Labeling::from_mask(d, mask).unwrap();
        let back = Labeling::parse(&l.to_string()).unwrap();
        prop_assert_eq!(l, back);
    }

    #[test]
    fn accepted_labelings_have_sound_witnesses(mask in 0u64..(1u64 << 12)) {
        let l = Labeling::from_mask(dims(3, 4), mask).unwrap();
        if let Some(w) = is_threshold(&l) {
            prop_assert!(verify_witness(&l, &w));
        }
    }
}
