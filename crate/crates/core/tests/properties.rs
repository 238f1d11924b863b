mod common;

use bnm_core::glue::{glue, GlueSlot};
use bnm_core::{canonicalize, sample_bnm, Bnm, RngStream, StateVector};
use common::oracle::brute_canonical;
use proptest::prelude::*;

fn bits() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 1..=64)
}

fn machine(max: usize) -> impl Strategy<Value = Bnm> {
    (1..=max, any::<u64>()).prop_map(|(n, seed)| sample_bnm(n, &mut RngStream::new(seed)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn canonical_matches_brute_force(s in bits()) {
        let c = canonicalize(&s).unwrap();
        prop_assert_eq!(c.bits().to_vec(), brute_canonical(&s));
    }

    #[test]
    fn canonical_is_idempotent_and_rotation_invariant(s in bits(), r in 0usize..64) {
        let c = canonicalize(&s).unwrap();
        prop_assert_eq!(&canonicalize(c.bits()).unwrap(), &c);
        let r = r % s.len();
        let mut rotated = s[r..].to_vec();
        rotated.extend_from_slice(&s[..r]);
        prop_assert_eq!(canonicalize(&rotated).unwrap(), c);
    }

    #[test]
    fn repetition_reduces_to_primitive(s in prop::collection::vec(0u8..2, 1..=16), k in 1usize..5) {
        let repeated: Vec<u8> = s.iter().copied().cycle().take(s.len() * k).collect();
        prop_assert_eq!(canonicalize(&repeated).unwrap(), canonicalize(&s).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn glue_preserves_validity_and_rewires_one_port(
        a in machine(8), b in machine(8), node in 0usize..8, port in 0u8..2
    ) {
        let slot = GlueSlot::new(node % b.size(), port);
        let g = glue(&a, &b, slot).unwrap();
        prop_assert!(g.validate().is_ok());
        prop_assert_eq!(g.size(), a.size() + b.size());
        prop_assert_eq!(g.output(), b.output() + a.size());
        prop_assert_eq!(&g.nodes()[..a.size()], a.nodes());

        let mut differing = 0;
        for (orig, glued) in b.nodes().iter().zip(&g.nodes()[a.size()..]) {
            prop_assert_eq!(orig.tt, glued.tt);
            for p in 0..2 {
                if orig.inputs[p] + a.size() != glued.inputs[p] {
                    differing += 1;
                    prop_assert_eq!(glued.inputs[p], a.output());
                }
            }
        }
        prop_assert_eq!(differing, 1);
    }

    #[test]
    fn glued_prefix_follows_first_machine(a in machine(6), b in machine(6), node in 0usize..6, port in 0u8..2) {
        let g = glue(&a, &b, GlueSlot::new(node % b.size(), port)).unwrap();
        let mut sa = StateVector::zeros(a.size());
        let mut sg = StateVector::zeros(g.size());
        for _ in 0..40 {
            sa = a.step(&sa);
            sg = g.step(&sg);
            for i in 0..a.size() {
                prop_assert_eq!(sa.get(i), sg.get(i));
            }
        }
    }

    #[test]
    fn step_is_deterministic(m in machine(12), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed);
        let bits: Vec<bool> = (0..m.size()).map(|_| rng.below(2) == 1).collect();
        let s = StateVector::from_bits(&bits);
        prop_assert_eq!(m.step(&s), m.step(&s));
    }
}
