mod common;

use common::{env_from, ring_formula, small_ring};
use fvring::boolalg::IdempotentAlgebra;
use fvring::formula::{RingFormula, RingTerm};
use fvring::semantics::{all_assignments, boolean_value, boolean_value_batch, eval_direct, localize};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn boolean_values_respect_connectives(
        ring in small_ring(),
        a in ring_formula(2),
        b in ring_formula(2),
        raw in prop::collection::vec(any::<u32>(), 2),
    ) {
        let alg = IdempotentAlgebra::new(&ring);
        let env = env_from(&ring, &raw);
        let bv = |f: &RingFormula| boolean_value(&ring, f, &env).unwrap().value;
        let (va, vb) = (bv(&a), bv(&b));
        prop_assert_eq!(bv(&RingFormula::and(a.clone(), b.clone())), alg.meet(va, vb));
        prop_assert_eq!(bv(&RingFormula::not(a.clone())), alg.complement(va));
        prop_assert_eq!(bv(&RingFormula::or(a.clone(), b.clone())), alg.join(va, vb));
    }

    #[test]
    fn batch_matches_single(ring in small_ring(), fs in prop::collection::vec(ring_formula(2), 1..4), raw in prop::collection::vec(any::<u32>(), 2)) {
        let env = env_from(&ring, &raw);
        let batch = boolean_value_batch(&ring, &fs, &env).unwrap();
        for (f, got) in fs.iter().zip(batch) {
            let single = boolean_value(&ring, f, &env).unwrap();
            prop_assert_eq!(got.value, single.value);
            prop_assert_eq!(got.atoms, single.atoms);
        }
    }

    /// The Boolean value records which stalks satisfy the formula at the
    /// localized assignment.
    #[test]
    fn boolean_value_lists_satisfying_stalks(ring in small_ring(), f in ring_formula(2), raw in prop::collection::vec(any::<u32>(), 2)) {
        let env = env_from(&ring, &raw);
        let bv = boolean_value(&ring, &f, &env).unwrap();
        let expected: Vec<_> = ring
            .atom_stalks()
            .iter()
            .zip(ring.atoms())
            .filter(|(s, _)| eval_direct(&s.ring, &f, &localize(s, &env)).unwrap())
            .map(|(_, &e)| e)
            .collect();
        prop_assert_eq!(bv.atoms, expected);
    }

    #[test]
    fn derived_connectives(ring in small_ring(), a in ring_formula(2), b in ring_formula(2), raw in prop::collection::vec(any::<u32>(), 2)) {
        let env = env_from(&ring, &raw);
        let ev = |f: &RingFormula| eval_direct(&ring, f, &env).unwrap();
        let (x, y) = (ev(&a), ev(&b));
        prop_assert_eq!(ev(&RingFormula::or(a.clone(), b.clone())), x || y);
        prop_assert_eq!(ev(&RingFormula::implies(a.clone(), b.clone())), !x || y);
        prop_assert_eq!(ev(&RingFormula::forall(0, a.clone())), ev(&RingFormula::not(RingFormula::exists(0, RingFormula::not(a.clone())))));
        prop_assert_eq!(ev(&a.canonicalize()), x);
    }

    #[test]
    fn quantifiers_range_over_the_carrier(ring in small_ring(), t in common::ring_term(2), raw in prop::collection::vec(any::<u32>(), 2)) {
        let env = env_from(&ring, &raw);
        let atom = RingFormula::eq(t, RingTerm::Var(1));
        let witnesses = ring.elements().filter(|&y| {
            let mut e = env.clone();
            e.insert(1, y);
            eval_direct(&ring, &atom, &e).unwrap()
        }).count();
        prop_assert_eq!(eval_direct(&ring, &RingFormula::exists(1, atom.clone()), &env).unwrap(), witnesses > 0);
        prop_assert_eq!(eval_direct(&ring, &RingFormula::forall(1, atom), &env).unwrap(), witnesses == ring.size());
    }

    #[test]
    fn assignments_are_exhaustive(ring in small_ring(), k in 0usize..3) {
        let vars: Vec<u32> = (0..k as u32).collect();
        let all = all_assignments(&ring, &vars);
        prop_assume!(ring.size().pow(k as u32) <= 4096);
        prop_assert_eq!(all.len(), ring.size().pow(k as u32));
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), all.len());
    }
}
