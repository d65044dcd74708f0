mod common;

use std::collections::BTreeMap;

use common::small_ring;
use fvring::boolalg::{eval_bool_formula, make_partition_formula, phi_star, CompiledBoolFormula, Evaluator, IdempotentAlgebra};
use fvring::formula::{BoolFormula, BoolTerm, Var};
use fvring::rings::Elem;
use proptest::prelude::*;

fn bool_term(vars: Var) -> impl Strategy<Value = BoolTerm> {
    let leaf = prop_oneof![
        4 => (0..vars).prop_map(BoolTerm::Var),
        1 => Just(BoolTerm::Bot),
        1 => Just(BoolTerm::Top),
    ];
    leaf.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| BoolTerm::meet(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| BoolTerm::join(a, b)),
            inner.prop_map(BoolTerm::complement),
        ]
    })
}

fn bool_formula(vars: Var, quantifiers: bool) -> impl Strategy<Value = BoolFormula> {
    let atom = prop_oneof![
        (bool_term(vars), bool_term(vars)).prop_map(|(a, b)| BoolFormula::eq(a, b)),
        (bool_term(vars), bool_term(vars)).prop_map(|(a, b)| BoolFormula::le(a, b)),
    ];
    atom.prop_recursive(3, 12, 2, move |inner| {
        let q = if quantifiers { 1 } else { 0 };
        prop_oneof![
            2 => inner.clone().prop_map(BoolFormula::not),
            2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| BoolFormula::and(a, b)),
            2 => (inner.clone(), inner.clone()).prop_map(|(a, b)| BoolFormula::or(a, b)),
            q => (0..vars, inner.clone()).prop_map(|(v, a)| BoolFormula::exists(v, a)),
            q => (0..vars, inner).prop_map(|(v, a)| BoolFormula::forall(v, a)),
        ]
    })
}

fn env_over(alg: &IdempotentAlgebra, raw: &[usize]) -> BTreeMap<Var, Elem> {
    raw.iter().enumerate().map(|(i, &k)| (i as Var, alg.elements()[k % alg.size()])).collect()
}

/// Every sequence of `len` algebra elements.
fn tuples(alg: &IdempotentAlgebra, len: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| alg.elements().iter().map(move |&x| [t.clone(), vec![x]].concat()))
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn boolean_algebra_laws(ring in small_ring(), a in any::<usize>(), b in any::<usize>(), c in any::<usize>()) {
        let alg = IdempotentAlgebra::new(&ring);
        let el = |k: usize| alg.elements()[k % alg.size()];
        let (a, b, c) = (el(a), el(b), el(c));
        prop_assert_eq!(alg.meet(a, alg.join(a, b)), a);
        prop_assert_eq!(alg.join(a, alg.meet(a, b)), a);
        prop_assert_eq!(alg.meet(a, alg.join(b, c)), alg.join(alg.meet(a, b), alg.meet(a, c)));
        prop_assert_eq!(alg.join(a, alg.complement(a)), alg.top());
        prop_assert_eq!(alg.meet(a, alg.complement(a)), alg.bottom());
        prop_assert_eq!(alg.complement(alg.meet(a, b)), alg.join(alg.complement(a), alg.complement(b)));
        prop_assert_eq!(alg.le(a, b), alg.meet(a, b) == a);
        // Meet is the ring product of idempotents.
        prop_assert_eq!(alg.meet(a, b), ring.mul(a, b));
    }

    #[test]
    fn compiled_evaluation_matches_reference(ring in small_ring(), phi in bool_formula(3, true), raw in prop::collection::vec(any::<usize>(), 3)) {
        let alg = IdempotentAlgebra::new(&ring);
        prop_assume!(alg.size() <= 16);
        let env = env_over(&alg, &raw);
        let code = CompiledBoolFormula::compile(&phi);
        let fast = Evaluator::new(&code, &alg).eval(&env).unwrap();
        prop_assert_eq!(fast, eval_bool_formula(&alg, &phi, &env).unwrap(), "{}", phi);
    }

    #[test]
    fn partition_check_matches_definition(ring in small_ring(), raw in prop::collection::vec(any::<usize>(), 1..5)) {
        let alg = IdempotentAlgebra::new(&ring);
        let cells: Vec<Elem> = raw.iter().map(|&k| alg.elements()[k % alg.size()]).collect();
        let disjoint = cells.iter().enumerate().all(|(i, &a)| cells[i + 1..].iter().all(|&b| alg.meet(a, b) == alg.bottom()));
        let covers = alg.join_all(cells.iter().copied()) == alg.top();
        prop_assert_eq!(alg.is_partition(&cells), disjoint && covers);
        let part = make_partition_formula(cells.len() - 1);
        let env: BTreeMap<Var, Elem> = cells.iter().enumerate().map(|(i, &c)| (i as Var, c)).collect();
        prop_assert_eq!(eval_bool_formula(&alg, &part, &env).unwrap(), disjoint && covers);
    }

    /// `φ*(v̄)` holds exactly when some partition `w̄` with `w_j ≤ v_j`
    /// satisfies `φ`, checked by listing every candidate `w̄`.
    #[test]
    fn phi_star_against_enumeration(ring in small_ring(), phi in bool_formula(2, false), raw in prop::collection::vec(any::<usize>(), 2)) {
        let alg = IdempotentAlgebra::new(&ring);
        prop_assume!(alg.size() <= 8);
        let env = env_over(&alg, &raw);
        let star = phi_star(&phi, 2).unwrap();
        let expected = tuples(&alg, 2).into_iter().any(|w| {
            let w_env: BTreeMap<Var, Elem> = w.iter().enumerate().map(|(i, &x)| (i as Var, x)).collect();
            alg.is_partition(&w)
                && w.iter().zip(env.values()).all(|(&wj, &vj)| alg.le(wj, vj))
                && eval_bool_formula(&alg, &phi, &w_env).unwrap()
        });
        prop_assert_eq!(eval_bool_formula(&alg, &star, &env).unwrap(), expected, "{}", phi);
    }
}
