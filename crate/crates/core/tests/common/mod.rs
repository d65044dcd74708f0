//! Strategies shared by the property tests.
#![allow(dead_code)]

use fvring::formula::{RingFormula, RingTerm, Var};
use fvring::rings::{Elem, FiniteRing};
use fvring::semantics::Assignment;
use proptest::prelude::*;

pub fn z(n: u32) -> FiniteRing {
    FiniteRing::modular(n).unwrap()
}

pub fn product(ns: &[u32]) -> FiniteRing {
    FiniteRing::product(ns.iter().map(|&n| z(n)).collect()).unwrap()
}

/// Residue rings up to 36 and products of two or three small residue rings.
pub fn small_ring() -> impl Strategy<Value = FiniteRing> {
    prop_oneof![
        (2u32..=36).prop_map(z),
        (2u32..=6, 2u32..=6).prop_map(|(a, b)| product(&[a, b])),
        (2u32..=3, 2u32..=3, 2u32..=3).prop_map(|(a, b, c)| product(&[a, b, c])),
    ]
}

pub fn ring_term(vars: Var) -> impl Strategy<Value = RingTerm> {
    let leaf = prop_oneof![
        3 => (0..vars).prop_map(RingTerm::Var),
        1 => Just(RingTerm::Zero),
        1 => Just(RingTerm::One),
        1 => (2u64..4).prop_map(RingTerm::numeral),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RingTerm::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RingTerm::sub(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| RingTerm::mul(a, b)),
        ]
    })
}

/// Formulas over `x0..x(vars-1)` with every connective, including the
/// derived ones.
pub fn ring_formula(vars: Var) -> impl Strategy<Value = RingFormula> {
    let atom = (ring_term(vars), ring_term(vars)).prop_map(|(a, b)| RingFormula::eq(a, b));
    atom.prop_recursive(3, 10, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(RingFormula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RingFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RingFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RingFormula::implies(a, b)),
            (0..vars, inner.clone()).prop_map(|(v, a)| RingFormula::exists(v, a)),
            (0..vars, inner).prop_map(|(v, a)| RingFormula::forall(v, a)),
        ]
    })
}

/// Binds every variable below `vars`, reducing the raw values into the ring.
pub fn env_from(ring: &FiniteRing, raw: &[u32]) -> Assignment {
    raw.iter().enumerate().map(|(i, &x)| (i as Var, Elem(x % ring.size() as u32))).collect()
}

/// Idempotents found by squaring every element.
pub fn brute_idempotents(ring: &FiniteRing) -> Vec<Elem> {
    ring.elements().filter(|&x| ring.mul(x, x) == x).collect()
}

/// Minimal nonzero idempotents, with `f ≤ e` meaning `fe = f`.
pub fn brute_atoms(ring: &FiniteRing) -> Vec<Elem> {
    let ids = brute_idempotents(ring);
    ids.iter()
        .copied()
        .filter(|&e| e != ring.zero())
        .filter(|&e| !ids.iter().any(|&f| f != ring.zero() && f != e && ring.mul(f, e) == f))
        .collect()
}
