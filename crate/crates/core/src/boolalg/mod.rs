//! The Boolean algebra of idempotents of a finite ring, Boolean-formula
//! evaluation over it, partitions, the `φ*` transform and the translation
//! of Boolean formulas back into the ring language.

mod compiled;
mod eval;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{BoolFormula, BoolTerm, RingFormula, RingTerm, Var};
use crate::rings::{Elem, FiniteRing};

pub use compiled::{CompiledBoolFormula, Evaluator};
pub use eval::{eval_bool_formula, BoolEvalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoolAlgError {
    #[error("formula has free variable y{var}, outside y0..y{}", .arity.saturating_sub(1))]
    FreeVariableMismatch { var: Var, arity: usize },
    #[error("arity must be at least 1")]
    ZeroArity,
}

/// Algebra elements are addressed by their position in the sorted list of
/// idempotents; the operations are tabulated from the ring operations.
#[derive(Debug, Clone)]
pub struct IdempotentAlgebra {
    ring: FiniteRing,
    elems: Vec<Elem>,
    index_of: Vec<u32>,
    atoms: Vec<u32>,
    meet: Vec<u32>,
    join: Vec<u32>,
    complement: Vec<u32>,
    bot: u32,
    top: u32,
}

impl IdempotentAlgebra {
    pub fn new(ring: &FiniteRing) -> Self {
        let elems = ring.idempotents().to_vec();
        let mut index_of = vec![u32::MAX; ring.size()];
        for (i, e) in elems.iter().enumerate() {
            index_of[e.index()] = i as u32;
        }
        let k = elems.len();
        let idx = |x: Elem| index_of[x.index()];
        let mut meet = Vec::with_capacity(k * k);
        let mut join = Vec::with_capacity(k * k);
        for &e in &elems {
            for &f in &elems {
                let ef = ring.mul(e, f);
                meet.push(idx(ef));
                join.push(idx(ring.sub(ring.add(e, f), ef)));
            }
        }
        let complement = elems.iter().map(|&e| idx(ring.sub(ring.one(), e))).collect();
        let atoms = ring.atoms().iter().map(|&a| idx(a)).collect();
        IdempotentAlgebra {
            ring: ring.clone(),
            bot: idx(ring.zero()),
            top: idx(ring.one()),
            elems,
            index_of,
            atoms,
            meet,
            join,
            complement,
        }
    }

    pub fn ring(&self) -> &FiniteRing {
        &self.ring
    }

    pub fn size(&self) -> usize {
        self.elems.len()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elems
    }

    pub fn atoms(&self) -> Vec<Elem> {
        self.atoms.iter().map(|&i| self.elems[i as usize]).collect()
    }

    pub fn bottom(&self) -> Elem {
        self.elems[self.bot as usize]
    }

    pub fn top(&self) -> Elem {
        self.elems[self.top as usize]
    }

    pub fn contains(&self, x: Elem) -> bool {
        self.index_of.get(x.index()).is_some_and(|&i| i != u32::MAX)
    }

    /// Position of an idempotent in [`elements`](Self::elements).
    pub fn index(&self, x: Elem) -> Option<u32> {
        self.index_of.get(x.index()).copied().filter(|&i| i != u32::MAX)
    }

    pub fn element(&self, i: u32) -> Elem {
        self.elems[i as usize]
    }

    fn pos(&self, x: Elem) -> usize {
        self.index(x).unwrap_or_else(|| panic!("{} is not an idempotent", self.ring.format_elem(x))) as usize
    }

    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.elems[self.meet[self.pos(a) * self.size() + self.pos(b)] as usize]
    }

    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.elems[self.join[self.pos(a) * self.size() + self.pos(b)] as usize]
    }

    pub fn complement(&self, a: Elem) -> Elem {
        self.elems[self.complement[self.pos(a)] as usize]
    }

    pub fn le(&self, a: Elem, b: Elem) -> bool {
        self.meet(a, b) == a
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.bottom(), |acc, x| self.join(acc, x))
    }

    /// `(x ⊕ y, x ⊙ y)` in the associated Boolean ring.
    pub fn boolean_ring_ops(&self, x: Elem, y: Elem) -> (Elem, Elem) {
        let xor = self.join(
            self.meet(x, self.complement(y)),
            self.meet(self.complement(x), y),
        );
        (xor, self.meet(x, y))
    }

    pub fn atoms_below(&self, f: Elem) -> Vec<Elem> {
        self.atoms().into_iter().filter(|&a| self.le(a, f)).collect()
    }

    // Index-level operations for the evaluators.

    #[inline]
    pub fn meet_idx(&self, a: u32, b: u32) -> u32 {
        self.meet[a as usize * self.elems.len() + b as usize]
    }

    #[inline]
    pub fn join_idx(&self, a: u32, b: u32) -> u32 {
        self.join[a as usize * self.elems.len() + b as usize]
    }

    #[inline]
    pub fn complement_idx(&self, a: u32) -> u32 {
        self.complement[a as usize]
    }

    pub fn bot_idx(&self) -> u32 {
        self.bot
    }

    pub fn top_idx(&self) -> u32 {
        self.top
    }

    /// Checks the two defining conditions of a partition in one pass:
    /// each cell is disjoint from the join of the earlier ones, and the
    /// final join is the top element.
    pub fn is_partition_idx(&self, cells: &[u32]) -> bool {
        let mut acc = self.bot;
        for &c in cells {
            if self.meet_idx(acc, c) != self.bot {
                return false;
            }
            acc = self.join_idx(acc, c);
        }
        acc == self.top
    }

    pub fn is_partition(&self, cells: &[Elem]) -> bool {
        match cells.iter().map(|&c| self.index(c)).collect::<Option<Vec<_>>>() {
            Some(idx) => self.is_partition_idx(&idx),
            None => false,
        }
    }

    /// Replaces one entry of the join table. Used by tests that need an
    /// algebra violating the lattice laws.
    #[doc(hidden)]
    pub fn corrupt_join_for_testing(&mut self, a: Elem, b: Elem, value: Elem) {
        let (i, j, v) = (self.pos(a), self.pos(b), self.pos(value) as u32);
        let k = self.size();
        self.join[i * k + j] = v;
        self.join[j * k + i] = v;
    }
}

/// A finite ordered sequence of algebra elements, zero cells allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub cells: Vec<Elem>,
}

impl Partition {
    /// Accepts `cells` only if they form a partition of the top element.
    pub fn new(algebra: &IdempotentAlgebra, cells: Vec<Elem>) -> Option<Partition> {
        algebra.is_partition(&cells).then_some(Partition { cells })
    }

    pub fn encode(&self, ring: &FiniteRing) -> Vec<String> {
        self.cells.iter().map(|&c| ring.format_elem(c)).collect()
    }
}

impl Serialize for Partition {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.cells.serialize(s)
    }
}

/// `Part_{m+1}(y_0, …, y_m)`.
pub fn make_partition_formula(m: usize) -> BoolFormula {
    let vars: Vec<BoolTerm> = (0..=m as Var).map(BoolTerm::Var).collect();
    BoolFormula::partition(&vars)
}

/// `φ*(v_0..v_m) := ∃w_0..w_m (Part(w̄) ∧ ⋀ w_j ≤ v_j ∧ φ(w̄))`, where the
/// `w_j` are numbered above every variable of `φ`.
pub fn phi_star(phi: &BoolFormula, arity: usize) -> Result<BoolFormula, BoolAlgError> {
    if arity == 0 {
        return Err(BoolAlgError::ZeroArity);
    }
    if let Some(&var) = phi.free_variables().iter().find(|&&v| v as usize >= arity) {
        return Err(BoolAlgError::FreeVariableMismatch { var, arity });
    }
    let base = phi.max_var().map_or(0, |v| v + 1).max(arity as Var);
    let ws: Vec<Var> = (0..arity as Var).map(|j| base + j).collect();
    let w_terms: Vec<BoolTerm> = ws.iter().map(|&w| BoolTerm::Var(w)).collect();
    let renamed: BTreeMap<Var, BoolTerm> = (0..arity as Var).zip(w_terms.iter().cloned()).collect();
    let bounds = (0..arity).map(|j| BoolFormula::le(w_terms[j].clone(), BoolTerm::Var(j as Var)));
    let body = BoolFormula::and_all(
        std::iter::once(BoolFormula::partition(&w_terms))
            .chain(bounds)
            .chain(std::iter::once(phi.substitute(&renamed))),
    )
    .expect("nonempty conjunction");
    Ok(BoolFormula::exists_all(&ws, body))
}

fn bool_term_to_ring(t: &BoolTerm) -> RingTerm {
    match t {
        BoolTerm::Var(v) => RingTerm::Var(*v),
        BoolTerm::Bot => RingTerm::Zero,
        BoolTerm::Top => RingTerm::One,
        BoolTerm::Meet(a, b) => RingTerm::mul(bool_term_to_ring(a), bool_term_to_ring(b)),
        BoolTerm::Join(a, b) => {
            let (a, b) = (bool_term_to_ring(a), bool_term_to_ring(b));
            RingTerm::sub(RingTerm::add(a.clone(), b.clone()), RingTerm::mul(a, b))
        }
        BoolTerm::Complement(a) => RingTerm::sub(RingTerm::One, bool_term_to_ring(a)),
    }
}

fn idempotence_guard(v: Var) -> RingFormula {
    RingFormula::eq(RingTerm::mul(RingTerm::Var(v), RingTerm::Var(v)), RingTerm::Var(v))
}

/// Interprets a Boolean formula inside the ring: `y_i` becomes `x_i`,
/// the lattice operations become ring polynomials, and every quantifier
/// is relativized to idempotents.
pub fn bool_to_ring_formula(phi: &BoolFormula) -> RingFormula {
    match phi {
        BoolFormula::Eq(a, b) => RingFormula::eq(bool_term_to_ring(a), bool_term_to_ring(b)),
        BoolFormula::Not(a) => RingFormula::not(bool_to_ring_formula(a)),
        BoolFormula::And(a, b) => RingFormula::and(bool_to_ring_formula(a), bool_to_ring_formula(b)),
        BoolFormula::Or(a, b) => RingFormula::or(bool_to_ring_formula(a), bool_to_ring_formula(b)),
        BoolFormula::Implies(a, b) => {
            RingFormula::implies(bool_to_ring_formula(a), bool_to_ring_formula(b))
        }
        BoolFormula::Exists(v, body) => {
            RingFormula::exists(*v, RingFormula::and(idempotence_guard(*v), bool_to_ring_formula(body)))
        }
        BoolFormula::Forall(v, body) => RingFormula::forall(
            *v,
            RingFormula::implies(idempotence_guard(*v), bool_to_ring_formula(body)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_bool_formula, parse_ring_formula};

    fn z(n: u32) -> FiniteRing {
        FiniteRing::modular(n).unwrap()
    }

    #[test]
    fn algebra_of_z6() {
        let b = IdempotentAlgebra::new(&z(6));
        assert_eq!(b.size(), 4);
        assert_eq!(b.atoms(), vec![Elem(3), Elem(4)]);
        assert_eq!(b.meet(Elem(3), Elem(4)), Elem(0));
        assert_eq!(b.join(Elem(3), Elem(4)), Elem(1));
        assert_eq!(b.complement(Elem(3)), Elem(4));
        assert_eq!(b.boolean_ring_ops(Elem(3), Elem(4)), (Elem(1), Elem(0)));
        for &x in b.elements() {
            assert_eq!(b.boolean_ring_ops(x, x), (Elem(0), x));
            assert_eq!(b.boolean_ring_ops(x, Elem(0)), (x, Elem(0)));
        }
    }

    #[test]
    fn algebra_sizes() {
        let b = IdempotentAlgebra::new(&z(60));
        assert_eq!(b.size(), 8);
        assert_eq!(b.atoms(), vec![Elem(36), Elem(40), Elem(45)]);
        assert_eq!(IdempotentAlgebra::new(&z(9)).size(), 2);
    }

    #[test]
    fn partitions() {
        let b = IdempotentAlgebra::new(&z(6));
        assert!(b.is_partition(&[Elem(3), Elem(4)]));
        assert!(!b.is_partition(&[Elem(3), Elem(3)]));
        assert!(b.is_partition(&[Elem(0), Elem(1), Elem(0)]));
        assert!(!b.is_partition(&[Elem(1), Elem(3)]));
        assert!(!b.is_partition(&[Elem(2)]));
        let p = Partition::new(&b, vec![Elem(4), Elem(0), Elem(3)]).unwrap();
        assert_eq!(p.encode(b.ring()), vec!["4", "0", "3"]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[4,0,3]");
    }

    #[test]
    fn partition_formulas() {
        assert_eq!(make_partition_formula(0).to_string(), "y0 = 1");
        assert_eq!(make_partition_formula(1).to_string(), "y0 v y1 = 1 & y0 ^ y1 = 0");
        let p2 = make_partition_formula(2).to_string();
        assert_eq!(p2.matches(" = 0").count(), 3);
        assert_eq!(p2.matches(" = 1").count(), 1);
    }

    #[test]
    fn phi_star_shape_and_errors() {
        let phi = parse_bool_formula("y0 = 1").unwrap();
        let star = phi_star(&phi, 1).unwrap();
        assert_eq!(star.to_string(), "E y1. y1 = 1 & y1 <= y0 & y1 = 1");
        assert!(matches!(
            phi_star(&parse_bool_formula("y3 = 1").unwrap(), 2),
            Err(BoolAlgError::FreeVariableMismatch { var: 3, arity: 2 })
        ));
        assert_eq!(phi_star(&phi, 0), Err(BoolAlgError::ZeroArity));
    }

    #[test]
    fn bool_to_ring_examples() {
        let t = |s: &str| bool_to_ring_formula(&parse_bool_formula(s).unwrap());
        assert_eq!(t("y0 = 1"), parse_ring_formula("x0 = 1").unwrap());
        assert_eq!(t("~y0 = y1"), parse_ring_formula("1 - x0 = x1").unwrap());
        assert_eq!(t("E y0. y0 = 0"), parse_ring_formula("E x0. x0*x0 = x0 & x0 = 0").unwrap());
        assert_eq!(
            t("y0 v y1 = 1"),
            parse_ring_formula("x0 + x1 - x0*x1 = 1").unwrap()
        );
    }
}
