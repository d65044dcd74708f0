//! Terms and formulas of the language of Boolean algebras.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::ring::Var;

/// A term over a Boolean algebra. Variables print as `y<index>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolTerm {
    Var(Var),
    Bot,
    Top,
    Meet(Arc<BoolTerm>, Arc<BoolTerm>),
    Join(Arc<BoolTerm>, Arc<BoolTerm>),
    Complement(Arc<BoolTerm>),
}

impl BoolTerm {
    pub fn var(index: Var) -> Self {
        BoolTerm::Var(index)
    }

    pub fn meet(left: BoolTerm, right: BoolTerm) -> Self {
        BoolTerm::Meet(Arc::new(left), Arc::new(right))
    }

    pub fn join(left: BoolTerm, right: BoolTerm) -> Self {
        BoolTerm::Join(Arc::new(left), Arc::new(right))
    }

    pub fn complement(inner: BoolTerm) -> Self {
        BoolTerm::Complement(Arc::new(inner))
    }

    /// Join of a list; `Bot` when empty.
    ///
    /// The tree is balanced (left half rounded up) so that joins over many
    /// thousands of operands stay shallow. For up to three operands this is
    /// the same as the left-nested chain.
    pub fn join_all(parts: &[BoolTerm]) -> BoolTerm {
        match parts.len() {
            0 => BoolTerm::Bot,
            1 => parts[0].clone(),
            n => {
                let mid = n - n / 2;
                BoolTerm::join(BoolTerm::join_all(&parts[..mid]), BoolTerm::join_all(&parts[mid..]))
            }
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        let mut found = Vec::new();
        self.push_vars(&mut found);
        out.extend(found);
    }

    /// Every variable occurrence, with repetitions, in left-to-right order.
    fn push_vars(&self, out: &mut Vec<Var>) {
        match self {
            BoolTerm::Var(v) => out.push(*v),
            BoolTerm::Bot | BoolTerm::Top => {}
            BoolTerm::Meet(a, b) | BoolTerm::Join(a, b) => {
                a.push_vars(out);
                b.push_vars(out);
            }
            BoolTerm::Complement(a) => a.push_vars(out),
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut found = Vec::new();
        self.push_vars(&mut found);
        found.into_iter().collect()
    }

    pub fn max_var(&self) -> Option<Var> {
        match self {
            BoolTerm::Var(v) => Some(*v),
            BoolTerm::Bot | BoolTerm::Top => None,
            BoolTerm::Meet(a, b) | BoolTerm::Join(a, b) => a.max_var().max(b.max_var()),
            BoolTerm::Complement(a) => a.max_var(),
        }
    }

    /// Simultaneous substitution; variables missing from `map` are kept.
    pub fn substitute(&self, map: &BTreeMap<Var, BoolTerm>) -> BoolTerm {
        match self {
            BoolTerm::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            BoolTerm::Bot | BoolTerm::Top => self.clone(),
            BoolTerm::Meet(a, b) => BoolTerm::meet(a.substitute(map), b.substitute(map)),
            BoolTerm::Join(a, b) => BoolTerm::join(a.substitute(map), b.substitute(map)),
            BoolTerm::Complement(a) => BoolTerm::complement(a.substitute(map)),
        }
    }
}

/// A first-order formula over a Boolean algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoolFormula {
    Eq(BoolTerm, BoolTerm),
    Not(Arc<BoolFormula>),
    And(Arc<BoolFormula>, Arc<BoolFormula>),
    Or(Arc<BoolFormula>, Arc<BoolFormula>),
    Implies(Arc<BoolFormula>, Arc<BoolFormula>),
    Exists(Var, Arc<BoolFormula>),
    Forall(Var, Arc<BoolFormula>),
}

impl BoolFormula {
    pub fn eq(left: BoolTerm, right: BoolTerm) -> Self {
        BoolFormula::Eq(left, right)
    }

    /// `a <= b`, which abbreviates `a ^ b = a`.
    pub fn le(a: BoolTerm, b: BoolTerm) -> Self {
        BoolFormula::Eq(BoolTerm::meet(a.clone(), b), a)
    }

    /// Recognizes the `a ^ b = a` shape written as `a <= b`.
    pub fn as_le(&self) -> Option<(&BoolTerm, &BoolTerm)> {
        match self {
            BoolFormula::Eq(BoolTerm::Meet(a, b), c) if **a == *c => Some((a, b)),
            _ => None,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: BoolFormula) -> Self {
        BoolFormula::Not(Arc::new(inner))
    }

    pub fn and(left: BoolFormula, right: BoolFormula) -> Self {
        BoolFormula::And(Arc::new(left), Arc::new(right))
    }

    pub fn or(left: BoolFormula, right: BoolFormula) -> Self {
        BoolFormula::Or(Arc::new(left), Arc::new(right))
    }

    pub fn implies(left: BoolFormula, right: BoolFormula) -> Self {
        BoolFormula::Implies(Arc::new(left), Arc::new(right))
    }

    pub fn exists(var: Var, body: BoolFormula) -> Self {
        BoolFormula::Exists(var, Arc::new(body))
    }

    pub fn forall(var: Var, body: BoolFormula) -> Self {
        BoolFormula::Forall(var, Arc::new(body))
    }

    /// Left-nested conjunction of a non-empty list.
    pub fn and_all(parts: impl IntoIterator<Item = BoolFormula>) -> Option<Self> {
        parts.into_iter().reduce(BoolFormula::and)
    }

    /// `E v0. E v1. ... body`, outermost binder first.
    pub fn exists_all(vars: &[Var], body: BoolFormula) -> Self {
        vars.iter().rev().fold(body, |acc, v| BoolFormula::exists(*v, acc))
    }

    /// The partition formula on the given cells: the join of all cells is
    /// the top element and distinct cells meet in the bottom element.
    pub fn partition(cells: &[BoolTerm]) -> BoolFormula {
        assert!(!cells.is_empty(), "a partition has at least one cell");
        let cover = BoolFormula::eq(BoolTerm::join_all(cells), BoolTerm::Top);
        let mut parts = vec![cover];
        for j in 1..cells.len() {
            for i in 0..j {
                parts.push(BoolFormula::eq(
                    BoolTerm::meet(cells[i].clone(), cells[j].clone()),
                    BoolTerm::Bot,
                ));
            }
        }
        BoolFormula::and_all(parts).expect("non-empty")
    }

    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut found = Vec::new();
        self.collect_free(&mut Vec::new(), &mut found);
        found.into_iter().collect()
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        match self {
            BoolFormula::Eq(l, r) => {
                let start = out.len();
                l.push_vars(out);
                r.push_vars(out);
                if !bound.is_empty() {
                    let mut keep = start;
                    for i in start..out.len() {
                        if !bound.contains(&out[i]) {
                            out[keep] = out[i];
                            keep += 1;
                        }
                    }
                    out.truncate(keep);
                }
            }
            BoolFormula::Not(a) => a.collect_free(bound, out),
            BoolFormula::And(a, b) | BoolFormula::Or(a, b) | BoolFormula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            BoolFormula::Exists(v, body) | BoolFormula::Forall(v, body) => {
                bound.push(*v);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Largest variable index occurring anywhere, bound or free.
    pub fn max_var(&self) -> Option<Var> {
        match self {
            BoolFormula::Eq(l, r) => l.max_var().max(r.max_var()),
            BoolFormula::Not(a) => a.max_var(),
            BoolFormula::And(a, b) | BoolFormula::Or(a, b) | BoolFormula::Implies(a, b) => {
                a.max_var().max(b.max_var())
            }
            BoolFormula::Exists(v, body) | BoolFormula::Forall(v, body) => {
                Some(*v).max(body.max_var())
            }
        }
    }

    /// Capture-avoiding simultaneous substitution of terms for free variables.
    ///
    /// A binder is renamed to a fresh index (above every variable of the
    /// formula and of the substituted terms) when it would capture a
    /// variable of some substituted term.
    pub fn substitute(&self, map: &BTreeMap<Var, BoolTerm>) -> BoolFormula {
        let mut capture = Vec::new();
        let mut next_fresh = self.max_var().map_or(0, |m| m + 1);
        for (k, t) in map {
            t.push_vars(&mut capture);
            next_fresh = next_fresh.max(k + 1);
            if let Some(m) = t.max_var() {
                next_fresh = next_fresh.max(m + 1);
            }
        }
        capture.sort_unstable();
        capture.dedup();
        self.subst_inner(map, &capture, &mut next_fresh)
    }

    fn subst_inner(
        &self,
        map: &BTreeMap<Var, BoolTerm>,
        capture: &[Var],
        next_fresh: &mut Var,
    ) -> BoolFormula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            BoolFormula::Eq(l, r) => BoolFormula::Eq(l.substitute(map), r.substitute(map)),
            BoolFormula::Not(a) => BoolFormula::not(a.subst_inner(map, capture, next_fresh)),
            BoolFormula::And(a, b) => {
                let a = a.subst_inner(map, capture, next_fresh);
                BoolFormula::and(a, b.subst_inner(map, capture, next_fresh))
            }
            BoolFormula::Or(a, b) => {
                let a = a.subst_inner(map, capture, next_fresh);
                BoolFormula::or(a, b.subst_inner(map, capture, next_fresh))
            }
            BoolFormula::Implies(a, b) => {
                let a = a.subst_inner(map, capture, next_fresh);
                BoolFormula::implies(a, b.subst_inner(map, capture, next_fresh))
            }
            BoolFormula::Exists(v, body) | BoolFormula::Forall(v, body) => {
                let is_exists = matches!(self, BoolFormula::Exists(..));
                let mut inner = map.clone();
                inner.remove(v);
                let (var, body) = if capture.binary_search(v).is_ok() {
                    let fresh = *next_fresh;
                    *next_fresh += 1;
                    inner.insert(*v, BoolTerm::Var(fresh));
                    let mut capture = capture.to_vec();
                    capture.push(fresh);
                    (fresh, body.subst_inner(&inner, &capture, next_fresh))
                } else {
                    (*v, body.subst_inner(&inner, capture, next_fresh))
                };
                if is_exists {
                    BoolFormula::exists(var, body)
                } else {
                    BoolFormula::forall(var, body)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(i: Var) -> BoolTerm {
        BoolTerm::Var(i)
    }

    #[test]
    fn partition_of_one_cell_is_equality_with_top() {
        assert_eq!(BoolFormula::partition(&[y(0)]), BoolFormula::eq(y(0), BoolTerm::Top));
    }

    #[test]
    fn partition_of_two_cells() {
        let expected = BoolFormula::and(
            BoolFormula::eq(BoolTerm::join(y(0), y(1)), BoolTerm::Top),
            BoolFormula::eq(BoolTerm::meet(y(0), y(1)), BoolTerm::Bot),
        );
        assert_eq!(BoolFormula::partition(&[y(0), y(1)]), expected);
    }

    #[test]
    fn join_all_is_left_nested_for_three() {
        assert_eq!(
            BoolTerm::join_all(&[y(0), y(1), y(2)]),
            BoolTerm::join(BoolTerm::join(y(0), y(1)), y(2))
        );
        assert_eq!(BoolTerm::join_all(&[]), BoolTerm::Bot);
    }

    #[test]
    fn substitution_renames_capturing_binders() {
        // E y1. y0 = y1  with y0 := y1
        let f = BoolFormula::exists(1, BoolFormula::eq(y(0), y(1)));
        let out = f.substitute(&BTreeMap::from([(0, y(1))]));
        assert_eq!(out, BoolFormula::exists(2, BoolFormula::eq(y(1), y(2))));
    }

    #[test]
    fn substitution_respects_shadowing() {
        let f = BoolFormula::exists(0, BoolFormula::eq(y(0), BoolTerm::Top));
        assert_eq!(f.substitute(&BTreeMap::from([(0, BoolTerm::Bot)])), f);
    }
}
