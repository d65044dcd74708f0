//! Terms and formulas of the first-order language of unital rings.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// Index of a variable. Ring variables print as `x<index>`.
pub type Var = u32;

/// A term built from variables, `0`, `1`, `+`, `-` and `*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingTerm {
    Var(Var),
    Zero,
    One,
    Add(Arc<RingTerm>, Arc<RingTerm>),
    Sub(Arc<RingTerm>, Arc<RingTerm>),
    Mul(Arc<RingTerm>, Arc<RingTerm>),
}

#[allow(clippy::should_implement_trait)]
impl RingTerm {
    pub fn var(index: Var) -> Self {
        RingTerm::Var(index)
    }

    pub fn add(left: RingTerm, right: RingTerm) -> Self {
        RingTerm::Add(Arc::new(left), Arc::new(right))
    }

    pub fn sub(left: RingTerm, right: RingTerm) -> Self {
        RingTerm::Sub(Arc::new(left), Arc::new(right))
    }

    pub fn mul(left: RingTerm, right: RingTerm) -> Self {
        RingTerm::Mul(Arc::new(left), Arc::new(right))
    }

    /// The numeral `k` as a balanced sum of `k` copies of `1`; `0` is `Zero`.
    ///
    /// The left operand carries the larger half, so `3` is `(1 + 1) + 1`.
    pub fn numeral(k: u64) -> Self {
        match k {
            0 => RingTerm::Zero,
            1 => RingTerm::One,
            _ => RingTerm::add(RingTerm::numeral(k - k / 2), RingTerm::numeral(k / 2)),
        }
    }

    /// Inverse of [`RingTerm::numeral`] for `k >= 1`.
    pub fn as_numeral(&self) -> Option<u64> {
        match self {
            RingTerm::One => Some(1),
            RingTerm::Add(l, r) => {
                let a = l.as_numeral()?;
                let b = r.as_numeral()?;
                (a == b || a == b + 1).then_some(a + b)
            }
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            RingTerm::Var(v) => {
                out.insert(*v);
            }
            RingTerm::Zero | RingTerm::One => {}
            RingTerm::Add(l, r) | RingTerm::Sub(l, r) | RingTerm::Mul(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn max_var(&self) -> Option<Var> {
        match self {
            RingTerm::Var(v) => Some(*v),
            RingTerm::Zero | RingTerm::One => None,
            RingTerm::Add(l, r) | RingTerm::Sub(l, r) | RingTerm::Mul(l, r) => {
                l.max_var().max(r.max_var())
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            RingTerm::Var(_) | RingTerm::Zero | RingTerm::One => 1,
            RingTerm::Add(l, r) | RingTerm::Sub(l, r) | RingTerm::Mul(l, r) => {
                1 + l.size() + r.size()
            }
        }
    }

    fn mentions(&self, var: Var) -> bool {
        match self {
            RingTerm::Var(v) => *v == var,
            RingTerm::Zero | RingTerm::One => false,
            RingTerm::Add(l, r) | RingTerm::Sub(l, r) | RingTerm::Mul(l, r) => {
                l.mentions(var) || r.mentions(var)
            }
        }
    }

    /// Replaces every occurrence of `var` by `term`.
    pub fn substitute(&self, var: Var, term: &RingTerm) -> RingTerm {
        if !self.mentions(var) {
            return self.clone();
        }
        match self {
            RingTerm::Var(_) => term.clone(),
            RingTerm::Zero | RingTerm::One => self.clone(),
            RingTerm::Add(l, r) => RingTerm::add(l.substitute(var, term), r.substitute(var, term)),
            RingTerm::Sub(l, r) => RingTerm::sub(l.substitute(var, term), r.substitute(var, term)),
            RingTerm::Mul(l, r) => RingTerm::mul(l.substitute(var, term), r.substitute(var, term)),
        }
    }

    /// Renames variables according to `map`; unmapped variables are kept.
    pub fn rename(&self, map: &impl Fn(Var) -> Var) -> RingTerm {
        match self {
            RingTerm::Var(v) => RingTerm::Var(map(*v)),
            RingTerm::Zero | RingTerm::One => self.clone(),
            RingTerm::Add(l, r) => RingTerm::add(l.rename(map), r.rename(map)),
            RingTerm::Sub(l, r) => RingTerm::sub(l.rename(map), r.rename(map)),
            RingTerm::Mul(l, r) => RingTerm::mul(l.rename(map), r.rename(map)),
        }
    }
}

/// A formula of the ring language.
///
/// `Or`, `Implies` and `Forall` are derived; [`RingFormula::canonicalize`]
/// removes them.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RingFormula {
    Eq(RingTerm, RingTerm),
    Not(Arc<RingFormula>),
    And(Arc<RingFormula>, Arc<RingFormula>),
    Or(Arc<RingFormula>, Arc<RingFormula>),
    Implies(Arc<RingFormula>, Arc<RingFormula>),
    Exists(Var, Arc<RingFormula>),
    Forall(Var, Arc<RingFormula>),
}

type FreeVarMemo = HashMap<*const RingFormula, Arc<BTreeSet<Var>>>;

impl RingFormula {
    pub fn eq(left: RingTerm, right: RingTerm) -> Self {
        RingFormula::Eq(left, right)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: RingFormula) -> Self {
        RingFormula::Not(Arc::new(inner))
    }

    pub fn and(left: RingFormula, right: RingFormula) -> Self {
        RingFormula::And(Arc::new(left), Arc::new(right))
    }

    pub fn or(left: RingFormula, right: RingFormula) -> Self {
        RingFormula::Or(Arc::new(left), Arc::new(right))
    }

    pub fn implies(left: RingFormula, right: RingFormula) -> Self {
        RingFormula::Implies(Arc::new(left), Arc::new(right))
    }

    pub fn exists(var: Var, body: RingFormula) -> Self {
        RingFormula::Exists(var, Arc::new(body))
    }

    pub fn forall(var: Var, body: RingFormula) -> Self {
        RingFormula::Forall(var, Arc::new(body))
    }

    /// Left-nested conjunction of a non-empty list.
    pub fn and_all(parts: impl IntoIterator<Item = RingFormula>) -> Option<Self> {
        parts.into_iter().reduce(RingFormula::and)
    }

    /// Exact set of free variables.
    ///
    /// Shared subformulas are visited once, so this stays linear in the size
    /// of the formula DAG.
    pub fn free_variables(&self) -> BTreeSet<Var> {
        let mut memo = FreeVarMemo::new();
        (*self.free_vars_memo(&mut memo)).clone()
    }

    fn free_vars_memo(&self, memo: &mut FreeVarMemo) -> Arc<BTreeSet<Var>> {
        fn child(f: &Arc<RingFormula>, memo: &mut FreeVarMemo) -> Arc<BTreeSet<Var>> {
            let key = Arc::as_ptr(f);
            if let Some(hit) = memo.get(&key) {
                return hit.clone();
            }
            let fv = f.free_vars_memo(memo);
            memo.insert(key, fv.clone());
            fv
        }
        match self {
            RingFormula::Eq(l, r) => {
                let mut out = l.variables();
                r.collect_vars(&mut out);
                Arc::new(out)
            }
            RingFormula::Not(a) => child(a, memo),
            RingFormula::And(a, b) | RingFormula::Or(a, b) | RingFormula::Implies(a, b) => {
                let fa = child(a, memo);
                let fb = child(b, memo);
                if fb.is_subset(&fa) {
                    fa
                } else if fa.is_subset(&fb) {
                    fb
                } else {
                    Arc::new(fa.union(&fb).copied().collect())
                }
            }
            RingFormula::Exists(v, body) | RingFormula::Forall(v, body) => {
                let fb = child(body, memo);
                if fb.contains(v) {
                    let mut out = (*fb).clone();
                    out.remove(v);
                    Arc::new(out)
                } else {
                    fb
                }
            }
        }
    }

    /// Largest variable index occurring anywhere, bound or free.
    pub fn max_var(&self) -> Option<Var> {
        match self {
            RingFormula::Eq(l, r) => l.max_var().max(r.max_var()),
            RingFormula::Not(a) => a.max_var(),
            RingFormula::And(a, b) | RingFormula::Or(a, b) | RingFormula::Implies(a, b) => {
                a.max_var().max(b.max_var())
            }
            RingFormula::Exists(v, body) | RingFormula::Forall(v, body) => {
                Some(*v).max(body.max_var())
            }
        }
    }

    /// Number of formula and term nodes.
    pub fn size(&self) -> usize {
        match self {
            RingFormula::Eq(l, r) => 1 + l.size() + r.size(),
            RingFormula::Not(a) => 1 + a.size(),
            RingFormula::And(a, b) | RingFormula::Or(a, b) | RingFormula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
            RingFormula::Exists(_, body) | RingFormula::Forall(_, body) => 1 + body.size(),
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            RingFormula::Eq(..) => 0,
            RingFormula::Not(a) => a.quantifier_depth(),
            RingFormula::And(a, b) | RingFormula::Or(a, b) | RingFormula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            RingFormula::Exists(_, body) | RingFormula::Forall(_, body) => {
                1 + body.quantifier_depth()
            }
        }
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, RingFormula::Eq(..))
    }

    /// True when only `Eq`, `Not`, `And` and `Exists` occur.
    pub fn is_canonical(&self) -> bool {
        match self {
            RingFormula::Eq(..) => true,
            RingFormula::Not(a) => a.is_canonical(),
            RingFormula::And(a, b) => a.is_canonical() && b.is_canonical(),
            RingFormula::Exists(_, body) => body.is_canonical(),
            RingFormula::Or(..) | RingFormula::Implies(..) | RingFormula::Forall(..) => false,
        }
    }

    /// Rewrites `Or`, `Implies` and `Forall` into `Not`, `And` and `Exists`.
    ///
    /// `a | b` becomes `~(~a & ~b)`, `a -> b` becomes `~(a & ~b)` and
    /// `A x. a` becomes `~(E x. ~a)`. Canonical subformulas are returned
    /// without copying.
    pub fn canonicalize(&self) -> RingFormula {
        match self {
            RingFormula::Eq(..) => self.clone(),
            RingFormula::Not(a) => RingFormula::Not(canon_arc(a)),
            RingFormula::And(a, b) => RingFormula::And(canon_arc(a), canon_arc(b)),
            RingFormula::Or(a, b) => RingFormula::not(RingFormula::and(
                RingFormula::Not(canon_arc(a)),
                RingFormula::Not(canon_arc(b)),
            )),
            RingFormula::Implies(a, b) => RingFormula::not(RingFormula::And(
                canon_arc(a),
                Arc::new(RingFormula::Not(canon_arc(b))),
            )),
            RingFormula::Exists(v, body) => RingFormula::Exists(*v, canon_arc(body)),
            RingFormula::Forall(v, body) => {
                RingFormula::not(RingFormula::exists(*v, RingFormula::Not(canon_arc(body))))
            }
        }
    }

    /// Capture-avoiding substitution of `term` for the free occurrences of `var`.
    ///
    /// A binder that would capture a variable of `term` is renamed to the
    /// smallest index above every variable of the formula, the term and `var`.
    pub fn substitute(&self, var: Var, term: &RingTerm) -> RingFormula {
        let term_vars = term.variables();
        let mut next_fresh = self
            .max_var()
            .max(term.max_var())
            .max(Some(var))
            .map_or(0, |m| m + 1);
        self.subst_inner(var, term, &term_vars, &mut next_fresh)
    }

    fn subst_inner(
        &self,
        var: Var,
        term: &RingTerm,
        term_vars: &BTreeSet<Var>,
        next_fresh: &mut Var,
    ) -> RingFormula {
        let rec = |f: &Arc<RingFormula>, next: &mut Var| {
            Arc::new(f.subst_inner(var, term, term_vars, next))
        };
        match self {
            RingFormula::Eq(l, r) => {
                RingFormula::Eq(l.substitute(var, term), r.substitute(var, term))
            }
            RingFormula::Not(a) => RingFormula::Not(rec(a, next_fresh)),
            RingFormula::And(a, b) => {
                let a = rec(a, next_fresh);
                RingFormula::And(a, rec(b, next_fresh))
            }
            RingFormula::Or(a, b) => {
                let a = rec(a, next_fresh);
                RingFormula::Or(a, rec(b, next_fresh))
            }
            RingFormula::Implies(a, b) => {
                let a = rec(a, next_fresh);
                RingFormula::Implies(a, rec(b, next_fresh))
            }
            RingFormula::Exists(v, body) | RingFormula::Forall(v, body) => {
                let is_exists = matches!(self, RingFormula::Exists(..));
                let rebuild = |v: Var, body: Arc<RingFormula>| {
                    if is_exists {
                        RingFormula::Exists(v, body)
                    } else {
                        RingFormula::Forall(v, body)
                    }
                };
                if *v == var || !body.free_variables().contains(&var) {
                    return self.clone();
                }
                if term_vars.contains(v) {
                    let fresh = *next_fresh;
                    *next_fresh += 1;
                    let renamed = body.subst_inner(*v, &RingTerm::Var(fresh), &BTreeSet::new(), next_fresh);
                    let body = renamed.subst_inner(var, term, term_vars, next_fresh);
                    rebuild(fresh, Arc::new(body))
                } else {
                    rebuild(*v, rec(body, next_fresh))
                }
            }
        }
    }
}

fn canon_arc(f: &Arc<RingFormula>) -> Arc<RingFormula> {
    if f.is_canonical() {
        f.clone()
    } else {
        Arc::new(f.canonicalize())
    }
}
