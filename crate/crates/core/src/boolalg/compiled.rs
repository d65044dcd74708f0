//! A compiled evaluator for Boolean formulas.
//!
//! Variables are resolved to dense slots. Each run of existential binders
//! becomes a block whose conjuncts are checked as soon as the variables
//! they mention are bound. Inside a block, every maximal subterm that does
//! not depend on the block's own variables is computed once on entry, and
//! the block's truth value is memoized on those entry values. Universal
//! quantifiers are compiled as `¬∃¬`.
//!
//! Meets and joins built only from free variables and `0` record the range
//! of free slots they read. When the caller promises that all but a few
//! free variables are `0` ([`Evaluator::eval_sparse`]), such a subterm
//! whose range holds no nonzero slot is `0` without being visited.

use std::collections::{BTreeMap, HashMap};

use super::{BoolEvalError, IdempotentAlgebra};
use crate::formula::{BoolFormula, BoolTerm, Var};
use crate::rings::Elem;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Term {
    Slot(u32),
    Bot,
    Top,
    Meet(Box<Term>, Box<Term>, Span),
    Join(Box<Term>, Box<Term>, Span),
    Compl(Box<Term>),
}

/// Inclusive range of free slots, when the term is a lattice polynomial in
/// free variables and `0`. An empty range is `(u32::MAX, 0)`.
type Span = Option<(u32, u32)>;

fn span(t: &Term, free: u32) -> Span {
    match t {
        Term::Slot(s) if *s < free => Some((*s, *s)),
        Term::Bot => Some((u32::MAX, 0)),
        Term::Meet(_, _, sp) | Term::Join(_, _, sp) => *sp,
        _ => None,
    }
}

fn merge(a: Span, b: Span) -> Span {
    let ((l1, h1), (l2, h2)) = (a?, b?);
    Some((l1.min(l2), h1.max(h2)))
}

#[derive(Debug, Clone)]
enum Form {
    Eq(Term, Term),
    Not(Box<Form>),
    And(Vec<Form>),
    Or(Vec<Form>),
    Exists(Vec<u32>, Vec<Form>),
    Block(Box<Block>),
}

#[derive(Debug, Clone)]
struct Block {
    id: usize,
    hoisted: Vec<(u32, Term)>,
    vars: Vec<u32>,
    entry: Vec<Form>,
    levels: Vec<Vec<Form>>,
}

#[derive(Debug, Clone)]
pub struct CompiledBoolFormula {
    free: Vec<Var>,
    slots: usize,
    blocks: usize,
    root: Form,
}

struct Resolver {
    free: u32,
    next: u32,
}

impl Resolver {
    fn term(&self, t: &BoolTerm, scope: &HashMap<Var, u32>) -> Term {
        match t {
            BoolTerm::Var(v) => Term::Slot(scope[v]),
            BoolTerm::Bot => Term::Bot,
            BoolTerm::Top => Term::Top,
            BoolTerm::Meet(a, b) | BoolTerm::Join(a, b) => {
                let (a, b) = (self.term(a, scope), self.term(b, scope));
                let sp = merge(span(&a, self.free), span(&b, self.free));
                if matches!(t, BoolTerm::Meet(..)) {
                    Term::Meet(Box::new(a), Box::new(b), sp)
                } else {
                    Term::Join(Box::new(a), Box::new(b), sp)
                }
            }
            BoolTerm::Complement(a) => Term::Compl(Box::new(self.term(a, scope))),
        }
    }

    fn form(&mut self, f: &BoolFormula, scope: &mut HashMap<Var, u32>) -> Form {
        match f {
            BoolFormula::Eq(a, b) => Form::Eq(self.term(a, scope), self.term(b, scope)),
            BoolFormula::Not(a) => Form::Not(Box::new(self.form(a, scope))),
            BoolFormula::And(..) => {
                let mut parts = Vec::new();
                self.conjuncts(f, scope, &mut parts);
                Form::And(parts)
            }
            BoolFormula::Or(a, b) => Form::Or(vec![self.form(a, scope), self.form(b, scope)]),
            BoolFormula::Implies(a, b) => {
                Form::Or(vec![Form::Not(Box::new(self.form(a, scope))), self.form(b, scope)])
            }
            BoolFormula::Exists(..) => {
                let mut body = f;
                let mut binders = Vec::new();
                while let BoolFormula::Exists(v, inner) = body {
                    binders.push(*v);
                    body = inner;
                }
                let saved: Vec<(Var, Option<u32>)> = binders.iter().map(|v| (*v, scope.get(v).copied())).collect();
                let mut slots = Vec::new();
                for v in &binders {
                    let s = self.next;
                    self.next += 1;
                    scope.insert(*v, s);
                    slots.push(s);
                }
                let mut parts = Vec::new();
                self.conjuncts(body, scope, &mut parts);
                for (v, old) in saved.into_iter().rev() {
                    match old {
                        Some(s) => scope.insert(v, s),
                        None => scope.remove(&v),
                    };
                }
                Form::Exists(slots, parts)
            }
            BoolFormula::Forall(v, body) => {
                let negated = BoolFormula::exists(*v, BoolFormula::not((**body).clone()));
                Form::Not(Box::new(self.form(&negated, scope)))
            }
        }
    }

    fn conjuncts(&mut self, f: &BoolFormula, scope: &mut HashMap<Var, u32>, out: &mut Vec<Form>) {
        if let BoolFormula::And(a, b) = f {
            self.conjuncts(a, scope, out);
            self.conjuncts(b, scope, out);
        } else {
            out.push(self.form(f, scope));
        }
    }
}

fn term_slots(t: &Term, out: &mut Vec<u32>) {
    match t {
        Term::Slot(s) => out.push(*s),
        Term::Bot | Term::Top => {}
        Term::Meet(a, b, _) | Term::Join(a, b, _) => {
            term_slots(a, out);
            term_slots(b, out);
        }
        Term::Compl(a) => term_slots(a, out),
    }
}

fn form_slots(f: &Form, out: &mut Vec<u32>) {
    match f {
        Form::Eq(a, b) => {
            term_slots(a, out);
            term_slots(b, out);
        }
        Form::Not(a) => form_slots(a, out),
        Form::And(v) | Form::Or(v) => v.iter().for_each(|g| form_slots(g, out)),
        Form::Exists(vars, parts) => {
            out.extend(vars);
            parts.iter().for_each(|g| form_slots(g, out));
        }
        Form::Block(_) => unreachable!("blocks are built after slot analysis"),
    }
}

/// Slots bound by binders anywhere inside `f`.
fn bound_slots(f: &Form, out: &mut Vec<u32>) {
    match f {
        Form::Eq(..) => {}
        Form::Not(a) => bound_slots(a, out),
        Form::And(v) | Form::Or(v) => v.iter().for_each(|g| bound_slots(g, out)),
        Form::Exists(vars, parts) => {
            out.extend(vars);
            parts.iter().for_each(|g| bound_slots(g, out));
        }
        Form::Block(_) => unreachable!(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dependence {
    Constant,
    Invariant,
    Variant,
}

struct Hoister<'a> {
    /// Sorted slots bound inside the block.
    inside: &'a [u32],
    table: HashMap<Term, u32>,
    next: &'a mut u32,
}

impl Hoister<'_> {
    fn hoist(&mut self, t: Term) -> Term {
        let next = &mut *self.next;
        let s = *self.table.entry(t).or_insert_with(|| {
            *next += 1;
            *next - 1
        });
        Term::Slot(s)
    }

    fn hoist_if_invariant(&mut self, (t, d): (Term, Dependence)) -> Term {
        if d == Dependence::Invariant {
            self.hoist(t)
        } else {
            t
        }
    }

    /// Rewrites `t`, hoisting maximal invariant proper subterms, and
    /// reports how `t` itself depends on the block's variables.
    fn walk(&mut self, t: Term) -> (Term, Dependence) {
        use Dependence::*;
        match t {
            Term::Slot(s) => {
                let d = if self.inside.binary_search(&s).is_ok() { Variant } else { Invariant };
                (t, d)
            }
            Term::Bot | Term::Top => (t, Constant),
            Term::Compl(a) => {
                let (a, d) = self.walk(*a);
                (Term::Compl(Box::new(a)), d)
            }
            Term::Meet(..) | Term::Join(..) => {
                let is_meet = matches!(t, Term::Meet(..));
                let (Term::Meet(a, b, sp) | Term::Join(a, b, sp)) = t else { unreachable!() };
                let (a, da) = self.walk(*a);
                let (b, db) = self.walk(*b);
                let (a, b, d) = if da == Variant || db == Variant {
                    (self.hoist_if_invariant((a, da)), self.hoist_if_invariant((b, db)), Variant)
                } else if da == Constant && db == Constant {
                    (a, b, Constant)
                } else {
                    (a, b, Invariant)
                };
                let t = if is_meet {
                    Term::Meet(Box::new(a), Box::new(b), sp)
                } else {
                    Term::Join(Box::new(a), Box::new(b), sp)
                };
                (t, d)
            }
        }
    }

    fn term(&mut self, t: Term) -> Term {
        let walked = self.walk(t);
        self.hoist_if_invariant(walked)
    }

    fn form(&mut self, f: Form) -> Form {
        match f {
            Form::Eq(a, b) => Form::Eq(self.term(a), self.term(b)),
            Form::Not(a) => Form::Not(Box::new(self.form(*a))),
            Form::And(v) => Form::And(v.into_iter().map(|g| self.form(g)).collect()),
            Form::Or(v) => Form::Or(v.into_iter().map(|g| self.form(g)).collect()),
            Form::Exists(vars, parts) => Form::Exists(vars, parts.into_iter().map(|g| self.form(g)).collect()),
            Form::Block(_) => unreachable!(),
        }
    }
}

struct Builder {
    next_slot: u32,
    blocks: usize,
}

impl Builder {
    fn build(&mut self, f: Form) -> Form {
        match f {
            Form::Eq(..) => f,
            Form::Not(a) => Form::Not(Box::new(self.build(*a))),
            Form::And(v) => Form::And(v.into_iter().map(|g| self.build(g)).collect()),
            Form::Or(v) => Form::Or(v.into_iter().map(|g| self.build(g)).collect()),
            Form::Exists(vars, parts) => self.block(vars, parts),
            Form::Block(_) => unreachable!(),
        }
    }

    fn block(&mut self, vars: Vec<u32>, parts: Vec<Form>) -> Form {
        let mut inside = vars.clone();
        for p in &parts {
            bound_slots(p, &mut inside);
        }
        inside.sort_unstable();
        let mut hoister = Hoister { inside: &inside, table: HashMap::new(), next: &mut self.next_slot };
        let parts: Vec<Form> = parts.into_iter().map(|p| hoister.form(p)).collect();
        let mut hoisted: Vec<(u32, Term)> = hoister.table.into_iter().map(|(t, s)| (s, t)).collect();
        hoisted.sort_unstable_by_key(|(s, _)| *s);
        let id = self.blocks;
        self.blocks += 1;
        let mut entry = Vec::new();
        let mut levels = vec![Vec::new(); vars.len()];
        for p in parts {
            let mut used = Vec::new();
            form_slots(&p, &mut used);
            let level = vars.iter().rposition(|v| used.contains(v));
            let compiled = self.build(p);
            match level {
                Some(l) => levels[l].push(compiled),
                None => entry.push(compiled),
            }
        }
        Form::Block(Box::new(Block { id, hoisted, vars, entry, levels }))
    }
}

impl CompiledBoolFormula {
    pub fn compile(phi: &BoolFormula) -> Self {
        let free: Vec<Var> = phi.free_variables().into_iter().collect();
        let mut scope: HashMap<Var, u32> = free.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let mut resolver = Resolver { free: free.len() as u32, next: free.len() as u32 };
        let resolved = resolver.form(phi, &mut scope);
        let mut builder = Builder { next_slot: resolver.next, blocks: 0 };
        let root = builder.build(resolved);
        CompiledBoolFormula { free, slots: builder.next_slot as usize, blocks: builder.blocks, root }
    }

    /// Free variables in increasing order; values are passed in this order.
    pub fn free_vars(&self) -> &[Var] {
        &self.free
    }
}

/// Evaluates one compiled formula in one algebra, keeping block memo
/// tables across calls.
pub struct Evaluator<'a> {
    code: &'a CompiledBoolFormula,
    alg: &'a IdempotentAlgebra,
    slots: Vec<u32>,
    memo: Vec<HashMap<Vec<u32>, bool>>,
    /// Sorted free slots that may be nonzero, during a sparse evaluation.
    nonzero: Option<Vec<u32>>,
    /// Whether every free slot currently holds `0`.
    free_clear: bool,
}

impl<'a> Evaluator<'a> {
    pub fn new(code: &'a CompiledBoolFormula, alg: &'a IdempotentAlgebra) -> Self {
        Evaluator {
            code,
            alg,
            slots: vec![0; code.slots],
            memo: vec![HashMap::new(); code.blocks],
            nonzero: None,
            free_clear: false,
        }
    }

    /// Evaluates with free variable `free_vars()[i]` set to algebra element
    /// index `values[i]`.
    pub fn eval_idx(&mut self, values: &[u32]) -> bool {
        assert_eq!(values.len(), self.code.free.len(), "one value per free variable");
        self.slots[..values.len()].copy_from_slice(values);
        self.free_clear = false;
        let code = self.code;
        self.form(&code.root)
    }

    /// Same as [`Evaluator::eval_idx`] with free slot `s` set to `v` for
    /// each listed `(s, v)` and every other free slot set to `0`.
    pub fn eval_sparse(&mut self, values: &[(u32, u32)]) -> bool {
        let free = self.code.free.len();
        let bot = self.alg.bot_idx();
        if !self.free_clear {
            self.slots[..free].fill(bot);
            self.free_clear = true;
        }
        let mut listed = Vec::with_capacity(values.len());
        for &(s, v) in values {
            assert!((s as usize) < free, "slot {s} is not a free slot");
            self.slots[s as usize] = v;
            listed.push(s);
        }
        listed.sort_unstable();
        self.nonzero = Some(listed);
        let code = self.code;
        let r = self.form(&code.root);
        for &(s, _) in values {
            self.slots[s as usize] = bot;
        }
        self.nonzero = None;
        r
    }

    /// True when the sparse promise makes a term with this span `0`.
    fn vanishes(&self, sp: Span) -> bool {
        match (&self.nonzero, sp) {
            (Some(nz), Some((lo, hi))) => {
                let i = nz.partition_point(|&s| s < lo);
                i == nz.len() || nz[i] > hi
            }
            _ => false,
        }
    }

    pub fn eval(&mut self, env: &BTreeMap<Var, Elem>) -> Result<bool, BoolEvalError> {
        let mut values = Vec::with_capacity(self.code.free.len());
        for &v in &self.code.free {
            let x = env.get(&v).ok_or(BoolEvalError::Unbound(v))?;
            values.push(self.alg.index(*x).ok_or(BoolEvalError::NotInAlgebra(v))?);
        }
        Ok(self.eval_idx(&values))
    }

    fn term(&self, t: &Term) -> u32 {
        match t {
            Term::Slot(s) => self.slots[*s as usize],
            Term::Bot => self.alg.bot_idx(),
            Term::Top => self.alg.top_idx(),
            Term::Meet(_, _, sp) | Term::Join(_, _, sp) if self.vanishes(*sp) => self.alg.bot_idx(),
            Term::Meet(a, b, _) => self.alg.meet_idx(self.term(a), self.term(b)),
            Term::Join(a, b, _) => self.alg.join_idx(self.term(a), self.term(b)),
            Term::Compl(a) => self.alg.complement_idx(self.term(a)),
        }
    }

    fn form(&mut self, f: &'a Form) -> bool {
        match f {
            Form::Eq(a, b) => self.term(a) == self.term(b),
            Form::Not(a) => !self.form(a),
            Form::And(v) => v.iter().all(|g| self.form(g)),
            Form::Or(v) => v.iter().any(|g| self.form(g)),
            Form::Block(b) => self.block(b),
            Form::Exists(..) => unreachable!(),
        }
    }

    fn block(&mut self, b: &'a Block) -> bool {
        let mut key = Vec::with_capacity(b.hoisted.len());
        for (s, t) in &b.hoisted {
            let v = self.term(t);
            self.slots[*s as usize] = v;
            key.push(v);
        }
        if let Some(&r) = self.memo[b.id].get(&key) {
            return r;
        }
        let r = b.entry.iter().all(|g| self.form(g)) && self.search(b, 0);
        self.memo[b.id].insert(key, r);
        r
    }

    fn search(&mut self, b: &'a Block, level: usize) -> bool {
        let slot = b.vars[level] as usize;
        for v in 0..self.alg.size() as u32 {
            self.slots[slot] = v;
            if b.levels[level].iter().all(|g| self.form(g))
                && (level + 1 == b.vars.len() || self.search(b, level + 1))
            {
                return true;
            }
        }
        false
    }
}
