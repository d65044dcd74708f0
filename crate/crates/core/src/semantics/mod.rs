//! Tarskian satisfaction over finite rings and the Boolean value
//! `⟦θ(f̄)⟧`, the join of the atoms whose stalks satisfy `θ` at `e·f̄`.

mod batch;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::formula::{RingFormula, RingTerm, Var};
use crate::rings::{Elem, FiniteRing, OpTables, Stalk};

pub use batch::{CellPlan, CellScratch};

/// Values of variables, all in one ring.
pub type Assignment = BTreeMap<Var, Elem>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable x{0} is unbound")]
    Unbound(Var),
    #[error("value of x{0} is not an element of the ring")]
    ForeignElement(Var),
}

/// Ring operations through dense tables when the ring has them.
pub(crate) struct Ops<'a> {
    ring: &'a FiniteRing,
    tables: Option<&'a OpTables>,
}

impl<'a> Ops<'a> {
    pub(crate) fn new(ring: &'a FiniteRing) -> Self {
        Ops { ring, tables: ring.op_tables() }
    }

    #[inline]
    fn term(&self, t: &RingTerm, env: &[u32]) -> u32 {
        match t {
            RingTerm::Var(v) => env[*v as usize],
            RingTerm::Zero => self.ring.zero().0,
            RingTerm::One => self.ring.one().0,
            RingTerm::Add(a, b) => {
                let (x, y) = (self.term(a, env), self.term(b, env));
                match self.tables {
                    Some(t) => t.add(x, y),
                    None => self.ring.add(Elem(x), Elem(y)).0,
                }
            }
            RingTerm::Sub(a, b) => {
                let (x, y) = (self.term(a, env), self.term(b, env));
                match self.tables {
                    Some(t) => t.sub(x, y),
                    None => self.ring.sub(Elem(x), Elem(y)).0,
                }
            }
            RingTerm::Mul(a, b) => {
                let (x, y) = (self.term(a, env), self.term(b, env));
                match self.tables {
                    Some(t) => t.mul(x, y),
                    None => self.ring.mul(Elem(x), Elem(y)).0,
                }
            }
        }
    }

    /// Satisfaction with a dense environment indexed by variable; every
    /// free variable must already hold a value.
    pub(crate) fn formula(&self, f: &RingFormula, env: &mut [u32]) -> bool {
        match f {
            RingFormula::Eq(l, r) => self.term(l, env) == self.term(r, env),
            RingFormula::Not(a) => !self.formula(a, env),
            RingFormula::And(a, b) => self.formula(a, env) && self.formula(b, env),
            RingFormula::Or(a, b) => self.formula(a, env) || self.formula(b, env),
            RingFormula::Implies(a, b) => !self.formula(a, env) || self.formula(b, env),
            RingFormula::Exists(v, body) | RingFormula::Forall(v, body) => {
                let want = matches!(f, RingFormula::Exists(..));
                let slot = *v as usize;
                let saved = env[slot];
                let mut result = !want;
                for x in 0..self.ring.size() as u32 {
                    env[slot] = x;
                    if self.formula(body, env) == want {
                        result = want;
                        break;
                    }
                }
                env[slot] = saved;
                result
            }
        }
    }
}

/// Dense environment large enough for every variable of `f` and `env`.
pub(crate) fn dense_env(f: &RingFormula, env: &Assignment) -> Vec<u32> {
    let width = f
        .max_var()
        .into_iter()
        .chain(env.keys().copied())
        .max()
        .map_or(0, |v| v as usize + 1);
    let mut dense = vec![0u32; width];
    for (&v, &x) in env {
        dense[v as usize] = x.0;
    }
    dense
}

fn check_env(ring: &FiniteRing, f: &RingFormula, env: &Assignment) -> Result<(), EvalError> {
    if let Some(&v) = f.free_variables().iter().find(|v| !env.contains_key(v)) {
        return Err(EvalError::Unbound(v));
    }
    if let Some((&v, _)) = env.iter().find(|(_, x)| x.index() >= ring.size()) {
        return Err(EvalError::ForeignElement(v));
    }
    Ok(())
}

/// Classical satisfaction; quantifiers enumerate the whole carrier and
/// stop at the first decisive element.
pub fn eval_direct(ring: &FiniteRing, theta: &RingFormula, env: &Assignment) -> Result<bool, EvalError> {
    check_env(ring, theta, env)?;
    let mut dense = dense_env(theta, env);
    Ok(Ops::new(ring).formula(theta, &mut dense))
}

/// The assignment `e·f̄` read inside the stalk `eR`.
pub fn localize(stalk: &Stalk, env: &Assignment) -> Assignment {
    env.iter().map(|(&v, &x)| (v, stalk.project(x))).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BooleanValue {
    pub value: Elem,
    /// Atoms whose stalk satisfies the formula.
    pub atoms: Vec<Elem>,
    #[serde(skip)]
    pub formula: RingFormula,
    #[serde(skip)]
    pub env: Assignment,
}

/// `⟦θ(f̄)⟧`: the join of every atom `e` with `eR ⊨ θ(e·f̄)`.
pub fn boolean_value(ring: &FiniteRing, theta: &RingFormula, env: &Assignment) -> Result<BooleanValue, EvalError> {
    check_env(ring, theta, env)?;
    let mut value = ring.zero();
    let mut atoms = Vec::new();
    for (stalk, &e) in ring.atom_stalks().iter().zip(ring.atoms()) {
        if eval_direct(&stalk.ring, theta, &localize(stalk, env))? {
            value = ring.add(value, e);
            atoms.push(e);
        }
    }
    Ok(BooleanValue { value, atoms, formula: theta.clone(), env: env.clone() })
}

/// Boolean values of several formulas at one assignment, localizing the
/// assignment into each stalk once.
pub fn boolean_value_batch(
    ring: &FiniteRing,
    thetas: &[RingFormula],
    env: &Assignment,
) -> Result<Vec<BooleanValue>, EvalError> {
    for t in thetas {
        check_env(ring, t, env)?;
    }
    let locals: Vec<Assignment> = ring.atom_stalks().iter().map(|s| localize(s, env)).collect();
    let mut out: Vec<BooleanValue> = thetas
        .iter()
        .map(|t| BooleanValue { value: ring.zero(), atoms: Vec::new(), formula: t.clone(), env: env.clone() })
        .collect();
    for ((stalk, &e), local) in ring.atom_stalks().iter().zip(ring.atoms()).zip(&locals) {
        let ops = Ops::new(&stalk.ring);
        for (t, bv) in thetas.iter().zip(out.iter_mut()) {
            let mut dense = dense_env(t, local);
            if ops.formula(t, &mut dense) {
                // Distinct atoms are orthogonal, so their join is their sum.
                bv.value = ring.add(bv.value, e);
                bv.atoms.push(e);
            }
        }
    }
    Ok(out)
}

/// Every assignment of ring elements to `vars`, in lexicographic order
/// with the first variable varying slowest.
pub fn all_assignments(ring: &FiniteRing, vars: &[Var]) -> Vec<Assignment> {
    let n = ring.size();
    let total = n.checked_pow(vars.len() as u32).expect("assignment count overflows");
    (0..total)
        .map(|mut code| {
            let mut env = Assignment::new();
            for &v in vars.iter().rev() {
                env.insert(v, Elem((code % n) as u32));
                code /= n;
            }
            env
        })
        .collect()
}

pub(crate) fn arc_ptr(f: &Arc<RingFormula>) -> *const RingFormula {
    Arc::as_ptr(f)
}
