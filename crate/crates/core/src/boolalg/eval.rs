use std::collections::BTreeMap;

use thiserror::Error;

use super::IdempotentAlgebra;
use crate::formula::{BoolFormula, BoolTerm, Var};
use crate::rings::Elem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoolEvalError {
    #[error("variable y{0} is unbound")]
    Unbound(Var),
    #[error("value assigned to y{0} is not an idempotent")]
    NotInAlgebra(Var),
}

fn term(b: &IdempotentAlgebra, t: &BoolTerm, env: &BTreeMap<Var, u32>) -> u32 {
    match t {
        BoolTerm::Var(v) => env[v],
        BoolTerm::Bot => b.bot_idx(),
        BoolTerm::Top => b.top_idx(),
        BoolTerm::Meet(x, y) => b.meet_idx(term(b, x, env), term(b, y, env)),
        BoolTerm::Join(x, y) => b.join_idx(term(b, x, env), term(b, y, env)),
        BoolTerm::Complement(x) => b.complement_idx(term(b, x, env)),
    }
}

fn formula(b: &IdempotentAlgebra, f: &BoolFormula, env: &mut BTreeMap<Var, u32>) -> bool {
    match f {
        BoolFormula::Eq(l, r) => term(b, l, env) == term(b, r, env),
        BoolFormula::Not(a) => !formula(b, a, env),
        BoolFormula::And(x, y) => formula(b, x, env) && formula(b, y, env),
        BoolFormula::Or(x, y) => formula(b, x, env) || formula(b, y, env),
        BoolFormula::Implies(x, y) => !formula(b, x, env) || formula(b, y, env),
        BoolFormula::Exists(v, body) | BoolFormula::Forall(v, body) => {
            let want = matches!(f, BoolFormula::Exists(..));
            let saved = env.get(v).copied();
            let mut found = !want;
            for i in 0..b.size() as u32 {
                env.insert(*v, i);
                if formula(b, body, env) == want {
                    found = want;
                    break;
                }
            }
            match saved {
                Some(s) => env.insert(*v, s),
                None => env.remove(v),
            };
            found
        }
    }
}

/// Classical satisfaction in the algebra; quantifiers range over every
/// idempotent. This is the plain recursive evaluator used as a reference.
pub fn eval_bool_formula(
    b: &IdempotentAlgebra,
    phi: &BoolFormula,
    env: &BTreeMap<Var, Elem>,
) -> Result<bool, BoolEvalError> {
    let mut idx = BTreeMap::new();
    for (&v, &x) in env {
        idx.insert(v, b.index(x).ok_or(BoolEvalError::NotInAlgebra(v))?);
    }
    if let Some(&v) = phi.free_variables().iter().find(|v| !idx.contains_key(v)) {
        return Err(BoolEvalError::Unbound(v));
    }
    Ok(formula(b, phi, &mut idx))
}
