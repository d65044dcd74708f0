//! Formula, sentence and ring suites used by the sweeps.
//!
//! The default formula suite `default-depth2` contains every canonical
//! formula (built from `=`, `~`, `&` and `E`) with at most two free
//! variables, AST size at most 9 and quantifier depth at most 2. Each side
//! of an equation is a leaf (`0`, `1` or a variable) or one binary
//! operation on leaves. Quantifiers never shadow and never bind a variable
//! absent from their body. Formulas are listed once per equivalence class
//! under variable renaming and commutativity of `=`, `+` and `*`, in a
//! fixed order: by size, then by printed form.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{parse_ring_formula, ParseError, RingFormula, RingTerm, Var};
use crate::rings::{FiniteRing, RingDescriptorError};

pub const DEFAULT_SUITE: &str = "default-depth2";

/// Descriptors of the rings every sweep runs over.
pub const RING_SUITE: [&str; 9] = [
    "zmod:4",
    "zmod:6",
    "zmod:8",
    "zmod:12",
    "zmod:30",
    "zmod:60",
    "product:zmod:2,zmod:2",
    "product:zmod:4,zmod:9",
    "product:zmod:2,zmod:3,zmod:5",
];

pub fn ring_suite() -> Vec<FiniteRing> {
    RING_SUITE
        .iter()
        .map(|d| FiniteRing::from_descriptor(d).expect("suite descriptors are valid"))
        .collect()
}

/// Thirty fixed sentences about units, idempotents, nilpotents, squares
/// and small characteristics.
pub const SENTENCE_SUITE: [&str; 30] = [
    "0 = 0",
    "0 = 1",
    "1 + 1 = 0",
    "1 + 1 + 1 = 0",
    "1 + 1 + 1 + 1 = 0",
    "1 + 1 + 1 + 1 + 1 + 1 = 0",
    "E x0. x0*x0 = x0 & ~(x0 = 0) & ~(x0 = 1)",
    "E x0. ~(x0 = 0) & ~(E x1. x0*x1 = 1)",
    "E x0. x0*x0 = 0 & ~(x0 = 0)",
    "E x0. x0*x0*x0 = 0 & ~(x0*x0 = 0)",
    "A x0. x0 = 0 | E x1. x0*x1 = 1",
    "A x0. x0*x0 = x0 -> x0 = 0 | x0 = 1",
    "A x0. x0*x0*x0 = x0",
    "A x0. x0*x0 = x0",
    "E x0. x0*x0 = 1 + 1",
    "E x0. x0*x0 + 1 = 0",
    "A x0. E x1. x1*x1 = x0",
    "A x0. x0*x0 = 0 -> x0 = 0",
    "E x0. ~(x0 = 0) & A x1. x0*x1*x1 = x0*x1",
    "E x0. x0 + x0 = 1",
    "E x0. x0 + x0 + x0 = 1",
    "A x0. x0 + x0 = 0 -> x0 = 0",
    "E x0. E x1. x0*x1 = 0 & x0 + x1 = 1",
    "A x0. (E x1. x0*x1 = 1) | x0*x0*x0 = 0",
    "A x0. E x1. x0*x1*x0 = x0",
    "E x0. E x1. x0*x1 = 1 & ~(x0 = x1)",
    "E x0. ~(x0*x0 = x0) & x0*x0*x0*x0 = x0*x0",
    "A x0. x0*x0*x0*x0*x0 = x0",
    "E x0. x0*x0 = x0 + 1",
    "A x0. E x1. x1*x1*x1 = x0",
];

pub fn sentence_suite() -> Vec<RingFormula> {
    SENTENCE_SUITE.iter().map(|s| parse_ring_formula(s).expect("suite sentences parse")).collect()
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: ParseError },
    #[error("unknown formula suite `{0}`")]
    Unknown(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Ring(#[from] RingDescriptorError),
}

/// One formula per line; blank lines and text after `#` are ignored.
pub fn parse_suite(text: &str) -> Result<Vec<RingFormula>, SuiteError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        out.push(parse_ring_formula(body).map_err(|source| SuiteError::Parse { line: i + 1, source })?);
    }
    Ok(out)
}

/// Resolves a suite name: [`DEFAULT_SUITE`], or a path to a suite file.
pub fn load_suite(name: &str) -> Result<Vec<RingFormula>, SuiteError> {
    if name == DEFAULT_SUITE {
        return Ok(default_depth2());
    }
    match std::fs::read_to_string(name) {
        Ok(text) => parse_suite(&text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(SuiteError::Unknown(name.to_string())),
        Err(e) => Err(SuiteError::Io { path: name.to_string(), message: e.to_string() }),
    }
}

/// `k` items chosen by a generator seeded with `seed`, kept in their
/// original order. Returns everything when `k` is at least the length.
pub fn sample_ordered<T: Clone>(items: &[T], k: usize, seed: u64) -> Vec<T> {
    if k >= items.len() {
        return items.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, items.len(), k).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| items[i].clone()).collect()
}

const MAX_SIZE: usize = 9;
const MAX_DEPTH: usize = 2;
const FREE: [Var; 2] = [0, 1];

pub fn default_depth2() -> Vec<RingFormula> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for size in 3..=MAX_SIZE {
        let mut layer = Vec::new();
        for f in formulas_of_size(size, 0, MAX_DEPTH) {
            if seen.insert(class_key(&f)) {
                layer.push(present(&f));
            }
        }
        layer.sort_by_cached_key(|f| f.to_string());
        out.extend(layer);
    }
    out
}

/// Bound variables are named by nesting depth, above the free ones.
fn scope_vars(bound: usize) -> Vec<Var> {
    FREE.iter().copied().chain((0..bound).map(|i| FREE.len() as Var + i as Var)).collect()
}

fn leaves(bound: usize) -> Vec<RingTerm> {
    let mut out = vec![RingTerm::Zero, RingTerm::One];
    out.extend(scope_vars(bound).into_iter().map(RingTerm::Var));
    out
}

fn terms_of_size(size: usize, bound: usize) -> Vec<RingTerm> {
    let ls = leaves(bound);
    match size {
        1 => ls,
        3 => {
            let mut out = Vec::new();
            for a in &ls {
                for b in &ls {
                    out.push(RingTerm::add(a.clone(), b.clone()));
                    out.push(RingTerm::sub(a.clone(), b.clone()));
                    out.push(RingTerm::mul(a.clone(), b.clone()));
                }
            }
            out
        }
        _ => Vec::new(),
    }
}

fn formulas_of_size(size: usize, bound: usize, depth: usize) -> Vec<RingFormula> {
    let mut out = Vec::new();
    for left in [1, 3] {
        if size == left + 4 || size == left + 2 {
            for l in terms_of_size(left, bound) {
                for r in terms_of_size(size - 1 - left, bound) {
                    out.push(RingFormula::eq(l.clone(), r));
                }
            }
        }
    }
    if size > 1 {
        out.extend(formulas_of_size(size - 1, bound, depth).into_iter().map(RingFormula::not));
    }
    for left in 3..size.saturating_sub(3) {
        let rights = formulas_of_size(size - 1 - left, bound, depth);
        for a in formulas_of_size(left, bound, depth) {
            for b in &rights {
                out.push(RingFormula::and(a.clone(), b.clone()));
            }
        }
    }
    if depth > 0 && size > 1 {
        let v = FREE.len() as Var + bound as Var;
        for body in formulas_of_size(size - 1, bound + 1, depth - 1) {
            if body.free_variables().contains(&v) {
                out.push(RingFormula::exists(v, body));
            }
        }
    }
    out
}

fn rename_formula(f: &RingFormula, map: &impl Fn(Var) -> Var) -> RingFormula {
    match f {
        RingFormula::Eq(l, r) => RingFormula::eq(l.rename(map), r.rename(map)),
        RingFormula::Not(a) => RingFormula::not(rename_formula(a, map)),
        RingFormula::And(a, b) => RingFormula::and(rename_formula(a, map), rename_formula(b, map)),
        RingFormula::Or(a, b) => RingFormula::or(rename_formula(a, map), rename_formula(b, map)),
        RingFormula::Implies(a, b) => RingFormula::implies(rename_formula(a, map), rename_formula(b, map)),
        RingFormula::Exists(v, body) => RingFormula::exists(map(*v), rename_formula(body, map)),
        RingFormula::Forall(v, body) => RingFormula::forall(map(*v), rename_formula(body, map)),
    }
}

fn sort_term(t: &RingTerm) -> RingTerm {
    let pair = |a: &RingTerm, b: &RingTerm| {
        let (a, b) = (sort_term(a), sort_term(b));
        if a <= b { (a, b) } else { (b, a) }
    };
    match t {
        RingTerm::Add(a, b) => {
            let (a, b) = pair(a, b);
            RingTerm::add(a, b)
        }
        RingTerm::Mul(a, b) => {
            let (a, b) = pair(a, b);
            RingTerm::mul(a, b)
        }
        RingTerm::Sub(a, b) => RingTerm::sub(sort_term(a), sort_term(b)),
        _ => t.clone(),
    }
}

fn sort_commutative(f: &RingFormula) -> RingFormula {
    match f {
        RingFormula::Eq(l, r) => {
            let (l, r) = (sort_term(l), sort_term(r));
            if l <= r { RingFormula::eq(l, r) } else { RingFormula::eq(r, l) }
        }
        RingFormula::Not(a) => RingFormula::not(sort_commutative(a)),
        RingFormula::And(a, b) => RingFormula::and(sort_commutative(a), sort_commutative(b)),
        RingFormula::Exists(v, body) => RingFormula::exists(*v, sort_commutative(body)),
        other => other.clone(),
    }
}

/// Least commutativity-sorted form over both orderings of the free
/// variables. Bound variables are already named by nesting depth, so
/// alpha-equivalent formulas coincide.
fn class_key(f: &RingFormula) -> RingFormula {
    let swap = |v: Var| match v {
        0 => 1,
        1 => 0,
        v => v,
    };
    let a = sort_commutative(f);
    let b = sort_commutative(&rename_formula(f, &swap));
    a.min(b)
}

/// Renames free variables to `x0, x1` in order of first occurrence and
/// numbers binders upward from there in the order they appear.
fn present(f: &RingFormula) -> RingFormula {
    let free = f.free_variables();
    let mut order: Vec<Var> = Vec::new();
    first_occurrences(f, &free, &mut order);
    let mut next = order.len() as Var;
    present_inner(f, &order, &mut Vec::new(), &mut next)
}

fn first_occurrences(f: &RingFormula, free: &BTreeSet<Var>, order: &mut Vec<Var>) {
    fn term(t: &RingTerm, free: &BTreeSet<Var>, order: &mut Vec<Var>) {
        match t {
            RingTerm::Var(v) if free.contains(v) && !order.contains(v) => order.push(*v),
            RingTerm::Add(a, b) | RingTerm::Sub(a, b) | RingTerm::Mul(a, b) => {
                term(a, free, order);
                term(b, free, order);
            }
            _ => {}
        }
    }
    match f {
        RingFormula::Eq(l, r) => {
            term(l, free, order);
            term(r, free, order);
        }
        RingFormula::Not(a) | RingFormula::Exists(_, a) | RingFormula::Forall(_, a) => first_occurrences(a, free, order),
        RingFormula::And(a, b) | RingFormula::Or(a, b) | RingFormula::Implies(a, b) => {
            first_occurrences(a, free, order);
            first_occurrences(b, free, order);
        }
    }
}

fn present_inner(f: &RingFormula, free: &[Var], bound: &mut Vec<(Var, Var)>, next: &mut Var) -> RingFormula {
    let lookup = |v: Var, bound: &[(Var, Var)]| -> Var {
        if let Some(&(_, to)) = bound.iter().rev().find(|(from, _)| *from == v) {
            return to;
        }
        free.iter().position(|&x| x == v).expect("free variable listed") as Var
    };
    match f {
        RingFormula::Eq(l, r) => {
            let snapshot = bound.clone();
            let map = |v: Var| lookup(v, &snapshot);
            RingFormula::eq(l.rename(&map), r.rename(&map))
        }
        RingFormula::Not(a) => RingFormula::not(present_inner(a, free, bound, next)),
        RingFormula::And(a, b) => {
            let a = present_inner(a, free, bound, next);
            RingFormula::and(a, present_inner(b, free, bound, next))
        }
        RingFormula::Exists(v, body) => {
            let to = *next;
            *next += 1;
            bound.push((*v, to));
            let body = present_inner(body, free, bound, next);
            bound.pop();
            RingFormula::Exists(to, Arc::new(body))
        }
        other => unreachable!("suite formulas are canonical, got {other}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_shape() {
        let suite = default_depth2();
        assert!(suite.len() > 1000);
        let mut printed = BTreeSet::new();
        for f in &suite {
            assert!(f.is_canonical());
            assert!(f.size() <= MAX_SIZE);
            assert!(f.quantifier_depth() <= MAX_DEPTH);
            let free = f.free_variables();
            assert!(free.len() <= 2);
            assert!(free.iter().copied().eq(0..free.len() as Var), "{f}");
            assert!(printed.insert(f.to_string()), "duplicate {f}");
        }
        assert_eq!(suite, default_depth2());
    }

    #[test]
    fn renaming_and_commutativity_are_collapsed() {
        let keys: BTreeSet<RingFormula> = ["x0 = x1", "x1 = x0", "x0 = x0 + 0", "x0 = 0 + x0"]
            .iter()
            .map(|s| class_key(&parse_ring_formula(s).unwrap()))
            .collect();
        assert_eq!(keys.len(), 2);
        let suite: BTreeSet<String> = default_depth2().iter().map(|f| f.to_string()).collect();
        assert!(suite.contains("x0 = x1") ^ suite.contains("x1 = x0"));
        assert!(!suite.contains("E x2. x2 = 0"));
    }

    #[test]
    fn sentences_are_closed() {
        let s = sentence_suite();
        assert_eq!(s.len(), 30);
        assert!(s.iter().all(|f| f.free_variables().is_empty()));
        let cap = crate::translate::DEFAULT_MAX_CELLS;
        for f in &s {
            assert!(crate::translate::predicted_cells(&f.canonicalize()).is_some_and(|c| c <= cap), "{f}");
        }
    }

    #[test]
    fn suite_files() {
        let parsed = parse_suite("# header\nx0 = 0\n\n  E x1. x1 = x0  # trailing\n").unwrap();
        assert_eq!(parsed.len(), 2);
        assert!(matches!(parse_suite("0 = 0\n0 = \n"), Err(SuiteError::Parse { line: 2, .. })));
        assert!(matches!(load_suite("no-such-suite"), Err(SuiteError::Unknown(_))));
    }

    #[test]
    fn sampling_is_seeded() {
        let items: Vec<u32> = (0..100).collect();
        let a = sample_ordered(&items, 10, 7);
        assert_eq!(a, sample_ordered(&items, 10, 7));
        assert_ne!(a, sample_ordered(&items, 10, 8));
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(sample_ordered(&items, 500, 1), items);
    }
}
