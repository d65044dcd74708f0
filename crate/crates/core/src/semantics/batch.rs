//! Evaluation of many cell formulas that share structure.
//!
//! Cells produced by translation are conjunction chains whose prefixes are
//! shared `Arc` nodes. A [`CellPlan`] arranges the distinct chain nodes into
//! a forest: the node `And(p, l)` is a child of the node `p` and carries the
//! literal `l`. A node holds exactly when its parent holds and its literal
//! holds, so the true cells are found by descending only through true
//! nodes. Literals are evaluated at most once per call.

use std::collections::HashMap;
use std::sync::Arc;

use super::{arc_ptr, Assignment, Ops};
use crate::formula::RingFormula;
use crate::rings::{Elem, FiniteRing};

enum Lit {
    Leaf(Arc<RingFormula>),
    Not(usize),
    And(usize, usize),
}

pub struct CellPlan {
    cells: usize,
    roots: Vec<usize>,
    node_literal: Vec<usize>,
    children: Vec<Vec<usize>>,
    node_cells: Vec<Vec<usize>>,
    literals: Vec<Lit>,
    width: usize,
}

/// Reusable buffers for [`CellPlan::true_cells`].
#[derive(Default)]
pub struct CellScratch {
    lit_state: Vec<u8>,
    stack: Vec<usize>,
    env: Vec<u32>,
    out: Vec<usize>,
}

struct Builder {
    node_of: HashMap<*const RingFormula, usize>,
    lit_of: HashMap<*const RingFormula, usize>,
    roots: Vec<usize>,
    node_literal: Vec<usize>,
    children: Vec<Vec<usize>>,
    literals: Vec<Lit>,
    width: usize,
}

impl Builder {
    fn literal(&mut self, f: &Arc<RingFormula>) -> usize {
        if let Some(&i) = self.lit_of.get(&arc_ptr(f)) {
            return i;
        }
        let lit = match &**f {
            RingFormula::Not(a) => Lit::Not(self.literal(a)),
            RingFormula::And(a, b) => Lit::And(self.literal(a), self.literal(b)),
            _ => {
                self.width = self.width.max(f.max_var().map_or(0, |v| v as usize + 1));
                Lit::Leaf(f.clone())
            }
        };
        let i = self.literals.len();
        self.literals.push(lit);
        self.lit_of.insert(arc_ptr(f), i);
        i
    }

    fn node(&mut self, f: &Arc<RingFormula>) -> usize {
        if let Some(&i) = self.node_of.get(&arc_ptr(f)) {
            return i;
        }
        let (parent, literal) = match &**f {
            RingFormula::And(p, l) => (Some(self.node(p)), self.literal(l)),
            _ => (None, self.literal(f)),
        };
        let i = self.node_literal.len();
        self.node_literal.push(literal);
        self.children.push(Vec::new());
        match parent {
            Some(p) => self.children[p].push(i),
            None => self.roots.push(i),
        }
        self.node_of.insert(arc_ptr(f), i);
        i
    }
}

impl CellPlan {
    pub fn new(cells: &[Arc<RingFormula>]) -> CellPlan {
        let mut b = Builder {
            node_of: HashMap::new(),
            lit_of: HashMap::new(),
            roots: Vec::new(),
            node_literal: Vec::new(),
            children: Vec::new(),
            literals: Vec::new(),
            width: 0,
        };
        let cell_nodes: Vec<usize> = cells.iter().map(|c| b.node(c)).collect();
        let mut node_cells = vec![Vec::new(); b.node_literal.len()];
        for (cell, &node) in cell_nodes.iter().enumerate() {
            node_cells[node].push(cell);
        }
        CellPlan {
            cells: cells.len(),
            roots: b.roots,
            node_literal: b.node_literal,
            children: b.children,
            node_cells,
            literals: b.literals,
            width: b.width,
        }
    }

    pub fn len(&self) -> usize {
        self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells == 0
    }

    fn lit(&self, i: usize, ops: &Ops, s: &mut CellScratch) -> bool {
        match s.lit_state[i] {
            1 => return false,
            2 => return true,
            _ => {}
        }
        let v = match &self.literals[i] {
            Lit::Leaf(f) => ops.formula(f, &mut s.env),
            Lit::Not(a) => !self.lit(*a, ops, s),
            Lit::And(a, b) => self.lit(*a, ops, s) && self.lit(*b, ops, s),
        };
        s.lit_state[i] = if v { 2 } else { 1 };
        v
    }

    /// Indices of the cells true in `ring` under `env`, in increasing order.
    /// The caller guarantees that `env` binds every free variable.
    pub fn true_cells<'s>(&self, ring: &FiniteRing, env: &Assignment, s: &'s mut CellScratch) -> &'s [usize] {
        let ops = Ops::new(ring);
        let width = env.keys().next_back().map_or(0, |&v| v as usize + 1).max(self.width);
        s.env.clear();
        s.env.resize(width, 0);
        for (&v, &x) in env {
            s.env[v as usize] = x.0;
        }
        s.lit_state.clear();
        s.lit_state.resize(self.literals.len(), 0);
        s.out.clear();
        s.stack.clear();
        s.stack.extend(self.roots.iter().rev());
        while let Some(node) = s.stack.pop() {
            if self.lit(self.node_literal[node], &ops, s) {
                s.out.extend(&self.node_cells[node]);
                s.stack.extend(self.children[node].iter().rev());
            }
        }
        s.out.sort_unstable();
        &s.out
    }

    /// Boolean values of all cells: for each atom, the cells true in its
    /// stalk receive that atom.
    pub fn boolean_values(&self, ring: &FiniteRing, env: &Assignment) -> Vec<Elem> {
        let mut values = vec![ring.zero(); self.cells];
        let mut scratch = CellScratch::default();
        for (stalk, &e) in ring.atom_stalks().iter().zip(ring.atoms()) {
            let local = super::localize(stalk, env);
            for &c in self.true_cells(&stalk.ring, &local, &mut scratch) {
                values[c] = ring.add(values[c], e);
            }
        }
        values
    }
}
