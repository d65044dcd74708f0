//! Witness patching: Axioms 3 and 5.
//!
//! A witness in `R` is assembled from one witness per atom stalk. In `Z/n`
//! the stalk at an atom is `Z/q` for a maximal prime power `q | n`, and the
//! pieces are combined by the Chinese remainder theorem; in other rings the
//! lifted pieces are added, which acts coordinatewise.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::{show_env, AxiomConfig, AxiomReport, Counterexample};
use crate::boolalg::{phi_star, BoolAlgError, CompiledBoolFormula, Evaluator, IdempotentAlgebra};
use crate::formula::{BoolFormula, BoolTerm, RingFormula, Var};
use crate::residue::crt_solve;
use crate::rings::{Elem, FiniteRing};
use crate::semantics::{boolean_value, eval_direct, localize, Assignment, CellPlan};
use crate::translate::translate;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AxiomError {
    #[error("cells of `{sequence}` are not a partition at {assignment}")]
    NotAPartition { sequence: String, assignment: String },
    #[error(transparent)]
    Phi(#[from] BoolAlgError),
}

/// The element of `R` whose image in the stalk at the `i`-th atom is
/// `local[i]`.
pub fn patch(ring: &FiniteRing, local: &[Elem]) -> Elem {
    let stalks = ring.atom_stalks();
    assert_eq!(local.len(), stalks.len(), "one stalk element per atom");
    let lifted: Vec<Elem> = stalks.iter().zip(local).map(|(s, &y)| s.lift(y)).collect();
    if ring.modulus().is_some() {
        let residues: Vec<(u64, u64)> = stalks
            .iter()
            .zip(&lifted)
            .map(|(s, x)| {
                let q = s.ring.size() as u64;
                (x.0 as u64 % q, q)
            })
            .collect();
        return Elem(crt_solve(&residues).expect("stalk orders of Z/n are coprime") as u32);
    }
    lifted.into_iter().fold(ring.zero(), |acc, x| ring.add(acc, x))
}

/// Least element of the stalk at atom `i` satisfying `theta` once
/// `witness` is bound to it.
fn least_local_witness(ring: &FiniteRing, i: usize, theta: &RingFormula, env: &Assignment, witness: Var) -> Option<Elem> {
    let stalk = &ring.atom_stalks()[i];
    let mut local = localize(stalk, env);
    stalk.ring.elements().find(|&y| {
        local.insert(witness, y);
        eval_direct(&stalk.ring, theta, &local).expect("bound")
    })
}

fn with(env: &Assignment, v: Var, x: Elem) -> Assignment {
    let mut e = env.clone();
    e.insert(v, x);
    e
}

/// `⟦∃w θ(f̄, w)⟧ ≤ ⟦θ(f̄, g)⟧` for a patched `g`, with `w` the largest
/// free variable of each formula. When the patched witness fails, every
/// element of `R` is tried, so the report separates an incomplete
/// construction from a genuine failure.
pub fn check_axiom3(alg: &IdempotentAlgebra, formulas: &[RingFormula], config: &AxiomConfig) -> AxiomReport {
    let ring = alg.ring();
    let mut report = AxiomReport::new(ring, "3");
    for (fi, theta) in formulas.iter().enumerate() {
        let mut free: Vec<Var> = theta.free_variables().into_iter().collect();
        let Some(w) = free.pop() else { continue };
        let exists = RingFormula::exists(w, theta.clone());
        for env in config.assignments(ring, &free, fi as u64) {
            report.instances += 1;
            let local: Vec<Option<Elem>> =
                (0..ring.atoms().len()).map(|i| least_local_witness(ring, i, theta, &env, w)).collect();
            let h = alg.join_all(ring.atoms().iter().zip(&local).filter(|(_, y)| y.is_some()).map(|(&e, _)| e));
            let library_h = boolean_value(ring, &exists, &env).expect("bound").value;
            let pieces: Vec<Elem> = local
                .iter()
                .zip(ring.atom_stalks())
                .map(|(y, s)| y.unwrap_or(s.ring.zero()))
                .collect();
            let g = patch(ring, &pieces);
            let t = boolean_value(ring, theta, &with(&env, w, g)).expect("bound").value;
            if h == library_h && alg.le(h, t) {
                continue;
            }
            let found = ring
                .elements()
                .find(|&g2| alg.le(library_h, boolean_value(ring, theta, &with(&env, w, g2)).expect("bound").value));
            let detail = match (h == library_h, found) {
                (false, _) => "patched existential value differs from the library".to_string(),
                (true, Some(g2)) => format!("patched witness fails but {} works", ring.format_elem(g2)),
                (true, None) => "no element of the ring is a witness".to_string(),
            };
            report.fail(Counterexample {
                formula: Some(theta.to_string()),
                assignment: show_env(ring, &env),
                elements: BTreeMap::from([
                    ("exists_value".to_string(), ring.format_elem(library_h)),
                    ("witness".to_string(), ring.format_elem(g)),
                    ("witness_value".to_string(), ring.format_elem(t)),
                ]),
                detail,
            });
        }
    }
    report
}

/// Cells `θ_0(x̄, w) … θ_m(x̄, w)` forming a partition sequence, the
/// variable `w` the axiom quantifies, and the Boolean formulas `φ` to test.
#[derive(Debug, Clone)]
pub struct PartitionSequence {
    pub name: String,
    pub cells: Vec<Arc<RingFormula>>,
    pub witness: Var,
    pub phis: Vec<BoolFormula>,
}

impl PartitionSequence {
    /// The cells of a translation, tested against [`phi_suite`] and the
    /// translation's own `ψ`.
    pub fn from_translation(source: &str, witness: Var) -> PartitionSequence {
        let f = crate::formula::parse_ring_formula(source).expect("valid formula");
        let t = translate(&f).expect("translatable");
        let mut phis = phi_suite(t.cell_count());
        phis.push(t.psi().clone());
        PartitionSequence { name: source.to_string(), cells: t.cells().to_vec(), witness, phis }
    }

    fn parameters(&self) -> Vec<Var> {
        let mut vars = std::collections::BTreeSet::new();
        for c in &self.cells {
            vars.extend(c.free_variables());
        }
        vars.remove(&self.witness);
        vars.into_iter().collect()
    }
}

pub fn default_partition_sequences() -> Vec<PartitionSequence> {
    [
        ("x0 = 0", 0),
        ("x0 * x1 = 1", 1),
        ("x1 * x1 = x0", 1),
        ("x0 * x1 = 0 & ~(x1 = 0)", 1),
        ("x1 * x1 = x1 & x0 * x1 = x1", 1),
        ("E x2. x1 * x2 = x0", 1),
    ]
    .iter()
    .map(|&(s, w)| PartitionSequence::from_translation(s, w))
    .collect()
}

/// Boolean formulas in `y0 … y(arity-1)`: the constants, each variable
/// equal to `1`, equal to `0` and nonzero, comparisons of the first two
/// variables, and "`y0` is neither `0` nor an atom".
pub fn phi_suite(arity: usize) -> Vec<BoolFormula> {
    let y = |i: usize| BoolTerm::Var(i as Var);
    let eq = BoolFormula::eq;
    let mut out = vec![eq(BoolTerm::Bot, BoolTerm::Top), eq(BoolTerm::Top, BoolTerm::Top)];
    for j in 0..arity {
        out.push(eq(y(j), BoolTerm::Top));
        out.push(eq(y(j), BoolTerm::Bot));
        out.push(BoolFormula::not(eq(y(j), BoolTerm::Bot)));
    }
    if arity >= 2 {
        out.push(eq(y(0), y(1)));
        out.push(eq(BoolTerm::join(y(0), y(1)), BoolTerm::Top));
        out.push(BoolFormula::le(y(1), y(0)));
    }
    let z = y(arity);
    out.push(BoolFormula::exists(
        arity as Var,
        BoolFormula::and_all([
            BoolFormula::not(eq(z.clone(), BoolTerm::Bot)),
            BoolFormula::le(z.clone(), y(0)),
            BoolFormula::not(eq(z, y(0))),
        ])
        .expect("non-empty"),
    ));
    out
}

/// Calls `visit` with the cell chosen for each atom, over every choice
/// where atom `i` takes a cell listed in `allowed[i]`.
fn for_each_labelling(allowed: &[Vec<usize>], visit: &mut impl FnMut(&[usize])) {
    fn go(allowed: &[Vec<usize>], acc: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if acc.len() == allowed.len() {
            visit(acc);
            return;
        }
        for &j in &allowed[acc.len()] {
            acc.push(j);
            go(allowed, acc, visit);
            acc.pop();
        }
    }
    go(allowed, &mut Vec::new(), visit);
}

struct Compiled {
    star: CompiledBoolFormula,
    phi: CompiledBoolFormula,
}

fn feed(code: &CompiledBoolFormula, values: &[u32]) -> Vec<u32> {
    code.free_vars().iter().map(|&v| values[v as usize]).collect()
}

/// Decides both sides of Axiom 5 for every sequence, formula `φ` and
/// assignment of the parameters: (1) by trying every `g ∈ R`, (2) by
/// trying every partition of the atoms into labelled cells allowed by
/// `Y_j ≤ ⟦∃w θ_j⟧`. For every allowed partition the patched witness must
/// reproduce it: `Y_j = ⟦θ_j(f̄, g)⟧`.
pub fn check_axiom5(
    alg: &IdempotentAlgebra,
    sequences: &[PartitionSequence],
    config: &AxiomConfig,
) -> Result<AxiomReport, AxiomError> {
    let ring = alg.ring();
    let mut report = AxiomReport::new(ring, "5");
    let atoms = ring.atoms();
    let atom_idx: Vec<u32> = atoms.iter().map(|&a| alg.index(a).expect("idempotent")).collect();
    for (si, seq) in sequences.iter().enumerate() {
        let arity = seq.cells.len();
        let plan = CellPlan::new(&seq.cells);
        let compiled: Vec<Compiled> = seq
            .phis
            .iter()
            .map(|phi| {
                Ok(Compiled {
                    star: CompiledBoolFormula::compile(&phi_star(phi, arity)?),
                    phi: CompiledBoolFormula::compile(phi),
                })
            })
            .collect::<Result<_, BoolAlgError>>()?;
        let mut evaluators: Vec<(Evaluator, Evaluator)> =
            compiled.iter().map(|c| (Evaluator::new(&c.star, alg), Evaluator::new(&c.phi, alg))).collect();
        let exists: Vec<RingFormula> =
            seq.cells.iter().map(|c| RingFormula::Exists(seq.witness, c.clone())).collect();
        for env in config.assignments(ring, &seq.parameters(), si as u64) {
            let mut by_g: Vec<Vec<u32>> = Vec::with_capacity(ring.size());
            for g in ring.elements() {
                let values: Vec<u32> = plan
                    .boolean_values(ring, &with(&env, seq.witness, g))
                    .into_iter()
                    .map(|v| alg.index(v).expect("Boolean values are idempotents"))
                    .collect();
                if !alg.is_partition_idx(&values) {
                    return Err(AxiomError::NotAPartition {
                        sequence: seq.name.clone(),
                        assignment: format!("{:?} with x{} = {}", show_env(ring, &env), seq.witness, ring.format_elem(g)),
                    });
                }
                by_g.push(values);
            }
            let ex: Vec<u32> = exists
                .iter()
                .map(|f| alg.index(boolean_value(ring, f, &env).expect("bound").value).expect("idempotent"))
                .collect();
            let allowed: Vec<Vec<usize>> = atom_idx
                .iter()
                .map(|&a| (0..arity).filter(|&j| alg.meet_idx(a, ex[j]) == a).collect())
                .collect();
            let mut labellings: Vec<Vec<u32>> = Vec::new();
            let mut patch_failure: Option<Counterexample> = None;
            for_each_labelling(&allowed, &mut |labels| {
                let mut y = vec![alg.bot_idx(); arity];
                for (&a, &j) in atom_idx.iter().zip(labels) {
                    y[j] = alg.join_idx(y[j], a);
                }
                let pieces: Vec<Elem> = labels
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| {
                        least_local_witness(ring, i, &seq.cells[j], &env, seq.witness)
                            .expect("the atom lies below the existential value")
                    })
                    .collect();
                let g = patch(ring, &pieces);
                if by_g[g.index()] != y && patch_failure.is_none() {
                    patch_failure = Some(Counterexample {
                        formula: Some(seq.name.clone()),
                        assignment: show_env(ring, &env),
                        elements: BTreeMap::from([("witness".to_string(), ring.format_elem(g))]),
                        detail: format!("patched witness gives {:?} instead of the chosen partition", by_g[g.index()]),
                    });
                }
                labellings.push(y);
            });
            if let Some(ce) = patch_failure {
                report.fail(ce);
            }
            for ((phi, code), (star_ev, phi_ev)) in seq.phis.iter().zip(&compiled).zip(evaluators.iter_mut()) {
                report.instances += 1;
                let side1 = by_g.iter().any(|v| star_ev.eval_idx(&feed(&code.star, v)));
                let side2 = labellings.iter().any(|y| phi_ev.eval_idx(&feed(&code.phi, y)));
                if side1 != side2 {
                    report.fail(Counterexample {
                        formula: Some(format!("{} ; phi = {}", seq.name, phi)),
                        assignment: show_env(ring, &env),
                        elements: BTreeMap::new(),
                        detail: format!("side (1) {side1}, side (2) {side2}"),
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Both sides of Axiom 5 for one instance, computed without any sharing.
pub fn axiom5_sides(
    alg: &IdempotentAlgebra,
    cells: &[RingFormula],
    witness: Var,
    phi: &BoolFormula,
    env: &Assignment,
) -> Result<(bool, bool), BoolAlgError> {
    let ring = alg.ring();
    let star = phi_star(phi, cells.len())?;
    let side1 = ring.elements().any(|g| {
        let e = with(env, witness, g);
        let values: BTreeMap<Var, Elem> = cells
            .iter()
            .enumerate()
            .map(|(j, c)| (j as Var, boolean_value(ring, c, &e).expect("bound").value))
            .collect();
        crate::boolalg::eval_bool_formula(alg, &star, &values).expect("bound")
    });
    let ex: Vec<Elem> = cells
        .iter()
        .map(|c| boolean_value(ring, &RingFormula::exists(witness, c.clone()), env).expect("bound").value)
        .collect();
    let mut side2 = false;
    let els = alg.elements();
    let mut tuple = vec![0usize; cells.len()];
    'outer: loop {
        let ys: Vec<Elem> = tuple.iter().map(|&i| els[i]).collect();
        if alg.is_partition(&ys) && ys.iter().zip(&ex).all(|(&y, &e)| alg.le(y, e)) {
            let values: BTreeMap<Var, Elem> = ys.iter().enumerate().map(|(j, &y)| (j as Var, y)).collect();
            if crate::boolalg::eval_bool_formula(alg, phi, &values).expect("bound") {
                side2 = true;
                break;
            }
        }
        for slot in tuple.iter_mut() {
            *slot += 1;
            if *slot < els.len() {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    Ok((side1, side2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_ring_formula;

    fn z(n: u32) -> FiniteRing {
        FiniteRing::modular(n).unwrap()
    }

    #[test]
    fn patching_by_crt_and_by_sum_agree() {
        for ring in [z(60), z(12), FiniteRing::from_descriptor("product:zmod:4,zmod:9").unwrap()] {
            let stalks = ring.atom_stalks();
            let mut pieces = vec![Elem(0); stalks.len()];
            loop {
                let g = patch(&ring, &pieces);
                let sum = stalks.iter().zip(&pieces).fold(ring.zero(), |acc, (s, &y)| ring.add(acc, s.lift(y)));
                assert_eq!(g, sum);
                for (s, &y) in stalks.iter().zip(&pieces) {
                    assert_eq!(s.project(g), y);
                }
                let mut i = 0;
                while i < pieces.len() {
                    pieces[i].0 += 1;
                    if pieces[i].index() < stalks[i].ring.size() {
                        break;
                    }
                    pieces[i].0 = 0;
                    i += 1;
                }
                if i == pieces.len() {
                    break;
                }
            }
        }
    }

    #[test]
    fn axiom3_example_on_z6() {
        let ring = z(6);
        let alg = IdempotentAlgebra::new(&ring);
        let theta = parse_ring_formula("x0 * x1 = x0").unwrap();
        let env: Assignment = [(0, Elem(2))].into_iter().collect();
        let h = boolean_value(&ring, &RingFormula::exists(1, theta.clone()), &env).unwrap().value;
        assert_eq!(h, Elem(1));
        assert!(ring.elements().any(|g| alg.le(h, boolean_value(&ring, &theta, &with(&env, 1, g)).unwrap().value)));
        let formulas = vec![theta, parse_ring_formula("x0 * x0 = x0 + 1").unwrap(), parse_ring_formula("x0 = x0").unwrap()];
        let report = check_axiom3(&alg, &formulas, &AxiomConfig::default());
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.instances, 6 + 1 + 1);
    }

    #[test]
    fn axiom5_base_case_on_z6_and_its_mirror() {
        let cells: Vec<RingFormula> = translate(&parse_ring_formula("x0 = 0").unwrap())
            .unwrap()
            .cells()
            .iter()
            .map(|c| (**c).clone())
            .collect();
        let phi = BoolFormula::eq(BoolTerm::Var(0), BoolTerm::Top);
        let absurd = BoolFormula::eq(BoolTerm::Bot, BoolTerm::Top);
        let mut verdicts = Vec::new();
        for ring in [z(6), FiniteRing::from_descriptor("product:zmod:2,zmod:3").unwrap()] {
            let alg = IdempotentAlgebra::new(&ring);
            let env = Assignment::new();
            let sides = axiom5_sides(&alg, &cells, 0, &phi, &env).unwrap();
            assert_eq!(sides, (true, true));
            assert_eq!(axiom5_sides(&alg, &cells, 0, &absurd, &env).unwrap(), (false, false));
            let report = check_axiom5(&alg, &default_partition_sequences(), &AxiomConfig::default()).unwrap();
            assert!(report.passed(), "{report:?}");
            verdicts.push(report.instances);
        }
        assert_eq!(verdicts[0], verdicts[1]);
    }

    #[test]
    fn optimized_axiom5_matches_unshared_sides() {
        let ring = z(12);
        let alg = IdempotentAlgebra::new(&ring);
        let seq = PartitionSequence::from_translation("x0 * x1 = 0 & ~(x1 = 0)", 1);
        let cells: Vec<RingFormula> = seq.cells.iter().map(|c| (**c).clone()).collect();
        for phi in seq.phis.iter().take(8) {
            for x in ring.elements() {
                let env: Assignment = [(0, x)].into_iter().collect();
                let (a, b) = axiom5_sides(&alg, &cells, 1, phi, &env).unwrap();
                assert_eq!(a, b, "{phi} at {x:?}");
            }
        }
    }

    #[test]
    fn non_partition_input_is_rejected() {
        let ring = z(6);
        let alg = IdempotentAlgebra::new(&ring);
        let cell = Arc::new(parse_ring_formula("x0 = 0").unwrap());
        let seq = PartitionSequence { name: "twice".into(), cells: vec![cell.clone(), cell], witness: 0, phis: phi_suite(2) };
        assert!(matches!(
            check_axiom5(&alg, &[seq], &AxiomConfig::default()),
            Err(AxiomError::NotAPartition { .. })
        ));
    }
}
