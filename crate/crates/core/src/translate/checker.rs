//! Sweeps comparing direct evaluation with evaluation through the
//! translation, over every assignment of a ring.
//!
//! For each atom `e`, the cells true in `eR` depend only on the localized
//! assignment, so they are cached per atom on the localized values. Each
//! atom must make exactly one cell true; the resulting cell-per-atom
//! pattern determines every Boolean value, so `ψ` is evaluated once per
//! distinct pattern.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{TranslateConfig, TranslationResult};
use crate::boolalg::{CompiledBoolFormula, Evaluator, IdempotentAlgebra};
use crate::formula::{RingFormula, Var};
use crate::rings::{Elem, FiniteRing};
use crate::semantics::{all_assignments, Assignment, CellPlan, CellScratch, Ops};

pub struct Checker {
    result: TranslationResult,
    plan: CellPlan,
    code: CompiledBoolFormula,
    free: Vec<Var>,
    width: usize,
    /// Position of each cell among the free variables of `ψ`.
    psi_slot: Vec<u32>,
}

impl Checker {
    pub fn new(result: TranslationResult) -> Checker {
        let plan = CellPlan::new(result.cells());
        let code = CompiledBoolFormula::compile(result.psi());
        let mut psi_slot = vec![u32::MAX; result.cell_count()];
        for (i, &v) in code.free_vars().iter().enumerate() {
            psi_slot[v as usize] = i as u32;
        }
        let free: Vec<Var> = result.source.free_variables().into_iter().collect();
        let width = result.source.max_var().map_or(0, |v| v as usize + 1);
        Checker { result, plan, code, free, width, psi_slot }
    }

    pub fn result(&self) -> &TranslationResult {
        &self.result
    }

    /// Free variables of the source formula, in increasing order.
    pub fn free_vars(&self) -> &[Var] {
        &self.free
    }

    pub fn sweep<'a>(&'a self, ring: &'a FiniteRing, alg: &'a IdempotentAlgebra) -> RingSweep<'a> {
        let projections = ring
            .atom_stalks()
            .iter()
            .map(|s| ring.elements().map(|x| s.project(x).0).collect())
            .collect();
        RingSweep {
            checker: self,
            ring,
            alg,
            ops: Ops::new(ring),
            evaluator: Evaluator::new(&self.code, alg),
            projections,
            cell_memo: vec![HashMap::new(); ring.atoms().len()],
            psi_memo: HashMap::new(),
            scratch: CellScratch::default(),
            dense: vec![0; self.width],
        }
    }
}

/// Outcome at one assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instance {
    pub direct: bool,
    /// `None` when the cells did not form a partition.
    pub fv: Option<bool>,
    pub partition_ok: bool,
}

pub struct RingSweep<'a> {
    checker: &'a Checker,
    ring: &'a FiniteRing,
    alg: &'a IdempotentAlgebra,
    ops: Ops<'a>,
    evaluator: Evaluator<'a>,
    projections: Vec<Vec<u32>>,
    /// Per atom: localized values → the unique true cell, or `None`.
    cell_memo: Vec<HashMap<Vec<u32>, Option<u32>>>,
    psi_memo: HashMap<Vec<u32>, (bool, bool)>,
    scratch: CellScratch,
    dense: Vec<u32>,
}

impl RingSweep<'_> {
    fn cell_for_atom(&mut self, atom: usize, env: &Assignment) -> Option<u32> {
        let key: Vec<u32> = env.values().map(|x| self.projections[atom][x.index()]).collect();
        if let Some(&hit) = self.cell_memo[atom].get(&key) {
            return hit;
        }
        let stalk = &self.ring.atom_stalks()[atom];
        let local: Assignment = env.keys().copied().zip(key.iter().map(|&y| Elem(y))).collect();
        let cells = self.checker.plan.true_cells(&stalk.ring, &local, &mut self.scratch);
        let cell = (cells.len() == 1).then(|| cells[0] as u32);
        self.cell_memo[atom].insert(key, cell);
        cell
    }

    /// Only the cells named in `pattern` can be nonzero, so `ψ` is
    /// evaluated sparsely on them.
    fn psi(&mut self, pattern: Vec<u32>) -> (bool, bool) {
        if let Some(&hit) = self.psi_memo.get(&pattern) {
            return hit;
        }
        let alg = self.alg;
        let mut values: Vec<(u32, u32)> = Vec::with_capacity(pattern.len());
        for (&cell, &atom) in pattern.iter().zip(self.ring.atoms()) {
            let a = alg.index(atom).expect("atoms are idempotents");
            match values.iter_mut().find(|(c, _)| *c == cell) {
                Some((_, v)) => *v = alg.join_idx(*v, a),
                None => values.push((cell, a)),
            }
        }
        let cell_values: Vec<u32> = values.iter().map(|&(_, v)| v).collect();
        let partition_ok = alg.is_partition_idx(&cell_values);
        let slotted: Vec<(u32, u32)> = values
            .iter()
            .filter_map(|&(cell, v)| {
                let slot = self.checker.psi_slot[cell as usize];
                (slot != u32::MAX).then_some((slot, v))
            })
            .collect();
        let truth = self.evaluator.eval_sparse(&slotted);
        self.psi_memo.insert(pattern, (truth, partition_ok));
        (truth, partition_ok)
    }

    /// `env` must bind exactly the free variables of the source formula.
    pub fn check(&mut self, env: &Assignment) -> Instance {
        for (&v, &x) in env {
            self.dense[v as usize] = x.0;
        }
        let direct = self.ops.formula(&self.checker.result.source, &mut self.dense);
        let mut pattern = Vec::with_capacity(self.projections.len());
        for atom in 0..self.projections.len() {
            match self.cell_for_atom(atom, env) {
                Some(c) => pattern.push(c),
                None => return Instance { direct, fv: None, partition_ok: false },
            }
        }
        let (truth, partition_ok) = self.psi(pattern);
        Instance { direct, fv: partition_ok.then_some(truth), partition_ok }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub ring: String,
    pub formula: String,
    pub assignment: BTreeMap<String, String>,
    pub direct: bool,
    pub fv: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionFailure {
    pub ring: String,
    pub formula: String,
    pub assignment: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingSummary {
    pub ring: String,
    pub formulas: usize,
    pub instances: u64,
    pub mismatches: u64,
    pub partition_failures: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub formula: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub rings: Vec<RingSummary>,
    pub formulas: usize,
    pub instances: u64,
    pub mismatch_count: u64,
    pub partition_failure_count: u64,
    /// At most [`CheckReport::MAX_LISTED`] of each are listed.
    pub mismatches: Vec<Mismatch>,
    pub partition_failures: Vec<PartitionFailure>,
    pub skipped: Vec<Skipped>,
}

impl CheckReport {
    pub const MAX_LISTED: usize = 50;

    pub fn passed(&self) -> bool {
        self.mismatch_count == 0 && self.partition_failure_count == 0 && self.skipped.is_empty()
    }

    /// Sweeps every ring, formula and assignment. Each formula is
    /// translated once and the result is reused for every ring. Formulas
    /// are spread over threads and merged back in input order, so the
    /// report does not depend on scheduling.
    pub fn run(rings: &[FiniteRing], formulas: &[RingFormula], config: &TranslateConfig) -> CheckReport {
        let algebras: Vec<IdempotentAlgebra> = rings.iter().map(IdempotentAlgebra::new).collect();
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(formulas.len().max(1));
        let chunk = formulas.len().div_ceil(threads).max(1);
        let outcomes: Vec<FormulaOutcome> = std::thread::scope(|scope| {
            let handles: Vec<_> = formulas
                .chunks(chunk)
                .map(|part| {
                    let algebras = &algebras;
                    scope.spawn(move || {
                        part.iter().map(|f| FormulaOutcome::sweep(rings, algebras, f, config)).collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("check thread")).collect()
        });

        let mut report = CheckReport {
            rings: rings
                .iter()
                .map(|r| RingSummary {
                    ring: r.label().to_string(),
                    formulas: 0,
                    instances: 0,
                    mismatches: 0,
                    partition_failures: 0,
                })
                .collect(),
            formulas: formulas.len(),
            instances: 0,
            mismatch_count: 0,
            partition_failure_count: 0,
            mismatches: Vec::new(),
            partition_failures: Vec::new(),
            skipped: Vec::new(),
        };
        for outcome in outcomes {
            let per_ring = match outcome {
                FormulaOutcome::Skipped(s) => {
                    report.skipped.push(s);
                    continue;
                }
                FormulaOutcome::Swept(per_ring) => per_ring,
            };
            for (summary, part) in report.rings.iter_mut().zip(per_ring) {
                summary.formulas += 1;
                summary.instances += part.instances;
                let mismatches = part.mismatches.len() as u64 + part.extra_mismatches;
                let partition_failures = part.partition_failures.len() as u64 + part.extra_partition_failures;
                summary.mismatches += mismatches;
                summary.partition_failures += partition_failures;
                report.instances += part.instances;
                report.mismatch_count += mismatches;
                report.partition_failure_count += partition_failures;
                let room = Self::MAX_LISTED.saturating_sub(report.mismatches.len());
                report.mismatches.extend(part.mismatches.into_iter().take(room));
                let room = Self::MAX_LISTED.saturating_sub(report.partition_failures.len());
                report.partition_failures.extend(part.partition_failures.into_iter().take(room));
            }
        }
        report
    }
}

/// One formula on one ring. Failures are kept only up to the listing
/// limit, since the counts are all the report needs beyond that.
struct RingPart {
    instances: u64,
    mismatches: Vec<Mismatch>,
    partition_failures: Vec<PartitionFailure>,
    extra_mismatches: u64,
    extra_partition_failures: u64,
}

enum FormulaOutcome {
    Skipped(Skipped),
    Swept(Vec<RingPart>),
}

impl FormulaOutcome {
    fn sweep(rings: &[FiniteRing], algebras: &[IdempotentAlgebra], f: &RingFormula, config: &TranslateConfig) -> Self {
        let result = match super::translate_with(f, config) {
            Ok(r) => r,
            Err(e) => return FormulaOutcome::Skipped(Skipped { formula: f.to_string(), reason: e.to_string() }),
        };
        let checker = Checker::new(result);
        let text = f.to_string();
        let parts = rings
            .iter()
            .zip(algebras)
            .map(|(ring, alg)| {
                let mut part = RingPart {
                    instances: 0,
                    mismatches: Vec::new(),
                    partition_failures: Vec::new(),
                    extra_mismatches: 0,
                    extra_partition_failures: 0,
                };
                let mut sweep = checker.sweep(ring, alg);
                for env in all_assignments(ring, checker.free_vars()) {
                    let inst = sweep.check(&env);
                    part.instances += 1;
                    let shown = || -> BTreeMap<String, String> {
                        env.iter().map(|(v, x)| (format!("x{v}"), ring.format_elem(*x))).collect()
                    };
                    if !inst.partition_ok {
                        if part.partition_failures.len() < CheckReport::MAX_LISTED {
                            part.partition_failures.push(PartitionFailure {
                                ring: ring.label().to_string(),
                                formula: text.clone(),
                                assignment: shown(),
                            });
                        } else {
                            part.extra_partition_failures += 1;
                        }
                    }
                    if inst.fv != Some(inst.direct) {
                        if part.mismatches.len() < CheckReport::MAX_LISTED {
                            part.mismatches.push(Mismatch {
                                ring: ring.label().to_string(),
                                formula: text.clone(),
                                assignment: shown(),
                                direct: inst.direct,
                                fv: inst.fv,
                            });
                        } else {
                            part.extra_mismatches += 1;
                        }
                    }
                }
                part
            })
            .collect();
        FormulaOutcome::Swept(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_ring_formula;
    use crate::translate::{eval_translation, translate};

    #[test]
    fn sweep_agrees_with_plain_evaluation() {
        let ring = FiniteRing::product(vec![FiniteRing::modular(2).unwrap(), FiniteRing::modular(9).unwrap()]).unwrap();
        let alg = IdempotentAlgebra::new(&ring);
        for s in ["E x1. x0*x1 = 1", "x0*x0 = x0 & ~(x0 = 0)", "E x1. E x2. x1 * x2 = x0 & ~(x1 = x2)"] {
            let result = translate(&parse_ring_formula(s).unwrap()).unwrap();
            let checker = Checker::new(result.clone());
            let mut sweep = checker.sweep(&ring, &alg);
            for env in all_assignments(&ring, checker.free_vars()) {
                let inst = sweep.check(&env);
                assert!(inst.partition_ok);
                assert_eq!(inst.fv, Some(eval_translation(&result, &ring, &env).unwrap()), "{s}");
                assert_eq!(inst.fv, Some(inst.direct), "{s}");
            }
        }
    }

    #[test]
    fn report_counts() {
        let rings = vec![FiniteRing::modular(6).unwrap(), FiniteRing::modular(4).unwrap()];
        let formulas: Vec<RingFormula> = ["x0 = x1", "E x0. x0*x0 = x0 & ~(x0 = 0) & ~(x0 = 1)", "E x0. E x1. E x2. E x3. x0 = x1"]
            .iter()
            .map(|s| parse_ring_formula(s).unwrap())
            .collect();
        let report = CheckReport::run(&rings, &formulas, &TranslateConfig::default());
        assert_eq!(report.instances, 36 + 1 + 16 + 1);
        assert_eq!(report.mismatch_count, 0);
        assert_eq!(report.skipped.len(), 1);
        assert!(!report.passed());
    }
}
