//! Translation of ring formulas into acceptable sequences
//! `⟨ψ; θ_0, …, θ_m⟩` whose cells form a partition sequence, so that
//! `R ⊨ θ(f̄)` iff `B ⊨ ψ(⟦θ_0(f̄)⟧, …, ⟦θ_m(f̄)⟧)`.

mod checker;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::boolalg::{phi_star, BoolAlgError, CompiledBoolFormula, Evaluator, IdempotentAlgebra};
use crate::formula::{BoolFormula, BoolTerm, RingFormula, Var};
use crate::rings::FiniteRing;
use crate::semantics::{Assignment, CellPlan, EvalError};

pub use checker::{CheckReport, Checker, Instance, Mismatch, PartitionFailure, RingSweep};

pub const DEFAULT_MAX_DEPTH: usize = 3;
pub const DEFAULT_MAX_CELLS: u128 = 1 << 17;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TranslateConfig {
    pub max_depth: usize,
    pub max_cells: u128,
}

impl Default for TranslateConfig {
    fn default() -> Self {
        TranslateConfig { max_depth: DEFAULT_MAX_DEPTH, max_cells: DEFAULT_MAX_CELLS }
    }
}

impl TranslateConfig {
    /// Defaults, with the depth cap taken from `FV_MAX_DEPTH` when set.
    pub fn from_env() -> Self {
        let mut c = Self::default();
        if let Some(d) = std::env::var("FV_MAX_DEPTH").ok().and_then(|s| s.trim().parse().ok()) {
            c.max_depth = d;
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SizeReport {
    pub quantifier_depth: usize,
    pub formula_size: usize,
    /// `None` when the count does not fit in 128 bits.
    pub predicted_cells: Option<u128>,
}

impl std::fmt::Display for SizeReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cells = match self.predicted_cells {
            Some(c) => c.to_string(),
            None => "more than 2^128".into(),
        };
        write!(
            f,
            "quantifier depth {}, size {}, predicted cells {}",
            self.quantifier_depth, self.formula_size, cells
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("quantifier depth {depth} exceeds the cap {max} ({report})")]
    DepthExceeded { depth: usize, max: usize, report: SizeReport },
    #[error("translation would produce too many cells, cap {max} ({report})")]
    TooManyCells { max: u128, report: SizeReport },
    #[error("Boolean formula mentions y{var} but there are only {cells} cells")]
    ArityMismatch { var: Var, cells: usize },
}

impl From<BoolAlgError> for TranslateError {
    fn from(e: BoolAlgError) -> Self {
        match e {
            BoolAlgError::FreeVariableMismatch { var, arity } => TranslateError::ArityMismatch { var, cells: arity },
            BoolAlgError::ZeroArity => TranslateError::ArityMismatch { var: 0, cells: 0 },
        }
    }
}

/// `⟨ψ; θ_0, …, θ_m⟩` with the free variables of `ψ` among `y_0..y_m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcceptableSequence {
    pub psi: BoolFormula,
    pub cells: Vec<Arc<RingFormula>>,
}

impl AcceptableSequence {
    pub fn new(psi: BoolFormula, cells: Vec<Arc<RingFormula>>) -> Result<Self, TranslateError> {
        if let Some(&var) = psi.free_variables().iter().find(|&&v| v as usize >= cells.len()) {
            return Err(TranslateError::ArityMismatch { var, cells: cells.len() });
        }
        Ok(AcceptableSequence { psi, cells })
    }

    pub fn arity(&self) -> usize {
        self.cells.len()
    }

    /// Free variables of the cells taken together.
    pub fn cell_free_variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for c in &self.cells {
            out.extend(c.free_variables());
        }
        out
    }

    /// Whether the cells' free variables are exactly `x_0..x_k` for some `k`.
    pub fn is_standard(&self) -> bool {
        self.cell_free_variables().iter().enumerate().all(|(i, &v)| i as Var == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: &'static str,
    pub formula: String,
    pub cells: usize,
}

#[derive(Debug, Clone)]
pub struct TranslationResult {
    pub source: RingFormula,
    pub canonical: RingFormula,
    pub sequence: AcceptableSequence,
    pub trace: Vec<TraceStep>,
}

#[derive(Serialize)]
struct TranslationJson<'a> {
    source: String,
    psi: String,
    cells: Vec<String>,
    cell_count: usize,
    trace: &'a [TraceStep],
}

impl TranslationResult {
    pub fn psi(&self) -> &BoolFormula {
        &self.sequence.psi
    }

    pub fn cells(&self) -> &[Arc<RingFormula>] {
        &self.sequence.cells
    }

    pub fn cell_count(&self) -> usize {
        self.sequence.cells.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(TranslationJson {
            source: self.source.to_string(),
            psi: self.psi().to_string(),
            cells: self.cells().iter().map(|c| c.to_string()).collect(),
            cell_count: self.cell_count(),
            trace: &self.trace,
        })
        .expect("translation serializes")
    }
}

/// Cell count predicted by the recursion: 2 for an atom, products for
/// conjunctions, `2^(m+1)` for an existential over `m+1` cells.
pub fn predicted_cells(f: &RingFormula) -> Option<u128> {
    match f {
        RingFormula::Eq(..) => Some(2),
        RingFormula::Not(a) => predicted_cells(a),
        RingFormula::And(a, b) => predicted_cells(a)?.checked_mul(predicted_cells(b)?),
        RingFormula::Exists(_, body) => {
            let m = predicted_cells(body)?;
            if m >= 128 {
                None
            } else {
                Some(1u128 << m)
            }
        }
        RingFormula::Or(..) | RingFormula::Implies(..) | RingFormula::Forall(..) => {
            predicted_cells(&f.canonicalize())
        }
    }
}

fn size_report(canonical: &RingFormula) -> SizeReport {
    SizeReport {
        quantifier_depth: canonical.quantifier_depth(),
        formula_size: canonical.size(),
        predicted_cells: predicted_cells(canonical),
    }
}

/// Rewrites `Φ′(v_0..v_m′)` over cells `θ′_0..θ′_m′` into a partition
/// sequence with `2^(m′+1)` cells. Cell `k` is the conjunction over `l` of
/// `θ′_l` when bit `l` of `k` is set and `¬θ′_l` otherwise, and `v_l` is
/// replaced by the join of the cells whose index has bit `l` set.
pub fn normalize_to_partition(
    phi: &BoolFormula,
    cells: &[Arc<RingFormula>],
) -> Result<AcceptableSequence, TranslateError> {
    let m1 = cells.len();
    if let Some(&var) = phi.free_variables().iter().find(|&&v| v as usize >= m1) {
        return Err(TranslateError::ArityMismatch { var, cells: m1 });
    }
    if m1 == 0 {
        return Err(TranslateError::ArityMismatch { var: 0, cells: 0 });
    }
    if m1 >= 32 {
        return Err(TranslateError::TooManyCells {
            max: DEFAULT_MAX_CELLS,
            report: SizeReport { quantifier_depth: 0, formula_size: 0, predicted_cells: 1u128.checked_shl(m1 as u32) },
        });
    }
    let negations: Vec<Arc<RingFormula>> = cells.iter().map(|c| Arc::new(RingFormula::Not(c.clone()))).collect();
    let mut level: Vec<Arc<RingFormula>> = vec![negations[0].clone(), cells[0].clone()];
    for l in 1..m1 {
        let mut next = Vec::with_capacity(level.len() * 2);
        for lit in [&negations[l], &cells[l]] {
            for prefix in &level {
                next.push(Arc::new(RingFormula::And(prefix.clone(), lit.clone())));
            }
        }
        level = next;
    }
    let n = level.len();
    let map: BTreeMap<Var, BoolTerm> = (0..m1)
        .map(|l| {
            let members: Vec<BoolTerm> = (0..n).filter(|k| k >> l & 1 == 1).map(|k| BoolTerm::Var(k as Var)).collect();
            (l as Var, BoolTerm::join_all(&members))
        })
        .collect();
    AcceptableSequence::new(phi.substitute(&map), level)
}

struct Translator {
    trace: Vec<TraceStep>,
}

impl Translator {
    fn run(&mut self, f: &RingFormula) -> Result<AcceptableSequence, TranslateError> {
        let seq = match f {
            RingFormula::Eq(..) => {
                let t = Arc::new(f.clone());
                let cells = vec![t.clone(), Arc::new(RingFormula::Not(t))];
                let psi = BoolFormula::eq(BoolTerm::Var(0), BoolTerm::Top);
                self.step("atomic", f, 2);
                AcceptableSequence::new(psi, cells)?
            }
            RingFormula::Not(a) => {
                let inner = self.run(a)?;
                self.step("not", f, inner.arity());
                AcceptableSequence { psi: BoolFormula::not(inner.psi), cells: inner.cells }
            }
            RingFormula::And(a, b) => {
                let left = self.run(a)?;
                let right = self.run(b)?;
                let (p, q) = (left.arity(), right.arity());
                let mut cells = Vec::with_capacity(p * q);
                for xi in &left.cells {
                    for chi in &right.cells {
                        cells.push(Arc::new(RingFormula::And(xi.clone(), chi.clone())));
                    }
                }
                let idx = |i: usize, j: usize| BoolTerm::Var((i * q + j) as Var);
                let rows: BTreeMap<Var, BoolTerm> = (0..p)
                    .map(|i| (i as Var, BoolTerm::join_all(&(0..q).map(|j| idx(i, j)).collect::<Vec<_>>())))
                    .collect();
                let cols: BTreeMap<Var, BoolTerm> = (0..q)
                    .map(|j| (j as Var, BoolTerm::join_all(&(0..p).map(|i| idx(i, j)).collect::<Vec<_>>())))
                    .collect();
                let psi = BoolFormula::and(left.psi.substitute(&rows), right.psi.substitute(&cols));
                self.step("and", f, cells.len());
                AcceptableSequence::new(psi, cells)?
            }
            RingFormula::Exists(x, body) => {
                let inner = self.run(body)?;
                let candidates: Vec<Arc<RingFormula>> =
                    inner.cells.iter().map(|c| Arc::new(RingFormula::Exists(*x, c.clone()))).collect();
                let star = phi_star(&inner.psi, inner.arity())?;
                let seq = normalize_to_partition(&star, &candidates)?;
                self.step("exists", f, seq.arity());
                seq
            }
            RingFormula::Or(..) | RingFormula::Implies(..) | RingFormula::Forall(..) => {
                unreachable!("translation runs on canonical formulas")
            }
        };
        Ok(seq)
    }

    fn step(&mut self, rule: &'static str, f: &RingFormula, cells: usize) {
        self.trace.push(TraceStep { rule, formula: f.to_string(), cells });
    }
}

/// Translates with the default caps.
pub fn translate(theta: &RingFormula) -> Result<TranslationResult, TranslateError> {
    translate_with(theta, &TranslateConfig::default())
}

pub fn translate_with(theta: &RingFormula, config: &TranslateConfig) -> Result<TranslationResult, TranslateError> {
    let canonical = theta.canonicalize();
    let report = size_report(&canonical);
    if report.quantifier_depth > config.max_depth {
        return Err(TranslateError::DepthExceeded {
            depth: report.quantifier_depth,
            max: config.max_depth,
            report,
        });
    }
    if report.predicted_cells.is_none_or(|c| c > config.max_cells) {
        return Err(TranslateError::TooManyCells { max: config.max_cells, report });
    }
    let mut t = Translator { trace: Vec::new() };
    let sequence = t.run(&canonical)?;
    Ok(TranslationResult { source: theta.clone(), canonical, sequence, trace: t.trace })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FvError {
    #[error(transparent)]
    Translate(#[from] TranslateError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("cell values do not form a partition")]
    NotAPartition,
}

/// Evaluates an already translated formula through its Boolean values.
pub fn eval_translation(result: &TranslationResult, ring: &FiniteRing, env: &Assignment) -> Result<bool, FvError> {
    if let Some(&v) = result.source.free_variables().iter().find(|v| !env.contains_key(v)) {
        return Err(EvalError::Unbound(v).into());
    }
    let plan = CellPlan::new(result.cells());
    let values = plan.boolean_values(ring, env);
    let alg = IdempotentAlgebra::new(ring);
    if !alg.is_partition(&values) {
        return Err(FvError::NotAPartition);
    }
    let code = CompiledBoolFormula::compile(result.psi());
    let dense: Vec<u32> = code
        .free_vars()
        .iter()
        .map(|&v| alg.index(values[v as usize]).expect("Boolean values are idempotents"))
        .collect();
    Ok(Evaluator::new(&code, &alg).eval_idx(&dense))
}

/// `R ⊨ θ(f̄)` computed as `B ⊨ ψ(⟦θ_0(f̄)⟧, …, ⟦θ_m(f̄)⟧)`.
pub fn eval_via_fv(ring: &FiniteRing, theta: &RingFormula, env: &Assignment) -> Result<bool, FvError> {
    let result = translate(theta)?;
    eval_translation(&result, ring, env)
}
