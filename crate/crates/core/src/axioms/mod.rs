//! Executable checks of the five axioms on concrete finite rings.
//!
//! Each checker returns an [`AxiomReport`] counting the instances it
//! examined. A failing report carries the first counterexample found,
//! naming the formula, the assignment and the algebra elements involved so
//! the instance can be replayed.

mod patching;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::boolalg::IdempotentAlgebra;
use crate::formula::{RingFormula, Var};
use crate::rings::{Elem, FiniteRing};
use crate::semantics::{all_assignments, boolean_value, eval_direct, localize, Assignment};
use crate::suite::{default_depth2, sample_ordered};

pub use patching::{
    axiom5_sides, check_axiom3, check_axiom5, default_partition_sequences, patch, phi_suite, AxiomError, PartitionSequence,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    pub assignment: BTreeMap<String, String>,
    pub elements: BTreeMap<String, String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub ring: String,
    /// `"1"` to `"5"` for the axioms, a short name for lemma checks.
    pub axiom: String,
    pub instances: u64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

impl AxiomReport {
    fn new(ring: &FiniteRing, axiom: &str) -> Self {
        AxiomReport {
            ring: ring.label().to_string(),
            axiom: axiom.to_string(),
            instances: 0,
            verdict: Verdict::Pass,
            counterexample: None,
        }
    }

    /// Records a failure; only the first counterexample is kept.
    fn fail(&mut self, ce: Counterexample) {
        self.verdict = Verdict::Fail;
        if self.counterexample.is_none() {
            self.counterexample = Some(ce);
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomConfig {
    /// Formulas drawn from the default suite for the formula-indexed checks.
    pub formula_budget: usize,
    /// Assignments per formula on rings above `exhaustive_limit`.
    pub env_budget: usize,
    /// Rings of at most this size are checked on every assignment.
    pub exhaustive_limit: usize,
    pub seed: u64,
}

impl Default for AxiomConfig {
    fn default() -> Self {
        AxiomConfig { formula_budget: 400, env_budget: 120, exhaustive_limit: 36, seed: 0 }
    }
}

impl AxiomConfig {
    /// The formulas the formula-indexed checks run on.
    pub fn formulas(&self) -> Vec<RingFormula> {
        sample_ordered(&default_depth2(), self.formula_budget, self.seed)
    }

    /// Every assignment of `vars` on small rings, a seeded sample otherwise.
    pub fn assignments(&self, ring: &FiniteRing, vars: &[Var], salt: u64) -> Vec<Assignment> {
        let all = all_assignments(ring, vars);
        if ring.size() <= self.exhaustive_limit {
            all
        } else {
            sample_ordered(&all, self.env_budget, self.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        }
    }
}

pub(crate) fn show_env(ring: &FiniteRing, env: &Assignment) -> BTreeMap<String, String> {
    env.iter().map(|(v, x)| (format!("x{v}"), ring.format_elem(*x))).collect()
}

fn free_list(f: &RingFormula) -> Vec<Var> {
    f.free_variables().into_iter().collect()
}

/// Every nonzero idempotent lies above an atom and is the join of the
/// atoms below it. The join is taken in `alg`, so a corrupted join table
/// is detected.
pub fn check_axiom1(alg: &IdempotentAlgebra) -> AxiomReport {
    let ring = alg.ring();
    let mut report = AxiomReport::new(ring, "1");
    let bot = alg.bottom();
    let atoms = alg.atoms();
    for &a in &atoms {
        let below = alg.elements().iter().find(|&&b| b != bot && b != a && alg.le(b, a));
        if a == bot || below.is_some() {
            let mut elements = BTreeMap::from([("atom".to_string(), ring.format_elem(a))]);
            if let Some(&b) = below {
                elements.insert("below".to_string(), ring.format_elem(b));
            }
            report.fail(Counterexample {
                formula: None,
                assignment: BTreeMap::new(),
                elements,
                detail: "listed atom is not minimal among nonzero idempotents".into(),
            });
        }
    }
    for &f in alg.elements() {
        if f == bot {
            continue;
        }
        report.instances += 1;
        let below: Vec<Elem> = atoms.iter().copied().filter(|&a| alg.le(a, f)).collect();
        let join = alg.join_all(below.iter().copied());
        if below.is_empty() || join != f {
            report.fail(Counterexample {
                formula: None,
                assignment: BTreeMap::new(),
                elements: BTreeMap::from([
                    ("idempotent".to_string(), ring.format_elem(f)),
                    ("join_of_atoms_below".to_string(), ring.format_elem(join)),
                ]),
                detail: if below.is_empty() {
                    "no atom below a nonzero idempotent".into()
                } else {
                    "idempotent differs from the join of the atoms below it".into()
                },
            });
        }
    }
    report
}

/// Atoms whose stalk satisfies `theta` at the localized assignment.
fn satisfying_atoms(ring: &FiniteRing, theta: &RingFormula, env: &Assignment) -> Vec<Elem> {
    ring.atom_stalks()
        .iter()
        .zip(ring.atoms())
        .filter(|(stalk, _)| eval_direct(&stalk.ring, theta, &localize(stalk, env)).expect("bound"))
        .map(|(_, &e)| e)
        .collect()
}

/// For each formula and assignment there is exactly one idempotent whose
/// atoms are those of the stalks satisfying the formula, and it is the
/// Boolean value computed by the library.
pub fn check_axiom2(alg: &IdempotentAlgebra, formulas: &[RingFormula], config: &AxiomConfig) -> AxiomReport {
    let ring = alg.ring();
    let mut report = AxiomReport::new(ring, "2");
    let atoms = alg.atoms();
    let below: Vec<Vec<Elem>> = alg.elements().iter().map(|&b| alg.atoms_below(b)).collect();
    for (fi, theta) in formulas.iter().enumerate() {
        for env in config.assignments(ring, &free_list(theta), fi as u64) {
            report.instances += 1;
            let sat = satisfying_atoms(ring, theta, &env);
            let candidate = alg.join_all(sat.iter().copied());
            let characterized = atoms.iter().all(|&e| alg.le(e, candidate) == sat.contains(&e));
            let matching = below.iter().filter(|b| **b == sat).count();
            let library = boolean_value(ring, theta, &env).expect("bound").value;
            if !characterized || matching != 1 || library != candidate {
                report.fail(Counterexample {
                    formula: Some(theta.to_string()),
                    assignment: show_env(ring, &env),
                    elements: BTreeMap::from([
                        ("candidate".to_string(), ring.format_elem(candidate)),
                        ("library_value".to_string(), ring.format_elem(library)),
                    ]),
                    detail: format!(
                        "characterization {characterized}, {matching} idempotents with the same atoms below"
                    ),
                });
            }
        }
    }
    report
}

/// `R ⊨ θ(f̄)` exactly when `⟦θ(f̄)⟧ = 1`, for the atomic formulas of the
/// default suite.
pub fn check_axiom4(ring: &FiniteRing, config: &AxiomConfig) -> AxiomReport {
    let mut report = AxiomReport::new(ring, "4");
    let atomic: Vec<RingFormula> = default_depth2().into_iter().filter(RingFormula::is_atomic).collect();
    let atomic = sample_ordered(&atomic, config.formula_budget, config.seed);
    for (fi, theta) in atomic.iter().enumerate() {
        for env in config.assignments(ring, &free_list(theta), fi as u64) {
            report.instances += 1;
            let direct = eval_direct(ring, theta, &env).expect("bound");
            let value = boolean_value(ring, theta, &env).expect("bound").value;
            if direct != (value == ring.one()) {
                report.fail(Counterexample {
                    formula: Some(theta.to_string()),
                    assignment: show_env(ring, &env),
                    elements: BTreeMap::from([("boolean_value".to_string(), ring.format_elem(value))]),
                    detail: format!("ring side {direct}, Boolean side {}", value == ring.one()),
                });
            }
        }
    }
    report
}

/// Associativity, commutativity, absorption, distributivity, De Morgan
/// and complementation, over every pair or triple of idempotents.
pub fn check_boolean_algebra_laws(alg: &IdempotentAlgebra) -> AxiomReport {
    let ring = alg.ring();
    let mut report = AxiomReport::new(ring, "boolean-algebra-laws");
    let (bot, top) = (alg.bottom(), alg.top());
    let els = alg.elements();
    for &a in els {
        for &b in els {
            for &c in els {
                report.instances += 1;
                let (m, j, n) = (|x, y| alg.meet(x, y), |x, y| alg.join(x, y), |x| alg.complement(x));
                let laws = [
                    ("meet associative", m(m(a, b), c) == m(a, m(b, c))),
                    ("join associative", j(j(a, b), c) == j(a, j(b, c))),
                    ("meet commutative", m(a, b) == m(b, a)),
                    ("join commutative", j(a, b) == j(b, a)),
                    ("absorption", m(a, j(a, b)) == a && j(a, m(a, b)) == a),
                    ("meet distributes", m(a, j(b, c)) == j(m(a, b), m(a, c))),
                    ("join distributes", j(a, m(b, c)) == m(j(a, b), j(a, c))),
                    ("De Morgan", n(m(a, b)) == j(n(a), n(b)) && n(j(a, b)) == m(n(a), n(b))),
                    ("complement", m(a, n(a)) == bot && j(a, n(a)) == top),
                ];
                if let Some((law, _)) = laws.iter().find(|(_, ok)| !ok) {
                    report.fail(Counterexample {
                        formula: None,
                        assignment: BTreeMap::new(),
                        elements: BTreeMap::from([
                            ("a".to_string(), ring.format_elem(a)),
                            ("b".to_string(), ring.format_elem(b)),
                            ("c".to_string(), ring.format_elem(c)),
                        ]),
                        detail: format!("{law} fails"),
                    });
                }
            }
        }
    }
    report
}

/// `⟦θ1 ∧ θ2⟧ = ⟦θ1⟧ ∧ ⟦θ2⟧`, `⟦¬θ1⟧ = ¬⟦θ1⟧` and `⟦θ1 ∨ θ2⟧ = ⟦θ1⟧ ∨ ⟦θ2⟧`
/// on consecutive pairs of formulas.
pub fn check_boolean_value_lemmas(
    alg: &IdempotentAlgebra,
    formulas: &[RingFormula],
    config: &AxiomConfig,
) -> AxiomReport {
    let ring = alg.ring();
    let mut report = AxiomReport::new(ring, "boolean-value-homomorphism");
    for (i, pair) in formulas.windows(2).enumerate() {
        let (t1, t2) = (&pair[0], &pair[1]);
        let and = RingFormula::and(t1.clone(), t2.clone());
        let or = RingFormula::or(t1.clone(), t2.clone());
        let not = RingFormula::not(t1.clone());
        for env in config.assignments(ring, &free_list(&and), i as u64) {
            report.instances += 1;
            let bv = |f: &RingFormula| boolean_value(ring, f, &env).expect("bound").value;
            let (a, b) = (bv(t1), bv(t2));
            let failed = [
                ("conjunction", bv(&and) == alg.meet(a, b)),
                ("negation", bv(&not) == alg.complement(a)),
                ("disjunction", bv(&or) == alg.join(a, b)),
            ]
            .into_iter()
            .find(|(_, ok)| !ok);
            if let Some((law, _)) = failed {
                report.fail(Counterexample {
                    formula: Some(and.to_string()),
                    assignment: show_env(ring, &env),
                    elements: BTreeMap::from([
                        ("value_1".to_string(), ring.format_elem(a)),
                        ("value_2".to_string(), ring.format_elem(b)),
                    ]),
                    detail: format!("{law} identity fails"),
                });
            }
        }
    }
    report
}

/// Each nonzero idempotent `e` gives a ring `eR` with unit `e`, and the
/// ring is connected exactly when `e` is an atom.
pub fn check_stalks(ring: &FiniteRing) -> AxiomReport {
    let mut report = AxiomReport::new(ring, "stalks");
    for &e in ring.idempotents() {
        if e == ring.zero() {
            continue;
        }
        report.instances += 1;
        let stalk = crate::rings::Stalk::new(ring, e).expect("nonzero idempotent");
        let unit_ok = stalk.lift(stalk.ring.one()) == e
            && stalk.ring.elements().all(|y| stalk.ring.mul(stalk.ring.one(), y) == y);
        let is_atom = ring.atoms().contains(&e);
        if !unit_ok || stalk.ring.is_connected() != is_atom {
            report.fail(Counterexample {
                formula: None,
                assignment: BTreeMap::new(),
                elements: BTreeMap::from([("idempotent".to_string(), ring.format_elem(e))]),
                detail: format!("unit {unit_ok}, atom {is_atom}, connected {}", stalk.ring.is_connected()),
            });
        }
    }
    report
}

/// All five axioms and the lemma checks, in a fixed order.
pub fn run_axiom_suite(ring: &FiniteRing, config: &AxiomConfig) -> Vec<AxiomReport> {
    let alg = IdempotentAlgebra::new(ring);
    let formulas = config.formulas();
    let axiom5 = match check_axiom5(&alg, &default_partition_sequences(), config) {
        Ok(r) => r,
        Err(e) => {
            let mut r = AxiomReport::new(ring, "5");
            r.fail(Counterexample {
                formula: None,
                assignment: BTreeMap::new(),
                elements: BTreeMap::new(),
                detail: e.to_string(),
            });
            r
        }
    };
    vec![
        check_axiom1(&alg),
        check_axiom2(&alg, &formulas, config),
        check_axiom3(&alg, &formulas, config),
        check_axiom4(ring, config),
        axiom5,
        check_boolean_algebra_laws(&alg),
        check_boolean_value_lemmas(&alg, &formulas, config),
        check_stalks(ring),
    ]
}
