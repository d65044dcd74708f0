//! Acceptance run: each criterion prints one PASS or FAIL line, and the
//! process exits nonzero if any criterion fails.

use std::time::Instant;

use fvring::axioms::{run_axiom_suite, AxiomConfig};
use fvring::formula::{parse_ring_formula, RingFormula, Var};
use fvring::residue::{atom_table, check_theorem_main, factor};
use fvring::rings::{Elem, FiniteRing, Stalk};
use fvring::semantics::{all_assignments, boolean_value_batch, Assignment};
use fvring::suite::{default_depth2, ring_suite, sample_ordered, sentence_suite};
use fvring::translate::{translate, CheckReport, TranslateConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn z(n: u32) -> FiniteRing {
    FiniteRing::modular(n).unwrap()
}

fn product(ns: &[u32]) -> FiniteRing {
    FiniteRing::product(ns.iter().map(|&n| z(n)).collect()).unwrap()
}

fn brute_idempotents(r: &FiniteRing) -> Vec<Elem> {
    r.elements().filter(|&x| r.mul(x, x) == x).collect()
}

fn brute_atoms(r: &FiniteRing) -> Vec<Elem> {
    let ids = brute_idempotents(r);
    ids.iter()
        .copied()
        .filter(|&e| e != r.zero() && !ids.iter().any(|&f| f != r.zero() && f != e && r.mul(f, e) == f))
        .collect()
}

fn oracle_equivalence(report: &CheckReport) -> Outcome {
    let rings: Vec<String> = report.rings.iter().map(|r| format!("{} {}", r.ring, r.instances)).collect();
    outcome(
        report.mismatch_count == 0 && report.skipped.is_empty() && report.formulas == 8156,
        format!(
            "{} formulas, {} instances, {} mismatches, {} skipped [{}]",
            report.formulas,
            report.instances,
            report.mismatch_count,
            report.skipped.len(),
            rings.join(", ")
        ),
    )
}

fn partition_soundness(report: &CheckReport) -> Outcome {
    outcome(
        report.partition_failure_count == 0 && report.skipped.is_empty() && report.instances > 0,
        format!("{} partition failures in {} instances", report.partition_failure_count, report.instances),
    )
}

/// Checks the three identities at one instance, with the Boolean
/// operations computed from ring arithmetic: `ab`, `1 - a`, `a + b - ab`.
fn lemma_instance(ring: &FiniteRing, t1: &RingFormula, t2: &RingFormula, env: &Assignment) -> bool {
    let forms = [
        t1.clone(),
        t2.clone(),
        RingFormula::and(t1.clone(), t2.clone()),
        RingFormula::not(t1.clone()),
        RingFormula::or(t1.clone(), t2.clone()),
    ];
    let v: Vec<Elem> = boolean_value_batch(ring, &forms, env).unwrap().into_iter().map(|b| b.value).collect();
    let (a, b) = (v[0], v[1]);
    let ab = ring.mul(a, b);
    v[2] == ab && v[3] == ring.sub(ring.one(), a) && v[4] == ring.sub(ring.add(a, b), ab)
}

fn free_union(t1: &RingFormula, t2: &RingFormula) -> Vec<Var> {
    t1.free_variables().union(&t2.free_variables()).copied().collect()
}

fn boolean_value_lemmas(suite: &[RingFormula], rings: &[FiniteRing]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0u64;
    for _ in 0..10_000 {
        let ring = &rings[rng.gen_range(0..rings.len())];
        let t1 = &suite[rng.gen_range(0..suite.len())];
        let t2 = &suite[rng.gen_range(0..suite.len())];
        let env: Assignment =
            free_union(t1, t2).into_iter().map(|v| (v, Elem(rng.gen_range(0..ring.size() as u32)))).collect();
        failures += u64::from(!lemma_instance(ring, t1, t2, &env));
    }
    let z6 = z(6);
    let mut exhaustive = 0u64;
    for (i, t1) in suite.iter().enumerate() {
        let t2 = &suite[(i + 1) % suite.len()];
        for env in all_assignments(&z6, &free_union(t1, t2)) {
            exhaustive += 1;
            failures += u64::from(!lemma_instance(&z6, t1, t2, &env));
        }
    }
    outcome(failures == 0, format!("10000 sampled + {exhaustive} exhaustive Z/6 instances, {failures} failures"))
}

fn axiom_suite(rings: &[FiniteRing]) -> Outcome {
    let config = AxiomConfig::default();
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for ring in rings {
        let reports = run_axiom_suite(ring, &config);
        for r in &reports {
            if !r.passed() {
                failed.push(format!("{} axiom {}: {:?}", r.ring, r.axiom, r.counterexample));
            }
        }
        let a5 = reports.iter().find(|r| r.axiom == "5").map_or(0, |r| r.instances);
        lines.push(format!("{} ({} checks, axiom 5 {a5})", ring.label(), reports.len()));
    }
    let detail = if failed.is_empty() { lines.join(", ") } else { failed.join("; ") };
    outcome(failed.is_empty(), detail)
}

fn residue_decomposition() -> Outcome {
    let mut problems = Vec::new();
    let sentences = sentence_suite();
    let mut rows = 0;
    for n in [6u32, 12, 30, 60, 210] {
        let ring = z(n);
        let table = atom_table(n as u64).unwrap();
        let brute: Vec<u64> = brute_atoms(&ring).iter().map(|e| e.0 as u64).collect();
        if table.atoms() != brute {
            problems.push(format!("Z/{n}: atom table {:?} vs {brute:?}", table.atoms()));
        }
        let q = factor(n as u64).unwrap().factors.len();
        if brute_idempotents(&ring).len() != 1 << q {
            problems.push(format!("Z/{n}: idempotent count"));
        }
        let report = check_theorem_main(n as u64, &sentences, &TranslateConfig::default()).unwrap();
        rows += report.sentences.len();
        for s in report.sentences.iter().filter(|s| !s.agree) {
            problems.push(format!("Z/{n}: {} disagrees ({s:?})", s.sentence));
        }
    }
    let z60 = z(60);
    let t60 = atom_table(60).unwrap();
    if brute_idempotents(&z60).len() != 8 || [t60.atom(4), t60.atom(3), t60.atom(5)] != [Some(45), Some(40), Some(36)] {
        problems.push("Z/60 example values".into());
    }
    if sentences.len() != 30 {
        problems.push(format!("{} sentences", sentences.len()));
    }
    let detail = if problems.is_empty() {
        format!("n in {{6, 12, 30, 60, 210}}, {rows} sentence rows agree; Z/60 has 8 idempotents, atoms 45, 40, 36")
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn stalk_structure(rings: &[FiniteRing]) -> Outcome {
    let mut checked = 0;
    let mut problems = Vec::new();
    for ring in rings {
        let atoms = brute_atoms(ring);
        for e in brute_idempotents(ring).into_iter().filter(|&e| e != ring.zero()) {
            checked += 1;
            let stalk = Stalk::new(ring, e).unwrap();
            let members: Vec<Elem> = stalk.ring.elements().map(|y| stalk.lift(y)).collect();
            let expected: Vec<Elem> = {
                let mut m: Vec<Elem> = ring.elements().map(|x| ring.mul(e, x)).collect();
                m.sort();
                m.dedup();
                m
            };
            let mut sorted = members.clone();
            sorted.sort();
            let closed = stalk.ring.elements().all(|a| {
                stalk.ring.elements().all(|b| {
                    stalk.lift(stalk.ring.add(a, b)) == ring.add(stalk.lift(a), stalk.lift(b))
                        && stalk.lift(stalk.ring.mul(a, b)) == ring.mul(stalk.lift(a), stalk.lift(b))
                })
            });
            let unit = stalk.lift(stalk.ring.one()) == e && members.iter().all(|&y| ring.mul(e, y) == y);
            let connected = brute_idempotents(&stalk.ring).len() == 2;
            if sorted != expected || !closed || !unit || connected != atoms.contains(&e) {
                problems.push(format!("{} at {}", ring.label(), ring.format_elem(e)));
            }
        }
    }
    let detail = if problems.is_empty() {
        format!("{checked} nonzero idempotents across {} rings", rings.len())
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn connectedness_examples() -> Outcome {
    let mut problems = Vec::new();
    let mut count = 0;
    for p in [2u32, 3, 5] {
        for k in 1..=3 {
            count += 1;
            let r = z(p.pow(k));
            if !r.is_connected() || brute_idempotents(&r).len() != 2 {
                problems.push(format!("Z/{} should be connected", p.pow(k)));
            }
        }
    }
    let factors = [2u32, 3, 4, 5, 8, 9];
    let mut products: Vec<Vec<u32>> = Vec::new();
    for &a in &factors {
        for &b in &factors {
            products.push(vec![a, b]);
            for &c in &factors[..3] {
                products.push(vec![a, b, c]);
            }
        }
    }
    for ns in &products {
        count += 1;
        let r = product(ns);
        if r.is_connected() || brute_idempotents(&r).len() < 4 {
            problems.push(format!("{} should not be connected", r.label()));
        }
    }
    let detail = if problems.is_empty() { format!("{count} rings") } else { problems.join("; ") };
    outcome(problems.is_empty(), detail)
}

fn cell_count_law() -> Outcome {
    let f = parse_ring_formula("E x1. E x2. x1 * x2 = x0").unwrap();
    let r = translate(&f).unwrap();
    let steps: Vec<usize> = r.trace.iter().map(|s| s.cells).collect();
    outcome(r.cell_count() == 16 && steps == [2, 4, 16], format!("{f}: cells by step {steps:?}"))
}

fn determinism(suite: &[RingFormula], rings: &[FiniteRing]) -> Outcome {
    let run = || {
        let formulas = sample_ordered(suite, 600, 42);
        serde_json::to_string(&CheckReport::run(rings, &formulas, &TranslateConfig::default())).unwrap()
    };
    let (a, b) = (run(), run());
    outcome(a == b, format!("two seeded runs, {} bytes each, identical: {}", a.len(), a == b))
}

fn main() {
    let rings = ring_suite();
    let suite = default_depth2();
    let started = Instant::now();
    let sweep = CheckReport::run(&rings, &suite, &TranslateConfig::default());
    let sweep_secs = started.elapsed().as_secs_f64();

    type Criterion<'a> = (&'a str, Box<dyn Fn() -> Outcome + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("oracle equivalence", Box::new(|| oracle_equivalence(&sweep))),
        ("partition soundness", Box::new(|| partition_soundness(&sweep))),
        ("boolean-value lemmas", Box::new(|| boolean_value_lemmas(&suite, &rings))),
        ("axiom suite", Box::new(|| axiom_suite(&rings))),
        ("residue decomposition", Box::new(residue_decomposition)),
        ("stalk structure", Box::new(|| stalk_structure(&rings))),
        ("connectedness examples", Box::new(connectedness_examples)),
        ("cell-count law", Box::new(cell_count_law)),
        ("determinism", Box::new(|| determinism(&suite, &rings))),
    ];
    println!("acceptance: shared sweep over {} rings took {sweep_secs:.1} s", rings.len());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {verdict} ({:.1} s) {}", i + 1, t.elapsed().as_secs_f64(), o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
