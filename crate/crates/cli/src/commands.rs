use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use fvring::axioms::{run_axiom_suite, AxiomConfig, AxiomReport};
use fvring::formula::{parse_ring_formula, RingFormula, Var};
use fvring::residue::compare_sentences;
use fvring::rings::{parse_element, FiniteRing};
use fvring::semantics::{eval_direct, Assignment};
use fvring::suite::{load_suite, parse_suite, sample_ordered, sentence_suite};
use fvring::translate::{eval_translation, predicted_cells, translate_with, CheckReport, TranslateConfig};

use crate::{Common, Format};

/// Name accepted by `equiv --sentences` for the built-in sentence list.
const DEFAULT_SENTENCES: &str = "default-sentences";

pub struct Output {
    pub text: String,
    /// `false` when a check found a disagreement or failure.
    pub ok: bool,
}

type CmdResult = Result<Output, String>;

fn config(common: &Common) -> TranslateConfig {
    let mut c = TranslateConfig::default();
    if let Some(d) = common.max_depth {
        c.max_depth = d as usize;
    }
    c
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn ring(desc: &str) -> Result<FiniteRing, String> {
    FiniteRing::from_descriptor(desc).map_err(|e| e.to_string())
}

fn formula(text: &str) -> Result<RingFormula, String> {
    parse_ring_formula(text).map_err(|e| format!("cannot parse formula: {e}"))
}

fn var_list(vars: impl IntoIterator<Item = Var>) -> Vec<String> {
    vars.into_iter().map(|v| format!("x{v}")).collect()
}

/// Splits on commas outside parentheses, so tuple literals stay whole.
fn split_top_level(text: &str) -> Vec<&str> {
    let (mut depth, mut start, mut parts) = (0i32, 0, Vec::new());
    for (i, c) in text.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

fn parse_assignment(ring: &FiniteRing, f: &RingFormula, specs: &[String]) -> Result<Assignment, String> {
    let free = f.free_variables();
    let mut env = Assignment::new();
    for part in specs.iter().flat_map(|s| split_top_level(s)) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (name, value) = part.split_once('=').ok_or_else(|| format!("assignment `{part}` is not of the form xN=value"))?;
        let var: Var = name
            .trim()
            .strip_prefix('x')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| format!("`{}` is not a variable name", name.trim()))?;
        if !free.contains(&var) {
            return Err(format!("x{var} is not a free variable of the formula"));
        }
        let x = parse_element(ring, value).map_err(|e| e.to_string())?;
        if env.insert(var, x).is_some() {
            return Err(format!("x{var} is assigned twice"));
        }
    }
    if let Some(v) = free.iter().find(|v| !env.contains_key(v)) {
        return Err(format!("free variable x{v} has no value"));
    }
    Ok(env)
}

#[derive(Serialize)]
struct ParseJson {
    formula: String,
    canonical: String,
    free_variables: Vec<String>,
    quantifier_depth: usize,
    size: usize,
    predicted_cells: Option<u128>,
}

pub fn parse(text: &str, common: &Common) -> CmdResult {
    let f = formula(text)?;
    let report = ParseJson {
        formula: f.to_string(),
        canonical: f.canonicalize().to_string(),
        free_variables: var_list(f.free_variables()),
        quantifier_depth: f.quantifier_depth(),
        size: f.size(),
        predicted_cells: predicted_cells(&f.canonicalize()),
    };
    let text = match common.format {
        Format::Json => json(&report),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "formula: {}", report.formula).unwrap();
            writeln!(s, "canonical: {}", report.canonical).unwrap();
            writeln!(s, "free variables: {}", report.free_variables.join(", ")).unwrap();
            writeln!(s, "quantifier depth: {}", report.quantifier_depth).unwrap();
            writeln!(s, "size: {}", report.size).unwrap();
            s
        }
    };
    Ok(Output { text, ok: true })
}

#[derive(Serialize)]
struct EvalJson {
    ring: String,
    formula: String,
    assignment: BTreeMap<String, String>,
    direct: bool,
    fv: bool,
    agree: bool,
}

pub fn eval(desc: &str, text: &str, assign: &[String], common: &Common) -> CmdResult {
    let r = ring(desc)?;
    let f = formula(text)?;
    let env = parse_assignment(&r, &f, assign)?;
    let direct = eval_direct(&r, &f, &env).map_err(|e| e.to_string())?;
    let cfg = config(common);
    let translation = translate_with(&f, &cfg).map_err(|e| e.to_string())?;
    let fv = eval_translation(&translation, &r, &env).map_err(|e| e.to_string())?;
    let report = EvalJson {
        ring: r.label().to_string(),
        formula: f.to_string(),
        assignment: env.iter().map(|(v, x)| (format!("x{v}"), r.format_elem(*x))).collect(),
        direct,
        fv,
        agree: direct == fv,
    };
    let text = match common.format {
        Format::Json => json(&report),
        Format::Text => {
            let shown: Vec<String> = report.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let mut s = String::new();
            writeln!(s, "ring: {}", report.ring).unwrap();
            writeln!(s, "formula: {}", report.formula).unwrap();
            writeln!(s, "assignment: {}", shown.join(", ")).unwrap();
            writeln!(s, "direct: {direct}").unwrap();
            writeln!(s, "via translation: {fv}").unwrap();
            s
        }
    };
    Ok(Output { text, ok: report.agree })
}

pub fn translate(text: &str, common: &Common) -> CmdResult {
    let f = formula(text)?;
    let result = translate_with(&f, &config(common)).map_err(|e| e.to_string())?;
    let text = match common.format {
        Format::Json => json(&result.to_json()),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "source: {}", result.source).unwrap();
            writeln!(s, "psi: {}", result.psi()).unwrap();
            writeln!(s, "cells ({}):", result.cell_count()).unwrap();
            for (i, c) in result.cells().iter().enumerate() {
                writeln!(s, "  y{i}: {c}").unwrap();
            }
            s
        }
    };
    Ok(Output { text, ok: true })
}

#[derive(Serialize)]
struct CheckJson<'a> {
    formula_suite: &'a str,
    seed: u64,
    sample: Option<usize>,
    max_depth: usize,
    max_cells: u128,
    passed: bool,
    report: &'a CheckReport,
}

pub fn check(descs: &[String], suite: &str, seed: u64, sample: Option<usize>, common: &Common) -> CmdResult {
    let rings = descs.iter().map(|d| ring(d)).collect::<Result<Vec<_>, _>>()?;
    let mut formulas = load_suite(suite).map_err(|e| e.to_string())?;
    if let Some(k) = sample {
        formulas = sample_ordered(&formulas, k, seed);
    }
    let cfg = config(common);
    let report = CheckReport::run(&rings, &formulas, &cfg);
    let passed = report.passed();
    let text = match common.format {
        Format::Json => json(&CheckJson {
            formula_suite: suite,
            seed,
            sample,
            max_depth: cfg.max_depth,
            max_cells: cfg.max_cells,
            passed,
            report: &report,
        }),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "formula suite: {suite} ({} formulas, seed {seed})", report.formulas).unwrap();
            for r in &report.rings {
                writeln!(
                    s,
                    "{}: {} formulas, {} instances, {} mismatches, {} partition failures",
                    r.ring, r.formulas, r.instances, r.mismatches, r.partition_failures
                )
                .unwrap();
            }
            writeln!(
                s,
                "total: {} instances, {} mismatches, {} partition failures, {} skipped",
                report.instances,
                report.mismatch_count,
                report.partition_failure_count,
                report.skipped.len()
            )
            .unwrap();
            let show = |a: &BTreeMap<String, String>| -> String {
                a.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ")
            };
            for m in &report.mismatches {
                let fv = m.fv.map_or("none".to_string(), |b| b.to_string());
                writeln!(s, "mismatch: {} | {} | {} | direct {} fv {fv}", m.ring, m.formula, show(&m.assignment), m.direct)
                    .unwrap();
            }
            for p in &report.partition_failures {
                writeln!(s, "partition failure: {} | {} | {}", p.ring, p.formula, show(&p.assignment)).unwrap();
            }
            for k in &report.skipped {
                writeln!(s, "skipped: {} | {}", k.formula, k.reason).unwrap();
            }
            writeln!(s, "verdict: {}", if passed { "PASS" } else { "FAIL" }).unwrap();
            s
        }
    };
    Ok(Output { text, ok: passed })
}

pub fn axioms(descs: &[String], budget: usize, seed: u64, common: &Common) -> CmdResult {
    let rings = descs.iter().map(|d| ring(d)).collect::<Result<Vec<_>, _>>()?;
    let cfg = AxiomConfig { formula_budget: budget, seed, ..AxiomConfig::default() };
    let reports: Vec<AxiomReport> = rings.iter().flat_map(|r| run_axiom_suite(r, &cfg)).collect();
    let ok = reports.iter().all(AxiomReport::passed);
    let text = match common.format {
        Format::Json => json(&reports),
        Format::Text => {
            let mut s = String::new();
            for r in &reports {
                let verdict = if r.passed() { "pass" } else { "FAIL" };
                writeln!(s, "{} axiom {}: {} instances, {verdict}", r.ring, r.axiom, r.instances).unwrap();
                if let Some(ce) = &r.counterexample {
                    if let Some(f) = &ce.formula {
                        writeln!(s, "  formula: {f}").unwrap();
                    }
                    for (k, v) in ce.assignment.iter().chain(&ce.elements) {
                        writeln!(s, "  {k} = {v}").unwrap();
                    }
                    writeln!(s, "  {}", ce.detail).unwrap();
                }
            }
            s
        }
    };
    Ok(Output { text, ok })
}

pub fn equiv(left: &str, right: &str, sentences: &str, common: &Common) -> CmdResult {
    let (l, r) = (ring(left)?, ring(right)?);
    let list = if sentences == DEFAULT_SENTENCES {
        sentence_suite()
    } else {
        let text = std::fs::read_to_string(sentences).map_err(|e| format!("cannot read {sentences}: {e}"))?;
        parse_suite(&text).map_err(|e| e.to_string())?
    };
    let report = compare_sentences(&l, &r, &list, &config(common)).map_err(|e| e.to_string())?;
    let text = match common.format {
        Format::Json => json(&report),
        Format::Text => {
            let show = |b: Option<bool>| b.map_or("-".to_string(), |b| b.to_string());
            let mut s = String::new();
            writeln!(s, "left: {}", report.left).unwrap();
            writeln!(s, "right: {}", report.right).unwrap();
            for o in &report.sentences {
                writeln!(
                    s,
                    "{} | left {} (fv {}) | right {} (fv {}){}",
                    o.sentence,
                    o.direct_left,
                    show(o.fv_left),
                    o.direct_right,
                    show(o.fv_right),
                    if o.agree { "" } else { " | DISAGREE" }
                )
                .unwrap();
                if let Some(e) = &o.error {
                    writeln!(s, "  {e}").unwrap();
                }
            }
            let agreeing = report.sentences.iter().filter(|o| o.agree).count();
            writeln!(s, "agree on {agreeing} of {} sentences", report.sentences.len()).unwrap();
            s
        }
    };
    Ok(Output { text, ok: report.passed })
}

#[derive(Serialize)]
struct StalkJson {
    unit: String,
    size: usize,
    structure: String,
    connected: bool,
    elements: Vec<String>,
}

#[derive(Serialize)]
struct AtomsJson {
    ring: String,
    size: usize,
    idempotents: Vec<String>,
    atoms: Vec<String>,
    connected: bool,
    stalks: Vec<StalkJson>,
}

pub fn atoms(desc: &str, common: &Common) -> CmdResult {
    let r = ring(desc)?;
    let show = |xs: &[fvring::rings::Elem]| xs.iter().map(|&x| r.format_elem(x)).collect::<Vec<_>>();
    let report = AtomsJson {
        ring: r.label().to_string(),
        size: r.size(),
        idempotents: show(r.idempotents()),
        atoms: show(r.atoms()),
        connected: r.is_connected(),
        stalks: r
            .atom_stalks()
            .iter()
            .map(|st| StalkJson {
                unit: r.format_elem(st.unit),
                size: st.ring.size(),
                structure: st.ring.describe_structure(),
                connected: st.ring.is_connected(),
                elements: st.ring.elements().map(|y| r.format_elem(st.lift(y))).collect(),
            })
            .collect(),
    };
    let text = match common.format {
        Format::Json => json(&report),
        Format::Text => {
            let mut s = String::new();
            writeln!(s, "ring: {} ({} elements)", report.ring, report.size).unwrap();
            writeln!(s, "idempotents: {}", report.idempotents.join(", ")).unwrap();
            writeln!(s, "atoms: {}", report.atoms.join(", ")).unwrap();
            writeln!(s, "connected: {}", if report.connected { "yes" } else { "no" }).unwrap();
            writeln!(s, "stalks:").unwrap();
            for st in &report.stalks {
                writeln!(s, "  e = {}: eR = {{{}}} ≅ {}", st.unit, st.elements.join(", "), st.structure).unwrap();
            }
            s
        }
    };
    Ok(Output { text, ok: true })
}
