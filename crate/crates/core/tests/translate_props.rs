mod common;

use common::{env_from, ring_formula, small_ring};
use fvring::boolalg::IdempotentAlgebra;
use fvring::formula::RingFormula;
use fvring::semantics::{boolean_value_batch, eval_direct};
use fvring::translate::{eval_translation, predicted_cells, translate, translate_with, Checker, TranslateConfig};
use proptest::prelude::*;

/// Translation guarded by a small cell cap so random formulas stay cheap.
fn small_translation(f: &RingFormula) -> Option<fvring::translate::TranslationResult> {
    translate_with(f, &TranslateConfig { max_cells: 1 << 10, ..TranslateConfig::default() }).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn translation_agrees_with_direct_evaluation(ring in small_ring(), f in ring_formula(3), raw in prop::collection::vec(any::<u32>(), 3)) {
        let Some(result) = small_translation(&f) else { return Ok(()) };
        let env = env_from(&ring, &raw);
        let direct = eval_direct(&ring, &f, &env).unwrap();
        prop_assert_eq!(eval_translation(&result, &ring, &env).unwrap(), direct, "{}", f);
        let checker = Checker::new(result);
        let alg = IdempotentAlgebra::new(&ring);
        let free_env = env.into_iter().filter(|(v, _)| checker.free_vars().contains(v)).collect();
        let inst = checker.sweep(&ring, &alg).check(&free_env);
        prop_assert!(inst.partition_ok);
        prop_assert_eq!(inst.fv, Some(direct));
    }

    #[test]
    fn cells_form_a_partition(ring in small_ring(), f in ring_formula(3), raw in prop::collection::vec(any::<u32>(), 3)) {
        let Some(result) = small_translation(&f) else { return Ok(()) };
        let env = env_from(&ring, &raw);
        let cells: Vec<RingFormula> = result.cells().iter().map(|c| RingFormula::clone(c)).collect();
        let values: Vec<_> = boolean_value_batch(&ring, &cells, &env).unwrap().into_iter().map(|b| b.value).collect();
        prop_assert!(IdempotentAlgebra::new(&ring).is_partition(&values));
    }

    #[test]
    fn shape_of_the_result(f in ring_formula(3)) {
        let Some(result) = small_translation(&f) else { return Ok(()) };
        prop_assert_eq!(predicted_cells(&result.canonical), Some(result.cell_count() as u128));
        prop_assert_eq!(result.trace.last().map(|s| s.cells), Some(result.cell_count()));
        let source_free = f.free_variables();
        for c in result.cells() {
            prop_assert!(c.free_variables().is_subset(&source_free));
            prop_assert!(c.quantifier_depth() <= f.canonicalize().quantifier_depth());
        }
        prop_assert!(result.psi().free_variables().iter().all(|&v| (v as usize) < result.cell_count()));
        prop_assert!(result.psi().free_variables().len() <= result.cell_count());
    }

    #[test]
    fn translation_is_deterministic(f in ring_formula(3)) {
        let Some(first) = small_translation(&f) else { return Ok(()) };
        let second = small_translation(&f).unwrap();
        prop_assert_eq!(first.to_json(), second.to_json());
    }

    #[test]
    fn refused_exactly_beyond_the_caps(f in ring_formula(3)) {
        let cfg = TranslateConfig { max_cells: 1 << 10, ..TranslateConfig::default() };
        let canonical = f.canonicalize();
        let within = canonical.quantifier_depth() <= cfg.max_depth
            && predicted_cells(&canonical).is_some_and(|c| c <= cfg.max_cells);
        prop_assert_eq!(translate_with(&f, &cfg).is_ok(), within);
    }
}

#[test]
fn atomic_formula_base_case() {
    let f = fvring::formula::parse_ring_formula("x0 = 0").unwrap();
    let r = translate(&f).unwrap();
    assert_eq!(r.cell_count(), 2);
    assert_eq!(r.psi().to_string(), "y0 = 1");
}
