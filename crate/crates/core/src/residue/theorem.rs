//! Atoms of `Z/n`, their stalks, and the comparison of `Z/n` with the
//! product of the `Z/q` over the maximal prime powers `q | n`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use super::arith::{crt_solve, factor, ArithError};
use crate::formula::RingFormula;
use crate::rings::{FiniteRing, RingError};
use crate::semantics::{eval_direct, Assignment};
use crate::boolalg::IdempotentAlgebra;
use crate::translate::{translate_with, Checker, TranslateConfig};

/// The atom `e_q` of `Z/n` for each maximal prime power `q`, with
/// `e_q ≡ 1 (mod q)` and `e_q ≡ 0` modulo every other maximal prime power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomTable {
    pub n: u64,
    by_q: BTreeMap<u64, u64>,
    #[serde(skip)]
    by_e: BTreeMap<u64, u64>,
}

impl AtomTable {
    pub fn atom(&self, q: u64) -> Option<u64> {
        self.by_q.get(&q).copied()
    }

    /// The prime power whose atom is `e`.
    pub fn modulus_of(&self, e: u64) -> Option<u64> {
        self.by_e.get(&e).copied()
    }

    /// `(q, e_q)` in increasing order of `q`.
    pub fn entries(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.by_q.iter().map(|(&q, &e)| (q, e))
    }

    /// The atoms in increasing order.
    pub fn atoms(&self) -> Vec<u64> {
        self.by_e.keys().copied().collect()
    }
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    (a as u128 * b as u128 % n as u128) as u64
}

/// Whether every maximal prime power of `n` divides `r` or `r - 1`.
pub fn idempotent_by_divisibility(n: u64, r: u64) -> Result<bool, ArithError> {
    let d = factor(n)?;
    Ok(d.moduli().iter().all(|&q| r.is_multiple_of(q) || (r + q - 1).is_multiple_of(q)))
}

pub fn atom_table(n: u64) -> Result<AtomTable, ArithError> {
    let moduli = factor(n)?.moduli();
    let mut by_q = BTreeMap::new();
    if moduli.len() == 1 {
        by_q.insert(n, 1);
    } else {
        for &q in &moduli {
            let residues: Vec<(u64, u64)> = moduli.iter().map(|&m| (u64::from(m == q), m)).collect();
            by_q.insert(q, crt_solve(&residues)?);
        }
    }
    // The idempotents are the 2^|Q| CRT combinations of 0 and 1; an atom
    // is minimal when the only idempotents below it are 0 and itself.
    let idempotents: Vec<u64> = (0u64..1 << moduli.len())
        .map(|mask| {
            let residues: Vec<(u64, u64)> =
                moduli.iter().enumerate().map(|(i, &m)| ((mask >> i) & 1, m)).collect();
            crt_solve(&residues)
        })
        .collect::<Result<_, _>>()?;
    for &e in by_q.values() {
        assert_eq!(mul_mod(e, e, n), e % n, "e_q is idempotent");
        assert!(
            idempotents.iter().all(|&f| f == 0 || f == e || mul_mod(f, e, n) != f),
            "e_q is minimal"
        );
    }
    let by_e = by_q.iter().map(|(&q, &e)| (e, q)).collect();
    Ok(AtomTable { n, by_q, by_e })
}

/// Checks exhaustively that `x ↦ x mod q` maps `e_q·Z/n` bijectively onto
/// `Z/q`, sends `e_q` to `1`, and preserves addition and multiplication.
/// Returns `false` when `q` is not a maximal prime power of `n`.
pub fn stalk_isomorphism_check(n: u64, q: u64) -> Result<bool, ArithError> {
    let table = atom_table(n)?;
    let Some(e) = table.atom(q) else { return Ok(false) };
    let mut members: Vec<u64> = (0..n).map(|x| mul_mod(e, x, n)).collect();
    members.sort_unstable();
    members.dedup();
    let mut images: Vec<u64> = members.iter().map(|&y| y % q).collect();
    images.sort_unstable();
    if images != (0..q).collect::<Vec<_>>() || e % q != 1 % q {
        return Ok(false);
    }
    for &a in &members {
        for &b in &members {
            if (a + b) % n % q != (a % q + b % q) % q || mul_mod(a, b, n) % q != mul_mod(a % q, b % q, q) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("`{0}` is not a sentence")]
    NotClosed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceOutcome {
    pub sentence: String,
    pub direct_left: bool,
    pub direct_right: bool,
    pub fv_left: Option<bool>,
    pub fv_right: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremMainReport {
    pub n: u64,
    pub product: String,
    pub sentences: Vec<SentenceOutcome>,
    pub passed: bool,
}

/// Sentence-by-sentence comparison of two rings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub left: String,
    pub right: String,
    pub sentences: Vec<SentenceOutcome>,
    pub passed: bool,
}

/// Evaluates every sentence on both rings, directly and through its
/// translation, and records whether the four values coincide. Sentences
/// are handled on separate threads; the rows keep the input order.
pub fn compare_sentences(
    left: &FiniteRing,
    right: &FiniteRing,
    sentences: &[RingFormula],
    config: &TranslateConfig,
) -> Result<EquivalenceReport, TheoremError> {
    if let Some(s) = sentences.iter().find(|s| !s.free_variables().is_empty()) {
        return Err(TheoremError::NotClosed(s.to_string()));
    }
    let (alg_left, alg_right) = (IdempotentAlgebra::new(left), IdempotentAlgebra::new(right));
    let empty = Assignment::new();
    let outcomes: Vec<SentenceOutcome> = std::thread::scope(|scope| {
        let handles: Vec<_> = sentences
            .iter()
            .map(|sigma| {
                let (alg_left, alg_right, empty) = (&alg_left, &alg_right, &empty);
                scope.spawn(move || {
                    let direct_left = eval_direct(left, sigma, empty).expect("closed");
                    let direct_right = eval_direct(right, sigma, empty).expect("closed");
                    let (fv_left, fv_right, error) = match translate_with(sigma, config) {
                        Ok(result) => {
                            let checker = Checker::new(result);
                            let fv_left = checker.sweep(left, alg_left).check(empty).fv;
                            let fv_right = checker.sweep(right, alg_right).check(empty).fv;
                            (fv_left, fv_right, None)
                        }
                        Err(e) => (None, None, Some(e.to_string())),
                    };
                    let agree = direct_left == direct_right
                        && fv_left == Some(direct_left)
                        && fv_right == Some(direct_right);
                    SentenceOutcome {
                        sentence: sigma.to_string(),
                        direct_left,
                        direct_right,
                        fv_left,
                        fv_right,
                        error,
                        agree,
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sentence thread")).collect()
    });
    let passed = outcomes.iter().all(|o| o.agree);
    Ok(EquivalenceReport {
        left: left.label().to_string(),
        right: right.label().to_string(),
        sentences: outcomes,
        passed,
    })
}

/// `Z/n` against the product of the `Z/q` over its maximal prime powers.
pub fn check_theorem_main(
    n: u64,
    sentences: &[RingFormula],
    config: &TranslateConfig,
) -> Result<TheoremMainReport, TheoremError> {
    let moduli = factor(n)?.moduli();
    let size = u32::try_from(n).map_err(|_| ArithError::Overflow)?;
    let zn = FiniteRing::modular(size)?;
    let factors = moduli
        .iter()
        .map(|&q| FiniteRing::modular(q as u32))
        .collect::<Result<Vec<_>, _>>()?;
    let product = FiniteRing::product(factors)?;
    let report = compare_sentences(&zn, &product, sentences, config)?;
    Ok(TheoremMainReport { n, product: report.right, sentences: report.sentences, passed: report.passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_ring_formula;
    use crate::rings::Elem;

    #[test]
    fn atom_table_examples() {
        let t6: Vec<(u64, u64)> = atom_table(6).unwrap().entries().collect();
        assert_eq!(t6, vec![(2, 3), (3, 4)]);
        let t60 = atom_table(60).unwrap();
        assert_eq!((t60.atom(4), t60.atom(3), t60.atom(5)), (Some(45), Some(40), Some(36)));
        assert_eq!(t60.modulus_of(40), Some(3));
        assert_eq!(t60.atoms(), vec![36, 40, 45]);
        let t8: Vec<(u64, u64)> = atom_table(8).unwrap().entries().collect();
        assert_eq!(t8, vec![(8, 1)]);
        assert_eq!(atom_table(1), Err(ArithError::TooSmall(1)));
    }

    #[test]
    fn atom_table_sums_to_one_and_is_orthogonal() {
        for n in 2..=300u64 {
            let t = atom_table(n).unwrap();
            let atoms = t.atoms();
            assert_eq!(atoms.iter().sum::<u64>() % n, 1 % n);
            for (i, &a) in atoms.iter().enumerate() {
                for &b in &atoms[i + 1..] {
                    assert_eq!(mul_mod(a, b, n), 0);
                }
            }
        }
    }

    #[test]
    fn stalk_isomorphism_examples() {
        assert_eq!(stalk_isomorphism_check(6, 3), Ok(true));
        assert_eq!(stalk_isomorphism_check(6, 2), Ok(true));
        assert_eq!(stalk_isomorphism_check(9, 9), Ok(true));
        assert_eq!(stalk_isomorphism_check(6, 5), Ok(false));
        let members: Vec<u64> = {
            let mut m: Vec<u64> = (0..6).map(|x| 4 * x % 6).collect();
            m.sort_unstable();
            m.dedup();
            m
        };
        assert_eq!(members, vec![0, 2, 4]);
    }

    #[test]
    fn divisibility_characterizes_idempotents() {
        for n in [6u32, 12, 30, 60, 210, 64, 97] {
            let ring = FiniteRing::modular(n).unwrap();
            for x in ring.elements() {
                assert_eq!(idempotent_by_divisibility(n as u64, x.0 as u64), Ok(ring.is_idempotent(x)), "{n} {x:?}");
            }
        }
    }

    #[test]
    fn theorem_main_examples() {
        let sigma = parse_ring_formula("E x0. x0*x0 = x0 & ~(x0 = 0) & ~(x0 = 1)").unwrap();
        let cube = parse_ring_formula("A x0. x0*x0*x0 = x0").unwrap();
        let r = check_theorem_main(60, &[sigma.clone(), cube.clone()], &TranslateConfig::default()).unwrap();
        assert!(r.passed);
        assert!(r.sentences[0].direct_left && r.sentences[0].direct_right);
        assert!(FiniteRing::modular(60).unwrap().is_idempotent(Elem(45)));
        let r6 = check_theorem_main(6, &[cube], &TranslateConfig::default()).unwrap();
        assert!(r6.passed && r6.sentences[0].direct_left);
        let r8 = check_theorem_main(8, &[sigma], &TranslateConfig::default()).unwrap();
        assert!(r8.passed && !r8.sentences[0].direct_left);
        let open = parse_ring_formula("x0 = 0").unwrap();
        assert!(matches!(
            check_theorem_main(6, &[open], &TranslateConfig::default()),
            Err(TheoremError::NotClosed(_))
        ));
    }
}
