//! Residue rings `Z/n` through their prime-power decomposition.

pub mod arith;
mod theorem;

pub use arith::{crt_solve, factor, ArithError, PrimePower, PrimePowerDecomposition};
pub use theorem::{
    atom_table, check_theorem_main, compare_sentences, idempotent_by_divisibility, stalk_isomorphism_check, AtomTable, EquivalenceReport, SentenceOutcome,
    TheoremError, TheoremMainReport,
};
