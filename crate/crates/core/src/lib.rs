pub mod axioms;
pub mod boolalg;
pub mod formula;
pub mod residue;
pub mod rings;
pub mod semantics;
pub mod suite;
pub mod translate;
