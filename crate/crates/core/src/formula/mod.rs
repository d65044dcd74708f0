//! Syntax trees, printers and parsers for the ring language and the
//! language of Boolean algebras.

pub mod boolean;
pub mod parse;
pub mod print;
pub mod ring;

pub use boolean::{BoolFormula, BoolTerm};
pub use parse::{parse_bool_formula, parse_ring_formula, parse_ring_term, ParseError, ParseErrorKind};
pub use ring::{RingFormula, RingTerm, Var};
