//! Concrete syntax for both languages.
//!
//! The printers emit exactly as many parentheses as the grammar needs, so
//! parsing the printed text gives back the same tree. Quantifiers are only
//! printed bare at formula level; as an operand of a connective they are
//! always wrapped.

use std::fmt::{self, Write};

use super::boolean::{BoolFormula, BoolTerm};
use super::ring::{RingFormula, RingTerm};

// Formula contexts: 0 = formula, 1 = disjunct, 2 = conjunct, 3 = literal.
const CTX_FORMULA: u8 = 0;
const CTX_DISJ: u8 = 1;
const CTX_CONJ: u8 = 2;
const CTX_LIT: u8 = 3;

fn write_ring_term(t: &RingTerm, ctx: u8, out: &mut impl Write) -> fmt::Result {
    if let Some(k) = t.as_numeral() {
        return write!(out, "{k}");
    }
    match t {
        RingTerm::Var(v) => write!(out, "x{v}"),
        RingTerm::Zero => out.write_str("0"),
        RingTerm::One => out.write_str("1"),
        RingTerm::Add(a, b) | RingTerm::Sub(a, b) => {
            let op = if matches!(t, RingTerm::Add(..)) { " + " } else { " - " };
            if ctx > 0 {
                out.write_char('(')?;
            }
            write_ring_term(a, 0, out)?;
            out.write_str(op)?;
            write_ring_term(b, 1, out)?;
            if ctx > 0 {
                out.write_char(')')?;
            }
            Ok(())
        }
        RingTerm::Mul(a, b) => {
            if ctx > 1 {
                out.write_char('(')?;
            }
            write_ring_term(a, 1, out)?;
            out.write_str(" * ")?;
            write_ring_term(b, 2, out)?;
            if ctx > 1 {
                out.write_char(')')?;
            }
            Ok(())
        }
    }
}

fn write_ring_formula(f: &RingFormula, ctx: u8, out: &mut impl Write) -> fmt::Result {
    match f {
        RingFormula::Eq(l, r) => {
            write_ring_term(l, 0, out)?;
            out.write_str(" = ")?;
            write_ring_term(r, 0, out)
        }
        RingFormula::Not(a) => {
            out.write_char('~')?;
            if a.is_atomic() {
                out.write_char('(')?;
                write_ring_formula(a, CTX_FORMULA, out)?;
                out.write_char(')')
            } else {
                write_ring_formula(a, CTX_LIT, out)
            }
        }
        RingFormula::And(a, b) => binary(out, ctx, CTX_CONJ, " & ", |o| {
            write_ring_formula(a, CTX_CONJ, o)
        }, |o| write_ring_formula(b, CTX_LIT, o)),
        RingFormula::Or(a, b) => binary(out, ctx, CTX_DISJ, " | ", |o| {
            write_ring_formula(a, CTX_DISJ, o)
        }, |o| write_ring_formula(b, CTX_CONJ, o)),
        RingFormula::Implies(a, b) => binary(out, ctx, CTX_FORMULA, " -> ", |o| {
            write_ring_formula(a, CTX_DISJ, o)
        }, |o| write_ring_formula(b, CTX_FORMULA, o)),
        RingFormula::Exists(v, body) | RingFormula::Forall(v, body) => {
            let q = if matches!(f, RingFormula::Exists(..)) { 'E' } else { 'A' };
            let wrap = ctx > CTX_FORMULA;
            if wrap {
                out.write_char('(')?;
            }
            write!(out, "{q} x{v}. ")?;
            write_ring_formula(body, CTX_FORMULA, out)?;
            if wrap {
                out.write_char(')')?;
            }
            Ok(())
        }
    }
}

fn binary<W: Write>(
    out: &mut W,
    ctx: u8,
    level: u8,
    op: &str,
    left: impl FnOnce(&mut W) -> fmt::Result,
    right: impl FnOnce(&mut W) -> fmt::Result,
) -> fmt::Result {
    let wrap = ctx > level;
    if wrap {
        out.write_char('(')?;
    }
    left(out)?;
    out.write_str(op)?;
    right(out)?;
    if wrap {
        out.write_char(')')?;
    }
    Ok(())
}

fn write_bool_term(t: &BoolTerm, ctx: u8, out: &mut impl Write) -> fmt::Result {
    match t {
        BoolTerm::Var(v) => write!(out, "y{v}"),
        BoolTerm::Bot => out.write_str("0"),
        BoolTerm::Top => out.write_str("1"),
        BoolTerm::Join(a, b) => {
            if ctx > 0 {
                out.write_char('(')?;
            }
            write_bool_term(a, 0, out)?;
            out.write_str(" v ")?;
            write_bool_term(b, 1, out)?;
            if ctx > 0 {
                out.write_char(')')?;
            }
            Ok(())
        }
        BoolTerm::Meet(a, b) => {
            if ctx > 1 {
                out.write_char('(')?;
            }
            write_bool_term(a, 1, out)?;
            out.write_str(" ^ ")?;
            write_bool_term(b, 2, out)?;
            if ctx > 1 {
                out.write_char(')')?;
            }
            Ok(())
        }
        BoolTerm::Complement(a) => {
            out.write_char('~')?;
            write_bool_term(a, 2, out)
        }
    }
}

fn write_bool_formula(f: &BoolFormula, ctx: u8, out: &mut impl Write) -> fmt::Result {
    match f {
        BoolFormula::Eq(l, r) => {
            if let Some((a, b)) = f.as_le() {
                write_bool_term(a, 0, out)?;
                out.write_str(" <= ")?;
                return write_bool_term(b, 0, out);
            }
            write_bool_term(l, 0, out)?;
            out.write_str(" = ")?;
            write_bool_term(r, 0, out)
        }
        BoolFormula::Not(a) => {
            out.write_char('~')?;
            if matches!(**a, BoolFormula::Eq(..)) {
                out.write_char('(')?;
                write_bool_formula(a, CTX_FORMULA, out)?;
                out.write_char(')')
            } else {
                write_bool_formula(a, CTX_LIT, out)
            }
        }
        BoolFormula::And(a, b) => binary(out, ctx, CTX_CONJ, " & ", |o| {
            write_bool_formula(a, CTX_CONJ, o)
        }, |o| write_bool_formula(b, CTX_LIT, o)),
        BoolFormula::Or(a, b) => binary(out, ctx, CTX_DISJ, " | ", |o| {
            write_bool_formula(a, CTX_DISJ, o)
        }, |o| write_bool_formula(b, CTX_CONJ, o)),
        BoolFormula::Implies(a, b) => binary(out, ctx, CTX_FORMULA, " -> ", |o| {
            write_bool_formula(a, CTX_DISJ, o)
        }, |o| write_bool_formula(b, CTX_FORMULA, o)),
        BoolFormula::Exists(v, body) | BoolFormula::Forall(v, body) => {
            let q = if matches!(f, BoolFormula::Exists(..)) { 'E' } else { 'A' };
            let wrap = ctx > CTX_FORMULA;
            if wrap {
                out.write_char('(')?;
            }
            write!(out, "{q} y{v}. ")?;
            write_bool_formula(body, CTX_FORMULA, out)?;
            if wrap {
                out.write_char(')')?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for RingTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ring_term(self, 0, f)
    }
}

impl fmt::Display for RingFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ring_formula(self, CTX_FORMULA, f)
    }
}

impl fmt::Display for BoolTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_bool_term(self, 0, f)
    }
}

impl fmt::Display for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_bool_formula(self, CTX_FORMULA, f)
    }
}
