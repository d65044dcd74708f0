//! Recursive-descent parsers for the ring and Boolean grammars.
//!
//! Precedence, loosest first: quantifier / `->` (right associative), `|`,
//! `&`, `~`. A quantifier body extends as far right as possible, and a
//! quantifier may start any literal, so `a & E x1. b | c` reads as
//! `a & (E x1. (b | c))`.
//!
//! In the Boolean grammar `w<n>` names are accepted next to `y<n>`; each
//! `w<n>` maps to index `k + 1 + n` where `k` is the largest `y` index in
//! the text (or `-1` when there is none).

use std::sync::Arc;

use thiserror::Error;

use super::boolean::{BoolFormula, BoolTerm};
use super::ring::{RingFormula, RingTerm, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("malformed variable name `{0}`")]
    MalformedVariable(String),
    #[error("{0}")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Exists,
    Forall,
    Dot,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Equals,
    Le,
    Plus,
    Minus,
    Star,
    Caret,
    Join,
    Comma,
    Num(u64),
    /// Variable: prefix letter and index.
    Var(char, Var),
    Part(usize),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Exists => "`E`".into(),
            Tok::Forall => "`A`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Equals => "`=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Join => "`v`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Num(n) => format!("numeral `{n}`"),
            Tok::Var(c, i) => format!("variable `{c}{i}`"),
            Tok::Part(n) => format!("`part{n}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lang {
    Ring,
    Bool,
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, lang: Lang) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, kind| ParseError { line, column, kind };
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok: Tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: start_line, column: start_col });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            'E' => push(Tok::Exists, 1, &mut i, &mut col),
            'A' => push(Tok::Forall, 1, &mut i, &mut col),
            '.' => push(Tok::Dot, 1, &mut i, &mut col),
            '~' => push(Tok::Tilde, 1, &mut i, &mut col),
            '&' => push(Tok::Amp, 1, &mut i, &mut col),
            '|' => push(Tok::Pipe, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '=' => push(Tok::Equals, 1, &mut i, &mut col),
            '+' if lang == Lang::Ring => push(Tok::Plus, 1, &mut i, &mut col),
            '*' if lang == Lang::Ring => push(Tok::Star, 1, &mut i, &mut col),
            '^' if lang == Lang::Bool => push(Tok::Caret, 1, &mut i, &mut col),
            ',' if lang == Lang::Bool => push(Tok::Comma, 1, &mut i, &mut col),
            '-' if chars.get(i + 1) == Some(&'>') => push(Tok::Arrow, 2, &mut i, &mut col),
            '-' if lang == Lang::Ring => push(Tok::Minus, 1, &mut i, &mut col),
            '<' if chars.get(i + 1) == Some(&'=') && lang == Lang::Bool => {
                push(Tok::Le, 2, &mut i, &mut col)
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                let n: u64 = digits.parse().map_err(|_| {
                    err(start_line, start_col, ParseErrorKind::Syntax(format!("numeral `{digits}` is too large")))
                })?;
                push(Tok::Num(n), j - i, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = classify_word(&word, lang)
                    .map_err(|kind| err(start_line, start_col, kind))?;
                push(tok, j - i, &mut i, &mut col);
            }
            other => {
                return Err(err(start_line, start_col, ParseErrorKind::UnknownToken(other.to_string())))
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

fn classify_word(word: &str, lang: Lang) -> Result<Tok, ParseErrorKind> {
    if lang == Lang::Bool && word == "v" {
        return Ok(Tok::Join);
    }
    if lang == Lang::Bool {
        if let Some(rest) = word.strip_prefix("part") {
            return match rest.parse::<usize>() {
                Ok(n) if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) => Ok(Tok::Part(n)),
                _ => Err(ParseErrorKind::UnknownToken(word.to_string())),
            };
        }
    }
    let prefixes: &[char] = match lang {
        Lang::Ring => &['x'],
        Lang::Bool => &['y', 'w'],
    };
    let first = word.chars().next().unwrap_or(' ');
    if prefixes.contains(&first) {
        let rest = &word[1..];
        if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
            if let Ok(index) = rest.parse::<Var>() {
                return Ok(Tok::Var(first, index));
            }
        }
        return Err(ParseErrorKind::MalformedVariable(word.to_string()));
    }
    Err(ParseErrorKind::UnknownToken(word.to_string()))
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    /// Offset for `w<n>` variables in the Boolean grammar.
    w_base: Var,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError { line: s.line, column: s.column, kind: ParseErrorKind::Syntax(msg.into()) }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {}, found {}", tok.describe(), self.peek().describe())))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error_here(format!("unexpected {}", self.peek().describe())))
        }
    }

    fn var_index(&self, prefix: char, index: Var) -> Var {
        if prefix == 'w' {
            self.w_base + index
        } else {
            index
        }
    }

    fn binder(&mut self, lang: Lang) -> Result<Var, ParseError> {
        match self.bump() {
            Tok::Var(p, i) if lang == Lang::Ring && p == 'x' => Ok(i),
            Tok::Var(p, i) if lang == Lang::Bool => Ok(self.var_index(p, i)),
            other => {
                self.pos -= 1;
                Err(self.error_here(format!("expected a variable after quantifier, found {}", other.describe())))
            }
        }
    }

    // ---- ring grammar ----

    fn ring_formula(&mut self) -> Result<RingFormula, ParseError> {
        if matches!(self.peek(), Tok::Exists | Tok::Forall) {
            return self.ring_quant();
        }
        let left = self.ring_disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.ring_formula()?;
            return Ok(RingFormula::implies(left, right));
        }
        Ok(left)
    }

    fn ring_quant(&mut self) -> Result<RingFormula, ParseError> {
        let exists = self.bump() == Tok::Exists;
        let var = self.binder(Lang::Ring)?;
        self.expect(Tok::Dot)?;
        let body = self.ring_formula()?;
        Ok(if exists { RingFormula::exists(var, body) } else { RingFormula::forall(var, body) })
    }

    fn ring_disj(&mut self) -> Result<RingFormula, ParseError> {
        let mut acc = self.ring_conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.ring_conj()?;
            acc = RingFormula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn ring_conj(&mut self) -> Result<RingFormula, ParseError> {
        let mut acc = self.ring_lit()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.ring_lit()?;
            acc = RingFormula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn ring_lit(&mut self) -> Result<RingFormula, ParseError> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(RingFormula::not(self.ring_lit()?))
            }
            Tok::Exists | Tok::Forall => self.ring_quant(),
            Tok::LParen => {
                let save = self.pos;
                match self.ring_atomic() {
                    Ok(f) => Ok(f),
                    Err(term_err) => {
                        self.pos = save;
                        self.bump();
                        let inner = match self.ring_formula() {
                            Ok(f) => f,
                            Err(e) => return Err(furthest(term_err, e)),
                        };
                        self.expect(Tok::RParen).map_err(|e| furthest(term_err, e))?;
                        Ok(inner)
                    }
                }
            }
            _ => self.ring_atomic(),
        }
    }

    fn ring_atomic(&mut self) -> Result<RingFormula, ParseError> {
        let l = self.ring_term()?;
        self.expect(Tok::Equals)?;
        let r = self.ring_term()?;
        Ok(RingFormula::eq(l, r))
    }

    fn ring_term(&mut self) -> Result<RingTerm, ParseError> {
        let mut acc = self.ring_factor()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = RingTerm::add(acc, self.ring_factor()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = RingTerm::sub(acc, self.ring_factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn ring_factor(&mut self) -> Result<RingTerm, ParseError> {
        let mut acc = self.ring_atom()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = RingTerm::mul(acc, self.ring_atom()?);
        }
        Ok(acc)
    }

    fn ring_atom(&mut self) -> Result<RingTerm, ParseError> {
        match self.peek().clone() {
            Tok::Var('x', i) => {
                self.bump();
                Ok(RingTerm::Var(i))
            }
            Tok::Num(n) => {
                self.bump();
                Ok(RingTerm::numeral(n))
            }
            Tok::LParen => {
                self.bump();
                let t = self.ring_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(self.error_here(format!("expected a term, found {}", other.describe()))),
        }
    }

    // ---- Boolean grammar ----

    fn bool_formula(&mut self) -> Result<BoolFormula, ParseError> {
        if matches!(self.peek(), Tok::Exists | Tok::Forall) {
            return self.bool_quant();
        }
        let left = self.bool_disj()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.bool_formula()?;
            return Ok(BoolFormula::implies(left, right));
        }
        Ok(left)
    }

    fn bool_quant(&mut self) -> Result<BoolFormula, ParseError> {
        let exists = self.bump() == Tok::Exists;
        let var = self.binder(Lang::Bool)?;
        self.expect(Tok::Dot)?;
        let body = self.bool_formula()?;
        Ok(if exists { BoolFormula::exists(var, body) } else { BoolFormula::forall(var, body) })
    }

    fn bool_disj(&mut self) -> Result<BoolFormula, ParseError> {
        let mut acc = self.bool_conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.bool_conj()?;
            acc = BoolFormula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn bool_conj(&mut self) -> Result<BoolFormula, ParseError> {
        let mut acc = self.bool_lit()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.bool_lit()?;
            acc = BoolFormula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn bool_lit(&mut self) -> Result<BoolFormula, ParseError> {
        match self.peek().clone() {
            Tok::Exists | Tok::Forall => self.bool_quant(),
            Tok::Part(n) => {
                self.bump();
                self.expect(Tok::LParen)?;
                let mut args = vec![self.bool_term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.bool_term()?);
                }
                self.expect(Tok::RParen)?;
                if n == 0 || args.len() != n {
                    return Err(self.error_here(format!(
                        "part{n} expects {n} argument(s), got {}",
                        args.len()
                    )));
                }
                Ok(BoolFormula::partition(&args))
            }
            Tok::Tilde | Tok::LParen => {
                let save = self.pos;
                match self.bool_atomic() {
                    Ok(f) => Ok(f),
                    Err(term_err) => {
                        self.pos = save;
                        if self.bump() == Tok::Tilde {
                            return self
                                .bool_lit()
                                .map(BoolFormula::not)
                                .map_err(|e| furthest(term_err, e));
                        }
                        let inner = self.bool_formula().map_err(|e| furthest(term_err.clone(), e))?;
                        self.expect(Tok::RParen).map_err(|e| furthest(term_err, e))?;
                        Ok(inner)
                    }
                }
            }
            _ => self.bool_atomic(),
        }
    }

    fn bool_atomic(&mut self) -> Result<BoolFormula, ParseError> {
        let l = self.bool_term()?;
        match self.peek() {
            Tok::Equals => {
                self.bump();
                Ok(BoolFormula::eq(l, self.bool_term()?))
            }
            Tok::Le => {
                self.bump();
                Ok(BoolFormula::le(l, self.bool_term()?))
            }
            other => Err(self.error_here(format!("expected `=` or `<=`, found {}", other.describe()))),
        }
    }

    fn bool_term(&mut self) -> Result<BoolTerm, ParseError> {
        let mut acc = self.bool_factor()?;
        while *self.peek() == Tok::Join {
            self.bump();
            acc = BoolTerm::join(acc, self.bool_factor()?);
        }
        Ok(acc)
    }

    fn bool_factor(&mut self) -> Result<BoolTerm, ParseError> {
        let mut acc = self.bool_unary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            acc = BoolTerm::meet(acc, self.bool_unary()?);
        }
        Ok(acc)
    }

    fn bool_unary(&mut self) -> Result<BoolTerm, ParseError> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(BoolTerm::Complement(Arc::new(self.bool_unary()?)))
            }
            Tok::Var(p, i) => {
                self.bump();
                Ok(BoolTerm::Var(self.var_index(p, i)))
            }
            Tok::Num(0) => {
                self.bump();
                Ok(BoolTerm::Bot)
            }
            Tok::Num(1) => {
                self.bump();
                Ok(BoolTerm::Top)
            }
            Tok::Num(n) => Err(self.error_here(format!("only 0 and 1 are Boolean constants, found {n}"))),
            Tok::LParen => {
                self.bump();
                let t = self.bool_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(self.error_here(format!("expected a Boolean term, found {}", other.describe()))),
        }
    }
}

/// Of two failed alternatives, report the one that got further.
fn furthest(a: ParseError, b: ParseError) -> ParseError {
    if (b.line, b.column) >= (a.line, a.column) {
        b
    } else {
        a
    }
}

/// Parses a formula of the ring language.
pub fn parse_ring_formula(text: &str) -> Result<RingFormula, ParseError> {
    let toks = lex(text, Lang::Ring)?;
    let mut p = Parser { toks, pos: 0, w_base: 0 };
    let f = p.ring_formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses a single ring term.
pub fn parse_ring_term(text: &str) -> Result<RingTerm, ParseError> {
    let toks = lex(text, Lang::Ring)?;
    let mut p = Parser { toks, pos: 0, w_base: 0 };
    let t = p.ring_term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a formula of the Boolean-algebra language, expanding `<=` and
/// `partN(...)`.
pub fn parse_bool_formula(text: &str) -> Result<BoolFormula, ParseError> {
    let toks = lex(text, Lang::Bool)?;
    let w_base = toks
        .iter()
        .filter_map(|s| match s.tok {
            Tok::Var('y', i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut p = Parser { toks, pos: 0, w_base };
    let f = p.bool_formula()?;
    p.expect_eof()?;
    Ok(f)
}
