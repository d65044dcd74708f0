//! Textual ring descriptors and element literals.
//!
//! Descriptors: `zmod:<n>`, `product:<d>,<d>,...` (a nested product is
//! written in parentheses) and `table:@<file>` naming a JSON [`TableSpec`].

use std::path::Path;

use thiserror::Error;

use super::{Elem, FiniteRing, RingError, TableSpec};

#[derive(Debug, Error)]
pub enum RingDescriptorError {
    #[error("unknown ring descriptor `{0}`")]
    Unknown(String),
    #[error("bad modulus in `{0}`")]
    BadModulus(String),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("invalid table file `{path}`: {message}")]
    Json { path: String, message: String },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("`{text}` is not an element of {ring}")]
    BadElement { text: String, ring: String },
}

impl FiniteRing {
    pub fn from_descriptor(desc: &str) -> Result<FiniteRing, RingDescriptorError> {
        let desc = desc.trim();
        if let Some(inner) = strip_parens(desc) {
            return Self::from_descriptor(inner);
        }
        if let Some(n) = desc.strip_prefix("zmod:") {
            let n: u32 = n.trim().parse().map_err(|_| RingDescriptorError::BadModulus(desc.into()))?;
            return Ok(FiniteRing::modular(n)?);
        }
        if let Some(list) = desc.strip_prefix("product:") {
            let factors = split_top_level(list)
                .into_iter()
                .map(Self::from_descriptor)
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(FiniteRing::product(factors)?);
        }
        if let Some(path) = desc.strip_prefix("table:@") {
            return load_table(Path::new(path));
        }
        Err(RingDescriptorError::Unknown(desc.into()))
    }
}

fn load_table(path: &Path) -> Result<FiniteRing, RingDescriptorError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| RingDescriptorError::Io { path: shown.clone(), message: e.to_string() })?;
    let parsed: TableSpec = serde_json::from_str(&text)
        .map_err(|e| RingDescriptorError::Json { path: shown.clone(), message: e.to_string() })?;
    let (add, mul) = parsed.flatten()?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or(shown);
    Ok(FiniteRing::table(label, add, mul, parsed.zero, parsed.one)?)
}

/// `(x)` → `x` when the outer parentheses enclose the whole string.
fn strip_parens(s: &str) -> Option<&str> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let mut depth = 0i32;
    for c in inner.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            _ => {}
        }
    }
    (depth == 0).then_some(inner)
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts
}

/// Parses an element literal: a residue for `Z/n`, a tuple `(a,b,...)` for
/// products, a table index, or a parent-element literal for a stalk.
pub fn parse_element(ring: &FiniteRing, text: &str) -> Result<Elem, RingDescriptorError> {
    let bad = || RingDescriptorError::BadElement { text: text.to_string(), ring: ring.label().to_string() };
    let t = text.trim();
    if let Some(factors) = ring.factors() {
        let inner = strip_parens(t).ok_or_else(bad)?;
        let parts = split_top_level(inner);
        if parts.len() != factors.len() {
            return Err(bad());
        }
        let coords = parts
            .iter()
            .zip(factors)
            .map(|(p, f)| parse_element(f, p))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        return ring.from_coordinates(&coords).ok_or_else(bad);
    }
    if let Some((parent, members)) = ring.sub_parent() {
        let x = parse_element(parent, t).map_err(|_| bad())?;
        return members
            .iter()
            .position(|&m| m == x)
            .map(|i| Elem(i as u32))
            .ok_or_else(bad);
    }
    let v: u64 = t.parse().map_err(|_| bad())?;
    if v < ring.size() as u64 {
        Ok(Elem(v as u32))
    } else {
        Err(bad())
    }
}
