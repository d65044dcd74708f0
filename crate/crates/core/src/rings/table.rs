use serde::{Deserialize, Serialize};

use super::{RingError, Witness};

/// On-disk form of a table ring: row-major tables indexed by element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableSpec {
    pub size: usize,
    pub add: Vec<Vec<u32>>,
    pub mul: Vec<Vec<u32>>,
    pub zero: u32,
    pub one: u32,
}

impl TableSpec {
    pub fn flatten(&self) -> Result<(Vec<u32>, Vec<u32>), RingError> {
        let flat = |name: &str, rows: &[Vec<u32>]| -> Result<Vec<u32>, RingError> {
            if rows.len() != self.size || rows.iter().any(|r| r.len() != self.size) {
                return Err(RingError::Shape(format!("{name} table must be {0} x {0}", self.size)));
            }
            Ok(rows.concat())
        };
        Ok((flat("add", &self.add)?, flat("mul", &self.mul)?))
    }
}

/// Checks every commutative unital ring law exhaustively and returns the
/// additive-inverse table.
pub(super) fn verify(add: &[u32], mul: &[u32], zero: u32, one: u32) -> Result<Vec<u32>, RingError> {
    let n = (add.len() as f64).sqrt().round() as usize;
    if n == 0 || n * n != add.len() || mul.len() != add.len() {
        return Err(RingError::Shape(format!(
            "tables have {} and {} entries, expected a square",
            add.len(),
            mul.len()
        )));
    }
    if let Some(bad) = add.iter().chain(mul).find(|&&v| v as usize >= n) {
        return Err(RingError::Shape(format!("entry {bad} is outside the carrier of size {n}")));
    }
    if zero as usize >= n || one as usize >= n {
        return Err(RingError::Shape("zero or one lies outside the carrier".into()));
    }
    if zero == one {
        return Err(RingError::Trivial);
    }
    let a = |x: usize, y: usize| add[x * n + y] as usize;
    let m = |x: usize, y: usize| mul[x * n + y] as usize;
    let fail = |law, x: usize, y: usize, z: usize| {
        Err(RingError::AxiomViolation { law, witness: Witness(x as u32, y as u32, z as u32) })
    };
    let (z0, o1) = (zero as usize, one as usize);
    for x in 0..n {
        if a(x, z0) != x {
            return fail("additive identity", x, z0, 0);
        }
        if m(x, o1) != x {
            return fail("multiplicative identity", x, o1, 0);
        }
        for y in 0..n {
            if a(x, y) != a(y, x) {
                return fail("additive commutativity", x, y, 0);
            }
            if m(x, y) != m(y, x) {
                return fail("multiplicative commutativity", x, y, 0);
            }
        }
    }
    let mut neg = vec![0u32; n];
    for (x, slot) in neg.iter_mut().enumerate() {
        match (0..n).find(|&y| a(x, y) == z0) {
            Some(y) => *slot = y as u32,
            None => return fail("additive inverse", x, 0, 0),
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if a(a(x, y), z) != a(x, a(y, z)) {
                    return fail("additive associativity", x, y, z);
                }
                if m(m(x, y), z) != m(x, m(y, z)) {
                    return fail("multiplicative associativity", x, y, z);
                }
                if m(x, a(y, z)) != a(m(x, y), m(x, z)) {
                    return fail("distributivity", x, y, z);
                }
            }
        }
    }
    Ok(neg)
}
