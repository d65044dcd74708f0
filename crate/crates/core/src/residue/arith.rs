//! Integer factorization and the Chinese remainder theorem.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("n must be at least 2, got {0}")]
    TooSmall(u64),
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("residue {0} is out of range for modulus {1}")]
    ResidueOutOfRange(u64, u64),
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("product of moduli overflows 64 bits")]
    Overflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PrimePower {
    pub p: u64,
    pub k: u32,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimePowerDecomposition {
    pub n: u64,
    pub factors: Vec<PrimePower>,
}

impl PrimePowerDecomposition {
    pub fn moduli(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.q).collect()
    }

    pub fn is_prime_power(&self) -> bool {
        self.factors.len() == 1
    }
}

/// Factors `n` by trial division.
pub fn factor(n: u64) -> Result<PrimePowerDecomposition, ArithError> {
    if n < 2 {
        return Err(ArithError::TooSmall(n));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            let (mut k, mut q) = (0u32, 1u64);
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
                q *= p;
            }
            factors.push(PrimePower { p, k, q });
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push(PrimePower { p: rest, k: 1, q: rest });
    }
    Ok(PrimePowerDecomposition { n, factors })
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Returns the unique `u < ∏ q` with `u ≡ r (mod q)` for every pair `(r, q)`.
pub fn crt_solve(residues: &[(u64, u64)]) -> Result<u64, ArithError> {
    let mut u: i128 = 0;
    let mut m: i128 = 1;
    for &(r, q) in residues {
        if q == 0 {
            return Err(ArithError::ZeroModulus);
        }
        if r >= q {
            return Err(ArithError::ResidueOutOfRange(r, q));
        }
        let (g, inv, _) = ext_gcd(m.rem_euclid(q as i128), q as i128);
        if g != 1 {
            return Err(ArithError::NotCoprime(m as u64, q));
        }
        // u' = u + m * t with t ≡ (r − u) · m⁻¹ (mod q)
        let t = ((r as i128 - u) * inv).rem_euclid(q as i128);
        u += m * t;
        m = m.checked_mul(q as i128).filter(|&v| v <= u64::MAX as i128).ok_or(ArithError::Overflow)?;
    }
    Ok(u as u64)
}
