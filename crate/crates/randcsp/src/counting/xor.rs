//! Exact counting of parity formulas by GF(2) elimination.
//!
//! Bit map for the linear system: variable spin `+1` is bit `0` and `-1` is
//! bit `1`, so a constraint `x_{i_1} ... x_{i_k} = s` becomes the parity
//! equation `sum of bits of odd-multiplicity variables = (s == -1)` over
//! GF(2). The count is `2^(n - rank)` when the system is consistent, else 0.

use super::{CountError, CountResult, Engine};
use crate::formula::Formula;
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// One equation: coefficient bitset over variables plus the right-hand side.
struct Row {
    coeffs: Vec<u64>,
    rhs: bool,
}

impl Row {
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&w| w == 0)
    }

    fn leading(&self) -> Option<usize> {
        for (i, &w) in self.coeffs.iter().enumerate() {
            if w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    fn xor_assign(&mut self, other: &Row) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }
}

/// Exact count for a formula whose every clause type is a parity constraint.
pub fn count_xor(formula: &Formula) -> Result<CountResult, CountError> {
    let n = formula.n() as usize;
    let words = (n + 63) / 64;
    let mut pivots: Vec<Row> = Vec::new();
    let mut inconsistent = false;

    for clause in formula.clauses() {
        let sign = clause.ctype.parity_sign().ok_or(CountError::NotParity)?;
        let mut row = Row {
            coeffs: vec![0u64; words],
            rhs: sign == -1,
        };
        // Repeated indices cancel in pairs: x_v^2 = 1.
        for &v in &clause.indices {
            let bit = (v - 1) as usize;
            row.coeffs[bit / 64] ^= 1 << (bit % 64);
        }

        for p in &pivots {
            let lead = p.leading().unwrap();
            if row.coeffs[lead / 64] >> (lead % 64) & 1 == 1 {
                row.xor_assign(p);
            }
        }
        if row.is_zero() {
            if row.rhs {
                inconsistent = true;
                break;
            }
        } else {
            pivots.push(row);
            // Keep pivot rows sorted by leading bit so reduction stays a
            // single pass.
            pivots.sort_by_key(|r| r.leading().unwrap());
        }
    }

    let free_vars = super::free_variables(formula);
    let z = if inconsistent {
        BigUint::zero()
    } else {
        BigUint::one() << (n - pivots.len())
    };
    Ok(CountResult::new(z, free_vars, Engine::Xor))
}
