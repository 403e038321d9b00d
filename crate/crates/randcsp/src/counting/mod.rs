//! Exact solution counting with three engines and a cross-checking oracle
//! discipline: a bit-parallel brute-force enumerator (the oracle, `n <= 30`),
//! a component-caching backtracking counter for larger `n`, and GF(2)
//! elimination for parity formulas. All engines return exact integers;
//! within brute-force range they must agree bit-for-bit.

mod backtrack;
mod brute;
mod xor;

pub use backtrack::{count_backtracking, count_backtracking_with, BacktrackOptions};
pub use brute::count_bruteforce;
pub use xor::count_xor;

use crate::ensembles::choose;
use crate::formula::{Formula, PlacedClause};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap for the brute-force enumerator.
pub const BRUTE_FORCE_MAX_N: u32 = 30;
/// Cap for the clause-addition checksum (it enumerates all `C(n,k) 2^k`
/// clauses against a stored solution bitset).
pub const CHECKSUM_MAX_N: u32 = 20;

#[derive(Debug, Error)]
pub enum CountError {
    #[error("formula has n={n} variables, over the {cap}-variable cap for this engine")]
    TooManyVariables { n: u32, cap: u32 },
    #[error("node budget of {budget} exhausted before the count completed")]
    BudgetExceeded { budget: u64 },
    #[error("formula contains a non-parity clause type; the xor engine does not apply")]
    NotParity,
    #[error("operation requires a pure k-SAT formula: {0}")]
    NotPureKsat(String),
    #[error("operation requires 1 <= k <= n, got k={k}, n={n}")]
    BadArity { k: u32, n: u32 },
}

type Result<T> = std::result::Result<T, CountError>;

/// Which engine produced a count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    BruteForce,
    Backtracking,
    Xor,
}

/// An exact solution count.
#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    /// Exact number of satisfying assignments.
    pub z: BigUint,
    /// `log2(z)`, defined only when `z >= 1`; exact on powers of two.
    pub log2_z: Option<f64>,
    /// Number of variables appearing in no clause.
    pub free_vars: u32,
    pub engine: Engine,
}

impl CountResult {
    pub(crate) fn new(z: BigUint, free_vars: u32, engine: Engine) -> Self {
        let log2_z = log2_biguint(&z);
        Self {
            z,
            log2_z,
            free_vars,
            engine,
        }
    }
}

/// `log2` of an arbitrary-precision integer (`None` for zero). Exact on
/// powers of two; otherwise accurate to f64 precision via the top 53 bits.
pub fn log2_biguint(z: &BigUint) -> Option<f64> {
    if z.is_zero() {
        return None;
    }
    let bits = z.bits();
    if z.trailing_zeros() == Some(bits - 1) {
        return Some((bits - 1) as f64);
    }
    if bits <= 53 {
        return Some(z.to_f64().unwrap().log2());
    }
    let shift = bits - 53;
    let top = (z >> shift).to_f64().unwrap();
    Some(top.log2() + shift as f64)
}

/// Number of variables in `1..=n` appearing in no placed clause.
pub fn free_variables(formula: &Formula) -> u32 {
    let mut used = vec![false; formula.n() as usize + 1];
    for clause in formula.clauses() {
        for &v in &clause.indices {
            used[v as usize] = true;
        }
    }
    formula.n() - used.iter().filter(|&&u| u).count() as u32
}

/// Counts with the engine best suited to the formula: GF(2) elimination for
/// parity formulas, brute force for small `n`, backtracking otherwise.
pub fn count_auto(formula: &Formula) -> Result<CountResult> {
    let parity = !formula.clauses().is_empty()
        && formula
            .clauses()
            .iter()
            .all(|c| c.ctype.parity_sign().is_some());
    if parity {
        count_xor(formula)
    } else if formula.n() <= 20 {
        count_bruteforce(formula)
    } else {
        count_backtracking(formula)
    }
}

/// A clause reduced to its distinct variables: repeated indices are folded by
/// restricting the truth table to the diagonal. Returns the distinct
/// variables in first-occurrence order and the table over them, as a plain
/// bit vector (bit `p` = value on local pattern `p`).
pub(crate) fn effective_clause(clause: &PlacedClause) -> (Vec<u32>, Vec<u64>) {
    let k = clause.k();
    let mut vars: Vec<u32> = Vec::with_capacity(k as usize);
    let mut pos_of: Vec<usize> = Vec::with_capacity(k as usize);
    for &v in &clause.indices {
        match vars.iter().position(|&u| u == v) {
            Some(i) => pos_of.push(i),
            None => {
                vars.push(v);
                pos_of.push(vars.len() - 1);
            }
        }
    }
    let d = vars.len();
    let mut table = vec![0u64; ((1usize << d) + 63) / 64];
    for p in 0..1u32 << d {
        let mut full = 0u32;
        for (j, &i) in pos_of.iter().enumerate() {
            full |= (p >> i & 1) << j;
        }
        if clause.ctype.get(full) {
            table[(p / 64) as usize] |= 1 << (p % 64);
        }
    }
    (vars, table)
}

/// Report from the exact clause-addition identity check: summing
/// `Z(F ∧ C)` over every k-SAT clause `C` on `n` variables must equal
/// `C(n,k) (2^k - 1) Z(F)` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ChecksumReport {
    pub lhs: BigUint,
    pub rhs: BigUint,
    pub equal: bool,
}

/// Evaluates both sides of the clause-addition identity on a pure k-SAT
/// formula with `n <= 20`. The left side really enumerates all
/// `C(n,k) 2^k` candidate clauses against the formula's solution set; the
/// right side is the closed form.
pub fn clause_addition_checksum(formula: &Formula) -> Result<ChecksumReport> {
    let n = formula.n();
    let k = formula.k();
    if n > CHECKSUM_MAX_N {
        return Err(CountError::TooManyVariables {
            n,
            cap: CHECKSUM_MAX_N,
        });
    }
    if k == 0 || k > n {
        return Err(CountError::BadArity { k, n });
    }
    for clause in formula.clauses() {
        if clause.ctype.single_forbidden().is_none() {
            return Err(CountError::NotPureKsat(format!(
                "clause type {} forbids more than one tuple",
                clause.ctype.table_hex()
            )));
        }
    }

    let words = brute::solution_words(formula)?;
    let z: u64 = words.iter().map(|w| w.count_ones() as u64).sum();

    // For each variable subset S of size k, histogram the solutions by the
    // k bits at S; clause (S, s) then kills exactly hist[s] solutions.
    let mut lhs = BigUint::zero();
    let mut subset: Vec<u32> = (0..k).collect(); // 0-based variable ids
    let mut hist = vec![0u64; 1 << k];
    'subsets: loop {
        hist.iter_mut().for_each(|h| *h = 0);
        for (wi, &w) in words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let bit = w.trailing_zeros() as u64;
                w &= w - 1;
                let a = (wi as u64) * 64 + bit;
                let mut s = 0usize;
                for (i, &v) in subset.iter().enumerate() {
                    s |= ((a >> v & 1) as usize) << i;
                }
                hist[s] += 1;
            }
        }
        for &h in &hist {
            lhs += z - h;
        }

        // Next k-combination of 0..n in lexicographic order.
        let mut i = k as usize;
        while i > 0 {
            i -= 1;
            if subset[i] < n - (k - i as u32) {
                subset[i] += 1;
                for j in i + 1..k as usize {
                    subset[j] = subset[j - 1] + 1;
                }
                continue 'subsets;
            }
        }
        break;
    }

    let n_subsets = choose(n as u64, k as u64).expect("desk-scale binomial");
    let rhs = BigUint::from(n_subsets) * BigUint::from((1u64 << k) - 1) * BigUint::from(z);
    let equal = lhs == rhs;
    Ok(ChecksumReport { lhs, rhs, equal })
}
