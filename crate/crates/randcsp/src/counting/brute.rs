//! Bit-parallel exhaustive counting.
//!
//! Assignment `a` in `0..2^n` sets variable `v` to `+1` iff bit `v-1` of `a`
//! is 1. Assignments are processed 64 at a time: within a chunk the low 6
//! assignment bits vary, so per-variable spin masks are compile-time
//! constants and each clause contributes one OR-of-AND mask per chunk.

use super::{effective_clause, CountError, CountResult, Engine, BRUTE_FORCE_MAX_N};
use crate::formula::Formula;
use num_bigint::BigUint;

/// Bit `i` of `LOW_MASKS[b]` is set iff bit `b` of `i` is set.
const LOW_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// One pattern of a clause, split into the chunk-constant part (assignment
/// bits >= 6, i.e. bits of the chunk index) and the within-chunk 64-bit mask.
struct PatternMask {
    chunk_mask: u64,
    chunk_val: u64,
    low: u64,
}

/// Per-clause evaluator: `patterns` enumerates the minority side of the
/// truth table, whichever of {satisfying, violating} is smaller.
struct ChunkClause {
    minority_is_satisfying: bool,
    patterns: Vec<PatternMask>,
}

pub(super) struct ChunkEvaluator {
    n: u32,
    clauses: Vec<ChunkClause>,
    unsat_clause: bool,
}

impl ChunkEvaluator {
    pub(super) fn new(formula: &Formula) -> Self {
        let mut clauses = Vec::with_capacity(formula.m());
        let mut unsat_clause = false;
        for placed in formula.clauses() {
            let (vars, table) = effective_clause(placed);
            let d = vars.len();
            let npatterns = 1u32 << d;
            let ones: u32 = table.iter().map(|w| w.count_ones()).sum();
            if ones == npatterns {
                continue; // tautology (possible after diagonal restriction)
            }
            if ones == 0 {
                unsat_clause = true;
                break;
            }
            let minority_is_satisfying = ones <= npatterns / 2;
            let mut patterns = Vec::new();
            for p in 0..npatterns {
                let bit = table[(p / 64) as usize] >> (p % 64) & 1 == 1;
                if bit != minority_is_satisfying {
                    continue;
                }
                let mut chunk_mask = 0u64;
                let mut chunk_val = 0u64;
                let mut low: u64 = !0;
                for (i, &v) in vars.iter().enumerate() {
                    let bitpos = v - 1;
                    let want = p >> i & 1 == 1;
                    if bitpos < 6 {
                        let m = LOW_MASKS[bitpos as usize];
                        low &= if want { m } else { !m };
                    } else {
                        chunk_mask |= 1 << (bitpos - 6);
                        if want {
                            chunk_val |= 1 << (bitpos - 6);
                        }
                    }
                }
                patterns.push(PatternMask {
                    chunk_mask,
                    chunk_val,
                    low,
                });
            }
            clauses.push(ChunkClause {
                minority_is_satisfying,
                patterns,
            });
        }
        Self {
            n: formula.n(),
            clauses,
            unsat_clause,
        }
    }

    pub(super) fn num_chunks(&self) -> u64 {
        if self.n >= 6 {
            1u64 << (self.n - 6)
        } else {
            1
        }
    }

    /// Mask of assignments within the chunk that lie in `0..2^n`.
    pub(super) fn chunk_domain(&self) -> u64 {
        if self.n >= 6 {
            !0
        } else {
            (1u64 << (1 << self.n)) - 1
        }
    }

    /// 64-bit mask of satisfied assignments in the given chunk.
    pub(super) fn satisfied_mask(&self, chunk: u64) -> u64 {
        if self.unsat_clause {
            return 0;
        }
        let mut sat = self.chunk_domain();
        for clause in &self.clauses {
            let mut minority = 0u64;
            for p in &clause.patterns {
                if chunk & p.chunk_mask == p.chunk_val {
                    minority |= p.low;
                }
            }
            let clause_sat = if clause.minority_is_satisfying {
                minority
            } else {
                !minority
            };
            sat &= clause_sat;
            if sat == 0 {
                return 0;
            }
        }
        sat
    }
}

/// Exact count by exhaustive bit-parallel enumeration. Refuses formulas with
/// more than [`BRUTE_FORCE_MAX_N`] variables.
pub fn count_bruteforce(formula: &Formula) -> Result<CountResult, CountError> {
    if formula.n() > BRUTE_FORCE_MAX_N {
        return Err(CountError::TooManyVariables {
            n: formula.n(),
            cap: BRUTE_FORCE_MAX_N,
        });
    }
    let eval = ChunkEvaluator::new(formula);
    let mut z: u64 = 0;
    for chunk in 0..eval.num_chunks() {
        z += eval.satisfied_mask(chunk).count_ones() as u64;
    }
    Ok(CountResult::new(
        BigUint::from(z),
        super::free_variables(formula),
        Engine::BruteForce,
    ))
}

/// The full solution set as a bitset (assignment `a` satisfied iff bit
/// `a % 64` of word `a / 64` is set). Capped at `n <= 26` for memory.
pub(super) fn solution_words(formula: &Formula) -> Result<Vec<u64>, CountError> {
    if formula.n() > 26 {
        return Err(CountError::TooManyVariables {
            n: formula.n(),
            cap: 26,
        });
    }
    let eval = ChunkEvaluator::new(formula);
    Ok((0..eval.num_chunks()).map(|c| eval.satisfied_mask(c)).collect())
}
