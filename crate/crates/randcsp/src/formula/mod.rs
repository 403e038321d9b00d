//! Domain types for clauses, clause-type distributions, formulas, and
//! assignments, with exact evaluation.
//!
//! Spin encoding, used everywhere in this crate: spin `-1` maps to bit `0`,
//! spin `+1` maps to bit `1`. A tuple `x = (x_1, ..., x_k)` is addressed in a
//! truth table by the integer whose bit `i` (counting from 0, least
//! significant first) encodes `x_{i+1}`. Variables are 1-based, matching the
//! DIMACS convention.

pub mod io;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

/// Largest supported clause arity. Truth tables are dense bit vectors of
/// length `2^k`, so this bounds them to 64 KiB.
pub const MAX_ARITY: u32 = 16;

/// Errors from constructing or evaluating formula-layer values.
#[derive(Debug, Error)]
pub enum FormulaError {
    #[error("arity {0} out of range (expected {min}..={max})", min = 1, max = MAX_ARITY)]
    ArityOutOfRange(u32),
    #[error("arity mismatch: clause type has k={expected}, got {got} values")]
    ArityMismatch { expected: u32, got: usize },
    #[error("assignment length {got} does not match formula variable count {expected}")]
    LengthMismatch { expected: u32, got: usize },
    #[error("spin value {0} is not -1 or +1")]
    InvalidSpin(i8),
    #[error("variable index {index} outside 1..={n}")]
    IndexOutOfRange { index: u32, n: u32 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("k-factorizing support too large: (2^{j})^{k} exceeds 2^20")]
    SupportTooLarge { j: u32, k: u32 },
    #[error("formula arity mismatch: formula has k={expected}, clause has k={got}")]
    MixedArity { expected: u32, got: u32 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("formula is not in pure k-SAT form: {0}")]
    NotPureKsat(String),
}

type Result<T> = std::result::Result<T, FormulaError>;

fn check_arity(k: u32) -> Result<()> {
    if (1..=MAX_ARITY).contains(&k) {
        Ok(())
    } else {
        Err(FormulaError::ArityOutOfRange(k))
    }
}

/// One spin per variable, each exactly `-1` or `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    spins: Vec<i8>,
}

impl Assignment {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        for &s in &spins {
            if s != -1 && s != 1 {
                return Err(FormulaError::InvalidSpin(s));
            }
        }
        Ok(Self { spins })
    }

    /// Decodes assignment number `index` on `n` variables: bit `j` of `index`
    /// is the spin of variable `j+1` (`0 -> -1`, `1 -> +1`).
    pub fn from_index(index: u64, n: u32) -> Self {
        let spins = (0..n)
            .map(|j| if index >> j & 1 == 1 { 1 } else { -1 })
            .collect();
        Self { spins }
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }
}

fn encode_spin(s: i8) -> Result<u32> {
    match s {
        -1 => Ok(0),
        1 => Ok(1),
        other => Err(FormulaError::InvalidSpin(other)),
    }
}

/// A boolean function `{-1,+1}^k -> {0,1}` stored as a dense truth table.
///
/// Bit `p` of the table is the value on the tuple encoded by `p` (see module
/// docs for the encoding). The complement (`1 - φ`) is [`Self::complement`],
/// an involution.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClauseType {
    k: u32,
    table: Vec<u64>,
}

impl std::fmt::Debug for ClauseType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ClauseType(k={}, table={})", self.k, self.table_hex())
    }
}

fn table_words(k: u32) -> usize {
    ((1usize << k) + 63) / 64
}

impl ClauseType {
    /// Builds a type from a predicate on encoded tuples.
    pub fn from_fn(k: u32, f: impl Fn(u32) -> bool) -> Result<Self> {
        check_arity(k)?;
        let mut table = vec![0u64; table_words(k)];
        for p in 0..(1u32 << k) {
            if f(p) {
                table[(p / 64) as usize] |= 1 << (p % 64);
            }
        }
        Ok(Self { k, table })
    }

    /// The type that forbids exactly the given encoded tuples.
    pub fn forbidding(k: u32, patterns: &[u32]) -> Result<Self> {
        check_arity(k)?;
        for &p in patterns {
            if p >= 1 << k {
                return Err(FormulaError::IndexOutOfRange { index: p, n: 1 << k });
            }
        }
        Self::from_fn(k, |p| !patterns.contains(&p))
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Value on the encoded tuple `pattern`.
    pub fn get(&self, pattern: u32) -> bool {
        debug_assert!(pattern < 1 << self.k);
        self.table[(pattern / 64) as usize] >> (pattern % 64) & 1 == 1
    }

    /// `φ̃ = 1 - φ`.
    pub fn complement(&self) -> Self {
        let bits = 1usize << self.k;
        let mut table: Vec<u64> = self.table.iter().map(|w| !w).collect();
        if bits % 64 != 0 {
            let last = table.len() - 1;
            table[last] &= (1u64 << (bits % 64)) - 1;
        }
        Self { k: self.k, table }
    }

    /// Number of satisfying tuples.
    pub fn ones(&self) -> u32 {
        self.table.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_always_true(&self) -> bool {
        self.ones() == 1 << self.k
    }

    pub fn is_never_true(&self) -> bool {
        self.ones() == 0
    }

    /// If the type forbids exactly one tuple (a k-SAT clause), returns it.
    pub fn single_forbidden(&self) -> Option<u32> {
        if self.ones() != (1 << self.k) - 1 {
            return None;
        }
        (0..1u32 << self.k).find(|&p| !self.get(p))
    }

    /// If the type is a parity constraint `1(x_1 ... x_k = s)`, returns `s`.
    pub fn parity_sign(&self) -> Option<i8> {
        let is_parity = |sign: i8| {
            (0..1u32 << self.k).all(|p| {
                let prod_is_plus = (self.k - p.count_ones()) % 2 == 0;
                self.get(p) == (prod_is_plus == (sign == 1))
            })
        };
        if is_parity(1) {
            Some(1)
        } else if is_parity(-1) {
            Some(-1)
        } else {
            None
        }
    }

    /// Truth table as a lowercase hex string, most significant digit first,
    /// zero-padded to `max(1, 2^k / 4)` digits.
    pub fn table_hex(&self) -> String {
        let bits = 1usize << self.k;
        let digits = (bits + 3) / 4;
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let nibble = (self.table[d / 16] >> (4 * (d % 16))) & 0xf;
            out.push(std::char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    /// Parses the output of [`Self::table_hex`].
    pub fn from_table_hex(k: u32, hex: &str) -> Result<Self> {
        check_arity(k)?;
        let bits = 1usize << k;
        let digits = (bits + 3) / 4;
        if hex.len() != digits {
            return Err(FormulaError::InvalidDistribution(format!(
                "table hex for k={k} must have {digits} digits, got {}",
                hex.len()
            )));
        }
        let mut table = vec![0u64; table_words(k)];
        for (pos, ch) in hex.chars().enumerate() {
            let nibble = ch.to_digit(16).ok_or_else(|| {
                FormulaError::InvalidDistribution(format!("invalid hex digit {ch:?}"))
            })? as u64;
            let d = digits - 1 - pos;
            table[d / 16] |= nibble << (4 * (d % 16));
        }
        Ok(Self { k, table })
    }
}

/// Evaluates `ctype` on a tuple of spins.
pub fn eval_clause(ctype: &ClauseType, values: &[i8]) -> Result<bool> {
    if values.len() != ctype.k as usize {
        return Err(FormulaError::ArityMismatch {
            expected: ctype.k,
            got: values.len(),
        });
    }
    let mut pattern = 0u32;
    for (i, &s) in values.iter().enumerate() {
        pattern |= encode_spin(s)? << i;
    }
    Ok(ctype.get(pattern))
}

/// A finite-support probability distribution over clause types of one arity.
///
/// Weights are exact rationals, strictly positive, summing to exactly 1;
/// identical truth tables are merged at construction and the support is kept
/// sorted by table, so equal distributions compare equal structurally.
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseTypeDistribution {
    k: u32,
    support: Vec<(ClauseType, BigRational)>,
    /// Cumulative f64 weights used for inverse-CDF sampling.
    cumulative: Vec<f64>,
}

impl ClauseTypeDistribution {
    pub fn new(k: u32, pairs: Vec<(ClauseType, BigRational)>) -> Result<Self> {
        check_arity(k)?;
        if pairs.is_empty() {
            return Err(FormulaError::InvalidDistribution("empty support".into()));
        }
        let mut float_sum = 0.0;
        for (t, w) in &pairs {
            if t.k != k {
                return Err(FormulaError::MixedArity {
                    expected: k,
                    got: t.k,
                });
            }
            if !w.is_positive() {
                return Err(FormulaError::InvalidDistribution(
                    "weights must be strictly positive".into(),
                ));
            }
            float_sum += w.to_f64().unwrap_or(f64::NAN);
        }
        if !(float_sum - 1.0).abs().is_finite() || (float_sum - 1.0).abs() > 1e-12 {
            return Err(FormulaError::InvalidDistribution(format!(
                "weights sum to {float_sum}, expected 1"
            )));
        }

        // Merge duplicate tables, then normalize by the exact total so the
        // rational weights sum to exactly 1.
        let mut merged: std::collections::BTreeMap<ClauseType, BigRational> =
            std::collections::BTreeMap::new();
        for (t, w) in pairs {
            *merged.entry(t).or_insert_with(BigRational::zero) += w;
        }
        let total: BigRational = merged.values().cloned().sum();
        let support: Vec<(ClauseType, BigRational)> = merged
            .into_iter()
            .map(|(t, w)| (t, w / total.clone()))
            .collect();

        let mut cumulative = Vec::with_capacity(support.len());
        let mut acc = 0.0;
        for (_, w) in &support {
            acc += w.to_f64().unwrap();
            cumulative.push(acc);
        }
        Ok(Self {
            k,
            support,
            cumulative,
        })
    }

    /// Convenience constructor from f64 weights (converted exactly).
    pub fn from_f64_weights(k: u32, pairs: Vec<(ClauseType, f64)>) -> Result<Self> {
        let pairs = pairs
            .into_iter()
            .map(|(t, w)| {
                let r = BigRational::from_float(w).ok_or_else(|| {
                    FormulaError::InvalidDistribution(format!("weight {w} is not finite"))
                })?;
                Ok((t, r))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(k, pairs)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn support(&self) -> &[(ClauseType, BigRational)] {
        &self.support
    }

    pub fn weights_f64(&self) -> Vec<f64> {
        self.support
            .iter()
            .map(|(_, w)| w.to_f64().unwrap())
            .collect()
    }

    /// Exact sum of weights (always exactly 1 by construction).
    pub fn weight_sum(&self) -> BigRational {
        self.support.iter().map(|(_, w)| w.clone()).sum()
    }

    /// Draws one clause type by inverse CDF.
    pub fn sample_type(&self, rng: &mut impl Rng) -> &ClauseType {
        let u: f64 = rng.gen();
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&u).unwrap())
        {
            Ok(i) => i + 1,
            Err(i) => i,
        };
        &self.support[idx.min(self.support.len() - 1)].0
    }

    /// True when the support is exactly the `2^k` single-forbidden-tuple
    /// types with uniform weights (the uniform k-SAT clause distribution).
    pub fn is_uniform_ksat(&self) -> bool {
        let k = self.k;
        if self.support.len() != 1usize << k {
            return false;
        }
        let uniform = BigRational::new(BigInt::one(), BigInt::from(1u64 << k));
        self.support
            .iter()
            .all(|(t, w)| t.single_forbidden().is_some() && *w == uniform)
    }

    /// True when every support member is a parity constraint.
    pub fn is_parity(&self) -> bool {
        self.support.iter().all(|(t, _)| t.parity_sign().is_some())
    }
}

fn dyadic(num: u64, log2_den: u32) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(1u128 << log2_den))
}

/// Uniform k-SAT: `2^k` types, each forbidding exactly one tuple, weight
/// `2^-k`.
pub fn make_ksat(k: u32) -> Result<ClauseTypeDistribution> {
    check_arity(k)?;
    let pairs = (0..1u32 << k)
        .map(|p| Ok((ClauseType::forbidding(k, &[p])?, dyadic(1, k))))
        .collect::<Result<Vec<_>>>()?;
    ClauseTypeDistribution::new(k, pairs)
}

/// Not-all-equal SAT: each type forbids a tuple and its negation. The `s`
/// and `-s` parameterizations collide, so there are `2^(k-1)` distinct types
/// of weight `2^-(k-1)` after merging.
pub fn make_nae(k: u32) -> Result<ClauseTypeDistribution> {
    if k < 2 {
        return Err(FormulaError::ArityOutOfRange(k));
    }
    check_arity(k)?;
    let full = (1u32 << k) - 1;
    let pairs = (0..1u32 << k)
        .map(|p| Ok((ClauseType::forbidding(k, &[p, p ^ full])?, dyadic(1, k))))
        .collect::<Result<Vec<_>>>()?;
    ClauseTypeDistribution::new(k, pairs)
}

/// Hypergraph 2-coloring: the single type forbidding the two uniform tuples.
pub fn make_hyp2col(k: u32) -> Result<ClauseTypeDistribution> {
    if k < 2 {
        return Err(FormulaError::ArityOutOfRange(k));
    }
    check_arity(k)?;
    let full = (1u32 << k) - 1;
    let t = ClauseType::forbidding(k, &[0, full])?;
    ClauseTypeDistribution::new(k, vec![(t, BigRational::one())])
}

/// XOR-SAT: the two parity constraints `1(x_1 ... x_k = s)`, weight 1/2 each.
pub fn make_xor(k: u32) -> Result<ClauseTypeDistribution> {
    check_arity(k)?;
    let parity = |sign: i8| {
        ClauseType::from_fn(k, move |p| {
            let prod_is_plus = (k - p.count_ones()) % 2 == 0;
            prod_is_plus == (sign == 1)
        })
    };
    ClauseTypeDistribution::new(
        k,
        vec![(parity(1)?, dyadic(1, 1)), (parity(-1)?, dyadic(1, 1))],
    )
}

/// A factorizing clause-type distribution: each type forbids the point set
/// `{s^(1), ..., s^(J)}` where the per-coordinate columns
/// `(s_i^(1), ..., s_i^(J))` are i.i.d. under `bar_mu`, a distribution on
/// `{-1,+1}^J` indexed by the usual bit encoding (bit `j` is the spin of
/// `s^(j+1)`).
///
/// Tuples whose columns make some forbidden points collide produce types with
/// fewer than `J` forbidden tuples; identical resulting types are merged by
/// truth-table equality with weights summed.
pub fn make_k_factorizing(k: u32, j: u32, bar_mu: &[f64]) -> Result<ClauseTypeDistribution> {
    check_arity(k)?;
    if j == 0 || j > 20 {
        return Err(FormulaError::InvalidDistribution(format!(
            "J={j} out of range"
        )));
    }
    if bar_mu.len() != 1usize << j {
        return Err(FormulaError::InvalidDistribution(format!(
            "bar_mu must have 2^{j} entries, got {}",
            bar_mu.len()
        )));
    }
    // (2^J)^k = 2^(Jk) enumerable tuples before merging.
    if (j as u64) * (k as u64) > 20 {
        return Err(FormulaError::SupportTooLarge { j, k });
    }
    let float_sum: f64 = bar_mu.iter().sum();
    if bar_mu.iter().any(|&w| !(0.0..=1.0).contains(&w)) || (float_sum - 1.0).abs() > 1e-12 {
        return Err(FormulaError::InvalidDistribution(
            "bar_mu is not a probability vector".into(),
        ));
    }

    let columns: Vec<u32> = (0..1u32 << j).filter(|&c| bar_mu[c as usize] > 0.0).collect();
    let exact: Vec<BigRational> = bar_mu
        .iter()
        .map(|&w| BigRational::from_float(w).unwrap_or_else(BigRational::zero))
        .collect();

    let mut pairs: Vec<(ClauseType, BigRational)> = Vec::new();
    let mut tuple = vec![0usize; k as usize];
    loop {
        // Forbidden point j: bit i is bit j of column i's pattern.
        let mut forbidden = Vec::with_capacity(j as usize);
        for jj in 0..j {
            let mut p = 0u32;
            for (i, &ci) in tuple.iter().enumerate() {
                p |= (columns[ci] >> jj & 1) << i;
            }
            forbidden.push(p);
        }
        let mut weight = BigRational::one();
        for &ci in &tuple {
            weight *= exact[columns[ci] as usize].clone();
        }
        pairs.push((ClauseType::forbidding(k, &forbidden)?, weight));

        // Next tuple in the mixed-radix counter over support columns.
        let mut pos = 0;
        loop {
            if pos == tuple.len() {
                break;
            }
            tuple[pos] += 1;
            if tuple[pos] < columns.len() {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
        }
        if pos == tuple.len() {
            break;
        }
    }
    ClauseTypeDistribution::new(k, pairs)
}

/// The `bar_mu` parameterization reproducing [`make_ksat`] (J = 1).
pub fn ksat_bar_mu() -> (u32, Vec<f64>) {
    (1, vec![0.5, 0.5])
}

/// The `bar_mu` parameterization reproducing [`make_nae`] (J = 2).
pub fn nae_bar_mu() -> (u32, Vec<f64>) {
    // Patterns: bit0 = spin of s^(1), bit1 = spin of s^(2).
    // (-1,+1) -> 0b10, (+1,-1) -> 0b01.
    (2, vec![0.0, 0.5, 0.5, 0.0])
}

/// The `bar_mu` parameterization reproducing [`make_hyp2col`] (J = 2).
pub fn hyp2col_bar_mu() -> (u32, Vec<f64>) {
    (2, vec![0.0, 0.0, 1.0, 0.0])
}

/// One clause placed on formula variables: a tuple of k indices in `1..=n`
/// (repeats permitted) plus the clause type applied to them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlacedClause {
    pub indices: Vec<u32>,
    pub ctype: ClauseType,
}

impl PlacedClause {
    pub fn new(indices: Vec<u32>, ctype: ClauseType) -> Result<Self> {
        if indices.len() != ctype.k() as usize {
            return Err(FormulaError::ArityMismatch {
                expected: ctype.k(),
                got: indices.len(),
            });
        }
        Ok(Self { indices, ctype })
    }

    pub fn k(&self) -> u32 {
        self.ctype.k()
    }
}

/// Record of how a formula was generated: the serialized ensemble spec plus
/// the seed. Carried opaquely so the formula layer stays independent of the
/// ensemble layer.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub ensemble: serde_json::Value,
    pub master_seed: u64,
    pub stream_id: u64,
}

/// A conjunction of placed clauses over `n` spin variables, all of one arity.
///
/// The empty clause list is valid (every assignment satisfies it).
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    n: u32,
    k: u32,
    clauses: Vec<PlacedClause>,
    pub provenance: Option<Provenance>,
}

impl Formula {
    /// An empty formula on `n` variables that will hold arity-`k` clauses.
    pub fn empty(n: u32, k: u32) -> Self {
        Self {
            n,
            k,
            clauses: Vec::new(),
            provenance: None,
        }
    }

    pub fn new(n: u32, k: u32, clauses: Vec<PlacedClause>) -> Result<Self> {
        let mut f = Self::empty(n, k);
        for c in clauses {
            f.push_clause(c)?;
        }
        Ok(f)
    }

    pub fn push_clause(&mut self, clause: PlacedClause) -> Result<()> {
        if clause.k() != self.k {
            return Err(FormulaError::MixedArity {
                expected: self.k,
                got: clause.k(),
            });
        }
        for &i in &clause.indices {
            if i == 0 || i > self.n {
                return Err(FormulaError::IndexOutOfRange { index: i, n: self.n });
            }
        }
        self.clauses.push(clause);
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[PlacedClause] {
        &self.clauses
    }
}

/// True iff every placed clause evaluates to 1 under the assignment.
pub fn satisfies(formula: &Formula, assignment: &Assignment) -> Result<bool> {
    if assignment.len() != formula.n as usize {
        return Err(FormulaError::LengthMismatch {
            expected: formula.n,
            got: assignment.len(),
        });
    }
    let spins = assignment.spins();
    for clause in &formula.clauses {
        let mut pattern = 0u32;
        for (i, &v) in clause.indices.iter().enumerate() {
            let bit = (spins[(v - 1) as usize] == 1) as u32;
            pattern |= bit << i;
        }
        if !clause.ctype.get(pattern) {
            return Ok(false);
        }
    }
    Ok(true)
}
