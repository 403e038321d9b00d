//! Component-caching backtracking counter.
//!
//! The solver works on a functional representation: a subproblem is a list of
//! clauses over locally-relabeled variables, and counts assignments of
//! exactly the variables present in the list. Each step propagates forced
//! variables (a clause whose restricted truth table pins some variable to one
//! value; an all-zero table is a conflict), splits the clause graph into
//! connected components, counts components independently with a memo cache
//! keyed by the component's first-occurrence canonical form, and multiplies.
//! Variables that drop out of every clause contribute a factor of 2 each.

use super::{effective_clause, CountError, CountResult, Engine};
use crate::formula::Formula;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::HashMap;

#[derive(Debug, Clone, Copy)]
pub struct BacktrackOptions {
    /// Maximum number of branch nodes before giving up with an explicit
    /// resource error (never a wrong answer).
    pub node_budget: u64,
}

impl Default for BacktrackOptions {
    fn default() -> Self {
        Self {
            node_budget: 10_000_000,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct BtClause {
    vars: Vec<u16>,
    table: Vec<u64>,
}

impl BtClause {
    fn d(&self) -> u32 {
        self.vars.len() as u32
    }

    fn get(&self, p: u32) -> bool {
        self.table[(p / 64) as usize] >> (p % 64) & 1 == 1
    }

    fn is_always_true(&self) -> bool {
        let bits = 1u32 << self.d();
        (0..bits).all(|p| self.get(p))
    }

    fn is_never_true(&self) -> bool {
        self.table.iter().all(|&w| w == 0)
    }
}

enum Restricted {
    Satisfied,
    Conflict,
    Remaining(BtClause),
}

/// Restricts a clause by `var := value`. Returns the clause unchanged if it
/// does not mention `var`.
fn restrict(clause: &BtClause, var: u16, value: bool) -> Restricted {
    let Some(pos) = clause.vars.iter().position(|&v| v == var) else {
        return Restricted::Remaining(clause.clone());
    };
    let d = clause.d();
    let nd = d - 1;
    let mut vars = clause.vars.clone();
    vars.remove(pos);
    let mut table = vec![0u64; ((1usize << nd) + 63) / 64];
    let mut any_zero = false;
    let mut any_one = false;
    for p in 0..1u32 << nd {
        // Insert the assigned bit at `pos` to index the original table.
        let low = p & ((1 << pos) - 1);
        let high = p >> pos << (pos + 1);
        let full = high | ((value as u32) << pos) | low;
        if clause.get(full) {
            table[(p / 64) as usize] |= 1 << (p % 64);
            any_one = true;
        } else {
            any_zero = true;
        }
    }
    if !any_one {
        Restricted::Conflict
    } else if !any_zero {
        Restricted::Satisfied
    } else {
        Restricted::Remaining(BtClause { vars, table })
    }
}

/// Relabels variables by first occurrence (clauses scanned in order,
/// positions in order). Returns the relabeled clauses and the number of
/// distinct variables.
fn canonicalize(clauses: &[BtClause]) -> (Vec<BtClause>, usize) {
    let mut map: HashMap<u16, u16> = HashMap::new();
    let mut out = Vec::with_capacity(clauses.len());
    for c in clauses {
        let vars = c
            .vars
            .iter()
            .map(|&v| {
                let next = map.len() as u16;
                *map.entry(v).or_insert(next)
            })
            .collect();
        out.push(BtClause {
            vars,
            table: c.table.clone(),
        });
    }
    (out, map.len())
}

fn distinct_vars(clauses: &[BtClause]) -> usize {
    let mut seen = std::collections::HashSet::new();
    for c in clauses {
        seen.extend(c.vars.iter().copied());
    }
    seen.len()
}

struct Solver {
    cache: HashMap<Vec<BtClause>, BigUint>,
    budget: u64,
    initial_budget: u64,
}

impl Solver {
    /// Counts satisfying assignments over the union of variables of
    /// `clauses`, which must be in canonical form (ids `0..nv`).
    fn solve(&mut self, clauses: Vec<BtClause>, nv: usize) -> Result<BigUint, CountError> {
        if clauses.is_empty() {
            return Ok(BigUint::one());
        }

        // Forced-variable propagation: one pass collecting all forced
        // literals, then apply and recurse (the recursion propagates again).
        // BTreeMap keeps the application order deterministic.
        let mut forced: std::collections::BTreeMap<u16, bool> = std::collections::BTreeMap::new();
        for c in &clauses {
            if c.is_never_true() {
                return Ok(BigUint::zero());
            }
            let d = c.d();
            let mut seen1 = 0u32;
            let mut seen0 = 0u32;
            for p in 0..1u32 << d {
                if c.get(p) {
                    seen1 |= p;
                    seen0 |= !p & ((1 << d) - 1);
                }
            }
            for (i, &v) in c.vars.iter().enumerate() {
                let can_be_one = seen1 >> i & 1 == 1;
                let can_be_zero = seen0 >> i & 1 == 1;
                if can_be_one != can_be_zero {
                    match forced.insert(v, can_be_one) {
                        Some(prev) if prev != can_be_one => return Ok(BigUint::zero()),
                        _ => {}
                    }
                }
            }
        }
        if !forced.is_empty() {
            let mut current = clauses;
            for (&v, &b) in &forced {
                let mut next = Vec::with_capacity(current.len());
                for c in &current {
                    match restrict(c, v, b) {
                        Restricted::Satisfied => {}
                        Restricted::Conflict => return Ok(BigUint::zero()),
                        Restricted::Remaining(r) => next.push(r),
                    }
                }
                current = next;
            }
            let used = distinct_vars(&current);
            let freed = nv - forced.len() - used;
            let (canon, cn) = canonicalize(&current);
            return Ok(self.solve(canon, cn)? << freed);
        }

        // Connected components over shared variables.
        let comps = split_components(&clauses);
        if comps.len() > 1 {
            let mut total = BigUint::one();
            for comp in comps {
                let (canon, cn) = canonicalize(&comp);
                total *= self.count_component(canon, cn)?;
                if total.is_zero() {
                    return Ok(total);
                }
            }
            return Ok(total);
        }
        self.count_component(clauses, nv)
    }

    /// Counts one connected component (canonical form), with memoization.
    fn count_component(&mut self, clauses: Vec<BtClause>, nv: usize) -> Result<BigUint, CountError> {
        if let Some(hit) = self.cache.get(&clauses) {
            return Ok(hit.clone());
        }
        if self.budget == 0 {
            return Err(CountError::BudgetExceeded {
                budget: self.initial_budget,
            });
        }
        self.budget -= 1;

        // Branch on the most constrained variable (highest occurrence count,
        // smallest id on ties).
        let mut occ: HashMap<u16, u32> = HashMap::new();
        for c in &clauses {
            for &v in &c.vars {
                *occ.entry(v).or_insert(0) += 1;
            }
        }
        let (&branch_var, _) = occ
            .iter()
            .max_by_key(|(&v, &cnt)| (cnt, std::cmp::Reverse(v)))
            .expect("component has variables");

        let mut total = BigUint::zero();
        'values: for value in [false, true] {
            let mut rest = Vec::with_capacity(clauses.len());
            for c in &clauses {
                match restrict(c, branch_var, value) {
                    Restricted::Satisfied => {}
                    Restricted::Conflict => continue 'values,
                    Restricted::Remaining(r) => rest.push(r),
                }
            }
            let used = distinct_vars(&rest);
            let freed = nv - 1 - used;
            let (canon, cn) = canonicalize(&rest);
            total += self.solve(canon, cn)? << freed;
        }
        self.cache.insert(clauses, total.clone());
        Ok(total)
    }
}

fn split_components(clauses: &[BtClause]) -> Vec<Vec<BtClause>> {
    // Union-find over variable ids; clauses join their variables.
    let max_var = clauses
        .iter()
        .flat_map(|c| c.vars.iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let mut parent: Vec<usize> = (0..=max_var).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in clauses {
        let r0 = find(&mut parent, c.vars[0] as usize);
        for &v in &c.vars[1..] {
            let rv = find(&mut parent, v as usize);
            parent[rv] = r0;
        }
    }
    let mut groups: HashMap<usize, Vec<BtClause>> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    for c in clauses {
        let root = find(&mut parent, c.vars[0] as usize);
        if !groups.contains_key(&root) {
            order.push(root);
        }
        groups.entry(root).or_default().push(c.clone());
    }
    order.into_iter().map(|r| groups.remove(&r).unwrap()).collect()
}

/// Exact count via propagation, component splitting, and memoization, with
/// the default node budget.
pub fn count_backtracking(formula: &Formula) -> Result<CountResult, CountError> {
    count_backtracking_with(formula, &BacktrackOptions::default())
}

/// Exact count with an explicit node budget.
pub fn count_backtracking_with(
    formula: &Formula,
    opts: &BacktrackOptions,
) -> Result<CountResult, CountError> {
    let mut clauses: Vec<BtClause> = Vec::with_capacity(formula.m());
    let mut unsat = false;
    let mut id_of: HashMap<u32, u16> = HashMap::new();
    for placed in formula.clauses() {
        let (vars, table) = effective_clause(placed);
        let c = BtClause {
            vars: vars
                .iter()
                .map(|&v| {
                    let next = id_of.len() as u16;
                    *id_of.entry(v).or_insert(next)
                })
                .collect(),
            table,
        };
        if c.is_always_true() {
            // Constrains nothing; its variables count as free unless some
            // other clause mentions them (handled by the used-variable scan).
            continue;
        }
        if c.is_never_true() {
            unsat = true;
            break;
        }
        clauses.push(c);
    }

    let free_syntactic = super::free_variables(formula);
    if unsat {
        return Ok(CountResult::new(
            BigUint::zero(),
            free_syntactic,
            Engine::Backtracking,
        ));
    }

    let used_effective = distinct_vars(&clauses);
    let unconstrained = formula.n() as usize - used_effective;
    let (canon, nv) = canonicalize(&clauses);
    let mut solver = Solver {
        cache: HashMap::new(),
        budget: opts.node_budget,
        initial_budget: opts.node_budget,
    };
    let z = solver.solve(canon, nv)? << unconstrained;
    Ok(CountResult::new(z, free_syntactic, Engine::Backtracking))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_fixed_m, sample_poisson};
    use crate::formula::{make_ksat, ClauseType, Formula, PlacedClause};
    use crate::rngstream::SeedSpec;

    #[test]
    fn empty_formula() {
        let r = count_backtracking(&Formula::empty(8, 2)).unwrap();
        assert_eq!(r.z, BigUint::from(256u32));
        assert_eq!(r.free_vars, 8);
    }

    #[test]
    fn forced_variable_conditioning() {
        // Clause satisfied only when x1 = +1 (forbids patterns where bit0=0):
        // the count equals the count of the rest restricted to x1 = +1.
        let force = ClauseType::from_fn(2, |p| p & 1 == 1).unwrap();
        let t = ClauseType::forbidding(2, &[0b00]).unwrap();
        let f = Formula::new(
            3,
            2,
            vec![
                PlacedClause::new(vec![1, 2], force).unwrap(),
                PlacedClause::new(vec![1, 3], t.clone()).unwrap(),
            ],
        )
        .unwrap();
        // With x1 = +1: clause (x1 or x3) is satisfied; x2, x3 free: 4.
        let r = count_backtracking(&f).unwrap();
        assert_eq!(r.z, BigUint::from(4u32));
        assert_eq!(r.z, super::super::tests::naive_count(&f));
    }

    #[test]
    fn disjoint_copies_multiply() {
        let mu = make_ksat(2).unwrap();
        let base = sample_fixed_m(5, 5, &mu, SeedSpec::new(3, 0)).unwrap();
        let mut doubled = Formula::empty(10, 2);
        for c in base.clauses() {
            doubled.push_clause(c.clone()).unwrap();
            let shifted: Vec<u32> = c.indices.iter().map(|&v| v + 5).collect();
            doubled
                .push_clause(PlacedClause::new(shifted, c.ctype.clone()).unwrap())
                .unwrap();
        }
        let z1 = count_backtracking(&base).unwrap().z;
        let z2 = count_backtracking(&doubled).unwrap().z;
        assert_eq!(z2, &z1 * &z1);
    }

    #[test]
    fn agrees_with_bruteforce_on_random_instances() {
        for s in 0..50u64 {
            let k = 2 + (s % 2) as u32;
            let mu = make_ksat(k).unwrap();
            let n = 4 + (s % 10) as u32;
            let f = sample_poisson(n, 1.0, &mu, SeedSpec::new(700 + s, 0)).unwrap();
            let b = super::super::count_bruteforce(&f).unwrap();
            let t = count_backtracking(&f).unwrap();
            assert_eq!(b.z, t.z, "seed {s}");
        }
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let mu = make_ksat(3).unwrap();
        let f = sample_fixed_m(30, 60, &mu, SeedSpec::new(5, 0)).unwrap();
        let r = count_backtracking_with(&f, &BacktrackOptions { node_budget: 1 });
        assert!(matches!(r, Err(CountError::BudgetExceeded { .. })));
    }

    #[test]
    fn handles_tautology_and_contradiction_clauses() {
        // Tautology from a repeated index with conflicting requirements.
        let taut = ClauseType::forbidding(2, &[0b01]).unwrap();
        let f = Formula::new(2, 2, vec![PlacedClause::new(vec![1, 1], taut).unwrap()]).unwrap();
        assert_eq!(count_backtracking(&f).unwrap().z, BigUint::from(4u32));

        // Never-true clause forces Z = 0.
        let never = ClauseType::from_fn(2, |_| false).unwrap();
        let f = Formula::new(3, 2, vec![PlacedClause::new(vec![1, 2], never).unwrap()]).unwrap();
        assert_eq!(count_backtracking(&f).unwrap().z, BigUint::zero());
    }

    #[test]
    fn moderate_two_sat_instance() {
        // Near the 2-SAT density regime used by the larger experiments.
        let mu = make_ksat(2).unwrap();
        let f = sample_poisson(80, 0.9, &mu, SeedSpec::new(9, 1)).unwrap();
        let r = count_backtracking(&f).unwrap();
        assert!(r.z <= BigUint::from(1u8) << 80);
    }
}
