//! Text formats for formulas, both with a write→parse round-trip guarantee.
//!
//! **DIMACS CNF** (pure k-SAT formulas only): the standard `p cnf n m` header
//! followed by one clause per line as 1-based signed literals terminated by
//! `0`. A clause type forbidding the tuple `s` becomes the disjunction of
//! literals `x_i = -s_i`, so position `i` emits `+v_i` when `s_i = -1` and
//! `-v_i` when `s_i = +1`. Provenance, when present, is stored in a
//! `c provenance <json>` comment.
//!
//! **gcsp** (any clause types): a header line `g csp <n> <k>`, then one
//! clause per line, `c <idx_1> ... <idx_k> <table-hex>`, where `<table-hex>`
//! is the truth table from [`ClauseType::table_hex`]. Lines starting with `#`
//! are comments; provenance is stored as `# provenance <json>`.

use super::{ClauseType, Formula, FormulaError, PlacedClause, Provenance};

type Result<T> = std::result::Result<T, FormulaError>;

fn provenance_json(p: &Provenance) -> String {
    serde_json::to_string(p).expect("provenance serializes")
}

fn parse_provenance(line: usize, json: &str) -> Result<Provenance> {
    serde_json::from_str(json).map_err(|e| FormulaError::Parse {
        line,
        msg: format!("bad provenance json: {e}"),
    })
}

/// Serializes a pure k-SAT formula (every clause type forbids exactly one
/// tuple) to DIMACS CNF.
pub fn to_dimacs(formula: &Formula) -> Result<String> {
    let mut out = String::new();
    if let Some(p) = &formula.provenance {
        out.push_str(&format!("c provenance {}\n", provenance_json(p)));
    }
    out.push_str(&format!("p cnf {} {}\n", formula.n(), formula.m()));
    for clause in formula.clauses() {
        let s = clause.ctype.single_forbidden().ok_or_else(|| {
            FormulaError::NotPureKsat(format!(
                "clause type {} does not forbid exactly one tuple",
                clause.ctype.table_hex()
            ))
        })?;
        for (i, &v) in clause.indices.iter().enumerate() {
            if s >> i & 1 == 1 {
                out.push_str(&format!("-{v} "));
            } else {
                out.push_str(&format!("{v} "));
            }
        }
        out.push_str("0\n");
    }
    Ok(out)
}

/// Parses DIMACS CNF into a formula. All clauses must have the same width.
pub fn from_dimacs(text: &str) -> Result<Formula> {
    let mut formula: Option<Formula> = None;
    let mut provenance: Option<Provenance> = None;
    let mut declared_m = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("c") {
            let rest = rest.trim_start();
            if let Some(json) = rest.strip_prefix("provenance ") {
                provenance = Some(parse_provenance(lineno, json)?);
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("p cnf") {
            let mut it = rest.split_whitespace();
            let n: u32 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| FormulaError::Parse {
                    line: lineno,
                    msg: "bad header".into(),
                })?;
            declared_m = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| FormulaError::Parse {
                    line: lineno,
                    msg: "bad header".into(),
                })?;
            // Arity is fixed by the first clause; 0 for an empty formula.
            formula = Some(Formula::empty(n, 0));
            continue;
        }
        let f = formula.as_mut().ok_or_else(|| FormulaError::Parse {
            line: lineno,
            msg: "clause before p cnf header".into(),
        })?;
        let mut lits = Vec::new();
        for tok in line.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| FormulaError::Parse {
                line: lineno,
                msg: format!("bad literal {tok:?}"),
            })?;
            if lit == 0 {
                break;
            }
            lits.push(lit);
        }
        if lits.is_empty() {
            return Err(FormulaError::Parse {
                line: lineno,
                msg: "empty clause".into(),
            });
        }
        let k = lits.len() as u32;
        if f.k() == 0 && f.m() == 0 {
            *f = Formula::empty(f.n(), k);
        }
        let mut indices = Vec::with_capacity(lits.len());
        let mut forbidden = 0u32;
        for (i, &lit) in lits.iter().enumerate() {
            indices.push(lit.unsigned_abs() as u32);
            if lit < 0 {
                forbidden |= 1 << i;
            }
        }
        let ctype = ClauseType::forbidding(k, &[forbidden])?;
        f.push_clause(PlacedClause::new(indices, ctype)?)
            .map_err(|e| FormulaError::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
    }
    let mut f = formula.ok_or_else(|| FormulaError::Parse {
        line: 0,
        msg: "missing p cnf header".into(),
    })?;
    if f.m() != declared_m {
        return Err(FormulaError::Parse {
            line: 0,
            msg: format!("header declares {declared_m} clauses, found {}", f.m()),
        });
    }
    f.provenance = provenance;
    Ok(f)
}

/// Serializes any formula to the generalized text format.
pub fn to_gcsp(formula: &Formula) -> String {
    let mut out = String::new();
    if let Some(p) = &formula.provenance {
        out.push_str(&format!("# provenance {}\n", provenance_json(p)));
    }
    out.push_str(&format!("g csp {} {}\n", formula.n(), formula.k()));
    for clause in formula.clauses() {
        out.push('c');
        for &v in &clause.indices {
            out.push_str(&format!(" {v}"));
        }
        out.push_str(&format!(" {}\n", clause.ctype.table_hex()));
    }
    out
}

/// Parses the generalized text format.
pub fn from_gcsp(text: &str) -> Result<Formula> {
    let mut formula: Option<Formula> = None;
    let mut provenance: Option<Provenance> = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim_start();
            if let Some(json) = rest.strip_prefix("provenance ") {
                provenance = Some(parse_provenance(lineno, json)?);
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("g csp") {
            let mut it = rest.split_whitespace();
            let parse = |t: Option<&str>| -> Result<u32> {
                t.and_then(|t| t.parse().ok())
                    .ok_or_else(|| FormulaError::Parse {
                        line: lineno,
                        msg: "bad g csp header".into(),
                    })
            };
            let n = parse(it.next())?;
            let k = parse(it.next())?;
            formula = Some(Formula::empty(n, k));
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            let f = formula.as_mut().ok_or_else(|| FormulaError::Parse {
                line: lineno,
                msg: "clause before g csp header".into(),
            })?;
            let toks: Vec<&str> = rest.split_whitespace().collect();
            if toks.len() != f.k() as usize + 1 {
                return Err(FormulaError::Parse {
                    line: lineno,
                    msg: format!(
                        "expected {} indices and a table, got {} tokens",
                        f.k(),
                        toks.len()
                    ),
                });
            }
            let indices = toks[..toks.len() - 1]
                .iter()
                .map(|t| {
                    t.parse::<u32>().map_err(|_| FormulaError::Parse {
                        line: lineno,
                        msg: format!("bad index {t:?}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let ctype = ClauseType::from_table_hex(f.k(), toks[toks.len() - 1]).map_err(|e| {
                FormulaError::Parse {
                    line: lineno,
                    msg: e.to_string(),
                }
            })?;
            f.push_clause(PlacedClause::new(indices, ctype)?)
                .map_err(|e| FormulaError::Parse {
                    line: lineno,
                    msg: e.to_string(),
                })?;
            continue;
        }
        return Err(FormulaError::Parse {
            line: lineno,
            msg: format!("unrecognized line {line:?}"),
        });
    }
    let mut f = formula.ok_or_else(|| FormulaError::Parse {
        line: 0,
        msg: "missing g csp header".into(),
    })?;
    f.provenance = provenance;
    Ok(f)
}

/// Parses either format, keyed on the file content (header line).
pub fn from_text(text: &str) -> Result<Formula> {
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with("g csp") {
            return from_gcsp(text);
        }
        if line.starts_with("p cnf") || line.starts_with('c') {
            return from_dimacs(text);
        }
        break;
    }
    Err(FormulaError::Parse {
        line: 0,
        msg: "unrecognized formula format".into(),
    })
}
