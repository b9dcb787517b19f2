//! CNF formulas with occurrence lists and strict DIMACS io.

use std::fs;
use std::path::Path;

use super::CnfError;

/// A CNF formula over variables `1..=n_vars`. Literals are nonzero signed
/// integers in DIMACS convention: `v` for the variable, `-v` for its
/// negation. Clauses never repeat a literal, but may contain both `v` and
/// `-v` (such clauses are simply always satisfied).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    n_vars: usize,
    clauses: Vec<Vec<i32>>,
    occ_pos: Vec<Vec<u32>>,
    occ_neg: Vec<Vec<u32>>,
}

impl CnfFormula {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<CnfFormula, CnfError> {
        if n_vars > i32::MAX as usize {
            return Err(CnfError::Invalid(format!("{n_vars} variables")));
        }
        for (i, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(CnfError::Invalid(format!("clause {} is empty", i + 1)));
            }
            for (j, &lit) in clause.iter().enumerate() {
                if lit == 0 || lit.unsigned_abs() as usize > n_vars {
                    return Err(CnfError::Invalid(format!(
                        "literal {lit} out of range in clause {}",
                        i + 1
                    )));
                }
                if clause[..j].contains(&lit) {
                    return Err(CnfError::Invalid(format!(
                        "duplicate literal {lit} in clause {}",
                        i + 1
                    )));
                }
            }
        }
        let mut occ_pos = vec![Vec::new(); n_vars];
        let mut occ_neg = vec![Vec::new(); n_vars];
        for (i, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                let v = lit.unsigned_abs() as usize - 1;
                if lit > 0 {
                    occ_pos[v].push(i as u32);
                } else {
                    occ_neg[v].push(i as u32);
                }
            }
        }
        Ok(CnfFormula {
            n_vars,
            clauses,
            occ_pos,
            occ_neg,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn clause(&self, i: usize) -> &[i32] {
        &self.clauses[i]
    }

    /// Clause indices where the variable (0-based) occurs positively.
    pub fn occ_pos(&self, var: usize) -> &[u32] {
        &self.occ_pos[var]
    }

    pub fn occ_neg(&self, var: usize) -> &[u32] {
        &self.occ_neg[var]
    }

    /// Truth of `lit` under a 0-based assignment vector.
    pub fn lit_true(lit: i32, assignment: &[bool]) -> bool {
        let v = lit.unsigned_abs() as usize - 1;
        assignment[v] == (lit > 0)
    }

    pub fn clause_satisfied(&self, i: usize, assignment: &[bool]) -> bool {
        self.clauses[i]
            .iter()
            .any(|&lit| CnfFormula::lit_true(lit, assignment))
    }

    pub fn count_satisfied(&self, assignment: &[bool]) -> usize {
        assert_eq!(assignment.len(), self.n_vars, "assignment length");
        (0..self.clauses.len())
            .filter(|&i| self.clause_satisfied(i, assignment))
            .count()
    }

    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.count_satisfied(assignment) == self.clauses.len()
    }

    /// Strict DIMACS parser. Comment lines start with `c`; the `p cnf n m`
    /// header must precede all clauses; every clause ends with `0`; the
    /// clause count must match the header. Unterminated or empty clauses,
    /// out-of-range literals and repeated literals are errors.
    pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
        let err = |line: usize, msg: String| CnfError::Parse { line, msg };
        let mut header: Option<(usize, usize)> = None;
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        let mut current: Vec<i32> = Vec::new();
        let mut last_line = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            last_line = lineno;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if header.is_none() {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
                    return Err(err(lineno, format!("expected 'p cnf <vars> <clauses>', got '{line}'")));
                }
                let n: usize = toks[2]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad variable count '{}'", toks[2])))?;
                let m: usize = toks[3]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad clause count '{}'", toks[3])))?;
                if n > i32::MAX as usize {
                    return Err(err(lineno, format!("variable count {n} too large")));
                }
                header = Some((n, m));
                continue;
            }
            let (n, m) = header.unwrap();
            for tok in line.split_whitespace() {
                let lit: i32 = tok
                    .parse()
                    .map_err(|_| err(lineno, format!("bad literal '{tok}'")))?;
                if lit == 0 {
                    if current.is_empty() {
                        return Err(err(lineno, "empty clause".into()));
                    }
                    if clauses.len() == m {
                        return Err(err(
                            lineno,
                            format!("more clauses than the declared {m}"),
                        ));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else {
                    if lit.unsigned_abs() as usize > n {
                        return Err(err(
                            lineno,
                            format!("literal {lit} out of range for {n} variables"),
                        ));
                    }
                    if current.contains(&lit) {
                        return Err(err(lineno, format!("duplicate literal {lit} in clause")));
                    }
                    current.push(lit);
                }
            }
        }
        let (n, m) = header.ok_or_else(|| err(last_line.max(1), "missing 'p cnf' header".into()))?;
        if !current.is_empty() {
            return Err(err(last_line, "unterminated clause at end of input".into()));
        }
        if clauses.len() != m {
            return Err(err(
                last_line,
                format!("header declared {m} clauses, found {}", clauses.len()),
            ));
        }
        CnfFormula::new(n, clauses)
    }

    pub fn emit_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n_vars, self.clauses.len());
        for clause in &self.clauses {
            for lit in clause {
                out.push_str(&lit.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn load_dimacs(path: &Path) -> Result<CnfFormula, CnfError> {
        CnfFormula::parse_dimacs(&fs::read_to_string(path)?)
    }

    pub fn save_dimacs(&self, path: &Path) -> Result<(), CnfError> {
        fs::write(path, self.emit_dimacs())?;
        Ok(())
    }
}
