//! A small complete solver: unit propagation, pure literal elimination and
//! most-occurrences branching over a trail with O(1) undo. Meant for
//! filtering generated instances and checking search results, not for
//! industrial formulas, hence the variable cap.

use super::cnf::CnfFormula;
use super::CnfError;

pub const DEFAULT_VAR_CAP: usize = 200;

/// `Ok(Some(assignment))` when satisfiable, `Ok(None)` when not.
/// Variables that never mattered come back `false`.
pub fn dpll_sat(f: &CnfFormula) -> Result<Option<Vec<bool>>, CnfError> {
    dpll_sat_capped(f, DEFAULT_VAR_CAP)
}

pub fn dpll_sat_capped(f: &CnfFormula, cap: usize) -> Result<Option<Vec<bool>>, CnfError> {
    if f.n_vars() > cap {
        return Err(CnfError::VarCap(f.n_vars(), cap));
    }
    let mut solver = Dpll {
        f,
        assignment: vec![None; f.n_vars()],
        clause_sat: vec![false; f.n_clauses()],
        n_unassigned: (0..f.n_clauses())
            .map(|i| f.clause(i).len() as u32)
            .collect(),
        n_sat: 0,
        trail: Vec::new(),
    };
    let units: Vec<u32> = (0..f.n_clauses() as u32)
        .filter(|&c| solver.n_unassigned[c as usize] == 1)
        .collect();
    if solver.search(units) {
        Ok(Some(
            solver
                .assignment
                .iter()
                .map(|a| a.unwrap_or(false))
                .collect(),
        ))
    } else {
        Ok(None)
    }
}

enum TrailEntry {
    Assign(u32),
    SatMark(u32),
}

struct Dpll<'f> {
    f: &'f CnfFormula,
    assignment: Vec<Option<bool>>,
    clause_sat: Vec<bool>,
    n_unassigned: Vec<u32>,
    n_sat: usize,
    trail: Vec<TrailEntry>,
}

impl Dpll<'_> {
    /// Records the assignment, updates clause bookkeeping, queues clauses
    /// that became unit. Returns false when some clause went all-false.
    fn assign(&mut self, v: usize, b: bool, units: &mut Vec<u32>) -> bool {
        debug_assert!(self.assignment[v].is_none());
        self.assignment[v] = Some(b);
        self.trail.push(TrailEntry::Assign(v as u32));
        let (sat_occ, other_occ) = if b {
            (self.f.occ_pos(v), self.f.occ_neg(v))
        } else {
            (self.f.occ_neg(v), self.f.occ_pos(v))
        };
        for &c in sat_occ {
            let ci = c as usize;
            self.n_unassigned[ci] -= 1;
            if !self.clause_sat[ci] {
                self.clause_sat[ci] = true;
                self.n_sat += 1;
                self.trail.push(TrailEntry::SatMark(c));
            }
        }
        let mut ok = true;
        for &c in other_occ {
            let ci = c as usize;
            self.n_unassigned[ci] -= 1;
            if !self.clause_sat[ci] {
                match self.n_unassigned[ci] {
                    0 => ok = false,
                    1 => units.push(c),
                    _ => {}
                }
            }
        }
        ok
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                TrailEntry::Assign(v) => {
                    let vu = v as usize;
                    self.assignment[vu] = None;
                    for &c in self.f.occ_pos(vu) {
                        self.n_unassigned[c as usize] += 1;
                    }
                    for &c in self.f.occ_neg(vu) {
                        self.n_unassigned[c as usize] += 1;
                    }
                }
                TrailEntry::SatMark(c) => {
                    self.clause_sat[c as usize] = false;
                    self.n_sat -= 1;
                }
            }
        }
    }

    fn propagate(&mut self, units: &mut Vec<u32>) -> bool {
        while let Some(c) = units.pop() {
            let ci = c as usize;
            if self.clause_sat[ci] {
                continue;
            }
            let unassigned = self
                .f
                .clause(ci)
                .iter()
                .copied()
                .find(|&lit| self.assignment[lit.unsigned_abs() as usize - 1].is_none());
            match unassigned {
                None => return false,
                Some(lit) => {
                    if !self.assign(lit.unsigned_abs() as usize - 1, lit > 0, units) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Assigns every variable that occurs with only one polarity among the
    /// not-yet-satisfied clauses. Returns None when there were none.
    fn pure_sweep(&mut self, units: &mut Vec<u32>) -> Option<bool> {
        let mut assigned_any = false;
        for v in 0..self.f.n_vars() {
            if self.assignment[v].is_some() {
                continue;
            }
            let pos_live = self
                .f
                .occ_pos(v)
                .iter()
                .any(|&c| !self.clause_sat[c as usize]);
            let neg_live = self
                .f
                .occ_neg(v)
                .iter()
                .any(|&c| !self.clause_sat[c as usize]);
            if pos_live == neg_live {
                continue;
            }
            assigned_any = true;
            if !self.assign(v, pos_live, units) || !self.propagate(units) {
                return Some(false);
            }
        }
        if assigned_any {
            Some(true)
        } else {
            None
        }
    }

    fn search(&mut self, units: Vec<u32>) -> bool {
        let mut units = units;
        loop {
            if !self.propagate(&mut units) {
                return false;
            }
            if self.n_sat == self.f.n_clauses() {
                return true;
            }
            match self.pure_sweep(&mut units) {
                Some(false) => return false,
                Some(true) => continue,
                None => break,
            }
        }
        let mut count = vec![0u32; self.f.n_vars()];
        for ci in 0..self.f.n_clauses() {
            if self.clause_sat[ci] {
                continue;
            }
            for &lit in self.f.clause(ci) {
                let v = lit.unsigned_abs() as usize - 1;
                if self.assignment[v].is_none() {
                    count[v] += 1;
                }
            }
        }
        let branch = (0..count.len())
            .filter(|&v| count[v] > 0)
            .max_by_key(|&v| (count[v], std::cmp::Reverse(v)));
        let v = match branch {
            Some(v) => v,
            // Every clause satisfied; unreachable after the n_sat check, but
            // harmless to answer directly.
            None => return self.n_sat == self.f.n_clauses(),
        };
        for b in [true, false] {
            let mark = self.trail.len();
            let mut child_units = Vec::new();
            if self.assign(v, b, &mut child_units) && self.search(child_units) {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}
