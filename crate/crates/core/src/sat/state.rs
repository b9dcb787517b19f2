//! Incremental assignment state for flip-based SAT search.
//!
//! Per clause we track the number of true literals and the sum of the
//! 1-based ids of the variables supplying them; when exactly one literal is
//! true the sum names it, which keeps break-count maintenance O(1) per
//! touched clause. A flip costs O(occurrences of the variable).

use rand::Rng;

use super::cnf::CnfFormula;
use crate::util;

/// Scratch recomputation of break and make counts, for cross-checking.
/// `break[v]` counts clauses whose single true literal belongs to `v`;
/// `make[v]` counts unsatisfied clauses containing `v`.
pub fn break_make_of(f: &CnfFormula, assignment: &[bool]) -> (Vec<u32>, Vec<u32>) {
    let mut brk = vec![0u32; f.n_vars()];
    let mut mk = vec![0u32; f.n_vars()];
    for i in 0..f.n_clauses() {
        let true_lits: Vec<i32> = f
            .clause(i)
            .iter()
            .copied()
            .filter(|&l| CnfFormula::lit_true(l, assignment))
            .collect();
        match true_lits.len() {
            0 => {
                for &lit in f.clause(i) {
                    mk[lit.unsigned_abs() as usize - 1] += 1;
                }
            }
            1 => brk[true_lits[0].unsigned_abs() as usize - 1] += 1,
            _ => {}
        }
    }
    (brk, mk)
}

#[derive(Debug, Clone)]
pub struct SatState<'f> {
    f: &'f CnfFormula,
    assignment: Vec<bool>,
    n_true: Vec<u32>,
    true_var_sum: Vec<u64>,
    break_count: Vec<u32>,
    make_count: Vec<u32>,
    unsat: Vec<u32>,
    unsat_pos: Vec<u32>,
    last_flip: Vec<Option<u64>>,
    step: u64,
    best_sat: usize,
    best_assignment: Vec<bool>,
}

impl<'f> SatState<'f> {
    pub fn new(f: &'f CnfFormula, assignment: Vec<bool>) -> SatState<'f> {
        assert_eq!(assignment.len(), f.n_vars(), "assignment length");
        let m = f.n_clauses();
        let mut n_true = vec![0u32; m];
        let mut true_var_sum = vec![0u64; m];
        for i in 0..m {
            for &lit in f.clause(i) {
                if CnfFormula::lit_true(lit, &assignment) {
                    n_true[i] += 1;
                    true_var_sum[i] += lit.unsigned_abs() as u64;
                }
            }
        }
        let mut break_count = vec![0u32; f.n_vars()];
        let mut make_count = vec![0u32; f.n_vars()];
        let mut unsat = Vec::new();
        let mut unsat_pos = vec![u32::MAX; m];
        for i in 0..m {
            match n_true[i] {
                0 => {
                    unsat_pos[i] = unsat.len() as u32;
                    unsat.push(i as u32);
                    for &lit in f.clause(i) {
                        make_count[lit.unsigned_abs() as usize - 1] += 1;
                    }
                }
                1 => break_count[true_var_sum[i] as usize - 1] += 1,
                _ => {}
            }
        }
        let best_sat = m - unsat.len();
        SatState {
            f,
            best_assignment: assignment.clone(),
            assignment,
            n_true,
            true_var_sum,
            break_count,
            make_count,
            unsat,
            unsat_pos,
            last_flip: vec![None; f.n_vars()],
            step: 0,
            best_sat,
        }
    }

    pub fn random_start<R: Rng + ?Sized>(f: &'f CnfFormula, rng: &mut R) -> SatState<'f> {
        let a = (0..f.n_vars()).map(|_| rng.random_bool(0.5)).collect();
        SatState::new(f, a)
    }

    /// Flips variable `v` (0-based); returns the change in satisfied count.
    pub fn flip(&mut self, v: usize) -> i64 {
        let vid = (v + 1) as u64;
        let was_true_occ = if self.assignment[v] {
            self.f.occ_pos(v)
        } else {
            self.f.occ_neg(v)
        };
        let mut delta = 0i64;
        for &ci in was_true_occ {
            let c = ci as usize;
            self.n_true[c] -= 1;
            self.true_var_sum[c] -= vid;
            match self.n_true[c] {
                0 => {
                    delta -= 1;
                    self.break_count[v] -= 1;
                    self.unsat_pos[c] = self.unsat.len() as u32;
                    self.unsat.push(ci);
                    for &lit in self.f.clause(c) {
                        self.make_count[lit.unsigned_abs() as usize - 1] += 1;
                    }
                }
                1 => self.break_count[self.true_var_sum[c] as usize - 1] += 1,
                _ => {}
            }
        }
        let was_false_occ = if self.assignment[v] {
            self.f.occ_neg(v)
        } else {
            self.f.occ_pos(v)
        };
        for &ci in was_false_occ {
            let c = ci as usize;
            self.n_true[c] += 1;
            self.true_var_sum[c] += vid;
            match self.n_true[c] {
                1 => {
                    delta += 1;
                    self.break_count[v] += 1;
                    let p = self.unsat_pos[c] as usize;
                    let last = *self.unsat.last().unwrap();
                    self.unsat[p] = last;
                    self.unsat_pos[last as usize] = p as u32;
                    self.unsat.pop();
                    self.unsat_pos[c] = u32::MAX;
                    for &lit in self.f.clause(c) {
                        self.make_count[lit.unsigned_abs() as usize - 1] -= 1;
                    }
                }
                2 => self.break_count[(self.true_var_sum[c] - vid) as usize - 1] -= 1,
                _ => {}
            }
        }
        self.assignment[v] = !self.assignment[v];
        self.last_flip[v] = Some(self.step);
        self.step += 1;
        if self.sat_count() > self.best_sat {
            self.best_sat = self.sat_count();
            self.best_assignment.copy_from_slice(&self.assignment);
        }
        delta
    }

    pub fn formula(&self) -> &'f CnfFormula {
        self.f
    }

    pub fn n_vars(&self) -> usize {
        self.f.n_vars()
    }

    pub fn assignment(&self) -> &[bool] {
        &self.assignment
    }

    pub fn sat_count(&self) -> usize {
        self.f.n_clauses() - self.unsat.len()
    }

    pub fn is_satisfied(&self) -> bool {
        self.unsat.is_empty()
    }

    /// Currently unsatisfied clause indices, in no particular order.
    pub fn unsat_clauses(&self) -> &[u32] {
        &self.unsat
    }

    /// Clauses this variable solely supports: flipping it unsatisfies them.
    pub fn break_count(&self, v: usize) -> u32 {
        self.break_count[v]
    }

    /// Unsatisfied clauses containing this variable: flipping it satisfies
    /// them.
    pub fn make_count(&self, v: usize) -> u32 {
        self.make_count[v]
    }

    pub fn delta_if_flip(&self, v: usize) -> i64 {
        i64::from(self.make_count[v]) - i64::from(self.break_count[v])
    }

    pub fn gains(&self) -> Vec<f64> {
        (0..self.n_vars()).map(|v| self.delta_if_flip(v) as f64).collect()
    }

    pub fn max_delta(&self) -> i64 {
        (0..self.n_vars()).map(|v| self.delta_if_flip(v)).max().unwrap_or(0)
    }

    pub fn is_local_opt(&self) -> bool {
        self.max_delta() <= 0
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn last_flip(&self, v: usize) -> Option<u64> {
        self.last_flip[v]
    }

    pub fn steps_since_flip(&self, v: usize) -> Option<u64> {
        self.last_flip[v].map(|s| self.step - s)
    }

    pub fn best_sat(&self) -> usize {
        self.best_sat
    }

    pub fn best_assignment(&self) -> &[bool] {
        &self.best_assignment
    }

    pub fn fingerprint(&self) -> u64 {
        util::fingerprint_bits(self.assignment.iter().copied())
    }
}
