//! Minimal complete propositional SAT core: DPLL with unit propagation and
//! pure-literal elimination, no clause learning. Instances here are small
//! (type consistency over a handful of atoms; groundings with a few thousand
//! clauses), and a fixed branching order keeps every run reproducible.

use std::fmt::Write as _;

/// CNF over variables `1..=num_vars`; literals are DIMACS-signed integers.
#[derive(Debug, Clone, Default)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(num_vars: usize) -> Self {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    /// Allocates a fresh variable and returns its index.
    pub fn fresh_var(&mut self) -> usize {
        self.num_vars += 1;
        self.num_vars
    }

    pub fn add_clause(&mut self, lits: Vec<i32>) {
        debug_assert!(lits
            .iter()
            .all(|&l| l != 0 && (l.unsigned_abs() as usize) <= self.num_vars));
        self.clauses.push(lits);
    }

    /// Standard DIMACS serialization (`p cnf V C` header, zero-terminated
    /// clause lines), for external debugging.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p cnf {} {}", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for &l in c {
                let _ = write!(out, "{l} ");
            }
            let _ = writeln!(out, "0");
        }
        out
    }
}

/// Total assignment; index 1-based, unconstrained variables default false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatAssignment {
    values: Vec<bool>,
}

impl SatAssignment {
    pub fn get(&self, var: usize) -> bool {
        self.values[var]
    }

    pub fn satisfies(&self, cnf: &Cnf) -> bool {
        cnf.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| self.get(l.unsigned_abs() as usize) == (l > 0))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    Sat(SatAssignment),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    Unset,
    True,
    False,
}

struct Solver<'a> {
    clauses: &'a [Vec<i32>],
    values: Vec<Val>,
    /// Clause indices watching each variable (both polarities together).
    occurs: Vec<Vec<u32>>,
    /// Per clause: satisfied-by depth marker (usize::MAX = not satisfied).
    sat_at: Vec<usize>,
    /// Per clause: number of unassigned literals.
    unassigned: Vec<u32>,
    trail: Vec<usize>,
}

impl<'a> Solver<'a> {
    fn new(num_vars: usize, clauses: &'a [Vec<i32>]) -> Self {
        let mut occurs = vec![Vec::new(); num_vars + 1];
        for (ci, c) in clauses.iter().enumerate() {
            for &l in c {
                occurs[l.unsigned_abs() as usize].push(ci as u32);
            }
        }
        Solver {
            clauses,
            values: vec![Val::Unset; num_vars + 1],
            occurs,
            sat_at: vec![usize::MAX; clauses.len()],
            unassigned: clauses.iter().map(|c| c.len() as u32).collect(),
            trail: Vec::new(),
        }
    }

    fn lit_val(&self, l: i32) -> Val {
        match self.values[l.unsigned_abs() as usize] {
            Val::Unset => Val::Unset,
            Val::True => {
                if l > 0 {
                    Val::True
                } else {
                    Val::False
                }
            }
            Val::False => {
                if l > 0 {
                    Val::False
                } else {
                    Val::True
                }
            }
        }
    }

    /// Assigns and updates clause counters; returns false on an emptied clause.
    fn assign(&mut self, var: usize, value: bool) -> bool {
        self.values[var] = if value { Val::True } else { Val::False };
        self.trail.push(var);
        let mark = self.trail.len();
        let mut ok = true;
        for i in 0..self.occurs[var].len() {
            let ci = self.occurs[var][i] as usize;
            self.unassigned[ci] -= 1;
            if self.sat_at[ci] != usize::MAX {
                continue;
            }
            let satisfies = self.clauses[ci]
                .iter()
                .any(|&l| l.unsigned_abs() as usize == var && self.lit_val(l) == Val::True);
            if satisfies {
                self.sat_at[ci] = mark;
            } else if self.unassigned[ci] == 0 {
                ok = false;
            }
        }
        ok
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let var = self.trail.pop().unwrap();
            let depth = self.trail.len() + 1;
            self.values[var] = Val::Unset;
            for i in 0..self.occurs[var].len() {
                let ci = self.occurs[var][i] as usize;
                self.unassigned[ci] += 1;
                if self.sat_at[ci] >= depth && self.sat_at[ci] != usize::MAX {
                    self.sat_at[ci] = usize::MAX;
                }
            }
        }
    }

    /// Unit propagation plus pure-literal fixing, run to fixpoint.
    /// Returns false on conflict.
    fn simplify(&mut self) -> bool {
        loop {
            let mut changed = false;
            // unit clauses
            for ci in 0..self.clauses.len() {
                if self.sat_at[ci] != usize::MAX {
                    continue;
                }
                match self.unassigned[ci] {
                    0 => return false,
                    1 => {
                        let lit = *self.clauses[ci]
                            .iter()
                            .find(|&&l| self.lit_val(l) == Val::Unset)
                            .unwrap();
                        if !self.assign(lit.unsigned_abs() as usize, lit > 0) {
                            return false;
                        }
                        changed = true;
                    }
                    _ => {}
                }
            }
            if changed {
                continue;
            }
            // pure literals, lowest variable first
            for var in 1..self.values.len() {
                if self.values[var] != Val::Unset {
                    continue;
                }
                let mut pos = false;
                let mut neg = false;
                for &ci in &self.occurs[var] {
                    let ci = ci as usize;
                    if self.sat_at[ci] != usize::MAX {
                        continue;
                    }
                    for &l in &self.clauses[ci] {
                        if l.unsigned_abs() as usize == var {
                            if l > 0 {
                                pos = true;
                            } else {
                                neg = true;
                            }
                        }
                    }
                    if pos && neg {
                        break;
                    }
                }
                if pos != neg {
                    if !self.assign(var, pos) {
                        return false;
                    }
                    changed = true;
                    break;
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn all_satisfied(&self) -> bool {
        self.sat_at.iter().all(|&s| s != usize::MAX)
    }

    fn next_branch_var(&self) -> Option<usize> {
        // lowest unassigned variable occurring in an unsatisfied clause
        for ci in 0..self.clauses.len() {
            if self.sat_at[ci] == usize::MAX {
                return self
                    .clauses
                    .iter()
                    .enumerate()
                    .filter(|(ci, _)| self.sat_at[*ci] == usize::MAX)
                    .flat_map(|(_, c)| c.iter())
                    .map(|&l| l.unsigned_abs() as usize)
                    .filter(|&v| self.values[v] == Val::Unset)
                    .min();
            }
        }
        None
    }

    fn search(&mut self) -> bool {
        let mark = self.trail.len();
        if !self.simplify() {
            self.undo_to(mark);
            return false;
        }
        if self.all_satisfied() {
            return true;
        }
        let var = match self.next_branch_var() {
            Some(v) => v,
            None => return true,
        };
        for &value in &[true, false] {
            let sub = self.trail.len();
            if self.assign(var, value) && self.search() {
                return true;
            }
            self.undo_to(sub);
        }
        self.undo_to(mark);
        false
    }
}

/// Sound and complete satisfiability; deterministic (branching picks the
/// lowest unassigned index, trying `true` first). The empty clause list is
/// SAT with the all-false default.
pub fn solve(cnf: &Cnf) -> SatResult {
    for c in &cnf.clauses {
        if c.is_empty() {
            return SatResult::Unsat;
        }
    }
    let mut solver = Solver::new(cnf.num_vars, &cnf.clauses);
    if solver.search() {
        let values = (0..=cnf.num_vars)
            .map(|v| solver.values.get(v) == Some(&Val::True))
            .collect();
        SatResult::Sat(SatAssignment { values })
    } else {
        SatResult::Unsat
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(num_vars: usize, clauses: &[&[i32]]) -> Cnf {
        let mut c = Cnf::new(num_vars);
        for cl in clauses {
            c.add_clause(cl.to_vec());
        }
        c
    }

    /// Exhaustive oracle over all 2^n assignments.
    fn brute_sat(c: &Cnf) -> bool {
        for bits in 0u32..(1 << c.num_vars) {
            let val = |l: i32| {
                let v = l.unsigned_abs() as usize;
                ((bits >> (v - 1)) & 1 == 1) == (l > 0)
            };
            if c.clauses.iter().all(|cl| cl.iter().any(|&l| val(l))) {
                return true;
            }
        }
        false
    }

    #[test]
    fn contradiction_unsat() {
        let c = cnf(1, &[&[1], &[-1]]);
        assert_eq!(solve(&c), SatResult::Unsat);
    }

    #[test]
    fn empty_clause_list_sat_all_false() {
        let c = cnf(3, &[]);
        match solve(&c) {
            SatResult::Sat(a) => {
                assert!(!a.get(1) && !a.get(2) && !a.get(3));
            }
            SatResult::Unsat => panic!("empty CNF must be SAT"),
        }
    }

    #[test]
    fn pigeonhole_three_into_two_unsat() {
        // variables p_{i,j}: pigeon i in hole j; i in 0..3, j in 0..2
        let v = |i: usize, j: usize| (i * 2 + j + 1) as i32;
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        for i in 0..3 {
            clauses.push(vec![v(i, 0), v(i, 1)]);
        }
        for j in 0..2 {
            for i1 in 0..3 {
                for i2 in (i1 + 1)..3 {
                    clauses.push(vec![-v(i1, j), -v(i2, j)]);
                }
            }
        }
        let c = Cnf {
            num_vars: 6,
            clauses,
        };
        assert!(!brute_sat(&c), "oracle: PHP(3,2) has no assignment");
        assert_eq!(solve(&c), SatResult::Unsat);
    }

    #[test]
    fn random_3cnf_agrees_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xf1e7ed);
        for round in 0..1000 {
            // mostly small instances, occasionally up to 16 variables
            let n = if round % 25 == 0 {
                rng.gen_range(13..=16)
            } else {
                rng.gen_range(1..=10)
            };
            let m = rng.gen_range(0..=(4 * n).min(40));
            let mut c = Cnf::new(n);
            for _ in 0..m {
                let mut cl = Vec::new();
                for _ in 0..3 {
                    let v = rng.gen_range(1..=n) as i32;
                    cl.push(if rng.gen() { v } else { -v });
                }
                c.add_clause(cl);
            }
            let expect = brute_sat(&c);
            match solve(&c) {
                SatResult::Sat(a) => {
                    assert!(expect, "solver SAT but oracle UNSAT");
                    assert!(a.satisfies(&c), "returned model must satisfy the CNF");
                }
                SatResult::Unsat => assert!(!expect, "solver UNSAT but oracle SAT"),
            }
        }
    }

    #[test]
    fn dimacs_header() {
        let c = cnf(2, &[&[1, -2]]);
        let d = c.to_dimacs();
        assert!(d.starts_with("p cnf 2 1\n"));
        assert!(d.contains("1 -2 0"));
    }
}
