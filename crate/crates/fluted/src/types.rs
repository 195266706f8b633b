//! Fluted k-literals, k-clauses and k-types over a signature, index shifting,
//! and consistency testing of clause sets under partial type constraints.
//!
//! A fluted k-atom is `p(x_{k-a+1}, ..., x_k)` for a predicate of arity
//! `a <= k`; each predicate of arity at most k contributes exactly one atom.
//! Types and clauses are stored as fixed-order bit vectors over that atom
//! enumeration, so equality and hashing are trivial and every enumeration is
//! canonical.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::sat::{self, Cnf, SatAssignment};
use crate::syntax::{Formula, Predicate, Signature};

/// The fluted k-atoms of a signature, ordered by (arity, name).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomTable {
    k: usize,
    preds: Vec<Predicate>,
    index: BTreeMap<Predicate, usize>,
}

impl AtomTable {
    pub fn new(sig: &Signature, k: usize) -> AtomTable {
        let mut preds: Vec<Predicate> = sig.predicates().filter(|p| p.arity <= k).collect();
        preds.sort_by(|a, b| (a.arity, &a.name).cmp(&(b.arity, &b.name)));
        let index = preds
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        AtomTable { k, preds, index }
    }

    pub fn level(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.preds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preds.is_empty()
    }

    pub fn pred(&self, i: usize) -> &Predicate {
        &self.preds[i]
    }

    pub fn preds(&self) -> &[Predicate] {
        &self.preds
    }

    pub fn index_of(&self, p: &Predicate) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// True when atom `i` has the maximal arity `k`. Only such literals can
    /// be resolved on, and only they mention `x1`.
    pub fn is_top_arity(&self, i: usize) -> bool {
        self.preds[i].arity == self.k
    }

    /// Argument indices of atom `i`: the suffix `x_{k-a+1} ..= x_k`.
    pub fn atom_args(&self, i: usize) -> Vec<usize> {
        let a = self.preds[i].arity;
        ((self.k - a + 1)..=self.k).collect()
    }

    pub fn atom_formula(&self, i: usize) -> Formula {
        Formula::Atom(self.preds[i].clone(), self.atom_args(i))
    }
}

/// Deterministic enumeration of the fluted k-atoms of `sig`.
pub fn enumerate_fluted_atoms(sig: &Signature, k: usize) -> Vec<Formula> {
    let table = AtomTable::new(sig, k);
    (0..table.len()).map(|i| table.atom_formula(i)).collect()
}

/// A total polarity map over the fluted k-atoms of a table: bit `i` is the
/// polarity of atom `i`. Totality makes structural inconsistency impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KType {
    pub bits: u64,
}

impl KType {
    pub fn new(bits: u64) -> Self {
        KType { bits }
    }

    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }

    /// Literals as (atom index, polarity) pairs for a table of `len` atoms.
    pub fn literals(&self, len: usize) -> Vec<(usize, bool)> {
        (0..len).map(|i| (i, self.get(i))).collect()
    }
}

/// A set of fluted k-literals, possibly tautological: an atom may appear in
/// both `pos` and `neg`. The empty clause is falsum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KClause {
    pub pos: u64,
    pub neg: u64,
}

impl KClause {
    pub const EMPTY: KClause = KClause { pos: 0, neg: 0 };

    pub fn is_empty(&self) -> bool {
        self.pos == 0 && self.neg == 0
    }

    pub fn is_tautology(&self) -> bool {
        self.pos & self.neg != 0
    }

    /// True if the (total) type satisfies some literal of the clause.
    pub fn satisfied_by(&self, t: &KType) -> bool {
        (self.pos & t.bits) != 0 || (self.neg & !t.bits) != 0
    }

    /// Literals in canonical order: atom index ascending, positive before
    /// negative when both occur.
    pub fn literals(&self, len: usize) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        for i in 0..len {
            if (self.pos >> i) & 1 == 1 {
                out.push((i, true));
            }
            if (self.neg >> i) & 1 == 1 {
                out.push((i, false));
            }
        }
        out
    }
}

/// Enumerates all 2^atoms fluted k-types, in bit order.
pub fn enumerate_k_types(table: &AtomTable, cap_atoms: usize) -> Result<Vec<KType>> {
    let n = table.len();
    if n > cap_atoms || n > 63 {
        return Err(Error::CapExceeded {
            what: "k-type enumeration",
            limit: cap_atoms.min(63),
            need: n,
        });
    }
    Ok((0u64..(1u64 << n)).map(KType::new).collect())
}

/// Enumerates all 2^(2*atoms) fluted k-clauses, tautologies included.
pub fn enumerate_k_clauses(table: &AtomTable, cap_clauses: usize) -> Result<Vec<KClause>> {
    let n = table.len();
    let total = 1u128 << (2 * n).min(127);
    if total > cap_clauses as u128 || n > 31 {
        return Err(Error::CapExceeded {
            what: "k-clause enumeration",
            limit: cap_clauses,
            need: usize::MAX,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    for pos in 0u64..(1 << n) {
        for neg in 0u64..(1 << n) {
            out.push(KClause { pos, neg });
        }
    }
    Ok(out)
}

/// A partial polarity map: `bits` restricted to `mask`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialType {
    pub mask: u64,
    pub bits: u64,
}

impl PartialType {
    pub fn fixed(&self, i: usize) -> Option<bool> {
        if (self.mask >> i) & 1 == 1 {
            Some((self.bits >> i) & 1 == 1)
        } else {
            None
        }
    }
}

/// Increments every variable index of the type: a k-type over `from` becomes
/// a set of (k+1)-level literals over `to`. The result fixes exactly the
/// atoms of arity at most k; it is not a (k+1)-type when `to` has predicates
/// of arity k+1.
pub fn shift_up(t: &KType, from: &AtomTable, to: &AtomTable) -> PartialType {
    debug_assert_eq!(to.level(), from.level() + 1);
    let mut mask = 0u64;
    let mut bits = 0u64;
    for i in 0..from.len() {
        let j = to
            .index_of(from.pred(i))
            .expect("shift target table must contain the source predicates");
        mask |= 1 << j;
        if t.get(i) {
            bits |= 1 << j;
        }
    }
    PartialType { mask, bits }
}

/// Removes all literals featuring `x1` (i.e. of arity k) and decrements the
/// remaining indices, yielding a (k-1)-type.
pub fn drop_first(t: &KType, from: &AtomTable, to: &AtomTable) -> Result<KType> {
    if from.level() < 2 {
        return Err(Error::LevelTooLow);
    }
    debug_assert_eq!(to.level() + 1, from.level());
    let mut bits = 0u64;
    for j in 0..to.len() {
        let i = from
            .index_of(to.pred(j))
            .expect("drop target table must be a sub-signature");
        if t.get(i) {
            bits |= 1 << j;
        }
    }
    Ok(KType::new(bits))
}

/// The suffix-ground atoms over `x1 .. x_k`: for each predicate of arity
/// `a >= 1`, one atom per end position `a ..= k`; propositions once (end 0).
/// These are the propositional variables of every consistency check.
#[derive(Debug, Clone)]
pub struct GroundAtoms {
    k: usize,
    entries: Vec<(Predicate, usize)>,
    index: BTreeMap<(String, usize), usize>,
}

impl GroundAtoms {
    pub fn new(sig: &Signature, k: usize) -> GroundAtoms {
        let mut entries: Vec<(Predicate, usize)> = Vec::new();
        for p in sig.predicates() {
            if p.arity == 0 {
                entries.push((p, 0));
            } else {
                for end in p.arity..=k {
                    entries.push((p.clone(), end));
                }
            }
        }
        entries.sort_by(|a, b| (a.1, a.0.arity, &a.0.name).cmp(&(b.1, b.0.arity, &b.0.name)));
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (p, e))| ((p.name.clone(), *e), i))
            .collect();
        GroundAtoms { k, entries, index }
    }

    pub fn level(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(Predicate, usize)] {
        &self.entries
    }

    /// SAT variable (1-based) of the atom for `pred` ending at `end`.
    /// Propositions are stored at end 0 regardless of the requested end.
    pub fn var(&self, pred: &Predicate, end: usize) -> usize {
        let end = if pred.arity == 0 { 0 } else { end };
        debug_assert!(pred.arity == 0 || (pred.arity <= end && end <= self.k));
        self.index[&(pred.name.clone(), end)] + 1
    }
}

/// Accumulates clause sets and fixed literal sets at various suffix-embedding
/// ends, then asks the SAT core whether some total polarity map satisfies
/// them all. Contradictory fixed literals simply yield `false`.
pub struct ConsistencyCheck<'a> {
    ground: &'a GroundAtoms,
    cnf: Cnf,
}

impl<'a> ConsistencyCheck<'a> {
    pub fn new(ground: &'a GroundAtoms) -> Self {
        ConsistencyCheck {
            ground,
            cnf: Cnf::new(ground.len()),
        }
    }

    fn lit(&self, table: &AtomTable, atom: usize, end: usize, positive: bool) -> i32 {
        let v = self.ground.var(table.pred(atom), end) as i32;
        if positive {
            v
        } else {
            -v
        }
    }

    /// Adds a clause whose atoms (from a level-`table.level()` table) are
    /// embedded so that they end at `end`.
    pub fn add_kclause(&mut self, clause: &KClause, table: &AtomTable, end: usize) {
        let mut lits = Vec::new();
        for (i, positive) in clause.literals(table.len()) {
            lits.push(self.lit(table, i, end, positive));
        }
        self.cnf.add_clause(lits);
    }

    /// Adds `guard -> clause`, the guard being a single literal at its own end.
    pub fn add_guarded_kclause(
        &mut self,
        guard: (&Predicate, usize, bool),
        clause: &KClause,
        table: &AtomTable,
        end: usize,
    ) {
        let (gp, gend, gpos) = guard;
        let gv = self.ground.var(gp, gend) as i32;
        let mut lits = vec![if gpos { -gv } else { gv }];
        for (i, positive) in clause.literals(table.len()) {
            lits.push(self.lit(table, i, end, positive));
        }
        self.cnf.add_clause(lits);
    }

    /// Fixes every atom of a total k-type, embedded to end at `end`.
    pub fn add_type(&mut self, t: &KType, table: &AtomTable, end: usize) {
        for (i, positive) in t.literals(table.len()) {
            let l = self.lit(table, i, end, positive);
            self.cnf.add_clause(vec![l]);
        }
    }

    /// Fixes the determined atoms of a partial type at `end`.
    pub fn add_partial(&mut self, t: &PartialType, table: &AtomTable, end: usize) {
        for i in 0..table.len() {
            if let Some(positive) = t.fixed(i) {
                let l = self.lit(table, i, end, positive);
                self.cnf.add_clause(vec![l]);
            }
        }
    }

    /// Fixes a single literal.
    pub fn add_unit(&mut self, pred: &Predicate, end: usize, positive: bool) {
        let v = self.ground.var(pred, end) as i32;
        self.cnf.add_clause(vec![if positive { v } else { -v }]);
    }

    pub fn check(&self) -> bool {
        sat::solve(&self.cnf).is_sat()
    }

    pub fn solve(&self) -> Option<SatAssignment> {
        match sat::solve(&self.cnf) {
            sat::SatResult::Sat(a) => Some(a),
            sat::SatResult::Unsat => None,
        }
    }
}
