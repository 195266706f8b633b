//! Finite relational structures: Tarskian evaluation, fluted types of
//! tuples, domain multiplication, and the grounding-based bounded model
//! finder.

use std::collections::{BTreeMap, BTreeSet};

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::sat::{self, Cnf};
use crate::syntax::{infer_signature, Formula, Signature};
use crate::types::{AtomTable, KType};

/// A finite structure with domain `0 .. domain-1` and explicit true-tuple
/// sets per predicate. Unlisted tuples are false; predicates may be declared
/// in the signature with empty extensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    domain: usize,
    sig: Signature,
    rels: BTreeMap<String, BTreeSet<Vec<usize>>>,
}

impl Structure {
    pub fn new(domain: usize, sig: Signature) -> Structure {
        assert!(domain >= 1, "structures have nonempty domains");
        Structure {
            domain,
            sig,
            rels: BTreeMap::new(),
        }
    }

    pub fn domain_size(&self) -> usize {
        self.domain
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn add_tuple(&mut self, pred: &str, tuple: Vec<usize>) -> Result<()> {
        if let Some(a) = self.sig.arity(pred) {
            if a != tuple.len() {
                return Err(Error::ArityConflict {
                    name: pred.to_string(),
                    first: a,
                    second: tuple.len(),
                });
            }
        } else {
            self.sig.insert(pred, tuple.len())?;
        }
        for &t in &tuple {
            if t >= self.domain {
                return Err(Error::ElementOutOfRange {
                    value: t,
                    domain: self.domain,
                });
            }
        }
        self.rels.entry(pred.to_string()).or_default().insert(tuple);
        Ok(())
    }

    pub fn holds(&self, pred: &str, tuple: &[usize]) -> bool {
        self.rels
            .get(pred)
            .map(|s| s.contains(tuple))
            .unwrap_or(false)
    }

    pub fn tuples(&self, pred: &str) -> impl Iterator<Item = &Vec<usize>> {
        self.rels.get(pred).into_iter().flatten()
    }

    /// All (predicate, tuple) pairs in canonical order.
    pub fn all_tuples(&self) -> impl Iterator<Item = (&str, &Vec<usize>)> {
        self.rels
            .iter()
            .flat_map(|(p, ts)| ts.iter().map(move |t| (p.as_str(), t)))
    }

    /// Standard first-order truth value; quantifiers range over the whole
    /// domain. `env` must assign every free variable.
    pub fn evaluate(&self, phi: &Formula, env: &BTreeMap<usize, usize>) -> Result<bool> {
        let width = phi.width();
        let mut stack = vec![None; width + 1];
        for (&v, &d) in env {
            if v <= width {
                stack[v] = Some(d);
            }
        }
        self.eval_rec(phi, &mut stack)
    }

    /// Truth of a sentence.
    pub fn satisfies(&self, phi: &Formula) -> Result<bool> {
        self.evaluate(phi, &BTreeMap::new())
    }

    fn eval_rec(&self, phi: &Formula, env: &mut Vec<Option<usize>>) -> Result<bool> {
        match phi {
            Formula::Atom(p, args) => {
                let mut tuple = Vec::with_capacity(args.len());
                for &v in args {
                    match env.get(v).copied().flatten() {
                        Some(d) => tuple.push(d),
                        None => return Err(Error::UnboundVariable(v)),
                    }
                }
                Ok(self.holds(&p.name, &tuple))
            }
            Formula::Not(a) => Ok(!self.eval_rec(a, env)?),
            Formula::And(a, b) => Ok(self.eval_rec(a, env)? && self.eval_rec(b, env)?),
            Formula::Or(a, b) => Ok(self.eval_rec(a, env)? || self.eval_rec(b, env)?),
            Formula::Implies(a, b) => Ok(!self.eval_rec(a, env)? || self.eval_rec(b, env)?),
            Formula::Iff(a, b) => Ok(self.eval_rec(a, env)? == self.eval_rec(b, env)?),
            Formula::Forall(v, a) => {
                let saved = env[*v];
                for d in 0..self.domain {
                    env[*v] = Some(d);
                    if !self.eval_rec(a, env)? {
                        env[*v] = saved;
                        return Ok(false);
                    }
                }
                env[*v] = saved;
                Ok(true)
            }
            Formula::Exists(v, a) => {
                let saved = env[*v];
                for d in 0..self.domain {
                    env[*v] = Some(d);
                    if self.eval_rec(a, env)? {
                        env[*v] = saved;
                        return Ok(true);
                    }
                }
                env[*v] = saved;
                Ok(false)
            }
        }
    }

    /// The unique fluted k-type realized by the tuple on the atoms of `table`.
    pub fn ftp(&self, tuple: &[usize], table: &AtomTable) -> KType {
        debug_assert!(!tuple.is_empty());
        debug_assert_eq!(tuple.len(), table.level());
        let k = tuple.len();
        let mut bits = 0u64;
        for i in 0..table.len() {
            let p = table.pred(i);
            let suffix = &tuple[k - p.arity..];
            if self.holds(&p.name, suffix) {
                bits |= 1 << i;
            }
        }
        KType::new(bits)
    }

    /// Blows the domain up to `{1..z} x A` (flattened as `copy * |A| + a`),
    /// with tuple membership depending only on the second coordinates. Truth
    /// of equality-free sentences is preserved, and every satisfied
    /// existential body gains at least `z` distinct witnesses.
    pub fn multiply(&self, z: usize) -> Structure {
        assert!(z >= 1);
        let n = self.domain;
        let mut out = Structure::new(n * z, self.sig.clone());
        for (pred, tuples) in &self.rels {
            let arity = tuples.iter().next().map(|t| t.len()).unwrap_or(0);
            let set = out.rels.entry(pred.clone()).or_default();
            if arity == 0 {
                set.insert(Vec::new());
                continue;
            }
            // every combination of copies for each base tuple
            for base in tuples {
                let mut copies = vec![0usize; arity];
                loop {
                    let tuple: Vec<usize> = base
                        .iter()
                        .zip(&copies)
                        .map(|(&a, &c)| c * n + a)
                        .collect();
                    set.insert(tuple);
                    let mut i = 0;
                    loop {
                        if i == arity {
                            break;
                        }
                        copies[i] += 1;
                        if copies[i] < z {
                            break;
                        }
                        copies[i] = 0;
                        i += 1;
                    }
                    if i == arity {
                        break;
                    }
                }
            }
        }
        out
    }
}

/// Outcome of the bounded search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundedSearch {
    Model(Structure),
    NoModelUpTo(usize),
}

impl BoundedSearch {
    pub fn model(self) -> Option<Structure> {
        match self {
            BoundedSearch::Model(m) => Some(m),
            BoundedSearch::NoModelUpTo(_) => None,
        }
    }

    pub fn is_model(&self) -> bool {
        matches!(self, BoundedSearch::Model(_))
    }
}

/// Variable layout for one grounding: ground atoms first, then definitional
/// variables for subformula instances.
struct Grounding {
    sig: Signature,
    n: usize,
    offsets: BTreeMap<String, usize>,
    cnf: Cnf,
}

impl Grounding {
    fn new(sig: Signature, n: usize) -> Grounding {
        let mut offsets = BTreeMap::new();
        let mut next = 0usize;
        for p in sig.predicates() {
            offsets.insert(p.name.clone(), next);
            next += n.pow(p.arity as u32);
        }
        Grounding {
            sig,
            n,
            offsets,
            cnf: Cnf::new(next),
        }
    }

    fn atom_var(&self, pred: &str, tuple: &[usize]) -> usize {
        let mut idx = 0usize;
        for &t in tuple {
            idx = idx * self.n + t;
        }
        self.offsets[pred] + idx + 1
    }

    /// Definitional translation: returns a literal equivalent to the
    /// subformula under `env`, adding both-direction defining clauses for
    /// each fresh variable.
    fn encode(&mut self, phi: &Formula, env: &mut Vec<Option<usize>>) -> i32 {
        match phi {
            Formula::Atom(p, args) => {
                let tuple: Vec<usize> = args.iter().map(|&v| env[v].unwrap()).collect();
                self.atom_var(&p.name, &tuple) as i32
            }
            Formula::Not(a) => -self.encode(a, env),
            Formula::And(a, b) => {
                let la = self.encode(a, env);
                let lb = self.encode(b, env);
                let v = self.cnf.fresh_var() as i32;
                self.cnf.add_clause(vec![-v, la]);
                self.cnf.add_clause(vec![-v, lb]);
                self.cnf.add_clause(vec![v, -la, -lb]);
                v
            }
            Formula::Or(a, b) => {
                let la = self.encode(a, env);
                let lb = self.encode(b, env);
                let v = self.cnf.fresh_var() as i32;
                self.cnf.add_clause(vec![-v, la, lb]);
                self.cnf.add_clause(vec![v, -la]);
                self.cnf.add_clause(vec![v, -lb]);
                v
            }
            Formula::Implies(a, b) => {
                let la = self.encode(a, env);
                let lb = self.encode(b, env);
                let v = self.cnf.fresh_var() as i32;
                self.cnf.add_clause(vec![-v, -la, lb]);
                self.cnf.add_clause(vec![v, la]);
                self.cnf.add_clause(vec![v, -lb]);
                v
            }
            Formula::Iff(a, b) => {
                let la = self.encode(a, env);
                let lb = self.encode(b, env);
                let v = self.cnf.fresh_var() as i32;
                self.cnf.add_clause(vec![-v, -la, lb]);
                self.cnf.add_clause(vec![-v, la, -lb]);
                self.cnf.add_clause(vec![v, la, lb]);
                self.cnf.add_clause(vec![v, -la, -lb]);
                v
            }
            Formula::Forall(x, a) => {
                let lits: Vec<i32> = (0..self.n)
                    .map(|d| {
                        env[*x] = Some(d);
                        let l = self.encode(a, env);
                        env[*x] = None;
                        l
                    })
                    .collect();
                let v = self.cnf.fresh_var() as i32;
                let mut back = vec![v];
                for &l in &lits {
                    self.cnf.add_clause(vec![-v, l]);
                    back.push(-l);
                }
                self.cnf.add_clause(back);
                v
            }
            Formula::Exists(x, a) => {
                let lits: Vec<i32> = (0..self.n)
                    .map(|d| {
                        env[*x] = Some(d);
                        let l = self.encode(a, env);
                        env[*x] = None;
                        l
                    })
                    .collect();
                let v = self.cnf.fresh_var() as i32;
                let mut fwd = vec![-v];
                for &l in &lits {
                    self.cnf.add_clause(vec![v, -l]);
                    fwd.push(l);
                }
                self.cnf.add_clause(fwd);
                v
            }
        }
    }
}

/// Grounds a sentence over a domain of exactly `n` elements and decodes the
/// first satisfying assignment, if any.
pub fn ground_search(phi: &Formula, n: usize) -> Result<Option<Structure>> {
    let sig = infer_signature(phi)?;
    let mut g = Grounding::new(sig.clone(), n);
    let mut env = vec![None; phi.width() + 1];
    let root = g.encode(phi, &mut env);
    g.cnf.add_clause(vec![root]);
    match sat::solve(&g.cnf) {
        sat::SatResult::Unsat => Ok(None),
        sat::SatResult::Sat(a) => {
            let mut s = Structure::new(n, sig.clone());
            for p in sig.predicates() {
                let mut tuple = vec![0usize; p.arity];
                loop {
                    if a.get(g.atom_var(&p.name, &tuple)) {
                        s.add_tuple(&p.name, tuple.clone())?;
                    }
                    let mut i = p.arity;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        tuple[i] += 1;
                        if tuple[i] < n {
                            break;
                        }
                        tuple[i] = 0;
                        if i == 0 {
                            i = usize::MAX;
                            break;
                        }
                    }
                    if i == usize::MAX || p.arity == 0 {
                        break;
                    }
                }
            }
            Ok(Some(s))
        }
    }
}

/// Searches domain sizes `1 ..= n_max` in increasing order, so a returned
/// model is minimum-size. `n_max` must lie within the configured domain cap.
pub fn find_model_upto(phi: &Formula, n_max: usize, caps: &Caps) -> Result<BoundedSearch> {
    if n_max > caps.domain {
        return Err(Error::CapExceeded {
            what: "bounded model search",
            limit: caps.domain,
            need: n_max,
        });
    }
    for n in 1..=n_max {
        if let Some(m) = ground_search(phi, n)? {
            return Ok(BoundedSearch::Model(m));
        }
    }
    Ok(BoundedSearch::NoModelUpTo(n_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::drop_first;

    fn sig(pairs: &[(&str, usize)]) -> Signature {
        Signature::from_predicates(pairs.iter().map(|(n, a)| Predicate::new(*n, *a))).unwrap()
    }

    #[test]
    fn evaluate_quantifiers() {
        let mut s = Structure::new(2, sig(&[("p", 1)]));
        s.add_tuple("p", vec![0]).unwrap();
        let ex = Formula::exists(1, Formula::atom("p", &[1]));
        let all = Formula::forall(1, Formula::atom("p", &[1]));
        assert!(s.satisfies(&ex).unwrap());
        assert!(!s.satisfies(&all).unwrap());
    }

    #[test]
    fn evaluate_unbound_variable() {
        let s = Structure::new(1, sig(&[("p", 1)]));
        let f = Formula::atom("p", &[1]);
        assert!(matches!(
            s.satisfies(&f),
            Err(Error::UnboundVariable(1))
        ));
    }

    #[test]
    fn ftp_single_element() {
        let mut s = Structure::new(1, sig(&[("p", 1)]));
        s.add_tuple("p", vec![0]).unwrap();
        let t1 = AtomTable::new(s.signature(), 1);
        let tau = s.ftp(&[0], &t1);
        assert!(tau.get(0), "1-type of 0 contains p(x1)");
    }

    #[test]
    fn ftp_drop_first_matches_projection() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let sg = sig(&[("p", 1), ("q", 1), ("r", 2)]);
        for _ in 0..20 {
            let mut s = Structure::new(3, sg.clone());
            for p in sg.predicates() {
                for a in 0..3 {
                    if p.arity == 1 && rng.gen() {
                        s.add_tuple(&p.name, vec![a]).unwrap();
                    }
                    if p.arity == 2 {
                        for b in 0..3 {
                            if rng.gen() {
                                s.add_tuple(&p.name, vec![a, b]).unwrap();
                            }
                        }
                    }
                }
            }
            let t2 = AtomTable::new(&sg, 2);
            let t1 = AtomTable::new(&sg, 1);
            for a in 0..3 {
                for b in 0..3 {
                    let pair = s.ftp(&[a, b], &t2);
                    let dropped = drop_first(&pair, &t2, &t1).unwrap();
                    assert_eq!(dropped, s.ftp(&[b], &t1));
                }
            }
        }
    }

    #[test]
    fn multiply_identity_and_counts() {
        let mut s = Structure::new(2, sig(&[("p", 1), ("r", 2)]));
        s.add_tuple("p", vec![0]).unwrap();
        s.add_tuple("r", vec![0, 1]).unwrap();
        let m1 = s.multiply(1);
        assert_eq!(m1.domain_size(), 2);
        assert_eq!(m1, s);
        let m3 = s.multiply(3);
        assert_eq!(m3.domain_size(), 6);
        // p holds exactly of copies of 0
        for c in 0..3 {
            assert!(m3.holds("p", &[c * 2]));
            assert!(!m3.holds("p", &[c * 2 + 1]));
        }
    }

    #[test]
    fn multiply_witness_multiplicity() {
        // one witness for exists x2 r(x1,x2) at element 0
        let mut s = Structure::new(2, sig(&[("r", 2)]));
        s.add_tuple("r", vec![0, 1]).unwrap();
        let m = s.multiply(2);
        // copies of element 0 now see two distinct witnesses (both copies of 1)
        let witnesses: Vec<usize> = (0..4).filter(|&b| m.holds("r", &[0, b])).collect();
        assert!(witnesses.len() >= 2);
    }

    #[test]
    fn find_model_minimal() {
        let caps = Caps::default();
        let ex = Formula::exists(1, Formula::atom("p", &[1]));
        let m = find_model_upto(&ex, 3, &caps).unwrap().model().unwrap();
        assert_eq!(m.domain_size(), 1);
        let contradiction = Formula::and(
            Formula::exists(1, Formula::atom("p", &[1])),
            Formula::forall(1, Formula::not(Formula::atom("p", &[1]))),
        );
        assert_eq!(
            find_model_upto(&contradiction, 4, &caps).unwrap(),
            BoundedSearch::NoModelUpTo(4)
        );
    }

    #[test]
    fn decoded_models_satisfy() {
        // a sentence forcing at least two elements
        let f = Formula::and(
            Formula::exists(1, Formula::atom("p", &[1])),
            Formula::exists(1, Formula::not(Formula::atom("p", &[1]))),
        );
        let m = find_model_upto(&f, 4, &Caps::default())
            .unwrap()
            .model()
            .unwrap();
        assert_eq!(m.domain_size(), 2);
        assert!(m.satisfies(&f).unwrap());
    }

    #[test]
    fn cap_exceeded() {
        let f = Formula::prop("q");
        let caps = Caps {
            domain: 4,
            ..Caps::default()
        };
        assert!(matches!(
            find_model_upto(&f, 10, &caps),
            Err(Error::CapExceeded { .. })
        ));
    }
}
