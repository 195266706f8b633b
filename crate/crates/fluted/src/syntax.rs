//! Abstract syntax for relational first-order formulas over the fixed
//! variable sequence `x1, x2, ...`, signature inference, and the fluted
//! membership test.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A relation symbol. Arity 0 is a proposition letter.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        let name = name.into();
        debug_assert!(!name.is_empty());
        Predicate { name, arity }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// A purely relational signature: no function symbols, no constants.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    arities: BTreeMap<String, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn from_predicates<I: IntoIterator<Item = Predicate>>(preds: I) -> Result<Self> {
        let mut sig = Signature::new();
        for p in preds {
            sig.insert(&p.name, p.arity)?;
        }
        Ok(sig)
    }

    /// Records a predicate, failing on an arity clash with an earlier use.
    pub fn insert(&mut self, name: &str, arity: usize) -> Result<()> {
        match self.arities.get(name) {
            Some(&a) if a != arity => Err(Error::ArityConflict {
                name: name.to_string(),
                first: a,
                second: arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arities.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.arities.contains_key(name)
    }

    pub fn remove(&mut self, name: &str) {
        self.arities.remove(name);
    }

    pub fn len(&self) -> usize {
        self.arities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arities.is_empty()
    }

    /// Predicates in (name) order.
    pub fn predicates(&self) -> impl Iterator<Item = Predicate> + '_ {
        self.arities
            .iter()
            .map(|(n, &a)| Predicate::new(n.clone(), a))
    }

    /// Number of predicates with arity at most `k`.
    pub fn count_arity_at_most(&self, k: usize) -> usize {
        self.arities.values().filter(|&&a| a <= k).count()
    }

    /// Picks a name not yet in the signature, starting from `base` and
    /// appending `@2`, `@3`, ... as needed.
    pub fn fresh_name(&self, base: &str) -> String {
        if !self.contains(base) {
            return base.to_string();
        }
        for i in 2.. {
            let candidate = format!("{base}@{i}");
            if !self.contains(&candidate) {
                return candidate;
            }
        }
        unreachable!()
    }

    /// Union; fails on arity clashes.
    pub fn merge(&mut self, other: &Signature) -> Result<()> {
        for (n, &a) in &other.arities {
            self.insert(n, a)?;
        }
        Ok(())
    }
}

/// First-order formulas over variable indices into `x1, x2, ...`.
///
/// Atom arguments are positive 1-based indices; the argument count must equal
/// the predicate's arity. The AST itself does not enforce fluted discipline —
/// [`fluted_status`] diagnoses it, so non-fluted inputs can be reported
/// rather than rejected at construction time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Predicate, Vec<usize>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(usize, Box<Formula>),
    Exists(usize, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str, args: &[usize]) -> Formula {
        Formula::Atom(Predicate::new(name, args.len()), args.to_vec())
    }

    pub fn prop(name: &str) -> Formula {
        Formula::Atom(Predicate::new(name, 0), Vec::new())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: usize, f: Formula) -> Formula {
        Formula::Forall(v, Box::new(f))
    }

    pub fn exists(v: usize, f: Formula) -> Formula {
        Formula::Exists(v, Box::new(f))
    }

    /// Right-folded conjunction of a nonempty list.
    pub fn and_all(mut fs: Vec<Formula>) -> Formula {
        assert!(!fs.is_empty(), "empty conjunction has no AST constant");
        let mut acc = fs.pop().unwrap();
        while let Some(f) = fs.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Right-folded disjunction of a nonempty list.
    pub fn or_all(mut fs: Vec<Formula>) -> Formula {
        assert!(!fs.is_empty(), "empty disjunction has no AST constant");
        let mut acc = fs.pop().unwrap();
        while let Some(f) = fs.pop() {
            acc = Formula::or(f, acc);
        }
        acc
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(..) => vec![],
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => vec![a, b],
        }
    }

    /// Largest variable index occurring anywhere (arguments or binders); 0
    /// for variable-free formulas. For fluted sentences this is the number of
    /// distinct variables.
    pub fn width(&self) -> usize {
        match self {
            Formula::Atom(_, args) => args.iter().copied().max().unwrap_or(0),
            Formula::Not(a) => a.width(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => a.width().max(b.width()),
            Formula::Forall(v, a) | Formula::Exists(v, a) => (*v).max(a.width()),
        }
    }

    /// Free variable indices, in ascending order.
    pub fn free_vars(&self) -> Vec<usize> {
        fn go(f: &Formula, bound: &mut Vec<usize>, out: &mut Vec<usize>) {
            match f {
                Formula::Atom(_, args) => {
                    for &v in args {
                        if !bound.contains(&v) && !out.contains(&v) {
                            out.push(v);
                        }
                    }
                }
                Formula::Not(a) => go(a, bound, out),
                Formula::And(a, b)
                | Formula::Or(a, b)
                | Formula::Implies(a, b)
                | Formula::Iff(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Forall(v, a) | Formula::Exists(v, a) => {
                    bound.push(*v);
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out.sort_unstable();
        out
    }
}

/// Returns the set of predicates occurring in `phi` with their observed
/// arities; fails if one name occurs with two different argument counts.
pub fn infer_signature(phi: &Formula) -> Result<Signature> {
    fn walk(f: &Formula, sig: &mut Signature) -> Result<()> {
        if let Formula::Atom(p, args) = f {
            debug_assert_eq!(p.arity, args.len());
            sig.insert(&p.name, args.len())?;
        }
        for c in f.children() {
            walk(c, sig)?;
        }
        Ok(())
    }
    let mut sig = Signature::new();
    walk(phi, &mut sig)?;
    Ok(sig)
}

/// Why a subformula breaks fluted discipline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// Atom arguments are not a contiguous ascending run `x_l .. x_k`.
    NonSuffixArgs,
    /// Boolean combination of formulas living at different levels.
    MixedLevels(usize, usize),
    /// Quantifier binds `x_b` but the body lives at level `found`, not `b`.
    BadBinder { binder: usize, found: usize },
    /// Quantifier binds `x_b` but the body cannot be assigned any level.
    BinderOverBroken(usize),
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::NonSuffixArgs => {
                write!(f, "atom arguments are not a contiguous ascending suffix")
            }
            ViolationKind::MixedLevels(a, b) => {
                write!(f, "boolean combination mixes levels {a} and {b}")
            }
            ViolationKind::BadBinder { binder, found } => write!(
                f,
                "quantifier binds x{binder} but its body is at level {found}"
            ),
            ViolationKind::BinderOverBroken(b) => {
                write!(f, "quantifier on x{b} over an already non-fluted body")
            }
        }
    }
}

/// An offending subformula position: the path of child indices from the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: Vec<usize>,
    pub kind: ViolationKind,
}

/// Result of the fluted membership test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlutedReport {
    pub is_fluted: bool,
    /// Least `k` with the formula in FL^[k]; present iff fluted.
    pub level: Option<usize>,
    /// Largest variable index occurring (the `m` of FL^m).
    pub width: usize,
    pub violations: Vec<Violation>,
}

impl FlutedReport {
    /// Fluted and closed (level 0).
    pub fn is_fluted_sentence(&self) -> bool {
        self.is_fluted && self.level == Some(0)
    }
}

/// Levels a subformula can live at: propositional pieces fit every level,
/// everything else at most one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Levels {
    Any,
    Exactly(usize),
    Broken,
}

/// Tests membership in the fluted fragment.
///
/// Atoms must use argument lists `x_l .. x_k` for some `l <= k+1` (arity 0
/// fits every level); boolean combinations must stay within one level;
/// a quantifier on `x_b` requires its body at level `b` and yields level
/// `b - 1`. Violations are reported with their positions rather than raised.
pub fn fluted_status(phi: &Formula) -> FlutedReport {
    fn go(f: &Formula, path: &mut Vec<usize>, out: &mut Vec<Violation>) -> Levels {
        match f {
            Formula::Atom(_, args) => {
                if args.is_empty() {
                    return Levels::Any;
                }
                let k = *args.last().unwrap();
                let suffix = args
                    .iter()
                    .rev()
                    .enumerate()
                    .all(|(i, &v)| v + i == k && v >= 1);
                if suffix {
                    Levels::Exactly(k)
                } else {
                    out.push(Violation {
                        path: path.clone(),
                        kind: ViolationKind::NonSuffixArgs,
                    });
                    Levels::Broken
                }
            }
            Formula::Not(a) => {
                path.push(0);
                let l = go(a, path, out);
                path.pop();
                l
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                path.push(0);
                let la = go(a, path, out);
                path.pop();
                path.push(1);
                let lb = go(b, path, out);
                path.pop();
                match (la, lb) {
                    (Levels::Broken, _) | (_, Levels::Broken) => Levels::Broken,
                    (Levels::Any, l) | (l, Levels::Any) => l,
                    (Levels::Exactly(x), Levels::Exactly(y)) if x == y => Levels::Exactly(x),
                    (Levels::Exactly(x), Levels::Exactly(y)) => {
                        out.push(Violation {
                            path: path.clone(),
                            kind: ViolationKind::MixedLevels(x, y),
                        });
                        Levels::Broken
                    }
                }
            }
            Formula::Forall(b, a) | Formula::Exists(b, a) => {
                path.push(0);
                let la = go(a, path, out);
                path.pop();
                let b = *b;
                match la {
                    Levels::Broken => {
                        out.push(Violation {
                            path: path.clone(),
                            kind: ViolationKind::BinderOverBroken(b),
                        });
                        Levels::Broken
                    }
                    Levels::Any if b >= 1 => Levels::Exactly(b - 1),
                    Levels::Exactly(k) if k == b && b >= 1 => Levels::Exactly(b - 1),
                    Levels::Exactly(k) => {
                        out.push(Violation {
                            path: path.clone(),
                            kind: ViolationKind::BadBinder {
                                binder: b,
                                found: k,
                            },
                        });
                        Levels::Broken
                    }
                    Levels::Any => {
                        // binder index 0 is malformed
                        out.push(Violation {
                            path: path.clone(),
                            kind: ViolationKind::BadBinder {
                                binder: b,
                                found: 0,
                            },
                        });
                        Levels::Broken
                    }
                }
            }
        }
    }

    let mut violations = Vec::new();
    let level = go(phi, &mut Vec::new(), &mut violations);
    let width = phi.width();
    match level {
        Levels::Any => FlutedReport {
            is_fluted: violations.is_empty(),
            level: if violations.is_empty() { Some(0) } else { None },
            width,
            violations,
        },
        Levels::Exactly(k) => FlutedReport {
            is_fluted: violations.is_empty(),
            level: if violations.is_empty() { Some(k) } else { None },
            width,
            violations,
        },
        Levels::Broken => FlutedReport {
            is_fluted: false,
            level: None,
            width,
            violations,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `forall x1 (student(x1) -> ~ forall x2 (prof(x2) -> admires(x1,x2)))`
    pub fn sentence_one() -> Formula {
        Formula::forall(
            1,
            Formula::implies(
                Formula::atom("student", &[1]),
                Formula::not(Formula::forall(
                    2,
                    Formula::implies(
                        Formula::atom("prof", &[2]),
                        Formula::atom("admires", &[1, 2]),
                    ),
                )),
            ),
        )
    }

    /// `forall x1 (lecturer(x1) -> ~ exists x2 (prof(x2) & forall x3 (student(x3) -> intro(x1,x2,x3))))`
    pub fn sentence_two() -> Formula {
        Formula::forall(
            1,
            Formula::implies(
                Formula::atom("lecturer", &[1]),
                Formula::not(Formula::exists(
                    2,
                    Formula::and(
                        Formula::atom("prof", &[2]),
                        Formula::forall(
                            3,
                            Formula::implies(
                                Formula::atom("student", &[3]),
                                Formula::atom("intro", &[1, 2, 3]),
                            ),
                        ),
                    ),
                )),
            ),
        )
    }

    #[test]
    fn signature_read_off() {
        let f = Formula::atom("p", &[1, 2]);
        let sig = infer_signature(&f).unwrap();
        assert_eq!(sig.arity("p"), Some(2));
        assert_eq!(sig.len(), 1);
    }

    #[test]
    fn signature_of_sentence_two() {
        let sig = infer_signature(&sentence_two()).unwrap();
        assert_eq!(sig.arity("lecturer"), Some(1));
        assert_eq!(sig.arity("prof"), Some(1));
        assert_eq!(sig.arity("student"), Some(1));
        assert_eq!(sig.arity("intro"), Some(3));
        assert_eq!(sig.len(), 4);
    }

    #[test]
    fn signature_arity_conflict() {
        let f = Formula::and(Formula::atom("p", &[1]), Formula::atom("p", &[1, 2]));
        assert!(matches!(
            infer_signature(&f),
            Err(Error::ArityConflict { .. })
        ));
    }

    #[test]
    fn sentence_one_is_fluted_width_two() {
        let r = fluted_status(&sentence_one());
        assert!(r.is_fluted);
        assert_eq!(r.level, Some(0));
        assert_eq!(r.width, 2);
    }

    #[test]
    fn sentence_two_width_three() {
        let r = fluted_status(&sentence_two());
        assert!(r.is_fluted);
        assert_eq!(sentence_two().width(), 3);
    }

    #[test]
    fn descending_args_not_fluted() {
        let r = fluted_status(&Formula::atom("r", &[2, 1]));
        assert!(!r.is_fluted);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].kind, ViolationKind::NonSuffixArgs);
    }

    #[test]
    fn mixed_levels_not_fluted() {
        let f = Formula::and(Formula::atom("p", &[1]), Formula::atom("q", &[2]));
        let r = fluted_status(&f);
        assert!(!r.is_fluted);
        assert!(matches!(
            r.violations[0].kind,
            ViolationKind::MixedLevels(1, 2)
        ));
    }

    #[test]
    fn propositional_width_zero() {
        let f = Formula::and(Formula::prop("q"), Formula::not(Formula::prop("q")));
        assert_eq!(f.width(), 0);
        let r = fluted_status(&f);
        assert!(r.is_fluted);
        assert_eq!(r.level, Some(0));
    }

    #[test]
    fn quantifier_must_bind_top_variable() {
        // forall x2 p(x1) binds x2 over a level-1 body
        let f = Formula::forall(2, Formula::atom("p", &[1]));
        let r = fluted_status(&f);
        assert!(!r.is_fluted);
    }

    #[test]
    fn proposition_fits_any_level() {
        // q & r(x1,x2) is a legal level-2 combination
        let f = Formula::and(Formula::prop("q"), Formula::atom("r", &[1, 2]));
        let r = fluted_status(&f);
        assert!(r.is_fluted);
        assert_eq!(r.level, Some(2));
    }

    #[test]
    fn free_vars_are_suffix_of_quantified_subformulas() {
        let f = sentence_two();
        // every quantified subformula of a fluted formula has its free
        // variables forming a contiguous suffix ending at its level
        fn check(f: &Formula) {
            if matches!(f, Formula::Forall(..) | Formula::Exists(..)) {
                let r = fluted_status(f);
                if let Some(k) = r.level {
                    let fv = f.free_vars();
                    if let (Some(&lo), Some(&hi)) = (fv.first(), fv.last()) {
                        assert_eq!(hi, k);
                        assert_eq!(fv.len(), hi - lo + 1);
                    }
                }
            }
            for c in f.children() {
                check(c);
            }
        }
        check(&f);
    }
}
