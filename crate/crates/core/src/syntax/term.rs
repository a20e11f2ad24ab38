//! Hash-consed sorted terms.
//!
//! Every [`Term`] is interned in a process-wide store, so two structurally
//! equal terms share one node and compare equal by pointer. Ordering is
//! structural (symbol name, then arguments) and never depends on allocation
//! order, which keeps every downstream traversal deterministic.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use num_traits::One;

/// Exact rational numbers used throughout.
pub type Q = BigRational;

/// Shared immutable identifier.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

/// Name of the built-in numeric sort.
pub const RAT: &str = "rat";

/// A sort is identified by its name; `rat` is the numeric sort and every
/// other sort is an uninterpreted element sort.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort(Name);

impl Sort {
    pub fn rat() -> Sort {
        Sort(name(RAT))
    }

    pub fn element(n: &str) -> Sort {
        Sort(name(n))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_numeric(&self) -> bool {
        &*self.0 == RAT
    }
}

impl fmt::Debug for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Built-in arithmetic function symbols.
pub const ADD: &str = "+";
pub const SUB: &str = "-";
pub const MUL: &str = "*";

pub fn is_arith_symbol(s: &str) -> bool {
    s == ADD || s == SUB || s == MUL
}

#[derive(PartialEq, Eq, Hash)]
pub enum TermKind {
    Var(Name),
    Const(Name),
    Num(Q),
    App(Name, Vec<Term>),
}

#[derive(PartialEq, Eq, Hash)]
pub struct TermNode {
    pub kind: TermKind,
    pub sort: Sort,
}

/// Handle to an interned term node.
#[derive(Clone)]
pub struct Term(Arc<TermNode>);

fn store() -> &'static Mutex<HashSet<Arc<TermNode>>> {
    static STORE: OnceLock<Mutex<HashSet<Arc<TermNode>>>> = OnceLock::new();
    STORE.get_or_init(|| Mutex::new(HashSet::new()))
}

fn intern(node: TermNode) -> Term {
    let mut set = store().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(existing) = set.get(&node) {
        return Term(existing.clone());
    }
    let arc = Arc::new(node);
    set.insert(arc.clone());
    Term(arc)
}

impl Term {
    pub fn var(n: &str, sort: Sort) -> Term {
        intern(TermNode { kind: TermKind::Var(name(n)), sort })
    }

    pub fn constant(n: &str, sort: Sort) -> Term {
        intern(TermNode { kind: TermKind::Const(name(n)), sort })
    }

    pub fn num(v: Q) -> Term {
        intern(TermNode { kind: TermKind::Num(v), sort: Sort::rat() })
    }

    pub fn int(v: i64) -> Term {
        Term::num(q(v))
    }

    /// Application of a symbol to arguments; the caller supplies the result
    /// sort (sort-checking happens in the parser and signature layer).
    pub fn app(f: &str, args: Vec<Term>, sort: Sort) -> Term {
        intern(TermNode { kind: TermKind::App(name(f), args), sort })
    }

    pub fn add(args: Vec<Term>) -> Term {
        Term::app(ADD, args, Sort::rat())
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::app(SUB, vec![a, b], Sort::rat())
    }

    pub fn neg(a: Term) -> Term {
        Term::app(SUB, vec![a], Sort::rat())
    }

    pub fn scale(k: Q, a: Term) -> Term {
        Term::app(MUL, vec![Term::num(k), a], Sort::rat())
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn sort(&self) -> &Sort {
        &self.0.sort
    }

    pub fn is_numeric(&self) -> bool {
        self.0.sort.is_numeric()
    }

    pub fn is_var(&self) -> bool {
        matches!(self.0.kind, TermKind::Var(_))
    }

    pub fn is_const(&self) -> bool {
        matches!(self.0.kind, TermKind::Const(_))
    }

    pub fn as_num(&self) -> Option<&Q> {
        match &self.0.kind {
            TermKind::Num(v) => Some(v),
            _ => None,
        }
    }

    /// Head symbol of an application, or the name of a variable/constant.
    pub fn symbol(&self) -> Option<&str> {
        match &self.0.kind {
            TermKind::Var(n) | TermKind::Const(n) | TermKind::App(n, _) => Some(n),
            TermKind::Num(_) => None,
        }
    }

    pub fn args(&self) -> &[Term] {
        match &self.0.kind {
            TermKind::App(_, a) => a,
            _ => &[],
        }
    }

    /// An application of an uninterpreted (non-arithmetic) function.
    pub fn is_uninterpreted_app(&self) -> bool {
        matches!(&self.0.kind, TermKind::App(f, _) if !is_arith_symbol(f))
    }

    pub fn is_arith_app(&self) -> bool {
        matches!(&self.0.kind, TermKind::App(f, _) if is_arith_symbol(f))
    }

    pub fn is_ground(&self) -> bool {
        match &self.0.kind {
            TermKind::Var(_) => false,
            TermKind::Const(_) | TermKind::Num(_) => true,
            TermKind::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Nesting depth counting only uninterpreted applications.
    pub fn depth(&self) -> usize {
        match &self.0.kind {
            TermKind::App(f, args) => {
                let inner = args.iter().map(Term::depth).max().unwrap_or(0);
                if is_arith_symbol(f) {
                    inner
                } else {
                    inner + 1
                }
            }
            _ => 0,
        }
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Visits every subterm, parents before children.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for a in self.args() {
            a.visit(f);
        }
    }

    pub fn contains(&self, needle: &Term) -> bool {
        if self == needle {
            return true;
        }
        self.args().iter().any(|a| a.contains(needle))
    }

    /// Rebuilds the term, letting `f` replace subterms (outermost match wins).
    pub fn map(&self, f: &mut impl FnMut(&Term) -> Option<Term>) -> Term {
        if let Some(t) = f(self) {
            return t;
        }
        match &self.0.kind {
            TermKind::App(g, args) => {
                let new: Vec<Term> = args.iter().map(|a| a.map(f)).collect();
                if new.iter().zip(args).all(|(x, y)| x == y) {
                    self.clone()
                } else {
                    Term::app(g, new, self.sort().clone())
                }
            }
            _ => self.clone(),
        }
    }

    /// Replaces every occurrence of `from` by `to`.
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        self.map(&mut |t| (t == from).then(|| to.clone()))
    }

    fn kind_rank(&self) -> u8 {
        match self.0.kind {
            TermKind::Num(_) => 0,
            TermKind::Const(_) => 1,
            TermKind::App(..) => 2,
            TermKind::Var(_) => 3,
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (Arc::as_ptr(&self.0) as usize).hash(state);
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Term) -> Ordering {
        if self.ptr_eq(other) {
            return Ordering::Equal;
        }
        let num_first = |t: &Term| u8::from(t.as_num().is_none());
        num_first(self)
            .cmp(&num_first(other))
            .then_with(|| match (&self.0.kind, &other.0.kind) {
                (TermKind::Num(a), TermKind::Num(b)) => a.cmp(b),
                _ => Ordering::Equal,
            })
            .then_with(|| self.symbol().cmp(&other.symbol()))
            .then_with(|| self.args().cmp(other.args()))
            .then_with(|| self.kind_rank().cmp(&other.kind_rank()))
            .then_with(|| self.sort().cmp(other.sort()))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Term) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn fmt_rational(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            TermKind::Var(n) | TermKind::Const(n) => f.write_str(n),
            TermKind::Num(v) => f.write_str(&fmt_rational(v)),
            TermKind::App(g, args) => {
                write!(f, "({g}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
