//! Atoms, literals, quantifier-free formulas, clauses and substitutions.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::term::{Name, Term};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Atom {
    Eq(Term, Term),
    Le(Term, Term),
    Lt(Term, Term),
}

impl Atom {
    pub fn sides(&self) -> (&Term, &Term) {
        match self {
            Atom::Eq(a, b) | Atom::Le(a, b) | Atom::Lt(a, b) => (a, b),
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Atom {
        match self {
            Atom::Eq(a, b) => Atom::Eq(f(a), f(b)),
            Atom::Le(a, b) => Atom::Le(f(a), f(b)),
            Atom::Lt(a, b) => Atom::Lt(f(a), f(b)),
        }
    }

    pub fn is_ground(&self) -> bool {
        let (a, b) = self.sides();
        a.is_ground() && b.is_ground()
    }
}

/// A possibly negated atom.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Literal {
        Literal { positive: true, atom }
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal { positive: false, atom }
    }

    pub fn eq(a: Term, b: Term) -> Literal {
        Literal::pos(Atom::Eq(a, b))
    }

    pub fn ne(a: Term, b: Term) -> Literal {
        Literal::neg(Atom::Eq(a, b))
    }

    pub fn le(a: Term, b: Term) -> Literal {
        Literal::pos(Atom::Le(a, b))
    }

    pub fn lt(a: Term, b: Term) -> Literal {
        Literal::pos(Atom::Lt(a, b))
    }

    pub fn negate(&self) -> Literal {
        Literal { positive: !self.positive, atom: self.atom.clone() }
    }

    pub fn to_formula(&self) -> Formula {
        let a = Formula::Atom(self.atom.clone());
        if self.positive {
            a
        } else {
            Formula::Not(Box::new(a))
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Literal {
        Literal { positive: self.positive, atom: self.atom.map_terms(f) }
    }
}

/// Quantifier-free Boolean combinations of atoms, plus quantifier blocks.
/// Quantifiers bind variable terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(Vec<Term>, Box<Formula>),
    Forall(Vec<Term>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::Eq(a, b))
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::Le(a, b))
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::Lt(a, b))
    }

    pub fn ne(a: Term, b: Term) -> Formula {
        Formula::not(Formula::eq(a, b))
    }

    /// Negation that folds constants and double negations.
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    /// Conjunction that flattens nested conjunctions and folds constants.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap_or(Formula::True),
            _ => Formula::And(out),
        }
    }

    /// Disjunction that flattens nested disjunctions and folds constants.
    pub fn or(parts: impl IntoIterator<Item = Formula>) -> Formula {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap_or(Formula::False),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn from_literals<'a>(lits: impl IntoIterator<Item = &'a Literal>) -> Formula {
        Formula::and(lits.into_iter().map(Literal::to_formula))
    }

    /// Top-level conjuncts (a non-conjunction is its own single conjunct).
    pub fn conjuncts(&self) -> Vec<Formula> {
        match self {
            Formula::True => Vec::new(),
            Formula::And(parts) => parts.iter().flat_map(Formula::conjuncts).collect(),
            other => vec![other.clone()],
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Calls `f` on every atom (under any quantifier).
    pub fn for_each_atom(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.for_each_atom(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.for_each_atom(f)),
            Formula::Implies(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
            Formula::Exists(_, g) | Formula::Forall(_, g) => g.for_each_atom(f),
        }
    }

    /// Calls `f` on every subterm of every atom.
    pub fn for_each_subterm(&self, f: &mut impl FnMut(&Term)) {
        self.for_each_atom(&mut |a| {
            let (l, r) = a.sides();
            l.visit(f);
            r.visit(f);
        });
    }

    /// Rewrites every top-level atom term with `f`.
    pub fn map_terms(&self, f: &mut impl FnMut(&Term) -> Term) -> Formula {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(a.map_terms(f)),
            Formula::Not(g) => Formula::Not(Box::new(g.map_terms(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_terms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_terms(f)).collect()),
            Formula::Implies(a, b) => Formula::Implies(Box::new(a.map_terms(f)), Box::new(b.map_terms(f))),
            Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(g.map_terms(f))),
            Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(g.map_terms(f))),
        }
    }

    /// Replaces every occurrence of `from` by `to` (constants or terms).
    pub fn replace(&self, from: &Term, to: &Term) -> Formula {
        self.map_terms(&mut |t| t.replace(from, to))
    }

    pub fn constants(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.for_each_subterm(&mut |t| {
            if t.is_const() {
                out.insert(t.clone());
            }
        });
        out
    }

    /// Uninterpreted function symbols occurring in the formula.
    pub fn function_symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.for_each_subterm(&mut |t| {
            if t.is_uninterpreted_app() {
                if let Some(s) = t.symbol() {
                    out.insert(Name::from(s));
                }
            }
        });
        out
    }

    /// Uninterpreted applications occurring in the formula.
    pub fn applications(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.for_each_subterm(&mut |t| {
            if t.is_uninterpreted_app() {
                out.insert(t.clone());
            }
        });
        out
    }

    pub fn free_vars(&self) -> BTreeSet<Term> {
        fn go(f: &Formula, bound: &mut Vec<Term>, out: &mut BTreeSet<Term>) {
            match f {
                Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
                    let n = bound.len();
                    bound.extend(vs.iter().cloned());
                    go(g, bound, out);
                    bound.truncate(n);
                }
                Formula::Not(g) => go(g, bound, out),
                Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| go(g, bound, out)),
                Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Atom(a) => {
                    let (l, r) = a.sides();
                    for t in [l, r] {
                        t.visit(&mut |s| {
                            if s.is_var() && !bound.contains(s) {
                                out.insert(s.clone());
                            }
                        });
                    }
                }
                Formula::True | Formula::False => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// No variables at all, free or bound.
    pub fn is_ground(&self) -> bool {
        let mut ground = true;
        self.for_each_subterm(&mut |t| ground &= !t.is_var());
        ground && self.is_quantifier_free()
    }

    pub fn max_depth(&self) -> usize {
        let mut d = 0;
        self.for_each_atom(&mut |a| {
            let (l, r) = a.sides();
            d = d.max(l.depth()).max(r.depth());
        });
        d
    }

    /// Negation normal form of a quantifier-free formula: implications are
    /// expanded and negations sit on atoms only.
    pub fn nnf(&self) -> Formula {
        self.nnf_pol(true)
    }

    fn nnf_pol(&self, pos: bool) -> Formula {
        match self {
            Formula::True => {
                if pos {
                    Formula::True
                } else {
                    Formula::False
                }
            }
            Formula::False => {
                if pos {
                    Formula::False
                } else {
                    Formula::True
                }
            }
            Formula::Atom(a) => {
                let f = Formula::Atom(a.clone());
                if pos {
                    f
                } else {
                    Formula::Not(Box::new(f))
                }
            }
            Formula::Not(g) => g.nnf_pol(!pos),
            Formula::And(gs) => {
                let parts = gs.iter().map(|g| g.nnf_pol(pos));
                if pos {
                    Formula::and(parts)
                } else {
                    Formula::or(parts)
                }
            }
            Formula::Or(gs) => {
                let parts = gs.iter().map(|g| g.nnf_pol(pos));
                if pos {
                    Formula::or(parts)
                } else {
                    Formula::and(parts)
                }
            }
            Formula::Implies(a, b) => {
                if pos {
                    Formula::or([a.nnf_pol(false), b.nnf_pol(true)])
                } else {
                    Formula::and([a.nnf_pol(true), b.nnf_pol(false)])
                }
            }
            Formula::Exists(vs, g) => {
                if pos {
                    Formula::Exists(vs.clone(), Box::new(g.nnf_pol(true)))
                } else {
                    Formula::Forall(vs.clone(), Box::new(g.nnf_pol(false)))
                }
            }
            Formula::Forall(vs, g) => {
                if pos {
                    Formula::Forall(vs.clone(), Box::new(g.nnf_pol(true)))
                } else {
                    Formula::Exists(vs.clone(), Box::new(g.nnf_pol(false)))
                }
            }
        }
    }

    /// Literal view of an NNF leaf.
    pub fn as_literal(&self) -> Option<Literal> {
        match self {
            Formula::Atom(a) => Some(Literal::pos(a.clone())),
            Formula::Not(g) => match &**g {
                Formula::Atom(a) => Some(Literal::neg(a.clone())),
                _ => None,
            },
            _ => None,
        }
    }

    /// Disjunctive normal form of a quantifier-free formula as a list of
    /// literal conjunctions. Returns `None` if the formula has quantifiers.
    pub fn dnf(&self) -> Option<Vec<Vec<Literal>>> {
        fn go(f: &Formula) -> Option<Vec<Vec<Literal>>> {
            match f {
                Formula::True => Some(vec![Vec::new()]),
                Formula::False => Some(Vec::new()),
                Formula::And(gs) => {
                    let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
                    for g in gs {
                        let d = go(g)?;
                        let mut next = Vec::with_capacity(acc.len() * d.len());
                        for a in &acc {
                            for b in &d {
                                let mut c = a.clone();
                                c.extend(b.iter().cloned());
                                next.push(c);
                            }
                        }
                        acc = next;
                    }
                    Some(acc)
                }
                Formula::Or(gs) => {
                    let mut acc = Vec::new();
                    for g in gs {
                        acc.extend(go(g)?);
                    }
                    Some(acc)
                }
                other => other.as_literal().map(|l| vec![vec![l]]),
            }
        }
        if !self.is_quantifier_free() {
            return None;
        }
        go(&self.nnf())
    }

    /// The formula as a literal conjunction, if it is one.
    pub fn as_conjunction(&self) -> Option<Vec<Literal>> {
        let mut out = Vec::new();
        for c in self.conjuncts() {
            match c {
                Formula::False => return None,
                other => out.push(other.nnf().as_literal()?),
            }
        }
        Some(out)
    }
}

/// A universally closed clause: `vars` are the quantified variables of
/// `body`, which is quantifier-free.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Clause {
    pub vars: Vec<Term>,
    pub body: Formula,
}

impl Clause {
    pub fn new(vars: Vec<Term>, body: Formula) -> Clause {
        Clause { vars, body }
    }

    pub fn ground(body: Formula) -> Clause {
        Clause { vars: Vec::new(), body }
    }

    pub fn to_formula(&self) -> Formula {
        if self.vars.is_empty() {
            self.body.clone()
        } else {
            Formula::Forall(self.vars.clone(), Box::new(self.body.clone()))
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("sort mismatch: variable {var} of sort {var_sort} mapped to {term} of sort {term_sort}")]
    SortMismatch { var: String, var_sort: String, term: String, term_sort: String },
    #[error("substitution leaves variable {0} unbound")]
    Unbound(String),
}

/// Sort-preserving map from variables to terms.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Subst(BTreeMap<Term, Term>);

impl Subst {
    pub fn new() -> Subst {
        Subst(BTreeMap::new())
    }

    pub fn insert(&mut self, var: Term, image: Term) -> Result<(), SubstError> {
        if var.sort() != image.sort() {
            return Err(SubstError::SortMismatch {
                var: var.to_string(),
                var_sort: var.sort().to_string(),
                term: image.to_string(),
                term_sort: image.sort().to_string(),
            });
        }
        self.0.insert(var, image);
        Ok(())
    }

    pub fn get(&self, var: &Term) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn domain(&self) -> impl Iterator<Item = &Term> {
        self.0.keys()
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        t.map(&mut |s| if s.is_var() { self.0.get(s).cloned() } else { None })
    }

    fn apply_shadowed(&self, f: &Formula, bound: &[Term]) -> Formula {
        match f {
            Formula::Exists(vs, g) | Formula::Forall(vs, g) => {
                let mut inner = bound.to_vec();
                inner.extend(vs.iter().cloned());
                let g2 = Box::new(self.apply_shadowed(g, &inner));
                if matches!(f, Formula::Exists(..)) {
                    Formula::Exists(vs.clone(), g2)
                } else {
                    Formula::Forall(vs.clone(), g2)
                }
            }
            Formula::Not(g) => Formula::Not(Box::new(self.apply_shadowed(g, bound))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| self.apply_shadowed(g, bound)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| self.apply_shadowed(g, bound)).collect()),
            Formula::Implies(a, b) => {
                Formula::Implies(Box::new(self.apply_shadowed(a, bound)), Box::new(self.apply_shadowed(b, bound)))
            }
            Formula::Atom(a) => Formula::Atom(a.map_terms(&mut |t| {
                t.map(&mut |s| {
                    if s.is_var() && !bound.contains(s) {
                        self.0.get(s).cloned()
                    } else {
                        None
                    }
                })
            })),
            Formula::True | Formula::False => f.clone(),
        }
    }

    /// Applies the substitution to free occurrences of its variables.
    pub fn apply(&self, f: &Formula) -> Formula {
        self.apply_shadowed(f, &[])
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose_after(&self, first: &Subst) -> Subst {
        let mut out = BTreeMap::new();
        for (v, t) in &first.0 {
            out.insert(v.clone(), self.apply_term(t));
        }
        for (v, t) in &self.0 {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        Subst(out)
    }
}

/// Instantiates `clause` with `sigma`. When `ground` is requested every
/// clause variable must be in the domain of `sigma`.
pub fn substitute(clause: &Clause, sigma: &Subst, ground: bool) -> Result<Formula, SubstError> {
    if ground {
        let free = clause.body.free_vars();
        for v in clause.vars.iter().chain(free.iter()) {
            if sigma.get(v).is_none() {
                return Err(SubstError::Unbound(v.to_string()));
            }
        }
    }
    let body = sigma.apply(&clause.body);
    let remaining: Vec<Term> = clause.vars.iter().filter(|v| sigma.get(v).is_none()).cloned().collect();
    Ok(if remaining.is_empty() { body } else { Formula::Forall(remaining, Box::new(body)) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::term::Sort;

    fn c(n: &str) -> Term {
        Term::constant(n, Sort::rat())
    }

    #[test]
    fn substitute_instantiates_clause() {
        let x = Term::var("x", Sort::rat());
        let g = |t: Term| Term::app("g", vec![t], Sort::rat());
        let f = |t: Term| Term::app("f", vec![t], Sort::rat());
        let clause = Clause::new(
            vec![x.clone()],
            Formula::implies(Formula::le(x.clone(), Term::int(3)), Formula::eq(g(x.clone()), f(x.clone()))),
        );
        let mut s = Subst::new();
        s.insert(x, c("c")).unwrap();
        let out = substitute(&clause, &s, true).unwrap();
        let want = Formula::implies(Formula::le(c("c"), Term::int(3)), Formula::eq(g(c("c")), f(c("c"))));
        assert_eq!(out, want);
    }

    #[test]
    fn identity_substitution_keeps_formula() {
        let x = Term::var("x", Sort::rat());
        let clause = Clause::new(vec![x.clone()], Formula::le(x.clone(), c("a")));
        let mut s = Subst::new();
        s.insert(x.clone(), x.clone()).unwrap();
        assert_eq!(substitute(&clause, &s, false).unwrap(), clause.body);
    }

    #[test]
    fn ground_request_with_missing_variable_fails() {
        let x = Term::var("x", Sort::rat());
        let y = Term::var("y", Sort::rat());
        let clause = Clause::new(vec![x.clone(), y.clone()], Formula::le(x.clone(), y));
        let mut s = Subst::new();
        s.insert(x, c("a")).unwrap();
        assert!(matches!(substitute(&clause, &s, true), Err(SubstError::Unbound(_))));
    }

    #[test]
    fn sort_mismatch_is_rejected() {
        let x = Term::var("x", Sort::rat());
        let p = Term::constant("p", Sort::element("elem"));
        assert!(Subst::new().insert(x, p).is_err());
    }

    #[test]
    fn dnf_of_implication() {
        let f = Formula::implies(Formula::le(c("a"), c("b")), Formula::eq(c("c"), c("d")));
        let d = f.dnf().unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], vec![Literal::neg(Atom::Le(c("a"), c("b")))]);
    }
}
