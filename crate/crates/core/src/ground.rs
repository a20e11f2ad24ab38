//! Satisfiability of ground formulas over linear rational arithmetic with
//! uninterpreted functions and uninterpreted element sorts.
//!
//! A conjunction of literals is decided by congruence closure and
//! Fourier–Motzkin working in lockstep. Both theories are convex, so it is
//! enough to pass equalities between congruence classes into the arithmetic
//! part and to pull back every equality between numeric function arguments
//! that the arithmetic part entails. Boolean structure is handled lazily:
//! the solver takes the unit literals, builds a model, and only splits on a
//! disjunction that the model does not already satisfy.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linear::{self, Constraint, LinExpr, NonLinear, Rel};
use crate::syntax::{Atom, Formula, Literal, Name, Term, TermKind, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroundError {
    #[error(transparent)]
    NonLinear(#[from] NonLinear),
    #[error("formula is not ground: {0}")]
    NotGround(String),
}

/// Value of a ground term in a witness model.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Value {
    Num(Q),
    /// Element of an uninterpreted sort, identified by its class number.
    Elem(usize),
}

/// A finite model: values for the constants and function tables for the
/// applications that occurred in the input.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub terms: BTreeMap<Term, Value>,
    pub tables: BTreeMap<(Name, Vec<Value>), Value>,
}

impl Witness {
    pub fn eval_term(&self, t: &Term) -> Option<Value> {
        match t.kind() {
            TermKind::Num(v) => Some(Value::Num(v.clone())),
            TermKind::Var(_) => None,
            TermKind::Const(_) => self.terms.get(t).cloned(),
            TermKind::App(f, args) if crate::syntax::is_arith_symbol(f) => {
                let vals = args
                    .iter()
                    .map(|a| match self.eval_term(a)? {
                        Value::Num(v) => Some(v),
                        Value::Elem(_) => None,
                    })
                    .collect::<Option<Vec<Q>>>()?;
                let out = match &**f {
                    "+" => vals.into_iter().fold(Q::zero(), |a, b| a + b),
                    "-" if vals.len() == 1 => -vals[0].clone(),
                    "-" => {
                        let mut it = vals.into_iter();
                        let first = it.next()?;
                        it.fold(first, |a, b| a - b)
                    }
                    _ => vals.into_iter().fold(Q::one(), |a, b| a * b),
                };
                Some(Value::Num(out))
            }
            TermKind::App(f, args) => {
                let vals = args.iter().map(|a| self.eval_term(a)).collect::<Option<Vec<_>>>()?;
                self.tables.get(&(f.clone(), vals)).cloned().or_else(|| self.terms.get(t).cloned())
            }
        }
    }

    pub fn eval_atom(&self, a: &Atom) -> Option<bool> {
        let (l, r) = a.sides();
        let (l, r) = (self.eval_term(l)?, self.eval_term(r)?);
        match (a, l, r) {
            (Atom::Eq(..), l, r) => Some(l == r),
            (Atom::Le(..), Value::Num(x), Value::Num(y)) => Some(x <= y),
            (Atom::Lt(..), Value::Num(x), Value::Num(y)) => Some(x < y),
            _ => None,
        }
    }

    pub fn eval_literal(&self, l: &Literal) -> Option<bool> {
        self.eval_atom(&l.atom).map(|v| v == l.positive)
    }

    /// Three-valued evaluation; `None` when some term has no value.
    pub fn eval_formula(&self, f: &Formula) -> Option<bool> {
        match f {
            Formula::True => Some(true),
            Formula::False => Some(false),
            Formula::Atom(a) => self.eval_atom(a),
            Formula::Not(g) => self.eval_formula(g).map(|v| !v),
            Formula::And(gs) => {
                let mut all = Some(true);
                for g in gs {
                    match self.eval_formula(g) {
                        Some(false) => return Some(false),
                        None => all = None,
                        Some(true) => {}
                    }
                }
                all
            }
            Formula::Or(gs) => {
                let mut any = Some(false);
                for g in gs {
                    match self.eval_formula(g) {
                        Some(true) => return Some(true),
                        None => any = None,
                        Some(false) => {}
                    }
                }
                any
            }
            Formula::Implies(a, b) => match (self.eval_formula(a), self.eval_formula(b)) {
                (Some(false), _) | (_, Some(true)) => Some(true),
                (Some(true), Some(false)) => Some(false),
                _ => None,
            },
            Formula::Exists(..) | Formula::Forall(..) => None,
        }
    }

    pub fn num(&self, t: &Term) -> Option<Q> {
        match self.eval_term(t)? {
            Value::Num(v) => Some(v),
            Value::Elem(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Witness),
    Unsat,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatResult::Unsat)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            SatResult::Sat(w) => Some(w),
            SatResult::Unsat => None,
        }
    }
}

struct Node {
    term: Term,
    /// Argument node indices for uninterpreted applications.
    args: Option<(Name, Vec<usize>)>,
    lin: Option<LinExpr>,
}

/// Congruence closure over the terms of a literal conjunction.
struct Egraph {
    nodes: Vec<Node>,
    index: HashMap<Term, usize>,
    parent: Vec<usize>,
    arg_nodes: BTreeSet<usize>,
}

impl Egraph {
    fn new() -> Egraph {
        Egraph { nodes: Vec::new(), index: HashMap::new(), parent: Vec::new(), arg_nodes: BTreeSet::new() }
    }

    fn register(&mut self, t: &Term) -> Result<usize, NonLinear> {
        if let Some(&i) = self.index.get(t) {
            return Ok(i);
        }
        let args = if t.is_uninterpreted_app() {
            let mut ids = Vec::new();
            for a in t.args() {
                let id = self.register(a)?;
                if a.is_numeric() {
                    self.arg_nodes.insert(id);
                }
                ids.push(id);
            }
            Some((Name::from(t.symbol().unwrap_or_default()), ids))
        } else {
            if t.is_arith_app() {
                self.register_inner(t)?;
            }
            None
        };
        let lin = if t.is_numeric() { Some(LinExpr::from_term(t)?) } else { None };
        let id = self.nodes.len();
        self.nodes.push(Node { term: t.clone(), args, lin });
        self.parent.push(id);
        self.index.insert(t.clone(), id);
        Ok(id)
    }

    /// Registers the uninterpreted applications inside arithmetic.
    fn register_inner(&mut self, t: &Term) -> Result<(), NonLinear> {
        if t.is_uninterpreted_app() || t.is_const() {
            self.register(t)?;
        } else {
            for a in t.args() {
                self.register_inner(a)?;
            }
        }
        Ok(())
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn close(&mut self) {
        loop {
            let mut changed = false;
            let mut sigs: HashMap<(Name, Vec<usize>), usize> = HashMap::new();
            for i in 0..self.nodes.len() {
                let Some((f, args)) = self.nodes[i].args.clone() else { continue };
                let key = (f, args.iter().map(|&a| self.find(a)).collect::<Vec<_>>());
                match sigs.get(&key) {
                    Some(&j) => changed |= self.union(i, j),
                    None => {
                        sigs.insert(key, i);
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn class_equalities(&mut self) -> Vec<Constraint> {
        let mut reps: BTreeMap<usize, usize> = BTreeMap::new();
        let mut out = Vec::new();
        for i in 0..self.nodes.len() {
            if self.nodes[i].lin.is_none() {
                continue;
            }
            let r = self.find(i);
            match reps.get(&r) {
                Some(&j) => {
                    let a = self.nodes[i].lin.clone().unwrap_or_default();
                    let b = self.nodes[j].lin.clone().unwrap_or_default();
                    out.push(Constraint::new(a.sub(&b), Rel::Eq));
                }
                None => {
                    reps.insert(r, i);
                }
            }
        }
        out
    }
}

/// Outcome of deciding one literal conjunction, with the equalities the
/// arithmetic part handed to congruence closure.
#[derive(Clone, Debug)]
pub struct ConjunctionOutcome {
    pub result: SatResult,
    pub propagated: Vec<(Term, Term)>,
}

fn with_extra(p: &[Constraint], extra: Constraint) -> Vec<Constraint> {
    let mut v = p.to_vec();
    v.push(extra);
    v
}

fn lookup(model: &BTreeMap<Term, Q>) -> impl Fn(&Term) -> Option<Q> + '_ {
    move |t| Some(model.get(t).cloned().unwrap_or_else(Q::zero))
}

/// Decides a conjunction of ground literals.
pub fn check_conjunction(lits: &[Literal]) -> Result<ConjunctionOutcome, GroundError> {
    let mut eg = Egraph::new();
    let mut base: Vec<Constraint> = Vec::new();
    let mut elem_eqs: Vec<(usize, usize)> = Vec::new();
    let mut elem_diseqs: Vec<(usize, usize)> = Vec::new();
    let mut num_diseqs: Vec<LinExpr> = Vec::new();

    for l in lits {
        let (a, b) = l.atom.sides();
        if !a.is_ground() || !b.is_ground() {
            return Err(GroundError::NotGround(l.to_string()));
        }
        if !a.is_numeric() {
            let (i, j) = (eg.register(a)?, eg.register(b)?);
            if l.positive {
                elem_eqs.push((i, j));
            } else {
                elem_diseqs.push((i, j));
            }
            continue;
        }
        eg.register_inner(a)?;
        eg.register_inner(b)?;
        let c = Constraint::from_atom(&l.atom)?.expect("numeric atom");
        match (l.positive, c.rel) {
            (true, _) => base.push(c),
            (false, Rel::Eq) => num_diseqs.push(c.expr),
            (false, _) => base.push(c.negate_ineq()),
        }
    }
    for (i, j) in elem_eqs {
        eg.union(i, j);
    }

    let mut propagated = Vec::new();
    let unsat = |propagated| Ok(ConjunctionOutcome { result: SatResult::Unsat, propagated });
    loop {
        eg.close();
        for &(i, j) in &elem_diseqs {
            if eg.find(i) == eg.find(j) {
                return unsat(propagated);
            }
        }
        let mut p = base.clone();
        p.extend(eg.class_equalities());
        let Some(m) = linear::solve(&p) else { return unsat(propagated) };
        let mut samples = vec![m.clone()];
        let mut merged = false;
        let args: Vec<usize> = eg.arg_nodes.iter().copied().collect();
        'pairs: for (k, &x) in args.iter().enumerate() {
            for &y in &args[k + 1..] {
                if eg.find(x) == eg.find(y) {
                    continue;
                }
                let d = eg.nodes[x].lin.clone().unwrap_or_default().sub(&eg.nodes[y].lin.clone().unwrap_or_default());
                if d.eval(&lookup(&m)).is_some_and(|v| !v.is_zero()) {
                    continue;
                }
                if let Some(s) = linear::solve(&with_extra(&p, Constraint::new(d.clone(), Rel::Lt))) {
                    samples.push(s);
                } else if let Some(s) = linear::solve(&with_extra(&p, Constraint::new(d.scale(&-Q::one()), Rel::Lt))) {
                    samples.push(s);
                } else {
                    propagated.push((eg.nodes[x].term.clone(), eg.nodes[y].term.clone()));
                    eg.union(x, y);
                    merged = true;
                    break 'pairs;
                }
            }
        }
        if merged {
            continue;
        }
        for d in &num_diseqs {
            if d.eval(&lookup(&m)).is_some_and(|v| !v.is_zero()) {
                continue;
            }
            if let Some(s) = linear::solve(&with_extra(&p, Constraint::new(d.clone(), Rel::Lt))) {
                samples.push(s);
            } else if let Some(s) = linear::solve(&with_extra(&p, Constraint::new(d.scale(&-Q::one()), Rel::Lt))) {
                samples.push(s);
            } else {
                return unsat(propagated);
            }
        }

        let mut required: Vec<LinExpr> = num_diseqs.clone();
        for (k, &x) in args.iter().enumerate() {
            for &y in &args[k + 1..] {
                if eg.find(x) != eg.find(y) {
                    required.push(
                        eg.nodes[x].lin.clone().unwrap_or_default().sub(&eg.nodes[y].lin.clone().unwrap_or_default()),
                    );
                }
            }
        }
        let values = generic_combination(&samples, &required);
        let w = build_witness(&mut eg, &values);
        debug_assert!(lits.iter().all(|l| w.eval_literal(l) == Some(true)), "witness violates input");
        return Ok(ConjunctionOutcome { result: SatResult::Sat(w), propagated });
    }
}

/// A convex combination of the samples in which every expression of
/// `required` is non-zero. Each required expression is non-zero in some
/// sample, so only finitely many weightings `t^i` can fail.
fn generic_combination(samples: &[BTreeMap<Term, Q>], required: &[LinExpr]) -> BTreeMap<Term, Q> {
    let atoms: BTreeSet<Term> = samples.iter().flat_map(|s| s.keys().cloned()).collect();
    if samples.len() == 1 {
        return samples[0].clone();
    }
    let mut t = Q::one();
    loop {
        let mut weights = Vec::with_capacity(samples.len());
        let mut w = Q::one();
        for _ in samples {
            weights.push(w.clone());
            w *= &t;
        }
        let total: Q = weights.iter().fold(Q::zero(), |a, b| a + b);
        let mut out = BTreeMap::new();
        for a in &atoms {
            let mut v = Q::zero();
            for (s, wt) in samples.iter().zip(&weights) {
                v += s.get(a).cloned().unwrap_or_else(Q::zero) * wt;
            }
            out.insert(a.clone(), v / &total);
        }
        if required.iter().all(|d| d.eval(&lookup(&out)).is_some_and(|v| !v.is_zero())) {
            return out;
        }
        t += Q::one();
    }
}

fn build_witness(eg: &mut Egraph, values: &BTreeMap<Term, Q>) -> Witness {
    let mut w = Witness::default();
    let mut elem_ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut node_val = Vec::with_capacity(eg.nodes.len());
    for i in 0..eg.nodes.len() {
        let v = match &eg.nodes[i].lin {
            Some(l) => Value::Num(l.eval(&lookup(values)).unwrap_or_else(Q::zero)),
            None => {
                let r = eg.find(i);
                let next = elem_ids.len();
                Value::Elem(*elem_ids.entry(r).or_insert(next))
            }
        };
        node_val.push(v);
    }
    for (i, n) in eg.nodes.iter().enumerate() {
        if n.term.is_const() || n.term.is_uninterpreted_app() {
            w.terms.insert(n.term.clone(), node_val[i].clone());
        }
        if let Some((f, args)) = &n.args {
            let key = (f.clone(), args.iter().map(|&a| node_val[a].clone()).collect());
            w.tables.insert(key, node_val[i].clone());
        }
    }
    for (t, v) in values {
        w.terms.entry(t.clone()).or_insert_with(|| Value::Num(v.clone()));
    }
    w
}

/// Splits an NNF formula into unit literals and the remaining
/// non-literal conjuncts.
fn split_units(f: &Formula, units: &mut Vec<Literal>, rest: &mut Vec<Formula>) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::And(gs) => gs.iter().all(|g| split_units(g, units, rest)),
        other => {
            match other.as_literal() {
                Some(l) => units.push(l),
                None => rest.push(other.clone()),
            }
            true
        }
    }
}

fn search(units: Vec<Literal>, rest: Vec<Formula>, budget: &mut usize) -> Result<SatResult, GroundError> {
    *budget += 1;
    let out = check_conjunction(&units)?;
    let SatResult::Sat(w) = out.result else { return Ok(SatResult::Unsat) };
    let Some(pos) = rest.iter().position(|f| w.eval_formula(f) != Some(true)) else {
        return Ok(SatResult::Sat(w));
    };
    let mut others = rest.clone();
    let pick = others.remove(pos);
    let Formula::Or(branches) = pick else {
        unreachable!("NNF conjunct that is neither literal nor conjunction must be a disjunction")
    };
    for b in &branches {
        let mut u = units.clone();
        let mut r = others.clone();
        if !split_units(b, &mut u, &mut r) {
            continue;
        }
        if let SatResult::Sat(w) = search(u, r, budget)? {
            return Ok(SatResult::Sat(w));
        }
    }
    Ok(SatResult::Unsat)
}

/// Decides satisfiability of a ground quantifier-free formula.
pub fn check_sat(phi: &Formula) -> Result<SatResult, GroundError> {
    if !phi.is_quantifier_free() || !phi.free_vars().is_empty() {
        return Err(GroundError::NotGround(phi.to_string()));
    }
    let nnf = phi.nnf();
    let mut units = Vec::new();
    let mut rest = Vec::new();
    if !split_units(&nnf, &mut units, &mut rest) {
        return Ok(SatResult::Unsat);
    }
    let mut budget = 0;
    search(units, rest, &mut budget)
}

/// `phi ⊨ psi` over LRA with uninterpreted functions.
pub fn entails(phi: &Formula, psi: &Formula) -> Result<bool, GroundError> {
    Ok(check_sat(&Formula::and([phi.clone(), Formula::not(psi.clone())]))?.is_unsat())
}

pub fn equivalent(phi: &Formula, psi: &Formula) -> Result<bool, GroundError> {
    Ok(entails(phi, psi)? && entails(psi, phi)?)
}

/// Whether a literal is valid (true in every model).
pub fn is_valid(phi: &Formula) -> Result<bool, GroundError> {
    Ok(check_sat(&Formula::not(phi.clone()))?.is_unsat())
}

/// Sign of `e` under the witness, when all of its atoms have values.
pub fn sign_under(w: &Witness, e: &LinExpr) -> Option<std::cmp::Ordering> {
    let v = e.eval(&|t| w.num(t))?;
    Some(if v.is_positive() {
        std::cmp::Ordering::Greater
    } else if v.is_negative() {
        std::cmp::Ordering::Less
    } else {
        std::cmp::Ordering::Equal
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature, Sort};

    fn sig() -> Signature {
        let mut s = Signature::new();
        let r = Sort::rat();
        for c in ["a", "b", "c", "d", "e", "x"] {
            s.add_constant(c, r.clone(), false);
        }
        for f in ["f", "g"] {
            s.add_function(f, vec![r.clone()], r.clone());
        }
        s
    }

    fn sat(src: &str) -> SatResult {
        let f = parse_formula(src, &sig()).unwrap();
        let r = check_sat(&f).unwrap();
        if let SatResult::Sat(w) = &r {
            assert_eq!(w.eval_formula(&f), Some(true), "witness fails {src}");
        }
        r
    }

    #[test]
    fn congruence_conflict() {
        assert!(sat("(and (= a b) (not (= (f a) (f b))))").is_unsat());
    }

    #[test]
    fn chain_instance_is_unsat() {
        let src = "(and (not (= (f c) (* 3 c))) (not (= (f c) c)) (=> (<= c 3) (= (g c) (f c))) \
                   (=> (> c 3) (= (f c) c)) (= (* 3 c) (g c)))";
        assert!(sat(src).is_unsat());
    }

    #[test]
    fn bounds() {
        assert!(sat("(and (<= x 3) (> x 3))").is_unsat());
        let SatResult::Sat(w) = sat("(and (<= x 3) (>= x 3))") else { panic!() };
        assert_eq!(w.num(&Term::constant("x", Sort::rat())), Some(crate::syntax::q(3)));
    }

    #[test]
    fn arithmetic_equality_reaches_congruence() {
        assert!(sat("(and (<= a b) (<= b a) (< (f a) (f b)))").is_unsat());
        assert!(sat("(and (<= a b) (< (f a) (f b)))").is_sat());
    }

    #[test]
    fn entailment_examples() {
        let s = sig();
        let g = parse_formula("(and (= a (g b)) (<= e (g b)))", &s).unwrap();
        let ea = parse_formula("(<= e a)", &s).unwrap();
        assert!(entails(&g, &ea).unwrap());
        assert!(entails(&g, &Formula::True).unwrap());
        assert!(!entails(&ea, &parse_formula("(= a (g b))", &s).unwrap()).unwrap());
    }

    #[test]
    fn disequalities_hold_together() {
        let r = sat("(and (<= 0 a) (<= a 1) (not (= a 0)) (not (= a 1)) (not (= a 1/2)) (not (= (f a) (f 0))))");
        assert!(r.is_sat());
    }
}
