//! Covers (uniform interpolants) of ground formulas over linear rational
//! arithmetic with uninterpreted functions, and the bounded semantic oracle
//! used to check them.
//!
//! The cover of `∃ē φ` is assembled from three sound pieces: equalities
//! `e ≈ t` that let an eliminated constant be replaced by a kept term, a
//! projection of the remaining constants after naming the terms they occur
//! in, and the literal consequences of `φ` over a finite universe of kept
//! terms. Single-equality case splits add the guarded consequences that no
//! literal can express.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ground::{self, GroundError, SatResult, Value, Witness};
use crate::qe::{self, GroundOracle, QeError};
use crate::syntax::{is_arith_symbol, Atom, Formula, Literal, Name, NameSupply, Sort, Term, TermKind, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("cover input is not a conjunction of literals")]
    NotConjunctive,
    #[error("term universe of {size} terms exceeds the limit of {limit}")]
    Resource { size: usize, limit: usize },
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Qe(#[from] QeError),
    #[error("internal: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverTask {
    pub phi: Formula,
    pub keep: BTreeSet<Term>,
    pub eliminate: BTreeSet<Term>,
}

impl CoverTask {
    /// Keeps `keep` and eliminates every other constant of `phi`.
    pub fn new(phi: Formula, keep: BTreeSet<Term>) -> CoverTask {
        let eliminate = phi.constants().into_iter().filter(|c| !keep.contains(c)).collect();
        CoverTask { phi, keep, eliminate }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverOptions {
    /// Upper bound on the size of the term universe.
    pub max_universe: usize,
    /// Add consequences that hold under one extra equality between kept
    /// constants.
    pub guards: bool,
    /// Overrides the default depth bound.
    pub depth: Option<usize>,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions { max_universe: 400, guards: true, depth: None }
    }
}

/// Kept terms up to a depth and the comparisons between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiteralBasis {
    pub depth: usize,
    pub universe: Vec<Term>,
    pub literals: Vec<Literal>,
}

/// `D = (max term depth of φ) + |eliminated constants of φ|`.
pub fn depth_bound(phi: &Formula, eliminate: &BTreeSet<Term>) -> usize {
    let consts = phi.constants();
    phi.max_depth() + eliminate.iter().filter(|c| consts.contains(*c)).count()
}

fn function_decls(phi: &Formula) -> BTreeMap<Name, (Vec<Sort>, Sort)> {
    let mut out = BTreeMap::new();
    phi.for_each_subterm(&mut |t| {
        if t.is_uninterpreted_app() {
            let sorts = t.args().iter().map(|a| a.sort().clone()).collect();
            out.insert(Name::from(t.symbol().unwrap_or_default()), (sorts, t.sort().clone()));
        }
    });
    out
}

fn numerals(phi: &Formula) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    phi.for_each_subterm(&mut |t| {
        if t.as_num().is_some() {
            out.insert(t.clone());
        }
    });
    out
}

/// Kept constants and numerals of `phi`, closed under the function symbols
/// of `phi` up to `depth`.
pub fn universe(phi: &Formula, keep: &BTreeSet<Term>, depth: usize, limit: usize) -> Result<Vec<Term>, CoverError> {
    let consts = phi.constants();
    let mut all: BTreeSet<Term> = keep.iter().filter(|c| consts.contains(*c)).cloned().collect();
    all.extend(numerals(phi));
    let decls = function_decls(phi);
    let mut frontier: BTreeSet<Term> = all.clone();
    for _ in 0..depth {
        let mut next = BTreeSet::new();
        let pool: Vec<Term> = all.iter().cloned().collect();
        for (f, (sorts, ret)) in &decls {
            let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
            for s in sorts {
                let opts: Vec<&Term> = pool.iter().filter(|t| t.sort() == s).collect();
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        opts.iter().map(move |o| {
                            let mut t = t.clone();
                            t.push((*o).clone());
                            t
                        })
                    })
                    .collect();
                if tuples.len() > limit * 4 {
                    return Err(CoverError::Resource { size: tuples.len(), limit });
                }
            }
            for args in tuples {
                if args.iter().any(|a| frontier.contains(a)) {
                    let t = Term::app(f, args, ret.clone());
                    if !all.contains(&t) {
                        next.insert(t);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        all.extend(next.iter().cloned());
        frontier = next;
        if all.len() > limit {
            return Err(CoverError::Resource { size: all.len(), limit });
        }
    }
    Ok(all.into_iter().collect())
}

pub fn basis(phi: &Formula, keep: &BTreeSet<Term>, depth: usize, limit: usize) -> Result<LiteralBasis, CoverError> {
    let universe = universe(phi, keep, depth, limit)?;
    let literals = pair_literals(&universe);
    Ok(LiteralBasis { depth, universe, literals })
}

/// A witness extended to arbitrary terms: applications outside the
/// witness tables get fresh values, so the extension is still a model.
struct Extension {
    w: Witness,
    variant: usize,
    /// When set, every fresh application of a matching sort gets this value.
    fill: Option<Value>,
    fresh: BTreeMap<(Name, Vec<Value>), Value>,
    values: BTreeMap<Term, Option<Value>>,
}

impl Extension {
    fn new(w: Witness, variant: usize) -> Self {
        Extension { w, variant, fill: None, fresh: BTreeMap::new(), values: BTreeMap::new() }
    }

    fn filled(w: Witness, fill: Value) -> Self {
        Extension { fill: Some(fill), ..Extension::new(w, 0) }
    }

    fn fresh_value(&self, sort: &Sort) -> Value {
        match (&self.fill, sort.is_numeric()) {
            (Some(v @ Value::Num(_)), true) | (Some(v @ Value::Elem(_)), false) => return v.clone(),
            _ => {}
        }
        let k = self.fresh.len() as i64 + 1;
        if !sort.is_numeric() {
            return Value::Elem(1_000_000 + k as usize);
        }
        let v = match self.variant {
            0 => Q::from_integer((1_000_000 + 1_000 * k).into()),
            1 => Q::from_integer((-1_000_000 - 1_000 * k).into()),
            _ => Q::new(((if k % 2 == 0 { 1 } else { -1 }) * (7_000_003 + k)).into(), 7.into()),
        };
        Value::Num(v)
    }

    fn eval(&mut self, t: &Term) -> Option<Value> {
        if let Some(v) = self.values.get(t) {
            return v.clone();
        }
        let v = match t.kind() {
            TermKind::Num(q) => Some(Value::Num(q.clone())),
            TermKind::Var(_) => None,
            TermKind::Const(_) => self.w.terms.get(t).cloned(),
            TermKind::App(f, args) if is_arith_symbol(f) => {
                let mut vals = Vec::new();
                for a in args {
                    match self.eval(a)? {
                        Value::Num(q) => vals.push(q),
                        Value::Elem(_) => return None,
                    }
                }
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
                let mut vals = Vec::new();
                for a in args {
                    vals.push(self.eval(a)?);
                }
                let key = (f.clone(), vals);
                match self.w.tables.get(&key).or_else(|| self.fresh.get(&key)) {
                    Some(v) => Some(v.clone()),
                    None => {
                        let v = self.fresh_value(t.sort());
                        self.fresh.insert(key, v.clone());
                        Some(v)
                    }
                }
            }
        };
        self.values.insert(t.clone(), v.clone());
        v
    }

    fn literal(&mut self, l: &Literal) -> Option<bool> {
        let (a, b) = l.atom.sides();
        let (x, y) = (self.eval(a)?, self.eval(b)?);
        let v = match (&l.atom, x, y) {
            (Atom::Eq(..), x, y) => x == y,
            (Atom::Le(..), Value::Num(x), Value::Num(y)) => x <= y,
            (Atom::Lt(..), Value::Num(x), Value::Num(y)) => x < y,
            _ => return None,
        };
        Some(v == l.positive)
    }
}

fn is_reflexive(l: &Literal) -> bool {
    let (a, b) = l.atom.sides();
    l.positive && a == b && !matches!(l.atom, Atom::Lt(..))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rel {
    Eq,
    Ne,
    Le,
    Lt,
}

impl Rel {
    fn literal(self, s: &Term, t: &Term) -> Literal {
        let (s, t) = (s.clone(), t.clone());
        match self {
            Rel::Eq => Literal::eq(s, t),
            Rel::Ne => Literal::ne(s, t),
            Rel::Le => Literal::le(s, t),
            Rel::Lt => Literal::lt(s, t),
        }
    }

    /// `Some(false)` when the values refute the relation.
    fn holds(self, x: &Option<Value>, y: &Option<Value>) -> Option<bool> {
        match (self, x.as_ref()?, y.as_ref()?) {
            (Rel::Eq, x, y) => Some(x == y),
            (Rel::Ne, x, y) => Some(x != y),
            (Rel::Le, Value::Num(x), Value::Num(y)) => Some(x <= y),
            (Rel::Lt, Value::Num(x), Value::Num(y)) => Some(x < y),
            _ => None,
        }
    }
}

/// Models of `phi` evaluated on a fixed universe, used to refute candidate
/// consequences before asking the solver; every failed entailment check
/// contributes its countermodel.
struct ModelPool<'u> {
    universe: &'u [Term],
    base: Witness,
    rows: Vec<Vec<Option<Value>>>,
    /// Values of the universe terms fixed by the first model's tables.
    known: Vec<Option<Value>>,
    /// Rows of the first model with every fresh application sent to one
    /// value; they refute disequalities involving unconstrained terms.
    filled: BTreeMap<Value, Vec<Option<Value>>>,
}

impl<'u> ModelPool<'u> {
    const CAP: usize = 48;

    fn new(w: Witness, universe: &'u [Term]) -> Self {
        let known = universe.iter().map(|t| w.eval_term(t)).collect();
        let rows = (0..3).map(|v| Self::row(Extension::new(w.clone(), v), universe)).collect();
        ModelPool { universe, base: w, rows, known, filled: BTreeMap::new() }
    }

    fn row(mut ext: Extension, universe: &[Term]) -> Vec<Option<Value>> {
        universe.iter().map(|t| ext.eval(t)).collect()
    }

    fn refutes(&mut self, rel: Rel, i: usize, j: usize) -> bool {
        if self.rows.iter().any(|r| rel.holds(&r[i], &r[j]) == Some(false)) {
            return true;
        }
        if rel != Rel::Ne {
            return false;
        }
        let mut fills: Vec<Value> = [&self.known[i], &self.known[j]].into_iter().flatten().cloned().collect();
        if fills.is_empty() {
            // Both sides unconstrained: any value outside the tables works.
            fills.push(if self.universe[i].is_numeric() {
                Value::Num(Q::from_integer(999_999_937.into()))
            } else {
                Value::Elem(usize::MAX / 2)
            });
        }
        for v in fills {
            if !self.filled.contains_key(&v) {
                let row = Self::row(Extension::filled(self.base.clone(), v.clone()), self.universe);
                self.filled.insert(v.clone(), row);
            }
            let r = &self.filled[&v];
            if rel.holds(&r[i], &r[j]) == Some(false) {
                return true;
            }
        }
        false
    }

    /// Whether `phi` entails the relation between universe terms `i`, `j`.
    fn entails(&mut self, phi: &Formula, rel: Rel, i: usize, j: usize) -> Result<bool, CoverError> {
        if self.refutes(rel, i, j) {
            return Ok(false);
        }
        let l = rel.literal(&self.universe[i], &self.universe[j]);
        match ground::check_sat(&Formula::and([phi.clone(), l.negate().to_formula()]))? {
            SatResult::Unsat => Ok(true),
            SatResult::Sat(w) => {
                if self.rows.len() < Self::CAP {
                    self.rows.push(Self::row(Extension::new(w, 0), self.universe));
                }
                Ok(false)
            }
        }
    }
}

/// All literals between pairs of `universe` terms.
fn pair_literals(universe: &[Term]) -> Vec<Literal> {
    let mut literals = Vec::new();
    for (i, s) in universe.iter().enumerate() {
        literals.push(Literal::eq(s.clone(), s.clone()));
        if s.is_numeric() {
            literals.push(Literal::le(s.clone(), s.clone()));
        }
        for t in &universe[i + 1..] {
            if s.sort() != t.sort() {
                continue;
            }
            literals.push(Literal::eq(s.clone(), t.clone()));
            literals.push(Literal::ne(s.clone(), t.clone()));
            if s.is_numeric() {
                literals.push(Literal::le(s.clone(), t.clone()));
                literals.push(Literal::le(t.clone(), s.clone()));
                literals.push(Literal::lt(s.clone(), t.clone()));
                literals.push(Literal::lt(t.clone(), s.clone()));
            }
        }
    }
    literals
}

/// Union-find over universe indices closed under congruence of the
/// applications whose arguments are in the universe.
struct Congruence {
    parent: Vec<usize>,
    apps: Vec<Option<(Name, Vec<usize>)>>,
}

impl Congruence {
    fn new(universe: &[Term]) -> Self {
        let index: BTreeMap<&Term, usize> = universe.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let apps = universe
            .iter()
            .map(|t| {
                if !t.is_uninterpreted_app() {
                    return None;
                }
                let args = t.args().iter().map(|a| index.get(a).copied()).collect::<Option<Vec<_>>>()?;
                Some((Name::from(t.symbol()?), args))
            })
            .collect();
        Congruence { parent: (0..universe.len()).collect(), apps }
    }

    fn find(&mut self, i: usize) -> usize {
        let p = self.parent[i];
        if p == i {
            return i;
        }
        let r = self.find(p);
        self.parent[i] = r;
        r
    }

    /// Merges two classes, keeping the smaller index as representative,
    /// then propagates congruence.
    fn merge(&mut self, i: usize, j: usize) {
        let (a, b) = (self.find(i), self.find(j));
        if a == b {
            return;
        }
        self.parent[a.max(b)] = a.min(b);
        loop {
            let mut seen: BTreeMap<(Name, Vec<usize>), usize> = BTreeMap::new();
            let mut pending = None;
            for k in 0..self.apps.len() {
                let Some((f, args)) = self.apps[k].clone() else { continue };
                let key = (f, args.iter().map(|&x| self.find(x)).collect());
                match seen.get(&key) {
                    Some(&m) if self.find(m) != self.find(k) => {
                        pending = Some((m, k));
                        break;
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(key, k);
                    }
                }
            }
            match pending {
                Some((m, k)) => {
                    let (a, b) = (self.find(m), self.find(k));
                    self.parent[a.max(b)] = a.min(b);
                }
                None => return,
            }
        }
    }
}

/// A model of `phi` in which its constants and applications take pairwise
/// distinct values wherever `phi` allows it. For a conjunction this exists
/// by convexity; extensions of it leave deeper terms unconstrained.
fn generic_witness(phi: &Formula, mut w: Witness) -> Result<Witness, CoverError> {
    let mut terms = BTreeSet::new();
    phi.for_each_subterm(&mut |t| {
        if t.is_const() || t.is_uninterpreted_app() {
            terms.insert(t.clone());
        }
    });
    let terms: Vec<Term> = terms.into_iter().collect();
    let mut forced: BTreeSet<(usize, usize)> = BTreeSet::new();
    for _ in 0..4 {
        let mut clashes = Vec::new();
        for i in 0..terms.len() {
            for j in i + 1..terms.len() {
                if terms[i].sort() == terms[j].sort()
                    && !forced.contains(&(i, j))
                    && w.eval_term(&terms[i]).is_some()
                    && w.eval_term(&terms[i]) == w.eval_term(&terms[j])
                {
                    clashes.push((i, j));
                }
            }
        }
        if clashes.is_empty() {
            break;
        }
        let apart = clashes.iter().map(|&(i, j)| Formula::ne(terms[i].clone(), terms[j].clone()));
        match ground::check_sat(&Formula::and(std::iter::once(phi.clone()).chain(apart)))? {
            SatResult::Sat(w2) => w = w2,
            SatResult::Unsat => {
                let before = forced.len();
                for (i, j) in clashes {
                    if ground::entails(phi, &Formula::eq(terms[i].clone(), terms[j].clone()))? {
                        forced.insert((i, j));
                    }
                }
                if forced.len() == before {
                    break;
                }
            }
        }
    }
    Ok(w)
}

/// A set of literals over `universe` equivalent to all of the pair
/// literals entailed by `phi`: the entailed equalities that merge classes,
/// and order and disequality literals between class representatives.
fn entailed_in_universe(phi: &Formula, universe: &[Term]) -> Result<Vec<Literal>, CoverError> {
    let w = match ground::check_sat(phi)? {
        SatResult::Unsat => return Ok(pair_literals(universe)),
        SatResult::Sat(w) => generic_witness(phi, w)?,
    };
    let mut pool = ModelPool::new(w, universe);
    let mut cc = Congruence::new(universe);
    let mut out = Vec::new();
    let lit = |rel: Rel, i: usize, j: usize| rel.literal(&universe[i], &universe[j]);
    for i in 0..universe.len() {
        for j in i + 1..universe.len() {
            if universe[i].sort() != universe[j].sort() || cc.find(i) == cc.find(j) {
                continue;
            }
            if pool.entails(phi, Rel::Eq, i, j)? {
                out.push(lit(Rel::Eq, i, j));
                cc.merge(i, j);
            }
        }
    }
    let reps: Vec<usize> = (0..universe.len()).filter(|&i| cc.find(i) == i).collect();
    for (k, &i) in reps.iter().enumerate() {
        for &j in &reps[k + 1..] {
            if universe[i].sort() != universe[j].sort() {
                continue;
            }
            let mut ordered = false;
            if universe[i].is_numeric() {
                for (x, y) in [(i, j), (j, i)] {
                    if pool.entails(phi, Rel::Lt, x, y)? {
                        out.push(lit(Rel::Lt, x, y));
                        ordered = true;
                    } else if pool.entails(phi, Rel::Le, x, y)? {
                        out.push(lit(Rel::Le, x, y));
                        ordered = true;
                    }
                }
            }
            // With an order entailed, the disequality is either implied or
            // equivalent to a strict order that is not.
            if !ordered && pool.entails(phi, Rel::Ne, i, j)? {
                out.push(lit(Rel::Ne, i, j));
            }
        }
    }
    Ok(out)
}

/// Basis literals at `depth` entailed by `phi`, up to equivalence: every
/// entailed basis literal follows from the returned ones by equality
/// reasoning, and each returned literal is itself entailed.
pub fn bounded_consequences(phi: &Formula, keep: &BTreeSet<Term>, depth: usize) -> Result<Vec<Literal>, CoverError> {
    bounded_consequences_with(phi, keep, depth, CoverOptions::default().max_universe)
}

pub fn bounded_consequences_with(
    phi: &Formula,
    keep: &BTreeSet<Term>,
    depth: usize,
    limit: usize,
) -> Result<Vec<Literal>, CoverError> {
    entailed_in_universe(phi, &universe(phi, keep, depth, limit)?)
}

/// Replaces eliminated constants that `phi` forces equal to a kept term.
fn substitute_definitions(
    mut phi: Formula,
    elim: &mut BTreeSet<Term>,
    keep: &BTreeSet<Term>,
    depth: usize,
    limit: usize,
) -> Result<Formula, CoverError> {
    'outer: loop {
        let w = match ground::check_sat(&phi)? {
            SatResult::Unsat => return Ok(Formula::False),
            SatResult::Sat(w) => w,
        };
        let present = phi.constants();
        let candidates = universe(&phi, keep, depth, limit)?;
        let mut ext = Extension::new(w, 0);
        for e in elim.iter().filter(|e| present.contains(*e)).cloned().collect::<Vec<_>>() {
            let ev = ext.eval(&e);
            let mut cands: Vec<&Term> =
                candidates.iter().filter(|t| t.sort() == e.sort() && (ev.is_none() || ext.eval(t) == ev)).collect();
            cands.sort_by_key(|t| (t.depth(), (*t).clone()));
            for t in cands {
                if ground::entails(&phi, &Formula::eq(e.clone(), t.clone()))? {
                    phi = phi.replace(&e, t);
                    elim.remove(&e);
                    continue 'outer;
                }
            }
        }
        return Ok(phi);
    }
}

/// Projects the eliminated constants after naming every application that
/// mentions one; congruence between the named applications and the kept
/// applications of `phi` is kept as guarded equalities.
fn project_named(phi: &Formula, elim: &BTreeSet<Term>) -> Result<Formula, CoverError> {
    let mut supply = NameSupply::default();
    phi.for_each_subterm(&mut |t| {
        if let Some(n) = t.symbol() {
            supply.reserve(n);
        }
    });
    let mut named: BTreeMap<Term, Term> = BTreeMap::new();
    fn name(t: &Term, elim: &BTreeSet<Term>, supply: &mut NameSupply, named: &mut BTreeMap<Term, Term>) -> Term {
        let rebuilt = match t.kind() {
            TermKind::App(f, args) => {
                let args = args.iter().map(|a| name(a, elim, supply, named)).collect();
                Term::app(f, args, t.sort().clone())
            }
            _ => t.clone(),
        };
        if rebuilt.is_uninterpreted_app()
            && rebuilt.args().iter().any(|a| elim.contains(a) || named.values().any(|n| n == a))
        {
            if let Some(c) = named.get(&rebuilt) {
                return c.clone();
            }
            let c = supply.fresh_constant("k!", rebuilt.sort().clone());
            named.insert(rebuilt, c.clone());
            return c;
        }
        rebuilt
    }
    let body = phi.map_terms(&mut |t| name(t, elim, &mut supply, &mut named));
    let mut kept_apps = BTreeSet::new();
    body.for_each_subterm(&mut |t| {
        if t.is_uninterpreted_app() {
            kept_apps.insert(t.clone());
        }
    });
    let mut con = Vec::new();
    let entries: Vec<(&Term, &Term)> = named.iter().collect();
    for (i, (t1, c1)) in entries.iter().enumerate() {
        let others = entries[i + 1..].iter().map(|(t, c)| ((*t).clone(), (*c).clone()));
        let kept = kept_apps.iter().map(|t| (t.clone(), t.clone()));
        for (t2, c2) in others.chain(kept) {
            if t1.symbol() != t2.symbol() {
                continue;
            }
            let guards =
                t1.args().iter().zip(t2.args()).filter(|(a, b)| a != b).map(|(a, b)| Formula::eq(a.clone(), b.clone()));
            con.push(Formula::implies(Formula::and(guards), Formula::eq((*c1).clone(), c2)));
        }
    }
    let mut bound: Vec<Term> = elim.iter().cloned().collect();
    bound.extend(named.values().cloned());
    let projected = qe::project(&bound, &Formula::and(std::iter::once(body).chain(con)))?;
    // A residual block would only arise under a function; such conjuncts
    // are dropped, which weakens but keeps soundness.
    let parts: Vec<Formula> = projected.conjuncts().into_iter().filter(|c| c.is_quantifier_free()).collect();
    Ok(Formula::and(parts))
}

fn literal_rank(l: &Literal) -> u8 {
    match (&l.atom, l.positive) {
        (Atom::Eq(..), true) => 0,
        (Atom::Lt(..), true) => 1,
        (Atom::Le(..), true) => 2,
        _ => 3,
    }
}

/// Cover of a conjunction of literals.
pub fn compute_cover(task: &CoverTask, opts: &CoverOptions) -> Result<Formula, CoverError> {
    if task.phi.as_conjunction().is_none() {
        return Err(CoverError::NotConjunctive);
    }
    if let Some(c) = task.eliminate.iter().find(|c| task.keep.contains(*c)) {
        return Err(CoverError::Inconsistent(format!("{c} is both kept and eliminated")));
    }
    if ground::check_sat(&task.phi)?.is_unsat() {
        return Ok(Formula::False);
    }
    let keep = &task.keep;
    let mut elim: BTreeSet<Term> = task.phi.constants().into_iter().filter(|c| !keep.contains(c)).collect();
    let depth = opts.depth.unwrap_or_else(|| depth_bound(&task.phi, &elim));
    let phi = substitute_definitions(task.phi.clone(), &mut elim, keep, depth, opts.max_universe)?;
    if phi == Formula::False {
        return Ok(Formula::False);
    }

    let mut psi = project_named(&phi, &elim)?;

    let mut cons: Vec<Literal> = bounded_consequences_with(&phi, keep, depth, opts.max_universe)?
        .into_iter()
        .filter(|l| !is_reflexive(l))
        .collect();
    cons.sort_by_key(|l| (literal_rank(l), l.atom.sides().0.depth() + l.atom.sides().1.depth()));
    for l in cons {
        let f = l.to_formula();
        if !ground::entails(&psi, &f)? {
            psi = Formula::and([psi, f]);
        }
    }

    if opts.guards {
        let kept_consts: Vec<Term> = phi.constants().into_iter().filter(|c| keep.contains(c)).collect();
        let local_depth = phi.max_depth();
        for (i, u) in kept_consts.iter().enumerate() {
            for v in &kept_consts[i + 1..] {
                if u.sort() != v.sort() {
                    continue;
                }
                let g = Formula::eq(u.clone(), v.clone());
                if ground::entails(&phi, &g)? || ground::entails(&phi, &Formula::not(g.clone()))? {
                    continue;
                }
                let strengthened = Formula::and([phi.clone(), g.clone()]);
                let u = universe(&phi, keep, local_depth, opts.max_universe)?;
                for l in entailed_in_universe(&strengthened, &u)? {
                    if is_reflexive(&l) {
                        continue;
                    }
                    let f = l.to_formula();
                    if !ground::entails(&Formula::and([psi.clone(), g.clone()]), &f)? {
                        psi = Formula::and([psi, Formula::or([Formula::not(g.clone()), f])]);
                    }
                }
            }
        }
    }

    let psi = qe::simplify(&psi, &GroundOracle);
    let fns = function_decls(&task.phi);
    if let Some(c) = psi.constants().into_iter().find(|c| !keep.contains(c)) {
        return Err(CoverError::Inconsistent(format!("cover mentions eliminated constant {c}")));
    }
    if let Some(f) = psi.function_symbols().into_iter().find(|f| !fns.contains_key(f)) {
        return Err(CoverError::Inconsistent(format!("cover introduces function {f}")));
    }
    Ok(psi)
}

/// Cover of an arbitrary ground quantifier-free formula: the disjunction of
/// the covers of its satisfiable DNF disjuncts.
pub fn cover_formula(phi: &Formula, keep: &BTreeSet<Term>, opts: &CoverOptions) -> Result<Formula, CoverError> {
    if phi.as_conjunction().is_some() {
        return compute_cover(&CoverTask::new(phi.clone(), keep.clone()), opts);
    }
    let mut parts = Vec::new();
    for d in qe::dnf_pruned(phi)? {
        let conj = Formula::from_literals(&d);
        parts.push(compute_cover(&CoverTask::new(conj, keep.clone()), opts)?);
    }
    Ok(qe::simplify(&qe::normalize(&Formula::or(parts)), &GroundOracle))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub depth: usize,
    pub entailment_ok: bool,
    pub completeness_ok: bool,
    pub signature_ok: bool,
    /// Basis literals entailed by `φ` but not by `ψ`.
    pub counterexamples: Vec<Literal>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.entailment_ok && self.completeness_ok && self.signature_ok
    }
}

/// Checks `φ ⊨ ψ` and that every basis literal at `depth` entailed by `φ`
/// is entailed by `ψ`.
pub fn verify_cover(
    phi: &Formula,
    psi: &Formula,
    keep: &BTreeSet<Term>,
    depth: usize,
) -> Result<VerifyReport, CoverError> {
    let entailment_ok = ground::entails(phi, psi)?;
    let fns = function_decls(phi);
    let signature_ok =
        psi.constants().iter().all(|c| keep.contains(c)) && psi.function_symbols().iter().all(|f| fns.contains_key(f));
    let cons = bounded_consequences(phi, keep, depth)?;
    let mut counterexamples = Vec::new();
    let w = ground::check_sat(psi)?;
    let mut model = w.witness().map(|w| Extension::new(w.clone(), 0));
    for l in cons {
        if is_reflexive(&l) {
            continue;
        }
        if let Some(m) = model.as_mut() {
            if m.literal(&l) == Some(false) {
                counterexamples.push(l);
                continue;
            }
        }
        if !ground::entails(psi, &l.to_formula())? {
            counterexamples.push(l);
        }
    }
    Ok(VerifyReport {
        depth,
        entailment_ok,
        completeness_ok: counterexamples.is_empty(),
        signature_ok,
        counterexamples,
    })
}

/// A cover together with its verification at the depth bound and one
/// above it.
#[derive(Clone, Debug)]
pub struct VerifiedCover {
    pub psi: Formula,
    pub depth: usize,
    pub reports: Vec<VerifyReport>,
    /// Whether the bound had to be raised after a failed check.
    pub raised: bool,
}

impl VerifiedCover {
    pub fn ok(&self) -> bool {
        self.reports.iter().all(VerifyReport::ok)
    }
}

/// Computes the cover at the default bound `D` and verifies it at `D` and
/// `D + 1`; on failure the bound is raised once and the run repeated.
pub fn verified_cover(phi: &Formula, keep: &BTreeSet<Term>, opts: &CoverOptions) -> Result<VerifiedCover, CoverError> {
    let elim: BTreeSet<Term> = phi.constants().into_iter().filter(|c| !keep.contains(c)).collect();
    let d = opts.depth.unwrap_or_else(|| depth_bound(phi, &elim));
    let attempt = |depth: usize| -> Result<(Formula, Vec<VerifyReport>), CoverError> {
        let psi = cover_formula(phi, keep, &CoverOptions { depth: Some(depth), ..*opts })?;
        let reports = vec![verify_cover(phi, &psi, keep, depth)?, verify_cover(phi, &psi, keep, depth + 1)?];
        Ok((psi, reports))
    };
    let (psi, reports) = attempt(d)?;
    if reports.iter().all(VerifyReport::ok) {
        return Ok(VerifiedCover { psi, depth: d, reports, raised: false });
    }
    let (psi, reports) = attempt(d + 1)?;
    Ok(VerifiedCover { psi, depth: d + 1, reports, raised: true })
}
