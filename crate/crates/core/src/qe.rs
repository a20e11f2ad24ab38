//! Quantifier elimination for existential blocks over linear rational
//! arithmetic, plus normalization and context-aware simplification of the
//! resulting quantifier-free formulas.
//!
//! Each disjunct of the body is treated separately. A bound symbol with a
//! defining equality is substituted away; otherwise it is projected with
//! Fourier–Motzkin. A bound symbol that still sits below an uninterpreted
//! function after all substitutions cannot be projected; [`project`] keeps
//! it under a residual existential, [`eliminate_quantifiers`] reports it.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::ground::{self, GroundError};
use crate::linear::{self, Constraint, LinExpr, NonLinear, Rel};
use crate::syntax::{Atom, Formula, Literal, Term, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QeError {
    #[error(transparent)]
    NonLinear(#[from] NonLinear),
    #[error("bound symbol `{0}` occurs below an uninterpreted function and has no defining equality")]
    BelowFunction(String),
    #[error("body is not ground apart from the bound symbols: {0}")]
    NotGround(String),
}

impl From<GroundError> for QeError {
    fn from(e: GroundError) -> QeError {
        match e {
            GroundError::NonLinear(n) => QeError::NonLinear(n),
            GroundError::NotGround(s) => QeError::NotGround(s),
        }
    }
}

/// `∃ bound. body`, where the bound symbols are constants (or variables)
/// of the body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistentialBlock {
    pub bound: Vec<Term>,
    pub body: Formula,
}

impl ExistentialBlock {
    pub fn new(bound: Vec<Term>, body: Formula) -> ExistentialBlock {
        ExistentialBlock { bound, body }
    }
}

fn mentions(l: &Literal, x: &Term) -> bool {
    let (a, b) = l.atom.sides();
    a.contains(x) || b.contains(x)
}

fn below_function(t: &Term, x: &Term) -> bool {
    let mut found = false;
    t.visit(&mut |s| {
        if s.is_uninterpreted_app() && s.args().iter().any(|a| a.contains(x)) {
            found = true;
        }
    });
    found
}

fn literal_below_function(l: &Literal, x: &Term) -> bool {
    let (a, b) = l.atom.sides();
    below_function(a, x) || below_function(b, x)
}

/// Rewrites negated inequalities as positive ones.
fn positive_form(l: Literal) -> Literal {
    if l.positive {
        return l;
    }
    match l.atom {
        Atom::Le(a, b) => Literal::lt(b, a),
        Atom::Lt(a, b) => Literal::le(b, a),
        atom @ Atom::Eq(..) => Literal::neg(atom),
    }
}

fn replace_in(l: &Literal, x: &Term, by: &Term) -> Literal {
    l.map_terms(&mut |t| t.replace(x, by))
}

/// Finds a literal `x ≈ t` (possibly after solving a linear equation for
/// `x`) whose right-hand side does not contain `x`.
fn defining_equality(lits: &[Literal], x: &Term) -> Result<Option<(usize, Term)>, NonLinear> {
    for (i, l) in lits.iter().enumerate() {
        if !l.positive {
            continue;
        }
        let Atom::Eq(a, b) = &l.atom else { continue };
        if !x.is_numeric() {
            if a == x && !b.contains(x) {
                return Ok(Some((i, b.clone())));
            }
            if b == x && !a.contains(x) {
                return Ok(Some((i, a.clone())));
            }
            continue;
        }
        let e = LinExpr::from_term(a)?.sub(&LinExpr::from_term(b)?);
        let k = e.coeff(x);
        if k.is_zero() {
            continue;
        }
        let mut rest = e.clone();
        rest.coeffs.remove(x);
        if rest.atoms().any(|t| t.contains(x)) {
            continue;
        }
        let value = rest.scale(&(-Q::one() / k));
        return Ok(Some((i, value.to_term())));
    }
    Ok(None)
}

struct Disjunct {
    lits: Vec<Literal>,
    residual: Vec<Term>,
}

/// Bound symbols below functions go first (they can only be removed by
/// substitution), then fewest occurrences, then canonical order.
fn choose(lits: &[Literal], todo: &[Term]) -> usize {
    let key = |x: &Term| {
        let under = lits.iter().any(|l| literal_below_function(l, x));
        let occ = lits.iter().filter(|l| mentions(l, x)).count();
        (!under, occ, x.clone())
    };
    (0..todo.len()).min_by_key(|&i| key(&todo[i])).unwrap_or(0)
}

fn eliminate_disjunct(mut lits: Vec<Literal>, mut todo: Vec<Term>, out: &mut Vec<Disjunct>) -> Result<(), QeError> {
    let mut residual = Vec::new();
    while !todo.is_empty() {
        let x = todo.remove(choose(&lits, &todo));
        if !lits.iter().any(|l| mentions(l, &x)) {
            continue;
        }
        if let Some((i, value)) = defining_equality(&lits, &x)? {
            lits.remove(i);
            lits = lits.iter().map(|l| replace_in(l, &x, &value)).collect();
            continue;
        }
        if lits.iter().any(|l| literal_below_function(l, &x)) {
            residual.push(x);
            continue;
        }
        if !x.is_numeric() {
            // Element sorts are infinite: remaining disequalities on x can
            // always be met by a fresh element.
            lits.retain(|l| !mentions(l, &x));
            continue;
        }
        if let Some(i) = lits.iter().position(|l| !l.positive && mentions(l, &x)) {
            let Atom::Eq(a, b) = lits[i].atom.clone() else {
                unreachable!("positive_form keeps only disequalities negative")
            };
            for split in [Literal::lt(a.clone(), b.clone()), Literal::lt(b, a)] {
                let mut copy = lits.clone();
                copy[i] = split;
                let mut rest = todo.clone();
                rest.insert(0, x.clone());
                let before = out.len();
                eliminate_disjunct(copy, rest, out)?;
                for d in &mut out[before..] {
                    d.residual.extend(residual.iter().cloned());
                }
            }
            return Ok(());
        }
        let (with, without): (Vec<Literal>, Vec<Literal>) = lits.into_iter().partition(|l| mentions(l, &x));
        let mut cs = Vec::new();
        for l in &with {
            cs.push(Constraint::from_atom(&l.atom)?.expect("numeric literal"));
        }
        let Some(projected) = linear::eliminate(&cs, &x) else { return Ok(()) };
        lits = without;
        for c in projected {
            if let Some(l) = c.to_formula().as_literal() {
                lits.push(l);
            }
        }
    }
    out.push(Disjunct { lits, residual });
    Ok(())
}

fn check_bound(bound: &[Term], body: &Formula) -> Result<(), QeError> {
    let free: Vec<Term> = body.free_vars().into_iter().filter(|v| !bound.contains(v)).collect();
    if !free.is_empty() || !body.is_quantifier_free() {
        return Err(QeError::NotGround(body.to_string()));
    }
    Ok(())
}

/// Replaces bound variables by reserved constants so the ground solver can
/// prune; returns the renaming to undo afterwards.
fn groundify(bound: &[Term], body: &Formula) -> (Vec<Term>, Formula, Vec<(Term, Term)>) {
    let mut body = body.clone();
    let mut back = Vec::new();
    let mut out = Vec::new();
    for (i, v) in bound.iter().enumerate() {
        if v.is_var() {
            let c = Term::constant(&format!("qe!{i}"), v.sort().clone());
            body = body.replace(v, &c);
            back.push((c.clone(), v.clone()));
            out.push(c);
        } else {
            out.push(v.clone());
        }
    }
    (out, body, back)
}

/// Projection that may leave residual existentials for symbols trapped
/// below functions.
pub fn project(bound: &[Term], body: &Formula) -> Result<Formula, QeError> {
    check_bound(bound, body)?;
    let (bound, body, back) = groundify(bound, body);
    let (free, tied): (Vec<Formula>, Vec<Formula>) =
        body.conjuncts().into_iter().partition(|c| bound.iter().all(|x| !formula_mentions(c, x)));
    let mut disjuncts = Vec::new();
    for lits in dnf_pruned(&Formula::and(tied))? {
        let lits = lits.into_iter().map(positive_form).collect();
        eliminate_disjunct(lits, bound.clone(), &mut disjuncts)?;
    }
    let mut parts = Vec::new();
    for d in disjuncts {
        let (inner, outer): (Vec<Literal>, Vec<Literal>) =
            d.lits.into_iter().partition(|l| d.residual.iter().any(|x| mentions(l, x)));
        let mut conj: Vec<Formula> = outer.iter().map(Literal::to_formula).collect();
        if !inner.is_empty() {
            let used: Vec<Term> = d.residual.iter().filter(|x| inner.iter().any(|l| mentions(l, x))).cloned().collect();
            conj.push(Formula::Exists(used, Box::new(Formula::from_literals(&inner))));
        }
        parts.push(Formula::and(conj));
    }
    let mut result = Formula::and([Formula::and(free), Formula::or(parts)]);
    for (c, v) in back {
        result = rename_bound(&result.replace(&c, &v), &c, &v);
    }
    Ok(normalize(&result))
}

/// Eliminates every bound symbol; fails if one cannot be removed.
pub fn eliminate_quantifiers(b: &ExistentialBlock) -> Result<Formula, QeError> {
    let out = project(&b.bound, &b.body)?;
    if let Some(x) = residual_bound(&out).into_iter().next() {
        return Err(QeError::BelowFunction(x.to_string()));
    }
    Ok(out)
}

/// Renames binder occurrences of `from` to `to`.
fn rename_bound(f: &Formula, from: &Term, to: &Term) -> Formula {
    match f {
        Formula::Exists(vs, g) => Formula::Exists(
            vs.iter().map(|v| if v == from { to.clone() } else { v.clone() }).collect(),
            Box::new(rename_bound(g, from, to)),
        ),
        Formula::Forall(vs, g) => Formula::Forall(vs.clone(), Box::new(rename_bound(g, from, to))),
        Formula::Not(g) => Formula::Not(Box::new(rename_bound(g, from, to))),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename_bound(g, from, to)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename_bound(g, from, to)).collect()),
        Formula::Implies(a, b) => {
            Formula::Implies(Box::new(rename_bound(a, from, to)), Box::new(rename_bound(b, from, to)))
        }
        other => other.clone(),
    }
}

fn residual_bound(f: &Formula) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    fn go(f: &Formula, out: &mut BTreeSet<Term>) {
        match f {
            Formula::Exists(vs, g) => {
                out.extend(vs.iter().cloned());
                go(g, out);
            }
            Formula::Not(g) | Formula::Forall(_, g) => go(g, out),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| go(g, out)),
            Formula::Implies(a, b) => {
                go(a, out);
                go(b, out);
            }
            _ => {}
        }
    }
    go(f, &mut out);
    out
}

fn formula_mentions(f: &Formula, x: &Term) -> bool {
    let mut found = false;
    f.for_each_subterm(&mut |t| found |= t == x);
    found
}

/// DNF of a ground quantifier-free formula, dropping disjuncts that are
/// unsatisfiable as soon as they appear.
pub fn dnf_pruned(f: &Formula) -> Result<Vec<Vec<Literal>>, QeError> {
    let nnf = f.nnf();
    let mut units = Vec::new();
    let mut clauses = Vec::new();
    for c in nnf.conjuncts() {
        match c {
            Formula::False => return Ok(Vec::new()),
            other => match other.as_literal() {
                Some(l) => units.push(l),
                None => clauses.push(other),
            },
        }
    }
    let ground = f.free_vars().is_empty();
    let consistent = |lits: &[Literal]| -> Result<bool, QeError> {
        if !ground {
            return Ok(true);
        }
        Ok(ground::check_conjunction(lits)?.result.is_sat())
    };
    if !consistent(&units)? {
        return Ok(Vec::new());
    }
    let mut acc = vec![units];
    for c in clauses {
        let options = c.dnf().unwrap_or_default();
        let mut next = Vec::new();
        for d in acc {
            if options.iter().any(|o| o.iter().all(|l| d.contains(l))) {
                next.push(d);
                continue;
            }
            for o in &options {
                let mut e = d.clone();
                for l in o {
                    if !e.contains(l) {
                        e.push(l.clone());
                    }
                }
                if consistent(&e)? {
                    next.push(e);
                }
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// Canonical literal conjunction, or `None` if it is contradictory.
fn canon_conjunction(lits: &[Literal]) -> Option<Vec<Literal>> {
    let mut cs = Vec::new();
    let mut diseqs: Vec<LinExpr> = Vec::new();
    let mut other = BTreeSet::new();
    for l in lits {
        let l = positive_form(l.clone());
        let (a, b) = l.atom.sides();
        if a.is_numeric() {
            let Ok(Some(c)) = Constraint::from_atom(&l.atom) else {
                other.insert(l.clone());
                continue;
            };
            if l.positive {
                cs.push(c);
            } else {
                match c.expr.as_constant() {
                    Some(v) if v.is_zero() => return None,
                    Some(_) => {}
                    None => diseqs.push(c.expr),
                }
            }
            continue;
        }
        if a == b {
            if l.positive {
                continue;
            }
            return None;
        }
        let (x, y) = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
        let atom = Atom::Eq(x, y);
        other.insert(Literal { positive: l.positive, atom });
    }
    let cs = linear::simplify_set(cs)?;
    let mut out: BTreeSet<Literal> = other;
    let mut used = vec![false; cs.len()];
    for i in 0..cs.len() {
        if used[i] || cs[i].rel != Rel::Le {
            continue;
        }
        let neg = Constraint::new(cs[i].expr.scale(&-Q::one()), Rel::Le).normalized();
        if let Some(j) = (i + 1..cs.len()).find(|&j| !used[j] && cs[j].normalized() == neg) {
            used[i] = true;
            used[j] = true;
            if let Some(l) = Constraint::new(cs[i].expr.clone(), Rel::Eq).to_formula().as_literal() {
                out.insert(l);
            }
        }
    }
    for (i, c) in cs.iter().enumerate() {
        if !used[i] {
            if let Some(l) = c.to_formula().as_literal() {
                out.insert(l);
            }
        }
    }
    for d in diseqs {
        if let Some(l) = Constraint::new(d, Rel::Eq).to_formula().as_literal() {
            out.insert(l.negate());
        }
    }
    Some(out.into_iter().collect())
}

fn conj_formula(lits: &[Literal]) -> Formula {
    Formula::from_literals(lits)
}

/// Canonical form of a quantifier-free formula: an optional conjunction of
/// literals common to all disjuncts, followed by a disjunction of
/// canonical literal conjunctions. Unsatisfiable and subsumed disjuncts are
/// dropped. Existential subformulas are normalized inside and kept.
pub fn normalize(f: &Formula) -> Formula {
    if !f.is_quantifier_free() {
        return normalize_with_quantifiers(f);
    }
    let ground = f.free_vars().is_empty();
    let Ok(disjuncts) = dnf_pruned(f) else { return f.clone() };
    let mut canon: Vec<Vec<Literal>> = Vec::new();
    for d in &disjuncts {
        if let Some(c) = canon_conjunction(d) {
            if !canon.contains(&c) {
                canon.push(c);
            }
        }
    }
    canon.sort();
    // Drop disjuncts entailed by another one (the weaker one absorbs them).
    let mut keep = vec![true; canon.len()];
    for i in 0..canon.len() {
        for j in 0..canon.len() {
            if i == j || !keep[i] || !keep[j] {
                continue;
            }
            let syntactic = canon[i].iter().all(|l| canon[j].contains(l));
            let semantic =
                || ground && ground::entails(&conj_formula(&canon[j]), &conj_formula(&canon[i])).unwrap_or(false);
            if syntactic || semantic() {
                keep[j] = false;
            }
        }
    }
    let mut canon: Vec<Vec<Literal>> = canon.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect();
    // A disjunct covered by the union of the others is redundant as well.
    if ground && canon.len() <= MAX_COVERING_CHECK {
        let mut i = canon.len();
        while i > 0 && canon.len() > 1 {
            i -= 1;
            let others = Formula::or(canon.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, d)| conj_formula(d)));
            if ground::entails(&conj_formula(&canon[i]), &others).unwrap_or(false) {
                canon.remove(i);
            }
        }
    }
    if canon.is_empty() {
        return Formula::False;
    }
    if canon.len() == 1 {
        return conj_formula(&canon[0]);
    }
    let common: Vec<Literal> = canon[0].iter().filter(|l| canon.iter().all(|d| d.contains(l))).cloned().collect();
    let rests: Vec<Formula> = canon
        .iter()
        .map(|d| conj_formula(&d.iter().filter(|l| !common.contains(l)).cloned().collect::<Vec<_>>()))
        .collect();
    let disj = Formula::or(rests);
    let disj = if ground && ground::is_valid(&disj).unwrap_or(false) { Formula::True } else { disj };
    Formula::and([conj_formula(&common), disj])
}

const MAX_COVERING_CHECK: usize = 12;

fn normalize_with_quantifiers(f: &Formula) -> Formula {
    match f {
        Formula::Exists(vs, g) => Formula::Exists(vs.clone(), Box::new(normalize_body(g))),
        Formula::And(gs) => Formula::and(gs.iter().map(normalize)),
        Formula::Or(gs) => {
            let (plain, quantified): (Vec<Formula>, Vec<Formula>) =
                gs.iter().cloned().partition(Formula::is_quantifier_free);
            Formula::or(std::iter::once(normalize(&Formula::or(plain))).chain(quantified.iter().map(normalize)))
        }
        other => other.clone(),
    }
}

fn normalize_body(f: &Formula) -> Formula {
    match f.as_conjunction().and_then(|c| canon_conjunction(&c)) {
        Some(c) => conj_formula(&c),
        None => f.clone(),
    }
}

/// Entailment oracle used by [`simplify`].
pub trait Oracle {
    fn entails(&self, premise: &Formula, goal: &Formula) -> bool;
}

/// Plain ground entailment in LRA with uninterpreted functions.
pub struct GroundOracle;

impl Oracle for GroundOracle {
    fn entails(&self, premise: &Formula, goal: &Formula) -> bool {
        ground::entails(premise, goal).unwrap_or(false)
    }
}

/// Normalizes, then greedily drops conjuncts that follow from the context
/// together with the remaining conjuncts.
pub fn simplify(f: &Formula, ctx: &dyn Oracle) -> Formula {
    let n = normalize(f);
    let mut parts = n.conjuncts();
    if parts.len() <= 1 {
        return match parts.pop() {
            Some(p) if ctx.entails(&Formula::True, &p) => Formula::True,
            Some(p) => p,
            None => n,
        };
    }
    parts.sort();
    let mut i = parts.len();
    while i > 0 {
        i -= 1;
        let others = Formula::and(parts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()));
        if ctx.entails(&others, &parts[i]) {
            parts.remove(i);
        }
    }
    Formula::and(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, Signature, Sort};

    fn sig() -> Signature {
        let mut s = Signature::new();
        let r = Sort::rat();
        for c in ["a", "b", "e", "b_g", "e_f", "c", "x", "u", "d1", "d2"] {
            s.add_constant(c, r.clone(), false);
        }
        s.add_function("h", vec![r.clone()], r.clone());
        s
    }

    fn f(src: &str) -> Formula {
        parse_formula(src, &sig()).unwrap()
    }

    fn k(n: &str) -> Term {
        Term::constant(n, Sort::rat())
    }

    #[test]
    fn single_function_elimination_step() {
        let body = f("(and (<= a e_f) (<= e b_g) (<= b_g a) (<= e_f b_g))");
        let out = eliminate_quantifiers(&ExistentialBlock::new(vec![k("e_f")], body)).unwrap();
        let want = f("(and (<= a b_g) (<= e b_g) (<= b_g a))");
        assert!(ground::equivalent(&out, &want).unwrap(), "{out}");
    }

    #[test]
    fn equality_substitution() {
        let out = eliminate_quantifiers(&ExistentialBlock::new(vec![k("x")], f("(and (= x c) (< x (h c)))"))).unwrap();
        assert_eq!(out, f("(< c (h c))"));
    }

    #[test]
    fn open_interval() {
        let out = eliminate_quantifiers(&ExistentialBlock::new(vec![k("x")], f("(and (< b x) (< x a))"))).unwrap();
        assert_eq!(out, f("(< b a)"));
    }

    #[test]
    fn trapped_symbol_stays_existential() {
        let body = f("(and (<= c d2) (= (* 3 u) d2) (= c d1) (=> (<= c 3) (= d1 (* 3 c))) (=> (> c 3) (= d1 (h c))))");
        let out = project(&[k("d1"), k("d2"), k("c")], &body).unwrap();
        assert!(residual_bound(&out).len() == 1, "{out}");
        let err = eliminate_quantifiers(&ExistentialBlock::new(vec![k("d1"), k("d2"), k("c")], body));
        assert!(matches!(err, Err(QeError::BelowFunction(_))));
    }

    #[test]
    fn simplify_drops_weaker_bound() {
        assert_eq!(simplify(&f("(and (<= x 3) (<= x 5))"), &GroundOracle), f("(<= x 3)"));
        assert_eq!(simplify(&f("(and (<= a b) true)"), &GroundOracle), f("(<= a b)"));
    }
}
