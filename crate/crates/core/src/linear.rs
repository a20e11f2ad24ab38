//! Linear expressions over rationals and Fourier–Motzkin elimination.
//!
//! Anything that is not built from numerals, `+`, `-` and `*` by a numeral
//! is treated as an opaque atom, so `3*f(a) - b + 1` has atoms `f(a)` and
//! `b`. Constraints are kept in the form `expr ⋈ 0` with `⋈ ∈ {≤, <, =}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::syntax::{fmt_rational, Atom, Formula, Term, TermKind, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("non-linear term `{0}`")]
pub struct NonLinear(pub String);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<Term, Q>,
    pub constant: Q,
}

impl LinExpr {
    pub fn zero() -> LinExpr {
        LinExpr::default()
    }

    pub fn constant(c: Q) -> LinExpr {
        LinExpr { coeffs: BTreeMap::new(), constant: c }
    }

    pub fn atom(t: Term) -> LinExpr {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(t, Q::one());
        LinExpr { coeffs, constant: Q::zero() }
    }

    /// Reads a numeric term as a linear combination of atoms.
    pub fn from_term(t: &Term) -> Result<LinExpr, NonLinear> {
        match t.kind() {
            TermKind::Num(v) => Ok(LinExpr::constant(v.clone())),
            TermKind::App(f, args) if crate::syntax::is_arith_symbol(f) => {
                let parts = args.iter().map(LinExpr::from_term).collect::<Result<Vec<_>, _>>()?;
                match &**f {
                    "+" => Ok(parts.into_iter().fold(LinExpr::zero(), |a, b| a.add(&b))),
                    "-" => {
                        let mut it = parts.into_iter();
                        let first = it.next().unwrap_or_default();
                        let rest: Vec<LinExpr> = it.collect();
                        if rest.is_empty() {
                            Ok(first.scale(&-Q::one()))
                        } else {
                            Ok(rest.iter().fold(first, |a, b| a.sub(b)))
                        }
                    }
                    _ => {
                        let mut acc = LinExpr::constant(Q::one());
                        for p in parts {
                            if let Some(k) = p.as_constant() {
                                acc = acc.scale(&k);
                            } else if let Some(k) = acc.as_constant() {
                                acc = p.scale(&k);
                            } else {
                                return Err(NonLinear(t.to_string()));
                            }
                        }
                        Ok(acc)
                    }
                }
            }
            _ => Ok(LinExpr::atom(t.clone())),
        }
    }

    pub fn as_constant(&self) -> Option<Q> {
        self.coeffs.is_empty().then(|| self.constant.clone())
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, t: &Term) -> Q {
        self.coeffs.get(t).cloned().unwrap_or_else(Q::zero)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Term> {
        self.coeffs.keys()
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (t, c) in &other.coeffs {
            let e = out.coeffs.entry(t.clone()).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                out.coeffs.remove(t);
            }
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, k: &Q) -> LinExpr {
        if k.is_zero() {
            return LinExpr::zero();
        }
        LinExpr { coeffs: self.coeffs.iter().map(|(t, c)| (t.clone(), c * k)).collect(), constant: &self.constant * k }
    }

    /// Replaces atom `t` by `by`.
    pub fn substitute(&self, t: &Term, by: &LinExpr) -> LinExpr {
        let c = self.coeff(t);
        if c.is_zero() {
            return self.clone();
        }
        let mut rest = self.clone();
        rest.coeffs.remove(t);
        rest.add(&by.scale(&c))
    }

    pub fn eval(&self, value: &impl Fn(&Term) -> Option<Q>) -> Option<Q> {
        let mut acc = self.constant.clone();
        for (t, c) in &self.coeffs {
            acc += c * value(t)?;
        }
        Some(acc)
    }

    /// Rebuilds the expression as a term, atoms in canonical order.
    pub fn to_term(&self) -> Term {
        let mut parts: Vec<Term> = self
            .coeffs
            .iter()
            .map(|(t, c)| if c.is_one() { t.clone() } else { Term::scale(c.clone(), t.clone()) })
            .collect();
        if !self.constant.is_zero() || parts.is_empty() {
            parts.push(Term::num(self.constant.clone()));
        }
        if parts.len() == 1 {
            parts.pop().unwrap_or_else(|| Term::int(0))
        } else {
            Term::add(parts)
        }
    }
}

/// Multiplies out denominators and divides by the content, giving a
/// positive factor that turns `e` into integer coefficients with gcd 1.
pub fn integer_scale(e: &LinExpr) -> Q {
    let mut lcm = num_bigint::BigInt::one();
    let mut gcd = num_bigint::BigInt::zero();
    for c in e.coeffs.values().chain(std::iter::once(&e.constant)) {
        lcm = lcm.lcm(c.denom());
    }
    for c in e.coeffs.values().chain(std::iter::once(&e.constant)) {
        let n = (c * Q::from_integer(lcm.clone())).to_integer();
        gcd = gcd.gcd(&n);
    }
    if gcd.is_zero() {
        return Q::one();
    }
    Q::new(lcm, gcd)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Rel {
    Eq,
    Le,
    Lt,
}

/// `expr ⋈ 0`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Constraint {
    pub expr: LinExpr,
    pub rel: Rel,
}

impl Constraint {
    pub fn new(expr: LinExpr, rel: Rel) -> Constraint {
        Constraint { expr, rel }
    }

    /// `a ⋈ b` as `a - b ⋈ 0`; `None` for equalities between non-numeric
    /// terms.
    pub fn from_atom(a: &Atom) -> Result<Option<Constraint>, NonLinear> {
        let (l, r) = a.sides();
        if !l.is_numeric() {
            return Ok(None);
        }
        let e = LinExpr::from_term(l)?.sub(&LinExpr::from_term(r)?);
        let rel = match a {
            Atom::Eq(..) => Rel::Eq,
            Atom::Le(..) => Rel::Le,
            Atom::Lt(..) => Rel::Lt,
        };
        Ok(Some(Constraint::new(e, rel)))
    }

    /// The constraint stating the negation of `expr ≤ 0` or `expr < 0`.
    pub fn negate_ineq(&self) -> Constraint {
        let e = self.expr.scale(&-Q::one());
        match self.rel {
            Rel::Le => Constraint::new(e, Rel::Lt),
            Rel::Lt => Constraint::new(e, Rel::Le),
            Rel::Eq => panic!("negate_ineq on an equality"),
        }
    }

    pub fn holds(&self, v: &Q) -> bool {
        match self.rel {
            Rel::Eq => v.is_zero(),
            Rel::Le => !v.is_positive(),
            Rel::Lt => v.is_negative(),
        }
    }

    /// Truth value when the expression has no atoms.
    pub fn constant_truth(&self) -> Option<bool> {
        self.expr.as_constant().map(|v| self.holds(&v))
    }

    pub fn eval(&self, value: &impl Fn(&Term) -> Option<Q>) -> Option<bool> {
        self.expr.eval(value).map(|v| self.holds(&v))
    }

    /// Scales to integer coefficients with gcd 1; equalities additionally
    /// get a positive leading coefficient.
    pub fn normalized(&self) -> Constraint {
        let mut k = integer_scale(&self.expr);
        if self.rel == Rel::Eq {
            if let Some((_, c)) = self.expr.coeffs.iter().next() {
                if c.is_negative() {
                    k = -k;
                }
            }
        }
        Constraint::new(self.expr.scale(&k), self.rel)
    }

    /// Renders `expr ⋈ 0` as an atom with positive coefficients on the
    /// left and negative ones on the right.
    pub fn to_formula(&self) -> Formula {
        if let Some(t) = self.constant_truth() {
            return if t { Formula::True } else { Formula::False };
        }
        let n = self.normalized();
        let mut lhs = LinExpr::zero();
        let mut rhs = LinExpr::zero();
        for (t, c) in &n.expr.coeffs {
            if c.is_positive() {
                lhs.coeffs.insert(t.clone(), c.clone());
            } else {
                rhs.coeffs.insert(t.clone(), -c.clone());
            }
        }
        let k = -n.expr.constant.clone();
        if lhs.coeffs.is_empty() {
            // 0 ⋈ rhs + ... : move the constant to the left.
            lhs.constant = -k;
        } else {
            rhs.constant = k;
        }
        let (l, r) = (lhs.to_term(), rhs.to_term());
        match n.rel {
            Rel::Eq => Formula::eq(l, r),
            Rel::Le => Formula::le(l, r),
            Rel::Lt => Formula::lt(l, r),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.rel {
            Rel::Eq => "=",
            Rel::Le => "<=",
            Rel::Lt => "<",
        };
        let mut first = true;
        for (t, c) in &self.expr.coeffs {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{}*{}", fmt_rational(c), t)?;
        }
        if first || !self.expr.constant.is_zero() {
            if !first {
                f.write_str(" + ")?;
            }
            f.write_str(&fmt_rational(&self.expr.constant))?;
        }
        write!(f, " {op} 0")
    }
}

/// Scales a non-equality so that its first coefficient is ±1, keeping
/// direction; used to group constraints sharing a linear part.
fn direction_key(c: &Constraint) -> (BTreeMap<Term, Q>, Q) {
    let lead = c.expr.coeffs.values().next().map(|v| v.abs()).unwrap_or_else(Q::one);
    let inv = Q::one() / lead;
    let e = c.expr.scale(&inv);
    (e.coeffs, e.constant)
}

/// Removes constant constraints (or reports a contradiction), duplicates and
/// bounds subsumed by a tighter bound on the same linear part.
pub fn simplify_set(cs: Vec<Constraint>) -> Option<Vec<Constraint>> {
    let mut eqs: BTreeMap<BTreeMap<Term, Q>, Q> = BTreeMap::new();
    let mut bounds: BTreeMap<BTreeMap<Term, Q>, (Q, Rel)> = BTreeMap::new();
    for c in cs {
        if let Some(t) = c.constant_truth() {
            if !t {
                return None;
            }
            continue;
        }
        let mut c = c;
        if c.rel == Rel::Eq && c.expr.coeffs.values().next().is_some_and(|v| v.is_negative()) {
            c.expr = c.expr.scale(&-Q::one());
        }
        let (lin, k) = direction_key(&c);
        if c.rel == Rel::Eq {
            match eqs.get(&lin) {
                Some(k2) if *k2 != k => return None,
                _ => {
                    eqs.insert(lin, k);
                }
            }
            continue;
        }
        // lin + k ⋈ 0, i.e. lin ⋈ -k; larger k is tighter.
        match bounds.get(&lin) {
            Some((k2, r2)) if *k2 > k || (*k2 == k && (*r2 == Rel::Lt || c.rel == Rel::Le)) => {}
            _ => {
                bounds.insert(lin, (k, c.rel));
            }
        }
    }
    let mut out: Vec<Constraint> =
        eqs.into_iter().map(|(coeffs, constant)| Constraint::new(LinExpr { coeffs, constant }, Rel::Eq)).collect();
    // Opposite bounds on the same linear part: lin + k1 ⋈ 0 and -lin + k2 ⋈ 0.
    let keys: Vec<_> = bounds.keys().cloned().collect();
    for lin in &keys {
        let Some((k1, r1)) = bounds.get(lin).cloned() else { continue };
        let neg: BTreeMap<Term, Q> = lin.iter().map(|(t, c)| (t.clone(), -c.clone())).collect();
        if let Some((k2, r2)) = bounds.get(&neg).cloned() {
            // k2 ≤ lin ≤ -k1 (with strictness); contradiction when the
            // interval is empty.
            let lo = k2.clone();
            let hi = -k1.clone();
            if lo > hi || (lo == hi && (r1 == Rel::Lt || r2 == Rel::Lt)) {
                return None;
            }
        }
    }
    for (coeffs, (constant, rel)) in bounds {
        out.push(Constraint::new(LinExpr { coeffs, constant }, rel));
    }
    Some(out)
}

/// Eliminates `x` from a constraint set. Returns `None` when a constant
/// contradiction appears.
pub fn eliminate(cs: &[Constraint], x: &Term) -> Option<Vec<Constraint>> {
    if let Some(pos) = cs.iter().position(|c| c.rel == Rel::Eq && !c.expr.coeff(x).is_zero()) {
        let eq = &cs[pos];
        let a = eq.expr.coeff(x);
        let mut rest = eq.expr.clone();
        rest.coeffs.remove(x);
        let value = rest.scale(&(-Q::one() / a));
        let out = cs
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, c)| Constraint::new(c.expr.substitute(x, &value), c.rel))
            .collect();
        return simplify_set(out);
    }
    let mut keep = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for c in cs {
        let a = c.expr.coeff(x);
        if a.is_zero() {
            keep.push(c.clone());
        } else if a.is_positive() {
            upper.push(c);
        } else {
            lower.push(c);
        }
    }
    for u in &upper {
        for l in &lower {
            let a = u.expr.coeff(x);
            let b = -l.expr.coeff(x);
            let mut e = u.expr.scale(&b).add(&l.expr.scale(&a));
            e.coeffs.remove(x);
            let rel = if u.rel == Rel::Lt || l.rel == Rel::Lt { Rel::Lt } else { Rel::Le };
            keep.push(Constraint::new(e, rel));
        }
    }
    simplify_set(keep)
}

pub fn atoms_of(cs: &[Constraint]) -> BTreeSet<Term> {
    cs.iter().flat_map(|c| c.expr.atoms().cloned()).collect()
}

/// Picks the atom whose elimination creates the fewest constraints,
/// preferring atoms with a defining equality; ties go to canonical order.
fn next_atom(cs: &[Constraint], candidates: &BTreeSet<Term>) -> Option<Term> {
    let mut best: Option<(usize, Term)> = None;
    for x in candidates {
        let mut pos = 0usize;
        let mut neg = 0usize;
        let mut has_eq = false;
        for c in cs {
            let a = c.expr.coeff(x);
            if a.is_zero() {
                continue;
            }
            if c.rel == Rel::Eq {
                has_eq = true;
            } else if a.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        let cost = if has_eq { 0 } else { 1 + pos * neg };
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, x.clone()));
        }
    }
    best.map(|(_, x)| x)
}

/// Decides satisfiability of a constraint conjunction over the rationals.
pub fn feasible(cs: &[Constraint]) -> bool {
    solve(cs).is_some()
}

/// Returns a satisfying assignment to every atom of `cs`, if one exists.
pub fn solve(cs: &[Constraint]) -> Option<BTreeMap<Term, Q>> {
    let mut current = simplify_set(cs.to_vec())?;
    let mut stages: Vec<(Term, Vec<Constraint>)> = Vec::new();
    loop {
        let atoms = atoms_of(&current);
        let Some(x) = next_atom(&current, &atoms) else { break };
        let next = eliminate(&current, &x)?;
        stages.push((x, current));
        current = next;
    }
    let mut model: BTreeMap<Term, Q> = BTreeMap::new();
    for (x, cs) in stages.iter().rev() {
        let v = pick_value(cs, x, &model)?;
        model.insert(x.clone(), v);
    }
    for c in cs {
        for t in c.expr.atoms() {
            model.entry(t.clone()).or_insert_with(Q::zero);
        }
    }
    Some(model)
}

/// Chooses a value for `x` satisfying every constraint of `cs` once the
/// atoms in `model` are fixed.
fn pick_value(cs: &[Constraint], x: &Term, model: &BTreeMap<Term, Q>) -> Option<Q> {
    let mut lo: Option<(Q, bool)> = None;
    let mut hi: Option<(Q, bool)> = None;
    for c in cs {
        let a = c.expr.coeff(x);
        if a.is_zero() {
            continue;
        }
        let mut rest = c.expr.clone();
        rest.coeffs.remove(x);
        let r = rest.eval(&|t| model.get(t).cloned().or_else(|| Some(Q::zero())))?;
        let bound = -r / &a;
        match c.rel {
            Rel::Eq => return Some(bound),
            _ => {
                let strict = c.rel == Rel::Lt;
                if a.is_positive() {
                    if hi.as_ref().is_none_or(|(h, s)| bound < *h || (bound == *h && strict && !s)) {
                        hi = Some((bound, strict));
                    }
                } else if lo.as_ref().is_none_or(|(l, s)| bound > *l || (bound == *l && strict && !s)) {
                    lo = Some((bound, strict));
                }
            }
        }
    }
    let two = Q::from_integer(2.into());
    Some(match (lo, hi) {
        (None, None) => Q::zero(),
        (Some((l, s)), None) => {
            if s {
                l + Q::one()
            } else {
                l
            }
        }
        (None, Some((h, s))) => {
            if s {
                h - Q::one()
            } else {
                h
            }
        }
        (Some((l, _)), Some((h, _))) => {
            if l == h {
                l
            } else {
                (l + h) / two
            }
        }
    })
}
