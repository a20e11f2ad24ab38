//! Hierarchical reasoning in local theory extensions: flattening,
//! instantiation `K[T]`, purification, term closure operators, the Θ
//! partition of extension symbols and the two-sorted instance set.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ground::{self, GroundError, SatResult};
use crate::syntax::{
    substitute, Axiom, Clause, ExtensionSpec, Formula, FunctionDecl, Name, NameSupply, Shape, Signature, Sort, Subst,
    Term, TermKind,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalityError {
    #[error("clause `{0}` has a variable that does not occur below an extension symbol")]
    NotGroundable(String),
    #[error("two-sorted condition {condition} fails: {detail}")]
    Tame { condition: &'static str, detail: String },
    #[error(transparent)]
    Ground(#[from] GroundError),
}

fn is_extension_app(t: &Term) -> bool {
    t.is_uninterpreted_app()
}

/// Ground extension terms of `t`, innermost first.
fn ground_apps(t: &Term, out: &mut BTreeSet<Term>) {
    for a in t.args() {
        ground_apps(a, out);
    }
    if is_extension_app(t) && t.is_ground() {
        out.insert(t.clone());
    }
}

/// Extension ground terms occurring in the clauses `k` or the goal `g`.
pub fn est<'a>(k: impl IntoIterator<Item = &'a Clause>, g: &Formula) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    for c in k {
        c.body.for_each_atom(&mut |a| {
            let (l, r) = a.sides();
            ground_apps(l, &mut out);
            ground_apps(r, &mut out);
        });
    }
    g.for_each_atom(&mut |a| {
        let (l, r) = a.sides();
        ground_apps(l, &mut out);
        ground_apps(r, &mut out);
    });
    out
}

/// Extension terms (ground or not) of a formula.
fn extension_terms(f: &Formula) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    f.for_each_subterm(&mut |t| {
        if is_extension_app(t) {
            out.insert(t.clone());
        }
    });
    out
}

// ---------------------------------------------------------------------------
// Flattening and linearity

pub fn is_flat_clause(c: &Clause) -> bool {
    extension_terms(&c.body).iter().all(|t| t.args().iter().all(|a| a.is_var()))
}

pub fn is_linear_clause(c: &Clause) -> bool {
    let mut owner: BTreeMap<Term, Term> = BTreeMap::new();
    for t in extension_terms(&c.body) {
        let mut seen = BTreeSet::new();
        for a in t.args() {
            if !a.is_var() {
                continue;
            }
            if !seen.insert(a.clone()) {
                return false;
            }
            match owner.get(a) {
                Some(o) if *o != t => return false,
                _ => {
                    owner.insert(a.clone(), t.clone());
                }
            }
        }
    }
    true
}

/// Every clause variable occurs below one of `symbols` (all extension
/// symbols when `symbols` is `None`).
pub fn vars_below(c: &Clause, symbols: Option<&BTreeSet<Name>>) -> bool {
    let mut covered = BTreeSet::new();
    for t in extension_terms(&c.body) {
        if symbols.is_none_or(|s| t.symbol().is_some_and(|f| s.contains(f))) {
            t.visit(&mut |s| {
                if s.is_var() {
                    covered.insert(s.clone());
                }
            });
        }
    }
    c.vars.iter().all(|v| covered.contains(v)) && c.body.free_vars().iter().all(|v| covered.contains(v))
}

/// Flattens a ground goal by naming every non-constant argument of an
/// extension term; returns the flat goal and the naming equations.
pub fn flatten_goal(g: &Formula, supply: &mut NameSupply) -> (Formula, Vec<(Term, Term)>) {
    let mut names: Vec<(Term, Term)> = Vec::new();
    let mut counter = 0usize;
    fn go(t: &Term, supply: &mut NameSupply, names: &mut Vec<(Term, Term)>, counter: &mut usize, as_arg: bool) -> Term {
        let rebuilt = match t.kind() {
            TermKind::App(f, args) => {
                let under = is_extension_app(t);
                let args: Vec<Term> = args.iter().map(|a| go(a, supply, names, counter, under)).collect();
                Term::app(f, args, t.sort().clone())
            }
            _ => t.clone(),
        };
        if as_arg && !(rebuilt.is_const() || rebuilt.as_num().is_some()) {
            if let Some((c, _)) = names.iter().find(|(_, d)| *d == rebuilt) {
                return c.clone();
            }
            *counter += 1;
            let c = supply.fresh_constant(&format!("c{counter}"), rebuilt.sort().clone());
            names.push((c.clone(), rebuilt));
            return c;
        }
        rebuilt
    }
    let flat = g.map_terms(&mut |t| go(t, supply, &mut names, &mut counter, false));
    let defs = names.iter().map(|(c, t)| Formula::eq(c.clone(), t.clone()));
    (Formula::and(defs.chain(std::iter::once(flat))), names)
}

/// Flattens and linearizes a clause: non-variable arguments of extension
/// terms and repeated variables are replaced by fresh variables guarded by
/// equalities in the clause body.
pub fn flatten_clause(c: &Clause) -> Clause {
    let mut supply = NameSupply::default();
    for v in c.vars.iter().chain(c.body.free_vars().iter()) {
        supply.reserve(v.symbol().unwrap_or_default());
    }
    let mut vars = c.vars.clone();
    let mut guards: Vec<Formula> = Vec::new();

    fn flat(t: &Term, supply: &mut NameSupply, vars: &mut Vec<Term>, guards: &mut Vec<Formula>, as_arg: bool) -> Term {
        let rebuilt = match t.kind() {
            TermKind::App(f, args) => {
                let under = is_extension_app(t);
                let args: Vec<Term> = args.iter().map(|a| flat(a, supply, vars, guards, under)).collect();
                Term::app(f, args, t.sort().clone())
            }
            _ => t.clone(),
        };
        if as_arg && !rebuilt.is_var() {
            let z = Term::var(&supply.fresh("z"), rebuilt.sort().clone());
            vars.push(z.clone());
            guards.push(Formula::eq(z.clone(), rebuilt));
            return z;
        }
        rebuilt
    }
    let mut body = c.body.map_terms(&mut |t| flat(t, &mut supply, &mut vars, &mut guards, false));

    // Linearize: a variable may appear in one extension term, once.
    let mut used: BTreeSet<Term> = BTreeSet::new();
    for t in extension_terms(&body) {
        let mut args = Vec::new();
        let mut changed = false;
        for a in t.args() {
            if a.is_var() && !used.insert(a.clone()) {
                let base = format!("{}_", a.symbol().unwrap_or("x"));
                let fresh = Term::var(&supply.fresh(&base), a.sort().clone());
                vars.push(fresh.clone());
                guards.push(Formula::eq(fresh.clone(), a.clone()));
                used.insert(fresh.clone());
                args.push(fresh);
                changed = true;
            } else {
                args.push(a.clone());
            }
        }
        if changed {
            let new = Term::app(t.symbol().unwrap_or_default(), args, t.sort().clone());
            body = body.replace(&t, &new);
        }
    }
    if guards.is_empty() {
        return Clause::new(vars, body);
    }
    let mut parts: Vec<Formula> = guards.into_iter().map(Formula::not).collect();
    parts.push(body);
    Clause::new(vars, Formula::Or(parts))
}

// ---------------------------------------------------------------------------
// Instantiation

fn match_term(pat: &Term, t: &Term, sigma: &mut BTreeMap<Term, Term>) -> bool {
    match pat.kind() {
        TermKind::Var(_) => {
            if pat.sort() != t.sort() {
                return false;
            }
            match sigma.get(pat) {
                Some(b) => b == t,
                None => {
                    sigma.insert(pat.clone(), t.clone());
                    true
                }
            }
        }
        TermKind::App(f, args) => {
            if t.symbol() != Some(&**f)
                || t.args().len() != args.len()
                || !t.is_uninterpreted_app() && pat.is_uninterpreted_app()
            {
                return false;
            }
            let mut local = sigma.clone();
            for (p, a) in args.iter().zip(t.args()) {
                if !match_term(p, a, &mut local) {
                    return false;
                }
            }
            *sigma = local;
            true
        }
        _ => pat == t,
    }
}

/// Ground instances of `axiom` whose trigger terms all lie in `terms`.
pub fn instantiate_axiom(axiom: &Axiom, terms: &BTreeMap<Name, Vec<Term>>) -> Result<Vec<Formula>, LocalityError> {
    let clause = &axiom.clause;
    if clause.vars.is_empty() && clause.body.free_vars().is_empty() {
        return Ok(vec![clause.body.clone()]);
    }
    if !vars_below(clause, Some(&axiom.triggers)) {
        return Err(LocalityError::NotGroundable(clause.to_formula().to_string()));
    }
    let patterns: Vec<Term> = extension_terms(&clause.body)
        .into_iter()
        .filter(|t| !t.is_ground() && t.symbol().is_some_and(|f| axiom.triggers.contains(f)))
        .collect();
    let mut out = Vec::new();
    let mut sigma = BTreeMap::new();
    fn search(
        i: usize,
        patterns: &[Term],
        terms: &BTreeMap<Name, Vec<Term>>,
        sigma: &mut BTreeMap<Term, Term>,
        clause: &Clause,
        out: &mut Vec<Formula>,
    ) -> Result<(), LocalityError> {
        if i == patterns.len() {
            let mut s = Subst::new();
            for (v, t) in sigma.iter() {
                s.insert(v.clone(), t.clone())
                    .map_err(|_| LocalityError::NotGroundable(clause.to_formula().to_string()))?;
            }
            let inst = substitute(clause, &s, true)
                .map_err(|_| LocalityError::NotGroundable(clause.to_formula().to_string()))?;
            out.push(inst);
            return Ok(());
        }
        let f = patterns[i].symbol().unwrap_or_default();
        for cand in terms.get(f).map(Vec::as_slice).unwrap_or_default() {
            let mut local = sigma.clone();
            if match_term(&patterns[i], cand, &mut local) {
                search(i + 1, patterns, terms, &mut local, clause, out)?;
            }
        }
        Ok(())
    }
    search(0, &patterns, terms, &mut sigma, clause, &mut out)?;
    Ok(out)
}

fn index_terms(terms: &BTreeSet<Term>) -> BTreeMap<Name, Vec<Term>> {
    let mut idx: BTreeMap<Name, Vec<Term>> = BTreeMap::new();
    for t in terms {
        if let Some(f) = t.symbol() {
            if is_extension_app(t) {
                idx.entry(Name::from(f)).or_default().push(t.clone());
            }
        }
    }
    idx
}

/// `K[T]`: all ground instances of the axioms whose trigger terms are in
/// `terms`, deduplicated and in canonical order.
pub fn instantiate(axioms: &[Axiom], terms: &BTreeSet<Term>) -> Result<Vec<Formula>, LocalityError> {
    let idx = index_terms(terms);
    let mut out = BTreeSet::new();
    for a in axioms {
        out.extend(instantiate_axiom(a, &idx)?);
    }
    Ok(out.into_iter().collect())
}

// ---------------------------------------------------------------------------
// Purification

/// The result of naming every extension term by a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PurificationResult {
    pub k0: Vec<Formula>,
    pub g0: Formula,
    pub con0: Vec<Formula>,
    /// `(c, f(c₁,…,cₙ))` pairs, in order of introduction.
    pub def: Vec<(Term, Term)>,
    pub introduced: BTreeSet<Term>,
}

impl PurificationResult {
    pub fn def_formula(&self) -> Formula {
        Formula::and(self.def.iter().map(|(c, t)| Formula::eq(c.clone(), t.clone())))
    }

    /// `K₀ ∧ G₀ ∧ Con₀`.
    pub fn base_formula(&self) -> Formula {
        Formula::and(self.k0.iter().cloned().chain(std::iter::once(self.g0.clone())).chain(self.con0.iter().cloned()))
    }

    pub fn term_of(&self, c: &Term) -> Option<&Term> {
        self.def.iter().find(|(d, _)| d == c).map(|(_, t)| t)
    }

    pub fn constant_of(&self, t: &Term) -> Option<&Term> {
        self.def.iter().find(|(_, s)| s == t).map(|(c, _)| c)
    }

    /// Replaces introduced constants by the terms they name.
    pub fn unpurify(&self, f: &Formula) -> Formula {
        let map: BTreeMap<Term, Term> = self.def.iter().cloned().collect();
        fn expand(t: &Term, map: &BTreeMap<Term, Term>) -> Term {
            t.map(&mut |s| map.get(s).map(|d| expand(d, map)))
        }
        f.map_terms(&mut |t| expand(t, &map))
    }
}

fn arg_label(t: &Term) -> String {
    match t.kind() {
        TermKind::Num(v) => format!("n{}", crate::syntax::fmt_rational(v).replace('-', "m").replace('/', "_")),
        _ => t.symbol().unwrap_or("t").to_string(),
    }
}

struct Purifier<'a> {
    supply: &'a mut NameSupply,
    def: Vec<(Term, Term)>,
    by_term: BTreeMap<Term, Term>,
    side: Vec<Formula>,
}

impl Purifier<'_> {
    fn name_app(&mut self, t: &Term) -> Term {
        let args: Vec<Term> = t.args().iter().map(|a| self.name_arg(a)).collect();
        let f = t.symbol().unwrap_or_default();
        let flat = Term::app(f, args.clone(), t.sort().clone());
        if let Some(c) = self.by_term.get(&flat) {
            return c.clone();
        }
        let label: Vec<String> = args.iter().map(arg_label).collect();
        let base = format!("{}_{}", label.join("_"), f);
        let c = self.supply.fresh_constant(&base, t.sort().clone());
        self.by_term.insert(flat.clone(), c.clone());
        self.def.push((c.clone(), flat));
        c
    }

    fn name_arg(&mut self, a: &Term) -> Term {
        if a.is_const() || a.as_num().is_some() {
            return a.clone();
        }
        if is_extension_app(a) {
            return self.name_app(a);
        }
        let inner = self.pure(a);
        let c = self.supply.fresh_constant("t", a.sort().clone());
        self.side.push(Formula::eq(c.clone(), inner));
        c
    }

    fn pure(&mut self, t: &Term) -> Term {
        if is_extension_app(t) {
            return self.name_app(t);
        }
        match t.kind() {
            TermKind::App(f, args) => {
                let args = args.iter().map(|a| self.pure(a)).collect();
                Term::app(f, args, t.sort().clone())
            }
            _ => t.clone(),
        }
    }
}

/// Names every extension term of the ground clauses `k` and goal `g` by a
/// fresh constant and adds the congruence clauses `Con₀`.
pub fn purify(k: &[Formula], g: &Formula, supply: &mut NameSupply) -> PurificationResult {
    let mut p = Purifier { supply, def: Vec::new(), by_term: BTreeMap::new(), side: Vec::new() };
    let g0 = g.map_terms(&mut |t| p.pure(t));
    let mut k0: Vec<Formula> = k.iter().map(|c| c.map_terms(&mut |t| p.pure(t))).collect();
    k0.append(&mut p.side);
    let mut con0 = Vec::new();
    for (i, (c1, t1)) in p.def.iter().enumerate() {
        for (c2, t2) in &p.def[i + 1..] {
            if t1.symbol() != t2.symbol() {
                continue;
            }
            let guards: Vec<Formula> = t1
                .args()
                .iter()
                .zip(t2.args())
                .filter(|(a, b)| a != b)
                .map(|(a, b)| Formula::eq(a.clone(), b.clone()))
                .collect();
            con0.push(Formula::implies(Formula::and(guards), Formula::eq(c1.clone(), c2.clone())));
        }
    }
    let introduced = p.def.iter().map(|(c, _)| c.clone()).collect();
    PurificationResult { k0, g0, con0, def: p.def, introduced }
}

// ---------------------------------------------------------------------------
// Θ partition

/// Extension symbols split by the co-occurrence closure, with the induced
/// clause partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolPartition {
    pub shared: BTreeSet<Name>,
    pub eliminable: BTreeSet<Name>,
    pub irrelevant: BTreeSet<Name>,
    pub k_s: Vec<Axiom>,
    pub k_1: Vec<Axiom>,
    pub k_i: Vec<Axiom>,
}

struct Classes {
    parent: BTreeMap<Name, Name>,
}

impl Classes {
    fn find(&mut self, n: &Name) -> Name {
        let p = self.parent.get(n).cloned().unwrap_or_else(|| n.clone());
        if &p == n {
            return p;
        }
        let r = self.find(&p);
        self.parent.insert(n.clone(), r.clone());
        r
    }

    fn union(&mut self, a: &Name, b: &Name) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent.insert(hi, lo);
        }
    }
}

/// `Θ_K(start)`: every symbol linked to `start` by a chain of axioms in
/// which consecutive symbols co-occur.
pub fn theta(axioms: &[Axiom], start: &BTreeSet<Name>) -> BTreeSet<Name> {
    let mut cl = Classes { parent: BTreeMap::new() };
    let mut all: BTreeSet<Name> = start.clone();
    for a in axioms {
        let syms: Vec<Name> = a.symbols().into_iter().collect();
        all.extend(syms.iter().cloned());
        for w in syms.windows(2) {
            cl.union(&w[0], &w[1]);
        }
    }
    let roots: BTreeSet<Name> = start.iter().map(|s| cl.find(s)).collect();
    all.into_iter().filter(|s| roots.contains(&cl.find(s))).collect()
}

/// Splits the extension symbols into the closed shared set
/// `Σ'_s = Θ(Σ_s)`, the eliminable set `Θ(Σ_e) \ Σ'_s` (with `Σ_e` the
/// other symbols of the goal) and the rest, and the axioms accordingly.
pub fn theta_closure(
    axioms: &[Axiom],
    functions: &BTreeSet<Name>,
    shared: &BTreeSet<Name>,
    goal_symbols: &BTreeSet<Name>,
) -> SymbolPartition {
    let s = theta(axioms, shared);
    let e_start: BTreeSet<Name> = goal_symbols.difference(&s).cloned().collect();
    let e: BTreeSet<Name> = theta(axioms, &e_start).difference(&s).cloned().collect();
    let mut all: BTreeSet<Name> = functions.clone();
    for a in axioms {
        all.extend(a.symbols());
    }
    let irrelevant: BTreeSet<Name> = all.iter().filter(|f| !s.contains(*f) && !e.contains(*f)).cloned().collect();
    let (mut k_s, mut k_1, mut k_i) = (Vec::new(), Vec::new(), Vec::new());
    for a in axioms {
        let syms = a.symbols();
        if syms.is_empty() {
            k_i.push(a.clone());
        } else if syms.is_subset(&s) {
            k_s.push(a.clone());
        } else if syms.is_subset(&e) {
            k_1.push(a.clone());
        } else {
            k_i.push(a.clone());
        }
    }
    SymbolPartition { shared: s, eliminable: e, irrelevant, k_s, k_1, k_i }
}

/// The finite instance set of the two-sorted fragment: every shared
/// function applied to element-sorted constants. Checks the signature
/// conditions on the way.
pub fn tame_instance_set(
    sig: &Signature,
    partition: &SymbolPartition,
    constants: &BTreeSet<Term>,
) -> Result<BTreeSet<Term>, LocalityError> {
    for f in partition.shared.iter().chain(partition.eliminable.iter()) {
        let Some(d) = sig.function(f) else { continue };
        if !d.args.is_empty() && !d.ret.is_numeric() {
            return Err(LocalityError::Tame {
                condition: "(A2)(a)",
                detail: format!("function {f} has non-numeric output sort {}", d.ret),
            });
        }
    }
    for f in &partition.shared {
        let Some(d) = sig.function(f) else { continue };
        if let Some(s) = d.args.iter().find(|s| s.is_numeric()) {
            return Err(LocalityError::Tame {
                condition: "(A2)(b)",
                detail: format!("shared function {f} takes an argument of sort {s}"),
            });
        }
    }
    for c in constants {
        if !c.is_numeric() && !c.is_const() {
            return Err(LocalityError::Tame {
                condition: "(A2)(c)",
                detail: format!("element-sorted term {c} is not a constant"),
            });
        }
    }
    for a in partition.k_s.iter().chain(partition.k_1.iter()) {
        if !vars_below(&a.clause, None) {
            return Err(LocalityError::Tame {
                condition: "(A2)",
                detail: format!("variable not below an extension symbol in {}", a.clause.to_formula()),
            });
        }
    }
    let mut by_sort: BTreeMap<Sort, Vec<Term>> = BTreeMap::new();
    for c in constants {
        if !c.is_numeric() {
            by_sort.entry(c.sort().clone()).or_default().push(c.clone());
        }
    }
    let mut out = BTreeSet::new();
    for f in &partition.shared {
        let Some(d) = sig.function(f) else { continue };
        let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
        for s in &d.args {
            let options = by_sort.get(s).cloned().unwrap_or_default();
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    options.iter().map(move |o| {
                        let mut t = t.clone();
                        t.push(o.clone());
                        t
                    })
                })
                .collect();
        }
        for args in tuples {
            out.insert(Term::app(f, args, d.ret.clone()));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Term closure operators

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosureOperator {
    Identity,
    /// Layered instantiation: the terms produced by instantiating a layer's
    /// axioms feed the layers below it.
    Chain {
        layers: Vec<BTreeSet<Name>>,
    },
    /// Every defined-symbol term `f(t̄)` brings in `g(t̄')` for all defined
    /// and free symbols `g` and all argument tuples drawn from `t̄`.
    Definability {
        defined: BTreeSet<Name>,
        free: BTreeSet<Name>,
        decls: BTreeMap<Name, FunctionDecl>,
    },
}

impl ClosureOperator {
    pub fn for_shape(ext: &ExtensionSpec) -> ClosureOperator {
        match ext.shape {
            Shape::Chain => ClosureOperator::Chain { layers: ext.layers.clone() },
            Shape::Single | Shape::Tame => ClosureOperator::Identity,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ClosureOperator::Identity => "identity",
            ClosureOperator::Chain { .. } => "chain",
            ClosureOperator::Definability { .. } => "definability",
        }
    }

    /// `Ψ(T)`, including the ground extension terms of the axioms.
    pub fn apply(&self, axioms: &[Axiom], t: &BTreeSet<Term>) -> Result<BTreeSet<Term>, LocalityError> {
        let mut s = t.clone();
        s.extend(est(axioms.iter().map(|a| &a.clause), &Formula::True));
        match self {
            ClosureOperator::Identity => Ok(s),
            ClosureOperator::Chain { layers } => {
                const MAX_ROUNDS: usize = 64;
                for _ in 0..MAX_ROUNDS {
                    let before = s.len();
                    for layer in layers {
                        let own: Vec<Axiom> = axioms
                            .iter()
                            .filter(|a| !a.triggers.is_empty() && a.triggers.is_subset(layer))
                            .cloned()
                            .collect();
                        for inst in instantiate(&own, &s)? {
                            s.extend(est(std::iter::empty(), &inst));
                        }
                    }
                    if s.len() == before {
                        break;
                    }
                }
                Ok(s)
            }
            ClosureOperator::Definability { defined, free, decls } => {
                let mut out = s.clone();
                for term in &s {
                    let Some(f) = term.symbol() else { continue };
                    if !defined.contains(f) || !is_extension_app(term) {
                        continue;
                    }
                    let pool: Vec<Term> = term.args().to_vec();
                    for g in defined.iter().chain(free.iter()) {
                        let Some(d) = decls.get(g) else { continue };
                        let mut tuples: Vec<Vec<Term>> = vec![Vec::new()];
                        for sort in &d.args {
                            let opts: Vec<Term> = pool.iter().filter(|p| p.sort() == sort).cloned().collect();
                            tuples = tuples
                                .into_iter()
                                .flat_map(|t| {
                                    opts.iter().map(move |o| {
                                        let mut t = t.clone();
                                        t.push(o.clone());
                                        t
                                    })
                                })
                                .collect();
                        }
                        for args in tuples {
                            if !args.is_empty() {
                                out.insert(Term::app(g, args, d.ret.clone()));
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Outcome of a hierarchical satisfiability check with the intermediate
/// artifacts.
#[derive(Clone, Debug)]
pub struct HierarchicalOutcome {
    pub result: SatResult,
    pub terms: BTreeSet<Term>,
    pub instances: Vec<Formula>,
    pub purified: PurificationResult,
}

/// Decides `T₀ ∪ K ∪ G` for ground `G` by instantiating `K` over
/// `Ψ(est(K, G))`, purifying and running the ground solver.
pub fn hierarchical_check_sat(
    axioms: &[Axiom],
    g: &Formula,
    psi: &ClosureOperator,
) -> Result<HierarchicalOutcome, LocalityError> {
    let t = est(axioms.iter().map(|a| &a.clause), g);
    let terms = psi.apply(axioms, &t)?;
    let instances = instantiate(axioms, &terms)?;
    let mut supply = NameSupply::default();
    g.for_each_subterm(&mut |s| {
        if let Some(n) = s.symbol() {
            supply.reserve(n);
        }
    });
    for i in &instances {
        i.for_each_subterm(&mut |s| {
            if let Some(n) = s.symbol() {
                supply.reserve(n);
            }
        });
    }
    let purified = purify(&instances, g, &mut supply);
    let result = ground::check_sat(&purified.base_formula())?;
    Ok(HierarchicalOutcome { result, terms, instances, purified })
}

/// `axioms ∧ premise ⊨ goal` via the hierarchical check.
pub fn hierarchical_entails(
    axioms: &[Axiom],
    premise: &Formula,
    goal: &Formula,
    psi: &ClosureOperator,
) -> Result<bool, LocalityError> {
    let q = Formula::and([premise.clone(), Formula::not(goal.clone())]);
    Ok(hierarchical_check_sat(axioms, &q, psi)?.result.is_unsat())
}

/// Entailment modulo a set of axioms, for [`crate::qe::simplify`].
pub struct AxiomOracle<'a> {
    pub axioms: &'a [Axiom],
    pub psi: ClosureOperator,
}

impl crate::qe::Oracle for AxiomOracle<'_> {
    fn entails(&self, premise: &Formula, goal: &Formula) -> bool {
        hierarchical_entails(self.axioms, premise, goal, &self.psi).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_problem;

    const CHAIN: &str = "(problem
      (functions (f (rat) rat) (g (rat) rat))
      (constants (c rat))
      (axioms
        (forall ((x rat)) (=> (<= x 3) (= (g x) (f x))))
        (forall ((x rat)) (=> (> x 3) (= (f x) x)))
        (forall ((x rat)) (= (* 3 x) (g x))))
      (locality (shape chain) (layers (f) (g)))
      (goal (and (not (= (f c) (* 3 c))) (not (= (f c) c))))
      (task check-sat))";

    #[test]
    fn chain_closure_and_verdict() {
        let p = parse_problem(CHAIN).unwrap();
        let psi = ClosureOperator::for_shape(&p.ext);
        let out = hierarchical_check_sat(&p.ext.axioms, &p.goal, &psi).unwrap();
        let names: Vec<String> = out.terms.iter().map(|t| t.to_string()).collect();
        assert_eq!(names, vec!["(f c)", "(g c)"]);
        assert!(out.result.is_unsat());
    }

    #[test]
    fn est_of_top_layer() {
        let p = parse_problem(CHAIN).unwrap();
        let top: Vec<Clause> = p.ext.axioms[..2].iter().map(|a| a.clause.clone()).collect();
        let t = est(&top, &p.goal);
        assert_eq!(t.len(), 1);
        assert_eq!(t.iter().next().unwrap().to_string(), "(f c)");
        assert!(est(&[], &Formula::True).is_empty());
    }

    #[test]
    fn instances_of_top_layer() {
        let p = parse_problem(CHAIN).unwrap();
        let t: BTreeSet<Term> = est(std::iter::empty(), &p.goal);
        let inst = instantiate(&p.ext.axioms[..2], &t).unwrap();
        let shown: Vec<String> = inst.iter().map(|f| f.to_string()).collect();
        assert_eq!(shown, vec!["(=> (<= c 3) (= (g c) (f c)))", "(=> (< 3 c) (= (f c) c))"]);
        assert!(instantiate(&p.ext.axioms, &BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn purify_names_by_argument() {
        let src = "(problem (functions (f (rat) rat) (g (rat) rat)) (constants (a rat) (b rat) (e rat))
          (goal (and (<= a (f e)) (<= e (g b)) (<= (g b) a) (<= (f e) (g b)))))";
        let p = parse_problem(src).unwrap();
        let mut supply = NameSupply::new(&p.sig);
        let r = purify(&[], &p.goal, &mut supply);
        let defs: Vec<String> = r.def.iter().map(|(c, t)| format!("{c}={t}")).collect();
        assert_eq!(defs, vec!["e_f=(f e)", "b_g=(g b)"]);
        assert_eq!(r.g0.to_string(), "(and (<= a e_f) (<= e b_g) (<= b_g a) (<= e_f b_g))");
        assert!(r.con0.is_empty());
        assert_eq!(r.unpurify(&r.g0), p.goal);
    }

    #[test]
    fn congruence_clauses_per_pair() {
        let src = "(problem (functions (f (rat) rat)) (constants (a rat) (b rat)) (goal (< (f a) (f b))))";
        let p = parse_problem(src).unwrap();
        let r = purify(&[], &p.goal, &mut NameSupply::new(&p.sig));
        assert_eq!(r.con0.len(), 1);
        assert_eq!(r.con0[0].to_string(), "(=> (= a b) (= a_f b_f))");
    }

    #[test]
    fn flattening_names_nested_arguments() {
        let src =
            "(problem (functions (f (rat) rat) (g (rat) rat)) (constants (a rat) (b rat)) (goal (<= (f (g b)) a)))";
        let p = parse_problem(src).unwrap();
        let (flat, names) = flatten_goal(&p.goal, &mut NameSupply::new(&p.sig));
        assert_eq!(flat.to_string(), "(and (= c1 (g b)) (<= (f c1) a))");
        assert_eq!(names.len(), 1);
    }

    #[test]
    fn linearization_adds_guards() {
        let x = Term::var("x", Sort::rat());
        let fxx = Term::app("f", vec![x.clone(), x.clone()], Sort::rat());
        let c = Clause::new(vec![x.clone()], Formula::le(fxx, x));
        assert!(!is_linear_clause(&c));
        let l = flatten_clause(&c);
        assert!(is_linear_clause(&l) && is_flat_clause(&l));
        assert_eq!(l.to_formula().to_string(), "(forall ((x rat) (x_ rat)) (or (not (= x_ x)) (<= (f x x_) x)))");
    }

    #[test]
    fn monotonicity_instance_closes() {
        let src = "(problem (functions (f (rat) rat)) (constants (a rat) (b rat))
          (axioms (forall ((x rat) (y rat)) (=> (<= x y) (<= (f x) (f y)))))
          (goal (and (<= a b) (< (f b) (f a)))))";
        let p = parse_problem(src).unwrap();
        let out = hierarchical_check_sat(&p.ext.axioms, &p.goal, &ClosureOperator::Identity).unwrap();
        assert!(out.result.is_unsat());
    }
}
