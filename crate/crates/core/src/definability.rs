//! Implicit and explicit definability of extension functions over the base
//! theory plus a set of free function symbols.
//!
//! A function `f` is implicitly definable when two interpretations agreeing
//! on the base signature and the free symbols must agree on `f`; this is
//! checked by renaming the defined symbols and refuting `f(ā) ≉ f′(ā)`.
//! An explicit definition `F_f(x̄, y)` is extracted by eliminating the
//! defined symbols from `f(ā) ≈ b` and then covering away every constant
//! other than `ā, b`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cover::{self, CoverError, CoverOptions};
use crate::elim::{self, ElimError, EliminationTask};
use crate::locality::{self, ClosureOperator, LocalityError};
use crate::syntax::{Axiom, Clause, Formula, FunctionDecl, Name, NameSupply, Problem, Signature, Term, TermKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DefError {
    #[error("{0} is not a declared function")]
    UnknownSymbol(Name),
    #[error("{0} is free, so it has no definition")]
    FreeSymbol(Name),
    #[error("{0} is not implicitly definable over the base theory and the free symbols")]
    NotDefinable(Name),
    #[error("candidate definition {candidate} of {symbol} does not follow from the axioms")]
    Claim1Failed { symbol: Name, candidate: String },
    #[error("candidate definition {candidate} of {symbol} does not determine it")]
    Claim2Failed { symbol: Name, candidate: String },
    #[error("no definition given for {0}")]
    MissingDefinition(Name),
    #[error(transparent)]
    Locality(#[from] LocalityError),
    #[error(transparent)]
    Elim(#[from] ElimError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// The axioms split into free symbols `Σ_f` (those no axiom is triggered
/// by) and defined symbols `Σ_d`.
#[derive(Clone, Debug)]
pub struct DefinabilityTask {
    pub axioms: Vec<Axiom>,
    pub free: BTreeSet<Name>,
    pub defined: BTreeSet<Name>,
    pub decls: BTreeMap<Name, FunctionDecl>,
}

impl DefinabilityTask {
    pub fn new(sig: &Signature, axioms: Vec<Axiom>) -> DefinabilityTask {
        let defined: BTreeSet<Name> = axioms.iter().flat_map(|a| a.triggers.iter().cloned()).collect();
        let free = sig.functions.keys().filter(|f| !defined.contains(*f)).cloned().collect();
        DefinabilityTask { axioms, free, defined, decls: sig.functions.clone() }
    }

    pub fn from_problem(p: &Problem) -> DefinabilityTask {
        DefinabilityTask::new(&p.sig, p.ext.axioms.clone())
    }

    /// The closure that adds every defined or free symbol applied to the
    /// arguments of each defined-symbol term.
    pub fn closure(&self) -> ClosureOperator {
        ClosureOperator::Definability {
            defined: self.defined.clone(),
            free: self.free.clone(),
            decls: self.decls.clone(),
        }
    }

    fn target(&self, f: &str) -> Result<&FunctionDecl, DefError> {
        let d = self.decls.get(f).ok_or_else(|| DefError::UnknownSymbol(Name::from(f)))?;
        if !self.defined.contains(f) {
            return Err(DefError::FreeSymbol(Name::from(f)));
        }
        Ok(d)
    }
}

fn rename_term(t: &Term, map: &BTreeMap<Name, Name>) -> Term {
    match t.kind() {
        TermKind::App(f, args) => {
            let args = args.iter().map(|a| rename_term(a, map)).collect();
            let f = map.get(f).unwrap_or(f);
            Term::app(f, args, t.sort().clone())
        }
        _ => t.clone(),
    }
}

/// Renames function symbols throughout a formula.
pub fn rename_functions(f: &Formula, map: &BTreeMap<Name, Name>) -> Formula {
    f.map_terms(&mut |t| rename_term(t, map))
}

/// The primed name of a defined symbol, in the reserved namespace.
pub fn primed(f: &str) -> Name {
    Name::from(format!("{f}!p"))
}

/// `K′`: the axioms with every defined symbol replaced by its primed copy.
pub fn primed_axioms(task: &DefinabilityTask) -> (Vec<Axiom>, BTreeMap<Name, Name>) {
    let map: BTreeMap<Name, Name> = task.defined.iter().map(|f| (f.clone(), primed(f))).collect();
    let axioms = task
        .axioms
        .iter()
        .map(|a| Axiom {
            clause: Clause::new(a.clause.vars.clone(), rename_functions(&a.clause.body, &map)),
            triggers: a.triggers.iter().map(|f| map.get(f).cloned().unwrap_or_else(|| f.clone())).collect(),
        })
        .collect();
    (axioms, map)
}

fn skolem_args(decl: &FunctionDecl) -> Vec<Term> {
    decl.args.iter().enumerate().map(|(i, s)| Term::constant(&format!("sk!{i}"), s.clone())).collect()
}

/// Decides whether `f` is implicitly definable: `K ∪ K′ ∪ {f(ā) ≉ f′(ā)}`
/// must be unsatisfiable.
pub fn check_implicit_definable(task: &DefinabilityTask, f: &str) -> Result<bool, DefError> {
    let decl = task.target(f)?;
    let (primed_ax, map) = primed_axioms(task);
    let mut axioms = task.axioms.clone();
    axioms.extend(primed_ax);
    let mut defined = task.defined.clone();
    let mut decls = task.decls.clone();
    for (orig, p) in &map {
        defined.insert(p.clone());
        if let Some(d) = task.decls.get(orig) {
            decls.insert(p.clone(), FunctionDecl { name: p.clone(), ..d.clone() });
        }
    }
    let psi = ClosureOperator::Definability { defined, free: task.free.clone(), decls };
    let args = skolem_args(decl);
    let lhs = Term::app(f, args.clone(), decl.ret.clone());
    let rhs = Term::app(&primed(f), args, decl.ret.clone());
    let out = locality::hierarchical_check_sat(&axioms, &Formula::ne(lhs, rhs), &psi)?;
    Ok(out.result.is_unsat())
}

/// `F_f(x̄, y)`: a formula over the base signature and the free symbols
/// equivalent to `f(x̄) ≈ y` modulo the axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitDefinition {
    pub symbol: Name,
    pub params: Vec<Term>,
    pub result: Term,
    pub formula: Formula,
}

impl ExplicitDefinition {
    /// `F_f(args, value)`.
    pub fn apply(&self, args: &[Term], value: &Term) -> Formula {
        let mut out = self.formula.clone();
        // Through reserved constants so that arguments mentioning the
        // parameter names are not captured.
        let tmp: Vec<Term> = self
            .params
            .iter()
            .chain(std::iter::once(&self.result))
            .enumerate()
            .map(|(i, v)| Term::constant(&format!("arg!{i}"), v.sort().clone()))
            .collect();
        for (v, t) in self.params.iter().chain(std::iter::once(&self.result)).zip(&tmp) {
            out = out.replace(v, t);
        }
        for (t, a) in tmp.iter().zip(args.iter().chain(std::iter::once(value))) {
            out = out.replace(t, a);
        }
        out
    }
}

impl fmt::Display for ExplicitDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(define {} (", self.symbol)?;
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "({p} {})", p.sort())?;
        }
        write!(f, ") ({} {}) {})", self.result, self.result.sort(), self.formula)
    }
}

/// Extracts `F_f` and checks both directions of `F_f(ā, b) ↔ f(ā) ≈ b`.
pub fn extract_definition(task: &DefinabilityTask, f: &str) -> Result<ExplicitDefinition, DefError> {
    let decl = task.target(f)?.clone();
    if !check_implicit_definable(task, f)? {
        return Err(DefError::NotDefinable(Name::from(f)));
    }
    let args = skolem_args(&decl);
    let b = Term::constant("sk!y", decl.ret.clone());
    let app = Term::app(f, args.clone(), decl.ret.clone());
    let goal = Formula::eq(app.clone(), b.clone());

    let psi = task.closure();
    let terms = psi.apply(&task.axioms, &locality::est(task.axioms.iter().map(|a| &a.clause), &goal))?;
    let keep: BTreeSet<Term> = args.iter().cloned().chain(std::iter::once(b.clone())).collect();
    let report = elim::eliminate_functions(&EliminationTask {
        axioms: &task.axioms,
        goal: &goal,
        terms,
        shared: task.free.clone(),
        keep: keep.clone(),
        context: &[],
        trace: false,
    })?;
    let candidate = if report.gamma.constants().is_subset(&keep) {
        report.gamma
    } else {
        cover::cover_formula(&report.gamma, &keep, &CoverOptions::default())?
    };

    let claim1 = Formula::and([goal.clone(), Formula::not(candidate.clone())]);
    if !locality::hierarchical_check_sat(&task.axioms, &claim1, &psi)?.result.is_unsat() {
        return Err(DefError::Claim1Failed { symbol: Name::from(f), candidate: candidate.to_string() });
    }
    let claim2 = Formula::and([candidate.clone(), Formula::ne(app, b.clone())]);
    if !locality::hierarchical_check_sat(&task.axioms, &claim2, &psi)?.result.is_unsat() {
        return Err(DefError::Claim2Failed { symbol: Name::from(f), candidate: candidate.to_string() });
    }

    let params: Vec<Term> =
        decl.args.iter().enumerate().map(|(i, s)| Term::var(&format!("x{}", i + 1), s.clone())).collect();
    let result = Term::var("y", decl.ret.clone());
    let mut formula = candidate;
    for (a, x) in args.iter().zip(&params) {
        formula = formula.replace(a, x);
    }
    formula = formula.replace(&b, &result);
    Ok(ExplicitDefinition { symbol: Name::from(f), params, result, formula })
}

/// Replaces every defined-symbol term by a fresh name `dᵢ` constrained by
/// its definition, innermost terms first. Returns the rewritten body and
/// the names with the terms they stand for.
pub fn rewrite_body(
    gamma: &Formula,
    defs: &[ExplicitDefinition],
    as_vars: bool,
    supply: &mut NameSupply,
) -> Result<(Formula, Vec<(Term, Term)>), DefError> {
    let by_symbol: BTreeMap<&str, &ExplicitDefinition> = defs.iter().map(|d| (&*d.symbol, d)).collect();
    let mut targets = BTreeSet::new();
    gamma.for_each_subterm(&mut |t| {
        if t.is_uninterpreted_app() && t.symbol().is_some_and(|f| by_symbol.contains_key(f)) {
            targets.insert(t.clone());
        }
    });
    let mut names: Vec<(Term, Term)> = Vec::new();
    let mut body = gamma.clone();
    let mut constraints = Vec::new();
    let mut pending: Vec<Term> = targets.into_iter().collect();
    pending.sort_by_key(|t| (t.depth(), t.clone()));
    let mut counter = 0;
    for t in pending {
        // Earlier (inner) names are already substituted into the term.
        let mut cur = t.clone();
        for (d, s) in &names {
            cur = cur.replace(s, d);
        }
        let f = cur.symbol().unwrap_or_default();
        let def = by_symbol.get(f).ok_or_else(|| DefError::MissingDefinition(Name::from(f)))?;
        counter += 1;
        let n = supply.fresh(&format!("d{counter}"));
        let d = if as_vars { Term::var(&n, cur.sort().clone()) } else { Term::constant(&n, cur.sort().clone()) };
        constraints.push(def.apply(cur.args(), &d));
        body = body.replace(&cur, &d);
        names.push((d, t));
    }
    Ok((Formula::and(std::iter::once(body).chain(constraints)), names))
}

/// `Γ″`: `Γ` with defined-symbol terms replaced by existentially bound
/// names constrained by their definitions.
pub fn rewrite_with_definitions(gamma: &Formula, defs: &[ExplicitDefinition]) -> Result<Formula, DefError> {
    let (vars, body) = match gamma {
        Formula::Exists(vs, b) => (vs.clone(), (**b).clone()),
        other => (Vec::new(), other.clone()),
    };
    let mut supply = NameSupply::default();
    gamma.for_each_subterm(&mut |t| {
        if let Some(n) = t.symbol() {
            supply.reserve(n);
        }
    });
    vars.iter().filter_map(Term::symbol).for_each(|n| supply.reserve(n));
    let (rewritten, names) = rewrite_body(&body, defs, true, &mut supply)?;
    if names.is_empty() {
        return Ok(gamma.clone());
    }
    let mut bound: Vec<Term> = names.into_iter().map(|(d, _)| d).collect();
    bound.extend(vars);
    Ok(Formula::Exists(bound, Box::new(rewritten)))
}
