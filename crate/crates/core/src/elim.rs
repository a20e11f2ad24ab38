//! Elimination of extension function symbols outside the shared set by
//! instantiation, purification and quantifier elimination over the
//! constants not protected by shared-symbol argument positions.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::locality::{self, AxiomOracle, ClosureOperator, LocalityError, PurificationResult};
use crate::qe::{self, ExistentialBlock, QeError};
use crate::syntax::{Axiom, Formula, Name, NameSupply, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElimError {
    #[error(transparent)]
    Locality(#[from] LocalityError),
    #[error(transparent)]
    Qe(#[from] QeError),
    #[error("internal: {0}")]
    Inconsistent(String),
}

/// Constants of `K₀ ∧ G₀ ∧ Con₀` split by their role.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantClassification {
    /// Kept constants and constants naming shared-function terms.
    pub c_f: BTreeSet<Term>,
    /// Arguments of shared-function terms in the definitions.
    pub c_p: BTreeSet<Term>,
    /// Everything else; these are eliminated.
    pub c: BTreeSet<Term>,
}

pub fn classify_constants(
    pr: &PurificationResult,
    shared: &BTreeSet<Name>,
    keep: &BTreeSet<Term>,
) -> ConstantClassification {
    let all = pr.base_formula().constants();
    let mut c_f: BTreeSet<Term> = keep.clone();
    let mut args = BTreeSet::new();
    for (c, t) in &pr.def {
        if t.symbol().is_some_and(|f| shared.contains(f)) {
            c_f.insert(c.clone());
            args.extend(t.args().iter().filter(|a| a.is_const()).cloned());
        }
    }
    let c_p: BTreeSet<Term> = args.difference(&c_f).cloned().collect();
    let c = all.into_iter().filter(|x| !c_f.contains(x) && !c_p.contains(x)).collect();
    ConstantClassification { c_f, c_p, c }
}

/// Inputs of one elimination run.
#[derive(Clone, Debug)]
pub struct EliminationTask<'a> {
    /// The axioms instantiated over `terms`.
    pub axioms: &'a [Axiom],
    pub goal: &'a Formula,
    /// Instance terms; must contain `est(axioms, goal)`.
    pub terms: BTreeSet<Term>,
    pub shared: BTreeSet<Name>,
    pub keep: BTreeSet<Term>,
    /// Axioms over the shared symbols used to drop implied conjuncts.
    pub context: &'a [Axiom],
    pub trace: bool,
}

#[derive(Clone, Debug)]
pub struct EliminationTrace {
    pub instances: Vec<Formula>,
    pub purification: PurificationResult,
    pub classification: ConstantClassification,
    pub gamma1: Formula,
}

#[derive(Clone, Debug)]
pub struct EliminationReport {
    pub gamma: Formula,
    /// The kept constants together with the shared-argument constants.
    pub kept: BTreeSet<Term>,
    pub trace: Option<EliminationTrace>,
}

fn reserve_symbols(supply: &mut NameSupply, f: &Formula) {
    f.for_each_subterm(&mut |t| {
        if let Some(n) = t.symbol() {
            supply.reserve(n);
        }
    });
}

pub fn eliminate_functions(task: &EliminationTask) -> Result<EliminationReport, ElimError> {
    let instances = locality::instantiate(task.axioms, &task.terms)?;
    let mut supply = NameSupply::default();
    reserve_symbols(&mut supply, task.goal);
    instances.iter().for_each(|i| reserve_symbols(&mut supply, i));
    task.keep.iter().filter_map(Term::symbol).for_each(|n| supply.reserve(n));
    let pr = locality::purify(&instances, task.goal, &mut supply);
    let cls = classify_constants(&pr, &task.shared, &task.keep);

    let block = ExistentialBlock::new(cls.c.iter().cloned().collect(), pr.base_formula());
    let gamma1 = qe::eliminate_quantifiers(&block)?;

    // Only the shared-function names are replaced back.
    let back: BTreeMap<Term, Term> =
        pr.def.iter().filter(|(_, t)| t.symbol().is_some_and(|f| task.shared.contains(f))).cloned().collect();
    fn expand(t: &Term, back: &BTreeMap<Term, Term>) -> Term {
        t.map(&mut |s| back.get(s).map(|d| expand(d, back)))
    }
    let replaced = gamma1.map_terms(&mut |t| expand(t, &back));
    let oracle = AxiomOracle { axioms: task.context, psi: ClosureOperator::Identity };
    let gamma = qe::simplify(&replaced, &oracle);

    let kept: BTreeSet<Term> = task.keep.iter().chain(cls.c_p.iter()).cloned().collect();
    let stray: Vec<String> =
        gamma.constants().into_iter().filter(|c| !kept.contains(c)).map(|c| c.to_string()).collect();
    if !stray.is_empty() {
        return Err(ElimError::Inconsistent(format!("constants {} survive elimination", stray.join(", "))));
    }
    if let Some(f) = gamma.function_symbols().into_iter().find(|f| !task.shared.contains(f)) {
        return Err(ElimError::Inconsistent(format!("function {f} survives elimination")));
    }
    let trace = task.trace.then_some(EliminationTrace { instances, purification: pr, classification: cls, gamma1 });
    Ok(EliminationReport { gamma, kept, trace })
}
