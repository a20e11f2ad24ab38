//! End-to-end computation of general uniform interpolants: fragment
//! detection, dispatch to the elimination and cover phases, verification
//! and the report format shared by the command-line tool.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::cover::{self, CoverError, CoverOptions, VerifyReport};
use crate::definability::{self, DefError, DefinabilityTask, ExplicitDefinition};
use crate::elim::{self, ElimError, EliminationTask};
use crate::ground::SatResult;
use crate::locality::{self, ClosureOperator, LocalityError, SymbolPartition};
use crate::syntax::{Atom, Axiom, Formula, Name, NameSupply, Problem, Task, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Locality(#[from] LocalityError),
    #[error(transparent)]
    Elim(#[from] ElimError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Definability(#[from] DefError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentTag {
    /// No axioms and no function symbol to eliminate.
    Uif,
    /// No axiom constrains the shared symbols.
    Disjoint,
    /// Two-sorted: shared symbols take element arguments only.
    Tame,
    /// Every kept axiomatized symbol is definable over the free ones.
    Definable,
    Unsupported(String),
}

impl FragmentTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            FragmentTag::Uif => "uif",
            FragmentTag::Disjoint => "disjoint",
            FragmentTag::Tame => "tame",
            FragmentTag::Definable => "definable",
            FragmentTag::Unsupported(_) => "unsupported",
        }
    }
}

impl fmt::Display for FragmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentTag::Unsupported(r) => write!(f, "unsupported: {r}"),
            other => f.write_str(other.as_str()),
        }
    }
}

/// Which pipeline to run; `Auto` detects it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FragmentChoice {
    #[default]
    Auto,
    Uif,
    Tame,
    Definable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    pub fragment: FragmentChoice,
    pub verify: bool,
    /// Depth of the bounded cover check; the default bound when `None`.
    pub depth: Option<usize>,
    pub trace: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { fragment: FragmentChoice::Auto, verify: true, depth: None, trace: false }
    }
}

/// Splits the problem's extension symbols and axioms by co-occurrence.
pub fn analyze(p: &Problem) -> SymbolPartition {
    let functions: BTreeSet<Name> = p.sig.functions.keys().cloned().collect();
    locality::theta_closure(&p.ext.axioms, &functions, &p.shared_functions(), &p.goal.function_symbols())
}

/// `f` when the axiom is `x ≤ y → f(x) ≤ f(y)` (in any clausal form).
pub fn monotone_symbol(a: &Axiom) -> Option<Name> {
    let c = &a.clause;
    if c.vars.len() != 2 || !c.vars.iter().all(Term::is_numeric) {
        return None;
    }
    let lits = match c.body.nnf() {
        Formula::Or(parts) => parts.iter().map(Formula::as_literal).collect::<Option<Vec<_>>>()?,
        _ => return None,
    };
    if lits.len() != 2 {
        return None;
    }
    let (x, y) = (&c.vars[0], &c.vars[1]);
    let premise = |x: &Term, y: &Term| {
        lits.iter().any(|l| match &l.atom {
            Atom::Le(a, b) => !l.positive && a == x && b == y,
            Atom::Lt(a, b) => l.positive && a == y && b == x,
            _ => false,
        })
    };
    let conclusion = |x: &Term, y: &Term| {
        lits.iter().find_map(|l| match &l.atom {
            Atom::Le(fa, fb)
                if l.positive
                    && fa.is_uninterpreted_app()
                    && fa.symbol() == fb.symbol()
                    && fa.args() == [x.clone()]
                    && fb.args() == [y.clone()] =>
            {
                fa.symbol().map(Name::from)
            }
            _ => None,
        })
    };
    if premise(x, y) {
        if let Some(f) = conclusion(x, y) {
            return Some(f);
        }
    }
    if premise(y, x) {
        return conclusion(y, x);
    }
    None
}

/// A kept monotone function applied to an eliminated numeric constant can
/// be iterated into infinitely many independent consequences.
fn monotone_guard(p: &Problem, part: &SymbolPartition) -> Option<String> {
    let keep = p.shared_constants();
    for a in &p.ext.axioms {
        let Some(f) = monotone_symbol(a) else { continue };
        if !part.shared.contains(&f) {
            continue;
        }
        let mut bad = BTreeSet::new();
        p.goal.for_each_subterm(&mut |t| {
            if t.symbol() == Some(&*f) && t.is_uninterpreted_app() {
                for arg in t.args() {
                    if arg.is_const() && arg.is_numeric() && !keep.contains(arg) {
                        bad.insert(arg.clone());
                    }
                }
            }
        });
        if let Some(b) = bad.into_iter().next() {
            return Some(format!(
                "monotonicity axiom over kept function {f} with eliminated argument constant {b}: \
                 iterating {f} gives infinitely many independent consequences, so a cover may not exist"
            ));
        }
    }
    None
}

fn kept_defined(p: &Problem, part: &SymbolPartition) -> (DefinabilityTask, Vec<Name>) {
    let task = DefinabilityTask::from_problem(p);
    let kept = part.shared.iter().filter(|f| task.defined.contains(*f)).cloned().collect();
    (task, kept)
}

fn definable_reason(p: &Problem, part: &SymbolPartition) -> Result<(), String> {
    let (task, kept) = kept_defined(p, part);
    if kept.is_empty() {
        return Err("no kept axiomatized symbol to define".into());
    }
    for f in &kept {
        match definability::check_implicit_definable(&task, f) {
            Ok(true) => {}
            Ok(false) => return Err(format!("{f} is not implicitly definable over the free symbols")),
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(())
}

pub fn detect_fragment(p: &Problem) -> FragmentTag {
    let part = analyze(p);
    if let Some(r) = monotone_guard(p, &part) {
        return FragmentTag::Unsupported(r);
    }
    if p.ext.axioms.is_empty() && part.eliminable.is_empty() {
        return FragmentTag::Uif;
    }
    if part.k_s.is_empty() {
        return FragmentTag::Disjoint;
    }
    let tame = locality::tame_instance_set(&p.sig, &part, &p.constants());
    let Err(tame_err) = tame else { return FragmentTag::Tame };
    match definable_reason(p, &part) {
        Ok(()) => FragmentTag::Definable,
        Err(def_err) => FragmentTag::Unsupported(format!(
            "axioms constrain the shared symbols, the two-sorted conditions fail ({tame_err}) and {def_err}"
        )),
    }
}

fn forced_fragment(p: &Problem, choice: FragmentChoice) -> FragmentTag {
    let part = analyze(p);
    match choice {
        FragmentChoice::Auto => detect_fragment(p),
        FragmentChoice::Uif if part.k_s.is_empty() => {
            if p.ext.axioms.is_empty() && part.eliminable.is_empty() {
                FragmentTag::Uif
            } else {
                FragmentTag::Disjoint
            }
        }
        FragmentChoice::Uif => FragmentTag::Unsupported("axioms constrain the shared symbols".into()),
        FragmentChoice::Tame => match locality::tame_instance_set(&p.sig, &part, &p.constants()) {
            Ok(_) => FragmentTag::Tame,
            Err(e) => FragmentTag::Unsupported(e.to_string()),
        },
        FragmentChoice::Definable => match definable_reason(p, &part) {
            Ok(()) => FragmentTag::Definable,
            Err(e) => FragmentTag::Unsupported(e),
        },
    }
}

/// Evidence collected for a produced interpolant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    /// `G ⊨ Γ` modulo the axioms.
    pub gamma_entailed: bool,
    /// `Γ` uses only shared functions and kept constants.
    pub gamma_signature: bool,
    /// `G ⊨ ψ` modulo the axioms.
    pub psi_entailed: bool,
    pub covers: Vec<VerifyReport>,
    pub depth_raised: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.gamma_entailed && self.gamma_signature && self.psi_entailed && self.covers.iter().all(VerifyReport::ok)
    }

    fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.gamma_entailed {
            out.push("goal does not entail the intermediate formula".to_string());
        }
        if !self.gamma_signature {
            out.push("intermediate formula leaves the kept signature".to_string());
        }
        if !self.psi_entailed {
            out.push("goal does not entail the interpolant".to_string());
        }
        for r in &self.covers {
            if !r.ok() {
                let missing: Vec<String> = r.counterexamples.iter().take(3).map(|l| l.to_string()).collect();
                out.push(format!("cover check at depth {} fails: missing {}", r.depth, missing.join(" ")));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolantReport {
    pub fragment: FragmentTag,
    pub gamma: Option<Formula>,
    pub psi: Option<Formula>,
    /// Constants kept by the elimination phase.
    pub kept: BTreeSet<Term>,
    pub shared: BTreeSet<Name>,
    pub definitions: Vec<ExplicitDefinition>,
    pub verification: Option<Verification>,
    /// Set when verification failed; `psi` is then withheld.
    pub defect: Option<String>,
    pub trace: Vec<String>,
}

impl InterpolantReport {
    fn unsupported(tag: FragmentTag) -> InterpolantReport {
        InterpolantReport {
            fragment: tag,
            gamma: None,
            psi: None,
            kept: BTreeSet::new(),
            shared: BTreeSet::new(),
            definitions: Vec::new(),
            verification: None,
            defect: None,
            trace: Vec::new(),
        }
    }
}

fn closure_for(p: &Problem, tag: &FragmentTag) -> ClosureOperator {
    match tag {
        FragmentTag::Definable => DefinabilityTask::from_problem(p).closure(),
        _ => ClosureOperator::for_shape(&p.ext),
    }
}

struct Phase1 {
    gamma: Formula,
    kept: BTreeSet<Term>,
    shared: BTreeSet<Name>,
    definitions: Vec<ExplicitDefinition>,
    /// What the cover phase works on.
    cover_input: Formula,
}

fn phase1(p: &Problem, tag: &FragmentTag, trace: &mut Vec<String>, want_trace: bool) -> Result<Phase1, PipelineError> {
    let part = analyze(p);
    let keep = p.shared_constants();
    let psi = closure_for(p, tag);
    let (axioms, goal, context): (Vec<Axiom>, Formula, Vec<Axiom>) = match tag {
        FragmentTag::Tame => {
            let t = locality::tame_instance_set(&p.sig, &part, &p.constants())?;
            let inst = locality::instantiate(&part.k_s, &t)?;
            if want_trace {
                let shown: Vec<String> = t.iter().map(|t| t.to_string()).collect();
                trace.push(format!("instance set: {}", shown.join(" ")));
                trace.push(format!("shared-axiom instances: {}", inst.len()));
            }
            let goal = Formula::and(std::iter::once(p.goal.clone()).chain(inst));
            (part.k_1.clone(), goal, part.k_s.clone())
        }
        // The definitions take over the axioms, so instances they imply are dropped.
        FragmentTag::Definable => (p.ext.axioms.clone(), p.goal.clone(), p.ext.axioms.clone()),
        _ => (part.k_1.clone(), p.goal.clone(), Vec::new()),
    };
    let terms = psi.apply(&axioms, &locality::est(axioms.iter().map(|a| &a.clause), &goal))?;
    let report = elim::eliminate_functions(&EliminationTask {
        axioms: &axioms,
        goal: &goal,
        terms,
        shared: part.shared.clone(),
        keep: keep.clone(),
        context: &context,
        trace: want_trace,
    })?;
    if let Some(t) = &report.trace {
        trace.push(format!("instances: {}", t.instances.len()));
        let defs: Vec<String> = t.purification.def.iter().map(|(c, s)| format!("{c}={s}")).collect();
        trace.push(format!("definitions: {}", defs.join(" ")));
        let show = |s: &BTreeSet<Term>| s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ");
        trace.push(format!("kept (shared): {}", show(&t.classification.c_f)));
        trace.push(format!("kept (arguments): {}", show(&t.classification.c_p)));
        trace.push(format!("eliminated: {}", show(&t.classification.c)));
        trace.push(format!("after projection: {}", t.gamma1));
    }
    let mut definitions = Vec::new();
    let cover_input = if *tag == FragmentTag::Definable {
        let (task, kept) = kept_defined(p, &part);
        for f in &kept {
            definitions.push(definability::extract_definition(&task, f)?);
        }
        let mut supply = NameSupply::new(&p.sig);
        let (rewritten, names) = definability::rewrite_body(&report.gamma, &definitions, false, &mut supply)?;
        if want_trace {
            definitions.iter().for_each(|d| trace.push(format!("definition: {d}")));
            trace.push(format!("rewritten ({} names): {rewritten}", names.len()));
        }
        rewritten
    } else {
        report.gamma.clone()
    };
    Ok(Phase1 { gamma: report.gamma, kept: report.kept, shared: part.shared, definitions, cover_input })
}

/// The elimination phase only: `Γ` and its kept constants.
pub fn eliminate(p: &Problem, opts: &PipelineOptions) -> Result<InterpolantReport, PipelineError> {
    let tag = forced_fragment(p, opts.fragment);
    if let FragmentTag::Unsupported(_) = tag {
        return Ok(InterpolantReport::unsupported(tag));
    }
    let mut trace = Vec::new();
    let ph = phase1(p, &tag, &mut trace, opts.trace)?;
    let verification = if opts.verify {
        let psi = closure_for(p, &tag);
        let gamma_entailed = locality::hierarchical_entails(&p.ext.axioms, &p.goal, &ph.gamma, &psi)?;
        let gamma_signature = gamma_signature_ok(&ph.gamma, &ph.shared, &ph.kept);
        Some(Verification {
            gamma_entailed,
            gamma_signature,
            psi_entailed: true,
            covers: Vec::new(),
            depth_raised: false,
        })
    } else {
        None
    };
    let defect = verification.as_ref().filter(|v| !v.ok()).map(|v| v.failures().join("; "));
    Ok(InterpolantReport {
        fragment: tag,
        gamma: Some(ph.gamma),
        psi: None,
        kept: ph.kept,
        shared: ph.shared,
        definitions: ph.definitions,
        verification,
        defect,
        trace,
    })
}

fn gamma_signature_ok(gamma: &Formula, shared: &BTreeSet<Name>, kept: &BTreeSet<Term>) -> bool {
    gamma.function_symbols().iter().all(|f| shared.contains(f)) && gamma.constants().iter().all(|c| kept.contains(c))
}

/// Both phases: `Γ` by symbol elimination, then `ψ` by a cover over the
/// shared constants, with verification unless disabled.
pub fn general_uniform_interpolant(p: &Problem, opts: &PipelineOptions) -> Result<InterpolantReport, PipelineError> {
    let tag = forced_fragment(p, opts.fragment);
    if let FragmentTag::Unsupported(_) = tag {
        return Ok(InterpolantReport::unsupported(tag));
    }
    let mut trace = Vec::new();
    let ph = phase1(p, &tag, &mut trace, opts.trace)?;
    let keep = p.shared_constants();
    let cover_opts = CoverOptions { depth: opts.depth, ..CoverOptions::default() };
    let (psi, verification) = if opts.verify {
        let vc = cover::verified_cover(&ph.cover_input, &keep, &cover_opts)?;
        let closure = closure_for(p, &tag);
        let gamma_entailed = locality::hierarchical_entails(&p.ext.axioms, &p.goal, &ph.gamma, &closure)?;
        let psi_entailed = locality::hierarchical_entails(&p.ext.axioms, &p.goal, &vc.psi, &closure)?;
        let v = Verification {
            gamma_entailed,
            gamma_signature: gamma_signature_ok(&ph.gamma, &ph.shared, &ph.kept),
            psi_entailed,
            covers: vc.reports,
            depth_raised: vc.raised,
        };
        if opts.trace {
            trace.push(format!("cover depth bound: {}{}", vc.depth, if vc.raised { " (raised)" } else { "" }));
        }
        (vc.psi, Some(v))
    } else {
        (cover::cover_formula(&ph.cover_input, &keep, &cover_opts)?, None)
    };
    let defect = verification.as_ref().filter(|v| !v.ok()).map(|v| v.failures().join("; "));
    Ok(InterpolantReport {
        fragment: tag,
        gamma: Some(ph.gamma),
        psi: if defect.is_some() { None } else { Some(psi) },
        kept: ph.kept,
        shared: ph.shared,
        definitions: ph.definitions,
        verification,
        defect,
        trace,
    })
}

/// Cover of the goal itself over the shared constants, with the function
/// symbols left uninterpreted.
pub fn cover_goal(p: &Problem, opts: &PipelineOptions) -> Result<InterpolantReport, PipelineError> {
    if !p.ext.axioms.is_empty() {
        return Ok(InterpolantReport::unsupported(FragmentTag::Unsupported(
            "a plain cover treats every function as free; the problem has axioms".into(),
        )));
    }
    let keep = p.shared_constants();
    let cover_opts = CoverOptions { depth: opts.depth, ..CoverOptions::default() };
    let (psi, verification) = if opts.verify {
        let vc = cover::verified_cover(&p.goal, &keep, &cover_opts)?;
        let v = Verification {
            gamma_entailed: true,
            gamma_signature: true,
            psi_entailed: vc.reports.iter().all(|r| r.entailment_ok),
            covers: vc.reports,
            depth_raised: vc.raised,
        };
        (vc.psi, Some(v))
    } else {
        (cover::cover_formula(&p.goal, &keep, &cover_opts)?, None)
    };
    let defect = verification.as_ref().filter(|v| !v.ok()).map(|v| v.failures().join("; "));
    Ok(InterpolantReport {
        fragment: FragmentTag::Uif,
        gamma: None,
        psi: if defect.is_some() { None } else { Some(psi) },
        kept: keep,
        shared: p.goal.function_symbols(),
        definitions: Vec::new(),
        verification,
        defect,
        trace: Vec::new(),
    })
}

#[derive(Clone, Debug)]
pub struct CheckSatReport {
    pub sat: bool,
    pub closure: &'static str,
    /// `Ψ(est(K, G))`.
    pub terms: BTreeSet<Term>,
    pub instances: Vec<Formula>,
}

pub fn check_sat(p: &Problem) -> Result<CheckSatReport, PipelineError> {
    let closure = ClosureOperator::for_shape(&p.ext);
    let out = locality::hierarchical_check_sat(&p.ext.axioms, &p.goal, &closure)?;
    Ok(CheckSatReport {
        sat: matches!(out.result, SatResult::Sat(_)),
        closure: closure.kind(),
        terms: out.terms,
        instances: out.instances,
    })
}

#[derive(Clone, Debug)]
pub struct DefinitionReport {
    pub symbol: Name,
    pub outcome: Result<ExplicitDefinition, DefError>,
}

pub fn define(p: &Problem, f: &str) -> DefinitionReport {
    let task = DefinabilityTask::from_problem(p);
    DefinitionReport { symbol: Name::from(f), outcome: definability::extract_definition(&task, f) }
}

/// The result of running a problem's task.
#[derive(Clone, Debug)]
pub enum Report {
    CheckSat(CheckSatReport),
    Interpolant { task: &'static str, report: InterpolantReport },
    Definition(DefinitionReport),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSUPPORTED: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self {
            Report::CheckSat(_) => EXIT_OK,
            Report::Interpolant { report, .. } => match (&report.fragment, &report.defect) {
                (FragmentTag::Unsupported(_), _) => EXIT_UNSUPPORTED,
                (_, Some(_)) => EXIT_VERIFICATION,
                _ => EXIT_OK,
            },
            Report::Definition(d) => match &d.outcome {
                Ok(_) => EXIT_OK,
                Err(DefError::NotDefinable(_)) | Err(DefError::FreeSymbol(_)) => EXIT_UNSUPPORTED,
                Err(DefError::Claim1Failed { .. }) | Err(DefError::Claim2Failed { .. }) => EXIT_VERIFICATION,
                Err(_) => EXIT_INPUT,
            },
        }
    }

    pub fn trace(&self) -> &[String] {
        match self {
            Report::Interpolant { report, .. } => &report.trace,
            _ => &[],
        }
    }

    pub fn to_sexpr(&self) -> String {
        let mut s = String::from("(report");
        match self {
            Report::CheckSat(r) => {
                let _ = write!(s, "\n  (task check-sat)\n  (result {})", if r.sat { "sat" } else { "unsat" });
                let _ = write!(s, "\n  (closure {})", r.closure);
                let terms: Vec<String> = r.terms.iter().map(|t| t.to_string()).collect();
                let _ = write!(s, "\n  (terms ({}))", terms.join(" "));
                let _ = write!(s, "\n  (instances {})", r.instances.len());
            }
            Report::Interpolant { task, report } => {
                let _ = write!(s, "\n  (task {task})\n  (fragment {})", report.fragment.as_str());
                if let FragmentTag::Unsupported(reason) = &report.fragment {
                    let _ = write!(s, "\n  (reason {})", quote(reason));
                }
                if let Some(g) = &report.gamma {
                    let _ = write!(s, "\n  (gamma {g})");
                }
                for d in &report.definitions {
                    let _ = write!(s, "\n  {d}");
                }
                if let Some(p) = &report.psi {
                    let _ = write!(s, "\n  (psi {p})");
                }
                if report.gamma.is_some() {
                    let kept: Vec<String> = report.kept.iter().map(|t| t.to_string()).collect();
                    let _ = write!(s, "\n  (kept ({}))", kept.join(" "));
                }
                if let Some(v) = &report.verification {
                    let _ = write!(
                        s,
                        "\n  (verification (gamma-entailed {}) (gamma-signature {}) (psi-entailed {})",
                        v.gamma_entailed, v.gamma_signature, v.psi_entailed
                    );
                    for c in &v.covers {
                        let _ = write!(s, " (cover (depth {}) (ok {}))", c.depth, c.ok());
                    }
                    if v.depth_raised {
                        s.push_str(" (depth-raised true)");
                    }
                    s.push(')');
                }
                if let Some(d) = &report.defect {
                    let _ = write!(s, "\n  (defect {})", quote(d));
                }
            }
            Report::Definition(d) => {
                let _ = write!(s, "\n  (task define {})", d.symbol);
                match &d.outcome {
                    Ok(def) => {
                        let _ = write!(s, "\n  {def}\n  (claims (claim1 true) (claim2 true))");
                    }
                    Err(e) => {
                        let _ = write!(s, "\n  (error {})", quote(&e.to_string()));
                    }
                }
            }
        }
        s.push(')');
        s
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Runs the problem's own task.
pub fn run(p: &Problem, opts: &PipelineOptions) -> Result<Report, PipelineError> {
    Ok(match &p.task {
        Task::CheckSat => Report::CheckSat(check_sat(p)?),
        Task::Eliminate => Report::Interpolant { task: "eliminate", report: eliminate(p, opts)? },
        Task::Cover => Report::Interpolant { task: "cover", report: cover_goal(p, opts)? },
        Task::GenUi => Report::Interpolant { task: "gen-ui", report: general_uniform_interpolant(p, opts)? },
        Task::Define(f) => Report::Definition(define(p, f)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_problem;

    #[test]
    fn monotonicity_forms() {
        let src = "(problem (functions (f (rat) rat))
          (axioms (forall ((x rat) (y rat)) (=> (<= x y) (<= (f x) (f y))))
                  (forall ((x rat) (y rat)) (or (< y x) (<= (f x) (f y))))
                  (forall ((x rat) (y rat)) (=> (<= x y) (<= (f y) (f x)))))
          (goal true))";
        let p = parse_problem(src).unwrap();
        let found: Vec<Option<Name>> = p.ext.axioms.iter().map(monotone_symbol).collect();
        assert_eq!(found, vec![Some(Name::from("f")), Some(Name::from("f")), None]);
    }

    #[test]
    fn plain_constant_elimination_is_uif() {
        let src = "(problem (functions (g (rat) rat)) (constants (a rat :shared) (b rat))
          (shared-functions (g)) (goal (and (<= a b) (<= b (g a)))))";
        let p = parse_problem(src).unwrap();
        assert_eq!(detect_fragment(&p), FragmentTag::Uif);
        let r = general_uniform_interpolant(&p, &PipelineOptions::default()).unwrap();
        assert!(r.defect.is_none(), "{:?}", r.defect);
        assert_eq!(r.psi.unwrap().to_string(), "(<= a (g a))");
    }
}
