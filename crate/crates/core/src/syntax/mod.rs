//! Sorted first-order syntax: terms, formulas, signatures and problem files.

mod formula;
mod parse;
mod print;
mod term;

use std::collections::{BTreeMap, BTreeSet};

pub use formula::{substitute, Atom, Clause, Formula, Literal, Subst, SubstError};
pub use parse::{parse_formula, parse_problem, parse_term, ParseError};
pub use print::{print_formula, print_problem, print_sort_binding};
pub use term::{fmt_rational, is_arith_symbol, name, q, q_frac, Name, Sort, Term, TermKind, Q, RAT};

/// Role of an uninterpreted function symbol in an elimination task.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum SymbolClass {
    Shared,
    Eliminable,
    Irrelevant,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FunctionDecl {
    pub name: Name,
    pub args: Vec<Sort>,
    pub ret: Sort,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstDecl {
    pub name: Name,
    pub sort: Sort,
    pub shared: bool,
}

/// Declared sorts, function symbols and constants. The base symbols
/// (`+`, `-`, `*` by literals, `<=`, `<`, `=`) are implicit.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Signature {
    pub sorts: BTreeSet<Sort>,
    pub functions: BTreeMap<Name, FunctionDecl>,
    pub constants: BTreeMap<Name, ConstDecl>,
    pub partition: BTreeMap<Name, SymbolClass>,
}

impl Signature {
    pub fn new() -> Signature {
        let mut sorts = BTreeSet::new();
        sorts.insert(Sort::rat());
        Signature { sorts, ..Signature::default() }
    }

    pub fn add_sort(&mut self, s: &str) -> Sort {
        let sort = Sort::element(s);
        self.sorts.insert(sort.clone());
        sort
    }

    pub fn add_function(&mut self, f: &str, args: Vec<Sort>, ret: Sort) {
        let n = name(f);
        self.functions.insert(n.clone(), FunctionDecl { name: n.clone(), args, ret });
        self.partition.entry(n).or_insert(SymbolClass::Eliminable);
    }

    pub fn add_constant(&mut self, c: &str, sort: Sort, shared: bool) -> Term {
        let n = name(c);
        self.constants.insert(n.clone(), ConstDecl { name: n, sort: sort.clone(), shared });
        Term::constant(c, sort)
    }

    pub fn function(&self, f: &str) -> Option<&FunctionDecl> {
        self.functions.get(f)
    }

    pub fn constant(&self, c: &str) -> Option<Term> {
        self.constants.get(c).map(|d| Term::constant(c, d.sort.clone()))
    }

    pub fn class_of(&self, f: &str) -> Option<SymbolClass> {
        self.partition.get(f).copied()
    }

    pub fn symbols_in(&self, class: SymbolClass) -> BTreeSet<Name> {
        self.partition.iter().filter(|(_, c)| **c == class).map(|(n, _)| n.clone()).collect()
    }

    pub fn is_declared(&self, n: &str) -> bool {
        self.functions.contains_key(n) || self.constants.contains_key(n)
    }

    /// Builds `f(args)` with the declared result sort.
    pub fn apply(&self, f: &str, args: Vec<Term>) -> Option<Term> {
        let decl = self.functions.get(f)?;
        Some(Term::app(f, args, decl.ret.clone()))
    }
}

/// Hands out names that collide neither with the signature nor with each
/// other; a clash is resolved by appending a numeric suffix.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<Name>,
}

impl NameSupply {
    pub fn new(sig: &Signature) -> NameSupply {
        let mut used: BTreeSet<Name> = sig.constants.keys().cloned().collect();
        used.extend(sig.functions.keys().cloned());
        NameSupply { used }
    }

    pub fn reserve(&mut self, n: &str) {
        self.used.insert(name(n));
    }

    pub fn fresh(&mut self, base: &str) -> Name {
        if !self.used.contains(base) {
            self.reserve(base);
            return name(base);
        }
        let mut i = 1usize;
        loop {
            let cand = format!("{base}{i}");
            if !self.used.contains(cand.as_str()) {
                self.reserve(&cand);
                return name(&cand);
            }
            i += 1;
        }
    }

    pub fn fresh_constant(&mut self, base: &str, sort: Sort) -> Term {
        let n = self.fresh(base);
        Term::constant(&n, sort)
    }
}

/// How instances of the axioms are to be generated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Shape {
    /// One local extension; instantiate over the extension terms of the goal.
    Single,
    /// A chain of extensions, outermost layer first.
    Chain,
    /// Two-sorted extension instantiated over the finite term set of the
    /// element-sorted constants.
    Tame,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Single => "single",
            Shape::Chain => "chain",
            Shape::Tame => "tame",
        }
    }
}

/// A universally closed axiom plus the function symbols whose ground terms
/// drive its instantiation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Axiom {
    pub clause: Clause,
    pub triggers: BTreeSet<Name>,
}

impl Axiom {
    pub fn symbols(&self) -> BTreeSet<Name> {
        self.clause.body.function_symbols()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtensionSpec {
    pub axioms: Vec<Axiom>,
    pub shape: Shape,
    pub layers: Vec<BTreeSet<Name>>,
}

impl ExtensionSpec {
    /// Builds the spec, assigning each axiom its triggers. For chains an
    /// axiom belongs to the outermost layer it mentions and is triggered by
    /// that layer's symbols; otherwise every function symbol is a trigger.
    pub fn new(clauses: Vec<Clause>, shape: Shape, layers: Vec<BTreeSet<Name>>) -> ExtensionSpec {
        let axioms = clauses
            .into_iter()
            .map(|clause| {
                let syms = clause.body.function_symbols();
                let triggers = match shape {
                    Shape::Chain => layers
                        .iter()
                        .find(|l| l.iter().any(|f| syms.contains(f)))
                        .map(|l| l.intersection(&syms).cloned().collect())
                        .unwrap_or_else(|| syms.clone()),
                    Shape::Single | Shape::Tame => syms.clone(),
                };
                Axiom { clause, triggers }
            })
            .collect();
        ExtensionSpec { axioms, shape, layers }
    }

    pub fn empty() -> ExtensionSpec {
        ExtensionSpec { axioms: Vec::new(), shape: Shape::Single, layers: Vec::new() }
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.axioms.iter().map(|a| &a.clause)
    }

    /// Function symbols constrained by some axiom.
    pub fn axiomatized(&self) -> BTreeSet<Name> {
        self.axioms.iter().flat_map(Axiom::symbols).collect()
    }

    /// Restriction to the axioms accepted by `keep`, with the same shape.
    pub fn filter(&self, mut keep: impl FnMut(&Axiom) -> bool) -> ExtensionSpec {
        ExtensionSpec {
            axioms: self.axioms.iter().filter(|a| keep(a)).cloned().collect(),
            shape: self.shape,
            layers: self.layers.clone(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Task {
    CheckSat,
    Eliminate,
    Cover,
    GenUi,
    Define(Name),
}

/// A parsed problem file.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Problem {
    pub sig: Signature,
    pub ext: ExtensionSpec,
    pub goal: Formula,
    pub task: Task,
}

impl Problem {
    pub fn shared_functions(&self) -> BTreeSet<Name> {
        self.sig.symbols_in(SymbolClass::Shared)
    }

    pub fn shared_constants(&self) -> BTreeSet<Term> {
        self.sig.constants.values().filter(|d| d.shared).map(|d| Term::constant(&d.name, d.sort.clone())).collect()
    }

    pub fn constants(&self) -> BTreeSet<Term> {
        self.sig.constants.values().map(|d| Term::constant(&d.name, d.sort.clone())).collect()
    }
}
