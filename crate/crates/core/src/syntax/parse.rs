//! Reader for the problem-file format and for stand-alone formulas.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::formula::{Atom, Clause, Formula};
use super::term::{name, Name, Sort, Term, TermKind, Q, RAT};
use super::{ExtensionSpec, Problem, Shape, Signature, SymbolClass, Task};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown symbol `{symbol}`")]
    UnknownSymbol { line: usize, col: usize, symbol: String },
    #[error("{line}:{col}: sort error in `{application}`: {msg}")]
    Sort { line: usize, col: usize, application: String, msg: String },
    #[error("{line}:{col}: non-linear term `{term}`")]
    NonLinear { line: usize, col: usize, term: String },
}

#[derive(Clone, Debug)]
enum Node {
    Atom(String),
    List(Vec<Sexp>),
}

#[derive(Clone, Debug)]
struct Sexp {
    node: Node,
    line: usize,
    col: usize,
}

impl Sexp {
    fn atom(&self) -> Option<&str> {
        match &self.node {
            Node::Atom(s) => Some(s),
            Node::List(_) => None,
        }
    }

    fn list(&self) -> Option<&[Sexp]> {
        match &self.node {
            Node::List(v) => Some(v),
            Node::Atom(_) => None,
        }
    }

    fn head(&self) -> Option<&str> {
        self.list().and_then(|l| l.first()).and_then(Sexp::atom)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn unknown(&self, symbol: &str) -> ParseError {
        ParseError::UnknownSymbol { line: self.line, col: self.col, symbol: symbol.to_string() }
    }

    fn sort_err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::Sort { line: self.line, col: self.col, application: self.to_string(), msg: msg.into() }
    }
}

impl std::fmt::Display for Sexp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.node {
            Node::Atom(s) => f.write_str(s),
            Node::List(items) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(usize, usize, Vec<Sexp>)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
                continue;
            }
            ';' => {
                while let Some(&d) = chars.peek() {
                    if d == '\n' {
                        break;
                    }
                    chars.next();
                }
                continue;
            }
            '(' => {
                chars.next();
                col += 1;
                stack.push((l0, c0, Vec::new()));
                continue;
            }
            ')' => {
                chars.next();
                col += 1;
                let (l, c, items) =
                    stack.pop().ok_or(ParseError::Syntax { line: l0, col: c0, msg: "unbalanced `)`".into() })?;
                let s = Sexp { node: Node::List(items), line: l, col: c };
                match stack.last_mut() {
                    Some(parent) => parent.2.push(s),
                    None => top.push(s),
                }
                continue;
            }
            _ => {}
        }
        let mut tok = String::new();
        while let Some(&d) = chars.peek() {
            if d.is_whitespace() || d == '(' || d == ')' || d == ';' {
                break;
            }
            tok.push(d);
            chars.next();
            col += 1;
        }
        let s = Sexp { node: Node::Atom(tok), line: l0, col: c0 };
        match stack.last_mut() {
            Some(parent) => parent.2.push(s),
            None => top.push(s),
        }
    }
    if let Some((l, c, _)) = stack.last() {
        return Err(ParseError::Syntax { line: *l, col: *c, msg: "unclosed `(`".into() });
    }
    Ok(top)
}

fn read_one(text: &str) -> Result<Sexp, ParseError> {
    let mut all = read_all(text)?;
    match all.len() {
        1 => Ok(all.pop().expect("one element")),
        0 => Err(ParseError::Syntax { line: 1, col: 1, msg: "empty input".into() }),
        _ => Err(all[1].err("trailing input")),
    }
}

/// Parses `p`, `-p`, `p/q` and `-p/q` numerals.
fn numeral(tok: &str) -> Option<Q> {
    let body = tok.strip_prefix('-').unwrap_or(tok);
    let (n, d) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(n) || !d.is_none_or(digits) {
        return None;
    }
    let mut num: BigInt = n.parse().ok()?;
    if tok.starts_with('-') {
        num = -num;
    }
    let den: BigInt = match d {
        Some(d) => d.parse().ok()?,
        None => BigInt::from(1),
    };
    if den.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

const RESERVED: &[&str] =
    &["true", "false", "and", "or", "not", "=>", "forall", "exists", "=", "<=", "<", ">=", ">", "+", "-", "*"];

fn identifier(s: &Sexp) -> Result<&str, ParseError> {
    let a = s.atom().ok_or_else(|| s.err("expected an identifier"))?;
    if a.contains('!') {
        return Err(s.err(format!("`{a}`: `!` is reserved for generated names")));
    }
    if RESERVED.contains(&a) || numeral(a).is_some() || a.starts_with(':') {
        return Err(s.err(format!("`{a}` is not a valid identifier")));
    }
    Ok(a)
}

fn sort_ref(sig: &Signature, s: &Sexp) -> Result<Sort, ParseError> {
    let a = s.atom().ok_or_else(|| s.err("expected a sort name"))?;
    if a == RAT {
        return Ok(Sort::rat());
    }
    let sort = Sort::element(a);
    if sig.sorts.contains(&sort) {
        Ok(sort)
    } else {
        Err(s.unknown(a))
    }
}

struct Scope<'a> {
    sig: &'a Signature,
    vars: Vec<(Name, Term)>,
}

impl Scope<'_> {
    fn lookup_var(&self, n: &str) -> Option<Term> {
        self.vars.iter().rev().find(|(m, _)| &**m == n).map(|(_, t)| t.clone())
    }

    fn term(&self, s: &Sexp) -> Result<Term, ParseError> {
        match &s.node {
            Node::Atom(a) => {
                if let Some(v) = numeral(a) {
                    return Ok(Term::num(v));
                }
                if let Some(v) = self.lookup_var(a) {
                    return Ok(v);
                }
                if let Some(c) = self.sig.constant(a) {
                    return Ok(c);
                }
                if self.sig.function(a).is_some() {
                    return Err(s.sort_err("function used without arguments"));
                }
                Err(s.unknown(a))
            }
            Node::List(items) => {
                let head =
                    items.first().and_then(Sexp::atom).ok_or_else(|| s.err("expected a function application"))?;
                let args = items[1..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                match head {
                    "+" | "-" | "*" => {
                        if args.is_empty() {
                            return Err(s.err(format!("`{head}` needs arguments")));
                        }
                        if let Some(bad) = args.iter().position(|a| !a.is_numeric()) {
                            return Err(items[bad + 1].sort_err(format!("argument of `{head}` must have sort rat")));
                        }
                        if head == "*" && args.iter().filter(|a| !is_constant_value(a)).count() > 1 {
                            return Err(ParseError::NonLinear { line: s.line, col: s.col, term: s.to_string() });
                        }
                        Ok(Term::app(head, args, Sort::rat()))
                    }
                    f => {
                        if f.contains('!') {
                            return Err(items[0].err(format!("`{f}`: `!` is reserved for generated names")));
                        }
                        let decl = self.sig.function(f).ok_or_else(|| items[0].unknown(f))?;
                        if decl.args.len() != args.len() {
                            return Err(s.sort_err(format!(
                                "expected {} arguments, found {}",
                                decl.args.len(),
                                args.len()
                            )));
                        }
                        for (i, (a, want)) in args.iter().zip(&decl.args).enumerate() {
                            if a.sort() != want {
                                return Err(s.sort_err(format!(
                                    "argument {} has sort {}, expected {}",
                                    i + 1,
                                    a.sort(),
                                    want
                                )));
                            }
                        }
                        Ok(Term::app(f, args, decl.ret.clone()))
                    }
                }
            }
        }
    }

    fn binders(&mut self, s: &Sexp) -> Result<Vec<Term>, ParseError> {
        let list = s.list().ok_or_else(|| s.err("expected a variable list"))?;
        let mut out = Vec::new();
        for b in list {
            let pair = b.list().filter(|l| l.len() == 2).ok_or_else(|| b.err("expected (name sort)"))?;
            let n = identifier(&pair[0])?;
            let sort = sort_ref(self.sig, &pair[1])?;
            let v = Term::var(n, sort);
            self.vars.push((name(n), v.clone()));
            out.push(v);
        }
        Ok(out)
    }

    fn formula(&mut self, s: &Sexp) -> Result<Formula, ParseError> {
        match &s.node {
            Node::Atom(a) => match a.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                _ => Err(s.err(format!("expected a formula, found `{a}`"))),
            },
            Node::List(items) => {
                let head = items.first().and_then(Sexp::atom).ok_or_else(|| s.err("expected a formula"))?;
                let rest = &items[1..];
                let arity = |n: usize| {
                    if rest.len() == n {
                        Ok(())
                    } else {
                        Err(s.err(format!("`{head}` takes {n} arguments")))
                    }
                };
                match head {
                    "and" | "or" => {
                        let parts = rest.iter().map(|p| self.formula(p)).collect::<Result<Vec<_>, _>>()?;
                        Ok(if head == "and" { Formula::And(parts) } else { Formula::Or(parts) })
                    }
                    "not" => {
                        arity(1)?;
                        Ok(Formula::Not(Box::new(self.formula(&rest[0])?)))
                    }
                    "=>" => {
                        arity(2)?;
                        let a = self.formula(&rest[0])?;
                        let b = self.formula(&rest[1])?;
                        Ok(Formula::Implies(Box::new(a), Box::new(b)))
                    }
                    "forall" | "exists" => {
                        arity(2)?;
                        let mark = self.vars.len();
                        let vs = self.binders(&rest[0])?;
                        let body = self.formula(&rest[1]);
                        self.vars.truncate(mark);
                        let body = Box::new(body?);
                        Ok(if head == "forall" { Formula::Forall(vs, body) } else { Formula::Exists(vs, body) })
                    }
                    "=" | "<=" | "<" | ">=" | ">" => {
                        arity(2)?;
                        let a = self.term(&rest[0])?;
                        let b = self.term(&rest[1])?;
                        if head == "=" {
                            if a.sort() != b.sort() {
                                return Err(s.sort_err(format!("sides have sorts {} and {}", a.sort(), b.sort())));
                            }
                            return Ok(Formula::eq(a, b));
                        }
                        if !a.is_numeric() || !b.is_numeric() {
                            return Err(s.sort_err("comparison needs sort rat"));
                        }
                        Ok(Formula::Atom(match head {
                            "<=" => Atom::Le(a, b),
                            "<" => Atom::Lt(a, b),
                            ">=" => Atom::Le(b, a),
                            _ => Atom::Lt(b, a),
                        }))
                    }
                    other => Err(items[0].err(format!("unknown connective or predicate `{other}`"))),
                }
            }
        }
    }
}

fn is_constant_value(t: &Term) -> bool {
    match t.kind() {
        TermKind::Num(_) => true,
        TermKind::App(f, args) if super::is_arith_symbol(f) => args.iter().all(is_constant_value),
        _ => false,
    }
}

/// Parses a closed formula whose free identifiers are declared constants.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let s = read_one(text)?;
    Scope { sig, vars: Vec::new() }.formula(&s)
}

/// Parses a term; `vars` are in scope as variables.
pub fn parse_term(text: &str, sig: &Signature, vars: &[Term]) -> Result<Term, ParseError> {
    let s = read_one(text)?;
    let vars = vars.iter().map(|v| (name(v.symbol().unwrap_or_default()), v.clone())).collect();
    Scope { sig, vars }.term(&s)
}

fn names_of(s: &Sexp) -> Result<Vec<&Sexp>, ParseError> {
    // Accept both `(section (a b c))` and `(section a b c)`.
    let rest = &s.list().expect("section is a list")[1..];
    match rest {
        [single] if single.list().is_some() => Ok(single.list().unwrap_or_default().iter().collect()),
        _ => Ok(rest.iter().collect()),
    }
}

fn clause_of(f: Formula, at: &Sexp) -> Result<Clause, ParseError> {
    match f {
        Formula::Forall(vs, body) => {
            if !body.is_quantifier_free() {
                return Err(at.err("axiom body must be quantifier-free"));
            }
            Ok(Clause::new(vs, *body))
        }
        other if other.is_quantifier_free() => Ok(Clause::ground(other)),
        _ => Err(at.err("axiom must be universally closed")),
    }
}

/// Parses a problem file.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let root = read_one(text)?;
    if root.head() != Some("problem") {
        return Err(root.err("expected `(problem ...)`"));
    }
    let sections = &root.list().expect("problem is a list")[1..];
    let mut by_name: Vec<(&str, &Sexp)> = Vec::new();
    for s in sections {
        let h = s.head().ok_or_else(|| s.err("expected a section"))?;
        const KNOWN: &[&str] =
            &["sorts", "functions", "constants", "axioms", "shared-functions", "locality", "goal", "task"];
        if !KNOWN.contains(&h) {
            return Err(s.err(format!("unknown section `{h}`")));
        }
        if by_name.iter().any(|(n, _)| *n == h) {
            return Err(s.err(format!("duplicate section `{h}`")));
        }
        by_name.push((h, s));
    }
    let section = |n: &str| by_name.iter().find(|(m, _)| *m == n).map(|(_, s)| *s);

    let mut sig = Signature::new();
    if let Some(s) = section("sorts") {
        for n in names_of(s)? {
            let id = identifier(n)?;
            if id == RAT || !sig.sorts.insert(Sort::element(id)) {
                return Err(n.err(format!("sort `{id}` declared twice")));
            }
        }
    }
    if let Some(s) = section("functions") {
        for d in &s.list().expect("list")[1..] {
            let parts = d.list().filter(|l| l.len() == 3).ok_or_else(|| d.err("expected (name (argsorts) sort)"))?;
            let f = identifier(&parts[0])?;
            if sig.is_declared(f) {
                return Err(parts[0].err(format!("`{f}` declared twice")));
            }
            let args = parts[1]
                .list()
                .ok_or_else(|| parts[1].err("expected an argument sort list"))?
                .iter()
                .map(|a| sort_ref(&sig, a))
                .collect::<Result<Vec<_>, _>>()?;
            let ret = sort_ref(&sig, &parts[2])?;
            sig.add_function(f, args, ret);
        }
    }
    if let Some(s) = section("constants") {
        for d in &s.list().expect("list")[1..] {
            let parts = d
                .list()
                .filter(|l| l.len() == 2 || l.len() == 3)
                .ok_or_else(|| d.err("expected (name sort [:shared])"))?;
            let c = identifier(&parts[0])?;
            if sig.is_declared(c) {
                return Err(parts[0].err(format!("`{c}` declared twice")));
            }
            let sort = sort_ref(&sig, &parts[1])?;
            let shared = match parts.get(2) {
                None => false,
                Some(flag) if flag.atom() == Some(":shared") => true,
                Some(flag) => return Err(flag.err("expected `:shared`")),
            };
            sig.add_constant(c, sort, shared);
        }
    }
    if let Some(s) = section("shared-functions") {
        for n in names_of(s)? {
            let f = n.atom().ok_or_else(|| n.err("expected a function name"))?;
            if sig.function(f).is_none() {
                return Err(n.unknown(f));
            }
            sig.partition.insert(name(f), SymbolClass::Shared);
        }
    }

    let mut clauses = Vec::new();
    if let Some(s) = section("axioms") {
        for a in &s.list().expect("list")[1..] {
            let f = Scope { sig: &sig, vars: Vec::new() }.formula(a)?;
            clauses.push(clause_of(f, a)?);
        }
    }

    let mut shape = Shape::Single;
    let mut layers = Vec::new();
    if let Some(s) = section("locality") {
        for part in &s.list().expect("list")[1..] {
            match part.head() {
                Some("shape") => {
                    let v = part.list().and_then(|l| l.get(1)).and_then(Sexp::atom);
                    shape = match v {
                        Some("single") => Shape::Single,
                        Some("chain") => Shape::Chain,
                        Some("tame") => Shape::Tame,
                        _ => return Err(part.err("shape must be single, chain or tame")),
                    };
                }
                Some("layers") => {
                    for l in &part.list().expect("list")[1..] {
                        let syms = l.list().ok_or_else(|| l.err("expected a layer (f ...)"))?;
                        let mut layer = BTreeSet::new();
                        for f in syms {
                            let n = f.atom().ok_or_else(|| f.err("expected a function name"))?;
                            if sig.function(n).is_none() {
                                return Err(f.unknown(n));
                            }
                            layer.insert(name(n));
                        }
                        layers.push(layer);
                    }
                }
                _ => return Err(part.err("expected (shape ...) or (layers ...)")),
            }
        }
    }
    if shape == Shape::Chain && layers.is_empty() {
        return Err(root.err("chain locality needs (layers ...)"));
    }

    let goal = match section("goal") {
        Some(s) => {
            let l = s.list().expect("list");
            if l.len() != 2 {
                return Err(s.err("expected (goal <formula>)"));
            }
            let g = Scope { sig: &sig, vars: Vec::new() }.formula(&l[1])?;
            if !g.is_quantifier_free() {
                return Err(l[1].err("goal must be a ground formula"));
            }
            g
        }
        None => return Err(root.err("missing (goal ...) section")),
    };

    let task = match section("task") {
        None => Task::GenUi,
        Some(s) => {
            let l = &s.list().expect("list")[1..];
            match l.iter().map(Sexp::atom).collect::<Vec<_>>().as_slice() {
                [Some("check-sat")] => Task::CheckSat,
                [Some("eliminate")] => Task::Eliminate,
                [Some("cover")] => Task::Cover,
                [Some("gen-ui")] => Task::GenUi,
                [Some("define"), Some(f)] => {
                    if sig.function(f).is_none() {
                        return Err(l[1].unknown(f));
                    }
                    Task::Define(name(f))
                }
                _ => return Err(s.err("unknown task")),
            }
        }
    };

    Ok(Problem { sig, ext: ExtensionSpec::new(clauses, shape, layers), goal, task })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals() {
        assert_eq!(numeral("3"), Some(super::super::q(3)));
        assert_eq!(numeral("-3/2"), Some(super::super::q_frac(-3, 2)));
        assert_eq!(numeral("4/2"), Some(super::super::q(2)));
        assert_eq!(numeral("-"), None);
        assert_eq!(numeral("1/0"), None);
        assert_eq!(numeral("x1"), None);
    }

    #[test]
    fn empty_problem() {
        let p = parse_problem("(problem (axioms) (goal true))").unwrap();
        assert!(p.ext.axioms.is_empty());
        assert_eq!(p.goal, Formula::True);
    }

    #[test]
    fn unknown_symbol_reports_position() {
        let err = parse_problem("(problem\n  (constants (a rat))\n  (goal (<= a k)))").unwrap_err();
        assert_eq!(err, ParseError::UnknownSymbol { line: 3, col: 15, symbol: "k".into() });
    }

    #[test]
    fn nonlinear_product_is_rejected() {
        let err = parse_problem("(problem (constants (a rat) (b rat)) (goal (<= (* a b) 1)))").unwrap_err();
        assert!(matches!(err, ParseError::NonLinear { .. }));
    }

    #[test]
    fn sort_error_names_application() {
        let src = "(problem (sorts (elem)) (functions (g (elem) rat)) (constants (a rat)) (goal (<= (g a) 1)))";
        match parse_problem(src).unwrap_err() {
            ParseError::Sort { application, .. } => assert_eq!(application, "(g a)"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn reserved_namespace_is_rejected() {
        assert!(parse_problem("(problem (constants (a!1 rat)) (goal true))").is_err());
    }

    #[test]
    fn unbalanced_input() {
        assert!(matches!(read_all("(a (b)"), Err(ParseError::Syntax { line: 1, col: 1, .. })));
        assert!(matches!(read_all("a)"), Err(ParseError::Syntax { line: 1, col: 2, .. })));
    }
}
