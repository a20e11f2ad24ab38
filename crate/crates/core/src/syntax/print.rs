use std::fmt::{self, Write as _};

use super::formula::{Atom, Formula};
use super::term::Term;
use super::{Problem, Shape, Task};

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Eq(a, b) => write!(f, "(= {a} {b})"),
            Atom::Le(a, b) => write!(f, "(<= {a} {b})"),
            Atom::Lt(a, b) => write!(f, "(< {a} {b})"),
        }
    }
}

impl fmt::Display for super::Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.atom)
        } else {
            write!(f, "(not {})", self.atom)
        }
    }
}

fn write_nary(f: &mut fmt::Formatter<'_>, op: &str, parts: &[Formula]) -> fmt::Result {
    write!(f, "({op}")?;
    for p in parts {
        write!(f, " {p}")?;
    }
    f.write_str(")")
}

pub fn print_sort_binding(v: &Term) -> String {
    format!("({v} {})", v.sort())
}

fn write_binder(f: &mut fmt::Formatter<'_>, q: &str, vars: &[Term], body: &Formula) -> fmt::Result {
    write!(f, "({q} (")?;
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        f.write_str(&print_sort_binding(v))?;
    }
    write!(f, ") {body})")
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) => write_nary(f, "and", gs),
            Formula::Or(gs) => write_nary(f, "or", gs),
            Formula::Implies(a, b) => write!(f, "(=> {a} {b})"),
            Formula::Exists(vs, g) => write_binder(f, "exists", vs, g),
            Formula::Forall(vs, g) => write_binder(f, "forall", vs, g),
        }
    }
}

pub fn print_formula(phi: &Formula) -> String {
    phi.to_string()
}

/// Renders a problem in the problem-file syntax accepted by
/// [`parse_problem`](super::parse_problem).
pub fn print_problem(p: &Problem) -> String {
    let mut s = String::from("(problem\n");
    let elem: Vec<&str> = p.sig.sorts.iter().filter(|s| !s.is_numeric()).map(|s| s.name()).collect();
    let _ = writeln!(s, "  (sorts ({}))", elem.join(" "));
    s.push_str("  (functions");
    for d in p.sig.functions.values() {
        let args: Vec<&str> = d.args.iter().map(|a| a.name()).collect();
        let _ = write!(s, "\n    ({} ({}) {})", d.name, args.join(" "), d.ret);
    }
    s.push_str(")\n  (constants");
    for d in p.sig.constants.values() {
        let _ = write!(s, "\n    ({} {}{})", d.name, d.sort, if d.shared { " :shared" } else { "" });
    }
    s.push_str(")\n  (axioms");
    for c in p.ext.clauses() {
        let _ = write!(s, "\n    {}", c.to_formula());
    }
    s.push_str(")\n");
    let shared: Vec<String> = p.shared_functions().iter().map(|n| n.to_string()).collect();
    let _ = writeln!(s, "  (shared-functions ({}))", shared.join(" "));
    let _ = write!(s, "  (locality (shape {})", p.ext.shape.as_str());
    if p.ext.shape == Shape::Chain || !p.ext.layers.is_empty() {
        s.push_str(" (layers");
        for l in &p.ext.layers {
            let names: Vec<&str> = l.iter().map(|n| &**n).collect();
            let _ = write!(s, " ({})", names.join(" "));
        }
        s.push(')');
    }
    s.push_str(")\n");
    let _ = writeln!(s, "  (goal {})", p.goal);
    let task = match &p.task {
        Task::CheckSat => "check-sat".to_string(),
        Task::Eliminate => "eliminate".to_string(),
        Task::Cover => "cover".to_string(),
        Task::GenUi => "gen-ui".to_string(),
        Task::Define(f) => format!("define {f}"),
    };
    let _ = writeln!(s, "  (task {task}))");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Sort;

    #[test]
    fn prints_conjunction_in_prefix_form() {
        let r = Sort::rat();
        let a = Term::constant("a", r.clone());
        let e = Term::constant("e", r.clone());
        let gb = Term::app("g", vec![Term::constant("b", r.clone())], r);
        let phi = Formula::And(vec![Formula::eq(a, gb.clone()), Formula::le(e, gb)]);
        assert_eq!(print_formula(&phi), "(and (= a (g b)) (<= e (g b)))");
    }

    #[test]
    fn prints_truth_constant() {
        assert_eq!(print_formula(&Formula::True), "true");
    }
}
