//! Independent oracles and random generators shared by the integration
//! tests. Nothing here calls into the library's solvers.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use symelim::ground::{Value, Witness};
use symelim::syntax::{parse_problem, Formula, Problem, Sort, Term};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Lt,
    Eq,
    Ne,
}

/// `coeffs · vars + constant REL 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lin {
    pub coeffs: Vec<Q>,
    pub constant: Q,
    pub rel: Rel,
}

impl Lin {
    fn value(&self, a: &[Q]) -> Q {
        self.coeffs.iter().zip(a).fold(self.constant.clone(), |s, (c, v)| s + c * v)
    }

    pub fn holds(&self, a: &[Q]) -> bool {
        let v = self.value(a);
        match self.rel {
            Rel::Le => !v.is_positive(),
            Rel::Lt => v.is_negative(),
            Rel::Eq => v.is_zero(),
            Rel::Ne => !v.is_zero(),
        }
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn scaled(&self, k: &Q) -> (Vec<Q>, Q) {
        (self.coeffs.iter().map(|c| c * k).collect(), &self.constant * k)
    }

    /// Prefix syntax over the given names, e.g. `(<= (+ (* 2 x) 1) 0)`.
    pub fn to_sexpr(&self, names: &[&str]) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (c, n) in self.coeffs.iter().zip(names) {
            if !c.is_zero() {
                parts.push(format!("(* {} {n})", rat(c)));
            }
        }
        parts.push(rat(&self.constant));
        let lhs = if parts.len() == 1 { parts.pop().unwrap() } else { format!("(+ {})", parts.join(" ")) };
        match self.rel {
            Rel::Le => format!("(<= {lhs} 0)"),
            Rel::Lt => format!("(< {lhs} 0)"),
            Rel::Eq => format!("(= {lhs} 0)"),
            Rel::Ne => format!("(not (= {lhs} 0))"),
        }
    }
}

fn rat(v: &Q) -> String {
    let s = if v.denom().is_one() { v.numer().abs().to_string() } else { format!("{}/{}", v.numer().abs(), v.denom()) };
    if v.is_negative() {
        format!("(- {s})")
    } else {
        s
    }
}

/// Naive Fourier–Motzkin projection of `vars` from a conjunction: splits
/// disequalities, substitutes equalities, then pairs every lower bound with
/// every upper bound. Returns a DNF over the remaining variables.
pub fn fm_project(lits: &[Lin], vars: &[usize]) -> Vec<Vec<Lin>> {
    let mut cases: Vec<Vec<Lin>> = vec![Vec::new()];
    for l in lits {
        if l.rel == Rel::Ne {
            let lt = Lin { rel: Rel::Lt, ..l.clone() };
            let (c, k) = l.scaled(&q(-1));
            let gt = Lin { coeffs: c, constant: k, rel: Rel::Lt };
            cases = cases.into_iter().flat_map(|c| [with(&c, lt.clone()), with(&c, gt.clone())]).collect();
        } else {
            cases.iter_mut().for_each(|c| c.push(l.clone()));
        }
    }
    let mut out = Vec::new();
    for mut case in cases {
        for &v in vars {
            case = eliminate_var(case, v);
        }
        if case.iter().all(|l| !l.is_trivial() || l.holds(&vec![q(0); l.coeffs.len()])) {
            out.push(case.into_iter().filter(|l| !l.is_trivial()).collect());
        }
    }
    out
}

fn with(c: &[Lin], l: Lin) -> Vec<Lin> {
    let mut c = c.to_vec();
    c.push(l);
    c
}

fn eliminate_var(lits: Vec<Lin>, v: usize) -> Vec<Lin> {
    if let Some(i) = lits.iter().position(|l| l.rel == Rel::Eq && !l.coeffs[v].is_zero()) {
        let eq = lits[i].clone();
        let inv = -eq.coeffs[v].recip();
        // v = inv * (rest)
        return lits
            .into_iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, l)| {
                let k = &l.coeffs[v] * &inv;
                let mut coeffs: Vec<Q> = l.coeffs.iter().zip(&eq.coeffs).map(|(a, b)| a + &k * b).collect();
                coeffs[v] = q(0);
                Lin { coeffs, constant: &l.constant + &k * &eq.constant, rel: l.rel }
            })
            .collect();
    }
    let (mut lower, mut upper, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for l in lits {
        let c = l.coeffs[v].clone();
        if c.is_positive() {
            upper.push(l);
        } else if c.is_negative() {
            lower.push(l);
        } else {
            rest.push(l);
        }
    }
    for lo in &lower {
        for up in &upper {
            let (a, ka) = lo.scaled(&up.coeffs[v]);
            let (b, kb) = up.scaled(&(-lo.coeffs[v].clone()));
            let mut coeffs: Vec<Q> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            coeffs[v] = q(0);
            let rel = if lo.rel == Rel::Lt || up.rel == Rel::Lt { Rel::Lt } else { Rel::Le };
            rest.push(Lin { coeffs, constant: ka + kb, rel });
        }
    }
    rest
}

/// Whether the conjunction has a rational solution.
pub fn fm_feasible(lits: &[Lin]) -> bool {
    let n = lits.first().map_or(0, |l| l.coeffs.len());
    let all: Vec<usize> = (0..n).collect();
    !fm_project(lits, &all).is_empty()
}

/// Fixes the variables in `fixed` to the given values.
pub fn substitute(lits: &[Lin], fixed: &BTreeMap<usize, Q>) -> Vec<Lin> {
    lits.iter()
        .map(|l| {
            let mut l = l.clone();
            for (v, val) in fixed {
                l.constant += &l.coeffs[*v] * val;
                l.coeffs[*v] = q(0);
            }
            l
        })
        .collect()
}

pub fn dnf_sexpr(dnf: &[Vec<Lin>], names: &[&str]) -> String {
    let conj = |c: &Vec<Lin>| match c.len() {
        0 => "true".to_string(),
        _ => format!("(and true {})", c.iter().map(|l| l.to_sexpr(names)).collect::<Vec<_>>().join(" ")),
    };
    match dnf.len() {
        0 => "false".to_string(),
        _ => format!("(or false {})", dnf.iter().map(conj).collect::<Vec<_>>().join(" ")),
    }
}

/// A random existential block over `nvars` variables of which the first
/// `bound` are quantified.
pub fn random_block(rng: &mut impl Rng, nvars: usize, bound: usize, max_lits: usize) -> Vec<Lin> {
    let n = rng.gen_range(1..=max_lits);
    (0..n)
        .map(|_| {
            let mut coeffs: Vec<Q> =
                (0..nvars).map(|_| if rng.gen_bool(0.5) { q(rng.gen_range(-3..=3)) } else { q(0) }).collect();
            if coeffs[..bound].iter().all(Zero::is_zero) {
                coeffs[rng.gen_range(0..bound)] = q(*[-3, -2, -1, 1, 2, 3].get(rng.gen_range(0..6)).unwrap());
            }
            let rel = match rng.gen_range(0..10) {
                0..=3 => Rel::Le,
                4..=6 => Rel::Lt,
                7..=8 => Rel::Eq,
                _ => Rel::Ne,
            };
            Lin { coeffs, constant: q(rng.gen_range(-3..=3)), rel }
        })
        .collect()
}

pub fn random_rational(rng: &mut impl Rng) -> Q {
    Q::new(rng.gen_range(-12..=12).into(), rng.gen_range(1..=4).into())
}

/// Evaluates a library formula under numeric values for its constants.
pub fn eval_formula(f: &Formula, values: &BTreeMap<String, Q>) -> bool {
    let terms = values.iter().map(|(n, v)| (Term::constant(n, Sort::rat()), Value::Num(v.clone()))).collect();
    let w = Witness { terms, tables: BTreeMap::new() };
    w.eval_formula(f).expect("formula evaluates under a total numeric assignment")
}

/// A random flat conjunction over kept `a b c`, eliminated `x y` and unary
/// functions `f g`, in problem syntax.
pub fn random_flat_uif(rng: &mut impl Rng, max_lits: usize) -> String {
    let consts = ["a", "b", "c", "x", "y"];
    let funs = ["f", "g"];
    let term = |rng: &mut dyn rand::RngCore| {
        let c = consts[rng.gen_range(0..consts.len())];
        if rng.gen_bool(0.4) {
            format!("({} {c})", funs[rng.gen_range(0..funs.len())])
        } else {
            c.to_string()
        }
    };
    let n = rng.gen_range(1..=max_lits);
    let mut lits = Vec::new();
    for _ in 0..n {
        let (s, t) = (term(rng), term(rng));
        let op = ["=", "<=", "<", "distinct"][rng.gen_range(0..4)];
        lits.push(match op {
            "distinct" => format!("(not (= {s} {t}))"),
            op => format!("({op} {s} {t})"),
        });
    }
    format!(
        "(problem (functions (f (rat) rat) (g (rat) rat))
           (constants (a rat :shared) (b rat :shared) (c rat :shared) (x rat) (y rat))
           (goal (and {}))
           (task cover))",
        lits.join(" ")
    )
}

/// A random set of flat terms: constants and unary applications of
/// `funs` to constants.
pub fn random_flat_terms(rng: &mut impl Rng, consts: &[Term], funs: &[&str]) -> BTreeSet<Term> {
    let n = rng.gen_range(0..=6);
    (0..n)
        .map(|_| {
            let c = consts[rng.gen_range(0..consts.len())].clone();
            if rng.gen_bool(0.7) {
                Term::app(funs[rng.gen_range(0..funs.len())], vec![c], Sort::rat())
            } else {
                c
            }
        })
        .collect()
}

pub fn problems_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("problems")
}

pub fn load(name: &str) -> Problem {
    let text = std::fs::read_to_string(problems_dir().join(name)).expect("problem file");
    parse_problem(&text).expect("problem parses")
}

pub fn corpus() -> Vec<(String, Problem)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(problems_dir())
        .expect("problems dir")
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "smt"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let text = std::fs::read_to_string(&f).expect("readable");
            (f.file_name().unwrap().to_string_lossy().into_owned(), parse_problem(&text).expect("problem parses"))
        })
        .collect()
}

/// Renames whole tokens of a problem text.
pub fn rename_tokens(text: &str, map: &BTreeMap<&str, &str>) -> String {
    let mut out = String::new();
    let mut tok = String::new();
    let flush = |tok: &mut String, out: &mut String| {
        out.push_str(map.get(tok.as_str()).copied().unwrap_or(tok));
        tok.clear();
    };
    for ch in text.chars() {
        if ch == '(' || ch == ')' || ch.is_whitespace() {
            flush(&mut tok, &mut out);
            out.push(ch);
        } else {
            tok.push(ch);
        }
    }
    flush(&mut tok, &mut out);
    out
}
