//! Property tests over randomly generated inputs.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use common::*;
use symelim::cover;
use symelim::definability::{self, DefinabilityTask};
use symelim::ground::{self, SatResult};
use symelim::locality::{self, ClosureOperator};
use symelim::pipeline::{self, PipelineOptions};
use symelim::qe::{self, ExistentialBlock};
use symelim::syntax::{
    parse_formula, parse_problem, print_problem, Formula, Name, NameSupply, Signature, Sort, Subst, Term,
};

const SIG: &str = "(problem (sorts p)
  (functions (f (rat) rat) (g (rat) rat) (k (p) rat))
  (constants (a rat) (b rat) (c rat) (p1 p) (p2 p))
  (goal true))";

fn sig() -> Signature {
    parse_problem(SIG).unwrap().sig
}

fn numeral() -> impl Strategy<Value = String> {
    prop_oneof![
        (-3i64..=3).prop_map(|n| if n < 0 { format!("(- {})", -n) } else { n.to_string() }),
        (1i64..=5, 2i64..=4).prop_map(|(n, d)| format!("{n}/{d}")),
    ]
}

/// Numeric terms over `leaves`; products only by numerals.
fn rat_term(leaves: Vec<&'static str>) -> BoxedStrategy<String> {
    let leaf = prop_oneof![proptest::sample::select(leaves).prop_map(String::from), numeral()];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| format!("(f {t})")),
            inner.clone().prop_map(|t| format!("(g {t})")),
            proptest::sample::select(vec!["p1", "p2"]).prop_map(|p| format!("(k {p})")),
            (inner.clone(), inner.clone()).prop_map(|(s, t)| format!("(+ {s} {t})")),
            (inner.clone(), inner.clone()).prop_map(|(s, t)| format!("(- {s} {t})")),
            (-3i64..=3, inner).prop_map(|(n, t)| format!("(* {n} {t})")),
        ]
    })
    .boxed()
}

fn atom(leaves: Vec<&'static str>) -> impl Strategy<Value = String> {
    let t = rat_term(leaves);
    prop_oneof![
        (t.clone(), t.clone()).prop_map(|(s, t)| format!("(= {s} {t})")),
        (t.clone(), t.clone()).prop_map(|(s, t)| format!("(<= {s} {t})")),
        (t.clone(), t).prop_map(|(s, t)| format!("(< {s} {t})")),
        Just("(= p1 p2)".to_string()),
    ]
}

fn formula_text(leaves: Vec<&'static str>) -> impl Strategy<Value = String> {
    atom(leaves).prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 1..4).prop_map(|v| format!("(and {})", v.join(" "))),
            proptest::collection::vec(inner.clone(), 1..4).prop_map(|v| format!("(or {})", v.join(" "))),
            inner.clone().prop_map(|f| format!("(not {f})")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("(=> {a} {b})")),
        ]
    })
}

fn ground_formula() -> impl Strategy<Value = String> {
    formula_text(vec!["a", "b", "c"])
}

/// Flat conjunctions over `c0..c3` and one unary function, coefficients
/// in -2..2.
#[derive(Clone, Debug)]
struct FlatProblem {
    lits: Vec<Lin>,
}

const FLAT_NAMES: [&str; 8] = ["c0", "c1", "c2", "c3", "(f c0)", "(f c1)", "(f c2)", "(f c3)"];

fn flat_problem() -> impl Strategy<Value = FlatProblem> {
    let lit = (0usize..8, -2i64..=2, 0usize..8, -2i64..=2, -2i64..=2, 0u8..4).prop_map(|(i, ci, j, cj, k, r)| {
        let mut coeffs = vec![q(0); 8];
        coeffs[i] += q(ci);
        coeffs[j] += q(cj);
        if coeffs.iter().all(|c| *c == q(0)) {
            coeffs[i] = q(1);
        }
        let rel = [Rel::Le, Rel::Lt, Rel::Eq, Rel::Ne][r as usize];
        Lin { coeffs, constant: q(k), rel }
    });
    proptest::collection::vec(lit, 1..6).prop_map(|lits| FlatProblem { lits })
}

/// Satisfiability by Ackermann expansion: every pair of arguments is
/// either ordered or equal with equal images, then each case goes through
/// the Fourier–Motzkin oracle.
fn ackermann_sat(lits: &[Lin]) -> bool {
    let used: Vec<usize> = (0..4).filter(|&i| lits.iter().any(|l| l.coeffs[4 + i] != q(0))).collect();
    let mut pairs = Vec::new();
    for (x, &i) in used.iter().enumerate() {
        for &j in &used[x + 1..] {
            pairs.push((i, j));
        }
    }
    let unit = |i: usize, ci: i64, j: usize, cj: i64, rel: Rel| {
        let mut coeffs = vec![q(0); 8];
        coeffs[i] = q(ci);
        coeffs[j] = q(cj);
        Lin { coeffs, constant: q(0), rel }
    };
    let mut cases: Vec<Vec<Lin>> = vec![lits.to_vec()];
    for (i, j) in pairs {
        cases = cases
            .into_iter()
            .flat_map(|c| {
                let mut lt = c.clone();
                lt.push(unit(i, 1, j, -1, Rel::Lt));
                let mut gt = c.clone();
                gt.push(unit(j, 1, i, -1, Rel::Lt));
                let mut eq = c;
                eq.push(unit(i, 1, j, -1, Rel::Eq));
                eq.push(unit(4 + i, 1, 4 + j, -1, Rel::Eq));
                [lt, gt, eq]
            })
            .collect();
    }
    cases.iter().any(|c| fm_feasible(c))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn print_parse_round_trip(text in ground_formula()) {
        let s = sig();
        let phi = parse_formula(&text, &s).unwrap();
        let again = parse_formula(&phi.to_string(), &s).unwrap();
        prop_assert_eq!(again, phi);
    }

    #[test]
    fn interning_shares_nodes(text in rat_term(vec!["a", "b"])) {
        let s = sig();
        let t1 = symelim::syntax::parse_term(&text, &s, &[]).unwrap();
        let t2 = symelim::syntax::parse_term(&text, &s, &[]).unwrap();
        prop_assert!(t1.ptr_eq(&t2));
    }

    #[test]
    fn substitution_composes(body in formula_text(vec!["a", "x", "y"]), t1 in rat_term(vec!["b", "y"]), t2 in rat_term(vec!["c"])) {
        let s = sig();
        let (x, y) = (Term::var("x", Sort::rat()), Term::var("y", Sort::rat()));
        let phi = match parse_formula(&format!("(forall ((x rat) (y rat)) {body})"), &s).unwrap() {
            Formula::Forall(_, b) => *b,
            other => other,
        };
        let t1 = symelim::syntax::parse_term(&t1, &s, std::slice::from_ref(&y)).unwrap();
        let t2 = symelim::syntax::parse_term(&t2, &s, &[]).unwrap();
        let mut s1 = Subst::new();
        s1.insert(x, t1).unwrap();
        let mut s2 = Subst::new();
        s2.insert(y, t2).unwrap();
        prop_assert_eq!(s2.apply(&s1.apply(&phi)), s2.compose_after(&s1).apply(&phi));
    }

    #[test]
    fn witnesses_satisfy_their_formula(text in ground_formula()) {
        let phi = parse_formula(&text, &sig()).unwrap();
        if let SatResult::Sat(w) = ground::check_sat(&phi).unwrap() {
            prop_assert_eq!(w.eval_formula(&phi), Some(true), "{}", phi);
        }
    }

    #[test]
    fn ground_verdict_matches_ackermann_oracle(p in flat_problem()) {
        let s = parse_problem("(problem (functions (f (rat) rat)) (constants (c0 rat) (c1 rat) (c2 rat) (c3 rat)) (goal true))").unwrap().sig;
        let text = format!("(and true {})", p.lits.iter().map(|l| l.to_sexpr(&FLAT_NAMES)).collect::<Vec<_>>().join(" "));
        let phi = parse_formula(&text, &s).unwrap();
        let verdict = ground::check_sat(&phi).unwrap();
        prop_assert_eq!(verdict.is_sat(), ackermann_sat(&p.lits), "{}", phi);
        if let SatResult::Sat(w) = verdict {
            prop_assert_eq!(w.eval_formula(&phi), Some(true));
        }
    }

    #[test]
    fn qe_on_empty_block_is_identity(text in ground_formula()) {
        let phi = parse_formula(&text, &sig()).unwrap();
        let out = qe::eliminate_quantifiers(&ExistentialBlock::new(Vec::new(), phi.clone())).unwrap();
        prop_assert!(ground::equivalent(&out, &phi).unwrap());
    }

    #[test]
    fn qe_removes_bound_constants(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let names = ["x0", "x1", "y0", "y1"];
        let s = parse_problem("(problem (constants (x0 rat) (x1 rat) (y0 rat) (y1 rat)) (goal true))").unwrap().sig;
        let lits = random_block(&mut rng, 4, 2, 6);
        let text = format!("(and true {})", lits.iter().map(|l| l.to_sexpr(&names)).collect::<Vec<_>>().join(" "));
        let body = parse_formula(&text, &s).unwrap();
        let bound: Vec<Term> = names[..2].iter().map(|n| Term::constant(n, Sort::rat())).collect();
        let out = qe::eliminate_quantifiers(&ExistentialBlock::new(bound.clone(), body)).unwrap();
        prop_assert!(out.constants().iter().all(|c| !bound.contains(c)));
    }

    #[test]
    fn instantiation_is_monotone(t in proptest::collection::btree_set(0usize..9, 0..5), extra in proptest::collection::btree_set(0usize..9, 0..5)) {
        let p = load("define_piecewise.smt");
        let pool: Vec<Term> = ["a", "b", "c"].iter().flat_map(|c| {
            let c = Term::constant(c, Sort::rat());
            ["f", "g", "h"].map(|f| Term::app(f, vec![c.clone()], Sort::rat()))
        }).collect();
        let small: BTreeSet<Term> = t.iter().map(|&i| pool[i].clone()).collect();
        let mut big = small.clone();
        big.extend(extra.iter().map(|&i| pool[i].clone()));
        let i1: BTreeSet<Formula> = locality::instantiate(&p.ext.axioms, &small).unwrap().into_iter().collect();
        let i2: BTreeSet<Formula> = locality::instantiate(&p.ext.axioms, &big).unwrap().into_iter().collect();
        prop_assert!(i1.is_subset(&i2));
    }

    #[test]
    fn purification_is_undone_by_unpurify(text in ground_formula()) {
        let s = sig();
        let phi = parse_formula(&text, &s).unwrap();
        let mut supply = NameSupply::new(&s);
        let pr = locality::purify(&[], &phi, &mut supply);
        prop_assert!(pr.g0.function_symbols().iter().all(|f| symelim::syntax::is_arith_symbol(f)));
        // Arithmetic arguments are named by base constants defined in K0.
        let back = pr.unpurify(&pr.base_formula());
        let expected = Formula::and([phi.clone(), pr.unpurify(&Formula::and(pr.k0.clone()))]);
        prop_assert!(ground::equivalent(&back, &expected).unwrap(), "{} vs {}", back, expected);
    }

    #[test]
    fn hierarchical_check_agrees_on_ground_axioms(k in ground_formula(), g in ground_formula()) {
        let src = format!("(problem (sorts p) (functions (f (rat) rat) (g (rat) rat) (k (p) rat))
            (constants (a rat) (b rat) (c rat) (p1 p) (p2 p)) (axioms {k}) (goal {g}))");
        let p = parse_problem(&src).unwrap();
        let h = locality::hierarchical_check_sat(&p.ext.axioms, &p.goal, &ClosureOperator::Identity).unwrap();
        let direct = ground::check_sat(&Formula::and([p.ext.axioms[0].clause.body.clone(), p.goal.clone()])).unwrap();
        prop_assert_eq!(h.result.is_sat(), direct.is_sat());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn oracle_grows_with_depth(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = parse_problem(&random_flat_uif(&mut rng, 4)).unwrap();
        let keep = p.shared_constants();
        let d1 = cover::bounded_consequences(&p.goal, &keep, 1).unwrap();
        let d2 = cover::bounded_consequences(&p.goal, &keep, 2).unwrap();
        let f = |ls: &[symelim::syntax::Literal]| Formula::from_literals(ls);
        prop_assert!(ground::entails(&f(&d2), &f(&d1)).unwrap());
        prop_assert!(ground::entails(&p.goal, &f(&d2)).unwrap());
    }

    #[test]
    fn cover_keeps_signature(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = parse_problem(&random_flat_uif(&mut rng, 5)).unwrap();
        let keep = p.shared_constants();
        let psi = cover::cover_formula(&p.goal, &keep, &cover::CoverOptions::default()).unwrap();
        prop_assert!(psi.function_symbols().is_subset(&p.goal.function_symbols()));
        prop_assert!(psi.constants().is_subset(&keep));
        prop_assert!(ground::entails(&p.goal, &psi).unwrap());
    }

    #[test]
    fn keeping_everything_returns_the_goal(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let text = random_flat_uif(&mut rng, 5)
            .replace("(x rat)", "(x rat :shared)")
            .replace("(y rat)", "(y rat :shared)")
            .replace("(constants", "(shared-functions (f g)) (constants");
        let p = parse_problem(&text).unwrap();
        let r = pipeline::general_uniform_interpolant(&p, &PipelineOptions::default()).unwrap();
        let psi = r.psi.expect("verified interpolant");
        prop_assert!(ground::equivalent(&psi, &p.goal).unwrap(), "{} vs {}", psi, p.goal);
    }
}

#[test]
fn problems_print_and_parse_back() {
    for (file, p) in corpus() {
        let again = parse_problem(&print_problem(&p)).unwrap_or_else(|e| panic!("{file}: {e}"));
        assert_eq!(again, p, "{file}");
    }
}

#[test]
fn elimination_is_deterministic() {
    for (file, p) in corpus() {
        if p.task != symelim::syntax::Task::GenUi {
            continue;
        }
        let a = pipeline::general_uniform_interpolant(&p, &PipelineOptions::default()).unwrap();
        let b = pipeline::general_uniform_interpolant(&p, &PipelineOptions::default()).unwrap();
        assert_eq!(a.gamma, b.gamma, "{file}");
        assert_eq!(a.psi, b.psi, "{file}");
    }
}

#[test]
fn fragment_detection_ignores_names() {
    let renaming: BTreeMap<&str, &str> =
        [("f", "up"), ("g", "mid"), ("h", "low"), ("a", "k1"), ("b", "k2"), ("c", "k3"), ("e", "k4"), ("u", "k5")]
            .into_iter()
            .collect();
    for entry in std::fs::read_dir(problems_dir()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let p = parse_problem(&text).unwrap();
        let q = parse_problem(&rename_tokens(&text, &renaming)).unwrap();
        assert_eq!(
            pipeline::detect_fragment(&p).as_str(),
            pipeline::detect_fragment(&q).as_str(),
            "{}",
            path.display()
        );
    }
}

#[test]
fn primed_copy_renames_only_defined_symbols() {
    let p = load("define_piecewise.smt");
    let task = DefinabilityTask::from_problem(&p);
    let (primed, map) = definability::primed_axioms(&task);
    let back: BTreeMap<Name, Name> = map.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
    for (orig, copy) in task.axioms.iter().zip(&primed) {
        assert!(copy.symbols().iter().all(|f| !task.defined.contains(f)));
        assert!(copy.symbols().iter().all(|f| !task.free.contains(f) || orig.symbols().contains(f)));
        assert_eq!(definability::rename_functions(&copy.clause.body, &back), orig.clause.body);
    }
}

#[test]
fn rewriting_is_idempotent() {
    let p = load("definable_fixpoint.smt");
    let task = DefinabilityTask::from_problem(&p);
    let defs: Vec<_> = ["f", "g"].iter().map(|f| definability::extract_definition(&task, f).unwrap()).collect();
    let once = definability::rewrite_with_definitions(&p.goal, &defs).unwrap();
    let twice = definability::rewrite_with_definitions(&once, &defs).unwrap();
    assert_eq!(once, twice);
    assert!(once.function_symbols().iter().all(|f| !task.defined.contains(f)));
}

#[test]
fn every_sat_verdict_in_the_corpus_has_a_witness() {
    for (file, p) in corpus() {
        if let SatResult::Sat(w) = ground::check_sat(&p.goal).unwrap() {
            assert_eq!(w.eval_formula(&p.goal), Some(true), "{file}");
        }
    }
}
