//! SMT layer: serialization, the model interpreter and the solver driver.

use std::collections::BTreeMap;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relcheck::smt::{
    self, and, app, bv, eq, forall, not, parse_model, parse_script, run_solver, run_solver_text, serialize, sym, Item,
    Logic, MValue, SmtScript, SolverCmd, Sort, Status, Term,
};

const PAPER_MODEL: &str = "\
(define n bv1[5])
(define t bv0[5])
(define b bv1[5])
(define b' bv16[5])
(define b'' bv0[5])
(define (addr (x1 (bv 5)) (x2 (bv 5)) (x3 (bv 5)))
  (if (and (= x1 bv1[5]) (= x2 bv1[5]) (= x3 bv0[5])) true
  (if (and (= x1 bv16[5]) (= x2 bv1[5]) (= x3 bv0[5])) true
  false)))
";

fn bv5(v: u64) -> MValue {
    MValue::Bv { value: v, width: 5 }
}

#[test]
fn paper_model_decodes_to_constants_and_table() {
    let m = parse_model(PAPER_MODEL).unwrap();
    let consts: Vec<(&str, u64)> = vec![("n", 1), ("t", 0), ("b", 1), ("b'", 16), ("b''", 0)];
    for (name, v) in consts {
        assert_eq!(m.apply(name, &[]).unwrap(), bv5(v), "{name}");
    }
    let dom: Vec<MValue> = (0..32).map(bv5).collect();
    let table = m.table("addr", &[dom.clone(), dom.clone(), dom]).unwrap();
    assert_eq!(table.len(), 32 * 32 * 32);
    let tuples: Vec<Vec<u64>> = table
        .iter()
        .filter(|(_, v)| **v == MValue::Bool(true))
        .map(|(k, _)| k.iter().map(|x| x.as_bv().unwrap()).collect())
        .collect();
    assert_eq!(tuples, vec![vec![1, 1, 0], vec![16, 1, 0]]);
}

#[test]
fn constants_only_model() {
    let text = "(\n  (define-fun x () (_ BitVec 3) #b101)\n  (define-fun p () Bool false)\n  (define-fun k () Int (- 7))\n)";
    let m = parse_model(text).unwrap();
    assert_eq!(m.defs.len(), 3);
    assert_eq!(m.apply("x", &[]).unwrap(), MValue::Bv { value: 5, width: 3 });
    assert_eq!(m.apply("p", &[]).unwrap(), MValue::Bool(false));
    assert_eq!(m.apply("k", &[]).unwrap(), MValue::Int(-7));
}

#[test]
fn universes_and_cardinality_constraints() {
    let text = "(
  ;; universe for Book:
  ;;   Book!val!0 Book!val!1
  (declare-fun Book!val!0 () Book)
  (declare-fun Book!val!1 () Book)
  ;; cardinality constraint:
  (forall ((x Book)) (or (= x Book!val!0) (= x Book!val!1)))
  (define-fun isFirst ((x!0 Book)) Bool (= x!0 Book!val!1))
)";
    let m = parse_model(text).unwrap();
    assert_eq!(m.universes["Book"], vec!["Book!val!0".to_string(), "Book!val!1".to_string()]);
    assert!(m.finite_sorts.contains("Book"));
    let v = m.apply("isFirst", &[MValue::Elem("Book!val!1".into())]).unwrap();
    assert_eq!(v, MValue::Bool(true));
}

#[test]
fn unsupported_syntax_is_a_decode_error() {
    let err = parse_model("((define-fun f ((x Int)) Int (lambda ((y Int)) y)))")
        .unwrap()
        .apply("f", &[MValue::Int(0)])
        .unwrap_err();
    assert!(err.fragment.contains("lambda"), "{err}");
    assert!(parse_model("((frobnicate))").is_err());
}

// Random if-then-else nests over two bitvector parameters, evaluated both
// by the model interpreter and by a direct evaluator over the same tree.

#[derive(Debug, Clone)]
enum Cond {
    EqVar(usize, u64),
    Ult(usize, usize),
    And(Box<Cond>, Box<Cond>),
    Not(Box<Cond>),
}

#[derive(Debug, Clone)]
enum Body {
    Leaf(bool),
    Ite(Cond, Box<Body>, Box<Body>),
}

fn gen_cond(rng: &mut ChaCha8Rng, w: u32, depth: u32) -> Cond {
    match rng.gen_range(0..if depth == 0 { 2 } else { 4 }) {
        0 => Cond::EqVar(rng.gen_range(0..2), rng.gen_range(0..1u64 << w)),
        1 => Cond::Ult(rng.gen_range(0..2), rng.gen_range(0..2)),
        2 => Cond::And(Box::new(gen_cond(rng, w, depth - 1)), Box::new(gen_cond(rng, w, depth - 1))),
        _ => Cond::Not(Box::new(gen_cond(rng, w, depth - 1))),
    }
}

fn gen_body(rng: &mut ChaCha8Rng, w: u32, depth: u32) -> Body {
    if depth == 0 || rng.gen_bool(0.2) {
        Body::Leaf(rng.gen())
    } else {
        Body::Ite(
            gen_cond(rng, w, 2),
            Box::new(gen_body(rng, w, depth - 1)),
            Box::new(gen_body(rng, w, depth - 1)),
        )
    }
}

fn lit(v: u64, w: u32) -> String {
    format!("(_ bv{v} {w})")
}

fn render_cond(c: &Cond, w: u32) -> String {
    match c {
        Cond::EqVar(x, v) => format!("(= x{x} {})", lit(*v, w)),
        Cond::Ult(a, b) => format!("(bvult x{a} x{b})"),
        Cond::And(a, b) => format!("(and {} {})", render_cond(a, w), render_cond(b, w)),
        Cond::Not(a) => format!("(not {})", render_cond(a, w)),
    }
}

fn render_body(b: &Body, w: u32) -> String {
    match b {
        Body::Leaf(v) => v.to_string(),
        Body::Ite(c, t, e) => format!("(ite {} {} {})", render_cond(c, w), render_body(t, w), render_body(e, w)),
    }
}

fn eval_cond(c: &Cond, xs: [u64; 2]) -> bool {
    match c {
        Cond::EqVar(x, v) => xs[*x] == *v,
        Cond::Ult(a, b) => xs[*a] < xs[*b],
        Cond::And(a, b) => eval_cond(a, xs) && eval_cond(b, xs),
        Cond::Not(a) => !eval_cond(a, xs),
    }
}

fn eval_body(b: &Body, xs: [u64; 2]) -> bool {
    match b {
        Body::Leaf(v) => *v,
        Body::Ite(c, t, e) => {
            if eval_cond(c, xs) {
                eval_body(t, xs)
            } else {
                eval_body(e, xs)
            }
        }
    }
}

#[test]
fn random_ite_nests_match_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for round in 0..200 {
        let w = rng.gen_range(1..=4u32);
        let body = gen_body(&mut rng, w, 5);
        let text = format!(
            "((define-fun f ((x0 (_ BitVec {w})) (x1 (_ BitVec {w}))) Bool {}))",
            render_body(&body, w)
        );
        let m = parse_model(&text).unwrap();
        let dom: Vec<MValue> = (0..1u64 << w).map(|v| MValue::Bv { value: v, width: w }).collect();
        let table = m.table("f", &[dom.clone(), dom]).unwrap();
        for (args, v) in &table {
            let xs = [args[0].as_bv().unwrap(), args[1].as_bv().unwrap()];
            assert_eq!(v, &MValue::Bool(eval_body(&body, xs)), "round {round}: {text} at {xs:?}");
        }
        assert_eq!(table.len(), 1 << (2 * w));
    }
}

fn sample_script() -> SmtScript {
    let mut s = SmtScript::new(Logic::Bounded);
    s.comment("signatures");
    s.push(Item::DeclareFun {
        name: "isAddr".into(),
        args: vec![Sort::BitVec(5)],
        ret: Sort::Bool,
    });
    s.push(Item::DeclareFun {
        name: "isName".into(),
        args: vec![Sort::BitVec(5)],
        ret: Sort::Bool,
    });
    s.push(Item::DeclareFun {
        name: "b'".into(),
        args: vec![],
        ret: Sort::BitVec(5),
    });
    s.push(Item::DefineFun {
        name: "live".into(),
        params: vec![("x".into(), Sort::BitVec(5))],
        ret: Sort::Bool,
        body: app("bvult", vec![sym("x"), bv(20, 5)]),
    });
    let t = || vec![("t".to_string(), Sort::BitVec(5))];
    s.assert(forall(
        t(),
        smt::or(vec![app("isAddr", vec![sym("t")]), app("isName", vec![sym("t")])]),
    ));
    s.assert(forall(
        t(),
        not(and(vec![app("isAddr", vec![sym("t")]), app("isName", vec![sym("t")])])),
    ));
    s.assert(eq(sym("b'"), bv(16, 5)));
    // Negative literal, kept unfolded to exercise its rendering.
    s.assert(Term::Eq(Box::new(Term::IntLit(-3)), Box::new(Term::IntLit(-3))));
    s.finish();
    s
}

#[test]
fn serialize_round_trips_and_is_deterministic() {
    let s = sample_script();
    s.validate().unwrap();
    let text = serialize(&s);
    assert_eq!(text, serialize(&s.clone()));
    assert!(text.contains("(declare-fun isAddr ((_ BitVec 5)) Bool)"), "{text}");
    assert!(text.contains("|b'|"), "{text}");
    assert!(text.contains("(forall ((t (_ BitVec 5))) (or (isAddr t) (isName t)))"), "{text}");
    let back = parse_script(&text).unwrap();
    assert_eq!(back, s);
}

#[test]
fn serialize_distinguishes_distinct_scripts() {
    let a = sample_script();
    let mut b = sample_script();
    b.items.insert(1, Item::Comment("extra".into()));
    let mut c = sample_script();
    c.logic = Logic::Unbounded;
    assert_ne!(serialize(&a), serialize(&b));
    assert_ne!(serialize(&a), serialize(&c));
}

#[test]
fn empty_script_is_minimal() {
    let mut s = SmtScript::new(Logic::Bounded);
    s.push(Item::CheckSat);
    s.validate().unwrap();
    assert_eq!(serialize(&s), "(set-option :produce-models true)\n(set-logic UFBV)\n(check-sat)\n");
}

#[test]
fn validation_rejects_use_before_declaration() {
    let mut s = SmtScript::new(Logic::Unbounded);
    s.assert(app("isName", vec![sym("x")]));
    s.finish();
    assert!(s.validate().is_err());
    let mut s = SmtScript::new(Logic::Unbounded);
    s.push(Item::DeclareFun {
        name: "f".into(),
        args: vec![Sort::Named("Book".into())],
        ret: Sort::Bool,
    });
    s.finish();
    assert!(s.validate().unwrap_err().contains("Book"));
}

fn z3() -> SolverCmd {
    SolverCmd::parse("z3 -smt2").unwrap()
}

#[test]
fn solver_reports_unsat_without_model() {
    let mut s = SmtScript::new(Logic::Bounded);
    s.push(Item::DeclareFun {
        name: "x".into(),
        args: vec![],
        ret: Sort::BitVec(2),
    });
    s.assert(app("bvult", vec![sym("x"), bv(0, 2)]));
    s.finish();
    let out = run_solver(&z3(), &s, Duration::from_secs(30), None).unwrap();
    assert_eq!(out.status, Status::Unsat);
    assert!(out.model.is_none());
}

#[test]
fn solver_sat_model_is_parsed() {
    let mut s = SmtScript::new(Logic::Bounded);
    s.push(Item::DeclareFun {
        name: "x".into(),
        args: vec![],
        ret: Sort::BitVec(4),
    });
    s.push(Item::DeclareFun {
        name: "r".into(),
        args: vec![Sort::BitVec(4), Sort::BitVec(4)],
        ret: Sort::Bool,
    });
    s.assert(eq(sym("x"), bv(9, 4)));
    s.assert(app("r", vec![sym("x"), bv(3, 4)]));
    s.assert(not(app("r", vec![bv(3, 4), sym("x")])));
    s.finish();
    let dir = tempfile::tempdir().unwrap();
    let keep = dir.path().join("q.smt2");
    let out = run_solver(&z3(), &s, Duration::from_secs(30), Some(&keep)).unwrap();
    assert_eq!(std::fs::read_to_string(&keep).unwrap(), serialize(&s));
    assert_eq!(out.status, Status::Sat);
    let m = out.model.expect("model");
    assert_eq!(m.apply("x", &[]).unwrap(), MValue::Bv { value: 9, width: 4 });
    let b4 = |v| MValue::Bv { value: v, width: 4 };
    assert_eq!(m.apply("r", &[b4(9), b4(3)]).unwrap(), MValue::Bool(true));
    assert_eq!(m.apply("r", &[b4(3), b4(9)]).unwrap(), MValue::Bool(false));
}

/// Pigeonhole formula with `holes + 1` pigeons: unsatisfiable and
/// exponentially hard for resolution-based solvers.
pub fn pigeonhole(holes: usize) -> String {
    let mut out = String::from("(set-logic QF_UF)\n");
    for p in 0..=holes {
        for h in 0..holes {
            out.push_str(&format!("(declare-const p{p}_{h} Bool)\n"));
        }
    }
    for p in 0..=holes {
        let vs: Vec<String> = (0..holes).map(|h| format!("p{p}_{h}")).collect();
        out.push_str(&format!("(assert (or {}))\n", vs.join(" ")));
    }
    for h in 0..holes {
        for a in 0..=holes {
            for b in a + 1..=holes {
                out.push_str(&format!("(assert (not (and p{a}_{h} p{b}_{h})))\n"));
            }
        }
    }
    out.push_str("(check-sat)\n");
    out
}

#[test]
fn hard_instance_times_out() {
    let out = run_solver_text(&z3(), &pigeonhole(11), Duration::from_secs(1)).unwrap();
    assert_eq!(out.status, Status::Timeout);
    assert!(out.elapsed < Duration::from_secs(5), "{:?}", out.elapsed);
}

#[test]
fn missing_solver_and_crashes_are_errors() {
    let missing = SolverCmd::parse("definitely-not-a-solver-binary").unwrap();
    let err = run_solver_text(&missing, "(check-sat)\n", Duration::from_secs(5)).unwrap_err();
    assert!(matches!(err, smt::SolverError::SolverNotFound(_)), "{err}");
    let crash = SolverCmd::parse("false").unwrap();
    let err = run_solver_text(&crash, "(check-sat)\n", Duration::from_secs(5)).unwrap_err();
    assert!(matches!(err, smt::SolverError::SolverCrashed { .. }), "{err}");
}

#[test]
fn solver_errors_have_error_status() {
    let out = run_solver_text(&z3(), "(assert undeclared)\n(check-sat)\n", Duration::from_secs(10)).unwrap();
    assert_eq!(out.status, Status::Error);
}

#[test]
fn table_over_empty_domain_is_empty() {
    let m = parse_model("((define-fun f ((x (_ BitVec 1))) Bool true))").unwrap();
    let t: BTreeMap<_, _> = m.table("f", &[vec![]]).unwrap();
    assert!(t.is_empty());
}
