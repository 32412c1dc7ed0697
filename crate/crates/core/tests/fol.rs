use std::collections::BTreeMap;
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relcheck::eval::{enumerate_instances, holds, product, EnumConfig, Instance, TupleSet};
use relcheck::fol::*;
use relcheck::model::{typecheck, Model};
use relcheck::syntax::parse;

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn model(text: &str) -> Model {
    typecheck(&parse(text).unwrap()).unwrap()
}

fn addressbook() -> Model {
    model(&fixture("addressbook.als"))
}

fn rel_consts(ob: &Obligation, k: usize) -> Vec<String> {
    ob.constants
        .iter()
        .filter(|c| matches!(c.role, ConstRole::Sig(_) | ConstRole::Field(_)))
        .filter(|c| c.decl.result == Some(FSort::Rel(k)))
        .map(|c| c.decl.name.clone())
        .collect()
}

#[test]
fn lookup_yields_obligation_declares_the_model_constants() {
    let m = addressbook();
    let ob = export_obligation(&m, "lookupYields", None).unwrap();
    assert_eq!(rel_consts(&ob, 1), ["Target", "Name", "Address", "Book"]);
    assert_eq!(rel_consts(&ob, 2), ["names"]);
    assert_eq!(rel_consts(&ob, 3), ["addr"]);
    let (bij, axioms) = ob.ordering.as_ref().unwrap();
    assert_eq!(bij.args, [FSort::Int]);
    assert_eq!(bij.result, Some(FSort::Atom));
    let names: Vec<&str> = axioms.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["ord_cover", "ord_into", "ord_inj", "ord_link"]);
    ob.check_well_formed().unwrap();
}

#[test]
fn lookup_yields_goal_is_traces_implies_forall() {
    let m = addressbook();
    let ob = export_obligation(&m, "lookupYields", None).unwrap();
    let Formula::Implies(_, consequent) = &ob.goal else { panic!("goal is an implication") };
    let Formula::Implies(lhs, rhs) = &**consequent else { panic!("assertion is an implication") };
    assert_eq!(**lhs, Formula::Pred("traces".into(), vec![]));
    let Formula::Forall(vs, _) = &**rhs else { panic!("quantified conclusion") };
    assert_eq!(vs[0], ("b".to_string(), FSort::Atom));
    check_structure(&m, &ob).unwrap();
}

#[test]
fn constraints_cover_hierarchy_abstractness_and_fields() {
    let m = addressbook();
    let ob = export_obligation(&m, "lookupYields", None).unwrap();
    let names: Vec<&str> = ob.constraints.iter().map(|a| a.name.as_str()).collect();
    for expected in [
        "sub_Name",
        "sub_Address",
        "disj_Target_Book",
        "disj_Name_Address",
        "abstract_Target",
        "type_names",
        "mult_names",
        "type_addr",
        "mult_addr",
        "fact_acyclicity",
    ] {
        assert!(names.contains(&expected), "missing {expected} in {names:?}");
    }
}

#[test]
fn theory_is_restricted_to_used_arities() {
    let m = model("sig A { f: set A } assert t { all x: A | x.f in A }");
    let ob = export_obligation(&m, "t", None).unwrap();
    assert!(ob.theory.max_arity() <= 2);
    let text = ob.render();
    assert!(!text.contains("Tuple3"));
    assert!(!text.contains("Rel3"));
    assert!(text.contains("Tuple2 binary(Atom, Atom);"));
    assert!(text.contains("binary_inj"));
    assert!(text.contains("binary_cover"));
}

#[test]
fn every_structural_check_passes_on_the_fixture_assertions() {
    let m = addressbook();
    for a in &m.assertions {
        let ob = export_obligation(&m, &a.name, None).unwrap();
        check_structure(&m, &ob).unwrap_or_else(|e| panic!("{}: {e}", a.name));
    }
}

#[test]
fn structure_of_counting_quantifiers_and_integers_is_preserved() {
    let m = model(
        "sig A { f: set A }
         assert q1 { one x: A | some x.f }
         assert q2 { lone x, y: A | x in y.f }
         assert q3 { no x: A | x in x.f }
         assert q4 { all i: Int | i + 1 > i or i = 3 }
         assert q5 { some x: A | all y: A | y in x.f }",
    );
    for a in ["q1", "q2", "q3", "q4", "q5"] {
        let ob = export_obligation(&m, a, None).unwrap();
        check_structure(&m, &ob).unwrap_or_else(|e| panic!("{a}: {e}"));
    }
}

#[test]
fn structure_check_detects_a_changed_goal() {
    let m = addressbook();
    let mut ob = export_obligation(&m, "delUndoesAdd", None).unwrap();
    let Formula::Implies(c, _) = ob.goal.clone() else { unreachable!() };
    ob.goal = Formula::Implies(c, Box::new(Formula::True));
    assert!(check_structure(&m, &ob).is_err());
}

#[test]
fn rendering_is_deterministic() {
    let m = addressbook();
    let a = export_obligation(&m, "lookupYields", None).unwrap().render();
    let b = export_obligation(&addressbook(), "lookupYields", None).unwrap().render();
    assert_eq!(a, b);
    assert!(a.contains("\\sorts {"));
    assert!(a.contains("Rel3 addr;"));
    assert!(a.contains("ord_inj:"));
    assert!(a.contains("\\problem {"));
}

#[test]
fn finite_ordering_uses_an_interval() {
    let m = addressbook();
    let ob = export_obligation(&m, "lookupYields", Some(5)).unwrap();
    let text = ob.render();
    assert!(text.contains("(i < 5)"));
    assert!(text.contains("ord_b(4)"));
    assert!(export_obligation(&m, "lookupYields", Some(0)).is_err());
}

#[test]
fn export_writes_one_file_per_assertion() {
    let m = addressbook();
    let dir = tempfile::tempdir().unwrap();
    for a in ["delUndoesAdd", "lookupYields"] {
        let ob = export_obligation(&m, a, None).unwrap();
        let path = ob.write_to(dir.path()).unwrap();
        assert_eq!(std::fs::read_to_string(path).unwrap(), ob.render());
    }
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn unknown_assertion_is_an_error() {
    let m = addressbook();
    assert!(matches!(export_obligation(&m, "nope", None), Err(FolError::UnknownAssertion(_))));
}

#[test]
fn trivially_valid_goal_over_an_empty_signature() {
    let m = model("sig A {} assert t { no A or some A }");
    let ob = export_obligation(&m, "t", None).unwrap();
    for n in 1..=3u32 {
        for mask in 0..1u64 << n {
            let interp = FolInterp::new(n).with_const("A", Value::Rel(RelValue::from_mask(n, 1, mask)));
            assert!(interp.holds(&ob.goal).unwrap());
        }
    }
}

/// The product axiom defines the product: with `prod_1x1(r, s)` replaced by
/// a constant `P`, the axiom holds iff `P` is the evaluator's Cartesian
/// product, for each of the 16 pairs of unary relations over 2 atoms.
#[test]
fn product_axiom_matches_cartesian_product_on_two_atoms() {
    let axiom = OpInstance::Prod(1, 1).axioms().remove(0).formula;
    let Formula::Forall(_, body) = axiom else { panic!() };
    let body = replace_term(&body, &func("prod_1x1", vec![var("r"), var("s")]), &konst("P"));
    let n = 2;
    let sets = |mask: u64| -> TupleSet { (0..n).filter(|a| mask >> a & 1 == 1).map(|a| vec![a]).collect() };
    let mut pairs = 0;
    for rm in 0..4u64 {
        for sm in 0..4u64 {
            pairs += 1;
            let expected = product(&sets(rm), &sets(sm));
            for pm in 0..16u64 {
                let p = RelValue::from_mask(n, 2, pm);
                let interp = FolInterp::new(n).with_const("P", Value::Rel(p.clone()));
                let env = [
                    ("r".to_string(), Value::Rel(RelValue::from_mask(n, 1, rm))),
                    ("s".to_string(), Value::Rel(RelValue::from_mask(n, 1, sm))),
                ];
                let is_product = p.tuples(n).into_iter().collect::<TupleSet>() == expected;
                assert_eq!(interp.holds_with(&body, &env).unwrap(), is_product);
            }
        }
    }
    assert_eq!(pairs, 16);
}

fn replace_term(f: &Formula, from: &FTerm, to: &FTerm) -> Formula {
    fn t(x: &FTerm, from: &FTerm, to: &FTerm) -> FTerm {
        if x == from {
            return to.clone();
        }
        match x {
            FTerm::Fn(g, args) => FTerm::Fn(g.clone(), args.iter().map(|a| t(a, from, to)).collect()),
            _ => x.clone(),
        }
    }
    let r = |g: &Formula| replace_term(g, from, to);
    match f {
        Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| t(a, from, to)).collect()),
        Formula::Eq(a, b) => Formula::Eq(t(a, from, to), t(b, from, to)),
        Formula::Not(a) => not(r(a)),
        Formula::And(xs) => Formula::And(xs.iter().map(r).collect()),
        Formula::Or(xs) => Formula::Or(xs.iter().map(r).collect()),
        Formula::Implies(a, b) => implies(r(a), r(b)),
        Formula::Iff(a, b) => iff(r(a), r(b)),
        Formula::Forall(vs, b) => Formula::Forall(vs.clone(), Box::new(r(b))),
        Formula::Exists(vs, b) => Formula::Exists(vs.clone(), Box::new(r(b))),
        other => other.clone(),
    }
}

#[test]
fn theory_axioms_hold_in_the_standard_interpretation() {
    let m = addressbook();
    let ob = export_obligation(&m, "lookupYields", None).unwrap();
    for n in 1..=2 {
        let interp = FolInterp::new(n);
        for ax in ob.theory.axioms() {
            assert!(interp.holds(&ax.formula).unwrap(), "{} fails on {n} atoms", ax.name);
        }
    }
}

/// The exported constraints and assertion evaluate like the source
/// formulas on every small instance of the address book.
#[test]
fn exported_formulas_agree_with_the_evaluator() {
    let m = addressbook();
    let ob = export_obligation(&m, "lookupYields", None).unwrap();
    let sources = m.constraints();
    let exported: Vec<&Formula> = ob
        .constraints
        .iter()
        .filter(|a| a.name.starts_with("type_") || a.name.starts_with("mult_") || a.name.starts_with("fact_"))
        .map(|a| &a.formula)
        .collect();
    assert_eq!(sources.len(), exported.len());
    let cfg = EnumConfig {
        respect_multiplicity: false,
        ..EnumConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for sizes in [[1u32, 1], [2, 1], [1, 2], [2, 2]] {
        let tops = m.top_levels();
        let sizes: BTreeMap<usize, u32> = tops.iter().copied().zip(sizes).collect();
        enumerate_instances(&m, &sizes, &cfg, &mut |inst: &Instance| {
            // Sample the larger universes to keep the test quick.
            if rng.gen_range(0..8) != 0 && sizes.values().sum::<u32>() > 3 {
                return ControlFlow::Continue(());
            }
            let interp = FolInterp::from_instance(&m, &ob, inst);
            for (src, f) in sources.iter().zip(&exported) {
                assert_eq!(holds(&m, inst, src), interp.holds(f).unwrap(), "{f}");
            }
            let a = &m.assertion("lookupYields").unwrap().body;
            assert_eq!(holds(&m, inst, a), interp.holds(&ob.assertion_formula).unwrap());
            for c in &ob.constraints {
                if c.name.starts_with("sub_") || c.name.starts_with("disj_") || c.name.starts_with("abstract_") {
                    assert!(interp.holds(&c.formula).unwrap(), "{}", c.name);
                }
            }
            checked += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
    }
    assert!(checked > 100, "only {checked} instances checked");
}

// ----- lemmas -----------------------------------------------------------------

fn rel1(name: &str) -> FTerm {
    var(name)
}

#[test]
fn union_subset_rewrites_to_the_superset() {
    let (r, s) = (rel1("r"), rel1("s"));
    let f = pred("some_1", vec![func("union_1", vec![r.clone(), s.clone()])]);
    let out = rewrite_with_lemmas(&f, &[pred("subset_1", vec![r, s.clone()])], 100);
    assert_eq!(out.formula, pred("some_1", vec![s]));
    assert_eq!(out.applied, ["unionSubset"]);
    assert!(!out.budget_exceeded);
}

#[test]
fn union_with_itself_rewrites_by_reflexivity() {
    let r = rel1("r");
    let f = pred("some_1", vec![func("union_1", vec![r.clone(), r.clone()])]);
    let out = rewrite_with_lemmas(&f, &[], 100);
    assert_eq!(out.formula, pred("some_1", vec![r]));
    assert_eq!(out.applied, ["subsetRefl", "unionSubset"]);
}

#[test]
fn use_subset_derives_membership() {
    let (r, s, t) = (rel1("r"), rel1("s"), rel1("t"));
    let x = var("x");
    let hyps = [
        mem(x.clone(), r.clone()),
        pred("subset_1", vec![r.clone(), s.clone()]),
        pred("subset_1", vec![s, t.clone()]),
    ];
    let out = rewrite_with_lemmas(&mem(x, t), &hyps, 100);
    assert_eq!(out.formula, Formula::True);
    assert!(out.applied.contains(&"useSubset"));
    assert!(out.applied.contains(&"subsetTrans"));
}

#[test]
fn antecedents_serve_as_hypotheses() {
    let (r, s) = (rel1("r"), rel1("s"));
    let f = implies(
        pred("subset_1", vec![r.clone(), s.clone()]),
        pred("no_1", vec![func("diff_1", vec![r.clone(), s.clone()])]),
    );
    let out = rewrite_with_lemmas(&f, &[], 100);
    assert!(out.applied.contains(&"diffEmpty"));
    assert_eq!(
        out.formula,
        implies(pred("subset_1", vec![r, s]), pred("no_1", vec![konst("none_1")]))
    );
}

#[test]
fn join_monotonicity_proves_subsets_of_joins() {
    let (r, s, t) = (var("r"), var("s"), var("t"));
    let goal = pred(
        "subset_1",
        vec![func("join_1x2", vec![t.clone(), r.clone()]), func("join_1x2", vec![t, s.clone()])],
    );
    let out = rewrite_with_lemmas(&goal, &[pred("subset_2", vec![r, s])], 100);
    assert_eq!(out.formula, Formula::True);
    assert_eq!(out.applied, ["joinMonotone"]);
}

#[test]
fn budget_exhaustion_returns_the_partial_result() {
    let (r, s) = (rel1("r"), rel1("s"));
    let u = func("union_1", vec![r.clone(), s.clone()]);
    let f = Formula::And(vec![pred("some_1", vec![u.clone()]), pred("no_1", vec![u])]);
    let out = rewrite_with_lemmas(&f, &[pred("subset_1", vec![r, s.clone()])], 1);
    assert!(out.budget_exceeded);
    assert_eq!(out.applied.len(), 1);
    assert_eq!(
        out.formula,
        Formula::And(vec![
            pred("some_1", vec![s.clone()]),
            pred("no_1", vec![func("union_1", vec![rel1("r"), s])])
        ])
    );
}

#[test]
fn shipped_lemmas_are_sound_on_small_universes() {
    let checks = validate_lemmas(3).unwrap();
    let failed: Vec<_> = checks.iter().filter(|c| !c.holds).collect();
    assert!(failed.is_empty(), "{failed:?}");
    for name in [
        "unionSubset",
        "useSubset",
        "intersectSubset",
        "diffEmpty",
        "joinMonotone",
        "subsetRefl",
        "subsetTrans",
    ] {
        assert!(checks.iter().any(|c| c.lemma == name && c.atoms == 3), "{name} unchecked on 3 atoms");
    }
}

#[test]
fn a_false_lemma_is_caught() {
    let mut rule = shipped_lemmas(1, 2).into_iter().find(|r| r.name == "unionSubset").unwrap();
    rule.premises.clear();
    assert!(!check_lemma_finite(&rule, 2).unwrap());
}

/// Random formula over r and s, with atom variable x free.
fn random_term(rng: &mut ChaCha8Rng, k: usize, depth: u32) -> FTerm {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..5) {
            0 => konst(&format!("none_{k}")),
            1 | 2 => var("r"),
            _ => var("s"),
        };
    }
    let op = ["union", "inter", "diff"][rng.gen_range(0..3)];
    func(&format!("{op}_{k}"), vec![random_term(rng, k, depth - 1), random_term(rng, k, depth - 1)])
}

fn random_formula(rng: &mut ChaCha8Rng, k: usize, depth: u32) -> Formula {
    let x = tuple(atom_vars("x", k).iter().map(|(v, _)| var(v)).collect());
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => pred(&format!("subset_{k}"), vec![random_term(rng, k, 2), random_term(rng, k, 2)]),
            1 => mem(x, random_term(rng, k, 2)),
            2 => pred(&format!("some_{k}"), vec![random_term(rng, k, 2)]),
            _ => Formula::Eq(random_term(rng, k, 2), random_term(rng, k, 2)),
        };
    }
    match rng.gen_range(0..4) {
        0 => not(random_formula(rng, k, depth - 1)),
        1 => Formula::And(vec![random_formula(rng, k, depth - 1), random_formula(rng, k, depth - 1)]),
        2 => Formula::Or(vec![random_formula(rng, k, depth - 1), random_formula(rng, k, depth - 1)]),
        _ => implies(random_formula(rng, k, depth - 1), random_formula(rng, k, depth - 1)),
    }
}

#[test]
fn rewriting_preserves_truth_on_all_small_interpretations() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut rewritten = 0;
    for case in 0..300 {
        let k = if case % 3 == 0 { 2 } else { 1 };
        let max_atoms = if k == 1 { 3 } else { 2 };
        let f = random_formula(&mut rng, k, 3);
        let mut hyps = vec![];
        if rng.gen_bool(0.7) {
            hyps.push(pred(&format!("subset_{k}"), vec![var("r"), var("s")]));
        }
        if rng.gen_bool(0.3) {
            let x = tuple(atom_vars("x", k).iter().map(|(v, _)| var(v)).collect());
            hyps.push(mem(x, var("r")));
        }
        let out = rewrite_with_lemmas(&f, &hyps, 50);
        if out.formula != f {
            rewritten += 1;
        }
        let hyp = Formula::And(hyps.clone());
        let xs = atom_vars("x", k);
        for n in 1..=max_atoms {
            let interp = FolInterp::new(n);
            let tuples = (n as usize).pow(k as u32);
            for rm in 0..1u64 << tuples {
                for sm in 0..1u64 << tuples {
                    for xi in 0..tuples {
                        let mut env = vec![
                            ("r".to_string(), Value::Rel(RelValue::from_mask(n, k, rm))),
                            ("s".to_string(), Value::Rel(RelValue::from_mask(n, k, sm))),
                        ];
                        let mut i = xi;
                        for (v, _) in xs.iter().rev() {
                            env.push((v.clone(), Value::Atom((i % n as usize) as u32)));
                            i /= n as usize;
                        }
                        if !interp.holds_with(&hyp, &env).unwrap() {
                            continue;
                        }
                        assert_eq!(
                            interp.holds_with(&f, &env).unwrap(),
                            interp.holds_with(&out.formula, &env).unwrap(),
                            "{f}\nrewrote to\n{}",
                            out.formula
                        );
                    }
                }
            }
        }
    }
    assert!(rewritten > 50, "only {rewritten} formulas were rewritten");
}

// ----- closure induction ---------------------------------------------------------

fn phi(body: Formula) -> ParamFormula {
    ParamFormula::new(&[("a", FSort::Atom), ("b", FSort::Atom)], body)
}

#[test]
fn tc_induct_needs_two_atom_parameters() {
    let one = ParamFormula::new(&[("a", FSort::Atom)], Formula::True);
    assert!(matches!(check_tc_induct_instance(&one, &var("r")), Err(FolError::ArityError(_))));
    let three = ParamFormula::new(&[("a", FSort::Atom), ("b", FSort::Atom), ("c", FSort::Atom)], Formula::True);
    assert!(matches!(check_tc_induct_instance(&three, &var("r")), Err(FolError::ArityError(_))));
    let int = ParamFormula::new(&[("a", FSort::Atom), ("i", FSort::Int)], Formula::True);
    assert!(check_tc_induct_instance(&int, &var("r")).is_err());
}

#[test]
fn tc_induct_instance_has_the_rule_shape() {
    let inst = check_tc_induct_instance(&phi(not(Formula::Eq(var("a"), var("b")))), &konst("R")).unwrap();
    assert_eq!(
        inst.base.to_string(),
        "(\\forall Atom a1; \\forall Atom b1; (in(binary(a1, b1), R) -> !(a1 = b1)))"
    );
    assert_eq!(
        inst.step.to_string(),
        "(\\forall Atom a1; \\forall Atom b1; \\forall Atom c; ((in(binary(a1, b1), R) & in(binary(b1, c), transClos(R)) & !(b1 = c)) -> !(a1 = c)))"
    );
    assert_eq!(
        inst.conclusion.to_string(),
        "(\\forall Atom a1; \\forall Atom b1; (in(binary(a1, b1), transClos(R)) -> !(a1 = b1)))"
    );
}

#[test]
fn irreflexivity_of_an_acyclic_closure() {
    // 0 -> 1 -> 2 is acyclic; its closure is irreflexive.
    let n = 3;
    let r = RelValue::from_tuples(n, 2, [&[0, 1][..], &[1, 2][..]]);
    let inst = check_tc_induct_instance(&phi(not(Formula::Eq(var("a"), var("b")))), &konst("R")).unwrap();
    let interp = FolInterp::new(n).with_const("R", Value::Rel(r));
    assert!(interp.holds(&inst.base).unwrap());
    assert!(interp.holds(&inst.step).unwrap());
    assert!(interp.holds(&inst.conclusion).unwrap());
    // On every 3-atom relation, true premises give a true conclusion.
    for mask in 0..1u64 << 9 {
        let interp = FolInterp::new(n).with_const("R", Value::Rel(RelValue::from_mask(n, 2, mask)));
        if interp.holds(&inst.base).unwrap() && interp.holds(&inst.step).unwrap() {
            assert!(interp.holds(&inst.conclusion).unwrap());
        }
    }
}

#[test]
fn constantly_true_instance_is_trivial() {
    let inst = check_tc_induct_instance(&phi(Formula::True), &konst("R")).unwrap();
    for mask in 0..16u64 {
        let interp = FolInterp::new(2).with_const("R", Value::Rel(RelValue::from_mask(2, 2, mask)));
        for f in [&inst.base, &inst.step, &inst.conclusion] {
            assert!(interp.holds(f).unwrap());
        }
    }
}

#[test]
fn rule_instances_with_distinct_formulas_are_emitted_twice() {
    let m = addressbook();
    let mut ob = export_obligation(&m, "lookupYields", None).unwrap();
    let r = func("join_1x3", vec![func("sing", vec![var("bk")]), konst("addr")]);
    let wrap = |inst: TcInductInstance| {
        let f = |g: Formula| forall(vec![("bk".into(), FSort::Atom)], g);
        TcInductInstance {
            base: f(inst.base),
            step: f(inst.step),
            conclusion: f(inst.conclusion),
        }
    };
    let first = check_tc_induct_instance(&phi(not(Formula::Eq(var("a"), var("b")))), &r).unwrap();
    let second = check_tc_induct_instance(&phi(mem(var("b"), konst("Target"))), &r).unwrap();
    assert_ne!(first, second);
    // The relation mentions `bk`, so instances are closed by quantifying it.
    let n1 = ob.add_tc_induct(&TcInductInstance {
        base: first.base.clone(),
        step: first.step.clone(),
        conclusion: first.conclusion.clone(),
    });
    assert!(n1.is_err(), "an instance with a free variable is rejected");
    ob.rule_instances.clear();
    assert_eq!(ob.add_tc_induct(&wrap(first)).unwrap(), "tc_induct_1");
    assert_eq!(ob.add_tc_induct(&wrap(second)).unwrap(), "tc_induct_2");
    let text = ob.render();
    assert!(text.contains("tc_induct_1:"));
    assert!(text.contains("tc_induct_2:"));
}

#[test]
fn tc_induct_is_sound_on_three_atoms_for_depth_one_formulas() {
    let report = check_tc_induct_finite(3, 1).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    assert!(report.premises_held > 0);
}

#[test]
fn relations_up_to_isomorphism_cover_all_classes() {
    // Known counts of binary relations up to isomorphism (with loops).
    assert_eq!(binary_relations_up_to_iso(1).len(), 2);
    assert_eq!(binary_relations_up_to_iso(2).len(), 10);
    assert_eq!(binary_relations_up_to_iso(3).len(), 104);
}
