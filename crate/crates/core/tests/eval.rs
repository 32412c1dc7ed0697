use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use proptest::prelude::*;
use relcheck::eval::*;
use relcheck::model::*;
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

/// Warshall's algorithm over an adjacency matrix: independent closure oracle.
fn warshall(n: usize, r: &TupleSet) -> TupleSet {
    let mut m = vec![vec![false; n]; n];
    for t in r {
        m[t[0] as usize][t[1] as usize] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                m[i][j] |= m[i][k] && m[k][j];
            }
        }
    }
    let mut out = TupleSet::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            if b {
                out.insert(vec![i as u32, j as u32]);
            }
        }
    }
    out
}

fn relation(n: u32, bits: u64) -> TupleSet {
    let mut r = TupleSet::new();
    for i in 0..n {
        for j in 0..n {
            if bits >> (i * n + j) & 1 == 1 {
                r.insert(vec![i, j]);
            }
        }
    }
    r
}

#[test]
fn closure_of_empty_relation_is_empty() {
    assert!(closure(&TupleSet::new()).is_empty());
}

#[test]
fn closure_matches_warshall_exhaustively_on_three_atoms() {
    for bits in 0..(1u64 << 9) {
        let r = relation(3, bits);
        assert_eq!(closure(&r), warshall(3, &r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn closure_matches_warshall_up_to_six_atoms(n in 1u32..=6, bits in any::<u64>()) {
        let r = relation(n, bits);
        let c = closure(&r);
        prop_assert_eq!(&c, &warshall(n as usize, &r));
        prop_assert_eq!(closure(&c), c);
    }
}

/// Book$0 with addr = {(Book$0, Name n, Address a1)}.
fn lookup_instance(m: &Model) -> Instance {
    let text = r#"{
      "universe": {"Book": 1, "Target": 2},
      "sigs": {"Book": ["Book$0"], "Target": ["Target$0", "Target$1"],
               "Name": ["Target$0"], "Address": ["Target$1"]},
      "fields": {"names": [["Book$0", "Target$0"]],
                 "addr": [["Book$0", "Target$0", "Target$1"]]},
      "ints": {"window": {"lo": -4, "hi": 4}}
    }"#;
    Instance::from_json_str(m, text).unwrap()
}

#[test]
fn lookup_follows_addr_to_an_address() {
    let m = addressbook();
    let inst = lookup_instance(&m);
    let lookup = m.template_by_name("lookup").unwrap();
    let book = m.sig_by_name("Book").unwrap();
    let name = m.sig_by_name("Name").unwrap();
    let args = vec![
        RelExpr::var(fresh_var("b"), m.sig_ty(book)),
        RelExpr::var(fresh_var("n"), m.sig_ty(name)),
    ];
    let mut env = Env::new();
    for a in &args {
        let ExprKind::Var(v) = &a.kind else { unreachable!() };
        // Both the book and the name are atom 0 of their universes.
        env.insert(v.id, Value::atom(0));
    }
    let call = RelExpr::new(ExprKind::Call(lookup, args.clone()), m.templates[lookup].result.clone());
    let expected: TupleSet = [vec![1]].into_iter().collect();
    assert_eq!(eval(&m, &call, &inst, &env), Value::Rel(expected.clone()));
    // The inlined body agrees with evaluation through the call.
    let inlined = expand_calls(&m, &call);
    assert_eq!(eval(&m, &inlined, &inst, &env), Value::Rel(expected));
    assert!(satisfies_constraints(&m, &inst));
}

#[test]
fn closure_of_book_addr_evaluates_over_name_target() {
    let src = format!("{}\nassert q {{ all b: Book | some ^(b.addr) }}", fixture("addressbook_core.als"));
    let m = model(&src);
    let inst = lookup_instance(&m);
    assert!(holds(&m, &inst, &m.assertion("q").unwrap().body));
}

#[test]
fn buggy_assertion_has_a_two_atom_counterexample() {
    let m = addressbook();
    let ce = enumerate_check(&m, "delUndoesAddBuggy", 2).unwrap().expect("counterexample");
    assert!(validate_counterexample(&m, "delUndoesAddBuggy", &ce));
}

#[test]
fn fixed_assertion_has_no_two_atom_counterexample() {
    let m = addressbook();
    assert_eq!(enumerate_check(&m, "delUndoesAdd", 2).unwrap(), None);
}

#[test]
fn tautology_has_no_counterexample() {
    let m = model("sig A {} assert t { all a: A | a in A }");
    for bound in 1..=4 {
        assert_eq!(enumerate_check(&m, "t", bound).unwrap(), None);
    }
}

#[test]
fn oracle_guards_its_bounds() {
    let m = model("sig A { f: set A } assert t { some A }");
    assert!(matches!(enumerate_check(&m, "t", 5), Err(EnumError::TooManyAtoms { .. })));
    let cfg = EnumConfig {
        budget: 10,
        ..EnumConfig::default()
    };
    let sizes = Instance::uniform_sizes(&m, 2);
    let r = enumerate_instances(&m, &sizes, &cfg, &mut |_| ControlFlow::Continue(()));
    assert_eq!(r, Err(EnumError::Budget { limit: 10 }));
    assert!(matches!(enumerate_check(&m, "nope", 1), Err(EnumError::UnknownAssertion(_))));
}

#[test]
fn acyclicity_violation_is_never_a_counterexample() {
    let m = addressbook();
    let text = r#"{
      "universe": {"Book": 1, "Target": 1},
      "sigs": {"Book": ["Book$0"], "Target": ["Target$0"], "Name": ["Target$0"], "Address": []},
      "fields": {"names": [["Book$0", "Target$0"]], "addr": [["Book$0", "Target$0", "Target$0"]]},
      "ints": {"window": {"lo": -4, "hi": 4}}
    }"#;
    let inst = Instance::from_json_str(&m, text).unwrap();
    for a in ["delUndoesAddBuggy", "delUndoesAdd", "lookupYields"] {
        assert!(!validate_counterexample(&m, a, &inst));
    }
}

#[test]
fn enumerated_instances_are_well_formed_and_distinct() {
    let m = addressbook();
    let sizes = Instance::uniform_sizes(&m, 2);
    let mut seen = BTreeSet::new();
    let n = enumerate_instances(&m, &sizes, &EnumConfig::default(), &mut |inst| {
        inst.check_wellformed(&m).unwrap();
        assert!(seen.insert(format!("{:?}", (&inst.sigs, &inst.fields))));
        ControlFlow::Continue(())
    })
    .unwrap();
    assert_eq!(n as usize, seen.len());
    assert!(n > 0);
}

#[test]
fn validation_agrees_with_its_definition_on_enumerated_instances() {
    let m = addressbook();
    let cfg = EnumConfig {
        respect_multiplicity: false,
        ..EnumConfig::default()
    };
    let sizes: BTreeMap<SigId, u32> = Instance::uniform_sizes(&m, 1);
    let mut checked = 0;
    enumerate_instances(&m, &sizes, &cfg, &mut |inst| {
        for a in &m.assertions {
            let constraints = RelExpr::and(m.constraints());
            let def = holds(&m, inst, &constraints) && !holds(&m, inst, &a.body);
            assert_eq!(validate_counterexample(&m, &a.name, inst), def);
        }
        checked += 1;
        ControlFlow::Continue(())
    })
    .unwrap();
    assert!(checked > 1);
}

/// Direct cardinality check of a field's multiplicity on an instance.
fn multiplicity_holds_directly(m: &Model, inst: &Instance, f: FieldId) -> bool {
    let field = &m.fields[f];
    let mut images: BTreeMap<Vec<Atom>, usize> = BTreeMap::new();
    for t in &inst.fields[f] {
        *images.entry(t[..t.len() - 1].to_vec()).or_default() += 1;
    }
    // Left tuples: owner atoms times the (possibly restricted) middle columns.
    let mut lefts: Vec<Vec<Atom>> = inst.sigs[field.owner].iter().map(|&o| vec![o]).collect();
    for i in 1..field.arity() - 1 {
        let mut next = Vec::new();
        for l in &lefts {
            let dom: Vec<Atom> = match field.restriction {
                Some((ri, g)) if ri == i => {
                    inst.fields[g].iter().filter(|t| t[0] == l[0]).map(|t| t[1]).collect()
                }
                _ => inst.sigs[field.columns[i]].iter().copied().collect(),
            };
            for x in dom {
                let mut l2 = l.clone();
                l2.push(x);
                next.push(l2);
            }
        }
        lefts = next;
    }
    lefts.iter().all(|l| {
        let k = images.get(l).copied().unwrap_or(0);
        match field.mult {
            Mult::Set => true,
            Mult::Some => k >= 1,
            Mult::One => k == 1,
            Mult::Lone => k <= 1,
        }
    })
}

fn check_multiplicity_oracle(m: &Model, atoms: u32) -> usize {
    let cfg = EnumConfig {
        respect_multiplicity: false,
        ..EnumConfig::default()
    };
    let mut checked = 0;
    for sizes in size_combinations(m, atoms) {
        enumerate_instances(m, &sizes, &cfg, &mut |inst| {
            for f in 0..m.fields.len() {
                let formula = holds(m, inst, &m.fields[f].multiplicity);
                assert_eq!(formula, multiplicity_holds_directly(m, inst, f), "field {}", m.fields[f].name);
            }
            checked += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
    }
    checked
}

#[test]
fn multiplicity_formulas_agree_with_cardinality_up_to_three_atoms() {
    for mult in ["set", "some", "one", "lone"] {
        let m = model(&format!("sig A {{ f: {mult} A }}"));
        assert_eq!(check_multiplicity_oracle(&m, 3), 2 + 16 + 512);
        let m = model(&format!("sig A {{}} sig B {{ f: {mult} A }}"));
        assert!(check_multiplicity_oracle(&m, 3) > 0);
    }
}

#[test]
fn ternary_multiplicity_formulas_agree_with_cardinality() {
    for mult in ["set", "some", "one", "lone"] {
        let m = model(&format!("sig A {{}} sig B {{ g: set A, f: g -> {mult} A, h: A -> {mult} B }}"));
        assert!(check_multiplicity_oracle(&m, 2) > 0);
    }
    // The address book itself, with arbitrary images, at two atoms.
    assert!(check_multiplicity_oracle(&addressbook(), 2) > 0);
}

#[test]
fn integer_semantics_expose_wrap_around() {
    let m = model("sig A {} assert inc { all x: Int | x + 1 > x }");
    let body = &m.assertion("inc").unwrap().body;
    let mut inst = Instance::empty(&m, &Instance::uniform_sizes(&m, 1));
    assert!(holds(&m, &inst, body));
    inst.ints = IntSemantics::Wrapping { bits: 3 };
    assert!(!holds(&m, &inst, body));
    assert_eq!(IntSemantics::Wrapping { bits: 3 }.normalize(4), -4);
    assert_eq!(IntSemantics::Wrapping { bits: 3 }.normalize(-5), 3);
}

#[test]
fn ordering_follows_atom_index() {
    let m = model("open util/ordering[S] sig S {} assert a { no first.prev and one last and all s: S - last | one s.next }");
    for n in 1..=4 {
        assert_eq!(enumerate_check(&m, "a", n).unwrap(), None);
    }
}

#[test]
fn counting_quantifiers_count_tuples() {
    let m = model("sig A {} assert one_pair { one x, y: A | x = y }");
    let inst1 = Instance::empty(&m, &Instance::uniform_sizes(&m, 1));
    let inst2 = Instance::empty(&m, &Instance::uniform_sizes(&m, 2));
    let body = &m.assertion("one_pair").unwrap().body;
    assert!(holds(&m, &inst1, body));
    assert!(!holds(&m, &inst2, body));
}

#[test]
fn instance_json_round_trips() {
    let m = addressbook();
    let sizes = Instance::uniform_sizes(&m, 2);
    let mut n = 0;
    enumerate_instances(&m, &sizes, &EnumConfig::default(), &mut |inst| {
        let text = inst.to_json_string(&m);
        assert_eq!(&Instance::from_json_str(&m, &text).unwrap(), inst);
        n += 1;
        if n == 50 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .unwrap();
    let bad = r#"{"universe": {"Book": 1}, "sigs": {}, "fields": {}, "ints": {"window": {"lo": 0, "hi": 0}}}"#;
    assert!(Instance::from_json_str(&m, bad).is_err());
}
