use proptest::prelude::*;
use relcheck::syntax::*;

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn address_book_declaration_counts() {
    let spec = parse(&fixture("addressbook_core.als")).unwrap();
    let c = spec.counts();
    assert_eq!(
        (c.opens, c.sigs, c.facts, c.funs, c.preds, c.asserts, c.checks),
        (1, 4, 1, 1, 3, 0, 0)
    );
}

#[test]
fn empty_input_has_no_declarations() {
    let spec = parse("").unwrap();
    assert!(spec.decls.is_empty());
    assert_eq!(pretty_print(&spec), "");
}

#[test]
fn check_against_unknown_assertion_parses() {
    let spec = parse("sig A {} check X for 3").unwrap();
    assert_eq!(spec.decls.len(), 2);
    let again = parse(&pretty_print(&spec)).unwrap();
    assert_eq!(again.decls, spec.decls);
}

#[test]
fn address_book_round_trips() {
    for name in ["addressbook_core.als", "addressbook.als"] {
        let spec = parse(&fixture(name)).unwrap();
        let printed = pretty_print(&spec);
        let again = parse(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
        assert_eq!(again.decls, spec.decls, "{printed}");
    }
}

#[test]
fn spans_lie_within_the_text() {
    let text = fixture("addressbook.als");
    let spec = parse(&text).unwrap();
    for d in &spec.decls {
        let s = d.span();
        assert!(s.start <= s.end && s.end <= text.len());
        assert!(s.line >= 1 && s.column >= 1);
    }
    let Decl::Sig(book) = &spec.decls[4] else { panic!("expected sig") };
    assert_eq!(book.names[0].span.line, 5);
    assert_eq!(&text[book.names[0].span.start..book.names[0].span.end], "Book");
}

#[test]
fn precedence_of_formula_operators() {
    let spec = parse("fact { a in b and c = d implies e in f or g in h }").unwrap();
    let Decl::Fact(f) = &spec.decls[0] else { panic!() };
    // or binds loosest, then implies, then and.
    let SExprKind::Binary(BinOp::Or, lhs, _) = &f.body[0].kind else { panic!("{:?}", f.body[0]) };
    let SExprKind::Binary(BinOp::Implies, lhs, _) = &lhs.kind else { panic!() };
    assert!(matches!(lhs.kind, SExprKind::Binary(BinOp::And, _, _)));
}

#[test]
fn adjacent_block_formulas_are_separate_items() {
    let spec = parse("pred p[a: A] { some a.f\n a.g = a.f }").unwrap();
    let Decl::Pred(p) = &spec.decls[0] else { panic!() };
    assert_eq!(p.body.len(), 2);
}

#[test]
fn quantifier_versus_multiplicity_prefix() {
    let spec = parse("fact { some x: A | x in B  some A }").unwrap();
    let Decl::Fact(f) = &spec.decls[0] else { panic!() };
    assert!(matches!(f.body[0].kind, SExprKind::Quant { quant: Quant::Some, .. }));
    // The body is one expression; the juxtaposed formula is a new block item.
    assert_eq!(f.body.len(), 2);
    let spec = parse("fact { some A  no B.f }").unwrap();
    let Decl::Fact(f) = &spec.decls[0] else { panic!() };
    assert_eq!(f.body.len(), 2);
    assert!(matches!(f.body[1].kind, SExprKind::Mult(MultOp::No, _)));
}

#[test]
fn not_in_and_equivalent_spellings() {
    let a = parse("fact { a !in b && c => d || e <=> f }").unwrap();
    let b = parse("fact { a not in b and c implies d or e iff f }").unwrap();
    assert_eq!(a.decls, b.decls);
}

#[test]
fn syntax_errors_carry_position_and_expectations() {
    let err = parse("sig A {\n  f: \n}").unwrap_err();
    match err {
        FrontendError::Syntax { span, expected, .. } => {
            assert_eq!(span.line, 3);
            assert!(expected.contains(&"identifier".to_string()));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn constructs_outside_the_subset_are_rejected() {
    for text in [
        "sig A { f: seq A }",
        "fact { iden in iden }",
        "fact { univ = univ }",
        "fact { #A = 1 }",
        "fact { ~f in f }",
        "fact { f ++ g in f }",
        "run p for 3",
        "open util/integer",
        "sig A in B {}",
        "one sig A {}",
        "check X for 3 but 2 A",
    ] {
        assert!(
            matches!(parse(text), Err(FrontendError::Unsupported { .. })),
            "{text}: {:?}",
            parse(text)
        );
    }
}

#[test]
fn repeated_ordering_import_is_rejected() {
    let err = parse("open util/ordering[A] open util/ordering[A] sig A {}").unwrap_err();
    assert!(matches!(err, FrontendError::DuplicateOrdering { .. }));
}

// ----- property-based round trip ---------------------------------------

fn ident_strategy() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["A", "B", "x", "y'", "f", "g_1", "Node", "r"]).prop_map(String::from)
}

fn ident(name: String) -> Ident {
    Ident {
        name,
        span: Span::default(),
    }
}

fn mk(kind: SExprKind) -> SExpr {
    SExpr::new(kind, Span::default())
}

fn var_decl_strategy(expr: BoxedStrategy<SExpr>) -> impl Strategy<Value = VarDecl> {
    (
        prop::collection::vec(ident_strategy(), 1..3),
        prop::option::of(prop::sample::select(vec![Mult::Set, Mult::One, Mult::Lone, Mult::Some])),
        expr,
    )
        .prop_map(|(names, mult, bound)| VarDecl {
            names: names.into_iter().map(ident).collect(),
            mult,
            bound,
            span: Span::default(),
        })
}

fn expr_strategy() -> BoxedStrategy<SExpr> {
    let leaf = prop_oneof![
        ident_strategy().prop_map(|n| mk(SExprKind::Name(QualName { qualifier: None, name: n }))),
        ident_strategy().prop_map(|n| mk(SExprKind::Name(QualName {
            qualifier: Some("ord".into()),
            name: n
        }))),
        (0i64..100).prop_map(|n| mk(SExprKind::Int(n))),
        Just(mk(SExprKind::None)),
    ];
    leaf.prop_recursive(4, 48, 4, |inner| {
        let binops = vec![
            BinOp::Or,
            BinOp::Iff,
            BinOp::Implies,
            BinOp::And,
            BinOp::In,
            BinOp::NotIn,
            BinOp::Eq,
            BinOp::Neq,
            BinOp::Lt,
            BinOp::Le,
            BinOp::Gt,
            BinOp::Ge,
            BinOp::Plus,
            BinOp::Minus,
            BinOp::Intersect,
            BinOp::Product,
            BinOp::Join,
        ];
        prop_oneof![
            (prop::sample::select(vec![UnOp::Not, UnOp::Closure, UnOp::ReflClosure]), inner.clone())
                .prop_map(|(op, e)| mk(SExprKind::Unary(op, Box::new(e)))),
            (
                prop::sample::select(vec![MultOp::No, MultOp::Some, MultOp::Lone, MultOp::One, MultOp::Set]),
                inner.clone()
            )
                .prop_map(|(op, e)| mk(SExprKind::Mult(op, Box::new(e)))),
            (prop::sample::select(binops), inner.clone(), inner.clone())
                .prop_map(|(op, a, b)| mk(SExprKind::Binary(op, Box::new(a), Box::new(b)))),
            (inner.clone(), prop::collection::vec(inner.clone(), 0..3))
                .prop_map(|(f, args)| mk(SExprKind::Box(Box::new(f), args))),
            (
                prop::sample::select(vec![Quant::All, Quant::Some, Quant::No, Quant::Lone, Quant::One]),
                prop::collection::vec(var_decl_strategy(inner.clone()), 1..3),
                inner.clone()
            )
                .prop_map(|(quant, decls, body)| mk(SExprKind::Quant {
                    quant,
                    decls,
                    body: Box::new(body)
                })),
            (prop::collection::vec((ident_strategy(), inner.clone()), 1..3), inner.clone()).prop_map(
                |(bs, body)| mk(SExprKind::Let {
                    bindings: bs.into_iter().map(|(n, e)| (ident(n), e)).collect(),
                    body: Box::new(body)
                })
            ),
            prop::collection::vec(inner, 0..3).prop_map(|items| mk(SExprKind::Block(items))),
        ]
    })
    .boxed()
}

fn decl_strategy() -> impl Strategy<Value = Decl> {
    let sp = Span::default();
    let column = (
        prop::option::of(prop::sample::select(vec![Mult::Set, Mult::One, Mult::Lone, Mult::Some])),
        ident_strategy(),
    )
        .prop_map(|(mult, s)| ColumnDecl { mult, sig: ident(s) });
    let field = (prop::collection::vec(ident_strategy(), 1..3), prop::collection::vec(column, 1..4)).prop_map(
        move |(names, columns)| FieldDecl {
            names: names.into_iter().map(ident).collect(),
            columns,
            span: sp,
        },
    );
    prop_oneof![
        (ident_strategy(), prop::option::of(ident_strategy())).prop_map(move |(s, a)| Decl::Open(OpenDecl {
            sig: ident(s),
            alias: a.map(ident),
            span: sp
        })),
        (
            prop::collection::vec(ident_strategy(), 1..3),
            any::<bool>(),
            prop::option::of(ident_strategy()),
            prop::collection::vec(field, 0..3)
        )
            .prop_map(move |(names, is_abstract, parent, fields)| Decl::Sig(SigDecl {
                names: names.into_iter().map(ident).collect(),
                is_abstract,
                parent: parent.map(ident),
                fields,
                span: sp
            })),
        (prop::option::of(ident_strategy()), prop::collection::vec(expr_strategy(), 0..3)).prop_map(
            move |(name, body)| Decl::Fact(FactDecl {
                name: name.map(ident),
                body,
                span: sp
            })
        ),
        (
            ident_strategy(),
            prop::collection::vec(var_decl_strategy(expr_strategy()), 0..3),
            prop::collection::vec(expr_strategy(), 0..3)
        )
            .prop_map(move |(name, params, body)| Decl::Pred(PredDecl {
                name: ident(name),
                params,
                body,
                span: sp
            })),
        (
            ident_strategy(),
            prop::collection::vec(var_decl_strategy(expr_strategy()), 0..2),
            prop::option::of(prop::sample::select(vec![Mult::Set, Mult::One, Mult::Lone, Mult::Some])),
            expr_strategy(),
            expr_strategy()
        )
            .prop_map(move |(name, params, result_mult, result, body)| Decl::Fun(FunDecl {
                name: ident(name),
                params,
                result_mult,
                result,
                body,
                span: sp
            })),
        (ident_strategy(), prop::collection::vec(expr_strategy(), 0..3)).prop_map(move |(name, body)| {
            Decl::Assert(AssertDecl {
                name: ident(name),
                body,
                span: sp,
            })
        }),
        (ident_strategy(), prop::option::of(1u32..100)).prop_map(move |(t, scope)| Decl::Check(CheckDecl {
            target: ident(t),
            scope,
            span: sp
        })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn generated_specs_round_trip(decls in prop::collection::vec(decl_strategy(), 0..5)) {
        // At most one ordering import per signature name.
        let mut seen = std::collections::BTreeSet::new();
        let decls: Vec<Decl> = decls
            .into_iter()
            .filter(|d| match d {
                Decl::Open(o) => seen.insert(o.sig.name.clone()),
                _ => true,
            })
            .collect();
        let spec = SourceSpec { path: None, text: String::new(), decls };
        let text = pretty_print(&spec);
        let parsed = parse(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&parsed.decls, &spec.decls, "{}", text);
        // Idempotence: printing the reparsed tree gives the same text.
        prop_assert_eq!(pretty_print(&parsed), text);
    }
}
