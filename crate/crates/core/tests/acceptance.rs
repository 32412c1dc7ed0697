//! Acceptance gate: one PASS/FAIL line per criterion; the process fails if
//! any criterion does. Runs without the test harness so that the lines are
//! always printed.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relcheck::eval::{closure, validate_counterexample, Instance};
use relcheck::fol::*;
use relcheck::pipeline::*;
use relcheck::smt::Status;

type Check = fn() -> String;

fn config(scopes: &[u32], mode: Mode, timeout: Duration) -> PipelineConfig {
    PipelineConfig {
        scopes: scopes.to_vec(),
        mode,
        timeout,
        ..PipelineConfig::default()
    }
}

fn parse_and_type_ternary_field() -> String {
    let m = fixture_model("addressbook_core.als");
    let addr = m.field_by_name("addr").expect("addr declared");
    assert_eq!(m.fields[addr].arity(), 3);
    let cols: Vec<&str> = m
        .field_ty(addr)
        .cols()
        .iter()
        .map(|c| m.sigs[c.expect("typed column").bound].name.as_str())
        .collect();
    assert_eq!(cols, ["Book", "Name", "Target"]);
    format!("addr: {}", cols.join(" -> "))
}

fn buggy_counterexamples() -> String {
    let m = fixture_model("addressbook.als");
    let mut out = Vec::new();
    for scope in [16, 32] {
        let r = run_pipeline(&m, "delUndoesAddBuggy", &config(&[scope], Mode::Bounded, Duration::from_secs(300))).unwrap();
        assert_eq!(r.verdict, Verdict::Counterexample, "scope {scope}");
        let ce = r.counterexample.expect("counterexample reported");
        assert!(ce.validated);
        let inst = Instance::from_json(&m, &ce.instance).unwrap();
        assert!(validate_counterexample(&m, "delUndoesAddBuggy", &inst));
        out.push(format!("CE at {scope} validated"));
    }
    out.join(", ")
}

fn fixed_valid() -> String {
    let m = fixture_model("addressbook.als");
    let t = Duration::from_secs(300);
    let r = run_pipeline(&m, "delUndoesAdd", &config(&[32, 64], Mode::Bounded, t)).unwrap();
    assert_eq!(r.verdict, Verdict::BoundedValid);
    let r = run_pipeline(&m, "delUndoesAdd", &config(&[32, 64], Mode::Full, t)).unwrap();
    assert_eq!(r.bounded_verdict, Some(Verdict::BoundedValid));
    assert_eq!(r.verdict, Verdict::FullyValid);
    "BV at 32 and 64, then FV".into()
}

fn oracle_equivalence() -> String {
    let start = Instant::now();
    let (mut runs, mut sat) = (0, 0);
    for file in FIXTURES {
        let m = fixture_model(file);
        for a in &m.assertions {
            for ag in oracle_agreement(&m, &a.name, 2) {
                assert_eq!(ag.solver_sat, ag.oracle_sat, "{file} {ag:?}");
                runs += 1;
                sat += ag.solver_sat as usize;
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "{elapsed:?}");
    format!("{runs} scope combinations over {} files, {sat} sat, {:.1}s", FIXTURES.len(), elapsed.as_secs_f64())
}

fn random_soundness() -> String {
    let s = random_sweep(2024, 200);
    assert!(s.invalid.is_empty(), "{:?}", s.invalid);
    assert!(s.decided >= 200);
    format!("{} models decided, {} counterexamples all validated, {} undecided", s.decided, s.counterexamples, s.undecided)
}

fn closure_fixpoint() -> String {
    for n in 1..=4 {
        assert_eq!(closure_differs_symbolically(n, n - 1), Status::Unsat, "{n} atoms");
        for mask in 0..1u64 << (n * n) {
            assert_eq!(path_closure(n, mask, n - 1), closure(&relation(n, mask)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let masks: Vec<u64> = [0.05, 0.1, 0.15, 0.25, 0.4]
        .iter()
        .map(|&d| (0..64).filter(|_| rng.gen_bool(d)).fold(0u64, |m, b| m | 1 << b))
        .collect();
    let agreed = closure_agrees_pinned(8, &masks).unwrap();
    assert_eq!(agreed, masks.len());
    format!("all relations on 1-4 atoms, {agreed} random relations on 8 atoms")
}

fn lemma_soundness() -> String {
    let checks = validate_lemmas(3).unwrap();
    let failed: Vec<_> = checks.iter().filter(|c| !c.holds).collect();
    assert!(failed.is_empty(), "{failed:?}");
    let tc = check_tc_induct_finite(4, 2).unwrap();
    assert!(tc.failures.is_empty(), "{:?}", tc.failures);
    assert!(tc.premises_held > 0);
    format!(
        "{} lemma checks on up to 3 atoms, tc_induct premises held in {} cases on up to 4 atoms",
        checks.len(),
        tc.premises_held
    )
}

fn obligation_shape() -> String {
    let m = fixture_model("addressbook.als");
    let ob = export_obligation(&m, "lookupYields", None).unwrap();
    let rels = |k: usize| -> Vec<String> {
        ob.constants
            .iter()
            .filter(|c| matches!(c.role, ConstRole::Sig(_) | ConstRole::Field(_)))
            .filter(|c| c.decl.result == Some(FSort::Rel(k)))
            .map(|c| c.decl.name.clone())
            .collect()
    };
    assert_eq!(rels(1).len(), 4);
    assert_eq!(rels(2), ["names"]);
    assert_eq!(rels(3), ["addr"]);
    let (_, axioms) = ob.ordering.as_ref().expect("ordering axioms");
    let names: Vec<&str> = axioms.iter().map(|a| a.name.as_str()).collect();
    assert_eq!(names, ["ord_cover", "ord_into", "ord_inj", "ord_link"]);
    ob.check_well_formed().unwrap();
    check_structure(&m, &ob).unwrap();
    format!("Rel1 {:?}, Rel2 names, Rel3 addr, {} ordering axioms, goal matches", rels(1), names.len())
}

fn timeout_is_unknown() -> String {
    let m = fixture_model("com.als");
    let r = run_pipeline(&m, "theorem1", &config(&[2, 3], Mode::Full, Duration::from_secs(2))).unwrap();
    assert_eq!(r.verdict, Verdict::Unknown);
    assert_eq!(r.undecided_stage, Some(Stage::Unbounded));
    assert!(r.stages.iter().any(|s| s.stage == Stage::Unbounded && s.outcome == Outcome::Timeout));
    let m = fixture_model("addressbook.als");
    let r = run_pipeline(&m, "lookupYields", &config(&[4], Mode::Bounded, Duration::from_millis(300))).unwrap();
    assert_eq!(r.verdict, Verdict::Unknown);
    assert_eq!(r.undecided_stage, Some(Stage::Bounded));
    assert_eq!(r.stages[0].outcome, Outcome::Timeout);
    "UK at stage unbounded (2s) and at stage bounded (300ms)".into()
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("model parses; addr is Book -> Name -> Target", parse_and_type_ternary_field),
        ("delUndoesAddBuggy: validated CE at 16 and 32", buggy_counterexamples),
        ("delUndoesAdd: BV at 32 and 64, then FV", fixed_valid),
        ("solver agrees with the oracle on the fixtures at 2 atoms", oracle_equivalence),
        ("random models: every CE validates", random_soundness),
        ("bounded closure equals the fixpoint", closure_fixpoint),
        ("rewrite lemmas and tc_induct are sound on small universes", lemma_soundness),
        ("lookupYields obligation has the expected shape", obligation_shape),
        ("solver timeouts give UK with the stage recorded", timeout_is_unknown),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS — {name} ({detail}; {secs:.1}s)", i + 1),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {}: FAIL — {name} ({msg}; {secs:.1}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
