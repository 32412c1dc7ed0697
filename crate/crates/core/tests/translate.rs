//! Bounded and unbounded backends against the evaluator.

mod common;

use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relcheck::eval::{closure, enumerate_check_with, validate_counterexample, EnumConfig};
use relcheck::smt::{run_solver, Status};
use relcheck::translate::{decode_instance, encode_check, encode_unbounded, ScopeAssignment};

fn bounded_status(file: &str, assertion: &str, scope: u32) -> (Status, Option<bool>) {
    let m = fixture_model(file);
    let sc = ScopeAssignment::uniform(&m, scope).unwrap();
    let enc = encode_check(&m, assertion, &sc).unwrap();
    enc.script().validate().unwrap();
    let out = run_solver(&z3(), enc.script(), Duration::from_secs(300), None).unwrap();
    let valid = out.model.as_ref().map(|raw| {
        let d = decode_instance(&m, raw, &enc.metadata()).unwrap();
        validate_counterexample(&m, assertion, &d.instance)
    });
    (out.status, valid)
}

#[test]
fn buggy_assertion_has_validated_counterexamples_at_large_scopes() {
    for scope in [16, 32] {
        assert_eq!(bounded_status("addressbook.als", "delUndoesAddBuggy", scope), (Status::Sat, Some(true)), "scope {scope}");
    }
}

#[test]
fn fixed_assertion_is_unsat_at_large_scopes() {
    for scope in [32, 64] {
        assert_eq!(bounded_status("addressbook.als", "delUndoesAdd", scope).0, Status::Unsat, "scope {scope}");
    }
}

#[test]
fn fixed_assertion_is_proved_unbounded() {
    let m = fixture_model("addressbook.als");
    let enc = encode_unbounded(&m, "delUndoesAdd").unwrap();
    enc.script.validate().unwrap();
    let out = run_solver(&z3(), &enc.script, Duration::from_secs(120), None).unwrap();
    assert_eq!(out.status, Status::Unsat);
}

#[test]
fn buggy_assertion_has_a_valid_unbounded_model() {
    let m = fixture_model("addressbook.als");
    let enc = encode_unbounded(&m, "delUndoesAddBuggy").unwrap();
    let out = run_solver(&z3(), &enc.script, Duration::from_secs(120), None).unwrap();
    assert_eq!(out.status, Status::Sat);
    let d = decode_instance(&m, out.model.as_ref().unwrap(), &enc.metadata).unwrap();
    assert!(validate_counterexample(&m, "delUndoesAddBuggy", &d.instance));
}

#[test]
fn over_approximated_closure_admits_a_spurious_model() {
    let m = fixture_model("marksweep.als");
    let enc = encode_unbounded(&m, "liveHasCause").unwrap();
    let out = run_solver(&z3(), &enc.script, Duration::from_secs(120), None).unwrap();
    assert_eq!(out.status, Status::Sat);
    let d = decode_instance(&m, out.model.as_ref().unwrap(), &enc.metadata).unwrap();
    assert!(!validate_counterexample(&m, "liveHasCause", &d.instance));
    // The exact bounded closure has no such model.
    assert_eq!(bounded_status("marksweep.als", "liveHasCause", 4).0, Status::Unsat);
}

/// Every assertion the unbounded backend proves has no counterexample in
/// the evaluator's enumeration.
#[test]
fn unbounded_proofs_have_no_small_counterexamples() {
    let mut proved = 0;
    for file in FIXTURES {
        let m = fixture_model(file);
        for a in &m.assertions {
            let enc = encode_unbounded(&m, &a.name).unwrap();
            let out = run_solver(&z3(), &enc.script, Duration::from_secs(5), None).unwrap();
            if out.status != Status::Unsat {
                continue;
            }
            proved += 1;
            let bound = if m.top_levels().len() > 2 { 1 } else { 2 };
            let cfg = EnumConfig {
                budget: 5_000_000,
                ..EnumConfig::default()
            };
            assert_eq!(enumerate_check_with(&m, &a.name, bound, &cfg).unwrap(), None, "{file} {}", a.name);
        }
    }
    assert!(proved >= 4, "only {proved} proofs");
}

#[test]
fn solver_agrees_with_the_oracle_on_every_fixture_at_two_atoms() {
    let start = Instant::now();
    let mut runs = 0;
    let mut sat = 0;
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
    assert!(runs >= 40 && sat >= 10, "{runs} runs, {sat} sat");
    assert!(start.elapsed() < Duration::from_secs(300));
}

#[test]
fn bounded_closure_equals_the_fixpoint_on_all_relations_up_to_four_atoms() {
    for n in 1..=4 {
        assert_eq!(closure_differs_symbolically(n, n - 1), Status::Unsat, "{n} atoms");
    }
    // The recurrence the solver compared against is the evaluator's closure.
    for n in 1..=4u32 {
        for mask in 0..1u64 << (n * n) {
            assert_eq!(path_closure(n, mask, n - 1), closure(&relation(n, mask)));
        }
    }
}

#[test]
fn symbolic_closure_check_detects_a_short_unrolling() {
    // Paths of length at most n - 1 miss cycles through all n atoms.
    assert_eq!(closure_differs_symbolically(3, 1), Status::Sat);
}

#[test]
fn bounded_closure_equals_the_fixpoint_on_random_relations() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut masks: Vec<u64> = Vec::new();
    for density in [0.05, 0.1, 0.15, 0.25, 0.4] {
        // Vary the density so that sparse chains and dense graphs occur.
        masks.push((0..64).filter(|_| rng.gen_bool(density)).fold(0u64, |m, b| m | 1 << b));
    }
    assert_eq!(closure_agrees_pinned(8, &masks).unwrap(), masks.len());
    let masks: Vec<u64> = (0..20).map(|_| rng.gen_range(0..1u64 << 25)).collect();
    assert_eq!(closure_agrees_pinned(5, &masks).unwrap(), masks.len());
}

#[test]
fn random_models_yield_only_validated_counterexamples() {
    let stats = random_sweep(2024, 200);
    assert_eq!(stats.invalid, Vec::<String>::new());
    assert!(stats.counterexamples > 100, "{stats:?}");
    assert!(stats.undecided * 10 <= stats.decided, "{stats:?}");
}

#[test]
fn random_models_agree_with_the_oracle_on_one_atom() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..30 {
        let text = random_model(&mut rng);
        let m = model(&text);
        for ag in oracle_agreement(&m, "random", 1) {
            assert_eq!(ag.solver_sat, ag.oracle_sat, "{text}");
        }
    }
}
