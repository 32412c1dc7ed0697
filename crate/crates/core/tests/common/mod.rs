//! Helpers shared by the integration tests: fixtures, the batched closure
//! cross-check, the oracle agreement sweep and a random model generator.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::Rng;
use relcheck::eval::{closure, find_counterexample, validate_counterexample, EnumConfig, IntSemantics, TupleSet};
use relcheck::model::{typecheck, Model, SigId};
use relcheck::smt::{run_solver, run_solver_text, serialize, SolverCmd, Status};
use relcheck::syntax::parse;
use relcheck::translate::{decode_instance, encode_check, ScopeAssignment};

pub const FIXTURES: [&str; 6] = ["addressbook.als", "addressbook_core.als", "com.als", "com_buggy.als", "marksweep.als", "ints.als"];

pub fn fixture_path(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn model(text: &str) -> Model {
    typecheck(&parse(text).unwrap()).unwrap()
}

pub fn fixture_model(name: &str) -> Model {
    model(&fixture(name))
}

pub fn z3() -> SolverCmd {
    SolverCmd::from_env()
}

// ----- bounded closure against the least fixpoint -------------------------------

/// The binary relation over `n` atoms whose bit `i * n + j` marks `(i, j)`.
pub fn relation(n: u32, mask: u64) -> TupleSet {
    let mut out = TupleSet::new();
    for i in 0..n {
        for j in 0..n {
            if mask >> (i * n + j) & 1 == 1 {
                out.insert(vec![i, j]);
            }
        }
    }
    out
}

fn lit(v: u32, width: u32) -> String {
    format!("#b{:0w$b}", v, w = width as usize)
}

/// The bounded encoding of `c = ^r` over `n` atoms, without the final
/// check, and the solver names of `r` and `c` and the bitwidth.
fn closure_script(n: u32) -> (String, String, String, u32) {
    let m = model("sig A { r: set A, c: set A } fact tc { c = ^r } assert t { some r and no r }");
    let scope = ScopeAssignment::uniform(&m, n).unwrap();
    let width = scope.bitwidth(0);
    let enc = encode_check(&m, "t", &scope).unwrap();
    let text = serialize(enc.script());
    let base = text.strip_suffix("(check-sat)\n(get-model)\n").expect("script ends with the check");
    let names = &enc.symbols().fields;
    (base.to_string(), names[0].clone(), names[1].clone(), width)
}

/// Paths of length at most `steps + 1`, by the recurrence
/// `q0 = r`, `q(k+1)(i, j) = q(k)(i, j) or some z: r(i, z) and q(k)(z, j)`.
/// With `steps = n - 1` this is the closure; it is a different computation
/// from both the encoder's squaring tiers and the evaluator's fixpoint.
pub fn path_closure(n: u32, mask: u64, steps: u32) -> TupleSet {
    let r = relation(n, mask);
    let mut q = r.clone();
    for _ in 0..steps {
        let mut next = q.clone();
        for i in 0..n {
            for j in 0..n {
                if (0..n).any(|z| r.contains(&vec![i, z]) && q.contains(&vec![z, j])) {
                    next.insert(vec![i, j]);
                }
            }
        }
        q = next;
    }
    q
}

/// Asks the solver whether, for some relation `r` over `n` atoms, the
/// encoded `c = ^r` differs from the path recurrence unrolled `steps`
/// times (given as quantifier-free formulas over the `n * n` bits of `r`).
/// `Unsat` means agreement on every relation. A satisfiability check of
/// the encoding alone comes first, so agreement is not vacuous.
pub fn closure_differs_symbolically(n: u32, steps: u32) -> Status {
    let (mut s, r, c, w) = closure_script(n);
    let pre = run_solver_text(&z3(), &format!("{s}(check-sat)\n"), Duration::from_secs(60)).unwrap();
    assert_eq!(pre.status, Status::Sat, "closure encoding is unsatisfiable on {n} atoms");
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (lit(i, w), lit(j, w));
            s.push_str(&format!("(declare-const p_{i}_{j} Bool)\n(assert (= p_{i}_{j} ({r} {x} {y})))\n"));
            s.push_str(&format!("(declare-const q0_{i}_{j} Bool)\n(assert (= q0_{i}_{j} p_{i}_{j}))\n"));
        }
    }
    for k in 1..=steps {
        for i in 0..n {
            for j in 0..n {
                let ways: Vec<String> = (0..n).map(|z| format!("(and p_{i}_{z} q{}_{z}_{j})", k - 1)).collect();
                s.push_str(&format!(
                    "(declare-const q{k}_{i}_{j} Bool)\n(assert (= q{k}_{i}_{j} (or q{}_{i}_{j} {})))\n",
                    k - 1,
                    ways.join(" ")
                ));
            }
        }
    }
    let mut differs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            differs.push(format!("(not (= ({c} {} {}) q{steps}_{i}_{j}))", lit(i, w), lit(j, w)));
        }
    }
    s.push_str(&format!("(assert (or {}))\n(check-sat)\n", differs.join(" ")));
    run_solver_text(&z3(), &s, Duration::from_secs(300)).unwrap().status
}

/// Checks, with one solver process per chunk, that for each given relation
/// the bounded encoding forces `c = ^r` to be exactly the evaluator's
/// least fixpoint. Each relation gets a push/pop block that pins `r`, asks
/// for satisfiability (must be sat: the pinned instance exists) and then
/// for a `c` differing from the fixpoint (must be unsat). Returns the
/// number of relations checked or the first disagreement.
pub fn closure_agrees_pinned(n: u32, masks: &[u64]) -> Result<usize, String> {
    let (base, r, c, width) = closure_script(n);
    for chunk in masks.chunks(256) {
        let mut text = base.clone();
        for &mask in chunk {
            let rel = relation(n, mask);
            let tc = closure(&rel);
            text.push_str("(push 1)\n");
            let mut differs = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    let (x, y) = (lit(i, width), lit(j, width));
                    let t = vec![i, j];
                    let pin = if rel.contains(&t) { format!("({r} {x} {y})") } else { format!("(not ({r} {x} {y}))") };
                    text.push_str(&format!("(assert {pin})\n"));
                    differs.push(if tc.contains(&t) { format!("(not ({c} {x} {y}))") } else { format!("({c} {x} {y})") });
                }
            }
            text.push_str("(check-sat)\n");
            text.push_str(&format!("(assert (or {}))\n(check-sat)\n(pop 1)\n", differs.join(" ")));
        }
        let out = run_solver_text(&z3(), &text, Duration::from_secs(600)).map_err(|e| e.to_string())?;
        let answers: Vec<&str> = out
            .transcript
            .lines()
            .map(str::trim)
            .filter(|l| *l == "sat" || *l == "unsat" || *l == "unknown")
            .collect();
        if answers.len() != 2 * chunk.len() {
            return Err(format!("expected {} answers, got {}: {}", 2 * chunk.len(), answers.len(), out.transcript));
        }
        for (k, &mask) in chunk.iter().enumerate() {
            if answers[2 * k] != "sat" || answers[2 * k + 1] != "unsat" {
                return Err(format!(
                    "closure of {:?} on {n} atoms: pinned {}, differing {}",
                    relation(n, mask),
                    answers[2 * k],
                    answers[2 * k + 1]
                ));
            }
        }
    }
    Ok(masks.len())
}

// ----- oracle agreement -------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agreement {
    pub assertion: String,
    pub sizes: BTreeMap<SigId, u32>,
    pub solver_sat: bool,
    pub oracle_sat: bool,
}

/// Solver verdicts and exhaustive oracle verdicts for every per-signature
/// size assignment in `1..=bound`.
pub fn oracle_agreement(m: &Model, assertion: &str, bound: u32) -> Vec<Agreement> {
    let mut out = Vec::new();
    for sizes in relcheck::eval::size_combinations(m, bound) {
        let scope = ScopeAssignment::new(m, sizes.clone()).unwrap();
        let bits = sizes.keys().map(|&t| scope.bitwidth(t)).max().unwrap_or(1);
        let enc = encode_check(m, assertion, &scope).unwrap();
        let res = run_solver(&z3(), enc.script(), Duration::from_secs(120), None).unwrap();
        assert!(matches!(res.status, Status::Sat | Status::Unsat), "{assertion} at {sizes:?}: {:?}", res.status);
        let solver_sat = res.status == Status::Sat;
        if solver_sat {
            let d = decode_instance(m, res.model.as_ref().unwrap(), &enc.metadata()).unwrap();
            assert!(validate_counterexample(m, assertion, &d.instance), "{assertion} at {sizes:?}");
        }
        let cfg = EnumConfig {
            ints: IntSemantics::Wrapping { bits },
            ..EnumConfig::default()
        };
        let oracle_sat = find_counterexample(m, assertion, &sizes, &cfg).unwrap().is_some();
        out.push(Agreement {
            assertion: assertion.to_string(),
            sizes,
            solver_sat,
            oracle_sat,
        });
    }
    out
}

/// Outcome of a random-model soundness sweep.
#[derive(Debug, Clone, Default)]
pub struct SweepStats {
    /// Models with a definite answer at every scope.
    pub decided: usize,
    /// Models on which the solver gave up at some scope.
    pub undecided: usize,
    /// Sat answers, each decoded and validated.
    pub counterexamples: usize,
    /// Models whose sat answer did not decode to a counterexample.
    pub invalid: Vec<String>,
}

/// Random models, checked at scopes 2 and 3 until `count` models were
/// decided at both; every sat answer must decode to a counterexample the
/// evaluator confirms. The solver occasionally gives up on a quantified
/// bitvector script (its heuristics, not the encoding); such models are
/// counted separately.
pub fn random_sweep(seed: u64, count: usize) -> SweepStats {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SweepStats::default();
    while stats.decided < count {
        let text = random_model(&mut rng);
        let m = model(&text);
        let mut all_decided = true;
        for scope in [2, 3] {
            let sc = ScopeAssignment::uniform(&m, scope).unwrap();
            let enc = encode_check(&m, "random", &sc).unwrap();
            let out = run_solver(&z3(), enc.script(), Duration::from_secs(3), None).unwrap();
            match out.status {
                Status::Sat => {
                    let ok = out
                        .model
                        .as_ref()
                        .and_then(|raw| decode_instance(&m, raw, &enc.metadata()).ok())
                        .is_some_and(|d| validate_counterexample(&m, "random", &d.instance));
                    if ok {
                        stats.counterexamples += 1;
                    } else {
                        stats.invalid.push(text.clone());
                    }
                }
                Status::Unsat => {}
                Status::Timeout | Status::Unknown => all_decided = false,
                Status::Error => panic!("solver error on\n{text}\n{}", out.transcript),
            }
        }
        if all_decided {
            stats.decided += 1;
        } else {
            stats.undecided += 1;
        }
    }
    stats
}

// ----- random models ----------------------------------------------------------

/// A random well-typed model over `sig A` (with subsignature `C`) and
/// `sig B`, with a random fact and assertion. Every generated text parses
/// and typechecks.
pub fn random_model(rng: &mut impl Rng) -> String {
    let mult = |rng: &mut dyn rand::RngCore| *["set", "some", "lone", "one"].choose(rng).unwrap();
    let text = format!(
        "sig A {{ f: {} A, g: {} B }}\nsig C extends A {{}}\nsig B {{ h: A -> {} A }}\n",
        mult(rng),
        mult(rng),
        mult(rng)
    );
    let mut g = Gen { vars: vec![], next: 0 };
    let fact = g.formula(rng, 2);
    let assertion = g.formula(rng, 3);
    format!("{text}fact random {{ {fact} }}\nassert random {{ {assertion} }}\n")
}

struct Gen {
    /// Variables in scope, with their signature (`A` or `B`).
    vars: Vec<(String, &'static str)>,
    next: usize,
}

impl Gen {
    fn unary(&mut self, rng: &mut impl Rng, sig: &'static str, depth: u32) -> String {
        let vars: Vec<String> = self.vars.iter().filter(|(_, s)| *s == sig).map(|(v, _)| v.clone()).collect();
        if depth == 0 || rng.gen_bool(0.3) {
            if !vars.is_empty() && rng.gen_bool(0.5) {
                return vars.choose(rng).unwrap().clone();
            }
            return match sig {
                "A" => ["A", "C"].choose(rng).unwrap().to_string(),
                _ => "B".to_string(),
            };
        }
        match (sig, rng.gen_range(0..4)) {
            (_, 0) => {
                let op = ["+", "&", "-"].choose(rng).unwrap();
                format!("({} {op} {})", self.unary(rng, sig, depth - 1), self.unary(rng, sig, depth - 1))
            }
            ("A", 1) => format!("{}.({})", self.unary(rng, "A", depth - 1), self.binary(rng, depth - 1)),
            ("A", 2) => format!("{}.g.h.({})", self.unary(rng, "A", depth - 1), self.unary(rng, "A", depth - 1)),
            ("A", _) => format!("g.({})", self.unary(rng, "B", depth - 1)),
            ("B", 1 | 2) => format!("{}.g", self.unary(rng, "A", depth - 1)),
            _ => format!("h.({}).({})", self.unary(rng, "A", depth - 1), self.unary(rng, "A", depth - 1)),
        }
    }

    /// A binary relation over A.
    fn binary(&mut self, rng: &mut impl Rng, depth: u32) -> String {
        let b = self.unary(rng, "B", depth.saturating_sub(1));
        let base = ["f".to_string(), format!("({b}).h")];
        let r = base.choose(rng).unwrap().clone();
        match rng.gen_range(0..4) {
            0 => format!("^({r})"),
            1 => format!("*({r})"),
            2 => format!("({r} + f)"),
            _ => r,
        }
    }

    fn formula(&mut self, rng: &mut impl Rng, depth: u32) -> String {
        let sig = if rng.gen_bool(0.7) { "A" } else { "B" };
        if depth == 0 || rng.gen_bool(0.2) {
            let e = self.unary(rng, sig, 2);
            return match rng.gen_range(0..6) {
                0 => format!("some {e}"),
                1 => format!("no {e}"),
                2 => format!("lone {e}"),
                3 => format!("one {e}"),
                4 => format!("{e} in {}", self.unary(rng, sig, 2)),
                _ => format!("{e} = {}", self.unary(rng, sig, 2)),
            };
        }
        match rng.gen_range(0..7) {
            0 => format!("not ({})", self.formula(rng, depth - 1)),
            1 => format!("({}) and ({})", self.formula(rng, depth - 1), self.formula(rng, depth - 1)),
            2 => format!("({}) or ({})", self.formula(rng, depth - 1), self.formula(rng, depth - 1)),
            3 => format!("({}) => ({})", self.formula(rng, depth - 1), self.formula(rng, depth - 1)),
            q => {
                let v = format!("v{}", self.next);
                self.next += 1;
                let dom = self.unary(rng, sig, 1);
                let quant = ["all", "some", "no", "one"][q - 4 + rng.gen_range(0..2)];
                self.vars.push((v.clone(), sig));
                let body = self.formula(rng, depth - 1);
                self.vars.pop();
                format!("{quant} {v}: {dom} | {body}")
            }
        }
    }
}
