//! Exhaustive finite-model checks of the lemma family and of the closure
//! induction rule.

use std::collections::BTreeMap;

use super::interp::{FolInterp, InterpError, RelValue, Value};
use super::lemmas::{check_lemma_finite, shipped_lemmas};
use super::syntax::*;
use super::tc_induct::{check_tc_induct_instance, ParamFormula};

/// Outcome of checking one lemma instance on one universe size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCheck {
    pub lemma: &'static str,
    /// Relation arity `k` and join partner arity `m` of the instance.
    pub arities: (usize, usize),
    pub atoms: u32,
    pub holds: bool,
}

/// Checks every shipped lemma on universes of `1..=max_atoms` atoms, for
/// relation arities whose tuple sets stay enumerable (at most 16 tuples
/// per relation sort, plus binary relations over 3 atoms).
pub fn validate_lemmas(max_atoms: u32) -> Result<Vec<LemmaCheck>, InterpError> {
    let mut out = Vec::new();
    for k in 1..=3usize {
        for m in 1..=3usize {
            if m + k <= 2 {
                // The joins of the instance would be ill-formed.
                continue;
            }
            for n in 1..=max_atoms {
                let enumerable = |a: usize| (n as usize).pow(a as u32) <= 9;
                if !enumerable(k) || !enumerable(m) || !enumerable(m + k - 2) {
                    continue;
                }
                for rule in shipped_lemmas(k, m) {
                    // Lemmas without joins do not depend on m.
                    let mentions_join = rule.name.starts_with("join");
                    if !mentions_join && m != 2 {
                        continue;
                    }
                    let holds = check_lemma_finite(&rule, n)?;
                    out.push(LemmaCheck {
                        lemma: rule.name,
                        arities: (k, m),
                        atoms: n,
                        holds,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Formulas of depth at most `depth` over the parameters `a`, `b` and a
/// binary relation `r`: leaves `true`, `a = b`, `in(binary(a, b), r)` and
/// `in(binary(b, a), r)`, combined with negation, conjunction and
/// disjunction.
pub fn phi_grammar(depth: usize) -> Vec<Formula> {
    let pair = |x: &str, y: &str| tuple(vec![var(x), var(y)]);
    let mut levels: Vec<Vec<Formula>> = vec![vec![
        Formula::True,
        Formula::Eq(var("a"), var("b")),
        mem(pair("a", "b"), var("r")),
        mem(pair("b", "a"), var("r")),
    ]];
    for _ in 0..depth {
        let below: Vec<Formula> = levels.iter().flatten().cloned().collect();
        let mut next = Vec::new();
        for f in &below {
            next.push(not(f.clone()));
            for g in &below {
                next.push(Formula::And(vec![f.clone(), g.clone()]));
                next.push(Formula::Or(vec![f.clone(), g.clone()]));
            }
        }
        levels.push(next);
    }
    levels.into_iter().flatten().collect()
}

/// Truth table of a grammar formula over its three non-constant leaves;
/// two formulas with the same table give equivalent rule instances.
fn truth_table(f: &Formula) -> u8 {
    fn ev(f: &Formula, bits: [bool; 3]) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(..) => bits[0],
            Formula::Pred(_, args) => match &args[0] {
                FTerm::Fn(_, xs) if xs[0] == var("a") => bits[1],
                _ => bits[2],
            },
            Formula::Not(a) => !ev(a, bits),
            Formula::And(xs) => xs.iter().all(|x| ev(x, bits)),
            Formula::Or(xs) => xs.iter().any(|x| ev(x, bits)),
            _ => unreachable!("grammar formulas are propositional"),
        }
    }
    (0..8u8).fold(0, |acc, row| {
        let bits = [row & 1 != 0, row & 2 != 0, row & 4 != 0];
        acc | (ev(f, bits) as u8) << row
    })
}

/// Binary relations over `n` atoms, one per isomorphism class (the rule
/// mentions no constants, so it is invariant under renaming atoms).
pub fn binary_relations_up_to_iso(n: u32) -> Vec<u64> {
    let n = n as usize;
    let perms = permutations(n);
    let bits = n * n;
    let mut out = Vec::new();
    for mask in 0u64..1 << bits {
        let canonical = perms
            .iter()
            .map(|p| {
                let mut m = 0u64;
                for i in 0..n {
                    for j in 0..n {
                        if mask >> (i * n + j) & 1 == 1 {
                            m |= 1 << (p[i] * n + p[j]);
                        }
                    }
                }
                m
            })
            .min()
            .expect("at least the identity");
        if canonical == mask {
            out.push(mask);
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TcInductReport {
    /// Formulas generated by the grammar.
    pub generated: usize,
    /// Distinct truth tables among them.
    pub classes: usize,
    /// Relations checked (up to isomorphism) across all universe sizes.
    pub relations: usize,
    /// Rule instances evaluated.
    pub instances: usize,
    /// Instances whose premises held.
    pub premises_held: usize,
    /// Instances with true premises and a false conclusion.
    pub failures: Vec<String>,
}

/// Checks the closure induction rule on every binary relation over
/// `1..=max_atoms` atoms, for every formula of the grammar up to `depth`:
/// whenever both instantiated premises hold, the conclusion must hold.
pub fn check_tc_induct_finite(max_atoms: u32, depth: usize) -> Result<TcInductReport, InterpError> {
    let grammar = phi_grammar(depth);
    let mut classes: BTreeMap<u8, Formula> = BTreeMap::new();
    for f in &grammar {
        classes.entry(truth_table(f)).or_insert_with(|| f.clone());
    }
    let mut report = TcInductReport {
        generated: grammar.len(),
        classes: classes.len(),
        ..TcInductReport::default()
    };
    let r = var("r");
    let instances: Vec<_> = classes
        .values()
        .map(|body| {
            let phi = ParamFormula::new(&[("a", FSort::Atom), ("b", FSort::Atom)], body.clone());
            check_tc_induct_instance(&phi, &r).map(|i| (body.clone(), i))
        })
        .collect::<Result<_, _>>()
        .expect("grammar formulas have two atom parameters");
    for n in 1..=max_atoms {
        let interp = FolInterp::new(n);
        let rels = binary_relations_up_to_iso(n);
        report.relations += rels.len();
        for &mask in &rels {
            let env = [("r".to_string(), Value::Rel(RelValue::from_mask(n, 2, mask)))];
            for (body, inst) in &instances {
                report.instances += 1;
                if !interp.holds_with(&inst.base, &env)? || !interp.holds_with(&inst.step, &env)? {
                    continue;
                }
                report.premises_held += 1;
                if !interp.holds_with(&inst.conclusion, &env)? {
                    report.failures.push(format!("phi = {body}, {n} atoms, r = {mask:#x}"));
                }
            }
        }
    }
    Ok(report)
}
