//! Conditional simplification lemmas over the relational theory and a
//! rewriter that applies them to a fixpoint under a step budget.

use std::collections::BTreeSet;

use super::interp::{FolInterp, InterpError, RelValue, Value};
use super::syntax::*;
use super::theory::OpInstance;

/// What a lemma concludes from its premises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaConclusion {
    /// The left term may be replaced by the right one.
    Rewrite { lhs: FTerm, rhs: FTerm },
    /// A derived formula.
    Fact(Formula),
}

/// A lemma schema instantiated at fixed arities. Its variables are
/// implicitly universally quantified with the sorts in `vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaRule {
    pub name: &'static str,
    pub vars: Vec<(String, FSort)>,
    pub premises: Vec<Formula>,
    pub conclusion: LemmaConclusion,
    /// Largest universe on which the rule has been checked exhaustively
    /// against the standard interpretation; 0 if never checked.
    pub validated_atoms: u32,
}

impl LemmaRule {
    /// The closed formula `forall vars. premises -> conclusion`.
    pub fn statement(&self) -> Formula {
        let concl = match &self.conclusion {
            LemmaConclusion::Rewrite { lhs, rhs } => Formula::Eq(lhs.clone(), rhs.clone()),
            LemmaConclusion::Fact(f) => f.clone(),
        };
        forall(self.vars.clone(), implies(Formula::And(self.premises.clone()), concl))
    }
}

fn subset(k: usize, a: FTerm, b: FTerm) -> Formula {
    pred(&OpInstance::Subset(k).name(), vec![a, b])
}

fn op(o: OpInstance, args: Vec<FTerm>) -> FTerm {
    func(&o.name(), args)
}

/// The shipped lemmas with relations of arity `k`; `joinMonotone` joins
/// with a relation `t` of arity `m` on the left.
pub fn shipped_lemmas(k: usize, m: usize) -> Vec<LemmaRule> {
    let rel = |n: &str, a: usize| (n.to_string(), FSort::Rel(a));
    let (r, s, t) = (var("r"), var("s"), var("t"));
    let xs = atom_vars("x", k);
    let x = tuple(terms_of(&xs));
    let rs = vec![rel("r", k), rel("s", k)];
    let rule = |name, vars, premises, conclusion| LemmaRule {
        name,
        vars,
        premises,
        conclusion,
        validated_atoms: 0,
    };
    vec![
        rule(
            "unionSubset",
            rs.clone(),
            vec![subset(k, r.clone(), s.clone())],
            LemmaConclusion::Rewrite {
                lhs: op(OpInstance::Union(k), vec![r.clone(), s.clone()]),
                rhs: s.clone(),
            },
        ),
        rule(
            "unionSubsetRev",
            rs.clone(),
            vec![subset(k, s.clone(), r.clone())],
            LemmaConclusion::Rewrite {
                lhs: op(OpInstance::Union(k), vec![r.clone(), s.clone()]),
                rhs: r.clone(),
            },
        ),
        rule(
            "useSubset",
            [rs.clone(), xs.clone()].concat(),
            vec![mem(x.clone(), r.clone()), subset(k, r.clone(), s.clone())],
            LemmaConclusion::Fact(mem(x.clone(), s.clone())),
        ),
        rule(
            "intersectSubset",
            rs.clone(),
            vec![subset(k, r.clone(), s.clone())],
            LemmaConclusion::Rewrite {
                lhs: op(OpInstance::Inter(k), vec![r.clone(), s.clone()]),
                rhs: r.clone(),
            },
        ),
        rule(
            "diffEmpty",
            rs.clone(),
            vec![subset(k, r.clone(), s.clone())],
            LemmaConclusion::Rewrite {
                lhs: op(OpInstance::Diff(k), vec![r.clone(), s.clone()]),
                rhs: op(OpInstance::None(k), vec![]),
            },
        ),
        rule(
            "joinMonotone",
            [rs.clone(), vec![rel("t", m)]].concat(),
            vec![subset(k, r.clone(), s.clone())],
            LemmaConclusion::Fact(subset(
                m + k - 2,
                op(OpInstance::Join(m, k), vec![t.clone(), r.clone()]),
                op(OpInstance::Join(m, k), vec![t.clone(), s.clone()]),
            )),
        ),
        rule(
            "joinMonotoneRight",
            [rs.clone(), vec![rel("t", m)]].concat(),
            vec![subset(k, r.clone(), s.clone())],
            LemmaConclusion::Fact(subset(
                m + k - 2,
                op(OpInstance::Join(k, m), vec![r.clone(), t.clone()]),
                op(OpInstance::Join(k, m), vec![s.clone(), t.clone()]),
            )),
        ),
        rule(
            "subsetRefl",
            vec![rel("r", k)],
            vec![],
            LemmaConclusion::Fact(subset(k, r.clone(), r.clone())),
        ),
        rule(
            "subsetTrans",
            vec![rel("r", k), rel("s", k), rel("t", k)],
            vec![subset(k, r.clone(), s.clone()), subset(k, s.clone(), t.clone())],
            LemmaConclusion::Fact(subset(k, r.clone(), t.clone())),
        ),
    ]
}

// ----- finite validation ----------------------------------------------------

/// Checks a lemma on every interpretation with exactly `n` atoms: all
/// values of its relation variables, all atoms for its atom variables.
/// Relation variables constrained by a premise `subset(v, w)` with `v`
/// enumerated first only range over supersets of `v`'s value; the other
/// assignments falsify the premise and satisfy the rule trivially.
pub fn check_lemma_finite(rule: &LemmaRule, n: u32) -> Result<bool, InterpError> {
    let interp = FolInterp::new(n);
    let rels: Vec<(String, usize)> = rule
        .vars
        .iter()
        .filter_map(|(v, s)| match s {
            FSort::Rel(k) => Some((v.clone(), *k)),
            _ => None,
        })
        .collect();
    let others: Vec<(String, FSort)> = rule.vars.iter().filter(|(_, s)| !matches!(s, FSort::Rel(_))).cloned().collect();
    let concl = match &rule.conclusion {
        LemmaConclusion::Rewrite { lhs, rhs } => Formula::Eq(lhs.clone(), rhs.clone()),
        LemmaConclusion::Fact(f) => f.clone(),
    };
    let inner = forall(others, implies(Formula::And(rule.premises.clone()), concl));
    // lower[i] = index of an earlier variable whose value bounds variable i from below
    let lower: Vec<Option<usize>> = rels
        .iter()
        .enumerate()
        .map(|(i, (w, _))| {
            rule.premises.iter().find_map(|p| match p {
                Formula::Pred(name, args) if name.starts_with("subset_") => match (&args[0], &args[1]) {
                    (FTerm::Var(v), FTerm::Var(x)) if x == w => rels[..i].iter().position(|(y, _)| y == v),
                    _ => None,
                },
                _ => None,
            })
        })
        .collect();
    let mut env: Vec<(String, Value)> = Vec::new();
    let mut masks = vec![0u64; rels.len()];
    let perms = atom_permutations(n as usize);
    let search = Search {
        interp: &interp,
        n,
        rels: &rels,
        lower: &lower,
        perms: &perms,
        f: &inner,
    };
    search.run(0, &mut masks, &mut env)
}

/// All permutations of `0..n`.
fn atom_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for next in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, next);
                    q
                })
            })
            .collect();
    }
    out
}

/// The image of a `k`-ary tuple mask under renaming atoms by `perm`.
fn permute_mask(mask: u64, n: usize, k: usize, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    for idx in 0..n.pow(k as u32) {
        if mask >> idx & 1 == 0 {
            continue;
        }
        let (mut rest, mut image, mut place) = (idx, 0, 1);
        for _ in 0..k {
            image += perm[rest % n] * place;
            rest /= n;
            place *= n;
        }
        out |= 1 << image;
    }
    out
}

/// Enumeration of the relation variables of a lemma. Lemmas mention no
/// atom constants, so their truth is invariant under renaming atoms and
/// the first variable only ranges over one representative per class.
struct Search<'a> {
    interp: &'a FolInterp,
    n: u32,
    rels: &'a [(String, usize)],
    lower: &'a [Option<usize>],
    perms: &'a [Vec<usize>],
    f: &'a Formula,
}

impl Search<'_> {
    fn run(&self, i: usize, masks: &mut Vec<u64>, env: &mut Vec<(String, Value)>) -> Result<bool, InterpError> {
        if i == self.rels.len() {
            return self.interp.holds_with(self.f, env);
        }
        let n = self.n;
        let (name, k) = &self.rels[i];
        let bits = (n as usize).pow(*k as u32);
        if bits > 63 {
            return Err(InterpError::TooLarge(format!("Rel{k} over {n} atoms")));
        }
        let full = (1u64 << bits) - 1;
        let base = self.lower[i].map_or(0, |j| masks[j]);
        // Enumerate base | sub for every submask `sub` of the complement.
        let free = full & !base;
        let mut sub = free;
        loop {
            let m = base | sub;
            let canonical =
                i > 0 || self.perms.iter().all(|p| permute_mask(m, n as usize, *k, p) >= m);
            if canonical {
                masks[i] = m;
                env.push((name.clone(), Value::Rel(RelValue::from_mask(n, *k, m))));
                let ok = self.run(i + 1, masks, env);
                env.pop();
                if !ok? {
                    return Ok(false);
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
        Ok(true)
    }
}

// ----- rewriting --------------------------------------------------------------

/// Result of a rewriting run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteOutcome {
    /// The simplified formula (the best so far if the budget ran out).
    pub formula: Formula,
    /// Names of the lemmas applied, in order.
    pub applied: Vec<&'static str>,
    pub budget_exceeded: bool,
}

/// Limit on the length of subset derivations.
const MAX_DERIVATION_DEPTH: usize = 8;

struct Rewriter {
    budget: usize,
    applied: Vec<&'static str>,
    exceeded: bool,
}

fn arity_of(name: &str) -> Option<OpInstance> {
    OpInstance::parse(name)
}

impl Rewriter {
    fn spend(&mut self, lemmas: &[&'static str]) -> bool {
        if self.budget < lemmas.len().max(1) {
            self.exceeded = true;
            return false;
        }
        self.budget -= lemmas.len().max(1);
        self.applied.extend_from_slice(lemmas);
        true
    }

    /// A derivation of `a ⊆ b` from the context, as the lemmas it uses.
    fn derive(&self, a: &FTerm, b: &FTerm, ctx: &[Formula], depth: usize) -> Option<Vec<&'static str>> {
        if a == b {
            return Some(vec!["subsetRefl"]);
        }
        let hyp = |x: &FTerm, y: &FTerm| {
            ctx.iter().any(|f| match f {
                Formula::Pred(p, args) if p.starts_with("subset_") => &args[0] == x && &args[1] == y,
                _ => false,
            })
        };
        if hyp(a, b) {
            return Some(vec![]);
        }
        if depth == 0 {
            return None;
        }
        if let (FTerm::Fn(f, xa), FTerm::Fn(g, xb)) = (a, b) {
            if f == g && matches!(arity_of(f), Some(OpInstance::Join(..))) {
                if xa[0] == xb[0] {
                    if let Some(mut d) = self.derive(&xa[1], &xb[1], ctx, depth - 1) {
                        d.push("joinMonotone");
                        return Some(d);
                    }
                }
                if xa[1] == xb[1] {
                    if let Some(mut d) = self.derive(&xa[0], &xb[0], ctx, depth - 1) {
                        d.push("joinMonotoneRight");
                        return Some(d);
                    }
                }
            }
        }
        for f in ctx {
            if let Formula::Pred(p, args) = f {
                if p.starts_with("subset_") && &args[0] == a && &args[1] != a {
                    if let Some(mut d) = self.derive(&args[1], b, ctx, depth - 1) {
                        d.push("subsetTrans");
                        return Some(d);
                    }
                }
            }
        }
        None
    }

    fn term(&mut self, t: &FTerm, ctx: &[Formula]) -> FTerm {
        let FTerm::Fn(f, args) = t else { return t.clone() };
        let args: Vec<FTerm> = args.iter().map(|a| self.term(a, ctx)).collect();
        let rebuilt = FTerm::Fn(f.clone(), args.clone());
        let Some(op) = arity_of(f) else { return rebuilt };
        let try_rule = |me: &mut Self, x: &FTerm, y: &FTerm, lemma: &'static str| -> bool {
            match me.derive(x, y, ctx, MAX_DERIVATION_DEPTH) {
                Some(mut d) => {
                    d.push(lemma);
                    me.spend(&d)
                }
                None => false,
            }
        };
        match op {
            OpInstance::Union(_) => {
                if try_rule(self, &args[0], &args[1], "unionSubset") {
                    return args[1].clone();
                }
                if try_rule(self, &args[1], &args[0], "unionSubsetRev") {
                    return args[0].clone();
                }
            }
            OpInstance::Inter(_) => {
                if try_rule(self, &args[0], &args[1], "intersectSubset") {
                    return args[0].clone();
                }
            }
            OpInstance::Diff(k) => {
                if try_rule(self, &args[0], &args[1], "diffEmpty") {
                    return konst(&OpInstance::None(k).name());
                }
            }
            _ => {}
        }
        rebuilt
    }

    fn formula(&mut self, f: &Formula, ctx: &[Formula]) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Pred(p, args) => {
                let args: Vec<FTerm> = args.iter().map(|a| self.term(a, ctx)).collect();
                if p.starts_with("subset_") && arity_of(p).is_some() {
                    if let Some(d) = self.derive(&args[0], &args[1], ctx, MAX_DERIVATION_DEPTH) {
                        // A bare hypothesis is not a lemma application.
                        let d = if d.is_empty() { vec!["subsetRefl"] } else { d };
                        if self.spend(&d) {
                            return Formula::True;
                        }
                    }
                }
                if p == "in" {
                    for h in ctx {
                        if let Formula::Pred(q, hargs) = h {
                            if q == "in" && hargs[0] == args[0] {
                                if let Some(mut d) = self.derive(&hargs[1], &args[1], ctx, MAX_DERIVATION_DEPTH) {
                                    d.push("useSubset");
                                    if self.spend(&d) {
                                        return Formula::True;
                                    }
                                }
                            }
                        }
                    }
                }
                Formula::Pred(p.clone(), args)
            }
            Formula::Eq(a, b) => Formula::Eq(self.term(a, ctx), self.term(b, ctx)),
            Formula::Not(a) => not(self.formula(a, ctx)),
            Formula::And(xs) => Formula::And(xs.iter().map(|x| self.formula(x, ctx)).collect()),
            Formula::Or(xs) => Formula::Or(xs.iter().map(|x| self.formula(x, ctx)).collect()),
            Formula::Implies(a, b) => {
                let a2 = self.formula(a, ctx);
                let mut inner = ctx.to_vec();
                collect_facts(a, &mut inner);
                implies(a2, self.formula(b, &inner))
            }
            Formula::Iff(a, b) => iff(self.formula(a, ctx), self.formula(b, ctx)),
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let bound: BTreeSet<&str> = vs.iter().map(|(v, _)| v.as_str()).collect();
                let inner: Vec<Formula> = ctx
                    .iter()
                    .filter(|h| h.free_vars().iter().all(|v| !bound.contains(v.as_str())))
                    .cloned()
                    .collect();
                let b = Box::new(self.formula(body, &inner));
                if matches!(f, Formula::Forall(..)) {
                    Formula::Forall(vs.clone(), b)
                } else {
                    Formula::Exists(vs.clone(), b)
                }
            }
        }
    }
}

/// Membership and subset atoms among the conjuncts of a formula.
fn collect_facts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(xs) => xs.iter().for_each(|x| collect_facts(x, out)),
        Formula::Pred(p, _) if p == "in" || p.starts_with("subset_") => out.push(f.clone()),
        _ => {}
    }
}

/// Propositional constant folding; it preserves equivalence and applies
/// no lemma.
fn fold(f: Formula) -> Formula {
    match f {
        Formula::Not(a) => match fold(*a) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            a => not(a),
        },
        Formula::And(xs) => {
            let mut out = Vec::new();
            for x in xs.into_iter().map(fold) {
                match x {
                    Formula::True => {}
                    Formula::False => return Formula::False,
                    x => out.push(x),
                }
            }
            match out.len() {
                0 => Formula::True,
                1 => out.pop().unwrap(),
                _ => Formula::And(out),
            }
        }
        Formula::Or(xs) => {
            let mut out = Vec::new();
            for x in xs.into_iter().map(fold) {
                match x {
                    Formula::False => {}
                    Formula::True => return Formula::True,
                    x => out.push(x),
                }
            }
            match out.len() {
                0 => Formula::False,
                1 => out.pop().unwrap(),
                _ => Formula::Or(out),
            }
        }
        Formula::Implies(a, b) => match (fold(*a), fold(*b)) {
            (Formula::True, b) => b,
            (Formula::False, _) | (_, Formula::True) => Formula::True,
            (a, Formula::False) => not(a),
            (a, b) => implies(a, b),
        },
        Formula::Iff(a, b) => match (fold(*a), fold(*b)) {
            (Formula::True, x) | (x, Formula::True) => x,
            (a, b) => iff(a, b),
        },
        Formula::Forall(vs, b) => match fold(*b) {
            c @ (Formula::True | Formula::False) => c,
            b => Formula::Forall(vs, Box::new(b)),
        },
        Formula::Exists(vs, b) => match fold(*b) {
            // Sorts are non-empty.
            c @ (Formula::True | Formula::False) => c,
            b => Formula::Exists(vs, Box::new(b)),
        },
        other => other,
    }
}

/// Applies the shipped lemmas to `formula` until nothing changes or
/// `budget` lemma applications have been spent. Membership and subset
/// atoms among `hypotheses`, and among the antecedents of implications,
/// serve as premises. The result is equivalent to the input in every
/// interpretation that satisfies the hypotheses.
pub fn rewrite_with_lemmas(formula: &Formula, hypotheses: &[Formula], budget: usize) -> RewriteOutcome {
    let mut ctx = Vec::new();
    for h in hypotheses {
        collect_facts(h, &mut ctx);
    }
    let mut rw = Rewriter {
        budget,
        applied: Vec::new(),
        exceeded: false,
    };
    let mut current = fold(formula.clone());
    loop {
        let next = fold(rw.formula(&current, &ctx));
        if next == current || rw.exceeded {
            current = next;
            break;
        }
        current = next;
    }
    RewriteOutcome {
        formula: current,
        applied: rw.applied,
        budget_exceeded: rw.exceeded,
    }
}
