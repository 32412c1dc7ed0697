//! The induction rule for transitive closure: if `phi` holds for every
//! pair of `r`, and is preserved by prepending an `r`-step to a
//! `transClos(r)`-path, then it holds for every pair of `transClos(r)`.
//! The rule is sound only for the least fixpoint, which the unfolding
//! axiom alone does not pin down; obligations that need minimality carry
//! instances of it.

use std::collections::{BTreeMap, BTreeSet};

use super::syntax::*;
use super::theory::Axiom;
use super::FolError;

/// A formula abstracted over parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamFormula {
    pub params: Vec<(String, FSort)>,
    pub body: Formula,
}

impl ParamFormula {
    pub fn new(params: &[(&str, FSort)], body: Formula) -> ParamFormula {
        ParamFormula {
            params: params.iter().map(|(n, s)| (n.to_string(), *s)).collect(),
            body,
        }
    }

    /// The body with the parameters replaced by the given terms; the
    /// terms must not mention variables bound inside the body.
    pub fn apply(&self, args: &[FTerm]) -> Formula {
        let map: BTreeMap<String, FTerm> = self.params.iter().map(|(p, _)| p.clone()).zip(args.iter().cloned()).collect();
        subst_formula(&self.body, &map)
    }
}

/// The three parts of an instantiated rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TcInductInstance {
    /// `forall a, b. in(binary(a, b), r) -> phi(a, b)`
    pub base: Formula,
    /// `forall a, b, c. in(binary(a, b), r) & in(binary(b, c), transClos(r)) & phi(b, c) -> phi(a, c)`
    pub step: Formula,
    /// `forall a, b. in(binary(a, b), transClos(r)) -> phi(a, b)`
    pub conclusion: Formula,
}

impl TcInductInstance {
    pub fn premises(&self) -> [&Formula; 2] {
        [&self.base, &self.step]
    }

    /// `base & step -> conclusion`, the form in which an instance is added
    /// to an obligation.
    pub fn as_formula(&self) -> Formula {
        implies(Formula::And(vec![self.base.clone(), self.step.clone()]), self.conclusion.clone())
    }

    pub fn as_axiom(&self, name: &str) -> Axiom {
        Axiom::new(name, self.as_formula())
    }
}

fn subst_term(t: &FTerm, map: &BTreeMap<String, FTerm>) -> FTerm {
    match t {
        FTerm::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        FTerm::Fn(f, args) => FTerm::Fn(f.clone(), args.iter().map(|a| subst_term(a, map)).collect()),
        FTerm::Int(_) => t.clone(),
    }
}

/// Substitutes free variables; binders shadow the map.
pub fn subst_formula(f: &Formula, map: &BTreeMap<String, FTerm>) -> Formula {
    let s = |x: &Formula| subst_formula(x, map);
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(|a| subst_term(a, map)).collect()),
        Formula::Eq(a, b) => Formula::Eq(subst_term(a, map), subst_term(b, map)),
        Formula::Not(a) => not(s(a)),
        Formula::And(xs) => Formula::And(xs.iter().map(s).collect()),
        Formula::Or(xs) => Formula::Or(xs.iter().map(s).collect()),
        Formula::Implies(a, b) => implies(s(a), s(b)),
        Formula::Iff(a, b) => iff(s(a), s(b)),
        Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
            let mut inner = map.clone();
            for (v, _) in vs {
                inner.remove(v);
            }
            let b = Box::new(subst_formula(body, &inner));
            if matches!(f, Formula::Forall(..)) {
                Formula::Forall(vs.clone(), b)
            } else {
                Formula::Exists(vs.clone(), b)
            }
        }
    }
}

fn term_vars(t: &FTerm, out: &mut BTreeSet<String>) {
    match t {
        FTerm::Var(v) => {
            out.insert(v.clone());
        }
        FTerm::Fn(_, args) => args.iter().for_each(|a| term_vars(a, out)),
        FTerm::Int(_) => {}
    }
}

/// Every variable name occurring in a formula, bound or free.
fn all_vars(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::True | Formula::False => {}
        Formula::Pred(_, args) => args.iter().for_each(|a| term_vars(a, out)),
        Formula::Eq(a, b) => {
            term_vars(a, out);
            term_vars(b, out);
        }
        Formula::Not(a) => all_vars(a, out),
        Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| all_vars(x, out)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            all_vars(a, out);
            all_vars(b, out);
        }
        Formula::Forall(vs, b) | Formula::Exists(vs, b) => {
            out.extend(vs.iter().map(|(v, _)| v.clone()));
            all_vars(b, out);
        }
    }
}

/// Instantiates the rule with `phi` and the binary relation term `r`.
/// The rule's own variables are renamed away from every variable of `phi`
/// and `r`, so no capture can occur.
pub fn check_tc_induct_instance(phi: &ParamFormula, r: &FTerm) -> Result<TcInductInstance, FolError> {
    if phi.params.len() != 2 || phi.params.iter().any(|(_, s)| *s != FSort::Atom) {
        return Err(FolError::ArityError(format!(
            "the induction formula needs exactly two Atom parameters, found {}",
            phi.params.iter().map(|(p, s)| format!("{p}: {}", s.name())).collect::<Vec<_>>().join(", ")
        )));
    }
    let mut taken = BTreeSet::new();
    all_vars(&phi.body, &mut taken);
    term_vars(r, &mut taken);
    let mut fresh = |base: &str| {
        let mut name = base.to_string();
        let mut k = 1;
        while taken.contains(&name) {
            name = format!("{base}{k}");
            k += 1;
        }
        taken.insert(name.clone());
        name
    };
    let (a, b, c) = (fresh("a"), fresh("b"), fresh("c"));
    let at = |names: &[&String]| names.iter().map(|n| ((*n).clone(), FSort::Atom)).collect::<Vec<_>>();
    let pair = |x: &str, y: &str| tuple(vec![var(x), var(y)]);
    let tc = func("transClos", vec![r.clone()]);
    let base = forall(at(&[&a, &b]), implies(mem(pair(&a, &b), r.clone()), phi.apply(&[var(&a), var(&b)])));
    let step = forall(
        at(&[&a, &b, &c]),
        implies(
            Formula::And(vec![
                mem(pair(&a, &b), r.clone()),
                mem(pair(&b, &c), tc.clone()),
                phi.apply(&[var(&b), var(&c)]),
            ]),
            phi.apply(&[var(&a), var(&c)]),
        ),
    );
    let conclusion = forall(at(&[&a, &b]), implies(mem(pair(&a, &b), tc), phi.apply(&[var(&a), var(&b)])));
    Ok(TcInductInstance { base, step, conclusion })
}
