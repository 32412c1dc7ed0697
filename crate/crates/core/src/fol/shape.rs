//! Operator-tree shapes of source expressions and of exported formulas,
//! used to check that the export preserves the structure of a formula.
//!
//! Both sides are normalized the same way: nested `all` (or `some`)
//! quantifiers are merged into one node, `no x | f` reads as
//! `not (some x | f)`, bound variables are labelled by binding order and
//! constants by their exported names.

use std::collections::HashMap;
use std::fmt;

use crate::model::{Domain, ExprKind, Model, Quant, RelExpr, VarId};

use super::export::{ConstRole, Obligation};
use super::syntax::{FSort, FTerm, Formula};
use super::theory::OpInstance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub label: String,
    pub children: Vec<Shape>,
}

impl Shape {
    fn leaf(label: impl Into<String>) -> Shape {
        Shape {
            label: label.into(),
            children: vec![],
        }
    }

    fn node(label: impl Into<String>, children: Vec<Shape>) -> Shape {
        Shape {
            label: label.into(),
            children,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Shape::size).sum::<usize>()
    }

    /// Path (child indices) and labels of the first difference, if any.
    pub fn first_difference(&self, other: &Shape) -> Option<(Vec<usize>, String, String)> {
        if self.label != other.label || self.children.len() != other.children.len() {
            return Some((vec![], self.to_string(), other.to_string()));
        }
        for (i, (a, b)) in self.children.iter().zip(&other.children).enumerate() {
            if let Some((mut path, x, y)) = a.first_difference(b) {
                path.insert(0, i);
                return Some((path, x, y));
            }
        }
        None
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn quant_label(q: Quant) -> String {
    format!("quant:{}", q.as_str())
}

/// Merges a quantifier node into its parent when both are `all` or both
/// are `some`: children are domains followed by the body.
fn merge_quant(label: String, mut doms: Vec<Shape>, body: Shape) -> Shape {
    let mergeable = label == "quant:all" || label == "quant:some";
    if mergeable && body.label == label {
        doms.extend(body.children);
        return Shape::node(label, doms);
    }
    doms.push(body);
    Shape::node(label, doms)
}

// ----- source side ----------------------------------------------------------

struct SourceShaper<'a> {
    model: &'a Model,
    ob: &'a Obligation,
    vars: HashMap<VarId, usize>,
    next: usize,
}

fn const_name(ob: &Obligation, role: &ConstRole) -> String {
    ob.constants
        .iter()
        .find(|c| &c.role == role)
        .map(|c| c.decl.name.clone())
        .unwrap_or_else(|| format!("?{role:?}"))
}

impl SourceShaper<'_> {
    fn shape(&mut self, e: &RelExpr) -> Shape {
        let kids = |s: &mut Self, xs: &[&RelExpr]| xs.iter().map(|x| s.shape(x)).collect::<Vec<_>>();
        match &e.kind {
            ExprKind::Sig(s) => Shape::leaf(format!("const:{}", const_name(self.ob, &ConstRole::Sig(self.model.sigs[*s].name.clone())))),
            ExprKind::Field(f) => {
                Shape::leaf(format!("const:{}", const_name(self.ob, &ConstRole::Field(self.model.fields[*f].name.clone()))))
            }
            ExprKind::Ord(f) => Shape::leaf(format!("const:{}", const_name(self.ob, &ConstRole::Ordering(*f)))),
            ExprKind::Var(v) => match self.vars.get(&v.id) {
                Some(i) => Shape::leaf(format!("var#{i}")),
                None => Shape::leaf(format!("free:{}", v.name)),
            },
            ExprKind::None => Shape::leaf("none"),
            ExprKind::Union(a, b) => Shape::node("union", kids(self, &[a, b])),
            ExprKind::Inter(a, b) => Shape::node("inter", kids(self, &[a, b])),
            ExprKind::Diff(a, b) => Shape::node("diff", kids(self, &[a, b])),
            ExprKind::Product(a, b) => Shape::node("product", kids(self, &[a, b])),
            ExprKind::Join(a, b) => Shape::node("join", kids(self, &[a, b])),
            ExprKind::Closure(a) => Shape::node("closure", kids(self, &[a])),
            ExprKind::ReflClosure(a) => Shape::node("reflclosure", kids(self, &[a])),
            ExprKind::Call(t, args) => {
                let name = self.ob.templates[*t].name.clone();
                Shape::node(format!("call:{name}"), args.iter().map(|a| self.shape(a)).collect())
            }
            ExprKind::True => Shape::leaf("true"),
            ExprKind::False => Shape::leaf("false"),
            ExprKind::Not(a) => Shape::node("not", kids(self, &[a])),
            ExprKind::And(xs) => Shape::node("and", xs.iter().map(|x| self.shape(x)).collect()),
            ExprKind::Or(xs) => Shape::node("or", xs.iter().map(|x| self.shape(x)).collect()),
            ExprKind::Implies(a, b) => Shape::node("implies", kids(self, &[a, b])),
            ExprKind::Iff(a, b) => Shape::node("iff", kids(self, &[a, b])),
            ExprKind::In(a, b) => Shape::node("in", kids(self, &[a, b])),
            ExprKind::Eq(a, b) => Shape::node("eq", kids(self, &[a, b])),
            ExprKind::Mult(m, a) => Shape::node(format!("mult:{}", m.as_str()), kids(self, &[a])),
            ExprKind::IntLit(n) => Shape::leaf(format!("int:{n}")),
            ExprKind::IntAdd(a, b) => Shape::node("add", kids(self, &[a, b])),
            ExprKind::IntSub(a, b) => Shape::node("sub", kids(self, &[a, b])),
            ExprKind::IntCmp(op, a, b) => match op {
                crate::model::CmpOp::Eq => Shape::node("eq", kids(self, &[a, b])),
                op => Shape::node(format!("cmp:{}", op.as_str()), kids(self, &[a, b])),
            },
            ExprKind::Quant { q, vars, body } => {
                let label = quant_label(if *q == Quant::No { Quant::Some } else { *q });
                let mut doms = Vec::new();
                for qv in vars {
                    if let Domain::Atoms(d) = &qv.domain {
                        doms.push(self.shape(d));
                    } else {
                        doms.push(Shape::leaf("ints"));
                    }
                    self.vars.insert(qv.var.id, self.next);
                    self.next += 1;
                }
                let b = self.shape(body);
                let node = if vars.len() > 1 && !matches!(q, Quant::Lone | Quant::One) {
                    // Merge one variable at a time so that the result does
                    // not depend on how the source groups its binders.
                    let mut acc = b;
                    let mut ds = doms;
                    while let Some(d) = ds.pop() {
                        acc = merge_quant(label.clone(), vec![d], acc);
                    }
                    acc
                } else {
                    merge_quant(label, doms, b)
                };
                if *q == Quant::No {
                    Shape::node("not", vec![node])
                } else {
                    node
                }
            }
        }
    }
}

/// Shape of a source expression, labelled with the obligation's names.
pub fn source_shape(model: &Model, ob: &Obligation, e: &RelExpr) -> Shape {
    SourceShaper {
        model,
        ob,
        vars: HashMap::new(),
        next: 0,
    }
    .shape(e)
}

// ----- exported side ----------------------------------------------------------

struct Decompiler<'a> {
    ob: &'a Obligation,
    vars: Vec<(String, usize)>,
    next: usize,
}

fn op_label(op: OpInstance) -> Option<&'static str> {
    Some(match op {
        OpInstance::Union(_) => "union",
        OpInstance::Inter(_) => "inter",
        OpInstance::Diff(_) => "diff",
        OpInstance::Prod(..) => "product",
        OpInstance::Join(..) => "join",
        OpInstance::TransClos => "closure",
        OpInstance::ReflTransClos => "reflclosure",
        OpInstance::Subset(_) => "in",
        OpInstance::Some(_) => "mult:some",
        OpInstance::No(_) => "mult:no",
        OpInstance::Lone(_) => "mult:lone",
        OpInstance::One(_) => "mult:one",
        _ => return None,
    })
}

impl Decompiler<'_> {
    fn bind(&mut self, name: &str) {
        self.vars.push((name.to_string(), self.next));
        self.next += 1;
    }

    fn lookup(&self, name: &str) -> Shape {
        match self.vars.iter().rev().find(|(n, _)| n == name) {
            Some((_, i)) => Shape::leaf(format!("var#{i}")),
            None => Shape::leaf(format!("free:{name}")),
        }
    }

    fn term(&mut self, t: &FTerm) -> Shape {
        match t {
            FTerm::Var(v) => self.lookup(v),
            FTerm::Int(n) => Shape::leaf(format!("int:{n}")),
            FTerm::Fn(f, args) => {
                if f == "sing" && args.len() == 1 {
                    return self.term(&args[0]);
                }
                if f == "+" || f == "-" {
                    let label = if f == "+" { "add" } else { "sub" };
                    return Shape::node(label, args.iter().map(|a| self.term(a)).collect());
                }
                if args.is_empty() && self.ob.constant(f).is_some() {
                    return Shape::leaf(format!("const:{f}"));
                }
                match OpInstance::parse(f) {
                    Some(OpInstance::None(_)) => Shape::leaf("none"),
                    Some(OpInstance::Tuple(_)) => {
                        // A tuple of atom variables is a product of singletons.
                        let mut it = args.iter().map(|a| self.term(a)).collect::<Vec<_>>().into_iter();
                        let first = it.next().expect("constructor arguments");
                        it.fold(first, |acc, x| Shape::node("product", vec![acc, x]))
                    }
                    Some(op) => match op_label(op) {
                        Some(l) => Shape::node(l, args.iter().map(|a| self.term(a)).collect()),
                        None => Shape::leaf(format!("?{f}")),
                    },
                    None => Shape::node(format!("call:{f}"), args.iter().map(|a| self.term(a)).collect()),
                }
            }
        }
    }

    /// Recognizes `forall x. in(x, D) -> body` and `exists x. in(x, D) & body`.
    fn guarded<'f>(&self, f: &'f Formula) -> Option<(bool, &'f str, Option<&'f FTerm>, &'f Formula)> {
        match f {
            Formula::Forall(vs, body) if vs.len() == 1 => {
                let (x, s) = &vs[0];
                if *s == FSort::Int {
                    return Some((true, x, None, body));
                }
                match &**body {
                    Formula::Implies(g, b) => match &**g {
                        Formula::Pred(p, a) if p == "in" && a[0] == FTerm::Var(x.clone()) => Some((true, x, Some(&a[1]), b)),
                        _ => None,
                    },
                    _ => None,
                }
            }
            Formula::Exists(vs, body) if vs.len() == 1 => {
                let (x, s) = &vs[0];
                if *s == FSort::Int {
                    return Some((false, x, None, body));
                }
                match &**body {
                    Formula::And(items) if items.len() == 2 => match &items[0] {
                        Formula::Pred(p, a) if p == "in" && a[0] == FTerm::Var(x.clone()) => {
                            Some((false, x, Some(&a[1]), &items[1]))
                        }
                        _ => None,
                    },
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Recognizes the expansions of `one` and `lone` quantifiers: the body
    /// is stated for two variable tuples that are then equated.
    fn counting(&mut self, f: &Formula) -> Option<Shape> {
        let (label, xs, ys, conj_x) = match f {
            Formula::Exists(xs, body) => match &**body {
                Formula::And(items) if items.len() == 2 => match &items[1] {
                    Formula::Forall(ys, inner) if ys.len() == xs.len() => match &**inner {
                        Formula::Implies(_, eqs) if is_pairwise_eq(eqs, xs, ys) => ("quant:one", xs, ys, &items[0]),
                        _ => return None,
                    },
                    _ => return None,
                },
                _ => return None,
            },
            Formula::Forall(vs, body) if vs.len() % 2 == 0 && !vs.is_empty() => {
                let (xs, ys) = vs.split_at(vs.len() / 2);
                match &**body {
                    Formula::Implies(ante, eqs) if is_pairwise_eq(eqs, xs, ys) => match &**ante {
                        Formula::And(items) if items.len() == 2 => ("quant:lone", &xs.to_vec(), &ys.to_vec(), &items[0]),
                        _ => return None,
                    },
                    _ => return None,
                }
            }
            _ => return None,
        };
        let _ = ys;
        // The first conjunction holds the guards of the first tuple followed
        // by the body.
        let Formula::And(parts) = conj_x else { return None };
        let guards: Vec<Option<&FTerm>> = {
            let mut out = Vec::new();
            let mut i = 0;
            for (x, s) in xs.iter() {
                if *s == FSort::Int {
                    out.push(None);
                    continue;
                }
                match parts.get(i) {
                    Some(Formula::Pred(p, a)) if p == "in" && a[0] == FTerm::Var(x.clone()) => {
                        out.push(Some(&a[1]));
                        i += 1;
                    }
                    _ => return None,
                }
            }
            if i + 1 != parts.len() {
                return None;
            }
            out
        };
        let body = parts.last().expect("body");
        let mark = self.vars.len();
        let mut doms = Vec::new();
        for ((x, _), g) in xs.iter().zip(guards) {
            doms.push(match g {
                Some(d) => self.term(d),
                None => Shape::leaf("ints"),
            });
            self.bind(x);
        }
        let b = self.formula(body);
        self.vars.truncate(mark);
        doms.push(b);
        Some(Shape::node(label, doms))
    }

    fn formula(&mut self, f: &Formula) -> Shape {
        if let Some(s) = self.counting(f) {
            return s;
        }
        if let Some((universal, x, dom, body)) = self.guarded(f) {
            let d = match dom {
                Some(d) => self.term(d),
                None => Shape::leaf("ints"),
            };
            let mark = self.vars.len();
            self.bind(x);
            let b = self.formula(body);
            self.vars.truncate(mark);
            let label = if universal { "quant:all" } else { "quant:some" };
            return merge_quant(label.to_string(), vec![d], b);
        }
        match f {
            Formula::True => Shape::leaf("true"),
            Formula::False => Shape::leaf("false"),
            Formula::Not(a) => Shape::node("not", vec![self.formula(a)]),
            Formula::And(xs) => Shape::node("and", xs.iter().map(|x| self.formula(x)).collect()),
            Formula::Or(xs) => Shape::node("or", xs.iter().map(|x| self.formula(x)).collect()),
            Formula::Implies(a, b) => Shape::node("implies", vec![self.formula(a), self.formula(b)]),
            Formula::Iff(a, b) => Shape::node("iff", vec![self.formula(a), self.formula(b)]),
            Formula::Eq(a, b) => Shape::node("eq", vec![self.term(a), self.term(b)]),
            Formula::Pred(p, args) => {
                let kids = |s: &mut Self| args.iter().map(|a| s.term(a)).collect::<Vec<_>>();
                if p == "in" {
                    return Shape::node("in", kids(self));
                }
                if matches!(p.as_str(), "<" | "<=" | ">" | ">=") {
                    return Shape::node(format!("cmp:{p}"), kids(self));
                }
                match OpInstance::parse(p).and_then(op_label) {
                    Some(l) => Shape::node(l, kids(self)),
                    None => Shape::node(format!("call:{p}"), kids(self)),
                }
            }
            Formula::Forall(..) | Formula::Exists(..) => Shape::leaf("?quantifier"),
        }
    }
}

fn is_pairwise_eq(f: &Formula, xs: &[(String, FSort)], ys: &[(String, FSort)]) -> bool {
    match f {
        Formula::And(eqs) if eqs.len() == xs.len() => eqs.iter().zip(xs.iter().zip(ys)).all(|(e, ((x, _), (y, _)))| {
            *e == Formula::Eq(FTerm::Var(x.clone()), FTerm::Var(y.clone()))
        }),
        _ => false,
    }
}

/// Shape of an exported formula, decompiled back to source operators.
pub fn formula_shape(ob: &Obligation, f: &Formula) -> Shape {
    Decompiler {
        ob,
        vars: Vec::new(),
        next: 0,
    }
    .formula(f)
}

/// Compares the exported assertion with its source; returns the first
/// mismatch on failure.
pub fn check_structure(model: &Model, ob: &Obligation) -> Result<(), String> {
    let src = model
        .assertion(&ob.assertion)
        .ok_or_else(|| format!("unknown assertion `{}`", ob.assertion))?;
    let a = source_shape(model, ob, &src.body);
    let consequent = match &ob.goal {
        Formula::Implies(_, c) => &**c,
        other => other,
    };
    let b = formula_shape(ob, consequent);
    match a.first_difference(&b) {
        None => Ok(()),
        Some((path, x, y)) => Err(format!("at {path:?}: source {x} but exported {y}")),
    }
}
