//! Export of an assertion as a first-order proof obligation: the relational
//! theory, one constant per signature and field, the model constraints,
//! template definitions, the ordering bijection and the goal.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::model::{Domain, ExprKind, Model, MultTest, OrdFn, Quant, RelExpr, TemplateKind, Ty, VarId};

use super::syntax::*;
use super::theory::{Axiom, OpInstance, RelTheory, SymbolDecl};
use super::FolError;

/// Largest relation arity the exporter generates theory tiers for.
pub const MAX_ARITY: usize = 8;

/// Name of the bijection from integers to the ordered signature.
pub const ORD_BIJECTION: &str = "ord_b";

/// What a model constant stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstRole {
    Sig(String),
    Field(String),
    Ordering(OrdFn),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelConstant {
    pub decl: SymbolDecl,
    pub role: ConstRole,
}

/// A proof obligation: the goal follows from the axioms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub assertion: String,
    pub theory: RelTheory,
    /// Signatures, fields and ordering relations, in declaration order.
    pub constants: Vec<ModelConstant>,
    /// Predicate and function templates.
    pub templates: Vec<SymbolDecl>,
    /// The bijection symbol and its axioms, when the ordering is used.
    pub ordering: Option<(SymbolDecl, Vec<Axiom>)>,
    /// Upper end of the bijection's integer interval, if finite.
    pub finite_ordering: Option<u32>,
    /// Defining axioms of templates.
    pub definitions: Vec<Axiom>,
    /// Instantiated inference rules added for a proof (closure induction).
    pub rule_instances: Vec<Axiom>,
    /// Model constraints: hierarchy, abstractness, field typing and
    /// multiplicities, facts.
    pub constraints: Vec<Axiom>,
    /// The translated assertion body.
    pub assertion_formula: Formula,
    /// `(constraints) -> assertion`.
    pub goal: Formula,
}

// ----- naming -------------------------------------------------------------

const RESERVED: &[&str] = &["in", "int", "true", "false", "Tuple", "Relation", "Atom"];

fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
        || name.starts_with("ord_")
        || OpInstance::parse(name).is_some()
        || name.strip_prefix("Tuple").is_some_and(|k| k.parse::<usize>().is_ok())
        || name.strip_prefix("Rel").is_some_and(|k| k.parse::<usize>().is_ok())
        || name.strip_prefix("ext_").is_some()
}

/// Replaces characters outside `[A-Za-z0-9_]`; primes become `_p`.
fn sanitize(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        match c {
            '\'' => out.push_str("_p"),
            c if c.is_ascii_alphanumeric() || c == '_' => out.push(c),
            _ => out.push('_'),
        }
    }
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, 'v');
    }
    out
}

#[derive(Default)]
struct Names {
    used: BTreeSet<String>,
}

impl Names {
    fn claim(&mut self, base: &str) -> String {
        let base = sanitize(base);
        let mut name = base.clone();
        let mut k = 1;
        while self.used.contains(&name) || is_reserved(&name) {
            name = format!("{base}_{k}");
            k += 1;
        }
        self.used.insert(name.clone());
        name
    }
}

// ----- translation ----------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarKind {
    Atom,
    Rel(usize),
    Int,
}

fn ord_const(f: OrdFn) -> String {
    format!("ord_{}", f.as_str())
}

struct Translator<'m> {
    model: &'m Model,
    sig_names: Vec<String>,
    field_names: Vec<String>,
    template_names: Vec<String>,
    /// Constant names; bound variables avoid them.
    globals: BTreeSet<String>,
    /// Bound variable names of the formula being translated.
    locals: Names,
    vars: HashMap<VarId, (String, VarKind)>,
    rel_eq: BTreeSet<usize>,
}

fn unsupported<T>(what: impl Into<String>) -> Result<T, FolError> {
    Err(FolError::Unsupported(what.into()))
}

impl<'m> Translator<'m> {
    fn new(model: &'m Model) -> Translator<'m> {
        let mut names = Names::default();
        let sig_names = model.sigs.iter().map(|s| names.claim(&s.name)).collect();
        let field_names = model.fields.iter().map(|f| names.claim(&f.name)).collect();
        let template_names = model.templates.iter().map(|t| names.claim(&t.name)).collect();
        Translator {
            model,
            sig_names,
            field_names,
            template_names,
            globals: names.used,
            locals: Names::default(),
            vars: HashMap::new(),
            rel_eq: BTreeSet::new(),
        }
    }

    /// Starts a new top-level formula: bound names may be reused.
    fn reset_locals(&mut self) {
        self.locals = Names {
            used: self.globals.clone(),
        };
    }

    fn bind(&mut self, id: VarId, name: &str, kind: VarKind) -> String {
        let n = self.locals.claim(name);
        self.vars.insert(id, (n.clone(), kind));
        n
    }

    fn arity(e: &RelExpr) -> Result<usize, FolError> {
        let k = e.arity();
        if k > MAX_ARITY {
            return Err(FolError::UnsupportedArity(k));
        }
        Ok(k)
    }

    fn rel(&mut self, e: &RelExpr) -> Result<FTerm, FolError> {
        let k = Self::arity(e)?;
        let bin = |t: &mut Self, op: OpInstance, a: &RelExpr, b: &RelExpr| -> Result<FTerm, FolError> {
            Ok(func(&op.name(), vec![t.rel(a)?, t.rel(b)?]))
        };
        Ok(match &e.kind {
            ExprKind::Sig(s) => konst(&self.sig_names[*s]),
            ExprKind::Field(f) => konst(&self.field_names[*f]),
            ExprKind::Var(v) => match self.vars.get(&v.id) {
                Some((n, VarKind::Atom)) => func("sing", vec![var(n)]),
                Some((n, VarKind::Rel(_))) => var(n),
                Some((_, VarKind::Int)) => return unsupported(format!("integer `{}` used as a relation", v.name)),
                None => return unsupported(format!("free variable `{}`", v.name)),
            },
            ExprKind::None => konst(&OpInstance::None(k.max(1)).name()),
            ExprKind::Ord(f) => {
                if self.model.ordering.is_none() {
                    return unsupported("ordering function without an ordering");
                }
                konst(&ord_const(*f))
            }
            ExprKind::Union(a, b) => bin(self, OpInstance::Union(k), a, b)?,
            ExprKind::Inter(a, b) => bin(self, OpInstance::Inter(k), a, b)?,
            ExprKind::Diff(a, b) => bin(self, OpInstance::Diff(k), a, b)?,
            ExprKind::Product(a, b) => bin(self, OpInstance::Prod(Self::arity(a)?, Self::arity(b)?), a, b)?,
            ExprKind::Join(a, b) => bin(self, OpInstance::Join(Self::arity(a)?, Self::arity(b)?), a, b)?,
            ExprKind::Closure(a) => func("transClos", vec![self.rel(a)?]),
            ExprKind::ReflClosure(a) => func("reflTransClos", vec![self.rel(a)?]),
            ExprKind::Call(t, args) if self.model.templates[*t].kind == TemplateKind::Fun => {
                let args = self.args(*t, args)?;
                FTerm::Fn(self.template_names[*t].clone(), args)
            }
            _ => return unsupported(format!("{:?} as a relation", e.kind)),
        })
    }

    fn args(&mut self, t: usize, args: &[RelExpr]) -> Result<Vec<FTerm>, FolError> {
        let params = &self.model.templates[t].params;
        params
            .iter()
            .zip(args)
            .map(|(p, a)| if p.ty == Ty::Int { self.int(a) } else { self.rel(a) })
            .collect()
    }

    fn int(&mut self, e: &RelExpr) -> Result<FTerm, FolError> {
        Ok(match &e.kind {
            ExprKind::IntLit(n) => FTerm::Int(*n),
            ExprKind::IntAdd(a, b) => func("+", vec![self.int(a)?, self.int(b)?]),
            ExprKind::IntSub(a, b) => func("-", vec![self.int(a)?, self.int(b)?]),
            ExprKind::Var(v) => match self.vars.get(&v.id) {
                Some((n, VarKind::Int)) => var(n),
                _ => return unsupported(format!("`{}` used as an integer", v.name)),
            },
            ExprKind::Call(t, args) => {
                let args = self.args(*t, args)?;
                FTerm::Fn(self.template_names[*t].clone(), args)
            }
            _ => return unsupported(format!("{:?} as an integer", e.kind)),
        })
    }

    /// The atom terms of a tuple of atom variables, if `e` is one.
    fn atom_tuple(&self, e: &RelExpr) -> Option<Vec<FTerm>> {
        match &e.kind {
            ExprKind::Var(v) => match self.vars.get(&v.id) {
                Some((n, VarKind::Atom)) => Some(vec![var(n)]),
                _ => None,
            },
            ExprKind::Product(a, b) => {
                let mut x = self.atom_tuple(a)?;
                x.extend(self.atom_tuple(b)?);
                Some(x)
            }
            _ => None,
        }
    }

    fn formula(&mut self, e: &RelExpr) -> Result<Formula, FolError> {
        Ok(match &e.kind {
            ExprKind::True => Formula::True,
            ExprKind::False => Formula::False,
            ExprKind::Not(a) => not(self.formula(a)?),
            ExprKind::And(xs) => Formula::And(xs.iter().map(|x| self.formula(x)).collect::<Result<_, _>>()?),
            ExprKind::Or(xs) => Formula::Or(xs.iter().map(|x| self.formula(x)).collect::<Result<_, _>>()?),
            ExprKind::Implies(a, b) => implies(self.formula(a)?, self.formula(b)?),
            ExprKind::Iff(a, b) => iff(self.formula(a)?, self.formula(b)?),
            ExprKind::In(a, b) => match self.atom_tuple(a) {
                Some(atoms) => mem(tuple(atoms), self.rel(b)?),
                None => {
                    let k = Self::arity(a)?;
                    pred(&OpInstance::Subset(k).name(), vec![self.rel(a)?, self.rel(b)?])
                }
            },
            ExprKind::Eq(a, b) if a.ty == Ty::Int => Formula::Eq(self.int(a)?, self.int(b)?),
            ExprKind::Eq(a, b) => match (self.atom_tuple(a), self.atom_tuple(b)) {
                (Some(x), Some(y)) if x.len() == 1 && y.len() == 1 => Formula::Eq(x[0].clone(), y[0].clone()),
                _ => {
                    self.rel_eq.insert(Self::arity(a)?);
                    Formula::Eq(self.rel(a)?, self.rel(b)?)
                }
            },
            ExprKind::Mult(m, a) => {
                let k = Self::arity(a)?;
                let op = match m {
                    MultTest::No => OpInstance::No(k),
                    MultTest::Some => OpInstance::Some(k),
                    MultTest::Lone => OpInstance::Lone(k),
                    MultTest::One => OpInstance::One(k),
                };
                pred(&op.name(), vec![self.rel(a)?])
            }
            ExprKind::IntCmp(op, a, b) => {
                let (x, y) = (self.int(a)?, self.int(b)?);
                match op {
                    crate::model::CmpOp::Eq => Formula::Eq(x, y),
                    op => pred(op.as_str(), vec![x, y]),
                }
            }
            ExprKind::Call(t, args) => {
                let args = self.args(*t, args)?;
                Formula::Pred(self.template_names[*t].clone(), args)
            }
            ExprKind::Quant { q, vars, body } => self.quant(*q, vars, body)?,
            _ => return unsupported(format!("{:?} as a formula", e.kind)),
        })
    }

    /// Binds the variables in order and returns the binders with their
    /// domain guards (`None` for integer variables).
    fn binders(&mut self, vars: &[crate::model::QVar]) -> Result<Vec<((String, FSort), Option<Formula>)>, FolError> {
        let mut out = Vec::new();
        for qv in vars {
            match &qv.domain {
                Domain::Atoms(d) => {
                    let dom = self.rel(d)?;
                    let n = self.bind(qv.var.id, &qv.var.name, VarKind::Atom);
                    out.push(((n.clone(), FSort::Atom), Some(mem(var(&n), dom))));
                }
                Domain::Int => {
                    let n = self.bind(qv.var.id, &qv.var.name, VarKind::Int);
                    out.push(((n, FSort::Int), None));
                }
            }
        }
        Ok(out)
    }

    fn quant(&mut self, q: Quant, vars: &[crate::model::QVar], body: &RelExpr) -> Result<Formula, FolError> {
        match q {
            Quant::All | Quant::Some | Quant::No => {
                let bs = self.binders(vars)?;
                let mut f = self.formula(body)?;
                let universal = q == Quant::All;
                for (b, guard) in bs.into_iter().rev() {
                    f = match (universal, guard) {
                        (true, Some(g)) => forall(vec![b], implies(g, f)),
                        (true, None) => forall(vec![b], f),
                        (false, Some(g)) => exists(vec![b], Formula::And(vec![g, f])),
                        (false, None) => exists(vec![b], f),
                    };
                }
                Ok(if q == Quant::No { not(f) } else { f })
            }
            Quant::Lone | Quant::One => {
                let xs = self.binders(vars)?;
                let fx = self.formula(body)?;
                let ys = self.binders(vars)?;
                let fy = self.formula(body)?;
                let conj = |bs: &[((String, FSort), Option<Formula>)], f: Formula| {
                    let mut items: Vec<Formula> = bs.iter().filter_map(|(_, g)| g.clone()).collect();
                    items.push(f);
                    Formula::And(items)
                };
                let eqs = Formula::And(
                    xs.iter()
                        .zip(&ys)
                        .map(|(((x, _), _), ((y, _), _))| Formula::Eq(var(x), var(y)))
                        .collect(),
                );
                let xv: Vec<_> = xs.iter().map(|(b, _)| b.clone()).collect();
                let yv: Vec<_> = ys.iter().map(|(b, _)| b.clone()).collect();
                Ok(if q == Quant::One {
                    exists(
                        xv,
                        Formula::And(vec![conj(&xs, fx), forall(yv, implies(conj(&ys, fy), eqs))]),
                    )
                } else {
                    forall(
                        [xv, yv].concat(),
                        implies(Formula::And(vec![conj(&xs, fx), conj(&ys, fy)]), eqs),
                    )
                })
            }
        }
    }

    fn sort_of_ty(ty: &Ty) -> Result<FSort, FolError> {
        match ty {
            Ty::Int => Ok(FSort::Int),
            Ty::Rel(c) if c.len() <= MAX_ARITY => Ok(FSort::Rel(c.len().max(1))),
            Ty::Rel(c) => Err(FolError::UnsupportedArity(c.len())),
            Ty::Bool => unsupported("boolean parameter"),
        }
    }

    /// Declaration and defining axiom of a template.
    fn template(&mut self, t: usize) -> Result<(SymbolDecl, Axiom), FolError> {
        self.reset_locals();
        let tpl = &self.model.templates[t];
        let name = self.template_names[t].clone();
        let mut binders = Vec::new();
        for p in &tpl.params {
            let sort = Self::sort_of_ty(&p.ty)?;
            let kind = match sort {
                FSort::Int => VarKind::Int,
                FSort::Rel(k) => VarKind::Rel(k),
                _ => unreachable!(),
            };
            let n = self.bind(p.var.id, &p.var.name, kind);
            binders.push((n, sort));
        }
        let args: Vec<FSort> = binders.iter().map(|(_, s)| *s).collect();
        let call = terms_of(&binders);
        let (decl, body) = match tpl.kind {
            TemplateKind::Pred => (
                SymbolDecl::predicate(&name, args),
                iff(Formula::Pred(name.clone(), call), self.formula(&tpl.body)?),
            ),
            TemplateKind::Fun => {
                let result = Self::sort_of_ty(&tpl.result)?;
                let value = if result == FSort::Int {
                    self.int(&tpl.body)?
                } else {
                    if let FSort::Rel(k) = result {
                        self.rel_eq.insert(k);
                    }
                    self.rel(&tpl.body)?
                };
                (
                    SymbolDecl::function(&name, args, result),
                    Formula::Eq(FTerm::Fn(name.clone(), call), value),
                )
            }
        };
        Ok((decl, Axiom::new(format!("def_{name}"), forall(binders, body))))
    }

    fn closed(&mut self, e: &RelExpr) -> Result<Formula, FolError> {
        self.reset_locals();
        self.formula(e)
    }
}

fn union_all(terms: Vec<FTerm>) -> FTerm {
    let mut it = terms.into_iter();
    let first = it.next().expect("at least one term");
    it.fold(first, |acc, t| func("union_1", vec![acc, t]))
}

/// The ordering bijection and its four axioms: it covers the ordered
/// signature, maps into it, is injective, and links first/last/next/prev
/// to consecutive indices. With `finite = Some(n)` the integers range over
/// `[0, n)` instead of all non-negative integers.
fn ordering_axioms(sig: &str, finite: Option<u32>) -> Vec<Axiom> {
    let b = |t: FTerm| func(ORD_BIJECTION, vec![t]);
    let range = |i: &str| {
        let lo = pred(">=", vec![var(i), FTerm::Int(0)]);
        match finite {
            Some(n) => Formula::And(vec![lo, pred("<", vec![var(i), FTerm::Int(n as i64)])]),
            None => lo,
        }
    };
    let int = |n: &str| (n.to_string(), FSort::Int);
    let atom = |n: &str| (n.to_string(), FSort::Atom);
    let cover = forall(
        vec![atom("a")],
        implies(
            mem(var("a"), konst(sig)),
            exists(vec![int("i")], Formula::And(vec![range("i"), Formula::Eq(var("a"), b(var("i")))])),
        ),
    );
    let into = forall(vec![int("i")], implies(range("i"), mem(b(var("i")), konst(sig))));
    let inj = forall(
        vec![int("i"), int("j")],
        implies(
            Formula::And(vec![range("i"), range("j")]),
            iff(Formula::Eq(b(var("i")), b(var("j"))), Formula::Eq(var("i"), var("j"))),
        ),
    );
    let succ = func("+", vec![var("i"), FTerm::Int(1)]);
    let mut step = vec![range("i"), Formula::Eq(var("a"), b(var("i"))), Formula::Eq(var("c"), b(succ.clone()))];
    if let Some(n) = finite {
        step.push(pred("<", vec![succ, FTerm::Int(n as i64)]));
    }
    let pair = |x: &str, y: &str| tuple(vec![var(x), var(y)]);
    let first = forall(vec![atom("a")], iff(mem(var("a"), konst("ord_first")), Formula::Eq(var("a"), b(FTerm::Int(0)))));
    let last = match finite {
        Some(n) => forall(
            vec![atom("a")],
            iff(mem(var("a"), konst("ord_last")), Formula::Eq(var("a"), b(FTerm::Int(n as i64 - 1)))),
        ),
        None => forall(vec![atom("a")], not(mem(var("a"), konst("ord_last")))),
    };
    let next = forall(
        vec![atom("a"), atom("c")],
        iff(mem(pair("a", "c"), konst("ord_next")), exists(vec![int("i")], Formula::And(step))),
    );
    let prev = forall(
        vec![atom("a"), atom("c")],
        iff(mem(pair("a", "c"), konst("ord_prev")), mem(pair("c", "a"), konst("ord_next"))),
    );
    vec![
        Axiom::new("ord_cover", cover),
        Axiom::new("ord_into", into),
        Axiom::new("ord_inj", inj),
        Axiom::new("ord_link", Formula::And(vec![first, last, next, prev])),
    ]
}

/// Translates the model and one of its assertions into an obligation.
/// `finite_ordering = Some(n)` restricts the ordering bijection to `[0, n)`.
pub fn export_obligation(model: &Model, assertion: &str, finite_ordering: Option<u32>) -> Result<Obligation, FolError> {
    let target = model
        .assertion(assertion)
        .ok_or_else(|| FolError::UnknownAssertion(assertion.to_string()))?;
    if finite_ordering == Some(0) {
        return Err(FolError::InvalidBound("the finite ordering interval must be non-empty".into()));
    }
    let mut tr = Translator::new(model);

    let mut constants = Vec::new();
    for (s, sig) in model.sigs.iter().enumerate() {
        constants.push(ModelConstant {
            decl: SymbolDecl::function(&tr.sig_names[s], vec![], FSort::Rel(1)),
            role: ConstRole::Sig(sig.name.clone()),
        });
    }
    for (f, field) in model.fields.iter().enumerate() {
        if field.arity() > MAX_ARITY {
            return Err(FolError::UnsupportedArity(field.arity()));
        }
        constants.push(ModelConstant {
            decl: SymbolDecl::function(&tr.field_names[f], vec![], FSort::Rel(field.arity())),
            role: ConstRole::Field(field.name.clone()),
        });
    }
    let ordering = match &model.ordering {
        Some(ord) => {
            for f in [OrdFn::First, OrdFn::Last, OrdFn::Next, OrdFn::Prev] {
                constants.push(ModelConstant {
                    decl: SymbolDecl::function(&ord_const(f), vec![], FSort::Rel(f.arity())),
                    role: ConstRole::Ordering(f),
                });
            }
            let decl = SymbolDecl::function(ORD_BIJECTION, vec![FSort::Int], FSort::Atom);
            Some((decl, ordering_axioms(&tr.sig_names[ord.sig], finite_ordering)))
        }
        None => None,
    };

    let mut constraints = Vec::new();
    let sig = |s: usize, tr: &Translator| konst(&tr.sig_names[s]);
    for (s, x) in model.sigs.iter().enumerate() {
        if let Some(p) = x.parent {
            let f = pred("subset_1", vec![sig(s, &tr), sig(p, &tr)]);
            constraints.push(Axiom::new(format!("sub_{}", tr.sig_names[s]), f));
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![model.top_levels()];
    groups.extend(model.sigs.iter().map(|x| x.children.clone()));
    for group in groups {
        for (i, &a) in group.iter().enumerate() {
            for &b in &group[i + 1..] {
                let f = pred("no_1", vec![func("inter_1", vec![sig(a, &tr), sig(b, &tr)])]);
                constraints.push(Axiom::new(format!("disj_{}_{}", tr.sig_names[a], tr.sig_names[b]), f));
            }
        }
    }
    for s in 0..model.sigs.len() {
        if model.is_abstract_constrained(s) {
            tr.rel_eq.insert(1);
            let children = model.sigs[s].children.iter().map(|&c| sig(c, &tr)).collect();
            let f = Formula::Eq(sig(s, &tr), union_all(children));
            constraints.push(Axiom::new(format!("abstract_{}", tr.sig_names[s]), f));
        }
    }
    for (f, field) in model.fields.iter().enumerate() {
        let name = tr.field_names[f].clone();
        constraints.push(Axiom::new(format!("type_{name}"), tr.closed(&field.typing)?));
        constraints.push(Axiom::new(format!("mult_{name}"), tr.closed(&field.multiplicity)?));
    }
    let mut fact_names = Names::default();
    for fact in &model.facts {
        let name = fact_names.claim(&format!("fact_{}", fact.name));
        constraints.push(Axiom::new(name, tr.closed(&fact.body)?));
    }

    let mut templates = Vec::new();
    let mut definitions = Vec::new();
    for t in 0..model.templates.len() {
        let (decl, def) = tr.template(t)?;
        templates.push(decl);
        definitions.push(def);
    }

    let assertion_formula = tr.closed(&target.body)?;
    let goal = implies(
        Formula::And(constraints.iter().map(|a| a.formula.clone()).collect()),
        assertion_formula.clone(),
    );

    let mut formulas: Vec<&Formula> = vec![&goal];
    formulas.extend(definitions.iter().map(|a| &a.formula));
    if let Some((_, axioms)) = &ordering {
        formulas.extend(axioms.iter().map(|a| &a.formula));
    }
    let theory = RelTheory::for_formulas(formulas, &tr.rel_eq);
    if theory.max_arity() > MAX_ARITY {
        return Err(FolError::UnsupportedArity(theory.max_arity()));
    }

    let ob = Obligation {
        assertion: assertion.to_string(),
        theory,
        constants,
        templates,
        ordering,
        finite_ordering,
        definitions,
        rule_instances: Vec::new(),
        constraints,
        assertion_formula,
        goal,
    };
    ob.check_well_formed()?;
    Ok(ob)
}

// ----- rendering and checks -------------------------------------------------

fn write_decl(out: &mut String, d: &SymbolDecl) {
    let args = if d.args.is_empty() {
        String::new()
    } else {
        format!("({})", d.args.iter().map(|s| s.name()).collect::<Vec<_>>().join(", "))
    };
    match d.result {
        Some(r) => {
            let _ = writeln!(out, "  {} {}{};", r.name(), d.name, args);
        }
        None => {
            let _ = writeln!(out, "  {}{};", d.name, args);
        }
    }
}

fn write_axioms(out: &mut String, comment: &str, axioms: &[Axiom]) {
    if axioms.is_empty() {
        return;
    }
    let _ = writeln!(out, "  // {comment}");
    for a in axioms {
        let _ = writeln!(out, "  {}: {};", a.name, a.formula);
    }
}

impl Obligation {
    /// Largest tuple arity needing a sort.
    pub fn max_arity(&self) -> usize {
        let consts = self.constants.iter().filter_map(|c| match c.decl.result {
            Some(FSort::Rel(k)) => Some(k),
            _ => None,
        });
        let tpls = self.templates.iter().flat_map(|d| d.args.iter().chain(d.result.iter())).filter_map(|s| match s {
            FSort::Rel(k) => Some(*k),
            _ => None,
        });
        consts.chain(tpls).chain([self.theory.max_arity()]).max().unwrap_or(1)
    }

    /// Every declared function and predicate symbol.
    pub fn declarations(&self) -> Vec<SymbolDecl> {
        let mut out = vec![SymbolDecl::predicate("in", vec![FSort::Tuple, FSort::Relation])];
        out.extend(self.theory.decls());
        out.extend(self.constants.iter().map(|c| c.decl.clone()));
        if let Some((d, _)) = &self.ordering {
            out.push(d.clone());
        }
        out.extend(self.templates.iter().cloned());
        out
    }

    pub fn constant(&self, name: &str) -> Option<&ModelConstant> {
        self.constants.iter().find(|c| c.decl.name == name)
    }

    /// All axioms in rendering order: theory, ordering, definitions, rule
    /// instances.
    pub fn axioms(&self) -> Vec<Axiom> {
        let mut out = self.theory.axioms();
        if let Some((_, axioms)) = &self.ordering {
            out.extend(axioms.iter().cloned());
        }
        out.extend(self.definitions.iter().cloned());
        out.extend(self.rule_instances.iter().cloned());
        out
    }

    /// Adds an instance of the closure induction rule as an axiom.
    pub fn add_tc_induct(&mut self, instance: &super::tc_induct::TcInductInstance) -> Result<String, FolError> {
        let name = format!("tc_induct_{}", self.rule_instances.len() + 1);
        let f = instance.as_formula();
        // The instance may need theory symbols the goal did not.
        let extra = RelTheory::for_formulas([&f], &BTreeSet::new());
        self.theory.ops.extend(extra.ops);
        self.rule_instances.push(Axiom::new(name.clone(), f));
        self.check_well_formed()?;
        Ok(name)
    }

    /// Checks that the goal and every axiom are closed and use only
    /// declared symbols with their declared number of arguments.
    pub fn check_well_formed(&self) -> Result<(), FolError> {
        let decls: BTreeMap<String, usize> = self.declarations().into_iter().map(|d| (d.name, d.args.len())).collect();
        let builtin = |n: &str| matches!(n, "+" | "-" | "<" | "<=" | ">" | ">=");
        let mut all = self.axioms();
        all.push(Axiom::new("goal", self.goal.clone()));
        for a in &all {
            if let Some(v) = a.formula.free_vars().into_iter().next() {
                return Err(FolError::NotWellFormed(format!("`{}` has free variable `{v}`", a.name)));
            }
            for (sym, n) in a.formula.symbols() {
                if builtin(&sym) {
                    continue;
                }
                match decls.get(&sym) {
                    Some(&m) if m == n => {}
                    Some(&m) => {
                        return Err(FolError::NotWellFormed(format!(
                            "`{sym}` applied to {n} arguments in `{}`, declared with {m}",
                            a.name
                        )))
                    }
                    None => return Err(FolError::NotWellFormed(format!("`{sym}` in `{}` is not declared", a.name))),
                }
            }
        }
        Ok(())
    }

    /// The obligation as text; the output is a pure function of the
    /// obligation.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "// relcheck proof obligation for assertion {}", self.assertion);
        if let Some(n) = self.finite_ordering {
            let _ = writeln!(out, "// ordering bijection over the finite interval [0, {n})");
        }
        let k = self.max_arity();
        out.push_str("\\sorts {\n  Tuple;\n  Relation;\n  Atom \\extends Tuple;\n");
        for i in 2..=k {
            let _ = writeln!(out, "  Tuple{i} \\extends Tuple;");
        }
        for i in 1..=k {
            let _ = writeln!(out, "  Rel{i} \\extends Relation;");
        }
        out.push_str("}\n\n\\functions {\n");
        let funcs = |d: &&SymbolDecl| d.result.is_some();
        let theory = self.theory.decls();
        out.push_str("  // theory\n");
        theory.iter().filter(funcs).for_each(|d| write_decl(&mut out, d));
        out.push_str("  // model\n");
        self.constants.iter().for_each(|c| write_decl(&mut out, &c.decl));
        if let Some((d, _)) = &self.ordering {
            out.push_str("  // ordering\n");
            write_decl(&mut out, d);
        }
        if self.templates.iter().any(|d| d.result.is_some()) {
            out.push_str("  // definitions\n");
            self.templates.iter().filter(funcs).for_each(|d| write_decl(&mut out, d));
        }
        out.push_str("}\n\n\\predicates {\n");
        write_decl(&mut out, &SymbolDecl::predicate("in", vec![FSort::Tuple, FSort::Relation]));
        theory.iter().filter(|d| d.result.is_none()).for_each(|d| write_decl(&mut out, d));
        self.templates.iter().filter(|d| d.result.is_none()).for_each(|d| write_decl(&mut out, d));
        out.push_str("}\n\n\\axioms {\n");
        write_axioms(&mut out, "theory", &self.theory.axioms());
        if let Some((_, axioms)) = &self.ordering {
            write_axioms(&mut out, "ordering", axioms);
        }
        write_axioms(&mut out, "definitions", &self.definitions);
        write_axioms(&mut out, "rule instances", &self.rule_instances);
        out.push_str("}\n\n\\constraints {\n");
        for c in &self.constraints {
            let _ = writeln!(out, "  {}: {};", c.name, c.formula);
        }
        out.push_str("}\n\n\\problem {\n");
        let _ = writeln!(out, "  {}", self.goal);
        out.push_str("}\n");
        out
    }

    /// File name of the obligation inside an export directory.
    pub fn file_name(&self) -> String {
        format!("{}.fol", sanitize(&self.assertion))
    }

    /// Writes the rendered obligation into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(self.file_name());
        std::fs::write(&path, self.render())?;
        Ok(path)
    }
}
