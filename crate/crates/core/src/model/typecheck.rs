//! Lowering of the untyped syntax tree into a typed [`Model`].
//!
//! `let` bindings are substituted here, so no `let` survives typechecking.

use std::collections::{BTreeMap, BTreeSet};

use super::types::*;
use super::ModelError;
use crate::syntax::{self, BinOp, Decl, MultOp, SExpr, SExprKind, SourceSpec, Span, UnOp};

type TResult<T> = Result<T, ModelError>;

/// Resolves names and types every expression of a parsed specification.
pub fn typecheck(spec: &SourceSpec) -> Result<Model, ModelError> {
    let mut cx = Checker {
        model: Model {
            sigs: Vec::new(),
            fields: Vec::new(),
            facts: Vec::new(),
            templates: Vec::new(),
            assertions: Vec::new(),
            commands: Vec::new(),
            ordering: None,
        },
        next_var: 0,
        template_decls: Vec::new(),
    };
    cx.collect_sigs(spec)?;
    cx.collect_ordering(spec)?;
    cx.collect_fields(spec)?;
    cx.collect_templates(spec)?;
    cx.check_recursion()?;
    cx.collect_formulas(spec)?;
    Ok(cx.model)
}

#[derive(Clone, Copy)]
enum TemplateSrc<'a> {
    Pred(&'a syntax::PredDecl),
    Fun(&'a syntax::FunDecl),
}

struct Checker<'a> {
    model: Model,
    next_var: u32,
    template_decls: Vec<TemplateSrc<'a>>,
}

#[derive(Clone)]
enum Entry {
    Var(Var, Ty),
    Let(RelExpr),
}

#[derive(Clone, Default)]
struct Env {
    entries: Vec<(String, Entry)>,
}

impl Env {
    fn lookup(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    fn with(&self, name: &str, e: Entry) -> Env {
        let mut out = self.clone();
        out.entries.push((name.to_string(), e));
        out
    }
}

fn type_err<T>(span: Span, message: impl Into<String>) -> TResult<T> {
    Err(ModelError::TypeError {
        span,
        message: message.into(),
    })
}

fn arity_err<T>(span: Span, message: impl Into<String>) -> TResult<T> {
    Err(ModelError::ArityError {
        span,
        message: message.into(),
    })
}

fn mult_err<T>(span: Span, message: impl Into<String>) -> TResult<T> {
    Err(ModelError::MultiplicityError {
        span,
        message: message.into(),
    })
}

fn compatible(a: &ColTy, b: &ColTy) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x.top == y.top,
        _ => true,
    }
}

impl<'a> Checker<'a> {
    fn fresh(&mut self, name: &str) -> Var {
        let v = Var {
            id: VarId(self.next_var),
            name: name.to_string(),
        };
        self.next_var += 1;
        v
    }

    fn describe_ty(&self, ty: &Ty) -> String {
        match ty {
            Ty::Bool => "formula".into(),
            Ty::Int => "integer".into(),
            Ty::Rel(cols) => cols
                .iter()
                .map(|c| match c {
                    Some(c) => self.model.sigs[c.bound].name.clone(),
                    None => "none".into(),
                })
                .collect::<Vec<_>>()
                .join("->"),
        }
    }

    // ----- declarations --------------------------------------------------

    fn collect_sigs(&mut self, spec: &SourceSpec) -> TResult<()> {
        let mut parents = Vec::new();
        for d in &spec.decls {
            let Decl::Sig(s) = d else { continue };
            for n in &s.names {
                if n.name == "Int" || self.model.sig_by_name(&n.name).is_some() {
                    return Err(ModelError::Duplicate {
                        span: n.span,
                        name: n.name.clone(),
                    });
                }
                self.model.sigs.push(Signature {
                    name: n.name.clone(),
                    parent: None,
                    is_abstract: s.is_abstract,
                    children: Vec::new(),
                    span: n.span,
                });
                parents.push(s.parent.clone());
            }
        }
        for (id, p) in parents.into_iter().enumerate() {
            let Some(p) = p else { continue };
            let Some(pid) = self.model.sig_by_name(&p.name) else {
                return Err(ModelError::NameError {
                    span: p.span,
                    name: p.name,
                });
            };
            self.model.sigs[id].parent = Some(pid);
        }
        for id in 0..self.model.sigs.len() {
            let mut seen = BTreeSet::new();
            let mut cur = Some(id);
            while let Some(c) = cur {
                if !seen.insert(c) {
                    return Err(ModelError::HierarchyCycle {
                        span: self.model.sigs[id].span,
                        name: self.model.sigs[id].name.clone(),
                    });
                }
                cur = self.model.sigs[c].parent;
            }
            if let Some(p) = self.model.sigs[id].parent {
                self.model.sigs[p].children.push(id);
            }
        }
        Ok(())
    }

    fn collect_ordering(&mut self, spec: &SourceSpec) -> TResult<()> {
        for o in spec.opens() {
            let Some(sig) = self.model.sig_by_name(&o.sig.name) else {
                return Err(ModelError::NameError {
                    span: o.sig.span,
                    name: o.sig.name.clone(),
                });
            };
            if self.model.ordering.is_some() {
                return Err(ModelError::Unsupported {
                    span: o.span,
                    message: "at most one signature may be ordered".into(),
                });
            }
            self.model.ordering = Some(Ordering {
                sig,
                alias: o.alias.as_ref().map(|a| a.name.clone()),
            });
        }
        Ok(())
    }

    fn collect_fields(&mut self, spec: &SourceSpec) -> TResult<()> {
        for d in &spec.decls {
            let Decl::Sig(s) = d else { continue };
            for owner_name in &s.names {
                let owner = self.model.sig_by_name(&owner_name.name).expect("collected above");
                for fd in &s.fields {
                    self.collect_field(owner, fd)?;
                }
            }
        }
        Ok(())
    }

    fn collect_field(&mut self, owner: SigId, fd: &syntax::FieldDecl) -> TResult<()> {
        let last = fd.columns.len() - 1;
        let mut columns = vec![owner];
        let mut restriction = None;
        for (i, c) in fd.columns.iter().enumerate() {
            if c.mult.is_some() && i != last {
                return mult_err(
                    c.sig.span,
                    format!("multiplicity on `{}` has no meaning before the last column", c.sig.name),
                );
            }
            if let Some(sid) = self.model.sig_by_name(&c.sig.name) {
                columns.push(sid);
            } else if let Some(fid) = self.model.field_by_name(&c.sig.name) {
                let g = &self.model.fields[fid];
                if g.arity() != 2 || !self.model.is_sub(owner, g.owner) {
                    return type_err(
                        c.sig.span,
                        format!("`{}` must be a binary field of the same signature to restrict a column", g.name),
                    );
                }
                if restriction.is_some() {
                    return Err(ModelError::Unsupported {
                        span: c.sig.span,
                        message: "at most one restricted column per field".into(),
                    });
                }
                restriction = Some((i + 1, fid));
                columns.push(g.columns[1]);
            } else if c.sig.name == "Int" {
                return Err(ModelError::Unsupported {
                    span: c.sig.span,
                    message: "integer-valued fields are not supported".into(),
                });
            } else {
                return Err(ModelError::NameError {
                    span: c.sig.span,
                    name: c.sig.name.clone(),
                });
            }
        }
        let mult = match fd.columns[last].mult {
            Some(m) => m,
            None if columns.len() == 2 => Mult::One,
            None => Mult::Set,
        };
        for n in &fd.names {
            if self.model.field_by_name(&n.name).is_some() || self.model.sig_by_name(&n.name).is_some() {
                return Err(ModelError::Duplicate {
                    span: n.span,
                    name: n.name.clone(),
                });
            }
            let fid = self.model.fields.len();
            self.model.fields.push(Field {
                owner,
                name: n.name.clone(),
                columns: columns.clone(),
                mult,
                restriction,
                typing: RelExpr::tt(),
                multiplicity: RelExpr::tt(),
                span: n.span,
            });
            let (typing, multiplicity) = self.field_formulas(fid);
            self.model.fields[fid].typing = typing;
            self.model.fields[fid].multiplicity = multiplicity;
        }
        Ok(())
    }

    /// Canonical typing and multiplicity formulas of a field.
    ///
    /// For `f: A -> m B` owned by `S` the typing formula is
    /// `f in S -> A -> B` (plus `all this: S | this.f in this.g -> B` for a
    /// column restricted by `g`), and the multiplicity formula is
    /// `all this: S, x: A | m x.(this.f)`.
    fn field_formulas(&mut self, fid: FieldId) -> (RelExpr, RelExpr) {
        let f = self.model.fields[fid].clone();
        let sig = |m: &Model, s: SigId| RelExpr::new(ExprKind::Sig(s), m.sig_ty(s));
        let field = RelExpr::new(ExprKind::Field(fid), self.model.field_ty(fid));
        let owner = sig(&self.model, f.owner);
        let owner_ty = self.model.sig_ty(f.owner);
        // Domain of column `i` (i >= 1) as seen from the owner atom `this`.
        let col_domain = |m: &Model, this: &RelExpr, i: usize| -> RelExpr {
            match f.restriction {
                Some((ri, g)) if ri == i => join(this.clone(), RelExpr::new(ExprKind::Field(g), m.field_ty(g))),
                _ => sig(m, f.columns[i]),
            }
        };

        let full = f.columns.iter().map(|&c| sig(&self.model, c)).reduce(product).unwrap();
        let mut typing = vec![RelExpr::in_(field.clone(), full)];
        if f.restriction.is_some() {
            let this = self.fresh("this");
            let this_e = RelExpr::var(this.clone(), owner_ty.clone());
            let rest = (1..f.arity()).map(|i| col_domain(&self.model, &this_e, i)).reduce(product).unwrap();
            typing.push(quant_all(
                vec![QVar {
                    var: this,
                    domain: Domain::Atoms(Box::new(owner.clone())),
                }],
                RelExpr::in_(join(this_e, field.clone()), rest),
            ));
        }
        let typing = RelExpr::and(typing);

        let multiplicity = match MultTest::of_mult(f.mult) {
            None => RelExpr::tt(),
            Some(test) => {
                let this = self.fresh("this");
                let this_e = RelExpr::var(this.clone(), owner_ty);
                let mut vars = vec![QVar {
                    var: this,
                    domain: Domain::Atoms(Box::new(owner)),
                }];
                let mut image = join(this_e.clone(), field);
                for i in 1..f.arity() - 1 {
                    let d = col_domain(&self.model, &this_e, i);
                    let x = self.fresh(&format!("x{i}"));
                    let x_e = RelExpr::var(x.clone(), d.ty.clone());
                    vars.push(QVar {
                        var: x,
                        domain: Domain::Atoms(Box::new(d)),
                    });
                    image = join(x_e, image);
                }
                quant_all(vars, RelExpr::mult(test, image))
            }
        };
        (typing, multiplicity)
    }

    fn collect_templates(&mut self, spec: &'a SourceSpec) -> TResult<()> {
        for d in &spec.decls {
            let src = match d {
                Decl::Pred(p) => TemplateSrc::Pred(p),
                Decl::Fun(f) => TemplateSrc::Fun(f),
                _ => continue,
            };
            let name = match &src {
                TemplateSrc::Pred(p) => &p.name,
                TemplateSrc::Fun(f) => &f.name,
            };
            if self.model.template_by_name(&name.name).is_some()
                || self.model.sig_by_name(&name.name).is_some()
                || self.model.field_by_name(&name.name).is_some()
            {
                return Err(ModelError::Duplicate {
                    span: name.span,
                    name: name.name.clone(),
                });
            }
            let (params, env) = match &src {
                TemplateSrc::Pred(p) => self.lower_params(&p.params)?,
                TemplateSrc::Fun(f) => self.lower_params(&f.params)?,
            };
            let (kind, result, span) = match &src {
                TemplateSrc::Pred(p) => (TemplateKind::Pred, Ty::Bool, p.span),
                TemplateSrc::Fun(f) => {
                    let result = if is_int_name(&f.result) {
                        Ty::Int
                    } else {
                        let r = self.lower(&f.result, &env)?;
                        if !matches!(r.ty, Ty::Rel(_)) {
                            return type_err(f.result.span, "function result must be a relation or Int");
                        }
                        r.ty
                    };
                    (TemplateKind::Fun, result, f.span)
                }
            };
            self.model.templates.push(Template {
                name: name.name.clone(),
                kind,
                params,
                result,
                body: RelExpr::tt(),
                span,
            });
            self.template_decls.push(src);
        }
        // Bodies are lowered once every signature is known, so templates may
        // call templates declared later in the file.
        for tid in 0..self.template_decls.len() {
            let env = self.param_env(tid);
            let src = self.template_decls[tid];
            let body = match src {
                TemplateSrc::Pred(p) => {
                    let items = p.body.iter().map(|e| self.lower_formula(e, &env)).collect::<TResult<Vec<_>>>()?;
                    RelExpr::and(items)
                }
                TemplateSrc::Fun(f) => {
                    let body = self.lower(&f.body, &env)?;
                    let declared = &self.model.templates[tid].result;
                    let ok = match (declared, &body.ty) {
                        (Ty::Int, Ty::Int) => true,
                        (Ty::Rel(a), Ty::Rel(b)) => a.len() == b.len() && a.iter().zip(b).all(|(x, y)| compatible(x, y)),
                        _ => false,
                    };
                    if !ok {
                        return type_err(
                            f.body.span,
                            format!(
                                "body of `{}` has type {} but {} was declared",
                                f.name.name,
                                self.describe_ty(&body.ty),
                                self.describe_ty(declared)
                            ),
                        );
                    }
                    body
                }
            };
            self.model.templates[tid].body = body;
        }
        Ok(())
    }

    fn param_env(&self, tid: TemplateId) -> Env {
        let mut env = Env::default();
        for p in &self.model.templates[tid].params {
            env = env.with(&p.var.name, Entry::Var(p.var.clone(), p.ty.clone()));
        }
        env
    }

    fn lower_params(&mut self, decls: &[syntax::VarDecl]) -> TResult<(Vec<Param>, Env)> {
        let mut params = Vec::new();
        let mut env = Env::default();
        for d in decls {
            let (ty, mult) = if is_int_name(&d.bound) {
                if matches!(d.mult, Some(m) if m != Mult::One) {
                    return mult_err(d.span, "integer parameters take a single value");
                }
                (Ty::Int, Mult::One)
            } else {
                let b = self.lower(&d.bound, &env)?;
                let Ty::Rel(cols) = &b.ty else {
                    return type_err(d.bound.span, "parameter bound must be a relation");
                };
                let mult = d.mult.unwrap_or(if cols.len() == 1 { Mult::One } else { Mult::Set });
                if mult == Mult::One && cols.len() != 1 {
                    return mult_err(d.span, "`one` parameters must range over a unary bound");
                }
                (b.ty.clone(), mult)
            };
            for n in &d.names {
                let v = self.fresh(&n.name);
                env = env.with(&n.name, Entry::Var(v.clone(), ty.clone()));
                params.push(Param {
                    var: v,
                    ty: ty.clone(),
                    mult,
                });
            }
        }
        Ok((params, env))
    }

    fn check_recursion(&self) -> TResult<()> {
        let n = self.model.templates.len();
        let mut calls: Vec<BTreeSet<TemplateId>> = vec![BTreeSet::new(); n];
        for (t, tpl) in self.model.templates.iter().enumerate() {
            tpl.body.walk(&mut |e| {
                if let ExprKind::Call(c, _) = &e.kind {
                    calls[t].insert(*c);
                }
            });
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        fn dfs(t: usize, calls: &[BTreeSet<usize>], state: &mut [u8]) -> Option<usize> {
            state[t] = 1;
            for &c in &calls[t] {
                if state[c] == 1 {
                    return Some(c);
                }
                if state[c] == 0 {
                    if let Some(r) = dfs(c, calls, state) {
                        return Some(r);
                    }
                }
            }
            state[t] = 2;
            None
        }
        let mut state = vec![0u8; n];
        for t in 0..n {
            if state[t] == 0 {
                if let Some(r) = dfs(t, &calls, &mut state) {
                    let tpl = &self.model.templates[r];
                    return Err(ModelError::Recursion {
                        span: tpl.span,
                        name: tpl.name.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn collect_formulas(&mut self, spec: &SourceSpec) -> TResult<()> {
        let env = Env::default();
        let mut fact_no = 0;
        for d in &spec.decls {
            match d {
                Decl::Fact(f) => {
                    let items = f.body.iter().map(|e| self.lower_formula(e, &env)).collect::<TResult<Vec<_>>>()?;
                    fact_no += 1;
                    let name = f.name.as_ref().map(|n| n.name.clone()).unwrap_or_else(|| format!("fact{fact_no}"));
                    self.model.facts.push(NamedFormula {
                        name,
                        body: RelExpr::and(items),
                        span: f.span,
                    });
                }
                Decl::Assert(a) => {
                    if self.model.assertion(&a.name.name).is_some() {
                        return Err(ModelError::Duplicate {
                            span: a.name.span,
                            name: a.name.name.clone(),
                        });
                    }
                    let items = a.body.iter().map(|e| self.lower_formula(e, &env)).collect::<TResult<Vec<_>>>()?;
                    self.model.assertions.push(NamedFormula {
                        name: a.name.name.clone(),
                        body: RelExpr::and(items),
                        span: a.span,
                    });
                }
                _ => {}
            }
        }
        for d in &spec.decls {
            if let Decl::Check(c) = d {
                if self.model.assertion(&c.target.name).is_none() {
                    return Err(ModelError::UnknownAssertion {
                        span: c.target.span,
                        name: c.target.name.clone(),
                    });
                }
                self.model.commands.push(Command {
                    assertion: c.target.name.clone(),
                    scope: c.scope,
                    span: c.span,
                });
            }
        }
        Ok(())
    }

    // ----- expressions ---------------------------------------------------

    fn lower_formula(&mut self, e: &SExpr, env: &Env) -> TResult<RelExpr> {
        let r = self.lower(e, env)?;
        if r.ty != Ty::Bool {
            return type_err(e.span, format!("expected a formula, found {}", self.describe_ty(&r.ty)));
        }
        Ok(r)
    }

    fn lower_rel(&mut self, e: &SExpr, env: &Env) -> TResult<RelExpr> {
        let r = self.lower(e, env)?;
        if !matches!(r.ty, Ty::Rel(_)) {
            return type_err(e.span, format!("expected a relation, found {}", self.describe_ty(&r.ty)));
        }
        Ok(r)
    }

    fn lower_int(&mut self, e: &SExpr, env: &Env) -> TResult<RelExpr> {
        let r = self.lower(e, env)?;
        if r.ty != Ty::Int {
            return type_err(e.span, format!("expected an integer, found {}", self.describe_ty(&r.ty)));
        }
        Ok(r)
    }

    fn lower(&mut self, e: &SExpr, env: &Env) -> TResult<RelExpr> {
        match &e.kind {
            SExprKind::Name(q) => self.lower_name(q, e.span, env),
            SExprKind::Int(n) => Ok(RelExpr::new(ExprKind::IntLit(*n), Ty::Int)),
            SExprKind::None => Ok(RelExpr::new(ExprKind::None, Ty::Rel(vec![None]))),
            SExprKind::Unary(UnOp::Not, a) => {
                let a = self.lower_formula(a, env)?;
                Ok(RelExpr::not(a))
            }
            SExprKind::Unary(op, a) => {
                let a = self.lower_rel(a, env)?;
                let cols = a.ty.cols().to_vec();
                if cols.len() != 2 {
                    return arity_err(e.span, format!("closure needs a binary relation, found arity {}", cols.len()));
                }
                if !compatible(&cols[0], &cols[1]) {
                    return type_err(e.span, "closure over a relation whose columns have different types");
                }
                if *op == UnOp::Closure {
                    Ok(RelExpr::new(ExprKind::Closure(Box::new(a)), Ty::Rel(cols)))
                } else {
                    let col = cols[0].or(cols[1]).map(|c| Col { top: c.top, bound: c.top });
                    if col.is_none() {
                        return type_err(e.span, "reflexive closure of an empty relation has no universe");
                    }
                    Ok(RelExpr::new(ExprKind::ReflClosure(Box::new(a)), Ty::Rel(vec![col, col])))
                }
            }
            SExprKind::Mult(op, a) => {
                let test = match op {
                    MultOp::No => MultTest::No,
                    MultOp::Some => MultTest::Some,
                    MultOp::Lone => MultTest::Lone,
                    MultOp::One => MultTest::One,
                    MultOp::Set => return mult_err(e.span, "`set` is not a formula"),
                };
                let a = self.lower_rel(a, env)?;
                Ok(RelExpr::mult(test, a))
            }
            SExprKind::Binary(op, a, b) => self.lower_binary(*op, a, b, e.span, env),
            SExprKind::Box(f, args) => self.lower_box(f, args, e.span, env),
            SExprKind::Quant { quant, decls, body } => {
                let mut vars = Vec::new();
                let mut inner = env.clone();
                for d in decls {
                    if matches!(d.mult, Some(m) if m != Mult::One) {
                        return mult_err(d.span, "higher-order quantification is not supported");
                    }
                    let (domain, ty) = if is_int_name(&d.bound) {
                        (Domain::Int, Ty::Int)
                    } else {
                        let b = self.lower_rel(&d.bound, &inner)?;
                        if b.arity() != 1 {
                            return arity_err(d.bound.span, "quantifier bound must be a set");
                        }
                        let ty = b.ty.clone();
                        (Domain::Atoms(Box::new(b)), ty)
                    };
                    for n in &d.names {
                        let v = self.fresh(&n.name);
                        inner = inner.with(&n.name, Entry::Var(v.clone(), ty.clone()));
                        vars.push(QVar {
                            var: v,
                            domain: domain.clone(),
                        });
                    }
                }
                let body = self.lower_formula(body, &inner)?;
                Ok(RelExpr::new(
                    ExprKind::Quant {
                        q: *quant,
                        vars,
                        body: Box::new(body),
                    },
                    Ty::Bool,
                ))
            }
            SExprKind::Let { bindings, body } => {
                let mut inner = env.clone();
                for (name, value) in bindings {
                    let v = self.lower(value, &inner)?;
                    inner = inner.with(&name.name, Entry::Let(v));
                }
                self.lower(body, &inner)
            }
            SExprKind::Block(items) => {
                let items = items.iter().map(|i| self.lower_formula(i, env)).collect::<TResult<Vec<_>>>()?;
                Ok(RelExpr::and(items))
            }
        }
    }

    fn lower_name(&mut self, q: &syntax::QualName, span: Span, env: &Env) -> TResult<RelExpr> {
        if let Some(qual) = &q.qualifier {
            if let Some(ord) = &self.model.ordering {
                if ord.alias.as_deref() == Some(qual.as_str()) || qual == "ordering" {
                    if let Some(f) = OrdFn::from_name(&q.name) {
                        return Ok(self.ord_expr(f));
                    }
                }
            }
            return Err(ModelError::NameError {
                span,
                name: q.to_string(),
            });
        }
        let name = q.name.as_str();
        if let Some(entry) = env.lookup(name) {
            return Ok(match entry {
                Entry::Var(v, ty) => RelExpr::var(v.clone(), ty.clone()),
                Entry::Let(e) => e.clone(),
            });
        }
        if let Some(s) = self.model.sig_by_name(name) {
            return Ok(RelExpr::new(ExprKind::Sig(s), self.model.sig_ty(s)));
        }
        if let Some(f) = self.model.field_by_name(name) {
            return Ok(RelExpr::new(ExprKind::Field(f), self.model.field_ty(f)));
        }
        if let Some(t) = self.model.template_by_name(name) {
            return self.make_call(t, Vec::new(), span);
        }
        if self.model.ordering.is_some() {
            if let Some(f) = OrdFn::from_name(name) {
                return Ok(self.ord_expr(f));
            }
        }
        if name == "Int" {
            return type_err(span, "`Int` may only appear as a declaration bound");
        }
        Err(ModelError::NameError {
            span,
            name: name.to_string(),
        })
    }

    fn ord_expr(&self, f: OrdFn) -> RelExpr {
        let s = self.model.ordering.as_ref().expect("ordering present").sig;
        let col = self.model.col(s);
        RelExpr::new(ExprKind::Ord(f), Ty::Rel(vec![col; f.arity()]))
    }

    fn make_call(&mut self, t: TemplateId, args: Vec<(RelExpr, Span)>, span: Span) -> TResult<RelExpr> {
        let tpl = &self.model.templates[t];
        if tpl.params.len() != args.len() {
            return arity_err(
                span,
                format!("`{}` takes {} arguments, {} given", tpl.name, tpl.params.len(), args.len()),
            );
        }
        for (p, (a, aspan)) in tpl.params.iter().zip(&args) {
            check_arg(&p.ty, &a.ty, &tpl.name, &p.var.name, *aspan)?;
        }
        let result = tpl.result.clone();
        Ok(RelExpr::new(ExprKind::Call(t, args.into_iter().map(|(a, _)| a).collect()), result))
    }

    fn lower_box(&mut self, f: &SExpr, args: &[SExpr], span: Span, env: &Env) -> TResult<RelExpr> {
        if let SExprKind::Name(q) = &f.kind {
            let shadowed = q.qualifier.is_none() && env.lookup(&q.name).is_some();
            if !shadowed && q.qualifier.is_none() {
                if let Some(t) = self.model.template_by_name(&q.name) {
                    let mut lowered = Vec::new();
                    for a in args {
                        lowered.push((self.lower(a, env)?, a.span));
                    }
                    return self.make_call(t, lowered, span);
                }
            }
        }
        let mut res = self.lower_rel(f, env)?;
        for a in args {
            let a = self.lower_rel(a, env)?;
            res = self.join_checked(a, res, span)?;
        }
        Ok(res)
    }

    fn join_checked(&self, a: RelExpr, b: RelExpr, span: Span) -> TResult<RelExpr> {
        let (ca, cb) = (a.ty.cols(), b.ty.cols());
        if ca.len() + cb.len() < 3 {
            return arity_err(span, "join of two unary relations has arity 0");
        }
        if !compatible(ca.last().unwrap(), &cb[0]) {
            return type_err(
                span,
                format!(
                    "join of {} and {} over disjoint column types",
                    self.describe_ty(&a.ty),
                    self.describe_ty(&b.ty)
                ),
            );
        }
        Ok(join(a, b))
    }

    fn same_shape(&self, op: &str, a: &RelExpr, b: &RelExpr, span: Span) -> TResult<()> {
        let (ca, cb) = (a.ty.cols(), b.ty.cols());
        if ca.len() != cb.len() {
            return arity_err(span, format!("`{op}` of arities {} and {}", ca.len(), cb.len()));
        }
        if !ca.iter().zip(cb).all(|(x, y)| compatible(x, y)) {
            return type_err(
                span,
                format!(
                    "`{op}` of {} and {} with disjoint column types",
                    self.describe_ty(&a.ty),
                    self.describe_ty(&b.ty)
                ),
            );
        }
        Ok(())
    }

    fn lower_binary(&mut self, op: BinOp, a: &SExpr, b: &SExpr, span: Span, env: &Env) -> TResult<RelExpr> {
        let bx = Box::new;
        match op {
            BinOp::Or | BinOp::And | BinOp::Implies | BinOp::Iff => {
                let (x, y) = (self.lower_formula(a, env)?, self.lower_formula(b, env)?);
                let kind = match op {
                    BinOp::Or => ExprKind::Or(vec![x, y]),
                    BinOp::And => ExprKind::And(vec![x, y]),
                    BinOp::Implies => ExprKind::Implies(bx(x), bx(y)),
                    _ => ExprKind::Iff(bx(x), bx(y)),
                };
                Ok(RelExpr::new(kind, Ty::Bool))
            }
            BinOp::Plus | BinOp::Minus | BinOp::Eq | BinOp::Neq => {
                let (x, y) = (self.lower(a, env)?, self.lower(b, env)?);
                match (&x.ty, &y.ty) {
                    (Ty::Int, Ty::Int) => Ok(match op {
                        BinOp::Plus => RelExpr::new(ExprKind::IntAdd(bx(x), bx(y)), Ty::Int),
                        BinOp::Minus => RelExpr::new(ExprKind::IntSub(bx(x), bx(y)), Ty::Int),
                        BinOp::Eq => RelExpr::new(ExprKind::IntCmp(CmpOp::Eq, bx(x), bx(y)), Ty::Bool),
                        _ => RelExpr::not(RelExpr::new(ExprKind::IntCmp(CmpOp::Eq, bx(x), bx(y)), Ty::Bool)),
                    }),
                    (Ty::Rel(_), Ty::Rel(_)) => {
                        self.same_shape(op.as_str(), &x, &y, span)?;
                        Ok(match op {
                            BinOp::Plus => union(&self.model, x, y),
                            BinOp::Minus => {
                                let ty = x.ty.clone();
                                RelExpr::new(ExprKind::Diff(bx(x), bx(y)), ty)
                            }
                            BinOp::Eq => RelExpr::new(ExprKind::Eq(bx(x), bx(y)), Ty::Bool),
                            _ => RelExpr::not(RelExpr::new(ExprKind::Eq(bx(x), bx(y)), Ty::Bool)),
                        })
                    }
                    _ => type_err(
                        span,
                        format!(
                            "`{}` between {} and {}",
                            op.as_str(),
                            self.describe_ty(&x.ty),
                            self.describe_ty(&y.ty)
                        ),
                    ),
                }
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let (x, y) = (self.lower_int(a, env)?, self.lower_int(b, env)?);
                let c = match op {
                    BinOp::Lt => CmpOp::Lt,
                    BinOp::Le => CmpOp::Le,
                    BinOp::Gt => CmpOp::Gt,
                    _ => CmpOp::Ge,
                };
                Ok(RelExpr::new(ExprKind::IntCmp(c, bx(x), bx(y)), Ty::Bool))
            }
            BinOp::In | BinOp::NotIn => {
                let (x, y) = (self.lower_rel(a, env)?, self.lower_rel(b, env)?);
                self.same_shape("in", &x, &y, span)?;
                let f = RelExpr::in_(x, y);
                Ok(if op == BinOp::NotIn { RelExpr::not(f) } else { f })
            }
            BinOp::Intersect => {
                let (x, y) = (self.lower_rel(a, env)?, self.lower_rel(b, env)?);
                self.same_shape("&", &x, &y, span)?;
                let cols = x
                    .ty
                    .cols()
                    .iter()
                    .zip(y.ty.cols())
                    .map(|(p, q)| match (p, q) {
                        (Some(p), Some(q)) => Some(if self.model.is_sub(q.bound, p.bound) { *q } else { *p }),
                        _ => None,
                    })
                    .collect();
                Ok(RelExpr::new(ExprKind::Inter(bx(x), bx(y)), Ty::Rel(cols)))
            }
            BinOp::Product => {
                let (x, y) = (self.lower_rel(a, env)?, self.lower_rel(b, env)?);
                Ok(product(x, y))
            }
            BinOp::Join => {
                let (x, y) = (self.lower_rel(a, env)?, self.lower_rel(b, env)?);
                self.join_checked(x, y, span)
            }
        }
    }
}

fn check_arg(param: &Ty, arg: &Ty, tpl: &str, pname: &str, span: Span) -> TResult<()> {
    match (param, arg) {
        (Ty::Int, Ty::Int) => Ok(()),
        (Ty::Rel(p), Ty::Rel(a)) => {
            if p.len() != a.len() {
                return arity_err(
                    span,
                    format!("argument for `{pname}` of `{tpl}` has arity {}, expected {}", a.len(), p.len()),
                );
            }
            if !p.iter().zip(a).all(|(x, y)| compatible(x, y)) {
                return type_err(span, format!("argument for `{pname}` of `{tpl}` has a disjoint type"));
            }
            Ok(())
        }
        _ => type_err(span, format!("argument for `{pname}` of `{tpl}` has the wrong kind")),
    }
}

pub(crate) fn check_args(model: &Model, t: TemplateId, args: &[RelExpr]) -> TResult<()> {
    let tpl = &model.templates[t];
    if tpl.params.len() != args.len() {
        return arity_err(
            tpl.span,
            format!("`{}` takes {} arguments, {} given", tpl.name, tpl.params.len(), args.len()),
        );
    }
    for (p, a) in tpl.params.iter().zip(args) {
        check_arg(&p.ty, &a.ty, &tpl.name, &p.var.name, tpl.span)?;
    }
    Ok(())
}

fn is_int_name(e: &SExpr) -> bool {
    matches!(&e.kind, SExprKind::Name(q) if q.qualifier.is_none() && q.name == "Int")
}

pub(crate) fn join(a: RelExpr, b: RelExpr) -> RelExpr {
    let ca = a.ty.cols();
    let cb = b.ty.cols();
    let mut cols: Vec<ColTy> = ca[..ca.len() - 1].to_vec();
    cols.extend_from_slice(&cb[1..]);
    // An empty column on either side of the join makes the result empty.
    if ca.last().unwrap().is_none() || cb[0].is_none() {
        for c in cols.iter_mut().take(1) {
            *c = None;
        }
    }
    RelExpr::new(ExprKind::Join(Box::new(a), Box::new(b)), Ty::Rel(cols))
}

pub(crate) fn product(a: RelExpr, b: RelExpr) -> RelExpr {
    let mut cols = a.ty.cols().to_vec();
    cols.extend_from_slice(b.ty.cols());
    RelExpr::new(ExprKind::Product(Box::new(a), Box::new(b)), Ty::Rel(cols))
}

pub(crate) fn union(model: &Model, a: RelExpr, b: RelExpr) -> RelExpr {
    let cols = a
        .ty
        .cols()
        .iter()
        .zip(b.ty.cols())
        .map(|(p, q)| match (p, q) {
            (Some(p), Some(q)) => Some(Col {
                top: p.top,
                bound: model.lca(p.bound, q.bound),
            }),
            (Some(p), None) => Some(*p),
            (None, q) => *q,
        })
        .collect();
    RelExpr::new(ExprKind::Union(Box::new(a), Box::new(b)), Ty::Rel(cols))
}

pub(crate) fn quant_all(vars: Vec<QVar>, body: RelExpr) -> RelExpr {
    RelExpr::new(
        ExprKind::Quant {
            q: Quant::All,
            vars,
            body: Box::new(body),
        },
        Ty::Bool,
    )
}

#[allow(dead_code)]
pub(crate) fn sig_names(model: &Model) -> BTreeMap<String, SigId> {
    model.sigs.iter().enumerate().map(|(i, s)| (s.name.clone(), i)).collect()
}
