//! The encoder shared by both backends.
//!
//! Relational expressions are compiled to *membership formulas*: for an
//! expression `e` of arity k and atom terms `a1..ak`, `mem(e, a)` is a
//! boolean term that holds iff the tuple is in `e`. The two backends differ
//! only in how atoms are represented (bitvectors with optional liveness vs.
//! free sorts), how integers are represented, and how transitive closure
//! and the ordering idiom are axiomatized.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::model::{
    expand_calls, instantiate_template, map_children, CmpOp, ColTy, Domain, ExprKind, FieldId, Model, MultTest, OrdFn, Quant,
    RelExpr, SigId, Ty, VarId,
};
use crate::smt::{and, app, bv, eq, exists, forall, iff, implies, not, or, sym, Item, Logic, SmtScript, Sort, Term};
use crate::syntax::Mult;

use super::bounded::ScopeAssignment;
use super::TranslateError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Bounded(ScopeAssignment),
    Unbounded,
}

/// A constant introduced for an outermost universally quantified variable
/// of the checked assertion; its value in a model names the witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Source-level variable name.
    pub var: String,
    pub symbol: String,
    /// Top-level signature of an atom witness; `None` for an integer.
    pub top: Option<SigId>,
}

/// Function symbols of an encoding, by role. Used to decode models.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Symbols {
    /// Membership function per non-top-level signature.
    pub membership: BTreeMap<SigId, String>,
    /// Liveness predicate per top-level signature whose scope is not a
    /// power of two (bounded only).
    pub live: BTreeMap<SigId, String>,
    /// Relation function per field.
    pub fields: Vec<String>,
    /// Skolem functions for `some`/`one` multiplicities, per field.
    pub skolems: BTreeMap<FieldId, String>,
    /// Closure symbols (the last tier in the bounded encoding).
    pub closures: Vec<String>,
    /// Order predicate of the ordering idiom (unbounded only).
    pub order: Option<String>,
    pub witnesses: Vec<Witness>,
}

pub(crate) type Env = HashMap<VarId, Term>;

pub(crate) struct Encoder {
    pub backend: Backend,
    pub script: SmtScript,
    pub symbols: Symbols,
    used: BTreeSet<String>,
    closures: HashMap<String, String>,
    /// Width of integer terms in the bounded encoding.
    pub int_width: u32,
}

fn ceil_log2(n: u32) -> u32 {
    if n <= 1 {
        0
    } else {
        32 - (n - 1).leading_zeros()
    }
}

impl Encoder {
    pub fn new(model: &Model, backend: Backend) -> Encoder {
        let logic = match backend {
            Backend::Bounded(_) => Logic::Bounded,
            Backend::Unbounded => Logic::Unbounded,
        };
        let int_width = match &backend {
            Backend::Bounded(s) => model.top_levels().iter().map(|&t| s.bitwidth(t)).max().unwrap_or(1),
            Backend::Unbounded => 0,
        };
        let mut enc = Encoder {
            backend,
            script: SmtScript::new(logic),
            symbols: Symbols::default(),
            used: BTreeSet::new(),
            closures: HashMap::new(),
            int_width,
        };
        for s in &model.sigs {
            enc.used.insert(s.name.clone());
        }
        enc
    }

    /// Claims a globally unique symbol derived from `base`.
    pub fn claim(&mut self, base: &str) -> String {
        let base = if base.is_empty() { "x" } else { base };
        if self.used.insert(base.to_string()) {
            return base.to_string();
        }
        let mut k = 1;
        loop {
            let cand = format!("{base}!{k}");
            if self.used.insert(cand.clone()) {
                return cand;
            }
            k += 1;
        }
    }

    fn is_bounded(&self) -> bool {
        matches!(self.backend, Backend::Bounded(_))
    }

    pub fn sort_of(&self, model: &Model, top: SigId) -> Sort {
        match &self.backend {
            Backend::Bounded(s) => Sort::BitVec(s.bitwidth(top)),
            Backend::Unbounded => Sort::Named(model.sigs[top].name.clone()),
        }
    }

    pub fn int_sort(&self) -> Sort {
        match self.backend {
            Backend::Bounded(_) => Sort::BitVec(self.int_width),
            Backend::Unbounded => Sort::Int,
        }
    }

    /// Liveness of an atom term of a top-level sort.
    pub fn live(&self, top: SigId, t: &Term) -> Term {
        match self.symbols.live.get(&top) {
            Some(f) => app(f.clone(), vec![t.clone()]),
            None => Term::Bool(true),
        }
    }

    /// Membership of an atom term in a signature.
    pub fn sig_mem(&self, model: &Model, s: SigId, t: &Term) -> Term {
        if model.sigs[s].is_top_level() {
            self.live(s, t)
        } else {
            app(self.symbols.membership[&s].clone(), vec![t.clone()])
        }
    }

    /// A fresh bound variable of the given top-level sort.
    fn bind(&mut self, model: &Model, base: &str, top: SigId) -> (String, Sort) {
        let name = self.claim(base);
        (name, self.sort_of(model, top))
    }

    // ----- declarations -------------------------------------------------

    /// Emits sorts, membership functions, hierarchy axioms, fields with
    /// their typing and multiplicity axioms, and the ordering symbols.
    pub fn declare_model(&mut self, model: &Model) {
        let tops = model.top_levels();
        self.script.comment("signatures");
        for &t in &tops {
            match self.backend.clone() {
                Backend::Bounded(scope) => {
                    if !scope.is_exact(t) {
                        let name = self.claim(&format!("live{}", model.sigs[t].name));
                        let w = scope.bitwidth(t);
                        self.script.push(Item::DefineFun {
                            name: name.clone(),
                            params: vec![("x".into(), Sort::BitVec(w))],
                            ret: Sort::Bool,
                            body: app("bvult", vec![sym("x"), bv(scope.scope(t) as u64, w)]),
                        });
                        self.symbols.live.insert(t, name);
                    }
                }
                Backend::Unbounded => self.script.push(Item::DeclareSort(model.sigs[t].name.clone())),
            }
        }
        for &t in &tops {
            for s in model.descendants(t).into_iter().skip(1) {
                let name = self.claim(&format!("is{}", model.sigs[s].name));
                self.script.push(Item::DeclareFun {
                    name: name.clone(),
                    args: vec![self.sort_of(model, t)],
                    ret: Sort::Bool,
                });
                self.symbols.membership.insert(s, name);
            }
        }
        for &t in &tops {
            for s in model.descendants(t) {
                let sig = &model.sigs[s];
                // Hierarchy: membership implies membership of the parent
                // (liveness for children of a top-level signature).
                if let Some(p) = sig.parent {
                    let (x, sort) = self.bind(model, "t", t);
                    let ax = implies(self.sig_mem(model, s, &sym(&x)), self.sig_mem(model, p, &sym(&x)));
                    self.script.assert(forall(vec![(x, sort)], ax));
                }
                if model.is_abstract_constrained(s) {
                    let (x, sort) = self.bind(model, "t", t);
                    let xs = sym(&x);
                    let children = sig.children.iter().map(|&c| self.sig_mem(model, c, &xs)).collect();
                    let body = implies(self.sig_mem(model, s, &xs), or(children));
                    self.script.assert(forall(vec![(x, sort)], body));
                }
                for (i, &a) in sig.children.iter().enumerate() {
                    for &b in &sig.children[i + 1..] {
                        let (x, sort) = self.bind(model, "t", t);
                        let xs = sym(&x);
                        let body = not(and(vec![self.sig_mem(model, a, &xs), self.sig_mem(model, b, &xs)]));
                        self.script.assert(forall(vec![(x, sort)], body));
                    }
                }
            }
        }
        if !model.fields.is_empty() {
            self.script.comment("fields");
        }
        for f in 0..model.fields.len() {
            self.declare_field(model, f);
        }
        if let Some(ord) = &model.ordering {
            if !self.is_bounded() {
                self.declare_order(model, ord.sig);
            }
        }
    }

    /// Membership of the i-th column of a field, for an atom term and the
    /// owner term (a restricted column is the image of its restricting
    /// field).
    fn column_mem(&self, model: &Model, f: FieldId, i: usize, owner: &Term, t: &Term) -> Term {
        let field = &model.fields[f];
        match field.restriction {
            Some((ri, g)) if ri == i => app(self.symbols.fields[g].clone(), vec![owner.clone(), t.clone()]),
            _ => self.sig_mem(model, field.columns[i], t),
        }
    }

    fn declare_field(&mut self, model: &Model, f: FieldId) {
        let field = &model.fields[f];
        let tops: Vec<SigId> = field.columns.iter().map(|&c| model.top(c)).collect();
        let sorts: Vec<Sort> = tops.iter().map(|&t| self.sort_of(model, t)).collect();
        let name = self.claim(&field.name);
        self.script.push(Item::DeclareFun {
            name: name.clone(),
            args: sorts.clone(),
            ret: Sort::Bool,
        });
        self.symbols.fields.push(name.clone());

        let vars: Vec<(String, Sort)> = tops
            .iter()
            .enumerate()
            .map(|(i, &t)| self.bind(model, &format!("a{}", i + 1), t))
            .collect();
        let terms: Vec<Term> = vars.iter().map(|(v, _)| sym(v)).collect();
        // Typing: every tuple lies in the admissible column types.
        let cols: Vec<Term> = (0..tops.len())
            .map(|i| self.column_mem(model, f, i, &terms[0], &terms[i]))
            .collect();
        let typing = implies(app(name.clone(), terms.clone()), and(cols));
        self.script.assert(forall(vars, typing));

        let n = tops.len();
        let last = tops[n - 1];
        let left_vars: Vec<(String, Sort)> = tops[..n - 1]
            .iter()
            .enumerate()
            .map(|(i, &t)| self.bind(model, &format!("a{}", i + 1), t))
            .collect();
        let left: Vec<Term> = left_vars.iter().map(|(v, _)| sym(v)).collect();
        let dom = and((0..n - 1).map(|i| self.column_mem(model, f, i, &left[0], &left[i])).collect());
        if matches!(field.mult, Mult::Some | Mult::One) {
            let target = model.sigs[field.columns[n - 1]].name.clone();
            let sk = self.claim(&format!("one{}_{}", target, field.name));
            self.script.push(Item::DeclareFun {
                name: sk.clone(),
                args: sorts[..n - 1].to_vec(),
                ret: sorts[n - 1].clone(),
            });
            self.symbols.skolems.insert(f, sk.clone());
            let mut tuple = left.clone();
            tuple.push(app(sk, left.clone()));
            let ax = implies(dom.clone(), app(name.clone(), tuple));
            self.script.assert(forall(left_vars.clone(), ax));
        }
        if matches!(field.mult, Mult::Lone | Mult::One) {
            let (y1, s1) = self.bind(model, "y", last);
            let (y2, s2) = self.bind(model, "y", last);
            let mut t1 = left.clone();
            t1.push(sym(&y1));
            let mut t2 = left.clone();
            t2.push(sym(&y2));
            let ax = implies(
                and(vec![app(name.clone(), t1), app(name.clone(), t2)]),
                eq(sym(&y1), sym(&y2)),
            );
            let mut vs = left_vars.clone();
            vs.push((y1, s1));
            vs.push((y2, s2));
            self.script.assert(forall(vs, ax));
        }
    }

    /// Unbounded ordering: a strict total order on the ordered signature.
    fn declare_order(&mut self, model: &Model, s: SigId) {
        let top = model.top(s);
        let sort = self.sort_of(model, top);
        let lt = self.claim("ordLt");
        self.script.comment("ordering");
        self.script.push(Item::DeclareFun {
            name: lt.clone(),
            args: vec![sort.clone(), sort.clone()],
            ret: Sort::Bool,
        });
        self.symbols.order = Some(lt.clone());
        let r = |a: &str, b: &str| app(lt.clone(), vec![sym(a), sym(b)]);
        let (x, y, z) = (self.claim("x"), self.claim("y"), self.claim("z"));
        let v = |n: &str| (n.to_string(), sort.clone());
        self.script.assert(forall(vec![v(&x)], not(r(&x, &x))));
        self.script.assert(forall(
            vec![v(&x), v(&y), v(&z)],
            implies(and(vec![r(&x, &y), r(&y, &z)]), r(&x, &z)),
        ));
        let total = implies(
            and(vec![
                self.sig_mem(model, s, &sym(&x)),
                self.sig_mem(model, s, &sym(&y)),
                not(eq(sym(&x), sym(&y))),
            ]),
            or(vec![r(&x, &y), r(&y, &x)]),
        );
        self.script.assert(forall(vec![v(&x), v(&y)], total));
    }

    // ----- formulas -------------------------------------------------------

    pub fn formula(&mut self, model: &Model, e: &RelExpr, env: &Env) -> Result<Term, TranslateError> {
        use ExprKind::*;
        Ok(match &e.kind {
            True => Term::Bool(true),
            False => Term::Bool(false),
            Not(a) => not(self.formula(model, a, env)?),
            And(xs) => and(xs.iter().map(|x| self.formula(model, x, env)).collect::<Result<_, _>>()?),
            Or(xs) => or(xs.iter().map(|x| self.formula(model, x, env)).collect::<Result<_, _>>()?),
            Implies(a, b) => implies(self.formula(model, a, env)?, self.formula(model, b, env)?),
            Iff(a, b) => iff(self.formula(model, a, env)?, self.formula(model, b, env)?),
            In(a, b) => self.subset(model, a, b, env)?,
            Eq(a, b) => {
                if a.ty == Ty::Int {
                    eq(self.int_term(model, a, env)?, self.int_term(model, b, env)?)
                } else {
                    and(vec![self.subset(model, a, b, env)?, self.subset(model, b, a, env)?])
                }
            }
            Mult(m, a) => self.mult(model, *m, a, env)?,
            Quant { q, vars, body } => self.quant(model, *q, vars, body, env)?,
            IntCmp(op, a, b) => {
                let (x, y) = (self.int_term(model, a, env)?, self.int_term(model, b, env)?);
                self.int_cmp(*op, x, y)
            }
            Call(t, args) => {
                let body = instantiate_template(model, *t, args).map_err(TranslateError::Model)?;
                self.formula(model, &body, env)?
            }
            _ => return Err(TranslateError::Unsupported(format!("not a formula: {:?}", e.kind))),
        })
    }

    fn int_cmp(&self, op: CmpOp, x: Term, y: Term) -> Term {
        let f = match (op, self.is_bounded()) {
            (CmpOp::Eq, _) => return eq(x, y),
            (CmpOp::Lt, true) => "bvslt",
            (CmpOp::Le, true) => "bvsle",
            (CmpOp::Gt, true) => "bvsgt",
            (CmpOp::Ge, true) => "bvsge",
            (op, false) => op.as_str(),
        };
        app(f, vec![x, y])
    }

    pub fn int_term(&mut self, model: &Model, e: &RelExpr, env: &Env) -> Result<Term, TranslateError> {
        use ExprKind::*;
        let bounded = self.is_bounded();
        Ok(match &e.kind {
            IntLit(n) => {
                if bounded {
                    bv(*n as u64, self.int_width)
                } else {
                    Term::IntLit(*n)
                }
            }
            Var(v) => env
                .get(&v.id)
                .cloned()
                .ok_or_else(|| TranslateError::Unsupported(format!("unbound variable `{}`", v.name)))?,
            IntAdd(a, b) | IntSub(a, b) => {
                let (x, y) = (self.int_term(model, a, env)?, self.int_term(model, b, env)?);
                let op = match (&e.kind, bounded) {
                    (IntAdd(..), true) => "bvadd",
                    (IntAdd(..), false) => "+",
                    (_, true) => "bvsub",
                    (_, false) => "-",
                };
                app(op, vec![x, y])
            }
            Call(t, args) => {
                let body = instantiate_template(model, *t, args).map_err(TranslateError::Model)?;
                self.int_term(model, &body, env)?
            }
            _ => return Err(TranslateError::Unsupported(format!("not an integer term: {:?}", e.kind))),
        })
    }

    /// Column tops of a relational type; `None` if some column is empty.
    fn col_tops(cols: &[ColTy]) -> Option<Vec<SigId>> {
        cols.iter().map(|c| c.map(|c| c.top)).collect()
    }

    /// Atom terms of an expression that denotes exactly one known tuple.
    fn singleton(e: &RelExpr, env: &Env) -> Option<Vec<Term>> {
        match &e.kind {
            ExprKind::Var(v) if e.ty != Ty::Int => env.get(&v.id).map(|t| vec![t.clone()]),
            ExprKind::Product(a, b) => {
                let mut x = Self::singleton(a, env)?;
                x.extend(Self::singleton(b, env)?);
                Some(x)
            }
            _ => None,
        }
    }

    /// Fresh variables for a tuple of the given columns, with guards.
    fn tuple_vars(&mut self, model: &Model, tops: &[SigId], base: &str) -> (Vec<(String, Sort)>, Vec<Term>, Term) {
        let vars: Vec<(String, Sort)> = tops.iter().map(|&t| self.bind(model, base, t)).collect();
        let terms: Vec<Term> = vars.iter().map(|(v, _)| sym(v)).collect();
        let guard = and(tops.iter().zip(&terms).map(|(&t, x)| self.live(t, x)).collect());
        (vars, terms, guard)
    }

    /// `a in b`.
    fn subset(&mut self, model: &Model, a: &RelExpr, b: &RelExpr, env: &Env) -> Result<Term, TranslateError> {
        if let Some(tuple) = Self::singleton(a, env) {
            return self.mem(model, b, &tuple, env);
        }
        let Some(tops) = Self::col_tops(a.ty.cols()) else {
            return Ok(Term::Bool(true));
        };
        let (vars, xs, guard) = self.tuple_vars(model, &tops, "x");
        let body = implies(
            and(vec![guard, self.mem(model, a, &xs, env)?]),
            self.mem(model, b, &xs, env)?,
        );
        Ok(forall(vars, body))
    }

    fn mult(&mut self, model: &Model, m: MultTest, a: &RelExpr, env: &Env) -> Result<Term, TranslateError> {
        if Self::singleton(a, env).is_some() {
            return Ok(Term::Bool(m != MultTest::No));
        }
        let Some(tops) = Self::col_tops(a.ty.cols()) else {
            return Ok(Term::Bool(matches!(m, MultTest::No | MultTest::Lone)));
        };
        let (vars, xs, guard) = self.tuple_vars(model, &tops, "x");
        let in_a = and(vec![guard, self.mem(model, a, &xs, env)?]);
        let some = exists(vars.clone(), in_a.clone());
        Ok(match m {
            MultTest::No => not(some),
            MultTest::Some => some,
            MultTest::Lone | MultTest::One => {
                let (vars2, ys, guard2) = self.tuple_vars(model, &tops, "y");
                let in_b = and(vec![guard2, self.mem(model, a, &ys, env)?]);
                let same = and(xs.iter().zip(&ys).map(|(x, y)| eq(x.clone(), y.clone())).collect());
                if m == MultTest::Lone {
                    let mut all = vars;
                    all.extend(vars2);
                    forall(all, implies(and(vec![in_a, in_b]), same))
                } else {
                    exists(vars, and(vec![in_a, forall(vars2, implies(in_b, same))]))
                }
            }
        })
    }

    fn quant(
        &mut self,
        model: &Model,
        q: Quant,
        qvars: &[crate::model::QVar],
        body: &RelExpr,
        env: &Env,
    ) -> Result<Term, TranslateError> {
        // Binds the variables, returning (binders, guard, body) under a
        // fresh naming.
        let instance = |enc: &mut Encoder| -> Result<Option<(Vec<(String, Sort)>, Vec<Term>, Term, Term)>, TranslateError> {
            let mut env2 = env.clone();
            let mut binders = Vec::new();
            let mut terms = Vec::new();
            let mut guards = Vec::new();
            for qv in qvars {
                match &qv.domain {
                    Domain::Int => {
                        let name = enc.claim(&qv.var.name);
                        binders.push((name.clone(), enc.int_sort()));
                        env2.insert(qv.var.id, sym(&name));
                        terms.push(sym(&name));
                    }
                    Domain::Atoms(d) => {
                        let Some(top) = d.ty.cols().first().copied().flatten().map(|c| c.top) else {
                            return Ok(None);
                        };
                        let (name, sort) = enc.bind(model, &qv.var.name, top);
                        let x = sym(&name);
                        guards.push(enc.live(top, &x));
                        guards.push(enc.mem(model, d, std::slice::from_ref(&x), &env2)?);
                        binders.push((name, sort));
                        env2.insert(qv.var.id, x.clone());
                        terms.push(x);
                    }
                }
            }
            let b = enc.formula(model, body, &env2)?;
            Ok(Some((binders, terms, and(guards), b)))
        };
        let Some((vs, xs, g, b)) = instance(self)? else {
            // Some domain is empty.
            return Ok(Term::Bool(matches!(q, Quant::All | Quant::No | Quant::Lone)));
        };
        Ok(match q {
            Quant::All => forall(vs, implies(g, b)),
            Quant::Some => exists(vs, and(vec![g, b])),
            Quant::No => not(exists(vs, and(vec![g, b]))),
            Quant::Lone | Quant::One => {
                let (vs2, ys, g2, b2) = instance(self)?.expect("domains are non-empty");
                let same = and(xs.iter().zip(&ys).map(|(x, y)| eq(x.clone(), y.clone())).collect());
                let first = and(vec![g, b]);
                let second = and(vec![g2, b2]);
                if q == Quant::Lone {
                    let mut all = vs;
                    all.extend(vs2);
                    forall(all, implies(and(vec![first, second]), same))
                } else {
                    exists(vs, and(vec![first, forall(vs2, implies(second, same))]))
                }
            }
        })
    }

    // ----- membership -----------------------------------------------------

    /// Membership of a tuple of atom terms in a relational expression.
    pub fn mem(&mut self, model: &Model, e: &RelExpr, args: &[Term], env: &Env) -> Result<Term, TranslateError> {
        use ExprKind::*;
        debug_assert_eq!(args.len(), e.arity(), "membership arity");
        Ok(match &e.kind {
            Sig(s) => self.sig_mem(model, *s, &args[0]),
            Field(f) => app(self.symbols.fields[*f].clone(), args.to_vec()),
            Var(v) => {
                let t = env
                    .get(&v.id)
                    .cloned()
                    .ok_or_else(|| TranslateError::Unsupported(format!("unbound variable `{}`", v.name)))?;
                eq(args[0].clone(), t)
            }
            None => Term::Bool(false),
            Ord(f) => self.ord_mem(model, *f, args),
            Union(a, b) => or(vec![self.mem(model, a, args, env)?, self.mem(model, b, args, env)?]),
            Inter(a, b) => and(vec![self.mem(model, a, args, env)?, self.mem(model, b, args, env)?]),
            Diff(a, b) => and(vec![self.mem(model, a, args, env)?, not(self.mem(model, b, args, env)?)]),
            Product(a, b) => {
                let k = a.arity();
                and(vec![self.mem(model, a, &args[..k], env)?, self.mem(model, b, &args[k..], env)?])
            }
            Join(a, b) => {
                let m = a.arity();
                let (left, right) = args.split_at(m - 1);
                if let Some(t) = Self::singleton(a, env).filter(|t| t.len() == 1) {
                    let mut xs = t;
                    xs.extend_from_slice(right);
                    return self.mem(model, b, &xs, env);
                }
                if let Some(t) = Self::singleton(b, env).filter(|t| t.len() == 1) {
                    let mut xs = left.to_vec();
                    xs.extend(t);
                    return self.mem(model, a, &xs, env);
                }
                let Some(top) = a.ty.cols()[m - 1].or(b.ty.cols()[0]).map(|c| c.top) else {
                    return Ok(Term::Bool(false));
                };
                let (z, sort) = self.bind(model, "z", top);
                let zt = sym(&z);
                let mut xa = left.to_vec();
                xa.push(zt.clone());
                let mut xb = vec![zt.clone()];
                xb.extend_from_slice(right);
                let body = and(vec![self.live(top, &zt), self.mem(model, a, &xa, env)?, self.mem(model, b, &xb, env)?]);
                exists(vec![(z, sort)], body)
            }
            Closure(r) => {
                let (f, params) = self.closure_symbol(model, r, env)?;
                let mut xs = params;
                xs.extend_from_slice(args);
                app(f, xs)
            }
            ReflClosure(r) => {
                let top = e.ty.cols()[0].map(|c| c.top).expect("closure columns are typed");
                let (f, params) = self.closure_symbol(model, r, env)?;
                let mut xs = params;
                xs.extend_from_slice(args);
                or(vec![
                    and(vec![eq(args[0].clone(), args[1].clone()), self.live(top, &args[0])]),
                    app(f, xs),
                ])
            }
            Call(t, a) => {
                let body = instantiate_template(model, *t, a).map_err(TranslateError::Model)?;
                self.mem(model, &body, args, env)?
            }
            _ => return Err(TranslateError::Unsupported(format!("not a relation: {:?}", e.kind))),
        })
    }

    fn ord_mem(&mut self, model: &Model, f: OrdFn, args: &[Term]) -> Term {
        let s = model.ordering.as_ref().expect("ordering functions need an ordering").sig;
        let top = model.top(s);
        if let (Backend::Bounded(scope), true) = (&self.backend, model.sigs[s].is_top_level()) {
            // Atoms are ordered by their bitvector value.
            let w = scope.bitwidth(top);
            let n = scope.scope(top) as u64;
            return match f {
                OrdFn::First => eq(args[0].clone(), bv(0, w)),
                OrdFn::Last => eq(args[0].clone(), bv(n - 1, w)),
                OrdFn::Next | OrdFn::Prev => {
                    let (a, b) = if f == OrdFn::Next { (&args[0], &args[1]) } else { (&args[1], &args[0]) };
                    and(vec![
                        app("bvult", vec![a.clone(), b.clone()]),
                        eq(b.clone(), app("bvadd", vec![a.clone(), bv(1, w)])),
                        self.live(top, b),
                    ])
                }
            };
        }
        let lt = |enc: &Encoder, a: &Term, b: &Term| match &enc.symbols.order {
            Some(o) => app(o.clone(), vec![a.clone(), b.clone()]),
            Option::None => app("bvult", vec![a.clone(), b.clone()]),
        };
        let (y, sort) = self.bind(model, "y", top);
        let yt = sym(&y);
        let in_s = |enc: &Encoder, t: &Term| and(vec![enc.live(top, t), enc.sig_mem(model, s, t)]);
        match f {
            OrdFn::First | OrdFn::Last => {
                let a = &args[0];
                let before = if f == OrdFn::First { lt(self, &yt, a) } else { lt(self, a, &yt) };
                and(vec![in_s(self, a), forall(vec![(y, sort)], implies(in_s(self, &yt), not(before)))])
            }
            OrdFn::Next | OrdFn::Prev => {
                let (a, b) = if f == OrdFn::Next { (&args[0], &args[1]) } else { (&args[1], &args[0]) };
                let between = and(vec![lt(self, a, &yt), lt(self, &yt, b)]);
                and(vec![
                    in_s(self, a),
                    in_s(self, b),
                    lt(self, a, b),
                    forall(vec![(y, sort)], implies(in_s(self, &yt), not(between))),
                ])
            }
        }
    }

    /// The closure symbol for `^r` in the current environment, with the
    /// terms for its parameters (the free variables of `r`).
    fn closure_symbol(&mut self, model: &Model, r: &RelExpr, env: &Env) -> Result<(String, Vec<Term>), TranslateError> {
        let tops = Self::col_tops(r.ty.cols());
        let top = tops
            .as_ref()
            .and_then(|t| t.first().copied())
            .or_else(|| r.ty.cols().iter().flatten().next().map(|c| c.top))
            .expect("closure of an untyped relation");
        let free: Vec<_> = r.free_vars().into_iter().collect();
        let mut params: Vec<(String, Sort)> = Vec::new();
        let mut actual = Vec::new();
        let mut penv = env.clone();
        for (i, v) in free.iter().enumerate() {
            let t = env
                .get(&v.id)
                .cloned()
                .ok_or_else(|| TranslateError::Unsupported(format!("unbound variable `{}`", v.name)))?;
            actual.push(t);
            let sort = match &v {
                _ if is_int_var(r, v.id) => self.int_sort(),
                _ => {
                    let vt = var_top(r, v.id).expect("atom variable has a column type");
                    self.sort_of(model, vt)
                }
            };
            let p = format!("p{i}");
            penv.insert(v.id, sym(&p));
            params.push((p, sort));
        }
        let sort = self.sort_of(model, top);
        // Relational terms have no binders, so the term with its free
        // variables numbered canonically identifies the closure.
        let key = format!("{:?}", canonical(r, &free));
        if let Some(f) = self.closures.get(&key) {
            return Ok((f.clone(), actual));
        }

        // Fresh parameter binders for the axioms.
        let pv: Vec<(String, Sort)> = params.iter().map(|(p, s)| (self.claim(p), s.clone())).collect();
        let mut aenv = env.clone();
        for (v, (p, _)) in free.iter().zip(&pv) {
            aenv.insert(v.id, sym(p));
        }
        let ps: Vec<Term> = pv.iter().map(|(p, _)| sym(p)).collect();
        let mut arg_sorts: Vec<Sort> = pv.iter().map(|(_, s)| s.clone()).collect();
        arg_sorts.push(sort.clone());
        arg_sorts.push(sort.clone());
        let call = |f: &str, a: &Term, b: &Term| {
            let mut xs = ps.clone();
            xs.push(a.clone());
            xs.push(b.clone());
            app(f.to_string(), xs)
        };
        let idx = self.symbols.closures.len();
        self.script.comment(format!("transitive closure {idx}"));
        let result = match self.backend.clone() {
            Backend::Bounded(scope) => {
                // Iterative squaring: tier k holds paths of length <= 2^(k-1).
                let tiers = 1 + ceil_log2(scope.scope(top));
                let mut prev: Option<String> = Option::None;
                for k in 1..=tiers {
                    let f = self.claim(&format!("tc{idx}_{k}"));
                    self.script.push(Item::DeclareFun {
                        name: f.clone(),
                        args: arg_sorts.clone(),
                        ret: Sort::Bool,
                    });
                    let (x, y) = (self.claim("x"), self.claim("y"));
                    let (xt, yt) = (sym(&x), sym(&y));
                    let def = match &prev {
                        Option::None => self.mem(model, r, &[xt.clone(), yt.clone()], &aenv)?,
                        Some(p) => {
                            let z = self.claim("z");
                            let zt = sym(&z);
                            let step = and(vec![self.live(top, &zt), call(p, &xt, &zt), call(p, &zt, &yt)]);
                            or(vec![call(p, &xt, &yt), exists(vec![(z, sort.clone())], step)])
                        }
                    };
                    let guard = and(vec![self.live(top, &xt), self.live(top, &yt)]);
                    let mut vs = pv.clone();
                    vs.push((x, sort.clone()));
                    vs.push((y, sort.clone()));
                    let ax = implies(guard, iff(call(&f, &xt, &yt), def));
                    self.script.assert(Term::Forall(vs, Box::new(ax)));
                    prev = Some(f);
                }
                prev.expect("at least one tier")
            }
            Backend::Unbounded => {
                let f = self.claim(&format!("tc{idx}"));
                self.script.push(Item::DeclareFun {
                    name: f.clone(),
                    args: arg_sorts,
                    ret: Sort::Bool,
                });
                let (x, y, z) = (self.claim("x"), self.claim("y"), self.claim("z"));
                let (xt, yt, zt) = (sym(&x), sym(&y), sym(&z));
                let with = |extra: &[&String]| {
                    let mut vs = pv.clone();
                    vs.extend(extra.iter().map(|n| ((*n).clone(), sort.clone())));
                    vs
                };
                let base = implies(self.mem(model, r, &[xt.clone(), yt.clone()], &aenv)?, call(&f, &xt, &yt));
                self.script.assert(Term::Forall(with(&[&x, &y]), Box::new(base)));
                let trans = implies(and(vec![call(&f, &xt, &yt), call(&f, &yt, &zt)]), call(&f, &xt, &zt));
                self.script.assert(Term::Forall(with(&[&x, &y, &z]), Box::new(trans)));
                let step_r = self.mem(model, r, &[yt.clone(), zt.clone()], &aenv)?;
                let step = implies(and(vec![call(&f, &xt, &yt), step_r]), call(&f, &xt, &zt));
                self.script.assert(Term::Forall(with(&[&x, &y, &z]), Box::new(step)));
                f
            }
        };
        self.symbols.closures.push(result.clone());
        self.closures.insert(key, result.clone());
        Ok((result, actual))
    }

    // ----- the checked assertion -----------------------------------------

    /// Asserts the negation of a closed formula. Outermost universal
    /// quantifiers and implication premises are skolemized into named
    /// constants and separate assertions, so that models carry witnesses.
    pub fn assert_negation(&mut self, model: &Model, goal: &RelExpr) -> Result<(), TranslateError> {
        let goal = expand_calls(model, goal);
        let mut env = Env::new();
        let mut cur = goal;
        loop {
            match cur.kind {
                ExprKind::Quant { q: Quant::All, vars, body } => {
                    let mut empty = false;
                    for qv in &vars {
                        let (top, sort) = match &qv.domain {
                            Domain::Int => (Option::None, self.int_sort()),
                            Domain::Atoms(d) => match d.ty.cols().first().copied().flatten() {
                                Some(c) => (Some(c.top), self.sort_of(model, c.top)),
                                Option::None => {
                                    empty = true;
                                    break;
                                }
                            },
                        };
                        let name = self.claim(&qv.var.name);
                        self.script.push(Item::DeclareFun {
                            name: name.clone(),
                            args: vec![],
                            ret: sort,
                        });
                        let x = sym(&name);
                        if let (Some(top), Domain::Atoms(d)) = (top, &qv.domain) {
                            let g = and(vec![self.live(top, &x), self.mem(model, d, std::slice::from_ref(&x), &env)?]);
                            self.script.assert(g);
                        }
                        self.symbols.witnesses.push(Witness {
                            var: qv.var.name.clone(),
                            symbol: name,
                            top,
                        });
                        env.insert(qv.var.id, x);
                    }
                    if empty {
                        // A universal over an empty domain is true.
                        self.script.assert(Term::Bool(false));
                        return Ok(());
                    }
                    cur = *body;
                }
                ExprKind::Implies(a, b) => {
                    let premise = self.formula(model, &a, &env)?;
                    self.script.assert(premise);
                    cur = *b;
                }
                ExprKind::Not(a) => {
                    let t = self.formula(model, &a, &env)?;
                    self.script.assert(t);
                    return Ok(());
                }
                _ => {
                    let t = self.formula(model, &cur, &env)?;
                    self.script.assert(not(t));
                    return Ok(());
                }
            }
        }
    }

    pub fn assert_facts(&mut self, model: &Model) -> Result<(), TranslateError> {
        if !model.facts.is_empty() {
            self.script.comment("facts");
        }
        for f in &model.facts {
            let body = expand_calls(model, &f.body);
            let t = self.formula(model, &body, &Env::new())?;
            self.script.assert(t);
        }
        Ok(())
    }
}

/// True if `v` is used as an integer inside `e`.
fn is_int_var(e: &RelExpr, v: VarId) -> bool {
    e.any(&|x| matches!(&x.kind, ExprKind::Var(w) if w.id == v && x.ty == Ty::Int))
}

/// The top-level signature of an atom variable occurring in `e`.
fn var_top(e: &RelExpr, v: VarId) -> Option<SigId> {
    let mut out = Option::None;
    e.walk(&mut |x| {
        if let ExprKind::Var(w) = &x.kind {
            if w.id == v {
                if let Some(Some(c)) = x.ty.cols().first() {
                    out = Some(c.top);
                }
            }
        }
    });
    out
}

/// `e` with its free variables renamed to their positions in `free`.
fn canonical(e: &RelExpr, free: &[crate::model::Var]) -> RelExpr {
    match &e.kind {
        ExprKind::Var(v) => {
            let i = free.iter().position(|w| w.id == v.id).expect("free variable");
            let var = crate::model::Var {
                id: VarId(i as u32),
                name: String::new(),
            };
            RelExpr::new(ExprKind::Var(var), e.ty.clone())
        }
        _ => map_children(e, &|c| canonical(c, free)),
    }
}
