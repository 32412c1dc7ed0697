//! Template instantiation, call expansion and alpha-equivalence.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use super::typecheck::check_args;
use super::types::*;
use super::ModelError;

/// Variables minted after typechecking start far above the ids the
/// typechecker hands out, so they never collide with source variables.
static NEXT_FRESH: AtomicU32 = AtomicU32::new(1_000_000);

/// A variable with a process-wide unique id.
pub fn fresh_var(name: &str) -> Var {
    Var {
        id: VarId(NEXT_FRESH.fetch_add(1, AtomicOrdering::Relaxed)),
        name: name.to_string(),
    }
}

/// Capture-avoiding substitution of free variables.
///
/// Every binder inside `e` is renamed to a fresh variable, so two
/// substitutions of the same body never share bound variable ids.
pub fn substitute(e: &RelExpr, map: &HashMap<VarId, RelExpr>) -> RelExpr {
    let mut map = map.clone();
    subst(e, &mut map)
}

fn subst(e: &RelExpr, map: &mut HashMap<VarId, RelExpr>) -> RelExpr {
    let b = |x: &RelExpr, map: &mut HashMap<VarId, RelExpr>| Box::new(subst(x, map));
    let kind = match &e.kind {
        ExprKind::Var(v) => {
            return map.get(&v.id).cloned().unwrap_or_else(|| e.clone());
        }
        ExprKind::Sig(_)
        | ExprKind::Field(_)
        | ExprKind::None
        | ExprKind::Ord(_)
        | ExprKind::True
        | ExprKind::False
        | ExprKind::IntLit(_) => e.kind.clone(),
        ExprKind::Union(x, y) => ExprKind::Union(b(x, map), b(y, map)),
        ExprKind::Diff(x, y) => ExprKind::Diff(b(x, map), b(y, map)),
        ExprKind::Inter(x, y) => ExprKind::Inter(b(x, map), b(y, map)),
        ExprKind::Product(x, y) => ExprKind::Product(b(x, map), b(y, map)),
        ExprKind::Join(x, y) => ExprKind::Join(b(x, map), b(y, map)),
        ExprKind::Closure(x) => ExprKind::Closure(b(x, map)),
        ExprKind::ReflClosure(x) => ExprKind::ReflClosure(b(x, map)),
        ExprKind::Call(t, args) => ExprKind::Call(*t, args.iter().map(|a| subst(a, map)).collect()),
        ExprKind::Not(x) => ExprKind::Not(b(x, map)),
        ExprKind::And(xs) => ExprKind::And(xs.iter().map(|a| subst(a, map)).collect()),
        ExprKind::Or(xs) => ExprKind::Or(xs.iter().map(|a| subst(a, map)).collect()),
        ExprKind::Implies(x, y) => ExprKind::Implies(b(x, map), b(y, map)),
        ExprKind::Iff(x, y) => ExprKind::Iff(b(x, map), b(y, map)),
        ExprKind::In(x, y) => ExprKind::In(b(x, map), b(y, map)),
        ExprKind::Eq(x, y) => ExprKind::Eq(b(x, map), b(y, map)),
        ExprKind::Mult(m, x) => ExprKind::Mult(*m, b(x, map)),
        ExprKind::IntAdd(x, y) => ExprKind::IntAdd(b(x, map), b(y, map)),
        ExprKind::IntSub(x, y) => ExprKind::IntSub(b(x, map), b(y, map)),
        ExprKind::IntCmp(c, x, y) => ExprKind::IntCmp(*c, b(x, map), b(y, map)),
        ExprKind::Quant { q, vars, body } => {
            let mut saved = Vec::new();
            let mut new_vars = Vec::new();
            for qv in vars {
                // Domains see the variables bound to their left.
                let domain = match &qv.domain {
                    Domain::Atoms(d) => Domain::Atoms(Box::new(subst(d, map))),
                    Domain::Int => Domain::Int,
                };
                let v = fresh_var(&qv.var.name);
                let ty = match &domain {
                    Domain::Atoms(d) => d.ty.clone(),
                    Domain::Int => Ty::Int,
                };
                saved.push((qv.var.id, map.insert(qv.var.id, RelExpr::var(v.clone(), ty))));
                new_vars.push(QVar { var: v, domain });
            }
            let body = b(body, map);
            for (id, old) in saved.into_iter().rev() {
                match old {
                    Some(o) => map.insert(id, o),
                    None => map.remove(&id),
                };
            }
            ExprKind::Quant {
                q: *q,
                vars: new_vars,
                body,
            }
        }
    };
    RelExpr::new(kind, e.ty.clone())
}

/// Instantiates a template body with the given arguments (one expansion
/// step: calls inside the body are left in place).
pub fn instantiate_template(model: &Model, t: TemplateId, args: &[RelExpr]) -> Result<RelExpr, ModelError> {
    check_args(model, t, args)?;
    let tpl = &model.templates[t];
    let map: HashMap<VarId, RelExpr> = tpl
        .params
        .iter()
        .zip(args)
        .map(|(p, a)| (p.var.id, a.clone()))
        .collect();
    Ok(substitute(&tpl.body, &map))
}

/// Inlines every call, recursively. Templates are non-recursive, so this
/// terminates.
pub fn expand_calls(model: &Model, e: &RelExpr) -> RelExpr {
    let expanded = map_children(e, &|c| expand_calls(model, c));
    match &expanded.kind {
        ExprKind::Call(t, args) => {
            let body = instantiate_template(model, *t, args).expect("typechecked call");
            expand_calls(model, &body)
        }
        _ => expanded,
    }
}

/// Rebuilds `e` with `f` applied to each direct child (including
/// quantifier domains).
pub(crate) fn map_children(e: &RelExpr, f: &impl Fn(&RelExpr) -> RelExpr) -> RelExpr {
    let b = |x: &RelExpr| Box::new(f(x));
    let kind = match &e.kind {
        ExprKind::Var(_)
        | ExprKind::Sig(_)
        | ExprKind::Field(_)
        | ExprKind::None
        | ExprKind::Ord(_)
        | ExprKind::True
        | ExprKind::False
        | ExprKind::IntLit(_) => e.kind.clone(),
        ExprKind::Union(x, y) => ExprKind::Union(b(x), b(y)),
        ExprKind::Diff(x, y) => ExprKind::Diff(b(x), b(y)),
        ExprKind::Inter(x, y) => ExprKind::Inter(b(x), b(y)),
        ExprKind::Product(x, y) => ExprKind::Product(b(x), b(y)),
        ExprKind::Join(x, y) => ExprKind::Join(b(x), b(y)),
        ExprKind::Closure(x) => ExprKind::Closure(b(x)),
        ExprKind::ReflClosure(x) => ExprKind::ReflClosure(b(x)),
        ExprKind::Call(t, args) => ExprKind::Call(*t, args.iter().map(f).collect()),
        ExprKind::Not(x) => ExprKind::Not(b(x)),
        ExprKind::And(xs) => ExprKind::And(xs.iter().map(f).collect()),
        ExprKind::Or(xs) => ExprKind::Or(xs.iter().map(f).collect()),
        ExprKind::Implies(x, y) => ExprKind::Implies(b(x), b(y)),
        ExprKind::Iff(x, y) => ExprKind::Iff(b(x), b(y)),
        ExprKind::In(x, y) => ExprKind::In(b(x), b(y)),
        ExprKind::Eq(x, y) => ExprKind::Eq(b(x), b(y)),
        ExprKind::Mult(m, x) => ExprKind::Mult(*m, b(x)),
        ExprKind::IntAdd(x, y) => ExprKind::IntAdd(b(x), b(y)),
        ExprKind::IntSub(x, y) => ExprKind::IntSub(b(x), b(y)),
        ExprKind::IntCmp(c, x, y) => ExprKind::IntCmp(*c, b(x), b(y)),
        ExprKind::Quant { q, vars, body } => ExprKind::Quant {
            q: *q,
            vars: vars
                .iter()
                .map(|qv| QVar {
                    var: qv.var.clone(),
                    domain: match &qv.domain {
                        Domain::Atoms(d) => Domain::Atoms(b(d)),
                        Domain::Int => Domain::Int,
                    },
                })
                .collect(),
            body: b(body),
        },
    };
    RelExpr::new(kind, e.ty.clone())
}

/// Structural equality up to renaming of bound variables.
pub fn alpha_eq(a: &RelExpr, b: &RelExpr) -> bool {
    alpha(a, b, &mut Vec::new())
}

fn alpha(a: &RelExpr, b: &RelExpr, binds: &mut Vec<(VarId, VarId)>) -> bool {
    use ExprKind::*;
    if a.ty != b.ty {
        return false;
    }
    match (&a.kind, &b.kind) {
        (Var(x), Var(y)) => {
            match binds.iter().rev().find(|(p, q)| *p == x.id || *q == y.id) {
                Some((p, q)) => *p == x.id && *q == y.id,
                Option::None => x.id == y.id,
            }
        }
        (Quant { q: q1, vars: v1, body: b1 }, Quant { q: q2, vars: v2, body: b2 }) => {
            if q1 != q2 || v1.len() != v2.len() {
                return false;
            }
            let depth = binds.len();
            let mut ok = true;
            for (x, y) in v1.iter().zip(v2) {
                ok = match (&x.domain, &y.domain) {
                    (Domain::Int, Domain::Int) => true,
                    (Domain::Atoms(d1), Domain::Atoms(d2)) => alpha(d1, d2, binds),
                    _ => false,
                };
                if !ok {
                    break;
                }
                binds.push((x.var.id, y.var.id));
            }
            ok = ok && alpha(b1, b2, binds);
            binds.truncate(depth);
            ok
        }
        (Call(t1, a1), Call(t2, a2)) => t1 == t2 && all_alpha(a1, a2, binds),
        (And(a1), And(a2)) | (Or(a1), Or(a2)) => all_alpha(a1, a2, binds),
        (Mult(m1, x), Mult(m2, y)) => m1 == m2 && alpha(x, y, binds),
        (IntCmp(c1, x1, y1), IntCmp(c2, x2, y2)) => c1 == c2 && alpha(x1, x2, binds) && alpha(y1, y2, binds),
        (Sig(_), _) | (Field(_), _) | (None, _) | (Ord(_), _) | (True, _) | (False, _) | (IntLit(_), _) => {
            a.kind == b.kind
        }
        _ => {
            std::mem::discriminant(&a.kind) == std::mem::discriminant(&b.kind)
                && all_alpha_refs(&a.children(), &b.children(), binds)
        }
    }
}

fn all_alpha(a: &[RelExpr], b: &[RelExpr], binds: &mut Vec<(VarId, VarId)>) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| alpha(x, y, binds))
}

fn all_alpha_refs(a: &[&RelExpr], b: &[&RelExpr], binds: &mut Vec<(VarId, VarId)>) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| alpha(x, y, binds))
}
