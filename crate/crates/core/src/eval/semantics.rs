//! Direct relational semantics over a finite [`Instance`].

use std::collections::{BTreeSet, HashMap};

use super::instance::{Atom, Instance, Tuple, TupleSet};
use crate::model::{Domain, ExprKind, Model, MultTest, OrdFn, Quant, RelExpr, Ty, VarId};

/// The value of an expression: a formula's truth, an integer, or a tuple set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Rel(TupleSet),
}

impl Value {
    pub fn atom(a: Atom) -> Value {
        Value::Rel(std::iter::once(vec![a]).collect())
    }

    pub fn as_bool(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            other => panic!("expected a truth value, found {other:?}"),
        }
    }

    pub fn as_int(&self) -> i64 {
        match self {
            Value::Int(i) => *i,
            other => panic!("expected an integer, found {other:?}"),
        }
    }

    pub fn into_rel(self) -> TupleSet {
        match self {
            Value::Rel(r) => r,
            other => panic!("expected a relation, found {other:?}"),
        }
    }
}

/// Variable bindings.
pub type Env = HashMap<VarId, Value>;

/// Evaluates a typed expression. Free variables must be bound in `env`.
pub fn eval(model: &Model, expr: &RelExpr, inst: &Instance, env: &Env) -> Value {
    let mut env = env.clone();
    Evaluator { model, inst }.value(expr, &mut env)
}

/// Truth of a closed formula.
pub fn holds(model: &Model, inst: &Instance, formula: &RelExpr) -> bool {
    Evaluator { model, inst }.formula(formula, &mut Env::new())
}

/// True iff every fact and every implicit field constraint holds.
pub fn satisfies_constraints(model: &Model, inst: &Instance) -> bool {
    let ev = Evaluator { model, inst };
    model.constraints().iter().all(|c| ev.formula(c, &mut Env::new()))
}

/// True iff the instance is well formed, satisfies all facts and implicit
/// field constraints, and falsifies the named assertion.
pub fn validate_counterexample(model: &Model, assertion: &str, inst: &Instance) -> bool {
    let Some(a) = model.assertion(assertion) else {
        return false;
    };
    inst.check_wellformed(model).is_ok() && satisfies_constraints(model, inst) && !holds(model, inst, &a.body)
}

/// Transitive closure of a binary relation as a least fixpoint.
pub fn closure(r: &TupleSet) -> TupleSet {
    let succ = index_by_first(r);
    let mut result = r.clone();
    let mut frontier: Vec<Tuple> = r.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for t in &frontier {
            if let Some(us) = succ.get(&t[1]) {
                for u in us {
                    let p = vec![t[0], u[1]];
                    if result.insert(p.clone()) {
                        next.push(p);
                    }
                }
            }
        }
        frontier = next;
    }
    result
}

/// Relational join of an arity-m and an arity-n set (m + n > 2).
pub fn join(a: &TupleSet, b: &TupleSet) -> TupleSet {
    let idx = index_by_first(b);
    let mut out = TupleSet::new();
    for t in a {
        let (last, init) = t.split_last().expect("non-empty tuple");
        if let Some(us) = idx.get(last) {
            for u in us {
                let mut v = init.to_vec();
                v.extend_from_slice(&u[1..]);
                out.insert(v);
            }
        }
    }
    out
}

pub fn product(a: &TupleSet, b: &TupleSet) -> TupleSet {
    let mut out = TupleSet::new();
    for t in a {
        for u in b {
            let mut v = t.clone();
            v.extend_from_slice(u);
            out.insert(v);
        }
    }
    out
}

fn index_by_first(r: &TupleSet) -> HashMap<Atom, Vec<&Tuple>> {
    let mut idx: HashMap<Atom, Vec<&Tuple>> = HashMap::new();
    for t in r {
        idx.entry(t[0]).or_default().push(t);
    }
    idx
}

fn unary(atoms: &BTreeSet<Atom>) -> TupleSet {
    atoms.iter().map(|&a| vec![a]).collect()
}

struct Evaluator<'a> {
    model: &'a Model,
    inst: &'a Instance,
}

impl Evaluator<'_> {
    fn value(&self, e: &RelExpr, env: &mut Env) -> Value {
        match e.ty {
            Ty::Bool => Value::Bool(self.formula(e, env)),
            Ty::Int => Value::Int(self.int(e, env)),
            Ty::Rel(_) => Value::Rel(self.rel(e, env)),
        }
    }

    fn call(&self, t: usize, args: &[RelExpr], env: &mut Env) -> Value {
        let tpl = &self.model.templates[t];
        let mut inner = Env::new();
        for (p, a) in tpl.params.iter().zip(args) {
            inner.insert(p.var.id, self.value(a, env));
        }
        self.value(&tpl.body, &mut inner)
    }

    fn rel(&self, e: &RelExpr, env: &mut Env) -> TupleSet {
        match &e.kind {
            ExprKind::Sig(s) => unary(&self.inst.sigs[*s]),
            ExprKind::Field(f) => self.inst.fields[*f].clone(),
            ExprKind::Var(v) => match env.get(&v.id) {
                Some(Value::Rel(r)) => r.clone(),
                other => panic!("variable `{}` bound to {other:?}", v.name),
            },
            ExprKind::None => TupleSet::new(),
            ExprKind::Ord(f) => {
                let s = self.model.ordering.as_ref().expect("ordering declared").sig;
                let atoms: Vec<Atom> = self.inst.sigs[s].iter().copied().collect();
                match f {
                    OrdFn::First => atoms.first().map(|&a| vec![a]).into_iter().collect(),
                    OrdFn::Last => atoms.last().map(|&a| vec![a]).into_iter().collect(),
                    OrdFn::Next => atoms.windows(2).map(|w| vec![w[0], w[1]]).collect(),
                    OrdFn::Prev => atoms.windows(2).map(|w| vec![w[1], w[0]]).collect(),
                }
            }
            ExprKind::Union(a, b) => {
                let mut x = self.rel(a, env);
                x.extend(self.rel(b, env));
                x
            }
            ExprKind::Diff(a, b) => {
                let x = self.rel(a, env);
                let y = self.rel(b, env);
                x.difference(&y).cloned().collect()
            }
            ExprKind::Inter(a, b) => {
                let x = self.rel(a, env);
                let y = self.rel(b, env);
                x.intersection(&y).cloned().collect()
            }
            ExprKind::Product(a, b) => product(&self.rel(a, env), &self.rel(b, env)),
            ExprKind::Join(a, b) => join(&self.rel(a, env), &self.rel(b, env)),
            ExprKind::Closure(a) => closure(&self.rel(a, env)),
            ExprKind::ReflClosure(a) => {
                let mut c = closure(&self.rel(a, env));
                let top = e.ty.cols()[0].expect("typed column").top;
                c.extend((0..self.inst.universe(top)).map(|x| vec![x, x]));
                c
            }
            ExprKind::Call(t, args) => self.call(*t, args, env).into_rel(),
            other => panic!("not a relational term: {other:?}"),
        }
    }

    fn int(&self, e: &RelExpr, env: &mut Env) -> i64 {
        let sem = self.inst.ints;
        match &e.kind {
            ExprKind::IntLit(n) => sem.normalize(*n),
            ExprKind::IntAdd(a, b) => sem.normalize(self.int(a, env) + self.int(b, env)),
            ExprKind::IntSub(a, b) => sem.normalize(self.int(a, env) - self.int(b, env)),
            ExprKind::Var(v) => match env.get(&v.id) {
                Some(Value::Int(i)) => *i,
                other => panic!("variable `{}` bound to {other:?}", v.name),
            },
            ExprKind::Call(t, args) => self.call(*t, args, env).as_int(),
            other => panic!("not an integer term: {other:?}"),
        }
    }

    fn formula(&self, e: &RelExpr, env: &mut Env) -> bool {
        match &e.kind {
            ExprKind::True => true,
            ExprKind::False => false,
            ExprKind::Not(a) => !self.formula(a, env),
            ExprKind::And(xs) => xs.iter().all(|x| self.formula(x, env)),
            ExprKind::Or(xs) => xs.iter().any(|x| self.formula(x, env)),
            ExprKind::Implies(a, b) => !self.formula(a, env) || self.formula(b, env),
            ExprKind::Iff(a, b) => self.formula(a, env) == self.formula(b, env),
            ExprKind::In(a, b) => self.rel(a, env).is_subset(&self.rel(b, env)),
            ExprKind::Eq(a, b) => self.rel(a, env) == self.rel(b, env),
            ExprKind::Mult(m, a) => {
                let n = self.rel(a, env).len();
                match m {
                    MultTest::No => n == 0,
                    MultTest::Some => n > 0,
                    MultTest::Lone => n <= 1,
                    MultTest::One => n == 1,
                }
            }
            ExprKind::IntCmp(op, a, b) => op.holds(self.int(a, env), self.int(b, env)),
            ExprKind::Call(t, args) => self.call(*t, args, env).as_bool(),
            ExprKind::Quant { q, vars, body } => {
                // Count satisfying assignments of the whole variable tuple,
                // stopping as soon as the answer is determined.
                let limit = match q {
                    Quant::All | Quant::Some | Quant::No => 1,
                    Quant::Lone | Quant::One => 2,
                };
                let want = !matches!(q, Quant::All);
                let mut count = 0usize;
                self.assign(vars, 0, body, env, want, limit, &mut count);
                match q {
                    Quant::All => count == 0,
                    Quant::Some => count > 0,
                    Quant::No => count == 0,
                    Quant::Lone => count <= 1,
                    Quant::One => count == 1,
                }
            }
            other => panic!("not a formula: {other:?}"),
        }
    }

    /// Enumerates assignments to `vars[i..]`, counting those for which the
    /// body evaluates to `want`; stops once `limit` is reached.
    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        vars: &[crate::model::QVar],
        i: usize,
        body: &RelExpr,
        env: &mut Env,
        want: bool,
        limit: usize,
        count: &mut usize,
    ) {
        if *count >= limit {
            return;
        }
        if i == vars.len() {
            if self.formula(body, env) == want {
                *count += 1;
            }
            return;
        }
        let qv = &vars[i];
        let values: Vec<Value> = match &qv.domain {
            Domain::Int => self.inst.ints.range().map(Value::Int).collect(),
            Domain::Atoms(d) => self.rel(d, env).into_iter().map(|t| Value::atom(t[0])).collect(),
        };
        let saved = env.remove(&qv.var.id);
        for v in values {
            env.insert(qv.var.id, v);
            self.assign(vars, i + 1, body, env, want, limit, count);
            if *count >= limit {
                break;
            }
        }
        match saved {
            Some(v) => env.insert(qv.var.id, v),
            None => env.remove(&qv.var.id),
        };
    }
}
