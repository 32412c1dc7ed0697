//! Finite interpretations of the relational theory: the standard model
//! over a universe of `n` atoms, where every relation sort contains all
//! tuple sets of its arity and each operator has its intended meaning
//! (closure is the least fixpoint).
//!
//! Used to validate lemmas and the closure induction rule exhaustively on
//! small universes, and to evaluate exported obligations on instances.

use std::collections::BTreeMap;

use crate::eval::Instance;
use crate::model::Model;

use super::export::{ConstRole, Obligation, ORD_BIJECTION};
use super::syntax::{FSort, FTerm, Formula};
use super::theory::OpInstance;

/// A set of k-tuples over `0..n`, as a bitset indexed by the tuple's
/// base-n digits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelValue {
    pub arity: usize,
    words: Vec<u64>,
}

impl RelValue {
    pub fn empty(n: u32, arity: usize) -> RelValue {
        let bits = (n as usize).pow(arity as u32);
        RelValue {
            arity,
            words: vec![0; bits.div_ceil(64).max(1)],
        }
    }

    /// The relation whose members are the indices set in `mask`.
    pub fn from_mask(n: u32, arity: usize, mask: u64) -> RelValue {
        let mut r = RelValue::empty(n, arity);
        r.words[0] = mask;
        r
    }

    pub fn from_tuples<'a>(n: u32, arity: usize, tuples: impl IntoIterator<Item = &'a [u32]>) -> RelValue {
        let mut r = RelValue::empty(n, arity);
        for t in tuples {
            r.insert(index(n, t));
        }
        r
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, n: u32, t: &[u32]) -> bool {
        t.len() == self.arity && t.iter().all(|&a| a < n) && self.get(index(n, t))
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &RelValue) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn zip(&self, other: &RelValue, f: impl Fn(u64, u64) -> u64) -> RelValue {
        RelValue {
            arity: self.arity,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Member tuples in index order.
    pub fn tuples(&self, n: u32) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                out.push(digits(n, self.arity, wi * 64 + b));
            }
        }
        out
    }
}

fn index(n: u32, t: &[u32]) -> usize {
    t.iter().fold(0usize, |acc, &a| acc * n as usize + a as usize)
}

fn digits(n: u32, k: usize, mut i: usize) -> Vec<u32> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = (i % n as usize) as u32;
        i /= n as usize;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Atom(u32),
    Tuple(Vec<u32>),
    Rel(RelValue),
    Int(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("`{0}` has no interpretation")]
    Unknown(String),
    #[error("ill-sorted application of `{0}`")]
    IllSorted(String),
    #[error("quantifier over {0} is too large to enumerate")]
    TooLarge(String),
}

/// A template definition `name(params) := body`.
#[derive(Debug, Clone, PartialEq)]
enum Definition {
    Pred(Vec<String>, Formula),
    Fun(Vec<String>, FTerm),
}

/// Largest number of tuples a relation sort may have for relation
/// quantifiers to be enumerated.
pub const MAX_ENUMERATED_TUPLES: usize = 16;

/// A finite interpretation.
#[derive(Debug, Clone)]
pub struct FolInterp {
    pub n: u32,
    pub consts: BTreeMap<String, Value>,
    /// Tabulated unary function symbols over integers (the ordering
    /// bijection); arguments outside the table are an error.
    pub int_functions: BTreeMap<String, BTreeMap<i64, Value>>,
    /// Integer quantifiers range over `lo..=hi`.
    pub int_range: (i64, i64),
    defs: BTreeMap<String, Definition>,
}

type Env = Vec<(String, Value)>;

impl FolInterp {
    pub fn new(n: u32) -> FolInterp {
        FolInterp {
            n,
            consts: BTreeMap::new(),
            int_functions: BTreeMap::new(),
            int_range: (-4, 4),
            defs: BTreeMap::new(),
        }
    }

    pub fn with_const(mut self, name: &str, v: Value) -> FolInterp {
        self.consts.insert(name.to_string(), v);
        self
    }

    /// Interprets the model constants of an obligation by an instance:
    /// atoms of the top-level signatures are laid out consecutively, the
    /// ordering follows atom order, and the templates follow their
    /// defining axioms.
    pub fn from_instance(model: &Model, ob: &Obligation, inst: &Instance) -> FolInterp {
        let tops = model.top_levels();
        let mut offset = BTreeMap::new();
        let mut n = 0u32;
        for &t in &tops {
            offset.insert(t, n);
            n += inst.universe(t);
        }
        let n = n.max(1);
        let mut interp = FolInterp::new(n);
        let sig_of = |name: &str| model.sig_by_name(name).expect("constant of a signature");
        for c in &ob.constants {
            let v = match &c.role {
                ConstRole::Sig(s) => {
                    let s = sig_of(s);
                    let off = offset[&model.top(s)];
                    let atoms: Vec<Vec<u32>> = inst.sigs[s].iter().map(|&a| vec![a + off]).collect();
                    RelValue::from_tuples(n, 1, atoms.iter().map(Vec::as_slice))
                }
                ConstRole::Field(f) => {
                    let fid = model.field_by_name(f).expect("constant of a field");
                    let field = &model.fields[fid];
                    let offs: Vec<u32> = field.columns.iter().map(|&c| offset[&model.top(c)]).collect();
                    let tuples: Vec<Vec<u32>> = inst.fields[fid]
                        .iter()
                        .map(|t| t.iter().zip(&offs).map(|(a, o)| a + o).collect())
                        .collect();
                    RelValue::from_tuples(n, field.arity(), tuples.iter().map(Vec::as_slice))
                }
                ConstRole::Ordering(f) => {
                    let ord = model.ordering.as_ref().expect("ordering constant without ordering");
                    let off = offset[&model.top(ord.sig)];
                    let members: Vec<u32> = inst.sigs[ord.sig].iter().map(|&a| a + off).collect();
                    let tuples: Vec<Vec<u32>> = match f {
                        crate::model::OrdFn::First => members.first().map(|&a| vec![a]).into_iter().collect(),
                        crate::model::OrdFn::Last => members.last().map(|&a| vec![a]).into_iter().collect(),
                        crate::model::OrdFn::Next => members.windows(2).map(|w| vec![w[0], w[1]]).collect(),
                        crate::model::OrdFn::Prev => members.windows(2).map(|w| vec![w[1], w[0]]).collect(),
                    };
                    RelValue::from_tuples(n, f.arity(), tuples.iter().map(Vec::as_slice))
                }
            };
            interp.consts.insert(c.decl.name.clone(), Value::Rel(v));
        }
        if let Some(ord) = &model.ordering {
            let off = offset[&model.top(ord.sig)];
            let table = inst.sigs[ord.sig]
                .iter()
                .enumerate()
                .map(|(i, &a)| (i as i64, Value::Atom(a + off)))
                .collect();
            interp.int_functions.insert(ORD_BIJECTION.to_string(), table);
        }
        interp.add_definitions(ob);
        interp
    }

    /// Registers the template definitions of an obligation.
    pub fn add_definitions(&mut self, ob: &Obligation) {
        for def in &ob.definitions {
            let mut f = &def.formula;
            let mut params = Vec::new();
            if let Formula::Forall(vs, body) = f {
                params = vs.iter().map(|(v, _)| v.clone()).collect();
                f = body;
            }
            match f {
                Formula::Iff(lhs, body) => {
                    if let Formula::Pred(name, _) = &**lhs {
                        self.defs.insert(name.clone(), Definition::Pred(params, (**body).clone()));
                    }
                }
                Formula::Eq(FTerm::Fn(name, _), body) => {
                    self.defs.insert(name.clone(), Definition::Fun(params, body.clone()));
                }
                _ => {}
            }
        }
    }

    fn domain(&self, s: FSort) -> Result<Vec<Value>, InterpError> {
        let n = self.n;
        Ok(match s {
            FSort::Atom => (0..n).map(Value::Atom).collect(),
            FSort::TupleK(k) => {
                let total = (n as usize).pow(k as u32);
                (0..total).map(|i| Value::Tuple(digits(n, k, i))).collect()
            }
            FSort::Rel(k) => {
                let bits = (n as usize).pow(k as u32);
                if bits > MAX_ENUMERATED_TUPLES {
                    return Err(InterpError::TooLarge(s.name()));
                }
                (0..1u64 << bits).map(|m| Value::Rel(RelValue::from_mask(n, k, m))).collect()
            }
            FSort::Int => (self.int_range.0..=self.int_range.1).map(Value::Int).collect(),
            FSort::Tuple | FSort::Relation => return Err(InterpError::TooLarge(s.name())),
        })
    }

    /// Truth of a closed formula.
    pub fn holds(&self, f: &Formula) -> Result<bool, InterpError> {
        self.formula(f, &mut Vec::new())
    }

    /// Truth of a formula with the given free-variable values.
    pub fn holds_with(&self, f: &Formula, env: &[(String, Value)]) -> Result<bool, InterpError> {
        self.formula(f, &mut env.to_vec())
    }

    /// Value of a term with the given free-variable values.
    pub fn value(&self, t: &FTerm, env: &[(String, Value)]) -> Result<Value, InterpError> {
        self.term(t, &mut env.to_vec())
    }

    fn rel(&self, t: &FTerm, env: &mut Env) -> Result<RelValue, InterpError> {
        match self.term(t, env)? {
            Value::Rel(r) => Ok(r),
            Value::Atom(_) | Value::Tuple(_) | Value::Int(_) => Err(InterpError::IllSorted(t.to_string())),
        }
    }

    fn int(&self, t: &FTerm, env: &mut Env) -> Result<i64, InterpError> {
        match self.term(t, env)? {
            Value::Int(i) => Ok(i),
            _ => Err(InterpError::IllSorted(t.to_string())),
        }
    }

    fn atoms_of(v: &Value) -> Option<Vec<u32>> {
        match v {
            Value::Atom(a) => Some(vec![*a]),
            Value::Tuple(t) => Some(t.clone()),
            _ => None,
        }
    }

    fn term(&self, t: &FTerm, env: &mut Env) -> Result<Value, InterpError> {
        let n = self.n;
        match t {
            FTerm::Int(i) => Ok(Value::Int(*i)),
            FTerm::Var(v) => env
                .iter()
                .rev()
                .find(|(x, _)| x == v)
                .map(|(_, val)| val.clone())
                .ok_or_else(|| InterpError::Unknown(v.clone())),
            FTerm::Fn(f, args) => {
                if args.is_empty() {
                    if let Some(v) = self.consts.get(f) {
                        return Ok(v.clone());
                    }
                }
                if f == "+" || f == "-" {
                    let (a, b) = (self.int(&args[0], env)?, self.int(&args[1], env)?);
                    return Ok(Value::Int(if f == "+" { a + b } else { a - b }));
                }
                if f == "sing" {
                    return match self.term(&args[0], env)? {
                        Value::Atom(a) => Ok(Value::Rel(RelValue::from_tuples(n, 1, [&[a][..]]))),
                        _ => Err(InterpError::IllSorted(t.to_string())),
                    };
                }
                if let Some(table) = self.int_functions.get(f) {
                    let i = self.int(&args[0], env)?;
                    return table.get(&i).cloned().ok_or_else(|| InterpError::Unknown(format!("{f}({i})")));
                }
                if let Some(def) = self.defs.get(f) {
                    let Definition::Fun(params, body) = def else {
                        return Err(InterpError::IllSorted(f.clone()));
                    };
                    let vals = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                    let mut inner: Env = params.iter().cloned().zip(vals).collect();
                    return self.term(body, &mut inner);
                }
                let op = OpInstance::parse(f).ok_or_else(|| InterpError::Unknown(f.clone()))?;
                self.apply(op, args, env)
            }
        }
    }

    fn apply(&self, op: OpInstance, args: &[FTerm], env: &mut Env) -> Result<Value, InterpError> {
        let n = self.n;
        let ill = || InterpError::IllSorted(op.name());
        Ok(match op {
            OpInstance::Tuple(k) => {
                let mut t = Vec::with_capacity(k);
                for a in args {
                    match self.term(a, env)? {
                        Value::Atom(x) => t.push(x),
                        _ => return Err(ill()),
                    }
                }
                Value::Tuple(t)
            }
            OpInstance::Union(_) | OpInstance::Inter(_) | OpInstance::Diff(_) => {
                let (a, b) = (self.rel(&args[0], env)?, self.rel(&args[1], env)?);
                if a.arity != b.arity {
                    return Err(ill());
                }
                Value::Rel(match op {
                    OpInstance::Union(_) => a.zip(&b, |x, y| x | y),
                    OpInstance::Inter(_) => a.zip(&b, |x, y| x & y),
                    _ => a.zip(&b, |x, y| x & !y),
                })
            }
            OpInstance::Prod(..) => {
                let (a, b) = (self.rel(&args[0], env)?, self.rel(&args[1], env)?);
                let mut out = RelValue::empty(n, a.arity + b.arity);
                let bt = b.tuples(n);
                for x in a.tuples(n) {
                    for y in &bt {
                        let mut t = x.clone();
                        t.extend_from_slice(y);
                        out.insert(index(n, &t));
                    }
                }
                Value::Rel(out)
            }
            OpInstance::Join(..) => {
                let (a, b) = (self.rel(&args[0], env)?, self.rel(&args[1], env)?);
                if a.arity + b.arity <= 2 {
                    return Err(ill());
                }
                let mut out = RelValue::empty(n, a.arity + b.arity - 2);
                let bt = b.tuples(n);
                for x in a.tuples(n) {
                    let (last, init) = x.split_last().expect("non-empty tuple");
                    for y in bt.iter().filter(|y| y[0] == *last) {
                        let mut t = init.to_vec();
                        t.extend_from_slice(&y[1..]);
                        out.insert(index(n, &t));
                    }
                }
                Value::Rel(out)
            }
            OpInstance::TransClos | OpInstance::ReflTransClos => {
                let r = self.rel(&args[0], env)?;
                if r.arity != 2 {
                    return Err(ill());
                }
                let mut c = transitive_closure(n, &r);
                if op == OpInstance::ReflTransClos {
                    for a in 0..n {
                        c.insert(index(n, &[a, a]));
                    }
                }
                Value::Rel(c)
            }
            OpInstance::None(k) => Value::Rel(RelValue::empty(n, k)),
            OpInstance::Sing => unreachable!("handled with the other built-ins"),
            OpInstance::Subset(_)
            | OpInstance::Ext(_)
            | OpInstance::Some(_)
            | OpInstance::No(_)
            | OpInstance::Lone(_)
            | OpInstance::One(_) => return Err(ill()),
        })
    }

    fn formula(&self, f: &Formula, env: &mut Env) -> Result<bool, InterpError> {
        let n = self.n;
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Not(a) => Ok(!self.formula(a, env)?),
            Formula::And(xs) => {
                for x in xs {
                    if !self.formula(x, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Or(xs) => {
                for x in xs {
                    if self.formula(x, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Implies(a, b) => Ok(!self.formula(a, env)? || self.formula(b, env)?),
            Formula::Iff(a, b) => Ok(self.formula(a, env)? == self.formula(b, env)?),
            Formula::Eq(a, b) => Ok(self.term(a, env)? == self.term(b, env)?),
            Formula::Forall(vs, body) | Formula::Exists(vs, body) => {
                let universal = matches!(f, Formula::Forall(..));
                let domains = vs.iter().map(|(_, s)| self.domain(*s)).collect::<Result<Vec<_>, _>>()?;
                let mark = env.len();
                let r = self.quantify(universal, vs, &domains, 0, body, env);
                env.truncate(mark);
                r
            }
            Formula::Pred(p, args) => {
                match p.as_str() {
                    "in" => {
                        let t = self.term(&args[0], env)?;
                        let r = self.rel(&args[1], env)?;
                        let atoms = Self::atoms_of(&t).ok_or_else(|| InterpError::IllSorted("in".into()))?;
                        return Ok(r.contains(n, &atoms));
                    }
                    "<" | "<=" | ">" | ">=" => {
                        let (a, b) = (self.int(&args[0], env)?, self.int(&args[1], env)?);
                        return Ok(match p.as_str() {
                            "<" => a < b,
                            "<=" => a <= b,
                            ">" => a > b,
                            _ => a >= b,
                        });
                    }
                    _ => {}
                }
                if let Some(def) = self.defs.get(p) {
                    let Definition::Pred(params, body) = def else {
                        return Err(InterpError::IllSorted(p.clone()));
                    };
                    let vals = args.iter().map(|a| self.term(a, env)).collect::<Result<Vec<_>, _>>()?;
                    let mut inner: Env = params.iter().cloned().zip(vals).collect();
                    return self.formula(body, &mut inner);
                }
                let op = OpInstance::parse(p).ok_or_else(|| InterpError::Unknown(p.clone()))?;
                match op {
                    OpInstance::Subset(_) => {
                        let (a, b) = (self.rel(&args[0], env)?, self.rel(&args[1], env)?);
                        Ok(a.is_subset(&b))
                    }
                    OpInstance::Some(_) => Ok(!self.rel(&args[0], env)?.is_empty()),
                    OpInstance::No(_) => Ok(self.rel(&args[0], env)?.is_empty()),
                    OpInstance::Lone(_) => Ok(self.rel(&args[0], env)?.len() <= 1),
                    OpInstance::One(_) => Ok(self.rel(&args[0], env)?.len() == 1),
                    _ => Err(InterpError::IllSorted(p.clone())),
                }
            }
        }
    }

    fn quantify(
        &self,
        universal: bool,
        vs: &[(String, FSort)],
        domains: &[Vec<Value>],
        i: usize,
        body: &Formula,
        env: &mut Env,
    ) -> Result<bool, InterpError> {
        if i == vs.len() {
            return self.formula(body, env);
        }
        for v in &domains[i] {
            env.push((vs[i].0.clone(), v.clone()));
            let r = self.quantify(universal, vs, domains, i + 1, body, env);
            env.pop();
            if r? != universal {
                return Ok(!universal);
            }
        }
        Ok(universal)
    }
}

/// Least transitive closure of a binary relation (Warshall).
pub fn transitive_closure(n: u32, r: &RelValue) -> RelValue {
    let n = n as usize;
    let mut m = vec![vec![false; n]; n];
    for t in r.tuples(n as u32) {
        m[t[0] as usize][t[1] as usize] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out = RelValue::empty(n as u32, 2);
    for (i, row) in m.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            if b {
                out.insert(i * n + j);
            }
        }
    }
    out
}
