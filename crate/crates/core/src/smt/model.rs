//! Solver models: parsing definitions and evaluating them into tables.
//!
//! A model is kept as the symbolic definitions the solver printed, and
//! every lookup evaluates those definitions directly. Anything the
//! interpreter does not understand is reported as a [`DecodeError`]
//! rather than guessed.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::reader::{read_bv_literal, read_sort};
use super::sexpr::{parse_sexps, SExp};
use super::term::Sort;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot decode model: {message} in `{fragment}`")]
pub struct DecodeError {
    pub message: String,
    pub fragment: String,
}

fn derr<T>(message: impl Into<String>, fragment: &SExp) -> Result<T, DecodeError> {
    let mut fragment = fragment.to_string();
    if fragment.len() > 200 {
        let mut cut = 200;
        while !fragment.is_char_boundary(cut) {
            cut -= 1;
        }
        fragment.truncate(cut);
        fragment.push_str(" ...");
    }
    Err(DecodeError {
        message: message.into(),
        fragment,
    })
}

/// A value in a solver model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MValue {
    Bool(bool),
    Bv { value: u64, width: u32 },
    Int(i64),
    /// An element of an uninterpreted sort, e.g. `Book!val!0`.
    Elem(String),
}

impl MValue {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            MValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_bv(&self) -> Option<u64> {
        match self {
            MValue::Bv { value, .. } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunDef {
    pub params: Vec<(String, Sort)>,
    pub body: SExp,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RawModel {
    pub defs: BTreeMap<String, FunDef>,
    /// Elements the solver introduced for each uninterpreted sort.
    pub universes: BTreeMap<String, Vec<String>>,
    /// Sorts whose universe the solver bounded by a cardinality constraint.
    pub finite_sorts: BTreeSet<String>,
}

/// Parses the model part of a solver transcript (the output of
/// `get-model`). Both SMT-LIB v2 `define-fun` forms and the older
/// `define` forms with `bvN[w]` literals are accepted.
pub fn parse_model(text: &str) -> Result<RawModel, DecodeError> {
    let sexps = parse_sexps(text).map_err(|m| DecodeError {
        message: m,
        fragment: text.chars().take(200).collect(),
    })?;
    let mut items = Vec::new();
    for e in sexps {
        match e {
            SExp::List(xs) if xs.first().is_some_and(|h| h.list().is_some()) || xs.is_empty() => items.extend(xs),
            SExp::List(xs) if xs.first().and_then(SExp::atom) == Some("model") => items.extend(xs.into_iter().skip(1)),
            other => items.push(other),
        }
    }
    let mut m = RawModel::default();
    for item in &items {
        let xs = match item.list() {
            Some(xs) if !xs.is_empty() => xs,
            _ => return derr("unexpected model item", item),
        };
        match (xs[0].atom(), &xs[1..]) {
            (Some("define-fun"), [SExp::Atom(name), SExp::List(params), _ret, body]) => {
                let params = params
                    .iter()
                    .map(|p| match p.list() {
                        Some([SExp::Atom(v), s]) => Ok((v.clone(), read_sort(s).unwrap_or(Sort::Bool))),
                        _ => derr("malformed parameter", p),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                m.defs.insert(
                    name.clone(),
                    FunDef {
                        params,
                        body: body.clone(),
                    },
                );
            }
            (Some("declare-fun"), [SExp::Atom(name), SExp::List(args), SExp::Atom(sort)]) if args.is_empty() => {
                m.universes.entry(sort.clone()).or_default().push(name.clone());
            }
            (Some("forall"), [SExp::List(vars), body]) => {
                // Cardinality constraint: (forall ((x S)) (or (= x e1) ...)).
                if let [v] = vars.as_slice() {
                    if let Some([SExp::Atom(_), SExp::Atom(sort)]) = v.list() {
                        if body.is_app("or") || body.is_app("=") {
                            m.finite_sorts.insert(sort.clone());
                            continue;
                        }
                    }
                }
                return derr("unsupported quantified model item", item);
            }
            (Some("define"), [SExp::Atom(name), value]) => {
                m.defs.insert(
                    name.clone(),
                    FunDef {
                        params: Vec::new(),
                        body: value.clone(),
                    },
                );
            }
            (Some("define"), [SExp::List(sig), body]) => {
                let Some((SExp::Atom(name), params)) = sig.split_first() else {
                    return derr("malformed definition", item);
                };
                let params = params
                    .iter()
                    .map(|p| match p.list() {
                        Some([SExp::Atom(v), s]) => Ok((v.clone(), old_sort(s))),
                        _ => derr("malformed parameter", p),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                m.defs.insert(
                    name.clone(),
                    FunDef {
                        params,
                        body: body.clone(),
                    },
                );
            }
            _ => return derr("unsupported model item", item),
        }
    }
    Ok(m)
}

/// Sorts of the older notation: `(bv 5)` or `BitVec[5]`.
fn old_sort(s: &SExp) -> Sort {
    match s {
        SExp::List(xs) => match xs.as_slice() {
            [SExp::Atom(b), SExp::Atom(w)] if b == "bv" => w.parse().map(Sort::BitVec).unwrap_or(Sort::Bool),
            _ => read_sort(s).unwrap_or(Sort::Bool),
        },
        SExp::Atom(a) => a
            .strip_prefix("BitVec[")
            .and_then(|r| r.strip_suffix(']'))
            .and_then(|w| w.parse().ok())
            .map(Sort::BitVec)
            .unwrap_or_else(|| read_sort(s).unwrap_or(Sort::Bool)),
    }
}

const MAX_DEPTH: usize = 256;

impl RawModel {
    pub fn has(&self, name: &str) -> bool {
        self.defs.contains_key(name)
    }

    /// Value of a symbol applied to arguments (no arguments for constants).
    pub fn apply(&self, name: &str, args: &[MValue]) -> Result<MValue, DecodeError> {
        let Some(def) = self.defs.get(name) else {
            return derr("symbol not defined by the model", &SExp::Atom(name.to_string()));
        };
        if def.params.len() != args.len() {
            return derr(
                format!("`{name}` takes {} arguments, {} given", def.params.len(), args.len()),
                &def.body,
            );
        }
        let env: Vec<(String, MValue)> = def.params.iter().map(|(p, _)| p.clone()).zip(args.iter().cloned()).collect();
        self.eval(&def.body, &env, 0)
    }

    /// Tabulates a function over the product of the given argument domains.
    pub fn table(&self, name: &str, domains: &[Vec<MValue>]) -> Result<BTreeMap<Vec<MValue>, MValue>, DecodeError> {
        let mut out = BTreeMap::new();
        let mut idx = vec![0usize; domains.len()];
        if domains.iter().any(Vec::is_empty) {
            return Ok(out);
        }
        loop {
            let args: Vec<MValue> = idx.iter().zip(domains).map(|(&i, d)| d[i].clone()).collect();
            let v = self.apply(name, &args)?;
            out.insert(args, v);
            let mut k = domains.len();
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < domains[k].len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    fn is_element(&self, name: &str) -> bool {
        self.universes.values().any(|u| u.iter().any(|e| e == name)) || name.contains("!val!")
    }

    /// Evaluates a definition body under parameter bindings.
    pub fn eval(&self, e: &SExp, env: &[(String, MValue)], depth: usize) -> Result<MValue, DecodeError> {
        if depth > MAX_DEPTH {
            return derr("definition nesting too deep", e);
        }
        if let Some((value, width)) = read_bv_literal(e) {
            return Ok(MValue::Bv { value, width });
        }
        match e {
            SExp::Atom(a) => {
                if let Some((_, v)) = env.iter().rev().find(|(n, _)| n == a) {
                    return Ok(v.clone());
                }
                match a.as_str() {
                    "true" => return Ok(MValue::Bool(true)),
                    "false" => return Ok(MValue::Bool(false)),
                    _ => {}
                }
                if a.chars().all(|c| c.is_ascii_digit()) && !a.is_empty() {
                    return a.parse().map(MValue::Int).or_else(|_| derr("numeral out of range", e));
                }
                if let Some(def) = self.defs.get(a) {
                    if def.params.is_empty() {
                        return self.eval(&def.body, &[], depth + 1);
                    }
                }
                if self.is_element(a) {
                    return Ok(MValue::Elem(a.clone()));
                }
                derr("unknown symbol", e)
            }
            SExp::List(xs) => {
                let Some((head, args)) = xs.split_first() else {
                    return derr("empty application", e);
                };
                if let Some(h) = head.list() {
                    return self.eval_indexed(h, args, e, env, depth);
                }
                let head = head.atom().unwrap_or_default();
                let ev = |x: &SExp| self.eval(x, env, depth + 1);
                let evb = |x: &SExp| -> Result<bool, DecodeError> {
                    match ev(x)? {
                        MValue::Bool(b) => Ok(b),
                        _ => derr("expected a boolean", x),
                    }
                };
                match (head, args) {
                    ("ite" | "if", [c, t, f]) => {
                        if evb(c)? {
                            ev(t)
                        } else {
                            ev(f)
                        }
                    }
                    ("and", _) => {
                        for a in args {
                            if !evb(a)? {
                                return Ok(MValue::Bool(false));
                            }
                        }
                        Ok(MValue::Bool(true))
                    }
                    ("or", _) => {
                        for a in args {
                            if evb(a)? {
                                return Ok(MValue::Bool(true));
                            }
                        }
                        Ok(MValue::Bool(false))
                    }
                    ("not", [a]) => Ok(MValue::Bool(!evb(a)?)),
                    ("=>", [a, b]) => Ok(MValue::Bool(!evb(a)? || evb(b)?)),
                    ("xor", [a, b]) => Ok(MValue::Bool(evb(a)? != evb(b)?)),
                    ("=", [a, rest @ ..]) if !rest.is_empty() => {
                        let first = ev(a)?;
                        for r in rest {
                            if ev(r)? != first {
                                return Ok(MValue::Bool(false));
                            }
                        }
                        Ok(MValue::Bool(true))
                    }
                    ("distinct", _) => {
                        let vals = args.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
                        let set: BTreeSet<&MValue> = vals.iter().collect();
                        Ok(MValue::Bool(set.len() == vals.len()))
                    }
                    ("let", [SExp::List(binds), body]) => {
                        let mut inner = env.to_vec();
                        for b in binds {
                            match b.list() {
                                Some([SExp::Atom(v), x]) => {
                                    // Parallel let: bindings see the outer scope.
                                    let val = self.eval(x, env, depth + 1)?;
                                    inner.push((v.clone(), val));
                                }
                                _ => return derr("malformed let binding", b),
                            }
                        }
                        self.eval(body, &inner, depth + 1)
                    }
                    (op, _) if op.starts_with("bv") => {
                        let vals = args.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
                        bv_op(op, &vals).map_or_else(|| derr("unsupported bitvector operation", e), Ok)
                    }
                    ("-" | "+" | "*" | "<" | "<=" | ">" | ">=", _) => {
                        let vals = args.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
                        int_op(head, &vals).map_or_else(|| derr("unsupported integer operation", e), Ok)
                    }
                    (f, _) if self.defs.contains_key(f) => {
                        let vals = args.iter().map(ev).collect::<Result<Vec<_>, _>>()?;
                        let def = &self.defs[f];
                        if def.params.len() != vals.len() {
                            return derr("wrong number of arguments", e);
                        }
                        let inner: Vec<(String, MValue)> =
                            def.params.iter().map(|(p, _)| p.clone()).zip(vals).collect();
                        self.eval(&def.body, &inner, depth + 1)
                    }
                    _ => derr("unsupported construct", e),
                }
            }
        }
    }

    fn eval_indexed(
        &self,
        head: &[SExp],
        args: &[SExp],
        whole: &SExp,
        env: &[(String, MValue)],
        depth: usize,
    ) -> Result<MValue, DecodeError> {
        let vals = args
            .iter()
            .map(|a| self.eval(a, env, depth + 1))
            .collect::<Result<Vec<_>, _>>()?;
        let num = |s: &SExp| s.atom().and_then(|a| a.parse::<u32>().ok());
        match (head, vals.as_slice()) {
            ([SExp::Atom(u), SExp::Atom(op), i, j], [MValue::Bv { value, .. }]) if u == "_" && op == "extract" => {
                let (Some(i), Some(j)) = (num(i), num(j)) else {
                    return derr("malformed extract", whole);
                };
                let w = i - j + 1;
                Ok(MValue::Bv {
                    value: (value >> j) & mask(w),
                    width: w,
                })
            }
            ([SExp::Atom(u), SExp::Atom(op), k], [MValue::Bv { value, width }]) if u == "_" && op == "zero_extend" => {
                let Some(k) = num(k) else {
                    return derr("malformed zero_extend", whole);
                };
                Ok(MValue::Bv {
                    value: *value,
                    width: width + k,
                })
            }
            _ => derr("unsupported indexed operation", whole),
        }
    }
}

fn mask(w: u32) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1u64 << w) - 1
    }
}

fn signed(value: u64, width: u32) -> i64 {
    let v = value & mask(width);
    if width < 64 && v >> (width - 1) & 1 == 1 {
        v as i64 - (1i64 << width)
    } else {
        v as i64
    }
}

fn bv_op(op: &str, vals: &[MValue]) -> Option<MValue> {
    let bvs: Vec<(u64, u32)> = vals
        .iter()
        .map(|v| match v {
            MValue::Bv { value, width } => Some((*value, *width)),
            _ => None,
        })
        .collect::<Option<_>>()?;
    let w = bvs.first()?.1;
    let b = |x: bool| Some(MValue::Bool(x));
    let bvv = |x: u64| {
        Some(MValue::Bv {
            value: x & mask(w),
            width: w,
        })
    };
    match (op, bvs.as_slice()) {
        ("bvult", [(x, _), (y, _)]) => b(x < y),
        ("bvule", [(x, _), (y, _)]) => b(x <= y),
        ("bvugt", [(x, _), (y, _)]) => b(x > y),
        ("bvuge", [(x, _), (y, _)]) => b(x >= y),
        ("bvslt", [(x, _), (y, _)]) => b(signed(*x, w) < signed(*y, w)),
        ("bvsle", [(x, _), (y, _)]) => b(signed(*x, w) <= signed(*y, w)),
        ("bvsgt", [(x, _), (y, _)]) => b(signed(*x, w) > signed(*y, w)),
        ("bvsge", [(x, _), (y, _)]) => b(signed(*x, w) >= signed(*y, w)),
        ("bvadd", [(x, _), (y, _)]) => bvv(x.wrapping_add(*y)),
        ("bvsub", [(x, _), (y, _)]) => bvv(x.wrapping_sub(*y)),
        ("bvmul", [(x, _), (y, _)]) => bvv(x.wrapping_mul(*y)),
        ("bvneg", [(x, _)]) => bvv(x.wrapping_neg()),
        ("bvnot", [(x, _)]) => bvv(!x),
        ("bvand", [(x, _), (y, _)]) => bvv(x & y),
        ("bvor", [(x, _), (y, _)]) => bvv(x | y),
        ("bvxor", [(x, _), (y, _)]) => bvv(x ^ y),
        _ => None,
    }
}

fn int_op(op: &str, vals: &[MValue]) -> Option<MValue> {
    let ns: Vec<i64> = vals
        .iter()
        .map(|v| match v {
            MValue::Int(i) => Some(*i),
            _ => None,
        })
        .collect::<Option<_>>()?;
    let b = |x: bool| Some(MValue::Bool(x));
    match (op, ns.as_slice()) {
        ("-", [x]) => Some(MValue::Int(x.checked_neg()?)),
        ("-", [x, rest @ ..]) => rest.iter().try_fold(*x, |a, y| a.checked_sub(*y)).map(MValue::Int),
        ("+", _) => ns.iter().try_fold(0i64, |a, y| a.checked_add(*y)).map(MValue::Int),
        ("*", _) => ns.iter().try_fold(1i64, |a, y| a.checked_mul(*y)).map(MValue::Int),
        ("<", [x, y]) => b(x < y),
        ("<=", [x, y]) => b(x <= y),
        (">", [x, y]) => b(x > y),
        (">=", [x, y]) => b(x >= y),
        _ => None,
    }
}
