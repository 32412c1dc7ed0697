//! Abstract SMT terms and their SMT-LIB v2 rendering.

use std::fmt::{self, Write};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    Int,
    BitVec(u32),
    /// An uninterpreted sort introduced by `declare-sort`.
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Bool(bool),
    BvLit { value: u64, width: u32 },
    IntLit(i64),
    /// A constant, a bound variable or a 0-ary function.
    Sym(String),
    /// Application of a declared or built-in function.
    App(String, Vec<Term>),
    Not(Box<Term>),
    And(Vec<Term>),
    Or(Vec<Term>),
    Implies(Box<Term>, Box<Term>),
    /// Equality; on booleans this is equivalence.
    Eq(Box<Term>, Box<Term>),
    Ite(Box<Term>, Box<Term>, Box<Term>),
    Forall(Vec<(String, Sort)>, Box<Term>),
    Exists(Vec<(String, Sort)>, Box<Term>),
}

pub fn sym(s: impl Into<String>) -> Term {
    Term::Sym(s.into())
}

pub fn app(f: impl Into<String>, args: Vec<Term>) -> Term {
    if args.is_empty() {
        Term::Sym(f.into())
    } else {
        Term::App(f.into(), args)
    }
}

pub fn bv(value: u64, width: u32) -> Term {
    let mask = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
    Term::BvLit {
        value: value & mask,
        width,
    }
}

// Smart constructors fold boolean constants so that trivially empty
// relations disappear from the emitted script.

pub fn not(t: Term) -> Term {
    match t {
        Term::Bool(b) => Term::Bool(!b),
        Term::Not(inner) => *inner,
        other => Term::Not(Box::new(other)),
    }
}

pub fn and(ts: Vec<Term>) -> Term {
    let mut out = Vec::new();
    for t in ts {
        match t {
            Term::Bool(true) => {}
            Term::Bool(false) => return Term::Bool(false),
            Term::And(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Term::Bool(true),
        1 => out.pop().unwrap(),
        _ => Term::And(out),
    }
}

pub fn or(ts: Vec<Term>) -> Term {
    let mut out = Vec::new();
    for t in ts {
        match t {
            Term::Bool(false) => {}
            Term::Bool(true) => return Term::Bool(true),
            Term::Or(inner) => out.extend(inner),
            other => out.push(other),
        }
    }
    match out.len() {
        0 => Term::Bool(false),
        1 => out.pop().unwrap(),
        _ => Term::Or(out),
    }
}

pub fn implies(a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::Bool(false), _) | (_, Term::Bool(true)) => Term::Bool(true),
        (Term::Bool(true), b) => b,
        (a, Term::Bool(false)) => not(a),
        (a, b) => Term::Implies(Box::new(a), Box::new(b)),
    }
}

pub fn iff(a: Term, b: Term) -> Term {
    match (a, b) {
        (Term::Bool(true), b) | (b, Term::Bool(true)) => b,
        (Term::Bool(false), b) | (b, Term::Bool(false)) => not(b),
        (a, b) if a == b => Term::Bool(true),
        (a, b) => Term::Eq(Box::new(a), Box::new(b)),
    }
}

pub fn eq(a: Term, b: Term) -> Term {
    if a == b {
        return Term::Bool(true);
    }
    if let (Term::BvLit { .. }, Term::BvLit { .. }) | (Term::IntLit(_), Term::IntLit(_)) = (&a, &b) {
        return Term::Bool(false);
    }
    Term::Eq(Box::new(a), Box::new(b))
}

pub fn ite(c: Term, t: Term, e: Term) -> Term {
    match c {
        Term::Bool(true) => t,
        Term::Bool(false) => e,
        c => Term::Ite(Box::new(c), Box::new(t), Box::new(e)),
    }
}

fn occurs(t: &Term, name: &str) -> bool {
    match t {
        Term::Sym(s) => s == name,
        Term::Bool(_) | Term::BvLit { .. } | Term::IntLit(_) => false,
        Term::App(_, args) | Term::And(args) | Term::Or(args) => args.iter().any(|a| occurs(a, name)),
        Term::Not(a) => occurs(a, name),
        Term::Implies(a, b) | Term::Eq(a, b) => occurs(a, name) || occurs(b, name),
        Term::Ite(a, b, c) => occurs(a, name) || occurs(b, name) || occurs(c, name),
        Term::Forall(vs, b) | Term::Exists(vs, b) => !vs.iter().any(|(v, _)| v == name) && occurs(b, name),
    }
}

fn prune(vars: Vec<(String, Sort)>, body: &Term) -> Vec<(String, Sort)> {
    vars.into_iter().filter(|(v, _)| occurs(body, v)).collect()
}

/// Universal quantification; variables the body does not mention are
/// dropped (every sort is non-empty).
pub fn forall(vars: Vec<(String, Sort)>, body: Term) -> Term {
    if let Term::Bool(_) = body {
        return body;
    }
    let vars = prune(vars, &body);
    if vars.is_empty() {
        body
    } else {
        Term::Forall(vars, Box::new(body))
    }
}

pub fn exists(vars: Vec<(String, Sort)>, body: Term) -> Term {
    if let Term::Bool(_) = body {
        return body;
    }
    let vars = prune(vars, &body);
    if vars.is_empty() {
        body
    } else {
        Term::Exists(vars, Box::new(body))
    }
}

/// True if `s` can be written without `|...|` quoting.
pub fn is_simple_symbol(s: &str) -> bool {
    const EXTRA: &str = "~!@$%^&*_-+=<>.?/";
    !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || EXTRA.contains(c))
}

/// Renders a symbol, quoting it when necessary (e.g. `|b'|`).
pub fn render_symbol(s: &str) -> String {
    if is_simple_symbol(s) {
        s.to_string()
    } else {
        format!("|{s}|")
    }
}

/// Renders a reader atom: literals and keywords verbatim, symbols quoted
/// when necessary.
pub fn render_symbol_or_literal(a: &str) -> String {
    let literal = a.starts_with('#')
        || a.starts_with('"')
        || a.starts_with(':')
        || (!a.is_empty() && a.chars().all(|c| c.is_ascii_digit()));
    if literal {
        a.to_string()
    } else {
        render_symbol(a)
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => f.write_str("Bool"),
            Sort::Int => f.write_str("Int"),
            Sort::BitVec(w) => write!(f, "(_ BitVec {w})"),
            Sort::Named(n) => f.write_str(&render_symbol(n)),
        }
    }
}

fn write_bindings(out: &mut String, vars: &[(String, Sort)]) {
    out.push('(');
    for (i, (v, s)) in vars.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "({} {s})", render_symbol(v));
    }
    out.push(')');
}

pub fn write_term(out: &mut String, t: &Term) {
    let list = |out: &mut String, head: &str, args: &[&Term]| {
        out.push('(');
        out.push_str(head);
        for a in args {
            out.push(' ');
            write_term(out, a);
        }
        out.push(')');
    };
    match t {
        Term::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Term::BvLit { value, width } => {
            out.push_str("#b");
            for i in (0..*width).rev() {
                out.push(if value >> i & 1 == 1 { '1' } else { '0' });
            }
        }
        Term::IntLit(n) if *n < 0 => {
            let _ = write!(out, "(- {})", n.unsigned_abs());
        }
        Term::IntLit(n) => {
            let _ = write!(out, "{n}");
        }
        Term::Sym(s) => out.push_str(&render_symbol(s)),
        Term::App(f, args) => list(out, &render_symbol(f), &args.iter().collect::<Vec<_>>()),
        Term::Not(a) => list(out, "not", &[a]),
        Term::And(xs) => list(out, "and", &xs.iter().collect::<Vec<_>>()),
        Term::Or(xs) => list(out, "or", &xs.iter().collect::<Vec<_>>()),
        Term::Implies(a, b) => list(out, "=>", &[a, b]),
        Term::Eq(a, b) => list(out, "=", &[a, b]),
        Term::Ite(c, a, b) => list(out, "ite", &[c, a, b]),
        Term::Forall(vs, body) | Term::Exists(vs, body) => {
            out.push_str(if matches!(t, Term::Forall(..)) { "(forall " } else { "(exists " });
            write_bindings(out, vs);
            out.push(' ');
            write_term(out, body);
            out.push(')');
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self);
        f.write_str(&s)
    }
}

pub(crate) fn write_sorted_params(out: &mut String, params: &[(String, Sort)]) {
    write_bindings(out, params);
}
