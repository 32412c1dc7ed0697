//! Typed first-order terms and formulas of the relational theory, and
//! their plain-text rendering.

use std::collections::BTreeSet;
use std::fmt::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FSort {
    Tuple,
    Relation,
    /// Tuples of arity 1.
    Atom,
    /// Tuples of arity k >= 2.
    TupleK(usize),
    /// Relations of arity k >= 1.
    Rel(usize),
    Int,
}

impl FSort {
    /// Sort of tuples of arity k.
    pub fn tuple(k: usize) -> FSort {
        if k == 1 {
            FSort::Atom
        } else {
            FSort::TupleK(k)
        }
    }

    pub fn name(self) -> String {
        match self {
            FSort::Tuple => "Tuple".into(),
            FSort::Relation => "Relation".into(),
            FSort::Atom => "Atom".into(),
            FSort::TupleK(k) => format!("Tuple{k}"),
            FSort::Rel(k) => format!("Rel{k}"),
            FSort::Int => "int".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FTerm {
    Var(String),
    /// Function application; constants have no arguments. The arithmetic
    /// functions `+` and `-` are built in.
    Fn(String, Vec<FTerm>),
    Int(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// Predicate application; `<`, `<=`, `>`, `>=` are built in.
    Pred(String, Vec<FTerm>),
    Eq(FTerm, FTerm),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Vec<(String, FSort)>, Box<Formula>),
    Exists(Vec<(String, FSort)>, Box<Formula>),
}

pub fn var(v: &str) -> FTerm {
    FTerm::Var(v.to_string())
}

pub fn func(f: &str, args: Vec<FTerm>) -> FTerm {
    FTerm::Fn(f.to_string(), args)
}

pub fn konst(c: &str) -> FTerm {
    FTerm::Fn(c.to_string(), vec![])
}

pub fn pred(p: &str, args: Vec<FTerm>) -> Formula {
    Formula::Pred(p.to_string(), args)
}

/// The tuple of the given atom terms (the atom itself for arity 1).
pub fn tuple(atoms: Vec<FTerm>) -> FTerm {
    if atoms.len() == 1 {
        atoms.into_iter().next().unwrap()
    } else {
        let name = constructor_name(atoms.len());
        FTerm::Fn(name, atoms)
    }
}

/// Name of the tuple constructor of arity k >= 2.
pub fn constructor_name(k: usize) -> String {
    match k {
        2 => "binary".into(),
        3 => "ternary".into(),
        k => format!("tuple{k}"),
    }
}

/// `in(t, r)`.
pub fn mem(t: FTerm, r: FTerm) -> Formula {
    Formula::Pred("in".into(), vec![t, r])
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    Formula::Iff(Box::new(a), Box::new(b))
}

pub fn forall(vars: Vec<(String, FSort)>, body: Formula) -> Formula {
    if vars.is_empty() {
        body
    } else {
        Formula::Forall(vars, Box::new(body))
    }
}

pub fn exists(vars: Vec<(String, FSort)>, body: Formula) -> Formula {
    if vars.is_empty() {
        body
    } else {
        Formula::Exists(vars, Box::new(body))
    }
}

/// Variables `base1..basek` of sort Atom.
pub fn atom_vars(base: &str, k: usize) -> Vec<(String, FSort)> {
    (1..=k).map(|i| (format!("{base}{i}"), FSort::Atom)).collect()
}

pub fn terms_of(vars: &[(String, FSort)]) -> Vec<FTerm> {
    vars.iter().map(|(v, _)| var(v)).collect()
}

impl FTerm {
    pub fn symbols_into(&self, out: &mut BTreeSet<(String, usize)>) {
        match self {
            FTerm::Var(_) | FTerm::Int(_) => {}
            FTerm::Fn(f, args) => {
                out.insert((f.clone(), args.len()));
                for a in args {
                    a.symbols_into(out);
                }
            }
        }
    }

    fn free_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            FTerm::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            FTerm::Fn(_, args) => args.iter().for_each(|a| a.free_into(bound, out)),
            FTerm::Int(_) => {}
        }
    }
}

impl Formula {
    /// Function and predicate symbols with their argument counts.
    pub fn symbols(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.symbols_into(&mut out);
        out
    }

    pub fn symbols_into(&self, out: &mut BTreeSet<(String, usize)>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Pred(p, args) => {
                out.insert((p.clone(), args.len()));
                args.iter().for_each(|a| a.symbols_into(out));
            }
            Formula::Eq(a, b) => {
                a.symbols_into(out);
                b.symbols_into(out);
            }
            Formula::Not(a) => a.symbols_into(out),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.symbols_into(out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.symbols_into(out);
                b.symbols_into(out);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.symbols_into(out),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.free_into(&mut Vec::new(), &mut out);
        out
    }

    fn free_into(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Pred(_, args) => args.iter().for_each(|a| a.free_into(bound, out)),
            Formula::Eq(a, b) => {
                a.free_into(bound, out);
                b.free_into(bound, out);
            }
            Formula::Not(a) => a.free_into(bound, out),
            Formula::And(xs) | Formula::Or(xs) => xs.iter().for_each(|x| x.free_into(bound, out)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.free_into(bound, out);
                b.free_into(bound, out);
            }
            Formula::Forall(vs, b) | Formula::Exists(vs, b) => {
                let n = bound.len();
                bound.extend(vs.iter().map(|(v, _)| v.clone()));
                b.free_into(bound, out);
                bound.truncate(n);
            }
        }
    }

    /// Number of nodes, counting terms.
    pub fn size(&self) -> usize {
        fn tsize(t: &FTerm) -> usize {
            match t {
                FTerm::Fn(_, args) => 1 + args.iter().map(tsize).sum::<usize>(),
                _ => 1,
            }
        }
        match self {
            Formula::True | Formula::False => 1,
            Formula::Pred(_, args) => 1 + args.iter().map(tsize).sum::<usize>(),
            Formula::Eq(a, b) => 1 + tsize(a) + tsize(b),
            Formula::Not(a) => 1 + a.size(),
            Formula::And(xs) | Formula::Or(xs) => 1 + xs.iter().map(Formula::size).sum::<usize>(),
            Formula::Implies(a, b) | Formula::Iff(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, b) | Formula::Exists(_, b) => 1 + b.size(),
        }
    }
}

// ----- rendering ----------------------------------------------------------

fn is_infix(f: &str) -> bool {
    matches!(f, "+" | "-" | "<" | "<=" | ">" | ">=")
}

pub fn write_fterm(out: &mut String, t: &FTerm) {
    match t {
        FTerm::Var(v) => out.push_str(v),
        FTerm::Int(n) => {
            let _ = write!(out, "{n}");
        }
        FTerm::Fn(f, args) if is_infix(f) && args.len() == 2 => {
            out.push('(');
            write_fterm(out, &args[0]);
            let _ = write!(out, " {f} ");
            write_fterm(out, &args[1]);
            out.push(')');
        }
        FTerm::Fn(f, args) => {
            out.push_str(f);
            if !args.is_empty() {
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_fterm(out, a);
                }
                out.push(')');
            }
        }
    }
}

fn write_binders(out: &mut String, q: &str, vs: &[(String, FSort)]) {
    for (v, s) in vs {
        let _ = write!(out, "{q} {} {v}; ", s.name());
    }
}

/// Renders a formula with full parenthesization of binary connectives.
pub fn write_formula(out: &mut String, f: &Formula) {
    let join = |out: &mut String, xs: &[Formula], op: &str, empty: &str| {
        if xs.is_empty() {
            out.push_str(empty);
            return;
        }
        out.push('(');
        for (i, x) in xs.iter().enumerate() {
            if i > 0 {
                let _ = write!(out, " {op} ");
            }
            write_formula(out, x);
        }
        out.push(')');
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Pred(p, args) if is_infix(p) && args.len() == 2 => {
            out.push('(');
            write_fterm(out, &args[0]);
            let _ = write!(out, " {p} ");
            write_fterm(out, &args[1]);
            out.push(')');
        }
        Formula::Pred(p, args) => write_fterm(out, &FTerm::Fn(p.clone(), args.clone())),
        Formula::Eq(a, b) => {
            out.push('(');
            write_fterm(out, a);
            out.push_str(" = ");
            write_fterm(out, b);
            out.push(')');
        }
        Formula::Not(a) => {
            out.push('!');
            write_formula(out, a);
        }
        Formula::And(xs) => join(out, xs, "&", "true"),
        Formula::Or(xs) => join(out, xs, "|", "false"),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            out.push('(');
            write_formula(out, a);
            out.push_str(if matches!(f, Formula::Implies(..)) { " -> " } else { " <-> " });
            write_formula(out, b);
            out.push(')');
        }
        Formula::Forall(vs, b) | Formula::Exists(vs, b) => {
            out.push('(');
            write_binders(out, if matches!(f, Formula::Forall(..)) { "\\forall" } else { "\\exists" }, vs);
            write_formula(out, b);
            out.push(')');
        }
    }
}

impl fmt::Display for FTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_fterm(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self);
        f.write_str(&s)
    }
}
