//! SMT scripts: ordered declarations and assertions with one check.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::term::{render_symbol, write_sorted_params, write_term, Sort, Term};

/// Target logic of a script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Logic {
    /// Quantified bitvectors with uninterpreted functions (bounded).
    Bounded,
    /// Free sorts, uninterpreted functions, arrays and linear integer
    /// arithmetic (unbounded).
    Unbounded,
}

impl Logic {
    pub fn tag(self) -> &'static str {
        match self {
            Logic::Bounded => "UFBV",
            Logic::Unbounded => "AUFLIA",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Logic> {
        match tag {
            "UFBV" => Some(Logic::Bounded),
            "AUFLIA" => Some(Logic::Unbounded),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Item {
    /// A single-line comment.
    Comment(String),
    DeclareSort(String),
    DeclareFun { name: String, args: Vec<Sort>, ret: Sort },
    DefineFun { name: String, params: Vec<(String, Sort)>, ret: Sort, body: Term },
    Assert(Term),
    CheckSat,
    GetModel,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmtScript {
    pub logic: Logic,
    pub items: Vec<Item>,
}

impl SmtScript {
    pub fn new(logic: Logic) -> Self {
        SmtScript { logic, items: Vec::new() }
    }

    pub fn comment(&mut self, text: impl Into<String>) {
        // Comments are single-line by construction.
        let text: String = text.into().replace(['\n', '\r'], " ");
        self.items.push(Item::Comment(text));
    }

    pub fn push(&mut self, item: Item) {
        self.items.push(item);
    }

    pub fn assert(&mut self, t: Term) {
        if t != Term::Bool(true) {
            self.items.push(Item::Assert(t));
        }
    }

    /// Appends the check directive and the model request.
    pub fn finish(&mut self) {
        self.items.push(Item::CheckSat);
        self.items.push(Item::GetModel);
    }

    pub fn assertions(&self) -> impl Iterator<Item = &Term> {
        self.items.iter().filter_map(|i| match i {
            Item::Assert(t) => Some(t),
            _ => None,
        })
    }

    pub fn declared_sorts(&self) -> Vec<&str> {
        self.items
            .iter()
            .filter_map(|i| match i {
                Item::DeclareSort(s) => Some(s.as_str()),
                _ => None,
            })
            .collect()
    }

    /// Checks that every symbol is declared before use, and that there is
    /// exactly one check directive.
    pub fn validate(&self) -> Result<(), String> {
        let mut sorts: BTreeSet<&str> = BTreeSet::new();
        let mut funs: BTreeSet<&str> = BTreeSet::new();
        let mut checks = 0;
        let check_sort = |s: &Sort, sorts: &BTreeSet<&str>| match s {
            Sort::Named(n) if !sorts.contains(n.as_str()) => Err(format!("sort `{n}` used before declaration")),
            _ => Ok(()),
        };
        for item in &self.items {
            match item {
                Item::Comment(_) | Item::GetModel => {}
                Item::CheckSat => checks += 1,
                Item::DeclareSort(s) => {
                    sorts.insert(s);
                }
                Item::DeclareFun { name, args, ret } => {
                    for s in args.iter().chain([ret]) {
                        check_sort(s, &sorts)?;
                    }
                    if !funs.insert(name) {
                        return Err(format!("`{name}` declared twice"));
                    }
                }
                Item::DefineFun { name, params, ret, body } => {
                    for (_, s) in params {
                        check_sort(s, &sorts)?;
                    }
                    check_sort(ret, &sorts)?;
                    let bound: BTreeSet<&str> = params.iter().map(|(p, _)| p.as_str()).collect();
                    check_symbols(body, &funs, &bound)?;
                    if !funs.insert(name) {
                        return Err(format!("`{name}` declared twice"));
                    }
                }
                Item::Assert(t) => check_symbols(t, &funs, &BTreeSet::new())?,
            }
        }
        if checks != 1 {
            return Err(format!("expected exactly one check-sat, found {checks}"));
        }
        Ok(())
    }
}

const BUILTINS: &[&str] = &[
    "bvult", "bvule", "bvugt", "bvuge", "bvslt", "bvsle", "bvsgt", "bvsge", "bvadd", "bvsub", "bvneg", "+", "-", "<",
    "<=", ">", ">=", "distinct", "xor",
];

fn check_symbols(t: &Term, funs: &BTreeSet<&str>, bound: &BTreeSet<&str>) -> Result<(), String> {
    match t {
        Term::Bool(_) | Term::BvLit { .. } | Term::IntLit(_) => Ok(()),
        Term::Sym(s) => {
            if bound.contains(s.as_str()) || funs.contains(s.as_str()) {
                Ok(())
            } else {
                Err(format!("`{s}` used before declaration"))
            }
        }
        Term::App(f, args) => {
            if !funs.contains(f.as_str()) && !BUILTINS.contains(&f.as_str()) {
                return Err(format!("`{f}` used before declaration"));
            }
            args.iter().try_for_each(|a| check_symbols(a, funs, bound))
        }
        Term::And(xs) | Term::Or(xs) => xs.iter().try_for_each(|a| check_symbols(a, funs, bound)),
        Term::Not(a) => check_symbols(a, funs, bound),
        Term::Implies(a, b) | Term::Eq(a, b) => {
            check_symbols(a, funs, bound)?;
            check_symbols(b, funs, bound)
        }
        Term::Ite(a, b, c) => {
            check_symbols(a, funs, bound)?;
            check_symbols(b, funs, bound)?;
            check_symbols(c, funs, bound)
        }
        Term::Forall(vs, body) | Term::Exists(vs, body) => {
            let mut inner = bound.clone();
            inner.extend(vs.iter().map(|(v, _)| v.as_str()));
            check_symbols(body, funs, &inner)
        }
    }
}

/// Renders a script as SMT-LIB v2 text. Output is a pure function of the
/// script, so identical scripts give byte-identical files.
pub fn serialize(script: &SmtScript) -> String {
    let mut out = String::new();
    out.push_str("(set-option :produce-models true)\n");
    let _ = writeln!(out, "(set-logic {})", script.logic.tag());
    for item in &script.items {
        match item {
            Item::Comment(c) => {
                let _ = writeln!(out, "; {c}");
            }
            Item::DeclareSort(s) => {
                let _ = writeln!(out, "(declare-sort {} 0)", render_symbol(s));
            }
            Item::DeclareFun { name, args, ret } => {
                let args: Vec<String> = args.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "(declare-fun {} ({}) {ret})", render_symbol(name), args.join(" "));
            }
            Item::DefineFun { name, params, ret, body } => {
                let _ = write!(out, "(define-fun {} ", render_symbol(name));
                write_sorted_params(&mut out, params);
                let _ = write!(out, " {ret} ");
                write_term(&mut out, body);
                out.push_str(")\n");
            }
            Item::Assert(t) => {
                out.push_str("(assert ");
                write_term(&mut out, t);
                out.push_str(")\n");
            }
            Item::CheckSat => out.push_str("(check-sat)\n"),
            Item::GetModel => out.push_str("(get-model)\n"),
        }
    }
    out
}
