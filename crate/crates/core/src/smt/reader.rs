//! Reads SMT-LIB v2 text back into an [`SmtScript`].
//!
//! Only the subset produced by [`serialize`](super::serialize) is
//! understood; it exists so that serialization can be checked by round
//! trip.

use super::script::{Item, Logic, SmtScript};
use super::sexpr::{parse_toplevel, SExp, TopLevel};
use super::term::{Sort, Term};

pub fn parse_script(text: &str) -> Result<SmtScript, String> {
    let mut logic = None;
    let mut items = Vec::new();
    for top in parse_toplevel(text)? {
        let e = match top {
            TopLevel::Comment(c) => {
                items.push(Item::Comment(c));
                continue;
            }
            TopLevel::Exp(e) => e,
        };
        let xs = e.list().ok_or_else(|| format!("expected a command, found `{e}`"))?;
        let head = xs.first().and_then(SExp::atom).ok_or_else(|| format!("malformed command `{e}`"))?;
        match (head, &xs[1..]) {
            ("set-option", _) => {}
            ("set-logic", [SExp::Atom(l)]) => {
                logic = Some(Logic::from_tag(l).ok_or_else(|| format!("unknown logic `{l}`"))?);
            }
            ("declare-sort", [SExp::Atom(s), SExp::Atom(z)]) if z == "0" => items.push(Item::DeclareSort(s.clone())),
            ("declare-fun", [SExp::Atom(name), SExp::List(args), ret]) => items.push(Item::DeclareFun {
                name: name.clone(),
                args: args.iter().map(read_sort).collect::<Result<_, _>>()?,
                ret: read_sort(ret)?,
            }),
            ("define-fun", [SExp::Atom(name), SExp::List(params), ret, body]) => items.push(Item::DefineFun {
                name: name.clone(),
                params: read_bindings(params)?,
                ret: read_sort(ret)?,
                body: read_term(body)?,
            }),
            ("assert", [t]) => items.push(Item::Assert(read_term(t)?)),
            ("check-sat", []) => items.push(Item::CheckSat),
            ("get-model", []) => items.push(Item::GetModel),
            _ => return Err(format!("unsupported command `{e}`")),
        }
    }
    Ok(SmtScript {
        logic: logic.ok_or("missing set-logic")?,
        items,
    })
}

pub fn read_sort(e: &SExp) -> Result<Sort, String> {
    match e {
        SExp::Atom(a) if a == "Bool" => Ok(Sort::Bool),
        SExp::Atom(a) if a == "Int" => Ok(Sort::Int),
        SExp::Atom(a) => Ok(Sort::Named(a.clone())),
        SExp::List(xs) => match xs.as_slice() {
            [SExp::Atom(u), SExp::Atom(b), SExp::Atom(w)] if u == "_" && b == "BitVec" => {
                Ok(Sort::BitVec(w.parse().map_err(|_| format!("bad width `{w}`"))?))
            }
            _ => Err(format!("unsupported sort `{e}`")),
        },
    }
}

fn read_bindings(xs: &[SExp]) -> Result<Vec<(String, Sort)>, String> {
    xs.iter()
        .map(|b| match b.list() {
            Some([SExp::Atom(v), s]) => Ok((v.clone(), read_sort(s)?)),
            _ => Err(format!("malformed binding `{b}`")),
        })
        .collect()
}

/// Parses a bitvector literal in `#b`, `#x` or `(_ bvN w)` form.
pub fn read_bv_literal(e: &SExp) -> Option<(u64, u32)> {
    match e {
        SExp::Atom(a) => {
            if let Some(bits) = a.strip_prefix("#b") {
                Some((u64::from_str_radix(bits, 2).ok()?, bits.len() as u32))
            } else if let Some(hex) = a.strip_prefix("#x") {
                Some((u64::from_str_radix(hex, 16).ok()?, 4 * hex.len() as u32))
            } else {
                // The paper's notation: `bv16[5]`.
                let rest = a.strip_prefix("bv")?;
                let (v, w) = rest.strip_suffix(']')?.split_once('[')?;
                Some((v.parse().ok()?, w.parse().ok()?))
            }
        }
        SExp::List(xs) => match xs.as_slice() {
            [SExp::Atom(u), SExp::Atom(v), SExp::Atom(w)] if u == "_" && v.starts_with("bv") => {
                Some((v[2..].parse().ok()?, w.parse().ok()?))
            }
            _ => None,
        },
    }
}

pub fn read_term(e: &SExp) -> Result<Term, String> {
    if let Some((value, width)) = read_bv_literal(e) {
        if let SExp::Atom(a) = e {
            // Only the v2 forms are terms of a script.
            if !a.starts_with('#') {
                return Ok(Term::Sym(a.clone()));
            }
        }
        return Ok(Term::BvLit { value, width });
    }
    let b = |x: &SExp| read_term(x).map(Box::new);
    match e {
        SExp::Atom(a) if a == "true" => Ok(Term::Bool(true)),
        SExp::Atom(a) if a == "false" => Ok(Term::Bool(false)),
        SExp::Atom(a) if !a.is_empty() && a.chars().all(|c| c.is_ascii_digit()) => {
            Ok(Term::IntLit(a.parse().map_err(|_| format!("numeral `{a}` out of range"))?))
        }
        SExp::Atom(a) => Ok(Term::Sym(a.clone())),
        SExp::List(xs) => {
            let Some((SExp::Atom(head), args)) = xs.split_first() else {
                return Err(format!("unsupported term `{e}`"));
            };
            let all = |args: &[SExp]| args.iter().map(read_term).collect::<Result<Vec<_>, _>>();
            match (head.as_str(), args) {
                ("not", [a]) => Ok(Term::Not(b(a)?)),
                ("and", _) => Ok(Term::And(all(args)?)),
                ("or", _) => Ok(Term::Or(all(args)?)),
                ("=>", [x, y]) => Ok(Term::Implies(b(x)?, b(y)?)),
                ("=", [x, y]) => Ok(Term::Eq(b(x)?, b(y)?)),
                ("ite", [c, x, y]) => Ok(Term::Ite(b(c)?, b(x)?, b(y)?)),
                ("forall", [SExp::List(vs), body]) => Ok(Term::Forall(read_bindings(vs)?, b(body)?)),
                ("exists", [SExp::List(vs), body]) => Ok(Term::Exists(read_bindings(vs)?, b(body)?)),
                ("-", [SExp::Atom(n)]) if n.chars().all(|c| c.is_ascii_digit()) => {
                    let v: i64 = n.parse().map_err(|_| format!("numeral `{n}` out of range"))?;
                    Ok(Term::IntLit(-v))
                }
                (f, _) if !args.is_empty() => Ok(Term::App(f.to_string(), all(args)?)),
                _ => Err(format!("unsupported term `{e}`")),
            }
        }
    }
}
