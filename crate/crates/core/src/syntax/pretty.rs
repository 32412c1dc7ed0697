//! Fully parenthesized pretty printer.
//!
//! The output is meant for round-tripping and diagnostics rather than for
//! beauty: every compound expression is wrapped in parentheses so that
//! reparsing never depends on precedence.

use std::fmt::Write;

use super::ast::*;

/// Renders a specification as source text that reparses to an equal tree.
pub fn pretty_print(spec: &SourceSpec) -> String {
    let mut out = String::new();
    for d in &spec.decls {
        decl(&mut out, d);
        out.push('\n');
    }
    out
}

fn idents(ids: &[Ident]) -> String {
    ids.iter().map(|i| i.name.as_str()).collect::<Vec<_>>().join(", ")
}

fn decl(out: &mut String, d: &Decl) {
    match d {
        Decl::Open(o) => {
            let _ = write!(out, "open util/ordering[{}]", o.sig.name);
            if let Some(a) = &o.alias {
                let _ = write!(out, " as {}", a.name);
            }
        }
        Decl::Sig(s) => {
            if s.is_abstract {
                out.push_str("abstract ");
            }
            let _ = write!(out, "sig {}", idents(&s.names));
            if let Some(p) = &s.parent {
                let _ = write!(out, " extends {}", p.name);
            }
            if s.fields.is_empty() {
                out.push_str(" {}");
            } else {
                out.push_str(" {\n");
                let fields: Vec<String> = s.fields.iter().map(field).collect();
                out.push_str(&fields.join(",\n"));
                out.push_str("\n}");
            }
        }
        Decl::Fact(f) => {
            out.push_str("fact");
            if let Some(n) = &f.name {
                let _ = write!(out, " {}", n.name);
            }
            block(out, &f.body);
        }
        Decl::Pred(p) => {
            let _ = write!(out, "pred {}[{}]", p.name.name, params(&p.params));
            block(out, &p.body);
        }
        Decl::Fun(f) => {
            let _ = write!(out, "fun {}[{}]: ", f.name.name, params(&f.params));
            if let Some(m) = f.result_mult {
                let _ = write!(out, "{} ", m.as_str());
            }
            out.push_str(&expr(&f.result));
            block(out, std::slice::from_ref(&f.body));
        }
        Decl::Assert(a) => {
            let _ = write!(out, "assert {}", a.name.name);
            block(out, &a.body);
        }
        Decl::Check(c) => {
            let _ = write!(out, "check {}", c.target.name);
            if let Some(s) = c.scope {
                let _ = write!(out, " for {s}");
            }
        }
    }
}

fn field(f: &FieldDecl) -> String {
    let cols: Vec<String> = f
        .columns
        .iter()
        .map(|c| match c.mult {
            Some(m) => format!("{} {}", m.as_str(), c.sig.name),
            None => c.sig.name.clone(),
        })
        .collect();
    format!("  {}: {}", idents(&f.names), cols.join(" -> "))
}

fn block(out: &mut String, items: &[SExpr]) {
    if items.is_empty() {
        out.push_str(" {}");
        return;
    }
    out.push_str(" {\n");
    for e in items {
        let _ = writeln!(out, "  {}", expr(e));
    }
    out.push('}');
}

fn params(ps: &[VarDecl]) -> String {
    ps.iter().map(var_decl).collect::<Vec<_>>().join(", ")
}

fn var_decl(v: &VarDecl) -> String {
    match v.mult {
        Some(m) => format!("{}: {} {}", idents(&v.names), m.as_str(), expr(&v.bound)),
        None => format!("{}: {}", idents(&v.names), expr(&v.bound)),
    }
}

/// Renders one expression; compound nodes come back parenthesized.
pub fn expr(e: &SExpr) -> String {
    match &e.kind {
        SExprKind::Name(q) => q.to_string(),
        SExprKind::Int(n) => n.to_string(),
        SExprKind::None => "none".to_string(),
        SExprKind::Unary(UnOp::Not, a) => format!("(not {})", expr(a)),
        SExprKind::Unary(UnOp::Closure, a) => format!("(^{})", expr(a)),
        SExprKind::Unary(UnOp::ReflClosure, a) => format!("(*{})", expr(a)),
        SExprKind::Mult(op, a) => format!("({} {})", op.as_str(), expr(a)),
        SExprKind::Binary(BinOp::Join, a, b) => format!("({}.{})", expr(a), expr(b)),
        SExprKind::Binary(op, a, b) => format!("({} {} {})", expr(a), op.as_str(), expr(b)),
        SExprKind::Box(f, args) => {
            let args: Vec<String> = args.iter().map(expr).collect();
            format!("({}[{}])", expr(f), args.join(", "))
        }
        SExprKind::Quant { quant, decls, body } => {
            let ds: Vec<String> = decls.iter().map(var_decl).collect();
            format!("({} {} | {})", quant.as_str(), ds.join(", "), expr(body))
        }
        SExprKind::Let { bindings, body } => {
            let bs: Vec<String> = bindings
                .iter()
                .map(|(n, v)| format!("{} = {}", n.name, expr(v)))
                .collect();
            format!("(let {} | {})", bs.join(", "), expr(body))
        }
        SExprKind::Block(items) => {
            let items: Vec<String> = items.iter().map(expr).collect();
            if items.is_empty() {
                "{}".to_string()
            } else {
                format!("{{ {} }}", items.join(" "))
            }
        }
    }
}
