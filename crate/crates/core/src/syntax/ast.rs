//! Untyped syntax tree produced by the parser.

use std::fmt;

/// Source location of a syntax node.
///
/// Spans never take part in structural comparison: two trees that differ only
/// in where their nodes came from compare equal. This is what makes
/// `parse(pretty_print(parse(text))) == parse(text)` a meaningful check.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Span {
    /// Byte offset of the first character.
    pub start: usize,
    /// Byte offset one past the last character.
    pub end: usize,
    /// 1-based line of `start`.
    pub line: u32,
    /// 1-based column of `start`.
    pub column: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub path: Option<String>,
    pub text: String,
    pub decls: Vec<Decl>,
}

impl SourceSpec {
    pub fn opens(&self) -> impl Iterator<Item = &OpenDecl> {
        self.decls.iter().filter_map(|d| match d {
            Decl::Open(o) => Some(o),
            _ => None,
        })
    }

    /// Number of declarations of each kind, in the order
    /// (opens, signatures, facts, funs, preds, asserts, checks).
    ///
    /// A multi-name `sig A, B {}` counts once per name.
    pub fn counts(&self) -> DeclCounts {
        let mut c = DeclCounts::default();
        for d in &self.decls {
            match d {
                Decl::Open(_) => c.opens += 1,
                Decl::Sig(s) => c.sigs += s.names.len(),
                Decl::Fact(_) => c.facts += 1,
                Decl::Fun(_) => c.funs += 1,
                Decl::Pred(_) => c.preds += 1,
                Decl::Assert(_) => c.asserts += 1,
                Decl::Check(_) => c.checks += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeclCounts {
    pub opens: usize,
    pub sigs: usize,
    pub facts: usize,
    pub funs: usize,
    pub preds: usize,
    pub asserts: usize,
    pub checks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Decl {
    Open(OpenDecl),
    Sig(SigDecl),
    Fact(FactDecl),
    Pred(PredDecl),
    Fun(FunDecl),
    Assert(AssertDecl),
    Check(CheckDecl),
}

impl Decl {
    pub fn span(&self) -> Span {
        match self {
            Decl::Open(d) => d.span,
            Decl::Sig(d) => d.span,
            Decl::Fact(d) => d.span,
            Decl::Pred(d) => d.span,
            Decl::Fun(d) => d.span,
            Decl::Assert(d) => d.span,
            Decl::Check(d) => d.span,
        }
    }
}

/// `open util/ordering[Sig] as alias`
#[derive(Debug, Clone, PartialEq)]
pub struct OpenDecl {
    pub sig: Ident,
    pub alias: Option<Ident>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigDecl {
    pub names: Vec<Ident>,
    pub is_abstract: bool,
    pub parent: Option<Ident>,
    pub fields: Vec<FieldDecl>,
    pub span: Span,
}

/// `names: col -> col -> mult col`.
///
/// Only the last column may carry a multiplicity; the parser keeps whatever
/// was written so the typechecker can report misplaced keywords precisely.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub names: Vec<Ident>,
    pub columns: Vec<ColumnDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDecl {
    pub mult: Option<Mult>,
    pub sig: Ident,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactDecl {
    pub name: Option<Ident>,
    pub body: Vec<SExpr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredDecl {
    pub name: Ident,
    pub params: Vec<VarDecl>,
    pub body: Vec<SExpr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunDecl {
    pub name: Ident,
    pub params: Vec<VarDecl>,
    pub result_mult: Option<Mult>,
    pub result: SExpr,
    pub body: SExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssertDecl {
    pub name: Ident,
    pub body: Vec<SExpr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckDecl {
    pub target: Ident,
    pub scope: Option<u32>,
    pub span: Span,
}

/// `a, b: mult bound` in quantifiers and parameter lists.
#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub names: Vec<Ident>,
    pub mult: Option<Mult>,
    pub bound: SExpr,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mult {
    Set,
    Some,
    One,
    Lone,
}

impl Mult {
    pub fn as_str(self) -> &'static str {
        match self {
            Mult::Set => "set",
            Mult::Some => "some",
            Mult::One => "one",
            Mult::Lone => "lone",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    All,
    Some,
    No,
    Lone,
    One,
}

impl Quant {
    pub fn as_str(self) -> &'static str {
        match self {
            Quant::All => "all",
            Quant::Some => "some",
            Quant::No => "no",
            Quant::Lone => "lone",
            Quant::One => "one",
        }
    }
}

/// Prefix operators that turn an expression into a formula (`no e`, `some e`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultOp {
    No,
    Some,
    Lone,
    One,
    Set,
}

impl MultOp {
    pub fn as_str(self) -> &'static str {
        match self {
            MultOp::No => "no",
            MultOp::Some => "some",
            MultOp::Lone => "lone",
            MultOp::One => "one",
            MultOp::Set => "set",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Not,
    Closure,
    ReflClosure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Or,
    Iff,
    Implies,
    And,
    In,
    NotIn,
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Intersect,
    Product,
    Join,
}

impl BinOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::Iff => "iff",
            BinOp::Implies => "implies",
            BinOp::And => "and",
            BinOp::In => "in",
            BinOp::NotIn => "not in",
            BinOp::Eq => "=",
            BinOp::Neq => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Plus => "+",
            BinOp::Minus => "-",
            BinOp::Intersect => "&",
            BinOp::Product => "->",
            BinOp::Join => ".",
        }
    }
}

/// A possibly qualified name such as `ord/first`.
#[derive(Debug, Clone, PartialEq)]
pub struct QualName {
    pub qualifier: Option<String>,
    pub name: String,
}

impl fmt::Display for QualName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.qualifier {
            Some(q) => write!(f, "{q}/{}", self.name),
            None => f.write_str(&self.name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SExpr {
    pub kind: SExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExprKind {
    Name(QualName),
    Int(i64),
    None,
    Unary(UnOp, Box<SExpr>),
    Mult(MultOp, Box<SExpr>),
    Binary(BinOp, Box<SExpr>, Box<SExpr>),
    /// `e[a, b]`: a predicate/function call or a box join.
    Box(Box<SExpr>, Vec<SExpr>),
    Quant {
        quant: Quant,
        decls: Vec<VarDecl>,
        body: Box<SExpr>,
    },
    Let {
        bindings: Vec<(Ident, SExpr)>,
        body: Box<SExpr>,
    },
    Block(Vec<SExpr>),
}

impl SExpr {
    pub fn new(kind: SExprKind, span: Span) -> Self {
        SExpr { kind, span }
    }

    /// Visits this node and every descendant in preorder.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SExpr)) {
        f(self);
        match &self.kind {
            SExprKind::Name(_) | SExprKind::Int(_) | SExprKind::None => {}
            SExprKind::Unary(_, e) | SExprKind::Mult(_, e) => e.walk(f),
            SExprKind::Binary(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            SExprKind::Box(e, args) => {
                e.walk(f);
                args.iter().for_each(|a| a.walk(f));
            }
            SExprKind::Quant { decls, body, .. } => {
                decls.iter().for_each(|d| d.bound.walk(f));
                body.walk(f);
            }
            SExprKind::Let { bindings, body } => {
                bindings.iter().for_each(|(_, e)| e.walk(f));
                body.walk(f);
            }
            SExprKind::Block(items) => items.iter().for_each(|e| e.walk(f)),
        }
    }
}
