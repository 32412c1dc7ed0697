//! Typed model: signatures, fields, templates and typed relational expressions.

use std::collections::BTreeSet;
use std::fmt;

pub use crate::syntax::{Mult, Quant};
use crate::syntax::Span;

pub type SigId = usize;
pub type FieldId = usize;
pub type TemplateId = usize;

/// Identity of a bound variable. Unique within a model and within every
/// expression produced by template instantiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub id: VarId,
    /// Source-level name, kept for diagnostics and witness naming.
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signature {
    pub name: String,
    pub parent: Option<SigId>,
    pub is_abstract: bool,
    pub children: Vec<SigId>,
    pub span: Span,
}

impl Signature {
    pub fn is_top_level(&self) -> bool {
        self.parent.is_none()
    }
}

/// A column of a relational type: the top-level signature that supplies its
/// atoms, and the most specific signature known to contain them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Col {
    pub top: SigId,
    pub bound: SigId,
}

/// `None` is the column type of the empty relation.
pub type ColTy = Option<Col>;

#[derive(Debug, Clone, PartialEq)]
pub enum Ty {
    Bool,
    Int,
    Rel(Vec<ColTy>),
}

impl Ty {
    pub fn arity(&self) -> Option<usize> {
        match self {
            Ty::Rel(c) => Some(c.len()),
            _ => None,
        }
    }

    pub fn cols(&self) -> &[ColTy] {
        match self {
            Ty::Rel(c) => c,
            _ => &[],
        }
    }

    pub fn unary(sig: SigId, top: SigId) -> Ty {
        Ty::Rel(vec![Some(Col { top, bound: sig })])
    }
}

/// Multiplicity test used as a formula: `no e`, `some e`, `lone e`, `one e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MultTest {
    No,
    Some,
    Lone,
    One,
}

impl MultTest {
    pub fn as_str(self) -> &'static str {
        match self {
            MultTest::No => "no",
            MultTest::Some => "some",
            MultTest::Lone => "lone",
            MultTest::One => "one",
        }
    }

    pub fn of_mult(m: Mult) -> Option<MultTest> {
        match m {
            Mult::Set => None,
            Mult::Some => Some(MultTest::Some),
            Mult::One => Some(MultTest::One),
            Mult::Lone => Some(MultTest::Lone),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn as_str(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// The four relations the ordering idiom provides over the ordered signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrdFn {
    First,
    Last,
    Next,
    Prev,
}

impl OrdFn {
    pub fn as_str(self) -> &'static str {
        match self {
            OrdFn::First => "first",
            OrdFn::Last => "last",
            OrdFn::Next => "next",
            OrdFn::Prev => "prev",
        }
    }

    pub fn from_name(s: &str) -> Option<OrdFn> {
        match s {
            "first" => Some(OrdFn::First),
            "last" => Some(OrdFn::Last),
            "next" => Some(OrdFn::Next),
            "prev" => Some(OrdFn::Prev),
            _ => None,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            OrdFn::First | OrdFn::Last => 1,
            OrdFn::Next | OrdFn::Prev => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Atoms of an arity-1 expression.
    Atoms(Box<RelExpr>),
    /// The integers of the active integer semantics.
    Int,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QVar {
    pub var: Var,
    pub domain: Domain,
}

/// A typed expression: relational term, formula or integer term.
#[derive(Debug, Clone, PartialEq)]
pub struct RelExpr {
    pub kind: ExprKind,
    pub ty: Ty,
}

type B = Box<RelExpr>;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    // relational terms
    Sig(SigId),
    Field(FieldId),
    Var(Var),
    None,
    Ord(OrdFn),
    Union(B, B),
    Diff(B, B),
    Inter(B, B),
    Product(B, B),
    Join(B, B),
    Closure(B),
    ReflClosure(B),
    /// Predicate or function application; typed by the template signature.
    Call(TemplateId, Vec<RelExpr>),
    // formulas
    True,
    False,
    Not(B),
    And(Vec<RelExpr>),
    Or(Vec<RelExpr>),
    Implies(B, B),
    Iff(B, B),
    In(B, B),
    Eq(B, B),
    Mult(MultTest, B),
    Quant { q: Quant, vars: Vec<QVar>, body: B },
    // integer terms
    IntLit(i64),
    IntAdd(B, B),
    IntSub(B, B),
    IntCmp(CmpOp, B, B),
}

impl RelExpr {
    pub fn new(kind: ExprKind, ty: Ty) -> Self {
        RelExpr { kind, ty }
    }

    pub fn arity(&self) -> usize {
        self.ty.arity().unwrap_or(0)
    }

    pub fn tt() -> Self {
        RelExpr::new(ExprKind::True, Ty::Bool)
    }

    pub fn ff() -> Self {
        RelExpr::new(ExprKind::False, Ty::Bool)
    }

    pub fn not(e: RelExpr) -> Self {
        RelExpr::new(ExprKind::Not(Box::new(e)), Ty::Bool)
    }

    pub fn and(items: Vec<RelExpr>) -> Self {
        match items.len() {
            0 => RelExpr::tt(),
            1 => items.into_iter().next().unwrap(),
            _ => RelExpr::new(ExprKind::And(items), Ty::Bool),
        }
    }

    pub fn in_(a: RelExpr, b: RelExpr) -> Self {
        RelExpr::new(ExprKind::In(Box::new(a), Box::new(b)), Ty::Bool)
    }

    pub fn mult(m: MultTest, e: RelExpr) -> Self {
        RelExpr::new(ExprKind::Mult(m, Box::new(e)), Ty::Bool)
    }

    pub fn var(v: Var, ty: Ty) -> Self {
        RelExpr::new(ExprKind::Var(v), ty)
    }

    /// Children in evaluation order, including quantifier domains.
    pub fn children(&self) -> Vec<&RelExpr> {
        use ExprKind::*;
        match &self.kind {
            Sig(_) | Field(_) | Var(_) | None | Ord(_) | True | False | IntLit(_) => vec![],
            Union(a, b) | Diff(a, b) | Inter(a, b) | Product(a, b) | Join(a, b) | Implies(a, b)
            | Iff(a, b) | In(a, b) | Eq(a, b) | IntAdd(a, b) | IntSub(a, b) | IntCmp(_, a, b) => {
                vec![a, b]
            }
            Closure(a) | ReflClosure(a) | Not(a) | Mult(_, a) => vec![a],
            Call(_, args) | And(args) | Or(args) => args.iter().collect(),
            Quant { vars, body, .. } => {
                let mut out: Vec<&RelExpr> = vars
                    .iter()
                    .filter_map(|v| match &v.domain {
                        Domain::Atoms(d) => Some(&**d),
                        Domain::Int => Option::None,
                    })
                    .collect();
                out.push(body);
                out
            }
        }
    }

    /// Preorder traversal.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a RelExpr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn any(&self, pred: &impl Fn(&RelExpr) -> bool) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= pred(e));
        found
    }

    /// Variables occurring free in the expression.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        free_vars_into(self, &mut BTreeSet::new(), &mut out);
        out
    }

    pub fn contains_closure(&self) -> bool {
        self.any(&|e| matches!(e.kind, ExprKind::Closure(_) | ExprKind::ReflClosure(_)))
    }

    pub fn contains_int_quantifier(&self) -> bool {
        self.any(&|e| match &e.kind {
            ExprKind::Quant { vars, .. } => vars.iter().any(|v| v.domain == Domain::Int),
            _ => false,
        })
    }
}

fn free_vars_into(e: &RelExpr, bound: &mut BTreeSet<VarId>, out: &mut BTreeSet<Var>) {
    match &e.kind {
        ExprKind::Var(v) => {
            if !bound.contains(&v.id) {
                out.insert(v.clone());
            }
        }
        ExprKind::Quant { vars, body, .. } => {
            let mut added = Vec::new();
            for qv in vars {
                if let Domain::Atoms(d) = &qv.domain {
                    free_vars_into(d, bound, out);
                }
                if bound.insert(qv.var.id) {
                    added.push(qv.var.id);
                }
            }
            free_vars_into(body, bound, out);
            for id in added {
                bound.remove(&id);
            }
        }
        _ => {
            for c in e.children() {
                free_vars_into(c, bound, out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub owner: SigId,
    pub name: String,
    /// Column signatures, owner first; `columns.len()` is the arity.
    pub columns: Vec<SigId>,
    /// Multiplicity of the last column.
    pub mult: Mult,
    /// A column restricted to the image of another binary field of the same
    /// owner, as in `addr: names -> some Target`: (column index, field).
    pub restriction: Option<(usize, FieldId)>,
    /// Canonical typing constraint (columns and restriction).
    pub typing: RelExpr,
    /// Canonical multiplicity constraint (`true` for `set`).
    pub multiplicity: RelExpr,
    pub span: Span,
}

impl Field {
    pub fn arity(&self) -> usize {
        self.columns.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    Pred,
    Fun,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub var: Var,
    pub ty: Ty,
    pub mult: Mult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub name: String,
    pub kind: TemplateKind,
    pub params: Vec<Param>,
    /// `Bool` for predicates.
    pub result: Ty,
    pub body: RelExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedFormula {
    pub name: String,
    pub body: RelExpr,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Command {
    pub assertion: String,
    pub scope: Option<u32>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ordering {
    pub sig: SigId,
    pub alias: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub sigs: Vec<Signature>,
    pub fields: Vec<Field>,
    pub facts: Vec<NamedFormula>,
    pub templates: Vec<Template>,
    pub assertions: Vec<NamedFormula>,
    pub commands: Vec<Command>,
    pub ordering: Option<Ordering>,
}

impl Model {
    pub fn top(&self, mut s: SigId) -> SigId {
        while let Some(p) = self.sigs[s].parent {
            s = p;
        }
        s
    }

    pub fn top_levels(&self) -> Vec<SigId> {
        (0..self.sigs.len()).filter(|&s| self.sigs[s].is_top_level()).collect()
    }

    /// True if `a` equals `b` or is a (transitive) subsignature of it.
    pub fn is_sub(&self, mut a: SigId, b: SigId) -> bool {
        loop {
            if a == b {
                return true;
            }
            match self.sigs[a].parent {
                Some(p) => a = p,
                None => return false,
            }
        }
    }

    /// Least common ancestor of two signatures in the same hierarchy.
    pub fn lca(&self, a: SigId, b: SigId) -> SigId {
        let mut x = a;
        loop {
            if self.is_sub(b, x) {
                return x;
            }
            match self.sigs[x].parent {
                Some(p) => x = p,
                None => return x,
            }
        }
    }

    /// True if the signature's extent must be the union of its children.
    /// An abstract signature without children is treated as concrete.
    pub fn is_abstract_constrained(&self, s: SigId) -> bool {
        self.sigs[s].is_abstract && !self.sigs[s].children.is_empty()
    }

    pub fn sig_by_name(&self, name: &str) -> Option<SigId> {
        self.sigs.iter().position(|s| s.name == name)
    }

    pub fn field_by_name(&self, name: &str) -> Option<FieldId> {
        self.fields.iter().position(|f| f.name == name)
    }

    pub fn template_by_name(&self, name: &str) -> Option<TemplateId> {
        self.templates.iter().position(|t| t.name == name)
    }

    pub fn assertion(&self, name: &str) -> Option<&NamedFormula> {
        self.assertions.iter().find(|a| a.name == name)
    }

    /// Column type of a signature used as a unary relation.
    pub fn sig_ty(&self, s: SigId) -> Ty {
        Ty::unary(s, self.top(s))
    }

    pub fn col(&self, s: SigId) -> ColTy {
        Some(Col {
            top: self.top(s),
            bound: s,
        })
    }

    pub fn field_ty(&self, f: FieldId) -> Ty {
        Ty::Rel(self.fields[f].columns.iter().map(|&c| self.col(c)).collect())
    }

    pub fn max_field_arity(&self) -> usize {
        self.fields.iter().map(Field::arity).max().unwrap_or(1)
    }

    /// Depth-first order of a hierarchy rooted at `s`.
    pub fn descendants(&self, s: SigId) -> Vec<SigId> {
        let mut out = vec![s];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.sigs[out[i]].children.iter().copied());
            i += 1;
        }
        out
    }

    /// All facts and implicit field constraints, in a fixed order.
    pub fn constraints(&self) -> Vec<RelExpr> {
        let mut out = Vec::new();
        for f in &self.fields {
            out.push(f.typing.clone());
            out.push(f.multiplicity.clone());
        }
        out.extend(self.facts.iter().map(|f| f.body.clone()));
        out
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}
