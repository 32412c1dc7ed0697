//! Recursive-descent parser.
//!
//! Expression precedence, loosest first:
//! `let`/quantifiers, `or`, `iff`, `implies` (right-assoc), `and`, `not`,
//! comparisons, multiplicity prefixes, `+`/`-`, `&`, `->`, `.`/`[...]`,
//! prefix `^`/`*`, primaries.

use super::ast::*;
use super::lexer::{Kw, Sym, Tok, Token};
use super::FrontendError;

type PResult<T> = Result<T, FrontendError>;

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0 }
    }

    // ----- token helpers -------------------------------------------------

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].span.end
        }
    }

    fn join_span(&self, start: Span) -> Span {
        Span {
            end: self.prev_end().max(start.start),
            ..start
        }
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: Sym) -> bool {
        *self.peek() == Tok::Sym(s)
    }

    fn is_kw(&self, k: Kw) -> bool {
        *self.peek() == Tok::Kw(k)
    }

    fn eat_sym(&mut self, s: Sym) -> bool {
        if self.is_sym(s) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Kw) -> bool {
        if self.is_kw(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn found(&self) -> String {
        describe(self.peek())
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(FrontendError::Syntax {
            span: self.span(),
            found: self.found(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn unsupported<T>(&self, construct: &str, reason: &str) -> PResult<T> {
        Err(FrontendError::Unsupported {
            span: self.span(),
            construct: construct.to_string(),
            reason: reason.to_string(),
        })
    }

    fn expect_sym(&mut self, s: Sym) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&[s.as_str()])
        }
    }

    fn expect_ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.advance().span;
                Ok(Ident { name, span })
            }
            _ => self.error(&["identifier"]),
        }
    }

    // ----- declarations --------------------------------------------------

    pub(crate) fn parse_spec(&mut self) -> PResult<Vec<Decl>> {
        let mut decls = Vec::new();
        while *self.peek() != Tok::Eof {
            decls.push(self.parse_decl()?);
        }
        Ok(decls)
    }

    fn parse_decl(&mut self) -> PResult<Decl> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Kw(Kw::Open) => self.parse_open().map(Decl::Open),
            Tok::Kw(Kw::Abstract) | Tok::Kw(Kw::Sig) => self.parse_sig().map(Decl::Sig),
            Tok::Kw(Kw::Fact) => {
                self.advance();
                let name = match self.peek() {
                    Tok::Ident(_) => Some(self.expect_ident()?),
                    _ => None,
                };
                let body = self.parse_block_items()?;
                Ok(Decl::Fact(FactDecl {
                    name,
                    body,
                    span: self.join_span(start),
                }))
            }
            Tok::Kw(Kw::Pred) => {
                self.advance();
                let name = self.expect_ident()?;
                let params = self.parse_params()?;
                let body = self.parse_block_items()?;
                Ok(Decl::Pred(PredDecl {
                    name,
                    params,
                    body,
                    span: self.join_span(start),
                }))
            }
            Tok::Kw(Kw::Fun) => self.parse_fun().map(Decl::Fun),
            Tok::Kw(Kw::Assert) => {
                self.advance();
                let name = self.expect_ident()?;
                let body = self.parse_block_items()?;
                Ok(Decl::Assert(AssertDecl {
                    name,
                    body,
                    span: self.join_span(start),
                }))
            }
            Tok::Kw(Kw::Check) => self.parse_check().map(Decl::Check),
            Tok::Kw(Kw::Run) => self.unsupported("run", "only check commands are supported"),
            Tok::Kw(Kw::Module) => self.unsupported("module", "module headers are not supported"),
            Tok::Kw(Kw::Enum) => self.unsupported("enum", "enumerations are not supported"),
            Tok::Kw(Kw::Private) => self.unsupported("private", "visibility modifiers are not supported"),
            Tok::Kw(Kw::One) | Tok::Kw(Kw::Lone) | Tok::Kw(Kw::Some)
                if *self.peek_at(1) == Tok::Kw(Kw::Sig) =>
            {
                self.unsupported("signature multiplicity", "multiplicity-constrained signatures are not supported")
            }
            _ => self.error(&["open", "sig", "fact", "pred", "fun", "assert", "check"]),
        }
    }

    fn parse_open(&mut self) -> PResult<OpenDecl> {
        let start = self.span();
        self.advance();
        let mut path = vec![self.expect_ident()?.name];
        while self.eat_sym(Sym::Slash) {
            path.push(self.expect_ident()?.name);
        }
        let path = path.join("/");
        if path != "util/ordering" {
            return Err(FrontendError::Unsupported {
                span: start,
                construct: format!("open {path}"),
                reason: "only util/ordering may be imported".into(),
            });
        }
        self.expect_sym(Sym::LBracket)?;
        let sig = self.expect_ident()?;
        if self.is_sym(Sym::Comma) {
            return self.unsupported("ordering over several signatures", "util/ordering takes one signature");
        }
        self.expect_sym(Sym::RBracket)?;
        let alias = if self.eat_kw(Kw::As) {
            Some(self.expect_ident()?)
        } else {
            None
        };
        Ok(OpenDecl {
            sig,
            alias,
            span: self.join_span(start),
        })
    }

    fn parse_sig(&mut self) -> PResult<SigDecl> {
        let start = self.span();
        let is_abstract = self.eat_kw(Kw::Abstract);
        if !self.eat_kw(Kw::Sig) {
            return self.error(&["sig"]);
        }
        let mut names = vec![self.expect_ident()?];
        while self.eat_sym(Sym::Comma) {
            names.push(self.expect_ident()?);
        }
        let parent = if self.eat_kw(Kw::Extends) {
            Some(self.expect_ident()?)
        } else if self.is_kw(Kw::In) {
            return self.unsupported("in", "subset signatures are not supported");
        } else {
            None
        };
        self.expect_sym(Sym::LBrace)?;
        let mut fields = Vec::new();
        while !self.is_sym(Sym::RBrace) {
            fields.push(self.parse_field()?);
            if !self.eat_sym(Sym::Comma) {
                break;
            }
        }
        self.expect_sym(Sym::RBrace)?;
        if self.is_sym(Sym::LBrace) {
            return self.unsupported("signature fact", "signature facts are not supported");
        }
        Ok(SigDecl {
            names,
            is_abstract,
            parent,
            fields,
            span: self.join_span(start),
        })
    }

    fn parse_field(&mut self) -> PResult<FieldDecl> {
        let start = self.span();
        if self.is_kw(Kw::Disj) {
            return self.unsupported("disj", "disjoint fields are not supported");
        }
        let mut names = vec![self.expect_ident()?];
        while self.eat_sym(Sym::Comma) {
            names.push(self.expect_ident()?);
        }
        self.expect_sym(Sym::Colon)?;
        let mut columns = vec![self.parse_column()?];
        while self.eat_sym(Sym::Arrow) {
            columns.push(self.parse_column()?);
        }
        Ok(FieldDecl {
            names,
            columns,
            span: self.join_span(start),
        })
    }

    fn parse_column(&mut self) -> PResult<ColumnDecl> {
        let mult = self.parse_opt_mult();
        if self.is_kw(Kw::Seq) {
            return self.unsupported("seq", "sequences are not supported");
        }
        if self.is_kw(Kw::Univ) {
            return self.unsupported("univ", "the universal relation is not supported");
        }
        let sig = self.expect_ident()?;
        if self.is_sym(Sym::Plus) || self.is_sym(Sym::Amp) || self.is_sym(Sym::Minus) || self.is_sym(Sym::Dot) {
            return self.unsupported("field type expression", "field columns must be signature or field names");
        }
        Ok(ColumnDecl { mult, sig })
    }

    fn parse_opt_mult(&mut self) -> Option<Mult> {
        let m = match self.peek() {
            Tok::Kw(Kw::Set) => Mult::Set,
            Tok::Kw(Kw::Some) => Mult::Some,
            Tok::Kw(Kw::One) => Mult::One,
            Tok::Kw(Kw::Lone) => Mult::Lone,
            _ => return None,
        };
        self.advance();
        Some(m)
    }

    fn parse_params(&mut self) -> PResult<Vec<VarDecl>> {
        let close = if self.eat_sym(Sym::LBracket) {
            Sym::RBracket
        } else if self.eat_sym(Sym::LParen) {
            Sym::RParen
        } else {
            return Ok(Vec::new());
        };
        let mut params = Vec::new();
        if !self.is_sym(close) {
            loop {
                params.push(self.parse_var_decl()?);
                if !self.eat_sym(Sym::Comma) {
                    break;
                }
            }
        }
        self.expect_sym(close)?;
        Ok(params)
    }

    /// `a, b: mult bound`
    fn parse_var_decl(&mut self) -> PResult<VarDecl> {
        let start = self.span();
        if self.is_kw(Kw::Disj) {
            return self.unsupported("disj", "disjoint declarations are not supported");
        }
        let mut names = vec![self.expect_ident()?];
        while self.eat_sym(Sym::Comma) {
            names.push(self.expect_ident()?);
        }
        self.expect_sym(Sym::Colon)?;
        let mult = self.parse_opt_mult();
        let bound = self.parse_level(Level::Union)?;
        Ok(VarDecl {
            names,
            mult,
            bound,
            span: self.join_span(start),
        })
    }

    fn parse_fun(&mut self) -> PResult<FunDecl> {
        let start = self.span();
        self.advance();
        let name = self.expect_ident()?;
        let params = self.parse_params()?;
        self.expect_sym(Sym::Colon)?;
        let result_mult = self.parse_opt_mult();
        let result = self.parse_level(Level::Union)?;
        let body_start = self.span();
        let mut items = self.parse_block_items()?;
        if items.len() != 1 {
            return Err(FrontendError::Syntax {
                span: body_start,
                found: format!("{} expressions", items.len()),
                expected: vec!["exactly one expression in a function body".into()],
            });
        }
        Ok(FunDecl {
            name,
            params,
            result_mult,
            result,
            body: items.remove(0),
            span: self.join_span(start),
        })
    }

    fn parse_check(&mut self) -> PResult<CheckDecl> {
        let start = self.span();
        self.advance();
        if self.is_sym(Sym::LBrace) {
            return self.unsupported("anonymous check", "check commands must name an assertion");
        }
        let target = self.expect_ident()?;
        let scope = if self.eat_kw(Kw::For) {
            if self.is_kw(Kw::Exactly) {
                return self.unsupported("exactly", "exact scopes are not supported in commands");
            }
            match *self.peek() {
                Tok::Int(n) if n >= 1 && n <= u32::MAX as i64 => {
                    self.advance();
                    Some(n as u32)
                }
                _ => return self.error(&["positive scope"]),
            }
        } else {
            None
        };
        if self.is_kw(Kw::But) {
            return self.unsupported("but", "per-signature scopes are given on the command line");
        }
        if let Tok::Ident(w) = self.peek() {
            if w == "expect" {
                return self.unsupported("expect", "expected outcomes are not supported");
            }
        }
        Ok(CheckDecl {
            target,
            scope,
            span: self.join_span(start),
        })
    }

    // ----- blocks and expressions ---------------------------------------

    /// `{ e1 e2 ... }`
    fn parse_block_items(&mut self) -> PResult<Vec<SExpr>> {
        self.expect_sym(Sym::LBrace)?;
        let mut items = Vec::new();
        while !self.is_sym(Sym::RBrace) {
            if *self.peek() == Tok::Eof {
                return self.error(&["}"]);
            }
            items.push(self.parse_expr()?);
        }
        self.expect_sym(Sym::RBrace)?;
        Ok(items)
    }

    pub(crate) fn parse_expr(&mut self) -> PResult<SExpr> {
        self.parse_level(Level::Or)
    }

    fn parse_level(&mut self, level: Level) -> PResult<SExpr> {
        match level {
            Level::Or => self.parse_binary_left(Level::Or, Level::Iff, |t| match t {
                Tok::Kw(Kw::Or) | Tok::Sym(Sym::OrOr) => Some(BinOp::Or),
                _ => None,
            }),
            Level::Iff => self.parse_binary_left(Level::Iff, Level::Implies, |t| match t {
                Tok::Kw(Kw::Iff) | Tok::Sym(Sym::Iff) => Some(BinOp::Iff),
                _ => None,
            }),
            Level::Implies => {
                let start = self.span();
                let lhs = self.parse_level(Level::And)?;
                if self.eat_kw(Kw::Implies) || self.eat_sym(Sym::FatArrow) {
                    let rhs = self.parse_level(Level::Implies)?;
                    if self.is_kw(Kw::Else) {
                        return self.unsupported("else", "implies-else is not supported");
                    }
                    Ok(SExpr::new(
                        SExprKind::Binary(BinOp::Implies, Box::new(lhs), Box::new(rhs)),
                        self.join_span(start),
                    ))
                } else {
                    Ok(lhs)
                }
            }
            Level::And => self.parse_binary_left(Level::And, Level::Not, |t| match t {
                Tok::Kw(Kw::And) | Tok::Sym(Sym::AndAnd) => Some(BinOp::And),
                _ => None,
            }),
            Level::Not => self.parse_not(),
            Level::Compare => self.parse_compare(),
            Level::MultPrefix => self.parse_mult_prefix(),
            Level::Union => self.parse_binary_left(Level::Union, Level::Intersect, |t| match t {
                Tok::Sym(Sym::Plus) => Some(BinOp::Plus),
                Tok::Sym(Sym::Minus) => Some(BinOp::Minus),
                _ => None,
            }),
            Level::Intersect => self.parse_binary_left(Level::Intersect, Level::Product, |t| match t {
                Tok::Sym(Sym::Amp) => Some(BinOp::Intersect),
                _ => None,
            }),
            Level::Product => self.parse_binary_left(Level::Product, Level::Join, |t| match t {
                Tok::Sym(Sym::Arrow) => Some(BinOp::Product),
                _ => None,
            }),
            Level::Join => self.parse_join(),
            Level::Prefix => self.parse_prefix(),
        }
    }

    fn parse_binary_left(
        &mut self,
        _this: Level,
        next: Level,
        op_of: impl Fn(&Tok) -> Option<BinOp>,
    ) -> PResult<SExpr> {
        let start = self.span();
        let mut lhs = self.parse_level(next)?;
        while let Some(op) = op_of(self.peek()) {
            self.advance();
            self.reject_restrictions()?;
            let rhs = self.parse_level(next)?;
            lhs = SExpr::new(
                SExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
                self.join_span(start),
            );
        }
        self.reject_restrictions()?;
        Ok(lhs)
    }

    fn reject_restrictions(&self) -> PResult<()> {
        match self.peek() {
            Tok::Sym(Sym::DomRestrict) | Tok::Sym(Sym::RanRestrict) => {
                self.unsupported(self.peek_sym_str(), "domain/range restriction is not supported")
            }
            Tok::Sym(Sym::Override) => self.unsupported("++", "relational override is not supported"),
            _ => Ok(()),
        }
    }

    fn peek_sym_str(&self) -> &'static str {
        match self.peek() {
            Tok::Sym(s) => s.as_str(),
            _ => "",
        }
    }

    fn starts_quantifier(&self) -> bool {
        match self.peek() {
            Tok::Kw(Kw::All) => true,
            Tok::Kw(Kw::Some) | Tok::Kw(Kw::No) | Tok::Kw(Kw::Lone) | Tok::Kw(Kw::One) => {
                // `some x, y: ...` is a quantifier; `some e` is a prefix.
                if *self.peek_at(1) == Tok::Kw(Kw::Disj) {
                    return true;
                }
                let mut k = 1;
                loop {
                    if !matches!(self.peek_at(k), Tok::Ident(_)) {
                        return false;
                    }
                    match self.peek_at(k + 1) {
                        Tok::Sym(Sym::Colon) => return true,
                        Tok::Sym(Sym::Comma) => k += 2,
                        _ => return false,
                    }
                }
            }
            _ => false,
        }
    }

    fn parse_not(&mut self) -> PResult<SExpr> {
        let start = self.span();
        if self.is_kw(Kw::Let) {
            return self.parse_let();
        }
        if self.starts_quantifier() {
            return self.parse_quant();
        }
        if self.is_kw(Kw::Not) || self.is_sym(Sym::Bang) {
            self.advance();
            let inner = self.parse_not()?;
            return Ok(SExpr::new(
                SExprKind::Unary(UnOp::Not, Box::new(inner)),
                self.join_span(start),
            ));
        }
        self.parse_level(Level::Compare)
    }

    fn parse_quant(&mut self) -> PResult<SExpr> {
        let start = self.span();
        let quant = match self.advance().tok {
            Tok::Kw(Kw::All) => Quant::All,
            Tok::Kw(Kw::Some) => Quant::Some,
            Tok::Kw(Kw::No) => Quant::No,
            Tok::Kw(Kw::Lone) => Quant::Lone,
            Tok::Kw(Kw::One) => Quant::One,
            _ => unreachable!("starts_quantifier checked the keyword"),
        };
        let mut decls = vec![self.parse_var_decl()?];
        while self.eat_sym(Sym::Comma) {
            decls.push(self.parse_var_decl()?);
        }
        let body = self.parse_body()?;
        Ok(SExpr::new(
            SExprKind::Quant {
                quant,
                decls,
                body: Box::new(body),
            },
            self.join_span(start),
        ))
    }

    /// `| expr` or a `{ ... }` block.
    fn parse_body(&mut self) -> PResult<SExpr> {
        if self.eat_sym(Sym::Bar) {
            self.parse_expr()
        } else if self.is_sym(Sym::LBrace) {
            let start = self.span();
            let items = self.parse_block_items()?;
            Ok(SExpr::new(SExprKind::Block(items), self.join_span(start)))
        } else {
            self.error(&["|", "{"])
        }
    }

    fn parse_let(&mut self) -> PResult<SExpr> {
        let start = self.span();
        self.advance();
        let mut bindings = Vec::new();
        loop {
            let name = self.expect_ident()?;
            self.expect_sym(Sym::Eq)?;
            let value = self.parse_level(Level::Union)?;
            bindings.push((name, value));
            if !self.eat_sym(Sym::Comma) {
                break;
            }
        }
        let body = self.parse_body()?;
        Ok(SExpr::new(
            SExprKind::Let {
                bindings,
                body: Box::new(body),
            },
            self.join_span(start),
        ))
    }

    fn parse_compare(&mut self) -> PResult<SExpr> {
        let start = self.span();
        let lhs = self.parse_level(Level::MultPrefix)?;
        let op = match self.peek() {
            Tok::Kw(Kw::In) => Some(BinOp::In),
            Tok::Sym(Sym::Eq) => Some(BinOp::Eq),
            Tok::Sym(Sym::Neq) => Some(BinOp::Neq),
            Tok::Sym(Sym::Lt) => Some(BinOp::Lt),
            Tok::Sym(Sym::Le) => Some(BinOp::Le),
            Tok::Sym(Sym::Gt) => Some(BinOp::Gt),
            Tok::Sym(Sym::Ge) => Some(BinOp::Ge),
            Tok::Kw(Kw::Not) | Tok::Sym(Sym::Bang) if *self.peek_at(1) == Tok::Kw(Kw::In) => {
                self.advance();
                Some(BinOp::NotIn)
            }
            _ => None,
        };
        let Some(op) = op else { return Ok(lhs) };
        self.advance();
        let rhs = self.parse_level(Level::MultPrefix)?;
        Ok(SExpr::new(
            SExprKind::Binary(op, Box::new(lhs), Box::new(rhs)),
            self.join_span(start),
        ))
    }

    fn parse_mult_prefix(&mut self) -> PResult<SExpr> {
        let start = self.span();
        let op = match self.peek() {
            Tok::Kw(Kw::No) => MultOp::No,
            Tok::Kw(Kw::Some) => MultOp::Some,
            Tok::Kw(Kw::Lone) => MultOp::Lone,
            Tok::Kw(Kw::One) => MultOp::One,
            Tok::Kw(Kw::Set) => MultOp::Set,
            _ => return self.parse_level(Level::Union),
        };
        self.advance();
        let inner = self.parse_level(Level::Union)?;
        Ok(SExpr::new(
            SExprKind::Mult(op, Box::new(inner)),
            self.join_span(start),
        ))
    }

    fn parse_join(&mut self) -> PResult<SExpr> {
        let start = self.span();
        let mut lhs = self.parse_level(Level::Prefix)?;
        loop {
            if self.eat_sym(Sym::Dot) {
                let rhs = self.parse_level(Level::Prefix)?;
                lhs = SExpr::new(
                    SExprKind::Binary(BinOp::Join, Box::new(lhs), Box::new(rhs)),
                    self.join_span(start),
                );
            } else if self.eat_sym(Sym::LBracket) {
                let mut args = Vec::new();
                if !self.is_sym(Sym::RBracket) {
                    loop {
                        args.push(self.parse_expr()?);
                        if !self.eat_sym(Sym::Comma) {
                            break;
                        }
                    }
                }
                self.expect_sym(Sym::RBracket)?;
                lhs = SExpr::new(SExprKind::Box(Box::new(lhs), args), self.join_span(start));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn parse_prefix(&mut self) -> PResult<SExpr> {
        let start = self.span();
        let op = if self.is_sym(Sym::Caret) {
            UnOp::Closure
        } else if self.is_sym(Sym::Star) {
            UnOp::ReflClosure
        } else if self.is_sym(Sym::Tilde) {
            return self.unsupported("~", "relational transpose is not supported");
        } else if self.is_sym(Sym::Hash) {
            return self.unsupported("#", "cardinality is not supported");
        } else {
            return self.parse_primary();
        };
        self.advance();
        let inner = self.parse_prefix()?;
        Ok(SExpr::new(
            SExprKind::Unary(op, Box::new(inner)),
            self.join_span(start),
        ))
    }

    fn parse_primary(&mut self) -> PResult<SExpr> {
        let start = self.span();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                let qn = if self.is_sym(Sym::Slash) && matches!(self.peek_at(1), Tok::Ident(_)) {
                    self.advance();
                    let inner = self.expect_ident()?;
                    if self.is_sym(Sym::Slash) {
                        return self.unsupported("nested qualified name", "only alias/name qualification is supported");
                    }
                    QualName {
                        qualifier: Some(name),
                        name: inner.name,
                    }
                } else {
                    QualName {
                        qualifier: None,
                        name,
                    }
                };
                Ok(SExpr::new(SExprKind::Name(qn), self.join_span(start)))
            }
            Tok::Int(n) => {
                self.advance();
                Ok(SExpr::new(SExprKind::Int(n), self.join_span(start)))
            }
            Tok::Kw(Kw::None) => {
                self.advance();
                Ok(SExpr::new(SExprKind::None, self.join_span(start)))
            }
            Tok::Sym(Sym::LParen) => {
                self.advance();
                let e = self.parse_expr()?;
                self.expect_sym(Sym::RParen)?;
                Ok(e)
            }
            Tok::Sym(Sym::LBrace) => {
                let items = self.parse_block_items()?;
                Ok(SExpr::new(SExprKind::Block(items), self.join_span(start)))
            }
            Tok::Kw(Kw::Iden) => self.unsupported("iden", "the identity relation is not supported"),
            Tok::Kw(Kw::Univ) => self.unsupported("univ", "the universal relation is not supported"),
            Tok::Kw(Kw::This) => self.unsupported("this", "signature facts and `this` are not supported"),
            Tok::Kw(Kw::Sum) => self.unsupported("sum", "integer sums are not supported"),
            Tok::Kw(Kw::Seq) => self.unsupported("seq", "sequences are not supported"),
            Tok::Kw(Kw::Disj) => self.unsupported("disj", "disjoint declarations are not supported"),
            Tok::Sym(Sym::At) => self.unsupported("@", "field name escapes are not supported"),
            _ => self.error(&["expression"]),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Level {
    Or,
    Iff,
    Implies,
    And,
    Not,
    Compare,
    MultPrefix,
    Union,
    Intersect,
    Product,
    Join,
    Prefix,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => s.clone(),
        Tok::Int(n) => n.to_string(),
        Tok::Kw(k) => k.as_str().to_string(),
        Tok::Sym(s) => s.as_str().to_string(),
        Tok::Eof => "end of input".to_string(),
    }
}
