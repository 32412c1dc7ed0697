//! Tokenizer for the core language.
//!
//! Line comments (`//`, `--`) and block comments (`/* */`) are dropped here so
//! the parser never sees them.

use super::ast::Span;
use super::FrontendError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Kw(Kw),
    Sym(Sym),
    Eof,
}

macro_rules! keywords {
    ($($kw:ident => $text:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Kw { $($kw),* }

        impl Kw {
            pub fn from_str(s: &str) -> Option<Kw> {
                match s { $($text => Some(Kw::$kw),)* _ => None }
            }

            pub fn as_str(self) -> &'static str {
                match self { $(Kw::$kw => $text),* }
            }
        }
    };
}

keywords! {
    Abstract => "abstract",
    All => "all",
    And => "and",
    As => "as",
    Assert => "assert",
    But => "but",
    Check => "check",
    Disj => "disj",
    Else => "else",
    Enum => "enum",
    Exactly => "exactly",
    Extends => "extends",
    Fact => "fact",
    For => "for",
    Fun => "fun",
    Iden => "iden",
    Iff => "iff",
    Implies => "implies",
    In => "in",
    Let => "let",
    Lone => "lone",
    Module => "module",
    No => "no",
    None => "none",
    Not => "not",
    One => "one",
    Open => "open",
    Or => "or",
    Pred => "pred",
    Private => "private",
    Run => "run",
    Seq => "seq",
    Set => "set",
    Sig => "sig",
    Some => "some",
    Sum => "sum",
    This => "this",
    Univ => "univ",
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sym {
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Colon,
    Bar,
    Dot,
    Caret,
    Star,
    Plus,
    Minus,
    Amp,
    Arrow,
    Eq,
    Neq,
    Bang,
    Lt,
    Le,
    Gt,
    Ge,
    FatArrow,
    Iff,
    AndAnd,
    OrOr,
    Slash,
    Hash,
    Tilde,
    At,
    DomRestrict,
    RanRestrict,
    Override,
}

impl Sym {
    pub fn as_str(self) -> &'static str {
        match self {
            Sym::LBrace => "{",
            Sym::RBrace => "}",
            Sym::LBracket => "[",
            Sym::RBracket => "]",
            Sym::LParen => "(",
            Sym::RParen => ")",
            Sym::Comma => ",",
            Sym::Colon => ":",
            Sym::Bar => "|",
            Sym::Dot => ".",
            Sym::Caret => "^",
            Sym::Star => "*",
            Sym::Plus => "+",
            Sym::Minus => "-",
            Sym::Amp => "&",
            Sym::Arrow => "->",
            Sym::Eq => "=",
            Sym::Neq => "!=",
            Sym::Bang => "!",
            Sym::Lt => "<",
            Sym::Le => "<=",
            Sym::Gt => ">",
            Sym::Ge => ">=",
            Sym::FatArrow => "=>",
            Sym::Iff => "<=>",
            Sym::AndAnd => "&&",
            Sym::OrOr => "||",
            Sym::Slash => "/",
            Sym::Hash => "#",
            Sym::Tilde => "~",
            Sym::At => "@",
            Sym::DomRestrict => "<:",
            Sym::RanRestrict => ":>",
            Sym::Override => "++",
        }
    }
}

// Longest match first.
const SYMBOLS: &[(&str, Sym)] = &[
    ("<=>", Sym::Iff),
    ("->", Sym::Arrow),
    ("!=", Sym::Neq),
    ("<=", Sym::Le),
    ("=<", Sym::Le),
    (">=", Sym::Ge),
    ("=>", Sym::FatArrow),
    ("&&", Sym::AndAnd),
    ("||", Sym::OrOr),
    ("<:", Sym::DomRestrict),
    (":>", Sym::RanRestrict),
    ("++", Sym::Override),
    ("{", Sym::LBrace),
    ("}", Sym::RBrace),
    ("[", Sym::LBracket),
    ("]", Sym::RBracket),
    ("(", Sym::LParen),
    (")", Sym::RParen),
    (",", Sym::Comma),
    (":", Sym::Colon),
    ("|", Sym::Bar),
    (".", Sym::Dot),
    ("^", Sym::Caret),
    ("*", Sym::Star),
    ("+", Sym::Plus),
    ("-", Sym::Minus),
    ("&", Sym::Amp),
    ("=", Sym::Eq),
    ("!", Sym::Bang),
    ("<", Sym::Lt),
    (">", Sym::Gt),
    ("/", Sym::Slash),
    ("#", Sym::Hash),
    ("~", Sym::Tilde),
    ("@", Sym::At),
];

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lx = Lexer { text, pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia()?;
        let start = lx.mark();
        let Some(c) = lx.peek() else {
            out.push(Token { tok: Tok::Eof, span: lx.span_from(start) });
            return Ok(out);
        };
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let word = lx.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '"');
            match Kw::from_str(word) {
                Some(kw) => Tok::Kw(kw),
                None => Tok::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            let digits = lx.take_while(|c| c.is_ascii_digit());
            let value = digits.parse::<i64>().map_err(|_| FrontendError::Syntax {
                span: lx.span_from(start),
                found: digits.to_string(),
                expected: vec!["integer literal within 64 bits".into()],
            })?;
            Tok::Int(value)
        } else {
            let rest = &text[lx.pos..];
            match SYMBOLS.iter().find(|(s, _)| rest.starts_with(s)) {
                Some((s, sym)) => {
                    lx.advance_by(s.len());
                    Tok::Sym(*sym)
                }
                None => {
                    lx.bump();
                    return Err(FrontendError::Syntax {
                        span: lx.span_from(start),
                        found: c.to_string(),
                        expected: vec!["a token".into()],
                    });
                }
            }
        };
        out.push(Token { tok, span: lx.span_from(start) });
    }
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

#[derive(Clone, Copy)]
struct Mark {
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn mark(&self) -> Mark {
        Mark { pos: self.pos, line: self.line, col: self.col }
    }

    fn span_from(&self, m: Mark) -> Span {
        Span { start: m.pos, end: self.pos, line: m.line, column: m.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn advance_by(&mut self, bytes: usize) {
        let end = self.pos + bytes;
        while self.pos < end {
            self.bump();
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.bump();
        }
        &self.text[start..self.pos]
    }

    fn skip_trivia(&mut self) -> Result<(), FrontendError> {
        loop {
            let rest = &self.text[self.pos..];
            if rest.starts_with("//") || rest.starts_with("--") {
                self.take_while(|c| c != '\n');
            } else if rest.starts_with("/*") {
                let start = self.mark();
                self.advance_by(2);
                loop {
                    if self.text[self.pos..].starts_with("*/") {
                        self.advance_by(2);
                        break;
                    }
                    if self.bump().is_none() {
                        return Err(FrontendError::Syntax {
                            span: self.span_from(start),
                            found: "end of input".into(),
                            expected: vec!["*/".into()],
                        });
                    }
                }
            } else if self.peek().is_some_and(char::is_whitespace) {
                self.bump();
            } else {
                return Ok(());
            }
        }
    }
}
