//! A small S-expression reader for solver output and script round trips.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExp {
    /// A symbol, numeral, literal or keyword. Quoted symbols are stored
    /// without their bars; string literals keep their quotes.
    Atom(String),
    List(Vec<SExp>),
}

impl SExp {
    pub fn atom(&self) -> Option<&str> {
        match self {
            SExp::Atom(a) => Some(a),
            SExp::List(_) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExp]> {
        match self {
            SExp::List(xs) => Some(xs),
            SExp::Atom(_) => None,
        }
    }

    /// True for a list whose head is the atom `head`.
    pub fn is_app(&self, head: &str) -> bool {
        matches!(self.list(), Some([SExp::Atom(h), ..]) if h == head)
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExp::Atom(a) => f.write_str(&super::term::render_symbol_or_literal(a)),
            SExp::List(xs) => {
                f.write_str("(")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A top-level element: an expression or a `;` comment line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopLevel {
    Comment(String),
    Exp(SExp),
}

struct Reader<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error(&self, msg: &str) -> String {
        let line = self.text[..self.pos].matches('\n').count() + 1;
        format!("line {line}: {msg}")
    }

    /// Skips whitespace; returns the text of a comment if one comes next.
    fn skip_space(&mut self) -> Option<String> {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
                let body = self.text[start..self.pos].trim_start_matches(';');
                return Some(body.strip_prefix(' ').unwrap_or(body).trim_end().to_string());
            } else {
                break;
            }
        }
        None
    }

    fn skip_all_space(&mut self) {
        while self.skip_space().is_some() {}
    }

    fn exp(&mut self) -> Result<SExp, String> {
        self.skip_all_space();
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_all_space();
                    match self.peek() {
                        None => return Err(self.error("unclosed parenthesis")),
                        Some(')') => {
                            self.bump();
                            return Ok(SExp::List(items));
                        }
                        Some(_) => items.push(self.exp()?),
                    }
                }
            }
            Some(')') => Err(self.error("unexpected `)`")),
            Some('|') => {
                self.bump();
                let start = self.pos;
                while let Some(c) = self.bump() {
                    if c == '|' {
                        return Ok(SExp::Atom(self.text[start..self.pos - 1].to_string()));
                    }
                }
                Err(self.error("unterminated quoted symbol"))
            }
            Some('"') => {
                let start = self.pos;
                self.bump();
                loop {
                    match self.bump() {
                        None => return Err(self.error("unterminated string")),
                        Some('"') => {
                            // `""` is an escaped quote inside SMT-LIB strings.
                            if self.peek() == Some('"') {
                                self.bump();
                            } else {
                                return Ok(SExp::Atom(self.text[start..self.pos].to_string()));
                            }
                        }
                        Some(_) => {}
                    }
                }
            }
            Some(_) => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || "()|\";".contains(c) {
                        break;
                    }
                    self.bump();
                }
                Ok(SExp::Atom(self.text[start..self.pos].to_string()))
            }
        }
    }
}

/// Parses every top-level expression, discarding comments.
pub fn parse_sexps(text: &str) -> Result<Vec<SExp>, String> {
    Ok(parse_toplevel(text)?
        .into_iter()
        .filter_map(|t| match t {
            TopLevel::Exp(e) => Some(e),
            TopLevel::Comment(_) => None,
        })
        .collect())
}

/// Parses top-level expressions and comment lines in order.
pub fn parse_toplevel(text: &str) -> Result<Vec<TopLevel>, String> {
    let mut r = Reader { text, pos: 0 };
    let mut out = Vec::new();
    loop {
        if let Some(c) = r.skip_space() {
            out.push(TopLevel::Comment(c));
            continue;
        }
        if r.peek().is_none() {
            return Ok(out);
        }
        out.push(TopLevel::Exp(r.exp()?));
    }
}
