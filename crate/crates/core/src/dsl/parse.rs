//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := atom ('^' unary)?            right-associative, binds tighter than unary minus
//! atom    := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Identifiers resolve to `x0 x1 x2`, the chart's coordinate aliases, declared
//! parameters, the constant `pi`, or one of the unary functions
//! `sin cos exp log sqrt sinh cosh tanh`.

use thiserror::Error;

use super::expr::{Expr, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown identifier `{name}` at {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("function `{name}` at {pos} takes {expected} argument(s), got {found}")]
    Arity {
        pos: usize,
        name: String,
        expected: usize,
        found: usize,
    },
}

/// Names the parser may resolve besides the built-in `x0 x1 x2` and `pi`.
#[derive(Debug, Clone, Default)]
pub struct Symbols {
    pub coords: Option<[String; 3]>,
    pub params: Vec<String>,
}

impl Symbols {
    pub fn new(coords: Option<[String; 3]>, params: impl IntoIterator<Item = String>) -> Self {
        Symbols {
            coords,
            params: params.into_iter().collect(),
        }
    }

    fn resolve(&self, name: &str) -> Option<Expr> {
        match name {
            "x0" => return Some(Expr::Var(0)),
            "x1" => return Some(Expr::Var(1)),
            "x2" => return Some(Expr::Var(2)),
            "pi" => return Some(Expr::Const(std::f64::consts::PI)),
            _ => {}
        }
        if let Some(coords) = &self.coords {
            if let Some(i) = coords.iter().position(|c| c == name) {
                return Some(Expr::Var(i));
            }
        }
        if self.params.iter().any(|p| p == name) {
            return Some(Expr::Param(name.to_string()));
        }
        None
    }
}

/// Parse over `x0 x1 x2` only.
pub fn parse_expression(source: &str) -> Result<Expr, ParseError> {
    parse_with(source, &Symbols::default())
}

pub fn parse_with(source: &str, symbols: &Symbols) -> Result<Expr, ParseError> {
    let tokens = tokenize(source)?;
    let mut p = Parser {
        tokens,
        idx: 0,
        symbols,
        end: source.len(),
    };
    let e = p.expr()?;
    match p.peek() {
        None => Ok(e),
        Some(t) => Err(ParseError::Syntax {
            pos: t.pos,
            message: format!("unexpected {}", t.kind.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(v) => format!("number {v}"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Op(c) => format!("`{c}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Comma => "`,`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                pos: start,
                message: format!("malformed number `{text}`"),
            })?;
            TokenKind::Number(v)
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            TokenKind::Ident(src[start..i].to_string())
        } else {
            i += 1;
            match c {
                '+' | '-' | '*' | '/' | '^' => TokenKind::Op(c),
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                ',' => TokenKind::Comma,
                _ => {
                    return Err(ParseError::Syntax {
                        pos: start,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            }
        };
        out.push(Token { kind, pos: start });
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    idx: usize,
    symbols: &'a Symbols,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.idx).cloned();
        self.idx += 1;
        t
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Op(c), ..
            }) if ops.contains(c) => {
                let c = *c;
                self.idx += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t.kind == kind => Ok(()),
            Some(t) => Err(ParseError::Syntax {
                pos: t.pos,
                message: format!("expected {}, found {}", kind.describe(), t.kind.describe()),
            }),
            None => Err(ParseError::Syntax {
                pos: self.end,
                message: format!("expected {}, found end of input", kind.describe()),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            lhs = if op == '+' {
                Expr::add(lhs, rhs)
            } else {
                Expr::sub(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Expr::mul(lhs, rhs)
            } else {
                Expr::div(lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.eat_op(&['-', '+']) {
            Some('-') => Ok(Expr::neg(self.unary()?)),
            Some(_) => self.unary(),
            None => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.next() else {
            return Err(ParseError::Syntax {
                pos: self.end,
                message: "unexpected end of input".into(),
            });
        };
        match tok.kind {
            TokenKind::Number(v) => Ok(Expr::Const(v)),
            TokenKind::LParen => {
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                let is_call = matches!(
                    self.peek(),
                    Some(Token {
                        kind: TokenKind::LParen,
                        ..
                    })
                );
                if is_call {
                    self.idx += 1;
                    let mut args = vec![self.expr()?];
                    while matches!(
                        self.peek(),
                        Some(Token {
                            kind: TokenKind::Comma,
                            ..
                        })
                    ) {
                        self.idx += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(TokenKind::RParen)?;
                    let Some(op) = UnaryOp::from_name(&name) else {
                        return Err(ParseError::UnknownIdentifier { pos: tok.pos, name });
                    };
                    if args.len() != 1 {
                        return Err(ParseError::Arity {
                            pos: tok.pos,
                            name,
                            expected: 1,
                            found: args.len(),
                        });
                    }
                    Ok(Expr::unary(op, args.pop().unwrap()))
                } else {
                    self.symbols
                        .resolve(&name)
                        .ok_or(ParseError::UnknownIdentifier { pos: tok.pos, name })
                }
            }
            other => Err(ParseError::Syntax {
                pos: tok.pos,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }
}
