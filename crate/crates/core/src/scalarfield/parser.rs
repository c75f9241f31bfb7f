//! Recursive-descent parser for the scalar expression language.
//!
//! Grammar, lowest to highest precedence:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)*
//! exponent:= ['-'] integer | '(' ['-'] integer ')'
//! atom    := number | variable | 'pi' | function '(' sum ')' | '(' sum ')'
//! ```

use super::expr::{Expr, UnaryOp, Var};
use super::ExprError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, offset: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit
                .parse()
                .map_err(|_| syntax(start, format!("malformed number `{lit}`")))?;
            out.push(Token {
                tok: Tok::Num(value),
                offset: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                offset: start,
            });
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(syntax(start, format!("unexpected character `{ch}`")));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    allowed: &'a [Var],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected {what}")))
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Binary(
                        super::BinaryOp::Add,
                        Box::new(lhs),
                        Box::new(self.product()?),
                    );
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Binary(
                        super::BinaryOp::Sub,
                        Box::new(lhs),
                        Box::new(self.product()?),
                    );
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs =
                        Expr::Binary(super::BinaryOp::Mul, Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    lhs =
                        Expr::Binary(super::BinaryOp::Div, Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let mut base = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let n = self.exponent()?;
            base = Expr::Pow(Box::new(base), n);
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let parenthesized = self.peek() == Some(&Tok::LParen);
        if parenthesized {
            self.pos += 1;
        }
        let negative = self.peek() == Some(&Tok::Minus);
        if negative {
            self.pos += 1;
        }
        let offset = self.offset();
        let value = match self.bump() {
            Some(Token {
                tok: Tok::Num(v), ..
            }) => v,
            _ => return Err(syntax(offset, "expected integer exponent")),
        };
        if value.fract() != 0.0 || value > f64::from(i32::MAX) {
            return Err(syntax(
                offset,
                "exponent must be an integer; use exp/ln for real powers",
            ));
        }
        if parenthesized {
            self.expect(Tok::RParen, "`)`")?;
        }
        let n = value as i32;
        Ok(if negative { -n } else { n })
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.bump() {
            Some(Token {
                tok: Tok::Num(v), ..
            }) => Ok(Expr::Const(v)),
            Some(Token {
                tok: Tok::LParen, ..
            }) => {
                let inner = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token {
                tok: Tok::Ident(name),
                ..
            }) => {
                if let Some(op) = UnaryOp::from_function_name(&name) {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.sum()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Unary(op, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                match Var::from_name(&name) {
                    Some(v) if self.allowed.contains(&v) => Ok(Expr::Var(v)),
                    _ => Err(ExprError::UnknownIdentifier { name, offset }),
                }
            }
            Some(_) => Err(syntax(
                offset,
                "expected a number, variable, function or `(`",
            )),
            None => Err(syntax(offset, "unexpected end of input")),
        }
    }
}

/// Parses `text`, accepting only the variables in `allowed`.
pub fn parse_expr(text: &str, allowed: &[Var]) -> Result<Expr, ExprError> {
    let tokens = lex(text)?;
    if tokens.is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        allowed,
    };
    let e = p.sum()?;
    if p.pos < p.tokens.len() {
        return Err(syntax(p.offset(), "unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarfield::BinaryOp;

    fn s() -> Box<Expr> {
        Box::new(Expr::Var(Var::S))
    }

    fn c(v: f64) -> Box<Expr> {
        Box::new(Expr::Const(v))
    }

    #[test]
    fn grammar_cases() {
        assert_eq!(
            parse_expr("1+s", &[Var::S]).unwrap(),
            Expr::Binary(BinaryOp::Add, c(1.0), s())
        );
        assert_eq!(
            parse_expr("1/(1-s)", &[Var::S]).unwrap(),
            Expr::Binary(
                BinaryOp::Div,
                c(1.0),
                Box::new(Expr::Binary(BinaryOp::Sub, c(1.0), s()))
            )
        );
    }

    #[test]
    fn unclosed_call_reports_end_offset() {
        match parse_expr("sin(", &[Var::S]) {
            Err(ExprError::Syntax { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_variable_is_rejected() {
        match parse_expr("x1 + s", &[Var::S]) {
            Err(ExprError::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "x1");
                assert_eq!(offset, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_expr("foo(s)", &[Var::S]),
            Err(ExprError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        let v = |t: &str, x: f64| {
            parse_expr(t, &[Var::S])
                .unwrap()
                .eval_with(&[0.0, 0.0, x, 0.0])
                .unwrap()
        };
        assert_eq!(v("-s^2", 3.0), -9.0);
        assert_eq!(v("2*-s", 3.0), -6.0);
        assert_eq!(v("8/4/2", 0.0), 1.0);
        assert_eq!(v("8-4-2", 0.0), 2.0);
        assert_eq!(v("s^2^3", 2.0), 64.0);
        assert_eq!(v("s^-1", 4.0), 0.25);
        assert_eq!(v("s^(-2)", 2.0), 0.25);
        assert_eq!(v("  1.5e1 +\ts ", 1.0), 16.0);
    }

    #[test]
    fn fractional_exponent_rejected() {
        assert!(matches!(
            parse_expr("s^0.5", &[Var::S]),
            Err(ExprError::Syntax { offset: 2, .. })
        ));
        assert!(parse_expr("", &[Var::S]).is_err());
        assert!(parse_expr("1 2", &[Var::S]).is_err());
        assert!(parse_expr("s $ 2", &[Var::S]).is_err());
    }
}
