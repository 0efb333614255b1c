//! Tokenizer and recursive-descent parser for element expressions.

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// How a generator's exponent was written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Power {
    /// bare name, `x = x^<1>`
    One,
    /// `x<k>`: the divided power at the working level
    Level(u32),
    /// `x[k]`: the Kostant (level `inf`) divided power
    Kostant(u32),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Factorial(Box<Expr>),
    Gen { name: String, power: Power },
    Binom(Box<Expr>, u32),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Bracket(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
    /// no whitespace between this token and the previous one
    glued: bool,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = text.chars().peekable();
    let mut glued = false;
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            glued = false;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            glued = false;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            Tok::Int(s.parse().unwrap())
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_' || **d == '\'') {
                s.push(d);
                chars.next();
                column += 1;
            }
            if chars.peek() == Some(&'@') {
                s.push('@');
                chars.next();
                column += 1;
                let mut any = false;
                while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    s.push(d);
                    chars.next();
                    column += 1;
                    any = true;
                }
                if !any {
                    return Err(Error::Syntax { line, column, message: "expected a factor number after `@`".into() });
                }
            }
            Tok::Ident(s)
        } else if "+-*/^!()[]<>,".contains(c) {
            chars.next();
            column += 1;
            Tok::Sym(c)
        } else {
            return Err(Error::Syntax { line, column, message: format!("unexpected character `{c}`") });
        };
        out.push(Token { tok, line: l, column: col, glued });
        glued = true;
    }
    out.push(Token { tok: Tok::End, line, column, glued });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(Error::Syntax { line: t.line, column: t.column, message: message.into() })
    }

    fn is_sym(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.is_sym(c) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected `{c}`"))
        }
    }

    fn small_int(&mut self) -> Result<u32> {
        match &self.peek().tok {
            Tok::Int(n) => match u32::try_from(n) {
                Ok(k) => {
                    self.next();
                    Ok(k)
                }
                Err(_) => self.error("integer too large"),
            },
            _ => self.error("expected an integer"),
        }
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = self.is_sym('-');
        if neg {
            self.next();
        }
        let k = self.small_int()? as i64;
        Ok(if neg { -k } else { k })
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            if self.is_sym('+') {
                self.next();
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.is_sym('-') {
                self.next();
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.is_sym('*') {
                self.next();
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.is_sym('/') {
                self.next();
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.is_sym('-') {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.is_sym('+') {
            self.next();
            return self.unary();
        }
        let base = self.postfix()?;
        if self.is_sym('^') {
            self.next();
            let e = self.signed_int()?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn postfix(&mut self) -> Result<Expr> {
        let mut e = self.atom()?;
        while self.is_sym('!') {
            self.next();
            e = Expr::Factorial(Box::new(e));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Int(n) => {
                self.next();
                Ok(Expr::Int(n))
            }
            Tok::Sym('(') => {
                self.next();
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('[') => {
                self.next();
                let a = self.sum()?;
                self.expect(',')?;
                let b = self.sum()?;
                self.expect(']')?;
                Ok(Expr::Bracket(Box::new(a), Box::new(b)))
            }
            Tok::Ident(name) if name == "binom" => {
                self.next();
                self.expect('(')?;
                let a = self.sum()?;
                self.expect(',')?;
                let k = self.small_int()?;
                self.expect(')')?;
                Ok(Expr::Binom(Box::new(a), k))
            }
            Tok::Ident(name) => {
                self.next();
                let power = if self.peek().glued && self.is_sym('<') {
                    self.next();
                    let k = self.small_int()?;
                    self.expect('>')?;
                    Power::Level(k)
                } else if self.peek().glued && self.is_sym('[') {
                    self.next();
                    let k = self.small_int()?;
                    self.expect(']')?;
                    Power::Kostant(k)
                } else {
                    Power::One
                };
                Ok(Expr::Gen { name, power })
            }
            Tok::End => self.error("unexpected end of input"),
            Tok::Sym(c) => self.error(format!("unexpected `{c}`")),
        }
    }
}

/// Parses a sum of signed products of atoms.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(text)?, pos: 0 };
    let e = p.sum()?;
    if p.peek().tok != Tok::End {
        return p.error("trailing input");
    }
    Ok(e)
}
