//! A very small expression language for profile functions on the command line.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'u' | 'v' | func '(' expr ')' | '(' expr ')'
//! func  := sin | cos | sqrt | ln | exp
//! ```

use crate::error::{Error, Result};
use crate::jet::Jet2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sqrt,
    Ln,
    Exp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    U,
    V,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, u: Jet2, v: Jet2) -> Jet2 {
        match self {
            Expr::Num(x) => Jet2::constant(*x),
            Expr::U => u,
            Expr::V => v,
            Expr::Neg(a) => -a.eval(u, v),
            Expr::Call(f, a) => {
                let x = a.eval(u, v);
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sqrt => x.sqrt(),
                    Func::Ln => x.ln(),
                    Func::Exp => x.exp(),
                }
            }
            Expr::Bin(op, a, b) => {
                if let (BinOp::Pow, Some(p)) = (op, b.constant()) {
                    let x = a.eval(u, v);
                    return if p.fract() == 0.0 && p.abs() <= 64.0 { x.powi(p as i32) } else { x.powf(p) };
                }
                let (x, y) = (a.eval(u, v), b.eval(u, v));
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => (y * x.ln()).exp(),
                }
            }
        }
    }

    /// Value when the expression mentions neither `u` nor `v`.
    pub fn constant(&self) -> Option<f64> {
        if self.mentions_u() || self.mentions_v() {
            None
        } else {
            Some(self.eval(Jet2::constant(0.0), Jet2::constant(0.0)).val)
        }
    }

    pub fn mentions_u(&self) -> bool {
        self.any(&|e| matches!(e, Expr::U))
    }

    pub fn mentions_v(&self) -> bool {
        self.any(&|e| matches!(e, Expr::V))
    }

    fn any(&self, pred: &dyn Fn(&Expr) -> bool) -> bool {
        pred(self)
            || match self {
                Expr::Num(_) | Expr::U | Expr::V => false,
                Expr::Neg(a) | Expr::Call(_, a) => a.any(pred),
                Expr::Bin(_, a, b) => a.any(pred) || b.any(pred),
            }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn err(pos: usize, src: &str, msg: impl std::fmt::Display) -> Error {
    Error::Usage(format!("expression '{src}', position {}: {msg}", pos + 1))
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek_raw() {
            self.pos += c.len_utf8();
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(err(self.pos, self.src, format!("expected '{want}', found '{c}'"))),
            None => Err(err(self.pos, self.src, format!("expected '{want}', found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.peek() == Some('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let start = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            None => Err(err(start, self.src, "unexpected end of input")),
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let rest = &self.src[start..];
                let len = rest.find(|c: char| !c.is_ascii_alphanumeric() && c != '_').unwrap_or(rest.len());
                let name = &rest[..len];
                self.pos = start + len;
                let func = match name {
                    "u" => return Ok(Expr::U),
                    "v" => return Ok(Expr::V),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "sqrt" => Func::Sqrt,
                    "ln" => Func::Ln,
                    "exp" => Func::Exp,
                    other => return Err(err(start, self.src, format!("unknown identifier '{other}'"))),
                };
                self.expect('(')?;
                let arg = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Some(c) => Err(err(start, self.src, format!("unexpected '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        let x: f64 = text.parse().map_err(|_| err(start, self.src, format!("malformed number '{text}'")))?;
        self.pos = end;
        Ok(Expr::Num(x))
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(err(p.pos, src, format!("unexpected '{c}' after complete expression")));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, u: f64, v: f64) -> f64 {
        parse(src).unwrap().eval(Jet2::constant(u), Jet2::constant(v)).val
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(at("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(at("(1 + 2) * 3", 0.0, 0.0), 9.0);
        assert_eq!(at("8 / 4 / 2", 0.0, 0.0), 1.0);
        assert_eq!(at("2 ^ 3 ^ 2", 0.0, 0.0), 512.0);
        assert_eq!(at("-2 ^ 2", 0.0, 0.0), -4.0);
        assert_eq!(at("2 ^ -1", 0.0, 0.0), 0.5);
        assert_eq!(at("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(at("1.5e1 + .5", 0.0, 0.0), 15.5);
    }

    #[test]
    fn variables_and_functions() {
        assert_eq!(at("-u^2/2", 2.0, 0.0), -2.0);
        assert_eq!(at("2 + cos(v)", 0.0, 0.0), 3.0);
        assert!((at("sqrt(u) * exp(ln(v))", 4.0, 3.0) - 6.0).abs() < 1e-15);
        assert_eq!(at("sin(0)", 0.0, 0.0), 0.0);
        let e = parse("u * v").unwrap();
        assert!(e.mentions_u() && e.mentions_v());
        assert_eq!(parse("2^3").unwrap().constant(), Some(8.0));
    }

    #[test]
    fn derivatives_flow_through() {
        let e = parse("u^3 - 2*u").unwrap();
        let j = e.eval(Jet2::seed_u(2.0), Jet2::constant(0.0));
        assert_eq!((j.val, j.du, j.duu), (4.0, 10.0, 12.0));
        // non-constant exponent
        let e = parse("u^u").unwrap();
        let j = e.eval(Jet2::seed_u(1.0), Jet2::constant(0.0));
        assert!((j.du - 1.0).abs() < 1e-15 && (j.duu - 2.0).abs() < 1e-14);
    }

    #[test]
    fn errors_name_the_position() {
        for (src, pos) in [("2 +", "position 4"), ("u * (1 + v", "position 11"), ("2 $ 3", "position 3"), ("foo(u)", "position 1"), ("sin u", "position 5")] {
            match parse(src) {
                Err(Error::Usage(m)) => assert!(m.contains(pos), "{src}: {m}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }
}
