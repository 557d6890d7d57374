//! A small expression language for potentials `V(x, t)`.
//!
//! Precedence from loosest: `+ −`, `* /`, unary `−`, `^` (right
//! associative). So `-x^2` is `−(x²)` and `2^-1` is `0.5`. Functions are
//! `sin cos exp tanh abs bump`; `bump(y) = exp(−1/(1−y²))` on `|y| < 1` and
//! zero elsewhere. There is no implicit multiplication.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Abs,
    Bump,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "tanh" => Func::Tanh,
            "abs" => Func::Abs,
            "bump" => Func::Bump,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Tanh => "tanh",
            Func::Abs => "abs",
            Func::Bump => "bump",
        }
    }

    fn arity(self) -> usize {
        1
    }

    fn apply(self, y: f64) -> f64 {
        match self {
            Func::Sin => y.sin(),
            Func::Cos => y.cos(),
            Func::Exp => y.exp(),
            Func::Tanh => y.tanh(),
            Func::Abs => y.abs(),
            Func::Bump => bump(y),
        }
    }
}

/// `exp(−1/(1−y²))` for `|y| < 1`, else 0.
pub fn bump(y: f64) -> f64 {
    if y.abs() < 1.0 {
        (-1.0 / (1.0 - y * y)).exp()
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier {name:?} at offset {offset}")]
    UnknownIdent { offset: usize, name: String },
    #[error("{func} takes {expected} argument(s), got {got} at offset {offset}")]
    Arity { offset: usize, func: String, expected: usize, got: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdent { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero in {0}")]
    DivisionByZero(String),
    #[error("zero raised to a negative power in {0}")]
    ZeroToNegative(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'0'..=b'9' | b'.' => {
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
                let text = &src[start..i];
                let v = text.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number {text:?}"),
                })?;
                out.push((Tok::Num(v), start));
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    offset: i,
                    message: format!("unexpected character {ch:?}"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self) -> ParseError {
        let message = match self.peek() {
            Tok::End => "unexpected end of input".to_string(),
            Tok::Num(v) => format!("unexpected number {v}"),
            Tok::Ident(s) => format!("unexpected identifier {s:?}"),
            Tok::Op(c) => format!("unexpected '{c}'"),
            Tok::LParen => "unexpected '('".to_string(),
            Tok::RParen => "unexpected ')'".to_string(),
            Tok::Comma => "unexpected ','".to_string(),
        };
        ParseError::Syntax { offset: self.offset(), message }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Op('^') {
            self.bump();
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected());
                }
                self.bump();
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name)
                        .ok_or(ParseError::UnknownIdent { offset, name: name.clone() })?;
                    self.bump();
                    let mut args = Vec::new();
                    if *self.peek() != Tok::RParen {
                        loop {
                            args.push(self.expr()?);
                            match self.peek() {
                                Tok::Comma => {
                                    self.bump();
                                }
                                Tok::RParen => break,
                                _ => return Err(self.unexpected()),
                            }
                        }
                    }
                    self.bump();
                    if args.len() != func.arity() {
                        return Err(ParseError::Arity {
                            offset,
                            func: name,
                            expected: func.arity(),
                            got: args.len(),
                        });
                    }
                    return Ok(Expr::Call(func, args));
                }
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "t" => Ok(Expr::Var(Var::T)),
                    "pi" => Ok(Expr::Pi),
                    _ => Err(ParseError::UnknownIdent { offset, name }),
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected());
    }
    Ok(e)
}

impl Expr {
    pub fn eval(&self, x: f64, t: f64) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::T) => t,
            Expr::Pi => std::f64::consts::PI,
            Expr::Neg(a) => -a.eval(x, t)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, t)?, b.eval(x, t)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero(self.to_string()));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a == 0.0 && b < 0.0 {
                            return Err(EvalError::ZeroToNegative(self.to_string()));
                        }
                        a.powf(b)
                    }
                }
            }
            Expr::Call(f, args) => f.apply(args[0].eval(x, t)?),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite(self.to_string()))
        }
    }

    /// True if `t` occurs anywhere in the expression.
    pub fn depends_on_t(&self) -> bool {
        match self {
            Expr::Var(v) => *v == Var::T,
            Expr::Num(_) | Expr::Pi => false,
            Expr::Neg(a) => a.depends_on_t(),
            Expr::Bin(_, a, b) => a.depends_on_t() || b.depends_on_t(),
            Expr::Call(_, args) => args.iter().any(Expr::depends_on_t),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Bin(BinOp::Pow, ..) => 4,
            Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => 3,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::T) => write!(f, "t"),
            Expr::Pi => write!(f, "pi"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                a.write_at(f, 3)
            }
            Expr::Bin(op, a, b) => {
                let (sym, lmin, rmin) = match op {
                    BinOp::Add => (" + ", 1, 2),
                    BinOp::Sub => (" - ", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                a.write_at(f, lmin)?;
                write!(f, "{sym}")?;
                b.write_at(f, rmin)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    a.write_at(f, 0)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64, t: f64) -> f64 {
        parse_expr(s).unwrap().eval(x, t).unwrap()
    }

    #[test]
    fn lattice_potential_parses() {
        let e = parse_expr("bump(4*x)*sin(20*pi*x)").unwrap();
        let x: f64 = 0.01;
        let want = bump(4.0 * x) * (20.0 * std::f64::consts::PI * x).sin();
        assert_eq!(e.eval(x, 0.0).unwrap(), want);
        assert_eq!(e.eval(0.3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let err = parse_expr("x + * t").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 4, .. }), "{err}");
        assert_eq!(parse_expr("sin(x").unwrap_err().offset(), 5);
        assert_eq!(parse_expr("2x").unwrap_err().offset(), 1);
        assert!(matches!(parse_expr("y + 1"), Err(ParseError::UnknownIdent { offset: 0, .. })));
        assert!(matches!(parse_expr("foo(x)"), Err(ParseError::UnknownIdent { .. })));
        assert!(matches!(parse_expr("x $ 1"), Err(ParseError::Syntax { offset: 2, .. })));
    }

    #[test]
    fn arity_is_checked() {
        let err = parse_expr("sin(x,t)").unwrap_err();
        assert!(matches!(err, ParseError::Arity { expected: 1, got: 2, .. }), "{err}");
        assert!(matches!(parse_expr("cos()"), Err(ParseError::Arity { got: 0, .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(ev("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(ev("8/4/2", 0.0, 0.0), 1.0);
        assert_eq!(ev("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(ev("1 + 2*3", 0.0, 0.0), 7.0);
        assert_eq!(ev("x*t", 2.0, 3.0), 6.0);
        assert_eq!(ev("1.5e-1 + 1E2", 0.0, 0.0), 100.15);
    }

    #[test]
    fn bump_values() {
        assert_eq!(ev("bump(0)", 0.0, 0.0), (-1.0f64).exp());
        assert_eq!(ev("bump(1)", 0.0, 0.0), 0.0);
        assert_eq!(ev("bump(2)", 0.0, 0.0), 0.0);
        let e = parse_expr("bump(3*t-1)*bump(sin(2*pi*(x-t)))").unwrap();
        for x in [-0.9, -0.2, 0.0, 0.4, 0.99] {
            assert_eq!(e.eval(x, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn bump_is_flat_at_support_edge() {
        let mut prev = f64::INFINITY;
        for k in 1..6 {
            let h = 0.1f64.powi(k);
            let slope = (bump(1.0 - h) - bump(1.0 - 2.0 * h)) / h;
            assert!(slope.abs() <= prev);
            prev = slope.abs();
        }
        assert!(prev < 1e-100);
    }

    #[test]
    fn evaluation_errors() {
        assert!(matches!(parse_expr("1/(x-x)").unwrap().eval(1.0, 0.0), Err(EvalError::DivisionByZero(_))));
        assert!(matches!(parse_expr("x^-1").unwrap().eval(0.0, 0.0), Err(EvalError::ZeroToNegative(_))));
        let err = parse_expr("exp(1000*x)").unwrap().eval(1.0, 0.0).unwrap_err();
        assert_eq!(err, EvalError::NonFinite("exp(1000*x)".into()));
    }

    #[test]
    fn printing_reparses() {
        for s in ["-x^2", "(-x)^2", "2^3^2", "(2^3)^2", "1 - (2 - 3)", "a", "--x", "x/(t*2)", "-(1 + x)*t"] {
            if let Ok(e) = parse_expr(s) {
                assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{s} -> {e}");
            }
        }
        assert_eq!(parse_expr("(-x)^2").unwrap().to_string(), "(-x)^2");
        assert_eq!(parse_expr("1-(2-3)").unwrap().to_string(), "1 - (2 - 3)");
    }

    #[test]
    fn time_dependence() {
        assert!(parse_expr("sin(t)*x").unwrap().depends_on_t());
        assert!(!parse_expr("sin(x)").unwrap().depends_on_t());
    }
}
