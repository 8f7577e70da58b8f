//! Arithmetic expressions over `x` and `t` with exact symbolic derivatives.
//!
//! The grammar is deliberately small: literals, the imaginary unit `i`, the
//! two variables, `+ - * /`, integer powers `^`, unary minus, and the
//! functions `exp`, `sin`, `cos`, `sinh`, `cosh`, `sqrt`. Everything here is
//! closed under differentiation, which is what lets the Cauchy solver consume
//! exact data derivatives of any order instead of numerical ones.
//!
//! Precedence: `^` binds tighter than unary minus, then `* /`, then `+ -`.
//! `^` is right-associative and its exponent must fold to a constant integer.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// A variable of the problem domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    T,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::T => "t",
        }
    }
}

/// Built-in unary functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, v: Complex64) -> Complex64 {
        match self {
            Func::Exp => v.exp(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
            Func::Sqrt => v.sqrt(),
        }
    }
}

/// Expression tree. Numeric literals are kept nonnegative (unary minus is an
/// explicit node), which makes printing reparse to the identical tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// The imaginary unit literal `i`.
    I,
    Var(Var),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Neg(Box<Expr>),
    Func(Func, Box<Expr>),
}

/// Parse failure with a byte offset into the source and the token classes
/// that would have been accepted there.
#[derive(Debug, Clone, Error)]
#[error("parse error at byte {offset}: found {found}, expected {}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier '{s}'"),
            Token::Plus => "'+'".into(),
            Token::Minus => "'-'".into(),
            Token::Star => "'*'".into(),
            Token::Slash => "'/'".into(),
            Token::Caret => "'^'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
            Token::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(usize, Token), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((start, Token::End));
        }
        let b = self.src[self.pos];
        let tok = match b {
            b'+' => Token::Plus,
            b'-' => Token::Minus,
            b'*' => Token::Star,
            b'/' => Token::Slash,
            b'^' => Token::Caret,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                if end < self.src.len() && self.src[end] == b'.' {
                    end += 1;
                    while end < self.src.len() && self.src[end].is_ascii_digit() {
                        end += 1;
                    }
                }
                if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                    let mut probe = end + 1;
                    if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-') {
                        probe += 1;
                    }
                    if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                        end = probe;
                        while end < self.src.len() && self.src[end].is_ascii_digit() {
                            end += 1;
                        }
                    }
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    found: format!("malformed number '{text}'"),
                    expected: vec!["number"],
                })?;
                self.pos = end;
                return Ok((start, Token::Num(value)));
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap().to_string();
                self.pos = end;
                return Ok((start, Token::Ident(text)));
            }
            other => {
                return Err(ParseError {
                    offset: start,
                    found: format!("byte '{}'", other as char),
                    expected: vec!["number", "identifier", "operator", "'('", "')'"],
                })
            }
        };
        self.pos += 1;
        Ok((start, tok))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: (usize, Token),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let current = lexer.next()?;
        Ok(Parser { lexer, current })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        self.current = self.lexer.next()?;
        Ok(())
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError { offset: self.current.0, found: self.current.1.describe(), expected }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.current.1 {
                Token::Plus => {
                    self.advance()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.advance()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.current.1 {
                Token::Star => {
                    self.advance()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.advance()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.current.1 == Token::Minus {
            self.advance()?;
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.current.1 != Token::Caret {
            return Ok(base);
        }
        let caret_offset = self.current.0;
        self.advance()?;
        // right-associative: the whole remaining unary chain is the exponent
        let exponent_expr = self.unary()?;
        let exponent = fold_integer(&exponent_expr).ok_or(ParseError {
            offset: caret_offset,
            found: "non-integer exponent".into(),
            expected: vec!["constant integer exponent"],
        })?;
        Ok(Expr::Pow(Box::new(base), exponent))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.current.1.clone() {
            Token::Num(v) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Token::Ident(name) => {
                self.advance()?;
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "t" => Ok(Expr::Var(Var::T)),
                    "i" => Ok(Expr::I),
                    other => {
                        if let Some(func) = Func::from_name(other) {
                            if self.current.1 != Token::LParen {
                                return Err(self.unexpected(vec!["'('"]));
                            }
                            self.advance()?;
                            let arg = self.expr()?;
                            if self.current.1 != Token::RParen {
                                return Err(self.unexpected(vec!["')'"]));
                            }
                            self.advance()?;
                            Ok(Expr::Func(func, Box::new(arg)))
                        } else {
                            Err(ParseError {
                                offset: self.current.0,
                                found: format!("unknown identifier '{other}'"),
                                expected: vec![
                                    "x", "t", "i", "exp", "sin", "cos", "sinh", "cosh", "sqrt",
                                ],
                            })
                        }
                    }
                }
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                if self.current.1 != Token::RParen {
                    return Err(self.unexpected(vec!["')'"]));
                }
                self.advance()?;
                Ok(inner)
            }
            _ => Err(self.unexpected(vec!["number", "variable", "function", "'('", "'-'"])),
        }
    }
}

/// Folds a constant expression to an integer, if it is one.
fn fold_integer(e: &Expr) -> Option<i32> {
    let v = const_eval(e)?;
    if v.im != 0.0 {
        return None;
    }
    let rounded = v.re.round();
    if (v.re - rounded).abs() > 1e-9 || rounded.abs() > i32::MAX as f64 {
        return None;
    }
    Some(rounded as i32)
}

fn const_eval(e: &Expr) -> Option<Complex64> {
    match e {
        Expr::Num(v) => Some(Complex64::new(*v, 0.0)),
        Expr::I => Some(Complex64::I),
        Expr::Var(_) => None,
        Expr::Add(a, b) => Some(const_eval(a)? + const_eval(b)?),
        Expr::Sub(a, b) => Some(const_eval(a)? - const_eval(b)?),
        Expr::Mul(a, b) => Some(const_eval(a)? * const_eval(b)?),
        Expr::Div(a, b) => Some(const_eval(a)? / const_eval(b)?),
        Expr::Pow(a, n) => Some(const_eval(a)?.powi(*n)),
        Expr::Neg(a) => Some(-const_eval(a)?),
        Expr::Func(f, a) => Some(f.apply(const_eval(a)?)),
    }
}

/// Parses an expression from text.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser::new(text)?;
    let expr = parser.expr()?;
    if parser.current.1 != Token::End {
        return Err(parser.unexpected(vec!["operator", "end of input"]));
    }
    Ok(expr)
}

impl Expr {
    /// Evaluates at a point of the `(x, t)` rectangle.
    pub fn eval(&self, x: f64, t: f64) -> Complex64 {
        match self {
            Expr::Num(v) => Complex64::new(*v, 0.0),
            Expr::I => Complex64::I,
            Expr::Var(Var::X) => Complex64::new(x, 0.0),
            Expr::Var(Var::T) => Complex64::new(t, 0.0),
            Expr::Add(a, b) => a.eval(x, t) + b.eval(x, t),
            Expr::Sub(a, b) => a.eval(x, t) - b.eval(x, t),
            Expr::Mul(a, b) => a.eval(x, t) * b.eval(x, t),
            Expr::Div(a, b) => a.eval(x, t) / b.eval(x, t),
            Expr::Pow(a, n) => a.eval(x, t).powi(*n),
            Expr::Neg(a) => -a.eval(x, t),
            Expr::Func(f, a) => f.apply(a.eval(x, t)),
        }
    }

    /// True if the expression mentions the variable.
    pub fn uses(&self, var: Var) -> bool {
        match self {
            Expr::Num(_) | Expr::I => false,
            Expr::Var(v) => *v == var,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.uses(var) || b.uses(var)
            }
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Func(_, a) => a.uses(var),
        }
    }

    /// Exact symbolic derivative with light simplification.
    pub fn differentiate(&self, var: Var) -> Expr {
        self.derivative_raw(var).simplified()
    }

    fn derivative_raw(&self, var: Var) -> Expr {
        match self {
            Expr::Num(_) | Expr::I => Expr::Num(0.0),
            Expr::Var(v) => Expr::Num(if *v == var { 1.0 } else { 0.0 }),
            Expr::Add(a, b) => Expr::Add(
                Box::new(a.derivative_raw(var)),
                Box::new(b.derivative_raw(var)),
            ),
            Expr::Sub(a, b) => Expr::Sub(
                Box::new(a.derivative_raw(var)),
                Box::new(b.derivative_raw(var)),
            ),
            Expr::Mul(a, b) => Expr::Add(
                Box::new(Expr::Mul(Box::new(a.derivative_raw(var)), b.clone())),
                Box::new(Expr::Mul(a.clone(), Box::new(b.derivative_raw(var)))),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(Expr::Sub(
                    Box::new(Expr::Mul(Box::new(a.derivative_raw(var)), b.clone())),
                    Box::new(Expr::Mul(a.clone(), Box::new(b.derivative_raw(var)))),
                )),
                Box::new(Expr::Pow(b.clone(), 2)),
            ),
            Expr::Pow(a, n) => Expr::Mul(
                Box::new(Expr::Mul(
                    Box::new(Expr::Num(*n as f64)),
                    Box::new(Expr::Pow(a.clone(), n - 1)),
                )),
                Box::new(a.derivative_raw(var)),
            ),
            Expr::Neg(a) => Expr::Neg(Box::new(a.derivative_raw(var))),
            Expr::Func(f, a) => {
                let inner = a.derivative_raw(var);
                let outer = match f {
                    Func::Exp => Expr::Func(Func::Exp, a.clone()),
                    Func::Sin => Expr::Func(Func::Cos, a.clone()),
                    Func::Cos => Expr::Neg(Box::new(Expr::Func(Func::Sin, a.clone()))),
                    Func::Sinh => Expr::Func(Func::Cosh, a.clone()),
                    Func::Cosh => Expr::Func(Func::Sinh, a.clone()),
                    Func::Sqrt => Expr::Div(
                        Box::new(Expr::Num(1.0)),
                        Box::new(Expr::Mul(
                            Box::new(Expr::Num(2.0)),
                            Box::new(Expr::Func(Func::Sqrt, a.clone())),
                        )),
                    ),
                };
                Expr::Mul(Box::new(outer), Box::new(inner))
            }
        }
    }

    /// Constant folding and identity elimination. Negative constants are
    /// normalized to `Neg(Num)` so printed output reparses node for node.
    pub fn simplified(&self) -> Expr {
        fn num(v: f64) -> Expr {
            if v < 0.0 {
                Expr::Neg(Box::new(Expr::Num(-v)))
            } else {
                Expr::Num(v)
            }
        }
        fn value_of(e: &Expr) -> Option<f64> {
            match e {
                Expr::Num(v) => Some(*v),
                Expr::Neg(inner) => value_of(inner).map(|v| -v),
                _ => None,
            }
        }
        match self {
            Expr::Num(_) | Expr::I | Expr::Var(_) => self.clone(),
            Expr::Add(a, b) => {
                let (a, b) = (a.simplified(), b.simplified());
                match (value_of(&a), value_of(&b)) {
                    (Some(x), Some(y)) => num(x + y),
                    (Some(0.0), _) => b,
                    (_, Some(0.0)) => a,
                    _ => Expr::Add(Box::new(a), Box::new(b)),
                }
            }
            Expr::Sub(a, b) => {
                let (a, b) = (a.simplified(), b.simplified());
                match (value_of(&a), value_of(&b)) {
                    (Some(x), Some(y)) => num(x - y),
                    (_, Some(0.0)) => a,
                    (Some(0.0), _) => Expr::Neg(Box::new(b)).simplified(),
                    _ => Expr::Sub(Box::new(a), Box::new(b)),
                }
            }
            Expr::Mul(a, b) => {
                let (a, b) = (a.simplified(), b.simplified());
                match (value_of(&a), value_of(&b)) {
                    (Some(x), Some(y)) => num(x * y),
                    (Some(0.0), _) | (_, Some(0.0)) => Expr::Num(0.0),
                    (Some(1.0), _) => b,
                    (_, Some(1.0)) => a,
                    _ => Expr::Mul(Box::new(a), Box::new(b)),
                }
            }
            Expr::Div(a, b) => {
                let (a, b) = (a.simplified(), b.simplified());
                match (value_of(&a), value_of(&b)) {
                    (Some(0.0), _) => Expr::Num(0.0),
                    (_, Some(1.0)) => a,
                    _ => Expr::Div(Box::new(a), Box::new(b)),
                }
            }
            Expr::Pow(a, n) => {
                let a = a.simplified();
                match n {
                    0 => Expr::Num(1.0),
                    1 => a,
                    _ => Expr::Pow(Box::new(a), *n),
                }
            }
            Expr::Neg(a) => {
                let a = a.simplified();
                match a {
                    Expr::Num(0.0) => Expr::Num(0.0),
                    Expr::Neg(inner) => *inner,
                    _ => Expr::Neg(Box::new(a)),
                }
            }
            Expr::Func(f, a) => Expr::Func(*f, Box::new(a.simplified())),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::I | Expr::Var(_) | Expr::Func(..) => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn wrap(f: &mut fmt::Formatter<'_>, e: &Expr, need: u8) -> fmt::Result {
            if e.precedence() < need {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::I => write!(f, "i"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Add(a, b) => {
                wrap(f, a, 1)?;
                write!(f, "+")?;
                wrap(f, b, 2)
            }
            Expr::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, "-")?;
                wrap(f, b, 2)
            }
            Expr::Mul(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "*")?;
                wrap(f, b, 3)
            }
            Expr::Div(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "/")?;
                wrap(f, b, 5)
            }
            Expr::Pow(a, n) => {
                wrap(f, a, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 3)
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
