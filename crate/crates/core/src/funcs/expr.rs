//! Expression trees over the single variable `x`.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr    := term   (('+' | '-') term)*
//! term    := unary  (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' ['-'] integer)?
//! atom    := number | 'x' | '(' expr ')'
//!          | ('min' | 'max') '(' expr ',' expr ')'
//!          | 'abs' '(' expr ')'
//!          | builtin
//! builtin := 'polya' | 'mix'
//!          | ('const' | 'linear' | 'quartic') '(' constexpr ')'
//!          | 'family' '(' expr ',' constexpr ')'
//! ```
//!
//! `constexpr` is any `expr` that does not mention `x`.

use std::fmt;

use crate::error::{Error, Result};

/// A named member of the builtin catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum Builtin {
    /// `f ≡ c`.
    Const(f64),
    /// `1/2 + a (x - 1/2)`, `|a| < 1`.
    Linear(f64),
    /// `f(x) = x`.
    Polya,
    /// `1/2 + c (x - 1/2)^4`, `0 < c <= 8`.
    Quartic(f64),
    /// `1/2 + 1.5 (x - 1/2)^2 - 8 (x - 1/2)^4`.
    Mix,
    /// `(1 + min(u (2 f - 1), 1)) / 2`.
    Family(Box<Expr>, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Builtin(Builtin),
}

/// Value with first and second derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    fn constant(v: f64) -> Jet {
        Jet { v, d1: 0.0, d2: 0.0 }
    }
    fn var(x: f64) -> Jet {
        Jet { v: x, d1: 1.0, d2: 0.0 }
    }
    fn scale(self, s: f64) -> Jet {
        Jet { v: self.v * s, d1: self.d1 * s, d2: self.d2 * s }
    }
}

impl Builtin {
    pub fn check(&self) -> Result<()> {
        match *self {
            Builtin::Const(c) if !(c > 0.0 && c <= 1.0) => {
                Err(Error::InvalidParameter(format!("const({c}) needs 0 < c <= 1")))
            }
            Builtin::Linear(a) if !(a.abs() < 1.0) => {
                Err(Error::InvalidParameter(format!("linear({a}) needs |a| < 1")))
            }
            Builtin::Quartic(c) if !(c > 0.0 && c <= 8.0) => {
                Err(Error::InvalidParameter(format!("quartic({c}) needs 0 < c <= 8")))
            }
            Builtin::Family(_, u) if !(u >= 0.0 && u.is_finite()) => {
                Err(Error::InvalidParameter(format!("family scale u = {u} must be >= 0")))
            }
            _ => Ok(()),
        }
    }

    #[inline]
    fn eval(&self, x: f64) -> f64 {
        match self {
            Builtin::Const(c) => *c,
            Builtin::Linear(a) => 0.5 + a * (x - 0.5),
            Builtin::Polya => x,
            Builtin::Quartic(c) => {
                let t = x - 0.5;
                let t2 = t * t;
                0.5 + c * t2 * t2
            }
            Builtin::Mix => {
                let t = x - 0.5;
                let t2 = t * t;
                0.5 + 1.5 * t2 - 8.0 * t2 * t2
            }
            Builtin::Family(base, u) => {
                let g = u * (2.0 * base.eval(x) - 1.0);
                0.5 * (1.0 + g.min(1.0))
            }
        }
    }

    fn jet(&self, x: f64) -> Jet {
        let t = x - 0.5;
        match self {
            Builtin::Const(c) => Jet::constant(*c),
            Builtin::Linear(a) => Jet { v: 0.5 + a * t, d1: *a, d2: 0.0 },
            Builtin::Polya => Jet::var(x),
            Builtin::Quartic(c) => Jet {
                v: 0.5 + c * t.powi(4),
                d1: 4.0 * c * t.powi(3),
                d2: 12.0 * c * t * t,
            },
            Builtin::Mix => Jet {
                v: 0.5 + 1.5 * t * t - 8.0 * t.powi(4),
                d1: 3.0 * t - 32.0 * t.powi(3),
                d2: 3.0 - 96.0 * t * t,
            },
            Builtin::Family(base, u) => {
                let b = base.jet(x);
                let g = u * (2.0 * b.v - 1.0);
                if g <= 1.0 {
                    Jet { v: 0.5 * (1.0 + g), d1: u * b.d1, d2: u * b.d2 }
                } else {
                    Jet::constant(1.0)
                }
            }
        }
    }
}

impl Expr {
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(c) => *c,
            Expr::X => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, n) => a.eval(x).powi(*n),
            Expr::Min(a, b) => a.eval(x).min(b.eval(x)),
            Expr::Max(a, b) => a.eval(x).max(b.eval(x)),
            Expr::Abs(a) => a.eval(x).abs(),
            Expr::Builtin(b) => b.eval(x),
        }
    }

    /// Forward-mode second-order derivative. `min`, `max` and `abs`
    /// differentiate along the active branch; ties take the left operand.
    pub fn jet(&self, x: f64) -> Jet {
        match self {
            Expr::Num(c) => Jet::constant(*c),
            Expr::X => Jet::var(x),
            Expr::Neg(a) => a.jet(x).scale(-1.0),
            Expr::Add(a, b) => {
                let (a, b) = (a.jet(x), b.jet(x));
                Jet { v: a.v + b.v, d1: a.d1 + b.d1, d2: a.d2 + b.d2 }
            }
            Expr::Sub(a, b) => {
                let (a, b) = (a.jet(x), b.jet(x));
                Jet { v: a.v - b.v, d1: a.d1 - b.d1, d2: a.d2 - b.d2 }
            }
            Expr::Mul(a, b) => mul(a.jet(x), b.jet(x)),
            Expr::Div(a, b) => {
                let b = b.jet(x);
                let r = 1.0 / b.v;
                let inv = Jet {
                    v: r,
                    d1: -b.d1 * r * r,
                    d2: 2.0 * b.d1 * b.d1 * r * r * r - b.d2 * r * r,
                };
                mul(a.jet(x), inv)
            }
            Expr::Pow(a, n) => {
                let a = a.jet(x);
                let n = *n;
                if n == 0 {
                    return Jet::constant(1.0);
                }
                let nf = n as f64;
                let p1 = a.v.powi(n - 1);
                let p2 = if !(0..2).contains(&n) { a.v.powi(n - 2) } else { 0.0 };
                Jet {
                    v: a.v.powi(n),
                    d1: nf * p1 * a.d1,
                    d2: nf * (nf - 1.0) * p2 * a.d1 * a.d1 + nf * p1 * a.d2,
                }
            }
            Expr::Min(a, b) => {
                let (a, b) = (a.jet(x), b.jet(x));
                if a.v <= b.v {
                    a
                } else {
                    b
                }
            }
            Expr::Max(a, b) => {
                let (a, b) = (a.jet(x), b.jet(x));
                if a.v >= b.v {
                    a
                } else {
                    b
                }
            }
            Expr::Abs(a) => {
                let a = a.jet(x);
                if a.v >= 0.0 {
                    a
                } else {
                    a.scale(-1.0)
                }
            }
            Expr::Builtin(b) => b.jet(x),
        }
    }

    pub fn mentions_x(&self) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::X => true,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Abs(a) => a.mentions_x(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Min(a, b)
            | Expr::Max(a, b) => a.mentions_x() || b.mentions_x(),
            Expr::Builtin(Builtin::Const(_)) => false,
            Expr::Builtin(_) => true,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Expr::X | Expr::Builtin(Builtin::Polya))
    }
}

fn mul(a: Jet, b: Jet) -> Jet {
    Jet {
        v: a.v * b.v,
        d1: a.d1 * b.v + a.v * b.d1,
        d2: a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2,
    }
}

fn fmt_num(c: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c < 0.0 {
        write!(f, "(-{})", -c)
    } else {
        write!(f, "{c}")
    }
}

/// Fully parenthesised form; reparses to an evaluator that agrees exactly.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => fmt_num(*c, f),
            Expr::X => write!(f, "x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, n) => write!(f, "({a}^{n})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Abs(a) => write!(f, "abs({a})"),
            Expr::Builtin(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Const(c) => write!(f, "const({c})"),
            Builtin::Linear(a) => {
                write!(f, "linear(")?;
                fmt_num(*a, f)?;
                write!(f, ")")
            }
            Builtin::Polya => write!(f, "polya"),
            Builtin::Quartic(c) => write!(f, "quartic({c})"),
            Builtin::Mix => write!(f, "mix"),
            Builtin::Family(base, u) => write!(f, "family({base}, {u})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
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
            let v: f64 = text.parse().map_err(|_| Error::Syntax {
                pos: start,
                msg: format!("malformed number `{text}`"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Syntax { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    at: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            self.err(format!("expected `{op}`"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            match self.peek() {
                Some(Tok::Num(v)) if v.fract() == 0.0 && *v <= i32::MAX as f64 => {
                    let n = *v as i32;
                    self.at += 1;
                    Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
                }
                _ => self.err("exponent must be an integer literal"),
            }
        } else {
            Ok(base)
        }
    }

    fn constant_arg(&mut self, name: &str) -> Result<f64> {
        let pos = self.pos();
        let e = self.expr()?;
        if e.mentions_x() {
            return Err(Error::Syntax {
                pos,
                msg: format!("argument of `{name}` must not depend on x"),
            });
        }
        Ok(e.eval(0.0))
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of expression"),
        };
        let start = self.pos();
        self.at += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Op(c) => {
                self.at -= 1;
                self.err(format!("unexpected `{c}`"))
            }
            Tok::Ident(name) => {
                let b = match name.as_str() {
                    "x" => return Ok(Expr::X),
                    "polya" => Builtin::Polya,
                    "mix" => Builtin::Mix,
                    "min" | "max" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(',')?;
                        let b = self.expr()?;
                        self.expect(')')?;
                        let (a, b) = (Box::new(a), Box::new(b));
                        return Ok(if name == "min" { Expr::Min(a, b) } else { Expr::Max(a, b) });
                    }
                    "abs" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(')')?;
                        return Ok(Expr::Abs(Box::new(a)));
                    }
                    "const" | "linear" | "quartic" => {
                        self.expect('(')?;
                        let c = self.constant_arg(&name)?;
                        self.expect(')')?;
                        match name.as_str() {
                            "const" => Builtin::Const(c),
                            "linear" => Builtin::Linear(c),
                            _ => Builtin::Quartic(c),
                        }
                    }
                    "family" => {
                        self.expect('(')?;
                        let base = self.expr()?;
                        self.expect(',')?;
                        let u = self.constant_arg("family")?;
                        self.expect(')')?;
                        Builtin::Family(Box::new(base), u)
                    }
                    other => {
                        return Err(Error::Syntax {
                            pos: start,
                            msg: format!("unknown name `{other}`"),
                        })
                    }
                };
                b.check()?;
                Ok(Expr::Builtin(b))
            }
        }
    }
}

/// Parse an expression in `x`.
pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks: &toks, at: 0, end: src.len() };
    let e = p.expr()?;
    if p.at != toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_unary_minus() {
        let e = parse("1 + 2*3 - -x^2").unwrap();
        assert_eq!(e.eval(3.0), 1.0 + 6.0 + 9.0);
        assert_eq!(parse("-x^2").unwrap().eval(3.0), -9.0);
        assert_eq!(parse("2^-1").unwrap().eval(0.0), 0.5);
        assert_eq!(parse("1e-1 * 10").unwrap().eval(0.0), 1.0);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("0.5 + * x") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("{other:?}"),
        }
        match parse("x^1.5") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(x"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse("y"), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(parse("x $"), Err(Error::Syntax { pos: 2, .. })));
        assert!(matches!(parse("const(x)"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn builtin_parameter_ranges() {
        assert!(matches!(parse("linear(1)"), Err(Error::InvalidParameter(_))));
        assert!(matches!(parse("quartic(9)"), Err(Error::InvalidParameter(_))));
        assert!(matches!(parse("const(0)"), Err(Error::InvalidParameter(_))));
        assert!(matches!(parse("family(mix, -1)"), Err(Error::InvalidParameter(_))));
        assert!(parse("linear(-0.5)").is_ok());
    }

    #[test]
    fn jets_match_hand_derivatives() {
        let e = parse("0.5 + 2*(x-0.5)^4").unwrap();
        let j = e.jet(0.75);
        assert!((j.v - (0.5 + 2.0 * 0.25f64.powi(4))).abs() < 1e-15);
        assert!((j.d1 - 8.0 * 0.25f64.powi(3)).abs() < 1e-15);
        assert!((j.d2 - 24.0 * 0.25f64.powi(2)).abs() < 1e-15);
        let q = parse("1/(1+x)").unwrap().jet(1.0);
        assert!((q.d1 + 0.25).abs() < 1e-15);
        assert!((q.d2 - 0.25).abs() < 1e-15);
    }

    #[test]
    fn builtin_and_expanded_forms_agree() {
        let pairs = [
            ("quartic(2)", "0.5 + 2*(x-0.5)^4"),
            ("mix", "0.5 + 1.5*(x-0.5)^2 - 8*(x-0.5)^4"),
            ("linear(0.4)", "0.5 + 0.4*(x-0.5)"),
            ("family(quartic(2), 8)", "(1 + min(8*(2*(0.5 + 2*(x-0.5)^4) - 1), 1))/2"),
        ];
        for (a, b) in pairs {
            let (a, b) = (parse(a).unwrap(), parse(b).unwrap());
            for i in 0..=100 {
                let x = i as f64 / 100.0;
                assert!((a.eval(x) - b.eval(x)).abs() < 1e-15, "{a} vs {b} at {x}");
                let (ja, jb) = (a.jet(x), b.jet(x));
                assert!((ja.d1 - jb.d1).abs() < 1e-12);
                assert!((ja.d2 - jb.d2).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn display_reparses() {
        for src in ["0.5 + 2*(x-0.5)^4", "linear(-0.3)", "family(mix, 2.5)", "-x^-2 + abs(x - 0.1)"] {
            let e = parse(src).unwrap();
            let again = parse(&e.to_string()).unwrap();
            assert_eq!(e.eval(0.3), again.eval(0.3), "{src} -> {e}");
        }
    }
}
