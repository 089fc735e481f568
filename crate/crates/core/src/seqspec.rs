//! Parameter-sequence expressions.
//!
//! A sequence `t_i` is written as a small arithmetic expression in the single
//! variable `i`, for example `3/5 - 1/i` or `exp(-abs(sin(i)))`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | 'i' | func '(' expr (',' expr)* ')' | '(' expr ')'
//! func    := sin | exp | abs | pow
//! ```
//!
//! Sequences are 1-indexed; evaluating at `i = 0` is an error.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeqError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown identifier `{name}` at column {column} (the only variable is `i`)")]
    UnknownIdentifier { name: String, column: usize },
    #[error("unknown function `{name}` at column {column} (expected sin, exp, abs or pow)")]
    UnknownFunction { name: String, column: usize },
    #[error("sequence index must be >= 1, got 0")]
    ZeroIndex,
    #[error("division by zero at i = {index}")]
    DivisionByZero { index: u64 },
    #[error("non-finite value {value} at i = {index}")]
    NonFinite { index: u64, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Exp,
    Abs,
    Pow,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        match name {
            "sin" => Some(Func::Sin),
            "exp" => Some(Func::Exp),
            "abs" => Some(Func::Abs),
            "pow" => Some(Func::Pow),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Pow => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Expression tree. `Const` values produced by the parser are never negative;
/// a leading minus always parses as `Neg`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Index,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

const PREC_UNARY: u8 = 3;
const PREC_ATOM: u8 = 4;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, ..) => op.precedence(),
            Expr::Neg(_) => PREC_UNARY,
            Expr::Const(c) if c.is_sign_negative() => PREC_UNARY,
            _ => PREC_ATOM,
        }
    }

    /// True when the expression does not depend on `i`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Index => false,
            Expr::Neg(e) => e.is_constant(),
            Expr::Binary(_, l, r) => l.is_constant() && r.is_constant(),
            Expr::Call(_, args) => args.iter().all(Expr::is_constant),
        }
    }

    fn eval(&self, i: f64, index: u64) -> Result<f64, SeqError> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Index => i,
            Expr::Neg(e) => -e.eval(i, index)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval(i, index)?;
                let b = r.eval(i, index)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(SeqError::DivisionByZero { index });
                        }
                        a / b
                    }
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(i, index)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Exp => a.exp(),
                    Func::Abs => a.abs(),
                    Func::Pow => a.powf(args[1].eval(i, index)?),
                }
            }
        })
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{}` on f64 is the shortest representation that parses back exactly.
            Expr::Const(c) if c.is_sign_negative() => write!(f, "-{}", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Index => f.write_str("i"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_operand(f, e.precedence() < PREC_UNARY)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                l.write_operand(f, l.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                // left-associative: an equal-precedence right operand needs parens
                r.write_operand(f, r.precedence() <= p)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A parsed sequence expression together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqSpec {
    source: String,
    ast: Expr,
}

impl SeqSpec {
    pub fn parse(source: &str) -> Result<Self, SeqError> {
        let ast = Parser::new(source).parse()?;
        Ok(SeqSpec {
            source: source.to_string(),
            ast,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    /// Evaluates `t_i`. Fails for `i = 0`, division by zero, or a non-finite result.
    pub fn eval(&self, i: u64) -> Result<f64, SeqError> {
        if i == 0 {
            return Err(SeqError::ZeroIndex);
        }
        let v = self.ast.eval(i as f64, i)?;
        if !v.is_finite() {
            return Err(SeqError::NonFinite { index: i, value: v });
        }
        Ok(v)
    }

    /// `t_1, ..., t_n`.
    pub fn values(&self, n: usize) -> Result<Vec<f64>, SeqError> {
        (1..=n as u64).map(|i| self.eval(i)).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.ast.is_constant()
    }
}

/// Shorthand for [`SeqSpec::parse`].
pub fn parse_seq(source: &str) -> Result<SeqSpec, SeqError> {
    SeqSpec::parse(source)
}

/// Shorthand for [`SeqSpec::eval`].
pub fn eval_seq(spec: &SeqSpec, i: u64) -> Result<f64, SeqError> {
    spec.eval(i)
}

impl fmt::Display for SeqSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

impl FromStr for SeqSpec {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SeqSpec::parse(s)
    }
}

impl Serialize for SeqSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for SeqSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        SeqSpec::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_col: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            tok: Tok::End,
            tok_col: 1,
        }
    }

    fn column(&self, byte: usize) -> usize {
        self.src[..byte].chars().count() + 1
    }

    fn syntax<T>(&self, column: usize, message: impl Into<String>) -> Result<T, SeqError> {
        Err(SeqError::Syntax {
            column,
            message: message.into(),
        })
    }

    fn bump(&mut self) -> Result<(), SeqError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        self.tok_col = self.column(start);
        let Some(&c) = bytes.get(start) else {
            self.tok = Tok::End;
            return Ok(());
        };
        self.tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                let end = scan_number(bytes, start);
                let text = &self.src[start..end];
                let v: f64 = match text.parse() {
                    Ok(v) => v,
                    Err(_) => return self.syntax(self.tok_col, format!("malformed number `{text}`")),
                };
                self.pos = end;
                self.tok = Tok::Num(v);
                return Ok(());
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = start;
                while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                    end += 1;
                }
                self.pos = end;
                self.tok = Tok::Ident(self.src[start..end].to_string());
                return Ok(());
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return self.syntax(self.tok_col, format!("unexpected character `{ch}`"));
            }
        };
        self.pos = start + 1;
        Ok(())
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SeqError> {
        if self.tok != want {
            return self.syntax(self.tok_col, format!("expected {what}"));
        }
        self.bump()
    }

    fn parse(mut self) -> Result<Expr, SeqError> {
        self.bump()?;
        if self.tok == Tok::End {
            return self.syntax(1, "empty expression");
        }
        let e = self.expr()?;
        if self.tok != Tok::End {
            return self.syntax(self.tok_col, "unexpected trailing input");
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, SeqError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, SeqError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, SeqError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, SeqError> {
        let col = self.tok_col;
        match std::mem::replace(&mut self.tok, Tok::End) {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump()?;
                if self.tok == Tok::LParen {
                    let func = Func::from_name(&name).ok_or(SeqError::UnknownFunction {
                        name: name.clone(),
                        column: col,
                    })?;
                    self.bump()?;
                    let mut args = vec![self.expr()?];
                    while self.tok == Tok::Comma {
                        self.bump()?;
                        args.push(self.expr()?);
                    }
                    if args.len() != func.arity() {
                        return self.syntax(
                            col,
                            format!(
                                "`{}` takes {} argument(s), got {}",
                                func.name(),
                                func.arity(),
                                args.len()
                            ),
                        );
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::Call(func, args))
                } else if name == "i" {
                    Ok(Expr::Index)
                } else {
                    Err(SeqError::UnknownIdentifier { name, column: col })
                }
            }
            Tok::End => self.syntax(col, "unexpected end of input"),
            other => self.syntax(col, format!("unexpected token {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::Comma => "`,`",
        Tok::Num(_) => "number",
        Tok::Ident(_) => "identifier",
        Tok::End => "end of input",
    }
}

fn scan_number(b: &[u8], mut k: usize) -> usize {
    while k < b.len() && b[k].is_ascii_digit() {
        k += 1;
    }
    if k < b.len() && b[k] == b'.' {
        k += 1;
        while k < b.len() && b[k].is_ascii_digit() {
            k += 1;
        }
    }
    // exponent only when digits follow; `2e` is left for the identifier scanner to reject
    if k < b.len() && (b[k] == b'e' || b[k] == b'E') {
        let mut m = k + 1;
        if m < b.len() && (b[m] == b'+' || b[m] == b'-') {
            m += 1;
        }
        if m < b.len() && b[m].is_ascii_digit() {
            while m < b.len() && b[m].is_ascii_digit() {
                m += 1;
            }
            k = m;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(v: f64) -> Box<Expr> {
        Box::new(Expr::Const(v))
    }

    #[test]
    fn parses_reciprocal() {
        let s = parse_seq("1/i").unwrap();
        assert_eq!(*s.ast(), Expr::Binary(BinOp::Div, c(1.0), Box::new(Expr::Index)));
    }

    #[test]
    fn precedence_of_difference_of_quotients() {
        let s = parse_seq("3/5 - 1/i").unwrap();
        let want = Expr::Binary(
            BinOp::Sub,
            Box::new(Expr::Binary(BinOp::Div, c(3.0), c(5.0))),
            Box::new(Expr::Binary(BinOp::Div, c(1.0), Box::new(Expr::Index))),
        );
        assert_eq!(*s.ast(), want);
    }

    #[test]
    fn nested_unary_calls() {
        let s = parse_seq("exp(-abs(sin(i)))").unwrap();
        let want = Expr::Call(
            Func::Exp,
            vec![Expr::Neg(Box::new(Expr::Call(
                Func::Abs,
                vec![Expr::Call(Func::Sin, vec![Expr::Index])],
            )))],
        );
        assert_eq!(*s.ast(), want);
    }

    #[test]
    fn left_associative_and_unary_binds_tighter() {
        let s = parse_seq("1 - 2 - 3").unwrap();
        assert_eq!(s.eval(1).unwrap(), -4.0);
        let s = parse_seq("8 / 4 / 2").unwrap();
        assert_eq!(s.eval(1).unwrap(), 1.0);
        let s = parse_seq("-i * 2").unwrap();
        assert!(matches!(s.ast(), Expr::Binary(BinOp::Mul, l, _) if matches!(**l, Expr::Neg(_))));
    }

    #[test]
    fn evaluates_example_sequences() {
        assert_eq!(eval_seq(&parse_seq("1/i").unwrap(), 4).unwrap(), 0.25);
        // reference values from a 30-digit mpmath evaluation
        let s = eval_seq(&parse_seq("sin(i)").unwrap(), 1).unwrap();
        assert!((s - 0.841_470_984_807_896_5).abs() < 1e-15);
        let e = eval_seq(&parse_seq("exp(-abs(sin(i)))").unwrap(), 1).unwrap();
        assert!((e - 0.431_075_950_645_592_3).abs() < 1e-15);
        assert_eq!(parse_seq("pow(i, 2)").unwrap().eval(3).unwrap(), 9.0);
        assert_eq!(parse_seq("1.5e1 + i").unwrap().eval(1).unwrap(), 16.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_seq(""), Err(SeqError::Syntax { column: 1, .. })));
        assert!(matches!(parse_seq("1 +"), Err(SeqError::Syntax { column: 4, .. })));
        assert!(matches!(parse_seq("(i"), Err(SeqError::Syntax { .. })));
        assert!(matches!(parse_seq("i i"), Err(SeqError::Syntax { column: 3, .. })));
        assert!(matches!(parse_seq("2 $ i"), Err(SeqError::Syntax { column: 3, .. })));
        assert!(matches!(
            parse_seq("1/j"),
            Err(SeqError::UnknownIdentifier { ref name, column: 3 }) if name == "j"
        ));
        assert!(matches!(
            parse_seq("cos(i)"),
            Err(SeqError::UnknownFunction { ref name, column: 1 }) if name == "cos"
        ));
        assert!(matches!(parse_seq("pow(i)"), Err(SeqError::Syntax { .. })));
        assert!(matches!(parse_seq("sin(i, 2)"), Err(SeqError::Syntax { .. })));

        let s = parse_seq("1/(i - 3)").unwrap();
        assert_eq!(s.eval(3), Err(SeqError::DivisionByZero { index: 3 }));
        assert_eq!(s.eval(0), Err(SeqError::ZeroIndex));
        assert!(matches!(
            parse_seq("exp(1000*i)").unwrap().eval(1),
            Err(SeqError::NonFinite { .. })
        ));
    }

    #[test]
    fn prints_readably() {
        let s = parse_seq("3/5-1/i").unwrap();
        assert_eq!(s.to_string(), "3 / 5 - 1 / i");
        let s = parse_seq("1-(2-i)").unwrap();
        assert_eq!(s.to_string(), "1 - (2 - i)");
        let s = parse_seq("-(i+1)*2").unwrap();
        assert_eq!(s.to_string(), "-(i + 1) * 2");
        assert!(parse_seq("sin(i)").unwrap().to_string() == "sin(i)");
    }

    #[test]
    fn constant_detection() {
        assert!(parse_seq("0.5").unwrap().is_constant());
        assert!(parse_seq("sin(2) / 3").unwrap().is_constant());
        assert!(!parse_seq("pow(2, i)").unwrap().is_constant());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0u32..1000, 0u32..4).prop_map(|(m, e)| Expr::Const(m as f64 / 10f64.powi(e as i32))),
            Just(Expr::Index),
        ];
        leaf.prop_recursive(5, 40, 4, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (
                    prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)],
                    inner.clone(),
                    inner.clone()
                )
                    .prop_map(|(op, l, r)| Expr::Binary(op, Box::new(l), Box::new(r))),
                (
                    prop_oneof![Just(Func::Sin), Just(Func::Exp), Just(Func::Abs)],
                    inner.clone()
                )
                    .prop_map(|(f, a)| Expr::Call(f, vec![a])),
                (inner.clone(), inner).prop_map(|(a, b)| Expr::Call(Func::Pow, vec![a, b])),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr(), i in 1u64..50) {
            let printed = e.to_string();
            let once = parse_seq(&printed).unwrap();
            prop_assert_eq!(once.ast(), &e);
            let twice = parse_seq(&once.to_string()).unwrap();
            prop_assert_eq!(twice.ast(), once.ast());
            match (once.eval(i), twice.eval(i)) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a.to_bits(), b.to_bits()),
                (Err(a), Err(b)) => prop_assert_eq!(a.to_string(), b.to_string()),
                (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
            }
        }
    }
}
