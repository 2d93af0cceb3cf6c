//! Closed expression language for update methods.
//!
//! ```text
//! expr    := 'if' cond '{' expr '}' 'else' ( '{' expr '}' | expr-if )
//!          | sum
//! cond    := conj ( '||' conj )*
//! conj    := test ( '&&' test )*
//! test    := 'sub' ( '==' | '!=' ) STRING | '(' cond ')'
//! sum     := product ( ( '+' | '-' ) product )*
//! product := unary ( ( '*' | '/' ) unary )*
//! unary   := '-' unary | power
//! power   := atom ( ( '^' | '**' ) unary )?
//! atom    := NUMBER | NAME | FUNC '(' expr ( ',' expr )* ')' | '(' expr ')'
//! ```
//!
//! Argument names match the declared `func_args` ignoring ASCII case.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::model::SubsystemKind;

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
pub enum ExprError {
    #[error("syntax error at offset {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{0}")]
pub struct EvalError(pub String);

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
    Min,
    Max,
    Abs,
    Sqrt,
    Log,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "min" => Func::Min,
            "max" => Func::Max,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "log" => Func::Log,
            _ => return None,
        })
    }

    fn arity_ok(self, n: usize) -> bool {
        match self {
            Func::Min | Func::Max => n >= 1,
            _ => n == 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cond {
    KindIs(SubsystemKind, bool),
    And(Box<Cond>, Box<Cond>),
    Or(Box<Cond>, Box<Cond>),
}

impl Cond {
    pub fn holds(&self, kind: SubsystemKind) -> bool {
        match self {
            Cond::KindIs(k, eq) => (*k == kind) == *eq,
            Cond::And(a, b) => a.holds(kind) && b.holds(kind),
            Cond::Or(a, b) => a.holds(kind) || b.holds(kind),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Index into the declared argument list.
    Arg(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    If(Cond, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Argument indices the expression reads.
    pub fn args_used(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Num(_) => {}
            Expr::Arg(i) => {
                if !out.contains(i) {
                    out.push(*i);
                }
            }
            Expr::Neg(e) => e.args_used(out),
            Expr::Bin(_, a, b) => {
                a.args_used(out);
                b.args_used(out);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.args_used(out)),
            Expr::If(_, a, b) => {
                a.args_used(out);
                b.args_used(out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Str(String),
    Op(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "{v}"),
            Tok::Name(n) => write!(f, "{n}"),
            Tok::Str(s) => write!(f, "'{s}'"),
            Tok::Op(o) => write!(f, "{o}"),
        }
    }
}

const OPS: [&str; 17] = ["==", "!=", "&&", "||", "**", "+", "-", "*", "/", "^", "(", ")", "{", "}", ",", "×", "÷"];

fn syntax(position: usize, message: impl Into<String>) -> ExprError {
    ExprError::Syntax { position, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        let c = rest.chars().next().unwrap_or(' ');
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && rest[1..].starts_with(|d: char| d.is_ascii_digit())) {
            let mut end = rest.find(|d: char| !(d.is_ascii_digit() || d == '.')).unwrap_or(rest.len());
            let tail = &rest[end..];
            if tail.starts_with(['e', 'E']) {
                let exp = tail[1..].strip_prefix(['+', '-']).unwrap_or(&tail[1..]);
                let digits = exp.find(|d: char| !d.is_ascii_digit()).unwrap_or(exp.len());
                if digits > 0 {
                    end = rest.len() - exp.len() + digits;
                }
            }
            let v: f64 = rest[..end].parse().map_err(|_| syntax(i, format!("bad number {:?}", &rest[..end])))?;
            out.push((i, Tok::Num(v)));
            i += end;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let end = rest.find(|d: char| !(d.is_ascii_alphanumeric() || d == '_')).unwrap_or(rest.len());
            out.push((i, Tok::Name(rest[..end].to_string())));
            i += end;
            continue;
        }
        if c == '\'' || c == '"' {
            let body = &rest[1..];
            let end = body.find(c).ok_or_else(|| syntax(i, "unterminated string"))?;
            out.push((i, Tok::Str(body[..end].to_string())));
            i += end + 2;
            continue;
        }
        let op = OPS
            .iter()
            .find(|o| rest.starts_with(**o))
            .ok_or_else(|| syntax(i, format!("unexpected character {c:?}")))?;
        let tok = match *op {
            "×" => "*",
            "÷" => "/",
            "**" => "^",
            o => o,
        };
        out.push((i, Tok::Op(tok)));
        i += op.len();
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    args: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn unexpected(&self, wanted: &str) -> ExprError {
        match self.peek() {
            Some(t) => syntax(self.offset(), format!("expected {wanted}, found {t}")),
            None => syntax(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn eat(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Op(o)) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: &str) -> Result<(), ExprError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{op}'")))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Name(n)) if n == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        if self.eat_keyword("if") {
            let cond = self.cond()?;
            let then = self.block()?;
            if !self.eat_keyword("else") {
                return Err(self.unexpected("'else'"));
            }
            let otherwise =
                if matches!(self.peek(), Some(Tok::Name(n)) if n == "if") { self.expr()? } else { self.block()? };
            return Ok(Expr::If(cond, Box::new(then), Box::new(otherwise)));
        }
        self.sum()
    }

    fn block(&mut self) -> Result<Expr, ExprError> {
        self.expect("{")?;
        let e = self.expr()?;
        self.expect("}")?;
        Ok(e)
    }

    fn cond(&mut self) -> Result<Cond, ExprError> {
        let mut left = self.conj()?;
        while self.eat("||") {
            left = Cond::Or(Box::new(left), Box::new(self.conj()?));
        }
        Ok(left)
    }

    fn conj(&mut self) -> Result<Cond, ExprError> {
        let mut left = self.test()?;
        while self.eat("&&") {
            left = Cond::And(Box::new(left), Box::new(self.test()?));
        }
        Ok(left)
    }

    fn test(&mut self) -> Result<Cond, ExprError> {
        if self.eat("(") {
            let c = self.cond()?;
            self.expect(")")?;
            return Ok(c);
        }
        if !self.eat_keyword("sub") {
            return Err(self.unexpected("'sub'"));
        }
        let eq = if self.eat("==") {
            true
        } else if self.eat("!=") {
            false
        } else {
            return Err(self.unexpected("'==' or '!='"));
        };
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Str(s)) => {
                let kind =
                    s.parse::<SubsystemKind>().map_err(|_| syntax(at, format!("unknown subsystem kind {s:?}")))?;
                self.pos += 1;
                Ok(Cond::KindIs(kind, eq))
            }
            _ => Err(self.unexpected("a quoted subsystem kind")),
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.product()?;
        loop {
            let op = if self.eat("+") {
                BinOp::Add
            } else if self.eat("-") {
                BinOp::Sub
            } else {
                return Ok(left);
            };
            left = Expr::Bin(op, Box::new(left), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.unary()?;
        loop {
            let op = if self.eat("*") {
                BinOp::Mul
            } else if self.eat("/") {
                BinOp::Div
            } else {
                return Ok(left);
            };
            left = Expr::Bin(op, Box::new(left), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat("^") {
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Op("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(Tok::Name(name)) => {
                let at = self.offset();
                self.pos += 1;
                if self.eat("(") {
                    let func = Func::from_name(&name).ok_or_else(|| ExprError::UnknownIdentifier(name.clone()))?;
                    let mut args = vec![self.expr()?];
                    while self.eat(",") {
                        args.push(self.expr()?);
                    }
                    self.expect(")")?;
                    if !func.arity_ok(args.len()) {
                        return Err(syntax(at, format!("wrong number of arguments to {name}")));
                    }
                    return Ok(Expr::Call(func, args));
                }
                if let Some(i) = self.args.iter().position(|a| *a == name) {
                    return Ok(Expr::Arg(i));
                }
                match self.args.iter().position(|a| a.eq_ignore_ascii_case(&name)) {
                    Some(i) => Ok(Expr::Arg(i)),
                    None if matches!(name.as_str(), "if" | "else" | "sub") => {
                        Err(syntax(at, format!("{name:?} is not allowed here")))
                    }
                    None => Err(ExprError::UnknownIdentifier(name)),
                }
            }
            _ => Err(self.unexpected("a value")),
        }
    }
}

/// Parses `text` against the declared argument names.
pub fn parse_expression(text: &str, args: &[String]) -> Result<Expr, ExprError> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len(), args };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        return Err(p.unexpected("end of input"));
    }
    Ok(e)
}

fn finite(v: f64, what: &str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError(format!("{what} is not a finite number")))
    }
}

/// Evaluates with strict arithmetic: any non-finite intermediate is an error.
pub fn eval_expression(expr: &Expr, kind: SubsystemKind, args: &[f64]) -> Result<f64, EvalError> {
    match expr {
        Expr::Num(v) => finite(*v, "constant"),
        Expr::Arg(i) => args.get(*i).copied().ok_or_else(|| EvalError(format!("argument {i} not supplied"))),
        Expr::Neg(e) => Ok(-eval_expression(e, kind, args)?),
        Expr::Bin(op, a, b) => {
            let (x, y) = (eval_expression(a, kind, args)?, eval_expression(b, kind, args)?);
            match op {
                BinOp::Add => finite(x + y, "sum"),
                BinOp::Sub => finite(x - y, "difference"),
                BinOp::Mul => finite(x * y, "product"),
                BinOp::Div if y == 0.0 => Err(EvalError("division by zero".into())),
                BinOp::Div => finite(x / y, "quotient"),
                BinOp::Pow => finite(x.powf(y), "power"),
            }
        }
        Expr::Call(f, list) => {
            let vals = list.iter().map(|e| eval_expression(e, kind, args)).collect::<Result<Vec<_>, _>>()?;
            match f {
                Func::Min => Ok(vals.into_iter().fold(f64::INFINITY, f64::min)),
                Func::Max => Ok(vals.into_iter().fold(f64::NEG_INFINITY, f64::max)),
                Func::Abs => Ok(vals[0].abs()),
                Func::Sqrt if vals[0] < 0.0 => Err(EvalError("square root of a negative number".into())),
                Func::Sqrt => Ok(vals[0].sqrt()),
                Func::Log if vals[0] <= 0.0 => Err(EvalError("logarithm of a non-positive number".into())),
                Func::Log => Ok(vals[0].ln()),
            }
        }
        Expr::If(c, a, b) => {
            if c.holds(kind) {
                eval_expression(a, kind, args)
            } else {
                eval_expression(b, kind, args)
            }
        }
    }
}
