use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use super::{DslError, DslErrorKind, SourceSpan};
use crate::scalars::{Field, GaussianRational as Q};

/// Largest exponent accepted after `^`.
const MAX_EXPONENT: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Int(BigInt),
    Imag(BigInt),
    Ident(String),
    Sym(char),
    Ne,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Imag(n) => write!(f, "{n}i"),
            Tok::Ident(s) => f.write_str(s),
            Tok::Sym(c) => write!(f, "{c}"),
            Tok::Ne => f.write_str("!="),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn lex(line: &str, line_no: usize) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut p = 0;
    let span = |a: usize, b: usize| SourceSpan::new(line_no, a + 1, b + 1);
    while p < chars.len() {
        let c = chars[p];
        if c.is_whitespace() {
            p += 1;
        } else if c.is_ascii_digit() {
            let start = p;
            while p < chars.len() && chars[p].is_ascii_digit() {
                p += 1;
            }
            let digits: String = chars[start..p].iter().collect();
            let n: BigInt = digits.parse().expect("ascii digits");
            let imag = p < chars.len()
                && chars[p] == 'i'
                && !chars.get(p + 1).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_');
            if imag {
                p += 1;
                out.push(Token { tok: Tok::Imag(n), span: span(start, p) });
            } else {
                out.push(Token { tok: Tok::Int(n), span: span(start, p) });
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = p;
            while p < chars.len() && (chars[p].is_ascii_alphanumeric() || chars[p] == '_') {
                p += 1;
            }
            let word: String = chars[start..p].iter().collect();
            let tok = if word == "i" { Tok::Imag(BigInt::from(1)) } else { Tok::Ident(word) };
            out.push(Token { tok, span: span(start, p) });
        } else if c == '!' && chars.get(p + 1) == Some(&'=') {
            out.push(Token { tok: Tok::Ne, span: span(p, p + 2) });
            p += 2;
        } else if "+-*/^()=,:".contains(c) {
            out.push(Token { tok: Tok::Sym(c), span: span(p, p + 1) });
            p += 1;
        } else {
            return Err(DslError::syntax(span(p, p + 1), format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

/// Expression nodes. `Basis(prefix, k)` covers `e<k>`, `E<k>` and `A<k>`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Num(BigInt),
    Imag(BigInt),
    Var(String),
    Basis(char, usize),
    C(usize, usize, usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl PartialEq for Expr {
    fn eq(&self, o: &Self) -> bool {
        self.kind == o.kind
    }
}

/// One `coefficient * basis-vector` summand of a linear expression.
pub type Term = (usize, Expr);

impl Expr {
    pub fn new(kind: ExprKind, span: SourceSpan) -> Self {
        Expr { kind, span }
    }

    fn synth(kind: ExprKind) -> Self {
        Expr { kind, span: SourceSpan::default() }
    }

    pub fn int(n: i64) -> Self {
        Self::synth(ExprKind::Num(BigInt::from(n)))
    }

    pub fn var(name: &str) -> Self {
        Self::synth(ExprKind::Var(name.to_string()))
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.kind, ExprKind::Num(n) if *n == BigInt::from(1))
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(&self.kind, ExprKind::Num(n) if n.is_zero())
    }

    /// Canonical expression for a scalar: a leading negation is pulled out so
    /// sums print as `a - b` instead of `a + -b`.
    pub fn from_scalar(q: &Q) -> Self {
        let negative = q.re_num() < &BigInt::zero() || (q.re_num().is_zero() && q.im_num() < &BigInt::zero());
        let shown = if negative { -q } else { q.clone() };
        let body = parse_expr(&shown.to_string(), 0).expect("scalar display is parseable");
        if negative {
            Self::synth(ExprKind::Neg(Box::new(body)))
        } else {
            body
        }
    }

    fn children(&self) -> Vec<&Expr> {
        use ExprKind::*;
        match &self.kind {
            Num(_) | Imag(_) | Var(_) | Basis(..) | C(..) => vec![],
            Neg(a) | Pow(a, _) => vec![a],
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => vec![a, b],
        }
    }

    pub fn any(&self, pred: &dyn Fn(&ExprKind) -> bool) -> bool {
        pred(&self.kind) || self.children().into_iter().any(|c| c.any(pred))
    }

    pub fn contains_basis(&self) -> bool {
        self.any(&|k| matches!(k, ExprKind::Basis(..)))
    }

    pub fn contains_c(&self) -> bool {
        self.any(&|k| matches!(k, ExprKind::C(..)))
    }

    /// First node (pre-order) matching `pred`.
    pub fn find(&self, pred: &dyn Fn(&ExprKind) -> bool) -> Option<&Expr> {
        if pred(&self.kind) {
            return Some(self);
        }
        self.children().into_iter().find_map(|c| c.find(pred))
    }

    /// Largest index appearing in a `c(i,j,k)` atom, 0 if none.
    pub fn max_c_index(&self) -> usize {
        let own = match self.kind {
            ExprKind::C(i, j, k) => i.max(j).max(k),
            _ => 0,
        };
        self.children().into_iter().map(Expr::max_c_index).fold(own, usize::max)
    }

    pub fn vars(&self) -> Vec<(&str, &SourceSpan)> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<(&'a str, &'a SourceSpan)>) {
        if let ExprKind::Var(v) = &self.kind {
            out.push((v, &self.span));
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    /// Evaluates over `F`; `atom` supplies values for `Var`, `C` and `Basis`
    /// nodes.
    pub fn eval<F: Field>(&self, atom: &mut dyn FnMut(&Expr) -> Result<F, DslError>) -> Result<F, DslError> {
        use ExprKind::*;
        Ok(match &self.kind {
            Num(n) => F::from_scalar(&Q::from_bigint(n.clone())),
            Imag(n) => F::from_scalar(&(&Q::from_bigint(n.clone()) * &Q::i())),
            Var(_) | C(..) | Basis(..) => atom(self)?,
            Neg(a) => a.eval(atom)?.negated(),
            Add(a, b) => a.eval(atom)?.plus(&b.eval(atom)?),
            Sub(a, b) => a.eval(atom)?.minus(&b.eval(atom)?),
            Mul(a, b) => a.eval(atom)?.times(&b.eval(atom)?),
            Div(a, b) => {
                let num = a.eval(atom)?;
                let den = b.eval(atom)?;
                num.quotient(&den)
                    .ok_or_else(|| DslError::new(DslErrorKind::Evaluation, b.span.clone(), "division by zero"))?
            }
            Pow(a, e) => {
                let base = a.eval(atom)?;
                field_pow(&base, *e)
                    .ok_or_else(|| DslError::new(DslErrorKind::Evaluation, self.span.clone(), "zero to a negative power"))?
            }
        })
    }

    /// Splits a linear expression in basis vectors with the given prefix into
    /// `(k, coefficient)` terms, in order of appearance (repeats are kept).
    pub fn linear_terms(&self, prefix: char) -> Result<Vec<Term>, DslError> {
        use ExprKind::*;
        let nonlinear = |e: &Expr| DslError::syntax(e.span.clone(), "expression is not linear in the basis vectors");
        match &self.kind {
            Basis(p, k) if *p == prefix => Ok(vec![(*k, Expr::int(1))]),
            Basis(p, _) => Err(DslError::syntax(self.span.clone(), format!("expected {prefix}<k>, found {p}-vector"))),
            _ if !self.contains_basis() => {
                if self.is_zero_literal() {
                    Ok(vec![])
                } else {
                    Err(DslError::syntax(self.span.clone(), format!("scalar term without a basis vector {prefix}<k>")))
                }
            }
            Neg(a) => Ok(a.linear_terms(prefix)?.into_iter().map(|(k, c)| (k, negate(c))).collect()),
            Add(a, b) => {
                let mut v = a.linear_terms(prefix)?;
                v.extend(b.linear_terms(prefix)?);
                Ok(v)
            }
            Sub(a, b) => {
                let mut v = a.linear_terms(prefix)?;
                v.extend(b.linear_terms(prefix)?.into_iter().map(|(k, c)| (k, negate(c))));
                Ok(v)
            }
            Mul(a, b) => match (a.contains_basis(), b.contains_basis()) {
                (false, true) => Ok(b.linear_terms(prefix)?.into_iter().map(|(k, c)| (k, scale_left(a, c))).collect()),
                (true, false) => Ok(a.linear_terms(prefix)?.into_iter().map(|(k, c)| (k, scale_right(c, b))).collect()),
                _ => Err(nonlinear(self)),
            },
            Div(a, b) if !b.contains_basis() => Ok(a
                .linear_terms(prefix)?
                .into_iter()
                .map(|(k, c)| (k, Expr::synth(Div(Box::new(c), b.clone()))))
                .collect()),
            _ => Err(nonlinear(self)),
        }
    }

    fn prec(&self) -> u8 {
        use ExprKind::*;
        match &self.kind {
            Add(..) | Sub(..) => 1,
            Mul(..) | Div(..) => 2,
            Neg(_) => 3,
            Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        use ExprKind::*;
        match &self.kind {
            Num(n) => write!(f, "{n}"),
            Imag(n) if *n == BigInt::from(1) => f.write_str("i"),
            Imag(n) => write!(f, "{n}i"),
            Var(v) => f.write_str(v),
            Basis(p, k) => write!(f, "{p}{k}"),
            C(i, j, k) => write!(f, "c({i},{j},{k})"),
            Neg(a) => {
                f.write_str("-")?;
                a.fmt_at(f, 3)
            }
            Add(a, b) | Sub(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(if matches!(self.kind, Add(..)) { " + " } else { " - " })?;
                b.fmt_at(f, 2)
            }
            Mul(a, b) | Div(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str(if matches!(self.kind, Mul(..)) { "*" } else { "/" })?;
                b.fmt_at(f, 3)
            }
            Pow(a, e) => {
                a.fmt_at(f, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

fn negate(c: Expr) -> Expr {
    Expr::synth(ExprKind::Neg(Box::new(c)))
}

fn scale_left(factor: &Expr, c: Expr) -> Expr {
    if c.is_one() {
        factor.clone()
    } else {
        Expr::synth(ExprKind::Mul(Box::new(factor.clone()), Box::new(c)))
    }
}

fn scale_right(c: Expr, factor: &Expr) -> Expr {
    if c.is_one() {
        factor.clone()
    } else {
        Expr::synth(ExprKind::Mul(Box::new(c), Box::new(factor.clone())))
    }
}

/// Prints `Σ c_k * <prefix>k` with leading negations turned into `-`.
pub(crate) fn fmt_terms(terms: &[Term], prefix: char) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (n, (k, c)) in terms.iter().enumerate() {
        let (neg, body) = match &c.kind {
            ExprKind::Neg(inner) => (true, inner.as_ref()),
            _ => (false, c),
        };
        match (n, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if body.is_one() {
            out.push_str(&format!("{prefix}{k}"));
        } else {
            out.push_str(&format!("{}*{prefix}{k}", Paren(body, 2)));
        }
    }
    out
}

/// Displays an expression parenthesized for the given context precedence.
pub(crate) struct Paren<'a>(pub &'a Expr, pub u8);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_at(f, self.1)
    }
}

pub(crate) fn field_pow<F: Field>(x: &F, e: i64) -> Option<F> {
    let base = if e < 0 { x.inv()? } else { x.clone() };
    let mut n = e.unsigned_abs();
    let mut acc = F::one();
    let mut sq = base;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.times(&sq);
        }
        n >>= 1;
        if n > 0 {
            sq = sq.times(&sq);
        }
    }
    Some(acc)
}

/// Recursive-descent parser over the tokens of one line.
pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    line: usize,
    line_len: usize,
}

impl Parser {
    pub fn new(line: &str, line_no: usize) -> Result<Self, DslError> {
        Ok(Parser { toks: lex(line, line_no)?, pos: 0, line: line_no, line_len: line.chars().count() })
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.toks.get(self.pos + off).map(|t| &t.tok)
    }

    /// Span of the current token, or the end of the line.
    pub fn here(&self) -> SourceSpan {
        match self.toks.get(self.pos) {
            Some(t) => t.span.clone(),
            None => SourceSpan::new(self.line, self.line_len + 1, self.line_len + 2),
        }
    }

    pub fn line_span(&self) -> SourceSpan {
        SourceSpan::new(self.line, 1, self.line_len + 1)
    }

    pub fn err(&self, msg: impl Into<String>) -> DslError {
        DslError::syntax(self.here(), msg)
    }

    fn unexpected(&self, what: &str) -> DslError {
        match self.peek() {
            Some(t) => self.err(format!("expected {what}, found `{t}`")),
            None => self.err(format!("expected {what}, found end of line")),
        }
    }

    pub fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> Result<SourceSpan, DslError> {
        if self.peek() == Some(&Tok::Sym(c)) {
            Ok(self.next().unwrap().span)
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), DslError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(String, SourceSpan), DslError> {
        match self.peek() {
            Some(Tok::Ident(w)) => {
                let w = w.clone();
                Ok((w, self.next().unwrap().span))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    pub fn expect_usize(&mut self) -> Result<(usize, SourceSpan), DslError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let span = self.here();
                let v = n.to_usize().filter(|&v| v <= 1 << 16).ok_or_else(|| self.err("integer out of range"))?;
                self.pos += 1;
                Ok((v, span))
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    /// `<prefix><k>` as a single identifier token, e.g. `e3`.
    pub fn expect_indexed(&mut self, prefix: char) -> Result<(usize, SourceSpan), DslError> {
        if let Some(Tok::Ident(w)) = self.peek() {
            if let Some(k) = split_indexed(w).filter(|(p, _)| *p == prefix).map(|(_, k)| k) {
                let span = self.here();
                self.pos += 1;
                return match k {
                    Some(k) if k >= 1 => Ok((k, span)),
                    _ => Err(DslError::new(DslErrorKind::IndexOutOfRange, span, "basis index out of range")),
                };
            }
        }
        Err(self.unexpected(&format!("{prefix}<k>")))
    }

    pub fn expect_end(&self) -> Result<(), DslError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    pub fn expr(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.term()?;
        loop {
            let add = if self.eat_sym('+') {
                true
            } else if self.eat_sym('-') {
                false
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            let span = lhs.span.join(&rhs.span);
            let kind = if add { ExprKind::Add(Box::new(lhs), Box::new(rhs)) } else { ExprKind::Sub(Box::new(lhs), Box::new(rhs)) };
            lhs = Expr::new(kind, span);
        }
    }

    fn term(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let mul = if self.eat_sym('*') {
                true
            } else if self.eat_sym('/') {
                false
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            let span = lhs.span.join(&rhs.span);
            let kind = if mul { ExprKind::Mul(Box::new(lhs), Box::new(rhs)) } else { ExprKind::Div(Box::new(lhs), Box::new(rhs)) };
            lhs = Expr::new(kind, span);
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        let start = self.here();
        if self.eat_sym('-') {
            let a = self.unary()?;
            let span = start.join(&a.span);
            return Ok(Expr::new(ExprKind::Neg(Box::new(a)), span));
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, DslError> {
        let base = self.atom()?;
        if !self.eat_sym('^') {
            return Ok(base);
        }
        let paren = self.eat_sym('(');
        let neg = self.eat_sym('-');
        let (mag, span) = match self.peek() {
            Some(Tok::Int(n)) => {
                let m = n.to_u64().filter(|&m| m <= MAX_EXPONENT).ok_or_else(|| self.err("exponent too large"))?;
                (m as i64, self.next().unwrap().span)
            }
            _ => return Err(self.unexpected("an integer exponent")),
        };
        let mut end = span;
        if paren {
            end = self.expect_sym(')')?;
        }
        let e = if neg { -mag } else { mag };
        let span = base.span.join(&end);
        Ok(Expr::new(ExprKind::Pow(Box::new(base), e), span))
    }

    fn atom(&mut self) -> Result<Expr, DslError> {
        let span = self.here();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Expr::new(ExprKind::Num(n), span))
            }
            Some(Tok::Imag(n)) => {
                self.pos += 1;
                Ok(Expr::new(ExprKind::Imag(n), span))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let mut e = self.expr()?;
                let end = self.expect_sym(')')?;
                e.span = span.join(&end);
                Ok(e)
            }
            Some(Tok::Ident(w)) if w == "c" && self.peek_at(1) == Some(&Tok::Sym('(')) => {
                self.pos += 2;
                let (i, _) = self.expect_usize()?;
                self.expect_sym(',')?;
                let (j, _) = self.expect_usize()?;
                self.expect_sym(',')?;
                let (k, _) = self.expect_usize()?;
                let end = self.expect_sym(')')?;
                let span = span.join(&end);
                if i == 0 || j == 0 || k == 0 {
                    return Err(DslError::new(DslErrorKind::IndexOutOfRange, span, "structure constant indices are 1-based"));
                }
                Ok(Expr::new(ExprKind::C(i, j, k), span))
            }
            Some(Tok::Ident(w)) => {
                self.pos += 1;
                match split_indexed(&w) {
                    Some((p, Some(k))) if k >= 1 => Ok(Expr::new(ExprKind::Basis(p, k), span)),
                    Some(_) => Err(DslError::new(DslErrorKind::IndexOutOfRange, span, "basis index out of range")),
                    None => Ok(Expr::new(ExprKind::Var(w), span)),
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }
}

/// `e12` → `('e', Some(12))`; `None` when the word is not of that shape.
fn split_indexed(w: &str) -> Option<(char, Option<usize>)> {
    let mut chars = w.chars();
    let p = chars.next()?;
    let rest = chars.as_str();
    if !matches!(p, 'e' | 'E' | 'A') || rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((p, rest.parse().ok().filter(|&k: &usize| k <= 1 << 16)))
}

/// Parses a complete expression; `line_no` is used for error spans.
pub fn parse_expr(text: &str, line_no: usize) -> Result<Expr, DslError> {
    let mut p = Parser::new(text, line_no)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

/// Evaluates a scalar expression with no free symbols.
pub(crate) fn eval_scalar(e: &Expr) -> Result<Q, DslError> {
    e.eval(&mut |a: &Expr| Err(DslError::new(DslErrorKind::UnknownSymbol, a.span.clone(), format!("unexpected `{a}` in a scalar"))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::RatFunc;
    use proptest::prelude::*;

    fn q(s: &str) -> Q {
        eval_scalar(&parse_expr(s, 1).unwrap()).unwrap()
    }

    #[test]
    fn scalar_literals() {
        assert_eq!(q("-2i/5"), Q::new(0.into(), (-2).into(), 5.into()).unwrap());
        assert_eq!(q("(3+2i)/7"), Q::new(3.into(), 2.into(), 7.into()).unwrap());
        assert_eq!(q("1-i"), Q::complex(1, -1));
        assert_eq!(q("2^-2"), Q::ratio(1, 4).unwrap());
        assert_eq!(q("-2^2"), Q::from_int(-4));
        assert_eq!(q("(1+i)^2"), Q::complex(0, 2));
    }

    #[test]
    fn scalar_display_reparses() {
        for x in [Q::ratio(-2, 5).unwrap(), Q::new(3.into(), 2.into(), 7.into()).unwrap(), Q::complex(0, -1), Q::complex(1, -1)] {
            assert_eq!(q(&x.to_string()), x);
            assert_eq!(eval_scalar(&Expr::from_scalar(&x)).unwrap(), x);
        }
    }

    #[test]
    fn rational_function_in_t() {
        let e = parse_expr("t^2/(2 + t)", 1).unwrap();
        let v: RatFunc = e.eval(&mut |_| Ok(RatFunc::s())).unwrap();
        assert_eq!(v.limit_at(&Q::zero()).unwrap(), Q::zero());
        assert_eq!(v.eval_at(&Q::from_int(2)).unwrap(), Q::from_int(1));
    }

    #[test]
    fn linear_terms() {
        let e = parse_expr("(1-i)*e2 + i*e5 - e3", 1).unwrap();
        let t = e.linear_terms('e').unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(fmt_terms(&t, 'e'), "(1 - i)*e2 + i*e5 - e3");
        assert!(parse_expr("e1*e2", 1).unwrap().linear_terms('e').is_err());
        assert!(parse_expr("e1 + 2", 1).unwrap().linear_terms('e').is_err());
        assert!(parse_expr("0", 1).unwrap().linear_terms('e').unwrap().is_empty());
    }

    #[test]
    fn errors_carry_columns() {
        let err = parse_expr("1 + * 2", 7).unwrap_err();
        assert_eq!((err.span.line, err.span.col_start), (7, 5));
        let err = parse_expr("2 $ 3", 1).unwrap_err();
        assert_eq!(err.span.col_start, 3);
        assert!(parse_expr("t^999999", 1).is_err());
        assert!(parse_expr("e0", 1).is_err());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0i64..20).prop_map(Expr::int),
            (1i64..5).prop_map(|n| Expr::synth(ExprKind::Imag(BigInt::from(n)))),
            prop_oneof![Just("t"), Just("a"), Just("l")].prop_map(Expr::var),
            (1usize..6, 1usize..6, 1usize..6).prop_map(|(i, j, k)| Expr::synth(ExprKind::C(i, j, k))),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            let b = |e: Expr| Box::new(e);
            prop_oneof![
                inner.clone().prop_map(move |a| Expr::synth(ExprKind::Neg(b(a)))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::synth(ExprKind::Add(b(x), b(y)))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::synth(ExprKind::Sub(b(x), b(y)))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::synth(ExprKind::Mul(b(x), b(y)))),
                (inner.clone(), inner.clone()).prop_map(move |(x, y)| Expr::synth(ExprKind::Div(b(x), b(y)))),
                (inner, -3i64..4).prop_map(move |(x, e)| Expr::synth(ExprKind::Pow(b(x), e))),
            ]
        })
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(e in arb_expr()) {
            let text = e.to_string();
            let back = parse_expr(&text, 1).unwrap();
            prop_assert_eq!(back, e, "{}", text);
        }

        #[test]
        fn lexer_never_panics(s in "[ -~]{0,40}") {
            let _ = parse_expr(&s, 1);
        }
    }
}
