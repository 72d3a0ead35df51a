use super::expr::{fmt_terms, Expr, ExprKind, Parser, Tok};
use super::{content_lines, DslError, DslErrorKind, SourceSpan};
use crate::degeneration::{AlgebraRef, DegenerationWitness};
use crate::scalars::{GaussianRational as Q, RatFunc};

const RESERVED: [&str; 3] = ["s", "t", "s0"];

pub fn parse_witness(text: &str) -> Result<DegenerationWitness, DslError> {
    let mut lines = content_lines(text);
    let Some((no, header)) = lines.next() else {
        return Err(DslError::syntax(SourceSpan::new(1, 1, 1), "empty input, expected `degeneration <name>`"));
    };
    let mut p = Parser::new(header, no)?;
    p.expect_keyword("degeneration")?;
    let (label, _) = p.expect_ident()?;
    p.expect_end()?;

    let mut source = None;
    let mut target = None;
    let mut subst = None;
    let mut point = None;
    let mut free: Vec<String> = Vec::new();
    let mut requires = Vec::new();
    let mut last = SourceSpan::new(no, 1, header.len() + 1);
    let mut saw_basis = false;
    for (no, line) in lines.by_ref() {
        let mut p = Parser::new(line, no)?;
        last = p.line_span();
        let (kw, span) = p.expect_ident()?;
        let set_once = |slot: bool| {
            if slot {
                Err(DslError::new(DslErrorKind::Duplicate, span.clone(), format!("`{kw}` given twice")))
            } else {
                Ok(())
            }
        };
        match kw.as_str() {
            "source" | "target" => {
                set_once(if kw == "source" { source.is_some() } else { target.is_some() })?;
                p.expect_sym('=')?;
                let r = algebra_ref(&mut p)?;
                if kw == "source" {
                    source = Some(r);
                } else {
                    target = Some(r);
                }
            }
            "subst" => {
                set_once(subst.is_some())?;
                p.expect_keyword("t")?;
                p.expect_sym('=')?;
                let e = p.expr()?;
                only_vars(&e, &["s"])?;
                subst = Some(e);
            }
            "point" => {
                set_once(point.is_some())?;
                p.expect_keyword("s0")?;
                p.expect_sym('=')?;
                let e = p.expr()?;
                only_vars(&e, &[])?;
                point = Some(e);
            }
            "free" => {
                while !p.at_end() {
                    let (w, span) = p.expect_ident()?;
                    if RESERVED.contains(&w.as_str()) || free.contains(&w) || w.starts_with(['e', 'E', 'A']) && w[1..].bytes().all(|b| b.is_ascii_digit()) {
                        return Err(DslError::syntax(span, format!("`{w}` cannot be a free parameter")));
                    }
                    free.push(w);
                }
            }
            "require" => {
                let e = p.expr()?;
                match p.next() {
                    Some(t) if t.tok == Tok::Ne => {}
                    _ => return Err(DslError::syntax(last.clone(), "expected `<expr> != 0`")),
                }
                let z = p.expr()?;
                if !z.is_zero_literal() {
                    return Err(DslError::syntax(z.span, "expected `!= 0`"));
                }
                requires.push(e);
            }
            "basis" => {
                p.expect_sym(':')?;
                saw_basis = true;
            }
            _ => return Err(DslError::syntax(span, format!("unknown directive `{kw}`"))),
        }
        p.expect_end()?;
        if saw_basis {
            break;
        }
    }
    if !saw_basis {
        return Err(DslError::syntax(last, "missing `basis:` section"));
    }

    let mut basis: Vec<Vec<_>> = Vec::new();
    let mut rhss = Vec::new();
    for (no, line) in lines {
        let mut p = Parser::new(line, no)?;
        let (i, span) = p.expect_indexed('E')?;
        if i != basis.len() + 1 {
            let kind = if i <= basis.len() { DslErrorKind::Duplicate } else { DslErrorKind::IndexOutOfRange };
            return Err(DslError::new(kind, span, format!("expected E{}, found E{i}", basis.len() + 1)));
        }
        p.expect_sym('=')?;
        let rhs = p.expr()?;
        p.expect_end()?;
        basis.push(rhs.linear_terms('e')?);
        rhss.push(rhs);
    }
    let n = basis.len();
    if n == 0 {
        return Err(DslError::syntax(last, "empty basis"));
    }

    let mut allowed: Vec<&str> = vec!["s", "t"];
    allowed.extend(free.iter().map(String::as_str));
    for (row, rhs) in basis.iter().zip(&rhss) {
        for (k, c) in row {
            if *k > n {
                let at = rhs.find(&|x| matches!(x, ExprKind::Basis('e', kk) if kk == k)).map_or(&rhs.span, |e| &e.span);
                return Err(DslError::new(DslErrorKind::IndexOutOfRange, at.clone(), format!("e{k} exceeds the basis size {n}")));
            }
            only_vars(c, &allowed)?;
        }
    }
    let source = source.ok_or_else(|| DslError::syntax(last.clone(), "missing `source = ...`"))?;
    let target = target.ok_or_else(|| DslError::syntax(last.clone(), "missing `target = ...`"))?;
    for (_, e) in &source.args {
        only_vars(e, &allowed)?;
    }
    for (_, e) in &target.args {
        only_vars(e, &allowed[2..])?;
    }
    for e in &requires {
        only_vars(e, &allowed[2..])?;
    }

    let subst = subst.unwrap_or_else(|| Expr::var("s"));
    let point = point.unwrap_or_else(|| Expr::int(0));
    check_substitution(&subst, &point)?;
    Ok(DegenerationWitness { label, source, target, subst, point, free, requires, basis })
}

fn algebra_ref(p: &mut Parser) -> Result<AlgebraRef, DslError> {
    let (name, _) = p.expect_ident()?;
    let mut args = Vec::new();
    if p.eat_keyword("with") {
        loop {
            let (param, span) = p.expect_ident()?;
            if args.iter().any(|(a, _)| *a == param) {
                return Err(DslError::new(DslErrorKind::Duplicate, span, format!("argument `{param}` given twice")));
            }
            p.expect_sym('=')?;
            args.push((param, p.expr()?));
            if !p.eat_sym(',') {
                break;
            }
        }
    }
    Ok(AlgebraRef { name, args })
}

fn only_vars(e: &Expr, allowed: &[&str]) -> Result<(), DslError> {
    for (v, span) in e.vars() {
        if !allowed.contains(&v) {
            return Err(DslError::new(DslErrorKind::UnknownSymbol, span.clone(), format!("unknown symbol `{v}`")));
        }
    }
    if let Some(b) = e.find(&|k| matches!(k, ExprKind::Basis(..) | ExprKind::C(..))) {
        return Err(DslError::syntax(b.span.clone(), format!("unexpected `{b}`")));
    }
    Ok(())
}

/// `t(s)` must be non-constant and vanish at `s₀`.
fn check_substitution(subst: &Expr, point: &Expr) -> Result<(), DslError> {
    let span = if point.span.line > 0 { &point.span } else { &subst.span };
    let invalid = |msg: String| DslError::new(DslErrorKind::SubstitutionInvalid, span.clone(), msg);
    let t: RatFunc = subst.eval(&mut |a: &Expr| match &a.kind {
        ExprKind::Var(v) if v == "s" => Ok(RatFunc::s()),
        _ => Err(DslError::syntax(a.span.clone(), format!("unexpected `{a}`"))),
    })?;
    let s0 = super::expr::eval_scalar(point)?;
    if t.is_constant() {
        return Err(invalid(format!("t = {t} does not depend on s")));
    }
    match t.eval_at(&s0) {
        Ok(v) if v.is_zero() => Ok(()),
        Ok(v) => Err(invalid(format!("t(s0) = {v}, expected 0 at s0 = {s0}"))),
        Err(_) => Err(invalid(format!("t has a pole at s0 = {s0}"))),
    }
}

pub fn write_witness(w: &DegenerationWitness) -> String {
    let mut out = format!("degeneration {}\nsource = {}\ntarget = {}\n", w.label, w.source, w.target);
    if !matches!(&w.subst.kind, ExprKind::Var(v) if v == "s") {
        out.push_str(&format!("subst t = {}\n", w.subst));
    }
    if !w.point.is_zero_literal() && super::expr::eval_scalar(&w.point).map_or(true, |q: Q| !q.is_zero()) {
        out.push_str(&format!("point s0 = {}\n", w.point));
    }
    if !w.free.is_empty() {
        out.push_str(&format!("free {}\n", w.free.join(" ")));
    }
    for r in &w.requires {
        out.push_str(&format!("require {r} != 0\n"));
    }
    out.push_str("basis:\n");
    for (i, row) in w.basis.iter().enumerate() {
        out.push_str(&format!("E{} = {}\n", i + 1, fmt_terms(row, 'e')));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Field;
    use std::collections::BTreeMap;

    const MU14_MU13: &str = "\
degeneration mu14_5__mu13_5
source = mu14_5
target = mu13_5
basis:
E1 = t*e1
E2 = t^2*e2
E3 = t^3*e3
E4 = t^4*e4
E5 = t^3*e5
";

    #[test]
    fn parses_and_round_trips() {
        let w = parse_witness(MU14_MU13).unwrap();
        assert_eq!(w.basis.len(), 5);
        assert_eq!(w.source.name, "mu14_5");
        let text = write_witness(&w);
        assert_eq!(text, MU14_MU13);
        assert_eq!(parse_witness(&text).unwrap(), w);
    }

    #[test]
    fn rationalizing_substitution() {
        let text = "\
degeneration mu18__mu13
source = mu18
target = mu13
subst t = (s^2 + 1)/4
point s0 = i
basis:
E1 = s*e1 - 2*e2 + e4
E2 = e2
E3 = e3
E4 = e4
";
        let w = parse_witness(text).unwrap();
        let (t, s0) = w.subst_and_point().unwrap();
        assert_eq!(s0, Q::i());
        // 4t − 1 = s²
        let four = RatFunc::from_int(4);
        assert_eq!(four.times(&t).minus(&RatFunc::one()), RatFunc::s().times(&RatFunc::s()));
        assert_eq!(parse_witness(&write_witness(&w)).unwrap(), w);
    }

    #[test]
    fn substitution_must_vanish_at_the_point() {
        let text = "degeneration x\nsource = a\ntarget = b\npoint s0 = 1\nbasis:\nE1 = e1\n";
        let err = parse_witness(text).unwrap_err();
        assert_eq!(err.kind, DslErrorKind::SubstitutionInvalid);
        assert_eq!(err.span.line, 4);
        let err = parse_witness("degeneration x\nsource = a\ntarget = b\nbasis:\nE1 = e1 + e3\n").unwrap_err();
        assert_eq!((err.kind, err.span.line, err.span.col_start), (DslErrorKind::IndexOutOfRange, 5, 11));
        let text = "degeneration x\nsource = a\ntarget = b\nsubst t = 1/s\nbasis:\nE1 = e1\n";
        assert_eq!(parse_witness(text).unwrap_err().kind, DslErrorKind::SubstitutionInvalid);
    }

    #[test]
    fn free_parameters_and_requirements() {
        let text = "\
degeneration m22__m8
source = mu22 with a = a + t
target = mu8 with a = a
free a
require a*(1 + a^2) != 0
basis:
E1 = e1 + 1/(a + a^3)*e2
E2 = t*e2
";
        let w = parse_witness(text).unwrap();
        assert_eq!(w.free, vec!["a"]);
        assert_eq!(parse_witness(&write_witness(&w)).unwrap(), w);
        let bind = |x: Q| w.bind(&BTreeMap::from([("a".to_string(), x)]));
        assert!(bind(Q::i()).is_err());
        assert!(bind(Q::zero()).is_err());
        let b = bind(Q::from_int(2)).unwrap();
        assert_eq!(b.target_args["a"], Q::from_int(2));
        assert_eq!(b.basis.matrix[(0, 1)], RatFunc::constant(Q::ratio(1, 10).unwrap()));
        assert!(w.bind(&BTreeMap::new()).is_err());
    }

    #[test]
    fn malformed() {
        let bad = [
            "degeneration x\nsource = a\nbasis:\nE1 = e1\n",
            "degeneration x\nsource = a\ntarget = b\nbasis:\nE2 = e1\n",
            "degeneration x\nsource = a\ntarget = b\nbasis:\nE1 = e2\n",
            "degeneration x\nsource = a\ntarget = b\nbasis:\nE1 = q*e1\n",
            "degeneration x\nsource = a\ntarget = b with l = t\nbasis:\nE1 = e1\n",
            "degeneration x\nsource = a\ntarget = b\n",
            "degeneration x\nsource = a\nsource = a\ntarget = b\nbasis:\nE1 = e1\n",
            "degeneration x\nsource = a\ntarget = b\nrequire t = 0\nbasis:\nE1 = e1\n",
        ];
        for b in bad {
            assert!(parse_witness(b).is_err(), "{b}");
        }
    }
}
