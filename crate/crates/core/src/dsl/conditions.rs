use super::expr::{Expr, ExprKind, Parser};
use super::{content_lines, DslError, DslErrorKind, SourceSpan};
use crate::conditions::{Clause, ConditionSet, SpaceTerm};
use crate::scalars::GaussianRational as Q;

pub fn parse_conditions(text: &str) -> Result<ConditionSet, DslError> {
    let mut lines = content_lines(text);
    let Some((no, header)) = lines.next() else {
        return Err(DslError::syntax(SourceSpan::new(1, 1, 1), "empty input, expected `conditions <name>`"));
    };
    let mut p = Parser::new(header, no)?;
    p.expect_keyword("conditions")?;
    let (label, _) = p.expect_ident()?;
    let mut cs = ConditionSet::new(label);
    let (mut have_mode, mut have_rebase) = (false, false);
    while !p.at_end() {
        if !have_mode && p.eat_keyword("mode") {
            let (m, span) = p.expect_ident()?;
            cs.mode = m.parse().map_err(|e: String| DslError::syntax(span, e))?;
            have_mode = true;
        } else if !have_rebase && p.eat_keyword("rebase") {
            let mut r = Vec::new();
            while !p.at_end() && !matches!(p.peek(), Some(super::expr::Tok::Ident(w)) if w == "mode") {
                r.push(p.expect_indexed('e')?.0);
            }
            if r.is_empty() {
                return Err(p.err("expected basis vectors after `rebase`"));
            }
            cs.rebase = Some(r);
            have_rebase = true;
        } else {
            return Err(p.err("expected `mode` or `rebase`"));
        }
    }
    if let Some(r) = &cs.rebase {
        let n = r.len();
        let mut seen = vec![false; n];
        for &i in r {
            if i > n || std::mem::replace(&mut seen[i - 1], true) {
                return Err(DslError::syntax(p.line_span(), format!("rebase {r:?} is not a permutation of e1..e{n}")));
            }
        }
    }
    for (no, line) in lines {
        parse_clause_line(line, no, &mut cs.clauses)?;
    }
    Ok(cs)
}

fn parse_clause_line(line: &str, no: usize, out: &mut Vec<Clause>) -> Result<(), DslError> {
    let mut p = Parser::new(line, no)?;
    let lhs = p.expr()?;
    if p.eat_keyword("sub") {
        let rhs = p.expr()?;
        p.expect_end()?;
        let ExprKind::Basis('A', flag) = rhs.kind else {
            return Err(DslError::syntax(rhs.span, "expected a flag space A<k> after `sub`"));
        };
        out.push(Clause::Contained { terms: space_terms(&lhs)?, flag });
        return Ok(());
    }
    let mut sides = vec![lhs];
    while p.eat_sym('=') {
        sides.push(p.expr()?);
    }
    p.expect_end()?;
    if sides.len() < 2 {
        return Err(DslError::syntax(p.line_span(), "expected `sub A<k>` or `= ...`"));
    }
    if sides.iter().any(|e| e.any(&|k| matches!(k, ExprKind::Basis('A', _)))) {
        if sides.len() != 2 || !sides[1].is_zero_literal() {
            return Err(DslError::syntax(sides[1].span.clone(), "subspace clauses have the form `<A-expr> = 0`"));
        }
        out.push(Clause::Zero { terms: space_terms(&sides[0])? });
        return Ok(());
    }
    for e in &sides {
        if let Some(b) = e.find(&|k| matches!(k, ExprKind::Basis(..) | ExprKind::Var(_))) {
            return Err(DslError::new(DslErrorKind::UnknownSymbol, b.span.clone(), format!("unexpected `{b}` in a polynomial clause")));
        }
        if let Some(d) = e.find(&|k| matches!(k, ExprKind::Div(_, den) if den.contains_c())) {
            return Err(DslError::syntax(d.span.clone(), "division by a structure constant"));
        }
    }
    for w in sides.windows(2) {
        let at_zero = |e: &Expr| -> Result<Q, DslError> { e.eval(&mut |_| Ok(Q::zero())) };
        let span = w[0].span.join(&w[1].span);
        let (l, r) = (at_zero(&w[0])?, at_zero(&w[1])?);
        if l != r {
            return Err(DslError::new(DslErrorKind::NonHomogeneousClause, span, "clause has a nonzero constant term"));
        }
        out.push(Clause::Poly { lhs: w[0].clone(), rhs: w[1].clone() });
    }
    Ok(())
}

fn space_terms(e: &Expr) -> Result<Vec<SpaceTerm>, DslError> {
    let bad = || DslError::syntax(e.span.clone(), "expected a sum of A<i>, A<i>*A<j> or A<i>^m");
    match &e.kind {
        ExprKind::Add(a, b) => {
            let mut v = space_terms(a)?;
            v.extend(space_terms(b)?);
            Ok(v)
        }
        ExprKind::Basis('A', i) => Ok(vec![SpaceTerm::Flag(*i)]),
        ExprKind::Mul(a, b) => match (&a.kind, &b.kind) {
            (ExprKind::Basis('A', i), ExprKind::Basis('A', j)) => Ok(vec![SpaceTerm::Product(*i, *j)]),
            _ => Err(bad()),
        },
        ExprKind::Pow(a, m) => match (&a.kind, *m) {
            (ExprKind::Basis('A', i), 1) => Ok(vec![SpaceTerm::Flag(*i)]),
            (ExprKind::Basis('A', i), m) if m >= 2 => Ok(vec![SpaceTerm::Power(*i, m as u32)]),
            _ => Err(bad()),
        },
        _ => Err(bad()),
    }
}

pub fn write_conditions(cs: &ConditionSet) -> String {
    let mut out = format!("conditions {} mode {}", cs.label, cs.mode);
    if let Some(r) = &cs.rebase {
        out.push_str(" rebase");
        for i in r {
            out.push_str(&format!(" e{i}"));
        }
    }
    out.push('\n');
    for c in &cs.clauses {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}
