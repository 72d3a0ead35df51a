use std::collections::{BTreeMap, BTreeSet};

use super::expr::{fmt_terms, Expr, Parser, Term};
use super::{content_lines, DslError, DslErrorKind, SourceSpan};
use crate::algebra::Algebra;
use crate::scalars::{Field, GaussianRational as Q};

/// `e<i> e<j> = Σ coeff * e<k>`, coefficients possibly symbolic in the
/// template's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductLine {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<Term>,
    pub span: SourceSpan,
}

/// A parsed algebra file: a multiplication table whose coefficients may
/// mention the declared parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraTemplate {
    pub name: String,
    pub dim: usize,
    pub params: Vec<String>,
    pub lines: Vec<ProductLine>,
}

pub fn parse_algebra(text: &str) -> Result<AlgebraTemplate, DslError> {
    let mut lines = content_lines(text);
    let Some((no, header)) = lines.next() else {
        return Err(DslError::syntax(SourceSpan::new(1, 1, 1), "empty input, expected `algebra <name> dim <n>`"));
    };
    let mut p = Parser::new(header, no)?;
    p.expect_keyword("algebra")?;
    let (name, _) = p.expect_ident()?;
    p.expect_keyword("dim")?;
    let (dim, _) = p.expect_usize()?;
    let mut params = Vec::new();
    if p.eat_keyword("params") {
        while !p.at_end() {
            let (w, span) = p.expect_ident()?;
            if w == "s" || w == "t" || params.contains(&w) || w.starts_with(['e', 'E', 'A']) && w[1..].bytes().all(|b| b.is_ascii_digit()) {
                return Err(DslError::syntax(span, format!("`{w}` cannot be used as a parameter name")));
            }
            params.push(w);
        }
        if params.is_empty() {
            return Err(p.err("expected at least one parameter name"));
        }
    }
    p.expect_end()?;

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (no, line) in lines {
        let mut p = Parser::new(line, no)?;
        let (i, si) = p.expect_indexed('e')?;
        let (j, sj) = p.expect_indexed('e')?;
        p.expect_sym('=')?;
        let rhs = p.expr()?;
        p.expect_end()?;
        for (k, span) in [(i, &si), (j, &sj)] {
            check_index(k, dim, span)?;
        }
        let terms = rhs.linear_terms('e')?;
        for (k, c) in &terms {
            if *k > dim {
                let at = rhs.find(&|x| matches!(x, super::ExprKind::Basis('e', kk) if kk == k)).map_or(rhs.span.clone(), |e| e.span.clone());
                check_index(*k, dim, &at)?;
            }
            for (v, span) in c.vars() {
                if !params.iter().any(|p| p == v) {
                    return Err(DslError::new(DslErrorKind::UnknownSymbol, span.clone(), format!("unknown parameter `{v}`")));
                }
            }
            if let Some(e) = c.find(&|x| matches!(x, super::ExprKind::C(..))) {
                return Err(DslError::syntax(e.span.clone(), "structure constants are not allowed in algebra files"));
            }
        }
        if !seen.insert((i, j)) {
            return Err(DslError::new(DslErrorKind::Duplicate, p.line_span(), format!("duplicate product line for e{i} e{j}")));
        }
        out.push(ProductLine { i, j, terms, span: p.line_span() });
    }
    Ok(AlgebraTemplate { name, dim, params, lines: out })
}

fn check_index(k: usize, dim: usize, span: &SourceSpan) -> Result<(), DslError> {
    if k > dim {
        Err(DslError::new(DslErrorKind::IndexOutOfRange, span.clone(), format!("basis index {k} exceeds dimension {dim}")))
    } else {
        Ok(())
    }
}

impl AlgebraTemplate {
    /// Canonical template of a concrete algebra.
    pub fn from_algebra(name: &str, a: &Algebra<Q>) -> Self {
        let mut lines: Vec<ProductLine> = Vec::new();
        for (i, j, k, c) in a.entries() {
            let term = (k, Expr::from_scalar(&c));
            match lines.last_mut() {
                Some(l) if l.i == i && l.j == j => l.terms.push(term),
                _ => lines.push(ProductLine { i, j, terms: vec![term], span: SourceSpan::default() }),
            }
        }
        AlgebraTemplate { name: name.to_string(), dim: a.dim(), params: Vec::new(), lines }
    }

    /// Binds every parameter and evaluates the table over `F`.
    pub fn instantiate<F: Field>(&self, env: &BTreeMap<String, F>) -> Result<Algebra<F>, DslError> {
        if let Some(missing) = self.params.iter().find(|p| !env.contains_key(*p)) {
            return Err(DslError::new(
                DslErrorKind::UnknownSymbol,
                SourceSpan::default(),
                format!("{}: parameter `{missing}` is not bound", self.name),
            ));
        }
        let mut entries = Vec::new();
        for line in &self.lines {
            for (k, c) in &line.terms {
                let v = c.eval(&mut |a: &Expr| match &a.kind {
                    super::ExprKind::Var(v) if self.params.contains(v) => Ok(env[v].clone()),
                    _ => Err(DslError::new(DslErrorKind::UnknownSymbol, a.span.clone(), format!("unexpected `{a}`"))),
                })?;
                entries.push((line.i, line.j, *k, v));
            }
        }
        let a = Algebra::from_entries(self.dim, entries).expect("indices validated at parse time");
        Ok(a.with_label(self.name.clone()))
    }

    pub fn instantiate_concrete(&self, env: &BTreeMap<String, Q>) -> Result<Algebra<Q>, DslError> {
        self.instantiate(env)
    }

    pub fn to_dsl(&self) -> String {
        let mut out = format!("algebra {} dim {}", self.name, self.dim);
        if !self.params.is_empty() {
            out.push_str(" params ");
            out.push_str(&self.params.join(" "));
        }
        out.push('\n');
        let mut lines: Vec<&ProductLine> = self.lines.iter().collect();
        lines.sort_by_key(|l| (l.i, l.j));
        for l in lines {
            out.push_str(&format!("e{} e{} = {}\n", l.i, l.j, fmt_terms(&l.terms, 'e')));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::a133;

    const A133: &str = "\
# A_133(l)
algebra a133 dim 5 params l
e1 e1 = e3 + l*e5
e1 e2 = e3
e2 e1 = e4
e2 e2 = e5
";

    fn env(pairs: &[(&str, Q)]) -> BTreeMap<String, Q> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn a133_matches_family() {
        let t = parse_algebra(A133).unwrap();
        assert_eq!(t.params, vec!["l"]);
        for l in [Q::zero(), Q::ratio(3, 7).unwrap(), Q::complex(1, 2)] {
            let a = t.instantiate_concrete(&env(&[("l", l.clone())])).unwrap();
            assert!(a.same_table(&a133(&l)));
        }
        assert!(t.instantiate_concrete(&BTreeMap::new()).is_err());
    }

    #[test]
    fn empty_table_is_zero_algebra() {
        let a = parse_algebra("algebra z dim 3\n").unwrap().instantiate_concrete(&BTreeMap::new()).unwrap();
        assert_eq!(a.dim(), 3);
        assert!(a.is_zero_algebra());
    }

    #[test]
    fn out_of_range_index_reports_position() {
        let err = parse_algebra("algebra x dim 5\ne1 e1 = e9\n").unwrap_err();
        assert_eq!(err.kind, DslErrorKind::IndexOutOfRange);
        assert_eq!((err.span.line, err.span.col_start), (2, 9));
        let err = parse_algebra("algebra x dim 2\n\ne3 e1 = e2\n").unwrap_err();
        assert_eq!((err.span.line, err.span.col_start), (3, 1));
    }

    #[test]
    fn duplicate_lines_are_rejected() {
        let err = parse_algebra("algebra x dim 3\ne1 e1 = e2\ne1 e1 = e3\n").unwrap_err();
        assert_eq!(err.kind, DslErrorKind::Duplicate);
        assert_eq!(err.span.line, 3);
    }

    #[test]
    fn unknown_parameter() {
        let err = parse_algebra("algebra x dim 3 params a\ne1 e1 = b*e2\n").unwrap_err();
        assert_eq!(err.kind, DslErrorKind::UnknownSymbol);
        assert_eq!(err.span.col_start, 9);
    }

    #[test]
    fn canonical_round_trip() {
        let t = parse_algebra("algebra m dim 5 params a\n e4 e1 = (1-a)*e2 + a*e5\ne1 e1=e2\ne4 e4 = -a*e2 + (1+a)*e5 # tail\n").unwrap();
        let text = t.to_dsl();
        let back = parse_algebra(&text).unwrap();
        assert_eq!(back.to_dsl(), text);
        let e = env(&[("a", Q::ratio(2, 3).unwrap())]);
        assert!(back.instantiate_concrete(&e).unwrap().same_table(&t.instantiate_concrete(&e).unwrap()));
    }

    #[test]
    fn concrete_serialization() {
        let a = Algebra::from_entries(
            3,
            [(1, 1, 2, Q::complex(1, -1)), (1, 1, 3, Q::ratio(-2, 5).unwrap()), (2, 1, 3, Q::complex(0, -1))],
        )
        .unwrap();
        let text = AlgebraTemplate::from_algebra("x", &a).to_dsl();
        assert_eq!(text, "algebra x dim 3\ne1 e1 = (1 - i)*e2 - 2/5*e3\ne2 e1 = -i*e3\n");
        let back = parse_algebra(&text).unwrap().instantiate_concrete(&BTreeMap::new()).unwrap();
        assert!(back.same_table(&a));
    }
}
