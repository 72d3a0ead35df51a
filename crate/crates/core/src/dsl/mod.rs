//! Text formats for algebras, degeneration witnesses and condition sets.
//!
//! All three are line oriented, UTF-8, with `#` comments. Scalars are
//! Gaussian rationals written as `3`, `-2/5`, `i`, `2i/7`, `(3+2i)/7`;
//! expressions use `+ - * / ^` and parentheses.

mod algebra;
mod conditions;
mod expr;
mod witness;

pub use algebra::{parse_algebra, AlgebraTemplate, ProductLine};
pub use conditions::{parse_conditions, write_conditions};
pub use expr::{parse_expr, Expr, ExprKind, Term};
pub use witness::{parse_witness, write_witness};
pub(crate) use expr::eval_scalar;

use std::fmt;

use thiserror::Error;

/// 1-based location of a parse error. `col_end` is exclusive.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub file: Option<String>,
    pub line: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl SourceSpan {
    pub fn new(line: usize, col_start: usize, col_end: usize) -> Self {
        SourceSpan { file: None, line, col_start, col_end }
    }

    pub fn join(&self, o: &SourceSpan) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            line: self.line,
            col_start: self.col_start.min(o.col_start),
            col_end: self.col_end.max(o.col_end),
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(f, "{}:{}", self.line, self.col_start)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslErrorKind {
    Syntax,
    Duplicate,
    IndexOutOfRange,
    UnknownSymbol,
    NonHomogeneousClause,
    SubstitutionInvalid,
    Evaluation,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct DslError {
    pub kind: DslErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

impl DslError {
    pub fn new(kind: DslErrorKind, span: SourceSpan, message: impl Into<String>) -> Self {
        DslError { kind, span, message: message.into() }
    }

    pub fn syntax(span: SourceSpan, message: impl Into<String>) -> Self {
        Self::new(DslErrorKind::Syntax, span, message)
    }

    pub fn with_file(mut self, file: impl Into<String>) -> Self {
        self.span.file = Some(file.into());
        self
    }
}

/// Source lines with comments stripped, paired with their 1-based numbers;
/// blank lines are skipped.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(n, line)| {
        let line = line.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            None
        } else {
            Some((n + 1, line))
        }
    })
}

/// Short grammar summary printed with usage errors.
pub const GRAMMAR_HELP: &str = "\
algebra files:
  algebra <name> dim <n> [params <p>...]
  e<i> e<j> = 0 | [coeff*]e<k> {(+|-) [coeff*]e<k>}
witness files:
  degeneration <name>
  source = <catalog name> [with <p> = <expr in t>, ...]
  target = <catalog name> [with <p> = <scalar>, ...]   (or target = zero)
  [subst t = <expr in s>]      (default t = s)
  [point s0 = <scalar>]        (default 0, must satisfy t(s0) = 0)
  [free <p>...]  [require <expr> != 0]
  basis:
  E<i> = <expr>*e<j> + ...
condition files:
  conditions <name> [mode one_sided|symmetric] [rebase e<i1> ... e<in>]
  <A-expr> sub A<k>  |  <A-expr> = 0  |  <poly in c(i,j,k)> = <poly> [= <poly> ...]
  A-expr: sums of A<i>, A<i>*A<j>, A<i>^m";
