//! Flag-containment and polynomial condition sets on structure constants, and
//! a randomized search for a basis satisfying them.
//!
//! Flags are `A_i = ⟨e_i, …, e_n⟩` in the (rebased) basis; `A_i^m` is the
//! power `Σ_{a+b=m} A_i^a A_i^b` taken with the set's product mode.

mod modp;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, ProductMode, Subspace};
use crate::dsl::Expr;
use crate::linalg::Matrix;
use crate::scalars::{Field, GaussianRational as Q};
use modp::Fp;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid rebase: {0}")]
    InvalidRebase(String),
    #[error("cannot evaluate clause `{clause}`: {reason}")]
    Evaluation { clause: String, reason: String },
}

/// A summand of a subspace expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceTerm {
    /// `A_i`
    Flag(usize),
    /// `A_i A_j`
    Product(usize, usize),
    /// `A_i^m`
    Power(usize, u32),
}

impl fmt::Display for SpaceTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTerm::Flag(i) => write!(f, "A{i}"),
            SpaceTerm::Product(i, j) => write!(f, "A{i}*A{j}"),
            SpaceTerm::Power(i, m) => write!(f, "A{i}^{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Clause {
    /// `Σ terms ⊆ A_flag`
    Contained { terms: Vec<SpaceTerm>, flag: usize },
    /// `Σ terms = 0`
    Zero { terms: Vec<SpaceTerm> },
    /// `lhs = rhs`, polynomial in the `c(i,j,k)`.
    Poly { lhs: Expr, rhs: Expr },
}

fn fmt_space_sum(terms: &[SpaceTerm]) -> String {
    terms.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Contained { terms, flag } => write!(f, "{} sub A{flag}", fmt_space_sum(terms)),
            Clause::Zero { terms } => write!(f, "{} = 0", fmt_space_sum(terms)),
            Clause::Poly { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
        }
    }
}

impl Clause {
    /// Largest basis or flag index mentioned.
    fn max_index(&self) -> usize {
        let space = |t: &SpaceTerm| match *t {
            SpaceTerm::Flag(i) | SpaceTerm::Power(i, _) => i,
            SpaceTerm::Product(i, j) => i.max(j),
        };
        match self {
            Clause::Contained { terms, flag } => terms.iter().map(space).max().unwrap_or(0).max(*flag),
            Clause::Zero { terms } => terms.iter().map(space).max().unwrap_or(0),
            Clause::Poly { lhs, rhs } => lhs.max_c_index().max(rhs.max_c_index()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionSet {
    pub label: String,
    pub mode: ProductMode,
    /// `rebase[k] = i` means `E_{k+1} = e_i` (1-based `i`).
    pub rebase: Option<Vec<usize>>,
    pub clauses: Vec<Clause>,
}

impl ConditionSet {
    pub fn new(label: impl Into<String>) -> Self {
        ConditionSet { label: label.into(), mode: ProductMode::OneSided, rebase: None, clauses: Vec::new() }
    }

    /// The rebasing as a permutation matrix (rows are the new basis vectors).
    pub fn rebase_matrix(&self, n: usize) -> Result<Option<Matrix<Q>>, ConditionError> {
        let Some(r) = &self.rebase else { return Ok(None) };
        if r.len() != n {
            return Err(ConditionError::DimensionMismatch(format!(
                "rebase lists {} vectors for a {n}-dimensional algebra",
                r.len()
            )));
        }
        let mut seen = vec![false; n];
        for &i in r {
            if i == 0 || i > n || std::mem::replace(&mut seen[i - 1], true) {
                return Err(ConditionError::InvalidRebase(format!("{r:?} is not a permutation of 1..={n}")));
            }
        }
        Ok(Some(Matrix::from_fn(n, n, |k, j| if r[k] == j + 1 { Q::one() } else { Q::zero() })))
    }

    pub fn without_rebase(&self) -> Self {
        ConditionSet { rebase: None, ..self.clone() }
    }

    pub fn with_mode(&self, mode: ProductMode) -> Self {
        ConditionSet { mode, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailingClause {
    pub index: usize,
    pub clause: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub satisfied: bool,
    pub failing: Vec<FailingClause>,
}

struct Evaluator<'a, F> {
    a: &'a Algebra<F>,
    mode: ProductMode,
    flags: Vec<Subspace<F>>,
}

impl<F: Field> Evaluator<'_, F> {
    fn flag(&self, i: usize) -> &Subspace<F> {
        &self.flags[i - 1]
    }

    fn power(&self, i: usize, m: u32) -> Subspace<F> {
        let n = self.a.dim();
        let mut pw = vec![self.flag(i).clone()];
        for e in 2..=m as usize {
            let mut acc = Subspace::zero(n);
            for x in 1..e {
                acc = acc.join(&self.a.subspace_product(&pw[x - 1], &pw[e - x - 1], self.mode));
            }
            let stop = acc.is_zero();
            pw.push(acc);
            if stop {
                break;
            }
        }
        if pw.len() < m as usize {
            Subspace::zero(n)
        } else {
            pw.pop().unwrap_or_else(|| Subspace::zero(n))
        }
    }

    fn space(&self, terms: &[SpaceTerm]) -> Subspace<F> {
        let mut acc = Subspace::zero(self.a.dim());
        for t in terms {
            let s = match *t {
                SpaceTerm::Flag(i) => self.flag(i).clone(),
                SpaceTerm::Product(i, j) => self.a.subspace_product(self.flag(i), self.flag(j), self.mode),
                SpaceTerm::Power(i, m) => self.power(i, m),
            };
            acc = acc.join(&s);
        }
        acc
    }

    fn clause(&self, c: &Clause) -> Result<bool, ConditionError> {
        Ok(match c {
            Clause::Contained { terms, flag } => self.space(terms).is_subspace_of(self.flag(*flag)),
            Clause::Zero { terms } => self.space(terms).is_zero(),
            Clause::Poly { lhs, rhs } => {
                let mut lookup = |e: &Expr| match e.kind {
                    crate::dsl::ExprKind::C(i, j, k) => Ok(self.a.constant(i - 1, j - 1, k - 1)),
                    _ => Err(crate::dsl::DslError::new(
                        crate::dsl::DslErrorKind::UnknownSymbol,
                        e.span.clone(),
                        format!("unexpected `{e}`"),
                    )),
                };
                let err = |e: crate::dsl::DslError| ConditionError::Evaluation { clause: c.to_string(), reason: e.message };
                let l: F = lhs.eval(&mut lookup).map_err(err)?;
                let r: F = rhs.eval(&mut lookup).map_err(err)?;
                l == r
            }
        })
    }
}

/// Evaluates every clause of `cs` on `a` (after the set's rebasing).
pub fn eval_conditions(a: &Algebra<Q>, cs: &ConditionSet) -> Result<ConditionReport, ConditionError> {
    let n = a.dim();
    let rebased;
    let a = match cs.rebase_matrix(n)? {
        Some(p) => {
            rebased = a.change_basis(&p).expect("permutation matrices are invertible");
            &rebased
        }
        None => a,
    };
    eval_in_basis(a, cs, false)
}

fn eval_in_basis<F: Field>(a: &Algebra<F>, cs: &ConditionSet, stop_early: bool) -> Result<ConditionReport, ConditionError> {
    let n = a.dim();
    for c in &cs.clauses {
        let m = c.max_index();
        if m > n {
            return Err(ConditionError::DimensionMismatch(format!("clause `{c}` uses index {m} in dimension {n}")));
        }
    }
    let ev = Evaluator { a, mode: cs.mode, flags: (1..=n).map(|i| Subspace::flag(n, i)).collect() };
    let mut failing = Vec::new();
    for (index, c) in cs.clauses.iter().enumerate() {
        if !ev.clause(c)? {
            failing.push(FailingClause { index, clause: c.to_string() });
            if stop_early {
                break;
            }
        }
    }
    Ok(ConditionReport { satisfied: failing.is_empty(), failing })
}

/// Candidate mix for [`search_basis`]; weights are relative.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub triangular_weight: u32,
    pub full_weight: u32,
    pub permuted_weight: u32,
    /// Entries of random matrices are drawn from `-max_entry..=max_entry`.
    pub max_entry: i64,
    /// Bases tried before any random candidate; the identity is always first.
    pub seeds: Vec<Matrix<Q>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { triangular_weight: 2, full_weight: 1, permuted_weight: 1, max_entry: 3, seeds: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    /// `basis` rows are the new basis vectors; `trial` counts seeds first.
    Found { trial: usize, basis: Matrix<Q> },
    NotFound { trials: usize },
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found { .. })
    }
}

fn small(rng: &mut ChaCha8Rng, m: i64) -> Q {
    Q::from_int(rng.gen_range(-m..=m))
}

fn nonzero(rng: &mut ChaCha8Rng, m: i64) -> Q {
    loop {
        let x = rng.gen_range(-m..=m);
        if x != 0 {
            return Q::from_int(x);
        }
    }
}

fn triangular(rng: &mut ChaCha8Rng, n: usize, m: i64) -> Matrix<Q> {
    let upper = rng.gen_bool(0.5);
    let mut t = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                t[(i, j)] = nonzero(rng, m);
            } else if (j > i) == upper {
                t[(i, j)] = small(rng, m);
            }
        }
    }
    t
}

fn full(rng: &mut ChaCha8Rng, n: usize, m: i64) -> Matrix<Q> {
    loop {
        let mut p = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] = small(rng, m);
            }
        }
        if !p.determinant().is_zero() {
            return p;
        }
    }
}

fn permutation(rng: &mut ChaCha8Rng, n: usize) -> Matrix<Q> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    Matrix::from_fn(n, n, |i, j| if perm[i] == j { Q::one() } else { Q::zero() })
}

/// The candidate basis for one random trial, derived from `(seed, trial)` only.
pub fn candidate(n: usize, seed: u64, trial: u64, cfg: &SearchConfig) -> Matrix<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let total = (cfg.triangular_weight + cfg.full_weight + cfg.permuted_weight).max(1);
    let pick = rng.gen_range(0..total);
    let m = cfg.max_entry.max(1);
    if pick < cfg.triangular_weight {
        triangular(&mut rng, n, m)
    } else if pick < cfg.triangular_weight + cfg.full_weight {
        full(&mut rng, n, m)
    } else {
        permutation(&mut rng, n).mul(&triangular(&mut rng, n, m))
    }
}

/// Looks for a basis of `a` in which `cs` holds, trying the identity, the
/// configured seeds and then `trials` random candidates. The set's own rebasing
/// is not applied: the search is over all bases. Lowest trial index wins, so
/// the outcome does not depend on thread scheduling.
pub fn search_basis(a: &Algebra<Q>, cs: &ConditionSet, trials: usize, seed: u64, cfg: &SearchConfig) -> SearchOutcome {
    let n = a.dim();
    let cs = cs.without_rebase();
    let reduced = a.try_map_field(|c| Fp::try_from_q(c).ok_or(())).ok();
    let holds = |p: &Matrix<Q>| {
        if let Some(r) = &reduced {
            // Failing mod p implies failing exactly; anything else is rechecked.
            if let Ok(pp) = p.try_map(|c| Fp::try_from_q(c).ok_or(())) {
                if let Ok(b) = r.change_basis(&pp) {
                    if !eval_in_basis(&b, &cs, true).map(|r| r.satisfied).unwrap_or(true) {
                        return false;
                    }
                }
            }
        }
        match a.change_basis(p) {
            Ok(b) => eval_in_basis(&b, &cs, true).map(|r| r.satisfied).unwrap_or(false),
            Err(_) => false,
        }
    };
    let mut fixed = vec![Matrix::identity(n)];
    fixed.extend(cfg.seeds.iter().filter(|p| p.rows() == n && p.cols() == n).cloned());
    for (trial, p) in fixed.iter().enumerate() {
        if holds(p) {
            return SearchOutcome::Found { trial, basis: p.clone() };
        }
    }
    let offset = fixed.len();
    let hit = (0..trials as u64).into_par_iter().find_first(|&t| holds(&candidate(n, seed, t, cfg)));
    match hit {
        Some(t) => SearchOutcome::Found { trial: offset + t as usize, basis: candidate(n, seed, t, cfg) },
        None => SearchOutcome::NotFound { trials: offset + trials },
    }
}

impl From<AlgebraError> for ConditionError {
    fn from(e: AlgebraError) -> Self {
        ConditionError::DimensionMismatch(e.to_string())
    }
}
