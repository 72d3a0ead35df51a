//! Degeneration witnesses: rebase over ℚ(i)(s), take the limit, compare.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, AlgebraError, ParametricAlgebra};
use crate::dsl::{AlgebraTemplate, DslError, Expr, ExprKind, Term};
use crate::linalg::Matrix;
use crate::scalars::{Field, GaussianRational as Q, RatFunc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegenerationError {
    #[error("parametric basis is identically singular")]
    SingularBasis,
    #[error("pole at entry c({i},{j},{k}) = {value}")]
    Pole { i: usize, j: usize, k: usize, value: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// A basis `E_i(s) = Σ_j P_{ij}(s) e_j` together with the substitution
/// `t = t(s)` it was written against and the limit point `s₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricBasis {
    /// Coordinates already expressed in `s`.
    pub matrix: Matrix<RatFunc>,
    pub subst: RatFunc,
    pub point: Q,
}

impl ParametricBasis {
    /// `P = t·I` with `t = s`, `s₀ = 0`.
    pub fn scaling(n: usize) -> Self {
        ParametricBasis { matrix: Matrix::identity(n).scale(&RatFunc::s()), subst: RatFunc::s(), point: Q::zero() }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// `c'_{ij}^k(s)`, the structure constants of `a` in the basis `p`.
pub fn parametric_constants(a: &ParametricAlgebra, p: &Matrix<RatFunc>) -> Result<ParametricAlgebra, DegenerationError> {
    if p.rows() != a.dim() || p.cols() != a.dim() {
        return Err(DegenerationError::DimensionMismatch(format!(
            "basis is {}x{} but the algebra has dimension {}",
            p.rows(),
            p.cols(),
            a.dim()
        )));
    }
    let pinv = p.inverse().ok_or(DegenerationError::SingularBasis)?;
    Ok(a.change_basis_with_inverse(p, &pinv))
}

/// Entrywise limit at `s₀`; the first pole in `(i, j, k)` order is reported.
pub fn limit_tensor(a: &ParametricAlgebra, s0: &Q) -> Result<Algebra<Q>, DegenerationError> {
    let mut entries = Vec::new();
    for (i, j, k, c) in a.entries() {
        let v = c.limit_at(s0).map_err(|_| DegenerationError::Pole { i, j, k, value: c.to_string() })?;
        entries.push((i, j, k, v));
    }
    Ok(Algebra::from_entries(a.dim(), entries).expect("indices come from an algebra"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub witness: String,
    pub status: CheckStatus,
    pub checks: Vec<Check>,
    /// The limit algebra in DSL form, when the limit exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<String>,
}

pub const CHECKS: [&str; 5] = ["invertibility", "parametric-index", "limit", "target-equality", "necessary-battery"];

impl VerificationReport {
    fn new(witness: &str) -> Self {
        VerificationReport { witness: witness.to_string(), status: CheckStatus::Pass, checks: Vec::new(), limit: None }
    }

    fn push(&mut self, name: &'static str, status: CheckStatus, detail: impl Into<String>) {
        if status == CheckStatus::Fail {
            self.status = CheckStatus::Fail;
        }
        self.checks.push(Check { name, status, detail: detail.into() });
    }

    /// Marks every check not yet recorded as skipped and restores the
    /// canonical order.
    fn skip_rest(mut self) -> Self {
        for name in CHECKS {
            if !self.checks.iter().any(|c| c.name == name) {
                self.checks.push(Check { name, status: CheckStatus::Skipped, detail: "earlier check failed".into() });
            }
        }
        let order = |n: &str| CHECKS.iter().position(|c| *c == n).unwrap_or(usize::MAX);
        self.checks.sort_by_key(|c| order(c.name));
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The first failing check, if any.
    pub fn failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| c.status == CheckStatus::Fail)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.witness, self.status)?;
        for c in &self.checks {
            write!(f, "  {:<18} {}", c.name, c.status)?;
            if !c.detail.is_empty() {
                write!(f, "  ({})", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Verifies `source → target` via `basis`. The source is already expressed in
/// `s`; 4-dimensional tables are padded with zero-multiplying directions to
/// the basis size.
pub fn verify(label: &str, source: &ParametricAlgebra, target: &Algebra<Q>, basis: &ParametricBasis) -> VerificationReport {
    let mut r = VerificationReport::new(label);
    r.push("parametric-index", CheckStatus::Skipped, "no parametric index");
    verify_into(r, source, target, basis)
}

fn verify_into(mut r: VerificationReport, source: &ParametricAlgebra, target: &Algebra<Q>, basis: &ParametricBasis) -> VerificationReport {
    let n = basis.dim();
    if source.dim() > n || target.dim() > n || basis.matrix.cols() != n {
        r.push(
            "invertibility",
            CheckStatus::Fail,
            format!("basis has {n} vectors but source/target have dimensions {}/{}", source.dim(), target.dim()),
        );
        return r.skip_rest();
    }
    let (source, target) = (source.pad_to(n), target.pad_to(n));

    let Some(pinv) = basis.matrix.inverse() else {
        r.push("invertibility", CheckStatus::Fail, "det P is identically zero");
        return r.skip_rest();
    };
    r.push("invertibility", CheckStatus::Pass, format!("det P = {}", basis.matrix.determinant()));

    let constants = source.change_basis_with_inverse(&basis.matrix, &pinv);
    let limit = match limit_tensor(&constants, &basis.point) {
        Ok(l) => l,
        Err(e) => {
            r.push("limit", CheckStatus::Fail, format!("{e} as s -> {}", basis.point));
            return r.skip_rest();
        }
    };
    r.push("limit", CheckStatus::Pass, format!("s -> {}", basis.point));
    r.limit = Some(AlgebraTemplate::from_algebra("limit", &limit).to_dsl());

    if !limit.same_table(&target) {
        let diff = first_difference(&limit, &target).unwrap_or_default();
        r.push("target-equality", CheckStatus::Fail, diff);
        return r.skip_rest();
    }
    r.push("target-equality", CheckStatus::Pass, "");

    let mut detail = Vec::new();
    let mut refuted = false;
    for s in battery_points(&basis.point) {
        let Ok(a) = source.eval_at(&s) else { continue };
        let b = necessary_battery(&a, &target);
        refuted |= b.refuted;
        detail.push(format!("s={s}: {}", if b.refuted { b.to_string() } else { "consistent".into() }));
    }
    if detail.is_empty() {
        r.push("necessary-battery", CheckStatus::Skipped, "source has poles at every sample point");
    } else {
        r.push("necessary-battery", if refuted { CheckStatus::Fail } else { CheckStatus::Pass }, detail.join("; "));
    }
    r.skip_rest()
}

/// Points near `s₀` where the source is sampled for the battery.
pub fn battery_points(s0: &Q) -> Vec<Q> {
    [7, 11, 13].iter().map(|&d| s0 + &Q::ratio(1, d).unwrap()).collect()
}

fn first_difference(a: &Algebra<Q>, b: &Algebra<Q>) -> Option<String> {
    let n = a.dim();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y) = (a.constant(i, j, k), b.constant(i, j, k));
                if x != y {
                    return Some(format!("c({},{},{}): limit {x}, target {y}", i + 1, j + 1, k + 1));
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatteryVerdict {
    pub name: &'static str,
    pub source: usize,
    pub target: usize,
    pub consistent: bool,
}

/// Basis-independent necessary conditions for `A → B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatteryReport {
    pub verdicts: Vec<BatteryVerdict>,
    pub refuted: bool,
}

impl fmt::Display for BatteryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .verdicts
            .iter()
            .map(|v| format!("{} {} vs {}: {}", v.name, v.source, v.target, if v.consistent { "ok" } else { "refuted" }))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// `dim A² ≥ dim B²`, `dim ann A ≤ dim ann B`, `dim Der A ≤ dim Der B`.
/// Unequal dimensions are padded to the larger one.
pub fn necessary_battery(a: &Algebra<Q>, b: &Algebra<Q>) -> BatteryReport {
    let n = a.dim().max(b.dim());
    let (a, b) = (a.pad_to(n), b.pad_to(n));
    let verdicts = vec![
        {
            let (x, y) = (a.square().dim(), b.square().dim());
            BatteryVerdict { name: "dim_square", source: x, target: y, consistent: x >= y }
        },
        {
            let (x, y) = (a.annihilator().dim(), b.annihilator().dim());
            BatteryVerdict { name: "dim_annihilator", source: x, target: y, consistent: x <= y }
        },
        {
            let (x, y) = (a.derivation_dim(), b.derivation_dim());
            BatteryVerdict { name: "dim_der", source: x, target: y, consistent: x <= y }
        },
    ];
    let refuted = verdicts.iter().any(|v| !v.consistent);
    BatteryReport { verdicts, refuted }
}

/// `name [with p = expr, ...]` on either side of a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraRef {
    pub name: String,
    pub args: Vec<(String, Expr)>,
}

impl fmt::Display for AlgebraRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (n, (p, e)) in self.args.iter().enumerate() {
            write!(f, "{} {p} = {e}", if n == 0 { " with" } else { "," })?;
        }
        Ok(())
    }
}

/// A degeneration witness as written in a witness file. Source arguments and
/// basis coordinates may mention `t`, `s` and the free parameters; the target
/// arguments only the free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationWitness {
    pub label: String,
    pub source: AlgebraRef,
    pub target: AlgebraRef,
    /// `t` as an expression in `s`.
    pub subst: Expr,
    pub point: Expr,
    pub free: Vec<String>,
    /// Expressions in the free parameters that must not vanish.
    pub requires: Vec<Expr>,
    /// Row `i` lists the terms of `E_{i+1}`.
    pub basis: Vec<Vec<Term>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("free parameter `{0}` is not bound")]
    Unbound(String),
    #[error("parameter values violate `{0} != 0`")]
    Excluded(String),
    #[error("{0}")]
    Evaluation(String),
}

/// A witness with every free parameter bound and every expression evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundWitness {
    pub label: String,
    pub source: String,
    pub source_args: BTreeMap<String, RatFunc>,
    pub target: String,
    pub target_args: BTreeMap<String, Q>,
    pub basis: ParametricBasis,
}

impl DegenerationWitness {
    pub fn is_parametric(&self) -> bool {
        !self.free.is_empty()
    }

    /// `t(s)` and `s₀`; both are free of parameters by construction.
    pub fn subst_and_point(&self) -> Result<(RatFunc, Q), WitnessError> {
        let t = self.subst.eval(&mut |a: &Expr| match &a.kind {
            ExprKind::Var(v) if v == "s" => Ok(RatFunc::s()),
            _ => Err(unexpected(a)),
        });
        let p = crate::dsl::eval_scalar(&self.point);
        Ok((t.map_err(eval_err)?, p.map_err(eval_err)?))
    }

    pub fn bind(&self, values: &BTreeMap<String, Q>) -> Result<BoundWitness, WitnessError> {
        if let Some(p) = self.free.iter().find(|p| !values.contains_key(*p)) {
            return Err(WitnessError::Unbound(p.clone()));
        }
        let scalar = |e: &Expr| -> Result<Q, WitnessError> {
            e.eval(&mut |a: &Expr| match &a.kind {
                ExprKind::Var(v) if self.free.contains(v) => Ok(values[v].clone()),
                _ => Err(unexpected(a)),
            })
            .map_err(eval_err)
        };
        for r in &self.requires {
            if scalar(r)?.is_zero() {
                return Err(WitnessError::Excluded(r.to_string()));
            }
        }
        let (t, point) = self.subst_and_point()?;
        let in_s = |e: &Expr| -> Result<RatFunc, WitnessError> {
            e.eval(&mut |a: &Expr| match &a.kind {
                ExprKind::Var(v) if v == "t" => Ok(t.clone()),
                ExprKind::Var(v) if v == "s" => Ok(RatFunc::s()),
                ExprKind::Var(v) if self.free.contains(v) => Ok(RatFunc::constant(values[v].clone())),
                _ => Err(unexpected(a)),
            })
            .map_err(eval_err)
        };
        let n = self.basis.len();
        let mut m = Matrix::<RatFunc>::zeros(n, n);
        for (i, row) in self.basis.iter().enumerate() {
            for (j, c) in row {
                if *j > n {
                    return Err(WitnessError::Evaluation(format!("E{} mentions e{j} but the basis has {n} vectors", i + 1)));
                }
                m[(i, j - 1)] = m[(i, j - 1)].plus(&in_s(c)?);
            }
        }
        let source_args = self.source.args.iter().map(|(p, e)| Ok((p.clone(), in_s(e)?))).collect::<Result<_, WitnessError>>()?;
        let target_args = self.target.args.iter().map(|(p, e)| Ok((p.clone(), scalar(e)?))).collect::<Result<_, WitnessError>>()?;
        Ok(BoundWitness {
            label: self.label.clone(),
            source: self.source.name.clone(),
            source_args,
            target: self.target.name.clone(),
            target_args,
            basis: ParametricBasis { matrix: m, subst: t, point },
        })
    }
}

fn unexpected(a: &Expr) -> DslError {
    DslError::new(crate::dsl::DslErrorKind::UnknownSymbol, a.span.clone(), format!("unexpected `{a}`"))
}

fn eval_err(e: DslError) -> WitnessError {
    WitnessError::Evaluation(e.to_string())
}

/// Looks up algebra tables by name. The name `zero` always resolves to the
/// zero algebra of the witness dimension.
pub trait Resolver {
    fn template(&self, name: &str) -> Option<AlgebraTemplate>;
}

impl Resolver for BTreeMap<String, AlgebraTemplate> {
    fn template(&self, name: &str) -> Option<AlgebraTemplate> {
        self.get(name).cloned()
    }
}

pub fn verify_witness(w: &DegenerationWitness, values: &BTreeMap<String, Q>, resolver: &dyn Resolver) -> VerificationReport {
    let mut r = VerificationReport::new(&w.label);
    let bound = match w.bind(values) {
        Ok(b) => b,
        Err(e) => {
            r.push("parametric-index", CheckStatus::Fail, e.to_string());
            return r.skip_rest();
        }
    };
    verify_bound(r, &bound, resolver)
}

pub fn verify_bound_witness(b: &BoundWitness, resolver: &dyn Resolver) -> VerificationReport {
    verify_bound(VerificationReport::new(&b.label), b, resolver)
}

fn verify_bound(mut r: VerificationReport, b: &BoundWitness, resolver: &dyn Resolver) -> VerificationReport {
    let n = b.basis.dim();
    let lookup = |name: &str| resolver.template(name).ok_or_else(|| format!("unknown algebra `{name}`"));
    let source = if b.source == "zero" {
        Ok(Algebra::zero(n))
    } else {
        lookup(&b.source).and_then(|t| t.instantiate(&b.source_args).map_err(|e| e.message))
    };
    let target = if b.target == "zero" {
        Ok(Algebra::zero(n))
    } else {
        lookup(&b.target).and_then(|t| t.instantiate(&b.target_args).map_err(|e| e.message))
    };
    let (source, target) = match (source, target) {
        (Ok(s), Ok(t)) => (s, t),
        (Err(e), _) | (_, Err(e)) => {
            r.push("parametric-index", CheckStatus::Fail, e);
            return r.skip_rest();
        }
    };
    if b.source_args.is_empty() {
        r.push("parametric-index", CheckStatus::Skipped, "no parametric index");
    } else {
        let args: Vec<String> = b.source_args.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        r.push("parametric-index", CheckStatus::Pass, args.join(", "));
    }
    verify_into(r, &source, &target, &b.basis)
}

impl From<AlgebraError> for DegenerationError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::SingularMatrix => DegenerationError::SingularBasis,
            other => DegenerationError::DimensionMismatch(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::null_filiform;

    fn q(n: i64) -> Q {
        Q::from_int(n)
    }

    fn alg(n: usize, e: &[(usize, usize, usize, i64)]) -> Algebra<Q> {
        Algebra::from_entries(n, e.iter().map(|&(i, j, k, c)| (i, j, k, q(c)))).unwrap()
    }

    // null-filiform chain of length 4, with and without an extra square e5e5 = e4
    fn chain_plus_square() -> Algebra<Q> {
        alg(5, &[(1, 1, 2, 1), (1, 2, 3, 1), (2, 1, 3, 1), (1, 3, 4, 1), (3, 1, 4, 1), (2, 2, 4, 1), (5, 5, 4, 1)])
    }

    fn chain() -> Algebra<Q> {
        alg(5, &[(1, 1, 2, 1), (1, 2, 3, 1), (2, 1, 3, 1), (1, 3, 4, 1), (3, 1, 4, 1), (2, 2, 4, 1)])
    }

    fn diag_powers(p: &[u32]) -> Matrix<RatFunc> {
        Matrix::from_fn(p.len(), p.len(), |i, j| if i == j { RatFunc::s().pow(p[i] as i64).unwrap() } else { RatFunc::zero() })
    }

    #[test]
    fn identity_basis_leaves_constants() {
        let a = chain_plus_square().lift();
        assert_eq!(parametric_constants(&a, &Matrix::identity(5)).unwrap(), a);
    }

    #[test]
    fn hand_expanded_entry() {
        // E₅E₅ = t⁶e₄ = t²E₄
        let c = parametric_constants(&chain_plus_square().lift(), &diag_powers(&[1, 2, 3, 4, 3])).unwrap();
        assert_eq!(c.constant(4, 4, 3), RatFunc::s().pow(2).unwrap());
        let lim = limit_tensor(&c, &Q::zero()).unwrap();
        assert!(lim.same_table(&chain()));
    }

    #[test]
    fn scaling_multiplies_constants_by_s() {
        let a = null_filiform(4);
        let c = parametric_constants(&a.lift(), &Matrix::identity(4).scale(&RatFunc::s())).unwrap();
        for (i, j, k, v) in a.entries() {
            assert_eq!(c.constant(i - 1, j - 1, k - 1), RatFunc::s().times(&RatFunc::constant(v)));
        }
        let r = verify("scale", &a.lift(), &Algebra::zero(4), &ParametricBasis::scaling(4));
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn poles_name_the_entry() {
        let a = alg(2, &[(1, 1, 2, 1)]).lift();
        let inv_s = RatFunc::one().checked_div(&RatFunc::s()).unwrap();
        let p = Matrix::from_rows(vec![vec![RatFunc::one(), RatFunc::zero()], vec![RatFunc::zero(), RatFunc::s()]]);
        let c = parametric_constants(&a, &p).unwrap();
        assert_eq!(c.constant(0, 0, 1), inv_s);
        assert_eq!(
            limit_tensor(&c, &Q::zero()).unwrap_err(),
            DegenerationError::Pole { i: 1, j: 1, k: 2, value: inv_s.to_string() }
        );
    }

    #[test]
    fn singular_basis() {
        let a = chain_plus_square().lift();
        assert_eq!(parametric_constants(&a, &Matrix::zeros(5, 5)).unwrap_err(), DegenerationError::SingularBasis);
        let mut basis = ParametricBasis::scaling(5);
        basis.matrix = Matrix::zeros(5, 5);
        let r = verify("x", &a, &chain(), &basis);
        assert_eq!(r.failure().unwrap().name, "invertibility");
        assert_eq!(r.checks.len(), CHECKS.len());
    }

    #[test]
    fn reports() {
        let id = ParametricBasis { matrix: Matrix::identity(5), subst: RatFunc::s(), point: Q::zero() };
        assert!(verify("id", &chain_plus_square().lift(), &chain_plus_square(), &id).passed());
        let r = verify("wrong", &chain_plus_square().lift(), &chain(), &id);
        assert_eq!(r.failure().unwrap().name, "target-equality");
        assert!(r.failure().unwrap().detail.contains("c(5,5,4)"));
        let r = verify("ok", &chain_plus_square().lift(), &chain(), &ParametricBasis { matrix: diag_powers(&[1, 2, 3, 4, 3]), ..id });
        assert!(r.passed(), "{r}");
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["status"], "pass");
        assert_eq!(json["checks"].as_array().unwrap().len(), 5);
        assert_eq!(json["checks"][0]["name"], "invertibility");
    }

    #[test]
    fn battery() {
        let z = Algebra::zero(5);
        let b = necessary_battery(&z, &null_filiform(5));
        assert!(b.refuted);
        assert_eq!((b.verdicts[0].source, b.verdicts[0].target, b.verdicts[0].consistent), (0, 4, false));
        assert!(!necessary_battery(&null_filiform(5), &z).refuted);
        assert!(!necessary_battery(&chain_plus_square(), &chain()).refuted);
    }
}
