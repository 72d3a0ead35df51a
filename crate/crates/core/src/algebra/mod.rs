//! Algebras given by structure constants `e_i e_j = Σ_k c_{ij}^k e_k`.

mod invariants;
mod subspace;

pub use invariants::{Flags, InvariantFingerprint, NilIndex};
pub use subspace::Subspace;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalars::{Field, GaussianRational, RatFunc, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("index ({i}, {j}, {k}) out of range for dimension {dim}")]
    IndexOutOfRange { i: usize, j: usize, k: usize, dim: usize },
    #[error("basis matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("algebra is not concrete: {0}")]
    NotConcrete(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// How `U·V` is formed for subspaces `U`, `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductMode {
    /// `span{uv}`
    #[default]
    OneSided,
    /// `span{uv, vu}`
    Symmetric,
}

impl std::str::FromStr for ProductMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "one_sided" => Ok(ProductMode::OneSided),
            "symmetric" => Ok(ProductMode::Symmetric),
            other => Err(format!("unknown product mode `{other}` (expected one_sided or symmetric)")),
        }
    }
}

impl std::fmt::Display for ProductMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProductMode::OneSided => "one_sided",
            ProductMode::Symmetric => "symmetric",
        })
    }
}

/// A formal parameter and, once instantiated, its value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub value: Option<GaussianRational>,
}

/// Structure-constant algebra over a field `F`.
///
/// Indices are 0-based internally. Absent `(i, j)` keys mean `e_i e_j = 0`;
/// stored product vectors may still be zero after cancellation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Algebra<F = GaussianRational> {
    dim: usize,
    table: BTreeMap<(usize, usize), Vec<F>>,
    pub params: Vec<Param>,
    pub label: Option<String>,
}

/// Algebra whose structure constants are rational functions of `s`.
pub type ParametricAlgebra = Algebra<RatFunc>;

impl<F: Field> Algebra<F> {
    pub fn zero(dim: usize) -> Self {
        Algebra { dim, table: BTreeMap::new(), params: Vec::new(), label: None }
    }

    /// Builds from 1-based `(i, j, k, c)` entries; duplicates are summed.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, usize, usize, F)>) -> Result<Self, AlgebraError> {
        let mut a = Self::zero(dim);
        for (i, j, k, c) in entries {
            if [i, j, k].iter().any(|&x| x == 0 || x > dim) {
                return Err(AlgebraError::IndexOutOfRange { i, j, k, dim });
            }
            a.add_constant(i - 1, j - 1, k - 1, &c);
        }
        a.prune();
        Ok(a)
    }

    /// Builds from a dense 0-based tensor `c[i][j][k]`.
    pub fn from_tensor(dim: usize, c: impl Fn(usize, usize, usize) -> F) -> Self {
        let mut a = Self::zero(dim);
        for i in 0..dim {
            for j in 0..dim {
                let v: Vec<F> = (0..dim).map(|k| c(i, j, k)).collect();
                if v.iter().any(|x| !x.is_zero()) {
                    a.table.insert((i, j), v);
                }
            }
        }
        a
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    fn add_constant(&mut self, i: usize, j: usize, k: usize, c: &F) {
        let dim = self.dim;
        let v = self.table.entry((i, j)).or_insert_with(|| vec![F::zero(); dim]);
        v[k] = v[k].plus(c);
    }

    fn prune(&mut self) {
        self.table.retain(|_, v| v.iter().any(|x| !x.is_zero()));
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 0-based structure constant `c_{ij}^k`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> F {
        self.table.get(&(i, j)).map_or_else(F::zero, |v| v[k].clone())
    }

    /// Nonzero products as `((i, j), e_i e_j)`, 0-based, in lexicographic order.
    pub fn products(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<F>)> {
        self.table.iter()
    }

    /// Product of basis vectors `e_i e_j` (0-based).
    pub fn basis_product(&self, i: usize, j: usize) -> Vec<F> {
        self.table.get(&(i, j)).cloned().unwrap_or_else(|| vec![F::zero(); self.dim])
    }

    pub fn is_zero_algebra(&self) -> bool {
        self.table.is_empty()
    }

    /// Bilinear product of coordinate vectors.
    pub fn multiply(&self, x: &[F], y: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut out = vec![F::zero(); self.dim];
        for (&(i, j), v) in &self.table {
            if x[i].is_zero() || y[j].is_zero() {
                continue;
            }
            let f = x[i].times(&y[j]);
            for (o, c) in out.iter_mut().zip(v) {
                if !c.is_zero() {
                    *o = o.plus(&f.times(c));
                }
            }
        }
        out
    }

    /// Structure constants in the basis `E_i = Σ_j P_{ij} e_j`.
    pub fn change_basis(&self, p: &Matrix<F>) -> Result<Self, AlgebraError> {
        if p.rows() != self.dim || p.cols() != self.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: p.rows() });
        }
        let pinv = p.inverse().ok_or(AlgebraError::SingularMatrix)?;
        Ok(self.change_basis_with_inverse(p, &pinv))
    }

    /// [`Algebra::change_basis`] with a caller-supplied inverse.
    pub fn change_basis_with_inverse(&self, p: &Matrix<F>, pinv: &Matrix<F>) -> Self {
        let n = self.dim;
        let rows: Vec<Vec<F>> = p.row_vecs();
        let mut out = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let v = self.multiply(&rows[i], &rows[j]);
                if v.iter().all(F::is_zero) {
                    continue;
                }
                let w = pinv.left_mul_vec(&v);
                if w.iter().any(|x| !x.is_zero()) {
                    out.table.insert((i, j), w);
                }
            }
        }
        out.params = self.params.clone();
        out.label = self.label.clone();
        out
    }

    /// Appends `m - dim` basis vectors that multiply to zero with everything.
    pub fn pad_to(&self, m: usize) -> Self {
        assert!(m >= self.dim, "cannot pad to a smaller dimension");
        let mut out = Self::zero(m);
        for (&(i, j), v) in &self.table {
            let mut w = v.clone();
            w.resize(m, F::zero());
            out.table.insert((i, j), w);
        }
        out.params = self.params.clone();
        out.label = self.label.clone();
        out
    }

    /// `span{uv}` (or `span{uv, vu}`) over basis vectors of `u` and `v`.
    pub fn subspace_product(&self, u: &Subspace<F>, v: &Subspace<F>, mode: ProductMode) -> Subspace<F> {
        let mut vecs = Vec::new();
        for x in u.basis() {
            for y in v.basis() {
                vecs.push(self.multiply(x, y));
                if mode == ProductMode::Symmetric {
                    vecs.push(self.multiply(y, x));
                }
            }
        }
        Subspace::span(self.dim, vecs)
    }

    pub fn map_field<G: Field>(&self, f: impl Fn(&F) -> G) -> Algebra<G> {
        let mut out = Algebra::<G>::zero(self.dim);
        for (&k, v) in &self.table {
            out.table.insert(k, v.iter().map(&f).collect());
        }
        out.prune();
        out.params = self.params.clone();
        out.label = self.label.clone();
        out
    }

    pub fn try_map_field<G: Field, E>(&self, f: impl Fn(&F) -> Result<G, E>) -> Result<Algebra<G>, E> {
        let mut out = Algebra::<G>::zero(self.dim);
        for (&k, v) in &self.table {
            out.table.insert(k, v.iter().map(&f).collect::<Result<_, _>>()?);
        }
        out.prune();
        out.params = self.params.clone();
        out.label = self.label.clone();
        Ok(out)
    }

    /// Entrywise equality of structure constants (labels and params ignored).
    pub fn same_table(&self, o: &Self) -> bool {
        if self.dim != o.dim {
            return false;
        }
        let keys: std::collections::BTreeSet<_> = self.table.keys().chain(o.table.keys()).collect();
        keys.into_iter().all(|&(i, j)| self.basis_product(i, j) == o.basis_product(i, j))
    }

    /// Entries `(i, j, k, c)` (1-based) with `c ≠ 0`.
    pub fn entries(&self) -> Vec<(usize, usize, usize, F)> {
        let mut out = Vec::new();
        for (&(i, j), v) in &self.table {
            for (k, c) in v.iter().enumerate() {
                if !c.is_zero() {
                    out.push((i + 1, j + 1, k + 1, c.clone()));
                }
            }
        }
        out
    }
}

impl Algebra<GaussianRational> {
    /// Lifts to constant rational functions.
    pub fn lift(&self) -> ParametricAlgebra {
        self.map_field(|c| RatFunc::constant(c.clone()))
    }
}

impl ParametricAlgebra {
    /// The concrete algebra when every structure constant is constant in `s`.
    pub fn to_concrete(&self) -> Result<Algebra, AlgebraError> {
        self.try_map_field(|f| {
            f.as_constant().ok_or_else(|| AlgebraError::NotConcrete(format!("entry {f} depends on s")))
        })
    }

    /// Evaluates every structure constant at `s = p`.
    pub fn eval_at(&self, p: &GaussianRational) -> Result<Algebra, AlgebraError> {
        Ok(self.try_map_field(|f| f.eval_at(p))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_matrix;

    type Q = GaussianRational;

    fn mu0(n: usize) -> Algebra {
        let mut e = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i + j <= n {
                    e.push((i, j, i + j, Q::one()));
                }
            }
        }
        Algebra::from_entries(n, e).unwrap()
    }

    fn unit(n: usize, i: usize) -> Vec<Q> {
        (0..n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect()
    }

    #[test]
    fn index_out_of_range() {
        let err = Algebra::from_entries(5, [(1, 1, 6, Q::one())]).unwrap_err();
        assert!(matches!(err, AlgebraError::IndexOutOfRange { k: 6, .. }));
        assert!(Algebra::from_entries(3, [(0, 1, 1, Q::one())]).is_err());
    }

    #[test]
    fn duplicate_entries_are_summed() {
        let a = Algebra::from_entries(2, [(1, 1, 2, Q::one()), (1, 1, 2, Q::from_int(2))]).unwrap();
        assert_eq!(a.constant(0, 0, 1), Q::from_int(3));
        let z = Algebra::from_entries(2, [(1, 1, 2, Q::one()), (1, 1, 2, Q::from_int(-1))]).unwrap();
        assert!(z.is_zero_algebra());
    }

    #[test]
    fn null_filiform_products() {
        let a = mu0(5);
        assert_eq!(a.multiply(&unit(5, 1), &unit(5, 2)), unit(5, 4));
        assert!(a.multiply(&unit(5, 2), &unit(5, 2)).iter().all(Q::is_zero));
        let z = Algebra::<Q>::zero(3);
        assert!(z.multiply(&unit(3, 0), &unit(3, 0)).iter().all(Q::is_zero));
    }

    #[test]
    fn diagonal_rescaling() {
        // e1 e1 = e2 in the basis (t e1, t^2 e2), t = 2: E1 E1 = 4 e2 = E2
        let a = Algebra::from_entries(2, [(1, 1, 2, Q::one())]).unwrap();
        let p = int_matrix(&[&[2, 0], &[0, 4]]);
        let b = a.change_basis(&p).unwrap();
        assert_eq!(b.constant(0, 0, 1), Q::one());
        // with P = diag(t, t) the product picks up one factor of t
        let p = int_matrix(&[&[2, 0], &[0, 2]]);
        assert_eq!(a.change_basis(&p).unwrap().constant(0, 0, 1), Q::from_int(2));
    }

    #[test]
    fn singular_change_of_basis() {
        let a = mu0(3);
        let p = int_matrix(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
        assert_eq!(a.change_basis(&p).unwrap_err(), AlgebraError::SingularMatrix);
    }

    #[test]
    fn change_basis_round_trip() {
        let a = mu0(4);
        let p = int_matrix(&[&[1, 2, 0, 0], &[0, 1, 3, 0], &[0, 0, 1, -1], &[1, 0, 0, 1]]);
        let b = a.change_basis(&p).unwrap();
        let back = b.change_basis(&p.inverse().unwrap()).unwrap();
        assert!(back.same_table(&a));
    }

    #[test]
    fn padding_adds_annihilating_directions() {
        let a = mu0(3).pad_to(5);
        assert_eq!(a.dim(), 5);
        assert_eq!(a.constant(0, 0, 1), Q::one());
        assert!(a.basis_product(4, 0).iter().all(Q::is_zero));
    }
}
