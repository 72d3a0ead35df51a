//! Isomorphism invariants of concrete algebras.

use serde::Serialize;

use super::{Algebra, AlgebraError, ProductMode, Subspace};
use crate::linalg::Matrix;
use crate::scalars::GaussianRational as Q;

/// Least `m` with `A^m = 0`, or infinite when the power chain stalls at a
/// nonzero subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NilIndex {
    Finite(usize),
    Infinite,
}

impl NilIndex {
    pub fn is_finite(&self) -> bool {
        matches!(self, NilIndex::Finite(_))
    }
}

impl std::fmt::Display for NilIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NilIndex::Finite(m) => write!(f, "{m}"),
            NilIndex::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub commutative: bool,
    pub anticommutative: bool,
    pub associative: bool,
    pub two_step_nilpotent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantFingerprint {
    pub dim: usize,
    pub dim_square: usize,
    pub dim_annihilator: usize,
    pub nil_index: NilIndex,
    pub dim_der: usize,
    pub orbit_dim: usize,
    pub flags: Flags,
}

impl Algebra<Q> {
    /// `A² = span{e_i e_j}`.
    pub fn square(&self) -> Subspace<Q> {
        Subspace::span(self.dim(), self.products().map(|(_, v)| v.clone()).collect())
    }

    /// Two-sided annihilator `{x : x e_i = e_i x = 0 for all i}`.
    pub fn annihilator(&self) -> Subspace<Q> {
        let n = self.dim();
        // unknown x_a; conditions Σ_a x_a c_{a i}^k = 0 and Σ_a x_a c_{i a}^k = 0
        let mut rows = Vec::new();
        for i in 0..n {
            for k in 0..n {
                let left: Vec<Q> = (0..n).map(|a| self.constant(a, i, k)).collect();
                let right: Vec<Q> = (0..n).map(|a| self.constant(i, a, k)).collect();
                for r in [left, right] {
                    if r.iter().any(|x| !x.is_zero()) {
                        rows.push(r);
                    }
                }
            }
        }
        if rows.is_empty() {
            return Subspace::full(n);
        }
        Subspace::span(n, Matrix::from_rows(rows).kernel())
    }

    /// Powers `A^1 = A`, `A^m = Σ_{a+b=m} A^a A^b`, up to and including the
    /// first zero power or the first stall. Index 0 holds `A^1`.
    pub fn powers(&self) -> (Vec<Subspace<Q>>, NilIndex) {
        let n = self.dim();
        let mut pw = vec![Subspace::full(n)];
        if n == 0 {
            return (pw, NilIndex::Finite(1));
        }
        let mut stall = 0;
        loop {
            let m = pw.len() + 1;
            let mut acc = Subspace::zero(n);
            for a in 1..m {
                let prod = self.subspace_product(&pw[a - 1], &pw[m - a - 1], ProductMode::OneSided);
                acc = acc.join(&prod);
            }
            let same = acc == pw[pw.len() - 1];
            let zero = acc.is_zero();
            pw.push(acc);
            if zero {
                return (pw, NilIndex::Finite(m));
            }
            // the chain is non-increasing; a stall as long as the chain so far means it is stuck
            stall = if same { stall + 1 } else { 0 };
            if stall > n + 1 {
                return (pw, NilIndex::Infinite);
            }
        }
    }

    pub fn nil_index(&self) -> NilIndex {
        self.powers().1
    }

    pub fn classify(&self) -> Flags {
        let n = self.dim();
        let mut commutative = true;
        let mut anticommutative = true;
        for i in 0..n {
            for j in 0..n {
                let a = self.basis_product(i, j);
                let b = self.basis_product(j, i);
                if a != b {
                    commutative = false;
                }
                if a.iter().zip(&b).any(|(x, y)| !(x + y).is_zero()) {
                    anticommutative = false;
                }
            }
        }
        let associative = self.is_associative();
        let sq = self.square();
        let two_step_nilpotent = sq.is_subspace_of(&self.annihilator());
        Flags { commutative, anticommutative, associative, two_step_nilpotent }
    }

    /// `(e_i e_j) e_k = e_i (e_j e_k)` on all basis triples.
    pub fn is_associative(&self) -> bool {
        let n = self.dim();
        let unit = |i: usize| -> Vec<Q> { (0..n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect() };
        for i in 0..n {
            for j in 0..n {
                let ij = self.basis_product(i, j);
                for k in 0..n {
                    let jk = self.basis_product(j, k);
                    if self.multiply(&ij, &unit(k)) != self.multiply(&unit(i), &jk) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// The Leibniz system `D(e_i e_j) = D(e_i) e_j + e_i D(e_j)` as a
    /// `n³ × n²` matrix over the unknowns `d_{kl}` (`D e_k = Σ_l d_{kl} e_l`),
    /// unknown `d_{kl}` at column `k n + l`.
    pub fn leibniz_system(&self) -> Matrix<Q> {
        let n = self.dim();
        let mut m = Matrix::zeros(n * n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let row = (i * n + j) * n + l;
                    for k in 0..n {
                        let c = self.constant(i, j, k);
                        if !c.is_zero() {
                            m[(row, k * n + l)] = &m[(row, k * n + l)] + &c;
                        }
                    }
                    for p in 0..n {
                        let c = self.constant(p, j, l);
                        if !c.is_zero() {
                            m[(row, i * n + p)] = &m[(row, i * n + p)] - &c;
                        }
                        let c = self.constant(i, p, l);
                        if !c.is_zero() {
                            m[(row, j * n + p)] = &m[(row, j * n + p)] - &c;
                        }
                    }
                }
            }
        }
        m
    }

    /// `dim Der(A)`, the corank of the Leibniz system.
    ///
    /// Rows are generated and reduced one at a time against a sparse echelon
    /// basis; the system has `n³` rows but only a handful of nonzeros per row.
    pub fn derivation_dim(&self) -> usize {
        let n = self.dim();
        let nn = n * n;
        let table: Vec<(usize, usize, usize, Q)> =
            self.entries().into_iter().map(|(i, j, k, c)| (i - 1, j - 1, k - 1, c)).collect();
        let mut by_ij: Vec<Vec<(usize, Q)>> = vec![Vec::new(); nn];
        let mut by_jl: Vec<Vec<(usize, Q)>> = vec![Vec::new(); nn];
        let mut by_il: Vec<Vec<(usize, Q)>> = vec![Vec::new(); nn];
        for (i, j, k, c) in &table {
            by_ij[i * n + j].push((*k, c.clone()));
            by_jl[j * n + k].push((*i, c.clone()));
            by_il[i * n + k].push((*j, c.clone()));
        }
        let mut pivots: Vec<Option<Vec<(usize, Q)>>> = vec![None; nn];
        let mut rank = 0;
        let mut row = vec![Q::zero(); nn];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    // D(e_i e_j)_l - (D e_i) e_j |_l - e_i (D e_j) |_l
                    let mut touched = false;
                    for (k, c) in &by_ij[i * n + j] {
                        row[k * n + l] += c;
                        touched = true;
                    }
                    for (p, c) in &by_jl[j * n + l] {
                        row[i * n + p] -= c;
                        touched = true;
                    }
                    for (p, c) in &by_il[i * n + l] {
                        row[j * n + p] -= c;
                        touched = true;
                    }
                    if touched && reduce_into(&mut row, &mut pivots) {
                        rank += 1;
                    }
                }
            }
        }
        nn - rank
    }

    /// `n² − dim Der(A)`.
    pub fn orbit_dim(&self) -> usize {
        self.dim() * self.dim() - self.derivation_dim()
    }

    pub fn fingerprint(&self) -> InvariantFingerprint {
        let dim_der = self.derivation_dim();
        InvariantFingerprint {
            dim: self.dim(),
            dim_square: self.square().dim(),
            dim_annihilator: self.annihilator().dim(),
            nil_index: self.nil_index(),
            dim_der,
            orbit_dim: self.dim() * self.dim() - dim_der,
            flags: self.classify(),
        }
    }

    /// The matrices of `proj_p ∘ μ` restricted to the complement coordinates.
    ///
    /// `complement` lists 0-based indices of the complement of `A²`; the square
    /// must be exactly the span of the remaining coordinates. Entry `(a, b)` of
    /// the `p`-th matrix is the coefficient of the `p`-th square coordinate in
    /// `e_{complement[a]} e_{complement[b]}`.
    pub fn projection_matrices(&self, complement: &[usize]) -> Result<Vec<Matrix<Q>>, AlgebraError> {
        let n = self.dim();
        if complement.iter().any(|&c| c >= n) {
            return Err(AlgebraError::PreconditionViolated("complement index out of range".into()));
        }
        let square_coords: Vec<usize> = (0..n).filter(|i| !complement.contains(i)).collect();
        let aligned = Subspace::coordinate(n, square_coords.iter().copied());
        if self.square() != aligned {
            return Err(AlgebraError::PreconditionViolated(
                "A² is not the span of the non-complement coordinates".into(),
            ));
        }
        let d = complement.len();
        Ok(square_coords
            .iter()
            .map(|&p| Matrix::from_fn(d, d, |a, b| self.constant(complement[a], complement[b], p)))
            .collect())
    }

    /// Membership in `U_{n,k}`: 2-step nilpotent with `dim A² = dim ann A = k`.
    pub fn in_unk(&self, k: usize) -> bool {
        let sq = self.square();
        let ann = self.annihilator();
        sq.is_subspace_of(&ann) && sq.dim() == k && ann.dim() == k
    }
}

/// Reduces the dense `row` against the echelon rows in `pivots` (each with a
/// leading 1 at its index) and stores it if something survives. Leaves `row`
/// zeroed.
fn reduce_into(row: &mut [Q], pivots: &mut [Option<Vec<(usize, Q)>>]) -> bool {
    for c in 0..row.len() {
        if row[c].is_zero() {
            continue;
        }
        match &pivots[c] {
            Some(p) => {
                let f = row[c].clone();
                for (k, v) in p {
                    row[*k] -= &(&f * v);
                }
            }
            None => {
                let inv = row[c].inv().expect("nonzero");
                let stored: Vec<(usize, Q)> =
                    (c..row.len()).filter(|&k| !row[k].is_zero()).map(|k| (k, &row[k] * &inv)).collect();
                for x in row.iter_mut() {
                    *x = Q::zero();
                }
                pivots[c] = Some(stored);
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_matrix;

    fn alg(n: usize, e: &[(usize, usize, usize, i64)]) -> Algebra<Q> {
        Algebra::from_entries(n, e.iter().map(|&(i, j, k, c)| (i, j, k, Q::from_int(c)))).unwrap()
    }

    fn mu0(n: usize) -> Algebra<Q> {
        let mut e = Vec::new();
        for i in 1..=n {
            for j in 1..=n - i {
                e.push((i, j, i + j, 1));
            }
        }
        alg(n, &e)
    }

    #[test]
    fn sparse_der_matches_dense_leibniz_rank() {
        let algebras = [
            mu0(5),
            alg(4, &[(1, 1, 2, 1), (1, 2, 3, -2), (2, 1, 3, 3), (3, 1, 4, 1), (2, 2, 4, 5)]),
            alg(3, &[(1, 2, 3, 1), (2, 1, 3, -1)]),
            alg(3, &[(1, 1, 1, 1), (2, 2, 2, 1), (1, 2, 3, 1)]),
        ];
        for a in &algebras {
            let dense = a.dim() * a.dim() - a.leibniz_system().rank_fraction_free();
            assert_eq!(a.derivation_dim(), dense);
        }
    }

    #[test]
    fn zero_algebra_invariants() {
        let z = Algebra::<Q>::zero(4);
        assert!(z.square().is_zero());
        assert_eq!(z.annihilator().dim(), 4);
        assert_eq!(z.derivation_dim(), 16);
        assert_eq!(z.orbit_dim(), 0);
        assert_eq!(z.nil_index(), NilIndex::Finite(2));
        assert!(!z.in_unk(1));
    }

    #[test]
    fn null_filiform_nil_index() {
        let a = mu0(5);
        assert_eq!(a.nil_index(), NilIndex::Finite(6));
        assert_eq!(a.square().dim(), 4);
        assert_eq!(a.derivation_dim(), 5);
    }

    #[test]
    fn idempotent_is_not_nilpotent() {
        let a = alg(2, &[(1, 1, 1, 1)]);
        assert_eq!(a.nil_index(), NilIndex::Infinite);
        assert!(!a.classify().two_step_nilpotent);
    }

    #[test]
    fn non_associative_example() {
        let a = alg(2, &[(1, 1, 2, 1), (2, 1, 1, 1)]);
        assert!(!a.classify().associative);
    }

    #[test]
    fn skew_projection_matrix() {
        let a = alg(3, &[(1, 2, 3, 1), (2, 1, 3, -1)]);
        let ms = a.projection_matrices(&[0, 1]).unwrap();
        assert_eq!(ms, vec![int_matrix(&[&[0, 1], &[-1, 0]])]);
        assert!(a.classify().anticommutative);
        // the square is ⟨e3⟩, so using e3 as complement is rejected
        assert!(a.projection_matrices(&[1, 2]).is_err());
    }
}
