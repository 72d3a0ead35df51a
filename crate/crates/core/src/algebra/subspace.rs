use crate::linalg::Matrix;
use crate::scalars::Field;

/// A linear subspace of `F^n`, stored as the nonzero rows of its reduced row
/// echelon form. Two subspaces are equal iff their stored bases are equal.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::coordinate(ambient, 0..ambient)
    }

    /// `⟨e_i : i ∈ idx⟩` for 0-based indices.
    pub fn coordinate(ambient: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let vecs = idx
            .into_iter()
            .map(|i| (0..ambient).map(|k| if k == i { F::one() } else { F::zero() }).collect())
            .collect();
        Self::span(ambient, vecs)
    }

    /// The flag space `⟨e_i, …, e_n⟩` for a 1-based `i`; empty when `i > n`.
    pub fn flag(ambient: usize, i: usize) -> Self {
        Self::coordinate(ambient, i.saturating_sub(1)..ambient)
    }

    pub fn span(ambient: usize, vecs: Vec<Vec<F>>) -> Self {
        let vecs: Vec<Vec<F>> = vecs.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())).collect();
        if vecs.is_empty() {
            return Self::zero(ambient);
        }
        debug_assert!(vecs.iter().all(|v| v.len() == ambient));
        let (r, pivots) = Matrix::from_rows(vecs).rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient, basis, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn join(&self, o: &Self) -> Self {
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        Self::span(self.ambient, v)
    }

    /// Membership test by reduction against the echelon basis.
    pub fn contains(&self, v: &[F]) -> bool {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, r) in w.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = x.minus(&f.times(r));
                }
            }
        }
        w.iter().all(F::is_zero)
    }

    pub fn is_subspace_of(&self, o: &Self) -> bool {
        self.dim() <= o.dim() && self.basis.iter().all(|v| o.contains(v))
    }
}

impl<F: std::fmt::Display> std::fmt::Debug for Subspace<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Subspace(dim {} in {}: ", self.basis.len(), self.ambient)?;
        for (n, row) in self.basis.iter().enumerate() {
            if n > 0 {
                f.write_str(", ")?;
            }
            f.write_str("(")?;
            for (k, x) in row.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        f.write_str(")")
    }
}
