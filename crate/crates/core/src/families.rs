//! Parametric families of 2-step nilpotent algebras and the component
//! calculator for the varieties `Nil²_n` (all, commutative, anticommutative).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::Algebra;
use crate::linalg::Matrix;
use crate::scalars::{Field, GaussianRational as Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("family `{name}` takes {expected} parameters, got {found}")]
    ArityMismatch { name: String, expected: String, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    All,
    Commutative,
    Anticommutative,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::All, Flavor::Commutative, Flavor::Anticommutative];

    /// Number of free structure constants in one `(n−k)×(n−k)` block.
    fn block_params(self, m: usize) -> usize {
        match self {
            Flavor::All => m * m,
            Flavor::Commutative => m * (m + 1) / 2,
            Flavor::Anticommutative => m * m.saturating_sub(1) / 2,
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "all" => Ok(Flavor::All),
            "commutative" | "c" => Ok(Flavor::Commutative),
            "anticommutative" | "ac" => Ok(Flavor::Anticommutative),
            _ => Err(format!("unknown flavor `{s}` (expected all, commutative or anticommutative)")),
        }
    }
}

impl std::fmt::Display for Flavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Flavor::All => "all",
            Flavor::Commutative => "commutative",
            Flavor::Anticommutative => "anticommutative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentDescriptor {
    pub n: usize,
    pub k: usize,
    pub flavor: Flavor,
    pub dim: usize,
}

/// The admissible `k` for `Nil²_{n,k}` by the closed-form bound and by direct
/// enumeration of the multiplicity constraint. `inconsistent` is set when the
/// two disagree; `ks()` always reports the closed-form range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentRange {
    pub n: usize,
    pub flavor: Flavor,
    pub formula: Vec<usize>,
    pub direct: Vec<usize>,
    pub inconsistent: bool,
}

impl ComponentRange {
    pub fn ks(&self) -> &[usize] {
        &self.formula
    }
}

/// `⌊(2n + c − √d) / 2⌋`, exactly.
fn floor_half_minus_sqrt(two_n_plus_c: i64, d: i64) -> i64 {
    let mut r = (d as f64).sqrt() as i64;
    while r * r > d {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= d {
        r += 1;
    }
    let mut m = (two_n_plus_c - r).div_euclid(2);
    // largest m with 2n + c − 2m ≥ √d
    loop {
        let x = two_n_plus_c - 2 * m;
        if x >= 0 && x * x >= d {
            return m;
        }
        m -= 1;
    }
}

fn multiplicity_bound(n: usize, k: usize, flavor: Flavor) -> usize {
    flavor.block_params(n - k)
}

pub fn component_range(n: usize, flavor: Flavor) -> ComponentRange {
    let ni = n as i64;
    let (lower, upper) = match flavor {
        Flavor::All => (1, floor_half_minus_sqrt(2 * ni + 1, 4 * ni + 1)),
        Flavor::Commutative => (1, floor_half_minus_sqrt(2 * ni + 3, 8 * ni + 9)),
        Flavor::Anticommutative => (1 + (ni + 1) % 2, floor_half_minus_sqrt(2 * ni + 1, 8 * ni + 1)),
    };
    let formula: Vec<usize> = (lower..=upper).map(|k| k as usize).collect();
    let mut direct: Vec<usize> = (1..=n).filter(|&k| k <= multiplicity_bound(n, k, flavor)).collect();
    // odd skew-symmetric matrices are singular: for even n an anticommutative
    // algebra with one-dimensional square has dim ann ≥ 2, so k = 1 sits
    // inside k = 2 whenever k = 2 is itself admissible
    if flavor == Flavor::Anticommutative && n.is_multiple_of(2) && direct.contains(&2) {
        direct.retain(|&k| k != 1);
    }
    let inconsistent = formula != direct;
    ComponentRange { n, flavor, formula, direct, inconsistent }
}

/// `dim Nil²_{n,k}` for the flavor.
pub fn component_dim(n: usize, k: usize, flavor: Flavor) -> usize {
    assert!(k <= n);
    flavor.block_params(n - k) * k + (n - k) * k
}

pub fn components(n: usize, flavor: Flavor) -> Vec<ComponentDescriptor> {
    component_range(n, flavor)
        .ks()
        .iter()
        .map(|&k| ComponentDescriptor { n, k, flavor, dim: component_dim(n, k, flavor) })
        .collect()
}

/// Dimension `d + m` algebra with `e_i e_j = Σ_p (mats_p)_{ij} e_{d+p}`.
pub fn algebra_from_matrices(mats: &[Matrix<Q>]) -> Result<Algebra, FamilyError> {
    let d = mats.first().map_or(0, Matrix::rows);
    if mats.iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(FamilyError::DimensionMismatch("matrices must be square of equal size".into()));
    }
    let mut entries = Vec::new();
    for (p, m) in mats.iter().enumerate() {
        for i in 0..d {
            for j in 0..d {
                if !m[(i, j)].is_zero() {
                    entries.push((i + 1, j + 1, d + p + 1, m[(i, j)].clone()));
                }
            }
        }
    }
    Ok(Algebra::from_entries(d + mats.len(), entries).expect("indices are in range by construction"))
}

/// The `S_{n,k}` algebra with the given coefficient blocks, after
/// symmetrizing (commutative) or skew-symmetrizing (anticommutative).
pub fn snk(n: usize, k: usize, coeffs: &[Matrix<Q>], flavor: Flavor) -> Result<Algebra, FamilyError> {
    if k > n {
        return Err(FamilyError::DimensionMismatch(format!("k = {k} exceeds n = {n}")));
    }
    if coeffs.len() != k {
        return Err(FamilyError::DimensionMismatch(format!("expected {k} coefficient blocks, got {}", coeffs.len())));
    }
    let half = Q::ratio(1, 2).unwrap();
    let blocks: Vec<Matrix<Q>> = coeffs
        .iter()
        .map(|m| match flavor {
            Flavor::All => m.clone(),
            Flavor::Commutative => m.add(&m.transpose()).scale(&half),
            Flavor::Anticommutative => m.add(&m.transpose().scale(&Q::from_int(-1))).scale(&half),
        })
        .collect();
    if k == 0 {
        return Ok(Algebra::zero(n));
    }
    algebra_from_matrices(&blocks)
}

/// Jordan block of size `k` with eigenvalue `lambda` (ones on the superdiagonal).
pub fn jordan(k: usize, lambda: &Q) -> Matrix<Q> {
    Matrix::from_fn(k, k, |i, j| {
        if i == j {
            lambda.clone()
        } else if j == i + 1 {
            Q::one()
        } else {
            Q::zero()
        }
    })
}

/// Skew sum `[A\B] = ((0, B), (A, 0))`.
pub fn skew_sum(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    Matrix::from_fn(br + ar, bc + ac, |i, j| {
        if i < br && j >= ac {
            b[(i, j - ac)].clone()
        } else if i >= br && j < ac {
            a[(i - br, j)].clone()
        } else {
            Q::zero()
        }
    })
}

/// `Γ_k`: the anti-diagonal ±1 band. Counting rows from the bottom (r = 1
/// for the last row), row r carries `(−1)^{r+1}` in columns r and r + 1; the
/// top row keeps only its column-k entry.
pub fn gamma(k: usize) -> Matrix<Q> {
    Matrix::from_fn(k, k, |row, col| {
        let r = k - row;
        let sign = if r % 2 == 1 { Q::one() } else { Q::from_int(-1) };
        if col + 1 == r || (col == r && r < k) {
            sign
        } else {
            Q::zero()
        }
    })
}

pub fn direct_sum(blocks: &[Matrix<Q>]) -> Matrix<Q> {
    let n: usize = blocks.iter().map(Matrix::rows).sum();
    let mut m = Matrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m[(off + i, off + j)] = b[(i, j)].clone();
            }
        }
        off += b.rows();
    }
    m
}

/// `𝔄_n = diag([J₁(λ₁)\I], …, [J₁(λ_t)\I] [, 1])` with `t = ⌊n/2⌋`.
pub fn frak_a(lambdas: &[Q], n: usize) -> Result<Matrix<Q>, FamilyError> {
    if lambdas.len() != n / 2 {
        return Err(FamilyError::DimensionMismatch(format!(
            "𝔄_{n} takes {} parameters, got {}",
            n / 2,
            lambdas.len()
        )));
    }
    let one = Matrix::identity(1);
    let mut blocks: Vec<Matrix<Q>> = lambdas.iter().map(|l| skew_sum(&jordan(1, l), &one)).collect();
    if n % 2 == 1 {
        blocks.push(one);
    }
    Ok(direct_sum(&blocks))
}

/// `H(λ₁, …, λ_{⌊n/2⌋})`, the `(n+1)`-dimensional algebra of the matrix `𝔄_n`.
pub fn h_family(n: usize, lambdas: &[Q]) -> Result<Algebra, FamilyError> {
    Ok(algebra_from_matrices(&[frak_a(lambdas, n)?])?.with_label(format!("H_{n}")))
}

/// Parameters where `H_n` picks up extra derivations: some `λ_i = -1`, some
/// `λ_i λ_j = 1` or `λ_i = λ_j`, or (odd `n`, where a bare `1` block is
/// present) some `λ_i = 1`. Off this set `dim Der = ⌊3n/2⌋ + 1`.
pub fn h_exceptional(n: usize, lambdas: &[Q]) -> bool {
    let one = Q::one();
    lambdas.iter().enumerate().any(|(i, a)| {
        a.is_zero()
            || *a == one.negated()
            || (n % 2 == 1 && *a == one)
            || lambdas[..i].iter().any(|b| a == b || a.times(b) == one)
    })
}

/// `𝔙_{3+2} = ⟨⟨A : B⟩⟩` with `A = ((1,0,0),(0,0,1),(0,λ,0))` and
/// `B = ((0,μ₁,μ₂),(μ₃,μ₄,μ₅),(μ₆,μ₇,1))`.
pub fn v32(lambda: &Q, mu: &[Q; 7]) -> Algebra {
    let z = Q::zero;
    let a = Matrix::from_rows(vec![
        vec![Q::one(), z(), z()],
        vec![z(), z(), Q::one()],
        vec![z(), lambda.clone(), z()],
    ]);
    let b = Matrix::from_rows(vec![
        vec![z(), mu[0].clone(), mu[1].clone()],
        vec![mu[2].clone(), mu[3].clone(), mu[4].clone()],
        vec![mu[5].clone(), mu[6].clone(), Q::one()],
    ]);
    algebra_from_matrices(&[a, b]).expect("3×3 blocks").with_label("v32")
}

/// `A₁₃₃(λ) = 𝔙_{2+3}`: `e1e1 = e3 + λe5, e1e2 = e3, e2e1 = e4, e2e2 = e5`.
pub fn a133(lambda: &Q) -> Algebra {
    Algebra::from_entries(
        5,
        [
            (1, 1, 3, Q::one()),
            (1, 1, 5, lambda.clone()),
            (1, 2, 3, Q::one()),
            (2, 1, 4, Q::one()),
            (2, 2, 5, Q::one()),
        ],
    )
    .unwrap()
    .with_label("a133")
}

/// `μ₀ⁿ`: `e_i e_j = e_{i+j}` for `i + j ≤ n`.
pub fn null_filiform(n: usize) -> Algebra {
    let mut e = Vec::new();
    for i in 1..=n {
        for j in 1..=n.saturating_sub(i) {
            e.push((i, j, i + j, Q::one()));
        }
    }
    Algebra::from_entries(n, e).unwrap().with_label(format!("mu0_{n}"))
}

/// `𝔑₂(α)`: `e1e1 = e3, e1e2 = e4, e2e1 = −αe3, e2e2 = −e4`.
pub fn n2alpha(alpha: &Q) -> Algebra {
    Algebra::from_entries(
        4,
        [(1, 1, 3, Q::one()), (1, 2, 4, Q::one()), (2, 1, 3, -alpha), (2, 2, 4, Q::from_int(-1))],
    )
    .unwrap()
    .with_label("n2")
}

/// `𝔑₃(α)`: `e1e1 = e4, e1e2 = αe4, e2e1 = −αe4, e2e2 = e4, e3e3 = e4`.
pub fn n3alpha(alpha: &Q) -> Algebra {
    Algebra::from_entries(
        4,
        [
            (1, 1, 4, Q::one()),
            (1, 2, 4, alpha.clone()),
            (2, 1, 4, -alpha),
            (2, 2, 4, Q::one()),
            (3, 3, 4, Q::one()),
        ],
    )
    .unwrap()
    .with_label("n3")
}

fn small_dim(name: &str, x: &Q) -> Result<usize, FamilyError> {
    if !x.is_integral() || !x.is_real() {
        return Err(FamilyError::InvalidParameter(format!("{name}: dimension must be a positive integer, got {x}")));
    }
    let n: i64 = x
        .re_num()
        .try_into()
        .map_err(|_| FamilyError::InvalidParameter(format!("{name}: dimension {x} out of range")))?;
    if !(1..=64).contains(&n) {
        return Err(FamilyError::InvalidParameter(format!("{name}: dimension must be in 1..=64, got {n}")));
    }
    Ok(n as usize)
}

/// Family constructor by name with positional parameters:
/// `h: [n, λ₁ … λ_{⌊n/2⌋}]`, `v32: [λ, μ₁ … μ₇]`, `a133: [λ]`, `mu0: [n]`,
/// `n2: [α]`, `n3: [α]`.
pub fn named_family(name: &str, params: &[Q]) -> Result<Algebra, FamilyError> {
    let arity = |expected: &str, ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(FamilyError::ArityMismatch { name: name.to_string(), expected: expected.to_string(), found: params.len() })
        }
    };
    match name {
        "h" => {
            arity("1 + ⌊n/2⌋", !params.is_empty())?;
            let n = small_dim(name, &params[0])?;
            arity(&format!("{}", 1 + n / 2), params.len() == 1 + n / 2)?;
            h_family(n, &params[1..])
        }
        "v32" => {
            arity("8", params.len() == 8)?;
            let mu: [Q; 7] = std::array::from_fn(|i| params[i + 1].clone());
            Ok(v32(&params[0], &mu))
        }
        "a133" => {
            arity("1", params.len() == 1)?;
            Ok(a133(&params[0]))
        }
        "mu0" => {
            arity("1", params.len() == 1)?;
            Ok(null_filiform(small_dim(name, &params[0])?))
        }
        "n2" => {
            arity("1", params.len() == 1)?;
            Ok(n2alpha(&params[0]))
        }
        "n3" => {
            arity("1", params.len() == 1)?;
            Ok(n3alpha(&params[0]))
        }
        _ => Err(FamilyError::UnknownFamily(name.to_string())),
    }
}

/// Coefficient distribution for [`sample_random_with`]: numerators uniform in
/// `[-max_num, max_num]`, denominators uniform in `[1, max_den]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleConfig {
    pub max_num: i64,
    pub max_den: i64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { max_num: 10, max_den: 1 }
    }
}

pub fn random_rational(rng: &mut impl Rng, cfg: &SampleConfig) -> Q {
    let p = rng.gen_range(-cfg.max_num..=cfg.max_num);
    let q = rng.gen_range(1..=cfg.max_den.max(1));
    Q::ratio(p, q).unwrap()
}

pub fn sample_random(n: usize, k: usize, flavor: Flavor, seed: u64) -> Result<Algebra, FamilyError> {
    sample_random_with(n, k, flavor, seed, &SampleConfig::default())
}

/// A seeded random member of `S_{n,k}` of the given flavor.
pub fn sample_random_with(n: usize, k: usize, flavor: Flavor, seed: u64, cfg: &SampleConfig) -> Result<Algebra, FamilyError> {
    if k > n {
        return Err(FamilyError::DimensionMismatch(format!("k = {k} exceeds n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = n - k;
    let blocks: Vec<Matrix<Q>> = (0..k)
        .map(|_| {
            let mut b = Matrix::zeros(m, m);
            for i in 0..m {
                for j in 0..m {
                    match flavor {
                        Flavor::All => b[(i, j)] = random_rational(&mut rng, cfg),
                        Flavor::Commutative if j >= i => {
                            let x = random_rational(&mut rng, cfg);
                            b[(j, i)] = x.clone();
                            b[(i, j)] = x;
                        }
                        Flavor::Anticommutative if j > i => {
                            let x = random_rational(&mut rng, cfg);
                            b[(j, i)] = -&x;
                            b[(i, j)] = x;
                        }
                        _ => {}
                    }
                }
            }
            b
        })
        .collect();
    let a = if k == 0 { Algebra::zero(n) } else { algebra_from_matrices(&blocks)? };
    Ok(a.with_label(format!("snk_{n}_{k}_{flavor}_{seed}")))
}
