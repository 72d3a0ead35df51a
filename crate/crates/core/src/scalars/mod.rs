//! Exact scalars: ℚ(i) and the rational function field ℚ(i)(s).

mod gaussian;
mod poly;
mod ratfunc;

pub use gaussian::GaussianRational;
pub use poly::UniPoly;
pub use ratfunc::RatFunc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at s = {point}")]
    Pole { point: GaussianRational },
    #[error("exponent too large")]
    ExponentTooLarge,
}

/// The minimal field interface shared by [`GaussianRational`] and [`RatFunc`],
/// so linear algebra can run over either.
pub trait Field: Clone + PartialEq + std::fmt::Debug + std::fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn from_scalar(c: &GaussianRational) -> Self;

    fn quotient(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.times(&i))
    }
}
