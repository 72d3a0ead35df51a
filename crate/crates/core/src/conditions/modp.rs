//! Arithmetic in `F_p` with `p ≡ 1 (mod 4)`, so `i` has an image. Used as a
//! sound prefilter for the basis search: a clause that holds over ℚ(i) with
//! `p`-integral data also holds after reduction mod `p`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::scalars::{Field, GaussianRational as Q};

pub(crate) const P: u64 = 998_244_353;

const fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

/// 3 generates `F_p^*`, so this has order 4.
const SQRT_MINUS_ONE: u64 = pow_mod(3, (P - 1) / 4);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(crate) struct Fp(u64);

fn reduce(n: &BigInt) -> u64 {
    let r = n % BigInt::from(P);
    let r = r.to_i64().expect("residue fits");
    r.rem_euclid(P as i64) as u64
}

impl Fp {
    /// `None` when the denominator vanishes mod `p`.
    pub(crate) fn try_from_q(c: &Q) -> Option<Fp> {
        let den = Fp(reduce(c.den())).inv()?;
        let re = Fp(reduce(c.re_num()));
        let im = Fp(reduce(c.im_num()));
        Some(re.plus(&im.times(&Fp(SQRT_MINUS_ONE))).times(&den))
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {P})", self.0)
    }
}

impl Field for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn one() -> Self {
        Fp(1)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn plus(&self, o: &Self) -> Self {
        Fp((self.0 + o.0) % P)
    }
    fn minus(&self, o: &Self) -> Self {
        Fp((self.0 + P - o.0) % P)
    }
    fn times(&self, o: &Self) -> Self {
        Fp(self.0 * o.0 % P)
    }
    fn negated(&self) -> Self {
        Fp((P - self.0) % P)
    }
    fn inv(&self) -> Option<Self> {
        (self.0 != 0).then(|| Fp(pow_mod(self.0, P - 2)))
    }
    /// Only integer literals reach this during clause evaluation.
    fn from_scalar(c: &Q) -> Self {
        Fp::try_from_q(c).expect("denominator divisible by the prefilter prime")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_squares_to_minus_one() {
        let i = Fp::try_from_q(&Q::i()).unwrap();
        assert_eq!(i.times(&i), Fp::one().negated());
    }

    #[test]
    fn reduction_is_a_ring_map() {
        let q = |r: i64, i: i64, d: i64| Q::new(r.into(), i.into(), d.into()).unwrap();
        let (a, b) = (q(3, -5, 7), q(-2, 11, 3));
        let f = |x: &Q| Fp::try_from_q(x).unwrap();
        assert_eq!(f(&(&a * &b)), f(&a).times(&f(&b)));
        assert_eq!(f(&(&a + &b)), f(&a).plus(&f(&b)));
        assert_eq!(f(&a.inv().unwrap()), f(&a).inv().unwrap());
    }
}
