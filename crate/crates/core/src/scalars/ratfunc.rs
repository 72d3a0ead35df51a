use std::fmt;

use super::{Field, GaussianRational as Q, ScalarError, UniPoly};

/// An element of ℚ(i)(s): `num / den` with `gcd(num, den) = 1` and `den` monic.
///
/// Because the representation is always reduced, structural equality is
/// equality of rational functions, and a zero of the denominator is a genuine
/// pole.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_rem(&g).expect("gcd is nonzero").0, den.div_rem(&g).expect("gcd is nonzero").0)
        };
        let lc = den.leading().expect("den is nonzero").clone();
        if !lc.is_one() {
            let inv = lc.inv().expect("leading coefficient is nonzero");
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RatFunc { num, den })
    }

    pub fn zero() -> Self {
        RatFunc { num: UniPoly::zero(), den: UniPoly::one() }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        RatFunc { num: UniPoly::constant(c), den: UniPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Q::from_int(n))
    }

    pub fn poly(p: UniPoly) -> Self {
        RatFunc { num: p, den: UniPoly::one() }
    }

    /// The indeterminate `s`.
    pub fn s() -> Self {
        Self::poly(UniPoly::s())
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The constant value, if the function does not depend on `s`.
    pub fn as_constant(&self) -> Option<Q> {
        if self.is_constant() {
            Some(self.num.constant_term())
        } else {
            None
        }
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ScalarError> {
        if o.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn pow(&self, e: i64) -> Result<Self, ScalarError> {
        let base = if e < 0 { Self::one().checked_div(self)? } else { self.clone() };
        let k = u32::try_from(e.unsigned_abs()).map_err(|_| ScalarError::ExponentTooLarge)?;
        // numerator and denominator stay coprime under powers
        Ok(RatFunc { num: base.num.pow(k), den: base.den.pow(k) })
    }

    /// Value at `p`; a pole if the (reduced) denominator vanishes there.
    pub fn eval_at(&self, p: &Q) -> Result<Q, ScalarError> {
        let d = self.den.eval(p);
        if d.is_zero() {
            return Err(ScalarError::Pole { point: p.clone() });
        }
        Ok(&self.num.eval(p) / &d)
    }

    /// Limit as `s → p`. Identical to [`RatFunc::eval_at`] since the stored form
    /// is reduced: a vanishing denominator there is a true pole.
    pub fn limit_at(&self, p: &Q) -> Result<Q, ScalarError> {
        self.eval_at(p)
    }

    /// Substitutes `s := g` (composition `self ∘ g`).
    pub fn compose(&self, g: &RatFunc) -> Result<Self, ScalarError> {
        let horner = |p: &UniPoly| -> RatFunc {
            let mut acc = RatFunc::zero();
            for c in p.coeffs().iter().rev() {
                acc = &(&acc * g) + &RatFunc::constant(c.clone());
            }
            acc
        };
        horner(&self.num).checked_div(&horner(&self.den))
    }
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Q> for RatFunc {
    fn from(c: Q) -> Self {
        Self::constant(c)
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone()).expect("den is nonzero");
        }
        RatFunc::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
            .expect("product of nonzero denominators")
    }
    fn minus(&self, o: &Self) -> Self {
        Field::plus(self, &Field::negated(o))
    }
    fn times(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc { num: self.num.mul(&o.num), den: UniPoly::one() };
        }
        // cross-cancel before multiplying to keep degrees down
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let q = |p: &UniPoly, g: &UniPoly| if g.is_one() { p.clone() } else { p.div_rem(g).unwrap().0 };
        RatFunc::new(q(&self.num, &g1).mul(&q(&o.num, &g2)), q(&self.den, &g2).mul(&q(&o.den, &g1)))
            .expect("product of nonzero denominators")
    }
    fn negated(&self) -> Self {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }
    fn inv(&self) -> Option<Self> {
        RatFunc::one().checked_div(self).ok()
    }
    fn from_scalar(c: &Q) -> Self {
        RatFunc::constant(c.clone())
    }
}

macro_rules! ref_ops {
    ($($tr:ident $m:ident $f:ident),*) => {$(
        impl<'a> std::ops::$tr<&'a RatFunc> for &'a RatFunc {
            type Output = RatFunc;
            fn $m(self, o: &RatFunc) -> RatFunc {
                Field::$f(self, o)
            }
        }
    )*};
}
ref_ops!(Add add plus, Sub sub minus, Mul mul times);

impl std::ops::Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        Field::negated(self)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &UniPoly| {
            let s = p.to_string();
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
                || s.contains(['+', '/', '*', '^'])
                || s.starts_with('-')
            {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(cs: &[i64]) -> UniPoly {
        UniPoly::from_coeffs(cs.iter().map(|&c| Q::from_int(c)).collect())
    }

    fn rf(n: &[i64], d: &[i64]) -> RatFunc {
        RatFunc::new(poly(n), poly(d)).unwrap()
    }

    #[test]
    fn telescoping_sum() {
        let a = rf(&[0, 1], &[1, 1]);
        let b = rf(&[1], &[1, 1]);
        assert_eq!(&a + &b, RatFunc::one());
    }

    #[test]
    fn gcd_cancellation_on_construction() {
        assert_eq!(rf(&[-1, 0, 1], &[-1, 1]), rf(&[1, 1], &[1]));
    }

    #[test]
    fn denominator_is_monic() {
        let f = rf(&[2], &[4, 2]);
        assert_eq!(f.den(), &poly(&[2, 1]));
        assert_eq!(f.num(), &poly(&[1]));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(RatFunc::one().checked_div(&RatFunc::zero()), Err(ScalarError::DivisionByZero));
        assert!(RatFunc::new(poly(&[1]), UniPoly::zero()).is_err());
    }

    #[test]
    fn eval_and_poles() {
        // (s^2 + 1)/4 at i
        let f = rf(&[1, 0, 1], &[4]);
        assert_eq!(f.eval_at(&Q::i()).unwrap(), Q::zero());
        assert!(matches!(rf(&[1], &[0, 1]).eval_at(&Q::zero()), Err(ScalarError::Pole { .. })));
        assert_eq!(rf(&[0, 1, 1], &[0, 1]).eval_at(&Q::zero()).unwrap(), Q::one());
    }

    #[test]
    fn limits() {
        let t = RatFunc::s();
        assert_eq!(t.pow(2).unwrap().limit_at(&Q::zero()).unwrap(), Q::zero());
        // 4t - 1 with t = (s^2+1)/4 is s^2, which tends to -1 at s = i
        let subst = rf(&[1, 0, 1], &[4]);
        let g = &(&RatFunc::from_int(4) * &subst) - &RatFunc::one();
        assert_eq!(g, rf(&[0, 0, 1], &[1]));
        assert_eq!(g.limit_at(&Q::i()).unwrap(), Q::from_int(-1));
        // 1/(2+t) at t = 0
        assert_eq!(rf(&[1], &[2, 1]).limit_at(&Q::zero()).unwrap(), Q::ratio(1, 2).unwrap());
    }

    #[test]
    fn composition() {
        let f = rf(&[0, 0, 1], &[1, 1]); // s^2/(1+s)
        let g = rf(&[1, 0, 1], &[4]);
        let h = f.compose(&g).unwrap();
        let p = Q::ratio(3, 7).unwrap();
        assert_eq!(h.eval_at(&p).unwrap(), f.eval_at(&g.eval_at(&p).unwrap()).unwrap());
    }
}
