use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Field;

/// An element of ℚ(i), stored as `(re_num + im_num·i) / den` over a shared
/// positive denominator.
///
/// The representation is canonical: `gcd(re_num, im_num, den) = 1` and zero is
/// always `(0, 0, 1)`, so derived equality and hashing are value equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re_num: BigInt,
    im_num: BigInt,
    den: BigInt,
}

impl GaussianRational {
    /// Builds `(re + im·i) / den`. Returns `None` when `den` is zero.
    pub fn new(re: BigInt, im: BigInt, den: BigInt) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::normalized(re, im, den))
    }

    fn normalized(mut re: BigInt, mut im: BigInt, mut den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if den.is_negative() {
            re = -re;
            im = -im;
            den = -den;
        }
        let g = re.gcd(&im).gcd(&den);
        if !g.is_one() {
            re /= &g;
            im /= &g;
            den /= &g;
        }
        GaussianRational { re_num: re, im_num: im, den }
    }

    pub fn zero() -> Self {
        GaussianRational { re_num: BigInt::zero(), im_num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational { re_num: BigInt::zero(), im_num: BigInt::one(), den: BigInt::one() }
    }

    pub fn from_int(n: i64) -> Self {
        GaussianRational { re_num: BigInt::from(n), im_num: BigInt::zero(), den: BigInt::one() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        GaussianRational { re_num: n, im_num: BigInt::zero(), den: BigInt::one() }
    }

    /// `p/q` as a real element; `None` if `q = 0`.
    pub fn ratio(p: i64, q: i64) -> Option<Self> {
        Self::new(BigInt::from(p), BigInt::zero(), BigInt::from(q))
    }

    /// `(re + im·i)` with integer parts.
    pub fn complex(re: i64, im: i64) -> Self {
        Self::normalized(BigInt::from(re), BigInt::from(im), BigInt::one())
    }

    pub fn re_num(&self) -> &BigInt {
        &self.re_num
    }

    pub fn im_num(&self) -> &BigInt {
        &self.im_num
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.re_num.is_zero() && self.im_num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re_num.is_one() && self.im_num.is_zero() && self.den.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im_num.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re_num: self.re_num.clone(), im_num: -&self.im_num, den: self.den.clone() }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // d / (a + bi) = d (a - bi) / (a² + b²)
        let norm = &self.re_num * &self.re_num + &self.im_num * &self.im_num;
        Some(Self::normalized(&self.den * &self.re_num, -(&self.den * &self.im_num), norm))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self * &inv)
    }

    /// Integer power; negative exponents invert (and fail on zero).
    pub fn pow(&self, exp: i64) -> Option<Self> {
        let base = if exp < 0 { self.inv()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Some(acc)
    }

    /// Multiplies by the denominator: the Gaussian integer `re_num + im_num·i`.
    pub fn scaled_numerator(&self) -> Self {
        GaussianRational { re_num: self.re_num.clone(), im_num: self.im_num.clone(), den: BigInt::one() }
    }

    fn fmt_body(&self) -> String {
        let (a, b) = (&self.re_num, &self.im_num);
        let imag = |b: &BigInt| -> String {
            if b.is_one() {
                "i".to_string()
            } else if *b == BigInt::from(-1) {
                "-i".to_string()
            } else {
                format!("{b}i")
            }
        };
        if b.is_zero() {
            a.to_string()
        } else if a.is_zero() {
            imag(b)
        } else if b.is_negative() {
            format!("{a}-{}", imag(&-b))
        } else {
            format!("{a}+{}", imag(b))
        }
    }

    /// True when the printed form needs parentheses inside a product.
    pub fn is_compound(&self) -> bool {
        !self.re_num.is_zero() && !self.im_num.is_zero()
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body = self.fmt_body();
        if self.den.is_one() {
            f.write_str(&body)
        } else if self.is_compound() {
            write!(f, "({body})/{}", self.den)
        } else {
            write!(f, "{body}/{}", self.den)
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Default for GaussianRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        if self.den == o.den {
            return GaussianRational::normalized(
                &self.re_num + &o.re_num,
                &self.im_num + &o.im_num,
                self.den.clone(),
            );
        }
        GaussianRational::normalized(
            &self.re_num * &o.den + &o.re_num * &self.den,
            &self.im_num * &o.den + &o.im_num * &self.den,
            &self.den * &o.den,
        )
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        self + &(-o)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.is_zero() || o.is_zero() {
            return GaussianRational::zero();
        }
        let re = &self.re_num * &o.re_num - &self.im_num * &o.im_num;
        let im = &self.re_num * &o.im_num + &self.im_num * &o.re_num;
        GaussianRational::normalized(re, im, &self.den * &o.den)
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    /// Panics on division by zero; use [`GaussianRational::checked_div`] for a fallible form.
    fn div(self, o: &GaussianRational) -> GaussianRational {
        self.checked_div(o).expect("division by zero in ℚ(i)")
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re_num: -&self.re_num, im_num: -&self.im_num, den: self.den.clone() }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: GaussianRational) -> GaussianRational { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, o: &GaussianRational) -> GaussianRational { (&self).$m(o) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        *self = &*self + o;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, o: &GaussianRational) {
        *self = &*self - o;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, o: &GaussianRational) {
        *self = &*self * o;
    }
}

impl Field for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        GaussianRational::inv(self)
    }
    fn from_scalar(c: &GaussianRational) -> Self {
        c.clone()
    }
}
