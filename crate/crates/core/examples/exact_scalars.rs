//! Exact arithmetic over Q(i) and Q(i)(s), and limits of rational functions.

use nilgeo::scalars::{Field, GaussianRational as Q, RatFunc, UniPoly};

fn main() {
    let a = &Q::ratio(3, 4).unwrap() - &Q::i().times(&Q::ratio(1, 2).unwrap());
    let b = Q::i();
    println!("a = {a}, b = {b}");
    println!("a * b = {}", &a * &b);
    println!("1/a = {}", a.inv().unwrap());
    println!("i^2 = {}", b.pow(2).unwrap());

    // t^2 / (t^2 + t): the common factor t cancels on construction
    let s = RatFunc::s();
    let s2 = s.pow(2).unwrap();
    let f = s2.checked_div(&s2.plus(&s)).unwrap();
    println!("f(s) = {f}");
    println!("f at s = 0: {:?}", f.eval_at(&Q::zero()).map(|v| v.to_string()));
    println!("lim s->0 f = {:?}", f.limit_at(&Q::zero()).map(|v| v.to_string()));

    let g = RatFunc::one().checked_div(&s).unwrap();
    println!("lim s->0 1/s = {:?}", g.limit_at(&Q::zero()).map(|v| v.to_string()));

    let p = UniPoly::from_coeffs(vec![Q::from_int(-1), Q::zero(), Q::one()]);
    let q = UniPoly::from_coeffs(vec![Q::one(), Q::one()]);
    let (quo, rem) = p.div_rem(&q).unwrap();
    println!("(s^2 - 1) / (s + 1) = {quo} rem {rem}");
}
