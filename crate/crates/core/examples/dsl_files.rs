//! The text formats: algebras with parameters, condition sets, and error
//! positions.

use std::collections::BTreeMap;

use nilgeo::dsl::{parse_algebra, parse_conditions, write_conditions};
use nilgeo::scalars::GaussianRational as Q;

const ALG: &str = "\
algebra v dim 5 params l
# comments are skipped
e1 e1 = e3 + l*e5
e1 e2 = e3
e2 e1 = e4
e2 e2 = e5
";

const COND: &str = "\
conditions demo
A1^2 sub A3
A1*A3 = 0
c(1,2,3) = -c(2,1,3)
";

fn main() {
    let t = parse_algebra(ALG).unwrap();
    for l in [Q::ratio(1, 2).unwrap(), Q::i()] {
        let env = BTreeMap::from([("l".to_string(), l.clone())]);
        let a = t.instantiate_concrete(&env).unwrap();
        println!("l = {l}: dim Der {}, nil index {}", a.derivation_dim(), a.nil_index());
    }
    print!("{}", t.to_dsl());

    let cs = parse_conditions(COND).unwrap();
    print!("{}", write_conditions(&cs));

    for bad in ["algebra x dim 3\ne1 e1 = e4\n", "algebra x dim 3\ne1 e2 = 2*\n", "conditions c\nA1^2 sup A3\n"] {
        let err = if bad.starts_with("algebra") { parse_algebra(bad).err() } else { parse_conditions(bad).err() };
        println!("error: {}", err.unwrap());
    }
}
