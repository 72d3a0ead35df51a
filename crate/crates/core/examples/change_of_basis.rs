//! Rewriting structure constants in a new basis and checking that the
//! invariant fingerprint does not move.

use nilgeo::algebra::Algebra;
use nilgeo::catalog::catalog;
use nilgeo::conditions::{candidate, SearchConfig};
use nilgeo::linalg::Matrix;
use nilgeo::scalars::GaussianRational as Q;

fn main() {
    // <e1 e1 = e2> with E1 = 2 e1, E2 = 4 e2: E1 E1 = 4 e2 = E2
    let a = Algebra::from_entries(2, [(1, 1, 2, Q::one())]).unwrap();
    let p = Matrix::from_rows(vec![vec![Q::from_int(2), Q::zero()], vec![Q::zero(), Q::from_int(4)]]);
    let b = a.change_basis(&p).unwrap();
    println!("new constant c_11^2 = {}", b.constant(0, 0, 1));

    let mu15 = catalog().get("mu15", &Default::default()).unwrap();
    let fp = mu15.fingerprint();
    println!("mu15: {}", serde_json::to_string(&fp).unwrap());
    for trial in 0..5 {
        let p = candidate(5, 1, trial, &SearchConfig::default());
        let moved = mu15.change_basis(&p).unwrap();
        let back = moved.change_basis(&p.inverse().unwrap()).unwrap();
        println!(
            "trial {trial}: {} nonzero constants, fingerprint equal: {}, round trip: {}",
            moved.entries().len(),
            moved.fingerprint() == fp,
            back.same_table(&mu15)
        );
    }
}
