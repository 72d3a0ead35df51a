//! Borel-stable condition sets: evaluate in a fixed basis, then search for a
//! basis in which another algebra satisfies them.

use nilgeo::catalog::catalog;
use nilgeo::conditions::{eval_conditions, search_basis, SearchConfig, SearchOutcome};
use nilgeo::families::a133;
use nilgeo::scalars::GaussianRational as Q;

fn main() {
    let c = catalog();
    let mu15 = c.get("mu15", &Default::default()).unwrap();
    for name in ["r_mu15", "r_mu15_amended"] {
        let cs = &c.condition_entry(name).unwrap().set;
        let r = eval_conditions(&mu15, cs).unwrap();
        let failing: Vec<usize> = r.failing.iter().map(|f| f.index).collect();
        println!("mu15 against {name}: satisfied {}, failing clauses {failing:?}", r.satisfied);
    }

    // A133(2) is not in the printed basis of any of these, but the search can
    // still find a basis for some
    let v = a133(&Q::from_int(2));
    let cfg = SearchConfig::default();
    for name in ["r_mu17", "r_mu22"] {
        let cs = &c.condition_entry(name).unwrap().set;
        match search_basis(&v, cs, 2000, 7, &cfg) {
            SearchOutcome::Found { trial, basis } => {
                println!("{name}: basis at trial {trial}");
                for row in basis.row_vecs() {
                    let row: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                    println!("  [{}]", row.join(", "));
                }
                let moved = v.change_basis(&basis).unwrap();
                println!("  recheck: {}", eval_conditions(&moved, &cs.without_rebase()).unwrap().satisfied);
            }
            SearchOutcome::NotFound { trials } => println!("{name}: nothing in {trials} trials"),
        }
    }
}
