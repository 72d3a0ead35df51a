//! Checking a degeneration witness: rewrite the source in a basis depending on
//! t, take t -> 0 and compare with the target.

use std::collections::BTreeMap;

use nilgeo::catalog::catalog;
use nilgeo::degeneration::{necessary_battery, verify_witness};
use nilgeo::dsl::parse_witness;

const WITNESS: &str = "\
degeneration mu15_to_mu14
source = mu15
target = mu14
basis:
E1 = t^-1*e1
E2 = t^-2*e2
E3 = t^-3*e3
E4 = t^-1*e4
E5 = t^-2*e5
";

fn main() {
    let c = catalog();
    let w = parse_witness(WITNESS).unwrap();
    let report = verify_witness(&w, &BTreeMap::new(), c);
    println!("{report}");

    // same family of bases with one vector left unscaled: the limit is not mu14
    let broken = parse_witness(&WITNESS.replace("E4 = t^-1*e4", "E4 = e4")).unwrap();
    println!("{}", verify_witness(&broken, &BTreeMap::new(), c));

    // the catalog ships its own ledger; parameters are sampled where free
    for w in c.witnesses().iter().take(6) {
        let values = c.sample_parameters(w, 1, 3).pop().unwrap_or_default();
        let r = verify_witness(w, &values, c);
        println!("{:<24} {}", w.label, if r.passed() { "ok" } else { "FAILED" });
    }

    // invariants that any degeneration must respect
    let none = BTreeMap::new();
    let (a, b) = (c.get("mu11", &none).unwrap(), c.get("mu10", &none).unwrap());
    println!("mu11 -> mu10: {}", necessary_battery(&a, &b));
    println!("mu10 -> mu11: {}", necessary_battery(&b, &a));
}
