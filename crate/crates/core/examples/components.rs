//! Irreducible components of the 2-step nilpotent varieties, and the
//! derivation count of the generic H family.

use nilgeo::families::{self, component_range, components, Flavor};
use nilgeo::scalars::GaussianRational as Q;

fn main() {
    for flavor in Flavor::ALL {
        println!("{flavor}");
        for n in 2..=8 {
            let comps = components(n, flavor);
            let dims: Vec<String> = comps.iter().map(|c| format!("k={}:{}", c.k, c.dim)).collect();
            let top = comps.iter().map(|c| c.dim).max().unwrap_or(0);
            let flag = if component_range(n, flavor).inconsistent { "  (closed form and scan disagree)" } else { "" };
            println!("  n={n:<2} {:<40} dim {top}{flag}", dims.join(" "));
        }
    }

    // H_n: dim Der = floor(3n/2) + 1 off the exceptional set
    let q = |a, b| Q::ratio(a, b).unwrap();
    for (n, ls) in [(4, vec![q(2, 1), q(3, 1)]), (4, vec![q(2, 1), q(1, 2)]), (5, vec![q(7, 3), q(-5, 2)]), (5, vec![q(1, 1), q(3, 1)])] {
        let h = families::h_family(n, &ls).unwrap();
        let shown: Vec<String> = ls.iter().map(|x| x.to_string()).collect();
        println!(
            "H_{n}({}) dim Der {} (generic {}), exceptional: {}",
            shown.join(", "),
            h.derivation_dim(),
            3 * n / 2 + 1,
            families::h_exceptional(n, &ls)
        );
    }
}
