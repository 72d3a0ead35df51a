use std::collections::BTreeMap;

use nilgeo::catalog::catalog;
use nilgeo::conditions::{candidate, SearchConfig};
use nilgeo::dsl::{parse_algebra, parse_conditions, parse_witness};
use nilgeo::scalars::{Field, GaussianRational as Q, RatFunc, UniPoly};
use proptest::prelude::*;

fn arb_q() -> impl Strategy<Value = Q> {
    (-30i64..=30, -30i64..=30, 1i64..=12).prop_map(|(r, i, d)| Q::new(r.into(), i.into(), d.into()).unwrap())
}

fn arb_poly() -> impl Strategy<Value = UniPoly> {
    prop::collection::vec(arb_q(), 0..4).prop_map(UniPoly::from_coeffs)
}

fn arb_ratfunc() -> impl Strategy<Value = RatFunc> {
    (arb_poly(), arb_poly()).prop_filter_map("zero denominator", |(n, d)| RatFunc::new(n, d).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gaussian_field_axioms(a in arb_q(), b in arb_q(), c in arb_q()) {
        prop_assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        prop_assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
        if !a.is_zero() {
            prop_assert_eq!(a.times(&a.inv().unwrap()), Q::one());
        }
    }

    #[test]
    fn ratfunc_field_axioms(a in arb_ratfunc(), b in arb_ratfunc(), c in arb_ratfunc()) {
        prop_assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        prop_assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
        prop_assert_eq!(a.minus(&a), RatFunc::zero());
    }

    #[test]
    fn canonical_form_is_unique(n in arb_poly(), d in arb_poly(), k in arb_poly()) {
        prop_assume!(!d.is_zero() && !k.is_zero());
        let reduced = RatFunc::new(n.clone(), d.clone()).unwrap();
        let unreduced = RatFunc::new(n.mul(&k), d.mul(&k)).unwrap();
        prop_assert_eq!(unreduced.num().coeffs(), reduced.num().coeffs());
        prop_assert_eq!(unreduced.den().coeffs(), reduced.den().coeffs());
    }

    #[test]
    fn evaluation_is_additive(f in arb_ratfunc(), g in arb_ratfunc(), p in arb_q()) {
        if let (Ok(x), Ok(y), Ok(z)) = (f.eval_at(&p), g.eval_at(&p), f.plus(&g).eval_at(&p)) {
            prop_assert_eq!(z, &x + &y);
        }
    }

    #[test]
    fn change_basis_round_trip(which in 0usize..30, trial in 0u64..1000) {
        let c = catalog();
        let name = c.algebra_names().nth(which).unwrap();
        let t = c.template(name).unwrap();
        let env: BTreeMap<String, Q> = t.params.iter().map(|p| (p.clone(), Q::ratio(2, 5).unwrap())).collect();
        let env = if name == "mu21" { [("branch".to_string(), Q::i())].into() } else { env };
        let a = c.get(name, &env).unwrap();
        let p = candidate(a.dim(), 99, trial, &SearchConfig::default());
        let b = a.change_basis(&p).unwrap();
        let back = b.change_basis(&p.inverse().unwrap()).unwrap();
        prop_assert!(back.same_table(&a));
        prop_assert_eq!(b.fingerprint(), a.fingerprint());
    }

    /// Deleting a token from a catalog file gives an error with a position, or
    /// another valid file; never a panic.
    #[test]
    fn token_deletion_never_panics(which in 0usize..3, entry in 0usize..40, cut in 0usize..400) {
        let c = catalog();
        let text = match which {
            0 => {
                let names: Vec<&str> = c.algebra_names().collect();
                c.show(names[entry % names.len()]).unwrap()
            }
            1 => nilgeo::dsl::write_witness(&c.witnesses()[entry % c.witnesses().len()]),
            _ => nilgeo::dsl::write_conditions(&c.condition_entries()[entry % c.condition_entries().len()].set),
        };
        let tokens: Vec<&str> = text.split_inclusive(|ch: char| ch.is_whitespace() || "(),=*+-/^".contains(ch)).collect();
        let k = cut % tokens.len();
        let mutated: String = tokens.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, t)| *t).collect();
        let err = match which {
            0 => parse_algebra(&mutated).err(),
            1 => parse_witness(&mutated).err(),
            _ => parse_conditions(&mutated).err(),
        };
        if let Some(e) = err {
            prop_assert!(e.span.line >= 1 && e.span.col_start >= 1, "{}", e);
        }
    }
}
