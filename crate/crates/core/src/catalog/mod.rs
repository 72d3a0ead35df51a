//! Built-in tables: the 5-dimensional nilpotent associative algebras, the
//! 2-step nilpotent families, the degeneration witnesses and the condition
//! sets used to separate components.
//!
//! Greek parameters are written in ASCII: λ → `l`, μ → `m`, α → `a`.
//! `mu21` takes `branch` (= ±i). There is no `mu16`: the naming
//! skips from μ₁₅ to μ₁₇.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, ProductMode};
use crate::conditions::{Clause, ConditionSet, SpaceTerm};
use crate::degeneration::{AlgebraRef, DegenerationWitness, Resolver};
use crate::dsl::{self, parse_algebra, parse_conditions, parse_witness, AlgebraTemplate, DslError, Expr};
use crate::families::{self, FamilyError, SampleConfig};
use crate::scalars::GaussianRational as Q;

macro_rules! data {
    ($dir:literal, $ext:literal: $($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("data/", $dir, "/", $name, ".", $ext)))),*]
    };
}

const ALGEBRAS: &[(&str, &str)] = data!("algebras", "alg":
    "a405", "a406_1", "mu13_5", "mu14_5", "lambda2", "lambda3", "lambda4", "lambda5", "lambda6",
    "mu1", "mu2", "mu3", "mu4", "mu5", "mu6", "mu7", "mu8", "mu9", "mu10", "mu11", "mu12", "mu13",
    "mu14", "mu15", "mu17", "mu18", "mu19", "mu20", "mu21", "mu22",
);

/// In ledger order.
const WITNESSES: &[(&str, &str)] = data!("witnesses", "deg":
    "a405__a406_1", "lambda6_0__a405", "mu14_5__mu13_5", "mu4__mu3", "mu11__mu10",
    "lambda6_1pt__lambda2", "lambda4__lambda3", "mu14_5__lambda4", "lambda6_m1o1pt__lambda5",
    "mu6__mu5", "mu13__mu12", "mu2__mu1", "mu11__mu2", "mu8__mu7", "mu15__mu14",
    "mu22_1ot__mu4", "mu15__mu6", "mu22__mu8", "mu11__mu9", "mu18__mu13", "mu22_t__mu19",
);

const CONDITIONS: &[(&str, &str)] = data!("conditions", "cond":
    "r_a405", "r_mu14_5", "r_lambda6", "r_mu11", "r_mu15", "r_mu17", "r_mu18", "r_mu20", "r_mu22",
    "r_mu21_mi", "r_mu21_i",
    "r_mu15_amended", "r_mu18_amended", "r_mu20_amended", "r_mu21_mi_amended", "r_mu21_i_amended",
);

/// `(name, parameter names, description)` for the families built in code.
const FAMILIES: &[(&str, &[&str], &str)] = &[
    ("h", &["n", "l1", "..."], "H(l1, ..., l_{n/2}): (n+1)-dimensional, e_i e_j = (A_n)_{ij} e_{n+1}"),
    ("v32", &["l", "m1", "m2", "m3", "m4", "m5", "m6", "m7"], "V_{3+2} = <<A : B>>"),
    ("a133", &["l"], "A_133(l) = V_{2+3}"),
    ("mu0", &["n"], "null-filiform, e_i e_j = e_{i+j}"),
    ("n2", &["a"], "4-dimensional N_2(a)"),
    ("n3", &["a"], "4-dimensional N_3(a)"),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry `{0}`")]
    UnknownName(String),
    #[error("`{name}` expects parameters [{expected}], got [{found}]")]
    ArityMismatch { name: String, expected: String, found: String },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Dsl(#[from] DslError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Algebra,
    Family,
    Witness,
    ConditionSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: EntryKind,
    pub params: Vec<String>,
    pub note: String,
}

/// Which reading of a printed condition set an entry encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// As printed.
    Printed,
    /// Printed, with powers `A_i^m` (m > 2) read as squares.
    Squared,
    /// Corrected so that the namesake satisfies it.
    Amended,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionEntry {
    pub set: ConditionSet,
    /// The printed set this one is a reading of.
    pub base: String,
    pub variant: Variant,
    /// The algebra the set is written for; parameters are filled by
    /// [`Catalog::namesake`].
    pub namesake: &'static str,
}

pub struct Catalog {
    templates: BTreeMap<String, AlgebraTemplate>,
    witnesses: Vec<DegenerationWitness>,
    conditions: Vec<ConditionEntry>,
}

/// The parsed built-in catalog.
pub fn catalog() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(|| Catalog::load().expect("built-in catalog data is valid"))
}

fn namesake_of(base: &str) -> &'static str {
    match base {
        "r_a405" => "a405",
        "r_mu14_5" => "mu14_5",
        "r_lambda6" => "lambda6",
        "r_mu11" => "mu11",
        "r_mu15" => "mu15",
        "r_mu17" => "mu17",
        "r_mu18" => "mu18",
        "r_mu20" => "mu20",
        "r_mu22" => "mu22",
        "r_mu21_mi" | "r_mu21_i" => "mu21",
        _ => unreachable!("condition set without namesake: {base}"),
    }
}

impl Catalog {
    fn load() -> Result<Self, DslError> {
        let mut templates = BTreeMap::new();
        for (name, text) in ALGEBRAS {
            let t = parse_algebra(text).map_err(|e| e.with_file(format!("{name}.alg")))?;
            templates.insert(name.to_string(), t);
        }
        let witnesses = WITNESSES
            .iter()
            .map(|(name, text)| parse_witness(text).map_err(|e| e.with_file(format!("{name}.deg"))))
            .collect::<Result<_, _>>()?;
        let mut conditions = Vec::new();
        for (name, text) in CONDITIONS {
            let set = parse_conditions(text).map_err(|e| e.with_file(format!("{name}.cond")))?;
            let (base, variant) = match name.strip_suffix("_amended") {
                Some(b) => (b, Variant::Amended),
                None => (*name, Variant::Printed),
            };
            if variant == Variant::Printed && set.clauses.iter().any(has_high_power) {
                let mut sq = squared(&set);
                sq.label = format!("{name}_squared");
                conditions.push(ConditionEntry { set: sq, base: base.to_string(), variant: Variant::Squared, namesake: namesake_of(base) });
            }
            conditions.push(ConditionEntry { set, base: base.to_string(), variant, namesake: namesake_of(base) });
        }
        conditions.sort_by_key(|c| (CONDITIONS.iter().position(|(n, _)| *n == c.base), c.variant as u8));
        Ok(Catalog { templates, witnesses, conditions })
    }

    pub fn template(&self, name: &str) -> Option<&AlgebraTemplate> {
        self.templates.get(name)
    }

    pub fn algebra_names(&self) -> impl Iterator<Item = &str> {
        ALGEBRAS.iter().map(|(n, _)| *n)
    }

    /// The printed degeneration witnesses, in table order.
    pub fn witnesses(&self) -> &[DegenerationWitness] {
        &self.witnesses
    }

    pub fn witness(&self, name: &str) -> Option<&DegenerationWitness> {
        self.witnesses.iter().find(|w| w.label == name)
    }

    /// Every condition set with all its readings.
    pub fn condition_entries(&self) -> &[ConditionEntry] {
        &self.conditions
    }

    pub fn condition_entry(&self, name: &str) -> Option<&ConditionEntry> {
        self.conditions.iter().find(|c| c.set.label == name)
    }

    /// The reading of `base` used for claims: the amended one if there is
    /// one, otherwise the printed one.
    pub fn effective_condition_set(&self, base: &str) -> Option<&ConditionEntry> {
        let of = |v| self.conditions.iter().find(|c| c.base == base && c.variant == v);
        of(Variant::Amended).or_else(|| of(Variant::Printed))
    }

    /// Names of the printed condition sets.
    pub fn condition_bases(&self) -> Vec<&str> {
        CONDITIONS.iter().map(|(n, _)| *n).filter(|n| !n.ends_with("_amended")).collect()
    }

    pub fn entries(&self) -> Vec<CatalogEntry> {
        let mut out = Vec::new();
        for (name, _) in ALGEBRAS {
            let t = &self.templates[*name];
            out.push(CatalogEntry { name: name.to_string(), kind: EntryKind::Algebra, params: t.params.clone(), note: format!("dim {}", t.dim) });
        }
        for (name, params, note) in FAMILIES {
            out.push(CatalogEntry {
                name: name.to_string(),
                kind: EntryKind::Family,
                params: params.iter().map(|p| p.to_string()).collect(),
                note: note.to_string(),
            });
        }
        for w in &self.witnesses {
            out.push(CatalogEntry {
                name: w.label.clone(),
                kind: EntryKind::Witness,
                params: w.free.clone(),
                note: format!("{} -> {}", w.source, w.target),
            });
        }
        for c in &self.conditions {
            out.push(CatalogEntry {
                name: c.set.label.clone(),
                kind: EntryKind::ConditionSet,
                params: Vec::new(),
                note: format!("{:?} reading for {}", c.variant, c.namesake).to_lowercase(),
            });
        }
        out
    }

    /// DSL text of any entry; families are shown as their parameter list.
    pub fn show(&self, name: &str) -> Result<String, CatalogError> {
        if let Some(t) = self.templates.get(name) {
            return Ok(t.to_dsl());
        }
        if let Some(w) = self.witness(name) {
            return Ok(dsl::write_witness(w));
        }
        if let Some(c) = self.condition_entry(name) {
            return Ok(dsl::write_conditions(&c.set));
        }
        if let Some((n, params, note)) = FAMILIES.iter().find(|f| f.0 == name) {
            return Ok(format!("# {note}\nfamily {n} params {}\n", params.join(" ")));
        }
        Err(CatalogError::UnknownName(name.to_string()))
    }

    /// A concrete algebra from a table or a family.
    pub fn get(&self, name: &str, params: &BTreeMap<String, Q>) -> Result<Algebra<Q>, CatalogError> {
        if let Some(t) = self.templates.get(name) {
            check_params(name, &t.params, params)?;
            return Ok(t.instantiate(params)?);
        }
        let Some((_, names, _)) = FAMILIES.iter().find(|f| f.0 == name) else {
            return Err(CatalogError::UnknownName(name.to_string()));
        };
        let positional: Vec<String> = if name == "h" {
            let n = params.get("n").and_then(small_int).unwrap_or(0);
            std::iter::once("n".to_string()).chain((1..=n / 2).map(|i| format!("l{i}"))).collect()
        } else {
            names.iter().map(|s| s.to_string()).collect()
        };
        check_params(name, &positional, params)?;
        let values: Vec<Q> = positional.iter().map(|p| params[p].clone()).collect();
        Ok(families::named_family(name, &values)?.with_label(name))
    }

    /// The namesake of a condition set, with parameters chosen for the
    /// families (`branch` follows the set name; `a` defaults to 3/7).
    pub fn namesake(&self, entry: &ConditionEntry, a: Option<Q>) -> Algebra<Q> {
        let params: BTreeMap<String, Q> = match entry.namesake {
            "lambda6" | "mu22" => [("a".to_string(), a.unwrap_or_else(|| Q::ratio(3, 7).unwrap()))].into(),
            "mu21" => {
                let b = if entry.base == "r_mu21_mi" { -Q::i() } else { Q::i() };
                [("branch".to_string(), b)].into()
            }
            _ => BTreeMap::new(),
        };
        self.get(entry.namesake, &params).expect("namesake exists")
    }

    /// `P = t·I` onto the zero algebra; template parameters stay free.
    pub fn scale_to_zero(&self, name: &str) -> Result<DegenerationWitness, CatalogError> {
        let t = self.templates.get(name).ok_or_else(|| CatalogError::UnknownName(name.to_string()))?;
        let n = 5.max(t.dim);
        let basis = (1..=n).map(|i| vec![(i, Expr::var("t"))]).collect();
        Ok(DegenerationWitness {
            label: format!("{name}__zero"),
            source: AlgebraRef { name: name.to_string(), args: t.params.iter().map(|p| (p.clone(), Expr::var(p))).collect() },
            target: AlgebraRef { name: "zero".to_string(), args: Vec::new() },
            subst: Expr::var("s"),
            point: Expr::int(0),
            free: t.params.clone(),
            requires: Vec::new(),
            basis,
        })
    }

    /// `count` random bindings of the witness's free parameters, avoiding its
    /// declared exclusions; deterministic in `seed`.
    pub fn sample_parameters(&self, w: &DegenerationWitness, count: usize, seed: u64) -> Vec<BTreeMap<String, Q>> {
        if w.free.is_empty() {
            return vec![BTreeMap::new()];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = SampleConfig { max_num: 20, max_den: 7 };
        let mut out = Vec::new();
        while out.len() < count {
            let values: BTreeMap<String, Q> = w.free.iter().map(|p| (p.clone(), families::random_rational(&mut rng, &cfg))).collect();
            if w.bind(&values).is_ok() {
                out.push(values);
            }
        }
        out
    }
}

impl Resolver for Catalog {
    fn template(&self, name: &str) -> Option<AlgebraTemplate> {
        self.templates.get(name).cloned()
    }
}

fn small_int(q: &Q) -> Option<usize> {
    if q.is_integral() && q.is_real() {
        usize::try_from(q.re_num()).ok()
    } else {
        None
    }
}

fn check_params(name: &str, expected: &[String], got: &BTreeMap<String, Q>) -> Result<(), CatalogError> {
    let ok = expected.len() == got.len() && expected.iter().all(|p| got.contains_key(p));
    if ok {
        Ok(())
    } else {
        Err(CatalogError::ArityMismatch {
            name: name.to_string(),
            expected: expected.join(", "),
            found: got.keys().cloned().collect::<Vec<_>>().join(", "),
        })
    }
}

fn has_high_power(c: &Clause) -> bool {
    let terms = match c {
        Clause::Contained { terms, .. } | Clause::Zero { terms } => terms,
        Clause::Poly { .. } => return false,
    };
    terms.iter().any(|t| matches!(t, SpaceTerm::Power(_, m) if *m > 2))
}

/// Replaces every `A_i^m` with `m > 2` by `A_i^2`.
pub fn squared(cs: &ConditionSet) -> ConditionSet {
    let fix = |terms: &[SpaceTerm]| -> Vec<SpaceTerm> {
        terms.iter().map(|t| match *t {
            SpaceTerm::Power(i, m) if m > 2 => SpaceTerm::Power(i, 2),
            other => other,
        }).collect()
    };
    let clauses = cs
        .clauses
        .iter()
        .map(|c| match c {
            Clause::Contained { terms, flag } => Clause::Contained { terms: fix(terms), flag: *flag },
            Clause::Zero { terms } => Clause::Zero { terms: fix(terms) },
            other => other.clone(),
        })
        .collect();
    ConditionSet { clauses, ..cs.clone() }
}

impl ConditionEntry {
    pub fn mode(&self) -> ProductMode {
        self.set.mode
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn none() -> BTreeMap<String, Q> {
        BTreeMap::new()
    }

    fn one(k: &str, v: Q) -> BTreeMap<String, Q> {
        [(k.to_string(), v)].into()
    }

    #[test]
    fn loads() {
        let c = catalog();
        assert_eq!(c.witnesses().len(), 21);
        assert_eq!(c.condition_bases().len(), 11);
        assert!(c.template("mu16").is_none());
    }

    #[test]
    fn printed_tables() {
        let c = catalog();
        let mu0 = c.get("mu0", &one("n", Q::from_int(5))).unwrap();
        assert!(mu0.same_table(&families::null_filiform(5)));
        let l6 = c.get("lambda6", &one("a", Q::zero())).unwrap();
        let expect = Algebra::from_entries(5, [(1, 1, 2, Q::one()), (1, 2, 3, Q::one()), (2, 1, 3, Q::one()), (4, 5, 3, Q::one())]).unwrap();
        assert!(l6.same_table(&expect));
        let m21 = c.get("mu21", &one("branch", Q::i())).unwrap();
        assert_eq!(m21.basis_product(3, 0), vec![Q::zero(), Q::complex(1, -1), Q::zero(), Q::zero(), Q::i()]);
        assert_eq!(m21.basis_product(4, 3), vec![Q::zero(), Q::zero(), -Q::i(), Q::zero(), Q::zero()]);
    }

    #[test]
    fn lookup_errors() {
        let c = catalog();
        assert_eq!(c.get("mu16", &none()).unwrap_err(), CatalogError::UnknownName("mu16".into()));
        assert!(matches!(c.get("lambda6", &none()), Err(CatalogError::ArityMismatch { .. })));
        assert!(matches!(c.get("mu1", &one("a", Q::one())), Err(CatalogError::ArityMismatch { .. })));
        assert!(matches!(c.get("h", &one("n", Q::from_int(4))), Err(CatalogError::ArityMismatch { .. })));
        let h = c.get("h", &[("n", 4), ("l1", 2), ("l2", 3)].iter().map(|(k, v)| (k.to_string(), Q::from_int(*v))).collect()).unwrap();
        assert_eq!(h.dim(), 5);
    }

    #[test]
    fn witness_metadata() {
        let c = catalog();
        let w = c.witness("mu22__mu8").unwrap();
        assert_eq!(w.requires.len(), 1);
        assert_eq!(w.requires[0].to_string(), "a*(1 + a^2)");
        for v in c.sample_parameters(w, 5, 1) {
            let a = &v["a"];
            assert!(!(a * &(&Q::one() + &(a * a))).is_zero());
        }
    }

    #[test]
    fn canonical_round_trips() {
        let c = catalog();
        for (name, _) in ALGEBRAS {
            let text = c.show(name).unwrap();
            assert_eq!(parse_algebra(&text).unwrap().to_dsl(), text);
        }
        for w in c.witnesses() {
            let text = dsl::write_witness(w);
            assert_eq!(&parse_witness(&text).unwrap(), w);
        }
        for e in c.condition_entries() {
            let text = dsl::write_conditions(&e.set);
            assert_eq!(parse_conditions(&text).unwrap(), e.set);
        }
    }

    #[test]
    fn r_lambda6_and_r_mu21_mi() {
        let c = catalog();
        let l6 = &c.condition_entry("r_lambda6").unwrap().set;
        assert_eq!(l6.rebase, Some(vec![1, 4, 5, 2, 3]));
        assert_eq!(l6.clauses.len(), 1);
        assert_eq!(l6.clauses[0].to_string(), "A1^2 sub A4");
        let m = &c.condition_entry("r_mu21_mi").unwrap().set;
        assert!(m.clauses.iter().any(|cl| cl.to_string() == "2*c(2,2,3)*c(1,1,3) = c(1,2,3)^2 + c(2,1,3)^2"));
    }
}
