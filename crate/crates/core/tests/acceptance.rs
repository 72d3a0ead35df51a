//! Acceptance criteria 1-8. Runs without the libtest harness so every
//! criterion prints exactly one PASS/FAIL line, followed by indented records.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use nilgeo::algebra::Algebra;
use nilgeo::catalog::{catalog, Variant};
use nilgeo::cli::run_with;
use nilgeo::conditions::{candidate, eval_conditions, search_basis, SearchConfig, SearchOutcome};
use nilgeo::degeneration::{battery_points, necessary_battery, verify_bound_witness, verify_witness};
use nilgeo::dsl::{parse_algebra, parse_conditions, parse_witness, write_conditions, write_witness};
use nilgeo::families::{self, random_rational, Flavor, SampleConfig};
use nilgeo::scalars::GaussianRational as Q;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances. All numeric comparisons are exact; only wall time has slack.
const C1_BUDGET: Duration = Duration::from_secs(1);
const C2_BUDGET: Duration = Duration::from_secs(10);
const C3_BUDGET: Duration = Duration::from_secs(60);
const H_SEEDS: u64 = 5;
const WITNESS_SAMPLES: usize = 5;
const PARAM_POINTS: usize = 10;
const SEPARATION_LAMBDAS: usize = 10;
const SEARCH_TRIALS: usize = 10_000;
const READING_TRIALS: usize = 2_000;
const PARITY_SAMPLES: u64 = 100;
const FINGERPRINT_BASES: u64 = 50;
const FUZZ_MUTATIONS: usize = 300;
const SEED: u64 = 2024;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    summary: String,
    records: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>, records: Vec<String>) -> Self {
        Verdict { pass, summary: summary.into(), records }
    }
}

fn q(p: i64, d: i64) -> Q {
    Q::ratio(p, d).unwrap()
}

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

fn nonzero_rational(rng: &mut ChaCha8Rng, avoid: &[Q]) -> Q {
    let cfg = SampleConfig { max_num: 20, max_den: 7 };
    loop {
        let x = random_rational(rng, &cfg);
        if !x.is_zero() && !avoid.contains(&x) {
            return x;
        }
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn criterion_1() -> Verdict {
    let t = Instant::now();
    let args: Vec<String> = ["components", "--n", "5", "--flavor", "all", "--json"].iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    let code = run_with(&args, &mut out, &mut Vec::new());
    let elapsed = t.elapsed();
    let v: serde_json::Value = serde_json::from_slice(&out).expect("json report");
    let got: Vec<(u64, u64)> = v["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["k"].as_u64().unwrap(), c["dim"].as_u64().unwrap()))
        .collect();
    let pass = code == 0 && got == [(1, 20), (2, 24), (3, 18)] && v["variety_dim"] == 24 && elapsed < C1_BUDGET;
    Verdict::new(pass, format!("components n=5: {got:?}, variety_dim {} ({})", v["variety_dim"], secs(elapsed)), vec![])
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut redrawn = 0;
    for n in 2..=10usize {
        for seed in 0..H_SEEDS {
            let mut r = rng(n as u64 * 100 + seed);
            // generic: off the closed set where H_n gains derivations
            let lambdas = loop {
                let mut ls = Vec::new();
                for _ in 0..n / 2 {
                    let l = nonzero_rational(&mut r, &ls);
                    ls.push(l);
                }
                if !families::h_exceptional(n, &ls) {
                    break ls;
                }
                redrawn += 1;
            };
            let h = families::h_family(n, &lambdas).unwrap();
            let der = h.derivation_dim();
            let comp = (n + 1) * (n + 1) - der + n / 2;
            checked += 1;
            if der != 3 * n / 2 + 1 || comp != n * (n + 1) {
                bad.push(format!("n={n} seed={seed}: dim Der {der}, component {comp}"));
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = bad.is_empty() && elapsed < C2_BUDGET;
    let summary = format!("{checked} H instances, {} mismatches, {redrawn} exceptional draws redrawn ({})", bad.len(), secs(elapsed));
    Verdict::new(pass, summary, bad)
}

fn criterion_3() -> Verdict {
    let t = Instant::now();
    let c = catalog();
    let mut records = Vec::new();
    let mut runs = 0;
    let mut fails = 0;
    for w in c.witnesses() {
        for values in c.sample_parameters(w, WITNESS_SAMPLES, SEED) {
            let r = verify_witness(w, &values, c);
            runs += 1;
            if !r.passed() {
                fails += 1;
                records.push(format!("{} {values:?}: {}", w.label, r.failure().map(|f| f.detail.clone()).unwrap_or_default()));
            }
        }
    }
    let elapsed = t.elapsed();
    let pass = c.witnesses().len() == 21 && fails == 0 && elapsed < C3_BUDGET;
    Verdict::new(pass, format!("{} witnesses, {runs} runs, {fails} failures ({})", c.witnesses().len(), secs(elapsed)), records)
}

fn criterion_4() -> Verdict {
    let c = catalog();
    let none = BTreeMap::new();
    let mut records = Vec::new();
    let mut pass = true;
    for name in ["mu14_5", "mu11", "mu15", "mu17", "mu18", "mu20"] {
        let d = c.get(name, &none).unwrap().derivation_dim();
        pass &= d == 5;
        records.push(format!("{name}: dim Der {d} (expected 5, orbit {})", 25 - d));
    }
    for (tag, b) in [("+i", Q::i()), ("-i", -Q::i())] {
        let d = c.get("mu21", &[("branch".to_string(), b)].into()).unwrap().derivation_dim();
        pass &= d == 6;
        records.push(format!("mu21^{tag}: dim Der {d} (expected 6, orbit {})", 25 - d));
    }
    // (name, component dimension, independent parameters, sampler)
    type Sampler = Box<dyn Fn(&mut ChaCha8Rng) -> Algebra>;
    let generic: Vec<(&str, usize, usize, Sampler)> = vec![
        ("lambda6", 20, 1, Box::new(|r| c.get("lambda6", &[("a".into(), nonzero_rational(r, &[Q::one()]))].into()).unwrap())),
        ("mu22", 20, 1, Box::new(|r| c.get("mu22", &[("a".into(), nonzero_rational(r, &[Q::one()]))].into()).unwrap())),
        ("V_{2+3}", 18, 1, Box::new(|r| families::a133(&nonzero_rational(r, &[])))),
        (
            "V_{3+2}",
            24,
            6,
            Box::new(|r| {
                let l = nonzero_rational(r, &[]);
                let mu: [Q; 7] = std::array::from_fn(|_| nonzero_rational(r, &[]));
                families::v32(&l, &mu)
            }),
        ),
        (
            "V_{4+1}",
            20,
            2,
            Box::new(|r| {
                let l1 = nonzero_rational(r, &[]);
                let l2 = nonzero_rational(r, &[l1.clone(), -&l1]);
                families::h_family(4, &[l1, l2]).unwrap()
            }),
        ),
    ];
    for (name, comp, params, sample) in &generic {
        let mut r = rng(name.len() as u64);
        let dims: Vec<usize> = (0..PARAM_POINTS).map(|_| sample(&mut r).derivation_dim()).collect();
        let expected = 25 + params - comp;
        let ok = dims.iter().all(|&d| d == expected);
        pass &= ok;
        records.push(format!(
            "{name}: dim Der at {PARAM_POINTS} points {dims:?}; component {comp} = 25 - dim Der + {params} needs {expected}: {}",
            if ok { "consistent" } else { "INCONSISTENT" }
        ));
    }
    records.push("lambda6, mu22: orbit 19 for generic a, so \"20\" is orbit + 1 parameter".to_string());
    Verdict::new(pass, "derivation dimensions of the generic algebras", records)
}

const SEPARATED_SETS: [&str; 8] = ["r_mu14_5", "r_lambda6", "r_mu11", "r_mu15", "r_mu17", "r_mu18", "r_mu20", "r_mu22"];

fn outsiders() -> Vec<(String, Algebra)> {
    let c = catalog();
    let mut v = vec![
        ("mu21^+i".to_string(), c.get("mu21", &[("branch".to_string(), Q::i())].into()).unwrap()),
        ("mu21^-i".to_string(), c.get("mu21", &[("branch".to_string(), -Q::i())].into()).unwrap()),
    ];
    let mut r = rng(5);
    let mut seen = Vec::new();
    for _ in 0..SEPARATION_LAMBDAS {
        let l = nonzero_rational(&mut r, &seen);
        seen.push(l.clone());
        v.push((format!("V_{{2+3}}(l={l})"), families::a133(&l)));
    }
    v
}

fn fmt_basis(o: &SearchOutcome) -> String {
    match o {
        SearchOutcome::Found { trial, basis } => format!("found at trial {trial}: {basis}"),
        SearchOutcome::NotFound { trials } => format!("none in {trials} trials"),
    }
}

fn criterion_5() -> Verdict {
    let c = catalog();
    let cfg = SearchConfig::default();
    let mut records = Vec::new();
    let mut pass = true;

    for base in c.condition_bases() {
        let e = c.effective_condition_set(base).unwrap();
        let ok = eval_conditions(&c.namesake(e, None), &e.set).unwrap().satisfied;
        pass &= ok;
        records.push(format!("namesake {} under {} ({}): {}", e.namesake, e.set.label, e.set.mode, if ok { "satisfied" } else { "NOT satisfied" }));
    }

    let algs = outsiders();
    for base in SEPARATED_SETS {
        let e = c.effective_condition_set(base).unwrap();
        let cs = e.set.without_rebase();
        let mut printed_hits = Vec::new();
        let mut found = Vec::new();
        for (name, a) in &algs {
            if eval_conditions(a, &cs).unwrap().satisfied {
                printed_hits.push(name.clone());
            }
            let o = search_basis(a, &cs, SEARCH_TRIALS, SEED, &cfg);
            if o.is_found() {
                found.push(format!("{name} {}", fmt_basis(&o)));
            }
        }
        pass &= printed_hits.is_empty() && found.is_empty();
        records.push(format!(
            "{}: printed bases satisfying {:?}; search ({SEARCH_TRIALS} trials) {}",
            e.set.label,
            printed_hits,
            if found.is_empty() { "found nothing".to_string() } else { format!("FOUND {} bases", found.len()) }
        ));
        for f in found.iter().take(2) {
            records.push(format!("  {f}"));
        }
    }

    // Literal versus corrected exponents, and the amended sets, as records.
    let a133 = families::a133(&q(2, 1));
    for entry in c.condition_entries() {
        if entry.variant == Variant::Printed && !c.condition_entries().iter().any(|x| x.base == entry.base && x.variant != Variant::Printed) {
            continue;
        }
        let namesake = eval_conditions(&c.namesake(entry, None), &entry.set).unwrap().satisfied;
        let o = search_basis(&a133, &entry.set.without_rebase(), READING_TRIALS, SEED, &cfg);
        records.push(format!(
            "reading {:<22} namesake {:<13} V_{{2+3}}(l=2) basis search: {}",
            entry.set.label,
            if namesake { "satisfies" } else { "fails" },
            if o.is_found() { "found" } else { "none" }
        ));
    }
    // The last step of the argument: mu21^{+-i} do not degenerate to V_{2+3}.
    for base in ["r_mu21_mi", "r_mu21_i"] {
        let e = c.effective_condition_set(base).unwrap();
        let o = search_basis(&a133, &e.set.without_rebase(), READING_TRIALS, SEED, &cfg);
        records.push(format!("{} on V_{{2+3}}(l=2): {}", e.set.label, fmt_basis(&o)));
    }
    Verdict::new(pass, "condition-set ledger (namesakes, printed bases, basis search)", records)
}

fn criterion_6() -> Verdict {
    let c = catalog();
    let mut records = Vec::new();
    let mut checked = 0;
    for w in c.witnesses() {
        for values in c.sample_parameters(w, 2, SEED) {
            let b = w.bind(&values).unwrap();
            if !verify_bound_witness(&b, c).passed() {
                continue;
            }
            let t = c.template(&b.source).unwrap();
            let target = c.get(&b.target, &b.target_args).unwrap();
            for s in battery_points(&b.basis.point) {
                let env: BTreeMap<String, Q> = b.source_args.iter().map(|(k, v)| (k.clone(), v.eval_at(&s).unwrap())).collect();
                let source = t.instantiate_concrete(&env).unwrap();
                let r = necessary_battery(&source, &target);
                checked += 1;
                if r.refuted {
                    records.push(format!("{} at s = {s}: {:?}", w.label, r.verdicts));
                }
            }
        }
    }
    Verdict::new(records.is_empty(), format!("{checked} (source at s, target) pairs, {} violations", records.len()), records)
}

fn criterion_7() -> Verdict {
    let mut records = Vec::new();
    for seed in 0..PARITY_SAMPLES {
        let n = if seed % 2 == 0 { 4 } else { 6 };
        let a = families::sample_random(n, 1, Flavor::Anticommutative, SEED + seed).unwrap();
        let ann = a.annihilator().dim();
        if ann < 2 || a.in_unk(1) {
            records.push(format!("n={n} seed={seed}: dim ann {ann}, in U(n,1) {}", a.in_unk(1)));
        }
    }
    Verdict::new(records.is_empty(), format!("{PARITY_SAMPLES} anticommutative samples, {} violations", records.len()), records)
}

fn catalog_instances(r: &mut ChaCha8Rng) -> Vec<Algebra> {
    let c = catalog();
    c.algebra_names()
        .map(|name| {
            let t = c.template(name).unwrap();
            let env: BTreeMap<String, Q> = if name == "mu21" {
                [("branch".to_string(), if r.gen_bool(0.5) { Q::i() } else { -Q::i() })].into()
            } else {
                t.params.iter().map(|p| (p.clone(), nonzero_rational(r, &[Q::one()]))).collect()
            };
            c.get(name, &env).unwrap()
        })
        .collect()
}

fn criterion_8() -> Verdict {
    let c = catalog();
    let cfg = SearchConfig::default();
    let mut records = Vec::new();
    let mut r = rng(8);

    let mut fp_bad = 0;
    let mut rt_bad = 0;
    let algs = catalog_instances(&mut r);
    for a in &algs {
        let f = a.fingerprint();
        for trial in 0..FINGERPRINT_BASES {
            let p = candidate(a.dim(), SEED, trial, &cfg);
            let b = a.change_basis(&p).unwrap();
            if b.fingerprint() != f {
                fp_bad += 1;
            }
            if !b.change_basis(&p.inverse().unwrap()).unwrap().same_table(a) {
                rt_bad += 1;
            }
        }
    }
    records.push(format!("fingerprint invariance: {} algebras x {FINGERPRINT_BASES} bases, {fp_bad} mismatches", algs.len()));
    records.push(format!("change_basis round trip: {rt_bad} mismatches"));

    let mut zero_bad = Vec::new();
    for name in c.algebra_names() {
        let w = c.scale_to_zero(name).unwrap();
        for values in c.sample_parameters(&w, 1, SEED) {
            if !verify_bound_witness(&w.bind(&values).unwrap(), c).passed() {
                zero_bad.push(name.to_string());
            }
        }
    }
    records.push(format!("scale-to-zero witnesses: {} algebras, failures {zero_bad:?}", c.algebra_names().count()));

    let mut texts = Vec::new();
    let mut rt_text_bad = Vec::new();
    for name in c.algebra_names() {
        let text = c.show(name).unwrap();
        if parse_algebra(&text).map(|t| t.to_dsl()) != Ok(text.clone()) {
            rt_text_bad.push(name.to_string());
        }
        texts.push((0, text));
    }
    for w in c.witnesses() {
        let text = write_witness(w);
        if parse_witness(&text).as_ref() != Ok(w) {
            rt_text_bad.push(w.label.clone());
        }
        texts.push((1, text));
    }
    for e in c.condition_entries() {
        let text = write_conditions(&e.set);
        if parse_conditions(&text).as_ref() != Ok(&e.set) {
            rt_text_bad.push(e.set.label.clone());
        }
        texts.push((2, text));
    }
    records.push(format!("parser round trips: {} texts, failures {rt_text_bad:?}", texts.len()));

    let mut spanless = 0;
    let hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    for i in 0..FUZZ_MUTATIONS {
        let (kind, text) = &texts[r.gen_range(0..texts.len())];
        let tokens: Vec<&str> = text.split_inclusive(|ch: char| ch.is_whitespace() || "(),=*+-/^".contains(ch)).collect();
        let drop = r.gen_range(0..tokens.len());
        let mutated: String = tokens.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, t)| *t).collect();
        let res = std::panic::catch_unwind(|| match kind {
            0 => parse_algebra(&mutated).err(),
            1 => parse_witness(&mutated).err(),
            _ => parse_conditions(&mutated).err(),
        });
        match res {
            Ok(Some(e)) if e.span.line == 0 || e.span.col_start == 0 => spanless += 1,
            Ok(_) => {}
            Err(_) => records.push(format!("parser panicked on mutation {i}:\n{mutated}")),
        }
    }
    std::panic::set_hook(hook);
    let panics = records.iter().filter(|r| r.starts_with("parser panicked")).count();
    records.push(format!("fuzz: {FUZZ_MUTATIONS} token deletions, {panics} panics, {spanless} errors without a position"));

    let pass = fp_bad == 0 && rt_bad == 0 && zero_bad.is_empty() && rt_text_bad.is_empty() && panics == 0 && spanless == 0;
    Verdict::new(pass, "property suites", records)
}

fn main() {
    // `cargo test -- <filter>` passes arguments; this target has no sub-tests to filter.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let criteria: [Criterion; 8] = [
        ("component count and dimensions, n = 5", criterion_1),
        ("H family derivation dimension", criterion_2),
        ("degeneration ledger", criterion_3),
        ("derivation dimensions", criterion_4),
        ("condition-set ledger", criterion_5),
        ("necessary-condition consistency", criterion_6),
        ("parity of anticommutative samples", criterion_7),
        ("property suites", criterion_8),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = f();
        let mark = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {mark}  {title}: {} [{}]", i + 1, v.summary, secs(t.elapsed()));
        for r in &v.records {
            println!("    {r}");
        }
        if !v.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
