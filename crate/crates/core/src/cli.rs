//! The `nilgeo` command line. Every subcommand renders either text or a JSON
//! report; exit codes are 0 for success, 1 for a failed or refuted check and 2
//! for usage and parse errors.

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{Algebra, InvariantFingerprint, ProductMode};
use crate::catalog::{catalog, CatalogEntry, CatalogError};
use crate::conditions::{eval_conditions, search_basis, ConditionSet, FailingClause, SearchConfig, SearchOutcome};
use crate::degeneration::{necessary_battery, verify_witness, BatteryReport, DegenerationWitness, VerificationReport};
use crate::dsl::{self, DslError, GRAMMAR_HELP};
use crate::families::{self, Flavor};
use crate::scalars::GaussianRational as Q;

const REF_HELP: &str = "\
references:
  <alg>      catalog:NAME[?p=v,...]  or a path to an algebra file
  <witness>  catalog:NAME[?p=v,...]  or a path to a witness file
  <cond>     catalog:NAME            or a path to a condition file
  parameter values are scalars such as 3, -1/2, i, +i, 1-2*i";

#[derive(Parser, Debug)]
#[command(name = "nilgeo", version, about = "Exact computations on varieties of nilpotent algebras", after_help = REF_HELP)]
pub struct Cli {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true, value_name = "W")]
    pub parallel: Option<usize>,
    /// Override the product mode of condition sets.
    #[arg(long, global = true, value_name = "MODE")]
    pub mode: Option<ProductMode>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Invariant fingerprint of an algebra.
    Info { alg: String },
    /// Dimension of the derivation algebra.
    Der { alg: String },
    /// Verify one degeneration witness.
    VerifyDeg {
        witness: String,
        /// Parameter samples for witnesses with free parameters left unbound.
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify every catalog witness.
    VerifyLedger {
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Basis-independent necessary conditions for A -> B.
    Necessary { a: String, b: String },
    /// Evaluate a condition set on an algebra (after the set's rebasing).
    CheckCond { alg: String, cond: String },
    /// Randomized search for a basis satisfying a condition set.
    SearchBasis {
        alg: String,
        cond: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Irreducible components of the 2-step nilpotent variety.
    Components {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "all")]
        flavor: Flavor,
    },
    /// Browse the built-in catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// A random member of the component with parameters n, k.
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "all")]
        flavor: Flavor,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List,
    Show { name: String },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(#[from] DslError),
    #[error("{0}")]
    Catalog(#[from] CatalogError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// What a subcommand produced: the report and whether its check passed.
pub struct Outcome {
    pub json: serde_json::Value,
    pub text: String,
    pub ok: bool,
}

fn outcome<T: Serialize>(report: &T, text: String, ok: bool) -> Outcome {
    Outcome { json: serde_json::to_value(report).expect("reports serialize"), text, ok }
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_string(), source })
}

fn split_ref(r: &str) -> (&str, &str) {
    r.split_once('?').unwrap_or((r, ""))
}

/// `p=v,q=w` with scalar values; a leading `+` is allowed.
pub fn parse_params(query: &str) -> Result<BTreeMap<String, Q>, CliError> {
    let mut out = BTreeMap::new();
    for kv in query.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected `name=value`, found `{kv}`")))?;
        let v = v.trim();
        let v = v.strip_prefix('+').unwrap_or(v);
        let e = dsl::parse_expr(v, 1)?;
        out.insert(k.trim().to_string(), dsl::eval_scalar(&e)?);
    }
    Ok(out)
}

pub fn resolve_algebra(r: &str) -> Result<Algebra<Q>, CliError> {
    let (head, query) = split_ref(r);
    let params = parse_params(query)?;
    if let Some(name) = head.strip_prefix("catalog:") {
        return Ok(catalog().get(name, &params)?);
    }
    let t = dsl::parse_algebra(&read(head)?).map_err(|e| e.with_file(head))?;
    if let Some(p) = t.params.iter().find(|p| !params.contains_key(*p)) {
        return Err(CliError::Usage(format!("{head}: parameter `{p}` needs a value (use {head}?{p}=...)")));
    }
    Ok(t.instantiate_concrete(&params)?)
}

pub fn resolve_witness(r: &str) -> Result<(DegenerationWitness, BTreeMap<String, Q>), CliError> {
    let (head, query) = split_ref(r);
    let params = parse_params(query)?;
    let w = match head.strip_prefix("catalog:") {
        Some(name) => match catalog().witness(name) {
            Some(w) => w.clone(),
            None if name.ends_with("__zero") => catalog().scale_to_zero(name.trim_end_matches("__zero"))?,
            None => return Err(CatalogError::UnknownName(name.to_string()).into()),
        },
        None => dsl::parse_witness(&read(head)?).map_err(|e| e.with_file(head))?,
    };
    Ok((w, params))
}

pub fn resolve_conditions(r: &str) -> Result<ConditionSet, CliError> {
    match r.strip_prefix("catalog:") {
        Some(name) => Ok(catalog()
            .condition_entry(name)
            .ok_or_else(|| CatalogError::UnknownName(name.to_string()))?
            .set
            .clone()),
        None => Ok(dsl::parse_conditions(&read(r)?).map_err(|e| e.with_file(r))?),
    }
}

fn label(a: &Algebra<Q>, r: &str) -> String {
    a.label.clone().unwrap_or_else(|| r.to_string())
}

#[derive(Serialize)]
struct InfoReport {
    command: String,
    algebra: String,
    #[serde(flatten)]
    fingerprint: InvariantFingerprint,
}

#[derive(Serialize)]
struct DerReport {
    command: String,
    algebra: String,
    dim_der: usize,
    orbit_dim: usize,
}

#[derive(Serialize)]
struct VerifyReport {
    command: String,
    passed: bool,
    runs: Vec<Run>,
}

#[derive(Serialize)]
struct Run {
    parameters: BTreeMap<String, String>,
    #[serde(flatten)]
    report: VerificationReport,
}

#[derive(Serialize)]
struct NecessaryReport {
    command: String,
    source: String,
    target: String,
    #[serde(flatten)]
    battery: BatteryReport,
}

#[derive(Serialize)]
struct CheckReport {
    command: String,
    algebra: String,
    conditions: String,
    mode: ProductMode,
    satisfied: bool,
    failing: Vec<FailingClause>,
}

#[derive(Serialize)]
struct SearchReport {
    command: String,
    algebra: String,
    conditions: String,
    mode: ProductMode,
    trials: usize,
    seed: u64,
    found: bool,
    trial: Option<usize>,
    basis: Option<Vec<Vec<String>>>,
}

#[derive(Serialize)]
struct ComponentRow {
    k: usize,
    dim: usize,
}

#[derive(Serialize)]
struct ComponentsReport {
    command: String,
    n: usize,
    flavor: Flavor,
    components: Vec<ComponentRow>,
    variety_dim: usize,
    /// Set only when the closed-form range and the direct scan disagree.
    #[serde(skip_serializing_if = "Option::is_none")]
    direct_scan: Option<Vec<usize>>,
}

#[derive(Serialize)]
struct ListReport {
    command: String,
    entries: Vec<CatalogEntry>,
}

#[derive(Serialize)]
struct ShowReport {
    command: String,
    name: String,
    text: String,
}

#[derive(Serialize)]
struct SampleReport {
    command: String,
    n: usize,
    k: usize,
    flavor: Flavor,
    seed: u64,
    algebra: String,
    #[serde(flatten)]
    fingerprint: InvariantFingerprint,
}

fn runs_for(w: &DegenerationWitness, given: &BTreeMap<String, Q>, samples: usize, seed: u64) -> Vec<Run> {
    let bindings = if w.free.iter().all(|p| given.contains_key(p)) {
        vec![given.clone()]
    } else {
        catalog().sample_parameters(w, samples, seed)
    };
    bindings
        .into_iter()
        .map(|values| Run {
            parameters: values.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            report: verify_witness(w, &values, catalog()),
        })
        .collect()
}

fn runs_text(runs: &[Run]) -> String {
    let mut s = String::new();
    for r in runs {
        if !r.parameters.is_empty() {
            let p: Vec<String> = r.parameters.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            s.push_str(&format!("[{}] ", p.join(", ")));
        }
        s.push_str(&r.report.to_string());
        if !s.ends_with('\n') {
            s.push('\n');
        }
    }
    s
}

/// Runs a parsed command; `echo` is the command line as typed.
pub fn execute(cli: &Cli, echo: &str) -> Result<Outcome, CliError> {
    let command = echo.to_string();
    let mode_of = |cs: &ConditionSet| cli.mode.map(|m| cs.with_mode(m)).unwrap_or_else(|| cs.clone());
    Ok(match &cli.command {
        Command::Info { alg } => {
            let a = resolve_algebra(alg)?;
            let f = a.fingerprint();
            let fl = &f.flags;
            let yes = |b: bool| if b { "yes" } else { "no" };
            let text = format!(
                "{}\n  dim {}\n  dim A^2 {}\n  dim ann {}\n  nil index {}\n  dim Der {}\n  orbit dim {}\n  \
                 associative {}, 2-step nilpotent {}, commutative {}, anticommutative {}\n",
                label(&a, alg),
                f.dim,
                f.dim_square,
                f.dim_annihilator,
                f.nil_index,
                f.dim_der,
                f.orbit_dim,
                yes(fl.associative),
                yes(fl.two_step_nilpotent),
                yes(fl.commutative),
                yes(fl.anticommutative)
            );
            outcome(&InfoReport { command, algebra: label(&a, alg), fingerprint: f }, text, true)
        }
        Command::Der { alg } => {
            let a = resolve_algebra(alg)?;
            let d = a.derivation_dim();
            let r = DerReport { command, algebra: label(&a, alg), dim_der: d, orbit_dim: a.orbit_dim() };
            outcome(&r, format!("{d}\n"), true)
        }
        Command::VerifyDeg { witness, samples, seed } => {
            let (w, given) = resolve_witness(witness)?;
            let runs = runs_for(&w, &given, *samples, *seed);
            let passed = runs.iter().all(|r| r.report.passed());
            let text = runs_text(&runs);
            outcome(&VerifyReport { command, passed, runs }, text, passed)
        }
        Command::VerifyLedger { samples, seed } => {
            let runs: Vec<Run> = catalog()
                .witnesses()
                .par_iter()
                .map(|w| runs_for(w, &BTreeMap::new(), *samples, *seed))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect();
            let passed = runs.iter().all(|r| r.report.passed());
            let ok = runs.iter().filter(|r| r.report.passed()).count();
            let text = format!("{}{ok}/{} runs passed\n", runs_text(&runs), runs.len());
            outcome(&VerifyReport { command, passed, runs }, text, passed)
        }
        Command::Necessary { a, b } => {
            let (x, y) = (resolve_algebra(a)?, resolve_algebra(b)?);
            let battery = necessary_battery(&x, &y);
            let mut text = String::new();
            for v in &battery.verdicts {
                let mark = if v.consistent { "ok" } else { "violated" };
                text.push_str(&format!("{:<16} {:>3} {:>3}  {mark}\n", v.name, v.source, v.target));
            }
            text.push_str(if battery.refuted { "refuted\n" } else { "not refuted\n" });
            let ok = !battery.refuted;
            outcome(&NecessaryReport { command, source: label(&x, a), target: label(&y, b), battery }, text, ok)
        }
        Command::CheckCond { alg, cond } => {
            let a = resolve_algebra(alg)?;
            let cs = mode_of(&resolve_conditions(cond)?);
            let r = eval_conditions(&a, &cs).map_err(|e| CliError::Usage(e.to_string()))?;
            let mut text = format!("{} under {} ({}): ", label(&a, alg), cs.label, cs.mode);
            text.push_str(if r.satisfied { "satisfied\n" } else { "not satisfied\n" });
            for f in &r.failing {
                text.push_str(&format!("  clause {}: {}\n", f.index + 1, f.clause));
            }
            let report = CheckReport {
                command,
                algebra: label(&a, alg),
                conditions: cs.label.clone(),
                mode: cs.mode,
                satisfied: r.satisfied,
                failing: r.failing,
            };
            outcome(&report, text, report.satisfied)
        }
        Command::SearchBasis { alg, cond, trials, seed } => {
            let a = resolve_algebra(alg)?;
            let cs = mode_of(&resolve_conditions(cond)?);
            eval_conditions(&a, &cs.without_rebase()).map_err(|e| CliError::Usage(e.to_string()))?;
            let res = search_basis(&a, &cs, *trials, *seed, &SearchConfig::default());
            let (found, trial, basis) = match &res {
                SearchOutcome::Found { trial, basis } => {
                    let rows = basis.row_vecs().iter().map(|r| r.iter().map(Q::to_string).collect()).collect();
                    (true, Some(*trial), Some(rows))
                }
                SearchOutcome::NotFound { .. } => (false, None, None),
            };
            let text = match &res {
                SearchOutcome::Found { trial, basis } => format!("found at trial {trial}; rows are the new basis vectors\n{basis}\n"),
                SearchOutcome::NotFound { trials } => format!("no satisfying basis in {trials} trials\n"),
            };
            let r = SearchReport {
                command,
                algebra: label(&a, alg),
                conditions: cs.label.clone(),
                mode: cs.mode,
                trials: *trials,
                seed: *seed,
                found,
                trial,
                basis,
            };
            outcome(&r, text, found)
        }
        Command::Components { n, flavor } => {
            let comps = families::components(*n, *flavor);
            let variety_dim = comps.iter().map(|c| c.dim).max().unwrap_or(0);
            let mut text = String::new();
            for c in &comps {
                text.push_str(&format!("k = {}  dim {}\n", c.k, c.dim));
            }
            text.push_str(&format!("variety dim {variety_dim}\n"));
            let range = families::component_range(*n, *flavor);
            let direct_scan = range.inconsistent.then(|| range.direct.clone());
            if let Some(ks) = &direct_scan {
                text.push_str(&format!("warning: closed form gives k in {:?}, direct scan gives {ks:?}\n", range.formula));
            }
            let components = comps.iter().map(|c| ComponentRow { k: c.k, dim: c.dim }).collect();
            let r = ComponentsReport { command, n: *n, flavor: *flavor, components, variety_dim, direct_scan };
            outcome(&r, text, true)
        }
        Command::Catalog { action: CatalogAction::List } => {
            let entries = catalog().entries();
            let mut text = String::new();
            for e in &entries {
                let kind = serde_json::to_value(e.kind).expect("serializes");
                let params = if e.params.is_empty() { String::new() } else { format!("[{}]", e.params.join(", ")) };
                text.push_str(&format!("{:<14} {:<22} {:<10} {}\n", kind.as_str().unwrap_or(""), e.name, params, e.note));
            }
            outcome(&ListReport { command, entries }, text, true)
        }
        Command::Catalog { action: CatalogAction::Show { name } } => {
            let text = catalog().show(name)?;
            outcome(&ShowReport { command, name: name.clone(), text: text.clone() }, text, true)
        }
        Command::Sample { n, k, flavor, seed } => {
            let a = families::sample_random(*n, *k, *flavor, *seed).map_err(|e| CliError::Usage(e.to_string()))?;
            let dsl_text = dsl::AlgebraTemplate::from_algebra(&format!("sample_n{n}_k{k}"), &a).to_dsl();
            let f = a.fingerprint();
            let r = SampleReport { command, n: *n, k: *k, flavor: *flavor, seed: *seed, algebra: dsl_text.clone(), fingerprint: f };
            outcome(&r, dsl_text, true)
        }
    })
}

/// Parses `args` (without the program name), runs the command and writes the
/// report to `out`; usage and parse errors go to `err`. Returns the exit code.
pub fn run_with(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("nilgeo".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = writeln!(err, "{e}\n{GRAMMAR_HELP}\n\n{REF_HELP}");
            return 2;
        }
    };
    let echo = args.join(" ");
    let result = match cli.parallel {
        Some(w) => match rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli, &echo)),
            Err(e) => Err(CliError::Usage(e.to_string())),
        },
        None => execute(&cli, &echo),
    };
    match result {
        Ok(o) => {
            if cli.json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&o.json).expect("json"));
            } else {
                let _ = write!(out, "{}", o.text);
            }
            if o.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if matches!(e, CliError::Usage(_) | CliError::Parse(_)) {
                let _ = writeln!(err, "\n{GRAMMAR_HELP}\n\n{REF_HELP}");
            }
            2
        }
    }
}

pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    run_with(&args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
