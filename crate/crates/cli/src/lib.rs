//! Scenario runner behind the `approxinv` binary.

pub mod checks;
pub mod report;
pub mod scenario;

use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use checks::{is_standalone, run_instance_check, run_standalone_check, Ctx, Instance};
use report::Report;
use scenario::{build_model, expand_graphs, lambdas, parse_scenario, Scenario, Tols, CHECKS};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments or an unreadable document: exit status 2.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    /// A library error outside the scenario runner, e.g. an exceeded cap:
    /// exit status 1.
    #[error(transparent)]
    Model(#[from] approxinv::Error),
}

/// Scenarios compiled into the binary, addressable by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("matching-trees", include_str!("../scenarios/matching-trees.toml")),
    ("hardcore-trees-δ0.1", include_str!("../scenarios/hardcore-trees-delta0.1.toml")),
    ("hardcore-trees-delta0.1", include_str!("../scenarios/hardcore-trees-delta0.1.toml")),
];

/// A scenario from a file path, or a bundled one by name.
pub fn load_scenario(arg: &str) -> Result<Scenario, CliError> {
    let path = Path::new(arg);
    if path.exists() {
        let text = std::fs::read_to_string(path)?;
        return parse_scenario(&text, path.parent().unwrap_or(Path::new(".")));
    }
    let name = arg.strip_suffix(".toml").unwrap_or(arg);
    match BUNDLED.iter().find(|(n, _)| *n == name) {
        Some((_, text)) => parse_scenario(text, Path::new(".")),
        None => Err(CliError::Usage(format!(
            "no scenario file {arg:?} and no bundled scenario of that name (bundled: matching-trees, hardcore-trees-δ0.1)"
        ))),
    }
}

/// Resolve the instances of a scenario. Graphs without a model (or the
/// reverse) are a usage error.
fn instances(s: &Scenario, seed: u64) -> Result<Vec<Instance>, CliError> {
    match (&s.model, &s.graphs) {
        (None, None) => Ok(Vec::new()),
        (Some(spec), Some(graphs)) => {
            let ls = lambdas(spec)?;
            let mut out = Vec::new();
            for (label, g) in expand_graphs(graphs, &s.base, seed)? {
                for &l in &ls {
                    let m = build_model(spec, g.clone(), l)?;
                    out.push(Instance::new(format!("{} {label} λ={l}", m.kind().name()), m));
                }
            }
            Ok(out)
        }
        _ => Err(CliError::Usage("[model] and [graphs] go together".into())),
    }
}

/// Run every check of a scenario. `tol` assignments and `seed` from the
/// command line win over the document.
pub fn run(s: &Scenario, tol: &[String], seed: Option<u64>, cap: usize) -> Result<Report, CliError> {
    let start = Instant::now();
    let mut tols = Tols::default();
    for (name, &value) in &s.tolerances {
        tols.set(name, value)?;
    }
    for t in tol {
        tols.apply(t)?;
    }
    let seed = seed.unwrap_or(s.seed);
    let insts = instances(s, seed)?;
    let ctx = Ctx { tols, cap, params: &s.params };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let mut records = Vec::new();
    for check in &s.checks {
        let check: &'static str = CHECKS.iter().find(|c| **c == check).expect("validated on parse");
        if is_standalone(check) {
            records.extend(run_standalone_check(check, &ctx));
        } else {
            for inst in &insts {
                records.extend(run_instance_check(check, &ctx, inst, &mut rng));
            }
        }
    }
    Ok(Report { scenario: s.name.clone(), seed, records, runtime_s: start.elapsed().as_secs_f64() })
}
