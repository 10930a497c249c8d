//! Scenario and model documents (TOML) and their expansion into instances.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use approxinv::graph::generators::{complete_ary_tree, cycle, parallel_cycle, path, random_tree, star};
use approxinv::{ModelInstance, ModelKind, Multigraph, Pinning, Tolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::CliError;

/// Every check id the runner understands.
pub const CHECKS: &[&str] = &[
    "tree-identity",
    "certificate",
    "girth-bound",
    "decay",
    "k-transform",
    "chain-gap",
    "tensorization",
    "beta-sums",
    "cycle-limits",
    "parallel-cycle",
    "rayleigh-scan",
    "scalar-scan",
];

pub const FAMILIES: &[&str] = &["path", "cycle", "star", "complete-ary-tree", "random-tree", "parallel-cycle"];

/// A graph source: a file in the `n m` / `u v` text format, or a generator
/// family. `n` is the vertex count for every family except
/// `complete-ary-tree`, which takes arity `d` and height `h`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub file: Option<PathBuf>,
    pub family: Option<String>,
    pub n: Option<usize>,
    /// Several values of the size parameter (`n`, or `h` for complete trees).
    pub sizes: Option<Vec<usize>>,
    pub d: Option<usize>,
    pub h: Option<usize>,
    pub k: Option<usize>,
    /// Random trees drawn per size.
    pub count: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: String,
    pub lambda: Option<f64>,
    pub lambdas: Option<Vec<f64>>,
    /// Per-element fugacities; only for a single graph.
    pub fugacity: Option<Vec<f64>>,
    #[serde(default)]
    pub occupied: Vec<usize>,
    #[serde(default)]
    pub unoccupied: Vec<usize>,
}

/// Parameters of the standalone checks and of hypotheses the instance
/// checks need. Every field has a default.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Params {
    /// δ for beta-sums and the hardcore 36/δ² bound.
    pub delta: Option<f64>,
    /// Blow-up factor for k-transform.
    pub k: usize,
    /// Random test functions per tensorization instance.
    pub trials: usize,
    pub cycle_n: usize,
    pub cycle_lambdas: Vec<f64>,
    pub max_ell: usize,
    pub limit_tol: f64,
    pub parallel_n: usize,
    pub degrees: Vec<usize>,
    pub rayleigh_lambda: f64,
    pub rayleigh_arity: usize,
    pub max_height: usize,
    /// "plain" or "fixed-point" leaves for the Rayleigh scan.
    pub boundary: String,
    pub deltas: Vec<f64>,
    pub x_points: usize,
    pub d_max: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            delta: None,
            k: 2,
            trials: 1000,
            cycle_n: 80,
            cycle_lambdas: vec![1.0, 4.0],
            max_ell: 4,
            limit_tol: 1e-6,
            parallel_n: 40,
            degrees: vec![4, 8, 16],
            rayleigh_lambda: 30.0,
            rayleigh_arity: 3,
            max_height: 12,
            boundary: "plain".into(),
            deltas: vec![0.03, 0.09],
            x_points: 10_000,
            d_max: 200,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub checks: Vec<String>,
    pub model: Option<ModelSpec>,
    pub graphs: Option<GraphSpec>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub params: Params,
    /// Directory that relative graph files resolve against.
    #[serde(skip)]
    pub base: PathBuf,
}

/// A single model: the `matrix` and `chain` subcommands read this.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(flatten)]
    pub model: ModelSpec,
    pub graph: GraphSpec,
}

/// Comparison tolerances: the linear-algebra set plus `identity`, the bound
/// on entrywise deviations from exact identities.
#[derive(Clone, Copy, Debug)]
pub struct Tols {
    pub linalg: Tolerances,
    pub identity: f64,
}

impl Default for Tols {
    fn default() -> Self {
        Tols { linalg: Tolerances::default(), identity: 1e-8 }
    }
}

impl Tols {
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        if name == "identity" {
            self.identity = value;
            return Ok(());
        }
        if self.linalg.set(name, value) {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "unknown tolerance {name:?} (expected identity, symmetry, convergence, slack or pivot)"
            )))
        }
    }

    /// Parse `name=value`.
    pub fn apply(&mut self, assignment: &str) -> Result<(), CliError> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--tol expects name=value, got {assignment:?}")))?;
        let value: f64 =
            value.trim().parse().map_err(|_| CliError::Usage(format!("tolerance {name} is not a number: {value:?}")))?;
        self.set(name.trim(), value)
    }
}

fn toml_error(what: &str, text: &str, e: toml::de::Error) -> CliError {
    let line = e.span().map(|s| text[..s.start].lines().count().max(1));
    let at = line.map_or(String::new(), |l| format!(" at line {l}"));
    CliError::Usage(format!("{what}{at}: {}", e.message()))
}

pub fn parse_scenario(text: &str, base: &Path) -> Result<Scenario, CliError> {
    let mut s: Scenario = toml::from_str(text).map_err(|e| toml_error("scenario", text, e))?;
    s.base = base.to_path_buf();
    for c in &s.checks {
        if !CHECKS.contains(&c.as_str()) {
            return Err(CliError::Usage(format!("unknown check {c:?}; known: {}", CHECKS.join(", "))));
        }
    }
    if s.params.boundary != "plain" && s.params.boundary != "fixed-point" {
        return Err(CliError::Usage(format!("params.boundary must be plain or fixed-point, got {:?}", s.params.boundary)));
    }
    Ok(s)
}

pub fn parse_model_file(text: &str, base: &Path) -> Result<ModelInstance, CliError> {
    let f: ModelFile = toml::from_str(text).map_err(|e| toml_error("model", text, e))?;
    let graphs = expand_graphs(&f.graph, base, 0)?;
    let [(_, g)] = <[_; 1]>::try_from(graphs)
        .map_err(|v: Vec<_>| CliError::Usage(format!("a model file needs exactly one graph, got {}", v.len())))?;
    let lambdas = lambdas(&f.model)?;
    if lambdas.len() != 1 && f.model.fugacity.is_none() {
        return Err(CliError::Usage("a model file takes a single lambda".into()));
    }
    build_model(&f.model, g, lambdas[0])
}

pub fn kind(spec: &ModelSpec) -> Result<ModelKind, CliError> {
    ModelKind::parse(&spec.kind)
        .ok_or_else(|| CliError::Usage(format!("unknown model kind {:?} (monomer-dimer or hardcore)", spec.kind)))
}

/// The fugacity sweep; `fugacity` counts as one entry carrying its maximum.
pub fn lambdas(spec: &ModelSpec) -> Result<Vec<f64>, CliError> {
    let given = [spec.lambda.is_some(), spec.lambdas.is_some(), spec.fugacity.is_some()];
    if given.iter().filter(|&&b| b).count() != 1 {
        return Err(CliError::Usage("give exactly one of lambda, lambdas, fugacity".into()));
    }
    let v = match (&spec.lambda, &spec.lambdas, &spec.fugacity) {
        (Some(l), _, _) => vec![*l],
        (_, Some(ls), _) => ls.clone(),
        (_, _, Some(f)) => vec![f.iter().copied().fold(0.0, f64::max)],
        _ => unreachable!(),
    };
    if v.is_empty() {
        return Err(CliError::Usage("lambdas is empty".into()));
    }
    Ok(v)
}

pub fn build_model(spec: &ModelSpec, g: Multigraph, lambda: f64) -> Result<ModelInstance, CliError> {
    let kind = kind(spec)?;
    let m = match &spec.fugacity {
        Some(f) => ModelInstance::new(kind, g, f.clone()),
        None => ModelInstance::uniform(kind, g, lambda),
    }
    .map_err(|e| CliError::Usage(format!("model: {e}")))?;
    if spec.occupied.is_empty() && spec.unoccupied.is_empty() {
        return Ok(m);
    }
    let pinning = Pinning {
        occupied: spec.occupied.iter().copied().collect(),
        unoccupied: spec.unoccupied.iter().copied().collect(),
    };
    m.with_pinning(pinning).map_err(|e| CliError::Usage(format!("pinning: {e}")))
}

fn need(v: Option<usize>, what: &str, family: &str) -> Result<usize, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("family {family} needs {what}")))
}

/// One graph of a family with its size parameter set to `size`.
pub fn generate(family: &str, spec: &GraphSpec, size: Option<usize>, rng: &mut ChaCha8Rng) -> Result<Multigraph, CliError> {
    let param = |e: approxinv::Error| CliError::Usage(format!("{family}: {e}"));
    let n = || need(size.or(spec.n), "n", family);
    Ok(match family {
        "path" => path(n()?),
        "cycle" => cycle(n()?).map_err(param)?,
        "star" => star(n()?.checked_sub(1).ok_or_else(|| CliError::Usage("star needs n ≥ 1".into()))?),
        "random-tree" => random_tree(n()?, rng),
        "parallel-cycle" => parallel_cycle(n()?, need(spec.k, "k", family)?).map_err(param)?,
        "complete-ary-tree" => complete_ary_tree(need(spec.d, "d", family)?, need(size.or(spec.h), "h", family)?),
        _ => return Err(CliError::Usage(format!("unknown family {family:?}; known: {}", FAMILIES.join(", ")))),
    })
}

/// Labelled graphs of a spec, in a deterministic order.
pub fn expand_graphs(spec: &GraphSpec, base: &Path, seed: u64) -> Result<Vec<(String, Multigraph)>, CliError> {
    match (&spec.file, &spec.family) {
        (Some(file), None) => {
            let path = base.join(file);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
            let g = Multigraph::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            Ok(vec![(file.display().to_string(), g)])
        }
        (None, Some(family)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sizes: Vec<Option<usize>> = match &spec.sizes {
                Some(s) => s.iter().map(|&v| Some(v)).collect(),
                None => vec![None],
            };
            let copies = if family == "random-tree" { spec.count.unwrap_or(1) } else { 1 };
            let mut out = Vec::new();
            for size in sizes {
                for c in 0..copies {
                    let g = generate(family, spec, size, &mut rng)?;
                    let mut label = family.clone();
                    match family.as_str() {
                        "complete-ary-tree" => label += &format!(" d={} h={}", spec.d.unwrap_or(0), size.or(spec.h).unwrap_or(0)),
                        _ => label += &format!(" n={}", g.n()),
                    }
                    if let Some(k) = spec.k.filter(|_| family == "parallel-cycle") {
                        label += &format!(" k={k}");
                    }
                    if copies > 1 {
                        label += &format!(" #{c}");
                    }
                    out.push((label, g));
                }
            }
            Ok(out)
        }
        _ => Err(CliError::Usage("a graph spec needs exactly one of file, family".into())),
    }
}
