use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use approxinv::approx_inverse::q_variant;
use approxinv::dynamics::{build_chain_from, mixing_time, spectral_gap, DEFAULT_STEP_CAP};
use approxinv::gibbs::{enumerate, DEFAULT_CONFIG_CAP};
use approxinv::{ApproxInverse, Influences, LabeledMatrix, ModelInstance, Variant};
use approxinv_cli::scenario::{generate, parse_model_file, GraphSpec};
use approxinv_cli::{load_scenario, run, CliError};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "approxinv", version, about = "Influence-matrix and Glauber-dynamics verification runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override a tolerance: identity, symmetry, convergence, slack or pivot.
    #[arg(long, global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Largest support the exact enumerator may build.
    #[arg(long, global = true, default_value_t = DEFAULT_CONFIG_CAP)]
    cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a bundled scenario by name.
    Run { scenario: String },
    /// Write a graph in the `n m` / `u v` text format.
    Generate {
        family: String,
        /// n=<vertices>, k=<copies>, d=<arity>, h=<height>.
        #[arg(value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Print an influence matrix or approximate inverse as CSV.
    Matrix { model: PathBuf, which: Which },
    /// Spectral gap or mixing time of the Glauber chain.
    Chain {
        model: PathBuf,
        what: ChainQuantity,
        /// Total-variation threshold for the mixing time.
        #[arg(long, default_value_t = 0.25)]
        eps: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Psi,
    Cor,
    Sym,
    Q,
    W,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChainQuantity {
    Gap,
    Mix,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_model(path: &Path) -> Result<ModelInstance, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_model_file(&text, path.parent().unwrap_or(Path::new(".")))
}

fn csv(m: &LabeledMatrix) -> String {
    let mut s = String::from("element");
    for id in &m.index {
        write!(s, ",{id}").unwrap();
    }
    s.push('\n');
    for (a, id) in m.index.iter().enumerate() {
        write!(s, "{id}").unwrap();
        for b in 0..m.index.len() {
            write!(s, ",{:e}", m.matrix[(a, b)]).unwrap();
        }
        s.push('\n');
    }
    s
}

fn graph_params(family: &str, params: &[String]) -> Result<GraphSpec, CliError> {
    let mut spec = GraphSpec { family: Some(family.into()), ..Default::default() };
    for p in params {
        let (k, v) = p.split_once('=').ok_or_else(|| CliError::Usage(format!("expected key=value, got {p:?}")))?;
        let v: usize = v.parse().map_err(|_| CliError::Usage(format!("{k} must be a non-negative integer, got {v:?}")))?;
        match k {
            "n" => spec.n = Some(v),
            "k" => spec.k = Some(v),
            "d" => spec.d = Some(v),
            "h" => spec.h = Some(v),
            _ => return Err(CliError::Usage(format!("unknown parameter {k:?} (n, k, d, h)"))),
        }
    }
    Ok(spec)
}

/// Exit status on success: 0 when every verdict is pass or void.
fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run { scenario } => {
            let s = load_scenario(&scenario)?;
            let report = run(&s, &cli.tol, cli.seed, cli.cap)?;
            print!("{}", report.table());
            match &cli.out {
                Some(p) => std::fs::write(p, report.machine())?,
                None => print!("\n{}", report.machine()),
            }
            Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Generate { family, params } => {
            let spec = graph_params(&family, &params)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed.unwrap_or(0));
            let g = generate(&family, &spec, None, &mut rng)?;
            emit(&cli.out, &g.to_text())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Matrix { model, which } => {
            let m = load_model(&model)?;
            let inf = Influences::auto(&m, cli.cap)?;
            let matrix = match which {
                Which::Psi => LabeledMatrix::new(inf.index.clone(), inf.psi.clone()),
                Which::Cor => LabeledMatrix::new(inf.index.clone(), inf.cor.clone()),
                Which::Sym => LabeledMatrix::new(inf.index.clone(), inf.sym.clone()),
                Which::Q => ApproxInverse::from_influences(&m, &inf, q_variant(m.kind()))?.matrix,
                Which::W => ApproxInverse::from_influences(&m, &inf, Variant::W)?.matrix,
            };
            emit(&cli.out, &csv(&matrix))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Chain { model, what, eps } => {
            let m = load_model(&model)?;
            let chain = build_chain_from(&enumerate(&m, cli.cap)?);
            let line = match what {
                ChainQuantity::Gap => {
                    let gap = spectral_gap(&chain)?;
                    format!("states={} sites={} gap={gap:e} gap_times_sites={:e}\n", chain.len(), chain.sites.len(), gap * chain.sites.len() as f64)
                }
                ChainQuantity::Mix => {
                    let t = mixing_time(&chain, eps, DEFAULT_STEP_CAP)?;
                    format!("states={} eps={eps} mixing_time={t}\n", chain.len())
                }
            };
            print!("{line}");
            if let Some(p) = &cli.out {
                std::fs::write(p, chain.to_csv())?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("approxinv: {e}");
            ExitCode::from(if matches!(e, CliError::Model(_)) { 1 } else { 2 })
        }
    }
}
