use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_approxinv"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// A fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("approxinv-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn without_runtime(s: &str) -> String {
    s.lines().filter(|l| !l.starts_with("runtime_s=")).collect::<Vec<_>>().join("\n")
}

#[test]
fn bundled_matching_trees_pass_and_are_reproducible() {
    let dir = scratch("matching");
    let (a, b) = (dir.join("a.txt"), dir.join("b.txt"));
    for p in [&a, &b] {
        let o = run(&["run", "matching-trees", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (a, b) = (std::fs::read_to_string(a).unwrap(), std::fs::read_to_string(b).unwrap());
    assert_eq!(without_runtime(&a), without_runtime(&b));
    assert!(a.lines().filter(|l| l.contains(" check=")).all(|l| l.contains("verdict=pass")));
    assert!(a.contains("claim=\"λmax(Ψ) ≤ 2λ+1\""));
}

#[test]
fn bundled_hardcore_scenario_passes() {
    for name in ["hardcore-trees-δ0.1", "hardcore-trees-delta0.1"] {
        let o = run(&["run", name]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert!(text.contains("λmax(Ψ) ≤ 36/δ²") && text.contains("Σ β_v² ≤ 1 − δ/3"));
        assert!(text.contains("fail=0"));
    }
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    let empty = dir.join("empty.toml");
    std::fs::write(&empty, "name = \"empty\"\nchecks = []\n").unwrap();
    let o = run(&["run", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("records=0"));

    // Plain complete trees in the non-uniqueness regime: the Rayleigh bound
    // oscillates with the parity of the height.
    let failing = dir.join("rayleigh.toml");
    std::fs::write(&failing, "name = \"r\"\nchecks = [\"rayleigh-scan\"]\n[params]\nmax_height = 6\n").unwrap();
    assert_eq!(run(&["run", failing.to_str().unwrap()]).status.code(), Some(1));

    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "name = \"b\"\nchecks = [\"nonsense\"]\n").unwrap();
    assert_eq!(run(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "name = \"b\"\n\nseed = [\n").unwrap();
    let o = run(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    assert_eq!(run(&["run", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(run(&["run", empty.to_str().unwrap(), "--tol", "bogus=1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn generate_families() {
    let o = run(&["generate", "cycle", "n=5"]);
    assert!(stdout(&o).starts_with("5 5\n"));
    let o = run(&["generate", "parallel-cycle", "n=6", "k=3"]);
    assert!(stdout(&o).starts_with("6 18\n"));
    let a = stdout(&run(&["generate", "random-tree", "n=10", "--seed", "7"]));
    let b = stdout(&run(&["generate", "random-tree", "n=10", "--seed", "7"]));
    assert_eq!(a, b);
    assert!(a.starts_with("10 9\n"));
    assert_eq!(stdout(&run(&["generate", "complete-ary-tree", "d=3", "h=2"])).lines().next(), Some("13 12"));
    assert_eq!(run(&["generate", "cycle"]).status.code(), Some(2));
    assert_eq!(run(&["generate", "cycle", "n=2"]).status.code(), Some(2));
}

#[test]
fn matrices_and_chains() {
    let dir = scratch("matrix");
    std::fs::write(dir.join("edge.txt"), "2 1\n0 1\n").unwrap();
    let hc = dir.join("hc.toml");
    std::fs::write(&hc, "kind = \"hardcore\"\nlambda = 1.0\n[graph]\nfile = \"edge.txt\"\n").unwrap();
    let o = run(&["matrix", hc.to_str().unwrap(), "psi"]);
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').skip(1).map(|x| x.parse().unwrap()).collect()).collect();
    assert!(text.starts_with("element,0,1\n"));
    for (row, want) in rows.iter().zip([[1.0, -0.5], [-0.5, 1.0]]) {
        assert!(row.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12), "{text}");
    }

    let md = dir.join("md.toml");
    std::fs::write(&md, "kind = \"monomer-dimer\"\nlambda = 1.0\n[graph]\nfile = \"edge.txt\"\n").unwrap();
    assert!(stdout(&run(&["chain", md.to_str().unwrap(), "gap"])).contains("gap=1e0"));
    let csv = dir.join("chain.csv");
    let o = run(&["chain", md.to_str().unwrap(), "mix", "--out", csv.to_str().unwrap()]);
    assert!(stdout(&o).contains("mixing_time=1"));
    assert!(std::fs::read_to_string(csv).unwrap().starts_with("state,elements,pi\n"));

    let c5 = dir.join("c5.toml");
    std::fs::write(&c5, "kind = \"monomer-dimer\"\nlambda = 1.0\n[graph]\nfamily = \"cycle\"\nn = 5\n").unwrap();
    for which in ["cor", "sym", "q", "w"] {
        assert_eq!(run(&["matrix", c5.to_str().unwrap(), which]).status.code(), Some(0));
    }
    // A cap below the support size is a model error, not a usage error.
    assert_eq!(run(&["chain", c5.to_str().unwrap(), "gap", "--cap", "3"]).status.code(), Some(1));
}
