//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or overruns its time budget.

use std::f64::consts::E;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use approxinv::approx_inverse::{
    build_q_vertex, certificate_from, lambda_max_product, lemma_girth_bound, theorem_girth_bound,
    tree_identity_deviation, ApproxInverse,
};
use approxinv::dynamics::{
    build_chain, build_chain_from, matching_tensorization_check, spectral_gap, tensorization_constant,
};
use approxinv::gibbs::{enumerate, DEFAULT_CONFIG_CAP};
use approxinv::graph::generators::{
    complete_ary_height_within, complete_ary_tree, connected_graphs, cycle_with_pendants, path, random_tree,
    random_tree_bounded, star,
};
use approxinv::influence::{decay_check, decay_profile, decay_rate, k_transform_cor_check, path_tree_influence_check};
use approxinv::recursions::{
    beta_sums_check, cycle_influence_limit_check, fixed_point_boundary, half_decay_length, hardcore_recursion, hardcore_scalar_scan,
    long_cycle_lower_bound, parallel_cycle_lower_bound, DEFAULT_PARALLEL_CAP,
};
use approxinv::approx_inverse::{rayleigh_from_betas, rayleigh_lower_bound};
use approxinv::{Influences, ModelInstance, ModelKind, Multigraph, RootedTree, Variant};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

/// Lower bound on min gap·n over the Glauber sweep, frozen from the first
/// baseline run (observed minimum 0.0431, hardcore path n = 12, λ = 5.9;
/// 1/n-fit limit 0.0216).
const GAP_FLOOR: f64 = 0.04;

const LAMBDAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];
const PATH_TREE_CAP: usize = 200_000;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The shared tree sweep: 200 seeded random trees with 2..=12 vertices.
fn tree_sweep() -> Vec<Multigraph> {
    let mut r = rng(1);
    (0..200)
        .map(|_| {
            let n = r.random_range(2..=12);
            random_tree(n, &mut r)
        })
        .collect()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn tree_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for g in tree_sweep() {
        for kind in [ModelKind::MonomerDimer, ModelKind::Hardcore] {
            for &l in &LAMBDAS {
                let m = ModelInstance::uniform(kind, g.clone(), l).map_err(err)?;
                let inf = Influences::from_model(&m, DEFAULT_CONFIG_CAP).map_err(err)?;
                worst = worst.max(tree_identity_deviation(&m, &inf).map_err(err)?);
                count += 1;
            }
        }
    }
    Ok((worst < 1e-8, format!("instances={count} max|QΨsym−I|={worst:.3e}")))
}

fn matching_trees() -> Outcome {
    let mut ok = true;
    let (mut worst_direct, mut worst_bound, mut worst_alpha, mut worst_beta) = (f64::NEG_INFINITY, f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
    for g in tree_sweep() {
        for &l in &LAMBDAS {
            let m = ModelInstance::monomer_dimer(g.clone(), l).map_err(err)?;
            let inf = Influences::from_model(&m, DEFAULT_CONFIG_CAP).map_err(err)?;
            let c = certificate_from(&m, &inf, 1e-7).map_err(err)?;
            let target = 2.0 * l + 1.0;
            let bound = c.bound.unwrap_or(f64::INFINITY);
            ok &= c.lambda_max_direct <= target + 1e-7;
            ok &= bound <= target + 1e-7;
            ok &= c.alpha >= 1.0 / target - 1e-9;
            ok &= (c.beta - 1.0).abs() <= 1e-7;
            worst_direct = worst_direct.max(c.lambda_max_direct - target);
            worst_bound = worst_bound.max(bound - target);
            worst_alpha = worst_alpha.min(c.alpha - 1.0 / target);
            worst_beta = worst_beta.max((c.beta - 1.0).abs());
        }
    }
    Ok((
        ok,
        format!(
            "max(λmax−(2λ+1))={worst_direct:.3e} max(β/α−(2λ+1))={worst_bound:.3e} min(α−1/(2λ+1))={worst_alpha:.3e} max|β−1|={worst_beta:.1e}"
        ),
    ))
}

fn hardcore_trees() -> Outcome {
    let mut ok = true;
    let mut direct_ratio: f64 = 0.0;
    let mut worst_slack = f64::INFINITY;
    for delta in [0.05, 0.1] {
        let l = (1.0 - delta) * E * E * 0.999;
        let cap = 36.0 / (delta * delta);
        for g in tree_sweep() {
            let m = ModelInstance::hardcore(g, l).map_err(err)?;
            let direct = Influences::from_model(&m, DEFAULT_CONFIG_CAP).map_err(err)?.lambda_max().map_err(err)?;
            ok &= direct <= cap;
            direct_ratio = direct_ratio.max(direct / cap);
        }
        for d in 1..=20 {
            let h = complete_ary_height_within(d, 100_000);
            let tree = RootedTree::new(&complete_ary_tree(d, h), 0).map_err(err)?;
            let state = hardcore_recursion(&tree, &vec![l; tree.n()]).map_err(err)?;
            let report = beta_sums_check(&state, l, delta).map_err(err)?;
            let slack = report.bound - report.max_sum;
            ok &= slack >= -1e-10;
            worst_slack = worst_slack.min(slack);
        }
    }
    Ok((ok, format!("max λmax/(36/δ²)={direct_ratio:.4} min β-sum slack={worst_slack:.4e}")))
}

fn girth_tradeoff() -> Outcome {
    let mut r = rng(4);
    let mut ok = true;
    let (mut theorem_slack, mut lemma_slack) = (f64::INFINITY, f64::INFINITY);
    let mut count = 0;
    for girth in [5, 7, 9, 11] {
        for &l in &[0.5, 1.0] {
            for _ in 0..5 {
                let extra = r.random_range(0..=3);
                let g = cycle_with_pendants(girth, extra, 4, &mut r).map_err(err)?;
                assert_eq!(g.girth(), Some(girth));
                let delta_max = g.max_degree();
                let m = ModelInstance::monomer_dimer(g, l).map_err(err)?;
                let inf = Influences::from_model(&m, DEFAULT_CONFIG_CAP).map_err(err)?;
                let direct = inf.lambda_max().map_err(err)?;
                let q = ApproxInverse::from_influences(&m, &inf, Variant::Edge).map_err(err)?;
                let product = lambda_max_product(&q.matrix.matrix, &inf.sym).map_err(err)?;
                let tb = theorem_girth_bound(l, delta_max, girth) - direct;
                let lb = lemma_girth_bound(l, delta_max, girth) - product;
                ok &= tb >= -1e-6 && lb >= -1e-6;
                theorem_slack = theorem_slack.min(tb);
                lemma_slack = lemma_slack.min(lb);
                count += 1;
            }
        }
    }
    Ok((ok, format!("instances={count} min theorem slack={theorem_slack:.4} min lemma slack={lemma_slack:.4}")))
}

fn path_tree_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checks = 0;
    let mut largest = 0;
    for n in 1..=6 {
        for g in connected_graphs(n) {
            for &l in &[1.0, 2.0] {
                let m = ModelInstance::monomer_dimer(g.clone(), l).map_err(err)?;
                for u in (0..g.n()).filter(|&u| g.degree(u) > 0) {
                    let rep = path_tree_influence_check(&m, u, PATH_TREE_CAP).map_err(err)?;
                    worst = worst.max(rep.max_deviation);
                    largest = largest.max(rep.path_tree_size);
                    checks += 1;
                }
            }
        }
    }
    Ok((worst < 1e-9, format!("checks={checks} largest path-tree={largest} max deviation={worst:.3e}")))
}

fn influence_decay() -> Outcome {
    let mut r = rng(6);
    let mut worst = f64::INFINITY;
    let mut count = 0;
    let mut violated_at = std::collections::BTreeSet::new();
    for _ in 0..100 {
        let n = r.random_range(2..=14);
        let g = random_tree_bounded(n, 6, &mut r).map_err(err)?;
        for &l in &[1.0, 4.0] {
            let m = ModelInstance::monomer_dimer(g.clone(), l).map_err(err)?;
            worst = worst.min(decay_check(&m).map_err(err)?);
            let delta = decay_rate(l, g.max_degree());
            for e in 0..g.m() {
                for (k, s) in decay_profile(&m, e).map_err(err)? {
                    if s > 2.0 * (1.0 - delta).powi(k as i32) + 1e-9 {
                        violated_at.insert(k);
                    }
                }
            }
            count += 1;
        }
    }
    Ok((worst >= -1e-9, format!("instances={count} min slack={worst:.4e} violating distances={violated_at:?}")))
}

/// Random connected instance with 1..=5 elements of the given model.
fn small_instance(kind: ModelKind, r: &mut ChaCha8Rng) -> Result<ModelInstance, String> {
    loop {
        let n = r.random_range(1..=6);
        let pool = connected_graphs(n);
        let g = pool.choose(r).expect("nonempty class list").clone();
        let elements = match kind {
            ModelKind::MonomerDimer => g.m(),
            ModelKind::Hardcore => g.n(),
        };
        if (1..=5).contains(&elements) {
            let l = r.random_range(0.2..5.0);
            return ModelInstance::uniform(kind, g, l).map_err(err);
        }
    }
}

fn k_transformation() -> Outcome {
    let mut r = rng(7);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut below_one = 0;
    let mut worst_union: f64 = 0.0;
    let mut accepted = 0;
    while accepted < 50 {
        let kind = if accepted % 2 == 0 { ModelKind::MonomerDimer } else { ModelKind::Hardcore };
        let m = small_instance(kind, &mut r)?;
        let mut in_scope = true;
        let mut diffs = Vec::new();
        for k in [2, 3] {
            let rep = k_transform_cor_check(&m, k, DEFAULT_CONFIG_CAP).map_err(err)?;
            worst_union = worst_union.max(rep.union_difference);
            // The invariance is stated for η = λmax(Ψcor) ≥ 1.
            if rep.original < 1.0 - 1e-12 {
                in_scope = false;
            }
            diffs.push(rep.difference);
        }
        if !in_scope {
            below_one += 1;
            continue;
        }
        for d in diffs {
            ok &= d < 1e-8;
            worst = worst.max(d);
        }
        accepted += 1;
    }
    ok &= worst_union < 1e-8;
    Ok((
        ok,
        format!(
            "instances={accepted} max|Δλmax|={worst:.3e} skipped η<1: {below_one} max|max(η,1)−ηk| over all={worst_union:.3e}"
        ),
    ))
}

fn cycle_limits() -> Outcome {
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for &l in &[1.0, 4.0] {
        for ell in 1..=4 {
            let rep = cycle_influence_limit_check(ell, l, 80).map_err(err)?;
            ok &= rep.deviation < 1e-6;
            worst = worst.max(rep.deviation);
        }
    }
    let ell = half_decay_length(4.0);
    let minor = long_cycle_lower_bound(4.0, 80, ell).map_err(err)?;
    let full = long_cycle_lower_bound(4.0, 80, 80).map_err(err)?;
    ok &= minor.value >= minor.bound && full.value >= full.bound;
    Ok((
        ok,
        format!(
            "max limit deviation={worst:.3e} λmax(minor ℓ={ell})={:.4} λmax(ℓ=n)={:.4} √λ/3={:.4}",
            minor.value, full.value, minor.bound
        ),
    ))
}

fn parallel_cycle() -> Outcome {
    let mut ok = true;
    let mut values = Vec::new();
    for delta in [4, 8, 16] {
        let rep = parallel_cycle_lower_bound(delta, 40, DEFAULT_PARALLEL_CAP).map_err(err)?;
        ok &= rep.value > rep.bound;
        if let Some(&prev) = values.last() {
            ok &= rep.value > prev;
        }
        values.push(rep.value);
    }
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    Ok((ok, format!("λmax at Δ=4,8,16: {} (bounds 0.2000,0.2828,0.4000)", shown.join(","))))
}

fn glauber_gaps() -> Outcome {
    let mut r = rng(10);
    let mut ok = true;
    let mut residual: f64 = 0.0;
    let mut per_n = Vec::new();
    let mut worst = (f64::INFINITY, String::new());
    for n in 4..=12 {
        let mut trees = vec![("path", path(n)), ("star", star(n - 1))];
        trees.push(("random", random_tree(n, &mut r)));
        let mut min_n = f64::INFINITY;
        for (name, g) in &trees {
            for (kind, lambdas) in [(ModelKind::MonomerDimer, [1.0, 5.0]), (ModelKind::Hardcore, [1.0, 5.9])] {
                for l in lambdas {
                    let m = ModelInstance::uniform(kind, g.clone(), l).map_err(err)?;
                    let c = build_chain(&m, DEFAULT_CONFIG_CAP).map_err(err)?;
                    let res = c.detailed_balance_residual().max(c.stationarity_residual());
                    residual = residual.max(res);
                    let scaled = spectral_gap(&c).map_err(err)? * n as f64;
                    min_n = min_n.min(scaled);
                    if scaled < worst.0 {
                        worst = (scaled, format!("{} {name} n={n} λ={l}", kind.name()));
                    }
                }
            }
        }
        per_n.push(min_n);
    }
    // Trend: least-squares fit of min gap·n against a + b/n; a positive
    // intercept means the sequence levels off instead of heading to 0.
    let xs: Vec<f64> = (4..=12).map(|n| 1.0 / n as f64).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 9.0, per_n.iter().sum::<f64>() / 9.0);
    let sxy: f64 = xs.iter().zip(&per_n).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let intercept = my - sxy / sxx * mx;
    ok &= residual < 1e-11;
    ok &= per_n.iter().all(|&v| v >= GAP_FLOOR);
    ok &= intercept > 0.0;
    let shown: Vec<String> = per_n.iter().map(|v| format!("{v:.4}")).collect();
    Ok((
        ok,
        format!(
            "min gap·n per n=4..12: [{}] floor={GAP_FLOOR} worst={:.4} ({}) 1/n-fit limit={intercept:.4} max residual={residual:.1e}",
            shown.join(","),
            worst.0,
            worst.1
        ),
    ))
}

fn tensorization() -> Outcome {
    let mut r = rng(11);
    let mut ok = true;
    let (mut worst_slack, mut worst_gap) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..100 {
        let n = r.random_range(2..=10);
        let g = random_tree(n, &mut r);
        let root = (0..n).find(|&v| g.degree(v) == 1).expect("trees have leaves");
        let lam: Vec<f64> = (0..g.m()).map(|_| r.random_range(0.001..=0.1)).collect();
        let rep = matching_tensorization_check(&g, root, &lam, 1000, &mut r).map_err(err)?;
        worst_slack = worst_slack.min(rep.worst_slack);
        let m = ModelInstance::new(ModelKind::MonomerDimer, g.clone(), lam).map_err(err)?;
        let oracle = enumerate(&m, DEFAULT_CONFIG_CAP).map_err(err)?;
        let c_tens = tensorization_constant(&oracle).map_err(err)?;
        let chain = build_chain_from(&oracle);
        let gap = spectral_gap(&chain).map_err(err)?;
        let slack = gap - 1.0 / (c_tens * chain.sites.len() as f64);
        worst_gap = worst_gap.min(slack);
        ok &= rep.worst_slack >= -1e-9 && slack >= -1e-9;
    }
    Ok((ok, format!("min inequality slack={worst_slack:.4e} min gap−1/(C·|U|)={worst_gap:.3e}")))
}

fn unboundedness() -> Outcome {
    let mut r = rng(12);
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = r.random_range(2..=12);
        let g = random_tree(n, &mut r);
        let l = r.random_range(0.1..40.0);
        let tree = RootedTree::new(&g, 0).map_err(err)?;
        let state = hardcore_recursion(&tree, &vec![l; n]).map_err(err)?;
        // x^T Q x against an enumerated Q, independent of the recursion.
        let m = ModelInstance::hardcore(g, l).map_err(err)?;
        let q = build_q_vertex(&m).map_err(err)?;
        let mut x = vec![0.0; n];
        for &u in &tree.order {
            x[u] = tree.parent[u].map_or(1.0, |p| state.beta[u] * x[p]);
        }
        let xs: Vec<f64> = q.matrix.index.iter().map(|&v| x[v]).collect();
        let form: f64 = (0..xs.len())
            .map(|i| (0..xs.len()).map(|j| xs[i] * q.matrix.matrix[(i, j)] * xs[j]).sum::<f64>())
            .sum();
        worst = worst.max((form - 1.0).abs());
        let rep = rayleigh_lower_bound(&tree, l).map_err(err)?;
        worst = worst.max(rep.identity_deviation);
    }
    ok &= worst < 1e-10;
    let (mut bounds, mut anchored) = (Vec::new(), Vec::new());
    for h in 2..=12 {
        let tree = RootedTree::new(&complete_ary_tree(3, h), 0).map_err(err)?;
        bounds.push(rayleigh_lower_bound(&tree, 30.0).map_err(err)?.lower_bound);
        // Informational: leaves held at the fixed-point ratio.
        let state = hardcore_recursion(&tree, &fixed_point_boundary(&tree, 30.0, 3)).map_err(err)?;
        anchored.push(rayleigh_from_betas(&tree, &state.beta).lower_bound);
    }
    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    ok &= increasing(&bounds);
    let shown: Vec<String> = bounds.iter().map(|v| format!("{v:.4}")).collect();
    Ok((
        ok,
        format!(
            "max|xᵀQx−1|={worst:.3e} Rayleigh bound H=2..12: [{}]; with fixed-point leaves: {:.3}..{:.3} increasing={}",
            shown.join(","),
            anchored[0],
            anchored[anchored.len() - 1],
            increasing(&anchored)
        ),
    ))
}

fn scalar_scans() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for delta in [0.03, 0.09] {
        let scan = hardcore_scalar_scan(delta, (1.0 - delta) * E * E, 10_000, 200);
        ok &= scan.passed();
        detail.push(format!("δ={delta}: F violations={} G violations={}", scan.f_violations.len(), scan.g_violations.len()));
    }
    Ok((ok, detail.join("; ")))
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: u64,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "tree inverse identity", budget: 30, run: tree_identity },
        Criterion { id: 2, name: "monomer-dimer tree bound", budget: 60, run: matching_trees },
        Criterion { id: 3, name: "hardcore tree bound and beta sums", budget: 120, run: hardcore_trees },
        Criterion { id: 4, name: "girth trade-off", budget: 60, run: girth_tradeoff },
        Criterion { id: 5, name: "path-tree influence identity", budget: 120, run: path_tree_identity },
        Criterion { id: 6, name: "influence decay", budget: 30, run: influence_decay },
        Criterion { id: 7, name: "k-transformation invariance", budget: 60, run: k_transformation },
        Criterion { id: 8, name: "cycle limits", budget: 10, run: cycle_limits },
        Criterion { id: 9, name: "parallel-edge lower bound", budget: 120, run: parallel_cycle },
        Criterion { id: 10, name: "glauber gap floor", budget: 120, run: glauber_gaps },
        Criterion { id: 11, name: "variance tensorization", budget: 120, run: tensorization },
        Criterion { id: 12, name: "unboundedness mechanism", budget: 60, run: unboundedness },
        Criterion { id: 13, name: "scalar scans", budget: 30, run: scalar_scans },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        let label = format!("C{:02}", c.id);
        if !filter.is_empty() && !filter.iter().any(|f| label.eq_ignore_ascii_case(f) || c.name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(c.budget);
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (pass && in_time, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{label} {} {}: {detail} [{:.2}s / {}s]",
            if pass { "PASS" } else { "FAIL" },
            c.name,
            elapsed.as_secs_f64(),
            c.budget
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
