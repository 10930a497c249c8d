//! The check registry: instance checks run once per (graph, λ) pair,
//! standalone checks once per scenario.

use std::cell::OnceCell;
use std::f64::consts::E;

use approxinv::approx_inverse::{
    certificate_from, lambda_max_product, lemma_girth_bound, rayleigh_from_betas, theorem_girth_bound,
    tree_identity_deviation,
};
use approxinv::dynamics::{build_chain_from, matching_tensorization_check, spectral_gap, tensorization_constant};
use approxinv::gibbs::enumerate;
use approxinv::graph::generators::complete_ary_tree;
use approxinv::influence::{decay_check, k_transform_cor_check};
use approxinv::recursions::{
    beta_sums_check, cycle_influence_limit_check, fixed_point_boundary, half_decay_length, hardcore_recursion,
    hardcore_scalar_scan, long_cycle_lower_bound, parallel_cycle_lower_bound, DEFAULT_PARALLEL_CAP,
};
use approxinv::{ApproxInverse, Influences, ModelInstance, ModelKind, RootedTree, Variant};
use rand_chacha::ChaCha8Rng;

use crate::report::{Record, Sense, Verdict};
use crate::scenario::{Params, Tols};

type Out = approxinv::Result<Vec<Record>>;

pub struct Ctx<'a> {
    pub tols: Tols,
    pub cap: usize,
    pub params: &'a Params,
}

/// One model instance with its influences computed on first use.
pub struct Instance {
    pub label: String,
    pub model: ModelInstance,
    influences: OnceCell<approxinv::Result<Influences>>,
}

impl Instance {
    pub fn new(label: String, model: ModelInstance) -> Self {
        Instance { label, model, influences: OnceCell::new() }
    }

    fn influences(&self, cap: usize) -> approxinv::Result<&Influences> {
        self.influences.get_or_init(|| Influences::auto(&self.model, cap)).as_ref().map_err(Clone::clone)
    }
}

pub fn is_standalone(check: &str) -> bool {
    matches!(check, "cycle-limits" | "parallel-cycle" | "rayleigh-scan" | "scalar-scan")
}

pub fn run_instance_check(check: &'static str, ctx: &Ctx, inst: &Instance, rng: &mut ChaCha8Rng) -> Vec<Record> {
    let out = match check {
        "tree-identity" => tree_identity(ctx, inst),
        "certificate" => certificate(ctx, inst),
        "girth-bound" => girth_bound(ctx, inst),
        "decay" => decay(ctx, inst),
        "k-transform" => k_transform(ctx, inst),
        "chain-gap" => chain_gap(ctx, inst),
        "tensorization" => tensorization(ctx, inst, rng),
        "beta-sums" => beta_sums(ctx, inst),
        _ => unreachable!("{check} is not an instance check"),
    };
    out.unwrap_or_else(|e| vec![Record::error(check, &inst.label, e)])
}

pub fn run_standalone_check(check: &'static str, ctx: &Ctx) -> Vec<Record> {
    let out = match check {
        "cycle-limits" => cycle_limits(ctx),
        "parallel-cycle" => parallel_cycle(ctx),
        "rayleigh-scan" => rayleigh_scan(ctx),
        "scalar-scan" => scalar_scan(ctx),
        _ => unreachable!("{check} is not a standalone check"),
    };
    out.unwrap_or_else(|e| vec![Record::error(check, "-", e)])
}

fn is_md(m: &ModelInstance) -> bool {
    m.kind() == ModelKind::MonomerDimer
}

fn tree_identity(ctx: &Ctx, inst: &Instance) -> Out {
    const C: &str = "tree-identity";
    if !inst.model.graph().is_forest() {
        return Ok(vec![Record::void(C, &inst.label, "graph has a cycle")]);
    }
    let dev = tree_identity_deviation(&inst.model, inst.influences(ctx.cap)?)?;
    Ok(vec![Record::compare(C, &inst.label, "max|QΨsym − I|", dev, Sense::AtMost, ctx.tols.identity, 0.0)])
}

fn certificate(ctx: &Ctx, inst: &Instance) -> Out {
    const C: &str = "certificate";
    let m = &inst.model;
    let inf = inst.influences(ctx.cap)?;
    let slack = ctx.tols.linalg.slack;
    let c = certificate_from(m, inf, slack)?;
    let lam = m.max_fugacity();
    let mut out = Vec::new();
    match c.bound {
        Some(b) => out.push(Record {
            verdict: c.verdict.into(),
            ..Record::compare(C, &inst.label, "β/α ≥ λmax(Ψ)", b, Sense::AtLeast, c.lambda_max_direct, slack)
        }),
        None => out.push(Record::void(C, &inst.label, format!("λmin(Q) = {:.3e} is not positive", c.alpha))),
    }
    if is_md(m) {
        let target = 2.0 * lam + 1.0;
        out.push(Record::compare(C, &inst.label, "λmin(Q) ≥ 1/(2λ+1)", c.alpha, Sense::AtLeast, 1.0 / target, slack));
        if m.graph().is_forest() {
            out.push(Record::compare(C, &inst.label, "λmax(Ψ) ≤ 2λ+1", c.lambda_max_direct, Sense::AtMost, target, slack));
            if let Some(b) = c.bound {
                out.push(Record::compare(C, &inst.label, "β/α ≤ 2λ+1", b, Sense::AtMost, target, slack));
            }
        }
    } else if let Some(delta) = ctx.params.delta {
        if m.graph().is_forest() && lam < (1.0 - delta) * E * E {
            let cap = 36.0 / (delta * delta);
            out.push(Record::compare(C, &inst.label, "λmax(Ψ) ≤ 36/δ²", c.lambda_max_direct, Sense::AtMost, cap, slack));
        }
    }
    Ok(out)
}

fn girth_bound(ctx: &Ctx, inst: &Instance) -> Out {
    const C: &str = "girth-bound";
    let m = &inst.model;
    if !is_md(m) {
        return Ok(vec![Record::void(C, &inst.label, "monomer-dimer only")]);
    }
    let Some(girth) = m.graph().girth() else {
        return Ok(vec![Record::void(C, &inst.label, "acyclic: the certificate check covers trees")]);
    };
    let inf = inst.influences(ctx.cap)?;
    let (lam, delta_max) = (m.max_fugacity(), m.graph().max_degree());
    let slack = ctx.tols.linalg.slack;
    let direct = inf.lambda_max()?;
    let q = ApproxInverse::from_influences(m, inf, Variant::Edge)?;
    let product = lambda_max_product(&q.matrix.matrix, &inf.sym)?;
    let note = format!("girth={girth} Δ={delta_max}");
    Ok(vec![
        Record::compare(C, &inst.label, "λmax(Ψ) ≤ girth bound", direct, Sense::AtMost, theorem_girth_bound(lam, delta_max, girth), slack)
            .with_note(note.clone()),
        Record::compare(C, &inst.label, "λmax(QΨsym) ≤ 2C(1−δ)^g/δ+1", product, Sense::AtMost, lemma_girth_bound(lam, delta_max, girth), slack)
            .with_note(note),
    ])
}

fn decay(ctx: &Ctx, inst: &Instance) -> Out {
    const C: &str = "decay";
    let m = &inst.model;
    if !is_md(m) || !m.graph().is_tree() || !m.pinning().is_empty() {
        return Ok(vec![Record::void(C, &inst.label, "needs an unpinned monomer-dimer tree")]);
    }
    let worst = decay_check(m)?;
    Ok(vec![Record::compare(C, &inst.label, "s_k ≤ 2(1−δ)^k", worst, Sense::AtLeast, 0.0, ctx.tols.linalg.slack)])
}

fn k_transform(ctx: &Ctx, inst: &Instance) -> Out {
    const C: &str = "k-transform";
    let k = ctx.params.k;
    let r = k_transform_cor_check(&inst.model, k, ctx.cap)?;
    let expected = r.original.max(1.0);
    let verdict = if r.union_difference <= ctx.tols.identity { Verdict::Pass } else { Verdict::Fail };
    Ok(vec![Record {
        measured: r.transformed,
        bound: expected,
        slack: 0.0 - r.union_difference,
        verdict,
        ..Record::void(C, &inst.label, format!("k={k} η={:.6}", r.original))
    }
    .with_claim("λmax(Ψcor) after = max(η, 1)")])
}

fn chain_gap(ctx: &Ctx, inst: &Instance) -> Out {
    const C: &str = "chain-gap";
    let oracle = enumerate(&inst.model, ctx.cap)?;
    let chain = build_chain_from(&oracle);
    let residual = chain.stationarity_residual().max(chain.detailed_balance_residual());
    let gap = spectral_gap(&chain)?;
    let sites = chain.sites.len().max(1) as f64;
    let constant = tensorization_constant(&oracle)?;
    Ok(vec![
        Record::compare(C, &inst.label, "‖πP−π‖₁, detailed balance", residual, Sense::AtMost, 1e-11, 0.0),
        Record::compare(C, &inst.label, "gap ≥ 1/(C·|U|)", gap, Sense::AtLeast, 1.0 / (constant * sites), ctx.tols.linalg.slack)
            .with_note(format!("gap·|U|={:.6} C={constant:.6}", gap * sites)),
    ])
}

fn tensorization(ctx: &Ctx, inst: &Instance, rng: &mut ChaCha8Rng) -> Out {
    const C: &str = "tensorization";
    let m = &inst.model;
    let g = m.graph();
    if !is_md(m) || !g.is_tree() || !m.pinning().is_empty() || g.m() == 0 {
        return Ok(vec![Record::void(C, &inst.label, "needs an unpinned monomer-dimer tree with an edge")]);
    }
    if m.max_fugacity() > 0.1 {
        return Ok(vec![Record::void(C, &inst.label, "needs every fugacity ≤ 0.1")]);
    }
    let root = (0..g.n()).find(|&v| g.degree(v) == 1).expect("trees with an edge have leaves");
    let r = matching_tensorization_check(g, root, m.fugacity(), ctx.params.trials, rng)?;
    let slack = ctx.tols.linalg.slack;
    Ok(vec![
        Record::compare(C, &inst.label, "Var f ≤ Σ F_e μ[Var_e f]", r.worst_slack, Sense::AtLeast, 0.0, slack)
            .with_note(format!("trials={}", ctx.params.trials)),
        Record::compare(C, &inst.label, "sup Var f / Σ F_e μ[Var_e f] ≤ 1", r.worst_ratio, Sense::AtMost, 1.0, slack),
    ])
}

fn beta_sums(ctx: &Ctx, inst: &Instance) -> Out {
    const C: &str = "beta-sums";
    let m = &inst.model;
    let Some(delta) = ctx.params.delta else {
        return Ok(vec![Record::void(C, &inst.label, "params.delta is not set")]);
    };
    if is_md(m) || !m.graph().is_tree() || !m.pinning().is_empty() {
        return Ok(vec![Record::void(C, &inst.label, "needs an unpinned hardcore tree")]);
    }
    let lam = m.max_fugacity();
    if lam >= (1.0 - delta) * E * E {
        return Ok(vec![Record::void(C, &inst.label, "λ is not below (1−δ)e²")]);
    }
    let tree = RootedTree::new(m.graph(), 0)?;
    let state = hardcore_recursion(&tree, m.fugacity())?;
    let r = beta_sums_check(&state, lam, delta)?;
    let mut out = vec![Record::compare(C, &inst.label, "Σ β_v² ≤ 1 − δ/3", r.max_sum, Sense::AtMost, r.bound, 0.0)
        .with_note(format!("worst vertex {}", r.worst_vertex))];
    if let Some(b) = state.certified_bound() {
        out.push(Record::compare(C, &inst.label, "4/ε² ≤ 36/δ²", b, Sense::AtMost, 36.0 / (delta * delta), ctx.tols.linalg.slack));
    }
    Ok(out)
}

fn cycle_limits(ctx: &Ctx) -> Out {
    const C: &str = "cycle-limits";
    let p = ctx.params;
    let mut out = Vec::new();
    for &lam in &p.cycle_lambdas {
        for ell in 1..=p.max_ell {
            let r = cycle_influence_limit_check(ell, lam, p.cycle_n)?;
            let label = format!("C_{} λ={lam} ℓ={ell}", p.cycle_n);
            out.push(Record::compare(C, &label, "|Ψ(e₁,e_ℓ) − (−R)^{ℓ−1}|", r.deviation, Sense::AtMost, p.limit_tol, 0.0));
        }
        for ell in [half_decay_length(lam), p.cycle_n] {
            let r = long_cycle_lower_bound(lam, p.cycle_n, ell)?;
            let label = format!("C_{} λ={lam} ℓ={ell}", p.cycle_n);
            out.push(Record::compare(C, &label, "λmax(minor) ≥ √λ/3", r.value, Sense::AtLeast, r.bound, 0.0));
        }
    }
    Ok(out)
}

fn parallel_cycle(ctx: &Ctx) -> Out {
    const C: &str = "parallel-cycle";
    let p = ctx.params;
    let mut out = Vec::new();
    for &delta in &p.degrees {
        let r = parallel_cycle_lower_bound(delta, p.parallel_n, DEFAULT_PARALLEL_CAP.max(delta / 2 * p.parallel_n))?;
        let label = format!("C_{} Δ={delta}", p.parallel_n);
        let mut rec = Record::compare(C, &label, "λmax(Ψ) > √Δ/10", r.value, Sense::AtLeast, r.bound, 0.0);
        if r.value <= r.bound {
            rec.verdict = Verdict::Fail;
        }
        out.push(rec);
        out.push(Record::compare(C, &label, "Ψcor sandwich equality", r.sandwich_deviation, Sense::AtMost, ctx.tols.identity, 0.0));
    }
    Ok(out)
}

fn rayleigh_scan(ctx: &Ctx) -> Out {
    const C: &str = "rayleigh-scan";
    let p = ctx.params;
    let (d, lam) = (p.rayleigh_arity, p.rayleigh_lambda);
    let mut out = Vec::new();
    let mut bounds = Vec::new();
    for h in 2..=p.max_height {
        let tree = RootedTree::new(&complete_ary_tree(d, h), 0)?;
        let fugacity = match p.boundary.as_str() {
            "fixed-point" => fixed_point_boundary(&tree, lam, d),
            _ => vec![lam; tree.n()],
        };
        let state = hardcore_recursion(&tree, &fugacity)?;
        let r = rayleigh_from_betas(&tree, &state.beta);
        let label = format!("{d}-ary h={h} λ={lam} {}", p.boundary);
        out.push(
            Record::compare(C, &label, "xᵀQx = 1", r.identity_deviation, Sense::AtMost, ctx.tols.identity, 0.0)
                .with_note(format!("lower bound {:.6}", r.lower_bound)),
        );
        bounds.push(r.lower_bound);
    }
    let step = bounds.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let label = format!("{d}-ary h=2..{} λ={lam} {}", p.max_height, p.boundary);
    let mut rec = Record::compare(C, &label, "bound strictly increasing in h", step, Sense::AtLeast, 0.0, 0.0);
    if step <= 0.0 {
        rec.verdict = Verdict::Fail;
    }
    let first_last = format!("{:.4} → {:.4}", bounds[0], bounds[bounds.len() - 1]);
    out.push(rec.with_note(first_last));
    Ok(out)
}

fn scalar_scan(ctx: &Ctx) -> Out {
    const C: &str = "scalar-scan";
    let p = ctx.params;
    let mut out = Vec::new();
    for &delta in &p.deltas {
        let lam = (1.0 - delta) * E * E;
        let scan = hardcore_scalar_scan(delta, lam, p.x_points, p.d_max);
        let label = format!("δ={delta} d≤{}", p.d_max);
        let f_margin = scan.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
        let g_margin = scan.rows.iter().filter_map(|r| r.g_margin).fold(f64::INFINITY, f64::min);
        out.push(
            Record::compare(C, &label, "F(d,x) ≤ 1 − δ/3", f_margin, Sense::AtLeast, 0.0, 0.0)
                .with_note(format!("grid violations {}", scan.f_violations.len())),
        );
        out.push(
            Record::compare(C, &label, "G(δ/3,d) ≥ (1−δ)e²", g_margin, Sense::AtLeast, 0.0, 0.0)
                .with_note(format!("violations {}", scan.g_violations.len())),
        );
    }
    Ok(out)
}
