//! Closed forms special to the two models: the hardcore tree recursion and
//! its β sums, path and cycle partition functions of the monomer-dimer model,
//! and scans of the scalar functions behind the hardcore bound.

use std::f64::consts::{E, SQRT_2};
use std::fmt::Write as _;

use crate::approx_inverse::largest_admissible_epsilon;
use crate::error::{Error, Result};
use crate::graph::RootedTree;
use crate::linalg::{lambda_max, Matrix};

/// Bottom-up and top-down conditional marginals of a hardcore tree.
#[derive(Clone, Debug)]
pub struct HardcoreRecursion {
    pub tree: RootedTree,
    /// μ_u^{p̄_u}: occupation of u with its parent forced out (the plain
    /// marginal at the root).
    pub up: Vec<f64>,
    /// μ_{p_u}^{ū}: occupation of the parent with u forced out (0 at the root).
    pub down: Vec<f64>,
    /// β_u = Ψ^sym(u, p_u) = −√(μ_u^{p̄_u} μ_{p_u}^{ū}) (0 at the root).
    pub beta: Vec<f64>,
    pub marginals: Vec<f64>,
}

/// Two passes of the ratio recursion R_u = λ_u Π_{w} 1/(1 + R_w), O(n).
pub fn hardcore_recursion(tree: &RootedTree, fugacity: &[f64]) -> Result<HardcoreRecursion> {
    let n = tree.n();
    if fugacity.len() != n {
        return Err(Error::InvalidModel(format!("expected {n} fugacities, got {}", fugacity.len())));
    }
    let mut up_ratio = vec![0.0; n];
    for &u in tree.order.iter().rev() {
        up_ratio[u] = fugacity[u] * tree.children[u].iter().map(|&c| 1.0 / (1.0 + up_ratio[c])).product::<f64>();
    }
    // full[u]: ratio of u in the whole tree; down_ratio[u]: ratio of p_u with
    // the branch of u removed.
    let mut full = vec![0.0; n];
    let mut down_ratio = vec![0.0; n];
    for &u in &tree.order {
        let from_above = tree.parent[u].map_or(1.0, |_| 1.0 / (1.0 + down_ratio[u]));
        full[u] = up_ratio[u] * from_above;
        for &c in &tree.children[u] {
            down_ratio[c] = full[u] * (1.0 + up_ratio[c]);
        }
    }
    let prob = |r: f64| r / (1.0 + r);
    let up: Vec<f64> = up_ratio.iter().map(|&r| prob(r)).collect();
    let down: Vec<f64> = (0..n).map(|u| if tree.parent[u].is_some() { prob(down_ratio[u]) } else { 0.0 }).collect();
    let beta = (0..n).map(|u| if tree.parent[u].is_some() { -(up[u] * down[u]).sqrt() } else { 0.0 }).collect();
    let marginals = full.iter().map(|&r| prob(r)).collect();
    Ok(HardcoreRecursion { tree: tree.clone(), up, down, beta, marginals })
}

impl HardcoreRecursion {
    /// Σ_{v∈C(u)} β_v² for every vertex.
    pub fn child_sums(&self) -> Vec<f64> {
        crate::approx_inverse::child_beta_sums(&self.tree, &self.beta)
    }

    /// 4/ε² for the largest admissible ε of the sum-of-squares argument: an
    /// upper bound on λ_max(Ψ) since Q Ψ^sym = I on trees.
    pub fn certified_bound(&self) -> Option<f64> {
        largest_admissible_epsilon(&self.tree, &self.beta).map(|e| 4.0 / (e * e))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaSumsReport {
    pub max_sum: f64,
    pub worst_vertex: usize,
    /// 1 − δ/3.
    pub bound: f64,
    pub holds: bool,
}

/// max_u Σ_{v∈C(u)} β_v² against 1 − δ/3, for λ < (1−δ)e² and δ ∈ (0, 1/10]. The
/// argument only needs δ/3 ≤ 1/30, so the closed endpoint is admitted.
pub fn beta_sums_check(state: &HardcoreRecursion, fugacity: f64, delta: f64) -> Result<BetaSumsReport> {
    if !(delta > 0.0 && delta <= 0.1) {
        return Err(Error::HypothesisFailed(format!("δ = {delta} lies outside (0, 1/10]")));
    }
    if fugacity >= (1.0 - delta) * E * E {
        return Err(Error::HypothesisFailed(format!("λ = {fugacity} is not below (1−δ)e²")));
    }
    let (worst_vertex, max_sum) = state
        .child_sums()
        .into_iter()
        .enumerate()
        .fold((0, 0.0), |best, (u, s)| if s > best.1 { (u, s) } else { best });
    let bound = 1.0 - delta / 3.0;
    Ok(BetaSumsReport { max_sum, worst_vertex, bound, holds: max_sum <= bound })
}

/// ln Z(P_k) for k = 0..=n, where P_k is the monomer-dimer path on k vertices.
pub fn path_log_partition(lambda: f64, n: usize) -> Vec<f64> {
    let mut ln_z = vec![0.0f64; n + 1];
    for k in 2..=n {
        // Z_k = Z_{k−1} + λ Z_{k−2}.
        ln_z[k] = ln_z[k - 1] + (1.0 + lambda * (ln_z[k - 2] - ln_z[k - 1]).exp()).ln();
    }
    ln_z
}

/// Z(P_{n−1})/Z(P_n).
pub fn path_ratio(lambda: f64, n: usize) -> f64 {
    assert!(n >= 1, "the ratio needs a nonempty path");
    let ln_z = path_log_partition(lambda, n);
    (ln_z[n - 1] - ln_z[n]).exp()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchingRatio {
    /// R = 1 − 2/(√(1+4λ) + 1).
    pub r: f64,
    /// The positive fixed point of x ↦ 1/(1 + λx).
    pub fixed_point: f64,
}

pub fn matching_ratio_limit(lambda: f64) -> MatchingRatio {
    let s = (1.0 + 4.0 * lambda).sqrt();
    MatchingRatio { r: 1.0 - 2.0 / (s + 1.0), fixed_point: 2.0 / (s + 1.0) }
}

/// Probability that the edge after the first `left` vertices of an
/// m-vertex path is occupied, leaving `right` vertices after it.
fn path_edge_probability(lambda: f64, ln_z: &[f64], m: usize, left: usize, right: usize) -> f64 {
    debug_assert_eq!(left + right + 2, m);
    lambda * (ln_z[left] + ln_z[right] - ln_z[m]).exp()
}

/// Ψ(e_0, e_j) for j = 0..n on the monomer-dimer cycle C_n with edges
/// e_j = (j, j+1 mod n). Pinning e_0 cuts the cycle into a path.
pub fn cycle_influence_row(lambda: f64, n: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::InvalidGraph("a cycle needs at least three vertices".into()));
    }
    let ln_z = path_log_partition(lambda, n);
    Ok((0..n)
        .map(|j| {
            let occupied = match j {
                0 => 1.0,
                _ if j == 1 || j == n - 1 => 0.0,
                _ => path_edge_probability(lambda, &ln_z, n - 2, j - 2, n - 2 - j),
            };
            let unoccupied = if j == 0 { 0.0 } else { path_edge_probability(lambda, &ln_z, n, j - 1, n - j - 1) };
            occupied - unoccupied
        })
        .collect())
}

/// Edge marginal of the monomer-dimer cycle C_n: λZ(P_{n−2})/Z(C_n) with
/// Z(C_n) = Z(P_n) + λZ(P_{n−2}).
pub fn cycle_marginal(lambda: f64, n: usize) -> f64 {
    let ln_z = path_log_partition(lambda, n);
    let a = lambda * (ln_z[n - 2] - ln_z[n]).exp();
    a / (1.0 + a)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleLimitReport {
    pub psi: f64,
    /// (−R)^{ℓ−1}.
    pub limit: f64,
    pub deviation: f64,
}

/// Ψ(e_1, e_ℓ) on C_n against its large-n limit (−R)^{ℓ−1}.
pub fn cycle_influence_limit_check(ell: usize, lambda: f64, n: usize) -> Result<CycleLimitReport> {
    if ell == 0 || 2 * ell > n {
        return Err(Error::InvalidModel(format!("ℓ = {ell} must lie in 1..=n/2")));
    }
    let psi = cycle_influence_row(lambda, n)?[ell - 1];
    let limit = (-matching_ratio_limit(lambda).r).powi(ell as i32 - 1);
    Ok(CycleLimitReport { psi, limit, deviation: (psi - limit).abs() })
}

/// The principal minor of Ψ on ℓ consecutive edges of C_n.
pub fn cycle_minor(lambda: f64, n: usize, ell: usize) -> Result<Matrix> {
    let row = cycle_influence_row(lambda, n)?;
    if ell == 0 || ell > n {
        return Err(Error::InvalidModel(format!("ℓ = {ell} must lie in 1..=n")));
    }
    Ok(Matrix::from_fn(ell, ell, |i, j| row[(j + n - i) % n]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBoundReport {
    pub value: f64,
    pub bound: f64,
    pub holds: bool,
}

/// λ_max of Ψ restricted to ℓ consecutive edges of C_n, which lower-bounds
/// λ_max(Ψ) by interlacing, against √λ/3.
pub fn long_cycle_lower_bound(lambda: f64, n: usize, ell: usize) -> Result<LowerBoundReport> {
    let value = lambda_max(&cycle_minor(lambda, n, ell)?.symmetrized())?;
    let bound = lambda.sqrt() / 3.0;
    Ok(LowerBoundReport { value, bound, holds: value >= bound })
}

/// Smallest ℓ with R^{ℓ−1} ≤ 1/2.
pub fn half_decay_length(lambda: f64) -> usize {
    let r = matching_ratio_limit(lambda).r;
    let mut ell = 1;
    while r.powi(ell as i32 - 1) > 0.5 {
        ell += 1;
    }
    ell
}

/// Largest matrix the exact parallel-cycle computation will build.
pub const DEFAULT_PARALLEL_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParallelCycleReport {
    /// Exact λ_max(Ψ) on the Δ/2-parallel cycle at λ = 1.
    pub value: f64,
    /// √Δ/10.
    pub bound: f64,
    /// λ_max(Ψ^cor) of the base cycle at fugacity Δ/2.
    pub cor_base: f64,
    /// |value − max(cor_base, 1)/(1 − μ_copy)|: marginals are uniform, so the
    /// Ψ^cor sandwich collapses to an equality.
    pub sandwich_deviation: f64,
}

/// λ_max(Ψ) of the monomer-dimer model at λ = 1 on C_n with every edge
/// replaced by Δ/2 parallel copies. Conditioned on the base cycle at fugacity
/// Δ/2, each occupied base edge picks a uniform copy, which gives every
/// covariance in closed form.
pub fn parallel_cycle_lower_bound(max_degree: usize, n: usize, cap: usize) -> Result<ParallelCycleReport> {
    if max_degree < 2 || max_degree % 2 != 0 {
        return Err(Error::InvalidModel(format!("Δ = {max_degree} must be even and at least 2")));
    }
    let k = max_degree / 2;
    let size = k * n;
    if size > cap {
        return Err(Error::CapExceeded { what: "parallel-cycle size", cap });
    }
    let base_lambda = k as f64;
    let row = cycle_influence_row(base_lambda, n)?;
    let mu = cycle_marginal(base_lambda, n);
    let var = mu * (1.0 - mu);
    let kf = k as f64;
    let mu_c = mu / kf;
    let var_c = mu_c * (1.0 - mu_c);
    let psi = Matrix::from_fn(size, size, |a, b| {
        let (i, j) = (a / k, b / k);
        if a == b {
            1.0
        } else if i == j {
            -mu_c * mu_c / var_c
        } else {
            var * row[(j + n - i) % n] / (kf * kf) / var_c
        }
    });
    let value = lambda_max(&psi.symmetrized())?;
    let base = Matrix::from_fn(n, n, |i, j| (1.0 - mu) * row[(j + n - i) % n]);
    let cor_base = lambda_max(&base.symmetrized())?;
    let sandwich_deviation = (value - cor_base.max(1.0) / (1.0 - mu_c)).abs();
    Ok(ParallelCycleReport { value, bound: (max_degree as f64).sqrt() / 10.0, cor_base, sandwich_deviation })
}

/// F(d, x) = dλ(1−x)x^d/(x + λx^d).
pub fn scalar_f(d: usize, x: f64, lambda: f64) -> f64 {
    let xd = x.powi(d as i32);
    d as f64 * lambda * (1.0 - x) * xd / (x + lambda * xd)
}

/// G(ζ, d) = (d−1)(1−ζ) y^{−d}/d with y = (d−1)(d+ζ−1)/d², for d ≥ 2.
pub fn scalar_g(zeta: f64, d: usize) -> f64 {
    let df = d as f64;
    let y = (df - 1.0) * (df + zeta - 1.0) / (df * df);
    (df - 1.0) * (1.0 - zeta) * (-df * y.ln()).exp() / df
}

/// The maximizer of F(d, ·): the root of d(1−x) − 1 − λx^d on (0, 1), or 0
/// when d = 1.
pub fn scalar_f_argmax(d: usize, lambda: f64) -> f64 {
    if d <= 1 {
        return 0.0;
    }
    bisect(|x| d as f64 * (1.0 - x) - 1.0 - lambda * x.powi(d as i32), 0.0, 1.0, true)
}

/// Root of a monotone function on [lo, hi]; `decreasing` gives its direction.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, decreasing: bool) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == decreasing {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub d: usize,
    pub x_hat: f64,
    /// The largest F(d, ·) seen, over the grid and at x̂.
    pub f_max: f64,
    /// 1 − ζ − f_max.
    pub margin: f64,
    /// G(ζ, d) − (1 − 3ζ)e², absent for d = 1.
    pub g_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarScan {
    pub delta: f64,
    pub lambda: f64,
    pub rows: Vec<ScanRow>,
    /// (d, x) grid points with F(d, x) > 1 − ζ.
    pub f_violations: Vec<(usize, f64)>,
    /// Degrees with G(ζ, d) < (1 − 3ζ)e².
    pub g_violations: Vec<usize>,
}

impl ScalarScan {
    pub fn passed(&self) -> bool {
        self.f_violations.is_empty() && self.g_violations.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("d,x_hat,f_max,margin,g_margin\n");
        for r in &self.rows {
            let g = r.g_margin.map_or(String::new(), |v| format!("{v:.12e}"));
            writeln!(s, "{},{:.12e},{:.12e},{:.12e},{g}", r.d, r.x_hat, r.f_max, r.margin).unwrap();
        }
        s
    }
}

/// Scan F(d, x) ≤ 1 − ζ over d = 1..=d_max and an x-grid of `x_points`
/// interior points, and G(ζ, d) ≥ (1 − 3ζ)e² over d = 2..=d_max, ζ = δ/3.
pub fn hardcore_scalar_scan(delta: f64, lambda: f64, x_points: usize, d_max: usize) -> ScalarScan {
    let zeta = delta / 3.0;
    let target = 1.0 - zeta;
    let g_target = (1.0 - 3.0 * zeta) * E * E;
    let mut rows = Vec::with_capacity(d_max);
    let mut f_violations = Vec::new();
    let mut g_violations = Vec::new();
    for d in 1..=d_max {
        let x_hat = scalar_f_argmax(d, lambda);
        let mut f_max = if d == 1 { lambda / (1.0 + lambda) } else { scalar_f(d, x_hat, lambda) };
        for i in 1..=x_points {
            let x = i as f64 / (x_points + 1) as f64;
            let f = scalar_f(d, x, lambda);
            if f > target {
                f_violations.push((d, x));
            }
            f_max = f_max.max(f);
        }
        let g_margin = (d >= 2).then(|| scalar_g(zeta, d) - g_target);
        if g_margin.is_some_and(|m| m < 0.0) {
            g_violations.push(d);
        }
        rows.push(ScanRow { d, x_hat, f_max, margin: target - f_max, g_margin });
    }
    ScalarScan { delta, lambda, rows, f_violations, g_violations }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureReport {
    /// Best objective found by the grid search and refinement.
    pub search_max: f64,
    /// Best objective over profiles with i equal entries and the rest zero.
    pub symmetric_max: f64,
    pub symmetric_size: usize,
    /// search_max ≤ symmetric_max + 1e-6.
    pub holds: bool,
}

/// Maximize Σ a_i/(1 − a_i + λP) over a_i ∈ [0, 1−P] with Π(1 − a_i) = P and
/// compare against the symmetric profiles. The constraint becomes the simplex
/// Σ t_i = −ln P with a_i = 1 − e^{−t_i}; the search enumerates a simplex grid
/// with `resolution` steps, then refines by pairwise mass transfers.
pub fn max_hardcore_structure_check(n: usize, p: f64, lambda: f64, resolution: usize) -> Result<StructureReport> {
    if n == 0 || n > 5 {
        return Err(Error::InvalidModel(format!("n = {n} must lie in 1..=5")));
    }
    if !(p > 0.0 && p < 1.0) || !(lambda > 0.0) {
        return Err(Error::InvalidModel("P must lie in (0, 1) and λ must be positive".into()));
    }
    let total = -p.ln();
    let objective = |t: &[f64]| -> f64 {
        t.iter().map(|&ti| {
            let a = 1.0 - (-ti).exp();
            a / (1.0 - a + lambda * p)
        })
        .sum()
    };
    let (symmetric_size, symmetric_max) = (1..=n)
        .map(|i| (i, objective(&vec![total / i as f64; i])))
        .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });

    let mut best = vec![0.0; n];
    best[0] = total;
    let mut best_val = objective(&best);
    let mut counts = vec![0usize; n];
    compositions(resolution, &mut counts, 0, &mut |c| {
        let t: Vec<f64> = c.iter().map(|&k| total * k as f64 / resolution as f64).collect();
        let v = objective(&t);
        if v > best_val {
            best_val = v;
            best = t;
        }
    });
    let mut step = total / resolution as f64;
    while step > 1e-12 {
        let mut improved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j || best[j] < step {
                    continue;
                }
                let mut t = best.clone();
                t[i] += step;
                t[j] -= step;
                let v = objective(&t);
                if v > best_val {
                    best_val = v;
                    best = t;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(StructureReport {
        search_max: best_val,
        symmetric_max,
        symmetric_size,
        holds: best_val <= symmetric_max + 1e-6,
    })
}

/// Every way of writing `total` as an ordered sum of `parts.len()` naturals.
fn compositions(total: usize, parts: &mut [usize], at: usize, visit: &mut dyn FnMut(&[usize])) {
    if at + 1 == parts.len() {
        parts[at] = total;
        visit(parts);
        return;
    }
    for k in 0..=total {
        parts[at] = k;
        compositions(total - k, parts, at + 1, visit);
    }
}

/// The root of x = λ(1−x)^d in (0, 1), by bisection.
pub fn fixed_point(lambda: f64, d: usize) -> f64 {
    bisect(|x| x - lambda * (1.0 - x).powi(d as i32), 0.0, 1.0, false)
}

/// The root of R = λ/(1+R)^d: the occupation ratio every vertex of an
/// infinite d-ary tree sees from below at the translation-invariant fixed point.
pub fn ratio_fixed_point(lambda: f64, d: usize) -> f64 {
    bisect(|r| r - lambda / (1.0 + r).powi(d as i32), 0.0, lambda.max(1.0), false)
}

/// Fugacities λ inside and R* on the leaves, so that on a complete d-ary tree
/// every up-ratio equals the fixed point R* instead of alternating by parity.
pub fn fixed_point_boundary(tree: &RootedTree, lambda: f64, d: usize) -> Vec<f64> {
    let r = ratio_fixed_point(lambda, d);
    (0..tree.n()).map(|u| if tree.is_leaf(u) { r } else { lambda }).collect()
}

/// (1 − 1/√2)^{−3}/√2 ≈ 28.14: above it the 3-ary fixed point exceeds 1/√2.
pub fn unboundedness_threshold() -> f64 {
    (1.0 - 1.0 / SQRT_2).powi(-3) / SQRT_2
}

/// The rounded threshold quoted for the unboundedness statement.
pub const UNBOUNDEDNESS_THRESHOLD_STATED: f64 = 28.15;
