//! The exact Glauber dynamics chain, its spectral gap and mixing time, local
//! variances, and approximate tensorization of variance.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gibbs::{enumerate, GibbsOracle, ModelInstance, ModelKind};
use crate::graph::Multigraph;
use crate::linalg::{eig_sym, eigenvalues_sym, Matrix};

/// A real function on the support, indexed like the oracle's configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionOnStates {
    pub values: Vec<f64>,
}

impl FunctionOnStates {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Dimension(format!("value at state {k} is not finite")));
        }
        Ok(FunctionOnStates { values })
    }

    pub fn constant(n: usize, c: f64) -> Self {
        FunctionOnStates { values: vec![c; n] }
    }

    /// Coordinates uniform on [−1, 1].
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        FunctionOnStates { values: (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect() }
    }

    /// 1 on configurations containing `element`.
    pub fn indicator(oracle: &GibbsOracle, element: usize) -> Self {
        let values = oracle.configurations().map(|(c, _)| if c.contains(&element) { 1.0 } else { 0.0 }).collect();
        FunctionOnStates { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Glauber dynamics on the support of a Gibbs distribution: pick a free
/// element uniformly, then resample it from its conditional law.
#[derive(Clone, Debug)]
pub struct GlauberChain {
    pub states: Vec<Vec<usize>>,
    /// Elements the chain updates.
    pub sites: Vec<usize>,
    pub p: Matrix,
    pub pi: Vec<f64>,
}

/// For every site u, the pairs (x, y) of states with y = x ∪ {u}.
fn site_pairs(oracle: &GibbsOracle, sites: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let lookup: HashMap<&[usize], usize> = (0..oracle.support_size()).map(|k| (oracle.configuration(k), k)).collect();
    let mut out = vec![Vec::new(); sites.len()];
    for x in 0..oracle.support_size() {
        let c = oracle.configuration(x);
        for (s, &u) in sites.iter().enumerate() {
            if let Err(at) = c.binary_search(&u) {
                let mut with = c.to_vec();
                with.insert(at, u);
                if let Some(&y) = lookup.get(with.as_slice()) {
                    out[s].push((x, y));
                }
            }
        }
    }
    out
}

pub fn build_chain(m: &ModelInstance, config_cap: usize) -> Result<GlauberChain> {
    Ok(build_chain_from(&enumerate(m, config_cap)?))
}

pub fn build_chain_from(oracle: &GibbsOracle) -> GlauberChain {
    let n = oracle.support_size();
    let sites = oracle.free_elements();
    let pi: Vec<f64> = (0..n).map(|k| oracle.probability(k)).collect();
    let mut p = Matrix::zeros(n, n);
    if sites.is_empty() {
        return GlauberChain { states: all_states(oracle), sites, p: Matrix::identity(n), pi };
    }
    let pick = 1.0 / sites.len() as f64;
    // A site whose addition leaves the support stays unoccupied.
    for x in 0..n {
        p[(x, x)] = 1.0;
    }
    for pairs in site_pairs(oracle, &sites) {
        for (x, y) in pairs {
            let (wx, wy) = (pi[x], pi[y]);
            let up = pick * wy / (wx + wy);
            let down = pick * wx / (wx + wy);
            p[(x, y)] += up;
            p[(x, x)] -= up;
            p[(y, x)] += down;
            p[(y, y)] -= down;
        }
    }
    GlauberChain { states: all_states(oracle), sites, p, pi }
}

fn all_states(oracle: &GibbsOracle) -> Vec<Vec<usize>> {
    oracle.configurations().map(|(c, _)| c.to_vec()).collect()
}

impl GlauberChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn row_sum_deviation(&self) -> f64 {
        (0..self.len()).map(|x| (self.p.row(x).iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// max |π(x)P(x,y) − π(y)P(y,x)|.
    pub fn detailed_balance_residual(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in x + 1..n {
                worst = worst.max((self.pi[x] * self.p[(x, y)] - self.pi[y] * self.p[(y, x)]).abs());
            }
        }
        worst
    }

    /// ‖πP − π‖₁.
    pub fn stationarity_residual(&self) -> f64 {
        let n = self.len();
        let mut next = vec![0.0; n];
        for x in 0..n {
            for (y, v) in next.iter_mut().enumerate() {
                *v += self.pi[x] * self.p[(x, y)];
            }
        }
        next.iter().zip(&self.pi).map(|(a, b)| (a - b).abs()).sum()
    }

    /// States as space-separated id lists, then the transition matrix.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("state,elements,pi\n");
        for (k, c) in self.states.iter().enumerate() {
            let ids: Vec<String> = c.iter().map(|e| e.to_string()).collect();
            writeln!(s, "{k},{},{:.16e}", ids.join(" "), self.pi[k]).unwrap();
        }
        s.push_str("\nfrom\\to");
        for k in 0..self.len() {
            write!(s, ",{k}").unwrap();
        }
        s.push('\n');
        for x in 0..self.len() {
            write!(s, "{x}").unwrap();
            for v in self.p.row(x) {
                write!(s, ",{v:.16e}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// D_π^{1/2} P D_π^{−1/2}, symmetric for a reversible chain.
    fn symmetrized(&self) -> Matrix {
        let root: Vec<f64> = self.pi.iter().map(|p| p.sqrt()).collect();
        let inv: Vec<f64> = root.iter().map(|r| 1.0 / r).collect();
        self.p.scale_rows_cols(&root, &inv)
    }
}

/// Reversibility tolerance used before symmetrizing.
pub const REVERSIBILITY_TOL: f64 = 1e-11;

/// 1 − λ₂(P), read off the symmetrized chain.
pub fn spectral_gap(c: &GlauberChain) -> Result<f64> {
    let residual = c.detailed_balance_residual();
    if residual > REVERSIBILITY_TOL {
        return Err(Error::NotReversible(residual));
    }
    if c.len() < 2 {
        return Ok(1.0);
    }
    let values = eigenvalues_sym(&c.symmetrized().symmetrized())?;
    Ok(1.0 - values[values.len() - 2])
}

/// max_x ‖M(x, ·) − π‖_TV.
fn worst_tv(m: &Matrix, pi: &[f64]) -> f64 {
    (0..m.rows()).map(|x| 0.5 * m.row(x).iter().zip(pi).map(|(a, b)| (a - b).abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn renormalized(mut m: Matrix) -> Matrix {
    for x in 0..m.rows() {
        let s: f64 = m.row(x).iter().sum();
        m.row_mut(x).iter_mut().for_each(|v| *v /= s);
    }
    m
}

pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// Smallest t with max_x ‖P^t(x,·) − π‖_TV < eps. Powers P^{2^j} come from
/// repeated squaring; t is then assembled bit by bit, which is valid since the
/// worst-start distance never increases.
pub fn mixing_time(c: &GlauberChain, eps: f64, step_cap: usize) -> Result<usize> {
    let n = c.len();
    if worst_tv(&Matrix::identity(n), &c.pi) < eps {
        return Ok(0);
    }
    let mut powers = vec![c.p.clone()];
    while worst_tv(powers.last().unwrap(), &c.pi) >= eps {
        if 1usize << powers.len() > step_cap {
            return Err(Error::NoConvergence("mixing time within the step cap"));
        }
        let last = powers.last().unwrap();
        powers.push(renormalized(last.matmul(last)));
    }
    // Largest t with distance ≥ eps, built from the highest bit down.
    let mut t = 0usize;
    let mut current = Matrix::identity(n);
    for j in (0..powers.len() - 1).rev() {
        let candidate = renormalized(current.matmul(&powers[j]));
        if worst_tv(&candidate, &c.pi) >= eps {
            current = candidate;
            t += 1 << j;
        }
    }
    Ok(t + 1)
}

/// max_x ‖P^t(x,·) − π‖_TV for t = 0..=steps.
pub fn tv_profile(c: &GlauberChain, steps: usize) -> Vec<f64> {
    let mut m = Matrix::identity(c.len());
    let mut out = vec![worst_tv(&m, &c.pi)];
    for _ in 0..steps {
        m = m.matmul(&c.p);
        out.push(worst_tv(&m, &c.pi));
    }
    out
}

/// The configuration with the elements of `s` removed, grouping states by
/// their agreement outside `s`.
fn outside_key(c: &[usize], s: &[usize]) -> Vec<usize> {
    c.iter().copied().filter(|e| !s.contains(e)).collect()
}

/// μ_S(f): the conditional mean of f given the configuration outside S.
pub fn local_mean(oracle: &GibbsOracle, f: &FunctionOnStates, s: &[usize]) -> FunctionOnStates {
    let mut groups: HashMap<Vec<usize>, (f64, f64)> = HashMap::new();
    for (k, (c, w)) in oracle.configurations().enumerate() {
        let g = groups.entry(outside_key(c, s)).or_insert((0.0, 0.0));
        g.0 += w;
        g.1 += w * f.values[k];
    }
    let values = oracle
        .configurations()
        .map(|(c, _)| {
            let (w, wf) = groups[&outside_key(c, s)];
            wf / w
        })
        .collect();
    FunctionOnStates { values }
}

pub fn mean(oracle: &GibbsOracle, f: &FunctionOnStates) -> f64 {
    (0..oracle.support_size()).map(|k| oracle.probability(k) * f.values[k]).sum()
}

pub fn variance(oracle: &GibbsOracle, f: &FunctionOnStates) -> f64 {
    let m = mean(oracle, f);
    (0..oracle.support_size()).map(|k| oracle.probability(k) * (f.values[k] - m).powi(2)).sum()
}

/// μ[Var_S f].
pub fn local_variance(oracle: &GibbsOracle, f: &FunctionOnStates, s: &[usize]) -> f64 {
    let means = local_mean(oracle, f, s);
    (0..oracle.support_size()).map(|k| oracle.probability(k) * (f.values[k] - means.values[k]).powi(2)).sum()
}

/// |Var f − μ[Var_S f] − Var(μ_S f)|.
pub fn total_variance_check(oracle: &GibbsOracle, f: &FunctionOnStates, s: &[usize]) -> f64 {
    let lhs = variance(oracle, f);
    let rhs = local_variance(oracle, f, s) + variance(oracle, &local_mean(oracle, f, s));
    (lhs - rhs).abs()
}

/// (μ[Var_S(μ_T f)], μ[Var_S f]).
pub fn projection_contraction(oracle: &GibbsOracle, f: &FunctionOnStates, s: &[usize], t: &[usize]) -> (f64, f64) {
    let projected = local_mean(oracle, f, t);
    (local_variance(oracle, &projected, s), local_variance(oracle, f, s))
}

/// Single-site local variances in O(support) each: a site splits the
/// support into pairs {x, x ∪ u} and singletons.
pub struct SiteVariances {
    pub sites: Vec<usize>,
    pairs: Vec<Vec<(usize, usize, f64)>>,
}

impl SiteVariances {
    pub fn new(oracle: &GibbsOracle) -> Self {
        let sites = oracle.free_elements();
        let pairs = site_pairs(oracle, &sites)
            .into_iter()
            .map(|ps| {
                ps.into_iter()
                    .map(|(x, y)| {
                        let (a, b) = (oracle.probability(x), oracle.probability(y));
                        (x, y, a * b / (a + b))
                    })
                    .collect()
            })
            .collect();
        SiteVariances { sites, pairs }
    }

    /// μ[Var_u f] for the site at position `s` of `sites`.
    pub fn at(&self, s: usize, f: &FunctionOnStates) -> f64 {
        self.pairs[s].iter().map(|&(x, y, w)| w * (f.values[x] - f.values[y]).powi(2)).sum()
    }

    /// The quadratic form Σ_u c_u μ[Var_u f] as a matrix.
    pub fn form(&self, n: usize, weights: &[f64]) -> Matrix {
        let mut b = Matrix::zeros(n, n);
        for (s, ps) in self.pairs.iter().enumerate() {
            for &(x, y, w) in ps {
                let w = w * weights[s];
                b[(x, x)] += w;
                b[(y, y)] += w;
                b[(x, y)] -= w;
                b[(y, x)] -= w;
            }
        }
        b
    }
}

/// The smallest C with Var f ≤ C Σ_u μ[Var_u f] for every f: the inverse of
/// the smallest nonzero generalized eigenvalue of the local-variance form
/// against the variance form, both taken off the constants.
pub fn tensorization_constant(oracle: &GibbsOracle) -> Result<f64> {
    let n = oracle.support_size();
    if n < 2 {
        return Ok(1.0);
    }
    let local = SiteVariances::new(oracle);
    generalized_ratio(oracle, &local.form(n, &vec![1.0; local.sites.len()]))
}

/// max over non-constant f of Var f / f^T B f, for a form B that vanishes on
/// constants. In the coordinates g = D_π^{1/2} f the variance form is the
/// projection off √π, an eigenvector of D^{−1/2} B D^{−1/2} with eigenvalue 0.
fn generalized_ratio(oracle: &GibbsOracle, b: &Matrix) -> Result<f64> {
    let n = b.rows();
    let inv: Vec<f64> = (0..n).map(|k| 1.0 / oracle.probability(k).sqrt()).collect();
    let scaled = b.scale_rows_cols(&inv, &inv).symmetrized();
    let eig = eig_sym(&scaled)?;
    let root: Vec<f64> = (0..n).map(|k| oracle.probability(k).sqrt()).collect();
    // Drop the eigenvector closest to √π; the rest span its complement.
    let along = |k: usize| crate::linalg::dot(&eig.vector(k), &root).abs();
    let skip = (0..n).max_by(|&a, &b| along(a).total_cmp(&along(b))).expect("nonempty");
    let smallest = (0..n).filter(|&k| k != skip).map(|k| eig.values[k]).fold(f64::INFINITY, f64::min);
    if smallest <= 1e-12 * eig.max().abs().max(1.0) {
        return Err(Error::Degenerate("the local-variance form vanishes off the constants".into()));
    }
    Ok(1.0 / smallest)
}

/// F_{T,e}(λ_e): 3(1+λ_e) if an endpoint of e is a leaf, 6(1+λ_e) otherwise.
pub fn tensorization_weight(g: &Multigraph, e: usize, lambda: f64) -> f64 {
    let (u, v) = g.edge(e);
    let leaf = g.degree(u) == 1 || g.degree(v) == 1;
    let c = if leaf { 3.0 } else { 6.0 };
    c * (1.0 + lambda)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorizationReport {
    /// min over trials of Σ_e F_e μ[Var_e f] − Var f.
    pub worst_slack: f64,
    /// max over all f of Var f / Σ_e F_e μ[Var_e f]; at most 1 when the
    /// weighted inequality holds for every f.
    pub worst_ratio: f64,
}

/// The weighted tensorization inequality on a monomer-dimer tree rooted at a
/// degree-1 vertex with every fugacity at most 0.1, on `trials` random f.
pub fn matching_tensorization_check<R: Rng + ?Sized>(
    g: &Multigraph,
    root: usize,
    fugacity: &[f64],
    trials: usize,
    rng: &mut R,
) -> Result<TensorizationReport> {
    if !g.is_tree() {
        return Err(Error::NotATree);
    }
    if root >= g.n() || g.degree(root) != 1 {
        return Err(Error::HypothesisFailed(format!("root {root} must have degree 1")));
    }
    if let Some(e) = fugacity.iter().position(|&l| l > 0.1) {
        return Err(Error::HypothesisFailed(format!("edge {e} has fugacity above 0.1")));
    }
    let m = ModelInstance::new(ModelKind::MonomerDimer, g.clone(), fugacity.to_vec())?;
    let oracle = enumerate(&m, crate::gibbs::DEFAULT_CONFIG_CAP)?;
    let local = SiteVariances::new(&oracle);
    let weights: Vec<f64> = local.sites.iter().map(|&e| tensorization_weight(g, e, fugacity[e])).collect();
    let mut worst_slack = f64::INFINITY;
    for _ in 0..trials {
        let f = FunctionOnStates::random(oracle.support_size(), rng);
        let rhs: f64 = (0..local.sites.len()).map(|s| weights[s] * local.at(s, &f)).sum();
        worst_slack = worst_slack.min(rhs - variance(&oracle, &f));
    }
    let worst_ratio = generalized_ratio(&oracle, &local.form(oracle.support_size(), &weights))?;
    Ok(TensorizationReport { worst_slack, worst_ratio })
}
