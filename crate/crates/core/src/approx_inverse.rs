//! Local-block approximate inverses `Q` of Ψ^sym and `W` of Ψ, the spectral
//! certificate β/α they yield, and the quadratic-form machinery for hardcore
//! trees.

use rand::Rng;

use crate::error::{BlockOwner, Error, Result};
use crate::gibbs::{ModelInstance, ModelKind, DEFAULT_CONFIG_CAP};
use crate::graph::{path_tree, RootedTree};
use crate::influence::{decay_rate, tree_influence_rows, Influences, LabeledMatrix};
use crate::linalg::{
    determinant, eig_sym, invert, lambda_max, lambda_min, sherman_morrison, Matrix, Tolerances,
};
use crate::recursions::hardcore_recursion;

/// Which local inverse a matrix was assembled from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// Edge elements, one block per vertex star, inverses of Ψ^sym minors.
    Edge,
    /// Vertex elements, one 2×2 block per edge, inverses of Ψ^sym minors.
    Vertex,
    /// Same blocks as the model's `Q`, inverses of Ψ minors.
    W,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub owner: BlockOwner,
    /// Element ids of the block, in the order of `inverse`.
    pub elements: Vec<usize>,
    pub inverse: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxInverse {
    pub matrix: LabeledMatrix,
    pub variant: Variant,
    pub blocks: Vec<Block>,
}

impl ApproxInverse {
    pub fn block(&self, owner: BlockOwner) -> Option<&Block> {
        self.blocks.iter().find(|b| b.owner == owner)
    }
}

/// The natural blocks of a model over the free elements in `index`: edges at
/// each vertex for monomer-dimer, endpoints of each edge for hardcore. Empty
/// blocks are dropped.
pub fn structure_blocks(m: &ModelInstance, index: &[usize]) -> Vec<(BlockOwner, Vec<usize>)> {
    let g = m.graph();
    let mut free = vec![false; m.n_elements()];
    for &i in index {
        free[i] = true;
    }
    let mut out = Vec::new();
    match m.kind() {
        ModelKind::MonomerDimer => {
            for v in 0..g.n() {
                let b: Vec<usize> = g.incident(v).iter().copied().filter(|&e| free[e]).collect();
                if !b.is_empty() {
                    out.push((BlockOwner::Vertex(v), b));
                }
            }
        }
        ModelKind::Hardcore => {
            for (e, &(u, w)) in g.edges().iter().enumerate() {
                let b: Vec<usize> = [u, w].into_iter().filter(|&x| free[x]).collect();
                if !b.is_empty() {
                    out.push((BlockOwner::Edge(e), b));
                }
            }
        }
    }
    out
}

/// Σ_B pad(B⁻¹) − diag(c_i − 1), where c_i counts the blocks holding i.
fn assemble(index: &[usize], blocks: &[Block]) -> Matrix {
    let n = index.len();
    let pos = position_map(index);
    let mut q = Matrix::identity(n);
    for b in blocks {
        let p: Vec<usize> = b.elements.iter().map(|&id| pos[id]).collect();
        for (a, &pa) in p.iter().enumerate() {
            q[(pa, pa)] -= 1.0;
            for (c, &pc) in p.iter().enumerate() {
                q[(pa, pc)] += b.inverse[(a, c)];
            }
        }
    }
    q
}

fn position_map(index: &[usize]) -> Vec<usize> {
    let len = index.iter().copied().max().map_or(0, |x| x + 1);
    let mut pos = vec![usize::MAX; len];
    for (k, &id) in index.iter().enumerate() {
        pos[id] = k;
    }
    pos
}

/// Generic block inverse; a block counts as singular when |det| falls below
/// 1e-12 relative to its norm.
fn checked_inverse(p: &Matrix, owner: BlockOwner) -> Result<Matrix> {
    let scale = p.max_abs().max(f64::MIN_POSITIVE).powi(p.rows() as i32);
    let det = determinant(p)?;
    if det.abs() < 1e-12 * scale {
        return Err(Error::SingularBlock { owner });
    }
    invert(p, &Tolerances::default()).map_err(|_| Error::SingularBlock { owner })
}

/// Inverse of a monomer-dimer vertex block D̄⁻¹ − √r√r^T, where r_e = μ_e/(1−μ_e),
/// by Sherman-Morrison. The determinant Π(1/(1−μ_e))·(1 − Σμ_e) decides
/// singularity.
pub fn md_block_inverse(marginals: &[f64], owner: BlockOwner) -> Result<Matrix> {
    let det = marginals.iter().map(|p| 1.0 / (1.0 - p)).product::<f64>() * (1.0 - marginals.iter().sum::<f64>());
    if det.abs() < 1e-12 {
        return Err(Error::SingularBlock { owner });
    }
    let root: Vec<f64> = marginals.iter().map(|p| (p / (1.0 - p)).sqrt()).collect();
    let neg: Vec<f64> = root.iter().map(|x| -x).collect();
    let lambda_inv = Matrix::from_diag(&marginals.iter().map(|p| 1.0 - p).collect::<Vec<_>>());
    sherman_morrison(&lambda_inv, &neg, &root).map_err(|_| Error::SingularBlock { owner })
}

impl ApproxInverse {
    /// Assemble the requested variant from precomputed influences of `m`.
    pub fn from_influences(m: &ModelInstance, inf: &Influences, variant: Variant) -> Result<ApproxInverse> {
        match (variant, m.kind()) {
            (Variant::Edge, ModelKind::Hardcore) => {
                return Err(Error::InvalidModel("the edge variant needs an edge model".into()))
            }
            (Variant::Vertex, ModelKind::MonomerDimer) => {
                return Err(Error::InvalidModel("the vertex variant needs a vertex model".into()))
            }
            _ => {}
        }
        let pos = position_map(&inf.index);
        let mut blocks = Vec::new();
        for (owner, elements) in structure_blocks(m, &inf.index) {
            let p: Vec<usize> = elements.iter().map(|&id| pos[id]).collect();
            let inverse = match variant {
                Variant::Edge => {
                    let mu: Vec<f64> = p.iter().map(|&a| inf.marginals[a]).collect();
                    md_block_inverse(&mu, owner)?
                }
                Variant::Vertex if p.len() == 2 => {
                    let beta = inf.sym[(p[0], p[1])];
                    if beta.abs() >= 1.0 - 1e-12 {
                        return Err(Error::SingularBlock { owner });
                    }
                    let s = 1.0 / (1.0 - beta * beta);
                    Matrix::from_rows(&[vec![s, -beta * s], vec![-beta * s, s]])
                }
                Variant::Vertex => Matrix::identity(p.len()),
                Variant::W => checked_inverse(&inf.psi.principal_minor(&p), owner)?,
            };
            blocks.push(Block { owner, elements, inverse });
        }
        let q = assemble(&inf.index, &blocks);
        Ok(ApproxInverse { matrix: LabeledMatrix::new(inf.index.clone(), q), variant, blocks })
    }
}

pub fn build_q_edge(m: &ModelInstance) -> Result<ApproxInverse> {
    ApproxInverse::from_influences(m, &Influences::auto(m, DEFAULT_CONFIG_CAP)?, Variant::Edge)
}

pub fn build_q_vertex(m: &ModelInstance) -> Result<ApproxInverse> {
    ApproxInverse::from_influences(m, &Influences::auto(m, DEFAULT_CONFIG_CAP)?, Variant::Vertex)
}

pub fn build_w(m: &ModelInstance) -> Result<ApproxInverse> {
    ApproxInverse::from_influences(m, &Influences::auto(m, DEFAULT_CONFIG_CAP)?, Variant::W)
}

/// `Q` of the variant matching the model kind.
pub fn build_q(m: &ModelInstance) -> Result<ApproxInverse> {
    ApproxInverse::from_influences(m, &Influences::auto(m, DEFAULT_CONFIG_CAP)?, q_variant(m.kind()))
}

pub fn q_variant(kind: ModelKind) -> Variant {
    match kind {
        ModelKind::MonomerDimer => Variant::Edge,
        ModelKind::Hardcore => Variant::Vertex,
    }
}

/// ‖QΨ^sym − I‖_max on a forest.
pub fn tree_identity_check(m: &ModelInstance) -> Result<f64> {
    if !m.graph().is_forest() {
        return Err(Error::NotATree);
    }
    let inf = Influences::auto(m, DEFAULT_CONFIG_CAP)?;
    tree_identity_deviation(m, &inf)
}

/// ‖QΨ^sym − I‖_max for given influences (no tree requirement).
pub fn tree_identity_deviation(m: &ModelInstance, inf: &Influences) -> Result<f64> {
    let q = ApproxInverse::from_influences(m, inf, q_variant(m.kind()))?;
    let prod = q.matrix.matrix.matmul(&inf.sym);
    Ok(prod.max_abs_diff(&Matrix::identity(inf.index.len())))
}

/// Assemble P⁻¹ from the inverses of its principal minors on `blocks` and
/// return the largest deviation from the direct inverse.
pub fn product_distance_inverse_check(p: &LabeledMatrix, blocks: &[Vec<usize>]) -> Result<f64> {
    let mut assembled = Vec::with_capacity(blocks.len());
    for (k, elements) in blocks.iter().enumerate() {
        let idx: Vec<usize> = elements
            .iter()
            .map(|&id| p.position(id).ok_or_else(|| Error::Dimension(format!("element {id} is not indexed"))))
            .collect::<Result<_>>()?;
        let inverse = checked_inverse(&p.matrix.principal_minor(&idx), BlockOwner::Vertex(k))?;
        assembled.push(Block { owner: BlockOwner::Vertex(k), elements: elements.clone(), inverse });
    }
    let from_blocks = assemble(&p.index, &assembled);
    let direct = invert(&p.matrix, &Tolerances::default())?;
    Ok(from_blocks.max_abs_diff(&direct))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// λ_min(Q) ≤ 0: the certificate says nothing.
    Void,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Void => "void",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// λ_min(Q).
    pub alpha: f64,
    /// λ_max(QΨ^sym).
    pub beta: f64,
    /// β/α when α > 0.
    pub bound: Option<f64>,
    pub lambda_max_direct: f64,
    pub verdict: Verdict,
}

/// λ_max(QΨ^sym) through a symmetric similarity: Q^{1/2}Ψ^sym Q^{1/2} when Q
/// is positive definite, Ψ^{sym 1/2} Q Ψ^{sym 1/2} otherwise (Ψ^sym is PSD).
pub fn lambda_max_product(q: &Matrix, sym: &Matrix) -> Result<f64> {
    if q.rows() == 0 {
        return Ok(0.0);
    }
    let qs = q.symmetrized();
    let eq = eig_sym(&qs)?;
    let (root, other) = if eq.min() > 0.0 {
        (eq.apply(|x| x.sqrt()), sym.symmetrized())
    } else {
        (eig_sym(&sym.symmetrized())?.apply(|x| x.max(0.0).sqrt()), qs)
    };
    lambda_max(&root.matmul(&other).matmul(&root).symmetrized())
}

pub fn certificate(m: &ModelInstance) -> Result<Certificate> {
    certificate_from(m, &Influences::auto(m, DEFAULT_CONFIG_CAP)?, 1e-7)
}

pub fn certificate_from(m: &ModelInstance, inf: &Influences, tol: f64) -> Result<Certificate> {
    let q = ApproxInverse::from_influences(m, inf, q_variant(m.kind()))?;
    let direct = inf.lambda_max()?;
    if inf.index.is_empty() {
        return Ok(Certificate { alpha: 1.0, beta: 0.0, bound: Some(0.0), lambda_max_direct: 0.0, verdict: Verdict::Pass });
    }
    let alpha = lambda_min(&q.matrix.matrix.symmetrized())?;
    let beta = lambda_max_product(&q.matrix.matrix, &inf.sym)?;
    let (bound, verdict) = if alpha > 0.0 {
        let b = beta / alpha;
        (Some(b), if b >= direct - tol { Verdict::Pass } else { Verdict::Fail })
    } else {
        (None, Verdict::Void)
    };
    Ok(Certificate { alpha, beta, bound, lambda_max_direct: direct, verdict })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalSpectralReport {
    /// λ_max(Ψ^sym_u) for every vertex with a nonempty block.
    pub block_max: Vec<(usize, f64)>,
    pub violations: Vec<usize>,
    /// 2/β − 1.
    pub alpha_bound: f64,
    pub lambda_min_q: f64,
    /// No violations implies λ_min(Q) ≥ 2/β − 1 (up to `tol`).
    pub consistent: bool,
}

/// Compare every vertex block of an edge model against `beta_target` and the
/// resulting lower bound 2/β − 1 against λ_min(Q).
pub fn local_spectral_check(m: &ModelInstance, beta_target: f64) -> Result<LocalSpectralReport> {
    local_spectral_check_from(m, &Influences::auto(m, DEFAULT_CONFIG_CAP)?, beta_target, 1e-9)
}

pub fn local_spectral_check_from(
    m: &ModelInstance,
    inf: &Influences,
    beta_target: f64,
    tol: f64,
) -> Result<LocalSpectralReport> {
    if m.kind() != ModelKind::MonomerDimer {
        return Err(Error::InvalidModel("the local spectral check is stated for edge models".into()));
    }
    let pos = position_map(&inf.index);
    let mut block_max = Vec::new();
    let mut violations = Vec::new();
    for (owner, elements) in structure_blocks(m, &inf.index) {
        let BlockOwner::Vertex(v) = owner else { unreachable!("edge models have vertex blocks") };
        let p: Vec<usize> = elements.iter().map(|&id| pos[id]).collect();
        let top = lambda_max(&inf.sym.principal_minor(&p))?;
        if top > beta_target + tol {
            violations.push(v);
        }
        block_max.push((v, top));
    }
    let q = ApproxInverse::from_influences(m, inf, Variant::Edge)?;
    let lambda_min_q = if inf.index.is_empty() { 1.0 } else { lambda_min(&q.matrix.matrix.symmetrized())? };
    let alpha_bound = 2.0 / beta_target - 1.0;
    let consistent = !violations.is_empty() || lambda_min_q >= alpha_bound - tol;
    Ok(LocalSpectralReport { block_max, violations, alpha_bound, lambda_min_q, consistent })
}

/// The local target (2λ+1)/(λ+1) for monomer-dimer vertex blocks.
pub fn matching_beta_target(lambda: f64) -> f64 {
    (2.0 * lambda + 1.0) / (lambda + 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarginalClaimReport {
    /// Vertices whose largest incident marginal exceeds 1 − 1/β.
    pub triggered: usize,
    /// min over triggered vertices of 2(1 − 1/β) − Σ_e μ_e.
    pub worst_slack: f64,
}

/// At each vertex of a monomer-dimer model: if the largest incident marginal
/// exceeds 1 − 1/β, the incident marginals sum to at most 2(1 − 1/β).
pub fn matching_marginal_claim(marginals_at: &[Vec<f64>], beta: f64) -> MarginalClaimReport {
    let cut = 1.0 - 1.0 / beta;
    let mut triggered = 0;
    let mut worst_slack = f64::INFINITY;
    for mu in marginals_at {
        let top = mu.iter().copied().fold(0.0, f64::max);
        if top > cut {
            triggered += 1;
            worst_slack = worst_slack.min(2.0 * cut - mu.iter().sum::<f64>());
        }
    }
    MarginalClaimReport { triggered, worst_slack }
}

/// Marginals of the edges at every vertex of a monomer-dimer model.
pub fn incident_marginals(m: &ModelInstance, inf: &Influences) -> Vec<Vec<f64>> {
    let pos = position_map(&inf.index);
    (0..m.graph().n())
        .map(|v| {
            m.graph()
                .incident(v)
                .iter()
                .filter_map(|&e| pos.get(e).copied().filter(|&a| a != usize::MAX))
                .map(|a| inf.marginals[a])
                .collect()
        })
        .collect()
}

/// Ψ^sym(u, p_u) for every non-root vertex of a hardcore tree (0 at the root).
pub fn tree_betas(tree: &RootedTree, sym: &LabeledMatrix) -> Vec<f64> {
    (0..tree.n())
        .map(|u| tree.parent[u].map_or(0.0, |p| sym.get(u, p).expect("tree vertices are indexed")))
        .collect()
}

/// x^T Q x for the vertex-variant Q of a tree, in O(n): Q(u,u) = Σ_{N(u)}
/// 1/(1−β²) − d_u + 1 and Q(u, p_u) = −β_u/(1−β_u²).
pub fn tree_quadratic_form(tree: &RootedTree, beta: &[f64], x: &[f64]) -> f64 {
    let mut total = 0.0;
    for u in 0..tree.n() {
        let mut diag = 1.0;
        let mut edges = tree.children[u].iter().map(|&c| beta[c]).collect::<Vec<_>>();
        if tree.parent[u].is_some() {
            edges.push(beta[u]);
        }
        for b in edges {
            diag += 1.0 / (1.0 - b * b) - 1.0;
        }
        total += diag * x[u] * x[u];
        if let Some(p) = tree.parent[u] {
            let b = beta[u];
            total -= 2.0 * b / (1.0 - b * b) * x[u] * x[p];
        }
    }
    total
}

/// Right-hand side of the sum-of-squares decomposition of x^T Q x with
/// ζ = ε/2 and s_u = 1 − ζ(1 − β_u²).
pub fn decomposed_quadratic_form(tree: &RootedTree, beta: &[f64], eps: f64, x: &[f64]) -> f64 {
    let zeta = eps / 2.0;
    let s = |u: usize| 1.0 - zeta * (1.0 - beta[u] * beta[u]);
    let mut total = 0.0;
    for u in 0..tree.n() {
        let child_mass: f64 = tree.children[u].iter().map(|&c| zeta * beta[c] * beta[c] / s(c)).sum();
        match tree.parent[u] {
            None => total += (1.0 - child_mass) * x[u] * x[u],
            Some(p) => {
                let su = s(u);
                let b = beta[u];
                let sq = b / su.sqrt() * x[p] - su.sqrt() * x[u];
                total += sq * sq / (1.0 - b * b);
                total += (zeta - child_mass) * x[u] * x[u];
            }
        }
    }
    total
}

/// Σ_{v∈C(u)} β_v² for every vertex.
pub fn child_beta_sums(tree: &RootedTree, beta: &[f64]) -> Vec<f64> {
    (0..tree.n()).map(|u| tree.children[u].iter().map(|&c| beta[c] * beta[c]).sum()).collect()
}

/// Vertices breaking the hypotheses Σ_{C(u)} β² ≤ 1 − ε (u ≠ root) and
/// Σ_{C(root)} β² ≤ 1/(2ε).
pub fn decomposition_violations(tree: &RootedTree, beta: &[f64], eps: f64) -> Vec<usize> {
    let sums = child_beta_sums(tree, beta);
    (0..tree.n())
        .filter(|&u| {
            let limit = if u == tree.root { 1.0 / (2.0 * eps) } else { 1.0 - eps };
            sums[u] > limit + 1e-12
        })
        .collect()
}

/// The largest ε ∈ (0, 1] meeting both hypotheses, or None if none does.
pub fn largest_admissible_epsilon(tree: &RootedTree, beta: &[f64]) -> Option<f64> {
    let sums = child_beta_sums(tree, beta);
    let mut eps: f64 = 1.0;
    for u in 0..tree.n() {
        if u == tree.root {
            if sums[u] > 0.0 {
                eps = eps.min(1.0 / (2.0 * sums[u]));
            }
        } else {
            eps = eps.min(1.0 - sums[u]);
        }
    }
    (eps > 0.0).then_some(eps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport {
    pub max_deviation: f64,
    pub lambda_min_q: f64,
    /// ε²/4.
    pub alpha_bound: f64,
    pub conclusion_holds: bool,
}

/// Evaluate both sides of the sum-of-squares form of x^T Q x on `trials`
/// random vectors and check λ_min(Q) ≥ ε²/4 on an unpinned hardcore tree.
pub fn quadratic_decomposition_check<R: Rng + ?Sized>(
    m: &ModelInstance,
    root: usize,
    eps: f64,
    trials: usize,
    rng: &mut R,
) -> Result<DecompositionReport> {
    if m.kind() != ModelKind::Hardcore || !m.pinning().is_empty() {
        return Err(Error::InvalidModel("the decomposition concerns unpinned hardcore trees".into()));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::HypothesisFailed(format!("ε = {eps} lies outside (0, 1]")));
    }
    let tree = RootedTree::new(m.graph(), root)?;
    let inf = Influences::auto(m, DEFAULT_CONFIG_CAP)?;
    let beta = tree_betas(&tree, &inf.sym());
    let bad = decomposition_violations(&tree, &beta, eps);
    if !bad.is_empty() {
        return Err(Error::HypothesisFailed(format!("β sums exceed the limit at vertices {bad:?}")));
    }
    let q = ApproxInverse::from_influences(m, &inf, Variant::Vertex)?;
    let mut max_deviation: f64 = 0.0;
    for _ in 0..trials {
        let x: Vec<f64> = (0..tree.n()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let lhs = q.matrix.matrix.quadratic_form(&x);
        let rhs = decomposed_quadratic_form(&tree, &beta, eps, &x);
        max_deviation = max_deviation.max((lhs - rhs).abs());
    }
    let lambda_min_q = lambda_min(&q.matrix.matrix.symmetrized())?;
    let alpha_bound = eps * eps / 4.0;
    Ok(DecompositionReport { max_deviation, lambda_min_q, alpha_bound, conclusion_holds: lambda_min_q >= alpha_bound - 1e-12 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayleighReport {
    /// Σ_u x_u² with x_root = 1 and x_u = β_u x_{p_u}.
    pub lower_bound: f64,
    /// |x^T Q x − x_root²|.
    pub identity_deviation: f64,
}

/// A certified lower bound on λ_max(Ψ^sym) of a uniform hardcore tree: the
/// assignment x_u = β_u x_{p_u} has x^T Q x = x_root², so λ_max ≥ Σ x_u².
pub fn rayleigh_lower_bound(tree: &RootedTree, lambda: f64) -> Result<RayleighReport> {
    let state = hardcore_recursion(tree, &vec![lambda; tree.n()])?;
    Ok(rayleigh_from_betas(tree, &state.beta))
}

pub fn rayleigh_from_betas(tree: &RootedTree, beta: &[f64]) -> RayleighReport {
    let mut x = vec![0.0; tree.n()];
    for &u in &tree.order {
        x[u] = tree.parent[u].map_or(1.0, |p| beta[u] * x[p]);
    }
    let lower_bound = x.iter().map(|v| v * v).sum();
    let identity_deviation = (tree_quadratic_form(tree, beta, &x) - 1.0).abs();
    RayleighReport { lower_bound, identity_deviation }
}

/// Largest deviation between WΨ and its path-tree expression
/// Σ_{f^u ∈ χ_u⁻¹(f) ∩ T^u_v} Ψ^u(e, f^u) + Σ_{f^v ∈ χ_v⁻¹(f) ∩ T^v_u} Ψ^v(e, f^v) − Ψ(e, f)
/// over all edges e = (u, v) and f of an unpinned monomer-dimer model.
pub fn w_psi_explicit_check(m: &ModelInstance, node_cap: usize) -> Result<f64> {
    if m.kind() != ModelKind::MonomerDimer || !m.pinning().is_empty() {
        return Err(Error::InvalidModel("the path-tree form needs an unpinned monomer-dimer model".into()));
    }
    let g = m.graph();
    let inf = Influences::from_model(m, DEFAULT_CONFIG_CAP)?;
    if inf.index.len() != g.m() {
        return Err(Error::InvalidModel("every edge must be free".into()));
    }
    let w = ApproxInverse::from_influences(m, &inf, Variant::W)?;
    let wpsi = w.matrix.matrix.matmul(&inf.psi);
    // branch[u][e]: Σ over copies of f in the branch of T^u through e.
    let mut branch = vec![vec![Vec::new(); g.m()]; g.n()];
    for u in 0..g.n() {
        if g.degree(u) == 0 {
            continue;
        }
        let pt = path_tree(g, u, node_cap)?;
        let lam: Vec<f64> = pt.chi.iter().map(|&f| m.fugacity()[f]).collect();
        let tm = ModelInstance::new(ModelKind::MonomerDimer, pt.tree.clone(), lam)?;
        let roots: Vec<usize> = g.incident(u).iter().map(|&e| pt.root_copy(e).expect("root copy exists")).collect();
        let (_, rows) = tree_influence_rows(&tm, &roots)?;
        for (k, &e) in g.incident(u).iter().enumerate() {
            let mut folded = vec![0.0; g.m()];
            for (t, &f) in pt.chi.iter().enumerate() {
                if pt.in_branch(t, roots[k]) {
                    folded[f] += rows[(k, t)];
                }
            }
            branch[u][e] = folded;
        }
    }
    let mut worst: f64 = 0.0;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        for f in 0..g.m() {
            let explicit = branch[u][e][f] + branch[v][e][f] - inf.psi[(e, f)];
            worst = worst.max((explicit - wpsi[(e, f)]).abs());
        }
    }
    Ok(worst)
}

/// ⌊(girth − 1)/2⌋: the g with girth ≥ 2g + 1.
pub fn girth_radius(girth: usize) -> usize {
    girth.saturating_sub(1) / 2
}

/// 2C(1−δ)^g/δ + 1 with C = 2, δ the monomer-dimer decay rate and
/// g = ⌊(girth − 1)/2⌋.
pub fn lemma_girth_bound(lambda: f64, max_degree: usize, girth: usize) -> f64 {
    let delta = decay_rate(lambda, max_degree);
    4.0 * (1.0 - delta).powi(girth_radius(girth) as i32) / delta + 1.0
}

/// (2λ+1)(4(s+1)(1 − 2/(s+1))^{⌊(girth−1)/4⌋} + 1) with s = √(1+λΔ).
pub fn theorem_girth_bound(lambda: f64, max_degree: usize, girth: usize) -> f64 {
    let s = (1.0 + lambda * max_degree as f64).sqrt();
    let k = (girth.saturating_sub(1) / 4) as i32;
    (2.0 * lambda + 1.0) * (4.0 * (s + 1.0) * (1.0 - 2.0 / (s + 1.0)).powi(k) + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generators, Multigraph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &Matrix, b: &[Vec<f64>], tol: f64) -> bool {
        a.max_abs_diff(&Matrix::from_rows(b)) <= tol
    }

    #[test]
    fn two_edge_path_edge_variant() {
        let m = ModelInstance::monomer_dimer(generators::path(3), 1.0).unwrap();
        let q = build_q_edge(&m).unwrap();
        assert!(close(&q.matrix.matrix, &[vec![4.0 / 3.0, 2.0 / 3.0], vec![2.0 / 3.0, 4.0 / 3.0]], 1e-12));
        let c = certificate(&m).unwrap();
        assert!((c.alpha - 2.0 / 3.0).abs() < 1e-12);
        assert!((c.beta - 1.0).abs() < 1e-12);
        assert!((c.bound.unwrap() - 1.5).abs() < 1e-12);
        assert!((c.lambda_max_direct - 1.5).abs() < 1e-12);
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(tree_identity_check(&m).unwrap() < 1e-12);
    }

    #[test]
    fn trivial_instances() {
        let edge = ModelInstance::monomer_dimer(generators::path(2), 1.0).unwrap();
        assert!(close(&build_q_edge(&edge).unwrap().matrix.matrix, &[vec![1.0]], 0.0));
        assert!(close(&build_w(&edge).unwrap().matrix.matrix, &[vec![1.0]], 0.0));
        let lone = ModelInstance::hardcore(Multigraph::new(1, vec![]).unwrap(), 2.0).unwrap();
        assert!(close(&build_q_vertex(&lone).unwrap().matrix.matrix, &[vec![1.0]], 0.0));
        assert_eq!(tree_identity_check(&lone).unwrap(), 0.0);
    }

    #[test]
    fn hardcore_single_edge() {
        let m = ModelInstance::hardcore(generators::path(2), 1.0).unwrap();
        let q = build_q_vertex(&m).unwrap();
        assert!(close(&q.matrix.matrix, &[vec![4.0 / 3.0, 2.0 / 3.0], vec![2.0 / 3.0, 4.0 / 3.0]], 1e-12));
        let p3 = ModelInstance::hardcore(generators::path(3), 1.0).unwrap();
        assert!(tree_identity_check(&p3).unwrap() < 1e-10);
    }

    #[test]
    fn star_q_is_full_inverse() {
        let m = ModelInstance::monomer_dimer(generators::star(3), 1.0).unwrap();
        let inf = Influences::from_model(&m, 1000).unwrap();
        let q = ApproxInverse::from_influences(&m, &inf, Variant::Edge).unwrap();
        let direct = invert(&inf.sym, &Tolerances::default()).unwrap();
        assert!(q.matrix.matrix.max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn sherman_morrison_matches_gauss_jordan() {
        let g = generators::complete(4);
        let m = ModelInstance::new(ModelKind::MonomerDimer, g, vec![0.3, 1.0, 2.0, 0.7, 5.0, 1.1]).unwrap();
        let inf = Influences::from_model(&m, 10_000).unwrap();
        let q = ApproxInverse::from_influences(&m, &inf, Variant::Edge).unwrap();
        for b in &q.blocks {
            let idx: Vec<usize> = b.elements.iter().map(|&e| inf.index.iter().position(|&x| x == e).unwrap()).collect();
            let gj = invert(&inf.sym.principal_minor(&idx), &Tolerances::default()).unwrap();
            assert!(b.inverse.max_abs_diff(&gj) < 1e-12);
        }
    }

    #[test]
    fn w_and_q_share_spectrum() {
        let m = ModelInstance::monomer_dimer(generators::cycle(4).unwrap(), 1.0).unwrap();
        let inf = Influences::from_model(&m, 1000).unwrap();
        let q = ApproxInverse::from_influences(&m, &inf, Variant::Edge).unwrap();
        let w = ApproxInverse::from_influences(&m, &inf, Variant::W).unwrap();
        let via_q = lambda_max_product(&q.matrix.matrix, &inf.sym).unwrap();
        let wpsi = w.matrix.matrix.matmul(&inf.psi);
        // WΨ is similar to QΨ^sym through Π^{1/2}.
        let root: Vec<f64> = inf.marginals.iter().map(|p| (p * (1.0 - p)).sqrt()).collect();
        let inv: Vec<f64> = root.iter().map(|x| 1.0 / x).collect();
        let similar = wpsi.scale_rows_cols(&root, &inv);
        assert!((lambda_max(&similar.symmetrized()).unwrap() - via_q).abs() < 1e-9);
        let tree = ModelInstance::monomer_dimer(generators::path(3), 1.0).unwrap();
        let ti = Influences::from_model(&tree, 100).unwrap();
        let tw = ApproxInverse::from_influences(&tree, &ti, Variant::W).unwrap();
        assert!(tw.matrix.matrix.matmul(&ti.psi).max_abs_diff(&Matrix::identity(2)) < 1e-12);
    }

    #[test]
    fn product_distance_blocks() {
        let m = ModelInstance::monomer_dimer(generators::path(4), 1.3).unwrap();
        let sym = Influences::from_model(&m, 100).unwrap().sym();
        assert!(product_distance_inverse_check(&sym, &[vec![0, 1], vec![1, 2]]).unwrap() < 1e-10);
        let one = LabeledMatrix::new(vec![0], Matrix::identity(1));
        assert_eq!(product_distance_inverse_check(&one, &[]).unwrap(), 0.0);
    }

    #[test]
    fn local_spectral_targets() {
        let edge = ModelInstance::monomer_dimer(generators::path(2), 1.0).unwrap();
        let r = local_spectral_check(&edge, 1.0).unwrap();
        assert!(r.violations.is_empty() && r.alpha_bound == 1.0 && r.consistent);
        for lambda in [0.3, 1.0, 4.0] {
            let m = ModelInstance::monomer_dimer(generators::star(5), lambda).unwrap();
            let r = local_spectral_check(&m, matching_beta_target(lambda)).unwrap();
            assert!(r.violations.is_empty() && r.consistent);
        }
    }

    #[test]
    fn decomposition_on_small_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let edge = ModelInstance::hardcore(generators::path(2), 1.0).unwrap();
        let r = quadratic_decomposition_check(&edge, 0, 0.5, 50, &mut rng).unwrap();
        assert!(r.max_deviation < 1e-10);
        let p3 = ModelInstance::hardcore(generators::path(3), 1.0).unwrap();
        let tree = RootedTree::new(p3.graph(), 0).unwrap();
        let beta = tree_betas(&tree, &Influences::auto(&p3, 100).unwrap().sym());
        let eps = largest_admissible_epsilon(&tree, &beta).unwrap();
        let r = quadratic_decomposition_check(&p3, 0, eps, 50, &mut rng).unwrap();
        assert!(r.conclusion_holds && r.max_deviation < 1e-10);
        assert_eq!(decomposed_quadratic_form(&tree, &beta, eps, &[0.0; 3]), 0.0);
    }

    #[test]
    fn rayleigh_single_edge() {
        let g = generators::path(2);
        let tree = RootedTree::new(&g, 0).unwrap();
        let r = rayleigh_lower_bound(&tree, 1.0).unwrap();
        assert!((r.lower_bound - 1.25).abs() < 1e-12);
        assert!(r.identity_deviation < 1e-12);
        let lone = RootedTree::new(&Multigraph::new(1, vec![]).unwrap(), 0).unwrap();
        assert_eq!(rayleigh_lower_bound(&lone, 3.0).unwrap().lower_bound, 1.0);
    }

    #[test]
    fn sparse_form_matches_dense_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = generators::random_tree(9, &mut rng);
        let m = ModelInstance::hardcore(g.clone(), 2.0).unwrap();
        let tree = RootedTree::new(&g, 4).unwrap();
        let inf = Influences::auto(&m, 1000).unwrap();
        let beta = tree_betas(&tree, &inf.sym());
        let q = ApproxInverse::from_influences(&m, &inf, Variant::Vertex).unwrap();
        let x: Vec<f64> = (0..9).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!((q.matrix.matrix.quadratic_form(&x) - tree_quadratic_form(&tree, &beta, &x)).abs() < 1e-10);
    }

    #[test]
    fn explicit_w_psi_form() {
        for g in [generators::cycle(4).unwrap(), generators::complete(4), generators::path(4)] {
            let m = ModelInstance::monomer_dimer(g, 1.0).unwrap();
            assert!(w_psi_explicit_check(&m, 100_000).unwrap() < 1e-9);
        }
    }

    #[test]
    fn girth_bounds_shape() {
        assert!(lemma_girth_bound(1.0, 3, 9) < lemma_girth_bound(1.0, 3, 5));
        let t = theorem_girth_bound(1.0, 3, 1);
        assert!((t - 3.0 * (4.0 * 3.0 + 1.0)).abs() < 1e-12);
    }
}
