//! Influence matrices Ψ, Ψ^cor and Ψ^sym, their relations, decay profiles and
//! the fast product-rule construction on forests.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gibbs::{enumerate, GibbsOracle, ModelInstance, ModelKind, DEFAULT_CONFIG_CAP};
use crate::graph::{k_transform_edges, k_transform_vertices, path_tree, Multigraph};
use crate::linalg::{lambda_max, Matrix};

/// Square matrix indexed by an ordered list of element ids.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMatrix {
    pub index: Vec<usize>,
    pub matrix: Matrix,
}

impl LabeledMatrix {
    pub fn new(index: Vec<usize>, matrix: Matrix) -> Self {
        assert_eq!(index.len(), matrix.rows(), "index length must match the matrix");
        assert!(matrix.is_square(), "labeled matrices are square");
        LabeledMatrix { index, matrix }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Position of element `id` in the index.
    pub fn position(&self, id: usize) -> Option<usize> {
        self.index.iter().position(|&x| x == id)
    }

    /// Entry by element ids.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        Some(self.matrix[(self.position(i)?, self.position(j)?)])
    }

    /// Max row absolute sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.len()).map(|i| self.matrix.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// CSV with a header of element ids; values carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("id");
        for id in &self.index {
            write!(s, ",{id}").unwrap();
        }
        s.push('\n');
        for (r, id) in self.index.iter().enumerate() {
            write!(s, "{id}").unwrap();
            for x in self.matrix.row(r) {
                write!(s, ",{x:.16e}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<LabeledMatrix> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };
        let (hl, header) = lines.next().ok_or_else(|| perr(0, "empty csv".into()))?;
        let index: Vec<usize> = header
            .split(',')
            .skip(1)
            .map(|t| t.trim().parse().map_err(|e| perr(hl, format!("{t:?}: {e}"))))
            .collect::<Result<_>>()?;
        let mut rows = Vec::new();
        for (ln, line) in lines {
            let mut cells = line.split(',');
            let id: usize = cells.next().unwrap_or("").trim().parse().map_err(|e| perr(ln, format!("row id: {e}")))?;
            if index.get(rows.len()) != Some(&id) {
                return Err(perr(ln, format!("row id {id} out of order")));
            }
            let row: Vec<f64> =
                cells.map(|t| t.trim().parse().map_err(|e| perr(ln, format!("{t:?}: {e}")))).collect::<Result<_>>()?;
            if row.len() != index.len() {
                return Err(perr(ln, format!("expected {} values", index.len())));
            }
            rows.push(row);
        }
        if rows.len() != index.len() {
            return Err(perr(0, format!("expected {} rows, found {}", index.len(), rows.len())));
        }
        Ok(LabeledMatrix::new(index, Matrix::from_rows(&rows)))
    }
}

/// Ψ, Ψ^cor and Ψ^sym of one distribution, restricted to its free elements.
#[derive(Clone, Debug)]
pub struct Influences {
    pub index: Vec<usize>,
    /// Marginals μ_i of the indexed elements.
    pub marginals: Vec<f64>,
    pub psi: Matrix,
    pub cor: Matrix,
    pub sym: Matrix,
}

impl Influences {
    pub fn from_oracle(oracle: &GibbsOracle) -> Result<Influences> {
        let index = oracle.free_elements();
        let n = index.len();
        let marginals: Vec<f64> = index.iter().map(|&i| oracle.marginal(i)).collect();
        let var: Vec<f64> = marginals.iter().map(|p| p * (1.0 - p)).collect();
        for (k, &v) in var.iter().enumerate() {
            if !(v > 0.0) {
                return Err(Error::DegenerateElement { element: index[k] });
            }
        }
        let cov = Matrix::from_fn(n, n, |a, b| {
            if a == b {
                var[a]
            } else {
                oracle.covariance(index[a], index[b])
            }
        });
        // Ψ(i,j) = cov(i,j)/Var(i); Ψ^cor(i,j) = cov(i,j)/μ_i.
        let mut psi = Matrix::from_fn(n, n, |a, b| cov[(a, b)] / var[a]);
        let mut cor = Matrix::from_fn(n, n, |a, b| cov[(a, b)] / marginals[a]);
        let sd: Vec<f64> = var.iter().map(|v| v.sqrt()).collect();
        let mut sym = Matrix::from_fn(n, n, |a, b| cov[(a, b)] / (sd[a] * sd[b]));
        for a in 0..n {
            psi[(a, a)] = 1.0;
            cor[(a, a)] = 1.0 - marginals[a];
            sym[(a, a)] = 1.0;
        }
        Ok(Influences { index, marginals, psi, cor, sym })
    }

    pub fn from_model(m: &ModelInstance, config_cap: usize) -> Result<Influences> {
        Influences::from_oracle(&enumerate(m, config_cap)?)
    }

    /// Assemble from Ψ and the marginals (Ψ^cor = D̄Ψ, Ψ^sym = Π^{1/2}ΨΠ^{-1/2}).
    pub fn from_psi(index: Vec<usize>, marginals: Vec<f64>, psi: Matrix) -> Result<Influences> {
        for (k, &p) in marginals.iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::DegenerateElement { element: index[k] });
            }
        }
        let n = index.len();
        let cor = Matrix::from_fn(n, n, |a, b| psi[(a, b)] * (1.0 - marginals[a]));
        let mut sym = symmetrize_influence(&psi, &marginals);
        for a in 0..n {
            sym[(a, a)] = 1.0;
        }
        Ok(Influences { index, marginals, psi, cor, sym })
    }

    /// Product-rule fast path on unpinned forests, enumeration otherwise.
    pub fn auto(m: &ModelInstance, config_cap: usize) -> Result<Influences> {
        if m.graph().is_forest() && m.pinning().is_empty() {
            let rows: Vec<usize> = (0..m.n_elements()).collect();
            let (mu, psi) = tree_influence_rows(m, &rows)?;
            Influences::from_psi(rows, mu, psi)
        } else {
            Influences::from_model(m, config_cap)
        }
    }

    pub fn psi(&self) -> LabeledMatrix {
        LabeledMatrix::new(self.index.clone(), self.psi.clone())
    }

    pub fn cor(&self) -> LabeledMatrix {
        LabeledMatrix::new(self.index.clone(), self.cor.clone())
    }

    pub fn sym(&self) -> LabeledMatrix {
        LabeledMatrix::new(self.index.clone(), self.sym.clone())
    }

    /// λ_max(Ψ), computed as λ_max(Ψ^sym).
    pub fn lambda_max(&self) -> Result<f64> {
        if self.index.is_empty() {
            return Ok(0.0);
        }
        lambda_max(&self.sym)
    }

    /// λ_max(Ψ^cor) through the symmetric matrix D^{1/2} Ψ^cor D^{-1/2}.
    pub fn lambda_max_cor(&self) -> Result<f64> {
        if self.index.is_empty() {
            return Ok(0.0);
        }
        let root: Vec<f64> = self.marginals.iter().map(|p| p.sqrt()).collect();
        let inv: Vec<f64> = root.iter().map(|r| 1.0 / r).collect();
        lambda_max(&self.cor.scale_rows_cols(&root, &inv).symmetrized())
    }

    /// The two-sided bound λ_max(Ψ^cor)/r ≤ λ_max(Ψ) ≤ λ_max(Ψ^cor)/l where
    /// [l, r] is the range of the non-occupation probabilities.
    pub fn sandwich(&self) -> Result<Sandwich> {
        let cor = self.lambda_max_cor()?;
        let value = self.lambda_max()?;
        let l = self.marginals.iter().map(|p| 1.0 - p).fold(f64::INFINITY, f64::min);
        let r = self.marginals.iter().map(|p| 1.0 - p).fold(0.0, f64::max);
        Ok(Sandwich { lower: cor / r, value, upper: cor / l })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sandwich {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
}

impl Sandwich {
    pub fn holds(&self, tol: f64) -> bool {
        self.lower <= self.value + tol && self.value <= self.upper + tol
    }
}

pub fn influence_matrix(m: &ModelInstance) -> Result<LabeledMatrix> {
    Ok(Influences::from_model(m, DEFAULT_CONFIG_CAP)?.psi())
}

pub fn correlation_matrix(m: &ModelInstance) -> Result<LabeledMatrix> {
    Ok(Influences::from_model(m, DEFAULT_CONFIG_CAP)?.cor())
}

pub fn symmetrized_matrix(m: &ModelInstance) -> Result<LabeledMatrix> {
    Ok(Influences::from_model(m, DEFAULT_CONFIG_CAP)?.sym())
}

/// ‖Ψ‖_∞, from the fast path on forests and enumeration otherwise.
pub fn total_influence(m: &ModelInstance) -> Result<f64> {
    let psi = if m.graph().is_forest() && m.pinning().is_empty() {
        tree_influence_fast(m)?
    } else {
        influence_matrix(m)?
    };
    Ok(psi.inf_norm())
}

/// Marginals of an unpinned model on a forest by message passing.
pub fn tree_marginals(m: &ModelInstance) -> Result<Vec<f64>> {
    let g = m.graph();
    if !g.is_forest() {
        return Err(Error::NotAForest);
    }
    if !m.pinning().is_empty() {
        return Err(Error::InvalidModel("the message-passing path does not take pinnings".into()));
    }
    let lam = m.fugacity();
    let msgs = directed_messages(g, |_, v, incoming: &[(usize, f64)]| match m.kind() {
        // Pr[v unmatched within its side of e].
        ModelKind::MonomerDimer => 1.0 / (1.0 + incoming.iter().map(|&(f, r)| lam[f] * r).sum::<f64>()),
        // Occupation ratio of v within its side of e.
        ModelKind::Hardcore => lam[v] * incoming.iter().map(|&(_, r)| 1.0 / (1.0 + r)).product::<f64>(),
    });
    Ok(match m.kind() {
        ModelKind::MonomerDimer => (0..g.m())
            .map(|e| {
                let (a, b) = g.edge(e);
                let x = lam[e] * msgs.toward(e, b) * msgs.toward(e, a);
                x / (1.0 + x)
            })
            .collect(),
        ModelKind::Hardcore => (0..g.n())
            .map(|v| {
                let r = lam[v] * g.incident(v).iter().map(|&e| 1.0 / (1.0 + msgs.toward(e, v))).product::<f64>();
                r / (1.0 + r)
            })
            .collect(),
    })
}

/// Messages along both directions of every forest edge. `toward(e, v)` is
/// the message sent across `e` into `v`, computed on the side of `e` not
/// containing `v`.
pub(crate) struct Messages {
    edges: Vec<(usize, usize)>,
    into_first: Vec<f64>,
    into_second: Vec<f64>,
}

impl Messages {
    pub(crate) fn toward(&self, e: usize, v: usize) -> f64 {
        if self.edges[e].0 == v {
            self.into_first[e]
        } else {
            self.into_second[e]
        }
    }
}

/// `rule(e, sender, incoming)` computes the message sent by `sender` across
/// `e` given the messages `(f, value)` arriving at `sender` over its other
/// edges.
pub(crate) fn directed_messages(
    g: &Multigraph,
    rule: impl Fn(usize, usize, &[(usize, f64)]) -> f64,
) -> Messages {
    let m = g.m();
    let mut into_first = vec![f64::NAN; m];
    let mut into_second = vec![f64::NAN; m];
    let mut seen = vec![false; g.n()];
    let mut incoming = Vec::new();
    for root in 0..g.n() {
        if seen[root] {
            continue;
        }
        // BFS order with parent edges.
        let mut order = vec![(root, None::<usize>)];
        seen[root] = true;
        let mut k = 0;
        while k < order.len() {
            let (v, _) = order[k];
            for &e in g.incident(v) {
                let w = g.other(e, v);
                if !seen[w] {
                    seen[w] = true;
                    order.push((w, Some(e)));
                }
            }
            k += 1;
        }
        let set = |into_first: &mut Vec<f64>, into_second: &mut Vec<f64>, e: usize, target: usize, x: f64| {
            if g.edge(e).0 == target {
                into_first[e] = x;
            } else {
                into_second[e] = x;
            }
        };
        let get = |into_first: &Vec<f64>, into_second: &Vec<f64>, e: usize, target: usize| {
            if g.edge(e).0 == target {
                into_first[e]
            } else {
                into_second[e]
            }
        };
        // Upward pass: child -> parent.
        for &(v, pe) in order.iter().rev() {
            if let Some(pe) = pe {
                incoming.clear();
                for &f in g.incident(v) {
                    if f != pe {
                        incoming.push((f, get(&into_first, &into_second, f, v)));
                    }
                }
                let x = rule(pe, v, &incoming);
                set(&mut into_first, &mut into_second, pe, g.other(pe, v), x);
            }
        }
        // Downward pass: parent -> child.
        for &(v, _) in &order {
            for &e in g.incident(v) {
                let w = g.other(e, v);
                if !get(&into_first, &into_second, e, w).is_nan() {
                    continue;
                }
                incoming.clear();
                for &f in g.incident(v) {
                    if f != e {
                        incoming.push((f, get(&into_first, &into_second, f, v)));
                    }
                }
                let x = rule(e, v, &incoming);
                set(&mut into_first, &mut into_second, e, w, x);
            }
        }
    }
    Messages { edges: g.edges().to_vec(), into_first, into_second }
}

/// Ψ of an unpinned model on a forest: adjacent influences −μ_j/(1−μ_i),
/// extended along the unique conflict path by the product rule.
pub fn tree_influence_fast(m: &ModelInstance) -> Result<LabeledMatrix> {
    let n = m.n_elements();
    let rows: Vec<usize> = (0..n).collect();
    let (_, psi) = tree_influence_rows(m, &rows)?;
    Ok(LabeledMatrix::new(rows, psi))
}

/// Selected rows of Ψ on a forest (all columns), plus the marginals.
pub fn tree_influence_rows(m: &ModelInstance, rows: &[usize]) -> Result<(Vec<f64>, Matrix)> {
    let mu = tree_marginals(m)?;
    let n = m.n_elements();
    let conflicts = m.conflicts();
    let mut out = Matrix::zeros(rows.len(), n);
    let mut value = vec![0.0; n];
    let mut seen = vec![false; n];
    for (r, &i) in rows.iter().enumerate() {
        value.fill(0.0);
        seen.fill(false);
        value[i] = 1.0;
        seen[i] = true;
        let mut queue = VecDeque::from([i]);
        while let Some(p) = queue.pop_front() {
            for &j in &conflicts[p] {
                if !seen[j] {
                    seen[j] = true;
                    value[j] = value[p] * (-mu[j] / (1.0 - mu[p]));
                    queue.push_back(j);
                }
            }
        }
        out.row_mut(r).copy_from_slice(&value);
    }
    Ok((mu, out))
}

/// Ψ^sym = Π^{1/2} Ψ Π^{-1/2} from Ψ and the marginals, symmetrized.
pub fn symmetrize_influence(psi: &Matrix, marginals: &[f64]) -> Matrix {
    let root: Vec<f64> = marginals.iter().map(|p| (p * (1.0 - p)).sqrt()).collect();
    let inv: Vec<f64> = root.iter().map(|x| 1.0 / x).collect();
    psi.scale_rows_cols(&root, &inv).symmetrized()
}

/// s_k = Σ_{dist(e,f)=k} |Ψ(e,f)| for k = 0, 1, ...
pub fn decay_profile(m: &ModelInstance, e: usize) -> Result<Vec<(usize, f64)>> {
    let row: Vec<f64> = if m.graph().is_forest() && m.pinning().is_empty() {
        tree_influence_rows(m, &[e])?.1.row(0).to_vec()
    } else {
        let inf = Influences::from_model(m, DEFAULT_CONFIG_CAP)?;
        let a = inf.index.iter().position(|&x| x == e).ok_or(Error::DegenerateElement { element: e })?;
        let mut row = vec![0.0; m.n_elements()];
        for (b, &j) in inf.index.iter().enumerate() {
            row[j] = inf.psi[(a, b)];
        }
        row
    };
    let dist = m.element_distances(e);
    let max = dist.iter().copied().filter(|&d| d != usize::MAX).max().unwrap_or(0);
    let mut s = vec![0.0; max + 1];
    for (j, &d) in dist.iter().enumerate() {
        if d != usize::MAX {
            s[d] += row[j].abs();
        }
    }
    Ok(s.into_iter().enumerate().collect())
}

/// δ = 1 − √(1 − 2/(√(1+λΔ)+1)), the decay rate of monomer-dimer influences.
pub fn decay_rate(lambda: f64, max_degree: usize) -> f64 {
    let s = (1.0 + lambda * max_degree as f64).sqrt();
    1.0 - (1.0 - 2.0 / (s + 1.0)).sqrt()
}

/// Worst slack of s_k ≤ 2(1−δ)^k over every edge of a monomer-dimer tree
/// (negative means a violation).
pub fn decay_check(m: &ModelInstance) -> Result<f64> {
    if m.kind() != ModelKind::MonomerDimer {
        return Err(Error::InvalidModel("the decay bound concerns the monomer-dimer model".into()));
    }
    if !m.graph().is_tree() {
        return Err(Error::NotATree);
    }
    let delta = decay_rate(m.max_fugacity(), m.graph().max_degree());
    let mut worst = f64::INFINITY;
    for e in 0..m.n_elements() {
        for (k, s) in decay_profile(m, e)? {
            worst = worst.min(2.0 * (1.0 - delta).powi(k as i32) - s);
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathTreeReport {
    pub max_deviation: f64,
    pub path_tree_size: usize,
}

/// Compare Ψ(e, f) on a monomer-dimer model with Σ_{f' ∈ χ^{-1}(f)} Ψ^u(e, f')
/// on the path-tree from `u`, for e ∈ E_u and every f.
pub fn path_tree_influence_check(m: &ModelInstance, u: usize, node_cap: usize) -> Result<PathTreeReport> {
    if m.kind() != ModelKind::MonomerDimer || !m.pinning().is_empty() {
        return Err(Error::InvalidModel("path-tree identity needs an unpinned monomer-dimer model".into()));
    }
    let g = m.graph();
    let inf = Influences::from_model(m, DEFAULT_CONFIG_CAP)?;
    let pt = path_tree(g, u, node_cap)?;
    let lam: Vec<f64> = pt.chi.iter().map(|&f| m.fugacity()[f]).collect();
    let tm = ModelInstance::new(ModelKind::MonomerDimer, pt.tree.clone(), lam)?;
    let root_rows: Vec<usize> = g.incident(u).iter().map(|&e| pt.root_copy(e).expect("root copy exists")).collect();
    let (_, rows) = tree_influence_rows(&tm, &root_rows)?;
    let mut worst: f64 = 0.0;
    for (r, &e) in g.incident(u).iter().enumerate() {
        let mut folded = vec![0.0; g.m()];
        for (t, &f) in pt.chi.iter().enumerate() {
            folded[f] += rows[(r, t)];
        }
        let a = inf.index.iter().position(|&x| x == e).ok_or(Error::DegenerateElement { element: e })?;
        for f in 0..g.m() {
            let direct = inf.index.iter().position(|&x| x == f).map_or(0.0, |b| inf.psi[(a, b)]);
            worst = worst.max((direct - folded[f]).abs());
        }
    }
    Ok(PathTreeReport { max_deviation: worst, path_tree_size: pt.n_paths() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct KTransformReport {
    pub original: f64,
    pub transformed: f64,
    /// |original − transformed|; zero whenever original ≥ 1.
    pub difference: f64,
    /// |max(original, 1) − transformed|. The blow-up adds eigenvalue 1 with
    /// multiplicity n(k−1), so this vanishes for every instance.
    pub union_difference: f64,
}

/// The k-transformed instance: parallel copies with fugacity λ/k for
/// monomer-dimer, cliques with fugacity λ/k for hardcore.
pub fn k_transform_model(m: &ModelInstance, k: usize) -> Result<(ModelInstance, Vec<usize>)> {
    if !m.pinning().is_empty() {
        return Err(Error::InvalidModel("k-transformation of a pinned model".into()));
    }
    let t = match m.kind() {
        ModelKind::MonomerDimer => k_transform_edges(m.graph(), k)?,
        ModelKind::Hardcore => k_transform_vertices(m.graph(), k)?,
    };
    let lam = t.provenance.iter().map(|&i| m.fugacity()[i] / k as f64).collect();
    Ok((ModelInstance::new(m.kind(), t.graph, lam)?, t.provenance))
}

/// λ_max(Ψ^cor) before and after the k-transformation.
pub fn k_transform_cor_check(m: &ModelInstance, k: usize, config_cap: usize) -> Result<KTransformReport> {
    let (mk, _) = k_transform_model(m, k)?;
    let original = Influences::from_model(m, config_cap)?.lambda_max_cor()?;
    let transformed = Influences::from_model(&mk, config_cap)?.lambda_max_cor()?;
    Ok(KTransformReport {
        original,
        transformed,
        difference: (original - transformed).abs(),
        union_difference: (original.max(1.0) - transformed).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators;

    fn md(g: Multigraph, lambda: f64) -> ModelInstance {
        ModelInstance::monomer_dimer(g, lambda).unwrap()
    }

    #[test]
    fn two_edge_path_values() {
        let m = md(generators::path(3), 1.0);
        let inf = Influences::from_model(&m, 100).unwrap();
        assert_eq!(inf.psi[(0, 0)], 1.0);
        assert!((inf.psi[(0, 1)] + 0.5).abs() < 1e-15);
        assert!((inf.sym[(0, 1)] + 0.5).abs() < 1e-15);
        assert!((inf.psi().inf_norm() - 1.5).abs() < 1e-15);
        let single = Influences::from_model(&md(generators::path(2), 1.0), 10).unwrap();
        assert_eq!(single.cor[(0, 0)], 0.5);
        let profile = decay_profile(&m, 0).unwrap();
        assert_eq!(profile.len(), 2);
        assert!((profile[1].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hardcore_edge_values() {
        let m = ModelInstance::hardcore(generators::path(2), 1.0).unwrap();
        let inf = Influences::from_model(&m, 10).unwrap();
        assert!((inf.psi[(0, 1)] + 0.5).abs() < 1e-15);
        assert!((inf.sym[(0, 1)] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn fast_path_matches_enumeration_on_small_trees() {
        let g = Multigraph::new(7, vec![(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
        for kind in [ModelKind::MonomerDimer, ModelKind::Hardcore] {
            let m = ModelInstance::uniform(kind, g.clone(), 1.7).unwrap();
            let slow = Influences::from_model(&m, 10_000).unwrap();
            let fast = tree_influence_fast(&m).unwrap();
            assert_eq!(fast.index, slow.index);
            assert!(fast.matrix.max_abs_diff(&slow.psi) < 1e-12);
            let mu = tree_marginals(&m).unwrap();
            for (a, &p) in slow.marginals.iter().enumerate() {
                assert!((mu[a] - p).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn path_tree_identity_on_small_cycles() {
        let c4 = generators::cycle(4).unwrap();
        let r = path_tree_influence_check(&md(c4, 1.0), 0, 1000).unwrap();
        assert!(r.max_deviation < 1e-10);
        let mut edges = generators::cycle(5).unwrap().edges().to_vec();
        edges.push((0, 5));
        let c5p = Multigraph::new(6, edges).unwrap();
        for u in 0..6 {
            let r = path_tree_influence_check(&md(c5p.clone(), 2.0), u, 1000).unwrap();
            assert!(r.max_deviation < 1e-10, "u = {u}: {}", r.max_deviation);
        }
    }

    #[test]
    fn k_transform_preserves_cor_spectrum() {
        // Single edge: Ψ^cor = [[1/2]]; the 2-blow-up is [[3/4,-1/4],[-1/4,3/4]].
        let r = k_transform_cor_check(&md(generators::path(2), 1.0), 2, 1000).unwrap();
        assert!((r.original - 0.5).abs() < 1e-14);
        assert!((r.transformed - 1.0).abs() < 1e-12);
        assert!(r.union_difference < 1e-12);
        let r = k_transform_cor_check(&md(generators::path(3), 2.0), 2, 1000).unwrap();
        assert!(r.union_difference < 1e-8);
        let hc = ModelInstance::hardcore(generators::path(3), 0.8).unwrap();
        assert!(k_transform_cor_check(&hc, 3, 100_000).unwrap().union_difference < 1e-8);
        let m = md(generators::path(3), 1.0);
        let r = k_transform_cor_check(&m, 1, 1000).unwrap();
        assert_eq!(r.original, r.transformed);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let m = md(generators::star(3), 0.37);
        let psi = influence_matrix(&m).unwrap();
        assert_eq!(LabeledMatrix::from_csv(&psi.to_csv()).unwrap(), psi);
    }
}
