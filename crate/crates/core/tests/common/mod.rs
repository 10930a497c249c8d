//! Instance generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use approxinv::graph::generators::random_tree;
use approxinv::{ModelInstance, ModelKind, Multigraph, Pinning};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rooted_form(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut kids: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| rooted_form(adj, w, v)).collect();
    kids.sort();
    format!("({})", kids.concat())
}

/// Canonical form of an unrooted tree: the least rooted form over all roots.
fn tree_form(g: &Multigraph) -> String {
    let adj: Vec<Vec<usize>> = (0..g.n()).map(|v| g.neighbors(v).collect()).collect();
    (0..g.n()).map(|r| rooted_form(&adj, r, usize::MAX)).min().unwrap_or_default()
}

/// One tree per isomorphism class on `n` vertices, grown leaf by leaf.
pub fn unlabeled_trees(n: usize) -> Vec<Multigraph> {
    let mut level = vec![Multigraph::new(1, vec![]).unwrap()];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for t in &level {
            for v in 0..t.n() {
                let mut edges = t.edges().to_vec();
                edges.push((v, size - 1));
                let g = Multigraph::new(size, edges).unwrap();
                if seen.insert(tree_form(&g)) {
                    next.push(g);
                }
            }
        }
        level = next;
    }
    if n == 0 {
        return vec![];
    }
    level
}

/// A random tree on `n` vertices with each edge kept with probability 3/4.
pub fn random_forest<R: Rng>(n: usize, r: &mut R) -> Multigraph {
    let t = random_tree(n, r);
    let edges = t.edges().iter().copied().filter(|_| r.random_bool(0.75)).collect();
    Multigraph::new(n, edges).unwrap()
}

/// Random fugacities in [lo, hi) for every element of the model kind.
pub fn random_model<R: Rng>(kind: ModelKind, g: Multigraph, lo: f64, hi: f64, r: &mut R) -> ModelInstance {
    let count = match kind {
        ModelKind::MonomerDimer => g.m(),
        ModelKind::Hardcore => g.n(),
    };
    let lam = (0..count).map(|_| r.random_range(lo..hi)).collect();
    ModelInstance::new(kind, g, lam).unwrap()
}

/// A consistent random pinning: a few elements forced out, and at most one
/// element forced in.
pub fn random_pinning<R: Rng>(m: &ModelInstance, r: &mut R) -> Pinning {
    let n = m.n_elements();
    let mut p = Pinning::none();
    for i in 0..n {
        if r.random_bool(0.2) {
            p.unoccupied.insert(i);
        }
    }
    if n > 0 && r.random_bool(0.5) {
        let i = r.random_range(0..n);
        p.unoccupied.remove(&i);
        p.occupied.insert(i);
    }
    p
}
