use super::Multigraph;
use crate::error::{Error, Result};

/// A k-transformed graph together with the original element behind each new
/// element (edges for the edge surgery, vertices for the vertex surgery).
#[derive(Clone, Debug)]
pub struct KTransform {
    pub graph: Multigraph,
    pub k: usize,
    pub provenance: Vec<usize>,
}

/// Replace every edge by `k` parallel copies. Copy `t` of edge `i` gets id
/// `i * k + t`.
pub fn k_transform_edges(g: &Multigraph, k: usize) -> Result<KTransform> {
    if k == 0 {
        return Err(Error::InvalidGraph("k must be at least 1".into()));
    }
    let mut edges = Vec::with_capacity(g.m() * k);
    let mut provenance = Vec::with_capacity(g.m() * k);
    for (i, &e) in g.edges().iter().enumerate() {
        for _ in 0..k {
            edges.push(e);
            provenance.push(i);
        }
    }
    Ok(KTransform { graph: Multigraph::new(g.n(), edges)?, k, provenance })
}

/// Replace every vertex by a `k`-clique and join cliques of adjacent vertices
/// completely. Copy `t` of vertex `v` gets id `v * k + t`; clique edges come
/// first, then the `k^2` edges of each original edge in order.
pub fn k_transform_vertices(g: &Multigraph, k: usize) -> Result<KTransform> {
    if k == 0 {
        return Err(Error::InvalidGraph("k must be at least 1".into()));
    }
    if g.has_parallel_edges() {
        return Err(Error::InvalidGraph("vertex k-transformation needs a simple graph".into()));
    }
    let mut edges = Vec::with_capacity(g.n() * k * (k - 1) / 2 + g.m() * k * k);
    for v in 0..g.n() {
        for s in 0..k {
            for t in s + 1..k {
                edges.push((v * k + s, v * k + t));
            }
        }
    }
    for &(u, v) in g.edges() {
        for s in 0..k {
            for t in 0..k {
                edges.push((u * k + s, v * k + t));
            }
        }
    }
    let provenance = (0..g.n() * k).map(|x| x / k).collect();
    Ok(KTransform { graph: Multigraph::new(g.n() * k, edges)?, k, provenance })
}
