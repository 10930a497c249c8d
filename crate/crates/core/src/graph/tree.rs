use std::collections::VecDeque;

use super::Multigraph;
use crate::error::{Error, Result};

/// A tree with a chosen root. `order` is a BFS order starting at the root, so
/// every parent precedes its children.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    /// Edge id joining a vertex to its parent.
    pub parent_edge: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    pub order: Vec<usize>,
}

impl RootedTree {
    pub fn new(g: &Multigraph, root: usize) -> Result<Self> {
        if !g.is_tree() || root >= g.n() {
            return Err(Error::NotATree);
        }
        let n = g.n();
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &e in g.incident(u) {
                let w = g.other(e, u);
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    parent_edge[w] = Some(e);
                    depth[w] = depth[u] + 1;
                    children[u].push(w);
                    queue.push_back(w);
                }
            }
        }
        Ok(RootedTree { root, parent, parent_edge, children, depth, order })
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }
}
