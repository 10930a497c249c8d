use super::{Multigraph, RootedTree};
use crate::error::{Error, Result};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

/// Tree of self-avoiding paths of a graph starting at a fixed vertex.
///
/// Tree vertex `0` is the trivial path; the others are created in DFS
/// preorder with children sorted by (next vertex, edge id), so vertex ids
/// follow the lexicographic order of the paths. Tree edge `i` joins vertex
/// `i + 1` to its parent.
#[derive(Clone, Debug)]
pub struct PathTree {
    pub source: usize,
    pub tree: Multigraph,
    pub rooted: RootedTree,
    /// Original edge behind each tree edge.
    pub chi: Vec<usize>,
    /// Last vertex of the path represented by each tree vertex.
    pub end_vertex: Vec<usize>,
}

impl PathTree {
    pub fn n_paths(&self) -> usize {
        self.end_vertex.len()
    }

    /// The tree edge incident to the root that copies original edge `e`.
    pub fn root_copy(&self, e: usize) -> Option<usize> {
        self.tree.incident(0).iter().copied().find(|&t| self.chi[t] == e)
    }

    /// All tree edges mapped onto original edge `f`.
    pub fn preimage(&self, f: usize) -> Vec<usize> {
        (0..self.chi.len()).filter(|&t| self.chi[t] == f).collect()
    }

    /// Whether tree edge `t` lies in the branch hanging off root edge `r`
    /// (including `r` itself).
    pub fn in_branch(&self, t: usize, r: usize) -> bool {
        let mut v = t + 1;
        loop {
            let e = self.rooted.parent_edge[v].expect("non-root vertex");
            if self.rooted.parent[v] == Some(0) {
                return e == r;
            }
            v = self.rooted.parent[v].expect("non-root vertex");
        }
    }

    /// Path-tree depth of tree edge `t` measured from the root vertex: the
    /// distance to its nearer endpoint.
    pub fn edge_depth(&self, t: usize) -> usize {
        self.rooted.depth[t + 1] - 1
    }
}

pub fn path_tree(g: &Multigraph, u: usize, node_cap: usize) -> Result<PathTree> {
    if u >= g.n() {
        return Err(Error::InvalidGraph(format!("vertex {u} out of range")));
    }
    let mut tree_edges: Vec<(usize, usize)> = Vec::new();
    let mut chi = Vec::new();
    let mut end_vertex = vec![u];
    let mut on_path = vec![false; g.n()];
    on_path[u] = true;

    // Stack frames: (tree vertex, sorted candidate extensions, next index).
    let sorted_ext = |v: usize, on_path: &[bool]| {
        let mut ext: Vec<(usize, usize)> =
            g.incident(v).iter().map(|&e| (g.other(e, v), e)).filter(|&(w, _)| !on_path[w]).collect();
        ext.sort_unstable();
        ext
    };
    let mut stack = vec![(0usize, sorted_ext(u, &on_path), 0usize)];
    while let Some(frame) = stack.last_mut() {
        let (tv, ref ext, ref mut next) = *frame;
        if *next == ext.len() {
            on_path[end_vertex[tv]] = false;
            stack.pop();
            continue;
        }
        let (w, e) = ext[*next];
        *next += 1;
        let child = end_vertex.len();
        if child >= node_cap {
            return Err(Error::CapExceeded { what: "path-tree size", cap: node_cap });
        }
        end_vertex.push(w);
        tree_edges.push((tv, child));
        chi.push(e);
        on_path[w] = true;
        let ext = sorted_ext(w, &on_path);
        stack.push((child, ext, 0));
    }
    let tree = Multigraph::new(end_vertex.len(), tree_edges)?;
    let rooted = RootedTree::new(&tree, 0)?;
    Ok(PathTree { source: u, tree, rooted, chi, end_vertex })
}
