use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Undirected multigraph on vertices `0..n`. Parallel edges are allowed,
/// self-loops are not. Edge ids are positions in `edges`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    incident: Vec<Vec<usize>>,
}

impl Multigraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut incident = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge {id} = ({u},{v}) has an endpoint >= {n}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("edge {id} is a self-loop at {u}")));
            }
            incident[u].push(id);
            incident[v].push(id);
        }
        Ok(Multigraph { n, edges, incident })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Edge ids incident to `v`, in increasing order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn other(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            debug_assert_eq!(b, v);
            a
        }
    }

    /// Neighbors with multiplicity, ordered by edge id.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.incident[v].iter().map(move |&e| self.other(e, v))
    }

    pub fn has_parallel_edges(&self) -> bool {
        let mut seen: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        seen.sort_unstable();
        seen.windows(2).any(|w| w[0] == w[1])
    }

    pub fn shares_endpoint(&self, e: usize, f: usize) -> bool {
        let (a, b) = self.edges[e];
        let (c, d) = self.edges[f];
        a == c || a == d || b == c || b == d
    }

    /// BFS distances from `src`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for w in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    pub fn is_forest(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.m() + 1 == self.n && self.is_forest()
    }

    /// Length of a shortest cycle; `None` for forests. Parallel edges form a
    /// cycle of length 2.
    pub fn girth(&self) -> Option<usize> {
        if self.has_parallel_edges() {
            return Some(2);
        }
        let mut best = usize::MAX;
        for s in 0..self.n {
            let mut dist = vec![usize::MAX; self.n];
            let mut via = vec![usize::MAX; self.n];
            dist[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                if 2 * dist[u] + 1 >= best {
                    break;
                }
                for &e in self.incident(u) {
                    if e == via[u] {
                        continue;
                    }
                    let w = self.other(e, u);
                    if dist[w] == usize::MAX {
                        dist[w] = dist[u] + 1;
                        via[w] = e;
                        queue.push_back(w);
                    } else {
                        best = best.min(dist[u] + dist[w] + 1);
                    }
                }
            }
        }
        (best != usize::MAX).then_some(best)
    }

    /// Edge distances from `src` in the line graph (edges sharing an endpoint
    /// are at distance 1); `usize::MAX` marks unreachable edges.
    pub fn line_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.m()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(e) = queue.pop_front() {
            let (a, b) = self.edges[e];
            for &f in self.incident[a].iter().chain(&self.incident[b]) {
                if dist[f] == usize::MAX {
                    dist[f] = dist[e] + 1;
                    queue.push_back(f);
                }
            }
        }
        dist
    }

    pub fn line_distance(&self, e: usize, f: usize) -> Result<usize> {
        match self.line_distances(e)[f] {
            usize::MAX => Err(Error::Disconnected(e, f)),
            d => Ok(d),
        }
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> Result<usize> {
        match self.bfs_distances(u)[v] {
            usize::MAX => Err(Error::Disconnected(u, v)),
            d => Ok(d),
        }
    }

    /// Distance from a vertex to an edge: the nearer endpoint.
    pub fn vertex_edge_distance(dist: &[usize], edge: (usize, usize)) -> usize {
        dist[edge.0].min(dist[edge.1])
    }

    /// The graph with edge `e` deleted. Edge ids above `e` shift down by one.
    pub fn without_edge(&self, e: usize) -> Multigraph {
        let edges = self.edges.iter().enumerate().filter(|&(id, _)| id != e).map(|(_, &x)| x).collect();
        Multigraph::new(self.n, edges).expect("subgraph of a valid graph")
    }

    /// Text format: a header line `n m` then `m` lines `u v`. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Multigraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let [n, m] = parse_pair(hline, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, l) in lines {
            let [u, v] = parse_pair(line, l)?;
            edges.push((u, v));
        }
        if edges.len() != m {
            return Err(Error::Parse { line: hline, msg: format!("header declares {m} edges, found {}", edges.len()) });
        }
        Multigraph::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for &(u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

fn parse_pair(line: usize, l: &str) -> Result<[usize; 2]> {
    let nums: Vec<&str> = l.split_whitespace().collect();
    if nums.len() != 2 {
        return Err(Error::Parse { line, msg: format!("expected two integers, got {l:?}") });
    }
    let p = |s: &str| s.parse::<usize>().map_err(|e| Error::Parse { line, msg: format!("{s:?}: {e}") });
    Ok([p(nums[0])?, p(nums[1])?])
}
