//! Graph families used by tests, scenarios and benchmarks.

use std::collections::HashSet;

use rand::Rng;

use super::{k_transform_edges, Multigraph};
use crate::error::{Error, Result};

pub fn path(n: usize) -> Multigraph {
    Multigraph::new(n, (1..n).map(|i| (i - 1, i)).collect()).expect("valid path")
}

pub fn cycle(n: usize) -> Result<Multigraph> {
    if n < 3 {
        return Err(Error::InvalidGraph(format!("cycle needs at least 3 vertices, got {n}")));
    }
    Multigraph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect())
}

/// Star with center 0 and `d` leaves.
pub fn star(d: usize) -> Multigraph {
    Multigraph::new(d + 1, (1..=d).map(|i| (0, i)).collect()).expect("valid star")
}

pub fn complete(n: usize) -> Multigraph {
    Multigraph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()).expect("valid clique")
}

/// Complete `d`-ary tree of the given height, labeled in BFS order from root 0.
pub fn complete_ary_tree(d: usize, height: usize) -> Multigraph {
    let mut edges = Vec::new();
    let mut level = vec![0usize];
    let mut next_id = 1;
    for _ in 0..height {
        let mut next = Vec::with_capacity(level.len() * d);
        for &p in &level {
            for _ in 0..d {
                edges.push((p, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        level = next;
    }
    Multigraph::new(next_id, edges).expect("valid tree")
}

/// Number of vertices of the complete `d`-ary tree of height `h`.
pub fn complete_ary_size(d: usize, h: usize) -> usize {
    (0..=h).map(|i| d.pow(i as u32)).sum()
}

/// Largest height whose complete `d`-ary tree has at most `max_vertices`.
pub fn complete_ary_height_within(d: usize, max_vertices: usize) -> usize {
    match d {
        0 => return 0,
        1 => return max_vertices.saturating_sub(1),
        _ => {}
    }
    let (mut h, mut size, mut level) = (0, 1, 1);
    loop {
        level *= d;
        if size + level > max_vertices {
            return h;
        }
        size += level;
        h += 1;
    }
}

/// Uniform labeled tree on `n` vertices from a random Prüfer sequence.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Multigraph {
    if n <= 2 {
        return path(n);
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    for &x in &seq {
        let leaf = leaves.pop_first().expect("Prüfer decoding always has a leaf");
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.insert(x);
        }
    }
    let last: Vec<usize> = leaves.into_iter().collect();
    edges.push((last[0], last[1]));
    Multigraph::new(n, edges).expect("valid tree")
}

/// Random recursive tree where each new vertex attaches to a uniformly chosen
/// earlier vertex of degree below `max_degree`.
pub fn random_tree_bounded<R: Rng + ?Sized>(n: usize, max_degree: usize, rng: &mut R) -> Result<Multigraph> {
    if max_degree < 2 && n > 2 {
        return Err(Error::InvalidGraph("a tree on more than 2 vertices needs max degree >= 2".into()));
    }
    let mut degree = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| degree[u] < max_degree).collect();
        let u = open[rng.random_range(0..open.len())];
        degree[u] += 1;
        degree[v] += 1;
        edges.push((u, v));
    }
    Multigraph::new(n, edges)
}

/// `C_n` with every edge replaced by `k` parallel copies.
pub fn parallel_cycle(n: usize, k: usize) -> Result<Multigraph> {
    Ok(k_transform_edges(&cycle(n)?, k)?.graph)
}

/// Cycle `C_g` (vertices `0..g`) with `extra` further vertices hung as random
/// pendant trees, keeping every degree at most `max_degree`.
pub fn cycle_with_pendants<R: Rng + ?Sized>(g: usize, extra: usize, max_degree: usize, rng: &mut R) -> Result<Multigraph> {
    if max_degree < 3 && extra > 0 {
        return Err(Error::InvalidGraph("pendant trees on a cycle need max degree >= 3".into()));
    }
    let base = cycle(g)?;
    let mut edges = base.edges().to_vec();
    let mut degree = vec![2usize; g + extra];
    for v in g..g + extra {
        degree[v] = 0;
        let open: Vec<usize> = (0..v).filter(|&u| degree[u] < max_degree).collect();
        let u = open[rng.random_range(0..open.len())];
        degree[u] += 1;
        degree[v] += 1;
        edges.push((u, v));
    }
    Multigraph::new(g + extra, edges)
}

/// One representative of every isomorphism class of simple graphs on `n`
/// vertices (`n <= 7`).
pub fn all_graphs(n: usize) -> Vec<Multigraph> {
    assert!(n <= 7, "isomorphism-class enumeration is limited to 7 vertices");
    let mut classes: Vec<u32> = vec![0];
    for k in 1..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        let prev_pairs = pair_list(k - 1);
        for &code in &classes {
            let base: Vec<(usize, usize)> =
                prev_pairs.iter().enumerate().filter(|&(b, _)| code >> b & 1 == 1).map(|(_, &p)| p).collect();
            for mask in 0u32..(1 << (k - 1)) {
                let mut edges = base.clone();
                edges.extend((0..k - 1).filter(|&v| mask >> v & 1 == 1).map(|v| (v, k - 1)));
                let c = canonical_code(k, &edges);
                if seen.insert(c) {
                    next.push(c);
                }
            }
        }
        classes = next;
    }
    let pairs = pair_list(n);
    classes.sort_unstable();
    classes
        .into_iter()
        .map(|code| {
            let edges = pairs.iter().enumerate().filter(|&(b, _)| code >> b & 1 == 1).map(|(_, &p)| p).collect();
            Multigraph::new(n, edges).expect("valid simple graph")
        })
        .collect()
}

/// Connected isomorphism classes on `n` vertices.
pub fn connected_graphs(n: usize) -> Vec<Multigraph> {
    all_graphs(n).into_iter().filter(Multigraph::is_connected).collect()
}

fn pair_list(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Minimum adjacency code over relabelings that sort vertices by degree.
fn canonical_code(n: usize, edges: &[(usize, usize)]) -> u32 {
    let mut adj = vec![vec![false; n]; n];
    let mut deg = vec![0usize; n];
    for &(u, v) in edges {
        adj[u][v] = true;
        adj[v][u] = true;
        deg[u] += 1;
        deg[v] += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| deg[v]);
    // Blocks of equal degree may be permuted freely.
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match blocks.last_mut() {
            Some(b) if deg[b[0]] == deg[v] => b.push(v),
            _ => blocks.push(vec![v]),
        }
    }
    let pairs = pair_list(n);
    let mut best = u32::MAX;
    let mut label = Vec::with_capacity(n);
    permute_blocks(&mut blocks, 0, &mut label, &mut |label: &[usize]| {
        let mut code = 0u32;
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if adj[label[i]][label[j]] {
                code |= 1 << b;
            }
        }
        best = best.min(code);
    });
    best
}

fn permute_blocks(blocks: &mut [Vec<usize>], bi: usize, label: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if bi == blocks.len() {
        visit(label);
        return;
    }
    let len = blocks[bi].len();
    heap_permutations(blocks, bi, len, label, visit);
}

fn heap_permutations(blocks: &mut [Vec<usize>], bi: usize, k: usize, label: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        let start = label.len();
        label.extend_from_slice(&blocks[bi]);
        permute_blocks(blocks, bi + 1, label, visit);
        label.truncate(start);
        return;
    }
    heap_permutations(blocks, bi, k - 1, label, visit);
    for i in 0..k - 1 {
        let j = if k % 2 == 0 { i } else { 0 };
        blocks[bi].swap(j, k - 1);
        heap_permutations(blocks, bi, k - 1, label, visit);
    }
}
