use super::model::{ModelInstance, ModelKind, State};
use super::oracle::{enumerate, DEFAULT_CONFIG_CAP};
use crate::error::{Error, Result};
use crate::graph::Multigraph;

/// Z by tree DP on forests, by enumeration otherwise.
pub fn partition_function(m: &ModelInstance) -> Result<f64> {
    if m.graph().is_forest() {
        Ok(log_partition_function_forest(m)?.exp())
    } else {
        Ok(enumerate(m, DEFAULT_CONFIG_CAP)?.partition_function())
    }
}

/// ln Z for a model on a forest, honoring the pinning as boundary conditions.
/// Per-vertex normalization keeps the DP finite on large trees.
pub fn log_partition_function_forest(m: &ModelInstance) -> Result<f64> {
    let g = m.graph();
    if !g.is_forest() {
        return Err(Error::NotAForest);
    }
    let order = forest_postorder(g);
    let mut log_z = 0.0;
    // (a, b): relative weights of the two root states of each subtree.
    let mut ab = vec![(0.0f64, 0.0f64); g.n()];
    let lam = m.fugacity();
    let pin = m.pinning();
    for &(v, parent_edge) in &order {
        let children = g.incident(v).iter().copied().filter(|&e| Some(e) != parent_edge);
        let (a, b) = match m.kind() {
            ModelKind::MonomerDimer => {
                // a: v not matched downward; b: v matched to a child.
                let mut a = 1.0;
                let mut b = 0.0;
                for e in children {
                    let c = g.other(e, v);
                    let (ca, cb) = ab[c];
                    let unused = if pin.state(e) == Some(State::Occupied) { 0.0 } else { ca + cb };
                    let used = if pin.state(e) == Some(State::Unoccupied) { 0.0 } else { lam[e] * ca };
                    b = b * unused + a * used;
                    a *= unused;
                }
                (a, b)
            }
            ModelKind::Hardcore => {
                // a: v unoccupied; b: v occupied.
                let mut a = 1.0;
                let mut b = lam[v];
                for e in children {
                    let (ca, cb) = ab[g.other(e, v)];
                    a *= ca + cb;
                    b *= ca;
                }
                match pin.state(v) {
                    Some(State::Occupied) => a = 0.0,
                    Some(State::Unoccupied) => b = 0.0,
                    None => {}
                }
                (a, b)
            }
        };
        let s = a + b;
        if s <= 0.0 {
            return Err(Error::EmptySupport);
        }
        log_z += s.ln();
        ab[v] = (a / s, b / s);
    }
    Ok(log_z)
}

/// Vertices of every component in post-order, each with its parent edge.
fn forest_postorder(g: &Multigraph) -> Vec<(usize, Option<usize>)> {
    let mut seen = vec![false; g.n()];
    let mut out = Vec::with_capacity(g.n());
    for root in 0..g.n() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut pre = vec![(root, None)];
        let mut k = 0;
        while k < pre.len() {
            let (v, _) = pre[k];
            for &e in g.incident(v) {
                let w = g.other(e, v);
                if !seen[w] {
                    seen[w] = true;
                    pre.push((w, Some(e)));
                }
            }
            k += 1;
        }
        out.extend(pre.into_iter().rev());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gibbs::Pinning;

    #[test]
    fn simple_values() {
        let single = Multigraph::new(1, vec![]).unwrap();
        let hc = ModelInstance::hardcore(single, 2.5).unwrap();
        assert!((partition_function(&hc).unwrap() - 3.5).abs() < 1e-14);
        let empty = Multigraph::new(0, vec![]).unwrap();
        assert_eq!(partition_function(&ModelInstance::monomer_dimer(empty, 1.0).unwrap()).unwrap(), 1.0);
        let p3 = Multigraph::new(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!((partition_function(&ModelInstance::monomer_dimer(p3, 1.0).unwrap()).unwrap() - 5.0).abs() < 1e-13);
    }

    #[test]
    fn pinned_dp_matches_enumeration() {
        let g = Multigraph::new(6, vec![(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        let md = ModelInstance::new(ModelKind::MonomerDimer, g.clone(), vec![0.5, 1.0, 2.0, 3.0, 0.7])
            .unwrap()
            .with_pinning(Pinning { occupied: [3].into(), unoccupied: [0].into() })
            .unwrap();
        let hc = ModelInstance::hardcore(g, 1.3)
            .unwrap()
            .with_pinning(Pinning { occupied: [4].into(), unoccupied: [1].into() })
            .unwrap();
        for m in [md, hc] {
            let dp = log_partition_function_forest(&m).unwrap().exp();
            let en = enumerate(&m, 1000).unwrap().partition_function();
            assert!((dp - en).abs() < 1e-12 * en);
        }
    }
}
