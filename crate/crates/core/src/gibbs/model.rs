use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::Multigraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Weighted matchings; the elements are edges.
    MonomerDimer,
    /// Weighted independent sets; the elements are vertices.
    Hardcore,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::MonomerDimer => "monomer-dimer",
            ModelKind::Hardcore => "hardcore",
        }
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        match s {
            "monomer-dimer" | "matching" | "md" => Some(ModelKind::MonomerDimer),
            "hardcore" | "hc" => Some(ModelKind::Hardcore),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum State {
    Occupied,
    Unoccupied,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pinning {
    pub occupied: BTreeSet<usize>,
    pub unoccupied: BTreeSet<usize>,
}

impl Pinning {
    pub fn none() -> Self {
        Pinning::default()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty() && self.unoccupied.is_empty()
    }

    pub fn is_pinned(&self, i: usize) -> bool {
        self.occupied.contains(&i) || self.unoccupied.contains(&i)
    }

    pub fn state(&self, i: usize) -> Option<State> {
        if self.occupied.contains(&i) {
            Some(State::Occupied)
        } else if self.unoccupied.contains(&i) {
            Some(State::Unoccupied)
        } else {
            None
        }
    }
}

/// A monomer-dimer or hardcore model on a multigraph with per-element
/// fugacities and an optional pinning.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelInstance {
    kind: ModelKind,
    graph: Multigraph,
    fugacity: Vec<f64>,
    pinning: Pinning,
}

impl ModelInstance {
    pub fn new(kind: ModelKind, graph: Multigraph, fugacity: Vec<f64>) -> Result<Self> {
        let n = match kind {
            ModelKind::MonomerDimer => graph.m(),
            ModelKind::Hardcore => graph.n(),
        };
        if fugacity.len() != n {
            return Err(Error::InvalidModel(format!("expected {n} fugacities, got {}", fugacity.len())));
        }
        if let Some(i) = fugacity.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidModel(format!("fugacity of element {i} is {} (must be positive)", fugacity[i])));
        }
        Ok(ModelInstance { kind, graph, fugacity, pinning: Pinning::none() })
    }

    pub fn uniform(kind: ModelKind, graph: Multigraph, lambda: f64) -> Result<Self> {
        let n = match kind {
            ModelKind::MonomerDimer => graph.m(),
            ModelKind::Hardcore => graph.n(),
        };
        ModelInstance::new(kind, graph, vec![lambda; n])
    }

    pub fn monomer_dimer(graph: Multigraph, lambda: f64) -> Result<Self> {
        ModelInstance::uniform(ModelKind::MonomerDimer, graph, lambda)
    }

    pub fn hardcore(graph: Multigraph, lambda: f64) -> Result<Self> {
        ModelInstance::uniform(ModelKind::Hardcore, graph, lambda)
    }

    pub fn with_pinning(mut self, pinning: Pinning) -> Result<Self> {
        let n = self.n_elements();
        if let Some(&i) = pinning.occupied.iter().chain(&pinning.unoccupied).find(|&&i| i >= n) {
            return Err(Error::InvalidModel(format!("pinned element {i} out of range")));
        }
        if let Some(i) = pinning.occupied.intersection(&pinning.unoccupied).next() {
            return Err(Error::InvalidModel(format!("element {i} pinned both ways")));
        }
        let occ: Vec<usize> = pinning.occupied.iter().copied().collect();
        for (a, &i) in occ.iter().enumerate() {
            for &j in &occ[a + 1..] {
                if self.conflict(i, j) {
                    return Err(Error::InvalidModel(format!("pinned elements {i} and {j} conflict")));
                }
            }
        }
        self.pinning = pinning;
        Ok(self)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn graph(&self) -> &Multigraph {
        &self.graph
    }

    pub fn fugacity(&self) -> &[f64] {
        &self.fugacity
    }

    pub fn pinning(&self) -> &Pinning {
        &self.pinning
    }

    pub fn n_elements(&self) -> usize {
        self.fugacity.len()
    }

    /// Unpinned elements in increasing order.
    pub fn unpinned(&self) -> Vec<usize> {
        (0..self.n_elements()).filter(|&i| !self.pinning.is_pinned(i)).collect()
    }

    /// Whether two distinct elements cannot be occupied together.
    pub fn conflict(&self, i: usize, j: usize) -> bool {
        i != j
            && match self.kind {
                ModelKind::MonomerDimer => self.graph.shares_endpoint(i, j),
                ModelKind::Hardcore => self.graph.neighbors(i).any(|w| w == j),
            }
    }

    /// Adjacency lists of the conflict graph (line graph or the graph itself),
    /// without duplicates.
    pub fn conflicts(&self) -> Vec<Vec<usize>> {
        let g = &self.graph;
        let mut adj: Vec<Vec<usize>> = match self.kind {
            ModelKind::MonomerDimer => (0..g.m())
                .map(|e| {
                    let (a, b) = g.edge(e);
                    g.incident(a).iter().chain(g.incident(b)).copied().filter(|&f| f != e).collect()
                })
                .collect(),
            ModelKind::Hardcore => (0..g.n()).map(|v| g.neighbors(v).collect()).collect(),
        };
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Conflict-graph distances from element `i` (`usize::MAX` if unreachable).
    pub fn element_distances(&self, i: usize) -> Vec<usize> {
        match self.kind {
            ModelKind::MonomerDimer => self.graph.line_distances(i),
            ModelKind::Hardcore => self.graph.bfs_distances(i),
        }
    }

    /// Every fugacity multiplied by `theta`; realizes the tilted distribution.
    pub fn tilt(&self, theta: f64) -> Result<ModelInstance> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidModel(format!("tilt factor {theta} must be positive")));
        }
        let mut m = self.clone();
        for x in &mut m.fugacity {
            *x *= theta;
        }
        Ok(m)
    }

    pub fn max_fugacity(&self) -> f64 {
        self.fugacity.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let g = Multigraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        assert!(ModelInstance::new(ModelKind::MonomerDimer, g.clone(), vec![1.0]).is_err());
        assert!(ModelInstance::new(ModelKind::MonomerDimer, g.clone(), vec![1.0, 0.0]).is_err());
        let m = ModelInstance::monomer_dimer(g.clone(), 1.0).unwrap();
        let both = Pinning { occupied: [0, 1].into(), unoccupied: Default::default() };
        assert!(m.clone().with_pinning(both).is_err());
        let twice = Pinning { occupied: [0].into(), unoccupied: [0].into() };
        assert!(m.clone().with_pinning(twice).is_err());
        let h = ModelInstance::hardcore(g, 1.0).unwrap();
        assert!(h.conflict(0, 1) && !h.conflict(0, 2));
        assert_eq!(h.conflicts()[1], vec![0, 2]);
    }

    #[test]
    fn tilt_scales_fugacities() {
        let g = Multigraph::new(2, vec![(0, 1)]).unwrap();
        let m = ModelInstance::monomer_dimer(g, 2.0).unwrap();
        assert_eq!(m.tilt(1.0).unwrap(), m);
        assert_eq!(m.tilt(0.5).unwrap().fugacity(), &[1.0]);
        assert!(m.tilt(0.0).is_err());
    }
}
