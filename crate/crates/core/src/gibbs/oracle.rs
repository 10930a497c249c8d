use super::model::{ModelInstance, ModelKind, State};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const DEFAULT_CONFIG_CAP: usize = 1 << 24;

/// Exact weighted support of a model, with first and second moments.
///
/// Configurations are stored flattened, each one a sorted element list, in
/// lexicographic order.
#[derive(Clone, Debug)]
pub struct GibbsOracle {
    kind: ModelKind,
    n_elements: usize,
    offsets: Vec<usize>,
    elements: Vec<usize>,
    weights: Vec<f64>,
    z: f64,
    /// Σ weight over configurations containing i.
    single: Vec<f64>,
    /// Σ weight over configurations containing i and j.
    pair: Matrix,
    /// Number of configurations containing i.
    count: Vec<usize>,
}

impl GibbsOracle {
    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    pub fn support_size(&self) -> usize {
        self.weights.len()
    }

    pub fn configuration(&self, k: usize) -> &[usize] {
        &self.elements[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn configurations(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        (0..self.support_size()).map(|k| (self.configuration(k), self.weights[k]))
    }

    pub fn partition_function(&self) -> f64 {
        self.z
    }

    pub fn probability(&self, k: usize) -> f64 {
        self.weights[k] / self.z
    }

    pub fn marginal(&self, i: usize) -> f64 {
        self.single[i] / self.z
    }

    pub fn marginals(&self) -> Vec<f64> {
        (0..self.n_elements).map(|i| self.marginal(i)).collect()
    }

    /// Pr[i and j both occupied].
    pub fn joint(&self, i: usize, j: usize) -> f64 {
        self.pair[(i, j)] / self.z
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.joint(i, j) - self.marginal(i) * self.marginal(j)
    }

    /// Pr[j occupied | i in `state`].
    pub fn conditional(&self, j: usize, i: usize, state: State) -> Result<f64> {
        match state {
            State::Occupied => {
                if self.count[i] == 0 {
                    return Err(Error::ZeroProbabilityCondition { element: i });
                }
                Ok(self.pair[(i, j)] / self.single[i])
            }
            State::Unoccupied => {
                if self.count[i] == self.support_size() {
                    return Err(Error::ZeroProbabilityCondition { element: i });
                }
                Ok((self.single[j] - self.pair[(i, j)]) / (self.z - self.single[i]))
            }
        }
    }

    /// Occupied in some but not all configurations. Decided from counts, so
    /// it is exact regardless of rounding in the weights.
    pub fn is_free(&self, i: usize) -> bool {
        self.count[i] > 0 && self.count[i] < self.support_size()
    }

    pub fn free_elements(&self) -> Vec<usize> {
        (0..self.n_elements).filter(|&i| self.is_free(i)).collect()
    }

    /// Expectation of `f` over the support.
    pub fn expect(&self, f: impl Fn(&[usize]) -> f64) -> f64 {
        self.configurations().map(|(c, w)| w * f(c)).sum::<f64>() / self.z
    }

    /// The same support with each weight multiplied by `factor(config)`.
    pub fn reweighted(&self, factor: impl Fn(&[usize]) -> f64) -> GibbsOracle {
        let mut acc = Accumulator::new(self.kind, self.n_elements);
        for (c, w) in self.configurations() {
            acc.push(c, w * factor(c));
        }
        acc.finish()
    }
}

struct Accumulator {
    oracle: GibbsOracle,
}

impl Accumulator {
    fn new(kind: ModelKind, n: usize) -> Self {
        Accumulator {
            oracle: GibbsOracle {
                kind,
                n_elements: n,
                offsets: vec![0],
                elements: Vec::new(),
                weights: Vec::new(),
                z: 0.0,
                single: vec![0.0; n],
                pair: Matrix::zeros(n, n),
                count: vec![0; n],
            },
        }
    }

    fn push(&mut self, config: &[usize], weight: f64) {
        let o = &mut self.oracle;
        o.elements.extend_from_slice(config);
        o.offsets.push(o.elements.len());
        o.weights.push(weight);
    }

    fn finish(mut self) -> GibbsOracle {
        let o = &mut self.oracle;
        let order = {
            let mut idx: Vec<usize> = (0..o.weights.len()).collect();
            let cfg = |k: usize| &o.elements[o.offsets[k]..o.offsets[k + 1]];
            idx.sort_by(|&a, &b| cfg(a).cmp(cfg(b)));
            idx
        };
        let mut offsets = vec![0];
        let mut elements = Vec::with_capacity(o.elements.len());
        let mut weights = Vec::with_capacity(o.weights.len());
        for &k in &order {
            elements.extend_from_slice(&o.elements[o.offsets[k]..o.offsets[k + 1]]);
            offsets.push(elements.len());
            weights.push(o.weights[k]);
        }
        o.offsets = offsets;
        o.elements = elements;
        o.weights = weights;
        for k in 0..o.weights.len() {
            let w = o.weights[k];
            o.z += w;
            let c = &o.elements[o.offsets[k]..o.offsets[k + 1]];
            for (a, &i) in c.iter().enumerate() {
                o.single[i] += w;
                o.count[i] += 1;
                o.pair[(i, i)] += w;
                for &j in &c[a + 1..] {
                    o.pair[(i, j)] += w;
                    o.pair[(j, i)] += w;
                }
            }
        }
        self.oracle
    }
}

/// Enumerate every configuration consistent with the pinning.
pub fn enumerate(m: &ModelInstance, config_cap: usize) -> Result<GibbsOracle> {
    let n = m.n_elements();
    let conflicts = m.conflicts();
    let pin = m.pinning();
    let lambda = m.fugacity();

    let mut blocked = vec![0usize; n];
    let mut base_weight = 1.0;
    for &i in &pin.occupied {
        base_weight *= lambda[i];
        for &j in &conflicts[i] {
            blocked[j] += 1;
        }
    }
    if pin.occupied.iter().any(|&i| blocked[i] > 0) {
        return Err(Error::EmptySupport);
    }
    let free: Vec<usize> = (0..n).filter(|&i| !pin.is_pinned(i) && blocked[i] == 0).collect();

    struct Search<'a> {
        free: &'a [usize],
        conflicts: &'a [Vec<usize>],
        lambda: &'a [f64],
        forced: Vec<usize>,
        blocked: Vec<usize>,
        chosen: Vec<usize>,
        acc: Accumulator,
        cap: usize,
        size: usize,
    }

    impl Search<'_> {
        fn emit(&mut self, weight: f64) -> Result<()> {
            self.size += 1;
            if self.size > self.cap {
                return Err(Error::CapExceeded { what: "support size", cap: self.cap });
            }
            let mut config: Vec<usize> = self.forced.iter().chain(&self.chosen).copied().collect();
            config.sort_unstable();
            self.acc.push(&config, weight);
            Ok(())
        }

        fn run(&mut self, start: usize, weight: f64) -> Result<()> {
            self.emit(weight)?;
            for k in start..self.free.len() {
                let i = self.free[k];
                if self.blocked[i] > 0 {
                    continue;
                }
                for &j in &self.conflicts[i] {
                    self.blocked[j] += 1;
                }
                self.chosen.push(i);
                let r = self.run(k + 1, weight * self.lambda[i]);
                self.chosen.pop();
                for &j in &self.conflicts[i] {
                    self.blocked[j] -= 1;
                }
                r?;
            }
            Ok(())
        }
    }

    let mut search = Search {
        free: &free,
        conflicts: &conflicts,
        lambda,
        forced: pin.occupied.iter().copied().collect(),
        blocked,
        chosen: Vec::new(),
        acc: Accumulator::new(m.kind(), n),
        cap: config_cap,
        size: 0,
    };
    search.run(0, base_weight)?;
    let oracle = search.acc.finish();
    if oracle.support_size() == 0 {
        return Err(Error::EmptySupport);
    }
    Ok(oracle)
}

pub fn marginal(m: &ModelInstance, i: usize) -> Result<f64> {
    Ok(enumerate(m, DEFAULT_CONFIG_CAP)?.marginal(i))
}

pub fn conditional(m: &ModelInstance, j: usize, i: usize, state: State) -> Result<f64> {
    enumerate(m, DEFAULT_CONFIG_CAP)?.conditional(j, i, state)
}

/// min over unpinned elements of min(μ_i, 1 − μ_i).
pub fn marginal_bound(m: &ModelInstance) -> Result<f64> {
    let oracle = enumerate(m, DEFAULT_CONFIG_CAP)?;
    marginal_bound_of(m, &oracle)
}

pub fn marginal_bound_of(m: &ModelInstance, oracle: &GibbsOracle) -> Result<f64> {
    let mut b: f64 = 0.5;
    for i in m.unpinned() {
        if !oracle.is_free(i) {
            return Err(Error::DegenerateElement { element: i });
        }
        let p = oracle.marginal(i);
        b = b.min(p).min(1.0 - p);
    }
    Ok(b)
}
