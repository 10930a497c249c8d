//! Exact Gibbs distributions of the monomer-dimer and hardcore models.

mod forest;
mod model;
mod oracle;

pub use forest::{log_partition_function_forest, partition_function};
pub use model::{ModelInstance, ModelKind, Pinning, State};
pub use oracle::{
    conditional, enumerate, marginal, marginal_bound, marginal_bound_of, GibbsOracle, DEFAULT_CONFIG_CAP,
};
