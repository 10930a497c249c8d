//! Dense linear algebra used throughout the crate.

mod eigen;
mod matrix;
mod ops;

pub use eigen::{
    eig_sym, eig_sym_with, eigenvalues_sym, lambda_max, lambda_min, EigenSolver, SymEig,
    AUTO_JACOBI_LIMIT,
};
pub use matrix::{dot, norm, Matrix};
pub use ops::{
    cholesky, det_rank_one_update, determinant, interlacing_check, invert, power_iteration_max, sherman_morrison,
    weyl_check, SpectralCheck,
};

/// Numerical tolerances shared by every module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative asymmetry allowed before a matrix is rejected as non-symmetric.
    pub symmetry: f64,
    /// Relative off-diagonal mass at which the eigensolver stops.
    pub convergence: f64,
    /// Allowed violation when comparing a computed value against a bound.
    pub slack: f64,
    /// Relative pivot size below which a matrix counts as singular.
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { symmetry: 1e-12, convergence: 1e-12, slack: 1e-9, pivot: 1e-12 }
    }
}

impl Tolerances {
    /// Override one field by name; returns false for an unknown name.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match name {
            "symmetry" => self.symmetry = value,
            "convergence" => self.convergence = value,
            "slack" => self.slack = value,
            "pivot" => self.pivot = value,
            _ => return false,
        }
        true
    }
}
