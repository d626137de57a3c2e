use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every module.
///
/// `tol` is the general relative tolerance; the remaining fields are the
/// specific thresholds used by individual checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// General relative tolerance (projectivity, eigenvalue clustering).
    pub tol: f64,
    /// Hermiticity / PSD / completeness checks on input operators.
    pub input_tol: f64,
    /// Jacobi stops when off-diagonal Frobenius mass < `jacobi_tol * ||M||_F`.
    pub jacobi_tol: f64,
    /// Choi eigenvalues above `-choi_clamp` are clamped to zero.
    pub choi_clamp: f64,
    /// Choi eigenvalues above this count as Kraus operators.
    pub kraus_tol: f64,
    /// Optimality gaps below this are rounding noise and reported as zero.
    pub value_floor: f64,
    /// Singular values / Schmidt coefficients below this count as zero.
    pub rank_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tol: 1e-9,
            input_tol: 1e-10,
            jacobi_tol: 1e-12,
            choi_clamp: 1e-9,
            kraus_tol: 1e-10,
            value_floor: 1e-14,
            rank_tol: 1e-9,
        }
    }
}

impl Config {
    /// Overrides the general tolerance, keeping everything else.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}
