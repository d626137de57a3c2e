//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real Jacobi rotation in the (p, q) plane.
//! Sweeps stop once the off-diagonal Frobenius mass falls below
//! `jacobi_tol * ||M||_F`.

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::config::Config;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// V·diag(f(λ))·V*
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let s = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled.matmul(&self.vectors.adjoint())
    }
}

pub fn hermitian_eig(m: &CMatrix) -> Result<Eigen> {
    hermitian_eig_with(m, &Config::default())
}

pub fn hermitian_eig_with(m: &CMatrix, cfg: &Config) -> Result<Eigen> {
    if !m.is_square() {
        return Err(Error::invalid(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let herm = m.hermiticity_residual();
    if herm > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::validation("hermiticity of eigensolver input", herm));
    }
    Ok(jacobi(m, cfg.jacobi_tol))
}

/// Eigenvalues only, for callers that already know the input is Hermitian.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    jacobi(&m.hermitian_part(), Config::default().jacobi_tol).values
}

fn off_diagonal_mass(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(m: &CMatrix, tol: f64) -> Eigen {
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let threshold = tol * m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_mass(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Eigen { values, vectors }
}

/// Annihilates a[p][q] with the unitary U = diag-phase · real rotation.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / r; // e^{iφ}

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    // U restricted to the (p, q) block, acting on columns:
    // [u_pp u_pq; u_qp u_qq] = [c, s; -s·e^{-iφ}, c·e^{-iφ}]
    let pc = phase.conj();
    let u_pp = Complex64::new(cs, 0.0);
    let u_pq = Complex64::new(sn, 0.0);
    let u_qp = -pc * sn;
    let u_qq = pc * cs;

    // A ← A·U
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A ← U*·A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    // V ← V·U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Square root of a PSD matrix; eigenvalues in (-clamp, 0) are clamped to 0.
pub fn psd_sqrt(m: &CMatrix, clamp: f64) -> Result<CMatrix> {
    let e = hermitian_eig(m)?;
    if let Some(&min) = e.values.first() {
        if min < -clamp {
            return Err(Error::validation("positive semidefiniteness", -min));
        }
    }
    Ok(e.reconstruct_with(|x| x.max(0.0).sqrt()))
}
