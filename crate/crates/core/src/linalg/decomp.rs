use num_complex::Complex64;

use super::eig::hermitian_eig;
use super::matrix::{CMatrix, ONE, ZERO};
use super::vector::{inner, norm, StateVector};
use crate::error::{Error, Result};

/// Thin singular value decomposition X = Σ_k s_k u_k w_k*.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Descending, length min(rows, cols).
    pub values: Vec<f64>,
    /// rows × rows unitary; first min(rows, cols) columns pair with `values`.
    pub left: CMatrix,
    /// cols × cols unitary; first min(rows, cols) columns pair with `values`.
    pub right: CMatrix,
}

/// SVD through the eigendecomposition of X*X.
///
/// Singular values are recomputed as ‖X w_k‖ rather than √λ_k so that tiny
/// values keep absolute accuracy; left vectors are X w_k / s_k, completed to a
/// basis by Gram–Schmidt when the rank is deficient.
pub fn svd(x: &CMatrix, zero_tol: f64) -> Result<Svd> {
    let (m, n) = (x.rows(), x.cols());
    let gram = x.adjoint().matmul(x).hermitian_part();
    let eig = hermitian_eig(&gram)?;

    // descending order
    let mut cols: Vec<(f64, Vec<Complex64>)> = (0..n)
        .rev()
        .map(|k| {
            let w = eig.vector(k);
            let s = norm(&x.matvec(&w));
            (s, w)
        })
        .collect();
    cols.sort_by(|a, b| b.0.total_cmp(&a.0));

    let k = m.min(n);
    let mut left_cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(k);
    for (s, w) in cols.iter().take(k) {
        values.push(*s);
        if *s > zero_tol {
            let xw = x.matvec(w);
            let mut u: Vec<Complex64> = xw.iter().map(|z| z / *s).collect();
            // re-orthogonalize against previous columns to absorb rounding
            orthogonalize(&mut u, &left_cols);
            let nu = norm(&u);
            left_cols.push(u.iter().map(|z| z / nu).collect());
        } else {
            left_cols.push(next_basis_vector(m, &left_cols));
        }
    }
    while left_cols.len() < m {
        left_cols.push(next_basis_vector(m, &left_cols));
    }
    let right_cols: Vec<Vec<Complex64>> = cols.into_iter().map(|(_, w)| w).collect();
    Ok(Svd {
        values,
        left: CMatrix::from_columns(&left_cols)?,
        right: CMatrix::from_columns(&right_cols)?,
    })
}

fn orthogonalize(u: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for b in basis {
        let p = inner(b, u);
        for (ui, bi) in u.iter_mut().zip(b) {
            *ui -= p * bi;
        }
    }
}

/// Smallest-index standard basis vector not in the span, orthonormalized.
fn next_basis_vector(dim: usize, basis: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut best: Option<Vec<Complex64>> = None;
    let mut best_norm = 0.0;
    for i in 0..dim {
        let mut e = vec![ZERO; dim];
        e[i] = ONE;
        orthogonalize(&mut e, basis);
        orthogonalize(&mut e, basis);
        let n = norm(&e);
        if n > 0.5 {
            return e.into_iter().map(|z| z / n).collect();
        }
        if n > best_norm {
            best_norm = n;
            best = Some(e);
        }
    }
    let e = best.expect("basis already complete");
    e.into_iter().map(|z| z / best_norm).collect()
}

/// Schmidt decomposition ψ = Σ_i s_i |α_i⟩ ⊗ |β_i⟩.
#[derive(Debug, Clone)]
pub struct Schmidt {
    /// Descending, length min(dA, dB).
    pub coeffs: Vec<f64>,
    /// dA × dA unitary with α_i as columns.
    pub left: CMatrix,
    /// dB × dB unitary with β_i as columns.
    pub right: CMatrix,
}

impl Schmidt {
    pub fn rank(&self, tol: f64) -> usize {
        self.coeffs.iter().filter(|&&s| s > tol).count()
    }

    /// Σ_i s_i α_i ⊗ β_i
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let (da, db) = (self.left.rows(), self.right.rows());
        let mut out = vec![ZERO; da * db];
        for (k, &s) in self.coeffs.iter().enumerate() {
            for i in 0..da {
                let a = self.left[(i, k)] * s;
                for j in 0..db {
                    out[i * db + j] += a * self.right[(j, k)];
                }
            }
        }
        out
    }
}

/// Coefficient matrix Ψ_ij = ⟨ij|ψ⟩ of a bipartite vector.
pub fn reshape(psi: &[Complex64], da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, db, |i, j| psi[i * db + j])
}

/// Left basis vectors carry the phase convention: first nonzero amplitude is real positive.
pub fn schmidt(psi: &StateVector, da: usize, db: usize) -> Result<Schmidt> {
    if da == 0 || db == 0 || da * db != psi.dim() {
        return Err(Error::invalid(format!(
            "Schmidt split {da}x{db} does not match state dimension {}",
            psi.dim()
        )));
    }
    let coeff = reshape(psi.amplitudes(), da, db);
    let dec = svd(&coeff, 1e-14)?;
    // Ψ = U S W*  ⇒  ψ = Σ s_k u_k ⊗ conj(w_k)
    let mut left = dec.left;
    let mut right = dec.right.conj();
    for k in 0..da {
        let first = (0..da).map(|i| left[(i, k)]).find(|z| z.norm() > 1e-12);
        if let Some(z) = first {
            let ph = z / z.norm();
            for i in 0..da {
                left[(i, k)] /= ph;
            }
            if k < db {
                for j in 0..db {
                    right[(j, k)] *= ph;
                }
            }
        }
    }
    Ok(Schmidt {
        coeffs: dec.values,
        left,
        right,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Traces out `side` of an operator on C^dA ⊗ C^dB.
pub fn partial_trace(m: &CMatrix, da: usize, db: usize, side: Side) -> Result<CMatrix> {
    let d = da * db;
    if m.rows() != d || m.cols() != d {
        return Err(Error::invalid(format!(
            "partial trace expects {d}x{d}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(match side {
        Side::B => CMatrix::from_fn(da, da, |i, k| (0..db).map(|j| m[(i * db + j, k * db + j)]).sum()),
        Side::A => CMatrix::from_fn(db, db, |j, l| (0..da).map(|i| m[(i * db + j, i * db + l)]).sum()),
    })
}

/// Reduced density of a pure bipartite state without forming |ψ⟩⟨ψ|.
pub fn reduced_density(psi: &StateVector, da: usize, db: usize, keep: Side) -> Result<DensityMatrix> {
    if da * db != psi.dim() {
        return Err(Error::invalid("reduced density: dimension mismatch"));
    }
    let c = reshape(psi.amplitudes(), da, db);
    let m = match keep {
        Side::A => c.matmul(&c.adjoint()),
        Side::B => c.transpose().matmul(&c.conj()),
    };
    DensityMatrix::new(m.hermitian_part())
}

/// Positive semidefinite unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("density matrix must be square"));
        }
        let h = matrix.hermiticity_residual();
        if h > 1e-12 {
            return Err(Error::validation("density matrix hermiticity", h));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > 1e-12 {
            return Err(Error::validation("density matrix trace", (tr - ONE).norm()));
        }
        let e = hermitian_eig(&matrix)?;
        if let Some(&min) = e.values.first() {
            if min < -1e-12 {
                return Err(Error::validation("density matrix positivity", -min));
            }
        }
        Ok(DensityMatrix { matrix })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            matrix: CMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn pure(psi: &StateVector) -> Self {
        DensityMatrix {
            matrix: psi.projector(),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn sqrt(&self) -> CMatrix {
        super::eig::psd_sqrt(&self.matrix, 1e-12).expect("validated density matrix is PSD")
    }
}

/// ‖X‖_ρ = √Tr(X*Xρ).
pub fn rho_norm(x: &CMatrix, rho: &DensityMatrix) -> Result<f64> {
    let d = rho.dim();
    if x.cols() != d {
        return Err(Error::invalid(format!(
            "rho-norm: operator has {} columns, state has dimension {d}",
            x.cols()
        )));
    }
    let v = x.adjoint().matmul(x).matmul(rho.matrix()).trace().re;
    Ok(v.max(0.0).sqrt())
}

/// Solves A·x = b by Gaussian elimination with partial pivoting.
pub fn solve(a: &CMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(Error::invalid("solve: shape mismatch"));
    }
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .expect("nonempty range");
        if m[(piv, col)].norm() <= 1e-12 * scale {
            return Err(Error::invalid("solve: singular system"));
        }
        if piv != col {
            for k in 0..n {
                let t = m[(col, k)];
                m[(col, k)] = m[(piv, k)];
                m[(piv, k)] = t;
            }
            rhs.swap(col, piv);
        }
        for i in col + 1..n {
            let f = m[(i, col)] / m[(col, col)];
            if f == ZERO {
                continue;
            }
            for k in col..n {
                let t = m[(col, k)];
                m[(i, k)] -= f * t;
            }
            let t = rhs[col];
            rhs[i] -= f * t;
        }
    }
    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let s: Complex64 = (i + 1..n).map(|k| m[(i, k)] * x[k]).sum();
        x[i] = (rhs[i] - s) / m[(i, i)];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{c, pauli, r};
    use crate::linalg::vector::distance;

    #[test]
    fn schmidt_of_product_state() {
        let psi = StateVector::basis(4, 0);
        let s = schmidt(&psi, 2, 2).unwrap();
        assert!((s.coeffs[0] - 1.0).abs() < 1e-15);
        assert!(s.coeffs[1].abs() < 1e-15);
        assert_eq!(s.rank(1e-12), 1);
    }

    #[test]
    fn schmidt_of_bell_state() {
        let s = schmidt(&StateVector::max_entangled(2), 2, 2).unwrap();
        let h = 0.5f64.sqrt();
        assert!((s.coeffs[0] - h).abs() < 1e-14 && (s.coeffs[1] - h).abs() < 1e-14);
        assert!(distance(&s.reconstruct(), StateVector::max_entangled(2).amplitudes()) < 1e-14);
    }

    #[test]
    fn schmidt_phase_convention() {
        let psi = StateVector::normalized(vec![
            c(0.0, 1.0),
            c(0.3, 0.2),
            c(-0.5, 0.1),
            c(0.0, -0.7),
            c(0.2, 0.0),
            c(0.1, 0.1),
        ])
        .unwrap();
        let s = schmidt(&psi, 3, 2).unwrap();
        for k in 0..3 {
            let first = (0..3).map(|i| s.left[(i, k)]).find(|z| z.norm() > 1e-12).unwrap();
            assert!(first.im.abs() < 1e-14 && first.re > 0.0);
        }
        assert!(distance(&s.reconstruct(), psi.amplitudes()) < 1e-12);
    }

    #[test]
    fn schmidt_dimension_mismatch() {
        assert!(schmidt(&StateVector::basis(4, 0), 3, 2).is_err());
    }

    #[test]
    fn partial_traces() {
        let p00 = StateVector::basis(4, 0).projector();
        let ra = partial_trace(&p00, 2, 2, Side::B).unwrap();
        assert!(ra.approx_eq(&CMatrix::diag_real(&[1.0, 0.0]), 0.0));

        let bell = StateVector::max_entangled(2).projector();
        let rb = partial_trace(&bell, 2, 2, Side::A).unwrap();
        assert!(rb.approx_eq(&CMatrix::identity(2).scale_real(0.5), 1e-15));
        assert!(partial_trace(&bell, 3, 2, Side::A).is_err());
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let psi = StateVector::normalized(vec![
            c(0.1, 0.2),
            c(0.3, -0.1),
            c(0.5, 0.0),
            c(0.0, 0.4),
            c(-0.2, 0.2),
            c(0.1, 0.0),
        ])
        .unwrap();
        let full = psi.projector();
        for side in [Side::A, Side::B] {
            let traced_out = if side == Side::A { Side::B } else { Side::A };
            let want = partial_trace(&full, 2, 3, traced_out).unwrap();
            let got = reduced_density(&psi, 2, 3, side).unwrap();
            assert!(got.matrix().approx_eq(&want, 1e-14));
        }
    }

    #[test]
    fn rho_norm_examples() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert_eq!(rho_norm(&CMatrix::zeros(2, 2), &rho).unwrap(), 0.0);
        assert!((rho_norm(&pauli::y(), &rho).unwrap() - 1.0).abs() < 1e-15);
        // (X − Z)² = 2I, so Tr(2I · I/2) = 2
        let d = &pauli::x() - &pauli::z();
        assert!((rho_norm(&d, &rho).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(rho_norm(&CMatrix::identity(3), &rho).is_err());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(CMatrix::diag_real(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(CMatrix::diag_real(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(CMatrix::from_real(&[&[0.5, 0.1], &[0.0, 0.5]])).is_err());
        assert!(DensityMatrix::new(CMatrix::diag_real(&[0.25, 0.75])).is_ok());
    }

    #[test]
    fn solve_small_system() {
        let a = CMatrix::from_rows(&[vec![r(0.0), r(2.0)], vec![c(1.0, 1.0), r(1.0)]]).unwrap();
        let x = solve(&a, &[r(2.0), r(2.0)]).unwrap();
        let back = a.matvec(&x);
        assert!((back[0] - r(2.0)).norm() < 1e-14 && (back[1] - r(2.0)).norm() < 1e-14);
        assert!(solve(&CMatrix::zeros(2, 2), &[ONE, ONE]).is_err());
    }
}
