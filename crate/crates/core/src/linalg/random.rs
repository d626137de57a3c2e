//! Seeded random matrices and states for restarts, perturbation studies and tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::CMatrix;
use super::vector::{inner, norm, StateVector};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    gaussian_matrix(rng, n, n).hermitian_part()
}

/// Haar-ish unitary: Gram–Schmidt (QR) of a complex Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n, n);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for b in &cols {
                let p = inner(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= p * bi;
                }
            }
        }
        let nv = norm(&v);
        cols.push(v.into_iter().map(|z| z / nv).collect());
    }
    CMatrix::from_columns(&cols).expect("square")
}

pub fn state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    StateVector::normalized(v).expect("gaussian vector is nonzero")
}

/// Random projective measurement with `outcomes` effects on C^dim:
/// a random orthonormal basis split into consecutive random-size blocks.
pub fn pvm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Vec<CMatrix> {
    let u = unitary(rng, dim);
    let mut effects = vec![CMatrix::zeros(dim, dim); outcomes];
    for k in 0..dim {
        let a = rng.random_range(0..outcomes);
        let v = u.column(k);
        effects[a] += &CMatrix::outer(&v, &v);
    }
    effects
}

/// Random POVM: G_a = S^{-1/2} A_a S^{-1/2} with A_a = X_a X_a*, S = Σ A_a.
pub fn povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Vec<CMatrix> {
    let raw: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            let x = gaussian_matrix(rng, dim, dim);
            x.matmul(&x.adjoint())
        })
        .collect();
    let mut sum = CMatrix::zeros(dim, dim);
    for a in &raw {
        sum += a;
    }
    let e = super::eig::hermitian_eig(&sum.hermitian_part()).expect("hermitian");
    let inv_sqrt = e.reconstruct_with(|x| 1.0 / x.sqrt());
    raw.iter()
        .map(|a| inv_sqrt.matmul(a).matmul(&inv_sqrt).hermitian_part())
        .collect()
}

/// Binary observable U·diag(±1)·U* with random signs.
pub fn binary_observable<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let u = unitary(rng, dim);
    let signs: Vec<f64> = (0..dim)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    u.matmul(&CMatrix::diag_real(&signs))
        .matmul(&u.adjoint())
        .hermitian_part()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = unitary(&mut rng, 5);
        assert!(u.adjoint().matmul(&u).approx_eq(&CMatrix::identity(5), 1e-12));
    }

    #[test]
    fn povm_and_pvm_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for effects in [pvm(&mut rng, 4, 3), povm(&mut rng, 3, 4)] {
            let n = effects[0].rows();
            let mut s = CMatrix::zeros(n, n);
            for e in &effects {
                s += e;
            }
            assert!(s.approx_eq(&CMatrix::identity(n), 1e-12));
        }
    }
}
