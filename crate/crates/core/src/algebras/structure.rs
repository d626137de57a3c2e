use super::rep::Representation;
use crate::linalg::{hermitian_eig, CMatrix};

/// Dimension of {T : T·π(g) = π(g)·T and T·π(g)* = π(g)*·T for all g}.
///
/// Each constraint is linear in vec(T); with row-major vectorization
/// vec(TG − GT) = (I ⊗ Gᵀ − G ⊗ I)·vec(T). The nullity of the stacked
/// system equals the number of (near-)zero eigenvalues of Σ K*K.
/// A value of 1 means the representation is irreducible.
pub fn commutant_dim(rep: &Representation, tol: f64) -> usize {
    let d = rep.dim();
    let id = CMatrix::identity(d);
    let mut normal = CMatrix::zeros(d * d, d * d);
    for g in rep.images().values() {
        let mut ops = vec![g.clone()];
        if !g.is_hermitian(1e-14) {
            ops.push(g.adjoint());
        }
        for op in ops {
            let k = &id.kron(&op.transpose()) - &op.kron(&id);
            normal += &k.adjoint().matmul(&k);
        }
    }
    let eig = hermitian_eig(&normal.hermitian_part()).expect("normal matrix is Hermitian");
    let scale = eig.values.last().copied().unwrap_or(0.0).max(1.0);
    eig.values.iter().filter(|&&v| v <= tol * scale).count()
}

pub fn is_irreducible(rep: &Representation, tol: f64) -> bool {
    commutant_dim(rep, tol) == 1
}
