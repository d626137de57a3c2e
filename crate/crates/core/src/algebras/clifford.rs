use std::collections::BTreeMap;

use super::rep::{RepKind, Representation};
use crate::linalg::{pauli, CMatrix};

fn chain(factors: &[CMatrix]) -> CMatrix {
    factors.iter().fold(CMatrix::identity(1), |acc, f| acc.kron(f))
}

/// Pauli-chain images of the rank-`r` Clifford generators on 2^{⌊r/2⌋} dimensions.
///
/// Generators are named `b0 .. b{r-1}`. For k < ⌊r/2⌋,
/// `b{2k} = Y^{⊗k} ⊗ X ⊗ I…` and `b{2k+1} = Y^{⊗k} ⊗ Z ⊗ I…`; for odd `r`
/// the last generator is `Y^{⊗⌊r/2⌋}`, which selects one of the two
/// inequivalent irreducible representations.
pub fn clifford_rep(r: usize) -> Representation {
    assert!(r >= 1, "Clifford rank must be at least 1");
    let n = r / 2;
    let id = CMatrix::identity(2);
    let mut images = BTreeMap::new();
    for k in 0..n {
        for (offset, middle) in [(0, pauli::x()), (1, pauli::z())] {
            let mut factors = vec![pauli::y(); k];
            factors.push(middle);
            factors.extend(std::iter::repeat_n(id.clone(), n - k - 1));
            images.insert(format!("b{}", 2 * k + offset), chain(&factors));
        }
    }
    if r % 2 == 1 {
        images.insert(format!("b{}", r - 1), chain(&vec![pauli::y(); n]));
    }
    Representation::new(images, RepKind::Unitary { order: 2 }).expect("uniform dimensions")
}

/// Largest violation of x_i x_j + x_j x_i = 2δ_ij over the images.
pub fn clifford_residual(rep: &Representation) -> f64 {
    let imgs: Vec<&CMatrix> = rep.images().values().collect();
    let id = CMatrix::identity(rep.dim());
    let mut worst: f64 = 0.0;
    for i in 0..imgs.len() {
        for j in i..imgs.len() {
            let ac = imgs[i].anticommutator(imgs[j]);
            let want = if i == j {
                id.scale_real(2.0)
            } else {
                CMatrix::zeros(rep.dim(), rep.dim())
            };
            worst = worst.max(ac.distance(&want));
        }
    }
    worst
}
