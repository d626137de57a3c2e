use num_complex::Complex64;

use super::poly::StarPolynomial;
use super::rep::Representation;
use super::structure::commutant_dim;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, StateVector};

/// τ(a) = tr_d(π(a)), the normalized trace through a finite-dimensional representation.
#[derive(Debug, Clone)]
pub struct TracialState {
    rep: Representation,
}

impl TracialState {
    pub fn new(rep: Representation) -> Self {
        TracialState { rep }
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn value(&self, p: &StarPolynomial) -> Result<Complex64> {
        Ok(self.rep.eval(p)?.trace() / self.rep.dim() as f64)
    }
}

/// (C^d ⊗ C^d, I_d ⊗ π(·), |φ_d⟩) for an irreducible π of dimension d.
#[derive(Debug, Clone)]
pub struct GnsTriple {
    pub rep: Representation,
    pub state: StateVector,
}

impl GnsTriple {
    pub fn state_value(&self, p: &StarPolynomial) -> Result<Complex64> {
        let m: CMatrix = self.rep.eval(p)?;
        Ok(self.state.expectation(&m))
    }
}

/// Maximally entangled GNS triple of the trace of an irreducible representation.
pub fn gns_from_irrep(rep: &Representation, tol: f64) -> Result<GnsTriple> {
    let k = commutant_dim(rep, tol);
    if k != 1 {
        return Err(Error::Precondition(format!(
            "representation is reducible (commutant dimension {k})"
        )));
    }
    let d = rep.dim();
    Ok(GnsTriple {
        rep: rep.amplify_left(d),
        state: StateVector::max_entangled(d),
    })
}
