use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{CMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Unit vector in C^n.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

pub const NORM_TOL: f64 = 1e-12;

impl StateVector {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::invalid("state vector of dimension 0"));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("state vector contains NaN or infinite entries"));
        }
        let n = norm(&amps);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::validation("state vector norm", (n - 1.0).abs()));
        }
        Ok(StateVector { amps })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let n = norm(&amps);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(StateVector {
            amps: amps.into_iter().map(|z| z / n).collect(),
        })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        StateVector { amps }
    }

    /// |φ_d⟩ = (1/√d) Σ_i |ii⟩ on C^d ⊗ C^d.
    pub fn max_entangled(d: usize) -> Self {
        let mut amps = vec![ZERO; d * d];
        let s = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            amps[i * d + i] = Complex64::new(s, 0.0);
        }
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn kron(&self, other: &StateVector) -> StateVector {
        StateVector {
            amps: kron_vec(&self.amps, &other.amps),
        }
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// |ψ⟩⟨ψ|
    pub fn projector(&self) -> CMatrix {
        CMatrix::outer(&self.amps, &self.amps)
    }

    /// ⟨ψ|M|ψ⟩
    pub fn expectation(&self, m: &CMatrix) -> Complex64 {
        inner(&self.amps, &m.matvec(&self.amps))
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Conjugate-linear in the first argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    assert_eq!(u.len(), v.len(), "inner product length mismatch");
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn kron_vec(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect()
}

pub fn sub_vec(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(u.len(), v.len(), "vector length mismatch");
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

pub fn distance(u: &[Complex64], v: &[Complex64]) -> f64 {
    norm(&sub_vec(u, v))
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.amps.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        StateVector::new(pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .map_err(serde::de::Error::custom)
    }
}
