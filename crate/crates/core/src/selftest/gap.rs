use serde::{Deserialize, Serialize};

use crate::algebras::{BipartiteRep, TensorPolynomial};
use crate::error::Result;
use crate::games::{game_polynomial, NonlocalGame};
use crate::linalg::{hermitian_eig, CMatrix};

/// Eigenvalues within this distance of the top one count toward its multiplicity.
pub const MULTIPLICITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    #[serde(rename = "topValue")]
    pub top_value: f64,
    pub gap: f64,
    #[serde(rename = "topMultiplicity")]
    pub top_multiplicity: usize,
    /// No eigenvalue lies strictly below the top cluster.
    pub degenerate: bool,
}

/// Gap between the top eigenvalue of a Hermitian matrix and the next distinct one.
pub fn spectral_gap_of_matrix(m: &CMatrix) -> Result<GapReport> {
    let e = hermitian_eig(m)?;
    let top = *e.values.last().expect("nonempty spectrum");
    let top_multiplicity = e
        .values
        .iter()
        .filter(|&&v| (top - v).abs() <= MULTIPLICITY_TOL)
        .count();
    let below = e.values.iter().rev().find(|&&v| v < top - MULTIPLICITY_TOL);
    Ok(match below {
        Some(&l) => GapReport {
            top_value: top,
            gap: top - l,
            top_multiplicity,
            degenerate: false,
        },
        None => GapReport {
            top_value: top,
            gap: 0.0,
            top_multiplicity,
            degenerate: true,
        },
    })
}

/// Spectral gap of an arbitrary tensor polynomial under a bipartite representation.
pub fn spectral_gap_of(p: &TensorPolynomial, rep: &BipartiteRep) -> Result<GapReport> {
    spectral_gap_of_matrix(&rep.eval(p)?.hermitian_part())
}

/// Spectral gap of π(Φ_G).
pub fn spectral_gap(g: &NonlocalGame, rep: &BipartiteRep) -> Result<GapReport> {
    spectral_gap_of(&game_polynomial(g), rep)
}

/// True iff the top eigenspace of π(Φ_G) is one-dimensional.
pub fn top_eigenspace_check(g: &NonlocalGame, rep: &BipartiteRep) -> Result<bool> {
    Ok(spectral_gap(g, rep)?.top_multiplicity == 1)
}
