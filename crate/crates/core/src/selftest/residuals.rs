use serde::{Deserialize, Serialize};

use crate::algebras::DeterminingPair;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{distance, reduced_density, rho_norm, CMatrix, Side};
use crate::strategies::QuantumModel;

/// Worst violations of the three robustness conditions of a determining pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairResiduals {
    #[serde(rename = "condI")]
    pub cond_i: f64,
    #[serde(rename = "condII")]
    pub cond_ii: f64,
    #[serde(rename = "condIII")]
    pub cond_iii: f64,
}

/// condI = max ‖(M^x_a⊗I − I⊗π_B(γ^x_a))ψ‖, condII = max_r ‖π_B(r)‖_{ρ_B},
/// condIII = max ‖[N^y_b, √ρ_B]‖_F.
pub fn pair_robustness_residuals(s: &QuantumModel, pair: &DeterminingPair, cfg: &Config) -> Result<PairResiduals> {
    if !s.flags(cfg.tol).projective {
        return Err(Error::Precondition(
            "determining-pair residuals need a projective model".into(),
        ));
    }
    let bob = s.bob_rep();
    let (ia, ib) = (CMatrix::identity(s.dim_a()), CMatrix::identity(s.dim_b()));
    let mut cond_i: f64 = 0.0;
    for x in 0..s.num_x() {
        for a in 0..s.num_a() {
            let gamma = bob.eval(pair.gamma_of(x, a)?)?;
            let lhs = s.apply(s.alice(x, a), &ib);
            let rhs = s.apply(&ia, &gamma);
            cond_i = cond_i.max(distance(&lhs, &rhs));
        }
    }
    let rho = reduced_density(s.state(), s.dim_a(), s.dim_b(), Side::B)?;
    let mut cond_ii: f64 = 0.0;
    for r in &pair.relations {
        cond_ii = cond_ii.max(rho_norm(&bob.eval(r)?, &rho)?);
    }
    let sqrt_rho = rho.sqrt();
    let mut cond_iii: f64 = 0.0;
    for y in 0..s.num_y() {
        for b in 0..s.num_b() {
            cond_iii = cond_iii.max(s.bob(y, b).commutator(&sqrt_rho).frobenius_norm());
        }
    }
    Ok(PairResiduals {
        cond_i,
        cond_ii,
        cond_iii,
    })
}
