use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dilation::dilation_bound;
use super::residuals::pair_robustness_residuals;
use crate::algebras::DeterminingPair;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::games::{game_polynomial, NonlocalGame};
use crate::linalg::{hermitian_eig, inner, pauli, CMatrix, StateVector, ZERO};
use crate::strategies::QuantumModel;

/// One-parameter deformations of the ideal CHSH model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// B1 = cos θ Z + sin θ X; state re-optimized.
    BobRotation,
    /// A1 = cos θ (X−Z)/√2 + sin θ (X+Z)/√2; state re-optimized.
    AliceRotation,
    /// ρ = (1−p)|φ₂⟩⟨φ₂| + p I/4, purified into a 4-dim register held by Alice.
    Depolarize,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::BobRotation, Family::AliceRotation, Family::Depolarize];

    pub fn name(self) -> &'static str {
        match self {
            Family::BobRotation => "bob-rotation",
            Family::AliceRotation => "alice-rotation",
            Family::Depolarize => "depolarize",
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| {
            Error::invalid(format!(
                "unknown perturbation family '{s}' (expected bob-rotation, alice-rotation or depolarize)"
            ))
        })
    }
}

/// A perturbed model together with the isometries that compare it to the ideal one.
#[derive(Debug, Clone)]
pub struct FamilyPoint {
    pub model: QuantumModel,
    pub ia: CMatrix,
    pub ib: CMatrix,
}

/// Top eigenvector of π(Φ_G) for the model's measurements, phased so ⟨reference|ψ⟩ ≥ 0.
fn optimal_state(g: &NonlocalGame, m: &QuantumModel, reference: &StateVector) -> Result<StateVector> {
    let phi = m.bipartite_rep().eval(&game_polynomial(g))?;
    let e = hermitian_eig(&phi.hermitian_part())?;
    let v = e.vector(e.values.len() - 1);
    let ov = inner(reference.amplitudes(), &v);
    let phase = if ov.norm() > 0.0 {
        ov.conj() / ov.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    StateVector::normalized(v.into_iter().map(|z| z * phase).collect())
}

impl Family {
    pub fn point(self, theta: f64) -> Result<FamilyPoint> {
        if !theta.is_finite() {
            return Err(Error::invalid("family parameter must be finite"));
        }
        let g = NonlocalGame::chsh();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (x, z) = (pauli::x(), pauli::z());
        let a0 = (&x + &z).scale_real(s);
        let a1 = (&x - &z).scale_real(s);
        let phi2 = StateVector::max_entangled(2);
        let id2 = CMatrix::identity(2);
        match self {
            Family::BobRotation | Family::AliceRotation => {
                let (alice, bob) = if self == Family::BobRotation {
                    let b1 = &z.scale_real(theta.cos()) + &x.scale_real(theta.sin());
                    (vec![a0, a1], vec![x, b1])
                } else {
                    let r1 = &a1.scale_real(theta.cos()) + &a0.scale_real(theta.sin());
                    (vec![a0, r1], vec![x, z])
                };
                let m = QuantumModel::from_binary_observables(&alice, &bob, phi2.clone())?;
                let psi = optimal_state(&g, &m, &phi2)?;
                Ok(FamilyPoint {
                    model: m.with_state(psi)?,
                    ia: id2.clone(),
                    ib: id2,
                })
            }
            Family::Depolarize => {
                if !(0.0..=1.0).contains(&theta) {
                    return Err(Error::invalid(format!("depolarizing strength {theta} outside [0, 1]")));
                }
                let rho = &phi2.projector().scale_real(1.0 - theta) + &CMatrix::identity(4).scale_real(theta / 4.0);
                let e = hermitian_eig(&rho)?;
                // |Ψ⟩ = Σ_k √λ_k |e_k⟩_{AB} |k⟩_R regrouped as (A ⊗ R) ⊗ B
                let mut amps = vec![ZERO; 16];
                for k in 0..4 {
                    let w = e.values[k].max(0.0).sqrt();
                    let ek = e.vector(k);
                    for i in 0..2 {
                        for j in 0..2 {
                            amps[(i * 4 + k) * 2 + j] = ek[i * 2 + j] * w;
                        }
                    }
                }
                let id4 = CMatrix::identity(4);
                let split = |o: &CMatrix| vec![(&id2 + o).scale_real(0.5), (&id2 - o).scale_real(0.5)];
                let alice = [a0, a1]
                    .iter()
                    .map(|o| split(o).into_iter().map(|p| p.kron(&id4)).collect())
                    .collect();
                let bob = [x, z].iter().map(split).collect();
                let model = QuantumModel::new(alice, bob, StateVector::normalized(amps)?)?;
                Ok(FamilyPoint {
                    model,
                    ia: CMatrix::identity(8),
                    ib: id2,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub eps: f64,
    #[serde(rename = "condI")]
    pub cond_i: f64,
    #[serde(rename = "condII")]
    pub cond_ii: f64,
    #[serde(rename = "condIII")]
    pub cond_iii: f64,
    pub delta: f64,
    pub bound: f64,
    pub achieved: f64,
}

/// y ≈ constant · x^exponent from a least-squares line in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub constant: f64,
    pub exponent: f64,
    pub points: usize,
}

/// Fits over points with x > 0 and y > `floor`; None with fewer than two distinct x.
pub fn fit_power_law(points: &[(f64, f64)], floor: f64) -> Option<PowerFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > floor)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len() as f64;
    if logs.len() < 2 {
        return None;
    }
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    Some(PowerFit {
        constant: (my - exponent * mx).exp(),
        exponent,
        points: logs.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub family: Family,
    pub pair: String,
    pub rows: Vec<SweepRow>,
    /// achieved ≈ C·ε^e
    pub fit: Option<PowerFit>,
    #[serde(rename = "fitCondI")]
    pub fit_cond_i: Option<PowerFit>,
    #[serde(rename = "fitCondII")]
    pub fit_cond_ii: Option<PowerFit>,
    #[serde(rename = "fitCondIII")]
    pub fit_cond_iii: Option<PowerFit>,
    pub config: Config,
}

/// Residuals at or below this level are treated as exact zeros by the fits.
pub const FIT_FLOOR: f64 = 1e-13;

/// Evaluates the family at every parameter; rows come back sorted by ε, then parameter.
pub fn robustness_sweep(
    pair: &DeterminingPair,
    ideal: &QuantumModel,
    family: Family,
    params: &[f64],
    cfg: &Config,
) -> Result<SweepReport> {
    if params.is_empty() {
        return Err(Error::invalid("sweep schedule is empty"));
    }
    let g = NonlocalGame::chsh();
    let rows: Result<Vec<SweepRow>> = params
        .par_iter()
        .map(|&theta| {
            let pt = family.point(theta)?;
            let res = pair_robustness_residuals(&pt.model, pair, cfg)?;
            let d = dilation_bound(&g, &pt.model, ideal, &pt.ia, &pt.ib, cfg)?;
            Ok(SweepRow {
                param: theta,
                eps: d.eps,
                cond_i: res.cond_i,
                cond_ii: res.cond_ii,
                cond_iii: res.cond_iii,
                delta: d.delta,
                bound: d.bound,
                achieved: d.achieved,
            })
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by(|a, b| a.eps.total_cmp(&b.eps).then(a.param.total_cmp(&b.param)));
    let fit_of = |f: fn(&SweepRow) -> f64| {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, f(r))).collect();
        fit_power_law(&pts, FIT_FLOOR)
    };
    Ok(SweepReport {
        family,
        pair: pair.label.clone(),
        fit: fit_of(|r| r.achieved),
        fit_cond_i: fit_of(|r| r.cond_i),
        fit_cond_ii: fit_of(|r| r.cond_ii),
        fit_cond_iii: fit_of(|r| r.cond_iii),
        rows,
        config: *cfg,
    })
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("grid must have at least one point"));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid("grid bounds must be finite"));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

impl SweepReport {
    pub const CSV_HEADER: &'static str = "param,eps,condI,condII,condIII,delta,bound,achieved";

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fields = [
                r.param, r.eps, r.cond_i, r.cond_ii, r.cond_iii, r.delta, r.bound, r.achieved,
            ];
            let line: Vec<String> = fields.iter().map(|v| format!("{v:.11e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        match &self.fit {
            Some(f) => {
                let _ = writeln!(
                    out,
                    "# fit_exponent={:.11e} fit_constant={:.11e} fit_points={}",
                    f.exponent, f.constant, f.points
                );
            }
            None => out.push_str("# fit_exponent=none\n"),
        }
        out
    }
}
