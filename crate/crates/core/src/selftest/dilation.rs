use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gap::spectral_gap;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::games::{winning_probability, NonlocalGame};
use crate::linalg::{
    distance, kron_vec, norm, reduced_density, reshape, rho_norm, CMatrix, DensityMatrix, Side, StateVector, ZERO,
};
use crate::strategies::QuantumModel;

const ISOMETRY_TOL: f64 = 1e-10;

/// Isometries I_A: C^dA → C^d̃A ⊗ C^rA, I_B: C^dB → C^d̃B ⊗ C^rB and |aux⟩ ∈ C^rA ⊗ C^rB.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDilation {
    ia: CMatrix,
    ib: CMatrix,
    aux: StateVector,
}

fn check_isometry(name: &str, m: &CMatrix) -> Result<()> {
    let res = m.adjoint().matmul(m).distance(&CMatrix::identity(m.cols()));
    if res > ISOMETRY_TOL {
        return Err(Error::validation(format!("{name} isometry condition"), res));
    }
    Ok(())
}

impl LocalDilation {
    pub fn new(ia: CMatrix, ib: CMatrix, aux: StateVector) -> Result<Self> {
        check_isometry("I_A", &ia)?;
        check_isometry("I_B", &ib)?;
        Ok(LocalDilation { ia, ib, aux })
    }

    /// I_A = I, I_B = I, aux = (1).
    pub fn identity(da: usize, db: usize) -> Self {
        LocalDilation {
            ia: CMatrix::identity(da),
            ib: CMatrix::identity(db),
            aux: StateVector::basis(1, 0),
        }
    }

    pub fn ia(&self) -> &CMatrix {
        &self.ia
    }
    pub fn ib(&self) -> &CMatrix {
        &self.ib
    }
    pub fn aux(&self) -> &StateVector {
        &self.aux
    }
}

/// Output layout of I_A ⊗ I_B given the ideal local dimensions.
#[derive(Debug, Clone, Copy)]
struct Layout {
    ta: usize,
    ra: usize,
    tb: usize,
    rb: usize,
}

impl Layout {
    fn new(ia: &CMatrix, ib: &CMatrix, ta: usize, tb: usize) -> Result<Self> {
        if ia.rows() % ta != 0 || ib.rows() % tb != 0 {
            return Err(Error::invalid(format!(
                "isometry outputs {}/{} are not multiples of the ideal dimensions {ta}/{tb}",
                ia.rows(),
                ib.rows()
            )));
        }
        Ok(Layout {
            ta,
            ra: ia.rows() / ta,
            tb,
            rb: ib.rows() / tb,
        })
    }

    /// (I_A ⊗ I_B) v regrouped from (Ã⊗K_A)⊗(B̃⊗K_B) to (Ã⊗B̃)⊗(K_A⊗K_B).
    fn push(&self, ia: &CMatrix, ib: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
        let w = ia.matmul(&reshape(v, ia.cols(), ib.cols())).matmul(&ib.transpose());
        let Layout { ta, ra, tb, rb } = *self;
        let mut out = vec![ZERO; ta * ra * tb * rb];
        for i in 0..ta {
            for ka in 0..ra {
                for j in 0..tb {
                    for kb in 0..rb {
                        out[(i * tb + j) * (ra * rb) + ka * rb + kb] = w[(i * ra + ka, j * rb + kb)];
                    }
                }
            }
        }
        out
    }
}

/// Largest Euclidean residual of each family of dilation equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationResiduals {
    /// ‖I_A⊗I_B ψ − ψ̃⊗aux‖
    pub state: f64,
    /// max over (x, a) of ‖I_A⊗I_B (M⊗I)ψ − (M̃⊗I)ψ̃⊗aux‖
    pub alice: f64,
    /// max over (y, b) of ‖I_A⊗I_B (I⊗N)ψ − (I⊗Ñ)ψ̃⊗aux‖
    pub bob: f64,
    /// max over (a, b, x, y) of ‖I_A⊗I_B (M⊗N)ψ − (M̃⊗Ñ)ψ̃⊗aux‖
    pub correlation: f64,
    pub eps: f64,
}

/// Residuals of S against S̃ under a candidate local dilation.
pub fn verify_local_dilation(s: &QuantumModel, ideal: &QuantumModel, d: &LocalDilation) -> Result<DilationResiduals> {
    if s.shape() != ideal.shape() {
        return Err(Error::invalid("models answer different question/answer sets"));
    }
    if d.ia.cols() != s.dim_a() || d.ib.cols() != s.dim_b() {
        return Err(Error::invalid(format!(
            "isometries act on {}x{} but the model is {}x{}",
            d.ia.cols(),
            d.ib.cols(),
            s.dim_a(),
            s.dim_b()
        )));
    }
    let lay = Layout::new(&d.ia, &d.ib, ideal.dim_a(), ideal.dim_b())?;
    if d.aux.dim() != lay.ra * lay.rb {
        return Err(Error::invalid(format!(
            "aux has dimension {}, expected {}",
            d.aux.dim(),
            lay.ra * lay.rb
        )));
    }
    let aux = d.aux.amplitudes();
    let res = |a: &CMatrix, b: &CMatrix, ta: &CMatrix, tb: &CMatrix| -> f64 {
        let lhs = lay.push(&d.ia, &d.ib, &s.apply(a, b));
        let rhs = kron_vec(&ideal.apply(ta, tb), aux);
        distance(&lhs, &rhs)
    };
    let (ia, ib) = (CMatrix::identity(s.dim_a()), CMatrix::identity(s.dim_b()));
    let (ita, itb) = (CMatrix::identity(ideal.dim_a()), CMatrix::identity(ideal.dim_b()));
    let state = res(&ia, &ib, &ita, &itb);
    let mut alice: f64 = 0.0;
    for x in 0..s.num_x() {
        for a in 0..s.num_a() {
            alice = alice.max(res(s.alice(x, a), &ib, ideal.alice(x, a), &itb));
        }
    }
    let mut bob: f64 = 0.0;
    for y in 0..s.num_y() {
        for b in 0..s.num_b() {
            bob = bob.max(res(&ia, s.bob(y, b), &ita, ideal.bob(y, b)));
        }
    }
    let mut correlation: f64 = 0.0;
    for x in 0..s.num_x() {
        for y in 0..s.num_y() {
            for a in 0..s.num_a() {
                for b in 0..s.num_b() {
                    correlation = correlation.max(res(s.alice(x, a), s.bob(y, b), ideal.alice(x, a), ideal.bob(y, b)));
                }
            }
        }
    }
    Ok(DilationResiduals {
        state,
        alice,
        bob,
        correlation,
        eps: state.max(alice).max(bob).max(correlation),
    })
}

/// One per-(a, b, x, y) comparison with its allowance δ^A + δ^B + bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifferenceCheck {
    pub x: usize,
    pub y: usize,
    pub a: usize,
    pub b: usize,
    pub residual: f64,
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationBound {
    pub delta: f64,
    pub eps: f64,
    /// √2(δ + √ε)/Δ
    pub bound: f64,
    pub gap: f64,
    #[serde(rename = "auxOpt")]
    pub aux_opt: StateVector,
    /// ‖I_A⊗I_B ψ − ψ̃⊗aux‖
    pub achieved: f64,
    /// w(G; S)
    pub value: f64,
    /// w_q estimate from the top eigenvalue of the ideal representation
    #[serde(rename = "quantumValue")]
    pub quantum_value: f64,
    pub differences: Vec<DifferenceCheck>,
}

/// Compares S with the ideal model through the given isometries, choosing the
/// auxiliary state that maximizes the overlap with ψ̃ ⊗ aux.
pub fn dilation_bound(
    g: &NonlocalGame,
    s: &QuantumModel,
    ideal: &QuantumModel,
    ia: &CMatrix,
    ib: &CMatrix,
    cfg: &Config,
) -> Result<DilationBound> {
    if ia.cols() != s.dim_a() || ib.cols() != s.dim_b() {
        return Err(Error::invalid("isometries do not act on the model's spaces"));
    }
    if !s.flags(cfg.tol).projective {
        return Err(Error::Precondition("dilation bound needs a projective model".into()));
    }
    check_isometry("I_A", ia)?;
    check_isometry("I_B", ib)?;
    let report = spectral_gap(g, &ideal.bipartite_rep())?;
    if report.degenerate || report.gap <= 0.0 {
        return Err(Error::Degenerate("ideal representation has no spectral gap".into()));
    }
    let lay = Layout::new(ia, ib, ideal.dim_a(), ideal.dim_b())?;
    let value = winning_probability(g, &s.correlation())?;
    let mut eps = (report.top_value - value).max(0.0);
    if eps < cfg.value_floor {
        eps = 0.0;
    }

    let rho_a = reduced_density(s.state(), s.dim_a(), s.dim_b(), Side::A)?;
    let rho_b = reduced_density(s.state(), s.dim_a(), s.dim_b(), Side::B)?;
    let deviation = |iso: &CMatrix, ideal_op: &CMatrix, k: usize, op: &CMatrix, rho: &DensityMatrix| -> Result<f64> {
        let pulled = iso.adjoint().matmul(&ideal_op.kron(&CMatrix::identity(k))).matmul(iso);
        rho_norm(&(&pulled - op), rho)
    };
    let mut da = vec![vec![0.0; s.num_a()]; s.num_x()];
    for (x, row) in da.iter_mut().enumerate() {
        for (a, v) in row.iter_mut().enumerate() {
            *v = deviation(ia, ideal.alice(x, a), lay.ra, s.alice(x, a), &rho_a)?;
        }
    }
    let mut db = vec![vec![0.0; s.num_b()]; s.num_y()];
    for (y, row) in db.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = deviation(ib, ideal.bob(y, b), lay.rb, s.bob(y, b), &rho_b)?;
        }
    }
    let delta: f64 = g
        .winning_tuples()
        .map(|(x, y, a, b)| g.mu(x, y) * (da[x][a] + db[y][b]))
        .sum();
    let bound = 2f64.sqrt() * (delta + eps.sqrt()) / report.gap;

    let pushed = lay.push(ia, ib, s.state().amplitudes());
    let tilde = ideal.state().amplitudes();
    let r = lay.ra * lay.rb;
    let mut v = vec![ZERO; r];
    for (i, t) in tilde.iter().enumerate() {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk += t.conj() * pushed[i * r + k];
        }
    }
    if norm(&v) <= 1e-300 {
        return Err(Error::Degenerate("dilated state is orthogonal to every ψ̃ ⊗ aux".into()));
    }
    let aux_opt = StateVector::normalized(v)?;
    let achieved = distance(&pushed, &kron_vec(tilde, aux_opt.amplitudes()));

    let mut differences = Vec::new();
    for x in 0..s.num_x() {
        for y in 0..s.num_y() {
            for a in 0..s.num_a() {
                for b in 0..s.num_b() {
                    let lhs = lay.push(ia, ib, &s.apply(s.alice(x, a), s.bob(y, b)));
                    let rhs = kron_vec(&ideal.apply(ideal.alice(x, a), ideal.bob(y, b)), aux_opt.amplitudes());
                    differences.push(DifferenceCheck {
                        x,
                        y,
                        a,
                        b,
                        residual: distance(&lhs, &rhs),
                        allowed: da[x][a] + db[y][b] + bound,
                    });
                }
            }
        }
    }
    Ok(DilationBound {
        delta,
        eps,
        bound,
        gap: report.gap,
        aux_opt,
        achieved,
        value,
        quantum_value: report.top_value,
        differences,
    })
}
