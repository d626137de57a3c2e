//! R-decompositions, the Cl₂ ucp map, Stinespring dilations from Choi matrices,
//! and the stability bound for approximate representations.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebras::{word, Representation, StarPolynomial, Word};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, pauli, rho_norm, solve, CMatrix, DensityMatrix, ZERO};

/// ‖b₀b₁ + b₁b₀‖ in the algebra generated by two binary observables
/// (attained by commuting observables).
pub const ANTICOMMUTATOR_NORM: f64 = 2.0;

/// R-decompositions keyed by generator name.
pub type DecompositionMap = BTreeMap<String, RDecomposition>;

/// λ · u · r · v with r an entry of the relation list (or its adjoint).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RTerm {
    pub lambda: Complex64,
    pub u: Word,
    pub relation: usize,
    #[serde(default)]
    pub relation_adjoint: bool,
    pub v: Word,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RDecomposition {
    pub terms: Vec<RTerm>,
    /// Norm of each referenced relation in the ambient algebra.
    #[serde(rename = "relationNorms")]
    pub relation_norms: BTreeMap<usize, f64>,
}

impl RDecomposition {
    /// Σ |λ_i| (1 + ‖r_i‖ · deg v_i)
    pub fn size(&self) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            let norm = self
                .relation_norms
                .get(&t.relation)
                .ok_or_else(|| Error::invalid(format!("no norm recorded for relation {}", t.relation)))?;
            total += t.lambda.norm() * (1.0 + norm * t.v.len() as f64);
        }
        Ok(total)
    }

    /// Σ λ_i u_i r_i v_i as a formal polynomial.
    pub fn expand(&self, relations: &[StarPolynomial]) -> Result<StarPolynomial> {
        let mut acc = StarPolynomial::zero();
        for t in &self.terms {
            let r = relations
                .get(t.relation)
                .ok_or_else(|| Error::invalid(format!("relation index {} out of range", t.relation)))?;
            let r = if t.relation_adjoint { r.adjoint() } else { r.clone() };
            let u = StarPolynomial::monomial(Complex64::new(1.0, 0.0), t.u.clone());
            let v = StarPolynomial::monomial(Complex64::new(1.0, 0.0), t.v.clone());
            acc = acc.add(&u.mul(&r).mul(&v).scale(t.lambda));
        }
        Ok(acc)
    }
}

/// b₀b₁ + b₁b₀
pub fn cl2_anticommutator() -> StarPolynomial {
    StarPolynomial::from_terms([
        (Complex64::new(1.0, 0.0), word(&["b0", "b1"])),
        (Complex64::new(1.0, 0.0), word(&["b1", "b0"])),
    ])
}

/// θ(b₀) − b₀ = −½ b₁ {b₀,b₁} and θ(b₁) − b₁ = −½ b₀ {b₀,b₁}, each of size ½.
pub fn cl2_decompositions() -> BTreeMap<String, RDecomposition> {
    let single = |u: &str| RDecomposition {
        terms: vec![RTerm {
            lambda: Complex64::new(-0.5, 0.0),
            u: word(&[u]),
            relation: 0,
            relation_adjoint: false,
            v: Vec::new(),
        }],
        relation_norms: [(0, ANTICOMMUTATOR_NORM)].into_iter().collect(),
    };
    [("b0".to_string(), single("b1")), ("b1".to_string(), single("b0"))]
        .into_iter()
        .collect()
}

/// Linear map given on a basis of its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct UcpMap {
    pub domain_basis: Vec<StarPolynomial>,
    pub images: Vec<StarPolynomial>,
}

impl UcpMap {
    /// Images of the basis under a representation: π(θ(basis_k)).
    pub fn compose(&self, rep: &Representation) -> Result<Vec<CMatrix>> {
        self.images.iter().map(|p| rep.eval(p)).collect()
    }
}

/// θ on {1, b₀, b₁, b₀b₁}:
/// 1 ↦ 1, b₀ ↦ b₀ − ½b₁{b₀,b₁}, b₁ ↦ b₁ − ½b₀{b₀,b₁}, b₀b₁ ↦ b₀b₁ − ½{b₀,b₁}.
pub fn cl2_theta() -> UcpMap {
    let anti = cl2_anticommutator();
    let b0 = StarPolynomial::gen("b0");
    let b1 = StarPolynomial::gen("b1");
    let b0b1 = b0.mul(&b1);
    UcpMap {
        domain_basis: vec![StarPolynomial::one(), b0.clone(), b1.clone(), b0b1.clone()],
        images: vec![
            StarPolynomial::one(),
            b0.sub(&b1.mul(&anti).scale_real(0.5)),
            b1.sub(&b0.mul(&anti).scale_real(0.5)),
            b0b1.sub(&anti.scale_real(0.5)),
        ],
    }
}

/// b₀ ↦ σ_X, b₁ ↦ σ_Z
pub fn cl2_sigma() -> Representation {
    Representation::binary_observables([("b0".to_string(), pauli::x()), ("b1".to_string(), pauli::z())])
        .expect("Pauli matrices")
}

/// b₀ ↦ σ_X, b₁ ↦ cos φ σ_Z + sin φ σ_X
pub fn rotated_cl2_rep(phi: f64) -> Representation {
    let b1 = &pauli::z().scale_real(phi.cos()) + &pauli::x().scale_real(phi.sin());
    Representation::binary_observables([("b0".to_string(), pauli::x()), ("b1".to_string(), b1)])
        .expect("rotated observables")
}

/// Coefficients c[i·d + j][k] with e_ij = Σ_k c_k σ(basis_k).
pub fn matrix_unit_coefficients(sigma_basis: &[CMatrix]) -> Result<Vec<Vec<Complex64>>> {
    let d = sigma_basis.first().map_or(0, CMatrix::rows);
    if d == 0 || sigma_basis.len() != d * d {
        return Err(Error::invalid(format!(
            "{} basis images cannot span the {d}x{d} matrix units",
            sigma_basis.len()
        )));
    }
    // columns: vec(σ(basis_k))
    let a = CMatrix::from_fn(d * d, d * d, |row, k| sigma_basis[k].data()[row]);
    let mut out = Vec::with_capacity(d * d);
    for idx in 0..d * d {
        let mut rhs = vec![ZERO; d * d];
        rhs[idx] = Complex64::new(1.0, 0.0);
        let coeffs = solve(&a, &rhs).map_err(|_| Error::invalid("domain basis does not span the matrix units"))?;
        out.push(coeffs);
    }
    Ok(out)
}

/// θ̂(e_ij) for every matrix unit, from the images of the basis.
pub fn matrix_unit_images(coeffs: &[Vec<Complex64>], basis_images: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let n = basis_images.first().map_or(0, CMatrix::rows);
    coeffs
        .iter()
        .map(|c| {
            if c.len() != basis_images.len() {
                return Err(Error::invalid("coefficient count does not match the basis"));
            }
            let mut m = CMatrix::zeros(n, n);
            for (ck, img) in c.iter().zip(basis_images) {
                m += &img.scale(*ck);
            }
            Ok(m)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcpCheck {
    #[serde(rename = "isUcp")]
    pub is_ucp: bool,
    #[serde(rename = "minChoiEig")]
    pub min_choi_eig: f64,
    #[serde(rename = "unitalResidual")]
    pub unital_residual: f64,
}

fn choi_matrix(units: &[CMatrix], d: usize) -> CMatrix {
    let n = units[0].rows();
    CMatrix::from_fn(d * n, d * n, |r, c| units[(r / n) * d + c / n][(r % n, c % n)])
}

fn unit_dim(units: &[CMatrix]) -> Result<usize> {
    let d = (units.len() as f64).sqrt().round() as usize;
    if d == 0 || d * d != units.len() {
        return Err(Error::invalid(format!(
            "{} images do not form a square array of matrix units",
            units.len()
        )));
    }
    Ok(d)
}

/// Choi matrix [θ̂(e_ij)] positivity and θ̂(1) = I.
pub fn check_ucp(units: &[CMatrix], cfg: &Config) -> Result<UcpCheck> {
    let d = unit_dim(units)?;
    let n = units[0].rows();
    let mut one = CMatrix::zeros(n, n);
    for i in 0..d {
        one += &units[i * d + i];
    }
    let unital_residual = one.distance(&CMatrix::identity(n));
    let choi = choi_matrix(units, d);
    let min_choi_eig = hermitian_eig(&choi.hermitian_part())?.values[0];
    Ok(UcpCheck {
        is_ucp: min_choi_eig >= -cfg.choi_clamp && unital_residual <= 1e-10,
        min_choi_eig,
        unital_residual,
    })
}

/// I: C^n → C^d ⊗ C^s with θ̂(X) = I*(X ⊗ I_s)I.
#[derive(Debug, Clone, PartialEq)]
pub struct Stinespring {
    pub isometry: CMatrix,
    pub multiplicity: usize,
    pub kraus: Vec<CMatrix>,
}

/// Minimal Stinespring isometry from the Choi matrix; eigenvalues in
/// (−choi_clamp, 0) are treated as 0.
pub fn stinespring(units: &[CMatrix], cfg: &Config) -> Result<Stinespring> {
    let d = unit_dim(units)?;
    let n = units[0].rows();
    let choi = choi_matrix(units, d);
    let e = hermitian_eig(&choi.hermitian_part())?;
    if e.values[0] < -cfg.choi_clamp {
        return Err(Error::Precondition(format!(
            "Choi matrix is not positive semidefinite (min eigenvalue {:.3e})",
            e.values[0]
        )));
    }
    let mut kraus = Vec::new();
    for (k, &mu) in e.values.iter().enumerate().rev() {
        if mu <= cfg.kraus_tol {
            continue;
        }
        let w = e.vector(k);
        let s = mu.sqrt();
        kraus.push(CMatrix::from_fn(d, n, |i, a| w[i * n + a].conj() * s));
    }
    let m = kraus.len();
    if m == 0 {
        return Err(Error::Precondition("Choi matrix vanishes".into()));
    }
    let isometry = CMatrix::from_fn(d * m, n, |row, a| kraus[row % m][(row / m, a)]);
    Ok(Stinespring {
        isometry,
        multiplicity: m,
        kraus,
    })
}

impl Stinespring {
    /// I*(X ⊗ I_s)I
    pub fn compress(&self, x: &CMatrix) -> CMatrix {
        let lifted = x.kron(&CMatrix::identity(self.multiplicity));
        self.isometry.adjoint().matmul(&lifted).matmul(&self.isometry)
    }
}

/// A representation whose relations hold up to `measured_eps` in the ρ-norm.
#[derive(Debug, Clone)]
pub struct EpsilonRep {
    pub rep: Representation,
    pub rho: DensityMatrix,
    pub relations: Vec<StarPolynomial>,
    pub measured_eps: f64,
}

impl EpsilonRep {
    pub fn new(rep: Representation, rho: DensityMatrix, relations: Vec<StarPolynomial>) -> Result<Self> {
        if rho.dim() != rep.dim() {
            return Err(Error::invalid(format!(
                "state has dimension {}, representation has dimension {}",
                rho.dim(),
                rep.dim()
            )));
        }
        let mut measured_eps: f64 = 0.0;
        for r in &relations {
            measured_eps = measured_eps.max(rho_norm(&rep.eval(r)?, &rho)?);
        }
        Ok(EpsilonRep {
            rep,
            rho,
            relations,
            measured_eps,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhRow {
    pub generator: String,
    /// ‖π(b) − I*(σ(b)⊗I_s)I‖_ρ
    pub lhs: f64,
    /// Σ|λ|(‖π(r)‖_ρ + ‖r‖·‖[π(v), √ρ]‖_F)
    pub rhs: f64,
    /// size · measuredEps
    #[serde(rename = "rhsPaper")]
    pub rhs_paper: f64,
    pub size: f64,
    #[serde(rename = "measuredEps")]
    pub measured_eps: f64,
    pub multiplicity: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhReport {
    pub rows: Vec<GhRow>,
    #[serde(rename = "minChoiEig")]
    pub min_choi_eig: f64,
    pub multiplicity: usize,
    #[serde(rename = "stinespringResidual")]
    pub stinespring_residual: f64,
}

/// Allowed slack in lhs ≤ rhs.
pub const GH_SLACK: f64 = 1e-8;

/// Σ|λ|(‖π(r)‖_ρ + ‖r‖·‖[π(v), √ρ]‖_F) for one decomposition.
fn proof_rhs(e: &EpsilonRep, dec: &RDecomposition, sqrt_rho: &CMatrix) -> Result<f64> {
    let mut rhs = 0.0;
    for t in &dec.terms {
        let r = e
            .relations
            .get(t.relation)
            .ok_or_else(|| Error::invalid(format!("relation index {} out of range", t.relation)))?;
        let r = if t.relation_adjoint { r.adjoint() } else { r.clone() };
        let r_norm = dec
            .relation_norms
            .get(&t.relation)
            .ok_or_else(|| Error::invalid(format!("no norm recorded for relation {}", t.relation)))?;
        let comm = if t.v.is_empty() {
            0.0
        } else {
            e.rep.eval_word(&t.v)?.commutator(sqrt_rho).frobenius_norm()
        };
        rhs += t.lambda.norm() * (rho_norm(&e.rep.eval(&r)?, &e.rho)? + r_norm * comm);
    }
    Ok(rhs)
}

/// ‖π(b) − π(θ(b))‖_ρ next to the decomposition bound, with no dilation involved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearDeviation {
    pub generator: String,
    pub deviation: f64,
    pub rhs: f64,
}

/// The algebraic half of the stability argument: π(b) − π(θ(b)) = −π(Σ λ u r v).
pub fn linear_deviation_check(
    e: &EpsilonRep,
    theta: &UcpMap,
    decomps: &BTreeMap<String, RDecomposition>,
) -> Result<Vec<LinearDeviation>> {
    let sqrt_rho = e.rho.sqrt();
    let mut out = Vec::new();
    for (g, dec) in decomps {
        let k = theta
            .domain_basis
            .iter()
            .position(|p| *p == StarPolynomial::gen(g))
            .ok_or_else(|| Error::invalid(format!("generator {g} is not a domain basis element")))?;
        let pi_b = e.rep.eval(&theta.domain_basis[k])?;
        let pi_theta = e.rep.eval(&theta.images[k])?;
        out.push(LinearDeviation {
            generator: g.clone(),
            deviation: rho_norm(&(&pi_b - &pi_theta), &e.rho)?,
            rhs: proof_rhs(e, dec, &sqrt_rho)?,
        });
    }
    Ok(out)
}

/// Builds θ̂ = π∘θ, dilates it, and compares π(b) with I*(σ(b)⊗I)I for every
/// generator of the ideal irrep σ.
pub fn gh_bound_check(
    e: &EpsilonRep,
    theta: &UcpMap,
    sigma: &Representation,
    decomps: &BTreeMap<String, RDecomposition>,
    cfg: &Config,
) -> Result<GhReport> {
    for g in sigma.generators() {
        if !decomps.contains_key(g) {
            return Err(Error::invalid(format!("no R-decomposition supplied for generator {g}")));
        }
    }
    let sigma_basis: Vec<CMatrix> = theta
        .domain_basis
        .iter()
        .map(|p| sigma.eval(p))
        .collect::<Result<_>>()?;
    let coeffs = matrix_unit_coefficients(&sigma_basis)?;
    let units = matrix_unit_images(&coeffs, &theta.compose(&e.rep)?)?;
    let check = check_ucp(&units, cfg)?;
    if check.min_choi_eig < -cfg.choi_clamp {
        return Err(Error::Precondition(format!(
            "π∘θ is not completely positive on this representation (min Choi eigenvalue {:.6e})",
            check.min_choi_eig
        )));
    }
    let dil = stinespring(&units, cfg)?;
    let d = sigma.dim();
    let mut stinespring_residual: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut eij = CMatrix::zeros(d, d);
            eij[(i, j)] = Complex64::new(1.0, 0.0);
            stinespring_residual = stinespring_residual.max(dil.compress(&eij).distance(&units[i * d + j]));
        }
    }
    let sqrt_rho = e.rho.sqrt();
    let mut rows = Vec::new();
    for g in sigma.generators() {
        let dec = &decomps[g];
        let size = dec.size()?;
        let pi_b = e
            .rep
            .image(g)
            .ok_or_else(|| Error::invalid(format!("generator {g} has no image")))?;
        let lifted = dil.compress(sigma.image(g).expect("listed generator"));
        let lhs = rho_norm(&(pi_b - &lifted), &e.rho)?;
        let rhs = proof_rhs(e, dec, &sqrt_rho)?;
        rows.push(GhRow {
            generator: g.clone(),
            lhs,
            rhs,
            rhs_paper: size * e.measured_eps,
            size,
            measured_eps: e.measured_eps,
            multiplicity: dil.multiplicity,
            holds: lhs <= rhs + GH_SLACK,
        });
    }
    Ok(GhReport {
        rows,
        min_choi_eig: check.min_choi_eig,
        multiplicity: dil.multiplicity,
        stinespring_residual,
    })
}

/// Everything needed to run the check on the rotated Cl₂ family at angle φ with ρ = I/2.
pub fn cl2_rotation_check(phi: f64, cfg: &Config) -> Result<GhReport> {
    let e = EpsilonRep::new(
        rotated_cl2_rep(phi),
        DensityMatrix::maximally_mixed(2),
        vec![cl2_anticommutator()],
    )?;
    gh_bound_check(&e, &cl2_theta(), &cl2_sigma(), &cl2_decompositions(), cfg)
}
