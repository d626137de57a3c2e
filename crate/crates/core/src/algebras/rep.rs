use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::poly::{Letter, StarPolynomial, TensorPolynomial};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix};

/// What the generator images are required to satisfy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepKind {
    /// Generators grouped by question; each group is a PVM.
    Pvm { questions: Vec<Vec<String>> },
    /// Unitary generators with U^order = I (order 2: binary observables).
    Unitary { order: u32 },
    /// No constraint beyond a common dimension.
    General,
}

/// Concrete matrices for a set of generators, all of a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representation {
    dim: usize,
    images: BTreeMap<String, CMatrix>,
    kind: RepKind,
}

impl Representation {
    pub fn new(images: BTreeMap<String, CMatrix>, kind: RepKind) -> Result<Self> {
        let dim = match images.values().next() {
            Some(m) => m.rows(),
            None => return Err(Error::invalid("representation without generators")),
        };
        for (g, m) in &images {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::invalid(format!(
                    "generator {g}: image is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if let RepKind::Pvm { questions } = &kind {
            for g in questions.iter().flatten() {
                if !images.contains_key(g) {
                    return Err(Error::invalid(format!("PVM generator {g} has no image")));
                }
            }
        }
        Ok(Representation { dim, images, kind })
    }

    pub fn general(images: impl IntoIterator<Item = (String, CMatrix)>) -> Result<Self> {
        Self::new(images.into_iter().collect(), RepKind::General)
    }

    pub fn binary_observables(images: impl IntoIterator<Item = (String, CMatrix)>) -> Result<Self> {
        Self::new(images.into_iter().collect(), RepKind::Unitary { order: 2 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &RepKind {
        &self.kind
    }

    pub fn image(&self, g: &str) -> Option<&CMatrix> {
        self.images.get(g)
    }

    pub fn images(&self) -> &BTreeMap<String, CMatrix> {
        &self.images
    }

    pub fn generators(&self) -> impl Iterator<Item = &String> {
        self.images.keys()
    }

    /// Largest violation of the constraints implied by `kind`.
    pub fn relation_residual(&self) -> f64 {
        let id = CMatrix::identity(self.dim);
        match &self.kind {
            RepKind::General => 0.0,
            RepKind::Unitary { order } => self
                .images
                .values()
                .map(|u| {
                    let unit = u.adjoint().matmul(u).distance(&id);
                    let ord = u.pow(*order).distance(&id);
                    unit.max(ord)
                })
                .fold(0.0, f64::max),
            RepKind::Pvm { questions } => {
                let mut worst: f64 = 0.0;
                for group in questions {
                    let mut sum = CMatrix::zeros(self.dim, self.dim);
                    for g in group {
                        let p = &self.images[g];
                        worst = worst.max(p.hermiticity_residual());
                        worst = worst.max(p.matmul(p).distance(p));
                        sum += p;
                    }
                    worst = worst.max(sum.distance(&id));
                }
                worst
            }
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let res = self.relation_residual();
        if res > tol {
            return Err(Error::validation(
                format!("{:?} representation relations", self.kind),
                res,
            ));
        }
        Ok(())
    }

    fn letter_image(&self, l: &Letter) -> Result<CMatrix> {
        let m = self
            .images
            .get(&l.gen)
            .ok_or_else(|| Error::invalid(format!("generator {} has no image in the representation", l.gen)))?;
        Ok(if l.adjoint { m.adjoint() } else { m.clone() })
    }

    pub fn eval_word(&self, w: &[Letter]) -> Result<CMatrix> {
        let mut acc = CMatrix::identity(self.dim);
        for l in w {
            acc = acc.matmul(&self.letter_image(l)?);
        }
        Ok(acc)
    }

    pub fn eval(&self, p: &StarPolynomial) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for (w, c) in p.terms() {
            out += &self.eval_word(w)?.scale(*c);
        }
        Ok(out)
    }

    /// Conjugates every image: U* · π(g) · U.
    pub fn conjugate_by(&self, u: &CMatrix) -> Self {
        let images = self
            .images
            .iter()
            .map(|(g, m)| (g.clone(), u.adjoint().matmul(m).matmul(u)))
            .collect();
        Representation {
            dim: u.cols(),
            images,
            kind: self.kind.clone(),
        }
    }

    /// π ⊕ σ on shared generator names.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let mut images = BTreeMap::new();
        for (g, m) in &self.images {
            let o = other
                .images
                .get(g)
                .ok_or_else(|| Error::invalid(format!("direct sum: {g} missing on the right")))?;
            images.insert(g.clone(), m.direct_sum(o));
        }
        Self::new(images, self.kind.clone())
    }

    /// π ⊗ σ for commuting copies: g ↦ π(g) ⊗ I on the left names, I ⊗ σ(h) on the right names.
    pub fn tensor(&self, other: &Self, left_prefix: &str, right_prefix: &str) -> Result<Self> {
        let il = CMatrix::identity(self.dim);
        let ir = CMatrix::identity(other.dim);
        let mut images = BTreeMap::new();
        for (g, m) in &self.images {
            images.insert(format!("{left_prefix}{g}"), m.kron(&ir));
        }
        for (g, m) in &other.images {
            images.insert(format!("{right_prefix}{g}"), il.kron(m));
        }
        Self::new(images, RepKind::General)
    }

    /// Image of every generator under I_k ⊗ π(·).
    pub fn amplify_left(&self, k: usize) -> Self {
        let id = CMatrix::identity(k);
        Representation {
            dim: k * self.dim,
            images: self.images.iter().map(|(g, m)| (g.clone(), id.kron(m))).collect(),
            kind: self.kind.clone(),
        }
    }
}

/// π_A ⊗ π_B for evaluating tensor polynomials.
#[derive(Debug, Clone)]
pub struct BipartiteRep {
    pub alice: Representation,
    pub bob: Representation,
}

impl BipartiteRep {
    pub fn new(alice: Representation, bob: Representation) -> Self {
        BipartiteRep { alice, bob }
    }

    pub fn dim(&self) -> usize {
        self.alice.dim() * self.bob.dim()
    }

    pub fn eval(&self, p: &TensorPolynomial) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (u, v, c) in p.terms() {
            let a = self.alice.eval_word(u)?;
            let b = self.bob.eval_word(v)?;
            out += &a.kron(&b).scale(*c);
        }
        Ok(out)
    }
}

/// Smallest eigenvalue of each image's Hermitian part, for diagnostics.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    let e = hermitian_eig(&m.hermitian_part())?;
    Ok(e.values.first().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::poly::word;
    use crate::linalg::pauli;

    fn pauli_rep() -> Representation {
        Representation::binary_observables([("b0".to_string(), pauli::x()), ("b1".to_string(), pauli::z())]).unwrap()
    }

    #[test]
    fn eval_constant_is_identity() {
        let rep = pauli_rep();
        assert!(rep
            .eval(&StarPolynomial::one())
            .unwrap()
            .approx_eq(&CMatrix::identity(2), 0.0));
    }

    #[test]
    fn eval_anticommutator_vanishes() {
        let p: StarPolynomial = "(1+0i)*b0*b1 + (1+0i)*b1*b0".parse().unwrap();
        assert!(pauli_rep().eval(&p).unwrap().approx_eq(&CMatrix::zeros(2, 2), 0.0));
    }

    #[test]
    fn eval_gamma_is_binary_observable() {
        let s = 0.5f64.sqrt();
        let p = StarPolynomial::gen("b0").add(&StarPolynomial::gen("b1")).scale_real(s);
        let m = pauli_rep().eval(&p).unwrap();
        assert!(m.approx_eq(&(&pauli::x() + &pauli::z()).scale_real(s), 1e-15));
        assert!(m.matmul(&m).approx_eq(&CMatrix::identity(2), 1e-15));
    }

    #[test]
    fn eval_adjoint_commutes_with_star() {
        let rep = Representation::general([
            ("u".to_string(), pauli::x().scale(crate::linalg::c(0.0, 1.0))),
            ("v".to_string(), pauli::y()),
        ])
        .unwrap();
        let p = StarPolynomial::monomial(crate::linalg::c(0.3, 0.7), word(&["u", "v", "u"]));
        let lhs = rep.eval(&p.adjoint()).unwrap();
        let rhs = rep.eval(&p).unwrap().adjoint();
        assert!(lhs.approx_eq(&rhs, 1e-12));
    }

    #[test]
    fn missing_generator_is_an_error() {
        let p = StarPolynomial::gen("b7");
        assert!(matches!(pauli_rep().eval(&p), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn validation_catches_broken_relations() {
        assert!(pauli_rep().validate(1e-12).is_ok());
        let bad = Representation::binary_observables([("b0".to_string(), CMatrix::diag_real(&[1.0, 0.5]))]).unwrap();
        assert!(bad.validate(1e-9).is_err());
        let pvm = Representation::new(
            [
                ("n0_0".to_string(), CMatrix::diag_real(&[1.0, 0.0])),
                ("n0_1".to_string(), CMatrix::diag_real(&[0.0, 0.5])),
            ]
            .into_iter()
            .collect(),
            RepKind::Pvm {
                questions: vec![vec!["n0_0".into(), "n0_1".into()]],
            },
        )
        .unwrap();
        assert!(pvm.validate(1e-9).is_err());
    }
}
