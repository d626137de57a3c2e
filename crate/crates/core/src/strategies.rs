//! Finite-dimensional quantum models: validation, correlations, balanced form,
//! structural flags and the state functional on tensor polynomials.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebras::{alice_pvm_name, bob_pvm_name, BipartiteRep, Letter, RepKind, Representation, TensorPolynomial};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::games::Correlation;
use crate::linalg::{self, hermitian_eig, reshape, schmidt, CMatrix, StateVector, ZERO};

/// Bipartite state with one POVM per question for each party.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumModel {
    da: usize,
    db: usize,
    /// `alice[x][a]`
    alice: Vec<Vec<CMatrix>>,
    /// `bob[y][b]`
    bob: Vec<Vec<CMatrix>>,
    psi: StateVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFlags {
    pub projective: bool,
    #[serde(rename = "fullRank")]
    pub full_rank: bool,
    #[serde(rename = "centrallySupported")]
    pub centrally_supported: bool,
}

fn check_povms(party: &str, dim: usize, povms: &[Vec<CMatrix>], tol: f64) -> Result<()> {
    if povms.is_empty() {
        return Err(Error::invalid(format!("{party} has no questions")));
    }
    let na = povms[0].len();
    let id = CMatrix::identity(dim);
    for (x, effects) in povms.iter().enumerate() {
        if effects.is_empty() || effects.len() != na {
            return Err(Error::invalid(format!(
                "{party} question {x}: expected {na} effects, got {}",
                effects.len()
            )));
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for (a, e) in effects.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::invalid(format!(
                    "{party} effect x={x} a={a}: shape {}x{}, expected {dim}x{dim}",
                    e.rows(),
                    e.cols()
                )));
            }
            let h = e.hermiticity_residual();
            if h > tol {
                return Err(Error::validation(format!("{party} effect x={x} a={a} hermiticity"), h));
            }
            let min = hermitian_eig(&e.hermitian_part())?.values[0];
            if min < -tol {
                return Err(Error::validation(
                    format!("{party} effect x={x} a={a} positivity (min eigenvalue {min:.6e})"),
                    -min,
                ));
            }
            sum += e;
        }
        let res = sum.distance(&id);
        if res > tol {
            return Err(Error::validation(
                format!("{party} question {x} completeness Σ_a E = I"),
                res,
            ));
        }
    }
    Ok(())
}

/// ⟨u| (A ⊗ B) |v⟩ using the coefficient-matrix form (A ⊗ B)v ↔ A·V·Bᵀ.
fn sandwich(u: &[Complex64], a: &CMatrix, b: &CMatrix, v: &[Complex64]) -> Complex64 {
    let (da, db) = (a.rows(), b.rows());
    let w = a.matmul(&reshape(v, da, db)).matmul(&b.transpose());
    u.iter().zip(w.data()).map(|(x, y)| x.conj() * y).sum()
}

impl QuantumModel {
    pub fn new(alice: Vec<Vec<CMatrix>>, bob: Vec<Vec<CMatrix>>, psi: StateVector) -> Result<Self> {
        Self::new_with(alice, bob, psi, &Config::default())
    }

    pub fn new_with(alice: Vec<Vec<CMatrix>>, bob: Vec<Vec<CMatrix>>, psi: StateVector, cfg: &Config) -> Result<Self> {
        let da = alice.first().and_then(|q| q.first()).map_or(0, CMatrix::rows);
        let db = bob.first().and_then(|q| q.first()).map_or(0, CMatrix::rows);
        if da == 0 || db == 0 {
            return Err(Error::invalid("model needs at least one question and effect per party"));
        }
        if psi.dim() != da * db {
            return Err(Error::invalid(format!(
                "state has dimension {}, expected dA·dB = {}",
                psi.dim(),
                da * db
            )));
        }
        check_povms("alice", da, &alice, cfg.input_tol)?;
        check_povms("bob", db, &bob, cfg.input_tol)?;
        Ok(QuantumModel {
            da,
            db,
            alice,
            bob,
            psi,
        })
    }

    /// Projective model from ±1 observables: M^x_0 = (I + O_x)/2, M^x_1 = (I − O_x)/2.
    pub fn from_binary_observables(alice: &[CMatrix], bob: &[CMatrix], psi: StateVector) -> Result<Self> {
        let split = |obs: &[CMatrix]| -> Vec<Vec<CMatrix>> {
            obs.iter()
                .map(|o| {
                    let id = CMatrix::identity(o.rows());
                    vec![(&id + o).scale_real(0.5), (&id - o).scale_real(0.5)]
                })
                .collect()
        };
        Self::new(split(alice), split(bob), psi)
    }

    /// A0 = (X+Z)/√2, A1 = (X−Z)/√2, B0 = X, B1 = Z on |φ₂⟩.
    pub fn chsh_ideal() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (x, z) = (linalg::pauli::x(), linalg::pauli::z());
        Self::from_binary_observables(
            &[(&x + &z).scale_real(s), (&x - &z).scale_real(s)],
            &[x, z],
            StateVector::max_entangled(2),
        )
        .expect("ideal CHSH model is valid")
    }

    /// Random PVMs (uniformly random answer sizes) and a random state.
    pub fn random_projective<R: Rng + ?Sized>(
        rng: &mut R,
        shape: (usize, usize, usize, usize),
        da: usize,
        db: usize,
    ) -> Self {
        let (nx, ny, na, nb) = shape;
        let alice = (0..nx).map(|_| linalg::random::pvm(rng, da, na)).collect();
        let bob = (0..ny).map(|_| linalg::random::pvm(rng, db, nb)).collect();
        let psi = linalg::random::state(rng, da * db);
        Self::new(alice, bob, psi).expect("random PVMs are valid")
    }

    /// Random POVMs and a random state.
    pub fn random_povm<R: Rng + ?Sized>(
        rng: &mut R,
        shape: (usize, usize, usize, usize),
        da: usize,
        db: usize,
    ) -> Self {
        let (nx, ny, na, nb) = shape;
        let alice = (0..nx).map(|_| linalg::random::povm(rng, da, na)).collect();
        let bob = (0..ny).map(|_| linalg::random::povm(rng, db, nb)).collect();
        let psi = linalg::random::state(rng, da * db);
        Self::new(alice, bob, psi).expect("random POVMs are valid")
    }

    pub fn dim_a(&self) -> usize {
        self.da
    }
    pub fn dim_b(&self) -> usize {
        self.db
    }
    pub fn num_x(&self) -> usize {
        self.alice.len()
    }
    pub fn num_y(&self) -> usize {
        self.bob.len()
    }
    pub fn num_a(&self) -> usize {
        self.alice[0].len()
    }
    pub fn num_b(&self) -> usize {
        self.bob[0].len()
    }
    pub fn alice(&self, x: usize, a: usize) -> &CMatrix {
        &self.alice[x][a]
    }
    pub fn bob(&self, y: usize, b: usize) -> &CMatrix {
        &self.bob[y][b]
    }
    pub fn alice_povms(&self) -> &[Vec<CMatrix>] {
        &self.alice
    }
    pub fn bob_povms(&self) -> &[Vec<CMatrix>] {
        &self.bob
    }
    pub fn state(&self) -> &StateVector {
        &self.psi
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.num_x(), self.num_y(), self.num_a(), self.num_b())
    }

    /// Same measurements, different state.
    pub fn with_state(&self, psi: StateVector) -> Result<Self> {
        if psi.dim() != self.da * self.db {
            return Err(Error::invalid("replacement state has the wrong dimension"));
        }
        Ok(QuantumModel { psi, ..self.clone() })
    }

    /// ⟨ψ| A ⊗ B |ψ⟩
    pub fn expectation(&self, a: &CMatrix, b: &CMatrix) -> Complex64 {
        let v = self.psi.amplitudes();
        sandwich(v, a, b, v)
    }

    /// (A ⊗ B)|ψ⟩
    pub fn apply(&self, a: &CMatrix, b: &CMatrix) -> Vec<Complex64> {
        let w = a
            .matmul(&reshape(self.psi.amplitudes(), self.da, self.db))
            .matmul(&b.transpose());
        w.data().to_vec()
    }

    /// (X_x ⊗ I)|ψ⟩ with X_x = M^x_0 − M^x_1.
    pub fn alice_observable_on_state(&self, x: usize) -> Vec<Complex64> {
        let o = &self.alice[x][0] - &self.alice[x][1];
        self.apply(&o, &CMatrix::identity(self.db))
    }

    /// (I ⊗ Y_y)|ψ⟩ with Y_y = N^y_0 − N^y_1.
    pub fn bob_observable_on_state(&self, y: usize) -> Vec<Complex64> {
        let o = &self.bob[y][0] - &self.bob[y][1];
        self.apply(&CMatrix::identity(self.da), &o)
    }

    pub fn correlation(&self) -> Correlation {
        let (nx, ny, na, nb) = self.shape();
        let v = self.psi.amplitudes();
        let c = reshape(v, self.da, self.db);
        let mut table = vec![0.0; nx * ny * na * nb];
        for x in 0..nx {
            for a in 0..na {
                let left = self.alice[x][a].matmul(&c);
                for y in 0..ny {
                    for b in 0..nb {
                        let w = left.matmul(&self.bob[y][b].transpose());
                        let p: Complex64 = v.iter().zip(w.data()).map(|(p, q)| p.conj() * q).sum();
                        table[((x * ny + y) * na + a) * nb + b] = p.re.max(0.0);
                    }
                }
            }
        }
        Correlation::from_fn(nx, ny, na, nb, |a, b, x, y| table[((x * ny + y) * na + a) * nb + b])
            .expect("valid model yields a valid correlation")
    }

    fn pvm_rep(dim: usize, povms: &[Vec<CMatrix>], name: impl Fn(usize, usize) -> String) -> Representation {
        let mut images = BTreeMap::new();
        let mut questions = Vec::new();
        for (q, effects) in povms.iter().enumerate() {
            let mut group = Vec::new();
            for (a, e) in effects.iter().enumerate() {
                images.insert(name(q, a), e.clone());
                group.push(name(q, a));
            }
            questions.push(group);
        }
        let rep = Representation::new(images, RepKind::Pvm { questions }).expect("consistent dimensions");
        debug_assert_eq!(rep.dim(), dim);
        rep
    }

    /// m^x_a ↦ M^x_a
    pub fn alice_rep(&self) -> Representation {
        Self::pvm_rep(self.da, &self.alice, alice_pvm_name)
    }

    /// n^y_b ↦ N^y_b
    pub fn bob_rep(&self) -> Representation {
        Self::pvm_rep(self.db, &self.bob, bob_pvm_name)
    }

    pub fn bipartite_rep(&self) -> BipartiteRep {
        BipartiteRep::new(self.alice_rep(), self.bob_rep())
    }

    /// f_S(p) = ⟨ψ| π_A ⊗ π_B (p) |ψ⟩
    pub fn evaluate_state(&self, p: &TensorPolynomial) -> Result<Complex64> {
        let (ra, rb) = (self.alice_rep(), self.bob_rep());
        let v = self.psi.amplitudes();
        let mut acc = ZERO;
        for (u, w, c) in p.terms() {
            let a = ra.eval_word(u)?;
            let b = rb.eval_word(w)?;
            acc += c * sandwich(v, &a, &b, v);
        }
        Ok(acc)
    }

    /// f_S(u ⊗ v) for single words of generator names.
    pub fn evaluate_monomial(&self, u: &[Letter], v: &[Letter]) -> Result<Complex64> {
        let mut p = TensorPolynomial::zero();
        p.add_term(Complex64::new(1.0, 0.0), u.to_vec(), v.to_vec());
        if p.is_empty() {
            return Ok(ZERO);
        }
        self.evaluate_state(&p)
    }

    pub fn flags(&self, tol: f64) -> ModelFlags {
        let projective = self
            .alice
            .iter()
            .chain(&self.bob)
            .flatten()
            .all(|e| e.hermiticity_residual() <= tol && e.matmul(e).distance(e) <= tol);
        let sch = schmidt(&self.psi, self.da, self.db).expect("dimensions checked at construction");
        let rank = sch.rank(tol);
        let full_rank = self.da == self.db && rank == self.da;
        let support = |u: &CMatrix| -> CMatrix {
            let mut p = CMatrix::zeros(u.rows(), u.rows());
            for k in 0..rank {
                let col = u.column(k);
                p += &CMatrix::outer(&col, &col);
            }
            p
        };
        let pa = support(&sch.left);
        let pb = support(&sch.right.conj());
        let commutes = |p: &CMatrix, povms: &[Vec<CMatrix>]| {
            povms.iter().flatten().all(|e| p.commutator(e).frobenius_norm() < tol)
        };
        let centrally_supported = commutes(&pa, &self.alice) && commutes(&pb, &self.bob);
        ModelFlags {
            projective,
            full_rank,
            centrally_supported,
        }
    }

    /// Pads to d = max(dA, dB), the first answer absorbing the identity on the padding,
    /// then rotates both sides into the Schmidt basis so ψ = Σ λ_i |ii⟩.
    pub fn balanced_form(&self) -> Self {
        let d = self.da.max(self.db);
        let pad = |povms: &[Vec<CMatrix>], from: usize| -> Vec<Vec<CMatrix>> {
            povms
                .iter()
                .map(|effects| {
                    effects
                        .iter()
                        .enumerate()
                        .map(|(a, e)| {
                            let fill = if a == 0 {
                                CMatrix::identity(d - from)
                            } else {
                                CMatrix::zeros(d - from, d - from)
                            };
                            if d == from {
                                e.clone()
                            } else {
                                e.direct_sum(&fill)
                            }
                        })
                        .collect()
                })
                .collect()
        };
        let alice = pad(&self.alice, self.da);
        let bob = pad(&self.bob, self.db);
        let mut amps = vec![ZERO; d * d];
        for i in 0..self.da {
            for j in 0..self.db {
                amps[i * d + j] = self.psi.amplitudes()[i * self.db + j];
            }
        }
        let padded = StateVector::new(amps).expect("embedding preserves the norm");
        let sch = schmidt(&padded, d, d).expect("square split");
        let (l, r) = (&sch.left, &sch.right);
        let rotate = |povms: Vec<Vec<CMatrix>>, u: &CMatrix| -> Vec<Vec<CMatrix>> {
            povms
                .into_iter()
                .map(|effects| {
                    effects
                        .iter()
                        .map(|e| u.adjoint().matmul(e).matmul(u).hermitian_part())
                        .collect()
                })
                .collect()
        };
        let mut state = vec![ZERO; d * d];
        for (i, &s) in sch.coeffs.iter().enumerate() {
            state[i * d + i] = Complex64::new(s, 0.0);
        }
        QuantumModel {
            da: d,
            db: d,
            alice: rotate(alice, l),
            bob: rotate(bob, r),
            psi: StateVector::normalized(state).expect("nonzero Schmidt coefficients"),
        }
    }

    /// Schmidt coefficients of ψ, descending.
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        schmidt(&self.psi, self.da, self.db).expect("dimensions checked").coeffs
    }

    /// S1 ⊗ S2 on (A1 ⊗ A2) ⊗ (B1 ⊗ B2); question (x1, x2) sits at `x1 * |X2| + x2`.
    pub fn tensor(&self, other: &Self) -> Self {
        let combine = |p: &[Vec<CMatrix>], q: &[Vec<CMatrix>]| -> Vec<Vec<CMatrix>> {
            let mut out = Vec::new();
            for e1 in p {
                for e2 in q {
                    let mut effects = Vec::new();
                    for m1 in e1 {
                        for m2 in e2 {
                            effects.push(m1.kron(m2));
                        }
                    }
                    out.push(effects);
                }
            }
            out
        };
        let (da1, db1, da2, db2) = (self.da, self.db, other.da, other.db);
        let (v1, v2) = (self.psi.amplitudes(), other.psi.amplitudes());
        let db = db1 * db2;
        let mut amps = vec![ZERO; da1 * da2 * db];
        for a1 in 0..da1 {
            for a2 in 0..da2 {
                for b1 in 0..db1 {
                    for b2 in 0..db2 {
                        amps[(a1 * da2 + a2) * db + b1 * db2 + b2] = v1[a1 * db1 + b1] * v2[a2 * db2 + b2];
                    }
                }
            }
        }
        QuantumModel {
            da: da1 * da2,
            db,
            alice: combine(&self.alice, &other.alice),
            bob: combine(&self.bob, &other.bob),
            psi: StateVector::normalized(amps).expect("product of unit vectors"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::word;
    use crate::games::{game_polynomial, winning_probability, NonlocalGame};
    use crate::linalg::{c, reduced_density, Side};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ideal_chsh_correlation() {
        let p = QuantumModel::chsh_ideal().correlation();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        let sign = if (a ^ b ^ (x & y)) == 0 { 1.0 } else { -1.0 };
                        assert!((p.get(a, b, x, y) - (1.0 + sign * s) / 4.0).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic_product_model() {
        let zero = CMatrix::diag_real(&[1.0, 0.0]);
        let one = CMatrix::diag_real(&[0.0, 1.0]);
        let povm = vec![vec![zero.clone(), one.clone()]];
        let m = QuantumModel::new(povm.clone(), povm, StateVector::basis(4, 0)).unwrap();
        let p = m.correlation();
        assert_eq!(p.get(0, 0, 0, 0), 1.0);
        assert_eq!(p.get(1, 0, 0, 0), 0.0);
        assert_eq!(p.get(0, 1, 0, 0), 0.0);
        let f = m.flags(1e-9);
        assert!(f.projective);
        assert!(!f.full_rank);
    }

    #[test]
    fn invalid_effects_name_the_failure() {
        let bad = vec![vec![CMatrix::diag_real(&[1.3, 0.5]), CMatrix::diag_real(&[-0.3, 0.5])]];
        let good = vec![vec![CMatrix::identity(2)]];
        let err = QuantumModel::new(bad, good, StateVector::basis(4, 0)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alice effect x=0 a=1"), "{msg}");
        assert!(msg.contains("min eigenvalue"), "{msg}");

        let incomplete = vec![vec![CMatrix::diag_real(&[1.0, 0.0]), CMatrix::diag_real(&[0.0, 0.5])]];
        let err =
            QuantumModel::new(vec![vec![CMatrix::identity(2)]], incomplete, StateVector::basis(4, 0)).unwrap_err();
        assert!(err.to_string().contains("bob question 0 completeness"));
    }

    #[test]
    fn ideal_flags() {
        let f = QuantumModel::chsh_ideal().flags(1e-9);
        assert!(f.projective && f.full_rank && f.centrally_supported);
    }

    #[test]
    fn half_identity_effect_is_not_projective() {
        let half = CMatrix::identity(2).scale_real(0.5);
        let povm = vec![vec![half.clone(), half]];
        let m = QuantumModel::new(povm.clone(), povm, StateVector::max_entangled(2)).unwrap();
        assert!(!m.flags(1e-9).projective);
    }

    #[test]
    fn state_functional_matches_correlation() {
        let m = QuantumModel::chsh_ideal();
        let p = m.correlation();
        assert!((m.evaluate_monomial(&[], &[]).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        for (x, y, a, b) in [(0, 0, 0, 0), (1, 1, 0, 1), (1, 0, 1, 1)] {
            let f = m
                .evaluate_monomial(&word(&[&alice_pvm_name(x, a)]), &word(&[&bob_pvm_name(y, b)]))
                .unwrap();
            assert!((f.re - p.get(a, b, x, y)).abs() < 1e-15 && f.im.abs() < 1e-15);
        }
        let u = word(&[&alice_pvm_name(0, 0), &alice_pvm_name(1, 0)]);
        let direct = m.expectation(&m.alice(0, 0).matmul(m.alice(1, 0)), &CMatrix::identity(2));
        let f = m.evaluate_monomial(&u, &[]).unwrap();
        assert!((f - direct).norm() < 1e-15);
        let uu = word(&[&alice_pvm_name(1, 0), &alice_pvm_name(0, 0)]);
        assert!((m.evaluate_monomial(&uu, &[]).unwrap() - f.conj()).norm() < 1e-15);
        assert!(matches!(
            m.evaluate_monomial(&word(&["zz"]), &[]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn polynomial_path_matches_correlation_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = NonlocalGame::chsh();
        let phi = game_polynomial(&g);
        for _ in 0..5 {
            let m = QuantumModel::random_projective(&mut rng, (2, 2, 2, 2), 3, 2);
            let w = winning_probability(&g, &m.correlation()).unwrap();
            let f = m.evaluate_state(&phi).unwrap();
            assert!((w - f.re).abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_form_pads_and_diagonalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = QuantumModel::random_povm(&mut rng, (2, 3, 2, 2), 2, 3);
        let b = m.balanced_form();
        assert_eq!((b.dim_a(), b.dim_b()), (3, 3));
        assert!(m.correlation().max_abs_diff(&b.correlation()) < 1e-12);
        let lam = m.schmidt_coefficients();
        let diag: Vec<f64> = (0..3).map(|i| lam.get(i).copied().unwrap_or(0.0).powi(2)).collect();
        for keep in [Side::A, Side::B] {
            let rho = reduced_density(b.state(), 3, 3, keep).unwrap();
            assert!(rho.matrix().approx_eq(&CMatrix::diag_real(&diag), 1e-12));
        }
        let bb = b.balanced_form();
        assert!(b.correlation().max_abs_diff(&bb.correlation()) < 1e-12);
    }

    #[test]
    fn balanced_product_state() {
        let zero = CMatrix::diag_real(&[1.0, 0.0]);
        let one = CMatrix::diag_real(&[0.0, 1.0]);
        let povm = vec![vec![zero, one]];
        let m = QuantumModel::new(povm.clone(), povm, StateVector::basis(4, 3)).unwrap();
        let lam = m.balanced_form().schmidt_coefficients();
        assert!((lam[0] - 1.0).abs() < 1e-14 && lam[1].abs() < 1e-14);
    }

    #[test]
    fn tensor_model_correlation_factorizes() {
        let m = QuantumModel::chsh_ideal();
        let t = m.tensor(&m);
        let (p1, pt) = (m.correlation(), t.correlation());
        let got = pt.get(3, 1, 2, 1);
        // a = (1,1), b = (0,1), x = (1,0), y = (0,1)
        let want = p1.get(1, 0, 1, 0) * p1.get(1, 1, 0, 1);
        assert!((got - want).abs() < 1e-14);
    }
}
