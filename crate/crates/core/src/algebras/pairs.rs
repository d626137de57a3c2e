use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::poly::StarPolynomial;
use super::{bob_observable_substitution, bob_pvm_name};
use crate::error::{Error, Result};
use crate::games::{SyncGame, XorBiases, XorGame};

/// ν(ε) = constant · ε^exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessProfile {
    pub constant: f64,
    pub exponent: f64,
}

impl Default for RobustnessProfile {
    fn default() -> Self {
        RobustnessProfile {
            constant: 1.0,
            exponent: 0.25,
        }
    }
}

impl RobustnessProfile {
    pub fn eval(&self, eps: f64) -> f64 {
        self.constant * eps.max(0.0).powf(self.exponent)
    }
}

/// γ maps Alice's projection m^x_a to a polynomial in Bob's projections;
/// `relations` lists polynomials that must vanish on Bob's side.
#[derive(Debug, Clone)]
pub struct DeterminingPair {
    pub label: String,
    pub gamma: BTreeMap<(usize, usize), StarPolynomial>,
    pub relations: Vec<StarPolynomial>,
    pub nu: RobustnessProfile,
}

impl DeterminingPair {
    pub fn gamma_of(&self, x: usize, a: usize) -> Result<&StarPolynomial> {
        self.gamma
            .get(&(x, a))
            .ok_or_else(|| Error::invalid(format!("determining pair has no image for m{x}_{a}")))
    }
}

/// γ(m^x_a) = n^x_a, relations n^x_a n^y_b for every losing (a, b | x, y).
pub fn synchronous_pair(g: &SyncGame) -> DeterminingPair {
    let n = |q: usize, a: usize| StarPolynomial::gen(&bob_pvm_name(q, a));
    let mut gamma = BTreeMap::new();
    for x in 0..g.num_x() {
        for a in 0..g.num_a() {
            gamma.insert((x, a), n(x, a));
        }
    }
    let mut relations = Vec::new();
    for x in 0..g.num_x() {
        for y in 0..g.num_x() {
            for a in 0..g.num_a() {
                for b in 0..g.num_a() {
                    if !g.wins(a, b, x, y) {
                        relations.push(n(x, a).mul(&n(y, b)));
                    }
                }
            }
        }
    }
    DeterminingPair {
        label: "synchronous".into(),
        gamma,
        relations,
        nu: RobustnessProfile::default(),
    }
}

/// Σ_j ω_ij (n^j_0 − n^j_1) for row i.
fn row_combination(g: &XorGame, i: usize) -> StarPolynomial {
    let sub = bob_observable_substitution(g.cols());
    let mut acc = StarPolynomial::zero();
    for (j, w) in g.omega()[i].iter().enumerate() {
        acc = acc.add(&sub[&format!("b{j}")].scale_real(*w));
    }
    acc
}

/// γ^i_a = ½(1 − (1/r_i) Σ_j ω_ij (1 − 2 n^j_a)),
/// relations (Σ_j ω_ij (n^j_0 − n^j_1))² − r_i².
pub fn xor_pair(g: &XorGame, biases: &XorBiases) -> Result<DeterminingPair> {
    if biases.rows.len() != g.rows() {
        return Err(Error::invalid(format!(
            "{} row biases for a cost matrix with {} rows",
            biases.rows.len(),
            g.rows()
        )));
    }
    if let Some(i) = biases.rows.iter().position(|r| !(r.abs() > 1e-12) || !r.is_finite()) {
        return Err(Error::Degenerate(format!("row bias r_{i} vanishes")));
    }
    let mut gamma = BTreeMap::new();
    let mut relations = Vec::new();
    for i in 0..g.rows() {
        let ri = biases.rows[i];
        for a in 0..2 {
            let mut inner = StarPolynomial::zero();
            for (j, w) in g.omega()[i].iter().enumerate() {
                let term = StarPolynomial::one().sub(&StarPolynomial::gen(&bob_pvm_name(j, a)).scale_real(2.0));
                inner = inner.add(&term.scale_real(*w));
            }
            let poly = StarPolynomial::one().sub(&inner.scale_real(1.0 / ri)).scale_real(0.5);
            gamma.insert((i, a), poly);
        }
        let s = row_combination(g, i);
        relations.push(s.mul(&s).sub(&StarPolynomial::one().scale_real(ri * ri)));
    }
    Ok(DeterminingPair {
        label: "xor".into(),
        gamma,
        relations,
        nu: RobustnessProfile::default(),
    })
}

/// The XOR pair of CHSH with its relations presented as the single
/// anticommutator b0 b1 + b1 b0.
pub fn chsh_pair() -> DeterminingPair {
    let g = XorGame::chsh();
    let r = 2f64.sqrt() / 4.0;
    let mut pair = xor_pair(
        &g,
        &XorBiases {
            rows: vec![r, r],
            cols: vec![r, r],
        },
    )
    .expect("nonzero biases");
    let sub = bob_observable_substitution(2);
    let anti = sub["b0"].mul(&sub["b1"]).add(&sub["b1"].mul(&sub["b0"]));
    pair.relations = vec![anti];
    pair.label = "chsh".into();
    pair
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::{RepKind, Representation};
    use crate::linalg::{pauli, CMatrix};

    fn chsh_bob_pvm() -> Representation {
        let id = CMatrix::identity(2);
        let mut images = BTreeMap::new();
        for (y, o) in [(0, pauli::x()), (1, pauli::z())] {
            images.insert(bob_pvm_name(y, 0), (&id + &o).scale_real(0.5));
            images.insert(bob_pvm_name(y, 1), (&id - &o).scale_real(0.5));
        }
        let questions = (0..2).map(|y| (0..2).map(|b| bob_pvm_name(y, b)).collect()).collect();
        Representation::new(images, RepKind::Pvm { questions }).unwrap()
    }

    #[test]
    fn chsh_gamma_gives_rotated_observables() {
        let r = 2f64.sqrt() / 4.0;
        let pair = xor_pair(
            &XorGame::chsh(),
            &XorBiases {
                rows: vec![r, r],
                cols: vec![r, r],
            },
        )
        .unwrap();
        let rep = chsh_bob_pvm();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a0 = (&pauli::x() + &pauli::z()).scale_real(s);
        let a1 = (&pauli::x() - &pauli::z()).scale_real(s);
        for (x, obs) in [(0, a0), (1, a1)] {
            let p0 = rep.eval(pair.gamma_of(x, 0).unwrap()).unwrap();
            let p1 = rep.eval(pair.gamma_of(x, 1).unwrap()).unwrap();
            assert!((&p0 - &p1).approx_eq(&obs, 1e-14));
            assert!((&p0 + &p1).approx_eq(&CMatrix::identity(2), 1e-14));
        }
    }

    #[test]
    fn xor_relations_are_anticommutators() {
        let r = 2f64.sqrt() / 4.0;
        let pair = xor_pair(
            &XorGame::chsh(),
            &XorBiases {
                rows: vec![r, r],
                cols: vec![r, r],
            },
        )
        .unwrap();
        // on a commuting pair {B0, B1} = 2I, so the relations are ±1/8
        let id = CMatrix::identity(1);
        let mut images = BTreeMap::new();
        for y in 0..2 {
            images.insert(bob_pvm_name(y, 0), id.clone());
            images.insert(bob_pvm_name(y, 1), CMatrix::zeros(1, 1));
        }
        let rep = Representation::general(images).unwrap();
        let v0 = rep.eval(&pair.relations[0]).unwrap()[(0, 0)].re;
        let v1 = rep.eval(&pair.relations[1]).unwrap()[(0, 0)].re;
        assert!((v0 - 0.125).abs() < 1e-15);
        assert!((v1 + 0.125).abs() < 1e-15);
        for rel in &pair.relations {
            assert!(chsh_bob_pvm().eval(rel).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn zero_bias_is_degenerate() {
        let err = xor_pair(
            &XorGame::chsh(),
            &XorBiases {
                rows: vec![0.0, 0.3],
                cols: vec![0.3, 0.3],
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn chsh_anticommutator_vanishes_on_ideal_rep() {
        let pair = chsh_pair();
        assert_eq!(pair.relations.len(), 1);
        assert!(chsh_bob_pvm().eval(&pair.relations[0]).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn sync_pair_relations_count() {
        let g = SyncGame::k3_coloring();
        let pair = synchronous_pair(&g);
        // same vertex: 6 losing pairs per vertex; distinct vertices: 3 per ordered pair
        assert_eq!(pair.relations.len(), 3 * 6 + 6 * 3);
        assert_eq!(pair.gamma.len(), 9);
    }

    #[test]
    fn profile_eval() {
        let nu = RobustnessProfile::default();
        assert!((nu.eval(1e-4) - 0.1).abs() < 1e-15);
        assert_eq!(nu.eval(-1.0), 0.0);
    }
}
