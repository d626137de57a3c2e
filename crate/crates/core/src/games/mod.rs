//! Nonlocal games, their game polynomials, and winning probabilities.

mod seesaw;

pub use seesaw::{see_saw_optimize, SeeSawOptions, SeeSawOutcome};

use std::collections::BTreeMap;

use crate::algebras::{
    alice_observable_substitution, alice_pvm_name, bob_observable_substitution, bob_pvm_name, obs_name, word,
    StarPolynomial, TensorPolynomial,
};
use crate::error::{Error, Result};
use crate::linalg::{norm, r};
use crate::strategies::QuantumModel;

const SUM_TOL: f64 = 1e-10;

/// G = (X, Y, A, B, μ, V) with a shared answer set per player.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlocalGame {
    x: Vec<String>,
    y: Vec<String>,
    a: Vec<String>,
    b: Vec<String>,
    /// μ(x, y) at `x * |Y| + y`
    mu: Vec<f64>,
    /// V(a, b | x, y) at `((x * |Y| + y) * |A| + a) * |B| + b`
    v: Vec<bool>,
}

fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl NonlocalGame {
    /// Builds a game from nested tables `mu[x][y]` and `v[x][y][a][b]`.
    pub fn new(
        x: Vec<String>,
        y: Vec<String>,
        a: Vec<String>,
        b: Vec<String>,
        mu: &[Vec<f64>],
        v: &[Vec<Vec<Vec<bool>>>],
    ) -> Result<Self> {
        let (nx, ny, na, nb) = (x.len(), y.len(), a.len(), b.len());
        if nx == 0 || ny == 0 || na == 0 || nb == 0 {
            return Err(Error::invalid("question and answer sets must be nonempty"));
        }
        if mu.len() != nx || mu.iter().any(|row| row.len() != ny) {
            return Err(Error::invalid(format!("mu must be {nx}x{ny}")));
        }
        let shape_ok = v.len() == nx
            && v.iter().all(|vx| {
                vx.len() == ny
                    && vx
                        .iter()
                        .all(|vxy| vxy.len() == na && vxy.iter().all(|row| row.len() == nb))
            });
        if !shape_ok {
            return Err(Error::invalid(format!("V must be nested {nx}x{ny}x{na}x{nb}")));
        }
        let flat_mu: Vec<f64> = mu.iter().flatten().copied().collect();
        let flat_v: Vec<bool> = v.iter().flatten().flatten().flatten().copied().collect();
        Self::from_flat(x, y, a, b, flat_mu, flat_v)
    }

    fn from_flat(
        x: Vec<String>,
        y: Vec<String>,
        a: Vec<String>,
        b: Vec<String>,
        mu: Vec<f64>,
        v: Vec<bool>,
    ) -> Result<Self> {
        if mu.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::invalid("mu entries must be finite and nonnegative"));
        }
        let total: f64 = mu.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::validation("question distribution sum", (total - 1.0).abs()));
        }
        Ok(NonlocalGame { x, y, a, b, mu, v })
    }

    /// Index-labelled game from closures.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        na: usize,
        nb: usize,
        mu: impl Fn(usize, usize) -> f64,
        v: impl Fn(usize, usize, usize, usize) -> bool,
    ) -> Result<Self> {
        let mut flat_mu = Vec::with_capacity(nx * ny);
        let mut flat_v = Vec::with_capacity(nx * ny * na * nb);
        for x in 0..nx {
            for y in 0..ny {
                flat_mu.push(mu(x, y));
                for a in 0..na {
                    for b in 0..nb {
                        flat_v.push(v(a, b, x, y));
                    }
                }
            }
        }
        if nx == 0 || ny == 0 || na == 0 || nb == 0 {
            return Err(Error::invalid("question and answer sets must be nonempty"));
        }
        Self::from_flat(
            index_labels(nx),
            index_labels(ny),
            index_labels(na),
            index_labels(nb),
            flat_mu,
            flat_v,
        )
    }

    pub fn chsh() -> Self {
        Self::from_fn(2, 2, 2, 2, |_, _| 0.25, |a, b, x, y| (a ^ b) == (x & y)).expect("valid")
    }

    pub fn num_x(&self) -> usize {
        self.x.len()
    }
    pub fn num_y(&self) -> usize {
        self.y.len()
    }
    pub fn num_a(&self) -> usize {
        self.a.len()
    }
    pub fn num_b(&self) -> usize {
        self.b.len()
    }
    pub fn x_labels(&self) -> &[String] {
        &self.x
    }
    pub fn y_labels(&self) -> &[String] {
        &self.y
    }
    pub fn a_labels(&self) -> &[String] {
        &self.a
    }
    pub fn b_labels(&self) -> &[String] {
        &self.b
    }

    pub fn mu(&self, x: usize, y: usize) -> f64 {
        self.mu[x * self.y.len() + y]
    }

    pub fn wins(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        self.v[((x * self.y.len() + y) * self.a.len() + a) * self.b.len() + b]
    }

    /// Nested `mu[x][y]`.
    pub fn mu_table(&self) -> Vec<Vec<f64>> {
        self.mu.chunks(self.y.len()).map(<[f64]>::to_vec).collect()
    }

    /// Nested `V[x][y][a][b]`.
    pub fn v_table(&self) -> Vec<Vec<Vec<Vec<bool>>>> {
        (0..self.num_x())
            .map(|x| {
                (0..self.num_y())
                    .map(|y| {
                        (0..self.num_a())
                            .map(|a| (0..self.num_b()).map(|b| self.wins(a, b, x, y)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// (x, y, a, b) for every winning tuple with μ(x, y) > 0.
    pub fn winning_tuples(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        let (nx, ny, na, nb) = (self.num_x(), self.num_y(), self.num_a(), self.num_b());
        (0..nx).flat_map(move |x| {
            (0..ny).flat_map(move |y| {
                (0..na).flat_map(move |a| {
                    (0..nb).filter_map(move |b| (self.mu(x, y) > 0.0 && self.wins(a, b, x, y)).then_some((x, y, a, b)))
                })
            })
        })
    }

    /// G1 × G2 with pairs of questions and answers; pair (i, j) sits at `i * n2 + j`.
    pub fn product(&self, other: &Self) -> Self {
        let pair = |l: &[String], r: &[String]| -> Vec<String> {
            l.iter()
                .flat_map(|p| r.iter().map(move |q| format!("({p},{q})")))
                .collect()
        };
        let (nx2, ny2, na2, nb2) = (other.num_x(), other.num_y(), other.num_a(), other.num_b());
        let mut mu = Vec::new();
        let mut v = Vec::new();
        for x in 0..self.num_x() * nx2 {
            for y in 0..self.num_y() * ny2 {
                let (x1, x2, y1, y2) = (x / nx2, x % nx2, y / ny2, y % ny2);
                mu.push(self.mu(x1, y1) * other.mu(x2, y2));
                for a in 0..self.num_a() * na2 {
                    for b in 0..self.num_b() * nb2 {
                        let (a1, a2, b1, b2) = (a / na2, a % na2, b / nb2, b % nb2);
                        v.push(self.wins(a1, b1, x1, y1) && other.wins(a2, b2, x2, y2));
                    }
                }
            }
        }
        NonlocalGame {
            x: pair(&self.x, &other.x),
            y: pair(&self.y, &other.y),
            a: pair(&self.a, &other.a),
            b: pair(&self.b, &other.b),
            mu,
            v,
        }
    }
}

/// Conditional distribution p(a, b | x, y), indexed like the game predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    nx: usize,
    ny: usize,
    na: usize,
    nb: usize,
    p: Vec<f64>,
}

impl Correlation {
    pub fn from_fn(
        nx: usize,
        ny: usize,
        na: usize,
        nb: usize,
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut p = Vec::with_capacity(nx * ny * na * nb);
        for x in 0..nx {
            for y in 0..ny {
                for a in 0..na {
                    for b in 0..nb {
                        p.push(f(a, b, x, y));
                    }
                }
            }
        }
        let c = Correlation { nx, ny, na, nb, p };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.p.iter().any(|v| !v.is_finite() || *v < -SUM_TOL) {
            return Err(Error::invalid("correlation entries must be finite and nonnegative"));
        }
        for x in 0..self.nx {
            for y in 0..self.ny {
                let s: f64 = (0..self.na)
                    .flat_map(|a| (0..self.nb).map(move |b| (a, b)))
                    .map(|(a, b)| self.get(a, b, x, y))
                    .sum();
                if (s - 1.0).abs() > SUM_TOL {
                    return Err(Error::validation(
                        format!("correlation row sum at x={x} y={y}"),
                        (s - 1.0).abs(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[((x * self.ny + y) * self.na + a) * self.nb + b]
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.nx, self.ny, self.na, self.nb)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.p
            .iter()
            .zip(&other.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Nested `p[x][y][a][b]`.
    pub fn table(&self) -> Vec<Vec<Vec<Vec<f64>>>> {
        (0..self.nx)
            .map(|x| {
                (0..self.ny)
                    .map(|y| {
                        (0..self.na)
                            .map(|a| (0..self.nb).map(|b| self.get(a, b, x, y)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

/// w(G; p) = Σ μ(x,y) V(a,b|x,y) p(a,b|x,y).
pub fn winning_probability(g: &NonlocalGame, p: &Correlation) -> Result<f64> {
    if p.shape() != (g.num_x(), g.num_y(), g.num_a(), g.num_b()) {
        return Err(Error::invalid(format!(
            "correlation shape {:?} does not match game shape {:?}",
            p.shape(),
            (g.num_x(), g.num_y(), g.num_a(), g.num_b())
        )));
    }
    Ok(g.winning_tuples()
        .map(|(x, y, a, b)| g.mu(x, y) * p.get(a, b, x, y))
        .sum())
}

/// Φ_G = Σ μ(x,y) V(a,b|x,y) m^x_a ⊗ n^y_b over PVM generators.
pub fn game_polynomial(g: &NonlocalGame) -> TensorPolynomial {
    let mut phi = TensorPolynomial::zero();
    for (x, y, a, b) in g.winning_tuples() {
        phi.add_term(
            r(g.mu(x, y)),
            vec![crate::algebras::Letter::new(alice_pvm_name(x, a))],
            vec![crate::algebras::Letter::new(bob_pvm_name(y, b))],
        );
    }
    phi
}

/// Φ_G rewritten over binary observables a_x = m^x_0 − m^x_1, b_y = n^y_0 − n^y_1.
/// Requires two answers per player.
pub fn game_polynomial_observables(g: &NonlocalGame) -> Result<TensorPolynomial> {
    if g.num_a() != 2 || g.num_b() != 2 {
        return Err(Error::invalid("observable form needs binary answers on both sides"));
    }
    let half = |prefix: char, q: usize, a: usize| {
        let sign = if a == 0 { 0.5 } else { -0.5 };
        StarPolynomial::one()
            .scale_real(0.5)
            .add(&StarPolynomial::gen(&obs_name(prefix, q)).scale_real(sign))
    };
    let mut left = BTreeMap::new();
    for x in 0..g.num_x() {
        for a in 0..2 {
            left.insert(alice_pvm_name(x, a), half('a', x, a));
        }
    }
    let mut right = BTreeMap::new();
    for y in 0..g.num_y() {
        for b in 0..2 {
            right.insert(bob_pvm_name(y, b), half('b', y, b));
        }
    }
    Ok(game_polynomial(g).substitute(&left, &right))
}

/// 1/2 + (1/4)(a₀⊗b₀ + a₀⊗b₁ + a₁⊗b₀ − a₁⊗b₁) over PVM generators.
///
/// The observable part carries weight 1/4, twice that of Φ_CHSH, so its
/// spectrum is not bounded by the winning probability.
pub fn chsh_quarter_weight_polynomial() -> TensorPolynomial {
    let mut p = TensorPolynomial::zero();
    p.add_term(r(0.5), Vec::new(), Vec::new());
    for x in 0..2 {
        for y in 0..2 {
            let sign = if x & y == 1 { -0.25 } else { 0.25 };
            p.add_term(r(sign), word(&[&obs_name('a', x)]), word(&[&obs_name('b', y)]));
        }
    }
    p.substitute(&alice_observable_substitution(2), &bob_observable_substitution(2))
}

/// Binary XOR game given by its cost matrix ω_ij = (−1)^{t_ij} μ(i, j).
#[derive(Debug, Clone, PartialEq)]
pub struct XorGame {
    omega: Vec<Vec<f64>>,
}

impl XorGame {
    /// Cost matrix with Σ|ω_ij| = 1 and no all-zero row or column.
    pub fn new(omega: Vec<Vec<f64>>) -> Result<Self> {
        let g = Self::unnormalized(omega)?;
        let total: f64 = g.omega.iter().flatten().map(|w| w.abs()).sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::validation("cost matrix absolute sum", (total - 1.0).abs()));
        }
        Ok(g)
    }

    /// Cost matrix up to a positive scale; `to_game` renormalizes.
    pub fn unnormalized(omega: Vec<Vec<f64>>) -> Result<Self> {
        let ni = omega.len();
        let nj = omega.first().map_or(0, Vec::len);
        if ni == 0 || nj == 0 || omega.iter().any(|row| row.len() != nj) {
            return Err(Error::invalid("cost matrix must be a nonempty rectangle"));
        }
        if omega.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::invalid("cost matrix entries must be finite"));
        }
        if let Some(i) = (0..ni).find(|&i| omega[i].iter().all(|w| *w == 0.0)) {
            return Err(Error::Degenerate(format!("cost matrix row {i} is zero")));
        }
        if let Some(j) = (0..nj).find(|&j| omega.iter().all(|row| row[j] == 0.0)) {
            return Err(Error::Degenerate(format!("cost matrix column {j} is zero")));
        }
        Ok(XorGame { omega })
    }

    pub fn chsh() -> Self {
        XorGame::new(vec![vec![0.25, 0.25], vec![0.25, -0.25]]).expect("valid")
    }

    pub fn omega(&self) -> &[Vec<f64>] {
        &self.omega
    }

    pub fn rows(&self) -> usize {
        self.omega.len()
    }

    pub fn cols(&self) -> usize {
        self.omega[0].len()
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::unnormalized(
            self.omega
                .iter()
                .map(|row| row.iter().map(|w| w * t).collect())
                .collect(),
        )
    }

    /// μ = |ω| / Σ|ω|; win iff a ⊕ b = [ω_ij < 0].
    pub fn to_game(&self) -> NonlocalGame {
        let total: f64 = self.omega.iter().flatten().map(|w| w.abs()).sum();
        NonlocalGame::from_fn(
            self.rows(),
            self.cols(),
            2,
            2,
            |i, j| self.omega[i][j].abs() / total,
            |a, b, i, j| (a ^ b == 1) == (self.omega[i][j] < 0.0),
        )
        .expect("normalized by construction")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct XorBiases {
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
}

/// Row and column biases r_i = ‖Σ_j ω_ij (I⊗Y_j)ψ‖, c_j = ‖Σ_i ω_ij (X_i⊗I)ψ‖
/// read off a (candidate-)optimal binary-observable strategy.
pub fn xor_biases(g: &XorGame, s: &QuantumModel) -> Result<XorBiases> {
    if s.num_x() != g.rows() || s.num_y() != g.cols() || s.num_a() != 2 || s.num_b() != 2 {
        return Err(Error::invalid("strategy shape does not match the XOR game"));
    }
    let xa: Vec<Vec<num_complex::Complex64>> = (0..g.rows()).map(|i| s.alice_observable_on_state(i)).collect();
    let yb: Vec<Vec<num_complex::Complex64>> = (0..g.cols()).map(|j| s.bob_observable_on_state(j)).collect();
    let combine = |vecs: &[Vec<num_complex::Complex64>], weights: Vec<f64>| -> f64 {
        let mut acc = vec![num_complex::Complex64::new(0.0, 0.0); vecs[0].len()];
        for (v, w) in vecs.iter().zip(weights) {
            for (o, z) in acc.iter_mut().zip(v) {
                *o += z * w;
            }
        }
        norm(&acc)
    };
    let rows: Vec<f64> = (0..g.rows()).map(|i| combine(&yb, g.omega[i].clone())).collect();
    let cols: Vec<f64> = (0..g.cols())
        .map(|j| combine(&xa, g.omega.iter().map(|row| row[j]).collect()))
        .collect();
    if let Some(i) = rows.iter().position(|&v| v <= 1e-12) {
        return Err(Error::Degenerate(format!("row bias r_{i} vanishes")));
    }
    if let Some(j) = cols.iter().position(|&v| v <= 1e-12) {
        return Err(Error::Degenerate(format!("column bias c_{j} vanishes")));
    }
    Ok(XorBiases { rows, cols })
}

/// Synchronous game: common question/answer sets, uniform μ,
/// and V(a, a' | x, x) = 0 whenever a ≠ a'.
#[derive(Debug, Clone, PartialEq)]
pub struct SyncGame {
    x: Vec<String>,
    a: Vec<String>,
    /// V(a, b | x, y) at `((x * |X| + y) * |A| + a) * |A| + b`
    v: Vec<bool>,
}

impl SyncGame {
    pub fn from_fn(x: Vec<String>, a: Vec<String>, v: impl Fn(usize, usize, usize, usize) -> bool) -> Result<Self> {
        let (nx, na) = (x.len(), a.len());
        if nx == 0 || na == 0 {
            return Err(Error::invalid("question and answer sets must be nonempty"));
        }
        let mut flat = Vec::with_capacity(nx * nx * na * na);
        for qx in 0..nx {
            for qy in 0..nx {
                for aa in 0..na {
                    for bb in 0..na {
                        flat.push(v(aa, bb, qx, qy));
                    }
                }
            }
        }
        let g = SyncGame { x, a, v: flat };
        for q in 0..nx {
            for aa in 0..na {
                for bb in 0..na {
                    if aa != bb && g.wins(aa, bb, q, q) {
                        return Err(Error::invalid(format!("not synchronous: V({aa},{bb}|{q},{q}) = 1")));
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn from_table(x: Vec<String>, a: Vec<String>, v: &[Vec<Vec<Vec<bool>>>]) -> Result<Self> {
        let (nx, na) = (x.len(), a.len());
        let shape_ok = v.len() == nx
            && v.iter().all(|vx| {
                vx.len() == nx
                    && vx
                        .iter()
                        .all(|vxy| vxy.len() == na && vxy.iter().all(|row| row.len() == na))
            });
        if !shape_ok {
            return Err(Error::invalid(format!("V must be nested {nx}x{nx}x{na}x{na}")));
        }
        Self::from_fn(x, a, |aa, bb, qx, qy| v[qx][qy][aa][bb])
    }

    /// Graph coloring game: same vertex ⇒ same color, adjacent ⇒ different colors.
    pub fn coloring(vertices: usize, edges: &[(usize, usize)], colors: usize) -> Result<Self> {
        let adjacent = |u: usize, w: usize| edges.iter().any(|&(p, q)| (p == u && q == w) || (p == w && q == u));
        Self::from_fn(index_labels(vertices), index_labels(colors), |a, b, x, y| {
            if x == y {
                a == b
            } else if adjacent(x, y) {
                a != b
            } else {
                true
            }
        })
    }

    pub fn k3_coloring() -> Self {
        Self::coloring(3, &[(0, 1), (1, 2), (0, 2)], 3).expect("valid")
    }

    /// One question, one answer, always won.
    pub fn trivial() -> Self {
        Self::from_fn(vec!["0".into()], vec!["0".into()], |_, _, _, _| true).expect("valid")
    }

    pub fn num_x(&self) -> usize {
        self.x.len()
    }

    pub fn num_a(&self) -> usize {
        self.a.len()
    }

    pub fn x_labels(&self) -> &[String] {
        &self.x
    }

    pub fn a_labels(&self) -> &[String] {
        &self.a
    }

    pub fn wins(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        let (nx, na) = (self.x.len(), self.a.len());
        self.v[((x * nx + y) * na + a) * na + b]
    }

    pub fn v_table(&self) -> Vec<Vec<Vec<Vec<bool>>>> {
        let (nx, na) = (self.num_x(), self.num_a());
        (0..nx)
            .map(|x| {
                (0..nx)
                    .map(|y| {
                        (0..na)
                            .map(|a| (0..na).map(|b| self.wins(a, b, x, y)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_game(&self) -> NonlocalGame {
        let n = self.num_x();
        let w = 1.0 / (n * n) as f64;
        let mut g = NonlocalGame::from_fn(
            n,
            n,
            self.num_a(),
            self.num_a(),
            |_, _| w,
            |a, b, x, y| self.wins(a, b, x, y),
        )
        .expect("uniform distribution");
        g.x = self.x.clone();
        g.y = self.x.clone();
        g.a = self.a.clone();
        g.b = self.a.clone();
        g
    }
}

/// G1 × G2 for synchronous games; question (x1, x2) sits at `x1 * |X2| + x2`.
pub fn product_game(g1: &SyncGame, g2: &SyncGame) -> SyncGame {
    let pair = |l: &[String], r: &[String]| -> Vec<String> {
        l.iter()
            .flat_map(|p| r.iter().map(move |q| format!("({p},{q})")))
            .collect()
    };
    let (nx2, na2) = (g2.num_x(), g2.num_a());
    SyncGame::from_fn(pair(&g1.x, &g2.x), pair(&g1.a, &g2.a), |a, b, x, y| {
        g1.wins(a / na2, b / na2, x / nx2, y / nx2) && g2.wins(a % na2, b % na2, x % nx2, y % nx2)
    })
    .expect("product of synchronous games is synchronous")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebras::word;
    use crate::linalg::c;

    #[test]
    fn chsh_game_polynomial_observable_form() {
        let g = NonlocalGame::chsh();
        let phi = game_polynomial(&g);
        assert_eq!(phi.len(), 8);
        let obs = game_polynomial_observables(&g).unwrap();
        assert!((obs.coefficient(&[], &[]) - c(0.5, 0.0)).norm() < 1e-15);
        for (x, y, sign) in [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -1.0)] {
            let got = obs.coefficient(&word(&[&format!("a{x}")]), &word(&[&format!("b{y}")]));
            assert!((got - c(sign / 8.0, 0.0)).norm() < 1e-15, "a{x} b{y}: {got}");
        }
        // no single-sided terms survive
        assert_eq!(obs.len(), 5);
    }

    #[test]
    fn single_question_matching_game() {
        let g = NonlocalGame::from_fn(1, 1, 2, 2, |_, _| 1.0, |a, b, _, _| a == b).unwrap();
        let obs = game_polynomial_observables(&g).unwrap();
        assert!((obs.coefficient(&[], &[]) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((obs.coefficient(&word(&["a0"]), &word(&["b0"])) - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(obs.len(), 2);
    }

    #[test]
    fn chsh_uniform_correlation_wins_half() {
        let g = NonlocalGame::chsh();
        let p = Correlation::from_fn(2, 2, 2, 2, |_, _, _, _| 0.25).unwrap();
        assert!((winning_probability(&g, &p).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn chsh_classical_value_by_enumeration() {
        let g = NonlocalGame::chsh();
        let mut best: f64 = 0.0;
        for bits in 0..16u32 {
            let fa = |x: usize| ((bits >> x) & 1) as usize;
            let fb = |y: usize| ((bits >> (2 + y)) & 1) as usize;
            let p =
                Correlation::from_fn(2, 2, 2, 2, |a, b, x, y| f64::from(u8::from(a == fa(x) && b == fb(y)))).unwrap();
            best = best.max(winning_probability(&g, &p).unwrap());
        }
        assert!((best - 0.75).abs() < 1e-15);
        let zero = Correlation::from_fn(2, 2, 2, 2, |a, b, _, _| f64::from(u8::from(a == 0 && b == 0))).unwrap();
        assert!((winning_probability(&g, &zero).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn chsh_tsirelson_correlation() {
        let g = NonlocalGame::chsh();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = Correlation::from_fn(2, 2, 2, 2, |a, b, x, y| {
            let sign = if (a ^ b ^ (x & y)) == 0 { 1.0 } else { -1.0 };
            (1.0 + sign * s) / 4.0
        })
        .unwrap();
        let w = winning_probability(&g, &p).unwrap();
        assert!((w - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let p = Correlation::from_fn(1, 1, 2, 2, |_, _, _, _| 0.25).unwrap();
        assert!(winning_probability(&NonlocalGame::chsh(), &p).is_err());
    }

    #[test]
    fn invalid_games_rejected() {
        assert!(NonlocalGame::from_fn(2, 2, 2, 2, |_, _| 0.3, |_, _, _, _| true).is_err());
        assert!(NonlocalGame::from_fn(1, 2, 2, 2, |_, y| if y == 0 { 1.5 } else { -0.5 }, |_, _, _, _| true).is_err());
        assert!(XorGame::new(vec![vec![0.5, 0.0], vec![0.5, 0.0]]).is_err());
        assert!(XorGame::new(vec![vec![0.5, 0.5]]).is_ok());
        assert!(XorGame::new(vec![vec![0.4, 0.5]]).is_err());
    }

    #[test]
    fn xor_chsh_matches_general_chsh() {
        assert_eq!(XorGame::chsh().to_game(), NonlocalGame::chsh());
    }

    #[test]
    fn sync_invariant_enforced() {
        let bad = SyncGame::from_fn(vec!["0".into()], vec!["0".into(), "1".into()], |_, _, _, _| true);
        assert!(bad.is_err());
        assert!(SyncGame::k3_coloring().wins(0, 1, 0, 1));
        assert!(!SyncGame::k3_coloring().wins(1, 1, 0, 1));
        assert!(!SyncGame::k3_coloring().wins(0, 1, 2, 2));
    }

    #[test]
    fn product_with_trivial_game_relabels() {
        let g = SyncGame::k3_coloring();
        let p = product_game(&g, &SyncGame::trivial());
        assert_eq!(p.num_x(), 3);
        assert_eq!(p.num_a(), 3);
        assert_eq!(p.v_table(), g.v_table());
        assert_eq!(p.x_labels()[1], "(1,0)");
    }

    #[test]
    fn product_cardinality() {
        let g2 = SyncGame::coloring(2, &[(0, 1)], 2).unwrap();
        let g3 = SyncGame::k3_coloring();
        let p = product_game(&g2, &g3);
        assert_eq!(p.num_x(), 6);
        assert_eq!(p.num_a(), 6);
        let gp = p.to_game();
        assert!((gp.mu(0, 5) - 1.0 / 36.0).abs() < 1e-15);
    }
}
