//! Free *-algebra polynomials, finite-dimensional representations, and determining pairs.

mod clifford;
mod pairs;
mod poly;
mod rep;
mod structure;
mod tracial;

use std::collections::BTreeMap;

pub use clifford::{clifford_rep, clifford_residual};
pub use pairs::{chsh_pair, synchronous_pair, xor_pair, DeterminingPair, RobustnessProfile};
pub use poly::{word, word_adjoint, Letter, StarPolynomial, TensorPolynomial, Word, PRUNE_TOL};
pub use rep::{min_eigenvalue, BipartiteRep, RepKind, Representation};
pub use structure::{commutant_dim, is_irreducible};
pub use tracial::{gns_from_irrep, GnsTriple, TracialState};

/// Alice's projection for answer `a` to question `x`.
pub fn alice_pvm_name(x: usize, a: usize) -> String {
    format!("m{x}_{a}")
}

/// Bob's projection for answer `b` to question `y`.
pub fn bob_pvm_name(y: usize, b: usize) -> String {
    format!("n{y}_{b}")
}

/// Binary observable name such as `a0` or `b1`.
pub fn obs_name(prefix: char, q: usize) -> String {
    format!("{prefix}{q}")
}

/// b_y ↦ n^y_0 − n^y_1 for every question of Bob.
pub fn bob_observable_substitution(questions: usize) -> BTreeMap<String, StarPolynomial> {
    (0..questions)
        .map(|y| {
            let p = StarPolynomial::gen(&bob_pvm_name(y, 0)).sub(&StarPolynomial::gen(&bob_pvm_name(y, 1)));
            (obs_name('b', y), p)
        })
        .collect()
}

/// a_x ↦ m^x_0 − m^x_1 for every question of Alice.
pub fn alice_observable_substitution(questions: usize) -> BTreeMap<String, StarPolynomial> {
    (0..questions)
        .map(|x| {
            let p = StarPolynomial::gen(&alice_pvm_name(x, 0)).sub(&StarPolynomial::gen(&alice_pvm_name(x, 1)));
            (obs_name('a', x), p)
        })
        .collect()
}
