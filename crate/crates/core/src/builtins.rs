//! Games, ideal strategies and determining pairs that need no input files.

use crate::algebras::{chsh_pair, synchronous_pair, xor_pair, DeterminingPair};
use crate::error::{Error, Result};
use crate::games::{xor_biases, NonlocalGame, SyncGame, XorGame};
use crate::linalg::{CMatrix, StateVector};
use crate::strategies::QuantumModel;

pub const GAME_NAMES: [&str; 3] = ["chsh", "k3-coloring", "chsh-parallel-2"];
pub const PAIR_NAMES: [&str; 3] = ["chsh", "chsh-xor", "k3-coloring"];

/// A shipped game with its ideal strategy and (when one is known) a determining pair.
#[derive(Debug, Clone)]
pub struct BuiltinGame {
    pub name: &'static str,
    pub game: NonlocalGame,
    pub ideal: QuantumModel,
    pub quantum_value: f64,
    pub pair: Option<DeterminingPair>,
}

pub fn tsirelson_value() -> f64 {
    (2.0 + std::f64::consts::SQRT_2) / 4.0
}

/// On |φ₃⟩ both players answer (c + v) mod 3 after measuring color c in the computational basis.
pub fn k3_perfect_strategy() -> QuantumModel {
    let shifted = |v: usize| -> Vec<CMatrix> {
        (0..3)
            .map(|a| {
                let mut d = [0.0; 3];
                d[(a + 3 - v) % 3] = 1.0;
                CMatrix::diag_real(&d)
            })
            .collect()
    };
    let povms: Vec<Vec<CMatrix>> = (0..3).map(shifted).collect();
    QuantumModel::new(povms.clone(), povms, StateVector::max_entangled(3)).expect("permuted basis projections")
}

pub fn game(name: &str) -> Result<BuiltinGame> {
    match name {
        "chsh" => Ok(BuiltinGame {
            name: "chsh",
            game: NonlocalGame::chsh(),
            ideal: QuantumModel::chsh_ideal(),
            quantum_value: tsirelson_value(),
            pair: Some(chsh_pair()),
        }),
        "k3-coloring" => Ok(BuiltinGame {
            name: "k3-coloring",
            game: SyncGame::k3_coloring().to_game(),
            ideal: k3_perfect_strategy(),
            quantum_value: 1.0,
            pair: Some(synchronous_pair(&SyncGame::k3_coloring())),
        }),
        // XOR games are multiplicative under parallel repetition, so w_q = w_q(CHSH)².
        "chsh-parallel-2" => {
            let g = NonlocalGame::chsh();
            let s = QuantumModel::chsh_ideal();
            Ok(BuiltinGame {
                name: "chsh-parallel-2",
                game: g.product(&g),
                ideal: s.tensor(&s),
                quantum_value: tsirelson_value().powi(2),
                pair: None,
            })
        }
        other => Err(Error::invalid(format!(
            "unknown builtin game '{other}' (expected one of {})",
            GAME_NAMES.join(", ")
        ))),
    }
}

/// Determining pairs by name; `chsh-xor` is the XOR-game pair built from the ideal biases.
pub fn pair(name: &str) -> Result<DeterminingPair> {
    match name {
        "chsh" => Ok(chsh_pair()),
        "chsh-xor" => {
            let g = XorGame::chsh();
            xor_pair(&g, &xor_biases(&g, &QuantumModel::chsh_ideal())?)
        }
        "k3-coloring" => Ok(synchronous_pair(&SyncGame::k3_coloring())),
        other => Err(Error::invalid(format!(
            "unknown determining pair '{other}' (expected one of {})",
            PAIR_NAMES.join(", ")
        ))),
    }
}
