//! JSON encodings of games, strategies and Gowers–Hatami inputs.
//!
//! Readers report the failing field path (and line/column for syntax errors)
//! through [`Error::InvalidInput`].

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebras::Representation;
use crate::config::Config;
use crate::error::{Error, Result};
use crate::games::{NonlocalGame, SyncGame, XorGame};
use crate::gowers_hatami::{cl2_anticommutator, cl2_decompositions, EpsilonRep, RDecomposition};
use crate::linalg::{CMatrix, DensityMatrix, StateVector};
use crate::strategies::QuantumModel;

/// Deserializes `text`, naming the offending field on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            Error::invalid(format!("malformed JSON: {inner}"))
        } else {
            Error::invalid(format!("malformed JSON at `{path}`: {inner}"))
        }
    })
}

/// Question or answer label; numbers are accepted and kept as their text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Label {
    Text(String),
    Int(i64),
}

impl Label {
    fn text(self) -> String {
        match self {
            Label::Text(s) => s,
            Label::Int(i) => i.to_string(),
        }
    }
}

fn labels(v: Vec<Label>) -> Vec<String> {
    v.into_iter().map(Label::text).collect()
}

#[derive(Deserialize)]
struct GameKind {
    #[serde(rename = "type")]
    kind: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneralGameFile {
    #[serde(rename = "type")]
    kind: String,
    #[serde(rename = "X")]
    x: Vec<Label>,
    #[serde(rename = "Y")]
    y: Vec<Label>,
    #[serde(rename = "A")]
    a: Vec<Label>,
    #[serde(rename = "B")]
    b: Vec<Label>,
    mu: Vec<Vec<f64>>,
    /// `V[x][y][a][b]`
    #[serde(rename = "V")]
    v: Vec<Vec<Vec<Vec<u8>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct XorGameFile {
    #[serde(rename = "type")]
    _kind: String,
    omega: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SyncGameFile {
    #[serde(rename = "type")]
    _kind: String,
    #[serde(rename = "X")]
    x: Vec<Label>,
    #[serde(rename = "A")]
    a: Vec<Label>,
    /// `V[x][y][a][b]`
    #[serde(rename = "V")]
    v: Vec<Vec<Vec<Vec<u8>>>>,
}

fn bits(v: Vec<Vec<Vec<Vec<u8>>>>) -> Result<Vec<Vec<Vec<Vec<bool>>>>> {
    let mut out = Vec::with_capacity(v.len());
    for (x, vx) in v.into_iter().enumerate() {
        let mut ox = Vec::with_capacity(vx.len());
        for (y, vxy) in vx.into_iter().enumerate() {
            let mut oxy = Vec::with_capacity(vxy.len());
            for (a, row) in vxy.into_iter().enumerate() {
                let mut orow = Vec::with_capacity(row.len());
                for (b, bit) in row.into_iter().enumerate() {
                    match bit {
                        0 => orow.push(false),
                        1 => orow.push(true),
                        other => {
                            return Err(Error::invalid(format!(
                                "`V[{x}][{y}][{a}][{b}]` is {other}, expected 0 or 1"
                            )))
                        }
                    }
                }
                oxy.push(orow);
            }
            ox.push(oxy);
        }
        out.push(ox);
    }
    Ok(out)
}

/// Reads a `general`, `xor` or `sync` game.
pub fn game_from_json(text: &str) -> Result<NonlocalGame> {
    let kind: GameKind = parse_json(text)?;
    match kind.kind.as_str() {
        "general" => {
            let f: GeneralGameFile = parse_json(text)?;
            NonlocalGame::new(labels(f.x), labels(f.y), labels(f.a), labels(f.b), &f.mu, &bits(f.v)?)
        }
        "xor" => {
            let f: XorGameFile = parse_json(text)?;
            Ok(XorGame::new(f.omega)?.to_game())
        }
        "sync" => {
            let f: SyncGameFile = parse_json(text)?;
            Ok(SyncGame::from_table(labels(f.x), labels(f.a), &bits(f.v)?)?.to_game())
        }
        other => Err(Error::invalid(format!(
            "malformed JSON at `type`: unknown game type '{other}' (expected general, xor or sync)"
        ))),
    }
}

/// Writes any game in the `general` form.
pub fn game_to_json(g: &NonlocalGame) -> Result<String> {
    let lab = |v: &[String]| v.iter().cloned().map(Label::Text).collect();
    let v = g
        .v_table()
        .into_iter()
        .map(|vx| {
            vx.into_iter()
                .map(|vxy| vxy.into_iter().map(|r| r.into_iter().map(u8::from).collect()).collect())
                .collect()
        })
        .collect();
    let f = GeneralGameFile {
        kind: "general".into(),
        x: lab(g.x_labels()),
        y: lab(g.y_labels()),
        a: lab(g.a_labels()),
        b: lab(g.b_labels()),
        mu: g.mu_table(),
        v,
    };
    serde_json::to_string_pretty(&f).map_err(|e| Error::invalid(e.to_string()))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyFile {
    #[serde(rename = "dA")]
    da: usize,
    #[serde(rename = "dB")]
    db: usize,
    psi: StateVector,
    alice: BTreeMap<String, Vec<CMatrix>>,
    bob: BTreeMap<String, Vec<CMatrix>>,
}

/// Orders the per-question effect lists by `order` (or numerically when the keys are integers).
fn ordered(
    party: &str,
    mut map: BTreeMap<String, Vec<CMatrix>>,
    order: Option<&[String]>,
    dim: usize,
    dim_field: &str,
) -> Result<Vec<Vec<CMatrix>>> {
    let keys: Vec<String> = match order {
        Some(labels) => {
            if let Some(extra) = map.keys().find(|k| !labels.contains(k)) {
                return Err(Error::invalid(format!("`{party}.{extra}`: not a question of the game")));
            }
            labels.to_vec()
        }
        None => {
            let mut keys: Vec<String> = map.keys().cloned().collect();
            if keys.iter().all(|k| k.parse::<usize>().is_ok()) {
                keys.sort_by_key(|k| k.parse::<usize>().expect("checked"));
            }
            keys
        }
    };
    let mut out = Vec::with_capacity(keys.len());
    for k in keys {
        let effects = map
            .remove(&k)
            .ok_or_else(|| Error::invalid(format!("`{party}`: missing question '{k}'")))?;
        for (a, e) in effects.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::invalid(format!(
                    "`{party}.{k}[{a}]`: {}x{} matrix, but {dim_field} = {dim}",
                    e.rows(),
                    e.cols()
                )));
            }
        }
        out.push(effects);
    }
    Ok(out)
}

/// Reads a strategy; with a game, questions are matched to its labels.
pub fn strategy_from_json(text: &str, game: Option<&NonlocalGame>, cfg: &Config) -> Result<QuantumModel> {
    let f: StrategyFile = parse_json(text)?;
    if f.psi.dim() != f.da * f.db {
        return Err(Error::invalid(format!(
            "`psi`: {} amplitudes, but dA·dB = {}",
            f.psi.dim(),
            f.da * f.db
        )));
    }
    let alice = ordered("alice", f.alice, game.map(NonlocalGame::x_labels), f.da, "dA")?;
    let bob = ordered("bob", f.bob, game.map(NonlocalGame::y_labels), f.db, "dB")?;
    let model = QuantumModel::new_with(alice, bob, f.psi, cfg)?;
    if let Some(g) = game {
        let (nx, ny, na, nb) = model.shape();
        if (nx, ny, na, nb) != (g.num_x(), g.num_y(), g.num_a(), g.num_b()) {
            return Err(Error::invalid(format!(
                "strategy shape {nx}x{ny}x{na}x{nb} does not match the game's {}x{}x{}x{}",
                g.num_x(),
                g.num_y(),
                g.num_a(),
                g.num_b()
            )));
        }
    }
    Ok(model)
}

/// Writes a strategy with index (or game) labels as question keys.
pub fn strategy_to_json(s: &QuantumModel, game: Option<&NonlocalGame>) -> Result<String> {
    let keys = |n: usize, labels: Option<&[String]>| -> Vec<String> {
        labels.map_or_else(|| (0..n).map(|i| i.to_string()).collect(), <[String]>::to_vec)
    };
    let xs = keys(s.num_x(), game.map(NonlocalGame::x_labels));
    let ys = keys(s.num_y(), game.map(NonlocalGame::y_labels));
    let f = StrategyFile {
        da: s.dim_a(),
        db: s.dim_b(),
        psi: s.state().clone(),
        alice: xs.into_iter().zip(s.alice_povms().iter().cloned()).collect(),
        bob: ys.into_iter().zip(s.bob_povms().iter().cloned()).collect(),
    };
    serde_json::to_string_pretty(&f).map_err(|e| Error::invalid(e.to_string()))
}

/// Binary-observable representation of Cl₂-type relations with an optional state.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepFile {
    images: BTreeMap<String, CMatrix>,
    #[serde(default)]
    rho: Option<CMatrix>,
    #[serde(default)]
    decompositions: Option<BTreeMap<String, RDecomposition>>,
}

/// Inputs for the Gowers–Hatami check read from a file.
#[derive(Debug, Clone)]
pub struct GhInput {
    pub eps_rep: EpsilonRep,
    pub decompositions: BTreeMap<String, RDecomposition>,
}

/// Reads `{"images": {"b0": M, "b1": M}, "rho"?: M, "decompositions"?: {...}}`.
/// ρ defaults to I/d and the decompositions to the shipped Cl₂ ones.
pub fn gh_input_from_json(text: &str) -> Result<GhInput> {
    let f: RepFile = parse_json(text)?;
    let rep = Representation::binary_observables(f.images)?;
    let rho = match f.rho {
        Some(m) => DensityMatrix::new(m)?,
        None => DensityMatrix::maximally_mixed(rep.dim()),
    };
    Ok(GhInput {
        eps_rep: EpsilonRep::new(rep, rho, vec![cl2_anticommutator()])?,
        decompositions: f.decompositions.unwrap_or_else(cl2_decompositions),
    })
}
