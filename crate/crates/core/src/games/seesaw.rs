//! Alternating optimization of PVM strategies and the state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::NonlocalGame;
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, reshape, CMatrix, StateVector};
use crate::strategies::QuantumModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeeSawOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Stop once one full alternation improves the value by less than this.
    pub tol: f64,
    pub parallel: bool,
}

impl Default for SeeSawOptions {
    fn default() -> Self {
        SeeSawOptions {
            restarts: 20,
            max_iters: 500,
            seed: 0,
            tol: 1e-14,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeeSawOutcome {
    pub model: QuantumModel,
    pub value: f64,
    /// Index of the restart that produced `model`.
    pub restart: usize,
    /// Value after every full alternation of the winning restart.
    pub history: Vec<f64>,
}

/// Effective operators O^x_a = Σ_{y,b} μV Tr_B[(I⊗N^y_b)|ψ⟩⟨ψ|] for Alice.
fn alice_effective(g: &NonlocalGame, bob: &[Vec<CMatrix>], psi: &CMatrix) -> Vec<Vec<CMatrix>> {
    let da = psi.rows();
    let mut out = vec![vec![CMatrix::zeros(da, da); g.num_a()]; g.num_x()];
    for (x, y, a, b) in g.winning_tuples() {
        let t = psi.matmul(&bob[y][b].transpose()).matmul(&psi.adjoint());
        out[x][a] += &t.scale_real(g.mu(x, y));
    }
    out
}

/// Effective operators for Bob: Σ_{x,a} μV Tr_A[(M^x_a⊗I)|ψ⟩⟨ψ|].
fn bob_effective(g: &NonlocalGame, alice: &[Vec<CMatrix>], psi: &CMatrix) -> Vec<Vec<CMatrix>> {
    let db = psi.cols();
    let mut out = vec![vec![CMatrix::zeros(db, db); g.num_b()]; g.num_y()];
    for (x, y, a, b) in g.winning_tuples() {
        let t = psi.transpose().matmul(&alice[x][a].transpose()).matmul(&psi.conj());
        out[y][b] += &t.scale_real(g.mu(x, y));
    }
    out
}

/// Re-splits each pair of projections (P_a, P_a') inside the fixed range of P_a + P_a'
/// so as to maximize Tr(P_a O_a) + Tr(P_a' O_a'). Exact for two outcomes.
fn improve_pvm(effects: &mut [CMatrix], ops: &[CMatrix]) -> Result<()> {
    let n = effects.len();
    for a in 0..n {
        for b in a + 1..n {
            let p = (&effects[a] + &effects[b]).hermitian_part();
            let e = hermitian_eig(&p)?;
            let range: Vec<usize> = (0..e.values.len()).filter(|&k| e.values[k] > 0.5).collect();
            if range.is_empty() {
                continue;
            }
            let q = CMatrix::from_columns(&range.iter().map(|&k| e.vector(k)).collect::<Vec<_>>())?;
            let diff = q.adjoint().matmul(&(&ops[a] - &ops[b])).matmul(&q).hermitian_part();
            let de = hermitian_eig(&diff)?;
            let k = q.cols();
            let mut pa = CMatrix::zeros(k, k);
            for j in 0..k {
                if de.values[j] > 0.0 {
                    let v = de.vector(j);
                    pa += &CMatrix::outer(&v, &v);
                }
            }
            let pa_full = q.matmul(&pa).matmul(&q.adjoint());
            let pb_full = q.matmul(&(&CMatrix::identity(k) - &pa)).matmul(&q.adjoint());
            effects[a] = pa_full;
            effects[b] = pb_full;
        }
    }
    Ok(())
}

/// Top eigenpair of π(Φ_G) for fixed measurements.
fn best_state(g: &NonlocalGame, alice: &[Vec<CMatrix>], bob: &[Vec<CMatrix>]) -> Result<(f64, StateVector)> {
    let (da, db) = (alice[0][0].rows(), bob[0][0].rows());
    let mut phi = CMatrix::zeros(da * db, da * db);
    for (x, y, a, b) in g.winning_tuples() {
        phi += &alice[x][a].kron(&bob[y][b]).scale_real(g.mu(x, y));
    }
    let e = hermitian_eig(&phi.hermitian_part())?;
    let top = e.values.len() - 1;
    Ok((e.values[top], StateVector::normalized(e.vector(top))?))
}

fn run_restart(g: &NonlocalGame, da: usize, db: usize, opts: &SeeSawOptions, restart: usize) -> Result<SeeSawOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
    let mut alice: Vec<Vec<CMatrix>> = (0..g.num_x())
        .map(|_| linalg::random::pvm(&mut rng, da, g.num_a()))
        .collect();
    let mut bob: Vec<Vec<CMatrix>> = (0..g.num_y())
        .map(|_| linalg::random::pvm(&mut rng, db, g.num_b()))
        .collect();
    let mut psi = linalg::random::state(&mut rng, da * db);
    let mut history = Vec::new();
    let mut value = f64::NEG_INFINITY;
    for _ in 0..opts.max_iters.max(1) {
        let c = reshape(psi.amplitudes(), da, db);
        let oa = alice_effective(g, &bob, &c);
        for (x, effects) in alice.iter_mut().enumerate() {
            improve_pvm(effects, &oa[x])?;
        }
        let ob = bob_effective(g, &alice, &c);
        for (y, effects) in bob.iter_mut().enumerate() {
            improve_pvm(effects, &ob[y])?;
        }
        let (v, state) = best_state(g, &alice, &bob)?;
        psi = state;
        let improved = v - value;
        value = v;
        history.push(v);
        if improved < opts.tol {
            break;
        }
    }
    let model = QuantumModel::new(alice, bob, psi)?;
    let value = super::winning_probability(g, &model.correlation())?;
    Ok(SeeSawOutcome {
        model,
        value,
        restart,
        history,
    })
}

/// Estimates w_q(G) from below over PVM strategies of local dimensions (dA, dB).
/// Restarts are seeded `seed + index`, so the result does not depend on scheduling.
pub fn see_saw_optimize(g: &NonlocalGame, da: usize, db: usize, opts: &SeeSawOptions) -> Result<SeeSawOutcome> {
    if da == 0 || db == 0 {
        return Err(Error::invalid("see-saw dimensions must be at least 1"));
    }
    if opts.restarts == 0 {
        return Err(Error::invalid("see-saw needs at least one restart"));
    }
    let runs: Vec<Result<SeeSawOutcome>> = if opts.parallel {
        (0..opts.restarts)
            .into_par_iter()
            .map(|k| run_restart(g, da, db, opts, k))
            .collect()
    } else {
        (0..opts.restarts).map(|k| run_restart(g, da, db, opts, k)).collect()
    };
    let mut best: Option<SeeSawOutcome> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}
