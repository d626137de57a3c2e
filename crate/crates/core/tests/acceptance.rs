//! The ten acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gamealg::algebras::{
    chsh_pair, clifford_rep, commutant_dim, gns_from_irrep, Letter, Representation, StarPolynomial, TracialState,
};
use gamealg::builtins::{k3_perfect_strategy, tsirelson_value};
use gamealg::games::{
    chsh_quarter_weight_polynomial, game_polynomial, see_saw_optimize, winning_probability, NonlocalGame,
    SeeSawOptions, SyncGame,
};
use gamealg::gowers_hatami::{
    cl2_anticommutator, cl2_decompositions, cl2_rotation_check, cl2_theta, linear_deviation_check, rotated_cl2_rep,
    EpsilonRep,
};
use gamealg::linalg::{random, DensityMatrix};
use gamealg::selftest::{pair_robustness_residuals, robustness_sweep, spectral_gap, spectral_gap_of, Family};
use gamealg::strategies::QuantumModel;
use gamealg::Config;

const SQRT2: f64 = std::f64::consts::SQRT_2;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn see_saw_value() -> Outcome {
    let start = Instant::now();
    let opts = SeeSawOptions {
        restarts: 20,
        ..Default::default()
    };
    let out = match see_saw_optimize(&NonlocalGame::chsh(), 2, 2, &opts) {
        Ok(o) => o,
        Err(e) => return outcome(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    let err = (out.value - tsirelson_value()).abs();
    outcome(
        err < 1e-6 && secs < 5.0,
        format!("value {:.12}, |err| {err:.2e}, {secs:.3} s", out.value),
    )
}

fn spectral_gaps() -> Outcome {
    let rep = QuantumModel::chsh_ideal().bipartite_rep();
    let (Ok(a), Ok(b)) = (
        spectral_gap(&NonlocalGame::chsh(), &rep),
        spectral_gap_of(&chsh_quarter_weight_polynomial(), &rep),
    ) else {
        return outcome(false, "spectral gap computation failed");
    };
    let pass = (a.gap - SQRT2 / 4.0).abs() < 1e-9 && a.top_multiplicity == 1 && (b.gap - SQRT2 / 2.0).abs() < 1e-9;
    outcome(
        pass,
        format!(
            "Δ = {:.12} (multiplicity {}), quarter-weight Δ = {:.12}",
            a.gap, a.top_multiplicity, b.gap
        ),
    )
}

fn bob_rotation_sweep(params: &[f64]) -> gamealg::Result<gamealg::selftest::SweepReport> {
    robustness_sweep(
        &chsh_pair(),
        &QuantumModel::chsh_ideal(),
        Family::BobRotation,
        params,
        &Config::default(),
    )
}

fn dilation_bound_rows() -> Outcome {
    let r = match bob_rotation_sweep(&grid(0.01, 0.3, 30)) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let worst = r
        .rows
        .iter()
        .map(|row| row.achieved - row.bound)
        .fold(f64::NEG_INFINITY, f64::max);
    let zero = match bob_rotation_sweep(&[0.0]) {
        Ok(z) => z.rows[0],
        Err(e) => return outcome(false, e.to_string()),
    };
    let pass = r.rows.len() == 30 && worst <= 1e-8 && zero.achieved < 1e-12 && zero.bound < 1e-12;
    outcome(
        pass,
        format!(
            "max(achieved − bound) = {worst:.3e} over {} rows; θ=0: achieved {:.1e}, bound {:.1e}",
            r.rows.len(),
            zero.achieved,
            zero.bound
        ),
    )
}

fn robustness_exponent() -> Outcome {
    match bob_rotation_sweep(&grid(0.01, 0.3, 30)) {
        Ok(r) => match r.fit {
            Some(f) => outcome((0.4..=0.6).contains(&f.exponent), format!("exponent {:.5}", f.exponent)),
            None => outcome(false, "no fit"),
        },
        Err(e) => outcome(false, e.to_string()),
    }
}

fn gowers_hatami() -> Outcome {
    let cfg = Config::default();
    let exact = match cl2_rotation_check(0.0, &cfg) {
        Ok(r) => r.rows.iter().map(|row| row.lhs).fold(0.0, f64::max),
        Err(e) => return outcome(false, format!("exact representation: {e}")),
    };
    let mut failures = Vec::new();
    let mut linear_ok = true;
    for phi in grid(0.01, 0.3, 30) {
        match cl2_rotation_check(phi, &cfg) {
            Ok(r) => {
                if r.rows.iter().any(|row| row.lhs > 0.5 * row.measured_eps + 1e-8) {
                    failures.push(format!("φ={phi:.3}: lhs above ½·ε"));
                }
            }
            Err(e) => failures.push(format!("φ={phi:.3}: {e}")),
        }
        let e = EpsilonRep::new(
            rotated_cl2_rep(phi),
            DensityMatrix::maximally_mixed(2),
            vec![cl2_anticommutator()],
        )
        .expect("valid rotated representation");
        for row in linear_deviation_check(&e, &cl2_theta(), &cl2_decompositions()).expect("decompositions cover θ") {
            linear_ok &= row.deviation <= 0.5 * e.measured_eps + 1e-8;
        }
    }
    let pass = exact < 1e-10 && failures.is_empty();
    let mut detail = format!("exact lhs {exact:.1e}; {} of 30 rotated points fail", failures.len());
    if let Some(first) = failures.first() {
        detail.push_str(&format!(" (first: {first})"));
    }
    detail.push_str(&format!(
        "; dilation-free ‖π(b) − π(θ(b))‖_ρ ≤ ½·ε on every point: {linear_ok}"
    ));
    outcome(pass, detail)
}

fn pair_residuals() -> Outcome {
    let cfg = Config::default();
    let ideal = match pair_robustness_residuals(&QuantumModel::chsh_ideal(), &chsh_pair(), &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let ideal_ok = ideal.cond_i < 1e-12 && ideal.cond_ii < 1e-12 && ideal.cond_iii < 1e-12;
    let start = Instant::now();
    let r = match bob_rotation_sweep(&grid(0.01, 0.3, 30)) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let secs = start.elapsed().as_secs_f64();
    // a residual that is identically zero along the family is O(ε^e) for every e
    let class_ok = |fit: Option<gamealg::selftest::PowerFit>, values: Vec<f64>| match fit {
        Some(f) => (f.exponent >= 0.25, format!("{:.4}", f.exponent)),
        None => (values.iter().all(|v| *v < 1e-12), "identically 0".to_string()),
    };
    let (i_ok, i) = class_ok(r.fit_cond_i, r.rows.iter().map(|x| x.cond_i).collect());
    let (ii_ok, ii) = class_ok(r.fit_cond_ii, r.rows.iter().map(|x| x.cond_ii).collect());
    let (iii_ok, iii) = class_ok(r.fit_cond_iii, r.rows.iter().map(|x| x.cond_iii).collect());
    outcome(
        ideal_ok && i_ok && ii_ok && iii_ok && secs < 10.0,
        format!(
            "ideal max residual {:.1e}; exponents condI {i}, condII {ii}, condIII {iii}; {secs:.3} s",
            ideal.cond_i.max(ideal.cond_ii).max(ideal.cond_iii)
        ),
    )
}

fn random_irrep(r: &mut ChaCha8Rng, d: usize) -> Representation {
    loop {
        let rep = Representation::general([
            ("u".to_string(), random::unitary(r, d)),
            ("v".to_string(), random::unitary(r, d)),
        ])
        .expect("two generators of equal dimension");
        if commutant_dim(&rep, 1e-9) == 1 {
            return rep;
        }
    }
}

fn random_word(r: &mut ChaCha8Rng) -> StarPolynomial {
    let len = r.random_range(0..=6);
    let w = (0..len)
        .map(|_| {
            let l = Letter::new(if r.random::<bool>() { "u" } else { "v" });
            if r.random::<bool>() {
                l.star()
            } else {
                l
            }
        })
        .collect();
    StarPolynomial::monomial(Complex64::new(1.0, 0.0), w)
}

fn tracial_gns() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let (mut gns_err, mut trace_err): (f64, f64) = (0.0, 0.0);
    for d in 1..=4 {
        let rep = random_irrep(&mut r, d);
        let gns = match gns_from_irrep(&rep, 1e-9) {
            Ok(g) => g,
            Err(e) => return outcome(false, format!("dim {d}: {e}")),
        };
        let tau = TracialState::new(rep);
        for _ in 0..100 {
            let (a, b) = (random_word(&mut r), random_word(&mut r));
            let t = tau.value(&a).unwrap();
            gns_err = gns_err.max((gns.state_value(&a).unwrap() - t).norm());
            trace_err = trace_err.max((tau.value(&a.mul(&b)).unwrap() - tau.value(&b.mul(&a)).unwrap()).norm());
        }
    }
    outcome(
        gns_err < 1e-12 && trace_err < 1e-12,
        format!("max GNS error {gns_err:.1e}, max |τ(ab) − τ(ba)| {trace_err:.1e}"),
    )
}

fn irreducibility() -> Outcome {
    let pauli = clifford_rep(2);
    let square = pauli.tensor(&pauli, "l", "r").expect("tensor of reps");
    let double = pauli.direct_sum(&pauli).expect("direct sum of reps");
    let (a, b, c) = (
        commutant_dim(&pauli, 1e-9),
        commutant_dim(&square, 1e-9),
        commutant_dim(&double, 1e-9),
    );
    outcome(
        a == 1 && b == 1 && square.dim() == 4 && c == 4,
        format!("Pauli {a}, tensor square {b} (dim {}), direct double {c}", square.dim()),
    )
}

fn product_games() -> Outcome {
    let k3 = SyncGame::k3_coloring().to_game();
    let s = k3_perfect_strategy();
    let w = match winning_probability(&k3.product(&k3), &s.tensor(&s).correlation()) {
        Ok(w) => w,
        Err(e) => return outcome(false, e.to_string()),
    };
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let shape = (
            r.random_range(1..=3),
            r.random_range(1..=3),
            r.random_range(1..=3),
            r.random_range(1..=3),
        );
        let (da, db) = (r.random_range(1..=4), r.random_range(1..=4));
        let m = QuantumModel::random_povm(&mut r, shape, da, db);
        worst = worst.max(m.balanced_form().correlation().max_abs_diff(&m.correlation()));
    }
    outcome(
        (w - 1.0).abs() < 1e-9 && worst < 1e-10,
        format!("product win probability {w:.12}; balanced_form max correlation change {worst:.1e}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let shape = (
            r.random_range(1..=3),
            r.random_range(1..=3),
            r.random_range(1..=3),
            r.random_range(1..=3),
        );
        let (nx, ny, na, nb) = shape;
        let mu: Vec<f64> = (0..nx * ny).map(|_| r.random::<f64>() + 0.01).collect();
        let total: f64 = mu.iter().sum();
        let v: Vec<bool> = (0..nx * ny * na * nb).map(|_| r.random::<bool>()).collect();
        let g = NonlocalGame::from_fn(
            nx,
            ny,
            na,
            nb,
            |x, y| mu[x * ny + y] / total,
            |a, b, x, y| v[((x * ny + y) * na + a) * nb + b],
        )
        .expect("random game is valid");
        let (da, db) = (r.random_range(1..=3), r.random_range(1..=3));
        let m = if k % 2 == 0 {
            QuantumModel::random_projective(&mut r, shape, da, db)
        } else {
            QuantumModel::random_povm(&mut r, shape, da, db)
        };
        let a = winning_probability(&g, &m.correlation()).unwrap();
        let b = m.evaluate_state(&game_polynomial(&g)).unwrap();
        worst = worst.max((a - b.re).abs()).max(b.im.abs());
    }
    outcome(worst < 1e-10, format!("max difference {worst:.1e} over 100 strategies"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("CHSH quantum value by see-saw", see_saw_value),
        ("CHSH spectral gap", spectral_gaps),
        ("dilation bound on the Bob-rotation grid", dilation_bound_rows),
        ("robustness exponent", robustness_exponent),
        ("Gowers-Hatami bound on the rotated family", gowers_hatami),
        ("determining-pair residuals", pair_residuals),
        ("tracial GNS", tracial_gns),
        ("irreducibility and tensor squares", irreducibility),
        ("product games and balanced form", product_games),
        ("correlation vs polynomial", oracle_equivalence),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", k + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
