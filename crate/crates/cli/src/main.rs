//! `gamealg`: run self-testing analyses on builtin or JSON-described games.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gamealg::builtins::{self, BuiltinGame};
use gamealg::games::{
    chsh_quarter_weight_polynomial, game_polynomial, see_saw_optimize, winning_probability, NonlocalGame, SeeSawOptions,
};
use gamealg::gowers_hatami::{
    cl2_anticommutator, cl2_decompositions, cl2_sigma, cl2_theta, gh_bound_check, linear_deviation_check,
    rotated_cl2_rep, EpsilonRep,
};
use gamealg::io;
use gamealg::linalg::{CMatrix, DensityMatrix};
use gamealg::selftest::{
    dilation_bound, linear_grid, pair_robustness_residuals, robustness_sweep, spectral_gap, spectral_gap_of, Family,
};
use gamealg::strategies::QuantumModel;
use gamealg::Config;

#[derive(Parser)]
#[command(name = "gamealg", version, about = "Self-testing numerics for nonlocal games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// General numerical tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Winning probability, correlation, flags and (for builtin games) self-testing diagnostics.
    Analyze {
        /// Builtin name (chsh, k3-coloring, chsh-parallel-2) or a game JSON file.
        #[arg(long, default_value = "chsh")]
        game: String,
        /// `ideal` or a strategy JSON file.
        #[arg(long, default_value = "ideal")]
        strategy: String,
        /// Determining pair (chsh, chsh-xor, k3-coloring); defaults to the game's own.
        #[arg(long)]
        pair: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Robustness sweep along a perturbation family of the ideal CHSH model.
    Sweep {
        #[arg(long, default_value = "chsh")]
        game: String,
        #[arg(long, default_value = "chsh")]
        pair: String,
        /// bob-rotation, alice-rotation or depolarize.
        #[arg(long, default_value = "bob-rotation")]
        family: String,
        /// `lo:hi:n` or a comma-separated list.
        #[arg(long)]
        grid: String,
        /// Recorded in the report; the shipped families are deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Gowers–Hatami stability check for Cl₂ representations.
    Gh {
        /// Representation JSON file: {"images": {...}, "rho"?: ..., "decompositions"?: {...}}.
        #[arg(long, conflicts_with_all = ["family", "grid"])]
        rep: Option<PathBuf>,
        /// anticommuting (exact Pauli pair) or rotation (B1 = cos φ Z + sin φ X).
        #[arg(long, default_value = "anticommuting")]
        family: String,
        /// Angles for the rotation family: `lo:hi:n` or a comma-separated list.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Lower bound on the quantum value by alternating optimization.
    Seesaw {
        #[arg(long, default_value = "chsh")]
        game: String,
        #[arg(long, default_value_t = 2)]
        dim_a: usize,
        #[arg(long, default_value_t = 2)]
        dim_b: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<gamealg::Error> for Failure {
    fn from(e: gamealg::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Numerical(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Output text plus whether some numerical check could not be carried out.
struct Output {
    text: String,
    numerical_failure: Option<String>,
}

fn config(common: &Common) -> CliResult<Config> {
    let cfg = Config::default();
    match common.tol {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(Failure::Input(format!("--tol must be positive, got {t}"))),
        Some(t) => Ok(cfg.with_tol(t)),
        None => Ok(cfg),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn with_file<T>(path: &Path, parsed: gamealg::Result<T>) -> CliResult<T> {
    parsed.map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

enum GameSource {
    Builtin(Box<BuiltinGame>),
    File(NonlocalGame),
}

impl GameSource {
    fn game(&self) -> &NonlocalGame {
        match self {
            GameSource::Builtin(b) => &b.game,
            GameSource::File(g) => g,
        }
    }
}

fn load_game(spec: &str) -> CliResult<GameSource> {
    if builtins::GAME_NAMES.contains(&spec) {
        return Ok(GameSource::Builtin(Box::new(builtins::game(spec)?)));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(Failure::Input(format!(
            "'{spec}' is neither a builtin game ({}) nor an existing file",
            builtins::GAME_NAMES.join(", ")
        )));
    }
    Ok(GameSource::File(with_file(path, io::game_from_json(&read(path)?))?))
}

fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || Failure::Input(format!("--grid '{spec}': expected lo:hi:n or a comma-separated list"));
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = if parts.len() == 3 {
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        linear_grid(lo, hi, n)?
    } else if parts.len() == 1 {
        spec.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<CliResult<Vec<f64>>>()?
    } else {
        return Err(bad());
    };
    if grid.is_empty() {
        return Err(Failure::Input(format!("--grid '{spec}' is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Failure::Input(format!("--grid '{spec}' has a non-finite value")));
    }
    Ok(grid)
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn config_json(cfg: &Config, extra: Value) -> Value {
    let mut v = json!({ "tolerances": cfg });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

fn json_only(common: &Common, command: &str) -> CliResult<()> {
    if common.format == Some(Format::Csv) {
        return Err(Failure::Input(format!(
            "{command} only writes JSON; csv is available for sweep"
        )));
    }
    Ok(())
}

fn cmd_analyze(game: &str, strategy: &str, pair: Option<&str>, common: &Common) -> CliResult<Output> {
    json_only(common, "analyze")?;
    let cfg = config(common)?;
    let source = load_game(game)?;
    let g = source.game();
    let model = if strategy == "ideal" {
        match &source {
            GameSource::Builtin(b) => b.ideal.clone(),
            GameSource::File(_) => {
                return Err(Failure::Input(
                    "a game file needs --strategy <file>; `ideal` exists only for builtins".into(),
                ))
            }
        }
    } else {
        let path = Path::new(strategy);
        with_file(path, io::strategy_from_json(&read(path)?, Some(g), &cfg))?
    };
    let value = winning_probability(g, &model.correlation())?;
    let poly_value = model.evaluate_state(&game_polynomial(g))?.re;
    let mut report = json!({
        "command": "analyze",
        "game": game,
        "strategy": strategy,
        "value": value,
        "polynomialValue": poly_value,
        "correlation": model.correlation().table(),
        "flags": model.flags(cfg.tol),
        "schmidtCoefficients": model.schmidt_coefficients(),
    });
    if let GameSource::Builtin(b) = &source {
        let pair = match pair {
            Some(name) => Some(builtins::pair(name)?),
            None => b.pair.clone(),
        };
        let eps = (b.quantum_value - value).max(0.0);
        let ideal_rep = b.ideal.bipartite_rep();
        let gap = spectral_gap(g, &ideal_rep)?;
        let mut st = json!({
            "quantumValue": b.quantum_value,
            "epsilon": if eps < cfg.value_floor { 0.0 } else { eps },
            "gap": gap,
            "topEigenspaceUnique": gap.top_multiplicity == 1,
        });
        if b.name == "chsh" {
            st["gapQuarterWeight"] = json!(spectral_gap_of(&chsh_quarter_weight_polynomial(), &ideal_rep)?);
        }
        st["pair"] = match &pair {
            None => Value::Null,
            Some(p) => match pair_robustness_residuals(&model, p, &cfg) {
                Ok(r) => json!({ "label": p.label, "residuals": r }),
                Err(e) => json!({ "label": p.label, "unavailable": e.to_string() }),
            },
        };
        let same_dims = model.dim_a() == b.ideal.dim_a() && model.dim_b() == b.ideal.dim_b();
        st["dilation"] = if same_dims && gap.top_multiplicity == 1 && !gap.degenerate {
            let (ia, ib) = (CMatrix::identity(model.dim_a()), CMatrix::identity(model.dim_b()));
            match dilation_bound(g, &model, &b.ideal, &ia, &ib, &cfg) {
                Ok(d) => json!({
                    "delta": d.delta, "eps": d.eps, "bound": d.bound,
                    "achieved": d.achieved, "gap": d.gap, "auxOpt": d.aux_opt,
                }),
                Err(e) => json!({ "unavailable": e.to_string() }),
            }
        } else {
            json!({ "unavailable": "needs the ideal model's dimensions and a one-dimensional top eigenspace with a nonzero gap" })
        };
        report["selfTest"] = st;
    }
    report["config"] = config_json(&cfg, json!({}));
    Ok(Output {
        text: json_text(&report),
        numerical_failure: None,
    })
}

fn cmd_sweep(game: &str, pair: &str, family: &str, grid: &str, seed: u64, common: &Common) -> CliResult<Output> {
    let cfg = config(common)?;
    if game != "chsh" {
        return Err(Failure::Input(format!(
            "sweep families perturb the ideal CHSH model; --game '{game}' is not supported"
        )));
    }
    let family: Family = family.parse()?;
    let params = parse_grid(grid)?;
    let pair = builtins::pair(pair)?;
    let report = robustness_sweep(&pair, &QuantumModel::chsh_ideal(), family, &params, &cfg)?;
    let text = match common.format.unwrap_or(Format::Csv) {
        Format::Csv => report.to_csv(),
        Format::Json => {
            let mut v = serde_json::to_value(&report).expect("serializable report");
            v["command"] = json!("sweep");
            v["config"] = config_json(&cfg, json!({ "seed": seed, "grid": grid }));
            json_text(&v)
        }
    };
    Ok(Output {
        text,
        numerical_failure: None,
    })
}

fn gh_point(
    param: Option<f64>,
    e: &EpsilonRep,
    decomps: &gamealg::gowers_hatami::DecompositionMap,
    cfg: &Config,
) -> CliResult<(Value, Option<String>)> {
    let linear = linear_deviation_check(e, &cl2_theta(), decomps)?;
    let (report, failure) = match gh_bound_check(e, &cl2_theta(), &cl2_sigma(), decomps, cfg) {
        Ok(r) => (json!(r), None),
        Err(err) if err.is_input_error() => return Err(err.into()),
        Err(err) => (Value::Null, Some(err.to_string())),
    };
    let mut v = json!({
        "measuredEps": e.measured_eps,
        "report": report,
        "error": failure,
        "linearDeviation": linear,
    });
    if let Some(p) = param {
        v["param"] = json!(p);
    }
    Ok((v, failure))
}

fn cmd_gh(rep: Option<&Path>, family: &str, grid: Option<&str>, common: &Common) -> CliResult<Output> {
    json_only(common, "gh")?;
    let cfg = config(common)?;
    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut push = |res: (Value, Option<String>)| {
        points.push(res.0);
        if let Some(f) = res.1 {
            failures.push(f);
        }
    };
    let source = match rep {
        Some(path) => {
            let input = with_file(path, io::gh_input_from_json(&read(path)?))?;
            push(gh_point(None, &input.eps_rep, &input.decompositions, &cfg)?);
            path.display().to_string()
        }
        None => {
            let params = match (family, grid) {
                ("anticommuting", None) => vec![0.0],
                ("anticommuting", Some(_)) => {
                    return Err(Failure::Input("--grid applies to the rotation family only".into()))
                }
                ("rotation", Some(g)) => parse_grid(g)?,
                ("rotation", None) => return Err(Failure::Input("the rotation family needs --grid".into())),
                (other, _) => {
                    return Err(Failure::Input(format!(
                        "unknown gh family '{other}' (expected anticommuting or rotation)"
                    )))
                }
            };
            for phi in params {
                let e = EpsilonRep::new(
                    rotated_cl2_rep(phi),
                    DensityMatrix::maximally_mixed(2),
                    vec![cl2_anticommutator()],
                )?;
                push(gh_point(Some(phi), &e, &cl2_decompositions(), &cfg)?);
            }
            family.to_string()
        }
    };
    let report = json!({
        "command": "gh",
        "source": source,
        "points": points,
        "config": config_json(&cfg, json!({})),
    });
    Ok(Output {
        text: json_text(&report),
        numerical_failure: failures.into_iter().next(),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_seesaw(
    game: &str,
    da: usize,
    db: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
    common: &Common,
) -> CliResult<Output> {
    json_only(common, "seesaw")?;
    let cfg = config(common)?;
    let source = load_game(game)?;
    let opts = SeeSawOptions {
        restarts,
        max_iters: iters,
        seed,
        ..Default::default()
    };
    let out = see_saw_optimize(source.game(), da, db, &opts)?;
    let strategy: Value =
        serde_json::from_str(&io::strategy_to_json(&out.model, Some(source.game()))?).expect("strategy JSON is valid");
    let report = json!({
        "command": "seesaw",
        "game": game,
        "value": out.value,
        "restart": out.restart,
        "iterations": out.history.len(),
        "history": out.history,
        "strategy": strategy,
        "config": config_json(&cfg, json!({
            "seed": seed, "restarts": restarts, "maxIters": iters, "dimA": da, "dimB": db,
        })),
    });
    Ok(Output {
        text: json_text(&report),
        numerical_failure: None,
    })
}

fn write_output(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Numerical(format!("cannot write to stdout: {e}")))
        }
    }
}

fn run(cli: Cli) -> CliResult<Option<String>> {
    let (output, common) = match &cli.command {
        Command::Analyze {
            game,
            strategy,
            pair,
            common,
        } => (cmd_analyze(game, strategy, pair.as_deref(), common)?, common),
        Command::Sweep {
            game,
            pair,
            family,
            grid,
            seed,
            common,
        } => (cmd_sweep(game, pair, family, grid, *seed, common)?, common),
        Command::Gh {
            rep,
            family,
            grid,
            common,
        } => (cmd_gh(rep.as_deref(), family, grid.as_deref(), common)?, common),
        Command::Seesaw {
            game,
            dim_a,
            dim_b,
            restarts,
            iters,
            seed,
            common,
        } => (
            cmd_seesaw(game, *dim_a, *dim_b, *restarts, *iters, *seed, common)?,
            common,
        ),
    };
    write_output(&output.text, common.out.as_deref())?;
    Ok(output.numerical_failure)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
