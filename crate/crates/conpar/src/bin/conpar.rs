//! Command-line front end. Results go to standard output, logs to standard
//! error. Exit codes: 0 success, 1 failed verification or differential
//! mismatches, 2 usage errors, 3 validation errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use conpar::game::{
    gen_random, normalize_priorities, parse_game, preferred_case, serialize_game,
    stateset_from_json, stateset_to_json, CaseTag, ConcurrentGame,
};
use conpar::mdp::{fix_strategy, mdp_value_parity};
use conpar::mucalc::{eval_formula, FormulaInstance, FormulaKind};
use conpar::oracle::{oracle_almost_pm, oracle_almost_um, oracle_limit_ipm, DiffConfig, run_differential};
use conpar::reduce::{
    reduce_finite_precision, reduce_pure, serialize_turn_based, solve_class, StrategyClass,
};
use conpar::strategy::{
    extract_limit_eps, extract_uniform_almost, parse_strategy, serialize_strategy, verify_almost,
    verify_value,
};

const ORACLE_GRID: [f64; 3] = [0.1, 0.01, 0.001];

#[derive(Parser)]
#[command(name = "conpar", version, about = "Qualitative solver for concurrent stochastic parity games")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveClassArg {
    #[value(name = "P-M")]
    Pm,
    #[value(name = "U-M")]
    Um,
    #[value(name = "FP-M")]
    Fpm,
    #[value(name = "IP-M-limit")]
    Limit,
    /// Player 2's positive-winning complement of U-M.
    #[value(name = "complement")]
    Complement,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyClassArg {
    #[value(name = "U-M")]
    Um,
    #[value(name = "IP-M-limit")]
    Limit,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleClassArg {
    #[value(name = "U-M")]
    Um,
    #[value(name = "P-M")]
    Pm,
    #[value(name = "IP-M-limit")]
    Limit,
}

#[derive(Subcommand)]
enum Cmd {
    /// Winning state set of a strategy class.
    Solve {
        #[arg(long, value_enum)]
        class: SolveClassArg,
        /// Precision bound, required for FP-M.
        #[arg(long)]
        b: Option<u32>,
        #[arg(long)]
        game: PathBuf,
    },
    /// Witness strategy for a class, as a strategy JSON document.
    Strategy {
        #[arg(long, value_enum)]
        class: StrategyClassArg,
        /// Failure tolerance, required for IP-M-limit.
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        game: PathBuf,
    },
    /// Check a strategy document against a claimed winning set.
    Verify {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        /// Path to a JSON array of state names the strategy claims to win.
        #[arg(long)]
        claim: PathBuf,
        /// Instantiation point for ranked strategies (default: the
        /// document's eps header).
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Emit the turn-based reduction of a game.
    Reduce {
        /// Restrict player 1 to pure moves.
        #[arg(long, conflicts_with = "fp")]
        pure: bool,
        /// Restrict player 1 to precision-K mixtures.
        #[arg(long, value_name = "K")]
        fp: Option<u32>,
        #[arg(long)]
        game: PathBuf,
    },
    /// Brute-force oracle winning set (small games only).
    Oracle {
        #[arg(long, value_enum)]
        class: OracleClassArg,
        #[arg(long)]
        game: PathBuf,
    },
    /// Differential run of solvers against oracles on random games.
    Diff {
        #[arg(long)]
        count: u32,
        #[arg(long)]
        states: usize,
        #[arg(long)]
        actions: usize,
        #[arg(long)]
        seed: u64,
        /// Maximum successors per transition.
        #[arg(long, default_value_t = 2)]
        succ: usize,
        /// Maximum priority.
        #[arg(long, default_value_t = 3)]
        prio: u32,
        /// Parallel workers for instances.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Generate a seeded random game.
    Random {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        actions: usize,
        #[arg(long)]
        succ: usize,
        #[arg(long)]
        prio: u32,
        #[arg(long)]
        seed: u64,
    },
}

fn load_game(path: &PathBuf) -> Result<ConcurrentGame, Box<dyn std::error::Error>> {
    Ok(parse_game(&std::fs::read_to_string(path)?)?)
}

/// Write to stdout, exiting quietly when the reading end has gone away
/// (`conpar ... | head` must not panic).
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let done = out
        .write_all(text.as_bytes())
        .and_then(|()| {
            if text.ends_with('\n') {
                Ok(())
            } else {
                out.write_all(b"\n")
            }
        })
        .and_then(|()| out.flush());
    if let Err(e) = done {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: {e}");
        std::process::exit(3);
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("usage error: {msg}");
    ExitCode::from(2)
}

/// Per-state failure probabilities as a JSON object keyed by state name.
fn value_map(g: &ConcurrentGame, values: &[f64]) -> serde_json::Value {
    let vals: serde_json::Map<String, serde_json::Value> = values
        .iter()
        .enumerate()
        .map(|(s, &v)| (g.state_name(s).to_string(), v.into()))
        .collect();
    vals.into()
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Solve { class, b, game } => {
            let g = load_game(&game)?;
            let set = match class {
                SolveClassArg::Pm => solve_class(&g, StrategyClass::PureMemoryless)?,
                SolveClassArg::Um => solve_class(&g, StrategyClass::UniformMemoryless)?,
                SolveClassArg::Fpm => match b {
                    Some(b) => solve_class(&g, StrategyClass::FinitePrecision(b))?,
                    None => return Ok(usage("--class FP-M requires --b")),
                },
                SolveClassArg::Limit => solve_class(&g, StrategyClass::LimitInfinite)?,
                SolveClassArg::Complement => {
                    let tag = preferred_case(&g);
                    let (gn, _) = normalize_priorities(&g, tag);
                    let kind = match tag {
                        CaseTag::Case1 => FormulaKind::PositiveCase1,
                        CaseTag::Case2 => FormulaKind::PositiveCase2,
                    };
                    eval_formula(&gn, &FormulaInstance::plain(kind, &gn))?.winning
                }
            };
            emit(&stateset_to_json(&g, &set).to_string());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Strategy { class, eps, game } => {
            let g = load_game(&game)?;
            let text = match class {
                StrategyClassArg::Um => {
                    let tag = preferred_case(&g);
                    let (gn, _) = normalize_priorities(&g, tag);
                    let kind = match tag {
                        CaseTag::Case1 => FormulaKind::AlmostCase1,
                        CaseTag::Case2 => FormulaKind::AlmostCase2,
                    };
                    let res = eval_formula(&gn, &FormulaInstance::plain(kind, &gn))?;
                    eprintln!("winning set: {}", stateset_to_json(&gn, &res.winning));
                    let strat = extract_uniform_almost(&gn, &res)?;
                    serialize_strategy(&gn, &strat, None, None)?
                }
                StrategyClassArg::Limit => {
                    let eps = match eps {
                        Some(e) => e,
                        None => return Ok(usage("--class IP-M-limit requires --eps")),
                    };
                    let (gn, _) = normalize_priorities(&g, CaseTag::Case2);
                    let res =
                        eval_formula(&gn, &FormulaInstance::plain(FormulaKind::LimitIPM, &gn))?;
                    eprintln!("winning set: {}", stateset_to_json(&gn, &res.winning));
                    let w = extract_limit_eps(&gn, &res, eps)?;
                    serialize_strategy(&gn, &w.strategy, Some(w.eps), Some(w.achieved_bound))?
                }
            };
            emit(&text);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify {
            game,
            strategy,
            claim,
            eps,
        } => {
            let g = load_game(&game)?;
            let (strat, meta) = parse_strategy(&g, &std::fs::read_to_string(strategy)?)?;
            let claim = stateset_from_json(&g, &std::fs::read_to_string(claim)?)?;
            let mut out = serde_json::Map::new();
            let pass;
            if strat.is_ranked() {
                let eps = match eps.or(meta.eps) {
                    Some(e) => e,
                    None => return Err(conpar::Error::MissingEps.into()),
                };
                let values = verify_value(&g, &strat, Some(eps), &claim)?;
                pass = claim.iter().all(|s| values[s] <= eps + 1e-6);
                out.insert("mode".into(), "value".into());
                out.insert("eps".into(), eps.into());
                out.insert("failure_values".into(), value_map(&g, &values));
            } else {
                pass = verify_almost(&g, &strat, &claim)?;
                out.insert("mode".into(), "almost".into());
                let m = fix_strategy(&g, &strat, None)?;
                let values = mdp_value_parity(&m, false, true)?;
                out.insert("failure_values".into(), value_map(&g, &values));
            }
            out.insert("claim".into(), stateset_to_json(&g, &claim));
            out.insert("pass".into(), pass.into());
            emit(&serde_json::Value::Object(out).to_string());
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Reduce { pure, fp, game } => {
            let g = load_game(&game)?;
            let tb = match (pure, fp) {
                (true, None) => reduce_pure(&g),
                (false, Some(k)) => reduce_finite_precision(&g, k)?,
                _ => return Ok(usage("pass exactly one of --pure or --fp K")),
            };
            emit(&serialize_turn_based(&tb));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Oracle { class, game } => {
            let g = load_game(&game)?;
            let set = match class {
                OracleClassArg::Um => oracle_almost_um(&g)?,
                OracleClassArg::Pm => oracle_almost_pm(&g)?,
                OracleClassArg::Limit => {
                    eprintln!("grid-approximate oracle, eps grid {ORACLE_GRID:?}");
                    oracle_limit_ipm(&g, &ORACLE_GRID)?
                }
            };
            emit(&stateset_to_json(&g, &set).to_string());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Diff {
            count,
            states,
            actions,
            seed,
            succ,
            prio,
            jobs,
        } => {
            let cfg = DiffConfig {
                count,
                states,
                actions,
                successors: succ,
                priorities: prio,
                seed,
                jobs,
            };
            let report = run_differential(&cfg);
            eprintln!(
                "{} instances in {} ms, {} mismatches",
                report.instances,
                report.wall_ms,
                report.mismatches.len()
            );
            emit(&report.to_json());
            Ok(if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Random {
            states,
            actions,
            succ,
            prio,
            seed,
        } => {
            let g = gen_random(states, actions, succ, prio, seed);
            emit(&serialize_game(&g, None));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
