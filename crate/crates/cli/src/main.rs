use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use log::info;
use thiserror::Error;

use dagsynth::game_core::RuleMutation;
use dagsynth::model::{
    parse_adversary_policy, parse_model, print_model, validate_model, Diagnostics, GameModel, ParseError,
};
use dagsynth::synthesis::{
    analysis_table, synthesize_all, SupergameMdp, SynthesisError, SynthesisOptions, DEFAULT_STATE_BUDGET,
};
use dagsynth::transform::{check_probabilistic_simulation, SimulationOptions, TransformError, DEFAULT_FRAGMENT_BUDGET};

#[derive(Parser)]
#[command(name = "dagsynth", version, about = "Planner strategy synthesis for hidden-information grid games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model; print diagnostics.
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Check that the delayed-action game simulates the hidden-information game.
    CheckSimulation {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 2)]
        horizon: usize,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Maximum number of fragments to enumerate.
        #[arg(long, default_value_t = DEFAULT_FRAGMENT_BUDGET)]
        budget: u128,
        /// Inject a fault into one transition rule (debugging aid).
        #[arg(long, value_parser = parse_mutation)]
        mutate: Option<RuleMutation>,
    },
    /// Synthesize subgame strategies and the supergame.
    Synthesize {
        #[arg(long)]
        model: PathBuf,
        /// Step bound per subgame; default allows one reveal attempt per stage.
        #[arg(long)]
        k: Option<usize>,
        /// Override the model's maximum stage.
        #[arg(long)]
        hmax: Option<usize>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        workers: u32,
        #[arg(long)]
        out: PathBuf,
        /// Fixed adversary policy file.
        #[arg(long = "p1-strategy")]
        p1_strategy: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_STATE_BUDGET)]
        state_budget: usize,
    },
    /// Bounded reachability of the target in a synthesized supergame.
    Analyze {
        #[arg(long)]
        supergame: PathBuf,
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a model in canonical form, or render a supergame as DOT.
    Export {
        #[arg(long, conflicts_with = "supergame", required_unless_present = "supergame")]
        model: Option<PathBuf>,
        #[arg(long)]
        supergame: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_mutation(s: &str) -> Result<RuleMutation, String> {
    RuleMutation::parse(s).ok_or_else(|| {
        let names: Vec<&str> = RuleMutation::ALL.iter().map(|m| m.name()).collect();
        format!("unknown mutation `{s}` (one of: {})", names.join(", "))
    })
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{}:{}: {}", .source.line, .source.column, .source.message)]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: model is invalid\n{diagnostics}")]
    Invalid { path: PathBuf, diagnostics: Diagnostics },
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Invalid { .. } => 2,
            CliError::Transform(TransformError::BudgetExceeded { .. } | TransformError::HorizonTooLarge(_)) => 3,
            CliError::Transform(_) => 1,
            CliError::Synthesis(SynthesisError::StateBudget { .. }) => 3,
            CliError::Synthesis(SynthesisError::Infeasible(_)) => 4,
            CliError::Synthesis(SynthesisError::SupergameParse { .. }) => 2,
            CliError::Synthesis(SynthesisError::Decomposition(_)) => 2,
            CliError::Synthesis(_) => 1,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_model(path: &Path) -> Result<GameModel, CliError> {
    parse_model(&read(path)?).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

fn load_valid_model(path: &Path) -> Result<GameModel, CliError> {
    let model = load_model(path)?;
    let diagnostics = validate_model(&model);
    if diagnostics.errors().next().is_some() {
        return Err(CliError::Invalid { path: path.to_path_buf(), diagnostics });
    }
    for w in diagnostics.warnings() {
        log::warn!("{w}");
    }
    Ok(model)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { model } => {
            // A document that does not parse is a failed validation, not an input error.
            let m = load_model(&model).map_err(|e| match e {
                CliError::Parse { .. } => CliError::Failed(e.to_string()),
                other => other,
            })?;
            let d = validate_model(&m);
            print!("{d}");
            if d.errors().next().is_some() {
                return Err(CliError::Failed(format!("{}: validation failed", model.display())));
            }
            println!("ok");
            Ok(())
        }
        Command::CheckSimulation { model, horizon, out, budget, mutate } => {
            let m = load_valid_model(&model)?;
            let opts = SimulationOptions { horizon, budget, mutation: mutate };
            let t = Instant::now();
            let report = check_probabilistic_simulation(&m, &opts)?;
            info!("simulation check: {} fragments in {:.3?}", report.checked_fragments, t.elapsed());
            emit(out.as_deref(), &report.to_text())?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::Failed(format!("{} mismatching fragments", report.mismatches.len())))
            }
        }
        Command::Synthesize { model, k, hmax, workers, out, p1_strategy, state_budget } => {
            let mut m = load_valid_model(&model)?;
            if let Some(p) = p1_strategy {
                let policy =
                    parse_adversary_policy(&read(&p)?).map_err(|source| CliError::Parse { path: p, source })?;
                m.adversary = Some(policy);
            }
            let opts = SynthesisOptions { k, h_max: hmax.unwrap_or(m.h_max), workers: workers as usize, state_budget };
            let t = Instant::now();
            let result = synthesize_all(&m, &opts)?;
            info!("synthesis: {} subgames in {:.3?}", result.roots.len(), t.elapsed());

            let dir = out.join("strategies");
            fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
            let mut csv = String::from("root_x,root_y,h,value\n");
            for (h, v) in &result.curve {
                let _ = writeln!(csv, "{},{},{h},{v}", m.start.x, m.start.y);
            }
            write(&out.join("curve.csv"), &csv)?;
            for s in result.strategies() {
                write(&dir.join(format!("subgame_{:03}_{}_{}.txt", s.subgame, s.root.x, s.root.y)), &s.to_text())?;
            }
            write(&out.join("supergame.mdp"), &result.supergame.to_text())?;
            write(&out.join("supergame.dot"), &result.supergame.to_dot())?;

            println!("subgames {}", result.roots.len());
            println!("feasible {}", result.strategies().count());
            println!("root_value {}", result.root_value());
            if !result.is_feasible() {
                return Err(SynthesisError::Infeasible(m.start).into());
            }
            Ok(())
        }
        Command::Analyze { supergame, n, out } => {
            let mdp = SupergameMdp::parse(&read(&supergame)?)?;
            let rows = analysis_table(&mdp, n);
            let mut csv = String::from("n,pmin,pmax\n");
            for (i, lo, hi) in &rows {
                let _ = writeln!(csv, "{i},{lo},{hi}");
            }
            emit(out.as_deref(), &csv)?;
            match rows.iter().find(|r| r.1 > 0.0) {
                Some(r) => eprintln!("smallest n with pmin > 0: {}", r.0),
                None => eprintln!("pmin is 0 for every n up to {n}"),
            }
            Ok(())
        }
        Command::Export { model, supergame, out } => {
            let text = match (model, supergame) {
                (Some(p), _) => print_model(&load_model(&p)?),
                (None, Some(p)) => SupergameMdp::parse(&read(&p)?)?.to_dot(),
                (None, None) => unreachable!("clap requires one source"),
            };
            emit(out.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
