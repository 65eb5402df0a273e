//! Explicit game graphs, the value-iteration solver, strategy extraction, the
//! subgame-by-subgame synthesis loop and the induced supergame.

mod check;
mod driver;
mod graph;
mod oracle;
mod strategy;
mod supergame;

use thiserror::Error;

pub use check::{model_check, solve, Objective, Opt, Query, Solution, GFP_MAX_SWEEPS, GFP_TOLERANCE, TIE_TOLERANCE};
pub use driver::{
    prune_strategies, stage_resolutions, synthesize_all, synthesize_subgame, Resolution, StageResult, SynthesisOptions,
    SynthesisResult,
};
pub use graph::{
    build_state_space, is_hazard, BuildOptions, Edge, GameGraph, GoalLabel, GraphNode, NodeKind, Planner, RevealMode,
    DEFAULT_STATE_BUDGET,
};
pub use oracle::{composed_reachability, monolithic_root_value};
pub use strategy::{extract_strategy, Strategy, STRATEGY_HEADER};
pub use supergame::{analysis_table, analyze_supergame, SgNode, SupergameEdge, SupergameMdp, SUPERGAME_HEADER};

use crate::decomposition::DecompositionError;
use crate::game_core::Cell;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("state space exceeded the budget of {budget} states ({count} discovered)")]
    StateBudget { count: usize, budget: usize },
    #[error("value iteration did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("graph has a cycle that does not pass through a chance state")]
    Cycle,
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("no strategy from the initial location {0} attains a positive value")]
    Infeasible(Cell),
    #[error("supergame line {line}: {message}")]
    SupergameParse { line: usize, message: String },
}
