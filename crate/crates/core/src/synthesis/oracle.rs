//! Whole-game cross-checks for the decomposed synthesis.

use std::collections::BTreeMap;

use crate::game_core::{DagGame, DagState, GameAction};
use crate::model::GameModel;

use super::check::{model_check, Objective, Opt, Query};
use super::driver::SynthesisResult;
use super::graph::{build_state_space, BuildOptions, GoalLabel, Planner, RevealMode};
use super::SynthesisError;

/// Optimal probability of one successful reveal in reach from the start, with the
/// reveal attempted at any nonempty word of length at most `h_max`, solved on the
/// undecomposed graph.
pub fn monolithic_root_value(model: &GameModel, h_max: usize, state_budget: usize) -> Result<f64, SynthesisError> {
    let game = DagGame::new(model).with_h_max(h_max);
    let opts = BuildOptions { state_budget, ..BuildOptions::subgame(Planner::AfterMove) };
    let graph = build_state_space(&game, game.initial(), &opts)?;
    let v = model_check(&graph, &Query::new(Objective::EventuallyTarget { n: 1 }))?;
    Ok(v[graph.root()])
}

/// Probability of reaching a target within `n` reveals when the synthesized
/// strategies are composed into one planner policy and the whole DAG is played
/// out. `adversary` selects the worst (`Min`) or best (`Max`) resolution.
pub fn composed_reachability(
    model: &GameModel,
    result: &SynthesisResult,
    n: usize,
    adversary: Opt,
    state_budget: usize,
) -> Result<f64, SynthesisError> {
    if model.targets.contains(model.start) {
        return Ok(1.0);
    }
    let by_root: BTreeMap<_, _> = result.strategies().map(|s| (s.root, s)).collect();
    let h_max = by_root.values().map(|s| s.h).max().unwrap_or(1);
    let policy = |s: &DagState| -> Option<GameAction> { by_root.get(&s.origin).and_then(|st| st.policy(s)) };
    let game = DagGame::new(model).with_h_max(h_max);
    let opts = BuildOptions {
        planner: Planner::Fixed(&policy),
        reveal: RevealMode::Continue,
        goal: GoalLabel::Target,
        state_budget,
    };
    let graph = build_state_space(&game, game.initial(), &opts)?;
    let q = Query { objective: Objective::EventuallyTarget { n }, p2: Opt::Max, p1: adversary };
    Ok(model_check(&graph, &q)?[graph.root()])
}
