//! The HIG-to-DAG correspondence and the checks that the delayed game faithfully
//! simulates the hidden-information one.

mod hypothetical;
mod replay;
mod simulation;
mod terminal;

use thiserror::Error;

pub use hypothetical::{evaluate_safety, hypothetical_branches, HypBranchSet, SafetyKind};
pub use replay::{apply_delayed, Replay};
pub use simulation::{
    check_probabilistic_simulation, estimate_fragments, Mismatch, SimulationOptions, SimulationReport,
    DEFAULT_FRAGMENT_BUDGET, SIMULATION_TOLERANCE,
};
pub use terminal::{check_terminal_similarity, deterministic_fragments};

use crate::game_core::{DagGame, GameError};
use crate::model::GameModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("estimated {estimated} fragments exceeds the budget of {budget}; use a smaller horizon")]
    BudgetExceeded { estimated: u128, budget: u128 },
    #[error("horizon {0} exceeds the supported word length")]
    HorizonTooLarge(usize),
    #[error("unknown safety label kind `{0}` (expected belief, truth or both)")]
    UnknownSafetyKind(String),
    #[error("stage {h} requested but the prefix has only {available} planner moves")]
    NotEnoughMoves { h: usize, available: usize },
    #[error("fragment must start at a proper state")]
    ImproperStart,
}

/// The delayed-action game of `model`, with the `|w| = h_max` stopping criterion applied.
pub fn correspond(model: &GameModel) -> DagGame<'_> {
    DagGame::new(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::{Cell, DagNode, GameAction, PlayerId};
    use std::collections::{HashSet, VecDeque};

    #[test]
    fn initial_state_matches() {
        let m = GameModel::new(8, 8, Cell::new(5, 1), 0.5);
        assert_eq!(correspond(&m).initial(), DagGame::new(&m).initial());
    }

    #[test]
    fn second_move_traps_with_unit_horizon() {
        let mut m = GameModel::new(4, 4, Cell::new(1, 1), 0.5);
        m.h_max = 1;
        let g = correspond(&m);
        for (a, d) in g.successors(&DagNode::State(g.initial())) {
            if a == GameAction::Theta {
                continue;
            }
            let one = d.support()[0].0;
            for (b, d2) in g.successors(&one) {
                if let GameAction::Move(_) = b {
                    assert_eq!(d2.support()[0].0, DagNode::Trapped);
                }
            }
        }
    }

    #[test]
    fn zero_spread_reveals_truth_equal_to_belief() {
        let mut m = GameModel::new(3, 3, Cell::new(1, 1), 0.5);
        m.beta_spread = 0;
        m.h_max = 3;
        let g = correspond(&m);
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([DagNode::State(g.initial())]);
        while let Some(n) = queue.pop_front() {
            if !seen.insert(n) {
                continue;
            }
            if let DagNode::State(s) = n {
                if s.turn == PlayerId::PStoch {
                    assert_eq!(s.truth, s.belief);
                }
            }
            for (_, d) in g.successors(&n) {
                queue.extend(d.support().iter().map(|(s, _)| *s));
            }
        }
        assert!(seen.len() > 50);
    }
}
