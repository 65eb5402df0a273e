//! States, actions and transition semantics of the hidden-information game
//! and its delayed-action reconstruction.

mod action;
mod dag;
mod delay;
mod distribution;
mod fragment;
mod grid;
mod hig;
mod relations;
mod word;

use thiserror::Error;

pub use action::{GameAction, PlayerId};
pub use dag::{DagGame, DagNode, DagState, RevealOutcomes, RuleMutation};
pub use delay::{delay_move, reveal_probability};
pub use distribution::{Distribution, SUM_TOLERANCE};
pub use fragment::{move_of, ExecutionFragment, Move, MoveStep, StepLabel, Turn};
pub use grid::{effect_dirs, step, Cell, Direction, Valuation};
pub use hig::{hig_initial, hig_successors, HigState};
pub use relations::{is_equivalent, is_proper_dag, is_proper_hig, is_similar};
pub use word::Word;

use crate::model::GameModel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("only move actions have an effect, got {0}")]
    NotAMove(GameAction),
    #[error("probability {0} outside [0,1]")]
    ProbabilityOutOfRange(f64),
    #[error("stage {0} has no reveal attempts")]
    ZeroAttempts(usize),
    #[error("malformed move at position {position}: {reason}")]
    MalformedMove { position: usize, reason: &'static str },
    #[error("state does not occur in the fragment")]
    StateNotInFragment,
    #[error("step {index} of the fragment is not licensed by the transition rules")]
    IllegalStep { index: usize },
    #[error("fragment is not deterministic (probabilistic step at {index})")]
    NotDeterministic { index: usize },
    #[error("fragment must end at a planner state")]
    NotPlannerTerminal,
    #[error("move cannot be applied: {0}")]
    Inapplicable(&'static str),
}

/// Effect of a word of move actions on a valuation; off-grid moves are clipped.
pub fn effect(word: &[GameAction], v: Cell, model: &GameModel) -> Result<Cell, GameError> {
    word.iter().try_fold(v, |c, a| match a {
        GameAction::Move(d) => Ok(step(c, *d, model.width, model.height)),
        other => Err(GameError::NotAMove(*other)),
    })
}
