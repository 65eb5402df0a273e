use std::fmt;

use super::grid::Direction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlayerId {
    /// The adversary: knows the true value.
    P1,
    /// The planner: acts on its belief.
    P2,
    /// The probabilistic chooser.
    PStoch,
}

impl PlayerId {
    pub fn name(self) -> &'static str {
        match self {
            PlayerId::P1 => "P1",
            PlayerId::P2 => "P2",
            PlayerId::PStoch => "PS",
        }
    }

    pub fn parse(s: &str) -> Option<PlayerId> {
        match s {
            "P1" => Some(PlayerId::P1),
            "P2" => Some(PlayerId::P2),
            "PS" => Some(PlayerId::PStoch),
            _ => None,
        }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Action labels. `Theta` is the reveal attempt, `Tau` labels probabilistic steps.
///
/// The derived order (moves in compass order, then `Theta`, then `Tau`) is the
/// tie-break order for strategy extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GameAction {
    Move(Direction),
    Theta,
    Tau,
}

impl GameAction {
    pub fn direction(self) -> Option<Direction> {
        match self {
            GameAction::Move(d) => Some(d),
            _ => None,
        }
    }

    pub fn parse(s: &str) -> Option<GameAction> {
        match s {
            "theta" | "GT" => Some(GameAction::Theta),
            "tau" => Some(GameAction::Tau),
            other => Direction::parse(other).map(GameAction::Move),
        }
    }
}

impl fmt::Display for GameAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameAction::Move(d) => d.fmt(f),
            GameAction::Theta => f.write_str("theta"),
            GameAction::Tau => f.write_str("tau"),
        }
    }
}
