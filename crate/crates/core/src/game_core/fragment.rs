use std::fmt;

use crate::model::GameModel;

use super::{hig_successors, DagGame, DagNode, DagState, GameAction, GameError, HigState, PlayerId};

const LABEL_TOLERANCE: f64 = 1e-12;

/// Owner of a state.
pub trait Turn {
    fn turn(&self) -> PlayerId;
}

impl Turn for HigState {
    fn turn(&self) -> PlayerId {
        self.turn
    }
}

impl Turn for DagState {
    fn turn(&self) -> PlayerId {
        self.turn
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepLabel {
    Action(GameAction),
    Probability(f64),
}

/// `s0 l1 s1 l2 ... sn`: alternating states and step labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ExecutionFragment<S> {
    states: Vec<S>,
    labels: Vec<StepLabel>,
}

impl<S: Clone + PartialEq + Turn> ExecutionFragment<S> {
    pub fn new(start: S) -> Self {
        ExecutionFragment { states: vec![start], labels: Vec::new() }
    }

    pub fn push(&mut self, label: StepLabel, state: S) {
        self.labels.push(label);
        self.states.push(state);
    }

    pub fn first(&self) -> &S {
        &self.states[0]
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("fragments are nonempty")
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn labels(&self) -> &[StepLabel] {
        &self.labels
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Index of the first probabilistic step, if any.
    pub fn first_probabilistic(&self) -> Option<usize> {
        self.labels.iter().position(|l| matches!(l, StepLabel::Probability(_)))
    }

    pub fn is_deterministic(&self) -> bool {
        self.first_probabilistic().is_none()
    }

    fn check_with<F>(&self, successors: F) -> Result<(), GameError>
    where
        F: Fn(&S) -> Vec<(GameAction, Vec<(S, f64)>)>,
    {
        for (i, label) in self.labels.iter().enumerate() {
            let (s, t) = (&self.states[i], &self.states[i + 1]);
            let succ = successors(s);
            let ok = match label {
                StepLabel::Action(a) => succ.iter().any(|(b, d)| b == a && d.len() == 1 && d[0].0 == *t),
                StepLabel::Probability(p) => succ.iter().any(|(b, d)| {
                    *b == GameAction::Tau && d.iter().any(|(u, q)| u == t && (q - p).abs() <= LABEL_TOLERANCE)
                }),
            };
            if !ok {
                return Err(GameError::IllegalStep { index: i });
            }
        }
        Ok(())
    }
}

impl ExecutionFragment<HigState> {
    /// Checks every step against the hidden-information rules.
    pub fn check_hig(&self, model: &GameModel) -> Result<(), GameError> {
        self.check_with(|s| hig_successors(model, s).into_iter().map(|(a, d)| (a, d.into_support())).collect())
    }
}

impl ExecutionFragment<DagState> {
    /// Checks every step against the delayed-action rules. Steps into the trapped sink are illegal.
    pub fn check_dag(&self, game: &DagGame) -> Result<(), GameError> {
        self.check_with(|s| {
            game.successors(&DagNode::State(*s))
                .into_iter()
                .map(|(a, d)| {
                    let support =
                        d.into_support().into_iter().filter_map(|(n, p)| n.state().map(|s| (*s, p))).collect();
                    (a, support)
                })
                .collect()
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MoveStep {
    pub player: PlayerId,
    pub action: GameAction,
}

impl MoveStep {
    pub fn p1(action: GameAction) -> Self {
        MoveStep { player: PlayerId::P1, action }
    }

    pub fn p2(action: GameAction) -> Self {
        MoveStep { player: PlayerId::P2, action }
    }

    pub fn tau() -> Self {
        MoveStep { player: PlayerId::PStoch, action: GameAction::Tau }
    }
}

/// A sequence of actions; probabilistic steps appear as `tau`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Move(pub Vec<MoveStep>);

impl Move {
    pub fn steps(&self) -> &[MoveStep] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Actions of one player, in order.
    pub fn projection(&self, player: PlayerId) -> Vec<GameAction> {
        self.0.iter().filter(|s| s.player == player).map(|s| s.action).collect()
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("-");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match s.player {
                PlayerId::PStoch => write!(f, "{}", s.action)?,
                PlayerId::P1 => write!(f, "b:{}", s.action)?,
                PlayerId::P2 => write!(f, "a:{}", s.action)?,
            }
        }
        Ok(())
    }
}

/// The move of `rho` from the first occurrence of `from` onward. Each action is
/// attributed to the owner of its source state.
pub fn move_of<S: Clone + PartialEq + Turn>(rho: &ExecutionFragment<S>, from: &S) -> Result<Move, GameError> {
    let start = rho.states.iter().position(|s| s == from).ok_or(GameError::StateNotInFragment)?;
    let steps = rho.labels[start..]
        .iter()
        .zip(&rho.states[start..])
        .map(|(label, src)| match label {
            StepLabel::Action(a) => MoveStep { player: src.turn(), action: *a },
            StepLabel::Probability(_) => MoveStep::tau(),
        })
        .collect();
    Ok(Move(steps))
}
