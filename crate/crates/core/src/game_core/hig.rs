use std::collections::BTreeSet;
use std::fmt;

use crate::model::GameModel;

use super::{step, Cell, Direction, Distribution, GameAction, PlayerId};

/// A hidden-information game state `s_γ(t, u, Ω)`.
///
/// `pending` holds the planner move the adversary is about to answer, and
/// `steps` counts planner moves since the last successful reveal; together they
/// determine the adversary's deviation set at P1 states.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HigState {
    pub truth: Cell,
    pub belief: Cell,
    pub omega: BTreeSet<Cell>,
    pub turn: PlayerId,
    pub pending: Option<Direction>,
    pub steps: usize,
}

impl HigState {
    pub fn proper(cell: Cell) -> Self {
        HigState {
            truth: cell,
            belief: cell,
            omega: BTreeSet::from([cell]),
            turn: PlayerId::P2,
            pending: None,
            steps: 0,
        }
    }
}

impl fmt::Display for HigState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s_{}({}|{}|{{", self.turn, self.truth, self.belief)?;
        for (i, c) in self.omega.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("})")
    }
}

pub fn hig_initial(model: &GameModel) -> HigState {
    HigState::proper(model.start)
}

pub fn hig_successors(model: &GameModel, s: &HigState) -> Vec<(GameAction, Distribution<HigState>)> {
    let (w, h) = (model.width, model.height);
    match s.turn {
        PlayerId::P2 => {
            let mut out: Vec<_> = model
                .actions
                .iter()
                .map(|&a| {
                    let beta = model.beta_at(s.steps, a);
                    let omega = s.omega.iter().flat_map(|&o| beta.iter().map(move |b| step(o, b, w, h))).collect();
                    let next = HigState {
                        truth: s.truth,
                        belief: step(s.belief, a, w, h),
                        omega,
                        turn: PlayerId::P1,
                        pending: Some(a),
                        steps: s.steps + 1,
                    };
                    (GameAction::Move(a), Distribution::dirac(next))
                })
                .collect();
            let reveal = HigState { turn: PlayerId::PStoch, ..s.clone() };
            out.push((GameAction::Theta, Distribution::dirac(reveal)));
            out
        }
        PlayerId::P1 => {
            let Some(a) = s.pending else { return Vec::new() };
            model
                .beta_at(s.steps - 1, a)
                .iter()
                .map(|b| {
                    let next =
                        HigState { truth: step(s.truth, b, w, h), turn: PlayerId::P2, pending: None, ..s.clone() };
                    (GameAction::Move(b), Distribution::dirac(next))
                })
                .collect()
        }
        PlayerId::PStoch => {
            let p = model.detection(s.truth, s.belief);
            let success = HigState::proper(s.truth);
            let failure = HigState { turn: PlayerId::P2, ..s.clone() };
            vec![(GameAction::Tau, Distribution::from_pairs([(success, p), (failure, 1.0 - p)]))]
        }
    }
}
