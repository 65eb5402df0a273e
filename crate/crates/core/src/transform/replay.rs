use crate::game_core::{DagGame, DagNode, DagState, Direction, GameAction, Move, PlayerId};

/// Outcome of running a delayed move on the DAG.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Replay {
    pub state: DagState,
    pub probability: f64,
}

/// Runs the delayed move `m` from `start`. Each `tau` consumes the next entry of
/// `outcomes` (true = reveal succeeded). After a failed reveal the adversary
/// replays the actions it already committed in the current subgame; only actions
/// beyond those are read from `m`.
///
/// Returns `None` if some step of `m` is not enabled where it is applied or the
/// game traps.
pub fn apply_delayed(
    game: &DagGame,
    start: DagState,
    m: &Move,
    outcomes: &mut dyn Iterator<Item = bool>,
) -> Option<Replay> {
    let mut s = start;
    let mut prob = 1.0;
    let mut committed: Vec<Direction> = Vec::new();
    let mut steps = m.steps().iter().peekable();

    let dirac = |s: &DagState, a: GameAction| -> Option<DagState> {
        let succ = game.successors(&DagNode::State(*s));
        let (_, d) = succ.into_iter().find(|(b, _)| *b == a)?;
        match d.support() {
            [(DagNode::State(t), _)] => Some(*t),
            _ => None,
        }
    };

    loop {
        // Replay committed adversary actions first.
        while s.turn == PlayerId::P1 && (s.index as usize) < committed.len() {
            s = dirac(&s, GameAction::Move(committed[s.index as usize]))?;
        }
        let Some(step) = steps.next() else { break };
        match (step.player, step.action) {
            (PlayerId::P2, a) => {
                if s.turn != PlayerId::P2 {
                    return None;
                }
                s = dirac(&s, a)?;
            }
            (PlayerId::P1, GameAction::Move(b)) => {
                if s.turn != PlayerId::P1 || s.index as usize != committed.len() {
                    return None;
                }
                s = dirac(&s, GameAction::Move(b))?;
                committed.push(b);
            }
            (PlayerId::PStoch, GameAction::Tau) => {
                if s.turn != PlayerId::PStoch {
                    return None;
                }
                let r = game.reveal_outcomes(&s);
                if outcomes.next()? {
                    prob *= r.p_success;
                    s = r.success;
                    committed.clear();
                } else {
                    prob *= 1.0 - r.p_success;
                    s = r.failure;
                }
            }
            _ => return None,
        }
    }
    Some(Replay { state: s, probability: prob })
}
