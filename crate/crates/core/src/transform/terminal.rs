use crate::game_core::{
    delay_move, hig_successors, is_equivalent, is_proper_hig, is_similar, move_of, DagGame, DagState,
    ExecutionFragment, GameAction, GameError, HigState, MoveStep, PlayerId, StepLabel, Word,
};
use crate::model::GameModel;

use super::{apply_delayed, TransformError};

/// Checks that a deterministic HIG fragment and its delayed move, run from the
/// equivalent DAG state, end in similar states.
///
/// A fragment ending at a P2 state is closed with a reveal attempt on both sides,
/// so that the adversary's delayed actions are played on the DAG; a fragment
/// ending with `theta` is compared as is. The empty fragment is compared directly.
pub fn check_terminal_similarity(model: &GameModel, rho: &ExecutionFragment<HigState>) -> Result<bool, TransformError> {
    if let Some(index) = rho.first_probabilistic() {
        return Err(GameError::NotDeterministic { index }.into());
    }
    rho.check_hig(model)?;
    let first = rho.first();
    if !is_proper_hig(first) || first.turn != PlayerId::P2 {
        return Err(TransformError::ImproperStart);
    }
    let start = DagState::proper(first.truth);
    if rho.is_empty() {
        return Ok(is_equivalent(first, &start) && is_similar(first, &start));
    }
    let mut last = rho.last().clone();
    let mut mv = move_of(rho, first)?;
    match last.turn {
        PlayerId::P2 => {
            mv.0.push(MoveStep::p2(GameAction::Theta));
            last.turn = PlayerId::PStoch;
        }
        PlayerId::PStoch => {}
        PlayerId::P1 => return Err(GameError::NotPlannerTerminal.into()),
    }
    let moves = mv.projection(PlayerId::P2).iter().filter(|a| a.direction().is_some()).count();
    let game = DagGame::new(model).with_h_max(model.h_max.max(moves).min(Word::CAPACITY));
    let delayed = delay_move(&mv)?;
    Ok(apply_delayed(&game, start, &delayed, &mut std::iter::empty()).is_some_and(|r| is_similar(&last, &r.state)))
}

/// All deterministic fragments from `start` with at most `max_len` steps that end
/// at a P2 state or immediately after a reveal attempt.
pub fn deterministic_fragments(model: &GameModel, start: HigState, max_len: usize) -> Vec<ExecutionFragment<HigState>> {
    fn go(
        model: &GameModel,
        rho: &mut ExecutionFragment<HigState>,
        max_len: usize,
        out: &mut Vec<ExecutionFragment<HigState>>,
    ) {
        out.push(rho.clone());
        if rho.len() + 1 > max_len {
            return;
        }
        for (a, d) in hig_successors(model, rho.last()) {
            let next = d.support()[0].0.clone();
            if a == GameAction::Theta {
                let mut closed = rho.clone();
                closed.push(StepLabel::Action(a), next);
                out.push(closed);
                continue;
            }
            if rho.len() + 2 > max_len {
                continue;
            }
            for (b, d1) in hig_successors(model, &next) {
                let mut ext = rho.clone();
                ext.push(StepLabel::Action(a), next.clone());
                ext.push(StepLabel::Action(b), d1.support()[0].0.clone());
                go(model, &mut ext, max_len, out);
            }
        }
    }
    let mut out = Vec::new();
    go(model, &mut ExecutionFragment::new(start), max_len, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::{Cell, Direction};

    fn model(spread: u8) -> GameModel {
        let mut m = GameModel::new(4, 4, Cell::new(1, 1), 0.5);
        m.beta_spread = spread;
        m.h_adv = 0;
        m
    }

    #[test]
    fn empty_fragment_is_similar() {
        let m = model(1);
        let rho = ExecutionFragment::new(HigState::proper(m.start));
        assert!(check_terminal_similarity(&m, &rho).unwrap());
    }

    #[test]
    fn fig2_prefix_is_similar() {
        let m = model(1);
        let frags = deterministic_fragments(&m, HigState::proper(Cell::new(1, 1)), 4);
        let target = frags
            .iter()
            .find(|f| {
                let acts: Vec<_> = f
                    .labels()
                    .iter()
                    .map(|l| match l {
                        StepLabel::Action(a) => *a,
                        _ => unreachable!(),
                    })
                    .collect();
                acts == [Direction::N, Direction::NE, Direction::N, Direction::N].map(GameAction::Move)
            })
            .expect("fragment enumerated");
        assert!(check_terminal_similarity(&m, target).unwrap());
    }

    #[test]
    fn all_short_fragments_are_similar() {
        for spread in [0, 1] {
            let m = model(spread);
            let frags = deterministic_fragments(&m, HigState::proper(m.start), 4);
            assert!(frags.len() > 50);
            for f in &frags {
                assert!(check_terminal_similarity(&m, f).unwrap(), "{:?}", f.labels());
                if spread == 0 && f.last().turn == PlayerId::P2 {
                    assert_eq!(f.last().omega.len(), 1);
                }
            }
        }
    }

    #[test]
    fn probabilistic_or_p1_terminal_fragments_are_rejected() {
        let m = model(1);
        let frags = deterministic_fragments(&m, HigState::proper(m.start), 2);
        let theta = frags.iter().find(|f| f.last().turn == PlayerId::PStoch).unwrap();
        let mut prob = theta.clone();
        prob.push(StepLabel::Probability(0.5), HigState::proper(m.start));
        assert!(matches!(
            check_terminal_similarity(&m, &prob),
            Err(TransformError::Game(GameError::NotDeterministic { index: 1 }))
        ));
        let two = frags.iter().find(|f| f.len() == 2).unwrap();
        let mut p1_end = ExecutionFragment::new(two.first().clone());
        p1_end.push(two.labels()[0], two.states()[1].clone());
        assert!(matches!(
            check_terminal_similarity(&m, &p1_end),
            Err(TransformError::Game(GameError::NotPlannerTerminal))
        ));
    }
}
