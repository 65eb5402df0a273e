use super::{DagState, HigState};

pub fn is_proper_hig(s: &HigState) -> bool {
    s.omega.len() == 1 && s.omega.contains(&s.truth)
}

pub fn is_proper_dag(s: &DagState) -> bool {
    s.word.is_empty()
}

/// Same belief, same owner, and the DAG truth is one of the HIG's possible truths.
pub fn is_similar(s: &HigState, d: &DagState) -> bool {
    s.belief == d.belief && s.omega.contains(&d.truth) && s.turn == d.turn
}

/// Same truth, same belief, same owner, both proper. Properness of the HIG side
/// is required explicitly so that equivalence always implies it.
pub fn is_equivalent(s: &HigState, d: &DagState) -> bool {
    s.truth == d.truth && s.belief == d.belief && s.turn == d.turn && is_proper_dag(d) && is_proper_hig(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::{Cell, Direction, PlayerId, Word};
    use std::collections::BTreeSet;

    #[test]
    fn proper_states_are_equivalent() {
        let t = Cell::new(2, 2);
        let s = HigState::proper(t);
        let d = DagState::proper(t);
        assert!(is_equivalent(&s, &d));
        assert!(is_similar(&s, &d));
        assert!(is_proper_hig(&s) && is_proper_dag(&d));
    }

    #[test]
    fn example_states_are_similar() {
        let (zb, zc, zd) = (Cell::new(2, 4), Cell::new(3, 4), Cell::new(4, 4));
        let s = HigState {
            truth: zd,
            belief: zc,
            omega: BTreeSet::from([zb, zc, zd]),
            turn: PlayerId::P2,
            pending: None,
            steps: 1,
        };
        let d = DagState {
            origin: zb,
            truth: zb,
            belief: zc,
            word: Word::from_dirs(&[Direction::N]),
            index: 0,
            turn: PlayerId::P2,
        };
        assert!(is_similar(&s, &d));
        assert!(!is_equivalent(&s, &d));
        assert!(!is_similar(&HigState { turn: PlayerId::P1, ..s }, &d));
    }
}
