use std::fmt;

use crate::model::GameModel;

use super::{step, Cell, Direction, Distribution, GameAction, PlayerId, Word};

/// A delayed-action game state `ŝ_γ(t̂, û, w, j)`.
///
/// `origin` is the truth at the most recent proper state, i.e. the value a
/// failed reveal resets `truth` to. At P2 states `truth == origin`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DagState {
    pub origin: Cell,
    pub truth: Cell,
    pub belief: Cell,
    pub word: Word,
    pub index: u8,
    pub turn: PlayerId,
}

impl DagState {
    pub fn proper(cell: Cell) -> Self {
        DagState { origin: cell, truth: cell, belief: cell, word: Word::empty(), index: 0, turn: PlayerId::P2 }
    }

    pub fn is_proper(&self) -> bool {
        self.word.is_empty()
    }
}

impl fmt::Display for DagState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({};{};{};{};{})", self.turn, self.origin, self.truth, self.belief, self.word, self.index)
    }
}

/// A node of the stopping-composed DAG: a state, or the per-subgame sink
/// entered when a move is attempted with a full word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DagNode {
    State(DagState),
    Trapped,
}

impl DagNode {
    pub fn state(&self) -> Option<&DagState> {
        match self {
            DagNode::State(s) => Some(s),
            DagNode::Trapped => None,
        }
    }
}

impl fmt::Display for DagNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DagNode::State(s) => s.fmt(f),
            DagNode::Trapped => f.write_str("trapped"),
        }
    }
}

/// Deliberate single-rule faults, used to confirm the simulation check has teeth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleMutation {
    /// D1: the initial belief is displaced by one cell.
    InitialBeliefShifted,
    /// D2: planner moves do not update the belief.
    MoveKeepsBelief,
    /// D2: a reveal attempt skips the first delayed adversary action.
    ThetaSkipsFirst,
    /// D3: delayed adversary actions do not update the truth.
    TruthNotUpdated,
    /// D3: the chance state is entered one delayed action early.
    EarlyReveal,
    /// D4: success and failure probabilities are swapped.
    SuccessOddsSwapped,
    /// D4: a failed reveal keeps the replayed truth instead of resetting it.
    FailureKeepsTruth,
}

impl RuleMutation {
    pub const ALL: [RuleMutation; 7] = [
        RuleMutation::InitialBeliefShifted,
        RuleMutation::MoveKeepsBelief,
        RuleMutation::ThetaSkipsFirst,
        RuleMutation::TruthNotUpdated,
        RuleMutation::EarlyReveal,
        RuleMutation::SuccessOddsSwapped,
        RuleMutation::FailureKeepsTruth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleMutation::InitialBeliefShifted => "d1-initial-belief",
            RuleMutation::MoveKeepsBelief => "d2-move-keeps-belief",
            RuleMutation::ThetaSkipsFirst => "d2-theta-skips-first",
            RuleMutation::TruthNotUpdated => "d3-truth-not-updated",
            RuleMutation::EarlyReveal => "d3-early-reveal",
            RuleMutation::SuccessOddsSwapped => "d4-odds-swapped",
            RuleMutation::FailureKeepsTruth => "d4-failure-keeps-truth",
        }
    }

    pub fn parse(s: &str) -> Option<RuleMutation> {
        RuleMutation::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl fmt::Display for RuleMutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Both outcomes of a reveal attempt, kept apart even when they coincide.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RevealOutcomes {
    pub p_success: f64,
    pub success: DagState,
    pub failure: DagState,
}

/// The delayed-action game of a model, composed with the `|w| = h_max` stopping criterion.
#[derive(Clone, Copy, Debug)]
pub struct DagGame<'m> {
    model: &'m GameModel,
    h_max: usize,
    mutation: Option<RuleMutation>,
}

impl<'m> DagGame<'m> {
    pub fn new(model: &'m GameModel) -> Self {
        DagGame { model, h_max: model.h_max, mutation: None }
    }

    pub fn with_h_max(mut self, h_max: usize) -> Self {
        assert!(h_max <= Word::CAPACITY, "h_max {h_max} exceeds word capacity");
        self.h_max = h_max;
        self
    }

    pub fn with_mutation(mut self, mutation: Option<RuleMutation>) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn model(&self) -> &'m GameModel {
        self.model
    }

    pub fn h_max(&self) -> usize {
        self.h_max
    }

    fn mutated(&self, m: RuleMutation) -> bool {
        self.mutation == Some(m)
    }

    fn step(&self, c: Cell, d: Direction) -> Cell {
        step(c, d, self.model.width, self.model.height)
    }

    pub fn initial(&self) -> DagState {
        let mut s = DagState::proper(self.model.start);
        if self.mutated(RuleMutation::InitialBeliefShifted) {
            let start = self.model.start;
            s.belief = Direction::ALL.iter().map(|&d| self.step(start, d)).find(|&c| c != start).unwrap_or(start);
        }
        s
    }

    pub fn root(&self, cell: Cell) -> DagState {
        DagState::proper(cell)
    }

    /// Adversary deviations available at a P1 state.
    pub fn deviations(&self, s: &DagState) -> impl Iterator<Item = Direction> {
        let j = s.index as usize;
        self.model.beta_at(j, s.word.get(j)).iter()
    }

    /// Chance outcomes of a PSTOCH state.
    pub fn reveal_outcomes(&self, s: &DagState) -> RevealOutcomes {
        debug_assert_eq!(s.turn, PlayerId::PStoch);
        let mut p = self.model.detection(s.truth, s.belief);
        if self.mutated(RuleMutation::SuccessOddsSwapped) {
            p = 1.0 - p;
        }
        let failure_truth = if self.mutated(RuleMutation::FailureKeepsTruth) { s.truth } else { s.origin };
        RevealOutcomes {
            p_success: p,
            success: DagState::proper(s.truth),
            failure: DagState {
                origin: s.origin,
                truth: failure_truth,
                belief: s.belief,
                word: s.word,
                index: 0,
                turn: PlayerId::P2,
            },
        }
    }

    /// Successor of the P2 move `a`, without the stopping check.
    pub fn after_move(&self, s: &DagState, a: Direction) -> DagState {
        let belief = if self.mutated(RuleMutation::MoveKeepsBelief) { s.belief } else { self.step(s.belief, a) };
        DagState { belief, word: s.word.push(a), ..*s }
    }

    /// Successor of θ at a P2 state.
    pub fn after_theta(&self, s: &DagState) -> DagState {
        let len = s.word.len();
        if len == 0 {
            return DagState { turn: PlayerId::PStoch, ..*s };
        }
        if self.mutated(RuleMutation::ThetaSkipsFirst) {
            return if len == 1 {
                DagState { turn: PlayerId::PStoch, ..*s }
            } else {
                DagState { turn: PlayerId::P1, index: 1, ..*s }
            };
        }
        DagState { turn: PlayerId::P1, index: 0, ..*s }
    }

    /// Successor of the delayed adversary action `b` at a P1 state.
    pub fn after_deviation(&self, s: &DagState, b: Direction) -> DagState {
        let truth = if self.mutated(RuleMutation::TruthNotUpdated) { s.truth } else { self.step(s.truth, b) };
        let len = s.word.len();
        let last = if self.mutated(RuleMutation::EarlyReveal) && len >= 2 { len - 2 } else { len - 1 };
        if s.index as usize >= last {
            DagState { truth, turn: PlayerId::PStoch, ..*s }
        } else {
            DagState { truth, index: s.index + 1, ..*s }
        }
    }

    pub fn successors(&self, node: &DagNode) -> Vec<(GameAction, Distribution<DagNode>)> {
        let DagNode::State(s) = node else { return Vec::new() };
        match s.turn {
            PlayerId::P2 => {
                let full = s.word.len() >= self.h_max;
                let mut out: Vec<_> = self
                    .model
                    .actions
                    .iter()
                    .map(|&a| {
                        let next = if full { DagNode::Trapped } else { DagNode::State(self.after_move(s, a)) };
                        (GameAction::Move(a), Distribution::dirac(next))
                    })
                    .collect();
                out.push((GameAction::Theta, Distribution::dirac(DagNode::State(self.after_theta(s)))));
                out
            }
            PlayerId::P1 => self
                .deviations(s)
                .map(|b| (GameAction::Move(b), Distribution::dirac(DagNode::State(self.after_deviation(s, b)))))
                .collect(),
            PlayerId::PStoch => {
                let r = self.reveal_outcomes(s);
                vec![(
                    GameAction::Tau,
                    Distribution::from_pairs([
                        (DagNode::State(r.success), r.p_success),
                        (DagNode::State(r.failure), 1.0 - r.p_success),
                    ]),
                )]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{HashSet, VecDeque};
    use Direction::*;

    fn model(p: f64) -> GameModel {
        let mut m = GameModel::new(8, 8, Cell::new(5, 1), p);
        m.h_adv = 0;
        m
    }

    fn dirac(d: &Distribution<DagNode>) -> DagNode {
        assert!(d.is_dirac());
        d.support()[0].0
    }

    #[test]
    fn initial_state() {
        let m = model(0.5);
        let s = DagGame::new(&m).initial();
        assert_eq!(s, DagState::proper(Cell::new(5, 1)));
        assert!(s.is_proper());
        assert_eq!(s.turn, PlayerId::P2);
    }

    #[test]
    fn planner_move_appends_to_word() {
        let m = model(0.5);
        let g = DagGame::new(&m);
        let t = Cell::new(3, 3);
        let succ = g.successors(&DagNode::State(DagState::proper(t)));
        let (_, d) = succ.iter().find(|(a, _)| *a == GameAction::Move(N)).unwrap();
        let DagNode::State(n) = dirac(d) else { panic!() };
        assert_eq!(
            (n.truth, n.belief, n.word, n.index, n.turn),
            (t, Cell::new(3, 4), Word::from_dirs(&[N]), 0, PlayerId::P2)
        );
    }

    #[test]
    fn last_delayed_action_enters_chance_state() {
        let m = model(0.5);
        let g = DagGame::new(&m);
        let t = Cell::new(3, 3);
        let s = DagState {
            origin: Cell::new(3, 2),
            truth: t,
            belief: Cell::new(4, 4),
            word: Word::from_dirs(&[N, E]),
            index: 1,
            turn: PlayerId::P1,
        };
        let succ = g.successors(&DagNode::State(s));
        assert_eq!(succ.len(), 3);
        for (a, d) in succ {
            let DagNode::State(n) = dirac(&d) else { panic!() };
            assert_eq!(n.turn, PlayerId::PStoch);
            assert_eq!(n.index, 1);
            assert_eq!(n.truth, step(t, a.direction().unwrap(), 8, 8));
            assert_eq!(n.belief, s.belief);
        }
    }

    #[test]
    fn certain_reveal_is_dirac_on_proper_state() {
        let m = model(1.0);
        let g = DagGame::new(&m);
        let s = DagState {
            origin: Cell::new(3, 2),
            truth: Cell::new(3, 3),
            belief: Cell::new(4, 4),
            word: Word::from_dirs(&[N]),
            index: 0,
            turn: PlayerId::PStoch,
        };
        let d = &g.successors(&DagNode::State(s))[0].1;
        assert_eq!(dirac(d), DagNode::State(DagState::proper(Cell::new(3, 3))));
    }

    #[test]
    fn failed_reveal_resets_truth_and_keeps_word() {
        let m = model(0.25);
        let g = DagGame::new(&m);
        let s = DagState {
            origin: Cell::new(3, 2),
            truth: Cell::new(3, 3),
            belief: Cell::new(4, 4),
            word: Word::from_dirs(&[N]),
            index: 0,
            turn: PlayerId::PStoch,
        };
        let r = g.reveal_outcomes(&s);
        assert_eq!(r.p_success, 0.25);
        assert_eq!(r.failure.truth, Cell::new(3, 2));
        assert_eq!(r.failure.word, s.word);
        assert_eq!(r.failure.belief, s.belief);
        assert_eq!(r.failure.turn, PlayerId::P2);
    }

    #[test]
    fn stopping_criterion_traps_moves_but_not_theta() {
        let mut m = model(0.5);
        m.h_max = 1;
        let g = DagGame::new(&m);
        let root = DagNode::State(DagState::proper(Cell::new(3, 3)));
        let (_, d) = &g.successors(&root)[0];
        let one = dirac(d);
        let succ = g.successors(&one);
        for (a, d) in &succ {
            match a {
                GameAction::Move(_) => assert_eq!(dirac(d), DagNode::Trapped),
                _ => assert_eq!(dirac(d).state().unwrap().turn, PlayerId::P1),
            }
        }
        assert!(g.successors(&DagNode::Trapped).is_empty());
    }

    #[test]
    fn every_mutation_changes_some_transition() {
        let m = model(0.3);
        let base = DagGame::new(&m);
        for mutation in RuleMutation::ALL {
            let g = DagGame::new(&m).with_mutation(Some(mutation));
            assert_eq!(RuleMutation::parse(mutation.name()), Some(mutation));
            let differs = reachable(&base, 3).into_iter().any(|n| g.successors(&n) != base.successors(&n))
                || g.initial() != base.initial();
            assert!(differs, "{mutation} had no effect");
        }
    }

    fn reachable(g: &DagGame, max: usize) -> Vec<DagNode> {
        let g = g.with_h_max(max);
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([DagNode::State(g.initial())]);
        let mut out = Vec::new();
        while let Some(n) = queue.pop_front() {
            if !seen.insert(n) {
                continue;
            }
            out.push(n);
            for (_, d) in g.successors(&n) {
                for (s, _) in d.support() {
                    queue.push_back(*s);
                }
            }
        }
        out
    }

    fn arb_model() -> impl Strategy<Value = GameModel> {
        (3u8..5, 3u8..5, 0u8..2, 0usize..2, prop::collection::vec(0.0f64..=1.0, 256)).prop_map(
            |(w, h, spread, hadv, ps)| {
                let mut m = GameModel::new(w, h, Cell::new(1, 1), 0.5);
                m.beta_spread = spread;
                m.h_adv = hadv;
                m.h_max = 2;
                let n = m.cell_count();
                for t in 0..n {
                    for u in 0..n {
                        m.p.set(t, u, ps[(t * n + u) % ps.len()]);
                    }
                }
                m
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn distributions_and_turn_pattern(m in arb_model()) {
            let g = DagGame::new(&m);
            for n in reachable(&g, 2) {
                let DagNode::State(s) = n else { continue };
                if s.turn == PlayerId::P2 {
                    prop_assert_eq!(s.index, 0);
                    prop_assert_eq!(s.truth, s.origin);
                }
                prop_assert!(s.index as usize <= s.word.len());
                for (a, d) in g.successors(&n) {
                    prop_assert!(d.is_well_formed());
                    for (next, _) in d.support() {
                        let DagNode::State(t) = next else { continue };
                        let bad = match (s.turn, t.turn) {
                            (PlayerId::P2, PlayerId::PStoch) => !(a == GameAction::Theta && s.word.is_empty()),
                            (PlayerId::P1, PlayerId::P2) => true,
                            (PlayerId::PStoch, PlayerId::P1) => true,
                            _ => false,
                        };
                        prop_assert!(!bad, "forbidden transition {} -{}-> {}", s, a, t);
                    }
                }
            }
        }
    }
}
