use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use crate::game_core::{Cell, DagState, GameAction};

use super::check::Solution;
use super::graph::{GameGraph, GraphNode, NodeKind};

pub const STRATEGY_HEADER: &str = "dagsynth-strategy v1";

/// A deterministic, budget-indexed planner strategy for one subgame.
#[derive(Clone, Debug, PartialEq)]
pub struct Strategy {
    pub subgame: usize,
    pub root: Cell,
    /// Stage at which the reveal is attempted.
    pub h: usize,
    /// Step budget the strategy was synthesized for.
    pub k: usize,
    pub value: f64,
    /// Action per (P2 state, remaining steps), for every pair reachable under the strategy.
    pub choices: BTreeMap<(DagState, usize), GameAction>,
}

impl Strategy {
    pub fn action(&self, s: &DagState, budget: usize) -> Option<GameAction> {
        self.choices.get(&(*s, budget)).copied()
    }

    /// Budget-free reading: the recorded action at `s` on the way to the pinned
    /// stage, and `theta` once the word has length `h`. This is the policy used
    /// when subgame strategies are composed, where a failed reveal is retried.
    pub fn policy(&self, s: &DagState) -> Option<GameAction> {
        if s.origin != self.root {
            return None;
        }
        if s.word.len() == self.h {
            return Some(GameAction::Theta);
        }
        self.choices.range((*s, 0)..=(*s, usize::MAX)).next().map(|(_, a)| *a)
    }

    /// Canonical text form: header, then one `state budget action` line per
    /// record in state order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{STRATEGY_HEADER}");
        let _ = writeln!(out, "subgame {}", self.subgame);
        let _ = writeln!(out, "root {}", self.root);
        let _ = writeln!(out, "h {}", self.h);
        let _ = writeln!(out, "k {}", self.k);
        let _ = writeln!(out, "value {}", self.value);
        for ((s, r), a) in &self.choices {
            let _ = writeln!(out, "{s} {r} {a}");
        }
        out
    }
}

/// Reads the strategy off `solution` by following it from the root with budget `k`.
pub fn extract_strategy(graph: &GameGraph, solution: &Solution, k: usize, subgame: usize, h: usize) -> Strategy {
    let GraphNode::State(root) = graph.nodes[graph.root()] else {
        panic!("graph root must be a state");
    };
    let mut choices = BTreeMap::new();
    let mut seen = HashSet::new();
    let mut stack = vec![(graph.root(), k)];
    while let Some((i, r)) = stack.pop() {
        if r == 0 || graph.goal[i] || !seen.insert((i, r)) {
            continue;
        }
        let edges = graph.edges(i);
        match graph.kind[i] {
            NodeKind::Leaf => {}
            NodeKind::Decision => {
                let e = edges[solution.choice(r, i)];
                if let GraphNode::State(s) = graph.nodes[i] {
                    choices.insert((s, r), e.action);
                }
                stack.push((e.target as usize, r - 1));
            }
            NodeKind::Adversary | NodeKind::Chance => {
                stack.extend(edges.iter().filter(|e| e.prob > 0.0).map(|e| (e.target as usize, r - 1)));
            }
        }
    }
    Strategy { subgame, root: root.truth, h, k, value: solution.values[graph.root()], choices }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::{DagGame, Direction};
    use crate::model::{CellSet, GameModel};
    use crate::synthesis::check::{solve, Objective, Query};
    use crate::synthesis::graph::{build_state_space, BuildOptions, Planner};

    fn open(p: f64) -> GameModel {
        let mut m = GameModel::new(3, 3, Cell::new(1, 1), p);
        m.hazards = CellSet::new(3, 3);
        m.beta_spread = 0;
        m.h_adv = 0;
        m
    }

    fn synth(m: &GameModel, h: usize) -> Strategy {
        let g = DagGame::new(m).with_h_max(h);
        let graph = build_state_space(&g, g.initial(), &BuildOptions::subgame(Planner::Pinned(h))).unwrap();
        let k = 2 * h + 2;
        let sol = solve(&graph, &Query::new(Objective::SafeUntilReach { k })).unwrap();
        extract_strategy(&graph, &sol, k, 0, h)
    }

    #[test]
    fn unique_maximizer_is_chosen() {
        let mut m = open(1.0);
        m.reach.insert(Cell::new(2, 1));
        let s = synth(&m, 1);
        assert_eq!(s.value, 1.0);
        assert_eq!(s.action(&DagState::proper(Cell::new(1, 1)), 4), Some(GameAction::Move(Direction::E)));
    }

    #[test]
    fn ties_break_in_compass_order() {
        let mut m = open(1.0);
        m.reach.insert(Cell::new(2, 1));
        m.reach.insert(Cell::new(1, 2));
        let s = synth(&m, 1);
        assert_eq!(s.action(&DagState::proper(Cell::new(1, 1)), 4), Some(GameAction::Move(Direction::N)));
        let text = s.to_text();
        assert!(text.starts_with(STRATEGY_HEADER));
        assert!(text.contains("h 1\n"));
        assert_eq!(s.policy(&DagState::proper(Cell::new(1, 1))), Some(GameAction::Move(Direction::N)));
    }
}
