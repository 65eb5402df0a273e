use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt;

use crate::game_core::{Cell, DagGame, DagNode, DagState, GameAction, PlayerId};

use super::SynthesisError;

/// Default cap on explicit graph size.
pub const DEFAULT_STATE_BUDGET: usize = 20_000_000;

/// When the planner may attempt a reveal, or a fixed planner policy.
#[derive(Clone, Copy)]
pub enum Planner<'a> {
    /// `theta` at any P2 state.
    Free,
    /// `theta` at any P2 state with a nonempty word.
    AfterMove,
    /// Moves while `|w| < h`, `theta` exactly at `|w| = h`.
    Pinned(usize),
    /// A fixed choice per P2 state; `None` sends the play to the fail sink.
    Fixed(&'a (dyn Fn(&DagState) -> Option<GameAction> + Sync)),
}

impl fmt::Debug for Planner<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Planner::Free => f.write_str("Free"),
            Planner::AfterMove => f.write_str("AfterMove"),
            Planner::Pinned(h) => write!(f, "Pinned({h})"),
            Planner::Fixed(_) => f.write_str("Fixed"),
        }
    }
}

/// What happens after a successful reveal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RevealMode {
    /// The play leaves the subgame through an exit leaf at the revealed cell.
    Exit,
    /// The play continues in the subgame rooted at the revealed cell, unless the
    /// cell is a target (goal exit) or outside the reach set (non-goal exit).
    Continue,
}

/// Which exit leaves count as goals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoalLabel {
    Reach,
    Target,
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions<'a> {
    pub planner: Planner<'a>,
    pub reveal: RevealMode,
    pub goal: GoalLabel,
    pub state_budget: usize,
}

impl<'a> BuildOptions<'a> {
    pub fn subgame(planner: Planner<'a>) -> Self {
        BuildOptions { planner, reveal: RevealMode::Exit, goal: GoalLabel::Reach, state_budget: DEFAULT_STATE_BUDGET }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphNode {
    State(DagState),
    Exit(Cell),
    Trapped,
    Fail,
}

impl fmt::Display for GraphNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphNode::State(s) => s.fmt(f),
            GraphNode::Exit(c) => write!(f, "exit({c})"),
            GraphNode::Trapped => f.write_str("trapped"),
            GraphNode::Fail => f.write_str("fail"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Decision,
    Adversary,
    Chance,
    /// Absorbing: exits, sinks and hazard states.
    Leaf,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub action: GameAction,
    pub target: u32,
    pub prob: f64,
}

/// An explicit game graph in compressed sparse row form. Node 0 is the root;
/// ids follow breadth-first discovery order, and the edges of each node follow
/// the successor order of the DAG (moves in compass order, then `theta`).
#[derive(Clone, Debug)]
pub struct GameGraph {
    pub nodes: Vec<GraphNode>,
    pub kind: Vec<NodeKind>,
    pub hazard: Vec<bool>,
    pub goal: Vec<bool>,
    offsets: Vec<u32>,
    edges: Vec<Edge>,
}

impl GameGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self, i: usize) -> &[Edge] {
        &self.edges[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn root(&self) -> usize {
        0
    }

    /// Assembles a graph from per-node edge lists. Node 0 is the root.
    pub fn from_adjacency(
        nodes: Vec<GraphNode>,
        kind: Vec<NodeKind>,
        hazard: Vec<bool>,
        goal: Vec<bool>,
        adjacency: Vec<Vec<Edge>>,
    ) -> Self {
        let n = nodes.len();
        assert!(kind.len() == n && hazard.len() == n && goal.len() == n && adjacency.len() == n);
        let mut offsets = vec![0u32];
        let mut edges = Vec::new();
        for list in adjacency {
            assert!(list.iter().all(|e| (e.target as usize) < n), "edge target out of range");
            edges.extend(list);
            offsets.push(edges.len() as u32);
        }
        GameGraph { nodes, kind, hazard, goal, offsets, edges }
    }

    pub fn index_of(&self, node: &GraphNode) -> Option<usize> {
        self.nodes.iter().position(|n| n == node)
    }
}

/// Whether a DAG state is labelled hazardous: P2 states by belief, P1 states by
/// truth, chance states by either.
pub fn is_hazard(game: &DagGame, s: &DagState) -> bool {
    let hz = &game.model().hazards;
    match s.turn {
        PlayerId::P2 => hz.contains(s.belief),
        PlayerId::P1 => hz.contains(s.truth),
        PlayerId::PStoch => hz.contains(s.truth) || hz.contains(s.belief),
    }
}

/// Breadth-first expansion of the DAG from `root`, with the stopping criterion
/// at `game.h_max()`. States are deduplicated by their full tuple.
pub fn build_state_space(game: &DagGame, root: DagState, opts: &BuildOptions) -> Result<GameGraph, SynthesisError> {
    let model = game.model();
    let mut ids: HashMap<GraphNode, u32> = HashMap::new();
    let mut nodes = vec![GraphNode::State(root)];
    ids.insert(nodes[0], 0);
    let mut kind = Vec::new();
    let mut hazard = Vec::new();
    let mut goal = Vec::new();
    let mut offsets = vec![0u32];
    let mut edges: Vec<Edge> = Vec::new();
    let mut scratch: Vec<(GameAction, GraphNode, f64)> = Vec::new();

    let mut next = 0usize;
    while next < nodes.len() {
        let node = nodes[next];
        next += 1;
        scratch.clear();
        let (k, hz, gl) = match node {
            GraphNode::Exit(c) => {
                let g = match opts.goal {
                    GoalLabel::Reach => model.reach.contains(c),
                    GoalLabel::Target => model.targets.contains(c),
                };
                (NodeKind::Leaf, false, g)
            }
            GraphNode::Trapped | GraphNode::Fail => (NodeKind::Leaf, false, false),
            GraphNode::State(s) if is_hazard(game, &s) => (NodeKind::Leaf, true, false),
            GraphNode::State(s) => {
                let k = match s.turn {
                    PlayerId::P2 => {
                        expand_planner(game, &s, opts, &mut scratch);
                        NodeKind::Decision
                    }
                    PlayerId::P1 => {
                        for b in game.deviations(&s) {
                            scratch.push((GameAction::Move(b), GraphNode::State(game.after_deviation(&s, b)), 1.0));
                        }
                        NodeKind::Adversary
                    }
                    PlayerId::PStoch => {
                        let r = game.reveal_outcomes(&s);
                        let success = match opts.reveal {
                            RevealMode::Exit => GraphNode::Exit(r.success.truth),
                            RevealMode::Continue => {
                                let t = r.success.truth;
                                if model.targets.contains(t) || !model.reach.contains(t) {
                                    GraphNode::Exit(t)
                                } else {
                                    GraphNode::State(r.success)
                                }
                            }
                        };
                        if r.p_success > 0.0 {
                            scratch.push((GameAction::Tau, success, r.p_success));
                        }
                        if r.p_success < 1.0 {
                            scratch.push((GameAction::Tau, GraphNode::State(r.failure), 1.0 - r.p_success));
                        }
                        NodeKind::Chance
                    }
                };
                (k, false, false)
            }
        };
        kind.push(k);
        hazard.push(hz);
        goal.push(gl);
        for &(action, target, prob) in &scratch {
            let id = match ids.entry(target) {
                Entry::Occupied(e) => *e.get(),
                Entry::Vacant(e) => {
                    let id = nodes.len() as u32;
                    e.insert(id);
                    nodes.push(target);
                    id
                }
            };
            edges.push(Edge { action, target: id, prob });
        }
        offsets.push(edges.len() as u32);
        if nodes.len() > opts.state_budget {
            return Err(SynthesisError::StateBudget { count: nodes.len(), budget: opts.state_budget });
        }
    }
    Ok(GameGraph { nodes, kind, hazard, goal, offsets, edges })
}

fn expand_planner(game: &DagGame, s: &DagState, opts: &BuildOptions, out: &mut Vec<(GameAction, GraphNode, f64)>) {
    let len = s.word.len();
    let (moves, theta) = match opts.planner {
        Planner::Free => (true, true),
        Planner::AfterMove => (true, len > 0),
        Planner::Pinned(h) => (len < h, len == h),
        Planner::Fixed(policy) => {
            match policy(s) {
                Some(GameAction::Theta) => out.push((GameAction::Theta, GraphNode::State(game.after_theta(s)), 1.0)),
                Some(GameAction::Move(d)) => out.push((GameAction::Move(d), move_target(game, s, d), 1.0)),
                _ => out.push((GameAction::Theta, GraphNode::Fail, 1.0)),
            }
            return;
        }
    };
    if moves {
        for &d in &game.model().actions {
            out.push((GameAction::Move(d), move_target(game, s, d), 1.0));
        }
    }
    if theta {
        out.push((GameAction::Theta, GraphNode::State(game.after_theta(s)), 1.0));
    }
}

fn move_target(game: &DagGame, s: &DagState, d: crate::game_core::Direction) -> GraphNode {
    if s.word.len() >= game.h_max() {
        GraphNode::Trapped
    } else {
        GraphNode::State(game.after_move(s, d))
    }
}

/// Converts a DAG node to a graph node.
impl From<DagNode> for GraphNode {
    fn from(n: DagNode) -> Self {
        match n {
            DagNode::State(s) => GraphNode::State(s),
            DagNode::Trapped => GraphNode::Trapped,
        }
    }
}
