use super::graph::{GameGraph, GraphNode, NodeKind};
use super::SynthesisError;

pub const GFP_TOLERANCE: f64 = 1e-8;
pub const GFP_MAX_SWEEPS: usize = 100_000;
/// Values within this distance count as tied; ties go to the earlier edge.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Opt {
    Max,
    Min,
}

impl Opt {
    pub fn opposite(self) -> Opt {
        match self {
            Opt::Max => Opt::Min,
            Opt::Min => Opt::Max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Avoid hazards until a goal exit is reached within `k` transitions.
    SafeUntilReach { k: usize },
    /// Reach a goal exit using at most `n` reveal attempts.
    EventuallyTarget { n: usize },
    /// Never reach a hazard.
    GloballySafe,
}

/// A query with the planner's coalition optimizing `p2` and the adversary `p1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Query {
    pub objective: Objective,
    pub p2: Opt,
    pub p1: Opt,
}

impl Query {
    /// Planner maximizes against a worst-case adversary.
    pub fn new(objective: Objective) -> Self {
        Query { objective, p2: Opt::Max, p1: Opt::Min }
    }

    /// Both players optimize in the given direction, e.g. to bound an adversary-only model.
    pub fn cooperative(objective: Objective, mode: Opt) -> Self {
        Query { objective, p2: mode, p1: mode }
    }
}

/// Values at the full budget, plus the chosen edge of every decision node at each
/// budget (`choices[r][node]`).
#[derive(Clone, Debug)]
pub struct Solution {
    pub values: Vec<f64>,
    pub choices: Vec<Vec<u8>>,
}

impl Solution {
    pub fn choice(&self, budget: usize, node: usize) -> usize {
        let layer = budget.min(self.choices.len() - 1);
        self.choices[layer][node] as usize
    }
}

fn pick(graph: &GameGraph, i: usize, v: &[f64], opt: Opt) -> (f64, u8) {
    let mut best = f64::NAN;
    let mut arg = 0u8;
    for (j, e) in graph.edges(i).iter().enumerate() {
        let x = v[e.target as usize];
        let better = match opt {
            Opt::Max => x > best + TIE_TOLERANCE,
            Opt::Min => x < best - TIE_TOLERANCE,
        };
        if best.is_nan() || better {
            best = x;
            arg = j as u8;
        }
    }
    (if best.is_nan() { 0.0 } else { best }, arg)
}

fn expect(graph: &GameGraph, i: usize, v: &[f64]) -> f64 {
    graph.edges(i).iter().map(|e| e.prob * v[e.target as usize]).sum()
}

fn leaf_value(graph: &GameGraph, i: usize) -> f64 {
    if graph.goal[i] {
        1.0
    } else {
        0.0
    }
}

/// Solves `query` on `graph`.
pub fn solve(graph: &GameGraph, query: &Query) -> Result<Solution, SynthesisError> {
    match query.objective {
        Objective::SafeUntilReach { k } => Ok(bounded_until(graph, query, k)),
        Objective::EventuallyTarget { n } => eventually(graph, query, n),
        Objective::GloballySafe => globally_safe(graph, query),
    }
}

/// Values of `query` at every node.
pub fn model_check(graph: &GameGraph, query: &Query) -> Result<Vec<f64>, SynthesisError> {
    solve(graph, query).map(|s| s.values)
}

fn bounded_until(graph: &GameGraph, query: &Query, k: usize) -> Solution {
    let n = graph.len();
    let mut prev: Vec<f64> = (0..n).map(|i| leaf_value(graph, i)).collect();
    let mut choices = vec![vec![0u8; n]];
    for _ in 1..=k {
        let mut cur = vec![0.0; n];
        let mut choice = vec![0u8; n];
        for i in 0..n {
            cur[i] = if graph.goal[i] {
                1.0
            } else {
                match graph.kind[i] {
                    NodeKind::Leaf => 0.0,
                    NodeKind::Decision => {
                        let (v, a) = pick(graph, i, &prev, query.p2);
                        choice[i] = a;
                        v
                    }
                    NodeKind::Adversary => pick(graph, i, &prev, query.p1).0,
                    NodeKind::Chance => expect(graph, i, &prev),
                }
            };
        }
        choices.push(choice);
        prev = cur;
    }
    Solution { values: prev, choices }
}

/// Orders nodes so that every non-chance edge points to an earlier node.
fn layer_order(graph: &GameGraph) -> Result<Vec<usize>, SynthesisError> {
    let n = graph.len();
    let same_layer = |i: usize| matches!(graph.kind[i], NodeKind::Decision | NodeKind::Adversary);
    let mut pending = vec![0u32; n];
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
    for i in (0..n).filter(|&i| same_layer(i)) {
        for e in graph.edges(i) {
            pending[i] += 1;
            preds[e.target as usize].push(i as u32);
        }
    }
    let mut order: Vec<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
    let mut head = 0;
    while head < order.len() {
        let t = order[head];
        head += 1;
        for &p in &preds[t] {
            pending[p as usize] -= 1;
            if pending[p as usize] == 0 {
                order.push(p as usize);
            }
        }
    }
    if order.len() < n {
        return Err(SynthesisError::Cycle);
    }
    Ok(order)
}

fn eventually(graph: &GameGraph, query: &Query, budget: usize) -> Result<Solution, SynthesisError> {
    let n = graph.len();
    let order = layer_order(graph)?;
    let mut prev = vec![0.0; n];
    let mut choices = Vec::with_capacity(budget + 1);
    for j in 0..=budget {
        let mut cur = vec![0.0; n];
        let mut choice = vec![0u8; n];
        for &i in &order {
            cur[i] = if graph.goal[i] {
                1.0
            } else {
                match graph.kind[i] {
                    NodeKind::Leaf => 0.0,
                    NodeKind::Chance if j == 0 => 0.0,
                    NodeKind::Chance => expect(graph, i, &prev),
                    NodeKind::Decision => {
                        let (v, a) = pick(graph, i, &cur, query.p2);
                        choice[i] = a;
                        v
                    }
                    NodeKind::Adversary => pick(graph, i, &cur, query.p1).0,
                }
            };
        }
        choices.push(choice);
        prev = cur;
    }
    Ok(Solution { values: prev, choices })
}

fn globally_safe(graph: &GameGraph, query: &Query) -> Result<Solution, SynthesisError> {
    let n = graph.len();
    let mut v: Vec<f64> =
        (0..n).map(|i| if graph.hazard[i] || graph.nodes[i] == GraphNode::Fail { 0.0 } else { 1.0 }).collect();
    let mut choice = vec![0u8; n];
    let mut residual = f64::INFINITY;
    for _ in 0..GFP_MAX_SWEEPS {
        residual = 0.0;
        for i in 0..n {
            let x = match graph.kind[i] {
                NodeKind::Leaf => continue,
                NodeKind::Decision => {
                    let (x, a) = pick(graph, i, &v, query.p2);
                    choice[i] = a;
                    x
                }
                NodeKind::Adversary => pick(graph, i, &v, query.p1).0,
                NodeKind::Chance => expect(graph, i, &v),
            };
            residual = residual.max((x - v[i]).abs());
            v[i] = x;
        }
        if residual < GFP_TOLERANCE {
            return Ok(Solution { values: v, choices: vec![choice] });
        }
    }
    Err(SynthesisError::NonConvergence { residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::{Cell, DagGame, Direction};
    use crate::model::{CellSet, GameModel};
    use crate::synthesis::graph::{build_state_space, BuildOptions, Planner};

    fn corridor(p: f64) -> GameModel {
        let mut m = GameModel::new(4, 3, Cell::new(1, 1), p);
        m.hazards = CellSet::new(4, 3);
        m.beta_spread = 0;
        m.h_adv = 0;
        m.actions = vec![Direction::E];
        m.reach.insert(Cell::new(2, 1));
        m
    }

    #[test]
    fn bernoulli_retry_gives_three_quarters() {
        let m = corridor(0.5);
        let g = DagGame::new(&m).with_h_max(1);
        let graph = build_state_space(&g, g.initial(), &BuildOptions::subgame(Planner::Pinned(1))).unwrap();
        let v = model_check(&graph, &Query::new(Objective::EventuallyTarget { n: 2 })).unwrap();
        assert_eq!(v[0], 0.75);
        let v = model_check(&graph, &Query::new(Objective::EventuallyTarget { n: 1 })).unwrap();
        assert_eq!(v[0], 0.5);
    }

    #[test]
    fn goal_and_hazard_roots() {
        let mut m = corridor(0.5);
        m.reach.insert(Cell::new(1, 1));
        let g = DagGame::new(&m).with_h_max(1);
        let graph = build_state_space(&g, g.initial(), &BuildOptions::subgame(Planner::Free)).unwrap();
        let exit = graph.index_of(&crate::synthesis::GraphNode::Exit(Cell::new(1, 1))).unwrap();
        for k in 0..4 {
            assert_eq!(model_check(&graph, &Query::new(Objective::SafeUntilReach { k })).unwrap()[exit], 1.0);
        }
        m.hazards.insert(Cell::new(1, 1));
        let g = DagGame::new(&m).with_h_max(1);
        let graph = build_state_space(&g, g.initial(), &BuildOptions::subgame(Planner::Free)).unwrap();
        assert_eq!(model_check(&graph, &Query::new(Objective::SafeUntilReach { k: 6 })).unwrap()[0], 0.0);
    }

    #[test]
    fn bounded_until_one_attempt_then_retry() {
        let m = corridor(0.5);
        let g = DagGame::new(&m).with_h_max(1);
        let graph = build_state_space(&g, g.initial(), &BuildOptions::subgame(Planner::Pinned(1))).unwrap();
        let at = |k| model_check(&graph, &Query::new(Objective::SafeUntilReach { k })).unwrap()[0];
        assert_eq!(at(3), 0.0);
        assert_eq!(at(4), 0.5);
        assert_eq!(at(6), 0.5);
        assert_eq!(at(7), 0.75);
    }

    #[test]
    fn globally_safe_converges() {
        let mut m = corridor(0.5);
        m.actions = vec![Direction::E, Direction::W];
        m.hazards.insert(Cell::new(0, 1));
        let g = DagGame::new(&m).with_h_max(2);
        let graph = build_state_space(&g, g.initial(), &BuildOptions::subgame(Planner::Free)).unwrap();
        let v = model_check(&graph, &Query::new(Objective::GloballySafe)).unwrap();
        assert_eq!(v[0], 1.0);
        let v = model_check(&graph, &Query::cooperative(Objective::GloballySafe, Opt::Min)).unwrap();
        assert_eq!(v[0], 0.0);
    }
}
