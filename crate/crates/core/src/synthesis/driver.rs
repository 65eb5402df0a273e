use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::decomposition::{extract_subgame, reachable_roots, Frontier, Subgame};
use crate::game_core::{Cell, DagGame, GameAction};
use crate::model::GameModel;

use super::check::{solve, Objective, Query};
use super::graph::{build_state_space, BuildOptions, GameGraph, GraphNode, NodeKind, Planner, DEFAULT_STATE_BUDGET};
use super::strategy::{extract_strategy, Strategy};
use super::supergame::{SgNode, SupergameEdge, SupergameMdp};
use super::SynthesisError;

#[derive(Clone, Copy, Debug)]
pub struct SynthesisOptions {
    /// Step bound; `None` allows exactly one reveal attempt per stage (`k = 2h + 2`).
    pub k: Option<usize>,
    pub h_max: usize,
    pub workers: usize,
    pub state_budget: usize,
}

impl SynthesisOptions {
    pub fn new(h_max: usize) -> Self {
        SynthesisOptions { k: None, h_max, workers: 1, state_budget: DEFAULT_STATE_BUDGET }
    }

    pub fn k_for(&self, h: usize) -> usize {
        self.k.unwrap_or(2 * h + 2)
    }
}

/// How the adversary resolves a reveal attempt: the true cell at the attempt,
/// or a detour through a hazard.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Resolution {
    Truth(Cell),
    Hazard,
}

/// Outcome of synthesizing one subgame at one stage.
#[derive(Clone, Debug, PartialEq)]
pub struct StageResult {
    pub h: usize,
    pub value: f64,
    pub states: usize,
    pub strategy: Strategy,
    /// Cells of proper states reachable under the strategy.
    pub exits: BTreeSet<Cell>,
    /// Belief at the reveal attempt and the adversary's possible resolutions.
    pub belief: Option<Cell>,
    pub resolutions: BTreeSet<Resolution>,
}

/// Planner state at which `strategy` attempts its reveal, following it from the root.
fn reveal_node(graph: &GameGraph, strategy: &Strategy) -> Option<usize> {
    let mut i = graph.root();
    let mut r = strategy.k;
    loop {
        if graph.kind[i] != NodeKind::Decision {
            return None;
        }
        let GraphNode::State(s) = graph.nodes[i] else { return None };
        let a = strategy.action(&s, r)?;
        let e = graph.edges(i).iter().find(|e| e.action == a)?;
        if a == GameAction::Theta {
            return Some(i);
        }
        i = e.target as usize;
        r = r.checked_sub(1)?;
    }
}

/// The adversary's resolutions of the strategy's reveal attempt.
pub fn stage_resolutions(graph: &GameGraph, strategy: &Strategy) -> (Option<Cell>, BTreeSet<Resolution>) {
    let mut out = BTreeSet::new();
    let Some(i) = reveal_node(graph, strategy) else { return (None, out) };
    let GraphNode::State(at) = graph.nodes[i] else { return (None, out) };
    let theta = graph.edges(i).iter().find(|e| e.action == GameAction::Theta).map(|e| e.target as usize);
    let mut stack: Vec<usize> = theta.into_iter().collect();
    while let Some(j) = stack.pop() {
        if graph.hazard[j] {
            out.insert(Resolution::Hazard);
            continue;
        }
        match (graph.kind[j], graph.nodes[j]) {
            (NodeKind::Adversary, _) => stack.extend(graph.edges(j).iter().map(|e| e.target as usize)),
            (NodeKind::Chance, GraphNode::State(s)) => {
                out.insert(Resolution::Truth(s.truth));
            }
            _ => {}
        }
    }
    (Some(at.belief), out)
}

fn solve_stage(
    model: &GameModel,
    sub: &Subgame,
    h: usize,
    opts: &SynthesisOptions,
) -> Result<StageResult, SynthesisError> {
    let game = DagGame::new(model).with_h_max(h);
    let build = BuildOptions { state_budget: opts.state_budget, ..BuildOptions::subgame(Planner::Pinned(h)) };
    let graph = build_state_space(&game, sub.root, &build)?;
    let k = opts.k_for(h);
    let solution = solve(&graph, &Query::new(Objective::SafeUntilReach { k }))?;
    let strategy = extract_strategy(&graph, &solution, k, sub.id, h);
    let exits = reachable_roots(&graph, &strategy);
    let (belief, resolutions) = stage_resolutions(&graph, &strategy);
    Ok(StageResult { h, value: strategy.value, states: graph.len(), strategy, exits, belief, resolutions })
}

/// Synthesizes the subgame with the reveal pinned to each stage `h = 1..=h_max`.
/// Stops after the first stage without a positive value unless `full` is set, in
/// which case every stage is solved (stages are then solved concurrently).
pub fn synthesize_subgame(
    model: &GameModel,
    sub: &Subgame,
    opts: &SynthesisOptions,
    full: bool,
) -> Result<Vec<StageResult>, SynthesisError> {
    if full {
        return (1..=opts.h_max).into_par_iter().map(|h| solve_stage(model, sub, h, opts)).collect();
    }
    let mut out = Vec::new();
    for h in 1..=opts.h_max {
        let r = solve_stage(model, sub, h, opts)?;
        let stop = r.value <= 0.0;
        out.push(r);
        if stop {
            break;
        }
    }
    Ok(out)
}

/// Keeps the strategy with the largest value, preferring the smaller stage on
/// ties; zero-valued strategies are dropped.
pub fn prune_strategies(pi: Vec<Strategy>) -> Vec<Strategy> {
    let mut best: Option<Strategy> = None;
    for s in pi {
        if s.value <= 0.0 {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => s.value > b.value || (s.value == b.value && s.h < b.h),
        };
        if better {
            best = Some(s);
        }
    }
    best.into_iter().collect()
}

/// Per-root synthesis outcome, in frontier order.
#[derive(Clone, Debug, PartialEq)]
pub struct RootOutcome {
    pub root: Cell,
    pub stages: Vec<StageResult>,
    /// Index into `stages` of the pruned strategy, if any.
    pub chosen: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    /// `(h, value)` for the initial root, `h = 1..=h_max`.
    pub curve: Vec<(usize, f64)>,
    pub roots: Vec<RootOutcome>,
    pub supergame: SupergameMdp,
}

impl SynthesisResult {
    /// The pruned strategies, one per feasible root, in frontier order.
    pub fn strategies(&self) -> impl Iterator<Item = &Strategy> {
        self.roots.iter().filter_map(|r| r.chosen.map(|i| &r.stages[i].strategy))
    }

    pub fn strategy_for(&self, root: Cell) -> Option<&Strategy> {
        self.roots.iter().find(|r| r.root == root).and_then(|r| r.chosen.map(|i| &r.stages[i].strategy))
    }

    /// Value of the pruned strategy at the initial root, or 0 if infeasible.
    pub fn root_value(&self) -> f64 {
        self.roots.first().and_then(|r| r.chosen.map(|i| r.stages[i].value)).unwrap_or(0.0)
    }

    pub fn is_feasible(&self) -> bool {
        self.roots.first().is_some_and(|r| r.chosen.is_some())
    }
}

fn process_root(
    model: &GameModel,
    root: Cell,
    id: usize,
    opts: &SynthesisOptions,
    initial: bool,
) -> Result<RootOutcome, SynthesisError> {
    let sub = extract_subgame(model, root, id)?;
    let sub = Subgame { h_max: opts.h_max, ..sub };
    let stages = synthesize_subgame(model, &sub, opts, initial)?;
    // Stages up to the first zero form the candidate set.
    let feasible = stages.iter().take_while(|s| s.value > 0.0).count();
    let pruned = prune_strategies(stages[..feasible].iter().map(|s| s.strategy.clone()).collect());
    let chosen = pruned.first().map(|p| stages.iter().position(|s| s.h == p.h).expect("pruned from stages"));
    Ok(RootOutcome { root, stages, chosen })
}

/// Explores all reachable subgames from the model's start, synthesizing each and
/// inducing the supergame. Roots are processed in waves; each wave runs on a pool
/// of `opts.workers` threads and new roots are appended in wave order, then cell
/// order, so results do not depend on the worker count.
pub fn synthesize_all(model: &GameModel, opts: &SynthesisOptions) -> Result<SynthesisResult, SynthesisError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| SynthesisError::Pool(e.to_string()))?;
    let mut frontier = Frontier::new(model.start);
    let mut roots: Vec<RootOutcome> = Vec::new();
    while !frontier.is_done() {
        let offset = frontier.cursor();
        let wave = frontier.take_pending();
        let outcomes: Vec<RootOutcome> = pool.install(|| {
            wave.par_iter()
                .enumerate()
                .map(|(i, &cell)| process_root(model, cell, offset + i, opts, offset + i == 0))
                .collect::<Result<_, _>>()
        })?;
        for out in &outcomes {
            if let Some(i) = out.chosen {
                for &c in &out.stages[i].exits {
                    if model.reach.contains(c) && !model.targets.contains(c) {
                        frontier.push(c);
                    }
                }
            }
        }
        roots.extend(outcomes);
    }
    let curve = roots[0].stages.iter().map(|s| (s.h, s.value)).collect();
    let supergame = induce_supergame(model, &roots);
    Ok(SynthesisResult { curve, roots, supergame })
}

fn induce_supergame(model: &GameModel, roots: &[RootOutcome]) -> SupergameMdp {
    let mut edges: BTreeMap<SgNode, Vec<SupergameEdge>> = BTreeMap::new();
    let mut info = BTreeMap::new();
    for r in roots {
        let node = SgNode::Root(r.root);
        let mut out = Vec::new();
        match r.chosen {
            None => out.push(SupergameEdge { label: "infeasible".into(), dist: vec![(SgNode::Fail, 1.0)] }),
            Some(i) => {
                let st = &r.stages[i];
                info.insert(r.root, (st.h, st.value));
                let u = st.belief.expect("feasible strategies attempt a reveal");
                for res in &st.resolutions {
                    match *res {
                        Resolution::Hazard => {
                            out.push(SupergameEdge { label: "hazard".into(), dist: vec![(SgNode::Fail, 1.0)] })
                        }
                        Resolution::Truth(t) => {
                            let p = model.detection(t, u);
                            let dest = if model.targets.contains(t) {
                                SgNode::Target
                            } else if !model.reach.contains(t) {
                                SgNode::Fail
                            } else {
                                SgNode::Root(t)
                            };
                            let mut dist: Vec<(SgNode, f64)> = Vec::new();
                            for (n, q) in [(dest, p), (node, 1.0 - p)] {
                                if q <= 0.0 {
                                    continue;
                                }
                                match dist.iter_mut().find(|(m, _)| *m == n) {
                                    Some(e) => e.1 += q,
                                    None => dist.push((n, q)),
                                }
                            }
                            out.push(SupergameEdge { label: format!("t={t}"), dist });
                        }
                    }
                }
            }
        }
        edges.insert(node, out);
    }
    let initial = if model.targets.contains(model.start) { SgNode::Target } else { SgNode::Root(model.start) };
    SupergameMdp { initial, edges, strategies: info }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::Direction;
    use crate::model::CellSet;

    fn strat(h: usize, value: f64) -> Strategy {
        Strategy { subgame: 0, root: Cell::new(0, 0), h, k: 2 * h + 2, value, choices: BTreeMap::new() }
    }

    #[test]
    fn prune_rule() {
        let kept = prune_strategies(vec![strat(1, 0.3), strat(2, 0.7), strat(3, 0.7)]);
        assert_eq!(kept.iter().map(|s| s.h).collect::<Vec<_>>(), vec![2]);
        assert_eq!(prune_strategies(vec![strat(1, 0.3)]).len(), 1);
        assert!(prune_strategies(vec![strat(1, 0.0), strat(2, 0.0)]).is_empty());
    }

    /// A 1-wide corridor running east from the start whose third cell is a hazard.
    fn corridor() -> GameModel {
        let mut m = GameModel::new(7, 3, Cell::new(1, 1), 1.0);
        m.hazards = CellSet::boundary(7, 3);
        m.hazards.insert(Cell::new(4, 1));
        m.beta_spread = 0;
        m.actions = vec![Direction::E];
        m.h_max = 4;
        for x in 1..6 {
            m.reach.insert(Cell::new(x, 1));
        }
        m
    }

    #[test]
    fn corridor_truncates_at_the_hazard() {
        let m = corridor();
        let sub = extract_subgame(&m, m.start, 0).unwrap();
        let opts = SynthesisOptions::new(4);
        let stages = synthesize_subgame(&m, &sub, &opts, false).unwrap();
        let positive: Vec<usize> = stages.iter().filter(|s| s.value > 0.0).map(|s| s.h).collect();
        assert_eq!(positive, vec![1, 2]);
        assert_eq!(stages.len(), 3);
        assert_eq!(stages[0].value, 1.0);
    }

    #[test]
    fn certain_reveals_give_a_deterministic_path_to_target() {
        let mut m = corridor();
        m.hazards.remove(Cell::new(4, 1));
        m.targets.insert(Cell::new(5, 1));
        let r = synthesize_all(&m, &SynthesisOptions::new(2)).unwrap();
        assert_eq!(r.root_value(), 1.0);
        let sg = &r.supergame;
        let mut node = sg.initial;
        let mut hops = 0;
        while node != SgNode::Target {
            let e = &sg.edges[&node];
            assert_eq!(e.len(), 1);
            assert_eq!(e[0].dist.len(), 1);
            assert_eq!(e[0].dist[0].1, 1.0);
            node = e[0].dist[0].0;
            hops += 1;
            assert!(hops < 10);
        }
        // Every stage reveals with certainty, so the shortest stage wins each hop.
        assert_eq!(hops, 4);
    }

    #[test]
    fn impossible_reveals_leave_only_the_initial_node() {
        let mut m = corridor();
        m = m.with_constant_detection(0.0);
        m.targets.insert(Cell::new(3, 1));
        let r = synthesize_all(&m, &SynthesisOptions::new(3)).unwrap();
        assert!(!r.is_feasible());
        assert_eq!(r.supergame.edges.len(), 1);
        assert!(r.supergame.edges.values().flatten().all(|e| e.dist.iter().all(|(n, _)| *n != SgNode::Target)));
    }
}
