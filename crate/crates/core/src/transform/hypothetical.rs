use std::str::FromStr;

use crate::game_core::{DagGame, DagNode, DagState, ExecutionFragment, GameAction, PlayerId, StepLabel};

use super::TransformError;

/// What a safety label depends on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SafetyKind {
    BeliefOnly,
    TruthOnly,
    Both,
}

impl FromStr for SafetyKind {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "belief" | "belief-only" => Ok(SafetyKind::BeliefOnly),
            "truth" | "truth-only" => Ok(SafetyKind::TruthOnly),
            "both" => Ok(SafetyKind::Both),
            other => Err(TransformError::UnknownSafetyKind(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypBranchSet {
    pub stage: usize,
    pub branches: Vec<ExecutionFragment<DagState>>,
}

fn planner_moves(rho: &ExecutionFragment<DagState>) -> impl Iterator<Item = usize> + '_ {
    rho.labels()
        .iter()
        .enumerate()
        .filter(|&(i, l)| rho.states()[i].turn == PlayerId::P2 && matches!(l, StepLabel::Action(GameAction::Move(_))))
        .map(|(i, _)| i)
}

/// Completions of `prefix` that attempt a reveal right after its `h`-th planner
/// move and then play every admissible sequence of delayed adversary actions up
/// to the chance state.
pub fn hypothetical_branches(
    game: &DagGame,
    prefix: &ExecutionFragment<DagState>,
    h: usize,
) -> Result<HypBranchSet, TransformError> {
    let cut = if h == 0 {
        0
    } else {
        let moves: Vec<usize> = planner_moves(prefix).collect();
        let &i = moves.get(h - 1).ok_or(TransformError::NotEnoughMoves { h, available: moves.len() })?;
        i + 1
    };
    let mut base = ExecutionFragment::new(prefix.states()[0]);
    for i in 0..cut {
        base.push(prefix.labels()[i], prefix.states()[i + 1]);
    }
    let theta = game.after_theta(base.last());
    base.push(StepLabel::Action(GameAction::Theta), theta);

    let mut branches = Vec::new();
    let mut stack = vec![base];
    while let Some(rho) = stack.pop() {
        let s = *rho.last();
        if s.turn != PlayerId::P1 {
            branches.push(rho);
            continue;
        }
        for (a, d) in game.successors(&DagNode::State(s)).into_iter().rev() {
            if let [(DagNode::State(t), _)] = d.support() {
                let mut ext = rho.clone();
                ext.push(StepLabel::Action(a), *t);
                stack.push(ext);
            }
        }
    }
    Ok(HypBranchSet { stage: h, branches })
}

/// Decides whether the HIG executions similar to `execution` stay safe, using the
/// DAG-side condition matching what the safety label depends on. Hazard cells
/// are the unsafe ones.
pub fn evaluate_safety(
    game: &DagGame,
    execution: &ExecutionFragment<DagState>,
    kind: SafetyKind,
) -> Result<bool, TransformError> {
    let hazards = &game.model().hazards;
    let n = planner_moves(execution).count();
    let root = execution.first();
    Ok(match kind {
        SafetyKind::BeliefOnly => {
            execution.states().iter().filter(|s| s.turn == PlayerId::P2).all(|s| !hazards.contains(s.belief))
        }
        SafetyKind::TruthOnly => {
            if hazards.contains(root.truth) {
                return Ok(false);
            }
            if n == 0 {
                return Ok(true);
            }
            let hyp = hypothetical_branches(game, execution, n)?;
            hyp.branches.iter().all(|b| {
                b.states()
                    .iter()
                    .filter(|s| matches!(s.turn, PlayerId::P1 | PlayerId::PStoch))
                    .all(|s| !hazards.contains(s.truth))
            })
        }
        SafetyKind::Both => {
            if hazards.contains(root.truth) || hazards.contains(root.belief) {
                return Ok(false);
            }
            for h in 1..=n {
                let hyp = hypothetical_branches(game, execution, h)?;
                let safe = hyp.branches.iter().all(|b| {
                    let last = b.last();
                    !hazards.contains(last.truth) && !hazards.contains(last.belief)
                });
                if !safe {
                    return Ok(false);
                }
            }
            true
        }
    })
}
