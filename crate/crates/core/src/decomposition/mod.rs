//! Subgames between reveals, and the frontier of subgame roots still to explore.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::game_core::{Cell, DagGame, DagState, Word};
use crate::model::GameModel;
use crate::synthesis::{GameGraph, GraphNode, NodeKind, Strategy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("subgame horizon must be at least 1")]
    ZeroHorizon,
    #[error("horizon {0} exceeds the supported word length")]
    HorizonTooLarge(usize),
    #[error("subgame root {0} lies on a hazard")]
    RootOnHazard(Cell),
    #[error("subgame root {0} lies outside the grid")]
    OutOfGrid(Cell),
}

/// Composes the DAG with the stopping criterion: any planner move attempted with
/// a word of length `h_max` leads to the trapped sink. Reveal attempts stay enabled.
pub fn stopping_compose<'m>(dag: DagGame<'m>, h_max: usize) -> Result<DagGame<'m>, DecompositionError> {
    if h_max == 0 {
        return Err(DecompositionError::ZeroHorizon);
    }
    if h_max > Word::CAPACITY {
        return Err(DecompositionError::HorizonTooLarge(h_max));
    }
    Ok(dag.with_h_max(h_max))
}

/// A subgame: the DAG restricted to plays from a proper root up to the next reveal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Subgame {
    pub id: usize,
    pub root: DagState,
    pub h_max: usize,
}

impl Subgame {
    pub fn root_cell(&self) -> Cell {
        self.root.truth
    }

    /// The stopping-composed DAG this subgame lives in.
    pub fn game<'m>(&self, model: &'m GameModel) -> DagGame<'m> {
        DagGame::new(model).with_h_max(self.h_max)
    }
}

pub fn extract_subgame(model: &GameModel, root: Cell, id: usize) -> Result<Subgame, DecompositionError> {
    if !model.in_grid(root) {
        return Err(DecompositionError::OutOfGrid(root));
    }
    if model.hazards.contains(root) {
        return Err(DecompositionError::RootOnHazard(root));
    }
    Ok(Subgame { id, root: DagState::proper(root), h_max: model.h_max })
}

/// Cells of the proper states reached with positive probability when `strategy`
/// is followed on `graph` from its root, over every adversary resolution.
pub fn reachable_roots(graph: &GameGraph, strategy: &Strategy) -> BTreeSet<Cell> {
    let mut out = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut stack = vec![(graph.root(), strategy.k)];
    while let Some((i, r)) = stack.pop() {
        if !seen.insert((i, r)) {
            continue;
        }
        if let GraphNode::Exit(c) = graph.nodes[i] {
            out.insert(c);
            continue;
        }
        if r == 0 {
            continue;
        }
        let edges = graph.edges(i);
        match graph.kind[i] {
            NodeKind::Leaf => {}
            NodeKind::Decision => {
                let GraphNode::State(s) = graph.nodes[i] else { continue };
                if let Some(a) = strategy.action(&s, r) {
                    if let Some(e) = edges.iter().find(|e| e.action == a) {
                        stack.push((e.target as usize, r - 1));
                    }
                }
            }
            NodeKind::Adversary | NodeKind::Chance => {
                stack.extend(edges.iter().filter(|e| e.prob > 0.0).map(|e| (e.target as usize, r - 1)));
            }
        }
    }
    out
}

/// The ordered list of subgame roots and the cursor into it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frontier {
    cells: Vec<Cell>,
    cursor: usize,
}

impl Frontier {
    pub fn new(start: Cell) -> Self {
        Frontier { cells: vec![start], cursor: 0 }
    }

    /// Appends `cell` unless already present; returns whether it was added.
    pub fn push(&mut self, cell: Cell) -> bool {
        if self.cells.contains(&cell) {
            return false;
        }
        self.cells.push(cell);
        true
    }

    /// Roots not yet processed, advancing the cursor past them.
    pub fn take_pending(&mut self) -> Vec<Cell> {
        let pending = self.cells[self.cursor..].to_vec();
        self.cursor = self.cells.len();
        pending
    }

    pub fn is_done(&self) -> bool {
        self.cursor >= self.cells.len()
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Subgame id of a root: its position in the frontier.
    pub fn id_of(&self, cell: Cell) -> Option<usize> {
        self.cells.iter().position(|&c| c == cell)
    }
}
