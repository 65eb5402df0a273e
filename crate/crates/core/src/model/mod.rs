//! Declarative game description: grid, labels, adversary deviation relation,
//! detection probabilities and horizons.

mod detection;
mod parse;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::game_core::{Cell, Direction, GameAction};

pub use detection::{detection_map, smooth_rows, DEFAULT_LAMBDA};
pub use parse::{parse_adversary_policy, parse_model, print_model, ParseError, MODEL_HEADER};
pub use validate::{validate_model, Diagnostic, Diagnostics, Severity};

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("beta is only defined on move actions, got {0}")]
    NotAMove(GameAction),
    #[error("smoothing radius must be nonnegative, got {0}")]
    NegativeSigma(f64),
    #[error("feature map has {got} entries, expected {expected}")]
    FeatureShape { expected: usize, got: usize },
    #[error("feature score {0} out of range [0,1]")]
    FeatureOutOfRange(f64),
}

/// A set of grid cells backed by a dense bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSet {
    width: u8,
    height: u8,
    bits: Vec<bool>,
}

impl CellSet {
    pub fn new(width: u8, height: u8) -> Self {
        CellSet { width, height, bits: vec![false; width as usize * height as usize] }
    }

    pub fn boundary(width: u8, height: u8) -> Self {
        let mut s = CellSet::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if x == 0 || y == 0 || x + 1 == width || y + 1 == height {
                    s.insert(Cell::new(x, y));
                }
            }
        }
        s
    }

    pub fn contains(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height && self.bits[c.index(self.width)]
    }

    pub fn insert(&mut self, c: Cell) {
        let i = c.index(self.width);
        self.bits[i] = true;
    }

    pub fn remove(&mut self, c: Cell) {
        let i = c.index(self.width);
        self.bits[i] = false;
    }

    /// Cells in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        let w = self.width;
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| Cell::from_index(i, w))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.iter().all(|c| other.contains(c))
    }
}

/// A set of compass moves as an 8-bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct DirSet(u8);

impl DirSet {
    pub fn single(d: Direction) -> Self {
        DirSet(1 << d.ordinal())
    }

    pub fn insert(&mut self, d: Direction) {
        self.0 |= 1 << d.ordinal();
    }

    pub fn contains(self, d: Direction) -> bool {
        self.0 & (1 << d.ordinal()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Members in compass order.
    pub fn iter(self) -> impl Iterator<Item = Direction> {
        Direction::ALL.into_iter().filter(move |d| self.contains(*d))
    }
}

/// Detection probability table `p(truth, belief)`, indexed by cell indices.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectionTable {
    cells: usize,
    values: Vec<f64>,
}

impl DetectionTable {
    pub fn constant(cells: usize, value: f64) -> Self {
        DetectionTable { cells, values: vec![value; cells * cells] }
    }

    /// Builds a table from a row-major matrix (row = truth cell, column = belief cell).
    pub fn from_matrix(cells: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), cells * cells, "detection matrix must be square");
        DetectionTable { cells, values }
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn get(&self, truth: usize, belief: usize) -> f64 {
        self.values[truth * self.cells + belief]
    }

    pub fn set(&mut self, truth: usize, belief: usize, value: f64) {
        self.values[truth * self.cells + belief] = value;
    }

    pub fn row(&self, truth: usize) -> &[f64] {
        &self.values[truth * self.cells..(truth + 1) * self.cells]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Where the detection table came from; kept so the model prints back canonically.
#[derive(Clone, Debug, PartialEq)]
pub enum DetectionSource {
    Constant(f64),
    Matrix,
    Features { features: Vec<f64>, sigma: f64, lambda: f64 },
}

/// A fixed adversary: maps (word position, planner move) to the single deviation played.
/// A `None` position applies at every position without a more specific entry.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdversaryPolicy {
    pub rules: BTreeMap<(Option<usize>, Direction), Direction>,
}

impl AdversaryPolicy {
    pub fn lookup(&self, position: usize, a: Direction) -> Option<Direction> {
        self.rules.get(&(Some(position), a)).or_else(|| self.rules.get(&(None, a))).copied()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameModel {
    pub width: u8,
    pub height: u8,
    pub start: Cell,
    pub hazards: CellSet,
    pub reach: CellSet,
    pub targets: CellSet,
    pub detection: DetectionSource,
    pub p: DetectionTable,
    /// Largest rotation, in 45-degree steps, the adversary may apply to a move.
    pub beta_spread: u8,
    /// Number of planner moves at the start of each subgame during which the adversary cannot deviate.
    pub h_adv: usize,
    pub h_max: usize,
    /// Planner move set, in compass order.
    pub actions: Vec<Direction>,
    pub adversary: Option<AdversaryPolicy>,
}

impl GameModel {
    /// A model with boundary hazards, an empty reach/target set and a constant detection table.
    pub fn new(width: u8, height: u8, start: Cell, p: f64) -> Self {
        let cells = width as usize * height as usize;
        GameModel {
            width,
            height,
            start,
            hazards: CellSet::boundary(width, height),
            reach: CellSet::new(width, height),
            targets: CellSet::new(width, height),
            detection: DetectionSource::Constant(p),
            p: DetectionTable::constant(cells, p),
            beta_spread: 1,
            h_adv: 1,
            h_max: 4,
            actions: Direction::ALL.to_vec(),
            adversary: None,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn in_grid(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.cell_count()).map(|i| Cell::from_index(i, self.width))
    }

    pub fn detection(&self, truth: Cell, belief: Cell) -> f64 {
        self.p.get(truth.index(self.width), belief.index(self.width))
    }

    /// Adversary deviations available against planner action `a`.
    pub fn beta(&self, a: GameAction) -> Result<DirSet, ModelError> {
        match a {
            GameAction::Move(d) => Ok(self.beta_dir(d)),
            other => Err(ModelError::NotAMove(other)),
        }
    }

    pub fn beta_dir(&self, a: Direction) -> DirSet {
        let spread = self.beta_spread.min(4) as i32;
        let mut set = DirSet::default();
        for k in -spread..=spread {
            set.insert(a.rotate(k));
        }
        set
    }

    /// Deviations available against the move at `position` of the current word,
    /// after the attack-free prefix and any fixed adversary policy are applied.
    pub fn beta_at(&self, position: usize, a: Direction) -> DirSet {
        if position < self.h_adv {
            return DirSet::single(a);
        }
        let set = self.beta_dir(a);
        match self.adversary.as_ref().and_then(|pol| pol.lookup(position, a)) {
            Some(b) if set.contains(b) => DirSet::single(b),
            _ => set,
        }
    }

    /// Replaces the detection table with a constant one.
    pub fn with_constant_detection(mut self, p: f64) -> Self {
        self.detection = DetectionSource::Constant(p);
        self.p = DetectionTable::constant(self.cell_count(), p);
        self
    }
}

impl fmt::Display for GameModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_model(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> GameModel {
        GameModel::new(8, 8, Cell::new(5, 1), 0.5)
    }

    fn dirs(set: DirSet) -> Vec<Direction> {
        set.iter().collect()
    }

    #[test]
    fn beta_of_north_with_unit_spread() {
        let m = model();
        assert_eq!(
            dirs(m.beta(GameAction::Move(Direction::N)).unwrap()),
            vec![Direction::N, Direction::NE, Direction::NW]
        );
    }

    #[test]
    fn beta_with_zero_spread_is_identity() {
        let mut m = model();
        m.beta_spread = 0;
        assert_eq!(dirs(m.beta(GameAction::Move(Direction::N)).unwrap()), vec![Direction::N]);
    }

    #[test]
    fn beta_of_southeast() {
        let m = model();
        assert_eq!(
            dirs(m.beta(GameAction::Move(Direction::SE)).unwrap()),
            vec![Direction::E, Direction::SE, Direction::S]
        );
    }

    #[test]
    fn beta_rejects_non_moves() {
        let m = model();
        assert_eq!(m.beta(GameAction::Theta), Err(ModelError::NotAMove(GameAction::Theta)));
        assert!(m.beta(GameAction::Tau).is_err());
    }

    #[test]
    fn beta_always_contains_the_undisturbed_action() {
        let mut m = model();
        for spread in 0..=4 {
            m.beta_spread = spread;
            for d in Direction::ALL {
                assert!(m.beta_dir(d).contains(d));
                assert_eq!(m.beta_dir(d).len(), (2 * spread as usize + 1).min(8));
            }
        }
    }

    #[test]
    fn attack_free_prefix_restricts_beta() {
        let mut m = model();
        m.h_adv = 2;
        assert_eq!(m.beta_at(0, Direction::E).len(), 1);
        assert_eq!(m.beta_at(1, Direction::E).len(), 1);
        assert_eq!(m.beta_at(2, Direction::E).len(), 3);
    }

    #[test]
    fn fixed_adversary_policy_narrows_beta() {
        let mut m = model();
        m.h_adv = 0;
        let mut pol = AdversaryPolicy::default();
        pol.rules.insert((None, Direction::N), Direction::NE);
        pol.rules.insert((Some(1), Direction::N), Direction::NW);
        m.adversary = Some(pol);
        assert_eq!(dirs(m.beta_at(0, Direction::N)), vec![Direction::NE]);
        assert_eq!(dirs(m.beta_at(1, Direction::N)), vec![Direction::NW]);
        assert_eq!(m.beta_at(0, Direction::E).len(), 3);
    }
}
