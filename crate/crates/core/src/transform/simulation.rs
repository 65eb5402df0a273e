use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::game_core::{
    delay_move, hig_initial, hig_successors, is_equivalent, is_similar, DagGame, GameAction, HigState, Move, MoveStep,
    PlayerId, RuleMutation, Word,
};
use crate::model::GameModel;

use super::{apply_delayed, TransformError};

pub const DEFAULT_FRAGMENT_BUDGET: u128 = 1_000_000;
pub const SIMULATION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug)]
pub struct SimulationOptions {
    pub horizon: usize,
    pub budget: u128,
    /// Fault injected into the DAG side, for checking that the check detects it.
    pub mutation: Option<RuleMutation>,
}

impl SimulationOptions {
    pub fn new(horizon: usize) -> Self {
        SimulationOptions { horizon, budget: DEFAULT_FRAGMENT_BUDGET, mutation: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    /// The HIG move, followed by the reveal outcomes along it.
    pub fragment: String,
    pub expected: f64,
    pub dag: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub checked_fragments: usize,
    pub max_horizon: usize,
    /// Total probability of proper terminals, summed over all enumerated moves.
    pub hig_proper_mass: f64,
    pub dag_proper_mass: f64,
    /// Same for fragments cut off by the horizon before a successful reveal.
    pub hig_residual_mass: f64,
    pub dag_residual_mass: f64,
    pub mismatches: Vec<Mismatch>,
    pub passed: bool,
}

impl SimulationReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "checked_fragments {}", self.checked_fragments);
        let _ = writeln!(out, "max_horizon {}", self.max_horizon);
        let _ = writeln!(out, "hig_proper_mass {}", self.hig_proper_mass);
        let _ = writeln!(out, "dag_proper_mass {}", self.dag_proper_mass);
        let _ = writeln!(out, "hig_residual_mass {}", self.hig_residual_mass);
        let _ = writeln!(out, "dag_residual_mass {}", self.dag_residual_mass);
        let _ = writeln!(out, "mismatches {}", self.mismatches.len());
        let _ = writeln!(out, "passed {}", self.passed);
        for m in &self.mismatches {
            let _ = writeln!(out, "mismatch {} expected={} dag={}", m.fragment, m.expected, m.dag);
        }
        out
    }
}

impl fmt::Display for SimulationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Upper bound on the number of HIG paths with at most `horizon` planner actions.
pub fn estimate_fragments(model: &GameModel, horizon: usize) -> u128 {
    let beta = (2 * model.beta_spread as u128 + 1).min(8);
    let branching = model.actions.len() as u128 * beta + 2;
    (0..=horizon as u32).fold(0u128, |acc, d| acc.saturating_add(branching.saturating_pow(d)))
}

struct Path {
    mv: Vec<MoveStep>,
    outcomes: Vec<bool>,
    probability: f64,
    terminal: HigState,
    settled: bool,
}

struct Enumerator<'a> {
    model: &'a GameModel,
    out: Vec<Path>,
}

impl Enumerator<'_> {
    fn record(&mut self, mv: &[MoveStep], outcomes: &[bool], probability: f64, terminal: HigState, settled: bool) {
        self.out.push(Path { mv: mv.to_vec(), outcomes: outcomes.to_vec(), probability, terminal, settled });
    }

    /// Explores from a P2 state with `remaining` planner actions left.
    fn explore(
        &mut self,
        s: &HigState,
        prob: f64,
        mv: &mut Vec<MoveStep>,
        outcomes: &mut Vec<bool>,
        remaining: usize,
        only: Option<GameAction>,
    ) {
        if remaining == 0 {
            self.record(mv, outcomes, prob, s.clone(), false);
            return;
        }
        for (a, d) in hig_successors(self.model, s) {
            if only.is_some_and(|o| o != a) {
                continue;
            }
            let next = &d.support()[0].0;
            mv.push(MoveStep::p2(a));
            match a {
                GameAction::Theta => self.reveal(next, prob, mv, outcomes, remaining - 1),
                _ => {
                    for (b, d1) in hig_successors(self.model, next) {
                        mv.push(MoveStep::p1(b));
                        self.explore(&d1.support()[0].0, prob, mv, outcomes, remaining - 1, None);
                        mv.pop();
                    }
                }
            }
            mv.pop();
        }
    }

    fn reveal(&mut self, s: &HigState, prob: f64, mv: &mut Vec<MoveStep>, outcomes: &mut Vec<bool>, remaining: usize) {
        let p = self.model.detection(s.truth, s.belief);
        mv.push(MoveStep::tau());
        if p > 0.0 {
            outcomes.push(true);
            self.record(mv, outcomes, prob * p, HigState::proper(s.truth), true);
            outcomes.pop();
        }
        if p < 1.0 {
            outcomes.push(false);
            let failed = HigState { turn: PlayerId::P2, ..s.clone() };
            self.explore(&failed, prob * (1.0 - p), mv, outcomes, remaining, None);
            outcomes.pop();
        }
        mv.pop();
    }
}

fn describe(mv: &Move, outcomes: &[bool]) -> String {
    let mut s = mv.to_string();
    s.push_str(" |");
    for &o in outcomes {
        s.push_str(if o { " ok" } else { " fail" });
    }
    s
}

/// Enumerates every HIG path from the initial state with at most `horizon`
/// planner actions (moves and reveal attempts) and compares its probability with
/// the DAG probability of reaching the corresponding state under the delayed move.
///
/// Paths ending in a successful reveal must reach an equivalent DAG state with
/// equal probability. Paths cut off by the horizon are closed with a reveal
/// attempt on both sides and must reach similar chance states with equal
/// probability. The DAG's stopping criterion is raised to the horizon for the check.
pub fn check_probabilistic_simulation(
    model: &GameModel,
    opts: &SimulationOptions,
) -> Result<SimulationReport, TransformError> {
    if opts.horizon > Word::CAPACITY {
        return Err(TransformError::HorizonTooLarge(opts.horizon));
    }
    let estimated = estimate_fragments(model, opts.horizon);
    if estimated > opts.budget {
        return Err(TransformError::BudgetExceeded { estimated, budget: opts.budget });
    }
    let game =
        DagGame::new(model).with_h_max(model.h_max.max(opts.horizon).min(Word::CAPACITY)).with_mutation(opts.mutation);
    let root = hig_initial(model);

    let mut firsts: Vec<Option<GameAction>> = model.actions.iter().map(|&d| Some(GameAction::Move(d))).collect();
    firsts.push(Some(GameAction::Theta));
    if opts.horizon == 0 {
        firsts = vec![None];
    }

    let partitions: Vec<Vec<Comparison>> = firsts
        .par_iter()
        .map(|&first| {
            let mut e = Enumerator { model, out: Vec::new() };
            e.explore(&root, 1.0, &mut Vec::new(), &mut Vec::new(), opts.horizon, first);
            e.out.into_iter().map(|path| compare(&game, path)).collect()
        })
        .collect();

    let mut report = SimulationReport {
        checked_fragments: 0,
        max_horizon: opts.horizon,
        hig_proper_mass: 0.0,
        dag_proper_mass: 0.0,
        hig_residual_mass: 0.0,
        dag_residual_mass: 0.0,
        mismatches: Vec::new(),
        passed: false,
    };
    for (hig, dag, settled, mismatch) in partitions.into_iter().flatten() {
        report.checked_fragments += 1;
        if settled {
            report.hig_proper_mass += hig;
            report.dag_proper_mass += dag;
        } else {
            report.hig_residual_mass += hig;
            report.dag_residual_mass += dag;
        }
        report.mismatches.extend(mismatch);
    }
    report.mismatches.sort_by(|a, b| a.fragment.cmp(&b.fragment));
    report.passed = report.mismatches.is_empty();
    Ok(report)
}

/// HIG mass, DAG mass, whether the path settled, and the mismatch if any.
type Comparison = (f64, f64, bool, Option<Mismatch>);

fn compare(game: &DagGame, path: Path) -> Comparison {
    let mut steps = path.mv;
    let mut terminal = path.terminal;
    if !path.settled {
        steps.push(MoveStep::p2(GameAction::Theta));
        terminal.turn = PlayerId::PStoch;
    }
    let mv = Move(steps);
    let dag = delay_move(&mv)
        .ok()
        .and_then(|delayed| apply_delayed(game, game.initial(), &delayed, &mut path.outcomes.iter().copied()))
        .filter(|r| {
            if path.settled {
                is_equivalent(&terminal, &r.state)
            } else {
                r.state.turn == PlayerId::PStoch && is_similar(&terminal, &r.state)
            }
        })
        .map_or(0.0, |r| r.probability);
    let mismatch = ((path.probability - dag).abs() > SIMULATION_TOLERANCE).then(|| Mismatch {
        fragment: describe(&mv, &path.outcomes),
        expected: path.probability,
        dag,
    });
    (path.probability, dag, path.settled, mismatch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::Cell;

    fn model(w: u8, spread: u8) -> GameModel {
        let mut m = GameModel::new(w, w, Cell::new(1, 1), 0.5);
        m.beta_spread = spread;
        m.h_adv = 0;
        let n = m.cell_count();
        for t in 0..n {
            for u in 0..n {
                m.p.set(t, u, if t == u { 0.9 } else { 0.2 + 0.05 * ((t + 2 * u) % 7) as f64 });
            }
        }
        m
    }

    #[test]
    fn zero_spread_three_by_three_passes() {
        let r = check_probabilistic_simulation(&model(3, 0), &SimulationOptions::new(3)).unwrap();
        assert!(r.passed, "{r}");
        assert!(r.checked_fragments > 100);
        assert!((r.hig_proper_mass - r.dag_proper_mass).abs() < 1e-9);
    }

    #[test]
    fn four_by_four_horizon_two_passes() {
        let r = check_probabilistic_simulation(&model(4, 1), &SimulationOptions::new(2)).unwrap();
        assert!(r.passed, "{r}");
        assert!((r.hig_residual_mass - r.dag_residual_mass).abs() < 1e-9);
    }

    #[test]
    fn every_mutation_is_caught() {
        let m = model(4, 1);
        for mutation in RuleMutation::ALL {
            let opts = SimulationOptions { mutation: Some(mutation), ..SimulationOptions::new(3) };
            let r = check_probabilistic_simulation(&m, &opts).unwrap();
            assert!(!r.passed, "{mutation} not detected");
            assert!(r.to_text().contains("mismatch "));
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = check_probabilistic_simulation(&model(4, 1), &SimulationOptions::new(6)).unwrap_err();
        assert!(matches!(err, TransformError::BudgetExceeded { .. }));
    }

    #[test]
    fn horizon_zero_is_a_single_fragment() {
        let r = check_probabilistic_simulation(&model(3, 1), &SimulationOptions::new(0)).unwrap();
        assert_eq!(r.checked_fragments, 1);
        assert!(r.passed);
    }
}
