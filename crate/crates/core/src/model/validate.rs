use std::collections::VecDeque;
use std::fmt;

use crate::game_core::{step, Cell};

use super::{CellSet, GameModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Model field or cell the diagnostic refers to, e.g. `labels.targets 2,6`.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.location, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    fn push(&mut self, severity: Severity, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic { severity, location: location.into(), message: message.into() });
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.severity == Severity::Warning)
    }

    /// True iff there are no error-severity entries.
    pub fn passed(&self) -> bool {
        self.errors().next().is_none()
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Cells reachable from the start through non-hazard cells using undisturbed planner moves.
fn hazard_free_reachable(m: &GameModel) -> CellSet {
    let mut seen = CellSet::new(m.width, m.height);
    if m.hazards.contains(m.start) {
        return seen;
    }
    let mut queue = VecDeque::from([m.start]);
    seen.insert(m.start);
    while let Some(c) = queue.pop_front() {
        for &d in &m.actions {
            let n = step(c, d, m.width, m.height);
            if !m.hazards.contains(n) && !seen.contains(n) {
                seen.insert(n);
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Checks every model invariant. Errors make the model unusable; warnings flag
/// settings outside the usual case-study regime.
pub fn validate_model(m: &GameModel) -> Diagnostics {
    let mut out = Diagnostics::default();
    let n = m.cell_count();

    if m.width == 0 || m.height == 0 {
        out.push(Severity::Error, "grid.dimensions", "grid must have positive width and height");
        return out;
    }
    if !m.in_grid(m.start) {
        out.push(Severity::Error, "grid.start", "start lies outside the grid");
    } else if m.hazards.contains(m.start) {
        out.push(Severity::Error, format!("grid.start {}", m.start), "start lies on a hazard");
    }
    for c in CellSet::boundary(m.width, m.height).iter() {
        if !m.hazards.contains(c) {
            out.push(Severity::Error, format!("labels.hazards {c}"), "boundary cell is not a hazard");
        }
    }
    for c in m.targets.iter() {
        if m.hazards.contains(c) {
            out.push(Severity::Error, format!("labels.targets {c}"), "target lies on a hazard");
        }
        if !m.reach.contains(c) {
            out.push(Severity::Error, format!("labels.targets {c}"), "target is not in the reach set");
        }
    }
    if m.h_max == 0 {
        out.push(Severity::Error, "game.hmax", "hmax must be positive");
    }
    if m.actions.is_empty() {
        out.push(Severity::Error, "game.actions", "action set is empty");
    }
    if m.p.cells() != n {
        out.push(Severity::Error, "detection", format!("detection table covers {} cells, grid has {n}", m.p.cells()));
    } else if let Some((i, v)) = m.p.values().iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        let (t, u) = (Cell::from_index(i / n, m.width), Cell::from_index(i % n, m.width));
        out.push(Severity::Error, format!("detection {t} {u}"), format!("probability out of range: {v}"));
    }
    if m.beta_spread > 1 {
        out.push(
            Severity::Warning,
            "game.spread",
            format!("spread {} exceeds the single-increment deviation model", m.beta_spread),
        );
    }
    if out.passed() {
        let reachable = hazard_free_reachable(m);
        for c in m.targets.iter() {
            if !reachable.contains(c) {
                out.push(
                    Severity::Warning,
                    format!("labels.targets {c}"),
                    "target is unreachable along hazard-free paths",
                );
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game_core::Direction;

    fn valid() -> GameModel {
        let mut m = GameModel::new(8, 8, Cell::new(5, 1), 0.5);
        m.reach.insert(Cell::new(2, 6));
        m.targets.insert(Cell::new(2, 6));
        m
    }

    #[test]
    fn valid_model_has_no_diagnostics() {
        assert!(validate_model(&valid()).is_empty());
    }

    #[test]
    fn target_on_hazard_is_an_error() {
        let mut m = valid();
        m.hazards.insert(Cell::new(2, 6));
        let d = validate_model(&m);
        assert!(!d.passed());
        assert!(d.errors().any(|e| e.message.contains("target lies on a hazard")));
    }

    #[test]
    fn start_on_boundary_is_an_error() {
        let mut m = valid();
        m.start = Cell::new(0, 3);
        assert!(validate_model(&m).errors().any(|e| e.location.starts_with("grid.start")));
    }

    #[test]
    fn missing_boundary_hazard_and_zero_hmax() {
        let mut m = valid();
        m.hazards.remove(Cell::new(7, 7));
        m.h_max = 0;
        let d = validate_model(&m);
        assert_eq!(d.errors().count(), 2);
    }

    #[test]
    fn walled_off_target_warns() {
        let mut m = valid();
        for x in 1..7 {
            m.hazards.insert(Cell::new(x, 4));
        }
        let d = validate_model(&m);
        assert!(d.passed());
        assert_eq!(d.warnings().count(), 1);
    }

    #[test]
    fn restricted_actions_affect_reachability() {
        let mut m = valid();
        m.actions = vec![Direction::E];
        assert_eq!(validate_model(&m).warnings().count(), 1);
    }
}
