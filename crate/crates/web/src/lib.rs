//! Browser bindings: a detection heatmap, the per-stage value curve of the
//! initial subgame, and the cloud of true positions behind a planned word.
//!
//! Every binding takes the model as text in the `dagsynth-model v1` format.
//! The plain functions are usable natively; the `#[wasm_bindgen]` wrappers only
//! convert errors.

use wasm_bindgen::prelude::*;

use dagsynth::decomposition::extract_subgame;
use dagsynth::game_core::{Cell, DagGame, Direction, PlayerId};
use dagsynth::model::{parse_model, GameModel};
use dagsynth::synthesis::{synthesize_subgame, SynthesisOptions};

/// The bundled 8x8 case study.
pub const EXAMPLE_MODEL: &str = include_str!("../../core/fixtures/case_study.model");

fn load(text: &str) -> Result<GameModel, String> {
    parse_model(text).map_err(|e| format!("line {}, column {}: {}", e.line, e.column, e.message))
}

/// `[width, height, start_x, start_y]` followed by one code per cell in row-major
/// order from `y = 0`: bit 0 hazard, bit 1 reach, bit 2 target.
pub fn grid(text: &str) -> Result<Vec<u8>, String> {
    let m = load(text)?;
    let mut out = vec![m.width, m.height, m.start.x, m.start.y];
    out.extend(
        m.cells().map(|c| {
            m.hazards.contains(c) as u8 | (m.reach.contains(c) as u8) << 1 | (m.targets.contains(c) as u8) << 2
        }),
    );
    Ok(out)
}

/// Reveal probability `p(t, u)` for the given true cell over every belief cell.
pub fn detection_row(text: &str, x: u8, y: u8) -> Result<Vec<f64>, String> {
    let m = load(text)?;
    let t = Cell::new(x, y);
    if !m.in_grid(t) {
        return Err(format!("cell {t} is outside the grid"));
    }
    Ok(m.cells().map(|u| m.detection(t, u)).collect())
}

/// Value of the best single-attempt strategy with the reveal at stage `h`, for
/// `h = 1..=hmax`, from the model's start.
pub fn stage_curve(text: &str, hmax: usize) -> Result<Vec<f64>, String> {
    let m = load(text)?;
    let sub = extract_subgame(&m, m.start, 0).map_err(|e| e.to_string())?;
    let opts = SynthesisOptions::new(hmax);
    // Sequential solve: stages after the first zero stay at zero.
    let stages = synthesize_subgame(&m, &sub, &opts, false).map_err(|e| e.to_string())?;
    let mut curve: Vec<f64> = stages.iter().map(|s| s.value).collect();
    curve.resize(hmax, 0.0);
    Ok(curve)
}

/// Where the planner believes it is after playing `word` (space-separated compass
/// directions) from the start, and every true cell the adversary can produce:
/// `[belief_x, belief_y, t1_x, t1_y, ...]`, truths in cell order.
pub fn deviation_cloud(text: &str, word: &str) -> Result<Vec<u8>, String> {
    let m = load(text)?;
    let moves: Vec<Direction> = word
        .split_whitespace()
        .map(|w| Direction::parse(w).ok_or_else(|| format!("unknown direction `{w}`")))
        .collect::<Result<_, _>>()?;
    if moves.len() > dagsynth::game_core::Word::CAPACITY {
        return Err(format!("at most {} moves", dagsynth::game_core::Word::CAPACITY));
    }
    let game = DagGame::new(&m).with_h_max(moves.len().max(1));
    let mut s = game.initial();
    for &d in &moves {
        s = game.after_move(&s, d);
    }
    let mut truths = std::collections::BTreeSet::new();
    let mut frontier = vec![game.after_theta(&s)];
    while let Some(st) = frontier.pop() {
        match st.turn {
            PlayerId::P1 => frontier.extend(game.deviations(&st).map(|b| game.after_deviation(&st, b))),
            _ => {
                truths.insert(st.truth);
            }
        }
    }
    let mut out = vec![s.belief.x, s.belief.y];
    for t in truths {
        out.extend([t.x, t.y]);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = exampleModel)]
pub fn example_model() -> String {
    EXAMPLE_MODEL.to_string()
}

#[wasm_bindgen(js_name = grid)]
pub fn grid_js(text: &str) -> Result<Vec<u8>, JsError> {
    grid(text).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = detectionRow)]
pub fn detection_row_js(text: &str, x: u8, y: u8) -> Result<Vec<f64>, JsError> {
    detection_row(text, x, y).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = stageCurve)]
pub fn stage_curve_js(text: &str, hmax: usize) -> Result<Vec<f64>, JsError> {
    stage_curve(text, hmax).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = deviationCloud)]
pub fn deviation_cloud_js(text: &str, word: &str) -> Result<Vec<u8>, JsError> {
    deviation_cloud(text, word).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_codes() {
        let g = grid(EXAMPLE_MODEL).unwrap();
        assert_eq!(&g[..4], &[8, 8, 1, 1]);
        assert_eq!(g.len(), 4 + 64);
        assert_eq!(g[4] & 1, 1);
        assert_eq!(g[4 + 6 * 8 + 6], 0b110);
    }

    #[test]
    fn detection_row_is_a_probability_vector_per_cell() {
        let row = detection_row(EXAMPLE_MODEL, 3, 3).unwrap();
        assert_eq!(row.len(), 64);
        assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
        assert!(detection_row(EXAMPLE_MODEL, 9, 0).is_err());
    }

    #[test]
    fn curve_matches_the_driver() {
        let curve = stage_curve(EXAMPLE_MODEL, 3).unwrap();
        assert_eq!(curve.len(), 3);
        assert!(curve[1] > curve[0] && curve[1] > curve[2]);
    }

    #[test]
    fn cloud_grows_after_the_attack_free_prefix() {
        let m = EXAMPLE_MODEL;
        let one = deviation_cloud(m, "NE").unwrap();
        assert_eq!(one, vec![2, 2, 2, 2]);
        let three = deviation_cloud(m, "NE NE E").unwrap();
        assert_eq!(&three[..2], &[4, 3]);
        assert_eq!(three.len(), 2 + 2 * 3);
        assert!(deviation_cloud(m, "UP").is_err());
    }
}
