use crate::game_core::Cell;

use super::{DetectionTable, ModelError};

/// Default distance-decay length, in cells.
pub const DEFAULT_LAMBDA: f64 = 4.0;

/// Builds a detection table from per-cell feature scores.
///
/// The pairwise score is `(1 - |f(t) - f(u)|) * exp(-d(t,u) / lambda)`; each
/// truth row is then Gaussian-smoothed over the belief cell with standard
/// deviation `sigma` (truncated at three deviations, renormalized at the grid
/// edge) and clamped to `[0, 1]`. `sigma = 0` skips smoothing and
/// `lambda = f64::INFINITY` disables the distance decay.
pub fn detection_map(
    width: u8,
    height: u8,
    features: &[f64],
    sigma: f64,
    lambda: f64,
) -> Result<DetectionTable, ModelError> {
    let n = width as usize * height as usize;
    if features.len() != n {
        return Err(ModelError::FeatureShape { expected: n, got: features.len() });
    }
    if let Some(&bad) = features.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(ModelError::FeatureOutOfRange(bad));
    }
    if sigma < 0.0 || sigma.is_nan() {
        return Err(ModelError::NegativeSigma(sigma));
    }

    let mut raw = DetectionTable::constant(n, 0.0);
    for t in 0..n {
        let tc = Cell::from_index(t, width);
        for u in 0..n {
            let uc = Cell::from_index(u, width);
            let similarity = 1.0 - (features[t] - features[u]).abs();
            let decay = (-tc.distance(uc) / lambda).exp();
            raw.set(t, u, similarity * decay);
        }
    }
    let mut table = smooth_rows(&raw, width, height, sigma);
    for t in 0..n {
        for u in 0..n {
            let v = table.get(t, u).clamp(0.0, 1.0);
            table.set(t, u, v);
        }
    }
    Ok(table)
}

/// Gaussian-smooths every truth row of `table` over the belief grid.
pub fn smooth_rows(table: &DetectionTable, width: u8, height: u8, sigma: f64) -> DetectionTable {
    if sigma == 0.0 {
        return table.clone();
    }
    let n = table.cells();
    let radius = (3.0 * sigma).ceil() as i32;
    let mut kernel = Vec::new();
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            let d2 = (dx * dx + dy * dy) as f64;
            kernel.push((dx, dy, (-d2 / (2.0 * sigma * sigma)).exp()));
        }
    }

    let mut out = DetectionTable::constant(n, 0.0);
    for t in 0..n {
        let row = table.row(t);
        for u in 0..n {
            let uc = Cell::from_index(u, width);
            let (mut acc, mut norm) = (0.0, 0.0);
            for &(dx, dy, k) in &kernel {
                let x = uc.x as i32 + dx;
                let y = uc.y as i32 + dy;
                if x < 0 || y < 0 || x >= width as i32 || y >= height as i32 {
                    continue;
                }
                acc += k * row[Cell::new(x as u8, y as u8).index(width)];
                norm += k;
            }
            out.set(t, u, acc / norm);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_range(table: &DetectionTable, t: usize) -> f64 {
        let row = table.row(t);
        let max = row.iter().cloned().fold(f64::MIN, f64::max);
        let min = row.iter().cloned().fold(f64::MAX, f64::min);
        max - min
    }

    #[test]
    fn uniform_features_without_decay_give_a_constant_table() {
        let features = vec![0.4; 25];
        for sigma in [0.0, 0.5, 1.0, 2.5] {
            let t = detection_map(5, 5, &features, sigma, f64::INFINITY).unwrap();
            let first = t.get(0, 0);
            assert!(t.values().iter().all(|v| (v - first).abs() < 1e-12), "sigma {sigma}");
        }
    }

    #[test]
    fn uniform_features_with_decay_depend_only_on_distance() {
        let features = vec![0.4; 25];
        let t = detection_map(5, 5, &features, 0.0, DEFAULT_LAMBDA).unwrap();
        let a = t.get(Cell::new(0, 0).index(5), Cell::new(1, 2).index(5));
        let b = t.get(Cell::new(3, 3).index(5), Cell::new(4, 1).index(5));
        assert!((a - b).abs() < 1e-12);
        assert!((a - (-(5f64).sqrt() / DEFAULT_LAMBDA).exp()).abs() < 1e-12);
    }

    #[test]
    fn maximal_disparity_gives_zero_without_smoothing() {
        let mut features = vec![0.5; 9];
        features[0] = 1.0;
        features[8] = 0.0;
        let t = detection_map(3, 3, &features, 0.0, DEFAULT_LAMBDA).unwrap();
        assert_eq!(t.get(0, 8), 0.0);
        assert_eq!(t.get(8, 0), 0.0);
    }

    #[test]
    fn landmark_diagonal_dominates_its_row() {
        let mut features = vec![0.2; 36];
        let landmark = Cell::new(3, 2).index(6);
        features[landmark] = 0.9;
        for sigma in [0.0, 0.6] {
            let t = detection_map(6, 6, &features, sigma, DEFAULT_LAMBDA).unwrap();
            let row = t.row(landmark);
            let max = row.iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(row[landmark], max, "sigma {sigma}");
        }
    }

    #[test]
    fn smoothing_contracts_row_ranges() {
        let features: Vec<f64> = (0..49).map(|i| ((i * 37) % 11) as f64 / 10.0).collect();
        let raw = detection_map(7, 7, &features, 0.0, DEFAULT_LAMBDA).unwrap();
        for sigma in [0.5, 1.0, 2.0] {
            let smooth = detection_map(7, 7, &features, sigma, DEFAULT_LAMBDA).unwrap();
            assert!(smooth.values().iter().all(|v| (0.0..=1.0).contains(v)));
            for t in 0..49 {
                assert!(row_range(&smooth, t) <= row_range(&raw, t) + 1e-12);
            }
        }
    }

    #[test]
    fn negative_sigma_is_rejected() {
        assert_eq!(detection_map(2, 2, &[0.0; 4], -1.0, 4.0), Err(ModelError::NegativeSigma(-1.0)));
    }
}
