use std::fmt;

/// A grid cell. `x` is the column, `y` the row; `y` grows northward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Valuation {
    pub x: u8,
    pub y: u8,
}

pub type Cell = Valuation;

impl Valuation {
    pub const fn new(x: u8, y: u8) -> Self {
        Valuation { x, y }
    }

    /// Row-major index of the cell on a grid of the given width.
    pub fn index(self, width: u8) -> usize {
        self.y as usize * width as usize + self.x as usize
    }

    pub fn from_index(index: usize, width: u8) -> Self {
        let w = width as usize;
        Valuation::new((index % w) as u8, (index / w) as u8)
    }

    pub fn distance(self, other: Valuation) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        (dx * dx + dy * dy).sqrt()
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// The eight compass moves, in the fixed tie-break order used throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

impl Direction {
    pub const ALL: [Direction; 8] = [
        Direction::N,
        Direction::NE,
        Direction::E,
        Direction::SE,
        Direction::S,
        Direction::SW,
        Direction::W,
        Direction::NW,
    ];

    pub fn ordinal(self) -> u8 {
        self as u8
    }

    pub fn from_ordinal(i: u8) -> Direction {
        Direction::ALL[(i & 7) as usize]
    }

    pub fn delta(self) -> (i8, i8) {
        match self {
            Direction::N => (0, 1),
            Direction::NE => (1, 1),
            Direction::E => (1, 0),
            Direction::SE => (1, -1),
            Direction::S => (0, -1),
            Direction::SW => (-1, -1),
            Direction::W => (-1, 0),
            Direction::NW => (-1, 1),
        }
    }

    /// Rotates clockwise by `steps` multiples of 45 degrees (negative is counter-clockwise).
    pub fn rotate(self, steps: i32) -> Direction {
        Direction::from_ordinal((self.ordinal() as i32 + steps).rem_euclid(8) as u8)
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::N => "N",
            Direction::NE => "NE",
            Direction::E => "E",
            Direction::SE => "SE",
            Direction::S => "S",
            Direction::SW => "SW",
            Direction::W => "W",
            Direction::NW => "NW",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        Direction::ALL.into_iter().find(|d| d.name() == s)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Applies one unit displacement. A step that would leave the grid leaves the cell unchanged.
pub fn step(cell: Valuation, dir: Direction, width: u8, height: u8) -> Valuation {
    let (dx, dy) = dir.delta();
    let x = cell.x as i32 + dx as i32;
    let y = cell.y as i32 + dy as i32;
    if x < 0 || y < 0 || x >= width as i32 || y >= height as i32 {
        cell
    } else {
        Valuation::new(x as u8, y as u8)
    }
}

/// Effect of a sequence of compass moves, applied left to right.
pub fn effect_dirs(word: &[Direction], cell: Valuation, width: u8, height: u8) -> Valuation {
    word.iter().fold(cell, |c, &d| step(c, d, width, height))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_wraps_around_the_compass() {
        assert_eq!(Direction::N.rotate(-1), Direction::NW);
        assert_eq!(Direction::NW.rotate(1), Direction::N);
        assert_eq!(Direction::SE.rotate(2), Direction::SW);
    }

    #[test]
    fn off_grid_steps_are_clipped() {
        assert_eq!(step(Valuation::new(0, 0), Direction::SW, 4, 4), Valuation::new(0, 0));
        assert_eq!(step(Valuation::new(3, 2), Direction::E, 4, 4), Valuation::new(3, 2));
        assert_eq!(step(Valuation::new(2, 2), Direction::NE, 4, 4), Valuation::new(3, 3));
    }

    #[test]
    fn index_round_trips() {
        for i in 0..20 {
            assert_eq!(Valuation::from_index(i, 5).index(5), i);
        }
    }
}
