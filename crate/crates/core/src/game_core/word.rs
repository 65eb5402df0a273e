use std::fmt;

use super::grid::Direction;

/// A finite word over compass moves, packed three bits per symbol.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    len: u8,
    bits: u64,
}

impl Word {
    pub const CAPACITY: usize = 21;

    pub const fn empty() -> Self {
        Word { len: 0, bits: 0 }
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn get(self, i: usize) -> Direction {
        assert!(i < self.len(), "word index {i} out of bounds (len {})", self.len);
        Direction::from_ordinal(((self.bits >> (3 * i)) & 7) as u8)
    }

    /// Returns the word extended by `d`. Panics past [`Word::CAPACITY`].
    pub fn push(self, d: Direction) -> Word {
        assert!(self.len() < Self::CAPACITY, "word capacity exceeded");
        Word { len: self.len + 1, bits: self.bits | ((d.ordinal() as u64) << (3 * self.len())) }
    }

    pub fn iter(self) -> impl Iterator<Item = Direction> {
        (0..self.len()).map(move |i| self.get(i))
    }

    pub fn to_vec(self) -> Vec<Direction> {
        self.iter().collect()
    }

    pub fn from_dirs(dirs: &[Direction]) -> Word {
        dirs.iter().fold(Word::empty(), |w, &d| w.push(d))
    }

    pub fn parse(s: &str) -> Option<Word> {
        if s == "-" {
            return Some(Word::empty());
        }
        let dirs: Option<Vec<Direction>> = s.split('.').map(Direction::parse).collect();
        let dirs = dirs?;
        (dirs.len() <= Self::CAPACITY).then(|| Word::from_dirs(&dirs))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        for (i, d) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(d.name())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}
