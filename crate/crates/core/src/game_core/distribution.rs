/// A finite discrete distribution over states.
///
/// Zero-probability outcomes are dropped and duplicate states are merged on
/// construction, so the support is always pairwise distinct.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<S> {
    support: Vec<(S, f64)>,
}

pub const SUM_TOLERANCE: f64 = 1e-12;

impl<S: PartialEq> Distribution<S> {
    pub fn dirac(state: S) -> Self {
        Distribution { support: vec![(state, 1.0)] }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (S, f64)>) -> Self {
        let mut support: Vec<(S, f64)> = Vec::new();
        for (s, p) in pairs {
            if p <= 0.0 {
                continue;
            }
            match support.iter_mut().find(|(t, _)| *t == s) {
                Some(entry) => entry.1 += p,
                None => support.push((s, p)),
            }
        }
        Distribution { support }
    }

    pub fn support(&self) -> &[(S, f64)] {
        &self.support
    }

    pub fn into_support(self) -> Vec<(S, f64)> {
        self.support
    }

    pub fn total(&self) -> f64 {
        self.support.iter().map(|(_, p)| p).sum()
    }

    pub fn probability_of(&self, state: &S) -> f64 {
        self.support.iter().find(|(s, _)| s == state).map_or(0.0, |(_, p)| *p)
    }

    pub fn is_dirac(&self) -> bool {
        self.support.len() == 1
    }

    pub fn is_well_formed(&self) -> bool {
        (self.total() - 1.0).abs() <= SUM_TOLERANCE && self.support.iter().all(|(_, p)| (0.0..=1.0).contains(p))
    }
}
