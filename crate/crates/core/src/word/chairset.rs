use std::fmt;

use super::Chair;

/// A finite set of chairs, kept sorted and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ChairSet(Vec<Chair>);

impl ChairSet {
    pub fn new<I: IntoIterator<Item = Chair>>(chairs: I) -> Self {
        let mut v: Vec<Chair> = chairs.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ChairSet(v)
    }

    /// `{1, ..., m}`.
    pub fn full(m: u32) -> Self {
        ChairSet((1..=m).collect())
    }

    pub fn contains(&self, chair: Chair) -> bool {
        self.0.binary_search(&chair).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Chair> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Chair] {
        &self.0
    }

    pub fn intersection(&self, other: &ChairSet) -> ChairSet {
        ChairSet(
            self.0
                .iter()
                .copied()
                .filter(|c| other.contains(*c))
                .collect(),
        )
    }

    pub fn difference(&self, other: &ChairSet) -> ChairSet {
        ChairSet(
            self.0
                .iter()
                .copied()
                .filter(|c| !other.contains(*c))
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(Chair) -> Chair) -> ChairSet {
        ChairSet::new(self.0.iter().map(|&c| f(c)))
    }
}

impl fmt::Debug for ChairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<Chair> for ChairSet {
    fn from_iter<I: IntoIterator<Item = Chair>>(iter: I) -> Self {
        ChairSet::new(iter)
    }
}

/// Intersect an optional filter (`None` = every chair) with a concrete set.
pub(crate) fn narrow(keep: Option<&ChairSet>, with: &ChairSet) -> ChairSet {
    match keep {
        None => with.clone(),
        Some(k) => k.intersection(with),
    }
}
