use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;

/// A set of poset points. Heyting algebra elements are up-sets stored this way.
///
/// Ordering is canonical: by cardinality, then lexicographically on the
/// sorted point list. `0` (the empty set) is therefore always first and `1`
/// (all points) always last among the up-sets of a poset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet(FixedBitSet);

impl PointSet {
    pub fn empty(universe: usize) -> Self {
        PointSet(FixedBitSet::with_capacity(universe))
    }

    pub fn full(universe: usize) -> Self {
        let mut s = FixedBitSet::with_capacity(universe);
        s.insert_range(..);
        PointSet(s)
    }

    pub fn singleton(universe: usize, p: usize) -> Self {
        let mut s = Self::empty(universe);
        s.insert(p);
        s
    }

    pub fn from_points(universe: usize, points: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for p in points {
            s.insert(p);
        }
        s
    }

    /// Size of the ambient point universe (not the cardinality).
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.contains(p)
    }

    pub fn insert(&mut self, p: usize) {
        self.0.insert(p);
    }

    pub fn remove(&mut self, p: usize) {
        self.0.set(p, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.minimum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.0.clone();
        s.union_with(&other.0);
        PointSet(s)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut s = self.0.clone();
        s.intersect_with(&other.0);
        PointSet(s)
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = self.0.clone();
        s.difference_with(&other.0);
        PointSet(s)
    }

    pub fn complement(&self) -> Self {
        let mut s = self.0.clone();
        s.toggle_range(..);
        PointSet(s)
    }

    pub fn union_with(&mut self, other: &Self) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &Self) {
        self.0.intersect_with(&other.0);
    }

    /// Preimage of this set under `f`, where `f` maps a universe of
    /// `f.len()` points into this set's universe.
    pub fn preimage(&self, f: &[usize]) -> Self {
        Self::from_points(f.len(), (0..f.len()).filter(|&x| self.contains(f[x])))
    }

    /// Image of this set under `f`, landing in a universe of `cod` points.
    pub fn image(&self, f: &[usize], cod: usize) -> Self {
        Self::from_points(cod, self.iter().map(|x| f[x]))
    }
}

impl Ord for PointSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
            .then_with(|| self.universe().cmp(&other.universe()))
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order_is_size_then_lex() {
        let a = PointSet::from_points(4, [2]);
        let b = PointSet::from_points(4, [0, 3]);
        let c = PointSet::from_points(4, [1, 2]);
        let mut v = vec![c.clone(), b.clone(), a.clone(), PointSet::empty(4)];
        v.sort();
        assert_eq!(v, vec![PointSet::empty(4), a, b, c]);
    }

    #[test]
    fn preimage_and_image() {
        let f = [0, 0, 1];
        let s = PointSet::from_points(2, [0]);
        assert_eq!(s.preimage(&f).to_vec(), vec![0, 1]);
        assert_eq!(PointSet::from_points(3, [2]).image(&f, 2).to_vec(), vec![1]);
        assert_eq!(PointSet::full(5).complement(), PointSet::empty(5));
    }
}
