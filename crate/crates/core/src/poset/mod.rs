//! Finite posets: the dual side of every finite Heyting algebra.
//!
//! Points are indexed `0..size`. The order is stored as the up-closure of each
//! point, with down-closures cached alongside.

mod enumerate;
mod iso;
mod maps;

use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pointset::PointSet;

pub use enumerate::{enumerate_posets, Catalog, DEFAULT_POSET_BOUND};
pub use iso::{are_isomorphic, colored_isomorphisms, find_colored_isomorphism, isomorphisms};
pub use maps::{
    connected_components, duplicate_upset_extension, is_p_morphism, pullback, pullback_raw, trim_amalgam,
    surjective_p_morphisms, MonotoneMap,
};
pub(crate) use maps::is_surjective;

#[derive(Clone, Debug)]
pub struct FinitePoset {
    up: Vec<PointSet>,
    down: Vec<PointSet>,
    labels: Option<Vec<String>>,
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.up == other.up
    }
}

impl Eq for FinitePoset {}

impl FinitePoset {
    /// Builds a poset from `(x, y)` pairs meaning `x <= y`. Reflexive pairs may
    /// be omitted. The relation must already be transitive: it is validated,
    /// never closed.
    pub fn from_pairs(size: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut up: Vec<PointSet> = (0..size).map(|x| PointSet::singleton(size, x)).collect();
        for &(x, y) in pairs {
            if x >= size || y >= size {
                return Err(Error::InvalidPoset(format!("pair ({x}, {y}) out of range")));
            }
            up[x].insert(y);
        }
        Self::from_up_closures(up)
    }

    /// Builds a poset from per-point up-closures, validating the order axioms.
    pub fn from_up_closures(up: Vec<PointSet>) -> Result<Self> {
        let n = up.len();
        for (x, ux) in up.iter().enumerate() {
            if ux.universe() != n {
                return Err(Error::InvalidPoset(format!("up-closure of {x} has wrong universe")));
            }
            if !ux.contains(x) {
                return Err(Error::InvalidPoset(format!("not reflexive at {x}")));
            }
            for y in ux.iter() {
                if y != x && up[y].contains(x) {
                    return Err(Error::InvalidPoset(format!("not antisymmetric: {x} and {y}")));
                }
                if !up[y].is_subset(ux) {
                    return Err(Error::InvalidPoset(format!(
                        "not transitive: {x} <= {y} but up-closure of {y} escapes"
                    )));
                }
            }
        }
        Ok(Self::from_valid_up(up))
    }

    pub(crate) fn from_valid_up(up: Vec<PointSet>) -> Self {
        let n = up.len();
        let mut down: Vec<PointSet> = (0..n).map(|_| PointSet::empty(n)).collect();
        for (x, ux) in up.iter().enumerate() {
            for y in ux.iter() {
                down[y].insert(x);
            }
        }
        FinitePoset { up, down, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size() {
            return Err(Error::InvalidPoset("label count differs from point count".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(l) => l[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn chain(n: usize) -> Self {
        let up = (0..n).map(|x| PointSet::from_points(n, x..n)).collect();
        Self::from_valid_up(up)
    }

    pub fn antichain(n: usize) -> Self {
        let up = (0..n).map(|x| PointSet::singleton(n, x)).collect();
        Self::from_valid_up(up)
    }

    pub fn size(&self) -> usize {
        self.up.len()
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.le(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.le(x, y) || self.le(y, x)
    }

    /// Principal up-set of `x`.
    pub fn up(&self, x: usize) -> &PointSet {
        &self.up[x]
    }

    /// Principal down-set of `x`.
    pub fn down(&self, x: usize) -> &PointSet {
        &self.down[x]
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.size())
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.size())
    }

    pub fn up_closure(&self, s: &PointSet) -> PointSet {
        let mut out = self.empty_set();
        for x in s.iter() {
            out.union_with(&self.up[x]);
        }
        out
    }

    pub fn down_closure(&self, s: &PointSet) -> PointSet {
        let mut out = self.empty_set();
        for x in s.iter() {
            out.union_with(&self.down[x]);
        }
        out
    }

    pub fn is_up_set(&self, s: &PointSet) -> bool {
        s.universe() == self.size() && s.iter().all(|x| self.up[x].is_subset(s))
    }

    pub fn is_down_set(&self, s: &PointSet) -> bool {
        s.universe() == self.size() && s.iter().all(|x| self.down[x].is_subset(s))
    }

    pub fn minimal_points(&self, s: &PointSet) -> Vec<usize> {
        s.iter()
            .filter(|&x| self.down[x].intersection(s).len() == 1)
            .collect()
    }

    pub fn maximal_points(&self, s: &PointSet) -> Vec<usize> {
        s.iter()
            .filter(|&x| self.up[x].intersection(s).len() == 1)
            .collect()
    }

    /// Covering pairs `(x, y)` with `x < y` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.size() {
            for y in self.up[x].iter() {
                if y == x {
                    continue;
                }
                let between = self.up[x].intersection(&self.down[y]);
                if between.len() == 2 {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Number of strict comparabilities.
    pub fn comparability_count(&self) -> usize {
        self.up.iter().map(|u| u.len() - 1).sum()
    }

    /// Points sorted so that `x < y` implies `x` comes first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.size()).collect();
        order.sort_by_key(|&x| (self.down[x].len(), x));
        order
    }

    /// Length of the longest chain ending at each point, counted in points.
    pub fn heights(&self) -> Vec<usize> {
        let mut h = vec![0; self.size()];
        for x in self.linear_extension() {
            h[x] = self.down[x]
                .iter()
                .filter(|&y| y != x)
                .map(|y| h[y] + 1)
                .max()
                .unwrap_or(0);
        }
        h
    }

    /// Every up-set, in canonical order (by size, then lexicographic).
    pub fn up_sets(&self) -> Vec<PointSet> {
        let n = self.size();
        let mut order = self.linear_extension();
        order.reverse();
        let mut out = Vec::new();
        let mut stack: Vec<(usize, PointSet)> = vec![(0, PointSet::empty(n))];
        while let Some((depth, current)) = stack.pop() {
            if depth == n {
                out.push(current);
                continue;
            }
            let x = order[depth];
            stack.push((depth + 1, current.clone()));
            let mut strict_up = self.up[x].clone();
            strict_up.remove(x);
            if strict_up.is_subset(&current) {
                let mut with = current;
                with.insert(x);
                stack.push((depth + 1, with));
            }
        }
        out.sort();
        out
    }

    /// Number of up-sets, stopping early once `cap` is exceeded.
    pub fn count_up_sets(&self, cap: usize) -> usize {
        let n = self.size();
        let mut order = self.linear_extension();
        order.reverse();
        let mut count = 0;
        let mut stack: Vec<(usize, PointSet)> = vec![(0, PointSet::empty(n))];
        while let Some((depth, current)) = stack.pop() {
            if depth == n {
                count += 1;
                if count > cap {
                    return count;
                }
                continue;
            }
            let x = order[depth];
            stack.push((depth + 1, current.clone()));
            let mut strict_up = self.up[x].clone();
            strict_up.remove(x);
            if strict_up.is_subset(&current) {
                let mut with = current;
                with.insert(x);
                stack.push((depth + 1, with));
            }
        }
        count
    }

    /// Induced subposet on `s`; the second component lists, for each new
    /// point, the original point it came from.
    pub fn induced(&self, s: &PointSet) -> (FinitePoset, Vec<usize>) {
        let pts = s.to_vec();
        let m = pts.len();
        let up = pts
            .iter()
            .map(|&x| PointSet::from_points(m, (0..m).filter(|&j| self.le(x, pts[j]))))
            .collect();
        (Self::from_valid_up(up), pts)
    }

    /// Product order on pairs, listed lexicographically.
    pub fn product(&self, other: &FinitePoset) -> FinitePoset {
        let (n, m) = (self.size(), other.size());
        let up = (0..n * m)
            .map(|i| {
                let (a, b) = (i / m, i % m);
                PointSet::from_points(
                    n * m,
                    (0..n * m).filter(|&j| self.le(a, j / m) && other.le(b, j % m)),
                )
            })
            .collect();
        Self::from_valid_up(up)
    }

    pub fn disjoint_union(&self, other: &FinitePoset) -> FinitePoset {
        let (n, m) = (self.size(), other.size());
        let mut up = Vec::with_capacity(n + m);
        for x in 0..n {
            up.push(PointSet::from_points(n + m, self.up[x].iter()));
        }
        for y in 0..m {
            up.push(PointSet::from_points(n + m, other.up[y].iter().map(|z| z + n)));
        }
        Self::from_valid_up(up)
    }

    /// Relabels points: point `x` of `self` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> FinitePoset {
        let n = self.size();
        let mut up = vec![PointSet::empty(n); n];
        for x in 0..n {
            up[perm[x]] = PointSet::from_points(n, self.up[x].iter().map(|y| perm[y]));
        }
        Self::from_valid_up(up)
    }

    /// Strict comparabilities as `(x, y)` with `x < y`, sorted.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.size() {
            for y in self.up[x].iter() {
                if y != x {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Breadth-first component labelling over comparabilities.
    pub(crate) fn component_ids(&self) -> Vec<usize> {
        let n = self.size();
        let mut comp = vec![usize::MAX; n];
        let mut next = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([start]);
            comp[start] = next;
            while let Some(x) = queue.pop_front() {
                for y in self.up[x].iter().chain(self.down[x].iter()) {
                    if comp[y] == usize::MAX {
                        comp[y] = next;
                        queue.push_back(y);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn into_arc(self) -> Arc<FinitePoset> {
        Arc::new(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_chain_plus_point() -> FinitePoset {
        FinitePoset::from_pairs(3, &[(0, 1)]).unwrap()
    }

    #[test]
    fn rejects_non_transitive_relation() {
        let err = FinitePoset::from_pairs(3, &[(0, 1), (1, 2)]).unwrap_err();
        assert!(matches!(err, Error::InvalidPoset(_)));
        assert!(FinitePoset::from_pairs(3, &[(0, 1), (1, 2), (0, 2)]).is_ok());
    }

    #[test]
    fn rejects_cycles() {
        assert!(FinitePoset::from_pairs(2, &[(0, 1), (1, 0)]).is_err());
        assert!(FinitePoset::from_pairs(2, &[(0, 5)]).is_err());
    }

    #[test]
    fn up_set_counts() {
        assert_eq!(FinitePoset::antichain(1).up_sets().len(), 2);
        for n in 1..6 {
            assert_eq!(FinitePoset::chain(n).up_sets().len(), n + 1);
        }
        assert_eq!(FinitePoset::antichain(3).up_sets().len(), 8);
        assert_eq!(FinitePoset::antichain(3).count_up_sets(5), 6);
        let one = FinitePoset::antichain(1).up_sets();
        assert_eq!(one, vec![PointSet::empty(1), PointSet::full(1)]);
    }

    #[test]
    fn up_sets_form_a_sublattice_of_the_powerset() {
        let p = two_chain_plus_point();
        let ups = p.up_sets();
        assert_eq!(ups.first(), Some(&p.empty_set()));
        assert_eq!(ups.last(), Some(&p.full_set()));
        for a in &ups {
            for b in &ups {
                assert!(ups.contains(&a.union(b)));
                assert!(ups.contains(&a.intersection(b)));
            }
        }
    }

    #[test]
    fn covers_and_heights() {
        let c = FinitePoset::chain(3);
        assert_eq!(c.covers(), vec![(0, 1), (1, 2)]);
        assert_eq!(c.heights(), vec![0, 1, 2]);
        let grid = FinitePoset::chain(2).product(&FinitePoset::chain(2));
        assert_eq!(grid.size(), 4);
        assert_eq!(grid.covers().len(), 4);
        assert!(!grid.comparable(1, 2));
    }

    #[test]
    fn induced_and_union() {
        let c = FinitePoset::chain(3);
        let (sub, pts) = c.induced(&PointSet::from_points(3, [0, 2]));
        assert_eq!(pts, vec![0, 2]);
        assert_eq!(sub, FinitePoset::chain(2));
        let u = FinitePoset::chain(2).disjoint_union(&FinitePoset::antichain(1));
        assert_eq!(u, two_chain_plus_point());
    }
}
