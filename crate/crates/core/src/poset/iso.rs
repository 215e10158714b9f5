//! Order isomorphisms by backtracking over refined invariant classes.
//!
//! Points carry an optional colour; isomorphisms must preserve it. Colours are
//! refined by the multisets of colours above and below each point, which is
//! cheap and usually splits posets into small classes before the search.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use super::FinitePoset;

fn hash_of<T: Hash>(t: &T) -> u64 {
    let mut h = DefaultHasher::new();
    t.hash(&mut h);
    h.finish()
}

/// Refined colour of every point. Equal inputs always produce equal outputs,
/// so isomorphic (coloured) posets get matching colour multisets.
pub(crate) fn refined_colors(p: &FinitePoset, base: &[u64]) -> Vec<u64> {
    let n = p.size();
    let mut colors: Vec<u64> = (0..n)
        .map(|x| hash_of(&(base[x], p.up(x).len(), p.down(x).len())))
        .collect();
    let mut classes = class_count(&colors);
    for _ in 0..n {
        let next: Vec<u64> = (0..n)
            .map(|x| {
                let mut ups: Vec<u64> = p.up(x).iter().filter(|&y| y != x).map(|y| colors[y]).collect();
                let mut downs: Vec<u64> =
                    p.down(x).iter().filter(|&y| y != x).map(|y| colors[y]).collect();
                ups.sort_unstable();
                downs.sort_unstable();
                hash_of(&(colors[x], ups, downs))
            })
            .collect();
        let next_classes = class_count(&next);
        colors = next;
        if next_classes == classes {
            break;
        }
        classes = next_classes;
    }
    colors
}

fn class_count(colors: &[u64]) -> usize {
    let mut v = colors.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Isomorphism-invariant fingerprint of a poset.
pub(crate) fn fingerprint(p: &FinitePoset) -> Vec<u64> {
    let mut c = refined_colors(p, &vec![0; p.size()]);
    c.sort_unstable();
    c
}

struct Search<'a> {
    p: &'a FinitePoset,
    q: &'a FinitePoset,
    order: Vec<usize>,
    candidates: Vec<Vec<usize>>,
    assign: Vec<usize>,
    used: Vec<bool>,
    limit: usize,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) {
        if self.found.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            self.found.push(self.assign.clone());
            return;
        }
        let x = self.order[depth];
        for i in 0..self.candidates[x].len() {
            let y = self.candidates[x][i];
            if self.used[y] || !self.consistent(depth, x, y) {
                continue;
            }
            self.assign[x] = y;
            self.used[y] = true;
            self.run(depth + 1);
            self.used[y] = false;
            self.assign[x] = usize::MAX;
            if self.found.len() >= self.limit {
                return;
            }
        }
    }

    fn consistent(&self, depth: usize, x: usize, y: usize) -> bool {
        self.order[..depth].iter().all(|&a| {
            let b = self.assign[a];
            self.p.le(a, x) == self.q.le(b, y) && self.p.le(x, a) == self.q.le(y, b)
        })
    }
}

/// All colour-preserving order isomorphisms `p → q`, up to `limit` of them.
/// Each is returned as the image of every point of `p`.
pub fn colored_isomorphisms(
    p: &FinitePoset,
    p_colors: &[u64],
    q: &FinitePoset,
    q_colors: &[u64],
    limit: usize,
) -> Vec<Vec<usize>> {
    let n = p.size();
    if n != q.size() || p.comparability_count() != q.comparability_count() {
        return Vec::new();
    }
    let cp = refined_colors(p, p_colors);
    let cq = refined_colors(q, q_colors);
    let (mut sp, mut sq) = (cp.clone(), cq.clone());
    sp.sort_unstable();
    sq.sort_unstable();
    if sp != sq {
        return Vec::new();
    }
    let candidates: Vec<Vec<usize>> =
        (0..n).map(|x| (0..n).filter(|&y| cq[y] == cp[x]).collect()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| (candidates[x].len(), x));
    let mut search = Search {
        p,
        q,
        order,
        candidates,
        assign: vec![usize::MAX; n],
        used: vec![false; n],
        limit,
        found: Vec::new(),
    };
    search.run(0);
    search.found
}

pub fn find_colored_isomorphism(
    p: &FinitePoset,
    p_colors: &[u64],
    q: &FinitePoset,
    q_colors: &[u64],
) -> Option<Vec<usize>> {
    colored_isomorphisms(p, p_colors, q, q_colors, 1).pop()
}

pub fn isomorphisms(p: &FinitePoset, q: &FinitePoset, limit: usize) -> Vec<Vec<usize>> {
    colored_isomorphisms(p, &vec![0; p.size()], q, &vec![0; q.size()], limit)
}

/// An order isomorphism `p → q` if one exists.
pub fn are_isomorphic(p: &FinitePoset, q: &FinitePoset) -> Option<Vec<usize>> {
    isomorphisms(p, q, 1).pop()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_isomorphism_is_found() {
        let p = FinitePoset::chain(2).product(&FinitePoset::chain(2));
        assert!(are_isomorphic(&p, &p).is_some());
        let c = FinitePoset::chain(4);
        assert_eq!(are_isomorphic(&c, &c), Some(vec![0, 1, 2, 3]));
    }

    #[test]
    fn non_isomorphic_pairs() {
        assert!(are_isomorphic(&FinitePoset::chain(2), &FinitePoset::antichain(2)).is_none());
        let grid = FinitePoset::chain(2).product(&FinitePoset::chain(2));
        assert!(are_isomorphic(&grid, &FinitePoset::chain(4)).is_none());
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(isomorphisms(&FinitePoset::antichain(3), &FinitePoset::antichain(3), 100).len(), 6);
        let grid = FinitePoset::chain(2).product(&FinitePoset::chain(2));
        assert_eq!(isomorphisms(&grid, &grid, 100).len(), 2);
        assert_eq!(isomorphisms(&FinitePoset::chain(3), &FinitePoset::chain(3), 100).len(), 1);
    }

    #[test]
    fn colours_restrict_isomorphisms() {
        let a = FinitePoset::antichain(3);
        let found = colored_isomorphisms(&a, &[1, 0, 0], &a, &[0, 1, 0], 10);
        assert_eq!(found.len(), 2);
        assert!(found.iter().all(|f| f[0] == 1));
    }
}
