use std::collections::HashMap;
use std::sync::Arc;

use super::iso::{are_isomorphic, fingerprint};
use super::FinitePoset;
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// Largest poset size enumerated unless the caller raises the limit.
pub const DEFAULT_POSET_BOUND: usize = 7;

/// One representative per isomorphism class of posets of size `1..=max`.
#[derive(Clone, Debug)]
pub struct Catalog {
    by_size: Vec<Vec<Arc<FinitePoset>>>,
}

impl Catalog {
    pub fn max_size(&self) -> usize {
        self.by_size.len()
    }

    /// Class counts for sizes `1..=max`.
    pub fn counts(&self) -> Vec<usize> {
        self.by_size.iter().map(Vec::len).collect()
    }

    pub fn of_size(&self, n: usize) -> &[Arc<FinitePoset>] {
        if n == 0 || n > self.by_size.len() {
            return &[];
        }
        &self.by_size[n - 1]
    }

    /// All representatives, by size then discovery order.
    pub fn iter(&self) -> impl Iterator<Item = &Arc<FinitePoset>> {
        self.by_size.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_size.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Enumerates posets up to isomorphism with at most `n` points.
///
/// Every poset of size `k + 1` arises from one of size `k` by adjoining a new
/// maximal point above some down-set, so the catalog grows size by size and
/// duplicates are discarded by fingerprint bucket plus isomorphism test.
pub fn enumerate_posets(n: usize, max: usize) -> Result<Catalog> {
    if n == 0 {
        return Err(Error::InvalidArgument("poset bound must be at least 1".into()));
    }
    if n > max {
        return Err(Error::BoundExceeded { what: "poset size", value: n, max });
    }
    let mut by_size: Vec<Vec<Arc<FinitePoset>>> = vec![vec![Arc::new(FinitePoset::antichain(1))]];
    for k in 1..n {
        let mut buckets: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        let mut reps: Vec<Arc<FinitePoset>> = Vec::new();
        for base in &by_size[k - 1] {
            for up in base.up_sets() {
                let below = up.complement();
                let candidate = add_maximal_point(base, &below);
                let fp = fingerprint(&candidate);
                let bucket = buckets.entry(fp).or_default();
                if bucket.iter().any(|&i| are_isomorphic(&reps[i], &candidate).is_some()) {
                    continue;
                }
                bucket.push(reps.len());
                reps.push(Arc::new(candidate));
            }
        }
        by_size.push(reps);
    }
    Ok(Catalog { by_size })
}

/// Adds a new top-labelled point lying exactly above the down-set `below`.
fn add_maximal_point(p: &FinitePoset, below: &PointSet) -> FinitePoset {
    let n = p.size();
    let mut up: Vec<PointSet> = (0..n)
        .map(|x| {
            let mut s = PointSet::from_points(n + 1, p.up(x).iter());
            if below.contains(x) {
                s.insert(n);
            }
            s
        })
        .collect();
    up.push(PointSet::singleton(n + 1, n));
    FinitePoset::from_valid_up(up)
}
