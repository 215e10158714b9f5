use std::sync::Arc;

use super::FinitePoset;
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// A monotone map between finite posets.
#[derive(Clone, Debug)]
pub struct MonotoneMap {
    dom: Arc<FinitePoset>,
    cod: Arc<FinitePoset>,
    image: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(dom: Arc<FinitePoset>, cod: Arc<FinitePoset>, image: Vec<usize>) -> Result<Self> {
        if image.len() != dom.size() {
            return Err(Error::NotMonotone(format!(
                "{} images for {} points",
                image.len(),
                dom.size()
            )));
        }
        if let Some(&bad) = image.iter().find(|&&y| y >= cod.size()) {
            return Err(Error::NotMonotone(format!("image {bad} out of range")));
        }
        if let Some((x, y)) = monotonicity_violation(&dom, &cod, &image) {
            return Err(Error::NotMonotone(format!("{x} <= {y} is not preserved")));
        }
        Ok(MonotoneMap { dom, cod, image })
    }

    pub fn identity(p: Arc<FinitePoset>) -> Self {
        let image = (0..p.size()).collect();
        MonotoneMap { dom: p.clone(), cod: p, image }
    }

    pub fn dom(&self) -> &Arc<FinitePoset> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FinitePoset> {
        &self.cod
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn is_surjective(&self) -> bool {
        is_surjective(&self.image, self.cod.size())
    }

    pub fn is_p_morphism(&self) -> bool {
        is_p_morphism(&self.dom, &self.cod, &self.image)
    }

    pub fn preimage(&self, s: &PointSet) -> PointSet {
        s.preimage(&self.image)
    }

    pub fn image_of(&self, s: &PointSet) -> PointSet {
        s.image(&self.image, self.cod.size())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &MonotoneMap) -> Result<MonotoneMap> {
        if *self.cod != *other.dom {
            return Err(Error::Mismatch("composition of incompatible maps".into()));
        }
        let image = self.image.iter().map(|&y| other.image[y]).collect();
        Ok(MonotoneMap { dom: self.dom.clone(), cod: other.cod.clone(), image })
    }
}

fn monotonicity_violation(
    dom: &FinitePoset,
    cod: &FinitePoset,
    image: &[usize],
) -> Option<(usize, usize)> {
    for x in 0..dom.size() {
        for y in dom.up(x).iter() {
            if !cod.le(image[x], image[y]) {
                return Some((x, y));
            }
        }
    }
    None
}

pub(crate) fn is_surjective(image: &[usize], cod: usize) -> bool {
    let mut hit = PointSet::empty(cod);
    for &y in image {
        hit.insert(y);
    }
    hit.len() == cod
}

/// Monotone plus the back condition: whenever `f(x) <= y'` some `y >= x` has
/// `f(y) = y'`. Equivalently `f[↑x] = ↑f(x)` for every `x`.
pub fn is_p_morphism(dom: &FinitePoset, cod: &FinitePoset, image: &[usize]) -> bool {
    if image.len() != dom.size() || image.iter().any(|&y| y >= cod.size()) {
        return false;
    }
    (0..dom.size()).all(|x| dom.up(x).image(image, cod.size()) == *cod.up(image[x]))
}

/// Fibre product of two surjective p-morphisms onto a common poset, on raw
/// point maps. Points are pairs `(x1, x2)` with `f1(x1) = f2(x2)`, listed
/// lexicographically and ordered componentwise.
pub fn pullback_raw(
    x1: &FinitePoset,
    f1: &[usize],
    x2: &FinitePoset,
    f2: &[usize],
) -> (FinitePoset, Vec<usize>, Vec<usize>) {
    let mut pairs = Vec::new();
    for a in 0..x1.size() {
        for b in 0..x2.size() {
            if f1[a] == f2[b] {
                pairs.push((a, b));
            }
        }
    }
    let n = pairs.len();
    let up = pairs
        .iter()
        .map(|&(a, b)| {
            PointSet::from_points(
                n,
                (0..n).filter(|&j| x1.le(a, pairs[j].0) && x2.le(b, pairs[j].1)),
            )
        })
        .collect();
    let p1 = pairs.iter().map(|&(a, _)| a).collect();
    let p2 = pairs.iter().map(|&(_, b)| b).collect();
    (FinitePoset::from_valid_up(up), p1, p2)
}

/// Shrinks an amalgam `(x, p1, p2)` of duals of sizes `n1`, `n2` to an
/// up-set of `x` on which both projections stay surjective, removing minimal
/// points greedily from the bottom. Restrictions of p-morphisms to up-sets
/// are p-morphisms, so the result is again an amalgam.
pub fn trim_amalgam(
    x: &FinitePoset,
    p1: &[usize],
    n1: usize,
    p2: &[usize],
    n2: usize,
) -> (FinitePoset, Vec<usize>, Vec<usize>) {
    let mut keep = x.full_set();
    let (mut c1, mut c2) = (vec![0usize; n1], vec![0usize; n2]);
    for z in 0..x.size() {
        c1[p1[z]] += 1;
        c2[p2[z]] += 1;
    }
    let mut order: Vec<usize> = (0..x.size()).collect();
    let h = x.heights();
    order.sort_by_key(|&z| (h[z], z));
    loop {
        let mut changed = false;
        for &z in &order {
            if keep.contains(z)
                && c1[p1[z]] > 1
                && c2[p2[z]] > 1
                && x.down(z).intersection(&keep).len() == 1
            {
                keep.remove(z);
                c1[p1[z]] -= 1;
                c2[p2[z]] -= 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let (sub, pts) = x.induced(&keep);
    let q1 = pts.iter().map(|&z| p1[z]).collect();
    let q2 = pts.iter().map(|&z| p2[z]).collect();
    (sub, q1, q2)
}

/// Pullback of surjective p-morphisms `f1: X1 → X0`, `f2: X2 → X0`.
pub fn pullback(
    f1: &MonotoneMap,
    f2: &MonotoneMap,
) -> Result<(Arc<FinitePoset>, MonotoneMap, MonotoneMap)> {
    if *f1.cod != *f2.cod {
        return Err(Error::Mismatch("pullback legs have different codomains".into()));
    }
    for f in [f1, f2] {
        if !f.is_surjective() {
            return Err(Error::NotSurjective);
        }
        if !f.is_p_morphism() {
            return Err(Error::NotPMorphism("pullback leg".into()));
        }
    }
    let (p, pi1, pi2) = pullback_raw(&f1.dom, &f1.image, &f2.dom, &f2.image);
    let p = Arc::new(p);
    let pi1 = MonotoneMap { dom: p.clone(), cod: f1.dom.clone(), image: pi1 };
    let pi2 = MonotoneMap { dom: p.clone(), cod: f2.dom.clone(), image: pi2 };
    Ok((p, pi1, pi2))
}

/// Comparability-connected components, each sorted, ordered by least point.
pub fn connected_components(p: &FinitePoset) -> Vec<Vec<usize>> {
    let ids = p.component_ids();
    let count = ids.iter().copied().max().map_or(0, |m| m + 1);
    let mut comps = vec![Vec::new(); count];
    for (x, &c) in ids.iter().enumerate() {
        comps[c].push(x);
    }
    comps
}

/// Adds a fresh, unattached copy of the subposet on `y` and returns the
/// projection back onto `p`. Copies of `y`'s points follow the originals in
/// increasing order, so point `p.size() + k` copies the `k`-th point of `y`.
pub fn duplicate_upset_extension(
    p: &Arc<FinitePoset>,
    y: &PointSet,
) -> Result<(Arc<FinitePoset>, MonotoneMap)> {
    if y.is_empty() {
        return Err(Error::NotUpSet("empty set cannot be duplicated".into()));
    }
    if !p.is_up_set(y) {
        return Err(Error::NotUpSet(format!("{y:?}")));
    }
    let (copy, origin) = p.induced(y);
    let extended = Arc::new(p.disjoint_union(&copy));
    let mut image: Vec<usize> = (0..p.size()).collect();
    image.extend(origin);
    let f = MonotoneMap { dom: extended.clone(), cod: p.clone(), image };
    Ok((extended, f))
}


/// Surjective p-morphisms `dom → cod` (up to `limit`), restricted to those
/// with `allowed(x, f(x))` everywhere. Points of `dom` are assigned from the
/// top down, so the back condition at `x` can be checked as soon as `x` is
/// placed.
pub fn surjective_p_morphisms(
    dom: &FinitePoset,
    cod: &FinitePoset,
    allowed: &dyn Fn(usize, usize) -> bool,
    limit: usize,
) -> Vec<Vec<usize>> {
    struct St<'a> {
        dom: &'a FinitePoset,
        cod: &'a FinitePoset,
        allowed: &'a dyn Fn(usize, usize) -> bool,
        order: Vec<usize>,
        image: Vec<usize>,
        hits: Vec<usize>,
        unhit: usize,
        limit: usize,
        out: Vec<Vec<usize>>,
    }
    fn go(st: &mut St<'_>, depth: usize) {
        if st.out.len() >= st.limit {
            return;
        }
        let remaining = st.order.len() - depth;
        if st.unhit > remaining {
            return;
        }
        if depth == st.order.len() {
            st.out.push(st.image.clone());
            return;
        }
        let x = st.order[depth];
        let mut above = PointSet::empty(st.cod.size());
        for z in st.dom.up(x).iter() {
            if z != x {
                above.insert(st.image[z]);
            }
        }
        for y in 0..st.cod.size() {
            if !(st.allowed)(x, y) {
                continue;
            }
            let mut with = above.clone();
            with.insert(y);
            if with != *st.cod.up(y) {
                continue;
            }
            st.image[x] = y;
            st.hits[y] += 1;
            if st.hits[y] == 1 {
                st.unhit -= 1;
            }
            go(st, depth + 1);
            if st.hits[y] == 1 {
                st.unhit += 1;
            }
            st.hits[y] -= 1;
            st.image[x] = usize::MAX;
            if st.out.len() >= st.limit {
                return;
            }
        }
    }
    let mut order = dom.linear_extension();
    order.reverse();
    let mut st = St {
        dom,
        cod,
        allowed,
        order,
        image: vec![usize::MAX; dom.size()],
        hits: vec![0; cod.size()],
        unhit: cod.size(),
        limit,
        out: Vec::new(),
    };
    go(&mut st, 0);
    st.out
}

#[cfg(test)]
mod search_tests {
    use super::*;

    #[test]
    fn counts_of_surjective_p_morphisms() {
        let any = |_: usize, _: usize| true;
        // 3-chain onto 2-chain: collapse the bottom pair or the top pair
        let c3 = FinitePoset::chain(3);
        let c2 = FinitePoset::chain(2);
        let maps = surjective_p_morphisms(&c3, &c2, &any, 100);
        assert_eq!(maps, vec![vec![0, 0, 1], vec![0, 1, 1]]);
        assert!(surjective_p_morphisms(&c2, &c3, &any, 100).is_empty());
        let a9 = FinitePoset::antichain(9);
        let a2 = FinitePoset::antichain(2);
        assert_eq!(surjective_p_morphisms(&a9, &a2, &any, 10_000).len(), 510);
    }
}
