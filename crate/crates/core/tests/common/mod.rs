#![allow(dead_code)]

use heyting_lab::poset::FinitePoset;
use heyting_lab::PointSet;
use proptest::prelude::*;

/// Transitive closure of a relation given by `x < y` bits over `x < y`
/// indices, so the result is always a partial order.
pub fn closed_poset(n: usize, bits: &[bool]) -> FinitePoset {
    let mut le = vec![vec![false; n]; n];
    let mut k = 0;
    for (x, row) in le.iter_mut().enumerate() {
        row[x] = true;
        for cell in row.iter_mut().skip(x + 1) {
            *cell = bits[k];
            k += 1;
        }
    }
    for m in 0..n {
        for x in 0..n {
            for y in 0..n {
                if le[x][m] && le[m][y] {
                    le[x][y] = true;
                }
            }
        }
    }
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| le[x][y]).collect();
    FinitePoset::from_pairs(n, &pairs).expect("closed relation")
}

pub fn arb_poset(max: usize) -> impl Strategy<Value = FinitePoset> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| closed_poset(n, &bits))
    })
}

/// Up-sets by scanning every subset.
pub fn brute_up_sets(p: &FinitePoset) -> Vec<PointSet> {
    let n = p.size();
    (0u32..1 << n)
        .map(|m| PointSet::from_points(n, (0..n).filter(|&i| m >> i & 1 == 1)))
        .filter(|s| s.iter().all(|x| (0..n).all(|y| !p.le(x, y) || s.contains(y))))
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Back condition by brute force: `f(x) ≤ y'` has a witness `y ≥ x` with
/// `f(y) = y'`.
pub fn brute_p_morphism(dom: &FinitePoset, cod: &FinitePoset, f: &[usize]) -> bool {
    let n = dom.size();
    let monotone = (0..n).all(|x| (0..n).all(|y| !dom.le(x, y) || cod.le(f[x], f[y])));
    let back = (0..n).all(|x| (0..cod.size()).all(|t| !cod.le(f[x], t) || (0..n).any(|y| dom.le(x, y) && f[y] == t)));
    monotone && back
}

/// Every surjective p-morphism `dom → cod`, by trying all maps.
pub fn brute_onto_p_morphisms(dom: &FinitePoset, cod: &FinitePoset) -> Vec<Vec<usize>> {
    let (n, k) = (dom.size(), cod.size());
    let mut out = Vec::new();
    let mut f = vec![0; n];
    loop {
        if (0..k).all(|t| f.contains(&t)) && brute_p_morphism(dom, cod, &f) {
            out.push(f.clone());
        }
        let mut i = 0;
        while i < n && f[i] + 1 == k {
            f[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
        f[i] += 1;
    }
}
