//! Automorphism groups of finite algebras, acting through their duals.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::amalgam::{complete_superamalgam, CompletionOptions, LowerAmalgam};
use crate::error::{Error, Result};
use crate::heyting::{enumerate_embeddings, HeytingAlgebra, PartialIso, Subalgebra, TableAlgebra};
use crate::pointset::PointSet;
use crate::poset::{enumerate_posets, isomorphisms, FinitePoset, DEFAULT_POSET_BOUND};
use crate::report::Report;

/// An automorphism, as a permutation of the dual points. It acts on
/// elements by taking images.
pub type Perm = Vec<usize>;

pub fn act(g: &[usize], a: &PointSet) -> PointSet {
    a.image(g, g.len())
}

pub fn compose(g: &[usize], h: &[usize]) -> Perm {
    // g after h
    h.iter().map(|&x| g[x]).collect()
}

pub fn inverse(g: &[usize]) -> Perm {
    let mut inv = vec![0; g.len()];
    for (x, &y) in g.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

/// Points moved by `g`.
pub fn support(g: &[usize]) -> PointSet {
    PointSet::from_points(g.len(), (0..g.len()).filter(|&x| g[x] != x))
}

pub fn is_order_automorphism(p: &FinitePoset, g: &[usize]) -> bool {
    let n = p.size();
    if g.len() != n || g.iter().collect::<BTreeSet<_>>().len() != n || g.iter().any(|&y| y >= n) {
        return false;
    }
    (0..n).all(|x| (0..n).all(|y| p.le(x, y) == p.le(g[x], g[y])))
}

/// A group of automorphisms of a finite algebra, stored as its sorted list
/// of elements.
#[derive(Clone, Debug)]
pub struct FiniteAutGroup {
    base: Arc<HeytingAlgebra>,
    elements: Vec<Perm>,
}

/// All automorphisms of `a`, found as the order-automorphisms of its dual.
pub fn automorphism_group(a: &Arc<HeytingAlgebra>) -> FiniteAutGroup {
    let mut elements = isomorphisms(a.dual(), a.dual(), usize::MAX);
    elements.sort();
    FiniteAutGroup { base: a.clone(), elements }
}

/// Bijections of the element set preserving `0`, `1`, `∧`, `∨` and `→`,
/// found by backtracking over the operation tables alone. Each is returned as
/// an element permutation in canonical index order.
pub fn automorphisms_by_tables(t: &TableAlgebra) -> Vec<Vec<usize>> {
    fn consistent(t: &TableAlgebra, f: &[usize], k: usize) -> bool {
        let ops = [&t.meet, &t.join, &t.imp];
        (0..=k).all(|j| {
            ops.iter().all(|op| {
                let check = |a: usize, b: usize| {
                    let c = op[a][b];
                    f[c] == usize::MAX || f[c] == op[f[a]][f[b]]
                };
                check(k, j) && check(j, k)
            })
        })
    }
    fn go(t: &TableAlgebra, f: &mut Vec<usize>, used: &mut Vec<bool>, k: usize, out: &mut Vec<Vec<usize>>) {
        if k == t.size {
            out.push(f.clone());
            return;
        }
        if f[k] != usize::MAX {
            if consistent(t, f, k) {
                go(t, f, used, k + 1, out);
            }
            return;
        }
        for v in 0..t.size {
            if used[v] {
                continue;
            }
            f[k] = v;
            used[v] = true;
            // a value already forced for a later index must still agree
            if consistent(t, f, k) {
                go(t, f, used, k + 1, out);
            }
            used[v] = false;
            f[k] = usize::MAX;
        }
    }
    let mut f = vec![usize::MAX; t.size];
    let mut used = vec![false; t.size];
    f[t.zero] = t.zero;
    f[t.one] = t.one;
    used[t.zero] = true;
    used[t.one] = true;
    let mut out = Vec::new();
    go(t, &mut f, &mut used, 0, &mut out);
    out
}

impl FiniteAutGroup {
    pub fn base(&self) -> &Arc<HeytingAlgebra> {
        &self.base
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> Perm {
        (0..self.base.dual_size()).collect()
    }

    fn subgroup(&self, keep: impl Fn(&Perm) -> bool) -> FiniteAutGroup {
        FiniteAutGroup {
            base: self.base.clone(),
            elements: self.elements.iter().filter(|g| keep(g)).cloned().collect(),
        }
    }

    pub fn contains(&self, g: &[usize]) -> bool {
        self.elements.binary_search_by(|e| e.as_slice().cmp(g)).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &FiniteAutGroup) -> bool {
        self.elements.iter().all(|g| other.contains(g))
    }

    /// Closed under composition and inverses, and contains the identity.
    pub fn is_closed(&self) -> bool {
        self.contains(&self.identity())
            && self.elements.iter().all(|g| {
                self.contains(&inverse(g)) && self.elements.iter().all(|h| self.contains(&compose(g, h)))
            })
    }

    /// Every element is an order-automorphism of the dual and its action on
    /// elements agrees with an automorphism found from the tables alone.
    pub fn cross_check(&self) -> bool {
        let dual = self.base.dual();
        if !self.elements.iter().all(|g| is_order_automorphism(dual, g)) {
            return false;
        }
        let t = self.base.tables();
        let mut by_tables = automorphisms_by_tables(&t);
        by_tables.sort();
        let els = self.base.elements();
        let mut via_dual: Vec<Vec<usize>> = self
            .elements
            .iter()
            .map(|g| els.iter().map(|a| self.base.index_of(&act(g, a)).expect("element")).collect())
            .collect();
        via_dual.sort();
        via_dual == by_tables
    }

    /// Orbit of a single element, sorted.
    pub fn orbit(&self, a: &PointSet) -> Vec<PointSet> {
        let set: BTreeSet<PointSet> = self.elements.iter().map(|g| act(g, a)).collect();
        set.into_iter().collect()
    }

    /// Orbit of a set of elements under the induced action on sets.
    pub fn orbit_of_set(&self, s: &[PointSet]) -> Vec<Vec<PointSet>> {
        let set: BTreeSet<Vec<PointSet>> = self
            .elements
            .iter()
            .map(|g| {
                let mut img: Vec<PointSet> = s.iter().map(|a| act(g, a)).collect();
                img.sort();
                img.dedup();
                img
            })
            .collect();
        set.into_iter().collect()
    }

    pub fn stabilizer_pointwise(&self, s: &[PointSet]) -> FiniteAutGroup {
        self.subgroup(|g| s.iter().all(|a| act(g, a) == *a))
    }

    pub fn stabilizer_setwise(&self, s: &[PointSet]) -> FiniteAutGroup {
        let target: BTreeSet<&PointSet> = s.iter().collect();
        self.subgroup(|g| s.iter().all(|a| target.contains(&act(g, a))))
    }

    /// Automorphisms fixing every dual point outside the up-set `y`.
    pub fn supported_automorphisms(&self, y: &PointSet) -> Result<FiniteAutGroup> {
        if !self.base.dual().is_up_set(y) {
            return Err(Error::NotUpSet(format!("{y:?}")));
        }
        Ok(self.subgroup(|g| support(g).is_subset(y)))
    }
}

/// Glues automorphisms with pairwise disjoint supports: each point moves as
/// the unique member whose support contains it, and stays put otherwise.
pub fn agglutinate(base: &FinitePoset, fs: &[Perm]) -> Result<Perm> {
    let n = base.size();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (i, f) in fs.iter().enumerate() {
        if !is_order_automorphism(base, f) {
            return Err(Error::NotIsomorphic(format!("member {i} is not an automorphism")));
        }
        for x in support(f).iter() {
            if owner[x].is_some() {
                return Err(Error::OverlappingSupports(x));
            }
            owner[x] = Some(i);
        }
    }
    let glued: Perm = (0..n).map(|x| owner[x].map_or(x, |i| fs[i][x])).collect();
    if !is_order_automorphism(base, &glued) {
        return Err(Error::NotIsomorphic("glued map is not an automorphism".into()));
    }
    Ok(glued)
}

/// Outcome of trying to extend a partial automorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EppaVerdict {
    /// Some element is sent strictly above or below itself, so no finite
    /// extension can exist at any size.
    RefutedForAllSizes,
    Extends,
    NoExtensionUpToBound,
}

impl std::fmt::Display for EppaVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EppaVerdict::RefutedForAllSizes => "refuted-for-all-sizes",
            EppaVerdict::Extends => "extends",
            EppaVerdict::NoExtensionUpToBound => "no-extension-up-to-bound",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainArgument {
    /// The element `x` with `p(x)` strictly comparable to `x`.
    pub element: Vec<usize>,
    pub image: Vec<usize>,
    pub increasing: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EppaWitness {
    /// Catalog size and index of the extension's dual.
    pub size: usize,
    pub index: usize,
    /// Dual of the embedding into the extension.
    pub embedding: Vec<usize>,
    /// The extending automorphism, on the extension's dual points.
    pub automorphism: Vec<usize>,
}

/// Largest number of witnesses listed in a report.
pub const EPPA_WITNESS_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EppaReport {
    pub bound: usize,
    pub symbolic: Option<ChainArgument>,
    pub algebras_checked: usize,
    pub embeddings_checked: usize,
    pub witness_count: usize,
    pub witnesses: Vec<EppaWitness>,
    pub truncated: bool,
    pub verdict: EppaVerdict,
    /// The chain argument and the search do not contradict each other.
    pub consistent: bool,
}

/// Looks for a finite algebra `C ⊇ b` and an automorphism of `C` extending
/// `p`, over every embedding of `b` into every catalog algebra with dual
/// size at most `bound`. Independently, an element sent strictly above or
/// below itself refutes every finite extension.
pub fn eppa_refute(b: &Arc<HeytingAlgebra>, p: &PartialIso, bound: usize) -> Result<EppaReport> {
    if !Arc::ptr_eq(p.stage(), b) && p.stage().dual() != b.dual() {
        return Err(Error::Mismatch("partial isomorphism of a different algebra".into()));
    }
    let symbolic = p.dom().elements().into_iter().find_map(|x| {
        let y = p.apply(&x).expect("in domain");
        (x != y && (x.is_subset(&y) || y.is_subset(&x))).then(|| ChainArgument {
            element: x.to_vec(),
            image: y.to_vec(),
            increasing: x.is_subset(&y),
        })
    });
    let catalog = enumerate_posets(bound.max(1), DEFAULT_POSET_BOUND)?;
    let mut report = EppaReport {
        bound,
        symbolic,
        algebras_checked: 0,
        embeddings_checked: 0,
        witness_count: 0,
        witnesses: Vec::new(),
        truncated: false,
        verdict: EppaVerdict::NoExtensionUpToBound,
        consistent: true,
    };
    for size in 1..=bound.max(1) {
        for (index, dual) in catalog.of_size(size).iter().enumerate() {
            let c = Arc::new(HeytingAlgebra::from_poset(dual.clone()));
            report.algebras_checked += 1;
            let embeddings = enumerate_embeddings(b, &c);
            if embeddings.is_empty() {
                continue;
            }
            let autos = isomorphisms(dual, dual, usize::MAX);
            for e in embeddings {
                report.embeddings_checked += 1;
                let s: Vec<PointSet> = p.dom_gens().iter().map(|a| e.apply(a)).collect();
                let t: Vec<PointSet> = p.cod_gens().iter().map(|a| e.apply(a)).collect();
                for f in &autos {
                    if s.iter().zip(&t).all(|(x, y)| act(f, x) == *y) {
                        report.witness_count += 1;
                        if report.witnesses.len() < EPPA_WITNESS_CAP {
                            report.witnesses.push(EppaWitness {
                                size,
                                index,
                                embedding: e.dual().to_vec(),
                                automorphism: f.clone(),
                            });
                        } else {
                            report.truncated = true;
                        }
                    }
                }
            }
        }
    }
    report.verdict = if report.symbolic.is_some() {
        EppaVerdict::RefutedForAllSizes
    } else if report.witness_count > 0 {
        EppaVerdict::Extends
    } else {
        EppaVerdict::NoExtensionUpToBound
    };
    report.consistent = report.symbolic.is_none() || report.witness_count == 0;
    Ok(report)
}

fn names(els: &[PointSet], named: &[(&str, &PointSet)]) -> String {
    let parts: Vec<String> = els
        .iter()
        .map(|e| {
            named
                .iter()
                .find(|(_, v)| *v == e)
                .map_or_else(|| format!("{:?}", e.to_vec()), |(n, _)| n.to_string())
        })
        .collect();
    format!("{{{}}}", parts.join(","))
}

/// The finite computations behind weak elimination of imaginaries, in the
/// 8-element Boolean algebra and in one larger algebra containing it.
pub fn wei_demo() -> Result<Report> {
    let mut r = Report::new("weak elimination of imaginaries: finite computations");
    let a0 = HeytingAlgebra::boolean(3);
    let (a, b, c) = (a0.principal(0), a0.principal(1), a0.principal(2));
    let (na, nb, nc) = (a0.neg(&a), a0.neg(&b), a0.neg(&c));
    let (zero, one) = (a0.bottom(), a0.top());
    let named = [
        ("0", &zero),
        ("1", &one),
        ("a", &a),
        ("b", &b),
        ("c", &c),
        ("¬a", &na),
        ("¬b", &nb),
        ("¬c", &nc),
    ];

    let generated = Subalgebra::generated(&a0, &[a.clone(), b.clone(), c.clone()])?;
    r.check(
        "<{a,b,c}> is the whole 8-element algebra",
        generated.size() == a0.size() && a0.size() == 8,
        Some(format!("{} elements generated", generated.size())),
    );
    let g = automorphism_group(&a0);
    r.check("|Aut(A0)| = 6", g.order() == 6, Some(format!("order {}", g.order())));
    let h = g.stabilizer_setwise(&[a.clone(), b.clone()]);
    r.check("|H| = 2 for H the setwise stabilizer of {a,b}", h.order() == 2, Some(format!("order {}", h.order())));
    let pw = g.stabilizer_pointwise(&[a.clone(), b.clone()]);
    r.check(
        "|pointwise stabilizer of {a,b}| = 1",
        pw.order() == 1,
        Some(format!("order {}", pw.order())),
    );
    let pabc = g.stabilizer_pointwise(&[a.clone(), b.clone(), c.clone()]);
    r.check("pointwise stabilizer of {a,b,c} lies in H", pabc.is_subgroup_of(&h), None);
    let switch = h.elements().iter().find(|s| act(s, &a) == b && act(s, &b) == a);
    r.check(
        "some element of H switches a and b",
        switch.is_some(),
        switch.map(|s| format!("dual permutation {s:?}")),
    );

    // subsets avoiding a, b, ¬a, ¬b
    let pool = [zero.clone(), one.clone(), c.clone(), nc.clone()];
    let mut equal_to_h = Vec::new();
    for mask in 0u32..16 {
        let sub: Vec<PointSet> = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| pool[i].clone()).collect();
        let gs = g.stabilizer_pointwise(&sub);
        if gs.order() == h.order() && gs.is_subgroup_of(&h) {
            equal_to_h.push(names(&sub, &named));
        }
    }
    let witness = Some(format!("equal to H for A' in {}", equal_to_h.join(" ")));
    if equal_to_h.is_empty() {
        r.check("inside Aut(A0), no A' avoiding a,b,¬a,¬b has G_(A') = H", true, None);
    } else {
        r.caveat(
            "inside Aut(A0), some A' avoiding a,b,¬a,¬b has G_(A') = H; a single finite \
             algebra is too rigid to exhibit the gap",
            witness,
        );
    }

    // one larger stage: amalgamate A0 with the 4-element Boolean algebra
    let two = HeytingAlgebra::two();
    let b4 = HeytingAlgebra::boolean(2);
    let l1 = enumerate_embeddings(&two, &a0).swap_remove(0);
    let l2 = enumerate_embeddings(&two, &b4).swap_remove(0);
    let completion = complete_superamalgam(&LowerAmalgam::new(l1, l2)?, &CompletionOptions::default())?;
    let stage = completion.algebra().clone();
    let e = completion.e1();
    let gs = automorphism_group(&stage);
    let (sa, sb, sc, snc) = (e.apply(&a), e.apply(&b), e.apply(&c), e.apply(&nc));
    let hs = gs.stabilizer_setwise(&[sa.clone(), sb.clone()]);
    r.check(
        "in a 64-element extension, the setwise stabilizer of {a,b} still switches a and b",
        hs.elements().iter().any(|s| act(s, &sa) == sb),
        Some(format!("|Aut| = {}, |H| = {}", gs.order(), hs.order())),
    );
    let gap = gs.stabilizer_pointwise(&[stage.bottom(), stage.top(), sc, snc]);
    let outside = gap.elements().iter().find(|s| !hs.contains(s));
    r.check(
        "in the extension, G_(A') \\ H is nonempty for A' = {0,1,c,¬c}",
        outside.is_some(),
        outside.map(|s| format!("dual permutation {s:?}")),
    );
    r.note(
        "all statements are about finite algebras; whether a finite stage captures \
         G_(A') \\ H being nonempty in the automorphism group of the limit is left open",
    );
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders() {
        assert_eq!(automorphism_group(&HeytingAlgebra::chain(4)).order(), 1);
        let b8 = HeytingAlgebra::boolean(3);
        let g = automorphism_group(&b8);
        assert_eq!(g.order(), 6);
        assert!(g.is_closed() && g.cross_check());
        let grid = HeytingAlgebra::from_poset_arc(FinitePoset::chain(2).product(&FinitePoset::chain(2)));
        assert_eq!(automorphism_group(&grid).order(), 2);
    }

    #[test]
    fn orbits_and_stabilizers() {
        let b8 = HeytingAlgebra::boolean(3);
        let g = automorphism_group(&b8);
        let (a, b) = (b8.principal(0), b8.principal(1));
        assert_eq!(g.orbit(&a).len(), 3);
        assert_eq!(g.orbit(&b8.top()), vec![b8.top()]);
        assert_eq!(g.orbit_of_set(&[a.clone(), b.clone()]).len(), 3);
        assert_eq!(g.stabilizer_pointwise(&[a.clone(), b.clone()]).order(), 1);
        assert_eq!(g.stabilizer_setwise(&[a.clone(), b.clone()]).order(), 2);
        let atoms: Vec<PointSet> = (0..3).map(|i| b8.principal(i)).collect();
        assert_eq!(g.stabilizer_setwise(&atoms).order(), 6);
        assert_eq!(g.stabilizer_pointwise(&atoms).order(), 1);
        assert_eq!(g.stabilizer_pointwise(&[]).order(), 6);
    }

    #[test]
    fn supports_and_gluing() {
        let b16 = HeytingAlgebra::boolean(4);
        let g = automorphism_group(&b16);
        let y = PointSet::from_points(4, [0, 1]);
        assert_eq!(g.supported_automorphisms(&y).unwrap().order(), 2);
        assert_eq!(g.supported_automorphisms(&PointSet::empty(4)).unwrap().order(), 1);
        let glued = agglutinate(b16.dual(), &[vec![1, 0, 2, 3], vec![0, 1, 3, 2]]).unwrap();
        assert_eq!(glued, vec![1, 0, 3, 2]);
        assert!(matches!(
            agglutinate(b16.dual(), &[vec![1, 0, 2, 3], vec![2, 1, 0, 3]]),
            Err(Error::OverlappingSupports(0))
        ));

        let grid = HeytingAlgebra::from_poset_arc(FinitePoset::chain(2).product(&FinitePoset::chain(2)));
        // points: (0,0)=0, (0,1)=1, (1,0)=2, (1,1)=3; {l, top} = {1, 3}
        let gg = automorphism_group(&grid);
        let y = PointSet::from_points(4, [1, 3]);
        assert_eq!(gg.supported_automorphisms(&y).unwrap().order(), 1);
    }

    #[test]
    fn eppa_examples() {
        let c4 = HeytingAlgebra::chain(4);
        let (a, b) = (c4.element(1).clone(), c4.element(2).clone());
        let p = PartialIso::from_tuples(&c4, std::slice::from_ref(&a), &[b]).unwrap().unwrap();
        let rep = eppa_refute(&c4, &p, 4).unwrap();
        assert_eq!(rep.verdict, EppaVerdict::RefutedForAllSizes);
        assert_eq!(rep.witness_count, 0);
        assert!(rep.consistent);

        let id = PartialIso::identity(&c4, &[a]).unwrap();
        assert_eq!(eppa_refute(&c4, &id, 3).unwrap().verdict, EppaVerdict::Extends);

        let b8 = HeytingAlgebra::boolean(3);
        let q = PartialIso::from_tuples(&b8, &[b8.principal(0)], &[b8.principal(1)]).unwrap().unwrap();
        let rep = eppa_refute(&b8, &q, 3).unwrap();
        assert_eq!(rep.verdict, EppaVerdict::Extends);
        assert!(rep.witnesses.iter().any(|w| w.size == 3));
    }

    #[test]
    fn wei_report() {
        let r = wei_demo().unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.claims.iter().any(|c| c.verdict == crate::report::Verdict::Caveat));
    }
}
