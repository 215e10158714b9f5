use std::collections::HashSet;
use std::sync::Arc;

use super::{AlgebraMap, HeytingAlgebra};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::poset::FinitePoset;

/// A subalgebra of a finite Heyting algebra, held through its dual: a
/// quotient poset of the parent's dual together with the quotient map.
#[derive(Clone, Debug)]
pub struct Subalgebra {
    parent: Arc<HeytingAlgebra>,
    generators: Vec<PointSet>,
    quotient: Vec<usize>,
    algebra: Arc<HeytingAlgebra>,
}

/// The subalgebra generated by `gens`: the least set containing them together
/// with `0` and `1` and closed under `∧`, `∨` and `→`.
pub fn generated_subalgebra(parent: &Arc<HeytingAlgebra>, gens: &[PointSet]) -> Result<Subalgebra> {
    Subalgebra::generated(parent, gens)
}

impl Subalgebra {
    /// Computes the dual of `⟨gens⟩` directly. Points `x`, `x'` of the parent
    /// dual are related when every element of `⟨gens⟩` containing `x` also
    /// contains `x'`. That preorder is the greatest relation `R` such that
    /// `x R x'` implies (a) every generator containing `x` contains `x'`, and
    /// (b) every `y' >= x'` is `R`-equivalent to some `y >= x`. The quotient by
    /// `R ∩ R⁻¹`, ordered by `R`, is the dual of the generated subalgebra.
    pub fn generated(parent: &Arc<HeytingAlgebra>, gens: &[PointSet]) -> Result<Self> {
        for g in gens {
            parent.check_element(g)?;
        }
        let p = parent.dual();
        let n = p.size();
        let mut rel: Vec<PointSet> = (0..n)
            .map(|x| {
                let mut row = PointSet::full(n);
                for g in gens.iter().filter(|g| g.contains(x)) {
                    row.intersect_with(g);
                }
                row
            })
            .collect();
        loop {
            let inverse = transpose(&rel);
            let equiv: Vec<PointSet> = (0..n).map(|y| rel[y].intersection(&inverse[y])).collect();
            let mut changed = false;
            for x in 0..n {
                let mut reach = PointSet::empty(n);
                for y in p.up(x).iter() {
                    reach.union_with(&equiv[y]);
                }
                let keep: Vec<usize> =
                    rel[x].iter().filter(|&x2| p.up(x2).is_subset(&reach)).collect();
                if keep.len() != rel[x].len() {
                    rel[x] = PointSet::from_points(n, keep);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let inverse = transpose(&rel);
        let mut class = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for x in 0..n {
            if class[x] != usize::MAX {
                continue;
            }
            let id = reps.len();
            for y in rel[x].intersection(&inverse[x]).iter() {
                class[y] = id;
            }
            reps.push(x);
        }
        let m = reps.len();
        let up = reps
            .iter()
            .map(|&r| PointSet::from_points(m, (0..m).filter(|&j| rel[r].contains(reps[j]))))
            .collect();
        let dual = FinitePoset::from_valid_up(up);
        Ok(Subalgebra {
            parent: parent.clone(),
            generators: gens.to_vec(),
            quotient: class,
            algebra: Arc::new(HeytingAlgebra::from_poset(Arc::new(dual))),
        })
    }

    /// The image of an embedding, as a subalgebra of its codomain.
    pub fn image_of(map: &AlgebraMap) -> Self {
        debug_assert!(map.is_embedding());
        let dom = map.dom();
        Subalgebra {
            parent: map.cod().clone(),
            generators: (0..dom.dual_size()).map(|x| map.apply(&dom.principal(x))).collect(),
            quotient: map.dual().to_vec(),
            algebra: dom.clone(),
        }
    }

    /// The subalgebra whose elements are exactly `elements`; rejects sets that
    /// are not closed under the operations.
    pub fn from_element_set(parent: &Arc<HeytingAlgebra>, elements: &[PointSet]) -> Result<Self> {
        let sub = Subalgebra::generated(parent, elements)?;
        let distinct: HashSet<&PointSet> = elements.iter().collect();
        let has_bounds = distinct.contains(&parent.bottom()) && distinct.contains(&parent.top());
        let closed = sub.size_up_to(distinct.len()) == Some(distinct.len());
        if !has_bounds || !closed {
            return Err(Error::NotSubalgebra(format!(
                "{} elements do not form a subalgebra",
                distinct.len()
            )));
        }
        Ok(sub)
    }

    /// The whole parent, with the identity quotient.
    pub fn full(parent: &Arc<HeytingAlgebra>) -> Self {
        Subalgebra {
            parent: parent.clone(),
            generators: (0..parent.dual_size()).map(|x| parent.principal(x)).collect(),
            quotient: (0..parent.dual_size()).collect(),
            algebra: parent.clone(),
        }
    }

    pub fn parent(&self) -> &Arc<HeytingAlgebra> {
        &self.parent
    }

    pub fn generators(&self) -> &[PointSet] {
        &self.generators
    }

    /// The subalgebra as a standalone algebra over the quotient poset.
    pub fn algebra(&self) -> &Arc<HeytingAlgebra> {
        &self.algebra
    }

    /// Parent dual point ↦ quotient point.
    pub fn quotient(&self) -> &[usize] {
        &self.quotient
    }

    pub fn dual_size(&self) -> usize {
        self.algebra.dual_size()
    }

    /// Element of the standalone algebra ↦ element of the parent.
    pub fn lift(&self, a: &PointSet) -> PointSet {
        a.preimage(&self.quotient)
    }

    /// Parent element ↦ standalone element, when it belongs to the subalgebra.
    pub fn lower(&self, a: &PointSet) -> Option<PointSet> {
        let img = a.image(&self.quotient, self.algebra.dual_size());
        (img.preimage(&self.quotient) == *a && self.algebra.is_element(&img)).then_some(img)
    }

    pub fn contains(&self, a: &PointSet) -> bool {
        self.lower(a).is_some()
    }

    pub fn inclusion(&self) -> AlgebraMap {
        AlgebraMap::from_dual_unchecked(self.algebra.clone(), self.parent.clone(), self.quotient.clone())
    }

    /// Elements as parent elements, in the parent's canonical order.
    pub fn elements(&self) -> Vec<PointSet> {
        let mut v: Vec<PointSet> = self.algebra.elements().iter().map(|a| self.lift(a)).collect();
        v.sort();
        v
    }

    pub fn size(&self) -> usize {
        self.algebra.size()
    }

    pub fn size_up_to(&self, cap: usize) -> Option<usize> {
        self.algebra.size_up_to(cap)
    }

    /// Least element of the subalgebra above a parent element `a`.
    pub fn saturate(&self, a: &PointSet) -> PointSet {
        a.image(&self.quotient, self.dual_size()).preimage(&self.quotient)
    }

    /// The inclusion of `self` into a larger subalgebra of the same parent,
    /// between the standalone algebras.
    pub fn inclusion_into(&self, bigger: &Subalgebra) -> Result<AlgebraMap> {
        if !self.is_contained_in(bigger) {
            return Err(Error::NotSubalgebra("not contained in the larger subalgebra".into()));
        }
        let mut dual = vec![usize::MAX; bigger.dual_size()];
        for (x, &t) in bigger.quotient.iter().enumerate() {
            dual[t] = self.quotient[x];
        }
        AlgebraMap::from_dual(self.algebra.clone(), bigger.algebra.clone(), dual)
    }

    /// The subalgebra carried to another parent along an embedding.
    pub fn transport(&self, link: &AlgebraMap) -> Subalgebra {
        let quotient = link.dual().iter().map(|&x| self.quotient[x]).collect();
        Subalgebra {
            parent: link.cod().clone(),
            generators: self.generators.iter().map(|g| link.apply(g)).collect(),
            quotient,
            algebra: self.algebra.clone(),
        }
    }

    /// Whether every element of `self` lies in `other` (same parent).
    pub fn is_contained_in(&self, other: &Subalgebra) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }
}

fn transpose(rel: &[PointSet]) -> Vec<PointSet> {
    let n = rel.len();
    let mut t = vec![PointSet::empty(n); n];
    for (x, row) in rel.iter().enumerate() {
        for y in row.iter() {
            t[y].insert(x);
        }
    }
    t
}

/// Closure of `gens ∪ {0, 1}` under `∧`, `∨`, `→` by plain fixpoint
/// iteration, in canonical order. Quadratic in the result; meant for small
/// algebras and as a cross-check of [`Subalgebra::generated`].
pub fn closure(parent: &HeytingAlgebra, gens: &[PointSet]) -> Vec<PointSet> {
    let mut seen: HashSet<PointSet> = HashSet::new();
    let mut all: Vec<PointSet> = Vec::new();
    for s in [parent.bottom(), parent.top()].into_iter().chain(gens.iter().cloned()) {
        if seen.insert(s.clone()) {
            all.push(s);
        }
    }
    let mut frontier = 0;
    while frontier < all.len() {
        let end = all.len();
        for i in 0..end {
            for j in frontier.max(i)..end {
                let (a, b) = (all[i].clone(), all[j].clone());
                let cands = [
                    parent.meet(&a, &b),
                    parent.join(&a, &b),
                    parent.imp(&a, &b),
                    parent.imp(&b, &a),
                ];
                for c in cands {
                    if seen.insert(c.clone()) {
                        all.push(c);
                    }
                }
            }
        }
        frontier = end;
    }
    all.sort();
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_examples() {
        let c4 = HeytingAlgebra::chain(4);
        let s = generated_subalgebra(&c4, &[]).unwrap();
        assert_eq!(s.size(), 2);
        let a = c4.element(1).clone();
        let s = generated_subalgebra(&c4, std::slice::from_ref(&a)).unwrap();
        assert_eq!(s.elements(), vec![c4.bottom(), a, c4.top()]);

        let b8 = HeytingAlgebra::boolean(3);
        let atoms: Vec<PointSet> = (0..3).map(|x| b8.principal(x)).collect();
        let s = generated_subalgebra(&b8, &atoms).unwrap();
        assert_eq!(s.size(), 8);
    }

    #[test]
    fn refinement_agrees_with_closure_on_grid() {
        let g = Arc::new(HeytingAlgebra::from_poset(Arc::new(
            FinitePoset::chain(3).product(&FinitePoset::chain(2)),
        )));
        let els = g.elements().to_vec();
        for a in &els {
            for b in &els {
                let sub = generated_subalgebra(&g, &[a.clone(), b.clone()]).unwrap();
                assert_eq!(sub.elements(), closure(&g, &[a.clone(), b.clone()]));
            }
        }
    }

    #[test]
    fn membership_and_inclusion() {
        let c4 = HeytingAlgebra::chain(4);
        let a = c4.element(1).clone();
        let b = c4.element(2).clone();
        let s = generated_subalgebra(&c4, std::slice::from_ref(&a)).unwrap();
        assert!(s.contains(&a));
        assert!(!s.contains(&b));
        let inc = s.inclusion();
        assert!(inc.is_embedding());
        assert!(inc.verify_by_tables());
    }
}
