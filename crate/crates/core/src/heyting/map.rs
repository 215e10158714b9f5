use std::sync::Arc;

use super::HeytingAlgebra;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::poset::{is_p_morphism, is_surjective, surjective_p_morphisms, MonotoneMap};

/// A Heyting homomorphism `dom → cod` stored through its dual p-morphism
/// `cod.dual → dom.dual`; the element map is preimage along that dual.
#[derive(Clone, Debug)]
pub struct AlgebraMap {
    dom: Arc<HeytingAlgebra>,
    cod: Arc<HeytingAlgebra>,
    dual: Vec<usize>,
}

impl AlgebraMap {
    pub fn from_dual(
        dom: Arc<HeytingAlgebra>,
        cod: Arc<HeytingAlgebra>,
        dual: Vec<usize>,
    ) -> Result<Self> {
        if !is_p_morphism(cod.dual(), dom.dual(), &dual) {
            return Err(Error::NotPMorphism("dual of an algebra map".into()));
        }
        Ok(AlgebraMap { dom, cod, dual })
    }

    pub(crate) fn from_dual_unchecked(
        dom: Arc<HeytingAlgebra>,
        cod: Arc<HeytingAlgebra>,
        dual: Vec<usize>,
    ) -> Self {
        debug_assert!(is_p_morphism(cod.dual(), dom.dual(), &dual));
        AlgebraMap { dom, cod, dual }
    }

    pub fn identity(a: Arc<HeytingAlgebra>) -> Self {
        let dual = (0..a.dual_size()).collect();
        AlgebraMap { dom: a.clone(), cod: a, dual }
    }

    /// Builds a map from element indices (canonical order) and recovers its
    /// dual: point `x` of `cod` goes to the point generating the prime filter
    /// `{a : x ∈ f(a)}`.
    pub fn from_element_map(
        dom: Arc<HeytingAlgebra>,
        cod: Arc<HeytingAlgebra>,
        images: &[usize],
    ) -> Result<Self> {
        if images.len() != dom.size() {
            return Err(Error::NotHomomorphism(format!(
                "{} images for {} elements",
                images.len(),
                dom.size()
            )));
        }
        if let Some(&bad) = images.iter().find(|&&i| i >= cod.size()) {
            return Err(Error::NotHomomorphism(format!("image index {bad} out of range")));
        }
        let mut dual = Vec::with_capacity(cod.dual_size());
        for x in 0..cod.dual_size() {
            let mut least = dom.top();
            for (a, &img) in images.iter().enumerate() {
                if cod.element(img).contains(x) {
                    least.intersect_with(dom.element(a));
                }
            }
            let p = (0..dom.dual_size())
                .find(|&p| *dom.dual().up(p) == least)
                .ok_or_else(|| Error::NotHomomorphism(format!("point {x} has no prime filter")))?;
            dual.push(p);
        }
        let map = AlgebraMap::from_dual(dom.clone(), cod.clone(), dual)
            .map_err(|_| Error::NotHomomorphism("recovered dual is not a p-morphism".into()))?;
        for (a, &img) in images.iter().enumerate() {
            if map.apply(dom.element(a)) != *cod.element(img) {
                return Err(Error::NotHomomorphism(format!("element {a} is not preserved")));
            }
        }
        Ok(map)
    }

    pub fn dom(&self) -> &Arc<HeytingAlgebra> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<HeytingAlgebra> {
        &self.cod
    }

    /// The dual point map `cod.dual → dom.dual`.
    pub fn dual(&self) -> &[usize] {
        &self.dual
    }

    pub fn dual_map(&self) -> MonotoneMap {
        MonotoneMap::new(self.cod.dual().clone(), self.dom.dual().clone(), self.dual.clone())
            .expect("dual of an algebra map is monotone")
    }

    pub fn apply(&self, a: &PointSet) -> PointSet {
        a.preimage(&self.dual)
    }

    pub fn is_embedding(&self) -> bool {
        is_surjective(&self.dual, self.dom.dual_size())
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AlgebraMap) -> Result<AlgebraMap> {
        if !Arc::ptr_eq(&self.cod, &other.dom) && *self.cod.dual() != *other.dom.dual() {
            return Err(Error::Mismatch("composition of incompatible algebra maps".into()));
        }
        let dual = other.dual.iter().map(|&x| self.dual[x]).collect();
        Ok(AlgebraMap { dom: self.dom.clone(), cod: other.cod.clone(), dual })
    }

    /// Image of every element, as canonical indices.
    pub fn element_table(&self) -> Vec<usize> {
        self.dom
            .elements()
            .iter()
            .map(|a| self.cod.index_of(&self.apply(a)).expect("image is an element"))
            .collect()
    }

    /// Re-checks the homomorphism laws on the operation tables, ignoring the
    /// dual representation entirely.
    pub fn verify_by_tables(&self) -> bool {
        let f = self.element_table();
        let (s, t) = (self.dom.tables(), self.cod.tables());
        if f[s.zero] != t.zero || f[s.one] != t.one {
            return false;
        }
        (0..s.size).all(|a| {
            (0..s.size).all(|b| {
                f[s.meet[a][b]] == t.meet[f[a]][f[b]]
                    && f[s.join[a][b]] == t.join[f[a]][f[b]]
                    && f[s.imp[a][b]] == t.imp[f[a]][f[b]]
            })
        })
    }
}

/// Every embedding `b → a`, found as the surjective p-morphisms
/// `a.dual → b.dual`, in a deterministic order.
pub fn enumerate_embeddings(b: &Arc<HeytingAlgebra>, a: &Arc<HeytingAlgebra>) -> Vec<AlgebraMap> {
    surjective_p_morphisms(a.dual(), b.dual(), &|_, _| true, usize::MAX)
        .into_iter()
        .map(|dual| AlgebraMap { dom: b.clone(), cod: a.clone(), dual })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_counts() {
        let two = HeytingAlgebra::two();
        let b8 = HeytingAlgebra::boolean(3);
        assert_eq!(enumerate_embeddings(&two, &b8).len(), 1);
        let c3 = HeytingAlgebra::chain(3);
        let c4 = HeytingAlgebra::chain(4);
        let embs = enumerate_embeddings(&c3, &c4);
        assert_eq!(embs.len(), 2);
        let images: Vec<Vec<usize>> = embs.iter().map(|e| e.element_table()).collect();
        assert!(images.contains(&vec![0, 1, 3]));
        assert!(images.contains(&vec![0, 2, 3]));
        assert!(enumerate_embeddings(&c4, &c3).is_empty());
    }

    #[test]
    fn embeddings_pass_table_check() {
        let c3 = HeytingAlgebra::chain(3);
        let grid = HeytingAlgebra::from_poset_arc(
            crate::poset::FinitePoset::chain(2).product(&crate::poset::FinitePoset::chain(2)),
        );
        for e in enumerate_embeddings(&c3, &grid) {
            assert!(e.is_embedding());
            assert!(e.verify_by_tables());
        }
    }

    #[test]
    fn element_map_round_trip() {
        let c3 = HeytingAlgebra::chain(3);
        let c4 = HeytingAlgebra::chain(4);
        let m = AlgebraMap::from_element_map(c3.clone(), c4.clone(), &[0, 2, 3]).unwrap();
        assert_eq!(m.element_table(), vec![0, 2, 3]);
        // the top element must go to the top
        assert!(AlgebraMap::from_element_map(c3, c4, &[0, 1, 2]).is_err());
    }
}
