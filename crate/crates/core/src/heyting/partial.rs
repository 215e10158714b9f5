use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use super::{AlgebraMap, HeytingAlgebra, Subalgebra};
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::poset::find_colored_isomorphism;

/// An isomorphism between two finitely generated subalgebras of one algebra,
/// fixed by where it sends a generating tuple.
#[derive(Clone, Debug)]
pub struct PartialIso {
    stage: Arc<HeytingAlgebra>,
    dom_gens: Vec<PointSet>,
    cod_gens: Vec<PointSet>,
    dom: Subalgebra,
    cod: Subalgebra,
    /// Order isomorphism from the dual of `dom` onto the dual of `cod`.
    point_map: Vec<usize>,
}

fn colours(sub: &Subalgebra, tuple: &[PointSet]) -> Vec<u64> {
    let lowered: Vec<PointSet> = tuple.iter().map(|t| sub.lower(t).expect("generator")).collect();
    (0..sub.dual_size())
        .map(|q| {
            let bits: Vec<bool> = lowered.iter().map(|t| t.contains(q)).collect();
            let mut h = DefaultHasher::new();
            bits.hash(&mut h);
            h.finish()
        })
        .collect()
}

impl PartialIso {
    /// The isomorphism `⟨s⟩ → ⟨t⟩` with `s[i] ↦ t[i]`, if the two tuples have
    /// the same quantifier-free type. It is unique when it exists.
    pub fn from_tuples(
        stage: &Arc<HeytingAlgebra>,
        s: &[PointSet],
        t: &[PointSet],
    ) -> Result<Option<Self>> {
        if s.len() != t.len() {
            return Err(Error::Mismatch(format!("tuples of length {} and {}", s.len(), t.len())));
        }
        let dom = Subalgebra::generated(stage, s)?;
        let cod = Subalgebra::generated(stage, t)?;
        let found = find_colored_isomorphism(
            dom.algebra().dual(),
            &colours(&dom, s),
            cod.algebra().dual(),
            &colours(&cod, t),
        );
        let Some(point_map) = found else { return Ok(None) };
        let iso = PartialIso {
            stage: stage.clone(),
            dom_gens: s.to_vec(),
            cod_gens: t.to_vec(),
            dom,
            cod,
            point_map,
        };
        // colours were hashed; confirm the generators really correspond
        if iso.dom_gens.iter().zip(&iso.cod_gens).any(|(a, b)| iso.apply(a).as_ref() != Some(b)) {
            return Ok(None);
        }
        Ok(Some(iso))
    }

    pub fn identity(stage: &Arc<HeytingAlgebra>, gens: &[PointSet]) -> Result<Self> {
        Ok(Self::from_tuples(stage, gens, gens)?.expect("identity is an isomorphism"))
    }

    pub fn stage(&self) -> &Arc<HeytingAlgebra> {
        &self.stage
    }

    pub fn dom_gens(&self) -> &[PointSet] {
        &self.dom_gens
    }

    pub fn cod_gens(&self) -> &[PointSet] {
        &self.cod_gens
    }

    pub fn dom(&self) -> &Subalgebra {
        &self.dom
    }

    pub fn cod(&self) -> &Subalgebra {
        &self.cod
    }

    /// Order isomorphism from the dual of the domain onto the dual of the
    /// codomain.
    pub fn point_map(&self) -> &[usize] {
        &self.point_map
    }

    /// The map as an algebra isomorphism between the standalone domain and
    /// codomain algebras.
    pub fn as_algebra_map(&self) -> AlgebraMap {
        let mut inv = vec![0; self.point_map.len()];
        for (q, &r) in self.point_map.iter().enumerate() {
            inv[r] = q;
        }
        AlgebraMap::from_dual(self.dom.algebra().clone(), self.cod.algebra().clone(), inv)
            .expect("order isomorphism")
    }

    pub fn in_dom(&self, a: &PointSet) -> bool {
        self.dom.contains(a)
    }

    /// Image of `a`, or `None` outside the domain.
    pub fn apply(&self, a: &PointSet) -> Option<PointSet> {
        let low = self.dom.lower(a)?;
        let moved = low.image(&self.point_map, self.cod.dual_size());
        Some(self.cod.lift(&moved))
    }

    pub fn inverse(&self) -> PartialIso {
        let mut inv = vec![0; self.point_map.len()];
        for (q, &r) in self.point_map.iter().enumerate() {
            inv[r] = q;
        }
        PartialIso {
            stage: self.stage.clone(),
            dom_gens: self.cod_gens.clone(),
            cod_gens: self.dom_gens.clone(),
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            point_map: inv,
        }
    }

    /// Whether `self` agrees with `other` on all of `other`'s domain.
    pub fn extends(&self, other: &PartialIso) -> bool {
        other
            .dom_gens
            .iter()
            .zip(&other.cod_gens)
            .all(|(a, b)| self.apply(a).as_ref() == Some(b))
    }

    /// Whether the map fixes each of its generators.
    pub fn is_identity(&self) -> bool {
        self.dom_gens == self.cod_gens
    }

    /// Same map, carried into a larger stage along an embedding.
    pub fn transport(&self, link: &AlgebraMap) -> Result<PartialIso> {
        let s: Vec<PointSet> = self.dom_gens.iter().map(|a| link.apply(a)).collect();
        let t: Vec<PointSet> = self.cod_gens.iter().map(|a| link.apply(a)).collect();
        PartialIso::from_tuples(link.cod(), &s, &t)?
            .ok_or_else(|| Error::NotIsomorphic("transport along a non-embedding".into()))
    }

    /// Extends the map by `a ↦ b`, if the result is still an isomorphism.
    pub fn with_pair(&self, a: &PointSet, b: &PointSet) -> Result<Option<PartialIso>> {
        let mut s = self.dom_gens.clone();
        let mut t = self.cod_gens.clone();
        s.push(a.clone());
        t.push(b.clone());
        PartialIso::from_tuples(&self.stage, &s, &t)
    }
}

/// Whether `s` and `t` have the same quantifier-free type in `a`.
pub fn qf_type_equal(a: &Arc<HeytingAlgebra>, s: &[PointSet], t: &[PointSet]) -> Result<bool> {
    Ok(PartialIso::from_tuples(a, s, t)?.is_some())
}
