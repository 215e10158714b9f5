use std::sync::Arc;

use crate::error::{Error, Result};
use crate::heyting::{AlgebraMap, HeytingAlgebra, PartialIso, Subalgebra};
use crate::pointset::PointSet;
use crate::poset::{pullback_raw, trim_amalgam};

/// Stages with at most this many elements are searched for an image of the
/// target before any amalgamation is tried.
pub const IN_STAGE_SEARCH_LIMIT: usize = 4096;

/// A partial isomorphism extended by one element, possibly in a larger stage.
#[derive(Clone, Debug)]
pub struct Extension {
    /// Embedding of the old stage into the new one, if the stage grew.
    pub link: Option<AlgebraMap>,
    pub map: PartialIso,
}

impl Extension {
    pub fn stage(&self) -> &Arc<HeytingAlgebra> {
        self.map.stage()
    }
}

/// One forth step: extends `p` so that `target` is in its domain. The image
/// is searched for inside the stage first (the target itself, then the
/// elements in canonical order); if
/// there is none, the stage is amalgamated with `⟨dom p, target⟩` over the
/// codomain of `p`, and the copy of `target` in the amalgam is its image.
pub fn extend_partial_automorphism(p: &PartialIso, target: &PointSet) -> Result<Extension> {
    let stage = p.stage();
    stage.check_element(target)?;
    if p.in_dom(target) {
        return Ok(Extension { link: None, map: p.clone() });
    }
    if let Some(q) = p.with_pair(target, target)? {
        return Ok(Extension { link: None, map: q });
    }
    if stage.size_up_to(IN_STAGE_SEARCH_LIMIT).is_some() {
        for c in stage.elements() {
            if let Some(q) = p.with_pair(target, c)? {
                return Ok(Extension { link: None, map: q });
            }
        }
    }
    extend_by_amalgamation(p, target)
}

/// The amalgamation half of [`extend_partial_automorphism`], always growing
/// the stage.
pub fn extend_by_amalgamation(p: &PartialIso, target: &PointSet) -> Result<Extension> {
    let stage = p.stage();
    let cod = p.cod();
    let mut gens = p.dom_gens().to_vec();
    gens.push(target.clone());
    let wide = Subalgebra::generated(stage, &gens)?;
    // codomain ≅ domain ⊆ ⟨domain, target⟩
    let into_wide = p.dom().inclusion_into(&wide)?;
    let h = p.point_map();
    let dual: Vec<usize> = into_wide.dual().iter().map(|&q| h[q]).collect();
    let leg = AlgebraMap::from_dual(cod.algebra().clone(), wide.algebra().clone(), dual)?;
    // the stage and ⟨dom p, target⟩ glued over cod p, trimmed to a minimal
    // up-set of the pullback
    let base = cod.inclusion();
    let (x, p1, p2) = pullback_raw(stage.dual(), base.dual(), wide.algebra().dual(), leg.dual());
    let (x, p1, p2) = trim_amalgam(&x, &p1, stage.dual_size(), &p2, wide.dual_size());
    let glued = HeytingAlgebra::from_poset_arc(x);
    let e1 = AlgebraMap::from_dual(stage.clone(), glued.clone(), p1)?;
    let e2 = AlgebraMap::from_dual(wide.algebra().clone(), glued.clone(), p2)?;
    let image = e2.apply(&wide.lower(target).expect("generator"));
    let mut s: Vec<PointSet> = p.dom_gens().iter().map(|a| e1.apply(a)).collect();
    let mut t: Vec<PointSet> = p.cod_gens().iter().map(|a| e1.apply(a)).collect();
    s.push(e1.apply(target));
    t.push(image);
    let map = PartialIso::from_tuples(&glued, &s, &t)?
        .ok_or_else(|| Error::NotIsomorphic("amalgamated extension".into()))?;
    Ok(Extension { link: Some(e1), map })
}

/// One back step: extends `p` so that `target` is in its range.
pub fn extend_backwards(p: &PartialIso, target: &PointSet) -> Result<Extension> {
    let ext = extend_partial_automorphism(&p.inverse(), target)?;
    Ok(Extension { link: ext.link, map: ext.map.inverse() })
}
