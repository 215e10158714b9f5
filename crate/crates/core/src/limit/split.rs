use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::heyting::{AlgebraMap, HeytingAlgebra};
use crate::pointset::PointSet;
use crate::poset::{connected_components, duplicate_upset_extension, is_p_morphism};

/// A nonempty up-set `Y` written as a disjoint union of nonempty up-sets
/// `U ∪ V`, possibly after growing the stage.
#[derive(Clone, Debug)]
pub struct Split {
    pub stage: Arc<HeytingAlgebra>,
    /// Embedding of the old stage, if it grew.
    pub link: Option<AlgebraMap>,
    /// The image of `Y` in the new stage.
    pub y: PointSet,
    pub u: PointSet,
    pub v: PointSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SplitCertificate {
    pub disjoint: bool,
    pub covers: bool,
    pub nonempty: bool,
    pub up_sets: bool,
    /// The dual of the link is a surjective p-morphism (vacuous without one).
    pub dual_ok: bool,
}

impl SplitCertificate {
    pub fn all_true(&self) -> bool {
        self.disjoint && self.covers && self.nonempty && self.up_sets && self.dual_ok
    }
}

impl Split {
    pub fn certify(&self) -> SplitCertificate {
        let a = &self.stage;
        let dual_ok = self.link.as_ref().is_none_or(|l| {
            l.is_embedding() && is_p_morphism(l.cod().dual(), l.dom().dual(), l.dual())
        });
        SplitCertificate {
            disjoint: a.meet(&self.u, &self.v) == a.bottom(),
            covers: a.join(&self.u, &self.v) == self.y,
            nonempty: !self.u.is_empty() && !self.v.is_empty(),
            up_sets: a.is_element(&self.u) && a.is_element(&self.v),
            dual_ok,
        }
    }
}

/// Splits `y`. An order-disconnected `y` is split into its first component
/// and the rest inside the stage; otherwise the stage grows by a fresh copy
/// of `y`, and `U` is the original, `V` the copy.
pub fn split_upset(stage: &Arc<HeytingAlgebra>, y: &PointSet) -> Result<Split> {
    if y.is_empty() {
        return Err(Error::NotUpSet("cannot split the empty up-set".into()));
    }
    stage.check_element(y)?;
    let dual = stage.dual();
    let (sub, origin) = dual.induced(y);
    let comps = connected_components(&sub);
    if comps.len() >= 2 {
        let u = PointSet::from_points(dual.size(), comps[0].iter().map(|&i| origin[i]));
        let v = y.difference(&u);
        return Ok(Split { stage: stage.clone(), link: None, y: y.clone(), u, v });
    }
    let (ext, f) = duplicate_upset_extension(dual, y)?;
    let n = ext.size();
    let grown = Arc::new(HeytingAlgebra::from_poset(ext));
    let link = AlgebraMap::from_dual(stage.clone(), grown.clone(), f.image().to_vec())?;
    let u = PointSet::from_points(n, y.iter());
    let v = PointSet::from_points(n, dual.size()..n);
    let y2 = link.apply(y);
    Ok(Split { stage: grown, link: Some(link), y: y2, u, v })
}

/// Splits `y`, then splits the resulting `U`, and so on, `rounds` times.
pub fn split_nested(stage: &Arc<HeytingAlgebra>, y: &PointSet, rounds: usize) -> Result<Vec<Split>> {
    let mut out: Vec<Split> = Vec::with_capacity(rounds);
    let (mut cur_stage, mut cur) = (stage.clone(), y.clone());
    for _ in 0..rounds {
        let s = split_upset(&cur_stage, &cur)?;
        cur_stage = s.stage.clone();
        cur = s.u.clone();
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::FinitePoset;

    #[test]
    fn split_top_of_two_chain() {
        let a = HeytingAlgebra::from_poset_arc(FinitePoset::chain(2));
        let y = PointSet::from_points(2, [1]);
        let s = split_upset(&a, &y).unwrap();
        assert_eq!(s.stage.dual_size(), 3);
        assert_eq!(s.u.to_vec(), vec![1]);
        assert_eq!(s.v.to_vec(), vec![2]);
        assert!(s.certify().all_true());
    }

    #[test]
    fn disconnected_split_stays_in_stage() {
        let a = HeytingAlgebra::boolean(2);
        let s = split_upset(&a, &a.top()).unwrap();
        assert!(s.link.is_none());
        assert!(s.certify().all_true());
        assert!(split_upset(&a, &a.bottom()).is_err());
    }

    #[test]
    fn nested_splits_shrink() {
        let a = HeytingAlgebra::chain(3);
        let splits = split_nested(&a, &a.top(), 3).unwrap();
        assert_eq!(splits.len(), 3);
        for w in splits.windows(2) {
            let later = &w[1];
            // the later Y is the earlier U, carried into the later stage
            assert!(later.u.is_subset(&later.y) && later.u != later.y);
        }
        assert!(splits.iter().all(|s| s.certify().all_true()));
    }
}
