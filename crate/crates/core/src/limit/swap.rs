use std::sync::Arc;

use crate::amalgam::{finite_subset_independence, IndepMode};
use crate::error::{Error, Result};
use crate::group::{act, is_order_automorphism, Perm};
use crate::heyting::{qf_type_equal, AlgebraMap, HeytingAlgebra};
use crate::pointset::PointSet;
use crate::poset::{colored_isomorphisms, pullback_raw};

/// Default number of stage-growth rounds tried by [`swap_witness`].
pub const DEFAULT_SWAP_BUDGET: usize = 3;

/// An automorphism fixing `U` and exchanging `V` with an independent copy
/// `V′` of the same type.
#[derive(Clone, Debug)]
pub struct SwapWitness {
    pub stage: Arc<HeytingAlgebra>,
    /// Embedding of the original stage into `stage`, if it grew.
    pub link: Option<AlgebraMap>,
    pub u: PointSet,
    pub v: PointSet,
    pub v_prime: PointSet,
    /// The automorphism, as a permutation of dual points.
    pub sigma: Perm,
    pub rounds: usize,
    /// `(U, V, V′)` and `(U, V′, V)` have the same quantifier-free type.
    pub types_agree: bool,
    /// `V` and `V′` are independent over `∅` in the algebra below `U`.
    pub independent: bool,
}

impl SwapWitness {
    /// Re-checks the defining properties of `σ`.
    pub fn verify(&self) -> bool {
        let s = &self.sigma;
        let meet = self.v.intersection(&self.v_prime);
        let twice = |a: &PointSet| act(s, &act(s, a)) == *a;
        is_order_automorphism(self.stage.dual(), s)
            && act(s, &self.u) == self.u
            && act(s, &self.v) == self.v_prime
            && act(s, &self.v_prime) == self.v
            && act(s, &meet) == meet
            && twice(&self.v)
            && twice(&self.v_prime)
    }
}

fn relative_independence(stage: &Arc<HeytingAlgebra>, u: &PointSet, v: &PointSet, w: &PointSet) -> Result<bool> {
    let (sub, origin) = stage.dual().induced(u);
    let below = HeytingAlgebra::from_poset_arc(sub);
    let restrict = |s: &PointSet| {
        PointSet::from_points(origin.len(), (0..origin.len()).filter(|&i| s.contains(origin[i])))
    };
    finite_subset_independence(&below, &[restrict(v)], &[], &[restrict(w)], IndepMode::Conjunction)
}

fn find_sigma(stage: &HeytingAlgebra, u: &PointSet, v: &PointSet, w: &PointSet) -> Option<Perm> {
    let n = stage.dual_size();
    let colour = |a: &PointSet, b: &PointSet| -> Vec<u64> {
        (0..n)
            .map(|p| u64::from(u.contains(p)) | u64::from(a.contains(p)) << 1 | u64::from(b.contains(p)) << 2)
            .collect()
    };
    let dual = stage.dual();
    colored_isomorphisms(dual, &colour(v, w), dual, &colour(w, v), 1).into_iter().next()
}

/// Looks for `V′` and `σ` in the stage; if `v` is not given, the first
/// nonempty element strictly below `u` is used. When the stage has no
/// suitable `V′`, it grows by gluing two copies of itself along `⟨U⟩` and
/// takes `V′` to be the second copy of `V`.
pub fn swap_witness(
    stage: &Arc<HeytingAlgebra>,
    u: &PointSet,
    v: Option<&PointSet>,
    budget: usize,
) -> Result<SwapWitness> {
    stage.check_element(u)?;
    if u.is_empty() {
        return Err(Error::InvalidArgument("U must be nonempty".into()));
    }
    let v = match v {
        Some(v) => {
            stage.check_element(v)?;
            if v.is_empty() || !v.is_subset(u) {
                return Err(Error::InvalidArgument("V must be a nonempty element below U".into()));
            }
            v.clone()
        }
        None => {
            
            (0..stage.dual_size())
                .map(|x| stage.principal(x))
                .filter(|p| p.is_subset(u) && p != u)
                .min()
                .ok_or_else(|| Error::NoWitness("U has no nonempty element strictly below it".into()))?
        }
    };
    let (mut cur, mut link, mut u, mut v) = (stage.clone(), None::<AlgebraMap>, u.clone(), v);
    for round in 0..=budget {
        if let Some(found) = search_stage(&cur, &u, &v)? {
            let (w, sigma, independent) = found;
            return Ok(SwapWitness {
                stage: cur,
                link,
                u,
                v,
                v_prime: w,
                sigma,
                rounds: round,
                types_agree: true,
                independent,
            });
        }
        if round == budget {
            break;
        }
        // glue two copies of the stage along ⟨U⟩: dual points of ⟨U⟩ are
        // "in U" and "not in U"
        let q: Vec<usize> = (0..cur.dual_size()).map(|x| usize::from(u.contains(x))).collect();
        let (glued, p1, p2) = pullback_raw(cur.dual(), &q, cur.dual(), &q);
        let next = HeytingAlgebra::from_poset_arc(glued);
        let e1 = AlgebraMap::from_dual(cur.clone(), next.clone(), p1)?;
        let e2 = AlgebraMap::from_dual(cur.clone(), next.clone(), p2)?;
        let v_copy = e2.apply(&v);
        u = e1.apply(&u);
        v = e1.apply(&v);
        link = Some(match link {
            Some(l) => l.then(&e1)?,
            None => e1,
        });
        cur = next;
        // the copy is the preferred candidate in the grown stage
        if let Some(sigma) = find_sigma(&cur, &u, &v, &v_copy) {
            let independent = relative_independence(&cur, &u, &v, &v_copy)?;
            let types_agree = qf_type_equal(&cur, &[u.clone(), v.clone(), v_copy.clone()], &[u.clone(), v_copy.clone(), v.clone()])?;
            if independent && types_agree {
                return Ok(SwapWitness {
                    stage: cur,
                    link,
                    u,
                    v,
                    v_prime: v_copy,
                    sigma,
                    rounds: round + 1,
                    types_agree,
                    independent,
                });
            }
        }
    }
    Err(Error::NoWitness(format!("no swap within {budget} growth rounds")))
}

/// Candidates `V′ <= U` in canonical order: equal types, independence below
/// `U`, and an automorphism realizing the swap. `V′ = V` is accepted only as
/// a last resort, with the identity.
fn search_stage(stage: &Arc<HeytingAlgebra>, u: &PointSet, v: &PointSet) -> Result<Option<(PointSet, Perm, bool)>> {
    let Some(_) = stage.size_up_to(super::IN_STAGE_SEARCH_LIMIT) else { return Ok(None) };
    for w in stage.elements() {
        if w == v || !w.is_subset(u) || w.len() != v.len() {
            continue;
        }
        if !qf_type_equal(stage, &[u.clone(), v.clone(), w.clone()], &[u.clone(), w.clone(), v.clone()])? {
            continue;
        }
        if !relative_independence(stage, u, v, w)? {
            continue;
        }
        if let Some(sigma) = find_sigma(stage, u, v, w) {
            return Ok(Some((w.clone(), sigma, true)));
        }
    }
    Ok(None)
}

/// The degenerate request `V′ = V`, answered by the identity.
pub fn trivial_swap(stage: &Arc<HeytingAlgebra>, u: &PointSet, v: &PointSet) -> SwapWitness {
    SwapWitness {
        stage: stage.clone(),
        link: None,
        u: u.clone(),
        v: v.clone(),
        v_prime: v.clone(),
        sigma: (0..stage.dual_size()).collect(),
        rounds: 0,
        types_agree: true,
        independent: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::FinitePoset;

    fn grid() -> Arc<HeytingAlgebra> {
        HeytingAlgebra::from_poset_arc(FinitePoset::chain(2).product(&FinitePoset::chain(2)))
    }

    #[test]
    fn grid_swap() {
        let g = grid();
        // points (0,0)=0 (0,1)=1 (1,0)=2 (1,1)=3
        let v = PointSet::from_points(4, [1, 3]);
        let w = swap_witness(&g, &g.top(), Some(&v), DEFAULT_SWAP_BUDGET).unwrap();
        assert_eq!(w.rounds, 0);
        assert_eq!(w.v_prime.to_vec(), vec![2, 3]);
        assert!(w.verify());
    }

    #[test]
    fn chain_needs_growth() {
        let c3 = HeytingAlgebra::chain(3);
        let w = swap_witness(&c3, &c3.top(), None, DEFAULT_SWAP_BUDGET).unwrap();
        assert_eq!(w.rounds, 1);
        assert!(w.verify() && w.independent && w.types_agree);
    }

    #[test]
    fn degenerate_request() {
        let g = grid();
        let v = PointSet::from_points(4, [1, 3]);
        assert!(trivial_swap(&g, &g.top(), &v).verify());
    }

    #[test]
    fn zero_budget_reports() {
        let c3 = HeytingAlgebra::chain(3);
        assert!(matches!(swap_witness(&c3, &c3.top(), None, 0), Err(Error::NoWitness(_))));
    }
}
