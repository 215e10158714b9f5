use std::collections::BTreeSet;

use super::HeytingAlgebra;
use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// Largest point count an [`InteriorAlgebra`] may have; the interior operator
/// is tabulated over all `2^n` subsets.
pub const INTERIOR_MAX_POINTS: usize = 16;

/// A powerset Boolean algebra on `points` points with an interior operator
/// `∘`, stored as a table indexed by subset bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteriorAlgebra {
    points: usize,
    interior: Vec<u32>,
}

/// Outcome of checking the interior-operator laws, with a counterexample
/// mask for each failed law.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InteriorAxioms {
    pub intensive: Option<u32>,
    pub idempotent: Option<u32>,
    pub preserves_meets: Option<(u32, u32)>,
    pub preserves_top: bool,
}

impl InteriorAxioms {
    pub fn all_hold(&self) -> bool {
        self.intensive.is_none()
            && self.idempotent.is_none()
            && self.preserves_meets.is_none()
            && self.preserves_top
    }
}

pub(crate) fn to_mask(s: &PointSet) -> u32 {
    s.iter().fold(0, |m, p| m | (1 << p))
}

pub(crate) fn from_mask(n: usize, m: u32) -> PointSet {
    PointSet::from_points(n, (0..n).filter(|&p| m >> p & 1 == 1))
}

/// The powerset of the dual of `a` with `∘S` the largest up-set inside `S`.
/// Its open elements are exactly the elements of `a`.
pub fn boolean_envelope(a: &HeytingAlgebra) -> Result<InteriorAlgebra> {
    let p = a.dual();
    let n = p.size();
    check_points(n)?;
    let interior = (0..1u32 << n)
        .map(|m| to_mask(&p.down_closure(&from_mask(n, m).complement()).complement()))
        .collect();
    Ok(InteriorAlgebra { points: n, interior })
}

/// Whether the open elements generate the carrier as a Boolean algebra.
pub fn skeletal_check(i: &InteriorAlgebra) -> bool {
    i.is_skeletal()
}

fn check_points(n: usize) -> Result<()> {
    if n > INTERIOR_MAX_POINTS {
        return Err(Error::BoundExceeded { what: "interior algebra points", value: n, max: INTERIOR_MAX_POINTS });
    }
    Ok(())
}

impl InteriorAlgebra {
    /// An arbitrary operator given by its table; the laws are not enforced
    /// here, see [`InteriorAlgebra::check_axioms`].
    pub fn from_table(points: usize, interior: Vec<u32>) -> Result<Self> {
        check_points(points)?;
        if interior.len() != 1 << points {
            return Err(Error::InvalidArgument(format!(
                "interior table has {} entries, expected {}",
                interior.len(),
                1usize << points
            )));
        }
        let full = Self::full_mask(points);
        if let Some(bad) = interior.iter().find(|&&m| m & !full != 0) {
            return Err(Error::InvalidArgument(format!("interior value {bad:#b} outside the carrier")));
        }
        Ok(InteriorAlgebra { points, interior })
    }

    /// Powerset of a 2-point set where only `0` and `1` are open: `∘S = ∅`
    /// for every proper `S`. Intensive, idempotent and meet-preserving, but
    /// not skeletal.
    pub fn non_skeletal_fixture() -> Self {
        InteriorAlgebra { points: 2, interior: vec![0, 0, 0, 0b11] }
    }

    fn full_mask(points: usize) -> u32 {
        if points == 32 { u32::MAX } else { (1u32 << points) - 1 }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn size(&self) -> usize {
        1 << self.points
    }

    pub fn top(&self) -> u32 {
        Self::full_mask(self.points)
    }

    pub fn neg(&self, x: u32) -> u32 {
        !x & self.top()
    }

    pub fn interior(&self, x: u32) -> u32 {
        self.interior[x as usize]
    }

    pub fn interior_of(&self, s: &PointSet) -> PointSet {
        from_mask(self.points, self.interior(to_mask(s)))
    }

    pub fn is_open(&self, x: u32) -> bool {
        self.interior(x) == x
    }

    /// Open elements in increasing mask order.
    pub fn opens(&self) -> Vec<u32> {
        (0..self.size() as u32).filter(|&x| self.is_open(x)).collect()
    }

    pub fn check_axioms(&self) -> InteriorAxioms {
        let all = 0..self.size() as u32;
        let intensive = all.clone().find(|&x| self.interior(x) & !x != 0);
        let idempotent = all.clone().find(|&x| self.interior(self.interior(x)) != self.interior(x));
        let mut preserves_meets = None;
        'outer: for x in all.clone() {
            for y in x..self.size() as u32 {
                if self.interior(x & y) != self.interior(x) & self.interior(y) {
                    preserves_meets = Some((x, y));
                    break 'outer;
                }
            }
        }
        InteriorAxioms {
            intensive,
            idempotent,
            preserves_meets,
            preserves_top: self.interior(self.top()) == self.top(),
        }
    }

    /// The Boolean subalgebra generated by a family of subsets consists of
    /// the unions of the blocks of the partition the family induces. It is
    /// the whole carrier iff every block is a single point.
    pub fn boolean_closure_size(&self, family: &[u32]) -> usize {
        let blocks: BTreeSet<u32> = (0..self.points)
            .map(|p| family.iter().fold(0u32, |sig, &f| (sig << 1) | (f >> p & 1)))
            .collect();
        // signatures beyond 32 generators collide; fall back to exact blocks
        if family.len() > 32 {
            let mut sigs: BTreeSet<Vec<bool>> = BTreeSet::new();
            for p in 0..self.points {
                sigs.insert(family.iter().map(|&f| f >> p & 1 == 1).collect());
            }
            return 1 << sigs.len();
        }
        1 << blocks.len()
    }

    pub fn is_skeletal(&self) -> bool {
        self.boolean_closure_size(&self.opens()) == self.size()
    }

    /// The relative algebra on the subsets of `y`, renumbered onto
    /// `0..|y|`, with `∘_y(S) = ∘(S ∪ (X ∖ y)) ∩ y`. For an envelope this is
    /// the envelope of the order induced on `y`, whether or not `y` is an
    /// up-set.
    pub fn relativize(&self, y: &PointSet) -> Result<(InteriorAlgebra, Vec<usize>)> {
        if y.universe() != self.points {
            return Err(Error::Mismatch("subset over a different point set".into()));
        }
        let origin = y.to_vec();
        let k = origin.len();
        let ym = to_mask(y);
        let spread = |m: u32| -> u32 {
            origin.iter().enumerate().fold(0, |acc, (i, &p)| acc | ((m >> i & 1) << p))
        };
        let shrink = |m: u32| -> u32 {
            origin.iter().enumerate().fold(0, |acc, (i, &p)| acc | ((m >> p & 1) << i))
        };
        let interior = (0..1u32 << k)
            .map(|m| shrink(self.interior(spread(m) | (self.top() & !ym)) & ym))
            .collect();
        Ok((InteriorAlgebra { points: k, interior }, origin))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::FinitePoset;

    fn explicit_closure(top: u32, family: &[u32]) -> BTreeSet<u32> {
        let mut set: BTreeSet<u32> = [0, top].into_iter().chain(family.iter().copied()).collect();
        loop {
            let items: Vec<u32> = set.iter().copied().collect();
            let before = set.len();
            for &a in &items {
                set.insert(!a & top);
                for &b in &items {
                    set.insert(a & b);
                    set.insert(a | b);
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    #[test]
    fn envelope_of_four_chain() {
        let a = HeytingAlgebra::chain(4);
        let env = boolean_envelope(&a).unwrap();
        // dual points 0 < 1 < 2
        assert_eq!(env.interior(0b001), 0);
        assert_eq!(env.interior(0b110), 0b110);
        assert!(env.check_axioms().all_hold());
        assert!(env.is_skeletal());
        let opens: Vec<PointSet> = env.opens().iter().map(|&m| from_mask(3, m)).collect();
        let mut elems = a.elements().to_vec();
        elems.sort_by_key(to_mask);
        assert_eq!(opens, elems);
    }

    #[test]
    fn two_element_envelope_is_trivial() {
        let env = boolean_envelope(&HeytingAlgebra::two()).unwrap();
        assert_eq!(env.size(), 2);
        assert!((0..2).all(|x| env.interior(x) == x));
        assert!(skeletal_check(&env));
    }

    #[test]
    fn negative_fixture() {
        let f = InteriorAlgebra::non_skeletal_fixture();
        assert!(f.check_axioms().all_hold());
        assert!(!skeletal_check(&f));
        assert_eq!(explicit_closure(f.top(), &f.opens()).len(), 2);
    }

    #[test]
    fn closure_size_matches_explicit_closure() {
        for n in 1..=4usize {
            let top = (1u32 << n) - 1;
            let i = InteriorAlgebra { points: n, interior: (0..=top).collect() };
            for fam in [vec![], vec![1], vec![1, 2 & top], vec![top & 0b0110, 0b0011 & top]] {
                assert_eq!(i.boolean_closure_size(&fam), explicit_closure(top, &fam).len());
            }
        }
    }

    #[test]
    fn relativization_is_envelope_of_induced_order() {
        let p = FinitePoset::chain(2).product(&FinitePoset::chain(2));
        let a = HeytingAlgebra::from_poset_arc(p.clone());
        let env = boolean_envelope(&a).unwrap();
        for m in 1..16u32 {
            let y = from_mask(4, m);
            let (rel, _) = env.relativize(&y).unwrap();
            let (sub, _) = p.induced(&y);
            let direct = boolean_envelope(&HeytingAlgebra::from_poset_arc(sub)).unwrap();
            assert_eq!(rel, direct);
        }
    }
}
