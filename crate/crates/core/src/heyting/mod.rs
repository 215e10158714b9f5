//! Finite Heyting algebras, realised as the up-set lattice of a finite poset.

mod interior;
mod map;
mod partial;
mod subalgebra;
mod table;
mod term;

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::poset::FinitePoset;

pub use interior::{
    boolean_envelope, skeletal_check, InteriorAlgebra, InteriorAxioms, INTERIOR_MAX_POINTS,
};
pub use map::{enumerate_embeddings, AlgebraMap};
pub use partial::{qf_type_equal, PartialIso};
pub use subalgebra::{closure, generated_subalgebra, Subalgebra};
pub use table::{dual_poset, PrimeFilterDual, TableAlgebra};
pub use term::{translate_star, Constant, Env, Term};

/// Above this many elements the algebra is never enumerated implicitly.
pub const ENUMERATION_LIMIT: usize = 1 << 20;

/// The Heyting algebra of up-sets of a finite poset: `∧ = ∩`, `∨ = ∪`,
/// `0 = ∅`, `1` = all points and `U → V` = complement of `↓(U ∖ V)`.
///
/// Elements are [`PointSet`]s. The element list is only materialised on
/// demand, so algebras over large duals stay cheap as long as nobody asks for
/// all of their elements.
#[derive(Debug)]
pub struct HeytingAlgebra {
    dual: Arc<FinitePoset>,
    elements: OnceLock<Vec<PointSet>>,
    index: OnceLock<HashMap<PointSet, usize>>,
}

impl HeytingAlgebra {
    pub fn from_poset(dual: Arc<FinitePoset>) -> Self {
        HeytingAlgebra { dual, elements: OnceLock::new(), index: OnceLock::new() }
    }

    pub fn from_poset_arc(dual: FinitePoset) -> Arc<Self> {
        Arc::new(Self::from_poset(Arc::new(dual)))
    }

    /// The `k`-element chain algebra (`k >= 2`).
    pub fn chain(k: usize) -> Arc<Self> {
        assert!(k >= 2, "a chain algebra has at least two elements");
        Self::from_poset_arc(FinitePoset::chain(k - 1))
    }

    /// The Boolean algebra with `atoms` atoms.
    pub fn boolean(atoms: usize) -> Arc<Self> {
        Self::from_poset_arc(FinitePoset::antichain(atoms))
    }

    pub fn two() -> Arc<Self> {
        Self::chain(2)
    }

    pub fn dual(&self) -> &Arc<FinitePoset> {
        &self.dual
    }

    pub fn dual_size(&self) -> usize {
        self.dual.size()
    }

    pub fn bottom(&self) -> PointSet {
        self.dual.empty_set()
    }

    pub fn top(&self) -> PointSet {
        self.dual.full_set()
    }

    pub fn meet(&self, a: &PointSet, b: &PointSet) -> PointSet {
        a.intersection(b)
    }

    pub fn join(&self, a: &PointSet, b: &PointSet) -> PointSet {
        a.union(b)
    }

    pub fn imp(&self, a: &PointSet, b: &PointSet) -> PointSet {
        self.dual.down_closure(&a.difference(b)).complement()
    }

    /// Pseudo-complement `a → 0`.
    pub fn neg(&self, a: &PointSet) -> PointSet {
        self.dual.down_closure(a).complement()
    }

    pub fn le(&self, a: &PointSet, b: &PointSet) -> bool {
        a.is_subset(b)
    }

    /// Principal up-set `↑x`, the join-irreducible element dual to point `x`.
    pub fn principal(&self, x: usize) -> PointSet {
        self.dual.up(x).clone()
    }

    pub fn is_element(&self, a: &PointSet) -> bool {
        self.dual.is_up_set(a)
    }

    pub fn check_element(&self, a: &PointSet) -> Result<()> {
        if self.is_element(a) {
            Ok(())
        } else {
            Err(Error::NotElement(format!("{a:?}")))
        }
    }

    /// All elements in canonical order. Panics above [`ENUMERATION_LIMIT`].
    pub fn elements(&self) -> &[PointSet] {
        self.elements.get_or_init(|| {
            let count = self.dual.count_up_sets(ENUMERATION_LIMIT);
            assert!(
                count <= ENUMERATION_LIMIT,
                "algebra over {} points is too large to enumerate",
                self.dual.size()
            );
            self.dual.up_sets()
        })
    }

    /// Element count, or `None` once it exceeds `cap`; never enumerates more.
    pub fn size_up_to(&self, cap: usize) -> Option<usize> {
        if let Some(e) = self.elements.get() {
            return (e.len() <= cap).then_some(e.len());
        }
        let c = self.dual.count_up_sets(cap);
        (c <= cap).then_some(c)
    }

    pub fn size(&self) -> usize {
        self.elements().len()
    }

    pub fn element(&self, i: usize) -> &PointSet {
        &self.elements()[i]
    }

    pub fn index_of(&self, a: &PointSet) -> Option<usize> {
        self.index
            .get_or_init(|| {
                self.elements()
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (e.clone(), i))
                    .collect()
            })
            .get(a)
            .copied()
    }

    /// Operation tables over the canonical element order.
    pub fn tables(&self) -> TableAlgebra {
        let el = self.elements();
        let idx = |s: PointSet| self.index_of(&s).expect("closed under operations");
        let n = el.len();
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        let mut imp = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                meet[i][j] = idx(self.meet(&el[i], &el[j]));
                join[i][j] = idx(self.join(&el[i], &el[j]));
                imp[i][j] = idx(self.imp(&el[i], &el[j]));
            }
        }
        TableAlgebra { size: n, zero: 0, one: n - 1, meet, join, imp }
    }
}
