//! Lower amalgams of finite Heyting algebras, their completion through the
//! dual pullback, and the interpolation relation between subalgebras.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heyting::{AlgebraMap, HeytingAlgebra, Subalgebra};
use crate::pointset::PointSet;
use crate::poset::{
    enumerate_posets, pullback_raw, surjective_p_morphisms, FinitePoset, DEFAULT_POSET_BOUND,
};

/// How the two interpolation clauses combine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndepMode {
    /// Both `A1 → A2` and `A2 → A1` inequalities interpolate.
    #[default]
    Conjunction,
    /// At least one of the two directions interpolates.
    Disjunction,
}

impl FromStr for IndepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conjunction" => Ok(IndepMode::Conjunction),
            "disjunction" => Ok(IndepMode::Disjunction),
            _ => Err(Error::InvalidArgument(format!("unknown independence mode `{s}`"))),
        }
    }
}

impl fmt::Display for IndepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndepMode::Conjunction => "conjunction",
            IndepMode::Disjunction => "disjunction",
        })
    }
}

/// Default size bound for the fallback search over candidate duals.
pub const DEFAULT_FALLBACK_BOUND: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompletionOptions {
    pub mode: IndepMode,
    /// Largest candidate dual tried by the fallback search. Candidates come
    /// from the poset catalog, so the effective bound is also capped by
    /// [`DEFAULT_POSET_BOUND`].
    pub fallback_bound: usize,
    /// Skip the pullback and go straight to the fallback search.
    pub force_fallback: bool,
}

impl Default for CompletionOptions {
    fn default() -> Self {
        CompletionOptions {
            mode: IndepMode::Conjunction,
            fallback_bound: DEFAULT_FALLBACK_BOUND,
            force_fallback: false,
        }
    }
}

/// A V-shaped diagram of embeddings `A1 ← A0 → A2`.
#[derive(Clone, Debug)]
pub struct LowerAmalgam {
    i1: AlgebraMap,
    i2: AlgebraMap,
}

fn same_algebra(a: &Arc<HeytingAlgebra>, b: &Arc<HeytingAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || a.dual() == b.dual()
}

impl LowerAmalgam {
    pub fn new(i1: AlgebraMap, i2: AlgebraMap) -> Result<Self> {
        if !same_algebra(i1.dom(), i2.dom()) {
            return Err(Error::Mismatch("the two legs start at different algebras".into()));
        }
        if !i1.is_embedding() || !i2.is_embedding() {
            return Err(Error::NotSurjective);
        }
        Ok(LowerAmalgam { i1, i2 })
    }

    pub fn a0(&self) -> &Arc<HeytingAlgebra> {
        self.i1.dom()
    }

    pub fn a1(&self) -> &Arc<HeytingAlgebra> {
        self.i1.cod()
    }

    pub fn a2(&self) -> &Arc<HeytingAlgebra> {
        self.i2.cod()
    }

    pub fn i1(&self) -> &AlgebraMap {
        &self.i1
    }

    pub fn i2(&self) -> &AlgebraMap {
        &self.i2
    }

    /// The same diagram with the legs exchanged.
    pub fn swapped(&self) -> LowerAmalgam {
        LowerAmalgam { i1: self.i2.clone(), i2: self.i1.clone() }
    }
}

/// A lower amalgam whose three algebras share one name space, so that the
/// common part is literally the intersection of the two sides.
#[derive(Clone, Debug)]
pub struct NormalAmalgam {
    amalgam: LowerAmalgam,
    names: [Vec<usize>; 3],
}

impl NormalAmalgam {
    pub fn amalgam(&self) -> &LowerAmalgam {
        &self.amalgam
    }

    /// Global name of each element of `A_k`, in canonical element order.
    pub fn names(&self, k: usize) -> &[usize] {
        &self.names[k]
    }

    pub fn name_set(&self, k: usize) -> BTreeSet<usize> {
        self.names[k].iter().copied().collect()
    }

    /// Whether the names of `A0` are exactly the names shared by both sides.
    pub fn is_normal(&self) -> bool {
        let shared: BTreeSet<usize> = self.name_set(1).intersection(&self.name_set(2)).copied().collect();
        shared == self.name_set(0)
    }
}

/// Names `A1` by `0..|A1|`, gives each element of `A0` the name of its
/// image in `A1`, gives the `A0`-part of `A2` the same names and the rest of
/// `A2` fresh names. A leg that is an isomorphism is replaced by the identity
/// on `A0`.
pub fn normalize(d: &LowerAmalgam) -> NormalAmalgam {
    let a0 = d.a0().clone();
    let iso = |m: &AlgebraMap| m.dom().dual_size() == m.cod().dual_size();
    let i1 = if iso(&d.i1) { AlgebraMap::identity(a0.clone()) } else { d.i1.clone() };
    let i2 = if iso(&d.i2) { AlgebraMap::identity(a0.clone()) } else { d.i2.clone() };
    let names1: Vec<usize> = (0..i1.cod().size()).collect();
    let t1 = i1.element_table();
    let names0: Vec<usize> = t1.iter().map(|&j| names1[j]).collect();
    let t2 = i2.element_table();
    let mut names2 = vec![usize::MAX; i2.cod().size()];
    for (k, &j) in t2.iter().enumerate() {
        names2[j] = names0[k];
    }
    let mut fresh = names1.len();
    for n in names2.iter_mut().filter(|n| **n == usize::MAX) {
        *n = fresh;
        fresh += 1;
    }
    NormalAmalgam { amalgam: LowerAmalgam { i1, i2 }, names: [names0, names1, names2] }
}

/// What was verified about a completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// `e1 ∘ ι1 = e2 ∘ ι2`.
    pub commutes: bool,
    /// The two images of `A0` coincide and `e1(A1) ∩ e2(A2)` is exactly that
    /// image.
    pub strong: bool,
    /// `e1(A1)` and `e2(A2)` interpolate over the image of `A0`.
    pub super_independent: bool,
    pub mode: IndepMode,
}

impl Certificate {
    pub fn all_true(&self) -> bool {
        self.commutes && self.strong && self.super_independent
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Pullback,
    /// Found by the fallback search; the candidate's position in the catalog.
    Fallback { size: usize, index: usize },
}

/// A completion `A1 → A ← A2` of a lower amalgam together with its
/// certificate.
#[derive(Clone, Debug)]
pub struct Completion {
    algebra: Arc<HeytingAlgebra>,
    e1: AlgebraMap,
    e2: AlgebraMap,
    certificate: Certificate,
    strategy: Strategy,
}

impl Completion {
    pub fn algebra(&self) -> &Arc<HeytingAlgebra> {
        &self.algebra
    }

    pub fn e1(&self) -> &AlgebraMap {
        &self.e1
    }

    pub fn e2(&self) -> &AlgebraMap {
        &self.e2
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// `e1(A1)`, `e1(ι1(A0))` and `e2(A2)` as subalgebras of the completion.
    pub fn images(&self, d: &LowerAmalgam) -> (Subalgebra, Subalgebra, Subalgebra) {
        let base = d.i1.then(&self.e1).expect("composable");
        (Subalgebra::image_of(&self.e1), Subalgebra::image_of(&base), Subalgebra::image_of(&self.e2))
    }
}

/// Verifies a candidate completion given by dual maps `π1: X → X1` and
/// `π2: X → X2`.
pub fn certify(
    d: &LowerAmalgam,
    algebra: &Arc<HeytingAlgebra>,
    pi1: Vec<usize>,
    pi2: Vec<usize>,
    mode: IndepMode,
) -> Result<(AlgebraMap, AlgebraMap, Certificate)> {
    let e1 = AlgebraMap::from_dual(d.a1().clone(), algebra.clone(), pi1)?;
    let e2 = AlgebraMap::from_dual(d.a2().clone(), algebra.clone(), pi2)?;
    if !e1.is_embedding() || !e2.is_embedding() {
        return Err(Error::NotSurjective);
    }
    let via1 = d.i1.then(&e1)?;
    let via2 = d.i2.then(&e2)?;
    let commutes = via1.dual() == via2.dual();
    let s1 = Subalgebra::image_of(&e1);
    let s2 = Subalgebra::image_of(&e2);
    let s0 = Subalgebra::image_of(&via1);
    let t0 = Subalgebra::image_of(&via2);
    let same_base = commutes || (t0.is_contained_in(&s0) && s0.is_contained_in(&t0));
    let strong = same_base && intersection_is_base(&s1, &s2, &s0);
    let super_independent = commutes && check_super_independence(&s1, &s0, &s2, mode)?;
    Ok((e1, e2, Certificate { commutes, strong, super_independent, mode }))
}

/// `s1 ∩ s2 ⊆ s0`. The least element of `s1 ∩ s2` above `↑x` must contain
/// the whole `s0`-class of `x`, for every point `x`.
fn intersection_is_base(s1: &Subalgebra, s2: &Subalgebra, s0: &Subalgebra) -> bool {
    let parent = s0.parent();
    let q0 = s0.quotient();
    (0..parent.dual_size()).all(|x| {
        let mut c = parent.principal(x);
        loop {
            let next = s2.saturate(&s1.saturate(&c));
            if next == c {
                break;
            }
            c = next;
        }
        (0..parent.dual_size()).all(|z| q0[z] != q0[x] || c.contains(z))
    })
}

/// Completes `d` by the pullback of the dual maps, certifying the result.
/// If the certificate fails, searches catalog duals for a certified
/// completion instead.
pub fn complete_superamalgam(d: &LowerAmalgam, opts: &CompletionOptions) -> Result<Completion> {
    if !opts.force_fallback {
        let (x, p1, p2) = pullback_raw(d.a1().dual(), d.i1.dual(), d.a2().dual(), d.i2.dual());
        let algebra = HeytingAlgebra::from_poset_arc(x);
        let (e1, e2, certificate) = certify(d, &algebra, p1, p2, opts.mode)?;
        if certificate.all_true() {
            return Ok(Completion { algebra, e1, e2, certificate, strategy: Strategy::Pullback });
        }
    }
    fallback_search(d, opts)
}

fn fallback_search(d: &LowerAmalgam, opts: &CompletionOptions) -> Result<Completion> {
    let bound = opts.fallback_bound.min(DEFAULT_POSET_BOUND);
    let (x1, x2) = (d.a1().dual(), d.a2().dual());
    let lo = x1.size().max(x2.size()).max(1);
    if lo <= bound {
        let catalog = enumerate_posets(bound, DEFAULT_POSET_BOUND)?;
        let (f1, f2) = (d.i1.dual(), d.i2.dual());
        for size in lo..=bound {
            for (index, cand) in catalog.of_size(size).iter().enumerate() {
                for pi1 in surjective_p_morphisms(cand, x1, &|_, _| true, usize::MAX) {
                    let fits = |x: usize, y: usize| f2[y] == f1[pi1[x]];
                    for pi2 in surjective_p_morphisms(cand, x2, &fits, usize::MAX) {
                        let algebra = Arc::new(HeytingAlgebra::from_poset(cand.clone()));
                        let (e1, e2, certificate) = certify(d, &algebra, pi1.clone(), pi2, opts.mode)?;
                        if certificate.all_true() {
                            return Ok(Completion {
                                algebra,
                                e1,
                                e2,
                                certificate,
                                strategy: Strategy::Fallback { size, index },
                            });
                        }
                    }
                }
            }
        }
    }
    Err(Error::FallbackExhausted {
        bound,
        instance: format!("duals of sizes {}, {}, {}", d.a0().dual_size(), x1.size(), x2.size()),
    })
}

/// Whether `s1` and `s2` interpolate over `s0`: every inequality `a1 <= a2`
/// between their elements has some `a0` of `s0` with `a1 <= a0 <= a2`, and
/// likewise for `a2 <= a1` (both under [`IndepMode::Conjunction`], either
/// under [`IndepMode::Disjunction`]).
///
/// The least element of `s0` above `a1` is its saturation along the quotient
/// onto the dual of `s0`, and saturation preserves unions, so it suffices to
/// test the join-irreducibles of `s1`.
pub fn check_super_independence(
    s1: &Subalgebra,
    s0: &Subalgebra,
    s2: &Subalgebra,
    mode: IndepMode,
) -> Result<bool> {
    check_designations(s1, s0, s2)?;
    let forward = interpolates(s1, s0, s2);
    Ok(match mode {
        IndepMode::Conjunction => forward && interpolates(s2, s0, s1),
        IndepMode::Disjunction => forward || interpolates(s2, s0, s1),
    })
}

fn check_designations(s1: &Subalgebra, s0: &Subalgebra, s2: &Subalgebra) -> Result<()> {
    let parent = s0.parent();
    if !same_algebra(parent, s1.parent()) || !same_algebra(parent, s2.parent()) {
        return Err(Error::Mismatch("subalgebras of different algebras".into()));
    }
    if !s0.is_contained_in(s1) || !s0.is_contained_in(s2) {
        return Err(Error::NotSubalgebra("the base is not contained in both sides".into()));
    }
    Ok(())
}

fn interpolates(from: &Subalgebra, base: &Subalgebra, to: &Subalgebra) -> bool {
    let q = from.quotient();
    let dual = from.algebra().dual();
    (0..from.dual_size()).all(|c| {
        let p = dual.up(c).preimage(q);
        base.saturate(&p).is_subset(&to.saturate(&p))
    })
}

/// The interpolation condition by scanning all cross pairs of elements.
/// Quadratic in the subalgebra sizes; an independent check of
/// [`check_super_independence`].
pub fn super_independence_by_pairs(
    s1: &Subalgebra,
    s0: &Subalgebra,
    s2: &Subalgebra,
    mode: IndepMode,
) -> Result<bool> {
    check_designations(s1, s0, s2)?;
    let (e1, e0, e2) = (s1.elements(), s0.elements(), s2.elements());
    let dir = |xs: &[PointSet], ys: &[PointSet]| {
        xs.iter().all(|a| {
            ys.iter().all(|b| {
                !a.is_subset(b) || e0.iter().any(|c| a.is_subset(c) && c.is_subset(b))
            })
        })
    };
    let forward = dir(&e1, &e2);
    Ok(match mode {
        IndepMode::Conjunction => forward && dir(&e2, &e1),
        IndepMode::Disjunction => forward || dir(&e2, &e1),
    })
}

/// The independence relation on finite sets of elements:
/// `S1 ⫝_{S0} S2` iff `⟨S1 S0⟩` and `⟨S0 S2⟩` interpolate over `⟨S0⟩`.
pub fn finite_subset_independence(
    a: &Arc<HeytingAlgebra>,
    s1: &[PointSet],
    s0: &[PointSet],
    s2: &[PointSet],
    mode: IndepMode,
) -> Result<bool> {
    let join = |x: &[PointSet], y: &[PointSet]| -> Vec<PointSet> { x.iter().chain(y).cloned().collect() };
    let g1 = Subalgebra::generated(a, &join(s1, s0))?;
    let g0 = Subalgebra::generated(a, s0)?;
    let g2 = Subalgebra::generated(a, &join(s0, s2))?;
    check_super_independence(&g1, &g0, &g2, mode)
}

/// A copy of `A2` realized independently from `A1` over `A0`.
#[derive(Clone, Debug)]
pub struct Realization {
    pub amalgam: LowerAmalgam,
    pub completion: Completion,
}

impl Realization {
    pub fn e2(&self) -> &AlgebraMap {
        self.completion.e2()
    }

    /// Re-checks the output: `e2` is an embedding agreeing with `e1` on
    /// `A0`, and the image of `A2` is independent from `A1` over `A0`.
    pub fn verify(&self, mode: IndepMode) -> Result<bool> {
        let (s1, s0, s2) = self.completion.images(&self.amalgam);
        let agrees = self.amalgam.i1().then(self.completion.e1())?.dual()
            == self.amalgam.i2().then(self.completion.e2())?.dual();
        let a = self.completion.algebra();
        let indep = finite_subset_independence(a, s1.generators(), s0.generators(), s2.generators(), mode)?;
        Ok(agrees && self.e2().is_embedding() && indep)
    }
}

/// Realizes the diagram of `A2 ⊇ A0` (given as the embedding `diagram`)
/// independently from `A1` over `A0` (given as `base: A0 → A1`).
pub fn independent_realization(
    base: &AlgebraMap,
    diagram: &AlgebraMap,
    opts: &CompletionOptions,
) -> Result<Realization> {
    let amalgam = LowerAmalgam::new(base.clone(), diagram.clone())?;
    let completion = complete_superamalgam(&amalgam, opts)?;
    Ok(Realization { amalgam, completion })
}

/// Serializable summary of a completion: algebra sizes, the image of each
/// side as element indices of the completion, and the certificate.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CompletionSummary {
    pub dual_size: usize,
    pub size: Option<usize>,
    pub e1_image: Option<Vec<usize>>,
    pub e2_image: Option<Vec<usize>>,
    pub strategy: Strategy,
    pub certificate: Certificate,
}

/// Algebras larger than this are summarized without element tables.
pub const SUMMARY_ELEMENT_CAP: usize = 4096;

impl Completion {
    pub fn summary(&self) -> CompletionSummary {
        let size = self.algebra.size_up_to(SUMMARY_ELEMENT_CAP);
        let image = |m: &AlgebraMap| size.map(|_| m.element_table());
        CompletionSummary {
            dual_size: self.algebra.dual_size(),
            size,
            e1_image: image(&self.e1),
            e2_image: image(&self.e2),
            strategy: self.strategy,
            certificate: self.certificate,
        }
    }
}

/// Every lower amalgam over algebras whose duals come from `duals`, one per
/// choice of `A0, A1, A2` and pair of embeddings.
pub fn all_amalgams(duals: &[Arc<FinitePoset>]) -> Vec<LowerAmalgam> {
    let algebras: Vec<Arc<HeytingAlgebra>> =
        duals.iter().map(|p| Arc::new(HeytingAlgebra::from_poset(p.clone()))).collect();
    let mut embeddings: BTreeMap<(usize, usize), Vec<AlgebraMap>> = BTreeMap::new();
    for (i, b) in algebras.iter().enumerate() {
        for (j, a) in algebras.iter().enumerate() {
            embeddings.insert((i, j), crate::heyting::enumerate_embeddings(b, a));
        }
    }
    let mut out = Vec::new();
    for i0 in 0..algebras.len() {
        for i1 in 0..algebras.len() {
            for i2 in 0..algebras.len() {
                for l1 in &embeddings[&(i0, i1)] {
                    for l2 in &embeddings[&(i0, i2)] {
                        out.push(LowerAmalgam { i1: l1.clone(), i2: l2.clone() });
                    }
                }
            }
        }
    }
    out
}
