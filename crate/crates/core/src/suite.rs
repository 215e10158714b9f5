//! The invariant suite behind `check`: every module's properties over a
//! small exhaustive corpus, gathered into one deterministic report.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::amalgam::{
    all_amalgams, check_super_independence, complete_superamalgam, finite_subset_independence,
    independent_realization, normalize, CompletionOptions, IndepMode, Strategy,
};
use crate::error::{Error, Result};
use crate::group::{act, automorphism_group, eppa_refute, wei_demo, EppaVerdict};
use crate::heyting::{
    boolean_envelope, dual_poset, enumerate_embeddings, qf_type_equal, skeletal_check, translate_star,
    HeytingAlgebra, InteriorAlgebra, PartialIso, Subalgebra, Term,
};
use crate::limit::{
    build_chain, split_nested, split_upset, swap_witness, trans_tree, StepKind, DEFAULT_SWAP_BUDGET,
};
use crate::pointset::PointSet;
use crate::poset::{
    are_isomorphic, connected_components, duplicate_upset_extension, enumerate_posets, is_p_morphism,
    pullback_raw, Catalog, FinitePoset, DEFAULT_POSET_BOUND,
};
use crate::report::{Report, Verdict};

/// Known numbers of posets on `1..=7` unlabeled points.
const POSET_COUNTS: [usize; 7] = [1, 2, 5, 16, 63, 318, 2045];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    #[default]
    Quick,
    Full,
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(Error::InvalidArgument(format!("unknown level {s:?}"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Quick => "quick",
            Level::Full => "full",
        })
    }
}

/// Sizes used by one suite run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteBounds {
    /// Dual size of the poset corpus.
    pub posets: usize,
    pub chain_steps: usize,
    pub tree_depth: usize,
    /// Dual size of the algebras in exhaustive amalgam and embedding scans.
    pub amalgam_dual: usize,
    pub chain_catalog: usize,
    pub eppa: usize,
}

impl Level {
    pub fn bounds(self) -> SuiteBounds {
        match self {
            Level::Quick => SuiteBounds {
                posets: 4,
                chain_steps: 4,
                tree_depth: 2,
                amalgam_dual: 2,
                chain_catalog: 2,
                eppa: 4,
            },
            Level::Full => SuiteBounds {
                posets: 5,
                chain_steps: 9,
                tree_depth: 3,
                amalgam_dual: 3,
                chain_catalog: 2,
                eppa: 6,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SuiteOptions {
    pub level: Level,
    pub seed: u64,
    pub mode: IndepMode,
    /// Adds the non-skeletal fixture to the algebras that must pass the
    /// skeletal check.
    pub inject_fault: bool,
}

fn algebras(catalog: &Catalog, max: usize) -> Vec<Arc<HeytingAlgebra>> {
    catalog
        .iter()
        .filter(|p| p.size() <= max)
        .map(|p| Arc::new(HeytingAlgebra::from_poset(p.clone())))
        .collect()
}

fn count_failures<T>(items: impl IntoIterator<Item = T>, ok: impl Fn(&T) -> bool) -> (usize, usize) {
    let mut n = 0;
    let mut bad = 0;
    for it in items {
        n += 1;
        if !ok(&it) {
            bad += 1;
        }
    }
    (n, bad)
}

fn tally(r: &mut Report, claim: &str, (n, bad): (usize, usize)) {
    r.check(claim, bad == 0 && n > 0, Some(format!("{n} cases, {bad} failures")));
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn go(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            go(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    go(0, &mut cur, &mut out);
    out
}

fn is_iso(p: &FinitePoset, q: &FinitePoset, f: &[usize]) -> bool {
    (0..p.size()).all(|x| (0..p.size()).all(|y| p.le(x, y) == q.le(f[x], f[y])))
}

fn poset_section(r: &mut Report, b: &SuiteBounds, catalog: &Catalog) {
    let counts = catalog.counts();
    r.check(
        format!("poset: class counts up to {} points", b.posets),
        counts == POSET_COUNTS[..b.posets],
        Some(format!("{counts:?}")),
    );
    tally(
        r,
        "poset: up-sets form a bounded distributive lattice",
        count_failures(catalog.iter(), |p| {
            let ups = p.up_sets();
            let has = |s: &PointSet| ups.binary_search(s).is_ok() || ups.contains(s);
            has(&p.empty_set())
                && has(&p.full_set())
                && ups.iter().all(|u| ups.iter().all(|v| has(&u.union(v)) && has(&u.intersection(v))))
        }),
    );
    tally(
        r,
        "poset: duplicated up-sets fall into at least two components",
        count_failures(
            catalog.iter().flat_map(|p| p.up_sets().into_iter().filter(|y| !y.is_empty()).map(move |y| (p, y))),
            |(p, y)| match duplicate_upset_extension(p, y) {
                Ok((ext, f)) => {
                    let (sub, _) = ext.induced(&f.preimage(y));
                    f.is_p_morphism() && f.is_surjective() && connected_components(&sub).len() >= 2
                }
                Err(_) => false,
            },
        ),
    );
    let small = b.posets.min(5);
    let perms: Vec<Vec<Vec<usize>>> = (0..=small).map(permutations).collect();
    let pairs: Vec<(&Arc<FinitePoset>, &Arc<FinitePoset>)> = catalog
        .iter()
        .filter(|p| p.size() <= small)
        .flat_map(|p| catalog.of_size(p.size()).iter().map(move |q| (p, q)))
        .collect();
    tally(
        r,
        "poset: isomorphism test agrees with exhaustive search",
        count_failures(pairs, |(p, q)| {
            let brute = perms[p.size()].iter().any(|f| is_iso(p, q, f));
            match are_isomorphic(p, q) {
                Some(f) => brute && is_iso(p, q, &f),
                None => !brute,
            }
        }),
    );
    tally(
        r,
        "poset: relabelled copies are recognised",
        count_failures(catalog.iter(), |p| {
            let rev: Vec<usize> = (0..p.size()).rev().collect();
            let q = p.permuted(&rev);
            are_isomorphic(p, &q).is_some_and(|f| is_iso(p, &q, &f)) && are_isomorphic(&q, p).is_some()
        }),
    );
}

fn heyting_section(r: &mut Report, b: &SuiteBounds, catalog: &Catalog, inject_fault: bool) -> Result<()> {
    let all = algebras(catalog, b.posets);
    tally(
        r,
        "heyting: lattice laws and residuation hold exhaustively",
        count_failures(&all, |a| a.tables().validate().is_ok()),
    );
    tally(
        r,
        "heyting: dual of the algebra is the original poset",
        count_failures(&all, |a| are_isomorphic(&dual_poset(a), a.dual()).is_some()),
    );
    tally(
        r,
        "heyting: algebra of the dual is the original algebra",
        count_failures(&all, |a| a.tables().to_algebra().is_ok_and(|(c, _)| c.size() == a.size())),
    );
    let small = algebras(catalog, b.amalgam_dual);
    let mut maps = 0;
    let mut bad = 0;
    for x in &small {
        for y in &small {
            for e in enumerate_embeddings(x, y) {
                maps += 1;
                if !(e.verify_by_tables() && e.is_embedding()) {
                    bad += 1;
                }
            }
        }
    }
    tally(r, "heyting: embeddings re-check as injective homomorphisms", (maps, bad));
    let (mut n, mut bad) = (0, 0);
    for a in &small {
        let els = a.elements();
        let g = automorphism_group(a);
        let q = |x: &PointSet, y: &PointSet| qf_type_equal(a, std::slice::from_ref(x), std::slice::from_ref(y)).unwrap_or(false);
        for x in els {
            for y in els {
                n += 1;
                let xy = q(x, y);
                let mut ok = q(x, x) && xy == q(y, x);
                if xy {
                    ok &= els.iter().all(|z| !q(y, z) || q(x, z));
                }
                ok &= g.elements().iter().all(|h| q(&act(h, x), &act(h, y)) == xy);
                if !ok {
                    bad += 1;
                }
            }
        }
    }
    tally(r, "heyting: quantifier-free type equality is an invariant equivalence", (n, bad));
    let mut envelopes = Vec::new();
    for a in &all {
        envelopes.push(boolean_envelope(a)?);
    }
    tally(
        r,
        "heyting: envelope interior is intensive, idempotent and preserves meets and top",
        count_failures(&envelopes, |i| i.check_axioms().all_hold()),
    );
    let mut fixtures: Vec<InteriorAlgebra> = envelopes;
    if inject_fault {
        fixtures.push(InteriorAlgebra::non_skeletal_fixture());
    }
    tally(r, "heyting: skeletal check passes on every fixture", count_failures(&fixtures, |i| skeletal_check(i)));
    r.check(
        "heyting: non-skeletal control is rejected",
        !skeletal_check(&InteriorAlgebra::non_skeletal_fixture()),
        None,
    );
    let a = Term::var("a");
    let star = |src: &str, want: &str| -> bool {
        match (Term::parse(src), Term::parse(want)) {
            (Ok(t), Ok(w)) => translate_star(&t, &a).is_ok_and(|s| s == w),
            _ => false,
        }
    };
    r.check(
        "heyting: translation sends 1 to a and negations under a",
        star("1", "a") && star("(not x)", "(and (not x) a)") && star("(and x y)", "(and x y)"),
        None,
    );
    r.check(
        "heyting: translation rejects the interior operator",
        Term::parse("(int x)").is_ok_and(|t| translate_star(&t, &a).is_err()),
        None,
    );
    Ok(())
}

fn amalgam_section(r: &mut Report, b: &SuiteBounds, catalog: &Catalog, mode: IndepMode) -> Result<()> {
    let duals: Vec<Arc<FinitePoset>> = catalog.iter().filter(|p| p.size() <= b.amalgam_dual).cloned().collect();
    let corpus = all_amalgams(&duals);
    let opts = CompletionOptions { mode, ..CompletionOptions::default() };
    let (mut certified, mut fallbacks, mut exhausted, mut pull_bad, mut not_normal) = (0, 0, 0, 0, 0);
    for d in &corpus {
        let (f1, f2) = (d.i1().dual(), d.i2().dual());
        let (x, p1, p2) = pullback_raw(d.a1().dual(), f1, d.a2().dual(), f2);
        let square = (0..x.size()).all(|z| f1[p1[z]] == f2[p2[z]]);
        if !(square
            && is_p_morphism(&x, d.a1().dual(), &p1)
            && is_p_morphism(&x, d.a2().dual(), &p2)
            && crate::poset::is_surjective(&p1, d.a1().dual_size())
            && crate::poset::is_surjective(&p2, d.a2().dual_size()))
        {
            pull_bad += 1;
        }
        if !normalize(d).is_normal() {
            not_normal += 1;
        }
        match complete_superamalgam(d, &opts) {
            Ok(c) => {
                if c.certificate().all_true() {
                    certified += 1;
                }
                if matches!(c.strategy(), Strategy::Fallback { .. }) {
                    fallbacks += 1;
                }
            }
            Err(_) => exhausted += 1,
        }
    }
    let n = corpus.len();
    tally(r, "poset: pullback projections are surjective p-morphisms over a commuting square", (n, pull_bad));
    tally(r, "amalgam: normal forms have A0 as the intersection", (n, not_normal));
    r.check(
        format!("amalgam: every amalgam up to dual size {} completes with a full certificate", b.amalgam_dual),
        certified == n && exhausted == 0,
        Some(format!("{n} amalgams, {certified} certified, {fallbacks} by fallback, {exhausted} exhausted")),
    );

    let c4 = HeytingAlgebra::chain(4);
    let (ea, eb) = (c4.element(1).clone(), c4.element(2).clone());
    let s1 = Subalgebra::generated(&c4, std::slice::from_ref(&ea))?;
    let s0 = Subalgebra::generated(&c4, &[])?;
    let s2 = Subalgebra::generated(&c4, std::slice::from_ref(&eb))?;
    let conj = check_super_independence(&s1, &s0, &s2, IndepMode::Conjunction)?;
    let disj = check_super_independence(&s1, &s0, &s2, IndepMode::Disjunction)?;
    r.check(
        "amalgam: a and b in the 4-chain are not independent over {0,1}",
        !conj,
        Some(format!("conjunction {conj}, disjunction {disj}")),
    );

    let small = algebras(catalog, b.amalgam_dual.max(3));
    let (mut inv_n, mut inv_bad, mut mono_n, mut mono_bad) = (0, 0, 0, 0);
    for a in &small {
        let g = automorphism_group(a);
        let els = a.elements();
        for c in els {
            for x in els {
                for y in els {
                    let v = finite_subset_independence(a, std::slice::from_ref(x), std::slice::from_ref(c), std::slice::from_ref(y), mode)?;
                    inv_n += 1;
                    for h in g.elements() {
                        let w = finite_subset_independence(a, &[act(h, x)], &[act(h, c)], &[act(h, y)], mode)?;
                        if w != v {
                            inv_bad += 1;
                            break;
                        }
                    }
                    if v {
                        let sub = Subalgebra::generated(a, &[c.clone(), y.clone()])?;
                        for z in sub.elements() {
                            mono_n += 1;
                            if !finite_subset_independence(a, std::slice::from_ref(x), std::slice::from_ref(c), &[z], mode)? {
                                mono_bad += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    tally(r, "amalgam: independence is invariant under automorphisms", (inv_n, inv_bad));
    tally(r, "amalgam: independence is monotone in the right-hand side", (mono_n, mono_bad));

    let (mut st_n, mut st_bad) = (0, 0);
    for d in corpus.iter().filter(|d| d.a1().dual_size() <= 2 && d.a2().dual_size() <= 2) {
        st_n += 1;
        let one = independent_realization(d.i1(), d.i2(), &opts)?;
        let two = independent_realization(d.i1(), d.i2(), &opts)?;
        if !(one.verify(mode)? && two.verify(mode)? && realizations_agree(&one, &two)?) {
            st_bad += 1;
        }
    }
    tally(r, "amalgam: independent realizations have one type over A1", (st_n, st_bad));
    Ok(())
}

/// Embeds both completions into their pullback over `A1` and compares the
/// two images of `A1 ∪ A2` there.
fn realizations_agree(one: &crate::amalgam::Realization, two: &crate::amalgam::Realization) -> Result<bool> {
    let (c1, c2) = (&one.completion, &two.completion);
    let (x, p1, p2) = pullback_raw(c1.algebra().dual(), c1.e1().dual(), c2.algebra().dual(), c2.e1().dual());
    let common = HeytingAlgebra::from_poset_arc(x);
    let l1 = crate::heyting::AlgebraMap::from_dual(c1.algebra().clone(), common.clone(), p1)?;
    let l2 = crate::heyting::AlgebraMap::from_dual(c2.algebra().clone(), common.clone(), p2)?;
    let a1 = one.amalgam.a1().elements();
    let a2 = one.amalgam.a2().elements();
    let tuple = |c: &crate::amalgam::Completion, l: &crate::heyting::AlgebraMap| -> Vec<PointSet> {
        a1.iter()
            .map(|e| l.apply(&c.e1().apply(e)))
            .chain(a2.iter().map(|e| l.apply(&c.e2().apply(e))))
            .collect()
    };
    qf_type_equal(&common, &tuple(c1, &l1), &tuple(c2, &l2))
}

fn limit_section(r: &mut Report, b: &SuiteBounds, catalog: &Catalog, seed: u64) -> Result<()> {
    let chain = build_chain(b.chain_steps, b.chain_catalog, seed)?;
    let links_ok = chain.stages[1..].iter().all(|s| s.link.as_ref().is_some_and(|l| l.is_embedding()))
        && chain.link_between(0, chain.stages.len() - 1)?.is_embedding();
    r.check(
        format!("limit: chain of {} steps links by embeddings", b.chain_steps),
        links_ok,
        Some(format!("dual sizes {:?}", chain.stages.iter().map(|s| s.algebra.dual_size()).collect::<Vec<_>>())),
    );
    let universality_ok = chain.stages.iter().all(|s| match s.log.step {
        StepKind::Universality { item, .. } => {
            !enumerate_embeddings(&chain.catalog.algebras[item], &s.algebra).is_empty()
        }
        _ => true,
    });
    r.check("limit: every universality step is witnessed by an embedding", universality_ok, None);
    let mut total = 0;
    let mut monotone = true;
    for s in &chain.stages {
        let now = total + s.log.discharged.len();
        monotone &= now >= total;
        total = now;
    }
    r.check("limit: discharge log never regresses", monotone, Some(format!("{total} discharged")));

    let depth = b.tree_depth;
    let tree = trans_tree(depth)?;
    r.check(
        format!("limit: tree of depth {depth} has {} labels", 1usize << depth),
        tree.labels.len() == 1 << depth,
        Some(format!("{} labels", tree.labels.len())),
    );
    let incoherent = tree.coherence_failures();
    r.check("limit: tree maps extend their prefixes", incoherent.is_empty(), incoherent.first().cloned());
    r.check(
        "limit: images of the marked point are pairwise distinct",
        tree.images_distinct(),
        Some(format!("final stage dual size {}", tree.stage.dual_size())),
    );

    let mut cases = Vec::new();
    for p in catalog.iter() {
        let stage = Arc::new(HeytingAlgebra::from_poset(p.clone()));
        for y in p.up_sets().into_iter().filter(|y| !y.is_empty()) {
            cases.push((stage.clone(), y));
        }
    }
    tally(
        r,
        "limit: every nonempty up-set splits with a certificate",
        count_failures(&cases, |(s, y)| split_upset(s, y).is_ok_and(|sp| sp.certify().all_true())),
    );
    tally(
        r,
        "limit: three nested splits certify",
        count_failures(catalog.iter(), |p| {
            let stage = Arc::new(HeytingAlgebra::from_poset(Arc::clone(p)));
            split_nested(&stage, &stage.top(), 3)
                .is_ok_and(|v| v.len() == 3 && v.iter().all(|sp| sp.certify().all_true()))
        }),
    );

    let grid = HeytingAlgebra::from_poset_arc(FinitePoset::chain(2).product(&FinitePoset::chain(2)));
    let v = PointSet::from_points(4, [1, 3]);
    let grid_ok = swap_witness(&grid, &grid.top(), Some(&v), DEFAULT_SWAP_BUDGET).is_ok_and(|w| w.verify());
    let six = six_element_completion()?;
    let (stage, u, v) = &six;
    let six_ok = swap_witness(stage, &stage.top(), Some(u), DEFAULT_SWAP_BUDGET)
        .is_ok_and(|w| w.verify() && w.v_prime == *v);
    r.check("limit: swap witnesses on the grid and the six-element completion", grid_ok && six_ok, None);
    Ok(())
}

/// The completion of two 3-chains over the 2-element algebra, with the two
/// middle elements.
pub fn six_element_completion() -> Result<(Arc<HeytingAlgebra>, PointSet, PointSet)> {
    let two = HeytingAlgebra::two();
    let c3 = HeytingAlgebra::chain(3);
    let leg = enumerate_embeddings(&two, &c3).swap_remove(0);
    let d = crate::amalgam::LowerAmalgam::new(leg.clone(), leg)?;
    let c = complete_superamalgam(&d, &CompletionOptions::default())?;
    let u = c.e1().apply(c3.element(1));
    let v = c.e2().apply(c3.element(1));
    Ok((c.algebra().clone(), u, v))
}

/// The 4-chain map `a ↦ b` and the atom transposition of the 8-element
/// Boolean algebra.
pub fn eppa_fixtures() -> Result<[(Arc<HeytingAlgebra>, PartialIso); 2]> {
    let c4 = HeytingAlgebra::chain(4);
    let shift = PartialIso::from_tuples(&c4, &[c4.element(1).clone()], &[c4.element(2).clone()])?
        .ok_or_else(|| Error::NotIsomorphic("a and b".into()))?;
    let b8 = HeytingAlgebra::boolean(3);
    let (x, y) = (b8.principal(0), b8.principal(1));
    let swap = PartialIso::from_tuples(&b8, &[x.clone(), y.clone()], &[y, x])?
        .ok_or_else(|| Error::NotIsomorphic("two atoms".into()))?;
    Ok([(c4, shift), (b8, swap)])
}

fn group_section(r: &mut Report, b: &SuiteBounds, catalog: &Catalog) -> Result<()> {
    let small = algebras(catalog, b.posets.min(4));
    tally(
        r,
        "group: automorphism groups agree with the table search and are closed",
        count_failures(&small, |a| {
            let g = automorphism_group(a);
            g.cross_check() && g.is_closed()
        }),
    );
    let [(c4, shift), (b8, swap)] = eppa_fixtures()?;
    let neg = eppa_refute(&c4, &shift, b.eppa)?;
    r.check(
        format!("group: a to b in the 4-chain has no finite extension (search to {})", b.eppa),
        neg.verdict == EppaVerdict::RefutedForAllSizes && neg.witness_count == 0 && neg.consistent,
        Some(format!("{} embeddings searched", neg.embeddings_checked)),
    );
    let pos = eppa_refute(&b8, &swap, b.eppa.min(4))?;
    r.check(
        "group: the atom transposition extends",
        pos.verdict == EppaVerdict::Extends,
        Some(format!("{} witnesses", pos.witness_count)),
    );
    let wei = wei_demo()?;
    let caveat = wei.claims.iter().any(|c| c.verdict == Verdict::Caveat);
    r.check(
        "group: the 8-element Boolean demonstrator passes with its caveat",
        wei.passed() && caveat,
        wei.failures().next().map(|c| c.claim.clone()),
    );
    Ok(())
}

/// Runs every section. The report contains no timings, so equal options
/// give byte-identical renderings.
pub fn check_suite(opts: &SuiteOptions) -> Result<Report> {
    let b = opts.level.bounds();
    let mut r = Report::new(format!(
        "check level={} seed={} mode={}{}",
        opts.level,
        opts.seed,
        opts.mode,
        if opts.inject_fault { " fault=skeletal" } else { "" }
    ));
    let catalog = enumerate_posets(b.posets, DEFAULT_POSET_BOUND)?;
    poset_section(&mut r, &b, &catalog);
    heyting_section(&mut r, &b, &catalog, opts.inject_fault)?;
    amalgam_section(&mut r, &b, &catalog, opts.mode)?;
    limit_section(&mut r, &b, &catalog, opts.seed)?;
    group_section(&mut r, &b, &catalog)?;
    Ok(r)
}
