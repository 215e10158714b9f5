use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::extend::{extend_backwards, extend_partial_automorphism, Extension, IN_STAGE_SEARCH_LIMIT};
use crate::amalgam::{finite_subset_independence, independent_realization, CompletionOptions, IndepMode};
use crate::error::{Error, Result};
use crate::heyting::{AlgebraMap, HeytingAlgebra, PartialIso, Subalgebra};
use crate::pointset::PointSet;
use crate::poset::duplicate_upset_extension;

/// A partial isomorphism kept as the pair of tuples that determines it, so
/// it can be carried along stage changes cheaply.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Tuples {
    s: Vec<PointSet>,
    t: Vec<PointSet>,
}

impl Tuples {
    fn of(p: &PartialIso) -> Self {
        Tuples { s: p.dom_gens().to_vec(), t: p.cod_gens().to_vec() }
    }

    fn realize(&self, stage: &Arc<HeytingAlgebra>) -> Result<PartialIso> {
        PartialIso::from_tuples(stage, &self.s, &self.t)?
            .ok_or_else(|| Error::NotIsomorphic("tracked tuples lost their type".into()))
    }
}

/// Elements chosen at one level of the tree, in the final stage.
#[derive(Clone, Debug)]
pub struct TreeLevel {
    pub b0: PointSet,
    pub b1: PointSet,
    pub d: PointSet,
    pub r: PointSet,
    /// `b1` is independent from `b0` over the previous generators.
    pub independent: bool,
}

/// The data attached to one branch `ρ` of the tree, in the final stage.
#[derive(Clone, Debug)]
pub struct TreeLabel {
    pub rho: String,
    pub sigma: PartialIso,
    /// The forth extension of `σ^ρ` by the level's `d`.
    pub forth: PartialIso,
    /// The back extension of `forth` by the level's `r`.
    pub back: PartialIso,
    /// Image of each marked point, as a point of the dual of `cod σ^ρ`.
    pub image: Vec<usize>,
    /// The least point of the final stage lying over each image.
    pub point: Vec<usize>,
}

/// A separating element for two branches: it lies in both codomains and in
/// the image filters of every marked point along one branch but of none
/// along the other.
#[derive(Clone, Debug, Serialize)]
pub struct Separation {
    pub left: String,
    pub right: String,
    pub witness: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TransTree {
    pub stage: Arc<HeytingAlgebra>,
    /// Marked points, carried into the final stage.
    pub marked: Vec<usize>,
    pub levels: Vec<TreeLevel>,
    /// Labels for every branch of full depth.
    pub labels: BTreeMap<String, TreeLabel>,
    /// `σ^ρ` for every nonempty prefix, for the coherence check.
    pub history: BTreeMap<String, PartialIso>,
    /// Dual size of the stage after each growth or pruning.
    pub stage_sizes: Vec<usize>,
}

impl TransTree {
    /// Pairs `(ρ', ρ)` with `ρ'` a one-shorter prefix of `ρ` where `σ^ρ`
    /// fails to extend `σ^ρ'`, plus labels whose forth and back maps fail to
    /// extend their `σ`.
    pub fn coherence_failures(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (rho, s) in &self.history {
            if rho.len() > 1 {
                let parent = &self.history[&rho[..rho.len() - 1]];
                if !s.extends(parent) {
                    bad.push(format!("{} does not extend {}", rho, &rho[..rho.len() - 1]));
                }
            }
        }
        for (rho, l) in &self.labels {
            if !l.forth.extends(&l.sigma) || !l.back.extends(&l.forth) {
                bad.push(format!("extensions of {rho} are not coherent"));
            }
        }
        bad
    }

    /// A separating element for every pair of full-depth labels, or the
    /// first pair without one.
    pub fn separations(&self) -> std::result::Result<Vec<Separation>, (String, String)> {
        let keys: Vec<&String> = self.labels.keys().collect();
        let mut out = Vec::new();
        for (i, &l) in keys.iter().enumerate() {
            for &r in &keys[i + 1..] {
                match separate(&self.marked, &self.labels[l].sigma, &self.labels[r].sigma) {
                    Some(w) => out.push(Separation { left: l.clone(), right: r.clone(), witness: w.to_vec() }),
                    None => return Err((l.clone(), r.clone())),
                }
            }
        }
        Ok(out)
    }

    /// Every pair of labels is separated, and the representative image
    /// points differ. Separation makes any choice of representatives differ.
    pub fn images_distinct(&self) -> bool {
        let mut seen: Vec<&Vec<usize>> = self.labels.values().map(|l| &l.point).collect();
        seen.sort();
        seen.dedup();
        self.separations().is_ok() && seen.len() == self.labels.len()
    }
}

fn memberships(marked: &[usize], s: &PartialIso, w: &PointSet) -> Option<Vec<bool>> {
    let pre = s.inverse().apply(w)?;
    let mut v: Vec<bool> = marked.iter().map(|&y| pre.contains(y)).collect();
    v.sort_unstable();
    v.dedup();
    Some(v)
}

fn separate(marked: &[usize], a: &PartialIso, b: &PartialIso) -> Option<PointSet> {
    a.cod_gens().iter().chain(b.cod_gens()).find(|w| {
        match (memberships(marked, a, w), memberships(marked, b, w)) {
            (Some(x), Some(y)) => x != y,
            _ => false,
        }
    })
    .cloned()
}

struct Tracker {
    stage: Arc<HeytingAlgebra>,
    marked: Vec<usize>,
    gens: Vec<PointSet>,
    levels: Vec<[PointSet; 4]>,
    maps: BTreeMap<String, Tuples>,
    sizes: Vec<usize>,
}

impl Tracker {
    fn all_elements(&self) -> Vec<PointSet> {
        let mut all = self.gens.clone();
        for l in &self.levels {
            all.extend(l.iter().filter(|e| e.universe() == self.stage.dual_size()).cloned());
        }
        for t in self.maps.values() {
            all.extend(t.s.iter().cloned());
            all.extend(t.t.iter().cloned());
        }
        all
    }

    fn map_all(&mut self, f: impl Fn(&PointSet) -> PointSet) {
        for g in &mut self.gens {
            *g = f(g);
        }
        for l in &mut self.levels {
            for e in l.iter_mut() {
                if e.universe() > 0 {
                    *e = f(e);
                }
            }
        }
        for t in self.maps.values_mut() {
            t.s = t.s.iter().map(&f).collect();
            t.t = t.t.iter().map(&f).collect();
        }
    }

    /// Moves everything along an embedding. Marked points go to `chosen`
    /// when given and to their first preimage otherwise.
    fn advance(&mut self, link: &AlgebraMap, chosen: Option<Vec<usize>>) {
        let dual = link.dual();
        self.marked = chosen.unwrap_or_else(|| {
            self.marked
                .iter()
                .map(|&y| dual.iter().position(|&z| z == y).expect("surjective"))
                .collect()
        });
        self.map_all(|e| link.apply(e));
        self.stage = link.cod().clone();
        self.sizes.push(self.stage.dual_size());
    }

    /// Replaces the stage by the subalgebra generated by everything tracked.
    fn prune(&mut self) -> Result<()> {
        let sub = Subalgebra::generated(&self.stage, &self.all_elements())?;
        if sub.dual_size() == self.stage.dual_size() {
            return Ok(());
        }
        let q = sub.quotient().to_vec();
        self.marked = self.marked.iter().map(|&y| q[y]).collect();
        self.map_all(|e| sub.lower(e).expect("tracked element"));
        self.stage = sub.algebra().clone();
        self.sizes.push(self.stage.dual_size());
        Ok(())
    }

    fn absorb(&mut self, ext: Extension, key: String) -> Result<()> {
        if let Some(link) = &ext.link {
            self.advance(link, None);
        }
        self.maps.insert(key, Tuples::of(&ext.map));
        if ext.link.is_some() {
            self.prune()?;
        }
        Ok(())
    }

    fn realize(&self, key: &str) -> Result<PartialIso> {
        self.maps[key].realize(&self.stage)
    }

    /// First element outside `sub` passing `ok`, in canonical order when the
    /// stage is small enough to list, among principal up-sets otherwise.
    fn first_outside(&self, sub: &Subalgebra, ok: impl Fn(&PointSet) -> bool) -> Option<PointSet> {
        if self.stage.size_up_to(IN_STAGE_SEARCH_LIMIT).is_some() {
            return self.stage.elements().iter().find(|e| !sub.contains(e) && ok(e)).cloned();
        }
        (0..self.stage.dual_size())
            .map(|x| self.stage.principal(x))
            .filter(|e| !sub.contains(e) && ok(e))
            .min()
    }

    /// Grows the stage by a fresh copy of `y` and returns the original `y`
    /// in the new stage.
    fn duplicate(&mut self, y: &PointSet) -> Result<PointSet> {
        let (ext, f) = duplicate_upset_extension(self.stage.dual(), y)?;
        let n = ext.size();
        let grown = Arc::new(HeytingAlgebra::from_poset(ext));
        let link = AlgebraMap::from_dual(self.stage.clone(), grown, f.image().to_vec())?;
        self.advance(&link, None);
        Ok(PointSet::from_points(n, y.iter()))
    }
}

/// Builds the binary tree of partial isomorphisms for `depth` levels,
/// starting from the 4-element chain, whose marked point is the prime
/// filter generated by its least nonzero element.
pub fn trans_tree(depth: usize) -> Result<TransTree> {
    let c4 = HeytingAlgebra::chain(4);
    let a = c4.element(1).clone();
    let y = (0..c4.dual_size()).find(|&x| c4.principal(x) == a).expect("principal");
    trans_tree_from(&c4, &[y], depth)
}

/// [`trans_tree`] from any stage and any nonempty set of marked points.
/// Several marked points are moved together: each `b⁰` contains all of them
/// and the marked points are lifted outside each `b¹`.
pub fn trans_tree_from(stage: &Arc<HeytingAlgebra>, marked: &[usize], depth: usize) -> Result<TransTree> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if marked.is_empty() || marked.iter().any(|&y| y >= stage.dual_size()) {
        return Err(Error::InvalidArgument("marked points must be points of the dual".into()));
    }
    let mut tr = Tracker {
        stage: stage.clone(),
        marked: marked.to_vec(),
        gens: Vec::new(),
        levels: Vec::new(),
        maps: BTreeMap::new(),
        sizes: vec![stage.dual_size()],
    };
    tr.maps.insert("pi:".into(), Tuples { s: Vec::new(), t: Vec::new() });
    let mut frontier: Vec<String> = vec![String::new()];
    let mut independent = Vec::new();
    let none = PointSet::empty(0);
    for _level in 0..depth {
        // b⁰: contains every marked point, lies outside ⟨G⟩, and each marked
        // point shares its ⟨G⟩-class with some point outside b⁰
        let gsub = Subalgebra::generated(&tr.stage, &tr.gens)?;
        let q = gsub.quotient().to_vec();
        let marked = tr.marked.clone();
        let n = tr.stage.dual_size();
        let fits = |c: &PointSet| {
            marked.iter().all(|&y| c.contains(y) && (0..n).any(|x| q[x] == q[y] && !c.contains(x)))
        };
        let b0 = match tr.first_outside(&gsub, fits) {
            Some(b) => b,
            None => {
                let up = tr.stage.dual().up_closure(&PointSet::from_points(n, marked.iter().copied()));
                tr.duplicate(&up)?
            }
        };
        tr.levels.push([b0.clone(), none.clone(), none.clone(), none.clone()]);
        let li = tr.levels.len() - 1;

        // b¹: an independent copy of b⁰ over ⟨G⟩
        let base = Subalgebra::generated(&tr.stage, &tr.gens)?;
        let mut with_b0 = tr.gens.clone();
        with_b0.push(b0.clone());
        let wide = Subalgebra::generated(&tr.stage, &with_b0)?;
        let real = independent_realization(&base.inclusion(), &base.inclusion_into(&wide)?, &CompletionOptions::default())?;
        let e1 = real.completion.e1().clone();
        let b1 = real.e2().apply(&wide.lower(&b0).expect("generator"));
        let lifted: Vec<usize> = tr
            .marked
            .iter()
            .map(|&y| {
                (0..e1.cod().dual_size())
                    .find(|&z| e1.dual()[z] == y && !b1.contains(z))
                    .ok_or_else(|| Error::NoWitness("marked point cannot avoid b1".into()))
            })
            .collect::<Result<_>>()?;
        tr.advance(&e1, Some(lifted));
        tr.levels[li][1] = b1.clone();
        let ok = finite_subset_independence(&tr.stage, std::slice::from_ref(&b1), &tr.gens, &[tr.levels[li][0].clone()], IndepMode::Conjunction)?;
        independent.push(ok);
        tr.prune()?;

        // κ^ρ: π^ρ extended to b⁰ and b¹
        for rho in &frontier {
            let b0 = tr.levels[li][0].clone();
            let pi = tr.realize(&format!("pi:{rho}"))?;
            let ext = extend_partial_automorphism(&pi, &b0)?;
            tr.absorb(ext, format!("kappa:{rho}"))?;
            let b1 = tr.levels[li][1].clone();
            let k = tr.realize(&format!("kappa:{rho}"))?;
            let ext = extend_partial_automorphism(&k, &b1)?;
            tr.absorb(ext, format!("kappa:{rho}"))?;
        }
        // τ¹ fixes ⟨G⟩ and exchanges b⁰, b¹
        let (b0, b1) = (tr.levels[li][0].clone(), tr.levels[li][1].clone());
        let mut s = tr.gens.clone();
        s.extend([b0.clone(), b1.clone()]);
        let mut swapped = tr.gens.clone();
        swapped.extend([b1.clone(), b0.clone()]);
        if PartialIso::from_tuples(&tr.stage, &s, &swapped)?.is_none() {
            return Err(Error::NotIsomorphic("b0 and b1 cannot be exchanged over the previous level".into()));
        }
        // σ^{ρj} = κ^ρ ∘ τ^j
        for rho in &frontier {
            let k = tr.realize(&format!("kappa:{rho}"))?;
            let img: Vec<PointSet> = s.iter().map(|e| k.apply(e).expect("in domain")).collect();
            let m = img.len();
            let mut img1 = img.clone();
            img1.swap(m - 2, m - 1);
            tr.maps.insert(format!("sigma:{rho}0"), Tuples { s: s.clone(), t: img });
            tr.maps.insert(format!("sigma:{rho}1"), Tuples { s: s.clone(), t: img1 });
        }
        let children: Vec<String> =
            frontier.iter().flat_map(|r| [format!("{r}0"), format!("{r}1")]).collect();

        // d: outside ⟨G b⁰ b¹⟩; forth extensions
        let sub = Subalgebra::generated(&tr.stage, &s)?;
        let d = match tr.first_outside(&sub, |_| true) {
            Some(d) => d,
            None => {
                let top = tr.stage.top();
                tr.duplicate(&top)?;
                let sub = Subalgebra::generated(&tr.stage, &tr.maps[&format!("sigma:{}", children[0])].s)?;
                tr.first_outside(&sub, |_| true).expect("the copy is new")
            }
        };
        tr.levels[li][2] = d;
        for rho in &children {
            let sg = tr.realize(&format!("sigma:{rho}"))?;
            let d = tr.levels[li][2].clone();
            let ext = extend_partial_automorphism(&sg, &d)?;
            tr.absorb(ext, format!("forth:{rho}"))?;
        }

        // r: outside ⟨G b⁰ b¹ d e→(d)…⟩; back extensions
        let mut around = tr.gens.clone();
        around.extend(tr.levels[li][..3].iter().cloned());
        for rho in &children {
            let f = tr.realize(&format!("forth:{rho}"))?;
            around.push(f.apply(&tr.levels[li][2]).expect("in domain"));
        }
        let sub = Subalgebra::generated(&tr.stage, &around)?;
        let r = match tr.first_outside(&sub, |_| true) {
            Some(r) => r,
            None => {
                let top = tr.stage.top();
                let copy_of_top = tr.duplicate(&top)?;
                let all = tr.stage.top();
                all.difference(&copy_of_top)
            }
        };
        tr.levels[li][3] = r;
        for rho in &children {
            let f = tr.realize(&format!("forth:{rho}"))?;
            let r = tr.levels[li][3].clone();
            let ext = extend_backwards(&f, &r)?;
            tr.absorb(ext, format!("back:{rho}"))?;
            let back = tr.maps[&format!("back:{rho}")].clone();
            tr.maps.insert(format!("pi:{rho}"), back);
        }
        for rho in &frontier {
            tr.maps.remove(&format!("pi:{rho}"));
            tr.maps.remove(&format!("kappa:{rho}"));
        }
        let l = tr.levels[li].clone();
        tr.gens.extend([l[0].clone(), l[1].clone(), l[2].clone()]);
        frontier = children;
    }

    let stage = tr.stage.clone();
    let mut history = BTreeMap::new();
    for (key, t) in &tr.maps {
        if let Some(rho) = key.strip_prefix("sigma:") {
            history.insert(rho.to_string(), t.realize(&stage)?);
        }
    }
    let mut labels = BTreeMap::new();
    for rho in &frontier {
        let sigma = history[rho].clone();
        let forth = tr.realize(&format!("forth:{rho}"))?;
        let back = tr.realize(&format!("back:{rho}"))?;
        let qd = sigma.dom().quotient();
        let image: Vec<usize> = tr.marked.iter().map(|&y| sigma.point_map()[qd[y]]).collect();
        let qc = sigma.cod().quotient();
        let point = image.iter().map(|&c| qc.iter().position(|&k| k == c).expect("onto")).collect();
        labels.insert(rho.clone(), TreeLabel { rho: rho.clone(), sigma, forth, back, image, point });
    }
    let levels = tr
        .levels
        .iter()
        .zip(independent)
        .map(|(l, independent)| TreeLevel {
            b0: l[0].clone(),
            b1: l[1].clone(),
            d: l[2].clone(),
            r: l[3].clone(),
            independent,
        })
        .collect();
    Ok(TransTree { stage, marked: tr.marked, levels, labels, history, stage_sizes: tr.sizes })
}
