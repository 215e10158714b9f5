use std::collections::VecDeque;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amalgam::{complete_superamalgam, CompletionOptions, LowerAmalgam};
use crate::error::{Error, Result};
use crate::heyting::{enumerate_embeddings, AlgebraMap, HeytingAlgebra};
use crate::poset::{enumerate_posets, surjective_p_morphisms, FinitePoset, DEFAULT_POSET_BOUND};

/// What a step of the chain did.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum StepKind {
    Start,
    /// Embedded the catalog algebra with this position.
    Universality { item: usize, in_stage: bool },
    /// Discharged one-point extension obligations.
    Homogeneity,
}

/// A discharged obligation: the pair `B ⊆ C` (positions in the pair list)
/// and the stage where the embedding of `B` first appeared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discharge {
    pub pair: usize,
    pub origin_stage: usize,
    pub in_stage: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLog {
    pub step: StepKind,
    pub discharged: Vec<Discharge>,
    pub pending: usize,
}

/// One stage of a chain of finite algebras, with the embedding from the
/// previous stage.
#[derive(Clone, Debug)]
pub struct ChainStage {
    pub index: usize,
    pub algebra: Arc<HeytingAlgebra>,
    pub link: Option<AlgebraMap>,
    pub log: StageLog,
}

/// A one-point extension `B ⊆ C` between catalog algebras: the dual of `C`
/// has one more point than the dual of `B`.
#[derive(Clone, Debug)]
pub struct ExtensionPair {
    pub small: usize,
    pub large: usize,
    pub inclusion: AlgebraMap,
}

/// Catalog algebras (dual size at most the bound, smallest first) and the
/// one-point extension pairs among them.
#[derive(Clone, Debug)]
pub struct ChainCatalog {
    pub algebras: Vec<Arc<HeytingAlgebra>>,
    pub pairs: Vec<ExtensionPair>,
}

impl ChainCatalog {
    /// Within each dual size the order is canonical for `seed = 0` and
    /// shuffled by `seed` otherwise.
    pub fn new(bound: usize, seed: u64) -> Result<Self> {
        let catalog = enumerate_posets(bound, DEFAULT_POSET_BOUND)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut algebras = Vec::new();
        for size in 1..=bound {
            let mut items: Vec<Arc<FinitePoset>> = catalog.of_size(size).to_vec();
            if seed != 0 {
                items.shuffle(&mut rng);
            }
            algebras.extend(items.into_iter().map(|p| Arc::new(HeytingAlgebra::from_poset(p))));
        }
        let mut pairs = Vec::new();
        for (i, b) in algebras.iter().enumerate() {
            for (j, c) in algebras.iter().enumerate() {
                if c.dual_size() != b.dual_size() + 1 {
                    continue;
                }
                for inclusion in enumerate_embeddings(b, c) {
                    pairs.push(ExtensionPair { small: i, large: j, inclusion });
                }
            }
        }
        Ok(ChainCatalog { algebras, pairs })
    }
}

#[derive(Clone, Debug)]
struct Obligation {
    pair: usize,
    origin_stage: usize,
    /// Embedding of the pair's small algebra into the origin stage.
    map: AlgebraMap,
}

/// A chain `S_0 ⊆ S_1 ⊆ …` approximating the homogeneous limit.
#[derive(Clone, Debug)]
pub struct Chain {
    pub catalog: ChainCatalog,
    pub stages: Vec<ChainStage>,
}

impl Chain {
    pub fn last(&self) -> &ChainStage {
        self.stages.last().expect("a chain has a first stage")
    }

    /// Composite embedding of stage `from` into stage `to`.
    pub fn link_between(&self, from: usize, to: usize) -> Result<AlgebraMap> {
        chain_link(&self.stages[..=to], from)
    }
}

/// In-stage extension: `h: C → S` with `h ∘ ι = g`, searched on the dual.
fn extend_in_stage(g: &AlgebraMap, iota: &AlgebraMap) -> Option<AlgebraMap> {
    let (gd, id) = (g.dual(), iota.dual());
    let fits = |x: usize, y: usize| id[y] == gd[x];
    let found = surjective_p_morphisms(g.cod().dual(), iota.cod().dual(), &fits, 1);
    found.into_iter().next().map(|dual| {
        AlgebraMap::from_dual(iota.cod().clone(), g.cod().clone(), dual).expect("p-morphism")
    })
}

fn factors_through(map: &AlgebraMap, link: &AlgebraMap) -> bool {
    // constant on the fibres of the link's dual
    let mut seen = vec![usize::MAX; link.dom().dual_size()];
    link.dual().iter().zip(map.dual()).all(|(&x, &y)| {
        if seen[x] == usize::MAX {
            seen[x] = y;
        }
        seen[x] == y
    })
}

/// Builds `steps` stages after the 2-element start, alternating universality
/// steps (embed the next catalog algebra, amalgamating over the 2-element
/// algebra when it does not already embed) with homogeneity steps (discharge
/// queued one-point extension obligations first-in first-out, in the stage
/// when possible, and by one amalgamation otherwise).
pub fn build_chain(steps: usize, catalog_bound: usize, seed: u64) -> Result<Chain> {
    if steps == 0 {
        return Err(Error::InvalidArgument("a chain needs at least one step".into()));
    }
    let catalog = ChainCatalog::new(catalog_bound, seed)?;
    let two = HeytingAlgebra::two();
    let mut stages = vec![ChainStage {
        index: 0,
        algebra: two.clone(),
        link: None,
        log: StageLog { step: StepKind::Start, discharged: Vec::new(), pending: 0 },
    }];
    let mut queue: VecDeque<Obligation> = VecDeque::new();
    enqueue_new(&catalog, &stages[0], None, 0, &mut queue);
    stages[0].log.pending = queue.len();
    let mut next_item = 0;
    let opts = CompletionOptions::default();
    for step in 1..=steps {
        let prev = stages.last().expect("nonempty").algebra.clone();
        let mut discharged = Vec::new();
        let (algebra, link, kind) = if step % 2 == 1 && !catalog.algebras.is_empty() {
            let item = next_item % catalog.algebras.len();
            next_item += 1;
            let d = &catalog.algebras[item];
            let exists = !surjective_p_morphisms(prev.dual(), d.dual(), &|_, _| true, 1).is_empty();
            if exists {
                (prev.clone(), AlgebraMap::identity(prev.clone()), StepKind::Universality { item, in_stage: true })
            } else {
                let l1 = enumerate_embeddings(&two, &prev).swap_remove(0);
                let l2 = enumerate_embeddings(&two, d).swap_remove(0);
                let c = complete_superamalgam(&LowerAmalgam::new(l1, l2)?, &opts)?;
                (c.algebra().clone(), c.e1().clone(), StepKind::Universality { item, in_stage: false })
            }
        } else {
            let mut grown: Option<(Arc<HeytingAlgebra>, AlgebraMap)> = None;
            while let Some(ob) = queue.pop_front() {
                let pair = &catalog.pairs[ob.pair];
                let into_prev = ob.map.then(&chain_link(&stages, ob.origin_stage)?)?;
                if let Some(_h) = extend_in_stage(&into_prev, &pair.inclusion) {
                    discharged.push(Discharge { pair: ob.pair, origin_stage: ob.origin_stage, in_stage: true });
                    continue;
                }
                let d = LowerAmalgam::new(into_prev, pair.inclusion.clone())?;
                let c = complete_superamalgam(&d, &opts)?;
                discharged.push(Discharge { pair: ob.pair, origin_stage: ob.origin_stage, in_stage: false });
                grown = Some((c.algebra().clone(), c.e1().clone()));
                break;
            }
            let (a, l) = grown.unwrap_or_else(|| (prev.clone(), AlgebraMap::identity(prev.clone())));
            (a, l, StepKind::Homogeneity)
        };
        let stage = ChainStage {
            index: step,
            algebra,
            link: Some(link),
            log: StageLog { step: kind, discharged, pending: 0 },
        };
        let link = stage.link.clone();
        enqueue_new(&catalog, &stage, link.as_ref(), step, &mut queue);
        stages.push(stage);
        stages.last_mut().expect("pushed").log.pending = queue.len();
    }
    Ok(Chain { catalog, stages })
}

/// Composite link from stage `from` to the last stage.
fn chain_link(stages: &[ChainStage], from: usize) -> Result<AlgebraMap> {
    let mut m = AlgebraMap::identity(stages[from].algebra.clone());
    for s in &stages[from + 1..] {
        m = m.then(s.link.as_ref().expect("later stages have links"))?;
    }
    Ok(m)
}

/// Queues every embedding of a pair's small algebra into `stage` that does
/// not come from the previous stage.
fn enqueue_new(
    catalog: &ChainCatalog,
    stage: &ChainStage,
    link: Option<&AlgebraMap>,
    index: usize,
    queue: &mut VecDeque<Obligation>,
) {
    let same = link.is_some_and(|l| l.dom().dual_size() == l.cod().dual_size());
    if same {
        return;
    }
    for (p, pair) in catalog.pairs.iter().enumerate() {
        let b = &catalog.algebras[pair.small];
        for map in enumerate_embeddings(b, &stage.algebra) {
            if link.is_some_and(|l| factors_through(&map, l)) {
                continue;
            }
            queue.push_back(Obligation { pair: p, origin_stage: index, map });
        }
    }
}

/// Result of checking the one-point extension property of a stage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionAudit {
    pub checked: usize,
    /// `(pair, dual of the embedding)` for every embedding without extension.
    pub failures: Vec<(usize, Vec<usize>)>,
    /// Catalog algebras that do not embed into the stage.
    pub missing: Vec<usize>,
}

impl ExtensionAudit {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.missing.is_empty()
    }
}

/// Every catalog algebra embeds into `stage`, and every embedding of a pair's
/// small algebra extends to the large one inside `stage`.
pub fn audit_extension_property(catalog: &ChainCatalog, stage: &Arc<HeytingAlgebra>) -> ExtensionAudit {
    let mut audit = ExtensionAudit { checked: 0, failures: Vec::new(), missing: Vec::new() };
    for (i, d) in catalog.algebras.iter().enumerate() {
        if enumerate_embeddings(d, stage).is_empty() {
            audit.missing.push(i);
        }
    }
    for (p, pair) in catalog.pairs.iter().enumerate() {
        for g in enumerate_embeddings(&catalog.algebras[pair.small], stage) {
            audit.checked += 1;
            if extend_in_stage(&g, &pair.inclusion).is_none() {
                audit.failures.push((p, g.dual().to_vec()));
            }
        }
    }
    audit
}
