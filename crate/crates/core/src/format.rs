//! File documents read and written by the command-line tool, and DOT export.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::amalgam::LowerAmalgam;
use crate::error::{Error, Result};
use crate::heyting::{AlgebraMap, HeytingAlgebra, PartialIso, TableAlgebra};
use crate::limit::{Chain, StageLog, TransTree};
use crate::pointset::PointSet;
use crate::poset::{Catalog, FinitePoset};

/// `{"points": n, "leq": [[x, y], ...]}`. Pairs mean `x <= y`; reflexive
/// pairs are optional and the relation must already be transitive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetDoc {
    pub points: usize,
    pub leq: Vec<(usize, usize)>,
}

impl PosetDoc {
    /// Writes every strict pair, so the document is valid without closure.
    pub fn from_poset(p: &FinitePoset) -> Self {
        PosetDoc { points: p.size(), leq: p.strict_pairs() }
    }

    pub fn to_poset(&self) -> Result<FinitePoset> {
        FinitePoset::from_pairs(self.points, &self.leq)
    }
}

/// An algebra given by its dual poset or by explicit operation tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraDoc {
    Poset { poset: PosetDoc },
    Tables { tables: TableAlgebra },
}

impl AlgebraDoc {
    pub fn from_algebra(a: &HeytingAlgebra) -> Self {
        AlgebraDoc::Poset { poset: PosetDoc::from_poset(a.dual()) }
    }

    /// Table documents are validated and converted through their prime
    /// filters.
    pub fn to_algebra(&self) -> Result<Arc<HeytingAlgebra>> {
        match self {
            AlgebraDoc::Poset { poset } => Ok(HeytingAlgebra::from_poset_arc(poset.to_poset()?)),
            AlgebraDoc::Tables { tables } => Ok(tables.to_algebra()?.0),
        }
    }
}

/// A lower amalgam. `i1[k]` is the index in `A1` of the image of the `k`-th
/// element of `A0`, elements listed in canonical order; likewise `i2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct AmalgamDoc {
    pub A0: AlgebraDoc,
    pub A1: AlgebraDoc,
    pub A2: AlgebraDoc,
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
}

impl AmalgamDoc {
    pub fn from_amalgam(d: &LowerAmalgam) -> Self {
        AmalgamDoc {
            A0: AlgebraDoc::from_algebra(d.a0()),
            A1: AlgebraDoc::from_algebra(d.a1()),
            A2: AlgebraDoc::from_algebra(d.a2()),
            i1: d.i1().element_table(),
            i2: d.i2().element_table(),
        }
    }

    pub fn to_amalgam(&self) -> Result<LowerAmalgam> {
        let a0 = self.A0.to_algebra()?;
        let i1 = AlgebraMap::from_element_map(a0.clone(), self.A1.to_algebra()?, &self.i1)?;
        let i2 = AlgebraMap::from_element_map(a0, self.A2.to_algebra()?, &self.i2)?;
        LowerAmalgam::new(i1, i2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogDoc {
    pub max: usize,
    /// Number of classes of each size `1..=max`.
    pub counts: Vec<usize>,
    pub posets: Vec<PosetDoc>,
}

impl CatalogDoc {
    pub fn from_catalog(c: &Catalog) -> Self {
        CatalogDoc {
            max: c.max_size(),
            counts: c.counts(),
            posets: c.iter().map(|p| PosetDoc::from_poset(p)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageDoc {
    pub index: usize,
    pub dual: PosetDoc,
    /// Dual of the link from the previous stage: point of this stage to
    /// point of the previous one.
    pub link: Option<Vec<usize>>,
    pub log: StageLog,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainDoc {
    pub stages: Vec<StageDoc>,
}

impl ChainDoc {
    pub fn from_chain(c: &Chain) -> Self {
        let stages = c
            .stages
            .iter()
            .map(|s| StageDoc {
                index: s.index,
                dual: PosetDoc::from_poset(s.algebra.dual()),
                link: s.link.as_ref().map(|l| l.dual().to_vec()),
                log: s.log.clone(),
            })
            .collect();
        ChainDoc { stages }
    }
}

/// A partial isomorphism as a table between the duals of its domain and
/// codomain: `dom_classes[x]` and `cod_classes[x]` give the class of each
/// stage point, and `point_map` sends codomain classes to domain classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapTable {
    pub dom_generators: Vec<Vec<usize>>,
    pub cod_generators: Vec<Vec<usize>>,
    pub dom_classes: Vec<usize>,
    pub cod_classes: Vec<usize>,
    pub point_map: Vec<usize>,
}

impl MapTable {
    pub fn of(p: &PartialIso) -> Self {
        let gens = |g: &[PointSet]| g.iter().map(PointSet::to_vec).collect();
        MapTable {
            dom_generators: gens(p.dom_gens()),
            cod_generators: gens(p.cod_gens()),
            dom_classes: p.dom().quotient().to_vec(),
            cod_classes: p.cod().quotient().to_vec(),
            point_map: p.point_map().to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelDoc {
    pub b0: Vec<usize>,
    pub b1: Vec<usize>,
    pub d: Vec<usize>,
    pub r: Vec<usize>,
    pub independent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LabelDoc {
    pub rho: String,
    /// Representative point of the final stage for each marked point.
    pub point: Vec<usize>,
    /// The same image as a point of the codomain's dual.
    pub image: Vec<usize>,
    pub sigma: MapTable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeDoc {
    pub depth: usize,
    pub stage: PosetDoc,
    pub stage_sizes: Vec<usize>,
    pub marked: Vec<usize>,
    pub levels: Vec<LevelDoc>,
    pub labels: Vec<LabelDoc>,
    pub coherent: bool,
    pub distinct: bool,
}

impl TreeDoc {
    pub fn from_tree(t: &TransTree) -> Self {
        let levels = t
            .levels
            .iter()
            .map(|l| LevelDoc {
                b0: l.b0.to_vec(),
                b1: l.b1.to_vec(),
                d: l.d.to_vec(),
                r: l.r.to_vec(),
                independent: l.independent,
            })
            .collect();
        let labels = t
            .labels
            .values()
            .map(|l| LabelDoc {
                rho: l.rho.clone(),
                point: l.point.clone(),
                image: l.image.clone(),
                sigma: MapTable::of(&l.sigma),
            })
            .collect();
        TreeDoc {
            depth: t.levels.len(),
            stage: PosetDoc::from_poset(t.stage.dual()),
            stage_sizes: t.stage_sizes.clone(),
            marked: t.marked.clone(),
            levels,
            labels,
            coherent: t.coherence_failures().is_empty(),
            distinct: t.images_distinct(),
        }
    }
}

fn dot_body(out: &mut String, p: &FinitePoset, prefix: &str, indent: &str) {
    for x in 0..p.size() {
        let _ = writeln!(out, "{indent}{prefix}{x} [label=\"{}\"];", p.label(x));
    }
    for (lo, hi) in p.covers() {
        let _ = writeln!(out, "{indent}{prefix}{hi} -> {prefix}{lo};");
    }
}

/// One node per point, one edge per covering pair, greater points on top.
pub fn poset_dot(p: &FinitePoset) -> String {
    let mut out = String::from("digraph poset {\n  rankdir=TB;\n  edge [dir=none];\n");
    dot_body(&mut out, p, "p", "  ");
    out.push_str("}\n");
    out
}

impl ChainDoc {
    /// Every stage dual as a cluster, with dashed edges for the link maps
    /// from each stage onto the previous one.
    pub fn to_dot(&self) -> Result<String> {
        let mut out = String::from("digraph chain {\n  rankdir=TB;\n  edge [dir=none];\n");
        for s in &self.stages {
            let p = s.dual.to_poset()?;
            let _ = writeln!(out, "  subgraph cluster_{} {{\n    label=\"stage {}\";", s.index, s.index);
            dot_body(&mut out, &p, &format!("s{}_", s.index), "    ");
            out.push_str("  }\n");
        }
        for pair in self.stages.windows(2) {
            let (prev, s) = (&pair[0], &pair[1]);
            if let Some(l) = &s.link {
                for (x, &y) in l.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "  s{}_{x} -> s{}_{y} [style=dashed, constraint=false];",
                        s.index, prev.index
                    );
                }
            }
        }
        out.push_str("}\n");
        Ok(out)
    }
}

/// Parses a JSON document, naming `what` in the error.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{what}: {e}")))
}
