use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::HeytingAlgebra;
use crate::error::{Error, Result};
use crate::pointset::PointSet;
use crate::poset::FinitePoset;

/// A finite Heyting algebra given by explicit operation tables. Used for
/// validation fixtures and as an independent view of an up-set algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableAlgebra {
    pub size: usize,
    pub zero: usize,
    pub one: usize,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
    pub imp: Vec<Vec<usize>>,
}

/// Prime filters of a table algebra, ordered by inclusion.
#[derive(Clone, Debug)]
pub struct PrimeFilterDual {
    pub poset: FinitePoset,
    /// Least element of each prime filter.
    pub generators: Vec<usize>,
    /// `members[f][a]` iff element `a` lies in filter `f`.
    pub members: Vec<Vec<bool>>,
}

impl TableAlgebra {
    pub fn le(&self, a: usize, b: usize) -> bool {
        self.meet[a][b] == a
    }

    /// Checks the bounded distributive lattice laws and residuation.
    pub fn validate(&self) -> Result<()> {
        let n = self.size;
        let bad = |m: String| Err(Error::InvalidTables(m));
        if n == 0 || self.zero >= n || self.one >= n {
            return bad("empty carrier or constants out of range".into());
        }
        for (name, t) in [("meet", &self.meet), ("join", &self.join), ("imp", &self.imp)] {
            if t.len() != n || t.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
                return bad(format!("{name} table has wrong shape"));
            }
        }
        for a in 0..n {
            if self.meet[a][a] != a || self.join[a][a] != a {
                return bad(format!("not idempotent at {a}"));
            }
            if self.meet[self.zero][a] != self.zero || self.join[a][self.one] != self.one {
                return bad(format!("bounds fail at {a}"));
            }
            for b in 0..n {
                if self.meet[a][b] != self.meet[b][a] || self.join[a][b] != self.join[b][a] {
                    return bad(format!("not commutative at ({a}, {b})"));
                }
                if self.meet[a][self.join[a][b]] != a || self.join[a][self.meet[a][b]] != a {
                    return bad(format!("absorption fails at ({a}, {b})"));
                }
                for c in 0..n {
                    if self.meet[a][self.meet[b][c]] != self.meet[self.meet[a][b]][c]
                        || self.join[a][self.join[b][c]] != self.join[self.join[a][b]][c]
                    {
                        return bad(format!("not associative at ({a}, {b}, {c})"));
                    }
                    if self.meet[a][self.join[b][c]]
                        != self.join[self.meet[a][b]][self.meet[a][c]]
                    {
                        return bad(format!("not distributive at ({a}, {b}, {c})"));
                    }
                    if self.le(c, self.imp[a][b]) != self.le(self.meet[a][c], b) {
                        return bad(format!("residuation fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Prime filters straight from the definition: a proper filter `F` with
    /// `x ∨ y ∈ F` implying `x ∈ F` or `y ∈ F`. Every filter of a finite
    /// lattice is principal, so candidates are `↑e` for `e ≠ 0`.
    pub fn prime_filter_dual(&self) -> PrimeFilterDual {
        let n = self.size;
        let mut generators = Vec::new();
        let mut members = Vec::new();
        for e in 0..n {
            if e == self.zero {
                continue;
            }
            let f: Vec<bool> = (0..n).map(|x| self.le(e, x)).collect();
            let prime = (0..n).all(|x| {
                (0..n).all(|y| !f[self.join[x][y]] || f[x] || f[y])
            });
            if prime {
                generators.push(e);
                members.push(f);
            }
        }
        let m = generators.len();
        let up = (0..m)
            .map(|i| {
                PointSet::from_points(
                    m,
                    (0..m).filter(|&j| (0..n).all(|a| !members[i][a] || members[j][a])),
                )
            })
            .collect();
        let poset = FinitePoset::from_up_closures(up).expect("filter inclusion is a partial order");
        PrimeFilterDual { poset, generators, members }
    }

    /// Representation as the up-set algebra of its prime filters. Returns the
    /// algebra and the image of each table element; fails unless that map is
    /// an isomorphism.
    pub fn to_algebra(&self) -> Result<(Arc<HeytingAlgebra>, Vec<PointSet>)> {
        self.validate()?;
        let dual = self.prime_filter_dual();
        let m = dual.generators.len();
        let image: Vec<PointSet> = (0..self.size)
            .map(|a| PointSet::from_points(m, (0..m).filter(|&f| dual.members[f][a])))
            .collect();
        let alg = HeytingAlgebra::from_poset_arc(dual.poset);
        let distinct: HashSet<&PointSet> = image.iter().collect();
        if distinct.len() != self.size || self.size != alg.size() {
            return Err(Error::InvalidTables("prime-filter representation is not bijective".into()));
        }
        for a in 0..self.size {
            for b in 0..self.size {
                let ok = alg.meet(&image[a], &image[b]) == image[self.meet[a][b]]
                    && alg.join(&image[a], &image[b]) == image[self.join[a][b]]
                    && alg.imp(&image[a], &image[b]) == image[self.imp[a][b]];
                if !ok {
                    return Err(Error::InvalidTables(format!(
                        "representation fails on ({a}, {b})"
                    )));
                }
            }
        }
        Ok((alg, image))
    }
}

/// Dual poset of prime filters ordered by inclusion, computed from the
/// operation tables rather than from the stored dual.
pub fn dual_poset(a: &HeytingAlgebra) -> FinitePoset {
    a.tables().prime_filter_dual().poset
}
