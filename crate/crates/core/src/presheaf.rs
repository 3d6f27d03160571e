//! Finite presheaves of sets on a truncated site.

use std::sync::Arc;

use thiserror::Error;

use crate::crossed::CrossedGroup;
use crate::site::Truncation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresheafError {
    #[error("restriction tables have the wrong shape at level {0}")]
    Malformed(usize),
    #[error("identity does not restrict to the identity at level {0}")]
    Identity(usize),
    #[error("restriction along {psi} then {phi} differs from the composite at element {element}")]
    Composite { psi: String, phi: String, element: u32 },
    #[error("truncations differ")]
    TruncationMismatch,
}

/// `res[a][b][k * |X(a)| + x]` is the restriction of `x` along the `k`-th map `b -> a`.
#[derive(Clone, Debug)]
pub struct Presheaf {
    trunc: Arc<Truncation>,
    sizes: Vec<usize>,
    res: Vec<Vec<Vec<u32>>>,
}

impl Presheaf {
    /// Builds a presheaf and checks both presheaf laws.
    pub fn new(trunc: Arc<Truncation>, sizes: Vec<usize>, res: Vec<Vec<Vec<u32>>>) -> Result<Self, PresheafError> {
        let n = trunc.max_level + 1;
        if sizes.len() != n || res.len() != n {
            return Err(PresheafError::Malformed(0));
        }
        for a in 0..n {
            if res[a].len() != n {
                return Err(PresheafError::Malformed(a));
            }
            for b in 0..n {
                if res[a][b].len() != trunc.hom_count(b, a) * sizes[a] || res[a][b].iter().any(|&y| y as usize >= sizes[b]) {
                    return Err(PresheafError::Malformed(a));
                }
            }
        }
        let p = Presheaf { trunc, sizes, res };
        p.check_laws()?;
        Ok(p)
    }

    fn check_laws(&self) -> Result<(), PresheafError> {
        let t = &self.trunc;
        for a in t.levels() {
            let id = t.identity(a) as usize;
            if (0..self.sizes[a] as u32).any(|x| self.restrict(a, a, id, x) != x) {
                return Err(PresheafError::Identity(a));
            }
            for b in t.levels() {
                for c in t.levels() {
                    for k in 0..t.hom_count(b, a) {
                        for j in 0..t.hom_count(c, b) {
                            let comp = t.compose_idx(c, b, a, k, j) as usize;
                            for x in 0..self.sizes[a] as u32 {
                                if self.restrict(c, a, comp, x) != self.restrict(c, b, j, self.restrict(b, a, k, x)) {
                                    return Err(PresheafError::Composite {
                                        psi: t.morphism(b, a, k).to_string(),
                                        phi: t.morphism(c, b, j).to_string(),
                                        element: x,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds from a restriction function without re-checking the laws.
    pub(crate) fn from_fn(
        trunc: Arc<Truncation>,
        sizes: Vec<usize>,
        mut f: impl FnMut(usize, usize, usize, u32) -> u32,
    ) -> Self {
        let n = trunc.max_level + 1;
        let mut res = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let mut r = Vec::with_capacity(trunc.hom_count(b, a) * sizes[a]);
                for k in 0..trunc.hom_count(b, a) {
                    for x in 0..sizes[a] as u32 {
                        r.push(f(b, a, k, x));
                    }
                }
                res[a][b] = r;
            }
        }
        Presheaf { trunc, sizes, res }
    }

    /// Like `from_fn`, then checks the laws.
    pub fn checked_from_fn(
        trunc: Arc<Truncation>,
        sizes: Vec<usize>,
        f: impl FnMut(usize, usize, usize, u32) -> u32,
    ) -> Result<Self, PresheafError> {
        let p = Presheaf::from_fn(trunc, sizes, f);
        p.check_laws()?;
        Ok(p)
    }

    pub fn terminal(trunc: Arc<Truncation>) -> Self {
        let n = trunc.max_level + 1;
        Presheaf::from_fn(trunc, vec![1; n], |_, _, _, _| 0)
    }

    /// The constant presheaf on `m` points.
    pub fn constant(trunc: Arc<Truncation>, m: usize) -> Self {
        let n = trunc.max_level + 1;
        Presheaf::from_fn(trunc, vec![m; n], |_, _, _, x| x)
    }

    /// `hom(-, a0)`, restricting by precomposition.
    pub fn representable(trunc: Arc<Truncation>, a0: usize) -> Self {
        let sizes = trunc.levels().map(|b| trunc.hom_count(b, a0)).collect();
        let t = trunc.clone();
        Presheaf::from_fn(trunc, sizes, move |b, a, k, x| t.compose_idx(b, a, a0, x as usize, k))
    }

    /// The underlying presheaf of a crossed group.
    pub fn of_group(g: &CrossedGroup) -> Self {
        Presheaf::from_fn(g.truncation().clone(), g.orders(), |b, a, k, x| g.restrict(b, a, k, x))
    }

    pub fn truncation(&self) -> &Arc<Truncation> {
        &self.trunc
    }

    pub fn size(&self, a: usize) -> usize {
        self.sizes[a]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    #[inline]
    pub fn restrict(&self, b: usize, a: usize, k: usize, x: u32) -> u32 {
        self.res[a][b][k * self.sizes[a] + x as usize]
    }

    /// Same site, truncation and tables.
    pub fn same_tables(&self, other: &Presheaf) -> bool {
        self.trunc.site == other.trunc.site
            && self.trunc.max_level == other.trunc.max_level
            && self.sizes == other.sizes
            && self.res == other.res
    }

    /// Whether levelwise functions form a natural transformation `self -> other`.
    pub fn is_natural(&self, other: &Presheaf, f: &[Vec<u32>]) -> bool {
        let t = &self.trunc;
        t.levels().all(|a| {
            t.levels().all(|b| {
                (0..t.hom_count(b, a)).all(|k| {
                    (0..self.sizes[a] as u32)
                        .all(|x| f[b][self.restrict(b, a, k, x) as usize] == other.restrict(b, a, k, f[a][x as usize]))
                })
            })
        })
    }

    /// All natural transformations `self -> other`, or `None` once more than `limit` are found.
    pub fn natural_maps(&self, other: &Presheaf, limit: usize) -> Option<Vec<Vec<Vec<u32>>>> {
        let mut f: Vec<Vec<u32>> = self.sizes.iter().map(|&s| vec![0; s]).collect();
        let mut out = Vec::new();
        let cells: Vec<(usize, u32)> = self.trunc.levels().flat_map(|a| (0..self.sizes[a] as u32).map(move |x| (a, x))).collect();
        let complete = self.extend_maps(other, &cells, 0, &mut f, &mut out, limit);
        complete.then_some(out)
    }

    fn extend_maps(
        &self,
        other: &Presheaf,
        cells: &[(usize, u32)],
        i: usize,
        f: &mut Vec<Vec<u32>>,
        out: &mut Vec<Vec<Vec<u32>>>,
        limit: usize,
    ) -> bool {
        if i == cells.len() {
            out.push(f.clone());
            return out.len() <= limit;
        }
        let (a, x) = cells[i];
        let t = &self.trunc;
        for y in 0..other.sizes[a] as u32 {
            f[a][x as usize] = y;
            // constraints whose both ends are now assigned and one of them is (a, x)
            let assigned = |b: usize, z: u32| b < a || (b == a && z <= x);
            let ok = t.levels().all(|b| {
                (0..t.hom_count(b, a)).all(|k| {
                    let z = self.restrict(b, a, k, x);
                    !assigned(b, z) || f[b][z as usize] == other.restrict(b, a, k, y)
                }) && (b > a
                    || (0..t.hom_count(a, b)).all(|k| {
                        (0..self.sizes[b] as u32).filter(|&w| assigned(b, w)).all(|w| {
                            let z = self.restrict(a, b, k, w);
                            z != x || f[a][x as usize] == other.restrict(a, b, k, f[b][w as usize])
                        })
                    }))
            });
            if ok && !self.extend_maps(other, cells, i + 1, f, out, limit) {
                return false;
            }
        }
        true
    }
}
