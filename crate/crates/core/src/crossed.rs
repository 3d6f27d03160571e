//! Degree-truncated crossed groups stored as full tables, their axioms,
//! maps, kernels and images, pullbacks, generated subgroups and quotients.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::group::GroupLevel;
use crate::signed::SignedPerm;
use crate::site::{SiteId, SiteMorphism, Truncation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CrossedError {
    #[error("restriction of {element:?} along {phi} leaves the family")]
    NotClosed { phi: SiteMorphism, element: SignedPerm },
    #[error("{element:?} does not act on hom({dom}, {cod}): the image of {phi} is not a morphism")]
    NotAnAction { phi: SiteMorphism, element: SignedPerm, dom: usize, cod: usize },
    #[error("tables have the wrong shape at level {0}")]
    Malformed(usize),
    #[error("truncations differ")]
    TruncationMismatch,
    #[error("element {element} is not in level {level}")]
    NoSuchElement { level: usize, element: u32 },
    #[error("level {0} is not a normal subgroup")]
    NotNormal(usize),
    #[error("map violates {check} at level {level}: {detail}")]
    BadMap { check: &'static str, level: usize, detail: String },
    #[error("level {level} has {order} elements, over the limit {limit}")]
    TooLarge { level: usize, order: usize, limit: usize },
}

/// A crossed group on one site, truncated at `max_level`.
///
/// `res[a][b][k * |G(a)| + x]` is the restriction of `x` along the `k`-th map `b -> a`;
/// `act[a][b][x * |hom(b,a)| + k]` is the index of the `k`-th map `b -> a` acted on by `x`.
#[derive(Clone, Debug)]
pub struct CrossedGroup {
    pub name: String,
    trunc: Arc<Truncation>,
    levels: Vec<Arc<GroupLevel>>,
    res: Vec<Vec<Vec<u32>>>,
    act: Vec<Vec<Vec<u32>>>,
}

impl CrossedGroup {
    /// Assembles a table from raw parts, checking only the shapes.
    pub fn from_parts(
        name: impl Into<String>,
        trunc: Arc<Truncation>,
        levels: Vec<GroupLevel>,
        res: Vec<Vec<Vec<u32>>>,
        act: Vec<Vec<Vec<u32>>>,
    ) -> Result<Self, CrossedError> {
        let n = trunc.max_level + 1;
        if levels.len() != n || res.len() != n || act.len() != n {
            return Err(CrossedError::Malformed(0));
        }
        for a in 0..n {
            let g = levels[a].order();
            for b in 0..n {
                let h = trunc.hom_count(b, a);
                if res[a].len() != n || act[a].len() != n || res[a][b].len() != h * g || act[a][b].len() != h * g {
                    return Err(CrossedError::Malformed(a));
                }
                if res[a][b].iter().any(|&y| y as usize >= levels[b].order())
                    || act[a][b].iter().any(|&k| k as usize >= h)
                {
                    return Err(CrossedError::Malformed(a));
                }
            }
        }
        let levels = levels.into_iter().map(Arc::new).collect();
        Ok(CrossedGroup { name: name.into(), trunc, levels, res, act })
    }

    /// Crossed group whose levels are groups of signed permutations of points,
    /// with restriction and action given by the fiber formulas.
    pub fn from_signed(
        name: impl Into<String>,
        trunc: Arc<Truncation>,
        levels: Vec<Vec<SignedPerm>>,
    ) -> Result<Self, CrossedError> {
        let n = trunc.max_level + 1;
        assert_eq!(levels.len(), n);
        let groups: Vec<GroupLevel> = levels.into_iter().map(GroupLevel::from_signed).collect();
        let mut res = vec![vec![Vec::new(); n]; n];
        let mut act = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            let ga = &groups[a];
            let elems = ga.elements().expect("signed");
            for b in 0..n {
                let homs = trunc.homs(b, a);
                let gb = &groups[b];
                let r: Result<Vec<Vec<u32>>, CrossedError> = homs
                    .par_iter()
                    .map(|f| {
                        elems
                            .iter()
                            .map(|x| {
                                gb.find_key(x.restrict_key(f)).ok_or_else(|| CrossedError::NotClosed {
                                    phi: SiteMorphism::from_point_map(trunc.site, b, a, f),
                                    element: x.clone(),
                                })
                            })
                            .collect()
                    })
                    .collect();
                res[a][b] = r?.concat();
                let t: Result<Vec<Vec<u32>>, CrossedError> = elems
                    .par_iter()
                    .map(|x| {
                        let mut g = Vec::with_capacity(b + 2);
                        homs.iter()
                            .map(|f| {
                                x.act_into(f, &mut g);
                                trunc.find(b, a, &g).filter(|_| trunc.site.admits(&g, a)).ok_or_else(|| {
                                    CrossedError::NotAnAction {
                                        phi: SiteMorphism::from_point_map(trunc.site, b, a, f),
                                        element: x.clone(),
                                        dom: b,
                                        cod: a,
                                    }
                                })
                            })
                            .collect()
                    })
                    .collect();
                act[a][b] = t?.concat();
            }
        }
        CrossedGroup::from_parts(name, trunc, groups, res, act)
    }

    /// The crossed group with one element at every level.
    pub fn trivial(trunc: Arc<Truncation>) -> Self {
        let n = trunc.max_level + 1;
        let mut res = vec![vec![Vec::new(); n]; n];
        let mut act = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let h = trunc.hom_count(b, a);
                res[a][b] = vec![0; h];
                act[a][b] = (0..h as u32).collect();
            }
        }
        CrossedGroup::from_parts("trivial", trunc, vec![GroupLevel::trivial(); n], res, act).expect("shapes")
    }

    pub fn site(&self) -> SiteId {
        self.trunc.site
    }

    pub fn max_level(&self) -> usize {
        self.trunc.max_level
    }

    pub fn truncation(&self) -> &Arc<Truncation> {
        &self.trunc
    }

    pub fn level(&self, a: usize) -> &GroupLevel {
        &self.levels[a]
    }

    pub(crate) fn level_arc(&self, a: usize) -> Arc<GroupLevel> {
        self.levels[a].clone()
    }

    pub fn order(&self, a: usize) -> usize {
        self.levels[a].order()
    }

    pub fn orders(&self) -> Vec<usize> {
        self.levels.iter().map(|g| g.order()).collect()
    }

    #[inline]
    pub fn mul(&self, a: usize, x: u32, y: u32) -> u32 {
        self.levels[a].mul(x, y)
    }

    #[inline]
    pub fn inv(&self, a: usize, x: u32) -> u32 {
        self.levels[a].inv(x)
    }

    /// `phi^*(x)` for the `k`-th map `b -> a`.
    #[inline]
    pub fn restrict(&self, b: usize, a: usize, k: usize, x: u32) -> u32 {
        self.res[a][b][k * self.levels[a].order() + x as usize]
    }

    /// Index of `phi^x` for the `k`-th map `b -> a`.
    #[inline]
    pub fn act(&self, b: usize, a: usize, k: usize, x: u32) -> usize {
        self.act[a][b][x as usize * self.trunc.hom_count(b, a) + k] as usize
    }

    pub fn restrict_morphism(&self, phi: &SiteMorphism, x: u32) -> u32 {
        let k = self.trunc.index_of(phi).expect("morphism in truncation") as usize;
        self.restrict(phi.dom, phi.cod, k, x)
    }

    pub fn act_morphism(&self, phi: &SiteMorphism, x: u32) -> SiteMorphism {
        let k = self.trunc.index_of(phi).expect("morphism in truncation") as usize;
        self.trunc.morphism(phi.dom, phi.cod, self.act(phi.dom, phi.cod, k, x))
    }

    pub fn signed(&self, a: usize, x: u32) -> Option<&SignedPerm> {
        self.levels[a].elem(x)
    }

    pub fn find_signed(&self, a: usize, e: &SignedPerm) -> Option<u32> {
        self.levels[a].find(e)
    }

    /// Same data under another name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// The full family (every element at every level).
    pub fn full_family(&self) -> Family {
        Family { levels: self.levels.iter().map(|g| (0..g.order() as u32).collect()).collect() }
    }

    /// The sub-table on a family closed under products and restriction, with the embedding.
    pub fn subgroup_table(&self, fam: &Family, name: impl Into<String>) -> Result<(CrossedGroup, CrossedMap), CrossedError> {
        if let Some(w) = self.closure_witness(fam) {
            return Err(CrossedError::BadMap { check: "restriction-closure", level: w.dom, detail: w.to_string() });
        }
        let n = self.max_level() + 1;
        let pos: Vec<HashMap<u32, u32>> = fam
            .levels
            .iter()
            .map(|m| m.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect())
            .collect();
        let levels: Vec<GroupLevel> = (0..n).map(|a| self.levels[a].subgroup(&fam.levels[a])).collect();
        let mut res = vec![vec![Vec::new(); n]; n];
        let mut act = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let h = self.trunc.hom_count(b, a);
                let mut r = Vec::with_capacity(h * fam.levels[a].len());
                for k in 0..h {
                    for &x in &fam.levels[a] {
                        r.push(pos[b][&self.restrict(b, a, k, x)]);
                    }
                }
                res[a][b] = r;
                let mut t = Vec::with_capacity(h * fam.levels[a].len());
                for &x in &fam.levels[a] {
                    for k in 0..h {
                        t.push(self.act(b, a, k, x) as u32);
                    }
                }
                act[a][b] = t;
            }
        }
        // signed levels are re-sorted by `from_signed`; member lists are sorted by
        // the parent's index, which orders signed elements the same way
        let sub = CrossedGroup::from_parts(name, self.trunc.clone(), levels, res, act)?;
        debug_assert!((0..n).all(|a| match sub.level(a).elements() {
            Some(e) => fam.levels[a].iter().enumerate().all(|(i, &x)| Some(&e[i]) == self.signed(a, x)),
            None => true,
        }));
        Ok((sub, CrossedMap { maps: fam.levels.clone() }))
    }

    /// First restriction leaving the family, if any.
    pub fn closure_witness(&self, fam: &Family) -> Option<ClosureWitness> {
        let n = self.max_level() + 1;
        let member: Vec<Vec<bool>> = (0..n)
            .map(|a| {
                let mut v = vec![false; self.order(a)];
                for &x in &fam.levels[a] {
                    v[x as usize] = true;
                }
                v
            })
            .collect();
        for a in 0..n {
            for b in 0..n {
                for k in 0..self.trunc.hom_count(b, a) {
                    for &x in &fam.levels[a] {
                        let y = self.restrict(b, a, k, x);
                        if !member[b][y as usize] {
                            return Some(ClosureWitness {
                                phi: self.trunc.morphism(b, a, k),
                                dom: b,
                                element: x,
                                image: y,
                            });
                        }
                    }
                }
            }
        }
        None
    }

    /// Whether each level of the family is a subgroup and the family is closed under restriction.
    pub fn is_crossed_subgroup(&self, fam: &Family) -> bool {
        fam.levels.len() == self.max_level() + 1
            && fam.levels.iter().enumerate().all(|(a, m)| {
                m.first() == Some(&0) && self.levels[a].closure(m) == *m
            })
            && self.closure_witness(fam).is_none()
    }

    /// Whether every action is trivial.
    pub fn is_non_crossed(&self) -> bool {
        self.nontrivial_action().is_none()
    }

    /// A witness `(b, a, k, x)` with `phi_k^x != phi_k`.
    pub fn nontrivial_action(&self) -> Option<(usize, usize, usize, u32)> {
        for a in self.trunc.levels() {
            for b in self.trunc.levels() {
                for x in 0..self.order(a) as u32 {
                    for k in 0..self.trunc.hom_count(b, a) {
                        if self.act(b, a, k, x) != k {
                            return Some((b, a, k, x));
                        }
                    }
                }
            }
        }
        None
    }

    /// Composition in the total category: `(psi, y) . (phi, x) = (psi . phi^y, phi^*(y) x)`.
    pub fn total_compose(
        &self,
        (psi, y): (&SiteMorphism, u32),
        (phi, x): (&SiteMorphism, u32),
    ) -> Result<(SiteMorphism, u32), crate::site::SiteError> {
        if phi.cod != psi.dom {
            return Err(crate::site::SiteError::LevelMismatch { cod: phi.cod, dom: psi.dom });
        }
        let phi_y = self.act_morphism(phi, y);
        let comp = crate::site::compose(psi, &phi_y)?;
        let r = self.restrict_morphism(phi, y);
        Ok((comp, self.mul(phi.dom, r, x)))
    }

    /// JSON description with full tables.
    pub fn to_json(&self) -> serde_json::Value {
        let levels: Vec<serde_json::Value> = self
            .trunc
            .levels()
            .map(|a| {
                let g = &self.levels[a];
                let o = g.order();
                let mut v = serde_json::json!({ "n": a, "order": o });
                if o * o <= 1 << 16 {
                    let mul: Vec<u32> = (0..o as u32).flat_map(|x| (0..o as u32).map(move |y| (x, y))).map(|(x, y)| g.mul(x, y)).collect();
                    v["mul"] = serde_json::json!(mul);
                }
                if let Some(e) = g.elements() {
                    v["elements"] = serde_json::json!(e
                        .iter()
                        .map(|x| crate::signed::CrossedElement::from_signed(a, x))
                        .collect::<Vec<_>>());
                }
                v
            })
            .collect();
        let mut restriction = Vec::new();
        let mut action = Vec::new();
        for a in self.trunc.levels() {
            for b in self.trunc.levels() {
                for k in 0..self.trunc.hom_count(b, a) {
                    let phi = self.trunc.morphism(b, a, k);
                    let o = self.order(a) as u32;
                    let r: Vec<u32> = (0..o).map(|x| self.restrict(b, a, k, x)).collect();
                    let t: Vec<usize> = (0..o).map(|x| self.act(b, a, k, x)).collect();
                    restriction.push(serde_json::json!({ "phi": phi, "table": r }));
                    action.push(serde_json::json!({ "phi": phi, "table": t }));
                }
            }
        }
        serde_json::json!({
            "name": self.name,
            "site": self.site(),
            "max_level": self.max_level(),
            "levels": levels,
            "restriction": restriction,
            "action": action,
        })
    }

    /// Exact equality of all tables (group tables compared through products).
    pub fn same_tables(&self, other: &CrossedGroup) -> bool {
        if self.site() != other.site() || self.max_level() != other.max_level() || self.orders() != other.orders() {
            return false;
        }
        let n = self.max_level() + 1;
        (0..n).all(|a| {
            let o = self.order(a) as u32;
            (0..o).all(|x| (0..o).all(|y| self.mul(a, x, y) == other.mul(a, x, y)))
        }) && self.res == other.res
            && self.act == other.act
    }
}

/// A restriction leaving a candidate family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureWitness {
    pub phi: SiteMorphism,
    pub dom: usize,
    pub element: u32,
    pub image: u32,
}

impl std::fmt::Display for ClosureWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "element {} restricts along {} to {} outside the family", self.element, self.phi, self.image)
    }
}

/// Per-level sorted member lists of a sub-family of a crossed group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Family {
    pub levels: Vec<Vec<u32>>,
}

impl Family {
    pub fn trivial(levels: usize) -> Self {
        Family { levels: vec![vec![0]; levels] }
    }

    pub fn orders(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn contains(&self, a: usize, x: u32) -> bool {
        self.levels[a].binary_search(&x).is_ok()
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.levels.iter().zip(&other.levels).all(|(s, o)| s.iter().all(|x| o.binary_search(x).is_ok()))
    }

    pub fn intersect(&self, other: &Family) -> Family {
        Family {
            levels: self
                .levels
                .iter()
                .zip(&other.levels)
                .map(|(s, o)| s.iter().copied().filter(|x| o.binary_search(x).is_ok()).collect())
                .collect(),
        }
    }
}

/// Smallest crossed subgroup containing the given `(level, element)` seeds.
pub fn generated_subgroup(g: &CrossedGroup, seeds: &[(usize, u32)]) -> Result<Family, CrossedError> {
    let n = g.max_level() + 1;
    let mut gens: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &(a, x) in seeds {
        if a >= n || x as usize >= g.order(a) {
            return Err(CrossedError::NoSuchElement { level: a, element: x });
        }
        gens[a].push(x);
    }
    Ok(generate_from(g, gens))
}

/// Fixpoint of "close each level under products" and "add every restriction".
pub(crate) fn generate_from(g: &CrossedGroup, mut gens: Vec<Vec<u32>>) -> Family {
    let n = g.max_level() + 1;
    let trunc = g.truncation();
    let mut member: Vec<Vec<bool>> = (0..n).map(|a| vec![false; g.order(a)]).collect();
    let mut queued: Vec<Vec<bool>> = member.clone();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); n];
    loop {
        let mut fresh: Vec<Vec<u32>> = vec![Vec::new(); n];
        for a in 0..n {
            let cl = g.level(a).closure(&gens[a]);
            for &x in &cl {
                if !std::mem::replace(&mut member[a][x as usize], true) {
                    fresh[a].push(x);
                }
            }
            members[a] = cl;
        }
        let mut changed = false;
        for a in 0..n {
            for b in 0..n {
                for k in 0..trunc.hom_count(b, a) {
                    for &x in &fresh[a] {
                        let y = g.restrict(b, a, k, x) as usize;
                        if !member[b][y] && !std::mem::replace(&mut queued[b][y], true) {
                            gens[b].push(y as u32);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return Family { levels: members };
        }
    }
}

/// A map of crossed groups given levelwise by element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedMap {
    pub maps: Vec<Vec<u32>>,
}

impl CrossedMap {
    pub fn identity(g: &CrossedGroup) -> Self {
        CrossedMap { maps: g.orders().iter().map(|&o| (0..o as u32).collect()).collect() }
    }

    pub fn to_trivial(g: &CrossedGroup) -> Self {
        CrossedMap { maps: g.orders().iter().map(|&o| vec![0; o]).collect() }
    }

    /// Checks naturality, the homomorphism property and compatibility with the actions.
    pub fn check(&self, src: &CrossedGroup, dst: &CrossedGroup) -> Result<(), CrossedError> {
        if src.site() != dst.site() || src.max_level() != dst.max_level() {
            return Err(CrossedError::TruncationMismatch);
        }
        let trunc = src.truncation();
        for a in trunc.levels() {
            let f = &self.maps[a];
            if f.len() != src.order(a) || f.iter().any(|&y| y as usize >= dst.order(a)) {
                return Err(CrossedError::Malformed(a));
            }
            let gens = src.level(a).generators();
            // a map agreeing with products on generators and built along the
            // Cayley graph is a homomorphism; compare on every edge
            for x in 0..src.order(a) as u32 {
                for &s in &gens {
                    if f[src.mul(a, x, s) as usize] != dst.mul(a, f[x as usize], f[s as usize]) {
                        return Err(CrossedError::BadMap {
                            check: "homomorphism",
                            level: a,
                            detail: format!("f({x}*{s}) != f({x})*f({s})"),
                        });
                    }
                }
            }
            if f[0] != 0 {
                return Err(CrossedError::BadMap { check: "unit", level: a, detail: "f(e) != e".into() });
            }
            for b in trunc.levels() {
                for k in 0..trunc.hom_count(b, a) {
                    for x in 0..src.order(a) as u32 {
                        let fx = f[x as usize];
                        if self.maps[b][src.restrict(b, a, k, x) as usize] != dst.restrict(b, a, k, fx) {
                            return Err(CrossedError::BadMap {
                                check: "naturality",
                                level: a,
                                detail: format!("element {x} along {}", trunc.morphism(b, a, k)),
                            });
                        }
                        if src.act(b, a, k, x) != dst.act(b, a, k, fx) {
                            return Err(CrossedError::BadMap {
                                check: "action",
                                level: a,
                                detail: format!("element {x} on {}", trunc.morphism(b, a, k)),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, first: &CrossedMap) -> CrossedMap {
        CrossedMap {
            maps: first.maps.iter().zip(&self.maps).map(|(f, g)| f.iter().map(|&x| g[x as usize]).collect()).collect(),
        }
    }
}

/// Kernel and image of a crossed map, as families of source and target.
pub fn image_kernel_factor(
    f: &CrossedMap,
    src: &CrossedGroup,
    dst: &CrossedGroup,
) -> Result<(CrossedGroup, CrossedGroup), CrossedError> {
    f.check(src, dst)?;
    let kernel = Family {
        levels: f.maps.iter().map(|m| (0..m.len() as u32).filter(|&x| m[x as usize] == 0).collect()).collect(),
    };
    let image = Family {
        levels: f
            .maps
            .iter()
            .map(|m| m.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
            .collect(),
    };
    let (k, _) = src.subgroup_table(&kernel, format!("ker({})", src.name))?;
    let (i, _) = dst.subgroup_table(&image, format!("im({})", src.name))?;
    Ok((k, i))
}

/// Levelwise fiber product of two crossed maps into a common target.
pub fn pullback(
    f: &CrossedMap,
    g1: &CrossedGroup,
    g: &CrossedMap,
    g2: &CrossedGroup,
    k: &CrossedGroup,
) -> Result<(CrossedGroup, CrossedMap, CrossedMap), CrossedError> {
    f.check(g1, k)?;
    g.check(g2, k)?;
    let trunc = g1.truncation().clone();
    let n = trunc.max_level + 1;
    let mut pairs: Vec<Vec<(u32, u32)>> = Vec::with_capacity(n);
    let mut levels = Vec::with_capacity(n);
    for a in 0..n {
        let mut by_image: HashMap<u32, Vec<u32>> = HashMap::new();
        for (y, &v) in g.maps[a].iter().enumerate() {
            by_image.entry(v).or_default().push(y as u32);
        }
        let mut p = Vec::new();
        for (x, &v) in f.maps[a].iter().enumerate() {
            if let Some(ys) = by_image.get(&v) {
                p.extend(ys.iter().map(|&y| (x as u32, y)));
            }
        }
        p.sort();
        levels.push(GroupLevel::from_pairs(g1.level_arc(a), g2.level_arc(a), p.clone()));
        pairs.push(p);
    }
    let index: Vec<HashMap<(u32, u32), u32>> =
        pairs.iter().map(|p| p.iter().enumerate().map(|(i, &q)| (q, i as u32)).collect()).collect();
    let mut res = vec![vec![Vec::new(); n]; n];
    let mut act = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let h = trunc.hom_count(b, a);
            let mut r = Vec::with_capacity(h * pairs[a].len());
            for kk in 0..h {
                for &(x, y) in &pairs[a] {
                    r.push(index[b][&(g1.restrict(b, a, kk, x), g2.restrict(b, a, kk, y))]);
                }
            }
            res[a][b] = r;
            let mut t = Vec::with_capacity(h * pairs[a].len());
            for &(x, _) in &pairs[a] {
                for kk in 0..h {
                    t.push(g1.act(b, a, kk, x) as u32);
                }
            }
            act[a][b] = t;
        }
    }
    let p = CrossedGroup::from_parts(format!("{} x {}", g1.name, g2.name), trunc, levels, res, act)?;
    let p1 = CrossedMap { maps: pairs.iter().map(|p| p.iter().map(|q| q.0).collect()).collect() };
    let p2 = CrossedMap { maps: pairs.iter().map(|p| p.iter().map(|q| q.1).collect()).collect() };
    Ok((p, p1, p2))
}

/// Levelwise coset spaces `G(a)/N(a)` with the induced restriction maps.
#[derive(Clone, Debug)]
pub struct QuotientASet {
    /// `cosets[a][c]`: sorted members of the `c`-th coset, ordered by least member.
    pub cosets: Vec<Vec<Vec<u32>>>,
    /// `coset_of[a][x]`: coset index of `x`.
    pub coset_of: Vec<Vec<u32>>,
    trunc: Arc<Truncation>,
    /// `res[a][b][k * |cosets(a)| + c]`.
    res: Vec<Vec<Vec<u32>>>,
    /// Coset multiplication, available because `N` is normal.
    mul: Vec<Vec<u32>>,
}

impl QuotientASet {
    pub fn size(&self, a: usize) -> usize {
        self.cosets[a].len()
    }

    pub fn restrict(&self, b: usize, a: usize, k: usize, c: u32) -> u32 {
        self.res[a][b][k * self.size(a) + c as usize]
    }

    pub fn mul(&self, a: usize, c: u32, d: u32) -> u32 {
        self.mul[a][c as usize * self.size(a) + d as usize]
    }

    pub fn truncation(&self) -> &Arc<Truncation> {
        &self.trunc
    }
}

/// Quotient of `g` by a levelwise normal crossed subgroup `n`, with restriction
/// checked to be independent of coset representatives.
pub fn quotient_aset(g: &CrossedGroup, sub: &Family) -> Result<QuotientASet, CrossedError> {
    let trunc = g.truncation().clone();
    let levels = trunc.max_level + 1;
    let mut cosets = Vec::with_capacity(levels);
    let mut coset_of = Vec::with_capacity(levels);
    for a in 0..levels {
        let grp = g.level(a);
        let nmem = &sub.levels[a];
        for &u in nmem {
            for x in 0..grp.order() as u32 {
                let conj = grp.mul(grp.mul(x, u), grp.inv(x));
                if nmem.binary_search(&conj).is_err() {
                    return Err(CrossedError::NotNormal(a));
                }
            }
        }
        let mut of = vec![u32::MAX; grp.order()];
        let mut cs: Vec<Vec<u32>> = Vec::new();
        for x in 0..grp.order() as u32 {
            if of[x as usize] != u32::MAX {
                continue;
            }
            let mut c: Vec<u32> = nmem.iter().map(|&u| grp.mul(x, u)).collect();
            c.sort();
            for &y in &c {
                of[y as usize] = cs.len() as u32;
            }
            cs.push(c);
        }
        cosets.push(cs);
        coset_of.push(of);
    }
    let mut res = vec![vec![Vec::new(); levels]; levels];
    for a in 0..levels {
        for b in 0..levels {
            let h = trunc.hom_count(b, a);
            let mut r = Vec::with_capacity(h * cosets[a].len());
            for k in 0..h {
                for c in &cosets[a] {
                    let first = coset_of[b][g.restrict(b, a, k, c[0]) as usize];
                    for &x in c {
                        if coset_of[b][g.restrict(b, a, k, x) as usize] != first {
                            return Err(CrossedError::BadMap {
                                check: "coset-independence",
                                level: a,
                                detail: format!("representatives {} and {x} along {}", c[0], trunc.morphism(b, a, k)),
                            });
                        }
                    }
                    r.push(first);
                }
            }
            res[a][b] = r;
        }
    }
    let mul = (0..levels)
        .map(|a| {
            let cs = &cosets[a];
            let mut t = Vec::with_capacity(cs.len() * cs.len());
            for c in cs {
                for d in cs {
                    t.push(coset_of[a][g.mul(a, c[0], d[0]) as usize]);
                }
            }
            t
        })
        .collect();
    Ok(QuotientASet { cosets, coset_of, trunc, res, mul })
}
