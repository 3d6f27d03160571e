//! Presheaves sliced over a crossed group, the twisted product `X ⋊ Y`,
//! crossed monoids, free crossed monoids on words, and invertible elements.
//!
//! A pair `(x, y)` of `X ⋊ Y` at level `a` has index `x * |Y(a)| + y`, so the
//! two bracketings of a triple share indices and associativity is an
//! equality of tables.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::crossed::{CrossedError, CrossedGroup, CrossedMap};
use crate::group::GroupLevel;
use crate::presheaf::{Presheaf, PresheafError};
use crate::verify::{verify_crossed_axioms, VerifyReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonoidalError {
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Crossed(#[from] CrossedError),
    #[error("structure map is not natural at level {0}")]
    StructureMap(usize),
    #[error("objects are sliced over different crossed groups")]
    BaseMismatch,
    #[error("product of lengths {left} and {right} exceeds the cap {cap}")]
    CapOverflow { left: usize, right: usize, cap: usize },
    #[error("monoid law {law} fails at level {level}: {detail}")]
    Law { law: &'static str, level: usize, detail: String },
}

/// A presheaf with a structure map into a crossed group.
#[derive(Clone, Debug)]
pub struct SlicedObject {
    pub name: String,
    pub set: Presheaf,
    pub base: Arc<CrossedGroup>,
    /// `p[a][x]` is the image of `x` in `base` at level `a`.
    pub p: Vec<Vec<u32>>,
}

impl SlicedObject {
    pub fn new(name: impl Into<String>, set: Presheaf, base: Arc<CrossedGroup>, p: Vec<Vec<u32>>) -> Result<Self, MonoidalError> {
        if set.truncation().site != base.site() || set.truncation().max_level != base.max_level() {
            return Err(MonoidalError::Presheaf(PresheafError::TruncationMismatch));
        }
        for a in base.truncation().levels() {
            if p[a].len() != set.size(a) || p[a].iter().any(|&g| g as usize >= base.order(a)) {
                return Err(MonoidalError::StructureMap(a));
            }
        }
        let g = Presheaf::of_group(&base);
        if !set.is_natural(&g, &p) {
            let t = base.truncation();
            let bad = t
                .levels()
                .find(|&a| !t.levels().all(|b| (0..t.hom_count(b, a)).all(|k| (0..set.size(a) as u32).all(|x| p[b][set.restrict(b, a, k, x) as usize] == base.restrict(b, a, k, p[a][x as usize])))))
                .unwrap_or(0);
            return Err(MonoidalError::StructureMap(bad));
        }
        Ok(SlicedObject { name: name.into(), set, base, p })
    }

    /// The unit `*` with structure map to the units.
    pub fn unit(base: Arc<CrossedGroup>) -> Self {
        let set = Presheaf::terminal(base.truncation().clone());
        let p = base.orders().iter().map(|_| vec![0]).collect();
        SlicedObject { name: "*".into(), set, base, p }
    }

    /// A presheaf sliced over the units of `base`.
    pub fn over_unit(name: impl Into<String>, set: Presheaf, base: Arc<CrossedGroup>) -> Result<Self, MonoidalError> {
        let p = set.sizes().iter().map(|&s| vec![0; s]).collect();
        SlicedObject::new(name, set, base, p)
    }

    /// `(A[a0], g)`: maps into `a0` sliced by `phi |-> phi^*(g)`.
    pub fn representable(base: Arc<CrossedGroup>, a0: usize, g: u32) -> Self {
        let t = base.truncation().clone();
        let set = Presheaf::representable(t.clone(), a0);
        let p = t.levels().map(|b| (0..t.hom_count(b, a0)).map(|k| base.restrict(b, a0, k, g)).collect()).collect();
        SlicedObject { name: format!("A[{a0}]"), set, base, p }
    }

    /// A crossed group over `base` through a crossed map.
    pub fn of_group(h: &CrossedGroup, f: &CrossedMap, base: Arc<CrossedGroup>) -> Result<Self, MonoidalError> {
        f.check(h, &base)?;
        Ok(SlicedObject { name: h.name.clone(), set: Presheaf::of_group(h), base, p: f.maps.clone() })
    }

    pub fn size(&self, a: usize) -> usize {
        self.set.size(a)
    }

    /// `phi^x := phi^{p(x)}` for the `k`-th map `b -> a`.
    #[inline]
    pub fn act(&self, b: usize, a: usize, k: usize, x: u32) -> usize {
        self.base.act(b, a, k, self.p[a][x as usize])
    }

    #[inline]
    pub fn restrict(&self, b: usize, a: usize, k: usize, x: u32) -> u32 {
        self.set.restrict(b, a, k, x)
    }

    /// The map `(x, phi) |-> (phi^x, phi^*(x))`.
    pub fn crs(&self, b: usize, a: usize, x: u32, k: usize) -> (usize, u32) {
        (self.act(b, a, k, x), self.restrict(b, a, k, x))
    }

    /// Re-slices along a crossed map of bases.
    pub fn pushforward(&self, u: &CrossedMap, target: Arc<CrossedGroup>) -> Result<Self, MonoidalError> {
        u.check(&self.base, &target)?;
        let p = self.p.iter().zip(&u.maps).map(|(p, m)| p.iter().map(|&g| m[g as usize]).collect()).collect();
        Ok(SlicedObject { name: self.name.clone(), set: self.set.clone(), base: target, p })
    }

    /// Equal sets, restrictions, structure maps and base tables.
    pub fn same_tables(&self, other: &SlicedObject) -> bool {
        self.set.same_tables(&other.set) && self.p == other.p && self.base.same_tables(&other.base)
    }

    /// Whether levelwise functions are a map of sliced objects.
    pub fn is_sliced_map(&self, other: &SlicedObject, f: &[Vec<u32>]) -> bool {
        self.set.is_natural(&other.set, f)
            && f.iter().enumerate().all(|(a, fa)| fa.iter().enumerate().all(|(x, &y)| other.p[a][y as usize] == self.p[a][x]))
    }
}

/// `K ⋊ X`: pairs `(k, x)` restricting to `((phi^x)^*(k), phi^*(x))`.
pub fn semidirect(k: &Presheaf, x: &SlicedObject) -> Result<Presheaf, MonoidalError> {
    if k.truncation().site != x.base.site() || k.truncation().max_level != x.base.max_level() {
        return Err(MonoidalError::Presheaf(PresheafError::TruncationMismatch));
    }
    let sizes: Vec<usize> = k.sizes().iter().zip(x.set.sizes()).map(|(a, b)| a * b).collect();
    let t = x.base.truncation().clone();
    Ok(Presheaf::checked_from_fn(t, sizes, |b, a, kk, i| {
        let (kv, xv) = (i / x.size(a) as u32, i % x.size(a) as u32);
        let twisted = x.act(b, a, kk, xv);
        k.restrict(b, a, twisted, kv) * x.size(b) as u32 + x.restrict(b, a, kk, xv)
    })?)
}

/// `X ⋊ Y` sliced by `(x, y) |-> p(x) q(y)`.
pub fn rtimes(x: &SlicedObject, y: &SlicedObject) -> Result<SlicedObject, MonoidalError> {
    if !Arc::ptr_eq(&x.base, &y.base) && !x.base.same_tables(&y.base) {
        return Err(MonoidalError::BaseMismatch);
    }
    let set = semidirect(&x.set, y)?;
    let base = x.base.clone();
    let p = base
        .truncation()
        .levels()
        .map(|a| {
            (0..x.size(a) as u32)
                .flat_map(|i| (0..y.size(a) as u32).map(move |j| (i, j)))
                .map(|(i, j)| base.mul(a, x.p[a][i as usize], y.p[a][j as usize]))
                .collect()
        })
        .collect();
    Ok(SlicedObject { name: format!("({} x| {})", x.name, y.name), set, base, p })
}

/// A monoid in sliced objects under `⋊`.
#[derive(Clone, Debug)]
pub struct CrossedMonoid {
    pub obj: SlicedObject,
    pub unit: Vec<u32>,
    /// `mul[a][x * |M(a)| + y]`.
    pub mul: Vec<Vec<u32>>,
}

impl CrossedMonoid {
    pub fn mul(&self, a: usize, x: u32, y: u32) -> u32 {
        self.mul[a][x as usize * self.obj.size(a) + y as usize]
    }

    /// Associativity, unit laws, naturality of unit and product over the base.
    pub fn verify(&self) -> Result<(), MonoidalError> {
        let o = &self.obj;
        let t = o.base.truncation().clone();
        for a in t.levels() {
            let m = o.size(a) as u32;
            let e = self.unit[a];
            if o.p[a][e as usize] != 0 {
                return Err(MonoidalError::Law { law: "unit-over-base", level: a, detail: format!("p({e}) != e") });
            }
            for x in 0..m {
                if self.mul(a, e, x) != x || self.mul(a, x, e) != x {
                    return Err(MonoidalError::Law { law: "unit", level: a, detail: format!("at {x}") });
                }
                for y in 0..m {
                    let xy = self.mul(a, x, y);
                    if o.p[a][xy as usize] != o.base.mul(a, o.p[a][x as usize], o.p[a][y as usize]) {
                        return Err(MonoidalError::Law { law: "product-over-base", level: a, detail: format!("({x},{y})") });
                    }
                    for z in 0..m {
                        if self.mul(a, xy, z) != self.mul(a, x, self.mul(a, y, z)) {
                            return Err(MonoidalError::Law { law: "associativity", level: a, detail: format!("({x},{y},{z})") });
                        }
                    }
                    for b in t.levels() {
                        for k in 0..t.hom_count(b, a) {
                            let ky = o.act(b, a, k, y);
                            let lhs = self.mul(b, o.restrict(b, a, ky, x), o.restrict(b, a, k, y));
                            if lhs != o.restrict(b, a, k, xy) {
                                return Err(MonoidalError::Law {
                                    law: "product-natural",
                                    level: a,
                                    detail: format!("({x},{y}) along {}", t.morphism(b, a, k)),
                                });
                            }
                        }
                    }
                }
            }
            for b in t.levels() {
                for k in 0..t.hom_count(b, a) {
                    if o.restrict(b, a, k, e) != self.unit[b] {
                        return Err(MonoidalError::Law { law: "unit-natural", level: a, detail: t.morphism(b, a, k).to_string() });
                    }
                }
            }
        }
        Ok(())
    }
}

/// A crossed group over `base` through a crossed map, as a monoid.
pub fn crossed_group_as_monoid(h: &CrossedGroup, f: &CrossedMap, base: Arc<CrossedGroup>) -> Result<CrossedMonoid, MonoidalError> {
    let obj = SlicedObject::of_group(h, f, base)?;
    let mul = h
        .truncation()
        .levels()
        .map(|a| {
            let o = h.order(a) as u32;
            (0..o).flat_map(|x| (0..o).map(move |y| (x, y))).map(|(x, y)| h.mul(a, x, y)).collect()
        })
        .collect();
    let m = CrossedMonoid { obj, unit: vec![0; h.max_level() + 1], mul };
    m.verify()?;
    Ok(m)
}

/// Invertible elements of a crossed monoid as a crossed group, with their indices in the monoid.
#[derive(Clone, Debug)]
pub struct Invertibles {
    pub group: CrossedGroup,
    pub members: Vec<Vec<u32>>,
    pub report: VerifyReport,
}

/// Levelwise unit groups, checking `phi^*(x)^{-1} = (phi^x)^*(x^{-1})` on every invertible element.
pub fn invertibles(m: &CrossedMonoid) -> Result<Invertibles, MonoidalError> {
    let o = &m.obj;
    let t = o.base.truncation().clone();
    let mut members: Vec<Vec<u32>> = Vec::new();
    let mut inverse: Vec<Vec<u32>> = Vec::new();
    for a in t.levels() {
        let e = m.unit[a];
        let size = o.size(a) as u32;
        // the unit first so that it gets index 0
        let mut mem = vec![e];
        let mut inv = vec![e];
        for x in (0..size).filter(|&x| x != e) {
            if let Some(y) = (0..size).find(|&y| m.mul(a, x, y) == e && m.mul(a, y, x) == e) {
                mem.push(x);
                inv.push(y);
            }
        }
        members.push(mem);
        inverse.push(inv);
    }
    let pos: Vec<Vec<u32>> = t
        .levels()
        .map(|a| {
            let mut v = vec![u32::MAX; o.size(a)];
            members[a].iter().enumerate().for_each(|(i, &x)| v[x as usize] = i as u32);
            v
        })
        .collect();
    let n = t.max_level + 1;
    let mut levels = Vec::with_capacity(n);
    let mut res = vec![vec![Vec::new(); n]; n];
    let mut act = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        let u = members[a].len();
        let table = members[a]
            .iter()
            .flat_map(|&x| members[a].iter().map(move |&y| (x, y)))
            .map(|(x, y)| pos[a][m.mul(a, x, y) as usize])
            .collect();
        levels.push(GroupLevel::from_dense(u, table));
        for b in 0..n {
            let h = t.hom_count(b, a);
            let mut r = Vec::with_capacity(h * u);
            for k in 0..h {
                for (i, &x) in members[a].iter().enumerate() {
                    let y = o.restrict(b, a, k, x);
                    if pos[b][y as usize] == u32::MAX {
                        return Err(MonoidalError::Law {
                            law: "invertible-restriction",
                            level: a,
                            detail: format!("{x} along {} is not invertible", t.morphism(b, a, k)),
                        });
                    }
                    let kx = o.act(b, a, k, x);
                    let lhs = inverse[b][pos[b][y as usize] as usize];
                    if lhs != o.restrict(b, a, kx, inverse[a][i]) {
                        return Err(MonoidalError::Law {
                            law: "inverse-restriction",
                            level: a,
                            detail: format!("{x} along {}", t.morphism(b, a, k)),
                        });
                    }
                    r.push(pos[b][y as usize]);
                }
            }
            res[a][b] = r;
            act[a][b] = members[a].iter().flat_map(|&x| (0..h).map(move |k| (x, k))).map(|(x, k)| o.act(b, a, k, x) as u32).collect();
        }
    }
    let group = CrossedGroup::from_parts(format!("units({})", o.name), t, levels, res, act)?;
    let report = verify_crossed_axioms(&group);
    Ok(Invertibles { group, members, report })
}

/// One letter of a word: an element of `X` at the word's level.
pub type Word = Vec<u32>;

/// The free crossed monoid on a sliced object, on words of bounded length.
#[derive(Clone, Debug)]
pub struct WordMonoid {
    pub gen: SlicedObject,
    pub cap: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WordJson {
    pub letters: Vec<LetterJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LetterJson {
    pub level: usize,
    pub index: u32,
}

pub fn free_crossed_monoid(x: &SlicedObject, cap: usize) -> WordMonoid {
    WordMonoid { gen: x.clone(), cap: cap.max(1) }
}

impl WordMonoid {
    /// All words of length at most the cap at level `a`, shortest first.
    pub fn words(&self, a: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        let mut layer: Vec<Word> = vec![Vec::new()];
        for _ in 0..self.cap {
            layer = layer
                .iter()
                .flat_map(|w| {
                    (0..self.gen.size(a) as u32).map(move |x| {
                        let mut v = w.clone();
                        v.push(x);
                        v
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    pub fn mul(&self, x: &[u32], y: &[u32]) -> Result<Word, MonoidalError> {
        if x.len() + y.len() > self.cap {
            return Err(MonoidalError::CapOverflow { left: x.len(), right: y.len(), cap: self.cap });
        }
        Ok([x, y].concat())
    }

    /// Structure map: the product of the letters' images.
    pub fn structure(&self, a: usize, w: &[u32]) -> u32 {
        w.iter().fold(0, |g, &x| self.gen.base.mul(a, g, self.gen.p[a][x as usize]))
    }

    /// `phi^w` for the `k`-th map `b -> a`.
    pub fn act(&self, b: usize, a: usize, k: usize, w: &[u32]) -> usize {
        self.gen.base.act(b, a, k, self.structure(a, w))
    }

    /// Letter `i` restricts along `phi^{p(x_{i+1}) ... p(x_n)}`; the twists are
    /// accumulated from the right so each letter costs one action lookup.
    pub fn restrict(&self, b: usize, a: usize, k: usize, w: &[u32]) -> Word {
        let mut out = vec![0; w.len()];
        let mut phi = k;
        for (i, &x) in w.iter().enumerate().rev() {
            out[i] = self.gen.restrict(b, a, phi, x);
            phi = self.gen.act(b, a, phi, x);
        }
        out
    }

    pub fn to_json(&self, a: usize, w: &[u32]) -> WordJson {
        WordJson { letters: w.iter().map(|&index| LetterJson { level: a, index }).collect() }
    }

    /// Extends a sliced map `X -> M` to words, as the product of the letters' images.
    pub fn extend(&self, m: &CrossedMonoid, f: &[Vec<u32>], a: usize, w: &[u32]) -> u32 {
        w.iter().fold(m.unit[a], |acc, &x| m.mul(a, acc, f[a][x as usize]))
    }
}
