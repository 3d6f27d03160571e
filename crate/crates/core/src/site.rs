//! The three finite sites and their degree-truncated hom-sets.
//!
//! Points of a level object are addressed by a dense index `0..points(n)`:
//! `[n]` uses `0..=n`, `<n>` uses `1..=n` shifted down by one, and the
//! interval object `<<n>>` puts `-inf` at index 0 and `+inf` at index `n+1`.
//! A morphism is stored as the full map on point indices; the public
//! [`SiteMorphism`] type carries the carrier values the way they are written.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SiteId {
    /// The simplex category, objects `[n] = {0..n}`.
    Delta,
    /// The augmented simplex category, objects `<n> = {1..n}`.
    AugDelta,
    /// The interval category, objects `<<n>> = {-inf, 1..n, +inf}`.
    Nabla,
}

impl SiteId {
    pub const ALL: [SiteId; 3] = [SiteId::Delta, SiteId::AugDelta, SiteId::Nabla];

    /// Size of the carrier of level `n`.
    pub fn points(self, n: usize) -> usize {
        match self {
            SiteId::Delta => n + 1,
            SiteId::AugDelta => n,
            SiteId::Nabla => n + 2,
        }
    }

    /// Level of the generator `s`; its hom-functor identifies `hom(s, a)` with the points of `a`.
    pub fn generator(self) -> usize {
        match self {
            SiteId::Delta => 0,
            SiteId::AugDelta | SiteId::Nabla => 1,
        }
    }

    /// Level of the co-relation object carrying the two maps `iota0, iota1` out of `s`.
    pub fn corelation(self) -> usize {
        match self {
            SiteId::Delta => 1,
            SiteId::AugDelta | SiteId::Nabla => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SiteId::Delta => "delta",
            SiteId::AugDelta => "aug-delta",
            SiteId::Nabla => "nabla",
        }
    }

    /// Carrier value of point index `i` at level `n`.
    pub fn point(self, n: usize, i: usize) -> Point {
        match self {
            SiteId::Delta => Point::Fin(i as u32),
            SiteId::AugDelta => Point::Fin(i as u32 + 1),
            SiteId::Nabla if i == 0 => Point::NegInf,
            SiteId::Nabla if i == n + 1 => Point::PosInf,
            SiteId::Nabla => Point::Fin(i as u32),
        }
    }

    /// Inverse of [`SiteId::point`].
    pub fn index_of(self, n: usize, p: Point) -> Option<usize> {
        let i = match (self, p) {
            (SiteId::Delta, Point::Fin(v)) => v as usize,
            (SiteId::AugDelta, Point::Fin(v)) if v >= 1 => v as usize - 1,
            (SiteId::Nabla, Point::NegInf) => 0,
            (SiteId::Nabla, Point::PosInf) => n + 1,
            (SiteId::Nabla, Point::Fin(v)) if v >= 1 => v as usize,
            _ => return None,
        };
        (i < self.points(n)).then_some(i)
    }

    /// Whether a full point map `dom -> cod` is a morphism of this site.
    pub fn admits(self, map: &[u8], cod: usize) -> bool {
        if map.windows(2).any(|w| w[0] > w[1]) {
            return false;
        }
        if map.iter().any(|&v| v as usize >= self.points(cod)) {
            return false;
        }
        match self {
            SiteId::Nabla => {
                map.first() == Some(&0) && map.last().map(|&v| v as usize) == Some(cod + 1)
            }
            _ => true,
        }
    }

    /// Index of the distinguished point of the generator `s`.
    fn generator_index(self) -> usize {
        match self {
            SiteId::Delta | SiteId::AugDelta => 0,
            SiteId::Nabla => 1,
        }
    }

    /// Range of point indices where the stored interior of a domain sits.
    fn interior(self, dom: usize) -> std::ops::Range<usize> {
        match self {
            SiteId::Nabla => 1..dom + 1,
            _ => 0..self.points(dom),
        }
    }
}

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SiteId {
    type Err = SiteError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delta" => Ok(SiteId::Delta),
            "aug-delta" | "augdelta" => Ok(SiteId::AugDelta),
            "nabla" => Ok(SiteId::Nabla),
            _ => Err(SiteError::UnknownSite(s.to_string())),
        }
    }
}

/// A carrier point. The derived order puts `NegInf` below every finite point and `PosInf` above.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    NegInf,
    Fin(u32),
    PosInf,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::NegInf => f.write_str("-inf"),
            Point::Fin(v) => write!(f, "{v}"),
            Point::PosInf => f.write_str("inf"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Point::NegInf => s.serialize_str("-inf"),
            Point::Fin(v) => s.serialize_u32(*v),
            Point::PosInf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct PointVisitor;
        impl Visitor<'_> for PointVisitor {
            type Value = Point;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer, \"-inf\" or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Point, E> {
                u32::try_from(v).map(Point::Fin).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Point, E> {
                u32::try_from(v).map(Point::Fin).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Point, E> {
                match v {
                    "-inf" => Ok(Point::NegInf),
                    "inf" | "+inf" => Ok(Point::PosInf),
                    _ => Err(E::custom(format!("bad point {v:?}"))),
                }
            }
        }
        d.deserialize_any(PointVisitor)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SiteError {
    #[error("unknown site {0:?}")]
    UnknownSite(String),
    #[error("site mismatch: {0} vs {1}")]
    SiteMismatch(SiteId, SiteId),
    #[error("cannot compose: codomain level {cod} of the first map differs from domain level {dom} of the second")]
    LevelMismatch { cod: usize, dom: usize },
    #[error("expected {expected} stored values for domain level {dom}, got {got}")]
    WrongLength { dom: usize, expected: usize, got: usize },
    #[error("value {value} is not a point of level {level}")]
    BadValue { value: Point, level: usize },
    #[error("values are not weakly increasing")]
    NotMonotone,
    #[error("point {0} is not in the codomain")]
    PointOutside(Point),
    #[error("{0} is not a morphism of the interval category")]
    NotNabla(SiteId),
    #[error("level {0} exceeds the truncation")]
    LevelTooLarge(usize),
}

/// An order-preserving map between level objects. For the interval site only
/// the images of the interior points are stored; the endpoints are implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SiteMorphism {
    pub site: SiteId,
    pub dom: usize,
    pub cod: usize,
    pub values: Vec<Point>,
}

impl SiteMorphism {
    pub fn new(site: SiteId, dom: usize, cod: usize, values: Vec<Point>) -> Result<Self, SiteError> {
        let expected = site.interior(dom).len();
        if values.len() != expected {
            return Err(SiteError::WrongLength { dom, expected, got: values.len() });
        }
        for &v in &values {
            if site.index_of(cod, v).is_none() {
                return Err(SiteError::BadValue { value: v, level: cod });
            }
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(SiteError::NotMonotone);
        }
        Ok(SiteMorphism { site, dom, cod, values })
    }

    /// Convenience constructor from integer carrier values (no infinities).
    pub fn from_ints(site: SiteId, dom: usize, cod: usize, values: &[u32]) -> Result<Self, SiteError> {
        Self::new(site, dom, cod, values.iter().map(|&v| Point::Fin(v)).collect())
    }

    pub fn identity(site: SiteId, n: usize) -> Self {
        let map: Vec<u8> = (0..site.points(n) as u8).collect();
        Self::from_point_map(site, n, n, &map)
    }

    /// Builds a morphism from a full map of point indices (assumed valid).
    pub fn from_point_map(site: SiteId, dom: usize, cod: usize, map: &[u8]) -> Self {
        debug_assert!(site.admits(map, cod));
        let values = site.interior(dom).map(|i| site.point(cod, map[i] as usize)).collect();
        SiteMorphism { site, dom, cod, values }
    }

    /// Full map on point indices, endpoints included.
    pub fn point_map(&self) -> Vec<u8> {
        let s = self.site;
        let mut out = Vec::with_capacity(s.points(self.dom));
        if s == SiteId::Nabla {
            out.push(0);
        }
        out.extend(self.values.iter().map(|&v| s.index_of(self.cod, v).expect("validated value") as u8));
        if s == SiteId::Nabla {
            out.push((self.cod + 1) as u8);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod && self.point_map().iter().enumerate().all(|(i, &v)| v as usize == i)
    }

    pub fn is_injective(&self) -> bool {
        self.point_map().windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        let map = self.point_map();
        let mut hit = vec![false; self.site.points(self.cod)];
        for v in map {
            hit[v as usize] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Image of a single carrier point.
    pub fn apply(&self, p: Point) -> Result<Point, SiteError> {
        let i = self.site.index_of(self.dom, p).ok_or(SiteError::PointOutside(p))?;
        Ok(self.site.point(self.cod, self.point_map()[i] as usize))
    }
}

impl fmt::Display for SiteMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}->{}(", self.site, self.dom, self.cod)?;
        for (k, v) in self.values.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// All weakly increasing sequences of `len` values in `lo..=hi`, lexicographically.
fn monotone_sequences(len: usize, lo: u8, hi: u8) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if lo > hi {
        if len == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![lo; len];
    loop {
        out.push(cur.clone());
        // advance to the lexicographic successor
        let Some(k) = (0..len).rev().find(|&k| cur[k] < hi) else { break };
        let v = cur[k] + 1;
        for c in &mut cur[k..] {
            *c = v;
        }
    }
    out
}

/// All full point maps `m -> n`, in lexicographic order of stored values.
pub fn hom_maps(site: SiteId, m: usize, n: usize) -> Vec<Vec<u8>> {
    let p = site.points(n);
    match site {
        SiteId::Nabla => monotone_sequences(m, 0, (n + 1) as u8)
            .into_iter()
            .map(|mid| {
                let mut full = Vec::with_capacity(m + 2);
                full.push(0);
                full.extend(mid);
                full.push((n + 1) as u8);
                full
            })
            .collect(),
        _ if p == 0 => monotone_sequences(site.points(m), 1, 0),
        _ => monotone_sequences(site.points(m), 0, (p - 1) as u8),
    }
}

/// Every morphism `m -> n`, duplicate-free and ordered lexicographically by values.
pub fn hom_set(site: SiteId, m: usize, n: usize) -> Vec<SiteMorphism> {
    hom_maps(site, m, n).iter().map(|f| SiteMorphism::from_point_map(site, m, n, f)).collect()
}

pub fn compose(psi: &SiteMorphism, phi: &SiteMorphism) -> Result<SiteMorphism, SiteError> {
    if psi.site != phi.site {
        return Err(SiteError::SiteMismatch(psi.site, phi.site));
    }
    if phi.cod != psi.dom {
        return Err(SiteError::LevelMismatch { cod: phi.cod, dom: psi.dom });
    }
    let (f, g) = (phi.point_map(), psi.point_map());
    let map: Vec<u8> = f.iter().map(|&i| g[i as usize]).collect();
    Ok(SiteMorphism::from_point_map(psi.site, phi.dom, psi.cod, &map))
}

/// Preimage of a codomain point, in increasing order. Endpoints of the
/// interval site are included in the fibers over the endpoints.
pub fn fiber(phi: &SiteMorphism, target: Point) -> Result<Vec<Point>, SiteError> {
    let t = phi.site.index_of(phi.cod, target).ok_or(SiteError::PointOutside(target))?;
    Ok(phi
        .point_map()
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v as usize == t)
        .map(|(i, _)| phi.site.point(phi.dom, i))
        .collect())
}

/// Image of an augmented map `<m> -> <n>` under the endpoint extension `<<m>> -> <<n>>`.
pub fn extend_to_nabla(mu: &SiteMorphism) -> SiteMorphism {
    assert_eq!(mu.site, SiteId::AugDelta);
    SiteMorphism { site: SiteId::Nabla, dom: mu.dom, cod: mu.cod, values: mu.values.clone() }
}

/// Whether an interval map restricts to a bijection from the preimage of the
/// interior onto the interior of the codomain.
pub fn is_interior_bijective(phi: &SiteMorphism) -> bool {
    if phi.site != SiteId::Nabla {
        return false;
    }
    let interior: Vec<u32> = phi
        .values
        .iter()
        .filter_map(|v| if let Point::Fin(x) = v { Some(*x) } else { None })
        .collect();
    interior.len() == phi.cod && interior.iter().enumerate().all(|(k, &x)| x as usize == k + 1)
}

/// Factors an interval map as `extend_to_nabla(mu) . rho` with `rho` interior-bijective.
pub fn interval_factor(phi: &SiteMorphism) -> Result<(SiteMorphism, SiteMorphism), SiteError> {
    if phi.site != SiteId::Nabla {
        return Err(SiteError::NotNabla(phi.site));
    }
    let mut rho = Vec::with_capacity(phi.dom);
    let mut mu = Vec::new();
    for &v in &phi.values {
        match v {
            Point::Fin(_) => {
                mu.push(v);
                rho.push(Point::Fin(mu.len() as u32));
            }
            Point::NegInf => rho.push(Point::NegInf),
            Point::PosInf => rho.push(Point::PosInf),
        }
    }
    let k = mu.len();
    let mu = SiteMorphism::new(SiteId::AugDelta, k, phi.cod, mu)?;
    let rho = SiteMorphism::new(SiteId::Nabla, phi.dom, k, rho)?;
    Ok((mu, rho))
}

/// `hom(s, a)` in its well-order; for every site this is the carrier order.
pub fn hom_order(site: SiteId, n: usize) -> Vec<SiteMorphism> {
    hom_set(site, site.generator(), n)
}

/// The two maps `s -> s_bar` of the internal co-relation.
pub fn iotas(site: SiteId) -> (SiteMorphism, SiteMorphism) {
    let v = |x: u32| match site {
        SiteId::Delta => vec![Point::Fin(x - 1)],
        _ => vec![Point::Fin(x)],
    };
    let (s, sb) = (site.generator(), site.corelation());
    (
        SiteMorphism::new(site, s, sb, v(1)).expect("iota0"),
        SiteMorphism::new(site, s, sb, v(2)).expect("iota1"),
    )
}

/// The map `s_bar -> a` that both co-relation legs pull back to `alpha`.
pub fn refl(alpha: &SiteMorphism) -> SiteMorphism {
    let site = alpha.site;
    let target = alpha.point_map()[site.generator_index()];
    let sb = site.corelation();
    let mut map = vec![target; site.points(sb)];
    if site == SiteId::Nabla {
        map[0] = 0;
        map[sb + 1] = (alpha.cod + 1) as u8;
    }
    SiteMorphism::from_point_map(site, sb, alpha.cod, &map)
}

/// Point index that a map out of the generator picks out.
pub fn generator_point(site: SiteId, map: &[u8]) -> usize {
    map[site.generator_index()] as usize
}

/// Packs a short byte sequence (values < 16) into an integer key.
pub(crate) fn pack(map: &[u8]) -> u64 {
    debug_assert!(map.len() <= 16);
    map.iter().enumerate().fold(0u64, |acc, (i, &v)| {
        debug_assert!(v < 16);
        acc | (u64::from(v) << (4 * i))
    })
}

/// All hom-sets of one site up to a level, with index lookup and a lazily
/// built composition table.
pub struct Truncation {
    pub site: SiteId,
    pub max_level: usize,
    homs: Vec<Vec<Vec<Vec<u8>>>>,
    lookup: Vec<Vec<rustc_hash::FxHashMap<u64, u32>>>,
    comp: OnceLock<Vec<Vec<Vec<Vec<u32>>>>>,
}

impl fmt::Debug for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Truncation({}, {})", self.site, self.max_level)
    }
}

impl Truncation {
    pub fn new(site: SiteId, max_level: usize) -> Self {
        assert!(site.points(max_level) <= 16, "levels above 14 are not supported");
        let levels = max_level + 1;
        let mut homs = vec![vec![Vec::new(); levels]; levels];
        let mut lookup = vec![vec![rustc_hash::FxHashMap::default(); levels]; levels];
        for b in 0..levels {
            for a in 0..levels {
                let maps = hom_maps(site, b, a);
                lookup[b][a] = maps.iter().enumerate().map(|(k, m)| (pack(m), k as u32)).collect();
                homs[b][a] = maps;
            }
        }
        Truncation { site, max_level, homs, lookup, comp: OnceLock::new() }
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.max_level
    }

    pub fn points(&self, n: usize) -> usize {
        self.site.points(n)
    }

    /// Point maps of `hom(b, a)`.
    pub fn homs(&self, b: usize, a: usize) -> &[Vec<u8>] {
        &self.homs[b][a]
    }

    pub fn hom_count(&self, b: usize, a: usize) -> usize {
        self.homs[b][a].len()
    }

    pub fn find(&self, b: usize, a: usize, map: &[u8]) -> Option<u32> {
        self.lookup[b][a].get(&pack(map)).copied()
    }

    pub fn morphism(&self, b: usize, a: usize, k: usize) -> SiteMorphism {
        SiteMorphism::from_point_map(self.site, b, a, &self.homs[b][a][k])
    }

    pub fn index_of(&self, phi: &SiteMorphism) -> Result<u32, SiteError> {
        if phi.site != self.site {
            return Err(SiteError::SiteMismatch(phi.site, self.site));
        }
        let top = phi.dom.max(phi.cod);
        if top > self.max_level {
            return Err(SiteError::LevelTooLarge(top));
        }
        Ok(self.find(phi.dom, phi.cod, &phi.point_map()).expect("valid morphism is enumerated"))
    }

    pub fn identity(&self, n: usize) -> u32 {
        let id: Vec<u8> = (0..self.points(n) as u8).collect();
        self.find(n, n, &id).expect("identity")
    }

    /// Index of `psi . phi` where `phi: c -> b` has index `j` and `psi: b -> a` has index `k`.
    pub fn compose_idx(&self, c: usize, b: usize, a: usize, k: usize, j: usize) -> u32 {
        let table = self.comp.get_or_init(|| self.build_compositions());
        table[c][b][a][j * self.hom_count(b, a) + k]
    }

    fn build_compositions(&self) -> Vec<Vec<Vec<Vec<u32>>>> {
        let levels = self.max_level + 1;
        let mut out = vec![vec![vec![Vec::new(); levels]; levels]; levels];
        for c in 0..levels {
            for b in 0..levels {
                for a in 0..levels {
                    let mut t = Vec::with_capacity(self.hom_count(c, b) * self.hom_count(b, a));
                    for f in &self.homs[c][b] {
                        for g in &self.homs[b][a] {
                            let h: Vec<u8> = f.iter().map(|&i| g[i as usize]).collect();
                            t.push(self.find(c, a, &h).expect("composite is a morphism"));
                        }
                    }
                    out[c][b][a] = t;
                }
            }
        }
        out
    }
}

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Process-wide cache of truncations, so composition tables are built once.
pub fn shared_truncation(site: SiteId, max_level: usize) -> std::sync::Arc<Truncation> {
    use std::sync::{Arc, Mutex};
    static CACHE: OnceLock<Mutex<HashMap<(SiteId, usize), Arc<Truncation>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("truncation cache poisoned");
    guard.entry((site, max_level)).or_insert_with(|| Arc::new(Truncation::new(site, max_level))).clone()
}
