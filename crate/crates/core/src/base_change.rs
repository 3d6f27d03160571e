//! Moving crossed groups and crossed monoids along the two site functors
//! `j: Delta -> AugDelta` (`[n] |-> <n+1>`) and `J: AugDelta -> Nabla`
//! (`<n> |-> <<n>>`, adding the two endpoints).

use std::collections::BTreeSet;
use std::sync::Arc;

use rustc_hash::FxHashMap as HashMap;
use serde::Serialize;
use thiserror::Error;

use crate::crossed::{CrossedError, CrossedGroup, CrossedMap};
use crate::group::GroupLevel;
use crate::monoidal::{CrossedMonoid, MonoidalError, SlicedObject};
use crate::presheaf::{Presheaf, PresheafError};
use crate::signed::SignedPerm;
use crate::site::{interval_factor, is_interior_bijective, shared_truncation, SiteId, SiteMorphism, Truncation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaseChangeError {
    #[error("the image of the functor is not stable: {phi} acted on by element {element} gives {image}")]
    Unstable { phi: SiteMorphism, element: u32, image: SiteMorphism },
    #[error("expected a structure on {expected}, got {got}")]
    WrongSite { expected: SiteId, got: SiteId },
    #[error("need level {needed}, truncation stops at {got}")]
    TooShallow { needed: usize, got: usize },
    #[error("the base is not the restricted target group")]
    BaseMismatch,
    #[error("sign map is not a monoid map: {0}")]
    Theta(String),
    #[error("not closed: {0}")]
    NotClosed(String),
    #[error("more than {limit} normal forms at level {level}")]
    TooMany { level: usize, limit: usize },
    #[error("product of words of length {len} exceeds the cap {cap}")]
    CapOverflow { len: usize, cap: usize },
    #[error(transparent)]
    Crossed(#[from] CrossedError),
    #[error(transparent)]
    Monoidal(#[from] MonoidalError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SiteFunctor {
    /// `[n] |-> <n+1>`, the identity on point maps. Fully faithful.
    J,
    /// `<n> |-> <<n>>`, sending `f` to `[-inf, f + 1, +inf]`.
    Interval,
}

impl SiteFunctor {
    pub fn source(self) -> SiteId {
        match self {
            SiteFunctor::J => SiteId::Delta,
            SiteFunctor::Interval => SiteId::AugDelta,
        }
    }

    pub fn target(self) -> SiteId {
        match self {
            SiteFunctor::J => SiteId::AugDelta,
            SiteFunctor::Interval => SiteId::Nabla,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SiteFunctor::J => "j",
            SiteFunctor::Interval => "J",
        }
    }

    pub fn parse(s: &str) -> Option<SiteFunctor> {
        match s {
            "j" => Some(SiteFunctor::J),
            "J" | "interval" => Some(SiteFunctor::Interval),
            _ => None,
        }
    }

    pub fn level(self, a: usize) -> usize {
        match self {
            SiteFunctor::J => a + 1,
            SiteFunctor::Interval => a,
        }
    }

    /// Largest source level whose image lies in a target truncation.
    pub fn source_max(self, target_max: usize) -> Option<usize> {
        match self {
            SiteFunctor::J => target_max.checked_sub(1),
            SiteFunctor::Interval => Some(target_max),
        }
    }

    /// Image of a source point map with codomain level `cod`.
    pub fn map_points(self, f: &[u8], cod: usize) -> Vec<u8> {
        match self {
            SiteFunctor::J => f.to_vec(),
            SiteFunctor::Interval => {
                let mut g = Vec::with_capacity(f.len() + 2);
                g.push(0);
                g.extend(f.iter().map(|&v| v + 1));
                g.push(cod as u8 + 1);
                g
            }
        }
    }

    pub fn apply(self, phi: &SiteMorphism) -> SiteMorphism {
        assert_eq!(phi.site, self.source());
        let g = self.map_points(&phi.point_map(), phi.cod);
        SiteMorphism::from_point_map(self.target(), self.level(phi.dom), self.level(phi.cod), &g)
    }

    /// Index tables of the functor between a target truncation and the source
    /// truncation it covers.
    pub fn tables(self, dst: &Arc<Truncation>) -> Result<FunctorTables, BaseChangeError> {
        if dst.site != self.target() {
            return Err(BaseChangeError::WrongSite { expected: self.target(), got: dst.site });
        }
        let max = self.source_max(dst.max_level).ok_or(BaseChangeError::TooShallow { needed: 1, got: 0 })?;
        let src = shared_truncation(self.source(), max);
        let n = max + 1;
        let mut fwd = vec![vec![Vec::new(); n]; n];
        let mut back = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let (fa, fb) = (self.level(a), self.level(b));
                fwd[a][b] = src
                    .homs(b, a)
                    .iter()
                    .map(|f| dst.find(fb, fa, &self.map_points(f, a)).expect("functor image is a morphism"))
                    .collect();
                let mut bk = vec![u32::MAX; dst.hom_count(fb, fa)];
                for (k, &t) in fwd[a][b].iter().enumerate() {
                    bk[t as usize] = k as u32;
                }
                back[a][b] = bk;
            }
        }
        Ok(FunctorTables { functor: self, src, dst: dst.clone(), fwd, back })
    }
}

/// `fwd[a][b][k]` is the index of `F(k)` in `hom(F b, F a)`; `back` inverts it
/// on the image and holds `u32::MAX` elsewhere.
#[derive(Clone, Debug)]
pub struct FunctorTables {
    pub functor: SiteFunctor,
    pub src: Arc<Truncation>,
    pub dst: Arc<Truncation>,
    pub fwd: Vec<Vec<Vec<u32>>>,
    pub back: Vec<Vec<Vec<u32>>>,
}

/// `F^*G`: the levels `G(F a)`, restricting along `F(phi)`.
/// Fails when some `F(phi)^g` leaves the image of `F`.
pub fn restrict_crossed(functor: SiteFunctor, g: &CrossedGroup) -> Result<CrossedGroup, BaseChangeError> {
    let ft = functor.tables(g.truncation())?;
    let n = ft.src.max_level + 1;
    let mut levels = Vec::with_capacity(n);
    let mut res = vec![vec![Vec::new(); n]; n];
    let mut act = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        let fa = functor.level(a);
        levels.push(g.level(fa).clone());
        let o = g.order(fa) as u32;
        for b in 0..n {
            let fb = functor.level(b);
            let fwd = &ft.fwd[a][b];
            res[a][b] = fwd.iter().flat_map(|&k| (0..o).map(move |x| g.restrict(fb, fa, k as usize, x))).collect();
            let mut t = Vec::with_capacity(fwd.len() * o as usize);
            for x in 0..o {
                for &k in fwd {
                    let image = g.act(fb, fa, k as usize, x);
                    let back = ft.back[a][b][image];
                    if back == u32::MAX {
                        return Err(BaseChangeError::Unstable {
                            phi: g.truncation().morphism(fb, fa, k as usize),
                            element: x,
                            image: g.truncation().morphism(fb, fa, image),
                        });
                    }
                    t.push(back);
                }
            }
            act[a][b] = t;
        }
    }
    Ok(CrossedGroup::from_parts(format!("{}^*{}", functor.name(), g.name), ft.src.clone(), levels, res, act)?)
}

/// `F^*Y` for a presheaf on the target site.
pub fn restrict_presheaf(functor: SiteFunctor, y: &Presheaf) -> Result<Presheaf, BaseChangeError> {
    let ft = functor.tables(y.truncation())?;
    let sizes = ft.src.levels().map(|a| y.size(functor.level(a))).collect();
    Ok(Presheaf::from_fn(ft.src.clone(), sizes, |b, a, k, x| {
        y.restrict(functor.level(b), functor.level(a), ft.fwd[a][b][k] as usize, x)
    }))
}

/// `F^*M` over `F^*G`.
pub fn restrict_monoid(functor: SiteFunctor, m: &CrossedMonoid) -> Result<CrossedMonoid, BaseChangeError> {
    let base = Arc::new(restrict_crossed(functor, &m.obj.base)?);
    let set = restrict_presheaf(functor, &m.obj.set)?;
    let levels = base.truncation().levels();
    let p = levels.clone().map(|a| m.obj.p[functor.level(a)].clone()).collect();
    let obj = SlicedObject::new(format!("{}^*{}", functor.name(), m.obj.name), set, base, p)?;
    let unit = levels.clone().map(|a| m.unit[functor.level(a)]).collect();
    let mul = levels.map(|a| m.mul[functor.level(a)].clone()).collect();
    Ok(CrossedMonoid { obj, unit, mul })
}

/// Restriction along a map `<m> -> <n>` of a presheaf extended from `Delta`:
/// a point at `<0>`, `X[n-1]` at `<n>`.
fn ran_j_restrict(src: &Truncation, b: usize, a: usize, map: &[u8], x: u32, f: impl Fn(usize, usize, usize, u32) -> u32) -> u32 {
    if b == 0 {
        return 0;
    }
    let k = src.find(b - 1, a - 1, map).expect("map between nonempty ordinals comes from Delta");
    f(b - 1, a - 1, k as usize, x)
}

/// Right Kan extension of a `Delta`-presheaf along `j`.
pub fn ran_j_presheaf(x: &Presheaf) -> Result<Presheaf, BaseChangeError> {
    let src = x.truncation().clone();
    if src.site != SiteId::Delta {
        return Err(BaseChangeError::WrongSite { expected: SiteId::Delta, got: src.site });
    }
    let dst = shared_truncation(SiteId::AugDelta, src.max_level + 1);
    let sizes = dst.levels().map(|a| if a == 0 { 1 } else { x.size(a - 1) }).collect();
    let d = dst.clone();
    Ok(Presheaf::from_fn(dst, sizes, move |b, a, k, e| {
        ran_j_restrict(&src, b, a, &d.homs(b, a)[k], e, |b, a, k, e| x.restrict(b, a, k, e))
    }))
}

/// `j_*G`: the trivial group at `<0>`, `G[n-1]` at `<n>`.
pub fn ran_j_group(g: &CrossedGroup) -> Result<CrossedGroup, BaseChangeError> {
    let src = g.truncation().clone();
    if src.site != SiteId::Delta {
        return Err(BaseChangeError::WrongSite { expected: SiteId::Delta, got: src.site });
    }
    let dst = shared_truncation(SiteId::AugDelta, src.max_level + 1);
    let n = dst.max_level + 1;
    let mut levels = Vec::with_capacity(n);
    let mut res = vec![vec![Vec::new(); n]; n];
    let mut act = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        levels.push(if a == 0 { GroupLevel::trivial() } else { g.level(a - 1).clone() });
        let o = levels[a].order() as u32;
        for b in 0..n {
            let homs = dst.homs(b, a);
            res[a][b] = homs
                .iter()
                .flat_map(|f| (0..o).map(move |x| (f, x)))
                .map(|(f, x)| ran_j_restrict(&src, b, a, f, x, |b, a, k, x| g.restrict(b, a, k, x)))
                .collect();
            let mut t = Vec::with_capacity(homs.len() * o as usize);
            for x in 0..o {
                for f in homs {
                    if b == 0 {
                        // the empty map is alone in its hom-set
                        t.push(0);
                        continue;
                    }
                    let k = src.find(b - 1, a - 1, f).expect("nonempty map") as usize;
                    let image = &src.homs(b - 1, a - 1)[g.act(b - 1, a - 1, k, x)];
                    t.push(dst.find(b, a, image).expect("same point map"));
                }
            }
            act[a][b] = t;
        }
    }
    Ok(CrossedGroup::from_parts(format!("j_*{}", g.name), dst, levels, res, act)?)
}

/// `j_*M` over `j_*G`.
pub fn ran_j_monoid(m: &CrossedMonoid) -> Result<CrossedMonoid, BaseChangeError> {
    let base = Arc::new(ran_j_group(&m.obj.base)?);
    let set = ran_j_presheaf(&m.obj.set)?;
    let levels = base.truncation().levels();
    let shift = |a: usize, v: &Vec<Vec<u32>>, unit: Vec<u32>| if a == 0 { unit } else { v[a - 1].clone() };
    let p = levels.clone().map(|a| shift(a, &m.obj.p, vec![0])).collect();
    let obj = SlicedObject::new(format!("j_*{}", m.obj.name), set, base, p)?;
    let unit = levels.clone().map(|a| if a == 0 { 0 } else { m.unit[a - 1] }).collect();
    let mul = levels.map(|a| shift(a, &m.mul, vec![0])).collect();
    let out = CrossedMonoid { obj, unit, mul };
    out.verify()?;
    Ok(out)
}

/// Read access to a monoid over a crossed group, so that large crossed groups
/// can be used without materialising a product table.
pub trait MonoidTables {
    fn base(&self) -> &Arc<CrossedGroup>;
    fn size(&self, a: usize) -> usize;
    fn unit(&self, a: usize) -> u32;
    fn mul(&self, a: usize, x: u32, y: u32) -> u32;
    fn restrict(&self, b: usize, a: usize, k: usize, x: u32) -> u32;
    fn structure(&self, a: usize, x: u32) -> u32;

    fn truncation(&self) -> &Arc<Truncation> {
        self.base().truncation()
    }

    /// `phi^x` for the `k`-th map `b -> a`.
    fn act(&self, b: usize, a: usize, k: usize, x: u32) -> usize {
        self.base().act(b, a, k, self.structure(a, x))
    }
}

impl MonoidTables for CrossedMonoid {
    fn base(&self) -> &Arc<CrossedGroup> {
        &self.obj.base
    }
    fn size(&self, a: usize) -> usize {
        self.obj.size(a)
    }
    fn unit(&self, a: usize) -> u32 {
        self.unit[a]
    }
    fn mul(&self, a: usize, x: u32, y: u32) -> u32 {
        CrossedMonoid::mul(self, a, x, y)
    }
    fn restrict(&self, b: usize, a: usize, k: usize, x: u32) -> u32 {
        self.obj.restrict(b, a, k, x)
    }
    fn structure(&self, a: usize, x: u32) -> u32 {
        self.obj.p[a][x as usize]
    }
}

/// A crossed group over `base` through a crossed map, read as a monoid.
pub struct GroupOver<'a> {
    pub group: &'a CrossedGroup,
    pub map: &'a CrossedMap,
    pub base: Arc<CrossedGroup>,
}

impl<'a> GroupOver<'a> {
    pub fn new(group: &'a CrossedGroup, map: &'a CrossedMap, base: Arc<CrossedGroup>) -> Result<Self, BaseChangeError> {
        map.check(group, &base)?;
        Ok(GroupOver { group, map, base })
    }
}

impl MonoidTables for GroupOver<'_> {
    fn base(&self) -> &Arc<CrossedGroup> {
        &self.base
    }
    fn size(&self, a: usize) -> usize {
        self.group.order(a)
    }
    fn unit(&self, _a: usize) -> u32 {
        0
    }
    fn mul(&self, a: usize, x: u32, y: u32) -> u32 {
        self.group.mul(a, x, y)
    }
    fn restrict(&self, b: usize, a: usize, k: usize, x: u32) -> u32 {
        self.group.restrict(b, a, k, x)
    }
    fn structure(&self, a: usize, x: u32) -> u32 {
        self.map.maps[a][x as usize]
    }
}

/// Whether the signed permutation of `<<n>>`'s points, read on `<n+2>`, keeps
/// the endpoints as a pair, fixing them with sign `+` or swapping them with sign `-`.
fn endpoint_sign(s: &SignedPerm) -> Option<u8> {
    let last = s.len() - 1;
    let (lo, hi) = (s.perm[0] as usize, s.perm[last] as usize);
    let (e0, e1) = (s.sign(0), s.sign(last));
    if lo == 0 && hi == last && e0 == 1 && e1 == 1 {
        Some(0)
    } else if lo == last && hi == 0 && e0 == -1 && e1 == -1 {
        Some(1)
    } else {
        None
    }
}

/// The interval-site monoid whose level `<<n>>` consists of the elements `x`
/// of `M<n+2>` with `theta(x) = 1` exactly when `p(x)` swaps the endpoints,
/// each endpoint carrying the sign `(-1)^theta(x)`, and no other point
/// landing on an endpoint. Restriction goes through the underlying maps
/// `<m+2> -> <n+2>` and the structure map reads `p(x)` in `W`.
///
/// `theta[a][x]` is a sign in `{0, 1}`; it must be multiplicative on the
/// selected elements and invariant under restriction.
pub fn ran_interval_monoid<M: MonoidTables>(
    m: &M,
    theta: &[Vec<u8>],
    w: Arc<CrossedGroup>,
) -> Result<CrossedMonoid, BaseChangeError> {
    let mt = m.truncation().clone();
    if mt.site != SiteId::AugDelta {
        return Err(BaseChangeError::WrongSite { expected: SiteId::AugDelta, got: mt.site });
    }
    if w.site() != SiteId::Nabla {
        return Err(BaseChangeError::WrongSite { expected: SiteId::Nabla, got: w.site() });
    }
    let wt = w.truncation().clone();
    if mt.max_level < wt.max_level + 2 {
        return Err(BaseChangeError::TooShallow { needed: wt.max_level + 2, got: mt.max_level });
    }
    for a in mt.levels() {
        if theta[a].len() != m.size(a) || theta[a][m.unit(a) as usize] != 0 {
            return Err(BaseChangeError::Theta(format!("unit at level {a}")));
        }
        for b in mt.levels() {
            for k in 0..mt.hom_count(b, a) {
                if let Some(x) = (0..m.size(a) as u32).find(|&x| theta[b][m.restrict(b, a, k, x) as usize] != theta[a][x as usize]) {
                    return Err(BaseChangeError::Theta(format!("{x} along {}", mt.morphism(b, a, k))));
                }
            }
        }
    }
    let mut members: Vec<Vec<u32>> = Vec::new();
    let mut images: Vec<Vec<u32>> = Vec::new();
    for n in wt.levels() {
        let (mut mem, mut img) = (Vec::new(), Vec::new());
        for x in 0..m.size(n + 2) as u32 {
            let s = m.base().signed(n + 2, m.structure(n + 2, x)).ok_or_else(|| {
                BaseChangeError::NotClosed(format!("base level {} is not signed", n + 2))
            })?;
            if endpoint_sign(s) != Some(theta[n + 2][x as usize]) {
                continue;
            }
            let g = w.find_signed(n, s).ok_or_else(|| BaseChangeError::NotClosed(format!("{s:?} is not in {} at level {n}", w.name)))?;
            mem.push(x);
            img.push(g);
        }
        // the unit first
        let e = m.unit(n + 2);
        let at = mem.iter().position(|&x| x == e).ok_or_else(|| BaseChangeError::NotClosed(format!("unit at level {n}")))?;
        mem.swap(0, at);
        img.swap(0, at);
        members.push(mem);
        images.push(img);
    }
    let pos: Vec<HashMap<u32, u32>> =
        members.iter().map(|mem| mem.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect()).collect();
    let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let mut closure_error = None;
    let set = Presheaf::checked_from_fn(wt.clone(), sizes.clone(), |b, a, k, i| {
        let kt = mt.find(b + 2, a + 2, &wt.homs(b, a)[k]).expect("underlying map") as usize;
        let y = m.restrict(b + 2, a + 2, kt, members[a][i as usize]);
        match pos[b].get(&y) {
            Some(&j) => j,
            None => {
                closure_error.get_or_insert_with(|| format!("restriction along {} leaves the subset", wt.morphism(b, a, k)));
                0
            }
        }
    });
    if let Some(e) = closure_error {
        return Err(BaseChangeError::NotClosed(e));
    }
    let set = set?;
    let mut mul = Vec::with_capacity(sizes.len());
    for n in wt.levels() {
        let mem = &members[n];
        let mut t = Vec::with_capacity(mem.len() * mem.len());
        for &x in mem {
            for &y in mem {
                let xy = m.mul(n + 2, x, y);
                if theta[n + 2][xy as usize] != theta[n + 2][x as usize] ^ theta[n + 2][y as usize] {
                    return Err(BaseChangeError::Theta(format!("({x},{y}) at level {}", n + 2)));
                }
                t.push(*pos[n].get(&xy).ok_or_else(|| BaseChangeError::NotClosed(format!("product at level {n}")))?);
            }
        }
        mul.push(t);
    }
    let obj = SlicedObject::new(format!("J_#({})", m.base().name), set, w, images)?;
    let out = CrossedMonoid { obj, unit: vec![0; sizes.len()], mul };
    out.verify()?;
    Ok(out)
}

/// A crossed monoid whose structure map is injective into signed
/// permutations, rebuilt as the crossed group of its images.
pub fn signed_group_of(m: &CrossedMonoid) -> Result<CrossedGroup, BaseChangeError> {
    let base = &m.obj.base;
    let mut levels = Vec::new();
    for a in base.truncation().levels() {
        let elems: Vec<SignedPerm> = m.obj.p[a]
            .iter()
            .map(|&g| base.signed(a, g).cloned().ok_or_else(|| BaseChangeError::NotClosed(format!("level {a} is not signed"))))
            .collect::<Result<_, _>>()?;
        let distinct: BTreeSet<&SignedPerm> = elems.iter().collect();
        if distinct.len() != elems.len() {
            return Err(BaseChangeError::NotClosed(format!("structure map is not injective at level {a}")));
        }
        levels.push(elems);
    }
    Ok(CrossedGroup::from_signed(m.obj.name.clone(), base.truncation().clone(), levels)?)
}

/// `tau_n: <<n+2>> -> <<n>>` collapsing the two outer points onto the endpoints.
pub fn tau(n: usize) -> SiteMorphism {
    let mut map = vec![0u8, 0];
    map.extend((2..=n + 1).map(|i| (i - 1) as u8));
    map.extend([n as u8 + 1, n as u8 + 1]);
    SiteMorphism::from_point_map(SiteId::Nabla, n + 2, n, &map)
}

/// Restricting `W<<n>>` along `tau_n` lands injectively in `W<<n+2>>` and hits
/// exactly the elements that fix the four outer points with sign `+` or
/// reverse them with sign `-`. Returns the image size.
pub fn tau_embedding(w: &CrossedGroup, n: usize) -> Result<usize, BaseChangeError> {
    if n + 2 > w.max_level() {
        return Err(BaseChangeError::TooShallow { needed: n + 2, got: w.max_level() });
    }
    let t = tau(n);
    let image: BTreeSet<u32> = (0..w.order(n) as u32).map(|x| w.restrict_morphism(&t, x)).collect();
    if image.len() != w.order(n) {
        return Err(BaseChangeError::NotClosed(format!("restriction along tau_{n} is not injective")));
    }
    let last = n + 3;
    let blocks = |s: &SignedPerm| {
        let outer = [0, 1, last - 1, last];
        let fixed = outer.iter().all(|&i| s.perm[i] as usize == i && s.sign(i) == 1);
        let swapped = outer.iter().all(|&i| s.perm[i] as usize == last - i && s.sign(i) == -1);
        fixed || swapped
    };
    let expected: BTreeSet<u32> = (0..w.order(n + 2) as u32)
        .filter(|&x| w.signed(n + 2, x).is_some_and(blocks))
        .collect();
    if expected != image {
        return Err(BaseChangeError::NotClosed(format!(
            "tau_{n} image has {} elements, block-preserving subset has {}",
            image.len(),
            expected.len()
        )));
    }
    Ok(image.len())
}

/// Left Kan extension of an augmented-site presheaf along `J`: level `<<n>>`
/// holds pairs `(x, rho)` with `rho: <<n>> -> <<k>>` interior-bijective and `x` in `X<k>`.
#[derive(Clone, Debug)]
pub struct LanInterval {
    pub set: Presheaf,
    /// `(k, x, rho)` with `rho` indexing `hom(n, k)` on the interval site.
    pub elements: Vec<Vec<(usize, u32, u32)>>,
    index: Vec<HashMap<(usize, u32, u32), u32>>,
}

impl LanInterval {
    pub fn index_of(&self, n: usize, k: usize, x: u32, rho: u32) -> Option<u32> {
        self.index[n].get(&(k, x, rho)).copied()
    }

    /// The unit `X -> J^* J_! X`, `x |-> (x, id)`.
    pub fn unit_element(&self, n: usize, x: u32) -> u32 {
        let id = self.set.truncation().identity(n);
        self.index_of(n, n, x, id).expect("identity is interior-bijective")
    }

    /// `f |-> f . unit` for `f: J_! X -> Y`.
    pub fn adjunct(&self, f: &[Vec<u32>]) -> Vec<Vec<u32>> {
        self.set
            .truncation()
            .levels()
            .map(|n| (0..self.source_size(n)).map(|x| f[n][self.unit_element(n, x as u32) as usize]).collect())
            .collect()
    }

    /// `g: X -> J^*Y` to `(x, rho) |-> rho^*(g(x))`.
    pub fn transpose(&self, y: &Presheaf, g: &[Vec<u32>]) -> Vec<Vec<u32>> {
        self.elements
            .iter()
            .enumerate()
            .map(|(n, els)| els.iter().map(|&(k, x, rho)| y.restrict(n, k, rho as usize, g[k][x as usize])).collect())
            .collect()
    }

    fn source_size(&self, n: usize) -> usize {
        self.elements[n].iter().filter(|e| e.0 == n && e.2 == self.set.truncation().identity(n)).count()
    }
}

pub fn lan_interval(x: &Presheaf) -> Result<LanInterval, BaseChangeError> {
    let xt = x.truncation().clone();
    if xt.site != SiteId::AugDelta {
        return Err(BaseChangeError::WrongSite { expected: SiteId::AugDelta, got: xt.site });
    }
    let nt = shared_truncation(SiteId::Nabla, xt.max_level);
    let mut elements = Vec::new();
    let mut index = Vec::new();
    for n in nt.levels() {
        let mut els = Vec::new();
        for k in 0..=n {
            for rho in 0..nt.hom_count(n, k) {
                if !is_interior_bijective(&nt.morphism(n, k, rho)) {
                    continue;
                }
                els.extend((0..x.size(k) as u32).map(|e| (k, e, rho as u32)));
            }
        }
        index.push(els.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect::<HashMap<_, _>>());
        elements.push(els);
    }
    // factor every composite rho . phi once
    let mut factor: HashMap<(usize, usize, u32), (usize, u32, u32)> = HashMap::default();
    let sizes = elements.iter().map(Vec::len).collect();
    let set = Presheaf::checked_from_fn(nt.clone(), sizes, |m, n, j, i| {
        let (k, e, rho) = elements[n][i as usize];
        let c = nt.compose_idx(m, n, k, rho as usize, j);
        let &mut (k2, mu, rho2) = factor.entry((m, k, c)).or_insert_with(|| {
            let (mu, rho2) = interval_factor(&nt.morphism(m, k, c as usize)).expect("interval map");
            (mu.dom, xt.index_of(&mu).expect("in range"), nt.index_of(&rho2).expect("in range"))
        });
        index[m][&(k2, x.restrict(k2, k, mu as usize, e), rho2)]
    })?;
    Ok(LanInterval { set, elements, index })
}

/// A letter `[x, phi]` of the left Kan extension: `x` in `M(b)` and `phi: a -> F(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Letter {
    pub source_level: usize,
    pub element: u32,
    pub map: u32,
}

/// One target level of the left Kan extension of a crossed monoid.
#[derive(Clone, Debug)]
pub struct LanLevel {
    pub letters: Vec<Letter>,
    /// Class of each letter under `[theta^* z, phi] ~ [z, F(theta) . phi]`, with all unit letters in one class.
    pub class_of: Vec<u32>,
    /// A representative letter for each class.
    pub reps: Vec<u32>,
    pub unit_class: Option<u32>,
    /// Value of the structure map on each class.
    pub structure: Vec<u32>,
    rules: HashMap<(u32, u32), u32>,
}

impl LanLevel {
    pub fn classes(&self) -> usize {
        self.reps.len()
    }

    pub fn rule(&self, c1: u32, c2: u32) -> Option<u32> {
        self.rules.get(&(c1, c2)).copied()
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    fn is_unit(&self, c: u32) -> bool {
        self.unit_class == Some(c)
    }
}

/// Ways the rewriting presentation can fail to describe a crossed monoid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConfluenceReport {
    /// `(level, c1, c2, results)`: a pair of classes with two different merges.
    pub ambiguous: Vec<(usize, u32, u32, Vec<u32>)>,
    /// `(level, detail)`: a letter identity forced by a unit merge that the classes miss.
    pub collapses: Vec<(usize, String)>,
    /// `(level, triple, left, right)`: a critical triple with two normal forms.
    pub critical: Vec<(usize, [u32; 3], Vec<u32>, Vec<u32>)>,
    /// `(level, class)`: the structure map is not constant on a class.
    pub structure: Vec<(usize, u32)>,
    pub triples_checked: u64,
}

impl ConfluenceReport {
    pub fn is_confluent(&self) -> bool {
        self.ambiguous.is_empty() && self.collapses.is_empty() && self.critical.is_empty() && self.structure.is_empty()
    }
}

/// `F_# M` presented by letters and merge rules, with normal forms of length
/// at most `cap`. Words are sequences of non-unit classes.
#[derive(Clone, Debug)]
pub struct LanMonoid {
    pub functor: SiteFunctor,
    pub target: Arc<CrossedGroup>,
    pub cap: usize,
    pub levels: Vec<LanLevel>,
    pub report: ConfluenceReport,
    letter_offsets: Vec<Vec<usize>>,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[parent[x as usize] as usize];
        parent[x as usize] = p;
        x = p;
    }
    x
}

fn union(parent: &mut [u32], x: u32, y: u32) {
    let (a, b) = (find(parent, x), find(parent, y));
    if a != b {
        let (lo, hi) = (a.min(b), a.max(b));
        parent[hi as usize] = lo;
    }
}

/// Left Kan extension of a crossed monoid over `F^*G` along `F`, as a crossed
/// monoid over `G`. The presentation is checked for local confluence on all
/// critical triples.
pub fn lan_crossed_monoid<M: MonoidTables>(
    functor: SiteFunctor,
    m: &M,
    target: Arc<CrossedGroup>,
    cap: usize,
) -> Result<LanMonoid, BaseChangeError> {
    let pulled = restrict_crossed(functor, &target)?;
    if !pulled.same_tables(m.base()) {
        return Err(BaseChangeError::BaseMismatch);
    }
    let ft = functor.tables(target.truncation())?;
    let (src, dst) = (ft.src.clone(), ft.dst.clone());
    let mut levels = Vec::new();
    let mut offsets = Vec::new();
    let mut report = ConfluenceReport::default();
    for a in dst.levels() {
        let mut off = Vec::with_capacity(src.max_level + 2);
        let mut letters = Vec::new();
        for b in src.levels() {
            off.push(letters.len());
            let fb = functor.level(b);
            for element in 0..m.size(b) as u32 {
                for map in 0..dst.hom_count(a, fb) as u32 {
                    letters.push(Letter { source_level: b, element, map });
                }
            }
        }
        off.push(letters.len());
        let letter = |b: usize, x: u32, phi: u32| (off[b] + x as usize * dst.hom_count(a, functor.level(b)) + phi as usize) as u32;
        let mut parent: Vec<u32> = (0..letters.len() as u32).collect();
        for b in src.levels() {
            for b2 in src.levels() {
                for t in 0..src.hom_count(b, b2) {
                    let ft_idx = ft.fwd[b2][b][t] as usize;
                    for z in 0..m.size(b2) as u32 {
                        let tz = m.restrict(b, b2, t, z);
                        for phi in 0..dst.hom_count(a, functor.level(b)) {
                            let right = dst.compose_idx(a, functor.level(b), functor.level(b2), ft_idx, phi);
                            union(&mut parent, letter(b, tz, phi as u32), letter(b2, z, right));
                        }
                    }
                }
            }
        }
        let mut unit_letter = None;
        for b in src.levels() {
            for phi in 0..dst.hom_count(a, functor.level(b)) as u32 {
                let l = letter(b, m.unit(b), phi);
                match unit_letter {
                    None => unit_letter = Some(l),
                    Some(u) => union(&mut parent, u, l),
                }
            }
        }
        let mut class_of = vec![u32::MAX; letters.len()];
        let mut reps = Vec::new();
        for l in 0..letters.len() as u32 {
            let r = find(&mut parent, l);
            if class_of[r as usize] == u32::MAX {
                class_of[r as usize] = reps.len() as u32;
                reps.push(l);
            }
            class_of[l as usize] = class_of[r as usize];
        }
        let unit_class = unit_letter.map(|u| class_of[u as usize]);
        let value = |l: &Letter| {
            let fb = functor.level(l.source_level);
            target.restrict(a, fb, l.map as usize, m.structure(l.source_level, l.element))
        };
        let mut structure = vec![u32::MAX; reps.len()];
        for (l, c) in letters.iter().zip(&class_of) {
            let v = value(l);
            let s = &mut structure[*c as usize];
            if *s == u32::MAX {
                *s = v;
            } else if *s != v && !report.structure.contains(&(a, *c)) {
                report.structure.push((a, *c));
            }
        }
        let mut rules: HashMap<(u32, u32), BTreeSet<u32>> = HashMap::default();
        for b in src.levels() {
            let fb = functor.level(b);
            for phi in 0..dst.hom_count(a, fb) as u32 {
                for y in 0..m.size(b) as u32 {
                    let phi_y = target.act(a, fb, phi as usize, m.structure(b, y)) as u32;
                    let c2 = class_of[letter(b, y, phi) as usize];
                    for x in 0..m.size(b) as u32 {
                        let c1 = class_of[letter(b, x, phi_y) as usize];
                        let r = class_of[letter(b, m.mul(b, x, y), phi) as usize];
                        let (u1, u2) = (unit_class == Some(c1), unit_class == Some(c2));
                        if u1 || u2 {
                            let other = if u1 { c2 } else { c1 };
                            if r != other {
                                report.collapses.push((a, format!("[{x}*{y}] at source level {b} along map {phi}")));
                            }
                            continue;
                        }
                        rules.entry((c1, c2)).or_default().insert(r);
                    }
                }
            }
        }
        let mut single = HashMap::default();
        for ((c1, c2), rs) in rules {
            if rs.len() > 1 {
                report.ambiguous.push((a, c1, c2, rs.iter().copied().collect()));
            }
            single.insert((c1, c2), *rs.iter().next().expect("nonempty"));
        }
        report.ambiguous.sort();
        levels.push(LanLevel { letters, class_of, reps, unit_class, structure, rules: single });
        offsets.push(off);
    }
    let mut lan = LanMonoid { functor, target, cap, levels, report, letter_offsets: offsets };
    lan.check_critical_triples();
    Ok(lan)
}

impl LanMonoid {
    pub fn truncation(&self) -> &Arc<Truncation> {
        self.target.truncation()
    }

    /// Class of `[x, phi]` at target level `a`.
    pub fn class(&self, a: usize, b: usize, x: u32, phi: u32) -> u32 {
        let h = self.truncation().hom_count(a, self.functor.level(b));
        self.levels[a].class_of[self.letter_offsets[a][b] + x as usize * h + phi as usize]
    }

    /// The one-letter word `[x, id]` at level `F(b)`, empty for units.
    pub fn unit_map(&self, b: usize, x: u32) -> Vec<u32> {
        let a = self.functor.level(b);
        let id = self.truncation().identity(a);
        self.reduce(a, &[self.class(a, b, x, id)])
    }

    /// Leftmost normal form: letters are pushed one at a time and merged with
    /// the top of the stack while a rule applies.
    pub fn reduce(&self, a: usize, word: &[u32]) -> Vec<u32> {
        let lv = &self.levels[a];
        let mut stack: Vec<u32> = Vec::with_capacity(word.len());
        for &c in word {
            let mut cur = Some(c).filter(|&c| !lv.is_unit(c));
            while let Some(c) = cur {
                match stack.last().and_then(|&top| lv.rule(top, c)) {
                    Some(r) => {
                        stack.pop();
                        cur = Some(r).filter(|&r| !lv.is_unit(r));
                    }
                    None => {
                        stack.push(c);
                        cur = None;
                    }
                }
            }
        }
        stack
    }

    pub fn is_normal(&self, a: usize, word: &[u32]) -> bool {
        let lv = &self.levels[a];
        word.iter().all(|&c| !lv.is_unit(c)) && word.windows(2).all(|w| lv.rule(w[0], w[1]).is_none())
    }

    pub fn mul(&self, a: usize, u: &[u32], v: &[u32]) -> Result<Vec<u32>, BaseChangeError> {
        let w: Vec<u32> = u.iter().chain(v).copied().collect();
        let r = self.reduce(a, &w);
        if r.len() > self.cap {
            return Err(BaseChangeError::CapOverflow { len: r.len(), cap: self.cap });
        }
        Ok(r)
    }

    /// Product of the structure values of the letters.
    pub fn structure(&self, a: usize, word: &[u32]) -> u32 {
        word.iter().fold(0, |acc, &c| self.target.mul(a, acc, self.levels[a].structure[c as usize]))
    }

    pub fn act(&self, b: usize, a: usize, k: usize, word: &[u32]) -> usize {
        self.target.act(b, a, k, self.structure(a, word))
    }

    /// Restriction along the `k`-th map `b -> a`. Letter `i` moves along
    /// `psi` twisted by the structure of the letters after it.
    pub fn restrict(&self, b: usize, a: usize, k: usize, word: &[u32]) -> Vec<u32> {
        let t = self.truncation();
        let mut psi = k;
        let mut out = Vec::with_capacity(word.len());
        for &c in word.iter().rev() {
            let l = self.levels[a].letters[self.levels[a].reps[c as usize] as usize];
            let fb = self.functor.level(l.source_level);
            let map = t.compose_idx(b, a, fb, l.map as usize, psi);
            out.push(self.class(b, l.source_level, l.element, map));
            psi = self.target.act(b, a, psi, self.levels[a].structure[c as usize]);
        }
        out.reverse();
        self.reduce(b, &out)
    }

    /// Restriction of a single letter depends only on its class.
    pub fn restriction_is_well_defined(&self) -> bool {
        let t = self.truncation();
        t.levels().all(|a| {
            let lv = &self.levels[a];
            t.levels().all(|b| {
                (0..t.hom_count(b, a)).all(|k| {
                    lv.letters.iter().zip(&lv.class_of).all(|(l, &c)| {
                        let fb = self.functor.level(l.source_level);
                        let map = t.compose_idx(b, a, fb, l.map as usize, k);
                        let direct = self.reduce(b, &[self.class(b, l.source_level, l.element, map)]);
                        direct == self.restrict(b, a, k, &[c])
                    })
                })
            })
        })
    }

    /// Normal forms of length at most `len`, shortest first.
    pub fn normal_forms(&self, a: usize, len: usize, limit: usize) -> Result<Vec<Vec<u32>>, BaseChangeError> {
        let lv = &self.levels[a];
        let letters: Vec<u32> = (0..lv.classes() as u32).filter(|&c| !lv.is_unit(c)).collect();
        let mut out = vec![Vec::new()];
        let mut frontier = vec![Vec::new()];
        for _ in 0..len.min(self.cap) {
            let mut next = Vec::new();
            for w in &frontier {
                for &c in &letters {
                    if w.last().is_some_and(|&l| lv.rule(l, c).is_some()) {
                        continue;
                    }
                    let mut v: Vec<u32> = w.clone();
                    v.push(c);
                    next.push(v);
                    if out.len() + next.len() > limit {
                        return Err(BaseChangeError::TooMany { level: a, limit });
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(out)
    }

    fn check_critical_triples(&mut self) {
        let mut critical = Vec::new();
        let mut checked = 0u64;
        for (a, lv) in self.levels.iter().enumerate() {
            let mut by_first: HashMap<u32, Vec<(u32, u32)>> = HashMap::default();
            for (&(c1, c2), &r) in &lv.rules {
                by_first.entry(c1).or_default().push((c2, r));
            }
            let mut keys: Vec<_> = lv.rules.iter().map(|(&k, &r)| (k, r)).collect();
            keys.sort();
            for ((c1, c2), r12) in keys {
                let Some(nexts) = by_first.get(&c2) else { continue };
                for &(c3, r23) in nexts {
                    checked += 1;
                    let left = self.reduce(a, &[r12, c3]);
                    let right = self.reduce(a, &[c1, r23]);
                    if left != right {
                        critical.push((a, [c1, c2, c3], left, right));
                    }
                }
            }
        }
        critical.sort();
        self.report.critical = critical;
        self.report.triples_checked = checked;
    }
}

/// Components of a monoid on `Delta` at level `[0]`, with the product they inherit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pi0 {
    pub class_of: Vec<u32>,
    pub size: usize,
    /// `mul[c * size + d]`.
    pub mul: Vec<u32>,
    pub unit: u32,
}

impl Pi0 {
    pub fn mul(&self, c: u32, d: u32) -> u32 {
        self.mul[c as usize * self.size + d as usize]
    }
}

/// `pi_0(M) = M[0] / (d0 x ~ d1 x)`; checks that the product of classes does
/// not depend on representatives and that every vertex map `M[n] -> pi_0` is multiplicative.
pub fn pi0_monoid<M: MonoidTables>(m: &M) -> Result<Pi0, BaseChangeError> {
    let t = m.truncation().clone();
    if t.site != SiteId::Delta {
        return Err(BaseChangeError::WrongSite { expected: SiteId::Delta, got: t.site });
    }
    let s0 = m.size(0);
    let mut parent: Vec<u32> = (0..s0 as u32).collect();
    if t.max_level >= 1 {
        for x in 0..m.size(1) as u32 {
            let faces: Vec<u32> = (0..t.hom_count(0, 1)).map(|k| m.restrict(0, 1, k, x)).collect();
            for w in faces.windows(2) {
                union(&mut parent, w[0], w[1]);
            }
        }
    }
    let mut class_of = vec![0u32; s0];
    let mut labels: HashMap<u32, u32> = HashMap::default();
    for x in 0..s0 as u32 {
        let r = find(&mut parent, x);
        let next = labels.len() as u32;
        class_of[x as usize] = *labels.entry(r).or_insert(next);
    }
    let size = labels.len();
    let mut mul = vec![u32::MAX; size * size];
    for x in 0..s0 as u32 {
        for y in 0..s0 as u32 {
            let (cx, cy) = (class_of[x as usize], class_of[y as usize]);
            let v = class_of[m.mul(0, x, y) as usize];
            let slot = &mut mul[cx as usize * size + cy as usize];
            if *slot == u32::MAX {
                *slot = v;
            } else if *slot != v {
                return Err(BaseChangeError::NotClosed(format!("product of components depends on representatives at ({x},{y})")));
            }
        }
    }
    let pi = Pi0 { class_of, size, mul, unit: 0 };
    let pi = Pi0 { unit: pi.class_of[m.unit(0) as usize], ..pi };
    for n in t.levels() {
        let vertex = |x: u32| -> Result<u32, BaseChangeError> {
            let cs: BTreeSet<u32> = (0..t.hom_count(0, n)).map(|k| pi.class_of[m.restrict(0, n, k, x) as usize]).collect();
            if cs.len() != 1 {
                return Err(BaseChangeError::NotClosed(format!("vertices of {x} at level {n} lie in different components")));
            }
            Ok(*cs.iter().next().expect("one class"))
        };
        for x in 0..m.size(n) as u32 {
            let vx = vertex(x)?;
            for y in 0..m.size(n) as u32 {
                if vertex(m.mul(n, x, y))? != pi.mul(vx, vertex(y)?) {
                    return Err(BaseChangeError::NotClosed(format!("vertex map is not multiplicative at level {n}")));
                }
            }
        }
    }
    Ok(pi)
}
