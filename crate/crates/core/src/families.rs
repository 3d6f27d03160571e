//! The standard crossed groups: symmetric, cyclic, dihedral, reflexive,
//! reflexosymmetric, hyperoctahedral and Weyl, together with the canonical
//! map into the Weyl crossed group and the search that shows it is unique.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::crossed::{generate_from, CrossedError, CrossedGroup, CrossedMap, Family};
use crate::group::GroupLevel;
use crate::signed::{permutations, SignedPerm};
use crate::site::{hom_maps, iotas, refl, shared_truncation, SiteId, SiteMorphism, Truncation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("{0} is not a permutation of the codomain points")]
    NotAPermutation(String),
    #[error("permutation moves an endpoint of the interval object")]
    MovesEndpoint,
    #[error("level mismatch: element has {got} points, codomain has {expected}")]
    LevelMismatch { expected: usize, got: usize },
    #[error("probe cap {cap} is below the required {needed}")]
    ProbeCapTooSmall { cap: usize, needed: usize },
    #[error("probe cap {cap} is above the supported {max}")]
    ProbeCapTooLarge { cap: usize, max: usize },
    #[error("rotation by {shift} is not an element of C_{n}")]
    NotARotation { shift: usize, n: usize },
    #[error("the family is not defined on {0}")]
    WrongSite(SiteId),
    #[error(transparent)]
    Crossed(#[from] CrossedError),
}

/// Names of the shipped families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Trivial,
    Reflexive,
    Cyclic,
    Dihedral,
    Symmetric,
    Reflexosymmetric,
    Hyperoctahedral,
    Weyl,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 8] = [
        FamilyKind::Trivial,
        FamilyKind::Reflexive,
        FamilyKind::Cyclic,
        FamilyKind::Dihedral,
        FamilyKind::Symmetric,
        FamilyKind::Reflexosymmetric,
        FamilyKind::Hyperoctahedral,
        FamilyKind::Weyl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Trivial => "trivial",
            FamilyKind::Reflexive => "reflexive",
            FamilyKind::Cyclic => "cyclic",
            FamilyKind::Dihedral => "dihedral",
            FamilyKind::Symmetric => "symmetric",
            FamilyKind::Reflexosymmetric => "reflexosymmetric",
            FamilyKind::Hyperoctahedral => "hyperoctahedral",
            FamilyKind::Weyl => "weyl",
        }
    }

    pub fn parse(s: &str) -> Option<FamilyKind> {
        Some(match s {
            "trivial" => FamilyKind::Trivial,
            "reflexive" | "c2" => FamilyKind::Reflexive,
            "cyclic" | "cyc" | "lambda" => FamilyKind::Cyclic,
            "dihedral" | "dih" => FamilyKind::Dihedral,
            "symmetric" | "sym" => FamilyKind::Symmetric,
            "reflexosymmetric" | "sym-tilde" => FamilyKind::Reflexosymmetric,
            "hyperoctahedral" | "hyp" => FamilyKind::Hyperoctahedral,
            "weyl" | "w" => FamilyKind::Weyl,
            _ => return None,
        })
    }
}

/// Interior point indices of a level (everything except the interval endpoints).
fn interior(site: SiteId, n: usize) -> std::ops::Range<usize> {
    match site {
        SiteId::Nabla => 1..n + 1,
        _ => 0..site.points(n),
    }
}

/// Extends a permutation of the interior by the identity on the endpoints.
fn extend_interior(site: SiteId, n: usize, inner: &[u8]) -> Vec<u8> {
    match site {
        SiteId::Nabla => {
            let mut p = vec![0u8];
            p.extend(inner.iter().map(|&v| v + 1));
            p.push((n + 1) as u8);
            p
        }
        _ => inner.to_vec(),
    }
}

fn interior_len(site: SiteId, n: usize) -> usize {
    interior(site, n).len()
}

/// The full reversal with every sign negative.
pub fn reflection(site: SiteId, n: usize) -> SignedPerm {
    let p = site.points(n);
    SignedPerm { perm: (0..p as u8).rev().collect(), neg: (1u32 << p) - 1 }
}

/// Rotation `i -> i + shift` of the interior points, cyclically.
pub fn rotation(site: SiteId, n: usize, shift: usize) -> SignedPerm {
    let m = interior_len(site, n);
    let inner: Vec<u8> = (0..m).map(|i| ((i + shift) % m.max(1)) as u8).collect();
    SignedPerm::plain(extend_interior(site, n, &inner))
}

fn symmetric_level(site: SiteId, n: usize) -> Vec<SignedPerm> {
    permutations(interior_len(site, n)).into_iter().map(|p| SignedPerm::plain(extend_interior(site, n, &p))).collect()
}

fn hyperoctahedral_level(site: SiteId, n: usize) -> Vec<SignedPerm> {
    let m = interior_len(site, n);
    let mut out = Vec::new();
    for p in permutations(m) {
        let perm = extend_interior(site, n, &p);
        for signs in 0u32..(1 << m) {
            let neg = match site {
                SiteId::Nabla => signs << 1,
                _ => signs,
            };
            out.push(SignedPerm { perm: perm.clone(), neg });
        }
    }
    out
}

/// Closed form of the Weyl group at one level: all signed permutations, and on
/// the interval site those permuting the endpoints by the common sign of both endpoints.
pub fn weyl_closed_form(site: SiteId, n: usize) -> Vec<SignedPerm> {
    let base = hyperoctahedral_level(site, n);
    match site {
        SiteId::Nabla => {
            let last = n + 1;
            let flip = SignedPerm {
                perm: {
                    let mut p: Vec<u8> = (0..site.points(n) as u8).collect();
                    p.swap(0, last);
                    p
                },
                neg: 1 | (1 << last),
            };
            let mut out = base.clone();
            out.extend(base.iter().map(|x| x.mul(&flip)));
            out
        }
        _ => base,
    }
}

fn build(name: &str, trunc: Arc<Truncation>, level: impl Fn(usize) -> Vec<SignedPerm>) -> Result<CrossedGroup, FamilyError> {
    let levels = trunc.levels().map(&level).collect();
    Ok(CrossedGroup::from_signed(name, trunc, levels)?)
}

pub fn symmetric(site: SiteId, max_level: usize) -> Result<CrossedGroup, FamilyError> {
    build("symmetric", shared_truncation(site, max_level), |n| symmetric_level(site, n))
}

pub fn hyperoctahedral(site: SiteId, max_level: usize) -> Result<CrossedGroup, FamilyError> {
    build("hyperoctahedral", shared_truncation(site, max_level), |n| hyperoctahedral_level(site, n))
}

pub fn weyl(site: SiteId, max_level: usize) -> Result<CrossedGroup, FamilyError> {
    build("weyl", shared_truncation(site, max_level), |n| weyl_closed_form(site, n))
}

pub fn reflexive(site: SiteId, max_level: usize) -> Result<CrossedGroup, FamilyError> {
    build("reflexive", shared_truncation(site, max_level), |n| {
        let r = reflection(site, n);
        let mut v = vec![SignedPerm::identity(site.points(n))];
        if !r.is_identity() {
            v.push(r);
        }
        v
    })
}

pub fn reflexosymmetric(site: SiteId, max_level: usize) -> Result<CrossedGroup, FamilyError> {
    build("reflexosymmetric", shared_truncation(site, max_level), |n| {
        let r = reflection(site, n);
        let sym = symmetric_level(site, n);
        let mut out: Vec<SignedPerm> = sym.iter().map(|s| s.mul(&r)).collect();
        out.extend(sym);
        out
    })
}

/// Rotations of the interior. Not closed under restriction on the interval site.
pub fn cyclic(site: SiteId, max_level: usize) -> Result<CrossedGroup, FamilyError> {
    build("cyclic", shared_truncation(site, max_level), |n| {
        let m = interior_len(site, n);
        (0..m.max(1)).map(|k| rotation(site, n, k)).collect()
    })
}

/// Generated by the rotation and the reflection at every level. The generation
/// runs inside the reflexosymmetric group, a crossed subgroup of the Weyl group
/// containing both generators, so the result is the same and much cheaper.
pub fn dihedral(site: SiteId, max_level: usize) -> Result<CrossedGroup, FamilyError> {
    if site == SiteId::Nabla {
        return Err(FamilyError::WrongSite(site));
    }
    let w = reflexosymmetric(site, max_level)?;
    let gens = w
        .truncation()
        .levels()
        .map(|n| {
            [rotation(site, n, 1), reflection(site, n)].iter().filter_map(|e| w.find_signed(n, e)).collect()
        })
        .collect();
    let fam = generate_from(&w, gens);
    Ok(w.subgroup_table(&fam, "dihedral")?.0)
}

pub fn trivial(site: SiteId, max_level: usize) -> CrossedGroup {
    CrossedGroup::trivial(shared_truncation(site, max_level))
}

pub fn family(kind: FamilyKind, site: SiteId, max_level: usize) -> Result<CrossedGroup, FamilyError> {
    match kind {
        FamilyKind::Trivial => Ok(trivial(site, max_level)),
        FamilyKind::Reflexive => reflexive(site, max_level),
        FamilyKind::Cyclic => cyclic(site, max_level),
        FamilyKind::Dihedral => dihedral(site, max_level),
        FamilyKind::Symmetric => symmetric(site, max_level),
        FamilyKind::Reflexosymmetric => reflexosymmetric(site, max_level),
        FamilyKind::Hyperoctahedral => hyperoctahedral(site, max_level),
        FamilyKind::Weyl => weyl(site, max_level),
    }
}

/// `G x C2` with the second factor constant and acting trivially.
pub fn times_constant_c2(g: &CrossedGroup) -> CrossedGroup {
    let trunc = g.truncation().clone();
    let n = trunc.max_level + 1;
    let c2 = Arc::new(GroupLevel::from_dense(2, vec![0, 1, 1, 0]));
    let mut levels = Vec::with_capacity(n);
    for a in 0..n {
        let pairs = (0..g.order(a) as u32).flat_map(|x| [(x, 0), (x, 1)]).collect();
        levels.push(GroupLevel::from_pairs(g.level_arc(a), c2.clone(), pairs));
    }
    // pairs (x, c) are sorted, so (x, c) has index 2x + c
    let mut res = vec![vec![Vec::new(); n]; n];
    let mut act = vec![vec![Vec::new(); n]; n];
    for a in 0..n {
        let o = g.order(a) as u32;
        for b in 0..n {
            let h = trunc.hom_count(b, a);
            let mut r = Vec::with_capacity(2 * h * o as usize);
            for k in 0..h {
                for x in 0..o {
                    let y = g.restrict(b, a, k, x);
                    r.extend([2 * y, 2 * y + 1]);
                }
            }
            res[a][b] = r;
            let mut t = Vec::with_capacity(2 * h * o as usize);
            for x in 0..o {
                for _ in 0..2 {
                    t.extend((0..h).map(|k| g.act(b, a, k, x) as u32));
                }
            }
            act[a][b] = t;
        }
    }
    CrossedGroup::from_parts(format!("{} x C2", g.name), trunc, levels, res, act).expect("product shapes")
}

fn check_perm(sigma: &[u8], p: usize) -> Result<(), FamilyError> {
    let s = SignedPerm::plain(sigma.to_vec());
    if sigma.len() != p || !s.is_permutation() {
        return Err(FamilyError::NotAPermutation(format!("{sigma:?}")));
    }
    Ok(())
}

/// `phi^sigma` for a permutation of the codomain points (endpoint-fixing on the interval site).
pub fn sym_action(sigma: &[u8], phi: &SiteMorphism) -> Result<SiteMorphism, FamilyError> {
    let p = phi.site.points(phi.cod);
    check_perm(sigma, p)?;
    if phi.site == SiteId::Nabla && (sigma[0] != 0 || sigma[p - 1] as usize != p - 1) {
        return Err(FamilyError::MovesEndpoint);
    }
    let g = SignedPerm::plain(sigma.to_vec()).act(&phi.point_map());
    Ok(SiteMorphism::from_point_map(phi.site, phi.dom, phi.cod, &g))
}

/// `phi^*(sigma)`: the permutation of the domain points that carries each fiber
/// of `phi` monotonically onto the matching fiber of `phi^sigma`.
pub fn sym_restrict(phi: &SiteMorphism, sigma: &[u8]) -> Result<Vec<u8>, FamilyError> {
    let target = sym_action(sigma, phi)?.point_map();
    let f = phi.point_map();
    let p = phi.site.points(phi.cod);
    // walk both maps fiber by fiber
    let mut out = vec![0u8; f.len()];
    let mut next = vec![0usize; p];
    for j in 0..p {
        next[j] = target.iter().position(|&v| v as usize == j).unwrap_or(0);
    }
    for (d, &i) in f.iter().enumerate() {
        let j = sigma[i as usize] as usize;
        out[d] = next[j] as u8;
        next[j] += 1;
    }
    Ok(out)
}

/// Restriction of the rotation by `shift` on `<n>` along `mu: <m> -> <n>`: the
/// rotation of `<m>` by the number of points landing in the last `shift` points.
pub fn cyc_restrict(mu: &SiteMorphism, shift: usize) -> Result<usize, FamilyError> {
    if mu.site != SiteId::AugDelta {
        return Err(FamilyError::WrongSite(mu.site));
    }
    let n = mu.cod;
    if shift >= n.max(1) {
        return Err(FamilyError::NotARotation { shift, n });
    }
    let f = mu.point_map();
    let moved = f.iter().filter(|&&v| v as usize >= n - shift).count();
    Ok(if mu.dom == 0 { 0 } else { moved % mu.dom })
}

/// The formula `i + sigma(mu(i)) - mu(i)`, reduced into `1..=m`. It is kept to
/// document that it does not agree with the fiber construction in general.
pub fn cyc_formula_reduced_mod_domain(mu: &SiteMorphism, shift: usize) -> Vec<i64> {
    let n = mu.cod as i64;
    let m = mu.dom as i64;
    let f = mu.point_map();
    f.iter()
        .enumerate()
        .map(|(d, &v)| {
            let i = d as i64 + 1;
            let mi = v as i64 + 1;
            let si = (mi - 1 + shift as i64).rem_euclid(n) + 1;
            (i + si - mi - 1).rem_euclid(m) + 1
        })
        .collect()
}

/// `phi^*(sigma; eps)` assembled as `phi^*(sigma) . beta_phi(eps)` with the
/// signs pulled back along `phi`. On the interval site the endpoint signs must be `+1`.
pub fn hyp_restrict(phi: &SiteMorphism, x: &SignedPerm) -> Result<SignedPerm, FamilyError> {
    let p = phi.site.points(phi.cod);
    if x.len() != p {
        return Err(FamilyError::LevelMismatch { expected: p, got: x.len() });
    }
    if phi.site == SiteId::Nabla && (x.sign(0) < 0 || x.sign(p - 1) < 0) {
        return Err(FamilyError::MovesEndpoint);
    }
    let f = phi.point_map();
    let sym = sym_restrict(phi, &x.perm)?;
    // beta reverses each fiber over a negatively signed point
    let mut beta: Vec<u8> = (0..f.len() as u8).collect();
    for i in 0..p {
        if x.sign(i) < 0 {
            let fib: Vec<usize> = (0..f.len()).filter(|&d| f[d] as usize == i).collect();
            for (k, &d) in fib.iter().enumerate() {
                beta[d] = fib[fib.len() - 1 - k] as u8;
            }
        }
    }
    let perm = beta.iter().map(|&d| sym[d as usize]).collect();
    let signs: Vec<i8> = f.iter().map(|&v| x.sign(v as usize)).collect();
    Ok(SignedPerm::new(perm, &signs))
}

/// Whether `sigma` carries every `hom(c, b)`, `c <= probe_cap`, into itself.
fn preserves_homs(site: SiteId, b: usize, sigma: &SignedPerm, probe_cap: usize, homs: &HomCache) -> bool {
    let p = site.points(b);
    let mut sizes = vec![0usize; p];
    let mut image = Vec::new();
    (0..=probe_cap).all(|c| {
        homs.get(site, c, b).iter().all(|f| {
            // f^sigma written into a reused buffer
            sizes.iter_mut().for_each(|s| *s = 0);
            f.iter().for_each(|&v| sizes[sigma.perm[v as usize] as usize] += 1);
            image.clear();
            for (j, &k) in sizes.iter().enumerate() {
                image.extend(std::iter::repeat(j as u8).take(k));
            }
            site.admits(&image, b)
        })
    })
}

/// Hom-set point maps shared by the Weyl enumeration.
struct HomCache {
    maps: std::cell::RefCell<HashMap<(usize, usize), Arc<Vec<Vec<u8>>>>>,
}

impl HomCache {
    fn new() -> Self {
        HomCache { maps: std::cell::RefCell::new(HashMap::new()) }
    }

    fn get(&self, site: SiteId, c: usize, b: usize) -> Arc<Vec<Vec<u8>>> {
        self.maps.borrow_mut().entry((c, b)).or_insert_with(|| Arc::new(hom_maps(site, c, b))).clone()
    }
}

/// One level of the Weyl group found by testing the defining membership condition.
#[derive(Clone, Debug, Serialize)]
pub struct WeylLevel {
    pub site: SiteId,
    pub level: usize,
    pub probe_cap: usize,
    /// Size of the stabilizer of all representable images.
    pub stabilizer_order: usize,
    pub elements: Vec<SignedPerm>,
}

impl WeylLevel {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Enumerates `(sigma; eps)` with `sigma` preserving every hom-set into level `n`
/// and every restriction along a probe `b -> n`, `b <= probe_cap`, again such a permutation.
pub fn weyl_group(site: SiteId, n: usize, probe_cap: usize) -> Result<WeylLevel, FamilyError> {
    if probe_cap < n + 2 {
        return Err(FamilyError::ProbeCapTooSmall { cap: probe_cap, needed: n + 2 });
    }
    // probe levels are hashed with 4 bits per point
    let max = (0..).take_while(|&b| site.points(b) <= 12).last().unwrap_or(0);
    if probe_cap > max {
        return Err(FamilyError::ProbeCapTooLarge { cap: probe_cap, max });
    }
    let homs = HomCache::new();
    let p = site.points(n);
    let stab: Vec<SignedPerm> = permutations(p)
        .into_iter()
        .map(SignedPerm::plain)
        .filter(|s| preserves_homs(site, n, s, probe_cap, &homs))
        .collect();
    let mut memo: HashMap<(usize, u64), bool> = HashMap::new();
    let mut elements = Vec::new();
    for s in &stab {
        'signs: for neg in 0u32..(1 << p) {
            let x = SignedPerm { perm: s.perm.clone(), neg };
            for b in 0..=probe_cap {
                for f in homs.get(site, b, n).iter() {
                    let tau = SignedPerm::plain(x.restrict(f).perm);
                    let ok = *memo
                        .entry((b, tau.key()))
                        .or_insert_with(|| preserves_homs(site, b, &tau, probe_cap, &homs));
                    if !ok {
                        continue 'signs;
                    }
                }
            }
            elements.push(x);
        }
    }
    elements.sort();
    Ok(WeylLevel { site, level: n, probe_cap, stabilizer_order: stab.len(), elements })
}

/// Weyl crossed group whose levels come from [`weyl_group`] rather than the closed form.
pub fn weyl_enumerated(site: SiteId, max_level: usize, probe_extra: usize) -> Result<CrossedGroup, FamilyError> {
    let trunc = shared_truncation(site, max_level);
    let levels = trunc
        .levels()
        .map(|n| weyl_group(site, n, n + 2 + probe_extra).map(|w| w.elements))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CrossedGroup::from_signed("weyl", trunc, levels)?)
}

/// Wreath-product multiplication `(s; x)(t; y) = (st; (x_{t(i)} y_i)_i)` on
/// hyperoctahedral elements written as permutation and sign lists.
pub fn wreath_mul(a: (&[u8], &[i8]), b: (&[u8], &[i8])) -> (Vec<u8>, Vec<i8>) {
    let perm = b.0.iter().map(|&j| a.0[j as usize]).collect();
    let signs = (0..b.0.len()).map(|i| a.1[b.0[i] as usize] * b.1[i]).collect();
    (perm, signs)
}

/// The canonical signed permutation of an element: its action on the points,
/// with the sign at `alpha` read off from how the restriction along `refl(alpha)`
/// orders the two co-relation legs.
pub fn canonical_element(g: &CrossedGroup, a: usize, x: u32) -> SignedPerm {
    let trunc = g.truncation();
    let site = g.site();
    let s = site.generator();
    let sb = site.corelation();
    assert!(sb <= trunc.max_level, "the canonical map needs levels up to {sb}");
    let (i0, i1) = iotas(site);
    let k0 = trunc.index_of(&i0).expect("iota0") as usize;
    let k1 = trunc.index_of(&i1).expect("iota1") as usize;
    let p = site.points(a);
    let mut perm = vec![0u8; p];
    let mut neg = 0u32;
    for alpha in 0..trunc.hom_count(s, a) {
        // hom(s, a) is listed in point order, so the index is the point
        let image = g.act(s, a, alpha, x);
        perm[alpha] = image as u8;
        let r = refl(&trunc.morphism(s, a, alpha));
        let y = g.restrict_morphism(&r, x);
        if g.act(s, sb, k0, y) > g.act(s, sb, k1, y) {
            neg |= 1 << alpha;
        }
    }
    SignedPerm { perm, neg }
}

/// The canonical map into the Weyl crossed group `w` (same site and truncation).
pub fn canonical_map(g: &CrossedGroup, w: &CrossedGroup) -> Result<CrossedMap, FamilyError> {
    let mut maps = Vec::new();
    for a in g.truncation().levels() {
        let mut m = Vec::with_capacity(g.order(a));
        for x in 0..g.order(a) as u32 {
            let e = canonical_element(g, a, x);
            let idx = w.find_signed(a, &e).ok_or_else(|| {
                CrossedError::BadMap { check: "canonical-in-weyl", level: a, detail: format!("{e:?}") }
            })?;
            m.push(idx);
        }
        maps.push(m);
    }
    let f = CrossedMap { maps };
    f.check(g, w)?;
    Ok(f)
}

#[derive(Clone, Debug)]
pub struct TerminalityReport {
    pub maps_found: usize,
    pub unique: bool,
    pub matches_canonical: bool,
    pub witness: CrossedMap,
}

/// All homomorphisms `G(a) -> W(a)` agreeing with the actions of `G(a)` on every hom-set into `a`.
fn action_compatible_homs(g: &CrossedGroup, w: &CrossedGroup, a: usize) -> Vec<Vec<u32>> {
    let trunc = g.truncation();
    let gens = g.level(a).generators();
    let sig = |grp: &CrossedGroup, x: u32| -> Vec<usize> {
        trunc
            .levels()
            .flat_map(|b| (0..trunc.hom_count(b, a)).map(move |k| (b, k)))
            .map(|(b, k)| grp.act(b, a, k, x))
            .collect()
    };
    let mut by_sig: HashMap<Vec<usize>, Vec<u32>> = HashMap::new();
    for y in 0..w.order(a) as u32 {
        by_sig.entry(sig(w, y)).or_default().push(y);
    }
    let cands: Vec<Vec<u32>> = gens.iter().map(|&s| by_sig.get(&sig(g, s)).cloned().unwrap_or_default()).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; gens.len()];
    if cands.iter().any(Vec::is_empty) {
        return out;
    }
    loop {
        let images: Vec<u32> = choice.iter().zip(&cands).map(|(&c, v)| v[c]).collect();
        if let Some(f) = extend_hom(g, w, a, &gens, &images) {
            let compatible = (0..g.order(a) as u32).all(|x| sig(g, x) == sig(w, f[x as usize]));
            if compatible {
                out.push(f);
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == choice.len() {
                return out;
            }
            choice[i] += 1;
            if choice[i] < cands[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Extends generator images to a homomorphism along the Cayley graph, if consistent.
fn extend_hom(g: &CrossedGroup, w: &CrossedGroup, a: usize, gens: &[u32], images: &[u32]) -> Option<Vec<u32>> {
    let mut f = vec![u32::MAX; g.order(a)];
    f[0] = 0;
    let mut queue = std::collections::VecDeque::from([0u32]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in gens.iter().zip(images) {
            let y = g.mul(a, x, s);
            let v = w.mul(a, f[x as usize], t);
            if f[y as usize] == u32::MAX {
                f[y as usize] = v;
                queue.push_back(y);
            } else if f[y as usize] != v {
                return None;
            }
        }
    }
    // every edge was checked, so f respects right multiplication by generators
    Some(f)
}

/// Searches all crossed maps `G -> W` and compares with the canonical map.
pub fn terminality_check(g: &CrossedGroup, w: &CrossedGroup) -> Result<TerminalityReport, FamilyError> {
    let canonical = canonical_map(g, w)?;
    let trunc = g.truncation();
    let per_level: Vec<Vec<Vec<u32>>> = trunc.levels().map(|a| action_compatible_homs(g, w, a)).collect();
    let mut found = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    search(g, w, &per_level, &mut chosen, &mut found);
    let maps_found = found.len();
    let witness = found.into_iter().next().unwrap_or_else(|| canonical.clone());
    Ok(TerminalityReport {
        maps_found,
        unique: maps_found == 1,
        matches_canonical: maps_found == 1 && witness == canonical,
        witness,
    })
}

fn search(g: &CrossedGroup, w: &CrossedGroup, per: &[Vec<Vec<u32>>], chosen: &mut Vec<usize>, found: &mut Vec<CrossedMap>) {
    let a = chosen.len();
    if a == per.len() {
        found.push(CrossedMap { maps: chosen.iter().enumerate().map(|(l, &i)| per[l][i].clone()).collect() });
        return;
    }
    let trunc = g.truncation();
    for (i, fa) in per[a].iter().enumerate() {
        let natural = (0..a).all(|b| {
            let fb = &per[b][chosen[b]];
            // both directions between the new level and an earlier one
            (0..trunc.hom_count(b, a)).all(|k| {
                (0..g.order(a) as u32).all(|x| fb[g.restrict(b, a, k, x) as usize] == w.restrict(b, a, k, fa[x as usize]))
            }) && (0..trunc.hom_count(a, b)).all(|k| {
                (0..g.order(b) as u32).all(|x| fa[g.restrict(a, b, k, x) as usize] == w.restrict(a, b, k, fb[x as usize]))
            })
        });
        let self_natural = (0..trunc.hom_count(a, a)).all(|k| {
            (0..g.order(a) as u32).all(|x| fa[g.restrict(a, a, k, x) as usize] == w.restrict(a, a, k, fa[x as usize]))
        });
        if natural && self_natural {
            chosen.push(i);
            search(g, w, per, chosen, found);
            chosen.pop();
        }
    }
}

/// Family of the Weyl group consisting of the given signed elements at each level.
pub fn family_of(w: &CrossedGroup, sub: &CrossedGroup) -> Family {
    Family {
        levels: w
            .truncation()
            .levels()
            .map(|a| {
                let mut v: Vec<u32> = (0..sub.order(a) as u32)
                    .map(|x| w.find_signed(a, &canonical_element(sub, a, x)).expect("element of W"))
                    .collect();
                v.sort();
                v.dedup();
                v
            })
            .collect(),
    }
}

/// An explicit map from an enumerated Weyl level to the abstract group
/// `H_n = C2^n x| S_n` (times `C2` on the interval site), with the checks that it is an isomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct WeylIsomorphism {
    pub site: SiteId,
    pub level: usize,
    pub order: usize,
    /// Order of the abstract target, counted independently.
    pub target_order: usize,
    pub bijective: bool,
    pub multiplicative: bool,
}

impl WeylIsomorphism {
    pub fn is_isomorphism(&self) -> bool {
        self.bijective && self.multiplicative
    }
}

type Hyperoctahedral = ((Vec<u8>, Vec<i8>), u8);

/// Interior permutation and signs, plus whether the interval endpoints are swapped.
fn abstract_element(site: SiteId, x: &SignedPerm) -> Hyperoctahedral {
    match site {
        SiteId::Nabla => {
            let last = x.len() - 1;
            let perm = x.perm[1..last].iter().map(|&v| v.wrapping_sub(1)).collect();
            let signs = (1..last).map(|i| x.sign(i)).collect();
            ((perm, signs), u8::from(x.perm[0] as usize == last))
        }
        _ => ((x.perm.clone(), x.signs()), 0),
    }
}

pub fn weyl_isomorphism(w: &WeylLevel) -> WeylIsomorphism {
    let n = w.level;
    let m = match w.site {
        SiteId::Nabla => n,
        other => other.points(n),
    };
    let swaps: u8 = if w.site == SiteId::Nabla { 2 } else { 1 };
    let target: std::collections::BTreeSet<Hyperoctahedral> = permutations(m)
        .into_iter()
        .flat_map(|p| {
            (0u32..1 << m).flat_map(move |s| {
                let p = p.clone();
                (0..swaps).map(move |c| ((p.clone(), (0..m).map(|i| if s >> i & 1 == 1 { -1 } else { 1 }).collect()), c))
            })
        })
        .collect();
    let images: Vec<Hyperoctahedral> = w.elements.iter().map(|x| abstract_element(w.site, x)).collect();
    let distinct: std::collections::BTreeSet<&Hyperoctahedral> = images.iter().collect();
    let bijective = distinct.len() == images.len() && images.len() == target.len() && images.iter().all(|h| target.contains(h));
    let multiplicative = w.elements.iter().zip(&images).all(|(x, hx)| {
        w.elements.iter().zip(&images).all(|(y, hy)| {
            let (p, s) = wreath_mul((&hx.0 .0, &hx.0 .1), (&hy.0 .0, &hy.0 .1));
            abstract_element(w.site, &x.mul(y)) == ((p, s), hx.1 ^ hy.1)
        })
    });
    WeylIsomorphism { site: w.site, level: n, order: w.order(), target_order: target.len(), bijective, multiplicative }
}
