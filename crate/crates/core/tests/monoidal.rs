use std::sync::Arc;

use crossed_site::families::{self, canonical_map};
use crossed_site::monoidal::{
    crossed_group_as_monoid, free_crossed_monoid, invertibles, rtimes, semidirect, CrossedMonoid, MonoidalError,
    SlicedObject,
};
use crossed_site::presheaf::Presheaf;
use crossed_site::site::compose;
use crossed_site::{CrossedGroup, CrossedMap, SiteId};

const MAX: usize = 3;

fn weyl_aug() -> Arc<CrossedGroup> {
    Arc::new(families::weyl(SiteId::AugDelta, MAX).unwrap())
}

fn over_weyl(g: &CrossedGroup, w: &Arc<CrossedGroup>) -> SlicedObject {
    let f = canonical_map(g, w).unwrap();
    SlicedObject::of_group(g, &f, w.clone()).unwrap()
}

/// Representables, the symmetric and hyperoctahedral groups, the unit and a constant 2-set.
fn zoo(w: &Arc<CrossedGroup>) -> Vec<SlicedObject> {
    let t = w.truncation().clone();
    let nontrivial = |a: usize| (1..w.order(a) as u32).find(|&g| w.signed(a, g).unwrap().neg != 0).unwrap();
    vec![
        SlicedObject::representable(w.clone(), 1, 0),
        SlicedObject::representable(w.clone(), 1, nontrivial(1)),
        SlicedObject::representable(w.clone(), 2, nontrivial(2)),
        over_weyl(&families::symmetric(SiteId::AugDelta, MAX).unwrap(), w),
        over_weyl(&families::hyperoctahedral(SiteId::AugDelta, MAX).unwrap(), w),
        SlicedObject::unit(w.clone()),
        SlicedObject::over_unit("two", Presheaf::constant(t, 2), w.clone()).unwrap(),
    ]
}

#[test]
fn semidirect_over_trivial_structure_is_the_product() {
    let w = weyl_aug();
    let t = w.truncation().clone();
    let k = Presheaf::representable(t.clone(), 2);
    let x = SlicedObject::over_unit("two", Presheaf::constant(t.clone(), 2), w.clone()).unwrap();
    let kx = semidirect(&k, &x).unwrap();
    for a in t.levels() {
        for b in t.levels() {
            for phi in 0..t.hom_count(b, a) {
                for i in 0..kx.size(a) as u32 {
                    let (kv, xv) = (i / 2, i % 2);
                    assert_eq!(kx.restrict(b, a, phi, i), k.restrict(b, a, phi, kv) * 2 + xv);
                }
            }
        }
    }
}

#[test]
fn semidirect_with_terminal_is_the_underlying_presheaf() {
    let w = weyl_aug();
    for x in zoo(&w) {
        let s = semidirect(&Presheaf::terminal(w.truncation().clone()), &x).unwrap();
        assert!(s.same_tables(&x.set), "{}", x.name);
    }
}

#[test]
fn representable_twisted_by_hyperoctahedral() {
    // (k, x) restricts along phi to (k . phi^x, phi^*(x)), computed here with morphisms
    let w = weyl_aug();
    let t = w.truncation().clone();
    let h = over_weyl(&families::hyperoctahedral(SiteId::AugDelta, MAX).unwrap(), &w);
    let k = Presheaf::representable(t.clone(), 1);
    let kx = semidirect(&k, &h).unwrap();
    for a in t.levels() {
        for b in t.levels() {
            for phi in 0..t.hom_count(b, a) {
                let phi_m = t.morphism(b, a, phi);
                for kv in 0..k.size(a) as u32 {
                    let k_m = t.morphism(a, 1, kv as usize);
                    for xv in 0..h.size(a) as u32 {
                        let twisted = w.act_morphism(&phi_m, h.p[a][xv as usize]);
                        let new_k = t.index_of(&compose(&k_m, &twisted).unwrap()).unwrap();
                        let new_x = h.restrict(b, a, phi, xv);
                        let i = kv * h.size(a) as u32 + xv;
                        assert_eq!(kx.restrict(b, a, phi, i), new_k * h.size(b) as u32 + new_x);
                    }
                }
            }
        }
    }
}

#[test]
fn unit_laws_hold_on_the_nose() {
    let w = weyl_aug();
    let unit = SlicedObject::unit(w.clone());
    for x in zoo(&w) {
        assert!(rtimes(&unit, &x).unwrap().same_tables(&x), "{}", x.name);
        assert!(rtimes(&x, &unit).unwrap().same_tables(&x), "{}", x.name);
    }
}

#[test]
fn associativity_holds_on_the_nose_with_the_triple_formula() {
    let w = weyl_aug();
    let t = w.truncation().clone();
    let objs = zoo(&w);
    for x in &objs {
        for y in &objs {
            let xy = rtimes(x, y).unwrap();
            for z in &objs {
                let left = rtimes(&xy, z).unwrap();
                let right = rtimes(x, &rtimes(y, z).unwrap()).unwrap();
                assert!(left.same_tables(&right), "{} {} {}", x.name, y.name, z.name);
                // (x, y, z) restricts to (((phi^y)^z)^*(x), (phi^z)^*(y), phi^*(z))
                let a = MAX;
                for b in t.levels() {
                    for phi in 0..t.hom_count(b, a) {
                        for i in 0..x.size(a) as u32 {
                            for j in 0..y.size(a) as u32 {
                                for l in 0..z.size(a) as u32 {
                                    let phi_z = z.act(b, a, phi, l);
                                    let phi_zy = y.act(b, a, phi_z, j);
                                    let expect = (x.restrict(b, a, phi_zy, i) * y.size(b) as u32
                                        + y.restrict(b, a, phi_z, j))
                                        * z.size(b) as u32
                                        + z.restrict(b, a, phi, l);
                                    let idx = (i * y.size(a) as u32 + j) * z.size(a) as u32 + l;
                                    assert_eq!(left.restrict(b, a, phi, idx), expect);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn crs_is_natural_in_sliced_maps() {
    let w = weyl_aug();
    let t = w.truncation().clone();
    let sym = families::symmetric(SiteId::AugDelta, MAX).unwrap();
    let hyp = families::hyperoctahedral(SiteId::AugDelta, MAX).unwrap();
    let x = over_weyl(&sym, &w);
    let y = over_weyl(&hyp, &w);
    let f = canonical_map(&sym, &hyp).unwrap();
    assert!(x.is_sliced_map(&y, &f.maps));
    for a in t.levels() {
        for b in t.levels() {
            for phi in 0..t.hom_count(b, a) {
                for v in 0..x.size(a) as u32 {
                    let (p1, r1) = x.crs(b, a, v, phi);
                    let (p2, r2) = y.crs(b, a, f.maps[a][v as usize], phi);
                    assert_eq!((p1, f.maps[b][r1 as usize]), (p2, r2));
                }
            }
        }
    }
}

#[test]
fn pushforward_is_monoidal() {
    let w = weyl_aug();
    let sym = Arc::new(families::symmetric(SiteId::AugDelta, MAX).unwrap());
    let u = canonical_map(&sym, &w).unwrap();
    let objs = vec![
        SlicedObject::of_group(&sym, &CrossedMap::identity(&sym), sym.clone()).unwrap(),
        SlicedObject::representable(sym.clone(), 2, 1),
        SlicedObject::representable(sym.clone(), 1, 0),
        SlicedObject::over_unit("two", Presheaf::constant(sym.truncation().clone(), 2), sym.clone()).unwrap(),
    ];
    for x in &objs {
        for y in &objs {
            let over_g = rtimes(x, y).unwrap().pushforward(&u, w.clone()).unwrap();
            let over_h = rtimes(&x.pushforward(&u, w.clone()).unwrap(), &y.pushforward(&u, w.clone()).unwrap()).unwrap();
            assert!(over_g.same_tables(&over_h));
        }
    }
}

#[test]
fn crossed_groups_are_monoids() {
    let w = weyl_aug();
    let m = crossed_group_as_monoid(&w, &CrossedMap::identity(&w), w.clone()).unwrap();
    assert!(m.obj.same_tables(&SlicedObject::of_group(&w, &CrossedMap::identity(&w), w.clone()).unwrap()));
    let t = families::trivial(SiteId::AugDelta, MAX);
    let unit = crossed_group_as_monoid(&t, &canonical_map(&t, &w).unwrap(), w.clone()).unwrap();
    assert!(unit.obj.same_tables(&SlicedObject::unit(w.clone())));
    let wn = Arc::new(families::weyl(SiteId::Nabla, MAX).unwrap());
    let sym = families::symmetric(SiteId::Nabla, MAX).unwrap();
    crossed_group_as_monoid(&sym, &canonical_map(&sym, &wn).unwrap(), wn.clone()).unwrap();
}

#[test]
fn free_crossed_monoid_words() {
    let w = weyl_aug();
    let t = w.truncation().clone();
    let x = SlicedObject::representable(w.clone(), 2, 5);
    let fm = free_crossed_monoid(&x, 3);
    for a in t.levels() {
        let words = fm.words(a);
        let n = x.size(a);
        assert_eq!(words.len(), 1 + n + n * n + n * n * n);
        // empty word is fixed, letters restrict as in X
        for b in t.levels() {
            for phi in 0..t.hom_count(b, a) {
                assert!(fm.restrict(b, a, phi, &[]).is_empty());
                for v in 0..n as u32 {
                    assert_eq!(fm.restrict(b, a, phi, &[v]), vec![x.restrict(b, a, phi, v)]);
                }
            }
        }
    }
    // length-two words restrict like X ⋊ X
    let xx = rtimes(&x, &x).unwrap();
    for a in t.levels() {
        let n = x.size(a) as u32;
        for b in t.levels() {
            for phi in 0..t.hom_count(b, a) {
                for v in 0..n {
                    for u in 0..n {
                        let r = fm.restrict(b, a, phi, &[v, u]);
                        let i = xx.restrict(b, a, phi, v * n + u);
                        let nb = x.size(b) as u32;
                        assert_eq!(r, vec![i / nb, i % nb]);
                        assert_eq!(xx.p[a][(v * n + u) as usize], fm.structure(a, &[v, u]));
                    }
                }
            }
        }
    }
}

#[test]
fn free_crossed_monoid_is_a_presheaf_over_the_base() {
    let w = weyl_aug();
    let t = w.truncation().clone();
    let x = over_weyl(&families::symmetric(SiteId::AugDelta, MAX).unwrap(), &w);
    let fm = free_crossed_monoid(&x, 3);
    for a in t.levels() {
        for word in fm.words(a) {
            for b in t.levels() {
                for phi in 0..t.hom_count(b, a) {
                    let r = fm.restrict(b, a, phi, &word);
                    // the structure map is natural
                    assert_eq!(fm.structure(b, &r), w.restrict(b, a, phi, fm.structure(a, &word)));
                    for c in t.levels() {
                        for psi in 0..t.hom_count(c, b) {
                            let comp = t.compose_idx(c, b, a, phi, psi) as usize;
                            assert_eq!(fm.restrict(c, a, comp, &word), fm.restrict(c, b, psi, &r));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn free_crossed_monoid_products_are_natural_and_capped() {
    let w = weyl_aug();
    let t = w.truncation().clone();
    let x = SlicedObject::representable(w.clone(), 2, 3);
    let fm = free_crossed_monoid(&x, 2);
    let a = 2;
    let words = fm.words(a);
    for u in &words {
        for v in &words {
            match fm.mul(u, v) {
                Ok(uv) => {
                    for b in t.levels() {
                        for phi in 0..t.hom_count(b, a) {
                            let kv = fm.act(b, a, phi, v);
                            let rhs = fm.mul(&fm.restrict(b, a, kv, u), &fm.restrict(b, a, phi, v)).unwrap();
                            assert_eq!(fm.restrict(b, a, phi, &uv), rhs);
                        }
                    }
                }
                Err(e) => {
                    assert!(u.len() + v.len() > 2);
                    assert_eq!(e, MonoidalError::CapOverflow { left: u.len(), right: v.len(), cap: 2 });
                }
            }
        }
    }
}

#[test]
fn free_crossed_monoid_extends_sliced_maps() {
    // the structure map of X is a sliced map into W viewed as a monoid
    let w = weyl_aug();
    let t = w.truncation().clone();
    let x = SlicedObject::representable(w.clone(), 2, 5);
    let fm = free_crossed_monoid(&x, 3);
    let m = crossed_group_as_monoid(&w, &CrossedMap::identity(&w), w.clone()).unwrap();
    for a in t.levels() {
        for word in fm.words(a) {
            let image = fm.extend(&m, &x.p, a, &word);
            assert_eq!(image, fm.structure(a, &word));
            for b in t.levels() {
                for phi in 0..t.hom_count(b, a) {
                    let r = fm.restrict(b, a, phi, &word);
                    assert_eq!(fm.extend(&m, &x.p, b, &r), m.obj.restrict(b, a, phi, image));
                }
            }
            // multiplicative, so determined by the letters
            for (i, _) in word.iter().enumerate() {
                let (l, r) = word.split_at(i);
                assert_eq!(m.mul(a, fm.extend(&m, &x.p, a, l), fm.extend(&m, &x.p, a, r)), image);
            }
        }
    }
}

#[test]
fn invertibles_of_a_group_recover_it() {
    let w = weyl_aug();
    for g in [
        families::hyperoctahedral(SiteId::AugDelta, MAX).unwrap(),
        families::symmetric(SiteId::AugDelta, MAX).unwrap(),
    ] {
        let m = crossed_group_as_monoid(&g, &canonical_map(&g, &w).unwrap(), w.clone()).unwrap();
        let inv = invertibles(&m).unwrap();
        assert!(inv.report.passed());
        assert!(inv.group.same_tables(&g));
    }
}

#[test]
fn free_monoid_has_no_nontrivial_units() {
    let w = weyl_aug();
    let x = SlicedObject::representable(w.clone(), 1, 0);
    let fm = free_crossed_monoid(&x, 4);
    for a in w.truncation().levels() {
        let words = fm.words(a);
        let units: Vec<_> = words
            .iter()
            .filter(|u| words.iter().any(|v| fm.mul(u, v).map(|p| p.is_empty()).unwrap_or(false)))
            .collect();
        assert_eq!(units.len(), 1);
        assert!(units[0].is_empty());
    }
}

/// A non-crossed group with an absorbing element adjoined, over the trivial base.
pub fn padded(site: SiteId, max: usize) -> (CrossedGroup, CrossedMonoid) {
    let h = families::times_constant_c2(&families::trivial(site, max));
    let base = Arc::new(families::trivial(site, max));
    let t = h.truncation().clone();
    let sizes: Vec<usize> = h.orders().iter().map(|o| o + 1).collect();
    let set = Presheaf::checked_from_fn(t.clone(), sizes.clone(), |b, a, k, x| {
        if x as usize == h.order(a) {
            h.order(b) as u32
        } else {
            h.restrict(b, a, k, x)
        }
    })
    .unwrap();
    let obj = SlicedObject::over_unit("padded", set, base).unwrap();
    let mul = t
        .levels()
        .map(|a| {
            let z = h.order(a) as u32;
            (0..=z).flat_map(|x| (0..=z).map(move |y| (x, y))).map(|(x, y)| if x == z || y == z { z } else { h.mul(a, x, y) }).collect()
        })
        .collect();
    let m = CrossedMonoid { obj, unit: vec![0; max + 1], mul };
    m.verify().unwrap();
    (h, m)
}

#[test]
fn invertibles_drop_absorbing_padding() {
    for site in [SiteId::AugDelta, SiteId::Nabla, SiteId::Delta] {
        let (h, m) = padded(site, MAX);
        let inv = invertibles(&m).unwrap();
        assert!(inv.report.passed());
        assert!(inv.group.same_tables(&h));
    }
}

#[test]
fn broken_monoid_is_rejected() {
    let (_, mut m) = padded(SiteId::AugDelta, 2);
    // make the product non-associative at level 1 by swapping one entry
    let s = m.obj.size(1);
    m.mul[1][s + 1] = 2;
    assert!(matches!(m.verify(), Err(MonoidalError::Law { .. })));
}
