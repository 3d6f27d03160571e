use std::collections::BTreeSet;

use crossed_site::base_change::{restrict_crossed, SiteFunctor};
use crossed_site::classification::*;
use crossed_site::families::{self, family_of, FamilyKind};
use crossed_site::{CrossedGroup, Family, SiteId};

fn fact(n: usize) -> usize {
    (1..=n).product()
}

/// Every subset of a level that is closed under products, by brute force.
fn subgroups_of_level(g: &CrossedGroup, a: usize) -> Vec<Vec<u32>> {
    let n = g.order(a);
    assert!(n <= 16, "brute force only for tiny levels");
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask & 1 == 0 {
            continue;
        }
        let m: Vec<u32> = (0..n as u32).filter(|i| mask >> i & 1 == 1).collect();
        if m.iter().all(|&x| m.iter().all(|&y| mask >> g.mul(a, x, y) & 1 == 1)) {
            out.push(m);
        }
    }
    out
}

/// All crossed subgroups via the product of per-level subgroup lattices.
fn brute_force_subgroups(g: &CrossedGroup) -> BTreeSet<Family> {
    let per_level: Vec<Vec<Vec<u32>>> = (0..=g.max_level()).map(|a| subgroups_of_level(g, a)).collect();
    let mut acc: Vec<Vec<Vec<u32>>> = vec![Vec::new()];
    for level in &per_level {
        acc = acc
            .into_iter()
            .flat_map(|p| {
                level.iter().map(move |m| {
                    let mut q = p.clone();
                    q.push(m.clone());
                    q
                })
            })
            .collect();
    }
    acc.into_iter().map(|levels| Family { levels }).filter(|f| g.is_crossed_subgroup(f)).collect()
}

#[test]
fn enumeration_agrees_with_brute_force() {
    for site in [SiteId::AugDelta, SiteId::Nabla, SiteId::Delta] {
        let max = if site == SiteId::Delta { 1 } else { 2 };
        let w = families::weyl(site, max).unwrap();
        let got: BTreeSet<Family> = enumerate_crossed_subgroups(&w).unwrap().into_iter().collect();
        assert_eq!(got, brute_force_subgroups(&w), "{site}");
    }
}

#[test]
fn enumeration_of_restricted_group_agrees_with_brute_force() {
    let w = families::weyl(SiteId::Nabla, 2).unwrap();
    let g = restrict_crossed(SiteFunctor::Interval, &w).unwrap();
    let got: BTreeSet<Family> = enumerate_crossed_subgroups(&g).unwrap().into_iter().collect();
    assert_eq!(got, brute_force_subgroups(&g));
}

#[test]
fn guard_rejects_large_levels() {
    let w = families::weyl(SiteId::AugDelta, 6).unwrap();
    assert!(matches!(enumerate_crossed_subgroups(&w), Err(ClassificationError::Guard { level: 5, .. })));
}

#[test]
fn augmented_table_has_seven_rows() {
    let r = reproduce_table(2, 4).unwrap();
    assert_eq!(r.families_found, 7);
    assert!(r.unmatched.is_empty());
    let expected: [fn(usize) -> usize; 7] =
        [|_| 1, |_| 2, |n| n, |n| 2 * n, fact, |n| 2 * fact(n), |n| (1 << n) * fact(n)];
    for (row, f) in r.rows.iter().zip(expected) {
        assert!(row.matched, "{}", row.name);
        for n in 2..=4 {
            assert_eq!(row.orders_by_level[n], f(n), "{} at {n}", row.name);
        }
    }
    assert!(r.passed);
}

#[test]
fn simplicial_table_is_shifted() {
    let r = reproduce_table(1, 3).unwrap();
    assert_eq!(r.families_found, 7);
    let expected: [fn(usize) -> usize; 7] =
        [|_| 1, |_| 2, |n| n + 1, |n| 2 * (n + 1), |n| fact(n + 1), |n| 2 * fact(n + 1), |n| (1 << (n + 1)) * fact(n + 1)];
    for (row, f) in r.rows.iter().zip(expected) {
        assert!(row.matched, "{}", row.name);
        for n in 1..=3 {
            assert_eq!(row.orders_by_level[n], f(n), "{} at {n}", row.name);
        }
    }
    assert!(shifted_table_agrees(3).unwrap());
    assert!(r.passed);
}

#[test]
fn interval_table_has_six_rows_with_quadruples() {
    let r = reproduce_table(3, 4).unwrap();
    assert_eq!(r.families_found, 6);
    let expected: [(fn(usize) -> usize, [&str; 4]); 6] = [
        (|_| 1, ["*", "*", "*", "*"]),
        (|_| 2, ["*", "C2", "*", "C2"]),
        (fact, ["𝔖", "𝔖", "*", "*"]),
        (|n| 2 * fact(n), ["𝔖", "𝔖~", "*", "C2"]),
        (|n| (1 << n) * fact(n), ["ℌ", "ℌ", "*", "*"]),
        (|n| (1 << (n + 1)) * fact(n), ["ℌ", "ℌ", "C2", "C2"]),
    ];
    for (row, (f, quad)) in r.rows.iter().zip(expected) {
        assert!(row.matched, "{}", row.name);
        for n in 2..=4 {
            assert_eq!(row.orders_by_level[n], f(n), "{} at {n}", row.name);
        }
        assert_eq!(row.quadruple_found.unwrap(), quad.map(Some), "{}", row.name);
    }
    assert!(r.passed);
}

#[test]
fn exactly_two_candidates_fail_closure() {
    let s = IntervalSplitting::new(3).unwrap();
    let c = quadruple_candidates(&s).unwrap();
    assert_eq!(c.len(), 8);
    let quads: BTreeSet<[&str; 4]> = c.iter().map(|c| c.quadruple).collect();
    assert_eq!(quads.len(), 8);
    let failing: BTreeSet<[&str; 4]> = c.iter().filter(|c| !c.interval_closed).map(|c| c.quadruple).collect();
    assert_eq!(failing, BTreeSet::from([["*", "*", "C2", "C2"], ["𝔖", "𝔖", "C2", "C2"]]));
    for cand in &c {
        // the opposite round trip, starting from an independently built quintuple
        let h = goursat_backward(&s.restricted, &s.g1, &s.g2, &cand.quintuple).unwrap();
        assert_eq!(goursat_forward(&s.restricted, &s.g1, &s.g2, &h).unwrap(), cand.quintuple);
        assert_eq!(h.orders(), cand.orders_by_level);
        assert_eq!(cand.interval_closed, cand.witness.is_none());
        if let Some(w) = &cand.witness {
            // the witness really leaves the subgroup: re-derive it from the Weyl group
            let h = s.weyl.restrict_morphism(&w.phi, w.element);
            assert_eq!(h, w.image);
        }
    }
}

#[test]
fn splitting_is_a_virtual_product() {
    let s = IntervalSplitting::new(3).unwrap();
    let r = is_virtual_product(&s.restricted, &s.g1, &s.g2).unwrap();
    assert!(r.is_virtual(), "{r:?}");
    for a in 0..=3 {
        assert_eq!(s.g1.levels[a].len(), (1 << a) * fact(a));
        assert_eq!(s.g2.levels[a].len(), 2);
    }
}

#[test]
fn non_virtual_products_are_reported() {
    let s = IntervalSplitting::new(2).unwrap();
    // G1 twice: the intersection is large and the products miss the swap
    let r = is_virtual_product(&s.restricted, &s.g1, &s.g1).unwrap();
    assert!(r.intersection.is_some());
    assert!(r.not_generated.is_some());
    // the full Weyl group on the interval site is not a virtual product of the two
    // families, since the endpoint swap does not twist restrictions trivially there
    let w = &s.weyl;
    let r = is_virtual_product(w, &s.g1, &s.g2);
    assert!(r.map(|r| !r.is_virtual()).unwrap_or(true));
}

#[test]
fn goursat_round_trip_over_restricted_weyl() {
    assert!(matches!(IntervalSplitting::new(1), Err(ClassificationError::TooShallow(1))));
    for max in 2..=3 {
        let s = IntervalSplitting::new(max).unwrap();
        let subs = enumerate_crossed_subgroups(&s.restricted).unwrap();
        assert!(!subs.is_empty());
        let mut quintuples = BTreeSet::new();
        for h in &subs {
            let q = goursat_forward(&s.restricted, &s.g1, &s.g2, h).unwrap();
            let back = goursat_backward(&s.restricted, &s.g1, &s.g2, &q).unwrap();
            assert_eq!(&back, h, "level {max}");
            let again = goursat_forward(&s.restricted, &s.g1, &s.g2, &back).unwrap();
            assert_eq!(again, q);
            quintuples.insert(format!("{q:?}"));
        }
        assert_eq!(quintuples.len(), subs.len());
    }
}

#[test]
fn invalid_quintuples_are_rejected() {
    let s = IntervalSplitting::new(2).unwrap();
    let full = s.restricted.full_family();
    let mut q = goursat_forward(&s.restricted, &s.g1, &s.g2, &full).unwrap();
    assert_eq!(q.ht1, s.g1);
    assert_eq!(q.h2, s.g2);
    // H1 not inside H~1
    let mut bad = q.clone();
    bad.ht1 = Family::trivial(3);
    assert!(goursat_backward(&s.restricted, &s.g1, &s.g2, &bad).is_err());
    // chi pointing at a coset that does not exist
    q.chi[2][0].1 = 9999;
    assert!(matches!(q.validate(&s.restricted, &s.g1, &s.g2), Err(ClassificationError::Quintuple(_))));
}

#[test]
fn named_families_sit_in_the_first_factor() {
    let s = IntervalSplitting::new(3).unwrap();
    for (sym, f) in &s.named {
        assert!(f.is_subfamily_of(&s.g1), "{sym}");
        assert_eq!(s.label_first(f), Some(*sym));
    }
    let closed: Vec<&str> = s.named.iter().filter(|(_, f)| s.weyl.closure_witness(f).is_none()).map(|(l, _)| *l).collect();
    assert_eq!(closed, ["*", "𝔖", "ℌ"]);
}

#[test]
fn table_rows_are_the_shipped_families() {
    for (site, max) in [(SiteId::AugDelta, 3), (SiteId::Nabla, 3)] {
        let w = families::weyl(site, max).unwrap();
        let subs: BTreeSet<Family> = enumerate_crossed_subgroups(&w).unwrap().into_iter().collect();
        let kinds: &[FamilyKind] = if site == SiteId::Nabla {
            &[FamilyKind::Trivial, FamilyKind::Reflexive, FamilyKind::Symmetric, FamilyKind::Reflexosymmetric, FamilyKind::Hyperoctahedral, FamilyKind::Weyl]
        } else {
            &[FamilyKind::Trivial, FamilyKind::Reflexive, FamilyKind::Cyclic, FamilyKind::Dihedral, FamilyKind::Symmetric, FamilyKind::Reflexosymmetric, FamilyKind::Weyl]
        };
        let named: BTreeSet<Family> = kinds.iter().map(|&k| family_of(&w, &families::family(k, site, max).unwrap())).collect();
        assert_eq!(named, subs, "{site}");
    }
}

#[test]
fn unknown_table() {
    assert!(matches!(reproduce_table(4, 2), Err(ClassificationError::NoSuchTable(4))));
}
