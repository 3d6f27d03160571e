use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crossed_site::base_change::{
    lan_crossed_monoid, ran_interval_monoid, ran_j_monoid, restrict_crossed, restrict_monoid, signed_group_of, GroupOver, LanMonoid,
    MonoidTables, SiteFunctor,
};
use crossed_site::classification::{
    enumerate_crossed_subgroups, goursat_backward, goursat_forward, is_virtual_product, quadruple_candidates, reproduce_table,
    IntervalSplitting,
};
use crossed_site::crossed::generated_subgroup;
use crossed_site::families::{self, canonical_map, family_of, weyl_closed_form, weyl_group, weyl_isomorphism, FamilyKind};
use crossed_site::monoidal::{crossed_group_as_monoid, free_crossed_monoid, rtimes as rtimes_product, CrossedMonoid, SlicedObject};
use crossed_site::presheaf::Presheaf;
use crossed_site::verify::verify_crossed_axioms;
use crossed_site::{CrossedGroup, CrossedMap, SiteId};
use serde_json::{json, Value};

use crate::input::{self, BaseKind, MonoidSpec};
use crate::{Global, Report, Usage};

const SCHEMA_VERSION: u32 = 1;

fn kind(name: &str, flag: &str) -> Result<FamilyKind, Usage> {
    FamilyKind::parse(name).ok_or_else(|| Usage(format!("{flag}: unknown family '{name}'")))
}

fn family_on(k: FamilyKind, site: SiteId, max: usize, flag: &str) -> Result<CrossedGroup, Usage> {
    families::family(k, site, max).map_err(|e| Usage(format!("{flag}: {e}")))
}

fn header(command: &str) -> Value {
    json!({ "schema_version": SCHEMA_VERSION, "command": command })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn verify(g: &Global, family: Option<&str>) -> Result<Report, Usage> {
    let site = g.site.unwrap_or(SiteId::AugDelta);
    let max = g.max_level.unwrap_or(5);
    let groups: Vec<(FamilyKind, CrossedGroup)> = match family {
        Some(name) => {
            let k = kind(name, "--family")?;
            vec![(k, family_on(k, site, max, "--family")?)]
        }
        None => FamilyKind::ALL.iter().filter_map(|&k| families::family(k, site, max).ok().map(|grp| (k, grp))).collect(),
    };
    let mut results = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for (k, grp) in &groups {
        let r = verify_crossed_axioms(grp);
        passed &= r.passed();
        let mode = if r.fully_exhaustive() { "exhaustive" } else { "generator-reduced on large levels" };
        let _ = writeln!(text, "{} on {site} up to level {max}: {} ({mode}, {} instances)", k.name(), verdict(r.passed()), r.instances());
        for v in &r.violations {
            let _ = writeln!(text, "  {} at level {}: {}", v.check, v.level, v.detail);
        }
        results.push(json!({
            "family": k.name(),
            "passed": r.passed(),
            "fully_exhaustive": r.fully_exhaustive(),
            "instances": r.instances(),
            "levels": r.levels,
            "violations": r.violations,
        }));
    }
    let json = merge(header("verify"), json!({ "site": site, "max_level": max, "results": results, "passed": passed }));
    Ok(Report { json, text, passed })
}

fn weyl_order_formula(site: SiteId, n: usize) -> usize {
    let fact = |m: usize| -> usize { (1..=m).product() };
    match site {
        SiteId::Delta => (1 << (n + 1)) * fact(n + 1),
        SiteId::AugDelta => (1 << n) * fact(n),
        SiteId::Nabla => (1 << (n + 1)) * fact(n),
    }
}

pub fn weyl(g: &Global, level: usize, confirm_cap: Option<usize>, list: bool) -> Result<Report, Usage> {
    let site = g.site.unwrap_or(SiteId::AugDelta);
    let cap = g.probe_cap.map_or(level + 2, |c| c as usize);
    let wl = weyl_group(site, level, cap).map_err(|e| Usage(format!("--probe-cap: {e}")))?;
    let mut closed = weyl_closed_form(site, level);
    closed.sort();
    let matches_closed_form = closed == wl.elements;
    let iso = weyl_isomorphism(&wl);
    let expected = weyl_order_formula(site, level);
    let confirmed = match confirm_cap {
        Some(c) => {
            let again = weyl_group(site, level, c).map_err(|e| Usage(format!("--confirm-cap: {e}")))?;
            Some((c, again.elements == wl.elements))
        }
        None => None,
    };
    let passed = matches_closed_form && iso.is_isomorphism() && wl.order() == expected && confirmed.is_none_or(|(_, ok)| ok);
    let mut text = format!(
        "W on {site} at level {level} (probe cap {cap}): order {} (expected {expected}), closed form {}, isomorphism {}\n",
        wl.order(),
        verdict(matches_closed_form),
        verdict(iso.is_isomorphism())
    );
    if let Some((c, ok)) = confirmed {
        let _ = writeln!(text, "re-enumerated at probe cap {c}: {}", verdict(ok));
    }
    let mut json = merge(
        header("weyl"),
        json!({
            "site": site,
            "level": level,
            "probe_cap": cap,
            "order": wl.order(),
            "expected_order": expected,
            "stabilizer_order": wl.stabilizer_order,
            "matches_closed_form": matches_closed_form,
            "isomorphism": iso,
            "confirmed": confirmed.map(|(c, ok)| json!({ "probe_cap": c, "agrees": ok })),
            "passed": passed,
        }),
    );
    if list {
        json["elements"] = json!(wl.elements);
        for e in &wl.elements {
            let _ = writeln!(text, "  {:?} signs {:?}", e.perm, e.signs());
        }
    }
    Ok(Report { json, text, passed })
}

pub fn classify(g: &Global, table: u8) -> Result<Report, Usage> {
    let max = g.max_level.unwrap_or(4);
    let r = reproduce_table(table, max).map_err(|e| Usage(format!("--max-level: {e}")))?;
    let mut text = format!("table {table} on {} up to level {max}: {} families found\n", r.site, r.families_found);
    for row in &r.rows {
        let quad = row.quadruple.map(|q| format!(" ({}, {}; {}, {})", q[0], q[1], q[2], q[3])).unwrap_or_default();
        let _ = writeln!(text, "  {:<24} {:?}{quad} {}", row.name, row.orders_by_level, verdict(row.matched));
    }
    for o in &r.unmatched {
        let _ = writeln!(text, "  unmatched family with orders {o:?}");
    }
    for c in &r.candidates {
        let q = c.quadruple;
        let status = match &c.witness {
            None => "interval-closed".to_string(),
            Some(w) => format!("not closed: {w}"),
        };
        let _ = writeln!(text, "  candidate ({}, {}; {}, {}) {:?} {status}", q[0], q[1], q[2], q[3], c.orders_by_level);
    }
    let _ = writeln!(text, "{}", verdict(r.passed));
    let passed = r.passed;
    let json = merge(header("classify"), serde_json::to_value(&r).expect("report serializes"));
    Ok(Report { json, text, passed })
}

fn sliced_family(name: &str, flag: &str, site: SiteId, max: usize, w: &Arc<CrossedGroup>) -> Result<SlicedObject, Usage> {
    let k = kind(name, flag)?;
    let grp = family_on(k, site, max, flag)?;
    let f = canonical_map(&grp, w)?;
    Ok(SlicedObject::of_group(&grp, &f, w.clone())?)
}

pub fn rtimes(g: &Global, left: &str, right: &str) -> Result<Report, Usage> {
    let site = g.site.unwrap_or(SiteId::AugDelta);
    let max = g.max_level.unwrap_or(3);
    let w = Arc::new(families::weyl(site, max)?);
    let x = sliced_family(left, "--left", site, max, &w)?;
    let y = sliced_family(right, "--right", site, max, &w)?;
    let xy = rtimes_product(&x, &y)?;
    let sizes: Vec<usize> = (0..=max).map(|a| xy.size(a)).collect();
    let product_sizes = (0..=max).all(|a| xy.size(a) == x.size(a) * y.size(a));
    let associative = rtimes_product(&xy, &x)?.same_tables(&rtimes_product(&x, &rtimes_product(&y, &x)?)?);
    let unit = SlicedObject::unit(w.clone());
    let unital = rtimes_product(&unit, &x)?.same_tables(&x) && rtimes_product(&x, &unit)?.same_tables(&x);
    let passed = product_sizes && associative && unital;
    let text = format!(
        "{left} x| {right} over W on {site}: sizes {sizes:?}; associativity {}, unit {}\n",
        verdict(associative),
        verdict(unital)
    );
    let json = merge(
        header("rtimes"),
        json!({
            "site": site,
            "max_level": max,
            "left": left,
            "right": right,
            "sizes": sizes,
            "associative": associative,
            "unital": unital,
            "passed": passed,
        }),
    );
    Ok(Report { json, text, passed })
}

/// Checks performed by `free-monoid` on every pair of words, up to this many pairs per level.
const PAIR_BUDGET: usize = 200_000;

pub fn free_monoid(g: &Global, family: &str, cap: usize, list: usize) -> Result<Report, Usage> {
    let site = g.site.unwrap_or(SiteId::AugDelta);
    let max = g.max_level.unwrap_or(3);
    let w = Arc::new(families::weyl(site, max)?);
    let x = sliced_family(family, "--family", site, max, &w)?;
    let wm = free_crossed_monoid(&x, cap);
    let t = w.truncation().clone();
    let mut levels = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for a in 0..=max {
        let n = x.size(a);
        let expected: usize = (0..=cap as u32).map(|k| n.pow(k)).sum();
        if expected > 2_000_000 {
            return Err(Usage(format!("--cap: {expected} words at level {a} is too many to list")));
        }
        let words = wm.words(a);
        let mut restriction_ok = true;
        let mut checked = 0;
        'pairs: for u in &words {
            for v in words.iter().filter(|v| u.len() + v.len() <= cap) {
                if checked >= PAIR_BUDGET {
                    break 'pairs;
                }
                checked += 1;
                let uv = wm.mul(u, v)?;
                if wm.structure(a, &uv) != w.mul(a, wm.structure(a, u), wm.structure(a, v)) {
                    restriction_ok = false;
                }
                for b in 0..=max {
                    for k in 0..t.hom_count(b, a) {
                        let twisted = wm.act(b, a, k, v);
                        let expect = [wm.restrict(b, a, twisted, u), wm.restrict(b, a, k, v)].concat();
                        if wm.restrict(b, a, k, &uv) != expect {
                            restriction_ok = false;
                        }
                    }
                }
            }
        }
        let ok = words.len() == expected && restriction_ok;
        passed &= ok;
        let _ = writeln!(text, "level {a}: {n} generators, {} words of length <= {cap} (expected {expected}) {}", words.len(), verdict(ok));
        let sample: Vec<_> = words.iter().take(list).map(|u| wm.to_json(a, u)).collect();
        levels.push(json!({
            "level": a,
            "generators": n,
            "words": words.len(),
            "expected_words": expected,
            "pairs_checked": checked,
            "restriction_ok": restriction_ok,
            "sample": sample,
        }));
    }
    let json = merge(
        header("free-monoid"),
        json!({ "site": site, "max_level": max, "family": family, "cap": cap, "levels": levels, "passed": passed }),
    );
    Ok(Report { json, text, passed })
}

/// A monoid as described by the input file, over `base`.
enum Built {
    Table(CrossedMonoid),
    Group { group: CrossedGroup, map: CrossedMap, theta: Vec<Vec<u8>> },
}

fn build_monoid(spec: &MonoidSpec, theta: Option<&[u8]>, base: &Arc<CrossedGroup>) -> Result<Built, Usage> {
    let t = base.truncation().clone();
    let levels = t.max_level + 1;
    match spec {
        MonoidSpec::Constant { size, mul } => {
            let obj = SlicedObject::over_unit("constant", Presheaf::constant(t, *size), base.clone())?;
            let m = CrossedMonoid { obj, unit: vec![0; levels], mul: vec![mul.clone(); levels] };
            m.verify().map_err(|e| Usage(format!("--input: {e}")))?;
            if theta.is_some_and(|th| th.len() != *size) {
                return Err(Usage("--input: theta needs one entry per element".into()));
            }
            Ok(Built::Table(m))
        }
        MonoidSpec::Group { family, times_c2 } => {
            let k = kind(family, "--input")?;
            let grp = family_on(k, t.site, t.max_level, "--input")?;
            let f = canonical_map(&grp, base).map_err(|e| Usage(format!("--input: group monoids need the weyl base ({e})")))?;
            if !times_c2 {
                let theta = grp.orders().iter().map(|&o| vec![0; o]).collect();
                return Ok(Built::Group { group: grp, map: f, theta });
            }
            let prod = families::times_constant_c2(&grp);
            let map = CrossedMap { maps: f.maps.iter().map(|m| m.iter().flat_map(|&v| [v, v]).collect()).collect() };
            let theta = prod.orders().iter().map(|&o| (0..o).map(|i| (i % 2) as u8).collect()).collect();
            Ok(Built::Group { group: prod, map, theta })
        }
    }
}

fn base_group(kind: BaseKind, site: SiteId, max: usize) -> Result<CrossedGroup, Usage> {
    Ok(match kind {
        BaseKind::Trivial => families::trivial(site, max),
        BaseKind::Weyl => families::weyl(site, max)?,
    })
}

fn lan_summary<M: MonoidTables>(lan: &LanMonoid, m: &M, cap: usize, functor: SiteFunctor) -> Result<(Value, bool), Usage> {
    let t = lan.truncation().clone();
    let mut levels = Vec::new();
    let mut ok = lan.report.is_confluent() && lan.restriction_is_well_defined();
    for a in t.levels() {
        let forms = lan.normal_forms(a, cap, 100_000)?;
        levels.push(json!({ "level": a, "letter_classes": lan.levels[a].classes(), "elements_up_to_cap": forms.len() }));
    }
    let mut unit_bijective = Value::Null;
    if functor == SiteFunctor::J {
        let mut all = true;
        for b in m.truncation().levels() {
            let images: Vec<Vec<u32>> = (0..m.size(b) as u32).map(|x| lan.unit_map(b, x)).collect();
            let distinct: BTreeSet<&Vec<u32>> = images.iter().collect();
            let forms: BTreeSet<Vec<u32>> = lan.normal_forms(b + 1, cap, 100_000)?.into_iter().collect();
            all &= distinct.len() == images.len() && forms == images.iter().cloned().collect();
        }
        ok &= all;
        unit_bijective = json!(all);
    }
    Ok((json!({ "levels": levels, "confluence": lan.report, "unit_map_bijective": unit_bijective }), ok))
}

pub fn base_change(g: &Global, functor: &str, direction: &str, path: &Path) -> Result<Report, Usage> {
    let f = SiteFunctor::parse(functor).ok_or_else(|| Usage(format!("--functor: expected j or J, got '{functor}'")))?;
    let text_in = std::fs::read_to_string(path).map_err(|e| Usage(format!("--input: {e}")))?;
    let inp = input::parse(&text_in).map_err(Usage)?;
    let max = g.max_level.unwrap_or(inp.max_level);
    let cap = g.word_cap as usize;
    let src = f.source();
    let (result, passed) = match (f, direction) {
        (SiteFunctor::J, "ran") => {
            let base = Arc::new(base_group(inp.base, src, max)?);
            let m = match build_monoid(&inp.monoid, None, &base)? {
                Built::Table(m) => m,
                Built::Group { group, map, .. } => crossed_group_as_monoid(&group, &map, base.clone())?,
            };
            let r = ran_j_monoid(&m)?;
            let back = restrict_monoid(f, &r)?;
            let counit = back.obj.same_tables(&m.obj) && back.mul == m.mul && back.unit == m.unit;
            let sizes: Vec<usize> = r.obj.set.sizes().to_vec();
            (json!({ "site": f.target(), "sizes": sizes, "counit_iso": counit }), counit)
        }
        (SiteFunctor::J, _) => {
            let target = Arc::new(base_group(inp.base, f.target(), max + 1)?);
            let base = Arc::new(restrict_crossed(f, &target)?);
            match build_monoid(&inp.monoid, None, &base)? {
                Built::Table(m) => {
                    let lan = lan_crossed_monoid(f, &m, target, cap)?;
                    lan_summary(&lan, &m, cap, f)?
                }
                Built::Group { group, map, .. } => {
                    let m = GroupOver::new(&group, &map, base)?;
                    let lan = lan_crossed_monoid(f, &m, target, cap)?;
                    lan_summary(&lan, &m, cap, f)?
                }
            }
        }
        (SiteFunctor::Interval, "ran") => {
            if max < 2 {
                return Err(Usage("--max-level: the interval right extension needs source level 2".into()));
            }
            let base = Arc::new(base_group(inp.base, src, max)?);
            let w = Arc::new(families::weyl(SiteId::Nabla, max - 2)?);
            let r = match build_monoid(&inp.monoid, inp.theta.as_deref(), &base)? {
                Built::Table(m) => {
                    let th = inp.theta.clone().unwrap_or_else(|| vec![0; m.obj.size(0)]);
                    ran_interval_monoid(&m, &vec![th; max + 1], w.clone())?
                }
                Built::Group { group, map, theta } => {
                    let m = GroupOver::new(&group, &map, base)?;
                    ran_interval_monoid(&m, &theta, w.clone())?
                }
            };
            let sizes: Vec<usize> = r.obj.set.sizes().to_vec();
            let as_group = signed_group_of(&r).ok().map(|grp| {
                let fam = family_of(&w, &grp);
                let names: Vec<&str> = FamilyKind::ALL
                    .iter()
                    .filter(|&&k| families::family(k, SiteId::Nabla, max - 2).is_ok_and(|h| family_of(&w, &h) == fam))
                    .map(|k| k.name())
                    .collect();
                json!({ "orders_by_level": grp.orders(), "equals_weyl": grp.same_tables(&w), "families": names })
            });
            let laws = r.verify().is_ok();
            (json!({ "site": SiteId::Nabla, "sizes": sizes, "monoid_laws": laws, "group": as_group }), laws)
        }
        (SiteFunctor::Interval, _) => {
            let target = Arc::new(base_group(inp.base, f.target(), max)?);
            let base = Arc::new(restrict_crossed(f, &target)?);
            let m = match build_monoid(&inp.monoid, None, &base)? {
                Built::Table(m) => m,
                Built::Group { .. } => return Err(Usage("--input: along J the left extension takes constant monoids".into())),
            };
            let lan = lan_crossed_monoid(f, &m, target, cap)?;
            lan_summary(&lan, &m, cap, f)?
        }
    };
    let text = format!(
        "{} of the input along {} ({} -> {}): {}\n{}\n",
        direction,
        f.name(),
        src,
        f.target(),
        verdict(passed),
        serde_json::to_string(&result).expect("serializes")
    );
    let json = merge(
        header("base-change"),
        json!({ "functor": f.name(), "direction": direction, "max_level": max, "result": result, "passed": passed }),
    );
    Ok(Report { json, text, passed })
}

pub fn goursat(g: &Global) -> Result<Report, Usage> {
    let max = g.max_level.unwrap_or(3);
    let s = IntervalSplitting::new(max).map_err(|e| Usage(format!("--max-level: {e}")))?;
    let (grp, g1, g2) = (&s.restricted, &s.g1, &s.g2);
    let vp = is_virtual_product(grp, g1, g2)?;
    let subs = enumerate_crossed_subgroups(grp).map_err(|e| Usage(format!("--max-level: {e}")))?;
    let mut backward_forward = true;
    let mut rows = Vec::new();
    for h in &subs {
        let q = goursat_forward(grp, g1, g2, h)?;
        backward_forward &= &goursat_backward(grp, g1, g2, &q)? == h;
        rows.push(json!({ "orders_by_level": h.orders(), "labels": s.labels(&q) }));
    }
    let candidates = quadruple_candidates(&s)?;
    let mut forward_backward = true;
    for c in &candidates {
        let h = goursat_backward(grp, g1, g2, &c.quintuple)?;
        forward_backward &= goursat_forward(grp, g1, g2, &h)? == c.quintuple;
    }
    let failing: Vec<[&str; 4]> = candidates.iter().filter(|c| !c.interval_closed).map(|c| c.quadruple).collect();
    let passed = vp.is_virtual() && backward_forward && forward_backward;
    let mut text = format!(
        "interval Weyl group restricted to aug-delta, levels <= {max}: {} crossed subgroups\n\
         virtual product {}, backward after forward {}, forward after backward {}\n",
        subs.len(),
        verdict(vp.is_virtual()),
        verdict(backward_forward),
        verdict(forward_backward)
    );
    for c in &candidates {
        let q = c.quadruple;
        let status = match &c.witness {
            None => "interval-closed".to_string(),
            Some(w) => format!("not closed: {w}"),
        };
        let _ = writeln!(text, "  ({}, {}; {}, {}) {status}", q[0], q[1], q[2], q[3]);
    }
    let json = merge(
        header("goursat"),
        json!({
            "max_level": max,
            "virtual_product": vp,
            "subgroups": rows,
            "backward_after_forward": backward_forward,
            "forward_after_backward": forward_backward,
            "candidates": candidates,
            "failing_candidates": failing,
            "passed": passed,
        }),
    );
    Ok(Report { json, text, passed })
}

pub fn subgroup_gen(g: &Global, elements: &[String]) -> Result<Report, Usage> {
    let site = g.site.unwrap_or(SiteId::Nabla);
    let max = g.max_level.unwrap_or(3);
    let w = families::weyl(site, max)?;
    let mut seeds = Vec::new();
    for e in elements {
        let parsed = e.split_once(':').and_then(|(a, x)| Some((a.trim().parse::<usize>().ok()?, x.trim().parse::<u32>().ok()?)));
        match parsed {
            Some((a, x)) if a <= max && (x as usize) < w.order(a) => seeds.push((a, x)),
            _ => return Err(Usage(format!("--elements: '{e}' is not level:index inside W up to level {max}"))),
        }
    }
    let fam = generated_subgroup(&w, &seeds)?;
    let names: Vec<&str> = FamilyKind::ALL
        .iter()
        .filter(|&&k| families::family(k, site, max).is_ok_and(|h| family_of(&w, &h) == fam))
        .map(|k| k.name())
        .collect();
    let generators: Vec<Value> = seeds
        .iter()
        .map(|&(a, x)| {
            let e = w.signed(a, x).expect("signed");
            json!({ "level": a, "index": x, "perm": e.perm, "signs": e.signs() })
        })
        .collect();
    let text = format!("generated crossed subgroup of W on {site}: orders {:?}, families {names:?}\n", fam.orders());
    let json = merge(
        header("subgroup-gen"),
        json!({
            "site": site,
            "max_level": max,
            "generators": generators,
            "orders_by_level": fam.orders(),
            "families": names,
            "passed": true,
        }),
    );
    Ok(Report { json, text, passed: true })
}
