//! Axiom checks for crossed group tables.
//!
//! Every law is checked on all instances when the level is small. On large
//! levels the laws that quantify over two group elements are checked with one
//! of them running over a generating set; by induction on word length this
//! implies the law for all elements, and the generating set is verified to
//! generate the level.

use rayon::prelude::*;
use serde::Serialize;

use crate::crossed::CrossedGroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    /// Every instance of every law.
    Exhaustive,
    /// Quantifiers over a second element restricted to a verified generating set.
    GeneratorReduced,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Levels whose two-element checks would exceed this many instances use generator reduction.
    pub exhaustive_budget: u64,
    /// Stop recording after this many violations.
    pub max_violations: usize,
    /// Force a mode on every level.
    pub force: Option<CheckMode>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { exhaustive_budget: 150_000_000, max_violations: 20, force: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub level: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub order: usize,
    pub mode: CheckMode,
    pub instances: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub name: String,
    pub site: crate::site::SiteId,
    pub max_level: usize,
    pub levels: Vec<LevelReport>,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fully_exhaustive(&self) -> bool {
        self.levels.iter().all(|l| l.mode == CheckMode::Exhaustive)
    }

    pub fn instances(&self) -> u64 {
        self.levels.iter().map(|l| l.instances).sum()
    }
}

pub fn verify_crossed_axioms(g: &CrossedGroup) -> VerifyReport {
    verify_with(g, VerifyOptions::default())
}

pub fn verify_with(g: &CrossedGroup, opts: VerifyOptions) -> VerifyReport {
    let trunc = g.truncation();
    let mut levels = Vec::new();
    let mut violations = Vec::new();
    for a in trunc.levels() {
        let order = g.order(a) as u64;
        let homs_into: u64 = trunc.levels().map(|b| trunc.hom_count(b, a) as u64).sum();
        let mode = opts.force.unwrap_or(if order * order * homs_into <= opts.exhaustive_budget {
            CheckMode::Exhaustive
        } else {
            CheckMode::GeneratorReduced
        });
        let (instances, v) = check_level(g, a, mode, opts.max_violations);
        levels.push(LevelReport { level: a, order: order as usize, mode, instances });
        violations.extend(v);
        if violations.len() >= opts.max_violations {
            violations.truncate(opts.max_violations);
            break;
        }
    }
    VerifyReport { name: g.name.clone(), site: g.site(), max_level: g.max_level(), levels, violations }
}

fn check_level(g: &CrossedGroup, a: usize, mode: CheckMode, cap: usize) -> (u64, Vec<Violation>) {
    let trunc = g.truncation();
    let grp = g.level(a);
    let order = grp.order() as u32;
    let all: Vec<u32> = (0..order).collect();
    let gens = grp.generators();
    let second: &[u32] = match mode {
        CheckMode::Exhaustive => &all,
        CheckMode::GeneratorReduced => &gens,
    };
    let mut out = Vec::new();
    let mut count = 0u64;
    let push = |out: &mut Vec<Violation>, check: &'static str, detail: String| {
        if out.len() < cap {
            out.push(Violation { check, level: a, detail });
        }
    };

    // group laws
    for &x in &all {
        if grp.mul(x, grp.inv(x)) != 0 || grp.mul(0, x) != x || grp.mul(x, 0) != x {
            push(&mut out, "group-law", format!("unit or inverse fails at {x}"));
        }
    }
    if !grp.is_signed() {
        for &x in &all {
            for &y in &all {
                for &z in second {
                    count += 1;
                    if grp.mul(grp.mul(x, y), z) != grp.mul(x, grp.mul(y, z)) {
                        push(&mut out, "group-law", format!("associativity fails at ({x},{y},{z})"));
                    }
                }
            }
        }
    }
    if mode == CheckMode::GeneratorReduced && grp.closure(&gens).len() != grp.order() {
        push(&mut out, "generation", format!("{gens:?} does not generate"));
    }

    let id_a = trunc.identity(a) as usize;
    for &x in &all {
        count += 1;
        if g.restrict(a, a, id_a, x) != x {
            push(&mut out, "presheaf-identity", format!("id^*({x}) != {x}"));
        }
        if g.act(a, a, id_a, x) != id_a {
            push(&mut out, "identity-fixed", format!("id^{x} != id"));
        }
    }

    // one-morphism laws, parallel over the source level
    let per_b: Vec<(u64, Vec<Violation>)> = trunc
        .levels()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|b| {
            let mut out = Vec::new();
            let mut count = 0u64;
            let mut push = |check: &'static str, detail: String| {
                if out.len() < cap {
                    out.push(Violation { check, level: a, detail });
                }
            };
            let gb = g.level(b);
            for k in 0..trunc.hom_count(b, a) {
                let phi = &trunc.homs(b, a)[k];
                let mono = phi.windows(2).all(|w| w[0] < w[1]);
                let epi = {
                    let mut hit = vec![false; trunc.points(a)];
                    phi.iter().for_each(|&v| hit[v as usize] = true);
                    hit.into_iter().all(|h| h)
                };
                let name = || trunc.morphism(b, a, k).to_string();
                if g.restrict(b, a, k, 0) != 0 {
                    push("unit-restriction", format!("{}^*(e) != e", name()));
                }
                if g.act(b, a, k, 0) != k {
                    push("action-unit", format!("{}^e != {}", name(), name()));
                }
                for &x in &all {
                    let kx = g.act(b, a, k, x);
                    let img = &trunc.homs(b, a)[kx];
                    if mono && !img.windows(2).all(|w| w[0] < w[1]) {
                        push("mono-preserved", format!("{}^{x} is not a monomorphism", name()));
                    }
                    if epi {
                        let mut hit = vec![false; trunc.points(a)];
                        img.iter().for_each(|&v| hit[v as usize] = true);
                        if !hit.into_iter().all(|h| h) {
                            push("split-epi-preserved", format!("{}^{x} is not a split epimorphism", name()));
                        }
                    }
                    for &y in second {
                        count += 1;
                        let xy = grp.mul(x, y);
                        let ky = g.act(b, a, k, y);
                        // action law: phi^{xy} = (phi^y)^x
                        if g.act(b, a, k, xy) != g.act(b, a, ky, x) {
                            push("action-law", format!("{}^({x}*{y}) != ({}^{y})^{x}", name(), name()));
                        }
                        // phi^*(xy) = (phi^y)^*(x) phi^*(y)
                        let lhs = g.restrict(b, a, k, xy);
                        let rhs = gb.mul(g.restrict(b, a, ky, x), g.restrict(b, a, k, y));
                        if lhs != rhs {
                            push("cg-ii", format!("phi={} x={x} y={y}", name()));
                        }
                    }
                }
            }
            (count, out)
        })
        .collect();
    for (c, v) in per_b {
        count += c;
        for w in v {
            push(&mut out, w.check, w.detail);
        }
    }

    // two-morphism laws over x in `first`
    let first: &[u32] = second;
    let per_bc: Vec<(u64, Vec<Violation>)> = trunc
        .levels()
        .flat_map(|b| trunc.levels().map(move |c| (b, c)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(b, c)| {
            let mut out = Vec::new();
            let mut count = 0u64;
            for k in 0..trunc.hom_count(b, a) {
                for j in 0..trunc.hom_count(c, b) {
                    let comp = trunc.compose_idx(c, b, a, k, j) as usize;
                    for &x in first {
                        count += 1;
                        let rx = g.restrict(b, a, k, x);
                        // (psi phi)^* = phi^* psi^*
                        if g.restrict(c, a, comp, x) != g.restrict(c, b, j, rx) {
                            if out.len() < cap {
                                out.push(Violation {
                                    check: "presheaf-composite",
                                    level: a,
                                    detail: format!(
                                        "psi={} phi={} x={x}",
                                        trunc.morphism(b, a, k),
                                        trunc.morphism(c, b, j)
                                    ),
                                });
                            }
                        }
                        // (psi phi)^x = psi^x phi^{psi^*(x)}
                        let kx = g.act(b, a, k, x);
                        let jx = g.act(c, b, j, rx);
                        if g.act(c, a, comp, x) != trunc.compose_idx(c, b, a, kx, jx) as usize && out.len() < cap {
                            out.push(Violation {
                                check: "cg-i",
                                level: a,
                                detail: format!(
                                    "psi={} phi={} x={x}",
                                    trunc.morphism(b, a, k),
                                    trunc.morphism(c, b, j)
                                ),
                            });
                        }
                    }
                }
            }
            (count, out)
        })
        .collect();
    for (c, v) in per_bc {
        count += c;
        for w in v {
            push(&mut out, w.check, w.detail);
        }
    }
    (count, out)
}
