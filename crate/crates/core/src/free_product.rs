//! Amalgamated free products `G1 *_H G2` of crossed groups, as reduced words.
//!
//! A reduced word is `t_1 ... t_k h`: the `t_i` are nontrivial left coset
//! representatives of the image of `H`, alternating between the two factors,
//! and `h` is an element of `H`. The representative of a coset is its least
//! element index. Restriction follows the recursion
//! `phi^*(x_1 .. x_n) = (phi^{x_n})^*(x_1 .. x_{n-1}) phi^*(x_n)`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::crossed::{CrossedError, CrossedGroup, CrossedMap};
use crate::site::Truncation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeProductError {
    #[error("word of {len} syllables exceeds the cap {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("the map from H into factor {0} is not injective at level {1}")]
    NotInjective(usize, usize),
    #[error("syllable {element} is not in factor {factor} at level {level}")]
    BadSyllable { factor: usize, level: usize, element: u32 },
    #[error(transparent)]
    Crossed(#[from] CrossedError),
}

/// One letter: an element of factor 1 or 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Syllable {
    pub factor: u8,
    pub element: u32,
}

/// Reduced word at one level.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Reduced {
    pub reps: Vec<Syllable>,
    /// Trailing element of `H`.
    pub tail: u32,
}

impl Reduced {
    pub fn unit() -> Self {
        Reduced { reps: Vec::new(), tail: 0 }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

pub struct FreeProduct<'a> {
    pub g1: &'a CrossedGroup,
    pub g2: &'a CrossedGroup,
    pub h: &'a CrossedGroup,
    pub f1: &'a CrossedMap,
    pub f2: &'a CrossedMap,
    pub word_cap: usize,
    /// `coset[j][a][x] = (rep, h)` with `x = rep * f_j(h)`.
    coset: [Vec<Vec<(u32, u32)>>; 2],
}

impl<'a> FreeProduct<'a> {
    pub fn new(
        g1: &'a CrossedGroup,
        h: &'a CrossedGroup,
        g2: &'a CrossedGroup,
        f1: &'a CrossedMap,
        f2: &'a CrossedMap,
        word_cap: usize,
    ) -> Result<Self, FreeProductError> {
        f1.check(h, g1)?;
        f2.check(h, g2)?;
        let mut coset: [Vec<Vec<(u32, u32)>>; 2] = [Vec::new(), Vec::new()];
        for (j, (g, f)) in [(g1, f1), (g2, f2)].into_iter().enumerate() {
            for a in g.truncation().levels() {
                let image = &f.maps[a];
                let mut seen = vec![false; g.order(a)];
                for &y in image {
                    if std::mem::replace(&mut seen[y as usize], true) {
                        return Err(FreeProductError::NotInjective(j + 1, a));
                    }
                }
                let mut table = vec![(u32::MAX, 0); g.order(a)];
                for x in 0..g.order(a) as u32 {
                    if table[x as usize].0 != u32::MAX {
                        continue;
                    }
                    // x is the least element of its coset since cosets are visited in order
                    for (hh, &y) in image.iter().enumerate() {
                        table[g.mul(a, x, y) as usize] = (x, hh as u32);
                    }
                }
                coset[j].push(table);
            }
        }
        Ok(FreeProduct { g1, g2, h, f1, f2, word_cap, coset })
    }

    pub fn truncation(&self) -> &std::sync::Arc<Truncation> {
        self.g1.truncation()
    }

    fn factor(&self, j: u8) -> (&CrossedGroup, &CrossedMap) {
        if j == 1 {
            (self.g1, self.f1)
        } else {
            (self.g2, self.f2)
        }
    }

    /// Multiplies a reduced word on the right by one syllable.
    pub fn push(&self, a: usize, w: &Reduced, s: Syllable) -> Reduced {
        let (g, f) = self.factor(s.factor);
        let mut reps = w.reps.clone();
        let mut y = g.mul(a, f.maps[a][w.tail as usize], s.element);
        if reps.last().is_some_and(|t| t.factor == s.factor) {
            let t = reps.pop().expect("nonempty");
            y = g.mul(a, t.element, y);
        }
        let (rep, tail) = self.coset[(s.factor - 1) as usize][a][y as usize];
        if rep != 0 {
            reps.push(Syllable { factor: s.factor, element: rep });
        }
        Reduced { reps, tail }
    }

    /// Reduced form of an arbitrary word, checked against the cap.
    pub fn reduce(&self, a: usize, word: &[Syllable]) -> Result<Reduced, FreeProductError> {
        for s in word {
            let (g, _) = self.factor(s.factor);
            if !(s.factor == 1 || s.factor == 2) || s.element as usize >= g.order(a) {
                return Err(FreeProductError::BadSyllable { factor: s.factor as usize, level: a, element: s.element });
            }
        }
        let w = word.iter().fold(Reduced::unit(), |w, &s| self.push(a, &w, s));
        self.capped(w)
    }

    fn capped(&self, w: Reduced) -> Result<Reduced, FreeProductError> {
        if w.len() > self.word_cap {
            return Err(FreeProductError::CapExceeded { len: w.len(), cap: self.word_cap });
        }
        Ok(w)
    }

    /// The syllables of a reduced word, with the tail written in factor 1.
    pub fn syllables(&self, a: usize, w: &Reduced) -> Vec<Syllable> {
        let mut s = w.reps.clone();
        if w.tail != 0 {
            s.push(Syllable { factor: 1, element: self.f1.maps[a][w.tail as usize] });
        }
        s
    }

    pub fn mul(&self, a: usize, x: &Reduced, y: &Reduced) -> Result<Reduced, FreeProductError> {
        let w = self.syllables(a, y).into_iter().fold(x.clone(), |w, s| self.push(a, &w, s));
        self.capped(w)
    }

    pub fn inv(&self, a: usize, x: &Reduced) -> Reduced {
        self.syllables(a, x).into_iter().rev().fold(Reduced::unit(), |w, s| {
            let (g, _) = self.factor(s.factor);
            self.push(a, &w, Syllable { factor: s.factor, element: g.inv(a, s.element) })
        })
    }

    /// The canonical injection of factor `j`.
    pub fn inject(&self, a: usize, j: u8, x: u32) -> Reduced {
        self.push(a, &Reduced::unit(), Syllable { factor: j, element: x })
    }

    /// `phi_k^x` for the `k`-th map `b -> a`, acting syllable by syllable from the right.
    pub fn act_word(&self, b: usize, a: usize, k: usize, word: &[Syllable]) -> usize {
        word.iter().rev().fold(k, |k, s| self.factor(s.factor).0.act(b, a, k, s.element))
    }

    /// Restriction of an arbitrary word by the recursion, reduced at the end.
    pub fn restrict_word(&self, b: usize, a: usize, k: usize, word: &[Syllable]) -> Result<Reduced, FreeProductError> {
        let mut out: Vec<Syllable> = Vec::with_capacity(word.len());
        let mut phi = k;
        // unrolled from the right: the last syllable restricts along phi, the
        // one before along phi^{x_n}, and so on
        for s in word.iter().rev() {
            let g = self.factor(s.factor).0;
            out.push(Syllable { factor: s.factor, element: g.restrict(b, a, phi, s.element) });
            phi = g.act(b, a, phi, s.element);
        }
        out.reverse();
        let w = out.iter().fold(Reduced::unit(), |w, &s| self.push(b, &w, s));
        self.capped(w)
    }

    pub fn restrict(&self, b: usize, a: usize, k: usize, x: &Reduced) -> Result<Reduced, FreeProductError> {
        self.restrict_word(b, a, k, &self.syllables(a, x))
    }

    pub fn act(&self, b: usize, a: usize, k: usize, x: &Reduced) -> usize {
        self.act_word(b, a, k, &self.syllables(a, x))
    }

    /// All reduced words of at most `len` syllables at level `a`.
    pub fn reduced_words(&self, a: usize, len: usize) -> Vec<Reduced> {
        let reps: [Vec<u32>; 2] = [0, 1].map(|j| {
            let mut r: Vec<u32> = self.coset[j][a].iter().map(|c| c.0).filter(|&t| t != 0).collect();
            r.sort();
            r.dedup();
            r
        });
        let mut out = Vec::new();
        let mut layer: Vec<Vec<Syllable>> = vec![Vec::new()];
        for l in 0..=len {
            for w in &layer {
                for tail in 0..self.h.order(a) as u32 {
                    out.push(Reduced { reps: w.clone(), tail });
                }
            }
            if l == len {
                break;
            }
            let mut next = Vec::new();
            for w in &layer {
                for j in [1u8, 2] {
                    if w.last().is_some_and(|s| s.factor == j) {
                        continue;
                    }
                    for &t in &reps[(j - 1) as usize] {
                        let mut v = w.clone();
                        v.push(Syllable { factor: j, element: t });
                        next.push(v);
                    }
                }
            }
            layer = next;
        }
        out
    }
}

/// Union-find over a finite set of words.
struct Classes {
    parent: Vec<usize>,
}

impl Classes {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let n = self.parent[y];
            self.parent[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, x: usize, y: usize) {
        let (a, b) = (self.find(x), self.find(y));
        if a != b {
            self.parent[a.max(b)] = a.min(b);
        }
    }
}

/// Result of comparing the reduced forms with the bounded congruence.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub level: usize,
    pub words: usize,
    pub classes: usize,
    /// Words with equal reduced forms that the bounded congruence keeps apart.
    pub split: Vec<(Vec<Syllable>, Vec<Syllable>)>,
    /// Words the bounded congruence identifies although their reduced forms differ.
    pub collapsed: Vec<(Vec<Syllable>, Vec<Syllable>)>,
}

impl OracleReport {
    pub fn agrees(&self) -> bool {
        self.split.is_empty() && self.collapsed.is_empty()
    }
}

/// Every word of at most `len` letters at level `a`; the two units are one letter.
pub fn all_words(fp: &FreeProduct, a: usize, len: usize) -> Vec<Vec<Syllable>> {
    let mut alphabet = vec![Syllable { factor: 1, element: 0 }];
    for j in [1u8, 2] {
        alphabet.extend((1..fp.factor(j).0.order(a) as u32).map(|x| Syllable { factor: j, element: x }));
    }
    let mut words: Vec<Vec<Syllable>> = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(frontier.len() * alphabet.len());
        for w in &frontier {
            for &s in &alphabet {
                let mut v: Vec<Syllable> = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    words
}

/// Brute-force congruence on all words of at most `len` syllables: unit
/// insertion and deletion, merging and splitting of neighbours from the same
/// factor, and moving an element of `H` across a boundary.
pub fn congruence_oracle(fp: &FreeProduct, a: usize, len: usize) -> OracleReport {
    let words = all_words(fp, a, len);
    let canon = |s: Syllable| if s.element == 0 { Syllable { factor: 1, element: 0 } } else { s };
    let index: HashMap<Vec<Syllable>, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let mut uf = Classes { parent: (0..words.len()).collect() };
    let factors_of = |s: Syllable| -> Vec<u8> { if s.element == 0 { vec![1, 2] } else { vec![s.factor] } };
    for (i, w) in words.iter().enumerate() {
        for p in 0..w.len() {
            // deleting a unit
            if w[p].element == 0 {
                let mut v = w.clone();
                v.remove(p);
                uf.union(i, index[&v]);
            }
            if p + 1 < w.len() {
                for j in factors_of(w[p]) {
                    if !factors_of(w[p + 1]).contains(&j) {
                        continue;
                    }
                    // merging two neighbours of one factor
                    let g = fp.factor(j).0;
                    let mut v = w.clone();
                    let m = g.mul(a, w[p].element, w[p + 1].element);
                    v.splice(p..p + 2, [canon(Syllable { factor: j, element: m })]);
                    uf.union(i, index[&v]);
                }
                // moving h across the boundary
                for j in factors_of(w[p]) {
                    for j2 in factors_of(w[p + 1]) {
                        let (g, f) = fp.factor(j);
                        let (g2, f2) = fp.factor(j2);
                        for hh in 0..fp.h.order(a) {
                            let l = g.mul(a, w[p].element, g.inv(a, f.maps[a][hh]));
                            let r = g2.mul(a, f2.maps[a][hh], w[p + 1].element);
                            let mut v = w.clone();
                            v[p] = canon(Syllable { factor: j, element: l });
                            v[p + 1] = canon(Syllable { factor: j2, element: r });
                            uf.union(i, index[&v]);
                        }
                    }
                }
            }
        }
    }
    let mut by_form: HashMap<Reduced, usize> = HashMap::new();
    let mut by_class: HashMap<usize, (Reduced, usize)> = HashMap::new();
    let mut report = OracleReport { level: a, words: words.len(), classes: 0, split: Vec::new(), collapsed: Vec::new() };
    for (i, w) in words.iter().enumerate() {
        let form = w.iter().fold(Reduced::unit(), |r, &s| fp.push(a, &r, s));
        let c = uf.find(i);
        if let Some(&j) = by_form.get(&form) {
            if uf.find(j) != c && report.split.len() < 8 {
                report.split.push((words[j].clone(), w.clone()));
            }
        } else {
            by_form.insert(form.clone(), i);
        }
        match by_class.get(&c) {
            Some((f, j)) if *f != form => {
                if report.collapsed.len() < 8 {
                    report.collapsed.push((words[*j].clone(), w.clone()));
                }
            }
            Some(_) => {}
            None => {
                by_class.insert(c, (form, i));
            }
        }
    }
    report.classes = by_class.len();
    report
}
