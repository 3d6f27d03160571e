//! Permutations-with-signs of the points of a level, and the two operations
//! that make them act on a site: pushing a morphism along a permutation and
//! restricting a signed permutation along a morphism.

use serde::{Deserialize, Serialize};

/// `(sigma; eps)`: a permutation of point indices together with one sign per
/// point. Bit `i` of `neg` set means `eps_i = -1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedPerm {
    pub perm: Vec<u8>,
    pub neg: u32,
}

impl SignedPerm {
    pub fn identity(p: usize) -> Self {
        SignedPerm { perm: (0..p as u8).collect(), neg: 0 }
    }

    pub fn new(perm: Vec<u8>, signs: &[i8]) -> Self {
        assert_eq!(perm.len(), signs.len());
        let neg = signs.iter().enumerate().filter(|(_, &s)| s < 0).fold(0u32, |m, (i, _)| m | (1 << i));
        SignedPerm { perm, neg }
    }

    /// Unsigned permutation.
    pub fn plain(perm: Vec<u8>) -> Self {
        SignedPerm { perm, neg: 0 }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn sign(&self, i: usize) -> i8 {
        if self.neg >> i & 1 == 1 {
            -1
        } else {
            1
        }
    }

    pub fn signs(&self) -> Vec<i8> {
        (0..self.len()).map(|i| self.sign(i)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.neg == 0 && self.perm.iter().enumerate().all(|(i, &v)| v as usize == i)
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.len()];
        for &v in &self.perm {
            if v as usize >= self.len() || std::mem::replace(&mut seen[v as usize], true) {
                return false;
            }
        }
        true
    }

    /// Product as maps on signed points: apply `other` first, then `self`.
    /// In components `(s; e)(t; z) = (st; i -> e_{t(i)} z_i)`.
    pub fn mul(&self, other: &SignedPerm) -> SignedPerm {
        debug_assert_eq!(self.len(), other.len());
        let perm = other.perm.iter().map(|&j| self.perm[j as usize]).collect();
        let mut neg = other.neg;
        for (i, &j) in other.perm.iter().enumerate() {
            neg ^= (self.neg >> j & 1) << i;
        }
        SignedPerm { perm, neg }
    }

    pub fn inverse(&self) -> SignedPerm {
        let mut perm = vec![0u8; self.len()];
        let mut neg = 0u32;
        for (i, &j) in self.perm.iter().enumerate() {
            perm[j as usize] = i as u8;
            neg |= (self.neg >> i & 1) << j;
        }
        SignedPerm { perm, neg }
    }

    /// `self.mul(other).key()` without building the product.
    pub fn mul_key(&self, other: &SignedPerm) -> u64 {
        let mut k = u64::from(other.neg) << 48;
        for (i, &j) in other.perm.iter().enumerate() {
            k |= u64::from(self.perm[j as usize]) << (4 * i);
            k ^= u64::from(self.neg >> j & 1) << (48 + i);
        }
        k
    }

    /// Hash key; valid for at most 12 points.
    pub fn key(&self) -> u64 {
        debug_assert!(self.len() <= 12);
        let mut k = u64::from(self.neg) << 48;
        for (i, &v) in self.perm.iter().enumerate() {
            k |= u64::from(v) << (4 * i);
        }
        k
    }

    /// `phi^sigma` for a point map `f: dom -> cod` (cod has `self.len()` points):
    /// the unique monotone map whose fiber over `sigma(i)` has the size of the fiber of `f` over `i`.
    pub fn act(&self, f: &[u8]) -> Vec<u8> {
        let mut g = Vec::with_capacity(f.len());
        self.act_into(f, &mut g);
        g
    }

    /// [`SignedPerm::act`] writing into a reused buffer.
    pub fn act_into(&self, f: &[u8], g: &mut Vec<u8>) {
        g.clear();
        let mut sizes = [0usize; 16];
        for &v in f {
            sizes[self.perm[v as usize] as usize] += 1;
        }
        for (j, &c) in sizes[..self.len()].iter().enumerate() {
            g.extend(std::iter::repeat(j as u8).take(c));
        }
    }

    /// Restriction along a point map `f: dom -> cod`: the permutation of the
    /// domain that carries each fiber of `f` onto the matching fiber of
    /// `f^sigma`, monotone or antitone according to the sign, with signs
    /// pulled back along `f`.
    pub fn restrict(&self, f: &[u8]) -> SignedPerm {
        let mut perm = vec![0u8; f.len()];
        let neg = self.restrict_into(f, &mut perm);
        SignedPerm { perm, neg }
    }

    /// [`SignedPerm::restrict`] returning only the hash key.
    pub fn restrict_key(&self, f: &[u8]) -> u64 {
        let mut buf = [0u8; 16];
        let neg = self.restrict_into(f, &mut buf[..f.len()]);
        let mut k = u64::from(neg) << 48;
        for (i, &v) in buf[..f.len()].iter().enumerate() {
            k |= u64::from(v) << (4 * i);
        }
        k
    }

    fn restrict_into(&self, f: &[u8], perm: &mut [u8]) -> u32 {
        let p = self.len();
        let mut sizes = vec![0usize; p];
        for &v in f {
            sizes[v as usize] += 1;
        }
        // start of the block of f^sigma over each codomain point
        let mut moved = vec![0usize; p];
        for (i, &c) in sizes.iter().enumerate() {
            moved[self.perm[i] as usize] = c;
        }
        let mut start = vec![0usize; p];
        let mut acc = 0;
        for j in 0..p {
            start[j] = acc;
            acc += moved[j];
        }
        let mut seen = vec![0usize; p];
        let mut neg = 0u32;
        for (d, &v) in f.iter().enumerate() {
            let i = v as usize;
            let k = seen[i];
            seen[i] += 1;
            let base = start[self.perm[i] as usize];
            perm[d] = if self.neg >> i & 1 == 1 { base + sizes[i] - 1 - k } else { base + k } as u8;
            neg |= (self.neg >> i & 1) << d;
        }
        neg
    }
}

/// Serializable view of a signed permutation at a level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossedElement {
    pub level: usize,
    pub sigma: Vec<u8>,
    pub signs: Vec<i8>,
}

impl CrossedElement {
    pub fn from_signed(level: usize, x: &SignedPerm) -> Self {
        CrossedElement { level, sigma: x.perm.clone(), signs: x.signs() }
    }

    pub fn to_signed(&self) -> SignedPerm {
        SignedPerm::new(self.sigma.clone(), &self.signs)
    }
}

/// All permutations of `0..p` in lexicographic order.
pub fn permutations(p: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = (0..p as u8).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..p).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..p).rev().find(|&j| cur[j] > cur[i - 1]).expect("pivot");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}
