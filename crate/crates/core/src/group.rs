//! Finite groups indexed by integers, identity at index 0.

use std::collections::VecDeque;

use rustc_hash::FxHashMap as HashMap;
use std::sync::Arc;

use crate::signed::SignedPerm;

/// Orders up to this size get a dense multiplication table.
pub const DENSE_LIMIT: usize = 4096;

#[derive(Clone, Debug)]
enum Mul {
    Dense(Vec<u32>),
    /// Multiply the concrete signed permutations and look the product up.
    Keyed,
    /// Elements are pairs in a product of two groups.
    Pairs { left: Arc<GroupLevel>, right: Arc<GroupLevel>, pairs: Vec<(u32, u32)>, index: HashMap<(u32, u32), u32> },
}

#[derive(Clone, Debug)]
pub struct GroupLevel {
    order: usize,
    inv: Vec<u32>,
    mul: Mul,
    elems: Option<Vec<SignedPerm>>,
    index: HashMap<u64, u32>,
}

impl GroupLevel {
    pub fn trivial() -> Self {
        GroupLevel { order: 1, inv: vec![0], mul: Mul::Dense(vec![0]), elems: None, index: HashMap::default() }
    }

    /// Group given by a multiplication table `mul[x * order + y] = xy` with identity 0.
    pub fn from_dense(order: usize, mul: Vec<u32>) -> Self {
        assert_eq!(mul.len(), order * order);
        let inv = (0..order)
            .map(|x| (0..order as u32).find(|&y| mul[x * order + y as usize] == 0).expect("inverse exists"))
            .collect();
        GroupLevel { order, inv, mul: Mul::Dense(mul), elems: None, index: HashMap::default() }
    }

    /// Group of signed permutations; the list is sorted so the identity comes first.
    /// The caller guarantees closure under products.
    pub fn from_signed(mut elems: Vec<SignedPerm>) -> Self {
        elems.sort();
        elems.dedup();
        assert!(elems.first().is_some_and(SignedPerm::is_identity), "group must contain the identity");
        let order = elems.len();
        let index: HashMap<u64, u32> = elems.iter().enumerate().map(|(i, e)| (e.key(), i as u32)).collect();
        let find = |e: &SignedPerm| *index.get(&e.key()).expect("signed family is closed under products");
        let inv = elems.iter().map(|e| find(&e.inverse())).collect();
        let mul = if order <= DENSE_LIMIT {
            let mut t = Vec::with_capacity(order * order);
            for x in &elems {
                for y in &elems {
                    t.push(find(&x.mul(y)));
                }
            }
            Mul::Dense(t)
        } else {
            Mul::Keyed
        };
        GroupLevel { order, inv, mul, elems: Some(elems), index }
    }

    /// Subgroup of `left x right` on the given pairs (closed under products,
    /// containing `(0, 0)`). Pairs are sorted so the identity comes first.
    pub fn from_pairs(left: Arc<GroupLevel>, right: Arc<GroupLevel>, mut pairs: Vec<(u32, u32)>) -> Self {
        pairs.sort();
        pairs.dedup();
        assert_eq!(pairs.first(), Some(&(0, 0)), "product subgroup must contain the identity");
        let order = pairs.len();
        let index: HashMap<(u32, u32), u32> = pairs.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let inv = pairs.iter().map(|&(a, b)| index[&(left.inv(a), right.inv(b))]).collect();
        let mul = if order <= DENSE_LIMIT {
            let mut t = Vec::with_capacity(order * order);
            for &(a, b) in &pairs {
                for &(c, d) in &pairs {
                    t.push(index[&(left.mul(a, c), right.mul(b, d))]);
                }
            }
            Mul::Dense(t)
        } else {
            Mul::Pairs { left, right, pairs, index }
        };
        GroupLevel { order, inv, mul, elems: None, index: HashMap::default() }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, x: u32, y: u32) -> u32 {
        match &self.mul {
            Mul::Dense(t) => t[x as usize * self.order + y as usize],
            Mul::Keyed => {
                let e = self.elems.as_ref().expect("keyed groups carry elements");
                self.index[&e[x as usize].mul_key(&e[y as usize])]
            }
            Mul::Pairs { left, right, pairs, index } => {
                let (a, b) = pairs[x as usize];
                let (c, d) = pairs[y as usize];
                index[&(left.mul(a, c), right.mul(b, d))]
            }
        }
    }

    #[inline]
    pub fn inv(&self, x: u32) -> u32 {
        self.inv[x as usize]
    }

    pub fn is_signed(&self) -> bool {
        self.elems.is_some()
    }

    pub fn elements(&self) -> Option<&[SignedPerm]> {
        self.elems.as_deref()
    }

    pub fn elem(&self, x: u32) -> Option<&SignedPerm> {
        self.elems.as_ref().map(|e| &e[x as usize])
    }

    pub fn find(&self, e: &SignedPerm) -> Option<u32> {
        self.index.get(&e.key()).copied()
    }

    pub fn find_key(&self, key: u64) -> Option<u32> {
        self.index.get(&key).copied()
    }

    /// Subgroup on a sorted member list containing 0. Indices are renumbered in list order.
    pub fn subgroup(&self, members: &[u32]) -> GroupLevel {
        debug_assert!(members.first() == Some(&0));
        if let Some(e) = &self.elems {
            return GroupLevel::from_signed(members.iter().map(|&x| e[x as usize].clone()).collect());
        }
        let pos: HashMap<u32, u32> = members.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
        let mut t = Vec::with_capacity(members.len() * members.len());
        for &x in members {
            for &y in members {
                t.push(pos[&self.mul(x, y)]);
            }
        }
        GroupLevel::from_dense(members.len(), t)
    }

    /// Sorted list of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut queue = VecDeque::from([0u32]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !std::mem::replace(&mut seen[y as usize], true) {
                    queue.push_back(y);
                }
            }
        }
        (0..self.order as u32).filter(|&x| seen[x as usize]).collect()
    }

    /// A generating set. The checks that run over generators scale with their
    /// number, so large levels first try a few spread-out pairs before falling
    /// back to the greedy choice.
    pub fn generators(&self) -> Vec<u32> {
        let all: Vec<u32> = (0..self.order as u32).collect();
        let greedy = self.generators_of(&all);
        if greedy.len() <= 2 {
            return greedy;
        }
        let n = self.order as u64;
        let pick = |k: u64| ((k * 0x9E37_79B9) % n) as u32;
        for k in 1..=24u64 {
            let (x, y) = (pick(2 * k), pick(2 * k + 1));
            if x != y && self.closure(&[x, y]).len() == self.order {
                return vec![x.min(y), x.max(y)];
            }
        }
        greedy
    }

    /// Generating set of the subgroup with the given sorted member list.
    pub fn generators_of(&self, members: &[u32]) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut span = vec![false; self.order];
        span[0] = true;
        let mut size = 1;
        for &x in members {
            if size == members.len() {
                break;
            }
            if !span[x as usize] {
                gens.push(x);
                let c = self.closure(&gens);
                size = c.len();
                for y in c {
                    span[y as usize] = true;
                }
            }
        }
        gens
    }

    pub fn is_abelian_on(&self, members: &[u32]) -> bool {
        let gens = self.generators_of(members);
        gens.iter().all(|&x| gens.iter().all(|&y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn power(&self, x: u32, k: usize) -> u32 {
        (0..k).fold(0, |acc, _| self.mul(acc, x))
    }

    pub fn element_order(&self, x: u32) -> usize {
        let mut y = x;
        let mut k = 1;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }
}
