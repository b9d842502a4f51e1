//! Preorders on subsets of the label universe, the lattice operations on
//! them, cuts, refinements and global descents of total-order pairs.
//!
//! A preorder stores, for every label `x` in its ground set, the bitmask
//! `up[x] = { y : x <= y }`. Rows of labels outside the ground are zero.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subset::{self, Subset, MAX_LABELS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PreorderError {
    #[error("unknown label {0}")]
    UnknownLabel(usize),
    #[error("label {0} is outside 0..{MAX_LABELS}")]
    LabelOutOfRange(usize),
    #[error("ground sets differ")]
    GroundMismatch,
    #[error("size {n} exceeds the cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("relation is not reflexive at {0}")]
    NotReflexive(usize),
    #[error("relation is not transitive: {0} <= {1} <= {2}")]
    NotTransitive(usize, usize, usize),
    #[error("relation matrix has the wrong shape")]
    BadShape,
    #[error("{0} is not a subset of the ground set")]
    NotASubset(Subset),
    #[error("not a total preorder")]
    NotTotalPreorder,
    #[error("not a total order")]
    NotTotalOrder,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PreorderJson", into = "PreorderJson")]
pub struct Preorder {
    ground: Subset,
    up: [Subset; MAX_LABELS],
}

/// A down-set and its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cut {
    pub down: Subset,
    pub up: Subset,
}

impl Preorder {
    /// The discrete order `D`: only `x <= x`.
    pub fn discrete(ground: Subset) -> Self {
        let mut up = [0; MAX_LABELS];
        for x in subset::elements(ground) {
            up[x] = subset::singleton(x);
        }
        Preorder { ground, up }
    }

    /// The coarse order `C`: everything related.
    pub fn coarse(ground: Subset) -> Self {
        let mut up = [0; MAX_LABELS];
        for x in subset::elements(ground) {
            up[x] = ground;
        }
        Preorder { ground, up }
    }

    /// Smallest preorder on `ground` containing all `(x, y)` as `x <= y`.
    pub fn closure(ground: Subset, pairs: &[(usize, usize)]) -> Result<Self, PreorderError> {
        let mut p = Preorder::discrete(ground);
        for &(x, y) in pairs {
            for z in [x, y] {
                if !subset::contains(ground, z) {
                    return Err(PreorderError::UnknownLabel(z));
                }
            }
            p.up[x] |= subset::singleton(y);
        }
        p.close();
        Ok(p)
    }

    /// Build from `up` rows, checking reflexivity and transitivity.
    pub fn from_up_rows(ground: Subset, rows: [Subset; MAX_LABELS]) -> Result<Self, PreorderError> {
        for x in 0..MAX_LABELS {
            if !subset::contains(ground, x) && rows[x] != 0 {
                return Err(PreorderError::UnknownLabel(x));
            }
            if !subset::is_subset(rows[x], ground) {
                return Err(PreorderError::NotASubset(rows[x]));
            }
        }
        let p = Preorder { ground, up: rows };
        p.validate()?;
        Ok(p)
    }

    /// The chain `seq[0] < seq[1] < ...`.
    pub fn chain(seq: &[usize]) -> Self {
        let blocks: Vec<Subset> = seq.iter().map(|&x| subset::singleton(x)).collect();
        Preorder::from_blocks(&blocks)
    }

    /// Total preorder whose bubbles are `blocks`, in increasing order.
    pub fn from_blocks(blocks: &[Subset]) -> Self {
        let ground = blocks.iter().fold(0, |a, b| a | b);
        let mut up = [0; MAX_LABELS];
        let mut above = ground;
        for &b in blocks {
            for x in subset::elements(b) {
                up[x] = above;
            }
            above &= !b;
        }
        Preorder { ground, up }
    }

    fn validate(&self) -> Result<(), PreorderError> {
        for x in subset::elements(self.ground) {
            if !subset::contains(self.up[x], x) {
                return Err(PreorderError::NotReflexive(x));
            }
            for y in subset::elements(self.up[x]) {
                if !subset::is_subset(self.up[y], self.up[x]) {
                    let z = subset::elements(self.up[y] & !self.up[x]).next().unwrap();
                    return Err(PreorderError::NotTransitive(x, y, z));
                }
            }
        }
        Ok(())
    }

    /// Warshall closure in place.
    fn close(&mut self) {
        for k in subset::elements(self.ground) {
            for x in subset::elements(self.ground) {
                if subset::contains(self.up[x], k) {
                    self.up[x] |= self.up[k];
                }
            }
        }
    }

    pub fn ground(&self) -> Subset {
        self.ground
    }

    pub fn size(&self) -> usize {
        subset::size(self.ground)
    }

    pub fn le(&self, x: usize, y: usize) -> bool {
        subset::contains(self.up[x], y)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.le(x, y) && !self.le(y, x)
    }

    /// Same bubble: `x <= y <= x`.
    pub fn equiv(&self, x: usize, y: usize) -> bool {
        self.le(x, y) && self.le(y, x)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.le(x, y) || self.le(y, x)
    }

    pub fn up_set(&self, x: usize) -> Subset {
        self.up[x]
    }

    pub fn down_set(&self, x: usize) -> Subset {
        subset::elements(self.ground).filter(|&y| self.le(y, x)).fold(0, |a, y| a | subset::singleton(y))
    }

    /// The up rows indexed by label.
    pub fn rows(&self) -> &[Subset; MAX_LABELS] {
        &self.up
    }

    fn same_ground(&self, other: &Preorder) -> Result<(), PreorderError> {
        if self.ground == other.ground {
            Ok(())
        } else {
            Err(PreorderError::GroundMismatch)
        }
    }

    pub fn meet(&self, other: &Preorder) -> Result<Preorder, PreorderError> {
        self.same_ground(other)?;
        let mut up = [0; MAX_LABELS];
        for x in 0..MAX_LABELS {
            up[x] = self.up[x] & other.up[x];
        }
        Ok(Preorder { ground: self.ground, up })
    }

    pub fn join(&self, other: &Preorder) -> Result<Preorder, PreorderError> {
        self.same_ground(other)?;
        let mut p = *self;
        for x in 0..MAX_LABELS {
            p.up[x] |= other.up[x];
        }
        p.close();
        Ok(p)
    }

    pub fn opposite(&self) -> Preorder {
        let mut up = [0; MAX_LABELS];
        for x in subset::elements(self.ground) {
            for y in subset::elements(self.up[x]) {
                up[y] |= subset::singleton(x);
            }
        }
        Preorder { ground: self.ground, up }
    }

    /// Bubbles, ordered by their least element.
    pub fn bubbles(&self) -> Vec<Subset> {
        let mut seen: Subset = 0;
        let mut out = Vec::new();
        for x in subset::elements(self.ground) {
            if subset::contains(seen, x) {
                continue;
            }
            let b = self.up[x] & self.down_set(x);
            seen |= b;
            out.push(b);
        }
        out
    }

    /// `P ∧ P^op`.
    pub fn bubble_partition(&self) -> Preorder {
        self.meet(&self.opposite()).expect("same ground")
    }

    /// `P ∨ P^op`.
    pub fn component_partition(&self) -> Preorder {
        self.join(&self.opposite()).expect("same ground")
    }

    pub fn is_cut(&self, down: Subset) -> bool {
        subset::is_subset(down, self.ground)
            && subset::elements(self.ground & !down).all(|x| subset::is_subset(self.up[x], !down))
    }

    /// All cuts, by increasing bitmask of the down part.
    pub fn cuts(&self) -> Vec<Cut> {
        subset::subsets(self.ground)
            .into_iter()
            .filter(|&d| self.is_cut(d))
            .map(|d| Cut { down: d, up: self.ground & !d })
            .collect()
    }

    pub fn restrict(&self, y: Subset) -> Preorder {
        debug_assert!(subset::is_subset(y, self.ground));
        let mut up = [0; MAX_LABELS];
        for x in subset::elements(y) {
            up[x] = self.up[x] & y;
        }
        Preorder { ground: y, up }
    }

    /// `self ⪯ other`: the relation of `self` is contained in that of `other`.
    pub fn precedes(&self, other: &Preorder) -> Result<bool, PreorderError> {
        self.same_ground(other)?;
        Ok((0..MAX_LABELS).all(|x| subset::is_subset(self.up[x], other.up[x])))
    }

    /// `self` is a refinement of `q`.
    pub fn is_refinement(&self, q: &Preorder) -> Result<bool, PreorderError> {
        self.same_ground(q)?;
        for a in subset::elements(self.ground) {
            for b in subset::elements(self.ground) {
                if self.equiv(a, b) && !q.equiv(a, b) {
                    return Ok(false);
                }
                if !q.equiv(a, b) && q.lt(a, b) != self.lt(a, b) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// `self` is a bubble refinement of `q`.
    pub fn is_bubble_refinement(&self, q: &Preorder) -> Result<bool, PreorderError> {
        self.same_ground(q)?;
        for a in subset::elements(self.ground) {
            for b in subset::elements(self.ground) {
                if self.equiv(a, b) && !q.equiv(a, b) {
                    return Ok(false);
                }
                if q.lt(a, b) != self.lt(a, b) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The least total preorder of which `self` is a refinement.
    pub fn minimal_total_refinement(&self) -> Preorder {
        // classes generated by incomparability and by sharing a bubble
        let mut class = [0usize; MAX_LABELS];
        for x in 0..MAX_LABELS {
            class[x] = x;
        }
        fn find(class: &mut [usize; MAX_LABELS], x: usize) -> usize {
            let mut r = x;
            while class[r] != r {
                r = class[r];
            }
            class[x] = r;
            r
        }
        for x in subset::elements(self.ground) {
            for y in subset::elements(self.ground) {
                if x < y && (self.equiv(x, y) || !self.comparable(x, y)) {
                    let (rx, ry) = (find(&mut class, x), find(&mut class, y));
                    class[rx] = ry;
                }
            }
        }
        let mut blocks: Vec<Subset> = Vec::new();
        for x in subset::elements(self.ground) {
            let r = find(&mut class, x);
            let b = subset::elements(self.ground)
                .filter(|&y| find(&mut class, y) == r)
                .fold(0, |a, y| a | subset::singleton(y));
            if !blocks.contains(&b) {
                blocks.push(b);
            }
        }
        // distinct blocks are strictly comparable under self, so count
        // elements strictly below a representative
        blocks.sort_by_key(|&b| {
            let x = subset::elements(b).next().unwrap();
            subset::size(self.down_set(x) & !b)
        });
        Preorder::from_blocks(&blocks)
    }

    pub fn is_total_preorder(&self) -> bool {
        subset::elements(self.ground)
            .all(|x| subset::elements(self.ground).all(|y| self.comparable(x, y)))
    }

    /// Antisymmetric: every bubble is a singleton.
    pub fn is_poset(&self) -> bool {
        subset::elements(self.ground).all(|x| self.up[x] & self.down_set(x) == subset::singleton(x))
    }

    pub fn is_total_order(&self) -> bool {
        self.is_total_preorder() && self.is_poset()
    }

    pub fn is_partition_order(&self) -> bool {
        *self == self.opposite()
    }

    pub fn is_discrete(&self) -> bool {
        *self == Preorder::discrete(self.ground)
    }

    pub fn is_coarse(&self) -> bool {
        *self == Preorder::coarse(self.ground)
    }

    /// Bubbles of a total preorder in increasing order.
    pub fn total_blocks(&self) -> Result<Vec<Subset>, PreorderError> {
        if !self.is_total_preorder() {
            return Err(PreorderError::NotTotalPreorder);
        }
        let mut blocks = self.bubbles();
        blocks.sort_by_key(|&b| std::cmp::Reverse(subset::size(self.up[subset::elements(b).next().unwrap()])));
        Ok(blocks)
    }

    /// Elements of a total order from least to greatest.
    pub fn total_sequence(&self) -> Result<Vec<usize>, PreorderError> {
        if !self.is_total_order() {
            return Err(PreorderError::NotTotalOrder);
        }
        let mut seq: Vec<usize> = subset::elements(self.ground).collect();
        seq.sort_by_key(|&x| std::cmp::Reverse(subset::size(self.up[x])));
        Ok(seq)
    }

    /// Transport along a label map defined on the ground set.
    pub fn relabel(&self, map: &[u8; MAX_LABELS]) -> Preorder {
        let mut up = [0; MAX_LABELS];
        for x in subset::elements(self.ground) {
            up[usize::from(map[x])] = subset::map(self.up[x], map);
        }
        Preorder { ground: subset::map(self.ground, map), up }
    }
}

impl fmt::Debug for Preorder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Preorder{{")?;
        let mut first = true;
        for x in subset::elements(self.ground) {
            for y in subset::elements(self.up[x]) {
                if x != y {
                    if !first {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}<={y}")?;
                    first = false;
                }
            }
        }
        if first {
            write!(f, "D on {:?}", subset::elements(self.ground).collect::<Vec<_>>())?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct PreorderJson {
    ground: Vec<usize>,
    rel: Vec<Vec<bool>>,
}

impl From<Preorder> for PreorderJson {
    fn from(p: Preorder) -> Self {
        let ground: Vec<usize> = subset::elements(p.ground).collect();
        let rel = ground.iter().map(|&x| ground.iter().map(|&y| p.le(x, y)).collect()).collect();
        PreorderJson { ground, rel }
    }
}

impl TryFrom<PreorderJson> for Preorder {
    type Error = PreorderError;
    fn try_from(j: PreorderJson) -> Result<Self, PreorderError> {
        let mut ground: Subset = 0;
        for &x in &j.ground {
            if x >= MAX_LABELS {
                return Err(PreorderError::LabelOutOfRange(x));
            }
            if subset::contains(ground, x) {
                return Err(PreorderError::BadShape);
            }
            ground |= subset::singleton(x);
        }
        if j.rel.len() != j.ground.len() || j.rel.iter().any(|r| r.len() != j.ground.len()) {
            return Err(PreorderError::BadShape);
        }
        let mut up = [0; MAX_LABELS];
        for (i, &x) in j.ground.iter().enumerate() {
            for (k, &y) in j.ground.iter().enumerate() {
                if j.rel[i][k] {
                    up[x] |= subset::singleton(y);
                }
            }
        }
        Preorder::from_up_rows(ground, up)
    }
}

pub const DEFAULT_PREORDER_CAP: usize = 5;

/// Every preorder on `{0, .., n-1}` exactly once.
///
/// Element `n-1` is added to each preorder on `{0, .., n-2}` by choosing its
/// down-set `d` and up-set `u`; transitivity through the new element forces
/// every member of `d` below every member of `u`.
pub fn enumerate_preorders(n: usize, cap: usize) -> Result<Vec<Preorder>, PreorderError> {
    if n > cap || n > MAX_LABELS {
        return Err(PreorderError::CapExceeded { n, cap: cap.min(MAX_LABELS) });
    }
    let mut level = vec![Preorder::discrete(0)];
    for k in 0..n {
        let ground = subset::full(k);
        let mut next = Vec::new();
        for p in &level {
            let cuts = p.cuts();
            for d in &cuts {
                for u in &cuts {
                    // u.up is an up-set; needs every element of d.down below all of it
                    let up = u.up;
                    if !subset::elements(d.down).all(|x| subset::is_subset(up, p.up[x])) {
                        continue;
                    }
                    let mut q = *p;
                    q.ground = ground | subset::singleton(k);
                    for x in subset::elements(d.down) {
                        q.up[x] |= subset::singleton(k);
                    }
                    q.up[k] = up | subset::singleton(k);
                    next.push(q);
                }
            }
        }
        level = next;
    }
    Ok(level)
}

/// A pair of total orders on the same ground.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TotalOrderPair {
    t1: Preorder,
    t2: Preorder,
}

impl TotalOrderPair {
    pub fn new(t1: Preorder, t2: Preorder) -> Result<Self, PreorderError> {
        t1.same_ground(&t2)?;
        if !t1.is_total_order() || !t2.is_total_order() {
            return Err(PreorderError::NotTotalOrder);
        }
        Ok(TotalOrderPair { t1, t2 })
    }

    /// Pair on `{0, .., n-1}` with `T1` the natural order and `T2` encoding
    /// the one-line permutation `sigma` (values 1-based).
    pub fn from_permutation(sigma: &[usize]) -> Self {
        let n = sigma.len();
        let t1 = Preorder::chain(&(0..n).collect::<Vec<_>>());
        let mut by_rank = vec![0; n];
        for (i, &v) in sigma.iter().enumerate() {
            by_rank[v - 1] = i;
        }
        TotalOrderPair { t1, t2: Preorder::chain(&by_rank) }
    }

    pub fn t1(&self) -> &Preorder {
        &self.t1
    }

    pub fn t2(&self) -> &Preorder {
        &self.t2
    }

    /// `sigma(i)` is the `T2`-rank (1-based) of the `i`-th element in `T1`.
    pub fn permutation(&self) -> Vec<usize> {
        permutation_of(&self.t1, &self.t2)
    }

    /// Positions `k` in `1..n` where the first `k` values are the `k` largest.
    pub fn global_descents(&self) -> Vec<usize> {
        global_descents(&self.permutation())
    }

    /// `T1 ∨ T2^op`.
    pub fn descent_preorder(&self) -> Preorder {
        self.t1.join(&self.t2.opposite()).expect("same ground")
    }
}

/// Permutation read off two total orders on one ground.
pub fn permutation_of(t1: &Preorder, t2: &Preorder) -> Vec<usize> {
    let seq = t1.total_sequence().expect("total order");
    let n = seq.len();
    seq.iter().map(|&x| n + 1 - subset::size(t2.up_set(x))).collect()
}

pub fn global_descents(sigma: &[usize]) -> Vec<usize> {
    let n = sigma.len();
    let mut min = usize::MAX;
    let mut out = Vec::new();
    for (k, &v) in sigma.iter().enumerate().take(n.saturating_sub(1)) {
        min = min.min(v);
        if min == n - k {
            out.push(k + 1);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_relations_oracle(n: usize) -> Vec<Preorder> {
        let ground = subset::full(n);
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y))).collect();
        let mut out: Vec<Preorder> = Vec::new();
        for mask in 0u32..(1 << pairs.len()) {
            let chosen: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            out.push(Preorder::closure(ground, &chosen).unwrap());
        }
        out.sort();
        out.dedup();
        out
    }

    fn brute_le(p: &Preorder, x: usize, y: usize) -> bool {
        p.le(x, y)
    }

    #[test]
    fn closure_examples() {
        let g = subset::full(3);
        assert_eq!(Preorder::closure(g, &[]).unwrap(), Preorder::discrete(g));
        let all: Vec<_> = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
        assert_eq!(Preorder::closure(g, &all).unwrap(), Preorder::coarse(g));
        let chain = Preorder::closure(g, &[(0, 1), (1, 2)]).unwrap();
        let trues = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).filter(|&(x, y)| chain.le(x, y)).count();
        assert_eq!(trues, 6);
        assert!(chain.le(0, 2));
        assert_eq!(Preorder::closure(g, &[(0, 5)]), Err(PreorderError::UnknownLabel(5)));
    }

    #[test]
    fn enumeration_counts_match_closure_oracle() {
        let expected = [1, 1, 4, 29, 355];
        for n in 0..=4 {
            let mut got = enumerate_preorders(n, DEFAULT_PREORDER_CAP).unwrap();
            assert_eq!(got.len(), expected[n]);
            got.sort();
            let before = got.len();
            got.dedup();
            assert_eq!(got.len(), before, "duplicates at n={n}");
            if n <= 3 {
                assert_eq!(got, all_relations_oracle(n));
            }
            for p in &got {
                assert!(p.validate().is_ok());
                assert!(got.binary_search(&p.opposite()).is_ok());
            }
        }
        assert_eq!(enumerate_preorders(5, 5).unwrap().len(), 6942);
        assert_eq!(enumerate_preorders(6, 5), Err(PreorderError::CapExceeded { n: 6, cap: 5 }));
    }

    #[test]
    fn enumeration_oracle_at_four() {
        let mut got = enumerate_preorders(4, 5).unwrap();
        got.sort();
        assert_eq!(got, all_relations_oracle(4));
    }

    #[test]
    fn lattice_identities() {
        let ps = enumerate_preorders(3, 5).unwrap();
        let g = subset::full(3);
        let (d, c) = (Preorder::discrete(g), Preorder::coarse(g));
        for p in &ps {
            assert_eq!(p.meet(&c).unwrap(), *p);
            assert_eq!(p.join(&d).unwrap(), *p);
            assert_eq!(p.meet(p).unwrap(), *p);
            assert_eq!(p.join(p).unwrap(), *p);
            assert_eq!(p.opposite().opposite(), *p);
            for q in &ps {
                let j = p.join(q).unwrap();
                let m = p.meet(q).unwrap();
                assert_eq!(j, q.join(p).unwrap());
                assert_eq!(m, q.meet(p).unwrap());
                assert_eq!(p.join(&p.meet(q).unwrap()).unwrap(), *p);
                assert_eq!(p.meet(&p.join(q).unwrap()).unwrap(), *p);
                // least upper bound
                assert!(p.precedes(&j).unwrap() && q.precedes(&j).unwrap());
                for r in &ps {
                    if p.precedes(r).unwrap() && q.precedes(r).unwrap() {
                        assert!(j.precedes(r).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn join_of_opposite_chains_is_coarse() {
        let g = subset::full(2);
        let a = Preorder::chain(&[0, 1]);
        let b = Preorder::chain(&[1, 0]);
        assert_eq!(a.join(&b).unwrap(), Preorder::coarse(g));
        assert_eq!(a.meet(&Preorder::discrete(1)), Err(PreorderError::GroundMismatch));
    }

    #[test]
    fn bubbles_and_components() {
        let g = subset::full(3);
        assert_eq!(Preorder::chain(&[0, 1, 2]).bubbles(), vec![1, 2, 4]);
        assert_eq!(Preorder::coarse(g).bubbles(), vec![0b111]);
        let p = Preorder::closure(g, &[(0, 1)]).unwrap();
        assert_eq!(p.component_partition().bubbles(), vec![0b011, 0b100]);
        assert!(p.bubble_partition().is_discrete());
    }

    #[test]
    fn cut_counts() {
        for n in 0..=5 {
            let g = subset::full(n);
            let chain = Preorder::chain(&(0..n).collect::<Vec<_>>());
            // brute force down-set check
            let brute = subset::subsets(g)
                .into_iter()
                .filter(|&d| {
                    subset::elements(d).all(|y| subset::elements(g).all(|x| !brute_le(&chain, x, y) || subset::contains(d, x)))
                })
                .count();
            assert_eq!(chain.cuts().len(), n + 1);
            assert_eq!(brute, n + 1);
            assert_eq!(Preorder::discrete(g).cuts().len(), 1 << n);
        }
        let c = Preorder::coarse(subset::full(3)).cuts();
        assert_eq!(c, vec![Cut { down: 0, up: 7 }, Cut { down: 7, up: 0 }]);
    }

    #[test]
    fn restriction_laws() {
        let ps = enumerate_preorders(3, 5).unwrap();
        let g = subset::full(3);
        for p in &ps {
            assert_eq!(p.restrict(g), *p);
            for q in &ps {
                let j = p.join(q).unwrap();
                for y in subset::subsets(g) {
                    assert_eq!(
                        p.meet(q).unwrap().restrict(y),
                        p.restrict(y).meet(&q.restrict(y)).unwrap()
                    );
                    let joined_restricted = p.restrict(y).join(&q.restrict(y)).unwrap();
                    assert!(joined_restricted.precedes(&j.restrict(y)).unwrap());
                    if j.is_cut(y) || j.is_cut(g & !y) {
                        assert_eq!(j.restrict(y), joined_restricted);
                    }
                }
            }
        }
    }

    #[test]
    fn refinement_agrees_with_literal_conditions() {
        let ps = enumerate_preorders(3, 5).unwrap();
        let g = subset::full(3);
        let d = Preorder::discrete(g);
        for p in &ps {
            assert!(p.is_refinement(p).unwrap());
            if p.is_partition_order() {
                assert!(d.is_refinement(p).unwrap());
            }
            for q in &ps {
                let mut a = true;
                let mut b = true;
                let mut b2 = true;
                for x in 0..3 {
                    for y in 0..3 {
                        let same_p = p.le(x, y) && p.le(y, x);
                        let same_q = q.le(x, y) && q.le(y, x);
                        let lt_p = p.le(x, y) && !p.le(y, x);
                        let lt_q = q.le(x, y) && !q.le(y, x);
                        a &= !same_p || same_q;
                        b &= same_q || (lt_q == lt_p);
                        b2 &= lt_q == lt_p;
                    }
                }
                assert_eq!(p.is_refinement(q).unwrap(), a && b);
                assert_eq!(p.is_bubble_refinement(q).unwrap(), a && b2);
            }
        }
    }

    #[test]
    fn minimal_total_refinement_matches_meet_oracle() {
        let g = subset::full(4);
        let all = enumerate_preorders(4, 5).unwrap();
        let totals: Vec<Preorder> = all.iter().copied().filter(|t| t.is_total_preorder()).collect();
        assert_eq!(totals.len(), 75);
        for p in &all {
            let oracle = totals
                .iter()
                .filter(|t| p.is_refinement(t).unwrap())
                .fold(Preorder::coarse(g), |acc, t| acc.meet(t).unwrap());
            let fast = p.minimal_total_refinement();
            assert_eq!(fast, oracle, "{p:?}");
            assert!(fast.is_total_preorder());
            assert!(p.is_refinement(&fast).unwrap());
        }
        let chain = Preorder::chain(&[2, 0, 1]);
        assert_eq!(chain.minimal_total_refinement(), chain);
        assert!(Preorder::discrete(subset::full(3)).minimal_total_refinement().is_coarse());
    }

    #[test]
    fn predicate_counts() {
        let ps = enumerate_preorders(3, 5).unwrap();
        assert_eq!(ps.iter().filter(|p| p.is_total_preorder()).count(), 13);
        assert_eq!(ps.iter().filter(|p| p.is_total_order()).count(), 6);
        let g = subset::full(3);
        let (d, c) = (Preorder::discrete(g), Preorder::coarse(g));
        assert!(d.is_partition_order() && d.is_poset() && !d.is_total_preorder());
        assert!(c.is_total_preorder() && c.is_partition_order() && !c.is_poset());
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q: Vec<usize> = p.clone();
                q.insert(i, n);
                out.push(q);
            }
        }
        out
    }

    fn descents_by_definition(sigma: &[usize]) -> Vec<usize> {
        let n = sigma.len();
        (1..n)
            .filter(|&k| {
                let mut head: Vec<usize> = sigma[..k].to_vec();
                head.sort_unstable();
                head == ((n - k + 1)..=n).collect::<Vec<_>>()
            })
            .collect()
    }

    #[test]
    fn permutation_round_trip_and_descents() {
        let p = TotalOrderPair::from_permutation(&[3, 1, 2, 4]);
        assert_eq!(p.permutation(), vec![3, 1, 2, 4]);
        assert!(p.global_descents().is_empty());
        assert!(p.descent_preorder().is_coarse());
        let rev = TotalOrderPair::from_permutation(&[3, 2, 1]);
        assert_eq!(rev.global_descents(), vec![1, 2]);
        assert_eq!(rev.descent_preorder().bubbles().len(), 3);
        assert!(TotalOrderPair::from_permutation(&[1, 2, 3]).descent_preorder().is_coarse());
    }

    #[test]
    fn descent_cuts_match_definition() {
        for n in 0..=4 {
            for sigma in permutations(n) {
                let pair = TotalOrderPair::from_permutation(&sigma);
                let expected = descents_by_definition(&sigma);
                assert_eq!(pair.global_descents(), expected);
                let t = pair.descent_preorder();
                assert!(t.is_total_preorder());
                // nontrivial cuts of T are initial segments of T1 at descents
                let mut ks: Vec<usize> = t
                    .cuts()
                    .iter()
                    .filter(|c| c.down != 0 && c.up != 0)
                    .map(|c| {
                        assert_eq!(c.down, subset::full(subset::size(c.down)));
                        subset::size(c.down)
                    })
                    .collect();
                ks.sort_unstable();
                assert_eq!(ks, expected);
                let s = pair.t1().meet(pair.t2()).unwrap();
                let comps = s.component_partition();
                assert_eq!(comps, t.bubble_partition());
                assert_eq!(comps.is_coarse(), expected.is_empty());
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let p = Preorder::closure(0b1010, &[(1, 3)]).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"ground":[1,3],"rel":[[true,true],[false,true]]}"#);
        assert_eq!(serde_json::from_str::<Preorder>(&text).unwrap(), p);
        let bad = r#"{"ground":[0,1,2],"rel":[[true,true,false],[false,true,true],[false,false,true]]}"#;
        assert!(serde_json::from_str::<Preorder>(bad).is_err());
    }

    #[test]
    fn relabel_transports_order() {
        let p = Preorder::chain(&[0, 1, 2]);
        let mut map = [0u8; MAX_LABELS];
        map[0] = 5;
        map[1] = 3;
        map[2] = 4;
        let q = p.relabel(&map);
        assert_eq!(q, Preorder::chain(&[5, 3, 4]));
    }
}
