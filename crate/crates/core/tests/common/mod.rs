//! Brute-force oracles and exhaustive generators shared by the test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use precut_core::instances::pairs::{membership, PairKind, PreorderPair};
use precut_core::preorder::enumerate_preorders;
use precut_core::species::order_map;
use precut_core::subset::{self, Subset};
use precut_core::Preorder;

/// Reflexive transitive relations on `n` points, as `(count, antisymmetric count)`.
pub fn brute_preorders(n: usize) -> (usize, usize) {
    let cells = n * n;
    let (mut all, mut posets) = (0, 0);
    for mask in 0u32..1 << cells {
        let r = |x: usize, y: usize| mask >> (x * n + y) & 1 == 1;
        let reflexive = (0..n).all(|x| r(x, x));
        let transitive =
            (0..n).all(|x| (0..n).all(|y| (0..n).all(|z| !(r(x, y) && r(y, z)) || r(x, z))));
        if reflexive && transitive {
            all += 1;
            if (0..n).all(|x| (0..n).all(|y| x == y || !(r(x, y) && r(y, x)))) {
                posets += 1;
            }
        }
    }
    (all, posets)
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn unlabeled_graphs(n: usize) -> usize {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    for mask in 0u32..1 << pairs.len() {
        let canon = perms
            .iter()
            .map(|p| {
                let mut edges: Vec<(usize, usize)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &(x, y))| (p[x].min(p[y]), p[x].max(p[y])))
                    .collect();
                edges.sort();
                edges
            })
            .min()
            .unwrap();
        seen.insert(canon);
    }
    seen.len()
}

pub fn surjections(n: usize) -> usize {
    (0..=n)
        .map(|k| {
            (0..k.pow(n as u32))
                .filter(|&code| {
                    let mut hit = vec![false; k];
                    let mut c = code;
                    for _ in 0..n {
                        hit[c % k] = true;
                        c /= k;
                    }
                    hit.iter().all(|&h| h)
                })
                .count()
        })
        .sum()
}

pub fn parking_functions(n: usize) -> usize {
    (0..n.pow(n as u32))
        .filter(|&code| {
            let mut c = code;
            let mut v: Vec<usize> = (0..n).map(|_| { let d = c % n; c /= n; d }).collect();
            v.sort();
            v.iter().enumerate().all(|(i, &d)| d <= i)
        })
        .count()
        .max(1)
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

pub fn preorders(n: usize) -> Vec<Preorder> {
    enumerate_preorders(n, 5).unwrap()
}

/// Preorders on an arbitrary ground other than the coarse one.
pub fn proper_refinements(ground: Subset) -> Vec<Preorder> {
    let map = order_map(subset::full(subset::size(ground)), ground);
    preorders(subset::size(ground)).iter().map(|p| p.relabel(&map)).filter(|p| !p.is_coarse()).collect()
}

pub fn members(kind: PairKind, n: usize) -> BTreeSet<PreorderPair> {
    let all = preorders(n);
    let mut out = BTreeSet::new();
    for p in &all {
        for q in &all {
            if membership(kind, p, q) {
                out.insert(PreorderPair { first: *p, second: *q });
            }
        }
    }
    out
}

/// Every way of refining a subset of the bubbles of `frame`.
pub fn refinement_choices(frame: &Preorder) -> Vec<Vec<Preorder>> {
    let mut out = vec![vec![]];
    for b in frame.bubbles() {
        let options = proper_refinements(b);
        let mut next = Vec::new();
        for chosen in &out {
            next.push(chosen.clone());
            for r in &options {
                let mut c = chosen.clone();
                c.push(*r);
                next.push(c);
            }
        }
        out = next;
    }
    out
}

pub fn frames(kind: PairKind, n: usize) -> (Vec<Preorder>, Vec<Preorder>) {
    let all = preorders(n);
    let total: Vec<Preorder> = all.iter().copied().filter(|p| p.is_total_preorder()).collect();
    let part: Vec<Preorder> = all.iter().copied().filter(|p| p.is_partition_order()).collect();
    match kind {
        PairKind::Cc => (total.clone(), total),
        PairKind::Nc => (part, total),
        PairKind::Nn => (part.clone(), part),
    }
}

/// Exhaustive chains `X_0 = ∅ ⊆ .. ⊆ X_m = X` with `m <= 5` on `{0, .., n-1}`.
pub fn chains(n: usize) -> Vec<Vec<Subset>> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(vec![0]);
    }
    for m in 1..=5usize {
        for mut code in 0..m.pow(n as u32) {
            let mut entry = vec![0; n];
            for e in entry.iter_mut() {
                *e = code % m + 1;
                code /= m;
            }
            out.push((0..=m).map(|t| subset::from_iter((0..n).filter(|&x| entry[x] <= t))).collect());
        }
    }
    out
}

/// Permutations of `1..=n` avoiding every pattern in `patterns`, by scanning
/// all index subsequences.
pub fn avoiders(n: usize, patterns: &[&[usize]]) -> usize {
    permutations(n)
        .into_iter()
        .filter(|p| {
            let sigma: Vec<usize> = p.iter().map(|v| v + 1).collect();
            !patterns.iter().any(|tau| contains_pattern(&sigma, tau))
        })
        .count()
}

pub fn contains_pattern(sigma: &[usize], tau: &[usize]) -> bool {
    let n = sigma.len();
    (0u32..1 << n).filter(|m| m.count_ones() as usize == tau.len()).any(|m| {
        let sub: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).map(|i| sigma[i]).collect();
        (0..sub.len()).all(|i| (0..sub.len()).all(|j| (sub[i] < sub[j]) == (tau[i] < tau[j])))
    })
}
