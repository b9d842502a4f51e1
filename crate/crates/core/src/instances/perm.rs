//! Pairs of total orders (permutations) with two choices of projections.

use crate::instances::pairs::{extend_pairs, ExtensionRule, PreorderPair, Rel};
use crate::preorder::Preorder;
use crate::species::{permutations_of, shuffles, Corners, Element, Species, Which};

fn all_total_order_pairs(n: usize) -> Vec<Element> {
    let seqs = permutations_of(&(0..n).collect::<Vec<_>>());
    let orders: Vec<Preorder> = seqs.iter().map(|s| Preorder::chain(s)).collect();
    orders
        .iter()
        .flat_map(|t1| orders.iter().map(move |t2| Element::Pair(PreorderPair { first: *t1, second: *t2 })))
        .collect()
}

fn sequences(u: &Element, v: &Element) -> Option<[Vec<usize>; 4]> {
    let (Element::Pair(a), Element::Pair(b)) = (u, v) else { return None };
    Some([
        a.first.total_sequence().ok()?,
        a.second.total_sequence().ok()?,
        b.first.total_sequence().ok()?,
        b.second.total_sequence().ok()?,
    ])
}

fn pairs_from(firsts: &[Vec<usize>], seconds: &[Vec<usize>]) -> Vec<Element> {
    let seconds: Vec<Preorder> = seconds.iter().map(|s| Preorder::chain(s)).collect();
    firsts
        .iter()
        .flat_map(|f| {
            let t1 = Preorder::chain(f);
            seconds.iter().map(move |t2| Element::Pair(PreorderPair { first: t1, second: *t2 }))
        })
        .collect()
}

fn parts(s: &Element) -> (Preorder, Preorder) {
    let Element::Pair(p) = s else { unreachable!("permutation species holds pairs of orders") };
    (p.first, p.second)
}

/// Permutations with `pi_1 = T1`, `pi_2 = T2`.
pub struct PermF;

impl Species for PermF {
    fn name(&self) -> String {
        "perm_f".into()
    }
    fn cap(&self) -> usize {
        6
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        all_total_order_pairs(n)
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        let (t1, t2) = parts(s);
        match which {
            Which::First => t1,
            Which::Second => t2,
        }
    }
    fn glue(&self, which: Which, u: &Element, v: &Element) -> Option<Vec<Element>> {
        let [u1, u2, v1, v2] = sequences(u, v)?;
        Some(match which {
            Which::First => pairs_from(&[[u1, v1].concat()], &shuffles(&u2, &v2)),
            Which::Second => pairs_from(&shuffles(&u1, &v1), &[[u2, v2].concat()]),
        })
    }
    fn extend(&self, corners: &Corners) -> Option<Vec<Element>> {
        Some(extend_pairs(
            corners,
            ExtensionRule { first_ad: Rel::Below, first_bc: Rel::Below, second_ad: Rel::Below, second_bc: Rel::Above },
        ))
    }
}

/// Permutations with `pi_1 = T1 ∨ T2^op`, `pi_2 = T1 ∧ T2`.
pub struct PermM;

impl Species for PermM {
    fn name(&self) -> String {
        "perm_m".into()
    }
    fn cap(&self) -> usize {
        6
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        all_total_order_pairs(n)
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        let (t1, t2) = parts(s);
        match which {
            Which::First => t1.join(&t2.opposite()).expect("same ground"),
            Which::Second => t1.meet(&t2).expect("same ground"),
        }
    }
    fn glue(&self, which: Which, u: &Element, v: &Element) -> Option<Vec<Element>> {
        let [u1, u2, v1, v2] = sequences(u, v)?;
        Some(match which {
            Which::First => pairs_from(&[[u1, v1].concat()], &[[v2, u2].concat()]),
            Which::Second => pairs_from(&shuffles(&u1, &v1), &shuffles(&u2, &v2)),
        })
    }
    fn extend(&self, corners: &Corners) -> Option<Vec<Element>> {
        Some(extend_pairs(
            corners,
            ExtensionRule { first_ad: Rel::Below, first_bc: Rel::Below, second_ad: Rel::Above, second_bc: Rel::Above },
        ))
    }
}
