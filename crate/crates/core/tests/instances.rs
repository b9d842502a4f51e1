//! Shipped instances against brute-force counts and structural properties.

mod common;

use std::collections::BTreeSet;

use common::*;

use precut_core::fock::FockBasis;
use precut_core::instances::pairs::{membership, packed_word, PairKind};
use precut_core::instances::parking::enumerate_parking;
use precut_core::subset;
use precut_core::{instance, Element, Params, Which};

fn count(name: &str, n: usize) -> usize {
    instance(name, &Params::default()).unwrap().elements_std(n).unwrap().len()
}

fn dims(name: &str, n: usize) -> Vec<usize> {
    let inst = instance(name, &Params::default()).unwrap();
    FockBasis::new(&inst, n).unwrap().dimensions()
}







#[test]
fn preorder_and_poset_counts() {
    for n in 0..=4 {
        let (all, posets) = brute_preorders(n);
        assert_eq!(count("preorders", n), all);
        assert_eq!(count("posets", n), posets);
    }
    assert_eq!((0..=4).map(|n| brute_preorders(n).0).collect::<Vec<_>>(), [1, 1, 4, 29, 355]);
    assert_eq!((0..=4).map(|n| brute_preorders(n).1).collect::<Vec<_>>(), [1, 1, 3, 19, 219]);
}

#[test]
fn graph_classes_are_unlabeled_graphs() {
    let oracle: Vec<usize> = (0..=4).map(unlabeled_graphs).collect();
    assert_eq!(oracle, [1, 1, 2, 4, 11]);
    assert_eq!(dims("graphs", 4), oracle);
    assert_eq!(count("graphs", 4), 64);
}

#[test]
fn permutation_counts() {
    for n in 0..=4 {
        assert_eq!(count("perm_f", n), factorial(n) * factorial(n));
        assert_eq!(count("perm_m", n), factorial(n) * factorial(n));
    }
    assert_eq!(dims("perm_f", 5), [1, 1, 2, 6, 24, 120]);
}

#[test]
fn avoiding_213_counts_labeled_pairs() {
    let avoiders = |n| avoiders(n, &[&[2, 1, 3]]);
    assert_eq!(avoiders(3), 5);
    for n in 0..=4 {
        assert_eq!(count("perm_m/213", n), factorial(n) * avoiders(n));
    }
}

#[test]
fn packed_words_count_surjections() {
    let oracle: Vec<usize> = (0..=4).map(surjections).collect();
    assert_eq!(oracle, [1, 1, 3, 13, 75]);
    assert_eq!(dims("packed_words", 4), oracle);
    let inst = instance("packed_words", &Params::default()).unwrap();
    for n in 0..=4 {
        for s in inst.elements_std(n).unwrap().iter() {
            let Element::Pair(p) = s else { panic!("packed words are pairs") };
            assert!(membership(PairKind::Cc, &p.first, &p.second));
            for y in subset::subsets(s.ground()) {
                let Element::Pair(r) = s.restrict(y) else { unreachable!() };
                let mut w = packed_word(&r).unwrap();
                w.sort();
                w.dedup();
                assert_eq!(w, (1..=w.len()).collect::<Vec<_>>());
            }
        }
    }
}

#[test]
fn parking_counts() {
    for n in 0..=4 {
        let pf = parking_functions(n);
        assert_eq!(enumerate_parking(n).len(), pf);
        assert_eq!(count("parking", n), pf * pf);
    }
    assert_eq!((1..=4).map(parking_functions).collect::<Vec<_>>(), [1, 3, 16, 125]);
}

#[test]
fn colored_with_one_color_is_trivial() {
    let one = instance("colored", &Params { palette: 1 }).unwrap();
    for n in 0..=5 {
        assert_eq!(one.elements_std(n).unwrap().len(), 1);
    }
    assert_eq!(count("colored", 3), 8);
    assert_eq!(count("tensor", 3), 8 * 6);
    assert!(instance("colored", &Params { palette: 0 }).is_err());
    assert!(instance("nope", &Params::default()).is_err());
}

#[test]
fn perm_f_and_perm_m_differ_only_in_projections() {
    let f = instance("perm_f", &Params::default()).unwrap();
    let m = instance("perm_m", &Params::default()).unwrap();
    for n in 0..=4 {
        let (ef, em) = (f.elements_std(n).unwrap(), m.elements_std(n).unwrap());
        assert_eq!(ef, em);
        for s in ef.iter() {
            let Element::Pair(p) = s else { panic!() };
            assert_eq!(f.pi(Which::First, s), p.first);
            assert_eq!(f.pi(Which::Second, s), p.second);
            assert_eq!(m.pi(Which::First, s), p.first.join(&p.second.opposite()).unwrap());
            assert_eq!(m.pi(Which::Second, s), p.first.meet(&p.second).unwrap());
        }
    }
}

#[test]
fn graph_components_shrink_strictly_somewhere() {
    let g = instance("graphs", &Params::default()).unwrap();
    let mut strict = false;
    for s in g.elements_std(4).unwrap().iter() {
        for y in subset::subsets(s.ground()) {
            let small = g.pi(Which::Second, &s.restrict(y));
            let big = g.pi(Which::Second, s).restrict(y);
            assert!(small.precedes(&big).unwrap());
            strict |= small != big;
        }
    }
    assert!(strict);
}

#[test]
fn cherry_avoiders_are_forests() {
    let inst = instance("posets/cherry", &Params::default()).unwrap();
    let posets = instance("posets", &Params::default()).unwrap();
    for n in 0..=4 {
        let kept: BTreeSet<Element> = inst.elements_std(n).unwrap().iter().copied().collect();
        for s in posets.elements_std(n).unwrap().iter() {
            let Element::Order(p) = s else { panic!() };
            // every element covers at most one element
            let forest = (0..n).all(|z| {
                let covers = (0..n)
                    .filter(|&x| p.lt(x, z) && !(0..n).any(|y| p.lt(x, y) && p.lt(y, z)))
                    .count();
                covers <= 1
            });
            assert_eq!(kept.contains(s), forest, "{s:?}");
        }
    }
}
