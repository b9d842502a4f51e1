//! Pattern avoidance, irreducibility, and the inherited bimonoids.

mod common;

use common::contains_pattern;

use precut_core::avoidance::{
    avoiding, has_part, is_irreducible, preset, quotient_or_sub_bimonoid, AvoidanceError, AvoidanceSet,
    BimonoidIndex,
};
use precut_core::instances::pairs::PreorderPair;
use precut_core::preorder::TotalOrderPair;
use precut_core::subset;
use precut_core::{check_bimonoid, check_intertwined, instance, mu, Element, Params, Stage, Which};

fn perm(sigma: &[usize]) -> Element {
    let p = TotalOrderPair::from_permutation(sigma);
    Element::Pair(PreorderPair { first: *p.t1(), second: *p.t2() })
}

#[test]
fn part_detection() {
    let inc = preset("21").unwrap();
    assert!(!has_part(&inc, &perm(&[1, 2, 3])));
    assert!(has_part(&preset("213").unwrap(), &perm(&[3, 1, 2, 4])));
    let nothing = AvoidanceSet::new("empty", |_| false);
    let perm_f = instance("perm_f", &Params::default()).unwrap();
    for s in perm_f.elements_std(3).unwrap().iter() {
        assert!(!has_part(&nothing, s));
    }
    let set = preset("213+132").unwrap();
    for s in perm_f.elements_std(4).unwrap().iter() {
        let sigma = s.permutation().unwrap();
        let expected = contains_pattern(&sigma, &[2, 1, 3]) || contains_pattern(&sigma, &[1, 3, 2]);
        assert_eq!(has_part(&set, s), expected, "{sigma:?}");
    }
}

#[test]
fn avoiders_are_closed_under_restriction() {
    let parent = instance("perm_m", &Params::default()).unwrap();
    let nothing = avoiding(parent.clone(), AvoidanceSet::new("empty", |_| false));
    for n in 0..=4 {
        assert_eq!(nothing.elements_std(n).unwrap().len(), parent.elements_std(n).unwrap().len());
    }
    for name in ["perm_m/213", "posets/cherry+V", "parking/pqsym"] {
        let inst = instance(name, &Params::default()).unwrap();
        for s in inst.elements_std(3).unwrap().iter() {
            for y in subset::subsets(s.ground()) {
                let r = s.restrict(y).standardize();
                assert!(inst.elements_std(subset::size(y)).unwrap().contains(&r), "{name}");
            }
        }
    }
}

#[test]
fn permutation_pattern_sets_are_irreducible_for_global_descents() {
    let perm_m = instance("perm_m", &Params::default()).unwrap();
    for name in ["213", "213+132", "12", "3142+2413"] {
        let set = preset(name).unwrap();
        let report = is_irreducible(&perm_m, &set, Which::First, 5).unwrap();
        assert!(report.passed, "{name}: {:?}", report.witness);
        assert!(report.stats["cuts"] > 0);
    }
}

#[test]
fn deconcatenation_splits_patterns() {
    let perm_f = instance("perm_f", &Params::default()).unwrap();
    let set = preset("213").unwrap();
    let report = is_irreducible(&perm_f, &set, Which::First, 4).unwrap();
    assert!(!report.passed);
    assert_eq!(report.stage, Some(Stage::Irreducibility));
    assert!(matches!(
        quotient_or_sub_bimonoid(perm_f, set, Which::First, 4),
        Err(AvoidanceError::IrreducibilityNotVerified { .. })
    ));
}

#[test]
fn parking_pqsym_is_irreducible_for_the_second_coproduct() {
    let parking = instance("parking", &Params::default()).unwrap();
    let report = is_irreducible(&parking, &preset("pqsym").unwrap(), Which::Second, 4).unwrap();
    assert!(report.passed, "{:?}", report.witness);
}

#[test]
fn avoiding_instances_inherit_intertwining() {
    for (name, nmax) in [
        ("perm_m/213", 4),
        ("perm_m/213+132", 4),
        ("perm_m/12", 4),
        ("perm_m/3142+2413", 4),
        ("parking/pqsym", 3),
    ] {
        let inst = instance(name, &Params::default()).unwrap();
        let report = check_intertwined(&inst, nmax).unwrap();
        assert!(report.passed, "{name}: {:?}", report.witness);
    }
}

#[test]
fn roles_and_quotient_products() {
    let parent = instance("perm_m", &Params::default()).unwrap();
    let (sub, roles) = quotient_or_sub_bimonoid(parent.clone(), preset("213").unwrap(), Which::First, 4).unwrap();
    assert_eq!(roles.sub_bimonoid_of, BimonoidIndex { delta: Which::Second, mu: Which::First });
    assert_eq!(roles.quotient_of, BimonoidIndex { delta: Which::First, mu: Which::Second });
    for which in [Which::First, Which::Second] {
        assert!(check_bimonoid(&sub, which, 3).unwrap().passed);
    }
    // the quotient product is the parent product with non-avoiders dropped
    for (a, b) in [(0b001, 0b110), (0b011, 0b100), (0b0011, 0b1100), (0b0101, 0b1010)] {
        for u in sub.elements(a).unwrap() {
            for v in sub.elements(b).unwrap() {
                for which in [Which::First, Which::Second] {
                    let kept = sub.elements(a | b).unwrap();
                    let expected: Vec<Element> =
                        mu(&parent, which, &u, &v).unwrap().into_iter().filter(|s| kept.contains(s)).collect();
                    assert_eq!(mu(&sub, which, &u, &v).unwrap(), expected);
                }
            }
        }
    }
}

#[test]
fn unknown_presets() {
    assert!(matches!(preset("cherry+x"), Err(AvoidanceError::UnknownPreset(_))));
    assert!(instance("perm_m/nope", &Params::default()).is_err());
}
