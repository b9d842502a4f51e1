//! Orbit classes, structure constants, duals and isomorphisms.

use std::collections::{BTreeMap, BTreeSet};

use precut_core::fock::{canonical_form, substitution_holds, FockBasis, FockError};
use precut_core::instances::pairs::PreorderPair;
use precut_core::preorder::TotalOrderPair;
use precut_core::species::permutations_of;
use precut_core::subset::{self, MAX_LABELS};
use precut_core::{
    check_isomorphism_by_change_of_basis, check_isomorphism_by_constants, fock_tables, graded_dual, instance,
    verify_hopf_axioms, Element, FockOptions, FockTable, Params, Which,
};

const F: Which = Which::First;
const S: Which = Which::Second;

fn table(name: &str, delta: Which, mu: Which, n: usize) -> FockTable {
    let inst = instance(name, &Params::default()).unwrap();
    fock_tables(&inst, delta, mu, n, &FockOptions::default()).unwrap()
}

fn perm(sigma: &[usize]) -> Element {
    let p = TotalOrderPair::from_permutation(sigma);
    Element::Pair(PreorderPair { first: *p.t1(), second: *p.t2() })
}

fn relabelings(n: usize) -> Vec<[u8; MAX_LABELS]> {
    permutations_of(&(0..n).collect::<Vec<_>>())
        .into_iter()
        .map(|p| {
            let mut m = [0u8; MAX_LABELS];
            for (i, &v) in p.iter().enumerate() {
                m[i] = v as u8;
            }
            m
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

#[test]
fn orbits_by_brute_force() {
    let inst = instance("perm_f", &Params::default()).unwrap();
    for n in 0..=4 {
        let elements = inst.elements_std(n).unwrap();
        let maps = relabelings(n);
        let mut orbits = BTreeSet::new();
        for s in elements.iter() {
            let orbit: BTreeSet<Element> = maps.iter().map(|m| s.relabel(m)).collect();
            assert!(orbit.iter().all(|t| canonical_form(t) == canonical_form(s)));
            assert_eq!(canonical_form(s), *orbit.first().unwrap());
            orbits.insert(orbit);
        }
        assert_eq!(FockBasis::new(&inst, n).unwrap().dimensions()[n], orbits.len());
    }
    assert_eq!(FockBasis::new(&inst, 3).unwrap().dimensions()[3], 6);
}

#[test]
fn class_coproduct_does_not_depend_on_the_representative() {
    for name in ["perm_f", "graphs", "parking"] {
        let inst = instance(name, &Params::default()).unwrap();
        let n_max = if name == "parking" { 3 } else { 4 };
        let t = fock_tables(&inst, F, S, n_max, &FockOptions::default()).unwrap();
        for n in 0..=n_max {
            for s in inst.elements_std(n).unwrap().iter() {
                let mut seen = BTreeMap::new();
                for cut in inst.pi(F, s).cuts() {
                    let x = t.index_of_element(&s.restrict(cut.down)).unwrap();
                    let y = t.index_of_element(&s.restrict(cut.up)).unwrap();
                    *seen.entry((x, y)).or_insert(0u64) += 1;
                }
                assert_eq!(seen, t.coproduct[t.index_of_element(s).unwrap()], "{name}");
            }
        }
    }
}

#[test]
fn standard_split_orbit_sums_scale_by_binomials() {
    let inst = instance("perm_f", &Params::default()).unwrap();
    let t = fock_tables(&inst, F, S, 4, &FockOptions::default()).unwrap();
    let basis = FockBasis::new(&inst, 4).unwrap();
    for c in 0..t.len() {
        let n = t.degree(c);
        let s = basis.repr(c);
        let orbit: BTreeSet<Element> = relabelings(n).iter().map(|m| s.relabel(m)).collect();
        assert_eq!(orbit.len() as u64, basis.orbit_size(c));
        for k in 0..=n {
            let down = subset::full(k);
            let standard = orbit.iter().filter(|o| inst.pi(F, o).is_cut(down)).count() as u64;
            let all_cuts: u64 =
                t.coproduct[c].iter().filter(|(&(x, _), _)| t.degree(x) == k).map(|(_, &v)| v).sum();
            assert_eq!(standard * binomial(n, k), basis.orbit_size(c) * all_cuts);
        }
    }
}

#[test]
fn global_descent_coproduct() {
    let t = table("perm_m", F, S, 2);
    let c = t.index_of_element(&perm(&[2, 1])).unwrap();
    let one = t.index_of_element(&perm(&[1])).unwrap();
    assert_eq!(t.coproduct[c].get(&(one, one)), Some(&1));
    let id = t.index_of_element(&perm(&[1, 2])).unwrap();
    assert_eq!(t.coproduct[id].get(&(one, one)), None);
}

#[test]
fn json_round_trip_and_determinism() {
    let t = table("perm_m/213", F, S, 4);
    let again = FockTable::from_json(&t.to_json()).unwrap();
    assert_eq!(again, t);
    assert_eq!(table("perm_m/213", F, S, 4).to_json_string(), t.to_json_string());
    assert!(t.to_csv().starts_with("kind,x,y,z,coeff\n"));
    assert!(matches!(FockTable::from_json(&serde_json::json!({"instance": 3})), Err(FockError::BadTable(_))));
}

#[test]
fn preconditions() {
    let cc = instance("cc", &Params::default()).unwrap();
    assert!(matches!(
        fock_tables(&cc, F, S, 3, &FockOptions::default()),
        Err(FockError::NotIntertwined { .. })
    ));
    let perm_f = instance("perm_f", &Params::default()).unwrap();
    assert!(matches!(fock_tables(&perm_f, F, F, 2, &FockOptions::default()), Err(FockError::SameIndex)));
    assert!(fock_tables(&perm_f, F, S, 9, &FockOptions::default()).is_err());
}

#[test]
fn corrupted_tables_fail_the_axioms() {
    let mut t = table("perm_f", F, S, 3);
    assert!(verify_hopf_axioms(&t).passed);
    let (&key, _) = t.product.iter().find(|(&(a, b), _)| t.degree(a) == 1 && t.degree(b) == 1).unwrap();
    let entry = t.product.get_mut(&key).unwrap();
    *entry.values_mut().next().unwrap() += 1;
    let report = verify_hopf_axioms(&t);
    assert!(!report.passed);
    assert!(report.witness.is_some());
}

#[test]
fn graded_duals() {
    let t = table("perm_f", F, S, 3);
    let d = graded_dual(&t);
    assert_eq!(graded_dual(&d), t);
    assert!(verify_hopf_axioms(&d).passed);
    let other = table("perm_f", S, F, 3);
    assert!(check_isomorphism_by_constants(&d, &other).is_some());
}

#[test]
fn bijections_of_classes() {
    let t = table("perm_f", F, S, 3);
    let id = check_isomorphism_by_constants(&t, &t).unwrap();
    assert!(id.iter().enumerate().all(|(i, &j)| t.degree(i) == t.degree(j)));

    // reverse the class order inside each degree
    let mut perm_idx: Vec<usize> = (0..t.len()).collect();
    for n in 0..=3 {
        let cls: Vec<usize> = (0..t.len()).filter(|&i| t.degree(i) == n).collect();
        for (i, &c) in cls.iter().enumerate() {
            perm_idx[c] = cls[cls.len() - 1 - i];
        }
    }
    let mut shuffled = t.clone();
    for (i, &j) in perm_idx.iter().enumerate() {
        shuffled.classes[j] = t.classes[i].clone();
        shuffled.coproduct[j] = t.coproduct[i].iter().map(|(&(x, y), &k)| ((perm_idx[x], perm_idx[y]), k)).collect();
    }
    shuffled.product = t
        .product
        .iter()
        .map(|(&(x, y), r)| ((perm_idx[x], perm_idx[y]), r.iter().map(|(&c, &k)| (perm_idx[c], k)).collect()))
        .collect();
    let found = check_isomorphism_by_constants(&t, &shuffled).unwrap();
    assert!(verify_hopf_axioms(&shuffled).passed);
    assert_eq!(found.len(), t.len());
    let m = table("perm_m", F, S, 3);
    assert_eq!(check_isomorphism_by_constants(&t, &m), None);
}

#[test]
fn change_of_basis_between_the_two_permutation_structures() {
    let f = table("perm_f", F, S, 3);
    let m = table("perm_m", F, S, 3);
    let phi = check_isomorphism_by_change_of_basis(&f, &m).unwrap();
    assert!(substitution_holds(&f, &m, &phi));
    for block in &phi.blocks {
        for (i, row) in block.iter().enumerate() {
            assert_eq!(row[i], 1);
            assert!(row.iter().all(|&v| v == 0 || v == 1));
        }
    }
    let own = check_isomorphism_by_change_of_basis(&f, &f).unwrap();
    for block in &own.blocks {
        for (i, row) in block.iter().enumerate() {
            assert!(row.iter().enumerate().all(|(j, &v)| v == i64::from(i == j)));
        }
    }
    let colored = instance("colored", &Params { palette: 1 }).unwrap();
    let c = fock_tables(&colored, F, S, 2, &FockOptions::default()).unwrap();
    let f2 = table("perm_f", F, S, 2);
    assert!(check_isomorphism_by_change_of_basis(&f2, &c).is_none());
}

mod random_relabelings {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig {
            rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
            ..ProptestConfig::default()
        })]
        #[test]
        fn canonical_form_is_constant_on_orbits(
            name in prop::sample::select(vec!["perm_m", "graphs", "parking", "preorders", "tensor"]),
            pick in any::<prop::sample::Index>(),
            shuffle in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let inst = instance(name, &Params::default()).unwrap();
            let elements = inst.elements_std(4).unwrap();
            let s = elements[pick.index(elements.len())];
            let mut map = [0u8; MAX_LABELS];
            for (i, &v) in shuffle.iter().enumerate() {
                map[i] = v as u8;
            }
            let t = s.relabel(&map);
            prop_assert_eq!(canonical_form(&t), canonical_form(&s));
            prop_assert!(canonical_form(&s) <= s);
        }
    }
}
