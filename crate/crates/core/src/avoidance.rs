//! Pattern avoidance: the subspecies of elements with no restriction in a
//! given pattern set, irreducibility of the pattern set, and the resulting
//! sub- and quotient bimonoids.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::instances::parking::ParkingFiltration;
use crate::preorder::Preorder;
use crate::species::{Corners, Element, Instance, InstanceRef, Species, SpeciesError, Which};
use crate::subset;
use crate::verify::{Stage, VerificationReport};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AvoidanceError {
    #[error("unknown avoidance preset `{0}`")]
    UnknownPreset(String),
    #[error("pattern set is not irreducible for Delta^{which} up to size {nmax}")]
    IrreducibilityNotVerified { which: Which, nmax: usize },
    #[error(transparent)]
    Species(#[from] SpeciesError),
}

pub type Predicate = Arc<dyn Fn(&Element) -> bool + Send + Sync>;

/// A pattern set given by a membership predicate. Membership must be
/// invariant under relabeling.
#[derive(Clone)]
pub struct AvoidanceSet {
    name: String,
    pred: Predicate,
}

impl fmt::Debug for AvoidanceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AvoidanceSet({})", self.name)
    }
}

impl AvoidanceSet {
    pub fn new(name: impl Into<String>, pred: impl Fn(&Element) -> bool + Send + Sync + 'static) -> Self {
        AvoidanceSet { name: name.into(), pred: Arc::new(pred) }
    }

    /// The relabeling closure of finitely many elements.
    pub fn from_elements(name: impl Into<String>, elements: &[Element]) -> Self {
        let std: Vec<Element> = elements.iter().map(|e| e.standardize()).collect();
        AvoidanceSet::new(name, move |s| std.contains(&s.standardize()))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn contains(&self, s: &Element) -> bool {
        (self.pred)(s)
    }
}

fn parse_permutation(word: &str) -> Option<Vec<usize>> {
    let sigma: Vec<usize> = word.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>()?;
    let mut sorted = sigma.clone();
    sorted.sort_unstable();
    (!sigma.is_empty() && sorted == (1..=sigma.len()).collect::<Vec<_>>()).then_some(sigma)
}

fn is_cherry(p: &Preorder) -> bool {
    if p.size() != 3 || !p.is_poset() {
        return false;
    }
    let g = p.ground();
    subset::elements(g).any(|z| {
        let below: Vec<usize> = subset::elements(g).filter(|&x| p.lt(x, z)).collect();
        below.len() == 2 && !p.comparable(below[0], below[1])
    })
}

fn parking_parts(s: &Element) -> Option<(ParkingFiltration, ParkingFiltration)> {
    match s {
        Element::Parking(p) => Some((p.first, p.second)),
        _ => None,
    }
}

pub const PRESETS: &[&str] = &["<permutations joined by +>", "cherry", "V", "pqsym", "fqsym", "nondecreasing-parking"];

fn single_preset(name: &str) -> Option<Predicate> {
    Some(match name {
        "cherry" => Arc::new(|s: &Element| matches!(s, Element::Order(p) if is_cherry(p))),
        "V" => Arc::new(|s: &Element| matches!(s, Element::Order(p) if is_cherry(&p.opposite()))),
        "pqsym" => Arc::new(|s: &Element| parking_parts(s).is_some_and(|(_, g)| !g.is_total())),
        "fqsym" => {
            Arc::new(|s: &Element| parking_parts(s).is_some_and(|(f, g)| !f.is_total() || !g.is_total()))
        }
        "nondecreasing-parking" => Arc::new(|s: &Element| {
            let Some((f, g)) = parking_parts(s) else { return false };
            if !g.is_total() {
                return true;
            }
            if s.size() != 2 {
                return false;
            }
            let seq = g.preorder().total_sequence().expect("total");
            f.level(seq[0]) > f.level(seq[1])
        }),
        _ => {
            let sigma = parse_permutation(name)?;
            Arc::new(move |s: &Element| s.permutation().is_some_and(|p| p == sigma))
        }
    })
}

/// Look up a pattern set: a named preset, a permutation word such as
/// `213`, or a union of those joined by `+`.
pub fn preset(name: &str) -> Result<AvoidanceSet, AvoidanceError> {
    let preds: Vec<Predicate> = name
        .split('+')
        .map(single_preset)
        .collect::<Option<_>>()
        .ok_or_else(|| AvoidanceError::UnknownPreset(name.into()))?;
    Ok(AvoidanceSet::new(name, move |s| preds.iter().any(|p| p(s))))
}

/// Whether some restriction of `s` (including `s`) lies in the set.
pub fn has_part(set: &AvoidanceSet, s: &Element) -> bool {
    subset::subsets(s.ground()).into_iter().any(|y| set.contains(&s.restrict(y)))
}

/// [`has_part`] memoized on standardized elements.
pub struct PartDetector {
    set: AvoidanceSet,
    memo: RwLock<HashMap<Element, bool>>,
}

impl PartDetector {
    pub fn new(set: AvoidanceSet) -> Self {
        PartDetector { set, memo: RwLock::new(HashMap::new()) }
    }

    pub fn set(&self) -> &AvoidanceSet {
        &self.set
    }

    pub fn has_part(&self, s: &Element) -> bool {
        let key = s.standardize();
        if let Some(&v) = self.memo.read().expect("memo lock").get(&key) {
            return v;
        }
        let g = key.ground();
        let v = self.set.contains(&key)
            || subset::elements(g).any(|x| self.has_part(&key.restrict(g & !subset::singleton(x))));
        self.memo.write().expect("memo lock").insert(key, v);
        v
    }
}

/// The elements of a parent instance avoiding a pattern set.
pub struct Avoiding {
    parent: InstanceRef,
    detector: Arc<PartDetector>,
}

impl Avoiding {
    fn keep(&self, items: Vec<Element>) -> Vec<Element> {
        items.into_iter().filter(|s| !self.detector.has_part(s)).collect()
    }
}

impl Species for Avoiding {
    fn name(&self) -> String {
        format!("{}/{}", self.parent.name(), self.detector.set().name())
    }
    fn cap(&self) -> usize {
        self.parent.cap()
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        let all = self.parent.elements_std(n).expect("within the parent cap");
        self.keep(all.as_ref().clone())
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        self.parent.pi(which, s)
    }
    fn glue(&self, which: Which, u: &Element, v: &Element) -> Option<Vec<Element>> {
        self.parent.species().glue(which, u, v).map(|c| self.keep(c))
    }
    fn extend(&self, corners: &Corners) -> Option<Vec<Element>> {
        self.parent.species().extend(corners).map(|c| self.keep(c))
    }
}

pub fn avoiding(parent: InstanceRef, set: AvoidanceSet) -> InstanceRef {
    Instance::new(Avoiding { parent, detector: Arc::new(PartDetector::new(set)) })
}

pub fn avoiding_instance(parent: InstanceRef, preset_name: &str) -> Result<InstanceRef, AvoidanceError> {
    Ok(avoiding(parent, preset(preset_name)?))
}

/// Checks that whenever `s` has a part in the set and `(U, V)` is a cut of
/// `pi_which(s)`, one of `s|_U`, `s|_V` has a part in the set.
pub fn is_irreducible(
    parent: &Instance,
    set: &AvoidanceSet,
    which: Which,
    nmax: usize,
) -> Result<VerificationReport, SpeciesError> {
    let detector = PartDetector::new(set.clone());
    let mut report = VerificationReport::new(format!("irreducible_delta{}", which.index()), parent.name(), nmax);
    let mut containing = 0u64;
    let mut cuts = 0u64;
    for n in 0..=nmax {
        for s in parent.elements_std(n)?.iter() {
            if !detector.has_part(s) {
                continue;
            }
            containing += 1;
            for cut in parent.pi(which, s).cuts() {
                cuts += 1;
                let (u, v) = (s.restrict(cut.down), s.restrict(cut.up));
                if !detector.has_part(&u) && !detector.has_part(&v) {
                    report.fail(
                        Stage::Irreducibility,
                        json!({ "s": s, "U": subset::elements(cut.down).collect::<Vec<_>>(),
                                "V": subset::elements(cut.up).collect::<Vec<_>>(), "s_U": u, "s_V": v }),
                    );
                    report.stats = BTreeMap::from([("containing".into(), containing), ("cuts".into(), cuts)]);
                    return Ok(report);
                }
            }
        }
    }
    report.stats = BTreeMap::from([("containing".into(), containing), ("cuts".into(), cuts)]);
    Ok(report)
}

/// `(Delta^i, mu_j)` as a pair of indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BimonoidIndex {
    pub delta: Which,
    pub mu: Which,
}

impl fmt::Display for BimonoidIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(Delta^{}, mu_{})", self.delta, self.mu)
    }
}

/// Which bimonoid structures the avoiding subspecies inherits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Roles {
    pub irreducible_for: Which,
    pub sub_bimonoid_of: BimonoidIndex,
    pub quotient_of: BimonoidIndex,
}

/// Given irreducibility for `Delta^which`, the avoiders form a
/// sub-bimonoid of `(Delta^other, mu_which)` and a quotient of
/// `(Delta^which, mu_other)`.
pub fn quotient_or_sub_bimonoid(
    parent: InstanceRef,
    set: AvoidanceSet,
    which: Which,
    nmax: usize,
) -> Result<(InstanceRef, Roles), AvoidanceError> {
    if !is_irreducible(&parent, &set, which, nmax)?.passed {
        return Err(AvoidanceError::IrreducibilityNotVerified { which, nmax });
    }
    let roles = Roles {
        irreducible_for: which,
        sub_bimonoid_of: BimonoidIndex { delta: which.other(), mu: which },
        quotient_of: BimonoidIndex { delta: which, mu: which.other() },
    };
    Ok((avoiding(parent, set), roles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{instance, Params};

    #[test]
    fn permutation_words_parse() {
        assert_eq!(parse_permutation("213"), Some(vec![2, 1, 3]));
        assert_eq!(parse_permutation("223"), None);
        assert!(preset("213+132").is_ok());
        assert!(preset("cherry+V").is_ok());
        assert!(matches!(preset("213+x"), Err(AvoidanceError::UnknownPreset(_))));
        assert!(matches!(preset("nope"), Err(AvoidanceError::UnknownPreset(_))));
    }

    #[test]
    fn cherry_shape() {
        let cherry = Preorder::closure(0b111, &[(0, 2), (1, 2)]).unwrap();
        assert!(is_cherry(&cherry));
        assert!(!is_cherry(&cherry.opposite()));
        assert!(!is_cherry(&Preorder::chain(&[0, 1, 2])));
    }

    #[test]
    fn memoized_detector_agrees_with_scan() {
        let perm = instance("perm_f", &Params::default()).unwrap();
        let set = preset("213").unwrap();
        let det = PartDetector::new(set.clone());
        for s in perm.elements_std(4).unwrap().iter() {
            assert_eq!(det.has_part(s), has_part(&set, s));
        }
    }
}
