//! Restriction species over preorders: elements, the species trait, the
//! per-size element cache, and the cut coproducts together with their dual
//! products.

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::ser::{Serialize, Serializer};
use serde_json::json;
use thiserror::Error;

use crate::instances::basic::{Coloring, Graph, Word};
use crate::instances::pairs::PreorderPair;
use crate::instances::parking::ParkingPair;
use crate::preorder::{permutation_of, Preorder};
use crate::subset::{self, Subset, MAX_LABELS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpeciesError {
    #[error("instance `{instance}`: size {n} exceeds the cap {cap}")]
    CapExceeded { instance: String, n: usize, cap: usize },
    #[error("({a:#b}, {b:#b}) is not a decomposition of {ground:#b}")]
    BadDecomposition { a: Subset, b: Subset, ground: Subset },
    #[error("grounds {0:#b} and {1:#b} are not disjoint")]
    Overlap(Subset, Subset),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("bad instance parameter: {0}")]
    BadParameter(String),
}

/// Selects `pi_1`/`Delta^1` or `pi_2`/`Delta^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Which {
    First,
    Second,
}

impl Which {
    pub fn other(self) -> Which {
        match self {
            Which::First => Which::Second,
            Which::Second => Which::First,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Which::First => 1,
            Which::Second => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Which> {
        match i {
            1 => Some(Which::First),
            2 => Some(Which::Second),
            _ => None,
        }
    }
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl Serialize for Which {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.index())
    }
}

/// An element of some species over a finite ground set of labels.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Colored(Coloring),
    Tensor(Word),
    Graph(Graph),
    Order(Preorder),
    Pair(PreorderPair),
    Parking(ParkingPair),
}

impl Element {
    pub fn ground(&self) -> Subset {
        match self {
            Element::Colored(c) => c.ground,
            Element::Tensor(w) => w.coloring.ground,
            Element::Graph(g) => g.ground,
            Element::Order(p) => p.ground(),
            Element::Pair(p) => p.first.ground(),
            Element::Parking(p) => p.first.ground(),
        }
    }

    pub fn size(&self) -> usize {
        subset::size(self.ground())
    }

    /// `s|_Y`.
    pub fn restrict(&self, y: Subset) -> Element {
        debug_assert!(subset::is_subset(y, self.ground()));
        match self {
            Element::Colored(c) => Element::Colored(c.restrict(y)),
            Element::Tensor(w) => Element::Tensor(w.restrict(y)),
            Element::Graph(g) => Element::Graph(g.restrict(y)),
            Element::Order(p) => Element::Order(p.restrict(y)),
            Element::Pair(p) => Element::Pair(p.restrict(y)),
            Element::Parking(p) => Element::Parking(p.restrict(y)),
        }
    }

    /// Transport along an injective label map defined on the ground.
    pub fn relabel(&self, map: &[u8; MAX_LABELS]) -> Element {
        match self {
            Element::Colored(c) => Element::Colored(c.relabel(map)),
            Element::Tensor(w) => Element::Tensor(w.relabel(map)),
            Element::Graph(g) => Element::Graph(g.relabel(map)),
            Element::Order(p) => Element::Order(p.relabel(map)),
            Element::Pair(p) => Element::Pair(p.relabel(map)),
            Element::Parking(p) => Element::Parking(p.relabel(map)),
        }
    }

    /// Order-preserving relabeling onto `{0, .., n-1}`.
    pub fn standardize(&self) -> Element {
        self.relabel(&standard_map(self.ground()))
    }

    /// Move onto `target` (same size), matching elements in increasing order.
    pub fn transport(&self, target: Subset) -> Element {
        self.relabel(&order_map(self.ground(), target))
    }

    /// The permutation of a pair of total orders.
    pub fn permutation(&self) -> Option<Vec<usize>> {
        match self {
            Element::Pair(p) if p.first.is_total_order() && p.second.is_total_order() => {
                Some(permutation_of(&p.first, &p.second))
            }
            _ => None,
        }
    }

    /// Short human-readable form.
    pub fn describe(&self) -> String {
        match self {
            Element::Colored(c) => format!("colors {}", c.word()),
            Element::Tensor(w) => format!("word {}", w.word()),
            Element::Graph(g) => format!("edges {:?}", g.edges()),
            Element::Order(p) => format!("{p:?}"),
            Element::Pair(p) => match self.permutation() {
                Some(sigma) => sigma.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
                None => format!("({:?}, {:?})", p.first, p.second),
            },
            Element::Parking(p) => {
                format!("({}, {})", p.first.describe(), p.second.describe())
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ground: Vec<usize> = subset::elements(self.ground()).collect();
        match self {
            Element::Colored(c) => json!({
                "kind": "colored",
                "ground": ground,
                "colors": ground.iter().map(|&x| c.colors[x]).collect::<Vec<_>>(),
            }),
            Element::Tensor(w) => json!({
                "kind": "tensor",
                "ground": ground,
                "colors": ground.iter().map(|&x| w.coloring.colors[x]).collect::<Vec<_>>(),
                "order": w.order,
            }),
            Element::Graph(g) => json!({
                "kind": "graph",
                "ground": ground,
                "edges": g.edges(),
            }),
            Element::Order(p) => json!({ "kind": "preorder", "order": p }),
            Element::Pair(p) => {
                let mut v = json!({ "kind": "pair", "first": p.first, "second": p.second });
                if let Some(sigma) = self.permutation() {
                    v["permutation"] = json!(sigma);
                }
                v
            }
            Element::Parking(p) => json!({
                "kind": "parking",
                "ground": ground,
                "first": ground.iter().map(|&x| p.first.level(x)).collect::<Vec<_>>(),
                "second": ground.iter().map(|&x| p.second.level(x)).collect::<Vec<_>>(),
            }),
        }
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

/// `x -> rank of x in ground`.
pub fn standard_map(ground: Subset) -> [u8; MAX_LABELS] {
    order_map(ground, subset::full(subset::size(ground)))
}

/// The increasing bijection `from -> to` as a label map.
pub fn order_map(from: Subset, to: Subset) -> [u8; MAX_LABELS] {
    assert_eq!(subset::size(from), subset::size(to));
    let mut map = [0u8; MAX_LABELS];
    for (x, y) in subset::elements(from).zip(subset::elements(to)) {
        map[x] = y as u8;
    }
    map
}

/// Behaviour defining one restriction species over preorders.
///
/// Restriction and relabeling live on [`Element`]; a species supplies its
/// elements on `{0, .., n-1}` and its two projections.
pub trait Species: Send + Sync {
    fn name(&self) -> String;

    /// Largest ground size `enumerate` accepts.
    fn cap(&self) -> usize;

    /// All elements on `{0, .., n-1}`, each once. Called with `n <= cap()`.
    fn enumerate(&self, n: usize) -> Vec<Element>;

    fn pi(&self, which: Which, s: &Element) -> Preorder;

    /// Candidate elements on `u.ground() | v.ground()` containing every `s`
    /// with `Delta^which(s) = (u, v)`. Results are filtered by the caller.
    fn glue(&self, _which: Which, _u: &Element, _v: &Element) -> Option<Vec<Element>> {
        None
    }

    /// Every element on `A | B | C | D` whose four corner restrictions are the
    /// given ones and for which `A | B` is a cut of `pi_1` and `A | C` a cut of
    /// `pi_2`. `None` when the species has no direct construction.
    fn extend(&self, _corners: &Corners) -> Option<Vec<Element>> {
        None
    }
}

/// A decomposition `(A, B, C, D)` with elements on `A|B`, `C|D`, `A|C`, `B|D`.
#[derive(Clone, Copy, Debug)]
pub struct Corners {
    pub a: Subset,
    pub b: Subset,
    pub c: Subset,
    pub d: Subset,
    pub ab: Element,
    pub cd: Element,
    pub ac: Element,
    pub bd: Element,
}

/// A species together with its element cache.
pub struct Instance {
    species: Box<dyn Species>,
    cache: [OnceLock<Arc<Vec<Element>>>; MAX_LABELS + 1],
}

pub type InstanceRef = Arc<Instance>;

impl Instance {
    pub fn new<S: Species + 'static>(species: S) -> InstanceRef {
        Arc::new(Instance { species: Box::new(species), cache: std::array::from_fn(|_| OnceLock::new()) })
    }

    pub fn name(&self) -> String {
        self.species.name()
    }

    pub fn cap(&self) -> usize {
        self.species.cap()
    }

    pub fn species(&self) -> &dyn Species {
        self.species.as_ref()
    }

    pub fn pi(&self, which: Which, s: &Element) -> Preorder {
        self.species.pi(which, s)
    }

    fn check_cap(&self, n: usize) -> Result<(), SpeciesError> {
        if n > self.cap() {
            return Err(SpeciesError::CapExceeded { instance: self.name(), n, cap: self.cap() });
        }
        Ok(())
    }

    /// Elements on `{0, .., n-1}`, computed once.
    pub fn elements_std(&self, n: usize) -> Result<Arc<Vec<Element>>, SpeciesError> {
        self.check_cap(n)?;
        Ok(self.cache[n].get_or_init(|| Arc::new(self.species.enumerate(n))).clone())
    }

    /// Elements on an arbitrary ground, transported from the standard ground.
    pub fn elements(&self, ground: Subset) -> Result<Vec<Element>, SpeciesError> {
        let n = subset::size(ground);
        let std = self.elements_std(n)?;
        if ground == subset::full(n) {
            return Ok(std.as_ref().clone());
        }
        let map = order_map(subset::full(n), ground);
        Ok(std.iter().map(|s| s.relabel(&map)).collect())
    }

    /// The unique element on the empty set.
    pub fn unit(&self) -> Element {
        self.elements_std(0).expect("empty ground is always within the cap")[0]
    }
}

/// Result of a cut coproduct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CutResult {
    Zero,
    Pair(Element, Element),
}

impl CutResult {
    pub fn is_zero(&self) -> bool {
        matches!(self, CutResult::Zero)
    }
}

/// `Delta^which_{A,B}(s)`: the two restrictions when `(A, B)` is a cut of
/// `pi_which(s)`, zero otherwise.
pub fn delta(
    inst: &Instance,
    which: Which,
    s: &Element,
    a: Subset,
    b: Subset,
) -> Result<CutResult, SpeciesError> {
    let ground = s.ground();
    if a & b != 0 || a | b != ground {
        return Err(SpeciesError::BadDecomposition { a, b, ground });
    }
    Ok(delta_unchecked(inst, which, s, a, b))
}

pub(crate) fn delta_unchecked(inst: &Instance, which: Which, s: &Element, a: Subset, b: Subset) -> CutResult {
    if inst.pi(which, s).is_cut(a) {
        CutResult::Pair(s.restrict(a), s.restrict(b))
    } else {
        CutResult::Zero
    }
}

/// `mu_which(u, v)`: every `s` on the union of the grounds with
/// `Delta^which(s) = (u, v)`, each once, in increasing order.
pub fn mu(inst: &Instance, which: Which, u: &Element, v: &Element) -> Result<Vec<Element>, SpeciesError> {
    let (a, b) = (u.ground(), v.ground());
    if a & b != 0 {
        return Err(SpeciesError::Overlap(a, b));
    }
    let candidates = match inst.species().glue(which, u, v) {
        Some(c) => c,
        None => inst.elements(a | b)?,
    };
    let target = CutResult::Pair(*u, *v);
    let mut out: Vec<Element> =
        candidates.into_iter().filter(|s| delta_unchecked(inst, which, s, a, b) == target).collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// All shuffles of two sequences.
pub fn shuffles(left: &[usize], right: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(left.len() + right.len());
    fn go(l: &[usize], r: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if l.is_empty() && r.is_empty() {
            out.push(cur.clone());
            return;
        }
        if let Some((&x, rest)) = l.split_first() {
            cur.push(x);
            go(rest, r, cur, out);
            cur.pop();
        }
        if let Some((&x, rest)) = r.split_first() {
            cur.push(x);
            go(l, rest, cur, out);
            cur.pop();
        }
    }
    go(left, right, &mut cur, &mut out);
    out
}

/// All permutations of `items`, lexicographic in positions.
pub fn permutations_of(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations_of(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
