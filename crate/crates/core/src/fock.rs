//! The Fock functor: isomorphism classes of elements as a graded basis, the
//! structure constants of the resulting Hopf algebra, their verification,
//! duals, and searches for isomorphisms between tables.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::species::{mu, order_map, permutations_of, Element, Instance, SpeciesError, Which};
use crate::subset::{self, MAX_LABELS};
use crate::verify::{check_intertwined, Stage, VerificationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error(transparent)]
    Species(#[from] SpeciesError),
    #[error("`{instance}` is not intertwined up to size {nmax}; pass force to build the table anyway")]
    NotIntertwined { instance: String, nmax: usize },
    #[error("delta and mu use the same projection; pass force to build the table anyway")]
    SameIndex,
    #[error("structure constant overflow")]
    Overflow,
    #[error("malformed table: {0}")]
    BadTable(String),
}

/// Canonical representative of the class of `s`: the least relabeling onto
/// `{0, .., n-1}`.
pub fn canonical_form(s: &Element) -> Element {
    let std = s.standardize();
    let n = std.size();
    permutations_of(&(0..n).collect::<Vec<_>>())
        .iter()
        .map(|p| std.relabel(&label_map(p)))
        .min()
        .expect("at least the identity")
}

fn label_map(p: &[usize]) -> [u8; MAX_LABELS] {
    let mut map = [0u8; MAX_LABELS];
    for (i, &v) in p.iter().enumerate() {
        map[i] = v as u8;
    }
    map
}

/// Stable id of a class: hash of the canonical JSON of its representative.
pub fn class_id(repr: &Element) -> String {
    let text = serde_json::to_string(&repr.to_json()).expect("element json");
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

struct Degree {
    reprs: Vec<Element>,
    orbit_sizes: Vec<u64>,
    class_of: HashMap<Element, usize>,
}

/// Orbit classes of an instance up to a degree.
pub struct FockBasis {
    degrees: Vec<Degree>,
    offsets: Vec<usize>,
}

impl FockBasis {
    pub fn new(inst: &Instance, n_max: usize) -> Result<Self, SpeciesError> {
        let mut degrees = Vec::new();
        let mut offsets = Vec::new();
        let mut offset = 0;
        for n in 0..=n_max {
            let elems = inst.elements_std(n)?;
            let perms: Vec<[u8; MAX_LABELS]> =
                permutations_of(&(0..n).collect::<Vec<_>>()).iter().map(|p| label_map(p)).collect();
            let mut seen: HashMap<Element, usize> = HashMap::new();
            let mut orbits: Vec<(Element, Vec<Element>)> = Vec::new();
            for s in elems.iter() {
                if seen.contains_key(s) {
                    continue;
                }
                let mut orbit: Vec<Element> = perms.iter().map(|m| s.relabel(m)).collect();
                orbit.sort_unstable();
                orbit.dedup();
                for e in &orbit {
                    seen.insert(*e, orbits.len());
                }
                orbits.push((orbit[0], orbit));
            }
            let mut order: Vec<usize> = (0..orbits.len()).collect();
            order.sort_by_key(|&i| orbits[i].0);
            let mut rank = vec![0; orbits.len()];
            for (r, &i) in order.iter().enumerate() {
                rank[i] = r;
            }
            let class_of = seen.into_iter().map(|(e, i)| (e, rank[i])).collect();
            let reprs: Vec<Element> = order.iter().map(|&i| orbits[i].0).collect();
            let orbit_sizes = order.iter().map(|&i| orbits[i].1.len() as u64).collect();
            offsets.push(offset);
            offset += reprs.len();
            degrees.push(Degree { reprs, orbit_sizes, class_of });
        }
        Ok(FockBasis { degrees, offsets })
    }

    pub fn n_max(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.reprs.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.offsets.last().copied().unwrap_or(0) + self.degrees.last().map_or(0, |d| d.reprs.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Global index of the class of `s`.
    pub fn index_of(&self, s: &Element) -> Option<usize> {
        let n = s.size();
        let d = self.degrees.get(n)?;
        d.class_of.get(&s.standardize()).map(|i| self.offsets[n] + i)
    }

    pub fn repr(&self, index: usize) -> Element {
        let (n, i) = self.locate(index);
        self.degrees[n].reprs[i]
    }

    pub fn orbit_size(&self, index: usize) -> u64 {
        let (n, i) = self.locate(index);
        self.degrees[n].orbit_sizes[i]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.locate(index).0
    }

    fn locate(&self, index: usize) -> (usize, usize) {
        let n = self.offsets.partition_point(|&o| o <= index) - 1;
        (n, index - self.offsets[n])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub id: String,
    pub degree: usize,
    pub repr: Value,
}

type Coeffs<K> = BTreeMap<K, u64>;

/// Structure constants of a graded Hopf algebra on a class basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockTable {
    pub instance: String,
    pub delta: Which,
    pub mu: Which,
    pub n_max: usize,
    pub classes: Vec<ClassInfo>,
    /// `a * b` for every pair with total degree at most `n_max`.
    pub product: BTreeMap<(usize, usize), Coeffs<usize>>,
    /// `Delta(c)` for every class.
    pub coproduct: Vec<Coeffs<(usize, usize)>>,
}

#[derive(Clone, Copy, Debug)]
pub struct FockOptions {
    /// Build even if the instance fails the intertwining check or `delta == mu`.
    pub force: bool,
    /// Size up to which intertwining is checked first; capped at the table degree.
    pub check_nmax: usize,
}

impl Default for FockOptions {
    fn default() -> Self {
        FockOptions { force: false, check_nmax: 4 }
    }
}

/// The Fock table of `(Delta^delta, mu_mu)` up to degree `n_max`.
pub fn fock_tables(
    inst: &Instance,
    delta: Which,
    mu_which: Which,
    n_max: usize,
    opts: &FockOptions,
) -> Result<FockTable, FockError> {
    if n_max > inst.cap() {
        return Err(SpeciesError::CapExceeded { instance: inst.name(), n: n_max, cap: inst.cap() }.into());
    }
    if !opts.force {
        if delta == mu_which {
            return Err(FockError::SameIndex);
        }
        let nmax = n_max.min(opts.check_nmax);
        if !check_intertwined(inst, nmax)?.passed {
            return Err(FockError::NotIntertwined { instance: inst.name(), nmax });
        }
    }
    let basis = FockBasis::new(inst, n_max)?;
    build_table(inst, &basis, delta, mu_which)
}

fn build_table(inst: &Instance, basis: &FockBasis, delta: Which, mu_which: Which) -> Result<FockTable, FockError> {
    let n_max = basis.n_max();
    let total = basis.len();
    let classes: Vec<ClassInfo> = (0..total)
        .map(|i| {
            let r = basis.repr(i);
            ClassInfo { id: class_id(&r), degree: basis.degree(i), repr: r.to_json() }
        })
        .collect();

    let coproduct: Vec<Coeffs<(usize, usize)>> = (0..total)
        .into_par_iter()
        .map(|c| {
            let s = basis.repr(c);
            let mut out = Coeffs::new();
            for cut in inst.pi(delta, &s).cuts() {
                let x = basis.index_of(&s.restrict(cut.down)).expect("restrictions are classified");
                let y = basis.index_of(&s.restrict(cut.up)).expect("restrictions are classified");
                *out.entry((x, y)).or_default() += 1;
            }
            out
        })
        .collect();

    let pairs: Vec<(usize, usize)> = (0..total)
        .flat_map(|a| (0..total).map(move |b| (a, b)))
        .filter(|&(a, b)| basis.degree(a) + basis.degree(b) <= n_max)
        .collect();
    let products: Vec<Result<((usize, usize), Coeffs<usize>), FockError>> = pairs
        .into_par_iter()
        .map(|(a, b)| {
            let (p, q) = (basis.degree(a), basis.degree(b));
            let u = basis.repr(a);
            let v = basis.repr(b).relabel(&order_map(subset::full(q), subset::full(p + q) & !subset::full(p)));
            let mut out = Coeffs::new();
            for s in mu(inst, mu_which, &u, &v)? {
                let c = basis.index_of(&s).expect("products are classified");
                let e = out.entry(c).or_default();
                *e = e.checked_add(1).ok_or(FockError::Overflow)?;
            }
            Ok(((a, b), out))
        })
        .collect();
    let product = products.into_iter().collect::<Result<BTreeMap<_, _>, _>>()?;

    Ok(FockTable { instance: inst.name(), delta, mu: mu_which, n_max, classes, product, coproduct })
}

impl FockTable {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn dimensions(&self) -> Vec<usize> {
        let mut dims = vec![0; self.n_max + 1];
        for c in &self.classes {
            dims[c.degree] += 1;
        }
        dims
    }

    pub fn index_of_id(&self, id: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.id == id)
    }

    /// Index of the class of an element (any labels).
    pub fn index_of_element(&self, s: &Element) -> Option<usize> {
        self.index_of_id(&class_id(&canonical_form(s)))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.classes[i].degree
    }

    pub fn product_of(&self, a: usize, b: usize) -> Option<&Coeffs<usize>> {
        self.product.get(&(a, b))
    }

    fn in_degree(&self, n: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degree(i) == n).collect()
    }

    fn unit_index(&self) -> Option<usize> {
        let units = self.in_degree(0);
        (units.len() == 1).then(|| units[0])
    }

    pub fn to_json(&self) -> Value {
        let id = |i: usize| self.classes[i].id.clone();
        json!({
            "instance": self.instance,
            "N": self.n_max,
            "delta": self.delta,
            "mu": self.mu,
            "classes": self.classes,
            "product": self.product.iter().map(|(&(a, b), r)| json!({
                "a": id(a), "b": id(b),
                "result": r.iter().map(|(&c, &k)| json!({ "c": id(c), "coeff": k })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "coproduct": self.coproduct.iter().enumerate().map(|(c, r)| json!({
                "c": id(c),
                "result": r.iter().map(|(&(a, b), &k)| json!({ "a": id(a), "b": id(b), "coeff": k })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("table json")
    }

    pub fn from_json(v: &Value) -> Result<Self, FockError> {
        let bad = |m: &str| FockError::BadTable(m.to_string());
        let which = |key: &str| -> Result<Which, FockError> {
            v[key].as_u64().and_then(|i| Which::from_index(i as u8)).ok_or_else(|| bad(key))
        };
        let classes: Vec<ClassInfo> =
            serde_json::from_value(v["classes"].clone()).map_err(|e| FockError::BadTable(e.to_string()))?;
        let index: HashMap<&str, usize> = classes.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
        let look = |x: &Value| -> Result<usize, FockError> {
            x.as_str().and_then(|s| index.get(s).copied()).ok_or_else(|| bad("unknown class id"))
        };
        let coeff = |x: &Value| x["coeff"].as_u64().ok_or_else(|| bad("coeff"));
        let mut product = BTreeMap::new();
        for entry in v["product"].as_array().ok_or_else(|| bad("product"))? {
            let mut r = Coeffs::new();
            for t in entry["result"].as_array().ok_or_else(|| bad("result"))? {
                r.insert(look(&t["c"])?, coeff(t)?);
            }
            product.insert((look(&entry["a"])?, look(&entry["b"])?), r);
        }
        let mut coproduct = vec![Coeffs::new(); classes.len()];
        for entry in v["coproduct"].as_array().ok_or_else(|| bad("coproduct"))? {
            let c = look(&entry["c"])?;
            for t in entry["result"].as_array().ok_or_else(|| bad("result"))? {
                coproduct[c].insert((look(&t["a"])?, look(&t["b"])?), coeff(t)?);
            }
        }
        Ok(FockTable {
            instance: v["instance"].as_str().ok_or_else(|| bad("instance"))?.to_string(),
            delta: which("delta")?,
            mu: which("mu")?,
            n_max: v["N"].as_u64().ok_or_else(|| bad("N"))? as usize,
            classes,
            product,
            coproduct,
        })
    }

    /// Rows `kind,x,y,z,coeff`: `product,a,b,c,k` for `a*b ∋ k c` and
    /// `coproduct,c,a,b,k` for `Delta(c) ∋ k a⊗b`.
    pub fn to_csv(&self) -> String {
        let id = |i: usize| &self.classes[i].id;
        let mut out = String::from("kind,x,y,z,coeff\n");
        for (&(a, b), r) in &self.product {
            for (&c, &k) in r {
                out.push_str(&format!("product,{},{},{},{k}\n", id(a), id(b), id(c)));
            }
        }
        for (c, r) in self.coproduct.iter().enumerate() {
            for (&(a, b), &k) in r {
                out.push_str(&format!("coproduct,{},{},{},{k}\n", id(c), id(a), id(b)));
            }
        }
        out
    }
}

/// Transpose the structure constants degree by degree.
pub fn graded_dual(table: &FockTable) -> FockTable {
    let n = table.len();
    let mut product: BTreeMap<(usize, usize), Coeffs<usize>> = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            if table.degree(a) + table.degree(b) <= table.n_max {
                product.insert((a, b), Coeffs::new());
            }
        }
    }
    for (c, r) in table.coproduct.iter().enumerate() {
        for (&(a, b), &k) in r {
            product.entry((a, b)).or_default().insert(c, k);
        }
    }
    let mut coproduct = vec![Coeffs::new(); n];
    for (&(a, b), r) in &table.product {
        for (&c, &k) in r {
            coproduct[c].insert((a, b), k);
        }
    }
    FockTable {
        instance: match table.instance.strip_prefix("dual(").and_then(|s| s.strip_suffix(')')) {
            Some(inner) => inner.to_string(),
            None => format!("dual({})", table.instance),
        },
        delta: table.mu,
        mu: table.delta,
        n_max: table.n_max,
        classes: table.classes.clone(),
        product,
        coproduct,
    }
}

type Vec128 = BTreeMap<usize, u128>;

struct Algebra<'a> {
    t: &'a FockTable,
}

impl Algebra<'_> {
    fn mul(&self, a: usize, b: usize) -> Option<Vec128> {
        let r = self.t.product.get(&(a, b))?;
        Some(r.iter().map(|(&c, &k)| (c, u128::from(k))).collect())
    }

    fn mul_vec(&self, x: &Vec128, y: &Vec128) -> Result<Vec128, &'static str> {
        let mut out = Vec128::new();
        for (&a, &ka) in x {
            for (&b, &kb) in y {
                let k = ka.checked_mul(kb).ok_or("overflow")?;
                for (c, kc) in self.mul(a, b).ok_or("missing product entry")? {
                    let e = out.entry(c).or_default();
                    *e = e.checked_add(k.checked_mul(kc).ok_or("overflow")?).ok_or("overflow")?;
                }
            }
        }
        out.retain(|_, v| *v != 0);
        Ok(out)
    }
}

fn add_to<K: Ord>(m: &mut BTreeMap<K, u128>, k: K, v: u128) -> Result<(), &'static str> {
    let e = m.entry(k).or_default();
    *e = e.checked_add(v).ok_or("overflow")?;
    Ok(())
}

/// Unit, counit, associativity, coassociativity and compatibility of a
/// table, in exact arithmetic.
pub fn verify_hopf_axioms(table: &FockTable) -> VerificationReport {
    let mut report = VerificationReport::new("hopf_axioms", table.instance.clone(), table.n_max);
    if let Err((stage, witness)) = hopf_axioms(table) {
        report.fail(stage, witness);
    }
    report.stats.insert("classes".into(), table.len() as u64);
    report
}

fn hopf_axioms(t: &FockTable) -> Result<(), (Stage, Value)> {
    let id = |i: usize| t.classes[i].id.clone();
    let overflow = |stage: Stage| move |e: &'static str| (stage, json!({ "error": e }));
    let Some(one) = t.unit_index() else {
        return Err((Stage::Unit, json!({ "reason": "degree 0 must have exactly one class" })));
    };
    let alg = Algebra { t };
    let n = t.len();
    let single = |i: usize| Vec128::from([(i, 1u128)]);

    for a in 0..n {
        for (x, y) in [(one, a), (a, one)] {
            if alg.mul(x, y) != Some(single(a)) {
                return Err((Stage::Unit, json!({ "a": id(a), "left": id(x), "right": id(y) })));
            }
        }
        let cop = &t.coproduct[a];
        for (&(x, y), &k) in cop {
            let bad = (x == one && y != a && k != 0) || (y == one && x != a && k != 0);
            if bad {
                return Err((Stage::Counit, json!({ "c": id(a), "term": [id(x), id(y)] })));
            }
        }
        if cop.get(&(one, a)) != Some(&1) || cop.get(&(a, one)) != Some(&1) {
            return Err((Stage::Counit, json!({ "c": id(a), "reason": "missing 1⊗c or c⊗1" })));
        }
    }

    // associativity
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if t.degree(a) + t.degree(b) + t.degree(c) > t.n_max {
                    continue;
                }
                let ab = alg.mul(a, b).expect("entry");
                let left = alg.mul_vec(&ab, &single(c)).map_err(overflow(Stage::Associativity))?;
                let bc = alg.mul(b, c).expect("entry");
                let right = alg.mul_vec(&single(a), &bc).map_err(overflow(Stage::Associativity))?;
                if left != right {
                    return Err((Stage::Associativity, json!({ "a": id(a), "b": id(b), "c": id(c) })));
                }
            }
        }
    }

    // coassociativity
    for c in 0..n {
        let mut left: BTreeMap<(usize, usize, usize), u128> = BTreeMap::new();
        let mut right: BTreeMap<(usize, usize, usize), u128> = BTreeMap::new();
        for (&(x, y), &k) in &t.coproduct[c] {
            for (&(x1, x2), &k1) in &t.coproduct[x] {
                add_to(&mut left, (x1, x2, y), u128::from(k) * u128::from(k1)).map_err(overflow(Stage::Coassociativity))?;
            }
            for (&(y1, y2), &k2) in &t.coproduct[y] {
                add_to(&mut right, (x, y1, y2), u128::from(k) * u128::from(k2)).map_err(overflow(Stage::Coassociativity))?;
            }
        }
        if left != right {
            return Err((Stage::Coassociativity, json!({ "c": id(c) })));
        }
    }

    // Delta(ab) = Delta(a) Delta(b)
    for (&(a, b), r) in &t.product {
        let mut left: BTreeMap<(usize, usize), u128> = BTreeMap::new();
        for (&c, &k) in r {
            for (&(x, y), &kc) in &t.coproduct[c] {
                add_to(&mut left, (x, y), u128::from(k) * u128::from(kc)).map_err(overflow(Stage::Compatibility))?;
            }
        }
        let mut right: BTreeMap<(usize, usize), u128> = BTreeMap::new();
        for (&(a1, a2), &ka) in &t.coproduct[a] {
            for (&(b1, b2), &kb) in &t.coproduct[b] {
                let k = u128::from(ka) * u128::from(kb);
                let (Some(p1), Some(p2)) = (alg.mul(a1, b1), alg.mul(a2, b2)) else {
                    return Err((Stage::Compatibility, json!({ "reason": "missing product entry" })));
                };
                for (&x, &kx) in &p1 {
                    for (&y, &ky) in &p2 {
                        let v = k.checked_mul(kx).and_then(|v| v.checked_mul(ky)).ok_or((
                            Stage::Compatibility,
                            json!({ "error": "overflow" }),
                        ))?;
                        add_to(&mut right, (x, y), v).map_err(overflow(Stage::Compatibility))?;
                    }
                }
            }
        }
        left.retain(|_, v| *v != 0);
        right.retain(|_, v| *v != 0);
        if left != right {
            let diff = left
                .keys()
                .chain(right.keys())
                .find(|k| left.get(k) != right.get(k))
                .copied()
                .expect("maps differ");
            return Err((
                Stage::Compatibility,
                json!({ "a": id(a), "b": id(b), "term": [id(diff.0), id(diff.1)],
                        "delta_of_product": left.get(&diff).copied().unwrap_or(0) as u64,
                        "product_of_deltas": right.get(&diff).copied().unwrap_or(0) as u64 }),
            ));
        }
    }
    Ok(())
}

fn same_shape(a: &FockTable, b: &FockTable) -> bool {
    a.n_max == b.n_max && a.dimensions() == b.dimensions()
}

/// Search for a bijection of classes (preserving degree) carrying every
/// structure constant of `a` to the same constant of `b`.
pub fn check_isomorphism_by_constants(a: &FockTable, b: &FockTable) -> Option<Vec<usize>> {
    if !same_shape(a, b) {
        return None;
    }
    let order: Vec<usize> = (0..=a.n_max).flat_map(|n| a.in_degree(n)).collect();
    let mut map: Vec<Option<usize>> = vec![None; a.len()];
    let mut used = vec![false; b.len()];
    let mut assigned: Vec<usize> = Vec::new();
    if search_bijection(a, b, &order, 0, &mut map, &mut used, &mut assigned) {
        let f: Vec<usize> = map.into_iter().map(|m| m.expect("complete")).collect();
        return constants_agree(a, b, &f).then_some(f);
    }
    None
}

fn coeff<K: Ord>(m: Option<&Coeffs<K>>, k: &K) -> u64 {
    m.and_then(|m| m.get(k)).copied().unwrap_or(0)
}

fn consistent(a: &FockTable, b: &FockTable, map: &[Option<usize>], assigned: &[usize], new: usize) -> bool {
    let f = |i: usize| map[i].expect("assigned");
    // coproduct of the new class, all of whose terms are already assigned
    let image: Option<Coeffs<(usize, usize)>> = a.coproduct[new]
        .iter()
        .map(|(&(x, y), &k)| Some(((map[x]?, map[y]?), k)))
        .collect();
    match image {
        Some(img) if img == b.coproduct[f(new)] => {}
        _ => return false,
    }
    for &x in assigned {
        for &y in assigned {
            for &z in assigned {
                if x != new && y != new && z != new {
                    continue;
                }
                if a.degree(x) + a.degree(y) != a.degree(z) {
                    continue;
                }
                if coeff(a.product_of(x, y), &z) != coeff(b.product_of(f(x), f(y)), &f(z)) {
                    return false;
                }
            }
        }
    }
    true
}

fn search_bijection(
    a: &FockTable,
    b: &FockTable,
    order: &[usize],
    pos: usize,
    map: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    assigned: &mut Vec<usize>,
) -> bool {
    let Some(&x) = order.get(pos) else { return true };
    for y in b.in_degree(a.degree(x)) {
        if used[y] {
            continue;
        }
        map[x] = Some(y);
        used[y] = true;
        assigned.push(x);
        if consistent(a, b, map, assigned, x) && search_bijection(a, b, order, pos + 1, map, used, assigned) {
            return true;
        }
        assigned.pop();
        used[y] = false;
        map[x] = None;
    }
    false
}

fn constants_agree(a: &FockTable, b: &FockTable, f: &[usize]) -> bool {
    let n = a.len();
    (0..n).all(|c| {
        let img: Coeffs<(usize, usize)> = a.coproduct[c].iter().map(|(&(x, y), &k)| ((f[x], f[y]), k)).collect();
        img == b.coproduct[f[c]]
    }) && a.product.iter().all(|(&(x, y), r)| {
        let img: Coeffs<usize> = r.iter().map(|(&c, &k)| (f[c], k)).collect();
        b.product_of(f[x], f[y]) == Some(&img)
    })
}

/// A degree-preserving linear map between class bases, as one square block
/// per degree (`blocks[n][i][j]`: coefficient of the `j`-th class of `b` in
/// the image of the `i`-th class of `a`, classes in table order).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChangeOfBasis {
    pub blocks: Vec<Vec<Vec<i64>>>,
}

impl ChangeOfBasis {
    /// Image of a class of `a` as (class of `b`, coefficient) pairs.
    pub fn image(&self, a: &FockTable, b: &FockTable, class: usize) -> Vec<(usize, i64)> {
        let n = a.degree(class);
        let i = a.in_degree(n).iter().position(|&c| c == class).expect("class in degree");
        let targets = b.in_degree(n);
        self.blocks[n][i].iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (targets[j], v)).collect()
    }
}

/// Search for a Hopf isomorphism `a -> b` whose block in each degree has
/// unit diagonal (classes matched by position) and integer entries. Solved
/// one degree at a time as an exact linear system; free unknowns range over
/// `{0, 1}`.
pub fn check_isomorphism_by_change_of_basis(a: &FockTable, b: &FockTable) -> Option<ChangeOfBasis> {
    if !same_shape(a, b) {
        return None;
    }
    let mut blocks = vec![vec![vec![1i64]]];
    if a.unit_index().is_none() || b.unit_index().is_none() {
        return None;
    }
    solve_degrees(a, b, 1, &mut blocks).then_some(ChangeOfBasis { blocks })
}

const MAX_FREE: usize = 16;
const MAX_BRANCHES: usize = 64;

fn solve_degrees(a: &FockTable, b: &FockTable, n: usize, blocks: &mut Vec<Vec<Vec<i64>>>) -> bool {
    if n > a.n_max {
        let phi = ChangeOfBasis { blocks: blocks.clone() };
        return substitution_holds(a, b, &phi);
    }
    for candidate in degree_candidates(a, b, n, blocks) {
        blocks.push(candidate);
        if solve_degrees(a, b, n + 1, blocks) {
            return true;
        }
        blocks.pop();
    }
    false
}

/// `phi` restricted to degrees below `n`, as sparse images.
fn image_of(a: &FockTable, b: &FockTable, blocks: &[Vec<Vec<i64>>], class: usize) -> Vec<(usize, BigInt)> {
    let n = a.degree(class);
    let i = a.in_degree(n).iter().position(|&c| c == class).expect("class in degree");
    let targets = b.in_degree(n);
    blocks[n][i].iter().enumerate().filter(|(_, &v)| v != 0).map(|(j, &v)| (targets[j], BigInt::from(v))).collect()
}

fn degree_candidates(a: &FockTable, b: &FockTable, n: usize, blocks: &[Vec<Vec<i64>>]) -> Vec<Vec<Vec<i64>>> {
    let src = a.in_degree(n);
    let dst = b.in_degree(n);
    let d = src.len();
    let var = |i: usize, j: usize| i * d + j;
    let nvars = d * d;
    let mut rows: Vec<(Vec<BigRational>, BigRational)> = Vec::new();

    for i in 0..d {
        let mut r = vec![BigRational::zero(); nvars];
        r[var(i, i)] = BigRational::one();
        rows.push((r, BigRational::one()));
    }

    // phi(x) phi(y) = phi(x y)
    for (&(x, y), prod) in &a.product {
        let (p, q) = (a.degree(x), a.degree(y));
        if p == 0 || q == 0 || p + q != n {
            continue;
        }
        let mut rhs: HashMap<usize, BigInt> = HashMap::new();
        for (x2, kx) in image_of(a, b, blocks, x) {
            for (y2, ky) in image_of(a, b, blocks, y) {
                for (&z, &k) in b.product_of(x2, y2).into_iter().flatten() {
                    *rhs.entry(z).or_insert_with(BigInt::zero) += &kx * &ky * BigInt::from(k);
                }
            }
        }
        for j in 0..d {
            let mut r = vec![BigRational::zero(); nvars];
            for (&c, &k) in prod {
                let i = src.iter().position(|&s| s == c).expect("same degree");
                r[var(i, j)] += BigRational::from_integer(BigInt::from(k));
            }
            let v = rhs.get(&dst[j]).cloned().unwrap_or_else(BigInt::zero);
            rows.push((r, BigRational::from_integer(v)));
        }
    }

    // (phi ⊗ phi) Delta(c) = Delta(phi(c)), reduced part
    let lower_pairs: Vec<(usize, usize)> = (0..b.len())
        .flat_map(|x| (0..b.len()).map(move |y| (x, y)))
        .filter(|&(x, y)| b.degree(x) >= 1 && b.degree(y) >= 1 && b.degree(x) + b.degree(y) == n)
        .collect();
    for (i, &c) in src.iter().enumerate() {
        let mut rhs: HashMap<(usize, usize), BigInt> = HashMap::new();
        for (&(x, y), &k) in &a.coproduct[c] {
            if a.degree(x) == 0 || a.degree(y) == 0 {
                continue;
            }
            for (x2, kx) in image_of(a, b, blocks, x) {
                for (y2, ky) in image_of(a, b, blocks, y) {
                    *rhs.entry((x2, y2)).or_insert_with(BigInt::zero) += &kx * &ky * BigInt::from(k);
                }
            }
        }
        for &(x2, y2) in &lower_pairs {
            let mut r = vec![BigRational::zero(); nvars];
            for (j, &t) in dst.iter().enumerate() {
                let k = coeff(Some(&b.coproduct[t]), &(x2, y2));
                if k != 0 {
                    r[var(i, j)] += BigRational::from_integer(BigInt::from(k));
                }
            }
            let v = rhs.get(&(x2, y2)).cloned().unwrap_or_else(BigInt::zero);
            rows.push((r, BigRational::from_integer(v)));
        }
    }

    let Some((pivots, reduced)) = rref(rows, nvars) else { return vec![] };
    let free: Vec<usize> = (0..nvars).filter(|v| !pivots.contains(v)).collect();
    if free.len() > MAX_FREE {
        return vec![];
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << free.len()) {
        let mut values = vec![BigRational::zero(); nvars];
        for (k, &f) in free.iter().enumerate() {
            if mask >> k & 1 == 1 {
                values[f] = BigRational::one();
            }
        }
        for (row, &p) in reduced.iter().zip(&pivots) {
            let mut v = row.1.clone();
            for &f in &free {
                v -= &row.0[f] * &values[f];
            }
            values[p] = v;
        }
        if !values.iter().all(|v| v.is_integer()) {
            continue;
        }
        let block: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| values[var(i, j)].to_integer().to_i64().unwrap_or(i64::MAX)).collect())
            .collect();
        if block.iter().flatten().any(|v| v.abs() > 1 << 20) || !invertible(&block) {
            continue;
        }
        out.push(block);
        if out.len() >= MAX_BRANCHES {
            break;
        }
    }
    out
}

/// Reduced row echelon form; `None` when inconsistent.
fn rref(mut rows: Vec<(Vec<BigRational>, BigRational)>, nvars: usize) -> Option<(Vec<usize>, Vec<(Vec<BigRational>, BigRational)>)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..nvars {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i].0[col].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r].0[col].recip();
        for v in rows[r].0.iter_mut() {
            *v *= &inv;
        }
        rows[r].1 *= &inv;
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row.0[col].is_zero() {
                let factor = row.0[col].clone();
                for (v, pv) in row.0.iter_mut().zip(&pivot_row.0) {
                    *v -= &factor * pv;
                }
                row.1 -= &factor * &pivot_row.1;
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row.1.is_zero()) {
        return None;
    }
    rows.truncate(r);
    Some((pivots, rows))
}

fn invertible(block: &[Vec<i64>]) -> bool {
    let d = block.len();
    let mut m: Vec<Vec<BigRational>> =
        block.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect()).collect();
    for col in 0..d {
        let Some(p) = (col..d).find(|&i| !m[i][col].is_zero()) else { return false };
        m.swap(col, p);
        for i in col + 1..d {
            if !m[i][col].is_zero() {
                let factor = &m[i][col] / &m[col][col];
                for j in col..d {
                    let v = &factor * &m[col][j];
                    m[i][j] -= v;
                }
            }
        }
    }
    true
}

/// `phi` maps every structure constant of `a` to the corresponding one of `b`.
pub fn substitution_holds(a: &FockTable, b: &FockTable, phi: &ChangeOfBasis) -> bool {
    let img = |c: usize| -> BTreeMap<usize, BigInt> {
        phi.image(a, b, c).into_iter().map(|(t, v)| (t, BigInt::from(v))).collect()
    };
    let add = |m: &mut BTreeMap<usize, BigInt>, k: usize, v: BigInt| {
        *m.entry(k).or_insert_with(BigInt::zero) += v;
    };
    for (&(x, y), r) in &a.product {
        let mut left = BTreeMap::new();
        for (&c, &k) in r {
            for (t, v) in img(c) {
                add(&mut left, t, v * BigInt::from(k));
            }
        }
        let mut right = BTreeMap::new();
        for (x2, kx) in img(x) {
            for (y2, ky) in img(y) {
                for (&t, &k) in b.product_of(x2, y2).into_iter().flatten() {
                    add(&mut right, t, &kx * &ky * BigInt::from(k));
                }
            }
        }
        left.retain(|_, v: &mut BigInt| !v.is_zero());
        right.retain(|_, v: &mut BigInt| !v.is_zero());
        if left != right {
            return false;
        }
    }
    for c in 0..a.len() {
        let mut left: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (&(x, y), &k) in &a.coproduct[c] {
            for (x2, kx) in img(x) {
                for (y2, ky) in img(y) {
                    *left.entry((x2, y2)).or_insert_with(BigInt::zero) += &kx * &ky * BigInt::from(k);
                }
            }
        }
        let mut right: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (t, v) in img(c) {
            for (&(x2, y2), &k) in &b.coproduct[t] {
                *right.entry((x2, y2)).or_insert_with(BigInt::zero) += &v * BigInt::from(k);
            }
        }
        left.retain(|_, v| !v.is_zero());
        right.retain(|_, v| !v.is_zero());
        if left != right {
            return false;
        }
    }
    true
}
