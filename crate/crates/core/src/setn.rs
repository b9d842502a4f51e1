//! Finite sets with multimaps: natural-number matrices, composition, duals,
//! classification and the two square checks (dual commutation and partial
//! pullback).
//!
//! A multimap `f : X -> Y` sends each `x` to a multiset on `Y`; it is stored
//! as a dense `|X| x |Y|` matrix of naturals indexed by label position.
//! Composition `g ∘ f` is the matrix product `f · g`.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetnError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("duplicate label `{0}` in finite set")]
    DuplicateLabel(String),
    #[error("map `{0}` is not a promap")]
    NotPromap(&'static str),
    #[error("map `{0}` is not a partial map")]
    NotPartialMap(&'static str),
}

/// An ordered list of distinct labels. Order only fixes matrix indexing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct FiniteSet {
    labels: Vec<String>,
}

impl FiniteSet {
    pub fn new<I, S>(labels: I) -> Result<Self, SetnError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(SetnError::DuplicateLabel(l.clone()));
            }
        }
        Ok(FiniteSet { labels })
    }

    /// `{0, 1, ..., n-1}` as string labels.
    pub fn range(n: usize) -> Self {
        FiniteSet { labels: (0..n).map(|i| i.to_string()).collect() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl<'de> Deserialize<'de> for FiniteSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(d)?;
        FiniteSet::new(labels).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MultimapJson")]
pub struct Multimap {
    source: FiniteSet,
    target: FiniteSet,
    #[serde(with = "natural_matrix")]
    coeff: Vec<Vec<BigUint>>,
}

#[derive(Deserialize)]
struct MultimapJson {
    source: FiniteSet,
    target: FiniteSet,
    #[serde(with = "natural_matrix")]
    coeff: Vec<Vec<BigUint>>,
}

/// Naturals as JSON numbers, or decimal strings beyond `u64`.
mod natural_matrix {
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Natural {
        Small(u64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(m: &[Vec<BigUint>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Natural>> = m
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| c.to_u64().map_or_else(|| Natural::Big(c.to_string()), Natural::Small))
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigUint>>, D::Error> {
        let rows = Vec::<Vec<Natural>>::deserialize(d)?;
        rows.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|c| match c {
                        Natural::Small(v) => Ok(BigUint::from(v)),
                        Natural::Big(t) => t.parse::<BigUint>().map_err(serde::de::Error::custom),
                    })
                    .collect()
            })
            .collect()
    }
}

impl TryFrom<MultimapJson> for Multimap {
    type Error = SetnError;
    fn try_from(j: MultimapJson) -> Result<Self, SetnError> {
        Multimap::new(j.source, j.target, j.coeff)
    }
}

impl fmt::Debug for Multimap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Multimap{:?}->{:?} [", self.source.labels, self.target.labels)?;
        for (i, row) in self.coeff.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let row: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            write!(f, "[{}]", row.join(","))?;
        }
        write!(f, "]")
    }
}

impl Multimap {
    pub fn new(
        source: FiniteSet,
        target: FiniteSet,
        coeff: Vec<Vec<BigUint>>,
    ) -> Result<Self, SetnError> {
        if coeff.len() != source.len() {
            return Err(SetnError::DimensionMismatch(format!(
                "{} rows for a source of size {}",
                coeff.len(),
                source.len()
            )));
        }
        if let Some(row) = coeff.iter().find(|r| r.len() != target.len()) {
            return Err(SetnError::DimensionMismatch(format!(
                "row of length {} for a target of size {}",
                row.len(),
                target.len()
            )));
        }
        Ok(Multimap { source, target, coeff })
    }

    /// Convenience constructor from small entries.
    pub fn from_rows(
        source: FiniteSet,
        target: FiniteSet,
        rows: &[Vec<u64>],
    ) -> Result<Self, SetnError> {
        let coeff = rows
            .iter()
            .map(|r| r.iter().map(|&c| BigUint::from(c)).collect())
            .collect();
        Multimap::new(source, target, coeff)
    }

    pub fn identity(set: &FiniteSet) -> Self {
        let n = set.len();
        let coeff = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigUint::one() } else { BigUint::zero() }).collect())
            .collect();
        Multimap { source: set.clone(), target: set.clone(), coeff }
    }

    pub fn zero(source: &FiniteSet, target: &FiniteSet) -> Self {
        let coeff = vec![vec![BigUint::zero(); target.len()]; source.len()];
        Multimap { source: source.clone(), target: target.clone(), coeff }
    }

    pub fn source(&self) -> &FiniteSet {
        &self.source
    }

    pub fn target(&self) -> &FiniteSet {
        &self.target
    }

    pub fn coeff(&self) -> &[Vec<BigUint>] {
        &self.coeff
    }

    pub fn entry(&self, x: usize, y: usize) -> &BigUint {
        &self.coeff[x][y]
    }

    fn row_sum(&self, x: usize) -> BigUint {
        self.coeff[x].iter().sum()
    }

    /// Support of row `x`, i.e. the image of `x` read as a subset of the target.
    fn row_support(&self, x: usize) -> Vec<usize> {
        (0..self.target.len()).filter(|&y| !self.coeff[x][y].is_zero()).collect()
    }

    /// For a partial map: the image of `x`, or `None` when `x` maps to zero.
    fn partial_image(&self, x: usize) -> Option<usize> {
        self.coeff[x].iter().position(|c| !c.is_zero())
    }
}

/// `g ∘ f`: first `f`, then `g`.
pub fn compose(f: &Multimap, g: &Multimap) -> Result<Multimap, SetnError> {
    if f.target != g.source {
        return Err(SetnError::DimensionMismatch(format!(
            "cannot compose: target {:?} differs from source {:?}",
            f.target.labels, g.source.labels
        )));
    }
    let (n, m, k) = (f.source.len(), f.target.len(), g.target.len());
    let mut coeff = vec![vec![BigUint::zero(); k]; n];
    for (x, out) in coeff.iter_mut().enumerate() {
        for y in 0..m {
            let a = &f.coeff[x][y];
            if a.is_zero() {
                continue;
            }
            for (z, slot) in out.iter_mut().enumerate() {
                let b = &g.coeff[y][z];
                if !b.is_zero() {
                    *slot += a * b;
                }
            }
        }
    }
    Ok(Multimap { source: f.source.clone(), target: g.target.clone(), coeff })
}

/// Transpose; source and target swap.
pub fn dual(f: &Multimap) -> Multimap {
    let (n, m) = (f.source.len(), f.target.len());
    let coeff = (0..m).map(|y| (0..n).map(|x| f.coeff[x][y].clone()).collect()).collect();
    Multimap { source: f.target.clone(), target: f.source.clone(), coeff }
}

/// The full predicate set of a multimap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MapClass {
    pub ordinary: bool,
    pub promap: bool,
    pub partial_map: bool,
}

impl MapClass {
    pub fn is_general_only(&self) -> bool {
        !self.ordinary && !self.promap && !self.partial_map
    }
}

pub fn classify(f: &Multimap) -> MapClass {
    let one = BigUint::one();
    let promap = f.coeff.iter().flatten().all(|c| c.is_zero() || *c == one);
    let sums: Vec<BigUint> = (0..f.source.len()).map(|x| f.row_sum(x)).collect();
    MapClass {
        ordinary: sums.iter().all(|s| *s == one),
        promap,
        partial_map: sums.iter().all(|s| s.is_zero() || *s == one),
    }
}

/// True iff the matrix is a permutation matrix.
pub fn is_isomorphism(f: &Multimap) -> bool {
    if f.source.len() != f.target.len() {
        return false;
    }
    let class = classify(f);
    if !class.ordinary {
        return false;
    }
    let mut hit = vec![false; f.target.len()];
    for x in 0..f.source.len() {
        // ordinary: exactly one entry equal to 1 in each row
        let y = f.partial_image(x).expect("ordinary rows are nonzero");
        if hit[y] {
            return false;
        }
        hit[y] = true;
    }
    true
}

/// A square `alpha: X -> Y`, `beta: X -> Z`, `gamma: Y -> W`, `delta: Z -> W`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SquareJson")]
pub struct Square {
    pub alpha: Multimap,
    pub beta: Multimap,
    pub gamma: Multimap,
    pub delta: Multimap,
}

#[derive(Deserialize)]
struct SquareJson {
    alpha: Multimap,
    beta: Multimap,
    gamma: Multimap,
    delta: Multimap,
}

impl TryFrom<SquareJson> for Square {
    type Error = SetnError;
    fn try_from(j: SquareJson) -> Result<Self, SetnError> {
        Square::new(j.alpha, j.beta, j.gamma, j.delta)
    }
}

impl Square {
    pub fn new(
        alpha: Multimap,
        beta: Multimap,
        gamma: Multimap,
        delta: Multimap,
    ) -> Result<Self, SetnError> {
        let checks = [
            (alpha.source == beta.source, "alpha.source != beta.source"),
            (alpha.target == gamma.source, "alpha.target != gamma.source"),
            (beta.target == delta.source, "beta.target != delta.source"),
            (gamma.target == delta.target, "gamma.target != delta.target"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(SetnError::DimensionMismatch(msg.to_string()));
            }
        }
        Ok(Square { alpha, beta, gamma, delta })
    }
}

/// Counterexample reported by the square checks. Indices are label positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SquareWitness {
    /// `|delta(z) ∩ gamma(y)| != |Dbeta(z) ∩ Dalpha(y)|`.
    IntersectionMismatch { z: usize, y: usize, via_w: usize, via_x: usize },
    /// `x` is defined for alpha and beta but alpha(x) or beta(x) is outside Y' or Z'.
    NotFactoring { x: usize },
    /// `gamma(alpha(x)) != delta(beta(x))` on the defined locus.
    NotCommuting { x: usize },
    /// `(y, z)` with `gamma(y) = delta(z)` defined has `count` preimages (should be one).
    PullbackCount { y: usize, z: usize, count: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareCheck {
    pub holds: bool,
    pub witness: Option<SquareWitness>,
}

impl SquareCheck {
    fn pass() -> Self {
        SquareCheck { holds: true, witness: None }
    }
    fn fail(w: SquareWitness) -> Self {
        SquareCheck { holds: false, witness: Some(w) }
    }
}

/// For promaps: the left-dualized square commutes iff, for all `z, y`, the
/// intersections `delta(z) ∩ gamma(y)` and `Dbeta(z) ∩ Dalpha(y)` have equal size.
pub fn check_dual_commutation(sq: &Square) -> Result<SquareCheck, SetnError> {
    for (m, name) in [
        (&sq.alpha, "alpha"),
        (&sq.beta, "beta"),
        (&sq.gamma, "gamma"),
        (&sq.delta, "delta"),
    ] {
        if !classify(m).promap {
            return Err(SetnError::NotPromap(name));
        }
    }
    let nx = sq.alpha.source.len();
    for z in 0..sq.delta.source.len() {
        let dz = sq.delta.row_support(z);
        for y in 0..sq.gamma.source.len() {
            let via_w = sq.gamma.row_support(y).iter().filter(|w| dz.contains(w)).count();
            let via_x = (0..nx)
                .filter(|&x| !sq.alpha.coeff[x][y].is_zero() && !sq.beta.coeff[x][z].is_zero())
                .count();
            if via_w != via_x {
                return Ok(SquareCheck::fail(SquareWitness::IntersectionMismatch {
                    z,
                    y,
                    via_w,
                    via_x,
                }));
            }
        }
    }
    Ok(SquareCheck::pass())
}

/// Partial pullback test, literally: restricted to where both alpha and beta
/// are defined, the square lands in the defined loci of gamma and delta and
/// is a pullback of sets there.
pub fn check_partial_pullback(sq: &Square) -> Result<SquareCheck, SetnError> {
    for (m, name) in [
        (&sq.alpha, "alpha"),
        (&sq.beta, "beta"),
        (&sq.gamma, "gamma"),
        (&sq.delta, "delta"),
    ] {
        if !classify(m).partial_map {
            return Err(SetnError::NotPartialMap(name));
        }
    }
    let alpha: Vec<Option<usize>> =
        (0..sq.alpha.source.len()).map(|x| sq.alpha.partial_image(x)).collect();
    let beta: Vec<Option<usize>> =
        (0..sq.beta.source.len()).map(|x| sq.beta.partial_image(x)).collect();
    let gamma: Vec<Option<usize>> =
        (0..sq.gamma.source.len()).map(|y| sq.gamma.partial_image(y)).collect();
    let delta: Vec<Option<usize>> =
        (0..sq.delta.source.len()).map(|z| sq.delta.partial_image(z)).collect();

    let mut preimages = std::collections::HashMap::<(usize, usize), usize>::new();
    for x in 0..alpha.len() {
        let (Some(y), Some(z)) = (alpha[x], beta[x]) else { continue };
        let (Some(gy), Some(dz)) = (gamma[y], delta[z]) else {
            return Ok(SquareCheck::fail(SquareWitness::NotFactoring { x }));
        };
        if gy != dz {
            return Ok(SquareCheck::fail(SquareWitness::NotCommuting { x }));
        }
        *preimages.entry((y, z)).or_default() += 1;
    }
    for (y, gy) in gamma.iter().enumerate() {
        let Some(gy) = gy else { continue };
        for (z, dz) in delta.iter().enumerate() {
            if *dz != Some(*gy) {
                continue;
            }
            let count = preimages.get(&(y, z)).copied().unwrap_or(0);
            if count != 1 {
                return Ok(SquareCheck::fail(SquareWitness::PullbackCount { y, z, count }));
            }
        }
    }
    Ok(SquareCheck::pass())
}
