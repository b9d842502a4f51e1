//! Parking filtrations: exhaustive nested chains normalized so that
//! `|X_t| >= t`, together with pairs of them as a species.

use serde::Serialize;
use thiserror::Error;

use crate::preorder::Preorder;
use crate::species::{Corners, Element, Species, Which};
use crate::subset::{self, Subset, MAX_LABELS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParkingError {
    #[error("the chain must start at the empty set")]
    NonEmptyStart,
    #[error("step {0} is not contained in the next one")]
    NotNested(usize),
    #[error("the chain ends at {end:#b}, not at the ground {ground:#b}")]
    NotExhaustive { end: Subset, ground: Subset },
    #[error("{0} is not a break point")]
    NotBreakPoint(usize),
    #[error("levels do not form a parking function")]
    NotParking,
}

/// A parking filtration, stored by levels: `x` enters the chain at step
/// `level[x]`, and `X_t = {x : level[x] <= t}` has at least `t` elements.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub struct ParkingFiltration {
    ground: Subset,
    level: [u8; MAX_LABELS],
}

fn check_chain(ground: Subset, chain: &[Subset]) -> Result<(), ParkingError> {
    if chain.first().copied().unwrap_or(0) != 0 {
        return Err(ParkingError::NonEmptyStart);
    }
    for (i, w) in chain.windows(2).enumerate() {
        if !subset::is_subset(w[0], w[1]) {
            return Err(ParkingError::NotNested(i));
        }
    }
    let end = chain.last().copied().unwrap_or(0);
    if end != ground {
        return Err(ParkingError::NotExhaustive { end, ground });
    }
    Ok(())
}

fn step(chain: &[Subset], p: usize) -> Subset {
    chain.get(p).or(chain.last()).copied().unwrap_or(0)
}

/// `p(0) = 0` and `p(t)` the least `p > p(t-1)` with `|X_p| >= t`, for
/// `t = 0, .., |X|`. Steps beyond the end of the chain equal the ground.
pub fn dilation(ground: Subset, chain: &[Subset]) -> Result<Vec<usize>, ParkingError> {
    check_chain(ground, chain)?;
    let n = subset::size(ground);
    let mut out = vec![0];
    for t in 1..=n {
        let mut p = out[t - 1] + 1;
        while subset::size(step(chain, p)) < t {
            p += 1;
        }
        out.push(p);
    }
    Ok(out)
}

/// The parking filtration `t -> X_{p(t)}`.
pub fn parkize(ground: Subset, chain: &[Subset]) -> Result<ParkingFiltration, ParkingError> {
    let p = dilation(ground, chain)?;
    let mut level = [0u8; MAX_LABELS];
    for x in subset::elements(ground) {
        level[x] = (1..p.len()).find(|&t| subset::contains(step(chain, p[t]), x)).expect("exhaustive") as u8;
    }
    Ok(ParkingFiltration { ground, level })
}

/// The `b` with `|X_{p(b)}| = b`.
pub fn break_points(ground: Subset, chain: &[Subset]) -> Result<Vec<usize>, ParkingError> {
    let p = dilation(ground, chain)?;
    Ok((0..p.len()).filter(|&b| subset::size(step(chain, p[b])) == b).collect())
}

/// The total preorder whose blocks are the differences of the chain between
/// consecutive break points.
pub fn filtration_preorder(ground: Subset, chain: &[Subset]) -> Result<Preorder, ParkingError> {
    Ok(parkize(ground, chain)?.preorder())
}

impl ParkingFiltration {
    /// From levels given for the elements of `ground` in increasing order.
    pub fn from_levels(ground: Subset, levels: &[u8]) -> Result<Self, ParkingError> {
        if levels.len() != subset::size(ground) {
            return Err(ParkingError::NotParking);
        }
        let mut level = [0u8; MAX_LABELS];
        for (x, &l) in subset::elements(ground).zip(levels) {
            level[x] = l;
        }
        let f = ParkingFiltration { ground, level };
        let n = levels.len();
        let ok = levels.iter().all(|&l| l >= 1 && usize::from(l) <= n)
            && (1..=n).all(|t| subset::size(f.step(t)) >= t);
        if ok {
            Ok(f)
        } else {
            Err(ParkingError::NotParking)
        }
    }

    pub fn ground(&self) -> Subset {
        self.ground
    }

    pub fn size(&self) -> usize {
        subset::size(self.ground)
    }

    /// The step at which `x` enters.
    pub fn level(&self, x: usize) -> u8 {
        self.level[x]
    }

    /// `X_t`.
    pub fn step(&self, t: usize) -> Subset {
        subset::elements(self.ground).filter(|&x| usize::from(self.level[x]) <= t).fold(0, |a, x| a | (1 << x))
    }

    /// `X_0, .., X_n`.
    pub fn chain(&self) -> Vec<Subset> {
        (0..=self.size()).map(|t| self.step(t)).collect()
    }

    pub fn break_points(&self) -> Vec<usize> {
        (0..=self.size()).filter(|&b| subset::size(self.step(b)) == b).collect()
    }

    /// True when every step adds exactly one element.
    pub fn is_total(&self) -> bool {
        self.break_points().len() == self.size() + 1
    }

    pub fn preorder(&self) -> Preorder {
        let bps = self.break_points();
        let blocks: Vec<Subset> = bps.windows(2).map(|w| self.step(w[1]) & !self.step(w[0])).collect();
        if blocks.is_empty() {
            Preorder::discrete(0)
        } else {
            Preorder::from_blocks(&blocks)
        }
    }

    /// Parkization of `t -> U ∩ X_t`.
    pub fn restrict(&self, u: Subset) -> ParkingFiltration {
        let chain: Vec<Subset> = self.chain().iter().map(|&x| x & u).collect();
        parkize(u, &chain).expect("restricted chains are exhaustive")
    }

    /// `X_0, .., X_b` for a break point `b`.
    pub fn slice_below(&self, b: usize) -> Result<ParkingFiltration, ParkingError> {
        if !self.break_points().contains(&b) {
            return Err(ParkingError::NotBreakPoint(b));
        }
        let chain: Vec<Subset> = (0..=b).map(|t| self.step(t)).collect();
        parkize(self.step(b), &chain)
    }

    /// `t -> X_{b+t} \ X_b` for a break point `b`.
    pub fn slice_above(&self, b: usize) -> Result<ParkingFiltration, ParkingError> {
        if !self.break_points().contains(&b) {
            return Err(ParkingError::NotBreakPoint(b));
        }
        let base = self.step(b);
        let chain: Vec<Subset> = (b..=self.size()).map(|t| self.step(t) & !base).collect();
        parkize(self.ground & !base, &chain)
    }

    pub fn relabel(&self, map: &[u8; MAX_LABELS]) -> ParkingFiltration {
        let mut level = [0u8; MAX_LABELS];
        for x in subset::elements(self.ground) {
            level[usize::from(map[x])] = self.level[x];
        }
        ParkingFiltration { ground: subset::map(self.ground, map), level }
    }

    /// Levels in label order, e.g. `113`.
    pub fn describe(&self) -> String {
        subset::elements(self.ground).map(|x| self.level[x].to_string()).collect()
    }
}

/// All parking filtrations on `{0, .., n-1}`.
pub fn enumerate_parking(n: usize) -> Vec<ParkingFiltration> {
    let ground = subset::full(n);
    let mut out = Vec::new();
    let total = n.pow(n as u32);
    for mut code in 0..total.max(1) {
        let mut levels = vec![0u8; n];
        for l in levels.iter_mut() {
            *l = (code % n) as u8 + 1;
            code /= n;
        }
        if let Ok(f) = ParkingFiltration::from_levels(ground, &levels) {
            out.push(f);
        }
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ParkingPair {
    pub first: ParkingFiltration,
    pub second: ParkingFiltration,
}

impl ParkingPair {
    pub fn restrict(&self, y: Subset) -> ParkingPair {
        ParkingPair { first: self.first.restrict(y), second: self.second.restrict(y) }
    }

    pub fn relabel(&self, map: &[u8; MAX_LABELS]) -> ParkingPair {
        ParkingPair { first: self.first.relabel(map), second: self.second.relabel(map) }
    }
}

/// `x -> level` from one filtration followed by another shifted past it.
fn stack(lower: &ParkingFiltration, upper: &ParkingFiltration) -> ParkingFiltration {
    let shift = lower.size() as u8;
    let mut level = lower.level;
    for x in subset::elements(upper.ground) {
        level[x] = upper.level[x] + shift;
    }
    ParkingFiltration { ground: lower.ground | upper.ground, level }
}

/// Pairs of parking filtrations projected to their filtration preorders.
pub struct Parking;

impl Species for Parking {
    fn name(&self) -> String {
        "parking".into()
    }
    fn cap(&self) -> usize {
        4
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        let all = enumerate_parking(n);
        all.iter()
            .flat_map(|f| all.iter().map(move |g| Element::Parking(ParkingPair { first: *f, second: *g })))
            .collect()
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        let Element::Parking(p) = s else { unreachable!("parking species holds parking pairs") };
        match which {
            Which::First => p.first.preorder(),
            Which::Second => p.second.preorder(),
        }
    }
    fn extend(&self, c: &Corners) -> Option<Vec<Element>> {
        let pick = |e: &Element| match e {
            Element::Parking(p) => Some(*p),
            _ => None,
        };
        let (ab, cd, ac, bd) = (pick(&c.ab)?, pick(&c.cd)?, pick(&c.ac)?, pick(&c.bd)?);
        Some(vec![Element::Parking(ParkingPair {
            first: stack(&ab.first, &cd.first),
            second: stack(&ac.second, &bd.second),
        })])
    }
}
