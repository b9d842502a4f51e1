//! Pairs of preorders of types cc, nc and nn, their generation from frames
//! with bubble refinements, the matrix encoding of pairs of total preorders,
//! and the packed-word subspecies.

use serde::Serialize;
use thiserror::Error;

use crate::preorder::{enumerate_preorders, Preorder, PreorderError};
use crate::species::{permutations_of, Corners, Element, Species, Which};
use crate::subset::{self, Subset, MAX_LABELS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairError {
    #[error("frame violation: {0}")]
    FrameViolation(String),
    #[error("not a refinement: {0}")]
    NotARefinement(String),
    #[error(transparent)]
    Preorder(#[from] PreorderError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairKind {
    Cc,
    Nc,
    Nn,
}

impl PairKind {
    pub fn parse(s: &str) -> Option<PairKind> {
        match s {
            "cc" => Some(PairKind::Cc),
            "nc" => Some(PairKind::Nc),
            "nn" => Some(PairKind::Nn),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PairKind::Cc => "cc",
            PairKind::Nc => "nc",
            PairKind::Nn => "nn",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PreorderPair {
    pub first: Preorder,
    pub second: Preorder,
}

impl PreorderPair {
    pub fn new(first: Preorder, second: Preorder) -> Result<Self, PreorderError> {
        if first.ground() != second.ground() {
            return Err(PreorderError::GroundMismatch);
        }
        Ok(PreorderPair { first, second })
    }

    pub fn restrict(&self, y: Subset) -> PreorderPair {
        PreorderPair { first: self.first.restrict(y), second: self.second.restrict(y) }
    }

    pub fn relabel(&self, map: &[u8; MAX_LABELS]) -> PreorderPair {
        PreorderPair { first: self.first.relabel(map), second: self.second.relabel(map) }
    }

    pub fn swap(&self) -> PreorderPair {
        PreorderPair { first: self.second, second: self.first }
    }
}

fn all_pairs(ground: Subset) -> impl Iterator<Item = (usize, usize)> {
    subset::elements(ground).flat_map(move |x| subset::elements(ground).map(move |y| (x, y)))
}

/// The defining conditions of each type.
pub fn membership(kind: PairKind, p: &Preorder, q: &Preorder) -> bool {
    all_pairs(p.ground()).all(|(x, y)| match kind {
        PairKind::Cc => {
            (p.comparable(x, y) || q.equiv(x, y)) && (q.comparable(x, y) || p.equiv(x, y))
        }
        PairKind::Nc => (q.comparable(x, y) || p.equiv(x, y)) && (!p.lt(y, x) || q.equiv(x, y)),
        PairKind::Nn => (!p.lt(y, x) || q.equiv(x, y)) && (!q.lt(y, x) || p.equiv(x, y)),
    })
}

/// A pair of type cn is turned into one of type nc by swapping; the flag
/// records whether a swap happened.
pub fn normalize_cn(pair: &PreorderPair) -> Option<(PreorderPair, bool)> {
    if membership(PairKind::Nc, &pair.first, &pair.second) {
        Some((*pair, false))
    } else if membership(PairKind::Nc, &pair.second, &pair.first) {
        Some((pair.swap(), true))
    } else {
        None
    }
}

fn bubble_set_ok(
    frame: &Preorder,
    refinements: &[Preorder],
    which: &str,
) -> Result<Vec<Subset>, PairError> {
    let bubbles = frame.bubbles();
    let mut chosen = Vec::new();
    for r in refinements {
        if !bubbles.contains(&r.ground()) {
            return Err(PairError::NotARefinement(format!(
                "{which}: {:#b} is not a bubble of the frame",
                r.ground()
            )));
        }
        if chosen.contains(&r.ground()) {
            return Err(PairError::FrameViolation(format!("{which}: bubble {:#b} refined twice", r.ground())));
        }
        chosen.push(r.ground());
    }
    Ok(chosen)
}

/// Replace the listed bubbles of `frame` by the given preorders.
fn refine_along(frame: &Preorder, refinements: &[Preorder]) -> Result<Preorder, PairError> {
    let mut rows = *frame.rows();
    for r in refinements {
        let b = r.ground();
        for x in subset::elements(b) {
            rows[x] = (rows[x] & !b) | r.up_set(x);
        }
    }
    let p = Preorder::from_up_rows(frame.ground(), rows)?;
    debug_assert!(p.is_refinement(frame).unwrap());
    Ok(p)
}

/// Build a pair from two frames and bubble refinements.
///
/// The frames are total preorders `(T1, T2)` for cc, a partition order and a
/// total preorder `(O1, T2)` for nc, and two partition orders `(O1, O2)` for
/// nn. Each refinement is a preorder whose ground is a bubble of its frame.
pub fn generate_pair(
    kind: PairKind,
    frame1: &Preorder,
    frame2: &Preorder,
    refinements1: &[Preorder],
    refinements2: &[Preorder],
) -> Result<PreorderPair, PairError> {
    if frame1.ground() != frame2.ground() {
        return Err(PairError::FrameViolation("frames on different grounds".into()));
    }
    let (total1, total2) = match kind {
        PairKind::Cc => (true, true),
        PairKind::Nc => (false, true),
        PairKind::Nn => (false, false),
    };
    for (f, total, which) in [(frame1, total1, "first"), (frame2, total2, "second")] {
        let ok = if total { f.is_total_preorder() } else { f.is_partition_order() };
        if !ok {
            let want = if total { "total preorder" } else { "partition order" };
            return Err(PairError::FrameViolation(format!("{which} frame is not a {want}")));
        }
    }
    let b1 = bubble_set_ok(frame1, refinements1, "first")?;
    let b2 = bubble_set_ok(frame2, refinements2, "second")?;
    if let Some(b) = b1.iter().find(|b| b2.contains(b)) {
        return Err(PairError::FrameViolation(format!("bubble {b:#b} is refined on both sides")));
    }
    let o1 = frame1.bubbles();
    let o2 = frame2.bubbles();
    for (mine, theirs, which) in [(&b1, &o2, "first"), (&b2, &o1, "second")] {
        for &b in mine.iter() {
            if !theirs.iter().any(|&c| subset::is_subset(b, c)) {
                return Err(PairError::FrameViolation(format!(
                    "{which}: refined bubble {b:#b} is not inside a bubble of the other frame"
                )));
            }
        }
    }
    Ok(PreorderPair { first: refine_along(frame1, refinements1)?, second: refine_along(frame2, refinements2)? })
}

/// Frames and refinements that regenerate a pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frames {
    pub frame1: Preorder,
    pub frame2: Preorder,
    pub refinements1: Vec<Preorder>,
    pub refinements2: Vec<Preorder>,
}

fn refined_bubbles(order: &Preorder, frame: &Preorder) -> Vec<Preorder> {
    frame
        .bubbles()
        .into_iter()
        .map(|b| order.restrict(b))
        .filter(|r| !r.is_coarse())
        .collect()
}

/// Frames read off a pair: minimal total refinements for the total slots and
/// component partitions for the partition slots.
pub fn reconstruct_frames(kind: PairKind, pair: &PreorderPair) -> Frames {
    let total = |p: &Preorder| p.minimal_total_refinement();
    let part = |p: &Preorder| p.component_partition();
    let (frame1, frame2) = match kind {
        PairKind::Cc => (total(&pair.first), total(&pair.second)),
        PairKind::Nc => (part(&pair.first), total(&pair.second)),
        PairKind::Nn => (part(&pair.first), part(&pair.second)),
    };
    Frames {
        refinements1: refined_bubbles(&pair.first, &frame1),
        refinements2: refined_bubbles(&pair.second, &frame2),
        frame1,
        frame2,
    }
}

/// `a_ij = |b_i ∩ c_j|` for the bubble sequences of two total preorders.
pub fn cc_matrix(t1: &Preorder, t2: &Preorder) -> Result<Vec<Vec<usize>>, PreorderError> {
    if t1.ground() != t2.ground() {
        return Err(PreorderError::GroundMismatch);
    }
    let rows = t1.total_blocks()?;
    let cols = t2.total_blocks()?;
    Ok(rows.iter().map(|&b| cols.iter().map(|&c| subset::size(b & c)).collect()).collect())
}

/// How the first block of a corner pair compares to the second.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rel {
    Below,
    Above,
    Apart,
}

/// Comparison rules for `(a, d)` and `(b, c)` in each component.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ExtensionRule {
    pub first_ad: Rel,
    pub first_bc: Rel,
    pub second_ad: Rel,
    pub second_bc: Rel,
}

impl ExtensionRule {
    pub fn for_kind(kind: PairKind) -> Self {
        match kind {
            PairKind::Cc => ExtensionRule { first_ad: Rel::Below, first_bc: Rel::Below, second_ad: Rel::Below, second_bc: Rel::Above },
            PairKind::Nc => ExtensionRule { first_ad: Rel::Apart, first_bc: Rel::Apart, second_ad: Rel::Below, second_bc: Rel::Above },
            PairKind::Nn => ExtensionRule { first_ad: Rel::Apart, first_bc: Rel::Apart, second_ad: Rel::Apart, second_bc: Rel::Apart },
        }
    }
}

fn assemble(
    corners: &Corners,
    part: impl Fn(&PreorderPair) -> Preorder,
    ad: Rel,
    bc: Rel,
) -> Option<Preorder> {
    let pairs = [corners.ab, corners.cd, corners.ac, corners.bd].map(|e| match e {
        Element::Pair(p) => Some(p),
        _ => None,
    });
    let [ab, cd, ac, bd] = pairs;
    let (ab, cd, ac, bd) = (part(&ab?), part(&cd?), part(&ac?), part(&bd?));
    let ground = corners.a | corners.b | corners.c | corners.d;
    let mut rows = [0 as Subset; MAX_LABELS];
    let rel = |r: Rel, lo_first: bool| match (r, lo_first) {
        (Rel::Below, true) | (Rel::Above, false) => true,
        _ => false,
    };
    for (x, y) in all_pairs(ground) {
        let both = |s: Subset| subset::contains(s, x) && subset::contains(s, y);
        let le = if both(ab.ground()) {
            ab.le(x, y)
        } else if both(cd.ground()) {
            cd.le(x, y)
        } else if both(ac.ground()) {
            ac.le(x, y)
        } else if both(bd.ground()) {
            bd.le(x, y)
        } else if subset::contains(corners.a, x) && subset::contains(corners.d, y) {
            rel(ad, true)
        } else if subset::contains(corners.d, x) && subset::contains(corners.a, y) {
            rel(ad, false)
        } else if subset::contains(corners.b, x) && subset::contains(corners.c, y) {
            rel(bc, true)
        } else {
            rel(bc, false)
        };
        if le {
            rows[x] |= subset::singleton(y);
        }
    }
    Preorder::from_up_rows(ground, rows).ok()
}

/// The extension of a corner quadruple prescribed by `rule`, if it is a pair
/// of preorders.
pub(crate) fn extend_pairs(corners: &Corners, rule: ExtensionRule) -> Vec<Element> {
    let first = assemble(corners, |p| p.first, rule.first_ad, rule.first_bc);
    let second = assemble(corners, |p| p.second, rule.second_ad, rule.second_bc);
    match (first, second) {
        (Some(first), Some(second)) => vec![Element::Pair(PreorderPair { first, second })],
        _ => vec![],
    }
}

/// Pairs of preorders of one type, projected to their components.
pub struct Pairs {
    pub kind: PairKind,
}

impl Species for Pairs {
    fn name(&self) -> String {
        self.kind.name().into()
    }
    fn cap(&self) -> usize {
        4
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        let all = enumerate_preorders(n, self.cap()).expect("within cap");
        let mut out = Vec::new();
        for p in &all {
            for q in &all {
                if membership(self.kind, p, q) {
                    out.push(Element::Pair(PreorderPair { first: *p, second: *q }));
                }
            }
        }
        out
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        let Element::Pair(p) = s else { unreachable!("pair species holds pairs") };
        match which {
            Which::First => p.first,
            Which::Second => p.second,
        }
    }
    fn extend(&self, corners: &Corners) -> Option<Vec<Element>> {
        Some(extend_pairs(corners, ExtensionRule::for_kind(self.kind)))
    }
}

/// Total orders paired with total preorders: packed words.
pub struct PackedWords;

impl Species for PackedWords {
    fn name(&self) -> String {
        "packed_words".into()
    }
    fn cap(&self) -> usize {
        5
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        let all = enumerate_preorders(n, self.cap()).expect("within cap");
        let totals: Vec<&Preorder> = all.iter().filter(|p| p.is_total_preorder()).collect();
        let mut out = Vec::new();
        for seq in permutations_of(&(0..n).collect::<Vec<_>>()) {
            let t1 = Preorder::chain(&seq);
            for t2 in &totals {
                out.push(Element::Pair(PreorderPair { first: t1, second: **t2 }));
            }
        }
        out
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        Pairs { kind: PairKind::Cc }.pi(which, s)
    }
    fn extend(&self, corners: &Corners) -> Option<Vec<Element>> {
        Some(extend_pairs(corners, ExtensionRule::for_kind(PairKind::Cc)))
    }
}

/// The packed word of a (total order, total preorder) pair: the block index
/// (1-based) of each element of the total order, read in that order.
pub fn packed_word(pair: &PreorderPair) -> Result<Vec<usize>, PreorderError> {
    let seq = pair.first.total_sequence()?;
    let blocks = pair.second.total_blocks()?;
    Ok(seq
        .iter()
        .map(|&x| blocks.iter().position(|&b| subset::contains(b, x)).expect("blocks cover the ground") + 1)
        .collect())
}
