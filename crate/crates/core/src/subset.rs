//! Subsets of the label universe `{0, .., 15}` as bitmasks.

pub type Subset = u16;

pub const MAX_LABELS: usize = 16;

/// `{0, .., n-1}`.
pub fn full(n: usize) -> Subset {
    assert!(n <= MAX_LABELS, "at most {MAX_LABELS} labels");
    if n == MAX_LABELS {
        Subset::MAX
    } else {
        (1 << n) - 1
    }
}

pub fn singleton(x: usize) -> Subset {
    1 << x
}

pub fn contains(s: Subset, x: usize) -> bool {
    x < MAX_LABELS && s & (1 << x) != 0
}

pub fn size(s: Subset) -> usize {
    s.count_ones() as usize
}

pub fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

/// Elements in increasing order.
pub fn elements(s: Subset) -> Elements {
    Elements(s)
}

#[derive(Clone, Copy, Debug)]
pub struct Elements(Subset);

impl Iterator for Elements {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let x = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(x)
    }
    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = size(self.0);
        (n, Some(n))
    }
}

impl ExactSizeIterator for Elements {}

/// All subsets of `s` by increasing bitmask.
pub fn subsets(s: Subset) -> Vec<Subset> {
    let mut out = Vec::with_capacity(1 << size(s));
    let mut t: Subset = 0;
    loop {
        out.push(t);
        if t == s {
            break;
        }
        t = t.wrapping_sub(s) & s;
    }
    out.sort_unstable();
    out
}

pub fn from_iter<I: IntoIterator<Item = usize>>(it: I) -> Subset {
    it.into_iter().fold(0, |acc, x| acc | singleton(x))
}

/// Position of `x` among the elements of `s`.
pub fn rank(s: Subset, x: usize) -> usize {
    size(s & ((1u32 << x) - 1) as Subset)
}

/// Image of `s` under a label map.
pub fn map(s: Subset, f: &[u8; MAX_LABELS]) -> Subset {
    elements(s).fold(0, |acc, x| acc | singleton(usize::from(f[x])))
}
