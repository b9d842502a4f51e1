//! Colored sets, colored words, simple graphs and posets/preorders, plus two
//! deliberately broken variants of colored sets used as negative controls.

use crate::preorder::{enumerate_preorders, Preorder};
use crate::species::{shuffles, Corners, Element, Species, Which};
use crate::subset::{self, Subset, MAX_LABELS};

/// A function from the ground to the palette `{0, .., f-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    pub ground: Subset,
    pub colors: [u8; MAX_LABELS],
}

impl Coloring {
    pub fn new(ground: Subset, colors: [u8; MAX_LABELS]) -> Self {
        let mut c = Coloring { ground, colors };
        for x in 0..MAX_LABELS {
            if !subset::contains(ground, x) {
                c.colors[x] = 0;
            }
        }
        c
    }

    pub fn restrict(&self, y: Subset) -> Coloring {
        Coloring::new(y, self.colors)
    }

    pub fn relabel(&self, map: &[u8; MAX_LABELS]) -> Coloring {
        let mut colors = [0; MAX_LABELS];
        for x in subset::elements(self.ground) {
            colors[usize::from(map[x])] = self.colors[x];
        }
        Coloring { ground: subset::map(self.ground, map), colors }
    }

    /// Disjoint union.
    pub fn union(&self, other: &Coloring) -> Coloring {
        let mut colors = self.colors;
        for x in subset::elements(other.ground) {
            colors[x] = other.colors[x];
        }
        Coloring { ground: self.ground | other.ground, colors }
    }

    pub fn word(&self) -> String {
        subset::elements(self.ground).map(|x| self.colors[x].to_string()).collect()
    }
}

fn all_colorings(n: usize, palette: usize) -> Vec<Coloring> {
    let mut out = Vec::new();
    let total = palette.pow(n as u32);
    for mut code in 0..total {
        let mut colors = [0u8; MAX_LABELS];
        for c in colors.iter_mut().take(n) {
            *c = (code % palette) as u8;
            code /= palette;
        }
        out.push(Coloring { ground: subset::full(n), colors });
    }
    out
}

/// A coloring together with a total order: a word over the palette.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub coloring: Coloring,
    pub order: Preorder,
}

impl Word {
    pub fn restrict(&self, y: Subset) -> Word {
        Word { coloring: self.coloring.restrict(y), order: self.order.restrict(y) }
    }

    pub fn relabel(&self, map: &[u8; MAX_LABELS]) -> Word {
        Word { coloring: self.coloring.relabel(map), order: self.order.relabel(map) }
    }

    /// Colors read along the order.
    pub fn word(&self) -> String {
        let seq = self.order.total_sequence().expect("word order is total");
        seq.iter().map(|&x| self.coloring.colors[x].to_string()).collect()
    }
}

/// A simple graph stored as adjacency bitmasks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Graph {
    pub ground: Subset,
    pub adj: [Subset; MAX_LABELS],
}

impl Graph {
    pub fn new(ground: Subset, edges: &[(usize, usize)]) -> Self {
        let mut adj = [0; MAX_LABELS];
        for &(x, y) in edges {
            assert!(x != y && subset::contains(ground, x) && subset::contains(ground, y));
            adj[x] |= subset::singleton(y);
            adj[y] |= subset::singleton(x);
        }
        Graph { ground, adj }
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        subset::elements(self.ground)
            .flat_map(|x| subset::elements(self.adj[x]).filter(move |&y| y > x).map(move |y| (x, y)))
            .collect()
    }

    pub fn restrict(&self, y: Subset) -> Graph {
        let mut adj = [0; MAX_LABELS];
        for x in subset::elements(y) {
            adj[x] = self.adj[x] & y;
        }
        Graph { ground: y, adj }
    }

    pub fn relabel(&self, map: &[u8; MAX_LABELS]) -> Graph {
        let mut adj = [0; MAX_LABELS];
        for x in subset::elements(self.ground) {
            adj[usize::from(map[x])] = subset::map(self.adj[x], map);
        }
        Graph { ground: subset::map(self.ground, map), adj }
    }

    /// The partition order whose bubbles are the connected components.
    pub fn components(&self) -> Preorder {
        let edges: Vec<(usize, usize)> = self.edges().into_iter().flat_map(|(x, y)| [(x, y), (y, x)]).collect();
        Preorder::closure(self.ground, &edges).expect("edges lie in the ground")
    }
}

/// Colored sets; both projections discrete.
pub struct Colored {
    pub palette: usize,
}

impl Species for Colored {
    fn name(&self) -> String {
        format!("colored(f={})", self.palette)
    }
    fn cap(&self) -> usize {
        8
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        all_colorings(n, self.palette).into_iter().map(Element::Colored).collect()
    }
    fn pi(&self, _which: Which, s: &Element) -> Preorder {
        Preorder::discrete(s.ground())
    }
    fn glue(&self, _which: Which, u: &Element, v: &Element) -> Option<Vec<Element>> {
        glue_colorings(u, v)
    }
    fn extend(&self, c: &Corners) -> Option<Vec<Element>> {
        glue_colorings(&c.ab, &c.cd)
    }
}

fn glue_colorings(u: &Element, v: &Element) -> Option<Vec<Element>> {
    match (u, v) {
        (Element::Colored(a), Element::Colored(b)) => Some(vec![Element::Colored(a.union(b))]),
        _ => None,
    }
}

/// Colored words; `pi_1` discrete, `pi_2` the word order.
pub struct Tensor {
    pub palette: usize,
}

impl Species for Tensor {
    fn name(&self) -> String {
        format!("tensor(f={})", self.palette)
    }
    fn cap(&self) -> usize {
        6
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        let orders = crate::species::permutations_of(&(0..n).collect::<Vec<_>>());
        let mut out = Vec::new();
        for c in all_colorings(n, self.palette) {
            for seq in &orders {
                out.push(Element::Tensor(Word { coloring: c, order: Preorder::chain(seq) }));
            }
        }
        out
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        match (which, s) {
            (Which::First, _) => Preorder::discrete(s.ground()),
            (Which::Second, Element::Tensor(w)) => w.order,
            _ => unreachable!("tensor species holds words"),
        }
    }
    fn glue(&self, which: Which, u: &Element, v: &Element) -> Option<Vec<Element>> {
        let (Element::Tensor(a), Element::Tensor(b)) = (u, v) else { return None };
        let coloring = a.coloring.union(&b.coloring);
        let sa = a.order.total_sequence().ok()?;
        let sb = b.order.total_sequence().ok()?;
        let seqs = match which {
            Which::First => shuffles(&sa, &sb),
            Which::Second => vec![[sa, sb].concat()],
        };
        Some(seqs.iter().map(|s| Element::Tensor(Word { coloring, order: Preorder::chain(s) })).collect())
    }
    fn extend(&self, c: &Corners) -> Option<Vec<Element>> {
        let (Element::Tensor(ab), Element::Tensor(cd), Element::Tensor(ac), Element::Tensor(bd)) = (c.ab, c.cd, c.ac, c.bd)
        else {
            return None;
        };
        let seq = [ac.order.total_sequence().ok()?, bd.order.total_sequence().ok()?].concat();
        Some(vec![Element::Tensor(Word { coloring: ab.coloring.union(&cd.coloring), order: Preorder::chain(&seq) })])
    }
}

/// Simple graphs; `pi_1` discrete, `pi_2` the connected components.
pub struct Graphs;

impl Species for Graphs {
    fn name(&self) -> String {
        "graphs".into()
    }
    fn cap(&self) -> usize {
        6
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (x + 1..n).map(move |y| (x, y))).collect();
        (0u32..1 << pairs.len())
            .map(|mask| {
                let chosen: Vec<_> =
                    pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
                Element::Graph(Graph::new(subset::full(n), &chosen))
            })
            .collect()
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        match (which, s) {
            (Which::First, _) => Preorder::discrete(s.ground()),
            (Which::Second, Element::Graph(g)) => g.components(),
            _ => unreachable!("graph species holds graphs"),
        }
    }
    fn glue(&self, which: Which, u: &Element, v: &Element) -> Option<Vec<Element>> {
        let (Element::Graph(a), Element::Graph(b)) = (u, v) else { return None };
        let mut base = *a;
        base.ground |= b.ground;
        for x in subset::elements(b.ground) {
            base.adj[x] = b.adj[x];
        }
        match which {
            Which::Second => Some(vec![Element::Graph(base)]),
            Which::First => {
                let cross: Vec<(usize, usize)> = subset::elements(a.ground)
                    .flat_map(|x| subset::elements(b.ground).map(move |y| (x, y)))
                    .collect();
                Some(
                    (0u32..1 << cross.len())
                        .map(|mask| {
                            let mut g = base;
                            for (i, &(x, y)) in cross.iter().enumerate() {
                                if mask >> i & 1 == 1 {
                                    g.adj[x] |= subset::singleton(y);
                                    g.adj[y] |= subset::singleton(x);
                                }
                            }
                            Element::Graph(g)
                        })
                        .collect(),
                )
            }
        }
    }
    fn extend(&self, c: &Corners) -> Option<Vec<Element>> {
        let mut adj = [0 as Subset; MAX_LABELS];
        for e in [c.ab, c.cd, c.ac, c.bd] {
            let Element::Graph(g) = e else { return None };
            for x in subset::elements(g.ground) {
                adj[x] |= g.adj[x];
            }
        }
        Some(vec![Element::Graph(Graph { ground: c.a | c.b | c.c | c.d, adj })])
    }
}

/// Posets (or all preorders); `pi_1 = P`, `pi_2 = P•`.
pub struct Orders {
    pub posets_only: bool,
}

impl Species for Orders {
    fn name(&self) -> String {
        if self.posets_only { "posets" } else { "preorders" }.into()
    }
    fn cap(&self) -> usize {
        5
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        enumerate_preorders(n, self.cap())
            .expect("within cap")
            .into_iter()
            .filter(|p| !self.posets_only || p.is_poset())
            .map(Element::Order)
            .collect()
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        let Element::Order(p) = s else { unreachable!("order species holds preorders") };
        match which {
            Which::First => *p,
            Which::Second => p.component_partition(),
        }
    }
    fn glue(&self, which: Which, u: &Element, v: &Element) -> Option<Vec<Element>> {
        let (Element::Order(a), Element::Order(b)) = (u, v) else { return None };
        match which {
            Which::Second => Some(vec![Element::Order(disjoint_union(a, b))]),
            Which::First => None,
        }
    }
    fn extend(&self, c: &Corners) -> Option<Vec<Element>> {
        let mut pairs = Vec::new();
        for e in [c.ab, c.cd, c.ac, c.bd] {
            let Element::Order(p) = e else { return None };
            for x in subset::elements(p.ground()) {
                pairs.extend(subset::elements(p.up_set(x)).map(|y| (x, y)));
            }
        }
        Some(
            Preorder::closure(c.a | c.b | c.c | c.d, &pairs)
                .ok()
                .filter(|p| !self.posets_only || p.is_poset())
                .map(Element::Order)
                .into_iter()
                .collect(),
        )
    }
}

pub(crate) fn disjoint_union(a: &Preorder, b: &Preorder) -> Preorder {
    let mut rows = *a.rows();
    for x in subset::elements(b.ground()) {
        rows[x] = b.up_set(x);
    }
    Preorder::from_up_rows(a.ground() | b.ground(), rows).expect("disjoint union of preorders")
}

/// Colored sets with `pi_1 = D` and `pi_2 = C`: not intertwined.
pub struct BrokenDc {
    pub palette: usize,
}

impl Species for BrokenDc {
    fn name(&self) -> String {
        format!("broken_dc(f={})", self.palette)
    }
    fn cap(&self) -> usize {
        8
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        all_colorings(n, self.palette).into_iter().map(Element::Colored).collect()
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        match which {
            Which::First => Preorder::discrete(s.ground()),
            Which::Second => Preorder::coarse(s.ground()),
        }
    }
    fn glue(&self, _which: Which, u: &Element, v: &Element) -> Option<Vec<Element>> {
        glue_colorings(u, v)
    }
}

/// Colored sets whose `pi_2` is coarse on even grounds and discrete on odd
/// ones: restriction is not monotone.
pub struct BrokenParity {
    pub palette: usize,
}

impl Species for BrokenParity {
    fn name(&self) -> String {
        format!("broken_parity(f={})", self.palette)
    }
    fn cap(&self) -> usize {
        8
    }
    fn enumerate(&self, n: usize) -> Vec<Element> {
        all_colorings(n, self.palette).into_iter().map(Element::Colored).collect()
    }
    fn pi(&self, which: Which, s: &Element) -> Preorder {
        match which {
            Which::Second if s.size() % 2 == 0 => Preorder::coarse(s.ground()),
            _ => Preorder::discrete(s.ground()),
        }
    }
    fn glue(&self, _which: Which, u: &Element, v: &Element) -> Option<Vec<Element>> {
        glue_colorings(u, v)
    }
}
