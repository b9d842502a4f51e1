//! Exhaustive checks up to a size bound: species over preorders,
//! intertwining of the two projections, and the bimonoid axioms for
//! `(Delta^i, mu_j)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::species::{delta_unchecked, mu, Corners, CutResult, Element, Instance, SpeciesError, Which};
use crate::subset::{self, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    ProjectionMonotonicity,
    CutEquality,
    ExtensionUniqueness,
    CutValidity,
    PullbackCommute,
    Coassociativity,
    Associativity,
    Unit,
    Counit,
    Compatibility,
    Irreducibility,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("stage serializes");
        write!(f, "{}", s.as_str().unwrap_or("?"))
    }
}

/// Outcome of one check, with the first failure found.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub instance: String,
    pub nmax: usize,
    pub passed: bool,
    pub stage: Option<Stage>,
    pub witness: Option<Value>,
    pub stats: BTreeMap<String, u64>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, instance: impl Into<String>, nmax: usize) -> Self {
        VerificationReport {
            check: check.into(),
            instance: instance.into(),
            nmax,
            passed: true,
            stage: None,
            witness: None,
            stats: BTreeMap::new(),
        }
    }

    pub fn fail(&mut self, stage: Stage, witness: Value) {
        self.passed = false;
        self.stage = Some(stage);
        self.witness = Some(witness);
    }
}

fn labels(s: Subset) -> Vec<usize> {
    subset::elements(s).collect()
}

struct Failure {
    stage: Stage,
    witness: Value,
}

fn first_failure<T: Send>(
    items: Vec<T>,
    f: impl Fn(T) -> Result<Option<Failure>, SpeciesError> + Sync + Send,
) -> Result<Option<Failure>, SpeciesError> {
    let results: Vec<Result<Option<Failure>, SpeciesError>> = items.into_par_iter().map(f).collect();
    for r in results {
        if let Some(fail) = r? {
            return Ok(Some(fail));
        }
    }
    Ok(None)
}

/// `pi_i(s|_Y) ⪯ pi_i(s)|_Y` for all `Y`, with equality on both sides of
/// every cut of `pi_i(s)`.
pub fn check_species_over_preorders(inst: &Instance, nmax: usize) -> Result<VerificationReport, SpeciesError> {
    let mut report = VerificationReport::new("species_over_preorders", inst.name(), nmax);
    let mut strict = 0u64;
    for n in 0..=nmax {
        let elems = inst.elements_std(n)?;
        let found = elems.par_iter().find_map_first(|s| {
            for which in [Which::First, Which::Second] {
                let p = inst.pi(which, s);
                for y in subset::subsets(s.ground()) {
                    let restricted = inst.pi(which, &s.restrict(y));
                    let expected = p.restrict(y);
                    if !restricted.precedes(&expected).unwrap_or(false) {
                        return Some(Failure {
                            stage: Stage::ProjectionMonotonicity,
                            witness: json!({ "s": s, "which": which, "Y": labels(y),
                                             "pi_of_restriction": restricted, "restriction_of_pi": expected }),
                        });
                    }
                }
                for cut in p.cuts() {
                    for side in [cut.down, cut.up] {
                        let restricted = inst.pi(which, &s.restrict(side));
                        if restricted != p.restrict(side) {
                            return Some(Failure {
                                stage: Stage::CutEquality,
                                witness: json!({ "s": s, "which": which, "cut": [labels(cut.down), labels(cut.up)],
                                                 "side": labels(side), "pi_of_restriction": restricted,
                                                 "restriction_of_pi": p.restrict(side) }),
                            });
                        }
                    }
                }
            }
            None
        });
        if let Some(f) = found {
            report.fail(f.stage, f.witness);
            break;
        }
        strict += elems
            .par_iter()
            .map(|s| {
                [Which::First, Which::Second]
                    .iter()
                    .flat_map(|&w| subset::subsets(s.ground()).into_iter().map(move |y| (w, y)))
                    .filter(|&(w, y)| inst.pi(w, &s.restrict(y)) != inst.pi(w, s).restrict(y))
                    .count() as u64
            })
            .sum::<u64>();
    }
    report.stats.insert("strict_restrictions".into(), strict);
    Ok(report)
}

/// All `(A, B, C, D)` decomposing `{0, .., n-1}`, in a fixed order.
pub fn decompositions4(n: usize) -> Vec<[Subset; 4]> {
    (0..4usize.pow(n as u32))
        .map(|mut code| {
            let mut parts = [0 as Subset; 4];
            for x in 0..n {
                parts[code % 4] |= subset::singleton(x);
                code /= 4;
            }
            parts
        })
        .collect()
}

pub fn decompositions3(n: usize) -> Vec<[Subset; 3]> {
    (0..3usize.pow(n as u32))
        .map(|mut code| {
            let mut parts = [0 as Subset; 3];
            for x in 0..n {
                parts[code % 3] |= subset::singleton(x);
                code /= 3;
            }
            parts
        })
        .collect()
}

fn dec_json(d: &[Subset; 4]) -> Value {
    json!({ "A": labels(d[0]), "B": labels(d[1]), "C": labels(d[2]), "D": labels(d[3]) })
}

#[derive(Default, Clone, Copy)]
struct IntertwineStats {
    pairs: u64,
    max_corner_compatible: u64,
    multi_compatible: u64,
    generator_checked: u64,
}

type Key4 = [Element; 4];

/// One decomposition of the intertwining check. Every pair `(y, z)` in the
/// fibre product of the small cut sets needs exactly one `s` with both big
/// cuts restricting to it.
fn intertwined_at(
    inst: &Instance,
    n: usize,
    dec: [Subset; 4],
) -> Result<(Option<Failure>, IntertwineStats), SpeciesError> {
    let [a, b, c, d] = dec;
    let mut stats = IntertwineStats::default();
    let side = |ground: Subset, first: Subset, which: Which| -> Result<Vec<(Element, Element, Element)>, SpeciesError> {
        Ok(inst
            .elements(ground)?
            .into_iter()
            .filter(|u| inst.pi(which, u).is_cut(first))
            .map(|u| (u, u.restrict(first), u.restrict(ground & !first)))
            .collect())
    };
    let ys_ab = side(a | b, a, Which::Second)?;
    let ys_cd = side(c | d, c, Which::Second)?;
    let zs_ac = side(a | c, a, Which::First)?;
    let zs_bd = side(b | d, b, Which::First)?;

    let mut groups: HashMap<Key4, (Vec<(Element, Element)>, Vec<(Element, Element)>)> = HashMap::new();
    for (u, ua, ub) in &ys_ab {
        for (v, vc, vd) in &ys_cd {
            groups.entry([*ua, *ub, *vc, *vd]).or_default().0.push((*u, *v));
        }
    }
    for (p, pa, pc) in &zs_ac {
        for (q, qb, qd) in &zs_bd {
            if let Some(g) = groups.get_mut(&[*pa, *qb, *pc, *qd]) {
                g.1.push((*p, *q));
            }
        }
    }

    // s with every corner given, and those with both big cuts
    let mut compatible: HashMap<Key4, (u64, Element)> = HashMap::new();
    let mut good: HashMap<Key4, Vec<Element>> = HashMap::new();
    for s in inst.elements_std(n)?.iter() {
        let key = [s.restrict(a | b), s.restrict(c | d), s.restrict(a | c), s.restrict(b | d)];
        let e = compatible.entry(key).or_insert((0, *s));
        e.0 += 1;
        if !(inst.pi(Which::First, s).is_cut(a | b) && inst.pi(Which::Second, s).is_cut(a | c)) {
            continue;
        }
        let [sab, scd, sac, sbd] = key;
        let small_y = inst.pi(Which::Second, &sab).is_cut(a) && inst.pi(Which::Second, &scd).is_cut(c);
        let small_z = inst.pi(Which::First, &sac).is_cut(a) && inst.pi(Which::First, &sbd).is_cut(b);
        if !(small_y && small_z) {
            return Ok((
                Some(Failure {
                    stage: Stage::CutValidity,
                    witness: json!({ "decomposition": dec_json(&dec), "s": s,
                                     "reason": "both big cuts hold but a small cut fails",
                                     "small_cuts_delta2": small_y, "small_cuts_delta1": small_z }),
                }),
                stats,
            ));
        }
        let via_y = [sab.restrict(a), sab.restrict(b), scd.restrict(c), scd.restrict(d)];
        let via_z = [sac.restrict(a), sbd.restrict(b), sac.restrict(c), sbd.restrict(d)];
        if via_y != via_z {
            return Ok((
                Some(Failure {
                    stage: Stage::PullbackCommute,
                    witness: json!({ "decomposition": dec_json(&dec), "s": s }),
                }),
                stats,
            ));
        }
        good.entry(key).or_default().push(*s);
    }

    let mut keys: Vec<&Key4> = groups.keys().collect();
    keys.sort();
    for w in keys {
        let (ys, zs) = &groups[w];
        for &(u, v) in ys {
            for &(p, q) in zs {
                stats.pairs += 1;
                let key = [u, v, p, q];
                let (count, candidate) = compatible.get(&key).copied().map_or((0, None), |(c, s)| (c, Some(s)));
                stats.max_corner_compatible = stats.max_corner_compatible.max(count);
                if count > 1 {
                    stats.multi_compatible += 1;
                }
                let found = good.get(&key).map_or(&[][..], |v| v.as_slice());
                let corners = json!({ "ab": u, "cd": v, "ac": p, "bd": q });
                if found.len() != 1 {
                    let witness = json!({ "decomposition": dec_json(&dec), "corners": corners,
                                          "extensions": found, "corner_compatible": count, "candidate": candidate });
                    let stage = if found.is_empty() && count > 0 { Stage::CutValidity } else { Stage::ExtensionUniqueness };
                    return Ok((Some(Failure { stage, witness }), stats));
                }
                let ext = Corners { a, b, c, d, ab: u, cd: v, ac: p, bd: q };
                if let Some(mut built) = inst.species().extend(&ext) {
                    stats.generator_checked += 1;
                    built.retain(|s| {
                        inst.pi(Which::First, s).is_cut(a | b)
                            && inst.pi(Which::Second, s).is_cut(a | c)
                            && [s.restrict(a | b), s.restrict(c | d), s.restrict(a | c), s.restrict(b | d)] == key
                    });
                    built.sort();
                    built.dedup();
                    if built.as_slice() != found {
                        return Ok((
                            Some(Failure {
                                stage: Stage::ExtensionUniqueness,
                                witness: json!({ "decomposition": dec_json(&dec), "corners": corners,
                                                 "reason": "extension generator disagrees",
                                                 "generated": built, "extensions": found }),
                            }),
                            stats,
                        ));
                    }
                }
            }
        }
    }
    Ok((None, stats))
}

/// The intertwining condition: for every decomposition `(A, B, C, D)` the
/// square of cut coproducts is a pullback with the small cuts valid.
pub fn check_intertwined(inst: &Instance, nmax: usize) -> Result<VerificationReport, SpeciesError> {
    let mut report = VerificationReport::new("intertwined", inst.name(), nmax);
    let mut total = IntertwineStats::default();
    let mut decompositions = 0u64;
    for n in 0..=nmax {
        inst.elements_std(n)?;
        let decs = decompositions4(n);
        decompositions += decs.len() as u64;
        let results: Vec<Result<(Option<Failure>, IntertwineStats), SpeciesError>> =
            decs.into_par_iter().map(|dec| intertwined_at(inst, n, dec)).collect();
        let mut failure = None;
        for r in results {
            let (fail, st) = r?;
            total.pairs += st.pairs;
            total.max_corner_compatible = total.max_corner_compatible.max(st.max_corner_compatible);
            total.multi_compatible += st.multi_compatible;
            total.generator_checked += st.generator_checked;
            if failure.is_none() {
                failure = fail;
            }
        }
        if let Some(f) = failure {
            report.fail(f.stage, f.witness);
            break;
        }
    }
    report.stats = BTreeMap::from([
        ("decompositions".into(), decompositions),
        ("pairs".into(), total.pairs),
        ("max_corner_compatible".into(), total.max_corner_compatible),
        ("multi_compatible_pairs".into(), total.multi_compatible),
        ("generator_checked".into(), total.generator_checked),
    ]);
    Ok(report)
}

fn delta_pair(inst: &Instance, which: Which, s: &Element, a: Subset) -> Option<(Element, Element)> {
    match delta_unchecked(inst, which, s, a, s.ground() & !a) {
        CutResult::Pair(u, v) => Some((u, v)),
        CutResult::Zero => None,
    }
}

fn first_difference<K: Ord + Clone + std::hash::Hash + Eq>(
    left: &HashMap<K, u64>,
    right: &HashMap<K, u64>,
) -> Option<(K, u64, u64)> {
    let mut diffs: Vec<K> = left
        .iter()
        .filter(|(k, v)| right.get(*k) != Some(*v))
        .map(|(k, _)| k.clone())
        .chain(right.keys().filter(|k| !left.contains_key(*k)).cloned())
        .collect();
    diffs.sort();
    diffs.into_iter().next().map(|k| {
        let (l, r) = (left.get(&k).copied().unwrap_or(0), right.get(&k).copied().unwrap_or(0));
        (k, l, r)
    })
}

/// The bimonoid axioms for `(Delta^delta, mu_mu)`.
pub fn check_bimonoid_with(
    inst: &Instance,
    delta_which: Which,
    mu_which: Which,
    nmax: usize,
) -> Result<VerificationReport, SpeciesError> {
    let check = format!("bimonoid(delta={}, mu={})", delta_which, mu_which);
    let mut report = VerificationReport::new(check, inst.name(), nmax);
    let (di, mj) = (delta_which, mu_which);

    let units = inst.elements_std(0)?;
    if units.len() != 1 {
        report.fail(Stage::Unit, json!({ "reason": "the empty ground must carry exactly one element", "count": units.len() }));
        return Ok(report);
    }
    let unit = units[0];
    let mut checked = 0u64;

    for n in 0..=nmax {
        let elems = inst.elements_std(n)?;
        let full = subset::full(n);

        // unit and counit
        let found = first_failure(elems.iter().copied().collect(), |s| {
            for (a, expect) in [(full, (s, unit)), (0, (unit, s))] {
                if delta_pair(inst, di, &s, a) != Some(expect) {
                    return Ok(Some(Failure { stage: Stage::Counit, witness: json!({ "s": s, "A": labels(a) }) }));
                }
            }
            let shifted_unit = unit;
            if mu(inst, mj, &s, &shifted_unit)? != vec![s] || mu(inst, mj, &shifted_unit, &s)? != vec![s] {
                return Ok(Some(Failure { stage: Stage::Unit, witness: json!({ "s": s }) }));
            }
            Ok(None)
        })?;
        if let Some(f) = found {
            report.fail(f.stage, f.witness);
            return Ok(report);
        }

        // coassociativity of Delta^i
        let found = first_failure(decompositions3(n), |[a, b, c]| {
            for s in elems.iter() {
                let left = inst.pi(di, s).is_cut(a | b) && inst.pi(di, &s.restrict(a | b)).is_cut(a);
                let right = inst.pi(di, s).is_cut(a) && inst.pi(di, &s.restrict(b | c)).is_cut(b);
                if left != right {
                    return Ok(Some(Failure {
                        stage: Stage::Coassociativity,
                        witness: json!({ "s": s, "A": labels(a), "B": labels(b), "C": labels(c),
                                         "left_nonzero": left, "right_nonzero": right }),
                    }));
                }
            }
            Ok(None)
        })?;
        if let Some(f) = found {
            report.fail(f.stage, f.witness);
            return Ok(report);
        }

        // associativity of mu_j, for all (u, v, w) at once
        let found = first_failure(decompositions3(n), |[a, b, c]| {
            let mut left: HashMap<[Element; 4], u64> = HashMap::new();
            let mut right: HashMap<[Element; 4], u64> = HashMap::new();
            for s in elems.iter() {
                let key = [s.restrict(a), s.restrict(b), s.restrict(c), *s];
                if inst.pi(mj, s).is_cut(a | b) && inst.pi(mj, &s.restrict(a | b)).is_cut(a) {
                    *left.entry(key).or_default() += 1;
                }
                if inst.pi(mj, s).is_cut(a) && inst.pi(mj, &s.restrict(b | c)).is_cut(b) {
                    *right.entry(key).or_default() += 1;
                }
            }
            Ok(first_difference(&left, &right).map(|(k, l, r)| Failure {
                stage: Stage::Associativity,
                witness: json!({ "u": k[0], "v": k[1], "w": k[2], "s": k[3], "left": l, "right": r }),
            }))
        })?;
        if let Some(f) = found {
            report.fail(f.stage, f.witness);
            return Ok(report);
        }

        // compatibility, as multisets indexed by (p, q, u, v)
        let decs = decompositions4(n);
        checked += decs.len() as u64;
        let found = first_failure(decs, |dec| {
            let [a, b, c, d] = dec;
            let mut left: HashMap<[Element; 4], u64> = HashMap::new();
            for s in elems.iter() {
                if let (Some((p, q)), Some((u, v))) = (delta_pair(inst, mj, s, a | c), delta_pair(inst, di, s, a | b)) {
                    *left.entry([p, q, u, v]).or_default() += 1;
                }
            }
            let index = |ground: Subset, first: Subset| -> Result<HashMap<(Element, Element), Vec<Element>>, SpeciesError> {
                let mut m: HashMap<(Element, Element), Vec<Element>> = HashMap::new();
                for u in inst.elements(ground)? {
                    if let Some(k) = delta_pair(inst, mj, &u, first) {
                        m.entry(k).or_default().push(u);
                    }
                }
                Ok(m)
            };
            let by_ab = index(a | b, a)?;
            let by_cd = index(c | d, c)?;
            let qs: Vec<(Element, Element, Element)> = inst
                .elements(b | d)?
                .into_iter()
                .filter_map(|q| delta_pair(inst, di, &q, b).map(|(qb, qd)| (q, qb, qd)))
                .collect();
            let mut right: HashMap<[Element; 4], u64> = HashMap::new();
            for p in inst.elements(a | c)? {
                let Some((pa, pc)) = delta_pair(inst, di, &p, a) else { continue };
                for &(q, qb, qd) in &qs {
                    let (Some(us), Some(vs)) = (by_ab.get(&(pa, qb)), by_cd.get(&(pc, qd))) else { continue };
                    for u in us {
                        for v in vs {
                            *right.entry([p, q, *u, *v]).or_default() += 1;
                        }
                    }
                }
            }
            Ok(first_difference(&left, &right).map(|(k, l, r)| Failure {
                stage: Stage::Compatibility,
                witness: json!({ "decomposition": dec_json(&dec), "p": k[0], "q": k[1], "u": k[2], "v": k[3],
                                 "left": l, "right": r }),
            }))
        })?;
        if let Some(f) = found {
            report.fail(f.stage, f.witness);
            return Ok(report);
        }
    }
    report.stats.insert("decompositions".into(), checked);
    Ok(report)
}

/// `(Delta^i, mu_j)` with `j` the other index.
pub fn check_bimonoid(inst: &Instance, delta_which: Which, nmax: usize) -> Result<VerificationReport, SpeciesError> {
    check_bimonoid_with(inst, delta_which, delta_which.other(), nmax)
}
