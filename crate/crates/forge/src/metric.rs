//! Finite metric spaces: discrete geodesic spaces of combinatorial trees,
//! ultrametric branch spaces of gadget graphs, isometric-embedding search,
//! and the ball structure with its extension predicate.
//!
//! Branch spaces are exact: points are maximal root paths, the distance
//! between distinct branches sharing `n + 1` vertices is `2^-n`, and the
//! fork index records the tine bundles and code pairs together with their
//! prescribed pairwise distances. Truncation leaves no accumulation points;
//! the designated spine-through slot at a word is its all-zeros extension
//! diving into the first tine, so one point may hold several slots. The
//! fork relation used by the extension predicate therefore distinguishes
//! points by slot multiplicity as well as by fork.

use crate::error::{Error, Result};
use crate::gadget::{BranchTag, GadgetGraph, StructuredWitness};
use crate::graph::Graph;
use crate::trees::Word;
use num::rational::Ratio;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type Rat = Ratio<i64>;

pub fn rat(num: i64, den: i64) -> Rat {
    Ratio::new(num, den)
}

pub fn pow2_neg(k: u32) -> Rat {
    Ratio::new(1, 1i64.checked_shl(k).expect("exponent fits"))
}

fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn rat_from_string(s: &str) -> Result<Rat> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| Error::InvalidInstance(format!("bad rational {s:?}")))?;
    let num: i64 = n
        .parse()
        .map_err(|_| Error::InvalidInstance(format!("bad numerator {n:?}")))?;
    let den: i64 = d
        .parse()
        .map_err(|_| Error::InvalidInstance(format!("bad denominator {d:?}")))?;
    if den == 0 {
        return Err(Error::InvalidInstance("zero denominator".into()));
    }
    Ok(Ratio::new(num, den))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MetricJson {
    n: usize,
    dist: Vec<(usize, usize, String)>,
}

/// A finite metric space with exact rational distances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MetricJson", into = "MetricJson")]
pub struct FiniteMetric {
    n: usize,
    dist: Vec<Rat>,
}

impl TryFrom<MetricJson> for FiniteMetric {
    type Error = Error;
    fn try_from(j: MetricJson) -> Result<Self> {
        let mut m = FiniteMetric {
            n: j.n,
            dist: vec![Rat::zero(); j.n * j.n],
        };
        for (p, q, s) in &j.dist {
            if *p >= j.n || *q >= j.n {
                return Err(Error::InvalidInstance("distance entry out of range".into()));
            }
            let r = rat_from_string(s)?;
            m.dist[p * j.n + q] = r;
            m.dist[q * j.n + p] = r;
        }
        m.validate()?;
        Ok(m)
    }
}

impl From<FiniteMetric> for MetricJson {
    fn from(m: FiniteMetric) -> MetricJson {
        let mut dist = vec![];
        for p in 0..m.n {
            for q in p + 1..m.n {
                dist.push((p, q, rat_to_string(&m.dist[p * m.n + q])));
            }
        }
        MetricJson { n: m.n, dist }
    }
}

impl FiniteMetric {
    pub fn new(n: usize, entries: &[(usize, usize, Rat)]) -> Result<Self> {
        let mut dist = vec![Rat::zero(); n * n];
        for &(p, q, r) in entries {
            if p >= n || q >= n {
                return Err(Error::InvalidInstance("distance entry out of range".into()));
            }
            dist[p * n + q] = r;
            dist[q * n + p] = r;
        }
        let m = FiniteMetric { n, dist };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for p in 0..self.n {
            if !self.d(p, p).is_zero() {
                return Err(Error::InvalidInstance("nonzero diagonal".into()));
            }
            for q in 0..self.n {
                if self.d(p, q) != self.d(q, p) {
                    return Err(Error::InvalidInstance("asymmetric distance".into()));
                }
                if p != q && !self.d(p, q).is_positive() {
                    return Err(Error::InvalidInstance("non-positive off-diagonal".into()));
                }
                for r in 0..self.n {
                    if self.d(p, r) > self.d(p, q) + self.d(q, r) {
                        return Err(Error::InvalidInstance("triangle inequality fails".into()));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn d(&self, p: usize, q: usize) -> Rat {
        self.dist[p * self.n + q]
    }

    pub fn is_ultrametric(&self) -> bool {
        (0..self.n).all(|x| {
            (0..self.n).all(|y| (0..self.n).all(|z| self.d(x, z) <= self.d(x, y).max(self.d(y, z))))
        })
    }

    pub fn distance_values(&self) -> Vec<Rat> {
        let mut set: BTreeSet<Rat> = BTreeSet::new();
        for p in 0..self.n {
            for q in 0..self.n {
                set.insert(self.d(p, q));
            }
        }
        set.into_iter().collect()
    }
}

/// Geodesic metric of a combinatorial tree.
pub fn build_discrete(g: &Graph) -> Result<FiniteMetric> {
    if !g.is_combinatorial_tree() {
        return Err(Error::Precondition(
            "geodesic space needs a connected acyclic graph".into(),
        ));
    }
    let n = g.n();
    let mut entries = vec![];
    for p in 0..n {
        let dist = g.bfs_distances(p as u32);
        for q in p + 1..n {
            entries.push((p, q, Rat::from_integer(dist[q] as i64)));
        }
    }
    FiniteMetric::new(n, &entries)
}

/// Recovers the graph from a geodesic metric by linking points at distance
/// one.
pub fn recover_graph(m: &FiniteMetric) -> Result<Graph> {
    let mut edges = vec![];
    for p in 0..m.n() {
        for q in p + 1..m.n() {
            if m.d(p, q) == Rat::one() {
                edges.push((p as u32, q as u32));
            }
        }
    }
    Graph::new(m.n(), edges)
}

// ---------------------------------------------------------------------------
// Branch spaces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForkKind {
    /// The tine bundle at a spine word.
    Bundle { s: Word },
    /// The code pair of a tree node.
    Pair { s: Word, u: Word },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fork {
    pub kind: ForkKind,
    pub members: Vec<usize>,
}

mod word_key_map {
    use super::Word;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<Word, usize>,
        ser: S,
    ) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(String, usize)> = map
            .iter()
            .map(|(w, &p)| (crate::trees::word_to_string(w), p))
            .collect();
        pairs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> Result<BTreeMap<Word, usize>, D::Error> {
        let pairs: Vec<(String, usize)> = Vec::deserialize(de)?;
        pairs
            .into_iter()
            .map(|(w, p)| {
                crate::trees::word_from_string(&w)
                    .map(|word| (word, p))
                    .map_err(D::Error::custom)
            })
            .collect()
    }
}

/// The ultrametric space of maximal root paths of a gadget graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSpace {
    pub d: u8,
    pub b: u8,
    pub metric: FiniteMetric,
    pub tags: Vec<BranchTag>,
    pub paths: Vec<Vec<u32>>,
    pub forks: Vec<Fork>,
    /// Spine word -> point holding its designated spine-through slot.
    #[serde(with = "word_key_map")]
    pub a_slots: BTreeMap<Word, usize>,
    /// Tine points in the fixed `(s, i)` ordering.
    pub b_slots: Vec<usize>,
    /// Code points in the fixed `(s, u, side)` ordering.
    pub c_slots: Vec<usize>,
}

pub fn build_branch_space(g: &GadgetGraph) -> Result<BranchSpace> {
    let branches = g.branches();
    let n = branches.len();
    if n > 128 {
        return Err(Error::budget("branch space points", n as u64, 128));
    }
    let mut entries = vec![];
    for x in 0..n {
        for y in x + 1..n {
            let shared = branches[x]
                .vertices
                .iter()
                .zip(&branches[y].vertices)
                .take_while(|(a, b)| a == b)
                .count();
            assert!(shared >= 1);
            entries.push((x, y, pow2_neg(shared as u32 - 1)));
        }
    }
    let metric = FiniteMetric::new(n, &entries)?;

    let tags: Vec<BranchTag> = branches.iter().map(|b| b.tag.clone()).collect();
    let paths: Vec<Vec<u32>> = branches.iter().map(|b| b.vertices.clone()).collect();

    let mut bundles: BTreeMap<Word, Vec<(u32, usize)>> = BTreeMap::new();
    let mut pairs: BTreeMap<(Word, Word), Vec<(u32, usize)>> = BTreeMap::new();
    for (p, tag) in tags.iter().enumerate() {
        match tag {
            BranchTag::Tine { s, i } => bundles.entry(s.clone()).or_default().push((*i, p)),
            BranchTag::Code { s, u, side } => pairs
                .entry((s.clone(), u.clone()))
                .or_default()
                .push((*side, p)),
        }
    }
    let mut forks = vec![];
    let len_lex = |a: &Word, b: &Word| a.len().cmp(&b.len()).then(a.cmp(b));
    let mut bundle_keys: Vec<Word> = bundles.keys().cloned().collect();
    bundle_keys.sort_by(|a, b| len_lex(a, b));
    let mut b_slots = vec![];
    for s in &bundle_keys {
        let mut members = bundles[s].clone();
        members.sort();
        b_slots.extend(members.iter().map(|&(_, p)| p));
        forks.push(Fork {
            kind: ForkKind::Bundle { s: s.clone() },
            members: members.into_iter().map(|(_, p)| p).collect(),
        });
    }
    let mut pair_keys: Vec<(Word, Word)> = pairs.keys().cloned().collect();
    pair_keys.sort_by(|a, b| len_lex(&a.0, &b.0).then(len_lex(&a.1, &b.1)));
    let mut c_slots = vec![];
    for key in &pair_keys {
        let mut members = pairs[key].clone();
        members.sort();
        c_slots.extend(members.iter().map(|&(_, p)| p));
        forks.push(Fork {
            kind: ForkKind::Pair {
                s: key.0.clone(),
                u: key.1.clone(),
            },
            members: members.into_iter().map(|(_, p)| p).collect(),
        });
    }

    // The spine-through slot at s: dive along zeros to the depth boundary,
    // then take the first tine.
    let mut a_slots = BTreeMap::new();
    for s in crate::trees::words_up_to(g.d, g.b) {
        let mut full = s.clone();
        while full.len() < g.d as usize {
            full.push(0);
        }
        let target = BranchTag::Tine { s: full, i: 0 };
        let point = tags
            .iter()
            .position(|t| *t == target)
            .expect("first tine branch exists at every spine word");
        a_slots.insert(s, point);
    }

    Ok(BranchSpace {
        d: g.d,
        b: g.b,
        metric,
        tags,
        paths,
        forks,
        a_slots,
        b_slots,
        c_slots,
    })
}

impl BranchSpace {
    /// Number of slots referring to each point.
    pub fn slot_signature(&self) -> Vec<usize> {
        let mut sig = vec![0usize; self.metric.n()];
        for &p in self.a_slots.values() {
            sig[p] += 1;
        }
        for &p in &self.b_slots {
            sig[p] += 1;
        }
        for &p in &self.c_slots {
            sig[p] += 1;
        }
        sig
    }

    pub fn fork_of(&self, point: usize) -> usize {
        self.forks
            .iter()
            .position(|f| f.members.contains(&point))
            .expect("every point lies in a fork")
    }

    /// The finite fork relation: same fork and same slot multiplicity.
    pub fn same_fork_class(&self, p: usize, q: usize) -> bool {
        let sig = self.slot_signature();
        self.fork_of(p) == self.fork_of(q) && sig[p] == sig[q]
    }
}

/// Maps each source branch through a structured gadget embedding; the image
/// vertex path is itself a maximal branch of the target.
pub fn induced_branch_embedding(
    w: &StructuredWitness,
    src: &BranchSpace,
    dst: &BranchSpace,
) -> Result<Vec<usize>> {
    let mut out = vec![];
    for path in &src.paths {
        let image: Vec<u32> = path.iter().map(|&v| w.vertex_map.map[v as usize]).collect();
        let target =
            dst.paths.iter().position(|p| *p == image).ok_or_else(|| {
                Error::InvalidInstance("image path is not a maximal branch".into())
            })?;
        out.push(target);
    }
    Ok(out)
}

/// Distance preservation of an explicit point map.
pub fn is_isometric_map(a: &FiniteMetric, b: &FiniteMetric, map: &[usize]) -> bool {
    if map.len() != a.n() || map.iter().any(|&v| v >= b.n()) {
        return false;
    }
    let mut seen = BTreeSet::new();
    if !map.iter().all(|&v| seen.insert(v)) {
        return false;
    }
    (0..a.n()).all(|p| (0..a.n()).all(|q| a.d(p, q) == b.d(map[p], map[q])))
}

/// Exhaustive search for an injective distance-preserving map, pruned by
/// per-point distance multisets.
pub fn iso_embed_metric(a: &FiniteMetric, b: &FiniteMetric) -> Option<Vec<usize>> {
    if a.n() > b.n() {
        return None;
    }
    let row = |m: &FiniteMetric, p: usize| -> BTreeMap<Rat, usize> {
        let mut counts = BTreeMap::new();
        for q in 0..m.n() {
            if q != p {
                *counts.entry(m.d(p, q)).or_insert(0) += 1;
            }
        }
        counts
    };
    let rows_a: Vec<_> = (0..a.n()).map(|p| row(a, p)).collect();
    let rows_b: Vec<_> = (0..b.n()).map(|p| row(b, p)).collect();
    fn rec(
        a: &FiniteMetric,
        b: &FiniteMetric,
        rows_a: &[BTreeMap<Rat, usize>],
        rows_b: &[BTreeMap<Rat, usize>],
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let p = assign.len();
        if p == a.n() {
            return true;
        }
        'cand: for v in 0..b.n() {
            if used[v] {
                continue;
            }
            for (val, count) in &rows_a[p] {
                if rows_b[v].get(val).copied().unwrap_or(0) < *count {
                    continue 'cand;
                }
            }
            for (q, &w) in assign.iter().enumerate() {
                if a.d(p, q) != b.d(v, w) {
                    continue 'cand;
                }
            }
            assign.push(v);
            used[v] = true;
            if rec(a, b, rows_a, rows_b, assign, used) {
                return true;
            }
            assign.pop();
            used[v] = false;
        }
        false
    }
    let mut assign = vec![];
    let mut used = vec![false; b.n()];
    if rec(a, b, &rows_a, &rows_b, &mut assign, &mut used) {
        debug_assert!(is_isometric_map(a, b, &assign));
        Some(assign)
    } else {
        None
    }
}

/// Bijective isometry search.
pub fn iso_metric(a: &FiniteMetric, b: &FiniteMetric) -> Option<Vec<usize>> {
    if a.n() != b.n() || a.distance_values() != b.distance_values() {
        return None;
    }
    iso_embed_metric(a, b)
}

// ---------------------------------------------------------------------------
// Ball structures
// ---------------------------------------------------------------------------

/// The first-order structure of basic balls: universe pairs `(slot, radius)`
/// over a finite radius grid, a containment relation, and diameter
/// thresholds. Slot labels follow the fixed scheme: `3 * rank(s)` for
/// spine-through slots, `3m + 1` for tine slots, `3m + 2` for code slots;
/// plain metrics use one slot per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallStructure {
    pub n_points: usize,
    /// Sorted `(label, point)` slots.
    pub slots: Vec<(u64, usize)>,
    pub radii: Vec<Rat>,
    /// Ball membership bitmask per (slot index, radius index).
    pub balls: Vec<u128>,
    /// Exact diameter per (slot index, radius index).
    pub diams: Vec<Rat>,
}

/// The radius grid of a space: realized distances, midpoints between
/// consecutive ones, and one value above the maximum. Every basic ball then
/// has at least two names.
pub fn radius_grid(m: &FiniteMetric) -> Vec<Rat> {
    let values = m.distance_values();
    let mut grid = BTreeSet::new();
    for w in values.windows(2) {
        grid.insert((w[0] + w[1]) / 2);
    }
    for v in &values {
        if v.is_positive() {
            grid.insert(*v);
        }
    }
    let top = values.last().copied().unwrap_or_else(Rat::zero) + Rat::one();
    grid.insert(top);
    grid.into_iter().collect()
}

fn build_ball_structure_inner(m: &FiniteMetric, slots: Vec<(u64, usize)>) -> Result<BallStructure> {
    if m.n() > 128 {
        return Err(Error::budget("ball structure points", m.n() as u64, 128));
    }
    let radii = radius_grid(m);
    let mut balls = vec![];
    let mut diams = vec![];
    for &(_, p) in &slots {
        for q in &radii {
            let mut mask = 0u128;
            for x in 0..m.n() {
                if m.d(p, x) < *q {
                    mask |= 1 << x;
                }
            }
            let members: Vec<usize> = (0..m.n()).filter(|&x| mask >> x & 1 == 1).collect();
            let mut diam = Rat::zero();
            for (ix, &x) in members.iter().enumerate() {
                for &y in &members[ix + 1..] {
                    diam = diam.max(m.d(x, y));
                }
            }
            balls.push(mask);
            diams.push(diam);
        }
    }
    Ok(BallStructure {
        n_points: m.n(),
        slots,
        radii,
        balls,
        diams,
    })
}

/// Ball structure of a plain metric space with the identity slot scheme.
pub fn build_ball_structure(m: &FiniteMetric) -> Result<BallStructure> {
    build_ball_structure_inner(m, (0..m.n()).map(|p| (p as u64, p)).collect())
}

/// Ball structure of a branch space with the three-way slot scheme.
pub fn build_branch_ball_structure(bs: &BranchSpace) -> Result<BallStructure> {
    let mut slots: Vec<(u64, usize)> = vec![];
    for (s, &p) in &bs.a_slots {
        slots.push((3 * crate::trees::length_lex_rank(s, bs.b), p));
    }
    for (m, &p) in bs.b_slots.iter().enumerate() {
        slots.push((3 * m as u64 + 1, p));
    }
    for (m, &p) in bs.c_slots.iter().enumerate() {
        slots.push((3 * m as u64 + 2, p));
    }
    slots.sort();
    if slots
        .iter()
        .zip(slots.iter().skip(1))
        .any(|(a, b)| a.0 == b.0)
    {
        return Err(Error::InvalidInstance("slot label collision".into()));
    }
    build_ball_structure_inner(&bs.metric, slots)
}

impl BallStructure {
    pub fn universe_len(&self) -> usize {
        self.slots.len() * self.radii.len()
    }

    #[inline]
    fn ball(&self, e: usize) -> u128 {
        self.balls[e]
    }

    /// Containment relation between universe elements.
    pub fn rel(&self, e1: usize, e2: usize) -> bool {
        self.ball(e1) & !self.ball(e2) == 0
    }

    /// Diameter threshold predicate, for radii drawn from the grid.
    pub fn diam_below(&self, e: usize, r: &Rat) -> bool {
        self.diams[e] < *r
    }

    pub fn same_ball(&self, e1: usize, e2: usize) -> bool {
        self.ball(e1) == self.ball(e2)
    }

    pub fn is_singleton(&self, e: usize) -> bool {
        self.ball(e).count_ones() == 1
    }

    pub fn slot_of(&self, e: usize) -> u64 {
        self.slots[e / self.radii.len()].0
    }

    pub fn point_of(&self, e: usize) -> usize {
        self.slots[e / self.radii.len()].1
    }

    /// Groups universe elements by identical balls; the classes carry all
    /// structure, since both relations factor through them.
    pub fn ball_classes(&self) -> Vec<BallClass> {
        let mut by_mask: BTreeMap<u128, Vec<usize>> = BTreeMap::new();
        for e in 0..self.universe_len() {
            by_mask.entry(self.ball(e)).or_default().push(e);
        }
        by_mask
            .into_iter()
            .map(|(mask, names)| BallClass {
                mask,
                diam: self.diams[names[0]],
                size: names.len(),
                names,
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BallClass {
    pub mask: u128,
    pub diam: Rat,
    pub size: usize,
    pub names: Vec<usize>,
}

/// Automorphisms of the ball quotient: bijections of ball classes
/// preserving containment, diameter and name count. Relations factor
/// through classes, so structure automorphisms are exactly class
/// automorphisms refined by arbitrary within-class name bijections.
pub fn ball_class_automorphisms(s: &BallStructure) -> Vec<Vec<usize>> {
    let classes = s.ball_classes();
    let k = classes.len();
    let contains = |x: usize, y: usize| classes[x].mask & !classes[y].mask == 0;
    let mut out = vec![];
    fn rec(
        k: usize,
        classes: &[BallClass],
        contains: &dyn Fn(usize, usize) -> bool,
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let x = assign.len();
        if x == k {
            out.push(assign.clone());
            return;
        }
        'cand: for y in 0..k {
            if used[y]
                || classes[x].diam != classes[y].diam
                || classes[x].size != classes[y].size
                || classes[x].mask.count_ones() != classes[y].mask.count_ones()
            {
                continue;
            }
            for (x2, &y2) in assign.iter().enumerate() {
                if contains(x, x2) != contains(y, y2) || contains(x2, x) != contains(y2, y) {
                    continue 'cand;
                }
            }
            assign.push(y);
            used[y] = true;
            rec(k, classes, contains, assign, used, out);
            assign.pop();
            used[y] = false;
        }
    }
    rec(
        k,
        &classes,
        &contains,
        &mut vec![],
        &mut vec![false; k],
        &mut out,
    );
    out
}

/// Structure isomorphism via ball classes: a class bijection preserving
/// containment, diameters and name counts.
pub fn ball_structures_isomorphic(s1: &BallStructure, s2: &BallStructure) -> bool {
    let c1 = s1.ball_classes();
    let c2 = s2.ball_classes();
    if c1.len() != c2.len() {
        return false;
    }
    let cont1 = |x: usize, y: usize| c1[x].mask & !c1[y].mask == 0;
    let cont2 = |x: usize, y: usize| c2[x].mask & !c2[y].mask == 0;
    fn rec(
        c1: &[BallClass],
        c2: &[BallClass],
        cont1: &dyn Fn(usize, usize) -> bool,
        cont2: &dyn Fn(usize, usize) -> bool,
        assign: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let x = assign.len();
        if x == c1.len() {
            return true;
        }
        'cand: for y in 0..c2.len() {
            if used[y]
                || c1[x].diam != c2[y].diam
                || c1[x].size != c2[y].size
                || c1[x].mask.count_ones() != c2[y].mask.count_ones()
            {
                continue;
            }
            for (x2, &y2) in assign.iter().enumerate() {
                if cont1(x, x2) != cont2(y, y2) || cont1(x2, x) != cont2(y2, y) {
                    continue 'cand;
                }
            }
            assign.push(y);
            used[y] = true;
            if rec(c1, c2, cont1, cont2, assign, used) {
                return true;
            }
            assign.pop();
            used[y] = false;
        }
        false
    }
    rec(
        &c1,
        &c2,
        &cont1,
        &cont2,
        &mut vec![],
        &mut vec![false; c2.len()],
    )
}

/// A finite partial map on the universe of a branch-space ball structure,
/// given as pairs of universe indices.
pub type PartialBallMap = Vec<(usize, usize)>;

/// The extension condition list for branch-space ball structures: the map
/// respects containment and thresholds; names of non-singleton balls and of
/// spine-through slots land on names of the same ball; singleton names at
/// tine or code slots stay within the fork class of their point.
pub fn can_extend_ball_auto(
    bs: &BranchSpace,
    s: &BallStructure,
    h: &PartialBallMap,
) -> Result<bool> {
    let universe = s.universe_len();
    for &(e, f) in h {
        if e >= universe || f >= universe {
            return Err(Error::Precondition("universe index out of range".into()));
        }
    }
    let mut dom = BTreeSet::new();
    let mut img = BTreeSet::new();
    if !h.iter().all(|&(e, f)| dom.insert(e) && img.insert(f)) {
        return Err(Error::Precondition("partial map must be injective".into()));
    }
    for &(e1, f1) in h {
        for &(e2, f2) in h {
            if s.rel(e1, e2) != s.rel(f1, f2) {
                return Ok(false);
            }
        }
        if s.diams[e1] != s.diams[f1] {
            return Ok(false);
        }
        let pinned = !s.is_singleton(e1) || s.slot_of(e1) % 3 == 0;
        if pinned {
            if !s.same_ball(e1, f1) {
                return Ok(false);
            }
        } else if !bs.same_fork_class(s.point_of(e1), s.point_of(f1)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Brute-force oracle: searches the ball-class automorphisms (which carry
/// all the structure) for one consistent with the partial map.
pub fn can_extend_ball_auto_brute(
    s: &BallStructure,
    class_autos: &[Vec<usize>],
    h: &PartialBallMap,
) -> bool {
    let classes = s.ball_classes();
    let class_of = |e: usize| {
        classes
            .iter()
            .position(|c| c.names.contains(&e))
            .expect("every universe element has a class")
    };
    let mut dom = BTreeSet::new();
    let mut img = BTreeSet::new();
    if !h.iter().all(|&(e, f)| dom.insert(e) && img.insert(f)) {
        return false;
    }
    class_autos
        .iter()
        .any(|lambda| h.iter().all(|&(e, f)| lambda[class_of(e)] == class_of(f)))
}

/// The discrete structure of a metric space: one binary relation per grid
/// radius. Isomorphism of these structures is exactly isometry, decided by
/// the bijective search.
pub fn discrete_structures_isomorphic(a: &FiniteMetric, b: &FiniteMetric) -> bool {
    iso_metric(a, b).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::build_gadget;
    use crate::graph::SearchBudget;
    use crate::trees::{enumerate_trees, NormalTree};

    fn smallest_space() -> BranchSpace {
        let g = build_gadget(&NormalTree::root_only(0, 1), SearchBudget::for_suites()).unwrap();
        build_branch_space(&g).unwrap()
    }

    #[test]
    fn path_distance_is_length() {
        let m = build_discrete(&Graph::path(3)).unwrap();
        assert_eq!(m.d(0, 2), Rat::from_integer(2));
    }

    #[test]
    fn discrete_round_trip_on_paths_and_stars() {
        for g in [Graph::path(5), Graph::star(4)] {
            let m = build_discrete(&g).unwrap();
            assert_eq!(recover_graph(&m).unwrap(), g);
        }
    }

    #[test]
    fn cyclic_input_is_rejected() {
        assert!(matches!(
            build_discrete(&Graph::cycle(4)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn discrete_embedding_matches_graph_embedding_on_small_trees() {
        let trees = [Graph::path(3), Graph::star(3), Graph::path(4)];
        for g in &trees {
            for h in &trees {
                let free = crate::graph::find_embedding(g, h).unwrap().is_some();
                let metric =
                    iso_embed_metric(&build_discrete(g).unwrap(), &build_discrete(h).unwrap())
                        .is_some();
                assert_eq!(free, metric);
            }
        }
    }

    #[test]
    fn smallest_branch_space_is_ultrametric_with_exact_fork_distances() {
        let bs = smallest_space();
        assert_eq!(bs.metric.n(), 5);
        assert!(bs.metric.is_ultrametric());
        // Tine bundle at the root word: pairwise distance 2^-2.
        let bundle = bs
            .forks
            .iter()
            .find(|f| matches!(f.kind, ForkKind::Bundle { .. }))
            .unwrap();
        assert_eq!(bundle.members.len(), 3);
        for &x in &bundle.members {
            for &y in &bundle.members {
                if x != y {
                    assert_eq!(bs.metric.d(x, y), rat(1, 4));
                }
            }
        }
        // Code pair: distance 2^-(0 + 0 + 3).
        let pair = bs
            .forks
            .iter()
            .find(|f| matches!(f.kind, ForkKind::Pair { .. }))
            .unwrap();
        assert_eq!(pair.members.len(), 2);
        assert_eq!(bs.metric.d(pair.members[0], pair.members[1]), rat(1, 8));
        // Tine to code distance crosses at the root vertex only.
        assert_eq!(bs.metric.d(bundle.members[0], pair.members[0]), rat(1, 1));
    }

    #[test]
    fn bundle_to_spine_slot_distance() {
        // At depth 1 the spine-through slot of the root is a branch through
        // the zero child, at distance 2^0 from the root bundle members.
        let g = build_gadget(&NormalTree::full(1, 1), SearchBudget::for_suites()).unwrap();
        let bs = build_branch_space(&g).unwrap();
        let a_root = bs.a_slots[&vec![]];
        let root_bundle = bs
            .forks
            .iter()
            .find(|f| f.kind == ForkKind::Bundle { s: vec![] })
            .unwrap();
        for &p in &root_bundle.members {
            assert_eq!(bs.metric.d(p, a_root), rat(1, 1));
        }
    }

    #[test]
    fn branch_space_iso_distinguishes_trees() {
        let corpus = enumerate_trees(1, 1, 100).unwrap();
        let spaces: Vec<BranchSpace> = corpus
            .iter()
            .map(|t| {
                build_branch_space(&build_gadget(t, SearchBudget::for_suites()).unwrap()).unwrap()
            })
            .collect();
        for (i, x) in spaces.iter().enumerate() {
            for (j, y) in spaces.iter().enumerate() {
                assert_eq!(
                    iso_metric(&x.metric, &y.metric).is_some(),
                    i == j,
                    "trees {i} vs {j}"
                );
            }
        }
    }

    #[test]
    fn two_point_spaces_with_distinct_distances_do_not_embed() {
        let a = FiniteMetric::new(2, &[(0, 1, rat(1, 1))]).unwrap();
        let b = FiniteMetric::new(2, &[(0, 1, rat(1, 2))]).unwrap();
        assert!(iso_embed_metric(&a, &b).is_none());
        assert!(iso_embed_metric(&a, &a).is_some());
    }

    #[test]
    fn ball_structure_of_singleton_is_total() {
        let m = FiniteMetric::new(1, &[]).unwrap();
        let s = build_ball_structure(&m).unwrap();
        for e1 in 0..s.universe_len() {
            for e2 in 0..s.universe_len() {
                assert!(s.rel(e1, e2));
            }
        }
    }

    #[test]
    fn two_point_ball_containment() {
        let m = FiniteMetric::new(2, &[(0, 1, rat(1, 4))]).unwrap();
        let s = build_ball_structure(&m).unwrap();
        // Grid: 1/8, 1/4, 5/4. Singletons at 1/8 and 1/4, everything at 5/4.
        assert_eq!(s.radii, vec![rat(1, 8), rat(1, 4), rat(5, 4)]);
        let e = |slot: usize, r: usize| slot * 3 + r;
        assert!(s.rel(e(0, 0), e(0, 2)));
        assert!(!s.rel(e(0, 2), e(0, 0)));
        assert!(s.same_ball(e(0, 0), e(0, 1)));
        assert!(!s.same_ball(e(0, 0), e(1, 0)));
        assert!(s.same_ball(e(0, 2), e(1, 2)));
    }

    #[test]
    fn every_ball_has_at_least_two_names() {
        let bs = smallest_space();
        let s = build_branch_ball_structure(&bs).unwrap();
        for class in s.ball_classes() {
            assert!(
                class.size >= 2,
                "ball {:b} has {} names",
                class.mask,
                class.size
            );
        }
    }

    #[test]
    fn isometric_spaces_give_isomorphic_structures() {
        let m1 = FiniteMetric::new(
            3,
            &[(0, 1, rat(1, 2)), (0, 2, rat(1, 1)), (1, 2, rat(1, 1))],
        )
        .unwrap();
        // Same space with points relabeled.
        let m2 = FiniteMetric::new(
            3,
            &[(1, 2, rat(1, 2)), (0, 2, rat(1, 1)), (0, 1, rat(1, 1))],
        )
        .unwrap();
        let s1 = build_ball_structure(&m1).unwrap();
        let s2 = build_ball_structure(&m2).unwrap();
        assert!(ball_structures_isomorphic(&s1, &s2));
        let m3 = FiniteMetric::new(
            3,
            &[(0, 1, rat(1, 4)), (0, 2, rat(1, 1)), (1, 2, rat(1, 1))],
        )
        .unwrap();
        let s3 = build_ball_structure(&m3).unwrap();
        assert!(!ball_structures_isomorphic(&s1, &s3));
    }

    #[test]
    fn empty_map_extends() {
        let bs = smallest_space();
        let s = build_branch_ball_structure(&bs).unwrap();
        assert!(can_extend_ball_auto(&bs, &s, &vec![]).unwrap());
    }

    #[test]
    fn extension_conditions_agree_with_class_search_on_singleton_maps() {
        let bs = smallest_space();
        let s = build_branch_ball_structure(&bs).unwrap();
        let autos = ball_class_automorphisms(&s);
        let u = s.universe_len();
        for e in 0..u {
            for f in 0..u {
                let fast = can_extend_ball_auto(&bs, &s, &vec![(e, f)]).unwrap();
                let brute = can_extend_ball_auto_brute(&s, &autos, &vec![(e, f)]);
                assert_eq!(fast, brute, "({e}, {f})");
            }
        }
    }

    #[test]
    fn cross_fork_moves_are_rejected() {
        let bs = smallest_space();
        let s = build_branch_ball_structure(&bs).unwrap();
        // A singleton name of a plain tine point against a code point.
        let tine_point = bs.b_slots[1];
        let code_point = bs.c_slots[0];
        let name_of = |point: usize| {
            (0..s.universe_len())
                .find(|&e| s.is_singleton(e) && s.point_of(e) == point && s.slot_of(e) % 3 != 0)
                .unwrap()
        };
        let h = vec![(name_of(tine_point), name_of(code_point))];
        assert!(!can_extend_ball_auto(&bs, &s, &h).unwrap());
    }

    #[test]
    fn metric_json_round_trip() {
        let m = FiniteMetric::new(
            3,
            &[(0, 1, rat(1, 2)), (0, 2, rat(3, 4)), (1, 2, rat(3, 4))],
        )
        .unwrap();
        let s = serde_json::to_string(&m).unwrap();
        let back: FiniteMetric = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
