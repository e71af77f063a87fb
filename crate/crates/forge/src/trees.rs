//! Finite presentations of normal trees on `2 x omega` and `2 x 2 x omega`.
//!
//! A finite tree with numeric bound `b` stands for the infinite normal tree
//! generated by upward closure in the numeric coordinate: a node `(u, t)`
//! with unbounded entries lies in that closure exactly when `(u, clip_b(t))`
//! is stored, because clipping preserves pointwise domination of any
//! in-bound witness. All decision procedures here work on the bounded
//! representation and are complete for the closure by that observation.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub type Word = Vec<u8>;

pub fn word_to_string(w: &[u8]) -> String {
    w.iter().map(|c| char::from(b'0' + c)).collect()
}

pub fn word_from_string(s: &str) -> Result<Word> {
    s.chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as u8)
                .ok_or_else(|| Error::InvalidInstance(format!("bad digit {c:?} in word {s:?}")))
        })
        .collect()
}

/// Pointwise sum of equal-length words.
pub fn word_sum(s: &[u8], t: &[u8]) -> Word {
    s.iter().zip(t).map(|(a, b)| a + b).collect()
}

/// Caps every entry at `b - 1`.
pub fn clip(t: &[u8], b: u8) -> Word {
    t.iter().map(|&x| x.min(b - 1)).collect()
}

pub fn dominates(t: &[u8], s: &[u8]) -> bool {
    t.len() == s.len() && s.iter().zip(t).all(|(a, b)| a <= b)
}

/// Length-lexicographic rank of `x` among all words over `{0..base-1}`:
/// the number of shorter words plus the lexicographic position within the
/// length class. Strictly monotone in length; within a length class it
/// orders words lexicographically.
pub fn length_lex_rank(x: &[u8], base: u8) -> u64 {
    let mut shorter = 0u64;
    let mut pow = 1u64;
    for _ in 0..x.len() {
        shorter += pow;
        pow *= base as u64;
    }
    let mut val = 0u64;
    for &c in x {
        val = val * base as u64 + c as u64;
    }
    shorter + val
}

/// Rank of a binary word; the positional code used for code-path lengths.
pub fn theta(u: &[u8]) -> u64 {
    length_lex_rank(u, 2)
}

fn words_of_len(len: usize, base: u8) -> Vec<Word> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..base).map(move |c| {
                    let mut w2 = w.clone();
                    w2.push(c);
                    w2
                })
            })
            .collect();
    }
    out
}

pub fn words_up_to(d: u8, base: u8) -> Vec<Word> {
    (0..=d as usize)
        .flat_map(|l| words_of_len(l, base))
        .collect()
}

// ---------------------------------------------------------------------------
// Trees on 2 x omega
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TreeJson {
    d: u8,
    b: u8,
    nodes: Vec<(String, Word)>,
}

/// A finite normal tree on `2 x omega`, truncated at depth `d` with numeric
/// entries below `b`. Contains the root, is closed under simultaneous
/// prefix, and is upward closed in the numeric coordinate within the bound.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "TreeJson", into = "TreeJson")]
pub struct NormalTree {
    pub d: u8,
    pub b: u8,
    nodes: BTreeSet<(Word, Word)>,
}

impl TryFrom<TreeJson> for NormalTree {
    type Error = Error;
    fn try_from(j: TreeJson) -> Result<Self> {
        let nodes = j
            .nodes
            .into_iter()
            .map(|(u, s)| Ok((word_from_string(&u)?, s)))
            .collect::<Result<BTreeSet<_>>>()?;
        NormalTree::new(j.d, j.b, nodes)
    }
}

impl From<NormalTree> for TreeJson {
    fn from(t: NormalTree) -> TreeJson {
        TreeJson {
            d: t.d,
            b: t.b,
            nodes: t
                .nodes
                .into_iter()
                .map(|(u, s)| (word_to_string(&u), s))
                .collect(),
        }
    }
}

impl NormalTree {
    pub fn new(d: u8, b: u8, nodes: BTreeSet<(Word, Word)>) -> Result<Self> {
        let t = NormalTree { d, b, nodes };
        t.validate()?;
        Ok(t)
    }

    /// The one-node tree containing only the root.
    pub fn root_only(d: u8, b: u8) -> Self {
        NormalTree {
            d,
            b,
            nodes: BTreeSet::from([(vec![], vec![])]),
        }
    }

    /// The full tree: every `(u, s)` up to the truncation parameters.
    pub fn full(d: u8, b: u8) -> Self {
        let mut nodes = BTreeSet::new();
        for u in words_up_to(d, 2) {
            for s in words_of_len(u.len(), b) {
                nodes.insert((u.clone(), s));
            }
        }
        NormalTree { d, b, nodes }
    }

    pub fn validate(&self) -> Result<()> {
        if self.b == 0 {
            return Err(Error::InvalidInstance(
                "branch bound must be positive".into(),
            ));
        }
        if !self.nodes.contains(&(vec![], vec![])) {
            return Err(Error::InvalidInstance("missing root node".into()));
        }
        for (u, s) in &self.nodes {
            if u.len() != s.len() || u.len() > self.d as usize {
                return Err(Error::InvalidInstance(format!(
                    "node ({}, {:?}) has bad shape for d={}",
                    word_to_string(u),
                    s,
                    self.d
                )));
            }
            if u.iter().any(|&c| c > 1) || s.iter().any(|&c| c >= self.b) {
                return Err(Error::InvalidInstance(format!(
                    "node ({}, {:?}) out of alphabet range",
                    word_to_string(u),
                    s
                )));
            }
            if !u.is_empty() {
                let pre = (u[..u.len() - 1].to_vec(), s[..s.len() - 1].to_vec());
                if !self.nodes.contains(&pre) {
                    return Err(Error::InvalidInstance(format!(
                        "node ({}, {:?}) missing its prefix",
                        word_to_string(u),
                        s
                    )));
                }
            }
            // Normality within the bound: bumping one entry stays inside.
            for i in 0..s.len() {
                if s[i] + 1 < self.b {
                    let mut t = s.clone();
                    t[i] += 1;
                    if !self.nodes.contains(&(u.clone(), t)) {
                        return Err(Error::InvalidInstance(format!(
                            "node ({}, {:?}) violates normality at entry {i}",
                            word_to_string(u),
                            s
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeSet<(Word, Word)> {
        &self.nodes
    }

    pub fn contains(&self, u: &[u8], s: &[u8]) -> bool {
        self.nodes.contains(&(u.to_vec(), s.to_vec()))
    }

    /// Membership of `(u, t)` in the infinite normal closure, for `t` with
    /// entries possibly at or above the bound.
    pub fn closure_contains(&self, u: &[u8], t: &[u8]) -> bool {
        self.contains(u, &clip(t, self.b))
    }

    /// Brute-force closure membership: searches for a stored node dominated
    /// by `t`. Oracle for `closure_contains`.
    pub fn closure_contains_naive(&self, u: &[u8], t: &[u8]) -> bool {
        self.nodes
            .iter()
            .any(|(nu, ns)| nu == u && dominates(t, ns))
    }

    /// The same tree re-bounded at `b_new >= b`, with nodes upward closed
    /// within the new bound.
    pub fn reclose_at(&self, b_new: u8) -> NormalTree {
        assert!(b_new >= self.b);
        let mut nodes = BTreeSet::new();
        for (u, s) in &self.nodes {
            let mut stack = vec![s.clone()];
            while let Some(t) = stack.pop() {
                if !nodes.insert((u.clone(), t.clone())) {
                    continue;
                }
                for i in 0..t.len() {
                    if t[i] + 1 < b_new {
                        let mut t2 = t.clone();
                        t2[i] += 1;
                        stack.push(t2);
                    }
                }
            }
        }
        NormalTree {
            d: self.d,
            b: b_new,
            nodes,
        }
    }

    /// Numeric projections present at each level, in `(length, lex)` order.
    pub fn s_projection(&self) -> Vec<Word> {
        let set: BTreeSet<Word> = self.nodes.iter().map(|(_, s)| s.clone()).collect();
        let mut v: Vec<Word> = set.into_iter().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        v
    }

    /// The binary words attached to a given numeric word.
    pub fn u_set(&self, s: &[u8]) -> BTreeSet<Word> {
        self.nodes
            .iter()
            .filter(|(_, ns)| ns == s)
            .map(|(u, _)| u.clone())
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Trees on 2 x 2 x omega and the normal-form report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Tree3Json {
    d: u8,
    b: u8,
    nodes: Vec<(String, String, Word)>,
}

/// A finite tree on `2 x 2 x omega`: prefix-closed triples `(u, v, s)` with
/// the numeric coordinate below `b`, normal in `s` within the bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Tree3Json", into = "Tree3Json")]
pub struct NormalTree3 {
    pub d: u8,
    pub b: u8,
    nodes: BTreeSet<(Word, Word, Word)>,
}

impl TryFrom<Tree3Json> for NormalTree3 {
    type Error = Error;
    fn try_from(j: Tree3Json) -> Result<Self> {
        let nodes = j
            .nodes
            .into_iter()
            .map(|(u, v, s)| Ok((word_from_string(&u)?, word_from_string(&v)?, s)))
            .collect::<Result<BTreeSet<_>>>()?;
        NormalTree3::new(j.d, j.b, nodes)
    }
}

impl From<NormalTree3> for Tree3Json {
    fn from(t: NormalTree3) -> Tree3Json {
        Tree3Json {
            d: t.d,
            b: t.b,
            nodes: t
                .nodes
                .into_iter()
                .map(|(u, v, s)| (word_to_string(&u), word_to_string(&v), s))
                .collect(),
        }
    }
}

impl NormalTree3 {
    pub fn new(d: u8, b: u8, nodes: BTreeSet<(Word, Word, Word)>) -> Result<Self> {
        let t = NormalTree3 { d, b, nodes };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b == 0 {
            return Err(Error::InvalidInstance(
                "branch bound must be positive".into(),
            ));
        }
        if !self.nodes.contains(&(vec![], vec![], vec![])) {
            return Err(Error::InvalidInstance("missing root node".into()));
        }
        for (u, v, s) in &self.nodes {
            if u.len() != v.len() || u.len() != s.len() || u.len() > self.d as usize {
                return Err(Error::InvalidInstance("triple node with bad shape".into()));
            }
            if u.iter().chain(v).any(|&c| c > 1) || s.iter().any(|&c| c >= self.b) {
                return Err(Error::InvalidInstance("triple node out of range".into()));
            }
            if !u.is_empty() {
                let k = u.len() - 1;
                if !self
                    .nodes
                    .contains(&(u[..k].to_vec(), v[..k].to_vec(), s[..k].to_vec()))
                {
                    return Err(Error::InvalidInstance("triple node missing prefix".into()));
                }
            }
            for i in 0..s.len() {
                if s[i] + 1 < self.b {
                    let mut t = s.clone();
                    t[i] += 1;
                    if !self.nodes.contains(&(u.clone(), v.clone(), t)) {
                        return Err(Error::InvalidInstance(
                            "triple node violates normality".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeSet<(Word, Word, Word)> {
        &self.nodes
    }

    pub fn contains(&self, u: &[u8], v: &[u8], s: &[u8]) -> bool {
        self.nodes.contains(&(u.to_vec(), v.to_vec(), s.to_vec()))
    }

    /// The diagonal tree: every `(u, u, s)`.
    pub fn diagonal(d: u8, b: u8) -> Self {
        let mut nodes = BTreeSet::new();
        for u in words_up_to(d, 2) {
            for s in words_of_len(u.len(), b) {
                nodes.insert((u.clone(), u.clone(), s));
            }
        }
        NormalTree3 { d, b, nodes }
    }

    /// The slice along `x`: all `(u, s)` with `(u, x restricted to |u|, s)`
    /// in the tree.
    pub fn slice(&self, x: &[u8]) -> Result<NormalTree> {
        if x.len() < self.d as usize {
            return Err(Error::Precondition(format!(
                "slice direction has length {}, need at least d={}",
                x.len(),
                self.d
            )));
        }
        let nodes: BTreeSet<(Word, Word)> = self
            .nodes
            .iter()
            .filter(|(u, v, _)| v[..] == x[..u.len()])
            .map(|(u, _, s)| (u.clone(), s.clone()))
            .collect();
        NormalTree::new(self.d, self.b, nodes)
    }
}

/// Outcome of the three local normal-form conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalFormReport {
    /// Every diagonal node `(u, u, s)` is present.
    pub reflexive: bool,
    /// `(u,v,s)` and `(v,w,t)` force `(u, w, clip(s+t))`.
    pub locally_transitive: bool,
    /// `(u, v, 0...0)` forces `u = v`.
    pub antisymmetric_at_zero: bool,
}

impl NormalFormReport {
    pub fn all(&self) -> bool {
        self.reflexive && self.locally_transitive && self.antisymmetric_at_zero
    }
}

/// Checks the three normal-form conditions, indexing middle coordinates to
/// avoid the full quadratic pairing.
pub fn check_normal_form(tree: &NormalTree3) -> NormalFormReport {
    let reflexive = words_up_to(tree.d, 2).iter().all(|u| {
        words_of_len(u.len(), tree.b)
            .iter()
            .all(|s| tree.contains(u, u, s))
    });

    let mut by_first: BTreeMap<&Word, Vec<(&Word, &Word)>> = BTreeMap::new();
    for (u, v, s) in tree.nodes() {
        by_first.entry(u).or_default().push((v, s));
    }
    let mut locally_transitive = true;
    'outer: for (u, v, s) in tree.nodes() {
        if let Some(partners) = by_first.get(v) {
            for (w, t) in partners {
                let sum = clip(&word_sum(s, t), tree.b);
                if !tree.contains(u, w, &sum) {
                    locally_transitive = false;
                    break 'outer;
                }
            }
        }
    }

    let antisymmetric_at_zero = tree
        .nodes()
        .iter()
        .all(|(u, v, s)| u == v || s.iter().any(|&c| c != 0));

    NormalFormReport {
        reflexive,
        locally_transitive,
        antisymmetric_at_zero,
    }
}

/// Literal triple-loop recomputation of the report, kept free of any
/// indexing; the independent oracle for `check_normal_form`.
pub fn check_normal_form_naive(tree: &NormalTree3) -> NormalFormReport {
    let mut reflexive = true;
    for u in words_up_to(tree.d, 2) {
        for s in words_of_len(u.len(), tree.b) {
            if !tree.contains(&u, &u, &s) {
                reflexive = false;
            }
        }
    }
    let mut locally_transitive = true;
    for (u, v, s) in tree.nodes() {
        for (v2, w, t) in tree.nodes() {
            if v == v2 && !tree.contains(u, w, &clip(&word_sum(s, t), tree.b)) {
                locally_transitive = false;
            }
        }
    }
    let mut antisymmetric_at_zero = true;
    for (u, v, s) in tree.nodes() {
        if u != v && s.iter().all(|&c| c == 0) {
            antisymmetric_at_zero = false;
        }
    }
    NormalFormReport {
        reflexive,
        locally_transitive,
        antisymmetric_at_zero,
    }
}

/// Closes a set of generator triples under reflexivity, prefixes, normality
/// and local transitivity. Returns `None` when the closure inevitably
/// violates antisymmetry at zero.
pub fn close_normal_form(d: u8, b: u8, generators: &[(Word, Word, Word)]) -> Option<NormalTree3> {
    let mut nodes: BTreeSet<(Word, Word, Word)> = BTreeSet::new();
    for u in words_up_to(d, 2) {
        for s in words_of_len(u.len(), b) {
            nodes.insert((u.clone(), u.clone(), s));
        }
    }
    for g in generators {
        nodes.insert(g.clone());
    }
    loop {
        let mut fresh: BTreeSet<(Word, Word, Word)> = BTreeSet::new();
        for (u, v, s) in &nodes {
            if !u.is_empty() {
                let k = u.len() - 1;
                let p = (u[..k].to_vec(), v[..k].to_vec(), s[..k].to_vec());
                if !nodes.contains(&p) {
                    fresh.insert(p);
                }
            }
            for i in 0..s.len() {
                if s[i] + 1 < b {
                    let mut t = s.clone();
                    t[i] += 1;
                    let node = (u.clone(), v.clone(), t);
                    if !nodes.contains(&node) {
                        fresh.insert(node);
                    }
                }
            }
        }
        let mut by_first: BTreeMap<&Word, Vec<(&Word, &Word)>> = BTreeMap::new();
        for (u, v, s) in &nodes {
            by_first.entry(u).or_default().push((v, s));
        }
        for (u, v, s) in &nodes {
            if let Some(partners) = by_first.get(v) {
                for (w, t) in partners {
                    let node = (u.clone(), (*w).clone(), clip(&word_sum(s, t), b));
                    if !nodes.contains(&node) {
                        fresh.insert(node);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        nodes.extend(fresh);
    }
    let tree = NormalTree3 { d, b, nodes };
    if check_normal_form(&tree).antisymmetric_at_zero {
        Some(tree)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// The quasi-order on normal trees
// ---------------------------------------------------------------------------

/// A length- and prefix-preserving map on the numeric projection of the
/// source tree, witnessing comparability of trees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LipschitzWitness {
    pub map: BTreeMap<Word, Word>,
}

impl LipschitzWitness {
    pub fn identity(tree: &NormalTree) -> Self {
        LipschitzWitness {
            map: tree
                .s_projection()
                .into_iter()
                .map(|s| (s.clone(), s))
                .collect(),
        }
    }

    /// `other` after `self`; defined when the image of `self` lies in the
    /// domain of `other`.
    pub fn compose(&self, other: &LipschitzWitness) -> Option<LipschitzWitness> {
        let mut map = BTreeMap::new();
        for (s, t) in &self.map {
            map.insert(s.clone(), other.map.get(t)?.clone());
        }
        Some(LipschitzWitness { map })
    }
}

/// Checks that `w` witnesses comparability of `source` into `target`:
/// total on the numeric projection, length- and prefix-preserving, in-bound,
/// and carrying every node of the source into the target.
pub fn is_le_max_witness(source: &NormalTree, target: &NormalTree, w: &LipschitzWitness) -> bool {
    let proj = source.s_projection();
    if w.map.len() != proj.len() {
        return false;
    }
    for s in &proj {
        let Some(t) = w.map.get(s) else { return false };
        if t.len() != s.len() || t.iter().any(|&c| c >= target.b) {
            return false;
        }
        if !s.is_empty() {
            let parent_img = match w.map.get(&s[..s.len() - 1]) {
                Some(p) => p,
                None => return false,
            };
            if parent_img[..] != t[..t.len() - 1] {
                return false;
            }
        }
    }
    source
        .nodes()
        .iter()
        .all(|(u, s)| target.contains(u, &w.map[s]))
}

/// Decides comparability at matched depth by exhaustive backtracking over
/// extensions, processing the source projection in `(length, lex)` order and
/// trying numeric entries in ascending order, so a returned witness is the
/// lexicographically least one. Completeness for the infinite closure of the
/// target follows from the clipping observation in the module header.
pub fn le_max(source: &NormalTree, target: &NormalTree) -> Result<Option<LipschitzWitness>> {
    if source.d != target.d {
        return Err(Error::Precondition(format!(
            "depth mismatch: {} vs {}",
            source.d, target.d
        )));
    }
    let proj = source.s_projection();
    // For each projected word, the set of binary words riding on it.
    let usets: Vec<BTreeSet<Word>> = proj.iter().map(|s| source.u_set(s)).collect();
    let index: BTreeMap<&Word, usize> = proj.iter().enumerate().map(|(i, s)| (s, i)).collect();

    fn rec(
        proj: &[Word],
        usets: &[BTreeSet<Word>],
        index: &BTreeMap<&Word, usize>,
        target: &NormalTree,
        images: &mut Vec<Word>,
        k: usize,
    ) -> bool {
        if k == proj.len() {
            return true;
        }
        let s = &proj[k];
        let candidates: Vec<Word> = if s.is_empty() {
            vec![vec![]]
        } else {
            let parent = index[&s[..s.len() - 1].to_vec()];
            let base = images[parent].clone();
            (0..target.b)
                .map(|m| {
                    let mut t = base.clone();
                    t.push(m);
                    t
                })
                .collect()
        };
        for t in candidates {
            if usets[k].iter().all(|u| target.contains(u, &t)) {
                images.push(t);
                if rec(proj, usets, index, target, images, k + 1) {
                    return true;
                }
                images.pop();
            }
        }
        false
    }

    let mut images = vec![];
    if rec(&proj, &usets, &index, target, &mut images, 0) {
        Ok(Some(LipschitzWitness {
            map: proj.into_iter().zip(images).collect(),
        }))
    } else {
        Ok(None)
    }
}

/// An injective refinement of a comparability witness. Separating images may
/// need numeric entries at or above the target bound; the output then
/// carries the enlarged bound and the target re-closed within it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InjectiveWitness {
    pub map: BTreeMap<Word, Word>,
    pub bound: u8,
    pub target: NormalTree,
}

impl InjectiveWitness {
    pub fn as_lipschitz(&self) -> LipschitzWitness {
        LipschitzWitness {
            map: self.map.clone(),
        }
    }
}

/// Refines a valid witness `f0` into the lexicographically least injective
/// witness dominating it, built level by level: each image extends its
/// parent's image, dominates the `f0` image pointwise, differs from every
/// earlier same-length image, and never lexicographically precedes its
/// argument (so positional ranks are preserved in any bound). The target is
/// re-closed at the bound the construction needed.
pub fn canonical_injective_witness(
    source: &NormalTree,
    target: &NormalTree,
    f0: &LipschitzWitness,
) -> Result<InjectiveWitness> {
    if !is_le_max_witness(source, target, f0) {
        return Err(Error::Precondition(
            "refinement requires a valid comparability witness".into(),
        ));
    }
    let proj = source.s_projection();
    let mut map: BTreeMap<Word, Word> = BTreeMap::new();
    let mut used: BTreeSet<Word> = BTreeSet::new();
    let mut bound = target.b;
    for s in &proj {
        if s.is_empty() {
            map.insert(vec![], vec![]);
            used.insert(vec![]);
            continue;
        }
        let parent = map[&s[..s.len() - 1].to_vec()].clone();
        let floor = f0.map[s][s.len() - 1];
        let mut m = floor;
        loop {
            let mut t = parent.clone();
            t.push(m);
            let lex_ok = t >= *s;
            if lex_ok && !used.contains(&t) {
                bound = bound.max(m + 1);
                used.insert(t.clone());
                map.insert(s.clone(), t);
                break;
            }
            m += 1;
        }
    }
    let closed = target.reclose_at(bound);
    Ok(InjectiveWitness {
        map,
        bound,
        target: closed,
    })
}

/// Extends an injective refinement from the numeric projection to the whole
/// bounded word cube, keeping injectivity, prefix preservation and the
/// lexicographic floor. Words outside the projection sit below it in each
/// sibling group (projections of normal trees are upward closed level-wise),
/// so the identity on the missing low values always fits inside the
/// refinement bound.
pub fn extend_witness_to_spine(
    source: &NormalTree,
    w: &InjectiveWitness,
) -> Result<BTreeMap<Word, Word>> {
    let mut map: BTreeMap<Word, Word> = BTreeMap::new();
    let mut spine = words_up_to(source.d, source.b);
    spine.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    for s in &spine {
        if let Some(t) = w.map.get(s) {
            map.insert(s.clone(), t.clone());
            continue;
        }
        if s.is_empty() {
            map.insert(vec![], vec![]);
            continue;
        }
        let parent = map
            .get(&s[..s.len() - 1])
            .cloned()
            .ok_or_else(|| Error::InvalidInstance("spine extension missing parent".into()))?;
        let taken: BTreeSet<&Word> = map.values().collect();
        let mut m = s[s.len() - 1];
        let image = loop {
            let mut t = parent.clone();
            t.push(m);
            if t >= *s && !taken.contains(&t) {
                break t;
            }
            m += 1;
        };
        if image.iter().any(|&c| c >= w.bound) {
            return Err(Error::InvalidInstance(
                "spine extension escaped the refinement bound".into(),
            ));
        }
        map.insert(s.clone(), image);
    }
    Ok(map)
}

/// Validity of an injective refinement: a witness into its recorded target,
/// injective, with images never lexicographically preceding their arguments.
pub fn is_injective_witness(source: &NormalTree, w: &InjectiveWitness) -> bool {
    let lip = w.as_lipschitz();
    if !is_le_max_witness(source, &w.target, &lip) {
        return false;
    }
    let images: BTreeSet<&Word> = w.map.values().collect();
    if images.len() != w.map.len() {
        return false;
    }
    w.map.iter().all(|(s, t)| t >= s)
}

// ---------------------------------------------------------------------------
// Corpus enumeration
// ---------------------------------------------------------------------------

fn upsets_within(universe: &[Word], b: u8) -> Vec<BTreeSet<Word>> {
    // Universe is closed upward inside its length class; enumerate subsets
    // that are upward closed under single-entry bumps.
    assert!(universe.len() <= 20, "up-set universe too large");
    let idx: BTreeMap<&Word, usize> = universe.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut out = vec![];
    'mask: for mask in 0u32..(1 << universe.len()) {
        for (i, w) in universe.iter().enumerate() {
            if mask >> i & 1 == 0 {
                continue;
            }
            for p in 0..w.len() {
                if w[p] + 1 < b {
                    let mut w2 = w.clone();
                    w2[p] += 1;
                    match idx.get(&w2) {
                        Some(&j) if mask >> j & 1 == 1 => {}
                        _ => continue 'mask,
                    }
                }
            }
        }
        out.push(
            universe
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, w)| w.clone())
                .collect(),
        );
    }
    out
}

fn children_universe(level_set: &BTreeSet<Word>, b: u8) -> Vec<Word> {
    let mut out = vec![];
    for s in level_set {
        for i in 0..b {
            let mut c = s.clone();
            c.push(i);
            out.push(c);
        }
    }
    out.sort();
    out
}

/// Exact number of truncated normal trees at the given parameters, by
/// dynamic programming over per-branch numeric level sets. Errors when the
/// intermediate up-set universes grow beyond the estimator's range.
pub fn count_trees(d: u8, b: u8) -> Result<u128> {
    fn rec(
        d: u8,
        b: u8,
        level: u8,
        set: &BTreeSet<Word>,
        memo: &mut BTreeMap<(u8, Vec<Word>), u128>,
    ) -> Result<u128> {
        if level == d {
            return Ok(1);
        }
        let key = (level, set.iter().cloned().collect::<Vec<_>>());
        if let Some(&v) = memo.get(&key) {
            return Ok(v);
        }
        let universe = children_universe(set, b);
        if universe.len() > 20 {
            return Err(Error::budget(
                "tree counting up-set universe",
                universe.len() as u64,
                20,
            ));
        }
        let mut per_child = 0u128;
        for upset in upsets_within(&universe, b) {
            per_child += rec(d, b, level + 1, &upset, memo)?;
        }
        let total = per_child * per_child;
        memo.insert(key, total);
        Ok(total)
    }
    let mut memo = BTreeMap::new();
    rec(d, b, 0, &BTreeSet::from([vec![]]), &mut memo)
}

/// Exhaustive, duplicate-free enumeration of all truncated normal trees at
/// the given parameters, in canonical (node list) order. Refuses beyond the
/// default budget, quoting the exact count.
pub fn enumerate_trees(d: u8, b: u8, max_instances: u64) -> Result<Vec<NormalTree>> {
    if d > 3 || b > 3 {
        let estimate = count_trees(d, b)
            .map(|c| c.to_string())
            .unwrap_or_else(|_| "beyond the estimator range".into());
        return Err(Error::InvalidInstance(format!(
            "enumeration budget is d <= 3, b <= 3; requested (d={d}, b={b}) with {estimate} trees"
        )));
    }
    let count = count_trees(d, b)?;
    if count > max_instances as u128 {
        return Err(Error::budget(
            "tree enumeration instances",
            count as u64,
            max_instances,
        ));
    }

    // Enumerate per binary branch: assign to each binary word a numeric
    // level set, children supported on their parent's children universe.
    type Assignment = BTreeMap<Word, BTreeSet<Word>>;
    fn extend(
        d: u8,
        b: u8,
        level: u8,
        frontier: Vec<(Word, BTreeSet<Word>)>,
        acc: Assignment,
        out: &mut Vec<Assignment>,
    ) {
        if level == d {
            out.push(acc);
            return;
        }
        // Choose per frontier node the two child level sets.
        fn choose(
            d: u8,
            b: u8,
            level: u8,
            frontier: &[(Word, BTreeSet<Word>)],
            k: usize,
            acc: Assignment,
            next_frontier: Vec<(Word, BTreeSet<Word>)>,
            out: &mut Vec<Assignment>,
        ) {
            if k == frontier.len() {
                extend(d, b, level + 1, next_frontier, acc, out);
                return;
            }
            let (u, set) = &frontier[k];
            let universe = children_universe(set, b);
            for left in upsets_within(&universe, b) {
                for right in upsets_within(&universe, b) {
                    let mut acc2 = acc.clone();
                    let mut nf = next_frontier.clone();
                    for (bit, child_set) in [(0u8, &left), (1u8, &right)] {
                        let mut cu = u.clone();
                        cu.push(bit);
                        acc2.insert(cu.clone(), child_set.clone());
                        nf.push((cu, child_set.clone()));
                    }
                    choose(d, b, level, frontier, k + 1, acc2, nf, out);
                }
            }
        }
        choose(d, b, level, &frontier.clone(), 0, acc, vec![], out);
    }

    let root_set = BTreeSet::from([Word::new()]);
    let mut assignments = vec![];
    extend(
        d,
        b,
        0,
        vec![(Word::new(), root_set.clone())],
        Assignment::from([(Word::new(), root_set)]),
        &mut assignments,
    );

    let mut trees: Vec<NormalTree> = assignments
        .into_iter()
        .map(|a| {
            let mut nodes = BTreeSet::new();
            for (u, set) in a {
                for s in set {
                    nodes.insert((u.clone(), s));
                }
            }
            NormalTree { d, b, nodes }
        })
        .collect();
    trees.sort_by(|x, y| {
        let kx: Vec<_> = x.nodes.iter().collect();
        let ky: Vec<_> = y.nodes.iter().collect();
        kx.len().cmp(&ky.len()).then(kx.cmp(&ky))
    });
    trees.dedup();
    debug_assert_eq!(trees.len() as u128, count);
    Ok(trees)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(d: u8, b: u8, nodes: &[(&str, &[u8])]) -> NormalTree {
        NormalTree::new(
            d,
            b,
            nodes
                .iter()
                .map(|(u, s)| (word_from_string(u).unwrap(), s.to_vec()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn diagonal_tree_passes_all_three_conditions() {
        let t = NormalTree3::diagonal(2, 2);
        let r = check_normal_form(&t);
        assert!(r.reflexive && r.locally_transitive && r.antisymmetric_at_zero);
    }

    #[test]
    fn zero_witness_between_distinct_words_breaks_antisymmetry() {
        let mut nodes = NormalTree3::diagonal(1, 2).nodes().clone();
        nodes.insert((vec![0], vec![1], vec![0]));
        nodes.insert((vec![0], vec![1], vec![1]));
        let t = NormalTree3 { d: 1, b: 2, nodes };
        let r = check_normal_form(&t);
        assert!(!r.antisymmetric_at_zero);
        assert_eq!(r, check_normal_form_naive(&t));
    }

    #[test]
    fn checker_agrees_with_naive_on_closed_and_open_trees() {
        let closed = close_normal_form(2, 2, &[(vec![0], vec![1], vec![1])]).unwrap();
        assert!(check_normal_form(&closed).all());
        assert_eq!(check_normal_form(&closed), check_normal_form_naive(&closed));
    }

    #[test]
    fn slice_of_full_tree_is_full() {
        let full3 = {
            let mut nodes = BTreeSet::new();
            for u in words_up_to(1, 2) {
                for v in words_of_len(u.len(), 2) {
                    for s in words_of_len(u.len(), 2) {
                        nodes.insert((u.clone(), v.clone(), s));
                    }
                }
            }
            NormalTree3 { d: 1, b: 2, nodes }
        };
        let s = full3.slice(&[0]).unwrap();
        assert_eq!(s, NormalTree::full(1, 2));
    }

    #[test]
    fn slices_separate_directions() {
        // Nodes ride only on middle coordinate 0, so slicing along 1 loses them.
        let mut nodes = BTreeSet::from([(vec![], vec![], vec![])]);
        nodes.insert((vec![0], vec![0], vec![1]));
        let t = NormalTree3 { d: 1, b: 2, nodes };
        let s0 = t.slice(&[0]).unwrap();
        let s1 = t.slice(&[1]).unwrap();
        assert!(s0.contains(&[0], &[1]));
        assert!(!s1.contains(&[0], &[1]));
        assert_ne!(s0, s1);
    }

    #[test]
    fn le_max_is_reflexive_via_identity() {
        for t in enumerate_trees(1, 2, 1000).unwrap() {
            let id = LipschitzWitness::identity(&t);
            assert!(is_le_max_witness(&t, &t, &id));
            let w = le_max(&t, &t).unwrap().unwrap();
            assert!(is_le_max_witness(&t, &t, &w));
        }
    }

    #[test]
    fn documented_negative_pair() {
        let s = tree(1, 2, &[("", &[]), ("1", &[0]), ("1", &[1])]);
        let t = tree(1, 2, &[("", &[]), ("0", &[0]), ("0", &[1])]);
        assert!(le_max(&s, &t).unwrap().is_none());
    }

    #[test]
    fn depth_mismatch_is_an_error() {
        let s = NormalTree::root_only(1, 2);
        let t = NormalTree::root_only(2, 2);
        assert!(matches!(le_max(&s, &t), Err(Error::Precondition(_))));
    }

    #[test]
    fn witnesses_compose_and_revalidate() {
        let corpus = enumerate_trees(1, 2, 1000).unwrap();
        for a in &corpus {
            for b in &corpus {
                let Some(ab) = le_max(a, b).unwrap() else {
                    continue;
                };
                for c in &corpus {
                    if let Some(bc) = le_max(b, c).unwrap() {
                        let comp = ab.compose(&bc).expect("image lies in domain");
                        assert!(is_le_max_witness(a, c, &comp));
                    }
                }
            }
        }
    }

    #[test]
    fn clip_soundness_against_naive_closure() {
        let corpus = enumerate_trees(1, 2, 1000).unwrap();
        for t in &corpus {
            for u in words_up_to(t.d, 2) {
                for raw in words_of_len(u.len(), 2 * t.b) {
                    assert_eq!(
                        t.closure_contains(&u, &raw),
                        t.closure_contains_naive(&u, &raw),
                    );
                }
            }
        }
    }

    #[test]
    fn injective_refinement_separates_shared_images() {
        // Both length-1 projections are forced onto the single target word,
        // so the refinement must enlarge the bound to separate them.
        let s = tree(1, 2, &[("", &[]), ("0", &[0]), ("0", &[1])]);
        let t = tree(1, 2, &[("", &[]), ("0", &[1])]);
        let f0 = le_max(&s, &t).unwrap().unwrap();
        assert_eq!(f0.map[&vec![0u8]], vec![1]);
        assert_eq!(f0.map[&vec![1u8]], vec![1]);
        let w = canonical_injective_witness(&s, &t, &f0).unwrap();
        assert!(is_injective_witness(&s, &w));
        assert_eq!(w.bound, 3);
        assert_eq!(w.map[&vec![0u8]], vec![1]);
        assert_eq!(w.map[&vec![1u8]], vec![2]);
    }

    #[test]
    fn refinement_is_injective_and_monotone_across_the_corpus() {
        let corpus = enumerate_trees(1, 2, 1000).unwrap();
        for a in &corpus {
            for b in &corpus {
                if let Some(f0) = le_max(a, b).unwrap() {
                    let w = canonical_injective_witness(a, b, &f0).unwrap();
                    assert!(is_injective_witness(a, &w));
                }
            }
        }
    }

    #[test]
    fn refinement_of_identity_is_identity() {
        let t = NormalTree::full(1, 2);
        let id = LipschitzWitness::identity(&t);
        let w = canonical_injective_witness(&t, &t, &id).unwrap();
        assert_eq!(w.bound, 2);
        assert_eq!(w.as_lipschitz(), id);
    }

    #[test]
    fn tree_counts_match_hand_enumeration() {
        assert_eq!(count_trees(0, 1).unwrap(), 1);
        assert_eq!(count_trees(1, 1).unwrap(), 4);
        assert_eq!(count_trees(1, 2).unwrap(), 9);
        assert_eq!(count_trees(2, 2).unwrap(), 2116);
        assert_eq!(enumerate_trees(0, 1, 10).unwrap().len(), 1);
        assert_eq!(enumerate_trees(1, 1, 10).unwrap().len(), 4);
        assert_eq!(enumerate_trees(1, 2, 100).unwrap().len(), 9);
    }

    #[test]
    fn enumerated_trees_validate_and_are_distinct() {
        let trees = enumerate_trees(2, 2, 5000).unwrap();
        assert_eq!(trees.len(), 2116);
        let set: BTreeSet<_> = trees.iter().collect();
        assert_eq!(set.len(), trees.len());
        for t in trees.iter().step_by(97) {
            t.validate().unwrap();
        }
    }

    #[test]
    fn ranks_are_length_then_lex() {
        assert_eq!(length_lex_rank(&[], 2), 0);
        assert_eq!(length_lex_rank(&[0], 2), 1);
        assert_eq!(length_lex_rank(&[1], 2), 2);
        assert_eq!(length_lex_rank(&[0, 0], 2), 3);
        assert_eq!(length_lex_rank(&[1, 1], 2), 6);
        assert_eq!(theta(&[]), 0);
        assert_eq!(theta(&[0]), 1);
        assert_eq!(theta(&[1]), 2);
    }

    #[test]
    fn tree_json_round_trip() {
        let t = tree(1, 2, &[("", &[]), ("0", &[0]), ("0", &[1])]);
        let s = serde_json::to_string(&t).unwrap();
        let back: NormalTree = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
