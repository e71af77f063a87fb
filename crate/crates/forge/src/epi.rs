//! Quantifier-free type codes and the epimorphism gadget: one block per
//! bounded index word, carrying a clique whose size encodes the type of the
//! word read as a vertex tuple, a child clique, and cross links down the
//! index tree.
//!
//! Two pendant-marker refinements keep the truncated blocks as pinned as the
//! unbounded construction: the root block's head vertex and the deepest
//! blocks' child vertices lose their pinning neighbors to truncation, so
//! each receives a degree-one marker restoring it. Without the markers the
//! head of the root block and its clique siblings would be interchangeable.

use crate::error::{Error, Result};
use crate::graph::{automorphisms, Graph, SearchBudget};
use crate::hash::hash_of;
use crate::trees::{word_from_string, word_to_string, words_up_to, Word};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

// ---------------------------------------------------------------------------
// Quantifier-free types in the one-binary-relation language
// ---------------------------------------------------------------------------

/// Equality pattern (as a restricted growth string over the tuple positions)
/// plus an adjacency pattern on the ordered pairs of distinct classes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct QfType {
    pub arity: usize,
    pub partition: Vec<u8>,
    pub adjacency: Vec<bool>,
}

fn partitions_rgs(arity: usize) -> Vec<Vec<u8>> {
    fn rec(arity: usize, prefix: Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == arity {
            out.push(prefix);
            return;
        }
        let max = prefix.iter().copied().max().map_or(0, |m| m + 1);
        for c in 0..=max {
            let mut p = prefix.clone();
            p.push(c);
            rec(arity, p, out);
        }
    }
    let mut out = vec![];
    rec(arity, vec![], &mut out);
    out
}

/// All types of one arity in enumeration order: partitions in restricted
/// growth order, then adjacency bit patterns in ascending numeric order.
pub fn types_of_arity(arity: usize) -> Vec<QfType> {
    let mut out = vec![];
    for partition in partitions_rgs(arity) {
        let classes = partition
            .iter()
            .copied()
            .max()
            .map_or(0, |m| m as usize + 1);
        let pairs = classes * (classes.saturating_sub(1)) / 2;
        for bits in 0u64..(1 << pairs) {
            out.push(QfType {
                arity,
                partition: partition.clone(),
                adjacency: (0..pairs).map(|k| bits >> k & 1 == 1).collect(),
            });
        }
    }
    out
}

/// Least code of any type of the given arity: the cumulative count of all
/// lower-arity types.
pub fn alpha(arity: usize) -> u64 {
    (0..arity).map(|a| types_of_arity(a).len() as u64).sum()
}

fn class_pair_index(classes: usize, a: usize, b: usize) -> usize {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    // Position of (lo, hi) in the row-major listing of pairs.
    (0..lo).map(|r| classes - r - 1).sum::<usize>() + (hi - lo - 1)
}

/// The quantifier-free type of a vertex tuple.
pub fn qf_type(g: &Graph, tuple: &[u32]) -> Result<QfType> {
    if let Some(&v) = tuple.iter().find(|&&v| v as usize >= g.n()) {
        return Err(Error::Precondition(format!(
            "tuple entry {v} is not a vertex of a graph on {}",
            g.n()
        )));
    }
    let mut reps: Vec<u32> = vec![];
    let mut partition = vec![];
    for &v in tuple {
        match reps.iter().position(|&r| r == v) {
            Some(c) => partition.push(c as u8),
            None => {
                partition.push(reps.len() as u8);
                reps.push(v);
            }
        }
    }
    let classes = reps.len();
    let pairs = classes * classes.saturating_sub(1) / 2;
    let mut adjacency = vec![false; pairs];
    for a in 0..classes {
        for b in a + 1..classes {
            adjacency[class_pair_index(classes, a, b)] = g.has_edge(reps[a], reps[b]);
        }
    }
    Ok(QfType {
        arity: tuple.len(),
        partition,
        adjacency,
    })
}

/// The integer code of the type of a tuple under the fixed enumeration:
/// arity-major, then partition, then adjacency bits.
pub fn type_code(g: &Graph, tuple: &[u32]) -> Result<u64> {
    let t = qf_type(g, tuple)?;
    let position = types_of_arity(t.arity)
        .iter()
        .position(|cand| *cand == t)
        .expect("computed type occurs in its arity enumeration");
    Ok(alpha(t.arity) + position as u64)
}

/// Index-word entries reduced into the vertex range.
pub fn reduce_tuple(t: &[u8], n: usize) -> Vec<u32> {
    t.iter().map(|&c| (c as usize % n) as u32).collect()
}

// ---------------------------------------------------------------------------
// The gadget
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EpiKind {
    /// Head vertex of the block at `t`; linked upward to the parent block.
    Head(Word),
    /// Clique companion `idx` in `1..=type+2`; the last one is the bridge
    /// adjacent to the whole child clique.
    Clique(Word, u32),
    /// Child vertex `i`, linked to the head of the block at `t` extended by `i`.
    Child(Word, u8),
    /// Companion of child `i` inside the child clique.
    Partner(Word, u8),
    /// Degree-one pin on the root head.
    RootMark,
    /// Degree-one pin on child `i` of a depth-boundary block.
    ChildMark(Word, u8),
}

impl EpiKind {
    fn tag(&self) -> &'static str {
        match self {
            EpiKind::Head(_) => "Head",
            EpiKind::Clique(..) => "Clique",
            EpiKind::Child(..) => "Child",
            EpiKind::Partner(..) => "Partner",
            EpiKind::RootMark => "RootMark",
            EpiKind::ChildMark(..) => "ChildMark",
        }
    }

    fn payload(&self) -> String {
        match self {
            EpiKind::Head(t) => word_to_string(t),
            EpiKind::Clique(t, i) => format!("{};{i}", word_to_string(t)),
            EpiKind::Child(t, i) | EpiKind::ChildMark(t, i) => {
                format!("{};{i}", word_to_string(t))
            }
            EpiKind::Partner(t, i) => format!("{};{i}", word_to_string(t)),
            EpiKind::RootMark => String::new(),
        }
    }

    fn from_parts(tag: &str, payload: &str) -> Result<Self> {
        let bad = || Error::InvalidInstance(format!("bad epi kind {tag}:{payload}"));
        let split = |p: &str| -> Result<(Word, u32)> {
            let (w, i) = p.split_once(';').ok_or_else(bad)?;
            Ok((word_from_string(w)?, i.parse().map_err(|_| bad())?))
        };
        Ok(match tag {
            "Head" => EpiKind::Head(word_from_string(payload)?),
            "Clique" => {
                let (t, i) = split(payload)?;
                EpiKind::Clique(t, i)
            }
            "Child" => {
                let (t, i) = split(payload)?;
                EpiKind::Child(t, i as u8)
            }
            "Partner" => {
                let (t, i) = split(payload)?;
                EpiKind::Partner(t, i as u8)
            }
            "RootMark" => EpiKind::RootMark,
            "ChildMark" => {
                let (t, i) = split(payload)?;
                EpiKind::ChildMark(t, i as u8)
            }
            _ => return Err(bad()),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EpiJson {
    graph: Graph,
    kinds: Vec<(String, String)>,
    d: u8,
    b: u8,
    source: Graph,
    source_hash: String,
    block_types: Vec<(String, u64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EpiJson", into = "EpiJson")]
pub struct EpiGadget {
    pub graph: Graph,
    pub kinds: Vec<EpiKind>,
    pub d: u8,
    pub b: u8,
    pub source: Graph,
    pub block_types: BTreeMap<Word, u64>,
}

impl TryFrom<EpiJson> for EpiGadget {
    type Error = Error;
    fn try_from(j: EpiJson) -> Result<Self> {
        let kinds = j
            .kinds
            .iter()
            .map(|(t, p)| EpiKind::from_parts(t, p))
            .collect::<Result<Vec<_>>>()?;
        let block_types = j
            .block_types
            .iter()
            .map(|(w, c)| Ok((word_from_string(w)?, *c)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(EpiGadget {
            graph: j.graph,
            kinds,
            d: j.d,
            b: j.b,
            source: j.source,
            block_types,
        })
    }
}

impl From<EpiGadget> for EpiJson {
    fn from(e: EpiGadget) -> EpiJson {
        EpiJson {
            kinds: e
                .kinds
                .iter()
                .map(|k| (k.tag().to_string(), k.payload()))
                .collect(),
            source_hash: hash_of(&e.source),
            block_types: e
                .block_types
                .iter()
                .map(|(w, c)| (word_to_string(w), *c))
                .collect(),
            graph: e.graph,
            d: e.d,
            b: e.b,
            source: e.source,
        }
    }
}

/// Builds the truncated epimorphism gadget of a nonempty graph: blocks for
/// every index word up to depth `d` over `b` entries, tuple entries reduced
/// into the vertex range.
pub fn build_epi_gadget(g: &Graph, d: u8, b: u8, budget: SearchBudget) -> Result<EpiGadget> {
    if g.n() == 0 {
        return Err(Error::Precondition("gadget source must be nonempty".into()));
    }
    if b == 0 {
        return Err(Error::Precondition("branch bound must be positive".into()));
    }
    let index_words = words_up_to(d, b);
    let mut block_types = BTreeMap::new();
    let mut count = 1u64; // root mark
    for t in &index_words {
        let code = type_code(g, &reduce_tuple(t, g.n()))?;
        count += code + 3 + 2 * b as u64;
        if t.len() == d as usize {
            count += b as u64; // child marks
        }
        block_types.insert(t.clone(), code);
    }
    if count > budget.max_vertices as u64 {
        return Err(Error::budget(
            "epi gadget vertices",
            count,
            budget.max_vertices as u64,
        ));
    }

    let mut kinds: Vec<EpiKind> = vec![];
    for t in &index_words {
        let n_t = block_types[t] as u32;
        kinds.push(EpiKind::Head(t.clone()));
        for idx in 1..=n_t + 2 {
            kinds.push(EpiKind::Clique(t.clone(), idx));
        }
        for i in 0..b {
            kinds.push(EpiKind::Child(t.clone(), i));
            kinds.push(EpiKind::Partner(t.clone(), i));
            if t.len() == d as usize {
                kinds.push(EpiKind::ChildMark(t.clone(), i));
            }
        }
    }
    kinds.push(EpiKind::RootMark);
    kinds.sort();
    let at: BTreeMap<&EpiKind, u32> = kinds
        .iter()
        .enumerate()
        .map(|(i, k)| (k, i as u32))
        .collect();

    let mut edges: Vec<(u32, u32)> = vec![];
    for t in &index_words {
        let n_t = block_types[t] as u32;
        let head: Vec<u32> = std::iter::once(at[&EpiKind::Head(t.clone())])
            .chain((1..=n_t + 2).map(|idx| at[&EpiKind::Clique(t.clone(), idx)]))
            .collect();
        for (x, &a) in head.iter().enumerate() {
            for &bb in &head[x + 1..] {
                edges.push((a, bb));
            }
        }
        let children: Vec<u32> = (0..b)
            .flat_map(|i| {
                [
                    at[&EpiKind::Child(t.clone(), i)],
                    at[&EpiKind::Partner(t.clone(), i)],
                ]
            })
            .collect();
        for (x, &a) in children.iter().enumerate() {
            for &bb in &children[x + 1..] {
                edges.push((a, bb));
            }
        }
        let bridge = at[&EpiKind::Clique(t.clone(), n_t + 2)];
        for &c in &children {
            edges.push((bridge, c));
        }
        for i in 0..b {
            if t.len() < d as usize {
                let mut child_word = t.clone();
                child_word.push(i);
                edges.push((
                    at[&EpiKind::Child(t.clone(), i)],
                    at[&EpiKind::Head(child_word)],
                ));
            } else {
                edges.push((
                    at[&EpiKind::Child(t.clone(), i)],
                    at[&EpiKind::ChildMark(t.clone(), i)],
                ));
            }
        }
    }
    edges.push((at[&EpiKind::Head(vec![])], at[&EpiKind::RootMark]));

    Ok(EpiGadget {
        graph: Graph::new(kinds.len(), edges)?,
        kinds,
        d,
        b,
        source: g.clone(),
        block_types,
    })
}

/// Attempts the blockwise epimorphism from the source gadget onto the
/// target: an entrywise index bijection that matches the type profiles
/// induces a block-by-block surjection carrying edges to edges. Cliques can
/// never collapse under an edge-preserving map, so at truncation a blockwise
/// witness exists exactly when such a bijection does; the unbounded
/// construction instead absorbs mismatches into unbounded child cliques.
pub fn blockwise_epimorphism(
    target: &EpiGadget,
    source: &EpiGadget,
) -> Option<crate::graph::VertexMap> {
    if target.d != source.d || target.b != source.b {
        return None;
    }
    let b = target.b as usize;
    let mut sigma: Vec<u8> = (0..b as u8).collect();
    let words = words_up_to(target.d, target.b);
    loop {
        let apply = |t: &Word| -> Word { t.iter().map(|&c| sigma[c as usize]).collect() };
        if words
            .iter()
            .all(|t| source.block_types[t] == target.block_types[&apply(t)])
        {
            let mut map = vec![0u32; source.graph.n()];
            let at = |k: &EpiKind| -> u32 {
                target
                    .kinds
                    .iter()
                    .position(|x| x == k)
                    .expect("matched block image exists") as u32
            };
            for (v, kind) in source.kinds.iter().enumerate() {
                let image = match kind {
                    EpiKind::Head(t) => EpiKind::Head(apply(t)),
                    EpiKind::Clique(t, idx) => EpiKind::Clique(apply(t), *idx),
                    EpiKind::Child(t, i) => EpiKind::Child(apply(t), sigma[*i as usize]),
                    EpiKind::Partner(t, i) => EpiKind::Partner(apply(t), sigma[*i as usize]),
                    EpiKind::RootMark => EpiKind::RootMark,
                    EpiKind::ChildMark(t, i) => EpiKind::ChildMark(apply(t), sigma[*i as usize]),
                };
                map[v] = at(&image);
            }
            return Some(crate::graph::VertexMap { map });
        }
        // Next permutation in lexicographic order.
        let mut i = b.wrapping_sub(1);
        while i > 0 && sigma[i - 1] >= sigma[i] {
            i -= 1;
        }
        if i == 0 {
            return None;
        }
        let mut j = b - 1;
        while sigma[j] <= sigma[i - 1] {
            j -= 1;
        }
        sigma.swap(i - 1, j);
        sigma[i..].reverse();
    }
}

/// Expected order of the simple automorphism group: per block, the
/// interchangeable clique companions and the interchangeable partners.
pub fn expected_simple_order(e: &EpiGadget) -> u128 {
    let factorial = |k: u64| (1..=k as u128).product::<u128>();
    e.block_types
        .values()
        .map(|&code| factorial(code + 1) * factorial(e.b as u64))
        .product()
}

// ---------------------------------------------------------------------------
// Simple automorphisms
// ---------------------------------------------------------------------------

fn maximal_cliques(g: &Graph) -> Vec<BTreeSet<u32>> {
    // Bron-Kerbosch without pivoting; gadget cliques are few and fat.
    fn rec(
        g: &Graph,
        r: &mut BTreeSet<u32>,
        p: &mut BTreeSet<u32>,
        x: &mut BTreeSet<u32>,
        out: &mut Vec<BTreeSet<u32>>,
    ) {
        if p.is_empty() && x.is_empty() {
            out.push(r.clone());
            return;
        }
        let candidates: Vec<u32> = p.iter().copied().collect();
        for v in candidates {
            let nv: BTreeSet<u32> = g.neighbors(v).collect();
            r.insert(v);
            let mut p2: BTreeSet<u32> = p.intersection(&nv).copied().collect();
            let mut x2: BTreeSet<u32> = x.intersection(&nv).copied().collect();
            rec(g, r, &mut p2, &mut x2, out);
            r.remove(&v);
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut out = vec![];
    rec(
        g,
        &mut BTreeSet::new(),
        &mut (0..g.n() as u32).collect(),
        &mut BTreeSet::new(),
        &mut out,
    );
    out.sort();
    out
}

/// For each vertex, the unique maximal clique containing it, when unique.
pub fn unique_clique_map(g: &Graph) -> Vec<Option<BTreeSet<u32>>> {
    let cliques = maximal_cliques(g);
    (0..g.n() as u32)
        .map(|v| {
            let mine: Vec<&BTreeSet<u32>> = cliques.iter().filter(|c| c.contains(&v)).collect();
            if mine.len() == 1 {
                Some(mine[0].clone())
            } else {
                None
            }
        })
        .collect()
}

/// An automorphism is simple when every moved vertex lies in a unique
/// maximal clique and its image stays inside that clique.
pub fn is_simple_automorphism(perm: &[u32], unique: &[Option<BTreeSet<u32>>]) -> bool {
    perm.iter().enumerate().all(|(v, &image)| {
        v as u32 == image
            || unique[v]
                .as_ref()
                .map(|c| c.contains(&image))
                .unwrap_or(false)
    })
}

fn compose(p: &[u32], q: &[u32]) -> Vec<u32> {
    p.iter().map(|&v| q[v as usize]).collect()
}

/// Enumerates all elements of the permutation group generated by `gens`.
pub fn group_elements(degree: usize, gens: &[Vec<u32>], cap: usize) -> Result<Vec<Vec<u32>>> {
    let identity: Vec<u32> = (0..degree as u32).collect();
    let mut seen: BTreeSet<Vec<u32>> = BTreeSet::from([identity.clone()]);
    let mut queue = vec![identity];
    while let Some(p) = queue.pop() {
        for gen in gens {
            let q = compose(&p, gen);
            if seen.insert(q.clone()) {
                if seen.len() > cap {
                    return Err(Error::budget(
                        "group element enumeration",
                        seen.len() as u64,
                        cap as u64,
                    ));
                }
                queue.push(q);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

#[derive(Debug, Clone)]
pub struct SimpleGroup {
    pub order: u128,
    pub elements: Vec<Vec<u32>>,
    pub generators: Vec<Vec<u32>>,
}

/// The subgroup of graph automorphisms that only move vertices inside their
/// unique maximal cliques, computed by filtering the full group.
pub fn simple_automorphism_group(e: &EpiGadget) -> Result<SimpleGroup> {
    let aut = automorphisms(&e.graph)?;
    if aut.order > 1_000_000 {
        return Err(Error::budget(
            "automorphism group order",
            aut.order as u64,
            1_000_000,
        ));
    }
    let all = group_elements(e.graph.n(), &aut.generators, 1_000_000)?;
    debug_assert_eq!(all.len() as u128, aut.order);
    let unique = unique_clique_map(&e.graph);
    let elements: Vec<Vec<u32>> = all
        .into_iter()
        .filter(|p| is_simple_automorphism(p, &unique))
        .collect();
    let mut generators: Vec<Vec<u32>> = vec![];
    let mut span = group_elements(e.graph.n(), &generators, 1_000_000)?;
    for p in &elements {
        if !span.contains(p) {
            generators.push(p.clone());
            span = group_elements(e.graph.n(), &generators, 1_000_000)?;
        }
    }
    Ok(SimpleGroup {
        order: elements.len() as u128,
        elements,
        generators,
    })
}

/// Local extension test: an injective sequence `a` (as the partial map
/// `i -> a[i]`) extends to a simple automorphism exactly when images mirror
/// adjacency, every moved point and its image lie in that point's unique
/// maximal clique, and moved points touch their images.
pub fn can_extend_simple(e: &EpiGadget, a: &[u32]) -> Result<bool> {
    let g = &e.graph;
    if a.iter().any(|&v| v as usize >= g.n()) {
        return Err(Error::Precondition("sequence entry out of range".into()));
    }
    let mut seen = BTreeSet::new();
    if !a.iter().all(|&v| seen.insert(v)) {
        return Err(Error::Precondition("sequence must be injective".into()));
    }
    let unique = unique_clique_map(g);
    let clique_closed = |v: u32| -> bool {
        let nb: Vec<u32> = g.neighbors(v).collect();
        nb.iter()
            .all(|&x| nb.iter().all(|&y| x == y || g.has_edge(x, y)))
    };
    for (i, &ai) in a.iter().enumerate() {
        let i = i as u32;
        for (j, &aj) in a.iter().enumerate() {
            let j = j as u32;
            if i != j && g.has_edge(i, j) != g.has_edge(ai, aj) {
                return Ok(false);
            }
        }
        if i != ai {
            if !clique_closed(i) || !clique_closed(ai) || !g.has_edge(i, ai) {
                return Ok(false);
            }
            debug_assert!(unique[i as usize].is_some());
        }
    }
    Ok(true)
}

/// Brute-force oracle for `can_extend_simple`.
pub fn can_extend_simple_brute(simple: &SimpleGroup, a: &[u32]) -> bool {
    simple
        .elements
        .iter()
        .any(|p| a.iter().enumerate().all(|(i, &ai)| p[i] == ai))
}

/// Backtracking oracle for instances whose full group is too large to
/// enumerate: searches directly for a simple automorphism extending the
/// sequence, constraining every moved vertex to its unique maximal clique.
pub fn can_extend_simple_search(
    e: &EpiGadget,
    unique: &[Option<BTreeSet<u32>>],
    seq: &[u32],
) -> Result<bool> {
    let g = &e.graph;
    let n = g.n() as u32;
    if seq.iter().any(|&v| v >= n) {
        return Err(Error::Precondition("sequence entry out of range".into()));
    }
    fn consistent(g: &Graph, assign: &[u32], v: u32, w: u32) -> bool {
        assign
            .iter()
            .enumerate()
            .all(|(u, &wu)| g.has_edge(u as u32, v) == g.has_edge(wu, w))
    }
    fn rec(
        g: &Graph,
        unique: &[Option<BTreeSet<u32>>],
        assign: &mut Vec<u32>,
        used: &mut Vec<bool>,
        n: u32,
    ) -> bool {
        let v = assign.len() as u32;
        if v == n {
            return true;
        }
        for w in 0..n {
            if used[w as usize] {
                continue;
            }
            let simple_ok = v == w
                || unique[v as usize]
                    .as_ref()
                    .map(|c| c.contains(&w))
                    .unwrap_or(false);
            if simple_ok && consistent(g, assign, v, w) {
                assign.push(w);
                used[w as usize] = true;
                if rec(g, unique, assign, used, n) {
                    return true;
                }
                assign.pop();
                used[w as usize] = false;
            }
        }
        false
    }
    let mut seen = BTreeSet::new();
    if !seq.iter().all(|&v| seen.insert(v)) {
        return Err(Error::Precondition("sequence must be injective".into()));
    }
    // The pinned prefix must itself satisfy the constraints.
    let mut assign: Vec<u32> = vec![];
    let mut used = vec![false; n as usize];
    for (v, &w) in seq.iter().enumerate() {
        let v = v as u32;
        let simple_ok = v == w
            || unique[v as usize]
                .as_ref()
                .map(|c| c.contains(&w))
                .unwrap_or(false);
        if !simple_ok || !consistent(g, &assign, v, w) {
            return Ok(false);
        }
        assign.push(w);
        used[w as usize] = true;
    }
    Ok(rec(g, unique, &mut assign, &mut used, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::enumerate_graphs;

    #[test]
    fn type_enumeration_small_arities() {
        assert_eq!(types_of_arity(0).len(), 1);
        assert_eq!(types_of_arity(1).len(), 1);
        assert_eq!(types_of_arity(2).len(), 3);
        assert_eq!(types_of_arity(3).len(), 15);
        assert_eq!(alpha(0), 0);
        assert_eq!(alpha(1), 1);
        assert_eq!(alpha(2), 2);
        assert_eq!(alpha(3), 5);
    }

    #[test]
    fn empty_tuple_has_code_zero() {
        let g = Graph::path(2);
        assert_eq!(type_code(&g, &[]).unwrap(), 0);
    }

    #[test]
    fn unary_code_is_alpha_one_for_every_graph() {
        for g in enumerate_graphs(3, false).unwrap() {
            for v in 0..g.n() as u32 {
                assert_eq!(type_code(&g, &[v]).unwrap(), alpha(1));
            }
        }
    }

    #[test]
    fn binary_codes_distinguish_equal_adjacent_nonadjacent() {
        let g = Graph::path(3);
        let equal = type_code(&g, &[1, 1]).unwrap();
        let adjacent = type_code(&g, &[0, 1]).unwrap();
        let non_adjacent = type_code(&g, &[0, 2]).unwrap();
        assert_eq!(equal, 2);
        assert_eq!(non_adjacent, 3);
        assert_eq!(adjacent, 4);
        let set = BTreeSet::from([equal, adjacent, non_adjacent]);
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn single_vertex_blocks_hand_verified() {
        let g = Graph::empty(1);
        let e = build_epi_gadget(&g, 1, 1, SearchBudget::for_suites()).unwrap();
        // Blocks for the empty word and one child word. Type codes 0 and 1,
        // so block sizes (0+3)+2 and (1+3)+2, plus root mark and one child
        // mark on the depth boundary.
        assert_eq!(e.block_types.len(), 2);
        assert_eq!(e.block_types[&vec![]], 0);
        assert_eq!(e.block_types[&vec![0u8]], 1);
        assert_eq!(e.graph.n(), 5 + 6 + 2);
    }

    #[test]
    fn bridge_vertex_touches_whole_child_clique() {
        let g = Graph::path(2);
        let e = build_epi_gadget(&g, 1, 2, SearchBudget::for_suites()).unwrap();
        for t in e.block_types.keys() {
            let n_t = e.block_types[t] as u32;
            let bridge = e
                .kinds
                .iter()
                .position(|k| *k == EpiKind::Clique(t.clone(), n_t + 2))
                .unwrap() as u32;
            for i in 0..e.b {
                for kind in [EpiKind::Child(t.clone(), i), EpiKind::Partner(t.clone(), i)] {
                    let v = e.kinds.iter().position(|k| *k == kind).unwrap() as u32;
                    assert!(e.graph.has_edge(bridge, v));
                }
            }
        }
    }

    #[test]
    fn simple_group_matches_product_formula() {
        let g = Graph::empty(1);
        let e = build_epi_gadget(&g, 1, 2, SearchBudget::for_suites()).unwrap();
        let simple = simple_automorphism_group(&e).unwrap();
        assert_eq!(simple.order, expected_simple_order(&e));
        // Blocks of types 0, 1, 1 with two partners each: 1!*2! * 2!*2! * 2!*2!.
        assert_eq!(simple.order, 32);
    }

    #[test]
    fn full_group_equals_simple_group_on_chain_blocks() {
        let g = Graph::empty(1);
        let e = build_epi_gadget(&g, 2, 1, SearchBudget::for_suites()).unwrap();
        let aut = automorphisms(&e.graph).unwrap();
        let simple = simple_automorphism_group(&e).unwrap();
        assert_eq!(aut.order, simple.order);
        assert_eq!(simple.order, 12);
        assert_eq!(expected_simple_order(&e), 12);
    }

    #[test]
    fn simple_automorphisms_fix_heads_bridges_and_children() {
        let g = Graph::empty(1);
        let e = build_epi_gadget(&g, 1, 2, SearchBudget::for_suites()).unwrap();
        let simple = simple_automorphism_group(&e).unwrap();
        for gen in &simple.generators {
            for (v, kind) in e.kinds.iter().enumerate() {
                let pinned = match kind {
                    EpiKind::Head(_)
                    | EpiKind::Child(..)
                    | EpiKind::RootMark
                    | EpiKind::ChildMark(..) => true,
                    EpiKind::Clique(t, idx) => *idx == e.block_types[t] as u32 + 2,
                    EpiKind::Partner(..) => false,
                };
                if pinned {
                    assert_eq!(gen[v], v as u32, "kind {kind:?} moved");
                }
            }
        }
    }

    #[test]
    fn extension_conditions_match_brute_force_on_pairs() {
        let g = Graph::path(2);
        let e = build_epi_gadget(&g, 1, 1, SearchBudget::for_suites()).unwrap();
        let simple = simple_automorphism_group(&e).unwrap();
        let n = e.graph.n() as u32;
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let fast = can_extend_simple(&e, &[x, y]).unwrap();
                let brute = can_extend_simple_brute(&simple, &[x, y]);
                assert_eq!(fast, brute, "prefix [{x},{y}]");
            }
        }
    }

    #[test]
    fn identity_prefix_extends() {
        let g = Graph::path(2);
        let e = build_epi_gadget(&g, 1, 1, SearchBudget::for_suites()).unwrap();
        assert!(can_extend_simple(&e, &[0, 1, 2]).unwrap());
    }

    #[test]
    fn head_vertices_cannot_move() {
        let g = Graph::empty(1);
        let e = build_epi_gadget(&g, 1, 1, SearchBudget::for_suites()).unwrap();
        let head = e
            .kinds
            .iter()
            .position(|k| *k == EpiKind::Head(vec![]))
            .unwrap() as u32;
        let clique1 = e
            .kinds
            .iter()
            .position(|k| *k == EpiKind::Clique(vec![], 1))
            .unwrap() as u32;
        // A sequence sending the root head into its clique sibling: the head
        // lies in two maximal cliques, so the extension must fail.
        let mut seq: Vec<u32> = (0..head).collect();
        seq.push(clique1);
        assert!(!can_extend_simple(&e, &seq).unwrap());
    }

    #[test]
    fn epi_json_round_trip() {
        let g = Graph::path(2);
        let e = build_epi_gadget(&g, 1, 1, SearchBudget::for_suites()).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        let back: EpiGadget = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
